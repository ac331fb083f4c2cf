//! Truncated matrix representations of single-mode ladder operators.
//!
//! Rows and columns are indexed by photon number `0..dim`. The ladder
//! operators are cut at `dim - 1`, so relations such as `a a+ = D(N+1)` only
//! hold on the interior block (indices `< dim - 1`); [`verify_algebra`]
//! checks them there.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::deformation::{DeformationScheme, SchemeKind};
use crate::error::{Error, Result};

/// Largest dimension the CLI dump accepts.
pub const MAX_DUMP_DIM: usize = 512;

/// Dense square operator on the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator(DMatrix<f64>);

impl TruncatedOperator {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidDimension(m.nrows()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("operator entries must be finite".into()));
        }
        Ok(TruncatedOperator(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn transpose(&self) -> Self {
        TruncatedOperator(self.0.transpose())
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.0 * v
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(TruncatedOperator(&self.0 * &other.0))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

/// `P_mn = |m><n|`.
pub fn projector(m: usize, n: usize, dim: usize) -> Result<TruncatedOperator> {
    check_dim(dim)?;
    if m >= dim || n >= dim {
        return Err(Error::IndexOutOfRange { row: m, col: n, dim });
    }
    let mut out = DMatrix::zeros(dim, dim);
    out[(m, n)] = 1.0;
    Ok(TruncatedOperator(out))
}

fn ladder_elements(scheme: &DeformationScheme, dim: usize) -> Result<Vec<f64>> {
    (1..dim as u32)
        .map(|k| {
            let d = scheme.eval_d(k)?;
            if d < 0.0 {
                return Err(Error::NegativeDeformation { n: k, value: d });
            }
            Ok(d.sqrt())
        })
        .collect()
}

/// `a = sum_n sqrt(D(n+1)) P_{n,n+1}`: superdiagonal.
pub fn annihilation_matrix(scheme: &DeformationScheme, dim: usize) -> Result<TruncatedOperator> {
    check_dim(dim)?;
    let mut out = DMatrix::zeros(dim, dim);
    for (n, v) in ladder_elements(scheme, dim)?.into_iter().enumerate() {
        out[(n, n + 1)] = v;
    }
    Ok(TruncatedOperator(out))
}

/// `a+ = sum_n sqrt(D(n+1)) P_{n+1,n}`: subdiagonal.
pub fn creation_matrix(scheme: &DeformationScheme, dim: usize) -> Result<TruncatedOperator> {
    check_dim(dim)?;
    let mut out = DMatrix::zeros(dim, dim);
    for (n, v) in ladder_elements(scheme, dim)?.into_iter().enumerate() {
        out[(n + 1, n)] = v;
    }
    Ok(TruncatedOperator(out))
}

pub fn number_matrix(dim: usize) -> Result<TruncatedOperator> {
    check_dim(dim)?;
    Ok(TruncatedOperator(DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            i as f64
        } else {
            0.0
        }
    })))
}

pub fn identity_matrix(dim: usize) -> Result<TruncatedOperator> {
    check_dim(dim)?;
    Ok(TruncatedOperator(DMatrix::identity(dim, dim)))
}

/// Diagonal `D(N + shift)`, i.e. entries `D(n + shift)` for `n = 0..dim`.
/// With `shift = 1` the last entry uses `D(dim)`, which is outside the
/// truncated space and evaluated on demand.
pub fn deformation_matrix(scheme: &DeformationScheme, dim: usize, shift: u32) -> Result<TruncatedOperator> {
    check_dim(dim)?;
    let diag = (0..dim as u32)
        .map(|n| scheme.eval_d(n + shift))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedOperator(DMatrix::from_diagonal(&DVector::from_vec(diag))))
}

/// `q^{-N}`.
fn inverse_power_matrix(q: f64, dim: usize) -> TruncatedOperator {
    TruncatedOperator(DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            q.powi(-(i as i32))
        } else {
            0.0
        }
    }))
}

/// `AB - BA`.
pub fn commutator(a: &TruncatedOperator, b: &TruncatedOperator) -> Result<TruncatedOperator> {
    a.check_same_dim(b)?;
    Ok(TruncatedOperator(&a.0 * &b.0 - &b.0 * &a.0))
}

/// Kronecker product `A (x) B`, physical mode first. Used to build
/// doubled-space operators such as `a (x) 1` and `1 (x) a~`.
pub fn kron(a: &TruncatedOperator, b: &TruncatedOperator) -> TruncatedOperator {
    TruncatedOperator(a.0.kronecker(&b.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `a+ a = D(N)`
    NumberProduct,
    /// `a a+ = D(N+1)`
    ShiftedProduct,
    /// `[a, a+] = D(N+1) - D(N)`
    LadderCommutator,
    /// `[N, a+] = a+`
    NumberCreation,
    /// `[N, a] = -a`
    NumberAnnihilation,
    /// `a a+ - q a+ a = q^{-N}` (Biedenharn-Macfarlane only)
    QCommutator,
}

impl Relation {
    pub fn label(self) -> &'static str {
        match self {
            Relation::NumberProduct => "a+a = D(N)",
            Relation::ShiftedProduct => "aa+ = D(N+1)",
            Relation::LadderCommutator => "[a,a+] = D(N+1) - D(N)",
            Relation::NumberCreation => "[N,a+] = a+",
            Relation::NumberAnnihilation => "[N,a] = -a",
            Relation::QCommutator => "aa+ - q a+a = q^-N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub relation: Relation,
    /// Entrywise max `|lhs - rhs|` over the interior block.
    pub absolute: f64,
    /// Entrywise max of `|lhs - rhs| / max(1, sum of |term|)`; this is the
    /// quantity compared against the tolerance.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub dim: usize,
    pub tol: f64,
    pub residuals: Vec<RelationResidual>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.scaled < self.tol)
    }

    pub fn residual(&self, relation: Relation) -> Option<&RelationResidual> {
        self.residuals.iter().find(|r| r.relation == relation)
    }
}

impl fmt::Display for AlgebraReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.residuals {
            writeln!(
                f,
                "dim={:<4} {:<26} abs={:<12.3e} scaled={:<12.3e} {}",
                self.dim,
                r.relation.label(),
                r.absolute,
                r.scaled,
                if r.scaled < self.tol { "ok" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Residual of `sum_k c_k T_k = 0` restricted to indices `< interior`.
fn residual(relation: Relation, terms: &[(f64, &DMatrix<f64>)], interior: usize) -> RelationResidual {
    let mut absolute = 0.0f64;
    let mut scaled = 0.0f64;
    for i in 0..interior {
        for j in 0..interior {
            let mut value = 0.0;
            let mut scale = 0.0;
            for (c, t) in terms {
                let v = c * t[(i, j)];
                value += v;
                scale += v.abs();
            }
            absolute = absolute.max(value.abs());
            scaled = scaled.max(value.abs() / scale.max(1.0));
        }
    }
    RelationResidual {
        relation,
        absolute,
        scaled,
    }
}

/// Checks the generalized q-Heisenberg-Weyl relations on the interior block.
pub fn verify_algebra(scheme: &DeformationScheme, dim: usize, tol: f64) -> Result<AlgebraReport> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let a = annihilation_matrix(scheme, dim)?.0;
    let ad = creation_matrix(scheme, dim)?.0;
    let n = number_matrix(dim)?.0;
    let d_n = deformation_matrix(scheme, dim, 0)?.0;
    let d_n1 = deformation_matrix(scheme, dim, 1)?.0;

    let ad_a = &ad * &a;
    let a_ad = &a * &ad;
    let n_ad = &n * &ad;
    let ad_n = &ad * &n;
    let n_a = &n * &a;
    let a_n = &a * &n;
    let interior = dim - 1;

    let mut residuals = vec![
        residual(Relation::NumberProduct, &[(1.0, &ad_a), (-1.0, &d_n)], interior),
        residual(Relation::ShiftedProduct, &[(1.0, &a_ad), (-1.0, &d_n1)], interior),
        residual(
            Relation::LadderCommutator,
            &[(1.0, &a_ad), (-1.0, &ad_a), (-1.0, &d_n1), (1.0, &d_n)],
            interior,
        ),
        residual(
            Relation::NumberCreation,
            &[(1.0, &n_ad), (-1.0, &ad_n), (-1.0, &ad)],
            interior,
        ),
        residual(
            Relation::NumberAnnihilation,
            &[(1.0, &n_a), (-1.0, &a_n), (1.0, &a)],
            interior,
        ),
    ];
    if scheme.kind() == SchemeKind::BiedenharnMacfarlane {
        let q = scheme.q();
        let q_inv_n = inverse_power_matrix(q, dim).0;
        residuals.push(residual(
            Relation::QCommutator,
            &[(1.0, &a_ad), (-q, &ad_a), (-1.0, &q_inv_n)],
            interior,
        ));
    }
    Ok(AlgebraReport { dim, tol, residuals })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorName {
    Annihilation,
    Creation,
    Number,
    Identity,
}

impl OperatorName {
    pub fn as_str(self) -> &'static str {
        match self {
            OperatorName::Annihilation => "annihilation",
            OperatorName::Creation => "creation",
            OperatorName::Number => "number",
            OperatorName::Identity => "identity",
        }
    }
}

impl std::str::FromStr for OperatorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "annihilation" | "a" => OperatorName::Annihilation,
            "creation" | "a+" | "adag" => OperatorName::Creation,
            "number" | "N" => OperatorName::Number,
            "identity" | "1" => OperatorName::Identity,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown operator '{other}' (expected annihilation, creation, number or identity)"
                )))
            }
        })
    }
}

pub fn build_operator(name: OperatorName, scheme: &DeformationScheme, dim: usize) -> Result<TruncatedOperator> {
    match name {
        OperatorName::Annihilation => annihilation_matrix(scheme, dim),
        OperatorName::Creation => creation_matrix(scheme, dim),
        OperatorName::Number => number_matrix(dim),
        OperatorName::Identity => identity_matrix(dim),
    }
}

/// JSON form written by `qfock ops`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDump {
    pub scheme: String,
    pub q: f64,
    pub dim: usize,
    pub operator: String,
    pub entries: Vec<Vec<f64>>,
}

pub fn operator_dump(scheme: &DeformationScheme, dim: usize, name: OperatorName) -> Result<OperatorDump> {
    if dim == 0 || dim > MAX_DUMP_DIM {
        return Err(Error::InvalidArgument(format!(
            "dim must be in 1..={MAX_DUMP_DIM}, got {dim}"
        )));
    }
    let op = build_operator(name, scheme, dim)?;
    Ok(OperatorDump {
        scheme: scheme.descriptor(),
        q: scheme.q(),
        dim,
        operator: name.as_str().to_string(),
        entries: op.rows(),
    })
}
