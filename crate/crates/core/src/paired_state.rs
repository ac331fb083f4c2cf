//! States in the correlated diagonal subspace `sum_n c_n |n, n~>` of the
//! doubled Fock space, with their second moments, quadrature variances and
//! entanglement entropy.
//!
//! Moments are evaluated through reduced sums. With `P_n = c_n^2`:
//!
//! ```text
//! <a+ a>    = sum_n D(n)   P_n
//! <a a+>    = sum_n D(n+1) P_n
//! <a a~>    = sum_n D(n) sqrt(P_{n-1} P_n)      (a a~ |n n~> = D(n) |n-1, n~-1>)
//! <a+ a~+>  = <a a~>                            (real coefficients)
//! ```
//!
//! Quadratures are `U1 = (a + a+ + a~ + a~+) / 2^{3/2}` and
//! `U2 = (a - a+ + a~ - a~+) / (2^{3/2} i)`. Every operator in `U_i` changes
//! the photon number of one mode by one, so it maps `|n, n~>` off the
//! diagonal subspace and `<U_i> = 0` for all diagonal states. Likewise
//! `a a`, `a+ a+`, `a a~+` and their partners have zero expectation. What
//! remains, using the tilde/physical symmetry of a diagonal state, is
//!
//! ```text
//! (dU1)^2 = (<a+a> + <aa+>)/4 + <a a~>/2
//! (dU2)^2 = (<a+a> + <aa+>)/4 - <a a~>/2
//! ```

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::deformation::{DeformationScheme, SchemeKind};
use crate::error::{Error, Result};

/// Slack allowed on the normalization sum beyond the declared tail bound.
pub const NORM_SLACK: f64 = 1e-12;

/// Upper limit on series length when building moment states.
pub const MAX_TERMS: usize = 1 << 20;

/// Consecutive non-decreasing terms that count as divergence.
pub const DIVERGENCE_RUN: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDiagonalState {
    coeffs: Vec<f64>,
    tail_bound: f64,
}

impl PairedDiagonalState {
    /// `c_n = sqrt(P_n)`. The missing mass `1 - sum P_n` must not exceed
    /// `tail_bound`.
    pub fn from_probabilities(p: &[f64], tail_bound: f64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("empty probability sequence".into()));
        }
        if tail_bound.is_nan() || tail_bound < 0.0 {
            return Err(Error::InvalidArgument(format!("tail bound {tail_bound} must be nonnegative")));
        }
        for (n, &v) in p.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativeProbability { n, value: v });
            }
        }
        let sum: f64 = p.iter().sum();
        if sum > 1.0 + NORM_SLACK || 1.0 - sum > tail_bound + NORM_SLACK {
            return Err(Error::MassDeficit { sum, tail_bound });
        }
        Ok(PairedDiagonalState {
            coeffs: p.iter().map(|v| v.sqrt()).collect(),
            tail_bound,
        })
    }

    pub fn vacuum() -> Self {
        PairedDiagonalState {
            coeffs: vec![1.0],
            tail_bound: 0.0,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Highest retained pair number.
    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c * c).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Second moments of a paired state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    /// `<a+ a>`
    pub adag_a: f64,
    /// `<a a+>`
    pub a_adag: f64,
    /// `<a a~>`
    pub a_atilde: f64,
    /// `<a+ a~+>`
    pub adag_atildedag: f64,
}

impl MomentSet {
    pub const VACUUM: MomentSet = MomentSet {
        adag_a: 0.0,
        a_adag: 1.0,
        a_atilde: 0.0,
        adag_atildedag: 0.0,
    };
}

pub fn moments(state: &PairedDiagonalState, scheme: &DeformationScheme) -> Result<MomentSet> {
    let c = &state.coeffs;
    let mut adag_a = 0.0;
    let mut a_adag = 0.0;
    let mut cross = 0.0;
    let mut d_n = scheme.eval_d(0)?;
    for n in 0..c.len() {
        let d_next = scheme.eval_d(n as u32 + 1)?;
        let p = c[n] * c[n];
        adag_a += d_n * p;
        a_adag += d_next * p;
        if n > 0 {
            cross += d_n * c[n - 1] * c[n];
        }
        d_n = d_next;
    }
    Ok(MomentSet {
        adag_a,
        a_adag,
        a_atilde: cross,
        adag_atildedag: cross,
    })
}

/// Quadrature fluctuations `(dU1)^2`, `(dU2)^2` and their product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratures {
    pub var1: f64,
    pub var2: f64,
    pub product: f64,
}

pub fn quadrature_variances(m: &MomentSet) -> Quadratures {
    let diag = 0.25 * (m.adag_a + m.a_adag);
    let off = 0.25 * (m.a_atilde + m.adag_atildedag);
    let var1 = diag + off;
    let var2 = diag - off;
    Quadratures {
        var1,
        var2,
        product: var1 * var2,
    }
}

/// `-sum P_n log2 P_n` with `0 log 0 = 0`.
pub fn shannon_entropy_bits(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    let mut h = 0.0;
    for (n, &v) in p.iter().enumerate() {
        if v.is_nan() || v < 0.0 {
            return Err(Error::NegativeProbability { n, value: v });
        }
        sum += v;
        if v > 0.0 {
            h -= v * v.log2();
        }
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::MassDeficit { sum, tail_bound: 1e-9 });
    }
    Ok(h)
}

/// Von Neumann entropy (bits) of the physical mode after tracing out the
/// tilde mode. The reduced density matrix `rho = M M^T` (with
/// `M[m][k] = <m k~|psi>`) is diagonalized numerically.
pub fn reduced_entropy_bits(state: &PairedDiagonalState) -> f64 {
    let dim = state.coeffs.len();
    let amplitudes = DMatrix::from_fn(dim, dim, |m, k| if m == k { state.coeffs[m] } else { 0.0 });
    let rho = &amplitudes * amplitudes.transpose();
    let eig = SymmetricEigen::new(rho);
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Geometric pair distribution `P_n = weight * ratio^n`, the common shape
/// of the squeezed and thermal vacua.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricLaw {
    pub weight: f64,
    pub ratio: f64,
}

impl GeometricLaw {
    pub fn new(weight: f64, ratio: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&ratio) || !weight.is_finite() || weight <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "geometric law needs 0 <= ratio < 1 and weight > 0 (ratio {ratio}, weight {weight})"
            )));
        }
        Ok(GeometricLaw { weight, ratio })
    }

    pub fn probability(&self, n: usize) -> f64 {
        self.weight * self.ratio.powi(n as i32)
    }

    /// `sum_{k > n} P_k`.
    pub fn tail_after(&self, n: usize) -> f64 {
        self.weight * self.ratio.powi(n as i32 + 1) / (1.0 - self.ratio)
    }

    /// Probabilities up to the smallest cutoff whose tail, plus a bound on
    /// the rounding of the partial sum, is `<= tail_tol`; returned with that
    /// tail.
    pub fn truncated(&self, tail_tol: f64) -> (Vec<f64>, f64) {
        let mut p = Vec::new();
        let mut n = 0;
        loop {
            p.push(self.probability(n));
            let tail = self.tail_after(n);
            let rounding = ((n + 1) as f64 * f64::EPSILON).min(0.5 * tail_tol);
            if tail + rounding <= tail_tol || n >= MAX_TERMS {
                return (p, tail);
            }
            n += 1;
        }
    }

    pub fn state(&self, tail_tol: f64) -> Result<PairedDiagonalState> {
        let (p, tail) = self.truncated(tail_tol);
        PairedDiagonalState::from_probabilities(&p, tail)
    }

    /// A truncation long enough that the remainder of `sum D(n+1) P_n`
    /// (which bounds the other second moments) is below `tail_tol` relative
    /// to both `sum D(n) P_n` and `sum D(n+1) P_n`, in addition to the
    /// probability tail.
    pub fn moment_state(&self, scheme: &DeformationScheme, tail_tol: f64) -> Result<PairedDiagonalState> {
        if scheme.kind() == SchemeKind::BiedenharnMacfarlane {
            let q = scheme.q();
            let growth = q.max(1.0 / q) * self.ratio;
            if growth >= 1.0 {
                return Err(Error::Divergent { ratio: growth });
            }
        }
        let mut p = Vec::new();
        let mut sum = 0.0;
        // sum_n D(n) P_n; the smaller of the two moment sums sets the scale
        let mut low_sum = 0.0;
        let mut d_n = 0.0;
        let mut prev_term = 0.0;
        let mut run = 0;
        for n in 0..MAX_TERMS {
            let pn = self.probability(n);
            if n > 0 && pn == 0.0 {
                break;
            }
            p.push(pn);
            low_sum += d_n * pn;
            d_n = scheme.eval_d(n as u32 + 1)?;
            let term = d_n * pn;
            sum += term;
            let rho = if prev_term > 0.0 { term / prev_term } else { 0.0 };
            if rho >= 1.0 {
                run += 1;
                if run >= DIVERGENCE_RUN {
                    return Err(Error::Divergent { ratio: rho });
                }
            } else {
                run = 0;
            }
            prev_term = term;
            let prob_tail = self.tail_after(n);
            let series_tail = if rho < 1.0 { term.abs() * rho / (1.0 - rho) } else { f64::INFINITY };
            if prob_tail <= tail_tol && series_tail <= tail_tol * sum.abs().min(low_sum.abs()).max(f64::MIN_POSITIVE) {
                return PairedDiagonalState::from_probabilities(&p, prob_tail);
            }
        }
        if p.len() < MAX_TERMS {
            // Probabilities underflowed to zero; nothing left to add.
            let tail = self.tail_after(p.len() - 1);
            return PairedDiagonalState::from_probabilities(&p, tail);
        }
        Err(Error::NotConverged { terms: MAX_TERMS })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_matrix::{annihilation_matrix, identity_matrix, kron, TruncatedOperator};
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn bm(q: f64) -> DeformationScheme {
        DeformationScheme::biedenharn_macfarlane(q).unwrap()
    }

    #[test]
    fn construction() {
        let v = PairedDiagonalState::from_probabilities(&[1.0], 0.0).unwrap();
        assert_eq!(v.coeffs(), &[1.0]);
        let s = PairedDiagonalState::from_probabilities(&[0.5, 0.5], 0.0).unwrap();
        assert_eq!(s.coeffs(), &[0.5f64.sqrt(), 0.5f64.sqrt()]);
        assert!(matches!(
            PairedDiagonalState::from_probabilities(&[0.5, -0.1], 1.0),
            Err(Error::NegativeProbability { n: 1, .. })
        ));
        assert!(matches!(
            PairedDiagonalState::from_probabilities(&[0.5, 0.4], 0.01),
            Err(Error::MassDeficit { .. })
        ));
        assert!(PairedDiagonalState::from_probabilities(&[0.5, 0.4], 0.1).is_ok());
        assert!(PairedDiagonalState::from_probabilities(&[0.7, 0.4], 1.0).is_err());
    }

    #[test]
    fn geometric_truncation_normalizes() {
        // P_n = 0.7 * 0.3^n; exact tail after N is 0.3^(N+1)
        let law = GeometricLaw::new(0.7, 0.3).unwrap();
        let st = law.state(1e-12).unwrap();
        let n = st.cutoff();
        assert!(0.3f64.powi(n as i32 + 1) <= 1e-12 * (1.0 + 1e-12));
        assert!(0.3f64.powi(n as i32) > 1e-12);
        assert!((st.norm_sq() - 1.0).abs() <= st.tail_bound() + 1e-12);
        assert!(st.tail_bound() <= 1e-12);
    }

    #[test]
    fn vacuum_moments() {
        for s in [DeformationScheme::undeformed(), bm(2.0), bm(0.3)] {
            let m = moments(&PairedDiagonalState::vacuum(), &s).unwrap();
            assert_eq!(m, MomentSet::VACUUM);
        }
        let q = quadrature_variances(&MomentSet::VACUUM);
        assert_eq!((q.var1, q.var2), (0.25, 0.25));
    }

    #[test]
    fn undeformed_squeezed_mean_is_sinh_squared() {
        // sinh^2 xi = 1: tanh^2 = 1/2, cosh^2 = 2
        let law = GeometricLaw::new(0.5, 0.5).unwrap();
        let st = law.moment_state(&DeformationScheme::undeformed(), 1e-14).unwrap();
        let m = moments(&st, &DeformationScheme::undeformed()).unwrap();
        assert!((m.adag_a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bm_geometric_mean_matches_brute_force() {
        // Brute force with exact powers, summed far past convergence.
        let mut oracle = 0.0f64;
        let mut qn = 1.0;
        let mut rn = 1.0;
        for _ in 0..400 {
            oracle += (qn - 1.0 / qn) / 1.5 * 0.7 * rn;
            qn *= 2.0;
            rn *= 0.3;
        }
        assert!((oracle - 0.617_647_058_823_529_4).abs() < 1e-12);
        let law = GeometricLaw::new(0.7, 0.3).unwrap();
        let st = law.moment_state(&bm(2.0), 1e-12).unwrap();
        let m = moments(&st, &bm(2.0)).unwrap();
        assert!((m.adag_a - oracle).abs() < 1e-10);
    }

    #[test]
    fn divergence_detection() {
        let law = GeometricLaw::new(0.7, 0.3).unwrap();
        assert!(matches!(law.moment_state(&bm(4.0), 1e-12), Err(Error::Divergent { .. })));
        // 2^n - 1 grows like 2^n, not caught by the BM shortcut
        let s = DeformationScheme::custom("2^n - 1", 4.0).unwrap();
        let law = GeometricLaw::new(0.4, 0.6).unwrap();
        assert!(matches!(law.moment_state(&s, 1e-12), Err(Error::Divergent { .. })));
        // n^2 at ratio 0.9 grows for a while before converging
        let s = DeformationScheme::custom("n^2", 1.0).unwrap();
        let law = GeometricLaw::new(0.1, 0.9).unwrap();
        assert!(law.moment_state(&s, 1e-12).is_ok());
    }

    #[test]
    fn entropies() {
        assert_eq!(shannon_entropy_bits(&[1.0]).unwrap(), 0.0);
        assert_eq!(shannon_entropy_bits(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(shannon_entropy_bits(&[0.5, 0.0, 0.5]).unwrap(), 1.0);
        assert!(shannon_entropy_bits(&[1.5, -0.5]).is_err());
        assert_eq!(reduced_entropy_bits(&PairedDiagonalState::vacuum()), 0.0);
        let s = PairedDiagonalState::from_probabilities(&[0.5, 0.5], 0.0).unwrap();
        assert!((reduced_entropy_bits(&s) - 1.0).abs() < 1e-15);

        // mean 1 geometric law: (1+1) log2 2 - 1 log2 1 = 2
        let (p, _) = GeometricLaw::new(0.5, 0.5).unwrap().truncated(1e-15);
        assert!((shannon_entropy_bits(&p).unwrap() - 2.0).abs() < 1e-12);
    }

    /// Doubled-space operators built by Kronecker products; independent of
    /// the reduced sums above.
    struct Doubled {
        a: DMatrix<f64>,
        at: DMatrix<f64>,
        psi: DVector<f64>,
    }

    fn doubled(state: &PairedDiagonalState, scheme: &DeformationScheme, dim: usize) -> Doubled {
        let a1 = annihilation_matrix(scheme, dim).unwrap();
        let id = identity_matrix(dim).unwrap();
        let a: TruncatedOperator = kron(&a1, &id);
        let at = kron(&id, &a1);
        let mut psi = DVector::zeros(dim * dim);
        for (n, c) in state.coeffs().iter().enumerate() {
            psi[n * dim + n] = *c;
        }
        Doubled {
            a: a.matrix().clone(),
            at: at.matrix().clone(),
            psi,
        }
    }

    fn expect(psi: &DVector<f64>, op: &DMatrix<f64>) -> f64 {
        psi.dot(&(op * psi))
    }

    #[test]
    fn reduced_sums_match_tensor_product_route() {
        let law = GeometricLaw::new(0.6, 0.4).unwrap();
        let (p, tail) = law.truncated(1e-4);
        let st = PairedDiagonalState::from_probabilities(&p, tail).unwrap();
        let dim = st.cutoff() + 3;
        assert!(dim <= 16);
        for s in [DeformationScheme::undeformed(), bm(0.5), bm(2.0)] {
            let d = doubled(&st, &s, dim);
            let ad = d.a.transpose();
            let atd = d.at.transpose();
            let m = moments(&st, &s).unwrap();
            assert!((expect(&d.psi, &(&ad * &d.a)) - m.adag_a).abs() < 1e-12);
            assert!((expect(&d.psi, &(&d.a * &ad)) - m.a_adag).abs() < 1e-12);
            assert!((expect(&d.psi, &(&d.a * &d.at)) - m.a_atilde).abs() < 1e-12);
            assert!((expect(&d.psi, &(&ad * &atd)) - m.adag_atildedag).abs() < 1e-12);
            // tilde moments equal non-tilde ones
            assert!((expect(&d.psi, &(&atd * &d.at)) - m.adag_a).abs() < 1e-12);

            // quadratures with explicit first moments
            let k = 2f64.powf(1.5);
            let u1 = (&d.a + &ad + &d.at + &atd) / k;
            // U2 = K / (k i) with K real antisymmetric; U2^2 = -K^2 / k^2
            let kk = &d.a - &ad + &d.at - &atd;
            let mean1 = expect(&d.psi, &u1);
            let mean2_imag = expect(&d.psi, &kk);
            assert!(mean1.abs() < 1e-15);
            assert!(mean2_imag.abs() < 1e-15);
            let var1 = expect(&d.psi, &(&u1 * &u1)) - mean1 * mean1;
            let var2 = -expect(&d.psi, &(&kk * &kk)) / (k * k);
            let qv = quadrature_variances(&m);
            assert!((var1 - qv.var1).abs() < 1e-12);
            assert!((var2 - qv.var2).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn entropy_routes_agree(raw in prop::collection::vec(0.0f64..1.0, 1..40)) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-3);
            let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let st = PairedDiagonalState::from_probabilities(&p, 1e-12).unwrap();
            let a = shannon_entropy_bits(&st.probabilities()).unwrap();
            let b = reduced_entropy_bits(&st);
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn uncertainty_product_identity(a in 0.0f64..50.0, b in 0.0f64..50.0, c in 0.0f64..50.0) {
            let m = MomentSet { adag_a: a, a_adag: b, a_atilde: c, adag_atildedag: c };
            let q = quadrature_variances(&m);
            let lhs = q.var1 * q.var2;
            let rhs = (0.25 * (a + b)).powi(2) - (0.5 * c).powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
        }

        #[test]
        fn geometric_shift_identities(r in 0.05f64..0.45, qi in 0usize..4) {
            let q = [0.5, 0.9, 1.1, 2.0][qi];
            let s = bm(q);
            let law = GeometricLaw::new(1.0 - r, r).unwrap();
            let st = law.moment_state(&s, 1e-13).unwrap();
            let m = moments(&st, &s).unwrap();
            prop_assert!((m.a_adag - m.adag_a / r).abs() < 1e-10);
            prop_assert!((m.a_atilde - m.adag_a / r.sqrt()).abs() < 1e-10);
        }
    }
}
