//! Parameter sweeps over `(q, xi)` or `(q, theta)` grids.
//!
//! Rows are computed in parallel and reassembled in q-major order. A row
//! outside a convergence domain is flagged in `status` instead of aborting
//! the sweep.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformation::{DeformationScheme, SchemeKind};
use crate::error::{Error, Result};
use crate::paired_state::{moments, quadrature_variances, shannon_entropy_bits, PairedDiagonalState};
use crate::squeezed::{self, SqueezedSpec};
use crate::thermal::{self, ThermalSpec};

pub const CSV_HEADER: &str =
    "q,param,nbar_series,nbar_closed,var1,var2,product,entropy_closed,entropy_series,cutoff,tail_bound,status";

/// Rows whose series and closed-form means differ by more than this are
/// flagged `mismatch`.
pub const MISMATCH_TOL: f64 = 1e-8;

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Squeezed,
    Thermal,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squeezed" => Ok(Family::Squeezed),
            "thermal" => Ok(Family::Thermal),
            other => Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}' (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    /// `undeformed`, `bm` or `expr:<text>`.
    pub scheme: String,
    pub q_values: Vec<f64>,
    /// `xi` for squeezed sweeps, `theta` for thermal ones.
    pub params: Vec<f64>,
    pub tail_tol: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.q_values.is_empty() || self.params.is_empty() {
            return Err(Error::InvalidArgument("q and parameter lists must be non-empty".into()));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail tolerance must lie in (0, 1), got {}",
                self.tail_tol
            )));
        }
        for &p in &self.params {
            match self.family {
                Family::Squeezed if !p.is_finite() => {
                    return Err(Error::InvalidArgument(format!("xi must be finite, got {p}")))
                }
                Family::Thermal if !(p > 0.0 && p.is_finite()) => {
                    return Err(Error::InvalidArgument(format!("theta must be positive, got {p}")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Optional JSON config mirroring [`SweepSpec`]; command-line flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Option<Family>,
    pub scheme: Option<String>,
    pub q: Option<Vec<f64>>,
    pub xi: Option<Vec<f64>>,
    pub theta: Option<Vec<f64>>,
    pub tail_tol: Option<f64>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub q: f64,
    pub param: f64,
    pub nbar_series: Option<f64>,
    pub nbar_closed: Option<f64>,
    pub var1: Option<f64>,
    pub var2: Option<f64>,
    pub product: Option<f64>,
    pub entropy_closed: Option<f64>,
    pub entropy_series: Option<f64>,
    pub cutoff: Option<usize>,
    pub tail_bound: Option<f64>,
    /// `;`-separated flags: `convergent` or `divergent`, then optionally
    /// `closed-form-skipped`, `entropy-series-skipped`, `mismatch`.
    pub status: String,
}

impl ResultRow {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.status.split(';').any(|f| f == flag)
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn build_row(
    q: f64,
    param: f64,
    moment_state: Result<PairedDiagonalState>,
    scheme: &DeformationScheme,
    nbar_closed: Option<f64>,
    entropy_closed: f64,
    probabilities: &[f64],
) -> ResultRow {
    let mut flags = Vec::new();
    let mut row = ResultRow {
        q,
        param,
        nbar_series: None,
        nbar_closed: nbar_closed.and_then(finite),
        var1: None,
        var2: None,
        product: None,
        entropy_closed: finite(entropy_closed),
        entropy_series: None,
        cutoff: None,
        tail_bound: None,
        status: String::new(),
    };
    match moment_state.and_then(|st| moments(&st, scheme).map(|m| (st, m))) {
        Ok((st, m)) => {
            let v = quadrature_variances(&m);
            row.nbar_series = finite(m.adag_a);
            row.var1 = finite(v.var1);
            row.var2 = finite(v.var2);
            row.product = finite(v.product);
            row.cutoff = Some(st.cutoff());
            row.tail_bound = Some(st.tail_bound());
            flags.push("convergent");
        }
        Err(_) => flags.push("divergent"),
    }
    if row.nbar_closed.is_none() {
        flags.push("closed-form-skipped");
    }
    match shannon_entropy_bits(probabilities) {
        Ok(h) => row.entropy_series = Some(h),
        Err(_) => flags.push("entropy-series-skipped"),
    }
    if let (Some(a), Some(b)) = (row.nbar_series, row.nbar_closed) {
        if (a - b).abs() >= MISMATCH_TOL {
            flags.push("mismatch");
        }
    }
    row.status = flags.join(";");
    row
}

fn squeezed_row(q: f64, xi: f64, scheme: &DeformationScheme, tail_tol: f64) -> Result<ResultRow> {
    let spec = SqueezedSpec::new(xi, scheme.clone(), tail_tol)?;
    let closed = match scheme.kind() {
        SchemeKind::Undeformed => Some(xi.sinh().powi(2)),
        SchemeKind::BiedenharnMacfarlane => squeezed::nbar_closed_bm(q, xi).ok(),
        SchemeKind::Custom => None,
    };
    Ok(build_row(
        q,
        xi,
        squeezed::squeezed_moment_state(&spec),
        scheme,
        closed,
        squeezed::entanglement_entropy_closed(xi),
        &squeezed::squeezed_probabilities(&spec),
    ))
}

fn thermal_row(q: f64, theta: f64, scheme: &DeformationScheme, tail_tol: f64) -> Result<ResultRow> {
    let spec = ThermalSpec::new(theta, scheme.clone(), tail_tol)?;
    let closed = match scheme.kind() {
        SchemeKind::Undeformed => Some(1.0 / theta.exp_m1()),
        SchemeKind::BiedenharnMacfarlane => thermal::thermal_nbar_closed_bm(q, theta).ok().map(|s| s.nbar),
        SchemeKind::Custom => None,
    };
    Ok(build_row(
        q,
        theta,
        thermal::thermal_moment_state(&spec),
        scheme,
        closed,
        thermal::thermal_entropy_bits(theta)?,
        &thermal::thermal_probabilities(&spec),
    ))
}

/// One row per `(q, param)` pair, q-major.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let schemes = spec
        .q_values
        .iter()
        .map(|&q| DeformationScheme::from_descriptor(&spec.scheme, q))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(f64, f64, &DeformationScheme)> = spec
        .q_values
        .iter()
        .zip(&schemes)
        .flat_map(|(&q, s)| spec.params.iter().map(move |&p| (q, p, s)))
        .collect();
    jobs.par_iter()
        .map(|&(q, p, s)| match spec.family {
            Family::Squeezed => squeezed_row(q, p, s, spec.tail_tol),
            Family::Thermal => thermal_row(q, p, s, spec.tail_tol),
        })
        .collect()
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    serde_json::to_string(&v).expect("finite floats serialize")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            format_number(r.q),
            format_number(r.param),
            opt_num(r.nbar_series),
            opt_num(r.nbar_closed),
            opt_num(r.var1),
            opt_num(r.var2),
            opt_num(r.product),
            opt_num(r.entropy_closed),
            opt_num(r.entropy_series),
            r.cutoff.map(|c| c.to_string()).unwrap_or_default(),
            opt_num(r.tail_bound),
            r.status
        );
    }
    out
}

pub fn to_json(rows: &[ResultRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> std::result::Result<Vec<ResultRow>, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn render(rows: &[ResultRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows),
    }
}
