//! Two-mode squeezed vacuum in the doubled q-Fock space.
//!
//! The state is taken as its number-basis expansion with the pair law
//! `P_n = tanh^{2n}(xi) / cosh^2(xi)`, which does not depend on the
//! deformation. Only the moments (and so the mean photon number and the
//! quadrature fluctuations) see `D_q(n)`.

use crate::deformation::{DeformationScheme, BM_LIMIT_WINDOW};
use crate::error::{Error, Result};
use crate::paired_state::{moments, GeometricLaw, MomentSet, PairedDiagonalState, Quadratures};

#[derive(Debug, Clone)]
pub struct SqueezedSpec {
    pub xi: f64,
    pub scheme: DeformationScheme,
    pub tail_tol: f64,
}

impl SqueezedSpec {
    pub fn new(xi: f64, scheme: DeformationScheme, tail_tol: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::InvalidArgument(format!("squeezing parameter must be finite, got {xi}")));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tail tolerance must lie in (0, 1), got {tail_tol}")));
        }
        Ok(SqueezedSpec { xi, scheme, tail_tol })
    }

    pub fn law(&self) -> GeometricLaw {
        squeezed_law(self.xi)
    }
}

fn squeezed_law(xi: f64) -> GeometricLaw {
    let t = xi.tanh();
    GeometricLaw {
        weight: 1.0 / xi.cosh().powi(2),
        ratio: t * t,
    }
}

/// `P_n` up to the first `N` with `tanh^{2N+2} xi <= tail_tol`, less a
/// rounding allowance.
pub fn squeezed_probabilities(spec: &SqueezedSpec) -> Vec<f64> {
    spec.law().truncated(spec.tail_tol).0
}

pub fn squeezed_state(spec: &SqueezedSpec) -> Result<PairedDiagonalState> {
    spec.law().state(spec.tail_tol)
}

/// State truncated far enough for the second moments to converge.
pub fn squeezed_moment_state(spec: &SqueezedSpec) -> Result<PairedDiagonalState> {
    spec.law().moment_state(&spec.scheme, spec.tail_tol)
}

pub fn squeezed_moments(spec: &SqueezedSpec) -> Result<MomentSet> {
    moments(&squeezed_moment_state(spec)?, &spec.scheme)
}

/// `(1 + m) log2(1 + m) - m log2 m` for mean occupation `m`.
pub(crate) fn geometric_entropy_bits(mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    (1.0 + mean) * (1.0 + mean).log2() - mean * mean.log2()
}

/// Entanglement entropy in bits, with `n0 = sinh^2 xi`.
pub fn entanglement_entropy_closed(xi: f64) -> f64 {
    geometric_entropy_bits(xi.sinh().powi(2))
}

/// `sum_n D_q(n) P_n`.
pub fn nbar_series(spec: &SqueezedSpec) -> Result<f64> {
    Ok(squeezed_moments(spec)?.adag_a)
}

/// Mean photon number for the Biedenharn-Macfarlane scheme in closed form.
/// Within `BM_LIMIT_WINDOW` of `q = 1` this is `sinh^2 xi`.
pub fn nbar_closed_bm(q: f64, xi: f64) -> Result<f64> {
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::InvalidQ(q));
    }
    let t2 = xi.tanh().powi(2);
    let growth = q.max(1.0 / q) * t2;
    if growth >= 1.0 {
        return Err(Error::Precondition(format!(
            "max(q, 1/q) tanh^2(xi) < 1 (got {growth})"
        )));
    }
    if (q - 1.0).abs() < BM_LIMIT_WINDOW {
        return Ok(xi.sinh().powi(2));
    }
    let (c1, c2) = bm_weights(q);
    let cosh2 = xi.cosh().powi(2);
    Ok(t2 / cosh2 * (c1 / (1.0 - q * t2) + c2 / (1.0 - t2 / q)))
}

/// `C1 = q/(q - 1/q)`, `C2 = q^-1/(q^-1 - q)`; they sum to one.
pub fn bm_weights(q: f64) -> (f64, f64) {
    let qi = 1.0 / q;
    (q / (q - qi), qi / (qi - q))
}

/// Closed-form fluctuations given the mean photon number.
pub fn squeezed_variances_from_nbar(xi: f64, nbar: f64) -> Result<Quadratures> {
    if xi == 0.0 {
        return Err(Error::Precondition(
            "xi != 0 (use the moment route for the vacuum)".into(),
        ));
    }
    let t = xi.tanh();
    let t2 = t * t;
    Ok(Quadratures {
        var1: 0.25 * (1.0 + t).powi(2) / t2 * nbar,
        var2: 0.25 * (1.0 - t).powi(2) / t2 * nbar,
        product: (nbar / (4.0 * xi.sinh().powi(2))).powi(2),
    })
}

pub fn squeezed_variances_closed(q: f64, xi: f64) -> Result<Quadratures> {
    squeezed_variances_from_nbar(xi, nbar_closed_bm(q, xi)?)
}
