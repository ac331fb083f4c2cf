//! Thermal vacuum: the purification `sum_n sqrt(P_n) |n, n~>` of the
//! Bose-Einstein state with `P_n = (1 - e^{-theta}) e^{-n theta}`, where
//! `theta = beta * omega` is the only thermal parameter.
//!
//! Second moments obey the index-shift identities of any geometric law with
//! ratio `r = e^{-theta}`: `<a a+> = e^{theta} <a+ a>` and
//! `<a a~> = e^{theta/2} <a+ a>`. These signs are the ones forced by the
//! defining sums; they also give the product law
//! `(dU1)^2 (dU2)^2 = (e^theta - 1)^2 nbar^2 / 16`.

use crate::deformation::{DeformationScheme, BM_LIMIT_WINDOW};
use crate::error::{Error, Result};
use crate::paired_state::{moments, GeometricLaw, MomentSet, PairedDiagonalState, Quadratures};
use crate::squeezed::geometric_entropy_bits;

#[derive(Debug, Clone)]
pub struct ThermalSpec {
    pub theta: f64,
    pub scheme: DeformationScheme,
    pub tail_tol: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && !theta.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("theta = beta*omega must be positive, got {theta}")))
    }
}

impl ThermalSpec {
    pub fn new(theta: f64, scheme: DeformationScheme, tail_tol: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tail tolerance must lie in (0, 1), got {tail_tol}")));
        }
        Ok(ThermalSpec { theta, scheme, tail_tol })
    }

    pub fn law(&self) -> GeometricLaw {
        GeometricLaw {
            weight: -(-self.theta).exp_m1(),
            ratio: (-self.theta).exp(),
        }
    }
}

/// `P_n = (1 - e^{-theta}) e^{-n theta}`, i.e. `e^{-n theta} / Z` with
/// `Z = 1 / (1 - e^{-theta})`.
pub fn thermal_probabilities(spec: &ThermalSpec) -> Vec<f64> {
    spec.law().truncated(spec.tail_tol).0
}

pub fn thermal_state(spec: &ThermalSpec) -> Result<PairedDiagonalState> {
    spec.law().state(spec.tail_tol)
}

pub fn thermal_moment_state(spec: &ThermalSpec) -> Result<PairedDiagonalState> {
    spec.law().moment_state(&spec.scheme, spec.tail_tol)
}

pub fn thermal_moments(spec: &ThermalSpec) -> Result<MomentSet> {
    moments(&thermal_moment_state(spec)?, &spec.scheme)
}

pub fn thermal_nbar_series(spec: &ThermalSpec) -> Result<f64> {
    Ok(thermal_moments(spec)?.adag_a)
}

/// Biedenharn-Macfarlane mean occupation split into two Bose-Einstein terms
/// with shifted exponents `theta + ln q` and `theta - ln q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitOccupation {
    pub nbar: f64,
    pub weights: (f64, f64),
    /// Effective Boltzmann exponents `(theta + lambda, theta - lambda)`,
    /// `lambda = ln q`; dividing by beta gives the shifted energies.
    pub exponents: (f64, f64),
}

pub fn thermal_nbar_closed_bm(q: f64, theta: f64) -> Result<SplitOccupation> {
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::InvalidQ(q));
    }
    check_theta(theta)?;
    let lambda = q.ln();
    if theta <= lambda.abs() {
        return Err(Error::Precondition(format!(
            "theta > |ln q| (theta = {theta}, ln q = {lambda})"
        )));
    }
    let exponents = (theta + lambda, theta - lambda);
    if (q - 1.0).abs() < BM_LIMIT_WINDOW {
        return Ok(SplitOccupation {
            nbar: 1.0 / theta.exp_m1(),
            weights: (0.5, 0.5),
            exponents,
        });
    }
    let (c1, c2) = thermal_weights(q);
    Ok(SplitOccupation {
        nbar: c1 / exponents.0.exp_m1() + c2 / exponents.1.exp_m1(),
        weights: (c1, c2),
        exponents,
    })
}

/// `C1 = (q - 1)/(q - 1/q)`, `C2 = (1 - 1/q)/(q - 1/q)`.
pub fn thermal_weights(q: f64) -> (f64, f64) {
    let d = q - 1.0 / q;
    ((q - 1.0) / d, (1.0 - 1.0 / q) / d)
}

pub fn thermal_moments_closed(theta: f64, nbar: f64) -> Result<MomentSet> {
    check_theta(theta)?;
    if nbar.is_nan() || nbar < 0.0 {
        return Err(Error::InvalidArgument(format!("nbar must be nonnegative, got {nbar}")));
    }
    let cross = (0.5 * theta).exp() * nbar;
    Ok(MomentSet {
        adag_a: nbar,
        a_adag: theta.exp() * nbar,
        a_atilde: cross,
        adag_atildedag: cross,
    })
}

pub fn thermal_variances_closed(theta: f64, nbar: f64) -> Result<Quadratures> {
    check_theta(theta)?;
    let h = (0.5 * theta).exp();
    Ok(Quadratures {
        var1: 0.25 * (h + 1.0).powi(2) * nbar,
        var2: 0.25 * (h - 1.0).powi(2) * nbar,
        product: theta.exp_m1().powi(2) * nbar * nbar / 16.0,
    })
}

/// Entanglement entropy in bits with `n0 = 1/(e^theta - 1)`.
pub fn thermal_entropy_bits(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(geometric_entropy_bits(1.0 / theta.exp_m1()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paired_state::{quadrature_variances, shannon_entropy_bits};
    use crate::squeezed::{entanglement_entropy_closed, squeezed_probabilities, SqueezedSpec};

    fn bm(q: f64) -> DeformationScheme {
        DeformationScheme::biedenharn_macfarlane(q).unwrap()
    }

    fn spec(theta: f64, s: DeformationScheme) -> ThermalSpec {
        ThermalSpec::new(theta, s, 1e-12).unwrap()
    }

    #[test]
    fn probabilities() {
        let p = thermal_probabilities(&spec(50.0, bm(2.0)));
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(p.iter().skip(1).all(|v| *v < 1e-20));
        let p = thermal_probabilities(&spec(2f64.ln(), bm(2.0)));
        for (n, v) in p.iter().enumerate() {
            assert!((v - 0.5f64.powi(n as i32 + 1)).abs() < 1e-15);
        }
        for theta in [0.2, 1.0, 3.0] {
            let s: f64 = thermal_probabilities(&spec(theta, bm(2.0))).iter().sum();
            assert!((s - 1.0).abs() <= 1e-12);
        }
        assert!(ThermalSpec::new(0.0, bm(2.0), 1e-12).is_err());
        assert!(ThermalSpec::new(-1.0, bm(2.0), 1e-12).is_err());
    }

    #[test]
    fn nbar() {
        for theta in [0.2, 1.0, 3.0] {
            let n = thermal_nbar_series(&spec(theta, DeformationScheme::undeformed())).unwrap();
            assert!((n - 1.0 / theta.exp_m1()).abs() < 1e-10);
        }
        let theta = (10.0f64 / 3.0).ln();
        let series = thermal_nbar_series(&spec(theta, bm(2.0))).unwrap();
        assert!((series - 21.0 / 34.0).abs() < 1e-10);
        let split = thermal_nbar_closed_bm(2.0, theta).unwrap();
        assert!((split.nbar - 21.0 / 34.0).abs() < 1e-12);
        assert!((split.weights.0 - 2.0 / 3.0).abs() < 1e-15);
        assert!((split.weights.1 - 1.0 / 3.0).abs() < 1e-15);
        let first = split.weights.0 / split.exponents.0.exp_m1();
        assert!((first - 2.0 / 17.0).abs() < 1e-12);
        assert!((split.nbar - first - 0.5).abs() < 1e-12);

        assert!(matches!(thermal_nbar_series(&spec(0.5, bm(2.0))), Err(Error::Divergent { .. })));
        assert!(thermal_nbar_closed_bm(2.0, 0.5).is_err());
        let near = thermal_nbar_closed_bm(1.0 + 1e-6, 1.0).unwrap().nbar;
        assert!((near - 1.0 / 1f64.exp_m1()).abs() < 1e-4);
    }

    #[test]
    fn weights() {
        for q in [0.1, 0.5, 0.9, 1.1, 2.0, 9.0] {
            let (c1, c2) = thermal_weights(q);
            assert!((c1 + c2 - 1.0).abs() < 1e-12);
            assert!(c1 > 0.0 && c2 > 0.0);
        }
    }

    #[test]
    fn moments_and_variances() {
        let theta = 2f64.ln();
        let n = thermal_nbar_series(&spec(theta, DeformationScheme::undeformed())).unwrap();
        let m = thermal_moments_closed(theta, n).unwrap();
        assert!((m.adag_a - 1.0).abs() < 1e-10);
        assert!((m.a_adag - 2.0).abs() < 1e-10);

        for s in [DeformationScheme::undeformed(), bm(0.9), bm(2.0)] {
            for theta in [1.0, 2.0, 3.0] {
                let sp = spec(theta, s.clone());
                let oracle = thermal_moments(&sp).unwrap();
                let closed = thermal_moments_closed(theta, oracle.adag_a).unwrap();
                assert!((oracle.a_adag - closed.a_adag).abs() < 1e-10);
                assert!((oracle.a_atilde - closed.a_atilde).abs() < 1e-10);
                let vo = quadrature_variances(&oracle);
                let vc = thermal_variances_closed(theta, oracle.adag_a).unwrap();
                assert!((vo.var1 - vc.var1).abs() < 1e-10);
                assert!((vo.var2 - vc.var2).abs() < 1e-10);
                assert!((vc.var1 * vc.var2 - vc.product).abs() < 1e-12);
            }
        }

        for theta in [0.5f64, 1.0, 3.0] {
            let n0 = 1.0 / theta.exp_m1();
            let v = thermal_variances_closed(theta, n0).unwrap();
            let h = (0.5 * theta).exp();
            assert!((v.var1 - 0.25 * (h + 1.0) / (h - 1.0)).abs() < 1e-12);
            assert!((v.var2 - 0.25 * (h - 1.0) / (h + 1.0)).abs() < 1e-12);
            assert!((v.product - 1.0 / 16.0).abs() < 1e-12);
        }

        // zero temperature through the moment route
        let m = thermal_moments(&spec(60.0, bm(2.0))).unwrap();
        let v = quadrature_variances(&m);
        assert!((v.var1 - 0.25).abs() < 1e-12 && (v.var2 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn entropy() {
        assert!((thermal_entropy_bits(2f64.ln()).unwrap() - 2.0).abs() < 1e-12);
        assert!(thermal_entropy_bits(60.0).unwrap() < 1e-20);
        assert!(thermal_entropy_bits(0.0).is_err());
        for theta in [0.2, 1.0, 3.0] {
            let p = thermal_probabilities(&spec(theta, bm(2.0)));
            let series = shannon_entropy_bits(&p).unwrap();
            assert!((series - thermal_entropy_bits(theta).unwrap()).abs() < 1e-8);
            let xi = (-0.5 * theta).exp().atanh();
            assert!((entanglement_entropy_closed(xi) - thermal_entropy_bits(theta).unwrap()).abs() < 1e-12);
            let sq = squeezed_probabilities(&SqueezedSpec::new(xi, bm(2.0), 1e-12).unwrap());
            assert_eq!(sq.len(), p.len());
        }
    }
}
