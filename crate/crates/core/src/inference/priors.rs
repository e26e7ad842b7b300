//! Log prior densities for the GP hyperparameters.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::surrogate::Dataset;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// `(2 pi^3)^{-1/2}`, the constant in the Horseshoe density bounds.
pub const HORSESHOE_K: f64 = 0.126_987_271_868_481_94;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriorConfig {
    pub tau_beta: f64,
    pub tau_noise: f64,
    /// Signal variance used when the observed values have zero variance.
    pub signal_variance_floor: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            tau_beta: 5.0,
            tau_noise: 0.05f64.sqrt(),
            signal_variance_floor: 1.0,
        }
    }
}

impl PriorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_beta", self.tau_beta),
            ("tau_noise", self.tau_noise),
            ("signal_variance_floor", self.signal_variance_floor),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Truncated Normal on `[y_min, y_max]` centred at the sample mean with
/// standard deviation `(y_max - y_min) / 4`. Unnormalized; the truncation
/// constant does not depend on `m`.
pub fn log_prior_mean(m: f64, data: &Dataset) -> f64 {
    let (lo, hi) = (data.y_min(), data.y_max());
    if !(lo..=hi).contains(&m) {
        return f64::NEG_INFINITY;
    }
    let center = data.y_mean();
    if hi == lo {
        return if m == center { 0.0 } else { f64::NEG_INFINITY };
    }
    let sd = (hi - lo) / 4.0;
    let z = (m - center) / sd;
    -0.5 * z * z - sd.ln() - 0.5 * LN_2PI
}

/// Prior on the signal variance: a Normal over `sigma_f^2` itself with
/// location `(l + u) / 2` and scale `(l + u) / 4`, truncated to `[l, u]`
/// where `l = var(y) / K_max`, `u = var(y) / K_min` over the unit Gram.
///
/// Everything is kept in log form so a vanishing `K_min` cannot overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalVariancePrior {
    kind: SvKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SvKind {
    PointMass(f64),
    Truncated {
        ln_lower: f64,
        ln_upper: f64,
        // ln(l + u)
        ln_sum: f64,
        ln_norm: f64,
    },
}

impl SignalVariancePrior {
    pub fn new(y_variance: f64, k_min: f64, k_max: f64, floor: f64) -> Self {
        if !(y_variance > 0.0) {
            return SignalVariancePrior {
                kind: SvKind::PointMass(floor),
            };
        }
        let k_min = k_min.max(f64::MIN_POSITIVE);
        let k_max = k_max.max(k_min);
        let ln_lower = y_variance.ln() - k_max.ln();
        let ln_upper = y_variance.ln() - k_min.ln();
        if ln_upper - ln_lower <= 1e-12 {
            return SignalVariancePrior {
                kind: SvKind::PointMass(y_variance / k_max),
            };
        }
        let ln_sum = ln_upper + (ln_lower - ln_upper).exp().ln_1p();
        // standardized endpoints are 4l/(l+u) - 2 and 4u/(l+u) - 2
        let za = 4.0 * (ln_lower - ln_sum).exp() - 2.0;
        let zb = 4.0 * (ln_upper - ln_sum).exp() - 2.0;
        let n = Normal::standard();
        let mass = n.cdf(zb) - n.cdf(za);
        SignalVariancePrior {
            kind: SvKind::Truncated {
                ln_lower,
                ln_upper,
                ln_sum,
                ln_norm: mass.ln(),
            },
        }
    }

    pub fn from_gram(data: &Dataset, unit_gram: &[f64], floor: f64) -> Self {
        let (lo, hi) = min_max(unit_gram);
        SignalVariancePrior::new(data.y_variance(), lo, hi, floor)
    }

    /// The single admissible value when the support has collapsed.
    pub fn point_mass(&self) -> Option<f64> {
        match self.kind {
            SvKind::PointMass(v) => Some(v),
            SvKind::Truncated { .. } => None,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            SvKind::PointMass(v) => (v, v),
            SvKind::Truncated {
                ln_lower, ln_upper, ..
            } => (ln_lower.exp(), ln_upper.exp()),
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        self.log_density_ln(x.ln())
    }

    /// Density over `sigma_f^2`, evaluated at `ln_x = ln sigma_f^2`.
    pub fn log_density_ln(&self, ln_x: f64) -> f64 {
        match self.kind {
            SvKind::PointMass(v) => {
                if ln_x == v.ln() {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            SvKind::Truncated {
                ln_lower,
                ln_upper,
                ln_sum,
                ln_norm,
            } => {
                if ln_x.is_nan() || ln_x < ln_lower || ln_x > ln_upper {
                    return f64::NEG_INFINITY;
                }
                let z = 4.0 * (ln_x - ln_sum).exp() - 2.0;
                let ln_scale = ln_sum - 4f64.ln();
                -0.5 * z * z - ln_scale - 0.5 * LN_2PI - ln_norm
            }
        }
    }

    /// Nearest point of the support to `x`, nudged so that its logarithm
    /// also passes the support test.
    pub fn clamp(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        let mut y = if x.is_nan() { lo } else { x.clamp(lo, hi) };
        if let SvKind::Truncated {
            ln_lower, ln_upper, ..
        } = self.kind
        {
            while y.ln() > ln_upper {
                y = y.next_down();
            }
            while y.ln() < ln_lower {
                y = y.next_up();
            }
        }
        y
    }
}

pub(crate) fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Log prior of the signal variance given the unit-signal Gram of the data.
pub fn log_prior_signal_variance(sf2: f64, data: &Dataset, unit_gram: &[f64], floor: f64) -> f64 {
    SignalVariancePrior::from_gram(data, unit_gram, floor).log_density(sf2)
}

/// Upper bound of the Horseshoe density, `K ln(1 + 2 tau^2 / x^2)`, in log
/// form. The spike at zero is capped at the value for `x = 1e-6 tau`;
/// negative arguments are outside the support.
pub fn log_prior_horseshoe(x: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("horseshoe scale must be positive, got {tau}")));
    }
    if x.is_nan() || x < 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let x = x.max(1e-6 * tau);
    let r = tau / x;
    Ok(HORSESHOE_K.ln() + (2.0 * r * r).ln_1p().ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{SearchSpace, Vertex};
    use rand::{Rng, SeedableRng};

    fn data(ys: &[f64]) -> Dataset {
        let s = SearchSpace::binary(1).unwrap();
        let vs = ys.iter().map(|_| Vertex(vec![0])).collect();
        Dataset::new(&s, vs, ys.to_vec()).unwrap()
    }

    #[test]
    fn horseshoe_constant() {
        let k = (2.0 * std::f64::consts::PI.powi(3)).sqrt().recip();
        assert!((HORSESHOE_K - k).abs() < 1e-17);
    }

    #[test]
    fn mean_prior_examples() {
        let d = data(&[0.0, 4.0]);
        let at = |m| log_prior_mean(m, &d);
        assert!((at(2.0) - at(3.0) - 0.5).abs() < 1e-12);
        assert_eq!(at(4.1), f64::NEG_INFINITY);
        assert_eq!(at(-0.1), f64::NEG_INFINITY);
        for m in [0.0, 0.5, 1.0, 3.9, 4.0] {
            assert!(at(2.0) >= at(m));
        }
        let flat = data(&[1.5, 1.5]);
        assert_eq!(log_prior_mean(1.5, &flat), 0.0);
        assert_eq!(log_prior_mean(1.6, &flat), f64::NEG_INFINITY);
    }

    #[test]
    fn signal_variance_support_and_mode() {
        let p = SignalVariancePrior::new(2.0, 0.25, 1.0, 1.0);
        let (lo, hi) = p.support();
        assert!((lo - 2.0).abs() < 1e-12 && (hi - 8.0).abs() < 1e-12);
        assert_eq!(p.log_density(1.99), f64::NEG_INFINITY);
        assert_eq!(p.log_density(8.01), f64::NEG_INFINITY);
        let mode = 5.0;
        for x in [2.0, 3.0, 4.9, 5.1, 7.0, 8.0] {
            assert!(p.log_density(mode) > p.log_density(x));
        }
        // against a direct truncated Normal density
        let n = Normal::new(5.0, 2.5).unwrap();
        let mass = n.cdf(8.0) - n.cdf(2.0);
        let want = statrs::distribution::Continuous::ln_pdf(&n, 3.3) - mass.ln();
        assert!((p.log_density(3.3) - want).abs() < 1e-12);
    }

    #[test]
    fn signal_variance_degenerate_cases() {
        // K_VV = I gives K_min = K_max = 1: support collapses to var(y).
        let p = SignalVariancePrior::new(3.0, 1.0, 1.0, 1.0);
        assert_eq!(p.support(), (3.0, 3.0));
        assert_eq!(p.point_mass(), Some(3.0));
        let flat = SignalVariancePrior::new(0.0, 0.1, 1.0, 0.7);
        assert_eq!(flat.point_mass(), Some(0.7));
        assert_eq!(flat.log_density(0.7), 0.0);
        assert_eq!(flat.log_density(0.8), f64::NEG_INFINITY);
    }

    #[test]
    fn signal_variance_survives_vanishing_kmin() {
        let p = SignalVariancePrior::new(1.0, 0.0, 1.0, 1.0);
        let (lo, hi) = p.support();
        assert_eq!(lo, 1.0);
        assert!(hi.is_finite() || hi == f64::INFINITY);
        assert!(p.log_density(1.0).is_finite());
        assert!(p.log_density(1e300).is_finite());
    }

    #[test]
    fn horseshoe_analytic_points() {
        let k = HORSESHOE_K.ln();
        for tau in [0.05f64.sqrt(), 1.0, 5.0] {
            let a = log_prior_horseshoe(tau * 2f64.sqrt(), tau).unwrap();
            assert!((a - (k + 2f64.ln().ln())).abs() < 1e-12);
            let x = tau * (2.0 / (std::f64::consts::E - 1.0)).sqrt();
            assert!((log_prior_horseshoe(x, tau).unwrap() - k).abs() < 1e-12);
        }
        assert_eq!(log_prior_horseshoe(1e200, 1.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_prior_horseshoe(-1.0, 1.0).unwrap(), f64::NEG_INFINITY);
        let cap = log_prior_horseshoe(0.0, 5.0).unwrap();
        assert!(cap.is_finite());
        assert_eq!(cap, log_prior_horseshoe(5e-6, 5.0).unwrap());
        assert!(log_prior_horseshoe(1.0, 0.0).is_err());
    }

    #[test]
    fn horseshoe_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let v = log_prior_horseshoe(0.01 * f64::from(i) + 1e-3, 5.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn clamped_values_have_finite_density() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let var: f64 = rng.random_range(1e-3..10.0);
            let kmin: f64 = rng.random_range(1e-9..1.0);
            let kmax = kmin + rng.random_range(1e-6..5.0);
            let sv = SignalVariancePrior::new(var, kmin, kmax, 1.0);
            let (lo, hi) = sv.support();
            for x in [0.0, lo, lo * 0.5, hi, hi * 2.0, f64::NAN, f64::INFINITY] {
                assert!(sv.log_density(sv.clamp(x)).is_finite(), "{var} {kmin} {kmax} {x}");
            }
        }
    }
}
