use statrs::distribution::{Beta, ContinuousCDF};

use crate::{BenchmarkError, Result};

/// Beta distribution sampled by inversion, so a fixed uniform maps to a
/// fixed draw whatever the parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BetaQuantile {
    a: f64,
    b: f64,
}

impl BetaQuantile {
    pub(crate) fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(BenchmarkError::Config(format!(
                "beta parameters must be positive, got ({a}, {b})"
            )));
        }
        Ok(BetaQuantile { a, b })
    }

    pub(crate) fn quantile(&self, u: f64) -> f64 {
        if self.a == 1.0 {
            // 1 - (1 - u)^(1/b)
            -((-u).ln_1p() / self.b).exp_m1()
        } else if self.b == 1.0 {
            u.powf(1.0 / self.a)
        } else {
            Beta::new(self.a, self.b)
                .expect("validated parameters")
                .inverse_cdf(u)
        }
    }
}
