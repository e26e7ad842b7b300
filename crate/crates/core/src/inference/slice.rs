//! Univariate slice sampling with interval doubling and shrinkage.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceConfig {
    pub width: f64,
    pub max_doublings: u32,
    /// Rejected proposals tolerated before the transition gives up and
    /// stays at the start point.
    pub max_shrinks: u32,
}

impl Default for SliceConfig {
    fn default() -> Self {
        SliceConfig {
            width: 1.0,
            max_doublings: 20,
            max_shrinks: 200,
        }
    }
}

/// One slice-sampling transition from `x0` targeting `exp(log_density)`.
///
/// The initial interval of `config.width` is placed at random around `x0`
/// and doubled on a random side until both ends lie outside the slice.
/// Proposals are drawn uniformly and the interval shrinks towards `x0` on
/// rejection; an accepted point must also pass the doubling-reversibility
/// test so the target stays invariant.
pub fn slice_sample_univariate<F, R>(
    mut log_density: F,
    x0: f64,
    rng: &mut R,
    config: &SliceConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let f0 = log_density(x0);
    if f0.is_nan() || f0 == f64::NEG_INFINITY {
        return Err(Error::ZeroDensityStart(x0));
    }
    let w = config.width;
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::Domain(format!("slice width must be positive, got {w}")));
    }
    // level = f0 + ln U, U in (0, 1]
    let level = f0 + (1.0 - rng.random::<f64>()).ln();

    let mut left = x0 - w * rng.random::<f64>();
    let mut right = left + w;
    let mut f_left = log_density(left);
    let mut f_right = log_density(right);
    let mut k = config.max_doublings;
    while k > 0 && (level < f_left || level < f_right) {
        if rng.random::<f64>() < 0.5 {
            left -= right - left;
            f_left = log_density(left);
        } else {
            right += right - left;
            f_right = log_density(right);
        }
        k -= 1;
    }
    if k == 0 && (level < f_left || level < f_right) {
        log::warn!("slice sampler hit the doubling cap at x0 = {x0}; continuing with [{left}, {right}]");
    }

    let (mut lo, mut hi) = (left, right);
    for _ in 0..config.max_shrinks {
        let x1 = lo + rng.random::<f64>() * (hi - lo);
        let f1 = log_density(x1);
        if level < f1 && accept(&mut log_density, x0, x1, level, (left, f_left), (right, f_right), w) {
            return Ok(x1);
        }
        if x1 < x0 {
            lo = x1;
        } else {
            hi = x1;
        }
    }
    log::warn!("slice sampler exhausted {} shrink steps at x0 = {x0}", config.max_shrinks);
    Ok(x0)
}

/// Would doubling from `x1` have produced the same interval?
fn accept<F: FnMut(f64) -> f64>(
    log_density: &mut F,
    x0: f64,
    x1: f64,
    level: f64,
    (mut left, mut f_left): (f64, f64),
    (mut right, mut f_right): (f64, f64),
    w: f64,
) -> bool {
    let mut differ = false;
    while right - left > 1.1 * w {
        let mid = 0.5 * (left + right);
        if (x0 < mid) != (x1 < mid) {
            differ = true;
        }
        if x1 < mid {
            right = mid;
            f_right = log_density(right);
        } else {
            left = mid;
            f_left = log_density(left);
        }
        if differ && level >= f_left && level >= f_right {
            return false;
        }
    }
    true
}
