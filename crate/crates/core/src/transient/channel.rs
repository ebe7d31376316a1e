use crate::error::{Error, Result};
use crate::fixed_points::critical_values;
use crate::maps::{Complex, EpsilonOffset, FEpsMap};
use crate::orbit::{orbit_fate, FateKind, Thresholds};

use super::passage::theorem_prediction;

/// Scan resolution: points per unit `eps` along the vertical line.
pub const SCAN_STEPS_PER_EPS: f64 = 256.0;
const BISECT_REL: f64 = 1e-3;

/// Vertical extent of the set converging to the origin along `Re z = x_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelWidth {
    pub eps: f64,
    /// Height of the first escaping point above the axis.
    pub upper: f64,
    /// Depth of the first escaping point below the axis (positive).
    pub lower: f64,
    pub width: f64,
}

impl ChannelWidth {
    pub fn ratio(&self) -> f64 {
        self.width / self.eps
    }
}

/// Ten passage times or `1e5`, whichever is larger.
pub fn default_channel_budget(mu: f64, gamma: f64, eps: f64) -> Result<u64> {
    let crit = critical_values(mu, gamma)?;
    Ok((10.0 * theorem_prediction(&crit, eps)?).max(1e5).ceil() as u64)
}

fn fate_at(f: &FEpsMap, y: f64, budget: u64) -> Result<bool> {
    let z = Complex::new(f.x_c(), y);
    let fate = orbit_fate(f, z, Thresholds::default(), budget);
    match fate.kind {
        FateKind::ConvergedToZero => Ok(true),
        FateKind::Escaped => Ok(false),
        FateKind::Undecided => Err(Error::MeasurementFailed {
            reason: format!("orbit from x_c + {y:e} i undecided; raise the budget"),
            steps: fate.steps,
            last: y,
            entered_at: None,
        }),
    }
}

/// Distance from the axis to the first escaping point, scanning in
/// direction `sign` and bisecting the last converged/escaped pair.
fn boundary(f: &FEpsMap, sign: f64, budget: u64) -> Result<f64> {
    let eps = f.eps();
    let step = eps / SCAN_STEPS_PER_EPS;
    let limit = 10.0 * eps.sqrt();
    let mut inside = 0.0;
    let mut k = 1u64;
    let outside = loop {
        let y = k as f64 * step;
        if y > limit {
            return Err(Error::WidenScan { limit });
        }
        if !fate_at(f, sign * y, budget)? {
            break y;
        }
        inside = y;
        k += 1;
    };
    let (mut lo, mut hi) = (inside, outside);
    while hi - lo > BISECT_REL * eps {
        let mid = 0.5 * (lo + hi);
        if fate_at(f, sign * mid, budget)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Width of the channel through which real-axis orbits pass, measured on the
/// vertical line through the parabolic point.
pub fn channel_width(mu: f64, gamma: f64, eps: EpsilonOffset, budget: u64) -> Result<ChannelWidth> {
    let e = eps.value();
    if e <= 0.0 {
        return Err(Error::InputDomain(format!("channel width needs eps > 0, got {e}")));
    }
    let f = FEpsMap::new(mu, gamma, eps)?;
    if !fate_at(&f, 0.0, budget)? {
        return Err(Error::MeasurementFailed {
            reason: "x_c itself does not reach the origin".into(),
            steps: budget,
            last: f.x_c(),
            entered_at: None,
        });
    }
    let (upper, lower) = rayon::join(|| boundary(&f, 1.0, budget), || boundary(&f, -1.0, budget));
    let (upper, lower) = (upper?, lower?);
    Ok(ChannelWidth {
        eps: e,
        upper,
        lower,
        width: upper + lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_is_linear_in_eps() {
        let e = 1e-5;
        let budget = default_channel_budget(4.0, 0.2, e).unwrap();
        let w = channel_width(4.0, 0.2, EpsilonOffset::new(e).unwrap(), budget).unwrap();
        assert!((w.ratio() - 5.9476).abs() / 5.9476 < 0.03, "{w:?}");
        // the real map commutes with conjugation
        assert!((w.upper - w.lower).abs() <= 2.0 * BISECT_REL * e);
    }

    #[test]
    fn wide_channel_still_measured() {
        let e = 0.05;
        let w = channel_width(4.0, 0.2, EpsilonOffset::new(e).unwrap(), 100_000).unwrap();
        assert!(w.width.is_finite() && w.width > 0.0);
    }

    #[test]
    fn failures() {
        assert!(matches!(
            channel_width(4.0, 0.2, EpsilonOffset::new(-1e-4).unwrap(), 1000),
            Err(Error::InputDomain(_))
        ));
        assert!(matches!(
            channel_width(4.0, 0.2, EpsilonOffset::new(1e-4).unwrap(), 10),
            Err(Error::MeasurementFailed { .. })
        ));
        assert_eq!(default_channel_budget(4.0, 0.2, 1e-2).unwrap(), 100_000);
    }
}
