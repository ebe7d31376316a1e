use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{ensure_finite_real, Error, Result};
use crate::fixed_points::{general_passage_leading, CriticalValues};
use crate::maps::{Complex, Family, GeneralCoeffs};
use crate::orbit::{orbit_fate, OrbitFate, Thresholds, ESCAPE_RADIUS};
use crate::quadrature;

/// Half-width of the bottleneck segment for the `(mu, gamma) = (4, 0.2)` family.
pub const DEFAULT_DELTA: f64 = 0.05;

/// The segment `[centre - delta, centre + delta]` the orbit must cross.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageWindow {
    pub centre: f64,
    pub delta: f64,
}

impl PassageWindow {
    pub fn new(centre: f64, delta: f64) -> Result<Self> {
        ensure_finite_real(centre, "centre")?;
        ensure_finite_real(delta, "delta")?;
        if delta <= 0.0 {
            return Err(Error::InputDomain(format!("delta must be > 0, got {delta}")));
        }
        Ok(Self { centre, delta })
    }

    /// Centred on the parabolic point `x_c`.
    pub fn around_fold(critical: &CriticalValues, delta: f64) -> Result<Self> {
        Self::new(critical.x_c, delta)
    }

    pub fn upper(&self) -> f64 {
        self.centre + self.delta
    }

    pub fn lower(&self) -> f64 {
        self.centre - self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientMeasurement {
    pub epsilon: f64,
    pub x_start: f64,
    /// Half-width `delta` of the crossed segment.
    pub exit_threshold: f64,
    /// Iterates from the first entry below `centre + delta` to the first
    /// exit below `centre - delta`.
    pub iterates: u64,
    /// Iterate index of the entry.
    pub entered_at: u64,
    /// Fate of the continued orbit, when tracking to the origin was requested.
    pub fate: Option<OrbitFate>,
}

impl TransientMeasurement {
    /// Total iterates from `x_start` to the origin's neighbourhood.
    pub fn total_steps(&self) -> Option<u64> {
        self.fate
            .filter(OrbitFate::is_converged)
            .map(|f| self.entered_at + self.iterates + f.steps)
    }
}

/// Counts real iterates through the bottleneck.
///
/// `track` continues the orbit after the exit and records its fate.
pub fn measure_passage<F: Family + ?Sized>(
    family: &F,
    eps: f64,
    window: PassageWindow,
    x_start: f64,
    budget: u64,
    track: Option<Thresholds>,
) -> Result<TransientMeasurement> {
    ensure_finite_real(x_start, "x_start")?;
    if eps <= 0.0 {
        return Err(Error::InputDomain(format!(
            "passage measurement needs eps > 0, got {eps}"
        )));
    }
    if x_start < window.upper() {
        return Err(Error::InputDomain(format!(
            "x_start = {x_start} must lie at or above centre + delta = {}",
            window.upper()
        )));
    }
    let (upper, lower) = (window.upper(), window.lower());
    let mut x = Complex::new(x_start, 0.0);
    let mut entered = None;
    let mut k = 0u64;
    let exit = loop {
        let r = x.re;
        if !r.is_finite() || r.abs() > ESCAPE_RADIUS {
            return Err(Error::MeasurementFailed {
                reason: "orbit escaped before leaving the bottleneck".into(),
                steps: k,
                last: r,
                entered_at: entered,
            });
        }
        if entered.is_none() && r <= upper {
            entered = Some(k);
        }
        if entered.is_some() && r < lower {
            break k;
        }
        if k == budget {
            return Err(Error::MeasurementFailed {
                reason: "budget exhausted".into(),
                steps: k,
                last: r,
                entered_at: entered,
            });
        }
        x = family.eval(x);
        k += 1;
    };
    let entered_at = entered.unwrap_or(0);
    let fate = track.map(|t| orbit_fate(family, x, t, budget - exit));
    Ok(TransientMeasurement {
        epsilon: eps,
        x_start,
        exit_threshold: window.delta,
        iterates: exit - entered_at,
        entered_at,
        fate,
    })
}

/// `2 pi / Im(lambda)` for the multiplier at the lower repeller.
pub fn predicted_iterates(multiplier: Complex) -> Result<f64> {
    if !(multiplier.re.is_finite() && multiplier.im.is_finite()) {
        return Err(Error::InputDomain(format!("multiplier {multiplier} is not finite")));
    }
    if multiplier.im == 0.0 {
        return Err(Error::DivisionDomain(format!(
            "multiplier {multiplier} is real; no rotation to count"
        )));
    }
    Ok(2.0 * PI / multiplier.im)
}

/// `pi / (mu x_c^(3/2) eps^(1/2))`.
pub fn theorem_prediction(critical: &CriticalValues, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::InputDomain(format!("needs eps > 0, got {eps}")));
    }
    Ok(PI / (critical.mu * critical.x_c.powf(1.5) * eps.sqrt()))
}

/// `pi / (sqrt(a c) eps^(n/2))` for the general family.
pub fn general_scaling_prediction(coeffs: &GeneralCoeffs, eps: f64) -> Result<f64> {
    general_passage_leading(coeffs, eps)
}

/// `integral from centre + delta to centre - delta of dx / (f(x) - x)`, the
/// continuous-time approximation of the passage count.
pub fn passage_integral<F: Family + ?Sized>(family: &F, eps: f64, window: PassageWindow) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::InputDomain(format!(
            "the passage integrand has a pole on the real segment for eps = {eps} <= 0"
        )));
    }
    let pole = Cell::new(None);
    let integrand = |x: f64| {
        let d = family.displacement(Complex::new(x, 0.0)).re;
        if (d <= 0.0 || d.is_nan()) && pole.get().is_none() {
            pole.set(Some(x));
        }
        // reversed limits and reversed sign: dx / (x - f(x)) upward
        1.0 / d
    };
    let result = quadrature::integrate(integrand, window.lower(), window.upper(), 1e-11, 0.0, 20_000);
    if let Some(x) = pole.get() {
        return Err(Error::InputDomain(format!(
            "f(x) - x vanishes or changes sign near x = {x}"
        )));
    }
    result
}

/// Splits the passage integral into the residue term and the remainder
/// along the rest of a closed curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageDecomposition {
    pub integral: f64,
    /// `2 pi i / (lambda - 1)`
    pub index_term: Complex,
    /// `index_term - integral`: the contribution of the curve away from
    /// the real segment.
    pub remainder: Complex,
}

pub fn passage_decomposition<F: Family + ?Sized>(
    family: &F,
    eps: f64,
    window: PassageWindow,
    multiplier_minus: Complex,
) -> Result<PassageDecomposition> {
    let integral = passage_integral(family, eps, window)?;
    let index_term = Complex::new(0.0, 2.0 * PI) / (multiplier_minus - 1.0);
    Ok(PassageDecomposition {
        integral,
        index_term,
        remainder: index_term - integral,
    })
}
