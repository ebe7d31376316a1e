//! Fate of a single orbit under a finite iterate budget.

use crate::maps::{Complex, Family};

/// Convergence threshold toward the origin.
pub const CONVERGENCE_RADIUS: f64 = 1e-6;
/// Escape threshold toward infinity.
pub const ESCAPE_RADIUS: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub convergence: f64,
    pub escape: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            convergence: CONVERGENCE_RADIUS,
            escape: ESCAPE_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FateKind {
    ConvergedToZero,
    Escaped,
    Undecided,
}

/// Outcome of iterating one initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitFate {
    pub kind: FateKind,
    /// Iterates applied before the threshold was crossed; equals the budget
    /// for undecided orbits.
    pub steps: u64,
}

impl OrbitFate {
    pub fn is_converged(&self) -> bool {
        self.kind == FateKind::ConvergedToZero
    }

    pub fn is_escaped(&self) -> bool {
        self.kind == FateKind::Escaped
    }
}

/// Iterates `z0` until `|z| < convergence` or `|z| > escape`, checking before
/// every application of the map. The first crossing wins.
#[inline]
pub fn orbit_fate<F: Family + ?Sized>(family: &F, z0: Complex, thresholds: Thresholds, budget: u64) -> OrbitFate {
    let conv2 = thresholds.convergence * thresholds.convergence;
    let esc2 = thresholds.escape * thresholds.escape;
    let mut z = z0;
    let mut steps = 0;
    loop {
        let r2 = z.norm_sqr();
        if r2 < conv2 {
            return OrbitFate {
                kind: FateKind::ConvergedToZero,
                steps,
            };
        }
        // a NaN here can only come from overflow on the way out
        if r2 > esc2 || r2.is_nan() {
            return OrbitFate {
                kind: FateKind::Escaped,
                steps,
            };
        }
        if steps == budget {
            return OrbitFate {
                kind: FateKind::Undecided,
                steps,
            };
        }
        z = family.eval(z);
        steps += 1;
    }
}
