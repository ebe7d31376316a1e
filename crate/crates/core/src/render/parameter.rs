use std::io::Write;

use rayon::prelude::*;

use crate::error::{ensure_finite, Error, Result};
use crate::fixed_points::Pair;
use crate::maps::{validate_rates, Complex, ComplexCubic, MapParams};
use crate::orbit::{orbit_fate, FateKind};

use super::colour::{escape_ramp, Rgb, BLACK, GREEN};
use super::ppm::write_ppm;
use super::spec::RenderSpec;
use super::with_threads;

/// Roots of `F'(z) = 1 - gamma + 2 mu (1 - D) z - 3 mu z^2` for real parameters.
pub fn critical_points_f(params: MapParams) -> Result<Pair<Complex>> {
    critical_points_complex(
        Complex::new(params.mu, 0.0),
        Complex::new(params.gamma, 0.0),
        Complex::new(params.d, 0.0),
    )
}

/// Critical points with complex parameters; `plus` takes the root of the
/// larger modulus.
pub fn critical_points_complex(mu: Complex, gamma: Complex, d: Complex) -> Result<Pair<Complex>> {
    ensure_finite(mu, "mu")?;
    ensure_finite(gamma, "gamma")?;
    ensure_finite(d, "D")?;
    if mu.norm() == 0.0 {
        return Err(Error::InputDomain("mu must be nonzero".into()));
    }
    let b = 1.0 - d;
    let c = (1.0 - gamma) / mu;
    let s = (b * b + 3.0 * c).sqrt();
    // pick the sign that avoids cancellation; the other root follows from
    // the product of the roots
    let q = if (b + s).norm() >= (b - s).norm() { b + s } else { b - s };
    if q.norm() == 0.0 {
        let zero = Complex::new(0.0, 0.0);
        return Ok(Pair { minus: zero, plus: zero });
    }
    Ok(Pair {
        minus: -c / q,
        plus: q / 3.0,
    })
}

/// The complexified parameter swept across the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamPlane {
    /// Complex `D` with fixed `mu`, `gamma`.
    D { mu: f64, gamma: f64 },
    /// Complex `mu` with fixed `gamma`, `D`.
    Mu { gamma: f64, d: f64 },
}

impl ParamPlane {
    fn validate(&self) -> Result<()> {
        match *self {
            ParamPlane::D { mu, gamma } => validate_rates(mu, gamma),
            ParamPlane::Mu { gamma, d } => {
                validate_rates(1.0, gamma)?;
                if !d.is_finite() {
                    return Err(Error::InputDomain(format!("D must be finite, got {d}")));
                }
                Ok(())
            }
        }
    }

    fn parameters(&self, p: Complex) -> (Complex, Complex, Complex) {
        match *self {
            ParamPlane::D { mu, gamma } => (Complex::new(mu, 0.0), Complex::new(gamma, 0.0), p),
            ParamPlane::Mu { gamma, d } => (p, Complex::new(gamma, 0.0), Complex::new(d, 0.0)),
        }
    }

    /// `F` at parameter value `p`.
    pub fn map_at(&self, p: Complex) -> ComplexCubic {
        let (mu, gamma, d) = self.parameters(p);
        ComplexCubic {
            c0: Complex::new(0.0, 0.0),
            c1: 1.0 - gamma,
            c2: mu * (1.0 - d),
            c3: -mu,
        }
    }

    pub fn critical_points_at(&self, p: Complex) -> Result<Pair<Complex>> {
        let (mu, gamma, d) = self.parameters(p);
        critical_points_complex(mu, gamma, d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamPixelClass {
    BothToZero,
    /// Steps of the fastest escaping critical orbit.
    OneToInfinity(u64),
    Other,
}

impl ParamPixelClass {
    pub fn colour(&self, budget: u64) -> Rgb {
        match *self {
            ParamPixelClass::BothToZero => BLACK,
            ParamPixelClass::OneToInfinity(s) => escape_ramp(s, budget),
            ParamPixelClass::Other => GREEN,
        }
    }
}

fn classify_parameter(plane: &ParamPlane, p: Complex, spec: &RenderSpec) -> ParamPixelClass {
    let Ok(crit) = plane.critical_points_at(p) else {
        return ParamPixelClass::Other;
    };
    let f = plane.map_at(p);
    let fates = [crit.minus, crit.plus].map(|z| orbit_fate(&f, z, spec.thresholds, spec.budget));
    let escape = fates.iter().filter(|f| f.kind == FateKind::Escaped).map(|f| f.steps).min();
    if let Some(steps) = escape {
        ParamPixelClass::OneToInfinity(steps)
    } else if fates.iter().all(|f| f.kind == FateKind::ConvergedToZero) {
        ParamPixelClass::BothToZero
    } else {
        ParamPixelClass::Other
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRender {
    pub spec: RenderSpec,
    pub plane: ParamPlane,
    pub classes: Vec<ParamPixelClass>,
}

impl ParamRender {
    pub fn class_at(&self, i: usize, j: usize) -> ParamPixelClass {
        self.classes[j * self.spec.width + i]
    }

    /// Pixel counts `(both_to_zero, one_to_infinity, other)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        self.classes.iter().fold((0, 0, 0), |(z, e, o), c| match c {
            ParamPixelClass::BothToZero => (z + 1, e, o),
            ParamPixelClass::OneToInfinity(_) => (z, e + 1, o),
            ParamPixelClass::Other => (z, e, o + 1),
        })
    }

    pub fn rgb(&self) -> Vec<u8> {
        self.classes
            .iter()
            .flat_map(|c| c.colour(self.spec.budget))
            .collect()
    }

    pub fn write_ppm<W: Write>(&self, out: &mut W) -> Result<()> {
        write_ppm(out, self.spec.width, self.spec.height, &self.rgb())
    }
}

/// Classifies each complex parameter by the fates of both critical orbits:
/// any escape first, then both converging to the origin, else other.
pub fn render_parameter_plane(plane: ParamPlane, spec: &RenderSpec, threads: Option<usize>) -> Result<ParamRender> {
    plane.validate()?;
    let rows: Vec<Vec<ParamPixelClass>> = with_threads(threads, || {
        (0..spec.height)
            .into_par_iter()
            .map(|j| {
                (0..spec.width)
                    .map(|i| classify_parameter(&plane, spec.pixel_centre(i, j), spec))
                    .collect()
            })
            .collect()
    })?;
    Ok(ParamRender {
        spec: *spec,
        plane,
        classes: rows.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_points::critical_values;
    use crate::maps::{FMap, Family};
    use crate::render::spec::Window;
    use approx::assert_abs_diff_eq;

    #[test]
    fn critical_point_examples() {
        let params = MapParams::new(4.0, 0.2, 0.2).unwrap();
        let cp = critical_points_f(params).unwrap();
        assert_abs_diff_eq!(cp.plus.re, 0.637_85, epsilon = 1e-5);
        assert_abs_diff_eq!(cp.minus.re, -0.104_52, epsilon = 1e-5);
        let f = FMap::new(params);
        for z in [cp.minus, cp.plus] {
            assert!(f.derivative(z).unwrap().norm() < 1e-10);
        }
        let double = critical_points_f(MapParams::new(4.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(double.minus, Complex::new(0.0, 0.0));
        assert_eq!(double.plus, Complex::new(0.0, 0.0));
    }

    #[test]
    fn complex_parameter_roots() {
        let plane = ParamPlane::D { mu: 4.0, gamma: 0.2 };
        let p = Complex::new(0.3, 0.7);
        let f = plane.map_at(p);
        let cp = plane.critical_points_at(p).unwrap();
        for z in [cp.minus, cp.plus] {
            assert!(f.derivative(z).unwrap().norm() < 1e-10);
        }
    }

    fn classify_real(d: f64) -> ParamPixelClass {
        let spec = RenderSpec::new(Window::new(0.0, 1.0, 0.0, 1.0).unwrap(), 1, 1, 100_000).unwrap();
        classify_parameter(&ParamPlane::D { mu: 4.0, gamma: 0.2 }, Complex::new(d, 0.0), &spec)
    }

    #[test]
    fn classification_examples() {
        let d_c = critical_values(4.0, 0.2).unwrap().d_c;
        assert_eq!(classify_real(d_c - 1e-3), ParamPixelClass::Other);
        assert_eq!(classify_real(d_c + 1e-3), ParamPixelClass::BothToZero);
        assert!(matches!(classify_real(1e3), ParamPixelClass::OneToInfinity(_)));
    }

    #[test]
    fn deterministic_across_threads() {
        let spec = RenderSpec::new(Window::new(0.0, 0.75, -0.1875, 0.1875).unwrap(), 24, 12, 500).unwrap();
        let plane = ParamPlane::D { mu: 4.0, gamma: 0.2 };
        let a = render_parameter_plane(plane, &spec, Some(1)).unwrap();
        let b = render_parameter_plane(plane, &spec, Some(3)).unwrap();
        assert_eq!(a.rgb(), b.rgb());
        let (z, e, o) = a.counts();
        assert_eq!(z + e + o, 24 * 12);
        assert!(render_parameter_plane(ParamPlane::D { mu: -1.0, gamma: 0.2 }, &spec, None).is_err());
    }
}
