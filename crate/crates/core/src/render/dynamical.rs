use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::Result;
use crate::maps::{Complex, Family};
use crate::orbit::{orbit_fate, FateKind};

use super::colour::{zero_ramp, Rgb, BLACK, WHITE};
use super::ppm::write_ppm;
use super::spec::RenderSpec;
use super::with_threads;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PixelClass {
    ToZero(u64),
    ToInfinity(u64),
    Undecided,
}

impl PixelClass {
    pub fn label(&self) -> &'static str {
        match self {
            PixelClass::ToZero(_) => "to_zero",
            PixelClass::ToInfinity(_) => "to_infinity",
            PixelClass::Undecided => "undecided",
        }
    }

    pub fn steps(&self, budget: u64) -> u64 {
        match *self {
            PixelClass::ToZero(s) | PixelClass::ToInfinity(s) => s,
            PixelClass::Undecided => budget,
        }
    }

    pub fn colour(&self, budget: u64) -> Rgb {
        match *self {
            PixelClass::ToZero(s) => zero_ramp(s, budget),
            PixelClass::ToInfinity(_) => WHITE,
            PixelClass::Undecided => BLACK,
        }
    }
}

pub fn classify_orbit<F: Family + ?Sized>(family: &F, z0: Complex, spec: &RenderSpec) -> PixelClass {
    let fate = orbit_fate(family, z0, spec.thresholds, spec.budget);
    match fate.kind {
        FateKind::ConvergedToZero => PixelClass::ToZero(fate.steps),
        FateKind::Escaped => PixelClass::ToInfinity(fate.steps),
        FateKind::Undecided => PixelClass::Undecided,
    }
}

/// Per-pixel classes in row-major order from the top-left.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalRender {
    pub spec: RenderSpec,
    pub classes: Vec<PixelClass>,
}

impl DynamicalRender {
    pub fn class_at(&self, i: usize, j: usize) -> PixelClass {
        self.classes[j * self.spec.width + i]
    }

    /// Pixel counts `(to_zero, to_infinity, undecided)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        self.classes.iter().fold((0, 0, 0), |(z, e, u), c| match c {
            PixelClass::ToZero(_) => (z + 1, e, u),
            PixelClass::ToInfinity(_) => (z, e + 1, u),
            PixelClass::Undecided => (z, e, u + 1),
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

    /// Pixel counts per class and step count.
    pub fn histogram(&self) -> BTreeMap<(&'static str, u64), u64> {
        let mut h = BTreeMap::new();
        for c in &self.classes {
            *h.entry((c.label(), c.steps(self.spec.budget))).or_insert(0) += 1;
        }
        h
    }

    /// `class,steps,count`.
    pub fn write_histogram_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "class,steps,count")?;
        for ((class, steps), count) in self.histogram() {
            writeln!(out, "{class},{steps},{count}")?;
        }
        Ok(())
    }
}

/// Classifies every pixel centre. Rows run in parallel; `threads` pins the
/// worker count, otherwise the global pool is used.
pub fn render_dynamical_plane<F: Family + ?Sized>(
    family: &F,
    spec: &RenderSpec,
    threads: Option<usize>,
) -> Result<DynamicalRender> {
    let rows: Vec<Vec<PixelClass>> = with_threads(threads, || {
        (0..spec.height)
            .into_par_iter()
            .map(|j| {
                (0..spec.width)
                    .map(|i| classify_orbit(family, spec.pixel_centre(i, j), spec))
                    .collect()
            })
            .collect()
    })?;
    Ok(DynamicalRender {
        spec: *spec,
        classes: rows.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{EpsilonOffset, FEpsMap};
    use crate::render::spec::Window;
    use crate::transient::{measure_passage, PassageWindow, DEFAULT_DELTA};
    use proptest::prelude::*;

    fn f_eps(e: f64) -> FEpsMap {
        FEpsMap::new(4.0, 0.2, EpsilonOffset::new(e).unwrap()).unwrap()
    }

    fn spec(w: usize, h: usize, budget: u64) -> RenderSpec {
        RenderSpec::new(Window::new(-0.6, 1.0, -0.4, 0.4).unwrap(), w, h, budget).unwrap()
    }

    #[test]
    fn classify_examples() {
        let f = f_eps(1e-6);
        let s = spec(1, 1, 100_000);
        assert_eq!(classify_orbit(&f, Complex::new(0.0, 0.0), &s), PixelClass::ToZero(0));
        assert_eq!(classify_orbit(&f, Complex::new(1001.0, 0.0), &s), PixelClass::ToInfinity(0));
        let w = PassageWindow::around_fold(&f.critical(), DEFAULT_DELTA).unwrap();
        let m = measure_passage(&f, 1e-6, w, w.upper(), 100_000, Some(s.thresholds)).unwrap();
        let from_edge = classify_orbit(&f, Complex::new(w.upper(), 0.0), &s);
        assert_eq!(from_edge, PixelClass::ToZero(m.total_steps().unwrap()));
        // from mid-channel only half of the bottleneck remains
        let PixelClass::ToZero(n) = classify_orbit(&f, Complex::new(f.x_c(), 0.0), &s) else {
            panic!("x_c should reach the origin");
        };
        let half = 0.5 * m.iterates as f64;
        assert!((n as f64 - half).abs() / half < 0.1, "{n} vs {half}");
    }

    #[test]
    fn zero_budget_leaves_everything_undecided() {
        let f = f_eps(1e-6);
        let r = render_dynamical_plane(&f, &spec(16, 8, 0), None).unwrap();
        assert_eq!(r.counts(), (0, 0, 128));
    }

    #[test]
    fn before_fold_has_attracting_basin_and_exterior() {
        let f = f_eps(-0.1);
        let r = render_dynamical_plane(&f, &spec(64, 32, 2000), None).unwrap();
        let (_, inf, und) = r.counts();
        assert!(und > 0 && inf > 0);
        // the attracting fixed point sits on the axis to the right of x_c
        let x_plus = 0.5 * (1.0 - (f.critical().d_c - 0.1)) + ((0.5 * (1.0 - f.critical().d_c + 0.1)).powi(2) - 0.05).sqrt();
        let (i, j) = r.spec.pixel_of(Complex::new(x_plus, 0.0)).unwrap();
        assert_eq!(r.class_at(i, j), PixelClass::Undecided);
    }

    #[test]
    fn zoom_shows_escape_near_repellers() {
        let f = f_eps(1e-6);
        let w = Window::around(Complex::new(f.x_c(), 0.0), 1e-4, 5e-5).unwrap();
        let s = RenderSpec::new(w, 80, 40, 100_000).unwrap();
        let r = render_dynamical_plane(&f, &s, None).unwrap();
        let (zero, inf, _) = r.counts();
        assert!(zero > 0 && inf > 0);
    }

    #[test]
    fn outputs() {
        let f = f_eps(1e-4);
        let r = render_dynamical_plane(&f, &spec(8, 4, 50), Some(2)).unwrap();
        let mut ppm = Vec::new();
        r.write_ppm(&mut ppm).unwrap();
        assert_eq!(ppm.len(), 11 + 3 * 32);
        let mut csv = Vec::new();
        r.write_histogram_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("class,steps,count\n"));
        let total: u64 = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
        assert_eq!(total, 32);
        assert!(render_dynamical_plane(&f, &spec(8, 4, 50), Some(0)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn budget_only_resolves(w in 4usize..12, h in 2usize..8, e in 1e-5f64..1e-2, lo in 10u64..200) {
            let f = f_eps(e);
            let a = render_dynamical_plane(&f, &spec(w, h, lo), None).unwrap();
            let b = render_dynamical_plane(&f, &spec(w, h, lo * 20), None).unwrap();
            for (x, y) in a.classes.iter().zip(&b.classes) {
                if *x != PixelClass::Undecided {
                    prop_assert_eq!(x, y);
                }
            }
        }

        #[test]
        fn mirror_symmetric(w in 2usize..16, h in 2usize..16, e in -0.1f64..0.1) {
            let f = f_eps(e);
            let r = render_dynamical_plane(&f, &spec(w, h, 300), None).unwrap();
            for j in 0..h {
                for i in 0..w {
                    prop_assert_eq!(r.class_at(i, j), r.class_at(i, h - 1 - j));
                }
            }
        }
    }
}
