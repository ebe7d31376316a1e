//! Quadrature rules: adaptive Gauss-Kronrod on an interval and the periodic
//! trapezoid rule on a circle.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::maps::Complex;

// 15-point Kronrod extension of the 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod with a global error target
/// `max(abs_tol, rel_tol * |integral|)`; the worst interval is bisected first.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    let mut parts = vec![(a, b, gauss_kronrod(&f, a, b))];
    loop {
        let (total, err) = parts
            .iter()
            .fold((0.0, 0.0), |(s, e), (_, _, (v, ve))| (s + v, e + ve));
        if !total.is_finite() {
            return Err(Error::QuadratureFailed(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= max_intervals {
            return Err(Error::QuadratureFailed(format!(
                "error estimate {err:e} after {} subintervals",
                parts.len()
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gauss_kronrod(&f, lo, mid)));
        parts.push((mid, hi, gauss_kronrod(&f, mid, hi)));
    }
}

/// Nodes `centre + radius e^(2 pi i k / n)` for `k = 0..n`, with `e^(i theta)`.
pub(crate) fn circle_nodes(centre: Complex, radius: f64, n: usize) -> impl Iterator<Item = (Complex, Complex)> {
    (0..n).map(move |k| {
        let theta = 2.0 * PI * k as f64 / n as f64;
        let unit = Complex::new(theta.cos(), theta.sin());
        (centre + radius * unit, unit)
    })
}

/// `(1 / 2 pi i) * contour integral of f` over the positively oriented circle,
/// by the `n`-point trapezoid rule.
pub fn circle_mean<F: Fn(Complex) -> Complex>(f: F, centre: Complex, radius: f64, n: usize) -> Complex {
    // dz = i r e^(i theta) d theta, so (1/2 pi i) dz = r e^(i theta) d theta / 2 pi
    let sum: Complex = circle_nodes(centre, radius, n)
        .map(|(z, unit)| f(z) * unit)
        .sum();
    sum * (radius / n as f64)
}
