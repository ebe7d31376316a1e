//! Bifurcation values, closed-form and asymptotic fixed points, multipliers,
//! stability classes and Newton refinement.

use std::f64::consts::PI;

use crate::compensated::DoubleDouble;
use crate::error::{ensure_finite, ensure_finite_real, Error, Result};
use crate::maps::{validate_rates, Complex, EpsilonOffset, FMap, Family, GeneralCoeffs, GEpsMap, MapParams};

/// `||lambda| - 1|` below this is treated as indifferent.
pub const STABILITY_TOL: f64 = 1e-9;

/// `|g'(z) - 1|` below this makes the Newton map singular.
pub const NEWTON_SINGULAR_TOL: f64 = 1e-14;

/// Bifurcation values at fixed `(mu, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    pub mu: f64,
    pub gamma: f64,
    /// `1 - 2 sqrt(gamma / mu)`
    pub d_c: f64,
    /// `(1 - D_c) / 2`, the parabolic fixed point at the fold.
    pub x_c: f64,
}

impl CriticalValues {
    /// Critical growth rate as a function of `D`, at this `gamma`.
    pub fn mu_c(&self, d: f64) -> f64 {
        critical_mu(self.gamma, d)
    }

    /// Critical death rate as a function of `D`, at this `mu`.
    pub fn gamma_c(&self, d: f64) -> f64 {
        critical_gamma(self.mu, d)
    }
}

pub fn critical_values(mu: f64, gamma: f64) -> Result<CriticalValues> {
    validate_rates(mu, gamma)?;
    let ratio = gamma / mu;
    if ratio > 0.25 {
        return Err(Error::NoBifurcationInRange { ratio });
    }
    let root = ratio.sqrt();
    let d_c = 1.0 - 2.0 * root;
    // (1 - D_c) / 2 is sqrt(gamma / mu); using the root directly avoids the
    // rounding of 1 - D_c.
    Ok(CriticalValues {
        mu,
        gamma,
        d_c,
        x_c: root,
    })
}

/// `mu_c = 4 gamma / (1 - D)^2`, correctly rounded for the given inputs.
pub fn critical_mu(gamma: f64, d: f64) -> f64 {
    DoubleDouble::from_diff(1.0, d).square().recip_mul(4.0 * gamma)
}

/// `gamma_c = mu (1 - D)^2 / 4`.
pub fn critical_gamma(mu: f64, d: f64) -> f64 {
    let sq = DoubleDouble::from_diff(1.0, d).square();
    0.25 * (mu * sq.hi + mu * sq.lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Attracting,
    Repelling,
    Indifferent,
    /// Indifferent with multiplier 1.
    Parabolic,
}

impl Stability {
    pub fn of(multiplier: Complex) -> Self {
        let gap = multiplier.norm() - 1.0;
        if gap.abs() <= STABILITY_TOL {
            if (multiplier - 1.0).norm() <= STABILITY_TOL {
                Stability::Parabolic
            } else {
                Stability::Indifferent
            }
        } else if gap < 0.0 {
            Stability::Attracting
        } else {
            Stability::Repelling
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Attracting => "attracting",
            Stability::Repelling => "repelling",
            Stability::Indifferent => "indifferent",
            Stability::Parabolic => "parabolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointInfo {
    pub location: Complex,
    pub multiplier: Complex,
    pub stability: Stability,
    /// `|f(z*) - z*|`
    pub residual: f64,
}

impl FixedPointInfo {
    pub fn at<F: Family + ?Sized>(family: &F, location: Complex) -> Result<Self> {
        let multiplier = family.derivative(location)?;
        Ok(Self {
            location,
            multiplier,
            stability: Stability::of(multiplier),
            residual: family.displacement(location).norm(),
        })
    }
}

/// The two members of a bifurcating pair. For a real pair `plus` is the
/// larger; for a complex-conjugate pair `plus` has positive imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair<T> {
    pub minus: T,
    pub plus: T,
}

impl<T> Pair<T> {
    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> Pair<U> {
        Pair {
            minus: f(self.minus),
            plus: f(self.plus),
        }
    }
}

/// Fixed points of `F`: the origin and the pair `x_+-*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointsF {
    pub origin: FixedPointInfo,
    pub pair: Pair<FixedPointInfo>,
}

/// `x_+-* = ((1 - D) +- sqrt((1 - D)^2 - 4 gamma / mu)) / 2`.
///
/// The discriminant is formed as a product of `(1 - D) - 2 sqrt(gamma/mu)`
/// and `(1 - D) + 2 sqrt(gamma/mu)`, and snapped to zero when the small
/// factor is below rounding of its operands.
pub fn fixed_points_f(params: MapParams) -> Result<FixedPointsF> {
    let MapParams { mu, gamma, d } = params;
    let f = FMap::new(params);
    let half = 0.5 * (1.0 - d);
    let root = (gamma / mu).sqrt();
    let small = half - root;
    let noise = 4.0 * f64::EPSILON * half.abs().max(root);
    let small = if small.abs() <= noise { 0.0 } else { small };
    // (1-D)^2/4 - gamma/mu
    let quarter_disc = small * (half + root);
    let (minus, plus) = if quarter_disc >= 0.0 {
        let s = quarter_disc.sqrt();
        (Complex::new(half - s, 0.0), Complex::new(half + s, 0.0))
    } else {
        let s = (-quarter_disc).sqrt();
        (Complex::new(half, -s), Complex::new(half, s))
    };
    Ok(FixedPointsF {
        origin: FixedPointInfo::at(&f, Complex::new(0.0, 0.0))?,
        pair: Pair {
            minus: FixedPointInfo::at(&f, minus)?,
            plus: FixedPointInfo::at(&f, plus)?,
        },
    })
}

/// Closed-form `y_+-(eps) = -eps/2 +- sqrt(-x_c eps + eps^2/4)` with multipliers
/// of `G_eps`.
pub fn fixed_points_g(mu: f64, gamma: f64, eps: EpsilonOffset) -> Result<Pair<FixedPointInfo>> {
    let crit = critical_values(mu, gamma)?;
    let g = GEpsMap::from_critical(crit, eps);
    let loc = centred_pair(crit.x_c, eps.value());
    Ok(Pair {
        minus: FixedPointInfo::at(&g, loc.minus)?,
        plus: FixedPointInfo::at(&g, loc.plus)?,
    })
}

pub(crate) fn centred_pair(x_c: f64, e: f64) -> Pair<Complex> {
    let quarter = e * (0.25 * e - x_c);
    let centre = -0.5 * e;
    if quarter >= 0.0 {
        let s = quarter.sqrt();
        Pair {
            minus: Complex::new(centre - s, 0.0),
            plus: Complex::new(centre + s, 0.0),
        }
    } else {
        let s = (-quarter).sqrt();
        Pair {
            minus: Complex::new(centre, -s),
            plus: Complex::new(centre, s),
        }
    }
}

/// Leading-order multipliers `1 -+ 2 i mu x_c^(3/2) eps^(1/2)` for `eps > 0`.
/// First order only; the exact values come from [`fixed_points_g`].
pub fn multiplier_expansion_g(mu: f64, gamma: f64, eps: EpsilonOffset) -> Result<Pair<Complex>> {
    let e = eps.value();
    if e <= 0.0 {
        return Err(Error::InputDomain(format!(
            "leading-order multiplier expansion needs eps > 0, got {e}; use the exact multiplier"
        )));
    }
    let crit = critical_values(mu, gamma)?;
    let im = 2.0 * mu * crit.x_c.powf(1.5) * e.sqrt();
    Ok(Pair {
        minus: Complex::new(1.0, im),
        plus: Complex::new(1.0, -im),
    })
}

/// Leading term of one fixed point of `H_eps` near the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFixedPointH {
    /// `+-sqrt(-(a/c) eps^n)`
    pub leading: Complex,
    /// `n / 2`
    pub order_exponent: f64,
    /// Lower bound on the exponent `t` of the `O(eps^(n/2 + t))` remainder,
    /// when one is known (`1/2` for `n = 1`).
    pub error_exponent_t: Option<f64>,
}

fn check_asymptotic(coeffs: &GeneralCoeffs, eps: f64) -> Result<()> {
    coeffs.validate()?;
    EpsilonOffset::new(eps)?;
    if eps == 0.0 {
        return Err(Error::InputDomain(
            "asymptotic fixed points need eps != 0".into(),
        ));
    }
    Ok(())
}

/// Two fixed points of `H_eps` near the origin, leading order.
///
/// For `a, c < 0` the pair is real when `eps < 0` and `+-i sqrt(a/c) eps^(n/2)`
/// when `eps > 0`. Other sign combinations go through the same surd; those
/// are experimental.
pub fn asymptotic_fixed_points_h(
    coeffs: &GeneralCoeffs,
    eps: f64,
) -> Result<Pair<AsymptoticFixedPointH>> {
    check_asymptotic(coeffs, eps)?;
    let q = -(coeffs.a / coeffs.c) * eps.powi(coeffs.n as i32);
    let root = if q >= 0.0 {
        Complex::new(q.sqrt(), 0.0)
    } else {
        Complex::new(0.0, (-q).sqrt())
    };
    let point = |leading| AsymptoticFixedPointH {
        leading,
        order_exponent: 0.5 * coeffs.n as f64,
        error_exponent_t: (coeffs.n == 1).then_some(0.5),
    };
    Ok(Pair {
        minus: point(-root),
        plus: point(root),
    })
}

/// Leading-order multipliers `1 + 2 c x_+-` at the asymptotic fixed points;
/// for `a, c < 0`, `eps > 0` this is `1 -+ 2 i sqrt(a c) eps^(n/2)`.
pub fn multiplier_asymptotic_h(coeffs: &GeneralCoeffs, eps: f64) -> Result<Pair<Complex>> {
    let pts = asymptotic_fixed_points_h(coeffs, eps)?;
    Ok(pts.map(|p| 1.0 + 2.0 * coeffs.c * p.leading))
}

/// Newton iteration on `g(z) - z` from `seed`.
pub fn refine_fixed_point<F: Family + ?Sized>(
    family: &F,
    seed: Complex,
    tol: f64,
    max_steps: usize,
) -> Result<FixedPointInfo> {
    ensure_finite(seed, "seed")?;
    ensure_finite_real(tol, "tol")?;
    if tol <= 0.0 {
        return Err(Error::InputDomain(format!("tol must be > 0, got {tol}")));
    }
    let mut z = seed;
    let mut residual = family.displacement(z).norm();
    for _ in 0..max_steps {
        if residual < tol {
            return FixedPointInfo::at(family, z);
        }
        let gap = 1.0 - family.derivative(z)?;
        if gap.norm() < NEWTON_SINGULAR_TOL {
            return Err(Error::NewtonSingular {
                at: z,
                gap: gap.norm(),
            });
        }
        z -= family.displacement(z) / gap;
        if !(z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        residual = family.displacement(z).norm();
    }
    if residual < tol {
        return FixedPointInfo::at(family, z);
    }
    Err(Error::NoConvergence {
        last: z,
        residual,
        steps: max_steps,
    })
}

/// `pi / (sqrt(a c) eps^(n/2))`, the leading passage-time term for `H_eps`
/// with `a, c` of equal sign and `eps > 0`.
pub(crate) fn general_passage_leading(coeffs: &GeneralCoeffs, eps: f64) -> Result<f64> {
    check_asymptotic(coeffs, eps)?;
    let ac = coeffs.a * coeffs.c;
    if ac <= 0.0 || eps <= 0.0 {
        return Err(Error::InputDomain(format!(
            "general scaling needs a c > 0 and eps > 0 (a c = {ac}, eps = {eps})"
        )));
    }
    Ok(PI / (ac.sqrt() * eps.powf(0.5 * coeffs.n as f64)))
}
