//! The map families: the ecological cubic `F`, its unfolding `F_eps` around
//! the fold, the centred conjugate `G_eps`, and the general saddle-node
//! family `H_eps` with caller-supplied analytic tails.
//!
//! Every family is a [`Family`]: an immutable handle that evaluates the map
//! and its analytic derivative on complex arguments. Polynomial families store
//! their monomial coefficients pre-expanded so that one iterate is a Horner
//! pass.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure_finite, ensure_finite_real, Error, Result};
use crate::fixed_points::{critical_values, CriticalValues};

pub type Complex = Complex64;

/// A holomorphic map of one complex variable.
///
/// `eval` is the unchecked hot-path evaluation used by orbit iteration;
/// `try_eval` validates its argument first.
pub trait Family: Send + Sync {
    fn eval(&self, z: Complex) -> Complex;

    /// Exact analytic derivative.
    fn derivative(&self, z: Complex) -> Result<Complex>;

    /// `z - f(z)`. Families that know a better-conditioned form near their
    /// fixed points override this.
    fn displacement(&self, z: Complex) -> Complex {
        z - self.eval(z)
    }

    fn try_eval(&self, z: Complex) -> Result<Complex> {
        ensure_finite(z, "z")?;
        Ok(self.eval(z))
    }
}

impl<T: Family + ?Sized> Family for &T {
    fn eval(&self, z: Complex) -> Complex {
        (**self).eval(z)
    }
    fn derivative(&self, z: Complex) -> Result<Complex> {
        (**self).derivative(z)
    }
    fn displacement(&self, z: Complex) -> Complex {
        (**self).displacement(z)
    }
}

/// `c0 + c1 z + c2 z^2 + c3 z^3` with real coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Cubic {
    #[inline(always)]
    pub fn eval_real(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }
}

impl Family for Cubic {
    #[inline(always)]
    fn eval(&self, z: Complex) -> Complex {
        ((z * self.c3 + self.c2) * z + self.c1) * z + self.c0
    }

    fn derivative(&self, z: Complex) -> Result<Complex> {
        Ok((z * (3.0 * self.c3) + 2.0 * self.c2) * z + self.c1)
    }
}

/// `c0 + c1 z + c2 z^2 + c3 z^3` with complex coefficients; used when a
/// parameter of `F` is itself complexified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexCubic {
    pub c0: Complex,
    pub c1: Complex,
    pub c2: Complex,
    pub c3: Complex,
}

impl Family for ComplexCubic {
    #[inline(always)]
    fn eval(&self, z: Complex) -> Complex {
        ((self.c3 * z + self.c2) * z + self.c1) * z + self.c0
    }

    fn derivative(&self, z: Complex) -> Result<Complex> {
        Ok((self.c3 * 3.0 * z + self.c2 * 2.0) * z + self.c1)
    }
}

/// Growth rate `mu`, death rate `gamma` and destroyed-habitat fraction `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub mu: f64,
    pub gamma: f64,
    pub d: f64,
}

impl MapParams {
    pub fn new(mu: f64, gamma: f64, d: f64) -> Result<Self> {
        validate_rates(mu, gamma)?;
        ensure_finite_real(d, "D")?;
        Ok(Self { mu, gamma, d })
    }
}

pub(crate) fn validate_rates(mu: f64, gamma: f64) -> Result<()> {
    ensure_finite_real(mu, "mu")?;
    ensure_finite_real(gamma, "gamma")?;
    if mu <= 0.0 {
        return Err(Error::InputDomain(format!("mu must be > 0, got {mu}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InputDomain(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    Ok(())
}

/// Signed distance `eps = D - D_c` from the fold.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EpsilonOffset(f64);

impl EpsilonOffset {
    pub fn new(eps: f64) -> Result<Self> {
        ensure_finite_real(eps, "eps")?;
        if eps.abs() >= 1.0 {
            return Err(Error::InputDomain(format!("|eps| must be < 1, got {eps}")));
        }
        Ok(Self(eps))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for EpsilonOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The population map `F(z) = z + mu z^2 (1 - D - z) - gamma z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FMap {
    params: MapParams,
    poly: Cubic,
}

impl FMap {
    pub fn new(params: MapParams) -> Self {
        let MapParams { mu, gamma, d } = params;
        Self {
            params,
            poly: Cubic {
                c0: 0.0,
                c1: 1.0 - gamma,
                c2: mu * (1.0 - d),
                c3: -mu,
            },
        }
    }

    pub fn params(&self) -> MapParams {
        self.params
    }

    pub fn cubic(&self) -> Cubic {
        self.poly
    }
}

impl Family for FMap {
    #[inline(always)]
    fn eval(&self, z: Complex) -> Complex {
        self.poly.eval(z)
    }

    fn derivative(&self, z: Complex) -> Result<Complex> {
        self.poly.derivative(z)
    }
}

/// `F` at `D = D_c + eps`, written around the parabolic point `x_c`:
/// `F_eps(x) = (1 - gamma) x + mu (2 x_c - eps) x^2 - mu x^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FEpsMap {
    critical: CriticalValues,
    eps: f64,
    poly: Cubic,
    centred: GEpsMap,
}

impl FEpsMap {
    pub fn new(mu: f64, gamma: f64, eps: EpsilonOffset) -> Result<Self> {
        let critical = critical_values(mu, gamma)?;
        Ok(Self::from_critical(critical, eps))
    }

    pub fn from_critical(critical: CriticalValues, eps: EpsilonOffset) -> Self {
        let CriticalValues { mu, gamma, x_c, .. } = critical;
        let e = eps.value();
        Self {
            critical,
            eps: e,
            poly: Cubic {
                c0: 0.0,
                c1: 1.0 - gamma,
                c2: mu * (2.0 * x_c - e),
                c3: -mu,
            },
            centred: GEpsMap::from_critical(critical, eps),
        }
    }

    pub fn critical(&self) -> CriticalValues {
        self.critical
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn x_c(&self) -> f64 {
        self.critical.x_c
    }

    pub fn cubic(&self) -> Cubic {
        self.poly
    }

    /// The conjugate `G_eps(y) = F_eps(y + x_c) - x_c`.
    pub fn centred(&self) -> &GEpsMap {
        &self.centred
    }

    /// The same map with `D` given explicitly.
    pub fn as_f(&self) -> FMap {
        FMap::new(MapParams {
            mu: self.critical.mu,
            gamma: self.critical.gamma,
            d: self.critical.d_c + self.eps,
        })
    }
}

impl Family for FEpsMap {
    #[inline(always)]
    fn eval(&self, z: Complex) -> Complex {
        self.poly.eval(z)
    }

    fn derivative(&self, z: Complex) -> Result<Complex> {
        self.poly.derivative(z)
    }

    /// Evaluated in the centred frame: near `x_c` the uncentred form loses
    /// every digit of `z - F(z)` that sits below `ulp(x_c)`.
    fn displacement(&self, z: Complex) -> Complex {
        self.centred.displacement(z - self.critical.x_c)
    }
}

/// `G_eps(y) = -mu x_c^2 eps + (1 - 2 mu x_c eps) y - mu (x_c + eps) y^2 - mu y^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GEpsMap {
    poly: Cubic,
    /// `y - G_eps(y)`, kept separately so the linear coefficient is not
    /// formed as `1 - (1 - 2 mu x_c eps)`.
    disp: Cubic,
}

impl GEpsMap {
    pub fn new(mu: f64, gamma: f64, eps: EpsilonOffset) -> Result<Self> {
        Ok(Self::from_critical(critical_values(mu, gamma)?, eps))
    }

    pub fn from_critical(critical: CriticalValues, eps: EpsilonOffset) -> Self {
        let CriticalValues { mu, x_c, .. } = critical;
        let e = eps.value();
        let poly = Cubic {
            c0: -mu * x_c * x_c * e,
            c1: 1.0 - 2.0 * mu * x_c * e,
            c2: -mu * (x_c + e),
            c3: -mu,
        };
        let disp = Cubic {
            c0: mu * x_c * x_c * e,
            c1: 2.0 * mu * x_c * e,
            c2: mu * (x_c + e),
            c3: mu,
        };
        Self { poly, disp }
    }

    pub fn cubic(&self) -> Cubic {
        self.poly
    }
}

impl Family for GEpsMap {
    #[inline(always)]
    fn eval(&self, z: Complex) -> Complex {
        self.poly.eval(z)
    }

    fn derivative(&self, z: Complex) -> Result<Complex> {
        self.poly.derivative(z)
    }

    fn displacement(&self, z: Complex) -> Complex {
        self.disp.eval(z)
    }
}

pub type ScalarTail = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Remainder = Arc<dyn Fn(Complex, f64) -> Complex + Send + Sync>;

/// Coefficients of the general saddle-node family
///
/// `H_eps(z) = (a eps^n + t0(eps)) + (1 + t1(eps)) z + (c + t2(eps)) z^2 + R(z, eps)`
///
/// where `t0 = O(eps^(n+1))`, `t1 = O(eps^m)`, `t2 = O(eps)` and
/// `R = O(z^3)`. Absent tails are identically zero.
#[derive(Clone)]
pub struct GeneralCoeffs {
    pub a: f64,
    pub c: f64,
    pub n: u32,
    pub m: u32,
    tail_eps: Option<ScalarTail>,
    tail_lin: Option<ScalarTail>,
    tail_quad: Option<ScalarTail>,
    cubic_plus: Option<Remainder>,
    cubic_plus_deriv: Option<Remainder>,
}

impl fmt::Debug for GeneralCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralCoeffs")
            .field("a", &self.a)
            .field("c", &self.c)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("tail_eps", &self.tail_eps.is_some())
            .field("tail_lin", &self.tail_lin.is_some())
            .field("tail_quad", &self.tail_quad.is_some())
            .field("cubic_plus", &self.cubic_plus.is_some())
            .finish()
    }
}

impl GeneralCoeffs {
    /// A non-degenerate family with zero tails.
    pub fn new(a: f64, c: f64, n: u32, m: u32) -> Result<Self> {
        let coeffs = Self::unchecked(a, c, n, m);
        coeffs.validate()?;
        Ok(coeffs)
    }

    /// No validation; used for the degenerate presets.
    pub(crate) fn unchecked(a: f64, c: f64, n: u32, m: u32) -> Self {
        Self {
            a,
            c,
            n,
            m,
            tail_eps: None,
            tail_lin: None,
            tail_quad: None,
            cubic_plus: None,
            cubic_plus_deriv: None,
        }
    }

    /// Checks `a, c != 0`, `n` odd and `n < 2m`.
    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.c.is_finite()) || self.a == 0.0 || self.c == 0.0 {
            return Err(Error::DegenerateFamily(format!(
                "a and c must be finite and nonzero (a = {}, c = {})",
                self.a, self.c
            )));
        }
        if self.n % 2 == 0 {
            return Err(Error::DegenerateFamily(format!(
                "n = {} is even; the fixed points do not change character across eps = 0",
                self.n
            )));
        }
        if self.m == 0 || self.n >= 2 * self.m {
            return Err(Error::DegenerateFamily(format!(
                "need n < 2m, got n = {}, m = {}",
                self.n, self.m
            )));
        }
        Ok(())
    }

    pub fn with_tail_eps(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.tail_eps = Some(Arc::new(f));
        self
    }

    pub fn with_tail_lin(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.tail_lin = Some(Arc::new(f));
        self
    }

    pub fn with_tail_quad(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.tail_quad = Some(Arc::new(f));
        self
    }

    /// The `O(z^3)` remainder, without a derivative. Families built this way
    /// can be iterated but not differentiated.
    pub fn with_cubic_plus(
        mut self,
        f: impl Fn(Complex, f64) -> Complex + Send + Sync + 'static,
    ) -> Self {
        self.cubic_plus = Some(Arc::new(f));
        self.cubic_plus_deriv = None;
        self
    }

    /// The `O(z^3)` remainder together with its `z`-derivative.
    pub fn with_cubic_plus_and_derivative(
        mut self,
        f: impl Fn(Complex, f64) -> Complex + Send + Sync + 'static,
        df: impl Fn(Complex, f64) -> Complex + Send + Sync + 'static,
    ) -> Self {
        self.cubic_plus = Some(Arc::new(f));
        self.cubic_plus_deriv = Some(Arc::new(df));
        self
    }

    /// `(constant, linear, quadratic)` coefficients at this `eps`.
    pub fn low_order(&self, eps: f64) -> (f64, f64, f64) {
        let t = |tail: &Option<ScalarTail>| tail.as_ref().map_or(0.0, |f| f(eps));
        (
            self.a * powi(eps, self.n) + t(&self.tail_eps),
            1.0 + t(&self.tail_lin),
            self.c + t(&self.tail_quad),
        )
    }

    /// `G_eps` written as a member of this family: `a = -mu x_c^2`,
    /// `c = -mu x_c`, `n = m = 1`.
    pub fn from_centred_cubic(critical: CriticalValues) -> Self {
        let CriticalValues { mu, x_c, .. } = critical;
        Self::unchecked(-mu * x_c * x_c, -mu * x_c, 1, 1)
            .with_tail_lin(move |e| -2.0 * mu * x_c * e)
            .with_tail_quad(move |e| -mu * e)
            .with_cubic_plus_and_derivative(move |z, _| -mu * z * z * z, move |z, _| -3.0 * mu * z * z)
    }
}

fn powi(x: f64, n: u32) -> f64 {
    x.powi(n as i32)
}

/// A member `H_eps` of a [`GeneralCoeffs`] family at fixed `eps`.
#[derive(Clone, Debug)]
pub struct HMap {
    coeffs: GeneralCoeffs,
    eps: f64,
    k0: f64,
    k1: f64,
    k2: f64,
}

impl HMap {
    /// `eps` is not required to be small; evaluation is exact for any value.
    pub fn new(coeffs: GeneralCoeffs, eps: f64) -> Result<Self> {
        ensure_finite_real(eps, "eps")?;
        let (k0, k1, k2) = coeffs.low_order(eps);
        for (k, name) in [(k0, "constant"), (k1, "linear"), (k2, "quadratic")] {
            ensure_finite_real(k, name)?;
        }
        Ok(Self {
            coeffs,
            eps,
            k0,
            k1,
            k2,
        })
    }

    pub fn coeffs(&self) -> &GeneralCoeffs {
        &self.coeffs
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl Family for HMap {
    #[inline]
    fn eval(&self, z: Complex) -> Complex {
        let quad = (z * self.k2 + self.k1) * z + self.k0;
        match &self.coeffs.cubic_plus {
            Some(r) => quad + r(z, self.eps),
            None => quad,
        }
    }

    fn derivative(&self, z: Complex) -> Result<Complex> {
        let lin = z * (2.0 * self.k2) + self.k1;
        match (&self.coeffs.cubic_plus, &self.coeffs.cubic_plus_deriv) {
            (None, _) => Ok(lin),
            (Some(_), Some(dr)) => Ok(lin + dr(z, self.eps)),
            (Some(_), None) => Err(Error::Unsupported(
                "H family has an O(z^3) remainder without a derivative callback".into(),
            )),
        }
    }

    fn displacement(&self, z: Complex) -> Complex {
        // z - H(z) = -k0 - (k1 - 1) z - k2 z^2 - R(z); the tail_lin term is
        // the exact value of k1 - 1.
        let lin_minus_one = self.coeffs.tail_lin.as_ref().map_or(0.0, |f| f(self.eps));
        let mut d = -((z * self.k2 + lin_minus_one) * z + self.k0);
        if let Some(r) = &self.coeffs.cubic_plus {
            d -= r(z, self.eps);
        }
        d
    }
}

/// The three families that fail the non-degeneracy conditions:
///
/// * `h1 = eps^2 + (1 + 2 eps) x + x^2`: permanent parabolic point at `-eps`,
/// * `h2 = eps^2 + x + x^2`: fixed points `+-i eps` for every `eps != 0`,
/// * `h3 = eps^3 + (1 + eps) x + x^2`: real fixed points on both sides.
#[derive(Clone, Debug)]
pub struct DegeneratePresets {
    pub h1: GeneralCoeffs,
    pub h2: GeneralCoeffs,
    pub h3: GeneralCoeffs,
}

pub fn degenerate_presets() -> DegeneratePresets {
    DegeneratePresets {
        h1: GeneralCoeffs::unchecked(1.0, 1.0, 2, 1).with_tail_lin(|e| 2.0 * e),
        // no linear tail at all; m is nominal
        h2: GeneralCoeffs::unchecked(1.0, 1.0, 2, 2),
        h3: GeneralCoeffs::unchecked(1.0, 1.0, 3, 1).with_tail_lin(|e| e),
    }
}
