//! Error-free transformations for the few places where a formula must be
//! correctly rounded rather than merely accurate.

/// `a + b = s + err` exactly.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// `a * b = p + err` exactly.
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn from_diff(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, -b);
        Self { hi, lo }
    }

    pub fn square(self) -> Self {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = e + 2.0 * self.hi * self.lo;
        let (hi, lo) = two_sum(p, e);
        Self { hi, lo }
    }

    /// `num / self`, rounded once.
    pub fn recip_mul(self, num: f64) -> f64 {
        let q = num / self.hi;
        // num - q * (hi + lo), with the q*hi product taken exactly
        let (p, pe) = two_prod(q, self.hi);
        let r = ((num - p) - pe) - q * self.lo;
        q + r / self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
    }

    #[test]
    fn square_of_difference_keeps_low_bits() {
        // 1 - 0.2 is not exactly 0.8 in binary; the lost bits must survive.
        let d = DoubleDouble::from_diff(1.0, 0.2);
        assert_eq!(d.hi, 0.8);
        assert!(d.lo != 0.0);
        let sq = d.square();
        assert!((sq.hi - 0.64).abs() < 1e-16);
    }
}
