use crate::error::{Error, Result};

/// `N(eps) ~ prefactor * eps^exponent + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// Slope in `eps`; about `-1/2` for a simple fold.
    pub exponent: f64,
    pub prefactor: f64,
    pub offset: f64,
    /// `(eps, N)` sorted by `eps` descending.
    pub samples: Vec<(f64, f64)>,
    /// Root mean square of the residuals of `ln(N - offset)`.
    pub residual_rms: f64,
}

impl ScalingFit {
    pub fn predict(&self, eps: f64) -> f64 {
        self.prefactor * eps.powf(self.exponent) + self.offset
    }
}

const MIN_SAMPLES: usize = 5;
const MIN_DECADES: f64 = 2.0;
const MAX_ROUNDS: usize = 500;

/// Returns slope, intercept and rms residual of `ln(N - k)` against `ln eps`.
fn regression(samples: &[(f64, f64)], k: f64) -> Result<(f64, f64, f64)> {
    let m = samples.len() as f64;
    let mut pts = Vec::with_capacity(samples.len());
    for &(e, n) in samples {
        if n <= k {
            return Err(Error::FitDegenerate(format!(
                "sample (eps = {e:e}, N = {n}) does not exceed the offset estimate {k}"
            )));
        }
        pts.push((e.ln(), (n - k).ln()));
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx).powi(2), b + (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok((slope, intercept, (rss / m).sqrt()))
}

/// Offset consistent with the two smallest-`N` samples at a given slope.
fn offset_from_pair(p: f64, (e1, n1): (f64, f64), (e2, n2): (f64, f64)) -> Result<f64> {
    let (x1, x2) = (e1.powf(p), e2.powf(p));
    if x1 == x2 {
        return Err(Error::FitDegenerate("offset pair shares one eps".into()));
    }
    let a = (n1 - n2) / (x1 - x2);
    Ok(n1 - a * x1)
}

/// Fits `N = A eps^p + K` to `(eps, N)` samples.
///
/// `K` is set so the model passes through the two smallest-`N` samples, `p`
/// and `A` come from regressing `ln(N - K)` on `ln eps`, and the two steps
/// alternate until `p` settles.
pub fn fit_scaling(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "{} samples, need at least {MIN_SAMPLES}",
            samples.len()
        )));
    }
    for &(e, n) in samples {
        if !(e > 0.0 && e.is_finite() && n > 0.0 && n.is_finite()) {
            return Err(Error::InputDomain(format!(
                "samples need finite eps > 0 and N > 0, got ({e}, {n})"
            )));
        }
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let decades = (sorted[0].0 / sorted[sorted.len() - 1].0).log10();
    if decades < MIN_DECADES {
        return Err(Error::InsufficientSamples(format!(
            "samples span {decades:.2} decades of eps, need {MIN_DECADES}"
        )));
    }
    let mut by_n = sorted.clone();
    by_n.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (s1, s2) = (by_n[0], by_n[1]);

    let (mut p, _, _) = regression(&sorted, 0.0)?;
    let mut k = 0.0;
    for _ in 0..MAX_ROUNDS {
        k = offset_from_pair(p, s1, s2)?;
        let (next, _, _) = regression(&sorted, k)?;
        if !next.is_finite() {
            return Err(Error::FitDegenerate("non-finite slope".into()));
        }
        let done = (next - p).abs() < 1e-13;
        p = next;
        if done {
            break;
        }
    }
    let (exponent, intercept, residual_rms) = regression(&sorted, k)?;
    Ok(ScalingFit {
        exponent,
        prefactor: intercept.exp(),
        offset: k,
        samples: sorted,
        residual_rms,
    })
}
