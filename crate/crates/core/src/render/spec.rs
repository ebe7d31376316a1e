use crate::error::{ensure_finite_real, Error, Result};
use crate::maps::Complex;
use crate::orbit::Thresholds;

/// Rectangle `[re_min, re_max] x [im_min, im_max]` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        for (v, name) in [(re_min, "re_min"), (re_max, "re_max"), (im_min, "im_min"), (im_max, "im_max")] {
            ensure_finite_real(v, name)?;
        }
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::InputDomain(format!(
                "empty window [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    /// Square-ish window of half-widths `re_half`, `im_half` around `centre`.
    pub fn around(centre: Complex, re_half: f64, im_half: f64) -> Result<Self> {
        Self::new(centre.re - re_half, centre.re + re_half, centre.im - im_half, centre.im + im_half)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub budget: u64,
    pub thresholds: Thresholds,
}

impl RenderSpec {
    pub fn new(window: Window, width: usize, height: usize, budget: u64) -> Result<Self> {
        Self::with_thresholds(window, width, height, budget, Thresholds::default())
    }

    pub fn with_thresholds(
        window: Window,
        width: usize,
        height: usize,
        budget: u64,
        thresholds: Thresholds,
    ) -> Result<Self> {
        let window = Window::new(window.re_min, window.re_max, window.im_min, window.im_max)?;
        if width == 0 || height == 0 {
            return Err(Error::InputDomain(format!("grid {width}x{height} has no pixels")));
        }
        if !(thresholds.convergence > 0.0 && thresholds.convergence < thresholds.escape) {
            return Err(Error::InputDomain(format!(
                "need 0 < convergence < escape, got {} and {}",
                thresholds.convergence, thresholds.escape
            )));
        }
        Ok(Self { window, width, height, budget, thresholds })
    }

    /// Centre of pixel `(i, j)`; `j = 0` is the top row.
    ///
    /// Offsets are taken from the window centre so that rows equidistant
    /// from it get coordinates that differ only in sign.
    pub fn pixel_centre(&self, i: usize, j: usize) -> Complex {
        let w = &self.window;
        let dx = (w.re_max - w.re_min) / self.width as f64;
        let dy = (w.im_max - w.im_min) / self.height as f64;
        let re_c = 0.5 * (w.re_min + w.re_max);
        let im_c = 0.5 * (w.im_min + w.im_max);
        let u = i as f64 - 0.5 * self.width as f64 + 0.5;
        let v = 0.5 * self.height as f64 - j as f64 - 0.5;
        Complex::new(re_c + u * dx, im_c + v * dy)
    }

    /// Pixel whose cell contains `z`, if inside the window.
    pub fn pixel_of(&self, z: Complex) -> Option<(usize, usize)> {
        let w = &self.window;
        let fx = (z.re - w.re_min) / (w.re_max - w.re_min) * self.width as f64;
        let fy = (w.im_max - z.im) / (w.im_max - w.im_min) * self.height as f64;
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }
}
