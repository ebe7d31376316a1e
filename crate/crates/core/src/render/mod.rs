//! Escape-time images of the dynamical and parameter planes, and real
//! bifurcation diagrams.

mod colour;
mod diagram;
mod dynamical;
mod parameter;
mod ppm;
mod spec;

pub use colour::{escape_ramp, step_fraction, zero_ramp, Rgb};
pub use diagram::{bifurcation_diagram, write_diagram_csv, BifurcationSpec, Control, DiagramRow, OrbitStatus};
pub use dynamical::{classify_orbit, render_dynamical_plane, DynamicalRender, PixelClass};
pub use parameter::{
    critical_points_complex, critical_points_f, render_parameter_plane, ParamPixelClass, ParamPlane, ParamRender,
};
pub use ppm::write_ppm;
pub use spec::{RenderSpec, Window};

use crate::error::{Error, Result};

/// Runs `job` on a dedicated pool of `threads` workers, or on the global
/// pool when `None`.
pub(crate) fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(0) => Err(Error::InputDomain("thread count must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}
