//! Iterated cubic maps past a saddle-node fold: fixed points, ghost passage
//! times, holomorphic indices and basin renderings.

mod compensated;
pub mod error;
pub mod fixed_points;
pub mod maps;
pub mod orbit;
pub mod quadrature;
pub mod render;
pub mod transient;

pub use error::{Error, Result};
pub use fixed_points::{
    asymptotic_fixed_points_h, critical_gamma, critical_mu, critical_values, fixed_points_f, fixed_points_g,
    multiplier_asymptotic_h, multiplier_expansion_g, refine_fixed_point, AsymptoticFixedPointH, CriticalValues,
    FixedPointInfo, FixedPointsF, Pair, Stability,
};
pub use maps::{
    degenerate_presets, Complex, ComplexCubic, Cubic, DegeneratePresets, EpsilonOffset, FEpsMap, FMap, Family,
    GEpsMap, GeneralCoeffs, HMap, MapParams,
};
pub use orbit::{orbit_fate, FateKind, OrbitFate, Thresholds};
pub use transient::{
    channel_width, fit_scaling, holomorphic_index_numeric, measure_passage, passage_integral, predicted_iterates,
    ChannelWidth, ContourSpec, IndexEstimate, PassageWindow, ScalingFit, TransientMeasurement,
};
pub use render::{
    bifurcation_diagram, classify_orbit, critical_points_f, render_dynamical_plane, render_parameter_plane,
    BifurcationSpec, Control, DynamicalRender, ParamPixelClass, ParamPlane, PixelClass, RenderSpec, Window,
};
