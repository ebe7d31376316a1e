//! Ghost passage: direct iteration counts, multiplier-based predictions, the
//! holomorphic index by contour quadrature, scaling-law fits and the width
//! of the channel between the complex repellers.

mod channel;
mod fit;
mod index;
mod passage;

pub use channel::{channel_width, default_channel_budget, ChannelWidth, SCAN_STEPS_PER_EPS};
pub use fit::{fit_scaling, ScalingFit};
pub use index::{holomorphic_index_numeric, ContourSpec, IndexEstimate, MAX_NODES, MIN_NODES};
pub use passage::{
    general_scaling_prediction, measure_passage, passage_decomposition, passage_integral,
    predicted_iterates, theorem_prediction, PassageDecomposition, PassageWindow,
    TransientMeasurement, DEFAULT_DELTA,
};
