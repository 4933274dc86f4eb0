//! Mode-specific normalization of continuous columns.
//!
//! Each continuous value is represented by a one-hot indicator `beta` of a
//! mixture mode sampled in proportion to `weight_k * N(value; mean_k, std_k)`
//! and a scalar `alpha = (value - mean_k) / (4 std_k)`, clamped to `[-1, 1]`
//! to match the generator's tanh range.

mod encode;
mod vgm;

pub use encode::{
    argmax, decode_value, encode_value, encode_with_mode, mode_probabilities, raw_alpha,
    select_mode, ColumnTransform, EncodedValue, RowEncoder, RowLayout, Segment, UNDERFLOW_FLOOR,
};
pub use vgm::{fit_vgm, fit_vgm_with, ColumnModeModel, Mode, VgmConfig};
