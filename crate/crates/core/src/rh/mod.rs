//! Additive Riemann-Hilbert reconstruction of `Li_k` on the strip
//! `0 < Re z < 1`.
//!
//! The derivative of the inversion relation fixes the jump
//! `g'_k = h_plus + h_minus` across the strip. Splitting it by Cauchy
//! integrals over two vertical lines, identifying `h_plus` by Liouville,
//! integrating, and fixing the constants from `zeta(k)` rebuilds `Li_k` from
//! `Li_{k-1}`.

mod contour;
mod handle;
mod ladder;
mod split;

pub use contour::{ContourSpec, LineGrid, QuadratureRule};
pub use handle::FunctionHandle;
pub use ladder::{
    default_test_points, reconstruct, reconstruct_all, JumpMode, LevelDiagnostics,
    Reconstruction, ReconstructionConfig, ReconstructionReport, SampleError,
    DEFAULT_DEFECT_CEILING, DEFAULT_PROBE,
};
pub use split::{
    antiderivative_plus, fix_c_minus, fix_c_minus_with, identify_liouville, jump_derivative,
    minus_jump_part, plemelj_split, zero_jump_check, Antiderivative, SplitOptions, SplitResult,
};
