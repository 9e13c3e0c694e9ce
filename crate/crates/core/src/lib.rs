//! Finite frame theory: frame operators and bounds, canonical tight and dual
//! transforms, basis-quality constants, Riesz subset extraction, and
//! generators for explicit frames and conditional bases.

pub mod cli;
pub mod error;
pub mod extraction;
pub mod frame;
pub mod gallery;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod selection;
pub mod sweep;
pub mod system;

pub use error::{Error, Result};
pub use extraction::{
    extract_biorthogonal, extract_frame, theoretical_bound, ExtractionMode, ExtractionTrace,
};
pub use frame::{
    canonical_dual_reconstruct, canonical_tight, check_counting_lemmas, frame_operator,
    frame_report, power_transform, FrameReport, DEFAULT_TOLERANCE,
};
pub use gallery::{generate, GallerySpec};
pub use metrics::{basis_metrics, riesz_constant, BasisMetrics, ExtReal};
pub use selection::{select_exhaustive, select_greedy, SelectionMethod, SelectionResult};
pub use system::VectorSystem;
