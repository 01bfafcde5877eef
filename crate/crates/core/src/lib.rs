//! Constrained directional enhancement filter.
//!
//! The crate covers the normative decoder-side pieces (direction search,
//! the constrained filter, parameter resolution and fixed-width signaling)
//! and an encoder-side search that picks filter presets for a frame.

pub mod apply;
pub mod bitstream;
pub mod direction;
pub mod error;
pub mod filter;
pub mod frame;
pub mod params;
pub mod search;
pub mod sidecar;
pub mod vectors;

pub use apply::{apply_frame_params, search_frame_directions, FrameDirections};
pub use bitstream::{pack, unpack, Bitstring};
pub use direction::{count_operations, search_direction, search_direction_oracle, DirectionResult, OpCounts};
pub use error::{CdefError, Result};
pub use filter::{adjust_primary_strength, constraint, filter_plane, filter_plane_reference, taps_for};
pub use frame::{partition, BlockGrid, Frame, Plane, PlaneKind, SkipMap, Subsampling};
pub use params::{resolve_effective, CdefPreset, FrameParams};
pub use search::{build_table, greedy_select, refine, select, DistortionTable, Metric, SearchConfig, Selection};
