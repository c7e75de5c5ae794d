//! Recovers the multidimensional layout (image width and height, voxel
//! dimensions) in which a linear bit stream was originally encoded, by
//! sweeping candidate layouts and picking those of lowest estimated
//! algorithmic complexity.
//!
//! * [`ctm`] enumerates small Turing machines into complexity tables.
//! * [`measures`] scores strings and grids (block entropy, LZ78 length, BDM).
//! * [`partition`] enumerates layouts, sweeps them and finds downward spikes.
//! * [`perturb`] perturbs streams and grids and records response curves.
//! * [`codec`] reads and writes text, PBM and bit files.
//! * [`cli`] implements the `dimdecon` command line.

pub mod bits;
pub mod cli;
pub mod codec;
pub mod ctm;
pub mod error;
pub mod measures;
pub mod partition;
pub mod perturb;

pub use bits::{BitString, Grid};
pub use ctm::{CtmTable, MachineClass};
pub use error::{Error, Result};
pub use measures::{ComplexityScore, Measure, Scorer};
pub use partition::{PartitionCandidate, ScoreSeries, SpikeReport};
