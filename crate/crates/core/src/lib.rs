//! Random-walk sampling and total-variation recovery of clustered graph
//! signals.
//!
//! * [`graph`]: graphs, incidence operator, total variation, partitions
//! * [`synth`]: assortative planted partition graphs and clustered signals
//! * [`sampling`]: random-walk and uniform sampling sets, recovery condition
//! * [`slp`]: sparse label propagation solver and NMSE
//! * [`experiments`]: Monte-Carlo harness with CSV output
//! * [`io`]: edge-list/CSV formats and subgraph extraction
//! * [`cli`]: the `rwslp` command line

pub mod cli;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod rng;
pub mod sampling;
pub mod slp;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{clustered_signal, EdgeSignal, Graph, GraphSignal, Partition};
pub use rng::RngSeed;
pub use sampling::{NullspaceReport, SamplingSet, WalkConfig};
pub use slp::{SlpConfig, SlpResult};
pub use synth::AppmSpec;
