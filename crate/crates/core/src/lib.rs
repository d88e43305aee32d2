//! Variable-length coding over two-user discrete memoryless multiple-access
//! channels.
//!
//! All information quantities are in nats unless a name says otherwise.

pub mod channel;
pub mod cli;
pub mod decoders;
pub mod format;
pub mod geometry;
pub mod infomeasures;
pub mod regions;
pub mod schemes;
pub mod sim;

pub use channel::{Builtin, ChannelError, McChannel};
pub use decoders::{DecoderConfig, DecoderError, Rule, TrialRecord};
pub use infomeasures::{ChannelSummary, InfoError, InfoTriple, ProductInput, WalkKind};
pub use regions::{RateRegion, RegionError, RegionQuery};
pub use schemes::{Codebook, SchemeError, SchemeSpec, User};
pub use sim::{ExperimentConfig, SimError, SimSummary};
