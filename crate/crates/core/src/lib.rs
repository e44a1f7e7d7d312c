//! Finite-blocklength BER-based physical-layer security toolkit.
//!
//! Computes random-coding (Gallager) block/BER upper bounds for the
//! legitimate receiver and strong-converse (Arimoto) lower bounds for the
//! eavesdropper over BSC, BEC, binary-input AWGN, and Gaussian-input AWGN
//! channels; quantifies error amplification by substitution-permutation
//! networks (exact ideal-S-box recursion and AES-S-box simulation); and
//! derives the finite-blocklength rate margins, security gaps, and the
//! optimal fading-channel power policy with outage Monte Carlo.
//!
//! The `bersec` binary exposes the same functionality as a CLI and
//! reproduces the reference figures as CSV.

pub mod bounds;
pub mod channel;
pub mod config;
pub mod error;
pub mod fading;
pub mod figures;
pub mod gap;
pub mod margins;
mod optim;
mod quad;
pub mod report;
pub mod spn;

pub use bounds::{ExponentResult, Thresholds};
pub use channel::{ChannelFamily, ChannelModel, InputDistribution};
pub use error::{Error, Result};
pub use fading::{FadingScenario, OutageReport, PowerPolicy, ZOpt};
pub use gap::{GammaLimits, GapResult};
pub use margins::MarginResult;
pub use spn::{ErrorWeightDist, SpnGeometry, SpnMethod};

/// Toolkit version embedded in every output's reproducibility header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
