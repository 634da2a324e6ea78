//! Monte Carlo simulator for a nonlinear resistive physically unclonable function
//! built from two ReRAM crossbar arrays with a hidden challenge, together with
//! the quality metrics and power side-channel analysis used to evaluate it.
//!
//! The crate is organised bottom-up:
//!
//! * [`device`]: stochastic HRS / stuck-at-ON cells, voltage nonlinearity and
//!   thermal activation.
//! * [`crossbar`]: cell grids, row read-out currents and sum statistics.
//! * [`lfsr`] and [`puf`]: challenge expansion, the sense-amplifier model and
//!   dual-crossbar bit evaluation.
//! * [`metrics`]: uniformity, bit-aliasing, uniqueness, diffuseness, bit error
//!   rate and avalanche maps.
//! * [`power`]: power traces and leakage SNR.
//! * [`experiment`]: configuration, orchestration, persistence and reports.
//!
//! All randomness flows through explicit [`rng::Substreams`], so results are
//! reproducible for a given seed regardless of worker count.

pub mod crossbar;
pub mod device;
pub mod error;
pub mod experiment;
pub mod lfsr;
pub mod metrics;
pub mod power;
pub mod puf;
pub mod rng;
pub mod stats;

pub use crossbar::{combine_stats, CrossbarArray, Selection, SumStats};
pub use device::{CellState, DeviceParams, Environment, Fluctuation, OperatingPoint, ReRamCell};
pub use error::{Error, Result};
pub use metrics::{BitVector, ResponseRecord, SacMap};
pub use power::{PowerSample, PowerTrace};
pub use puf::{
    crp_count, pelgrom_offset, Architecture, ArrayId, Challenge, ComparatorParams, CrpFormula,
    EvalOutcome, PufConfig, PufInstance,
};
pub use rng::Substreams;
