use thiserror::Error;

use crate::lattice::Topology;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("site {site} is not a valid position on {topology}")]
    InvalidSite { site: i64, topology: Topology },

    #[error("coin amplitudes are not normalized (|a|^2 + |b|^2 = {norm})")]
    Unnormalized { norm: f64 },

    #[error("variant index must be in 1..=4, got {0}")]
    InvalidVariant(u8),

    #[error("cannot combine variant B^({existing}) with B^({requested})")]
    MixedVariant { existing: u8, requested: u8 },

    #[error("operation requires an undecorated coin, got variant B^({0})")]
    DecoratedCoin(u8),

    #[error("walk left the allocated line at step {step} (half width {half_width})")]
    LightConeOverflow { step: usize, half_width: usize },

    #[error("pure-state evolution cannot apply a noise channel")]
    ChannelInPureStep,

    #[error("{name} = {value} is outside its allowed range {range}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("Kraus operators violate completeness (max deviation {deviation:e})")]
    Completeness { deviation: f64 },

    #[error("trace drifted to {trace} during density evolution")]
    TraceDrift { trace: f64 },

    #[error("topology mismatch: {left} vs {right}")]
    TopologyMismatch { left: Topology, right: Topology },

    #[error("{branches} branches exceeds the enumeration cap of {cap}")]
    BranchCapExceeded { branches: u128, cap: u64 },

    #[error("{0} requires a line topology")]
    RequiresLine(&'static str),

    #[error("{0} requires a cycle topology")]
    RequiresCycle(&'static str),

    #[error("override table has {got} entries for a walk of {steps} steps")]
    OverrideLength { got: usize, steps: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}
