//! Discrete-time quantum walks on the line and on the cycle.
//!
//! The walker lives in `coin ⊗ position`. Each step applies a coin rotation,
//! a coin-conditioned shift, an optional list of per-step symmetry gates and
//! an optional decoherence channel acting on the coin, in that order.
//!
//! The crate is organised around that pipeline:
//!
//! * [`lattice`]: topologies, pure and density states, positional distributions.
//! * [`coin`]: SU(2) coins, their phase-decorated variants and the single-qubit gates.
//! * [`walk`]: shifts, step pipelines and n-step evolution.
//! * [`noise`]: Kraus channels (phase flip, bit flip, generalized amplitude damping).
//! * [`trajectories`]: exact enumeration and Monte-Carlo sampling of Kraus unravelings.
//! * [`analysis`]: distribution metrics, symmetry verdicts and scaling fits.

pub mod analysis;
pub mod coin;
mod error;
pub mod lattice;
pub mod linalg;
pub mod noise;
pub mod trajectories;
pub mod walk;

pub use analysis::{
    fit_scaling_exponent, std_dev, symmetry_verdict, time_average, total_variation,
    uniformity_deviation, SweepPoint, SymmetryVerdict,
};
pub use coin::{build_coin, gate, reflect_params, variant_coin, CoinOp, CoinParams, GateKind, GateOp, Variant};
pub use error::{Error, Result};
pub use lattice::{
    new_pure, position_distribution, to_density, DensityState, Distribution, InitialState, PositionMarginal,
    PureState, Topology,
};
pub use linalg::Mat2;
pub use noise::{
    apply_channel, bit_flip, gad_channel, gad_closed_form, gad_from_physical, phase_flip,
    ChannelLabel, DephasingPhysicalParams, GadPhysicalParams, KrausChannel, QubitBloch,
};
pub use trajectories::{
    enumerate_exact, sample_monte_carlo, verify_symmetry_trajectorywise, SymmetryReport,
    TrajectoryEstimate, Unraveling,
};
pub use walk::{
    apply_shift, evolve_density, evolve_pure, final_distribution, mirror_of_walk,
    spatial_inversion, step_pure, window_averaged_distribution, ShiftKind,
    StepOverride, StepPipeline, Symmetry, WalkConfig,
};

pub use num_complex::Complex64;
