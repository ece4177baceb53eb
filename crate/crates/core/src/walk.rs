//! Step pipelines and n-step evolution.
//!
//! One step is `coin → shift → symmetry gates → channel`. The unitary part
//! never materializes a dense operator: the coin and the gates are 2×2 blocks
//! mixing the two coin rows of each site, and the shift is a row permutation.
//! A density matrix is evolved by applying the same row operations to `ρ`,
//! taking the adjoint, and applying them again (`K (Kρ)† = KρK†`).

use num_complex::Complex64;

use crate::coin::{gate, CoinOp, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::lattice::{
    new_pure, to_density, DensityState, Distribution, InitialState, PositionMarginal, PureState,
    Topology,
};
use crate::linalg::Mat2;
use crate::noise::{apply_channel_in_place, KrausChannel};

/// Allowed trace drift for density evolution.
pub const TRACE_TOL: f64 = 1e-10;

/// Conditional shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShiftKind {
    /// `U`: `|0,x⟩ → |0,x−1⟩`, `|1,x⟩ → |1,x+1⟩`.
    Forward,
    /// `U†`: `|0,x⟩ → |0,x+1⟩`, `|1,x⟩ → |1,x−1⟩`.
    Reverse,
    /// `U′ = XU`: `|0,x⟩ → |1,x−1⟩`, `|1,x⟩ → |0,x+1⟩`.
    FlipShift,
}

impl ShiftKind {
    /// Displacement applied to each coin row, and whether the coin label is
    /// flipped. `parity` exchanges the roles of the two displacements.
    fn moves(self, parity: bool) -> ([isize; 2], bool) {
        let (deltas, flip) = match self {
            ShiftKind::Forward => ([-1, 1], false),
            ShiftKind::Reverse => ([1, -1], false),
            ShiftKind::FlipShift => ([-1, 1], true),
        };
        if parity {
            ([-deltas[0], -deltas[1]], flip)
        } else {
            (deltas, flip)
        }
    }
}

/// The fixed-order per-step operation sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPipeline {
    pub coin: CoinOp,
    pub shift: ShiftKind,
    /// Applied after the shift, first element first.
    pub symmetry_gates: Vec<GateOp>,
    /// Exchange the shift's left and right moves on every step.
    pub parity_each_step: bool,
    pub channel: Option<KrausChannel>,
}

impl StepPipeline {
    pub fn new(coin: CoinOp) -> Self {
        StepPipeline {
            coin,
            shift: ShiftKind::Forward,
            symmetry_gates: Vec::new(),
            parity_each_step: false,
            channel: None,
        }
    }

    pub fn with_shift(mut self, shift: ShiftKind) -> Self {
        self.shift = shift;
        self
    }

    pub fn with_gate(mut self, g: GateOp) -> Self {
        self.symmetry_gates.push(g);
        self
    }

    pub fn with_channel(mut self, channel: KrausChannel) -> Self {
        self.channel = Some(channel);
        self
    }

    pub fn without_channel(mut self) -> Self {
        self.channel = None;
        self
    }

    /// `G_m ··· G_1`.
    fn gate_product(&self) -> Option<Mat2> {
        if self.symmetry_gates.is_empty() {
            return None;
        }
        Some(
            self.symmetry_gates
                .iter()
                .fold(Mat2::IDENTITY, |acc, g| *g.matrix() * acc),
        )
    }
}

/// Coin and shift used for one step of an inhomogeneous walk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOverride {
    pub coin: CoinOp,
    pub shift: ShiftKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkConfig {
    pub topology: Topology,
    pub initial: InitialState,
    pub pipeline: StepPipeline,
    pub steps: usize,
    /// Step `k` (0-based) uses `overrides[k]` instead of the pipeline's coin
    /// and shift. Gates, parity and channel still come from the pipeline.
    pub overrides: Option<Vec<StepOverride>>,
}

impl WalkConfig {
    /// A line just wide enough that the light cone never reaches the edge.
    pub fn line(initial: InitialState, pipeline: StepPipeline, steps: usize) -> Self {
        let half_width = (steps + initial.position().unsigned_abs() as usize).max(1);
        WalkConfig {
            topology: Topology::Line { half_width },
            initial,
            pipeline,
            steps,
            overrides: None,
        }
    }

    pub fn cycle(
        sites: usize,
        initial: InitialState,
        pipeline: StepPipeline,
        steps: usize,
    ) -> Result<Self> {
        Ok(WalkConfig {
            topology: Topology::cycle(sites)?,
            initial,
            pipeline,
            steps,
            overrides: None,
        })
    }

    pub fn with_overrides(mut self, overrides: Vec<StepOverride>) -> Self {
        self.overrides = Some(overrides);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Topology::Line { half_width } = self.topology {
            let room = half_width as i64 - self.initial.position().abs();
            if room < self.steps as i64 {
                return Err(Error::LightConeOverflow { step: self.steps, half_width });
            }
        }
        if let Some(ov) = &self.overrides {
            if ov.len() != self.steps {
                return Err(Error::OverrideLength { got: ov.len(), steps: self.steps });
            }
        }
        if let Some(ch) = &self.pipeline.channel {
            let deviation = ch.completeness_defect();
            if deviation > crate::noise::COMPLETENESS_TOL {
                return Err(Error::Completeness { deviation });
            }
        }
        Ok(())
    }

    /// Unitary part of step `k`.
    pub fn step_unitary(&self, k: usize) -> StepUnitary {
        let (coin, shift) = match &self.overrides {
            Some(ov) => (ov[k].coin, ov[k].shift),
            None => (self.pipeline.coin, self.pipeline.shift),
        };
        StepUnitary {
            coin: *coin.matrix(),
            shift,
            parity: self.pipeline.parity_each_step,
            post: self.pipeline.gate_product(),
        }
    }

    pub fn initial_pure(&self) -> Result<PureState> {
        new_pure(&self.initial, self.topology)
    }
}

/// `K = G · S · (B ⊗ I)` in factored form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepUnitary {
    pub coin: Mat2,
    pub shift: ShiftKind,
    pub parity: bool,
    pub post: Option<Mat2>,
}

impl StepUnitary {
    pub fn shift_only(shift: ShiftKind) -> Self {
        StepUnitary { coin: Mat2::IDENTITY, shift, parity: false, post: None }
    }

    /// Apply `K` to the row blocks of `buf`: row `c * sites + i` is the
    /// `width`-long slice starting at `(c * sites + i) * width`.
    pub(crate) fn apply_rows(
        &self,
        buf: &mut Vec<Complex64>,
        scratch: &mut Vec<Complex64>,
        topology: Topology,
        width: usize,
        step: usize,
    ) -> Result<()> {
        mix_coin_rows(buf, topology.site_count(), width, &self.coin);
        shift_rows(buf, scratch, topology, width, self.shift, self.parity, step)?;
        std::mem::swap(buf, scratch);
        if let Some(post) = &self.post {
            mix_coin_rows(buf, topology.site_count(), width, post);
        }
        Ok(())
    }
}

/// `(x0, x1) ← M (x0, x1)` for the two coin rows at every site.
pub(crate) fn mix_coin_rows(buf: &mut [Complex64], sites: usize, width: usize, m: &Mat2) {
    if *m == Mat2::IDENTITY {
        return;
    }
    let (up, down) = buf.split_at_mut(sites * width);
    if m.is_diagonal() {
        let (d0, d1) = (m.get(0, 0), m.get(1, 1));
        if d0 != Complex64::new(1.0, 0.0) {
            up.iter_mut().for_each(|a| *a *= d0);
        }
        if d1 != Complex64::new(1.0, 0.0) {
            down.iter_mut().for_each(|a| *a *= d1);
        }
        return;
    }
    for (a, b) in up.iter_mut().zip(down.iter_mut()) {
        let (x, y) = m.apply(*a, *b);
        *a = x;
        *b = y;
    }
}

fn shift_rows(
    src: &[Complex64],
    dst: &mut Vec<Complex64>,
    topology: Topology,
    width: usize,
    kind: ShiftKind,
    parity: bool,
    step: usize,
) -> Result<()> {
    let n = topology.site_count();
    dst.clear();
    dst.resize(src.len(), Complex64::new(0.0, 0.0));
    let (deltas, flip) = kind.moves(parity);
    for coin in 0..2 {
        let out_coin = if flip { 1 - coin } else { coin };
        let delta = deltas[coin];
        for i in 0..n {
            let from = (coin * n + i) * width;
            let row = &src[from..from + width];
            let j = i as isize + delta;
            let j = match topology {
                Topology::Cycle { .. } => j.rem_euclid(n as isize) as usize,
                Topology::Line { half_width } => {
                    if j < 0 || j >= n as isize {
                        if row.iter().any(|a| *a != Complex64::new(0.0, 0.0)) {
                            return Err(Error::LightConeOverflow { step, half_width });
                        }
                        continue;
                    }
                    j as usize
                }
            };
            let to = (out_coin * n + j) * width;
            dst[to..to + width].copy_from_slice(row);
        }
    }
    Ok(())
}

/// States the step machinery can act on.
pub trait WalkState: PositionMarginal + Clone {
    fn topology(&self) -> Topology;

    /// `state ← K state K†` (or `K|ψ⟩`).
    fn apply_unitary(&mut self, k: &StepUnitary, step: usize) -> Result<()>;
}

impl WalkState for PureState {
    fn topology(&self) -> Topology {
        PureState::topology(self)
    }

    fn apply_unitary(&mut self, k: &StepUnitary, step: usize) -> Result<()> {
        let topo = PureState::topology(self);
        let mut buf = std::mem::take(self.amplitudes_vec());
        let mut scratch = Vec::with_capacity(buf.len());
        let res = k.apply_rows(&mut buf, &mut scratch, topo, 1, step);
        *self.amplitudes_vec() = buf;
        res
    }
}

impl WalkState for DensityState {
    fn topology(&self) -> Topology {
        DensityState::topology(self)
    }

    fn apply_unitary(&mut self, k: &StepUnitary, step: usize) -> Result<()> {
        let mut scratch = Vec::with_capacity(self.matrix().len());
        apply_unitary_density(self, k, step, &mut scratch)
    }
}

fn apply_unitary_density(
    rho: &mut DensityState,
    k: &StepUnitary,
    step: usize,
    scratch: &mut Vec<Complex64>,
) -> Result<()> {
    let topo = rho.topology();
    let dim = rho.dim();
    // K ρ, then (K (K ρ)†)† = K ρ K†.
    for _ in 0..2 {
        let mut buf = std::mem::take(rho.matrix_vec());
        let res = k.apply_rows(&mut buf, scratch, topo, dim, step);
        *rho.matrix_vec() = buf;
        res?;
        rho.adjoint_in_place();
    }
    Ok(())
}

/// Apply one conditional shift.
pub fn apply_shift<S: WalkState>(state: &S, kind: ShiftKind) -> Result<S> {
    let mut out = state.clone();
    out.apply_unitary(&StepUnitary::shift_only(kind), 0)?;
    Ok(out)
}

/// One noiseless step: `ψ ← G_m···G_1 · S · (B ⊗ I) ψ`.
pub fn step_pure(psi: &PureState, pipeline: &StepPipeline) -> Result<PureState> {
    if pipeline.channel.is_some() {
        return Err(Error::ChannelInPureStep);
    }
    let k = StepUnitary {
        coin: *pipeline.coin.matrix(),
        shift: pipeline.shift,
        parity: pipeline.parity_each_step,
        post: pipeline.gate_product(),
    };
    let mut out = psi.clone();
    out.apply_unitary(&k, 0)?;
    Ok(out)
}

/// Noiseless evolution, calling `observe(k, ψ_k)` after every step `k = 1..=n`.
pub fn evolve_pure_observed(
    config: &WalkConfig,
    mut observe: impl FnMut(usize, &PureState),
) -> Result<PureState> {
    config.validate()?;
    if config.pipeline.channel.is_some() {
        return Err(Error::ChannelInPureStep);
    }
    let mut psi = config.initial_pure()?;
    let topo = psi.topology();
    let mut buf = std::mem::take(psi.amplitudes_vec());
    let mut scratch = Vec::with_capacity(buf.len());
    for k in 0..config.steps {
        config
            .step_unitary(k)
            .apply_rows(&mut buf, &mut scratch, topo, 1, k + 1)?;
        // Observers see a real state; swap it in and out.
        std::mem::swap(psi.amplitudes_vec(), &mut buf);
        observe(k + 1, &psi);
        std::mem::swap(psi.amplitudes_vec(), &mut buf);
    }
    *psi.amplitudes_vec() = buf;
    Ok(psi)
}

pub fn evolve_pure(config: &WalkConfig) -> Result<PureState> {
    evolve_pure_observed(config, |_, _| {})
}

/// Open-system evolution, calling `observe(k, ρ_k)` after every step.
pub fn evolve_density_observed(
    config: &WalkConfig,
    mut observe: impl FnMut(usize, &DensityState),
) -> Result<DensityState> {
    config.validate()?;
    let mut rho = to_density(&config.initial_pure()?);
    let mut scratch = Vec::with_capacity(rho.matrix().len());
    for k in 0..config.steps {
        apply_unitary_density(&mut rho, &config.step_unitary(k), k + 1, &mut scratch)?;
        if let Some(ch) = &config.pipeline.channel {
            apply_channel_in_place(&mut rho, ch)?;
        }
        observe(k + 1, &rho);
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::TraceDrift { trace: trace.re });
    }
    Ok(rho)
}

/// `ρ_k = Σ_j (E_j⊗I) K ρ_{k−1} K† (E_j⊗I)†` for `k = 1..=n`.
pub fn evolve_density(config: &WalkConfig) -> Result<DensityState> {
    evolve_density_observed(config, |_, _| {})
}

/// Final positional distribution, from pure evolution when there is no
/// channel and from density evolution otherwise.
pub fn final_distribution(config: &WalkConfig) -> Result<Distribution> {
    if config.pipeline.channel.is_some() {
        Ok(evolve_density(config)?.position_distribution())
    } else {
        Ok(evolve_pure(config)?.position_distribution())
    }
}

/// Mean of the distributions after the last `window` steps.
pub fn window_averaged_distribution(config: &WalkConfig, window: usize) -> Result<Distribution> {
    if window == 0 || window > config.steps {
        return Err(Error::Degenerate(format!(
            "averaging window {window} for a walk of {} steps",
            config.steps
        )));
    }
    let first = config.steps - window + 1;
    let mut collected = Vec::with_capacity(window);
    if config.pipeline.channel.is_some() {
        evolve_density_observed(config, |k, rho| {
            if k >= first {
                collected.push(rho.position_distribution());
            }
        })?;
    } else {
        evolve_pure_observed(config, |k, psi| {
            if k >= first {
                collected.push(psi.position_distribution());
            }
        })?;
    }
    crate::analysis::time_average(&collected)
}

/// Reflect a distribution through the origin: `x → −x` on the line,
/// `x → (R − x) mod R` on the cycle.
///
/// Mirror images of walks only coincide with this map when the walk starts
/// at `x0 = 0`; see [`mirror_of_walk`].
pub fn spatial_inversion(d: &Distribution) -> Distribution {
    let topo = d.topology();
    let probs = d.probs();
    let inverted = match topo {
        Topology::Line { .. } => probs.iter().rev().copied().collect(),
        Topology::Cycle { sites } => (0..sites).map(|x| probs[(sites - x) % sites]).collect(),
    };
    Distribution::new(topo, inverted).expect("same topology")
}

/// [`spatial_inversion`] of a walk's output, rejecting line walks that do not
/// start at the origin.
pub fn mirror_of_walk(config: &WalkConfig, d: &Distribution) -> Result<Distribution> {
    if config.topology.is_line() && config.initial.position() != 0 {
        return Err(Error::Degenerate(format!(
            "spatial inversion on the line needs x0 = 0, got {}",
            config.initial.position()
        )));
    }
    Ok(spatial_inversion(d))
}

/// A per-step augmentation of the walk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symmetry {
    /// Phase flip after every shift.
    Z,
    /// Phase shift `Φ(φ)` after every shift.
    Phi(f64),
    /// Bit flip after every shift. Not a symmetry of a biased walk.
    X,
    /// Parity, angular reflection of the coin and a bit flip on every step.
    Prx,
    /// `X·Z`: Z then X.
    Xz,
    /// `Z·X`: X then Z.
    Zx,
    /// Replace the coin by `B^(j)(φ)`.
    Variant { j: u8, phi: f64 },
}

impl Symmetry {
    pub fn name(&self) -> String {
        match self {
            Symmetry::Z => "Z".into(),
            Symmetry::Phi(phi) => format!("Phi({phi})"),
            Symmetry::X => "X".into(),
            Symmetry::Prx => "PRX".into(),
            Symmetry::Xz => "XZ".into(),
            Symmetry::Zx => "ZX".into(),
            Symmetry::Variant { j, phi } => format!("B{j}({phi})"),
        }
    }

    fn transform_coin(&self, coin: &CoinOp) -> Result<CoinOp> {
        match *self {
            Symmetry::Prx => coin.reflected(),
            Symmetry::Variant { j, phi } => crate::coin::variant_coin(coin, j, phi),
            _ => Ok(*coin),
        }
    }

    pub fn apply_to_pipeline(&self, pipeline: &StepPipeline) -> Result<StepPipeline> {
        let mut out = pipeline.clone();
        out.coin = self.transform_coin(&pipeline.coin)?;
        let x = gate(GateKind::PauliX);
        let z = gate(GateKind::PauliZ);
        match *self {
            Symmetry::Z => out.symmetry_gates.push(z),
            Symmetry::Phi(phi) => out.symmetry_gates.push(gate(GateKind::PhaseShift(phi))),
            Symmetry::X => out.symmetry_gates.push(x),
            Symmetry::Prx => {
                out.parity_each_step = !out.parity_each_step;
                out.symmetry_gates.push(x);
            }
            Symmetry::Xz => out.symmetry_gates.extend([z, x]),
            Symmetry::Zx => out.symmetry_gates.extend([x, z]),
            Symmetry::Variant { .. } => {}
        }
        Ok(out)
    }

    /// The augmented walk. Per-step override coins are transformed as well.
    pub fn apply(&self, config: &WalkConfig) -> Result<WalkConfig> {
        let mut out = config.clone();
        out.pipeline = self.apply_to_pipeline(&config.pipeline)?;
        if let Some(ov) = &config.overrides {
            out.overrides = Some(
                ov.iter()
                    .map(|o| Ok(StepOverride { coin: self.transform_coin(&o.coin)?, shift: o.shift }))
                    .collect::<Result<_>>()?,
            );
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::{build_coin, variant_coin, CoinParams};
    use crate::lattice::position_distribution;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hadamard_line(init: InitialState, steps: usize) -> WalkConfig {
        WalkConfig::line(init, StepPipeline::new(CoinOp::hadamard()), steps)
    }

    #[test]
    fn forward_shift_moves_coin_zero_left() {
        let topo = Topology::line(3).unwrap();
        let psi = new_pure(&InitialState::basis(0, 0), topo).unwrap();
        let out = apply_shift(&psi, ShiftKind::Forward).unwrap();
        assert_eq!(out.amplitude(0, -1).unwrap(), c(1.0, 0.0));
        assert!((out.norm_sqr() - 1.0).abs() == 0.0);
    }

    #[test]
    fn forward_shift_wraps_on_cycle() {
        let topo = Topology::cycle(5).unwrap();
        let psi = new_pure(&InitialState::basis(1, 4), topo).unwrap();
        let out = apply_shift(&psi, ShiftKind::Forward).unwrap();
        assert_eq!(out.amplitude(1, 0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn flip_shift_changes_coin() {
        let topo = Topology::line(2).unwrap();
        let psi = new_pure(&InitialState::basis(0, 0), topo).unwrap();
        let out = apply_shift(&psi, ShiftKind::FlipShift).unwrap();
        assert_eq!(out.amplitude(1, -1).unwrap(), c(1.0, 0.0));
        let psi = new_pure(&InitialState::basis(1, 0), topo).unwrap();
        let out = apply_shift(&psi, ShiftKind::FlipShift).unwrap();
        assert_eq!(out.amplitude(0, 1).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn forward_then_reverse_is_identity() {
        let topo = Topology::cycle(6).unwrap();
        let amps = (0..12).map(|k| c(k as f64, 1.0 - k as f64)).collect();
        let psi = PureState::from_amplitudes(topo, amps).unwrap();
        let back = apply_shift(&apply_shift(&psi, ShiftKind::Forward).unwrap(), ShiftKind::Reverse)
            .unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn cycle_shift_has_period_r() {
        let topo = Topology::cycle(7).unwrap();
        let amps = (0..14).map(|k| c((k as f64).sin(), 0.0)).collect();
        let psi = PureState::from_amplitudes(topo, amps).unwrap();
        let mut cur = psi.clone();
        for _ in 0..7 {
            cur = apply_shift(&cur, ShiftKind::Forward).unwrap();
        }
        assert_eq!(cur, psi);
    }

    #[test]
    fn line_overflow_is_an_error() {
        let topo = Topology::line(1).unwrap();
        let psi = new_pure(&InitialState::basis(0, -1), topo).unwrap();
        assert!(matches!(
            apply_shift(&psi, ShiftKind::Forward),
            Err(Error::LightConeOverflow { .. })
        ));
        let cfg = WalkConfig {
            topology: Topology::line(3).unwrap(),
            initial: InitialState::basis(0, 0),
            pipeline: StepPipeline::new(CoinOp::hadamard()),
            steps: 4,
            overrides: None,
        };
        assert!(matches!(evolve_pure(&cfg), Err(Error::LightConeOverflow { .. })));
    }

    #[test]
    fn hadamard_step_from_basis_states() {
        let topo = Topology::line(2).unwrap();
        let pipe = StepPipeline::new(CoinOp::hadamard());
        let h = FRAC_1_SQRT_2;

        let psi = step_pure(&new_pure(&InitialState::basis(0, 0), topo).unwrap(), &pipe).unwrap();
        assert!((psi.amplitude(0, -1).unwrap() - c(h, 0.0)).norm() < 1e-15);
        assert!((psi.amplitude(1, 1).unwrap() - c(h, 0.0)).norm() < 1e-15);

        let psi = step_pure(&new_pure(&InitialState::basis(1, 0), topo).unwrap(), &pipe).unwrap();
        assert!((psi.amplitude(0, -1).unwrap() - c(h, 0.0)).norm() < 1e-15);
        assert!((psi.amplitude(1, 1).unwrap() - c(-h, 0.0)).norm() < 1e-15);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_with_channel_is_rejected() {
        let topo = Topology::line(2).unwrap();
        let pipe = StepPipeline::new(CoinOp::hadamard())
            .with_channel(crate::noise::phase_flip(0.1).unwrap());
        let psi = new_pure(&InitialState::basis(0, 0), topo).unwrap();
        assert_eq!(step_pure(&psi, &pipe), Err(Error::ChannelInPureStep));
    }

    #[test]
    fn z_gate_step_equals_row_variant_coin() {
        let topo = Topology::line(2).unwrap();
        let coin = build_coin(CoinParams::new(0.3, 0.6, -0.8));
        let psi = new_pure(&InitialState::new(c(0.6, 0.0), c(0.0, 0.8), 0).unwrap(), topo).unwrap();
        let with_gate = step_pure(&psi, &StepPipeline::new(coin).with_gate(gate(GateKind::PauliZ)))
            .unwrap();
        let with_variant =
            step_pure(&psi, &StepPipeline::new(variant_coin(&coin, 1, PI).unwrap())).unwrap();
        for (a, b) in with_gate.amplitudes().iter().zip(with_variant.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn one_step_symmetric_start_splits_evenly() {
        let d = position_distribution(&evolve_pure(&hadamard_line(InitialState::symmetric(0), 1)).unwrap());
        assert!((d.prob(-1).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.prob(1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_hadamard_steps() {
        let d = position_distribution(&evolve_pure(&hadamard_line(InitialState::basis(0, 0), 2)).unwrap());
        assert!((d.prob(-2).unwrap() - 0.25).abs() < 1e-15);
        assert!((d.prob(0).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.prob(2).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn distribution_vanishes_outside_light_cone() {
        let cfg = WalkConfig {
            topology: Topology::line(30).unwrap(),
            initial: InitialState::symmetric(3),
            pipeline: StepPipeline::new(build_coin(CoinParams::biased(0.4))),
            steps: 12,
            overrides: None,
        };
        let d = evolve_pure(&cfg).unwrap().position_distribution();
        for (x, p) in d.reported() {
            if (x - 3).abs() > 12 || (x - 3 + 12) % 2 != 0 {
                assert_eq!(p, 0.0, "site {x}");
            }
        }
    }

    #[test]
    fn density_without_channel_matches_pure() {
        let cfg = WalkConfig::line(
            InitialState::symmetric(0),
            StepPipeline::new(build_coin(CoinParams::from_degrees(10.0, 30.0, -20.0)))
                .with_gate(gate(GateKind::PauliX)),
            15,
        );
        let dp = evolve_pure(&cfg).unwrap().position_distribution();
        let rho = evolve_density(&cfg).unwrap();
        let dd = rho.position_distribution();
        for (a, b) in dp.probs().iter().zip(dd.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(rho.hermiticity_defect() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn observer_sees_every_step() {
        let cfg = hadamard_line(InitialState::basis(1, 0), 5);
        let mut seen = Vec::new();
        evolve_pure_observed(&cfg, |k, psi| seen.push((k, psi.norm_sqr()))).unwrap();
        assert_eq!(seen.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        assert!(seen.iter().all(|s| (s.1 - 1.0).abs() < 1e-12));
    }

    #[test]
    fn spatial_inversion_examples() {
        let topo = Topology::line(4).unwrap();
        let delta = Distribution::delta(topo, 3).unwrap();
        assert_eq!(spatial_inversion(&delta), Distribution::delta(topo, -3).unwrap());
        let sym = Distribution::new(topo, vec![0.0, 0.1, 0.0, 0.2, 0.4, 0.2, 0.0, 0.1, 0.0]).unwrap();
        assert_eq!(spatial_inversion(&sym), sym);

        let cyc = Topology::cycle(5).unwrap();
        let d = Distribution::new(cyc, vec![0.1, 0.2, 0.3, 0.25, 0.15]).unwrap();
        let inv = spatial_inversion(&d);
        assert_eq!(inv.probs(), &[0.1, 0.15, 0.25, 0.3, 0.2]);
        assert_eq!(spatial_inversion(&inv), d);
    }

    #[test]
    fn mirror_requires_origin_start_on_line() {
        let cfg = hadamard_line(InitialState::basis(0, 2), 3);
        let d = evolve_pure(&cfg).unwrap().position_distribution();
        assert!(mirror_of_walk(&cfg, &d).is_err());
    }

    #[test]
    fn override_table_length_is_checked() {
        let cfg = hadamard_line(InitialState::basis(0, 0), 3).with_overrides(vec![]);
        assert_eq!(
            evolve_pure(&cfg).unwrap_err(),
            Error::OverrideLength { got: 0, steps: 3 }
        );
    }

    #[test]
    fn window_average_of_last_two_steps() {
        let cfg = hadamard_line(InitialState::basis(0, 0), 2);
        let avg = window_averaged_distribution(&cfg, 2).unwrap();
        // Step 1: (1/2, 1/2) on ±1. Step 2: (1/4, 1/2, 1/4) on −2, 0, 2.
        let expect = [(-2, 0.125), (-1, 0.25), (0, 0.25), (1, 0.25), (2, 0.125)];
        for (x, p) in expect {
            assert!((avg.prob(x).unwrap() - p).abs() < 1e-15);
        }
        assert!(window_averaged_distribution(&cfg, 3).is_err());
    }
}
