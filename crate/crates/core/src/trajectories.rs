//! Kraus unravelings of a noisy walk.
//!
//! A walk with an `m`-operator channel over `n` steps is a mixture of `m^n`
//! unnormalized pure branches `(E_{j_n} K_n) ··· (E_{j_1} K_1) |ψ0⟩`. The
//! enumerator propagates every branch without renormalizing and sums their
//! positional weights; the sampler draws one Kraus index per step with
//! probability equal to the squared norm of the candidate branch and
//! renormalizes after each draw.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::CompensatedSum;
use crate::error::{Error, Result};
use crate::lattice::{Distribution, PositionMarginal, PureState, Topology};
use crate::linalg::Mat2;
use crate::noise::KrausChannel;
use crate::walk::{mix_coin_rows, StepUnitary, Symmetry, WalkConfig, WalkState};

/// Default limit on `m^n` for exact enumeration.
pub const DEFAULT_BRANCH_CAP: u64 = 1 << 20;

/// Samples per independently seeded Monte-Carlo batch.
const BATCH: usize = 1024;

/// One sequence of Kraus choices and its probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Unraveling {
    pub kraus_indices: Vec<usize>,
    /// Squared norm of the unnormalized branch.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryEstimate {
    pub distribution: Distribution,
    pub samples: usize,
    /// Standard error of the mean, per site in storage order.
    pub std_error: Vec<f64>,
    pub seed: u64,
}

/// Per-branch comparison of a walk with its symmetry-augmented version.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub symmetry: String,
    pub branches: usize,
    /// Largest sitewise difference between a branch and its partner.
    pub max_branch_discrepancy: f64,
    /// Sitewise difference between the two branch sums.
    pub aggregate_discrepancy: f64,
    pub plain: Distribution,
    pub augmented: Distribution,
}

fn channel_of(config: &WalkConfig) -> KrausChannel {
    config.pipeline.channel.clone().unwrap_or_else(KrausChannel::identity)
}

fn branch_count(m: usize, n: usize, cap: u64) -> Result<u128> {
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(m as u128);
        if total > cap as u128 {
            return Err(Error::BranchCapExceeded { branches: total, cap });
        }
    }
    Ok(total)
}

fn apply_kraus(psi: &mut PureState, e: &Mat2) {
    let n = psi.topology().site_count();
    mix_coin_rows(psi.amplitudes_mut(), n, 1, e);
}

/// Depth-first walk over all branches of several configurations in lockstep.
/// `visit` receives the Kraus index sequence and one unnormalized state per
/// configuration. Branches where every state vanishes are pruned.
fn for_each_branch(
    configs: &[WalkConfig],
    channel: &KrausChannel,
    prefix: &mut Vec<usize>,
    states: Vec<PureState>,
    visit: &mut impl FnMut(&[usize], &[PureState]),
) -> Result<()> {
    let depth = prefix.len();
    let steps = configs[0].steps;
    if depth == steps {
        visit(prefix, &states);
        return Ok(());
    }
    let mut evolved = states;
    for (cfg, psi) in configs.iter().zip(evolved.iter_mut()) {
        let k: StepUnitary = cfg.step_unitary(depth);
        psi.apply_unitary(&k, depth + 1)?;
    }
    for (j, e) in channel.operators().iter().enumerate() {
        let mut next = evolved.clone();
        next.iter_mut().for_each(|psi| apply_kraus(psi, e));
        if next.iter().all(|psi| psi.norm_sqr() == 0.0) {
            continue;
        }
        prefix.push(j);
        for_each_branch(configs, channel, prefix, next, visit)?;
        prefix.pop();
    }
    Ok(())
}

fn check_enumerable(config: &WalkConfig, cap: u64) -> Result<KrausChannel> {
    config.validate()?;
    let channel = channel_of(config);
    branch_count(channel.len(), config.steps, cap)?;
    Ok(channel)
}

/// Every unraveling with its weight, in lexicographic index order. Zero-weight
/// branches are omitted.
pub fn unravelings(config: &WalkConfig, cap: u64) -> Result<Vec<Unraveling>> {
    let channel = check_enumerable(config, cap)?;
    let mut out = Vec::new();
    for_each_branch(
        std::slice::from_ref(config),
        &channel,
        &mut Vec::new(),
        vec![config.initial_pure()?],
        &mut |idx, states| {
            out.push(Unraveling { kraus_indices: idx.to_vec(), weight: states[0].norm_sqr() })
        },
    )?;
    Ok(out)
}

/// Positional distribution as the sum of all branch contributions.
///
/// Branches are split on the first Kraus choice and enumerated in parallel;
/// the partial sums are combined in index order.
pub fn enumerate_exact(config: &WalkConfig, cap: u64) -> Result<Distribution> {
    let channel = check_enumerable(config, cap)?;
    let topo = config.topology;
    let sites = topo.site_count();
    let psi0 = config.initial_pure()?;
    if config.steps == 0 {
        return Ok(psi0.position_distribution());
    }
    let mut first = psi0;
    first.apply_unitary(&config.step_unitary(0), 1)?;

    let partials: Vec<Result<Vec<CompensatedSum>>> = channel
        .operators()
        .par_iter()
        .enumerate()
        .map(|(j, e)| {
            let mut acc = vec![CompensatedSum::default(); sites];
            let mut psi = first.clone();
            apply_kraus(&mut psi, e);
            if psi.norm_sqr() == 0.0 {
                return Ok(acc);
            }
            let mut prefix = vec![j];
            for_each_branch(
                std::slice::from_ref(config),
                &channel,
                &mut prefix,
                vec![psi],
                &mut |_, states| accumulate(&mut acc, &states[0]),
            )?;
            Ok(acc)
        })
        .collect();

    let mut total = vec![CompensatedSum::default(); sites];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part?) {
            t.merge(&p);
        }
    }
    Distribution::new(topo, total.iter().map(CompensatedSum::value).collect())
}

fn accumulate(acc: &mut [CompensatedSum], psi: &PureState) {
    let n = acc.len();
    let amps = psi.amplitudes();
    for (i, a) in acc.iter_mut().enumerate() {
        a.add(amps[i].norm_sqr() + amps[n + i].norm_sqr());
    }
}

/// Coin reduced density matrix `Σ_x ψ(·,x) ψ(·,x)†`.
fn coin_marginal(psi: &PureState) -> Mat2 {
    let n = psi.topology().site_count();
    let (up, down) = psi.amplitudes().split_at(n);
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (a, b) in up.iter().zip(down) {
        m[0][0] += a * a.conj();
        m[0][1] += a * b.conj();
        m[1][0] += b * a.conj();
        m[1][1] += b * b.conj();
    }
    Mat2(m)
}

/// Per-site running mean and second moment (Welford/Chan).
#[derive(Clone, Debug)]
struct Moments {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(sites: usize) -> Self {
        Moments { count: 0, mean: vec![0.0; sites], m2: vec![0.0; sites] }
    }

    fn push(&mut self, sample: &[f64]) {
        self.count += 1;
        let k = self.count as f64;
        for ((mean, m2), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(sample) {
            let delta = x - *mean;
            *mean += delta / k;
            *m2 += delta * (x - *mean);
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }
}

fn sample_one(
    config: &WalkConfig,
    channel: &KrausChannel,
    rng: &mut ChaCha8Rng,
) -> Result<PureState> {
    let mut psi = config.initial_pure()?;
    for k in 0..config.steps {
        psi.apply_unitary(&config.step_unitary(k), k + 1)?;
        let rho_c = coin_marginal(&psi);
        let weights: Vec<f64> = channel
            .operators()
            .iter()
            .map(|e| (*e * rho_c * e.adjoint()).trace().re.max(0.0))
            .collect();
        let total: f64 = weights.iter().sum();
        let mut u = rng.gen::<f64>() * total;
        // Fall back to the last positive weight if roundoff exhausts u.
        let mut choice = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        for (j, &w) in weights.iter().enumerate() {
            if w > 0.0 && u < w {
                choice = j;
                break;
            }
            u -= w;
        }
        apply_kraus(&mut psi, &channel.operators()[choice]);
        psi.normalize();
    }
    Ok(psi)
}

/// Monte-Carlo estimate of the positional distribution.
///
/// Samples are drawn in batches of 1024; batch `b` uses a ChaCha8 stream
/// seeded with `seed` on stream `b`, so the estimate is identical for a
/// given seed regardless of thread count.
pub fn sample_monte_carlo(config: &WalkConfig, samples: usize, seed: u64) -> Result<TrajectoryEstimate> {
    if samples == 0 {
        return Err(Error::Degenerate("Monte-Carlo estimate needs at least one sample".into()));
    }
    config.validate()?;
    let channel = channel_of(config);
    let topo: Topology = config.topology;
    let sites = topo.site_count();
    let batches = samples.div_ceil(BATCH);

    let parts: Vec<Result<Moments>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut moments = Moments::new(sites);
            for _ in 0..count {
                let psi = sample_one(config, &channel, &mut rng)?;
                moments.push(psi.position_distribution().probs());
            }
            Ok(moments)
        })
        .collect();

    let mut total = Moments::new(sites);
    for part in parts {
        total.merge(&part?);
    }
    let std_error = total
        .m2
        .iter()
        .map(|&m2| {
            if samples > 1 {
                (m2 / (samples as f64 - 1.0) / samples as f64).max(0.0).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Ok(TrajectoryEstimate {
        distribution: Distribution::new(topo, total.mean)?,
        samples,
        std_error,
        seed,
    })
}

/// Compare every unraveling of `config` with the same unraveling of the
/// symmetry-augmented walk.
pub fn verify_symmetry_trajectorywise(
    config: &WalkConfig,
    symmetry: Symmetry,
    cap: u64,
) -> Result<SymmetryReport> {
    let channel = check_enumerable(config, cap)?;
    let augmented_cfg = symmetry.apply(config)?;
    augmented_cfg.validate()?;
    let topo = config.topology;
    let sites = topo.site_count();
    let configs = [config.clone(), augmented_cfg];
    let initial = vec![configs[0].initial_pure()?, configs[1].initial_pure()?];

    let mut plain = vec![CompensatedSum::default(); sites];
    let mut augmented = vec![CompensatedSum::default(); sites];
    let mut max_branch = 0.0f64;
    let mut branches = 0usize;
    for_each_branch(&configs, &channel, &mut Vec::new(), initial, &mut |_, states| {
        branches += 1;
        let (a, b) = (states[0].position_distribution(), states[1].position_distribution());
        for (x, y) in a.probs().iter().zip(b.probs()) {
            max_branch = max_branch.max((x - y).abs());
        }
        accumulate(&mut plain, &states[0]);
        accumulate(&mut augmented, &states[1]);
    })?;

    let plain = Distribution::new(topo, plain.iter().map(CompensatedSum::value).collect())?;
    let augmented = Distribution::new(topo, augmented.iter().map(CompensatedSum::value).collect())?;
    let aggregate_discrepancy = crate::analysis::max_abs_diff(&plain, &augmented)?;
    Ok(SymmetryReport {
        symmetry: symmetry.name(),
        branches,
        max_branch_discrepancy: max_branch,
        aggregate_discrepancy,
        plain,
        augmented,
    })
}
