//! Lattice topologies, walker states and positional distributions.
//!
//! Both state types share one index layout over `coin ⊗ position`: the basis
//! vector `|c, x⟩` sits at `c * site_count + index(x)`, so the two coin rows
//! are contiguous blocks of length `site_count`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|a|² + |b|² = 1` for coin amplitudes.
pub const NORM_TOL: f64 = 1e-12;

/// The graph the walker moves on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Sites `-half_width ..= half_width`.
    Line { half_width: usize },
    /// Sites `0 .. sites`, arithmetic mod `sites`.
    Cycle { sites: usize },
}

impl Topology {
    pub fn line(half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::InvalidTopology("line half width must be at least 1".into()));
        }
        Ok(Topology::Line { half_width })
    }

    pub fn cycle(sites: usize) -> Result<Self> {
        if sites < 3 {
            return Err(Error::InvalidTopology(format!(
                "a cycle needs at least 3 sites, got {sites}"
            )));
        }
        Ok(Topology::Cycle { sites })
    }

    pub fn site_count(&self) -> usize {
        match *self {
            Topology::Line { half_width } => 2 * half_width + 1,
            Topology::Cycle { sites } => sites,
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Topology::Line { .. })
    }

    /// Signed label of storage index `idx`.
    pub fn label(&self, idx: usize) -> i64 {
        match *self {
            Topology::Line { half_width } => idx as i64 - half_width as i64,
            Topology::Cycle { .. } => idx as i64,
        }
    }

    /// Storage index of a site label. Cycle labels are reduced mod R, line
    /// labels outside the allocated range are rejected.
    pub fn index(&self, label: i64) -> Result<usize> {
        match *self {
            Topology::Line { half_width } => {
                let hw = half_width as i64;
                if (-hw..=hw).contains(&label) {
                    Ok((label + hw) as usize)
                } else {
                    Err(Error::InvalidSite { site: label, topology: *self })
                }
            }
            Topology::Cycle { sites } => Ok(label.rem_euclid(sites as i64) as usize),
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.site_count()).map(move |i| self.label(i))
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Line { half_width } => write!(f, "line(-{half_width}..={half_width})"),
            Topology::Cycle { sites } => write!(f, "cycle(R={sites})"),
        }
    }
}

/// Product initial state `(a|0⟩ + b|1⟩) ⊗ |x0⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialState {
    coin: [Complex64; 2],
    position: i64,
}

impl InitialState {
    pub fn new(a: Complex64, b: Complex64, position: i64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm });
        }
        Ok(InitialState { coin: [a, b], position })
    }

    /// `|c⟩ ⊗ |x0⟩` for a coin basis index `c`.
    pub fn basis(coin: usize, position: i64) -> Self {
        let mut amps = [Complex64::new(0.0, 0.0); 2];
        amps[coin & 1] = Complex64::new(1.0, 0.0);
        InitialState { coin: amps, position }
    }

    /// `(|0⟩ + i|1⟩)/√2 ⊗ |x0⟩`, the left-right symmetric start.
    pub fn symmetric(position: i64) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        InitialState {
            coin: [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            position,
        }
    }

    pub fn coin(&self) -> [Complex64; 2] {
        self.coin
    }

    pub fn position(&self) -> i64 {
        self.position
    }
}

/// Wavefunction over `coin ⊗ position`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    topology: Topology,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// All-zero state, used as scratch space and for unnormalized branches.
    pub fn zeros(topology: Topology) -> Self {
        PureState {
            amplitudes: vec![Complex64::new(0.0, 0.0); 2 * topology.site_count()],
            topology,
        }
    }

    pub fn from_amplitudes(topology: Topology, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 2 * topology.site_count() {
            return Err(Error::InvalidTopology(format!(
                "{} amplitudes do not fit {topology}",
                amplitudes.len()
            )));
        }
        Ok(PureState { topology, amplitudes })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub(crate) fn amplitudes_vec(&mut self) -> &mut Vec<Complex64> {
        &mut self.amplitudes
    }

    /// Amplitude `⟨coin, x|ψ⟩` by site label.
    pub fn amplitude(&self, coin: usize, label: i64) -> Result<Complex64> {
        let idx = self.topology.index(label)?;
        Ok(self.amplitudes[coin * self.topology.site_count() + idx])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        }
    }
}

/// Density operator over `coin ⊗ position`, stored dense and row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    topology: Topology,
    dim: usize,
    matrix: Vec<Complex64>,
}

impl DensityState {
    pub fn from_matrix(topology: Topology, matrix: Vec<Complex64>) -> Result<Self> {
        let dim = 2 * topology.site_count();
        if matrix.len() != dim * dim {
            return Err(Error::InvalidTopology(format!(
                "{} matrix entries do not fit {topology}",
                matrix.len()
            )));
        }
        Ok(DensityState { topology, dim, matrix })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut [Complex64] {
        &mut self.matrix
    }

    pub(crate) fn matrix_vec(&mut self) -> &mut Vec<Complex64> {
        &mut self.matrix
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Replace `ρ` by `ρ†` in place.
    pub(crate) fn adjoint_in_place(&mut self) {
        let d = self.dim;
        for r in 0..d {
            self.matrix[r * d + r] = self.matrix[r * d + r].conj();
            for c in (r + 1)..d {
                let upper = self.matrix[r * d + c];
                let lower = self.matrix[c * d + r];
                self.matrix[r * d + c] = lower.conj();
                self.matrix[c * d + r] = upper.conj();
            }
        }
    }
}

/// Probability of finding the walker at each site.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    topology: Topology,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(topology: Topology, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != topology.site_count() {
            return Err(Error::InvalidTopology(format!(
                "{} probabilities do not fit {topology}",
                probs.len()
            )));
        }
        Ok(Distribution { topology, probs })
    }

    pub fn delta(topology: Topology, label: i64) -> Result<Self> {
        let idx = topology.index(label)?;
        let mut probs = vec![0.0; topology.site_count()];
        probs[idx] = 1.0;
        Ok(Distribution { topology, probs })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Raw probabilities in storage order (may hold roundoff-level negatives).
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, label: i64) -> Result<f64> {
        Ok(self.probs[self.topology.index(label)?])
    }

    /// `(label, probability)` pairs with negative roundoff clamped to zero.
    pub fn reported(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.topology.label(i), p.max(0.0)))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Place the initial coin state at `x0`.
pub fn new_pure(init: &InitialState, topology: Topology) -> Result<PureState> {
    let idx = topology.index(init.position)?;
    if let Topology::Cycle { sites } = topology {
        if init.position < 0 || init.position >= sites as i64 {
            return Err(Error::InvalidSite { site: init.position, topology });
        }
    }
    let n = topology.site_count();
    let mut psi = PureState::zeros(topology);
    psi.amplitudes[idx] = init.coin[0];
    psi.amplitudes[n + idx] = init.coin[1];
    Ok(psi)
}

/// `|ψ⟩⟨ψ|`.
pub fn to_density(psi: &PureState) -> DensityState {
    let amps = &psi.amplitudes;
    let dim = amps.len();
    let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (r, row) in matrix.chunks_exact_mut(dim).enumerate() {
        let a = amps[r];
        if a.norm_sqr() == 0.0 {
            continue;
        }
        for (cell, b) in row.iter_mut().zip(amps) {
            *cell = a * b.conj();
        }
    }
    DensityState { topology: psi.topology, dim, matrix }
}

/// Anything a positional distribution can be read from.
pub trait PositionMarginal {
    fn position_distribution(&self) -> Distribution;
}

impl PositionMarginal for PureState {
    fn position_distribution(&self) -> Distribution {
        let n = self.topology.site_count();
        let (up, down) = self.amplitudes.split_at(n);
        let probs = up
            .iter()
            .zip(down)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect();
        Distribution { topology: self.topology, probs }
    }
}

impl PositionMarginal for DensityState {
    fn position_distribution(&self) -> Distribution {
        let n = self.topology.site_count();
        let probs = (0..n)
            .map(|i| self.get(i, i).re + self.get(n + i, n + i).re)
            .collect();
        Distribution { topology: self.topology, probs }
    }
}

/// Marginal over the coin: `P(x) = Σ_c ⟨c, x|state|c, x⟩`.
pub fn position_distribution<S: PositionMarginal + ?Sized>(state: &S) -> Distribution {
    state.position_distribution()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn topology_rejects_degenerate_sizes() {
        assert!(Topology::line(0).is_err());
        assert!(Topology::cycle(2).is_err());
        assert_eq!(Topology::line(5).unwrap().site_count(), 11);
        assert_eq!(Topology::cycle(7).unwrap().index(-1).unwrap(), 6);
        assert_eq!(Topology::cycle(7).unwrap().index(15).unwrap(), 1);
    }

    #[test]
    fn basis_start_on_line() {
        let topo = Topology::line(5).unwrap();
        let psi = new_pure(&InitialState::basis(0, 0), topo).unwrap();
        assert_eq!(psi.amplitude(0, 0).unwrap(), c(1.0, 0.0));
        let nonzero = psi.amplitudes().iter().filter(|a| a.norm() > 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn symmetric_start_is_normalized() {
        let init = InitialState::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2), 0).unwrap();
        let psi = new_pure(&init, Topology::line(3).unwrap()).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn placement_on_cycle() {
        let topo = Topology::cycle(7).unwrap();
        let init = InitialState::new(c(0.6, 0.0), c(0.0, 0.8), 3).unwrap();
        let psi = new_pure(&init, topo).unwrap();
        for coin in 0..2 {
            for x in 0..7 {
                let a = psi.amplitude(coin, x).unwrap();
                assert_eq!(a.norm() > 0.0, x == 3);
            }
        }
    }

    #[test]
    fn rejects_bad_site_and_unnormalized_coin() {
        let topo = Topology::line(2).unwrap();
        assert!(matches!(
            new_pure(&InitialState::basis(0, 3), topo),
            Err(Error::InvalidSite { site: 3, .. })
        ));
        assert!(matches!(
            new_pure(&InitialState::basis(0, 7), Topology::cycle(7).unwrap()),
            Err(Error::InvalidSite { .. })
        ));
        assert!(matches!(
            InitialState::new(c(1.0, 0.0), c(0.1, 0.0), 0),
            Err(Error::Unnormalized { .. })
        ));
    }

    #[test]
    fn density_of_basis_start_is_a_projector() {
        let topo = Topology::line(2).unwrap();
        let rho = to_density(&new_pure(&InitialState::basis(1, -1), topo).unwrap());
        let n = topo.site_count();
        let idx = n + topo.index(-1).unwrap();
        for r in 0..rho.dim() {
            for col in 0..rho.dim() {
                let expected = if r == idx && col == idx { 1.0 } else { 0.0 };
                assert_eq!(rho.get(r, col), c(expected, 0.0));
            }
        }
        assert_eq!(rho.purity(), 1.0);
    }

    #[test]
    fn density_of_symmetric_start_has_imaginary_coherences() {
        let topo = Topology::line(1).unwrap();
        let rho = to_density(&new_pure(&InitialState::symmetric(0), topo).unwrap());
        let (i0, i1) = (1, 3 + 1);
        assert!((rho.get(i0, i0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((rho.get(i1, i1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((rho.get(i0, i1) - c(0.0, -0.5)).norm() < 1e-15);
        assert!((rho.get(i1, i0) - c(0.0, 0.5)).norm() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pure_and_density_marginals_agree() {
        let topo = Topology::cycle(5).unwrap();
        let amps: Vec<Complex64> = (0..10)
            .map(|k| c((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let mut psi = PureState::from_amplitudes(topo, amps).unwrap();
        psi.normalize();
        let d1 = position_distribution(&psi);
        let d2 = position_distribution(&to_density(&psi));
        for (a, b) in d1.probs().iter().zip(d2.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((d1.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_distribution_without_steps() {
        let topo = Topology::line(4).unwrap();
        let psi = new_pure(&InitialState::symmetric(2), topo).unwrap();
        let d = position_distribution(&psi);
        let delta = Distribution::delta(topo, 2).unwrap();
        for (a, b) in d.probs().iter().zip(delta.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn reporting_clamps_roundoff() {
        let topo = Topology::cycle(3).unwrap();
        let d = Distribution::new(topo, vec![1.0 + 1e-17, -1e-17, 0.0]).unwrap();
        let reported: Vec<f64> = d.reported().map(|(_, p)| p).collect();
        assert_eq!(reported[1], 0.0);
        assert!(d.probs()[1] < 0.0);
    }

    #[test]
    fn adjoint_in_place_round_trips() {
        let topo = Topology::line(1).unwrap();
        let m: Vec<Complex64> = (0..36).map(|k| c(k as f64, -(k as f64) / 3.0)).collect();
        let mut rho = DensityState::from_matrix(topo, m.clone()).unwrap();
        rho.adjoint_in_place();
        assert_eq!(rho.get(0, 1), m[6].conj());
        rho.adjoint_in_place();
        assert_eq!(rho.matrix(), &m[..]);
    }
}
