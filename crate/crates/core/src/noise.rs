//! Coin-space decoherence channels in Kraus form.
//!
//! A channel `{E_j}` with `Σ_j E_j†E_j = I` acts on the full walker state as
//! `ρ → Σ_j (E_j ⊗ I) ρ (E_j ⊗ I)†`. The lift to `coin ⊗ position` is applied
//! block by block: for every pair of sites `(x, y)` the 2×2 coin block
//! `ρ[(·, x), (·, y)]` is pushed through the single-qubit map.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::DensityState;
use crate::linalg::Mat2;

/// Tolerance on `‖Σ E_j†E_j − I‖_max`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelLabel {
    PhaseFlip { p: f64 },
    BitFlip { p: f64 },
    /// Generalized amplitude damping.
    Gad { p: f64, chi: f64 },
    Custom,
}

impl fmt::Display for ChannelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelLabel::PhaseFlip { p } => write!(f, "phase_flip(p={p})"),
            ChannelLabel::BitFlip { p } => write!(f, "bit_flip(p={p})"),
            ChannelLabel::Gad { p, chi } => write!(f, "gad(p={p}, chi={chi})"),
            ChannelLabel::Custom => write!(f, "custom"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Mat2>,
    label: ChannelLabel,
}

impl KrausChannel {
    /// Validates completeness.
    pub fn from_operators(operators: Vec<Mat2>, label: ChannelLabel) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::Empty("Kraus operator list"));
        }
        let ch = KrausChannel { operators, label };
        let deviation = ch.completeness_defect();
        if !(deviation <= COMPLETENESS_TOL) {
            return Err(Error::Completeness { deviation });
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        KrausChannel { operators: vec![Mat2::IDENTITY], label: ChannelLabel::Custom }
    }

    pub fn operators(&self) -> &[Mat2] {
        &self.operators
    }

    pub fn label(&self) -> ChannelLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `‖Σ E_j†E_j − I‖_max`.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(Mat2::ZERO, |acc, e| acc + e.adjoint() * *e);
        let d = sum.max_abs_diff(&Mat2::IDENTITY);
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    }

    /// Single-qubit action `Σ E_j ρ E_j†`.
    pub fn apply_to_qubit(&self, rho: &Mat2) -> Mat2 {
        self.operators
            .iter()
            .fold(Mat2::ZERO, |acc, e| acc + *e * *rho * e.adjoint())
    }

    /// Every operator is a multiple of a unitary, so branch weights do not
    /// depend on the state.
    pub fn is_unitary_mixture(&self) -> bool {
        self.operators.iter().all(|e| {
            let g = e.adjoint() * *e;
            let w = g.get(0, 0).re;
            g.max_abs_diff(&Mat2::IDENTITY.scale(w.into())) < COMPLETENESS_TOL
        })
    }

    /// Coin block superoperator: `vec(M') = S vec(M)` with `vec` ordering
    /// `(00, 01, 10, 11)`.
    pub(crate) fn superoperator(&self) -> [[Complex64; 4]; 4] {
        let mut s = [[Complex64::new(0.0, 0.0); 4]; 4];
        for e in &self.operators {
            for c in 0..2 {
                for d in 0..2 {
                    for a in 0..2 {
                        for b in 0..2 {
                            s[2 * c + d][2 * a + b] += e.get(c, a) * e.get(d, b).conj();
                        }
                    }
                }
            }
        }
        s
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterRange { name, value, range: "[0, 1]" })
    }
}

/// `ρ → (1 − p)ρ + p ZρZ`.
pub fn phase_flip(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let keep = (1.0 - p).sqrt();
    let flip = p.sqrt();
    KrausChannel::from_operators(
        vec![Mat2::real(keep, 0.0, 0.0, keep), Mat2::real(flip, 0.0, 0.0, -flip)],
        ChannelLabel::PhaseFlip { p },
    )
}

/// `ρ → (1 − p)ρ + p XρX`.
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let keep = (1.0 - p).sqrt();
    let flip = p.sqrt();
    KrausChannel::from_operators(
        vec![Mat2::real(keep, 0.0, 0.0, keep), Mat2::real(0.0, flip, flip, 0.0)],
        ChannelLabel::BitFlip { p },
    )
}

/// Generalized amplitude damping with damping strength `p` and thermal
/// weight `χ ∈ [1/2, 1]` (`χ = 1` is zero temperature).
///
/// ```text
/// E0 = √χ diag(1, √(1−p))         E1 = √χ √p |0⟩⟨1|
/// E2 = √(1−χ) diag(√(1−p), 1)     E3 = √(1−χ) √p |1⟩⟨0|
/// ```
pub fn gad_channel(p: f64, chi: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    gad_with_survival(p, 1.0 - p, chi)
}

/// `survival` is `1 − p`, passed separately so that strong damping keeps
/// its relative precision.
fn gad_with_survival(p: f64, survival: f64, chi: f64) -> Result<KrausChannel> {
    if !(0.5..=1.0).contains(&chi) {
        return Err(Error::ParameterRange { name: "chi", value: chi, range: "[1/2, 1]" });
    }
    let (a, b) = (chi.sqrt(), (1.0 - chi).sqrt());
    let (keep, decay) = (survival.sqrt(), p.sqrt());
    KrausChannel::from_operators(
        vec![
            Mat2::real(a, 0.0, 0.0, a * keep),
            Mat2::real(0.0, a * decay, 0.0, 0.0),
            Mat2::real(b * keep, 0.0, 0.0, b),
            Mat2::real(0.0, 0.0, b * decay, 0.0),
        ],
        ChannelLabel::Gad { p, chi },
    )
}

/// Coupling rate `γ0`, thermal occupation `N_th` and interaction time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GadPhysicalParams {
    pub gamma0: f64,
    pub n_th: f64,
    pub t: f64,
}

impl GadPhysicalParams {
    pub fn new(gamma0: f64, n_th: f64, t: f64) -> Result<Self> {
        for (name, value) in [("gamma0", gamma0), ("n_th", n_th), ("t", t)] {
            if !(value >= 0.0) || value.is_infinite() {
                return Err(Error::ParameterRange { name, value, range: "[0, ∞)" });
            }
        }
        Ok(GadPhysicalParams { gamma0, n_th, t })
    }

    fn thermal_factor(&self) -> f64 {
        2.0 * self.n_th + 1.0
    }

    /// `e^{−γ0 (2N_th + 1) t}`
    fn decay(&self) -> f64 {
        (-self.gamma0 * self.thermal_factor() * self.t).exp()
    }

    /// `p(t) = 1 − e^{−γ0 (2N_th + 1) t}`
    pub fn p(&self) -> f64 {
        -(-self.gamma0 * self.thermal_factor() * self.t).exp_m1()
    }

    /// `χ = (1 + 1/(2N_th + 1)) / 2`
    pub fn chi(&self) -> f64 {
        0.5 * (1.0 + 1.0 / self.thermal_factor())
    }
}

pub fn gad_from_physical(params: &GadPhysicalParams) -> Result<KrausChannel> {
    gad_with_survival(params.p(), params.decay(), params.chi())
}

/// Pure dephasing strength `(ħω)²` and accumulated exponent `γ(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingPhysicalParams {
    pub hbar_omega: f64,
    pub gamma_t: f64,
}

impl DephasingPhysicalParams {
    pub fn new(hbar_omega: f64, gamma_t: f64) -> Result<Self> {
        if !hbar_omega.is_finite() {
            return Err(Error::ParameterRange {
                name: "hbar_omega",
                value: hbar_omega,
                range: "finite",
            });
        }
        if !(gamma_t >= 0.0) {
            return Err(Error::ParameterRange { name: "gamma_t", value: gamma_t, range: "[0, ∞]" });
        }
        Ok(DephasingPhysicalParams { hbar_omega, gamma_t })
    }

    /// `p = (1 − exp[−(ħω)² γ(t)]) / 2`
    pub fn p(&self) -> f64 {
        let x = self.hbar_omega * self.hbar_omega * self.gamma_t;
        if x.is_nan() {
            // ħω = 0 with γ = ∞: no coupling.
            return 0.0;
        }
        -0.5 * (-x).exp_m1()
    }

    pub fn channel(&self) -> Result<KrausChannel> {
        phase_flip(self.p())
    }
}

/// Single-qubit state in Bloch form:
///
/// ```text
/// ρ = [ (1 + ⟨σ3⟩)/2      ⟨σ−⟩       ]
///     [ ⟨σ+⟩              (1 − ⟨σ3⟩)/2 ]
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitBloch {
    s3: f64,
    s_minus: Complex64,
}

impl QubitBloch {
    pub fn new(s3: f64, s_minus: Complex64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&s3) {
            return Err(Error::ParameterRange { name: "s3", value: s3, range: "[-1, 1]" });
        }
        let bound = 0.5 * (1.0 - s3 * s3).sqrt();
        if !(s_minus.norm() <= bound + 1e-12) {
            return Err(Error::ParameterRange {
                name: "|s_minus|",
                value: s_minus.norm(),
                range: "[0, sqrt(1 - s3^2)/2]",
            });
        }
        Ok(QubitBloch { s3, s_minus })
    }

    pub fn s3(&self) -> f64 {
        self.s3
    }

    pub fn s_minus(&self) -> Complex64 {
        self.s_minus
    }

    pub fn to_matrix(&self) -> Mat2 {
        Mat2::new(
            Complex64::new(0.5 * (1.0 + self.s3), 0.0),
            self.s_minus,
            self.s_minus.conj(),
            Complex64::new(0.5 * (1.0 - self.s3), 0.0),
        )
    }

    /// Reads Bloch data back from a Hermitian 2×2 matrix. No validation.
    pub fn from_matrix(m: &Mat2) -> Self {
        QubitBloch {
            s3: (m.get(0, 0) - m.get(1, 1)).re,
            s_minus: 0.5 * (m.get(0, 1) + m.get(1, 0).conj()),
        }
    }
}

/// Closed-form thermal relaxation:
///
/// ```text
/// A1 = e^{−γ0(2N+1)t} ⟨σ3(0)⟩ − (1 − e^{−γ0(2N+1)t}) / (2N+1)
/// A2 = e^{−(γ0/2)(2N+1)t} ⟨σ−(0)⟩
/// ```
///
/// The formula relaxes toward `⟨σ3⟩ = −1` at zero temperature, i.e. it is
/// written in the labeling where the damping Kraus set of [`gad_channel`] is
/// conjugated by X. [`gad_kraus_relabeled`] gives the matching Kraus set.
pub fn gad_closed_form(rho0: &QubitBloch, params: &GadPhysicalParams) -> QubitBloch {
    let decay = params.decay();
    let a1 = decay * rho0.s3 - params.p() / params.thermal_factor();
    let a2 = (-0.5 * params.gamma0 * params.thermal_factor() * params.t).exp() * rho0.s_minus;
    QubitBloch { s3: a1, s_minus: a2 }
}

/// The GAD Kraus set with coin labels swapped: `{X E_j X}`.
pub fn gad_kraus_relabeled(params: &GadPhysicalParams) -> Result<KrausChannel> {
    let ch = gad_from_physical(params)?;
    let x = Mat2::real(0.0, 1.0, 1.0, 0.0);
    KrausChannel::from_operators(
        ch.operators.iter().map(|e| x * *e * x).collect(),
        ch.label,
    )
}

/// `ρ ← Σ_j (E_j ⊗ I) ρ (E_j ⊗ I)†`.
pub fn apply_channel(rho: &DensityState, channel: &KrausChannel) -> Result<DensityState> {
    let mut out = rho.clone();
    apply_channel_in_place(&mut out, channel)?;
    Ok(out)
}

pub(crate) fn apply_channel_in_place(rho: &mut DensityState, channel: &KrausChannel) -> Result<()> {
    let deviation = channel.completeness_defect();
    if deviation > COMPLETENESS_TOL {
        return Err(Error::Completeness { deviation });
    }
    let s = channel.superoperator();
    let n = rho.topology().site_count();
    let dim = rho.dim();
    let m = rho.matrix_mut();
    for x in 0..n {
        for y in 0..n {
            let idx = [x * dim + y, x * dim + n + y, (n + x) * dim + y, (n + x) * dim + n + y];
            let v = idx.map(|i| m[i]);
            for (row, &i) in s.iter().zip(&idx) {
                m[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
        }
    }
    Ok(())
}
