//! Coin operators and single-qubit symmetry gates.
//!
//! A coin is the SU(2) matrix
//!
//! ```text
//! B(ξ, θ, ζ) = [ e^{iξ} cos θ     e^{iζ} sin θ ]
//!              [ e^{-iζ} sin θ   -e^{-iξ} cos θ ]
//! ```
//!
//! `B(0, 45°, 0)` is the Hadamard coin. A variant `B^(j)(φ)` multiplies
//! entries by a phase depending on the row (`j = 1`), the column (`j = 2`) or
//! the complemented row/column (`j = 3`, `j = 4`). All four variants leave the
//! position distribution of a walk started in a coin basis state unchanged.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cis, Mat2};

const TAU: f64 = 2.0 * PI;

/// Reduce an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        PI
    } else {
        r
    }
}

/// Generating angles of a coin, in radians.
///
/// Stored canonically with `θ ∈ [0, π/2]` and `ξ, ζ ∈ (-π, π]`. Every input
/// triple is mapped to a canonical one that builds exactly the same matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinParams {
    xi: f64,
    theta: f64,
    zeta: f64,
}

impl CoinParams {
    pub fn new(xi: f64, theta: f64, zeta: f64) -> Self {
        let (mut xi, mut zeta) = (xi, zeta);
        let mut theta = theta.rem_euclid(TAU);
        // B(ξ+π, θ, ζ+π) = -B(ξ, θ, ζ), B(ξ+π, π-θ, ζ) = B(ξ, θ, ζ) and
        // B(ξ, -θ, ζ+π) = B(ξ, θ, ζ) fold θ into [0, π/2].
        if theta >= PI {
            theta -= PI;
            xi += PI;
            zeta += PI;
        }
        if theta > FRAC_PI_2 {
            theta = PI - theta;
            xi += PI;
        }
        CoinParams {
            xi: wrap_angle(xi),
            theta,
            zeta: wrap_angle(zeta),
        }
    }

    pub fn from_degrees(xi: f64, theta: f64, zeta: f64) -> Self {
        CoinParams::new(xi.to_radians(), theta.to_radians(), zeta.to_radians())
    }

    /// `B(0, θ, 0)`.
    pub fn biased(theta: f64) -> Self {
        CoinParams::new(0.0, theta, 0.0)
    }

    pub fn hadamard() -> Self {
        CoinParams::biased(PI / 4.0)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }
}

/// Phase decoration `B^(j)(φ)` carried by a variant coin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Variant {
    pub j: u8,
    pub phi: f64,
}

/// A coin matrix together with the parameters it was built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinOp {
    matrix: Mat2,
    params: CoinParams,
    variant: Option<Variant>,
}

impl CoinOp {
    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn params(&self) -> CoinParams {
        self.params
    }

    pub fn variant(&self) -> Option<Variant> {
        self.variant
    }

    pub fn hadamard() -> Self {
        build_coin(CoinParams::hadamard())
    }

    /// The undecorated coin with angularly reflected parameters.
    pub fn reflected(&self) -> Result<Self> {
        match self.variant {
            Some(v) => Err(Error::DecoratedCoin(v.j)),
            None => Ok(build_coin(reflect_params(self.params))),
        }
    }
}

pub fn build_coin(params: CoinParams) -> CoinOp {
    let (s, c) = params.theta.sin_cos();
    let (s, c) = snap_trig(s, c);
    let ex = cis(params.xi);
    let ez = cis(params.zeta);
    let matrix = Mat2::new(ex * c, ez * s, ez.conj() * s, -ex.conj() * c);
    CoinOp { matrix, params, variant: None }
}

// cos(π/2) is 6e-17 in floating point; the θ = 0 and θ = π/2 coins should be
// exact permutation/diagonal matrices.
fn snap_trig(s: f64, c: f64) -> (f64, f64) {
    if c.abs() < 1e-16 {
        (1.0, 0.0)
    } else if s.abs() < 1e-16 {
        (0.0, 1.0)
    } else {
        (s, c)
    }
}

/// `B^(j)(φ)`: entry `(r, k)` gains `e^{i r φ}` (j=1), `e^{i k φ}` (j=2),
/// `e^{i (1-r) φ}` (j=3) or `e^{i (1-k) φ}` (j=4).
///
/// Decorating a variant again is allowed only with the same `j`, in which case
/// the phases add.
pub fn variant_coin(base: &CoinOp, j: u8, phi: f64) -> Result<CoinOp> {
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidVariant(j));
    }
    let total_phi = match base.variant {
        Some(v) if v.j != j => return Err(Error::MixedVariant { existing: v.j, requested: j }),
        Some(v) => v.phi + phi,
        None => phi,
    };
    let phase = cis(phi);
    let mut m = base.matrix.0;
    for (r, row) in m.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            let exponent = match j {
                1 => r,
                2 => k,
                3 => 1 - r,
                _ => 1 - k,
            };
            if exponent == 1 {
                *cell *= phase;
            }
        }
    }
    Ok(CoinOp {
        matrix: Mat2(m),
        params: base.params,
        variant: Some(Variant { j, phi: total_phi }),
    })
}

/// Angular reflection: `θ → π/2 − θ`, `ξ → −ζ`, `ζ → −ξ`. An involution.
pub fn reflect_params(p: CoinParams) -> CoinParams {
    CoinParams {
        xi: wrap_angle(-p.zeta),
        theta: FRAC_PI_2 - p.theta,
        zeta: wrap_angle(-p.xi),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    /// `|0⟩⟨0| + e^{iφ}|1⟩⟨1|`
    PhaseShift(f64),
    PauliZ,
    PauliX,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    matrix: Mat2,
}

impl GateOp {
    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }
}

pub fn gate(kind: GateKind) -> GateOp {
    let one = Complex64::new(1.0, 0.0);
    let matrix = match kind {
        GateKind::PhaseShift(phi) => Mat2::diag(one, cis(phi)),
        GateKind::PauliZ => Mat2::real(1.0, 0.0, 0.0, -1.0),
        GateKind::PauliX => Mat2::real(0.0, 1.0, 1.0, 0.0),
        GateKind::Identity => Mat2::IDENTITY,
    };
    GateOp { kind, matrix }
}
