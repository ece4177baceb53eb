//! The JSON experiment description. Angles are in degrees here and nowhere else.

use qwalk::{
    bit_flip, build_coin, gad_channel, gad_from_physical, phase_flip, CoinParams, Complex64,
    GadPhysicalParams, InitialState, KrausChannel, ShiftKind, StepPipeline, Symmetry, Topology,
    WalkConfig,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// A line just wide enough for the walk when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologySpec>,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub coin: CoinSpec,
    pub steps: usize,
    #[serde(default)]
    pub shift: ShiftSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symmetries: Vec<SymmetrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<TrajectorySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    /// `half_width` defaults to `steps + |x0|`.
    Line {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        half_width: Option<usize>,
    },
    Cycle { sites: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// `[[re, im], [re, im]]`
    pub coin: [[f64; 2]; 2],
    #[serde(default)]
    pub position: i64,
}

impl Default for InitialSpec {
    fn default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        InitialSpec { coin: [[s, 0.0], [0.0, s]], position: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinSpec {
    #[serde(default)]
    pub xi_deg: f64,
    pub theta_deg: f64,
    #[serde(default)]
    pub zeta_deg: f64,
}

impl Default for CoinSpec {
    fn default() -> Self {
        CoinSpec { xi_deg: 0.0, theta_deg: 45.0, zeta_deg: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftSpec {
    #[default]
    Forward,
    Reverse,
    FlipShift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", deny_unknown_fields)]
pub enum SymmetrySpec {
    Z,
    X,
    #[serde(rename = "PRX")]
    Prx,
    #[serde(rename = "XZ")]
    Xz,
    #[serde(rename = "ZX")]
    Zx,
    Phi { phi_deg: f64 },
    B1 { phi_deg: f64 },
    B2 { phi_deg: f64 },
    B3 { phi_deg: f64 },
    B4 { phi_deg: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    PhaseFlip { p: f64 },
    BitFlip { p: f64 },
    Gad {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chi: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_th: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryMode {
    #[default]
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    #[serde(default)]
    pub mode: TrajectoryMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_cap: Option<u64>,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {msg}"))
}

fn finite(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(field_error(field, format!("expected a finite number, got {v}")))
    }
}

pub fn parse(text: &str, origin: &str) -> Result<ExperimentConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let location = format!("{origin}:{}:{}", inner.line(), inner.column());
        if path == "." {
            CliError::Config(format!("{location}: {inner}"))
        } else {
            CliError::Config(format!("{location}: field `{path}`: {inner}"))
        }
    })
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

impl SymmetrySpec {
    pub fn to_symmetry(&self, field: &str) -> Result<Symmetry, CliError> {
        let variant = |j: u8, phi: f64| -> Result<Symmetry, CliError> {
            Ok(Symmetry::Variant { j, phi: finite(&format!("{field}.phi_deg"), phi)?.to_radians() })
        };
        match *self {
            SymmetrySpec::Z => Ok(Symmetry::Z),
            SymmetrySpec::X => Ok(Symmetry::X),
            SymmetrySpec::Prx => Ok(Symmetry::Prx),
            SymmetrySpec::Xz => Ok(Symmetry::Xz),
            SymmetrySpec::Zx => Ok(Symmetry::Zx),
            SymmetrySpec::Phi { phi_deg } => {
                Ok(Symmetry::Phi(finite(&format!("{field}.phi_deg"), phi_deg)?.to_radians()))
            }
            SymmetrySpec::B1 { phi_deg } => variant(1, phi_deg),
            SymmetrySpec::B2 { phi_deg } => variant(2, phi_deg),
            SymmetrySpec::B3 { phi_deg } => variant(3, phi_deg),
            SymmetrySpec::B4 { phi_deg } => variant(4, phi_deg),
        }
    }

    /// Parses `Z`, `X`, `PRX`, `XZ`, `ZX`, `Phi(φ)` and `B1(φ)`..`B4(φ)`, φ in degrees.
    pub fn from_name(name: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("unknown symmetry `{name}`"));
        let name = name.trim();
        if let Some((head, rest)) = name.split_once('(') {
            let arg = rest.strip_suffix(')').ok_or_else(bad)?;
            let phi_deg: f64 = arg.trim().parse().map_err(|_| bad())?;
            return match head.trim() {
                "Phi" | "PHI" | "phi" => Ok(SymmetrySpec::Phi { phi_deg }),
                "B1" => Ok(SymmetrySpec::B1 { phi_deg }),
                "B2" => Ok(SymmetrySpec::B2 { phi_deg }),
                "B3" => Ok(SymmetrySpec::B3 { phi_deg }),
                "B4" => Ok(SymmetrySpec::B4 { phi_deg }),
                _ => Err(bad()),
            };
        }
        match name {
            "Z" => Ok(SymmetrySpec::Z),
            "X" => Ok(SymmetrySpec::X),
            "PRX" => Ok(SymmetrySpec::Prx),
            "XZ" => Ok(SymmetrySpec::Xz),
            "ZX" => Ok(SymmetrySpec::Zx),
            _ => Err(bad()),
        }
    }
}

impl ChannelSpec {
    pub fn build(&self) -> Result<KrausChannel, CliError> {
        let range = |field: &str, e: qwalk::Error| field_error(field, e);
        match *self {
            ChannelSpec::PhaseFlip { p } => phase_flip(p).map_err(|e| range("channel.p", e)),
            ChannelSpec::BitFlip { p } => bit_flip(p).map_err(|e| range("channel.p", e)),
            ChannelSpec::Gad { p, chi, gamma0, n_th, t } => match (p, chi, gamma0, n_th, t) {
                (Some(p), chi, None, None, None) => {
                    let chi = chi.unwrap_or(1.0);
                    gad_channel(p, chi).map_err(|e| match e {
                        qwalk::Error::ParameterRange { name: "chi", .. } => range("channel.chi", e),
                        e => range("channel.p", e),
                    })
                }
                (None, None, Some(g), Some(n), Some(t)) => {
                    let params = GadPhysicalParams::new(g, n, t).map_err(|e| match e {
                        qwalk::Error::ParameterRange { name, .. } => range(&format!("channel.{name}"), e),
                        e => range("channel", e),
                    })?;
                    gad_from_physical(&params).map_err(|e| range("channel", e))
                }
                _ => Err(field_error(
                    "channel",
                    "gad needs either `p` (and optional `chi`) or all of `gamma0`, `n_th`, `t`",
                )),
            },
        }
    }

    /// The same channel with its strength replaced.
    pub fn with_p(&self, new_p: f64) -> Result<ChannelSpec, CliError> {
        match self {
            ChannelSpec::PhaseFlip { .. } => Ok(ChannelSpec::PhaseFlip { p: new_p }),
            ChannelSpec::BitFlip { .. } => Ok(ChannelSpec::BitFlip { p: new_p }),
            ChannelSpec::Gad { p: Some(_), chi, .. } => Ok(ChannelSpec::Gad {
                p: Some(new_p),
                chi: *chi,
                gamma0: None,
                n_th: None,
                t: None,
            }),
            ChannelSpec::Gad { .. } => {
                Err(field_error("channel", "a p sweep needs a gad channel given by `p`"))
            }
        }
    }
}

impl ExperimentConfig {
    /// Defaults for the `cycle` subcommand.
    pub fn cycle_default() -> Self {
        ExperimentConfig {
            topology: Some(TopologySpec::Cycle { sites: 101 }),
            initial: InitialSpec::default(),
            coin: CoinSpec { xi_deg: 0.0, theta_deg: 30.0, zeta_deg: 0.0 },
            steps: 5000,
            shift: ShiftSpec::Forward,
            symmetries: Vec::new(),
            channel: None,
            trajectories: None,
            output: None,
        }
    }

    pub fn is_line(&self) -> bool {
        !matches!(self.topology, Some(TopologySpec::Cycle { .. }))
    }

    fn initial_state(&self) -> Result<InitialState, CliError> {
        let [[ar, ai], [br, bi]] = self.initial.coin;
        for (i, v) in [ar, ai, br, bi].into_iter().enumerate() {
            finite(&format!("initial.coin[{}][{}]", i / 2, i % 2), v)?;
        }
        InitialState::new(Complex64::new(ar, ai), Complex64::new(br, bi), self.initial.position)
            .map_err(|e| field_error("initial.coin", e))
    }

    fn topology(&self) -> Result<Topology, CliError> {
        match self.topology {
            Some(TopologySpec::Line { half_width: Some(hw) }) => {
                Topology::line(hw).map_err(|e| field_error("topology.half_width", e))
            }
            Some(TopologySpec::Line { half_width: None }) | None => {
                let hw = (self.steps + self.initial.position.unsigned_abs() as usize).max(1);
                Ok(Topology::Line { half_width: hw })
            }
            Some(TopologySpec::Cycle { sites }) => {
                Topology::cycle(sites).map_err(|e| field_error("topology.sites", e))
            }
        }
    }

    pub fn symmetry_list(&self) -> Result<Vec<Symmetry>, CliError> {
        self.symmetries
            .iter()
            .enumerate()
            .map(|(i, s)| s.to_symmetry(&format!("symmetries[{i}]")))
            .collect()
    }

    /// The walk without the configured symmetry operations.
    pub fn plain_walk(&self) -> Result<WalkConfig, CliError> {
        let params = CoinParams::from_degrees(
            finite("coin.xi_deg", self.coin.xi_deg)?,
            finite("coin.theta_deg", self.coin.theta_deg)?,
            finite("coin.zeta_deg", self.coin.zeta_deg)?,
        );
        let shift = match self.shift {
            ShiftSpec::Forward => ShiftKind::Forward,
            ShiftSpec::Reverse => ShiftKind::Reverse,
            ShiftSpec::FlipShift => ShiftKind::FlipShift,
        };
        let mut pipeline = StepPipeline::new(build_coin(params)).with_shift(shift);
        if let Some(ch) = &self.channel {
            pipeline = pipeline.with_channel(ch.build()?);
        }
        let topology = self.topology()?;
        let initial = self.initial_state()?;
        topology
            .index(initial.position())
            .map_err(|e| field_error("initial.position", e))?;
        let cfg = WalkConfig { topology, initial, pipeline, steps: self.steps, overrides: None };
        cfg.validate().map_err(|e| match e {
            qwalk::Error::LightConeOverflow { .. } => field_error("topology.half_width", e),
            e => field_error("channel", e),
        })?;
        Ok(cfg)
    }

    /// The walk with every configured symmetry operation applied in order.
    pub fn walk(&self) -> Result<WalkConfig, CliError> {
        let mut cfg = self.plain_walk()?;
        for (i, s) in self.symmetry_list()?.into_iter().enumerate() {
            cfg = s.apply(&cfg).map_err(|e| field_error(&format!("symmetries[{i}]"), e))?;
        }
        Ok(cfg)
    }
}
