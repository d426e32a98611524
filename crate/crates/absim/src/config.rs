//! Configuration documents: parsing, defaulting, and validation.
//!
//! A config is a JSON object with top-level keys `experiment`, `setup`,
//! `grid`, `dt`, `sigma0`, `schedule`, `mirror`, `tolerances`. Everything
//! except `experiment` and `setup` may be omitted and is filled with
//! experiment-appropriate defaults. Unknown keys anywhere are an error, so
//! a typo cannot silently fall back to a default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mirror::MirrorSpec;
use crate::setup::{ElectricSetup, MagneticSetup};

/// Which experiment a config describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Electric,
    Magnetic,
    NullCheck,
}

/// Spatial grid request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Point count; must be a power of two.
    pub points: usize,
    /// Total width of the (symmetric) grid window.
    pub extent: f64,
}

/// Classical transport schedule framing the interaction window: `pre` units
/// of settling before the sources arrive, the dwell itself (its length
/// comes from the setup), and `post` units after they leave. When
/// `omit_return` is set the run ends at the close of the dwell with the
/// sources still in place, which is the configuration that keeps the
/// branches entangled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub pre: f64,
    pub post: f64,
    #[serde(default)]
    pub omit_return: bool,
}

/// Comparison thresholds used by scenario reports against the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance on the simulated phase vs the closed form.
    pub phase_error: f64,
    /// Relative tolerance on the simulated shift vs the closed form.
    pub shift_error: f64,
    /// Relative tolerance handed to adaptive quadrature.
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { phase_error: 0.02, shift_error: 0.05, quadrature: 1e-10 }
    }
}

/// Setup payload for the triggered null check: the electron plus two
/// external charges of magnitude `Q` at distance `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullCheckSetup {
    #[serde(rename = "Q")]
    pub q: f64,
    pub r: f64,
}

impl NullCheckSetup {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(Error::validation("r", "r > 0", format!("got {}", self.r)));
        }
        if !self.q.is_finite() {
            return Err(Error::validation("Q", "finite", format!("got {}", self.q)));
        }
        Ok(())
    }
}

/// One experiment's setup record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetupDocument {
    Electric(ElectricSetup),
    Magnetic(MagneticSetup),
    NullCheck(NullCheckSetup),
}

/// A fully resolved, validated simulation configuration. All quantities are
/// in simulation units (hbar = e = c = 1); the schedule and grid defaults
/// are derived from the setup when omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub experiment: ExperimentKind,
    pub setup: SetupDocument,
    pub grid: GridSpec,
    pub dt: f64,
    pub sigma0: f64,
    pub schedule: Schedule,
    pub mirror: MirrorSpec,
    pub tolerances: Tolerances,
}

/// Raw document shape before defaulting.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    setup: serde_json::Value,
    grid: Option<GridSpec>,
    dt: Option<f64>,
    sigma0: Option<f64>,
    schedule: Option<Schedule>,
    mirror: Option<MirrorSpec>,
    tolerances: Option<Tolerances>,
}

fn default_mirror() -> MirrorSpec {
    MirrorSpec { v_plateau: 50.0, d: 1.0, w: 0.25, wall_scale: 0.1 }
}

/// Parse and validate a config document, filling defaults.
pub fn load_config(text: &str) -> Result<SimulationConfig> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;

    let setup = match raw.experiment {
        ExperimentKind::Electric => {
            let s: ElectricSetup = serde_json::from_value(raw.setup)
                .map_err(|e| Error::Parse(format!("setup (electric): {e}")))?;
            SetupDocument::Electric(s)
        }
        ExperimentKind::Magnetic => {
            let s: MagneticSetup = serde_json::from_value(raw.setup)
                .map_err(|e| Error::Parse(format!("setup (magnetic): {e}")))?;
            SetupDocument::Magnetic(s)
        }
        ExperimentKind::NullCheck => {
            let s: NullCheckSetup = serde_json::from_value(raw.setup)
                .map_err(|e| Error::Parse(format!("setup (null_check): {e}")))?;
            SetupDocument::NullCheck(s)
        }
    };

    let sigma0 = raw.sigma0.unwrap_or(0.25);
    let (grid, dt, schedule) = match (&setup, raw.experiment) {
        (SetupDocument::Electric(s), _) => {
            let slack = 0.5 * (s.tau - s.t_dwell);
            (
                raw.grid.unwrap_or(GridSpec { points: 4096, extent: 16.0 }),
                raw.dt.unwrap_or(0.005),
                raw.schedule.unwrap_or(Schedule { pre: slack, post: slack, omit_return: false }),
            )
        }
        (SetupDocument::Magnetic(s), _) => {
            let transit = std::f64::consts::PI * s.orbit_radius / s.u;
            (
                raw.grid.unwrap_or(GridSpec { points: 8192, extent: 8.0 }),
                raw.dt.unwrap_or(transit / 256.0),
                raw.schedule.unwrap_or(Schedule {
                    pre: transit / 8.0,
                    post: transit / 8.0,
                    omit_return: false,
                }),
            )
        }
        (SetupDocument::NullCheck(_), _) => (
            raw.grid.unwrap_or(GridSpec { points: 4096, extent: 16.0 }),
            raw.dt.unwrap_or(0.005),
            raw.schedule.unwrap_or(Schedule { pre: 0.0, post: 0.0, omit_return: false }),
        ),
    };

    let cfg = SimulationConfig {
        experiment: raw.experiment,
        setup,
        grid,
        dt,
        sigma0,
        schedule,
        mirror: raw.mirror.unwrap_or_else(default_mirror),
        tolerances: raw.tolerances.unwrap_or_default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        match (&self.setup, self.experiment) {
            (SetupDocument::Electric(s), ExperimentKind::Electric) => s.validate()?,
            (SetupDocument::Magnetic(s), ExperimentKind::Magnetic) => s.validate()?,
            (SetupDocument::NullCheck(s), ExperimentKind::NullCheck) => s.validate()?,
            _ => {
                return Err(Error::validation(
                    "setup",
                    "setup record matches `experiment`",
                    "setup shape does not belong to the declared experiment",
                ))
            }
        }
        if !self.grid.points.is_power_of_two() || self.grid.points == 0 {
            return Err(Error::validation(
                "grid.points",
                "power of two",
                format!("got {}", self.grid.points),
            ));
        }
        if !(self.grid.extent > 0.0) {
            return Err(Error::validation(
                "grid.extent",
                "positive",
                format!("got {}", self.grid.extent),
            ));
        }
        if !(self.dt > 0.0) {
            return Err(Error::validation("dt", "positive", format!("got {}", self.dt)));
        }
        if !(self.sigma0 > 0.0) {
            return Err(Error::validation("sigma0", "positive", format!("got {}", self.sigma0)));
        }
        let dx = self.grid.extent / self.grid.points as f64;
        if self.sigma0 < 4.0 * dx {
            return Err(Error::validation(
                "sigma0",
                "sigma0 >= 4 dx",
                format!("sigma0 = {}, dx = {dx}", self.sigma0),
            ));
        }
        if self.schedule.pre < 0.0 || self.schedule.post < 0.0 {
            return Err(Error::validation(
                "schedule",
                "pre/post >= 0",
                format!("pre = {}, post = {}", self.schedule.pre, self.schedule.post),
            ));
        }
        self.mirror.validate()?;
        if !(self.tolerances.phase_error > 0.0)
            || !(self.tolerances.shift_error > 0.0)
            || !(self.tolerances.quadrature > 0.0 && self.tolerances.quadrature <= 1e-3)
        {
            return Err(Error::validation(
                "tolerances",
                "phase_error > 0, shift_error > 0, 0 < quadrature <= 1e-3",
                format!("{:?}", self.tolerances),
            ));
        }
        // The grid window must hold the packet trajectory with a 6 sigma
        // margin on each side; the trajectory span is experiment-specific.
        let needed = match &self.setup {
            SetupDocument::Electric(_) => 12.0 * self.sigma0,
            SetupDocument::Magnetic(s) => {
                let drift = s.v * (std::f64::consts::PI * s.orbit_radius / s.u
                    + self.schedule.pre
                    + self.schedule.post);
                2.0 * drift + 12.0 * self.sigma0
            }
            SetupDocument::NullCheck(_) => 0.0,
        };
        if self.grid.extent < needed {
            return Err(Error::validation(
                "grid.extent",
                "extent covers the packet trajectory plus 6 sigma margins",
                format!("extent = {}, needed >= {needed}", self.grid.extent),
            ));
        }
        Ok(())
    }

    /// Non-fatal observations about the configuration (aspect ratios, ...).
    pub fn warnings(&self) -> Vec<String> {
        match &self.setup {
            SetupDocument::Magnetic(s) => s.aspect_ratio_warnings(),
            _ => Vec::new(),
        }
    }

    /// Canonical serialized form; also the input of the config digest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialization cannot fail")
    }
}
