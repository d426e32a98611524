//! Experiment parameter records and the unit-scaling map.
//!
//! Quantities follow Gaussian CGS dimensions. A charge in Gaussian units
//! carries dimension g^(1/2) cm^(3/2) s^(-1), which is what makes the phase
//! combinations like e*Q*T/(r*hbar) come out dimensionless without any
//! permittivity factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the one-dimensional electric interferometer experiment:
/// two identical charges approach the mirror of one interferometer arm,
/// dwell near it, and return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectricSetup {
    /// Source-charge magnitude (statC). Signed, so attractive and repulsive
    /// cases are both expressible.
    #[serde(rename = "Q")]
    pub q: f64,
    /// Source mass (g).
    #[serde(rename = "M")]
    pub m: f64,
    /// Source speed near its mirror (cm/s).
    pub v: f64,
    /// Source-to-mirror distance at closest approach (cm).
    pub r: f64,
    /// Source dwell time near its mirror (s).
    #[serde(rename = "T")]
    pub t_dwell: f64,
    /// Electron dwell time near mirror A (s). Must exceed `t_dwell` so the
    /// charges are near their mirrors only while the electron is near its
    /// own.
    pub tau: f64,
}

impl ElectricSetup {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("M", self.m),
            ("v", self.v),
            ("r", self.r),
            ("T", self.t_dwell),
            ("tau", self.tau),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(name, "strictly positive", format!("got {v}")));
            }
        }
        if !self.q.is_finite() {
            return Err(Error::validation("Q", "finite", format!("got {}", self.q)));
        }
        if !(self.t_dwell < self.tau) {
            return Err(Error::validation(
                "T",
                "T < tau",
                format!("T = {}, tau = {}", self.t_dwell, self.tau),
            ));
        }
        Ok(())
    }
}

/// Parameters of the magnetic experiment: a solenoid made of two
/// counter-rotating charged cylinders, encircled by an electron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagneticSetup {
    /// Cylinder charge magnitude (statC).
    #[serde(rename = "Q")]
    pub q: f64,
    /// Cylinder mass (g).
    #[serde(rename = "M")]
    pub m: f64,
    /// Cylinder surface speed (cm/s).
    pub v: f64,
    /// Cylinder radius (cm).
    pub r: f64,
    /// Electron orbit radius (cm).
    #[serde(rename = "R")]
    pub orbit_radius: f64,
    /// Cylinder length (cm).
    #[serde(rename = "L")]
    pub length: f64,
    /// Electron orbital speed (cm/s).
    pub u: f64,
}

impl MagneticSetup {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("M", self.m),
            ("v", self.v),
            ("r", self.r),
            ("R", self.orbit_radius),
            ("L", self.length),
            ("u", self.u),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(name, "strictly positive", format!("got {v}")));
            }
        }
        // Q = 0 is the valid no-interaction control; negative charge just
        // relabels the two cylinders.
        if !(self.q >= 0.0) || !self.q.is_finite() {
            return Err(Error::validation("Q", "non-negative", format!("got {}", self.q)));
        }
        if !(self.r < self.orbit_radius) {
            return Err(Error::validation(
                "r",
                "r < R",
                format!("r = {}, R = {}", self.r, self.orbit_radius),
            ));
        }
        if !(self.orbit_radius < self.length) {
            return Err(Error::validation(
                "R",
                "R < L",
                format!("R = {}, L = {}", self.orbit_radius, self.length),
            ));
        }
        Ok(())
    }

    /// The analysis assumes r << R << L. Ratios below 10 are accepted but
    /// worth flagging.
    pub fn aspect_ratio_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let rr = self.orbit_radius / self.r;
        if rr < 10.0 {
            warnings.push(format!(
                "aspect ratio R/r = {rr:.3} < 10; the short-solenoid corrections grow as (r/R)^2"
            ));
        }
        let lr = self.length / self.orbit_radius;
        if lr < 10.0 {
            warnings.push(format!(
                "aspect ratio L/R = {lr:.3} < 10; the infinite-length flux formula degrades as (R/L)^2"
            ));
        }
        warnings
    }
}

/// Either experiment's parameter record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setup {
    Electric(ElectricSetup),
    Magnetic(MagneticSetup),
}

/// Conversion between physical (CGS) and simulation units.
///
/// The propagator runs with hbar = 1, so grid spacings and time steps stay
/// O(1). Each entry is the physical amount of one simulation unit; the
/// energy unit is derived, never stored independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingMap {
    /// cm per simulation length unit.
    pub length_unit: f64,
    /// s per simulation time unit.
    pub time_unit: f64,
    /// g per simulation mass unit.
    pub mass_unit: f64,
}

impl ScalingMap {
    pub fn identity() -> Self {
        ScalingMap { length_unit: 1.0, time_unit: 1.0, mass_unit: 1.0 }
    }

    /// Map with hbar equal to one simulation energy-time unit: pick length
    /// and mass freely, the time unit follows.
    pub fn with_unit_hbar(length_unit: f64, mass_unit: f64, hbar_physical: f64) -> Self {
        ScalingMap {
            length_unit,
            time_unit: mass_unit * length_unit * length_unit / hbar_physical,
            mass_unit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length_unit", self.length_unit),
            ("time_unit", self.time_unit),
            ("mass_unit", self.mass_unit),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(name, "strictly positive", format!("got {v}")));
            }
        }
        Ok(())
    }

    /// erg per simulation energy unit (mass length^2 / time^2).
    pub fn energy_unit(&self) -> f64 {
        self.mass_unit * self.length_unit * self.length_unit / (self.time_unit * self.time_unit)
    }

    /// cm/s per simulation speed unit.
    pub fn speed_unit(&self) -> f64 {
        self.length_unit / self.time_unit
    }

    /// statC per simulation charge unit. Gaussian charge dimension is
    /// g^(1/2) cm^(3/2) s^(-1).
    pub fn charge_unit(&self) -> f64 {
        self.mass_unit.sqrt() * self.length_unit.powf(1.5) / self.time_unit
    }

    /// erg s per simulation action unit.
    pub fn action_unit(&self) -> f64 {
        self.energy_unit() * self.time_unit
    }

    pub fn inverse(&self) -> Self {
        ScalingMap {
            length_unit: 1.0 / self.length_unit,
            time_unit: 1.0 / self.time_unit,
            mass_unit: 1.0 / self.mass_unit,
        }
    }
}

/// Rescale a physical-unit record into simulation units (divide each
/// dimensional field by its unit), or back.
pub trait ToSimulationUnits: Sized {
    fn to_simulation_units(&self, map: &ScalingMap) -> Self;

    fn to_physical_units(&self, map: &ScalingMap) -> Self {
        self.to_simulation_units(&map.inverse())
    }
}

impl ToSimulationUnits for ElectricSetup {
    fn to_simulation_units(&self, map: &ScalingMap) -> Self {
        ElectricSetup {
            q: self.q / map.charge_unit(),
            m: self.m / map.mass_unit,
            v: self.v / map.speed_unit(),
            r: self.r / map.length_unit,
            t_dwell: self.t_dwell / map.time_unit,
            tau: self.tau / map.time_unit,
        }
    }
}

impl ToSimulationUnits for MagneticSetup {
    fn to_simulation_units(&self, map: &ScalingMap) -> Self {
        MagneticSetup {
            q: self.q / map.charge_unit(),
            m: self.m / map.mass_unit,
            v: self.v / map.speed_unit(),
            r: self.r / map.length_unit,
            orbit_radius: self.orbit_radius / map.length_unit,
            length: self.length / map.length_unit,
            u: self.u / map.speed_unit(),
        }
    }
}

impl ToSimulationUnits for crate::constants::Constants {
    fn to_simulation_units(&self, map: &ScalingMap) -> Self {
        crate::constants::Constants {
            e_charge: self.e_charge / map.charge_unit(),
            hbar: self.hbar / map.action_unit(),
            h_planck: self.h_planck / map.action_unit(),
            c_light: self.c_light / map.speed_unit(),
            electron_mass: self.electron_mass / map.mass_unit,
        }
    }
}
