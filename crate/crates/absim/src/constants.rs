//! Physical constants in Gaussian CGS units, plus the natural-unit set used
//! by the propagator.
//!
//! The analytic layer works in Gaussian units throughout: charges in
//! statcoulomb, the speed of light appears explicitly in the magnetic
//! formulas, and there is no vacuum permittivity anywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementary charge magnitude (statC). CODATA 2018, converted to Gaussian.
pub const E_CHARGE_CGS: f64 = 4.803_204_712_57e-10;

/// Planck constant (erg s). Exact since the 2019 SI redefinition.
pub const H_PLANCK_CGS: f64 = 6.626_070_15e-27;

/// Reduced Planck constant (erg s), derived as h/2pi so the pair stays
/// consistent to machine precision. The independently rounded CODATA value
/// differs from h/2pi in the 9th digit, which would fail the consistency
/// check below.
pub const HBAR_CGS: f64 = H_PLANCK_CGS / (2.0 * std::f64::consts::PI);

/// Speed of light (cm/s). Exact.
pub const C_LIGHT_CGS: f64 = 2.997_924_58e10;

/// Electron mass (g). CODATA 2018.
pub const ELECTRON_MASS_CGS: f64 = 9.109_383_7015e-28;

/// The constant symbols appearing in the closed-form phase and shift
/// relations. Carrying them as a value (rather than hard-coded globals) lets
/// the same formulas run in CGS and in the propagator's natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Elementary charge magnitude (statC). Always positive; signs live in
    /// the setups.
    pub e_charge: f64,
    /// Reduced Planck constant (erg s).
    pub hbar: f64,
    /// Planck constant (erg s).
    pub h_planck: f64,
    /// Speed of light (cm/s).
    pub c_light: f64,
    /// Electron mass (g).
    pub electron_mass: f64,
}

impl Constants {
    /// Gaussian CGS values.
    pub fn cgs() -> Self {
        Constants {
            e_charge: E_CHARGE_CGS,
            hbar: HBAR_CGS,
            h_planck: H_PLANCK_CGS,
            c_light: C_LIGHT_CGS,
            electron_mass: ELECTRON_MASS_CGS,
        }
    }

    /// Natural units: hbar = e = c = m_e = 1, h = 2pi. This is the system
    /// the time-dependent simulations run in.
    pub fn natural() -> Self {
        Constants {
            e_charge: 1.0,
            hbar: 1.0,
            h_planck: 2.0 * std::f64::consts::PI,
            c_light: 1.0,
            electron_mass: 1.0,
        }
    }

    /// Check positivity and the h = 2pi hbar relation (to 1e-15 relative).
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e_charge", self.e_charge),
            ("hbar", self.hbar),
            ("h_planck", self.h_planck),
            ("c_light", self.c_light),
            ("electron_mass", self.electron_mass),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(
                    name,
                    "strictly positive",
                    format!("got {v}"),
                ));
            }
        }
        let two_pi_hbar = 2.0 * std::f64::consts::PI * self.hbar;
        let rel = (self.h_planck - two_pi_hbar).abs() / self.h_planck;
        if rel > 1e-15 {
            return Err(Error::validation(
                "h_planck",
                "h_planck = 2*pi*hbar to relative 1e-15",
                format!("relative mismatch {rel:e}"),
            ));
        }
        Ok(())
    }
}
