//! Split-operator spectral propagator for the 1D time-dependent
//! Schroedinger equation, with the kick/displace/moment utilities the
//! interference layer is built on.
//!
//! One Strang step advances `psi` by
//! `exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2)` with the potential sampled
//! at the midpoint of the step, which keeps second-order accuracy for
//! time-dependent potentials. Everything here uses hbar = 1.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridState, Moments};

/// Propagation engine bound to one grid and one particle mass. Holds the
/// FFT plans and scratch storage, so it is cheap to step many times; each
/// worker thread owns its own instance.
pub struct Propagator {
    grid: Arc<Grid>,
    mass: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    half_v: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    kinetic_dt: f64,
}

impl Propagator {
    pub fn new(grid: Arc<Grid>, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.n());
        let ifft = planner.plan_fft_inverse(grid.n());
        Ok(Propagator {
            mass,
            half_v: vec![Complex64::default(); grid.n()],
            kinetic: vec![Complex64::default(); grid.n()],
            kinetic_dt: f64::NAN,
            grid,
            fft,
            ifft,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn check_state(&self, state: &GridState) -> Result<()> {
        if state.psi.len() != self.grid.n() || state.grid.dx() != self.grid.dx() {
            return Err(Error::Grid("state grid does not match propagator grid".into()));
        }
        Ok(())
    }

    fn refresh_kinetic(&mut self, dt: f64) {
        if self.kinetic_dt == dt {
            return;
        }
        let half_inv_mass = 0.5 / self.mass;
        for (factor, &k) in self.kinetic.iter_mut().zip(self.grid.k().iter()) {
            *factor = Complex64::from_polar(1.0, -k * k * half_inv_mass * dt);
        }
        self.kinetic_dt = dt;
    }

    /// Advance one Strang step of size `dt` (any nonzero sign) under
    /// `potential(x, t)`.
    pub fn step<V: Fn(f64, f64) -> f64>(
        &mut self,
        state: &mut GridState,
        potential: &V,
        dt: f64,
    ) -> Result<()> {
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::Domain(format!("step size must be finite and nonzero, got {dt}")));
        }
        self.check_state(state)?;
        self.refresh_kinetic(dt);

        let t_mid = state.t + 0.5 * dt;
        for (factor, &x) in self.half_v.iter_mut().zip(self.grid.x().iter()) {
            *factor = Complex64::from_polar(1.0, -potential(x, t_mid) * 0.5 * dt);
        }

        for (c, f) in state.psi.iter_mut().zip(self.half_v.iter()) {
            *c *= f;
        }
        self.fft.process(&mut state.psi);
        for (c, f) in state.psi.iter_mut().zip(self.kinetic.iter()) {
            *c *= f;
        }
        self.ifft.process(&mut state.psi);
        let inv_n = 1.0 / self.grid.n() as f64;
        for (c, f) in state.psi.iter_mut().zip(self.half_v.iter()) {
            *c *= f * inv_n;
        }
        state.t += dt;
        Ok(())
    }

    /// Repeated stepping over a duration that must be an integer number of
    /// steps (to 1e-9 relative), so schedule edges always land on step
    /// boundaries.
    pub fn evolve<V: Fn(f64, f64) -> f64>(
        &mut self,
        state: &mut GridState,
        potential: &V,
        duration: f64,
        dt: f64,
    ) -> Result<()> {
        if duration == 0.0 {
            return Ok(());
        }
        let ratio = duration / dt;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::Domain(format!(
                "duration {duration} is not an integer multiple of dt = {dt}"
            )));
        }
        for _ in 0..steps as u64 {
            self.step(state, potential, dt)?;
        }
        Ok(())
    }

    /// Multiply in a momentum boost `exp(i dp x)`.
    pub fn kick(&self, state: &mut GridState, dp: f64) -> Result<()> {
        self.check_state(state)?;
        for (c, &x) in state.psi.iter_mut().zip(self.grid.x().iter()) {
            *c *= Complex64::from_polar(1.0, dp * x);
        }
        Ok(())
    }

    /// Translate the state by `dx` via the spectral shift `exp(-i k dx)`;
    /// exact on the periodic grid.
    pub fn displace(&mut self, state: &mut GridState, dx: f64) -> Result<()> {
        self.check_state(state)?;
        self.fft.process(&mut state.psi);
        let inv_n = 1.0 / self.grid.n() as f64;
        for (c, &k) in state.psi.iter_mut().zip(self.grid.k().iter()) {
            *c *= Complex64::from_polar(inv_n, -k * dx);
        }
        self.ifft.process(&mut state.psi);
        Ok(())
    }

    /// Position and momentum moments of a (normalized) state.
    pub fn moments(&mut self, state: &GridState) -> Result<Moments> {
        self.check_state(state)?;
        let (mean_x, std_x, excess_kurtosis) = state.position_moments();

        let mut spectrum = state.psi.clone();
        self.fft.process(&mut spectrum);
        let total: f64 = spectrum.iter().map(|c| c.norm_sqr()).sum();
        let mut mean_p = 0.0;
        for (c, &k) in spectrum.iter().zip(self.grid.k().iter()) {
            mean_p += k * c.norm_sqr();
        }
        mean_p /= total;
        let mut var_p = 0.0;
        for (c, &k) in spectrum.iter().zip(self.grid.k().iter()) {
            let d = k - mean_p;
            var_p += d * d * c.norm_sqr();
        }
        var_p /= total;

        Ok(Moments { mean_x, mean_p, std_x, std_p: var_p.sqrt(), excess_kurtosis })
    }

    /// Mean energy <T> + <V> with the potential evaluated at time `t_at`.
    pub fn mean_energy<V: Fn(f64, f64) -> f64>(
        &mut self,
        state: &GridState,
        potential: &V,
        t_at: f64,
    ) -> Result<f64> {
        self.check_state(state)?;
        let mut spectrum = state.psi.clone();
        self.fft.process(&mut spectrum);
        let total: f64 = spectrum.iter().map(|c| c.norm_sqr()).sum();
        let half_inv_mass = 0.5 / self.mass;
        let kinetic: f64 = spectrum
            .iter()
            .zip(self.grid.k().iter())
            .map(|(c, &k)| k * k * half_inv_mass * c.norm_sqr())
            .sum::<f64>()
            / total;

        let norm: f64 = state.psi.iter().map(|c| c.norm_sqr()).sum();
        let pot: f64 = state
            .psi
            .iter()
            .zip(self.grid.x().iter())
            .map(|(c, &x)| potential(x, t_at) * c.norm_sqr())
            .sum::<f64>()
            / norm;
        Ok(kinetic + pot)
    }
}
