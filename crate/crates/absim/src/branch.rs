//! Two-branch interference: evolve one source state under the two branch
//! Hamiltonians (electron-left vs electron-right) and track the overlap,
//! visibility, relative phase, entanglement entropy, and per-branch moments
//! over time.
//!
//! The electron itself is never put on a grid: each branch sees it as a
//! classical source of potentials and impulses. The branch label is carried
//! by which potential acts.

use num_complex::Complex64;
use rayon::join;

use crate::error::{Error, Result};
use crate::grid::{overlap, GridState, Moments};
use crate::propagator::Propagator;

/// Instantaneous momentum transfer applied to one branch at a scheduled
/// time. Times must land on step boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impulse {
    pub t: f64,
    pub dp: f64,
}

/// One branch's drive: a potential plus scheduled impulses.
pub struct BranchDrive<'a> {
    pub potential: &'a (dyn Fn(f64, f64) -> f64 + Sync),
    pub impulses: Vec<Impulse>,
}

impl<'a> BranchDrive<'a> {
    pub fn potential_only(potential: &'a (dyn Fn(f64, f64) -> f64 + Sync)) -> Self {
        BranchDrive { potential, impulses: Vec::new() }
    }
}

/// Time series produced by a two-branch run.
#[derive(Debug, Clone)]
pub struct BranchResult {
    pub times: Vec<f64>,
    pub overlap: Vec<Complex64>,
    /// |overlap| per sample.
    pub visibility: Vec<f64>,
    /// arg overlap, unwrapped by continuity.
    pub rel_phase: Vec<f64>,
    /// Entanglement entropy of the two-level reduced state (nats).
    pub entropy: Vec<f64>,
    pub moments_l: Vec<Moments>,
    pub moments_r: Vec<Moments>,
}

impl BranchResult {
    pub fn final_overlap(&self) -> Complex64 {
        *self.overlap.last().expect("runs always have at least the t=0 sample")
    }

    pub fn final_visibility(&self) -> f64 {
        *self.visibility.last().unwrap()
    }

    pub fn final_rel_phase(&self) -> f64 {
        *self.rel_phase.last().unwrap()
    }

    pub fn final_entropy(&self) -> f64 {
        *self.entropy.last().unwrap()
    }

    /// Largest inter-branch mean-position separation over the run, returned
    /// with its sign at the extremal sample.
    pub fn peak_mean_separation(&self) -> f64 {
        self.moments_l
            .iter()
            .zip(self.moments_r.iter())
            .map(|(l, r)| l.mean_x - r.mean_x)
            .fold(0.0, |acc: f64, d| if d.abs() > acc.abs() { d } else { acc })
    }
}

/// Probabilities of the two detectors given the final source overlap, for
/// an interferometer tuned to send everything to B when the branches stay
/// identical: P_A = (1 - Re c)/2, P_B = (1 + Re c)/2.
pub fn detector_probabilities(c: Complex64) -> Result<(f64, f64)> {
    if c.norm() > 1.0 + 1e-6 {
        return Err(Error::Numerical(format!(
            "overlap magnitude {} exceeds 1; upstream numerics are unhealthy",
            c.norm()
        )));
    }
    let p_a = 0.5 * (1.0 - c.re);
    let p_b = 0.5 * (1.0 + c.re);
    Ok((p_a, p_b))
}

/// Entanglement entropy (nats) of the electron-source state for a source
/// overlap `c`: the reduced state has eigenvalues (1 +- |c|)/2.
pub fn entanglement_entropy(c: Complex64) -> f64 {
    let v = c.norm().min(1.0);
    let lambda_plus = 0.5 * (1.0 + v);
    let lambda_minus = 0.5 * (1.0 - v);
    let term = |l: f64| if l > 0.0 { -l * l.ln() } else { 0.0 };
    term(lambda_plus) + term(lambda_minus)
}

/// Overlap magnitude of two equal-width Gaussians differing by a position
/// offset and a momentum offset: exp(-dx^2/(8 sigma^2) - dp^2 sigma^2 / 2).
pub fn gaussian_visibility_model(delta_x: f64, delta_p: f64, sigma: f64) -> f64 {
    let dx_term = delta_x * delta_x / (8.0 * sigma * sigma);
    let dp_term = 0.5 * delta_p * delta_p * sigma * sigma;
    (-dx_term - dp_term).exp()
}

struct BranchWorker<'a> {
    propagator: Propagator,
    state: GridState,
    drive: BranchDrive<'a>,
    next_impulse: usize,
}

impl<'a> BranchWorker<'a> {
    /// Advance to `t_target`, firing impulses whose times fall inside the
    /// interval (inclusive of the right edge).
    fn advance_to(&mut self, t_target: f64, dt: f64) -> Result<()> {
        let tol = 1e-9 * dt.abs().max(1e-300);
        loop {
            let t_stop = match self.drive.impulses.get(self.next_impulse) {
                Some(imp) if imp.t <= t_target + tol => imp.t,
                _ => t_target,
            };
            let span = t_stop - self.state.t;
            if span.abs() > tol {
                self.propagator.evolve(&mut self.state, &self.drive.potential, span, dt)?;
            }
            match self.drive.impulses.get(self.next_impulse) {
                Some(imp) if imp.t <= t_target + tol => {
                    self.propagator.kick(&mut self.state, imp.dp)?;
                    self.next_impulse += 1;
                }
                _ => break,
            }
        }
        Ok(())
    }
}

/// Evolve two copies of `initial` under the two drives with identical
/// steppers, sampling every `sample_every` steps.
///
/// The per-sample phase increment must stay below pi/2 so the unwrap by
/// continuity is sound; a coarser cadence is reported as an error rather
/// than silently producing a 2 pi-slipped phase.
pub fn run_branches_driven(
    initial: &GridState,
    mass: f64,
    drive_l: BranchDrive<'_>,
    drive_r: BranchDrive<'_>,
    t_final: f64,
    dt: f64,
    sample_every: usize,
) -> Result<BranchResult> {
    if sample_every == 0 {
        return Err(Error::Domain("sample_every must be at least 1".into()));
    }
    let norm = initial.norm_sq();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!("initial state norm^2 = {norm}, expected 1")));
    }
    for drive in [&drive_l, &drive_r] {
        if drive.impulses.windows(2).any(|w| w[0].t > w[1].t) {
            return Err(Error::Domain("impulses must be sorted by time".into()));
        }
    }
    let total_steps = {
        let ratio = (t_final - initial.t) / dt;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * steps {
            return Err(Error::Domain(format!(
                "run length {} is not an integer multiple of dt = {dt}",
                t_final - initial.t
            )));
        }
        steps as u64
    };

    let mut left = BranchWorker {
        propagator: Propagator::new(initial.grid.clone(), mass)?,
        state: initial.clone(),
        drive: drive_l,
        next_impulse: 0,
    };
    let mut right = BranchWorker {
        propagator: Propagator::new(initial.grid.clone(), mass)?,
        state: initial.clone(),
        drive: drive_r,
        next_impulse: 0,
    };

    let n_samples = (total_steps / sample_every as u64) as usize + 1;
    let mut result = BranchResult {
        times: Vec::with_capacity(n_samples),
        overlap: Vec::with_capacity(n_samples),
        visibility: Vec::with_capacity(n_samples),
        rel_phase: Vec::with_capacity(n_samples),
        entropy: Vec::with_capacity(n_samples),
        moments_l: Vec::with_capacity(n_samples),
        moments_r: Vec::with_capacity(n_samples),
    };

    // Phase unwrap state. Below this magnitude the overlap is numerically
    // indistinguishable from zero (the inner-product sum cancels to roundoff
    // at ~1e-16 of the summand scale), so its argument is noise: freeze the
    // accumulated phase through such samples and resync on recovery. After
    // a frozen gap the unwrapped phase is reliable only modulo 2 pi.
    const PHASE_FLOOR: f64 = 1e-12;
    let mut accumulated_phase = 0.0;
    let mut last_arg: Option<f64> = None;
    let mut in_gap = false;

    let mut record = |left: &mut BranchWorker, right: &mut BranchWorker, result: &mut BranchResult| -> Result<()> {
        let c = overlap(&left.state, &right.state)?;
        let vis = c.norm();
        if vis > 1.0 + 1e-10 {
            return Err(Error::Numerical(format!(
                "overlap magnitude {vis} above 1 at t = {}",
                left.state.t
            )));
        }
        if vis >= PHASE_FLOOR {
            let arg = c.arg();
            if let Some(prev) = last_arg {
                let mut inc = arg - prev;
                // Wrap the raw increment into (-pi, pi].
                while inc > std::f64::consts::PI {
                    inc -= 2.0 * std::f64::consts::PI;
                }
                while inc <= -std::f64::consts::PI {
                    inc += 2.0 * std::f64::consts::PI;
                }
                if !in_gap && inc.abs() >= std::f64::consts::FRAC_PI_2 {
                    return Err(Error::UnwrapCadence { t: left.state.t, increment: inc });
                }
                accumulated_phase += inc;
            } else {
                accumulated_phase = arg;
            }
            last_arg = Some(arg);
            in_gap = false;
        } else {
            in_gap = true;
        }
        result.times.push(left.state.t);
        result.overlap.push(c);
        result.visibility.push(vis);
        result.rel_phase.push(accumulated_phase);
        result.entropy.push(entanglement_entropy(c));
        result.moments_l.push(left.propagator.moments(&left.state)?);
        result.moments_r.push(right.propagator.moments(&right.state)?);
        Ok(())
    };

    record(&mut left, &mut right, &mut result)?;
    let mut step_index: u64 = 0;
    while step_index < total_steps {
        let chunk = sample_every.min((total_steps - step_index) as usize) as u64;
        let t_target = initial.t + (step_index + chunk) as f64 * dt;
        let (res_l, res_r) = join(
            || left.advance_to(t_target, dt),
            || right.advance_to(t_target, dt),
        );
        res_l?;
        res_r?;
        step_index += chunk;
        record(&mut left, &mut right, &mut result)?;
    }
    Ok(result)
}

/// Potential-only form of [`run_branches_driven`].
pub fn run_branches(
    initial: &GridState,
    mass: f64,
    potential_l: &(dyn Fn(f64, f64) -> f64 + Sync),
    potential_r: &(dyn Fn(f64, f64) -> f64 + Sync),
    t_final: f64,
    dt: f64,
    sample_every: usize,
) -> Result<BranchResult> {
    run_branches_driven(
        initial,
        mass,
        BranchDrive::potential_only(potential_l),
        BranchDrive::potential_only(potential_r),
        t_final,
        dt,
        sample_every,
    )
}
