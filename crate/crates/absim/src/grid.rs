//! Uniform 1D grid and complex wavefunction samples on it.
//!
//! The whole grid/propagator layer works in natural units with hbar = 1;
//! the [`crate::setup::ScalingMap`] connects these numbers back to CGS.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Spatial grid with its conjugate frequencies in FFT order.
#[derive(Debug, Clone)]
pub struct Grid {
    n: usize,
    x_min: f64,
    x_max: f64,
    dx: f64,
    x: Vec<f64>,
    k: Vec<f64>,
}

impl Grid {
    /// Build a grid of `n` points (a power of two) covering `[x_min, x_max)`.
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Arc<Grid>> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("point count {n} is not a power of two")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Grid(format!("invalid extent [{x_min}, {x_max})")));
        }
        let dx = (x_max - x_min) / n as f64;
        let x: Vec<f64> = (0..n).map(|j| x_min + j as f64 * dx).collect();
        let dk = 2.0 * std::f64::consts::PI / (x_max - x_min);
        // Standard FFT frequency layout: 0, 1, ..., n/2-1, -n/2, ..., -1.
        let k: Vec<f64> = (0..n)
            .map(|j| {
                let f = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                f * dk
            })
            .collect();
        Ok(Arc::new(Grid { n, x_min, x_max, dx, x, k }))
    }

    /// Symmetric grid covering `[-extent/2, extent/2)`.
    pub fn centered(n: usize, extent: f64) -> Result<Arc<Grid>> {
        Grid::new(n, -0.5 * extent, 0.5 * extent)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Grid point positions.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Angular spatial frequencies in FFT order.
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    fn compatible(&self, other: &Grid) -> bool {
        self.n == other.n && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

/// Complex wavefunction samples on a [`Grid`] at a moment in time.
#[derive(Debug, Clone)]
pub struct GridState {
    pub grid: Arc<Grid>,
    pub psi: Vec<Complex64>,
    pub t: f64,
}

/// Low-order wavepacket moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub std_x: f64,
    pub std_p: f64,
    /// Excess kurtosis of |psi|^2; zero for a Gaussian. Used as an
    /// anharmonic-distortion diagnostic.
    pub excess_kurtosis: f64,
}

impl GridState {
    /// Normalized Gaussian wavepacket `exp(-(x-x0)^2/(4 sigma^2) + i p0 x)`.
    pub fn gaussian(grid: Arc<Grid>, x0: f64, p0: f64, sigma: f64) -> Result<GridState> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        if sigma < 4.0 * grid.dx {
            return Err(Error::Grid(format!(
                "resolution: sigma = {sigma} is below 4 dx = {}; refine the grid",
                4.0 * grid.dx
            )));
        }
        if x0 - 6.0 * sigma < grid.x_min || x0 + 6.0 * sigma > grid.x_max {
            return Err(Error::Grid(format!(
                "margin: packet at x0 = {x0} with sigma = {sigma} needs 6 sigma of clearance \
                 inside [{}, {})",
                grid.x_min, grid.x_max
            )));
        }
        let inv_four_sigma_sq = 1.0 / (4.0 * sigma * sigma);
        let mut psi: Vec<Complex64> = grid
            .x
            .iter()
            .map(|&x| {
                let dx0 = x - x0;
                let envelope = (-dx0 * dx0 * inv_four_sigma_sq).exp();
                Complex64::from_polar(envelope, p0 * x)
            })
            .collect();
        let norm = (psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dx).sqrt();
        for c in psi.iter_mut() {
            *c /= norm;
        }
        Ok(GridState { grid, psi, t: 0.0 })
    }

    /// Total probability sum |psi|^2 dx.
    pub fn norm_sq(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// Probability residing within `margin` of either grid edge. The
    /// boundary-artifact monitor: periodic images start to matter once this
    /// becomes non-negligible.
    pub fn edge_probability(&self, margin: f64) -> f64 {
        let lo = self.grid.x_min + margin;
        let hi = self.grid.x_max - margin;
        self.psi
            .iter()
            .zip(self.grid.x.iter())
            .filter(|(_, &x)| x < lo || x > hi)
            .map(|(c, _)| c.norm_sqr())
            .sum::<f64>()
            * self.grid.dx
    }

    /// Position-space moments (mean, std, kurtosis). Momentum moments need a
    /// transform and live on [`crate::propagator::Propagator::moments`].
    pub fn position_moments(&self) -> (f64, f64, f64) {
        let dx = self.grid.dx;
        let norm: f64 = self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx;
        let mean: f64 = self
            .psi
            .iter()
            .zip(self.grid.x.iter())
            .map(|(c, &x)| x * c.norm_sqr())
            .sum::<f64>()
            * dx
            / norm;
        let (mut m2, mut m4) = (0.0, 0.0);
        for (c, &x) in self.psi.iter().zip(self.grid.x.iter()) {
            let d = x - mean;
            let w = c.norm_sqr();
            m2 += d * d * w;
            m4 += d * d * d * d * w;
        }
        m2 = m2 * dx / norm;
        m4 = m4 * dx / norm;
        (mean, m2.sqrt(), m4 / (m2 * m2) - 3.0)
    }
}

/// Inner product sum conj(a) b dx.
pub fn overlap(a: &GridState, b: &GridState) -> Result<Complex64> {
    if !a.grid.compatible(&b.grid) {
        return Err(Error::Grid("overlap of states on different grids".into()));
    }
    let s: Complex64 = a
        .psi
        .iter()
        .zip(b.psi.iter())
        .map(|(ca, cb)| ca.conj() * cb)
        .sum();
    Ok(s * a.grid.dx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(Grid::new(1000, -1.0, 1.0).is_err()); // not a power of two
        assert!(Grid::new(1024, 1.0, 1.0).is_err()); // empty extent
    }

    #[test]
    fn frequency_layout() {
        let g = Grid::new(8, 0.0, 8.0).unwrap();
        let dk = 2.0 * std::f64::consts::PI / 8.0;
        let expect = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (k, e) in g.k().iter().zip(expect.iter()) {
            assert!((k - e * dk).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_is_normalized_with_stated_moments() {
        let g = Grid::centered(2048, 40.0).unwrap();
        let s = GridState::gaussian(g, 1.5, 3.0, 0.8).unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        let (mean, std, kurt) = s.position_moments();
        assert!((mean - 1.5).abs() < 1e-8);
        assert!((std - 0.8).abs() < 1e-6 * 0.8);
        assert!(kurt.abs() < 1e-6);
    }

    #[test]
    fn gaussian_margin_and_resolution_errors() {
        let g = Grid::centered(256, 10.0).unwrap();
        assert!(GridState::gaussian(g.clone(), 4.9, 0.0, 0.5).is_err());
        assert!(GridState::gaussian(g, 0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn overlap_of_state_with_itself_is_one() {
        let g = Grid::centered(1024, 30.0).unwrap();
        let s = GridState::gaussian(g, 0.0, 2.0, 0.7).unwrap();
        let c = overlap(&s, &s).unwrap();
        assert!((c.re - 1.0).abs() < 1e-12);
        assert!(c.im.abs() < 1e-14);
    }

    #[test]
    fn overlap_grid_mismatch_is_an_error() {
        let a = GridState::gaussian(Grid::centered(512, 30.0).unwrap(), 0.0, 0.0, 0.5).unwrap();
        let b = GridState::gaussian(Grid::centered(1024, 30.0).unwrap(), 0.0, 0.0, 0.5).unwrap();
        assert!(overlap(&a, &b).is_err());
    }

    #[test]
    fn displaced_gaussian_overlap_magnitude() {
        // |<g | g shifted by dx>| = exp(-dx^2 / (8 sigma^2))
        let g = Grid::centered(2048, 40.0).unwrap();
        let sigma = 0.9;
        let d = 0.6;
        let a = GridState::gaussian(g.clone(), 0.0, 0.0, sigma).unwrap();
        let b = GridState::gaussian(g, d, 0.0, sigma).unwrap();
        let c = overlap(&a, &b).unwrap();
        let expect = (-d * d / (8.0 * sigma * sigma)).exp();
        assert!((c.norm() - expect).abs() < 1e-6, "{} vs {expect}", c.norm());
    }

    #[test]
    fn phase_tagged_copy_overlap() {
        let g = Grid::centered(1024, 30.0).unwrap();
        let s = GridState::gaussian(g, 0.0, 1.0, 0.7).unwrap();
        let mut tagged = s.clone();
        let phase = Complex64::from_polar(1.0, 0.83);
        for c in tagged.psi.iter_mut() {
            *c *= phase;
        }
        let c = overlap(&s, &tagged).unwrap();
        assert!((c.arg() - 0.83).abs() < 1e-12);
        assert!((c.norm() - 1.0).abs() < 1e-12);
    }
}
