//! The designed mirror potential and its classical dwell time.
//!
//! The mirror holds a particle near itself for a long, tunable time: a hard
//! inner wall, a flat plateau of height `V` over `(0, d)`, and a smooth
//! decay to zero beyond `d`. A particle with energy slightly above `V`
//! crawls across the plateau, so the dwell time is set by the plateau width
//! and the small surplus speed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Finite stand-in for the infinite inner wall. Spectral propagation needs
/// bounded potentials; at 1e6 V the tunneling leakage past the wall is far
/// below every tolerance used by the tests.
pub const WALL_CAP_FACTOR: f64 = 1e6;

/// Geometry of one mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorSpec {
    /// Plateau energy (erg).
    #[serde(rename = "V")]
    pub v_plateau: f64,
    /// Plateau width (cm).
    pub d: f64,
    /// Smoothing width of the outer edge (cm); the potential falls from `V`
    /// to zero across `[d - w, d + w]`.
    pub w: f64,
    /// Steepness scale of the inner wall (cm).
    pub wall_scale: f64,
}

impl MirrorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_plateau > 0.0) {
            return Err(Error::validation("mirror.V", "V > 0", format!("got {}", self.v_plateau)));
        }
        if !(self.d > 0.0) {
            return Err(Error::validation("mirror.d", "d > 0", format!("got {}", self.d)));
        }
        if !(self.w > 0.0 && self.w <= self.d / 4.0) {
            return Err(Error::validation(
                "mirror.w",
                "0 < w <= d/4",
                format!("w = {}, d = {}", self.w, self.d),
            ));
        }
        if !(self.wall_scale > 0.0 && self.wall_scale <= self.d / 10.0) {
            return Err(Error::validation(
                "mirror.wall_scale",
                "0 < wall_scale <= d/10",
                format!("wall_scale = {}, d = {}", self.wall_scale, self.d),
            ));
        }
        Ok(())
    }

    /// Inner edge of the wall-to-plateau blend window.
    fn blend_start(&self) -> f64 {
        2.0 * self.wall_scale
    }

    /// Outer edge of the blend window; the plateau proper starts here.
    fn blend_end(&self) -> f64 {
        0.5 * self.d
    }
}

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3: value and first two derivatives
/// vanish smoothly at both ends, which keeps the spectral propagator free of
/// ringing at the patch seams.
fn smoothstep5(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Bare inner-wall profile V (1 + (wall_scale/x)^2), capped.
fn wall_term(x: f64, m: &MirrorSpec) -> f64 {
    let cap = WALL_CAP_FACTOR * m.v_plateau;
    if x <= 0.0 {
        return cap;
    }
    let ratio = m.wall_scale / x;
    (m.v_plateau * (1.0 + ratio * ratio)).min(cap)
}

/// The mirror potential at distance `x` from the wall.
///
/// Piecewise: capped wall for `x <= 0` and very small `x`; the wall term
/// blended into the plateau over `[2 wall_scale, d/2]`; exactly `V` on the
/// central plateau; a quintic step from `V` to 0 across `[d - w, d + w]`;
/// zero beyond.
pub fn mirror_potential(x: f64, m: &MirrorSpec) -> f64 {
    if x <= 0.0 {
        return WALL_CAP_FACTOR * m.v_plateau;
    }
    let b1 = m.blend_start();
    let b2 = m.blend_end();
    if x < b1 {
        wall_term(x, m)
    } else if x < b2 {
        let t = smoothstep5((x - b1) / (b2 - b1));
        (1.0 - t) * wall_term(x, m) + t * m.v_plateau
    } else if x <= m.d - m.w {
        m.v_plateau
    } else if x < m.d + m.w {
        let t = smoothstep5((x - (m.d - m.w)) / (2.0 * m.w));
        m.v_plateau * (1.0 - t)
    } else {
        0.0
    }
}

/// Classical round-trip time spent between the inner turning point and the
/// outer edge `d + w`, for a particle of energy `E > V` coming in from the
/// right: 2 int dx / sqrt(2 (E - U(x)) / mass).
pub fn classical_dwell_time(m: &MirrorSpec, energy: f64, mass: f64) -> Result<f64> {
    m.validate()?;
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    let v = m.v_plateau;
    if energy < v {
        return Err(Error::Domain(format!(
            "E = {energy} < V = {v}: the particle reflects on the outer slope before reaching \
             the plateau, so the dwell time over (0, d+w) is not defined"
        )));
    }
    if energy == v {
        return Err(Error::Domain(format!(
            "E = V = {v}: zero plateau speed, the dwell time diverges"
        )));
    }
    if energy >= WALL_CAP_FACTOR * v {
        return Err(Error::Domain(format!(
            "E = {energy} exceeds the wall cap {}: no inner turning point",
            WALL_CAP_FACTOR * v
        )));
    }

    // Inner turning point U(x) = E by bisection; U decreases monotonically
    // from the cap to V over (0, d/2].
    let mut lo = 0.0;
    let mut hi = m.blend_end();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mirror_potential(mid, m) > energy {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * m.d {
            break;
        }
    }
    let x_turn = hi;

    let integrand = |x: f64| {
        let surplus = energy - mirror_potential(x, m);
        if surplus <= 0.0 {
            // Only reachable by roundoff right at the turning point.
            0.0
        } else {
            1.0 / (2.0 * surplus / mass).sqrt()
        }
    };
    // 1e-7 relative: near E = V the turning point falls where the blend is
    // quintic-flat, and resolving the resulting u^(-1/2) layer much tighter
    // costs subdivision depth for no benefit at the consumers' tolerances.
    let (one_way, _err) = quad::integrate(integrand, x_turn, m.d + m.w, 1e-7)?;
    Ok(2.0 * one_way)
}
