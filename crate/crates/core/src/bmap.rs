//! The billiard map `P(t0, K0) = (t1, K1)` defined implicitly by
//! `K0 = ∂₁h(t0, t1)` and `K1 = −∂₂h(t0, t1)`, its inverse, tangent map and
//! the equivalent map in the variables `I = −R ṙ⁺`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::GenFunContext;
use crate::numerics::{bisect, decreasing_root, sup_periodic};

/// Offset keeping root brackets strictly inside the strip.
const STRIP_GUARD: f64 = 1e-9;

/// A point `(t, K)` of the cylinder; `t` is a real lift of the bounce time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderState {
    pub t: f64,
    pub k: f64,
}

impl CylinderState {
    pub fn new(t: f64, k: f64) -> Self {
        Self { t, k }
    }

    /// Bounce time reduced to `[0, 1)`.
    pub fn phase(&self) -> f64 {
        self.t.rem_euclid(1.0)
    }
}

/// Result of one forward or backward step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapImage {
    pub state: CylinderState,
    /// Flight duration between the two bounces.
    pub tau: f64,
    /// False when the image lies at or below `σ_*` and cannot be iterated.
    pub iterable: bool,
}

/// `∂(t1, K1)/∂(t0, K0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapJacobian {
    pub dt1_dt0: f64,
    pub dt1_dk0: f64,
    pub dk1_dt0: f64,
    pub dk1_dk0: f64,
}

impl MapJacobian {
    pub fn det(&self) -> f64 {
        self.dt1_dt0 * self.dk1_dk0 - self.dt1_dk0 * self.dk1_dt0
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.dt1_dt0 * v[0] + self.dt1_dk0 * v[1],
            self.dk1_dt0 * v[0] + self.dk1_dk0 * v[1],
        ]
    }
}

pub(crate) fn compute_sigma_star(ctx: &GenFunContext) -> f64 {
    sup_periodic(|t| ctx.local(t, ctx.sigma).h1(), 512, 1e-12).1
}

/// `σ_* = max_t ∂₁h(t, t+σ)`; the map is defined for `K > σ_*`.
pub fn sigma_star(ctx: &GenFunContext) -> f64 {
    ctx.sigma_star
}

/// Flight duration `τ` with `∂₁h(t0, t0+τ) = k0`.
pub(crate) fn solve_forward_tau(ctx: &GenFunContext, t0: f64, k0: f64) -> Result<f64> {
    if !(k0 > ctx.sigma_star) {
        return Err(Error::domain(format!(
            "K = {k0} not above the map threshold sigma_* = {}",
            ctx.sigma_star
        )));
    }
    let lo = STRIP_GUARD;
    let hi = ctx.sigma - STRIP_GUARD;
    let f = |tau: f64| {
        let l = ctx.local(t0, tau);
        (l.h1() - k0, l.h12())
    };
    if f(lo).0 <= 0.0 || f(hi).0 >= 0.0 {
        return Err(Error::domain(format!(
            "no flight from t = {t0} with K = {k0} inside the strip (0, {})",
            ctx.sigma
        )));
    }
    Ok(decreasing_root(f, lo, hi))
}

/// Flight duration `τ` with `−∂₂h(t1−τ, t1) = k1`.
pub(crate) fn solve_backward_tau(ctx: &GenFunContext, t1: f64, k1: f64) -> Result<f64> {
    if !(k1 > 0.0) {
        return Err(Error::domain(format!("K = {k1} must be positive")));
    }
    let lo = STRIP_GUARD;
    let hi = ctx.sigma - STRIP_GUARD;
    let f = |tau: f64| {
        let l = ctx.local(t1 - tau, tau);
        (-l.h2() - k1, l.h21())
    };
    if f(lo).0 <= 0.0 || f(hi).0 >= 0.0 {
        return Err(Error::domain(format!(
            "no flight arriving at t = {t1} with K = {k1} inside the strip (0, {})",
            ctx.sigma
        )));
    }
    Ok(decreasing_root(f, lo, hi))
}

pub fn forward(ctx: &GenFunContext, s: CylinderState) -> Result<MapImage> {
    let tau = solve_forward_tau(ctx, s.t, s.k)?;
    let k1 = -ctx.local(s.t, tau).h2();
    Ok(MapImage {
        state: CylinderState::new(s.t + tau, k1),
        tau,
        iterable: k1 > ctx.sigma_star,
    })
}

/// Inverse of [`forward`]: the state whose image is `s`.
pub fn backward(ctx: &GenFunContext, s: CylinderState) -> Result<MapImage> {
    let tau = solve_backward_tau(ctx, s.t, s.k)?;
    let t0 = s.t - tau;
    let k0 = ctx.local(t0, tau).h1();
    Ok(MapImage {
        state: CylinderState::new(t0, k0),
        tau,
        iterable: k0 > ctx.sigma_star,
    })
}

/// Radial velocities `(ṙ(t⁺), ṙ(t⁻))` of the bounce at `(t, K)`.
///
/// `ṙ(t⁺) = −(R² + √(R²R₁² − c²τ²))/(Rτ)` from the outgoing flight and
/// `ṙ(t⁻) = −ṙ(t⁺) + 2Ṙ(t)` by the reflection law.
pub fn radial_velocity(ctx: &GenFunContext, t: f64, k: f64) -> Result<(f64, f64)> {
    let tau = solve_forward_tau(ctx, t, k)?;
    let l = ctx.local(t, tau);
    let plus = -l.x;
    Ok((plus, -plus + 2.0 * l.dr0))
}

/// Both roots of `K = ½ṙ² + c²/(2R²) − ṙṘ`, i.e. `Ṙ ∓ √(Ṙ² + 2K − c²/R²)`.
///
/// The smaller root is the outgoing velocity, the larger one the incoming.
pub fn rdot_roots(ctx: &GenFunContext, t: f64, k: f64) -> Result<(f64, f64)> {
    let e = ctx.profile.eval(t);
    let d = e.dr * e.dr + 2.0 * k - ctx.c * ctx.c / (e.r * e.r);
    if d < 0.0 {
        return Err(Error::domain(format!("no real radial velocity for K = {k} at t = {t}")));
    }
    let sq = d.sqrt();
    Ok((e.dr - sq, e.dr + sq))
}

pub(crate) fn jacobian_at(ctx: &GenFunContext, t0: f64, tau: f64) -> MapJacobian {
    let l = ctx.local(t0, tau);
    let (h11, h12, h21, h22) = (l.h11(), l.h12(), l.h21(), l.h22());
    let dt1_dt0 = -h11 / h12;
    MapJacobian {
        dt1_dt0,
        dt1_dk0: 1.0 / h12,
        dk1_dt0: -h21 - h22 * dt1_dt0,
        dk1_dk0: -h22 / h12,
    }
}

/// Tangent map of [`forward`] by implicit differentiation.
pub fn jacobian(ctx: &GenFunContext, s: CylinderState) -> Result<MapJacobian> {
    let tau = solve_forward_tau(ctx, s.t, s.k)?;
    Ok(jacobian_at(ctx, s.t, tau))
}

/// One step together with its tangent map.
pub fn forward_with_jacobian(ctx: &GenFunContext, s: CylinderState) -> Result<(MapImage, MapJacobian)> {
    let img = forward(ctx, s)?;
    Ok((img, jacobian_at(ctx, s.t, img.tau)))
}

/// The map in the variables `(t, I)` with `I = −R ṙ(t⁺)`:
///
/// ```text
/// A0 τ − 2 I0 = (R1² − R0²)/τ,      A0 = (c² + I0²)/R0²
/// I1 = −I0 − 2 R1 Ṙ1 + A0 τ
/// ```
///
/// Solved independently of `h`, by scanning for the first sign change of
/// the first equation in `τ` and bisecting. Returns `(t1, I1)`.
pub fn laederich_map(ctx: &GenFunContext, t0: f64, i0: f64) -> Result<(f64, f64)> {
    let r0 = ctx.profile.r(t0);
    let a0 = (ctx.c * ctx.c + i0 * i0) / (r0 * r0);
    let g = |tau: f64| {
        let r1 = ctx.profile.r(t0 + tau);
        a0 * tau - 2.0 * i0 - (r1 * r1 - r0 * r0) / tau
    };
    const SCAN: usize = 2048;
    let hi = ctx.sigma - STRIP_GUARD;
    let mut prev = STRIP_GUARD;
    if g(prev) >= 0.0 {
        return Err(Error::domain(format!("I = {i0} at t = {t0} is not an outgoing state")));
    }
    for j in 1..=SCAN {
        let tau = STRIP_GUARD + (hi - STRIP_GUARD) * j as f64 / SCAN as f64;
        if g(tau) >= 0.0 {
            let tau = bisect(g, prev, tau, 0.0);
            let e1 = ctx.profile.eval(t0 + tau);
            return Ok((t0 + tau, -i0 - 2.0 * e1.r * e1.dr + a0 * tau));
        }
        prev = tau;
    }
    Err(Error::domain(format!(
        "no flight from t = {t0} with I = {i0} inside the strip (0, {})",
        ctx.sigma
    )))
}
