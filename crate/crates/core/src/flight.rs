//! Closed-form straight flight between two consecutive bounces.
//!
//! In polar coordinates a free flight with angular momentum `c` obeys
//! `r̈ = c²/r³`, whose solutions are `r(t)² = (A²(t+B)² + c²)/A` with
//! `A = ṙ² + c²/r² = 2E`. Prescribing `r(t0) = R(t0)` and `r(t1) = R(t1)`
//! and keeping the root that leaves the wall inwards gives the segment.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radius::{eps_alpha, ProfileBounds, RadiusProfile};

/// Per-condition outcome of the flight-window test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub tau: f64,
    /// `εR̲²/c`, `None` when `c = 0`.
    pub momentum_limit: Option<f64>,
    /// `R̲/(2‖Ṙ‖)`, `None` for a constant profile.
    pub speed_limit: Option<f64>,
    /// `2√(1+√(1−ε²)) R̲/√‖(R²)″‖`, `None` for a constant profile.
    pub curvature_limit: Option<f64>,
    pub momentum_ok: bool,
    pub speed_ok: bool,
    pub curvature_ok: bool,
}

impl WindowReport {
    pub fn passes(&self) -> bool {
        self.momentum_ok && self.speed_ok && self.curvature_ok
    }
}

/// Checks the three sufficient conditions for a flight of duration `t1 − t0`.
pub fn validate_window(t0: f64, t1: f64, c: f64, bounds: &ProfileBounds) -> WindowReport {
    let tau = t1 - t0;
    let lim = |den: f64, num: f64| (den > 0.0).then(|| num / den);
    let momentum_limit = lim(c, bounds.eps * bounds.r_min * bounds.r_min);
    let speed_limit = lim(2.0 * bounds.dr_norm, bounds.r_min);
    let curvature_limit = lim(bounds.ddr2_norm.sqrt(), 2.0 * eps_alpha(bounds.eps) * bounds.r_min);
    let ok = |l: Option<f64>| tau > 0.0 && l.is_none_or(|l| tau < l);
    WindowReport {
        tau,
        momentum_limit,
        speed_limit,
        curvature_limit,
        momentum_ok: ok(momentum_limit),
        speed_ok: ok(speed_limit),
        curvature_ok: ok(curvature_limit),
    }
}

/// One straight flight between bounces at `t0` and `t1`.
///
/// Internally the trajectory is parametrised by the local time `s = t − t0`
/// and the offset `u0 = −(t0 + B)`, which avoids cancellation for large `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightSegment {
    pub t0: f64,
    pub t1: f64,
    pub c: f64,
    /// `A = 2E`.
    pub a: f64,
    /// Time offset `B` of `r(t)² = (A²(t+B)² + c²)/A`.
    pub b: f64,
    /// `ℓ₋ = A(t0 + B)`, the departing radial impulse.
    pub ell: f64,
    pub theta0: f64,
    pub dtheta: f64,
    u0: f64,
    tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightState {
    pub r: f64,
    pub rdot: f64,
    pub theta: f64,
}

/// Shared radicand `R0²R1² − c²τ²`.
fn discriminant(r0: f64, r1: f64, c: f64, tau: f64) -> f64 {
    r0 * r0 * r1 * r1 - c * c * tau * tau
}

/// Coefficients of the flight from `t0` lasting `tau`.
pub fn flight_coeffs_tau(t0: f64, tau: f64, c: f64, profile: &RadiusProfile) -> Result<FlightSegment> {
    if !(tau > 0.0) {
        return Err(Error::domain(format!("flight needs t1 > t0, got duration {tau}")));
    }
    if c < 0.0 {
        return Err(Error::domain("angular momentum must be non-negative"));
    }
    let r0 = profile.r(t0);
    let r1 = profile.r(t0 + tau);
    let disc = discriminant(r0, r1, c, tau);
    if disc <= 0.0 {
        return Err(Error::domain(format!(
            "window violation: R0^2 R1^2 - c^2 tau^2 = {disc:e} <= 0 (tau = {tau}, c = {c})"
        )));
    }
    let s = disc.sqrt();
    let a = (r0 * r0 + r1 * r1 + 2.0 * s) / (tau * tau);
    let u0 = (r0 * r0 + s) / (tau * a);
    let ell = -(r0 * r0 + s) / tau;
    let dtheta = PI - (c * tau / s).atan();
    Ok(FlightSegment { t0, t1: t0 + tau, c, a, b: -(t0 + u0), ell, theta0: 0.0, dtheta, u0, tau })
}

pub fn flight_coeffs(t0: f64, t1: f64, c: f64, profile: &RadiusProfile) -> Result<FlightSegment> {
    flight_coeffs_tau(t0, t1 - t0, c, profile)
}

/// `δθ = π − arctan(cτ/√(R0²R1² − c²τ²))`.
pub fn angular_advance(t0: f64, t1: f64, c: f64, profile: &RadiusProfile) -> Result<f64> {
    flight_coeffs(t0, t1, c, profile).map(|s| s.dtheta)
}

impl FlightSegment {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    /// State at local time `s = t − t0`; no range check.
    pub fn state_local(&self, s: f64) -> FlightState {
        let w = self.a * (s - self.u0);
        let r = ((w * w + self.c * self.c) / self.a).sqrt();
        let rdot = if r > 0.0 { w / r } else { -self.a.sqrt() };
        let theta = if self.c > 0.0 {
            self.theta0 + (w / self.c).atan() - (-self.a * self.u0 / self.c).atan()
        } else if s < self.u0 {
            self.theta0
        } else {
            self.theta0 + PI
        };
        FlightState { r, rdot, theta }
    }

    pub fn state(&self, t: f64) -> Result<FlightState> {
        let s = t - self.t0;
        let slack = 1e-12 * self.tau.max(1.0);
        if s < -slack || s > self.tau + slack {
            return Err(Error::domain(format!(
                "time {t} outside flight [{}, {}]",
                self.t0, self.t1
            )));
        }
        Ok(self.state_local(s.clamp(0.0, self.tau)))
    }

    /// `ṙ(t0⁺) = ℓ₋/R0`.
    pub fn rdot_start(&self) -> f64 {
        let s = self.state_local(0.0);
        s.rdot
    }

    /// `ṙ(t1⁻)`.
    pub fn rdot_end(&self) -> f64 {
        self.state_local(self.tau).rdot
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.a
    }

    /// Length of the straight chord, `τ√A`.
    pub fn chord_length(&self) -> f64 {
        self.tau * self.a.sqrt()
    }

    pub fn cartesian_local(&self, s: f64) -> (f64, f64) {
        let st = self.state_local(s);
        (st.r * st.theta.cos(), st.r * st.theta.sin())
    }

    /// Sampled check of `r(t) < R(t)` at `n` interior points.
    pub fn interior_ok(&self, profile: &RadiusProfile, n: usize) -> bool {
        (1..=n).all(|i| {
            let s = self.tau * i as f64 / (n + 1) as f64;
            self.state_local(s).r < profile.r(self.t0 + s)
        })
    }

    /// Rows `(t, r, θ, x, y)` every `dt`, always including both endpoints.
    pub fn sample(&self, dt: f64) -> Vec<[f64; 5]> {
        let steps = if dt > 0.0 { (self.tau / dt).ceil().max(1.0) as usize } else { 1 };
        (0..=steps)
            .map(|i| {
                let s = (i as f64 * dt).min(self.tau);
                let st = self.state_local(s);
                [self.t0 + s, st.r, st.theta, st.r * st.theta.cos(), st.r * st.theta.sin()]
            })
            .collect()
    }
}
