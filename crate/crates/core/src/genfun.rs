//! The generating function `h(t0,t1)` of the billiard map and its partial
//! derivatives up to second order, all in closed form.
//!
//! With `τ = t1 − t0`, `S = √(R0²R1² − c²τ²)`:
//!
//! ```text
//! h   = (R0² + R1² + 2S)/(2τ) + c·arctan(cτ/S)
//! ∂₁h =  ½X² + c²/(2R0²) + Ṙ0·X        X = (R0² + S)/(R0 τ) = −ṙ(t0⁺)
//! ∂₂h = −½Y² − c²/(2R1²) + Ṙ1·Y        Y = (R1² + S)/(R1 τ) =  ṙ(t1⁻)
//! ```
//!
//! Second derivatives follow by the chain rule through `X` and `Y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radius::{bounds, ProfileBounds, RadiusProfile, DEFAULT_GRID};

/// Everything the generating function needs: the profile, the angular
/// momentum and the strip width σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenFunContext {
    pub profile: RadiusProfile,
    pub c: f64,
    pub eps: f64,
    pub bounds: ProfileBounds,
    /// Width of the strip `0 < t1 − t0 < σ`; equals `bounds.sigma` unless a
    /// working value was supplied.
    pub sigma: f64,
    /// `max_t ∂₁h(t, t+σ)`, the lower edge of the map domain.
    pub sigma_star: f64,
}

impl GenFunContext {
    /// Context with σ taken from the profile bounds. Constant profiles have
    /// σ = ∞ and must use [`GenFunContext::with_sigma`].
    pub fn new(profile: RadiusProfile, c: f64, eps: f64) -> Result<Self> {
        let b = bounds(&profile, eps, DEFAULT_GRID)?;
        if !b.sigma.is_finite() {
            return Err(Error::precondition(
                "sigma is infinite for a constant profile; supply a working sigma",
            ));
        }
        let sigma = b.sigma;
        Self::assemble(profile, c, eps, b, sigma)
    }

    pub fn with_sigma(profile: RadiusProfile, c: f64, eps: f64, sigma: f64) -> Result<Self> {
        let b = bounds(&profile, eps, DEFAULT_GRID)?;
        if !(sigma > 0.0 && sigma.is_finite() && sigma <= b.sigma) {
            return Err(Error::precondition(format!(
                "working sigma {sigma} must be finite, positive and at most {}",
                b.sigma
            )));
        }
        Self::assemble(profile, c, eps, b, sigma)
    }

    fn assemble(profile: RadiusProfile, c: f64, eps: f64, b: ProfileBounds, sigma: f64) -> Result<Self> {
        if !(sigma > 2.0) {
            return Err(Error::precondition(format!("the map needs sigma > 2, got {sigma}")));
        }
        let c_max = eps * b.r_min * b.r_min / sigma;
        if !(c >= 0.0 && c < c_max) {
            return Err(Error::precondition(format!(
                "angular momentum c = {c} outside [0, eps R_min^2 / sigma) = [0, {c_max})"
            )));
        }
        let mut ctx = Self { profile, c, eps, bounds: b, sigma, sigma_star: f64::NAN };
        ctx.sigma_star = crate::bmap::compute_sigma_star(&ctx);
        Ok(ctx)
    }

    /// Same profile and σ with a different angular momentum.
    pub fn with_momentum(&self, c: f64) -> Result<Self> {
        Self::assemble(self.profile.clone(), c, self.eps, self.bounds.clone(), self.sigma)
    }

    pub fn c_max(&self) -> f64 {
        self.eps * self.bounds.r_min * self.bounds.r_min / self.sigma
    }

    pub(crate) fn check_strip(&self, tau: f64) -> Result<()> {
        if tau > 0.0 && tau < self.sigma {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "flight duration {tau} outside the strip (0, {})",
                self.sigma
            )))
        }
    }

    /// Shared intermediate quantities for the pair `(t0, t0 + tau)`.
    pub(crate) fn local(&self, t0: f64, tau: f64) -> Local {
        Local::new(&self.profile, self.c, t0, tau)
    }

    pub fn h(&self, t0: f64, t1: f64) -> Result<f64> {
        self.h_tau(t0, t1 - t0)
    }

    pub fn h_tau(&self, t0: f64, tau: f64) -> Result<f64> {
        self.check_strip(tau)?;
        Ok(self.local(t0, tau).h())
    }

    pub fn grad_h(&self, t0: f64, t1: f64) -> Result<(f64, f64)> {
        self.grad_tau(t0, t1 - t0)
    }

    pub fn grad_tau(&self, t0: f64, tau: f64) -> Result<(f64, f64)> {
        self.check_strip(tau)?;
        let l = self.local(t0, tau);
        Ok((l.h1(), l.h2()))
    }

    /// `(∂₁₁h, ∂₁₂h, ∂₂₂h)`.
    pub fn hess_h(&self, t0: f64, t1: f64) -> Result<(f64, f64, f64)> {
        self.hess_tau(t0, t1 - t0)
    }

    pub fn hess_tau(&self, t0: f64, tau: f64) -> Result<(f64, f64, f64)> {
        self.check_strip(tau)?;
        let l = self.local(t0, tau);
        Ok((l.h11(), l.h12(), l.h22()))
    }
}

/// Intermediate values at one pair of bounce times.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Local {
    pub c: f64,
    pub tau: f64,
    pub r0: f64,
    pub dr0: f64,
    pub ddr0: f64,
    pub r1: f64,
    pub dr1: f64,
    pub ddr1: f64,
    pub s: f64,
    pub x: f64,
    pub y: f64,
}

impl Local {
    pub fn new(profile: &RadiusProfile, c: f64, t0: f64, tau: f64) -> Self {
        let e0 = profile.eval(t0);
        let e1 = profile.eval(t0 + tau);
        let disc = e0.r * e0.r * e1.r * e1.r - c * c * tau * tau;
        debug_assert!(disc > 0.0, "discriminant must be positive inside the strip");
        let s = disc.sqrt();
        Self {
            c,
            tau,
            r0: e0.r,
            dr0: e0.dr,
            ddr0: e0.ddr,
            r1: e1.r,
            dr1: e1.dr,
            ddr1: e1.ddr,
            s,
            x: (e0.r * e0.r + s) / (e0.r * tau),
            y: (e1.r * e1.r + s) / (e1.r * tau),
        }
    }

    /// `A = 2E`.
    pub fn energy2(&self) -> f64 {
        (self.r0 * self.r0 + self.r1 * self.r1 + 2.0 * self.s) / (self.tau * self.tau)
    }

    pub fn h(&self) -> f64 {
        0.5 * self.tau * self.energy2() + self.c * (self.c * self.tau / self.s).atan()
    }

    pub fn h1(&self) -> f64 {
        0.5 * self.x * self.x + self.c * self.c / (2.0 * self.r0 * self.r0) + self.dr0 * self.x
    }

    pub fn h2(&self) -> f64 {
        -0.5 * self.y * self.y - self.c * self.c / (2.0 * self.r1 * self.r1) + self.dr1 * self.y
    }

    fn s0(&self) -> f64 {
        (self.r0 * self.dr0 * self.r1 * self.r1 + self.c * self.c * self.tau) / self.s
    }

    fn s1(&self) -> f64 {
        (self.r0 * self.r0 * self.r1 * self.dr1 - self.c * self.c * self.tau) / self.s
    }

    fn x0(&self) -> f64 {
        let (r0, t) = (self.r0, self.tau);
        self.dr0 / t + r0 / (t * t) + self.s0() / (r0 * t) - self.s * self.dr0 / (r0 * r0 * t)
            + self.s / (r0 * t * t)
    }

    fn x1(&self) -> f64 {
        let (r0, t) = (self.r0, self.tau);
        -r0 / (t * t) + self.s1() / (r0 * t) - self.s / (r0 * t * t)
    }

    fn y0(&self) -> f64 {
        let (r1, t) = (self.r1, self.tau);
        r1 / (t * t) + self.s0() / (r1 * t) + self.s / (r1 * t * t)
    }

    fn y1(&self) -> f64 {
        let (r1, t) = (self.r1, self.tau);
        self.dr1 / t - r1 / (t * t) + self.s1() / (r1 * t) - self.s * self.dr1 / (r1 * r1 * t)
            - self.s / (r1 * t * t)
    }

    pub fn h11(&self) -> f64 {
        (self.x + self.dr0) * self.x0() - self.c * self.c * self.dr0 / self.r0.powi(3)
            + self.ddr0 * self.x
    }

    /// Mixed derivative through the departure side.
    pub fn h12(&self) -> f64 {
        (self.x + self.dr0) * self.x1()
    }

    /// Mixed derivative through the arrival side; equals `h12` analytically.
    pub fn h21(&self) -> f64 {
        -(self.y - self.dr1) * self.y0()
    }

    pub fn h22(&self) -> f64 {
        -(self.y - self.dr1) * self.y1() + self.c * self.c * self.dr1 / self.r1.powi(3)
            + self.ddr1 * self.y
    }
}
