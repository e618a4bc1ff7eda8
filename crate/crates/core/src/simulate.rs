//! Bouncing trajectories assembled from map iterates and exact flights.

use serde::{Deserialize, Serialize};

use crate::bmap::{forward, CylinderState};
use crate::error::{Error, Result};
use crate::flight::{flight_coeffs_tau, FlightSegment};
use crate::genfun::GenFunContext;

/// One bounce together with the flight that leaves it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BounceRecord {
    pub n: usize,
    pub t: f64,
    pub k: f64,
    pub rdot_plus: f64,
    /// Incoming radial velocity; taken from the previous flight for `n ≥ 1`
    /// and from the reflection law for the first bounce.
    pub rdot_minus: f64,
    /// Cumulative polar angle at the bounce.
    pub theta: f64,
    pub segment: FlightSegment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub records: Vec<BounceRecord>,
    /// State after the last recorded flight.
    pub final_state: CylinderState,
    /// Reason the run stopped early, if it did.
    pub truncated: Option<String>,
}

/// Iterates the map `n` times from `s0`, recording every bounce.
///
/// Fails only if the very first step is impossible; a later exit from the
/// map domain ends the run early with `truncated` set.
pub fn run(ctx: &GenFunContext, s0: CylinderState, n: usize) -> Result<Run> {
    let mut records = Vec::with_capacity(n);
    let mut state = s0;
    let mut theta = 0.0;
    let mut prev: Option<FlightSegment> = None;
    let mut truncated = None;
    for i in 0..n {
        let img = match forward(ctx, state) {
            Ok(img) => img,
            Err(e) if i == 0 => return Err(e),
            Err(e) => {
                truncated = Some(format!("stopped after {i} flights: {e}"));
                break;
            }
        };
        let seg = flight_coeffs_tau(state.t, img.tau, ctx.c, &ctx.profile)?.with_theta0(theta);
        let rdot_plus = seg.rdot_start();
        let rdot_minus = match prev {
            Some(p) => p.rdot_end(),
            None => -rdot_plus + 2.0 * ctx.profile.eval(state.t).dr,
        };
        records.push(BounceRecord { n: i, t: state.t, k: state.k, rdot_plus, rdot_minus, theta, segment: seg });
        theta += seg.dtheta;
        prev = Some(seg);
        state = img.state;
    }
    Ok(Run { records, final_state: state, truncated })
}

/// Worst-case residuals of the physical laws along a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunChecks {
    /// `max |(ṙ⁺ − Ṙ) + (ṙ⁻ − Ṙ)|` over bounces after the first.
    pub reflection: f64,
    /// `max |∂₁h(t_n, t_{n+1}) + ∂₂h(t_{n−1}, t_n)|`.
    pub euler_lagrange: f64,
    /// `max |ṙ² + c²/r² − A|` at interior samples.
    pub first_integral: f64,
    /// `r(t) < R(t)` at every interior sample.
    pub interior: bool,
}

/// Evaluates the physical checks with `samples` interior points per flight.
///
/// Pairs are evaluated from the stored `(t_n, τ_n)` so that large time lifts
/// do not degrade the comparison.
pub fn check_run(ctx: &GenFunContext, run: &Run, samples: usize) -> RunChecks {
    let mut reflection: f64 = 0.0;
    let mut euler_lagrange: f64 = 0.0;
    let mut first_integral: f64 = 0.0;
    let mut interior = true;
    for (i, rec) in run.records.iter().enumerate() {
        let seg = &rec.segment;
        if i > 0 {
            let dr = ctx.profile.eval(rec.t).dr;
            reflection = reflection.max(((rec.rdot_plus - dr) + (rec.rdot_minus - dr)).abs());
            let p = &run.records[i - 1].segment;
            let h1 = ctx.local(seg.t0, seg.tau()).h1();
            let h2 = ctx.local(p.t0, p.tau()).h2();
            euler_lagrange = euler_lagrange.max((h1 + h2).abs());
        }
        for j in 1..=samples {
            let s = seg.tau() * j as f64 / (samples + 1) as f64;
            let st = seg.state_local(s);
            let e = st.rdot * st.rdot + ctx.c * ctx.c / (st.r * st.r);
            if st.r > 0.0 {
                first_integral = first_integral.max((e - seg.a).abs() / seg.a.max(1.0));
            }
            interior &= st.r < ctx.profile.r(seg.t0 + s);
        }
    }
    RunChecks { reflection, euler_lagrange, first_integral, interior }
}

/// Cartesian polyline `(t, x, y)` through all flights, sampled every `dt`.
pub fn trajectory_samples(records: &[BounceRecord], dt: f64) -> Result<Vec<[f64; 3]>> {
    if records.is_empty() {
        return Err(Error::precondition("no bounces to sample"));
    }
    if !(dt > 0.0) {
        return Err(Error::precondition(format!("sampling step must be positive, got {dt}")));
    }
    let mut out = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let rows = rec.segment.sample(dt);
        // the first row of each later flight repeats the previous endpoint
        let skip = usize::from(i > 0);
        out.extend(rows.into_iter().skip(skip).map(|r| [r[0], r[3], r[4]]));
    }
    Ok(out)
}

/// `(t_n, E_n)` with `E = A/2` of the flight leaving bounce `n`.
pub fn energy_series(records: &[BounceRecord]) -> Vec<(f64, f64)> {
    records.iter().map(|r| (r.t, r.segment.energy())).collect()
}

/// Rows `(n, t, K, ṙ⁺, θ)` for CSV export.
pub fn bounce_rows(records: &[BounceRecord]) -> Vec<Vec<f64>> {
    records
        .iter()
        .map(|r| vec![r.n as f64, r.t, r.k, r.rdot_plus, r.theta])
        .collect()
}

pub const BOUNCE_HEADER: [&str; 5] = ["n", "t", "K", "rdot_plus", "theta"];
pub const TRAJECTORY_HEADER: [&str; 3] = ["t", "x", "y"];

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub profile: crate::radius::RadiusProfile,
    pub profile_literal: String,
    pub c: f64,
    pub eps: f64,
    pub sigma: f64,
    pub s0: CylinderState,
    pub n: usize,
    pub seed: Option<u64>,
    pub bounces: usize,
    pub truncated: Option<String>,
    pub checks: RunChecks,
}

impl RunManifest {
    pub fn new(ctx: &GenFunContext, s0: CylinderState, n: usize, seed: Option<u64>, run: &Run, checks: RunChecks) -> Self {
        Self {
            version: crate::VERSION.to_string(),
            profile: ctx.profile.clone(),
            profile_literal: ctx.profile.literal(),
            c: ctx.c,
            eps: ctx.eps,
            sigma: ctx.sigma,
            s0,
            n,
            seed,
            bounces: run.records.len(),
            truncated: run.truncated.clone(),
            checks,
        }
    }
}
