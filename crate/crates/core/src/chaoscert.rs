//! Certificates that a profile destroys every invariant curve whose rotation
//! number lies in a computable window, and Lyapunov estimates as numerical
//! evidence of chaotic motion.
//!
//! An invariant curve of rotation number ω must pass through the line
//! `t = t̄` at some `K` inside the band `[K⁻(ω), K⁺(ω)]`, and along such a
//! curve `a = ∂₁₁h(t̄, t₁) + ∂₂₂h(t₋₁, t̄)` is positive. If `a` is negative
//! throughout the band, no such curve exists.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bmap::{backward, forward, forward_with_jacobian, solve_backward_tau, solve_forward_tau, CylinderState};
use crate::error::{Error, Result};
use crate::genfun::GenFunContext;
use crate::radius::{classify, window_ends, ProfileBounds, ProfileClass, RadiusProfile};

/// Rotation-number window attached to a witness `t̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiWindow {
    pub t_bar: f64,
    /// `R̈(t̄)`.
    pub ddr: f64,
    /// `(ω⁻, ω⁺)` before clamping.
    pub raw: (f64, f64),
    /// `(ω⁻, ω⁺) ∩ (3, σ−1)`.
    pub lo: f64,
    pub hi: f64,
}

impl XiWindow {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.lo && omega <= self.hi
    }

    /// `n ≥ 2` equally spaced points covering the closed window.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        (0..n).map(|i| self.lo + self.width() * i as f64 / (n - 1) as f64).collect()
    }
}

/// Window of the witness with the largest `|R̈|`.
pub fn xi_interval(profile: &RadiusProfile, eps: f64) -> Result<(XiWindow, ProfileBounds)> {
    let v = classify(profile, eps)?;
    if v.class != ProfileClass::RTilde {
        return Err(Error::precondition(format!(
            "profile is in class {:?}, the window needs class R_tilde",
            v.class
        )));
    }
    let w = v.strongest_witness().expect("R_tilde has a witness");
    let b = v.bounds;
    let (lo, hi) = window_ends(&b, w.ddr).expect("witness passes the deceleration test");
    let clo = lo.max(3.0);
    let chi = hi.min(b.sigma - 1.0);
    if !(chi > clo) {
        return Err(Error::precondition(format!(
            "window ({lo}, {hi}) does not meet (3, sigma - 1) = (3, {})",
            b.sigma - 1.0
        )));
    }
    Ok((XiWindow { t_bar: w.t, ddr: w.ddr, raw: (lo, hi), lo: clo, hi: chi }, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KBand {
    pub omega: f64,
    pub k_lo: f64,
    pub k_hi: f64,
}

/// `K⁻ = 2R̲²/(ω+1)² − 2‖Ṙ‖R̄/(ω+1)`, `K⁺ = 2R̄²/(ω−1)² + 2‖Ṙ‖R̄/(ω−1)`.
pub fn k_band_formula(b: &ProfileBounds, omega: f64) -> KBand {
    let drr = 2.0 * b.dr_norm * b.r_max;
    KBand {
        omega,
        k_lo: 2.0 * b.r_min * b.r_min / (omega + 1.0).powi(2) - drr / (omega + 1.0),
        k_hi: 2.0 * b.r_max * b.r_max / (omega - 1.0).powi(2) + drr / (omega - 1.0),
    }
}

/// Band for ω inside the closed window.
pub fn k_band(b: &ProfileBounds, window: &XiWindow, omega: f64) -> Result<KBand> {
    if !window.contains(omega) {
        return Err(Error::domain(format!(
            "rotation number {omega} outside the window [{}, {}]",
            window.lo, window.hi
        )));
    }
    Ok(k_band_formula(b, omega))
}

/// Slack of `2R̄²/σ² < K⁻ ≤ K⁺ < −R̈(t̄)R̲` for one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainMargins {
    /// `K⁻ − 2R̄²/σ²`
    pub lower: f64,
    /// `K⁺ − K⁻`
    pub order: f64,
    /// `−R̈(t̄)R̲ − K⁺`
    pub upper: f64,
}

impl ChainMargins {
    pub fn of(b: &ProfileBounds, ddr: f64, k_lo: f64, k_hi: f64) -> Self {
        Self {
            lower: k_lo - 2.0 * b.r_max * b.r_max / (b.sigma * b.sigma),
            order: k_hi - k_lo,
            upper: -ddr * b.r_min - k_hi,
        }
    }

    pub fn min(self, o: Self) -> Self {
        Self { lower: self.lower.min(o.lower), order: self.order.min(o.order), upper: self.upper.min(o.upper) }
    }

    pub fn positive(&self) -> bool {
        self.lower > 0.0 && self.order >= 0.0 && self.upper > 0.0
    }
}

/// `a_c(t̄, K) = ∂₁₁h(t̄, t₁) + ∂₂₂h(t₋₁, t̄)` along the orbit through `(t̄, K)`.
pub fn a_exact(ctx: &GenFunContext, t_bar: f64, k: f64) -> Result<f64> {
    let tau1 = solve_forward_tau(ctx, t_bar, k)?;
    let tau0 = solve_backward_tau(ctx, t_bar, k)?;
    Ok(ctx.local(t_bar, tau1).h11() + ctx.local(t_bar - tau0, tau0).h22())
}

/// The `c → 0` limit of `a_c` and its upper bound.
///
/// With `Ṙ(t̄) = 0` the neighbouring flights satisfy
/// `τ± = (R(t̄) + R(t̄ ± τ±))/√(2K)`, and
/// `α = 2√(2K)(R̈(t̄) + K(1/(R₋ + R(t̄)) + 1/(R₊ + R(t̄))))`
/// `  ≤ 2√(2K)(R̈(t̄) + K/R̲)`.
///
/// The limit is `None` when the fixed-point iteration for `τ±` does not
/// contract, which happens for very small `K` (long flights).
pub fn alpha_limit(profile: &RadiusProfile, r_min: f64, t_bar: f64, k: f64) -> Result<(Option<f64>, f64)> {
    let e = profile.eval(t_bar);
    if e.dr.abs() > 1e-8 * e.r.max(1.0) {
        return Err(Error::precondition(format!("t = {t_bar} is not stationary: dR = {:e}", e.dr)));
    }
    if !(k > 0.0) {
        return Err(Error::domain(format!("K = {k} must be positive")));
    }
    let v = (2.0 * k).sqrt();
    let neighbour = |sign: f64| -> Option<f64> {
        let mut tau = 2.0 * e.r / v;
        for _ in 0..200 {
            let next = (e.r + profile.r(t_bar + sign * tau)) / v;
            if (next - tau).abs() <= 1e-14 * tau {
                return Some(profile.r(t_bar + sign * next));
            }
            tau = next;
        }
        None
    };
    let alpha = neighbour(1.0)
        .zip(neighbour(-1.0))
        .map(|(rp, rm)| 2.0 * v * (e.ddr + k * (1.0 / (rm + e.r) + 1.0 / (rp + e.r))));
    let upper = 2.0 * v * (e.ddr + k / r_min);
    Ok((alpha, upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub omega_points: usize,
    pub k_samples: usize,
    /// Departure times used to measure the momentum correction of the bands.
    pub t_points: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { omega_points: 33, k_samples: 257, t_points: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotCertified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosCertificate {
    pub version: String,
    pub profile: RadiusProfile,
    pub profile_literal: String,
    pub eps: f64,
    pub c: f64,
    pub options: CertifyOptions,
    pub class: Option<ProfileClass>,
    pub t_bar: Option<f64>,
    pub ddr_bar: Option<f64>,
    pub sigma: Option<f64>,
    pub sigma_star: Option<f64>,
    pub omega_window: Option<XiWindow>,
    pub bands: Vec<KBand>,
    /// Worst chain slack over the unwidened bands.
    pub chain: Option<ChainMargins>,
    /// Band widening in K units: twice the largest change of `∂₁h` caused
    /// by the momentum over the admissible flight times.
    pub widen_margin: Option<f64>,
    /// Chain slack of the widened range.
    pub widened_chain: Option<ChainMargins>,
    pub k_range: Option<(f64, f64)>,
    /// `(K, a_c)` samples.
    pub a_grid: Vec<(f64, f64)>,
    pub a_max: Option<f64>,
    /// `max |a_c − α|` over the samples, in units of `a`.
    pub alpha_gap: Option<f64>,
    /// Largest value of the upper bound `2√(2K)(R̈ + K/R̲)` over the samples.
    pub alpha_upper_max: Option<f64>,
    pub verdict: Verdict,
    pub reason: Option<String>,
}

impl ChaosCertificate {
    fn empty(profile: &RadiusProfile, eps: f64, c: f64, options: CertifyOptions) -> Self {
        Self {
            version: crate::VERSION.to_string(),
            profile: profile.clone(),
            profile_literal: profile.literal(),
            eps,
            c,
            options,
            class: None,
            t_bar: None,
            ddr_bar: None,
            sigma: None,
            sigma_star: None,
            omega_window: None,
            bands: Vec::new(),
            chain: None,
            widen_margin: None,
            widened_chain: None,
            k_range: None,
            a_grid: Vec::new(),
            a_max: None,
            alpha_gap: None,
            alpha_upper_max: None,
            verdict: Verdict::NotCertified,
            reason: None,
        }
    }

    fn reject(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::NotCertified;
        self.reason = Some(reason.into());
        self
    }

    pub fn certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn a_grid_rows(&self) -> Vec<Vec<f64>> {
        self.a_grid.iter().map(|&(k, a)| vec![k, a]).collect()
    }
}

pub const A_GRID_HEADER: [&str; 2] = ["K", "a_c"];

pub fn certify(profile: &RadiusProfile, eps: f64, c: f64) -> ChaosCertificate {
    certify_with(profile, eps, c, CertifyOptions::default())
}

/// Runs the full certification pipeline; failures of any precondition are
/// reported in the certificate rather than as errors.
pub fn certify_with(profile: &RadiusProfile, eps: f64, c: f64, opts: CertifyOptions) -> ChaosCertificate {
    let mut cert = ChaosCertificate::empty(profile, eps, c, opts);
    match classify(profile, eps) {
        Ok(v) => cert.class = Some(v.class),
        Err(e) => return cert.reject(e.to_string()),
    }
    let (window, b) = match xi_interval(profile, eps) {
        Ok(x) => x,
        Err(e) => return cert.reject(e.to_string()),
    };
    cert.t_bar = Some(window.t_bar);
    cert.ddr_bar = Some(window.ddr);
    cert.sigma = Some(b.sigma);
    cert.omega_window = Some(window);
    if !(c > 0.0) {
        return cert.reject(format!("angular momentum must be positive, got {c}"));
    }
    let ctx = match GenFunContext::new(profile.clone(), c, eps) {
        Ok(ctx) => ctx,
        Err(e) => return cert.reject(e.to_string()),
    };
    let ctx0 = ctx.with_momentum(0.0).expect("zero momentum is always admissible");
    cert.sigma_star = Some(ctx.sigma_star);

    let omegas = window.grid(opts.omega_points);
    cert.bands = omegas.iter().map(|&w| k_band_formula(&b, w)).collect();
    let chain = cert
        .bands
        .iter()
        .map(|kb| ChainMargins::of(&b, window.ddr, kb.k_lo, kb.k_hi))
        .reduce(ChainMargins::min)
        .expect("non-empty grid");
    cert.chain = Some(chain);

    let t_points = opts.t_points.max(1);
    let widen = omegas
        .par_iter()
        .map(|&w| {
            let mut m: f64 = 0.0;
            for tau in [w - 1.0, w + 1.0] {
                for i in 0..t_points {
                    let t0 = i as f64 / t_points as f64;
                    m = m.max((ctx.local(t0, tau).h1() - ctx0.local(t0, tau).h1()).abs());
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    let widen = 2.0 * widen;
    cert.widen_margin = Some(widen);
    let k_lo = cert.bands.iter().map(|kb| kb.k_lo).fold(f64::INFINITY, f64::min) - widen;
    let k_hi = cert.bands.iter().map(|kb| kb.k_hi).fold(f64::NEG_INFINITY, f64::max) + widen;
    cert.k_range = Some((k_lo, k_hi));
    let widened = ChainMargins::of(&b, window.ddr, k_lo, k_hi);
    cert.widened_chain = Some(widened);
    if !(k_lo > ctx.sigma_star) {
        return cert.reject(format!("band reaches below the map threshold sigma_* = {}", ctx.sigma_star));
    }

    let n = opts.k_samples.max(2);
    let ks: Vec<f64> = (0..n).map(|i| k_lo + (k_hi - k_lo) * i as f64 / (n - 1) as f64).collect();
    let evals: Vec<Result<(f64, f64, f64)>> = ks
        .par_iter()
        .map(|&k| {
            let a = a_exact(&ctx, window.t_bar, k)?;
            let (alpha, upper) = alpha_limit(profile, b.r_min, window.t_bar, k)?;
            Ok((a, alpha.unwrap_or(f64::NAN), upper))
        })
        .collect();
    let mut a_max = f64::NEG_INFINITY;
    let mut gap: f64 = 0.0;
    let mut upper_max = f64::NEG_INFINITY;
    for (k, ev) in ks.iter().zip(evals) {
        match ev {
            Ok((a, alpha, upper)) => {
                cert.a_grid.push((*k, a));
                a_max = a_max.max(a);
                if alpha.is_finite() {
                    gap = gap.max((a - alpha).abs());
                }
                upper_max = upper_max.max(upper);
            }
            Err(e) => return cert.reject(format!("a_c at K = {k}: {e}")),
        }
    }
    cert.a_max = Some(a_max);
    cert.alpha_gap = Some(gap);
    cert.alpha_upper_max = Some(upper_max);
    if !chain.positive() || !widened.positive() {
        return cert.reject("band chain has non-positive slack");
    }
    if a_max >= 0.0 {
        return cert.reject(format!("a_c reaches {a_max} >= 0 inside the band"));
    }
    cert.verdict = Verdict::Certified;
    cert
}

/// Outcome of the search for the momentum threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C0Report {
    /// Largest certified momentum found, if any.
    pub c0: Option<f64>,
    /// `εR̲²/σ`, the end of the admissible range.
    pub c_max: f64,
    pub iterations: usize,
    /// Every probed `(c, certified, a_max)`.
    pub probes: Vec<(f64, bool, Option<f64>)>,
    /// False when some certified probe lies above a rejected one.
    pub monotone: bool,
    pub note: Option<String>,
}

/// Bisection for the largest certified momentum on `(0, εR̲²/σ)`, assuming
/// the verdict is monotone in `c`; the probes are reported so that this
/// assumption can be checked.
pub fn c0_search(profile: &RadiusProfile, eps: f64, iterations: usize, opts: CertifyOptions) -> Result<C0Report> {
    let (_, b) = xi_interval(profile, eps)?;
    let c_max = b.c_max();
    let mut probes = Vec::new();
    let mut probe = |c: f64| {
        let cert = certify_with(profile, eps, c, opts);
        probes.push((c, cert.certified(), cert.a_max));
        cert.certified()
    };
    let report = |c0: Option<f64>, note: Option<String>, probes: Vec<(f64, bool, Option<f64>)>| {
        let monotone = probes
            .iter()
            .all(|&(c1, ok1, _)| !ok1 || probes.iter().all(|&(c2, ok2, _)| ok2 || c2 > c1));
        C0Report { c0, c_max, iterations, probes, monotone, note }
    };
    let c_small = 1e-6 * c_max;
    if !probe(c_small) {
        return Ok(report(None, Some(format!("not certified even at c = {c_small:e}")), probes));
    }
    let mut lo = c_small;
    let mut hi = c_max;
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if probe(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(report(Some(lo), None, probes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub s0: CylinderState,
    /// `(1/n) Σ log‖J v‖` over the completed steps.
    pub lambda: f64,
    pub steps: usize,
    pub requested: usize,
    /// Reason the orbit stopped early, if it did.
    pub truncated: Option<String>,
}

/// Per-step growth factors `‖J_n v_n‖` of a renormalised tangent vector,
/// starting from `v = (1, 0)`. Stops early if the orbit leaves the domain.
pub fn tangent_growth(ctx: &GenFunContext, s0: CylinderState, n: usize) -> (Vec<f64>, Option<String>) {
    let mut s = CylinderState::new(s0.t.rem_euclid(1.0), s0.k);
    let mut v = [1.0, 0.0];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        match forward_with_jacobian(ctx, s) {
            Ok((img, j)) => {
                let w = j.apply(v);
                let norm = w[0].hypot(w[1]);
                norms.push(norm);
                v = [w[0] / norm, w[1] / norm];
                s = CylinderState::new(img.state.t.rem_euclid(1.0), img.state.k);
            }
            Err(e) => return (norms, Some(format!("left the domain after {i} steps: {e}"))),
        }
    }
    (norms, None)
}

pub fn lyapunov(ctx: &GenFunContext, s0: CylinderState, n: usize) -> Result<LyapunovEstimate> {
    if n == 0 {
        return Err(Error::precondition("need at least one step"));
    }
    forward(ctx, s0)?;
    let (norms, truncated) = tangent_growth(ctx, s0, n);
    let steps = norms.len();
    let lambda = norms.iter().map(|x| x.ln()).sum::<f64>() / steps as f64;
    Ok(LyapunovEstimate { s0, lambda, steps, requested: n, truncated })
}

/// `count` initial states with `t ∈ [0, 1)` and `K ∈ [k_lo, k_hi]`.
pub fn band_seeds(k_lo: f64, k_hi: f64, count: usize, seed: u64) -> Vec<CylinderState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t: f64 = rng.gen();
            let u: f64 = rng.gen();
            CylinderState::new(t, k_lo + (k_hi - k_lo) * u)
        })
        .collect()
}

/// Lyapunov estimates for many seeds, computed in parallel.
pub fn lyapunov_table(ctx: &GenFunContext, seeds: &[CylinderState], n: usize) -> Vec<Result<LyapunovEstimate>> {
    seeds.par_iter().map(|&s| lyapunov(ctx, s, n)).collect()
}

/// Check that `backward` inverts `forward` at `(t̄, K)`; used by callers
/// validating a certificate's sample points.
pub fn round_trip_error(ctx: &GenFunContext, s: CylinderState) -> Result<f64> {
    let img = forward(ctx, s)?;
    let back = backward(ctx, img.state)?;
    Ok((back.state.t - s.t).abs().max((back.state.k - s.k).abs() / s.k.abs().max(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radius::bounds;

    fn member() -> RadiusProfile {
        RadiusProfile::single_harmonic(9000.0, 0.05).unwrap()
    }

    #[test]
    fn window_for_large_member() {
        let (w, b) = xi_interval(&member(), 0.5).unwrap();
        assert!((w.t_bar - 0.25).abs() < 1e-10);
        assert!((w.lo - 105.1).abs() < 0.5 && (w.hi - 113.5).abs() < 0.5, "{w:?}");
        assert!(3.0 < w.lo && w.lo < w.hi && w.hi < b.sigma - 1.0);
    }

    #[test]
    fn constant_profile_has_no_window() {
        let p = RadiusProfile::constant(1.0).unwrap();
        assert!(matches!(xi_interval(&p, 0.5), Err(Error::Precondition(_))));
        let cert = certify(&p, 0.5, 0.1);
        assert!(!cert.certified() && cert.reason.is_some());
    }

    #[test]
    fn band_values() {
        let p = member();
        let (w, b) = xi_interval(&p, 0.5).unwrap();
        let kb = k_band(&b, &w, 109.0).unwrap();
        assert!((kb.k_lo - 13337.0).abs() < 5.0, "{kb:?}");
        assert!((kb.k_hi - 13941.4).abs() < 1.0, "{kb:?}");
        assert!(k_band(&b, &w, 120.0).is_err());
        let flat = bounds(&RadiusProfile::constant(2.0).unwrap(), 0.5, 256).unwrap();
        let kb = k_band_formula(&flat, 9.0);
        assert!((kb.k_lo - 8.0 / 100.0).abs() < 1e-15 && (kb.k_hi - 8.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn static_a_is_positive() {
        let ctx = GenFunContext::with_sigma(RadiusProfile::constant(1.0).unwrap(), 1e-4, 0.9, 10.0).unwrap();
        let a = a_exact(&ctx, 0.0, 2.0).unwrap();
        assert!((a - 8.0).abs() < 1e-6, "{a}");
    }

    #[test]
    fn alpha_bound_zero_and_sign() {
        let p = member();
        let r_min = 9000.0 - 0.05;
        let ddr = p.eval(0.25).ddr;
        let k_root = -ddr * r_min;
        let (_, up) = alpha_limit(&p, r_min, 0.25, k_root).unwrap();
        assert!(up.abs() < 1e-9 * k_root);
        let (_, up) = alpha_limit(&p, r_min, 0.25, 1e-6).unwrap();
        assert!(up < 0.0);
        let (alpha, up) = alpha_limit(&p, r_min, 0.25, 13500.0).unwrap();
        let expect = 2.0 * 27000f64.sqrt() * (ddr + 13500.0 / r_min);
        assert!((up - expect).abs() < 1e-9 * expect.abs() && up < 0.0);
        assert!(alpha.unwrap() <= up);
        assert!(alpha_limit(&p, r_min, 0.1, 13500.0).is_err());
    }

    #[test]
    fn growth_is_bookkeeping_exact() {
        let p = RadiusProfile::new(5.0, vec![(1, 0.03), (2, 0.01)]).unwrap();
        let ctx = GenFunContext::new(p, 0.2, 0.5).unwrap();
        let s0 = CylinderState::new(0.1, 3.0 * ctx.sigma_star);
        let (norms, trunc) = tangent_growth(&ctx, s0, 50);
        assert!(trunc.is_none());
        let mut s = s0;
        let mut v = [1.0, 0.0];
        for _ in 0..50 {
            let (img, j) = forward_with_jacobian(&ctx, s).unwrap();
            v = j.apply(v);
            s = img.state;
        }
        let prod: f64 = norms.iter().product();
        assert!((prod - v[0].hypot(v[1])).abs() < 1e-6 * prod);
    }
}
