//! Boundary radius profiles `R(t) = M + Σ δᵢ sin(2π kᵢ t)`.
//!
//! This module owns everything that depends on the profile alone: analytic
//! derivatives, the sup-norms entering the flight-window constant σ, the
//! classification into the regular class `R` (σ > 2) and the chaotic class
//! `R̃`, and the search for members of the trigonometric family
//! `M + δ sin(2πkt) + δ sin(2πt)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect, sup_periodic};

const TWO_PI: f64 = 2.0 * PI;

/// A 1-periodic trigonometric radius profile.
///
/// Serialises as `{"mean": M, "harmonics": [[k, d], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusProfile {
    pub mean: f64,
    pub harmonics: Vec<(u32, f64)>,
}

/// Radius and its first two time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEval {
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
}

impl RadiusProfile {
    pub fn new(mean: f64, harmonics: Vec<(u32, f64)>) -> Result<Self> {
        let p = Self { mean, harmonics };
        p.validate()?;
        Ok(p)
    }

    pub fn constant(mean: f64) -> Result<Self> {
        Self::new(mean, Vec::new())
    }

    /// `M + δ sin(2πt)`.
    pub fn single_harmonic(mean: f64, delta: f64) -> Result<Self> {
        Self::new(mean, vec![(1, delta)])
    }

    /// Member of the constructive family: `k = 1` is the single harmonic
    /// `M + δ sin(2πt)`, `k ≥ 2` is `M + δ sin(2πkt) + δ sin(2πt)`.
    pub fn family_member(k: u32, delta: f64, mean: f64) -> Result<Self> {
        match k {
            0 => Err(Error::precondition("frequency k must be positive")),
            1 => Self::single_harmonic(mean, delta),
            _ => Self::new(mean, vec![(k, delta), (1, delta)]),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)
            .map_err(|e| Error::precondition(format!("malformed profile literal: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serialises")
    }

    fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() || self.mean <= 0.0 {
            return Err(Error::precondition("profile mean must be positive and finite"));
        }
        if let Some((k, _)) = self.harmonics.iter().find(|(k, _)| *k == 0) {
            return Err(Error::precondition(format!("harmonic frequency {k} must be positive")));
        }
        if self.harmonics.iter().any(|(_, d)| !d.is_finite()) {
            return Err(Error::precondition("harmonic amplitudes must be finite"));
        }
        let amp: f64 = self.harmonics.iter().map(|(_, d)| d.abs()).sum();
        if self.mean <= amp {
            return Err(Error::precondition(format!(
                "profile not strictly positive: mean {} <= sum of amplitudes {amp}",
                self.mean
            )));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        self.harmonics.iter().all(|(_, d)| *d == 0.0)
    }

    /// Human-readable form `M + d1*sin(2*pi*k1*t) + ...`.
    pub fn literal(&self) -> String {
        let mut s = format!("{}", self.mean);
        for (k, d) in &self.harmonics {
            s.push_str(&format!(" + {d}*sin(2*pi*{k}*t)"));
        }
        s
    }

    pub fn eval(&self, t: f64) -> RadiusEval {
        // exact reduction keeps the phase accurate for large lifts
        let t = t.rem_euclid(1.0);
        let mut out = RadiusEval { r: self.mean, dr: 0.0, ddr: 0.0 };
        for &(k, d) in &self.harmonics {
            let w = TWO_PI * k as f64;
            let (s, c) = (w * t).sin_cos();
            out.r += d * s;
            out.dr += d * w * c;
            out.ddr -= d * w * w * s;
        }
        out
    }

    pub fn r(&self, t: f64) -> f64 {
        self.eval(t).r
    }

    /// `d²/dt² R²(t) = 2(Ṙ² + R R̈)`.
    pub fn ddr2(&self, t: f64) -> f64 {
        let e = self.eval(t);
        2.0 * (e.dr * e.dr + e.r * e.ddr)
    }
}

/// Sup-norm data of a profile and the derived flight-window constant σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileBounds {
    pub eps: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub dr_norm: f64,
    pub ddr2_norm: f64,
    /// `+∞` (serialised as `null`) when both denominators vanish.
    #[serde(with = "inf_as_null")]
    pub sigma: f64,
}

impl ProfileBounds {
    /// The two expressions whose minimum is σ.
    pub fn sigma_terms(&self) -> (f64, f64) {
        let alpha = eps_alpha(self.eps);
        let speed = if self.dr_norm > 0.0 {
            self.r_min / (2.0 * self.dr_norm)
        } else {
            f64::INFINITY
        };
        let curvature = if self.ddr2_norm > 0.0 {
            2.0 * alpha * self.r_min / self.ddr2_norm.sqrt()
        } else {
            f64::INFINITY
        };
        (speed, curvature)
    }

    /// Upper end of the admissible angular momenta, `ε R̲² / σ`.
    pub fn c_max(&self) -> f64 {
        self.eps * self.r_min * self.r_min / self.sigma
    }
}

pub(crate) mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// `α = √(1 + √(1 − ε²))`.
pub fn eps_alpha(eps: f64) -> f64 {
    (1.0 + (1.0 - eps * eps).sqrt()).sqrt()
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::precondition(format!("eps must lie in (0,1), got {eps}")))
    }
}

/// Sup-norms by dense sampling plus golden-section refinement.
pub fn bounds(profile: &RadiusProfile, eps: f64, grid_n: usize) -> Result<ProfileBounds> {
    check_eps(eps)?;
    if grid_n < 256 {
        return Err(Error::precondition(format!("grid_n must be at least 256, got {grid_n}")));
    }
    let tol = 1e-10;
    let (r_max, r_min, dr_norm, ddr2_norm) = if profile.is_constant() {
        (profile.mean, profile.mean, 0.0, 0.0)
    } else {
        let r_max = sup_periodic(|t| profile.r(t), grid_n, tol).1;
        let r_min = -sup_periodic(|t| -profile.r(t), grid_n, tol).1;
        let dr_norm = sup_periodic(|t| profile.eval(t).dr.abs(), grid_n, tol).1;
        let ddr2_norm = sup_periodic(|t| profile.ddr2(t).abs(), grid_n, tol).1;
        (r_max, r_min, dr_norm, ddr2_norm)
    };
    let mut b = ProfileBounds { eps, r_min, r_max, dr_norm, ddr2_norm, sigma: f64::INFINITY };
    let (s1, s2) = b.sigma_terms();
    b.sigma = s1.min(s2);
    Ok(b)
}

pub const DEFAULT_GRID: usize = 4096;

/// Roots of `Ṙ` in `[0,1)` paired with `R̈` there.
pub fn stationary_points(profile: &RadiusProfile) -> Result<Vec<(f64, f64)>> {
    if profile.is_constant() {
        return Err(Error::Degenerate("constant profile has no isolated stationary points".into()));
    }
    let n = 1024;
    let h = 1.0 / n as f64;
    let dr = |t: f64| profile.eval(t).dr;
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n {
        let a = i as f64 * h;
        let b = a + h;
        let (fa, fb) = (dr(a), dr(b));
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(bisect(dr, a, b, 1e-13).rem_euclid(1.0));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if roots.len() > 1 && (roots[0] + 1.0 - roots[roots.len() - 1]).abs() < 1e-9 {
        roots.pop();
    }
    Ok(roots.into_iter().map(|t| (t, profile.eval(t).ddr)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileClass {
    #[serde(rename = "none")]
    None,
    R,
    #[serde(rename = "R_tilde")]
    RTilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub ddr: f64,
}

/// Signed slack of every inequality; positive means satisfied.
///
/// The witness-dependent entries are evaluated at the stationary point with
/// the most negative `R̈`; they are `None` when no such point exists or the
/// expression is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMargins {
    /// σ − 2
    pub class_r: Option<f64>,
    /// (i): σ − 4
    pub sigma: Option<f64>,
    /// −(R̈(t̄)R̲ + ‖Ṙ‖R̄)
    pub deceleration: Option<f64>,
    /// (ii) left: ω⁻ − 3
    pub window_lower: Option<f64>,
    /// (ii) right: ω⁺ − ω⁻
    pub window_width: Option<f64>,
    /// (iii): −2R̄²/(σ²R̲) − R̈(t̄)
    pub curvature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub class: ProfileClass,
    pub witnesses: Vec<Witness>,
    pub margins: ClassMargins,
    pub degenerate: bool,
    pub bounds: ProfileBounds,
}

impl ClassVerdict {
    /// Witness with the largest `|R̈|`.
    pub fn strongest_witness(&self) -> Option<Witness> {
        self.witnesses
            .iter()
            .copied()
            .max_by(|a, b| a.ddr.abs().total_cmp(&b.ddr.abs()))
    }
}

/// The two ends of the rotation-number window for a given `R̈(t̄)`.
///
/// Returns `None` when the deceleration condition fails.
pub(crate) fn window_ends(b: &ProfileBounds, ddr: f64) -> Option<(f64, f64)> {
    let decel = -ddr * b.r_min - b.dr_norm * b.r_max;
    if decel <= 0.0 {
        return None;
    }
    let inv_sig2 = if b.sigma.is_finite() { 1.0 / (b.sigma * b.sigma) } else { 0.0 };
    let lo = 1.0 + (2.0 * b.r_max * b.r_max / decel).sqrt();
    let hi = -1.0
        + (2.0 * b.r_min * b.r_min / (2.0 * b.r_max * b.r_max * inv_sig2 + b.dr_norm * b.r_max))
            .sqrt();
    Some((lo, hi))
}

struct WitnessCheck {
    deceleration: f64,
    window_lower: Option<f64>,
    window_width: Option<f64>,
    curvature: f64,
}

impl WitnessCheck {
    fn new(b: &ProfileBounds, ddr: f64) -> Self {
        let inv_sig2 = if b.sigma.is_finite() { 1.0 / (b.sigma * b.sigma) } else { 0.0 };
        let ends = window_ends(b, ddr);
        Self {
            deceleration: -(ddr * b.r_min + b.dr_norm * b.r_max),
            window_lower: ends.map(|(lo, _)| lo - 3.0),
            window_width: ends.map(|(lo, hi)| hi - lo),
            curvature: -2.0 * b.r_max * b.r_max * inv_sig2 / b.r_min - ddr,
        }
    }

    fn passes(&self) -> bool {
        self.deceleration > 0.0
            && self.window_lower.is_some_and(|m| m > 0.0)
            && self.window_width.is_some_and(|m| m > 0.0)
            && self.curvature > 0.0
    }
}

pub fn classify(profile: &RadiusProfile, eps: f64) -> Result<ClassVerdict> {
    classify_with_grid(profile, eps, DEFAULT_GRID)
}

pub fn classify_with_grid(profile: &RadiusProfile, eps: f64, grid_n: usize) -> Result<ClassVerdict> {
    let b = bounds(profile, eps, grid_n)?;
    let finite = |x: f64| x.is_finite().then_some(x);
    let class_r = b.sigma > 2.0;
    let mut margins = ClassMargins {
        class_r: finite(b.sigma - 2.0),
        sigma: finite(b.sigma - 4.0),
        deceleration: None,
        window_lower: None,
        window_width: None,
        curvature: None,
    };
    if profile.is_constant() {
        return Ok(ClassVerdict {
            class: if class_r { ProfileClass::R } else { ProfileClass::None },
            witnesses: Vec::new(),
            margins,
            degenerate: true,
            bounds: b,
        });
    }
    let stationary = stationary_points(profile)?;
    if let Some(&(_, ddr)) = stationary.iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
        let w = WitnessCheck::new(&b, ddr);
        margins.deceleration = Some(w.deceleration);
        margins.window_lower = w.window_lower;
        margins.window_width = w.window_width;
        margins.curvature = Some(w.curvature);
    }
    let witnesses: Vec<Witness> = stationary
        .iter()
        .filter(|(_, ddr)| WitnessCheck::new(&b, *ddr).passes())
        .map(|&(t, ddr)| Witness { t, ddr })
        .collect();
    let class = if b.sigma > 4.0 && !witnesses.is_empty() {
        ProfileClass::RTilde
    } else if class_r {
        ProfileClass::R
    } else {
        ProfileClass::None
    };
    Ok(ClassVerdict { class, witnesses, margins, degenerate: false, bounds: b })
}

/// Threshold frequency `k̄(ε)` above which the two-harmonic family works.
pub fn k_bar(eps: f64) -> f64 {
    let a2 = 1.0 + (1.0 - eps * eps).sqrt();
    (a2 + (2.0 * a2 * a2 - 1.0).sqrt()) / (a2 - 1.0)
}

/// Open amplitude window `(1/(4π²(k²+1)), 1/(2π(k+1)))` for frequency `k`.
pub fn delta_window(k: u32) -> (f64, f64) {
    let k = k as f64;
    (1.0 / (4.0 * PI * PI * (k * k + 1.0)), 1.0 / (TWO_PI * (k + 1.0)))
}

/// Largest ε for which a single harmonic can be in `R̃`: `√(1 − 1/(π−1)²)`.
pub fn single_harmonic_eps_threshold() -> f64 {
    (1.0 - 1.0 / ((PI - 1.0) * (PI - 1.0))).sqrt()
}

/// Sufficient mean from the constructive proof: the larger of the two
/// explicit lower bounds on `M` for frequency `k` and amplitude `δ`.
pub fn constructive_mean_bound(k: u32, delta: f64) -> f64 {
    let kf = k as f64;
    let m1 = (34.0 * delta).max(2.0 * delta + 216.0 * PI * PI * (kf + 1.0).powi(2));
    let q = 4.0 * PI * PI * delta * (kf * kf + 1.0);
    let m3 = if q > 1.0 { 2.0 * delta * (q + 1.0) / (q - 1.0) } else { f64::INFINITY };
    m1.max(m3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub k: u32,
    pub delta: f64,
    pub eps: f64,
    pub mean: f64,
    pub profile: RadiusProfile,
    pub verdict: ClassVerdict,
    /// Sufficient mean from the constructive proof, for comparison.
    #[serde(with = "inf_as_null")]
    pub constructive_bound: f64,
}

/// Checks the admissibility conditions of the constructive family.
pub fn check_family_window(k: u32, delta: f64, eps: f64) -> Result<()> {
    check_eps(eps)?;
    if !(delta > 0.0) {
        return Err(Error::precondition(format!("amplitude delta must be positive, got {delta}")));
    }
    match k {
        0 => Err(Error::precondition("frequency k must be positive")),
        1 => {
            let thr = single_harmonic_eps_threshold();
            if eps < thr {
                Ok(())
            } else {
                Err(Error::precondition(format!(
                    "single harmonic requires eps < sqrt(1-1/(pi-1)^2) = {thr:.6}, got {eps}"
                )))
            }
        }
        _ => {
            let kb = k_bar(eps);
            if (k as f64) <= kb {
                return Err(Error::precondition(format!("k > k_bar(eps) = {kb:.6} violated by k = {k}")));
            }
            let (lo, hi) = delta_window(k);
            if delta <= lo {
                return Err(Error::precondition(format!(
                    "delta > 1/(4 pi^2 (k^2+1)) = {lo:.6e} violated by delta = {delta}"
                )));
            }
            if delta >= hi {
                return Err(Error::precondition(format!(
                    "delta < 1/(2 pi (k+1)) = {hi:.6e} violated by delta = {delta}"
                )));
            }
            Ok(())
        }
    }
}

fn is_member(k: u32, delta: f64, eps: f64, mean: f64) -> Result<Option<ClassVerdict>> {
    let p = RadiusProfile::family_member(k, delta, mean)?;
    let v = classify(&p, eps)?;
    Ok((v.class == ProfileClass::RTilde).then_some(v))
}

fn round_up_3sig(x: f64) -> f64 {
    let unit = 10f64.powi(x.log10().floor() as i32 - 2);
    (x / unit).ceil() * unit
}

/// Smallest mean on a geometric grid (factor 1.25, refined to three
/// significant digits) whose family member classifies as `R̃`.
///
/// The scan starts at `mean_hint` when given, otherwise just above the
/// positivity limit; a hint that is already a member is returned unchanged.
pub fn find_member(k: u32, delta: f64, eps: f64, mean_hint: Option<f64>) -> Result<Member> {
    check_family_window(k, delta, eps)?;
    let amp = if k == 1 { delta } else { 2.0 * delta };
    let start = match mean_hint {
        Some(m) if m > amp => m,
        Some(m) => {
            return Err(Error::precondition(format!(
                "mean hint {m} does not keep the profile positive (needs > {amp})"
            )))
        }
        None => 2.0 * amp,
    };
    let finish = |mean: f64, verdict: ClassVerdict| -> Result<Member> {
        Ok(Member {
            k,
            delta,
            eps,
            mean,
            profile: RadiusProfile::family_member(k, delta, mean)?,
            verdict,
            constructive_bound: constructive_mean_bound(k, delta),
        })
    };
    if let Some(v) = is_member(k, delta, eps, start)? {
        return finish(start, v);
    }
    let mut lo = start;
    let mut hi = None;
    let mut m = start;
    for _ in 0..400 {
        m *= 1.25;
        if is_member(k, delta, eps, m)?.is_some() {
            hi = Some(m);
            break;
        }
        lo = m;
    }
    let mut hi = hi.ok_or_else(|| {
        Error::Convergence(format!("no member found for k={k}, delta={delta}, eps={eps} up to M={m:.3e}"))
    })?;
    while hi - lo > 5e-5 * hi {
        let mid = 0.5 * (lo + hi);
        if is_member(k, delta, eps, mid)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut candidate = round_up_3sig(hi);
    let unit = 10f64.powi(candidate.log10().floor() as i32 - 2);
    for _ in 0..20 {
        if let Some(v) = is_member(k, delta, eps, candidate)? {
            return finish(candidate, v);
        }
        candidate += unit;
    }
    let v = is_member(k, delta, eps, hi)?.expect("bracket end is a member");
    finish(hi, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn eval_constant_profile() {
        let p = RadiusProfile::constant(1.0).unwrap();
        assert_eq!(p.eval(0.37), RadiusEval { r: 1.0, dr: 0.0, ddr: 0.0 });
    }

    #[test]
    fn eval_single_harmonic_quarter_period() {
        let p = RadiusProfile::single_harmonic(2.0, 0.1).unwrap();
        let e = p.eval(0.25);
        assert_close(e.r, 2.1, 1e-15);
        assert_close(e.dr, 0.0, 1e-15);
        assert_close(e.ddr, -0.1 * 4.0 * PI * PI, 1e-13);
        assert_close(e.ddr, -3.9478, 1e-4);
    }

    #[test]
    fn rejects_nonpositive_profiles() {
        assert!(RadiusProfile::new(1.0, vec![(1, 0.6), (2, 0.5)]).is_err());
        assert!(RadiusProfile::new(-1.0, vec![]).is_err());
        assert!(RadiusProfile::new(1.0, vec![(0, 0.1)]).is_err());
        assert!(RadiusProfile::from_json(r#"{"mean":1,"harmonics":[[1]]}"#).is_err());
    }

    #[test]
    fn json_literal_round_trip() {
        let p = RadiusProfile::from_json(r#"{"mean":9000,"harmonics":[[1,0.05]]}"#).unwrap();
        assert_eq!(p.harmonics, vec![(1, 0.05)]);
        assert_eq!(RadiusProfile::from_json(&p.to_json()).unwrap(), p);
        assert_eq!(p.literal(), "9000 + 0.05*sin(2*pi*1*t)");
    }

    #[test]
    fn two_harmonic_bounds_match_closed_form() {
        let (m, d, k) = (50.0, 0.01, 5u32);
        let p = RadiusProfile::family_member(k, d, m).unwrap();
        let b = bounds(&p, 0.5, 1024).unwrap();
        assert_close(b.r_min, m - 2.0 * d, 1e-10);
        assert_close(b.r_max, m + 2.0 * d, 1e-10);
        assert_close(b.dr_norm, 2.0 * PI * d * (k as f64 + 1.0), 1e-10);
    }

    #[test]
    fn constant_profile_has_infinite_sigma() {
        let p = RadiusProfile::constant(1.0).unwrap();
        let b = bounds(&p, 0.5, 256).unwrap();
        assert!(b.sigma.is_infinite());
        let json = serde_json::to_string(&b).unwrap();
        assert!(json.contains("\"sigma\":null"));
        let back: ProfileBounds = serde_json::from_str(&json).unwrap();
        assert!(back.sigma.is_infinite());
    }

    #[test]
    fn bounds_preconditions() {
        let p = RadiusProfile::single_harmonic(2.0, 0.1).unwrap();
        assert!(matches!(bounds(&p, 1.0, 1024), Err(Error::Precondition(_))));
        assert!(matches!(bounds(&p, 0.5, 100), Err(Error::Precondition(_))));
    }

    #[test]
    fn large_mean_sigma() {
        // σ from the curvature term: 2αR̲/√‖(R²)″‖ with the norm computed
        // independently on a fine grid here.
        let p = RadiusProfile::single_harmonic(9000.0, 0.05).unwrap();
        let b = bounds(&p, 0.5, 1024).unwrap();
        let fine = (0..200_000)
            .map(|i| p.ddr2(i as f64 / 200_000.0).abs())
            .fold(0.0, f64::max);
        let expect = 2.0 * eps_alpha(0.5) * (9000.0 - 0.05) / fine.sqrt();
        assert_close(b.sigma, expect, 1e-6);
        assert_close(b.sigma, 130.4, 1.0);
    }

    #[test]
    fn stationary_points_of_single_sinusoid() {
        let p = RadiusProfile::single_harmonic(9000.0, 0.05).unwrap();
        let s = stationary_points(&p).unwrap();
        assert_eq!(s.len(), 2);
        assert_close(s[0].0, 0.25, 1e-12);
        assert_close(s[1].0, 0.75, 1e-12);
        assert_close(s[0].1, -4.0 * PI * PI * 0.05, 1e-12);
        assert_close(s[0].1, -1.9739, 1e-4);
        assert_close(s[1].1, 4.0 * PI * PI * 0.05, 1e-12);
        for (t, _) in s {
            assert!(p.eval(t).dr.abs() < 1e-10);
        }
    }

    #[test]
    fn stationary_points_reject_constant() {
        let p = RadiusProfile::constant(3.0).unwrap();
        assert!(matches!(stationary_points(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn classify_reference_profiles() {
        let c = classify(&RadiusProfile::constant(1.0).unwrap(), 0.5).unwrap();
        assert_eq!(c.class, ProfileClass::R);
        assert!(c.degenerate && c.witnesses.is_empty());

        let big = classify(&RadiusProfile::single_harmonic(9000.0, 0.05).unwrap(), 0.5).unwrap();
        assert_eq!(big.class, ProfileClass::RTilde);
        assert_eq!(big.witnesses.len(), 1);
        assert_close(big.witnesses[0].t, 0.25, 1e-12);

        let small = classify(&RadiusProfile::single_harmonic(1.0, 0.2).unwrap(), 0.5).unwrap();
        assert_eq!(small.class, ProfileClass::None);
        let (speed, _) = small.bounds.sigma_terms();
        assert_close(speed, 0.8 / (0.8 * PI), 1e-9);
    }

    #[test]
    fn family_thresholds() {
        let kb = k_bar(0.5);
        let a2 = 1.0 + 0.75f64.sqrt();
        assert_close(kb, (a2 + (2.0 * a2 * a2 - 1.0).sqrt()) / (a2 - 1.0), 1e-15);
        assert_close(kb, 4.975, 1e-3);
        let (lo, hi) = delta_window(5);
        assert_close(lo, 9.75e-4, 1e-6);
        assert_close(hi, 2.653e-2, 1e-5);
        assert_close(single_harmonic_eps_threshold(), 0.884288, 1e-6);
        assert_close(constructive_mean_bound(1, 0.05), 2.0 * 0.05 + 216.0 * PI * PI * 4.0, 1e-9);
    }

    #[test]
    fn family_window_rejections_name_the_inequality() {
        let e = check_family_window(4, 0.01, 0.5).unwrap_err().to_string();
        assert!(e.contains("k_bar"), "{e}");
        let e = check_family_window(5, 1e-4, 0.5).unwrap_err().to_string();
        assert!(e.contains("delta >"), "{e}");
        let e = check_family_window(5, 0.05, 0.5).unwrap_err().to_string();
        assert!(e.contains("delta <"), "{e}");
        let e = check_family_window(1, 0.05, 0.9).unwrap_err().to_string();
        assert!(e.contains("single harmonic"), "{e}");
    }

    #[test]
    fn find_member_single_harmonic_is_minimal_and_certified() {
        let m = find_member(1, 0.05, 0.5, None).unwrap();
        assert_eq!(m.verdict.class, ProfileClass::RTilde);
        // the mean just below fails
        let below = RadiusProfile::single_harmonic(m.mean * 0.99, 0.05).unwrap();
        assert_ne!(classify(&below, 0.5).unwrap().class, ProfileClass::RTilde);
        // three significant digits
        let unit = 10f64.powi(m.mean.log10().floor() as i32 - 2);
        assert_close((m.mean / unit).round() * unit, m.mean, 1e-9 * m.mean);
        assert!(m.mean < m.constructive_bound);
    }

    #[test]
    fn find_member_respects_hint() {
        let m = find_member(1, 0.05, 0.5, Some(9000.0)).unwrap();
        assert_eq!(m.mean, 9000.0);
        assert_eq!(m.verdict.class, ProfileClass::RTilde);
    }

    #[test]
    fn find_member_two_harmonic() {
        let m = find_member(5, 0.01, 0.5, None).unwrap();
        assert_eq!(classify(&m.profile, 0.5).unwrap().class, ProfileClass::RTilde);
    }
}
