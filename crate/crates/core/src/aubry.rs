//! Minimal orbits of the billiard map found by minimising the discrete action
//! `H = Σ h(t_n, t_{n+1})`.
//!
//! A `(p, q)` orbit is a sequence with `t_{n+q} = t_n + p`. Minimisers are
//! searched for in the box where every gap `t_{n+1} − t_n` lies within
//! `[max(β, ω−1), min(σ−β, ω+1)]`, `ω = p/q`, which contains all minimal
//! orbits of rotation number ω. Each start runs Gauss–Seidel sweeps (one
//! bounded 1-D minimisation per coordinate) followed by Newton iterations
//! on the stationarity equations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::GenFunContext;
use crate::numerics::brent_min;

/// Stationarity threshold for accepting an orbit.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalOrbit {
    pub p: i64,
    pub q: usize,
    /// `t_0 … t_{q−1}`, with `t_0 ∈ [0, 1)` the point of smallest phase.
    pub times: Vec<f64>,
    /// `K_n = ∂₁h(t_n, t_{n+1})`.
    pub ks: Vec<f64>,
    pub action: f64,
    pub residual: f64,
    /// Gaps positive and hull samples non-decreasing.
    pub monotone: bool,
    /// Admissible gap interval.
    pub gap_box: (f64, f64),
    pub starts: usize,
    /// Number of starts that reached the residual threshold.
    pub converged: usize,
    pub seed: u64,
}

impl MinimalOrbit {
    /// Lifted time `t_n` for any integer `n`.
    pub fn time(&self, n: i64) -> f64 {
        lifted(&self.times, self.p, n)
    }

    pub fn gaps(&self) -> Vec<f64> {
        (0..self.q as i64).map(|n| self.time(n + 1) - self.time(n)).collect()
    }

    /// Rows `(n, t, K)` for CSV export.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.ks)
            .enumerate()
            .map(|(n, (t, k))| vec![n as f64, *t, *k])
            .collect()
    }
}

pub const ORBIT_HEADER: [&str; 3] = ["n", "t", "K"];

fn lifted(times: &[f64], p: i64, n: i64) -> f64 {
    let q = times.len() as i64;
    let m = n.div_euclid(q);
    times[n.rem_euclid(q) as usize] + (m * p) as f64
}

/// `Σ h(t_n, t_{n+1})` over consecutive pairs of an open sequence.
pub fn action(ctx: &GenFunContext, times: &[f64]) -> Result<f64> {
    times.windows(2).map(|w| ctx.h(w[0], w[1])).sum()
}

/// Action of one period of the periodic sequence `t_{n+q} = t_n + p`.
pub fn periodic_action(ctx: &GenFunContext, times: &[f64], p: i64) -> Result<f64> {
    (0..times.len() as i64)
        .map(|n| ctx.h(lifted(times, p, n), lifted(times, p, n + 1)))
        .sum()
}

/// Stationarity defects `∂₂h(t_{n−1}, t_n) + ∂₁h(t_n, t_{n+1})`, one per `n`.
pub fn el_defects(ctx: &GenFunContext, times: &[f64], p: i64) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Err(Error::precondition("empty orbit"));
    }
    (0..times.len() as i64)
        .map(|n| {
            let (a, b, c) = (lifted(times, p, n - 1), lifted(times, p, n), lifted(times, p, n + 1));
            Ok(ctx.grad_h(a, b)?.1 + ctx.grad_h(b, c)?.0)
        })
        .collect()
}

/// `max_n |∂₂h(t_{n−1}, t_n) + ∂₁h(t_n, t_{n+1})|` for a periodic sequence.
pub fn el_residual(ctx: &GenFunContext, times: &[f64], p: i64) -> Result<f64> {
    Ok(el_defects(ctx, times, p)?.into_iter().fold(0.0, |m, d| m.max(d.abs())))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Admissible gap box for rotation number `omega`.
pub fn gap_box(omega: f64, sigma: f64) -> (f64, f64) {
    let beta = 0.5 * (omega - 1.0).min(sigma - omega - 1.0);
    (beta.max(omega - 1.0), (sigma - beta).min(omega + 1.0))
}

struct Problem<'a> {
    ctx: &'a GenFunContext,
    p: i64,
    q: usize,
    lo: f64,
    hi: f64,
}

impl Problem<'_> {
    fn t(&self, x: &[f64], n: i64) -> f64 {
        lifted(x, self.p, n)
    }

    /// Terms of the action that involve coordinate `n`, with `t_n = v`.
    fn local_cost(&self, x: &[f64], n: usize, v: f64) -> f64 {
        let h = |a: f64, b: f64| self.ctx.local(a, b - a).h();
        if self.q == 1 {
            return h(v, v + self.p as f64);
        }
        h(self.t(x, n as i64 - 1), v) + h(v, self.t(x, n as i64 + 1))
    }

    fn coordinate_interval(&self, x: &[f64], n: usize) -> (f64, f64) {
        if self.q == 1 {
            return (x[0] - 0.5, x[0] + 0.5);
        }
        let prev = self.t(x, n as i64 - 1);
        let next = self.t(x, n as i64 + 1);
        ((prev + self.lo).max(next - self.hi), (prev + self.hi).min(next - self.lo))
    }

    fn sweep(&self, x: &mut [f64]) -> f64 {
        let mut moved: f64 = 0.0;
        for n in 0..self.q {
            let (a, b) = self.coordinate_interval(x, n);
            if !(b > a) {
                continue;
            }
            let (v, fv) = brent_min(|v| self.local_cost(x, n, v), a, b, 1e-12);
            if fv <= self.local_cost(x, n, x[n]) {
                moved = moved.max((v - x[n]).abs());
                x[n] = v;
            }
        }
        moved
    }

    fn gaps_ok(&self, x: &[f64]) -> bool {
        (0..self.q as i64).all(|n| {
            let g = self.t(x, n + 1) - self.t(x, n);
            g >= self.lo && g <= self.hi && g < self.ctx.sigma
        })
    }

    fn defects(&self, x: &[f64]) -> Vec<f64> {
        (0..self.q as i64)
            .map(|n| {
                let (a, b, c) = (self.t(x, n - 1), self.t(x, n), self.t(x, n + 1));
                self.ctx.local(a, b - a).h2() + self.ctx.local(b, c - b).h1()
            })
            .collect()
    }

    /// Hessian of the periodic action, dense `q × q`.
    fn hessian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let q = self.q;
        let mut hm = vec![vec![0.0; q]; q];
        for n in 0..q {
            let (a, b) = (self.t(x, n as i64), self.t(x, n as i64 + 1));
            let l = self.ctx.local(a, b - a);
            let m = (n + 1) % q;
            // the pair (t_n, t_{n+1}) contributes to rows n and n+1
            hm[n][n] += l.h11();
            hm[n][m] += l.h12();
            hm[m][n] += l.h21();
            hm[m][m] += l.h22();
        }
        hm
    }

    fn newton(&self, x: &mut Vec<f64>) -> f64 {
        let norm = |d: &[f64]| d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut res = norm(&self.defects(x));
        for _ in 0..60 {
            if res < 1e-3 * RESIDUAL_TOL {
                break;
            }
            let g = self.defects(x);
            let Some(step) = solve_dense(self.hessian(x), g) else { break };
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(&step).map(|(v, s)| v - lambda * s).collect();
                if self.gaps_ok(&trial) {
                    let r = norm(&self.defects(&trial));
                    if r < res {
                        *x = trial;
                        res = r;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        res
    }
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (top, rest) = a.split_at_mut(row);
            for (x, p) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Rotates and shifts the orbit so that the point of smallest phase comes
/// first and lies in `[0, 1)`.
fn normalise(x: &[f64], p: i64) -> Vec<f64> {
    let q = x.len();
    let first = (0..q)
        .min_by(|&i, &j| x[i].rem_euclid(1.0).total_cmp(&x[j].rem_euclid(1.0)))
        .unwrap_or(0);
    let shift = x[first].floor();
    (0..q).map(|n| lifted(x, p, (first + n) as i64) - shift).collect()
}

struct Candidate {
    times: Vec<f64>,
    action: f64,
    residual: f64,
}

fn descend(prob: &Problem, seed: u64, start: usize) -> Option<Candidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    let omega = prob.p as f64 / prob.q as f64;
    let spread = 0.25 * (omega - prob.lo).min(prob.hi - omega);
    let t0: f64 = rng.gen();
    let mut x: Vec<f64> = (0..prob.q)
        .map(|n| t0 + n as f64 * omega + if n > 0 { rng.gen_range(-spread..spread) } else { 0.0 })
        .collect();
    for _ in 0..400 {
        if prob.sweep(&mut x) < 1e-9 {
            break;
        }
    }
    let residual = prob.newton(&mut x);
    if !residual.is_finite() || !prob.gaps_ok(&x) {
        return None;
    }
    let times = normalise(&x, prob.p);
    let action = periodic_action(prob.ctx, &times, prob.p).ok()?;
    Some(Candidate { times, action, residual })
}

/// Lowest-action `(p, q)` orbit over `starts` seeded random starts.
///
/// Starts run in parallel; the result depends only on the inputs. Ties in
/// action (relative 1e−10) go to the orbit with the smallest `t_0 mod 1`.
pub fn periodic_orbit(ctx: &GenFunContext, p: i64, q: usize, starts: usize, seed: u64) -> Result<MinimalOrbit> {
    if q == 0 || starts == 0 {
        return Err(Error::precondition("q and the number of starts must be positive"));
    }
    if gcd(p.unsigned_abs(), q as u64) != 1 {
        return Err(Error::precondition(format!("p = {p} and q = {q} must be coprime")));
    }
    let omega = p as f64 / q as f64;
    if !(omega > 1.0 && omega < ctx.sigma - 1.0) {
        return Err(Error::precondition(format!(
            "rotation number p/q = {omega} outside (1, sigma - 1) = (1, {})",
            ctx.sigma - 1.0
        )));
    }
    let (lo, hi) = gap_box(omega, ctx.sigma);
    let prob = Problem { ctx, p, q, lo, hi };
    let found: Vec<Candidate> = (0..starts)
        .into_par_iter()
        .filter_map(|i| descend(&prob, seed, i))
        .collect();
    let best_residual = found.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min);
    let mut good: Vec<&Candidate> = found.iter().filter(|c| c.residual < RESIDUAL_TOL).collect();
    if good.is_empty() {
        return Err(Error::Convergence(format!(
            "no start out of {starts} reached residual {RESIDUAL_TOL:e} for (p,q)=({p},{q}); best residual {best_residual:e}, {} starts ended inside the gap box",
            found.len()
        )));
    }
    good.sort_by(|a, b| {
        let scale = a.action.abs().max(b.action.abs()).max(1.0);
        if (a.action - b.action).abs() <= 1e-10 * scale {
            a.times[0].total_cmp(&b.times[0])
        } else {
            a.action.total_cmp(&b.action)
        }
    });
    let best = good[0];
    let ks: Vec<f64> = (0..q as i64)
        .map(|n| ctx.local(lifted(&best.times, p, n), lifted(&best.times, p, n + 1) - lifted(&best.times, p, n)).h1())
        .collect();
    let mut orbit = MinimalOrbit {
        p,
        q,
        times: best.times.clone(),
        ks,
        action: best.action,
        residual: best.residual,
        monotone: false,
        gap_box: (lo, hi),
        starts,
        converged: good.len(),
        seed,
    };
    let hull = hull_from_orbit(&orbit, omega);
    orbit.monotone = orbit.gaps().iter().all(|g| *g > 0.0) && hull.phi.windows(2).all(|w| w[1] >= w[0]);
    Ok(orbit)
}

/// Samples of the hull functions `(φ, η)` on the grid `ξ = j/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullSample {
    pub omega: f64,
    /// Rotation number `p/q` of the orbit actually used.
    pub p: i64,
    pub q: usize,
    /// Convergents `p/q` of `omega` considered, smallest denominator first.
    pub convergents: Vec<(i64, u64)>,
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub eta: Vec<f64>,
}

pub const HULL_HEADER: [&str; 3] = ["xi", "phi", "eta"];

impl HullSample {
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.xs.len()).map(|i| vec![self.xs[i], self.phi[i], self.eta[i]]).collect()
    }
}

/// `φ(j/q) = t_n + m` and `η(j/q) = K_n` where `n p + m q = j`, for
/// `j = 0 … q` (the last point checks `φ(ξ+1) = φ(ξ) + 1`).
fn hull_from_orbit(orbit: &MinimalOrbit, omega: f64) -> HullSample {
    let (p, q) = (orbit.p, orbit.q as i64);
    let p_inv = mod_inverse(p.rem_euclid(q), q);
    let mut xs = Vec::new();
    let mut phi = Vec::new();
    let mut eta = Vec::new();
    for j in 0..=q {
        let n = (j * p_inv).rem_euclid(q);
        let m = (j - n * p) / q;
        xs.push(j as f64 / q as f64);
        phi.push(orbit.times[n as usize] + m as f64);
        eta.push(orbit.ks[n as usize]);
    }
    HullSample { omega, p, q: orbit.q, convergents: vec![(p, orbit.q as u64)], xs, phi, eta }
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let quo = old_r / r;
        (old_r, r) = (r, old_r - quo * r);
        (old_s, s) = (s, old_s - quo * s);
    }
    old_s.rem_euclid(m)
}

/// Continued-fraction convergents `p/q` of `x` with `q ≤ cap`.
///
/// The expansion stops early when `x` is reproduced to 1e−12, so rational
/// inputs end with their own reduced fraction.
pub fn convergents(x: f64, cap: u64) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0u64, x.floor() as i64, 1u64);
    let mut frac = x - x.floor();
    out.push((p1, q1));
    for _ in 0..64 {
        if (p1 as f64 / q1 as f64 - x).abs() <= 1e-12 * x.abs().max(1.0) || frac < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as u64;
        let (p2, q2) = (a as i64 * p1 + p0, a * q1 + q0);
        if q2 > cap {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        out.push((p1, q1));
    }
    out
}

/// Hull samples for rotation number `omega`, from the minimal orbit of the
/// best convergent with denominator at most `denom_cap` that lies strictly
/// inside `(1, σ−1)`.
pub fn hull_samples(ctx: &GenFunContext, omega: f64, denom_cap: u64, starts: usize, seed: u64) -> Result<HullSample> {
    if !(omega > 1.0 && omega < ctx.sigma - 1.0) {
        return Err(Error::precondition(format!(
            "rotation number {omega} outside (1, sigma - 1) = (1, {})",
            ctx.sigma - 1.0
        )));
    }
    if denom_cap == 0 {
        return Err(Error::precondition("denominator cap must be positive"));
    }
    let conv: Vec<(i64, u64)> = convergents(omega, denom_cap)
        .into_iter()
        .filter(|&(p, q)| {
            let w = p as f64 / q as f64;
            w > 1.0 && w < ctx.sigma - 1.0
        })
        .collect();
    let &(p, q) = conv.last().ok_or_else(|| {
        Error::precondition(format!("no convergent of {omega} with denominator <= {denom_cap} inside the window"))
    })?;
    let orbit = periodic_orbit(ctx, p, q as usize, starts, seed)?;
    let mut hull = hull_from_orbit(&orbit, omega);
    hull.convergents = conv;
    Ok(hull)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radius::RadiusProfile;

    fn static_ctx() -> GenFunContext {
        GenFunContext::with_sigma(RadiusProfile::constant(1.0).unwrap(), 0.0, 0.9, 10.0).unwrap()
    }

    #[test]
    fn static_action_values() {
        let ctx = static_ctx();
        assert!((action(&ctx, &[0.0, 1.0, 2.0]).unwrap() - 4.0).abs() < 1e-14);
        let a = action(&ctx, &[0.3, 1.1, 2.6]).unwrap();
        let b = action(&ctx, &[0.8, 1.6, 3.1]).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(action(&ctx, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn static_equal_spacing_is_stationary() {
        let ctx = static_ctx();
        assert!(el_residual(&ctx, &[0.2, 1.7], 3).unwrap() < 1e-12);
        assert!(el_residual(&ctx, &[0.2, 1.8], 3).unwrap() > 1e-3);
    }

    #[test]
    fn static_three_two_orbit() {
        let ctx = static_ctx();
        let orb = periodic_orbit(&ctx, 3, 2, 4, 7).unwrap();
        assert!(orb.residual < RESIDUAL_TOL);
        for g in orb.gaps() {
            assert!((g - 1.5).abs() < 1e-8, "{g}");
        }
        for k in &orb.ks {
            assert!((k - 8.0 / 9.0).abs() < 1e-8);
        }
        assert!(orb.monotone);
        assert!(orb.times[0] >= 0.0 && orb.times[0] < 1.0);
    }

    #[test]
    fn rejects_bad_rotation_numbers() {
        let ctx = static_ctx();
        assert!(periodic_orbit(&ctx, 4, 2, 2, 0).is_err());
        assert!(periodic_orbit(&ctx, 1, 2, 2, 0).is_err());
        assert!(periodic_orbit(&ctx, 19, 2, 2, 0).is_err());
    }

    #[test]
    fn convergents_of_golden_ratio() {
        let phi = 0.5 * (1.0 + 5f64.sqrt());
        let c = convergents(phi, 13);
        assert_eq!(c, vec![(1, 1), (2, 1), (3, 2), (5, 3), (8, 5), (13, 8), (21, 13)]);
        assert_eq!(convergents(1.5, 100), vec![(1, 1), (3, 2)]);
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(mod_inverse(3, 7), 5);
        assert_eq!(mod_inverse(1, 2), 1);
    }

    #[test]
    fn dense_solver() {
        let x = solve_dense(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }
}
