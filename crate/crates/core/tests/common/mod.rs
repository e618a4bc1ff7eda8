#![allow(dead_code)]

use bbilliard::{GenFunContext, RadiusProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two-harmonic profile with σ ≈ 2.6, small enough for O(1) magnitudes.
pub fn breathing_profile() -> RadiusProfile {
    RadiusProfile::new(5.0, vec![(1, 0.03), (2, 0.01)]).unwrap()
}

pub fn breathing_ctx() -> GenFunContext {
    GenFunContext::new(breathing_profile(), 0.3, 0.5).unwrap()
}

/// Single-harmonic member of the chaotic class.
pub fn member_profile() -> RadiusProfile {
    RadiusProfile::single_harmonic(9000.0, 0.05).unwrap()
}

pub fn member_ctx(c: f64) -> GenFunContext {
    GenFunContext::new(member_profile(), c, 0.5).unwrap()
}

pub fn static_ctx(c: f64) -> GenFunContext {
    GenFunContext::with_sigma(RadiusProfile::constant(1.0).unwrap(), c, 0.9, 10.0).unwrap()
}

/// Random `(t0, τ)` with `τ ∈ [β, σ − β]`, `β = frac·σ`.
pub fn random_pair(ctx: &GenFunContext, rng: &mut ChaCha8Rng, frac: f64) -> (f64, f64) {
    let beta = frac * ctx.sigma;
    (rng.gen_range(-3.0..3.0), rng.gen_range(beta..ctx.sigma - beta))
}

/// Random state in the map domain, built from a random flight time.
pub fn random_state(ctx: &GenFunContext, rng: &mut ChaCha8Rng) -> bbilliard::CylinderState {
    loop {
        let t: f64 = rng.gen();
        let tau = rng.gen_range(0.05 * ctx.sigma..0.95 * ctx.sigma);
        let k = ctx.grad_tau(t, tau).unwrap().0;
        if k > 1.01 * ctx.sigma_star {
            return bbilliard::CylinderState::new(t, k);
        }
    }
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WK[7] * fc;
    let mut g = GK_WG[3] * fc;
    for i in 0..7 {
        let x = h * GK_X[i];
        let s = f(c - x) + f(c + x);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, whole: (f64, f64), depth: u32) -> f64 {
        if whole.1 <= tol || depth > 40 {
            return whole.0;
        }
        let m = 0.5 * (a + b);
        let l = gk15(f, a, m);
        let r = gk15(f, m, b);
        rec(f, a, m, 0.5 * tol, l, depth + 1) + rec(f, m, b, 0.5 * tol, r, depth + 1)
    }
    let whole = gk15(&f, a, b);
    rec(&f, a, b, tol, whole, 0)
}

/// Central difference with step `h`.
pub fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn rel_err(approx: f64, exact: f64, floor: f64) -> f64 {
    (approx - exact).abs() / exact.abs().max(floor)
}
