//! Small scalar solvers shared by the modules: bracketed roots, golden-section
//! maximisation and Brent minimisation on an interval.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Stops when the bracket is shorter than `tol` (absolute, in `x`).
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 200 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        iter += 1;
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the midpoint can be marginally worse than the best interior probe
    [(x, fx), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Maximum of a 1-periodic function over one period.
///
/// Samples `grid_n` points, then refines every sampled local maximum whose
/// value is within 1% (relative) of the best sample by golden-section search.
pub fn sup_periodic<F: Fn(f64) -> f64>(f: F, grid_n: usize, tol: f64) -> (f64, f64) {
    let n = grid_n.max(8);
    let h = 1.0 / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
    let best_sample = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cut = best_sample - 0.01 * best_sample.abs().max(f64::MIN_POSITIVE);
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let prev = vals[(i + n - 1) % n];
        let next = vals[(i + 1) % n];
        if vals[i] >= prev && vals[i] >= next && vals[i] >= cut {
            let centre = i as f64 * h;
            let (x, fx) = golden_max(&f, centre - h, centre + h, tol);
            if fx > best.1 {
                best = (x.rem_euclid(1.0), fx);
            }
            if vals[i] > best.1 {
                best = (centre, vals[i]);
            }
        }
    }
    if !best.1.is_finite() {
        // flat function: every sample is a plateau maximum
        best = (0.0, best_sample);
    }
    best
}

/// Bisection for a sign change of `f` on `[a, b]`; requires `f(a)·f(b) ≤ 0`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Root of a strictly decreasing function on `(lo, hi)` with `f(lo) > 0 > f(hi)`.
///
/// Newton steps are taken while they stay inside the current bracket,
/// otherwise bisection. Iterates until the bracket or the step reaches
/// floating-point resolution, so the result is as sharp as `f` allows.
pub fn decreasing_root<F>(fdf: F, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    let mut stalled = 0;
    for _ in 0..400 {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return x;
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= 2.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= 2.0 * f64::EPSILON * x.abs() {
            stalled += 1;
            if stalled >= 2 {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    x
}

/// Brent's method for the minimum of `f` on `[a, b]`.
pub fn brent_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let mut x = a + CGOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs().max(1.0) * 1e-3 + tol;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}
