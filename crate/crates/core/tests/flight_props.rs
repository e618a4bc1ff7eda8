mod common;

use bbilliard::flight::{angular_advance, flight_coeffs, flight_coeffs_tau, validate_window};
use bbilliard::radius::{bounds, RadiusProfile};
use common::*;
use rand::Rng;
use std::f64::consts::PI;

#[test]
fn quadrature_oracle_is_accurate() {
    let v = integrate(|x| x.sin(), 0.0, PI, 1e-14);
    assert!((v - 2.0).abs() < 1e-13);
    let v = integrate(|x| 1.0 / (1.0 + x * x), -10.0, 10.0, 1e-14);
    assert!((v - 2.0 * 10f64.atan()).abs() < 1e-12);
}

#[test]
fn endpoints_and_first_integral_on_random_windows() {
    let ctx = breathing_ctx();
    let p = &ctx.profile;
    let mut g = rng(11);
    for _ in 0..1000 {
        let (t0, tau) = random_pair(&ctx, &mut g, 0.0);
        assert!(validate_window(t0, t0 + tau, ctx.c, &ctx.bounds).passes());
        let seg = flight_coeffs_tau(t0, tau, ctx.c, p).unwrap();
        assert!(seg.a > 0.0);
        assert!((seg.state_local(0.0).r - p.r(t0)).abs() < 1e-10);
        assert!((seg.state_local(tau).r - p.r(t0 + tau)).abs() < 1e-10);
        for j in 1..=100 {
            let s = tau * j as f64 / 101.0;
            let st = seg.state_local(s);
            let e = st.rdot * st.rdot + ctx.c * ctx.c / (st.r * st.r);
            assert!((e - seg.a).abs() < 1e-10 * seg.a);
            assert!(st.r < p.r(t0 + s));
            assert!(p.ddr2(t0 + s) < 2.0 * seg.a, "R^2 - r^2 must be concave");
        }
    }
}

#[test]
fn velocity_bounds_and_bounce_compatibility() {
    let ctx = breathing_ctx();
    let p = &ctx.profile;
    let mut g = rng(12);
    for _ in 0..500 {
        let (t0, tau) = random_pair(&ctx, &mut g, 0.0);
        let seg = flight_coeffs_tau(t0, tau, ctx.c, p).unwrap();
        let e0 = p.eval(t0);
        let e1 = p.eval(t0 + tau);
        assert!(seg.rdot_start() < 0f64.min(e0.dr));
        assert!(seg.rdot_end() > 0f64.max(2.0 * e1.dr));
        let reflected = -seg.rdot_end() + 2.0 * e1.dr;
        assert!(reflected < 0f64.min(e1.dr));
    }
}

#[test]
fn angular_advance_matches_quadrature() {
    let p = RadiusProfile::constant(1.0).unwrap();
    let seg = flight_coeffs(0.0, 1.0, 0.1, &p).unwrap();
    let q = integrate(|s| 0.1 / seg.state_local(s).r.powi(2), 0.0, 1.0, 1e-14);
    assert!((seg.dtheta - q).abs() < 1e-9);
    assert!((seg.dtheta - (PI - 0.100167)).abs() < 1e-6);

    let ctx = breathing_ctx();
    let mut g = rng(13);
    for _ in 0..200 {
        let (t0, tau) = random_pair(&ctx, &mut g, 0.0);
        let seg = flight_coeffs_tau(t0, tau, ctx.c, &ctx.profile).unwrap();
        let q = integrate(|s| ctx.c / seg.state_local(s).r.powi(2), 0.0, tau, 1e-13);
        assert!((seg.dtheta - q).abs() < 1e-9, "{} vs {q}", seg.dtheta);
        assert!(seg.dtheta > PI / 2.0 && seg.dtheta <= PI);
        let end = seg.state_local(tau).theta;
        assert!((end - seg.theta0 - seg.dtheta).abs() < 1e-12);
        assert_eq!(angular_advance(t0, t0 + tau, ctx.c, &ctx.profile).unwrap(), seg.dtheta);
    }
}

#[test]
fn segments_are_straight_chords() {
    let ctx = breathing_ctx();
    let r_max = ctx.bounds.r_max;
    let mut g = rng(14);
    for _ in 0..200 {
        let (t0, tau) = random_pair(&ctx, &mut g, 0.0);
        let seg = flight_coeffs_tau(t0, tau, ctx.c, &ctx.profile).unwrap().with_theta0(g.gen_range(0.0..6.0));
        let (x0, y0) = seg.cartesian_local(0.0);
        let (x1, y1) = seg.cartesian_local(tau);
        let len = (x1 - x0).hypot(y1 - y0);
        assert!((len - seg.chord_length()).abs() < 1e-9 * r_max);
        for j in 1..50 {
            let (x, y) = seg.cartesian_local(tau * j as f64 / 50.0);
            let dev = ((x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)).abs() / len;
            assert!(dev < 1e-9 * r_max, "deviation {dev}");
        }
    }
}

#[test]
fn window_conditions_on_the_large_member() {
    let p = member_profile();
    let b = bounds(&p, 0.5, 4096).unwrap();
    assert!((b.sigma - 130.4).abs() < 1.0);
    assert!(!validate_window(0.0, 200.0, 1.0, &b).passes());
    let seg = flight_coeffs(0.25, 109.75, 1.0, &p).unwrap();
    assert!(seg.interior_ok(&p, 128));
    assert!(seg.state(0.0).is_err() && seg.state(109.8).is_err());
}
