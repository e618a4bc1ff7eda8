use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use bbilliard::aubry::{self, HULL_HEADER, ORBIT_HEADER};
use bbilliard::bmap;
use bbilliard::chaoscert::{self, CertifyOptions, A_GRID_HEADER};
use bbilliard::export::write_csv;
use bbilliard::flight::flight_coeffs;
use bbilliard::radius;
use bbilliard::simulate::{self, RunManifest, BOUNCE_HEADER, TRAJECTORY_HEADER};
use bbilliard::{CylinderState, GenFunContext};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'a str,
    config: &'a Value,
    result: T,
}

fn emit<T: Serialize>(out: &OutArgs, config: &Value, result: T) -> Result<()> {
    let env = Envelope { version: bbilliard::VERSION, config, result };
    let text = serde_json::to_string_pretty(&env)?;
    match &out.out {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn csv(path: &Path, config: &Value, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(BufWriter::new(file), config, header, rows).with_context(|| format!("writing {}", path.display()))
}

fn context(sys: &SystemArgs) -> Result<GenFunContext> {
    Ok(GenFunContext::new(sys.profile.profile.clone(), sys.c, sys.profile.eps)?)
}

fn grid_options(g: &GridArgs) -> CertifyOptions {
    CertifyOptions { omega_points: g.omega_points, k_samples: g.k_samples, t_points: g.t_points }
}

pub fn run(cmd: Command) -> Result<()> {
    let config = serde_json::to_value(&cmd)?;
    match cmd {
        Command::Classify(a) => {
            let v = radius::classify_with_grid(&a.profile.profile, a.profile.eps, a.grid)?;
            emit(&a.out, &config, v)
        }
        Command::FindMember(a) => {
            let m = radius::find_member(a.k, a.delta, a.eps, a.mean_hint)?;
            emit(&a.out, &config, m)
        }
        Command::Flight(a) => {
            let seg = flight_coeffs(a.t0, a.t1, a.c, &a.profile)?;
            if let Some(path) = &a.csv {
                csv(path, &config, &["t", "r", "theta", "x", "y"], seg.sample(a.dt).into_iter().map(|r| r.to_vec()))?;
            }
            let interior = seg.interior_ok(&a.profile, 256);
            emit(&a.out, &config, json!({ "segment": seg, "dtheta": seg.dtheta, "interior": interior }))
        }
        Command::Map(a) => {
            let ctx = context(&a.system)?;
            let s = CylinderState::new(a.t, a.k);
            if a.backward {
                let img = bmap::backward(&ctx, s)?;
                emit(&a.out, &config, json!({ "image": img }))
            } else {
                let (img, j) = bmap::forward_with_jacobian(&ctx, s)?;
                emit(&a.out, &config, json!({ "image": img, "jacobian": j, "det": j.det() }))
            }
        }
        Command::Simulate(a) => {
            let ctx = context(&a.system)?;
            let s0 = CylinderState::new(a.t, a.k);
            let r = simulate::run(&ctx, s0, a.n)?;
            let checks = simulate::check_run(&ctx, &r, a.samples);
            if let Some(path) = &a.bounces {
                csv(path, &config, &BOUNCE_HEADER, simulate::bounce_rows(&r.records))?;
            }
            if let Some(path) = &a.trajectory {
                let pts = simulate::trajectory_samples(&r.records, a.dt)?;
                csv(path, &config, &TRAJECTORY_HEADER, pts.into_iter().map(|p| p.to_vec()))?;
            }
            emit(&a.out, &config, RunManifest::new(&ctx, s0, a.n, None, &r, checks))
        }
        Command::Orbit(a) => {
            let ctx = context(&a.system)?;
            let o = aubry::periodic_orbit(&ctx, a.p, a.q, a.starts, a.seed)?;
            if let Some(path) = &a.csv {
                csv(path, &config, &ORBIT_HEADER, o.rows())?;
            }
            emit(&a.out, &config, o)
        }
        Command::Hull(a) => {
            let ctx = context(&a.system)?;
            let h = aubry::hull_samples(&ctx, a.omega, a.denom_cap, a.starts, a.seed)?;
            if let Some(path) = &a.csv {
                csv(path, &config, &HULL_HEADER, h.rows())?;
            }
            emit(&a.out, &config, h)
        }
        Command::Certify(a) => {
            let p = &a.system.profile;
            let cert = chaoscert::certify_with(&p.profile, p.eps, a.system.c, grid_options(&a.grid));
            if let Some(path) = &a.a_grid {
                csv(path, &config, &A_GRID_HEADER, cert.a_grid_rows())?;
            }
            emit(&a.out, &config, cert)
        }
        Command::C0(a) => {
            let r = chaoscert::c0_search(&a.profile.profile, a.profile.eps, a.iterations, grid_options(&a.grid))?;
            emit(&a.out, &config, r)
        }
        Command::Lyapunov(a) => {
            let ctx = context(&a.system)?;
            let (lo, hi) = match (a.k_lo, a.k_hi) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => {
                    let p = &a.system.profile;
                    let cert = chaoscert::certify(&p.profile, p.eps, a.system.c);
                    match cert.k_range {
                        Some(band) if cert.certified() => band,
                        _ => bail!(bbilliard::Error::Precondition(
                            "profile is not certified; pass --k-lo and --k-hi".into()
                        )),
                    }
                }
            };
            let seeds = chaoscert::band_seeds(lo, hi, a.count, a.seed);
            let table: Vec<Value> = chaoscert::lyapunov_table(&ctx, &seeds, a.n)
                .into_iter()
                .map(|r| match r {
                    Ok(est) => serde_json::to_value(est).expect("estimate serialises"),
                    Err(e) => json!({ "error": e.to_string() }),
                })
                .collect();
            emit(&a.out, &config, json!({ "k_band": [lo, hi], "estimates": table }))
        }
        Command::Portrait(a) => {
            let ctx = context(&a.system)?;
            if a.nt == 0 || a.nk == 0 || !(a.k_hi >= a.k_lo) {
                bail!(bbilliard::Error::Precondition("need nt, nk > 0 and k_lo <= k_hi".into()));
            }
            let starts: Vec<CylinderState> = (0..a.nk)
                .flat_map(|i| {
                    let k = if a.nk == 1 { a.k_lo } else { a.k_lo + (a.k_hi - a.k_lo) * i as f64 / (a.nk - 1) as f64 };
                    (0..a.nt).map(move |j| CylinderState::new(j as f64 / a.nt as f64, k))
                })
                .collect();
            let clouds: Vec<Vec<Vec<f64>>> = starts
                .par_iter()
                .enumerate()
                .map(|(orbit, &s0)| {
                    let mut s = s0;
                    let mut rows = vec![vec![orbit as f64, 0.0, s.t, s.k]];
                    for n in 1..=a.n {
                        match bmap::forward(&ctx, s) {
                            Ok(img) => {
                                s = CylinderState::new(img.state.t.rem_euclid(1.0), img.state.k);
                                rows.push(vec![orbit as f64, n as f64, s.t, s.k]);
                            }
                            Err(_) => break,
                        }
                    }
                    rows
                })
                .collect();
            csv(&a.csv, &config, &["orbit", "n", "t", "K"], clouds.into_iter().flatten())
        }
    }
}
