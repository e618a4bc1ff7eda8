use std::path::PathBuf;

use bbilliard::RadiusProfile;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "bbilliard", version, about = "Breathing circle billiard toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Classify a radius profile.
    Classify(ClassifyArgs),
    /// Search the single/two-harmonic family for a chaotic member.
    FindMember(FindMemberArgs),
    /// Exact free flight between two bounce times.
    Flight(FlightArgs),
    /// One step of the billiard map.
    Map(MapArgs),
    /// Iterate the map and record bounces.
    Simulate(SimulateArgs),
    /// Minimal periodic orbit of type (p, q).
    Orbit(OrbitArgs),
    /// Hull functions from the minimal orbit of a convergent.
    Hull(HullArgs),
    /// Invariant-curve destruction certificate.
    Certify(CertifyArgs),
    /// Largest certified angular momentum.
    C0(C0Args),
    /// Lyapunov exponents for a set of seeds.
    Lyapunov(LyapunovArgs),
    /// Phase portrait point cloud (t mod 1, K).
    Portrait(PortraitArgs),
}

fn parse_profile(s: &str) -> Result<RadiusProfile, String> {
    RadiusProfile::from_json(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    /// Profile as JSON, e.g. '{"mean":9000,"harmonics":[[1,0.05]]}'.
    #[arg(long, value_parser = parse_profile)]
    pub profile: RadiusProfile,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SystemArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    /// Angular momentum.
    #[arg(long)]
    pub c: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutArgs {
    /// JSON output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = bbilliard::radius::DEFAULT_GRID)]
    pub grid: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FindMemberArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Mean radius at which the scan starts.
    #[arg(long)]
    pub mean_hint: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FlightArgs {
    #[arg(long, value_parser = parse_profile)]
    pub profile: RadiusProfile,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub t0: f64,
    #[arg(long)]
    pub t1: f64,
    /// Sampling step for the CSV path.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// CSV of (t, r, theta, x, y) along the flight.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub k: f64,
    /// Apply the inverse map instead.
    #[arg(long)]
    pub backward: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub k: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Interior samples per flight for the physical checks.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    /// CSV of bounces (n, t, K, rdot_plus, theta).
    #[arg(long)]
    #[serde(skip)]
    pub bounces: Option<PathBuf>,
    /// CSV of the Cartesian trajectory (t, x, y).
    #[arg(long)]
    #[serde(skip)]
    pub trajectory: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OrbitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub p: i64,
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    #[arg(long)]
    pub seed: u64,
    /// CSV of (n, t, K).
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HullArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub omega: f64,
    #[arg(long, default_value_t = 64)]
    pub denom_cap: u64,
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    #[arg(long)]
    pub seed: u64,
    /// CSV of (xi, phi, eta).
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 33)]
    pub omega_points: usize,
    #[arg(long, default_value_t = 257)]
    pub k_samples: usize,
    #[arg(long, default_value_t = 64)]
    pub t_points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// CSV of the (K, a_c) samples.
    #[arg(long)]
    #[serde(skip)]
    pub a_grid: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct C0Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 20)]
    pub iterations: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LyapunovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Number of random initial states.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    /// Band for the initial states; the certified band when omitted.
    #[arg(long, requires = "k_hi")]
    pub k_lo: Option<f64>,
    #[arg(long, requires = "k_lo")]
    pub k_hi: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PortraitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub k_lo: f64,
    #[arg(long)]
    pub k_hi: f64,
    /// Initial phases per K level.
    #[arg(long, default_value_t = 8)]
    pub nt: usize,
    /// K levels.
    #[arg(long, default_value_t = 8)]
    pub nk: usize,
    /// Iterations per initial state.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// CSV of (orbit, n, t mod 1, K).
    #[arg(long)]
    #[serde(skip)]
    pub csv: PathBuf,
}
