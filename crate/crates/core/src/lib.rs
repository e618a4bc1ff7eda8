//! Breathing circle billiards: a particle moving freely inside a disk whose
//! radius `R(t)` oscillates periodically in time and reflecting elastically
//! at the moving wall.
//!
//! The dynamics reduce to an exact symplectic twist map of the cylinder
//! generated by a closed-form action `h(t0, t1)`. The crate provides:
//!
//! - [`radius`]: profiles, their norms, classification and family search;
//! - [`flight`]: the exact flight between two bounces;
//! - [`genfun`]: the generating function and its derivatives;
//! - [`bmap`]: the bounce map, its inverse and tangent map;
//! - [`simulate`]: bouncing trajectories with physical checks;
//! - [`aubry`]: minimal periodic orbits and hull samples;
//! - [`chaoscert`]: the certificate that invariant curves are destroyed,
//!   and Lyapunov estimates.

pub mod aubry;
pub mod bmap;
pub mod chaoscert;
pub mod error;
pub mod export;
pub mod flight;
pub mod genfun;
mod numerics;
pub mod radius;
pub mod simulate;

pub use bmap::{CylinderState, MapImage, MapJacobian};
pub use error::{Error, Result};
pub use flight::FlightSegment;
pub use genfun::GenFunContext;
pub use radius::{ClassVerdict, ProfileBounds, ProfileClass, RadiusProfile};

/// Version string embedded in exported manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
