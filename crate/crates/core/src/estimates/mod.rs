//! Probes of the linear and orthonormal estimates for e^{−itΔ} on the torus.

pub mod duality;
pub mod extension;
pub mod kernel;
pub mod linear;
pub mod ons;

pub use crate::ensemble::{make_ons, EnsembleKind, OrthonormalEnsemble};
pub use duality::{duality_schatten_check, DualityCheck, SpaceTimePotential};
pub use extension::{extension_apply, restriction_apply};
pub use kernel::{kernel_decay_scan, kernel_probe, kernel_value, KernelProbe};
pub use linear::{fixed_time_decay_ratio, localized_strichartz_ratio, strichartz_ratio, LocalizedRatio};
pub use ons::{ons_density, ons_strichartz_ratio, ons_strichartz_ratio_unchecked};
