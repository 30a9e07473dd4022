//! Gevrey KAM reducibility for quasi-periodic SL(2,R) cocycles, with spectral,
//! Cantor-set and duality tooling.

pub mod error;
pub mod gevrey_fourier;
pub mod kam_engine;
pub mod aubry_duality;
pub mod cantor_toolkit;
pub mod cli_experiments;
pub mod cocycle_dynamics;
pub mod lie_algebra;
pub mod spectral_analysis;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
