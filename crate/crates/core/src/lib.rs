//! Scale-invariant singular diffusions driven by the generator
//! ½ d/dx |x|^{-ν} d/dx: special functions, plane waves, the explicit heat
//! kernel, samplers for the limit diffusion, regularized SDEs and
//! nearest-neighbour walks, and the statistics used to compare them.

pub mod eigen;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod martingale;
pub mod processes;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod stats;
pub mod transform;

pub use eigen::{e_nu, e_q, f_q, ComplexValue, NuParam};
pub use error::{Error, Result};
