//! Discrete fractal uncertainty principles for Cantor sets in `ℤ_N²`.
//!
//! The crate is organised by subject:
//!
//! * [`cantor`]: alphabets, iterates `𝒳_k`, grid neighbourhoods.
//! * [`dft`]: unitary transforms, FUP norms, support feasibility, sharpness
//!   witnesses.
//! * [`lines`]: lines in `ℤ_N²` and on the torus, and the decision of which
//!   directions fit inside a Cantor set.
//! * [`polymethod`]: bivariate trigonometric polynomials on roots of unity.
//! * [`baker`]: quantum open baker's maps and their spectra.
//!
//! Dense kernels use rayon when the `parallel` feature is on.

pub mod baker;
pub mod cantor;
pub mod cyclotomic;
pub mod dft;
pub mod error;
pub mod linalg;
pub mod lines;
pub mod par;
pub mod polymethod;

pub use error::{FupError, Result};

use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Guardrails on problem size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceCaps {
    /// Largest grid `N^d` (number of grid points) a computation may touch.
    pub grid_points: usize,
    /// Largest side of a dense operator matrix.
    pub dense_side: usize,
}

impl Default for ResourceCaps {
    fn default() -> Self {
        Self { grid_points: 262_144, dense_side: 4096 }
    }
}

impl ResourceCaps {
    pub fn check_grid(&self, requested: usize) -> Result<()> {
        if requested > self.grid_points {
            return Err(FupError::ResourceCap { what: "grid points", requested, cap: self.grid_points });
        }
        Ok(())
    }

    pub fn check_dense(&self, requested: usize) -> Result<()> {
        if requested > self.dense_side {
            return Err(FupError::ResourceCap { what: "dense matrix side", requested, cap: self.dense_side });
        }
        Ok(())
    }
}
