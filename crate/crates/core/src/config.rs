use serde::{Deserialize, Serialize};

/// Every numerical threshold used by the library, threaded explicitly through
/// each operation so that a result can always be reproduced from the record
/// embedded in its output document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericConfig {
    /// Roots closer than this are identified (gcd, cancellation, LCM).
    pub tol_root: f64,
    /// Root residual bound, relative to the coefficient scale.
    pub tol_eval: f64,
    pub tol_bezout: f64,
    pub tol_div: f64,
    /// Plants with a pole closer than this to the unit circle are rejected.
    pub dist_circle_min: f64,
    /// Rank threshold for the coprimeness test.
    pub tol_rank: f64,
    pub tol_specfac: f64,
    pub tol_specfac_mat: f64,
    pub tol_normalization: f64,
    pub tol_graph: f64,
    pub tol_bezout_mat: f64,
    /// Modulus floor below which a circle symbol is declared not invertible.
    pub tol_invertible: f64,
    pub tol_norm_rel: f64,
    /// Base circle grid (power of two, at least 64).
    pub grid_size: usize,
    /// Grid used for residual validation of factorizations.
    pub validation_grid: usize,
    /// Grid used for the positivity precheck of spectral densities.
    pub positivity_grid: usize,
    /// Total sample budget of adaptive winding refinement.
    pub winding_budget: usize,
    pub bauer_min_section: usize,
    pub bauer_max_section: usize,
    pub max_dim: usize,
    pub max_entry_degree: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            tol_root: 1e-7,
            tol_eval: 1e-8,
            tol_bezout: 1e-8,
            tol_div: 1e-8,
            dist_circle_min: 1e-6,
            tol_rank: 1e-7,
            tol_specfac: 1e-9,
            tol_specfac_mat: 1e-7,
            tol_normalization: 1e-8,
            tol_graph: 1e-7,
            tol_bezout_mat: 1e-6,
            tol_invertible: 1e-6,
            tol_norm_rel: 1e-9,
            grid_size: 4096,
            validation_grid: 512,
            positivity_grid: 1024,
            winding_budget: 1 << 20,
            bauer_min_section: 64,
            bauer_max_section: 4096,
            max_dim: 8,
            max_entry_degree: 12,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.grid_size < 64 || !self.grid_size.is_power_of_two() {
            return Err(crate::Error::Domain(format!("grid size {} must be a power of two >= 64", self.grid_size)));
        }
        if !(self.tol_invertible > 0.0) {
            return Err(crate::Error::Domain("tol_invertible must be positive".into()));
        }
        Ok(())
    }
}
