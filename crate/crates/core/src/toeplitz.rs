//! Finite Toeplitz sections and index diagnostics for symbols on the circle.
//!
//! The index of a (matrix) symbol is always read off the winding number of its
//! determinant. Finite sections only serve as plausibility witnesses, since
//! their kernels do not converge to the kernel of the operator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{fourier_coeffs, sigma_max, sigma_min, winding_number};
use crate::config::NumericConfig;
use crate::polymat::CMatrix;
use crate::Result;

/// Section sizes recorded in the `sigma_min` trace.
pub const TRACE_SIZES: [usize; 5] = [16, 32, 64, 128, 256];

#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSection {
    /// `c_{-q} ..= c_q`.
    pub coeffs: Vec<Complex64>,
    pub n: usize,
    pub matrix: CMatrix,
}

fn coeff_at(coeffs: &[Complex64], k: i64) -> Complex64 {
    let q = (coeffs.len() / 2) as i64;
    if k.abs() > q {
        Complex64::new(0.0, 0.0)
    } else {
        coeffs[(k + q) as usize]
    }
}

/// `n x n` section with entry `(j, k)` equal to `c_{j-k}`.
pub fn toeplitz_section(coeffs: &[Complex64], n: usize) -> ToeplitzSection {
    let matrix = CMatrix::from_fn(n, n, |j, k| coeff_at(coeffs, j as i64 - k as i64));
    ToeplitzSection { coeffs: coeffs.to_vec(), n, matrix }
}

/// Coefficients of the product of two trigonometric polynomials.
pub fn symbol_product(f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let (qf, qg) = (f.len() / 2, g.len() / 2);
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * (qf + qg) + 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Coefficients of `conj(f)` on the circle.
pub fn symbol_conj(f: &[Complex64]) -> Vec<Complex64> {
    f.iter().rev().map(|c| c.conj()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub index: i64,
    pub route: String,
    pub min_modulus: f64,
    pub sigma_min_trace: Vec<(usize, f64)>,
}

/// Index of the Toeplitz operator with the (matrix) symbol `f`: minus the
/// winding number of `det f`. The trace holds `sigma_min` of finite sections
/// of the determinant symbol.
pub fn index_estimate<F>(f: F, cfg: &NumericConfig) -> Result<IndexEstimate>
where
    F: Fn(f64) -> CMatrix,
{
    let det = |t: f64| f(t).determinant();
    let w = winding_number(det, cfg)?;
    let nmax = *TRACE_SIZES.last().unwrap();
    let coeffs = fourier_coeffs(det, nmax - 1, cfg);
    let sigma_min_trace = TRACE_SIZES.iter().map(|&n| (n, sigma_min(&toeplitz_section(&coeffs, n).matrix))).collect();
    Ok(IndexEstimate { index: -w.winding, route: "det-winding".into(), min_modulus: w.min_modulus, sigma_min_trace })
}

/// Index of a scalar symbol without the section trace.
pub fn scalar_index<F>(f: F, cfg: &NumericConfig) -> Result<i64>
where
    F: Fn(f64) -> Complex64,
{
    Ok(-winding_number(f, cfg)?.winding)
}

/// `|T_n(fg) - T_n(f) T_n(g)|` for trigonometric polynomials `f`, `g`.
pub fn semicommutator_norm(f: &[Complex64], g: &[Complex64], n: usize) -> f64 {
    let tfg = toeplitz_section(&symbol_product(f, g), n).matrix;
    let tf = toeplitz_section(f, n).matrix;
    let tg = toeplitz_section(g, n).matrix;
    sigma_max(&(tfg - tf * tg))
}
