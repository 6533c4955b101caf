//! The ν-metric between two plants of equal dimensions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{linf_norm, sigma_max, winding_number};
use crate::config::NumericConfig;
use crate::factor::{graph_symbols, GraphSymbols};
use crate::tfm::TransferMatrix;
use crate::{Error, Result};

/// Values of the distance that exceed one by more than this are treated as a
/// factorization defect.
const NORM_OVERSHOOT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingCondition {
    pub invertible: bool,
    pub winding: Option<i64>,
    pub min_modulus: f64,
    pub condition_met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuMetricDiagnostics {
    pub grid_size: usize,
    pub validation_grid: usize,
    pub normalization_residuals: [f64; 2],
    pub annihilation_residuals: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuMetricOutcome {
    pub value: f64,
    pub condition_met: bool,
    pub winding: Option<i64>,
    pub min_modulus: f64,
    pub theta_star: Option<f64>,
    pub diagnostics: NuMetricDiagnostics,
}

fn check_dims(g1: &GraphSymbols, g2: &GraphSymbols) -> Result<()> {
    if g1.p() != g2.p() || g1.m() != g2.m() {
        return Err(Error::DimensionMismatch(format!("plants are {}x{} and {}x{}", g1.p(), g1.m(), g2.p(), g2.m())));
    }
    Ok(())
}

/// `det(G1* G2)` at `e^{i theta}`.
pub fn cross_determinant(g1: &GraphSymbols, g2: &GraphSymbols, theta: f64) -> Complex64 {
    (g1.g.eval_theta(theta).adjoint() * g2.g.eval_theta(theta)).determinant()
}

/// Invertibility and winding number of `det(G1* G2)` on the circle.
pub fn winding_condition(g1: &GraphSymbols, g2: &GraphSymbols, cfg: &NumericConfig) -> Result<WindingCondition> {
    check_dims(g1, g2)?;
    match winding_number(|t| cross_determinant(g1, g2, t), cfg) {
        Ok(w) => {
            Ok(WindingCondition { invertible: true, winding: Some(w.winding), min_modulus: w.min_modulus, condition_met: w.winding == 0 })
        }
        Err(Error::NotInvertible { min_modulus, .. }) => {
            Ok(WindingCondition { invertible: false, winding: None, min_modulus, condition_met: false })
        }
        Err(e) => Err(e),
    }
}

/// The ν-metric from precomputed graph symbols.
pub fn nu_metric_symbols(g1: &GraphSymbols, g2: &GraphSymbols, cfg: &NumericConfig) -> Result<NuMetricOutcome> {
    let cond = winding_condition(g1, g2, cfg)?;
    let diagnostics = NuMetricDiagnostics {
        grid_size: cfg.grid_size,
        validation_grid: cfg.validation_grid,
        normalization_residuals: [g1.right.residual_norm, g2.right.residual_norm],
        annihilation_residuals: [g1.annihilation, g2.annihilation],
    };
    if !cond.condition_met {
        return Ok(NuMetricOutcome {
            value: 1.0,
            condition_met: false,
            winding: cond.winding,
            min_modulus: cond.min_modulus,
            theta_star: None,
            diagnostics,
        });
    }
    let norm = linf_norm(|t| Ok(g2.gt.eval_theta(t) * g1.g.eval_theta(t)), cfg)?;
    if norm.value > 1.0 + NORM_OVERSHOOT {
        return Err(Error::InternalConsistency(format!("gap norm {} exceeds one under a satisfied winding condition", norm.value)));
    }
    Ok(NuMetricOutcome {
        value: norm.value,
        condition_met: true,
        winding: cond.winding,
        min_modulus: cond.min_modulus,
        theta_star: Some(norm.theta_star),
        diagnostics,
    })
}

pub fn nu_metric(p1: &TransferMatrix, p2: &TransferMatrix, cfg: &NumericConfig) -> Result<NuMetricOutcome> {
    if p1.rows() != p2.rows() || p1.cols() != p2.cols() {
        return Err(Error::DimensionMismatch(format!("plants are {}x{} and {}x{}", p1.rows(), p1.cols(), p2.rows(), p2.cols())));
    }
    let g1 = graph_symbols(p1, cfg)?;
    let g2 = graph_symbols(p2, cfg)?;
    nu_metric_symbols(&g1, &g2, cfg)
}

/// Chordal distance between two points of the Riemann sphere.
pub fn chordal(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
}

/// Pointwise gap at `e^{i theta}`: the chordal distance of the plant values
/// for scalar plants, `sigma_max(G̃2 G1)` otherwise.
pub fn pointwise_gap(p1: &TransferMatrix, p2: &TransferMatrix, theta: f64, cfg: &NumericConfig) -> Result<f64> {
    let z = Complex64::from_polar(1.0, theta);
    let a = p1.eval(z, cfg)?;
    let b = p2.eval(z, cfg)?;
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch("plants differ in shape".into()));
    }
    if p1.is_siso() {
        return Ok(chordal(a[(0, 0)], b[(0, 0)]));
    }
    let g1 = graph_symbols(p1, cfg)?;
    let g2 = graph_symbols(p2, cfg)?;
    Ok(pointwise_gap_symbols(&g1, &g2, theta))
}

pub fn pointwise_gap_symbols(g1: &GraphSymbols, g2: &GraphSymbols, theta: f64) -> f64 {
    sigma_max(&(g2.gt.eval_theta(theta) * g1.g.eval_theta(theta)))
}

/// Plot rows `(theta, sigma_max(G̃2 G1), |det(G1* G2)|, arg det(G1* G2))`.
pub fn gap_profile(g1: &GraphSymbols, g2: &GraphSymbols, n: usize) -> Vec<[f64; 4]> {
    (0..n)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / n as f64;
            let det = cross_determinant(g1, g2, t);
            [t, pointwise_gap_symbols(g1, g2, t), det.norm(), det.arg()]
        })
        .collect()
}
