//! Closed-loop map, stabilization test and stability margin.
//!
//! The loop uses the convention `H(P,C) = [P; I] (I - CP)^{-1} [-C, I]` and is
//! evaluated as `G (K̃ G)^{-1} K̃` from the normalized factors of the plant and
//! the controller.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{linf_norm, sigma_min, winding_number};
use crate::config::NumericConfig;
use crate::factor::{controller_symbols, graph_symbols, ControllerSymbols, GraphSymbols};
use crate::numetric::nu_metric_symbols;
use crate::polymat::CMatrix;
use crate::tfm::TransferMatrix;
use crate::{Error, Result};

/// Zeros of `det(K̃ G)` this close to the circle make the loop marginal.
const BOUNDARY_BAND: f64 = 1e-6;

fn check_dual(p: (usize, usize), c: (usize, usize)) -> Result<()> {
    if p.0 != c.1 || p.1 != c.0 {
        return Err(Error::DimensionMismatch(format!("plant is {}x{} but controller is {}x{}", p.0, p.1, c.0, c.1)));
    }
    Ok(())
}

/// Sampler for `H(P,C)` built from stable factors.
pub struct ClosedLoop<'a> {
    plant: &'a GraphSymbols,
    controller: &'a ControllerSymbols,
}

pub fn closed_loop_sampler<'a>(pf: &'a GraphSymbols, cf: &'a ControllerSymbols) -> Result<ClosedLoop<'a>> {
    check_dual((pf.p(), pf.m()), (cf.kt.rows(), cf.k.cols()))?;
    Ok(ClosedLoop { plant: pf, controller: cf })
}

impl ClosedLoop<'_> {
    /// `(K̃ G)(z)`, the `m x m` return-difference factor.
    pub fn return_difference(&self, z: Complex64) -> CMatrix {
        self.controller.kt.eval(z) * self.plant.g.eval(z)
    }

    pub fn eval(&self, z: Complex64, cfg: &NumericConfig) -> Result<CMatrix> {
        let g = self.plant.g.eval(z);
        let kt = self.controller.kt.eval(z);
        let kg = &kt * &g;
        let smin = sigma_min(&kg);
        if smin < cfg.tol_invertible {
            return Err(Error::SingularAtPoint { theta: z.arg().rem_euclid(std::f64::consts::TAU), sigma_min: smin });
        }
        let inv = kg.try_inverse().ok_or(Error::SingularAtPoint { theta: z.arg(), sigma_min: smin })?;
        Ok(g * inv * kt)
    }

    pub fn eval_theta(&self, theta: f64, cfg: &NumericConfig) -> Result<CMatrix> {
        self.eval(Complex64::from_polar(1.0, theta), cfg)
    }
}

/// `[P; I] (I - CP)^{-1} [-C, I]` from the transfer matrices directly.
pub fn direct_closed_loop(p: &TransferMatrix, c: &TransferMatrix, z: Complex64, cfg: &NumericConfig) -> Result<CMatrix> {
    check_dual((p.rows(), p.cols()), (c.rows(), c.cols()))?;
    let (pr, m) = (p.rows(), p.cols());
    let pz = p.eval(z, cfg)?;
    let cz = c.eval(z, cfg)?;
    let ret = CMatrix::identity(m, m) - &cz * &pz;
    let smin = sigma_min(&ret);
    let inv = ret.try_inverse().ok_or(Error::SingularAtPoint { theta: z.arg(), sigma_min: smin })?;
    let mut left = CMatrix::zeros(pr + m, m);
    left.view_mut((0, 0), (pr, m)).copy_from(&pz);
    left.view_mut((pr, 0), (m, m)).fill_with_identity();
    let mut right = CMatrix::zeros(m, pr + m);
    right.view_mut((0, 0), (m, pr)).copy_from(&(-cz));
    right.view_mut((0, pr), (m, m)).fill_with_identity();
    Ok(left * inv * right)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub ok: bool,
    pub det_winding: Option<i64>,
    pub det_min_modulus: f64,
    /// `det(K̃ G)` is too small somewhere on the circle.
    pub boundary_marginal: bool,
}

pub fn stabilizes_symbols(pf: &GraphSymbols, cf: &ControllerSymbols, cfg: &NumericConfig) -> Result<StabilizationReport> {
    let cl = closed_loop_sampler(pf, cf)?;
    match winding_number(|t| cl.return_difference(Complex64::from_polar(1.0, t)).determinant(), cfg) {
        Ok(w) => Ok(StabilizationReport {
            ok: w.winding == 0,
            det_winding: Some(w.winding),
            det_min_modulus: w.min_modulus,
            boundary_marginal: false,
        }),
        Err(Error::NotInvertible { min_modulus, .. }) => {
            Ok(StabilizationReport { ok: false, det_winding: None, det_min_modulus: min_modulus, boundary_marginal: true })
        }
        Err(e) => Err(e),
    }
}

pub fn stabilizes(p: &TransferMatrix, c: &TransferMatrix, cfg: &NumericConfig) -> Result<StabilizationReport> {
    check_dual((p.rows(), p.cols()), (c.rows(), c.cols()))?;
    let pf = graph_symbols(p, cfg)?;
    let cf = controller_symbols(c, cfg)?;
    stabilizes_symbols(&pf, &cf, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    pub ok: bool,
    /// Zeros of the numerator of `det(K̃ G)`, i.e. the closed-loop poles.
    pub zeros: Vec<Complex64>,
    pub boundary_marginal: bool,
}

/// Stabilization decided from the zeros of `det(K̃ G)`: the factors are
/// stable, so the loop is stable exactly when the numerator of the
/// determinant has no zero in the closed disk.
pub fn stabilizes_by_poles(pf: &GraphSymbols, cf: &ControllerSymbols, cfg: &NumericConfig) -> Result<PoleReport> {
    closed_loop_sampler(pf, cf)?;
    let prod = cf.kt.num.mul(&pf.g.num)?;
    let det = prod.det()?.trim_relative(1e-13);
    if det.is_zero() {
        return Ok(PoleReport { ok: false, zeros: Vec::new(), boundary_marginal: true });
    }
    let zeros = if det.is_constant() { Vec::new() } else { det.roots(cfg)? };
    let boundary_marginal = zeros.iter().any(|z| (z.norm() - 1.0).abs() <= BOUNDARY_BAND);
    let ok = !boundary_marginal && zeros.iter().all(|z| z.norm() > 1.0);
    Ok(PoleReport { ok, zeros, boundary_marginal })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub stabilizes: bool,
    pub hinf_norm: Option<f64>,
    pub margin: f64,
    pub det_winding: Option<i64>,
    pub det_min_modulus: f64,
    pub theta_star: Option<f64>,
    pub boundary_marginal: bool,
}

pub fn stability_margin_symbols(pf: &GraphSymbols, cf: &ControllerSymbols, cfg: &NumericConfig) -> Result<MarginReport> {
    let st = stabilizes_symbols(pf, cf, cfg)?;
    if !st.ok {
        return Ok(MarginReport {
            stabilizes: false,
            hinf_norm: None,
            margin: 0.0,
            det_winding: st.det_winding,
            det_min_modulus: st.det_min_modulus,
            theta_star: None,
            boundary_marginal: st.boundary_marginal,
        });
    }
    let cl = closed_loop_sampler(pf, cf)?;
    let norm = linf_norm(|t| cl.eval_theta(t, cfg), cfg)?;
    Ok(MarginReport {
        stabilizes: true,
        hinf_norm: Some(norm.value),
        margin: 1.0 / norm.value,
        det_winding: st.det_winding,
        det_min_modulus: st.det_min_modulus,
        theta_star: Some(norm.theta_star),
        boundary_marginal: false,
    })
}

pub fn stability_margin(p: &TransferMatrix, c: &TransferMatrix, cfg: &NumericConfig) -> Result<MarginReport> {
    check_dual((p.rows(), p.cols()), (c.rows(), c.cols()))?;
    let pf = graph_symbols(p, cfg)?;
    let cf = controller_symbols(c, cfg)?;
    stability_margin_symbols(&pf, &cf, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub slack: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin_nominal: f64,
    pub distance: f64,
}

/// Compares `mu(P, C)` with `mu(P0, C) - d(P0, P)`.
pub fn robustness_check(p0: &TransferMatrix, p: &TransferMatrix, c: &TransferMatrix, cfg: &NumericConfig) -> Result<RobustnessReport> {
    let g0 = graph_symbols(p0, cfg)?;
    let g = graph_symbols(p, cfg)?;
    let cf = controller_symbols(c, cfg)?;
    robustness_check_symbols(&g0, &g, &cf, cfg)
}

pub fn robustness_check_symbols(
    g0: &GraphSymbols,
    g: &GraphSymbols,
    cf: &ControllerSymbols,
    cfg: &NumericConfig,
) -> Result<RobustnessReport> {
    let lhs = stability_margin_symbols(g, cf, cfg)?.margin;
    let margin_nominal = stability_margin_symbols(g0, cf, cfg)?.margin;
    let distance = nu_metric_symbols(g0, g, cfg)?.value;
    let rhs = margin_nominal - distance;
    Ok(RobustnessReport { slack: lhs - rhs, lhs, rhs, margin_nominal, distance })
}
