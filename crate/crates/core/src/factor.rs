//! Normalized right and left coprime factorizations of rational plants.
//!
//! A coprime polynomial fraction `P = Np Dp^{-1}` is normalized by an outer
//! spectral factor `R` of `Phi = Np* Np + Dp* Dp` on the circle, so that
//! `N = Np R^{-1}` and `D = Dp R^{-1}` satisfy `N* N + D* D = I`. Scalar
//! densities are factored exactly by pairing the roots `r` and `1 / conj(r)`;
//! matrix densities go through Bauer's banded block-Toeplitz Cholesky
//! recursion. Left factorizations are obtained by transposition.

use std::collections::VecDeque;

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::circle::{self, sigma_max};
use crate::config::NumericConfig;
use crate::polyalg::{poly_bezout, Polynomial};
use crate::polymat::{CMatrix, PolyMatrix, RationalMatrix};
use crate::tfm::{build_rmfd, Side, TransferMatrix};
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn grid_points(n: usize) -> impl Iterator<Item = (f64, Complex64)> {
    (0..n).map(move |j| {
        let t = std::f64::consts::TAU * j as f64 / n as f64;
        (t, Complex64::from_polar(1.0, t))
    })
}

/// Outer factor of a positive scalar trigonometric polynomial given by its
/// coefficients `c_{-q} ..= c_q`: returns the roots of the factor (all outside
/// the closed disk), the scalar `alpha` with `r(z) = alpha prod (z - root)`
/// and `1 / alpha` computed directly.
fn scalar_outer(coeffs: &[Complex64], cfg: &NumericConfig) -> Result<(Vec<Complex64>, Complex64, Complex64)> {
    if coeffs.len().is_multiple_of(2) {
        return Err(Error::Domain("trigonometric polynomial needs 2q+1 coefficients".into()));
    }
    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut trim = 0;
    while 2 * trim + 1 < coeffs.len() && coeffs[trim].norm() <= 1e-15 * peak {
        trim += 1;
    }
    let coeffs = &coeffs[trim..coeffs.len() - trim];
    let q = coeffs.len() / 2;
    let vals = circle::synthesize(coeffs, cfg.positivity_grid.max(coeffs.len().next_power_of_two()));
    let (mut min, mut min_at, mut max) = (f64::INFINITY, 0, 0.0f64);
    for (j, v) in vals.iter().enumerate() {
        if v.re < min {
            min = v.re;
            min_at = j;
        }
        max = max.max(v.re);
    }
    let theta = std::f64::consts::TAU * min_at as f64 / vals.len() as f64;
    // phi is a squared modulus, so its floor is the square of the modulus floor
    if !(min > cfg.tol_invertible * cfg.tol_invertible * max) || !(max > 0.0) {
        return Err(Error::NotPositive { min, theta });
    }
    let phi_one: f64 = coeffs.iter().map(|c| c.re).sum();
    if q == 0 {
        let phi = coeffs[0].re;
        return Ok((Vec::new(), Complex64::new(phi.sqrt(), 0.0), Complex64::new((1.0 / phi).sqrt(), 0.0)));
    }
    let mut roots = Polynomial::new(coeffs.to_vec()).roots(cfg)?;
    roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    roots.truncate(q);
    if roots.iter().any(|r| r.norm() <= 1.0) {
        return Err(Error::NotPositive { min, theta });
    }
    let prod: Complex64 = roots.iter().map(|r| ONE - r).product();
    let alpha = Complex64::new(phi_one.sqrt(), 0.0) / prod;
    let inv_alpha = prod * (1.0 / phi_one).sqrt();
    Ok((roots, alpha, inv_alpha))
}

/// Outer polynomial `r` of degree `q` with `|r|^2 = phi` on the circle and
/// `r(1) > 0`; `coeffs` holds `c_{-q} ..= c_q` with `c_{-k} = conj(c_k)`.
pub fn spectral_factor_scalar(coeffs: &[Complex64], cfg: &NumericConfig) -> Result<Polynomial> {
    let (roots, alpha, _) = scalar_outer(coeffs, cfg)?;
    Ok(Polynomial::from_roots(&roots, alpha))
}

#[derive(Debug, Clone)]
pub struct MatrixSpectralFactor {
    /// `R(z) = sum R_k z^k` with `R* R = Phi` on the circle.
    pub r: PolyMatrix,
    /// Sup over the validation grid of `|R^{-*} Phi R^{-1} - I|`.
    pub residual: f64,
    /// Number of block rows of the Toeplitz section used.
    pub section: usize,
}

fn trig_matrix_eval(coeffs: &[CMatrix], z: Complex64) -> CMatrix {
    let q = (coeffs.len() / 2) as i32;
    let mut acc = CMatrix::zeros(coeffs[0].nrows(), coeffs[0].ncols());
    for (idx, c) in coeffs.iter().enumerate() {
        acc += c * z.powi(idx as i32 - q);
    }
    acc
}

fn matrix_factor_residual(coeffs: &[CMatrix], r: &PolyMatrix, grid: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for (_, z) in grid_points(grid) {
        let phi = trig_matrix_eval(coeffs, z);
        let Some(rinv) = r.eval(z).try_inverse() else {
            return f64::INFINITY;
        };
        let white = rinv.adjoint() * phi * &rinv;
        worst = worst.max(sigma_max(&(&white - CMatrix::identity(white.nrows(), white.ncols()))));
    }
    worst
}

/// Bauer's method: Cholesky factorization `T = L L*` of growing sections of
/// the banded block-Toeplitz matrix with blocks `T[i][j] = C_{j-i}`; the last
/// block row of `L` converges to `[R_q* .. R_0*]`.
pub fn spectral_factor_matrix(coeffs: &[CMatrix], cfg: &NumericConfig) -> Result<MatrixSpectralFactor> {
    if coeffs.is_empty() || coeffs.len().is_multiple_of(2) {
        return Err(Error::Domain("matrix trigonometric polynomial needs 2q+1 coefficients".into()));
    }
    let q = coeffs.len() / 2;
    let m = coeffs[0].nrows();
    let c = |k: i64| &coeffs[(k + q as i64) as usize];

    // positivity on the validation grid
    let mut lam_min = f64::INFINITY;
    let mut lam_at = 0.0;
    let mut lam_max: f64 = 0.0;
    for (t, z) in grid_points(cfg.positivity_grid) {
        let phi = trig_matrix_eval(coeffs, z);
        let herm = (&phi + phi.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = herm.symmetric_eigenvalues();
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        if lo < lam_min {
            lam_min = lo;
            lam_at = t;
        }
        lam_max = lam_max.max(eig.iter().copied().fold(0.0, f64::max));
    }
    if !(lam_min > cfg.tol_invertible * cfg.tol_invertible * lam_max) {
        return Err(Error::NotPositive { min: lam_min, theta: lam_at });
    }

    let mut history: VecDeque<Vec<CMatrix>> = VecDeque::with_capacity(q + 1);
    let mut checkpoint = cfg.bauer_min_section.max(q + 1).next_power_of_two();
    let mut previous: Option<f64> = None;
    let mut best: Option<MatrixSpectralFactor> = None;
    for i in 0..cfg.bauer_max_section.max(checkpoint) {
        let mut cur = vec![CMatrix::zeros(m, m); q + 1];
        let back = |col: usize, history: &VecDeque<Vec<CMatrix>>| history.len() - (i - col);
        for k in (1..=q.min(i)).rev() {
            let col = i - k;
            let mut acc = c(-(k as i64)).clone();
            let row_col = &history[back(col, &history)];
            for s in i.saturating_sub(q)..col {
                acc -= &cur[i - s] * row_col[col - s].adjoint();
            }
            let solved =
                row_col[0].solve_lower_triangular(&acc.adjoint()).ok_or(Error::NoConvergence { residual: f64::INFINITY, section: i })?;
            cur[k] = solved.adjoint();
        }
        let mut acc = c(0).clone();
        for blk in cur.iter().skip(1) {
            acc -= blk * blk.adjoint();
        }
        let herm = (&acc + acc.adjoint()) * Complex64::new(0.5, 0.0);
        let chol = Cholesky::new(herm).ok_or(Error::NotPositive { min: lam_min, theta: lam_at })?;
        cur[0] = chol.l();
        if history.len() == q.max(1) {
            history.pop_front();
        }
        if q > 0 {
            history.push_back(cur.clone());
        }

        if i + 1 == checkpoint {
            let factor: Vec<CMatrix> = cur.iter().map(|b| b.adjoint()).collect();
            let r = PolyMatrix::from_coefficients(m, m, &factor);
            let residual = matrix_factor_residual(coeffs, &r, cfg.validation_grid);
            let stalled = previous.is_some_and(|p| residual > 0.5 * p);
            best = Some(MatrixSpectralFactor { r, residual, section: i + 1 });
            if residual <= cfg.tol_specfac_mat * 1e-4 || (stalled && residual <= cfg.tol_specfac_mat) {
                break;
            }
            previous = Some(residual);
            checkpoint *= 2;
            if checkpoint > cfg.bauer_max_section {
                break;
            }
        }
    }
    let out = best.ok_or(Error::NoConvergence { residual: f64::INFINITY, section: 0 })?;
    if out.residual > cfg.tol_specfac_mat {
        return Err(Error::NoConvergence { residual: out.residual, section: out.section });
    }
    // outer check: det R has no zero in the closed disk and winds zero times
    let det = out.r.det()?;
    let det_trim = det.trim_relative(1e-14);
    if !det_trim.is_constant() && det_trim.roots(cfg)?.iter().any(|z| z.norm() <= 1.0) {
        return Err(Error::NoConvergence { residual: out.residual, section: out.section });
    }
    let w = circle::winding_number(|t| det.eval(Complex64::from_polar(1.0, t)), cfg)?;
    if w.winding != 0 {
        return Err(Error::NoConvergence { residual: out.residual, section: out.section });
    }
    Ok(out)
}

/// Coefficients `C_{-q} ..= C_q` of `A* A` on the circle for a polynomial
/// matrix `A`.
fn gram_coefficients(a: &PolyMatrix) -> Vec<CMatrix> {
    let ac = a.coefficients();
    let q = ac.len() - 1;
    let cols = a.cols();
    let mut out = vec![CMatrix::zeros(cols, cols); 2 * q + 1];
    for l in 0..=q {
        let mut acc = CMatrix::zeros(cols, cols);
        for j in 0..=(q - l) {
            acc += ac[j].adjoint() * &ac[j + l];
        }
        out[q - l] = acc.adjoint();
        out[q + l] = acc;
    }
    out
}

#[derive(Debug, Clone)]
pub struct NormalizedFactorization {
    pub side: Side,
    /// `N` (right) or `Ñ` (left).
    pub n: RationalMatrix,
    /// `D` (right) or `D̃` (left).
    pub d: RationalMatrix,
    pub residual_norm: f64,
    pub bezout_residual: Option<f64>,
    /// Scaled coprime fraction and spectral factor of the underlying right
    /// factorization (of `P` for right, of `P^T` for left).
    np: PolyMatrix,
    dp: PolyMatrix,
    r: PolyMatrix,
}

impl NormalizedFactorization {
    pub fn spectral_factor(&self) -> &PolyMatrix {
        &self.r
    }

    /// Sup over the grid of `|N* N + D* D - I|` (right) or
    /// `|Ñ Ñ* + D̃ D̃* - I|` (left).
    pub fn normalization_residual(&self, grid: usize) -> f64 {
        grid_points(grid)
            .map(|(_, z)| {
                let n = self.n.eval(z);
                let d = self.d.eval(z);
                let gram = match self.side {
                    Side::Right => n.adjoint() * &n + d.adjoint() * &d,
                    Side::Left => &n * n.adjoint() + &d * d.adjoint(),
                };
                sigma_max(&(&gram - CMatrix::identity(gram.nrows(), gram.ncols())))
            })
            .fold(0.0, f64::max)
    }

    /// Roots of the shared denominator.
    pub fn denominator_roots(&self, cfg: &NumericConfig) -> Result<Vec<Complex64>> {
        if self.n.den.is_constant() {
            Ok(Vec::new())
        } else {
            self.n.den.roots(cfg)
        }
    }

    /// `N D^{-1}` (right) or `D̃^{-1} Ñ` (left) at `z`.
    pub fn reconstruct(&self, z: Complex64) -> Option<CMatrix> {
        let n = self.n.eval(z);
        let d = self.d.eval(z).try_inverse()?;
        Some(match self.side {
            Side::Right => n * d,
            Side::Left => d * n,
        })
    }

    pub fn with_certificate(mut self, cfg: &NumericConfig) -> Self {
        if self.side == Side::Right {
            self.bezout_residual = bezout_certificate(&self, cfg).ok().map(|c| c.residual);
        }
        self
    }
}

/// Normalized right coprime factorization `P = N D^{-1}`.
pub fn nrcf(p: &TransferMatrix, cfg: &NumericConfig) -> Result<NormalizedFactorization> {
    let mfd = build_rmfd(p, cfg)?;
    if !mfd.coprime {
        return Err(Error::Domain("no coprime right matrix fraction could be obtained".into()));
    }
    let stacked = mfd.np.vstack(&mfd.dp)?;
    let peak = stacked.coefficients().iter().flat_map(|c| c.iter().map(|x| x.norm()).collect::<Vec<_>>()).fold(0.0, f64::max);
    let s = Complex64::new(1.0 / peak, 0.0);
    let (np, dp) = (mfd.np.scale(s), mfd.dp.scale(s));
    let phi = gram_coefficients(&np.vstack(&dp)?);
    let m = p.cols();

    let (r, den, num_scale, adj) = if m == 1 {
        let scalar: Vec<Complex64> = phi.iter().map(|c| c[(0, 0)]).collect();
        let (roots, alpha, inv_alpha) = scalar_outer(&scalar, cfg)?;
        let den = Polynomial::from_roots(&roots, ONE);
        let mut r = PolyMatrix::zeros(1, 1);
        r.set(0, 0, den.scale(alpha));
        (r, den, inv_alpha, PolyMatrix::identity(1))
    } else {
        let sf = spectral_factor_matrix(&phi, cfg)?;
        let det = sf.r.det()?.trim_relative(1e-14);
        let lead = det.lead();
        let den = det.scale(lead.inv());
        let adj = sf.r.adjugate()?;
        (sf.r, den, lead.inv(), adj)
    };
    let den_roots = if den.is_constant() { Vec::new() } else { den.roots(cfg)? };
    if let Some(z) = den_roots.iter().find(|z| z.norm() < 1.0 + cfg.dist_circle_min) {
        return Err(Error::InternalConsistency(format!("normalized factor has a pole at {z} inside the stability region")));
    }
    let n = RationalMatrix::new(np.mul(&adj)?.scale(num_scale), den.clone())?;
    let d = RationalMatrix::new(dp.mul(&adj)?.scale(num_scale), den)?;
    let mut out = NormalizedFactorization { side: Side::Right, n, d, residual_norm: 0.0, bezout_residual: None, np, dp, r };
    out.residual_norm = out.normalization_residual(cfg.validation_grid);
    if out.residual_norm > cfg.tol_normalization {
        return Err(Error::NoConvergence { residual: out.residual_norm, section: 0 });
    }
    Ok(out)
}

/// Normalized left coprime factorization `P = D̃^{-1} Ñ`, via the right
/// factorization of `P^T`.
pub fn nlcf(p: &TransferMatrix, cfg: &NumericConfig) -> Result<NormalizedFactorization> {
    let right = nrcf(&p.transpose(), cfg)?;
    let mut out = NormalizedFactorization {
        side: Side::Left,
        n: right.n.transpose(),
        d: right.d.transpose(),
        residual_norm: 0.0,
        bezout_residual: None,
        np: right.np,
        dp: right.dp,
        r: right.r,
    };
    out.residual_norm = out.normalization_residual(cfg.validation_grid);
    Ok(out)
}

/// `G = [N; D]` and `G̃ = [-D̃, Ñ]` of a plant.
#[derive(Debug, Clone)]
pub struct GraphSymbols {
    pub right: NormalizedFactorization,
    pub left: NormalizedFactorization,
    pub g: RationalMatrix,
    pub gt: RationalMatrix,
    /// Sup over the validation grid of `|G̃ G|`.
    pub annihilation: f64,
}

impl GraphSymbols {
    pub fn p(&self) -> usize {
        self.gt.rows()
    }

    pub fn m(&self) -> usize {
        self.g.cols()
    }
}

pub fn graph_symbols(p: &TransferMatrix, cfg: &NumericConfig) -> Result<GraphSymbols> {
    let right = nrcf(p, cfg)?;
    let left = nlcf(p, cfg)?;
    let g = right.n.vstack(&right.d)?;
    let gt = left.d.neg().hstack(&left.n)?;
    let annihilation = grid_points(cfg.validation_grid).map(|(_, z)| sigma_max(&(gt.eval(z) * g.eval(z)))).fold(0.0, f64::max);
    if annihilation > cfg.tol_graph {
        return Err(Error::InternalConsistency(format!("graph symbols do not annihilate: sup |G~ G| = {annihilation:e}")));
    }
    Ok(GraphSymbols { right, left, g, gt, annihilation })
}

/// `K = [D_C; N_C]` and `K̃ = [-Ñ_C, D̃_C]` of a controller.
#[derive(Debug, Clone)]
pub struct ControllerSymbols {
    pub right: NormalizedFactorization,
    pub left: NormalizedFactorization,
    pub k: RationalMatrix,
    pub kt: RationalMatrix,
}

pub fn controller_symbols(c: &TransferMatrix, cfg: &NumericConfig) -> Result<ControllerSymbols> {
    let right = nrcf(c, cfg)?;
    let left = nlcf(c, cfg)?;
    let k = right.d.vstack(&right.n)?;
    let kt = left.n.neg().hstack(&left.d)?;
    Ok(ControllerSymbols { right, left, k, kt })
}

#[derive(Debug, Clone)]
pub struct BezoutCertificate {
    pub x: RationalMatrix,
    pub y: RationalMatrix,
    /// Sup over the validation grid of `|X N + Y D - I|`.
    pub residual: f64,
}

fn certificate_residual(f: &NormalizedFactorization, x: &RationalMatrix, y: &RationalMatrix, grid: usize) -> f64 {
    grid_points(grid)
        .map(|(_, z)| {
            let v = x.eval(z) * f.n.eval(z) + y.eval(z) * f.d.eval(z);
            sigma_max(&(&v - CMatrix::identity(v.nrows(), v.ncols())))
        })
        .fold(0.0, f64::max)
}

/// Stable `X, Y` with `X N + Y D = I`. Scalar plants go through the
/// polynomial Bézout identity scaled by the spectral factor; matrix plants
/// solve `X_p Np + Y_p Dp = R` over polynomial matrices of increasing degree
/// by least squares.
pub fn bezout_certificate(f: &NormalizedFactorization, cfg: &NumericConfig) -> Result<BezoutCertificate> {
    if f.side != Side::Right {
        return Err(Error::Domain("Bezout certificate expects a right factorization".into()));
    }
    let (p, m) = (f.np.rows(), f.np.cols());
    if p == 1 && m == 1 {
        let (x, y) = poly_bezout(f.np.get(0, 0), f.dp.get(0, 0), cfg)?;
        let r = f.r.get(0, 0);
        let x = RationalMatrix::polynomial(PolyMatrix::from_fn(1, 1, |_, _| &x * r));
        let y = RationalMatrix::polynomial(PolyMatrix::from_fn(1, 1, |_, _| &y * r));
        let residual = certificate_residual(f, &x, &y, cfg.validation_grid);
        if residual > cfg.tol_bezout_mat {
            return Err(Error::CertificateNotFound { residual });
        }
        return Ok(BezoutCertificate { x, y, residual });
    }

    let a = f.np.vstack(&f.dp)?;
    let ac = a.coefficients();
    let deg_a = ac.len() - 1;
    let rc = f.r.coefficients();
    let q = rc.len() - 1;
    let rows_a = p + m;
    let det_deg = f.dp.det()?.trim_relative(1e-13).degree();
    let k_min = q.saturating_sub(deg_a);
    let k_max = (det_deg + q).min(24).max(k_min);
    let mut best = f64::INFINITY;
    for k in k_min..=k_max {
        let out_len = k + deg_a + 1;
        // S: (rows_a (k+1)) x (m out_len); W S = target
        let mut s = CMatrix::zeros(rows_a * (k + 1), m * out_len);
        for j in 0..=k {
            for (d, blk) in ac.iter().enumerate() {
                s.view_mut((j * rows_a, (j + d) * m), (rows_a, m)).copy_from(blk);
            }
        }
        let mut target = CMatrix::zeros(m, m * out_len);
        for (l, blk) in rc.iter().enumerate() {
            target.view_mut((0, l * m), (m, m)).copy_from(blk);
        }
        let st = s.transpose();
        let svd = st.svd(true, true);
        let wt = match svd.solve(&target.transpose(), 1e-13) {
            Ok(w) => w,
            Err(_) => continue,
        };
        let w = wt.transpose();
        let coeff_at = |j: usize| -> CMatrix { w.view((0, j * rows_a), (m, rows_a)).into_owned() };
        let x = PolyMatrix::from_fn(m, p, |i, jj| Polynomial::new((0..=k).map(|j| coeff_at(j)[(i, jj)]).collect()));
        let y = PolyMatrix::from_fn(m, m, |i, jj| Polynomial::new((0..=k).map(|j| coeff_at(j)[(i, p + jj)]).collect()));
        let (x, y) = (RationalMatrix::polynomial(x), RationalMatrix::polynomial(y));
        let residual = certificate_residual(f, &x, &y, cfg.validation_grid);
        if residual <= cfg.tol_bezout_mat {
            return Ok(BezoutCertificate { x, y, residual });
        }
        best = best.min(residual);
    }
    Err(Error::CertificateNotFound { residual: best })
}

/// Matrix-valued trigonometric polynomial `Phi(z)` from coefficients.
pub fn eval_trig_matrix(coeffs: &[CMatrix], z: Complex64) -> CMatrix {
    trig_matrix_eval(coeffs, z)
}

/// Scalar density `|n|^2 + |d|^2` of a polynomial pair, as `c_{-q} ..= c_q`.
pub fn pair_density(n: &Polynomial, d: &Polynomial) -> Vec<Complex64> {
    let a = PolyMatrix::from_fn(2, 1, |i, _| if i == 0 { n.clone() } else { d.clone() });
    gram_coefficients(&a).into_iter().map(|c| c[(0, 0)]).collect()
}
