//! Numerics on the unit circle: sampling grids, winding numbers, sup-norms of
//! matrix symbols, Fourier coefficients and harmonic (Poisson) extension.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::config::NumericConfig;
use crate::polymat::CMatrix;
use crate::{Error, Result};

/// Uniform grid of `n` angles in `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    thetas: Vec<f64>,
}

impl CircleGrid {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::Domain(format!("grid size {n} must be a power of two >= 64")));
        }
        Ok(Self { thetas: (0..n).map(|j| TAU * j as f64 / n as f64).collect() })
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.thetas.iter().map(|&t| Complex64::from_polar(1.0, t))
    }

    /// Index of the next sample, wrapping around.
    pub fn next(&self, j: usize) -> usize {
        (j + 1) % self.thetas.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub winding: i64,
    pub min_modulus: f64,
    pub samples_used: usize,
    pub max_phase_step: f64,
}

impl WindingReport {
    pub fn is_valid(&self, cfg: &NumericConfig) -> bool {
        self.min_modulus >= cfg.tol_invertible && self.max_phase_step <= FRAC_PI_2
    }
}

/// Winding number about the origin of `theta -> f(e^{i theta})`, by phase
/// unwrapping on the base grid with local bisection wherever a phase step
/// exceeds `pi / 2`.
pub fn winding_number<F>(f: F, cfg: &NumericConfig) -> Result<WindingReport>
where
    F: Fn(f64) -> Complex64,
{
    let n = cfg.grid_size;
    let base: Vec<(f64, Complex64)> = (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            (t, f(t))
        })
        .collect();
    let mut samples = n;
    let mut total_phase = 0.0;
    let mut max_step: f64 = 0.0;
    let mut min_mod = f64::INFINITY;
    let mut min_theta = 0.0;
    let note_min = |t: f64, v: Complex64, min_mod: &mut f64, min_theta: &mut f64| {
        if v.norm() < *min_mod {
            *min_mod = v.norm();
            *min_theta = t;
        }
    };
    for &(t, v) in &base {
        note_min(t, v, &mut min_mod, &mut min_theta);
    }
    if min_mod < cfg.tol_invertible {
        return Err(Error::NotInvertible { min_modulus: min_mod, theta: min_theta });
    }
    for j in 0..n {
        let (t0, v0) = base[j];
        let (mut t1, v1) = base[(j + 1) % n];
        if j + 1 == n {
            t1 = TAU;
        }
        // depth-first bisection of [t0, t1], processed left to right
        let mut stack = vec![(t0, v0, t1, v1)];
        while let Some((a, va, b, vb)) = stack.pop() {
            let step = (vb / va).arg();
            if step.abs() <= FRAC_PI_2 {
                total_phase += step;
                max_step = max_step.max(step.abs());
                continue;
            }
            if samples >= cfg.winding_budget {
                return Err(Error::BudgetExhausted { samples });
            }
            let mid = 0.5 * (a + b);
            let vm = f(mid);
            samples += 1;
            note_min(mid, vm, &mut min_mod, &mut min_theta);
            if min_mod < cfg.tol_invertible {
                return Err(Error::NotInvertible { min_modulus: min_mod, theta: min_theta });
            }
            stack.push((mid, vm, b, vb));
            stack.push((a, va, mid, vm));
        }
    }
    Ok(WindingReport { winding: (total_phase / TAU).round() as i64, min_modulus: min_mod, samples_used: samples, max_phase_step: max_step })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub theta_star: f64,
}

pub fn sigma_max(m: &CMatrix) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn sigma_min(m: &CMatrix) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Sup over the circle of `sigma_max(M(e^{i theta}))`: grid maximum, refined by
/// golden-section search around the eight largest local maxima.
pub fn linf_norm<F>(m: F, cfg: &NumericConfig) -> Result<NormReport>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let n = cfg.grid_size;
    let h = TAU / n as f64;
    let vals = (0..n).map(|j| m(h * j as f64).map(|x| sigma_max(&x))).collect::<Result<Vec<f64>>>()?;
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&j| {
            let prev = vals[(j + n - 1) % n];
            let next = vals[(j + 1) % n];
            vals[j] >= prev && vals[j] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    peaks.dedup_by(|a, b| vals[*a] == vals[*b] && (*a as i64 - *b as i64).abs() <= 1);
    peaks.truncate(8);

    let mut best = NormReport { value: 0.0, theta_star: 0.0 };
    for (j, &v) in vals.iter().enumerate() {
        if v > best.value {
            best = NormReport { value: v, theta_star: h * j as f64 };
        }
    }
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    for &j in &peaks {
        let eval = |t: f64| m(t).map(|x| sigma_max(&x));
        let (mut a, mut b) = (h * j as f64 - h, h * j as f64 + h);
        let mut x1 = b - golden * (b - a);
        let mut x2 = a + golden * (b - a);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        while b - a > 1e-12 {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - golden * (b - a);
                f1 = eval(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + golden * (b - a);
                f2 = eval(x2)?;
            }
        }
        let (t, v) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
        if v > best.value {
            best = NormReport { value: v, theta_star: t.rem_euclid(TAU) };
        }
    }
    Ok(best)
}

/// Fourier coefficients `c_{-n} ..= c_n` of a circle symbol, returned with
/// `c_k` at index `k + n`.
pub fn fourier_coeffs<F>(f: F, n: usize, cfg: &NumericConfig) -> Vec<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let grid = cfg.grid_size.max((4 * n).next_power_of_two()) * 2;
    let mut buf: Vec<Complex64> = (0..grid).map(|j| f(TAU * j as f64 / grid as f64)).collect();
    FftPlanner::new().plan_fft_forward(grid).process(&mut buf);
    let scale = 1.0 / grid as f64;
    (-(n as i64)..=n as i64).map(|k| buf[k.rem_euclid(grid as i64) as usize] * scale).collect()
}

/// Values on the uniform grid of size `grid` of the trigonometric polynomial
/// with coefficients `c_{-n} ..= c_n`.
pub fn synthesize(coeffs: &[Complex64], grid: usize) -> Vec<Complex64> {
    let n = (coeffs.len() / 2) as i64;
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    for (idx, &c) in coeffs.iter().enumerate() {
        let k = idx as i64 - n;
        buf[k.rem_euclid(grid as i64) as usize] += c;
    }
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    buf
}

/// Evaluates the harmonic extension `sum c_k r^{|k|} e^{ikt}`.
pub fn harmonic_extension(coeffs: &[Complex64], r: f64, t: f64) -> Complex64 {
    let n = (coeffs.len() / 2) as i64;
    coeffs
        .iter()
        .enumerate()
        .map(|(idx, &c)| {
            let k = idx as i64 - n;
            c * r.powi(k.unsigned_abs() as i32) * Complex64::from_polar(1.0, k as f64 * t)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub radius: f64,
    pub report: WindingReport,
    /// Minimum of `|F|` over every sampled circle between `radius` and 1.
    pub annulus_min_modulus: f64,
    pub radii: Vec<f64>,
}

impl PoissonReport {
    /// Index of the Toeplitz operator implied by the inner winding.
    pub fn index_estimate(&self) -> i64 {
        -self.report.winding
    }
}

/// Winding of the harmonic extension on the circle of radius `r`, plus the
/// modulus floor on the circles `r, (1+r)/2, (3+r)/4, ...` approaching 1.
pub fn poisson_winding(coeffs: &[Complex64], r: f64, cfg: &NumericConfig) -> Result<PoissonReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("radius {r} outside (0, 1)")));
    }
    if coeffs.len().is_multiple_of(2) {
        return Err(Error::Domain("coefficient list must have odd length".into()));
    }
    let report = winding_number(|t| harmonic_extension(coeffs, r, t), cfg)?;
    let mut radii = Vec::new();
    let mut rho = r;
    for _ in 0..6 {
        radii.push(rho);
        rho = 0.5 * (1.0 + rho);
    }
    let n = cfg.grid_size;
    let mut min_mod = f64::INFINITY;
    let mut min_theta = 0.0;
    for &rho in &radii {
        let vals = synthesize(
            &coeffs
                .iter()
                .enumerate()
                .map(|(idx, &c)| c * rho.powi((idx as i64 - (coeffs.len() / 2) as i64).unsigned_abs() as i32))
                .collect::<Vec<_>>(),
            n.max(coeffs.len().next_power_of_two()),
        );
        for (j, v) in vals.iter().enumerate() {
            if v.norm() < min_mod {
                min_mod = v.norm();
                min_theta = TAU * j as f64 / vals.len() as f64;
            }
        }
    }
    if min_mod < cfg.tol_invertible {
        return Err(Error::NotInvertible { min_modulus: min_mod, theta: min_theta });
    }
    Ok(PoissonReport { radius: r, report, annulus_min_modulus: min_mod, radii })
}
