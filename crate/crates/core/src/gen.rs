//! Seeded random plants, perturbations and stabilizing controllers.
//!
//! Every object is a pure function of its configuration and seed. Campaign
//! items draw from independent ChaCha streams of one seed.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::sigma_max;
use crate::config::NumericConfig;
use crate::factor::graph_symbols;
use crate::polyalg::{poly_bezout, Polynomial, RationalFn};
use crate::robust::stabilizes;
use crate::tfm::TransferMatrix;
use crate::{Error, Result};

const MAX_RETRIES: usize = 64;
const MIN_MODULUS: f64 = 0.1;
const MAX_MODULUS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub p: usize,
    pub m: usize,
    pub max_degree: usize,
    pub pole_zero_circle_gap: f64,
    pub stable_fraction: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self { seed: 0, p: 1, m: 1, max_degree: 3, pole_zero_circle_gap: 0.05, stable_fraction: 0.5 }
    }
}

impl GenConfig {
    pub fn validate(&self, cfg: &NumericConfig) -> Result<()> {
        if self.pole_zero_circle_gap < 10.0 * cfg.dist_circle_min || self.pole_zero_circle_gap >= 0.9 {
            return Err(Error::Domain(format!("pole_zero_circle_gap {} out of range", self.pole_zero_circle_gap)));
        }
        if !(0.0..=1.0).contains(&self.stable_fraction) {
            return Err(Error::Domain(format!("stable_fraction {} not in [0, 1]", self.stable_fraction)));
        }
        if self.p == 0 || self.m == 0 || self.p > cfg.max_dim || self.m > cfg.max_dim {
            return Err(Error::Domain(format!("dimensions {}x{} out of range", self.p, self.m)));
        }
        if self.max_degree > cfg.max_entry_degree {
            return Err(Error::Domain(format!("max_degree {} exceeds the entry cap", self.max_degree)));
        }
        Ok(())
    }
}

/// Generator for item `stream` of a campaign seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn draw_modulus(rng: &mut ChaCha8Rng, outside: bool, gap: f64) -> f64 {
    if outside {
        log_uniform(rng, 1.0 + gap, MAX_MODULUS)
    } else {
        log_uniform(rng, MIN_MODULUS, 1.0 - gap)
    }
}

/// Roots of a real polynomial of the given degree: real roots and conjugate
/// pairs, each placed outside the disk with probability `outside`.
fn draw_roots(rng: &mut ChaCha8Rng, degree: usize, outside: f64, gap: f64, avoid: &[Complex64]) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        let out = rng.random_bool(outside);
        let r = draw_modulus(rng, out, gap);
        let pair = degree - roots.len() >= 2 && rng.random_bool(0.5);
        let cand = if pair {
            Complex64::from_polar(r, rng.random_range(0.05..std::f64::consts::PI - 0.05))
        } else if rng.random_bool(0.5) {
            Complex64::new(r, 0.0)
        } else {
            Complex64::new(-r, 0.0)
        };
        if avoid.iter().chain(roots.iter()).any(|a| (a - cand).norm() < gap) {
            continue;
        }
        roots.push(cand);
        if pair {
            roots.push(cand.conj());
        }
    }
    roots
}

fn random_entry(rng: &mut ChaCha8Rng, g: &GenConfig, cfg: &NumericConfig) -> Result<RationalFn> {
    let gap = g.pole_zero_circle_gap;
    let dd = rng.random_range(0..=g.max_degree);
    let poles = draw_roots(rng, dd, g.stable_fraction, gap, &[]);
    let nd = rng.random_range(0..=dd);
    let zeros = draw_roots(rng, nd, 0.5, gap, &poles);
    let gain = log_uniform(rng, 0.3, 3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let num = Polynomial::from_roots(&zeros, Complex64::new(gain, 0.0));
    let den = Polynomial::from_roots(&poles, Complex64::new(1.0, 0.0));
    RationalFn::new(real_part(&num), real_part(&den), cfg)
}

/// Drops the rounding-level imaginary parts left by conjugate-pair products.
fn real_part(p: &Polynomial) -> Polynomial {
    Polynomial::new(p.coeffs().iter().map(|c| Complex64::new(c.re, 0.0)).collect())
}

/// Random plant drawn from `rng`; zero entries appear in matrix plants, and
/// matrix draws that cannot be factorized are redrawn.
pub fn random_plant_from(rng: &mut ChaCha8Rng, g: &GenConfig, cfg: &NumericConfig) -> Result<TransferMatrix> {
    g.validate(cfg)?;
    for _ in 0..MAX_RETRIES {
        let mut entries = Vec::with_capacity(g.p * g.m);
        for _ in 0..g.p * g.m {
            if g.p * g.m > 1 && rng.random_bool(0.1) {
                entries.push(RationalFn::zero());
            } else {
                entries.push(random_entry(rng, g, cfg)?);
            }
        }
        if let Ok(p) = TransferMatrix::new(g.p, g.m, entries, cfg) {
            if p.is_siso() || graph_symbols(&p, cfg).is_ok() {
                return Ok(p);
            }
        }
    }
    Err(Error::Domain("could not draw a valid plant".into()))
}

pub fn random_plant(g: &GenConfig, cfg: &NumericConfig) -> Result<TransferMatrix> {
    random_plant_from(&mut stream_rng(g.seed, 0), g, cfg)
}

fn boundary_clear(p: &TransferMatrix, clearance: f64, cfg: &NumericConfig) -> bool {
    p.entries()
        .iter()
        .all(|e| e.den().is_constant() || e.poles(cfg).map(|rs| rs.iter().all(|r| (r.norm() - 1.0).abs() >= clearance)).unwrap_or(false))
}

/// Multiplies every coefficient by `1 + eps u` with `u` uniform in `[-1, 1]`,
/// redrawing (and eventually shrinking `eps`) while a pole comes within
/// `10 dist_circle_min` of the circle or a matrix draw cannot be factorized.
pub fn perturb_plant(p: &TransferMatrix, eps: f64, seed: u64, cfg: &NumericConfig) -> Result<TransferMatrix> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::Domain(format!("perturbation size {eps} must be nonnegative")));
    }
    if eps == 0.0 {
        return Ok(p.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eps = eps;
    for attempt in 0..MAX_RETRIES {
        if attempt > 0 && attempt % 8 == 0 {
            eps *= 0.5;
        }
        let mut jitter =
            |poly: &Polynomial| Polynomial::new(poly.coeffs().iter().map(|c| c * (1.0 + eps * rng.random_range(-1.0..=1.0))).collect());
        let entries: Result<Vec<RationalFn>> = p
            .entries()
            .iter()
            .map(|e| {
                let num = jitter(e.num());
                let den = jitter(e.den());
                RationalFn::new(num, den, cfg)
            })
            .collect();
        let Ok(entries) = entries else { continue };
        if let Ok(q) = TransferMatrix::new(p.rows(), p.cols(), entries, cfg) {
            // matrix draws can land on a near-cancellation in the fraction
            let factorable = q.is_siso() || graph_symbols(&q, cfg).is_ok();
            if boundary_clear(&q, 10.0 * cfg.dist_circle_min, cfg) && factorable {
                return Ok(q);
            }
        }
    }
    Err(Error::Domain("could not perturb the plant away from the circle".into()))
}

fn sup_norm(p: &TransferMatrix, cfg: &NumericConfig) -> Result<f64> {
    let n = cfg.validation_grid;
    let mut best: f64 = 0.0;
    for j in 0..n {
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64);
        best = best.max(sigma_max(&p.eval(z, cfg)?));
    }
    Ok(best)
}

fn youla_controller(p: &TransferMatrix, rng: &mut ChaCha8Rng, cfg: &NumericConfig) -> Result<TransferMatrix> {
    let e = p.entry(0, 0);
    let (n, d) = (e.num(), e.den());
    let (x, y) = poly_bezout(n, d, cfg)?;
    // d dc - n nc = s, so the closed-loop poles are the zeros of s
    let sdeg = d.degree().min(3);
    let s = real_part(&Polynomial::from_roots(&draw_roots(rng, sdeg, 1.0, 0.3, &[]), Complex64::new(log_uniform(rng, 0.5, 2.0), 0.0)));
    let t = if rng.random_bool(0.5) {
        Polynomial::from_real(&[rng.random_range(-0.3..0.3)])
    } else {
        Polynomial::from_real(&[rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)])
    };
    let nc = &(-&(&x * &s)) + &(d * &t);
    let dc = &(&y * &s) + &(n * &t);
    let c = RationalFn::new(real_part(&nc), real_part(&dc), cfg)?;
    TransferMatrix::siso(c, cfg)
}

fn small_gain_controller(p: &TransferMatrix, rng: &mut ChaCha8Rng, cfg: &NumericConfig) -> Result<TransferMatrix> {
    let g = GenConfig { p: p.cols(), m: p.rows(), max_degree: 2, stable_fraction: 1.0, ..GenConfig::default() };
    let c0 = random_plant_from(rng, &g, cfg)?;
    let gain = sup_norm(p, cfg)? * sup_norm(&c0, cfg)?;
    if gain == 0.0 {
        return Ok(c0);
    }
    let k = Complex64::new(rng.random_range(0.1..0.8) / gain, 0.0);
    let entries = c0.entries().iter().map(|e| RationalFn::new(e.num().scale(k), e.den().clone(), cfg)).collect::<Result<Vec<_>>>()?;
    TransferMatrix::new(c0.rows(), c0.cols(), entries, cfg)
}

/// A controller verified to stabilize `p`. Scalar plants use the Youla
/// parametrization from a polynomial Bézout identity; matrix plants must be
/// stable and get a small-gain controller.
pub fn random_stabilizing_controller(p: &TransferMatrix, rng: &mut ChaCha8Rng, cfg: &NumericConfig) -> Result<TransferMatrix> {
    for _ in 0..MAX_RETRIES {
        let cand = if p.is_siso() { youla_controller(p, rng, cfg) } else { small_gain_controller(p, rng, cfg) };
        let Ok(c) = cand else { continue };
        if !boundary_clear(&c, 10.0 * cfg.dist_circle_min, cfg) {
            continue;
        }
        if stabilizes(p, &c, cfg).map(|r| r.ok).unwrap_or(false) {
            return Ok(c);
        }
    }
    Err(Error::Domain("no stabilizing controller found".into()))
}
