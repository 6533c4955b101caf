//! Transfer matrices over the field of fractions of the stable ring, their
//! polynomial right matrix-fraction descriptions and coprimeness reduction.

use nalgebra::linalg::QR;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::NumericConfig;
use crate::polyalg::{Polynomial, RationalFn};
use crate::polymat::{CMatrix, PolyMatrix};
use crate::{Error, Result};

/// A `p x m` matrix of reduced rational functions in `z` with no pole on the
/// unit circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferMatrix {
    p: usize,
    m: usize,
    entries: Vec<RationalFn>,
    #[serde(skip)]
    entry_poles: Vec<Vec<Complex64>>,
}

impl PartialEq for TransferMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.entries == other.entries
    }
}

impl TransferMatrix {
    /// Validates dimensions, size caps and the distance of every pole from the
    /// unit circle. `entries` is row-major.
    pub fn new(p: usize, m: usize, entries: Vec<RationalFn>, cfg: &NumericConfig) -> Result<Self> {
        if p == 0 || m == 0 || entries.len() != p * m {
            return Err(Error::DimensionMismatch(format!("{} entries for a {p}x{m} transfer matrix", entries.len())));
        }
        if p > cfg.max_dim || m > cfg.max_dim {
            return Err(Error::Domain(format!("{p}x{m} exceeds the size cap {}", cfg.max_dim)));
        }
        let mut entry_poles = Vec::with_capacity(entries.len());
        for (idx, e) in entries.iter().enumerate() {
            let deg = e.num().degree().max(e.den().degree());
            if deg > cfg.max_entry_degree {
                return Err(Error::Domain(format!(
                    "entry ({}, {}) has degree {deg} above the cap {}",
                    idx / m,
                    idx % m,
                    cfg.max_entry_degree
                )));
            }
            let poles = if e.den().is_constant() { Vec::new() } else { e.poles(cfg)? };
            if let Some(z) = poles.iter().find(|z| (z.norm() - 1.0).abs() < cfg.dist_circle_min) {
                return Err(Error::Domain(format!("entry ({}, {}) has a pole at {z} on the unit circle", idx / m, idx % m)));
            }
            entry_poles.push(poles);
        }
        Ok(Self { p, m, entries, entry_poles })
    }

    pub fn siso(r: RationalFn, cfg: &NumericConfig) -> Result<Self> {
        Self::new(1, 1, vec![r], cfg)
    }

    pub fn zero(p: usize, m: usize, cfg: &NumericConfig) -> Result<Self> {
        Self::new(p, m, vec![RationalFn::zero(); p * m], cfg)
    }

    pub fn constant(k: &CMatrix, cfg: &NumericConfig) -> Result<Self> {
        let entries =
            (0..k.nrows()).flat_map(|i| (0..k.ncols()).map(move |j| (i, j))).map(|(i, j)| RationalFn::constant(k[(i, j)])).collect();
        Self::new(k.nrows(), k.ncols(), entries, cfg)
    }

    pub fn from_fn(p: usize, m: usize, cfg: &NumericConfig, mut f: impl FnMut(usize, usize) -> RationalFn) -> Result<Self> {
        let mut entries = Vec::with_capacity(p * m);
        for i in 0..p {
            for j in 0..m {
                entries.push(f(i, j));
            }
        }
        Self::new(p, m, entries, cfg)
    }

    pub fn rows(&self) -> usize {
        self.p
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalFn {
        &self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[RationalFn] {
        &self.entries
    }

    pub fn is_siso(&self) -> bool {
        self.p == 1 && self.m == 1
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        let mut poles = Vec::with_capacity(self.entries.len());
        for j in 0..self.m {
            for i in 0..self.p {
                entries.push(self.entry(i, j).clone());
                poles.push(self.entry_poles[i * self.m + j].clone());
            }
        }
        Self { p: self.m, m: self.p, entries, entry_poles: poles }
    }

    /// Entry-wise evaluation, rejecting points within `tol_root` of a pole.
    pub fn eval(&self, z: Complex64, cfg: &NumericConfig) -> Result<CMatrix> {
        for (idx, poles) in self.entry_poles.iter().enumerate() {
            if poles.iter().any(|pz| (pz - z).norm() <= cfg.tol_root * pz.norm().max(1.0)) {
                return Err(Error::PoleProximity { row: idx / self.m, col: idx % self.m, z });
            }
        }
        Ok(CMatrix::from_fn(self.p, self.m, |i, j| self.entry(i, j).eval(z)))
    }

    /// Poles of every entry (not the McMillan poles; see [`poles`]).
    pub(crate) fn entry_poles(&self, i: usize, j: usize) -> &[Complex64] {
        &self.entry_poles[i * self.m + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Right,
    Left,
}

/// Polynomial matrix fraction `Np Dp^{-1}` (right) together with the roots of
/// `det Dp`, which are tracked through every reduction step.
#[derive(Debug, Clone)]
pub struct PolyMatrixFraction {
    pub np: PolyMatrix,
    pub dp: PolyMatrix,
    pub side: Side,
    pub coprime: bool,
    det_roots: Vec<Complex64>,
}

impl PolyMatrixFraction {
    pub fn new(np: PolyMatrix, dp: PolyMatrix, side: Side, cfg: &NumericConfig) -> Result<Self> {
        if dp.rows() != dp.cols() || np.cols() != dp.cols() {
            return Err(Error::DimensionMismatch("Np and Dp are not conformable".into()));
        }
        let det = dp.det()?;
        if det.trim_relative(1e-13).is_zero() {
            return Err(Error::Domain("det(Dp) is identically zero".into()));
        }
        let det_roots = if dp.is_diagonal() {
            let mut roots = Vec::new();
            for i in 0..dp.rows() {
                let d = dp.get(i, i);
                if !d.is_constant() {
                    roots.extend(d.roots(cfg)?);
                }
            }
            roots
        } else {
            let det = det.trim_relative(1e-13);
            if det.is_constant() {
                Vec::new()
            } else {
                det.roots(cfg)?
            }
        };
        Ok(Self { np, dp, side, coprime: false, det_roots })
    }

    pub fn det_roots(&self) -> &[Complex64] {
        &self.det_roots
    }

    /// `Np(z) Dp(z)^{-1}`.
    pub fn eval(&self, z: Complex64) -> Option<CMatrix> {
        let d = self.dp.eval(z).try_inverse()?;
        Some(self.np.eval(z) * d)
    }

    fn stacked_at(&self, z: Complex64) -> CMatrix {
        let n = self.np.eval(z);
        let d = self.dp.eval(z);
        let (p, m) = (n.nrows(), n.ncols());
        CMatrix::from_fn(p + m, m, |i, j| if i < p { n[(i, j)] } else { d[(i - p, j)] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoprimeReport {
    pub ok: bool,
    /// `(root of det Dp, relative sigma_min of [Np; Dp] there)`.
    pub witnesses: Vec<(Complex64, f64)>,
}

/// Smallest singular value of `m` relative to `max(1, sigma_max)`, with the
/// matching right singular vector.
fn min_singular(m: &CMatrix) -> (f64, nalgebra::DVector<Complex64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (imin, smin) = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, &s)| (i, s)).unwrap_or((0, 0.0));
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let v = v_t.row(imin).adjoint();
    (smin / smax.max(1.0), v)
}

pub fn check_right_coprime(f: &PolyMatrixFraction, cfg: &NumericConfig) -> Result<CoprimeReport> {
    if f.side != Side::Right {
        return Err(Error::Domain("coprimeness check expects a right fraction".into()));
    }
    let witnesses: Vec<(Complex64, f64)> = f.det_roots.iter().map(|&z| (z, min_singular(&f.stacked_at(z)).0)).collect();
    let ok = witnesses.iter().all(|&(_, s)| s >= cfg.tol_rank);
    Ok(CoprimeReport { ok, witnesses })
}

/// Unitary matrix whose first column is `v` (unit norm).
fn unitary_with_first_column(v: &nalgebra::DVector<Complex64>) -> CMatrix {
    let n = v.len();
    let pivot = v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(i, _)| i).unwrap_or(0);
    let mut basis = CMatrix::zeros(n, n);
    basis.set_column(0, v);
    let mut col = 1;
    for k in 0..n {
        if k != pivot {
            basis[(k, col)] = Complex64::new(1.0, 0.0);
            col += 1;
        }
    }
    let q = QR::new(basis).q();
    // QR may rotate the first column by a phase; undo it so Q e1 = v exactly
    let phase = (0..n).map(|i| q[(i, 0)].conj() * v[i]).sum::<Complex64>();
    let mut q = q;
    let scaled = q.column(0) * phase;
    q.set_column(0, &scaled);
    q
}

/// Removes common right divisors one root at a time: at a root `z0` of
/// `det Dp` where `[Np; Dp](z0)` loses rank with null vector `v`, right
/// multiplication by a unitary `Q` with `Q e1 = v` makes the first column of
/// both factors divisible by `z - z0`.
pub fn gcrd_reduce(f: &PolyMatrixFraction, cfg: &NumericConfig) -> Result<PolyMatrixFraction> {
    if f.side != Side::Right {
        return Err(Error::Domain("gcrd reduction expects a right fraction".into()));
    }
    let mut out = f.clone();
    let mut idx = 0;
    while idx < out.det_roots.len() {
        let z0 = out.det_roots[idx];
        let (sigma, v) = min_singular(&out.stacked_at(z0));
        if sigma >= 10.0 * cfg.tol_rank {
            idx += 1;
            continue;
        }
        if sigma > cfg.tol_rank / 10.0 {
            return Err(Error::AmbiguousRank { z: z0, sigma, threshold: cfg.tol_rank });
        }
        let q = unitary_with_first_column(&v);
        let mut np = out.np.mul_constant(&q);
        let mut dp = out.dp.mul_constant(&q);
        for i in 0..np.rows() {
            let reduced = np.get(i, 0).deflate(z0).0;
            np.set(i, 0, reduced);
        }
        for i in 0..dp.rows() {
            let reduced = dp.get(i, 0).deflate(z0).0;
            dp.set(i, 0, reduced);
        }
        out.np = np;
        out.dp = dp;
        out.det_roots.remove(idx);
        // recheck the same position: the next root may coincide with z0
    }
    out.coprime = check_right_coprime(&out, cfg)?.ok;
    Ok(out)
}

/// Right MFD with `Dp = diag(lcm of column denominators)`, then reduced to a
/// coprime fraction.
pub fn build_rmfd(p: &TransferMatrix, cfg: &NumericConfig) -> Result<PolyMatrixFraction> {
    let (rows, cols) = (p.rows(), p.cols());
    let mut np = PolyMatrix::zeros(rows, cols);
    let mut dp = PolyMatrix::zeros(cols, cols);
    let mut det_roots = Vec::new();
    for j in 0..cols {
        let mut lcm: Vec<Complex64> = Vec::new();
        for i in 0..rows {
            let roots = p.entry_poles(i, j);
            // roots not already present in the lcm (by multiplicity) are added
            let mut used = vec![false; lcm.len()];
            let mut fresh = Vec::new();
            for &r in roots {
                let hit =
                    lcm.iter().enumerate().filter(|(k, _)| !used[*k]).find(|(_, l)| (r - **l).norm() <= cfg.tol_root * r.norm().max(1.0));
                match hit {
                    Some((k, _)) => used[k] = true,
                    None => fresh.push(r),
                }
            }
            lcm.extend(fresh);
        }
        for i in 0..rows {
            let e = p.entry(i, j);
            let roots = p.entry_poles(i, j);
            let mut used = vec![false; roots.len()];
            let cofactor_roots: Vec<Complex64> = lcm
                .iter()
                .copied()
                .filter(|l| {
                    let hit = roots.iter().enumerate().find(|(k, r)| !used[*k] && (*l - **r).norm() <= cfg.tol_root * l.norm().max(1.0));
                    match hit {
                        Some((k, _)) => {
                            used[k] = true;
                            false
                        }
                        None => true,
                    }
                })
                .collect();
            let cofactor = Polynomial::from_roots(&cofactor_roots, e.den().lead());
            np.set(i, j, e.num() * &cofactor);
        }
        dp.set(j, j, Polynomial::from_roots(&lcm, Complex64::new(1.0, 0.0)));
        det_roots.extend(lcm);
    }
    let raw = PolyMatrixFraction { np, dp, side: Side::Right, coprime: false, det_roots };
    gcrd_reduce(&raw, cfg)
}

/// Poles of `P` with multiplicity: the roots of `det Dp` of a coprime right MFD.
pub fn poles(p: &TransferMatrix, cfg: &NumericConfig) -> Result<Vec<Complex64>> {
    Ok(build_rmfd(p, cfg)?.det_roots)
}
