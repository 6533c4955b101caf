//! Complex polynomials and reduced scalar rational functions.
//!
//! Coefficients are stored in ascending order: `coeffs[k]` multiplies `z^k`.
//! Root finding goes through the eigenvalues of a balanced companion matrix
//! followed by a short Newton polish; gcds are computed by matching root
//! clusters rather than by a floating-point Euclidean algorithm.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::config::NumericConfig;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl Polynomial {
    /// Builds a polynomial, dropping exactly-zero leading coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = ONE;
        Self { coeffs }
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    /// Coefficients conjugated (not the para-conjugate).
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Drops leading coefficients smaller than `rel` times the largest one.
    pub fn trim_relative(&self, rel: f64) -> Self {
        let scale = self.coeff_norm();
        let mut coeffs = self.coeffs.clone();
        while let Some(c) = coeffs.last() {
            if c.norm() <= rel * scale {
                coeffs.pop();
            } else {
                break;
            }
        }
        Self::new(coeffs)
    }

    /// Divides out the linear factor `(z - root)` and returns the quotient and
    /// the magnitude of the discarded remainder. Forward deflation is used for
    /// roots inside the unit disk and backward deflation outside it.
    pub fn deflate(&self, root: Complex64) -> (Self, f64) {
        let n = self.degree();
        if self.coeffs.len() < 2 {
            return (Self::zero(), self.coeffs.first().map_or(0.0, |c| c.norm()));
        }
        let a = &self.coeffs;
        let mut q = vec![ZERO; n];
        let rem;
        if root.norm() <= 1.0 {
            q[n - 1] = a[n];
            for k in (1..n).rev() {
                q[k - 1] = a[k] + root * q[k];
            }
            rem = (a[0] + root * q[0]).norm();
        } else {
            q[0] = -a[0] / root;
            for k in 1..n {
                q[k] = (q[k - 1] - a[k]) / root;
            }
            rem = (a[n] - q[n - 1]).norm();
        }
        (Self::new(q), rem)
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::Domain("division by the zero polynomial".into()));
        }
        if self.coeffs.len() < divisor.coeffs.len() {
            return Ok((Self::zero(), self.clone()));
        }
        let dlen = divisor.coeffs.len();
        let lead = divisor.lead();
        let mut rem = self.coeffs.clone();
        let mut q = vec![ZERO; rem.len() - dlen + 1];
        for k in (0..q.len()).rev() {
            let c = rem[k + dlen - 1] / lead;
            q[k] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * d;
            }
            rem[k + dlen - 1] = ZERO;
        }
        rem.truncate(dlen - 1);
        Ok((Self::new(q), Self::new(rem)))
    }

    /// All `deg p` roots, with multiplicity.
    pub fn roots(&self, cfg: &NumericConfig) -> Result<Vec<Complex64>> {
        poly_roots(self, cfg)
    }

    /// Recovers the coefficients of a polynomial of degree at most
    /// `degree_bound` from its values on roots of unity.
    pub fn interpolate_on_circle<F>(degree_bound: usize, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64,
    {
        let n = (degree_bound + 1).next_power_of_two().max(8) * 2;
        let mut buf: Vec<Complex64> = (0..n).map(|j| f(Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))).collect();
        let fft = FftPlanner::new().plan_fft_forward(n);
        fft.process(&mut buf);
        let scale = 1.0 / n as f64;
        let mut coeffs: Vec<Complex64> = buf[..=degree_bound].iter().map(|c| c * scale).collect();
        let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        // aliasing-level noise in the upper coefficients
        for c in coeffs.iter_mut() {
            if c.norm() <= 1e-14 * peak {
                *c = ZERO;
            }
        }
        Self::new(coeffs)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeffs.get(k).copied().unwrap_or(ZERO) + rhs.coeffs.get(k).copied().unwrap_or(ZERO)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Parlett-Reinsch balancing with power-of-two scalings.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

pub fn poly_roots(p: &Polynomial, cfg: &NumericConfig) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Err(Error::Domain("roots of the zero polynomial".into()));
    }
    let _ = cfg;
    let c = p.coeffs();
    let zeros_at_origin = c.iter().take_while(|&&x| x == ZERO).count();
    let reduced = &c[zeros_at_origin..];
    let n = reduced.len() - 1;
    let mut roots = vec![ZERO; zeros_at_origin];
    match n {
        0 => {}
        1 => roots.push(-reduced[0] / reduced[1]),
        _ => {
            let lead = reduced[n];
            let mut comp = DMatrix::<Complex64>::zeros(n, n);
            for j in 0..n {
                comp[(0, j)] = -reduced[n - 1 - j] / lead;
            }
            for i in 1..n {
                comp[(i, i - 1)] = ONE;
            }
            balance(&mut comp);
            let eig = comp.schur().eigenvalues().ok_or_else(|| Error::Domain("companion eigenvalue solver failed".into()))?;
            let reduced_poly = Polynomial::new(reduced.to_vec());
            let deriv = reduced_poly.derivative();
            for &z0 in eig.iter() {
                roots.push(newton_polish(&reduced_poly, &deriv, z0));
            }
        }
    }
    Ok(roots)
}

fn newton_polish(p: &Polynomial, dp: &Polynomial, z0: Complex64) -> Complex64 {
    let mut z = z0;
    let mut fz = p.eval(z).norm();
    for _ in 0..3 {
        let d = dp.eval(z);
        if d == ZERO {
            break;
        }
        let cand = z - p.eval(z) / d;
        let fc = p.eval(cand).norm();
        if fc.is_finite() && fc < fz {
            z = cand;
            fz = fc;
        } else {
            break;
        }
    }
    z
}

/// Greedy matching of two root multisets; returns the averaged common roots.
pub(crate) fn match_roots(a: &[Complex64], b: &[Complex64], tol: f64) -> Vec<Complex64> {
    let mut used = vec![false; b.len()];
    let mut common = Vec::new();
    for &ra in a {
        let best = b.iter().enumerate().filter(|(j, _)| !used[*j]).map(|(j, &rb)| (j, (ra - rb).norm())).min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((j, d)) = best {
            if d <= tol * ra.norm().max(1.0) {
                used[j] = true;
                common.push((ra + b[j]) * 0.5);
            }
        }
    }
    common
}

/// Monic approximate gcd built from the common root clusters of `a` and `b`.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial, cfg: &NumericConfig) -> Result<Polynomial> {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => Err(Error::Domain("gcd of two zero polynomials".into())),
        (true, false) => Ok(b.scale(b.lead().inv())),
        (false, true) => Ok(a.scale(a.lead().inv())),
        _ => {
            if a.is_constant() || b.is_constant() {
                return Ok(Polynomial::one());
            }
            let common = match_roots(&a.roots(cfg)?, &b.roots(cfg)?, cfg.tol_root);
            Ok(Polynomial::from_roots(&common, ONE))
        }
    }
}

/// Minimal-degree solution of `x a + y b = 1` with `deg x < deg b` and
/// `deg y < deg a`, from the Sylvester system.
pub fn poly_bezout(a: &Polynomial, b: &Polynomial, cfg: &NumericConfig) -> Result<(Polynomial, Polynomial)> {
    if a.is_zero() || b.is_zero() {
        let nz = if a.is_zero() { b } else { a };
        if nz.is_constant() && !nz.is_zero() {
            let inv = Polynomial::constant(nz.lead().inv());
            return Ok(if a.is_zero() { (Polynomial::zero(), inv) } else { (inv, Polynomial::zero()) });
        }
        return Err(Error::NotCoprime { cluster: nz.roots(cfg).unwrap_or_default() });
    }
    let g = poly_gcd(a, b, cfg)?;
    if !g.is_constant() {
        return Err(Error::NotCoprime { cluster: g.roots(cfg)? });
    }
    let (na, nb) = (a.degree(), b.degree());
    if na == 0 {
        return Ok((Polynomial::constant(a.lead().inv()), Polynomial::zero()));
    }
    if nb == 0 {
        return Ok((Polynomial::zero(), Polynomial::constant(b.lead().inv())));
    }
    let n = na + nb;
    let mut sylv = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..nb {
        for (k, &c) in a.coeffs().iter().enumerate() {
            sylv[(i + k, i)] = c;
        }
    }
    for j in 0..na {
        for (k, &c) in b.coeffs().iter().enumerate() {
            sylv[(j + k, nb + j)] = c;
        }
    }
    let mut rhs = DVector::<Complex64>::zeros(n);
    rhs[0] = ONE;
    let sol = sylv.lu().solve(&rhs).ok_or_else(|| Error::NotCoprime { cluster: Vec::new() })?;
    let x = Polynomial::new(sol.rows(0, nb).iter().copied().collect());
    let y = Polynomial::new(sol.rows(nb, na).iter().copied().collect());
    let residual = (&(&x * a) + &(&y * b)) - Polynomial::one();
    let res = residual.coeff_norm();
    if res > cfg.tol_bezout {
        return Err(Error::CertificateNotFound { residual: res });
    }
    Ok((x, y))
}

/// Scalar rational function `num / den` with monic denominator and no common
/// root clusters between numerator and denominator.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFn {
    num: Polynomial,
    den: Polynomial,
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} / {:?}", self.num, self.den)
    }
}

impl RationalFn {
    pub fn new(num: Polynomial, den: Polynomial, cfg: &NumericConfig) -> Result<Self> {
        rational_simplify(&RationalFn { num, den }, cfg)
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self { num: p, den: Polynomial::one() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_polynomial(Polynomial::zero())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn poles(&self, cfg: &NumericConfig) -> Result<Vec<Complex64>> {
        self.den.roots(cfg)
    }
}

/// Cancels common root clusters and normalizes the denominator to be monic.
/// An already reduced input is returned coefficient-for-coefficient.
pub fn rational_simplify(r: &RationalFn, cfg: &NumericConfig) -> Result<RationalFn> {
    if r.den.is_zero() {
        return Err(Error::Domain("rational function with zero denominator".into()));
    }
    if r.num.is_zero() {
        return Ok(RationalFn::zero());
    }
    let (mut num, mut den) = (r.num.clone(), r.den.clone());
    if !num.is_constant() && !den.is_constant() {
        let common = match_roots(&num.roots(cfg)?, &den.roots(cfg)?, cfg.tol_root);
        for root in common {
            num = num.deflate(root).0;
            den = den.deflate(root).0;
        }
    }
    let lead = den.lead();
    if lead != ONE {
        let inv = lead.inv();
        num = num.scale(inv);
        den = den.scale(inv);
        // keep the leading coefficient exactly one
        if let Some(last) = den.coeffs.last_mut() {
            *last = ONE;
        }
    }
    Ok(RationalFn { num, den })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Polynomial {
        Polynomial::new((0..=deg).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let cfg = NumericConfig::default();
        let r = sorted_re(Polynomial::from_real(&[-1.0, 0.0, 1.0]).roots(&cfg).unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-12);
        let r = Polynomial::from_real(&[-0.5, 1.0]).roots(&cfg).unwrap();
        assert_eq!(r, vec![c(0.5, 0.0)]);
    }

    #[test]
    fn roots_of_zero_polynomial_is_an_error() {
        assert!(matches!(Polynomial::zero().roots(&NumericConfig::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn random_degree_eight_roots_have_small_residual() {
        let cfg = NumericConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let p = random_poly(&mut rng, 8);
            let roots = p.roots(&cfg).unwrap();
            assert_eq!(roots.len(), 8);
            for r in roots {
                let bound = 1e-8 * p.coeff_norm() * r.norm().max(1.0).powi(8);
                assert!(p.eval(r).norm() <= bound, "residual {} at {r}", p.eval(r).norm());
            }
        }
    }

    #[test]
    fn gcd_examples() {
        let cfg = NumericConfig::default();
        let g = poly_gcd(&Polynomial::from_real(&[-1.0, 0.0, 1.0]), &Polynomial::from_real(&[-1.0, 1.0]), &cfg).unwrap();
        assert!((g.coeffs()[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(g.degree(), 1);

        let g = poly_gcd(&Polynomial::from_real(&[-2.0, 1.0]), &Polynomial::from_real(&[-3.0, 1.0]), &cfg).unwrap();
        assert_eq!(g, Polynomial::one());

        let a = Polynomial::from_roots(&[c(2.0, 0.0), c(3.0, 0.0)], ONE);
        let b = Polynomial::from_roots(&[c(3.0, 0.0), c(4.0, 0.0)], ONE);
        let g = poly_gcd(&a, &b, &cfg).unwrap();
        assert_eq!(g.degree(), 1);
        for p in [&a, &b] {
            let (_, rem) = p.div_rem(&g).unwrap();
            assert!(rem.coeff_norm() <= cfg.tol_div);
        }
        assert!((g.eval(c(3.0, 0.0))).norm() < 1e-10);
    }

    #[test]
    fn gcd_of_two_zeros_is_an_error() {
        let cfg = NumericConfig::default();
        assert!(poly_gcd(&Polynomial::zero(), &Polynomial::zero(), &cfg).is_err());
    }

    #[test]
    fn bezout_examples() {
        let cfg = NumericConfig::default();
        let (x, y) = poly_bezout(&Polynomial::one(), &Polynomial::monomial(1), &cfg).unwrap();
        assert_eq!(x, Polynomial::one());
        assert!(y.is_zero());

        // (z - 2) - (z - 3) = 1
        let (x, y) = poly_bezout(&Polynomial::from_real(&[-2.0, 1.0]), &Polynomial::from_real(&[-3.0, 1.0]), &cfg).unwrap();
        assert!((x.coeffs()[0] - ONE).norm() < 1e-12 && x.degree() == 0);
        assert!((y.coeffs()[0] + ONE).norm() < 1e-12 && y.degree() == 0);
    }

    #[test]
    fn bezout_rejects_common_roots() {
        let cfg = NumericConfig::default();
        let a = Polynomial::from_roots(&[c(0.5, 0.0), c(2.0, 0.0)], ONE);
        let b = Polynomial::from_roots(&[c(0.5, 0.0), c(-3.0, 1.0)], ONE);
        match poly_bezout(&a, &b, &cfg) {
            Err(Error::NotCoprime { cluster }) => {
                assert_eq!(cluster.len(), 1);
                assert!((cluster[0] - c(0.5, 0.0)).norm() < 1e-9);
            }
            other => panic!("expected NotCoprime, got {other:?}"),
        }
    }

    #[test]
    fn bezout_random_pairs_meet_residual_bound() {
        let cfg = NumericConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let da = rng.random_range(1..=10);
            let db = rng.random_range(1..=10);
            let a = random_poly(&mut rng, da);
            let b = random_poly(&mut rng, db);
            let (x, y) = poly_bezout(&a, &b, &cfg).unwrap();
            assert!(x.degree() < b.degree() || x.is_zero());
            assert!(y.degree() < a.degree() || y.is_zero());
            let res = (&(&x * &a) + &(&y * &b)) - Polynomial::one();
            assert!(res.coeff_norm() <= cfg.tol_bezout, "residual {}", res.coeff_norm());
        }
    }

    #[test]
    fn simplify_examples() {
        let cfg = NumericConfig::default();
        let r = RationalFn::new(Polynomial::from_real(&[-1.0, 0.0, 1.0]), Polynomial::from_real(&[-1.0, 1.0]), &cfg).unwrap();
        assert_eq!(r.den(), &Polynomial::one());
        assert!((r.num().coeffs()[0] - ONE).norm() < 1e-12);
        assert!((r.num().coeffs()[1] - ONE).norm() < 1e-12);

        let r = RationalFn::new(Polynomial::from_real(&[0.0, 2.0]), Polynomial::from_real(&[2.0]), &cfg).unwrap();
        assert_eq!(r.num(), &Polynomial::monomial(1));
        assert_eq!(r.den(), &Polynomial::one());

        let num = Polynomial::from_roots(&[c(0.3, 0.0), c(2.0, 0.0)], ONE);
        let den = Polynomial::from_roots(&[c(0.3, 0.0), c(5.0, 0.0)], ONE);
        let r = RationalFn::new(num.clone(), den.clone(), &cfg).unwrap();
        assert_eq!(r.den().degree(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..16 {
            let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let want = num.eval(z) / den.eval(z);
            assert!((r.eval(z) - want).norm() <= 1e-9 * want.norm());
        }
    }

    #[test]
    fn simplify_rejects_zero_denominator() {
        let cfg = NumericConfig::default();
        assert!(RationalFn::new(Polynomial::one(), Polynomial::zero(), &cfg).is_err());
    }

    #[test]
    fn deflation_is_exact_on_planted_roots() {
        for root in [c(0.3, -0.2), c(4.0, 1.0)] {
            let p = Polynomial::from_roots(&[root, c(1.5, 0.5), c(-0.7, 0.0)], c(2.0, 0.0));
            let (q, rem) = p.deflate(root);
            assert!(rem < 1e-12);
            assert_eq!(q.degree(), 2);
            assert!((q.eval(c(1.5, 0.5))).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let p = Polynomial::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(0.25, -1.0)]);
        let q = Polynomial::interpolate_on_circle(5, |z| p.eval(z));
        assert_eq!(q.degree(), 3);
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
