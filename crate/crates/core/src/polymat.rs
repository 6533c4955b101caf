//! Dense polynomial matrices and rational matrices with a shared denominator.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::polyalg::Polynomial;
use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Polynomial::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.set(i, i, Polynomial::one());
        }
        out
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Polynomial) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Constant polynomial matrix.
    pub fn from_constant(m: &CMatrix) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| Polynomial::constant(m[(i, j)]))
    }

    /// Builds a polynomial matrix from its matrix coefficients `A_0, A_1, ...`.
    pub fn from_coefficients(rows: usize, cols: usize, coeffs: &[CMatrix]) -> Self {
        Self::from_fn(rows, cols, |i, j| Polynomial::new(coeffs.iter().map(|c| c[(i, j)]).collect()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.data[i * self.cols + j] = p;
    }

    pub fn max_degree(&self) -> usize {
        self.data.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn col_degree(&self, j: usize) -> usize {
        (0..self.rows).map(|i| self.get(i, j).degree()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Polynomial::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Matrix coefficients `A_0 ..= A_deg`.
    pub fn coefficients(&self) -> Vec<CMatrix> {
        let deg = self.max_degree();
        (0..=deg)
            .map(|k| CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).coeffs().get(k).copied().unwrap_or_default()))
            .collect()
    }

    pub fn eval(&self, z: Complex64) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(z))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).scale(s))
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(Polynomial::zero(), |acc, k| &acc + &(self.get(i, k) * rhs.get(k, j)))
        }))
    }

    pub fn mul_constant(&self, rhs: &CMatrix) -> Self {
        Self::from_fn(self.rows, rhs.ncols(), |i, j| {
            (0..self.cols).fold(Polynomial::zero(), |acc, k| &acc + &self.get(i, k).scale(rhs[(k, j)]))
        })
    }

    pub fn vstack(&self, below: &PolyMatrix) -> Result<Self> {
        if self.cols != below.cols {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        Ok(Self::from_fn(self.rows + below.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                below.get(i - self.rows, j).clone()
            }
        }))
    }

    pub fn hstack(&self, right: &PolyMatrix) -> Result<Self> {
        if self.rows != right.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + right.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                right.get(i, j - self.cols).clone()
            }
        }))
    }

    /// Upper bound on the degree of the determinant.
    fn det_degree_bound(&self) -> usize {
        let by_cols: usize = (0..self.cols).map(|j| self.col_degree(j)).sum();
        let by_rows: usize = (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).degree()).max().unwrap_or(0)).sum();
        by_cols.min(by_rows)
    }

    /// Determinant of a square polynomial matrix, interpolated on the circle.
    pub fn det(&self) -> Result<Polynomial> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        if self.rows == 0 {
            return Ok(Polynomial::one());
        }
        if self.is_diagonal() {
            return Ok((0..self.rows).fold(Polynomial::one(), |acc, i| &acc * self.get(i, i)));
        }
        Ok(Polynomial::interpolate_on_circle(self.det_degree_bound(), |z| self.eval(z).determinant()))
    }

    /// Adjugate `adj(A)` with `A adj(A) = det(A) I`, built from cofactors
    /// interpolated on the circle.
    pub fn adjugate(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(Self::identity(1));
        }
        let bound = self.max_degree() * (n - 1);
        Ok(Self::from_fn(n, n, |i, j| {
            // adj[i][j] = (-1)^{i+j} det(minor without row j, column i)
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            Polynomial::interpolate_on_circle(bound, |z| {
                let full = self.eval(z);
                let minor = full.remove_row(j).remove_column(i);
                minor.determinant() * sign
            })
        }))
    }
}

/// Matrix of rational functions sharing one monic denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMatrix {
    pub num: PolyMatrix,
    pub den: Polynomial,
}

impl RationalMatrix {
    pub fn new(num: PolyMatrix, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("rational matrix with zero denominator".into()));
        }
        let lead = den.lead();
        if lead == Complex64::new(1.0, 0.0) {
            return Ok(Self { num, den });
        }
        let inv = lead.inv();
        Ok(Self { num: num.scale(inv), den: den.scale(inv) })
    }

    pub fn polynomial(num: PolyMatrix) -> Self {
        Self { num, den: Polynomial::one() }
    }

    pub fn identity(n: usize) -> Self {
        Self::polynomial(PolyMatrix::identity(n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::polynomial(PolyMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.num.rows()
    }

    pub fn cols(&self) -> usize {
        self.num.cols()
    }

    pub fn eval(&self, z: Complex64) -> CMatrix {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn eval_theta(&self, theta: f64) -> CMatrix {
        self.eval(Complex64::from_polar(1.0, theta))
    }

    pub fn transpose(&self) -> Self {
        Self { num: self.num.transpose(), den: self.den.clone() }
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    fn common_form(&self, other: &RationalMatrix) -> (PolyMatrix, PolyMatrix, Polynomial) {
        if self.den == other.den {
            (self.num.clone(), other.num.clone(), self.den.clone())
        } else {
            let a =
                self.num.mul(&PolyMatrix::from_fn(
                    self.cols(),
                    self.cols(),
                    |i, j| {
                        if i == j {
                            other.den.clone()
                        } else {
                            Polynomial::zero()
                        }
                    },
                ));
            let b =
                other.num.mul(&PolyMatrix::from_fn(
                    other.cols(),
                    other.cols(),
                    |i, j| {
                        if i == j {
                            self.den.clone()
                        } else {
                            Polynomial::zero()
                        }
                    },
                ));
            (a.expect("square scaling"), b.expect("square scaling"), &self.den * &other.den)
        }
    }

    pub fn vstack(&self, below: &RationalMatrix) -> Result<Self> {
        let (a, b, den) = self.common_form(below);
        Self::new(a.vstack(&b)?, den)
    }

    pub fn hstack(&self, right: &RationalMatrix) -> Result<Self> {
        let (a, b, den) = self.common_form(right);
        Self::new(a.hstack(&b)?, den)
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self> {
        Self::new(self.num.mul(&rhs.num)?, &self.den * &rhs.den)
    }
}
