//! Dense vectors and linear operators over the reals.
//!
//! Everything here is small and allocation-happy on purpose: the solvers in
//! this crate target desk-scale instances where a `Vec<f64>` per step is
//! negligible next to the resolvent evaluations.

use std::fmt;
use std::ops::{Add, Deref, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance for [`LinearOp::gram_norm`].
pub const GRAM_NORM_TOL: f64 = 1e-10;
/// Default iteration cap for [`LinearOp::gram_norm`].
pub const GRAM_NORM_MAX_ITER: usize = 5000;
/// Multiplier applied to power-iteration estimates before they bound a step size.
pub const L_SAFETY_FACTOR: f64 = 1.01;

const BREAKDOWN_NORM: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinopError {
    #[error("{context}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix shape {rows}x{cols} does not match {len} data entries")]
    BadShape { rows: usize, cols: usize, len: usize },
}

/// An element of R^n.
#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn filled(n: usize, value: f64) -> Self {
        Vector(vec![value; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&v| f(v)).collect())
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    /// `a * self + b * other`
    pub fn lincomb(&self, a: f64, b: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    /// Concatenates blocks into one vector.
    pub fn concat<'a>(blocks: impl IntoIterator<Item = &'a Vector>) -> Vector {
        Vector(blocks.into_iter().flat_map(|b| b.0.iter().copied()).collect())
    }

    pub fn slice(&self, start: usize, len: usize) -> Vector {
        Vector(self.0[start..start + len].to_vec())
    }

    pub(crate) fn check_dim(&self, expected: usize, context: &'static str) -> Result<(), LinopError> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(LinopError::DimensionMismatch {
                context,
                expected,
                found: self.dim(),
            })
        }
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.add_scaled(-1.0, rhs)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// A dense `rows x cols` matrix stored row-major, acting as a bounded linear
/// operator from R^cols to R^rows.
#[derive(Clone, PartialEq)]
pub struct LinearOp {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for LinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_struct("LinearOp")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &rows)
            .finish()
    }
}

/// Result of a power-iteration estimate of `‖A*A‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramNorm {
    pub estimate: f64,
    pub iterations: usize,
    /// `false` when `max_iter` ran out before the tolerance was met; the
    /// estimate is then the last Rayleigh quotient.
    pub converged: bool,
}

impl GramNorm {
    /// The estimate inflated by [`L_SAFETY_FACTOR`]; power iteration only
    /// ever approaches the true value from below.
    pub fn safe(&self) -> f64 {
        self.estimate * L_SAFETY_FACTOR
    }
}

impl LinearOp {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinopError> {
        if data.len() != rows * cols {
            return Err(LinopError::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(LinearOp { rows, cols, data })
    }

    /// Builds an operator from a list of equally long rows.
    ///
    /// # Panics
    /// If the rows are ragged or empty.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        LinearOp {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        LinearOp { rows: n, cols: n, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        LinearOp {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = *v;
        }
        LinearOp { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, s: f64) -> LinearOp {
        LinearOp {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn transpose(&self) -> LinearOp {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        LinearOp {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `A x`.
    pub fn apply(&self, x: &Vector) -> Result<Vector, LinopError> {
        x.check_dim(self.cols, "apply")?;
        Ok(self.apply_unchecked(x))
    }

    /// `A* y`, i.e. `Aᵀ y` for real matrices.
    pub fn adjoint_apply(&self, y: &Vector) -> Result<Vector, LinopError> {
        y.check_dim(self.rows, "adjoint_apply")?;
        Ok(self.adjoint_apply_unchecked(y))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector) -> Vector {
        let mut out = vec![0.0; self.rows];
        self.apply_into(x, &mut out);
        Vector::from(out)
    }

    pub(crate) fn adjoint_apply_unchecked(&self, y: &Vector) -> Vector {
        let mut out = vec![0.0; self.cols];
        self.adjoint_accumulate(y, 1.0, &mut out);
        Vector::from(out)
    }

    /// `out = A x`; lengths are not checked.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `out += s · A* y`; lengths are not checked.
    pub(crate) fn adjoint_accumulate(&self, y: &[f64], s: f64, out: &mut [f64]) {
        for (i, yi) in y.iter().enumerate() {
            if *yi == 0.0 {
                continue;
            }
            let w = s * yi;
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * w;
            }
        }
    }

    /// Estimates `L = ‖A*A‖` (the squared spectral norm) by power iteration
    /// on `A*A`, stopping once the relative change of the Rayleigh quotient
    /// drops to `tol`.
    ///
    /// Rayleigh quotients of a symmetric PSD matrix never exceed its largest
    /// eigenvalue, so the estimate is a lower bound; see [`GramNorm::safe`].
    pub fn gram_norm(&self, tol: f64, max_iter: usize) -> GramNorm {
        if self.is_zero() || self.cols == 0 {
            return GramNorm {
                estimate: 0.0,
                iterations: 0,
                converged: true,
            };
        }
        let n = self.cols;
        let mut restarts = 0usize;
        let mut v = start_vector(n, restarts);
        let mut last = 0.0;
        for it in 1..=max_iter {
            let w = self.adjoint_apply_unchecked(&self.apply_unchecked(&v));
            let rq = v.dot(&w);
            let wn = w.norm();
            if wn < BREAKDOWN_NORM {
                // Start vector fell into the null space of A; nudge it.
                restarts += 1;
                v = start_vector(n, restarts);
                continue;
            }
            if it > 1 && (rq - last).abs() <= tol * rq.abs() {
                return GramNorm {
                    estimate: rq,
                    iterations: it,
                    converged: true,
                };
            }
            last = rq;
            v = w.scale(1.0 / wn);
        }
        GramNorm {
            estimate: last,
            iterations: max_iter,
            converged: false,
        }
    }

    /// [`gram_norm`](Self::gram_norm) with the default tolerance and cap.
    pub fn gram_norm_default(&self) -> GramNorm {
        self.gram_norm(GRAM_NORM_TOL, GRAM_NORM_MAX_ITER)
    }

    /// Stacks `p` copies of the `n1 x n1` identity on top of `ops`, giving
    /// `x ↦ (x, …, x, A₁x, …, A_r x)`.
    pub fn lift(p: usize, ops: &[LinearOp], n1: usize) -> Result<LinearOp, LinopError> {
        for op in ops {
            if op.cols != n1 {
                return Err(LinopError::DimensionMismatch {
                    context: "lift_operator",
                    expected: n1,
                    found: op.cols,
                });
            }
        }
        let rows = p * n1 + ops.iter().map(|o| o.rows).sum::<usize>();
        let mut data = Vec::with_capacity(rows * n1);
        for _ in 0..p {
            data.extend_from_slice(&LinearOp::identity(n1).data);
        }
        for op in ops {
            data.extend_from_slice(&op.data);
        }
        Ok(LinearOp {
            rows,
            cols: n1,
            data,
        })
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> LinearOp {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        LinearOp { rows, cols, data }
    }

    /// Smallest eigenvalue of the symmetric part `(A + Aᵀ)/2`.
    pub fn min_symmetric_eigenvalue(&self) -> Option<f64> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let m = self.to_nalgebra();
        let sym = (&m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigenvalues();
        eig.iter().copied().reduce(f64::min)
    }
}

/// Normalized start vector. Restart 0 is all-ones with a small irrational
/// tilt so it is not orthogonal to structured eigenvectors such as (1, -1);
/// later restarts use sign-mixed quasi-random entries.
fn start_vector(n: usize, restart: usize) -> Vector {
    const PHI: f64 = 0.618_033_988_749_894_9;
    let v: Vector = if restart == 0 {
        (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * PHI).fract())
            .collect::<Vec<f64>>()
            .into()
    } else {
        let step = PHI * std::f64::consts::SQRT_2 * restart as f64;
        (0..n)
            .map(|i| ((i as f64 + 1.0) * step).fract() - 0.5)
            .collect::<Vec<f64>>()
            .into()
    };
    let nrm = v.norm();
    v.scale(1.0 / nrm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_examples() {
        let x = Vector::from([3.0, 4.0]);
        assert_eq!(LinearOp::identity(2).apply(&x).unwrap(), x);
        assert_eq!(
            LinearOp::zeros(2, 2).apply(&x).unwrap(),
            Vector::from([0.0, 0.0])
        );
        let a = LinearOp::from_rows(&[&[2.0]]);
        assert_eq!(a.apply(&Vector::from([5.0])).unwrap(), Vector::from([10.0]));
    }

    #[test]
    fn adjoint_examples() {
        let shift = LinearOp::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(
            shift.adjoint_apply(&Vector::from([1.0, 0.0])).unwrap(),
            Vector::from([0.0, 1.0])
        );
        let y = Vector::from([-1.5, 2.0]);
        assert_eq!(LinearOp::identity(2).adjoint_apply(&y).unwrap(), y);
        let r1 = LinearOp::from_rows(&[&[1.0, 2.0]]);
        assert_eq!(
            r1.adjoint_apply(&Vector::from([3.0])).unwrap(),
            Vector::from([3.0, 6.0])
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = LinearOp::from_rows(&[&[1.0, 2.0]]);
        let err = a.apply(&Vector::from([1.0])).unwrap_err();
        assert_eq!(
            err,
            LinopError::DimensionMismatch {
                context: "apply",
                expected: 2,
                found: 1
            }
        );
        assert!(a.adjoint_apply(&Vector::from([1.0, 1.0])).is_err());
        assert!(LinearOp::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn gram_norm_examples() {
        let g = LinearOp::identity(4).gram_norm_default();
        assert!(g.converged);
        assert!((g.estimate - 1.0).abs() < 1e-12);
        let d = LinearOp::diagonal(&[3.0, 1.0]).gram_norm_default();
        assert!((d.estimate - 9.0).abs() < 1e-8 * 9.0);
        assert_eq!(LinearOp::zeros(3, 2).gram_norm_default().estimate, 0.0);
    }

    #[test]
    fn gram_norm_survives_null_space_start() {
        // All-ones lies in the null space of this operator.
        let a = LinearOp::from_rows(&[&[1.0, -1.0]]);
        let g = a.gram_norm_default();
        assert!((g.estimate - 2.0).abs() < 1e-8, "{g:?}");
    }

    #[test]
    fn gram_norm_reports_exhaustion() {
        let a = LinearOp::diagonal(&[1.0, 0.999]);
        let g = a.gram_norm(1e-16, 3);
        assert!(!g.converged);
        assert_eq!(g.iterations, 3);
        assert!(g.estimate > 0.9 && g.estimate <= 1.0);
    }

    #[test]
    fn lift_examples() {
        assert_eq!(LinearOp::lift(1, &[], 2).unwrap(), LinearOp::identity(2));
        let two = LinearOp::from_rows(&[&[2.0]]);
        assert_eq!(LinearOp::lift(0, &[two.clone()], 1).unwrap(), two);
        let a = LinearOp::from_rows(&[&[1.0, 0.0]]);
        let lifted = LinearOp::lift(2, &[a], 2).unwrap();
        assert_eq!(lifted.rows(), 5);
        assert_eq!(
            lifted,
            LinearOp::from_rows(&[
                &[1.0, 0.0],
                &[0.0, 1.0],
                &[1.0, 0.0],
                &[0.0, 1.0],
                &[1.0, 0.0]
            ])
        );
        // Gram matrix 2I + aᵀa = diag(3, 2), largest eigenvalue 3.
        assert!((lifted.gram_norm_default().estimate - 3.0).abs() < 1e-9);
        let bad = LinearOp::from_rows(&[&[1.0]]);
        assert!(LinearOp::lift(1, &[bad], 2).is_err());
    }

    #[test]
    fn min_symmetric_eigenvalue_sees_skew_part_as_zero() {
        let skew = LinearOp::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(skew.min_symmetric_eigenvalue().unwrap().abs() < 1e-14);
        let neg = LinearOp::diagonal(&[1.0, -0.5]);
        assert!((neg.min_symmetric_eigenvalue().unwrap() + 0.5).abs() < 1e-14);
    }
}
