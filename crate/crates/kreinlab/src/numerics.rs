//! Dense complex matrix kernel: solve, determinant, eigendecompositions, norms.
//!
//! Every other module builds on the contracts exposed here. Factorizations are
//! delegated to `faer`; the log-scaled determinant is computed by a pivoted
//! elimination so that secular scans over wide intervals cannot overflow.

use faer::complex_native::c64;
use faer::prelude::*;
use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// rcond threshold below which a matrix is treated as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// Dense row-major complex matrix. Entries are validated to be finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let rows = raw.len();
        let cols = raw.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows * cols);
        for row in &raw {
            if row.len() != cols {
                return Err(Error::ShapeMismatch("ragged matrix rows".into()));
            }
            for &[re, im] in row {
                data.push(Complex64::new(re, im));
            }
        }
        ComplexMatrix::new(rows, cols, data)
    }
}

impl From<ComplexMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(m: ComplexMatrix) -> Self {
        (0..m.rows)
            .map(|i| (0..m.cols).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..rows * cols)
            .map(|k| f(k / cols, k % cols))
            .collect();
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::ZERO
            }
        })
    }

    /// Column vector from a slice.
    pub fn col_vec(values: &[Complex64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of A - B.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(self.rows, self.cols, |i, j| {
            let z = self[(i, j)];
            c64::new(z.re, z.im)
        })
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, c64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| {
            let z = m.read(i, j);
            Complex64::new(z.re, z.im)
        })
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Log-scaled determinant: det = phase * exp(log_modulus).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LogDet {
    pub log_modulus: f64,
    #[serde(with = "complex_pair")]
    pub phase: Complex64,
}

impl LogDet {
    /// Sign-carrying real proxy, exp-clamped so wide secular scans stay finite.
    pub fn real_proxy(&self) -> f64 {
        let sign = if self.phase.re >= 0.0 { 1.0 } else { -1.0 };
        sign * self.log_modulus.clamp(-700.0, 700.0).exp()
    }
}

/// Solve A X = B for square A. Fails when A is singular per the rcond test.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "solve: A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (smin, smax) = singular_value_extremes(a);
    if smin <= RCOND_THRESHOLD * smax {
        return Err(Error::Singular {
            rcond: RCOND_THRESHOLD,
        });
    }
    let lu = a.to_faer().partial_piv_lu();
    let x = lu.solve(&b.to_faer());
    Ok(ComplexMatrix::from_faer(x.as_ref()))
}

/// Inverse of a square matrix via `solve` against the identity.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// Log-scaled determinant from a partially pivoted triangular elimination.
/// A zero pivot yields log_modulus = -inf with phase 1.
pub fn log_det(a: &ComplexMatrix) -> Result<LogDet> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("log_det requires a square matrix".into()));
    }
    let n = a.rows();
    let mut w = a.clone();
    let mut log_modulus = 0.0f64;
    let mut phase = Complex64::ONE;
    for k in 0..n {
        // partial pivoting on column k
        let (piv, piv_abs) = (k..n)
            .map(|i| (i, w[(i, k)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if piv_abs == 0.0 {
            return Ok(LogDet {
                log_modulus: f64::NEG_INFINITY,
                phase: Complex64::ONE,
            });
        }
        if piv != k {
            for j in 0..n {
                let t = w[(k, j)];
                w[(k, j)] = w[(piv, j)];
                w[(piv, j)] = t;
            }
            phase = -phase;
        }
        let p = w[(k, k)];
        log_modulus += p.norm().ln();
        phase *= p / p.norm();
        for i in k + 1..n {
            let factor = w[(i, k)] / p;
            for j in k..n {
                let sub = factor * w[(k, j)];
                w[(i, j)] -= sub;
            }
        }
    }
    Ok(LogDet { log_modulus, phase })
}

/// Hermitian eigendecomposition with ascending real eigenvalues.
pub fn eig_hermitian(a: &ComplexMatrix, tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("eig_hermitian requires a square matrix".into()));
    }
    if !is_hermitian(a, tol) {
        return Err(Error::NotHermitian(format!(
            "deviation {:e} exceeds tol {:e} x norm",
            a.distance(&a.adjoint()),
            tol
        )));
    }
    // Symmetrize so the factorization sees an exactly Hermitian input.
    let h = (a + &a.adjoint()).scale(Complex64::new(0.5, 0.0));
    let evd = h.to_faer().selfadjoint_eigendecomposition(Side::Lower);
    let n = a.rows();
    let u = ComplexMatrix::from_faer(evd.u());
    let mut pairs: Vec<(f64, usize)> = (0..n)
        .map(|i| (evd.s().column_vector().read(i).re, i))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| u[(i, pairs[j].1)]);
    Ok((eigenvalues, vectors))
}

/// Eigenvalue multiset of a general square complex matrix.
pub fn eig_general(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("eig_general requires a square matrix".into()));
    }
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    let ev: Vec<c64> = a.to_faer().eigenvalues();
    let out: Vec<Complex64> = ev.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoConvergence);
    }
    Ok(out)
}

fn singular_value_extremes(a: &ComplexMatrix) -> (f64, f64) {
    if a.rows() == 0 || a.cols() == 0 {
        return (0.0, 0.0);
    }
    let svd = a.to_faer().svd();
    let s = svd.s_diagonal();
    let k = s.nrows();
    (s.read(k - 1).re, s.read(0).re)
}

/// All singular values, descending.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let svd = a.to_faer().svd();
    let s = svd.s_diagonal();
    (0..s.nrows()).map(|i| s.read(i).re).collect()
}

pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    singular_value_extremes(a).1
}

pub fn smallest_singular_value(a: &ComplexMatrix) -> f64 {
    singular_value_extremes(a).0
}

/// Reciprocal condition number smin/smax; 0 for an empty matrix.
pub fn rcond(a: &ComplexMatrix) -> f64 {
    let (smin, smax) = singular_value_extremes(a);
    if smax == 0.0 {
        0.0
    } else {
        smin / smax
    }
}

/// Serde adapter storing a complex scalar as the two-element array [re, im].
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Inner product (x, y) = sum x_i conj(y_i), linear in the first argument.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> bool {
    a.is_square() && a.distance(&a.adjoint()) <= tol * a.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// Orthonormal basis of the numerical null space of A (right singular vectors
/// whose singular values fall below tol x smax). Returns a cols x k matrix.
pub fn null_space(a: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let fa = a.to_faer();
    let svd = fa.svd();
    let s = svd.s_diagonal();
    let smax = if s.nrows() > 0 { s.read(0).re } else { 0.0 };
    let v = ComplexMatrix::from_faer(svd.v());
    let rank_cut = (0..s.nrows())
        .filter(|&i| s.read(i).re > tol * smax.max(f64::MIN_POSITIVE))
        .count();
    ComplexMatrix::from_fn(a.cols(), a.cols() - rank_cut, |i, j| v[(i, rank_cut + j)])
}

/// Orthonormal basis of right singular vectors with singular value below
/// the absolute threshold `cut`. Unlike `null_space`, the cut does not
/// scale with `A` itself, so a fully vanishing matrix has a full kernel.
pub fn null_space_abs(a: &ComplexMatrix, cut: f64) -> ComplexMatrix {
    let fa = a.to_faer();
    let svd = fa.svd();
    let s = svd.s_diagonal();
    let v = ComplexMatrix::from_faer(svd.v());
    let rank = (0..s.nrows()).filter(|&i| s.read(i).re >= cut).count();
    ComplexMatrix::from_fn(a.cols(), a.cols() - rank, |i, j| v[(i, rank + j)])
}

/// Orthonormal basis of the column span of A via QR (thin Q).
pub fn orthonormalize(a: &ComplexMatrix) -> ComplexMatrix {
    if a.cols() == 0 {
        return a.clone();
    }
    let qr = a.to_faer().qr();
    let q = qr.compute_thin_q();
    ComplexMatrix::from_faer(q.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let v = ComplexMatrix::col_vec(&[c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]);
        let x = solve(&ComplexMatrix::identity(3), &v).unwrap();
        assert!(x.distance(&v) < 1e-14);
    }

    #[test]
    fn solve_diagonal() {
        let a = ComplexMatrix::diag(&[2.0, 4.0]);
        let b = ComplexMatrix::col_vec(&[c(1.0, 0.0), c(1.0, 0.0)]);
        let x = solve(&a, &b).unwrap();
        assert!((x[(0, 0)] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((x[(1, 0)] - c(0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn solve_rejects_singular() {
        let a = ComplexMatrix::diag(&[1e-16, 1.0]);
        let b = ComplexMatrix::col_vec(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(solve(&a, &b), Err(Error::Singular { .. })));
    }

    #[test]
    fn log_det_examples() {
        let d = log_det(&ComplexMatrix::diag(&[2.0, 3.0])).unwrap();
        assert!((d.log_modulus - 6.0f64.ln()).abs() < 1e-14);
        assert!((d.phase - Complex64::ONE).norm() < 1e-14);

        let d = log_det(&ComplexMatrix::identity(5)).unwrap();
        assert!(d.log_modulus.abs() < 1e-14);
        assert!((d.phase - Complex64::ONE).norm() < 1e-14);

        // diag(i, i): det = -1
        let a = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c(0.0, 1.0)
            } else {
                Complex64::ZERO
            }
        });
        let d = log_det(&a).unwrap();
        assert!(d.log_modulus.abs() < 1e-14);
        assert!((d.phase - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn log_det_zero_pivot() {
        let d = log_det(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(d.log_modulus == f64::NEG_INFINITY);
        assert!((d.phase - Complex64::ONE).norm() == 0.0);
    }

    #[test]
    fn eig_hermitian_sorted_and_unitary() {
        let (w, v) = eig_hermitian(&ComplexMatrix::diag(&[3.0, 1.0]), 1e-12).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] - 3.0).abs() < 1e-12);
        let vhv = &v.adjoint() * &v;
        assert!(vhv.distance(&ComplexMatrix::identity(2)) < 1e-10);

        // Pauli-type [[0, i], [-i, 0]] has eigenvalues -1, 1
        let a = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)])
            .unwrap();
        let (w, _) = eig_hermitian(&a, 1e-12).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_hermitian_rejects_nonhermitian() {
        let a = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(matches!(
            eig_hermitian(&a, 1e-12),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eig_general_examples() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 0 {
                c(1.0, 1.0)
            } else if i == 1 && j == 1 {
                c(2.0, 0.0)
            } else {
                Complex64::ZERO
            }
        });
        let mut ev = eig_general(&a).unwrap();
        ev.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((ev[0] - c(1.0, 1.0)).norm() < 1e-10);
        assert!((ev[1] - c(2.0, 0.0)).norm() < 1e-10);

        // nilpotent
        let n = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let ev = eig_general(&n).unwrap();
        assert!(ev.iter().all(|z| z.norm() < 1e-7));

        let ev = eig_general(&ComplexMatrix::identity(2)).unwrap();
        assert!(ev.iter().all(|z| (z - Complex64::ONE).norm() < 1e-10));
    }

    #[test]
    fn norms_and_hermiticity() {
        assert!((spectral_norm(&ComplexMatrix::identity(2)) - 1.0).abs() < 1e-14);
        assert!((smallest_singular_value(&ComplexMatrix::diag(&[2.0, 0.5])) - 0.5).abs() < 1e-14);
        assert!(is_hermitian(&ComplexMatrix::diag(&[1.0, 2.0]), 1e-12));
    }

    #[test]
    fn serde_round_trip() {
        let a = ComplexMatrix::new(1, 2, vec![c(1.0, -2.0), c(0.0, 3.5)]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[[1.0,-2.0],[0.0,3.5]]]");
        let b: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn serde_rejects_nonfinite_and_ragged() {
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1.0,2.0]],[[1.0,2.0],[3.0,4.0]]]").is_err());
        let with_nan = "[[[1e999,0.0]]]"; // parses to inf
        assert!(serde_json::from_str::<ComplexMatrix>(with_nan).is_err());
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let k = null_space(&a, 1e-12);
        assert_eq!((k.rows(), k.cols()), (2, 1));
        assert!(k[(1, 0)].norm() > 0.99);
    }
}
