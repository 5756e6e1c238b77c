//! The basic objects {A0, Pi, Lambda}, the solution operator S_z, the
//! M-operator, boundary maps on decomposed vectors, and Green's formula.
//!
//! In this finite-dimensional realization every vector in the domain of the
//! maximal operator carries its decomposition u = A0^{-1} f + Pi phi
//! explicitly, so the boundary maps Gamma0, Gamma1 and the action of A are
//! well defined even though D(A0) is the whole space.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    self, eig_hermitian, inner, orthonormalize, smallest_singular_value, solve, spectral_norm,
    vec_norm, ComplexMatrix,
};

/// Relative gap below which z counts as sitting on the spectrum of A0.
pub const SPECTRAL_GAP_FACTOR: f64 = 1e-8;

/// Validated triplet {A0, Pi, Lambda}: A0 Hermitian and invertible in H,
/// Pi a full-column-rank map E -> H, Lambda Hermitian in E.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawTriplet", into = "RawTriplet")]
pub struct OperatorTriplet {
    a0: ComplexMatrix,
    pi: ComplexMatrix,
    lambda: ComplexMatrix,
    a0_inv: ComplexMatrix,
    /// Ascending eigenvalues of A0 (real; A0 is Hermitian).
    spectrum: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTriplet {
    #[serde(rename = "A0")]
    a0: ComplexMatrix,
    #[serde(rename = "Pi")]
    pi: ComplexMatrix,
    #[serde(rename = "Lambda")]
    lambda: ComplexMatrix,
}

impl TryFrom<RawTriplet> for OperatorTriplet {
    type Error = Error;
    fn try_from(raw: RawTriplet) -> Result<Self> {
        OperatorTriplet::validate(raw.a0, raw.pi, raw.lambda)
    }
}

impl From<OperatorTriplet> for RawTriplet {
    fn from(t: OperatorTriplet) -> Self {
        RawTriplet {
            a0: t.a0,
            pi: t.pi,
            lambda: t.lambda,
        }
    }
}

impl OperatorTriplet {
    /// Check all triplet invariants and precompute A0^{-1} and spectrum(A0).
    pub fn validate(a0: ComplexMatrix, pi: ComplexMatrix, lambda: ComplexMatrix) -> Result<Self> {
        let n = a0.rows();
        let m = pi.cols();
        if !a0.is_square() {
            return Err(Error::ShapeMismatch("A0 must be square".into()));
        }
        if pi.rows() != n {
            return Err(Error::ShapeMismatch(format!(
                "Pi must have {} rows, got {}",
                n,
                pi.rows()
            )));
        }
        if lambda.rows() != m || lambda.cols() != m {
            return Err(Error::ShapeMismatch(format!(
                "Lambda must be {m}x{m}, got {}x{}",
                lambda.rows(),
                lambda.cols()
            )));
        }
        if m == 0 || m > n {
            return Err(Error::ShapeMismatch(format!(
                "need 1 <= m <= N, got m = {m}, N = {n}"
            )));
        }
        if !numerics::is_hermitian(&a0, 1e-10) {
            return Err(Error::NotHermitian("A0".into()));
        }
        if !numerics::is_hermitian(&lambda, 1e-10) {
            return Err(Error::NotHermitian("Lambda".into()));
        }
        let (spectrum, _) = eig_hermitian(&a0, 1e-10)?;
        let max_abs = spectrum.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let min_abs = spectrum.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
        if min_abs < 1e-8 * max_abs {
            return Err(Error::NotInvertible("A0".into()));
        }
        if smallest_singular_value(&pi) < 1e-10 * spectral_norm(&pi).max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient);
        }
        let a0_inv = numerics::inverse(&a0)?;
        Ok(Self {
            a0,
            pi,
            lambda,
            a0_inv,
            spectrum,
        })
    }

    pub fn a0(&self) -> &ComplexMatrix {
        &self.a0
    }

    pub fn pi(&self) -> &ComplexMatrix {
        &self.pi
    }

    pub fn lambda(&self) -> &ComplexMatrix {
        &self.lambda
    }

    pub fn a0_inv(&self) -> &ComplexMatrix {
        &self.a0_inv
    }

    pub fn dim_h(&self) -> usize {
        self.a0.rows()
    }

    pub fn dim_e(&self) -> usize {
        self.pi.cols()
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Smallest gap between adjacent eigenvalues of A0 (or its norm for N=1).
    pub fn spectral_gap(&self) -> f64 {
        let norm = self.a0_norm();
        self.spectrum
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(norm, f64::min)
    }

    pub fn a0_norm(&self) -> f64 {
        self.spectrum.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    pub fn distance_to_spectrum(&self, z: Complex64) -> f64 {
        self.spectrum
            .iter()
            .map(|&lam| (z - lam).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Reject z too close to spectrum(A0).
    pub fn check_regular(&self, z: Complex64) -> Result<()> {
        if self.distance_to_spectrum(z) < SPECTRAL_GAP_FACTOR * self.a0_norm() {
            Err(Error::AtSpectrum { z })
        } else {
            Ok(())
        }
    }

    /// R_z = (A0 - zI)^{-1}.
    pub fn resolvent(&self, z: Complex64) -> Result<ComplexMatrix> {
        self.check_regular(z)?;
        let n = self.dim_h();
        let shifted = &self.a0 - &ComplexMatrix::identity(n).scale(z);
        solve(&shifted, &ComplexMatrix::identity(n))
    }

    /// S_z = (I - z A0^{-1})^{-1} Pi = Pi + z R_z Pi.
    pub fn solution_operator(&self, z: Complex64) -> Result<ComplexMatrix> {
        self.check_regular(z)?;
        let n = self.dim_h();
        let shifted = &self.a0 - &ComplexMatrix::identity(n).scale(z);
        let y = solve(&shifted, &self.pi)?;
        Ok(&self.pi + &y.scale(z))
    }

    /// (S_{conj z})^* = Pi^* (I - z A0^{-1})^{-1}; valid since A0 = A0^*.
    pub fn solution_operator_bar_adjoint(&self, z: Complex64) -> Result<ComplexMatrix> {
        Ok(self.solution_operator(z.conj())?.adjoint())
    }

    /// M(z) = Lambda + z Pi^* (I - z A0^{-1})^{-1} Pi.
    pub fn m_operator(&self, z: Complex64) -> Result<ComplexMatrix> {
        let s_z = self.solution_operator(z)?;
        let correction = (&self.pi.adjoint() * &s_z).scale(z);
        Ok(&self.lambda + &correction)
    }

    /// Solve (A - z)u = f, Gamma0 u = phi; the stored decomposition is
    /// rebased so that ambient = A0^{-1} f' + Pi phi holds exactly.
    pub fn bvp_solve(&self, z: Complex64, f: &[Complex64], phi: &[Complex64]) -> Result<DecomposedVector> {
        if f.len() != self.dim_h() || phi.len() != self.dim_e() {
            return Err(Error::ShapeMismatch(format!(
                "bvp_solve: need |f| = {}, |phi| = {}",
                self.dim_h(),
                self.dim_e()
            )));
        }
        self.check_regular(z)?;
        let fv = ComplexMatrix::col_vec(f);
        let phiv = ComplexMatrix::col_vec(phi);
        // f' = A0 (A0 - zI)^{-1} (f + z Pi phi)
        let rhs = &fv + &(&self.pi * &phiv).scale(z);
        let n = self.dim_h();
        let shifted = &self.a0 - &ComplexMatrix::identity(n).scale(z);
        let f_prime = &self.a0 * &solve(&shifted, &rhs)?;
        Ok(DecomposedVector::from_parts(
            self,
            f_prime.column(0),
            phi.to_vec(),
        ))
    }

    /// Gamma1 u = Pi^* f + Lambda phi on the stored decomposition.
    pub fn gamma1(&self, d: &DecomposedVector) -> Vec<Complex64> {
        let fv = ComplexMatrix::col_vec(&d.f);
        let phiv = ComplexMatrix::col_vec(&d.phi);
        let out = &(&self.pi.adjoint() * &fv) + &(&self.lambda * &phiv);
        out.column(0)
    }

    /// Residual of Green's formula (Au,v) - (u,Av) = (G1 u, G0 v) - (G0 u, G1 v).
    pub fn green_form_residual(&self, d1: &DecomposedVector, d2: &DecomposedVector) -> f64 {
        let lhs = inner(&d1.f, &d2.ambient) - inner(&d1.ambient, &d2.f);
        let rhs = inner(&self.gamma1(d1), &d2.phi) - inner(&d1.phi, &self.gamma1(d2));
        (lhs - rhs).norm()
    }
}

/// An element u = A0^{-1} f + Pi phi of D(A), carried with its decomposition.
#[derive(Clone, Debug)]
pub struct DecomposedVector {
    f: Vec<Complex64>,
    phi: Vec<Complex64>,
    ambient: Vec<Complex64>,
}

impl DecomposedVector {
    pub fn from_parts(triplet: &OperatorTriplet, f: Vec<Complex64>, phi: Vec<Complex64>) -> Self {
        let fv = ComplexMatrix::col_vec(&f);
        let phiv = ComplexMatrix::col_vec(&phi);
        let ambient = (&(triplet.a0_inv() * &fv) + &(triplet.pi() * &phiv)).column(0);
        Self { f, phi, ambient }
    }

    /// A u = f.
    pub fn a_apply(&self) -> &[Complex64] {
        &self.f
    }

    /// Gamma0 u = phi.
    pub fn gamma0(&self) -> &[Complex64] {
        &self.phi
    }

    pub fn ambient(&self) -> &[Complex64] {
        &self.ambient
    }

    pub fn scale_norm(&self) -> f64 {
        vec_norm(&self.f) + vec_norm(&self.phi) + vec_norm(&self.ambient)
    }
}

/// Deterministic random instances used by the verification suites.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
}

impl InstanceGenerator {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn gaussian(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im)
    }

    fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let data = (0..rows * cols).map(|_| self.gaussian()).collect();
        ComplexMatrix::new(rows, cols, data).unwrap()
    }

    /// Haar-like random unitary via QR of a Gaussian matrix.
    fn random_unitary(&mut self, n: usize) -> ComplexMatrix {
        orthonormalize(&self.gaussian_matrix(n, n))
    }

    /// A0 = U diag(lambda) U^* with real |lambda| in [0.5, 5]; Pi Gaussian with
    /// orthonormalized columns; Lambda random Hermitian with norm <= 2.
    pub fn triplet(&mut self, n: usize, m: usize) -> OperatorTriplet {
        let u = self.random_unitary(n);
        let eigs: Vec<f64> = (0..n)
            .map(|_| {
                let mag = self.rng.gen_range(0.5..5.0);
                if self.rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let a0_raw = &(&u * &ComplexMatrix::diag(&eigs)) * &u.adjoint();
        let a0 = (&a0_raw + &a0_raw.adjoint()).scale(Complex64::new(0.5, 0.0));
        let pi = orthonormalize(&self.gaussian_matrix(n, m));
        let g = self.gaussian_matrix(m, m);
        let herm = (&g + &g.adjoint()).scale(Complex64::new(0.5, 0.0));
        let norm = spectral_norm(&herm).max(f64::MIN_POSITIVE);
        let target = self.rng.gen_range(0.5..2.0);
        let lambda = herm.scale(Complex64::new(target / norm, 0.0));
        OperatorTriplet::validate(a0, pi, lambda).expect("generated triplet must validate")
    }

    /// A z-sample with distance to spectrum(A0) at least 5% of ||A0||.
    /// `upper_half` forces Im z > 0.
    pub fn regular_z(&mut self, triplet: &OperatorTriplet, upper_half: bool) -> Complex64 {
        let norm = triplet.a0_norm();
        loop {
            let re = self.rng.gen_range(-1.5..1.5) * norm;
            let im = if upper_half {
                self.rng.gen_range(0.05..1.0) * norm
            } else {
                self.rng.gen_range(-1.0..1.0) * norm
            };
            let z = Complex64::new(re, im);
            if triplet.distance_to_spectrum(z) >= 0.05 * norm {
                return z;
            }
        }
    }

    pub fn vector(&mut self, len: usize) -> Vec<Complex64> {
        (0..len).map(|_| self.gaussian()).collect()
    }

    /// Random Hermitian m x m matrix with spectral norm about 1.
    pub fn hermitian(&mut self, m: usize) -> ComplexMatrix {
        let g = self.gaussian_matrix(m, m);
        let h = (&g + &g.adjoint()).scale(Complex64::new(0.5, 0.0));
        let norm = spectral_norm(&h).max(f64::MIN_POSITIVE);
        h.scale(Complex64::new(1.0 / norm, 0.0))
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        self.gaussian_matrix(rows, cols)
    }
}
