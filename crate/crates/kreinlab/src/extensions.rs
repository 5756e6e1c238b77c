//! Generalized boundary conditions (beta0, beta1), the Q-operator, Krein's
//! resolvent formula, reconstruction of the extension A_{beta0,beta1}, the
//! Neumann-like extension A1, the BKV extension L_B, and the correspondence
//! between secular roots and extension eigenvalues.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    complex_pair, eig_general, inverse, log_det, null_space, null_space_abs, orthonormalize,
    rcond, singular_values, solve, spectral_norm, ComplexMatrix, LogDet, RCOND_THRESHOLD,
};
use crate::rootfind::{bisect, bracket_scan, localize_zero, Rectangle};
use crate::triplet::{OperatorTriplet, SPECTRAL_GAP_FACTOR};

/// Singular-value threshold factor defining the kernel of beta0 + beta1 M(z),
/// relative to the natural scale |beta0| + |beta1| |M(z)| (not to the matrix
/// itself, which vanishes entirely at a root when m = 1).
pub const KERNEL_SV_FACTOR: f64 = 1e-8;

/// The matrices (beta0, beta1) of the boundary condition
/// (beta0 Gamma0 + beta1 Gamma1) u = 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct BoundaryPair {
    beta0: ComplexMatrix,
    beta1: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    beta0: ComplexMatrix,
    beta1: ComplexMatrix,
}

impl TryFrom<RawPair> for BoundaryPair {
    type Error = Error;
    fn try_from(raw: RawPair) -> Result<Self> {
        BoundaryPair::new(raw.beta0, raw.beta1)
    }
}

impl From<BoundaryPair> for RawPair {
    fn from(p: BoundaryPair) -> Self {
        RawPair {
            beta0: p.beta0,
            beta1: p.beta1,
        }
    }
}

impl BoundaryPair {
    pub fn new(beta0: ComplexMatrix, beta1: ComplexMatrix) -> Result<Self> {
        if !beta0.is_square()
            || !beta1.is_square()
            || beta0.rows() != beta1.rows()
            || beta0.rows() == 0
        {
            return Err(Error::ShapeMismatch(format!(
                "boundary pair must be square of equal nonzero size, got {}x{} and {}x{}",
                beta0.rows(),
                beta0.cols(),
                beta1.rows(),
                beta1.cols()
            )));
        }
        if beta0.frobenius_norm() == 0.0 && beta1.frobenius_norm() == 0.0 {
            return Err(Error::InvalidInput(
                "beta0 = beta1 = 0 defines no boundary condition".into(),
            ));
        }
        Ok(Self { beta0, beta1 })
    }

    pub fn dirichlet(m: usize) -> Self {
        Self {
            beta0: ComplexMatrix::identity(m),
            beta1: ComplexMatrix::zeros(m, m),
        }
    }

    pub fn neumann(m: usize) -> Self {
        Self {
            beta0: ComplexMatrix::zeros(m, m),
            beta1: ComplexMatrix::identity(m),
        }
    }

    pub fn beta0(&self) -> &ComplexMatrix {
        &self.beta0
    }

    pub fn beta1(&self) -> &ComplexMatrix {
        &self.beta1
    }

    pub fn dim(&self) -> usize {
        self.beta0.rows()
    }

    /// Regularity for a given triplet: matching size and beta0 + beta1 Lambda
    /// invertible per the rcond test.
    pub fn certify(&self, triplet: &OperatorTriplet) -> Result<()> {
        if self.dim() != triplet.dim_e() {
            return Err(Error::ShapeMismatch(format!(
                "boundary pair size {} does not match m = {}",
                self.dim(),
                triplet.dim_e()
            )));
        }
        let b = &self.beta0 + &(&self.beta1 * triplet.lambda());
        if rcond(&b) <= RCOND_THRESHOLD {
            return Err(Error::SingularBoundaryOperator { z: Complex64::ZERO });
        }
        Ok(())
    }

    /// Residual of the selfadjointness hypothesis: || beta0 beta1* - beta1 beta0* ||_F.
    pub fn symmetry_defect(&self) -> f64 {
        let p = &self.beta0 * &self.beta1.adjoint();
        p.distance(&p.adjoint())
    }
}

/// Reconstructed extension operator together with its certification data.
#[derive(Clone, Debug)]
pub struct ExtensionOperator {
    pub matrix: ComplexMatrix,
    pub z_independence_residual: f64,
    pub samples_used: Vec<Complex64>,
}

/// Q(z) = -(beta0 + beta1 M(z))^{-1} beta1.
pub fn q_operator(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    z: Complex64,
) -> Result<ComplexMatrix> {
    if pair.dim() != triplet.dim_e() {
        return Err(Error::ShapeMismatch(format!(
            "boundary pair size {} does not match m = {}",
            pair.dim(),
            triplet.dim_e()
        )));
    }
    let m = triplet.m_operator(z)?;
    let bm = &pair.beta0 + &(&pair.beta1 * &m);
    if rcond(&bm) <= RCOND_THRESHOLD {
        return Err(Error::SingularBoundaryOperator { z });
    }
    Ok(solve(&bm, &pair.beta1)?.scale(-Complex64::ONE))
}

/// Krein resolvent candidate R(z) = R_z + S_z Q(z) (S_{z bar})*.
pub fn krein_resolvent(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    z: Complex64,
) -> Result<ComplexMatrix> {
    let r = triplet.resolvent(z)?;
    let s = triplet.solution_operator(z)?;
    let s_bar_adj = triplet.solution_operator_bar_adjoint(z)?;
    let q = q_operator(triplet, pair, z)?;
    Ok(&r + &(&(&s * &q) * &s_bar_adj))
}

/// Residual of the Hilbert identity R(z) - R_z = S_z [Q(z) (S_{z bar})*],
/// i.e. of the resolvent difference written as [Gamma1 R_{z bar}]* applied to
/// Gamma0 of the resolvent.
pub fn hilbert_identity_residual(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    z: Complex64,
) -> Result<f64> {
    let r = triplet.resolvent(z)?;
    let s = triplet.solution_operator(z)?;
    let s_bar_adj = triplet.solution_operator_bar_adjoint(z)?;
    let q = q_operator(triplet, pair, z)?;
    let kr = krein_resolvent(triplet, pair, z)?;
    let correction = &s * &(&q * &s_bar_adj);
    Ok((&(&kr - &r) - &correction).distance(&ComplexMatrix::zeros(r.rows(), r.cols())))
}

/// Default certification samples scaled by the spectral gap g of A0.
pub fn default_samples(triplet: &OperatorTriplet) -> Vec<Complex64> {
    let g = triplet.spectral_gap();
    vec![
        Complex64::ZERO,
        Complex64::new(0.0, 0.37 * g),
        Complex64::new(-0.71 * g, 0.29 * g),
    ]
}

/// Reconstruct A_beta from its resolvent at the first sample and certify
/// z-independence at the remaining ones.
pub fn reconstruct_operator(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    z_samples: &[Complex64],
) -> Result<ExtensionOperator> {
    if z_samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: z_samples.len(),
        });
    }
    let n = triplet.dim_h();
    let mut resolvents = Vec::with_capacity(z_samples.len());
    for &z in z_samples {
        let k = krein_resolvent(triplet, pair, z)?;
        if rcond(&k) <= RCOND_THRESHOLD {
            return Err(Error::ResolventSingular { z });
        }
        resolvents.push(k);
    }
    let z0 = z_samples[0];
    let matrix = &ComplexMatrix::identity(n).scale(z0) + &inverse(&resolvents[0])?;
    let mut worst = 0.0f64;
    for (&z, k) in z_samples[1..].iter().zip(&resolvents[1..]) {
        let shifted = &matrix - &ComplexMatrix::identity(n).scale(z);
        let r = inverse(&shifted)?;
        worst = worst.max(r.distance(k) / k.frobenius_norm().max(f64::MIN_POSITIVE));
    }
    Ok(ExtensionOperator {
        matrix,
        z_independence_residual: worst,
        samples_used: z_samples.to_vec(),
    })
}

/// Reconstruct at the default samples, dropping any that trip a singular
/// resolvent or sit on the spectrum of A0.
pub fn reconstruct_default(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
) -> Result<ExtensionOperator> {
    let mut usable = Vec::new();
    for z in default_samples(triplet) {
        match krein_resolvent(triplet, pair, z) {
            Ok(k) if rcond(&k) > RCOND_THRESHOLD => usable.push(z),
            _ => {}
        }
    }
    if usable.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: usable.len(),
        });
    }
    reconstruct_operator(triplet, pair, &usable)
}

/// || A_beta^{-1} - (A_beta^{-1})* ||_F with A_beta^{-1} = A0^{-1} + Pi Q(0) Pi*.
pub fn selfadjointness_residual(triplet: &OperatorTriplet, pair: &BoundaryPair) -> Result<f64> {
    let q0 = q_operator(triplet, pair, Complex64::ZERO)?;
    let inv = &(triplet.a0_inv().clone()) + &(&(triplet.pi() * &q0) * &triplet.pi().adjoint());
    Ok(inv.distance(&inv.adjoint()))
}

/// The Neumann-like extension A1 (beta0 = 0, beta1 = I) via its closed form
/// A1^{-1} = A0^{-1} - Pi Lambda^{-1} Pi*, certified against the Krein
/// resolvent, plus the residuals of the two companion resolvent identities:
/// first M(z)^{-1} = Lambda^{-1} - z Lambda^{-1} Pi* (I - z A1^{-1})^{-1} Pi Lambda^{-1},
/// then the pi-form of the resolvent difference with pi = -Pi Lambda^{-1}.
pub fn neumann_extension(triplet: &OperatorTriplet) -> Result<(ExtensionOperator, f64, f64)> {
    let lambda = triplet.lambda();
    if rcond(lambda) <= RCOND_THRESHOLD {
        return Err(Error::SingularLambda);
    }
    let n = triplet.dim_h();
    let lambda_inv = inverse(lambda)?;
    let a1_inv = &(triplet.a0_inv().clone())
        - &(&(triplet.pi() * &lambda_inv) * &triplet.pi().adjoint());
    if rcond(&a1_inv) <= RCOND_THRESHOLD {
        return Err(Error::SingularLambda);
    }
    let a1 = inverse(&a1_inv)?;

    let pair = BoundaryPair::neumann(triplet.dim_e());
    let mut worst = 0.0f64;
    let mut samples_used = Vec::new();
    for z in default_samples(triplet) {
        let k = match krein_resolvent(triplet, &pair, z) {
            Ok(k) => k,
            Err(_) => continue,
        };
        let shifted = &a1 - &ComplexMatrix::identity(n).scale(z);
        let r = match inverse(&shifted) {
            Ok(r) => r,
            Err(_) => continue,
        };
        worst = worst.max(r.distance(&k) / k.frobenius_norm().max(f64::MIN_POSITIVE));
        samples_used.push(z);
    }

    // Test point in the upper half plane, regular for both A0 and A1.
    let z = Complex64::new(0.0, 0.5 * triplet.a0_norm().max(1.0));
    let m = triplet.m_operator(z)?;
    let m_inv = inverse(&m)?;
    let pencil = &ComplexMatrix::identity(n) - &a1_inv.scale(z);
    let pencil_inv = inverse(&pencil)?;
    let middle = &(&lambda_inv * &triplet.pi().adjoint()) * &(&pencil_inv * &(triplet.pi() * &lambda_inv));
    let rhs = &lambda_inv - &middle.scale(z);
    let res_m_inverse = m_inv.distance(&rhs) / m_inv.frobenius_norm().max(f64::MIN_POSITIVE);

    // pi = -Pi Lambda^{-1}; resolvent difference
    // (A1 - z)^{-1} - (A0 - z)^{-1} = -(I - z A1^{-1})^{-1} pi M(z) pi* (I - z A1^{-1})^{-1}
    let r1 = inverse(&(&a1 - &ComplexMatrix::identity(n).scale(z)))?;
    let r0 = triplet.resolvent(z)?;
    let small_pi = (triplet.pi() * &lambda_inv).scale(-Complex64::ONE);
    let diff = &(&pencil_inv * &(&(&small_pi * &m) * &small_pi.adjoint())) * &pencil_inv;
    let lhs = &r1 - &r0;
    let res_pi_form = (&lhs + &diff).frobenius_norm() / r1.frobenius_norm().max(f64::MIN_POSITIVE);

    Ok((
        ExtensionOperator {
            matrix: a1,
            z_independence_residual: worst,
            samples_used,
        },
        res_m_inverse,
        res_pi_form,
    ))
}

/// The extension L_B with L_B^{-1} = A0^{-1} + Pi (Pi* B Pi)^{-1} Pi*,
/// certified against the reconstruction for beta1 = -I, beta0 = Lambda + Pi* B Pi.
pub fn bkv_extension(triplet: &OperatorTriplet, b: &ComplexMatrix) -> Result<ExtensionOperator> {
    if b.rows() != triplet.dim_h() || !b.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "B must be {0}x{0}",
            triplet.dim_h()
        )));
    }
    let pbp = &(&triplet.pi().adjoint() * b) * triplet.pi();
    if rcond(&pbp) <= RCOND_THRESHOLD {
        return Err(Error::SingularPiBPi);
    }
    let lb_inv = &(triplet.a0_inv().clone())
        + &(&(triplet.pi() * &inverse(&pbp)?) * &triplet.pi().adjoint());
    if rcond(&lb_inv) <= RCOND_THRESHOLD {
        return Err(Error::SingularPiBPi);
    }
    let lb = inverse(&lb_inv)?;

    let beta0 = &triplet.lambda().clone() + &pbp;
    let beta1 = ComplexMatrix::identity(triplet.dim_e()).scale(-Complex64::ONE);
    let pair = BoundaryPair::new(beta0, beta1)?;
    let n = triplet.dim_h();
    let mut worst = 0.0f64;
    let mut samples_used = Vec::new();
    for z in default_samples(triplet) {
        let k = match krein_resolvent(triplet, &pair, z) {
            Ok(k) => k,
            Err(_) => continue,
        };
        let shifted = &lb - &ComplexMatrix::identity(n).scale(z);
        let r = match inverse(&shifted) {
            Ok(r) => r,
            Err(_) => continue,
        };
        worst = worst.max(r.distance(&k) / k.frobenius_norm().max(f64::MIN_POSITIVE));
        samples_used.push(z);
    }
    Ok(ExtensionOperator {
        matrix: lb,
        z_independence_residual: worst,
        samples_used,
    })
}

/// Orthonormal basis of D(A00) = A0^{-1}(R(Pi) orthogonal complement);
/// N x (N - m), empty when m = N.
pub fn minimal_domain_basis(triplet: &OperatorTriplet) -> ComplexMatrix {
    let perp = null_space(&triplet.pi().adjoint(), 1e-10);
    if perp.cols() == 0 {
        return ComplexMatrix::zeros(triplet.dim_h(), 0);
    }
    orthonormalize(&(triplet.a0_inv() * &perp))
}

/// Secular determinant det(beta0 + beta1 M(z)) as a LogDet.
pub fn secular(triplet: &OperatorTriplet, pair: &BoundaryPair, z: Complex64) -> Result<LogDet> {
    if pair.dim() != triplet.dim_e() {
        return Err(Error::ShapeMismatch(format!(
            "boundary pair size {} does not match m = {}",
            pair.dim(),
            triplet.dim_e()
        )));
    }
    let m = triplet.m_operator(z)?;
    log_det(&(pair.beta0() + &(pair.beta1() * &m)))
}

/// Numerical kernel dimension of beta0 + beta1 M(z).
pub fn secular_kernel_dim(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    z: Complex64,
) -> Result<usize> {
    let m = triplet.m_operator(z)?;
    let bm = pair.beta0() + &(pair.beta1() * &m);
    let sv = singular_values(&bm);
    let cut = KERNEL_SV_FACTOR * secular_scale(pair, &m);
    Ok(sv.iter().filter(|&&s| s < cut).count())
}

/// Natural size of beta0 + beta1 M(z) entries away from singularity.
fn secular_scale(pair: &BoundaryPair, m: &ComplexMatrix) -> f64 {
    (spectral_norm(pair.beta0()) + spectral_norm(pair.beta1()) * spectral_norm(m))
        .max(f64::MIN_POSITIVE)
}

/// Orthonormal basis of the numerical kernel of beta0 + beta1 M(z).
pub fn secular_kernel_basis(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    z: Complex64,
) -> Result<ComplexMatrix> {
    let m = triplet.m_operator(z)?;
    let bm = pair.beta0() + &(pair.beta1() * &m);
    Ok(null_space_abs(&bm, KERNEL_SV_FACTOR * secular_scale(pair, &m)))
}

/// One located secular root with its kernel dimension.
#[derive(Clone, Debug, Serialize)]
pub struct SecularRoot {
    #[serde(with = "complex_pair")]
    pub z: Complex64,
    pub kernel_dim: usize,
}

/// One eigenvalue cluster of the reconstructed extension.
#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueCluster {
    #[serde(with = "complex_pair")]
    pub value: Complex64,
    pub multiplicity: usize,
    /// Within the gap threshold of spectrum(A0); excluded from matching.
    pub inside_spectral_gap: bool,
}

/// A matched (root, eigenvalue) pair.
#[derive(Clone, Debug, Serialize)]
pub struct MatchedPair {
    pub root_index: usize,
    pub eigenvalue_index: usize,
    pub distance: f64,
    pub multiplicity_agrees: bool,
}

/// Secular roots vs. eigenvalues of the reconstructed extension.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub tolerance: f64,
    pub secular_roots: Vec<SecularRoot>,
    pub eigenvalues: Vec<EigenvalueCluster>,
    pub matching: Vec<MatchedPair>,
    pub unmatched_roots: Vec<usize>,
    /// Indices of clusters outside the gap with no matching root.
    pub unmatched_eigenvalues: Vec<usize>,
    pub all_matched: bool,
}

fn cluster_eigenvalues(mut eigs: Vec<Complex64>, tol: f64) -> Vec<(Complex64, usize)> {
    eigs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for e in eigs {
        match clusters.iter_mut().find(|(c, _)| (e - *c).norm() <= tol) {
            Some((c, count)) => {
                // running centroid
                *c = (*c * (*count as f64) + e) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => clusters.push((e, 1)),
        }
    }
    clusters
}

/// Search for a secular root near `center` within radius `delta`: real-axis
/// bracketing first for near-real centers, then the argument principle.
fn locate_root_near(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    center: Complex64,
    delta: f64,
    xtol: f64,
) -> Option<Complex64> {
    let scale = triplet.a0_norm();
    if center.im.abs() <= 1e-9 * scale.max(1.0) {
        let mut f = |x: f64| match secular(triplet, pair, Complex64::new(x, 0.0)) {
            Ok(ld) => ld.real_proxy(),
            Err(_) => f64::NAN,
        };
        if let Ok(brackets) = bracket_scan(&mut f, center.re - delta, center.re + delta, 257) {
            let mut best: Option<f64> = None;
            for b in brackets {
                if let Ok(r) = bisect(&mut f, &b, Some(xtol)) {
                    let keep = match best {
                        Some(cur) => (r - center.re).abs() < (cur - center.re).abs(),
                        None => true,
                    };
                    if keep {
                        best = Some(r);
                    }
                }
            }
            if let Some(r) = best {
                return Some(Complex64::new(r, 0.0));
            }
        }
    }
    // log-scaled secular value with overflow guard; the reference offset keeps
    // contour samples in representable range
    let offset = secular(triplet, pair, center + Complex64::new(delta, delta))
        .map(|ld| ld.log_modulus)
        .ok()
        .filter(|v| v.is_finite())
        .unwrap_or(0.0);
    let mut f = |w: Complex64| match secular(triplet, pair, w) {
        Ok(ld) => ld.phase * (ld.log_modulus - offset).clamp(-600.0, 600.0).exp(),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let rect = Rectangle::new(
        center - Complex64::new(delta, delta),
        center + Complex64::new(delta, delta),
    )
    .ok()?;
    match localize_zero(&mut f, &rect, xtol) {
        Ok((z, count)) if count > 0 => Some(z),
        _ => None,
    }
}

/// Compare eigenvalues of the reconstructed extension against secular roots:
/// each eigenvalue cluster away from spectrum(A0) should pair with a root
/// within `tol`, with kernel dimension equal to the cluster multiplicity.
pub fn eigen_correspondence(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    tol: f64,
) -> Result<SpectrumReport> {
    pair.certify(triplet)?;
    let ext = reconstruct_default(triplet, pair)?;
    let eigs = eig_general(&ext.matrix)?;
    let scale = triplet.a0_norm();
    let clusters = cluster_eigenvalues(eigs, tol.max(1e-12 * scale));

    let gap_cut = SPECTRAL_GAP_FACTOR * scale;
    let eigenvalues: Vec<EigenvalueCluster> = clusters
        .iter()
        .map(|&(value, multiplicity)| EigenvalueCluster {
            value,
            multiplicity,
            inside_spectral_gap: triplet.distance_to_spectrum(value) <= gap_cut,
        })
        .collect();

    let mut secular_roots = Vec::new();
    let mut matching = Vec::new();
    let mut unmatched_roots = Vec::new();
    let mut unmatched_eigenvalues = Vec::new();
    for (idx, cl) in eigenvalues.iter().enumerate() {
        if cl.inside_spectral_gap {
            continue;
        }
        // search window isolating this cluster from the others and from spectrum(A0)
        let mut delta = 0.45 * triplet.distance_to_spectrum(cl.value);
        for (j, other) in eigenvalues.iter().enumerate() {
            if j != idx {
                delta = delta.min(0.45 * (cl.value - other.value).norm());
            }
        }
        delta = delta.clamp(10.0 * tol, 0.25 * scale.max(1.0));
        // polish far below `tol`: the kernel-dimension test needs the root
        // resolved to the working-precision limit, not just to matching accuracy
        let xtol = (0.01 * tol).min(1e-13 * scale.max(1.0));
        let found = locate_root_near(triplet, pair, cl.value, delta, xtol);
        match found {
            Some(z0) => {
                let kernel_dim = secular_kernel_dim(triplet, pair, z0).unwrap_or(0);
                let root_index = secular_roots.len();
                secular_roots.push(SecularRoot { z: z0, kernel_dim });
                let distance = (z0 - cl.value).norm();
                if distance <= tol {
                    matching.push(MatchedPair {
                        root_index,
                        eigenvalue_index: idx,
                        distance,
                        multiplicity_agrees: kernel_dim == cl.multiplicity,
                    });
                } else {
                    unmatched_roots.push(root_index);
                    unmatched_eigenvalues.push(idx);
                }
            }
            None => unmatched_eigenvalues.push(idx),
        }
    }
    let all_matched = unmatched_roots.is_empty()
        && unmatched_eigenvalues.is_empty()
        && matching.iter().all(|m| m.multiplicity_agrees);
    Ok(SpectrumReport {
        tolerance: tol,
        secular_roots,
        eigenvalues,
        matching,
        unmatched_roots,
        unmatched_eigenvalues,
        all_matched,
    })
}

/// Residual of the Q-difference identity
/// Q(z) - Q(zeta) = (z - zeta) Q(z) (S_{z bar})* S_zeta Q(zeta), relative.
pub fn q_difference_residual(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    z: Complex64,
    zeta: Complex64,
) -> Result<f64> {
    let qz = q_operator(triplet, pair, z)?;
    let qzeta = q_operator(triplet, pair, zeta)?;
    let lhs = &qz - &qzeta;
    let bridge = &triplet.solution_operator_bar_adjoint(z)? * &triplet.solution_operator(zeta)?;
    let rhs = (&(&qz * &bridge) * &qzeta).scale(z - zeta);
    let scale = qz
        .frobenius_norm()
        .max(qzeta.frobenius_norm())
        .max(f64::MIN_POSITIVE);
    Ok(lhs.distance(&rhs) / scale)
}

/// Residual of the first resolvent equation for the Krein resolvent, relative.
pub fn resolvent_equation_residual(
    triplet: &OperatorTriplet,
    pair: &BoundaryPair,
    z: Complex64,
    zeta: Complex64,
) -> Result<f64> {
    let rz = krein_resolvent(triplet, pair, z)?;
    let rzeta = krein_resolvent(triplet, pair, zeta)?;
    let lhs = &rz - &rzeta;
    let rhs = (&rz * &rzeta).scale(z - zeta);
    let scale = rz
        .frobenius_norm()
        .max(rzeta.frobenius_norm())
        .max(f64::MIN_POSITIVE);
    Ok(lhs.distance(&rhs) / scale)
}
