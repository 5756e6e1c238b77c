//! Point interactions in R^3: the analytic M-matrix built from the free
//! Green function, the secular determinant, bound states with eigenfunction
//! coefficients, and the explicit resolvent kernel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    log_det, null_space_abs, rcond, singular_values, solve, spectral_norm, ComplexMatrix,
    LogDet, RCOND_THRESHOLD,
};
use crate::rootfind::{bisect, bracket_scan};

/// Distance to the branch cut [1, inf) below which evaluation is rejected.
pub const CUT_DISTANCE: f64 = 1e-12;

/// Length-unit threshold for coincident centers / evaluation points.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-12;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

fn check_off_cut(z: Complex64) -> Result<()> {
    let distance = if z.re >= 1.0 {
        z.im.abs()
    } else {
        (z - Complex64::ONE).norm()
    };
    if distance <= CUT_DISTANCE {
        return Err(Error::OnBranchCut { z });
    }
    Ok(())
}

/// kappa(z) = sqrt(z - 1) on the physical sheet Im kappa >= 0; the branch on
/// which the Green function decays.
pub fn kappa(z: Complex64) -> Result<Complex64> {
    check_off_cut(z)?;
    let k = (z - Complex64::ONE).sqrt();
    Ok(if k.im < 0.0 { -k } else { k })
}

/// Free Green function value e^{i kappa r} / (4 pi r) at distance r.
pub fn green_value(z: Complex64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::NonpositiveRadius { r });
    }
    let k = kappa(z)?;
    Ok((Complex64::new(0.0, 1.0) * k * r).exp() / (FOUR_PI * r))
}

/// n point interactions: distinct centers plus the coupling pair (beta0, beta1)
/// of the boundary condition (beta0 Gamma0 + beta1 Gamma1) u = 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct PointModel {
    centers: Vec<[f64; 3]>,
    beta0: ComplexMatrix,
    beta1: ComplexMatrix,
}

/// File form: explicit matrices, or the shorthand "alpha" meaning
/// beta0 = diag(alpha), beta1 = I.
#[derive(Serialize, Deserialize)]
struct RawModel {
    centers: Vec<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta0: Option<ComplexMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta1: Option<ComplexMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<f64>>,
}

impl TryFrom<RawModel> for PointModel {
    type Error = Error;
    fn try_from(raw: RawModel) -> Result<Self> {
        match (raw.beta0, raw.beta1, raw.alpha) {
            (Some(b0), Some(b1), None) => PointModel::new(raw.centers, b0, b1),
            (None, None, Some(alpha)) => PointModel::from_alpha(raw.centers, &alpha),
            _ => Err(Error::InvalidInput(
                "model needs either beta0+beta1 or alpha".into(),
            )),
        }
    }
}

impl From<PointModel> for RawModel {
    fn from(m: PointModel) -> Self {
        RawModel {
            centers: m.centers,
            beta0: Some(m.beta0),
            beta1: Some(m.beta1),
            alpha: None,
        }
    }
}

/// One bound state: spectral parameter z (A0 convention), kernel multiplicity,
/// and the Schroedinger energy E = z - 1.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundState {
    pub z: f64,
    pub multiplicity: usize,
    pub energy: f64,
}

impl PointModel {
    pub fn new(centers: Vec<[f64; 3]>, beta0: ComplexMatrix, beta1: ComplexMatrix) -> Result<Self> {
        let n = centers.len();
        if n == 0 {
            return Err(Error::InvalidInput("need at least one center".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if dist3(centers[i], centers[j]) <= COINCIDENCE_THRESHOLD {
                    return Err(Error::CoincidentPoints);
                }
            }
        }
        if beta0.rows() != n || beta0.cols() != n || beta1.rows() != n || beta1.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "coupling matrices must be {n}x{n}"
            )));
        }
        if centers
            .iter()
            .any(|p| p.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            centers,
            beta0,
            beta1,
        })
    }

    pub fn from_alpha(centers: Vec<[f64; 3]>, alpha: &[f64]) -> Result<Self> {
        if alpha.len() != centers.len() {
            return Err(Error::ShapeMismatch(format!(
                "alpha must have {} entries, got {}",
                centers.len(),
                alpha.len()
            )));
        }
        let n = centers.len();
        Self::new(
            centers,
            ComplexMatrix::diag(alpha),
            ComplexMatrix::identity(n),
        )
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[[f64; 3]] {
        &self.centers
    }

    pub fn beta0(&self) -> &ComplexMatrix {
        &self.beta0
    }

    pub fn beta1(&self) -> &ComplexMatrix {
        &self.beta1
    }

    /// M(z): diagonal i kappa / (4 pi), off-diagonal the Green function at the
    /// center distances. Complex symmetric.
    pub fn m_matrix(&self, z: Complex64) -> Result<ComplexMatrix> {
        let k = kappa(z)?;
        let n = self.n();
        let diag = Complex64::new(0.0, 1.0) * k / FOUR_PI;
        let mut m = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = diag;
            for s in j + 1..n {
                let v = green_value(z, dist3(self.centers[j], self.centers[s]))?;
                m[(j, s)] = v;
                m[(s, j)] = v;
            }
        }
        Ok(m)
    }

    /// Secular determinant det(beta0 + beta1 M(z)) as a LogDet.
    pub fn secular(&self, z: Complex64) -> Result<LogDet> {
        let m = self.m_matrix(z)?;
        log_det(&(&self.beta0 + &(&self.beta1 * &m)))
    }

    /// Both coupling matrices real and symmetric; guarantees a real secular
    /// determinant for real z < 1.
    pub fn is_real_symmetric_coupling(&self) -> bool {
        let real_sym = |b: &ComplexMatrix| {
            b.data().iter().all(|v| v.im == 0.0)
                && b.distance(&b.transpose()) <= 1e-14 * b.frobenius_norm().max(f64::MIN_POSITIVE)
        };
        real_sym(&self.beta0) && real_sym(&self.beta1)
    }

    /// Singular-value cut for the kernel of beta0 + beta1 M(z), relative to
    /// the coupling/M scale rather than the matrix itself (which vanishes
    /// entirely at a root when n = 1).
    fn kernel_cut(&self, m: &ComplexMatrix) -> f64 {
        let scale = spectral_norm(&self.beta0) + spectral_norm(&self.beta1) * spectral_norm(m);
        1e-8 * scale.max(f64::MIN_POSITIVE)
    }

    /// Kernel multiplicity of beta0 + beta1 M(z).
    fn kernel_dim(&self, z: Complex64) -> Result<usize> {
        let m = self.m_matrix(z)?;
        let bm = &self.beta0 + &(&self.beta1 * &m);
        let cut = self.kernel_cut(&m);
        Ok(singular_values(&bm).iter().filter(|&&s| s < cut).count())
    }

    /// All real bound states on [z_min, z_max] by sign-change scanning of the
    /// secular determinant. Requires real symmetric coupling.
    pub fn bound_states(&self, z_min: f64, z_max: f64) -> Result<Vec<BoundState>> {
        if !self.is_real_symmetric_coupling() {
            return Err(Error::NonRealCoupling);
        }
        if !(z_min < z_max) || z_max > 1.0 - 1e-9 {
            return Err(Error::InvalidInput(format!(
                "need z_min < z_max <= 1 - 1e-9, got [{z_min}, {z_max}]"
            )));
        }
        let mut f = |x: f64| match self.secular(Complex64::new(x, 0.0)) {
            Ok(ld) => ld.real_proxy(),
            Err(_) => f64::NAN,
        };
        let samples = 2001.max(200 * self.n());
        let brackets = bracket_scan(&mut f, z_min, z_max, samples)?;
        let mut roots: Vec<f64> = Vec::new();
        for b in brackets {
            let r = bisect(&mut f, &b, None)?;
            if roots.iter().all(|&prev| (prev - r).abs() > 1e-9 * (1.0 + r.abs())) {
                roots.push(r);
            }
        }
        roots
            .into_iter()
            .map(|z0| {
                Ok(BoundState {
                    z: z0,
                    multiplicity: self.kernel_dim(Complex64::new(z0, 0.0))?.max(1),
                    energy: z0 - 1.0,
                })
            })
            .collect()
    }

    /// Orthonormal basis of the kernel of beta0 + beta1 M(z0); the columns are
    /// the coefficients a_j of the eigenfunction sum a_j G_{z0}(x - x_j).
    pub fn eigenfunction_coefficients(&self, z0: Complex64) -> Result<ComplexMatrix> {
        let m = self.m_matrix(z0)?;
        let bm = &self.beta0 + &(&self.beta1 * &m);
        let cut = self.kernel_cut(&m);
        let smin = singular_values(&bm).last().copied().unwrap_or(0.0);
        if smin >= cut {
            return Err(Error::NotARoot {
                z: z0,
                sigma_min: smin,
            });
        }
        Ok(null_space_abs(&bm, cut))
    }

    /// Eigenfunction value u(x) = sum_j a_j G_{z0}(|x - x_j|).
    pub fn eigenfunction_value(
        &self,
        coefficients: &[Complex64],
        z0: Complex64,
        x: [f64; 3],
    ) -> Result<Complex64> {
        if coefficients.len() != self.n() {
            return Err(Error::ShapeMismatch(format!(
                "need {} coefficients",
                self.n()
            )));
        }
        let mut acc = Complex64::ZERO;
        for (a, &center) in coefficients.iter().zip(&self.centers) {
            acc += a * green_value(z0, dist3(x, center))?;
        }
        Ok(acc)
    }

    /// Q(z) = -(beta0 + beta1 M(z))^{-1} beta1.
    pub fn q_matrix(&self, z: Complex64) -> Result<ComplexMatrix> {
        let bm = &self.beta0 + &(&self.beta1 * &self.m_matrix(z)?);
        if rcond(&bm) <= RCOND_THRESHOLD {
            return Err(Error::SingularBoundaryOperator { z });
        }
        Ok(solve(&bm, &self.beta1)?.scale(-Complex64::ONE))
    }

    /// Krein resolvent kernel
    /// G_z(|x-y|) + sum_{jk} Q_{jk}(z) G_z(|x-x_j|) G_z(|x_k-y|).
    pub fn resolvent_kernel(&self, z: Complex64, x: [f64; 3], y: [f64; 3]) -> Result<Complex64> {
        if dist3(x, y) <= COINCIDENCE_THRESHOLD {
            return Err(Error::CoincidentPoints);
        }
        for &center in &self.centers {
            if dist3(x, center) <= COINCIDENCE_THRESHOLD
                || dist3(y, center) <= COINCIDENCE_THRESHOLD
            {
                return Err(Error::CoincidentPoints);
            }
        }
        let free = green_value(z, dist3(x, y))?;
        let q = self.q_matrix(z)?;
        let gx: Vec<Complex64> = self
            .centers
            .iter()
            .map(|&c| green_value(z, dist3(x, c)))
            .collect::<Result<_>>()?;
        let gy: Vec<Complex64> = self
            .centers
            .iter()
            .map(|&c| green_value(z, dist3(c, y)))
            .collect::<Result<_>>()?;
        let mut acc = free;
        for j in 0..self.n() {
            for k in 0..self.n() {
                acc += q[(j, k)] * gx[j] * gy[k];
            }
        }
        Ok(acc)
    }

    /// Tabulate the resolvent kernel on an axis-aligned lattice with fixed y.
    /// Lattice points violating preconditions are flagged, not fatal.
    pub fn kernel_grid(&self, z: Complex64, grid: &GridSpec) -> Result<Vec<KernelRow>> {
        // fail fast on global preconditions so per-point flags only cover
        // genuine point-level collisions
        check_off_cut(z)?;
        let q = self.q_matrix(z)?;
        let _ = q;
        let mut rows =
            Vec::with_capacity(grid.shape[0] * grid.shape[1] * grid.shape[2]);
        for i in 0..grid.shape[0] {
            for j in 0..grid.shape[1] {
                for k in 0..grid.shape[2] {
                    let x = [
                        grid.origin[0] + i as f64 * grid.step[0],
                        grid.origin[1] + j as f64 * grid.step[1],
                        grid.origin[2] + k as f64 * grid.step[2],
                    ];
                    match self.resolvent_kernel(z, x, grid.y) {
                        Ok(v) => rows.push(KernelRow {
                            x,
                            re: Some(v.re),
                            im: Some(v.im),
                            excluded: false,
                        }),
                        Err(_) => rows.push(KernelRow {
                            x,
                            re: None,
                            im: None,
                            excluded: true,
                        }),
                    }
                }
            }
        }
        Ok(rows)
    }
}

/// Axis-aligned lattice with a fixed second kernel argument y.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: [f64; 3],
    pub step: [f64; 3],
    pub shape: [usize; 3],
    pub y: [f64; 3],
}

/// One tabulated kernel value; excluded rows carry no value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KernelRow {
    pub x: [f64; 3],
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub excluded: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(alpha: f64) -> PointModel {
        PointModel::from_alpha(vec![[0.0, 0.0, 0.0]], &[alpha]).unwrap()
    }

    fn two_centers(alpha: f64, d: f64) -> PointModel {
        PointModel::from_alpha(vec![[0.0, 0.0, 0.0], [d, 0.0, 0.0]], &[alpha, alpha]).unwrap()
    }

    #[test]
    fn kappa_branch() {
        assert!((kappa(Complex64::ZERO).unwrap() - c(0.0, 1.0)).norm() < 1e-14);
        let z = 1.0 - 16.0 * std::f64::consts::PI.powi(2);
        let k = kappa(c(z, 0.0)).unwrap();
        assert!((k - c(0.0, FOUR_PI)).norm() < 1e-11);
        assert!(matches!(
            kappa(c(2.0, 0.0)),
            Err(Error::OnBranchCut { .. })
        ));
        assert!(matches!(
            kappa(c(1.0, 0.0)),
            Err(Error::OnBranchCut { .. })
        ));
        // kappa(conj z) = -conj(kappa(z)) off the real axis
        for z in [c(0.5, 2.0), c(-3.0, 0.7), c(4.0, 1.0)] {
            let k = kappa(z).unwrap();
            assert!(k.im >= 0.0);
            assert!((k * k - (z - Complex64::ONE)).norm() < 1e-13 * (1.0 + z.norm()));
            let kc = kappa(z.conj()).unwrap();
            assert!((kc + k.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn green_value_examples() {
        let g = green_value(Complex64::ZERO, 1.0).unwrap();
        assert!((g.re - (-1.0f64).exp() / FOUR_PI).abs() < 1e-15);
        assert!(g.im.abs() < 1e-18);
        let ratio = green_value(Complex64::ZERO, 2.0).unwrap() / g;
        assert!((ratio - c((-1.0f64).exp() / 2.0, 0.0)).norm() < 1e-14);
        assert!(matches!(
            green_value(Complex64::ZERO, 0.0),
            Err(Error::NonpositiveRadius { .. })
        ));
        assert!(green_value(c(1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(matches!(
            PointModel::from_alpha(vec![[0.0; 3], [0.0; 3]], &[1.0, 1.0]),
            Err(Error::CoincidentPoints)
        ));
        assert!(PointModel::from_alpha(vec![], &[]).is_err());
        // alpha shorthand via serde
        let m: PointModel =
            serde_json::from_str(r#"{"centers": [[0,0,0]], "alpha": [0.5]}"#).unwrap();
        assert_eq!(m.n(), 1);
        assert!((m.beta0()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn m_matrix_values_and_symmetry() {
        let m = single(0.0).m_matrix(Complex64::ZERO).unwrap();
        assert!((m[(0, 0)] - c(-1.0 / FOUR_PI, 0.0)).norm() < 1e-15);

        let model = two_centers(0.1, 1.0);
        let m = model.m_matrix(Complex64::ZERO).unwrap();
        assert!((m[(0, 1)].re - (-1.0f64).exp() / FOUR_PI).abs() < 1e-15);
        for z in [c(0.3, 1.5), c(-2.0, -0.4)] {
            let m = model.m_matrix(z).unwrap();
            assert!(m.distance(&m.transpose()) == 0.0);
            let mc = model.m_matrix(z.conj()).unwrap();
            assert!(mc.distance(&m.adjoint()) < 1e-12);
        }
    }

    #[test]
    fn secular_examples() {
        // alpha = 1/(4 pi): secular vanishes at z = 0
        let d = single(1.0 / FOUR_PI).secular(Complex64::ZERO).unwrap();
        assert!(d.real_proxy().abs() < 1e-14);
        // beta1 = 0: det beta0 everywhere
        let m = PointModel::new(
            vec![[0.0; 3]],
            ComplexMatrix::identity(1),
            ComplexMatrix::zeros(1, 1),
        )
        .unwrap();
        let d = m.secular(c(-3.0, 0.2)).unwrap();
        assert!((d.real_proxy() - 1.0).abs() < 1e-14);
        // real secular on the real axis below the cut
        let model = two_centers(0.3, 1.7);
        for z in [-5.0, -1.0, 0.5] {
            let ld = model.secular(c(z, 0.0)).unwrap();
            assert!(ld.phase.im.abs() < 1e-12);
        }
    }

    #[test]
    fn single_center_bound_state_sweep() {
        // z0 = 1 - 16 pi^2 alpha^2 for beta0 = [alpha], alpha > 0
        for alpha in [0.01, 1.0 / FOUR_PI, 0.2] {
            let expect = 1.0 - 16.0 * std::f64::consts::PI.powi(2) * alpha * alpha;
            let states = single(alpha).bound_states(expect - 5.0, 0.999).unwrap();
            assert_eq!(states.len(), 1, "alpha = {alpha}");
            assert!((states[0].z - expect).abs() < 1e-9 * (1.0 + expect.abs()));
            assert_eq!(states[0].multiplicity, 1);
            assert!((states[0].energy - (states[0].z - 1.0)).abs() == 0.0);
        }
        // negative coupling binds nothing
        let states = single(-1.0).bound_states(-50.0, 0.9).unwrap();
        assert!(states.is_empty());
        // non-real coupling rejected
        let m = PointModel::new(
            vec![[0.0; 3]],
            ComplexMatrix::identity(1).scale(c(0.0, 1.0)),
            ComplexMatrix::identity(1),
        )
        .unwrap();
        assert!(matches!(
            m.bound_states(-1.0, 0.5),
            Err(Error::NonRealCoupling)
        ));
    }

    #[test]
    fn two_center_roots_match_scalar_factorization() {
        // distance 1, alpha = 1/(4 pi): det factorizes into
        // alpha - (s -+ e^{-s})/(4 pi), s = sqrt(1 - z)
        let alpha = 1.0 / FOUR_PI;
        let model = two_centers(alpha, 1.0);
        let states = model.bound_states(-10.0, 0.999).unwrap();

        let mut oracle_roots = Vec::new();
        for sign in [-1.0f64, 1.0] {
            let mut f =
                |z: f64| alpha - ((1.0 - z).sqrt() + sign * (-(1.0 - z).sqrt()).exp()) / FOUR_PI;
            for b in bracket_scan(&mut f, -10.0, 0.999, 20001).unwrap() {
                oracle_roots.push(bisect(&mut f, &b, Some(1e-13)).unwrap());
            }
        }
        oracle_roots.sort_by(f64::total_cmp);
        assert_eq!(states.len(), oracle_roots.len());
        for (s, o) in states.iter().zip(&oracle_roots) {
            assert!((s.z - o).abs() < 1e-8, "{} vs {}", s.z, o);
        }

        // symmetric root has coefficients proportional to [1, 1]
        let coeffs = model
            .eigenfunction_coefficients(c(states[0].z, 0.0))
            .unwrap();
        assert_eq!(coeffs.cols(), 1);
        let ratio = coeffs[(0, 0)] / coeffs[(1, 0)];
        assert!((ratio - Complex64::ONE).norm() < 1e-6);
    }

    #[test]
    fn eigenfunction_coefficients_errors() {
        let m = single(1.0 / FOUR_PI);
        assert!(matches!(
            m.eigenfunction_coefficients(c(-5.0, 0.0)),
            Err(Error::NotARoot { .. })
        ));
        let coeffs = m.eigenfunction_coefficients(Complex64::ZERO).unwrap();
        assert_eq!((coeffs.rows(), coeffs.cols()), (1, 1));
        assert!((coeffs[(0, 0)].norm() - 1.0).abs() < 1e-12);
        // the eigenfunction is the single decaying Green function
        let v = m
            .eigenfunction_value(&coeffs.column(0), Complex64::ZERO, [0.0, 0.0, 2.0])
            .unwrap();
        assert!((v.norm() - green_value(Complex64::ZERO, 2.0).unwrap().norm()).abs() < 1e-14);
    }

    #[test]
    fn resolvent_kernel_cases() {
        let x = [0.3, -0.2, 0.9];
        let y = [-1.0, 0.4, 0.1];
        // beta1 = 0: free kernel
        let free_model = PointModel::new(
            vec![[0.0; 3]],
            ComplexMatrix::identity(1),
            ComplexMatrix::zeros(1, 1),
        )
        .unwrap();
        let z = c(-2.0, 0.0);
        let v = free_model.resolvent_kernel(z, x, y).unwrap();
        let g = green_value(z, dist3(x, y)).unwrap();
        assert!((v - g).norm() < 1e-14 * g.norm());

        // real symmetric coupling, real z below the cut: real and symmetric
        let model = two_centers(0.3, 1.3);
        let v1 = model.resolvent_kernel(z, x, y).unwrap();
        let v2 = model.resolvent_kernel(z, y, x).unwrap();
        assert!(v1.im.abs() < 1e-10 * v1.norm());
        assert!((v1 - v2).norm() < 1e-10 * v1.norm());

        // scalar assembly oracle: n = 1, alpha = 1/(4 pi), z = -1
        let m1 = single(1.0 / FOUR_PI);
        let z = c(-1.0, 0.0);
        let v = m1.resolvent_kernel(z, x, y).unwrap();
        let s = (1.0f64 - (-1.0)).sqrt();
        let q = -1.0 / (1.0 / FOUR_PI - s / FOUR_PI);
        let gx = green_value(z, dist3(x, [0.0; 3])).unwrap();
        let gy = green_value(z, dist3([0.0; 3], y)).unwrap();
        let oracle = green_value(z, dist3(x, y)).unwrap() + q * gx * gy;
        assert!((v - oracle).norm() < 1e-13 * oracle.norm().max(1.0));

        // coincidences
        assert!(matches!(
            m1.resolvent_kernel(z, x, x),
            Err(Error::CoincidentPoints)
        ));
        assert!(matches!(
            m1.resolvent_kernel(z, [0.0; 3], y),
            Err(Error::CoincidentPoints)
        ));
    }

    #[test]
    fn kernel_grid_flags() {
        let model = single(0.3);
        let grid = GridSpec {
            origin: [0.0, 0.0, 0.0],
            step: [1.0, 1.0, 1.0],
            shape: [2, 1, 1],
            y: [5.0, 0.0, 0.0],
        };
        let rows = model.kernel_grid(c(-2.0, 0.0), &grid).unwrap();
        assert_eq!(rows.len(), 2);
        // the origin is a center: flagged, not fatal
        assert!(rows[0].excluded && rows[0].re.is_none());
        assert!(!rows[1].excluded && rows[1].re.is_some());
    }

    #[test]
    fn invariances() {
        let model = two_centers(0.2, 1.4);
        let shifted = PointModel::new(
            model
                .centers()
                .iter()
                .map(|&[a, b, cc]| [a + 3.0, b - 1.0, cc + 0.5])
                .collect(),
            model.beta0().clone(),
            model.beta1().clone(),
        )
        .unwrap();
        let perm = PointModel::new(
            vec![model.centers()[1], model.centers()[0]],
            model.beta0().clone(),
            model.beta1().clone(),
        )
        .unwrap();
        for z in [c(-4.0, 0.0), c(0.2, 1.1), c(-0.5, -2.0)] {
            let a = model.secular(z).unwrap();
            let b = shifted.secular(z).unwrap();
            assert!((a.real_proxy() - b.real_proxy()).abs() < 1e-12 * (1.0 + a.real_proxy().abs()));
            assert!((a.phase - b.phase).norm() < 1e-12);
            // beta0 = alpha I is permutation invariant, so conjugation is a no-op
            let p = perm.secular(z).unwrap();
            assert!((a.phase - p.phase).norm() < 1e-12);
            assert!(
                (a.log_modulus - p.log_modulus).abs() < 1e-12 * (1.0 + a.log_modulus.abs())
            );
        }
    }
}
