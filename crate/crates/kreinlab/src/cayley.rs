//! Cayley transform of the M-operator and the characteristic function of the
//! canonical dissipative extension, with the cross-identity linking the two
//! closed forms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    eig_hermitian, inverse, rcond, solve, spectral_norm, ComplexMatrix, RCOND_THRESHOLD,
};
use crate::triplet::OperatorTriplet;

/// Precomputed data for the characteristic function: the inverse
/// T_op = A0^{-1} - Pi (Lambda - iI)^{-1} Pi* of the dissipative extension and
/// the unitary U = (Lambda - iI)(Lambda + iI)^{-1}.
#[derive(Clone, Debug)]
pub struct CharFnContext {
    t_op: ComplexMatrix,
    u: ComplexMatrix,
    lambda_plus_i_inv: ComplexMatrix,
    lambda_minus_i_inv: ComplexMatrix,
}

impl CharFnContext {
    pub fn new(triplet: &OperatorTriplet) -> Result<Self> {
        let m = triplet.dim_e();
        let i_unit = Complex64::new(0.0, 1.0);
        let lam = triplet.lambda();
        let lam_minus = lam - &ComplexMatrix::identity(m).scale(i_unit);
        let lam_plus = lam + &ComplexMatrix::identity(m).scale(i_unit);
        // Lambda Hermitian: Lambda +- iI always invertible
        let lambda_minus_i_inv = inverse(&lam_minus)?;
        let lambda_plus_i_inv = inverse(&lam_plus)?;
        let t_op = triplet.a0_inv()
            - &(&(triplet.pi() * &lambda_minus_i_inv) * &triplet.pi().adjoint());
        let u = &lam_minus * &lambda_plus_i_inv;

        let unitarity = (&u.adjoint() * &u).distance(&ComplexMatrix::identity(m));
        if unitarity > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "U failed the unitarity certificate: {unitarity:e}"
            )));
        }
        // Im(T_op*) = Pi (Lambda + iI)^{-1} (Lambda - iI)^{-1} Pi* must be PSD
        let t_adj = t_op.adjoint();
        let im_part = (&t_adj - &t_adj.adjoint()).scale(Complex64::new(0.0, -0.5));
        let (eigs, _) = eig_hermitian(&im_part, 1e-8)?;
        let floor = -1e-10 * spectral_norm(&im_part).max(1.0);
        if eigs.iter().any(|&e| e < floor) {
            return Err(Error::InvalidInput(format!(
                "Im(T_op*) not positive semidefinite: min eigenvalue {:e}",
                eigs[0]
            )));
        }
        Ok(Self {
            t_op,
            u,
            lambda_plus_i_inv,
            lambda_minus_i_inv,
        })
    }

    pub fn t_op(&self) -> &ComplexMatrix {
        &self.t_op
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }
}

/// Theta(z) = (M(z) - iI)(M(z) + iI)^{-1}.
pub fn cayley_transform(triplet: &OperatorTriplet, z: Complex64) -> Result<ComplexMatrix> {
    let m = triplet.m_operator(z)?;
    let dim = triplet.dim_e();
    let i_unit = Complex64::new(0.0, 1.0);
    let num = &m - &ComplexMatrix::identity(dim).scale(i_unit);
    let den = &m + &ComplexMatrix::identity(dim).scale(i_unit);
    if rcond(&den) <= RCOND_THRESHOLD {
        return Err(Error::SingularShift { z });
    }
    // (M - iI)(M + iI)^{-1} = [(M + iI)^{-*} (M - iI)^*]^*
    Ok(solve(&den.adjoint(), &num.adjoint())?.adjoint())
}

/// Theta(z) via the closed form
/// U + 2iz (Lambda + iI)^{-1} Pi* (I - z T_op*)^{-1} Pi (Lambda + iI)^{-1}.
pub fn characteristic_function(
    ctx: &CharFnContext,
    triplet: &OperatorTriplet,
    z: Complex64,
) -> Result<ComplexMatrix> {
    let n = triplet.dim_h();
    let pencil = &ComplexMatrix::identity(n) - &ctx.t_op.adjoint().scale(z);
    if rcond(&pencil) <= RCOND_THRESHOLD {
        return Err(Error::SingularPencil { z });
    }
    let right = solve(&pencil, &(triplet.pi() * &ctx.lambda_plus_i_inv))?;
    let correction = (&(&ctx.lambda_plus_i_inv * &triplet.pi().adjoint()) * &right)
        .scale(Complex64::new(0.0, 2.0) * z);
    Ok(&ctx.u + &correction)
}

/// vartheta(zeta) = I + 2i (Lambda + iI)^{-1} Pi* (T_op - zeta I)^{-1} Pi (Lambda - iI)^{-1}.
pub fn vartheta(
    ctx: &CharFnContext,
    triplet: &OperatorTriplet,
    zeta: Complex64,
) -> Result<ComplexMatrix> {
    let n = triplet.dim_h();
    let m = triplet.dim_e();
    let pencil = &ctx.t_op - &ComplexMatrix::identity(n).scale(zeta);
    if rcond(&pencil) <= RCOND_THRESHOLD {
        return Err(Error::SingularPencil { z: zeta });
    }
    let right = solve(&pencil, &(triplet.pi() * &ctx.lambda_minus_i_inv))?;
    let correction = (&(&ctx.lambda_plus_i_inv * &triplet.pi().adjoint()) * &right)
        .scale(Complex64::new(0.0, 2.0));
    Ok(&ComplexMatrix::identity(m) + &correction)
}

/// Frobenius residual of vartheta(1/z) - U [Theta(z bar)]* for z in the lower
/// half plane.
pub fn vartheta_identity_residual(
    ctx: &CharFnContext,
    triplet: &OperatorTriplet,
    z: Complex64,
) -> Result<f64> {
    if z.im >= 0.0 || z.norm() == 0.0 {
        return Err(Error::InvalidInput(
            "vartheta identity requires z in the open lower half plane".into(),
        ));
    }
    let lhs = vartheta(ctx, triplet, z.inv())?;
    let theta = cayley_transform(triplet, z.conj())?;
    let rhs = &ctx.u * &theta.adjoint();
    Ok(lhs.distance(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triplet::InstanceGenerator;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cayley_at_zero() {
        let mut gen = InstanceGenerator::from_seed(51);
        // Lambda = 0: Theta(0) = (-iI)(iI)^{-1} = -I
        let t = OperatorTriplet::validate(
            ComplexMatrix::diag(&[2.0, 3.0]),
            ComplexMatrix::new(2, 1, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            ComplexMatrix::zeros(1, 1),
        )
        .unwrap();
        let theta = cayley_transform(&t, Complex64::ZERO).unwrap();
        assert!(theta.distance(&ComplexMatrix::identity(1).scale(c(-1.0, 0.0))) < 1e-13);

        // general Lambda: Theta(0) = U
        let t = gen.triplet(5, 2);
        let ctx = CharFnContext::new(&t).unwrap();
        let theta = cayley_transform(&t, Complex64::ZERO).unwrap();
        assert!(theta.distance(ctx.u()) < 1e-11);
        let theta = characteristic_function(&ctx, &t, Complex64::ZERO).unwrap();
        assert!(theta.distance(ctx.u()) < 1e-13);
    }

    #[test]
    fn closed_form_matches_cayley_and_is_contractive() {
        let mut gen = InstanceGenerator::from_seed(53);
        for _ in 0..4 {
            let t = gen.triplet(6, 2);
            let ctx = CharFnContext::new(&t).unwrap();
            let z = gen.regular_z(&t, true);
            let a = cayley_transform(&t, z).unwrap();
            let b = characteristic_function(&ctx, &t, z).unwrap();
            assert!(a.distance(&b) <= 1e-9 * a.frobenius_norm().max(1.0));
            assert!(spectral_norm(&a) <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn near_zero_channel_perturbation() {
        // ||Pi|| = 1e-6: Theta(z) stays within O(1e-12) of U
        let mut gen = InstanceGenerator::from_seed(55);
        let base = gen.triplet(4, 2);
        let t = OperatorTriplet::validate(
            base.a0().clone(),
            base.pi().scale(c(1e-6, 0.0)),
            base.lambda().clone(),
        )
        .unwrap();
        let ctx = CharFnContext::new(&t).unwrap();
        let z = gen.regular_z(&t, true);
        let theta = characteristic_function(&ctx, &t, z).unwrap();
        assert!(theta.distance(ctx.u()) < 1e-9);
    }

    #[test]
    fn vartheta_identity() {
        // scalar case first
        let t = OperatorTriplet::validate(
            ComplexMatrix::diag(&[2.0]),
            ComplexMatrix::identity(1),
            ComplexMatrix::zeros(1, 1),
        )
        .unwrap();
        let ctx = CharFnContext::new(&t).unwrap();
        let z = c(0.3, -0.7);
        assert!(vartheta_identity_residual(&ctx, &t, z).unwrap() < 1e-12);

        let mut gen = InstanceGenerator::from_seed(57);
        for _ in 0..3 {
            let t = gen.triplet(5, 2);
            let ctx = CharFnContext::new(&t).unwrap();
            let g = t.spectral_gap();
            let z = c(0.0, -0.5 * g);
            assert!(vartheta_identity_residual(&ctx, &t, z).unwrap() < 1e-9);
        }
        // upper half plane input rejected
        let t = gen.triplet(4, 2);
        let ctx = CharFnContext::new(&t).unwrap();
        assert!(vartheta_identity_residual(&ctx, &t, c(0.0, 0.5)).is_err());
    }

    #[test]
    fn dissipativity_certificate() {
        let mut gen = InstanceGenerator::from_seed(59);
        let t = gen.triplet(7, 3);
        let ctx = CharFnContext::new(&t).unwrap();
        // Im(T_op*) equals the closed form Pi (Lambda+iI)^{-1} (Lambda-iI)^{-1} Pi*
        let m = t.dim_e();
        let i_unit = c(0.0, 1.0);
        let plus = inverse(&(t.lambda() + &ComplexMatrix::identity(m).scale(i_unit))).unwrap();
        let minus = inverse(&(t.lambda() - &ComplexMatrix::identity(m).scale(i_unit))).unwrap();
        let closed = &(t.pi() * &(&plus * &minus)) * &t.pi().adjoint();
        let t_adj = ctx.t_op().adjoint();
        let im_part = (&t_adj - &t_adj.adjoint()).scale(c(0.0, -0.5));
        assert!(im_part.distance(&closed) < 1e-10 * closed.frobenius_norm().max(1.0));
    }
}
