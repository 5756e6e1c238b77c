//! Seeded identity suite driving every matrix identity of the triplet,
//! extensions, and cayley modules over random instances. Deterministic for a
//! fixed seed, including under parallel execution: each instance derives its
//! own generator from the seed and the instance index.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{cayley_transform, characteristic_function, vartheta_identity_residual, CharFnContext};
use crate::error::Result;
use crate::extensions::{
    bkv_extension, hilbert_identity_residual, minimal_domain_basis, q_difference_residual,
    q_operator, reconstruct_default, resolvent_equation_residual, selfadjointness_residual,
    BoundaryPair,
};
use crate::numerics::{
    eig_hermitian, inverse, rcond, spectral_norm, ComplexMatrix,
};
use crate::triplet::{DecomposedVector, InstanceGenerator, OperatorTriplet};

/// Configuration of one verification run.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub instances: usize,
    pub n_range: (usize, usize),
    pub m_range: (usize, usize),
    pub tol: f64,
}

impl VerifyConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        let (n_lo, n_hi) = self.n_range;
        let (m_lo, m_hi) = self.m_range;
        if self.instances == 0 {
            return Err("instances must be >= 1".into());
        }
        if !(1 <= m_lo && m_lo <= m_hi && m_hi <= n_hi && 2 <= n_lo && n_lo <= n_hi && n_hi <= 64)
        {
            return Err(format!(
                "need 1 <= m <= N <= 64 with nonempty ranges, got N in [{n_lo}, {n_hi}], m in [{m_lo}, {m_hi}]"
            ));
        }
        if !(self.tol > 0.0) {
            return Err("tol must be positive".into());
        }
        Ok(())
    }
}

/// Worst residual of one identity over the whole run, with the tolerance it
/// was compared against.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentityResult {
    pub worst_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Machine-readable outcome of the identity suite. `elapsed_seconds` is
/// excluded from serialization so reports stay byte-identical across runs.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub version: String,
    pub seed: u64,
    pub instances: usize,
    pub n_range: (usize, usize),
    pub m_range: (usize, usize),
    pub base_tolerance: f64,
    pub identities: BTreeMap<String, IdentityResult>,
    pub pass: bool,
    #[serde(skip)]
    pub elapsed_seconds: f64,
}

/// Identities certified at 10x the base tolerance (reconstruction-based, as
/// stated in their contracts).
const RELAXED: &[&str] = &["reconstruction_z_independence", "bkv_coincidence"];

fn record(map: &mut BTreeMap<String, f64>, name: &str, value: f64) {
    let slot = map.entry(name.to_string()).or_insert(0.0);
    if value > *slot {
        *slot = value;
    }
}

fn rel(num: f64, scale: f64) -> f64 {
    num / scale.max(f64::MIN_POSITIVE)
}

/// Residuals of every §3-level identity at one (z, zeta) pair.
fn triplet_identities(
    t: &OperatorTriplet,
    gen: &mut InstanceGenerator,
    z: Complex64,
    zeta: Complex64,
    out: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let rz = t.resolvent(z)?;
    let sz = t.solution_operator(z)?;
    let szeta = t.solution_operator(zeta)?;
    let scale = sz.frobenius_norm().max(szeta.frobenius_norm());

    // S_z - S_zeta = (z - zeta) R_z S_zeta
    let lhs = &sz - &szeta;
    let rhs = (&rz * &szeta).scale(z - zeta);
    record(out, "s_resolvent_identity", rel(lhs.distance(&rhs), scale));

    // (A0 - z) S_z = A0 Pi
    let n = t.dim_h();
    let shifted = t.a0() - &ComplexMatrix::identity(n).scale(z);
    let a0pi = t.a0() * t.pi();
    record(
        out,
        "range_of_solution_operator",
        rel((&shifted * &sz).distance(&a0pi), a0pi.frobenius_norm()),
    );

    // M(z) - M(zeta) = (z - zeta) (S_{z bar})* S_zeta
    let mz = t.m_operator(z)?;
    let mzeta = t.m_operator(zeta)?;
    let bridge = &t.solution_operator_bar_adjoint(z)? * &szeta;
    record(
        out,
        "m_difference_formula",
        rel(
            (&mz - &mzeta).distance(&bridge.scale(z - zeta)),
            mz.frobenius_norm().max(mzeta.frobenius_norm()),
        ),
    );

    // M(z bar) = M(z)*
    let mbar = t.m_operator(z.conj())?;
    record(
        out,
        "m_conjugate_symmetry",
        rel(mbar.distance(&mz.adjoint()), mz.frobenius_norm()),
    );

    // Herglotz: Im M(z) = Im z (S_z)* S_z, PSD, for Im z > 0
    if z.im > 0.0 {
        let im_m = (&mz - &mz.adjoint()).scale(Complex64::new(0.0, -0.5));
        let psd_form = (&sz.adjoint() * &sz).scale(Complex64::new(z.im, 0.0));
        record(
            out,
            "herglotz_representation",
            rel(im_m.distance(&psd_form), mz.frobenius_norm()),
        );
        let (eigs, _) = eig_hermitian(&im_m, 1e-8)?;
        let min_eig = eigs.first().copied().unwrap_or(0.0);
        record(
            out,
            "herglotz_psd",
            rel((-min_eig).max(0.0), mz.frobenius_norm()),
        );
    }

    // Green's formula on random decomposed vectors
    let d1 = DecomposedVector::from_parts(t, gen.vector(n), gen.vector(t.dim_e()));
    let d2 = DecomposedVector::from_parts(t, gen.vector(n), gen.vector(t.dim_e()));
    record(
        out,
        "green_formula",
        rel(t.green_form_residual(&d1, &d2), d1.scale_norm() * d2.scale_norm()),
    );
    Ok(())
}

/// Per-sample residuals of the §4–§5 identities for a Hermitian boundary pair.
fn extension_sample_identities(
    t: &OperatorTriplet,
    pair: &BoundaryPair,
    z: Complex64,
    zeta: Complex64,
    out: &mut BTreeMap<String, f64>,
) -> Result<()> {
    record(out, "q_difference_lemma", q_difference_residual(t, pair, z, zeta)?);
    record(
        out,
        "krein_first_resolvent_equation",
        resolvent_equation_residual(t, pair, z, zeta)?,
    );
    record(
        out,
        "hilbert_identity",
        rel(
            hilbert_identity_residual(t, pair, z)?,
            t.resolvent(z)?.frobenius_norm(),
        ),
    );
    Ok(())
}

/// Once-per-instance residuals built on the reconstructed extension.
fn extension_instance_identities(
    t: &OperatorTriplet,
    pair: &BoundaryPair,
    out: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let ext = reconstruct_default(t, pair)?;
    record(out, "reconstruction_z_independence", ext.z_independence_residual);

    // A00 inclusion: the extension agrees with A0 on the minimal domain
    let basis = minimal_domain_basis(t);
    if basis.cols() > 0 {
        let diff = &(&ext.matrix * &basis) - &(t.a0() * &basis);
        record(out, "a00_inclusion", rel(diff.frobenius_norm(), t.a0_norm()));
    }

    // Q-representation near z = 0
    let q0 = q_operator(t, pair, Complex64::ZERO)?;
    let w = Complex64::new(0.0, 0.1 * t.spectral_gap());
    let qw = q_operator(t, pair, w)?;
    let inv = inverse(&ext.matrix)?;
    let pencil = inverse(&(&ComplexMatrix::identity(t.dim_h()) - &inv.scale(w)))?;
    let rep = &q0 + &(&(&(&q0 * &t.pi().adjoint()) * &pencil) * &(t.pi() * &q0)).scale(w);
    record(
        out,
        "q_representation",
        rel(qw.distance(&rep), qw.frobenius_norm().max(q0.frobenius_norm())),
    );

    // selfadjointness for the Hermitian pair
    record(
        out,
        "selfadjoint_inverse",
        rel(selfadjointness_residual(t, pair)?, inv.frobenius_norm()),
    );
    Ok(())
}

/// Residuals of the Neumann-like corollary, when Lambda is invertible.
fn neumann_identities(t: &OperatorTriplet, out: &mut BTreeMap<String, f64>) -> Result<()> {
    if rcond(t.lambda()) <= 1e-6 {
        // skip near-singular Lambda draws; the corollary assumes invertibility
        return Ok(());
    }
    let (ext, res_m_inverse, res_pi_form) = crate::extensions::neumann_extension(t)?;
    record(out, "neumann_z_independence", ext.z_independence_residual);
    record(out, "neumann_m_inverse_formula", res_m_inverse);
    record(out, "neumann_pi_form", res_pi_form);
    Ok(())
}

/// BKV extension against its closed-form inverse.
fn bkv_identities(
    t: &OperatorTriplet,
    gen: &mut InstanceGenerator,
    out: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let n = t.dim_h();
    let g = gen.matrix(n, n);
    let b = (&g + &g.adjoint()).scale(Complex64::new(0.5, 0.0));
    let pbp = &(&t.pi().adjoint() * &b) * t.pi();
    if rcond(&pbp) <= 1e-6 {
        return Ok(());
    }
    let ext = bkv_extension(t, &b)?;
    let closed = &(t.a0_inv().clone()) + &(&(t.pi() * &inverse(&pbp)?) * &t.pi().adjoint());
    let inv = inverse(&ext.matrix)?;
    record(
        out,
        "bkv_coincidence",
        rel(inv.distance(&closed), closed.frobenius_norm()),
    );
    Ok(())
}

/// Residuals of the §6 identities.
fn cayley_identities(
    ctx: &CharFnContext,
    t: &OperatorTriplet,
    z_upper: Complex64,
    out: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let a = cayley_transform(t, z_upper)?;
    let b = characteristic_function(ctx, t, z_upper)?;
    record(
        out,
        "theta_cayley_identity",
        rel(a.distance(&b), a.frobenius_norm()),
    );
    record(out, "theta_contractivity", (spectral_norm(&a) - 1.0).max(0.0));
    let z_lower = Complex64::new(0.0, -0.5 * t.spectral_gap());
    record(
        out,
        "vartheta_identity",
        rel(
            vartheta_identity_residual(ctx, t, z_lower)?,
            ctx.u().frobenius_norm(),
        ),
    );
    Ok(())
}

fn instance_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Run all identities for one instance; returns worst residuals per identity.
fn run_instance(cfg: &VerifyConfig, index: usize) -> Result<BTreeMap<String, f64>> {
    let mut dims_rng = ChaCha8Rng::seed_from_u64(instance_seed(cfg.seed, index));
    let n = dims_rng.gen_range(cfg.n_range.0..=cfg.n_range.1);
    let m_hi = cfg.m_range.1.min(n);
    let m = dims_rng.gen_range(cfg.m_range.0.min(m_hi)..=m_hi);
    let mut gen = InstanceGenerator::from_seed(instance_seed(cfg.seed, index) ^ 0x5DEE_CE66);

    let t = gen.triplet(n, m);
    let mut out = BTreeMap::new();

    let pair = BoundaryPair::new(gen.hermitian(m), ComplexMatrix::identity(m))
        .expect("identity beta1 is never all-zero");
    if pair.certify(&t).is_err() {
        // rare near-singular beta0 + Lambda draw: skip the pair-dependent part
        for k in 0..8 {
            let z = gen.regular_z(&t, k % 2 == 0);
            let zeta = gen.regular_z(&t, false);
            triplet_identities(&t, &mut gen, z, zeta, &mut out)?;
        }
        return Ok(out);
    }

    let ctx = CharFnContext::new(&t)?;
    for k in 0..8 {
        let z = gen.regular_z(&t, k % 2 == 0);
        let zeta = gen.regular_z(&t, false);
        triplet_identities(&t, &mut gen, z, zeta, &mut out)?;
        if q_operator(&t, &pair, z).is_ok() && q_operator(&t, &pair, zeta).is_ok() {
            extension_sample_identities(&t, &pair, z, zeta, &mut out)?;
        }
        if z.im > 0.0 {
            cayley_identities(&ctx, &t, z, &mut out)?;
        }
    }
    extension_instance_identities(&t, &pair, &mut out)?;
    neumann_identities(&t, &mut out)?;
    bkv_identities(&t, &mut gen, &mut out)?;
    Ok(out)
}

/// Run the full suite; deterministic for a fixed config.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let start = std::time::Instant::now();
    let per_instance: Vec<BTreeMap<String, f64>> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| run_instance(cfg, i))
        .collect::<Result<_>>()?;

    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    for map in per_instance {
        for (k, v) in map {
            record(&mut worst, &k, v);
        }
    }
    let identities: BTreeMap<String, IdentityResult> = worst
        .into_iter()
        .map(|(name, worst_residual)| {
            let tolerance = if RELAXED.contains(&name.as_str()) {
                10.0 * cfg.tol
            } else {
                cfg.tol
            };
            let pass = worst_residual <= tolerance;
            (
                name,
                IdentityResult {
                    worst_residual,
                    tolerance,
                    pass,
                },
            )
        })
        .collect();
    let pass = identities.values().all(|r| r.pass);
    Ok(VerifyReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        instances: cfg.instances,
        n_range: cfg.n_range,
        m_range: cfg.m_range,
        base_tolerance: cfg.tol,
        identities,
        pass,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}
