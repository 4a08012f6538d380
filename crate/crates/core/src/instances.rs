//! Seeded random instances for tests and experiments.
//!
//! The seed is read from `FKT_SEED` when present.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{FiniteComplex, MetricFamily};
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::scalar::{Real, C};
use crate::vn::{Algebra, CommutantOp, Module};

pub const SEED_ENV: &str = "FKT_SEED";
pub const DEFAULT_SEED: u64 = 0x5eed_f00d;

/// `FKT_SEED` if set and parseable, the default seed otherwise.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_from_env() -> ChaCha8Rng {
    rng(seed_from_env())
}

fn unit<T: Real, R: Rng>(rng: &mut R) -> T {
    T::lit(rng.gen_range(-1.0..1.0))
}

/// Matrix with entries uniform in the unit square of `ℂ`.
pub fn matrix<T: Real, R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| C::new(unit(rng), unit(rng)))
}

/// `factors` matrix factors of size at most `max_size`, random weights.
pub fn algebra<T: Real, R: Rng>(rng: &mut R, factors: usize, max_size: usize) -> Algebra<T> {
    let spec: Vec<(usize, T)> = (0..factors.max(1)).map(|_| (rng.gen_range(1..=max_size.max(1)), T::lit(rng.gen_range(0.2..1.0)))).collect();
    Algebra::new(&spec, true).expect("positive weights normalize")
}

pub fn module<T: Real, R: Rng>(rng: &mut R, alg: &Algebra<T>, min_mult: usize, max_mult: usize) -> Module<T> {
    let mults: Vec<usize> = (0..alg.num_factors()).map(|_| rng.gen_range(min_mult..=max_mult)).collect();
    Module::new(alg, &mults).expect("one multiplicity per factor")
}

pub fn operator<T: Real, R: Rng>(rng: &mut R, dom: &Module<T>, cod: &Module<T>) -> CommutantOp<T> {
    CommutantOp::from_blocks_fn(dom, cod, |_, r, c| matrix(rng, r, c))
}

/// Endomorphism whose blocks are shifted away from singularity.
pub fn invertible<T: Real, R: Rng>(rng: &mut R, m: &Module<T>) -> CommutantOp<T> {
    CommutantOp::from_blocks_fn(m, m, |_, k, _| {
        let shift = CMatrix::identity(k).scale_re(T::lit(1.5));
        &matrix(rng, k, k) + &shift
    })
}

/// `X X* + ε`, positive definite.
pub fn positive<T: Real, R: Rng>(rng: &mut R, m: &Module<T>) -> CommutantOp<T> {
    CommutantOp::from_blocks_fn(m, m, |_, k, _| {
        let x = matrix(rng, k, k);
        &(&x * &x.adjoint()) + &CMatrix::identity(k).scale_re(T::lit(0.2))
    })
}

/// Self-adjoint with entries of size about `scale`.
pub fn self_adjoint<T: Real, R: Rng>(rng: &mut R, m: &Module<T>, scale: T) -> CommutantOp<T> {
    CommutantOp::from_blocks_fn(m, m, |_, k, _| matrix(rng, k, k).hermitian_part().scale_re(scale))
}

/// Orthogonal projector onto the complement of the column space of `a`.
fn complement_projector<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let eig = (a * &a.adjoint()).hermitian_part().eigh().expect("small Hermitian matrix");
    let top = eig.values.last().copied().unwrap_or_else(T::zero).max(T::one());
    let idx: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] < T::tol(1e-12) * top).collect();
    let w = eig.vectors.select_columns(&idx);
    &w * &w.adjoint()
}

/// Random complex with `degrees` modules (multiplicities in `1..=max_block`)
/// and `d_{q+1} d_q = 0` by construction: `d_q = M_q Q_q` with `Q_q`
/// projecting away from the image of `d_{q-1}` and `M_q` of random rank.
pub fn complex<T: Real, R: Rng>(rng: &mut R, alg: &Algebra<T>, degrees: usize, max_block: usize) -> FiniteComplex<T> {
    let modules: Vec<Module<T>> = (0..degrees.max(1)).map(|_| module(rng, alg, 1, max_block)).collect();
    let mut diffs: Vec<CommutantOp<T>> = Vec::new();
    for q in 0..modules.len() - 1 {
        let (dom, cod) = (&modules[q], &modules[q + 1]);
        let prev = diffs.last().cloned();
        let d = CommutantOp::from_blocks_fn(dom, cod, |i, r, c| {
            let inner = rng.gen_range(0..=r.min(c));
            let m = &matrix(rng, r, inner) * &matrix(rng, inner, c);
            match &prev {
                Some(p) => &m * &complement_projector(p.block(i)),
                None => m,
            }
        });
        diffs.push(d);
    }
    FiniteComplex::new(modules, diffs, 0).expect("shapes are consistent")
}

/// `0 → M →d M → 0` with invertible `d`.
pub fn acyclic_two_term<T: Real, R: Rng>(rng: &mut R, alg: &Algebra<T>, max_block: usize) -> FiniteComplex<T> {
    let m = module(rng, alg, 1, max_block);
    FiniteComplex::two_term(&invertible(rng, &m)).expect("endomorphism")
}

/// `exp(u B_q)` with random self-adjoint generators of size about `scale`.
pub fn exp_family<T: Real, R: Rng>(rng: &mut R, c: &FiniteComplex<T>, scale: T) -> Result<MetricFamily<T>> {
    let gens = c.modules().iter().map(|m| self_adjoint(rng, m, scale)).collect();
    MetricFamily::exp(c, gens)
}

/// Exponential family whose generators are traceless in every degree.
pub fn traceless_family<T: Real, R: Rng>(rng: &mut R, c: &FiniteComplex<T>, scale: T) -> Result<MetricFamily<T>> {
    let gens = c
        .modules()
        .iter()
        .map(|m| {
            let b = self_adjoint(rng, m, scale);
            let dim = m.dim();
            if dim == T::zero() {
                return b;
            }
            let tr = crate::vn::canonical_trace(&b).expect("endomorphism").re;
            b.sub(&CommutantOp::scalar(m, tr / dim)).expect("same module")
        })
        .collect();
    MetricFamily::exp(c, gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_complex;

    #[test]
    fn random_complexes_are_complexes() {
        let mut r = rng(7);
        for _ in 0..20 {
            let alg = algebra::<f64, _>(&mut r, 2, 3);
            let c = complex(&mut r, &alg, 4, 5);
            assert!(validate_complex(&c).valid, "{:?}", validate_complex(&c));
        }
    }

    #[test]
    fn seeding_is_deterministic() {
        let a = matrix::<f64, _>(&mut rng(3), 2, 2);
        let b = matrix::<f64, _>(&mut rng(3), 2, 2);
        assert_eq!(a, b);
    }
}
