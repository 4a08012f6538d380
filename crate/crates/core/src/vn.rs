//! Finite von Neumann algebras modelled as direct sums of matrix factors,
//! their Hilbertian modules, the canonical trace on the commutant and the
//! Fuglede-Kadison determinant.
//!
//! A factor `M_n` carries the trace `w * Tr`, normalized so that
//! `sum_i w_i n_i = 1`. A module over the algebra is determined up to
//! isomorphism by one multiplicity `k_i` per factor, and an operator in the
//! commutant is a list of `k'_i x k_i` complex blocks. The canonical trace of
//! an endomorphism is `sum_i w_i Tr(T_i)`; with this normalization the free
//! module `l2(A)` (multiplicities `k_i = n_i`) has dimension one.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Real, C};

/// Tolerance on `sum_i w_i n_i = 1`.
pub const TRACE_NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor<T: Real> {
    pub size: usize,
    pub weight: T,
}

/// Direct sum of matrix factors `M_{n_i}` with trace weights `w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra<T: Real> {
    factors: Vec<Factor<T>>,
}

impl<T: Real> Algebra<T> {
    /// Builds the algebra, rejecting an unnormalized trace unless
    /// `auto_normalize` is set, in which case the weights are rescaled.
    pub fn new(factors: &[(usize, T)], auto_normalize: bool) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyFactorList);
        }
        for (i, &(n, w)) in factors.iter().enumerate() {
            if n == 0 {
                return Err(Error::InvalidFactor(format!("factor {i} has size 0")));
            }
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::InvalidFactor(format!("factor {i} has weight {w}")));
            }
        }
        let sum: T = factors.iter().map(|&(n, w)| w * T::from_count(n)).sum();
        let mut factors: Vec<Factor<T>> = factors.iter().map(|&(size, weight)| Factor { size, weight }).collect();
        if (sum - T::one()).abs() > T::tol(TRACE_NORMALIZATION_TOL) {
            if !auto_normalize {
                return Err(Error::NonNormalizedTrace { sum: sum.as_f64() });
            }
            for f in &mut factors {
                f.weight /= sum;
            }
        }
        Ok(Self { factors })
    }

    /// `M_n` with its normalized trace `Tr / n`.
    pub fn matrix(n: usize) -> Self {
        Self::new(&[(n, T::one() / T::from_count(n))], false).expect("normalized by construction")
    }

    pub fn factors(&self) -> &[Factor<T>] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn weights(&self) -> impl Iterator<Item = T> + '_ {
        self.factors.iter().map(|f| f.weight)
    }
}

/// Instantiates an algebra from `(size, weight)` pairs.
pub fn make_algebra<T: Real>(factors: &[(usize, T)], auto_normalize: bool) -> Result<Algebra<T>> {
    Algebra::new(factors, auto_normalize)
}

/// Finitely generated Hilbertian module, given by its multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct Module<T: Real> {
    algebra: Algebra<T>,
    mults: Vec<usize>,
}

impl<T: Real> Module<T> {
    pub fn new(algebra: &Algebra<T>, mults: &[usize]) -> Result<Self> {
        if mults.len() != algebra.num_factors() {
            return Err(Error::ShapeMismatch(format!(
                "{} multiplicities for {} factors",
                mults.len(),
                algebra.num_factors()
            )));
        }
        Ok(Self { algebra: algebra.clone(), mults: mults.to_vec() })
    }

    pub fn zero(algebra: &Algebra<T>) -> Self {
        Self { algebra: algebra.clone(), mults: vec![0; algebra.num_factors()] }
    }

    /// `l2(A)^copies`.
    pub fn free(algebra: &Algebra<T>, copies: usize) -> Self {
        let mults = algebra.factors().iter().map(|f| f.size * copies).collect();
        Self { algebra: algebra.clone(), mults }
    }

    pub fn algebra(&self) -> &Algebra<T> {
        &self.algebra
    }

    pub fn mults(&self) -> &[usize] {
        &self.mults
    }

    pub fn is_zero(&self) -> bool {
        self.mults.iter().all(|&k| k == 0)
    }

    /// von Neumann dimension `sum_i w_i k_i`.
    pub fn dim(&self) -> T {
        self.algebra.weights().zip(&self.mults).map(|(w, &k)| w * T::from_count(k)).sum()
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let mults = self.mults.iter().zip(&other.mults).map(|(a, b)| a + b).collect();
        Ok(Self { algebra: self.algebra.clone(), mults })
    }
}

/// Operator in the commutant: one `k'_i x k_i` block per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantOp<T: Real> {
    domain: Module<T>,
    codomain: Module<T>,
    blocks: Vec<CMatrix<T>>,
}

impl<T: Real> CommutantOp<T> {
    pub fn new(domain: &Module<T>, codomain: &Module<T>, blocks: Vec<CMatrix<T>>) -> Result<Self> {
        if domain.algebra != codomain.algebra {
            return Err(Error::AlgebraMismatch);
        }
        if blocks.len() != domain.mults.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks for {} factors",
                blocks.len(),
                domain.mults.len()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            let want = (codomain.mults[i], domain.mults[i]);
            if b.shape() != want {
                return Err(Error::ShapeMismatch(format!("block {i} is {:?}, expected {:?}", b.shape(), want)));
            }
        }
        Ok(Self { domain: domain.clone(), codomain: codomain.clone(), blocks })
    }

    pub fn endo(module: &Module<T>, blocks: Vec<CMatrix<T>>) -> Result<Self> {
        Self::new(module, module, blocks)
    }

    pub fn from_blocks_fn(domain: &Module<T>, codomain: &Module<T>, mut f: impl FnMut(usize, usize, usize) -> CMatrix<T>) -> Self {
        let blocks = (0..domain.mults.len()).map(|i| f(i, codomain.mults[i], domain.mults[i])).collect();
        Self { domain: domain.clone(), codomain: codomain.clone(), blocks }
    }

    pub fn identity(module: &Module<T>) -> Self {
        Self::scalar(module, T::one())
    }

    pub fn scalar(module: &Module<T>, s: T) -> Self {
        Self::from_blocks_fn(module, module, |_, k, _| CMatrix::identity(k).scale_re(s))
    }

    pub fn zero(domain: &Module<T>, codomain: &Module<T>) -> Self {
        Self::from_blocks_fn(domain, codomain, |_, r, c| CMatrix::zeros(r, c))
    }

    pub fn domain(&self) -> &Module<T> {
        &self.domain
    }

    pub fn codomain(&self) -> &Module<T> {
        &self.codomain
    }

    pub fn blocks(&self) -> &[CMatrix<T>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix<T> {
        &self.blocks[i]
    }

    pub fn algebra(&self) -> &Algebra<T> {
        &self.domain.algebra
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain.mults == self.codomain.mults
    }

    fn require_endo(&self) -> Result<()> {
        if self.is_endomorphism() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "expected an endomorphism, got {:?} -> {:?}",
                self.domain.mults, self.codomain.mults
            )))
        }
    }

    /// Blockwise map preserving domain and codomain.
    pub fn map_blocks(&self, f: impl Fn(&CMatrix<T>) -> CMatrix<T>) -> Self {
        Self { domain: self.domain.clone(), codomain: self.codomain.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if rhs.codomain.mults != self.domain.mults || rhs.algebra() != self.algebra() {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {:?}->{:?} after {:?}->{:?}",
                self.domain.mults, self.codomain.mults, rhs.domain.mults, rhs.codomain.mults
            )));
        }
        let blocks = self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect();
        Ok(Self { domain: rhs.domain.clone(), codomain: self.codomain.clone(), blocks })
    }

    /// Base adjoint: blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            blocks: self.blocks.iter().map(CMatrix::adjoint).collect(),
        }
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.domain.mults != rhs.domain.mults || self.codomain.mults != rhs.codomain.mults || self.algebra() != rhs.algebra() {
            return Err(Error::ShapeMismatch("operators act between different modules".into()));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_blocks(|b| b.scale_re(s))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.require_endo()?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.inverse().map_err(|_| Error::NotInvertible))
            .collect::<Result<_>>()?;
        Ok(Self { domain: self.codomain.clone(), codomain: self.domain.clone(), blocks })
    }

    /// Block-diagonal operator on the direct sums.
    pub fn direct_sum(&self, rhs: &Self) -> Result<Self> {
        let domain = self.domain.direct_sum(&rhs.domain)?;
        let codomain = self.codomain.direct_sum(&rhs.codomain)?;
        let blocks = self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| CMatrix::block_diag(a, b)).collect();
        Ok(Self { domain, codomain, blocks })
    }

    /// The operator `[[a, b], [c, d]]` on `M ⊕ N`, with `a: M→M`, `b: N→M`,
    /// `c: M→N`, `d: N→N`.
    pub fn block_matrix(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        let m = a.domain.clone();
        let n = d.domain.clone();
        let ok = a.codomain.mults == m.mults
            && d.codomain.mults == n.mults
            && b.domain.mults == n.mults
            && b.codomain.mults == m.mults
            && c.domain.mults == m.mults
            && c.codomain.mults == n.mults;
        if !ok {
            return Err(Error::ShapeMismatch("block operator pieces do not fit together".into()));
        }
        let sum = m.direct_sum(&n)?;
        let blocks = (0..m.mults.len())
            .map(|i| {
                let (km, kn) = (m.mults[i], n.mults[i]);
                let mut blk = CMatrix::zeros(km + kn, km + kn);
                blk.set_submatrix(0, 0, &a.blocks[i]);
                blk.set_submatrix(0, km, &b.blocks[i]);
                blk.set_submatrix(km, 0, &c.blocks[i]);
                blk.set_submatrix(km, km, &d.blocks[i]);
                blk
            })
            .collect();
        Ok(Self { domain: sum.clone(), codomain: sum, blocks })
    }

    /// Frobenius norm over all blocks.
    pub fn norm(&self) -> T {
        self.blocks.iter().map(|b| b.frob_norm().powi(2)).sum::<T>().sqrt()
    }

    /// Largest per-block `||T_i - T_i*||_F`.
    pub fn self_adjoint_defect(&self) -> T {
        self.blocks.iter().map(CMatrix::hermitian_defect).fold(T::zero(), T::max)
    }

    pub fn is_self_adjoint(&self, tol: T) -> bool {
        self.is_endomorphism() && self.self_adjoint_defect() <= tol * self.norm().max(T::one())
    }
}

/// Tolerances of the spectral calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTolerances<T: Real> {
    /// An eigenvalue is treated as zero when `λ < kernel * max(λ_max, 1)`.
    pub kernel: T,
    /// Relative merge tolerance for eigenvalues of a spectral density.
    pub merge: T,
    /// Per-block self-adjointness tolerance, relative to `max(||A||, 1)`.
    pub self_adjoint: T,
    /// Eigenvalues below `-negativity * max(λ_max, 1)` violate positivity.
    pub negativity: T,
}

impl<T: Real> Default for SpectralTolerances<T> {
    fn default() -> Self {
        Self { kernel: T::tol(1e-10), merge: T::tol(1e-9), self_adjoint: T::tol(1e-12), negativity: T::tol(1e-10) }
    }
}

impl<T: Real> SpectralTolerances<T> {
    pub fn with_kernel(mut self, kernel: T) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn kernel_threshold(&self, lambda_max: T) -> T {
        self.kernel * lambda_max.max(T::one())
    }
}

/// Canonical trace `Tr_τ(T) = Σ_i w_i Tr(T_i)` of an endomorphism.
pub fn canonical_trace<T: Real>(op: &CommutantOp<T>) -> Result<C<T>> {
    op.require_endo()?;
    Ok(op.algebra().weights().zip(&op.blocks).fold(C::zero(), |acc, (w, b)| acc + b.trace() * w))
}

/// Tolerance on self-adjointness and idempotence of projections.
pub const PROJECTION_TOL: f64 = 1e-10;

/// von Neumann dimension `Tr_τ(P)` of the range of a projection.
pub fn tau_dimension<T: Real>(p: &CommutantOp<T>) -> Result<T> {
    p.require_endo()?;
    let idem = p.compose(p)?.sub(p)?.norm();
    let defect = idem.max(p.self_adjoint_defect());
    if defect > T::tol(PROJECTION_TOL) {
        return Err(Error::NotAProjection { defect: defect.as_f64() });
    }
    Ok(canonical_trace(p)?.re)
}

/// Step function `λ ↦ Tr_τ(E_λ)` given by its jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity<T: Real> {
    steps: Vec<(T, T)>,
}

impl<T: Real> SpectralDensity<T> {
    /// Sorts and merges raw `(λ, weight)` pairs; eigenvalues within
    /// `merge * max|λ|` of the current step join it.
    pub fn from_weighted(mut raw: Vec<(T, T)>, merge: T) -> Self {
        raw.retain(|&(_, w)| w > T::zero());
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let scale = raw.iter().map(|r| r.0.abs()).fold(T::zero(), T::max);
        let gap = merge * scale;
        let mut steps: Vec<(T, T, T)> = Vec::new(); // (weighted sum of λ, weight, first λ)
        for (lam, w) in raw {
            match steps.last_mut() {
                Some(last) if (lam - last.2).abs() <= gap => {
                    last.0 += lam * w;
                    last.1 += w;
                }
                _ => steps.push((lam * w, w, lam)),
            }
        }
        Self { steps: steps.into_iter().map(|(s, w, _)| (s / w, w)).collect() }
    }

    pub fn empty() -> Self {
        Self { steps: Vec::new() }
    }

    pub fn steps(&self) -> &[(T, T)] {
        &self.steps
    }

    pub fn total_weight(&self) -> T {
        self.steps.iter().map(|s| s.1).sum()
    }

    pub fn lambda_max(&self) -> T {
        self.steps.iter().map(|s| s.0.abs()).fold(T::zero(), T::max)
    }

    /// `N(λ) = Tr_τ(E_λ)`, the weight of the spectrum in `(-∞, λ]`.
    pub fn counting(&self, lambda: T) -> T {
        self.steps.iter().take_while(|s| s.0 <= lambda).map(|s| s.1).sum()
    }

    /// Splits into the kernel weight and the density of the nonzero part.
    pub fn split_kernel(&self, tol: &SpectralTolerances<T>) -> (T, Self) {
        let thr = tol.kernel_threshold(self.lambda_max());
        let mut kernel = T::zero();
        let mut rest = Vec::new();
        for &(lam, w) in &self.steps {
            if lam.abs() < thr {
                kernel += w;
            } else {
                rest.push((lam, w));
            }
        }
        (kernel, Self { steps: rest })
    }
}

/// Spectral density of a self-adjoint endomorphism: an eigenvalue of
/// multiplicity `m` in factor `i` contributes `w_i * m`.
pub fn spectral_density<T: Real>(a: &CommutantOp<T>) -> Result<SpectralDensity<T>> {
    spectral_density_with(a, &SpectralTolerances::default())
}

pub fn spectral_density_with<T: Real>(a: &CommutantOp<T>, tol: &SpectralTolerances<T>) -> Result<SpectralDensity<T>> {
    if !a.is_endomorphism() {
        return Err(Error::ShapeMismatch("spectral density of a non-endomorphism".into()));
    }
    if !a.is_self_adjoint(tol.self_adjoint) {
        return Err(Error::NotSelfAdjoint { defect: a.self_adjoint_defect().as_f64() });
    }
    let mut raw = Vec::new();
    for (w, b) in a.algebra().weights().zip(&a.blocks) {
        for lam in b.eigh()?.values {
            raw.push((lam, w));
        }
    }
    Ok(SpectralDensity::from_weighted(raw, tol.merge))
}

/// Fuglede-Kadison determinant together with the D-class flag, which always
/// holds for finite spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkDeterminant<T: Real> {
    pub value: T,
    pub log_value: T,
    pub d_class: bool,
}

/// `exp(∫ ln λ dφ_λ)` over the nonzero spectrum of a positive
/// semidefinite endomorphism.
pub fn fk_determinant<T: Real>(a: &CommutantOp<T>) -> Result<FkDeterminant<T>> {
    fk_determinant_with(a, &SpectralTolerances::default())
}

pub fn fk_determinant_with<T: Real>(a: &CommutantOp<T>, tol: &SpectralTolerances<T>) -> Result<FkDeterminant<T>> {
    let density = spectral_density_with(a, tol)?;
    log_det_of_density(&density, tol).map(|log_value| FkDeterminant { value: log_value.exp(), log_value, d_class: true })
}

pub(crate) fn log_det_of_density<T: Real>(density: &SpectralDensity<T>, tol: &SpectralTolerances<T>) -> Result<T> {
    let lmax = density.lambda_max();
    if let Some(&(lam, _)) = density.steps().first() {
        if lam < -tol.negativity * lmax.max(T::one()) {
            return Err(Error::NotPositive { eigenvalue: lam.as_f64() });
        }
    }
    let (_, nonzero) = density.split_kernel(tol);
    Ok(nonzero.steps().iter().map(|&(lam, w)| w * lam.ln()).sum())
}

/// `Det_τ(|f|) = Det_τ(f* f)^{1/2}` for an operator between modules with
/// the same multiplicities; equals `Det_τ(f)` on the invertibles.
pub fn fk_determinant_abs<T: Real>(f: &CommutantOp<T>) -> Result<FkDeterminant<T>> {
    fk_determinant_abs_with(f, &SpectralTolerances::default())
}

pub fn fk_determinant_abs_with<T: Real>(f: &CommutantOp<T>, tol: &SpectralTolerances<T>) -> Result<FkDeterminant<T>> {
    let gram = f.adjoint().compose(f)?.map_blocks(CMatrix::hermitian_part);
    let d = fk_determinant_with(&gram, tol)?;
    let log_value = d.log_value * T::lit(0.5);
    Ok(FkDeterminant { value: log_value.exp(), log_value, d_class: true })
}

/// Log-determinant through the integral of `Re Tr_τ(A_t^{-1} A_t')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDeterminant<T: Real> {
    pub value: T,
    pub log_value: T,
    /// Simpson value on the full grid before extrapolation.
    pub fine: T,
    /// Simpson value on every other sample.
    pub coarse: T,
}

/// Samples `f` at `t_j = j / n`, `j = 0..=n`.
pub fn sample_path<T: Real, F>(n: usize, f: F) -> Vec<CommutantOp<T>>
where
    F: Fn(T) -> CommutantOp<T>,
{
    (0..=n).map(|j| f(T::from_count(j) / T::from_count(n))).collect()
}

/// Determinant from a path sampled uniformly on `[0, 1]` starting at the
/// identity. The derivative is taken by fourth order finite differences on
/// the samples (central inside, one-sided near the ends), integrated by
/// composite Simpson on the full and the half grid, and the two are combined
/// by one Richardson step eliminating the `h⁴` term.
pub fn fk_determinant_path<T: Real>(samples: &[CommutantOp<T>]) -> Result<PathDeterminant<T>> {
    if samples.len() < 9 || (samples.len() - 1) % 4 != 0 {
        return Err(Error::InvalidPath(format!(
            "need 4m+1 samples (m >= 2), got {}",
            samples.len()
        )));
    }
    let first = &samples[0];
    first.require_endo()?;
    for s in samples {
        first.check_same_shape(s)?;
    }
    let defect = first.sub(&CommutantOp::identity(first.domain()))?.norm();
    if defect > T::tol(1e-10) {
        return Err(Error::PathNotAtIdentity { defect: defect.as_f64() });
    }
    let inverses = samples
        .iter()
        .enumerate()
        .map(|(j, s)| s.inverse().map_err(|_| Error::SingularSample(j)))
        .collect::<Result<Vec<_>>>()?;
    let n = samples.len() - 1;
    let fine = simpson_of_log_derivative(samples, &inverses, 1, n)?;
    let coarse = simpson_of_log_derivative(samples, &inverses, 2, n)?;
    let log_value = (T::lit(16.0) * fine - coarse) / T::lit(15.0);
    Ok(PathDeterminant { value: log_value.exp(), log_value, fine, coarse })
}

fn simpson_of_log_derivative<T: Real>(samples: &[CommutantOp<T>], inverses: &[CommutantOp<T>], stride: usize, n: usize) -> Result<T> {
    let m = n / stride;
    let h = T::from_count(stride) / T::from_count(n);
    let at = |j: usize| &samples[j * stride];
    let integrand = |j: usize| -> Result<T> {
        // Fourth order stencils everywhere, so the error expansion in h is
        // smooth up to the boundary and one extrapolation step removes h⁴.
        let (offset, coeffs): (isize, [f64; 5]) = if j == 0 {
            (0, [-25.0, 48.0, -36.0, 16.0, -3.0])
        } else if j == 1 {
            (-1, [-3.0, -10.0, 18.0, -6.0, 1.0])
        } else if j + 1 == m {
            (-3, [-1.0, 6.0, -18.0, 10.0, 3.0])
        } else if j == m {
            (-4, [3.0, -16.0, 36.0, -48.0, 25.0])
        } else {
            (-2, [1.0, -8.0, 0.0, 8.0, -1.0])
        };
        let mut deriv = CommutantOp::zero(at(0).domain(), at(0).codomain());
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                let idx = (j as isize + offset + k as isize) as usize;
                deriv = deriv.add(&at(idx).scale(T::lit(c)))?;
            }
        }
        let deriv = deriv.scale(T::one() / (T::lit(12.0) * h));
        Ok(canonical_trace(&inverses[j * stride].compose(&deriv)?)?.re)
    };
    let mut acc = integrand(0)? + integrand(m)?;
    for j in 1..m {
        let w = if j % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc += w * integrand(j)?;
    }
    Ok(acc * h / T::lit(3.0))
}

/// Convenience constructor for an operator with real diagonal blocks.
pub fn diagonal_op<T: Real>(module: &Module<T>, diag: &[Vec<T>]) -> Result<CommutantOp<T>> {
    let blocks = diag.iter().map(|d| CMatrix::from_real_diag(d)).collect();
    CommutantOp::endo(module, blocks)
}

/// `Re Tr_τ(S T)`, used for trace pairings.
pub fn trace_pairing<T: Real>(s: &CommutantOp<T>, t: &CommutantOp<T>) -> Result<T> {
    Ok(canonical_trace(&s.compose(t)?)?.re)
}
