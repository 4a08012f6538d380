//! Finite cochain complexes of Hilbertian modules with families of metrics.
//!
//! The metric of degree `q` at parameter `u` is `<A_q(u) x, y>_base`. All
//! spectral work happens in the frame `x ↦ A^{1/2} x`, where the u-inner
//! product becomes the base one and the Laplacian is an honest self-adjoint
//! block operator.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Eigh};
use crate::scalar::Real;
use crate::vn::{Algebra, CommutantOp, Module, SpectralTolerances};

/// Tolerance for `A_q(0) = 1`.
pub const METRIC_IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for `d_{q+1} d_q = 0`, relative to `||d_{q+1}|| ||d_q||`.
pub const D_SQUARED_TOL: f64 = 1e-10;

/// Cochain complex `Ω⁰ → Ω¹ → … → Ωⁿ` in the commutant.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteComplex<T: Real> {
    modules: Vec<Module<T>>,
    diffs: Vec<CommutantOp<T>>,
    label: i64,
    tol: SpectralTolerances<T>,
}

impl<T: Real> FiniteComplex<T> {
    /// Checks shapes only; `d² = 0` is reported by [`validate_complex`].
    pub fn new(modules: Vec<Module<T>>, diffs: Vec<CommutantOp<T>>, label: i64) -> Result<Self> {
        let Some(first) = modules.first() else {
            return Err(Error::InvalidComplex("a complex needs at least one degree".into()));
        };
        if diffs.len() + 1 != modules.len() {
            return Err(Error::InvalidComplex(format!("{} differentials for {} degrees", diffs.len(), modules.len())));
        }
        if modules.iter().any(|m| m.algebra() != first.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        for (q, d) in diffs.iter().enumerate() {
            if d.domain() != &modules[q] || d.codomain() != &modules[q + 1] {
                return Err(Error::InvalidComplex(format!("d_{q} does not map degree {q} to degree {}", q + 1)));
            }
        }
        Ok(Self { modules, diffs, label, tol: SpectralTolerances::default() })
    }

    /// `0 → M →d N → 0`.
    pub fn two_term(d: &CommutantOp<T>) -> Result<Self> {
        Self::new(vec![d.domain().clone(), d.codomain().clone()], vec![d.clone()], 0)
    }

    /// All differentials zero.
    pub fn zero_differentials(modules: Vec<Module<T>>) -> Result<Self> {
        let diffs = modules.windows(2).map(|w| CommutantOp::zero(&w[0], &w[1])).collect();
        Self::new(modules, diffs, 0)
    }

    pub fn with_tolerances(mut self, tol: SpectralTolerances<T>) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_label(mut self, label: i64) -> Self {
        self.label = label;
        self
    }

    pub fn tolerances(&self) -> &SpectralTolerances<T> {
        &self.tol
    }

    pub fn algebra(&self) -> &Algebra<T> {
        self.modules[0].algebra()
    }

    /// Highest degree `n`.
    pub fn top(&self) -> usize {
        self.modules.len() - 1
    }

    pub fn num_degrees(&self) -> usize {
        self.modules.len()
    }

    pub fn modules(&self) -> &[Module<T>] {
        &self.modules
    }

    pub fn module(&self, q: usize) -> Result<&Module<T>> {
        self.modules.get(q).ok_or(Error::DegreeOutOfRange { degree: q, top: self.top() })
    }

    pub fn diffs(&self) -> &[CommutantOp<T>] {
        &self.diffs
    }

    pub fn label(&self) -> i64 {
        self.label
    }

    /// `Σ_q (-1)^q dim_τ Ω^q`.
    pub fn euler_characteristic(&self) -> T {
        alternating(self.modules.iter().map(Module::dim))
    }

    /// Degreewise direct sum; both complexes must have the same length.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.modules.len() != other.modules.len() {
            return Err(Error::InvalidComplex("complexes of different length".into()));
        }
        let modules = self.modules.iter().zip(&other.modules).map(|(a, b)| a.direct_sum(b)).collect::<Result<_>>()?;
        let diffs = self.diffs.iter().zip(&other.diffs).map(|(a, b)| a.direct_sum(b)).collect::<Result<_>>()?;
        Ok(Self { modules, diffs, label: self.label, tol: self.tol })
    }

    fn check_degree(&self, q: usize) -> Result<()> {
        if q > self.top() {
            Err(Error::DegreeOutOfRange { degree: q, top: self.top() })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn alternating<T: Real>(xs: impl Iterator<Item = T>) -> T {
    xs.enumerate().map(|(q, x)| if q % 2 == 0 { x } else { -x }).sum()
}

/// Outcome of [`validate_complex`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub valid: bool,
    /// `||d_{q+1} d_q||` for each consecutive pair.
    pub d_squared: Vec<f64>,
    pub max_violation: f64,
    pub failures: Vec<String>,
}

pub fn validate_complex<T: Real>(c: &FiniteComplex<T>) -> ValidationReport {
    let mut d_squared = Vec::new();
    let mut failures = Vec::new();
    for (q, pair) in c.diffs.windows(2).enumerate() {
        let norm = match pair[1].compose(&pair[0]) {
            Ok(dd) => dd.norm(),
            Err(e) => {
                failures.push(format!("d_{} d_{q}: {e}", q + 1));
                d_squared.push(f64::INFINITY);
                continue;
            }
        };
        let bound = T::lit(D_SQUARED_TOL) * pair[0].norm() * pair[1].norm();
        if norm > bound {
            failures.push(format!("||d_{} d_{q}|| = {norm:e}", q + 1));
        }
        d_squared.push(norm.as_f64());
    }
    let max_violation = d_squared.iter().copied().fold(0.0, f64::max);
    ValidationReport { valid: failures.is_empty(), d_squared, max_violation, failures }
}

/// Metric and its derivative in one degree: `(A(u), Ȧ(u))`.
pub type MetricValue<T> = (CommutantOp<T>, Option<CommutantOp<T>>);
type MetricFn<T> = dyn Fn(T) -> Result<Vec<MetricValue<T>>> + Send + Sync;

#[derive(Clone)]
enum Kind<T: Real> {
    Exp { generators: Vec<CommutantOp<T>>, eig: Vec<Vec<Eigh<T>>> },
    Custom(Arc<MetricFn<T>>),
}

/// Family `u ↦ (A_0(u), …, A_n(u))` of positive metrics with `A(0) = 1`.
#[derive(Clone)]
pub struct MetricFamily<T: Real> {
    kind: Kind<T>,
    name: String,
}

impl<T: Real> fmt::Debug for MetricFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Exp { generators, .. } => f.debug_struct("MetricFamily").field("name", &self.name).field("generators", generators).finish(),
            Kind::Custom(_) => f.debug_struct("MetricFamily").field("name", &self.name).finish_non_exhaustive(),
        }
    }
}

impl<T: Real> MetricFamily<T> {
    /// `A_q(u) = exp(u B_q)` with self-adjoint generators.
    pub fn exp(complex: &FiniteComplex<T>, generators: Vec<CommutantOp<T>>) -> Result<Self> {
        if generators.len() != complex.num_degrees() {
            return Err(Error::InvalidMetric(format!("{} generators for {} degrees", generators.len(), complex.num_degrees())));
        }
        let tol = complex.tol.self_adjoint;
        let mut eig = Vec::with_capacity(generators.len());
        for (q, b) in generators.iter().enumerate() {
            if b.domain() != &complex.modules[q] || !b.is_endomorphism() {
                return Err(Error::InvalidMetric(format!("generator {q} does not act on degree {q}")));
            }
            if !b.is_self_adjoint(tol) {
                return Err(Error::InvalidMetric(format!("generator {q} is not self-adjoint")));
            }
            eig.push(b.blocks().iter().map(|blk| blk.hermitian_part().eigh()).collect::<Result<Vec<_>>>()?);
        }
        Ok(Self { kind: Kind::Exp { generators, eig }, name: "exp".into() })
    }

    /// The constant family `A ≡ 1`.
    pub fn identity(complex: &FiniteComplex<T>) -> Self {
        let gens = complex.modules.iter().map(|m| CommutantOp::zero(m, m)).collect();
        Self::exp(complex, gens).expect("zero generators are admissible")
    }

    /// `A_q(u) = e^{c_q u}`.
    pub fn conformal(complex: &FiniteComplex<T>, rates: &[T]) -> Result<Self> {
        if rates.len() != complex.num_degrees() {
            return Err(Error::InvalidMetric(format!("{} rates for {} degrees", rates.len(), complex.num_degrees())));
        }
        let gens = complex.modules.iter().zip(rates).map(|(m, &c)| CommutantOp::scalar(m, c)).collect();
        Ok(Self::exp(complex, gens)?.named("conformal"))
    }

    /// Arbitrary family given by a closure returning `(A_q(u), Ȧ_q(u))` per
    /// degree; the derivative may be omitted.
    pub fn custom(complex: &FiniteComplex<T>, f: impl Fn(T) -> Result<Vec<MetricValue<T>>> + Send + Sync + 'static) -> Result<Self> {
        let fam = Self { kind: Kind::Custom(Arc::new(f)), name: "custom".into() };
        let at0 = fam.evaluate(complex, T::zero())?;
        for (q, (a, _)) in at0.iter().enumerate() {
            let defect = a.sub(&CommutantOp::identity(&complex.modules[q]))?.norm();
            if defect > T::tol(METRIC_IDENTITY_TOL) {
                return Err(Error::InvalidMetric(format!("A_{q}(0) differs from the identity by {defect:e}")));
            }
        }
        Ok(fam)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Generators of an exponential family.
    pub fn generators(&self) -> Option<&[CommutantOp<T>]> {
        match &self.kind {
            Kind::Exp { generators, .. } => Some(generators),
            Kind::Custom(_) => None,
        }
    }

    fn evaluate(&self, complex: &FiniteComplex<T>, u: T) -> Result<Vec<MetricValue<T>>> {
        let Kind::Custom(f) = &self.kind else { unreachable!() };
        let vals = f(u)?;
        if vals.len() != complex.num_degrees() {
            return Err(Error::InvalidMetric(format!("family returned {} degrees, complex has {}", vals.len(), complex.num_degrees())));
        }
        for (q, (a, da)) in vals.iter().enumerate() {
            let m = &complex.modules[q];
            if a.domain() != m || !a.is_endomorphism() || da.as_ref().is_some_and(|d| d.domain() != m || !d.is_endomorphism()) {
                return Err(Error::InvalidMetric(format!("metric {q} does not act on degree {q}")));
            }
        }
        Ok(vals)
    }

    /// Evaluates the family and the square roots needed for the unitary frame.
    pub fn sample(&self, complex: &FiniteComplex<T>, u: T) -> Result<MetricSample<T>> {
        let degrees = match &self.kind {
            Kind::Exp { generators, eig } => generators
                .iter()
                .zip(eig)
                .map(|(b, eigs)| {
                    let m = b.domain();
                    let f = |s: T| CommutantOp::from_blocks_fn(m, m, |i, _, _| eigs[i].apply(|l| (s * u * l).exp()));
                    DegreeMetric { a: f(T::one()), a_inv: f(-T::one()), sqrt: f(T::lit(0.5)), inv_sqrt: f(T::lit(-0.5)), z: Some(b.clone()) }
                })
                .collect(),
            Kind::Custom(_) => {
                let tol = &complex.tol;
                self.evaluate(complex, u)?
                    .into_iter()
                    .map(|(a, da)| {
                        if !a.is_self_adjoint(tol.self_adjoint) {
                            return Err(Error::InvalidMetric("metric is not self-adjoint".into()));
                        }
                        let eigs = a.blocks().iter().map(|b| b.hermitian_part().eigh()).collect::<Result<Vec<_>>>()?;
                        if let Some(&min) = eigs.iter().flat_map(|e| e.values.first()).min_by(|x, y| x.partial_cmp(y).unwrap()) {
                            if !(min > T::zero()) {
                                return Err(Error::NotPositive { eigenvalue: min.as_f64() });
                            }
                        }
                        let m = a.domain().clone();
                        let f = |g: &dyn Fn(T) -> T| CommutantOp::from_blocks_fn(&m, &m, |i, _, _| eigs[i].apply(g));
                        let a_inv = f(&|l| l.recip());
                        let z = da.map(|d| a_inv.compose(&d)).transpose()?;
                        Ok(DegreeMetric { sqrt: f(&|l| l.sqrt()), inv_sqrt: f(&|l| l.sqrt().recip()), a_inv, a, z })
                    })
                    .collect::<Result<_>>()?
            }
        };
        Ok(MetricSample { u, degrees })
    }
}

/// Metric data of one degree at one parameter value.
#[derive(Debug, Clone)]
pub struct DegreeMetric<T: Real> {
    pub a: CommutantOp<T>,
    pub a_inv: CommutantOp<T>,
    pub sqrt: CommutantOp<T>,
    pub inv_sqrt: CommutantOp<T>,
    /// `Z = A⁻¹ Ȧ`, when the derivative is known.
    pub z: Option<CommutantOp<T>>,
}

#[derive(Debug, Clone)]
pub struct MetricSample<T: Real> {
    pub u: T,
    pub degrees: Vec<DegreeMetric<T>>,
}

/// Spectral data of the Laplacian of one degree in the unitary frame.
#[derive(Debug, Clone)]
pub(crate) struct DegreeSpectrum<T: Real> {
    pub eig: Vec<Eigh<T>>,
    pub threshold: T,
}

impl<T: Real> DegreeSpectrum<T> {
    /// Eigenvector columns of the kernel, per block.
    pub fn kernel_vectors(&self) -> Vec<CMatrix<T>> {
        self.eig
            .iter()
            .map(|e| {
                let idx: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k].abs() < self.threshold).collect();
                e.vectors.select_columns(&idx)
            })
            .collect()
    }

    pub fn kernel_mults(&self) -> Vec<usize> {
        self.eig.iter().map(|e| e.values.iter().filter(|l| l.abs() < self.threshold).count()).collect()
    }

    /// `(λ, w_i)` for every nonzero eigenvalue.
    pub fn nonzero(&self, weights: &[T]) -> Vec<(T, T)> {
        self.eig
            .iter()
            .zip(weights)
            .flat_map(|(e, &w)| e.values.iter().filter(|l| l.abs() >= self.threshold).map(move |&l| (l, w)))
            .collect()
    }
}

/// `D_q = A_{q+1}^{1/2} d_q A_q^{-1/2}`, the differentials in the unitary frame.
pub(crate) fn frame_diffs<T: Real>(c: &FiniteComplex<T>, s: &MetricSample<T>) -> Result<Vec<CommutantOp<T>>> {
    c.diffs
        .iter()
        .enumerate()
        .map(|(q, d)| s.degrees[q + 1].sqrt.compose(d)?.compose(&s.degrees[q].inv_sqrt))
        .collect()
}

/// `S_q = D_q* D_q + D_{q-1} D_{q-1}*`.
pub(crate) fn frame_laplacian<T: Real>(c: &FiniteComplex<T>, frame: &[CommutantOp<T>], q: usize) -> Result<CommutantOp<T>> {
    let m = &c.modules[q];
    let mut lap = CommutantOp::zero(m, m);
    if let Some(d) = frame.get(q) {
        lap = lap.add(&d.adjoint().compose(d)?)?;
    }
    if q > 0 {
        let d = &frame[q - 1];
        lap = lap.add(&d.compose(&d.adjoint())?)?;
    }
    Ok(lap.map_blocks(CMatrix::hermitian_part))
}

pub(crate) fn degree_spectrum<T: Real>(c: &FiniteComplex<T>, lap: &CommutantOp<T>) -> Result<DegreeSpectrum<T>> {
    let eig = lap.blocks().iter().map(CMatrix::eigh).collect::<Result<Vec<_>>>()?;
    let lmax = eig.iter().flat_map(|e| e.values.iter().map(|l| l.abs())).fold(T::zero(), T::max);
    Ok(DegreeSpectrum { eig, threshold: c.tol.kernel_threshold(lmax) })
}

/// `□_q(u) = d_q^{*u} d_q + d_{q-1} d_{q-1}^{*u}` with `X^{*u} = A_dom⁻¹ X* A_cod`.
pub fn laplacian<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, q: usize, u: T) -> Result<CommutantOp<T>> {
    c.check_degree(q)?;
    let s = mf.sample(c, u)?;
    let m = &c.modules[q];
    let mut lap = CommutantOp::zero(m, m);
    if let Some(d) = c.diffs.get(q) {
        let star = s.degrees[q].a_inv.compose(&d.adjoint())?.compose(&s.degrees[q + 1].a)?;
        lap = lap.add(&star.compose(d)?)?;
    }
    if q > 0 {
        let d = &c.diffs[q - 1];
        let star = s.degrees[q - 1].a_inv.compose(&d.adjoint())?.compose(&s.degrees[q].a)?;
        lap = lap.add(&d.compose(&star)?)?;
    }
    Ok(lap)
}

/// Hodge decomposition `1 = P_harm + P_exact + P_coexact` for the u-metric.
#[derive(Debug, Clone)]
pub struct HodgeProjectors<T: Real> {
    pub harmonic: CommutantOp<T>,
    pub exact: CommutantOp<T>,
    pub coexact: CommutantOp<T>,
}

fn range_projector<T: Real>(op: &CommutantOp<T>, threshold: T) -> Result<CommutantOp<T>> {
    let blocks = op
        .blocks()
        .iter()
        .map(|b| Ok(b.hermitian_part().eigh()?.apply(|l| if l.abs() >= threshold { T::one() } else { T::zero() })))
        .collect::<Result<Vec<_>>>()?;
    CommutantOp::endo(op.domain(), blocks)
}

pub fn hodge_projectors<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, q: usize, u: T) -> Result<HodgeProjectors<T>> {
    c.check_degree(q)?;
    let s = mf.sample(c, u)?;
    let frame = frame_diffs(c, &s)?;
    let spec = degree_spectrum(c, &frame_laplacian(c, &frame, q)?)?;
    let g = &s.degrees[q];
    let m = &c.modules[q];

    // kernel eigenvectors carried back to the original coordinates and
    // made u-orthonormal
    let basis: Vec<CMatrix<T>> = spec
        .kernel_vectors()
        .iter()
        .zip(g.inv_sqrt.blocks().iter().zip(g.a.blocks()))
        .map(|(v, (inv, a))| (inv * v).orthonormalize_in(a, T::tol(1e-8)))
        .collect();
    let harmonic = CommutantOp::from_blocks_fn(m, m, |i, _, _| &(&basis[i] * &basis[i].adjoint()) * g.a.block(i));

    let back = |p: CommutantOp<T>| g.inv_sqrt.compose(&p)?.compose(&g.sqrt);
    let exact = match q {
        0 => CommutantOp::zero(m, m),
        _ => {
            let d = &frame[q - 1];
            back(range_projector(&d.compose(&d.adjoint())?, spec.threshold)?)?
        }
    };
    let coexact = match frame.get(q) {
        Some(d) => back(range_projector(&d.adjoint().compose(d)?, spec.threshold)?)?,
        None => CommutantOp::zero(m, m),
    };
    Ok(HodgeProjectors { harmonic, exact, coexact })
}

/// `b^q = Tr_τ(P_harm)`.
pub fn betti<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, q: usize, u: T) -> Result<T> {
    c.check_degree(q)?;
    let s = mf.sample(c, u)?;
    let frame = frame_diffs(c, &s)?;
    let spec = degree_spectrum(c, &frame_laplacian(c, &frame, q)?)?;
    Ok(c.algebra().weights().zip(spec.kernel_mults()).map(|(w, k)| w * T::from_count(k)).sum())
}

/// Harmonic multiplicities of every degree, used as the module structure of
/// cohomology.
pub fn cohomology_modules<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, u: T) -> Result<Vec<Module<T>>> {
    let s = mf.sample(c, u)?;
    let frame = frame_diffs(c, &s)?;
    (0..c.num_degrees())
        .map(|q| Module::new(c.algebra(), &degree_spectrum(c, &frame_laplacian(c, &frame, q)?)?.kernel_mults()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C;
    use crate::vn::{canonical_trace, diagonal_op, make_algebra, spectral_density};

    fn scalar_mod(k: usize) -> Module<f64> {
        Module::new(&make_algebra(&[(1, 1.0f64)], false).unwrap(), &[k]).unwrap()
    }

    fn acyclic(x: f64) -> FiniteComplex<f64> {
        let m = scalar_mod(1);
        FiniteComplex::two_term(&CommutantOp::scalar(&m, x)).unwrap()
    }

    #[test]
    fn validation() {
        let m = scalar_mod(1);
        let zero = FiniteComplex::zero_differentials(vec![m.clone(), m.clone(), m.clone()]).unwrap();
        assert!(validate_complex(&zero).valid);
        let one = CommutantOp::identity(&m);
        let bad = FiniteComplex::new(vec![m.clone(), m.clone(), m.clone()], vec![one.clone(), one], 0).unwrap();
        let r = validate_complex(&bad);
        assert!(!r.valid);
        assert!((r.max_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_examples() {
        let c = acyclic(2.0);
        let id = MetricFamily::identity(&c);
        let lap = laplacian(&c, &id, 0, 0.0).unwrap();
        assert!((lap.block(0)[(0, 0)].re - 4.0).abs() < 1e-15);
        assert!(matches!(laplacian(&c, &id, 2, 0.0), Err(Error::DegreeOutOfRange { .. })));

        let z = FiniteComplex::zero_differentials(vec![scalar_mod(2), scalar_mod(1)]).unwrap();
        assert_eq!(laplacian(&z, &MetricFamily::identity(&z), 0, 0.3).unwrap().norm(), 0.0);

        let conf = MetricFamily::conformal(&c, &[0.7, 0.7]).unwrap();
        let l1 = laplacian(&c, &conf, 1, 0.9).unwrap();
        assert!((l1.block(0)[(0, 0)].re - 4.0).abs() < 1e-13);
    }

    #[test]
    fn hodge_examples() {
        let z = FiniteComplex::zero_differentials(vec![scalar_mod(2), scalar_mod(1)]).unwrap();
        let id = MetricFamily::identity(&z);
        let p = hodge_projectors(&z, &id, 0, 0.0).unwrap();
        assert!(p.harmonic.sub(&CommutantOp::identity(z.module(0).unwrap())).unwrap().norm() < 1e-14);
        assert_eq!(p.exact.norm() + p.coexact.norm(), 0.0);

        let c = acyclic(2.0);
        let p = hodge_projectors(&c, &MetricFamily::identity(&c), 0, 0.0).unwrap();
        assert!(p.harmonic.norm() < 1e-14);
        assert!((p.coexact.block(0)[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn betti_examples() {
        let alg = make_algebra(&[(2, 0.5f64)], false).unwrap();
        let m = Module::new(&alg, &[3]).unwrap();
        assert!((m.dim() - 1.5).abs() < 1e-15);
        let z = FiniteComplex::zero_differentials(vec![m]).unwrap();
        assert!((betti(&z, &MetricFamily::identity(&z), 0, 0.0).unwrap() - 1.5).abs() < 1e-15);

        let c = acyclic(2.0);
        let id = MetricFamily::identity(&c);
        assert_eq!(betti(&c, &id, 0, 0.0).unwrap(), 0.0);
        assert_eq!(betti(&c, &id, 1, 0.0).unwrap(), 0.0);

        let m2 = scalar_mod(2);
        let d = CommutantOp::endo(&m2, vec![CMatrix::from_real_diag(&[1.0, 0.0])]).unwrap();
        let r1 = FiniteComplex::two_term(&d).unwrap();
        let id = MetricFamily::identity(&r1);
        assert!((betti(&r1, &id, 0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((betti(&r1, &id, 1, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projectors_for_a_nontrivial_metric() {
        let m2 = scalar_mod(2);
        let d = CommutantOp::endo(&m2, vec![CMatrix::from_vec(2, 2, vec![C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(0.5, 0.0), C::new(1.0, 0.0)]).unwrap()]).unwrap();
        let c = FiniteComplex::two_term(&d).unwrap();
        let b0 = CommutantOp::endo(&m2, vec![CMatrix::from_vec(2, 2, vec![C::new(1.0, 0.0), C::new(0.3, 0.2), C::new(0.3, -0.2), C::new(-0.5, 0.0)]).unwrap()]).unwrap();
        let b1 = diagonal_op(&m2, &[vec![0.4, -1.1]]).unwrap();
        let mf = MetricFamily::exp(&c, vec![b0, b1]).unwrap();
        for q in 0..2 {
            let p = hodge_projectors(&c, &mf, q, 0.8).unwrap();
            let sum = p.harmonic.add(&p.exact).unwrap().add(&p.coexact).unwrap();
            assert!(sum.sub(&CommutantOp::identity(&m2)).unwrap().norm() < 1e-10);
            assert!((canonical_trace(&p.harmonic).unwrap().re - 1.0).abs() < 1e-10);
        }
        let lap = laplacian(&c, &mf, 1, 0.8).unwrap();
        let s = mf.sample(&c, 0.8).unwrap();
        let sym = s.degrees[1].sqrt.compose(&lap).unwrap().compose(&s.degrees[1].inv_sqrt).unwrap().map_blocks(CMatrix::hermitian_part);
        assert!(spectral_density(&sym).unwrap().steps()[0].0.abs() < 1e-10);
    }
}
