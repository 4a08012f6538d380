//! Theta and zeta functions of the Laplacians, torsion elements and their
//! dependence on the metric.

use crate::complex::{alternating, degree_spectrum, frame_diffs, frame_laplacian, DegreeSpectrum, FiniteComplex, MetricFamily, MetricSample};
use crate::det_line::{DetLineElement, GradedDetLine};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Real, C};
use crate::vn::{canonical_trace, CommutantOp, Module, SpectralDensity};

/// Condition number of the cohomology Gram matrix above which a warning is logged.
pub const GRAM_CONDITION_WARN: f64 = 1e8;
/// Relative size of the truncation estimate at which a finite-difference
/// step is rejected.
pub const STEP_ESTIMATE_LIMIT: f64 = 1e-3;

/// Nonzero spectrum of a Laplacian together with its harmonic dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSeries<T: Real> {
    spectrum: SpectralDensity<T>,
    betti: T,
}

impl<T: Real> ThetaSeries<T> {
    /// The spectrum must be strictly positive.
    pub fn new(spectrum: SpectralDensity<T>, betti: T) -> Result<Self> {
        if let Some(&(lam, _)) = spectrum.steps().iter().find(|s| !(s.0 > T::zero())) {
            return Err(Error::DomainError(format!("theta series with eigenvalue {lam}")));
        }
        Ok(Self { spectrum, betti })
    }

    /// From `(λ, jump)` pairs.
    pub fn from_steps(steps: &[(T, T)], betti: T) -> Result<Self> {
        Self::new(SpectralDensity::from_weighted(steps.to_vec(), T::zero()), betti)
    }

    pub fn spectrum(&self) -> &SpectralDensity<T> {
        &self.spectrum
    }

    pub fn betti(&self) -> T {
        self.betti
    }

    fn from_spectrum(c: &FiniteComplex<T>, spec: &DegreeSpectrum<T>) -> Self {
        let weights: Vec<T> = c.algebra().weights().collect();
        let betti = weights.iter().zip(spec.kernel_mults()).map(|(&w, k)| w * T::from_count(k)).sum();
        let spectrum = SpectralDensity::from_weighted(spec.nonzero(&weights), c.tolerances().merge);
        Self { spectrum, betti }
    }
}

/// `θ(t) = Σ_j jump_j e^{-tλ_j}`.
pub fn theta<T: Real>(ts: &ThetaSeries<T>, t: T) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::NonpositiveTime);
    }
    Ok(ts.spectrum.steps().iter().map(|&(l, w)| w * (-t * l).exp()).sum())
}

/// `ζ(s, λ) = Σ_j jump_j (λ_j + λ)^{-s}`.
pub fn zeta<T: Real>(ts: &ThetaSeries<T>, s: C<T>, lambda: T) -> Result<C<T>> {
    let mut acc = C::new(T::zero(), T::zero());
    for &(l, w) in ts.spectrum.steps() {
        let shifted = l + lambda;
        if !(shifted > T::zero()) {
            return Err(Error::ShiftedSpectrumNonpositive);
        }
        acc += (-s * shifted.ln()).exp() * w;
    }
    Ok(acc)
}

/// `ζ'(0) = -Σ_j jump_j ln λ_j`.
pub fn zeta_prime0<T: Real>(ts: &ThetaSeries<T>) -> T {
    -ts.spectrum.steps().iter().map(|&(l, w)| w * l.ln()).sum::<T>()
}

/// Theta series of `□_q(u)`.
pub fn theta_series<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, q: usize, u: T) -> Result<ThetaSeries<T>> {
    c.module(q)?;
    let s = mf.sample(c, u)?;
    let frame = frame_diffs(c, &s)?;
    Ok(ThetaSeries::from_spectrum(c, &degree_spectrum(c, &frame_laplacian(c, &frame, q)?)?))
}

/// `Σ_q (-1)^q q ζ_q'(0)`.
pub fn graded_zeta_prime0<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, u: T) -> Result<T> {
    let s = mf.sample(c, u)?;
    let frame = frame_diffs(c, &s)?;
    let mut acc = T::zero();
    for q in 0..c.num_degrees() {
        let ts = ThetaSeries::from_spectrum(c, &degree_spectrum(c, &frame_laplacian(c, &frame, q)?)?);
        acc += graded_weight::<T>(q) * zeta_prime0(&ts);
    }
    Ok(acc)
}

fn graded_weight<T: Real>(q: usize) -> T {
    let q_t = T::from_count(q);
    if q % 2 == 0 {
        q_t
    } else {
        -q_t
    }
}

/// Torsion element in the graded determinant line of cohomology.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionElement<T: Real> {
    pub u: T,
    /// Name of the metric family the element was computed from.
    pub family: String,
    /// `Σ_q (-1)^q q ζ_q'(0)`.
    pub zeta_prime: T,
    /// Element induced by the harmonic metrics.
    pub rho_prime: GradedDetLine<T>,
    /// `exp(ζ'/2)` times the coefficient of `rho_prime`.
    pub scalar: T,
}

impl<T: Real> TorsionElement<T> {
    pub fn coefficient(&self) -> T {
        self.scalar
    }

    pub fn log_coefficient(&self) -> T {
        T::lit(0.5) * self.zeta_prime + self.rho_prime.log_coefficient()
    }

    /// The element itself, with the zeta factor folded into degree 0.
    pub fn as_graded(&self) -> GradedDetLine<T> {
        self.rho_prime.scaled((T::lit(0.5) * self.zeta_prime).exp())
    }

    /// Torsion of the direct sum of the underlying complexes.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u,
            family: self.family.clone(),
            zeta_prime: self.zeta_prime + other.zeta_prime,
            rho_prime: self.rho_prime.direct_sum(&other.rho_prime)?,
            scalar: self.scalar * other.scalar,
        })
    }
}

/// Everything the torsion machinery needs at one parameter value.
#[derive(Debug, Clone)]
pub struct TorsionPoint<T: Real> {
    pub u: T,
    pub theta: Vec<ThetaSeries<T>>,
    /// `ζ_q'(0)` per degree.
    pub zeta_prime: Vec<T>,
    pub graded_zeta_prime: T,
    /// Coefficients of the harmonic-metric elements, one per degree.
    pub rho_prime: Vec<T>,
    /// `Σ_q (-1)^q Tr_τ(Z_q P_q(u))`, when the family has a derivative.
    pub supertrace_zp: Option<T>,
    /// `½ Σ_q (-1)^q Tr_τ(Z_q)`, when the family has a derivative.
    pub anomaly: Option<T>,
}

impl<T: Real> TorsionPoint<T> {
    pub fn log_rho_prime(&self) -> T {
        alternating(self.rho_prime.iter().map(|c| c.ln()))
    }

    pub fn log_torsion(&self) -> T {
        T::lit(0.5) * self.graded_zeta_prime + self.log_rho_prime()
    }
}

/// Torsion along a fixed metric family. Cohomology is identified with the
/// harmonic forms of `u = 0`, which are computed once.
#[derive(Debug, Clone)]
pub struct TorsionEvaluator<'a, T: Real> {
    complex: &'a FiniteComplex<T>,
    family: &'a MetricFamily<T>,
    base: Vec<Vec<CMatrix<T>>>,
    cohomology: Vec<Module<T>>,
    betti: Vec<T>,
}

impl<'a, T: Real> TorsionEvaluator<'a, T> {
    pub fn new(complex: &'a FiniteComplex<T>, family: &'a MetricFamily<T>) -> Result<Self> {
        let s = family.sample(complex, T::zero())?;
        let frame = frame_diffs(complex, &s)?;
        let mut base = Vec::new();
        let mut cohomology = Vec::new();
        let mut betti = Vec::new();
        for q in 0..complex.num_degrees() {
            let spec = degree_spectrum(complex, &frame_laplacian(complex, &frame, q)?)?;
            let h = Module::new(complex.algebra(), &spec.kernel_mults())?;
            betti.push(h.dim());
            cohomology.push(h);
            base.push(spec.kernel_vectors());
        }
        Ok(Self { complex, family, base, cohomology, betti })
    }

    pub fn cohomology(&self) -> &[Module<T>] {
        &self.cohomology
    }

    pub fn betti(&self) -> &[T] {
        &self.betti
    }

    pub fn point(&self, u: T) -> Result<TorsionPoint<T>> {
        let c = self.complex;
        let s = self.family.sample(c, u)?;
        let frame = frame_diffs(c, &s)?;
        let weights: Vec<T> = c.algebra().weights().collect();
        let mut theta = Vec::new();
        let mut zeta_prime = Vec::new();
        let mut rho_prime = Vec::new();
        let mut strace = Some(T::zero());
        for q in 0..c.num_degrees() {
            let spec = degree_spectrum(c, &frame_laplacian(c, &frame, q)?)?;
            let ts = ThetaSeries::from_spectrum(c, &spec);
            if spec.kernel_mults() != self.cohomology[q].mults() {
                return Err(Error::BettiJump { degree: q, from: self.betti[q].as_f64(), to: ts.betti.as_f64() });
            }
            zeta_prime.push(zeta_prime0(&ts));
            theta.push(ts);
            let harmonic = spec.kernel_vectors();
            rho_prime.push(self.harmonic_coefficient(&s, q, &harmonic, &weights)?);
            if let (Some(acc), Some(z)) = (strace.as_mut(), &s.degrees[q].z) {
                let g = &s.degrees[q];
                let m = &c.modules()[q];
                let p = CommutantOp::from_blocks_fn(m, m, |i, _, _| &harmonic[i] * &harmonic[i].adjoint());
                let p = g.inv_sqrt.compose(&p)?.compose(&g.sqrt)?;
                let tr = canonical_trace(&z.compose(&p)?)?.re;
                *acc += if q % 2 == 0 { tr } else { -tr };
            } else {
                strace = None;
            }
        }
        let graded_zeta_prime = zeta_prime.iter().enumerate().map(|(q, &z)| graded_weight::<T>(q) * z).sum();
        let anomaly = anomaly_from_sample(&s)?;
        Ok(TorsionPoint { u, theta, zeta_prime, graded_zeta_prime, rho_prime, supertrace_zp: strace, anomaly })
    }

    /// `Det_τ'(C_u)^{-1/2}` with `C_u = V₀* A P(u) V₀` on the u = 0 harmonics.
    fn harmonic_coefficient(&self, s: &MetricSample<T>, q: usize, harmonic: &[CMatrix<T>], weights: &[T]) -> Result<T> {
        let g = &s.degrees[q];
        let mut log_det = T::zero();
        for (i, v0) in self.base[q].iter().enumerate() {
            if v0.cols() == 0 {
                continue;
            }
            // C = M* M with M = V_u* A^{1/2} V₀
            let m = &harmonic[i].adjoint() * &(g.sqrt.block(i) * v0);
            let gram = (&m.adjoint() * &m).hermitian_part();
            let ev = gram.eigh()?.values;
            let (lo, hi) = (ev[0], ev[ev.len() - 1]);
            if !(lo > T::zero()) {
                return Err(Error::Singular);
            }
            if hi / lo > T::lit(GRAM_CONDITION_WARN) {
                log::warn!("cohomology Gram matrix in degree {q} has condition number {:e}", (hi / lo).as_f64());
            }
            log_det += weights[i] * ev.iter().map(|l| l.ln()).sum::<T>();
        }
        Ok((-T::lit(0.5) * log_det).exp())
    }

    pub fn torsion(&self, u: T) -> Result<TorsionElement<T>> {
        self.point(u).map(|p| self.element(&p))
    }

    pub fn element(&self, p: &TorsionPoint<T>) -> TorsionElement<T> {
        let lines = self.cohomology.iter().zip(&p.rho_prime).map(|(h, &c)| DetLineElement::new(h, c)).collect();
        TorsionElement {
            u: p.u,
            family: self.family.name().to_string(),
            zeta_prime: p.graded_zeta_prime,
            rho_prime: GradedDetLine::new(lines),
            scalar: p.log_torsion().exp(),
        }
    }
}

fn anomaly_from_sample<T: Real>(s: &MetricSample<T>) -> Result<Option<T>> {
    let mut traces = Vec::with_capacity(s.degrees.len());
    for g in &s.degrees {
        match &g.z {
            Some(z) => traces.push(canonical_trace(z)?.re),
            None => return Ok(None),
        }
    }
    Ok(Some(T::lit(0.5) * alternating(traces.into_iter())))
}

/// Element of `det(H^•)` induced by the u-harmonic metrics.
pub fn rho_prime<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, u: T) -> Result<GradedDetLine<T>> {
    Ok(TorsionEvaluator::new(c, mf)?.torsion(u)?.rho_prime)
}

pub fn torsion<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, u: T) -> Result<TorsionElement<T>> {
    TorsionEvaluator::new(c, mf)?.torsion(u)
}

/// `c(u) = ½ Σ_q (-1)^q Tr_τ(Z_q(u))`.
pub fn anomaly_c<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, u: T) -> Result<T> {
    anomaly_from_sample(&mf.sample(c, u)?)?.ok_or(Error::MissingDerivative)
}

/// Finite-difference check of the metric variation formulas at `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationReport<T: Real> {
    pub u: T,
    pub h: T,
    /// Central difference of `log ρ`.
    pub lhs: T,
    /// `c(u)`.
    pub rhs: T,
    pub gap: T,
    /// `|lhs + rhs|`.
    pub gap_opposite_sign: T,
    /// Richardson estimate of the truncation error of `lhs`.
    pub truncation_estimate: T,
    /// Central difference of the graded `ζ'(0)`.
    pub zeta_lhs: T,
    /// `Σ_q (-1)^q Tr_τ(Z_q P_q(u)) - 2c(u)`.
    pub zeta_rhs: T,
    pub zeta_gap: T,
    /// Central difference of `log ρ'`.
    pub rho_prime_lhs: T,
    /// `-½ Σ_q (-1)^q Tr_τ(Z_q P_q(u))`.
    pub rho_prime_rhs: T,
    pub rho_prime_gap: T,
}

pub fn variation_check<T: Real>(c: &FiniteComplex<T>, mf: &MetricFamily<T>, u: T, h: T) -> Result<VariationReport<T>> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::DomainError("finite-difference step must be positive".into()));
    }
    let ev = TorsionEvaluator::new(c, mf)?;
    let centre = ev.point(u)?;
    let (Some(rhs), Some(strace)) = (centre.anomaly, centre.supertrace_zp) else {
        return Err(Error::MissingDerivative);
    };
    let eval = |x: T| ev.point(x).map(|p| [p.log_torsion(), p.graded_zeta_prime, p.log_rho_prime()]);
    let (p1, m1, p2, m2) = (eval(u + h)?, eval(u - h)?, eval(u + h + h)?, eval(u - h - h)?);
    let two = T::lit(2.0);
    let d = |k: usize| (p1[k] - m1[k]) / (two * h);
    let d2 = |k: usize| (p2[k] - m2[k]) / (two * two * h);
    let lhs = d(0);
    let truncation_estimate = (d2(0) - lhs).abs() / T::lit(3.0);
    if truncation_estimate > T::lit(STEP_ESTIMATE_LIMIT) * lhs.abs().max(T::one()) {
        return Err(Error::StepTooLarge { step: h.as_f64(), estimate: truncation_estimate.as_f64() });
    }
    let zeta_rhs = strace - two * rhs;
    let rho_prime_rhs = -T::lit(0.5) * strace;
    Ok(VariationReport {
        u,
        h,
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        gap_opposite_sign: (lhs + rhs).abs(),
        truncation_estimate,
        zeta_lhs: d(1),
        zeta_rhs,
        zeta_gap: (d(1) - zeta_rhs).abs(),
        rho_prime_lhs: d(2),
        rho_prime_rhs,
        rho_prime_gap: (d(2) - rho_prime_rhs).abs(),
    })
}

/// Torsions of two complexes and the ratio of their coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeTorsion<T: Real> {
    pub rho_e: TorsionElement<T>,
    pub rho_f: TorsionElement<T>,
    pub ratio: T,
}

pub fn relative_torsion<T: Real>(
    c_e: &FiniteComplex<T>,
    c_f: &FiniteComplex<T>,
    mf_e: &MetricFamily<T>,
    mf_f: &MetricFamily<T>,
    u: T,
) -> Result<RelativeTorsion<T>> {
    let rho_e = torsion(c_e, mf_e, u)?;
    let rho_f = torsion(c_f, mf_f, u)?;
    let ratio = (rho_e.log_coefficient() - rho_f.log_coefficient()).exp();
    Ok(RelativeTorsion { rho_e, rho_f, ratio })
}

/// The isomorphism of graded determinant lines sending `ρ_E` to `ρ_F`,
/// applied to `x`.
pub fn correspondence_apply<T: Real>(rho_e: &TorsionElement<T>, rho_f: &TorsionElement<T>, x: &GradedDetLine<T>) -> Result<GradedDetLine<T>> {
    if !(rho_e.scalar.abs() > T::zero()) || !rho_e.scalar.is_finite() {
        return Err(Error::ZeroTorsion);
    }
    let same_shape = x.lines().len() == rho_e.rho_prime.lines().len()
        && x.lines().iter().zip(rho_e.rho_prime.lines()).all(|(a, b)| a.module() == b.module());
    if !same_shape {
        return Err(Error::ShapeMismatch("element does not live in the source determinant line".into()));
    }
    let lambda = x.coefficient() / rho_e.scalar;
    Ok(rho_f.as_graded().scaled(lambda))
}
