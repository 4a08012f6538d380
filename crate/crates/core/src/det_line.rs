//! Determinant lines of Hilbertian modules.
//!
//! `det(M)` is coordinatized by a single real number against the base
//! symbol, the class of the standard inner product of the defining
//! representation. The symbol of a metric `<v, w> = <A v, w>_base` has
//! coefficient `Det_τ(A)^{-1/2}`; every map between determinant lines is
//! then multiplication by an explicit Fuglede-Kadison determinant.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;
use crate::vn::{fk_determinant, fk_determinant_abs, CommutantOp, Module, SpectralTolerances};

/// Relative tolerance used for holonomy comparisons and relator checks.
pub const HOLONOMY_TOL: f64 = 1e-9;
/// Tolerance on `β ∘ α = 0` and `β s = 1`, relative to the operator norms.
pub const EXACTNESS_TOL: f64 = 1e-10;

/// Point of `det(M)`, as a multiple of the base symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct DetLineElement<T: Real> {
    module: Module<T>,
    coeff: T,
}

impl<T: Real> DetLineElement<T> {
    pub fn new(module: &Module<T>, coeff: T) -> Self {
        Self { module: module.clone(), coeff }
    }

    /// The base symbol; for the zero module this is `1 ∈ ℝ = det(0)`.
    pub fn base(module: &Module<T>) -> Self {
        Self::new(module, T::one())
    }

    pub fn module(&self) -> &Module<T> {
        &self.module
    }

    pub fn coeff(&self) -> T {
        self.coeff
    }

    /// `+1` for the canonical orientation, `-1` for the opposite one.
    pub fn orientation(&self) -> i8 {
        if self.coeff > T::zero() {
            1
        } else if self.coeff < T::zero() {
            -1
        } else {
            0
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::new(&self.module, self.coeff * s)
    }
}

/// Symbol of the metric `<A ·, ·>_base`.
pub fn metric_element<T: Real>(a: &CommutantOp<T>) -> Result<DetLineElement<T>> {
    if !a.is_endomorphism() {
        return Err(Error::ShapeMismatch("metric must be an endomorphism".into()));
    }
    let tol = SpectralTolerances::default();
    let density = crate::vn::spectral_density_with(a, &tol)?;
    let (kernel, _) = density.split_kernel(&tol);
    if let Some(&(lam, _)) = density.steps().first() {
        if lam < T::zero() && kernel == T::zero() {
            return Err(Error::NotPositive { eigenvalue: lam.as_f64() });
        }
    }
    if kernel > T::zero() {
        return Err(Error::Singular);
    }
    let det = fk_determinant(a)?;
    Ok(DetLineElement::new(a.domain(), (-T::lit(0.5) * det.log_value).exp()))
}

/// `det(M) ⊗ det(N) → det(M ⊕ N)`.
pub fn direct_sum<T: Real>(e1: &DetLineElement<T>, e2: &DetLineElement<T>) -> Result<DetLineElement<T>> {
    let module = e1.module.direct_sum(&e2.module)?;
    Ok(DetLineElement::new(&module, e1.coeff * e2.coeff))
}

/// `f_*: det(M) → det(N)` for an isomorphism `f`, multiplication by
/// `Det_τ(|f|)`.
pub fn induced_map<T: Real>(f: &CommutantOp<T>, e: &DetLineElement<T>) -> Result<DetLineElement<T>> {
    if f.domain() != e.module() {
        return Err(Error::ShapeMismatch("map does not start at the element's module".into()));
    }
    if !f.is_endomorphism() {
        let (a, b) = (f.domain().dim(), f.codomain().dim());
        if (a - b).abs() > T::tol(1e-12) * a.max(b).max(T::one()) {
            return Err(Error::DimensionMismatch(format!("{a} vs {b}")));
        }
        return Err(Error::NotInvertible);
    }
    if f.blocks().iter().any(|b| b.lu().map(|lu| lu.is_singular()).unwrap_or(true)) {
        return Err(Error::NotInvertible);
    }
    let det = fk_determinant_abs(f)?;
    if det.value == T::zero() || !det.value.is_finite() {
        return Err(Error::NotInvertible);
    }
    Ok(DetLineElement::new(f.codomain(), e.coeff * det.value))
}

/// Isomorphism `det(M') ⊗ det(M'') → det(M)` of a short exact sequence
/// `0 → M' →α M →β M'' → 0`, computed through the orthogonal splitting
/// `s = β*(ββ*)^{-1}`.
pub fn exact_sequence_iso<T: Real>(
    e1: &DetLineElement<T>,
    e2: &DetLineElement<T>,
    alpha: &CommutantOp<T>,
    beta: &CommutantOp<T>,
) -> Result<DetLineElement<T>> {
    check_exact(e1, e2, alpha, beta)?;
    let bbt = beta.compose(&beta.adjoint())?;
    let inv = bbt.inverse().map_err(|_| Error::NotExact("β is not surjective".into()))?;
    let splitting = beta.adjoint().compose(&inv)?;
    exact_sequence_iso_with_splitting(e1, e2, alpha, beta, &splitting)
}

/// Same as [`exact_sequence_iso`] with an arbitrary splitting `s: M'' → M`,
/// `β s = 1`. The result does not depend on the choice.
pub fn exact_sequence_iso_with_splitting<T: Real>(
    e1: &DetLineElement<T>,
    e2: &DetLineElement<T>,
    alpha: &CommutantOp<T>,
    beta: &CommutantOp<T>,
    splitting: &CommutantOp<T>,
) -> Result<DetLineElement<T>> {
    check_exact(e1, e2, alpha, beta)?;
    let bs = beta.compose(splitting)?;
    let defect = bs.sub(&CommutantOp::identity(e2.module()))?.norm();
    if defect > T::tol(EXACTNESS_TOL) * beta.norm().max(T::one()) * splitting.norm().max(T::one()) {
        return Err(Error::NotExact(format!("splitting defect {defect:e}")));
    }
    // [α | s]: M' ⊕ M'' → M
    let source = e1.module().direct_sum(e2.module())?;
    let blocks = alpha
        .blocks()
        .iter()
        .zip(splitting.blocks())
        .map(|(a, s)| CMatrix::hstack(a, s))
        .collect();
    let iso = CommutantOp::new(&source, alpha.codomain(), blocks)?;
    induced_map(&iso, &direct_sum(e1, e2)?).map_err(|e| match e {
        Error::NotInvertible => Error::NotExact("α is not injective".into()),
        other => other,
    })
}

fn check_exact<T: Real>(e1: &DetLineElement<T>, e2: &DetLineElement<T>, alpha: &CommutantOp<T>, beta: &CommutantOp<T>) -> Result<()> {
    if alpha.domain() != e1.module() || beta.codomain() != e2.module() {
        return Err(Error::ShapeMismatch("sequence does not match the given elements".into()));
    }
    if alpha.codomain() != beta.domain() {
        return Err(Error::ShapeMismatch("α and β do not compose".into()));
    }
    let ba = beta.compose(alpha)?.norm();
    if ba > T::tol(EXACTNESS_TOL) * alpha.norm().max(T::one()) * beta.norm().max(T::one()) {
        return Err(Error::NotExact(format!("β∘α has norm {ba:e}")));
    }
    let middle = alpha.codomain().mults();
    for ((k1, k), k2) in alpha.domain().mults().iter().zip(middle).zip(beta.codomain().mults()) {
        if k1 + k2 != *k {
            return Err(Error::NotExact("dimensions do not add up".into()));
        }
    }
    Ok(())
}

/// Element of the graded line `Π_q det(M_q)^{(-1)^q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedDetLine<T: Real> {
    lines: Vec<DetLineElement<T>>,
}

impl<T: Real> GradedDetLine<T> {
    pub fn new(lines: Vec<DetLineElement<T>>) -> Self {
        Self { lines }
    }

    pub fn base(modules: &[Module<T>]) -> Self {
        Self { lines: modules.iter().map(DetLineElement::base).collect() }
    }

    pub fn lines(&self) -> &[DetLineElement<T>] {
        &self.lines
    }

    /// `Π_q c_q^{(-1)^q}` relative to the graded base.
    pub fn coefficient(&self) -> T {
        self.log_coefficient().exp() * self.sign()
    }

    /// `Σ_q (-1)^q ln|c_q|`.
    pub fn log_coefficient(&self) -> T {
        self.lines
            .iter()
            .enumerate()
            .map(|(q, l)| if q % 2 == 0 { l.coeff.abs().ln() } else { -l.coeff.abs().ln() })
            .sum()
    }

    fn sign(&self) -> T {
        if self.lines.iter().filter(|l| l.coeff < T::zero()).count() % 2 == 0 {
            T::one()
        } else {
            -T::one()
        }
    }

    /// Multiplies the element by `s`; the factor is carried by degree 0.
    pub fn scaled(&self, s: T) -> Self {
        let mut lines = self.lines.clone();
        if let Some(first) = lines.first_mut() {
            first.coeff *= s;
        }
        Self { lines }
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.lines.len() != other.lines.len() {
            return Err(Error::ShapeMismatch("graded lines of different length".into()));
        }
        let lines = self.lines.iter().zip(&other.lines).map(|(a, b)| direct_sum(a, b)).collect::<Result<_>>()?;
        Ok(Self { lines })
    }
}

/// Word in the generators: `(index, ±1)` letters.
pub type Word = Vec<(usize, i32)>;

/// Positive-real representation `γ ↦ Det_τ(ρ(γ))` of a flat determinant
/// line bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct Holonomy<T: Real> {
    pub generator_values: Vec<T>,
    pub consistent: bool,
}

impl<T: Real> Holonomy<T> {
    /// Value of a word under the holonomy homomorphism.
    pub fn evaluate(&self, word: &[(usize, i32)]) -> Result<T> {
        let mut log = T::zero();
        for &(j, e) in word {
            let v = self.generator_values.get(j).ok_or_else(|| Error::MalformedWord(format!("generator {j} out of range")))?;
            log += T::lit(f64::from(e)) * v.ln();
        }
        Ok(log.exp())
    }
}

pub fn rep_holonomy<T: Real>(generators: &[CommutantOp<T>], relators: &[Word]) -> Result<Holonomy<T>> {
    if let Some(first) = generators.first() {
        for g in generators {
            if !g.is_endomorphism() || g.domain() != first.domain() {
                return Err(Error::ShapeMismatch("generators must be endomorphisms of one module".into()));
            }
        }
    }
    let mut generator_values = Vec::with_capacity(generators.len());
    for (j, g) in generators.iter().enumerate() {
        if g.blocks().iter().any(|b| b.lu().map(|lu| lu.is_singular()).unwrap_or(true)) {
            return Err(Error::SingularGenerator(j));
        }
        let d = fk_determinant_abs(g)?;
        if !(d.value > T::zero()) {
            return Err(Error::SingularGenerator(j));
        }
        generator_values.push(d.value);
    }
    for w in relators {
        for &(j, e) in w {
            if j >= generators.len() || (e != 1 && e != -1) {
                return Err(Error::MalformedWord(format!("letter ({j}, {e})")));
            }
        }
    }
    let mut hol = Holonomy { generator_values, consistent: true };
    for w in relators {
        let v = hol.evaluate(w)?;
        if (v - T::one()).abs() > T::tol(HOLONOMY_TOL) {
            hol.consistent = false;
        }
    }
    Ok(hol)
}

/// Flat `ℝ⁺` bundles are isomorphic exactly when their holonomies agree.
pub fn bundle_iso_exists<T: Real>(h1: &Holonomy<T>, h2: &Holonomy<T>) -> Result<bool> {
    if h1.generator_values.len() != h2.generator_values.len() {
        return Err(Error::GeneratorCountMismatch { left: h1.generator_values.len(), right: h2.generator_values.len() });
    }
    if !h1.consistent || !h2.consistent {
        return Err(Error::InconsistentHolonomy);
    }
    let tol = T::tol(HOLONOMY_TOL);
    Ok(h1
        .generator_values
        .iter()
        .zip(&h2.generator_values)
        .all(|(&a, &b)| (a - b).abs() <= tol * a.abs().max(b.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C;
    use crate::vn::{diagonal_op, make_algebra, Algebra};

    fn scalar_alg() -> Algebra<f64> {
        make_algebra(&[(1, 1.0f64)], false).unwrap()
    }

    #[test]
    fn metric_element_examples() {
        let m = Module::new(&scalar_alg(), &[2]).unwrap();
        assert_eq!(metric_element(&CommutantOp::identity(&m)).unwrap().coeff(), 1.0);
        let a = diagonal_op(&m, &[vec![1.0, 4.0]]).unwrap();
        assert!((metric_element(&a).unwrap().coeff() - 0.5).abs() < 1e-15);
        assert_eq!(metric_element(&diagonal_op(&m, &[vec![0.0, 4.0]]).unwrap()).unwrap_err(), Error::Singular);
        assert!(matches!(metric_element(&diagonal_op(&m, &[vec![-1.0, 4.0]]).unwrap()), Err(Error::NotPositive { .. })));
        // A₂ = B A₁ with commuting B
        let a1 = diagonal_op(&m, &[vec![2.0, 3.0]]).unwrap();
        let b = diagonal_op(&m, &[vec![5.0, 0.5]]).unwrap();
        let a2 = b.compose(&a1).unwrap();
        let lhs = metric_element(&a2).unwrap().coeff();
        let rhs = fk_determinant(&b).unwrap().value.powf(-0.5) * metric_element(&a1).unwrap().coeff();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn direct_sum_examples() {
        let alg = scalar_alg();
        let m = Module::new(&alg, &[1]).unwrap();
        let n = Module::new(&alg, &[2]).unwrap();
        assert_eq!(direct_sum(&DetLineElement::base(&m), &DetLineElement::base(&n)).unwrap(), DetLineElement::base(&Module::new(&alg, &[3]).unwrap()));
        let s = direct_sum(&DetLineElement::new(&m, 0.5), &DetLineElement::new(&n, 3.0)).unwrap();
        assert_eq!(s.coeff(), 1.5);
        let other = Module::new(&Algebra::<f64>::matrix(2), &[1]).unwrap();
        assert_eq!(direct_sum(&DetLineElement::base(&m), &DetLineElement::base(&other)).unwrap_err(), Error::AlgebraMismatch);
    }

    #[test]
    fn induced_map_examples() {
        let alg = scalar_alg();
        let m = Module::new(&alg, &[1]).unwrap();
        let e = DetLineElement::new(&m, 0.7);
        assert_eq!(induced_map(&CommutantOp::identity(&m), &e).unwrap(), e);
        let three = CommutantOp::scalar(&m, 3.0);
        assert!((induced_map(&three, &DetLineElement::base(&m)).unwrap().coeff() - 3.0).abs() < 1e-15);
        assert_eq!(induced_map(&CommutantOp::zero(&m, &m), &e).unwrap_err(), Error::NotInvertible);
        let n = Module::new(&alg, &[2]).unwrap();
        assert!(matches!(induced_map(&CommutantOp::zero(&m, &n), &e), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn induced_map_is_functorial() {
        let alg = make_algebra(&[(1, 0.5f64), (1, 0.5)], false).unwrap();
        let m = Module::new(&alg, &[2, 1]).unwrap();
        let f = CommutantOp::endo(
            &m,
            vec![
                CMatrix::from_vec(2, 2, vec![C::new(1.0, 0.5), C::new(2.0, 0.0), C::new(0.0, -1.0), C::new(3.0, 0.0)]).unwrap(),
                CMatrix::from_vec(1, 1, vec![C::new(0.0, 2.0)]).unwrap(),
            ],
        )
        .unwrap();
        let g = CommutantOp::endo(
            &m,
            vec![
                CMatrix::from_vec(2, 2, vec![C::new(0.5, 0.0), C::new(0.0, 1.0), C::new(1.0, 0.0), C::new(1.0, 1.0)]).unwrap(),
                CMatrix::from_vec(1, 1, vec![C::new(-1.5, 0.0)]).unwrap(),
            ],
        )
        .unwrap();
        let e = DetLineElement::new(&m, 1.3);
        let composed = induced_map(&g.compose(&f).unwrap(), &e).unwrap().coeff();
        let stepwise = induced_map(&g, &induced_map(&f, &e).unwrap()).unwrap().coeff();
        assert!((composed - stepwise).abs() < 1e-10 * composed);
    }

    #[test]
    fn exact_sequence_examples() {
        let alg = scalar_alg();
        let m1 = Module::new(&alg, &[1]).unwrap();
        let m2 = Module::new(&alg, &[2]).unwrap();
        let m = Module::new(&alg, &[3]).unwrap();
        let incl = CommutantOp::new(&m1, &m, vec![CMatrix::from_fn(3, 1, |r, _| if r == 0 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) })]).unwrap();
        let proj = CommutantOp::new(&m, &m2, vec![CMatrix::from_fn(2, 3, |r, c| if c == r + 1 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) })]).unwrap();
        let e1 = DetLineElement::new(&m1, 0.5);
        let e2 = DetLineElement::new(&m2, 3.0);
        let split = exact_sequence_iso(&e1, &e2, &incl, &proj).unwrap();
        assert!((split.coeff() - direct_sum(&e1, &e2).unwrap().coeff()).abs() < 1e-14);

        // scaling α by a multiplies by Det_τ(a)
        let scaled = incl.scale(4.0);
        let r = exact_sequence_iso(&e1, &e2, &scaled, &proj).unwrap();
        assert!((r.coeff() - 4.0 * split.coeff()).abs() < 1e-13);

        // other splittings give the same element
        let skewed = CommutantOp::new(&m2, &m, vec![CMatrix::from_vec(3, 2, vec![C::new(0.7, 0.1), C::new(-2.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]).unwrap()]).unwrap();
        let r2 = exact_sequence_iso_with_splitting(&e1, &e2, &incl, &proj, &skewed).unwrap();
        assert!((r2.coeff() - split.coeff()).abs() < 1e-12);

        // zero quotient: the induced map of α
        let zero = Module::zero(&alg);
        let to_zero = CommutantOp::zero(&m1, &zero);
        let iso = CommutantOp::scalar(&m1, 2.0);
        let r3 = exact_sequence_iso(&e1, &DetLineElement::base(&zero), &iso, &to_zero).unwrap();
        assert!((r3.coeff() - induced_map(&iso, &e1).unwrap().coeff()).abs() < 1e-15);

        // not exact
        let bad = CommutantOp::new(&m, &m2, vec![CMatrix::from_fn(2, 3, |r, c| if c == r { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) })]).unwrap();
        assert!(matches!(exact_sequence_iso(&e1, &e2, &incl, &bad), Err(Error::NotExact(_))));
    }

    #[test]
    fn holonomy_examples() {
        let alg = scalar_alg();
        let m2 = Module::new(&alg, &[2]).unwrap();
        let m1 = Module::new(&alg, &[1]).unwrap();
        let trivial = rep_holonomy(&[CommutantOp::identity(&m2)], &[vec![(0, 1), (0, 1)]]).unwrap();
        assert_eq!(trivial.generator_values, vec![1.0]);
        assert!(trivial.consistent);

        let sl = rep_holonomy(&[diagonal_op(&m2, &[vec![2.0, 0.5]]).unwrap()], &[]).unwrap();
        assert!((sl.generator_values[0] - 1.0).abs() < 1e-15);

        let two = CommutantOp::scalar(&m1, 2.0);
        let h = rep_holonomy(std::slice::from_ref(&two), &[vec![(0, 1), (0, 1)]]).unwrap();
        assert!(!h.consistent);
        assert!(rep_holonomy(std::slice::from_ref(&two), &[]).unwrap().consistent);
        assert!(rep_holonomy(std::slice::from_ref(&two), &[vec![(0, 1), (0, -1)]]).unwrap().consistent);
        assert!(matches!(rep_holonomy(std::slice::from_ref(&two), &[vec![(1, 1)]]), Err(Error::MalformedWord(_))));
        assert!(matches!(rep_holonomy(&[two], &[vec![(0, 2)]]), Err(Error::MalformedWord(_))));
        assert_eq!(rep_holonomy(&[CommutantOp::zero(&m1, &m1)], &[]).unwrap_err(), Error::SingularGenerator(0));
    }

    #[test]
    fn bundle_iso_examples() {
        let h = |v: Vec<f64>| Holonomy { generator_values: v, consistent: true };
        assert!(bundle_iso_exists(&h(vec![2.0, 3.0]), &h(vec![2.0, 3.0])).unwrap());
        assert!(!bundle_iso_exists(&h(vec![2.0, 3.0]), &h(vec![2.0, 3.0000001])).unwrap());
        assert!(matches!(bundle_iso_exists(&h(vec![2.0]), &h(vec![2.0, 3.0])), Err(Error::GeneratorCountMismatch { .. })));

        let alg = scalar_alg();
        let m = Module::new(&alg, &[2]).unwrap();
        let rot = CommutantOp::endo(&m, vec![CMatrix::from_vec(2, 2, vec![C::new(0.6, 0.0), C::new(0.0, 0.8), C::new(0.0, 0.8), C::new(0.6, 0.0)]).unwrap()]).unwrap();
        let unitary = rep_holonomy(&[rot], &[]).unwrap();
        let trivial = rep_holonomy(&[CommutantOp::identity(&m)], &[]).unwrap();
        assert!(bundle_iso_exists(&unitary, &trivial).unwrap());
    }

    #[test]
    fn graded_coefficient_alternates() {
        let alg = scalar_alg();
        let m = Module::new(&alg, &[1]).unwrap();
        let g = GradedDetLine::new(vec![DetLineElement::new(&m, 2.0), DetLineElement::new(&m, 8.0), DetLineElement::new(&m, 3.0)]);
        assert!((g.coefficient() - 0.75).abs() < 1e-15);
        assert!((g.scaled(4.0).coefficient() - 3.0).abs() < 1e-14);
    }
}
