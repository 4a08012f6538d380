//! Exterior algebra on `2n` generators, characteristic forms and the model
//! heat kernel.
//!
//! A monomial `e_{i1} ∧ … ∧ e_{ik}` (`i1 < … < ik`, zero based) is stored as
//! a bit mask. Curvature-type data are square matrices of even forms, which
//! commute with each other, so matrix power series behave as in the
//! commutative case and terminate by nilpotency.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Largest supported number of generators.
pub const MAX_GENERATORS: usize = 40;
/// Tolerance for `D^t = -D`, relative to the largest coefficient.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// `B_0, B_2, …, B_40`.
const BERNOULLI_EVEN: [(f64, f64); 21] = [
    (1.0, 1.0),
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
    (-26315271553053477373.0, 1919190.0),
    (2929993913841559.0, 6.0),
    (-261082718496449122051.0, 13530.0),
];

/// `B_{2k}`.
pub fn bernoulli_even<T: Real>(k: usize) -> T {
    let (p, q) = BERNOULLI_EVEN[k];
    T::lit(p) / T::lit(q)
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, j| acc * T::from_count(j))
}

/// Element of `Λ(e_0, …, e_{2n-1}) ⊗ ℂ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormElement<T: Real> {
    dim2n: usize,
    terms: BTreeMap<u64, C<T>>,
}

fn check_dim(dim2n: usize) -> Result<()> {
    if dim2n % 2 != 0 || dim2n > MAX_GENERATORS {
        return Err(Error::InvalidForm(format!("{dim2n} generators (must be even and at most {MAX_GENERATORS})")));
    }
    Ok(())
}

/// Sign of moving every generator of `b` past the larger generators of `a`.
fn shuffle_sign(a: u64, b: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    swaps % 2 == 1
}

impl<T: Real> FormElement<T> {
    pub fn zero(dim2n: usize) -> Result<Self> {
        check_dim(dim2n)?;
        Ok(Self { dim2n, terms: BTreeMap::new() })
    }

    pub fn constant(dim2n: usize, c: C<T>) -> Result<Self> {
        let mut f = Self::zero(dim2n)?;
        f.insert(0, c);
        Ok(f)
    }

    /// `c · e_{i1} ∧ … ∧ e_{ik}`; the indices may come in any order.
    pub fn monomial(dim2n: usize, subset: &[usize], c: C<T>) -> Result<Self> {
        let mut f = Self::zero(dim2n)?;
        let mut mask = 0u64;
        let mut negative = false;
        for &i in subset {
            if i >= dim2n {
                return Err(Error::InvalidForm(format!("generator {i} out of range for {dim2n} generators")));
            }
            let bit = 1u64 << i;
            if mask & bit != 0 {
                return Ok(f);
            }
            negative ^= shuffle_sign(mask, bit);
            mask |= bit;
        }
        f.insert(mask, if negative { -c } else { c });
        Ok(f)
    }

    pub fn generator(dim2n: usize, i: usize) -> Result<Self> {
        Self::monomial(dim2n, &[i], cr(T::one()))
    }

    /// `e_0 ∧ … ∧ e_{2n-1}`.
    pub fn volume(dim2n: usize) -> Result<Self> {
        Self::monomial(dim2n, &(0..dim2n).collect::<Vec<_>>(), cr(T::one()))
    }

    fn insert(&mut self, mask: u64, c: C<T>) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_insert_with(C::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn dim2n(&self) -> usize {
        self.dim2n
    }

    /// `(sorted generator indices, coefficient)` pairs.
    pub fn terms(&self) -> Vec<(Vec<usize>, C<T>)> {
        self.terms.iter().map(|(&m, &c)| ((0..64).filter(|i| m >> i & 1 == 1).collect(), c)).collect()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, subset: &[usize]) -> C<T> {
        let mask = subset.iter().fold(0u64, |m, &i| m | 1 << i);
        self.terms.get(&mask).copied().unwrap_or_else(C::zero)
    }

    /// Degree-0 part.
    pub fn scalar_part(&self) -> C<T> {
        self.terms.get(&0).copied().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    /// Largest degree present (0 for the zero form).
    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    /// Smallest degree present.
    pub fn min_degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).min().unwrap_or(0)
    }

    /// Degree-`k` component.
    pub fn homogeneous(&self, k: usize) -> Self {
        Self { dim2n: self.dim2n, terms: self.terms.iter().filter(|(m, _)| m.count_ones() as usize == k).map(|(&m, &c)| (m, c)).collect() }
    }

    pub fn max_abs(&self) -> T {
        self.terms.values().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim2n != other.dim2n {
            return Err(Error::DimensionMismatch(format!("forms on {} and {} generators", self.dim2n, other.dim2n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.insert(m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(cr(-T::one())))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = Self { dim2n: self.dim2n, terms: BTreeMap::new() };
        for (&m, &c) in &self.terms {
            out.insert(m, c * s);
        }
        out
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    /// Graded-commutative product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = Self { dim2n: self.dim2n, terms: BTreeMap::new() };
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let c = ca * cb;
                out.insert(a | b, if shuffle_sign(a, b) { -c } else { c });
            }
        }
        Ok(out)
    }

    /// `exp(x) = e^{x_0} Σ_k (x - x_0)^k / k!`, terminating because `x - x_0`
    /// is nilpotent. Only meaningful for even `x`.
    pub fn exp(&self) -> Self {
        let x0 = self.scalar_part();
        let mut nil = self.clone();
        nil.terms.remove(&0);
        let mut acc = Self::constant(self.dim2n, cr(T::one())).expect("dimension already checked");
        let mut power = acc.clone();
        let mut k = 1;
        while !power.is_zero() && k <= self.dim2n {
            power = power.wedge(&nil).expect("same dimension").scale_re(T::one() / T::from_count(k));
            acc = acc.add(&power).expect("same dimension");
            k += 1;
        }
        acc.scale(x0.exp())
    }
}

/// Coefficient of `e_0 ∧ … ∧ e_{2n-1}`.
pub fn top_coefficient<T: Real>(x: &FormElement<T>) -> C<T> {
    let full = if x.dim2n == 64 { u64::MAX } else { (1u64 << x.dim2n) - 1 };
    x.terms.get(&full).copied().unwrap_or_else(C::zero)
}

pub fn wedge<T: Real>(a: &FormElement<T>, b: &FormElement<T>) -> Result<FormElement<T>> {
    a.wedge(b)
}

/// Square matrix of even forms.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix<T: Real> {
    dim2n: usize,
    size: usize,
    entries: Vec<FormElement<T>>,
}

impl<T: Real> FormMatrix<T> {
    /// Row-major entries; all must be even forms on `dim2n` generators.
    pub fn new(dim2n: usize, size: usize, entries: Vec<FormElement<T>>) -> Result<Self> {
        check_dim(dim2n)?;
        if entries.len() != size * size {
            return Err(Error::InvalidForm(format!("{} entries for a {size}x{size} matrix", entries.len())));
        }
        for e in &entries {
            if e.dim2n != dim2n {
                return Err(Error::DimensionMismatch(format!("entry on {} generators in a matrix over {dim2n}", e.dim2n)));
            }
            if !e.is_even() {
                return Err(Error::InvalidForm("matrix entries must be even forms".into()));
            }
        }
        Ok(Self { dim2n, size, entries })
    }

    pub fn from_fn(dim2n: usize, size: usize, mut f: impl FnMut(usize, usize) -> FormElement<T>) -> Result<Self> {
        let entries = (0..size * size).map(|k| f(k / size, k % size)).collect();
        Self::new(dim2n, size, entries)
    }

    pub fn zeros(dim2n: usize, size: usize) -> Result<Self> {
        check_dim(dim2n)?;
        Ok(Self { dim2n, size, entries: vec![FormElement::zero(dim2n)?; size * size] })
    }

    pub fn identity(dim2n: usize, size: usize) -> Result<Self> {
        let mut m = Self::zeros(dim2n, size)?;
        for i in 0..size {
            m.entries[i * size + i] = FormElement::constant(dim2n, cr(T::one()))?;
        }
        Ok(m)
    }

    /// `1 × 1` matrix.
    pub fn scalar(x: FormElement<T>) -> Result<Self> {
        Self::new(x.dim2n, 1, vec![x])
    }

    pub fn dim2n(&self) -> usize {
        self.dim2n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> &FormElement<T> {
        &self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[FormElement<T>] {
        &self.entries
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.dim2n != other.dim2n || self.size != other.size {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} over {} vs {}x{} over {}",
                self.size, self.size, self.dim2n, other.size, other.size, other.dim2n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(self.with_entries(entries))
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.with_entries(self.entries.iter().map(|e| e.scale_re(s)).collect())
    }

    fn with_entries(&self, entries: Vec<FormElement<T>>) -> Self {
        Self { dim2n: self.dim2n, size: self.size, entries }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let n = self.size;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = FormElement::zero(self.dim2n)?;
                for k in 0..n {
                    acc = acc.add(&self.entry(i, k).wedge(other.entry(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(self.with_entries(entries))
    }

    pub fn trace(&self) -> FormElement<T> {
        (0..self.size).fold(FormElement::zero(self.dim2n).expect("dimension already checked"), |acc, i| {
            acc.add(self.entry(i, i)).expect("same dimension")
        })
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        self.with_entries((0..n * n).map(|k| self.entry(k % n, k / n).clone()).collect())
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.dim2n != other.dim2n {
            return Err(Error::DimensionMismatch("forms over different generator sets".into()));
        }
        let (a, b) = (self.size, other.size);
        Self::from_fn(self.dim2n, a + b, |i, j| match (i < a, j < a) {
            (true, true) => self.entry(i, j).clone(),
            (false, false) => other.entry(i - a, j - a).clone(),
            _ => FormElement::zero(self.dim2n).expect("dimension already checked"),
        })
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().map(FormElement::max_abs).fold(T::zero(), T::max)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let tol = T::tol(ANTISYMMETRY_TOL) * self.max_abs().max(T::one());
        let n = self.size;
        (0..n).all(|i| (0..n).all(|j| self.entry(i, j).add(self.entry(j, i)).map(|s| s.max_abs() <= tol).unwrap_or(false)))
    }

    pub fn is_symmetric(&self) -> bool {
        let tol = T::tol(ANTISYMMETRY_TOL) * self.max_abs().max(T::one());
        let n = self.size;
        (0..n).all(|i| (0..n).all(|j| self.entry(i, j).sub(self.entry(j, i)).map(|s| s.max_abs() <= tol).unwrap_or(false)))
    }

    /// No entry has a degree-0 part.
    pub fn is_nilpotent(&self) -> bool {
        self.entries.iter().all(|e| e.scalar_part().is_zero())
    }

    /// `Σ_k c_k M^k` for `k ≤ order`, stopping once the powers vanish.
    fn power_series(&self, coeff: impl Fn(usize) -> T, order: usize) -> Result<Self> {
        let mut acc = Self::identity(self.dim2n, self.size)?.scale_re(coeff(0));
        let mut power = Self::identity(self.dim2n, self.size)?;
        for k in 1..=order {
            power = power.matmul(self)?;
            if power.entries.iter().all(FormElement::is_zero) {
                break;
            }
            acc = acc.add(&power.scale_re(coeff(k)))?;
        }
        Ok(acc)
    }
}

/// Order up to which the nilpotent series are summed by default.
fn default_order(dim2n: usize) -> usize {
    dim2n / 2
}

fn require_nilpotent<T: Real>(m: &FormMatrix<T>) -> Result<()> {
    if m.is_nilpotent() {
        Ok(())
    } else {
        Err(Error::NotNilpotent)
    }
}

/// `Â(rD) = exp(½ tr log((rD/2) / sinh(rD/2)))`.
pub fn a_hat<T: Real>(d: &FormMatrix<T>, r: T) -> Result<FormElement<T>> {
    a_hat_with_order(d, r, default_order(d.dim2n))
}

/// [`a_hat`] with the number of terms of the log series given explicitly.
pub fn a_hat_with_order<T: Real>(d: &FormMatrix<T>, r: T, order: usize) -> Result<FormElement<T>> {
    if !d.is_antisymmetric() {
        return Err(Error::NotAntisymmetric);
    }
    require_nilpotent(d)?;
    // log((x/2)/sinh(x/2)) = -Σ_{k≥1} B_{2k} x^{2k} / (2k (2k)!)
    let rd2 = d.matmul(d)?.scale_re(r * r);
    let mut log = FormElement::zero(d.dim2n)?;
    let mut power = FormMatrix::identity(d.dim2n, d.size)?;
    for k in 1..=order.min(BERNOULLI_EVEN.len() - 1) {
        power = power.matmul(&rd2)?;
        let tr = power.trace();
        if tr.is_zero() && power.entries.iter().all(FormElement::is_zero) {
            break;
        }
        let c = -bernoulli_even::<T>(k) / (T::from_count(2 * k) * factorial::<T>(2 * k));
        log = log.add(&tr.scale_re(c))?;
    }
    Ok(log.scale_re(T::lit(0.5)).exp())
}

/// `ch(rL) = tr exp(rL)`.
pub fn chern_char<T: Real>(l: &FormMatrix<T>, r: T) -> Result<FormElement<T>> {
    require_nilpotent(l)?;
    let rl = l.scale_re(r);
    Ok(rl.power_series(|k| factorial::<T>(k).recip(), default_order(l.dim2n))?.trace())
}

/// Index density at one point, with and without the normalization prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticDensity<T: Real> {
    /// `z · (2/i)^{n}(4πr)^{-n} · [Â(rD) ch(rL)]^{max}` on `2n` generators.
    pub raw: C<T>,
    /// `z · [Â(rD) ch(rL)]^{max}`.
    pub unnormalized: C<T>,
    /// `(2/i)^{n}(4πr)^{-n}`.
    pub prefactor: C<T>,
}

/// `(2/i)^{N/2} (4πr)^{-N/2}` on the principal branch.
pub fn density_prefactor<T: Real>(dim2n: usize, r: T) -> C<T> {
    let half = dim2n / 2;
    let two_over_i = C::new(T::zero(), -T::lit(2.0));
    two_over_i.powi(half as i32) * (T::lit(4.0) * T::PI() * r).powi(-(half as i32))
}

pub fn adiabatic_density<T: Real>(d: &FormMatrix<T>, l: &FormMatrix<T>, z_trace: T, r: T) -> Result<AdiabaticDensity<T>> {
    if !(r > T::zero()) {
        return Err(Error::NonpositiveTime);
    }
    if d.dim2n != l.dim2n {
        return Err(Error::DimensionMismatch("curvature data over different generator sets".into()));
    }
    let top = top_coefficient(&a_hat(d, r)?.wedge(&chern_char(l, r)?)?);
    let prefactor = density_prefactor(d.dim2n, r);
    let unnormalized = top * z_trace;
    Ok(AdiabaticDensity { raw: unnormalized * prefactor, unnormalized, prefactor })
}

/// `x^t M x` for a real vector `x`.
fn quadratic_form<T: Real>(m: &FormMatrix<T>, x: &[T]) -> Result<FormElement<T>> {
    let mut acc = FormElement::zero(m.dim2n)?;
    for (i, &xi) in x.iter().enumerate() {
        for (j, &xj) in x.iter().enumerate() {
            acc = acc.add(&m.entry(i, j).scale_re(xi * xj))?;
        }
    }
    Ok(acc)
}

/// Heat kernel `e^{-J₀}(x, 0)` of the model operator:
/// `(4πr)^{-N/2} Â(rD) e^{x^t C x / 8} exp(rL - (1/4r) x^t ((rD/2)/tanh(rD/2)) x)`
/// with `N` the length of `x`. The result is matrix valued like `L`.
pub fn mehler_kernel<T: Real>(d: &FormMatrix<T>, c_sym: &FormMatrix<T>, l: &FormMatrix<T>, x: &[T], r: T) -> Result<FormMatrix<T>> {
    if !(r > T::zero()) {
        return Err(Error::NonpositiveTime);
    }
    if d.size != x.len() || c_sym.size != x.len() {
        return Err(Error::InvalidForm(format!("point of dimension {} for {}x{} curvature", x.len(), d.size, d.size)));
    }
    if d.dim2n != c_sym.dim2n || d.dim2n != l.dim2n {
        return Err(Error::DimensionMismatch("kernel data over different generator sets".into()));
    }
    if !c_sym.is_symmetric() {
        return Err(Error::InvalidForm("C must be symmetric".into()));
    }
    require_nilpotent(l)?;
    let dim2n = d.dim2n;
    let order = default_order(dim2n);
    let a = a_hat(d, r)?;
    // (y/2)/tanh(y/2) = Σ_k B_{2k} y^{2k} / (2k)!
    let rd2 = d.matmul(d)?.scale_re(r * r);
    let coth = rd2.power_series(|k| bernoulli_even::<T>(k) / factorial::<T>(2 * k), order.min(BERNOULLI_EVEN.len() - 1))?;
    let q = quadratic_form(&coth, x)?.scale_re((T::lit(4.0) * r).recip());
    let c = quadratic_form(c_sym, x)?.scale_re(T::lit(0.125));
    let scalar = a.wedge(&c.sub(&q)?.exp())?.scale_re((T::lit(4.0) * T::PI() * r).powf(-T::from_count(x.len()) / T::lit(2.0)));
    let e = l.scale_re(r).power_series(|k| factorial::<T>(k).recip(), order)?;
    let entries = e.entries.iter().map(|x| x.wedge(&scalar)).collect::<Result<_>>()?;
    FormMatrix::new(dim2n, l.size, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C<f64> {
        C::new(x, 0.0)
    }

    #[test]
    fn wedge_examples() {
        let e0 = FormElement::<f64>::generator(4, 0).unwrap();
        let e1 = FormElement::generator(4, 1).unwrap();
        let e01 = e0.wedge(&e1).unwrap();
        assert_eq!(e01.terms(), vec![(vec![0, 1], c(1.0))]);
        assert!(e0.wedge(&e0).unwrap().is_zero());
        assert_eq!(e1.wedge(&e0).unwrap(), e01.scale_re(-1.0));
        let e23 = FormElement::monomial(4, &[2, 3], c(1.0)).unwrap();
        assert_eq!(e01.wedge(&e23).unwrap(), e23.wedge(&e01).unwrap());
        assert_eq!(FormElement::<f64>::monomial(4, &[3, 1], c(1.0)).unwrap().coefficient(&[1, 3]), c(-1.0));
        assert!(matches!(e0.wedge(&FormElement::generator(2, 0).unwrap()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn top_coefficient_examples() {
        assert_eq!(top_coefficient(&FormElement::constant(4, c(3.0)).unwrap()), c(0.0));
        assert_eq!(top_coefficient(&FormElement::<f64>::volume(6).unwrap()), c(1.0));
        let t1 = FormElement::monomial(4, &[0, 1], c(1.0)).unwrap();
        let t2 = FormElement::monomial(4, &[2, 3], c(1.0)).unwrap();
        assert_eq!(top_coefficient(&t1.wedge(&t2).unwrap()), c(1.0));
    }

    #[test]
    fn a_hat_trivial_cases() {
        let z = FormMatrix::<f64>::zeros(4, 4).unwrap();
        assert_eq!(a_hat(&z, 1.0).unwrap(), FormElement::constant(4, c(1.0)).unwrap());
        let w = FormElement::monomial(2, &[0, 1], c(0.7)).unwrap();
        let d = FormMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => w.clone(),
            (1, 0) => w.scale_re(-1.0),
            _ => FormElement::zero(2).unwrap(),
        })
        .unwrap();
        assert_eq!(a_hat(&d, 2.0).unwrap(), FormElement::constant(2, c(1.0)).unwrap());
        let sym = FormMatrix::from_fn(2, 2, |i, j| if i != j { w.clone() } else { FormElement::zero(2).unwrap() }).unwrap();
        assert_eq!(a_hat(&sym, 1.0).unwrap_err(), Error::NotAntisymmetric);
    }

    #[test]
    fn chern_examples() {
        assert_eq!(chern_char(&FormMatrix::<f64>::zeros(4, 3).unwrap(), 1.0).unwrap(), FormElement::constant(4, c(3.0)).unwrap());
        let w = FormElement::monomial(4, &[0, 1], c(1.0)).unwrap().add(&FormElement::monomial(4, &[2, 3], c(2.0)).unwrap()).unwrap();
        let r = 0.5;
        let ch = chern_char(&FormMatrix::scalar(w.clone()).unwrap(), r).unwrap();
        let expect = FormElement::constant(4, c(1.0)).unwrap().add(&w.scale_re(r)).unwrap().add(&w.wedge(&w).unwrap().scale_re(r * r / 2.0)).unwrap();
        assert_eq!(ch, expect);
    }

    #[test]
    fn density_in_two_dimensions() {
        let w = FormElement::monomial(2, &[0, 1], c(1.5)).unwrap();
        let l = FormMatrix::scalar(w).unwrap();
        let d = FormMatrix::zeros(2, 2).unwrap();
        let r = 0.3;
        let dens = adiabatic_density(&d, &l, 2.0, r).unwrap();
        let expect = density_prefactor(2, r) * (2.0 * r * 1.5);
        assert!((dens.raw - expect).norm() < 1e-15);
        assert_eq!(adiabatic_density(&d, &FormMatrix::zeros(2, 1).unwrap(), 2.0, r).unwrap().raw, c(0.0));
        assert_eq!(adiabatic_density(&d, &l, 0.0, r).unwrap().raw, c(0.0));
    }

    #[test]
    fn mehler_reduces_to_the_gaussian() {
        let n = 4;
        let z = FormMatrix::<f64>::zeros(n, n).unwrap();
        let l = FormMatrix::zeros(n, 1).unwrap();
        let x = [0.3, -1.2, 0.5, 2.0];
        let r = 0.7;
        let k = mehler_kernel(&z, &z, &l, &x, r).unwrap();
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let expect = (4.0 * std::f64::consts::PI * r).powf(-2.0) * (-norm2 / (4.0 * r)).exp();
        assert_eq!(k.entry(0, 0).num_terms(), 1);
        assert!((k.entry(0, 0).scalar_part().re - expect).abs() < 1e-14 * expect.max(1.0));
        assert_eq!(mehler_kernel(&z, &z, &l, &x, 0.0).unwrap_err(), Error::NonpositiveTime);
    }
}
