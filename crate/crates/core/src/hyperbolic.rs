//! Spectral zeta constants of compact hyperbolic surfaces.
//!
//! Randol's continuation writes the zeta function of the scalar Laplacian on
//! a surface of genus `g` as
//! `ζ(s) = (g-1) π/(s-1) ∫₀^∞ (¼+r²)^{1-s} sech²(πr) dr` for `s < 1`.
//! The integrals are evaluated by adaptive Gauss-Kronrod quadrature on
//! fixed-width panels over `[0, r_max]`, with an explicit bound for the tail.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Quadrature parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T: Real> {
    pub r_max: T,
    pub abs_tol: T,
    /// Maximal bisection depth of a panel.
    pub max_refinements: usize,
    /// Width of the initial panels.
    pub panel_width: T,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self { r_max: T::lit(10.0), abs_tol: T::lit(1e-10), max_refinements: 20, panel_width: T::one() }
    }
}

/// Value of an integral with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T: Real> {
    pub value: T,
    /// Quadrature estimate plus the tail bound.
    pub est_error: T,
    /// Number of accepted panels.
    pub panels: usize,
}

impl<T: Real> QuadratureResult<T> {
    fn scaled(self, s: T) -> Self {
        Self { value: self.value * s, est_error: self.est_error * s.abs(), panels: self.panels }
    }
}

fn kronrod<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let fc = f(c);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let x = h * T::lit(XGK[j]);
        let pair = f(c - x) + f(c + x);
        k += T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            g += T::lit(WG[j / 2]) * pair;
        }
    }
    (k * h, (k - g).abs() * h)
}

fn adaptive<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T, depth: usize, out: &mut QuadratureResult<T>) {
    let (v, e) = kronrod(f, a, b);
    let roundoff = T::lit(50.0) * T::epsilon() * v.abs();
    if e <= tol || e <= roundoff || depth == 0 {
        out.value += v;
        out.est_error += e;
        out.panels += 1;
        return;
    }
    let m = T::lit(0.5) * (a + b);
    adaptive(f, a, m, tol * T::lit(0.5), depth - 1, out);
    adaptive(f, m, b, tol * T::lit(0.5), depth - 1, out);
}

/// `∫₀^{r_max} f`; each panel must meet `abs_tol/100` per unit length, which
/// makes the panels below a given radius independent of `r_max`.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    if !(spec.r_max > T::zero()) || !(spec.abs_tol > T::zero()) || !(spec.panel_width > T::zero()) {
        return Err(Error::DomainError("quadrature parameters must be positive".into()));
    }
    let mut out = QuadratureResult { value: T::zero(), est_error: T::zero(), panels: 0 };
    let mut a = T::zero();
    while a < spec.r_max {
        let b = (a + spec.panel_width).min(spec.r_max);
        let tol = spec.abs_tol * T::lit(1e-2) * (b - a);
        adaptive(&f, a, b, tol, spec.max_refinements, &mut out);
        a = b;
    }
    Ok(out)
}

fn sech2<T: Real>(x: T) -> T {
    let c = x.cosh();
    (c * c).recip()
}

/// `∫_R^∞ (¼+r²)^a · 4e^{-2πr} dr`, a bound for the tail of the Randol
/// integrand with exponent `a`, times `log_factor` for a log-growing factor.
fn tail_bound<T: Real>(a: T, r: T, log_factor: T) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let p = (T::lit(0.25) + r * r).powf(a);
    let growth = if a > T::zero() { T::lit(2.0) * a / r } else { T::zero() } + log_factor / r;
    if growth >= two_pi {
        return T::infinity();
    }
    T::lit(4.0) * p * (-two_pi * r).exp() / (two_pi - growth)
}

fn finish<T: Real>(mut r: QuadratureResult<T>, tail: T, spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    r.est_error += tail;
    if !(r.est_error <= spec.abs_tol) || !r.value.is_finite() {
        return Err(Error::QuadratureNotConverged { est_error: r.est_error.as_f64() });
    }
    Ok(r)
}

fn check_genus(g: u32) -> Result<()> {
    if g == 0 {
        Err(Error::DomainError("genus must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `∫₀^∞ (¼+r²)^{1-s} sech²(πr) dr`.
fn randol_integral<T: Real>(s: T, spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    let a = T::one() - s;
    let r = integrate(|r: T| (T::lit(0.25) + r * r).powf(a) * sech2(T::PI() * r), spec)?;
    finish(r, tail_bound(a, spec.r_max, T::zero()), spec)
}

/// `∫₀^∞ (¼+r²) sech²(πr) (log(¼+r²) - 1) dr`.
fn randol_prime_integral<T: Real>(spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    let r = integrate(
        |r: T| {
            let x = T::lit(0.25) + r * r;
            x * sech2(T::PI() * r) * (x.ln() - T::one())
        },
        spec,
    )?;
    let x = T::lit(0.25) + spec.r_max * spec.r_max;
    let tail = tail_bound(T::one(), spec.r_max, T::one()) * (T::one() + x.ln().abs());
    finish(r, tail, spec)
}

/// `ζ(s)` of the scalar Laplacian on a genus `g` surface, `s < 1`.
pub fn randol_zeta<T: Real>(s: T, g: u32, spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    if !(s < T::one()) {
        return Err(Error::DomainError(format!("continuation formula needs s < 1, got {s}")));
    }
    check_genus(g)?;
    let factor = T::from_count(g as usize - 1) * T::PI() / (s - T::one());
    Ok(randol_integral(s, spec)?.scaled(factor))
}

/// `ζ'(0) = (g-1) π ∫₀^∞ (¼+r²) sech²(πr) (log(¼+r²) - 1) dr`.
pub fn randol_zeta_prime0<T: Real>(g: u32, spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    check_genus(g)?;
    Ok(randol_prime_integral(spec)?.scaled(T::from_count(g as usize - 1) * T::PI()))
}

/// `C = (π/2) ∫₀^∞ (¼+r²) sech²(πr) (log(¼+r²) - 1) dr`, half of `ζ'(0)` at
/// genus 2.
pub fn torsion_constant_c<T: Real>(spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    Ok(randol_prime_integral(spec)?.scaled(T::FRAC_PI_2()))
}

/// `exp(±C (g-1))`, the torsion scalar in holomorphic degree `p ∈ {0, 1}`.
pub fn surface_torsion_scalar<T: Real>(g: u32, p: u32, spec: &QuadratureSpec<T>) -> Result<T> {
    check_genus(g)?;
    let sign = match p {
        0 => T::one(),
        1 => -T::one(),
        _ => return Err(Error::DomainError(format!("holomorphic degree {p} on a surface"))),
    };
    let c = torsion_constant_c(spec)?.value;
    Ok((sign * c * T::from_count(g as usize - 1)).exp())
}

/// `exp(C_p · vol)`.
pub fn symmetric_space_scaling<T: Real>(c_p: T, vol: T) -> T {
    (c_p * vol).exp()
}
