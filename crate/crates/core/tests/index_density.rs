use std::f64::consts::PI;

use fkt_core::forms::{a_hat, a_hat_with_order, adiabatic_density, chern_char, density_prefactor, mehler_kernel, top_coefficient};
use fkt_core::instances;
use fkt_core::scalar::C;
use fkt_core::{Error, FormElement, FormMatrix};
use proptest::prelude::*;
use rand::Rng;

fn c(x: f64) -> C<f64> {
    C::new(x, 0.0)
}

fn zero(dim2n: usize) -> FormElement {
    FormElement::zero(dim2n).unwrap()
}

fn one(dim2n: usize) -> FormElement {
    FormElement::constant(dim2n, c(1.0)).unwrap()
}

fn random_two_form(r: &mut impl Rng, dim2n: usize) -> FormElement {
    let mut acc = zero(dim2n);
    for i in 0..dim2n {
        for j in i + 1..dim2n {
            let t = FormElement::monomial(dim2n, &[i, j], c(r.gen_range(-1.0..1.0))).unwrap();
            acc = acc.add(&t).unwrap();
        }
    }
    acc
}

/// Antisymmetric matrix of random two-forms.
fn random_curvature(r: &mut impl Rng, dim2n: usize, size: usize) -> FormMatrix {
    let upper: Vec<FormElement> = (0..size * size).map(|_| random_two_form(r, dim2n)).collect();
    FormMatrix::from_fn(dim2n, size, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => upper[i * size + j].clone(),
        std::cmp::Ordering::Greater => upper[j * size + i].scale_re(-1.0),
        std::cmp::Ordering::Equal => zero(dim2n),
    })
    .unwrap()
}

fn random_bundle_curvature(r: &mut impl Rng, dim2n: usize, size: usize) -> FormMatrix {
    let entries: Vec<FormElement> = (0..size * size).map(|_| random_two_form(r, dim2n)).collect();
    FormMatrix::new(dim2n, size, entries).unwrap()
}

/// `diag([[0, x_k], [-x_k, 0]])`.
fn block_curvature(xs: &[FormElement]) -> FormMatrix {
    let dim2n = xs[0].dim2n();
    FormMatrix::from_fn(dim2n, 2 * xs.len(), |i, j| {
        if i / 2 != j / 2 || i == j {
            zero(dim2n)
        } else if i < j {
            xs[i / 2].clone()
        } else {
            xs[i / 2].scale_re(-1.0)
        }
    })
    .unwrap()
}

/// `Π_k a_k / sin a_k` with `a_k = r x_k / 2`, from the Taylor series of
/// `a / sin a`.
fn a_hat_oracle(xs: &[FormElement], r: f64) -> FormElement {
    const SERIES: [f64; 5] = [1.0, 1.0 / 6.0, 7.0 / 360.0, 31.0 / 15120.0, 127.0 / 604800.0];
    let dim2n = xs[0].dim2n();
    let mut acc = one(dim2n);
    for x in xs {
        let a = x.scale_re(r / 2.0);
        let a2 = a.wedge(&a).unwrap();
        let mut power = one(dim2n);
        let mut f = zero(dim2n);
        for coeff in SERIES {
            f = f.add(&power.scale_re(coeff)).unwrap();
            power = power.wedge(&a2).unwrap();
        }
        acc = acc.wedge(&f).unwrap();
    }
    acc
}

fn close(a: &FormElement, b: &FormElement, tol: f64) -> bool {
    a.sub(b).unwrap().max_abs() <= tol * b.max_abs().max(1.0)
}

#[test]
fn a_hat_examples() {
    assert_eq!(a_hat(&FormMatrix::zeros(4, 4).unwrap(), 1.0).unwrap(), one(4));

    // one block on four generators: 1 + r²x²/24 with x = e01 + e23
    let x = FormElement::monomial(4, &[0, 1], c(1.0)).unwrap().add(&FormElement::monomial(4, &[2, 3], c(1.0)).unwrap()).unwrap();
    let d = block_curvature(std::slice::from_ref(&x));
    let r = 0.8;
    let expect = one(4).add(&x.wedge(&x).unwrap().scale_re(r * r / 24.0)).unwrap();
    assert!(close(&a_hat(&d, r).unwrap(), &expect, 1e-15));
    assert!((top_coefficient(&a_hat(&d, r).unwrap()) - c(r * r / 12.0)).norm() < 1e-15);

    let sym = FormMatrix::from_fn(4, 2, |_, _| x.clone()).unwrap();
    assert_eq!(a_hat(&sym, 1.0).unwrap_err(), Error::NotAntisymmetric);
    let unit = FormMatrix::from_fn(4, 2, |i, j| match (i, j) {
        (0, 1) => one(4),
        (1, 0) => one(4).scale_re(-1.0),
        _ => zero(4),
    })
    .unwrap();
    assert_eq!(a_hat(&unit, 1.0).unwrap_err(), Error::NotNilpotent);
}

#[test]
fn chern_examples() {
    let l = FormMatrix::zeros(6, 3).unwrap();
    assert_eq!(chern_char(&l, 2.0).unwrap(), FormElement::constant(6, c(3.0)).unwrap());
    assert_eq!(chern_char(&FormMatrix::identity(4, 1).unwrap(), 1.0).unwrap_err(), Error::NotNilpotent);
}

#[test]
fn density_examples() {
    // one generator pair, flat D, L = w e01: raw density -i w z / (2π) for every r
    let w = 0.9;
    let z = 2.0;
    let l = FormMatrix::scalar(FormElement::monomial(2, &[0, 1], c(w)).unwrap()).unwrap();
    let d = FormMatrix::zeros(2, 2).unwrap();
    for r in [0.1, 1.0, 7.0] {
        let a = adiabatic_density(&d, &l, z, r).unwrap();
        assert!((a.unnormalized - c(r * w * z)).norm() < 1e-15);
        assert!((a.raw - C::new(0.0, -w * z / (2.0 * PI))).norm() < 1e-15);
        assert_eq!(a.prefactor, density_prefactor(2, r));
    }
    assert!((density_prefactor(4, 1.0) - c(-1.0 / (4.0 * PI * PI))).norm() < 1e-15);
    assert_eq!(density_prefactor(0, 3.0), c(1.0));

    assert_eq!(adiabatic_density(&d, &l, z, 0.0).unwrap_err(), Error::NonpositiveTime);
    let l4 = FormMatrix::zeros(4, 1).unwrap();
    assert!(matches!(adiabatic_density(&d, &l4, z, 1.0), Err(Error::DimensionMismatch(_))));
}

#[test]
fn mehler_examples() {
    let dim2n = 4;
    let x = [0.3, -1.1];
    let d = FormMatrix::zeros(dim2n, 2).unwrap();
    let zero_c = FormMatrix::zeros(dim2n, 2).unwrap();
    let l = FormMatrix::zeros(dim2n, 3).unwrap();
    for r in [0.05, 0.5, 3.0] {
        let k = mehler_kernel(&d, &zero_c, &l, &x, r).unwrap();
        let gauss = (4.0 * PI * r).powi(-1) * (-(x[0] * x[0] + x[1] * x[1]) / (4.0 * r)).exp();
        assert_eq!(k.size(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let e = k.entry(i, j);
                let expect = if i == j { gauss } else { 0.0 };
                assert!((e.scalar_part() - c(expect)).norm() <= 1e-14 * gauss);
                assert_eq!(e.max_degree(), 0);
            }
        }
    }

    // constant C contributes e^{x^t C x / 8}
    let c_sym = FormMatrix::from_fn(dim2n, 2, |i, j| FormElement::constant(dim2n, c(if i == j { 1.0 } else { 0.5 })).unwrap()).unwrap();
    let k = mehler_kernel(&d, &c_sym, &FormMatrix::zeros(dim2n, 1).unwrap(), &x, 1.0).unwrap();
    let quad = x[0] * x[0] + x[1] * x[1] + x[0] * x[1];
    let expect = (4.0 * PI).recip() * (quad / 8.0 - (x[0] * x[0] + x[1] * x[1]) / 4.0).exp();
    assert!((k.entry(0, 0).scalar_part() - c(expect)).norm() < 1e-15);

    let bad_c = FormMatrix::from_fn(dim2n, 2, |i, j| FormElement::constant(dim2n, c((i + 2 * j) as f64)).unwrap()).unwrap();
    assert!(matches!(mehler_kernel(&d, &bad_c, &l, &x, 1.0), Err(Error::InvalidForm(_))));
    assert!(matches!(mehler_kernel(&d, &zero_c, &l, &[1.0], 1.0), Err(Error::InvalidForm(_))));
    assert_eq!(mehler_kernel(&d, &zero_c, &l, &x, -1.0).unwrap_err(), Error::NonpositiveTime);
    let l6 = FormMatrix::zeros(6, 1).unwrap();
    assert!(matches!(mehler_kernel(&d, &zero_c, &l6, &x, 1.0), Err(Error::DimensionMismatch(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn a_hat_matches_block_series(seed in any::<u64>(), blocks in 1usize..4, r in 0.1f64..2.0) {
        let mut rng = instances::rng(seed);
        let xs: Vec<FormElement> = (0..blocks).map(|_| random_two_form(&mut rng, 4)).collect();
        let got = a_hat(&block_curvature(&xs), r).unwrap();
        let expect = a_hat_oracle(&xs, r);
        prop_assert!(close(&got, &expect, 1e-12));
        prop_assert!((got.coefficient(&[]) - c(1.0)).norm() == 0.0);
        let top = top_coefficient(&got);
        prop_assert!((top - top_coefficient(&expect)).norm() < 1e-12 * top.norm().max(1.0));
    }

    #[test]
    fn a_hat_is_multiplicative(seed in any::<u64>(), n1 in 1usize..4, n2 in 1usize..4, r in 0.1f64..2.0) {
        let mut rng = instances::rng(seed);
        let d1 = random_curvature(&mut rng, 6, n1);
        let d2 = random_curvature(&mut rng, 6, n2);
        let sum = a_hat(&d1.direct_sum(&d2).unwrap(), r).unwrap();
        let prod = a_hat(&d1, r).unwrap().wedge(&a_hat(&d2, r).unwrap()).unwrap();
        prop_assert!(close(&sum, &prod, 1e-12));
    }

    #[test]
    fn a_hat_has_degrees_divisible_by_four(seed in any::<u64>(), size in 1usize..5) {
        let mut rng = instances::rng(seed);
        let a = a_hat(&random_curvature(&mut rng, 8, size), 1.3).unwrap();
        for (subset, _) in a.terms() {
            prop_assert_eq!(subset.len() % 4, 0);
        }
        prop_assert!(a.is_even());
    }

    #[test]
    fn truncation_is_exact(seed in any::<u64>(), size in 1usize..5, extra in 1usize..6) {
        let mut rng = instances::rng(seed);
        let d = random_curvature(&mut rng, 6, size);
        let base = a_hat(&d, 0.7).unwrap();
        prop_assert_eq!(a_hat_with_order(&d, 0.7, 3 + extra).unwrap(), base.clone());
        prop_assert!(close(&a_hat_with_order(&d, 0.7, 1).unwrap().homogeneous(4), &base.homogeneous(4), 1e-15));
    }

    #[test]
    fn chern_is_additive(seed in any::<u64>(), n1 in 1usize..4, n2 in 1usize..4, r in 0.1f64..2.0) {
        let mut rng = instances::rng(seed);
        let l1 = random_bundle_curvature(&mut rng, 4, n1);
        let l2 = random_bundle_curvature(&mut rng, 4, n2);
        let sum = chern_char(&l1.direct_sum(&l2).unwrap(), r).unwrap();
        let parts = chern_char(&l1, r).unwrap().add(&chern_char(&l2, r).unwrap()).unwrap();
        prop_assert!(close(&sum, &parts, 1e-13));
        prop_assert_eq!(sum.scalar_part(), c((n1 + n2) as f64));
    }

    #[test]
    fn raw_density_is_scale_free(seed in any::<u64>(), size in 1usize..4, r1 in 0.1f64..3.0, r2 in 0.1f64..3.0) {
        let mut rng = instances::rng(seed);
        let d = random_curvature(&mut rng, 4, size);
        let l = random_bundle_curvature(&mut rng, 4, 2);
        let a1 = adiabatic_density(&d, &l, 1.5, r1).unwrap();
        let a2 = adiabatic_density(&d, &l, 1.5, r2).unwrap();
        prop_assert!((a1.raw - a2.raw).norm() < 1e-12 * a1.raw.norm().max(1.0));
        prop_assert!((a1.raw - a1.unnormalized * a1.prefactor).norm() < 1e-15 * a1.raw.norm().max(1.0));
    }

    #[test]
    fn mehler_on_diagonal_is_the_density_integrand(seed in any::<u64>(), size in 1usize..4, r in 0.1f64..2.0) {
        let mut rng = instances::rng(seed);
        let d = random_curvature(&mut rng, 4, size);
        let c_sym = FormMatrix::zeros(4, size).unwrap();
        let l = random_bundle_curvature(&mut rng, 4, 2);
        let x = vec![0.0; size];
        let k = mehler_kernel(&d, &c_sym, &l, &x, r).unwrap();
        let expect = a_hat(&d, r).unwrap().wedge(&chern_char(&l, r).unwrap()).unwrap().scale_re((4.0 * PI * r).powf(-(size as f64) / 2.0));
        prop_assert!(close(&k.trace(), &expect, 1e-13));
    }
}
