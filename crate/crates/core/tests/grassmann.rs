use hyperfermi_core::grassmann::{berezin, exp_even, l1_norm, series_apply, symmetric_product, Algebra, Element, Generator, Monomial};
use hyperfermi_core::model::z_element;
use hyperfermi_core::scalar::{int, rat, Rational};
use hyperfermi_core::singlesite::{coeff_a, coeff_b, single_site_z_engine, SingleSiteParams};
use proptest::prelude::*;

// two sites, two colors: eight generators
fn algebra() -> Algebra {
    Algebra::new(2, 2, false).unwrap()
}

fn element() -> impl Strategy<Value = Element<Rational>> {
    let term = (0u8..=255, -6i64..=6, 1i64..=5).prop_filter("degree <= 4", |(mask, _, _)| mask.count_ones() <= 4);
    prop::collection::vec(term, 0..6).prop_map(|terms| {
        Element::from_terms(algebra(), terms.into_iter().map(|(mask, p, q)| (Monomial(u128::from(mask)), rat(p, q))))
    })
}

fn generator() -> impl Strategy<Value = Generator> {
    (0usize..2, 1usize..=2, any::<bool>()).prop_map(|(site, color, bar)| {
        if bar {
            Generator::psibar(site, color)
        } else {
            Generator::psi(site, color)
        }
    })
}

proptest! {
    #[test]
    fn norm_is_submultiplicative(f in element(), g in element()) {
        prop_assert!(l1_norm(&(&f * &g)) <= l1_norm(&f) * l1_norm(&g));
    }

    #[test]
    fn product_is_associative(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn product_distributes(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn generators_anticommute(x in generator(), y in generator()) {
        let alg = algebra();
        let ex = Element::<Rational>::generator(alg, x).unwrap();
        let ey = Element::<Rational>::generator(alg, y).unwrap();
        prop_assert_eq!(&ex * &ey, -&(&ey * &ex));
        prop_assert!((&ex * &ex).is_zero());
    }

    #[test]
    fn berezin_is_linear(a in element(), b in element(), p in -5i64..5) {
        let c = int(p);
        let lhs = berezin(&(&a + &b.scale(&c)), &[0, 1]).unwrap();
        let rhs = &berezin(&a, &[0, 1]).unwrap() + &berezin(&b, &[0, 1]).unwrap().scale(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn berezin_ignores_site_order(a in element()) {
        prop_assert_eq!(berezin(&a, &[0, 1]).unwrap(), berezin(&a, &[1, 0]).unwrap());
        let stepwise = berezin(&berezin(&a, &[1]).unwrap(), &[0]).unwrap();
        prop_assert_eq!(berezin(&a, &[0, 1]).unwrap(), stepwise);
    }

    #[test]
    fn exp_of_commuting_sum(p in -4i64..4, q in -4i64..4) {
        let alg = algebra();
        let x = symmetric_product::<Rational>(alg, 0, 1).unwrap().scale(&rat(p, 3));
        let y = symmetric_product::<Rational>(alg, 0, 0).unwrap().scale(&rat(q, 5));
        let lhs = exp_even(&(&x + &y)).unwrap();
        prop_assert_eq!(lhs, &exp_even(&x).unwrap() * &exp_even(&y).unwrap());
    }
}

#[test]
fn z_identities_up_to_six_colors() {
    for m in 1..=6 {
        let alg = Algebra::new(1, m, false).unwrap();
        let z = z_element::<Rational>(alg, 0).unwrap();
        let x = symmetric_product::<Rational>(alg, 0, 0).unwrap();
        assert_eq!(&z * &z, &Element::one(alg) + &x);
        for l in 0..=m as u32 {
            let q: Vec<Rational> = (0..=m as u32).map(|k| coeff_b(k, l)).collect();
            let p: Vec<Rational> = (0..=m as u32).map(|k| coeff_a(k, l)).collect();
            let ql = series_apply(&q, &x).unwrap();
            let pl = series_apply(&p, &x).unwrap();
            assert_eq!(ql, &z * &pl, "Q_{} = z P_{} at m = {}", l, l, m);
        }
    }
}

#[test]
fn single_site_sign_convention() {
    for m in 1..=6 {
        let z = single_site_z_engine(&SingleSiteParams { m, eps: int(0) }).unwrap();
        assert!(z > int(0), "m = {}", m);
    }
    assert_eq!(single_site_z_engine(&SingleSiteParams { m: 1, eps: int(0) }).unwrap(), int(1));
}

#[test]
fn pretty_printer() {
    let alg = Algebra::new(1, 1, false).unwrap();
    let pair = Element::product_of(alg, &[Generator::psi(0, 1), Generator::psibar(0, 1)], int(1)).unwrap();
    assert_eq!(format!("{}", pair), "(-1) psibar[0,1] psi[0,1]");
}

#[test]
fn exact_exponential_rejects_scalars() {
    let alg = algebra();
    let x = &Element::scalar(alg, int(1)) + &symmetric_product::<Rational>(alg, 0, 1).unwrap();
    assert!(exp_even(&x).is_err());
    let float = x.map_coefficients(hyperfermi_core::scalar::rational_to_f64);
    let e = exp_even(&float).unwrap();
    assert!((e.scalar_part() - std::f64::consts::E).abs() < 1e-12);
}
