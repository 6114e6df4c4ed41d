use hyperfermi_core::grassmann::{l1_norm, symmetric_product, Algebra};
use hyperfermi_core::scalar::{binomial_general, int, rat, Rational};
use hyperfermi_core::singlesite::*;
use proptest::prelude::*;

fn half_binomial(j: u32) -> Rational {
    binomial_general(&rat(1, 2), j)
}

#[test]
fn p_times_root_is_q() {
    for l in 0..=12 {
        for k in 0..=12 {
            let conv = (0..=k).fold(int(0), |acc, i| acc + coeff_a(i, l) * half_binomial(k - i));
            assert_eq!(conv, coeff_b(k, l), "k = {}, l = {}", k, l);
        }
    }
}

#[test]
fn q_recurrence() {
    for l in 0..=11 {
        for k in 0..=12 {
            let conv = (0..=k).fold(int(0), |acc, i| acc + coeff_b(i, l) * half_binomial(k - i));
            assert_eq!(coeff_b(k, l + 1), coeff_b(k, l) - conv, "k = {}, l = {}", k, l);
        }
    }
}

#[test]
fn norm_closed_form_matches_engine() {
    for m in 0..=6usize {
        let alg = Algebra::new(1, m.max(1), false).unwrap();
        if m == 0 {
            assert_eq!(norm_psi_pow(0, 0), int(1));
            continue;
        }
        let x = symmetric_product::<Rational>(alg, 0, 0).unwrap();
        for k in 0..=m as u32 + 1 {
            assert_eq!(l1_norm(&x.pow(k)), norm_psi_pow(k, m as u32), "k = {}, m = {}", k, m);
        }
    }
}

#[test]
fn float_mode_tracks_exact_mode() {
    let exact = single_site_z(&SingleSiteParams { m: 4, eps: rat(3, 2) });
    let float = single_site_z(&SingleSiteParams { m: 4, eps: 1.5f64 });
    assert!((hyperfermi_core::scalar::rational_to_f64(&exact) - float).abs() < 1e-12);
}

proptest! {
    #[test]
    fn closed_form_equals_engine(m in 0usize..=5, p in 0i64..=12, q in 1i64..=4) {
        let params = SingleSiteParams { m, eps: rat(p, q) };
        prop_assert_eq!(single_site_z(&params), single_site_z_engine(&params).unwrap());
    }

    #[test]
    fn partition_function_positive_and_increasing(m in 1usize..=8, p in 0i64..=20, q in 1i64..=5, dp in 1i64..=5) {
        let lo = single_site_z(&SingleSiteParams { m, eps: rat(p, q) });
        let hi = single_site_z(&SingleSiteParams { m, eps: rat(p + dp, q) });
        prop_assert!(lo > int(0));
        prop_assert!(hi > lo);
    }

    #[test]
    fn ratio_at_top_order_is_one(m in 0u32..=30) {
        prop_assert_eq!(ratio_r(m, m), int(1));
    }
}
