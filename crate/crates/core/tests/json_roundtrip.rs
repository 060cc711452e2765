use padic_fourier::json::{
    amice_from_json, amice_to_json, element_from_json, element_to_json, field_from_json, field_to_json,
    series_from_json, series_to_json,
};
use padic_fourier::lubin_tate::TruncatedSeries;
use padic_fourier::amice::AmiceDistribution;
use padic_fourier::LocalField;
use proptest::prelude::*;
use serde_json::json;

fn fields() -> Vec<LocalField> {
    vec![
        LocalField::qp(7, 10).unwrap(),
        LocalField::unramified(5, &[2, 0, 1], 12).unwrap(),
        LocalField::eisenstein(3, &[-3, 0, 1], 12).unwrap(),
        LocalField::cyclotomic(5, 1, 16).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elements_round_trip(fi in 0usize..4, c in prop::collection::vec(-1_000_000i64..1_000_000, 4), shift in 0u32..3) {
        let k = &fields()[fi];
        let x = k.from_coords_i64(&c[..k.degree()]).unwrap().div(&k.uniformizer().pow(shift as u64)).unwrap();
        let back = element_from_json(k, &element_to_json(&x)).unwrap();
        prop_assert!(back.eq_at_prec(&x));
        prop_assert_eq!(back.prec(), x.prec());
    }

    #[test]
    fn fields_round_trip(fi in 0usize..4) {
        let k = &fields()[fi];
        let back = field_from_json(&field_to_json(k), None, 1).unwrap();
        prop_assert_eq!(back.id(), k.id());
        prop_assert_eq!(back.prec(), k.prec());
    }

    #[test]
    fn series_round_trip(c in prop::collection::vec(-500i64..500, 1..10)) {
        let k = LocalField::qp(5, 10).unwrap();
        let coeffs: Vec<_> = c.iter().map(|x| k.from_int(*x)).collect();
        let s = TruncatedSeries::from_coeffs(&k, 12, &coeffs);
        let back = series_from_json(&k, &series_to_json(&s)).unwrap();
        prop_assert!(back.eq_at_prec(&s));
    }

    #[test]
    fn distributions_round_trip(c in prop::collection::vec(-500i64..500, 9)) {
        let k = LocalField::qp(3, 10).unwrap();
        let mu = AmiceDistribution::from_coeffs(&k, 2, 3, c.iter().map(|x| k.from_int(*x)).collect()).unwrap();
        let back = amice_from_json(&k, &amice_to_json(&mu)).unwrap();
        prop_assert!(back.coeffs.iter().zip(&mu.coeffs).all(|(a, b)| a.eq_at_prec(b)));
    }
}

#[test]
fn rejects_unknown_field_keys() {
    assert!(field_from_json(&json!({"p": 5, "flavour": "x"}), None, 10).is_err());
    assert!(field_from_json(&json!({"p": 5, "kind": "base", "polys": {"unramified": [2, 0, 1]}}), None, 10).is_err());
}

#[test]
fn element_shorthands() {
    let k = LocalField::qp(5, 10).unwrap();
    assert!(element_from_json(&k, &json!(7)).unwrap().eq_at_prec(&k.from_int(7)));
    assert!(element_from_json(&k, &json!("3/10")).unwrap().eq_at_prec(&k.from_ratio(3, 10).unwrap()));
}
