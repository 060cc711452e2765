use padic_fourier::analytic::padic_exp;
use padic_fourier::charvar::{
    char_eval, char_inv, char_mul, char_pullback, char_pullback_with_conditions, diff_at, diff_at_zero,
    difference_quotient, membership, torsion_characters, Character, DifferentialCondition, Verdict,
};
use padic_fourier::linalg;
use padic_fourier::{Error, FieldElement, LocalField, PValuation};
use proptest::prelude::*;

fn q5z() -> (LocalField, FieldElement) {
    let k = LocalField::cyclotomic(5, 1, 48).unwrap();
    let zeta = k.primitive_root_of_unity(1).unwrap();
    (k, zeta)
}

fn near_one(k: &LocalField, u: i64) -> FieldElement {
    &k.one() + &(&k.uniformizer() * &k.from_int(u))
}

/// exp(5 B c) ζ^e: a member of W = span(B) by construction.
fn member(w: &DifferentialCondition, zeta: &FieldElement, c: &[i64], e: &[u64]) -> Character {
    let k = &w.field;
    let five = k.from_int(5);
    let z = w
        .basis
        .iter()
        .zip(e)
        .map(|(row, ei)| {
            let y = row.iter().zip(c).fold(k.zero(), |acc, (b, ci)| &acc + &(b * &k.from_int(*ci)));
            &padic_exp(&(&five * &y)).unwrap() * &zeta.pow(*ei)
        })
        .collect();
    Character::new(k, z).unwrap()
}

fn line(k: &LocalField, a: i64, b: i64) -> DifferentialCondition {
    DifferentialCondition::new(k, 2, vec![vec![k.from_int(a)], vec![k.from_int(b)]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn characters_form_a_group(u in prop::collection::vec(-999i64..999, 6), g in prop::collection::vec(-9999i64..9999, 2)) {
        let k = LocalField::qp(5, 16).unwrap();
        let mk = |s: &[i64]| Character::new(&k, s.iter().map(|x| near_one(&k, *x)).collect()).unwrap();
        let (a, b, c) = (mk(&u[0..2]), mk(&u[2..4]), mk(&u[4..6]));
        let eq = |x: &Character, y: &Character| x.z.iter().zip(&y.z).all(|(s, t)| s.eq_at_prec(t));
        prop_assert!(eq(&char_mul(&a, &b).unwrap(), &char_mul(&b, &a).unwrap()));
        prop_assert!(eq(&char_mul(&char_mul(&a, &b).unwrap(), &c).unwrap(), &char_mul(&a, &char_mul(&b, &c).unwrap()).unwrap()));
        prop_assert!(eq(&char_mul(&a, &char_inv(&a).unwrap()).unwrap(), &Character::trivial(&k, 2)));
        // (ab)(g) = a(g) b(g)
        let pt: Vec<FieldElement> = g.iter().map(|x| k.from_int(*x)).collect();
        let lhs = char_eval(&char_mul(&a, &b).unwrap(), &pt).unwrap();
        prop_assert!(lhs.eq_at_prec(&(&char_eval(&a, &pt).unwrap() * &char_eval(&b, &pt).unwrap())));
    }

    /// Membership in W is a subgroup condition.
    #[test]
    fn members_closed_under_product_and_inverse(
        dir in (1i64..20, 1i64..20),
        c in prop::collection::vec(-50i64..50, 2),
        e in prop::collection::vec(0u64..5, 4),
    ) {
        let (k, zeta) = q5z();
        let w = line(&k, dir.0, dir.1);
        let a = member(&w, &zeta, &c[0..1], &e[0..2]);
        let b = member(&w, &zeta, &c[1..2], &e[2..4]);
        prop_assert_eq!(membership(&a, &w).unwrap().verdict, Verdict::Member);
        prop_assert_eq!(membership(&char_mul(&a, &b).unwrap(), &w).unwrap().verdict, Verdict::Member);
        prop_assert_eq!(membership(&char_inv(&a).unwrap(), &w).unwrap().verdict, Verdict::Member);
    }

    /// Pulling back along φ with φ^*(W_1) ⊆ W_2 preserves membership.
    #[test]
    fn pullback_preserves_membership(
        phi in prop::collection::vec(-6i64..6, 4),
        c in -50i64..50,
        e in prop::collection::vec(0u64..5, 2),
    ) {
        let (k, zeta) = q5z();
        let w1 = line(&k, 1, 3);
        let phi_m: Vec<Vec<FieldElement>> = vec![
            vec![k.from_int(phi[0]), k.from_int(phi[1])],
            vec![k.from_int(phi[2]), k.from_int(phi[3])],
        ];
        // W_2 = φ^T W_1 when that is a line, else all of Hom(T_2, K).
        let image = linalg::mat_mul(&linalg::transpose(&phi_m), &w1.basis, &k);
        let w2 = match DifferentialCondition::new(&k, 2, image) {
            Ok(w) => w,
            Err(_) => DifferentialCondition::full(&k, 2),
        };
        let chi = member(&w1, &zeta, &[c], &e);
        let pulled = char_pullback_with_conditions(&phi_m, &chi, &w1, &w2).unwrap();
        prop_assert_eq!(membership(&pulled, &w2).unwrap().verdict, Verdict::Member);
    }

    /// dχ|_g = χ(g) dχ|_0, and the quotient at scale p^m matches to
    /// valuation ≥ m + 2 (p odd, v(z − 1) ≥ 1): the gap is p^m (log z)^2 / 2 + ….
    #[test]
    fn cocycle_identity(p in prop::sample::select(vec![3u32, 5, 7]), u in prop::collection::vec(-99999i64..99999, 2), g in prop::collection::vec(0i64..1_000_000, 2), m in 2u32..7) {
        let k = LocalField::qp(p, 24).unwrap();
        let chi = Character::new(&k, u.iter().map(|x| near_one(&k, *x)).collect()).unwrap();
        let pt: Vec<FieldElement> = g.iter().map(|x| k.from_int(*x)).collect();
        let at_g = diff_at(&chi, &pt).unwrap();
        let value = char_eval(&chi, &pt).unwrap();
        let at_zero = diff_at_zero(&chi).unwrap();
        for i in 0..2 {
            prop_assert!(at_g[i].eq_at_prec(&(&value * &at_zero[i])));
            let q = difference_quotient(&chi, &pt, i, m).unwrap();
            let gap = (&q - &at_g[i]).valuation();
            prop_assert!(gap >= PValuation::integer(m as i64 + 2), "p = {p}, m = {m}: {gap}");
        }
    }
}

#[test]
fn p_equals_two_quotient() {
    // For p = 2 with v(z − 1) ≥ 2 the gap p^m (log z)^2 / 2 has valuation ≥ m + 3.
    let k = LocalField::qp(2, 32).unwrap();
    let chi = Character::new(&k, vec![k.from_int(5), k.from_int(13)]).unwrap();
    let pt = vec![k.from_int(11), k.from_int(6)];
    let at_g = diff_at(&chi, &pt).unwrap();
    for m in 2..8 {
        for (i, d) in at_g.iter().enumerate() {
            let gap = (&difference_quotient(&chi, &pt, i, m).unwrap() - d).valuation();
            assert!(gap >= PValuation::integer(m as i64 + 3), "m = {m}: {gap}");
        }
    }
}

#[test]
fn torsion_counts_and_membership() {
    let k = LocalField::cyclotomic(2, 2, 24).unwrap();
    let w = line(&k, 1, 2);
    for n in 0..=2 {
        let chars = torsion_characters(n, 2, &k).unwrap();
        assert_eq!(chars.len(), 4usize.pow(n));
        for chi in &chars {
            assert_eq!(membership(chi, &w).unwrap().verdict, Verdict::Member);
        }
    }
}

#[test]
fn torsion_needs_roots_of_unity() {
    let k = LocalField::qp(5, 10).unwrap();
    assert!(matches!(torsion_characters(1, 1, &k), Err(Error::MissingRootsOfUnity(_))));
}

#[test]
fn non_member_of_zero_condition() {
    let k = LocalField::qp(5, 20).unwrap();
    let chi = Character::new(&k, vec![k.from_int(6)]).unwrap();
    assert_eq!(membership(&chi, &DifferentialCondition::zero(&k, 1)).unwrap().verdict, Verdict::NonMember);
    assert_eq!(membership(&chi, &DifferentialCondition::full(&k, 1)).unwrap().verdict, Verdict::Member);
}

#[test]
fn pullback_rejects_unmapped_condition() {
    let k = LocalField::qp(5, 20).unwrap();
    let w1 = DifferentialCondition::full(&k, 1);
    let w2 = DifferentialCondition::zero(&k, 1);
    let chi = Character::new(&k, vec![k.from_int(6)]).unwrap();
    let phi = vec![vec![k.one()]];
    assert_eq!(char_pullback_with_conditions(&phi, &chi, &w1, &w2).unwrap_err(), Error::ConditionNotMapped);
    // Without conditions the pullback along the identity is χ itself.
    assert!(char_pullback(&phi, &chi).unwrap().z[0].eq_at_prec(&chi.z[0]));
}
