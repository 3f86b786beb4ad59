mod common;

use std::sync::Arc;

use syntomic::scalar::{Base, Ring};
use syntomic::steenrod::json::{ElementJson, TensorJson};
use syntomic::steenrod::*;

fn alg(p: u32, base: Base) -> SteenrodAlgebra {
    SteenrodAlgebra::with_params(p, base).unwrap()
}

fn w(s: &str, p: u32) -> Word {
    parse_word(s, p).unwrap()
}

fn el(a: &SteenrodAlgebra, s: &str) -> Element {
    a.reduce_word(&w(s, a.p()))
}

#[test]
fn bidegrees() {
    assert_eq!(bidegree_of(&[], 2), Bidegree::new(0, 0));
    assert_eq!(bidegree_of(&[Gen::P(1)], 2), Bidegree::new(2, 1));
    assert_eq!(bidegree_of(&[Gen::Beta, Gen::P(2), Gen::P(1)], 2), Bidegree::new(7, 3));
    assert_eq!(bidegree_of(&[Gen::Beta, Gen::P(1)], 3), Bidegree::new(5, 2));
}

#[test]
fn admissibility() {
    assert!(is_admissible(&w("Sq2 Sq1", 2), 2));
    assert!(!is_admissible(&w("Sq2 Sq2", 2), 2));
    assert!(!is_admissible(&[Gen::Beta, Gen::Beta], 2));
    // i_2 ≥ p·i_1 + ε_1
    assert!(is_admissible(&[Gen::P(4), Gen::Beta, Gen::P(1)], 3));
    assert!(!is_admissible(&[Gen::P(3), Gen::Beta, Gen::P(1)], 3));
    assert!(is_admissible(&[Gen::P(3), Gen::P(1)], 3));
}

#[test]
fn adem_examples() {
    assert!(el(&alg(2, Base::K), "Sq2 Sq2").is_zero());
    assert_eq!(el(&alg(2, Base::O), "Sq2 Sq2").to_text(), "tau Sq3 Sq1");
    for base in [Base::K, Base::O] {
        let a = alg(2, base);
        assert!(el(&a, "Sq1 Sq1").is_zero());
        assert_eq!(el(&a, "Sq3 Sq1").to_text(), "Sq3 Sq1");
    }
    // P¹P¹ = −P² = 2P² at p = 3
    let a = alg(3, Base::K);
    let e = a.reduce_word(&[Gen::P(1), Gen::P(1)]);
    assert_eq!(e.terms().len(), 1);
    assert_eq!(e.coeff(&Adm::from_word(&[Gen::P(2)], 3).unwrap()), a.ring().int(2));
}

#[test]
fn weight_balanced_relations_match_the_classical_ones() {
    // no τ is needed when both sides already have equal weight
    let o = alg(2, Base::O);
    assert_eq!(el(&o, "Sq2 Sq3").to_text(), "Sq4 Sq1 + Sq5");
    assert_eq!(el(&o, "Sq3 Sq2").to_text(), "0");
    assert_eq!(el(&o, "Sq1 Sq2").to_text(), "Sq3");
}

#[test]
fn multiply_examples_and_errors() {
    let a = alg(2, Base::K);
    let r = a.ring();
    let x = el(&a, "Sq3 Sq1");
    assert_eq!(a.multiply(&Element::one(r), &x).unwrap(), x);
    assert!(a.multiply(&el(&a, "Sq1"), &el(&a, "Sq1")).unwrap().is_zero());
    let o = alg(2, Base::O);
    assert!(matches!(a.multiply(&x, &el(&o, "Sq1")), Err(SteenrodError::Mismatch(_))));
    assert!(SteenrodAlgebra::with_params(4, Base::K).is_err());
}

#[test]
fn basis_examples() {
    let a = alg(2, Base::K);
    let names: Vec<String> = a.basis_up_to(3).iter().map(|m| format_word(&m.to_word(), 2)).collect();
    assert_eq!(names, ["1", "Sq1", "Sq2", "Sq2 Sq1", "Sq3"]);
    assert_eq!(a.admissible_basis(Bidegree::new(0, 0)), vec![Adm::unit()]);
    assert_eq!(a.admissible_basis(Bidegree::new(1, 0)).len(), 1);
}

#[test]
fn basis_counts_match_brute_force() {
    for p in [2, 3, 5] {
        let a = alg(p, Base::K);
        assert_eq!(common::engine_counts(&a, 24), common::brute_counts(p, 24), "p={p}");
    }
}

#[test]
fn associative_and_idempotent() {
    for (p, base, d) in [(2, Base::K, 12), (2, Base::O, 12), (3, Base::K, 14)] {
        let (n, bad) = common::associativity_failures(&alg(p, base), d);
        assert!(n > 20);
        assert!(bad.is_empty(), "p={p} {base}: {bad:?}");
    }
}

#[test]
fn coproduct_examples() {
    let k = alg(2, Base::K);
    let r = k.ring();
    let one = Adm::unit();
    let sq = |s: &str| Adm::from_word(&w(s, 2), 2).unwrap();
    assert_eq!(k.coproduct(&Element::one(r)).unwrap(), common::pure(r, one.clone(), one.clone()));
    let mut want = common::pure(r, sq("Sq2"), one.clone());
    want.add_term(one.clone(), sq("Sq2"), r.one());
    assert_eq!(k.coproduct(&el(&k, "Sq2")).unwrap(), want);

    let o = alg(2, Base::O);
    let r = o.ring();
    let t = o.coproduct(&el(&o, "Sq4")).unwrap();
    let mut want = common::pure(r, sq("Sq4"), one.clone());
    want.add_term(sq("Sq2"), sq("Sq2"), r.one());
    want.add_term(one.clone(), sq("Sq4"), r.one());
    want.add_term(sq("Sq3"), sq("Sq1"), r.tau_pow(1));
    want.add_term(sq("Sq1"), sq("Sq3"), r.tau_pow(1));
    assert_eq!(t, want);
}

#[test]
fn antipode_examples() {
    let k = alg(2, Base::K);
    let r = k.ring();
    assert_eq!(k.antipode(&Element::one(r)).unwrap(), Element::one(r));
    for s in ["Sq1", "Sq2"] {
        assert_eq!(k.antipode(&el(&k, s)).unwrap(), el(&k, s));
    }
    // β is primitive, so 𝔰(β) = −β at odd p
    let a = alg(3, Base::K);
    let b = a.reduce_word(&[Gen::Beta]);
    assert_eq!(a.antipode(&b).unwrap(), b.scale(&a.ring().int(-1)));
}

#[test]
fn hopf_axioms() {
    for (p, base, d) in [(2, Base::K, 10), (2, Base::O, 10), (3, Base::K, 16)] {
        let a = Arc::new(alg(p, base));
        let bad = common::hopf_failures(&a, d);
        assert!(bad.is_empty(), "p={p} {base}: {bad:?}");
    }
}

#[test]
fn combination_parser() {
    let r = Ring::new(2, Base::O).unwrap();
    let t = parse_combination("Sq2 Sq2 + 3 tau^2 Sq1", r).unwrap();
    assert_eq!(t.len(), 2);
    assert_eq!(t[1].1, r.tau_pow(2));
    assert!(parse_combination("Sq2 + ", r).is_err());
    assert!(parse_combination("tau^x Sq1", r).is_err());
}

#[test]
fn json_round_trip() {
    let o = alg(2, Base::O);
    let x = el(&o, "Sq2 Sq2").add(&el(&o, "Sq5 Sq2")).unwrap();
    let s = serde_json::to_string(&ElementJson::from_element(&x)).unwrap();
    let back: ElementJson = serde_json::from_str(&s).unwrap();
    assert_eq!(back.to_element(&o).unwrap(), x);
    assert!(back.to_element(&alg(2, Base::K)).is_err());

    let t = o.coproduct(&x).unwrap();
    let s = serde_json::to_string(&TensorJson::from_tensor(&t)).unwrap();
    let back: TensorJson = serde_json::from_str(&s).unwrap();
    assert_eq!(back.to_tensor().unwrap(), t);

    // inadmissible JSON words are reduced on the way in
    let raw = r#"{"p":2,"base":"k","terms":[{"coeff":[1],"word":[{"P":1},{"P":1}]}]}"#;
    let j: ElementJson = serde_json::from_str(raw).unwrap();
    assert!(j.to_element(&alg(2, Base::K)).unwrap().is_zero());
}

#[test]
fn literal_second_binomial_is_not_associative() {
    let lit = SteenrodAlgebra::with_literal_second_sum(Ring::new(3, Base::K).unwrap());
    let (_, bad) = common::associativity_failures(&lit, 14);
    assert!(!bad.is_empty());
}
