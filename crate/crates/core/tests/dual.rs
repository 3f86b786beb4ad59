use std::collections::BTreeMap;
use std::sync::Arc;

use syntomic::dual::*;
use syntomic::scalar::Base;
use syntomic::steenrod::{parse_word, Adm, Element, Gen, SteenrodAlgebra};

fn dual(p: u32, base: Base, max: i64) -> SteenrodDual {
    SteenrodDual::new(Arc::new(SteenrodAlgebra::with_params(p, base).unwrap()), max)
}

fn adm(s: &str, p: u32) -> Adm {
    Adm::from_word(&parse_word(s, p).unwrap(), p).unwrap()
}

fn xi(d: &SteenrodDual, a: &Adm) -> DualElement {
    DualElement::xi(d.ring(), a.clone())
}

#[test]
fn pairing_is_perfect() {
    for (p, base) in [(2, Base::K), (2, Base::O), (3, Base::K)] {
        let d = dual(p, base, 14);
        let r = d.ring();
        let basis = d.algebra().basis_up_to(14);
        assert_eq!(d.pair(&Element::one(r), &DualElement::unit(r)).unwrap(), r.one());
        for a in &basis {
            for b in &basis {
                let v = d.pair(&Element::basis(r, a.clone()), &xi(&d, b)).unwrap();
                assert_eq!(v, if a == b { r.one() } else { r.zero() });
            }
        }
    }
    let d = dual(3, Base::K, 8);
    let x = d.algebra().reduce_word(&[Gen::P(1), Gen::P(1)]);
    assert_eq!(d.pair(&x, &xi(&d, &adm("P2", 3))).unwrap(), d.ring().int(2));
}

#[test]
fn multiply_examples() {
    for (base, zero) in [(Base::K, true), (Base::O, false)] {
        let d = dual(2, base, 10);
        let r = d.ring();
        let b = xi(&d, &adm("Sq1", 2));
        let bb = d.multiply(&b, &b).unwrap();
        assert_eq!(bb.is_zero(), zero);
        let sq2 = d.algebra().reduce_word(&[Gen::P(1)]);
        let want = if zero { r.zero() } else { r.tau_pow(1) };
        assert_eq!(d.pair(&sq2, &bb).unwrap(), want);
        let x = xi(&d, &adm("Sq3 Sq1", 2));
        assert_eq!(d.multiply(&DualElement::unit(r), &x).unwrap(), x);
    }
}

fn product_of_tensors(d: &SteenrodDual, s: &DualTensor, t: &DualTensor) -> DualTensor {
    let r = d.ring();
    let mut out = DualTensor::new();
    for ((a, b), c1) in s {
        for ((x, y), c2) in t {
            let left = d.multiply(&xi(d, a), &xi(d, x)).unwrap();
            let right = d.multiply(&xi(d, b), &xi(d, y)).unwrap();
            for (u, cu) in left.terms() {
                for (v, cv) in right.terms() {
                    let e = out.entry((u.clone(), v.clone())).or_insert_with(|| r.zero());
                    *e = r.add(e, &r.mul(&r.mul(c1, c2), &r.mul(cu, cv)));
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

#[test]
fn commutative_associative_and_bialgebra() {
    for base in [Base::K, Base::O] {
        let d = dual(2, base, 10);
        let basis = d.algebra().basis_up_to(10);
        let deg = |a: &Adm| a.bidegree(2).deg;
        for a in &basis {
            for b in &basis {
                if deg(a) + deg(b) > 10 {
                    continue;
                }
                let ab = d.multiply(&xi(&d, a), &xi(&d, b)).unwrap();
                assert_eq!(ab, d.multiply(&xi(&d, b), &xi(&d, a)).unwrap());
                // Δ is multiplicative
                let lhs = d.coproduct(&ab).unwrap();
                let rhs = product_of_tensors(&d, &d.coproduct_basis(a).unwrap(), &d.coproduct_basis(b).unwrap());
                assert_eq!(lhs, rhs, "{a:?} {b:?}");
                for c in &basis {
                    if deg(a) + deg(b) + deg(c) > 10 {
                        continue;
                    }
                    let l = d.multiply(&ab, &xi(&d, c)).unwrap();
                    let bc = d.multiply(&xi(&d, b), &xi(&d, c)).unwrap();
                    assert_eq!(l, d.multiply(&xi(&d, a), &bc).unwrap());
                }
            }
        }
    }
}

#[test]
fn coproduct_examples() {
    let d = dual(2, Base::O, 8);
    let r = d.ring();
    let one = Adm::unit();
    let t = d.coproduct(&DualElement::unit(r)).unwrap();
    assert_eq!(t, BTreeMap::from([((one.clone(), one.clone()), r.one())]));
    let b = adm("Sq1", 2);
    let t = d.coproduct(&xi(&d, &b)).unwrap();
    assert_eq!(t, BTreeMap::from([((b.clone(), one.clone()), r.one()), ((one.clone(), b), r.one())]));
    // Sq2·Sq2 = τ Sq3 Sq1, so ξ_{Sq3Sq1} sees Sq2 ⊗ Sq2 with coefficient τ
    let t = d.coproduct(&xi(&d, &adm("Sq3 Sq1", 2))).unwrap();
    assert_eq!(t.get(&(adm("Sq2", 2), adm("Sq2", 2))), Some(&r.tau_pow(1)));
    let k = dual(2, Base::K, 8);
    let t = k.coproduct(&xi(&k, &adm("Sq3 Sq1", 2))).unwrap();
    assert!(!t.contains_key(&(adm("Sq2", 2), adm("Sq2", 2))));
}

#[test]
fn antipodes() {
    for (p, base, max) in [(2, Base::K, 12), (2, Base::O, 12), (3, Base::K, 16)] {
        let d = dual(p, base, max);
        let r = d.ring();
        let a = d.algebra();
        let basis = a.basis_up_to(max);
        for g in &basis {
            let x = Element::basis(r, g.clone());
            let s = d.sigma(&x).unwrap();
            assert_eq!(d.sigma(&s).unwrap(), x);
            // m∘(χ⊗id)∘Δ = unit∘counit on the dual side
            let mut acc = DualElement::zero(r);
            for ((u, v), c) in d.coproduct_basis(g).unwrap() {
                acc = acc.add(&d.multiply(&d.chi_basis(&u).unwrap(), &xi(&d, &v)).unwrap().scale(&c));
            }
            let want = if *g == Adm::unit() { DualElement::unit(r) } else { DualElement::zero(r) };
            assert_eq!(acc, want);
            assert_eq!(d.chi(&d.chi_basis(g).unwrap()).unwrap(), xi(&d, g));
        }
        if p == 2 {
            let deg = |a: &Adm| a.bidegree(2).deg;
            for g in &basis {
                for h in &basis {
                    if deg(g) + deg(h) > max {
                        continue;
                    }
                    let gh = a.mul_adm(g, h);
                    let sg = d.sigma(&Element::basis(r, g.clone())).unwrap();
                    let sh = d.sigma(&Element::basis(r, h.clone())).unwrap();
                    assert_eq!(d.sigma(&gh).unwrap(), a.multiply(&sh, &sg).unwrap());
                }
            }
        }
    }
}

#[test]
fn sigma_examples() {
    let d = dual(2, Base::K, 6);
    let a = d.algebra();
    let r = d.ring();
    assert_eq!(d.sigma(&Element::one(r)).unwrap(), Element::one(r));
    for s in ["Sq1", "Sq2"] {
        let x = a.reduce_word(&parse_word(s, 2).unwrap());
        assert_eq!(d.sigma(&x).unwrap(), x);
    }
    // χ(Sq3) = Sq2 Sq1 classically
    let x = a.reduce_word(&parse_word("Sq3", 2).unwrap());
    assert_eq!(d.sigma(&x).unwrap().to_text(), "Sq2 Sq1");
}

#[test]
fn truncation_and_mismatch() {
    let d = dual(2, Base::K, 6);
    let big = xi(&d, &adm("Sq4", 2));
    assert!(matches!(d.multiply(&big, &big), Err(DualError::Truncation { deg: 8, max: 6 })));
    let o = dual(2, Base::O, 6);
    assert!(d.chi(&DualElement::unit(o.ring())).is_err());
}

#[test]
fn json_round_trip() {
    let d = dual(2, Base::O, 10);
    let r = d.ring();
    let x = d.multiply(&xi(&d, &adm("Sq1", 2)), &xi(&d, &adm("Sq2", 2))).unwrap();
    let x = x.add(&xi(&d, &adm("Sq4 Sq2", 2)).scale(&r.tau_pow(2)));
    let s = serde_json::to_string(&DualJson::from_dual(&x)).unwrap();
    let back: DualJson = serde_json::from_str(&s).unwrap();
    assert_eq!(back.to_dual().unwrap(), x);
    let bad = r#"{"p":2,"base":"k","terms":[{"coeff":[1],"xi":[{"P":1},{"P":1}]}]}"#;
    let j: DualJson = serde_json::from_str(bad).unwrap();
    assert!(matches!(j.to_dual(), Err(DualError::NotAdmissible(_))));
}
