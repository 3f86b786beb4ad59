use syntomic::action::*;
use syntomic::bockstein::{export_pd_instance, exterior, pd_block, tensor};
use syntomic::charclass::{product_model, projective_space_model};
use syntomic::scalar::Base;

fn p2() -> (PDRing, SteenrodAction) {
    let m = projective_space_model(2).unwrap();
    (m.ring, m.action)
}

fn axioms(v: &[Violation]) -> Vec<&str> {
    v.iter().map(|x| x.axiom.as_str()).collect()
}

#[test]
fn projective_models_validate() {
    for n in 1..=6 {
        let m = projective_space_model(n).unwrap();
        assert!(m.ring.check_ring().is_empty());
        assert!(m.ring.check_duality().is_ok());
        assert_eq!(validate_action(&m.ring, &m.action).unwrap(), vec![], "P{n}");
    }
    let m = product_model(&[2, 2]).unwrap();
    assert!(validate_action(&m.ring, &m.action).unwrap().is_empty());
}

#[test]
fn broken_actions_are_reported() {
    let (r, a) = p2();
    let h = r.index("h").unwrap();

    // Sq²h = 0 instead of h²
    let mut bad = a.clone();
    bad.powers.get_mut(&1).unwrap()[h] = r.zero();
    assert!(axioms(&validate_action(&r, &bad).unwrap()).contains(&"p-th power law"));

    // P^0 acting by zero
    let mut bad = a.clone();
    bad.powers.insert(0, vec![r.zero(); r.len()]);
    assert!(axioms(&validate_action(&r, &bad).unwrap()).contains(&"P^0 identity"));

    // a component in the wrong bidegree is structural
    let mut bad = a.clone();
    bad.beta[h] = r.basis_vec(h);
    assert!(matches!(validate_action(&r, &bad), Err(ActionError::Structural(_))));

    // Sq²(e h) = 0 while Sq²h = h² breaks the Cartan formula on e·h
    let mut bad = a;
    let eh = r.index("e h").unwrap();
    bad.powers.get_mut(&1).unwrap()[eh] = r.zero();
    let v = validate_action(&r, &bad).unwrap();
    assert!(v.iter().any(|x| x.axiom == "Cartan" && x.witness.contains(&"h".to_string())));
}

#[test]
fn flavor_conversion() {
    for base in [Base::K, Base::O] {
        for from in [Flavor::Syn, Flavor::Einfty] {
            let c = flavor_convert(2, 1, 1, from, base);
            assert_eq!(c.tau_power, Some(0));
        }
    }
    assert_eq!(flavor_convert(2, 1, 1, Flavor::Einfty, Base::O).describe(2), "Pe^1 = Ps^1");
    assert_eq!(flavor_convert(2, 2, 1, Flavor::Syn, Base::K).describe(2), "Ps^2 = 0");
    assert_eq!(flavor_convert(2, 1, 2, Flavor::Einfty, Base::O).describe(2), "Pe^1 = tau Ps^1");
    // the τ-power grows with p − 1
    assert_eq!(flavor_convert(3, 3, 1, Flavor::Syn, Base::O).tau_power, Some(4));
}

#[test]
fn wu_classes_by_duality() {
    let (r, a) = p2();
    let v = wu_classes(&r, &a).unwrap();
    assert_eq!(v[0], r.one());
    assert_eq!(v[2], r.basis_vec(r.index("h").unwrap()));
    assert_eq!(v[4], r.zero());
    // v_i = 0 above the middle
    for x in &v[(r.dim as usize + 2)..] {
        assert_eq!(*x, r.zero());
    }
    // ∫Sq^i(α) = ∫ v_i·α on every basis class, for several models
    for dims in [vec![1], vec![3], vec![4], vec![1, 2], vec![2, 2]] {
        let m = product_model(&dims).unwrap();
        let (r, a) = (&m.ring, &m.action);
        let v = wu_classes(r, a).unwrap();
        for (i, vi) in v.iter().enumerate() {
            for k in 0..r.len() {
                let x = r.basis_vec(k);
                assert_eq!(r.integrate(&a.sq(r, i as u32, &x)), r.integrate(&r.mul(vi, &x)), "{dims:?} i={i}");
            }
        }
    }
}

#[test]
fn odd_prime_wu_is_rejected() {
    let (r, a) = p2();
    let mut r3 = r.clone();
    r3.p = 3;
    assert!(wu_classes(&r3, &a).is_err());
}

fn exported(k: u32, nu: i128, n: u32) -> PDRingModN {
    let a = tensor(&exterior("t", (1, 0)).unwrap(), &pd_block(k, nu, false).unwrap()).unwrap();
    export_pd_instance(&a, 2, n).unwrap()
}

#[test]
fn pairing_on_exported_instances() {
    for k in 1..=3 {
        for nu in [0, 1] {
            for n in 1..=3 {
                let r = exported(k, nu, n);
                assert!(r.validate().is_empty());
                assert!(r.check_pairing().unwrap().is_empty());
                let mid = r.in_bidegree(r.dim, r.dim / 2);
                let zero = vec![0; r.len()];
                for &i in &mid {
                    let u = r.basis_vec(i);
                    assert_eq!(r.pairing_n(&u, &zero).unwrap(), 0);
                    assert_eq!(r.pairing_n(&u, &u).unwrap(), 0);
                    assert!(r.verify_top_formula(&u).unwrap().is_empty());
                }
                assert!(r.verify_top_formula(&zero).unwrap().is_empty());
            }
        }
    }
}

#[test]
fn pairing_errors_and_negative_controls() {
    let r = exported(2, 1, 2);
    let unit = r.basis_vec(r.unit);
    assert!(matches!(r.pairing_n(&unit, &unit), Err(ActionError::Argument(_))));

    let mut no_data = r.clone();
    no_data.mod_two = None;
    let mid = r.in_bidegree(r.dim, r.dim / 2);
    let u = r.basis_vec(mid[0]);
    assert!(matches!(no_data.verify_top_formula(&u), Err(ActionError::Config(_))));

    // corrupt β_n on the pairing bidegree
    let mut bad = r.clone();
    let mut found = false;
    for &i in &mid {
        for k in 0..bad.len() {
            let (d, w) = (bad.basis[k].deg, bad.basis[k].wt);
            if (d, w) == (r.dim + 1, r.dim / 2) {
                bad.bockstein[i][k] += 1;
                found = true;
            }
        }
    }
    assert!(found);
    let mut complaints = bad.validate();
    complaints.extend(bad.check_pairing().unwrap());
    for &i in &mid {
        complaints.extend(bad.verify_top_formula(&bad.basis_vec(i)).unwrap());
    }
    assert!(!complaints.is_empty());
}

#[test]
fn rings_round_trip_through_json() {
    let (r, a) = p2();
    let s = serde_json::to_string(&r).unwrap();
    let mut back: PDRing = serde_json::from_str(&s).unwrap();
    back.rebuild().unwrap();
    assert_eq!(back, r);
    let h = r.basis_vec(r.index("h").unwrap());
    assert_eq!(back.mul(&h, &h), r.mul(&h, &h));
    let s = serde_json::to_string(&a).unwrap();
    assert_eq!(serde_json::from_str::<SteenrodAction>(&s).unwrap(), a);

    let m = exported(1, 0, 2);
    let s = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<PDRingModN>(&s).unwrap(), m);
}

#[test]
fn malformed_ring_tables() {
    let b = |l: &str, d, w| BasisElem { label: l.into(), deg: d, wt: w };
    // 1, x with x² = 1 has the wrong bidegree
    let e = PDRing::new(2, 0, vec![b("1", 0, 0), b("x", 1, 0)], 0, vec![(1, 1, 0, 1)], vec![0, 1]);
    assert!(e.is_err());
}
