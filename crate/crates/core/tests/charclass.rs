use std::collections::BTreeMap;

use syntomic::charclass::*;

fn poly(s: &str) -> SwPoly {
    SwPoly::parse(s).unwrap()
}

fn mono(s: &str) -> SwMono {
    poly(s).terms().iter().next().unwrap().clone()
}

/// Every monomial of bundle `b` with Σ k·e = wt, i.e. one per partition of wt.
fn monomials(b: u32, wt: u32) -> Vec<SwMono> {
    fn go(b: u32, left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<SwMono>) {
        if left == 0 {
            let mut m = SwMono::new();
            for &k in cur.iter() {
                *m.entry((b, k)).or_insert(0) += 1;
            }
            out.push(m);
            return;
        }
        for k in (1..=left.min(max)).rev() {
            cur.push(k);
            go(b, left - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(b, wt, wt, &mut Vec::new(), &mut out);
    out
}

#[test]
fn chern_reduction_and_whitney() {
    let c: ChernPoly = BTreeMap::from([(vec![2], 1), (vec![0, 1], 2), (vec![1, 1], 3), (vec![0, 0, 1], -1)]);
    assert_eq!(sw_from_chern(&c, 0).to_string(), "w2^2 + w2 w4 + w6");
    assert_eq!(sw_from_chern(&c, 1).to_string(), "w2'^2 + w2' w4' + w6'");
    let w = whitney_product(&SwPoly::total_of_rank(0, 1), &SwPoly::total_of_rank(1, 1));
    assert_eq!(w.to_string(), "1 + w2 + w2' + w2 w2'");
    assert_eq!(whitney_product(&poly("1 + w2"), &poly("1 + w2")).to_string(), "1 + w2^2");
}

#[test]
fn parsing() {
    assert_eq!(poly("w2 w4 + w6").to_string(), "w2 w4 + w6");
    assert!(poly("w3 w2").is_zero());
    assert!(poly("w2 + w2").is_zero());
    assert!(SwPoly::parse("x2").is_err());
    assert!(SwPoly::parse("w2^a").is_err());
}

#[test]
fn square_examples() {
    assert_eq!(sq_on_sw(0, &mono("w4")).to_string(), "w4");
    assert_eq!(sq_on_sw(2, &mono("w2")).to_string(), "w2^2");
    assert_eq!(sq_on_sw(2, &mono("w4")).to_string(), "w2 w4 + w6");
    assert_eq!(sq_on_sw(4, &mono("w4")).to_string(), "w4^2");
    assert!(sq_on_sw(6, &mono("w4")).is_zero());
    assert!(sq_on_sw(3, &mono("w6")).is_zero());
}

#[test]
fn cartan_through_degree_16() {
    let mut checked = 0;
    for wa in 1..=4 {
        for wb in 1..=(8 - wa) {
            for b_bundle in [0, 1] {
                for a in monomials(0, wa) {
                    for b in monomials(b_bundle, wb) {
                        let ab = SwPoly::from_monomial(a.clone()).mul(&SwPoly::from_monomial(b.clone()));
                        for k in (0..=2 * (wa + wb)).step_by(2) {
                            let mut rhs = SwPoly::zero();
                            for i in (0..=k).step_by(2) {
                                rhs = rhs.add(&sq_on_sw(i, &a).mul(&sq_on_sw(k - i, &b)));
                            }
                            assert_eq!(ab.sq(k), rhs, "Sq{k} on {ab}");
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 500);
}

#[test]
fn agrees_with_explicit_roots() {
    // with at least as many roots as the weight, e_1…e_n are algebraically independent
    for wt in 1..=5 {
        let rr = ChernRootRing::new(wt as usize + 2);
        for m in monomials(0, wt) {
            let p = SwPoly::from_monomial(m.clone());
            let roots = rr.from_sw(&p);
            assert_eq!(rr.to_sw(&roots).unwrap(), p);
            for s in 0..=wt {
                let want = rr.sq(s, &roots);
                assert_eq!(rr.from_sw(&sq_on_sw(2 * s, &m)), want, "Sq{} {p}", 2 * s);
            }
        }
    }
    let rr = ChernRootRing::new(3);
    let lopsided: RootPoly = std::iter::once(vec![1, 0, 0]).collect();
    assert!(matches!(rr.to_sw(&lopsided), Err(CharError::NotSymmetric(_))));
}

#[test]
fn universal_wu_classes() {
    let v = wu_from_sw(12);
    assert_eq!(v[0].to_string(), "1");
    assert_eq!(v[2].to_string(), "w2");
    assert_eq!(v[4].to_string(), "w2^2 + w4");
    for (j, x) in v.iter().enumerate() {
        if j % 2 == 1 {
            assert!(x.is_zero(), "v{j}");
        }
        for m in x.terms() {
            assert!(m.keys().all(|&(b, _)| b == 0));
            let d: u32 = m.iter().map(|(&(_, k), &e)| 2 * k * e).sum();
            assert_eq!(d as usize, j);
        }
    }
    // Sq(v) = w degreewise
    for j in 0..=12 {
        let mut s = SwPoly::zero();
        for i in 0..=j {
            s = s.add(&v[j - i].sq(i as u32));
        }
        let want = if j % 2 == 0 { SwPoly::w(0, j as u32 / 2) } else { SwPoly::zero() };
        assert_eq!(s, want, "degree {j}");
    }
}

fn binom_odd(n: u32, k: u32) -> bool {
    k <= n && (n & k) == k
}

#[test]
fn projective_tangent_classes() {
    for n in 1..=6 {
        let m = projective_space_model(n).unwrap();
        let r = &m.ring;
        let h = r.basis_vec(r.index("h").unwrap());
        // w = (1 + h)^{n+1}
        for k in 0..=n {
            let want = if binom_odd(n + 1, k) { r.pow(&h, k) } else { r.zero() };
            assert_eq!(m.tangent[2 * k as usize], want, "P{n} w{}", 2 * k);
            assert_eq!(m.tangent[2 * k as usize + 1], r.zero());
        }
    }
    let total = |n| {
        let m = projective_space_model(n).unwrap();
        let r = &m.ring;
        r.format(&m.tangent.iter().fold(r.zero(), |a, x| r.add(&a, x)))
    };
    assert_eq!(total(1), "1");
    assert_eq!(total(2), "1 + h + h^2");
    assert!(product_model(&[]).is_err());
    assert!(product_model(&[2, 0]).is_err());
}

#[test]
fn wu_theorem_on_models() {
    let mut models: Vec<Vec<u32>> = (1..=6).map(|n| vec![n]).collect();
    for a in 1..=5 {
        for b in a..=(6 - a) {
            models.push(vec![a, b]);
        }
    }
    for dims in models {
        let rep = verify_wu_theorem(&product_model(&dims).unwrap()).unwrap();
        assert!(rep.passed(), "{dims:?}: {:?}", rep.violations);
        assert_eq!(rep.total_sq_v, rep.w);
    }
}

#[test]
fn wrong_tangent_is_caught() {
    let mut m = projective_space_model(2).unwrap();
    m.tangent[2] = m.ring.zero();
    let rep = verify_wu_theorem(&m).unwrap();
    assert!(!rep.passed());
    assert!(rep.violations.iter().any(|v| v.axiom == "Sq(v) = w"));
}

#[test]
fn json_round_trip() {
    let p = poly("1 + w2^3 w4' + w6");
    let s = serde_json::to_string(&SwJson::from_poly(&p)).unwrap();
    let back: SwJson = serde_json::from_str(&s).unwrap();
    assert_eq!(back.to_poly().unwrap(), p);
    let odd: SwJson = serde_json::from_str(r#"{"terms":[{"vars":[[0,3,1]],"coeff":1}]}"#).unwrap();
    assert!(odd.to_poly().unwrap().is_zero());
}
