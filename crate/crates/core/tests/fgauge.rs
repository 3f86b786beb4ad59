use std::collections::BTreeMap;

use syntomic::fgauge::*;

fn o(p: u64, f: usize) -> LatticeGauge {
    LatticeGauge::trivial(p, f).unwrap()
}

fn varpi(w: &WittRing) -> WMat {
    vec![vec![w.zero(), w.one()], vec![w.ppow_elt(1), w.zero()]]
}

fn h(p: u64, f: usize) -> LatticeGauge {
    let w = LatticeGauge::working_ring(p, f).unwrap();
    let v = varpi(&w);
    LatticeGauge::rees_of_filtration(p, f, 2, std::slice::from_ref(&v), Some(Frob { matrix: v.clone(), shift: 1 })).unwrap()
}

#[test]
fn structure_gauge_has_point_cohomology() {
    for (p, f) in [(2, 1), (3, 1), (5, 1), (2, 2)] {
        let g = o(p, f).to_gauge(1).unwrap();
        assert!(g.validate().is_empty());
        // F_p[ε]/ε²: one class in each degree
        assert_eq!(global_sections(&g).unwrap(), (1, 1), "p={p} f={f}");
    }
}

#[test]
fn twisted_structure_gauges() {
    // regression values from the kernel/cokernel computation
    for p in [2, 3] {
        for n in [-3, -2, -1, 1, 2, 3] {
            let g = o(p, 1).twist(n).to_gauge(1).unwrap();
            assert_eq!(global_sections(&g).unwrap(), (0, 0), "p={p} n={n}");
        }
    }
}

#[test]
fn global_sections_need_gluing() {
    let mut g = o(2, 1).to_gauge(1).unwrap();
    g.gluing = None;
    assert!(matches!(global_sections(&g), Err(GaugeError::Structural(_))));
}

#[test]
fn unit_and_twists_under_tensor() {
    let x = h(2, 2);
    assert!(o(2, 2).tensor(&x).unwrap().same_as(&x));
    assert!(x.tensor(&o(2, 2)).unwrap().same_as(&x));
    for a in -2..=2 {
        for b in -2..=2 {
            let lhs = o(2, 1).twist(a).tensor(&o(2, 1).twist(b)).unwrap();
            assert!(lhs.same_as(&o(2, 1).twist(a + b)), "a={a} b={b}");
            assert!(o(2, 1).twist(a).twist(b).same_as(&o(2, 1).twist(a + b)));
        }
    }
}

#[test]
fn rees_gauge_of_h() {
    let x = h(2, 2);
    assert_eq!((x.lo, x.hi), (0, 1));
    let idx: Vec<u32> = (-1..=3).map(|n| x.index(n)).collect();
    // H, H, ϖH, pϖH, p²ϖH
    assert_eq!(idx, vec![0, 0, 1, 3, 5]);
    let g = x.to_gauge(3).unwrap();
    assert!(g.validate().is_empty());
    for w in -3..=0 {
        assert_eq!(g.t_kind(w), "~");
    }
    assert_ne!(g.t_kind(1), "~");
    for w in 1..=4 {
        assert_eq!(g.u_kind(w), "~");
    }
    assert_ne!(g.u_kind(0), "~");
    let text = x.render();
    assert!(text.contains("p ~"));
    assert!(text.lines().next().unwrap().starts_with('w'));
}

#[test]
fn rees_rejects_bad_filtrations() {
    let w = LatticeGauge::working_ring(2, 1).unwrap();
    // Fil^1 = p²V misses p·Fil^0
    let bad = w.mat_scalar(2, &w.ppow_elt(2));
    let e = LatticeGauge::rees_of_filtration(2, 1, 2, &[bad], None).unwrap_err();
    assert!(matches!(e, GaugeError::Validation { weight: 1, .. }), "{e:?}");
    // Frobenius not carrying V onto the top lattice
    let v = varpi(&w);
    let e = LatticeGauge::rees_of_filtration(2, 1, 2, &[v], Some(Frob { matrix: w.mat_id(2), shift: 1 })).unwrap_err();
    assert!(matches!(e, GaugeError::Validation { .. }));
}

#[test]
fn dual_of_h_is_a_twist() {
    let x = h(2, 2);
    let d = x.dual().unwrap();
    let t = x.twist(1);
    assert_eq!((d.lo, d.hi), (t.lo, t.hi));
    for n in -4..=3 {
        assert_eq!(d.index(n), t.index(n), "n={n}");
    }
    assert!(d.dual().unwrap().same_as(&x));
    let dg = d.to_gauge(2).unwrap();
    assert!(dg.validate().is_empty());
}

#[test]
fn m_diagram() {
    let r = supersingular_pipeline(2, 2, 3).unwrap();
    let m = &r.m_gauge;
    for w in -3..=4 {
        assert_eq!(m.piece(w), [1]);
    }
    assert_eq!(m.u_kind(0), "0");
    assert_eq!(m.t_kind(1), "0");
    let want = "\
w         0   1
M_w       F4  F4
u: w→w+1  0   ~
t: w→w-1  ~   0
gens      v0  w1
";
    assert_eq!(m.render(), want);
}

#[test]
fn pipeline_over_f4() {
    let r = supersingular_pipeline(2, 2, 3).unwrap();
    assert!(r.passed(), "{}", r.render());
    let dims = |g: &Gauge| (-1..=3).map(|w| g.piece(w).len()).collect::<Vec<_>>();
    assert_eq!(dims(&r.m_tilde), vec![2, 2, 3, 2, 2]);
    assert_eq!(dims(&r.delta), vec![0, 0, 1, 0, 0]);
    assert_eq!(r.delta.u_kind(1), "0");
    assert_eq!(r.delta.t_kind(1), "0");
    assert_eq!(r.nesting[0].1, vec![1, 1, 0, 1, 1]);
    assert_eq!(r.nesting[1].1, vec![3, 3, 4, 3, 3]);
    assert_eq!(r.end_chain.len(), 9);
    assert!(r.end_chain.iter().all(|e| e.diagonal && e.valuations == e.expected));
    // δ{0} over F_4: a copy of F_q in weight 0 and nothing to glue
    assert_eq!(r.delta0_sections, (2, 0));
    assert!(r.checks.iter().any(|c| c.identity.contains("π∘s")));
    for g in [&r.h, &r.m_gauge, &r.m_tilde, &r.m_prime, &r.delta] {
        assert!(g.validate().is_empty());
    }
    let (wm, wp) = r.m_tilde.coherence();
    assert!(wm <= wp);
}

#[test]
fn pipeline_other_fields() {
    for (p, f, m) in [(2, 1, 3), (2, 3, 2), (3, 2, 3), (5, 1, 2)] {
        let r = supersingular_pipeline(p, f, m).unwrap();
        assert!(r.passed(), "p={p} f={f}");
        assert_eq!(r.delta0_sections, (f, 0));
        let shortcut = r.checks.iter().any(|c| c.identity.contains("π∘s"));
        assert_eq!(shortcut, p == 2);
    }
}

#[test]
fn gluing_is_semilinear() {
    let r = supersingular_pipeline(2, 2, 3).unwrap();
    for g in [&r.m_tilde, &r.m_prime, &r.m_gauge] {
        let ring = &g.ring;
        let y = ring.gen();
        for i in 0..g.piece(g.lo).len() {
            let x = g.basis_vec(g.lo, i);
            let yx: Vec<Elt> = x.iter().map(|c| ring.mul(c, &y)).collect();
            let lhs = g.apply_gluing(&yx).unwrap();
            let fx = g.apply_gluing(&x).unwrap();
            let rhs: Vec<Elt> = fx.iter().map(|c| ring.mul(c, &ring.frob(&y))).collect();
            assert!(g.is_zero_vec(g.hi, &lhs.iter().zip(&rhs).map(|(a, b)| ring.sub(a, b)).collect::<Vec<_>>()));
        }
    }
}

#[test]
fn sub_and_quotient_gauges() {
    let r = supersingular_pipeline(2, 2, 3).unwrap();
    let mt = &r.m_tilde;
    let (mp, incl, gens) = mt.torsion_part().unwrap();
    assert_eq!(gens.len(), 2);
    assert!(incl.check(&mp, mt).is_empty());
    let mut by_w: BTreeMap<i64, Vec<Vec<Elt>>> = BTreeMap::new();
    for g in &gens {
        by_w.entry(g.weight).or_default().push(g.vector.clone());
    }
    let (l, proj) = mt.quotient(&by_w).unwrap();
    assert!(proj.check(mt, &l).is_empty());
    // lengths add up weight by weight
    for w in -1..=3 {
        assert_eq!(mp.piece(w).len() + l.piece(w).len(), mt.piece(w).len());
    }
    // the whole gauge is its own sub-gauge
    let all: BTreeMap<i64, Vec<Vec<Elt>>> =
        (mt.lo..=mt.hi).map(|w| (w, (0..mt.piece(w).len()).map(|i| mt.basis_vec(w, i)).collect())).collect();
    let (q, _) = mt.quotient(&all).unwrap();
    assert!((q.lo..=q.hi).all(|w| q.piece(w).is_empty()));
}

#[test]
fn json_round_trip() {
    let r = supersingular_pipeline(2, 2, 3).unwrap();
    for g in [&r.m_gauge, &r.m_tilde, &r.delta] {
        let s = serde_json::to_string(g).unwrap();
        let back: Gauge = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, g);
    }
    let s = serde_json::to_string(&r.h_lattice).unwrap();
    let back: LatticeGauge = serde_json::from_str(&s).unwrap();
    assert_eq!(back, r.h_lattice);
}

#[test]
fn gauge_constructor_checks_relations() {
    let w = WittRing::new(2, 1, 2).unwrap();
    let one = vec![vec![w.one()]];
    // u = t = 1 violates tu = p
    let e = Gauge::new(w.clone(), 0, 1, vec![vec![2], vec![2]], vec![one.clone()], vec![one.clone()], None);
    assert!(matches!(e, Err(GaugeError::Structural(_))));
    let p = vec![vec![w.from_int(2)]];
    let g = Gauge::new(w, 0, 1, vec![vec![2], vec![2]], vec![p], vec![one], None).unwrap();
    assert_eq!(g.u_kind(0), "*");
    assert_eq!(g.t_kind(1), "~");
}
