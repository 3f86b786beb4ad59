//! Independent oracles shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use syntomic::dual::SteenrodDual;
use syntomic::scalar::{Ring, Scalar};
use syntomic::steenrod::{Adm, Element, Gen, SteenrodAlgebra, Tensor};

/// Admissible sequences counted per (deg, wt) from the inequalities i_{j+1} ≥ p·i_j + ε_j
/// alone, without touching the engine's word encoding.
pub fn brute_counts(p: u32, max_deg: i64) -> BTreeMap<(i64, i64), usize> {
    fn go(p: i64, max: i64, last_i: i64, eps: i64, deg: i64, wt: i64, out: &mut BTreeMap<(i64, i64), usize>) {
        *out.entry((deg, wt)).or_default() += 1;
        let q = p - 1;
        let mut i = (p * last_i + eps).max(1);
        while deg + 2 * i * q <= max {
            for e in 0..=1 {
                let d = deg + 2 * i * q + e;
                if d <= max {
                    go(p, max, i, e, d, wt + i * q, out);
                }
            }
            i += 1;
        }
    }
    let mut out = BTreeMap::new();
    for e0 in 0..=1 {
        if e0 <= max_deg {
            go(p as i64, max_deg, 0, e0, e0, 0, &mut out);
        }
    }
    out
}

pub fn engine_counts(a: &SteenrodAlgebra, max_deg: i64) -> BTreeMap<(i64, i64), usize> {
    let mut out = BTreeMap::new();
    for m in a.basis_up_to(max_deg) {
        let b = m.bidegree(a.p());
        *out.entry((b.deg, b.wt)).or_default() += 1;
    }
    out
}

fn deg(a: &Adm, p: u32) -> i64 {
    a.bidegree(p).deg
}

fn sign(r: &Ring, odd: bool) -> Scalar {
    if odd {
        r.int(-1)
    } else {
        r.one()
    }
}

type Triple = BTreeMap<(Adm, Adm, Adm), Scalar>;

fn add3(r: &Ring, t: &mut Triple, k: (Adm, Adm, Adm), c: Scalar) {
    let e = t.entry(k).or_insert_with(|| r.zero());
    *e = r.add(e, &c);
}

fn clean(mut t: Triple) -> Triple {
    t.retain(|_, c| !c.is_zero());
    t
}

/// Failed Hopf identities on the basis through `max_deg`, one line per witness.
pub fn hopf_failures(a: &Arc<SteenrodAlgebra>, max_deg: i64) -> Vec<String> {
    let r = a.ring();
    let p = a.p();
    let d = SteenrodDual::new(a.clone(), max_deg);
    let basis = a.basis_up_to(max_deg);
    let name = |g: &Adm| syntomic::steenrod::format_word(&g.to_word(), p);
    let mut bad = Vec::new();
    for g in &basis {
        let x = Element::basis(r, g.clone());
        let dg = a.coproduct_adm(g);

        let (mut left, mut right) = (Triple::new(), Triple::new());
        for ((u, v), c) in dg.terms() {
            for ((u1, u2), c2) in a.coproduct_adm(u).terms() {
                add3(&r, &mut left, (u1.clone(), u2.clone(), v.clone()), r.mul(c, c2));
            }
            for ((v1, v2), c2) in a.coproduct_adm(v).terms() {
                add3(&r, &mut right, (u.clone(), v1.clone(), v2.clone()), r.mul(c, c2));
            }
        }
        if clean(left) != clean(right) {
            bad.push(format!("coassociativity at {}", name(g)));
        }

        let mut l = Element::zero(r);
        let mut rt = Element::zero(r);
        for ((u, v), c) in dg.terms() {
            if *u == Adm::unit() {
                l.add_term(v.clone(), c.clone());
            }
            if *v == Adm::unit() {
                rt.add_term(u.clone(), c.clone());
            }
        }
        if l != x || rt != x {
            bad.push(format!("counit at {}", name(g)));
        }

        let eps = Element::one(r).scale(&a.counit(&x));
        let mut s1 = Element::zero(r);
        let mut s2 = Element::zero(r);
        for ((u, v), c) in dg.terms() {
            let su = a.antipode_adm(u);
            let sv = a.antipode_adm(v);
            s1 = s1.add(&a.multiply(&su, &Element::basis(r, v.clone())).unwrap().scale(c)).unwrap();
            s2 = s2.add(&a.multiply(&Element::basis(r, u.clone()), &sv).unwrap().scale(c)).unwrap();
        }
        if s1 != eps || s2 != eps {
            bad.push(format!("antipode axiom at {}", name(g)));
        }

        let sg = d.sigma(&x).unwrap();
        if d.sigma(&sg).unwrap() != x {
            bad.push(format!("σ² = id at {}", name(g)));
        }
        if sg != *a.antipode_adm(g) {
            bad.push(format!("σ = antipode at {}", name(g)));
        }
        let sig = |b: &Adm| d.sigma(&Element::basis(r, b.clone())).unwrap();
        let lhs = a.tensor_map(&dg, sig, sig);
        let rhs = a.tensor_swap(&a.coproduct(&sg).unwrap());
        if lhs != rhs {
            bad.push(format!("(σ⊗σ)Δ = Δ^op σ at {}", name(g)));
        }
    }
    for g in &basis {
        for h in &basis {
            if deg(g, p) + deg(h, p) > max_deg {
                continue;
            }
            let gh = a.mul_adm(g, h);
            let lhs = a.coproduct(&gh).unwrap();
            let rhs = a.tensor_multiply(&a.coproduct_adm(g), &a.coproduct_adm(h));
            if lhs != rhs {
                bad.push(format!("Δ multiplicative at {} · {}", name(g), name(h)));
            }
            // 𝔰(gh) = (−1)^{|g||h|} 𝔰(h)𝔰(g)
            let s = a.antipode(&gh).unwrap();
            let t = a.multiply(&a.antipode_adm(h), &a.antipode_adm(g)).unwrap();
            if s != t.scale(&sign(&r, deg(g, p) * deg(h, p) % 2 != 0)) {
                bad.push(format!("antipode anti-multiplicative at {} · {}", name(g), name(h)));
            }
        }
    }
    bad
}

/// Associativity and idempotence on admissible triples of total degree ≤ `max_deg`.
/// Returns (triples checked, failures).
pub fn associativity_failures(a: &SteenrodAlgebra, max_deg: i64) -> (usize, Vec<String>) {
    let r = a.ring();
    let p = a.p();
    let basis: Vec<Adm> = a.basis_up_to(max_deg).into_iter().filter(|g| *g != Adm::unit()).collect();
    let name = |g: &Adm| syntomic::steenrod::format_word(&g.to_word(), p);
    let mut n = 0;
    let mut bad = Vec::new();
    for x in &basis {
        for y in &basis {
            let dxy = deg(x, p) + deg(y, p);
            if dxy > max_deg {
                continue;
            }
            let xy = a.mul_adm(x, y);
            for z in &basis {
                if dxy + deg(z, p) > max_deg {
                    continue;
                }
                n += 1;
                let left = a.multiply(&xy, &Element::basis(r, z.clone())).unwrap();
                let right = a.multiply(&Element::basis(r, x.clone()), &a.mul_adm(y, z)).unwrap();
                // the concatenated word, reduced once and then again term by term
                let mut w: Vec<Gen> = x.to_word();
                w.extend(y.to_word());
                w.extend(z.to_word());
                let once = a.reduce_word(&w);
                let again = a.adem_reduce(&once.terms().iter().map(|(m, c)| (m.to_word(), c.clone())).collect::<Vec<_>>());
                let bidegrees_ok = once.term_bidegrees().iter().all(|b| *b == a.bidegree_of_word(&w));
                if left != right || once != left || again != once || !bidegrees_ok {
                    bad.push(format!("{} · {} · {}", name(x), name(y), name(z)));
                }
            }
        }
    }
    (n, bad)
}

/// Tensor of a single pair with coefficient 1.
pub fn pure(r: Ring, a: Adm, b: Adm) -> Tensor {
    let mut t = Tensor::zero(r);
    t.add_term(a, b, r.one());
    t
}
