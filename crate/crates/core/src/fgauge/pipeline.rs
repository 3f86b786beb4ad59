use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::gauge::{global_sections, table, Gauge, GaugeMap, TorsionGen};
use super::lattice::{same_lattice, Frob, LatticeGauge};
use super::witt::{Elt, WMat, WittRing};
use super::GaugeError;
use crate::bockstein::Check;

/// Valuation pattern of one lattice in End(W^2) = span(E11, E12, E21, E22).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndChainRow {
    pub lattice: String,
    pub weight: i64,
    pub valuations: [[u32; 2]; 2],
    pub expected: [[u32; 2]; 2],
    /// the lattice is spanned by the p^{v_ij}E_ij
    pub diagonal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Pipeline {
    pub p: u64,
    pub f: usize,
    pub m: u32,
    /// the Rees lattices of H
    pub h_lattice: LatticeGauge,
    /// H/p^m
    pub h: Gauge,
    /// H/ϖH
    pub m_gauge: Gauge,
    pub end_chain: Vec<EndChainRow>,
    /// F_q-dimensions over weights −1..=3
    pub nesting: Vec<(String, Vec<usize>)>,
    pub m_tilde: Gauge,
    pub m_prime: Gauge,
    /// coker(M → M′) = δ{−1}
    pub delta: Gauge,
    /// scalar λ in f(w1) = λ·w1′
    pub lambda: Elt,
    /// (dim H⁰, dim H¹) over F_p of δ{0}
    pub delta0_sections: (usize, usize),
    pub checks: Vec<Check>,
}

impl Pipeline {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("ring W_{}(F_{})\n\nH\n", self.m, self.h.ring.q()));
        s.push_str(&self.h_lattice.render());
        s.push_str(&format!("\nH/p^{}\n", self.m));
        s.push_str(&self.h.render());
        s.push_str("\nM = H/ϖH\n");
        s.push_str(&self.m_gauge.render());
        s.push_str("\nEnd chain (valuations of E11 E12 / E21 E22)\n");
        let mut rows = vec![vec!["lattice".to_string(), "w".into(), "pattern".into(), "diagonal".into()]];
        for r in &self.end_chain {
            let v = r.valuations;
            rows.push(vec![
                r.lattice.clone(),
                r.weight.to_string(),
                format!("[{} {} / {} {}]", v[0][0], v[0][1], v[1][0], v[1][1]),
                r.diagonal.to_string(),
            ]);
        }
        s.push_str(&table(&rows));
        s.push_str("\nnesting quotients, dims over w = -1..3\n");
        let rows: Vec<Vec<String>> = self
            .nesting
            .iter()
            .map(|(n, d)| std::iter::once(n.clone()).chain(d.iter().map(|x| x.to_string())).collect())
            .collect();
        s.push_str(&table(&rows));
        s.push_str("\nM~\n");
        s.push_str(&self.m_tilde.render());
        s.push_str("\nM'\n");
        s.push_str(&self.m_prime.render());
        s.push_str("\ndelta{-1} = coker(M -> M')\n");
        s.push_str(&self.delta.render());
        s.push_str(&format!(
            "\nglobal sections of delta{{0}}: H0 = {}, H1 = {}\n\n",
            self.delta0_sections.0, self.delta0_sections.1
        ));
        for c in &self.checks {
            s.push_str(&format!("[{}] {}\n", if c.holds { "ok" } else { "FAIL" }, c.identity));
        }
        s
    }
}

const END_EXPECTED: [(&str, [[[u32; 2]; 2]; 3]); 3] = [
    ("End", [[[0, 0], [0, 0]], [[0, 0], [1, 0]], [[1, 0], [2, 1]]]),
    ("D", [[[0, 0], [1, 0]], [[0, 0], [1, 0]], [[1, 1], [2, 1]]]),
    ("pEnd", [[[1, 1], [1, 1]], [[1, 1], [2, 1]], [[2, 1], [3, 2]]]),
];

/// e_i⊗e_1 ↦ E_{i2}, e_i⊗e_2 ↦ −E_{i1} (0-based indices i·2+j on both sides).
fn pairing(w: &WittRing) -> WMat {
    let mut a = w.mat_zero(4, 4);
    for i in 0..2 {
        a[i * 2 + 1][i * 2] = w.one();
        a[i * 2][i * 2 + 1] = w.from_int(-1);
    }
    a
}

fn end_row(w: &WittRing, name: &str, n: i64, basis: &WMat, expected: [[u32; 2]; 2]) -> EndChainRow {
    let img = w.mat_mul(&pairing(w), basis, 4);
    let mut v = [[0u32; 2]; 2];
    let mut diag = w.mat_zero(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            v[a][b] = img[a * 2 + b].iter().map(|x| w.val(x)).min().unwrap();
            diag[a * 2 + b][a * 2 + b] = w.ppow_elt(v[a][b]);
        }
    }
    EndChainRow {
        lattice: name.into(),
        weight: n,
        valuations: v,
        expected,
        diagonal: same_lattice(w, 4, &img, &diag),
    }
}

fn dims(g: &Gauge) -> Vec<usize> {
    (-1..=3).map(|w| g.piece(w).len()).collect()
}

fn table_err(weight: i64, what: &str, got: impl std::fmt::Debug, want: impl std::fmt::Debug) -> GaugeError {
    GaugeError::Pipeline {
        weight,
        detail: format!("{what}: got {got:?}, expected {want:?}"),
    }
}

/// Ambient vector of a kernel coordinate vector (index j reinserted).
fn unkernel(w: &WittRing, lambda: &[Elt], j: usize, x: &[Elt]) -> Vec<Elt> {
    let mut v: Vec<Elt> = x.to_vec();
    let lj = w.inv(&lambda[j]).unwrap();
    let mut s = w.zero();
    for (k, xk) in (0..lambda.len()).filter(|&k| k != j).zip(x) {
        s = w.add(&s, &w.mul(&lambda[k], xk));
    }
    v.insert(j, w.neg(&w.mul(&s, &lj)));
    v
}

fn kernel_coords(v: &[Elt], j: usize) -> Vec<Elt> {
    v.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()
}

fn iterate(g: &Gauge, from: i64, to: i64, x: &[Elt]) -> Vec<Elt> {
    let mut v = x.to_vec();
    let mut w = from;
    while w > to {
        v = g.apply_t(w, &v);
        w -= 1;
    }
    while w < to {
        v = g.apply_u(w, &v);
        w += 1;
    }
    v
}

fn label(g: &mut Gauge, gens: &[(i64, &str)]) {
    g.labels = vec![vec![]; g.exps.len()];
    for &(w, name) in gens {
        g.labels[(w - g.lo) as usize].push(name.to_string());
    }
}

/// The supersingular construction over W_m(F_{p^f}): the Rees gauge H of the rank-2
/// Dieudonné lattice with ψ = ϖ/p, its quotient M = H/ϖH, the Eichler-order lattice in
/// End(H), the gauge M̃ cut out by the trace, its torsion part M′ and δ{−1} = coker(M → M′).
pub fn supersingular_pipeline(p: u64, f: usize, m: u32) -> Result<Pipeline, GaugeError> {
    let w = LatticeGauge::working_ring(p, f)?;
    let mut checks = Vec::new();
    let varpi: WMat = vec![vec![w.zero(), w.one()], vec![w.ppow_elt(1), w.zero()]];
    let h = LatticeGauge::rees_of_filtration(
        p,
        f,
        2,
        std::slice::from_ref(&varpi),
        Some(Frob {
            matrix: varpi.clone(),
            shift: 1,
        }),
    )?;
    let hq = h.to_gauge(m)?;

    // M = H/ϖH
    let mut mg = h.quotient(&h.image(&varpi)?, m)?.gauge;
    for wt in -1..=3 {
        if mg.piece(wt) != [1] {
            return Err(table_err(wt, "M", mg.piece(wt), [1]));
        }
    }
    let pattern_ok = mg.u_kind(0) == "0"
        && mg.t_kind(1) == "0"
        && (-2..=0).all(|wt| mg.t_kind(wt) == "~")
        && (1..=3).all(|wt| mg.u_kind(wt) == "~");
    if !pattern_ok {
        return Err(GaugeError::Pipeline {
            weight: 0,
            detail: "M does not have u_0 = t_1 = 0 with isomorphisms elsewhere".into(),
        });
    }
    let tg = mg.torsion_generators()?;
    let find = |gs: &[TorsionGen], wt: i64, side: char| gs.iter().find(|g| g.weight == wt && g.killed_by == side).map(|g| g.vector.clone());
    let (v0, w1) = match (find(&tg, 0, 'u'), find(&tg, 1, 't')) {
        (Some(a), Some(b)) if tg.len() == 2 => (a, b),
        _ => {
            return Err(GaugeError::Pipeline {
                weight: 0,
                detail: format!("M has torsion generators {:?}", tg.iter().map(|g| (g.weight, g.killed_by)).collect::<Vec<_>>()),
            })
        }
    };
    checks.push(Check::new("M is generated by v0 (weight 0, u v0 = 0) and w1 (weight 1, t w1 = 0)", true, vec![]));
    label(&mut mg, &[(0, "v0"), (1, "w1")]);

    // End chain
    let hh = h.tensor(&h)?;
    let mut eich = w.mat_id(4);
    eich[3][3] = w.ppow_elt(1);
    let dlat = LatticeGauge::new(w.clone(), 4, 1, vec![eich], hh.frob.clone())?;
    let phh = hh.scale(1);
    let mut end_chain = Vec::new();
    for ((name, exp), lg) in END_EXPECTED.iter().zip([&hh, &dlat, &phh]) {
        for n in 0..=2i64 {
            let row = end_row(&w, name, n, &lg.at(n), exp[n as usize]);
            if !row.diagonal || row.valuations != row.expected {
                return Err(table_err(n, &format!("{name} lattice"), row.valuations, row.expected));
            }
            end_chain.push(row);
        }
    }

    let n1 = dims(&hh.quotient(&dlat, m)?.gauge);
    let n2 = dims(&dlat.quotient(&phh, m)?.gauge);
    for (got, want, what) in [(&n1, [1, 1, 0, 1, 1], "(H⊗H)/(D⊗O{-1})"), (&n2, [3, 3, 4, 3, 3], "(D⊗O{-1})/p(H⊗H)")] {
        if got[..] != want {
            let wt = got.iter().zip(want).position(|(a, b)| *a != b).unwrap() as i64 - 1;
            return Err(table_err(wt, what, got, want));
        }
    }
    let nesting = vec![("(H⊗H)/(D⊗O{-1})".to_string(), n1), ("(D⊗O{-1})/p(H⊗H)".to_string(), n2)];

    // M̃ inside the trace-zero part
    let lambda: Vec<Elt> = [0i128, -1, 1, 0].iter().map(|&c| w.from_int(c)).collect();
    let (d0, j) = dlat.restrict_to_kernel(&lambda)?;
    let (p0, _) = phh.restrict_to_kernel(&lambda)?;
    let mt = d0.quotient(&p0, m)?;
    let mtd = dims(&mt.gauge);
    if mtd != [2, 2, 3, 2, 2] {
        let wt = mtd.iter().zip([2, 2, 3, 2, 2]).position(|(a, b)| *a != b).unwrap() as i64 - 1;
        return Err(table_err(wt, "M~", &mtd, [2, 2, 3, 2, 2]));
    }

    // M′ and the identification of its generators
    let (mut mp, incl, tgens) = mt.gauge.torsion_part()?;
    let (v1p, w1p) = match (find(&tgens, 1, 'u'), find(&tgens, 1, 't')) {
        (Some(a), Some(b)) if tgens.len() == 2 => (a, b),
        _ => {
            return Err(GaugeError::Pipeline {
                weight: 1,
                detail: format!(
                    "M~ has torsion generators {:?}",
                    tgens.iter().map(|g| (g.weight, g.killed_by)).collect::<Vec<_>>()
                ),
            })
        }
    };
    let end_of = |x: &[Elt]| -> Vec<u32> {
        let amb = unkernel(&w, &lambda, j, &mt.lift(1, x));
        w.mat_vec(&pairing(&w), &amb).iter().map(|e| w.val(e)).collect()
    };
    let ve = end_of(&v1p);
    checks.push(Check::new(
        "the u-torsion class of M~ in weight 1 is E12 (v1')",
        ve[1] == 0 && ve[0] >= 1 && ve[3] >= 1,
        vec![format!("valuations {ve:?}")],
    ));
    let we = end_of(&w1p);
    checks.push(Check::new(
        "the t-torsion class of M~ in weight 1 is pE21 (w1')",
        we[2] == 1 && we[1] >= 1 && we[0] >= 1 && we[3] >= 1,
        vec![format!("valuations {we:?}")],
    ));
    let mut mp_labels = mp.clone();
    label(&mut mp_labels, &[(1, "v1'"), (1, "w1'")]);

    // f: M → M′, v0 ↦ t·v1′, w1 ↦ λ·w1′
    let lo = mg.lo.min(mt.gauge.lo);
    let hi = mg.hi.max(mt.gauge.hi);
    let mx = mg.expand(lo, hi);
    let mtg = mt.gauge.expand(lo, hi);
    if (mtg.lo, mtg.hi) != (mp.lo, mp.hi) {
        return Err(GaugeError::Structural("windows of M~ and M' differ".into()));
    }
    let rm = mx.ring.clone();
    let img0 = mtg.apply_t(1, &v1p);
    let column = |wt: i64, lam: &Elt| -> Result<Vec<Elt>, GaugeError> {
        let (x, y) = if wt <= 0 {
            (iterate(&mx, 0, wt, &v0), iterate(&mtg, 0, wt, &img0))
        } else {
            let y = iterate(&mtg, 1, wt, &w1p);
            (iterate(&mx, 1, wt, &w1), y.iter().map(|c| rm.mul(c, lam)).collect())
        };
        let c = rm.inv(&x[0]).ok_or_else(|| GaugeError::Pipeline {
            weight: wt,
            detail: "M is not spanned by its generators here".into(),
        })?;
        Ok(y.iter().map(|e| rm.mul(e, &c)).collect())
    };
    let one = rm.one();
    let a = mtg.apply_gluing(&column(lo, &one)?).unwrap();
    let g = mx.apply_gluing(&mx.basis_vec(lo, 0)).unwrap();
    let bv: Vec<Elt> = column(hi, &one)?.iter().map(|c| rm.mul(c, &g[0])).collect();
    let i = (0..bv.len()).find(|&i| rm.val(&bv[i]) == 0).ok_or_else(|| GaugeError::Pipeline {
        weight: hi,
        detail: "gluing of M' misses the image of w1".into(),
    })?;
    let lam = rm.reduce(1).reduce_elt(&rm.mul(&a[i], &rm.inv(&bv[i]).unwrap()));
    let ft = GaugeMap {
        lo,
        hi,
        maps: (lo..=hi)
            .map(|wt| column(wt, &lam).map(|c| rm.from_columns(&[c], mtg.piece(wt).len())))
            .collect::<Result<_, _>>()?,
    };
    let fails = ft.check(&mx, &mtg);
    checks.push(Check::new("f: M → M~ commutes with u, t and the gluing", fails.is_empty(), fails));
    let fmaps: Vec<WMat> = (lo..=hi)
        .map(|wt| {
            let col = WittRing::column(ft.at(wt), 0);
            incl.preimage(&mp, &mtg, wt, &col)
                .map(|c| rm.from_columns(&[c], mp.piece(wt).len()))
                .ok_or_else(|| GaugeError::Pipeline {
                    weight: wt,
                    detail: "f does not land in M'".into(),
                })
        })
        .collect::<Result<_, _>>()?;
    let fmap = GaugeMap { lo, hi, maps: fmaps };
    let fails = fmap.check(&mx, &mp);
    checks.push(Check::new("f: M → M' is a morphism", fails.is_empty(), fails));
    let (delta, _) = mp.quotient(&fmap.image_gens())?;
    let dd = dims(&delta);
    if dd != [0, 0, 1, 0, 0] || delta.piece(1) != [1] {
        return Err(table_err(1, "delta{-1}", &dd, [0, 0, 1, 0, 0]));
    }
    checks.push(Check::new(
        "delta{-1} is F_q in weight 1 with u = t = 0",
        delta.u_kind(1) == "0" && delta.t_kind(1) == "0",
        vec![],
    ));
    let delta0 = delta.twist(1);
    let sections = global_sections(&delta0)?;
    checks.push(Check::new(
        "H0(delta{0}) = F_q and H1(delta{0}) = 0",
        sections == (f, 0),
        vec![format!("{sections:?}")],
    ));

    if p == 2 {
        checks.extend(shortcut(&w, &lambda, j, &mt, &mtg, &tgens, m)?);
    }
    mp = mp_labels;

    Ok(Pipeline {
        p,
        f,
        m,
        h_lattice: h,
        h: hq,
        m_gauge: mg,
        end_chain,
        nesting,
        m_tilde: mt.gauge.clone(),
        m_prime: mp,
        delta,
        lambda: lam,
        delta0_sections: sections,
        checks,
    })
}

/// For p = 2 the identity class gives a splitting O{−1}/p → M̃ whose composite to
/// M̃/M′ is an isomorphism.
fn shortcut(
    w: &WittRing,
    lambda: &[Elt],
    j: usize,
    mt: &super::lattice::LatticeQuotient,
    mtg: &Gauge,
    tgens: &[TorsionGen],
    m: u32,
) -> Result<Vec<Check>, GaugeError> {
    let p = w.p;
    let (lo, hi) = (mtg.lo, mtg.hi);
    let trace = |v: &[Elt]| {
        let mut s = w.zero();
        for (l, x) in lambda.iter().zip(v) {
            s = w.add(&s, &w.mul(l, x));
        }
        s
    };
    let ihat: Vec<Elt> = [0i128, -1, 1, 0].iter().map(|&c| w.from_int(c)).collect();
    let o = LatticeGauge::trivial(p, w.f)?.twist(-1);
    let oq = o.quotient(&o.scale(1), m)?;
    let og = oq.gauge.expand(lo, hi);
    let mut maps = Vec::new();
    let mut witness = Vec::new();
    for n in lo..=hi {
        let k = (n - 1).max(0) as u32;
        let g: Vec<Elt> = ihat.iter().map(|x| w.mul(x, &w.ppow_elt(k))).collect();
        let mut zeta = vec![w.zero(); 4];
        zeta[2] = w.ppow_elt(k + 1);
        let (a, ua) = w.split(&trace(&g)).unwrap();
        let (b, ub) = w.split(&trace(&zeta)).unwrap();
        if a < b {
            return Err(GaugeError::Unsupported("trace of the identity is not divisible enough".into()));
        }
        let c = w.mul(&w.ppow_elt(a - b), &w.mul(&ua, &w.inv(&ub).unwrap()));
        let z: Vec<Elt> = g.iter().zip(&zeta).map(|(x, y)| w.sub(x, &w.mul(&c, y))).collect();
        let cls = mt.class_of(n, &kernel_coords(&z, j)).ok_or_else(|| GaugeError::Pipeline {
            weight: n,
            detail: "corrected identity is not in D".into(),
        })?;
        let basis = oq.class_of(n, &WittRing::column(&o.at(n), 0)).unwrap();
        let binv = og.ring.inv(&basis[0]).unwrap();
        let col: Vec<Elt> = cls.iter().map(|x| og.ring.mul(x, &binv)).collect();
        witness.push(format!("w={n}: {col:?}"));
        maps.push(og.ring.from_columns(&[col], mtg.piece(n).len()));
    }
    let s = GaugeMap { lo, hi, maps };
    let mut out = Vec::new();
    let fails = s.check(&og, mtg);
    out.push(Check::new("s: O{-1}/p → M~ is a morphism", fails.is_empty(), fails));
    let mut gens: BTreeMap<i64, Vec<Vec<Elt>>> = BTreeMap::new();
    for g in tgens {
        gens.entry(g.weight).or_default().push(g.vector.clone());
    }
    let (lq, proj) = mtg.quotient(&gens)?;
    let comp = s.compose(&proj, &og.ring, &og);
    let ok = comp.check(&og, &lq).is_empty() && comp.is_iso(&og, &lq);
    out.push(Check::new("π∘s: O{-1}/p → M~/M' is an isomorphism", ok, witness));
    Ok(out)
}
