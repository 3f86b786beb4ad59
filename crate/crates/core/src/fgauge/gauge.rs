use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::witt::{Elt, WMat, WittRing};
use super::GaugeError;
use crate::linalg::fp;

// ---- finite W_m-modules ⊕ W/p^{e_j} ----
//
// Such a module embeds in W_m^r by x_j ↦ p^{m−e_j} x_j, which turns every question about
// submodules, kernels and cokernels into an exact Smith form over the chain ring W_m.

pub(super) fn norm(w: &WittRing, exps: &[u32], v: &[Elt]) -> Vec<Elt> {
    v.iter()
        .zip(exps)
        .map(|(x, &e)| {
            let q = w.ppow(e);
            x.iter().map(|c| c.rem_euclid(q)).collect()
        })
        .collect()
}

pub(super) fn norm_mat(w: &WittRing, tgt: &[u32], a: &WMat) -> WMat {
    let cols = a.first().map_or(0, |r| r.len());
    let cs: Vec<Vec<Elt>> = (0..cols).map(|j| norm(w, tgt, &WittRing::column(a, j))).collect();
    w.from_columns(&cs, tgt.len())
}

fn embed(w: &WittRing, exps: &[u32], v: &[Elt]) -> Vec<Elt> {
    v.iter().zip(exps).map(|(x, &e)| w.mul(x, &w.ppow_elt(w.m - e))).collect()
}

fn length(exps: &[u32]) -> u32 {
    exps.iter().sum()
}

struct SubMod {
    exps: Vec<u32>,
    gens: Vec<Vec<Elt>>,
    pinv: WMat,
    vals: Vec<u32>,
}

impl SubMod {
    fn new(w: &WittRing, amb: &[u32], gens: &[Vec<Elt>]) -> SubMod {
        let r = amb.len();
        if gens.is_empty() || r == 0 {
            return SubMod {
                exps: vec![],
                gens: vec![],
                pinv: w.mat_id(r),
                vals: vec![],
            };
        }
        let cols: Vec<Vec<Elt>> = gens.iter().map(|g| embed(w, amb, g)).collect();
        let e = w.from_columns(&cols, r);
        let s = w.snf(&e, r, cols.len());
        let mut exps = Vec::new();
        let mut out = Vec::new();
        let mut vals = Vec::new();
        for (i, &d) in s.vals.iter().enumerate() {
            if d >= w.m {
                break;
            }
            let z: Vec<Elt> = (0..r).map(|k| w.mul(&s.p[k][i], &w.ppow_elt(d))).collect();
            let y: Vec<Elt> = z.iter().zip(amb).map(|(x, &ej)| w.div_ppow(x, w.m - ej)).collect();
            out.push(norm(w, amb, &y));
            exps.push(w.m - d);
            vals.push(d);
        }
        SubMod {
            exps,
            gens: out,
            pinv: s.pinv,
            vals,
        }
    }

    fn coords(&self, w: &WittRing, amb: &[u32], y: &[Elt]) -> Option<Vec<Elt>> {
        let z = embed(w, amb, y);
        let c = w.mat_vec(&self.pinv, &z);
        let mut out = Vec::new();
        for (i, ci) in c.iter().enumerate() {
            if i < self.vals.len() {
                let d = self.vals[i];
                if w.val(ci) < d {
                    return None;
                }
                let x = w.div_ppow(ci, d);
                out.push(norm(w, &[self.exps[i]], &[x]).remove(0));
            } else if !w.is_zero(ci) {
                return None;
            }
        }
        Some(out)
    }
}

pub(super) struct QuotMod {
    pub exps: Vec<u32>,
    pub proj: WMat,
    pub sec: Vec<Vec<Elt>>,
}

impl QuotMod {
    pub fn new(w: &WittRing, amb: &[u32], gens: &[Vec<Elt>]) -> QuotMod {
        let r = amb.len();
        let mut cols: Vec<Vec<Elt>> = gens.to_vec();
        for (j, &e) in amb.iter().enumerate() {
            let mut v = vec![w.zero(); r];
            v[j] = w.ppow_elt(e);
            cols.push(v);
        }
        if r == 0 {
            return QuotMod {
                exps: vec![],
                proj: vec![],
                sec: vec![],
            };
        }
        let a = w.from_columns(&cols, r);
        let s = w.snf(&a, r, cols.len());
        let mut exps = Vec::new();
        let mut proj = Vec::new();
        let mut sec = Vec::new();
        for i in 0..r {
            let d = s.vals[i].min(w.m);
            if d == 0 {
                continue;
            }
            exps.push(d);
            proj.push(s.pinv[i].clone());
            sec.push(norm(w, amb, &WittRing::column(&s.p, i)));
        }
        QuotMod { exps, proj, sec }
    }
}

/// Generators of ker(a: ⊕W/p^{src} → ⊕W/p^{tgt}).
fn kernel(w: &WittRing, src: &[u32], tgt: &[u32], a: &WMat) -> Vec<Vec<Elt>> {
    let r = src.len();
    if r == 0 {
        return vec![];
    }
    let s = tgt.len();
    if s == 0 {
        return (0..r)
            .map(|j| {
                let mut v = vec![w.zero(); r];
                v[j] = w.one();
                v
            })
            .collect();
    }
    let ea: WMat = a
        .iter()
        .zip(tgt)
        .map(|(row, &e)| row.iter().map(|x| w.mul(x, &w.ppow_elt(w.m - e))).collect())
        .collect();
    let sn = w.snf(&ea, s, r);
    (0..r)
        .map(|i| {
            let d = sn.vals.get(i).copied().unwrap_or(w.m);
            let col = WittRing::column(&sn.qinv, i);
            let f = w.ppow_elt(w.m - d);
            norm(w, src, &col.iter().map(|x| w.mul(x, &f)).collect::<Vec<_>>())
        })
        .filter(|v| v.iter().any(|x| !w.is_zero(x)))
        .collect()
}

/// Some c with a·c = v, if v lies in the image.
fn solve_map(w: &WittRing, src: &[u32], tgt: &[u32], a: &WMat, v: &[Elt]) -> Option<Vec<Elt>> {
    let r = src.len();
    let s = tgt.len();
    if s == 0 {
        return Some(vec![w.zero(); r]);
    }
    let ea: WMat = a
        .iter()
        .zip(tgt)
        .map(|(row, &e)| row.iter().map(|x| w.mul(x, &w.ppow_elt(w.m - e))).collect())
        .collect();
    let ev = embed(w, tgt, v);
    if r == 0 {
        return ev.iter().all(|x| w.is_zero(x)).then(Vec::new);
    }
    let sn = w.snf(&ea, s, r);
    let c = w.mat_vec(&sn.pinv, &ev);
    let mut z = vec![w.zero(); r];
    for (i, ci) in c.iter().enumerate() {
        let d = sn.vals.get(i).copied().unwrap_or(w.m);
        if w.val(ci) < d {
            return None;
        }
        if i < r && d < w.m {
            z[i] = w.div_ppow(ci, d);
        }
    }
    Some(norm(w, src, &w.mat_vec(&sn.qinv, &z)))
}

fn is_zero_map(w: &WittRing, tgt: &[u32], a: &WMat) -> bool {
    norm_mat(w, tgt, a).iter().flatten().all(|x| w.is_zero(x))
}

fn is_iso(w: &WittRing, src: &[u32], tgt: &[u32], a: &WMat) -> bool {
    if length(src) != length(tgt) {
        return false;
    }
    let cols: Vec<Vec<Elt>> = (0..src.len()).map(|j| WittRing::column(a, j)).collect();
    QuotMod::new(w, tgt, &cols).exps.is_empty()
}

fn classify(w: &WittRing, src: &[u32], tgt: &[u32], a: &WMat) -> &'static str {
    if is_zero_map(w, tgt, a) {
        "0"
    } else if is_iso(w, src, tgt, a) {
        "~"
    } else if kernel(w, src, tgt, a).is_empty() {
        "mono"
    } else {
        let cols: Vec<Vec<Elt>> = (0..src.len()).map(|j| WittRing::column(a, j)).collect();
        if QuotMod::new(w, tgt, &cols).exps.is_empty() {
            "epi"
        } else {
            "*"
        }
    }
}

fn piece_name(q: u64, exps: &[u32]) -> String {
    if exps.is_empty() {
        return "0".into();
    }
    let mut count: BTreeMap<u32, usize> = BTreeMap::new();
    for &e in exps {
        *count.entry(e).or_default() += 1;
    }
    count
        .iter()
        .rev()
        .map(|(&e, &k)| {
            let base = if e == 1 { format!("F{q}") } else { format!("W{e}") };
            if k == 1 {
                base
            } else {
                format!("{base}^{k}")
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// Column-aligned table; the first column holds row names.
pub(crate) fn table(rows: &[Vec<String>]) -> String {
    let ncol = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncol)
        .map(|j| rows.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (j, c) in r.iter().enumerate() {
            if j > 0 {
                line.push_str("  ");
            }
            line.push_str(c);
            line.push_str(&" ".repeat(widths[j] - c.chars().count()));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Graded module over W_m[u,t]/(tu − p) in a weight window, optionally with its
/// gluing. Outside the window u is an isomorphism above `hi` and t below `lo`, and the
/// pieces there are identified with M_hi and M_lo.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gauge {
    pub ring: WittRing,
    pub lo: i64,
    pub hi: i64,
    /// M_w ≅ ⊕ W/p^{e}, for w in lo..=hi
    pub exps: Vec<Vec<u32>>,
    /// u: M_w → M_{w+1}, w in lo..hi
    pub u: Vec<WMat>,
    /// t: M_w → M_{w−1}, w in lo+1..=hi
    pub t: Vec<WMat>,
    /// φ-semilinear F: M_lo → M_hi, i.e. M[1/t]_0 → M[1/u]_0
    pub gluing: Option<WMat>,
    #[serde(default)]
    pub labels: Vec<Vec<String>>,
}

impl Gauge {
    pub fn new(
        ring: WittRing,
        lo: i64,
        hi: i64,
        exps: Vec<Vec<u32>>,
        u: Vec<WMat>,
        t: Vec<WMat>,
        gluing: Option<WMat>,
    ) -> Result<Gauge, GaugeError> {
        if hi < lo || exps.len() != (hi - lo + 1) as usize || u.len() != exps.len() - 1 || t.len() != exps.len() - 1 {
            return Err(GaugeError::Structural("window and matrix counts disagree".into()));
        }
        let n = exps.len();
        let mut g = Gauge {
            ring,
            lo,
            hi,
            exps,
            u,
            t,
            gluing,
            labels: vec![vec![]; n],
        };
        g.normalize();
        let v = g.validate();
        if v.is_empty() {
            Ok(g)
        } else {
            Err(GaugeError::Structural(v.join("; ")))
        }
    }

    fn normalize(&mut self) {
        let w = self.ring.clone();
        for i in 0..self.u.len() {
            self.u[i] = norm_mat(&w, &self.exps[i + 1], &self.u[i]);
            self.t[i] = norm_mat(&w, &self.exps[i], &self.t[i]);
        }
        if let Some(g) = &self.gluing {
            self.gluing = Some(norm_mat(&w, self.exps.last().unwrap(), g));
        }
    }

    fn idx(&self, w: i64) -> usize {
        (w.clamp(self.lo, self.hi) - self.lo) as usize
    }

    pub fn piece(&self, w: i64) -> &[u32] {
        &self.exps[self.idx(w)]
    }

    pub fn weights(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    /// u: M_w → M_{w+1} for any w.
    pub fn u_at(&self, w: i64) -> WMat {
        let r = &self.ring;
        if w < self.lo {
            r.mat_scalar(self.piece(self.lo).len(), &r.from_int(r.p as i128))
        } else if w >= self.hi {
            r.mat_id(self.piece(self.hi).len())
        } else {
            self.u[(w - self.lo) as usize].clone()
        }
    }

    /// t: M_w → M_{w−1} for any w.
    pub fn t_at(&self, w: i64) -> WMat {
        let r = &self.ring;
        if w <= self.lo {
            r.mat_id(self.piece(self.lo).len())
        } else if w > self.hi {
            r.mat_scalar(self.piece(self.hi).len(), &r.from_int(r.p as i128))
        } else {
            self.t[(w - self.lo - 1) as usize].clone()
        }
    }

    pub fn apply(&self, tgt_w: i64, a: &WMat, x: &[Elt]) -> Vec<Elt> {
        norm(&self.ring, self.piece(tgt_w), &self.ring.mat_vec(a, x))
    }

    pub fn apply_u(&self, w: i64, x: &[Elt]) -> Vec<Elt> {
        self.apply(w + 1, &self.u_at(w), x)
    }

    pub fn apply_t(&self, w: i64, x: &[Elt]) -> Vec<Elt> {
        self.apply(w - 1, &self.t_at(w), x)
    }

    /// F(x) = G·φ(x) for x ∈ M_lo.
    pub fn apply_gluing(&self, x: &[Elt]) -> Option<Vec<Elt>> {
        let g = self.gluing.as_ref()?;
        let fx: Vec<Elt> = x.iter().map(|c| self.ring.frob(c)).collect();
        Some(self.apply(self.hi, g, &fx))
    }

    pub fn is_zero_vec(&self, w: i64, x: &[Elt]) -> bool {
        norm(&self.ring, self.piece(w), x).iter().all(|c| self.ring.is_zero(c))
    }

    pub fn basis_vec(&self, w: i64, i: usize) -> Vec<Elt> {
        let mut v = vec![self.ring.zero(); self.piece(w).len()];
        v[i] = self.ring.one();
        v
    }

    /// Invariant violations: well-defined matrices, ut = tu = p, invertible gluing.
    pub fn validate(&self) -> Vec<String> {
        let r = &self.ring;
        let mut out = Vec::new();
        let well_defined = |a: &WMat, src: &[u32], tgt: &[u32]| {
            a.len() == tgt.len()
                && a.iter().all(|row| row.len() == src.len())
                && (0..src.len()).all(|j| {
                    let col: Vec<Elt> = a.iter().map(|row| r.mul(&row[j], &r.ppow_elt(src[j]))).collect();
                    norm(r, tgt, &col).iter().all(|x| r.is_zero(x))
                })
        };
        for w in self.lo..self.hi {
            if !well_defined(&self.u_at(w), self.piece(w), self.piece(w + 1)) {
                out.push(format!("u at weight {w} is not a module map"));
            }
            if !well_defined(&self.t_at(w + 1), self.piece(w + 1), self.piece(w)) {
                out.push(format!("t at weight {} is not a module map", w + 1));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for w in self.lo - 1..=self.hi + 1 {
            let n = self.piece(w).len();
            let pid = r.mat_scalar(n, &r.from_int(r.p as i128));
            let tu = r.mat_mul(&self.t_at(w + 1), &self.u_at(w), n);
            if norm_mat(r, self.piece(w), &r.mat_sub(&tu, &pid)).iter().flatten().any(|x| !r.is_zero(x)) {
                out.push(format!("t∘u ≠ p at weight {w}"));
            }
            let ut = r.mat_mul(&self.u_at(w - 1), &self.t_at(w), n);
            if norm_mat(r, self.piece(w), &r.mat_sub(&ut, &pid)).iter().flatten().any(|x| !r.is_zero(x)) {
                out.push(format!("u∘t ≠ p at weight {w}"));
            }
        }
        if let Some(g) = &self.gluing {
            if !well_defined(g, self.piece(self.lo), self.piece(self.hi)) {
                out.push("gluing is not a module map".into());
            } else {
                let mut a = self.piece(self.lo).to_vec();
                let mut b = self.piece(self.hi).to_vec();
                a.sort();
                b.sort();
                if a != b || !is_iso(r, self.piece(self.lo), self.piece(self.hi), g) {
                    out.push("gluing is not an isomorphism".into());
                }
            }
        }
        out
    }

    /// Largest w₋ with t an isomorphism out of every weight ≤ w₋, and smallest w₊ with
    /// u an isomorphism out of every weight ≥ w₊.
    pub fn coherence(&self) -> (i64, i64) {
        let r = &self.ring;
        let mut wm = self.lo;
        while wm < self.hi && is_iso(r, self.piece(wm + 1), self.piece(wm), &self.t_at(wm + 1)) {
            wm += 1;
        }
        let mut wp = self.hi;
        while wp > self.lo && is_iso(r, self.piece(wp - 1), self.piece(wp), &self.u_at(wp - 1)) {
            wp -= 1;
        }
        (wm, wp)
    }

    /// Number of cyclic summands per weight (the F_q-dimension for p-torsion gauges).
    pub fn dims(&self) -> Vec<(i64, usize)> {
        self.weights().map(|w| (w, self.piece(w).len())).collect()
    }

    pub fn u_kind(&self, w: i64) -> &'static str {
        classify(&self.ring, self.piece(w), self.piece(w + 1), &self.u_at(w))
    }

    pub fn t_kind(&self, w: i64) -> &'static str {
        classify(&self.ring, self.piece(w), self.piece(w - 1), &self.t_at(w))
    }

    /// Materialize the stable pieces so the window becomes [lo, hi].
    pub fn expand(&self, lo: i64, hi: i64) -> Gauge {
        let lo = lo.min(self.lo);
        let hi = hi.max(self.hi);
        let ws: Vec<i64> = (lo..=hi).collect();
        let exps = ws.iter().map(|&w| self.piece(w).to_vec()).collect();
        let u = ws[..ws.len() - 1].iter().map(|&w| self.u_at(w)).collect();
        let t = ws[1..].iter().map(|&w| self.t_at(w)).collect();
        let labels = ws
            .iter()
            .map(|&w| {
                if w < self.lo || w > self.hi {
                    vec![]
                } else {
                    self.labels.get(self.idx(w)).cloned().unwrap_or_default()
                }
            })
            .collect();
        Gauge {
            ring: self.ring.clone(),
            lo,
            hi,
            exps,
            u,
            t,
            gluing: self.gluing.clone(),
            labels,
        }
    }

    /// X{k}: (X{k})_n = X_{n+k}.
    pub fn twist(&self, k: i64) -> Gauge {
        Gauge {
            lo: self.lo - k,
            hi: self.hi - k,
            ..self.clone()
        }
    }

    /// Sub-gauge generated by the given elements, with its inclusion.
    pub fn subgauge(&self, gens: &BTreeMap<i64, Vec<Vec<Elt>>>) -> Result<(Gauge, GaugeMap), GaugeError> {
        let r = &self.ring;
        let n = (self.hi - self.lo + 1) as usize;
        let mut cur: Vec<Vec<Vec<Elt>>> = vec![vec![]; n];
        for (&w, gs) in gens {
            if w < self.lo || w > self.hi {
                return Err(GaugeError::Structural(format!("generator outside the window at weight {w}")));
            }
            for g in gs {
                cur[(w - self.lo) as usize].push(norm(r, self.piece(w), g));
            }
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                let w = self.lo + i as i64;
                let mut cand = Vec::new();
                if i > 0 {
                    cand.extend(cur[i - 1].iter().map(|x| self.apply_u(w - 1, x)));
                }
                if i + 1 < n {
                    cand.extend(cur[i + 1].iter().map(|x| self.apply_t(w + 1, x)));
                }
                for c in cand {
                    let s = SubMod::new(r, self.piece(w), &cur[i]);
                    if s.coords(r, self.piece(w), &c).is_none() {
                        cur[i].push(c);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let subs: Vec<SubMod> = (0..n)
            .map(|i| SubMod::new(r, self.piece(self.lo + i as i64), &cur[i]))
            .collect();
        let coords = |i: usize, x: &[Elt]| -> Result<Vec<Elt>, GaugeError> {
            subs[i]
                .coords(r, &self.exps[i], x)
                .ok_or_else(|| GaugeError::Structural(format!("sub-gauge not closed at weight {}", self.lo + i as i64)))
        };
        let mut u = Vec::new();
        let mut t = Vec::new();
        for i in 0..n - 1 {
            let w = self.lo + i as i64;
            let cols: Vec<Vec<Elt>> = subs[i]
                .gens
                .iter()
                .map(|g| coords(i + 1, &self.apply_u(w, g)))
                .collect::<Result<_, _>>()?;
            u.push(r.from_columns(&cols, subs[i + 1].exps.len()));
            let cols: Vec<Vec<Elt>> = subs[i + 1]
                .gens
                .iter()
                .map(|g| coords(i, &self.apply_t(w + 1, g)))
                .collect::<Result<_, _>>()?;
            t.push(r.from_columns(&cols, subs[i].exps.len()));
        }
        let gluing = match &self.gluing {
            None => None,
            Some(_) => {
                let cols: Vec<Vec<Elt>> = subs[0]
                    .gens
                    .iter()
                    .map(|g| {
                        let fg = self.apply_gluing(g).unwrap();
                        subs[n - 1].coords(r, &self.exps[n - 1], &fg).ok_or_else(|| {
                            GaugeError::Structural("sub-gauge is not stable under the gluing".into())
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Some(r.from_columns(&cols, subs[n - 1].exps.len()))
            }
        };
        let incl = GaugeMap {
            lo: self.lo,
            hi: self.hi,
            maps: subs.iter().zip(&self.exps).map(|(s, e)| r.from_columns(&s.gens, e.len())).collect(),
        };
        let g = Gauge::new(r.clone(), self.lo, self.hi, subs.into_iter().map(|s| s.exps).collect(), u, t, gluing)?;
        Ok((g, incl))
    }

    /// Quotient by the sub-gauge generated by `gens`, with the projection.
    pub fn quotient(&self, gens: &BTreeMap<i64, Vec<Vec<Elt>>>) -> Result<(Gauge, GaugeMap), GaugeError> {
        let r = &self.ring;
        let (_, incl) = self.subgauge(gens)?;
        let n = self.exps.len();
        let qs: Vec<QuotMod> = (0..n)
            .map(|i| {
                let cols: Vec<Vec<Elt>> = (0..incl.maps[i].first().map_or(0, |x| x.len()))
                    .map(|j| WittRing::column(&incl.maps[i], j))
                    .collect();
                QuotMod::new(r, &self.exps[i], &cols)
            })
            .collect();
        let sec = |i: usize| r.from_columns(&qs[i].sec, self.exps[i].len());
        let mut u = Vec::new();
        let mut t = Vec::new();
        for i in 0..n - 1 {
            let w = self.lo + i as i64;
            let a = r.mat_mul(&qs[i + 1].proj, &r.mat_mul(&self.u_at(w), &sec(i), qs[i].exps.len()), qs[i].exps.len());
            u.push(a);
            let b = r.mat_mul(&qs[i].proj, &r.mat_mul(&self.t_at(w + 1), &sec(i + 1), qs[i + 1].exps.len()), qs[i + 1].exps.len());
            t.push(b);
        }
        let gluing = self.gluing.as_ref().map(|g| {
            let fs = r.mat_frob(&sec(0));
            r.mat_mul(&qs[n - 1].proj, &r.mat_mul(g, &fs, qs[0].exps.len()), qs[0].exps.len())
        });
        let proj = GaugeMap {
            lo: self.lo,
            hi: self.hi,
            maps: qs.iter().map(|q| q.proj.clone()).collect(),
        };
        let g = Gauge::new(r.clone(), self.lo, self.hi, qs.into_iter().map(|q| q.exps).collect(), u, t, gluing)?;
        Ok((g, proj))
    }

    /// Classes killed by u but not divisible by t, and killed by t but not divisible by
    /// u. Errors when such a class is only defined up to a t- (or u-) multiple.
    pub fn torsion_generators(&self) -> Result<Vec<TorsionGen>, GaugeError> {
        let r = &self.ring;
        let mut out = Vec::new();
        for w in self.weights() {
            for side in ['u', 't'] {
                let (k, im) = if side == 'u' {
                    let k = kernel(r, self.piece(w), self.piece(w + 1), &self.u_at(w));
                    let a = self.t_at(w + 1);
                    (k, (0..self.piece(w + 1).len()).map(|j| WittRing::column(&a, j)).collect::<Vec<_>>())
                } else {
                    let k = kernel(r, self.piece(w), self.piece(w - 1), &self.t_at(w));
                    let a = self.u_at(w - 1);
                    (k, (0..self.piece(w - 1).len()).map(|j| WittRing::column(&a, j)).collect::<Vec<_>>())
                };
                let amb = self.piece(w);
                let ks = SubMod::new(r, amb, &k);
                let lk = length(&ks.exps);
                if lk == 0 {
                    continue;
                }
                let li = length(&SubMod::new(r, amb, &im).exps);
                let both: Vec<Vec<Elt>> = k.iter().chain(im.iter()).cloned().collect();
                let lki = length(&SubMod::new(r, amb, &both).exps);
                if lki == li {
                    continue;
                }
                if lki != lk + li {
                    return Err(GaugeError::Unsupported(format!(
                        "{side}-torsion at weight {w} meets the image of {}",
                        if side == 'u' { 't' } else { 'u' }
                    )));
                }
                for v in ks.gens {
                    out.push(TorsionGen {
                        weight: w,
                        killed_by: side,
                        vector: v,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Sub-gauge generated by the u- and t-torsion classes of `torsion_generators`.
    pub fn torsion_part(&self) -> Result<(Gauge, GaugeMap, Vec<TorsionGen>), GaugeError> {
        let gens = self.torsion_generators()?;
        let mut map: BTreeMap<i64, Vec<Vec<Elt>>> = BTreeMap::new();
        for g in &gens {
            map.entry(g.weight).or_default().push(g.vector.clone());
        }
        let (g, incl) = self.subgauge(&map)?;
        Ok((g, incl, gens))
    }

    /// Deterministic text diagram: weights, pieces, u and t annotations, labels.
    pub fn render(&self) -> String {
        let q = self.ring.q();
        let mut rows = vec![
            vec!["w".to_string()],
            vec!["M_w".to_string()],
            vec!["u: w→w+1".to_string()],
            vec!["t: w→w-1".to_string()],
        ];
        let labelled = self.labels.iter().any(|l| !l.is_empty());
        if labelled {
            rows.push(vec!["gens".to_string()]);
        }
        for w in self.weights() {
            rows[0].push(w.to_string());
            rows[1].push(piece_name(q, self.piece(w)));
            rows[2].push(self.u_kind(w).to_string());
            rows[3].push(self.t_kind(w).to_string());
            if labelled {
                let l = &self.labels[self.idx(w)];
                rows[4].push(if l.is_empty() { "·".into() } else { l.join(",") });
            }
        }
        table(&rows)
    }

    pub fn residue_dims(&self) -> Vec<usize> {
        self.weights().map(|w| self.piece(w).len()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionGen {
    pub weight: i64,
    pub killed_by: char,
    pub vector: Vec<Elt>,
}

/// Weightwise matrices X_w → Y_w on a common window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeMap {
    pub lo: i64,
    pub hi: i64,
    pub maps: Vec<WMat>,
}

impl GaugeMap {
    pub fn at(&self, w: i64) -> &WMat {
        &self.maps[(w.clamp(self.lo, self.hi) - self.lo) as usize]
    }

    /// Failures of commuting with u, t and the gluing.
    pub fn check(&self, x: &Gauge, y: &Gauge) -> Vec<String> {
        let r = &x.ring;
        let mut out = Vec::new();
        if (x.lo, x.hi) != (self.lo, self.hi) || (y.lo, y.hi) != (self.lo, self.hi) {
            return vec!["windows differ".into()];
        }
        let eq = |w: i64, a: &WMat, b: &WMat| norm_mat(r, y.piece(w), &r.mat_sub(a, b)).iter().flatten().all(|c| r.is_zero(c));
        for w in self.lo - 1..=self.hi {
            let nx = x.piece(w).len();
            let a = r.mat_mul(self.at(w + 1), &x.u_at(w), nx);
            let b = r.mat_mul(&y.u_at(w), self.at(w), nx);
            if !eq(w + 1, &a, &b) {
                out.push(format!("does not commute with u at weight {w}"));
            }
            let nx = x.piece(w + 1).len();
            let a = r.mat_mul(self.at(w), &x.t_at(w + 1), nx);
            let b = r.mat_mul(&y.t_at(w + 1), self.at(w + 1), nx);
            if !eq(w, &a, &b) {
                out.push(format!("does not commute with t at weight {}", w + 1));
            }
        }
        if let (Some(gx), Some(gy)) = (&x.gluing, &y.gluing) {
            let nx = x.piece(x.lo).len();
            let a = r.mat_mul(gy, &r.mat_frob(self.at(self.lo)), nx);
            let b = r.mat_mul(self.at(self.hi), gx, nx);
            if !eq(self.hi, &a, &b) {
                out.push("does not commute with the gluing".into());
            }
        }
        out
    }

    /// Some x ∈ X_w with f(x) = v.
    pub fn preimage(&self, x: &Gauge, y: &Gauge, w: i64, v: &[Elt]) -> Option<Vec<Elt>> {
        solve_map(&x.ring, x.piece(w), y.piece(w), self.at(w), v)
    }

    /// Isomorphism in every weight (stable weights included).
    pub fn is_iso(&self, x: &Gauge, y: &Gauge) -> bool {
        (self.lo..=self.hi).all(|w| is_iso(&x.ring, x.piece(w), y.piece(w), self.at(w)))
    }

    pub fn compose(&self, after: &GaugeMap, ring: &WittRing, src: &Gauge) -> GaugeMap {
        GaugeMap {
            lo: self.lo,
            hi: self.hi,
            maps: (self.lo..=self.hi)
                .map(|w| ring.mat_mul(after.at(w), self.at(w), src.piece(w).len()))
                .collect(),
        }
    }

    /// Image generators, weight by weight.
    pub fn image_gens(&self) -> BTreeMap<i64, Vec<Vec<Elt>>> {
        (self.lo..=self.hi)
            .map(|w| {
                let a = self.at(w);
                let cols = a.first().map_or(0, |r| r.len());
                (w, (0..cols).map(|j| WittRing::column(a, j)).collect())
            })
            .collect()
    }
}

fn residue_block(w: &WittRing, a: &WMat, cols: usize) -> Vec<Vec<u64>> {
    let f = w.f;
    let mut out = vec![vec![0u64; f * cols]; f * a.len()];
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let b = w.residue_mul_matrix(x);
            for (bi, brow) in b.iter().enumerate() {
                for (bj, &v) in brow.iter().enumerate() {
                    out[f * i + bi][f * j + bj] = v;
                }
            }
        }
    }
    out
}

/// (dim H⁰, dim H¹) over F_p of the fiber of M_0 → M[1/u]_0, x ↦ loc_u(x) − F(loc_t(x)),
/// computed on X/p.
pub fn global_sections(x: &Gauge) -> Result<(usize, usize), GaugeError> {
    let g = x
        .gluing
        .as_ref()
        .ok_or_else(|| GaugeError::Structural("global sections need the gluing".into()))?;
    let r = &x.ring;
    let p = r.p;
    let f = r.f;
    let n0 = x.piece(0).len();
    let nhi = x.piece(x.hi).len();
    let nlo = x.piece(x.lo).len();
    let mut lu = r.mat_id(n0);
    for w in 0..x.hi.max(0) {
        lu = r.mat_mul(&x.u_at(w), &lu, n0);
    }
    let mut lt = r.mat_id(n0);
    for w in (x.lo.min(0) + 1..=0).rev() {
        lt = r.mat_mul(&x.t_at(w), &lt, n0);
    }
    let src = f * n0;
    let tgt = f * nhi;
    if src == 0 || tgt == 0 {
        return Ok((src, tgt));
    }
    let u = residue_block(r, &lu, n0);
    let t = residue_block(r, &lt, n0);
    let phi = r.residue_frob_matrix();
    let gb = residue_block(r, g, nlo);
    // G·Φ·T with Φ acting blockwise on M_lo
    let mut phit = vec![vec![0u64; src]; f * nlo];
    for blk in 0..nlo {
        for i in 0..f {
            for j in 0..src {
                let mut s = 0;
                for k in 0..f {
                    s += phi[i][k] * t[f * blk + k][j] % p;
                }
                phit[f * blk + i][j] = s % p;
            }
        }
    }
    let mut delta = vec![vec![0u64; src]; tgt];
    for i in 0..tgt {
        for j in 0..src {
            let mut s = 0;
            for k in 0..f * nlo {
                s += gb[i][k] * phit[k][j] % p;
            }
            delta[i][j] = (u[i][j] + p - s % p) % p;
        }
    }
    let rk = fp::rank(&delta, p);
    Ok((src - rk, tgt - rk))
}
