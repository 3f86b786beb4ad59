use serde::{Deserialize, Serialize};

use super::gauge::{norm, table, Gauge, QuotMod};
use super::witt::{max_precision, Elt, WMat, WittRing};
use super::GaugeError;

/// ψ = p^{−shift}·matrix·σ on W(k)^r.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frob {
    pub matrix: WMat,
    pub shift: i64,
}

fn cols(a: &WMat) -> Vec<Vec<Elt>> {
    let c = a.first().map_or(0, |r| r.len());
    (0..c).map(|j| WittRing::column(a, j)).collect()
}

/// Full-rank lattice P·diag(p^d)·W^r with P invertible.
struct Lat {
    p: WMat,
    pinv: WMat,
    d: Vec<u32>,
}

impl Lat {
    fn new(w: &WittRing, r: usize, gens: &[Vec<Elt>]) -> Result<Lat, GaugeError> {
        if r == 0 {
            return Ok(Lat {
                p: vec![],
                pinv: vec![],
                d: vec![],
            });
        }
        if gens.len() < r {
            return Err(GaugeError::Structural("lattice has too few generators".into()));
        }
        let s = w.snf(&w.from_columns(gens, r), r, gens.len());
        // anything this divisible is a rank deficiency at the working precision
        if s.vals.iter().any(|&v| v > w.m / 2) {
            return Err(GaugeError::Structural("generators do not span a full-rank lattice".into()));
        }
        Ok(Lat {
            p: s.p,
            pinv: s.pinv,
            d: s.vals,
        })
    }

    fn basis(&self, w: &WittRing) -> WMat {
        self.p
            .iter()
            .map(|row| row.iter().zip(&self.d).map(|(x, &d)| w.mul(x, &w.ppow_elt(d))).collect())
            .collect()
    }

    fn coords(&self, w: &WittRing, x: &[Elt]) -> Option<Vec<Elt>> {
        let c = w.mat_vec(&self.pinv, x);
        c.iter()
            .zip(&self.d)
            .map(|(ci, &d)| (w.val(ci) >= d).then(|| w.div_ppow(ci, d)))
            .collect()
    }

    fn contains(&self, w: &WittRing, gens: &[Vec<Elt>]) -> bool {
        gens.iter().all(|g| self.coords(w, g).is_some())
    }

    fn length(&self) -> u32 {
        self.d.iter().sum()
    }
}

fn kron_vec(w: &WittRing, a: &[Elt], b: &[Elt]) -> Vec<Elt> {
    a.iter().flat_map(|x| b.iter().map(move |y| w.mul(x, y))).collect()
}

fn kron_mat(w: &WittRing, a: &WMat, b: &WMat) -> WMat {
    let mut out = Vec::new();
    for ra in a {
        for rb in b {
            out.push(ra.iter().flat_map(|x| rb.iter().map(move |y| w.mul(x, y))).collect());
        }
    }
    out
}

fn transpose(a: &WMat) -> WMat {
    cols(a)
}

/// Decreasing chain of lattices L_n ⊆ W(k)^r with pL_n ⊆ L_{n+1}, stored on [lo, hi]:
/// L_n = L_lo below the window and L_n = p^{n−hi}L_hi above it. As a gauge, t is the
/// inclusion L_n → L_{n−1} and u is multiplication by p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGauge {
    pub ring: WittRing,
    pub rank: usize,
    pub lo: i64,
    pub hi: i64,
    /// basis matrices (columns) of L_lo, …, L_hi
    pub lattices: Vec<WMat>,
    pub frob: Option<Frob>,
}

impl LatticeGauge {
    /// W(F_q) at the largest precision that fits the coefficient type.
    pub fn working_ring(p: u64, f: usize) -> Result<WittRing, GaugeError> {
        WittRing::new(p, f, max_precision(p))
    }

    pub fn new(ring: WittRing, rank: usize, lo: i64, lattices: Vec<WMat>, frob: Option<Frob>) -> Result<Self, GaugeError> {
        if lattices.is_empty() {
            return Err(GaugeError::Structural("empty window".into()));
        }
        let hi = lo + lattices.len() as i64 - 1;
        let mut ls = Vec::new();
        for (i, l) in lattices.iter().enumerate() {
            let l = ring.reduce_mat(l);
            let lat = Lat::new(&ring, rank, &cols(&l)).map_err(|e| GaugeError::Validation {
                weight: lo + i as i64,
                detail: e.to_string(),
            })?;
            ls.push(lat.basis(&ring));
        }
        let frob = frob.map(|f| Frob {
            matrix: ring.reduce_mat(&f.matrix),
            shift: f.shift,
        });
        let g = LatticeGauge {
            ring,
            rank,
            lo,
            hi,
            lattices: ls,
            frob,
        };
        g.check()?;
        Ok(g)
    }

    /// Rees gauge of Fil^0 = W^r ⊇ Fil^1 ⊇ … ⊇ Fil^N, each given by generator columns.
    pub fn rees_of_filtration(p: u64, f: usize, rank: usize, fils: &[WMat], frob: Option<Frob>) -> Result<Self, GaugeError> {
        let ring = Self::working_ring(p, f)?;
        let mut ls = vec![ring.mat_id(rank)];
        ls.extend(fils.iter().cloned());
        Self::new(ring, rank, 0, ls, frob)
    }

    /// The unit O: W in every weight ≤ 0, ψ = σ.
    pub fn trivial(p: u64, f: usize) -> Result<Self, GaugeError> {
        let ring = Self::working_ring(p, f)?;
        let id = ring.mat_id(1);
        Self::new(
            ring,
            1,
            0,
            vec![id.clone()],
            Some(Frob {
                matrix: id,
                shift: 0,
            }),
        )
    }

    fn lat(&self, n: i64) -> Lat {
        Lat::new(&self.ring, self.rank, &cols(&self.at(n))).expect("validated lattice")
    }

    /// Basis of L_n for any n.
    pub fn at(&self, n: i64) -> WMat {
        if n <= self.lo {
            self.lattices[0].clone()
        } else if n > self.hi {
            let k = (n - self.hi) as u32;
            self.ring.mat_scale(self.lattices.last().unwrap(), &self.ring.ppow_elt(k))
        } else {
            self.lattices[(n - self.lo) as usize].clone()
        }
    }

    fn apply_frob(&self, fr: &Frob, v: &[Elt], extra: u32) -> Vec<Elt> {
        let w = &self.ring;
        let sv: Vec<Elt> = v.iter().map(|x| w.frob(x)).collect();
        let y = w.mat_vec(&fr.matrix, &sv);
        y.iter().map(|x| w.mul(x, &w.ppow_elt(extra))).collect()
    }

    fn check(&self) -> Result<(), GaugeError> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some((weight, detail)) => Err(GaugeError::Validation { weight, detail }),
        }
    }

    /// Violations of L_n ⊇ L_{n+1} ⊇ pL_n and of p^{hi−s}Ψσ(L_lo) = L_hi.
    pub fn validate(&self) -> Vec<(i64, String)> {
        let w = &self.ring;
        let mut out = Vec::new();
        for n in self.lo..self.hi {
            let a = self.lat(n);
            let b = self.lat(n + 1);
            if !a.contains(w, &cols(&self.at(n + 1))) {
                out.push((n + 1, "not contained in the previous step".into()));
            }
            let pa = w.mat_scale(&self.at(n), &w.ppow_elt(1));
            if !b.contains(w, &cols(&pa)) {
                out.push((n + 1, "does not contain p times the previous step".into()));
            }
        }
        if let Some(fr) = &self.frob {
            if fr.matrix.len() != self.rank {
                out.push((self.hi, "Frobenius matrix has the wrong size".into()));
                return out;
            }
            let e = self.hi - fr.shift;
            let (img, tgt): (Vec<Vec<Elt>>, WMat) = if e >= 0 {
                (cols(&self.at(self.lo)).iter().map(|v| self.apply_frob(fr, v, e as u32)).collect(), self.at(self.hi))
            } else {
                (
                    cols(&self.at(self.lo)).iter().map(|v| self.apply_frob(fr, v, 0)).collect(),
                    w.mat_scale(&self.at(self.hi), &w.ppow_elt((-e) as u32)),
                )
            };
            let ok = match (Lat::new(w, self.rank, &img), Lat::new(w, self.rank, &cols(&tgt))) {
                (Ok(a), Ok(b)) => a.contains(w, &cols(&tgt)) && b.contains(w, &img),
                _ => false,
            };
            if !ok {
                out.push((self.hi, "Frobenius does not carry L_lo onto the stable top lattice".into()));
            }
        }
        out
    }

    pub fn expand(&self, lo: i64, hi: i64) -> LatticeGauge {
        let lo = lo.min(self.lo);
        let hi = hi.max(self.hi);
        LatticeGauge {
            lo,
            hi,
            lattices: (lo..=hi).map(|n| self.at(n)).collect(),
            ..self.clone()
        }
    }

    /// X{k} with (X{k})_n = X_{n+k} and ψ multiplied by p^k.
    pub fn twist(&self, k: i64) -> LatticeGauge {
        LatticeGauge {
            lo: self.lo - k,
            hi: self.hi - k,
            frob: self.frob.as_ref().map(|f| Frob {
                matrix: f.matrix.clone(),
                shift: f.shift - k,
            }),
            ..self.clone()
        }
    }

    /// p^k·X.
    pub fn scale(&self, k: u32) -> LatticeGauge {
        let c = self.ring.ppow_elt(k);
        LatticeGauge {
            lattices: self.lattices.iter().map(|l| self.ring.mat_scale(l, &c)).collect(),
            ..self.clone()
        }
    }

    /// A(X) for A commuting with ψ.
    pub fn image(&self, a: &WMat) -> Result<LatticeGauge, GaugeError> {
        let ls = self.lattices.iter().map(|l| self.ring.mat_mul(a, l, self.rank)).collect();
        Self::new(self.ring.clone(), self.rank, self.lo, ls, self.frob.clone())
    }

    /// (X⊗Y)_n = Σ_a X_a ⊗ Y_{n−a}, basis e_i⊗f_j at index i·rank(Y)+j.
    pub fn tensor(&self, o: &LatticeGauge) -> Result<LatticeGauge, GaugeError> {
        let w = &self.ring;
        let r = self.rank * o.rank;
        let mut ls = Vec::new();
        for n in self.lo + o.lo..=self.hi + o.hi {
            let mut gens = Vec::new();
            for a in self.lo..=self.hi {
                let ya = cols(&o.at(n - a));
                for x in cols(&self.at(a)) {
                    for y in &ya {
                        gens.push(kron_vec(w, &x, y));
                    }
                }
            }
            ls.push(Lat::new(w, r, &gens)?.basis(w));
        }
        let frob = match (&self.frob, &o.frob) {
            (Some(a), Some(b)) => Some(Frob {
                matrix: kron_mat(w, &a.matrix, &b.matrix),
                shift: a.shift + b.shift,
            }),
            _ => None,
        };
        Self::new(w.clone(), r, self.lo + o.lo, ls, frob)
    }

    /// (X^∨)_n = {f : f(X_a) ⊆ p^{max(a+n,0)}W for all a}, in the dual basis.
    pub fn dual(&self) -> Result<LatticeGauge, GaugeError> {
        let w = &self.ring;
        let r = self.rank;
        let mut ls = Vec::new();
        for n in -self.hi..=-self.lo {
            let c: Vec<u32> = (self.lo..=self.hi).map(|a| (a + n).max(0) as u32).collect();
            let cmax = *c.iter().max().unwrap();
            let mut gens = Vec::new();
            for (a, &ca) in (self.lo..=self.hi).zip(&c) {
                let s = w.ppow_elt(cmax - ca);
                gens.extend(cols(&w.mat_scale(&self.at(a), &s)));
            }
            let nl = Lat::new(w, r, &gens)?;
            if nl.d.iter().any(|&d| d > cmax) {
                return Err(GaugeError::Unsupported("dual lattice leaves W^r".into()));
            }
            let dual_cols: Vec<Vec<Elt>> = (0..r)
                .map(|i| nl.pinv[i].iter().map(|x| w.mul(x, &w.ppow_elt(cmax - nl.d[i]))).collect())
                .collect();
            ls.push(w.from_columns(&dual_cols, r));
        }
        let frob = match &self.frob {
            None => None,
            Some(fr) => {
                let s = w.snf(&fr.matrix, r, r);
                let k = *s.vals.iter().max().unwrap_or(&0);
                let dinv: WMat = (0..r)
                    .map(|i| {
                        let mut row = vec![w.zero(); r];
                        row[i] = w.ppow_elt(k - s.vals[i]);
                        row
                    })
                    .collect();
                // p^k Ψ^{-1} = Q^{-1}·p^k D^{-1}·P^{-1}
                let pk_inv = w.mat_mul(&w.mat_mul(&s.qinv, &dinv, r), &s.pinv, r);
                Some(Frob {
                    matrix: transpose(&pk_inv),
                    shift: k as i64 - fr.shift,
                })
            }
        };
        Self::new(w.clone(), r, -self.hi, ls, frob)
    }

    /// Intersection with ker λ, in the basis e_k − (λ_k/λ_j)e_j (k ≠ j) where λ_j is
    /// the first unit entry; coordinates are the ambient ones with index j dropped.
    pub fn restrict_to_kernel(&self, lambda: &[Elt]) -> Result<(LatticeGauge, usize), GaugeError> {
        let w = &self.ring;
        let r = self.rank;
        let lambda: Vec<Elt> = lambda.iter().map(|x| w.reduce_elt(x)).collect();
        let j = (0..r)
            .find(|&k| w.val(&lambda[k]) == 0)
            .ok_or_else(|| GaugeError::Unsupported("functional has no unit coefficient".into()))?;
        let lj_inv = w.inv(&lambda[j]).unwrap();
        let drop = |v: &[Elt]| -> Vec<Elt> { v.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect() };
        let mut ls = Vec::new();
        for n in self.lo..=self.hi {
            let b = self.at(n);
            let row: Vec<Elt> = (0..r)
                .map(|c| {
                    let mut acc = w.zero();
                    for k in 0..r {
                        acc = w.add(&acc, &w.mul(&lambda[k], &b[k][c]));
                    }
                    acc
                })
                .collect();
            let s = w.snf(&vec![row], 1, r);
            let bq = w.mat_mul(&b, &s.qinv, r);
            let gens: Vec<Vec<Elt>> = (1..r).map(|c| drop(&WittRing::column(&bq, c))).collect();
            ls.push(Lat::new(w, r - 1, &gens)?.basis(w));
        }
        let frob = match &self.frob {
            None => None,
            Some(fr) => {
                // columns of the embedding K → W^r
                let e: Vec<Vec<Elt>> = (0..r)
                    .filter(|&k| k != j)
                    .map(|k| {
                        let mut v = vec![w.zero(); r];
                        v[k] = w.one();
                        v[j] = w.neg(&w.mul(&lambda[k], &lj_inv));
                        v
                    })
                    .collect();
                let em = w.from_columns(&e, r);
                let img = w.mat_mul(&fr.matrix, &w.mat_frob(&em), r - 1);
                for c in cols(&img) {
                    let mut acc = w.zero();
                    for k in 0..r {
                        acc = w.add(&acc, &w.mul(&lambda[k], &c[k]));
                    }
                    if !w.is_zero(&acc) {
                        return Err(GaugeError::Structural("kernel is not Frobenius-stable".into()));
                    }
                }
                let m: Vec<Vec<Elt>> = cols(&img).iter().map(|c| drop(c)).collect();
                Some(Frob {
                    matrix: w.from_columns(&m, r - 1),
                    shift: fr.shift,
                })
            }
        };
        Ok((Self::new(w.clone(), r - 1, self.lo, ls, frob)?, j))
    }

    /// X/(Y + p^m X) as a gauge over W_m, with the gluing induced by ψ.
    pub fn quotient(&self, sub: &LatticeGauge, m: u32) -> Result<LatticeQuotient, GaugeError> {
        if sub.rank != self.rank {
            return Err(GaugeError::Structural("ranks differ".into()));
        }
        if m == 0 || m > self.ring.m / 2 {
            return Err(GaugeError::Structural(format!("precision {m} out of range")));
        }
        let w = &self.ring;
        let rm = w.reduce(m);
        let r = self.rank;
        let mut lo = self.lo.min(sub.lo);
        let mut hi = self.hi.max(sub.hi);
        if let Some(fr) = &self.frob {
            hi = hi.max(fr.shift);
        }
        if lo == hi {
            lo -= 1;
        }
        let x = self.expand(lo, hi);
        let y = sub.expand(lo, hi);
        let amb = vec![m; r];
        let mut quots = Vec::new();
        for n in lo..=hi {
            let l = x.lat(n);
            let rel: Vec<Vec<Elt>> = cols(&y.at(n))
                .iter()
                .map(|v| l.coords(w, v).map(|c| rm.reduce_mat(&vec![c]).remove(0)))
                .collect::<Option<_>>()
                .ok_or_else(|| GaugeError::Validation {
                    weight: n,
                    detail: "not a sub-lattice".into(),
                })?;
            quots.push(QuotMod::new(&rm, &amb, &rel));
        }
        let coords_mat = |tgt: i64, vs: &[Vec<Elt>]| -> WMat {
            let l = x.lat(tgt);
            let cs: Vec<Vec<Elt>> = vs
                .iter()
                .map(|v| rm.reduce_mat(&vec![l.coords(w, v).expect("containment was validated")]).remove(0))
                .collect();
            rm.from_columns(&cs, r)
        };
        let sec = |i: usize| rm.from_columns(&quots[i].sec, r);
        let k = |i: usize| quots[i].exps.len();
        let mut u = Vec::new();
        let mut t = Vec::new();
        for (i, n) in (lo..hi).enumerate() {
            let pb: Vec<Vec<Elt>> = cols(&w.mat_scale(&x.at(n), &w.ppow_elt(1)));
            let um = coords_mat(n + 1, &pb);
            u.push(rm.mat_mul(&quots[i + 1].proj, &rm.mat_mul(&um, &sec(i), k(i)), k(i)));
            let tm = coords_mat(n, &cols(&x.at(n + 1)));
            t.push(rm.mat_mul(&quots[i].proj, &rm.mat_mul(&tm, &sec(i + 1), k(i + 1)), k(i + 1)));
        }
        let last = quots.len() - 1;
        let gluing = match &x.frob {
            None => None,
            Some(fr) => {
                let e = (hi - fr.shift) as u32;
                let fy: Vec<Vec<Elt>> = cols(&y.at(lo)).iter().map(|v| x.apply_frob(fr, v, e)).collect();
                let fyc = coords_mat(hi, &fy);
                for c in cols(&fyc) {
                    let cls = norm(&rm, &quots[last].exps, &rm.mat_vec(&quots[last].proj, &c));
                    if cls.iter().any(|z| !rm.is_zero(z)) {
                        return Err(GaugeError::Structural("sub-lattice is not Frobenius-stable".into()));
                    }
                }
                let fb: Vec<Vec<Elt>> = cols(&x.at(lo)).iter().map(|v| x.apply_frob(fr, v, e)).collect();
                let gm = coords_mat(hi, &fb);
                Some(rm.mat_mul(&quots[last].proj, &rm.mat_mul(&gm, &rm.mat_frob(&sec(0)), k(0)), k(0)))
            }
        };
        let exps: Vec<Vec<u32>> = quots.iter().map(|q| q.exps.clone()).collect();
        let gauge = Gauge::new(rm.clone(), lo, hi, exps, u, t, gluing)?;
        Ok(LatticeQuotient {
            gauge,
            lattice: x,
            proj: quots.iter().map(|q| q.proj.clone()).collect(),
            sec: quots.iter().map(|q| q.sec.clone()).collect(),
        })
    }

    /// X/p^m.
    pub fn to_gauge(&self, m: u32) -> Result<Gauge, GaugeError> {
        Ok(self.quotient(&self.scale(m), m)?.gauge)
    }

    /// Same lattices in every weight and the same Frobenius data.
    pub fn same_as(&self, o: &LatticeGauge) -> bool {
        self.rank == o.rank
            && self.frob == o.frob
            && (self.lo.min(o.lo) - 1..=self.hi.max(o.hi) + 1).all(|n| same_lattice(&self.ring, self.rank, &self.at(n), &o.at(n)))
    }

    /// log_p of [W^r : L_n] over W.
    pub fn index(&self, n: i64) -> u32 {
        self.lat(n).length()
    }

    pub fn render(&self) -> String {
        let w = &self.ring;
        let mut rows = vec![
            vec!["w".to_string()],
            vec!["len W^r/L_w".to_string()],
            vec!["u: L_w→L_w+1".to_string()],
            vec!["t: L_w→L_w-1".to_string()],
        ];
        for n in self.lo - 1..=self.hi + 1 {
            let l = self.lat(n);
            rows[0].push(n.to_string());
            rows[1].push(l.length().to_string());
            let next = self.lat(n + 1);
            let pl = cols(&w.mat_scale(&self.at(n), &w.ppow_elt(1)));
            rows[2].push(if l.length() + self.rank as u32 == next.length() && next.contains(w, &pl) { "p ~" } else { "p" }.into());
            let prev = self.lat(n - 1);
            rows[3].push(if prev.length() == l.length() { "~" } else { "incl" }.into());
        }
        table(&rows)
    }
}

/// A lattice quotient together with the maps between ambient vectors and classes.
#[derive(Clone, Debug)]
pub struct LatticeQuotient {
    pub gauge: Gauge,
    /// the ambient lattice gauge on the quotient's window
    pub lattice: LatticeGauge,
    proj: Vec<WMat>,
    sec: Vec<Vec<Vec<Elt>>>,
}

impl LatticeQuotient {
    /// Class of an ambient vector v ∈ L_n; None if v ∉ L_n.
    pub fn class_of(&self, n: i64, v: &[Elt]) -> Option<Vec<Elt>> {
        let w = &self.lattice.ring;
        let rm = &self.gauge.ring;
        let c = self.lattice.lat(n).coords(w, &w.reduce_mat(&vec![v.to_vec()]).remove(0))?;
        let c = rm.reduce_mat(&vec![c]).remove(0);
        // above the window L_n has the scaled basis of L_hi, so coordinates agree
        let i = (n.clamp(self.gauge.lo, self.gauge.hi) - self.gauge.lo) as usize;
        Some(norm(rm, self.gauge.piece(n), &rm.mat_vec(&self.proj[i], &c)))
    }

    /// An ambient lift of a class in weight n.
    pub fn lift(&self, n: i64, x: &[Elt]) -> Vec<Elt> {
        let w = &self.lattice.ring;
        let i = (n.clamp(self.gauge.lo, self.gauge.hi) - self.gauge.lo) as usize;
        let r = self.lattice.rank;
        let mut c = vec![w.zero(); r];
        for (s, xi) in self.sec[i].iter().zip(x) {
            for k in 0..r {
                c[k] = w.add(&c[k], &w.mul(&s[k], xi));
            }
        }
        w.mat_vec(&self.lattice.at(n), &c)
    }
}

/// Whether the column spans of a and b agree as lattices in W^r.
pub(super) fn same_lattice(w: &WittRing, r: usize, a: &WMat, b: &WMat) -> bool {
    match (Lat::new(w, r, &cols(a)), Lat::new(w, r, &cols(b))) {
        (Ok(x), Ok(y)) => x.contains(w, &cols(b)) && y.contains(w, &cols(a)),
        _ => false,
    }
}
