//! Finite bigraded Poincaré-duality algebras over F_p with a Steenrod action, their
//! Wu classes, and the mod-2^n refinement carrying a Bockstein and the pairing ⟨u, v⟩_n.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::fp;
use crate::scalar::{Base, Ring};
use crate::steenrod::{Gen, SteenrodAlgebra, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActionError {
    #[error("malformed table: {0}")]
    Structural(String),
    #[error("pairing {block} is singular")]
    DualityFailure { block: String },
    #[error("argument error: {0}")]
    Argument(String),
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElem {
    pub label: String,
    pub deg: i64,
    pub wt: i64,
}

/// A vector over F_p in the basis of a ring.
pub type Vector = Vec<u64>;

/// Finite graded-commutative F_p-algebra with a top piece at (2d+1, d) and a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDRing {
    pub p: u32,
    pub dim: i64,
    pub basis: Vec<BasisElem>,
    pub unit: usize,
    /// (i, j, k, c): e_i · e_j has coefficient c on e_k
    pub products: Vec<(usize, usize, usize, u64)>,
    pub trace: Vector,
    #[serde(skip)]
    table: Vec<Vec<Vector>>,
}

impl PDRing {
    pub fn new(
        p: u32,
        dim: i64,
        basis: Vec<BasisElem>,
        unit: usize,
        products: Vec<(usize, usize, usize, u64)>,
        trace: Vector,
    ) -> Result<Self, ActionError> {
        let mut r = PDRing {
            p,
            dim,
            basis,
            unit,
            products,
            trace,
            table: Vec::new(),
        };
        r.rebuild()?;
        Ok(r)
    }

    /// Recomputes the dense table after deserialization.
    pub fn rebuild(&mut self) -> Result<(), ActionError> {
        let n = self.basis.len();
        let p = self.p as u64;
        if self.unit >= n {
            return Err(ActionError::Structural(format!("unit index {} out of range", self.unit)));
        }
        if self.trace.len() != n {
            return Err(ActionError::Structural(format!(
                "trace has length {}, basis has {n}",
                self.trace.len()
            )));
        }
        let mut t = vec![vec![vec![0u64; n]; n]; n];
        for &(i, j, k, c) in &self.products {
            if i >= n || j >= n || k >= n {
                return Err(ActionError::Structural(format!("product entry ({i},{j},{k}) out of range")));
            }
            let (bi, bj, bk) = (&self.basis[i], &self.basis[j], &self.basis[k]);
            if bi.deg + bj.deg != bk.deg || bi.wt + bj.wt != bk.wt {
                return Err(ActionError::Structural(format!(
                    "product {}·{} → {} breaks the bigrading",
                    bi.label, bj.label, bk.label
                )));
            }
            t[i][j][k] = (t[i][j][k] + c) % p;
        }
        for i in 0..n {
            t[self.unit][i] = unit_vec(n, i);
            t[i][self.unit] = unit_vec(n, i);
        }
        self.table = t;
        let (td, tw) = (2 * self.dim + 1, self.dim);
        for (i, &c) in self.trace.iter().enumerate() {
            if c % p != 0 && (self.basis[i].deg, self.basis[i].wt) != (td, tw) {
                return Err(ActionError::Structural(format!(
                    "trace is nonzero on {} outside the top bidegree",
                    self.basis[i].label
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn pm(&self) -> u64 {
        self.p as u64
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    pub fn in_bidegree(&self, deg: i64, wt: i64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.basis[i].deg == deg && self.basis[i].wt == wt)
            .collect()
    }

    pub fn basis_vec(&self, i: usize) -> Vector {
        unit_vec(self.len(), i)
    }

    pub fn zero(&self) -> Vector {
        vec![0; self.len()]
    }

    pub fn one(&self) -> Vector {
        self.basis_vec(self.unit)
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vector {
        let p = self.pm();
        x.iter().zip(y).map(|(a, b)| (a + b) % p).collect()
    }

    pub fn scale(&self, x: &[u64], c: u64) -> Vector {
        let p = self.pm();
        x.iter().map(|a| a * (c % p) % p).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vector {
        self.scale(x, self.pm() - 1)
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vector {
        let p = self.pm();
        let n = self.len();
        let mut out = vec![0; n];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let ab = a * b % p;
                for (k, &c) in self.table[i][j].iter().enumerate() {
                    if c != 0 {
                        out[k] = (out[k] + ab * c) % p;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &[u64], e: u32) -> Vector {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    pub fn integrate(&self, x: &[u64]) -> u64 {
        let p = self.pm();
        x.iter().zip(&self.trace).map(|(a, b)| a * b % p).sum::<u64>() % p
    }

    pub fn format(&self, x: &[u64]) -> String {
        let terms: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                if c == 1 {
                    self.basis[i].label.clone()
                } else {
                    format!("{c}{}", self.basis[i].label)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Checks graded commutativity, associativity and the unit on basis elements.
    pub fn check_ring(&self) -> Vec<Violation> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let a = self.mul(&self.basis_vec(i), &self.basis_vec(j));
                let b = self.mul(&self.basis_vec(j), &self.basis_vec(i));
                let sgn = (self.basis[i].deg * self.basis[j].deg) % 2 != 0;
                let b = if sgn { self.neg(&b) } else { b };
                if a != b {
                    out.push(Violation::new("graded commutativity", [&self.basis[i].label, &self.basis[j].label]));
                }
                for k in 0..n {
                    let l = self.mul(&a, &self.basis_vec(k));
                    let r = self.mul(&self.basis_vec(i), &self.mul(&self.basis_vec(j), &self.basis_vec(k)));
                    if l != r {
                        out.push(Violation::new(
                            "associativity",
                            [&self.basis[i].label, &self.basis[j].label, &self.basis[k].label],
                        ));
                    }
                }
            }
        }
        out
    }

    /// Matrix of the cup pairing between two bidegrees followed by the trace.
    pub fn pairing_matrix(&self, left: &[usize], right: &[usize]) -> Vec<Vec<u64>> {
        left.iter()
            .map(|&i| {
                right
                    .iter()
                    .map(|&j| self.integrate(&self.mul(&self.basis_vec(i), &self.basis_vec(j))))
                    .collect()
            })
            .collect()
    }

    /// Verifies that every complementary pair of bidegrees pairs perfectly into the top.
    pub fn check_duality(&self) -> Result<(), ActionError> {
        let mut seen = BTreeMap::new();
        for b in &self.basis {
            seen.insert((b.deg, b.wt), ());
        }
        for &(a, w) in seen.keys() {
            let l = self.in_bidegree(a, w);
            let r = self.in_bidegree(2 * self.dim + 1 - a, self.dim - w);
            let m = self.pairing_matrix(&l, &r);
            if l.len() != r.len() || fp::rank(&m, self.pm()) != l.len() {
                return Err(ActionError::DualityFailure {
                    block: format!("H^({a},{w}) × H^({},{})", 2 * self.dim + 1 - a, self.dim - w),
                });
            }
        }
        Ok(())
    }
}

fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// One failed axiom with the basis elements exhibiting it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<String>,
}

impl Violation {
    pub fn new<S: AsRef<str>>(axiom: &str, witness: impl IntoIterator<Item = S>) -> Self {
        Violation {
            axiom: axiom.to_string(),
            witness: witness.into_iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }
}

/// Values of β and of the P^i on each basis element. Absent P^i act by zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteenrodAction {
    pub beta: Vec<Vector>,
    pub powers: BTreeMap<u32, Vec<Vector>>,
}

impl SteenrodAction {
    pub fn zero_beta(n: usize) -> Vec<Vector> {
        vec![vec![0; n]; n]
    }

    fn apply_table(table: &[Vector], x: &[u64], p: u64) -> Vector {
        let n = x.len();
        let mut out = vec![0; n];
        for (i, &c) in x.iter().enumerate() {
            if c != 0 {
                for (k, &v) in table[i].iter().enumerate() {
                    out[k] = (out[k] + c * v) % p;
                }
            }
        }
        out
    }

    pub fn apply_gen(&self, r: &PDRing, g: Gen, x: &[u64]) -> Vector {
        match g {
            Gen::Beta => Self::apply_table(&self.beta, x, r.pm()),
            Gen::P(i) => match self.powers.get(&i) {
                Some(t) => Self::apply_table(t, x, r.pm()),
                None if i == 0 => x.to_vec(),
                None => r.zero(),
            },
        }
    }

    /// Applies a word, rightmost generator first.
    pub fn apply_word(&self, r: &PDRing, w: &[Gen], x: &[u64]) -> Vector {
        w.iter().rev().fold(x.to_vec(), |acc, &g| self.apply_gen(r, g, &acc))
    }

    /// Sq^k at p = 2: Sq^{2i} = P^i and Sq^{2i+1} = β P^i.
    pub fn sq(&self, r: &PDRing, k: u32, x: &[u64]) -> Vector {
        let y = self.apply_gen(r, Gen::P(k / 2), x);
        if k % 2 == 1 {
            self.apply_gen(r, Gen::Beta, &y)
        } else {
            y
        }
    }

    /// Total square Σ_k Sq^k(x).
    pub fn total_sq(&self, r: &PDRing, x: &[u64]) -> Vector {
        let top = (2 * r.dim + 1) as u32;
        (0..=top).fold(r.zero(), |acc, k| r.add(&acc, &self.sq(r, k, x)))
    }
}

fn gen_shift(p: u32, g: Gen) -> (i64, i64) {
    match g {
        Gen::Beta => (1, 0),
        Gen::P(i) => {
            let q = i as i64 * (p as i64 - 1);
            (2 * q, q)
        }
    }
}

fn check_shape(r: &PDRing, a: &SteenrodAction) -> Result<(), ActionError> {
    let n = r.len();
    let mut tables: Vec<(Gen, &Vec<Vector>)> = vec![(Gen::Beta, &a.beta)];
    for (&i, t) in &a.powers {
        tables.push((Gen::P(i), t));
    }
    for (g, t) in tables {
        if t.len() != n || t.iter().any(|v| v.len() != n) {
            return Err(ActionError::Structural(format!("table for {g:?} is not {n}×{n}")));
        }
        let (dd, dw) = gen_shift(r.p, g);
        for (i, v) in t.iter().enumerate() {
            for (k, &c) in v.iter().enumerate() {
                if c % r.pm() != 0 {
                    let (bi, bk) = (&r.basis[i], &r.basis[k]);
                    if bi.deg + dd != bk.deg || bi.wt + dw != bk.wt {
                        return Err(ActionError::Structural(format!(
                            "{g:?}({}) has a component on {} of the wrong bidegree",
                            bi.label, bk.label
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn gen_name(p: u32, g: Gen) -> String {
    match (p, g) {
        (2, Gen::Beta) => "Sq1".into(),
        (2, Gen::P(i)) => format!("Sq{}", 2 * i),
        (_, Gen::Beta) => "b".into(),
        (_, Gen::P(i)) => format!("P{i}"),
    }
}

/// Checks the action axioms over the residue field. The report is empty iff all pass.
pub fn validate_action(r: &PDRing, a: &SteenrodAction) -> Result<Vec<Violation>, ActionError> {
    check_shape(r, a)?;
    let p = r.p;
    let n = r.len();
    let mut out = Vec::new();
    let max_deg = r.basis.iter().map(|b| b.deg).max().unwrap_or(0);
    let max_i = (max_deg / (2 * (p as i64 - 1)).max(1)) as u32 + 1;
    let label = |i: usize| r.basis[i].label.clone();

    for i in 0..n {
        let x = r.basis_vec(i);
        if a.apply_gen(r, Gen::P(0), &x) != x {
            out.push(Violation::new("P^0 identity", [label(i)]));
        }
        let b = &r.basis[i];
        for k in 1..=max_i {
            let y = a.apply_gen(r, Gen::P(k), &x);
            if b.deg == 2 * k as i64 && b.wt == k as i64 {
                let want = r.pow(&x, p);
                if y != want {
                    out.push(Violation::new("p-th power law", [gen_name(p, Gen::P(k)), label(i)]));
                }
            }
            if 2 * k as i64 > b.deg && k as i64 >= b.wt && y.iter().any(|&c| c != 0) {
                out.push(Violation::new("instability", [gen_name(p, Gen::P(k)), label(i)]));
            }
        }
    }

    // Cartan and Leibniz on basis products
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (r.basis_vec(i), r.basis_vec(j));
            let xy = r.mul(&x, &y);
            let lhs = a.apply_gen(r, Gen::Beta, &xy);
            let mut rhs = r.mul(&a.apply_gen(r, Gen::Beta, &x), &y);
            let t = r.mul(&x, &a.apply_gen(r, Gen::Beta, &y));
            rhs = r.add(&rhs, &if r.basis[i].deg % 2 != 0 { r.neg(&t) } else { t });
            if lhs != rhs {
                out.push(Violation::new("Cartan", [gen_name(p, Gen::Beta), label(i), label(j)]));
            }
            for k in 1..=max_i {
                let lhs = a.apply_gen(r, Gen::P(k), &xy);
                let mut rhs = r.zero();
                for s in 0..=k {
                    let t = r.mul(&a.apply_gen(r, Gen::P(s), &x), &a.apply_gen(r, Gen::P(k - s), &y));
                    rhs = r.add(&rhs, &t);
                }
                if lhs != rhs {
                    out.push(Violation::new("Cartan", [gen_name(p, Gen::P(k)), label(i), label(j)]));
                }
            }
        }
    }

    // Adem relations on two-generator composites that can act nontrivially
    let alg = SteenrodAlgebra::new(Ring::new(p, Base::K).map_err(|e| ActionError::Config(e.to_string()))?);
    let mut words: Vec<Word> = vec![vec![Gen::Beta, Gen::Beta]];
    for x in 1..=max_i {
        for y in 1..=max_i {
            if x < p * y {
                words.push(vec![Gen::P(x), Gen::P(y)]);
            }
            if x <= p * y {
                words.push(vec![Gen::P(x), Gen::Beta, Gen::P(y)]);
            }
        }
    }
    for w in words {
        let (dd, _) = w.iter().fold((0, 0), |acc, &g| {
            let s = gen_shift(p, g);
            (acc.0 + s.0, acc.1 + s.1)
        });
        if dd > max_deg {
            continue;
        }
        let reduced = alg.reduce_word(&w);
        for i in 0..n {
            let x = r.basis_vec(i);
            let lhs = a.apply_word(r, &w, &x);
            let mut rhs = r.zero();
            for (adm, c) in reduced.terms() {
                let v = a.apply_word(r, &adm.to_word(), &x);
                rhs = r.add(&rhs, &r.scale(&v, c.constant() as u64));
            }
            if lhs != rhs {
                let name = w.iter().map(|&g| gen_name(p, g)).collect::<Vec<_>>().join(" ");
                out.push(Violation::new("Adem", [name, label(i)]));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    /// the syntomic operation Ps^i
    Syn,
    /// the E∞ operation Pe^i
    Einfty,
}

/// lhs^i = τ^k · rhs^i on classes of weight b, or lhs^i = 0 when `tau_power` is None.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conversion {
    pub i: u32,
    pub b: i64,
    pub lhs: Flavor,
    pub rhs: Flavor,
    pub tau_power: Option<u32>,
}

impl Conversion {
    pub fn describe(&self, p: u32) -> String {
        let name = |f: Flavor| match f {
            Flavor::Syn => format!("Ps^{}", self.i),
            Flavor::Einfty => format!("Pe^{}", self.i),
        };
        let _ = p;
        match self.tau_power {
            None => format!("{} = 0", name(self.lhs)),
            Some(0) => format!("{} = {}", name(self.lhs), name(self.rhs)),
            Some(1) => format!("{} = tau {}", name(self.lhs), name(self.rhs)),
            Some(k) => format!("{} = tau^{k} {}", name(self.lhs), name(self.rhs)),
        }
    }
}

/// Relation between the two flavors of P^i on weight-b classes. The requested direction
/// `from` is honored when the τ-power allows it; otherwise the available relation is returned.
pub fn flavor_convert(p: u32, i: u32, b: i64, from: Flavor, base: Base) -> Conversion {
    let q = p as i64 - 1;
    let (lhs, rhs, k) = if (i as i64) > b {
        (Flavor::Syn, Flavor::Einfty, q * (i as i64 - b))
    } else if (i as i64) < b {
        (Flavor::Einfty, Flavor::Syn, q * (b - i as i64))
    } else {
        let other = if from == Flavor::Syn { Flavor::Einfty } else { Flavor::Syn };
        (from, other, 0)
    };
    let tau_power = match (base, k) {
        (_, 0) => Some(0),
        (Base::K, _) => None,
        (Base::O, k) => Some(k as u32),
    };
    Conversion {
        i,
        b,
        lhs,
        rhs,
        tau_power,
    }
}

/// v_i ∈ H^{i,⌊i/2⌋} with ∫Sq^i(α) = ∫(v_i·α) for all α of complementary bidegree (p = 2).
pub fn wu_classes(r: &PDRing, a: &SteenrodAction) -> Result<Vec<Vector>, ActionError> {
    if r.p != 2 {
        return Err(ActionError::Config("Wu classes are defined here for p = 2".into()));
    }
    let top = 2 * r.dim + 1;
    let mut out = Vec::new();
    for i in 0..=top {
        let here = r.in_bidegree(i, i / 2);
        let there = r.in_bidegree(top - i, r.dim - i / 2);
        if here.is_empty() {
            out.push(r.zero());
            continue;
        }
        let g = r.pairing_matrix(&here, &there);
        // Σ_k c_k g[k][l] = ∫Sq^i(e_l)
        let gt: Vec<Vec<u64>> = (0..there.len()).map(|l| here.iter().enumerate().map(|(k, _)| g[k][l]).collect()).collect();
        if fp::rank(&gt, 2) != here.len() || here.len() != there.len() {
            return Err(ActionError::DualityFailure {
                block: format!("H^({i},{}) × H^({},{})", i / 2, top - i, r.dim - i / 2),
            });
        }
        let rhs: Vec<u64> = there.iter().map(|&l| r.integrate(&a.sq(r, i as u32, &r.basis_vec(l)))).collect();
        let c = fp::solve(&gt, &rhs, 2).ok_or_else(|| ActionError::DualityFailure {
            block: format!("Wu system in degree {i}"),
        })?;
        let mut v = r.zero();
        for (k, &idx) in here.iter().enumerate() {
            v[idx] = c[k];
        }
        out.push(v);
    }
    Ok(out)
}

// ------------------------------------------------------------------ mod 2^n rings

/// Mod-2 data used by the top formula: reduction of H^{D+1,D/2}, Pe^{D/2} on it,
/// and the map [2^{n−1}] from mod-2 classes in the top degree back to mod 2^n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModTwoData {
    /// rows: mod-2 basis of H^{D+1,D/2}(A/2); columns: generators of H^{D+1,D/2}(A/2^n)
    pub reduction: Vec<Vec<u64>>,
    /// rows: mod-2 basis in the top; columns: mod-2 basis of H^{D+1,D/2}(A/2)
    pub pe: Vec<Vec<u64>>,
    /// rows: all generators (coordinates mod their orders); columns: mod-2 top basis
    pub lift: Vec<Vec<i128>>,
    /// generator indices in bidegree (D+1, D/2), in the order used by `reduction`
    pub source: Vec<usize>,
}

/// A finite graded-commutative Z/2^n-algebra, given on cyclic generators of orders 2^{k_i}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDRingModN {
    pub n: u32,
    /// D; the top piece sits at (2D+1, D) and the pairing lives on (D, D/2)
    pub dim: i64,
    pub basis: Vec<BasisElem>,
    /// 2-adic exponent k_i of the order of each generator
    pub order_exp: Vec<u32>,
    pub unit: usize,
    /// (i, j, coordinates of e_i·e_j)
    pub products: Vec<(usize, usize, Vec<i128>)>,
    /// β_n(e_i) coordinates, one row per generator
    pub bockstein: Vec<Vec<i128>>,
    pub trace: Vec<i128>,
    pub mod_two: Option<ModTwoData>,
}

impl PDRingModN {
    pub fn modulus(&self) -> i128 {
        1i128 << self.n
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn reduce(&self, x: &[i128]) -> Vec<i128> {
        x.iter()
            .zip(&self.order_exp)
            .map(|(c, &k)| c.rem_euclid(1i128 << k))
            .collect()
    }

    pub fn basis_vec(&self, i: usize) -> Vec<i128> {
        let mut v = vec![0; self.len()];
        v[i] = 1;
        self.reduce(&v)
    }

    pub fn in_bidegree(&self, deg: i64, wt: i64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.basis[i].deg == deg && self.basis[i].wt == wt)
            .collect()
    }

    fn product_table(&self) -> BTreeMap<(usize, usize), &Vec<i128>> {
        self.products.iter().map(|(i, j, v)| ((*i, *j), v)).collect()
    }

    pub fn mul(&self, x: &[i128], y: &[i128]) -> Vec<i128> {
        let t = self.product_table();
        let n = self.len();
        let mut out = vec![0i128; n];
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0 {
                    continue;
                }
                let v = if i == self.unit {
                    Some(self.basis_vec(j))
                } else if j == self.unit {
                    Some(self.basis_vec(i))
                } else {
                    t.get(&(i, j)).map(|v| v.to_vec())
                };
                if let Some(v) = v {
                    for k in 0..n {
                        out[k] += x[i] * y[j] * v[k];
                    }
                }
                out = self.reduce(&out);
            }
        }
        self.reduce(&out)
    }

    pub fn beta(&self, x: &[i128]) -> Vec<i128> {
        let n = self.len();
        let mut out = vec![0i128; n];
        for i in 0..n {
            if x[i] != 0 {
                for k in 0..n {
                    out[k] += x[i] * self.bockstein[i][k];
                }
            }
        }
        self.reduce(&out)
    }

    pub fn integrate(&self, x: &[i128]) -> i128 {
        x.iter().zip(&self.trace).map(|(a, b)| a * b).sum::<i128>().rem_euclid(self.modulus())
    }

    fn check_pairing_degree(&self, x: &[i128]) -> Result<(), ActionError> {
        let (d, w) = (self.dim, self.dim / 2);
        for (i, &c) in x.iter().enumerate() {
            if c != 0 && (self.basis[i].deg, self.basis[i].wt) != (d, w) {
                return Err(ActionError::Argument(format!(
                    "{} is not in bidegree ({d},{w})",
                    self.basis[i].label
                )));
            }
        }
        Ok(())
    }

    /// ⟨u, v⟩_n = ∫ u·β_n(v).
    pub fn pairing_n(&self, u: &[i128], v: &[i128]) -> Result<i128, ActionError> {
        if self.dim % 2 != 0 {
            return Err(ActionError::Argument("the pairing needs an even dimension parameter".into()));
        }
        self.check_pairing_degree(u)?;
        self.check_pairing_degree(v)?;
        Ok(self.integrate(&self.mul(u, &self.beta(v))))
    }

    /// Structural checks: β_n∘β_n = 0, β_n is a derivation, β_n kills (2D, D).
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.len();
        let mut out = Vec::new();
        let label = |i: usize| self.basis[i].label.clone();
        for i in 0..n {
            let x = self.basis_vec(i);
            if self.beta(&self.beta(&x)).iter().any(|&c| c != 0) {
                out.push(Violation::new("β_n∘β_n = 0", [label(i)]));
            }
            if (self.basis[i].deg, self.basis[i].wt) == (2 * self.dim, self.dim)
                && self.beta(&x).iter().any(|&c| c != 0)
            {
                out.push(Violation::new("β_n vanishes on the top bidegree", [label(i)]));
            }
            for j in 0..n {
                let y = self.basis_vec(j);
                let lhs = self.beta(&self.mul(&x, &y));
                let a = self.mul(&self.beta(&x), &y);
                let b = self.mul(&x, &self.beta(&y));
                let s: i128 = if self.basis[i].deg % 2 == 0 { 1 } else { -1 };
                let rhs = self.reduce(&a.iter().zip(&b).map(|(p, q)| p + s * q).collect::<Vec<_>>());
                if lhs != rhs {
                    out.push(Violation::new("β_n derivation", [label(i), label(j)]));
                }
            }
        }
        out
    }

    /// Skew-symmetry and alternation of ⟨·,·⟩_n on the generators of H^{D,D/2}.
    pub fn check_pairing(&self) -> Result<Vec<Violation>, ActionError> {
        let mid = self.in_bidegree(self.dim, self.dim / 2);
        let m = self.modulus();
        let mut out = Vec::new();
        for &i in &mid {
            let x = self.basis_vec(i);
            if self.pairing_n(&x, &x)? != 0 {
                out.push(Violation::new("alternating", [self.basis[i].label.clone()]));
            }
            for &j in &mid {
                let y = self.basis_vec(j);
                let a = self.pairing_n(&x, &y)?;
                let b = self.pairing_n(&y, &x)?;
                if (a + b).rem_euclid(m) != 0 {
                    out.push(Violation::new(
                        "skew-symmetric",
                        [self.basis[i].label.clone(), self.basis[j].label.clone()],
                    ));
                }
            }
        }
        Ok(out)
    }

    /// u·β_n(u) = [2^{n−1}]∘Pe^{D/2}(reduction of β_n(u)), checked for one class u.
    pub fn verify_top_formula(&self, u: &[i128]) -> Result<Vec<Violation>, ActionError> {
        let data = self
            .mod_two
            .as_ref()
            .ok_or_else(|| ActionError::Config("mod-2 reduction, Pe table and [2^(n-1)] lift are required".into()))?;
        self.check_pairing_degree(u)?;
        let lhs = self.mul(u, &self.beta(u));
        let bu = self.beta(u);
        let red: Vec<u64> = data
            .reduction
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&data.source)
                    .map(|(&c, &g)| (c as i128 * bu[g]).rem_euclid(2) as u64)
                    .sum::<u64>()
                    % 2
            })
            .collect();
        let pe: Vec<u64> = data
            .pe
            .iter()
            .map(|row| row.iter().zip(&red).map(|(a, b)| a * b).sum::<u64>() % 2)
            .collect();
        let mut rhs = vec![0i128; self.len()];
        for (g, row) in data.lift.iter().enumerate() {
            rhs[g] = row.iter().zip(&pe).map(|(&a, &b)| a * b as i128).sum();
        }
        let rhs = self.reduce(&rhs);
        if lhs == self.reduce(&lhs) && lhs == rhs {
            Ok(Vec::new())
        } else {
            let fmt = |v: &[i128]| format!("{v:?}");
            Ok(vec![Violation::new("top formula", [fmt(u), fmt(&lhs), fmt(&rhs)])])
        }
    }
}
