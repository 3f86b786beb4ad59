//! Stiefel–Whitney calculus at p = 2 through Chern roots.
//!
//! Symmetric functions are kept in the monomial basis m_λ over F_2 with as many roots as
//! the weight requires, so no identity collapses. A root x has Sq²x = x² and Sq¹x = 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{wu_classes, ActionError, BasisElem, PDRing, SteenrodAction, Vector, Violation};
use crate::scalar::binomial_mod;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharError {
    #[error("root polynomial is not symmetric at exponent {0:?}")]
    NotSymmetric(Vec<u32>),
    #[error("cannot parse SW polynomial: {0}")]
    Parse(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error(transparent)]
    Action(#[from] ActionError),
}

// ------------------------------------------------------------------ symmetric functions

/// Partition with parts in decreasing order and no zeros.
pub type Partition = Vec<u32>;
/// Symmetric function over F_2 as a set of m_λ.
type Sym = BTreeSet<Partition>;

fn toggle<T: Ord>(s: &mut BTreeSet<T>, x: T) {
    if !s.remove(&x) {
        s.insert(x);
    }
}

fn conjugate(p: &[u32]) -> Partition {
    let n = p.first().copied().unwrap_or(0);
    (1..=n).map(|i| p.iter().filter(|&&x| x >= i).count() as u32).collect()
}

fn multiplicities(p: &[u32]) -> BTreeMap<u32, u32> {
    let mut m = BTreeMap::new();
    for &x in p {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

fn odd_binomial(n: u32, k: u32) -> bool {
    k <= n && binomial_mod(n as i64, k as i64, 2) == 1
}

/// m_λ · e_k in the monomial basis.
fn mul_e(p: &Sym, k: u32) -> Sym {
    let mut out = Sym::new();
    for lam in p {
        let mut mult = multiplicities(lam);
        mult.insert(0, k); // only k zeros can ever be raised
        let values: Vec<(u32, u32)> = mult.into_iter().collect();
        let mut c = vec![0u32; values.len()];
        choose_raises(&values, 0, k, &mut c, &mut out);
    }
    out
}

fn choose_raises(values: &[(u32, u32)], idx: usize, left: u32, c: &mut Vec<u32>, out: &mut Sym) {
    if idx == values.len() {
        if left != 0 {
            return;
        }
        let mut mu = Vec::new();
        let mut raised: BTreeMap<u32, u32> = BTreeMap::new();
        for (i, &(v, m)) in values.iter().enumerate() {
            let keep = if v == 0 { 0 } else { m - c[i] };
            mu.extend(std::iter::repeat(v).take(keep as usize));
            mu.extend(std::iter::repeat(v + 1).take(c[i] as usize));
            raised.insert(v + 1, c[i]);
        }
        mu.sort_unstable_by(|a, b| b.cmp(a));
        let mm = multiplicities(&mu);
        let odd = raised.iter().all(|(&u, &r)| odd_binomial(*mm.get(&u).unwrap_or(&0), r));
        if odd {
            toggle(out, mu);
        }
        return;
    }
    let m = values[idx].1;
    for ci in 0..=m.min(left) {
        c[idx] = ci;
        choose_raises(values, idx + 1, left - ci, c, out);
    }
    c[idx] = 0;
}

/// Coefficient (mod 2) of x^μ in Sq(m_λ): distinct rearrangements α of λ with
/// μ_t − α_t a binary submask of α_t at every position.
fn sq_coeff(lam: &[u32], mu: &[u32]) -> bool {
    fn go(mu: &[u32], t: usize, left: &mut BTreeMap<u32, u32>) -> bool {
        if t == mu.len() {
            return true;
        }
        let mut parity = false;
        let keys: Vec<u32> = left.iter().filter(|(_, &c)| c > 0).map(|(&v, _)| v).collect();
        for a in keys {
            if a <= mu[t] && ((mu[t] - a) & !a) == 0 {
                *left.get_mut(&a).unwrap() -= 1;
                parity ^= go(mu, t + 1, left);
                *left.get_mut(&a).unwrap() += 1;
            }
        }
        parity
    }
    if lam.len() != mu.len() {
        return false;
    }
    go(mu, 0, &mut multiplicities(lam))
}

/// Sq^{2s}(m_λ) through the roots.
fn sq_m(lam: &[u32], s: u32) -> Sym {
    // candidate exponents: raise each part a by a submask j of a, Σj = s
    fn gen(lam: &[u32], i: usize, left: u32, prev: Option<u32>, cur: &mut Vec<u32>, out: &mut BTreeSet<Partition>) {
        if i == lam.len() {
            if left == 0 {
                let mut mu = cur.clone();
                mu.sort_unstable_by(|a, b| b.cmp(a));
                out.insert(mu);
            }
            return;
        }
        let a = lam[i];
        let cap = match prev {
            Some(j) if i > 0 && lam[i - 1] == a => j,
            _ => a,
        };
        for j in 0..=cap.min(left) {
            if j & !a != 0 {
                continue;
            }
            cur.push(a + j);
            gen(lam, i + 1, left - j, Some(j), cur, out);
            cur.pop();
        }
    }
    let mut cands = BTreeSet::new();
    gen(lam, 0, s, None, &mut Vec::new(), &mut cands);
    cands.into_iter().filter(|mu| sq_coeff(lam, mu)).collect()
}

fn sym_cache() -> &'static Mutex<HashMap<Partition, Sym>> {
    static C: OnceLock<Mutex<HashMap<Partition, Sym>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// e_ν = Π e_{ν_i} in the monomial basis.
fn e_expansion(nu: &[u32]) -> Sym {
    if nu.is_empty() {
        return std::iter::once(Vec::new()).collect();
    }
    if let Some(s) = sym_cache().lock().unwrap().get(nu) {
        return s.clone();
    }
    let head = e_expansion(&nu[..nu.len() - 1]);
    let s = mul_e(&head, nu[nu.len() - 1]);
    sym_cache().lock().unwrap().insert(nu.to_vec(), s.clone());
    s
}

/// Rewrites a symmetric function as a sum of products e_ν (returned as partitions ν).
fn to_elementary(mut s: Sym) -> BTreeSet<Partition> {
    let mut out = BTreeSet::new();
    while let Some(mu) = s.last().cloned() {
        let nu = conjugate(&mu);
        for m in e_expansion(&nu) {
            toggle(&mut s, m);
        }
        toggle(&mut out, nu);
    }
    out
}

// ------------------------------------------------------------------ SW polynomials

/// w_{2k} of bundle b is the key (b, k).
pub type SwVar = (u32, u32);
pub type SwMono = BTreeMap<SwVar, u32>;

/// Polynomial over F_2 in the even classes w_{2k} of one or more bundles.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwPoly {
    terms: BTreeSet<SwMono>,
}

fn mono_weight(m: &SwMono) -> u32 {
    m.iter().map(|(&(_, k), &e)| k * e).sum()
}

fn mono_mul(a: &SwMono, b: &SwMono) -> SwMono {
    let mut m = a.clone();
    for (&v, &e) in b {
        *m.entry(v).or_insert(0) += e;
    }
    m
}

fn nu_to_mono(bundle: u32, nu: &[u32]) -> SwMono {
    let mut m = SwMono::new();
    for &k in nu {
        *m.entry((bundle, k)).or_insert(0) += 1;
    }
    m
}

impl SwPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(SwMono::new())
    }

    pub fn from_monomial(m: SwMono) -> Self {
        SwPoly {
            terms: std::iter::once(m).collect(),
        }
    }

    /// w_{2k} of a bundle; w_0 = 1.
    pub fn w(bundle: u32, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        Self::from_monomial(std::iter::once(((bundle, k), 1)).collect())
    }

    /// The generic total class 1 + w_2 + … + w_{2r} of a rank-r bundle.
    pub fn total_of_rank(bundle: u32, r: u32) -> Self {
        (0..=r).fold(Self::zero(), |acc, k| acc.add(&Self::w(bundle, k)))
    }

    pub fn terms(&self) -> &BTreeSet<SwMono> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &SwPoly) -> SwPoly {
        let mut t = self.terms.clone();
        for m in &o.terms {
            toggle(&mut t, m.clone());
        }
        SwPoly { terms: t }
    }

    pub fn mul(&self, o: &SwPoly) -> SwPoly {
        let mut t = BTreeSet::new();
        for a in &self.terms {
            for b in &o.terms {
                toggle(&mut t, mono_mul(a, b));
            }
        }
        SwPoly { terms: t }
    }

    /// Component of cohomological degree `deg` (always even or zero).
    pub fn component(&self, deg: u32) -> SwPoly {
        SwPoly {
            terms: self.terms.iter().filter(|m| 2 * mono_weight(m) == deg).cloned().collect(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.iter().map(|m| 2 * mono_weight(m)).max().unwrap_or(0)
    }

    /// Substitutes ring classes for the variables.
    pub fn evaluate(&self, r: &PDRing, class: &dyn Fn(u32, u32) -> Vector) -> Vector {
        let mut out = r.zero();
        for m in &self.terms {
            let mut v = r.one();
            for (&(b, k), &e) in m {
                v = r.mul(&v, &r.pow(&class(b, k), e));
            }
            out = r.add(&out, &v);
        }
        out
    }

    pub fn parse(s: &str) -> Result<SwPoly, CharError> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        for term in s.split('+') {
            let mut m = SwPoly::one();
            for f in term.split_whitespace() {
                if f == "1" {
                    continue;
                }
                let rest = f
                    .strip_prefix('w')
                    .ok_or_else(|| CharError::Parse(format!("unexpected factor {f:?}")))?;
                let (base, exp) = match rest.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| CharError::Parse(f.into()))?),
                    None => (rest, 1),
                };
                let digits: String = base.chars().take_while(|c| c.is_ascii_digit()).collect();
                let bundle = base[digits.len()..].chars().filter(|&c| c == '\'').count() as u32;
                if base[digits.len()..].chars().any(|c| c != '\'') {
                    return Err(CharError::Parse(format!("unexpected factor {f:?}")));
                }
                let d: u32 = digits.parse().map_err(|_| CharError::Parse(f.into()))?;
                if d % 2 == 1 {
                    // odd classes vanish
                    m = SwPoly::zero();
                    continue;
                }
                for _ in 0..exp {
                    m = m.mul(&SwPoly::w(bundle, d / 2));
                }
            }
            out = out.add(&m);
        }
        Ok(out)
    }

    /// Sq^i applied termwise.
    pub fn sq(&self, i: u32) -> SwPoly {
        self.terms.iter().fold(SwPoly::zero(), |acc, m| acc.add(&sq_on_sw(i, m)))
    }

    /// Total square Σ_i Sq^i.
    pub fn total_sq(&self) -> SwPoly {
        let top = 2 * self.max_degree();
        (0..=top).fold(SwPoly::zero(), |acc, i| acc.add(&self.sq(i)))
    }
}

impl fmt::Display for SwPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // lower degree first, then lexicographic
        let mut ms: Vec<&SwMono> = self.terms.iter().collect();
        ms.sort_by_key(|m| (mono_weight(m), m.iter().map(|(&(b, k), &e)| (b, k, e)).collect::<Vec<_>>()));
        let s: Vec<String> = ms
            .iter()
            .map(|m| {
                if m.is_empty() {
                    return "1".into();
                }
                m.iter()
                    .map(|(&(b, k), &e)| {
                        let name = format!("w{}{}", 2 * k, "'".repeat(b as usize));
                        if e == 1 {
                            name
                        } else {
                            format!("{name}^{e}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "{}", s.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwTermJson {
    /// (bundle, degree, exponent) triples
    pub vars: Vec<(u32, u32, u32)>,
    pub coeff: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwJson {
    pub terms: Vec<SwTermJson>,
}

impl SwJson {
    pub fn from_poly(p: &SwPoly) -> Self {
        SwJson {
            terms: p
                .terms
                .iter()
                .map(|m| SwTermJson {
                    vars: m.iter().map(|(&(b, k), &e)| (b, 2 * k, e)).collect(),
                    coeff: 1,
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<SwPoly, CharError> {
        let mut out = SwPoly::zero();
        for t in &self.terms {
            if t.coeff % 2 == 0 {
                continue;
            }
            let mut m = SwMono::new();
            let mut vanishes = false;
            for &(b, d, e) in &t.vars {
                if d % 2 == 1 && e > 0 {
                    vanishes = true;
                }
                if d > 0 && e > 0 {
                    *m.entry((b, d / 2)).or_insert(0) += e;
                }
            }
            if !vanishes {
                out = out.add(&SwPoly::from_monomial(m));
            }
        }
        Ok(out)
    }
}

/// Integer polynomial in universal Chern classes c_1, c_2, … (exponent vector → coefficient).
pub type ChernPoly = BTreeMap<Vec<u32>, i64>;

/// Even SW classes are the mod-2 Chern classes; odd ones vanish.
pub fn sw_from_chern(c: &ChernPoly, bundle: u32) -> SwPoly {
    let mut out = SwPoly::zero();
    for (exps, &coef) in c {
        if coef.rem_euclid(2) == 0 {
            continue;
        }
        let m: SwMono = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| ((bundle, i as u32 + 1), e))
            .collect();
        out = out.add(&SwPoly::from_monomial(m));
    }
    out
}

/// w(E ⊕ E′) = w(E)·w(E′).
pub fn whitney_product(w: &SwPoly, w2: &SwPoly) -> SwPoly {
    w.mul(w2)
}

fn sq_cache() -> &'static Mutex<HashMap<(Partition, u32), BTreeSet<Partition>>> {
    static C: OnceLock<Mutex<HashMap<(Partition, u32), BTreeSet<Partition>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Sq^{2s} of e_ν, expanded over the roots and resymmetrized.
fn sq_e_product(nu: &[u32], s: u32) -> BTreeSet<Partition> {
    let key = (nu.to_vec(), s);
    if let Some(r) = sq_cache().lock().unwrap().get(&key) {
        return r.clone();
    }
    let mut img = Sym::new();
    for lam in e_expansion(nu) {
        for mu in sq_m(&lam, s) {
            toggle(&mut img, mu);
        }
    }
    let r = to_elementary(img);
    sq_cache().lock().unwrap().insert(key, r.clone());
    r
}

/// Sq^i on a monomial in SW classes. Each bundle is split into its own Chern roots.
pub fn sq_on_sw(i: u32, m: &SwMono) -> SwPoly {
    if i % 2 == 1 {
        return SwPoly::zero();
    }
    let s = i / 2;
    let mut parts: BTreeMap<u32, Partition> = BTreeMap::new();
    for (&(b, k), &e) in m {
        let p = parts.entry(b).or_default();
        p.extend(std::iter::repeat(k).take(e as usize));
    }
    // per-bundle Sq^{2t}, then Cartan across bundles
    let mut acc: BTreeMap<u32, SwPoly> = std::iter::once((0, SwPoly::one())).collect();
    for (b, mut nu) in parts {
        nu.sort_unstable_by(|x, y| y.cmp(x));
        let wt: u32 = nu.iter().sum();
        let mut next: BTreeMap<u32, SwPoly> = BTreeMap::new();
        for t in 0..=wt.min(s) {
            let img: SwPoly = SwPoly {
                terms: sq_e_product(&nu, t).iter().map(|e| nu_to_mono(b, e)).collect(),
            };
            if img.is_zero() {
                continue;
            }
            for (&u, prev) in &acc {
                if u + t > s {
                    continue;
                }
                let e = next.entry(u + t).or_default();
                *e = e.add(&prev.mul(&img));
            }
        }
        acc = next;
    }
    acc.remove(&s).unwrap_or_default()
}

/// Universal Wu classes v_0 … v_N of a single bundle (bundle 0) from Sq(v) = w.
pub fn wu_from_sw(n: u32) -> Vec<SwPoly> {
    let mut v: Vec<SwPoly> = Vec::new();
    for j in 0..=n {
        let mut x = if j % 2 == 0 { SwPoly::w(0, j / 2) } else { SwPoly::zero() };
        for i in 1..=j {
            x = x.add(&v[(j - i) as usize].sq(i));
        }
        v.push(x);
    }
    v
}

// ------------------------------------------------------------------ explicit roots

/// Polynomials over F_2 in finitely many explicit roots of bidegree (2, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChernRootRing {
    pub roots: usize,
}

pub type RootPoly = BTreeSet<Vec<u32>>;

impl ChernRootRing {
    pub fn new(roots: usize) -> Self {
        ChernRootRing { roots }
    }

    pub fn one(&self) -> RootPoly {
        std::iter::once(vec![0; self.roots]).collect()
    }

    pub fn elementary(&self, k: usize) -> RootPoly {
        let mut out = RootPoly::new();
        for mask in 0u64..(1u64 << self.roots) {
            if mask.count_ones() as usize == k {
                out.insert((0..self.roots).map(|i| ((mask >> i) & 1) as u32).collect());
            }
        }
        out
    }

    pub fn mul(&self, a: &RootPoly, b: &RootPoly) -> RootPoly {
        let mut out = RootPoly::new();
        for x in a {
            for y in b {
                toggle(&mut out, x.iter().zip(y).map(|(p, q)| p + q).collect());
            }
        }
        out
    }

    /// Sq^{2s} with Sq²x = x², extended by Cartan.
    pub fn sq(&self, s: u32, a: &RootPoly) -> RootPoly {
        let mut out = RootPoly::new();
        for x in a {
            let mut partial: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), 0)];
            for &e in x {
                let mut next = Vec::new();
                for (v, used) in &partial {
                    for j in 0..=e.min(s - used) {
                        if odd_binomial(e, j) {
                            let mut w = v.clone();
                            w.push(e + j);
                            next.push((w, used + j));
                        }
                    }
                }
                partial = next;
            }
            for (v, used) in partial {
                if used == s {
                    toggle(&mut out, v);
                }
            }
        }
        out
    }

    /// Rewrites a symmetric root polynomial in SW classes of bundle 0.
    pub fn to_sw(&self, a: &RootPoly) -> Result<SwPoly, CharError> {
        let mut a = a.clone();
        let mut out = SwPoly::zero();
        while let Some(lead) = a.last().cloned() {
            if lead.windows(2).any(|w| w[0] < w[1]) {
                return Err(CharError::NotSymmetric(lead));
            }
            let nu = conjugate(&lead.iter().copied().filter(|&x| x > 0).collect::<Vec<_>>());
            let mut prod = self.one();
            for &k in &nu {
                prod = self.mul(&prod, &self.elementary(k as usize));
            }
            for m in prod {
                toggle(&mut a, m);
            }
            out = out.add(&SwPoly::from_monomial(nu_to_mono(0, &nu)));
        }
        Ok(out)
    }

    /// Expands an SW polynomial of bundle 0 over the roots.
    pub fn from_sw(&self, p: &SwPoly) -> RootPoly {
        let mut out = RootPoly::new();
        for m in p.terms() {
            let mut prod = self.one();
            for (&(_, k), &e) in m {
                for _ in 0..e {
                    prod = self.mul(&prod, &self.elementary(k as usize));
                }
            }
            for x in prod {
                toggle(&mut out, x);
            }
        }
        out
    }
}

// ------------------------------------------------------------------ models

/// A ring with action and tangent SW classes w_0 … w_{2d+1} (as ring vectors).
#[derive(Clone, Debug)]
pub struct CharModel {
    pub name: String,
    pub ring: PDRing,
    pub action: SteenrodAction,
    pub tangent: Vec<Vector>,
}

/// F_2[ε,h]/(ε², h^{n+1}) for P^n.
pub fn projective_space_model(n: u32) -> Result<CharModel, CharError> {
    product_model(&[n])
}

/// Künneth model of a product of projective spaces, tensored over F_2[ε]/ε².
pub fn product_model(dims: &[u32]) -> Result<CharModel, CharError> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(CharError::Argument("each factor needs dimension at least 1".into()));
    }
    let d: u32 = dims.iter().sum();
    let mut exps: Vec<Vec<u32>> = vec![Vec::new()];
    for &n in dims {
        exps = exps
            .into_iter()
            .flat_map(|e| {
                (0..=n).map(move |k| {
                    let mut e = e.clone();
                    e.push(k);
                    e
                })
            })
            .collect();
    }
    exps.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    let mut keys: Vec<(u32, Vec<u32>)> = Vec::new();
    for e in &exps {
        keys.push((0, e.clone()));
    }
    for e in &exps {
        keys.push((1, e.clone()));
    }
    keys.sort_by_key(|(a, e)| (2 * e.iter().sum::<u32>() + a, e.clone()));
    let index: HashMap<(u32, Vec<u32>), usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let hname = |j: usize| if dims.len() == 1 { "h".to_string() } else { format!("h{}", j + 1) };
    let basis: Vec<BasisElem> = keys
        .iter()
        .map(|(a, e)| {
            let mut parts = Vec::new();
            if *a == 1 {
                parts.push("e".to_string());
            }
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => parts.push(hname(j)),
                    _ => parts.push(format!("{}^{k}", hname(j))),
                }
            }
            let w: u32 = e.iter().sum();
            BasisElem {
                label: if parts.is_empty() { "1".into() } else { parts.join(" ") },
                deg: (2 * w + a) as i64,
                wt: w as i64,
            }
        })
        .collect();
    let nb = keys.len();
    let mut products = Vec::new();
    for (i, (a, e)) in keys.iter().enumerate() {
        for (j, (b, f)) in keys.iter().enumerate() {
            if a + b > 1 {
                continue;
            }
            let g: Vec<u32> = e.iter().zip(f).map(|(x, y)| x + y).collect();
            if g.iter().zip(dims).any(|(x, n)| x > n) {
                continue;
            }
            products.push((i, j, index[&(a + b, g)], 1));
        }
    }
    let unit = index[&(0, vec![0; dims.len()])];
    let mut trace = vec![0; nb];
    trace[index[&(1, dims.to_vec())]] = 1;
    let ring = PDRing::new(2, d as i64, basis, unit, products, trace)?;

    let mut powers = BTreeMap::new();
    for s in 0..=d {
        let mut table = vec![vec![0u64; nb]; nb];
        for (i, (a, e)) in keys.iter().enumerate() {
            // distribute s over the factors
            let mut partial: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), 0)];
            for (j, &k) in e.iter().enumerate() {
                let mut next = Vec::new();
                for (v, used) in &partial {
                    for t in 0..=(s - used) {
                        if odd_binomial(k, t) && k + t <= dims[j] {
                            let mut w = v.clone();
                            w.push(k + t);
                            next.push((w, used + t));
                        }
                    }
                }
                partial = next;
            }
            for (v, used) in partial {
                if used == s {
                    let k = index[&(*a, v)];
                    table[i][k] ^= 1;
                }
            }
        }
        powers.insert(s, table);
    }
    let action = SteenrodAction {
        beta: SteenrodAction::zero_beta(nb),
        powers,
    };

    // w(T) = Π (1+h_j)^{n_j+1}
    let mut total = ring.one();
    for (j, &n) in dims.iter().enumerate() {
        let mut e = vec![0; dims.len()];
        e[j] = 1;
        let h = ring.basis_vec(index[&(0, e)]);
        let f = ring.add(&ring.one(), &h);
        total = ring.mul(&total, &ring.pow(&f, n + 1));
    }
    let top = 2 * d + 1;
    let tangent: Vec<Vector> = (0..=top)
        .map(|k| {
            let mut v = ring.zero();
            for i in 0..nb {
                if ring.basis[i].deg == k as i64 {
                    v[i] = total[i];
                }
            }
            v
        })
        .collect();
    let name = dims.iter().map(|n| format!("P{n}")).collect::<Vec<_>>().join("x");
    Ok(CharModel {
        name,
        ring,
        action,
        tangent,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WuReport {
    pub model: String,
    /// v_j by the duality definition
    pub wu: Vec<String>,
    pub total_sq_v: String,
    pub w: String,
    pub violations: Vec<Violation>,
}

impl WuReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn total_text(r: &PDRing, parts: &[Vector]) -> String {
    let sum = parts.iter().fold(r.zero(), |acc, v| r.add(&acc, v));
    r.format(&sum)
}

/// Sq(v) = w on the model, and agreement of the duality and inversion routes to v.
pub fn verify_wu_theorem(m: &CharModel) -> Result<WuReport, CharError> {
    let r = &m.ring;
    let a = &m.action;
    let v = wu_classes(r, a)?;
    let top = v.len() - 1;
    let mut violations = Vec::new();
    let mut sqv = Vec::new();
    for k in 0..=top {
        let mut lhs = r.zero();
        for j in 0..=k {
            lhs = r.add(&lhs, &a.sq(r, (k - j) as u32, &v[j]));
        }
        if lhs != m.tangent[k] {
            violations.push(Violation::new(
                "Sq(v) = w",
                [k.to_string(), r.format(&lhs), r.format(&m.tangent[k])],
            ));
        }
        sqv.push(lhs);
    }
    {
        // inversion route, evaluated on the tangent classes
        let generic = wu_from_sw(top as u32);
        let class = |_b: u32, k: u32| -> Vector {
            m.tangent.get(2 * k as usize).cloned().unwrap_or_else(|| r.zero())
        };
        for (j, g) in generic.iter().enumerate() {
            let ev = g.evaluate(r, &class);
            if ev != v[j] {
                violations.push(Violation::new(
                    "duality and inversion routes agree",
                    [j.to_string(), r.format(&v[j]), r.format(&ev)],
                ));
            }
        }
    }
    Ok(WuReport {
        model: m.name.clone(),
        wu: v.iter().map(|x| r.format(x)).collect(),
        total_sq_v: total_text(r, &sqv),
        w: total_text(r, &m.tangent),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(p: &str) -> SwMono {
        SwPoly::parse(p).unwrap().terms().iter().next().unwrap().clone()
    }

    #[test]
    fn small_squares() {
        assert_eq!(sq_on_sw(0, &mono("w4")).to_string(), "w4");
        assert_eq!(sq_on_sw(2, &mono("w2")).to_string(), "w2^2");
        assert_eq!(sq_on_sw(2, &mono("w4")).to_string(), "w2 w4 + w6");
        assert!(sq_on_sw(1, &mono("w4")).is_zero());
    }

    #[test]
    fn wu_small() {
        let v = wu_from_sw(4);
        assert_eq!(v[0].to_string(), "1");
        assert!(v[1].is_zero());
        assert_eq!(v[2].to_string(), "w2");
        assert_eq!(v[4].to_string(), "w2^2 + w4");
    }

    #[test]
    fn projective_plane() {
        let m = projective_space_model(2).unwrap();
        let rep = verify_wu_theorem(&m).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.w, "1 + h + h^2");
    }
}
