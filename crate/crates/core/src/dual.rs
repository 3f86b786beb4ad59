//! The dual Hopf algebra in the basis ξ_α dual to the admissible words.
//!
//! The pairing carries no Koszul sign: ⟨x⊗y, a⊗b⟩ = ⟨x,a⟩⟨y,b⟩. Products and coproducts
//! are transposes of Δ and of multiplication over the finite basis in each degree.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Base, Ring, Scalar};
use crate::steenrod::json::{word_from_json, word_to_json, GenJson};
use crate::steenrod::{Adm, Element, SteenrodAlgebra, SteenrodError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DualError {
    #[error("degree {deg} exceeds the dual window (max {max})")]
    Truncation { deg: i64, max: i64 },
    #[error("{0:?} is not an admissible index")]
    NotAdmissible(String),
    #[error(transparent)]
    Steenrod(#[from] SteenrodError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualElement {
    ring: Ring,
    terms: BTreeMap<Adm, Scalar>,
}

impl DualElement {
    pub fn zero(ring: Ring) -> Self {
        DualElement {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn xi(ring: Ring, a: Adm) -> Self {
        let mut d = Self::zero(ring);
        d.add_term(a, ring.one());
        d
    }

    pub fn unit(ring: Ring) -> Self {
        Self::xi(ring, Adm::unit())
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Adm, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: &Adm) -> Scalar {
        self.terms.get(a).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, a: Adm, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.get(&a) {
            Some(old) => self.ring.add(old, &c),
            None => c,
        };
        if s.is_zero() {
            self.terms.remove(&a);
        } else {
            self.terms.insert(a, s);
        }
    }

    pub fn add(&self, o: &DualElement) -> DualElement {
        let mut d = self.clone();
        for (a, c) in &o.terms {
            d.add_term(a.clone(), c.clone());
        }
        d
    }

    pub fn scale(&self, c: &Scalar) -> DualElement {
        let mut d = Self::zero(self.ring);
        for (a, s) in &self.terms {
            d.add_term(a.clone(), self.ring.mul(s, c));
        }
        d
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let p = self.ring.p();
        self.terms
            .iter()
            .map(|(a, c)| {
                let w = crate::steenrod::format_word(&a.to_word(), p);
                let x = if w == "1" { "xi[]".to_string() } else { format!("xi[{w}]") };
                if *c == self.ring.one() {
                    x
                } else {
                    format!("{} {}", self.ring.fmt_scalar(c), x)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A tensor of dual basis elements.
pub type DualTensor = BTreeMap<(Adm, Adm), Scalar>;

/// Dual computations inside a bounded degree window.
pub struct SteenrodDual {
    alg: Arc<SteenrodAlgebra>,
    max_deg: i64,
    chi_cache: Mutex<HashMap<Adm, DualElement>>,
}

impl SteenrodDual {
    pub fn new(alg: Arc<SteenrodAlgebra>, max_deg: i64) -> Self {
        SteenrodDual {
            alg,
            max_deg,
            chi_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn algebra(&self) -> &SteenrodAlgebra {
        &self.alg
    }

    pub fn ring(&self) -> Ring {
        self.alg.ring()
    }

    pub fn max_deg(&self) -> i64 {
        self.max_deg
    }

    fn deg(&self, a: &Adm) -> i64 {
        self.alg.bidegree(a).deg
    }

    fn window(&self, deg: i64) -> Result<(), DualError> {
        if deg > self.max_deg {
            Err(DualError::Truncation { deg, max: self.max_deg })
        } else {
            Ok(())
        }
    }

    fn check(&self, d: &DualElement) -> Result<(), DualError> {
        if d.ring != self.ring() {
            return Err(SteenrodError::Mismatch("dual element from another ring".into()).into());
        }
        for a in d.terms.keys() {
            self.window(self.deg(a))?;
        }
        Ok(())
    }

    pub fn pair(&self, x: &Element, xi: &DualElement) -> Result<Scalar, DualError> {
        x.check_ring(self.ring())?;
        self.check(xi)?;
        let r = self.ring();
        let mut s = r.zero();
        for (a, c) in x.terms() {
            s = r.add(&s, &r.mul(c, &xi.coeff(a)));
        }
        Ok(s)
    }

    fn mul_basis(&self, a: &Adm, b: &Adm) -> Result<DualElement, DualError> {
        let deg = self.deg(a) + self.deg(b);
        self.window(deg)?;
        let mut out = DualElement::zero(self.ring());
        for g in self.alg.basis_in_degree(deg) {
            out.add_term(g.clone(), self.alg.coproduct_adm(&g).coeff(a, b));
        }
        Ok(out)
    }

    pub fn multiply(&self, x: &DualElement, y: &DualElement) -> Result<DualElement, DualError> {
        self.check(x)?;
        self.check(y)?;
        let r = self.ring();
        let mut out = DualElement::zero(r);
        for (a, c) in &x.terms {
            for (b, d) in &y.terms {
                out = out.add(&self.mul_basis(a, b)?.scale(&r.mul(c, d)));
            }
        }
        Ok(out)
    }

    pub fn coproduct_basis(&self, g: &Adm) -> Result<DualTensor, DualError> {
        let deg = self.deg(g);
        self.window(deg)?;
        let r = self.ring();
        let mut out = DualTensor::new();
        for d1 in 0..=deg {
            let left = self.alg.basis_in_degree(d1);
            let right = self.alg.basis_in_degree(deg - d1);
            for a in &left {
                for b in &right {
                    let c = self.alg.mul_adm(a, b).coeff(g);
                    if !c.is_zero() {
                        let e = out.entry((a.clone(), b.clone())).or_default();
                        *e = r.add(e, &c);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn coproduct(&self, x: &DualElement) -> Result<DualTensor, DualError> {
        self.check(x)?;
        let r = self.ring();
        let mut out = DualTensor::new();
        for (g, c) in &x.terms {
            for (k, s) in self.coproduct_basis(g)? {
                let e = out.entry(k).or_default();
                *e = r.add(e, &r.mul(c, &s));
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Antipode of the dual, from m∘(χ⊗id)∘Δ = unit∘counit.
    pub fn chi_basis(&self, g: &Adm) -> Result<DualElement, DualError> {
        let r = self.ring();
        if *g == Adm::unit() {
            return Ok(DualElement::unit(r));
        }
        if let Some(d) = self.chi_cache.lock().unwrap().get(g) {
            return Ok(d.clone());
        }
        let mut acc = DualElement::zero(r);
        for ((a, b), c) in self.coproduct_basis(g)? {
            if b == Adm::unit() {
                continue;
            }
            let ca = self.chi_basis(&a)?;
            let prod = self.multiply(&ca, &DualElement::xi(r, b))?;
            acc = acc.add(&prod.scale(&c));
        }
        let out = acc.scale(&r.int(-1));
        self.chi_cache.lock().unwrap().insert(g.clone(), out.clone());
        Ok(out)
    }

    pub fn chi(&self, x: &DualElement) -> Result<DualElement, DualError> {
        self.check(x)?;
        let mut out = DualElement::zero(self.ring());
        for (g, c) in &x.terms {
            out = out.add(&self.chi_basis(g)?.scale(c));
        }
        Ok(out)
    }

    /// σ as the transpose of the dual antipode: σ(P^α) = Σ_β ⟨P^α, χ(ξ_β)⟩ P^β.
    pub fn sigma(&self, x: &Element) -> Result<Element, DualError> {
        x.check_ring(self.ring())?;
        let r = self.ring();
        let mut out = Element::zero(r);
        for (a, c) in x.terms() {
            let deg = self.deg(a);
            self.window(deg)?;
            for b in self.alg.basis_in_degree(deg) {
                let s = self.chi_basis(&b)?.coeff(a);
                out.add_term(b, r.mul(c, &s));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualTermJson {
    pub coeff: Vec<u32>,
    pub xi: Vec<GenJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualJson {
    pub p: u32,
    pub base: Base,
    pub terms: Vec<DualTermJson>,
}

impl DualJson {
    pub fn from_dual(d: &DualElement) -> Self {
        DualJson {
            p: d.ring.p(),
            base: d.ring.base,
            terms: d
                .terms
                .iter()
                .map(|(a, c)| DualTermJson {
                    coeff: c.coeffs().to_vec(),
                    xi: word_to_json(&a.to_word()),
                })
                .collect(),
        }
    }

    pub fn to_dual(&self) -> Result<DualElement, DualError> {
        let r = Ring::new(self.p, self.base).map_err(SteenrodError::from)?;
        let mut d = DualElement::zero(r);
        for t in &self.terms {
            let w = word_from_json(&t.xi)?;
            let a = Adm::from_word(&w, self.p).ok_or_else(|| DualError::NotAdmissible(format!("{w:?}")))?;
            d.add_term(a, r.from_digits(&t.coeff).map_err(SteenrodError::from)?);
        }
        Ok(d)
    }
}
