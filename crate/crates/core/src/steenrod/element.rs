use std::collections::BTreeMap;

use super::word::{format_word, Adm, Bidegree};
use super::SteenrodError;
use crate::scalar::{Ring, Scalar};

/// A canonical linear combination of admissible words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    ring: Ring,
    terms: BTreeMap<Adm, Scalar>,
}

impl Element {
    pub fn zero(ring: Ring) -> Self {
        Element {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: Ring) -> Self {
        Self::basis(ring, Adm::unit())
    }

    pub fn basis(ring: Ring, a: Adm) -> Self {
        Self::term(ring, a, ring.one())
    }

    pub fn term(ring: Ring, a: Adm, c: Scalar) -> Self {
        let mut e = Self::zero(ring);
        e.add_term(a, c);
        e
    }

    pub fn from_terms(ring: Ring, terms: impl IntoIterator<Item = (Adm, Scalar)>) -> Self {
        let mut e = Self::zero(ring);
        for (a, c) in terms {
            e.add_term(a, c);
        }
        e
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
        let r = self.ring;
        let entry = self.terms.entry(a);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = r.add(o.get(), &c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn check_ring(&self, other: Ring) -> Result<(), SteenrodError> {
        if self.ring != other {
            return Err(SteenrodError::Mismatch(format!(
                "p={} base={} vs p={} base={}",
                self.ring.p(),
                self.ring.base,
                other.p(),
                other.base
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Result<Element, SteenrodError> {
        other.check_ring(self.ring)?;
        let mut e = self.clone();
        for (a, c) in &other.terms {
            e.add_term(a.clone(), c.clone());
        }
        Ok(e)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, SteenrodError> {
        self.add(&other.scale(&self.ring.int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        let r = self.ring;
        Element::from_terms(r, self.terms.iter().map(|(a, s)| (a.clone(), r.mul(s, c))))
    }

    /// Bidegree of each term, counting τ-powers in the weight.
    pub fn term_bidegrees(&self) -> Vec<Bidegree> {
        let p = self.ring.p();
        let mut out = Vec::new();
        for (a, c) in &self.terms {
            let b = a.bidegree(p);
            for (k, &d) in c.coeffs().iter().enumerate() {
                if d != 0 {
                    out.push(Bidegree::new(b.deg, b.wt + k as i64));
                }
            }
        }
        out
    }

    /// The common bidegree of all terms, if there is one.
    pub fn bidegree(&self) -> Result<Option<Bidegree>, SteenrodError> {
        let bs = self.term_bidegrees();
        match bs.first() {
            None => Ok(None),
            Some(&b) if bs.iter().all(|&x| x == b) => Ok(Some(b)),
            Some(_) => Err(SteenrodError::Inhomogeneous),
        }
    }

    pub fn max_degree(&self) -> i64 {
        let p = self.ring.p();
        self.terms.keys().map(|a| a.bidegree(p).deg).max().unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let p = self.ring.p();
        self.terms
            .iter()
            .map(|(a, c)| {
                let w = format_word(&a.to_word(), p);
                if *c == self.ring.one() {
                    w
                } else if w == "1" {
                    self.ring.fmt_scalar(c)
                } else {
                    format!("{} {}", self.ring.fmt_scalar(c), w)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A linear combination of pairs of admissible words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    ring: Ring,
    terms: BTreeMap<(Adm, Adm), Scalar>,
}

impl Tensor {
    pub fn zero(ring: Ring) -> Self {
        Tensor {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<(Adm, Adm), Scalar> {
        &self.terms
    }

    pub fn coeff(&self, a: &Adm, b: &Adm) -> Scalar {
        self.terms.get(&(a.clone(), b.clone())).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, a: Adm, b: Adm, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let r = self.ring;
        let key = (a, b);
        let s = match self.terms.get(&key) {
            Some(old) => r.add(old, &c),
            None => c,
        };
        if s.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, s);
        }
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let p = self.ring.p();
        self.terms
            .iter()
            .map(|((a, b), c)| {
                let body = format!("{} ⊗ {}", format_word(&a.to_word(), p), format_word(&b.to_word(), p));
                if *c == self.ring.one() {
                    body
                } else {
                    format!("{} ({})", self.ring.fmt_scalar(c), body)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}
