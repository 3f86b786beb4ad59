use serde::{Deserialize, Serialize};
use std::fmt;

use super::SteenrodError;
use crate::scalar::{Ring, Scalar};

/// A generator of the algebra: the Bockstein or a reduced power P^i (i ≥ 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    #[serde(rename = "beta")]
    Beta,
    P(u32),
}

pub type Word = Vec<Gen>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub deg: i64,
    pub wt: i64,
}

impl Bidegree {
    pub const ZERO: Bidegree = Bidegree { deg: 0, wt: 0 };

    pub fn new(deg: i64, wt: i64) -> Self {
        Bidegree { deg, wt }
    }
}

impl std::ops::Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.deg + o.deg, self.wt + o.wt)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.deg, self.wt)
    }
}

pub fn gen_bidegree(g: Gen, p: u32) -> Bidegree {
    match g {
        Gen::Beta => Bidegree::new(1, 0),
        Gen::P(i) => {
            let q = i as i64 * (p as i64 - 1);
            Bidegree::new(2 * q, q)
        }
    }
}

pub fn bidegree_of(w: &[Gen], p: u32) -> Bidegree {
    w.iter().fold(Bidegree::ZERO, |acc, &g| acc + gen_bidegree(g, p))
}

/// Drops P^0 factors, which act as the identity.
pub fn strip_units(w: &[Gen]) -> Word {
    w.iter().copied().filter(|g| *g != Gen::P(0)).collect()
}

pub fn is_admissible(w: &[Gen], p: u32) -> bool {
    Adm::from_word(w, p).is_some()
}

/// An element of the admissible set, stored as its encoded tuple
/// (r, ε_r, i_r, …, ε_1, i_1, ε_0). The derived order is lexicographic on that tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Adm(Vec<u32>);

impl Adm {
    pub fn unit() -> Self {
        Adm(vec![0, 0])
    }

    pub fn encoded(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0[0] as usize
    }

    pub fn is_empty(&self) -> bool {
        self.to_word().is_empty()
    }

    /// Builds from (ε_r, i_r, …, ε_1, i_1, ε_0) without checking admissibility.
    pub fn from_parts(eps: &[u32], is: &[u32]) -> Self {
        let r = is.len();
        assert_eq!(eps.len(), r + 1);
        let mut v = vec![r as u32];
        for j in (0..r).rev() {
            v.push(eps[j + 1]);
            v.push(is[j]);
        }
        v.push(eps[0]);
        Adm(v)
    }

    /// Decodes into (ε_0..ε_r, i_1..i_r), both indexed from the right.
    pub fn parts(&self) -> (Vec<u32>, Vec<u32>) {
        let r = self.len();
        let mut eps = vec![0; r + 1];
        let mut is = vec![0; r];
        for k in 0..r {
            let j = r - k;
            eps[j] = self.0[1 + 2 * k];
            is[j - 1] = self.0[2 + 2 * k];
        }
        eps[0] = self.0[2 * r + 1];
        (eps, is)
    }

    pub fn to_word(&self) -> Word {
        let (eps, is) = self.parts();
        let r = is.len();
        let mut w = Vec::new();
        for j in (1..=r).rev() {
            if eps[j] == 1 {
                w.push(Gen::Beta);
            }
            w.push(Gen::P(is[j - 1]));
        }
        if eps[0] == 1 {
            w.push(Gen::Beta);
        }
        w
    }

    /// Returns the admissible tuple for `w`, or None if `w` is not in the admissible set.
    pub fn from_word(w: &[Gen], p: u32) -> Option<Adm> {
        // split as β^{ε_r} P^{i_r} … P^{i_1} β^{ε_0}
        let mut eps = Vec::new();
        let mut is = Vec::new();
        let mut pending_beta = 0u32;
        for &g in w {
            match g {
                Gen::Beta => {
                    if pending_beta == 1 {
                        return None;
                    }
                    pending_beta = 1;
                }
                Gen::P(0) => return None,
                Gen::P(i) => {
                    eps.push(pending_beta);
                    is.push(i);
                    pending_beta = 0;
                }
            }
        }
        eps.push(pending_beta);
        // eps/is currently left-to-right: eps[0] = ε_r, is[0] = i_r
        eps.reverse();
        is.reverse();
        for j in 1..is.len() {
            if (is[j] as u64) < p as u64 * is[j - 1] as u64 + eps[j] as u64 {
                return None;
            }
        }
        Some(Adm::from_parts(&eps, &is))
    }

    pub fn bidegree(&self, p: u32) -> Bidegree {
        bidegree_of(&self.to_word(), p)
    }
}

/// Square index m of Sq^m for a p = 2 generator block.
pub fn to_sq(w: &[Gen]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut k = 0;
    while k < w.len() {
        match (w[k], w.get(k + 1)) {
            (Gen::Beta, Some(Gen::P(i))) => {
                out.push(2 * i + 1);
                k += 2;
            }
            (Gen::Beta, _) => {
                out.push(1);
                k += 1;
            }
            (Gen::P(i), _) => {
                if i > 0 {
                    out.push(2 * i);
                }
                k += 1;
            }
        }
    }
    out
}

pub fn from_sq(sq: &[u32]) -> Word {
    let mut w = Vec::new();
    for &m in sq {
        if m % 2 == 1 {
            w.push(Gen::Beta);
        }
        if m >= 2 {
            w.push(Gen::P(m / 2));
        }
    }
    w
}

pub fn format_word(w: &[Gen], p: u32) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    if p == 2 {
        return to_sq(w).iter().map(|m| format!("Sq{m}")).collect::<Vec<_>>().join(" ");
    }
    w.iter()
        .map(|g| match g {
            Gen::Beta => "b".to_string(),
            Gen::P(i) => format!("P{i}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a whitespace- or dot-separated word such as "Sq2 Sq1", "b P2 P1" or "P^3".
pub fn parse_word(s: &str, p: u32) -> Result<Word, SteenrodError> {
    let mut w = Vec::new();
    for tok in s.split(|c: char| c.is_whitespace() || c == '.' || c == '*').filter(|t| !t.is_empty()) {
        if tok == "1" {
            continue;
        }
        let lower = tok.to_ascii_lowercase();
        if matches!(lower.as_str(), "b" | "beta") || tok == "β" {
            w.push(Gen::Beta);
            continue;
        }
        let (head, num) = if let Some(rest) = tok.strip_prefix("Sq").or_else(|| tok.strip_prefix("sq")) {
            ("Sq", rest)
        } else if let Some(rest) = tok.strip_prefix('P') {
            ("P", rest)
        } else {
            return Err(SteenrodError::Parse(format!("unknown generator {tok:?}")));
        };
        let num = num.trim_start_matches('^');
        let n: u32 = num
            .parse()
            .map_err(|_| SteenrodError::Parse(format!("bad exponent in {tok:?}")))?;
        match head {
            "Sq" => {
                if p != 2 {
                    return Err(SteenrodError::Parse("Sq notation needs p = 2".into()));
                }
                w.extend(from_sq(&[n]));
            }
            _ => {
                if n > 0 {
                    w.push(Gen::P(n));
                }
            }
        }
    }
    Ok(w)
}

/// Parses "c tau^k word + ..." where the integer c and the τ-power are optional.
pub fn parse_combination(s: &str, ring: Ring) -> Result<Vec<(Word, Scalar)>, SteenrodError> {
    let mut out = Vec::new();
    for (k, part) in s.split('+').enumerate() {
        let mut toks = part.split_whitespace().peekable();
        if toks.peek().is_none() {
            return Err(SteenrodError::Parse(format!("empty term {} in {s:?}", k + 1)));
        }
        let mut c = 1i64;
        if let Some(n) = toks.peek().and_then(|t| t.parse::<i64>().ok()) {
            c = n;
            toks.next();
        }
        let mut e = 0usize;
        if let Some(t) = toks.peek().and_then(|t| t.strip_prefix("tau").or_else(|| t.strip_prefix('τ'))) {
            let t = t.trim_start_matches('^');
            e = if t.is_empty() {
                1
            } else {
                t.parse().map_err(|_| SteenrodError::Parse(format!("bad τ exponent in term {}", k + 1)))?
            };
            toks.next();
        }
        let w = parse_word(&toks.collect::<Vec<_>>().join(" "), ring.p())?;
        out.push((w, ring.monomial(c, e)));
    }
    Ok(out)
}
