//! Coefficients: polynomials in τ over F_p, truncated to F_p at the residue-field point.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// ρ vanishes on both bases; kept as a constant so the choice is visible.
pub const RHO: u32 = 0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("unknown base {0:?} (expected \"k\" or \"O\")")]
    UnknownBase(String),
    #[error("coefficient digit {digit} out of range for p = {p}")]
    Digit { digit: u32, p: u32 },
    #[error("τ-power {0} is not allowed at the residue-field point")]
    TauAtK(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    #[serde(rename = "k")]
    K,
    #[serde(rename = "O")]
    O,
}

impl Base {
    pub fn parse(s: &str) -> Result<Self, ScalarError> {
        match s {
            "k" | "K" => Ok(Base::K),
            "O" | "o" => Ok(Base::O),
            other => Err(ScalarError::UnknownBase(other.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Base::K => "k",
            Base::O => "O",
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self, ScalarError> {
        if p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            Ok(Prime(p))
        } else {
            Err(ScalarError::NotPrime(p))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Element of F_p[τ]: coefficient of τ^k at index k, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar(Vec<u32>);

impl Scalar {
    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Lowest τ-power carrying a nonzero digit.
    pub fn tau_valuation(&self) -> Option<usize> {
        self.0.iter().position(|&c| c != 0)
    }

    /// Value of the constant term.
    pub fn constant(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }
}

/// The coefficient ring selected by a prime and a base flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    pub p: Prime,
    pub base: Base,
}

impl Ring {
    pub fn new(p: u32, base: Base) -> Result<Self, ScalarError> {
        Ok(Ring {
            p: Prime::new(p)?,
            base,
        })
    }

    pub fn p(&self) -> u32 {
        self.p.0
    }

    fn trim(&self, mut v: Vec<u32>) -> Scalar {
        if self.base == Base::K {
            v.truncate(1);
        }
        while v.last() == Some(&0) {
            v.pop();
        }
        Scalar(v)
    }

    pub fn zero(&self) -> Scalar {
        Scalar(Vec::new())
    }

    pub fn one(&self) -> Scalar {
        Scalar(vec![1])
    }

    pub fn int(&self, n: i64) -> Scalar {
        let p = self.p() as i64;
        self.trim(vec![n.rem_euclid(p) as u32])
    }

    /// c·τ^k; zero at the residue-field point when k > 0.
    pub fn monomial(&self, c: i64, k: usize) -> Scalar {
        let mut v = vec![0; k + 1];
        v[k] = c.rem_euclid(self.p() as i64) as u32;
        self.trim(v)
    }

    pub fn tau_pow(&self, k: usize) -> Scalar {
        self.monomial(1, k)
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Scalar, ScalarError> {
        for &d in digits {
            if d >= self.p() {
                return Err(ScalarError::Digit { digit: d, p: self.p() });
            }
        }
        if self.base == Base::K {
            if let Some(k) = digits.iter().skip(1).position(|&d| d != 0) {
                return Err(ScalarError::TauAtK(k + 1));
            }
        }
        Ok(self.trim(digits.to_vec()))
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        let p = self.p();
        let n = a.0.len().max(b.0.len());
        let v = (0..n)
            .map(|i| (a.0.get(i).copied().unwrap_or(0) + b.0.get(i).copied().unwrap_or(0)) % p)
            .collect();
        self.trim(v)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        let p = self.p();
        self.trim(a.0.iter().map(|&c| (p - c) % p).collect())
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let p = self.p() as u64;
        let mut v = vec![0u64; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            for (j, &y) in b.0.iter().enumerate() {
                v[i + j] = (v[i + j] + x as u64 * y as u64) % p;
            }
        }
        self.trim(v.into_iter().map(|c| c as u32).collect())
    }

    pub fn scale(&self, a: &Scalar, c: i64) -> Scalar {
        self.mul(a, &self.int(c))
    }

    /// Multiplication by τ^k.
    pub fn shift(&self, a: &Scalar, k: usize) -> Scalar {
        if a.is_zero() {
            return self.zero();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(&a.0);
        self.trim(v)
    }

    pub fn fmt_scalar(&self, a: &Scalar) -> String {
        let parts: Vec<String> = a
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "tau".to_string(),
                (1, c) => format!("{c}tau"),
                (k, 1) => format!("tau^{k}"),
                (k, c) => format!("{c}tau^{k}"),
            })
            .collect();
        match parts.len() {
            0 => "0".to_string(),
            1 => parts[0].clone(),
            _ => format!("({})", parts.join("+")),
        }
    }
}

/// Binomial coefficient mod p by Lucas' theorem; zero outside 0 ≤ k ≤ n.
pub fn binomial_mod(n: i64, k: i64, p: u32) -> u32 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let p = p as i64;
    let (mut n, mut k) = (n, k);
    let mut acc: i64 = 1;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        acc = acc * small_binomial(a, b) % p;
        n /= p;
        k /= p;
    }
    acc as u32
}

fn small_binomial(n: i64, k: i64) -> i64 {
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r as i64
}
