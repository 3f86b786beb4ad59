use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{pow2, BockError};
use crate::linalg::int::{self, IMat, Quotient};

/// (cohomological degree, weight)
pub type Bideg = (i64, i64);

/// Free bigraded Z-complex; `differential[j]` lists the nonzero entries of d(e_j).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedComplex {
    pub labels: Vec<String>,
    pub bidegrees: Vec<Bideg>,
    pub differential: Vec<Vec<(usize, i128)>>,
}

impl GradedComplex {
    pub fn new(
        labels: Vec<String>,
        bidegrees: Vec<Bideg>,
        differential: Vec<Vec<(usize, i128)>>,
    ) -> Result<Self, BockError> {
        let c = GradedComplex {
            labels,
            bidegrees,
            differential,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), BockError> {
        let n = self.len();
        if self.bidegrees.len() != n || self.differential.len() != n {
            return Err(BockError::Complex("labels, bidegrees and differential differ in length".into()));
        }
        for (j, col) in self.differential.iter().enumerate() {
            let (a, w) = self.bidegrees[j];
            for &(i, c) in col {
                if i >= n {
                    return Err(BockError::Complex(format!("d({}) refers to index {i}", self.labels[j])));
                }
                if c != 0 && self.bidegrees[i] != (a + 1, w) {
                    return Err(BockError::Complex(format!(
                        "d({}) has a component on {} of the wrong bidegree",
                        self.labels[j], self.labels[i]
                    )));
                }
            }
        }
        for j in 0..n {
            let e = self.basis_vec(j);
            let dd = self.d(&self.d(&e));
            if dd.iter().any(|&x| x != 0) {
                return Err(BockError::Complex(format!("d∘d ≠ 0 on {}", self.labels[j])));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn zero(&self) -> Vec<i128> {
        vec![0; self.len()]
    }

    pub fn basis_vec(&self, i: usize) -> Vec<i128> {
        let mut v = self.zero();
        v[i] = 1;
        v
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn d(&self, v: &[i128]) -> Vec<i128> {
        let mut out = self.zero();
        for (j, &c) in v.iter().enumerate() {
            if c != 0 {
                for &(i, x) in &self.differential[j] {
                    out[i] += c * x;
                }
            }
        }
        out
    }

    pub fn bidegree_set(&self) -> BTreeSet<Bideg> {
        self.bidegrees.iter().copied().collect()
    }

    pub fn indices(&self, b: Bideg) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bidegrees[i] == b).collect()
    }

    /// The bidegree of a nonzero homogeneous cochain.
    pub fn bidegree_of(&self, v: &[i128]) -> Option<Bideg> {
        let mut b = None;
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                match b {
                    None => b = Some(self.bidegrees[i]),
                    Some(x) if x != self.bidegrees[i] => return None,
                    _ => {}
                }
            }
        }
        b
    }

    /// d restricted to bidegree b: (source indices, target indices, matrix target × source).
    pub fn block(&self, b: Bideg) -> (Vec<usize>, Vec<usize>, IMat) {
        let src = self.indices(b);
        let tgt = self.indices((b.0 + 1, b.1));
        let mut m = int::zeros(tgt.len(), src.len());
        for (jj, &j) in src.iter().enumerate() {
            for &(i, c) in &self.differential[j] {
                if let Some(ii) = tgt.iter().position(|&t| t == i) {
                    m[ii][jj] += c;
                }
            }
        }
        (src, tgt, m)
    }

    pub fn restrict(&self, idx: &[usize], v: &[i128]) -> Vec<i128> {
        idx.iter().map(|&i| v[i]).collect()
    }

    pub fn extend(&self, idx: &[usize], local: &[i128]) -> Vec<i128> {
        let mut v = self.zero();
        for (k, &i) in idx.iter().enumerate() {
            v[i] = local[k];
        }
        v
    }

    pub fn format(&self, v: &[i128]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match c {
                1 => self.labels[i].clone(),
                -1 => format!("-{}", self.labels[i]),
                _ => format!("{c} {}", self.labels[i]),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ").replace("+ -", "- ")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coeffs {
    Z,
    /// Z/2^m
    Mod2Pow(u32),
}

/// A cohomology group with chosen generators (global cochains).
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub bidegree: Bideg,
    pub coeffs: Coeffs,
    /// 0 means a free summand
    pub orders: Vec<i128>,
    pub generators: Vec<Vec<i128>>,
    idx: Vec<usize>,
    quotient: Quotient,
}

impl CohomologyGroup {
    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// Coordinates of a cocycle against the generators.
    pub fn coords(&self, v: &[i128]) -> Option<Vec<i128>> {
        let local: Vec<i128> = self.idx.iter().map(|&i| v[i]).collect();
        let outside = v.iter().enumerate().any(|(i, &c)| c != 0 && !self.idx.contains(&i));
        if outside {
            return None;
        }
        self.quotient.coords(&local)
    }

    /// log_2 of the order, when the group is a finite 2-group.
    pub fn order_exponents(&self) -> Option<Vec<u32>> {
        self.orders
            .iter()
            .map(|&d| {
                let d = d.abs();
                if d > 0 && d & (d - 1) == 0 {
                    Some(d.trailing_zeros())
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        if self.orders.is_empty() {
            return "0".into();
        }
        self.orders
            .iter()
            .map(|&d| if d == 0 { "Z".to_string() } else { format!("Z/{}", d.abs()) })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// H^b(C; Z) or H^b(C; Z/2^m) via the integral normal form.
pub fn cohomology(c: &GradedComplex, coeffs: Coeffs, b: Bideg) -> CohomologyGroup {
    let (src, tgt, m) = c.block(b);
    let (_, _, prev) = c.block((b.0 - 1, b.1));
    let cocycles = match coeffs {
        Coeffs::Z => int::kernel(&m, tgt.len(), src.len()),
        Coeffs::Mod2Pow(k) => int::kernel_mod(&m, tgt.len(), src.len(), pow2(k)),
    };
    let mut gens: Vec<Vec<i128>> = (0..prev.first().map_or(0, |r| r.len())).map(|j| int::column(&prev, j)).collect();
    if let Coeffs::Mod2Pow(k) = coeffs {
        for i in 0..src.len() {
            let mut e = vec![0; src.len()];
            e[i] = pow2(k);
            gens.push(e);
        }
    }
    let q = Quotient::new(cocycles, &gens, src.len());
    let generators = q.generators.iter().map(|g| c.extend(&src, g)).collect();
    CohomologyGroup {
        bidegree: b,
        coeffs,
        orders: q.orders.iter().map(|d| d.abs()).collect(),
        generators,
        idx: src,
        quotient: q,
    }
}
