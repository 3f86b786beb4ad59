//! Chain-level Bocksteins over Z.
//!
//! A mod-2^n class is an integral cochain u with du ≡ 0 mod 2^n; this is the derived
//! quotient M ⊗ [Z →2^n→ Z] with the second coordinate left implicit. β_n(u) = du/2^n.

mod complex;
mod dga;
mod export;
mod square;

pub use complex::{cohomology, Bideg, Coeffs, CohomologyGroup, GradedComplex};
pub use dga::{
    bockstein_block, change_basis, exterior, pd_block, random_dga, tensor, truncated_poly, CommutativeDGA,
    RandomDga,
};
pub use export::export_pd_instance;
pub use square::{
    compare_bocksteins, equivariant_square, power_operation, total_power, universal_model, verify_mat_form_general,
    verify_psi_images, verify_second_bockstein, ChainMap, EquivariantSquare,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::int::{self, IMat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BockError {
    #[error("malformed complex: {0}")]
    Complex(String),
    #[error("not a cocycle mod 2^{n}: {witness}")]
    NotCocycle { n: u32, witness: String },
    #[error("β_n does not vanish at the cochain level: {witness}")]
    Obstruction { witness: String },
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("pairing is not perfect on {block}")]
    NotPerfect { block: String },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("export failed: {0}")]
    Export(String),
}

/// One identity with its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub identity: String,
    pub holds: bool,
    pub witness: Vec<String>,
}

impl Check {
    pub fn new(identity: &str, holds: bool, witness: Vec<String>) -> Self {
        Check {
            identity: identity.into(),
            holds,
            witness,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, o: Report) {
        self.checks.extend(o.checks);
    }
}

fn pow2(n: u32) -> i128 {
    1i128 << n
}

fn is_cocycle_mod(c: &GradedComplex, v: &[i128], n: u32) -> bool {
    let q = pow2(n);
    c.d(v).iter().all(|x| x.rem_euclid(q) == 0)
}

/// β_n(u) = du / 2^n.
pub fn bockstein_n(c: &GradedComplex, n: u32, u: &[i128]) -> Result<Vec<i128>, BockError> {
    if !is_cocycle_mod(c, u, n) {
        return Err(BockError::NotCocycle {
            n,
            witness: c.format(u),
        });
    }
    Ok(c.d(u).into_iter().map(|x| x / pow2(n)).collect())
}

/// Columns c of a basis of mod-2^n cocycles in bidegree b, as global cochains.
pub fn cocycles_mod(c: &GradedComplex, n: u32, b: Bideg) -> Vec<Vec<i128>> {
    let (src, tgt, m) = c.block(b);
    int::kernel_mod(&m, tgt.len(), src.len(), pow2(n))
        .into_iter()
        .map(|v| c.extend(&src, &v))
        .collect()
}

/// Representatives spanning im β_n ⊆ H^{b+(1,0)}(M/2^n).
pub fn bockstein_image(c: &GradedComplex, n: u32, b: Bideg) -> Vec<Vec<i128>> {
    cocycles_mod(c, n, b)
        .into_iter()
        .map(|u| bockstein_n(c, n, &u).expect("kernel_mod column is a cocycle"))
        .collect()
}

/// Whether u − v vanishes in H^b(M/2^n) modulo the span of `extra`.
pub fn same_class(c: &GradedComplex, n: u32, b: Bideg, u: &[i128], v: &[i128], extra: &[Vec<i128>]) -> bool {
    let idx = c.indices(b);
    let diff: Vec<i128> = u.iter().zip(v).map(|(x, y)| x - y).collect();
    if diff.iter().enumerate().any(|(i, &x)| x != 0 && !idx.contains(&i)) {
        return false;
    }
    let mut gens: Vec<Vec<i128>> = Vec::new();
    let (src, _, m) = c.block((b.0 - 1, b.1));
    for j in 0..src.len() {
        gens.push(int::column(&m, j));
    }
    for k in 0..idx.len() {
        let mut e = vec![0; idx.len()];
        e[k] = pow2(n);
        gens.push(e);
    }
    for x in extra {
        gens.push(c.restrict(&idx, x));
    }
    int::in_span(&gens, &c.restrict(&idx, &diff))
}

/// β_n^{(2)}(u): correct the lift so that du = 2^{2n} z and return z.
pub fn secondary_bockstein(c: &GradedComplex, n: u32, u: &[i128]) -> Result<Vec<i128>, BockError> {
    let w = bockstein_n(c, n, u)?;
    if u.iter().all(|&x| x == 0) {
        return Ok(c.zero());
    }
    let b = c.bidegree_of(u).ok_or_else(|| BockError::Complex("inhomogeneous cochain".into()))?;
    let (src, tgt, m) = c.block(b);
    let rows = tgt.len();
    let q = pow2(n);
    // [D | 2^n I] x = w
    let mut a: IMat = int::zeros(rows, src.len() + rows);
    for i in 0..rows {
        for j in 0..src.len() {
            a[i][j] = m[i][j];
        }
        a[i][src.len() + i] = q;
    }
    let wl = c.restrict(&tgt, &w);
    let x = int::solve(&a, rows, src.len() + rows, &wl).ok_or_else(|| BockError::Obstruction {
        witness: c.format(&w),
    })?;
    Ok(c.extend(&tgt, &x[src.len()..]))
}
