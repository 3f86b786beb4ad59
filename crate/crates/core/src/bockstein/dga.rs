use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BockError, GradedComplex};
use crate::bockstein::Bideg;

/// Strictly graded-commutative, associative, unital DGA over Z on a free basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutativeDGA {
    pub complex: GradedComplex,
    pub unit: usize,
    /// e_i · e_j = Σ c e_k, nonzero products only (the unit is implicit)
    pub products: Vec<(usize, usize, Vec<(usize, i128)>)>,
    #[serde(skip)]
    table: HashMap<(usize, usize), Vec<(usize, i128)>>,
}

fn parity(d: i64) -> bool {
    d.rem_euclid(2) == 1
}

impl CommutativeDGA {
    pub fn new(
        complex: GradedComplex,
        unit: usize,
        products: Vec<(usize, usize, Vec<(usize, i128)>)>,
    ) -> Result<Self, BockError> {
        let mut a = CommutativeDGA {
            complex,
            unit,
            products,
            table: HashMap::new(),
        };
        a.rebuild();
        let problems = a.check_axioms();
        if let Some(p) = problems.first() {
            return Err(BockError::Complex(p.clone()));
        }
        Ok(a)
    }

    /// Rebuilds the lookup table, e.g. after deserialization.
    pub fn rebuild(&mut self) {
        self.table = self
            .products
            .iter()
            .map(|(i, j, v)| ((*i, *j), v.clone()))
            .collect();
    }

    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    pub fn deg(&self, i: usize) -> i64 {
        self.complex.bidegrees[i].0
    }

    fn basis_product(&self, i: usize, j: usize) -> Vec<(usize, i128)> {
        if i == self.unit {
            vec![(j, 1)]
        } else if j == self.unit {
            vec![(i, 1)]
        } else {
            self.table.get(&(i, j)).cloned().unwrap_or_default()
        }
    }

    pub fn mul(&self, x: &[i128], y: &[i128]) -> Vec<i128> {
        let mut out = self.complex.zero();
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                for (k, c) in self.basis_product(i, j) {
                    out[k] += a * b * c;
                }
            }
        }
        out
    }

    /// Violations of unit, associativity, graded commutativity, bidegree and Leibniz.
    pub fn check_axioms(&self) -> Vec<String> {
        let n = self.len();
        let c = &self.complex;
        let mut out = Vec::new();
        if self.unit >= n || c.bidegrees[self.unit] != (0, 0) {
            out.push("unit must be a basis element of bidegree (0,0)".into());
            return out;
        }
        if c.differential[self.unit].iter().any(|&(_, x)| x != 0) {
            out.push("d(1) ≠ 0".into());
        }
        for (i, j, v) in &self.products {
            let (a, b) = (c.bidegrees[*i], c.bidegrees[*j]);
            for &(k, x) in v {
                if x != 0 && c.bidegrees[k] != (a.0 + b.0, a.1 + b.1) {
                    out.push(format!("{}·{} has a component of the wrong bidegree", c.labels[*i], c.labels[*j]));
                }
            }
        }
        for i in 0..n {
            let ei = c.basis_vec(i);
            for j in 0..n {
                let ej = c.basis_vec(j);
                let xy = self.mul(&ei, &ej);
                let yx = self.mul(&ej, &ei);
                let s = if parity(self.deg(i)) && parity(self.deg(j)) { -1 } else { 1 };
                if xy.iter().zip(&yx).any(|(a, b)| *a != s * b) {
                    out.push(format!("graded commutativity fails on {}, {}", c.labels[i], c.labels[j]));
                }
                // Leibniz
                let lhs = c.d(&xy);
                let s = if parity(self.deg(i)) { -1 } else { 1 };
                let r1 = self.mul(&c.d(&ei), &ej);
                let r2 = self.mul(&ei, &c.d(&ej));
                if lhs.iter().zip(r1.iter().zip(&r2)).any(|(l, (a, b))| *l != a + s * b) {
                    out.push(format!("Leibniz fails on {}, {}", c.labels[i], c.labels[j]));
                }
                if xy.iter().all(|&x| x == 0) {
                    continue;
                }
                for k in 0..n {
                    let ek = c.basis_vec(k);
                    if self.mul(&xy, &ek) != self.mul(&ei, &self.mul(&ej, &ek)) {
                        out.push(format!(
                            "associativity fails on {}, {}, {}",
                            c.labels[i], c.labels[j], c.labels[k]
                        ));
                    }
                }
            }
        }
        out
    }

    /// Largest number of basis elements in a single cohomological degree.
    pub fn max_rank_per_degree(&self) -> usize {
        let mut m: BTreeMap<i64, usize> = BTreeMap::new();
        for b in &self.complex.bidegrees {
            *m.entry(b.0).or_insert(0) += 1;
        }
        m.values().copied().max().unwrap_or(0)
    }
}

struct Builder {
    labels: Vec<String>,
    bidegrees: Vec<Bideg>,
    d: Vec<Vec<(usize, i128)>>,
    products: Vec<(usize, usize, Vec<(usize, i128)>)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            labels: Vec::new(),
            bidegrees: Vec::new(),
            d: Vec::new(),
            products: Vec::new(),
        }
    }

    fn push(&mut self, label: &str, b: Bideg) -> usize {
        self.labels.push(label.into());
        self.bidegrees.push(b);
        self.d.push(Vec::new());
        self.labels.len() - 1
    }

    fn finish(self, unit: usize) -> Result<CommutativeDGA, BockError> {
        let c = GradedComplex::new(self.labels, self.bidegrees, self.d)?;
        CommutativeDGA::new(c, unit, self.products)
    }
}

fn power_label(x: &str, i: u32) -> String {
    match i {
        0 => "1".into(),
        1 => x.into(),
        _ => format!("{x}^{i}"),
    }
}

/// Z[x]/(x^{m+1}) with x in bidegree (2, 1) and d = 0.
pub fn truncated_poly(name: &str, m: u32) -> Result<CommutativeDGA, BockError> {
    let mut b = Builder::new();
    let idx: Vec<usize> = (0..=m).map(|i| b.push(&power_label(name, i), (2 * i as i64, i as i64))).collect();
    for i in 1..=m {
        for j in 1..=m {
            if i + j <= m {
                b.products.push((idx[i as usize], idx[j as usize], vec![(idx[(i + j) as usize], 1)]));
            }
        }
    }
    b.finish(idx[0])
}

/// Λ[θ] on one odd generator.
pub fn exterior(name: &str, bideg: Bideg) -> Result<CommutativeDGA, BockError> {
    if bideg.0.rem_euclid(2) != 1 {
        return Err(BockError::Complex("exterior generator must have odd degree".into()));
    }
    let mut b = Builder::new();
    let one = b.push("1", (0, 0));
    b.push(name, bideg);
    b.finish(one)
}

/// Z[x]⊗Λ[y]/(x^{m+1}, x^m y), x in (2,1), y in (3,1), dx = 2^k y.
pub fn bockstein_block(m: u32, k: u32) -> Result<CommutativeDGA, BockError> {
    let mut b = Builder::new();
    let xs: Vec<usize> = (0..=m).map(|i| b.push(&power_label("x", i), (2 * i as i64, i as i64))).collect();
    let ys: Vec<usize> = (0..m)
        .map(|i| {
            let l = if i == 0 { "y".to_string() } else { format!("{} y", power_label("x", i)) };
            b.push(&l, (2 * i as i64 + 3, i as i64 + 1))
        })
        .collect();
    let q = 1i128 << k;
    for i in 1..=m {
        b.d[xs[i as usize]] = vec![(ys[(i - 1) as usize], q * i as i128)];
    }
    for i in 0..=m {
        for j in 0..=m {
            if i > 0 && j > 0 && i + j <= m {
                b.products.push((xs[i as usize], xs[j as usize], vec![(xs[(i + j) as usize], 1)]));
            }
            if j < m && i + j < m && i > 0 {
                b.products.push((xs[i as usize], ys[j as usize], vec![(ys[(i + j) as usize], 1)]));
                b.products.push((ys[j as usize], xs[i as usize], vec![(ys[(i + j) as usize], 1)]));
            }
        }
    }
    b.finish(xs[0])
}

/// Six-cell Poincaré-duality block: a(1,1), x, x′(2,1), y(3,1), T(4,2) with
/// da = 2^k x, dx′ = 2^k y, a·y = x·x′ = T and x′² = νT. `degenerate` drops the products.
pub fn pd_block(k: u32, nu: i128, degenerate: bool) -> Result<CommutativeDGA, BockError> {
    let mut b = Builder::new();
    let one = b.push("1", (0, 0));
    let a = b.push("a", (1, 1));
    let x = b.push("x", (2, 1));
    let xp = b.push("x'", (2, 1));
    let y = b.push("y", (3, 1));
    let t = b.push("T", (4, 2));
    let q = 1i128 << k;
    b.d[a] = vec![(x, q)];
    b.d[xp] = vec![(y, q)];
    if !degenerate {
        b.products.push((a, y, vec![(t, 1)]));
        b.products.push((y, a, vec![(t, -1)]));
        b.products.push((x, xp, vec![(t, 1)]));
        b.products.push((xp, x, vec![(t, 1)]));
        if nu != 0 {
            b.products.push((xp, xp, vec![(t, nu)]));
        }
    }
    b.finish(one)
}

fn join_label(a: &str, b: &str) -> String {
    match (a, b) {
        ("1", _) => b.into(),
        (_, "1") => a.into(),
        _ => format!("{a} {b}"),
    }
}

/// A ⊗ B with d(a⊗b) = da⊗b + (−1)^{|a|} a⊗db and the Koszul product.
pub fn tensor(a: &CommutativeDGA, b: &CommutativeDGA) -> Result<CommutativeDGA, BockError> {
    let (na, nb) = (a.len(), b.len());
    let id = |i: usize, j: usize| i * nb + j;
    let (ca, cb) = (&a.complex, &b.complex);
    let mut labels = Vec::new();
    let mut bidegrees = Vec::new();
    let mut diff = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            labels.push(join_label(&ca.labels[i], &cb.labels[j]));
            let (x, y) = (ca.bidegrees[i], cb.bidegrees[j]);
            bidegrees.push((x.0 + y.0, x.1 + y.1));
            let s = if parity(x.0) { -1 } else { 1 };
            let mut col: Vec<(usize, i128)> = ca.differential[i].iter().map(|&(k, c)| (id(k, j), c)).collect();
            col.extend(cb.differential[j].iter().map(|&(k, c)| (id(i, k), s * c)));
            diff.push(col);
        }
    }
    let complex = GradedComplex::new(labels, bidegrees, diff)?;
    let mut products = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            for k in 0..na {
                for l in 0..nb {
                    if id(i, j) == id(a.unit, b.unit) || id(k, l) == id(a.unit, b.unit) {
                        continue;
                    }
                    let pa = a.basis_product(i, k);
                    let pb = b.basis_product(j, l);
                    if pa.is_empty() || pb.is_empty() {
                        continue;
                    }
                    let s = if parity(cb.bidegrees[j].0) && parity(ca.bidegrees[k].0) { -1 } else { 1 };
                    let mut v = Vec::new();
                    for &(p, x) in &pa {
                        for &(q, y) in &pb {
                            v.push((id(p, q), s * x * y));
                        }
                    }
                    products.push((id(i, j), id(k, l), v));
                }
            }
        }
    }
    CommutativeDGA::new(complex, id(a.unit, b.unit), products)
}

/// Random unimodular change of basis inside every bidegree block except (0,0).
pub fn change_basis(a: &CommutativeDGA, rng: &mut ChaCha8Rng) -> Result<CommutativeDGA, BockError> {
    let n = a.len();
    let c = &a.complex;
    // q: columns are the new basis vectors in old coordinates; qi its inverse
    let mut q = crate::linalg::int::identity(n);
    let mut qi = crate::linalg::int::identity(n);
    let mut touched = vec![false; n];
    for b in c.bidegree_set() {
        if b == (0, 0) {
            continue;
        }
        let idx = c.indices(b);
        if idx.len() < 2 {
            if idx.len() == 1 && rng.gen_bool(0.5) {
                let i = idx[0];
                q[i][i] = -1;
                qi[i][i] = -1;
                touched[i] = true;
            }
            continue;
        }
        for _ in 0..2 * idx.len() {
            let mut pair = idx.clone();
            pair.shuffle(rng);
            let (i, j) = (pair[0], pair[1]);
            let s: i128 = if rng.gen_bool(0.5) { 1 } else { -1 };
            // new column i += s · column j, inverse row j −= s · row i
            for r in 0..n {
                q[r][i] += s * q[r][j];
            }
            for col in 0..n {
                qi[j][col] -= s * qi[i][col];
            }
            touched[i] = true;
        }
    }
    let col = |m: &Vec<Vec<i128>>, j: usize| -> Vec<i128> { (0..n).map(|r| m[r][j]).collect() };
    let to_new = |v: &[i128]| -> Vec<i128> { crate::linalg::int::mat_vec(&qi, v) };
    let labels: Vec<String> = (0..n)
        .map(|i| if touched[i] { format!("f{i}") } else { c.labels[i].clone() })
        .collect();
    let sparse = |v: Vec<i128>| -> Vec<(usize, i128)> {
        v.into_iter().enumerate().filter(|(_, x)| *x != 0).collect()
    };
    let diff: Vec<Vec<(usize, i128)>> = (0..n).map(|j| sparse(to_new(&c.d(&col(&q, j))))).collect();
    let complex = GradedComplex::new(labels, c.bidegrees.clone(), diff)?;
    let mut products = Vec::new();
    for i in 0..n {
        if i == a.unit {
            continue;
        }
        let vi = col(&q, i);
        for j in 0..n {
            if j == a.unit {
                continue;
            }
            let p = to_new(&a.mul(&vi, &col(&q, j)));
            if p.iter().any(|&x| x != 0) {
                products.push((i, j, sparse(p)));
            }
        }
    }
    CommutativeDGA::new(complex, a.unit, products)
}

/// One member of the random corpus with a short description of its blocks.
#[derive(Clone, Debug)]
pub struct RandomDga {
    pub seed: u64,
    pub description: String,
    pub dga: CommutativeDGA,
}

/// Random strictly commutative DGA with at most `max_rank` cells in any degree.
pub fn random_dga(seed: u64, max_rank: usize) -> Result<RandomDga, BockError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let nblocks = rng.gen_range(1..=3);
        let mut parts = Vec::new();
        let mut acc: Option<CommutativeDGA> = None;
        let mut exterior_used = false;
        for _ in 0..nblocks {
            let kind = rng.gen_range(0..3);
            let (blk, desc) = match kind {
                0 => {
                    let m = rng.gen_range(1..=3);
                    (truncated_poly("h", m)?, format!("Z[h]/h^{}", m + 1))
                }
                1 => {
                    let m = rng.gen_range(1..=2);
                    let k = rng.gen_range(1..=3);
                    (bockstein_block(m, k)?, format!("B(m={m},k={k})"))
                }
                _ => {
                    if exterior_used {
                        continue;
                    }
                    exterior_used = true;
                    let bd = if rng.gen_bool(0.5) { (1, 0) } else { (3, 1) };
                    (exterior("t", bd)?, format!("Λ[t{:?}]", bd))
                }
            };
            parts.push(desc);
            acc = Some(match acc {
                None => blk,
                Some(a) => tensor(&a, &blk)?,
            });
        }
        let Some(a) = acc else { continue };
        if a.max_rank_per_degree() > max_rank || a.len() < 3 {
            continue;
        }
        let dga = change_basis(&a, &mut rng)?;
        return Ok(RandomDga {
            seed,
            description: parts.join(" ⊗ "),
            dga,
        });
    }
}
