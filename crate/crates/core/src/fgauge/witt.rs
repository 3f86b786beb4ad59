//! W_m(F_{p^f}) as (Z/p^m)[y]/f̃(y), with f̃ the minimal polynomial of a Teichmüller
//! generator so that Frobenius is exactly y ↦ y^p.

use serde::{Deserialize, Serialize};

use super::GaugeError;

pub type Elt = Vec<i128>;
/// Row-major matrix over a Witt ring.
pub type WMat = Vec<Vec<Elt>>;

/// Largest m with p^m < 2^62, so products of reduced coefficients fit in i128.
pub fn max_precision(p: u64) -> u32 {
    let mut k = 0;
    let mut v: i128 = 1;
    while v * (p as i128) < (1i128 << 62) {
        v *= p as i128;
        k += 1;
    }
    k
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

// polynomials over F_p, low degree first, used only to find an irreducible modulus

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = crate::linalg::fp::inv(b[db], p);
    while r.len() > db {
        let c = r[r.len() - 1] * lead_inv % p;
        let shift = r.len() - 1 - db;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r
}

fn monic_from_index(k: u64, d: usize, p: u64) -> Vec<u64> {
    let mut c = Vec::with_capacity(d + 1);
    let mut k = k;
    for _ in 0..d {
        c.push(k % p);
        k /= p;
    }
    c.push(1);
    c
}

fn irreducible_mod_p(g: &[u64], p: u64) -> bool {
    let f = g.len() - 1;
    for d in 1..=f / 2 {
        for k in 0..p.pow(d as u32) {
            if poly_rem(g, &monic_from_index(k, d, p), p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittRing {
    pub p: u64,
    pub f: usize,
    pub m: u32,
    /// c_0..c_{f−1} of f̃(y) = y^f + Σ c_i y^i
    pub modulus: Vec<i128>,
}

impl WittRing {
    /// The modulus is the Teichmüller lift of the first monic irreducible of degree f
    /// in counting order; for F_4 this is y² + y + 1.
    pub fn new(p: u64, f: usize, m: u32) -> Result<Self, GaugeError> {
        if !is_prime(p) {
            return Err(GaugeError::Witt(format!("{p} is not prime")));
        }
        let top = max_precision(p);
        if f == 0 || m == 0 || m > top {
            return Err(GaugeError::Witt(format!("need f ≥ 1 and 1 ≤ m ≤ {top}")));
        }
        if (p as f64).powi(f as i32) > 1e6 {
            return Err(GaugeError::Witt("residue field too large".into()));
        }
        let g = (0..p.pow(f as u32))
            .map(|k| monic_from_index(k, f, p))
            .find(|g| irreducible_mod_p(g, p))
            .expect("irreducible polynomials exist in every degree");
        let raw = WittRing {
            p,
            f,
            m: top,
            modulus: g[..f].iter().map(|&c| c as i128).collect(),
        };
        // Teichmüller generator τ = lim y^{p^{fk}}
        let mut tau = raw.gen();
        for _ in 0..top {
            tau = raw.pow(&tau, p.pow(f as u32) as u128);
        }
        // f̃ = Π_i (Y − τ^{p^i}) has constant coefficients
        let mut poly: Vec<Elt> = vec![raw.one()];
        let mut conj = tau;
        for _ in 0..f {
            let mut next = vec![raw.zero(); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] = raw.add(&next[k + 1], c);
                next[k] = raw.sub(&next[k], &raw.mul(&conj, c));
            }
            poly = next;
            conj = raw.pow(&conj, p as u128);
        }
        let mut modulus = Vec::with_capacity(f);
        for c in &poly[..f] {
            if c[1..].iter().any(|&x| x != 0) {
                return Err(GaugeError::Witt("Teichmüller modulus is not rational".into()));
            }
            modulus.push(c[0]);
        }
        let full = WittRing {
            p,
            f,
            m: top,
            modulus,
        };
        Ok(full.reduce(m))
    }

    /// A ring from an explicit modulus, checked to carry y ↦ y^p as a Frobenius.
    pub fn with_modulus(p: u64, f: usize, m: u32, modulus: Vec<i128>) -> Result<Self, GaugeError> {
        if !is_prime(p) || modulus.len() != f || f == 0 || m == 0 || m > max_precision(p) {
            return Err(GaugeError::Witt("bad parameters".into()));
        }
        let r = WittRing { p, f, m, modulus };
        let r = WittRing {
            modulus: r.modulus.iter().map(|&c| r.red(c)).collect(),
            ..r
        };
        let mut g: Vec<u64> = r.modulus.iter().map(|&c| (c.rem_euclid(p as i128)) as u64).collect();
        g.push(1);
        if !irreducible_mod_p(&g, p) {
            return Err(GaugeError::Witt("modulus is reducible mod p".into()));
        }
        // f̃(y^p) = 0 makes y ↦ y^p a ring map; y^{p^f} = y makes it of order f
        let yp = r.pow(&r.gen(), p as u128);
        let mut val = r.pow(&yp, f as u128);
        for (i, &c) in r.modulus.iter().enumerate() {
            val = r.add(&val, &r.scale(&r.pow(&yp, i as u128), c));
        }
        if !r.is_zero(&val) || r.pow(&r.gen(), p.pow(f as u32) as u128) != r.gen() {
            return Err(GaugeError::Witt("y ↦ y^p is not a Frobenius of order f".into()));
        }
        Ok(r)
    }

    pub fn pm(&self) -> i128 {
        (self.p as i128).pow(self.m)
    }

    pub fn ppow(&self, k: u32) -> i128 {
        (self.p as i128).pow(k)
    }

    /// Residue field size q = p^f.
    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    pub fn name(&self) -> String {
        format!("W_{}(F_{})", self.m, self.q())
    }

    fn red(&self, a: i128) -> i128 {
        a.rem_euclid(self.pm())
    }

    pub fn reduce(&self, m: u32) -> WittRing {
        let r = WittRing {
            p: self.p,
            f: self.f,
            m,
            modulus: Vec::new(),
        };
        WittRing {
            modulus: self.modulus.iter().map(|&c| r.red(c)).collect(),
            ..r
        }
    }

    pub fn reduce_elt(&self, a: &[i128]) -> Elt {
        a.iter().map(|&c| self.red(c)).collect()
    }

    pub fn reduce_mat(&self, a: &WMat) -> WMat {
        a.iter().map(|r| r.iter().map(|x| self.reduce_elt(x)).collect()).collect()
    }

    pub fn zero(&self) -> Elt {
        vec![0; self.f]
    }

    pub fn one(&self) -> Elt {
        self.from_int(1)
    }

    pub fn from_int(&self, a: i128) -> Elt {
        let mut v = self.zero();
        v[0] = self.red(a);
        v
    }

    /// The generator y (for f = 1 this is the integer −c_0).
    pub fn gen(&self) -> Elt {
        if self.f == 1 {
            self.from_int(-self.modulus[0])
        } else {
            let mut v = self.zero();
            v[1] = 1;
            v
        }
    }

    pub fn add(&self, a: &[i128], b: &[i128]) -> Elt {
        a.iter().zip(b).map(|(x, y)| self.red(x + y)).collect()
    }

    pub fn sub(&self, a: &[i128], b: &[i128]) -> Elt {
        a.iter().zip(b).map(|(x, y)| self.red(x - y)).collect()
    }

    pub fn neg(&self, a: &[i128]) -> Elt {
        a.iter().map(|x| self.red(-x)).collect()
    }

    pub fn scale(&self, a: &[i128], k: i128) -> Elt {
        let k = self.red(k);
        a.iter().map(|x| self.red(self.red(*x) * k)).collect()
    }

    pub fn mul(&self, a: &[i128], b: &[i128]) -> Elt {
        let f = self.f;
        let mut prod = vec![0i128; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = self.red(prod[i + j] + self.red(x * y));
            }
        }
        for k in (f..2 * f - 1).rev() {
            let c = prod[k];
            prod[k] = 0;
            if c == 0 {
                continue;
            }
            for (i, &mi) in self.modulus.iter().enumerate() {
                prod[k - f + i] = self.red(prod[k - f + i] - self.red(c * mi));
            }
        }
        prod.truncate(f);
        prod
    }

    pub fn pow(&self, a: &[i128], mut e: u128) -> Elt {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn frob(&self, a: &[i128]) -> Elt {
        let yp = self.pow(&self.gen(), self.p as u128);
        let mut acc = self.zero();
        let mut pw = self.one();
        for &c in a {
            acc = self.add(&acc, &self.scale(&pw, c));
            pw = self.mul(&pw, &yp);
        }
        acc
    }

    pub fn frob_inv(&self, a: &[i128]) -> Elt {
        let mut x = a.to_vec();
        for _ in 1..self.f {
            x = self.frob(&x);
        }
        x
    }

    pub fn is_zero(&self, a: &[i128]) -> bool {
        a.iter().all(|&x| self.red(x) == 0)
    }

    /// p-adic valuation; m for zero.
    pub fn val(&self, a: &[i128]) -> u32 {
        let p = self.p as i128;
        a.iter()
            .map(|&x| {
                let mut x = self.red(x);
                if x == 0 {
                    return self.m;
                }
                let mut v = 0;
                while x % p == 0 {
                    x /= p;
                    v += 1;
                }
                v
            })
            .min()
            .unwrap_or(self.m)
    }

    /// a / p^v for val(a) ≥ v; the result is only meaningful mod p^{m−v}.
    pub fn div_ppow(&self, a: &[i128], v: u32) -> Elt {
        let d = self.ppow(v);
        a.iter()
            .map(|&x| {
                let x = self.red(x);
                debug_assert!(x % d == 0);
                x / d
            })
            .collect()
    }

    pub fn ppow_elt(&self, k: u32) -> Elt {
        if k >= self.m {
            self.zero()
        } else {
            self.from_int(self.ppow(k))
        }
    }

    pub fn inv(&self, a: &[i128]) -> Option<Elt> {
        if self.val(a) > 0 {
            return None;
        }
        // inverse in the residue field, then Newton
        let mut y = self.pow(a, (self.q() - 2) as u128);
        let two = self.from_int(2);
        for _ in 0..=(32 - self.m.leading_zeros()) + 1 {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
        }
        debug_assert_eq!(self.mul(a, &y), self.one());
        Some(y)
    }

    /// (v, u) with a = p^v·u and u a unit; None for zero.
    pub fn split(&self, a: &[i128]) -> Option<(u32, Elt)> {
        let v = self.val(a);
        if v >= self.m {
            return None;
        }
        Some((v, self.div_ppow(a, v)))
    }

    /// Reduction mod p as a vector over F_p in the basis 1, y, …, y^{f−1}.
    pub fn residue(&self, a: &[i128]) -> Vec<u64> {
        a.iter().map(|&x| x.rem_euclid(self.p as i128) as u64).collect()
    }

    /// F_p-matrix of multiplication by a on F_q.
    pub fn residue_mul_matrix(&self, a: &[i128]) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.f]; self.f];
        let mut pw = self.one();
        for c in 0..self.f {
            let col = self.residue(&self.mul(a, &pw));
            for (r, v) in col.into_iter().enumerate() {
                m[r][c] = v;
            }
            pw = self.mul(&pw, &self.gen());
        }
        m
    }

    /// F_p-matrix of the p-power map on F_q.
    pub fn residue_frob_matrix(&self) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.f]; self.f];
        let mut pw = self.one();
        for c in 0..self.f {
            let col = self.residue(&self.frob(&pw));
            for (r, v) in col.into_iter().enumerate() {
                m[r][c] = v;
            }
            pw = self.mul(&pw, &self.gen());
        }
        m
    }

    // matrices

    pub fn mat_zero(&self, r: usize, c: usize) -> WMat {
        vec![vec![self.zero(); c]; r]
    }

    pub fn mat_id(&self, n: usize) -> WMat {
        let mut m = self.mat_zero(n, n);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = self.one();
        }
        m
    }

    pub fn mat_scalar(&self, n: usize, a: &[i128]) -> WMat {
        let mut m = self.mat_zero(n, n);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = a.to_vec();
        }
        m
    }

    /// Product of an r×k and a k×c matrix; k is taken from b.
    pub fn mat_mul(&self, a: &WMat, b: &WMat, c: usize) -> WMat {
        a.iter()
            .map(|row| {
                (0..c)
                    .map(|j| {
                        let mut acc = self.zero();
                        for (k, x) in row.iter().enumerate() {
                            if !self.is_zero(x) {
                                acc = self.add(&acc, &self.mul(x, &b[k][j]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    pub fn mat_vec(&self, a: &WMat, x: &[Elt]) -> Vec<Elt> {
        a.iter()
            .map(|row| {
                let mut acc = self.zero();
                for (k, y) in row.iter().enumerate() {
                    acc = self.add(&acc, &self.mul(y, &x[k]));
                }
                acc
            })
            .collect()
    }

    pub fn mat_scale(&self, a: &WMat, s: &[i128]) -> WMat {
        a.iter().map(|r| r.iter().map(|x| self.mul(x, s)).collect()).collect()
    }

    pub fn mat_frob(&self, a: &WMat) -> WMat {
        a.iter().map(|r| r.iter().map(|x| self.frob(x)).collect()).collect()
    }

    pub fn mat_sub(&self, a: &WMat, b: &WMat) -> WMat {
        a.iter()
            .zip(b)
            .map(|(r, s)| r.iter().zip(s).map(|(x, y)| self.sub(x, y)).collect())
            .collect()
    }

    pub fn column(a: &WMat, j: usize) -> Vec<Elt> {
        a.iter().map(|r| r[j].clone()).collect()
    }

    pub fn from_columns(&self, cols: &[Vec<Elt>], rows: usize) -> WMat {
        (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    }

    /// Smith form over the chain ring W_m: pinv·a·qinv = diag(p^{vals}).
    pub fn snf(&self, a: &WMat, rows: usize, cols: usize) -> Snf {
        let mut a = a.clone();
        let mut pinv = self.mat_id(rows);
        let mut pm = self.mat_id(rows);
        let mut qinv = self.mat_id(cols);
        let mut vals = Vec::new();
        let n = rows.min(cols);
        for k in 0..n {
            let mut best: Option<(u32, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(k) {
                for (j, x) in row.iter().enumerate().skip(k) {
                    let v = self.val(x);
                    if v < self.m && best.is_none_or(|b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
            let Some((v, i, j)) = best else { break };
            a.swap(k, i);
            pinv.swap(k, i);
            for r in pm.iter_mut() {
                r.swap(k, i);
            }
            for r in a.iter_mut() {
                r.swap(k, j);
            }
            for r in qinv.iter_mut() {
                r.swap(k, j);
            }
            let (_, u) = self.split(&a[k][k]).expect("nonzero pivot");
            let ui = self.inv(&u).expect("unit");
            for x in a[k].iter_mut() {
                *x = self.mul(x, &ui);
            }
            for x in pinv[k].iter_mut() {
                *x = self.mul(x, &ui);
            }
            for r in pm.iter_mut() {
                r[k] = self.mul(&r[k], &u);
            }
            for i in 0..rows {
                if i == k || self.is_zero(&a[i][k]) {
                    continue;
                }
                let c = self.div_ppow(&a[i][k], v);
                for j in 0..cols {
                    let t = self.mul(&c, &a[k][j]);
                    a[i][j] = self.sub(&a[i][j], &t);
                }
                for j in 0..rows {
                    let t = self.mul(&c, &pinv[k][j]);
                    pinv[i][j] = self.sub(&pinv[i][j], &t);
                }
                for r in pm.iter_mut() {
                    let t = self.mul(&c, &r[i]);
                    r[k] = self.add(&r[k], &t);
                }
            }
            for j in 0..cols {
                if j == k || self.is_zero(&a[k][j]) {
                    continue;
                }
                let c = self.div_ppow(&a[k][j], v);
                for r in a.iter_mut() {
                    let t = self.mul(&c, &r[k]);
                    r[j] = self.sub(&r[j], &t);
                }
                for r in qinv.iter_mut() {
                    let t = self.mul(&c, &r[k]);
                    r[j] = self.sub(&r[j], &t);
                }
            }
            vals.push(v);
        }
        while vals.len() < n {
            vals.push(self.m);
        }
        Snf {
            vals,
            pinv,
            p: pm,
            qinv,
        }
    }
}

/// pinv·A·qinv = D, A = p·D·q.
#[derive(Clone, Debug)]
pub struct Snf {
    pub vals: Vec<u32>,
    pub pinv: WMat,
    pub p: WMat,
    pub qinv: WMat,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_modulus_and_frobenius() {
        let w = WittRing::new(2, 2, 3).unwrap();
        assert_eq!(w.modulus, vec![1, 1]);
        let y = w.gen();
        assert_eq!(w.pow(&y, 3), w.one());
        let a = vec![3, 5];
        assert_eq!(w.frob(&w.frob(&a)), a);
        // φ ≡ p-power mod p
        let fa = w.frob(&a);
        let ap = w.pow(&a, 2);
        assert_eq!(w.residue(&fa), w.residue(&ap));
        let inv = w.inv(&a).unwrap();
        assert_eq!(w.mul(&a, &inv), w.one());
    }

    #[test]
    fn other_fields() {
        for (p, f) in [(3, 2), (2, 3), (5, 2), (3, 1)] {
            let w = WittRing::new(p, f, 4).unwrap();
            WittRing::with_modulus(p, f, 4, w.modulus.clone()).unwrap();
            let y = w.gen();
            assert_eq!(w.pow(&y, w.q() as u128), y);
        }
    }

    #[test]
    fn smith_form() {
        let w = WittRing::new(2, 2, 3).unwrap();
        let e = |a: i128, b: i128| vec![a, b];
        let a = vec![vec![e(2, 0), e(0, 4)], vec![e(4, 2), e(2, 2)]];
        let s = w.snf(&a, 2, 2);
        let d = w.mat_mul(&w.mat_mul(&s.pinv, &a, 2), &s.qinv, 2);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { w.ppow_elt(s.vals[i]) } else { w.zero() };
                assert_eq!(d[i][j], want);
            }
        }
        let back = w.mat_mul(&s.pinv, &s.p, 2);
        assert_eq!(back, w.mat_id(2));
    }
}
