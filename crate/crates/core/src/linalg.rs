//! Exact linear algebra: Gaussian elimination over F_p and Smith normal form over Z.

/// Dense matrices over F_p, stored row-major.
pub mod fp {
    pub fn inv(x: u64, p: u64) -> u64 {
        pow(x % p, p - 2, p)
    }

    pub fn pow(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    /// Row-reduces in place; returns the pivot columns.
    pub fn rref(a: &mut [Vec<u64>], p: u64) -> Vec<usize> {
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(k) = (r..rows).find(|&i| a[i][c] % p != 0) else {
                continue;
            };
            a.swap(r, k);
            let iv = inv(a[r][c], p);
            for x in a[r].iter_mut() {
                *x = *x * iv % p;
            }
            for i in 0..rows {
                if i != r && a[i][c] != 0 {
                    let f = a[i][c];
                    for j in 0..cols {
                        a[i][j] = (a[i][j] + p * p - f * a[r][j] % p) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(a: &[Vec<u64>], p: u64) -> usize {
        let mut m = a.to_vec();
        rref(&mut m, p).len()
    }

    /// Solves a·x = b, returning one solution if any exists.
    pub fn solve(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        let mut m: Vec<Vec<u64>> = a
            .iter()
            .zip(b)
            .map(|(row, &bi)| {
                let mut r: Vec<u64> = row.iter().map(|x| x % p).collect();
                r.push(bi % p);
                r
            })
            .collect();
        let piv = rref(&mut m, p);
        if piv.contains(&cols) {
            return None;
        }
        let mut x = vec![0; cols];
        for (r, &c) in piv.iter().enumerate() {
            x[c] = m[r][cols];
        }
        Some(x)
    }

    /// Basis of {x : a·x = 0}.
    pub fn nullspace(a: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
        let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
        let piv = rref(&mut m, p);
        let mut out = Vec::new();
        for free in (0..cols).filter(|c| !piv.contains(c)) {
            let mut v = vec![0; cols];
            v[free] = 1;
            for (r, &c) in piv.iter().enumerate() {
                v[c] = (p - m[r][free] % p) % p;
            }
            out.push(v);
        }
        out
    }
}

/// Integer matrices (i128, row-major) and lattices.
pub mod int {
    pub type IMat = Vec<Vec<i128>>;

    pub fn zeros(r: usize, c: usize) -> IMat {
        vec![vec![0; c]; r]
    }

    pub fn identity(n: usize) -> IMat {
        let mut m = zeros(n, n);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        m
    }

    pub fn mat_vec(a: &IMat, x: &[i128]) -> Vec<i128> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
        let n = b.first().map_or(0, |r| r.len());
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| row.iter().enumerate().map(|(k, &x)| x * b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    pub fn transpose(a: &IMat, rows: usize, cols: usize) -> IMat {
        let mut t = zeros(cols, rows);
        for i in 0..rows {
            for j in 0..cols {
                t[j][i] = a[i][j];
            }
        }
        t
    }

    /// Builds a rows × k matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<i128>], rows: usize) -> IMat {
        let mut m = zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m[i][j] = c[i];
            }
        }
        m
    }

    pub fn column(a: &IMat, j: usize) -> Vec<i128> {
        a.iter().map(|r| r[j]).collect()
    }

    fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
        if b == 0 {
            if a < 0 {
                (-a, -1, 0)
            } else {
                (a, 1, 0)
            }
        } else {
            let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
            (g, y, x - a.div_euclid(b) * y)
        }
    }

    pub fn gcd(a: i128, b: i128) -> i128 {
        ext_gcd(a, b).0
    }

    /// U·A·V = diag(d), with U, V unimodular and their inverses.
    #[derive(Clone, Debug)]
    pub struct Snf {
        pub rows: usize,
        pub cols: usize,
        pub diag: Vec<i128>,
        pub u: IMat,
        pub uinv: IMat,
        pub v: IMat,
        pub vinv: IMat,
    }

    impl Snf {
        pub fn rank(&self) -> usize {
            self.diag.iter().filter(|&&d| d != 0).count()
        }
    }

    // rows (i, j) ← op · rows (i, j), op = [[a, b], [c, e]]
    fn rows2(m: &mut IMat, i: usize, j: usize, op: [i128; 4]) {
        let n = m[i].len();
        for k in 0..n {
            let (x, y) = (m[i][k], m[j][k]);
            m[i][k] = op[0] * x + op[1] * y;
            m[j][k] = op[2] * x + op[3] * y;
        }
    }

    // col i ← a·col i + b·col j, col j ← c·col i + e·col j
    fn cols2(m: &mut IMat, i: usize, j: usize, op: [i128; 4]) {
        for row in m.iter_mut() {
            let (x, y) = (row[i], row[j]);
            row[i] = op[0] * x + op[1] * y;
            row[j] = op[2] * x + op[3] * y;
        }
    }

    fn gcd_ops(a: i128, b: i128) -> ([i128; 4], [i128; 4]) {
        if b % a == 0 {
            // plain elimination keeps the pivot row and column fixed
            let q = b / a;
            return ([1, 0, -q, 1], [1, 0, q, 1]);
        }
        let (g, s, t) = ext_gcd(a, b);
        let (ag, bg) = (a / g, b / g);
        // [[s, t], [-b/g, a/g]] has determinant 1
        ([s, t, -bg, ag], [ag, -t, bg, s])
    }

    struct Work {
        m: IMat,
        u: IMat,
        uinv: IMat,
        v: IMat,
        vinv: IMat,
    }

    impl Work {
        fn row_op(&mut self, i: usize, j: usize, op: [i128; 4], inv: [i128; 4]) {
            rows2(&mut self.m, i, j, op);
            rows2(&mut self.u, i, j, op);
            cols2(&mut self.uinv, i, j, [inv[0], inv[2], inv[1], inv[3]]);
        }

        fn col_op(&mut self, i: usize, j: usize, op: [i128; 4], inv: [i128; 4]) {
            cols2(&mut self.m, i, j, op);
            cols2(&mut self.v, i, j, op);
            rows2(&mut self.vinv, i, j, [inv[0], inv[2], inv[1], inv[3]]);
        }

        fn swap_rows(&mut self, i: usize, j: usize) {
            self.m.swap(i, j);
            self.u.swap(i, j);
            for row in self.uinv.iter_mut() {
                row.swap(i, j);
            }
        }

        fn swap_cols(&mut self, i: usize, j: usize) {
            for row in self.m.iter_mut().chain(self.v.iter_mut()) {
                row.swap(i, j);
            }
            self.vinv.swap(i, j);
        }
    }

    pub fn snf(a: &IMat, rows: usize, cols: usize) -> Snf {
        let mut w = Work {
            m: a.clone(),
            u: identity(rows),
            uinv: identity(rows),
            v: identity(cols),
            vinv: identity(cols),
        };
        let mut diag = Vec::new();
        for t in 0..rows.min(cols) {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = w.m[i][j];
                    if x != 0 && best.map_or(true, |(bi, bj)| x.abs() < w.m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            if bi != t {
                w.swap_rows(bi, t);
            }
            if bj != t {
                w.swap_cols(bj, t);
            }
            loop {
                for i in t + 1..rows {
                    if w.m[i][t] != 0 {
                        let (op, inv) = gcd_ops(w.m[t][t], w.m[i][t]);
                        w.row_op(t, i, op, inv);
                    }
                }
                let mut dirty = false;
                for j in t + 1..cols {
                    if w.m[t][j] != 0 {
                        let (op, inv) = gcd_ops(w.m[t][t], w.m[t][j]);
                        w.col_op(t, j, op, inv);
                        dirty = true;
                    }
                }
                if !dirty {
                    break;
                }
            }
            if w.m[t][t] < 0 {
                w.row_op(t, t, [-1, 0, 0, -1], [-1, 0, 0, -1]);
            }
            diag.push(w.m[t][t]);
        }
        while diag.len() < rows.min(cols) {
            diag.push(0);
        }
        Snf {
            rows,
            cols,
            diag,
            u: w.u,
            uinv: w.uinv,
            v: w.v,
            vinv: w.vinv,
        }
    }

    /// One integer solution of A·x = b, if any.
    pub fn solve(a: &IMat, rows: usize, cols: usize, b: &[i128]) -> Option<Vec<i128>> {
        let s = snf(a, rows, cols);
        let ub = mat_vec(&s.u, b);
        let mut y = vec![0i128; cols];
        for i in 0..rows {
            let d = if i < s.diag.len() { s.diag[i] } else { 0 };
            if d == 0 {
                if ub[i] != 0 {
                    return None;
                }
            } else {
                if ub[i] % d != 0 {
                    return None;
                }
                y[i] = ub[i] / d;
            }
        }
        Some(mat_vec(&s.v, &y))
    }

    /// Whether v lies in the lattice spanned by the given vectors.
    pub fn in_span(gens: &[Vec<i128>], v: &[i128]) -> bool {
        let n = v.len();
        if gens.is_empty() {
            return v.iter().all(|&x| x == 0);
        }
        solve(&from_columns(gens, n), n, gens.len(), v).is_some()
    }

    /// Basis (as columns) of {c ∈ Z^cols : A·c ≡ 0 mod q}; always of full rank.
    pub fn kernel_mod(a: &IMat, rows: usize, cols: usize, q: i128) -> Vec<Vec<i128>> {
        let s = snf(a, rows, cols);
        (0..cols)
            .map(|j| {
                let d = if j < s.diag.len() { s.diag[j] } else { 0 };
                let f = if d == 0 { 1 } else { q / gcd(d, q) };
                column(&s.v, j).into_iter().map(|x| x * f).collect()
            })
            .collect()
    }

    /// Basis (as columns) of the integer kernel of A.
    pub fn kernel(a: &IMat, rows: usize, cols: usize) -> Vec<Vec<i128>> {
        let s = snf(a, rows, cols);
        (0..cols)
            .filter(|&j| j >= s.diag.len() || s.diag[j] == 0)
            .map(|j| column(&s.v, j))
            .collect()
    }

    /// The finite-rank quotient L / B with L spanned by independent columns `basis`
    /// and B ⊆ L spanned by `gens`.
    #[derive(Clone, Debug)]
    pub struct Quotient {
        pub n: usize,
        pub basis: Vec<Vec<i128>>,
        /// invariant factors of the cyclic summands kept (0 = free), parallel to `generators`
        pub orders: Vec<i128>,
        pub generators: Vec<Vec<i128>>,
        // coordinates: v ↦ coords_in_basis ↦ U · coords, entry k taken mod orders
        u: IMat,
        keep: Vec<usize>,
    }

    impl Quotient {
        pub fn new(basis: Vec<Vec<i128>>, gens: &[Vec<i128>], n: usize) -> Self {
            let k = basis.len();
            let bm = from_columns(&basis, n);
            let coords: Vec<Vec<i128>> = gens
                .iter()
                .map(|g| solve(&bm, n, k, g).expect("generator outside the lattice"))
                .collect();
            let x = from_columns(&coords, k);
            let s = snf(&x, k, coords.len());
            let mut orders = Vec::new();
            let mut generators = Vec::new();
            let mut keep = Vec::new();
            for i in 0..k {
                let d = if i < s.diag.len() { s.diag[i] } else { 0 };
                if d == 1 {
                    continue;
                }
                // generator = basis · U^{-1} e_i
                let ucol = column(&s.uinv, i);
                let g = mat_vec(&bm, &ucol);
                orders.push(d);
                generators.push(g);
                keep.push(i);
            }
            Quotient {
                n,
                basis,
                orders,
                generators,
                u: s.u,
                keep,
            }
        }

        /// Coordinates of v ∈ L against the generators, reduced mod the orders.
        pub fn coords(&self, v: &[i128]) -> Option<Vec<i128>> {
            let k = self.basis.len();
            let bm = from_columns(&self.basis, self.n);
            let c = solve(&bm, self.n, k, v)?;
            let uc = mat_vec(&self.u, &c);
            Some(
                self.keep
                    .iter()
                    .zip(&self.orders)
                    .map(|(&i, &d)| if d == 0 { uc[i] } else { uc[i].rem_euclid(d) })
                    .collect(),
            )
        }

        pub fn is_zero(&self, v: &[i128]) -> Option<bool> {
            Some(self.coords(v)?.iter().all(|&c| c == 0))
        }

        pub fn len(&self) -> usize {
            self.orders.len()
        }

        pub fn is_empty(&self) -> bool {
            self.orders.is_empty()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::int::*;
    use super::*;

    #[test]
    fn snf_identity() {
        let a: IMat = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = snf(&a, 3, 3);
        let d = mat_mul(&mat_mul(&s.u, &a), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(d[i][j], 0);
                }
            }
        }
        assert_eq!(mat_mul(&s.u, &s.uinv), identity(3));
        assert_eq!(mat_mul(&s.v, &s.vinv), identity(3));
        let mut ds: Vec<i128> = s.diag.clone();
        ds.sort();
        assert_eq!(ds.iter().product::<i128>().abs(), 2 * 6 * 12);
    }

    #[test]
    fn quotient_z_mod_4() {
        let q = Quotient::new(vec![vec![1, 0], vec![0, 1]], &[vec![4, 0], vec![0, 1]], 2);
        assert_eq!(q.orders, vec![4]);
        assert_eq!(q.coords(&[5, 7]).unwrap().len(), 1);
        assert!(q.is_zero(&[8, 3]).unwrap());
    }

    #[test]
    fn fp_solve() {
        let a = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(fp::solve(&a, &[0, 1], 2), Some(vec![1, 1]));
        assert_eq!(fp::nullspace(&[vec![1, 1]], 2, 2), vec![vec![1, 1]]);
    }
}
