use serde::{Deserialize, Serialize};

use super::{
    bockstein_image, bockstein_n, pow2, same_class, secondary_bockstein, BockError, Bideg, Check, CommutativeDGA,
    GradedComplex, Report,
};

/// x in (a, b), y in (a+1, b), dx = 2^n y.
pub fn universal_model(a: i64, b: i64, n: u32) -> GradedComplex {
    GradedComplex {
        labels: vec!["x".into(), "y".into()],
        bidegrees: vec![(a, b), (a + 1, b)],
        differential: vec![vec![(1, pow2(n))], vec![]],
    }
}

/// Truncated homotopy orbits of C₂ acting on M⊗M by the Koszul swap.
#[derive(Clone, Debug)]
pub struct EquivariantSquare {
    pub base: GradedComplex,
    pub truncation: usize,
    pub complex: GradedComplex,
}

impl EquivariantSquare {
    pub fn index(&self, i: usize, m: usize, m2: usize) -> usize {
        let n = self.base.len();
        i * n * n + m * n + m2
    }
}

fn sign(e: i64) -> i128 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Basis e_i⊗m⊗m′ (0 ≤ i ≤ N) in degree |m|+|m′|−i, with
/// d(e_i⊗w) = e_{i−1}⊗(w + (−1)^i σw) + (−1)^i e_i⊗dw.
pub fn equivariant_square(m: &GradedComplex, truncation: usize) -> EquivariantSquare {
    let n = m.len();
    let id = |i: usize, a: usize, b: usize| i * n * n + a * n + b;
    let mut labels = Vec::new();
    let mut bidegrees = Vec::new();
    let mut diff = Vec::new();
    for i in 0..=truncation {
        for a in 0..n {
            for b in 0..n {
                labels.push(format!("e{i}⊗{}⊗{}", m.labels[a], m.labels[b]));
                let (x, y) = (m.bidegrees[a], m.bidegrees[b]);
                bidegrees.push((x.0 + y.0 - i as i64, x.1 + y.1));
                let mut col: Vec<(usize, i128)> = Vec::new();
                if i > 0 {
                    col.push((id(i - 1, a, b), 1));
                    // σ(a⊗b) = (−1)^{|a||b|} b⊗a
                    let s = sign(i as i64) * sign(x.0 * y.0);
                    col.push((id(i - 1, b, a), s));
                }
                let si = sign(i as i64);
                for &(k, c) in &m.differential[a] {
                    col.push((id(i, k, b), si * c));
                }
                for &(k, c) in &m.differential[b] {
                    col.push((id(i, a, k), si * sign(x.0) * c));
                }
                diff.push(col);
            }
        }
    }
    EquivariantSquare {
        base: m.clone(),
        truncation,
        complex: GradedComplex {
            labels,
            bidegrees,
            differential: diff,
        },
    }
}

/// Images of basis elements under a map of complexes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMap {
    pub images: Vec<Vec<i128>>,
}

impl ChainMap {
    pub fn apply(&self, v: &[i128], target_len: usize) -> Vec<i128> {
        let mut out = vec![0; target_len];
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                for (k, &x) in self.images[i].iter().enumerate() {
                    out[k] += c * x;
                }
            }
        }
        out
    }

    pub fn check(&self, src: &GradedComplex, tgt: &GradedComplex) -> Result<(), BockError> {
        for j in 0..src.len() {
            let e = src.basis_vec(j);
            let l = tgt.d(&self.apply(&e, tgt.len()));
            let r = self.apply(&src.d(&e), tgt.len());
            if l != r {
                return Err(BockError::NotChainMap(format!("fails on {}", src.labels[j])));
            }
        }
        Ok(())
    }
}

/// ψ on e_j⊗w⊗w′ for a strictly commutative target: the product on e_0, zero above.
fn psi_strict(a: &CommutativeDGA, j: i64, w: &[i128], w2: &[i128]) -> Vec<i128> {
    if j == 0 {
        a.mul(w, w2)
    } else {
        a.complex.zero()
    }
}

/// ψ_u = mult∘φ^{⊗2} on the truncated square, with ψ(e_{>0}⊗…) = 0.
pub fn total_power(sq: &EquivariantSquare, a: &CommutativeDGA, phi: &ChainMap) -> Result<ChainMap, BockError> {
    phi.check(&sq.base, &a.complex)?;
    let n = sq.base.len();
    let mut images = Vec::with_capacity(sq.complex.len());
    for i in 0..=sq.truncation {
        for m in 0..n {
            for m2 in 0..n {
                let x = &phi.images[m];
                let y = &phi.images[m2];
                images.push(psi_strict(a, i as i64, x, y));
            }
        }
    }
    let psi = ChainMap { images };
    psi.check(&sq.complex, &a.complex)?;
    Ok(psi)
}

/// Pe^i on a mod-2 cocycle w of degree m: ψ(e_j⊗w⊗w) with j = m − 2i, reduced mod 2.
pub fn power_operation(a: &CommutativeDGA, w: &[i128], i: i64) -> Result<Vec<i128>, BockError> {
    let c = &a.complex;
    let Some((m, _)) = c.bidegree_of(w) else {
        return Ok(c.zero());
    };
    if c.d(w).iter().any(|x| x.rem_euclid(2) != 0) {
        return Err(BockError::NotCocycle {
            n: 1,
            witness: c.format(w),
        });
    }
    let j = m - 2 * i;
    if j < 0 {
        return Ok(c.zero());
    }
    Ok(psi_strict(a, j, w, w).into_iter().map(|x| x.rem_euclid(2)).collect())
}

fn shift(b: Bideg, d: i64) -> Bideg {
    (b.0 + d, b.1)
}

/// The square of the universal class: β_n([2^{n−1}x̄⊗x̄]) = 0 and
/// β_n^{(2)}([2^{n−1}x̄⊗x̄]) = [x̄⊗ȳ] − [2^{n−1}e₁⊗ȳ⊗ȳ] modulo im β_n.
pub fn verify_second_bockstein(a: i64, b: i64, n: u32) -> Result<Report, BockError> {
    let m = universal_model(a, b, n);
    let sq = equivariant_square(&m, (2 * a + 2) as usize);
    let c = &sq.complex;
    let (x, y) = (0, 1);
    let mut s = c.zero();
    s[sq.index(0, x, x)] = pow2(n - 1);
    let deg = (2 * a, 2 * b);
    let mut report = Report::default();

    let beta = bockstein_n(c, n, &s)?;
    let zero = c.zero();
    report.push(Check::new(
        "β_n([2^(n-1) x⊗x]) = 0",
        same_class(c, n, shift(deg, 1), &beta, &zero, &[]),
        vec![c.format(&beta)],
    ));

    let b2 = secondary_bockstein(c, n, &s)?;
    let mut expect = c.zero();
    expect[sq.index(0, x, y)] = 1;
    expect[sq.index(1, y, y)] = -pow2(n - 1);
    let im = bockstein_image(c, n, deg);
    report.push(Check::new(
        "β_n^(2)([2^(n-1) x⊗x]) = [x⊗y] - [2^(n-1) e1⊗y⊗y]",
        same_class(c, n, shift(deg, 1), &b2, &expect, &im),
        vec![c.format(&b2), c.format(&expect)],
    ));
    Ok(report)
}

/// For u a mod-2^n class of a DGA: ψ̄_u(x̄⊗ȳ) = u·β_n(u) and ψ̄_u(e₁⊗ȳ⊗ȳ) = Pe^{a/2}(β_n(u)‾) mod 2.
/// Also checks that ψ_u carries the secondary Bockstein of the universal square to that of 2^{n−1}u².
pub fn verify_psi_images(alg: &CommutativeDGA, u: &[i128], n: u32) -> Result<Report, BockError> {
    let ca = &alg.complex;
    let (a, b) = ca
        .bidegree_of(u)
        .ok_or_else(|| BockError::Complex("u must be nonzero and homogeneous".into()))?;
    if a.rem_euclid(2) != 0 {
        return Err(BockError::Unsupported("u must have even degree".into()));
    }
    let z = bockstein_n(ca, n, u)?;
    let m = universal_model(a, b, n);
    let phi = ChainMap {
        images: vec![u.to_vec(), z.clone()],
    };
    let sq = equivariant_square(&m, (2 * a + 2) as usize);
    let psi = total_power(&sq, alg, &phi)?;
    let cs = &sq.complex;
    let mut report = Report::default();

    let mut xy = cs.zero();
    xy[sq.index(0, 0, 1)] = 1;
    let lhs = psi.apply(&xy, ca.len());
    let rhs = alg.mul(u, &z);
    report.push(Check::new(
        "ψ_u(x⊗y) = u·β_n(u)",
        same_class(ca, n, (2 * a + 1, 2 * b), &lhs, &rhs, &[]),
        vec![ca.format(&lhs), ca.format(&rhs)],
    ));

    let mut e1yy = cs.zero();
    e1yy[sq.index(1, 1, 1)] = 1;
    let lhs = psi.apply(&e1yy, ca.len());
    let zbar: Vec<i128> = z.iter().map(|x| x.rem_euclid(2)).collect();
    let rhs = power_operation(alg, &zbar, a / 2)?;
    report.push(Check::new(
        "ψ_u(e1⊗y⊗y) = Pe^(a/2)(β_n(u)) mod 2",
        same_class(ca, 1, (2 * a + 1, 2 * b), &lhs, &rhs, &[]),
        vec![ca.format(&lhs), ca.format(&rhs)],
    ));

    // naturality of β_n^(2) along ψ_u
    let mut s = cs.zero();
    s[sq.index(0, 0, 0)] = pow2(n - 1);
    let in_square = psi.apply(&secondary_bockstein(cs, n, &s)?, ca.len());
    let pushed = psi.apply(&s, ca.len());
    let in_alg = secondary_bockstein(ca, n, &pushed)?;
    let im = bockstein_image(ca, n, (2 * a, 2 * b));
    report.push(Check::new(
        "ψ_u commutes with β_n^(2)",
        same_class(ca, n, (2 * a + 1, 2 * b), &in_square, &in_alg, &im),
        vec![ca.format(&in_square), ca.format(&in_alg)],
    ));
    Ok(report)
}

/// β_n(2^{n−1}u²) = 0 and β_n^{(2)}(2^{n−1}u²) ≡ u·β_n(u) − [2^{n−1}]Pe^a(β_n(u)‾) mod im β_n,
/// for u of degree 2a.
pub fn verify_mat_form_general(alg: &CommutativeDGA, u: &[i128], n: u32) -> Result<Report, BockError> {
    let c = &alg.complex;
    let mut report = Report::default();
    let Some((deg, wt)) = c.bidegree_of(u) else {
        report.push(Check::new("u = 0: both sides vanish", true, vec![]));
        return Ok(report);
    };
    if deg.rem_euclid(2) != 0 {
        return Err(BockError::Unsupported("u must have even degree".into()));
    }
    let a = deg / 2;
    let z = bockstein_n(c, n, u)?;
    let s: Vec<i128> = alg.mul(u, u).into_iter().map(|x| x * pow2(n - 1)).collect();
    let sb = (2 * deg, 2 * wt);
    let zero = c.zero();

    let beta = bockstein_n(c, n, &s)?;
    report.push(Check::new(
        "β_n(2^(n-1) u²) = 0",
        same_class(c, n, shift(sb, 1), &beta, &zero, &[]),
        vec![c.format(&beta)],
    ));

    let lhs = secondary_bockstein(c, n, &s)?;
    let zbar: Vec<i128> = z.iter().map(|x| x.rem_euclid(2)).collect();
    let pe = power_operation(alg, &zbar, a)?;
    let rhs: Vec<i128> = alg
        .mul(u, &z)
        .iter()
        .zip(&pe)
        .map(|(p, q)| p - pow2(n - 1) * q)
        .collect();
    let im = bockstein_image(c, n, sb);
    report.push(Check::new(
        "β_n^(2)(2^(n-1) u²) = u·β_n(u) - [2^(n-1)] Pe^a(β_n(u))",
        same_class(c, n, shift(sb, 1), &lhs, &rhs, &im),
        vec![c.format(&lhs), c.format(&rhs)],
    ));
    Ok(report)
}

/// β_n([2^{n−1}]v) against the connecting map of Z/2^n →2→ Z/2^{n+1} → Z/2,
/// the latter computed from the lift v + 2w (w an arbitrary cochain).
pub fn compare_bocksteins(c: &GradedComplex, v: &[i128], w: &[i128], n: u32) -> Result<Check, BockError> {
    let Some(b) = c.bidegree_of(v) else {
        return Ok(Check::new("β_n([2^(n-1)]v) = β_(2,2^n)(v)", true, vec!["0".into(), "0".into()]));
    };
    if c.d(v).iter().any(|x| x.rem_euclid(2) != 0) {
        return Err(BockError::NotCocycle {
            n: 1,
            witness: c.format(v),
        });
    }
    let scaled: Vec<i128> = v.iter().map(|x| x * pow2(n - 1)).collect();
    let lhs = bockstein_n(c, n, &scaled)?;
    let lift: Vec<i128> = v.iter().zip(w).map(|(x, y)| x + 2 * y).collect();
    let q = pow2(n + 1);
    let rhs: Vec<i128> = c
        .d(&lift)
        .into_iter()
        .map(|x| x.rem_euclid(q) / 2)
        .collect();
    Ok(Check::new(
        "β_n([2^(n-1)]v) = β_(2,2^n)(v)",
        same_class(c, n, shift(b, 1), &lhs, &rhs, &[]),
        vec![c.format(&lhs), c.format(&rhs)],
    ))
}
