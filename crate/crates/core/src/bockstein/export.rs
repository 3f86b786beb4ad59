use std::collections::BTreeMap;

use super::{bockstein_n, cohomology, power_operation, pow2, BockError, Bideg, Coeffs, CohomologyGroup, CommutativeDGA};
use crate::action::{BasisElem, ModTwoData, PDRingModN};
use crate::linalg::int;

fn abs_det(cols: &[Vec<i128>], n: usize) -> i128 {
    if n == 0 {
        return 1;
    }
    let m = int::from_columns(cols, n);
    let s = int::snf(&m, n, cols.len());
    s.diag.iter().product::<i128>().abs()
}

/// Injectivity of G → Hom(G′, Z/2^n) given the pairing matrix on generators.
fn injective(p: &[Vec<i128>], exps: &[u32], n: u32) -> bool {
    let r = exps.len();
    if r == 0 {
        return true;
    }
    let r2 = p.first().map_or(0, |row| row.len());
    // rows: constraints indexed by G′ generators; columns: coordinates on G
    let mut t = int::zeros(r2, r);
    for i in 0..r {
        for j in 0..r2 {
            t[j][i] = p[i][j];
        }
    }
    let ker = int::kernel_mod(&t, r2, r, pow2(n));
    let want: i128 = exps.iter().map(|&k| pow2(k)).product();
    abs_det(&ker, r) == want
}

/// Cohomology mod 2^n of a DGA with a perfect pairing into Z/2^n at (2D+1, D),
/// packaged as a PDRingModN with β_n computed on the chains.
pub fn export_pd_instance(alg: &CommutativeDGA, dim: i64, n: u32) -> Result<PDRingModN, BockError> {
    if dim % 2 != 0 {
        return Err(BockError::Export("the dimension parameter must be even".into()));
    }
    let c = &alg.complex;
    let top = (2 * dim + 1, dim);
    let mut groups: BTreeMap<Bideg, CohomologyGroup> = BTreeMap::new();
    for b in c.bidegree_set() {
        let g = cohomology(c, Coeffs::Mod2Pow(n), b);
        if !g.is_empty() {
            groups.insert(b, g);
        }
    }
    let top_group = groups
        .get(&top)
        .ok_or_else(|| BockError::Export(format!("no cohomology in the top bidegree {top:?}")))?;
    if top_group.orders != vec![pow2(n)] {
        return Err(BockError::Export(format!("top piece is {}, not Z/2^{n}", top_group.describe())));
    }

    // generator numbering and per-group rescaling (the unit class becomes the generator of H^{0,0})
    let mut basis = Vec::new();
    let mut order_exp = Vec::new();
    let mut offset: BTreeMap<Bideg, usize> = BTreeMap::new();
    let mut rescale: BTreeMap<Bideg, i128> = BTreeMap::new();
    for (b, g) in &groups {
        offset.insert(*b, basis.len());
        let exps = g
            .order_exponents()
            .ok_or_else(|| BockError::Export(format!("H^{b:?} is {}", g.describe())))?;
        for (i, &k) in exps.iter().enumerate() {
            let label = if g.len() == 1 {
                format!("H{},{}", b.0, b.1)
            } else {
                format!("H{},{}#{}", b.0, b.1, i)
            };
            basis.push(BasisElem {
                label,
                deg: b.0,
                wt: b.1,
            });
            order_exp.push(k);
        }
    }
    let unit_vec = c.basis_vec(alg.unit);
    let unit_group = groups
        .get(&(0, 0))
        .ok_or_else(|| BockError::Export("H^{0,0} vanishes".into()))?;
    let uc = unit_group.coords(&unit_vec).expect("unit is a cocycle");
    if uc.len() != 1 || uc[0] % 2 == 0 {
        return Err(BockError::Export("H^{0,0} is not generated by the unit".into()));
    }
    rescale.insert((0, 0), uc[0]);
    basis[offset[&(0, 0)]].label = "1".into();

    let coords_global = |v: &[i128]| -> Result<Vec<i128>, BockError> {
        let mut out = vec![0i128; basis.len()];
        let Some(b) = c.bidegree_of(v) else { return Ok(out) };
        let Some(g) = groups.get(&b) else { return Ok(out) };
        let mut x = g
            .coords(v)
            .ok_or_else(|| BockError::Export(format!("{} is not a cocycle mod 2^{n}", c.format(v))))?;
        if let Some(&s) = rescale.get(&b) {
            // unit = s·g, so g = s^{-1}·unit and coordinates divide by s
            let q = pow2(n);
            let inv = (1..q).find(|t| (t * s).rem_euclid(q) == 1).unwrap_or(1);
            x = x.iter().map(|v| v * inv).collect();
        }
        for (i, xi) in x.into_iter().enumerate() {
            out[offset[&b] + i] = xi.rem_euclid(pow2(order_exp[offset[&b] + i]));
        }
        Ok(out)
    };
    let lift = |gi: usize| -> Vec<i128> {
        let b = (basis[gi].deg, basis[gi].wt);
        let g = &groups[&b];
        let k = gi - offset[&b];
        if b == (0, 0) {
            unit_vec.clone()
        } else {
            g.generators[k].clone()
        }
    };

    let nb = basis.len();
    let unit = offset[&(0, 0)];
    let mut products = Vec::new();
    for i in 0..nb {
        for j in 0..nb {
            if i == unit || j == unit {
                continue;
            }
            let p = coords_global(&alg.mul(&lift(i), &lift(j)))?;
            if p.iter().any(|&x| x != 0) {
                products.push((i, j, p));
            }
        }
    }
    let mut bockstein = Vec::new();
    for i in 0..nb {
        bockstein.push(coords_global(&bockstein_n(c, n, &lift(i))?)?);
    }
    let mut trace = vec![0i128; nb];
    trace[offset[&top]] = 1;

    // perfectness on every complementary pair
    for (b, g) in &groups {
        let comp = (2 * dim + 1 - b.0, dim - b.1);
        let Some(h) = groups.get(&comp) else {
            return Err(BockError::NotPerfect {
                block: format!("H^{b:?} × H^{comp:?} (second factor vanishes)"),
            });
        };
        let exps_g = g.order_exponents().unwrap_or_default();
        let exps_h = h.order_exponents().unwrap_or_default();
        let size = |e: &[u32]| e.iter().sum::<u32>();
        let mut p = vec![vec![0i128; h.len()]; g.len()];
        for i in 0..g.len() {
            for j in 0..h.len() {
                let v = coords_global(&alg.mul(&lift(offset[b] + i), &lift(offset[&comp] + j)))?;
                p[i][j] = v[offset[&top]];
            }
        }
        if size(&exps_g) != size(&exps_h) || !injective(&p, &exps_g, n) {
            return Err(BockError::NotPerfect {
                block: format!("H^{b:?} × H^{comp:?}"),
            });
        }
    }

    let mod_two = mod_two_data(alg, dim, n, &groups, &offset, nb)?;
    Ok(PDRingModN {
        n,
        dim,
        basis,
        order_exp,
        unit,
        products,
        bockstein,
        trace,
        mod_two: Some(mod_two),
    })
}

fn mod_two_data(
    alg: &CommutativeDGA,
    dim: i64,
    n: u32,
    groups: &BTreeMap<Bideg, CohomologyGroup>,
    offset: &BTreeMap<Bideg, usize>,
    nb: usize,
) -> Result<ModTwoData, BockError> {
    let c = &alg.complex;
    let mid = (dim + 1, dim / 2);
    let top = (2 * dim + 1, dim);
    let h2 = cohomology(c, Coeffs::Mod2Pow(1), mid);
    let h2top = cohomology(c, Coeffs::Mod2Pow(1), top);
    let source: Vec<usize> = match groups.get(&mid) {
        Some(g) => (0..g.len()).map(|i| offset[&mid] + i).collect(),
        None => Vec::new(),
    };
    let gens_mid: Vec<Vec<i128>> = groups.get(&mid).map(|g| g.generators.clone()).unwrap_or_default();
    let mut reduction = vec![vec![0i128; source.len()]; h2.len()];
    for (col, g) in gens_mid.iter().enumerate() {
        let x = h2.coords(g).ok_or_else(|| BockError::Export("mod-2 reduction failed".into()))?;
        for (row, v) in x.into_iter().enumerate() {
            reduction[row][col] = v.rem_euclid(2);
        }
    }
    let mut pe = vec![vec![0u64; h2.len()]; h2top.len()];
    for (col, w) in h2.generators.iter().enumerate() {
        let img = power_operation(alg, w, dim / 2)?;
        if let Some(x) = h2top.coords(&img) {
            for (row, v) in x.into_iter().enumerate() {
                pe[row][col] = v.rem_euclid(2) as u64;
            }
        }
    }
    let mut lift = vec![vec![0i128; h2top.len()]; nb];
    let tg = &groups[&top];
    for (col, v) in h2top.generators.iter().enumerate() {
        let scaled: Vec<i128> = v.iter().map(|x| x * pow2(n - 1)).collect();
        let x = tg
            .coords(&scaled)
            .ok_or_else(|| BockError::Export("[2^(n-1)] lift failed".into()))?;
        for (k, xv) in x.into_iter().enumerate() {
            lift[offset[&top] + k][col] = xv;
        }
    }
    Ok(ModTwoData {
        reduction: reduction
            .into_iter()
            .map(|r| r.into_iter().map(|x| x as u64).collect())
            .collect(),
        pe,
        lift,
        source,
    })
}
