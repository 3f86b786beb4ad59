//! Acceptance runner: one line per criterion with its wall time against the limit.
//! Exits nonzero when any criterion fails or overruns.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syntomic::action::{validate_action, PDRingModN};
use syntomic::bockstein::*;
use syntomic::charclass::{product_model, projective_space_model, verify_wu_theorem};
use syntomic::fgauge::{global_sections, supersingular_pipeline, Gauge, LatticeGauge};
use syntomic::scalar::Base;
use syntomic::steenrod::{parse_word, Adm, Gen, SteenrodAlgebra};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn alg(p: u32, base: Base) -> SteenrodAlgebra {
    SteenrodAlgebra::with_params(p, base).unwrap()
}

fn adem_consistency() -> Outcome {
    let mut total = 0;
    for (p, base, d) in [(2, Base::K, 20), (2, Base::O, 20), (3, Base::K, 18)] {
        let (n, bad) = common::associativity_failures(&alg(p, base), d);
        ensure(bad.is_empty(), || format!("p={p} {base}: {} failures, first {}", bad.len(), bad[0]))?;
        total += n;
    }
    Ok(format!("{total} triples"))
}

fn basis_counts() -> Outcome {
    let mut cells = 0;
    for p in [2, 3, 5] {
        let got = common::engine_counts(&alg(p, Base::K), 30);
        let want = common::brute_counts(p, 30);
        ensure(got == want, || format!("p={p}: counts differ"))?;
        cells += want.len();
    }
    Ok(format!("{cells} bidegrees"))
}

fn hopf() -> Outcome {
    let mut n = 0;
    for base in [Base::K, Base::O] {
        let a = Arc::new(alg(2, base));
        let bad = common::hopf_failures(&a, 16);
        ensure(bad.is_empty(), || format!("{base}: {bad:?}"))?;
        n += a.basis_up_to(16).len();
    }
    Ok(format!("{n} basis elements"))
}

fn composites() -> Outcome {
    let text = |a: &SteenrodAlgebra, s: &str| a.reduce_word(&parse_word(s, a.p()).unwrap()).to_text();
    let (k, o) = (alg(2, Base::K), alg(2, Base::O));
    ensure(text(&k, "Sq2 Sq2") == "0", || "Sq2Sq2 over k".into())?;
    ensure(text(&o, "Sq2 Sq2") == "tau Sq3 Sq1", || "Sq2Sq2 over O".into())?;
    ensure(text(&k, "Sq1 Sq1") == "0" && text(&o, "Sq1 Sq1") == "0", || "Sq1Sq1".into())?;
    let a = alg(3, Base::K);
    let e = a.reduce_word(&[Gen::P(1), Gen::P(1)]);
    let p2 = Adm::from_word(&[Gen::P(2)], 3).unwrap();
    ensure(e.terms().len() == 1 && e.coeff(&p2) == a.ring().int(2), || format!("P1P1 = {}", e.to_text()))?;
    Ok("4 composites".into())
}

fn comparison_edges() -> Outcome {
    let mut checks = 0;
    for n in 1..=6 {
        let m = projective_space_model(n).unwrap();
        let (r, act) = (&m.ring, &m.action);
        ensure(validate_action(r, act).unwrap().is_empty(), || format!("P{n} action"))?;
        let mut bidegrees: Vec<(i64, i64)> = r.basis.iter().map(|b| (b.deg, b.wt)).collect();
        bidegrees.dedup();
        for (a, b) in bidegrees {
            let idx = r.in_bidegree(a, b);
            // every vector of the piece, not only basis classes
            for mask in 1u64..(1 << idx.len()) {
                let mut x = r.zero();
                for (j, &k) in idx.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        x = r.add(&x, &r.basis_vec(k));
                    }
                }
                for i in 0..=(a as u32 + 2) {
                    let y = act.sq(r, 2 * i, &x);
                    if a == 2 * i as i64 && b == i as i64 {
                        ensure(y == r.mul(&x, &x), || format!("P{n}: Sq{} on {} is not squaring", 2 * i, r.format(&x)))?;
                        checks += 1;
                    }
                    if 2 * i as i64 > a && i as i64 >= b {
                        ensure(y == r.zero(), || format!("P{n}: Ps^{i} on {} in ({a},{b})", r.format(&x)))?;
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checks} cases"))
}

fn wu() -> Outcome {
    let mut models: Vec<Vec<u32>> = (1..=6).map(|n| vec![n]).collect();
    for a in 1..=5 {
        for b in 1..=(6 - a) {
            models.push(vec![a, b]);
        }
    }
    for dims in &models {
        let rep = verify_wu_theorem(&product_model(dims).unwrap()).unwrap();
        ensure(rep.passed(), || format!("{}: {:?}", rep.model, rep.violations))?;
    }
    Ok(format!("{} models, both routes", models.len()))
}

fn chain_identities() -> Outcome {
    let mut n_ok = 0;
    for n in 1..=3 {
        for a in [2, 4] {
            for b in 0..=3 {
                let r = verify_second_bockstein(a, b, n).unwrap();
                ensure(r.passed(), || format!("second Bockstein n={n} a={a} b={b}: {r:?}"))?;
                n_ok += 1;
            }
        }
    }
    for n in 1u32..=3 {
        for k in 1..=3 {
            let alg = bockstein_block(2, k).unwrap();
            let c = &alg.complex;
            for label in ["x", "x^2"] {
                let mut u = c.zero();
                u[c.index(label).unwrap()] = 1 << n.saturating_sub(k);
                let r = verify_psi_images(&alg, &u, n).unwrap();
                ensure(r.passed(), || format!("psi images n={n} k={k} {label}: {r:?}"))?;
                n_ok += 1;
            }
        }
    }
    Ok(format!("{n_ok} instances"))
}

fn mat_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut dgas, mut classes, mut pairs) = (0, 0, 0);
    for seed in 0..24 {
        let rd = random_dga(seed, 8).unwrap();
        let c = &rd.dga.complex;
        for n in 1..=3 {
            for b in c.bidegree_set() {
                if b.0 % 2 == 0 && b.0 > 0 {
                    for u in cohomology(c, Coeffs::Mod2Pow(n), b).generators {
                        let r = verify_mat_form_general(&rd.dga, &u, n).unwrap();
                        ensure(r.passed(), || format!("seed {seed} n={n}: {r:?}"))?;
                        classes += 1;
                    }
                }
            }
        }
        for b in c.bidegree_set() {
            let idx = c.indices(b);
            for v in cohomology(c, Coeffs::Mod2Pow(1), b).generators {
                for n in 1..=3 {
                    let mut w = c.zero();
                    for &i in &idx {
                        w[i] = rng.gen_range(-3..=3);
                    }
                    let chk = compare_bocksteins(c, &v, &w, n).unwrap();
                    ensure(chk.holds, || format!("seed {seed}: {chk:?}"))?;
                    pairs += 1;
                }
            }
        }
        dgas += 1;
    }
    ensure(classes > 0, || "no classes exercised".into())?;
    Ok(format!("{dgas} DGAs, {classes} classes, {pairs} Bockstein comparisons"))
}

fn exported(k: u32, nu: i128, n: u32) -> PDRingModN {
    let a = tensor(&exterior("t", (1, 0)).unwrap(), &pd_block(k, nu, false).unwrap()).unwrap();
    export_pd_instance(&a, 2, n).unwrap()
}

fn pairings() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut count = 0;
    for k in 1..=3 {
        for nu in [0, 1, 2] {
            for n in 1..=3 {
                let r = exported(k, nu, n);
                let tag = format!("k={k} nu={nu} n={n}");
                ensure(r.validate().is_empty(), || format!("{tag}: {:?}", r.validate()))?;
                ensure(r.check_pairing().unwrap().is_empty(), || format!("{tag}: pairing"))?;
                let m = r.modulus();
                let mid = r.in_bidegree(r.dim, r.dim / 2);
                let random = |rng: &mut ChaCha8Rng| {
                    let mut u = vec![0; r.len()];
                    for &i in &mid {
                        u[i] = rng.gen_range(0..m);
                    }
                    r.reduce(&u)
                };
                for _ in 0..16 {
                    let (u, v) = (random(&mut rng), random(&mut rng));
                    let uv = r.pairing_n(&u, &v).unwrap();
                    let vu = r.pairing_n(&v, &u).unwrap();
                    ensure((uv + vu).rem_euclid(m) == 0, || format!("{tag}: not skew"))?;
                    ensure(r.pairing_n(&u, &u).unwrap().rem_euclid(m) == 0, || format!("{tag}: not alternating"))?;
                    ensure(r.verify_top_formula(&u).unwrap().is_empty(), || format!("{tag}: top formula"))?;
                }
                for i in r.in_bidegree(2 * r.dim, r.dim) {
                    ensure(r.beta(&r.basis_vec(i)).iter().all(|&c| c == 0), || format!("{tag}: β_n on top"))?;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} exported rings"))
}

fn dims(g: &Gauge, ws: std::ops::RangeInclusive<i64>) -> Vec<usize> {
    ws.map(|w| g.piece(w).len()).collect()
}

fn fgauge() -> Outcome {
    let r = supersingular_pipeline(2, 2, 3).map_err(|e| e.to_string())?;
    ensure(r.passed(), || r.render())?;
    // H: rank 2 in every weight, t iso at weights ≤ 0, u iso into weights ≥ 2
    for w in -3..=4 {
        ensure(r.h.piece(w).len() == 2, || format!("H weight {w}: {:?}", r.h.piece(w)))?;
    }
    ensure((-3..=0).all(|w| r.h.t_kind(w) == "~"), || "H t pattern".into())?;
    ensure((1..=4).all(|w| r.h.u_kind(w) == "~") && r.h.u_kind(0) != "~", || "H u pattern".into())?;
    // M: F_q in every weight, u kills v0 and t kills w1
    ensure((-3..=4).all(|w| r.m_gauge.piece(w) == [1]), || "M dimensions".into())?;
    ensure(r.m_gauge.u_kind(0) == "0" && r.m_gauge.t_kind(1) == "0", || "M pattern".into())?;
    ensure(dims(&r.m_tilde, -1..=3) == [2, 2, 3, 2, 2], || format!("M~ {:?}", dims(&r.m_tilde, -1..=3)))?;
    ensure(dims(&r.delta, -1..=3) == [0, 0, 1, 0, 0], || format!("M'/M {:?}", dims(&r.delta, -1..=3)))?;
    ensure(r.delta.u_kind(1) == "0" && r.delta.t_kind(1) == "0", || "M'/M maps".into())?;
    ensure(r.checks.iter().any(|c| c.identity.contains("π∘s") && c.holds), || "p = 2 splitting".into())?;
    let o = LatticeGauge::trivial(2, 1).unwrap().to_gauge(1).unwrap();
    let hs = global_sections(&o).map_err(|e| e.to_string())?;
    ensure(hs == (1, 1), || format!("global sections of O: {hs:?}"))?;
    Ok("H, M, M~, M'/M tables; H(O) = (1, 1)".into())
}

fn cli(args: &[&str], stdin: Option<&str>) -> Result<Vec<u8>, String> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_syntomic"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    {
        use std::io::Write;
        let mut pipe = child.stdin.take().unwrap();
        pipe.write_all(stdin.unwrap_or("").as_bytes()).map_err(|e| e.to_string())?;
    }
    let o = child.wait_with_output().map_err(|e| e.to_string())?;
    ensure(o.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))?;
    Ok(o.stdout)
}

fn cli_determinism() -> Outcome {
    let runs: &[&[&str]] = &[
        &["adem", "--base", "O", "Sq4 Sq4 + Sq2 Sq3", "--format", "json"],
        &["basis", "--p", "3", "--deg-max", "16", "--format", "json"],
        &["coproduct", "--base", "O", "Sq4 Sq2", "--format", "json"],
        &["dual", "coproduct", "--base", "O", "Sq3 Sq1", "--format", "json"],
        &["bockstein", "dga", "--seed", "3", "--format", "json"],
        &["fgauge", "pipeline", "--format", "json"],
        &["verify", "wu", "--model", "P2xP3", "--format", "json"],
    ];
    for args in runs {
        let a = cli(args, None)?;
        ensure(a == cli(args, None)?, || format!("{args:?} differs between runs"))?;
    }
    // outputs that are also inputs go through a second pass unchanged
    let trips: &[(&[&str], &[&str])] = &[
        (&["adem", "--base", "O", "Sq4 Sq4 + Sq5 Sq2", "--format", "json"], &["adem", "--base", "O", "--format", "json"]),
        (&["antipode", "--base", "O", "Sq4 Sq2", "--format", "json"], &["adem", "--base", "O", "--format", "json"]),
        (&["bockstein", "dga", "--seed", "5", "--format", "json"], &["bockstein", "dga", "--input", "-", "--format", "json"]),
    ];
    for (make, reread) in trips {
        let a = cli(make, None)?;
        let b = cli(reread, Some(std::str::from_utf8(&a).unwrap()))?;
        ensure(a == b, || format!("{make:?} does not round-trip"))?;
    }
    let d = String::from_utf8(cli(&["dual", "multiply", "--base", "O", "Sq1", "Sq2", "--format", "json"], None)?).unwrap();
    let once = String::from_utf8(cli(&["dual", "chi", "--base", "O", "--format", "json", &d], None)?).unwrap();
    let twice = String::from_utf8(cli(&["dual", "chi", "--base", "O", "--format", "json", &once], None)?).unwrap();
    ensure(twice == d, || "dual JSON does not survive χχ".into())?;
    Ok(format!("{} commands, {} round-trips", runs.len(), trips.len() + 1))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("Adem engine consistency", 60, adem_consistency),
        ("structure theorem counts", 10, basis_counts),
        ("Hopf axioms", 60, hopf),
        ("known composites", 1, composites),
        ("comparison edge cases", 10, comparison_edges),
        ("arithmetic Wu formula", 60, wu),
        ("chain-level Bockstein identities", 30, chain_identities),
        ("matrix form and Bockstein comparison", 120, mat_form),
        ("pairing properties", 60, pairings),
        ("F-gauge pipeline", 30, fgauge),
        ("CLI determinism", 5, cli_determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let el = t.elapsed();
        let over = el > Duration::from_secs(*limit);
        let (tag, detail) = match (&res, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the time limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {:>2}. {name:<38} {:>8.2}s / {limit:>3}s  {detail}", i + 1, el.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
