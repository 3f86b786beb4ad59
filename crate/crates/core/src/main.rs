use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use syntomic::action::{flavor_convert, validate_action, Flavor, PDRing, SteenrodAction, Vector, Violation};
use syntomic::bockstein::{
    bockstein_block, cohomology, compare_bocksteins, exterior, export_pd_instance, pd_block, random_dga, tensor,
    verify_mat_form_general, verify_psi_images, verify_second_bockstein, Check, Coeffs, CommutativeDGA, Report,
};
use syntomic::charclass::{product_model, verify_wu_theorem, wu_from_sw, CharModel, SwJson, SwPoly};
use syntomic::dual::{DualElement, DualJson, DualTensor, SteenrodDual};
use syntomic::fgauge::{global_sections, supersingular_pipeline, Gauge, LatticeGauge};
use syntomic::scalar::{Base, Ring};
use syntomic::steenrod::json::{word_to_json, ElementJson, TensorJson};
use syntomic::steenrod::{format_word, parse_combination, Adm, Element, SteenrodAlgebra};

#[derive(Parser)]
#[command(name = "syntomic", version, about = "Exact syntomic Steenrod algebra, Wu calculus, Bocksteins and F-gauges")]
struct Cli {
    /// output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Clone)]
struct Alg {
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value = "k", value_parser = parse_base)]
    base: Base,
}

#[derive(Args, Clone)]
struct Input {
    /// inline word expression ("Sq2 Sq2 + Sq3 Sq1") or inline JSON; stdin when absent
    expr: Option<String>,
    /// read the input from a file ("-" for stdin)
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a combination of words to admissible normal form
    Adem {
        #[command(flatten)]
        alg: Alg,
        #[command(flatten)]
        input: Input,
    },
    /// List the admissible basis through a degree
    Basis {
        #[command(flatten)]
        alg: Alg,
        #[arg(long)]
        deg_max: i64,
    },
    /// Cartan coproduct of an element
    Coproduct {
        #[command(flatten)]
        alg: Alg,
        #[command(flatten)]
        input: Input,
    },
    /// Antipode of an element
    Antipode {
        #[command(flatten)]
        alg: Alg,
        #[command(flatten)]
        input: Input,
    },
    /// Operations on the dual algebra; a word names the dual of that admissible monomial
    Dual {
        #[command(flatten)]
        alg: Alg,
        #[arg(value_enum)]
        op: DualOp,
        /// one operand, two for `pair` (element, dual) and `multiply`
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
    },
    /// Relation between the syntomic and E∞ flavors of P^i on weight-b classes
    Convert {
        #[command(flatten)]
        alg: Alg,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        b: i64,
        #[arg(long, value_enum, default_value_t = FlavorArg::Syn)]
        from: FlavorArg,
    },
    /// Universal Wu classes v_j and the table of Sq^i w_j
    Wu {
        #[arg(long, default_value_t = 8)]
        deg_max: u32,
    },
    /// Emit a projective-space model (P3, P1xP2, ...) with its action and tangent classes
    Model {
        #[arg(long)]
        model: String,
    },
    /// Chain-level Bockstein computations
    Bockstein {
        #[command(subcommand)]
        cmd: BockCmd,
    },
    /// F-gauge computations
    Fgauge {
        #[command(subcommand)]
        cmd: GaugeCmd,
    },
    /// Run a verification; exit 1 when it fails
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DualOp {
    Pair,
    Multiply,
    Coproduct,
    Chi,
    Sigma,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Syn,
    Einfty,
}

#[derive(Args, Clone)]
struct DgaSource {
    /// random corpus member
    #[arg(long)]
    seed: Option<u64>,
    /// exterior ⊗ Poincaré-duality block of this size
    #[arg(long)]
    pd_k: Option<u32>,
    #[arg(long, default_value_t = 0)]
    nu: i128,
    /// DGA JSON file ("-" for stdin)
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BockCmd {
    /// β_n and β_n^(2) on the square of the universal class
    Square {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
        #[arg(long)]
        n: u32,
    },
    /// Images of ψ on the classes x, x² of a Bockstein block
    Psi {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
    },
    /// Print a DGA as JSON
    Dga {
        #[command(flatten)]
        src: DgaSource,
    },
    /// Check the matrix form of P^{2i} β_n on every mod-2^n generator
    MatForm {
        #[command(flatten)]
        src: DgaSource,
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
    /// Export the mod-2^n cohomology as a ring with pairing
    Export {
        #[command(flatten)]
        src: DgaSource,
        #[arg(long, default_value_t = 2)]
        dim: i64,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Subcommand)]
enum GaugeCmd {
    /// The supersingular construction over W_m(F_{p^f})
    Pipeline {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        f: usize,
        #[arg(long, default_value_t = 3)]
        m: u32,
    },
    /// dim H⁰, H¹ of gauge cohomology, for a twist of the structure gauge or a gauge JSON
    Sections {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        twist: i64,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Sq(v) = w on a model
    Wu {
        #[arg(long)]
        model: String,
    },
    /// Ring axioms, Cartan and Adem relations of the action on a model or a model JSON
    Action {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Matrix form and Bockstein comparison on a DGA
    Bockstein {
        #[command(flatten)]
        src: DgaSource,
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
    /// Skew-symmetry, alternation and the top formula on an exported ring
    Pairing {
        #[command(flatten)]
        src: DgaSource,
        #[arg(long, default_value_t = 2)]
        dim: i64,
        #[arg(long)]
        n: u32,
    },
    /// Every check of the supersingular construction
    Fgauge {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        f: usize,
        #[arg(long, default_value_t = 3)]
        m: u32,
    },
}

/// Rendered result plus its JSON form and whether the run counts as a success.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: String, json: impl Serialize) -> Result<Self> {
        Ok(Output {
            text,
            json: serde_json::to_value(json)?,
            ok: true,
        })
    }

    fn verdict(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

fn parse_base(s: &str) -> Result<Base, String> {
    Base::parse(s).map_err(|e| e.to_string())
}

fn read_source(inline: Option<&str>, path: Option<&PathBuf>) -> Result<String> {
    match (path, inline) {
        (Some(p), _) if p.as_os_str() == "-" => read_stdin(),
        (Some(p), _) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        (None, Some(s)) => Ok(s.to_string()),
        (None, None) => read_stdin(),
    }
}

fn read_stdin() -> Result<String> {
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s)?;
    Ok(s)
}

fn is_json(s: &str) -> bool {
    s.trim_start().starts_with('{')
}

fn from_json<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| anyhow!("{what} JSON, line {} column {}: {e}", e.line(), e.column()))
}

fn element(alg: &SteenrodAlgebra, s: &str) -> Result<Element> {
    if is_json(s) {
        let j: ElementJson = from_json(s, "element")?;
        return Ok(j.to_element(alg)?);
    }
    Ok(alg.adem_reduce(&parse_combination(s, alg.ring())?))
}

fn dual_element(ring: Ring, s: &str) -> Result<DualElement> {
    if is_json(s) {
        let j: DualJson = from_json(s, "dual element")?;
        let d = j.to_dual()?;
        if d.ring() != ring {
            bail!("dual element has p={} base={}, expected p={} base={}", j.p, j.base, ring.p(), ring.base);
        }
        return Ok(d);
    }
    let mut d = DualElement::zero(ring);
    for (w, c) in parse_combination(s, ring)? {
        let a = Adm::from_word(&w, ring.p())
            .ok_or_else(|| anyhow!("{} is not admissible", format_word(&w, ring.p())))?;
        d.add_term(a, c);
    }
    Ok(d)
}

fn dual_degree(d: &DualElement) -> i64 {
    let p = d.ring().p();
    d.terms().keys().map(|a| a.bidegree(p).deg).max().unwrap_or(0)
}

fn dual_tensor_text(t: &DualTensor, ring: Ring) -> String {
    if t.is_empty() {
        return "0".into();
    }
    let p = ring.p();
    let xi = |a: &Adm| format!("xi[{}]", if a.is_empty() { String::new() } else { format_word(&a.to_word(), p) });
    t.iter()
        .map(|((a, b), c)| {
            let body = format!("{} ⊗ {}", xi(a), xi(b));
            if *c == ring.one() {
                body
            } else {
                format!("{} ({body})", ring.fmt_scalar(c))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn dual_tensor_json(t: &DualTensor, ring: Ring) -> Value {
    let terms: Vec<Value> = t
        .iter()
        .map(|((a, b), c)| json!({"coeff": c.coeffs(), "left": word_to_json(&a.to_word()), "right": word_to_json(&b.to_word())}))
        .collect();
    json!({"p": ring.p(), "base": ring.base, "terms": terms})
}

fn model(name: &str) -> Result<CharModel> {
    let dims = name
        .split(['x', 'X', '×'])
        .map(|f| {
            let f = f.trim();
            f.strip_prefix('P')
                .or_else(|| f.strip_prefix("CP"))
                .and_then(|n| n.trim_start_matches('^').parse::<u32>().ok())
                .ok_or_else(|| anyhow!("unknown model factor {f:?}; expected names like P3 or P1xP2"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(product_model(&dims)?)
}

#[derive(Serialize, serde::Deserialize)]
struct ModelJson {
    name: String,
    ring: PDRing,
    action: SteenrodAction,
    tangent: Vec<Vector>,
}

fn violations_text(vs: &[Violation]) -> String {
    if vs.is_empty() {
        return "no violations\n".into();
    }
    vs.iter().map(|v| format!("FAIL {}: {}\n", v.axiom, v.witness.join(", "))).collect()
}

fn check_line(c: &Check) -> String {
    let tag = if c.holds { "ok  " } else { "FAIL" };
    if c.witness.is_empty() || c.holds {
        format!("{tag} {}\n", c.identity)
    } else {
        format!("{tag} {}: {}\n", c.identity, c.witness.join("; "))
    }
}

fn report_text(r: &Report) -> String {
    r.checks.iter().map(check_line).collect()
}

fn load_dga(src: &DgaSource) -> Result<(String, CommutativeDGA)> {
    match (src.seed, src.pd_k, &src.input) {
        (Some(seed), None, None) => {
            let rd = random_dga(seed, 8)?;
            Ok((rd.description, rd.dga))
        }
        (None, Some(k), None) => {
            let a = tensor(&exterior("t", (1, 0))?, &pd_block(k, src.nu, false)?)?;
            Ok((format!("Λ[t] ⊗ PD(k={k}, ν={})", src.nu), a))
        }
        (None, None, Some(p)) => {
            let s = read_source(None, Some(p))?;
            let mut a: CommutativeDGA = from_json(&s, "DGA")?;
            a.rebuild();
            let bad = a.check_axioms();
            if !bad.is_empty() {
                bail!("DGA axioms fail: {}", bad.join("; "));
            }
            Ok((p.display().to_string(), a))
        }
        _ => bail!("give exactly one of --seed, --pd-k, --input"),
    }
}

fn mat_form_report(a: &CommutativeDGA, n_max: u32) -> Result<Report> {
    let c = &a.complex;
    let mut rep = Report::default();
    for n in 1..=n_max {
        for b in c.bidegree_set() {
            if b.0 % 2 != 0 || b.0 == 0 {
                continue;
            }
            for u in cohomology(c, Coeffs::Mod2Pow(n), b).generators {
                rep.extend(verify_mat_form_general(a, &u, n)?);
            }
        }
    }
    Ok(rep)
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.cmd {
        Cmd::Adem { alg, input } => {
            let a = SteenrodAlgebra::with_params(alg.p, alg.base)?;
            let s = read_source(input.expr.as_deref(), input.input.as_ref())?;
            let e = element(&a, &s)?;
            Output::new(e.to_text() + "\n", ElementJson::from_element(&e))
        }
        Cmd::Basis { alg, deg_max } => {
            let a = SteenrodAlgebra::with_params(alg.p, alg.base)?;
            let basis = a.basis_up_to(*deg_max);
            let mut rows = vec![["deg".to_string(), "wt".to_string(), "word".to_string()]];
            let mut items = Vec::new();
            for m in &basis {
                let b = m.bidegree(alg.p);
                rows.push([b.deg.to_string(), b.wt.to_string(), format_word(&m.to_word(), alg.p)]);
                items.push(json!({"deg": b.deg, "wt": b.wt, "word": word_to_json(&m.to_word())}));
            }
            Output::new(table(&rows), json!({"p": alg.p, "base": alg.base, "deg_max": deg_max, "basis": items}))
        }
        Cmd::Coproduct { alg, input } => {
            let a = SteenrodAlgebra::with_params(alg.p, alg.base)?;
            let e = element(&a, &read_source(input.expr.as_deref(), input.input.as_ref())?)?;
            let t = a.coproduct(&e)?;
            Output::new(t.to_text() + "\n", TensorJson::from_tensor(&t))
        }
        Cmd::Antipode { alg, input } => {
            let a = SteenrodAlgebra::with_params(alg.p, alg.base)?;
            let e = element(&a, &read_source(input.expr.as_deref(), input.input.as_ref())?)?;
            let s = a.antipode(&e)?;
            Output::new(s.to_text() + "\n", ElementJson::from_element(&s))
        }
        Cmd::Dual { alg, op, args } => dual(alg, *op, args),
        Cmd::Convert { alg, i, b, from } => {
            let f = match from {
                FlavorArg::Syn => Flavor::Syn,
                FlavorArg::Einfty => Flavor::Einfty,
            };
            let c = flavor_convert(alg.p, *i, *b, f, alg.base);
            Output::new(c.describe(alg.p) + "\n", &c)
        }
        Cmd::Wu { deg_max } => wu_tables(*deg_max),
        Cmd::Model { model: name } => {
            let m = model(name)?;
            let mut text = format!("{}\n", m.name);
            let mut rows = vec![vec!["class".to_string(), "(deg,wt)".into(), "Sq(x)".into()]];
            for (i, b) in m.ring.basis.iter().enumerate() {
                let x = m.ring.basis_vec(i);
                rows.push(vec![b.label.clone(), format!("({},{})", b.deg, b.wt), m.ring.format(&m.action.total_sq(&m.ring, &x))]);
            }
            text.push_str(&table(&rows));
            let w = m.tangent.iter().fold(m.ring.zero(), |acc, v| m.ring.add(&acc, v));
            text.push_str(&format!("w = {}\n", m.ring.format(&w)));
            let j = ModelJson {
                name: m.name.clone(),
                ring: m.ring.clone(),
                action: m.action.clone(),
                tangent: m.tangent.clone(),
            };
            Output::new(text, j)
        }
        Cmd::Bockstein { cmd } => bockstein(cmd),
        Cmd::Fgauge { cmd } => fgauge(cmd),
        Cmd::Verify { cmd } => verify(cmd),
    }
}

fn dual(alg: &Alg, op: DualOp, args: &[String]) -> Result<Output> {
    let a = Arc::new(SteenrodAlgebra::with_params(alg.p, alg.base)?);
    let ring = a.ring();
    let need = |k: usize| -> Result<()> {
        if args.len() != k {
            bail!("this operation takes {k} operand(s), got {}", args.len());
        }
        Ok(())
    };
    match op {
        DualOp::Pair => {
            need(2)?;
            let x = element(&a, &args[0])?;
            let xi = dual_element(ring, &args[1])?;
            let d = SteenrodDual::new(a.clone(), x.max_degree().max(dual_degree(&xi)));
            let v = d.pair(&x, &xi)?;
            Output::new(ring.fmt_scalar(&v) + "\n", json!({"p": alg.p, "base": alg.base, "coeff": v.coeffs()}))
        }
        DualOp::Multiply => {
            need(2)?;
            let x = dual_element(ring, &args[0])?;
            let y = dual_element(ring, &args[1])?;
            let d = SteenrodDual::new(a.clone(), dual_degree(&x) + dual_degree(&y));
            let z = d.multiply(&x, &y)?;
            Output::new(z.to_text() + "\n", DualJson::from_dual(&z))
        }
        DualOp::Coproduct => {
            need(1)?;
            let x = dual_element(ring, &args[0])?;
            let d = SteenrodDual::new(a.clone(), dual_degree(&x));
            let t = d.coproduct(&x)?;
            Output::new(dual_tensor_text(&t, ring) + "\n", dual_tensor_json(&t, ring))
        }
        DualOp::Chi => {
            need(1)?;
            let x = dual_element(ring, &args[0])?;
            let d = SteenrodDual::new(a.clone(), dual_degree(&x));
            let z = d.chi(&x)?;
            Output::new(z.to_text() + "\n", DualJson::from_dual(&z))
        }
        DualOp::Sigma => {
            need(1)?;
            let x = element(&a, &args[0])?;
            let d = SteenrodDual::new(a.clone(), x.max_degree());
            let z = d.sigma(&x)?;
            Output::new(z.to_text() + "\n", ElementJson::from_element(&z))
        }
    }
}

fn wu_tables(n: u32) -> Result<Output> {
    let v = wu_from_sw(n);
    let mut text = String::new();
    let mut rows = vec![vec!["j".to_string(), "v_j".into()]];
    for (j, x) in v.iter().enumerate() {
        rows.push(vec![j.to_string(), x.to_string()]);
    }
    text.push_str(&table(&rows));
    text.push('\n');
    // only even classes are nonzero; Sq^i w_{2k} for i ≤ 2k ≤ n
    let mut rows = vec![vec!["Sq^i w_j".to_string()]];
    let evens: Vec<u32> = (0..=n / 2).map(|k| 2 * k).collect();
    rows[0].extend(evens.iter().map(|j| format!("w_{j}")));
    let mut sq = Vec::new();
    for i in 0..=n {
        let mut row = vec![format!("i={i}")];
        let mut jrow = Vec::new();
        for &j in &evens {
            let s = SwPoly::w(0, j / 2).sq(i);
            row.push(if i > j { "·".into() } else { s.to_string() });
            jrow.push(SwJson::from_poly(&s));
        }
        rows.push(row);
        sq.push(jrow);
    }
    text.push_str(&table(&rows));
    let vj: Vec<SwJson> = v.iter().map(SwJson::from_poly).collect();
    Output::new(text, json!({"deg_max": n, "wu": vj, "sq_w": sq}))
}

fn bockstein(cmd: &BockCmd) -> Result<Output> {
    match cmd {
        BockCmd::Square { a, b, n } => {
            let r = verify_second_bockstein(*a, *b, *n)?;
            let ok = r.passed();
            Ok(Output::new(report_text(&r), &r)?.verdict(ok))
        }
        BockCmd::Psi { k, n } => {
            let alg = bockstein_block(2, *k)?;
            let c = &alg.complex;
            let mut rep = Report::default();
            for label in ["x", "x^2"] {
                let i = c.index(label).ok_or_else(|| anyhow!("block has no class {label}"))?;
                let mut u = c.zero();
                u[i] = 1i128 << n.saturating_sub(*k);
                rep.extend(verify_psi_images(&alg, &u, *n)?);
            }
            let ok = rep.passed();
            Ok(Output::new(report_text(&rep), &rep)?.verdict(ok))
        }
        BockCmd::Dga { src } => {
            let (desc, a) = load_dga(src)?;
            let c = &a.complex;
            let labels: Vec<String> =
                (0..c.len()).map(|i| format!("{} ({},{})", c.labels[i], c.bidegrees[i].0, c.bidegrees[i].1)).collect();
            Output::new(format!("{desc}\n{}\n", labels.join("\n")), &a)
        }
        BockCmd::MatForm { src, n } => {
            let (_, a) = load_dga(src)?;
            let rep = mat_form_report(&a, *n)?;
            let ok = rep.passed();
            Ok(Output::new(report_text(&rep), &rep)?.verdict(ok))
        }
        BockCmd::Export { src, dim, n } => {
            let (_, a) = load_dga(src)?;
            let r = export_pd_instance(&a, *dim, *n)?;
            let mut text = format!("Z/2^{} ring, top at ({},{})\n", r.n, 2 * r.dim + 1, r.dim);
            let rows: Vec<Vec<String>> = std::iter::once(vec!["class".into(), "(deg,wt)".into(), "order".into()])
                .chain(
                    r.basis
                        .iter()
                        .zip(&r.order_exp)
                        .map(|(b, k)| vec![b.label.clone(), format!("({},{})", b.deg, b.wt), format!("2^{k}")]),
                )
                .collect();
            text.push_str(&table(&rows));
            Output::new(text, &r)
        }
    }
}

fn fgauge(cmd: &GaugeCmd) -> Result<Output> {
    match cmd {
        GaugeCmd::Pipeline { p, f, m } => {
            let r = supersingular_pipeline(*p, *f, *m)?;
            let ok = r.passed();
            Ok(Output::new(r.render(), &r)?.verdict(ok))
        }
        GaugeCmd::Sections { p, f, twist, input } => {
            let g: Gauge = match input {
                Some(path) => {
                    let g: Gauge = from_json(&read_source(None, Some(path))?, "gauge")?;
                    let bad = g.validate();
                    if !bad.is_empty() {
                        bail!("gauge relations fail: {}", bad.join("; "));
                    }
                    g
                }
                None => LatticeGauge::trivial(*p, *f)?.twist(*twist).to_gauge(1)?,
            };
            let (h0, h1) = global_sections(&g)?;
            Output::new(format!("dim H0 = {h0}\ndim H1 = {h1}\n"), json!({"h0": h0, "h1": h1}))
        }
    }
}

fn verify(cmd: &VerifyCmd) -> Result<Output> {
    match cmd {
        VerifyCmd::Wu { model: name } => {
            let m = model(name)?;
            let r = verify_wu_theorem(&m)?;
            let mut text = format!("model {}\n", r.model);
            for (j, v) in r.wu.iter().enumerate() {
                text.push_str(&format!("v_{j} = {v}\n"));
            }
            text.push_str(&format!("Sq(v) = {}\nw     = {}\n", r.total_sq_v, r.w));
            text.push_str(if r.passed() { "Sq(v) = w holds\n" } else { "Sq(v) = w FAILS\n" });
            text.push_str(&violations_text(&r.violations));
            let ok = r.passed();
            Ok(Output::new(text, &r)?.verdict(ok))
        }
        VerifyCmd::Action { model: name, input } => {
            let (ring, action) = match (name, input) {
                (Some(n), None) => {
                    let m = model(n)?;
                    (m.ring, m.action)
                }
                (None, Some(p)) => {
                    let mut j: ModelJson = from_json(&read_source(None, Some(p))?, "model")?;
                    j.ring.rebuild()?;
                    (j.ring, j.action)
                }
                _ => bail!("give exactly one of --model, --input"),
            };
            let vs = validate_action(&ring, &action)?;
            let ok = vs.is_empty();
            Ok(Output::new(violations_text(&vs), json!({"violations": vs}))?.verdict(ok))
        }
        VerifyCmd::Bockstein { src, n } => {
            let (_, a) = load_dga(src)?;
            let mut rep = mat_form_report(&a, *n)?;
            let c = &a.complex;
            let mut rng = ChaCha8Rng::seed_from_u64(src.seed.unwrap_or(0));
            for b in c.bidegree_set() {
                let idx = c.indices(b);
                for v in cohomology(c, Coeffs::Mod2Pow(1), b).generators {
                    for k in 1..=*n {
                        let mut w = c.zero();
                        for &i in &idx {
                            w[i] = rng.gen_range(-3..=3);
                        }
                        rep.push(compare_bocksteins(c, &v, &w, k)?);
                    }
                }
            }
            let ok = rep.passed();
            let summary = format!("{} checks, {} failed\n", rep.checks.len(), rep.checks.iter().filter(|c| !c.holds).count());
            let failed: String = rep.checks.iter().filter(|c| !c.holds).map(check_line).collect();
            Ok(Output::new(summary + &failed, &rep)?.verdict(ok))
        }
        VerifyCmd::Pairing { src, dim, n } => {
            let (_, a) = load_dga(src)?;
            let r = export_pd_instance(&a, *dim, *n)?;
            let mut vs = r.validate();
            vs.extend(r.check_pairing()?);
            for i in r.in_bidegree(*dim, dim / 2) {
                vs.extend(r.verify_top_formula(&r.basis_vec(i))?);
            }
            let ok = vs.is_empty();
            Ok(Output::new(violations_text(&vs), json!({"violations": vs}))?.verdict(ok))
        }
        VerifyCmd::Fgauge { p, f, m } => {
            let r = supersingular_pipeline(*p, *f, *m)?;
            let ok = r.passed();
            Ok(Output::new(r.checks.iter().map(check_line).collect(), &r.checks)?.verdict(ok))
        }
    }
}

/// Column-aligned rows, two spaces between columns.
fn table<S: AsRef<str>, R: AsRef<[S]>>(rows: &[R]) -> String {
    let ncol = rows.iter().map(|r| r.as_ref().len()).max().unwrap_or(0);
    let width: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().filter_map(|r| r.as_ref().get(c)).map(|s| s.as_ref().chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, s) in r.as_ref().iter().enumerate() {
            let s = s.as_ref();
            line.push_str(s);
            line.extend(std::iter::repeat(' ').take(width[c] - s.chars().count() + 2));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn emit(cli: &Cli, o: &Output) -> Result<()> {
    let body = match cli.format {
        Format::Text => o.text.clone(),
        Format::Json => serde_json::to_string_pretty(&o.json)? + "\n",
    };
    match &cli.out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| emit(&cli, &o).map(|_| o.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
