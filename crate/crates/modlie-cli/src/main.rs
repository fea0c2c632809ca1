use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modlie::block::{af_u_basis, make_A, make_AF, make_block, AFSpec, BlockSpec};
use modlie::cartan::{make_D, make_W1n, make_hamiltonian, Hamiltonian, HamiltonianSpec, Variant, ZassenhausBasis};
use modlie::cohom::{assoc_form, h2_dimension};
use modlie::grading::{a_grading, lemma_thin_grading, specialize, Grading, GradingGroup};
use modlie::iso::{frobenius_reduction, sigma, sigma_inverse_displayed, tau, CertifiedIso};
use modlie::json::{export_json, import_json};
use modlie::lie::{AlgRef, DEFAULT_SEED};
use modlie::linalg::unit_vec;
use modlie::narrow::{Centralizer, Homog, Lambda, LoopPrefix};
use modlie::{Error, ExtField, LieAlgebra, Matrix};
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA: &str = "modlie-report/1";
const TABLE_LIMIT: usize = 30;

#[derive(Parser)]
#[command(name = "modlie", version, about = "Modular Lie algebras over finite fields")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write the interchange table (construct) or the JSON report to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Seed for the randomized parts of the simplicity test.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 1 selects the sequential code paths.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print bracket tables and matrices of any size.
    #[arg(long, global = true)]
    full: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an algebra and report dimension, Jacobi status and simplicity.
    Construct {
        family: Family,
        #[command(flatten)]
        params: Params,
    },
    /// Run checks on interchange JSON files.
    Verify {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "jacobi")]
        checks: Vec<VerifyCheck>,
    },
    /// Component dimensions of a grading of H(2:n;omega_2).
    Grade {
        #[command(flatten)]
        params: Params,
        /// Specialize the A-grading by (i,j) -> r i + s j.
        #[arg(long, allow_hyphen_values = true, requires = "s")]
        r: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "r")]
        s: Option<i64>,
        /// Use the thin grading on the basis e_{k,alpha}, ē_{1,alpha}.
        #[arg(long, conflicts_with_all = ["r", "s"])]
        lemma: bool,
    },
    /// Loop-algebra prefix: maximal class, centralizers, thinness, diamonds.
    Loop {
        #[arg(long)]
        family: LoopFamily,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// dim H^2(L, F) with trivial coefficients.
    Cohomology {
        #[arg(long)]
        family: Family,
        #[command(flatten)]
        params: Params,
        /// Fail unless dim H^2 equals this value.
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Certify an explicit isomorphism.
    Iso {
        which: IsoKind,
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Args, Clone)]
struct Params {
    /// Characteristic.
    #[arg(long)]
    p: Option<u32>,
    /// Height of W(1:n), or the degree of F_{p^n} for AF and block.
    #[arg(long)]
    n: Option<u32>,
    /// Heights of H(2:(n1,n2)).
    #[arg(long)]
    n1: Option<u32>,
    #[arg(long)]
    n2: Option<u32>,
    /// Frobenius exponents of AF(a,b,n,p).
    #[arg(long)]
    a: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    /// Basis of W(1:n).
    #[arg(long, default_value = "group")]
    kind: Kind,
    /// Basis of AF: e_xi over F_{p^n} or u_i over F_p.
    #[arg(long, default_value = "e")]
    basis: Basis,
    /// Adjoin x^(p^{n1}) and y^(p^{n2}) to a Hamiltonian algebra.
    #[arg(long)]
    extended: bool,
    /// Block data: rank k of G = F_p^k, shift delta and the images of g, h.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    delta: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    g: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    h: Vec<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    #[value(name = "W1n")]
    W1n,
    #[value(name = "H-omega0")]
    HOmega0,
    #[value(name = "H-omega2")]
    HOmega2,
    #[value(name = "AF")]
    Af,
    #[value(name = "block")]
    Block,
    #[value(name = "A")]
    A,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LoopFamily {
    /// Maximal-class grading of H(2:n;omega_2) with D adjoined.
    #[value(name = "H-omega2")]
    HOmega2,
    /// AF(a,b,n,p) on the u-basis graded by index, with D u_i = u_{i+1}.
    #[value(name = "AFS")]
    Afs,
    /// The thin specialization (1 - p^{n2}, -1).
    #[value(name = "thin")]
    Thin,
    /// The thin grading on e_{k,alpha}, ē_{1,alpha} (n1 = 1).
    #[value(name = "lemma")]
    Lemma,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Group,
    Proper,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Basis {
    E,
    U,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VerifyCheck {
    Jacobi,
    Simple,
    Perfect,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum IsoKind {
    Sigma,
    Tau,
    Frobenius,
}

/// Failure modes mapped onto exit codes.
enum Fail {
    Usage(String),
    Math(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Check(_) | Error::NotIsomorphism { .. } => Fail::Math(e.to_string()),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct CheckResult {
    name: String,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct FieldInfo {
    name: String,
    p: u32,
    n: u32,
    modulus: Vec<u32>,
}

impl FieldInfo {
    fn of(f: &ExtField) -> Self {
        FieldInfo { name: f.name(), p: f.p(), n: f.n(), modulus: f.modulus().to_vec() }
    }
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    version: &'static str,
    command: String,
    parameters: BTreeMap<String, Value>,
    field: Option<FieldInfo>,
    results: BTreeMap<String, Value>,
    checks: Vec<CheckResult>,
    #[serde(skip)]
    text: Vec<String>,
    /// Result keys rendered through `text` instead.
    #[serde(skip)]
    hidden: Vec<String>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            parameters: BTreeMap::new(),
            field: None,
            results: BTreeMap::new(),
            checks: Vec::new(),
            text: Vec::new(),
            hidden: Vec::new(),
        }
    }

    fn result(&mut self, key: &str, v: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
    }

    /// A result whose text rendering is `line` rather than its JSON.
    fn result_with_text(&mut self, key: &str, v: impl Serialize, line: String) {
        self.json_only(key, v);
        self.text.push(line);
    }

    /// A result left out of the text rendering.
    fn json_only(&mut self, key: &str, v: impl Serialize) {
        self.result(key, v);
        self.hidden.push(key.to_string());
    }

    fn check(&mut self, name: &str, pass: bool, detail: Option<String>) {
        self.checks.push(CheckResult { name: name.to_string(), pass, detail });
    }

    fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn render_text(&self) -> String {
        let mut out = format!("modlie {} {}\n", self.version, self.command);
        if let Some(f) = &self.field {
            out += &format!("field {} modulus {:?}\n", f.name, f.modulus);
        }
        for (k, v) in &self.parameters {
            out += &format!("  {k} = {v}\n");
        }
        for (k, v) in self.results.iter().filter(|(k, _)| !self.hidden.contains(k)) {
            out += &format!("{k}: {v}\n");
        }
        for line in &self.text {
            out += line;
            out.push('\n');
        }
        for c in &self.checks {
            out += &format!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
            if let Some(d) = &c.detail {
                out += &format!(" ({d})");
            }
            out.push('\n');
        }
        out
    }
}

fn family_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("named").get_name().to_string()
}

fn need(v: Option<u32>, name: &str) -> Result<u32, Fail> {
    v.ok_or_else(|| Fail::Usage(format!("--{name} is required")))
}

fn record(r: &mut Report, params: &Params) {
    for (name, v) in [("p", params.p), ("n", params.n), ("n1", params.n1), ("n2", params.n2), ("a", params.a), ("b", params.b), ("k", params.k)] {
        if let Some(v) = v {
            r.parameters.insert(name.into(), json!(v));
        }
    }
}

fn hamiltonian(variant: Variant, params: &Params) -> Result<Hamiltonian, Fail> {
    let spec = HamiltonianSpec {
        p: need(params.p, "p")?,
        n1: need(params.n1, "n1")?,
        n2: need(params.n2, "n2")?,
        variant,
        extended: params.extended,
    };
    Ok(make_hamiltonian(spec)?)
}

struct Built {
    algebra: AlgRef,
    hamiltonian: Option<Hamiltonian>,
}

fn build(family: Family, params: &Params) -> Result<Built, Fail> {
    let plain = |l: LieAlgebra| Built { algebra: Arc::new(l), hamiltonian: None };
    Ok(match family {
        Family::W1n => {
            let kind = match params.kind {
                Kind::Group => ZassenhausBasis::Group,
                Kind::Proper => ZassenhausBasis::Proper,
            };
            plain(make_W1n(need(params.p, "p")?, need(params.n, "n")?, kind)?)
        }
        Family::HOmega0 | Family::HOmega2 => {
            let v = if family == Family::HOmega0 { Variant::Omega0 } else { Variant::Omega2 };
            let h = hamiltonian(v, params)?;
            Built { algebra: h.algebra.clone(), hamiltonian: Some(h) }
        }
        Family::Af => {
            let (a, b, n, p) = (need(params.a, "a")?, need(params.b, "b")?, need(params.n, "n")?, need(params.p, "p")?);
            match params.basis {
                Basis::E => plain(make_AF(a, b, n, p)?),
                Basis::U => Built { algebra: af_u_basis(a, b, n, p)?.u_algebra, hamiltonian: None },
            }
        }
        Family::Block => {
            let f = modlie::make_field(need(params.p, "p")? as u64, params.n.unwrap_or(1))?;
            let spec = BlockSpec {
                field: f,
                k: need(params.k, "k")?,
                delta: params.delta.clone(),
                g: params.g.clone(),
                h: params.h.clone(),
            };
            plain(make_block(&spec)?)
        }
        Family::A => Built { algebra: make_A(need(params.p, "p")?, need(params.n2, "n2")?)?.algebra, hamiltonian: None },
    })
}

fn bracket_table(l: &LieAlgebra) -> Vec<String> {
    let f = l.field();
    let names = l.labels();
    l.table_entries()
        .map(|(i, j, row)| {
            let terms: Vec<String> = row.iter().map(|&(k, c)| format!("{} {}", f.format(c), names[k])).collect();
            format!("[{}, {}] = {}", names[i], names[j], terms.join(" + "))
        })
        .collect()
}

fn structure_report(r: &mut Report, l: &LieAlgebra, seed: u64, full: bool) -> Result<(), Fail> {
    r.field = Some(FieldInfo::of(l.field()));
    r.result("dim", l.dim());
    let jacobi = l.check_jacobi();
    r.check("jacobi", jacobi.is_empty(), jacobi.first().map(|t| format!("first violation {t:?}")));
    let s = l.is_simple(seed)?;
    r.result("simple", s.simple);
    r.result("simplicity_reason", &s.reason);
    if let Some(w) = &s.witness {
        r.result("ideal_dim", w.dim());
    }
    if full || l.dim() <= TABLE_LIMIT {
        r.text.extend(bracket_table(l));
    }
    Ok(())
}

fn cmd_construct(cli: &Cli, family: Family, params: &Params) -> Result<Report, Fail> {
    let mut r = Report::new("construct");
    r.parameters.insert("family".into(), json!(family_name(family)));
    record(&mut r, params);
    let built = build(family, params)?;
    structure_report(&mut r, &built.algebra, cli.seed, cli.full)?;
    if let Some(path) = &cli.out {
        fs::write(path, export_json(&built.algebra)).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(r)
}

fn cmd_verify(cli: &Cli, paths: &[PathBuf], checks: &[VerifyCheck]) -> Result<Report, Fail> {
    let mut r = Report::new("verify");
    let mut files = Vec::new();
    for path in paths {
        let text = fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        let l = import_json(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        let name = path.display().to_string();
        let mut info = BTreeMap::new();
        info.insert("dim".to_string(), json!(l.dim()));
        info.insert("field".to_string(), json!(l.field().name()));
        for c in checks {
            match c {
                VerifyCheck::Jacobi => {
                    let v = l.check_jacobi();
                    r.check(&format!("{name}: jacobi"), v.is_empty(), v.first().map(|t| format!("first violation {t:?}")));
                }
                VerifyCheck::Perfect => {
                    let d = l.derived_subalgebra().dim();
                    r.check(&format!("{name}: perfect"), d == l.dim(), Some(format!("dim [L,L] = {d}")));
                }
                VerifyCheck::Simple => {
                    let s = l.is_simple(cli.seed)?;
                    r.check(&format!("{name}: simple"), s.simple, Some(s.reason));
                }
            }
        }
        files.push(json!({ "path": name, "info": info }));
    }
    r.result("files", files);
    Ok(r)
}

fn degree_label(d: &[i64]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_grade(params: &Params, rs: Option<(i64, i64)>, lemma: bool) -> Result<Report, Fail> {
    let mut r = Report::new("grade");
    record(&mut r, params);
    let g: Grading = if lemma {
        r.parameters.insert("grading".into(), json!("lemma"));
        lemma_thin_grading(need(params.p, "p")?, need(params.n1, "n1")?, need(params.n2, "n2")?)?.grading
    } else {
        let h = hamiltonian(Variant::Omega2, params)?;
        let a = a_grading(&h)?;
        match rs {
            Some((rr, ss)) => {
                r.parameters.insert("r".into(), json!(rr));
                r.parameters.insert("s".into(), json!(ss));
                specialize(&a, rr, ss)?
            }
            None => a,
        }
    };
    r.field = Some(FieldInfo::of(g.algebra.field()));
    let bad = g.check_graded();
    r.check("graded", bad.is_none(), bad.map(|p| format!("pair {p:?}")));
    match g.cyclic_dims() {
        Ok(dims) => {
            r.result("period", dims.len());
            let line = format!("dims by degree 0..{}: {:?}", dims.len() - 1, dims);
            r.result_with_text("dims", &dims, line);
        }
        Err(_) => {
            let comps: BTreeMap<String, usize> = g.components().iter().map(|(d, v)| (degree_label(d), v.len())).collect();
            r.result("dims", comps);
        }
    }
    let map: BTreeMap<String, String> = g.algebra.labels().iter().zip(&g.degree).map(|(l, d)| (l.clone(), degree_label(d))).collect();
    r.json_only("degrees", map);
    Ok(r)
}

fn centralizer_name(c: &Centralizer, f: &ExtField) -> String {
    match c {
        Centralizer::X => "X".into(),
        Centralizer::Y => "Y".into(),
        Centralizer::Mixed(a) => format!("{}X+Y", f.format(*a)),
        Centralizer::All => "all".into(),
        Centralizer::None => "none".into(),
    }
}

fn lambda_name(l: &Lambda, f: &ExtField) -> String {
    match l {
        Lambda::Finite(a) => f.format(*a),
        Lambda::Infinite => "inf".into(),
        Lambda::Undetermined => "undetermined".into(),
    }
}

fn maximal_class_report(r: &mut Report, lp: &LoopPrefix, x: &Homog, y: &Homog) -> Result<(), Fail> {
    let bad = lp.check_maximal_class();
    r.check("maximal class", bad.is_none(), bad.map(|k| format!("fails at degree {k}")));
    if bad.is_none() {
        let f = lp.field().clone();
        let cs = lp.two_step_centralizers(x, y)?;
        let seq: Vec<(usize, String)> = cs.iter().map(|(k, c)| (*k, centralizer_name(c, &f))).collect();
        let line = format!("centralizers: {}", seq.iter().map(|(k, c)| format!("{k}:{c}")).collect::<Vec<_>>().join(" "));
        r.result_with_text("centralizers", seq, line);
    }
    Ok(())
}

fn thin_report(r: &mut Report, lp: &LoopPrefix, x: &Homog, y: &Homog, fake: usize) {
    let bad = lp.check_thin();
    r.check("thin", bad.is_none(), bad.map(|(k, _)| format!("covering fails at degree {k}")));
    let f = lp.field().clone();
    let n = lp.period();
    let rep = lp.diamonds(x, y, &|k| k % n == fake % n);
    let entries: Vec<Value> = rep
        .entries
        .iter()
        .map(|d| json!({ "degree": d.degree, "fake": d.fake, "type": lambda_name(&d.lambda, &f) }))
        .collect();
    let line = format!(
        "diamonds (degree:type, * fake): {}",
        rep.entries.iter().map(|d| format!("{}{}:{}", d.degree, if d.fake { "*" } else { "" }, lambda_name(&d.lambda, &f))).collect::<Vec<_>>().join(" ")
    );
    r.result_with_text("diamonds", entries, line);
}

fn cmd_loop(family: LoopFamily, params: &Params, depth: Option<usize>) -> Result<Report, Fail> {
    let mut r = Report::new("loop");
    r.parameters.insert("family".into(), json!(family_name(family)));
    record(&mut r, params);
    match family {
        LoopFamily::HOmega2 => {
            let h = hamiltonian(Variant::Omega2, params)?;
            let (p1, p2) = (h.p1(), h.p2());
            let n = (p1 * p2 - 1) as usize;
            let g = specialize(&a_grading(&h)?, -(p2 as i64), -1)?;
            let lp = LoopPrefix::new(&g, depth.unwrap_or(3 * n), Some(make_D(&h)?.matrix))?;
            r.field = Some(FieldInfo::of(lp.field()));
            let xv = h.vec_of(1, 0);
            let x = Homog { degree: 1, v: xv.clone(), d: 0 };
            let y = Homog { degree: 1, v: xv, d: 1 };
            r.result("depth", lp.depth);
            maximal_class_report(&mut r, &lp, &x, &y)?;
        }
        LoopFamily::Afs => {
            let (a, b, n, p) = (need(params.a, "a")?, need(params.b, "b")?, need(params.n, "n")?, need(params.p, "p")?);
            let ub = af_u_basis(a, b, n, p)?;
            let m = ub.spec.dim();
            let degree = (0..m).map(|i| vec![i as i64]).collect();
            let g = Grading::new(ub.u_algebra.clone(), GradingGroup::cyclic(m as u64), degree)?;
            let lp = LoopPrefix::new(&g, depth.unwrap_or(3 * m), Some(ub.derivation.clone()))?;
            r.field = Some(FieldInfo::of(lp.field()));
            let x = Homog { degree: 1, v: unit_vec(m, 1 % m), d: 0 };
            let y = Homog { degree: 1, v: vec![0; m], d: 1 };
            r.result("depth", lp.depth);
            maximal_class_report(&mut r, &lp, &x, &y)?;
        }
        LoopFamily::Thin => {
            let h = hamiltonian(Variant::Omega2, params)?;
            let (p1, p2) = (h.p1(), h.p2());
            let g = specialize(&a_grading(&h)?, 1 - p2 as i64, -1)?;
            let n = (p1 * (p2 - 1)) as usize;
            let lp = LoopPrefix::new(&g, depth.unwrap_or(3 * n), None)?;
            r.field = Some(FieldInfo::of(lp.field()));
            let x = Homog { degree: 1, v: h.vec_of(1, 0), d: 0 };
            let y = Homog { degree: 1, v: h.vec_of(0, p2 - 1), d: 0 };
            r.result("depth", lp.depth);
            thin_report(&mut r, &lp, &x, &y, p2 as usize);
        }
        LoopFamily::Lemma => {
            let p = need(params.p, "p")?;
            let n2 = need(params.n2, "n2")?;
            let t = lemma_thin_grading(p, 1, n2)?;
            let n = (t.p1() * (t.p2() - 1)) as usize;
            let lp = LoopPrefix::new(&t.grading, depth.unwrap_or(3 * n), None)?;
            r.field = Some(FieldInfo::of(lp.field()));
            let dim = t.algebra.dim();
            let x = Homog { degree: 1, v: unit_vec(dim, t.ebar(1).expect("p > 1")), d: 0 };
            let y = Homog { degree: 1, v: t.e_vec(1, 1), d: 0 };
            r.result("depth", lp.depth);
            thin_report(&mut r, &lp, &x, &y, t.p2() as usize);
        }
    }
    Ok(r)
}

fn cmd_cohomology(family: Family, params: &Params, expect: Option<usize>) -> Result<Report, Fail> {
    let mut r = Report::new("cohomology");
    r.parameters.insert("family".into(), json!(family_name(family)));
    record(&mut r, params);
    let built = build(family, params)?;
    r.field = Some(FieldInfo::of(built.algebra.field()));
    let form = match &built.hamiltonian {
        Some(h) if !h.spec.extended => Some(assoc_form(h)?),
        _ => None,
    };
    let rep = h2_dimension(&built.algebra, form.as_ref())?;
    r.result("dim", built.algebra.dim());
    r.result("Z2", rep.z2);
    r.result("B2", rep.b2);
    r.result("H2", rep.h2);
    if let Some(d) = &rep.derivation_route {
        r.result("derivation_route", json!({ "der": d.der, "inner": d.inner, "skew": d.skew, "alternating": d.alternating }));
        r.check("routes agree", true, None);
    }
    if let Some(e) = expect {
        r.check("expected H2", rep.h2 == e, Some(format!("expected {e}, got {}", rep.h2)));
    }
    Ok(r)
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    let f = m.field();
    (0..m.rows()).map(|i| m.row(i).iter().map(|&c| f.format(c)).collect()).collect()
}

fn iso_report(r: &mut Report, iso: &CertifiedIso, seed: u64, full: bool) -> Result<(), Fail> {
    r.field = Some(FieldInfo::of(iso.map.field()));
    r.result("certificate", json!({
        "rank": iso.certificate.rank,
        "pairs_checked": iso.certificate.pairs_checked,
        "field": iso.certificate.field,
        "domain_field": iso.certificate.domain_field,
        "codomain_field": iso.certificate.codomain_field,
    }));
    r.check("certified", true, None);
    let inv = iso.transported_invariants(seed)?;
    r.result("invariants", json!({
        "simple": [inv.simple.0, inv.simple.1],
        "outer_dim": [inv.outer_dim.0, inv.outer_dim.1],
        "H2": [inv.h2.0, inv.h2.1],
    }));
    r.check("invariants agree", inv.agree(), None);
    if full || iso.map.matrix.rows() <= TABLE_LIMIT {
        let rows = matrix_rows(&iso.map.matrix);
        let line = format!("matrix:\n{}", rows.iter().map(|r| r.join(" ")).collect::<Vec<_>>().join("\n"));
        r.result_with_text("matrix", rows, line);
    }
    Ok(())
}

fn cmd_iso(cli: &Cli, which: IsoKind, params: &Params) -> Result<Report, Fail> {
    let mut r = Report::new("iso");
    r.parameters.insert("map".into(), json!(family_name(which)));
    record(&mut r, params);
    match which {
        IsoKind::Sigma | IsoKind::Frobenius => {
            let (a, b, n, p) = (need(params.a, "a")?, need(params.b, "b")?, need(params.n, "n")?, need(params.p, "p")?);
            AFSpec::new(a, b, n, p)?;
            let iso = if which == IsoKind::Sigma { sigma(a, b, n, p)? } else { frobenius_reduction(a, b, n, p)? };
            if which == IsoKind::Sigma {
                let inv = sigma_inverse_displayed(a, b, n, p)?;
                let ok = iso.map.matrix.inverse().as_ref() == Some(&inv.matrix);
                r.check("displayed inverse", ok, None);
            }
            iso_report(&mut r, &iso, cli.seed, cli.full)?;
        }
        IsoKind::Tau => {
            let t = tau(need(params.p, "p")?, need(params.n2, "n2")?)?;
            r.result("epsilon", t.field().coeffs(t.epsilon));
            r.check("forms agree", t.forms_agree()?, None);
            iso_report(&mut r, &t.dp_form, cli.seed, cli.full)?;
        }
    }
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report, Fail> {
    match &cli.cmd {
        Cmd::Construct { family, params } => cmd_construct(cli, *family, params),
        Cmd::Verify { paths, checks } => cmd_verify(cli, paths, checks),
        Cmd::Grade { params, r, s, lemma } => cmd_grade(params, r.zip(*s), *lemma),
        Cmd::Loop { family, params, depth } => cmd_loop(*family, params, *depth),
        Cmd::Cohomology { family, params, expect } => cmd_cohomology(*family, params, *expect),
        Cmd::Iso { which, params } => cmd_iso(cli, *which, params),
    }
}

fn configure_threads(n: usize) -> Result<(), Fail> {
    if n == 0 {
        return Err(Fail::Usage("--threads must be positive".into()));
    }
    if n == 1 {
        modlie::par::set_parallel(false);
    }
    #[cfg(feature = "rayon")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Fail::Usage(e.to_string()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(Fail::Usage(m) | Fail::Math(m)) = configure_threads(n) {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
        Err(Fail::Math(m)) => {
            eprintln!("check failed: {m}");
            return ExitCode::from(1);
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    if cli.json {
        println!("{json}");
    } else {
        print!("{}", report.render_text());
    }
    eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    if let (Some(path), false) = (&cli.out, matches!(cli.cmd, Cmd::Construct { .. })) {
        if let Err(e) = fs::write(path, &json) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
