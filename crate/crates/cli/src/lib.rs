//! The `selfsim` command line.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use selfsim_core::contracting::{escape_depth, Nucleus};
use selfsim_core::linalg::PsdOutcome;
use selfsim_core::report::Report;
use selfsim_core::word::{format_letters, parse_letters};
use selfsim_core::{
    act_periodic, act_word, afd_hypothesis_check, build_report, compute_nucleus, count_fixed,
    fixed_measure, generic_defect, genericity_classify, y_measure, AfdCheck, Error, Genericity,
    GroupSpec, GroupWord, Limits, MeasureMethod, MeasureReport, PeriodicWord, StarAlgebra,
};
use serde_json::{json, Map, Value};

mod json;

pub use json::{rational_from_json, rational_to_json};

#[derive(Debug, Parser)]
#[command(
    name = "selfsim",
    version,
    about = "Self-similar group actions and their KMS states"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Built-in group name (grigorchuk, dihedral, odometer) or path to a definition file.
    #[arg(long, global = true, default_value = "grigorchuk")]
    pub group: String,
    /// Emit JSON with sorted keys and rationals as {"num", "den"}.
    #[arg(long, global = true)]
    pub json: bool,
    /// State budget for section closures.
    #[arg(long, global = true, default_value_t = Limits::default().max_states)]
    pub max_states: usize,
    /// Largest level explored by counting.
    #[arg(long, global = true, default_value_t = Limits::default().max_depth)]
    pub max_depth: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure of the fixed-point set of an element.
    FixMeasure(Element),
    /// Number of words of a level fixed by an element.
    CountFixed(ElementDepth),
    /// Normalized count of fixed words whose section is nontrivial.
    Defect(ElementDepth),
    /// Genericity classification over the generators and the nucleus.
    Classify,
    /// Nucleus of a contracting action.
    Nucleus,
    /// Whether every nucleus element has a trivial section.
    AfdCheck,
    /// Measure of the points along which an element eventually becomes trivial.
    YMeasure(Element),
    /// The KMS functional of an algebra expression.
    Kms {
        #[arg(long)]
        expr: String,
    },
    /// KMS identity for two monomials.
    KmsCheck(Pair),
    /// Trace property for two degree-0 monomials.
    TraceCheck(Pair),
    /// Positive semidefiniteness of the fixed-point measure on a family.
    Gram {
        /// Comma separated group words.
        #[arg(long)]
        family: String,
    },
    /// Distance between an element and its level-n approximation.
    AnDistance(ElementDepth),
    /// Apply an element to a finite or eventually periodic word.
    Act(Act),
    /// Every check and the licensed factor-type conclusion.
    Report {
        /// Declare the group amenable (not verified).
        #[arg(long)]
        amenable: bool,
    },
}

#[derive(Debug, Args)]
pub struct Element {
    #[arg(long)]
    pub element: String,
}

#[derive(Debug, Args)]
pub struct ElementDepth {
    #[arg(long)]
    pub element: String,
    #[arg(long)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct Pair {
    #[arg(long)]
    pub left: String,
    #[arg(long)]
    pub right: String,
}

#[derive(Debug, Args)]
pub struct Act {
    #[arg(long)]
    pub element: String,
    /// Finite word to act on.
    #[arg(long, conflicts_with_all = ["prefix", "period"])]
    pub word: Option<String>,
    /// Prefix of an eventually periodic word.
    #[arg(long, requires = "period")]
    pub prefix: Option<String>,
    /// Repeated tail of an eventually periodic word.
    #[arg(long)]
    pub period: Option<String>,
}

/// Human-readable text and the JSON value of one command's result.
struct Output {
    text: String,
    json: Value,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code: 0 on success, 1 on engine errors, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    if cli.common.max_states == 0 || cli.common.max_depth == 0 {
        let _ = writeln!(err, "error: --max-states and --max-depth must be positive");
        return 2;
    }
    match execute(&cli) {
        Ok(o) => {
            let text = if cli.common.json {
                serde_json::to_string_pretty(&o.json).expect("serializable")
            } else {
                o.text
            };
            let _ = writeln!(out, "{}", text.trim_end());
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Engine(e)) => {
            let _ = writeln!(err, "error [{}]: {e}", e.kind());
            1
        }
    }
}

enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

fn load_group(name: &str) -> Result<GroupSpec, Failure> {
    if let Some(spec) = GroupSpec::builtin(name) {
        return Ok(spec);
    }
    let text = std::fs::read_to_string(name).map_err(|e| {
        Failure::Usage(format!(
            "--group {name:?} is neither a built-in group nor a readable file ({e})"
        ))
    })?;
    Ok(GroupSpec::parse(&text)?)
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let spec = load_group(&cli.common.group)?;
    let limits = Limits::new(cli.common.max_states, cli.common.max_depth);
    let word = |s: &str| spec.parse_word(s);
    let mut obj = Map::new();
    obj.insert("group".into(), json!(cli.common.group));

    let text = match &cli.command {
        Command::FixMeasure(a) => {
            let g = word(&a.element)?;
            let r = fixed_measure(&spec, &g, &limits)?;
            obj.insert("element".into(), json!(spec.format_word(&g)));
            measure_json(&mut obj, &r);
            measure_text(&r)
        }
        Command::CountFixed(a) => {
            let g = word(&a.element)?;
            let c = count_fixed(&spec, &g, a.depth, &limits)?;
            obj.insert("element".into(), json!(spec.format_word(&g)));
            obj.insert("depth".into(), json!(a.depth));
            obj.insert("count".into(), json!(c.to_string()));
            c.to_string()
        }
        Command::Defect(a) => {
            let g = word(&a.element)?;
            let d = generic_defect(&spec, &g, a.depth, &limits)?;
            obj.insert("element".into(), json!(spec.format_word(&g)));
            obj.insert("depth".into(), json!(a.depth));
            obj.insert("defect".into(), rational_to_json(&d));
            d.to_string()
        }
        Command::Classify => {
            let r = genericity_classify(&spec, &limits)?;
            let class = genericity_label(r.class);
            obj.insert("class".into(), json!(class));
            obj.insert("contracting".into(), json!(r.contracting));
            let tested: Vec<Value> = r
                .tested
                .iter()
                .map(|t| {
                    json!({
                        "element": spec.format_word(&t.element),
                        "exact": t.exact.as_ref().map(rational_to_json),
                        "lower": rational_to_json(&t.lower),
                        "upper": rational_to_json(&t.upper),
                        "witness": t.witness.iter().map(|w| spec.format_word(w)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            obj.insert("tested".into(), Value::Array(tested));
            let mut s = format!("{class}\ntested:");
            for t in &r.tested {
                let v = match &t.exact {
                    Some(v) => v.to_string(),
                    None => format!("[{}, {}]", t.lower, t.upper),
                };
                s.push_str(&format!(
                    "\n  {}: defect limit {v}",
                    spec.format_word(&t.element)
                ));
            }
            if !r.contracting {
                s.push_str(
                    "\nno nucleus found: the classification covers the tested elements only",
                );
            }
            s
        }
        Command::Nucleus => match compute_nucleus(&spec, &limits) {
            Ok(n) => {
                obj.insert("status".into(), json!("found"));
                obj.insert("elements".into(), json!(nucleus_names(&spec, &n)));
                obj.insert("witness_depth".into(), json!(n.witness_depth));
                format!(
                    "{{{}}}\nwitness depth: {}",
                    nucleus_names(&spec, &n).join(", "),
                    n.witness_depth
                )
            }
            Err(inc) => {
                obj.insert("status".into(), json!("inconclusive"));
                obj.insert("reason".into(), json!(inc.to_string()));
                format!("inconclusive: {inc}")
            }
        },
        Command::AfdCheck => match compute_nucleus(&spec, &limits) {
            Ok(n) => {
                let check = afd_hypothesis_check(&spec, &n, &limits);
                afd_output(&spec, &check, &mut obj)
            }
            Err(inc) => {
                obj.insert("status".into(), json!("inconclusive"));
                obj.insert("reason".into(), json!(inc.to_string()));
                format!("inconclusive: no nucleus ({inc})")
            }
        },
        Command::YMeasure(a) => {
            let g = word(&a.element)?;
            let r = y_measure(&spec, &g, &limits)?;
            obj.insert("element".into(), json!(spec.format_word(&g)));
            measure_json(&mut obj, &r);
            measure_text(&r)
        }
        Command::Kms { expr } => {
            let alg = StarAlgebra::new(spec.clone(), limits);
            let x = alg.parse(expr)?;
            obj.insert("expr".into(), json!(alg.format(&x)));
            obj.insert("canonical".into(), json!(x.is_canonical()));
            let v = alg.psi(&x)?;
            obj.insert("psi".into(), rational_to_json(&v));
            v.to_string()
        }
        Command::KmsCheck(p) | Command::TraceCheck(p) => {
            let alg = StarAlgebra::new(spec.clone(), limits);
            let a = alg.parse_monomial(&p.left)?;
            let b = alg.parse_monomial(&p.right)?;
            let ok = if matches!(cli.command, Command::KmsCheck(_)) {
                alg.kms_check(&a, &b)?
            } else {
                alg.trace_check(&a, &b)?
            };
            obj.insert("left".into(), json!(alg.format_monomial(&a)));
            obj.insert("right".into(), json!(alg.format_monomial(&b)));
            obj.insert("holds".into(), json!(ok));
            ok.to_string()
        }
        Command::Gram { family } => {
            let words: Vec<GroupWord> = family
                .split(',')
                .map(|t| word(t.trim()))
                .collect::<Result<_, _>>()?;
            let alg = StarAlgebra::new(spec.clone(), limits);
            let m = alg.gram_matrix(&words)?;
            obj.insert(
                "matrix".into(),
                Value::Array(
                    m.iter()
                        .map(|row| Value::Array(row.iter().map(rational_to_json).collect()))
                        .collect(),
                ),
            );
            let outcome = selfsim_core::linalg::ldlt_psd(&m);
            let mut s = String::new();
            for row in &m {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                s.push_str(&format!("[{}]\n", cells.join(", ")));
            }
            match outcome {
                PsdOutcome::Psd(f) => {
                    obj.insert("psd".into(), json!(true));
                    obj.insert(
                        "pivots".into(),
                        json!(f.d.iter().map(rational_to_json).collect::<Vec<_>>()),
                    );
                    obj.insert("order".into(), json!(f.order));
                    let pivots: Vec<String> = f.d.iter().map(|v| v.to_string()).collect();
                    s.push_str(&format!("PSD, pivots {}", pivots.join(", ")));
                }
                PsdOutcome::NotPsd(v) => {
                    obj.insert("psd".into(), json!(false));
                    obj.insert(
                        "witness".into(),
                        json!(v.iter().map(rational_to_json).collect::<Vec<_>>()),
                    );
                    let cells: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    s.push_str(&format!("not PSD, witness [{}]", cells.join(", ")));
                }
            }
            s
        }
        Command::AnDistance(a) => {
            let g = word(&a.element)?;
            let alg = StarAlgebra::new(spec.clone(), limits);
            let d = alg.an_distance(&g, a.depth)?;
            obj.insert("element".into(), json!(spec.format_word(&g)));
            obj.insert("depth".into(), json!(a.depth));
            obj.insert("distance".into(), rational_to_json(&d));
            d.to_string()
        }
        Command::Act(a) => act(&spec, &limits, a, &mut obj)?,
        Command::Report { amenable } => {
            let r = build_report(&spec, &cli.common.group, *amenable, &limits)?;
            report_output(&spec, &r, &mut obj)
        }
    };
    obj.insert("command".into(), json!(command_name(&cli.command)));
    Ok(Output {
        text,
        json: Value::Object(obj),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::FixMeasure(_) => "fix-measure",
        Command::CountFixed(_) => "count-fixed",
        Command::Defect(_) => "defect",
        Command::Classify => "classify",
        Command::Nucleus => "nucleus",
        Command::AfdCheck => "afd-check",
        Command::YMeasure(_) => "y-measure",
        Command::Kms { .. } => "kms",
        Command::KmsCheck(_) => "kms-check",
        Command::TraceCheck(_) => "trace-check",
        Command::Gram { .. } => "gram",
        Command::AnDistance(_) => "an-distance",
        Command::Act(_) => "act",
        Command::Report { .. } => "report",
    }
}

fn genericity_label(g: Genericity) -> &'static str {
    match g {
        Genericity::One => "One",
        Genericity::Zero => "Zero",
        Genericity::Unknown => "Unknown",
    }
}

fn measure_text(r: &MeasureReport) -> String {
    match &r.exact {
        Some(v) => v.to_string(),
        None => format!(
            "[{}, {}] (counting bounds at depth {})",
            r.lower, r.upper, r.depth_used
        ),
    }
}

fn measure_json(obj: &mut Map<String, Value>, r: &MeasureReport) {
    obj.insert(
        "exact".into(),
        r.exact.as_ref().map(rational_to_json).into(),
    );
    obj.insert("lower".into(), rational_to_json(&r.lower));
    obj.insert("upper".into(), rational_to_json(&r.upper));
    obj.insert("depth_used".into(), json!(r.depth_used));
    obj.insert(
        "method".into(),
        json!(match r.method {
            MeasureMethod::LinearSystem => "linear-system",
            MeasureMethod::CountingBounds => "counting-bounds",
        }),
    );
}

fn nucleus_names(spec: &GroupSpec, n: &Nucleus) -> Vec<String> {
    n.elements
        .iter()
        .map(|e| spec.format_word(&e.word))
        .collect()
}

fn afd_output(spec: &GroupSpec, check: &AfdCheck, obj: &mut Map<String, Value>) -> String {
    match check {
        AfdCheck::Holds(w) => {
            let k = spec.alphabet_size();
            obj.insert("status".into(), json!("holds"));
            let mut witnesses = Map::new();
            let mut s = String::from("holds");
            for (g, u) in w {
                let name = spec.format_word(g);
                let letters = format_letters(k, u);
                s.push_str(&format!("\n  {name}: {:?}", letters));
                witnesses.insert(name, json!(letters));
            }
            obj.insert("witnesses".into(), Value::Object(witnesses));
            if let Some(m) = escape_depth(check) {
                obj.insert("escape_depth".into(), json!(m));
            }
            s
        }
        AfdCheck::Fails(g) => {
            obj.insert("status".into(), json!("fails"));
            obj.insert("element".into(), json!(spec.format_word(g)));
            format!("fails: {} has no trivial section", spec.format_word(g))
        }
        AfdCheck::Inconclusive(g) => {
            obj.insert("status".into(), json!("inconclusive"));
            obj.insert("element".into(), json!(spec.format_word(g)));
            format!("inconclusive: closure of {} truncated", spec.format_word(g))
        }
    }
}

fn act(
    spec: &GroupSpec,
    limits: &Limits,
    a: &Act,
    obj: &mut Map<String, Value>,
) -> Result<String, Failure> {
    let g = spec.parse_word(&a.element)?;
    let k = spec.alphabet_size();
    obj.insert("element".into(), json!(spec.format_word(&g)));
    if let Some(w) = &a.word {
        let u = parse_letters(k, w)?;
        let (v, h) = act_word(spec, &g, &u);
        let (image, section) = (format_letters(k, &v), spec.format_word(&h));
        obj.insert("image".into(), json!(image));
        obj.insert("section".into(), json!(section));
        return Ok(format!("{image}\nsection: {section}"));
    }
    let Some(period) = &a.period else {
        return Err(Failure::Usage("act needs --word or --period".into()));
    };
    let prefix = parse_letters(k, a.prefix.as_deref().unwrap_or(""))?;
    let period = parse_letters(k, period)?;
    if period.is_empty() {
        return Err(Failure::Usage("--period must be nonempty".into()));
    }
    let img = act_periodic(spec, &g, &PeriodicWord::new(prefix, period), limits)?;
    let (p, q) = (
        format_letters(k, &img.prefix),
        format_letters(k, &img.period),
    );
    obj.insert("prefix".into(), json!(p));
    obj.insert("period".into(), json!(q));
    Ok(format!("{p}({q})^inf"))
}

fn report_output(spec: &GroupSpec, r: &Report, obj: &mut Map<String, Value>) -> String {
    let k = spec.alphabet_size();
    let mut s = String::new();
    s.push_str(&format!("group: {} (sha256 {})\n", r.group, r.digest));
    s.push_str(&format!(
        "alphabet size: {k}, beta = {}, lambda = {}\n",
        r.beta(),
        r.lambda()
    ));
    obj.insert("digest".into(), json!(r.digest));
    obj.insert("alphabet_size".into(), json!(k));
    obj.insert("beta".into(), json!(r.beta()));
    obj.insert("lambda".into(), rational_to_json(&r.lambda()));

    s.push_str("fixed-point measures:\n");
    let mut fixed = Map::new();
    for (g, m) in &r.fixed_measures {
        s.push_str(&format!("  {}: {}\n", spec.format_word(g), measure_text(m)));
        let mut entry = Map::new();
        measure_json(&mut entry, m);
        fixed.insert(spec.format_word(g), Value::Object(entry));
    }
    obj.insert("fixed_measures".into(), Value::Object(fixed));

    let tested: Vec<String> = r
        .genericity
        .tested
        .iter()
        .map(|t| spec.format_word(&t.element))
        .collect();
    s.push_str(&format!(
        "genericity: {} (tested: {})\n",
        genericity_label(r.genericity.class),
        tested.join(", ")
    ));
    obj.insert(
        "genericity".into(),
        json!({
            "class": genericity_label(r.genericity.class),
            "contracting": r.genericity.contracting,
            "tested": tested,
        }),
    );

    match &r.nucleus {
        Ok(n) => {
            s.push_str(&format!(
                "nucleus: {{{}}}, witness depth {}\n",
                nucleus_names(spec, n).join(", "),
                n.witness_depth
            ));
            obj.insert(
                "nucleus".into(),
                json!({
                    "status": "found",
                    "elements": nucleus_names(spec, n),
                    "witness_depth": n.witness_depth,
                }),
            );
        }
        Err(inc) => {
            s.push_str(&format!("nucleus: inconclusive ({inc})\n"));
            obj.insert(
                "nucleus".into(),
                json!({"status": "inconclusive", "reason": inc.to_string()}),
            );
        }
    }

    match &r.afd {
        Some(check) => {
            let mut afd = Map::new();
            let line = afd_output(spec, check, &mut afd);
            s.push_str(&format!("trivial sections: {line}\n"));
            obj.insert("afd".into(), Value::Object(afd));
        }
        None => {
            s.push_str("trivial sections: not checked (no nucleus)\n");
            obj.insert("afd".into(), Value::Null);
        }
    }

    s.push_str("escape measures:\n");
    let mut ys = Map::new();
    for (g, m) in &r.y_measures {
        s.push_str(&format!("  {}: {}\n", spec.format_word(g), measure_text(m)));
        let mut entry = Map::new();
        measure_json(&mut entry, m);
        ys.insert(spec.format_word(g), Value::Object(entry));
    }
    obj.insert("y_measures".into(), Value::Object(ys));

    s.push_str(&format!(
        "amenable: {}\n",
        if r.amenable {
            "declared"
        } else {
            "not declared"
        }
    ));
    obj.insert("amenable".into(), json!(r.amenable));

    s.push_str("hypotheses:\n");
    let mut hyps = Vec::new();
    for h in &r.hypotheses {
        s.push_str(&format!("  [{}] {}\n", h.status.label(), h.statement));
        hyps.push(json!({"statement": h.statement, "status": h.status.label()}));
    }
    obj.insert("hypotheses".into(), Value::Array(hyps));

    s.push_str(&format!(
        "conclusion: {} ({})\n",
        r.conclusion.label(),
        r.headline()
    ));
    obj.insert("conclusion".into(), json!(r.conclusion.label()));
    obj.insert("headline".into(), json!(r.headline()));
    if !r.licenses.is_empty() {
        s.push_str("licensed by:\n");
        for l in &r.licenses {
            s.push_str(&format!("  {l}\n"));
        }
    }
    obj.insert("licenses".into(), json!(r.licenses));
    s
}
