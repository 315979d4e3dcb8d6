use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quartic_dirac::algebra::parse_rational;
use quartic_dirac::closedform::{
    critical_point, dirac_moment, free_energy, free_energy_integrated, moment, moment_table, moment_table_csv,
    susceptibility_expansion, Signature,
};
use quartic_dirac::mapenum::{cancellation_report, enumerate_gluings, moment_coefficient};
use quartic_dirac::montecarlo::{
    estimate_dirac, estimate_moment, run_chain, Observable, SampleStream, SamplerConfig,
};
use quartic_dirac::sde::{generate_equation, generate_full_system, generate_system, SdeEquation};
use quartic_dirac::solver::{solve_series, verify_closed_forms, CheckStatus, SolveOptions};
use quartic_dirac::{CanonicalMoment, CouplingPoint, Error, SurdScalar, Word, Q};

/// Large-N moments, loop equations, map counts and Monte Carlo for quartic
/// two-matrix Dirac ensembles.
#[derive(Parser)]
#[command(name = "quartic-dirac", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "QUARTIC_DIRAC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Latex,
}

#[derive(Args)]
struct Point {
    #[arg(long, allow_hyphen_values = true)]
    t2: String,
    #[arg(long, allow_hyphen_values = true)]
    t4: String,
}

impl Point {
    fn parse(&self) -> Result<CouplingPoint, Error> {
        CouplingPoint::parse(&self.t2, &self.t4)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form moments at a coupling point.
    Moments {
        #[command(flatten)]
        point: Point,
        /// Moment index such as `2`, `2,2` or `m_{3,1,1,1}`.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        index: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Closed-form Dirac moment d_ell.
    Dirac {
        #[arg(long)]
        ell: u32,
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Genus-zero free energy.
    FreeEnergy {
        #[command(flatten)]
        point: Point,
        /// Allow t4 < 0 down to the critical point.
        #[arg(long)]
        allow_negative_t4: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Loop equations of one word or of all words up to a degree.
    Sde {
        #[arg(long, conflicts_with = "max_degree", required_unless_present = "max_degree")]
        word: Option<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        /// With --max-degree: every word instead of the single-A-block family.
        #[arg(long)]
        all_words: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Perturbative moment series from the loop equations.
    Series {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "1")]
        t2: String,
        /// Impose m_{1,1,1,1} = 0 as an extra constraint.
        #[arg(long)]
        enforce_abab_zero: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Colored gluings of a rooted word at order t4^k.
    Enumerate {
        #[arg(long)]
        word: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "1")]
        t2: String,
        /// List every gluing instead of the planar summary.
        #[arg(long)]
        list: bool,
        /// Sign bookkeeping for the root ABAB at this order.
        #[arg(long)]
        report_cancellation: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Metropolis sampling of the finite-N ensemble.
    Mc(McArgs),
    /// Susceptibility expansion near the critical point.
    Critical {
        #[arg(long, default_value = "1")]
        t2: String,
        #[arg(long, default_value_t = 4)]
        terms: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Closed forms against the solver; exit 2 on any failure.
    Verify {
        #[arg(long, default_value_t = 8)]
        degree: usize,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value = "1")]
        t2: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value = "(2,0)")]
    signature: String,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value = "1")]
    t2: String,
    #[arg(long, default_value = "1")]
    t4: String,
    /// Proposals per chain, burn-in included.
    #[arg(long, default_value_t = 200_000)]
    steps: u64,
    #[arg(long, default_value_t = 20_000)]
    burn_in: u64,
    #[arg(long, default_value_t = 10)]
    thinning: u64,
    #[arg(long, default_value_t = 0.1)]
    step_scale: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    chains: usize,
    /// Words to estimate (repeatable).
    #[arg(long = "word", default_values_t = ["AA".to_string(), "ABAB".to_string()])]
    words: Vec<String>,
    /// Dirac moments to estimate (repeatable, even).
    #[arg(long = "dirac")]
    dirac: Vec<u32>,
    /// Dense Dirac evaluation on every k-th recorded state.
    #[arg(long, default_value_t = 50)]
    dirac_stride: u64,
    /// CSV trace output.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// JSON summary output (default: standard output).
    #[arg(long)]
    summary: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Out = Result<String, Failure>;

fn rational(text: &str, name: &str) -> Result<Q, Failure> {
    parse_rational(text).map_err(|e| Failure::Validation(format!("--{name}: {e}")))
}

fn exact(v: &SurdScalar) -> String {
    match v.to_rational() {
        Some(r) => r.to_string(),
        None => format!("{v} where s = sqrt({})", v.ssq),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn unsupported(format: Format, verb: &str) -> Failure {
    let name = match format {
        Format::Text => "text",
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Latex => "latex",
    };
    Failure::Validation(format!("{verb} does not support --format {name}"))
}

fn cmd_moments(point: &Point, index: Option<&str>, format: Format) -> Out {
    let p = point.parse()?;
    if let Some(index) = index {
        let c = CanonicalMoment::parse(index)?;
        let v = moment(&c, &p)?;
        return match format {
            Format::Text => Ok(format!("{} = {} ({})\n", c.name(), exact(&v), v.to_f64())),
            Format::Json => Ok(pretty(&json!({"t2": p.t2.to_string(), "t4": p.t4.to_string(), "moments": [
                {"index": c, "name": c.name(), "value": v}
            ]}))),
            f => Err(unsupported(f, "moments --index")),
        };
    }
    let rows = moment_table(&p)?;
    match format {
        Format::Text => {
            let mut out = String::new();
            for r in &rows {
                writeln!(out, "{} = {} ({})", r.name, exact(&r.value), r.value.to_f64()).expect("string");
            }
            Ok(out)
        }
        Format::Csv => Ok(moment_table_csv(&rows)),
        Format::Json => Ok(pretty(&json!({"t2": p.t2.to_string(), "t4": p.t4.to_string(), "moments": rows}))),
        f => Err(unsupported(f, "moments")),
    }
}

fn cmd_dirac(ell: u32, point: &Point, format: Format) -> Out {
    let p = point.parse()?;
    let v = dirac_moment(ell, &p)?;
    match format {
        Format::Text => Ok(format!("d_{ell} = {} ({})\n", exact(&v), v.to_f64())),
        Format::Json => Ok(pretty(&json!({"t2": p.t2.to_string(), "t4": p.t4.to_string(), "ell": ell, "value": v}))),
        f => Err(unsupported(f, "dirac")),
    }
}

fn cmd_free_energy(point: &Point, allow_negative: bool, format: Format) -> Out {
    let p = point.parse()?;
    let f = free_energy(&p, allow_negative)?;
    let integrated = if p.t4_f64() >= 0.0 { Some(free_energy_integrated(&p)?) } else { None };
    match format {
        Format::Text => {
            let mut out = format!("F0 = {f:.15}\n");
            if let Some(g) = integrated {
                writeln!(out, "F0 (Gaussian value minus integrated d_4) = {g:.15}").expect("string");
            }
            Ok(out)
        }
        Format::Json => Ok(pretty(&json!({
            "t2": p.t2.to_string(), "t4": p.t4.to_string(),
            "free_energy": f, "free_energy_integrated": integrated,
        }))),
        f => Err(unsupported(f, "free-energy")),
    }
}

fn render_system(eqs: &[SdeEquation], format: Format) -> Out {
    match format {
        Format::Text => Ok(eqs.iter().map(|e| format!("{}: {}\n", e.source_word, e.to_text())).collect()),
        Format::Latex => Ok(eqs.iter().map(|e| format!("&{}: {}\\\\\n", e.source_word.pretty(), e.to_latex())).collect()),
        Format::Json => Ok(pretty(&Value::Array(eqs.iter().map(SdeEquation::to_json).collect()))),
        f => Err(unsupported(f, "sde")),
    }
}

fn cmd_sde(word: Option<&str>, max_degree: Option<usize>, all_words: bool, format: Format) -> Out {
    if let Some(w) = word {
        let eq = generate_equation(&Word::parse(w)?);
        return match format {
            Format::Text => Ok(format!("{}\n", eq.to_text())),
            Format::Latex => Ok(format!("{}\n", eq.to_latex())),
            Format::Json => Ok(pretty(&eq.to_json())),
            f => Err(unsupported(f, "sde")),
        };
    }
    let d = max_degree.expect("clap requires one of --word/--max-degree");
    let eqs = if all_words { generate_full_system(d) } else { generate_system(d) };
    render_system(&eqs, format)
}

fn cmd_series(degree: usize, order: usize, t2: &str, enforce: bool, format: Format) -> Out {
    let t2 = rational(t2, "t2")?;
    let options = SolveOptions { enforce_vanishing_abab: enforce, ..SolveOptions::default() };
    let table = solve_series(degree, order, &t2, options)?;
    match format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => Ok(pretty(&table.to_json())),
        Format::Text => {
            let mut out = String::new();
            for (c, s) in &table.entries {
                writeln!(out, "{} = {}", c.name(), s.series).expect("string");
            }
            Ok(out)
        }
        f => Err(unsupported(f, "series")),
    }
}

fn cmd_enumerate(word: &str, order: usize, t2: &str, list: bool, report: bool, format: Format) -> Out {
    let t2 = rational(t2, "t2")?;
    if report {
        let r = cancellation_report(order);
        return match format {
            Format::Json => Ok(pretty(&json!(r))),
            Format::Text => Ok(format!(
                "ABAB order {}: {} positive, {} negative planar gluings; distinguished cell in every map: {}; \
                 signed sum {} ({})\n",
                r.order,
                r.positive_weight_count,
                r.negative_weight_count,
                r.distinguished_cell_in_every_map,
                r.signed_sum,
                if r.paired { "cancels" } else { "does not cancel" }
            )),
            f => Err(unsupported(f, "enumerate --report-cancellation")),
        };
    }
    let w = Word::parse(word)?;
    if list {
        let maps = enumerate_gluings(&w, order, &t2)?;
        return match format {
            Format::Json => Ok(pretty(&json!(maps))),
            Format::Text => Ok(maps
                .iter()
                .map(|m| {
                    format!(
                        "{:?} genus {} planar {} N^{} weight {}\n",
                        m.cells, m.topology.genus, m.topology.planar(), m.topology.n_exponent, m.weight
                    )
                })
                .collect()),
            f => Err(unsupported(f, "enumerate --list")),
        };
    }
    let c = moment_coefficient(&w, order, &t2)?;
    match format {
        Format::Text => Ok(format!("[t4^{order}] {w} = {c}\n")),
        Format::Json => Ok(pretty(&json!({"word": w.to_string(), "order": order, "t2": t2.to_string(), "coefficient": c.to_string()}))),
        f => Err(unsupported(f, "enumerate")),
    }
}

fn mc_summary(stream: &SampleStream) -> Result<Value, Error> {
    let mut estimates = Vec::new();
    for o in &stream.config.observables {
        let (name, e) = match o {
            Observable::Word(w) => (format!("(1/N) tr {w}"), estimate_moment(stream, &Word::parse(w)?)?),
            Observable::Dirac(ell) => (format!("(1/N^2) tr D^{ell}"), estimate_dirac(stream, *ell)?),
        };
        estimates.push(json!({"observable": name, "mean": e.mean, "std_error": e.std_error, "n_eff": e.n_eff}));
    }
    let c = &stream.config;
    Ok(json!({
        "config": {
            "n": c.n, "signature": c.signature.label(), "t2": c.point.t2.to_string(), "t4": c.point.t4.to_string(),
            "steps": c.steps, "burn_in": c.burn_in, "thinning": c.thinning, "step_scale": c.step_scale,
            "seed": c.seed, "chains": c.chains, "dirac_stride": c.dirac_stride,
        },
        "acceptance_rate": stream.acceptance_rate(),
        "tuned_step_scales": stream.chains.iter().map(|c| c.tuned_step_scale).collect::<Vec<_>>(),
        "diagnostics": stream.diagnostics(),
        "estimates": estimates,
    }))
}

fn cmd_mc(a: &McArgs) -> Out {
    let point = CouplingPoint::parse(&a.t2, &a.t4)?;
    let mut cfg = SamplerConfig::new(a.n, Signature::parse(&a.signature)?, point);
    cfg.steps = a.steps;
    cfg.burn_in = a.burn_in;
    cfg.thinning = a.thinning;
    cfg.step_scale = a.step_scale;
    cfg.seed = a.seed;
    cfg.chains = a.chains;
    cfg.dirac_stride = a.dirac_stride;
    cfg.record_trace = a.trace.is_some();
    cfg.observables = a.words.iter().map(|w| Observable::Word(w.clone())).collect();
    cfg.observables.extend(a.dirac.iter().map(|&l| Observable::Dirac(l)));
    cfg.validate()?;
    let stream = run_chain(&cfg)?;
    for d in stream.diagnostics() {
        eprintln!("warning: {d}");
    }
    if let Some(path) = &a.trace {
        std::fs::write(path, stream.trace_csv())
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    let summary = pretty(&mc_summary(&stream)?);
    match &a.summary {
        Some(path) => {
            std::fs::write(path, &summary)
                .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(summary),
    }
}

fn cmd_critical(t2: &str, terms: usize, format: Format) -> Out {
    let t2 = rational(t2, "t2")?;
    let e = susceptibility_expansion(&t2, terms)?;
    match format {
        Format::Text => {
            let mut out = format!("t_c = {}\n", critical_point(&t2));
            for t in &e.terms {
                let power = if t.exponent_twice % 2 == 0 {
                    (t.exponent_twice / 2).to_string()
                } else {
                    format!("{}/2", t.exponent_twice)
                };
                writeln!(out, "(t4 - t_c)^{power}: {} ({})", exact(&t.coefficient), t.value).expect("string");
            }
            writeln!(out, "gamma = {}", e.gamma).expect("string");
            Ok(out)
        }
        Format::Json => Ok(pretty(&json!(e))),
        f => Err(unsupported(f, "critical")),
    }
}

fn cmd_verify(degree: usize, order: usize, t2: &str, format: Format) -> Out {
    let t2 = rational(t2, "t2")?;
    let report = verify_closed_forms(degree, order, &t2)?;
    let text = match format {
        Format::Json => pretty(&json!(report)),
        Format::Text => {
            let mut out = String::new();
            for r in &report.rows {
                let status = match &r.status {
                    CheckStatus::Pass => "PASS".to_string(),
                    CheckStatus::Mismatch { order, closed_form, solver } => {
                        format!("FAIL  t4^{order}: closed form {closed_form}, solver {solver}")
                    }
                    CheckStatus::Pole { power } => format!("FAIL  pole of order {power} at t4 = 0"),
                    CheckStatus::NotCovered => "FAIL  not covered by the solver".to_string(),
                };
                writeln!(out, "{:<24} {status}", r.label).expect("string");
            }
            let passed = report.rows.iter().filter(|r| r.status == CheckStatus::Pass).count();
            writeln!(out, "{passed}/{} checks pass", report.rows.len()).expect("string");
            out
        }
        f => return Err(unsupported(f, "verify")),
    };
    if report.all_pass() {
        Ok(text)
    } else {
        Err(Failure::Verification(text))
    }
}

fn dispatch(cli: &Cli) -> Out {
    match &cli.command {
        Command::Moments { point, index, all: _, format } => cmd_moments(point, index.as_deref(), *format),
        Command::Dirac { ell, point, format } => cmd_dirac(*ell, point, *format),
        Command::FreeEnergy { point, allow_negative_t4, format } => cmd_free_energy(point, *allow_negative_t4, *format),
        Command::Sde { word, max_degree, all_words, format } => {
            cmd_sde(word.as_deref(), *max_degree, *all_words, *format)
        }
        Command::Series { degree, order, t2, enforce_abab_zero, format } => {
            cmd_series(*degree, *order, t2, *enforce_abab_zero, *format)
        }
        Command::Enumerate { word, order, t2, list, report_cancellation, format } => {
            cmd_enumerate(word, *order, t2, *list, *report_cancellation, *format)
        }
        Command::Mc(a) => cmd_mc(a),
        Command::Critical { t2, terms, format } => cmd_critical(t2, *terms, *format),
        Command::Verify { degree, order, t2, format } => cmd_verify(*degree, *order, t2, *format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(report)) => {
            print!("{report}");
            ExitCode::from(2)
        }
    }
}
