//! `boscode`: verify, build, and simulate bosonic amplitude-damping codes.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails,
//! 2 on usage, input, or parse errors.

mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use boscode_core::algebra::{format_coefficients, parse_rational, rational_to_f64};
use boscode_core::catalog::{catalog, catalog_entry, verify_entry, CatalogEntry};
use boscode_core::code::{parse_code_with_warnings, parse_supports};
use boscode_core::construct::WeightStatus;
use boscode_core::criteria::{verify_numeric, CriteriaReport, Verdict};
use boscode_core::{
    build_recovery, build_t1_family, build_t2_pair, existence_min_n, fidelity_poly, rate, run_monte_carlo,
    serialize_code, solve_unbalanced_weights, verify, Code, OccupationVector, RadicalSum,
};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use report::{Format, Report};

#[derive(Parser)]
#[command(name = "boscode", version, about = "Exact tools for bosonic codes against amplitude damping")]
struct Cli {
    /// Worker threads for parallel checks (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Append wall-clock timing (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
#[command(group(ArgGroup::new("source").required(true).args(["file", "catalog"])))]
struct Source {
    /// Code file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Built-in catalog entry, 1 to 11.
    #[arg(long)]
    catalog: Option<u32>,
    /// Use the catalog rows as published, without corrections.
    #[arg(long, requires = "catalog")]
    as_printed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Numeric,
}

#[derive(Subcommand)]
enum Command {
    /// Check orthogonality, non-deformation, moments, and distance.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Number of losses to correct (default: the code's design t).
        #[arg(long)]
        t: Option<u32>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Loss probability for numeric mode.
        #[arg(long, default_value = "0.05")]
        gamma: String,
        /// Tolerance for numeric mode.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Build codes and print them in the code file format.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Fidelity polynomial Σ_{s≤t} C(N,s) γ^s (1−γ)^(N−s).
    Fidelity {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        t: Option<u32>,
        /// Evaluate at this loss probability as well.
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Encoded qubits per mode-qubit.
    Rate {
        #[command(flatten)]
        source: Source,
    },
    /// Smallest N guaranteed by the counting argument.
    Bound {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        m: u64,
    },
    /// Monte Carlo estimate of the recovery success probability.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Amplitude of codeword 0, e.g. `1`, `3/5`, `sqrt(1/2)`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        a: String,
        /// Amplitude of codeword 1.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        b: String,
    },
    /// Built-in explicit codes.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum ConstructKind {
    /// One equal-weight codeword per cyclic orbit of Q(n, m), scaled by d.
    T1 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cyclic shifts of d·x against cyclic shifts of d·reverse(x).
    T2 {
        /// Comma-separated occupations, e.g. `1,0,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u32>,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for weights on given supports.
    Weights {
        #[arg(long)]
        supports: PathBuf,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value = "weights")]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Print an entry in the code file format.
    Show {
        id: u32,
        #[arg(long)]
        as_printed: bool,
    },
    /// Verify every entry at its design t.
    VerifyAll,
}

enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// A check failed: exit 1, with whatever was gathered so far.
    Check(Report),
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }
}

enum Output {
    Report { report: Report, passed: bool },
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let command_line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    let result = run(&cli.command, &command_line);
    let elapsed = cli.timings.then(|| start.elapsed());
    match result {
        Ok(Output::Report { report, passed }) => {
            print!("{}", report.render(cli.format, elapsed));
            if passed { ExitCode::SUCCESS } else { ExitCode::from(1) }
        }
        Ok(Output::Text(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(report)) => {
            print!("{}", report.render(cli.format, elapsed));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command, line: &str) -> Result<Output, Failure> {
    match command {
        Command::Verify { source, t, mode, gamma, tol } => cmd_verify(line, source, *t, *mode, gamma, *tol),
        Command::Construct { kind } => cmd_construct(line, kind),
        Command::Fidelity { source, t, gamma } => cmd_fidelity(line, source, *t, gamma.as_deref()),
        Command::Rate { source } => cmd_rate(line, source),
        Command::Bound { lo, t, m } => cmd_bound(line, *lo, *t, *m),
        Command::Simulate { source, t, gamma, shots, seed, a, b } => {
            cmd_simulate(line, source, *t, gamma, *shots, *seed, a, b)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => Ok(cmd_catalog_list(line)),
            CatalogAction::Show { id, as_printed } => cmd_catalog_show(*id, *as_printed),
            CatalogAction::VerifyAll => cmd_catalog_verify_all(line),
        },
    }
}

/// Loads the code, reporting parse warnings into `report`. Invalid printed
/// catalog rows count as a failed check rather than bad input.
fn load(source: &Source, report: &mut Report) -> Result<Code, Failure> {
    if let Some(path) = &source.file {
        let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let (code, warnings) =
            parse_code_with_warnings(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        for (i, w) in warnings.iter().enumerate() {
            report.push(format!("warning.{}", i + 1), w);
        }
        return Ok(code);
    }
    let id = source.catalog.expect("clap enforces a source");
    let entry = catalog_entry(id).map_err(Failure::usage)?;
    if source.as_printed {
        if let Some((_, note)) = entry.defect {
            report.push("catalog.flag", note);
        }
        return entry.as_printed().map_err(|e| {
            report.push("code.name", entry.name());
            report.push("code.valid", format!("no ({e})"));
            report.push("result", "fail");
            Failure::Check(std::mem::take(report))
        });
    }
    entry.code().map_err(Failure::usage)
}

fn describe(code: &Code, report: &mut Report) {
    report.push("code.name", &code.name);
    report.push("code.descriptor", code.descriptor());
    report.push("code.balanced", yes_no(code.is_balanced()));
}

fn yes_no(b: bool) -> &'static str {
    if b { "yes" } else { "no" }
}

fn verdict(r: &CriteriaReport) -> String {
    match &r.verdict {
        Verdict::Pass => "pass".into(),
        Verdict::Fail => "fail".into(),
        Verdict::NotApplicable(why) => format!("n/a ({why})"),
    }
}

const SHOWN_VIOLATIONS: usize = 5;

fn push_check(report: &mut Report, r: &CriteriaReport) {
    let key = format!("check.{}", r.check);
    report.push(&key, verdict(r));
    if r.failed() {
        report.push(format!("{key}.violations"), r.violations.len());
        for (i, v) in r.violations.iter().take(SHOWN_VIOLATIONS).enumerate() {
            report.push(format!("{key}.violation.{}", i + 1), v);
        }
    }
}

fn cmd_verify(line: &str, source: &Source, t: Option<u32>, mode: Mode, gamma: &str, tol: f64) -> Result<Output, Failure> {
    let mut report = Report::new(line);
    let code = load(source, &mut report)?;
    let t = t.unwrap_or(code.design_t);
    describe(&code, &mut report);
    report.push("t", t);
    let v = verify(&code, t).map_err(Failure::usage)?;
    let passed = match mode {
        Mode::Exact => {
            report.push("mode", "exact");
            for r in v.reports() {
                push_check(&mut report, r);
            }
            v.passed()
        }
        Mode::Numeric => {
            let g = rational_to_f64(&parse_rational(gamma).map_err(Failure::usage)?);
            let n = verify_numeric(&code, t, g, tol).map_err(Failure::usage)?;
            report.push("mode", "numeric");
            report.push("numeric.gamma", g);
            report.push("numeric.tolerance", format!("{tol:e}"));
            report.push("numeric.max_overlap", format!("{:.3e}", n.max_overlap));
            report.push("numeric.max_norm_spread", format!("{:.3e}", n.max_norm_spread));
            let pf = |ok: bool| if ok { "pass" } else { "fail" };
            report.push("check.orthogonality", pf(n.max_overlap <= tol));
            report.push("check.nondeformation", pf(n.max_norm_spread <= tol));
            push_check(&mut report, &v.moments);
            push_check(&mut report, &v.distance);
            n.passed() && !v.moments.failed() && !v.distance.failed()
        }
    };
    if let Some(d) = &v.distance.min_distance {
        report.push("distance.min", d);
    }
    report.push("result", if passed { "pass" } else { "fail" });
    Ok(Output::Report { report, passed })
}

fn write_or_print(line: &str, text: String, out: &Option<PathBuf>) -> Result<Output, Failure> {
    match out {
        None => Ok(Output::Text(text)),
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let mut report = Report::new(line);
            report.push("written", path.display());
            Ok(Output::Report { report, passed: true })
        }
    }
}

fn cmd_construct(line: &str, kind: &ConstructKind) -> Result<Output, Failure> {
    match kind {
        ConstructKind::T1 { n, m, d, out } => {
            let family = build_t1_family(*n, *m, *d).map_err(Failure::usage)?;
            write_or_print(line, serialize_code(&family.code), out)
        }
        ConstructKind::T2 { x, d, out } => {
            let pair = build_t2_pair(&OccupationVector::new(x.clone()), *d).map_err(Failure::usage)?;
            for w in &pair.warnings {
                eprintln!("warning: {w}");
            }
            write_or_print(line, serialize_code(&pair.code), out)
        }
        ConstructKind::Weights { supports, t, name, out } => {
            let text =
                fs::read_to_string(supports).map_err(|e| Failure::usage(format!("{}: {e}", supports.display())))?;
            let sets = parse_supports(&text).map_err(|e| Failure::usage(format!("{}: {e}", supports.display())))?;
            let res = solve_unbalanced_weights(&sets, *t).map_err(Failure::usage)?;
            for w in &res.warnings {
                eprintln!("warning: {w}");
            }
            if res.status == WeightStatus::Infeasible {
                let mut report = Report::new(line);
                report.push("status", res.status);
                report.push("rank", res.residual_constraints);
                for (i, c) in res.failing_constraints.iter().enumerate() {
                    report.push(format!("failing.{}", i + 1), c);
                }
                return Err(Failure::Check(report));
            }
            let code = res.to_code(&sets, name, *t).map_err(Failure::usage)?;
            let header = format!("# status: {}, rank {}\n", res.status, res.residual_constraints);
            write_or_print(line, header + &serialize_code(&code), out)
        }
    }
}

fn cmd_fidelity(line: &str, source: &Source, t: Option<u32>, gamma: Option<&str>) -> Result<Output, Failure> {
    let mut report = Report::new(line);
    let code = load(source, &mut report)?;
    let t = t.unwrap_or(code.design_t);
    describe(&code, &mut report);
    let n = code.total_photons();
    report.push("N", n);
    report.push("t", t);
    let f = fidelity_poly(n, t).map_err(Failure::usage)?;
    report.push("fidelity.polynomial", format_coefficients(&f.coefficients));
    let coeffs: Vec<String> = f.coefficients.iter().map(ToString::to_string).collect();
    report.push("fidelity.coefficients", coeffs.join(","));
    report.push("fidelity.deficit", &f.leading_deficit);
    report.push("fidelity.leading", format!("1 - {}γ^{}", f.leading_deficit, t + 1));
    match build_recovery(&code, t) {
        Ok(rec) => report.push("fidelity.matches_recovery", yes_no(rec.success_polynomial() == f.polynomial)),
        Err(e) => report.push("fidelity.matches_recovery", format!("n/a ({e})")),
    }
    if let Some(g) = gamma {
        let g = parse_rational(g).map_err(Failure::usage)?;
        let value = f.polynomial.eval(&g).map_err(Failure::usage)?;
        report.push("gamma", &g);
        report.push("fidelity.value", &value);
        report.push("fidelity.value_decimal", format!("{:.12}", rational_to_f64(&value)));
    }
    Ok(Output::Report { report, passed: true })
}

fn cmd_rate(line: &str, source: &Source) -> Result<Output, Failure> {
    let mut report = Report::new(line);
    let code = load(source, &mut report)?;
    describe(&code, &mut report);
    let r = rate(&code);
    report.push("codewords", code.codewords().len());
    report.push("rate.k", format!("{:.6}", r.k));
    report.push("rate.denominator", format!("{:.6}", r.denominator));
    report.push("rate", format!("{:.4}", r.rate));
    Ok(Output::Report { report, passed: true })
}

fn cmd_bound(line: &str, lo: u64, t: u32, m: u64) -> Result<Output, Failure> {
    let n = existence_min_n(lo, t, m).map_err(Failure::usage)?;
    let mut report = Report::new(line);
    report.push("l_o", lo);
    report.push("t", t);
    report.push("m", m);
    report.push("bound", format!("N >= {n}"));
    report.push("bound.min_n", n);
    Ok(Output::Report { report, passed: true })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    line: &str,
    source: &Source,
    t: Option<u32>,
    gamma: &str,
    shots: u64,
    seed: u64,
    a: &str,
    b: &str,
) -> Result<Output, Failure> {
    let mut report = Report::new(line);
    let code = load(source, &mut report)?;
    let t = t.unwrap_or(code.design_t);
    describe(&code, &mut report);
    let g = parse_rational(gamma).map_err(Failure::usage)?;
    let mut coeffs = vec![RadicalSum::zero(); code.codewords().len()];
    coeffs[0] = a.parse().map_err(Failure::usage)?;
    let b: RadicalSum = b.parse().map_err(Failure::usage)?;
    if coeffs.len() > 1 {
        coeffs[1] = b;
    } else if !b.is_zero() {
        return Err(Failure::usage("--b given for a single-codeword code"));
    }
    let res = run_monte_carlo(&code, t, &coeffs, &g, shots, seed).map_err(Failure::usage)?;
    report.push("t", t);
    report.push("gamma", &g);
    report.push("seed", res.seed);
    report.push("shots", res.shots);
    report.push("successes", res.successes);
    report.push("estimate", format!("{:.8}", res.estimated_fidelity));
    report.push("exact", &res.exact_fidelity);
    report.push("exact_decimal", format!("{:.8}", rational_to_f64(&res.exact_fidelity)));
    report.push("abs_error", format!("{:.3e}", (res.estimated_fidelity - rational_to_f64(&res.exact_fidelity)).abs()));
    report.push("sigma", format!("{:.3e}", res.sigma()));
    report.push("z_score", format!("{:.3}", res.z_score()));
    Ok(Output::Report { report, passed: true })
}

fn flag_name(e: &CatalogEntry) -> &'static str {
    e.defect.map_or("none", |(_, note)| note)
}

fn cmd_catalog_list(line: &str) -> Output {
    let mut report = Report::new(line);
    for e in catalog() {
        let balanced = match e.as_printed() {
            Ok(c) => yes_no(c.is_balanced()).to_string(),
            Err(_) => "invalid".into(),
        };
        report.push(
            format!("example.{}", e.id),
            format!("{} t={} balanced={balanced} flag={}", e.descriptor, e.design_t, flag_name(&e)),
        );
    }
    Output::Report { report, passed: true }
}

fn cmd_catalog_show(id: u32, as_printed: bool) -> Result<Output, Failure> {
    let entry = catalog_entry(id).map_err(Failure::usage)?;
    if !as_printed {
        let code = entry.code().map_err(Failure::usage)?;
        return Ok(Output::Text(serialize_code(&code)));
    }
    match entry.as_printed() {
        Ok(code) => Ok(Output::Text(serialize_code(&code))),
        Err(e) => {
            // Render the raw rows so the defect is visible.
            let mut text = format!("# not a valid code: {e}\n");
            for (i, rows) in entry.printed.iter().enumerate() {
                text.push_str(&format!("word {i}\n"));
                for r in rows {
                    let occ: Vec<String> = r.qcs.occupations().iter().map(ToString::to_string).collect();
                    text.push_str(&format!("{} {}/{} : {}\n", r.sign.symbol(), r.mu.numer(), r.mu.denom(), occ.join(" ")));
                }
            }
            Ok(Output::Text(text))
        }
    }
}

fn cmd_catalog_verify_all(line: &str) -> Result<Output, Failure> {
    let mut report = Report::new(line);
    let (mut passed, mut flagged, mut unexpected) = (0, 0, 0);
    for e in catalog() {
        let r = verify_entry(&e).map_err(Failure::usage)?;
        let printed = match &r.printed {
            Ok(v) if v.corrects() => "pass".to_string(),
            Ok(_) => "fail".to_string(),
            Err(err) => format!("invalid ({err})"),
        };
        let mut value = format!("{} t={} printed={printed}", e.descriptor, e.design_t);
        if let Some(ok) = r.corrected_corrects() {
            value.push_str(&format!(" corrected={}", if ok { "pass" } else { "fail" }));
            if !ok {
                unexpected += 1;
            }
        }
        if let Some(Ok(res)) = &r.repair {
            value.push_str(&format!(" repair={}", res.status));
        }
        if r.printed_corrects() {
            passed += 1;
        } else {
            flagged += 1;
            value.push_str(&format!(" flag={}", flag_name(&e)));
            if !e.is_flagged() {
                unexpected += 1;
            }
        }
        report.push(format!("example.{}", e.id), value);
    }
    report.push("summary", format!("{passed} pass, {flagged} flagged"));
    report.push("result", if unexpected == 0 { "pass" } else { "fail" });
    Ok(Output::Report { report, passed: unexpected == 0 })
}
