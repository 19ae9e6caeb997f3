use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};

use tau_interlace::interlace::interlace_check;
use tau_interlace::jacobi::{phi, phi_full};
use tau_interlace::poly::parse_rational;
use tau_interlace::realroots::{all_negative_simple, isolate};
use tau_interlace::scanner::{
    find_threshold_thm4, parse_n_range, scan, summarize, vieta_asymptotics, Check, GridSpec, RationalRange,
    ScanReport,
};
use tau_interlace::stability::{stability_of_fg, stability_of_theorem4, Intermediary};
use tau_interlace::{to_f64, JacobiParams, RatPoly, Rational};

#[derive(Parser)]
#[command(name = "tau-interlace", version, about = "Exact zero-interlacing experiments on Jacobi tau polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn rational_range(s: &str) -> Result<RationalRange, String> {
    s.parse().map_err(|e: tau_interlace::Error| e.to_string())
}

fn n_range(s: &str) -> Result<(usize, usize), String> {
    parse_n_range(s).map_err(|e| e.to_string())
}

fn bracket(s: &str) -> Result<(Rational, Rational), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    Ok((rational(a)?, rational(b)?))
}

fn coeff_list(s: &str) -> Result<RatPoly, String> {
    let coeffs = s.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
    Ok(RatPoly::new(coeffs))
}

#[derive(clap::Args)]
struct Params {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    alpha: Rational,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    beta: Rational,
}

impl Params {
    fn jacobi(&self) -> JacobiParams {
        JacobiParams::new(self.n, self.alpha.clone(), self.beta.clone())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Thm4,
    F,
    G,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficients of phi_n, or of the full derivative tower.
    Phi {
        #[command(flatten)]
        params: Params,
        /// All derivative orders instead of the even ones.
        #[arg(long)]
        full: bool,
        /// With --full, take the tower of P_n^(alpha, beta-1).
        #[arg(long)]
        beta_shift: bool,
    },
    /// Isolated real roots of phi_n.
    Roots {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = rational, default_value = "1e-8")]
        precision: Rational,
    },
    /// Interlacing verdict for a pair of polynomials.
    Interlace {
        /// `phi:N,M` for (phi_N, phi_M), or `custom` with --p and --q.
        #[arg(long)]
        pair: String,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        alpha: Option<Rational>,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        beta: Option<Rational>,
        /// Comma-separated coefficients, lowest degree first.
        #[arg(long, value_parser = coeff_list, allow_hyphen_values = true)]
        p: Option<RatPoly>,
        #[arg(long, value_parser = coeff_list, allow_hyphen_values = true)]
        q: Option<RatPoly>,
    },
    /// Hurwitz stability of Phi_n(1; mu), f(1; mu) or g(1; mu).
    Stability {
        #[arg(long, value_enum)]
        target: Target,
        #[command(flatten)]
        params: Params,
        #[arg(long = "A", value_parser = rational, allow_hyphen_values = true)]
        a: Option<Rational>,
    },
    /// Evaluate a check over a parameter grid.
    Scan {
        /// conjA, conjB, ccw, lemma-derivs, chains, sec5, thm4, lemma-main, cor-main or fg.
        #[arg(long)]
        check: String,
        #[arg(long, value_parser = rational_range, allow_hyphen_values = true)]
        alpha_range: Option<RationalRange>,
        #[arg(long, value_parser = rational_range, allow_hyphen_values = true)]
        beta_range: Option<RationalRange>,
        #[arg(long, value_parser = n_range)]
        n_range: Option<(usize, usize)>,
        /// Comma-separated values of A for chains and fg.
        #[arg(long = "A", allow_hyphen_values = true)]
        a_values: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write the reports here instead of stdout; the summary then goes to stdout.
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Bisect for the onset of instability of Phi_n(1; mu) in alpha.
    Threshold {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        beta: Rational,
        #[arg(long, value_parser = bracket, allow_hyphen_values = true)]
        bracket: (Rational, Rational),
        #[arg(long, value_parser = rational, default_value = "1e-5")]
        tol: Rational,
    },
    /// Root sums of phi_n for n = 4..=n_max.
    Vieta {
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "0")]
        alpha: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "0")]
        beta: Rational,
    },
}

type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn strings(coeffs: &[Rational]) -> Vec<String> {
    coeffs.iter().map(|c| c.to_string()).collect()
}

fn print_json(value: &Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

fn run_phi(params: &Params, full: bool, beta_shift: bool) -> CliResult {
    if params.n == 0 {
        return Err("n must be at least 1".into());
    }
    let jp = params.jacobi();
    let poly = if full { phi_full(&jp, beta_shift) } else { phi(&jp) };
    print_json(&json!({ "params": jp, "full": full, "beta_shift": beta_shift, "coeffs": strings(poly.coeffs()) }))?;
    Ok(ExitCode::SUCCESS)
}

fn run_roots(params: &Params, precision: &Rational) -> CliResult {
    let poly = phi(&params.jacobi());
    let roots = isolate(&poly, precision)?;
    let verdict = all_negative_simple(&poly)?;
    print_json(&json!({
        "params": params.jacobi(),
        "roots": roots.roots,
        "all_real": roots.all_real,
        "negative_count": roots.negative_count,
        "verdict": verdict,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn parse_phi_pair(arg: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected phi:N,M, got {arg:?}");
    let rest = arg.strip_prefix("phi:").ok_or_else(bad)?;
    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
    let first: usize = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim();
    // allow the literal forms N-1 and N-2
    let second = match b.strip_prefix("N-") {
        Some(k) => first.checked_sub(k.parse().map_err(|_| bad())?).ok_or_else(bad)?,
        None => b.parse().map_err(|_| bad())?,
    };
    Ok((first, second))
}

fn run_interlace(
    pair: &str,
    alpha: Option<&Rational>,
    beta: Option<&Rational>,
    p: Option<&RatPoly>,
    q: Option<&RatPoly>,
) -> CliResult {
    let (p, q) = if pair == "custom" {
        match (p, q) {
            (Some(p), Some(q)) => (p.clone(), q.clone()),
            _ => return Err("--pair custom needs --p and --q".into()),
        }
    } else {
        let (n, m) = parse_phi_pair(pair)?;
        let (Some(a), Some(b)) = (alpha, beta) else {
            return Err("--pair phi:N,M needs --alpha and --beta".into());
        };
        if n == 0 || m == 0 {
            return Err("degrees must be at least 1".into());
        }
        (
            phi(&JacobiParams::new(n, a.clone(), b.clone())),
            phi(&JacobiParams::new(m, a.clone(), b.clone())),
        )
    };
    let out = interlace_check(&p, &q);
    print_json(&json!({
        "p": strings(p.coeffs()),
        "q": strings(q.coeffs()),
        "verdict": out.verdict,
        "certificate": out.certificate,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn run_stability(target: Target, params: &Params, a: Option<&Rational>) -> CliResult {
    let verdict = match target {
        Target::Thm4 => stability_of_theorem4(params.n, &params.alpha, &params.beta)?,
        Target::F | Target::G => {
            let a = a.ok_or("--A is required for f and g")?;
            let which = if matches!(target, Target::F) { Intermediary::F } else { Intermediary::G };
            stability_of_fg(which, params.n, &params.alpha, &params.beta, a)?
        }
    };
    print_json(&json!({
        "params": params.jacobi(),
        "stable": verdict.stable,
        "witness": verdict.failure_witness,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn kv(map: &std::collections::BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn write_csv(reports: &[ScanReport], sink: Box<dyn Write>) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "check_id", "n", "alpha", "beta", "extra", "region", "claimed", "verdict", "info", "witness", "elapsed_ms",
    ])?;
    for r in reports {
        w.write_record([
            r.check_id.id().to_string(),
            r.point.n.to_string(),
            r.point.alpha.to_string(),
            r.point.beta.to_string(),
            kv(&r.point.extra),
            r.region.clone(),
            r.claimed.to_string(),
            r.verdict.to_string(),
            kv(&r.info),
            r.witness.as_ref().map(Value::to_string).unwrap_or_default(),
            format!("{:.3}", r.elapsed_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_scan(
    check: &str,
    alpha: Option<RationalRange>,
    beta: Option<RationalRange>,
    n: Option<(usize, usize)>,
    a_values: Option<&str>,
    jobs: Option<usize>,
    format: Format,
    output: Option<&std::path::Path>,
) -> CliResult {
    let check = Check::from_name(check).ok_or_else(|| format!("unknown check {check:?}"))?;
    if let Some(k) = jobs {
        rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global()?;
    }
    let mut grid = GridSpec::default_for(check);
    if let Some(a) = alpha {
        grid.alpha = a;
    }
    if let Some(b) = beta {
        grid.beta = b;
    }
    if let Some((lo, hi)) = n {
        grid.n_min = lo;
        grid.n_max = hi;
    }
    if let Some(values) = a_values {
        let values = values.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
        if values.iter().any(Zero::is_zero) {
            return Err("--A values must be nonzero".into());
        }
        grid.a_values = values;
    }
    let reports = scan(check, &grid);
    let summary = summarize(&reports);
    let summary_json = json!({
        "check_id": check,
        "grid": {
            "alpha_range": grid.alpha.to_string(),
            "beta_range": grid.beta.to_string(),
            "n_range": format!("{}:{}", grid.n_min, grid.n_max),
        },
        "summary": summary,
        "unexpected": reports.iter().filter(|r| r.unexpected()).map(|r| json!({
            "n": r.point.n,
            "alpha": r.point.alpha.to_string(),
            "beta": r.point.beta.to_string(),
            "extra": r.point.extra,
        })).collect::<Vec<_>>(),
    });
    let sink: Box<dyn Write> = match output {
        Some(path) => Box::new(io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(io::BufWriter::new(io::stdout())),
    };
    match format {
        Format::Csv => write_csv(&reports, sink)?,
        Format::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, &reports)?;
            writeln!(sink)?;
            sink.flush()?;
        }
    }
    let summary_text = serde_json::to_string_pretty(&summary_json)?;
    if output.is_some() {
        println!("{summary_text}");
    } else {
        eprintln!("{summary_text}");
    }
    Ok(if summary.claimed_fails > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_threshold(n: usize, beta: &Rational, bracket: (Rational, Rational), tol: &Rational) -> CliResult {
    let alpha_star = find_threshold_thm4(n, beta, bracket, tol)?;
    print_json(&json!({
        "n": n,
        "beta": beta.to_string(),
        "alpha_star": alpha_star.to_string(),
        "decimal": format!("{:.8}", to_f64(&alpha_star)),
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn run_vieta(n_max: usize, alpha: &Rational, beta: &Rational) -> CliResult {
    let rows = vieta_asymptotics(n_max, alpha, beta)?;
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(["n", "parity", "sum", "decimal"])?;
    for (n, sum) in rows {
        let parity = if n % 2 == 0 { "even" } else { "odd" };
        w.write_record([n.to_string(), parity.to_string(), sum.to_string(), format!("{:.10}", to_f64(&sum))])?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Phi { params, full, beta_shift } => run_phi(&params, full, beta_shift),
        Command::Roots { params, precision } => run_roots(&params, &precision),
        Command::Interlace { pair, alpha, beta, p, q } => {
            run_interlace(&pair, alpha.as_ref(), beta.as_ref(), p.as_ref(), q.as_ref())
        }
        Command::Stability { target, params, a } => run_stability(target, &params, a.as_ref()),
        Command::Scan {
            check,
            alpha_range,
            beta_range,
            n_range,
            a_values,
            jobs,
            format,
            output,
        } => run_scan(
            &check,
            alpha_range,
            beta_range,
            n_range,
            a_values.as_deref(),
            jobs,
            format,
            output.as_deref(),
        ),
        Command::Threshold { n, beta, bracket, tol } => run_threshold(n, &beta, bracket, &tol),
        Command::Vieta { n_max, alpha, beta } => run_vieta(n_max, &alpha, &beta),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if let Some(io) = e.downcast_ref::<io::Error>() {
                if io.kind() == io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
            }
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
