//! Command-line front end. [`run`] parses arguments, dispatches, and
//! returns the process exit code: 0 on success, 1 on a mismatch, failed
//! computation, or (with `--strict`) a certificate that does not apply,
//! 2 on a usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use x0twist::certify::{
    admissible_primes, check_theorem_in, deep_certificate_in, reproduce_table, CertifyConfig,
    Twist, Verdict,
};
use x0twist::cli_io::{
    admissible_text, certificate_text, crosscheck, crosscheck_text, invariants_report,
    invariants_text, lratio_text, parse_curve_table, table_text,
};
use x0twist::curves::{base_curve, quadratic_twist, CurveModel, Family};
use x0twist::local_invariants::conductor;
use x0twist::lseries::{algebraic_l_ratio, LConfig, LRatioResult};
use x0twist::tables::table_family;
use x0twist::Error;

#[derive(Debug, Parser)]
#[command(
    name = "x0twist",
    version,
    about = "Hypothesis checks for quadratic twists of X0(15) and X0(21)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Line-delimited JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Exit 1 when a certificate does not apply.
    #[arg(long, global = true)]
    strict: bool,

    /// Largest L-series length before giving up.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    nmax_cap: usize,

    /// Acceptance tolerance for rational recognition of L/Ω.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,

    /// Largest prime sampled when certifying surjectivity mod p.
    #[arg(long, global = true, default_value_t = 10_000)]
    sample_bound: u64,

    /// Primes up to this bound are checked against admissible sets.
    #[arg(long, global = true, default_value_t = 100)]
    pmax: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal model, conductor, local data, Tamagawa numbers, torsion.
    Invariants(CurveArgs),
    /// L(E,1), the real period, and the rational L/Ω.
    Lratio(CurveArgs),
    /// Shallow hypotheses for the twist by d at p.
    Certify(TwistPrime),
    /// Shallow hypotheses followed by the per-prime deep conditions.
    DeepCertify(TwistPrime),
    /// The finite set of primes for which the twist is not covered.
    Admissible(TwistOnly),
    /// Recompute one of the two embedded tables.
    Table {
        /// 1 for X0(15), 2 for X0(21).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
    /// Recompute conductor and torsion for each row of a curve table file.
    Crosscheck {
        /// Path of the table, or `-` for standard input.
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Base curve: 15 or 21.
    #[arg(long, value_parser = parse_family, required_unless_present = "curve")]
    family: Option<Family>,

    /// Twist the base curve by this squarefree integer.
    #[arg(
        long = "d",
        visible_alias = "twist",
        allow_hyphen_values = true,
        requires = "family"
    )]
    d: Option<i64>,

    /// Explicit a-invariants "a1,a2,a3,a4,a6".
    #[arg(long, conflicts_with = "family", allow_hyphen_values = true)]
    curve: Option<String>,
}

#[derive(Debug, Args)]
struct TwistOnly {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long = "d", visible_alias = "twist", allow_hyphen_values = true)]
    d: i64,
}

#[derive(Debug, Args)]
struct TwistPrime {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long = "d", visible_alias = "twist", allow_hyphen_values = true)]
    d: i64,
    #[arg(long)]
    p: u64,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ZeroInput
            | Error::NotSquarefree(_)
            | Error::NotPrime(_)
            | Error::SingularCurve
            | Error::SmallPrime(_)
            | Error::InvalidL(_)
            | Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

struct Ctx<'a> {
    json: bool,
    strict: bool,
    pmax: u64,
    cfg: CertifyConfig,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, value: &impl Serialize, text: impl FnOnce() -> String) -> io::Result<()> {
        if self.json {
            let line = serde_json::to_string(value).map_err(io::Error::other)?;
            writeln!(self.out, "{line}")
        } else {
            writeln!(self.out, "{}", text())
        }
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    if cli.sample_bound < 100 {
        return Err(Failure::Usage("--sample-bound must be at least 100".into()));
    }
    if cli.tolerance.is_nan() || cli.tolerance <= 0.0 {
        return Err(Failure::Usage("--tolerance must be positive".into()));
    }
    let cfg = CertifyConfig {
        lseries: LConfig {
            nmax_cap: cli.nmax_cap,
            tolerance: cli.tolerance,
            ..LConfig::default()
        },
        sample_bound: cli.sample_bound,
    };
    let mut ctx = Ctx {
        json: cli.json,
        strict: cli.strict,
        pmax: cli.pmax,
        cfg,
        out,
    };
    match cli.command {
        Command::Invariants(c) => invariants(&mut ctx, &c),
        Command::Lratio(c) => lratio(&mut ctx, &c),
        Command::Certify(t) => certify(&mut ctx, &t, false),
        Command::DeepCertify(t) => certify(&mut ctx, &t, true),
        Command::Admissible(t) => admissible(&mut ctx, &t),
        Command::Table { which } => table(&mut ctx, which),
        Command::Crosscheck { file } => crosscheck_file(&mut ctx, &file),
    }
}

fn select_curve(c: &CurveArgs) -> Result<(String, CurveModel), Failure> {
    if let Some(s) = &c.curve {
        let e: CurveModel = s.parse()?;
        return Ok((e.to_string(), e));
    }
    let family = c.family.expect("clap enforces --family or --curve");
    let base = base_curve(family);
    match c.d {
        None | Some(1) => Ok((family.to_string(), base)),
        Some(d) => Ok((
            format!("{family} twisted by {d}"),
            quadratic_twist(&base, d)?,
        )),
    }
}

fn invariants(ctx: &mut Ctx, c: &CurveArgs) -> Result<i32, Failure> {
    let (_, e) = select_curve(c)?;
    let report = invariants_report(&e)?;
    ctx.emit(&report, || invariants_text(&report))?;
    Ok(0)
}

#[derive(Serialize)]
struct LRatioLine<'a> {
    curve: &'a str,
    conductor: u64,
    #[serde(flatten)]
    result: &'a LRatioResult,
}

fn lratio(ctx: &mut Ctx, c: &CurveArgs) -> Result<i32, Failure> {
    let (label, e) = select_curve(c)?;
    let n = conductor(&e)?.conductor;
    let r = algebraic_l_ratio(&e, &ctx.cfg.lseries)?;
    let line = LRatioLine {
        curve: &label,
        conductor: n,
        result: &r,
    };
    ctx.emit(&line, || {
        lratio_text(&format!("{label} (conductor {n})"), &r)
    })?;
    Ok(0)
}

fn certify(ctx: &mut Ctx, t: &TwistPrime, deep: bool) -> Result<i32, Failure> {
    let twist = Twist::new(t.family, t.d, ctx.cfg);
    let cert = if deep {
        deep_certificate_in(&twist, t.p)
    } else {
        check_theorem_in(&twist, t.p)
    };
    ctx.emit(&cert, || certificate_text(&cert))?;
    Ok(if ctx.strict && cert.verdict != Verdict::Applies {
        1
    } else {
        0
    })
}

fn admissible(ctx: &mut Ctx, t: &TwistOnly) -> Result<i32, Failure> {
    let a = admissible_primes(t.family, t.d, ctx.pmax, &ctx.cfg);
    ctx.emit(&a, || admissible_text(&a))?;
    Ok(if a.violations.is_empty() { 0 } else { 1 })
}

#[derive(Serialize)]
struct TableLine<'a, T> {
    family: Family,
    #[serde(flatten)]
    row: &'a T,
}

fn table(ctx: &mut Ctx, which: u8) -> Result<i32, Failure> {
    let family = table_family(which).expect("clap restricts --which");
    let report = reproduce_table(family, ctx.pmax, &ctx.cfg);
    if ctx.json {
        for row in &report.rows {
            ctx.emit(&TableLine { family, row }, String::new)?;
        }
    } else {
        writeln!(ctx.out, "{}", table_text(&report))?;
    }
    Ok(if report.all_match() { 0 } else { 1 })
}

#[derive(Serialize)]
struct DiagnosticLine<'a> {
    line: usize,
    diagnostic: &'a str,
}

fn crosscheck_file(ctx: &mut Ctx, file: &PathBuf) -> Result<i32, Failure> {
    let parsed = if file.as_os_str() == "-" {
        parse_curve_table(io::stdin().lock())
    } else {
        let f = File::open(file)
            .map_err(|e| Failure::Usage(format!("cannot open {}: {e}", file.display())))?;
        parse_curve_table(BufReader::new(f))
    };
    let rows = crosscheck(&parsed.rows);
    if ctx.json {
        for d in &parsed.diagnostics {
            ctx.emit(
                &DiagnosticLine {
                    line: d.line,
                    diagnostic: &d.message,
                },
                String::new,
            )?;
        }
        for r in &rows {
            ctx.emit(r, String::new)?;
        }
    } else {
        writeln!(ctx.out, "{}", crosscheck_text(&rows, &parsed.diagnostics))?;
    }
    let clean = rows.iter().all(|r| r.matches) && parsed.diagnostics.is_empty();
    Ok(if clean { 0 } else { 1 })
}
