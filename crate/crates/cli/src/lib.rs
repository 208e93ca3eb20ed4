//! Command-line front end for `tripartite-core`.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 verification failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tripartite_core::analysis::{
    figure_data, sweep, tables, verify, Corruption, FigureId, SweepRecord, TableCell,
    VerifyOptions, VerifyReport, DEFAULT_FIGURE_ACCELERATIONS,
};
use tripartite_core::{Acceleration, Error, Family, SmaxOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

pub const SWEEP_HEADER: &str =
    "family,a_over_wc,r,theta,pi_tangle,three_tangle,s_max_closed,s_max_numeric,violated";
pub const TABLE_HEADER: &str =
    "table,quantity,a_over_wc,printed,computed,candidates,deviation,within_tolerance,note";
pub const FIGURE_HEADER: &str = "x,y,series";

#[derive(Parser, Debug)]
#[command(
    name = "tripartite",
    version,
    about = "Three-qubit tangles and Svetlichny non-locality under the fermionic Unruh channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate tangles and S_max over an (acceleration, angle) grid.
    Sweep(SweepArgs),
    /// Recompute the critical-value tables next to their printed values.
    Tables(OutputArgs),
    /// Cross-check closed forms against independent numerics.
    Verify(VerifyArgs),
    /// Emit the parametric curves behind one figure panel (or all of them).
    Figdata(FigdataArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// State family: gghz, ms or ms-bob.
    #[arg(long, default_value = "gghz", value_parser = parse_family)]
    pub family: Family,
    /// Accelerations a/(wc), comma separated; "inf" for the infinite limit.
    #[arg(long = "accel", value_delimiter = ',', default_value = "0", value_parser = parse_accel)]
    pub accel: Vec<Acceleration>,
    /// Grid points on [0, pi/2], endpoints included (at least 2).
    #[arg(long, default_value_t = 21)]
    pub theta_steps: usize,
    /// Also maximize <S> numerically at every grid point.
    #[arg(long)]
    pub numeric: bool,
    /// Optimizer restarts for --numeric.
    #[arg(long, default_value_t = 128)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random states per randomized check.
    #[arg(long, default_value_t = 24)]
    pub samples: usize,
    /// Optimizer restarts (at least 1).
    #[arg(long, default_value_t = 128)]
    pub restarts: usize,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Offsets one closed form to exercise the report.
    #[arg(long, hide = true, value_parser = parse_corruption)]
    pub corrupt: Option<Corruption>,
}

#[derive(Args, Debug)]
pub struct FigdataArgs {
    /// Panel id (1a, 1b, 1c, 2a, 2b, 2c) or "all".
    #[arg(long)]
    pub figure: String,
    /// Accelerations a/(wc), one series each.
    #[arg(long = "accel", value_delimiter = ',', value_parser = parse_accel)]
    pub accel: Vec<Acceleration>,
    /// Output file for a single panel; standard output when omitted.
    #[arg(short, long, conflicts_with = "output_dir")]
    pub output: Option<PathBuf>,
    /// Directory receiving fig<id>.csv per panel; required for "all".
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_accel(s: &str) -> Result<Acceleration, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_corruption(s: &str) -> Result<Corruption, String> {
    match s {
        "s-max" => Ok(Corruption::SmaxClosed),
        "pi-tangle" => Ok(Corruption::PiTangleClosed),
        "three-tangle" => Ok(Corruption::ThreeTangleClosed),
        _ => Err(format!("unknown corruption {s:?}")),
    }
}

/// Formats like C's `%.12g`, with `inf`/`-inf`/`nan` for non-finite values.
pub fn fmt_num(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_accel(a: Acceleration) -> String {
    fmt_num(a.as_f64())
}

/// Error carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }

    fn io(path: Option<&Path>, e: io::Error) -> Self {
        // A closed pipe (e.g. `| head`) is not an error worth reporting.
        if e.kind() == io::ErrorKind::BrokenPipe && path.is_none() {
            return Failure {
                code: EXIT_OK,
                message: String::new(),
            };
        }
        let where_ = path.map_or_else(|| "standard output".to_string(), |p| p.display().to_string());
        Failure {
            code: EXIT_IO,
            message: format!("cannot write {where_}: {e}"),
        }
    }
}

fn from_core(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(_) => Failure::usage(e),
        other => Failure {
            code: EXIT_VERIFY,
            message: other.to_string(),
        },
    }
}

/// Writes to `path`, or to `stdout` when `path` is `None`.
fn emit(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::io(Some(p), e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Failure::io(Some(p), e))
        }
        None => body(stdout).and_then(|_| stdout.flush()).map_err(|e| Failure::io(None, e)),
    }
}

fn write_json<T: Serialize + ?Sized>(w: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::from)?;
    writeln!(w)
}

pub fn write_sweep_csv(w: &mut dyn Write, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.family,
            fmt_accel(r.a_over_wc),
            fmt_num(r.r),
            fmt_num(r.theta),
            fmt_num(r.pi_tangle),
            fmt_num(r.three_tangle),
            fmt_num(r.s_max_closed),
            r.s_max_numeric.map(fmt_num).unwrap_or_default(),
            r.violated
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_tables_csv(w: &mut dyn Write, cells: &[TableCell]) -> io::Result<()> {
    writeln!(w, "{TABLE_HEADER}")?;
    for c in cells {
        let candidates: Vec<String> = c.candidates.iter().map(|&x| fmt_num(x)).collect();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            c.table,
            c.quantity,
            fmt_accel(c.a_over_wc),
            fmt_num(c.printed),
            c.computed.map(fmt_num).unwrap_or_default(),
            candidates.join(";"),
            c.deviation.map(fmt_num).unwrap_or_default(),
            c.within_tolerance,
            csv_field(c.known_discrepancy.unwrap_or(""))
        )?;
    }
    Ok(())
}

pub fn write_verify_text(w: &mut dyn Write, rep: &VerifyReport) -> io::Result<()> {
    writeln!(
        w,
        "verify seed={} samples={} restarts={}",
        rep.seed, rep.samples, rep.restarts
    )?;
    for c in &rep.checks {
        writeln!(
            w,
            "{} {:<40} cases={:<5} worst={:<20} tol={}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.cases,
            fmt_num(c.worst),
            fmt_num(c.tolerance)
        )?;
        if !c.passed {
            writeln!(w, "     {}", c.detail)?;
        }
    }
    if !rep.discrepancies.is_empty() {
        writeln!(w, "table deviations:")?;
        for d in &rep.discrepancies {
            writeln!(
                w,
                "  table {} {} a={} printed={} computed={} ({})",
                d.table,
                d.quantity,
                fmt_accel(d.a_over_wc),
                fmt_num(d.printed),
                d.computed.map_or_else(|| "none".to_string(), fmt_num),
                d.known_discrepancy.unwrap_or("outside tolerance")
            )?;
        }
    }
    writeln!(w, "{}", if rep.passed { "all checks passed" } else { "verification FAILED" })
}

pub fn write_figure_csv(w: &mut dyn Write, figure: FigureId, a_list: &[Acceleration]) -> Result<(), Failure> {
    let pts = figure_data(figure, a_list).map_err(from_core)?;
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "{FIGURE_HEADER}")?;
        for p in &pts {
            writeln!(w, "{},{},{}", fmt_num(p.x), fmt_num(p.y), p.series)?;
        }
        Ok(())
    };
    write(w).map_err(|e| Failure::io(None, e))
}

fn cmd_sweep(args: SweepArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if args.numeric && args.restarts == 0 {
        return Err(Failure::usage("--restarts must be at least 1"));
    }
    let opts = SmaxOptions {
        restarts: args.restarts,
        seed: args.seed,
        ..Default::default()
    };
    let numeric = args.numeric.then_some(&opts);
    let records = sweep(args.family, &args.accel, args.theta_steps, numeric).map_err(from_core)?;
    emit(args.out.output.as_deref(), stdout, |w| match args.out.format {
        Format::Csv => write_sweep_csv(w, &records),
        Format::Json => write_json(w, &records),
    })?;
    Ok(EXIT_OK)
}

fn cmd_tables(args: OutputArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let cells = tables().map_err(from_core)?;
    emit(args.output.as_deref(), stdout, |w| match args.format {
        Format::Csv => write_tables_csv(w, &cells),
        Format::Json => write_json(w, &cells),
    })?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if args.restarts == 0 {
        return Err(Failure::usage("--restarts must be at least 1"));
    }
    let rep = verify(&VerifyOptions {
        seed: args.seed,
        samples: args.samples,
        restarts: args.restarts,
        corrupt: args.corrupt,
    })
    .map_err(from_core)?;
    if let Some(p) = args.report.as_deref() {
        emit(Some(p), stdout, |w| write_json(w, &rep))?;
    }
    emit(None, stdout, |w| {
        if args.json {
            write_json(w, &rep)
        } else {
            write_verify_text(w, &rep)
        }
    })?;
    Ok(if rep.passed { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_figdata(args: FigdataArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let a_list = if args.accel.is_empty() {
        DEFAULT_FIGURE_ACCELERATIONS.to_vec()
    } else {
        args.accel
    };
    if args.figure.eq_ignore_ascii_case("all") {
        let dir = args
            .output_dir
            .ok_or_else(|| Failure::usage("--figure all needs --output-dir"))?;
        std::fs::create_dir_all(&dir).map_err(|e| Failure::io(Some(&dir), e))?;
        for id in FigureId::ALL {
            let path = dir.join(format!("fig{id}.csv"));
            let file = File::create(&path).map_err(|e| Failure::io(Some(&path), e))?;
            let mut w = BufWriter::new(file);
            write_figure_csv(&mut w, id, &a_list)?;
            w.flush().map_err(|e| Failure::io(Some(&path), e))?;
        }
        return Ok(EXIT_OK);
    }
    let id: FigureId = args.figure.parse().map_err(from_core)?;
    let path = match (args.output, args.output_dir) {
        (Some(p), _) => Some(p),
        (None, Some(dir)) => {
            std::fs::create_dir_all(&dir).map_err(|e| Failure::io(Some(&dir), e))?;
            Some(dir.join(format!("fig{id}.csv")))
        }
        (None, None) => None,
    };
    match path {
        Some(p) => {
            let file = File::create(&p).map_err(|e| Failure::io(Some(&p), e))?;
            let mut w = BufWriter::new(file);
            write_figure_csv(&mut w, id, &a_list)?;
            w.flush().map_err(|e| Failure::io(Some(&p), e))?;
        }
        None => {
            write_figure_csv(stdout, id, &a_list)?;
            stdout.flush().map_err(|e| Failure::io(None, e))?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Tables(a) => cmd_tables(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Figdata(a) => cmd_figdata(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(stderr, "error: {}", f.message);
            }
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(4.0 * 2f64.sqrt()), "5.65685424949");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(100.0), "100");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(1.5e-7), "1.5e-07");
        assert_eq!(fmt_num(-2.5e13), "-2.5e+13");
        assert_eq!(fmt_num(9.9999999999999), "10");
        assert_eq!(fmt_num(std::f64::consts::FRAC_PI_4), "0.785398163397");
    }

    #[test]
    fn twelve_digits_round_trip_closely() {
        for x in [0.123456789012345, 3.31662479035540, 1234.5678901234] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn usage_errors_map_to_one() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["tripartite", "sweep", "--theta-steps", "1"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["tripartite", "bogus"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["tripartite", "figdata", "--figure", "9z"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["tripartite", "verify", "--restarts", "0"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["tripartite", "sweep", "--accel", "-1"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["tripartite", "--help"], &mut out, &mut err), EXIT_OK);
    }
}
