//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::chartable::CharTable;
use crate::error::{Error, Result};
use crate::ortho3::{f3_exhaustive, FormKind};
use crate::sl2::DEFAULT_BUDGET;
use crate::verify::{self, default_checks, parse_checks, Analysis, VerifyConfig, F3_MAX_Q};

#[derive(Parser, Debug)]
#[command(
    name = "conjrep",
    version,
    about = "Character tables of SL2(Z/p^nZ) and its conjugation character"
)]
pub struct Cli {
    /// Worker threads, or "auto".
    #[arg(long, global = true, default_value = "auto")]
    pub threads: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute and export the character table.
    Table(TableArgs),
    /// Run checks and write a JSON report.
    Verify(VerifyArgs),
    /// Exhaustive Omega-orbit check in dimension 3 over F_q.
    F3(F3Args),
}

#[derive(Args, Debug)]
pub struct GroupArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    /// Largest group order that may be built.
    #[arg(long, env = "CONJREP_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Comma-separated subset of theorem,cent,pcom1,pcom2,f3,quotient,com10,adjoint.
    #[arg(long)]
    pub checks: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub i: u64,
    #[arg(long, default_value_t = 0)]
    pub j: u32,
    /// Include stage timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Split,
    Trace,
}

#[derive(Args, Debug)]
pub struct F3Args {
    #[arg(long)]
    pub q: u64,
    /// Both forms when absent.
    #[arg(long, value_enum)]
    pub form: Option<FormArg>,
    #[arg(long, env = "CONJREP_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    configure_threads(&cli.threads)?;
    match &cli.command {
        Command::Table(a) => cmd_table(a),
        Command::Verify(a) => cmd_verify(a),
        Command::F3(a) => cmd_f3(a),
    }
}

fn configure_threads(arg: &str) -> Result<()> {
    let threads = match arg {
        "auto" => 0,
        s => match s.parse::<usize>() {
            Ok(t) if t > 0 => t,
            _ => {
                return Err(Error::ParamOutOfRange(format!(
                    "--threads must be a positive integer or auto, got {s:?}"
                )))
            }
        },
    };
    // a second configuration in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sorted_degrees(table: &CharTable) -> String {
    let mut d = table.degrees().to_vec();
    d.sort_unstable();
    let parts: Vec<String> = d.iter().map(u64::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// Table as JSON. Each value is the list of `[t, m]` pairs: the eigenvalue
/// zeta_e^t occurs m times.
pub fn table_json(table: &CharTable, p: u64, n: u32) -> serde_json::Value {
    let values: Vec<Vec<Vec<[u32; 2]>>> = (0..table.k())
        .map(|chi| {
            table
                .row_cyclo(chi)
                .iter()
                .map(|v| v.terms().iter().map(|&(t, m)| [t, m]).collect())
                .collect()
        })
        .collect();
    json!({
        "p": p,
        "n": n,
        "order": table.group_order(),
        "k": table.k(),
        "exponent": table.exponent(),
        "ell": table.ell(),
        "class_sizes": table.class_sizes(),
        "degrees": table.degrees(),
        "values": values,
    })
}

fn cmd_table(a: &TableArgs) -> Result<i32> {
    let g = &a.group;
    let mut an = Analysis::build(g.p, g.n, g.budget)?;
    let table = an.table()?;
    let report = table.check_integrity();
    if !report.pass() {
        return Err(Error::Invariant(format!(
            "character table integrity failed: {report:?}"
        )));
    }
    let mut w = output(&g.out)?;
    match a.format {
        Format::Csv => table.write_csv(&mut w)?,
        Format::Json => {
            let mut s = serde_json::to_string(&table_json(table, g.p, g.n)).expect("table serializes");
            s.push('\n');
            w.write_all(s.as_bytes())?;
        }
    }
    w.flush()?;
    let summary = format!(
        "k = {}\n|G| = {}\nell = {}\ndegrees = {}\n",
        table.k(),
        table.group_order(),
        table.ell(),
        sorted_degrees(table)
    );
    if g.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let g = &a.group;
    let checks = match &a.checks {
        Some(list) => parse_checks(list)?,
        None => default_checks(g.p, g.n),
    };
    let cfg = VerifyConfig {
        p: g.p,
        n: g.n,
        budget: g.budget,
        checks,
        i: a.i,
        j: a.j,
        timings: a.timings,
    };
    let report = verify::run(&cfg)?;
    let mut w = output(&g.out)?;
    w.write_all(report.to_json().as_bytes())?;
    w.flush()?;
    if let Some(t) = &report.theorem {
        eprintln!(
            "theorem: {} ({}, {} constituents, {} central-trivial)",
            verdict(t.pass),
            t.mode,
            t.constituents,
            t.central_trivial
        );
    }
    for l in &report.lemmas {
        eprintln!("{}: {}", l.id, verdict(l.pass));
    }
    Ok(if report.pass() { 0 } else { 1 })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_f3(a: &F3Args) -> Result<i32> {
    let q = a.q;
    if q % 2 == 0 || q > F3_MAX_Q || !crate::modring::is_prime(q) {
        return Err(Error::ParamOutOfRange(format!(
            "f3 supports odd primes q <= {F3_MAX_Q}, got {q}"
        )));
    }
    let forms = match a.form {
        Some(FormArg::Split) => vec![FormKind::Split],
        Some(FormArg::Trace) => vec![FormKind::Trace],
        None => vec![FormKind::Trace, FormKind::Split],
    };
    let mut all = true;
    for kind in forms {
        let r = f3_exhaustive(q, kind, a.budget)?;
        let name = if kind == FormKind::Split { "split" } else { "trace" };
        let orbits: Vec<String> = r.isotropic_orbit_sizes.iter().map(u64::to_string).collect();
        println!(
            "form {name}: |O| = {}, |SO| = {}, |Omega| = {}",
            r.o_order, r.so_order, r.omega_order
        );
        println!("  isotropic census {} = {}", r.isotropic_count, orbits.join(" + "));
        println!(
            "  {} of {} nonzero vectors pass, {}",
            r.vectors_checked - r.failures.len() as u64,
            r.vectors_checked,
            verdict(r.pass())
        );
        all &= r.pass();
    }
    Ok(if all { 0 } else { 1 })
}
