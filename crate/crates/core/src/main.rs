use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flcheck_core::flcheck::case::to_sorted_json_pretty;
use flcheck_core::flcheck::report::{write_csv, write_jsonl};
use flcheck_core::flcheck::{global_formulas, run_case, run_cases, CaseFile, CaseReport, CorpusSpec, Mode};
use flcheck_core::rootdata::{build_root_datum, GroupKind};
use flcheck_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "flcheck", version, about = "Exact local checks of endoscopic identities via affine Springer fibers")]
struct Cli {
    /// Working precision override (e-adic digits).
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Corpus seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output file (or directory for `corpus`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Local invariants d, c, s, delta, pi_0 and radicial valuations.
    Invariants { cases: Vec<PathBuf> },
    /// Kappa-orbital integral of each case.
    Orbital { cases: Vec<PathBuf> },
    /// Check O^kappa_a = q^{r_v} SO_{a_H}.
    VerifyLs { cases: Vec<PathBuf> },
    /// Check SO for SL_2 against PGL_2 on the same characteristic.
    VerifyNonstandard { cases: Vec<PathBuf> },
    /// Generate and run a seeded random corpus.
    Corpus {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        q: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "GL,SL,PGL")]
        kinds: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "invariants,orbital,ls,nonstandard")]
        modes: Vec<String>,
        #[arg(long, default_value_t = 6)]
        max_d: usize,
    },
    /// Global dimension formulas.
    Formulas {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        p: u32,
        #[arg(long)]
        genus: i64,
        #[arg(long)]
        deg_d: i64,
    },
}

fn parse_mode(s: &str) -> Result<Mode> {
    serde_json::from_value(serde_json::Value::String(s.trim().to_ascii_lowercase()))
        .map_err(|_| Error::InvalidInput(format!("unknown mode {s:?}")))
}

fn load_cases(paths: &[PathBuf], mode: Mode, precision: Option<usize>) -> Result<Vec<CaseFile>> {
    if paths.is_empty() {
        return Err(Error::InvalidInput("no case files given".into()));
    }
    paths
        .iter()
        .map(|p| {
            let mut c = CaseFile::load(p).map_err(|e| match e {
                Error::Parse { line, column, message } => {
                    Error::Parse { line, column, message: format!("{}: {message}", p.display()) }
                }
                e => e,
            })?;
            c.mode = mode;
            if precision.is_some() {
                c.precision = precision;
            }
            Ok(c)
        })
        .collect()
}

fn emit(cli: &Cli, reports: &[CaseReport]) -> Result<()> {
    let mut buf = Vec::new();
    match cli.format {
        Format::Json => write_jsonl(&mut buf, reports)?,
        Format::Csv => write_csv(&mut buf, reports)?,
    }
    match &cli.out {
        Some(path) => fs::write(path, buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn emit_corpus(cli: &Cli, reports: &[CaseReport]) -> Result<()> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_jsonl(fs::File::create(dir.join("reports.jsonl"))?, reports)?;
            write_csv(fs::File::create(dir.join("summary.csv"))?, reports)?;
            Ok(())
        }
        None => emit(cli, reports),
    }
}

fn summarize(reports: &[CaseReport]) -> ExitCode {
    let failed: Vec<&CaseReport> = reports.iter().filter(|r| !r.pass).collect();
    if failed.is_empty() {
        eprintln!("{} cases, all pass", reports.len());
        ExitCode::SUCCESS
    } else {
        for r in &failed {
            eprintln!("FAIL {}: {}", r.case_id, r.error.as_deref().unwrap_or("identity does not hold"));
        }
        eprintln!("{} of {} cases failed", failed.len(), reports.len());
        ExitCode::from(1)
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let mode_cases = |paths: &Vec<PathBuf>, mode| -> Result<ExitCode> {
        let cases = load_cases(paths, mode, cli.precision)?;
        let reports: Vec<CaseReport> = cases.iter().map(run_case).collect();
        emit(cli, &reports)?;
        Ok(summarize(&reports))
    };
    match &cli.cmd {
        Cmd::Invariants { cases } => mode_cases(cases, Mode::Invariants),
        Cmd::Orbital { cases } => mode_cases(cases, Mode::Orbital),
        Cmd::VerifyLs { cases } => mode_cases(cases, Mode::Ls),
        Cmd::VerifyNonstandard { cases } => mode_cases(cases, Mode::Nonstandard),
        Cmd::Corpus { count, n, q, kinds, modes, max_d } => {
            let spec = CorpusSpec {
                seed: cli.seed,
                count: *count,
                n: n.clone(),
                q: q.clone(),
                kinds: kinds.iter().map(|k| k.parse()).collect::<Result<Vec<GroupKind>>>()?,
                modes: modes.iter().map(|m| parse_mode(m)).collect::<Result<Vec<Mode>>>()?,
                max_d: *max_d,
                ..Default::default()
            };
            let mut cases = flcheck_core::flcheck::generate_cases(&spec)?;
            if cli.precision.is_some() {
                for c in &mut cases {
                    c.precision = cli.precision;
                }
            }
            let reports = run_cases(&cases);
            emit_corpus(cli, &reports)?;
            Ok(summarize(&reports))
        }
        Cmd::Formulas { kind, n, p, genus, deg_d } => {
            let rd = build_root_datum(kind.parse()?, *n, *p)?;
            let g = global_formulas(&rd, *genus, *deg_d)?;
            let text = match cli.format {
                Format::Json => to_sorted_json_pretty(&g)? + "\n",
                Format::Csv => format!("dim_a,dim_pa,delta_sum_bound\n{},{},{}\n", g.dim_a, g.dim_pa, g.delta_sum_bound),
            };
            match &cli.out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
