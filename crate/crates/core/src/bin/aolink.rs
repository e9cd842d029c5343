use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aolink::budget::Scheme;
use aolink::scenario::{
    dump_scenario, emit_csv, improvement_report, load_scenario, read_csv, run_sweep, write_csv,
    ImprovementRow, Preset, RatePoint, Scenario, SweepRow, Table,
};
use aolink::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "aolink",
    version,
    about = "AO-corrected satellite QKD downlink sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's sweep and write CSV tables.
    Simulate {
        scenario: PathBuf,
        /// Table to write: `full` or fig2 ... fig11. Defaults to the scenario's `output.tables`.
        #[arg(long)]
        preset: Option<String>,
        /// Output file; a directory when several tables are written. Stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare schemes over a sweep.
    Report {
        #[command(subcommand)]
        kind: ReportKind,
    },
    /// Inspect parameters.
    Params {
        #[command(subcommand)]
        kind: ParamsKind,
    },
}

#[derive(Subcommand)]
enum ReportKind {
    /// Minimum key-rate improvement of one scheme over another per altitude and separation.
    Improvement {
        /// Scenario file, or a CSV written by `simulate` (full table or fig7/fig11).
        input: PathBuf,
        #[arg(long)]
        baseline: Scheme,
        #[arg(long)]
        target: Scheme,
        #[arg(long, default_value_t = 75.0)]
        zenith_max: f64,
        #[arg(long)]
        threads: Option<usize>,
        /// Write the report here; CSV when the name ends in `.csv`, aligned text otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ParamsKind {
    /// Print the effective configuration (defaults, or a scenario file merged over them).
    Dump { scenario: Option<PathBuf> },
}

enum Failure {
    Config(Error),
    Numeric(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(io_err(p)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn simulate(
    path: &Path,
    preset: Option<String>,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<(), Failure> {
    let scenario = load_scenario(path)?;
    let names = match preset {
        Some(p) => vec![p],
        None => scenario.outputs.clone(),
    };
    let presets: Vec<Option<Preset>> = names
        .iter()
        .map(|n| {
            if n == "full" {
                Ok(None)
            } else {
                n.parse().map(Some)
            }
        })
        .collect::<Result<_, _>>()?;
    if presets.len() > 1 && out.is_none() {
        return Err(Error::Invalid("several tables requested; pass --out DIR".into()).into());
    }

    let rows = run_sweep(&scenario, threads)?;
    let full = SweepRow::to_table(&rows);
    let render = |p: &Option<Preset>| -> Result<Table, Error> {
        match p {
            None => Ok(full.clone()),
            Some(p) => p.apply(&full),
        }
    };

    match (&out, presets.as_slice()) {
        (None, [p]) => write_text(None, &emit_csv(&render(p)?))?,
        (Some(file), [p]) if !file.is_dir() => write_csv(&render(p)?, file)?,
        (Some(dir), many) => {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
            for p in many {
                let name = p.map_or("full", Preset::name);
                write_csv(&render(p)?, &dir.join(format!("{name}.csv")))?;
            }
        }
        (None, _) => unreachable!("checked above"),
    }

    let failed = rows.iter().filter(|r| r.is_failed()).count();
    if failed > 0 {
        for r in rows.iter().filter(|r| r.is_failed()).take(5) {
            eprintln!(
                "warning: {} h={} L={} zenith={}: {}",
                r.scheme, r.altitude, r.separation, r.zenith_deg, r.status
            );
        }
        return Err(Failure::Numeric(failed));
    }
    Ok(())
}

fn improvement(
    input: &Path,
    baseline: Scheme,
    target: Scheme,
    zenith_max: f64,
    threads: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let is_csv = input
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let (points, failed) = if is_csv {
        (RatePoint::from_table(&read_csv(input)?)?, 0)
    } else {
        let mut scenario: Scenario = load_scenario(input)?;
        scenario.sweep.schemes = if baseline == target {
            vec![baseline]
        } else {
            vec![baseline, target]
        };
        let rows = run_sweep(&scenario, threads)?;
        let failed = rows.iter().filter(|r| r.is_failed()).count();
        (RatePoint::from_rows(&rows), failed)
    };
    let report = improvement_report(&points, baseline, target, zenith_max)?;
    let as_csv = out
        .as_deref()
        .and_then(Path::extension)
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if as_csv {
        emit_csv(&ImprovementRow::to_table(&report))
    } else {
        format!(
            "{target} vs {baseline}, zenith <= {zenith_max} deg\n{}",
            ImprovementRow::render(&report)
        )
    };
    write_text(out.as_deref(), &text)?;
    if failed > 0 {
        return Err(Failure::Numeric(failed));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            scenario,
            preset,
            out,
            threads,
        } => simulate(&scenario, preset, out, threads),
        Command::Report {
            kind:
                ReportKind::Improvement {
                    input,
                    baseline,
                    target,
                    zenith_max,
                    threads,
                    out,
                },
        } => improvement(&input, baseline, target, zenith_max, threads, out),
        Command::Params {
            kind: ParamsKind::Dump { scenario },
        } => {
            let s = match scenario {
                Some(p) => load_scenario(&p)?,
                None => Scenario::default(),
            };
            write_text(None, &dump_scenario(&s))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(n)) => {
            eprintln!("error: {n} grid point(s) failed numerically");
            ExitCode::from(2)
        }
    }
}
