use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flatcount::{io, Scalar};
use flatcount_cli::{
    constants_output, count, stratum, verify, verify_json_lines, verify_text, with_threads, write_file, ExperimentSpec,
    Format, Suite, SurfaceSource, VerifyOptions,
};

#[derive(Parser)]
#[command(name = "flatcount", version, about = "Exact flat-surface cylinder counting")]
struct Cli {
    /// Worker threads for enumeration.
    #[arg(long, global = true, env = "FLATCOUNT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Builtin template: torus, pillowcase, lab, q.
    #[arg(long)]
    template: Option<String>,
    /// Obstacle width for `lab`, e.g. 1/3 or 3/2-1/2√5.
    #[arg(long)]
    a: Option<Scalar>,
    /// Obstacle height for `lab`.
    #[arg(long)]
    b: Option<Scalar>,
    /// Zero order for `q` (default 1).
    #[arg(long)]
    d: Option<usize>,
    /// Surface JSON document.
    #[arg(long)]
    file: Option<PathBuf>,
}

impl SurfaceArgs {
    fn source(&self) -> anyhow::Result<SurfaceSource> {
        SurfaceSource::from_flags(self.template.as_deref(), self.a, self.b, self.d, self.file.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the stratum, genus, area and cone table.
    Stratum {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Enumerate cylinders up to a length and tabulate the weighted count.
    Count {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Circumference bound L.
        #[arg(long)]
        length: Scalar,
        /// all | weierstrass-pair | pair:A,B | profile:P1,P2,pq
        #[arg(long)]
        filter: Option<String>,
        /// Number of sample lengths in the convergence table.
        #[arg(long)]
        steps: Option<u32>,
        /// Directory receiving cylinders.jsonl and convergence.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report printed to stdout when --out is absent: json (cylinders) or csv (convergence).
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run verification suites.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        /// Relative tolerance of the torus baseline.
        #[arg(long, default_value_t = 0.02)]
        torus_tol: f64,
        /// Relative tolerance of the wind-tree estimates and their spread.
        #[arg(long, default_value_t = 0.15)]
        windtree_tol: f64,
        /// Length bound of the counterexample search.
        #[arg(long, default_value_t = 50)]
        bound: i128,
        /// Largest base bound of the lift identity.
        #[arg(long, default_value_t = 20)]
        lift_bound: i128,
        /// Caps the lengths used by the wind-tree suite.
        #[arg(long)]
        max_length: Option<i128>,
        /// Directory receiving windtree.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the Siegel–Veech constants of the pole-pair construction for one d.
    Constants {
        #[arg(long, default_value_t = 1)]
        d: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write a surface as a JSON document.
    Export {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Writes to stdout; a closed pipe is not an error.
fn print(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => print(text),
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Stratum { surface, format } => {
            let s = surface.source()?.load()?;
            let r = stratum(&s);
            match format {
                Format::Json => print(&format!("{}\n", serde_json::to_string(&r)?))?,
                _ => print(&r.to_string())?,
            }
        }
        Command::Count { surface, length, filter, steps, out, format } => {
            let spec = ExperimentSpec::new(surface.source()?, length, filter, steps, out, cli.threads)?;
            let r = count(&spec)?;
            match &spec.out {
                Some(dir) => {
                    write_file(&dir.join("cylinders.jsonl"), &r.cylinders)?;
                    write_file(&dir.join("convergence.csv"), &r.convergence)?;
                    write_file(&dir.join("spec.txt"), &format!("{spec}\n"))?;
                }
                None => print(if format == Format::Csv { &r.convergence } else { &r.cylinders })?,
            }
        }
        Command::Verify { suite, torus_tol, windtree_tol, bound, lift_bound, max_length, out, format } => {
            let opts = VerifyOptions {
                torus_tolerance: torus_tol,
                windtree_tolerance: windtree_tol,
                counterexample_bound: bound,
                lift_bound,
                max_length,
                out,
            };
            let results = with_threads(cli.threads, || verify(suite, &opts))??;
            match format {
                Format::Json => print(&verify_json_lines(&results))?,
                _ => print(&verify_text(&results))?,
            }
            return Ok(results.iter().all(|r| r.passed()));
        }
        Command::Constants { d, format } => print(&constants_output(d, format)?)?,
        Command::Export { surface, out } => emit(out.as_ref(), &format!("{}\n", io::to_json(&surface.source()?.load()?)))?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
