use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavefront_cli::{analyze, load_surface, parse_point, parse_region, parse_sheet, sweep, to_json, trace, verify, CliError, CliResult, What};

#[derive(Parser)]
#[command(name = "wavefront", version, about = "Curvature loci and parallel-surface singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Three-route singularity report at the focal point over a surface point.
    Analyze {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "1")]
        sheet: String,
    },
    /// Trace constant principal curvature, ridge or sub-parabolic lines to CSV.
    Trace {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        what: What,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Offset sweep: OBJ meshes and singularity summaries per t.
    Sweep {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded cross-route verification batteries.
    Verify {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze { surface, point, sheet } => {
            let s = load_surface(&surface)?;
            let doc = analyze(&s, parse_point(&point)?, parse_sheet(&sheet)?)?;
            print!("{}", to_json(&doc));
        }
        Command::Trace { surface, what, value, region, grid, out } => {
            let s = load_surface(&surface)?;
            let (csv, lines) = trace(&s, what, &value, &parse_region(&region)?, grid)?;
            std::fs::write(&out, csv).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", out.display())))?;
            println!("{lines} polylines written to {}", out.display());
        }
        Command::Sweep { surface, t, region, grid, out } => {
            let s = load_surface(&surface)?;
            let summary = sweep(&s, &t, &parse_region(&region)?, grid, &out)?;
            for f in &summary.frames {
                let counts: Vec<String> = f.counts.iter().map(|(k, v)| format!("{}={v}", k.name())).collect();
                println!("t={} {}", f.t, counts.join(" "));
            }
        }
        Command::Verify { n, seed } => {
            let (results, text) = verify(n, seed);
            print!("{text}");
            if !results.iter().all(|b| b.ok()) {
                return Err(CliError::Verify("verification failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code() as u8)
        }
    }
}
