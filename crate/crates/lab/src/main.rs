use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use strichartz_lab::experiments::region_rows;
use strichartz_lab::registry::Cell;
use strichartz_lab::{registry, run, ExperimentConfig, LabError};

#[derive(Parser)]
#[command(name = "lab", version, about = "Run torus dispersive-estimate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List experiments and their parameters.
    List,
    /// Run the sweep described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the diagonal admissibility map as CSV.
    Region {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 12)]
        res: usize,
    },
}

fn list() {
    for exp in registry() {
        println!("{}  {}", exp.name, exp.summary);
        for p in exp.params {
            println!("    {:<16} {:<28} {}", p.name, p.default, p.help);
        }
    }
}

fn region(d: usize, res: usize) -> Result<(), LabError> {
    let rows = region_rows(d, res)?;
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    let io = |e: csv::Error| LabError::Config(e.to_string());
    w.write_record(["inv_r", "inv_q", "region"]).map_err(io)?;
    for row in rows {
        w.write_record(row[1..].iter().map(Cell::to_string)).map_err(io)?;
    }
    w.flush().map_err(|e| LabError::io("stdout".as_ref(), e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            list();
            Ok(true)
        }
        Command::Region { d, res } => region(d, res).map(|_| true),
        Command::Run { config } => ExperimentConfig::load(&config).and_then(|cfg| run(&cfg)).map(|report| {
            println!(
                "{} rows -> {}\n{}: {}",
                report.table.rows.len(),
                report.output.display(),
                if report.verdict.pass { "PASS" } else { "FAIL" },
                report.verdict.detail
            );
            report.verdict.pass
        }),
    };
    let _ = std::io::stdout().flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
