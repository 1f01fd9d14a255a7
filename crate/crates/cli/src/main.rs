use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dispersa::driver::{run_with, Snapshot};
use dispersa::harness::experiments::{convergence_sweep, reproduce_paper, sweep_csv, write_text, LoadedReference};
use dispersa::harness::norms::{error_norms, ErrorReport, Reference};
use dispersa::harness::{load_config, read_snapshot_csv, write_snapshot_csv};

#[derive(Parser)]
#[command(name = "dispersa", version, about = "Relaxation solver for the 1D dispersed-phase moment equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its snapshots as CSV.
    Run {
        config: PathBuf,
        /// Final snapshot path; overrides `output` in the config.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Repeat a configuration over several cell counts and tabulate the errors.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
        cells: Vec<usize>,
        /// Write the table here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Error norms of the density in `a` against the reference `b`.
    Compare { a: PathBuf, b: PathBuf },
    /// Run the Gaussian-bump study into a results directory.
    ReproducePaper {
        #[arg(short, long, default_value = "results")]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, output } => cmd_run(&config, output),
        Command::Sweep { config, cells, output } => cmd_sweep(&config, &cells, output),
        Command::Compare { a, b } => cmd_compare(&a, &b),
        Command::ReproducePaper { out } => cmd_reproduce(&out),
    }
}

fn print_norms(label: &str, r: &ErrorReport) {
    println!(
        "{label}: n_cells = {}, l1 = {:.6e}, l2 = {:.6e}, linf = {:.6e}",
        r.n_cells, r.l1, r.l2, r.linf
    );
}

/// `out.csv` for the final time, `out_t0.05.csv` for earlier snapshots.
fn snapshot_path(final_path: &Path, snap: &Snapshot, t_end: f64) -> PathBuf {
    if snap.time == t_end {
        return final_path.to_path_buf();
    }
    let stem = final_path.file_stem().and_then(|s| s.to_str()).unwrap_or("snapshot");
    final_path.with_file_name(format!("{stem}_t{}.csv", snap.time))
}

fn cmd_run(config_path: &Path, output: Option<PathBuf>) -> Result<()> {
    let config = load_config(config_path)?;
    let final_path = output.or_else(|| config.output_path.clone()).unwrap_or_else(|| {
        let stem = config_path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
        PathBuf::from(format!("{stem}.csv"))
    });
    let reference = LoadedReference::load(&config)?;
    let mut last = None;
    run_with(&config, |snap| {
        let path = snapshot_path(&final_path, snap, config.t_end);
        write_snapshot_csv(snap, &path)?;
        let d = &snap.diagnostics;
        eprintln!(
            "t = {}: {} steps, mass {:.15e}, min rho {:.6e}, max |u| {:.6e}, last dt {:.6e} -> {}",
            snap.time, d.steps, d.total_mass, d.min_rho, d.max_abs_u, d.dt, path.display()
        );
        last = Some(snap.clone());
        Ok(())
    })
    .with_context(|| format!("run of {} failed", config_path.display()))?;
    if let (Some(reference), Some(snap)) = (reference, last) {
        print_norms("error", &error_norms(&snap, reference.as_reference())?);
    }
    Ok(())
}

fn cmd_sweep(config_path: &Path, cells: &[usize], output: Option<PathBuf>) -> Result<()> {
    if cells.is_empty() {
        bail!("--cells needs at least one count");
    }
    let config = load_config(config_path)?;
    let rows = convergence_sweep(&config, cells)?;
    let table = sweep_csv(&rows);
    match output {
        Some(path) => {
            write_text(&path, &table)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{table}"),
    }
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path) -> Result<()> {
    let sa = read_snapshot_csv(a)?;
    let sb = read_snapshot_csv(b)?;
    print_norms("rho", &error_norms(&sa, Reference::Snapshot(&sb))?);
    Ok(())
}

fn cmd_reproduce(out: &Path) -> Result<()> {
    let results = reproduce_paper(out)?;
    for r in &results {
        match &r.error {
            Some(e) => println!("{:<34} l1 = {:.4e}", r.name, e.l1),
            None => println!("{:<34} (reference)", r.name),
        }
    }
    eprintln!("results in {}", out.display());
    Ok(())
}
