//! Convergence sweeps and the batch of published test cases.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ReferenceSpec, RunConfig};
use super::norms::{error_norms, AnalyticReference, ErrorReport, Reference};
use super::snapshot_io::{read_snapshot_csv, write_snapshot_csv};
use crate::driver::{run_final, SchemeKind, Snapshot};
use crate::error::{Error, Result};
use crate::mesh::BoundaryPolicy;

pub const SWEEP_HEADER: &str = "n_cells,l1,l2,linf,scheme";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: SchemeKind,
    pub report: ErrorReport,
}

/// Reference a config asks for, loaded once.
#[derive(Debug, Clone)]
pub enum LoadedReference {
    Analytic(AnalyticReference),
    Snapshot(Snapshot),
}

impl LoadedReference {
    pub fn load(config: &RunConfig) -> Result<Option<Self>> {
        Ok(match &config.reference {
            ReferenceSpec::None => None,
            ReferenceSpec::Analytic => Some(Self::Analytic(analytic_reference(config))),
            ReferenceSpec::File(p) => Some(Self::Snapshot(read_snapshot_csv(p)?)),
        })
    }

    pub fn as_reference(&self) -> Reference<'_> {
        match self {
            Self::Analytic(a) => Reference::Analytic(*a),
            Self::Snapshot(s) => Reference::Snapshot(s),
        }
    }
}

pub fn analytic_reference(config: &RunConfig) -> AnalyticReference {
    AnalyticReference {
        time: config.t_end,
        sigma0: config.sigma0,
        tau_g: config.tau_g,
        u_g: config.u_g,
    }
}

/// Runs `base` at every cell count (in parallel) and measures each final
/// density against the base config's reference.
pub fn convergence_sweep(base: &RunConfig, cell_counts: &[usize]) -> Result<Vec<SweepRow>> {
    if cell_counts.is_empty() {
        return Err(Error::Config("empty list of cell counts".into()));
    }
    if cell_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("cell counts must be strictly ascending, got {cell_counts:?}")));
    }
    let reference = LoadedReference::load(base)?.ok_or_else(|| {
        Error::Config("a sweep needs `reference = analytic` or a reference CSV path".into())
    })?;
    cell_counts
        .par_iter()
        .map(|&n| {
            let config = RunConfig {
                n_cells: n,
                snapshot_times: Vec::new(),
                ..base.clone()
            };
            let start = Instant::now();
            let snap = run_final(&config)?;
            let mut report = error_norms(&snap, reference.as_reference())?;
            report.wall_clock = start.elapsed();
            Ok(SweepRow {
                scheme: base.scheme,
                report,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{}",
            r.report.n_cells, r.report.l1, r.report.l2, r.report.linf, r.scheme
        );
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)
}

/// `git describe` of the working tree when available, else the package version.
pub fn version_string() -> String {
    let described = Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty());
    let pkg = env!("CARGO_PKG_VERSION");
    match described {
        Some(d) => format!("dispersa {pkg} (git {d})"),
        None => format!("dispersa {pkg} (git unavailable)"),
    }
}

/// Base configuration of the Gaussian-bump test: domain [-1, 1], σ0 = 0.01,
/// τ_g = 0.1, ū_g = 0, t_end = 0.2, 100 cells.
pub fn bump_config(scheme: SchemeKind, st: f64) -> RunConfig {
    RunConfig {
        scheme,
        st,
        n_cells: 100,
        t_end: 0.2,
        boundary: BoundaryPolicy::Transmissive,
        ..RunConfig::default()
    }
}

fn st_label(st: f64) -> String {
    format!("{st}")
}

/// A named single run and the reference it is scored against.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub config: RunConfig,
}

/// The single runs of the Gaussian-bump study.
pub fn paper_experiments() -> Vec<Experiment> {
    let mut out = Vec::new();
    let mut push = |name: String, config: RunConfig| out.push(Experiment { name, config });
    for st in [0.1, 0.01] {
        let mut fine = bump_config(SchemeKind::ApExplicit, st);
        fine.n_cells = 2000;
        push(format!("st{}_reference_2000", st_label(st)), fine);
    }
    for st in [0.1, 0.01, 1e-3, 1e-4] {
        let reference = if st < 0.005 {
            ReferenceSpec::Analytic
        } else {
            ReferenceSpec::File(PathBuf::from(format!("st{}_reference_2000.csv", st_label(st))))
        };
        for (tag, scheme) in [("ap", SchemeKind::ApExplicit), ("nonap", SchemeKind::NonApExplicit)] {
            let config = RunConfig {
                reference: reference.clone(),
                ..bump_config(scheme, st)
            };
            push(format!("st{}_{tag}_explicit", st_label(st)), config);
        }
    }
    for m in [10.0, 50.0] {
        for (tag, scheme) in [("ap", SchemeKind::ApImplicit), ("nonap", SchemeKind::NonApImplicit)] {
            let config = RunConfig {
                implicit_multiplier: m,
                reference: ReferenceSpec::Analytic,
                ..bump_config(scheme, 1e-4)
            };
            push(format!("st0.0001_{tag}_implicit_m{m}"), config);
        }
    }
    let reference = RunConfig {
        reference: ReferenceSpec::Analytic,
        ..bump_config(SchemeKind::AsymptoticReference, 1e-4)
    };
    push("asymptotic_reference_100".into(), reference);
    out
}

/// Cell counts of the error-versus-resolution figures.
pub const PAPER_CELL_COUNTS: [usize; 4] = [25, 50, 100, 200];

/// Error sweeps: name and base config (analytic reference, St = 1e-4).
pub fn paper_sweeps() -> Vec<(String, Vec<RunConfig>)> {
    let base = |scheme, m| RunConfig {
        implicit_multiplier: m,
        reference: ReferenceSpec::Analytic,
        ..bump_config(scheme, 1e-4)
    };
    let mut out = vec![(
        "st0.0001_explicit_error".to_string(),
        vec![
            base(SchemeKind::ApExplicit, 1.0),
            base(SchemeKind::NonApExplicit, 1.0),
        ],
    )];
    for m in [10.0, 50.0] {
        out.push((
            format!("st0.0001_implicit_error_m{m}"),
            vec![
                base(SchemeKind::ApImplicit, m),
                base(SchemeKind::NonApImplicit, m),
            ],
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub name: String,
    pub scheme: SchemeKind,
    pub st: f64,
    pub n_cells: usize,
    pub error: Option<ErrorReport>,
}

/// Runs every published case into `out_dir`: one snapshot CSV and one config
/// per run, the error sweeps, an `errors.csv` summary and `manifest.txt`.
pub fn reproduce_paper(out_dir: &Path) -> Result<Vec<ExperimentResult>> {
    let config_dir = out_dir.join("configs");
    let experiments: Vec<Experiment> = paper_experiments()
        .into_iter()
        .map(|mut e| {
            e.config.output_path = Some(PathBuf::from(format!("{}.csv", e.name)));
            if let ReferenceSpec::File(p) = &e.config.reference {
                e.config.reference = ReferenceSpec::File(PathBuf::from("..").join(p));
            }
            e
        })
        .collect();
    for e in &experiments {
        write_text(&config_dir.join(format!("{}.cfg", e.name)), &e.config.to_text())?;
    }

    // fine references first, everything else may depend on them
    let (fine, rest): (Vec<&Experiment>, Vec<&Experiment>) =
        experiments.iter().partition(|e| e.config.reference == ReferenceSpec::None);
    let run_one = |e: &Experiment| -> Result<ExperimentResult> {
        let snap = run_final(&e.config)?;
        write_snapshot_csv(&snap, &out_dir.join(format!("{}.csv", e.name)))?;
        let error = match &e.config.reference {
            ReferenceSpec::None => None,
            ReferenceSpec::Analytic => {
                Some(error_norms(&snap, Reference::Analytic(analytic_reference(&e.config)))?)
            }
            ReferenceSpec::File(p) => {
                let reference = read_snapshot_csv(&config_dir.join(p))?;
                Some(error_norms(&snap, Reference::Snapshot(&reference))?)
            }
        };
        Ok(ExperimentResult {
            name: e.name.clone(),
            scheme: e.config.scheme,
            st: e.config.st,
            n_cells: e.config.n_cells,
            error,
        })
    };
    let mut results: Vec<ExperimentResult> = fine.par_iter().map(|e| run_one(e)).collect::<Result<_>>()?;
    results.extend(rest.par_iter().map(|e| run_one(e)).collect::<Result<Vec<_>>>()?);

    let sweeps = paper_sweeps();
    let mut sweep_files = Vec::new();
    for (name, bases) in &sweeps {
        let mut rows = Vec::new();
        for (i, base) in bases.iter().enumerate() {
            write_text(&config_dir.join(format!("{name}_{i}.cfg")), &base.to_text())?;
            rows.extend(convergence_sweep(base, &PAPER_CELL_COUNTS)?);
        }
        let file = format!("{name}.csv");
        write_text(&out_dir.join(&file), &sweep_csv(&rows))?;
        sweep_files.push((name.clone(), bases.len(), file));
    }

    let mut summary = String::from("name,scheme,st,n_cells,l1,l2,linf\n");
    for r in &results {
        if let Some(e) = &r.error {
            let _ = writeln!(
                summary,
                "{},{},{:e},{},{:.16e},{:.16e},{:.16e}",
                r.name, r.scheme, r.st, r.n_cells, e.l1, e.l2, e.linf
            );
        }
    }
    write_text(&out_dir.join("errors.csv"), &summary)?;

    let mut manifest = format!("version: {}\n\nruns:\n", version_string());
    for e in &experiments {
        let _ = writeln!(manifest, "  configs/{}.cfg -> {}.csv", e.name, e.name);
    }
    manifest.push_str("\nsweeps (cells 25,50,100,200):\n");
    for (name, count, file) in &sweep_files {
        let cfgs: Vec<String> = (0..*count).map(|i| format!("configs/{name}_{i}.cfg")).collect();
        let _ = writeln!(manifest, "  {} -> {file}", cfgs.join(" "));
    }
    manifest.push_str("\nsummary: errors.csv\n");
    write_text(&out_dir.join("manifest.txt"), &manifest)?;
    Ok(results)
}
