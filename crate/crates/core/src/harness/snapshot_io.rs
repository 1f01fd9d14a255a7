use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::driver::{Diagnostics, Snapshot};
use crate::error::{Error, Result};

pub const SNAPSHOT_HEADER: [&str; 5] = ["x", "rho", "u", "eps", "P"];

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        kind => Error::Parse {
            line: line.unwrap_or(0),
            message: format!("{}: {kind:?}", path.display()),
        },
    }
}

/// 17 significant digits, enough to read back every `f64` exactly.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshot<W: Write>(snapshot: &Snapshot, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(SNAPSHOT_HEADER)?;
    for j in 0..snapshot.n_cells() {
        w.write_record(
            [
                snapshot.x[j],
                snapshot.rho[j],
                snapshot.u[j],
                snapshot.eps[j],
                snapshot.pressure[j],
            ]
            .map(format_value),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `x,rho,u,eps,P` with one row per cell, creating parent directories.
pub fn write_snapshot_csv(snapshot: &Snapshot, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    write_snapshot(snapshot, BufWriter::new(file)).map_err(|e| csv_err(path, e))
}

/// Reads a snapshot written by [`write_snapshot_csv`]. The file carries no
/// time stamp, so `time` is NaN; diagnostics are recomputed from the fields
/// with `dt = 0`.
pub fn read_snapshot_csv(path: &Path) -> Result<Snapshot> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().ne(SNAPSHOT_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "{}: expected header `{}`, got `{}`",
                path.display(),
                SNAPSHOT_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut cols: [Vec<f64>; 5] = Default::default();
    for (row, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        for (col, field) in cols.iter_mut().zip(record.iter()) {
            col.push(field.parse().map_err(|_| Error::Parse {
                line: row + 2,
                message: format!("{}: `{field}` is not a number", path.display()),
            })?);
        }
    }
    let [x, rho, u, eps, pressure] = cols;
    if x.len() < 2 {
        return Err(Error::Parse {
            line: x.len() + 1,
            message: format!("{}: need at least two cells", path.display()),
        });
    }
    let dx = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    let diagnostics = Diagnostics {
        total_mass: rho.iter().sum::<f64>() * dx,
        max_abs_u: u.iter().map(|v| v.abs()).fold(0.0, f64::max),
        min_rho: rho.iter().copied().fold(f64::INFINITY, f64::min),
        dt: 0.0,
        steps: 0,
    };
    Ok(Snapshot {
        time: f64::NAN,
        x,
        rho,
        u,
        eps,
        pressure,
        diagnostics,
    })
}
