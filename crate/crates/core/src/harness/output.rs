use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::algorithms::Trajectory;
use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: &str = "run,evaluations,fitness,ones_fraction,level";

/// One data row of a trajectory CSV. `fitness` is kept as text because
/// lexicographic values do not fit a number.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub run: usize,
    pub evaluations: u64,
    pub fitness: String,
    pub ones_fraction: f64,
    pub level: usize,
}

pub fn write_trajectories_csv<W: Write>(
    mut w: W,
    trajectories: &[Trajectory],
) -> std::io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for (run, t) in trajectories.iter().enumerate() {
        for s in &t.samples {
            writeln!(
                w,
                "{run},{},{},{},{}",
                s.evaluations, s.fitness, s.ones_fraction, s.level
            )?;
        }
    }
    w.flush()
}

pub fn read_trajectories_csv<R: BufRead>(r: R) -> Result<Vec<CsvRow>> {
    let bad =
        |line: usize, what: &str| Error::config(format!("trajectory CSV line {line}: {what}"));
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h == TRAJECTORY_HEADER => {}
        _ => return Err(bad(1, "unexpected header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| bad(i + 2, &e.to_string()))?;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad(i + 2, "expected 5 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 2, "malformed number"));
        rows.push(CsvRow {
            run: num(f[0])? as usize,
            evaluations: f[1]
                .parse()
                .map_err(|_| bad(i + 2, "malformed evaluations"))?,
            fitness: f[2].to_string(),
            ones_fraction: num(f[3])?,
            level: num(f[4])? as usize,
        });
    }
    Ok(rows)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

pub(crate) fn write_csv_file(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    write_trajectories_csv(create(path)?, trajectories).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(std::io::Error::from)
        .and_then(|_| writeln!(w))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
