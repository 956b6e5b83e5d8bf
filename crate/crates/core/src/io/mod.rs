//! Configuration files and run artifacts.

mod config;
mod summary;
mod vtk;

use std::fs::File;
use std::io::{BufWriter, Write};

pub use config::{RunConfig, KEYS};
pub use summary::Summary;
pub use vtk::{vtk_string, write_vtk};

use crate::adapt::{self, RunResult, CSV_HEADER};
use crate::error::Result;

pub struct RunArtifacts {
    pub result: RunResult,
    pub summary: Summary,
}

/// Runs `config`, writing `run.csv`, VTK snapshots every `cadence` accepted
/// steps plus the last one, and `summary.json` into the output directory.
pub fn run(config: &RunConfig) -> Result<RunArtifacts> {
    let (scenario, driver) = config.validate()?;
    std::fs::create_dir_all(&config.out)?;
    let mut log = BufWriter::new(File::create(config.out.join("run.csv"))?);
    writeln!(log, "{CSV_HEADER}")?;
    let cadence = config.cadence;
    let out = config.out.clone();
    let result = adapt::run(&scenario, &driver, &mut |rec, mesh, state| {
        writeln!(log, "{}", rec.csv_row())?;
        if rec.step % cadence == 0 {
            log.flush()?;
            write_vtk(&out.join(format!("snapshot_{:06}.vtk", rec.step)), mesh, state)?;
        }
        Ok(())
    })?;
    log.flush()?;
    drop(log);
    let last = result.records.last().map_or(0, |r| r.step);
    if last % cadence != 0 || last == 0 {
        write_vtk(&config.out.join(format!("snapshot_{last:06}.vtk")), &result.mesh, &result.state)?;
    }
    let summary = Summary::new(&scenario.name, &result);
    std::fs::write(config.out.join("summary.json"), summary.to_json())?;
    Ok(RunArtifacts { result, summary })
}
