//! CSV writers: the per-iteration solver trace and small generic tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use specsub_core::solver::TraceRecord;

/// Solver trace with the documented header
/// `iter,elapsed_s,obj_estimate,gap,exact_gap_flag,s1,s2`.
pub struct TraceWriter {
    out: BufWriter<File>,
    start: Instant,
    /// Non-checkpoint records are thinned to every `every`-th iteration.
    every: usize,
}

impl TraceWriter {
    pub fn create(path: &Path, every: usize) -> Result<Self> {
        let f = File::create(path).with_context(|| format!("create {path:?}"))?;
        let mut out = BufWriter::new(f);
        writeln!(out, "iter,elapsed_s,obj_estimate,gap,exact_gap_flag,s1,s2")?;
        Ok(TraceWriter { out, start: Instant::now(), every: every.max(1) })
    }

    pub fn record(&mut self, r: &TraceRecord) {
        if !r.exact_gap && r.iter % self.every != 0 {
            return;
        }
        let gap = r.gap.map(|g| format!("{g:.12e}")).unwrap_or_default();
        let _ = writeln!(
            self.out,
            "{},{:.6},{:.12e},{},{},{},{}",
            r.iter,
            self.start.elapsed().as_secs_f64(),
            r.objective_estimate,
            gap,
            u8::from(r.exact_gap),
            r.s1,
            r.s2
        );
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Minimal CSV table writer for the experiment outputs.
pub struct CsvTable {
    out: BufWriter<File>,
}

impl CsvTable {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        let f = File::create(path).with_context(|| format!("create {path:?}"))?;
        let mut out = BufWriter::new(f);
        writeln!(out, "{header}")?;
        Ok(CsvTable { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}
