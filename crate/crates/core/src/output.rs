//! JSON and CSV writers. Every float is printed with 17 significant digits so
//! that reports round-trip bit for bit.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::ConfigFile;
use crate::harness::{Bin, Correction, ExperimentReport, RunRecord};

/// Formats `x` in scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Pretty JSON formatter that writes floats with [`fmt_f64`].
struct SigDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SigDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` as pretty JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Output of a single run: the echoed config followed by the run record.
#[derive(Debug, Serialize)]
pub struct RunDocument<'a> {
    pub config: &'a ConfigFile,
    #[serde(flatten)]
    pub record: &'a RunRecord,
}

/// Output of a batch experiment.
#[derive(Debug, Serialize)]
pub struct BenchDocument<'a> {
    pub config: &'a ConfigFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction: Option<&'a Correction>,
    #[serde(flatten)]
    pub report: &'a ExperimentReport,
}

/// One row per run: `run, seed, x_0..x_{d-1}, f_sol, success, iterations,
/// objective_evals, gradient_evals, stop_reason`.
pub fn write_runs_csv<W: Write>(writer: W, runs: &[RunRecord]) -> csv::Result<()> {
    let d = runs.first().map_or(0, |r| r.result.x_sol.len());
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["run".to_string(), "seed".to_string()];
    header.extend((0..d).map(|k| format!("x_{k}")));
    header.extend(
        ["f_sol", "success", "iterations", "objective_evals", "gradient_evals", "stop_reason"]
            .map(String::from),
    );
    out.write_record(&header)?;
    for r in runs {
        let mut row = vec![r.run.to_string(), r.seed.to_string()];
        row.extend(r.result.x_sol.iter().map(|&x| fmt_f64(x)));
        row.push(fmt_f64(r.result.f_sol));
        row.push(r.success.to_string());
        row.push(r.result.iterations.to_string());
        row.push(r.result.objective_evals.to_string());
        row.push(r.result.gradient_evals.to_string());
        row.push(format!("{:?}", r.result.stop_reason));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(writer: W, bins: &[Bin]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["bin_center", "count"])?;
    for b in bins {
        out.write_record([fmt_f64(b.center), b.count.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(writer: W, rows: &[(f64, f64)]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["x0", "x_final"])?;
    for &(x0, x) in rows {
        out.write_record([fmt_f64(x0), fmt_f64(x)])?;
    }
    out.flush()?;
    Ok(())
}
