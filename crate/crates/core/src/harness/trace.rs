//! Per-run trace files: `iter,subset,x0..x{d-1},y,y_best,wall_ms,eval_ms,gp_size`,
//! one row per evaluation including the initial design. `subset` is `-` for
//! BO and design rows, otherwise the dimensions joined by `-`.

use std::io::{Read, Write};
use std::path::Path;

use super::HarnessError;
use crate::optimize::IterationRecord;
use crate::scheduler::DimensionSubset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceOptions {
    /// When false the timing columns are written as 0.
    pub timings: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { timings: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub dim: usize,
    pub records: Vec<IterationRecord>,
}

impl Trace {
    pub fn new(dim: usize, records: Vec<IterationRecord>) -> Self {
        Self { dim, records }
    }

    pub fn y_best(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.y_best).collect()
    }
}

pub fn header(dim: usize) -> Vec<String> {
    let mut h = vec!["iter".to_string(), "subset".to_string()];
    h.extend((0..dim).map(|j| format!("x{j}")));
    h.extend(
        ["y", "y_best", "wall_ms", "eval_ms", "gp_size"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

fn subset_field(s: &Option<DimensionSubset>) -> String {
    match s {
        Some(z) => z.to_string(),
        None => "-".to_string(),
    }
}

/// Writes `records` as CSV. Floats use the shortest representation that
/// reads back to the same value.
pub fn write_trace<W: Write>(
    out: W,
    dim: usize,
    records: &[IterationRecord],
    opts: TraceOptions,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(dim))?;
    for r in records {
        let mut row = Vec::with_capacity(dim + 7);
        row.push(r.iter.to_string());
        row.push(subset_field(&r.subset));
        row.extend(r.x.iter().map(|v| v.to_string()));
        row.push(r.y.to_string());
        row.push(r.y_best.to_string());
        let (wall, eval) = if opts.timings {
            (r.wall_time_ms, r.eval_time_ms)
        } else {
            (0.0, 0.0)
        };
        row.push(wall.to_string());
        row.push(eval.to_string());
        row.push(r.gp_size.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_file(
    path: &Path,
    dim: usize,
    records: &[IterationRecord],
    opts: TraceOptions,
) -> Result<(), HarnessError> {
    let f = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_trace(std::io::BufWriter::new(f), dim, records, opts).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::io(path, io),
        other => HarnessError::parse(path, format!("{other:?}")),
    })
}

/// Parses a trace, rejecting wrong headers, ragged rows and unparsable
/// fields. `origin` only labels errors.
pub fn read_trace<R: Read>(input: R, origin: &Path) -> Result<Trace, HarnessError> {
    let err = |line: u64, m: String| HarnessError::parse(origin, format!("line {line}: {m}"));
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let head = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if head.len() < 8 {
        return Err(err(
            1,
            format!("expected at least 8 columns, found {}", head.len()),
        ));
    }
    let dim = head.len() - 7;
    let expected = header(dim);
    if head.iter().ne(expected.iter().map(String::as_str)) {
        return Err(err(1, format!("header must be {}", expected.join(","))));
    }

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| err(line, e.to_string()))?;
        if row.len() != head.len() {
            return Err(err(
                line,
                format!("expected {} fields, found {}", head.len(), row.len()),
            ));
        }
        let float = |c: usize| -> Result<f64, HarnessError> {
            row[c].parse::<f64>().map_err(|_| {
                err(
                    line,
                    format!("column {}: bad number {:?}", expected[c], &row[c]),
                )
            })
        };
        let int = |c: usize| -> Result<usize, HarnessError> {
            row[c].parse::<usize>().map_err(|_| {
                err(
                    line,
                    format!("column {}: bad integer {:?}", expected[c], &row[c]),
                )
            })
        };
        let subset = match &row[1] {
            "-" => None,
            s => {
                let dims = s
                    .split('-')
                    .map(|p| p.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| err(line, format!("bad subset {s:?}")))?;
                Some(DimensionSubset::new(dims, dim).map_err(|e| err(line, e.to_string()))?)
            }
        };
        let x = (0..dim)
            .map(|j| float(2 + j))
            .collect::<Result<Vec<_>, _>>()?;
        records.push(IterationRecord {
            iter: int(0)?,
            subset,
            x,
            y: float(dim + 2)?,
            y_best: float(dim + 3)?,
            wall_time_ms: float(dim + 4)?,
            eval_time_ms: float(dim + 5)?,
            gp_size: int(dim + 6)?,
        });
    }
    Ok(Trace { dim, records })
}

pub fn read_trace_file(path: &Path) -> Result<Trace, HarnessError> {
    let f = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_trace(std::io::BufReader::new(f), path)
}
