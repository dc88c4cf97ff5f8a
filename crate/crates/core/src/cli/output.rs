//! Trajectory CSV writer and reader.
//!
//! Columns, in order: `t_ps`, the 16 density-matrix entries in row-major
//! product-basis order as `rho_re_ij, rho_im_ij` pairs, `magic_d0..magic_d3`,
//! `concurrence`, `eof`, `purity`, `trace_err`. Lines starting with `#` are
//! comments carrying the echoed configuration and, for aborted runs, a
//! trailer.

use std::io::{BufRead, Write};

use crate::entanglement::{analyze, magic_diagonal};
use crate::error::{Error, Result};
use crate::propagator::Record;

pub fn header_columns() -> Vec<String> {
    let mut cols = vec!["t_ps".to_string()];
    for i in 0..4 {
        for j in 0..4 {
            cols.push(format!("rho_re_{i}{j}"));
            cols.push(format!("rho_im_{i}{j}"));
        }
    }
    cols.extend((0..4).map(|i| format!("magic_d{i}")));
    for name in ["concurrence", "eof", "purity", "trace_err"] {
        cols.push(name.to_string());
    }
    cols
}

/// Locale-independent scientific notation with 16 significant digits.
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.15e}")
    }
}

/// Derived observables of one record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSummary {
    pub magic: [f64; 4],
    pub concurrence: f64,
    pub eof: f64,
    /// False when the state failed the positivity check of the
    /// entanglement analysis; concurrence and eof are then NaN.
    pub entanglement_ok: bool,
}

pub fn summarize(record: &Record) -> RowSummary {
    let magic = magic_diagonal(&record.rho);
    match analyze(&record.rho) {
        Ok(r) => RowSummary {
            magic,
            concurrence: r.concurrence,
            eof: r.eof,
            entanglement_ok: true,
        },
        Err(_) => RowSummary {
            magic,
            concurrence: f64::NAN,
            eof: f64::NAN,
            entanglement_ok: false,
        },
    }
}

pub struct TrajectoryWriter<W: Write> {
    out: W,
    rows: usize,
    flagged_rows: usize,
}

impl<W: Write> TrajectoryWriter<W> {
    /// Writes the comment block (one `#` line per echo line) and the header.
    pub fn new(mut out: W, echo: &str) -> Result<Self> {
        for line in echo.lines() {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "{}", header_columns().join(","))?;
        Ok(Self {
            out,
            rows: 0,
            flagged_rows: 0,
        })
    }

    pub fn write_record(&mut self, record: &Record) -> Result<RowSummary> {
        let summary = summarize(record);
        let mut fields = Vec::with_capacity(41);
        fields.push(fmt(record.t));
        for i in 0..4 {
            for j in 0..4 {
                let z = record.rho.get(i, j);
                fields.push(fmt(z.re));
                fields.push(fmt(z.im));
            }
        }
        fields.extend(summary.magic.iter().map(|&x| fmt(x)));
        fields.push(fmt(summary.concurrence));
        fields.push(fmt(summary.eof));
        fields.push(fmt(record.purity));
        fields.push(fmt(record.trace_error));
        writeln!(self.out, "{}", fields.join(","))?;
        self.rows += 1;
        if !summary.entanglement_ok {
            self.flagged_rows += 1;
        }
        Ok(summary)
    }

    pub fn comment(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "# {text}")?;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Adds the trailer for flagged rows, if any, and flushes.
    pub fn finish(mut self) -> Result<W> {
        if self.flagged_rows > 0 {
            writeln!(
                self.out,
                "# WARNING: {} rows had eigenvalues below -1e-8; concurrence and eof set to nan",
                self.flagged_rows
            )?;
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Parsed trajectory CSV: header columns and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Comment lines before the header (the echoed configuration).
    pub preamble: Vec<String>,
    /// Comment lines after the header (warnings, abort notices).
    pub trailer: Vec<String>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_csv<R: BufRead>(input: R) -> Result<CsvTable> {
    let mut columns = None;
    let mut rows = Vec::new();
    let mut preamble = Vec::new();
    let mut trailer = Vec::new();
    for line in input.lines() {
        let line = line?;
        if let Some(c) = line.strip_prefix('#') {
            let c = c.strip_prefix(' ').unwrap_or(c).to_string();
            if columns.is_none() {
                preamble.push(c)
            } else {
                trailer.push(c)
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if columns.is_none() {
            columns = Some(line.split(',').map(str::to_string).collect::<Vec<_>>());
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::Io(format!("bad number '{f}': {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let columns = columns.ok_or_else(|| Error::Io("missing header row".into()))?;
    Ok(CsvTable {
        columns,
        rows,
        preamble,
        trailer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{standard_state, StandardState};

    #[test]
    fn header_layout() {
        let cols = header_columns();
        assert_eq!(cols.len(), 1 + 32 + 4 + 4);
        assert_eq!(cols[0], "t_ps");
        assert_eq!(cols[1], "rho_re_00");
        assert_eq!(cols[2], "rho_im_00");
        assert_eq!(cols[32], "rho_im_33");
        assert_eq!(cols[33], "magic_d0");
        assert_eq!(&cols[37..], ["concurrence", "eof", "purity", "trace_err"]);
    }

    #[test]
    fn write_then_read() {
        let rho = standard_state(StandardState::E3).unwrap();
        let rec = Record {
            step: 0,
            t: 0.0,
            trace_error: rho.trace_error(),
            purity: rho.purity(),
            rho,
        };
        let mut w = TrajectoryWriter::new(Vec::new(), "a = 1\nb = 2").unwrap();
        w.write_record(&rec).unwrap();
        let bytes = w.finish().unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("# a = 1\n# b = 2\nt_ps,"));
        let table = read_csv(text.as_bytes()).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!((table.column("eof").unwrap()[0] - 1.0).abs() < 1e-12);
        assert!((table.column("rho_re_12").unwrap()[0] - 0.5).abs() < 1e-15);
        assert!((table.column("magic_d2").unwrap()[0] - 1.0).abs() < 1e-15);
        // 16 significant digits, no grouping separators
        assert!(text.contains("5.000000000000000e-1") || text.contains("5.000000000000001e-1"));
    }
}
