//! Matrix CSV: a `rows,cols` header line, the dimensions, then one `re,im`
//! pair per entry in row-major order. Values are written with 17
//! significant digits so a write/read cycle is exact.

use std::io::{Read, Write};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

pub fn write_matrix_csv<T: Real, W: Write>(m: &ComplexMatrix<T>, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["rows", "cols"])?;
    w.write_record([m.rows().to_string(), m.cols().to_string()])?;
    for z in m.entries() {
        w.write_record([format!("{:.16e}", z.re), format!("{:.16e}", z.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn matrix_to_csv_string<T: Real>(m: &ComplexMatrix<T>) -> String {
    let mut buf = Vec::new();
    write_matrix_csv(m, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Reads the format written by [`write_matrix_csv`]. The literal `rows,cols`
/// and `re,im` header lines are optional; `#` starts a comment line.
pub fn read_matrix_csv<T: Real, R: Read>(input: R) -> Result<ComplexMatrix<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);

    let mut dims: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let (a, b) = (&record[0], &record[1]);
        match dims {
            None => {
                if a.eq_ignore_ascii_case("rows") && b.eq_ignore_ascii_case("cols") {
                    continue;
                }
                let rows = a.parse().map_err(|_| parse_err(line, format!("bad row count `{a}`")))?;
                let cols = b.parse().map_err(|_| parse_err(line, format!("bad column count `{b}`")))?;
                dims = Some((rows, cols));
            }
            Some(_) => {
                if entries.is_empty() && a.eq_ignore_ascii_case("re") && b.eq_ignore_ascii_case("im") {
                    continue;
                }
                let re: T = a.parse().map_err(|_| parse_err(line, format!("bad real part `{a}`")))?;
                let im: T = b.parse().map_err(|_| parse_err(line, format!("bad imaginary part `{b}`")))?;
                entries.push(Cplx::new(re, im));
            }
        }
    }
    let (rows, cols) = dims.ok_or_else(|| parse_err(1, "missing dimensions".into()))?;
    ComplexMatrix::new(rows, cols, entries)
}

pub fn matrix_from_csv_str<T: Real>(text: &str) -> Result<ComplexMatrix<T>> {
    read_matrix_csv(text.as_bytes())
}

fn parse_err(line: usize, message: String) -> Error {
    Error::Parse { line, message }
}
