//! Headerless CSV readers and writers for point clouds, distance matrices and
//! measures.

use std::io::{Read, Write};

use crate::error::{Error, Result};

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(input)
}

fn parse_row(record: &csv::StringRecord, line: usize) -> Result<Vec<f64>> {
    record
        .iter()
        .map(|field| {
            field.parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("{field:?}: {e}"),
            })
        })
        .collect()
}

fn read_rows<R: Read>(input: R) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, record) in reader(input).records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(parse_row(&record, line)?);
    }
    Ok(rows)
}

/// One point per line, coordinates separated by commas. All rows must have
/// the same length.
pub fn read_points<R: Read>(input: R) -> Result<Vec<Vec<f64>>> {
    let rows = read_rows(input)?;
    if let Some(first) = rows.first() {
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != first.len()) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected {} coordinates, got {}", first.len(), row.len()),
            });
        }
    }
    Ok(rows)
}

/// Square matrix, one row per line. Shape and metric checks happen in
/// [`crate::metric::MetricSpace::from_matrix`].
pub fn read_matrix<R: Read>(input: R) -> Result<Vec<Vec<f64>>> {
    read_rows(input)
}

/// Lines of `point_id,mass`.
pub fn read_measure<R: Read>(input: R) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut ids = Vec::new();
    let mut masses = Vec::new();
    for (i, record) in reader(input).records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `point_id,mass`, got {} fields", record.len()),
            });
        }
        let id = record[0].parse::<usize>().map_err(|e| Error::Parse {
            line,
            msg: format!("point id {:?}: {e}", &record[0]),
        })?;
        let mass = record[1].parse::<f64>().map_err(|e| Error::Parse {
            line,
            msg: format!("mass {:?}: {e}", &record[1]),
        })?;
        ids.push(id);
        masses.push(mass);
    }
    Ok((ids, masses))
}

/// Writes rows with shortest round-trip formatting.
pub fn write_points<W: Write>(points: &[Vec<f64>], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for p in points {
        w.write_record(p.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
