use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::geometry::Point;

#[derive(Serialize, Deserialize)]
struct Row {
    x: f64,
    y: f64,
}

/// Reads task positions from CSV with an `x,y` header.
pub fn parse_tasks_csv<R: Read>(reader: R) -> Result<Vec<Point>, PipelineError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row?;
        let p = Point::new(row.x, row.y);
        if !p.is_finite() {
            return Err(PipelineError::InvalidArgument(format!("row {}: non-finite position", i + 1)));
        }
        out.push(p);
    }
    Ok(out)
}

pub fn read_tasks_csv(path: &Path) -> Result<Vec<Point>, PipelineError> {
    parse_tasks_csv(std::fs::File::open(path)?)
}

pub fn write_tasks_csv<W: Write>(writer: W, points: &[Point]) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_writer(writer);
    for p in points {
        w.serialize(Row { x: p.x, y: p.y })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_whitespace() {
        let pts = parse_tasks_csv("x, y\n1.5, -2\n 3,4\n".as_bytes()).unwrap();
        assert_eq!(pts, vec![Point::new(1.5, -2.0), Point::new(3.0, 4.0)]);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(parse_tasks_csv("x,y\n1,abc\n".as_bytes()).is_err());
        assert!(parse_tasks_csv("x,y\n1,NaN\n".as_bytes()).is_err());
        assert!(parse_tasks_csv("x,y\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn roundtrip() {
        let pts = vec![Point::new(0.1, 1e-17), Point::new(-80.0, 79.99999999)];
        let mut buf = Vec::new();
        write_tasks_csv(&mut buf, &pts).unwrap();
        assert_eq!(parse_tasks_csv(buf.as_slice()).unwrap(), pts);
    }
}
