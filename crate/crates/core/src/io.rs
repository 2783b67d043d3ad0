//! Point lists as CSV with header `x,y` or `x,y,z`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::real::Real;

pub fn write_points<T: Real, W: Write>(points: &[Point<T>], w: W) -> Result<()> {
    let dim = points.first().map_or(2, |p| p.dim());
    if points.iter().any(|p| p.dim() != dim) {
        return Err(Error::Argument("points of mixed dimension".into()));
    }
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(&["x", "y", "z"][..dim])?;
    for p in points {
        wr.write_record(p.coords().iter().map(|c| c.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_points<T: Real, R: Read>(r: R) -> Result<Vec<Point<T>>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if header != ["x", "y"] && header != ["x", "y", "z"] {
        return Err(Error::Parse(format!("expected header x,y or x,y,z, got {}", header.join(","))));
    }
    let mut out = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let c: Vec<T> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().ok().and_then(T::from_f64))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse(format!("row {}: not a number", line + 2)))?;
        out.push(Point::from_slice(&c)?);
    }
    Ok(out)
}
