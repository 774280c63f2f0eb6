use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gaitforge_core::ShapePoint;
use serde::Serialize;

use crate::{CliError, CliResult};

pub fn write_with<F>(path: &Path, f: F) -> CliResult<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

/// Reads the `phi1` and `phi2` columns of a CSV with a header row.
pub fn read_shape_csv(path: &Path) -> CliResult<Vec<ShapePoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let bad = |m: String| CliError::Usage(format!("{}: {m}", path.display()));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty file".into()))?.split(',').map(str::trim).collect();
    let col = |name: &str| header.iter().position(|h| *h == name).ok_or_else(|| bad(format!("no {name} column")));
    let (c1, c2) = (col("phi1")?, col("phi2")?);
    let mut pts = Vec::new();
    for (k, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let num = |c: usize| -> CliResult<f64> {
            f.get(c).and_then(|s| s.parse().ok()).ok_or_else(|| bad(format!("bad value on data row {}", k + 1)))
        };
        pts.push(ShapePoint::new(num(c1)?, num(c2)?));
    }
    if pts.len() < 2 {
        return Err(bad("fewer than two points".into()));
    }
    Ok(pts)
}

pub fn xy(pts: &[ShapePoint]) -> Vec<(f64, f64)> {
    pts.iter().map(|p| (p.phi1, p.phi2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_csv_by_header() {
        let dir = std::env::temp_dir().join(format!("gaitforge-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("g.csv");
        std::fs::write(&p, "s,phi2,phi1\n0,1,2\n0.5,3,4\n").unwrap();
        let pts = read_shape_csv(&p).unwrap();
        assert_eq!(pts, vec![ShapePoint::new(2.0, 1.0), ShapePoint::new(4.0, 3.0)]);
        std::fs::write(&p, "x,y\n1,2\n").unwrap();
        assert!(matches!(read_shape_csv(&p), Err(CliError::Usage(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
