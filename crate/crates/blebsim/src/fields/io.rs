//! Field dumps: VTK legacy `STRUCTURED_POINTS` (ASCII) and raw little-endian
//! binary with a JSON sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::field::ScalarField;
use super::FieldError;

/// Write one or more scalar fields sharing a grid as an ASCII VTK file.
pub fn write_vtk(path: &Path, fields: &[(&str, &ScalarField)], title: &str) -> Result<(), FieldError> {
    let Some((_, first)) = fields.first() else {
        return Err(FieldError::InvalidGrid("no fields to write".into()));
    };
    let grid = first.grid();
    for (_, f) in fields {
        if !f.grid().same_layout(grid) {
            return Err(FieldError::GridMismatch);
        }
    }
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    let [nx, ny, nz] = grid.cells();
    let h = grid.spacings();
    let o = grid.origin();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {nx} {ny} {nz}")?;
    writeln!(w, "ORIGIN {} {} {}", o[0] + 0.5 * h[0], o[1] + 0.5 * h[1], o[2] + 0.5 * h[2])?;
    writeln!(w, "SPACING {} {} {}", h[0], h[1], h[2])?;
    writeln!(w, "POINT_DATA {}", grid.len())?;
    for (name, f) in fields {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in f.values() {
            writeln!(w, "{v}")?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct RawSidecar<'a> {
    dims: [usize; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
    field_name: &'a str,
    time: f64,
}

/// Raw little-endian `f64` dump plus `<path>.json` metadata sidecar.
pub fn write_raw(path: &Path, field: &ScalarField, name: &str, time: f64) -> Result<(), FieldError> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    let sidecar = RawSidecar {
        dims: field.grid().cells(),
        spacing: field.grid().spacings(),
        origin: field.grid().origin(),
        field_name: name,
        time,
    };
    let json_path = path.with_extension(
        path.extension()
            .map(|e| format!("{}.json", e.to_string_lossy()))
            .unwrap_or_else(|| "json".into()),
    );
    let f = File::create(json_path)?;
    serde_json::to_writer_pretty(BufWriter::new(f), &sidecar)?;
    Ok(())
}
