use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use torsio_core::grassmann::GrassmannElement;
use torsio_core::triangulation::{Triangulation, TriangulationFile};

use crate::CliError;

pub fn manifold_summary(t: &Triangulation) -> Value {
  json!({
    "vertices": t.vertices().len(),
    "inner_vertices": t.inner_vertices().len(),
    "edges": t.edges().len(),
    "tetrahedra": t.tetrahedra().len(),
    "boundary_components": t.num_boundary_components(),
    "euler_characteristic": t.euler_characteristic(),
  })
}

/// max |a − b| / max |b|, or the plain difference when `b` vanishes.
pub fn relative_difference(a: &GrassmannElement, b: &GrassmannElement) -> Result<f64, CliError> {
  let d = a.sub(b)?.max_abs();
  let s = b.max_abs();
  Ok(if s == 0.0 { d } else { d / s })
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
  fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_manifold(path: &Path) -> Result<TriangulationFile, CliError> {
  TriangulationFile::from_json(&read_text(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
  fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes the report to `out` if given, then prints either the JSON or the table.
pub fn emit(report: &Value, out: Option<&Path>, json: bool, table: &[(String, String)]) -> Result<(), CliError> {
  let text = serde_json::to_string_pretty(report).expect("plain data");
  if let Some(path) = out {
    write_text(path, &text)?;
  }
  if json {
    println!("{text}");
  } else {
    let width = table.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in table {
      println!("{k:<width$}  {v}");
    }
  }
  Ok(())
}

pub fn verdict(passed: bool) -> &'static str {
  if passed {
    "PASS"
  } else {
    "FAIL"
  }
}
