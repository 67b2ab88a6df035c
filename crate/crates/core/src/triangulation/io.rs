//! JSON triangulation files:
//! `{ "vertices": [ids], "tetrahedra": [[4 ids], ...], "coordinates": { "id": [x, y, z] } }`.
//!
//! Tetrahedra are written positively oriented, so reading a file back with
//! [`Triangulation::new`] reproduces the same oriented triangulation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Triangulation, VertexId};
use crate::error::{Error, Result};
use crate::geometry::Placement;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangulationFile {
  pub vertices: Vec<VertexId>,
  pub tetrahedra: Vec<[VertexId; 4]>,
  #[serde(default, skip_serializing_if = "Option::is_none")]
  pub coordinates: Option<BTreeMap<VertexId, [f64; 3]>>,
}

impl TriangulationFile {
  pub fn from_triangulation(t: &Triangulation, placement: Option<&Placement>) -> Self {
    TriangulationFile {
      vertices: t.vertices().to_vec(),
      tetrahedra: (0..t.tetrahedra().len()).map(|i| t.oriented_tetrahedron(i)).collect(),
      coordinates: placement.map(|p| p.coords.clone()),
    }
  }

  pub fn triangulation(&self) -> Result<Triangulation> {
    let t = Triangulation::new(self.tetrahedra.clone())?;
    let mut listed = self.vertices.clone();
    listed.sort_unstable();
    listed.dedup();
    if listed != t.vertices() {
      return Err(Error::InvalidInput("vertex list does not match the vertices used by tetrahedra".into()));
    }
    Ok(t)
  }

  /// Placement from the `coordinates` field, tagged with `seed`.
  pub fn placement(&self, seed: u64) -> Option<Placement> {
    self.coordinates.as_ref().map(|c| Placement { coords: c.clone(), seed })
  }

  pub fn to_json(&self) -> String { serde_json::to_string_pretty(self).expect("plain data serializes") }

  pub fn from_json(s: &str) -> Result<Self> { serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string())) }
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::triangulation::{builtin, ManifoldName};

  #[test]
  fn json_round_trip_is_bit_exact() {
    let t = builtin(ManifoldName::SolidTorus);
    let p = crate::geometry::random_placement(&t, 11).unwrap();
    let f = TriangulationFile::from_triangulation(&t, Some(&p));
    let text = f.to_json();
    let back = TriangulationFile::from_json(&text).unwrap();
    assert_eq!(back, f);
    assert_eq!(back.to_json(), text);
    let t2 = back.triangulation().unwrap();
    assert_eq!(t2.canonical_tetrahedra(), t.canonical_tetrahedra());
    let q = back.placement(p.seed).unwrap();
    for (v, x) in &p.coords {
      assert_eq!(q.coords[v].map(f64::to_bits), x.map(f64::to_bits));
    }
  }

  #[test]
  fn malformed_json_is_invalid_input() {
    assert!(matches!(TriangulationFile::from_json("{\"vertices\": [0,"), Err(Error::InvalidInput(_))));
  }
}
