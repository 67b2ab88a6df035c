//! Fixed example triangulations.
//!
//! | name          | construction                                                      | m |
//! |---------------|-------------------------------------------------------------------|---|
//! | `S3`          | boundary of the 4-simplex on vertices 0..4                         | 0 |
//! | `B3`          | the single tetrahedron (0,1,2,3)                                   | 1 |
//! | `S2xI`        | four copies of ∂Δ³ (ids `4·layer + v`), three staircase prism layers | 2 |
//! | `S2xS1`       | `S2xI` with layer 3 identified with layer 0                        | 0 |
//! | `solid-torus` | 3×3 grid torus (ids `3k + i`) coned prism-wise from centers 9,10,11 | 1 |
//! | `T2xI`        | four copies of the 3×3 grid torus (ids `9·layer + 3j + i`), three prism layers | 2 |
//!
//! Prisms over a triangle `u < v < w` are cut into `(u,v,w,w')`, `(u,v,v',w')`,
//! `(u,u',v',w')`, so adjacent prisms agree on their quadrilateral diagonals.

use std::fmt;
use std::str::FromStr;

use super::{Triangulation, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldName {
  S3,
  B3,
  S2xI,
  S2xS1,
  SolidTorus,
  T2xI,
}

impl ManifoldName {
  pub const ALL: [ManifoldName; 6] = [
    ManifoldName::S3,
    ManifoldName::B3,
    ManifoldName::S2xI,
    ManifoldName::S2xS1,
    ManifoldName::SolidTorus,
    ManifoldName::T2xI,
  ];

  pub fn as_str(&self) -> &'static str {
    match self {
      ManifoldName::S3 => "S3",
      ManifoldName::B3 => "B3",
      ManifoldName::S2xI => "S2xI",
      ManifoldName::S2xS1 => "S2xS1",
      ManifoldName::SolidTorus => "solid-torus",
      ManifoldName::T2xI => "T2xI",
    }
  }
}

impl fmt::Display for ManifoldName {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { f.write_str(self.as_str()) }
}

impl FromStr for ManifoldName {
  type Err = Error;

  fn from_str(s: &str) -> Result<Self> {
    ManifoldName::ALL
      .into_iter()
      .find(|n| n.as_str().eq_ignore_ascii_case(s))
      .ok_or_else(|| Error::UnknownName(s.to_string()))
  }
}

pub fn builtin(name: ManifoldName) -> Triangulation {
  let tets = match name {
    ManifoldName::S3 => (0..5u32)
      .map(|omit| {
        let v: Vec<u32> = (0..5).filter(|&i| i != omit).collect();
        [v[0], v[1], v[2], v[3]]
      })
      .collect(),
    ManifoldName::B3 => vec![[0, 1, 2, 3]],
    ManifoldName::S2xI => layered(&sphere_triangles(), 4, 4, false),
    ManifoldName::S2xS1 => layered(&sphere_triangles(), 4, 3, true),
    ManifoldName::SolidTorus => solid_torus_tetrahedra(),
    ManifoldName::T2xI => layered(&grid_torus_triangles(), 9, 4, false),
  };
  Triangulation::orienting(tets).expect("builtin fixtures are valid")
}

/// Boundary of the tetrahedron on 0..4.
pub(crate) fn sphere_triangles() -> Vec<[VertexId; 3]> { vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] }

/// 9-vertex torus on the 3×3 grid, vertex `(i, j)` has id `3j + i`, all
/// diagonals run from `(i, j)` to `(i+1, j+1)`.
pub(crate) fn grid_torus_triangles() -> Vec<[VertexId; 3]> {
  let id = |i: u32, j: u32| 3 * (j % 3) + (i % 3);
  let mut out = Vec::new();
  for j in 0..3 {
    for i in 0..3 {
      out.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
      out.push([id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
    }
  }
  out
}

/// Surface × interval with `layers` copies of the surface; with `cyclic`, the
/// last prism layer connects back to layer 0.
fn layered(triangles: &[[VertexId; 3]], n: u32, layers: u32, cyclic: bool) -> Vec<[VertexId; 4]> {
  let prism_layers = if cyclic { layers } else { layers - 1 };
  let mut out = Vec::new();
  for layer in 0..prism_layers {
    let lo = layer * n;
    let hi = ((layer + 1) % layers) * n;
    for tri in triangles {
      let mut t = *tri;
      t.sort_unstable();
      let [u, v, w] = t;
      out.push([lo + u, lo + v, lo + w, hi + w]);
      out.push([lo + u, lo + v, hi + v, hi + w]);
      out.push([lo + u, hi + u, hi + v, hi + w]);
    }
  }
  out
}

fn solid_torus_tetrahedra() -> Vec<[VertexId; 4]> {
  let id = |i: u32, k: u32| 3 * (k % 3) + (i % 3);
  let mut out = Vec::new();
  for k in 0..3 {
    let center = 9 + k;
    let mut prism_faces = vec![[id(0, k), id(1, k), id(2, k)], [id(0, k + 1), id(1, k + 1), id(2, k + 1)]];
    for i in 0..3 {
      prism_faces.push([id(i, k), id(i + 1, k), id(i + 1, k + 1)]);
      prism_faces.push([id(i, k), id(i, k + 1), id(i + 1, k + 1)]);
    }
    out.extend(prism_faces.into_iter().map(|[a, b, c]| [center, a, b, c]));
  }
  out
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn names_round_trip() {
    for n in ManifoldName::ALL {
      assert_eq!(n.as_str().parse::<ManifoldName>().unwrap(), n);
    }
    assert!(matches!("RP3".parse::<ManifoldName>(), Err(Error::UnknownName(_))));
  }

  #[test]
  fn fixture_summary() {
    let b3 = builtin(ManifoldName::B3);
    assert_eq!(b3.num_boundary_components(), 1);
    assert_eq!(b3.boundary_components()[0].faces.len(), 4);

    let s3 = builtin(ManifoldName::S3);
    assert!(s3.is_closed());
    assert_eq!(s3.tetrahedra().len(), 5);

    let s2i = builtin(ManifoldName::S2xI);
    assert_eq!(s2i.num_boundary_components(), 2);
    assert!(s2i.boundary_components().iter().all(|c| c.euler_characteristic() == 2));
    assert_eq!(s2i.inner_vertices().len(), 8);

    let s2s1 = builtin(ManifoldName::S2xS1);
    assert!(s2s1.is_closed());
    assert_eq!(s2s1.vertices().len(), 12);

    let st = builtin(ManifoldName::SolidTorus);
    assert_eq!(st.num_boundary_components(), 1);
    assert_eq!(st.boundary_components()[0].euler_characteristic(), 0);
    assert_eq!(st.inner_vertices(), vec![9, 10, 11]);

    let t2i = builtin(ManifoldName::T2xI);
    assert_eq!(t2i.num_boundary_components(), 2);
    assert!(t2i.boundary_components().iter().all(|c| c.euler_characteristic() == 0));
  }

  #[test]
  fn euler_characteristic_of_boundary_is_twice_that_of_manifold() {
    for n in ManifoldName::ALL {
      let t = builtin(n);
      let boundary: i64 = t.boundary_components().iter().map(|c| c.euler_characteristic()).sum();
      assert_eq!(boundary, 2 * t.euler_characteristic(), "{n}");
    }
  }

  #[test]
  fn surface_edge_counts() {
    for n in ManifoldName::ALL {
      let t = builtin(n);
      for c in t.boundary_components() {
        let nv = c.vertices.len() as i64;
        assert_eq!(c.edges.len() as i64, 3 * nv - 3 * c.euler_characteristic(), "{n}");
      }
    }
  }
}
