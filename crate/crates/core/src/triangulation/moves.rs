//! Interior Pachner moves. Boundary faces are never touched.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{induced_face_sign, Edge, Face, Triangulation, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PachnerMove {
  /// Two tetrahedra sharing an inner face become three around a new inner edge.
  TwoThree { face: Face },
  /// Three tetrahedra around an inner edge of degree three become two.
  ThreeTwo { edge: Edge },
  /// A tetrahedron is coned from a fresh inner vertex.
  OneFour { tetrahedron: [VertexId; 4], new_vertex: VertexId },
  /// An inner vertex of degree four is removed.
  FourOne { vertex: VertexId },
}

impl PachnerMove {
  pub fn kind(&self) -> &'static str {
    match self {
      PachnerMove::TwoThree { .. } => "2-3",
      PachnerMove::ThreeTwo { .. } => "3-2",
      PachnerMove::OneFour { .. } => "1-4",
      PachnerMove::FourOne { .. } => "4-1",
    }
  }
}

impl Triangulation {
  /// Applies an interior Pachner move, returning the new triangulation.
  pub fn apply_pachner(&self, mv: &PachnerMove) -> Result<Triangulation> {
    let (removed, added) = self.plan_move(mv)?;
    let removed_set: HashSet<usize> = removed.iter().copied().collect();
    let mut tets = Vec::new();
    let mut signs = Vec::new();
    for (i, t) in self.tetrahedra.iter().enumerate() {
      if !removed_set.contains(&i) {
        tets.push(*t);
        signs.push(self.orientation[i]);
      }
    }
    for new in added {
      signs.push(self.sign_for_replacement(&new, &removed));
      tets.push(new);
    }
    Triangulation::from_oriented(tets, signs)
  }

  /// All moves of the given kind that are applicable, in deterministic order.
  /// `fresh_vertex` is the id used for 1-4 moves.
  pub fn applicable_moves(&self, kind: &str, fresh_vertex: VertexId) -> Vec<PachnerMove> {
    let candidates: Vec<PachnerMove> = match kind {
      "2-3" => self.faces.iter().map(|f| PachnerMove::TwoThree { face: *f }).collect(),
      "3-2" => self.edges.iter().map(|e| PachnerMove::ThreeTwo { edge: *e }).collect(),
      "1-4" => self
        .tetrahedra
        .iter()
        .map(|t| PachnerMove::OneFour { tetrahedron: *t, new_vertex: fresh_vertex })
        .collect(),
      "4-1" => self.vertices.iter().map(|v| PachnerMove::FourOne { vertex: *v }).collect(),
      _ => Vec::new(),
    };
    candidates.into_iter().filter(|m| self.plan_move(m).is_ok()).collect()
  }

  /// Orientation sign for a new tetrahedron: it must induce on some face of a
  /// removed tetrahedron the same orientation as that tetrahedron did.
  fn sign_for_replacement(&self, new: &[VertexId; 4], removed: &[usize]) -> i8 {
    for omit in 0..4 {
      let f: Vec<VertexId> = (0..4).filter(|&i| i != omit).map(|i| new[i]).collect();
      let face = Face::new([f[0], f[1], f[2]]);
      for &r in removed {
        let old = &self.tetrahedra[r];
        if face.0.iter().all(|v| old.contains(v)) {
          let want = induced_face_sign(old, self.orientation[r], &face);
          return want * induced_face_sign(new, 1, &face);
        }
      }
    }
    unreachable!("every new tetrahedron shares a face with the removed star")
  }

  fn plan_move(&self, mv: &PachnerMove) -> Result<(Vec<usize>, Vec<[VertexId; 4]>)> {
    let na = |msg: String| Error::NotApplicable(msg);
    match mv {
      PachnerMove::TwoThree { face } => {
        let fi = self.face_id(face).ok_or_else(|| na(format!("no face {:?}", face.0)))?;
        let ts = self.face_tetrahedra(fi);
        if ts.len() != 2 {
          return Err(na(format!("face {:?} lies on the boundary", face.0)));
        }
        let apex = |t: usize| *self.tetrahedra[t].iter().find(|v| !face.0.contains(v)).unwrap();
        let (d, e) = (apex(ts[0]), apex(ts[1]));
        if self.edge_id(&Edge::new(d, e)).is_some() {
          return Err(na(format!("edge ({d},{e}) already exists")));
        }
        let [a, b, c] = face.0;
        Ok((ts.to_vec(), vec![[a, b, d, e], [b, c, d, e], [c, a, d, e]]))
      }
      PachnerMove::ThreeTwo { edge } => {
        let ei = self.edge_id(edge).ok_or_else(|| na(format!("no edge {edge}")))?;
        if self.is_boundary_edge(ei) {
          return Err(na(format!("edge {edge} lies on the boundary")));
        }
        let ts = self.edge_tetrahedra(ei);
        if ts.len() != 3 {
          return Err(na(format!("edge {edge} has degree {}", ts.len())));
        }
        let others: BTreeSet<VertexId> =
          ts.iter().flat_map(|&t| self.tetrahedra[t]).filter(|v| !edge.contains(*v)).collect();
        if others.len() != 3 {
          return Err(na(format!("star of edge {edge} is not a triangle")));
        }
        let o: Vec<VertexId> = others.into_iter().collect();
        if self.face_id(&Face::new([o[0], o[1], o[2]])).is_some() {
          return Err(na(format!("face {o:?} already exists")));
        }
        Ok((ts.to_vec(), vec![[o[0], o[1], o[2], edge.0], [o[0], o[1], o[2], edge.1]]))
      }
      PachnerMove::OneFour { tetrahedron, new_vertex } => {
        let t = self.find_tetrahedron(*tetrahedron).ok_or_else(|| na(format!("no tetrahedron {tetrahedron:?}")))?;
        if self.vertices.binary_search(new_vertex).is_ok() {
          return Err(na(format!("vertex id {new_vertex} already in use")));
        }
        let old = self.tetrahedra[t];
        let added = (0..4)
          .map(|i| {
            let mut n = old;
            n[i] = *new_vertex;
            n
          })
          .collect();
        Ok((vec![t], added))
      }
      PachnerMove::FourOne { vertex } => {
        if self.vertices.binary_search(vertex).is_err() || self.is_boundary_vertex(*vertex) {
          return Err(na(format!("vertex {vertex} is not an inner vertex")));
        }
        let star: Vec<usize> = (0..self.tetrahedra.len()).filter(|&t| self.tetrahedra[t].contains(vertex)).collect();
        if star.len() != 4 {
          return Err(na(format!("vertex {vertex} has degree {}", star.len())));
        }
        let others: Vec<VertexId> = star
          .iter()
          .flat_map(|&t| self.tetrahedra[t])
          .filter(|v| v != vertex)
          .collect::<BTreeSet<_>>()
          .into_iter()
          .collect();
        if others.len() != 4 {
          return Err(na(format!("link of vertex {vertex} is not a tetrahedron boundary")));
        }
        let quad = [others[0], others[1], others[2], others[3]];
        if self.find_tetrahedron(quad).is_some() {
          return Err(na(format!("tetrahedron {quad:?} already exists")));
        }
        Ok((star, vec![quad]))
      }
    }
  }
}
