//! Minimal rigid constructions: edge sets whose fixed lengths leave only global
//! Euclidean motions, chosen greedily in edge-id order.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::labels::ConfigSpace;
use crate::error::{Error, Result};
use crate::geometry::Placement;
use crate::linalg::{numerical_rank, RowSpace, RANK_RTOL};
use crate::triangulation::Triangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RigidContext {
  /// Inner edges against dx_inner ⊕ m·𝔢(3).
  Interior,
  /// Edges of boundary component `k` against its vertex coordinates.
  Surface(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidConstruction {
  /// Selected edge ids, ascending.
  pub edges: Vec<usize>,
  pub context: RigidContext,
  /// Candidate edges left out, ascending. For the interior context these are
  /// the inner edges entering the f3 minor; for a surface they form ℰ_Γ.
  pub complement: Vec<usize>,
}

impl RigidConstruction {
  pub fn target_rank(t: &Triangulation, context: RigidContext) -> usize {
    match context {
      RigidContext::Interior => (3 * t.inner_vertices().len() + 6 * t.num_boundary_components()).saturating_sub(6),
      RigidContext::Surface(k) => 3 * t.boundary_components()[k].vertices.len() - 6,
    }
  }

  /// Length-derivative rows of `edges` over the context's configuration space.
  pub fn rows(t: &Triangulation, p: &Placement, context: RigidContext, edges: &[usize]) -> Result<DMatrix<f64>> {
    let space = space_of(t, context);
    let mut m = DMatrix::zeros(edges.len(), space.dim());
    for (i, &e) in edges.iter().enumerate() {
      m.set_row(i, &space.length_row(p, &t.edges()[e])?.transpose());
    }
    Ok(m)
  }

  /// Checks a prescribed edge set: candidates only, target size, full rank.
  pub fn from_edges(t: &Triangulation, p: &Placement, context: RigidContext, edges: &[usize]) -> Result<Self> {
    let candidates = candidates(t, context);
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|e| !candidates.contains(e)) {
      return Err(Error::EdgeNotEligible(t.edges()[bad]));
    }
    let target = Self::target_rank(t, context);
    let reached = numerical_rank(&Self::rows(t, p, context, &sorted)?, RANK_RTOL);
    if sorted.len() != target || reached != target {
      return Err(Error::RankDeficient { target, reached });
    }
    let complement = candidates.into_iter().filter(|e| sorted.binary_search(e).is_err()).collect();
    Ok(RigidConstruction { edges: sorted, context, complement })
  }

  /// Greedy selection scanning candidates in the given order.
  pub fn greedy_in_order(t: &Triangulation, p: &Placement, context: RigidContext, order: &[usize]) -> Result<Self> {
    let candidates = candidates(t, context);
    if let Some(&bad) = order.iter().find(|e| !candidates.contains(e)) {
      return Err(Error::EdgeNotEligible(t.edges()[bad]));
    }
    let space = space_of(t, context);
    let target = Self::target_rank(t, context);
    let rows: Vec<_> = order.iter().map(|&e| space.length_row(p, &t.edges()[e])).collect::<Result<_>>()?;
    let scale = rows.iter().fold(0.0, |m: f64, r| m.max(r.norm()));
    let mut rs = RowSpace::with_scale(RANK_RTOL, scale);
    let mut chosen = Vec::with_capacity(target);
    for (&e, row) in order.iter().zip(&rows) {
      if rs.rank() == target {
        break;
      }
      if rs.try_add(row) {
        chosen.push(e);
      }
    }
    if rs.rank() < target {
      return Err(Error::RankDeficient { target, reached: rs.rank() });
    }
    chosen.sort_unstable();
    let complement = candidates.into_iter().filter(|e| chosen.binary_search(e).is_err()).collect();
    Ok(RigidConstruction { edges: chosen, context, complement })
  }
}

fn space_of(t: &Triangulation, context: RigidContext) -> ConfigSpace {
  match context {
    RigidContext::Interior => ConfigSpace::interior(t),
    RigidContext::Surface(k) => ConfigSpace::surface(&t.boundary_components()[k]),
  }
}

fn candidates(t: &Triangulation, context: RigidContext) -> Vec<usize> {
  match context {
    RigidContext::Interior => t.inner_edges(),
    RigidContext::Surface(k) => {
      let mut v: Vec<usize> =
        t.boundary_components()[k].edges.iter().map(|e| t.edge_id(e).expect("boundary edge")).collect();
      v.sort_unstable();
      v
    }
  }
}

pub fn rigid_construction_interior(t: &Triangulation, p: &Placement) -> Result<RigidConstruction> {
  let n = t.inner_vertices().len();
  if n < 3 {
    return Err(Error::MissingInnerVertices(n));
  }
  RigidConstruction::greedy_in_order(t, p, RigidContext::Interior, &t.inner_edges())
}

pub fn rigid_construction_surface(t: &Triangulation, k: usize, p: &Placement) -> Result<RigidConstruction> {
  let context = RigidContext::Surface(k);
  RigidConstruction::greedy_in_order(t, p, context, &candidates(t, context))
}

/// Rigid constructions of every boundary component, in component order.
pub fn boundary_rigid_constructions(t: &Triangulation, p: &Placement) -> Result<Vec<RigidConstruction>> {
  (0..t.num_boundary_components()).map(|k| rigid_construction_surface(t, k, p)).collect()
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::geometry::{perturbed_barycenter, random_placement};
  use crate::triangulation::{builtin, ManifoldName, PachnerMove};

  /// Three 1→4 moves on the first tetrahedron produced each time.
  fn subdivided(name: ManifoldName, seed: u64) -> (Triangulation, Placement) {
    let mut t = builtin(name);
    let mut p = random_placement(&t, seed).unwrap();
    let mut fresh = *t.vertices().iter().max().unwrap() + 1;
    while t.inner_vertices().len() < 3 {
      let tuple = t.tetrahedra()[0];
      let x = perturbed_barycenter(&p, &tuple, seed).unwrap();
      t = t.apply_pachner(&PachnerMove::OneFour { tetrahedron: tuple, new_vertex: fresh }).unwrap();
      p = p.with_vertex(fresh, x);
      fresh += 1;
    }
    (t, p)
  }

  #[test]
  fn closed_sphere_count() {
    // every vertex of a closed manifold is inner: 3·5 − 6 = 9 of the 10 edges
    let t = builtin(ManifoldName::S3);
    let p = random_placement(&t, 3).unwrap();
    let rc = rigid_construction_interior(&t, &p).unwrap();
    assert_eq!(rc.edges.len(), 9);
    assert_eq!(rc.complement.len(), 1);
  }

  #[test]
  fn subdivided_ball_needs_nine_edges() {
    let (t, p) = subdivided(ManifoldName::B3, 5);
    assert_eq!(t.inner_vertices().len(), 3);
    let rc = rigid_construction_interior(&t, &p).unwrap();
    assert_eq!(rc.edges.len(), 9);
    let rows = RigidConstruction::rows(&t, &p, RigidContext::Interior, &rc.edges).unwrap();
    assert_eq!(numerical_rank(&rows, RANK_RTOL), 9);
  }

  #[test]
  fn surface_complements_follow_euler_characteristic() {
    for name in ManifoldName::ALL {
      let t = builtin(name);
      let p = random_placement(&t, 7).unwrap();
      for (k, c) in t.boundary_components().iter().enumerate() {
        let rc = rigid_construction_surface(&t, k, &p).unwrap();
        assert_eq!(rc.complement.len() as i64, 6 - 3 * c.euler_characteristic(), "{name}");
        assert_eq!(rc.edges.len(), 3 * c.vertices.len() - 6);
      }
    }
  }

  #[test]
  fn greedy_choice_is_minimal() {
    let (t, p) = subdivided(ManifoldName::SolidTorus, 2);
    let rc = rigid_construction_interior(&t, &p).unwrap();
    let target = rc.edges.len();
    for drop in 0..rc.edges.len() {
      let mut fewer = rc.edges.clone();
      fewer.remove(drop);
      let rows = RigidConstruction::rows(&t, &p, RigidContext::Interior, &fewer).unwrap();
      assert_eq!(numerical_rank(&rows, RANK_RTOL), target - 1);
    }
  }

  #[test]
  fn choice_is_stable_across_seeds() {
    for name in [ManifoldName::S2xI, ManifoldName::SolidTorus, ManifoldName::T2xI] {
      let t = builtin(name);
      let reference = rigid_construction_interior(&t, &random_placement(&t, 0).unwrap()).unwrap();
      for seed in 1..5 {
        let rc = rigid_construction_interior(&t, &random_placement(&t, seed).unwrap()).unwrap();
        assert_eq!(rc.edges, reference.edges, "{name} seed {seed}");
      }
    }
  }

  #[test]
  fn override_is_validated() {
    let t = builtin(ManifoldName::SolidTorus);
    let p = random_placement(&t, 1).unwrap();
    let rc = rigid_construction_interior(&t, &p).unwrap();
    let again = RigidConstruction::from_edges(&t, &p, RigidContext::Interior, &rc.edges).unwrap();
    assert_eq!(again, rc);
    let short = &rc.edges[1..];
    assert!(matches!(
      RigidConstruction::from_edges(&t, &p, RigidContext::Interior, short),
      Err(Error::RankDeficient { .. })
    ));
    let boundary_edge = (0..t.edges().len()).find(|&e| t.is_boundary_edge(e)).unwrap();
    assert!(matches!(
      RigidConstruction::from_edges(&t, &p, RigidContext::Interior, &[boundary_edge]),
      Err(Error::EdgeNotEligible(_))
    ));
  }
}
