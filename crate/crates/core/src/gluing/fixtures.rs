//! Ready-made gluing problems with placements that agree on the glued surface.

use std::collections::HashMap;

use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GluingMap;
use crate::error::{Error, Result};
use crate::geometry::{check_general_position, random_placement, Placement, MAX_PLACEMENT_ATTEMPTS};
use crate::triangulation::{builtin, ManifoldName, Triangulation, VertexId};

#[derive(Clone, Debug)]
pub struct GluingFixture {
  pub name: &'static str,
  pub m1: Triangulation,
  pub p1: Placement,
  pub m2: Triangulation,
  pub p2: Placement,
  pub map: GluingMap,
}

#[derive(Clone, Debug)]
pub struct SelfGluingFixture {
  pub name: &'static str,
  pub manifold: Triangulation,
  pub placement: Placement,
  pub map: GluingMap,
}

/// The 3-ball as the cone over ∂Δ³ (vertices 0..3) with apex 4.
pub fn coned_ball() -> Triangulation {
  let faces = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
  Triangulation::orienting(faces.iter().map(|&[a, b, c]| [4, a, b, c]).collect()).expect("valid cone")
}

/// Random placement of `m2` whose Γ vertices sit exactly on their partners in `p1`.
pub fn partner_placement(m2: &Triangulation, p1: &Placement, map: &GluingMap, seed: u64) -> Result<Placement> {
  for attempt in 0..MAX_PLACEMENT_ATTEMPTS as u64 {
    let mut p = random_placement(m2, seed.wrapping_add(attempt))?;
    for &(v1, v2) in &map.pairs {
      p.coords.insert(v2, p1.coords[&v1]);
    }
    if check_general_position(m2, &p).is_ok() {
      return Ok(p);
    }
  }
  Err(Error::GeneralPositionFailure { seed, attempts: MAX_PLACEMENT_ATTEMPTS })
}

fn component_containing(t: &Triangulation, v: VertexId) -> usize { t.component_of_vertex(v).expect("boundary vertex") }

/// Two coned balls glued along their boundary spheres (result: S³).
pub fn ball_pair(seed: u64) -> Result<GluingFixture> {
  let m1 = coned_ball();
  let m2 = m1.reversed();
  let map = GluingMap { component1: 0, component2: 0, pairs: (0..4).map(|v| (v, v)).collect() };
  let p1 = random_placement(&m1, seed)?;
  let p2 = partner_placement(&m2, &p1, &map, seed ^ 0x5EED)?;
  Ok(GluingFixture { name: "B3 ∪ B3", m1, p1, m2, p2, map })
}

/// Two solid tori glued so that the meridian of one meets the meridian of the
/// other once (result: S³). The second copy has its grid coordinates swapped.
pub fn solid_torus_pair(seed: u64) -> Result<GluingFixture> {
  let m1 = builtin(ManifoldName::SolidTorus);
  let swap: HashMap<VertexId, VertexId> =
    (0..9).map(|v| (v, 3 * (v % 3) + v / 3)).chain((9..12).map(|c| (c, c))).collect();
  let m2 = m1.relabeled(&swap)?;
  let map = GluingMap { component1: 0, component2: 0, pairs: (0..9).map(|v| (v, v)).collect() };
  let p1 = random_placement(&m1, seed)?;
  let p2 = partner_placement(&m2, &p1, &map, seed ^ 0x5EED)?;
  Ok(GluingFixture { name: "solid torus ∪ solid torus", m1, p1, m2, p2, map })
}

/// Layered S²×I or T²×I whose top layer is a rigid motion of the bottom one,
/// to be glued top to bottom.
pub fn layered_self_gluing(name: ManifoldName, seed: u64) -> Result<SelfGluingFixture> {
  let n: VertexId = match name {
    ManifoldName::S2xI => 4,
    ManifoldName::T2xI => 9,
    other => return Err(Error::InvalidInput(format!("{other} has no self-gluing fixture"))),
  };
  let t = builtin(name);
  let top = 3 * n;
  let map = GluingMap {
    component1: component_containing(&t, 0),
    component2: component_containing(&t, top),
    pairs: (0..n).map(|v| (v, top + v)).collect(),
  };
  for attempt in 0..MAX_PLACEMENT_ATTEMPTS as u64 {
    let s = seed.wrapping_add(attempt);
    let mut p = random_placement(&t, s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0xA11CE);
    let r = Rotation3::from_euler_angles(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let shift = Vector3::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), 1.0);
    for v in 0..n {
      let x = p.coords[&v];
      let y = r * Vector3::new(x[0], x[1], x[2]) + shift;
      p.coords.insert(top + v, [y.x, y.y, y.z]);
    }
    if check_general_position(&t, &p).is_ok() {
      p.seed = s;
      return Ok(SelfGluingFixture { name: name.as_str(), manifold: t, placement: p, map });
    }
  }
  Err(Error::GeneralPositionFailure { seed, attempts: MAX_PLACEMENT_ATTEMPTS })
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::gluing::{glue, self_glue};

  #[test]
  fn ball_pair_gives_closed_sphere() {
    let f = ball_pair(3).unwrap();
    let g = glue(&f.m1, &f.p1, &f.m2, &f.p2, &f.map).unwrap();
    assert!(g.manifold.is_closed());
    assert_eq!(g.manifold.euler_characteristic(), 0);
    assert_eq!(g.manifold.vertices().len(), 6);
  }

  #[test]
  fn torus_pair_gives_closed_manifold() {
    let f = solid_torus_pair(3).unwrap();
    let g = glue(&f.m1, &f.p1, &f.m2, &f.p2, &f.map).unwrap();
    assert!(g.manifold.is_closed());
    assert_eq!(g.manifold.vertices().len(), 15);
    assert_eq!(g.manifold.tetrahedra().len(), 2 * f.m1.tetrahedra().len());
  }

  #[test]
  fn self_gluings_close_up() {
    for name in [ManifoldName::S2xI, ManifoldName::T2xI] {
      let f = layered_self_gluing(name, 1).unwrap();
      let g = self_glue(&f.manifold, &f.placement, &f.map).unwrap();
      assert!(g.manifold.is_closed(), "{name}");
      assert_eq!(g.manifold.tetrahedra().len(), f.manifold.tetrahedra().len());
    }
  }
}
