//! Gluing manifolds along boundary components and composing their
//! generating functions.

pub mod fixtures;

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::complex::{ConfigSpace, FrameChoice, PlanOptions};
use crate::error::{Error, Result};
use crate::geometry::{check_general_position, random_placement, Placement, Point};
use crate::grassmann::{generating_invariant, ordered_product, Generator, GrassmannElement, Registry};
use crate::linalg::{log_det, relative_conditioning, submatrix, LogScalar, RANK_RTOL};
use crate::rigidity::{rigid_construction_surface, RigidConstruction, RigidContext};
use crate::triangulation::{Edge, Face, Triangulation, VertexId};

/// Vertex bijection from component `component1` of the first manifold onto
/// component `component2` of the second (or of the same one when self-gluing).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingMap {
  #[serde(default)]
  pub component1: usize,
  #[serde(default)]
  pub component2: usize,
  pub pairs: Vec<(VertexId, VertexId)>,
}

impl GluingMap {
  pub fn from_json(s: &str) -> Result<Self> { serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string())) }

  pub fn to_json(&self) -> String { serde_json::to_string_pretty(self).expect("plain data") }
}

/// Checks that the map is a simplicial, orientation-reversing isomorphism
/// between the two components; returns it as a lookup table.
fn validate_map(m1: &Triangulation, m2: &Triangulation, map: &GluingMap) -> Result<HashMap<VertexId, VertexId>> {
  let bad = |msg: String| Error::IncompatibleBoundary(msg);
  let g1 = m1.boundary_components().get(map.component1).ok_or_else(|| bad(format!("no component {}", map.component1)))?;
  let g2 = m2.boundary_components().get(map.component2).ok_or_else(|| bad(format!("no component {}", map.component2)))?;
  let phi: HashMap<VertexId, VertexId> = map.pairs.iter().copied().collect();
  let mut dom: Vec<VertexId> = map.pairs.iter().map(|p| p.0).collect();
  let mut img: Vec<VertexId> = map.pairs.iter().map(|p| p.1).collect();
  dom.sort_unstable();
  img.sort_unstable();
  img.dedup();
  if dom != g1.vertices || img != g2.vertices || phi.len() != map.pairs.len() {
    return Err(bad("map is not a bijection between the component vertex sets".into()));
  }
  for f in &g1.faces {
    let image = Face::new(f.0.map(|v| phi[&v]));
    let f1 = m1.face_id(f).expect("boundary face");
    let f2 = m2.face_id(&image).filter(|&i| m2.is_boundary_face(i)).ok_or_else(|| bad(format!("face {:?} has no image", f.0)))?;
    let s1 = m1.boundary_face_sign(f1).expect("boundary face");
    let s2 = m2.boundary_face_sign(f2).expect("boundary face");
    // orientation of the image pulled back to the sorted order of f
    let mapped = f.0.map(|v| phi[&v]);
    let parity = crate::triangulation::permutation_sign(&image.0, &mapped);
    if s1 * s2 * parity != -1 {
      return Err(bad("gluing map does not reverse the induced boundary orientation".into()));
    }
  }
  Ok(phi)
}

/// Result of gluing two manifolds.
#[derive(Clone, Debug)]
pub struct Glued {
  pub manifold: Triangulation,
  pub placement: Placement,
  /// Second manifold with its vertices renamed into the glued numbering.
  pub m2: Triangulation,
  pub p2: Placement,
  /// Old id in the second manifold → id in the glued manifold.
  pub relabel: HashMap<VertexId, VertexId>,
}

/// Glues `m2` to `m1`; Γ vertices keep the ids of `m1`, the other vertices of
/// `m2` get fresh ids. Coordinates on Γ must agree bit for bit.
pub fn glue(m1: &Triangulation, p1: &Placement, m2: &Triangulation, p2: &Placement, map: &GluingMap) -> Result<Glued> {
  let phi = validate_map(m1, m2, map)?;
  for (&v1, &v2) in &phi {
    let (x1, x2) = (p1.coords.get(&v1), p2.coords.get(&v2));
    match (x1, x2) {
      (Some(a), Some(b)) if a.map(f64::to_bits) == b.map(f64::to_bits) => {}
      (None, _) => return Err(Error::MissingCoordinates(v1)),
      (_, None) => return Err(Error::MissingCoordinates(v2)),
      _ => return Err(Error::PlacementMismatch(v1)),
    }
  }
  let inverse: HashMap<VertexId, VertexId> = phi.iter().map(|(&a, &b)| (b, a)).collect();
  let mut fresh = m1.vertices().iter().max().map_or(0, |v| v + 1);
  let mut relabel = HashMap::new();
  for &v in m2.vertices() {
    let id = match inverse.get(&v) {
      Some(&w) => w,
      None => {
        fresh += 1;
        fresh - 1
      }
    };
    relabel.insert(v, id);
  }
  let m2r = m2.relabeled(&relabel)?;
  let mut coords2 = BTreeMap::new();
  for (v, x) in &p2.coords {
    if let Some(&w) = relabel.get(v) {
      coords2.insert(w, *x);
    }
  }
  let p2r = Placement { coords: coords2, seed: p2.seed };
  let tets: Vec<[VertexId; 4]> = (0..m1.tetrahedra().len())
    .map(|i| m1.oriented_tetrahedron(i))
    .chain((0..m2r.tetrahedra().len()).map(|i| m2r.oriented_tetrahedron(i)))
    .collect();
  let manifold = Triangulation::new(tets).map_err(|e| Error::IncompatibleBoundary(e.to_string()))?;
  let mut coords = p1.coords.clone();
  coords.extend(p2r.coords.iter().map(|(&v, &x)| (v, x)));
  let placement = Placement { coords, seed: p1.seed };
  Ok(Glued { manifold, placement, m2: m2r, p2: p2r, relabel })
}

/// Result of identifying two boundary components of one manifold.
#[derive(Clone, Debug)]
pub struct SelfGlued {
  pub manifold: Triangulation,
  pub placement: Placement,
  /// Edge of the second component → edge of the first.
  pub edge_map: HashMap<Edge, Edge>,
}

/// Identifies component `component2` with `component1`. The two components
/// must be congruent under the map (equal edge lengths); a placement of the
/// result is inherited when it stays in general position.
pub fn self_glue(m: &Triangulation, p: &Placement, map: &GluingMap) -> Result<SelfGlued> {
  if map.component1 == map.component2 {
    return Err(Error::IncompatibleBoundary("a component cannot be glued to itself".into()));
  }
  let phi = validate_map(m, m, map)?;
  let g1 = &m.boundary_components()[map.component1];
  let mut edge_map = HashMap::new();
  for e in &g1.edges {
    let image = Edge::new(phi[&e.0], phi[&e.1]);
    let (l1, l2) = (p.length(e)?, p.length(&image)?);
    if (l1 - l2).abs() > 1e-9 * l1 {
      return Err(Error::PlacementMismatch(e.0));
    }
    edge_map.insert(image, *e);
  }
  let back: HashMap<VertexId, VertexId> = phi.iter().map(|(&a, &b)| (b, a)).collect();
  let f = |v: VertexId| back.get(&v).copied().unwrap_or(v);
  let tets: Vec<[VertexId; 4]> = (0..m.tetrahedra().len()).map(|i| m.oriented_tetrahedron(i).map(f)).collect();
  let manifold = Triangulation::new(tets).map_err(|e| Error::IncompatibleBoundary(e.to_string()))?;
  let mut coords = p.coords.clone();
  for v in back.keys() {
    coords.remove(v);
  }
  let mut placement = Placement { coords, seed: p.seed };
  if check_general_position(&manifold, &placement).is_err() {
    placement = random_placement(&manifold, p.seed)?;
  }
  Ok(SelfGlued { manifold, placement, edge_map })
}

/// Rigid motion x ↦ R x + t taking `from` onto `to` in the least-squares sense,
/// with the RMS residual.
pub fn kabsch(from: &[Point], to: &[Point]) -> (Matrix3<f64>, Vector3<f64>, f64) {
  let n = from.len().max(1) as f64;
  let v = |p: &Point| Vector3::new(p[0], p[1], p[2]);
  let cf = from.iter().map(v).sum::<Vector3<f64>>() / n;
  let ct = to.iter().map(v).sum::<Vector3<f64>>() / n;
  let mut h = Matrix3::zeros();
  for (a, b) in from.iter().zip(to) {
    h += (v(a) - cf) * (v(b) - ct).transpose();
  }
  let svd = h.svd(true, true);
  let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
  let mut d = Matrix3::identity();
  if (vt.transpose() * u.transpose()).determinant() < 0.0 {
    d[(2, 2)] = -1.0;
  }
  let r = vt.transpose() * d * u.transpose();
  let t = ct - r * cf;
  let rms = (from.iter().zip(to).map(|(a, b)| (r * v(a) + t - v(b)).norm_squared()).sum::<f64>() / n).sqrt();
  (r, t, rms)
}

/// Moves `p2` rigidly so that the Γ vertices land on their partners in `p1`,
/// then copies the Γ coordinates from `p1` exactly. Fails if the two sides are
/// not congruent to `tol` (RMS).
pub fn transport_placement(p1: &Placement, p2: &Placement, map: &GluingMap, tol: f64) -> Result<Placement> {
  let mut from = Vec::new();
  let mut to = Vec::new();
  for &(v1, v2) in &map.pairs {
    from.push(*p2.coords.get(&v2).ok_or(Error::MissingCoordinates(v2))?);
    to.push(*p1.coords.get(&v1).ok_or(Error::MissingCoordinates(v1))?);
  }
  let (r, t, rms) = kabsch(&from, &to);
  if rms > tol {
    return Err(Error::PlacementMismatch(map.pairs.first().map_or(0, |p| p.0)));
  }
  let mut coords = BTreeMap::new();
  for (&v, x) in &p2.coords {
    let y = r * Vector3::new(x[0], x[1], x[2]) + t;
    coords.insert(v, [y.x, y.y, y.z]);
  }
  for &(v1, v2) in &map.pairs {
    coords.insert(v2, p1.coords[&v1]);
  }
  Ok(Placement { coords, seed: p2.seed })
}

/// The complex 0 → 𝔢(3) → (dx)_Γ → (dl)_{m.r.c.} → 0 of one surface.
#[derive(Clone, Debug)]
pub struct SurfaceComplexData {
  pub g1: DMatrix<f64>,
  pub g2: DMatrix<f64>,
  pub frame: [VertexId; 3],
  pub rc: RigidConstruction,
  /// minor g1 / minor g2
  pub tau: LogScalar,
}

pub fn surface_torsion(t: &Triangulation, k: usize, p: &Placement, rc: &RigidConstruction) -> Result<SurfaceComplexData> {
  if rc.context != RigidContext::Surface(k) {
    return Err(Error::InvalidInput("rigid construction belongs to another context".into()));
  }
  let comp = &t.boundary_components()[k];
  let space = ConfigSpace::surface(comp);
  let g1 = space.motion_matrix(p)?;
  let g2 = RigidConstruction::rows(t, p, rc.context, &rc.edges)?;
  let vs = &comp.vertices;
  let a = p.point(vs[0])?;
  let b = p.point(vs[1])?;
  let c = vs[2..]
    .iter()
    .copied()
    .find(|&c| p.point(c).map_or(false, |x| (b - a).cross(&(x - a)).norm() > RANK_RTOL * (b - a).norm() * (x - a).norm()))
    .ok_or_else(|| Error::DegenerateGeometry("surface vertices are collinear".into()))?;
  let frame_labels = FrameChoice::InnerVertices([vs[0], vs[1], c]).labels();
  let frame_idx: Vec<usize> = frame_labels.iter().map(|l| space.index_of(l).expect("surface vertex")).collect();
  let free: Vec<usize> = (0..space.dim()).filter(|i| !frame_idx.contains(i)).collect();
  let m1 = submatrix(&g1, &frame_idx, &(0..6).collect::<Vec<_>>());
  let m2 = submatrix(&g2, &(0..g2.nrows()).collect::<Vec<_>>(), &free);
  for (name, m) in [("g1", &m1), ("g2", &m2)] {
    let cond = relative_conditioning(m);
    if cond < RANK_RTOL {
      return Err(Error::SingularPlanMinor { matrix: name, relative: cond });
    }
  }
  let tau = log_det(&m1).div(log_det(&m2));
  Ok(SurfaceComplexData { g1, g2, frame: [vs[0], vs[1], c], rc: rc.clone(), tau })
}

/// Data of the gluing surface entering the composition law.
#[derive(Clone, Debug)]
pub struct GammaData {
  pub n_vertices: usize,
  pub tau: LogScalar,
  /// ∏ l² over all edges of Γ.
  pub length_product: LogScalar,
  /// Edges of Γ outside its rigid construction, ascending.
  pub e_gamma: Vec<Edge>,
  pub rc_edges: Vec<Edge>,
}

impl GammaData {
  pub fn new(t: &Triangulation, k: usize, p: &Placement, rc: &RigidConstruction) -> Result<Self> {
    let s = surface_torsion(t, k, p, rc)?;
    let comp = &t.boundary_components()[k];
    let mut length_product = LogScalar::ONE;
    for e in &comp.edges {
      length_product = length_product.mul(LogScalar::from_f64(p.length(e)?).powi(2));
    }
    Ok(GammaData {
      n_vertices: comp.vertices.len(),
      tau: s.tau,
      length_product,
      e_gamma: rc.complement.iter().map(|&e| t.edges()[e]).collect(),
      rc_edges: rc.edges.iter().map(|&e| t.edges()[e]).collect(),
    })
  }

  /// (−1)^{N_Γ} τ_Γ² / ∏_Γ l²
  pub fn prefactor(&self) -> LogScalar {
    let s = if self.n_vertices % 2 == 0 { LogScalar::ONE } else { LogScalar::ONE.neg() };
    s.mul(self.tau.powi(2)).div(self.length_product)
  }
}

fn without_edges(reg: &Registry, edges: &[Edge]) -> Result<Registry> {
  Registry::new(
    reg.generators().iter().filter(|g| !matches!(g, Generator::Edge { edge, .. } if edges.contains(edge))).copied().collect(),
  )
}

/// (−1)^{N_Γ} τ_Γ²/∏_Γ l² · ∫ 𝐈₁ 𝐈₂ ∏_{ℰ_Γ} da* da. Generators of equal edges
/// in the two arguments are identified.
pub fn compose_invariants(i1: &GrassmannElement, i2: &GrassmannElement, gamma: &GammaData) -> Result<GrassmannElement> {
  let prod = i1.product(i2)?;
  let integrated = prod.integrate_edges(&gamma.e_gamma);
  let rest = without_edges(prod.registry(), &gamma.e_gamma)?;
  Ok(integrated.restrict(&rest)?.scale(gamma.prefactor().to_f64()))
}

/// Self-gluing analogue: generators of the second component are renamed by
/// `edge_map`, then ℰ_Γ is integrated out. Returns the result and the sum of
/// absolute values of the individual contributions.
pub fn self_glue_compose(
  i: &GrassmannElement,
  gamma: &GammaData,
  edge_map: &HashMap<Edge, Edge>,
) -> Result<(GrassmannElement, f64)> {
  let dropped: Vec<Edge> = edge_map.keys().copied().collect();
  let target = without_edges(i.registry(), &dropped)?;
  let rename = |g: &Generator| match *g {
    Generator::Edge { edge, starred } => Generator::Edge { edge: edge_map.get(&edge).copied().unwrap_or(edge), starred },
    other => other,
  };
  let full: u128 = gamma
    .e_gamma
    .iter()
    .flat_map(|&e| [Generator::a(e), Generator::a_star(e)])
    .map(|g| target.index(&g).map(|j| 1u128 << j).ok_or(Error::RegistryMismatch))
    .collect::<Result<Vec<_>>>()?
    .into_iter()
    .fold(0, |a, b| a | b);
  let mut substituted = GrassmannElement::zero(&target);
  let mut scale = 0.0;
  for (mask, c) in i.terms() {
    let idx: Vec<usize> =
      i.generators_of(mask).iter().map(|g| target.index(&rename(g)).ok_or(Error::RegistryMismatch)).collect::<Result<_>>()?;
    if let Some((m, s)) = ordered_product(&idx) {
      if m & full == full {
        scale += c.abs();
      }
      substituted.add_term(m, s * c);
    }
  }
  let pre = gamma.prefactor().to_f64();
  let integrated = substituted.integrate_edges(&gamma.e_gamma);
  let rest = without_edges(&target, &gamma.e_gamma)?;
  Ok((integrated.restrict(&rest)?.scale(pre), scale * pre.abs()))
}

/// Composed and direct generating functions of a two-manifold gluing.
#[derive(Clone, Debug)]
pub struct GluingReport {
  pub composed: GrassmannElement,
  pub direct: GrassmannElement,
  /// max |composed − direct| / max |direct|
  pub error_same_sign: f64,
  /// max |composed + direct| / max |direct|
  pub error_flipped: f64,
}

impl GluingReport {
  /// +1 or −1, whichever sign relates composed to direct more closely.
  pub fn sign(&self) -> f64 {
    if self.error_same_sign <= self.error_flipped {
      1.0
    } else {
      -1.0
    }
  }

  pub fn error(&self) -> f64 { self.error_same_sign.min(self.error_flipped) }
}

fn relative_difference(a: &GrassmannElement, b: &GrassmannElement) -> Result<f64> {
  let scale = b.max_abs();
  let d = a.sub(b)?.max_abs();
  Ok(if scale == 0.0 { d } else { d / scale })
}

/// Surface rigid constructions of `t` with component `k` forced to `edges`.
fn surface_rcs_with(t: &Triangulation, p: &Placement, k: usize, edges: &[Edge]) -> Result<Vec<Vec<usize>>> {
  (0..t.num_boundary_components())
    .map(|j| {
      if j == k {
        edges.iter().map(|e| t.edge_id(e).ok_or(Error::EdgeNotEligible(*e))).collect()
      } else {
        Ok(rigid_construction_surface(t, j, p)?.edges)
      }
    })
    .collect()
}

/// Evaluates both sides of the composition law for gluing `m2` to `m1`.
pub fn check_gluing(m1: &Triangulation, p1: &Placement, m2: &Triangulation, p2: &Placement, map: &GluingMap) -> Result<GluingReport> {
  let glued = glue(m1, p1, m2, p2, map)?;
  let k1 = map.component1;
  let rc = rigid_construction_surface(m1, k1, p1)?;
  let gamma = GammaData::new(m1, k1, p1, &rc)?;
  let opts1 = PlanOptions {
    frame: Some(FrameChoice::Sway(k1)),
    interior_rc: None,
    surface_rcs: Some(surface_rcs_with(m1, p1, k1, &gamma.rc_edges)?),
  };
  let v = gamma.rc_edges.first().map(|e| e.0).or_else(|| m1.boundary_components()[k1].vertices.first().copied());
  let k2 = v.and_then(|v| glued.m2.component_of_vertex(v)).ok_or_else(|| Error::IncompatibleBoundary("empty surface".into()))?;
  let opts2 = PlanOptions {
    frame: Some(FrameChoice::Sway(k2)),
    interior_rc: None,
    surface_rcs: Some(surface_rcs_with(&glued.m2, &glued.p2, k2, &gamma.rc_edges)?),
  };
  let i1 = generating_invariant(m1, p1, &opts1)?;
  let i2 = generating_invariant(&glued.m2, &glued.p2, &opts2)?;
  let composed = compose_invariants(&i1.element, &i2.element, &gamma)?;
  let direct = generating_invariant(&glued.manifold, &glued.placement, &PlanOptions::default())?.element;
  let composed = composed.embed(direct.registry()).or_else(|_| composed.restrict(direct.registry()))?;
  Ok(GluingReport {
    error_same_sign: relative_difference(&composed, &direct)?,
    error_flipped: relative_difference(&composed.scale(-1.0), &direct)?,
    composed,
    direct,
  })
}

/// Both zero statements for a self-gluing.
#[derive(Clone, Debug)]
pub struct SelfGluingReport {
  pub composed: GrassmannElement,
  /// Σ |contributions| to the composed value.
  pub scale: f64,
  /// 𝐈 of the glued manifold computed directly.
  pub direct: GrassmannElement,
  /// prefactor times the pseudo-determinant of the f̃3 block.
  pub direct_scale: f64,
  /// (size, numerical rank) of the glued manifold's f3 block on ℰ_inner.
  pub f3_rank: (usize, usize),
}

pub fn check_self_gluing(m: &Triangulation, p: &Placement, map: &GluingMap) -> Result<SelfGluingReport> {
  let sg = self_glue(m, p, map)?;
  let k1 = map.component1;
  let rc = rigid_construction_surface(m, k1, p)?;
  let gamma = GammaData::new(m, k1, p, &rc)?;
  let inv: HashMap<Edge, Edge> = sg.edge_map.iter().map(|(a, b)| (*b, *a)).collect();
  let image: Vec<Edge> = gamma.rc_edges.iter().map(|e| inv[e]).collect();
  let mut rcs: Vec<Vec<usize>> = Vec::new();
  for j in 0..m.num_boundary_components() {
    rcs.push(if j == k1 {
      rc.edges.clone()
    } else if j == map.component2 {
      image.iter().map(|e| m.edge_id(e).expect("edge")).collect()
    } else {
      rigid_construction_surface(m, j, p)?.edges
    });
  }
  let opts = PlanOptions { frame: Some(FrameChoice::Sway(k1)), interior_rc: None, surface_rcs: Some(rcs) };
  let i = generating_invariant(m, p, &opts)?;
  let (composed, scale) = self_glue_compose(&i.element, &gamma, &sg.edge_map)?;

  let d = generating_invariant(&sg.manifold, &sg.placement, &PlanOptions::default())?;
  let cache = crate::geometry::MetricCache::new(&sg.manifold, &sg.placement)?;
  let full = cache.angle_length_matrix(sg.manifold.edges().len());
  let inner: Vec<usize> = d.inner.iter().map(|e| sg.manifold.edge_id(e).expect("edge")).collect();
  let block = submatrix(&full, &inner, &inner);
  let rank = crate::linalg::numerical_rank(&block, RANK_RTOL);
  let pseudo_det = crate::linalg::singular_values(&block)
    .into_iter()
    .take(rank)
    .fold(LogScalar::ONE, |acc, s| acc.mul(LogScalar::from_f64(s)));
  let direct_scale = d.prefactor.mul(pseudo_det).to_f64().abs();
  Ok(SelfGluingReport { composed, scale, direct: d.element, direct_scale, f3_rank: (inner.len(), rank) })
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::triangulation::{builtin, ManifoldName};

  #[test]
  fn map_json_round_trip() {
    let m = GluingMap { component1: 0, component2: 1, pairs: vec![(0, 12), (1, 13)] };
    assert_eq!(GluingMap::from_json(&m.to_json()).unwrap(), m);
    let bare = GluingMap::from_json("{\"pairs\": [[1, 2]]}").unwrap();
    assert_eq!(bare.component1, 0);
    assert!(GluingMap::from_json("[[1,2],").is_err());
  }

  #[test]
  fn kabsch_recovers_motion() {
    let pts: Vec<Point> = vec![[0.0, 0.0, 0.0], [1.0, 0.2, 0.0], [0.3, 1.0, 0.1], [0.2, 0.4, 0.9]];
    let r = nalgebra::Rotation3::from_euler_angles(0.3, -0.2, 1.1);
    let moved: Vec<Point> = pts
      .iter()
      .map(|x| {
        let y = r * Vector3::new(x[0], x[1], x[2]) + Vector3::new(0.5, -1.0, 2.0);
        [y.x, y.y, y.z]
      })
      .collect();
    let (_, _, rms) = kabsch(&pts, &moved);
    assert!(rms < 1e-12);
  }

  #[test]
  fn sphere_surface_torsion_nonzero_and_exact() {
    let t = builtin(ManifoldName::B3);
    for seed in 0..5 {
      let p = random_placement(&t, seed).unwrap();
      let rc = rigid_construction_surface(&t, 0, &p).unwrap();
      let s = surface_torsion(&t, 0, &p, &rc).unwrap();
      assert!(!s.tau.is_zero());
      let r = crate::linalg::norm(&(&s.g2 * &s.g1)) / (crate::linalg::norm(&s.g2) * crate::linalg::norm(&s.g1));
      assert!(r < 1e-12);
    }
  }

  #[test]
  fn placement_mismatch_detected() {
    let t = builtin(ManifoldName::B3);
    let p1 = random_placement(&t, 1).unwrap();
    let p2 = random_placement(&t, 2).unwrap();
    let map = GluingMap { component1: 0, component2: 0, pairs: (0..4).map(|v| (v, v)).collect() };
    let r = t.reversed();
    assert!(matches!(glue(&t, &p1, &r, &p2, &map), Err(Error::PlacementMismatch(_))));
  }

  #[test]
  fn orientation_preserving_map_rejected() {
    let t = builtin(ManifoldName::B3);
    let p = random_placement(&t, 1).unwrap();
    let map = GluingMap { component1: 0, component2: 0, pairs: (0..4).map(|v| (v, v)).collect() };
    assert!(matches!(glue(&t, &p, &t, &p, &map), Err(Error::IncompatibleBoundary(_))));
  }
}
