//! Chain complexes of a placed triangulation, their torsion and the scalar
//! invariants built from it.
//!
//! Spaces, left to right: 𝔢(3) → dx → dl → (dω, dα) → dx* → 𝔢(3)*. In the
//! boundary case dx is the inner-vertex coordinates plus one sway per boundary
//! component, dl runs over inner edges then 𝒞, and (dω, dα) over inner edges
//! then 𝒟.

pub mod labels;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use labels::{ConfigSpace, DualLabel, Label, LabeledMatrix};

use crate::error::{Error, Result};
use crate::geometry::{perturbed_barycenter, random_placement, reseed_interior, MetricCache, Placement};
use crate::linalg::{log_det, norm, relative_conditioning, LogScalar, RANK_RTOL};
use crate::rigidity::{boundary_rigid_constructions, RigidConstruction, RigidContext};
use crate::triangulation::{Edge, PachnerMove, Triangulation, VertexId};

/// Number of placements on which a singular f3 minor must recur before the
/// complex is declared non-acyclic.
pub const STRUCTURAL_ZERO_SEEDS: u64 = 3;
const RESEED_STRIDE: u64 = 0x9E37_79B9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
  Closed,
  Boundary,
}

/// Six coordinates of dx dropped from the f2 minor (and kept in the f1 minor).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameChoice {
  /// dx_A, dy_A, dz_A, dy_B, dz_B, dz_C.
  InnerVertices([VertexId; 3]),
  /// All six sway parameters of one boundary component.
  Sway(usize),
}

impl FrameChoice {
  pub fn labels(&self) -> Vec<Label> {
    match *self {
      FrameChoice::InnerVertices([a, b, c]) => vec![
        Label::Coord(a, 0),
        Label::Coord(a, 1),
        Label::Coord(a, 2),
        Label::Coord(b, 1),
        Label::Coord(b, 2),
        Label::Coord(c, 2),
      ],
      FrameChoice::Sway(k) => (0..6).map(|g| Label::Sway(k, g)).collect(),
    }
  }
}

/// Rows and columns of the five minors entering the torsion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorPlan {
  pub frame: FrameChoice,
  /// Interior rigid construction (edge ids).
  pub rigid: Vec<usize>,
  /// Inner edges outside the rigid construction, ascending.
  pub inner: Vec<usize>,
  pub c: Vec<usize>,
  pub d: Vec<usize>,
  pub rows: [Vec<Label>; 5],
  pub cols: [Vec<Label>; 5],
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
  pub f: [LabeledMatrix; 5],
  pub mode: Mode,
  pub plan: MinorPlan,
}

/// Minor determinants and the conditioning of each minor.
#[derive(Clone, Copy, Debug)]
pub struct Minors {
  pub det: [LogScalar; 5],
  pub conditioning: [f64; 5],
}

/// Optional overrides for the choices a plan makes by default.
#[derive(Clone, Debug, Default)]
pub struct PlanOptions {
  pub frame: Option<FrameChoice>,
  pub interior_rc: Option<Vec<usize>>,
  /// One edge list per boundary component.
  pub surface_rcs: Option<Vec<Vec<usize>>>,
}

fn length_label(t: &Triangulation, e: usize) -> Label { Label::Length(t.edges()[e]) }

fn angle_label(t: &Triangulation, e: usize) -> Label {
  if t.is_boundary_edge(e) {
    Label::Alpha(t.edges()[e])
  } else {
    Label::Deficit(t.edges()[e])
  }
}

/// Default frame: the three lowest-id inner vertices that are not collinear,
/// falling back to the sways of component 0 when fewer inner vertices exist.
pub fn default_frame(t: &Triangulation, p: &Placement) -> Result<FrameChoice> {
  let inner = t.inner_vertices();
  if inner.len() >= 3 {
    let a = p.point(inner[0])?;
    let b = p.point(inner[1])?;
    let scale = (b - a).norm();
    for &c in &inner[2..] {
      let x = p.point(c)?;
      let area = (b - a).cross(&(x - a)).norm();
      if area > RANK_RTOL * scale * (x - a).norm() {
        return Ok(FrameChoice::InnerVertices([inner[0], inner[1], c]));
      }
    }
    return Err(Error::DegenerateGeometry("all inner vertices are collinear".into()));
  }
  if t.num_boundary_components() > 0 {
    return Ok(FrameChoice::Sway(0));
  }
  Err(Error::MissingInnerVertices(inner.len()))
}

/// Applies 1→4 moves at the lexicographically smallest tetrahedron until at
/// least three inner vertices exist; new vertices go to perturbed barycenters.
pub fn ensure_inner_vertices(
  t: &Triangulation,
  p: &Placement,
  seed: u64,
) -> Result<(Triangulation, Placement, Vec<PachnerMove>)> {
  let mut t = t.clone();
  let mut p = p.clone();
  let mut moves = Vec::new();
  let mut fresh = t.vertices().iter().max().map_or(0, |v| v + 1);
  while t.inner_vertices().len() < 3 {
    let tuple = *t.tetrahedra().iter().min_by_key(|x| {
      let mut s = **x;
      s.sort_unstable();
      s
    }).ok_or_else(|| Error::InvalidInput("empty triangulation".into()))?;
    let x = perturbed_barycenter(&p, &tuple, seed.wrapping_add(fresh as u64))?;
    let mv = PachnerMove::OneFour { tetrahedron: tuple, new_vertex: fresh };
    t = t.apply_pachner(&mv)?;
    p = p.with_vertex(fresh, x);
    moves.push(mv);
    fresh += 1;
  }
  Ok((t, p, moves))
}

/// Edge ids allowed in 𝒞 and 𝒟: boundary edges outside every surface rigid construction.
pub fn eligible_edges(t: &Triangulation, p: &Placement, surface_rcs: Option<&[Vec<usize>]>) -> Result<Vec<usize>> {
  let mut out = Vec::new();
  match surface_rcs {
    Some(rcs) => {
      if rcs.len() != t.num_boundary_components() {
        return Err(Error::InvalidInput("one surface rigid construction per boundary component".into()));
      }
      for (k, edges) in rcs.iter().enumerate() {
        out.extend(RigidConstruction::from_edges(t, p, RigidContext::Surface(k), edges)?.complement);
      }
    }
    None => {
      for rc in boundary_rigid_constructions(t, p)? {
        out.extend(rc.complement);
      }
    }
  }
  out.sort_unstable();
  Ok(out)
}

fn check_boundary_sets(t: &Triangulation, eligible: &[usize], c: &[usize], d: &[usize]) -> Result<()> {
  if c.len() != d.len() {
    return Err(Error::UnequalEdgeSets(c.len(), d.len()));
  }
  for set in [c, d] {
    let mut seen = std::collections::HashSet::new();
    for &e in set {
      if eligible.binary_search(&e).is_err() || !seen.insert(e) {
        return Err(Error::EdgeNotEligible(t.edges()[e]));
      }
    }
  }
  Ok(())
}

/// Assembles f1…f5 and the minor plan. `c` and `d` must be empty for closed manifolds.
pub fn build_complex(
  t: &Triangulation,
  p: &Placement,
  cache: &MetricCache,
  rc: &RigidConstruction,
  frame: FrameChoice,
  c: &[usize],
  d: &[usize],
) -> Result<ChainComplex> {
  let mode = if t.is_closed() { Mode::Closed } else { Mode::Boundary };
  if rc.context != RigidContext::Interior {
    return Err(Error::InvalidInput("the complex needs an interior rigid construction".into()));
  }
  if mode == Mode::Closed && !(c.is_empty() && d.is_empty()) {
    return Err(Error::NotApplicable("closed manifolds have no boundary edge sets".into()));
  }
  if let FrameChoice::InnerVertices(abc) = frame {
    let inner = t.inner_vertices();
    if let Some(v) = abc.iter().find(|v| !inner.contains(v)) {
      return Err(Error::InvalidInput(format!("frame vertex {v} is not inner")));
    }
  }
  if let FrameChoice::Sway(k) = frame {
    if k >= t.num_boundary_components() {
      return Err(Error::InvalidInput(format!("no boundary component {k}")));
    }
  }
  let space = ConfigSpace::interior(t);
  let x_labels = space.labels.clone();
  let inner_edges = t.inner_edges();

  let f1 = LabeledMatrix::new(space.motion_matrix(p)?, x_labels.clone(), (0..6).map(Label::Motion).collect());

  let f2_for = |set: &[usize]| -> Result<LabeledMatrix> {
    let edges: Vec<usize> = inner_edges.iter().chain(set).copied().collect();
    let mut m = DMatrix::zeros(edges.len(), space.dim());
    for (i, &e) in edges.iter().enumerate() {
      // boundary edges keep their length under sways: dl = 0 exactly
      if !t.is_boundary_edge(e) {
        m.set_row(i, &space.length_row(p, &t.edges()[e])?.transpose());
      }
    }
    Ok(LabeledMatrix::new(m, edges.iter().map(|&e| length_label(t, e)).collect(), x_labels.clone()))
  };
  let f2 = f2_for(c)?;
  let f2d = f2_for(d)?;

  let full = cache.angle_length_matrix(t.edges().len());
  let rows3: Vec<usize> = inner_edges.iter().chain(d).copied().collect();
  let cols3: Vec<usize> = inner_edges.iter().chain(c).copied().collect();
  let f3 = LabeledMatrix::new(
    crate::linalg::submatrix(&full, &rows3, &cols3),
    rows3.iter().map(|&e| angle_label(t, e)).collect(),
    cols3.iter().map(|&e| length_label(t, e)).collect(),
  );

  let dual_x: Vec<Label> = x_labels.iter().map(|l| l.dual()).collect();
  let f4 = LabeledMatrix::new(
    -f2d.entries.transpose(),
    dual_x.clone(),
    rows3.iter().map(|&e| angle_label(t, e)).collect(),
  );
  let f5 = LabeledMatrix::new(f1.entries.transpose(), (0..6).map(|i| Label::Motion(i).dual()).collect(), dual_x);

  let frame_labels = frame.labels();
  let free: Vec<Label> = x_labels.iter().filter(|l| !frame_labels.contains(l)).copied().collect();
  let complement: Vec<usize> = rc.complement.clone();
  let rigid_len: Vec<Label> = rc.edges.iter().map(|&e| length_label(t, e)).collect();
  let rigid_ang: Vec<Label> = rc.edges.iter().map(|&e| angle_label(t, e)).collect();
  let rows = [
    frame_labels.clone(),
    rigid_len.clone(),
    complement.iter().chain(d).map(|&e| angle_label(t, e)).collect(),
    free.iter().map(|l| l.dual()).collect(),
    (0..6).map(|i| Label::Motion(i).dual()).collect(),
  ];
  let cols = [
    (0..6).map(Label::Motion).collect(),
    free,
    complement.iter().chain(c).map(|&e| length_label(t, e)).collect(),
    rigid_ang,
    frame_labels.iter().map(|l| l.dual()).collect(),
  ];
  let plan = MinorPlan { frame, rigid: rc.edges.clone(), inner: complement, c: c.to_vec(), d: d.to_vec(), rows, cols };
  Ok(ChainComplex { f: [f1, f2, f3, f4, f5], mode, plan })
}

impl ChainComplex {
  /// ‖f_{k+1}·f_k‖ / (‖f_{k+1}‖·‖f_k‖) for k = 1..4 (0 when an operand vanishes).
  pub fn composition_residuals(&self) -> [f64; 4] {
    std::array::from_fn(|k| {
      let (a, b) = (&self.f[k + 1].entries, &self.f[k].entries);
      let scale = norm(a) * norm(b);
      if scale == 0.0 {
        0.0
      } else {
        norm(&(a * b)) / scale
      }
    })
  }

  pub fn minor_matrix(&self, k: usize) -> DMatrix<f64> { self.f[k].select(&self.plan.rows[k], &self.plan.cols[k]) }

  pub fn minors(&self) -> Minors {
    let mut det = [LogScalar::ONE; 5];
    let mut conditioning = [1.0; 5];
    for k in 0..5 {
      let m = self.minor_matrix(k);
      det[k] = log_det(&m);
      conditioning[k] = relative_conditioning(&m);
    }
    Minors { det, conditioning }
  }

  /// max |f3_ij − f3_ji| over the square block shared by rows and columns,
  /// relative to ‖f3‖.
  pub fn f3_asymmetry(&self) -> f64 {
    let f3 = &self.f[2];
    let n = norm(&f3.entries);
    let mut worst: f64 = 0.0;
    for (i, r) in f3.rows.iter().enumerate() {
      let Label::Deficit(e) = r else { continue };
      let Some(j) = f3.col_index(&Label::Length(*e)) else { continue };
      for (i2, r2) in f3.rows.iter().enumerate() {
        let Label::Deficit(e2) = r2 else { continue };
        let Some(j2) = f3.col_index(&Label::Length(*e2)) else { continue };
        worst = worst.max((f3.entries[(i, j2)] - f3.entries[(i2, j)]).abs());
      }
    }
    if n == 0.0 {
      0.0
    } else {
      worst / n
    }
  }
}

/// τ = minor f1 · minor f3 · minor f5 / (minor f2 · minor f4), or 0 when the
/// f3 minor is numerically singular.
pub fn torsion(c: &ChainComplex) -> Result<LogScalar> {
  let m = c.minors();
  torsion_from(&m)
}

fn torsion_from(m: &Minors) -> Result<LogScalar> {
  for k in [0, 1, 3, 4] {
    if m.conditioning[k] < RANK_RTOL || m.det[k].is_zero() {
      const NAMES: [&str; 5] = ["f1", "f2", "f3", "f4", "f5"];
      return Err(Error::SingularPlanMinor { matrix: NAMES[k], relative: m.conditioning[k] });
    }
  }
  if m.conditioning[2] < RANK_RTOL {
    return Ok(LogScalar::ZERO);
  }
  Ok(m.det[0].mul(m.det[2]).mul(m.det[4]).div(m.det[1].mul(m.det[3])))
}

/// ∏(−6V) over tetrahedra divided by ∏ l² over inner edges (all edges when closed).
pub fn geometric_factor(t: &Triangulation, cache: &MetricCache) -> LogScalar {
  let mut acc = LogScalar::ONE;
  for v in &cache.volumes {
    acc = acc.mul(LogScalar::from_f64(-6.0 * v));
  }
  for e in t.inner_edges() {
    acc = acc.div(LogScalar::from_f64(cache.lengths[e]).powi(2));
  }
  acc
}

/// One evaluation of a scalar invariant with its intermediate data.
#[derive(Clone, Debug)]
pub struct Evaluation {
  pub value: LogScalar,
  pub torsion: LogScalar,
  pub minors: Minors,
  pub plan: MinorPlan,
  pub residuals: [f64; 4],
}

impl Evaluation {
  pub fn f64(&self) -> f64 { self.value.to_f64() }

  pub fn f3_singular(&self) -> bool { self.minors.conditioning[2] < RANK_RTOL }
}

/// Evaluates τ·∏(−6V)/∏l² on one placement, without structural-zero retries.
pub fn evaluate(
  t: &Triangulation,
  p: &Placement,
  c: &[Edge],
  d: &[Edge],
  opts: &PlanOptions,
) -> Result<Evaluation> {
  let to_ids = |set: &[Edge]| -> Result<Vec<usize>> {
    set.iter().map(|e| t.edge_id(e).ok_or(Error::EdgeNotEligible(*e))).collect()
  };
  let (c, d) = (to_ids(c)?, to_ids(d)?);
  if !t.is_closed() || !(c.is_empty() && d.is_empty()) {
    let eligible = eligible_edges(t, p, opts.surface_rcs.as_deref())?;
    check_boundary_sets(t, &eligible, &c, &d)?;
  }
  let cache = MetricCache::new(t, p)?;
  let frame = match opts.frame {
    Some(f) => f,
    None => default_frame(t, p)?,
  };
  let rc = match &opts.interior_rc {
    Some(edges) => RigidConstruction::from_edges(t, p, RigidContext::Interior, edges)?,
    None => RigidConstruction::greedy_in_order(t, p, RigidContext::Interior, &t.inner_edges())?,
  };
  let cx = build_complex(t, p, &cache, &rc, frame, &c, &d)?;
  let minors = cx.minors();
  let tau = torsion_from(&minors)?;
  Ok(Evaluation {
    value: tau.mul(geometric_factor(t, &cache)),
    torsion: tau,
    minors,
    residuals: cx.composition_residuals(),
    plan: cx.plan,
  })
}

/// Evaluation that declares the complex non-acyclic only when the f3 minor is
/// singular on this placement and on the further reseeded ones.
pub fn evaluate_robust(
  t: &Triangulation,
  p: &Placement,
  c: &[Edge],
  d: &[Edge],
  opts: &PlanOptions,
) -> Result<Evaluation> {
  let first = evaluate(t, p, c, d, opts)?;
  if !first.f3_singular() {
    return Ok(first);
  }
  for k in 1..STRUCTURAL_ZERO_SEEDS {
    let seed = p.seed.wrapping_add(k * RESEED_STRIDE);
    let q = if t.is_closed() { random_placement(t, seed)? } else { reseed_interior(t, p, seed)? };
    let e = evaluate(t, &q, c, d, opts)?;
    if !e.f3_singular() {
      return Err(Error::SingularPlanMinor { matrix: "f3", relative: first.minors.conditioning[2] });
    }
  }
  Ok(first)
}

/// Scalar invariant of a closed manifold.
pub fn invariant_closed(t: &Triangulation, p: &Placement) -> Result<f64> {
  if !t.is_closed() {
    return Err(Error::NotApplicable("manifold has boundary".into()));
  }
  Ok(evaluate_robust(t, p, &[], &[], &PlanOptions::default())?.f64())
}

/// Scalar invariant for ordered boundary edge sets 𝒞 (dl side) and 𝒟 (dα side).
pub fn invariant_boundary(t: &Triangulation, p: &Placement, c: &[Edge], d: &[Edge]) -> Result<f64> {
  if t.is_closed() {
    return Err(Error::NotApplicable("manifold is closed".into()));
  }
  Ok(evaluate_robust(t, p, c, d, &PlanOptions::default())?.f64())
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::triangulation::{builtin, ManifoldName};

  fn placed(name: ManifoldName, seed: u64) -> (Triangulation, Placement) {
    let t = builtin(name);
    let p = random_placement(&t, seed).unwrap();
    (t, p)
  }

  fn complex_of(t: &Triangulation, p: &Placement) -> ChainComplex {
    let cache = MetricCache::new(t, p).unwrap();
    let rc = RigidConstruction::greedy_in_order(t, p, RigidContext::Interior, &t.inner_edges()).unwrap();
    build_complex(t, p, &cache, &rc, default_frame(t, p).unwrap(), &[], &[]).unwrap()
  }

  #[test]
  fn compositions_vanish_on_builtins() {
    for name in ManifoldName::ALL {
      let (t, p) = placed(name, 4);
      let r = complex_of(&t, &p).composition_residuals();
      assert!(r.iter().all(|&x| x <= 1e-8), "{name}: {r:?}");
    }
  }

  #[test]
  fn mirror_structure() {
    let (t, p) = placed(ManifoldName::SolidTorus, 1);
    let cx = complex_of(&t, &p);
    assert_eq!(cx.f[4].entries, cx.f[0].entries.transpose());
    assert_eq!(cx.f[3].entries, -cx.f[1].entries.transpose());
    let sway = cx.f[0].select(&FrameChoice::Sway(0).labels(), &(0..6).map(Label::Motion).collect::<Vec<_>>());
    assert_eq!(sway, DMatrix::identity(6, 6));
  }

  #[test]
  fn minors_are_square() {
    let (t, p) = placed(ManifoldName::T2xI, 2);
    let cx = complex_of(&t, &p);
    for k in 0..5 {
      assert_eq!(cx.plan.rows[k].len(), cx.plan.cols[k].len(), "minor {k}");
    }
  }

  #[test]
  fn closed_sphere_is_seed_independent() {
    let (t, p) = placed(ManifoldName::S3, 0);
    let base = invariant_closed(&t, &p).unwrap();
    assert!(base != 0.0);
    for seed in 1..4 {
      let v = invariant_closed(&t, &random_placement(&t, seed).unwrap()).unwrap();
      assert!(((v - base) / base).abs() < 1e-6, "{v} vs {base}");
    }
  }

  #[test]
  fn single_tetrahedron_is_minus_six_volume() {
    let (t, p) = placed(ManifoldName::B3, 3);
    let v = invariant_boundary(&t, &p, &[], &[]).unwrap();
    let six = p.six_volume(&t.oriented_tetrahedron(0)).unwrap();
    assert!((v + six).abs() < 1e-12 * six.abs());
  }

  #[test]
  fn frames_agree_on_subdivided_ball() {
    let (t, p) = placed(ManifoldName::B3, 3);
    let (t2, p2, moves) = ensure_inner_vertices(&t, &p, 3).unwrap();
    assert_eq!(moves.len(), 3);
    let direct = invariant_boundary(&t, &p, &[], &[]).unwrap();
    let inner = evaluate(&t2, &p2, &[], &[], &PlanOptions::default()).unwrap();
    assert!(matches!(inner.plan.frame, FrameChoice::InnerVertices(_)));
    let sway = evaluate(&t2, &p2, &[], &[], &PlanOptions { frame: Some(FrameChoice::Sway(0)), ..Default::default() })
      .unwrap();
    assert!((inner.f64() - direct).abs() < 1e-8 * direct.abs(), "{} vs {direct}", inner.f64());
    assert!((sway.f64() - direct).abs() < 1e-8 * direct.abs());
  }

  #[test]
  fn swapping_c_entries_flips_sign() {
    let (t, p) = placed(ManifoldName::SolidTorus, 5);
    let el = eligible_edges(&t, &p, None).unwrap();
    let e: Vec<Edge> = el.iter().map(|&i| t.edges()[i]).collect();
    let v = invariant_boundary(&t, &p, &[e[0], e[1]], &[e[2], e[3]]).unwrap();
    let w = invariant_boundary(&t, &p, &[e[1], e[0]], &[e[2], e[3]]).unwrap();
    let x = invariant_boundary(&t, &p, &[e[0], e[1]], &[e[3], e[2]]).unwrap();
    assert!(v != 0.0);
    assert!((v + w).abs() < 1e-10 * v.abs());
    assert!((v + x).abs() < 1e-10 * v.abs());
  }

  #[test]
  fn ineligible_edges_rejected() {
    let (t, p) = placed(ManifoldName::B3, 0);
    let e = t.edges()[0];
    assert!(matches!(invariant_boundary(&t, &p, &[e], &[e]), Err(Error::EdgeNotEligible(_))));
    let (t, p) = placed(ManifoldName::SolidTorus, 0);
    let el = eligible_edges(&t, &p, None).unwrap();
    let e = t.edges()[el[0]];
    assert!(matches!(invariant_boundary(&t, &p, &[e], &[]), Err(Error::UnequalEdgeSets(1, 0))));
  }
}
