//! Euclidean placement of vertices and the metric quantities built on it:
//! edge lengths, oriented volumes, dihedral and deficit angles, and their
//! exact first derivatives.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::{Edge, Triangulation, VertexId, LOCAL_EDGES};

/// Smallest admissible |6V| for any tetrahedron of a placement.
pub const MIN_SIX_VOLUME: f64 = 1e-6;
/// Smallest admissible edge length.
pub const MIN_LENGTH: f64 = 1e-3;
/// Seeds tried by the placement samplers before giving up.
pub const MAX_PLACEMENT_ATTEMPTS: u32 = 64;

pub type Point = [f64; 3];

fn vec3(p: &Point) -> Vector3<f64> { Vector3::new(p[0], p[1], p[2]) }

/// Coordinates of every vertex. `seed` records the generator seed actually used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
  pub coords: BTreeMap<VertexId, Point>,
  pub seed: u64,
}

impl Placement {
  pub fn point(&self, v: VertexId) -> Result<Vector3<f64>> {
    self.coords.get(&v).map(vec3).ok_or(Error::MissingCoordinates(v))
  }

  pub fn with_vertex(&self, v: VertexId, x: Point) -> Placement {
    let mut p = self.clone();
    p.coords.insert(v, x);
    p
  }

  pub fn length(&self, e: &Edge) -> Result<f64> { Ok((self.point(e.0)? - self.point(e.1)?).norm()) }

  /// det(x1 - x0, x2 - x0, x3 - x0) for the tuple as given.
  pub fn six_volume(&self, tuple: &[VertexId; 4]) -> Result<f64> {
    let x0 = self.point(tuple[0])?;
    let a = self.point(tuple[1])? - x0;
    let b = self.point(tuple[2])? - x0;
    let c = self.point(tuple[3])? - x0;
    Ok(a.dot(&b.cross(&c)))
  }
}

/// Checks the general-position guard: every vertex placed, min |6V| and min
/// edge length above their thresholds.
pub fn check_general_position(t: &Triangulation, p: &Placement) -> Result<()> {
  for &v in t.vertices() {
    p.point(v)?;
  }
  for e in t.edges() {
    if p.length(e)? <= MIN_LENGTH {
      return Err(Error::ZeroLength(*e));
    }
  }
  for tet in t.tetrahedra() {
    let v6 = p.six_volume(tet)?;
    if v6.abs() <= MIN_SIX_VOLUME {
      return Err(Error::DegenerateTetrahedron(*tet, v6));
    }
  }
  Ok(())
}

fn sample_point(rng: &mut ChaCha8Rng) -> Point { [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()] }

/// Independent uniform coordinates in [0,1]³ from ChaCha8 seeded with `seed`;
/// on a guard failure the seed is advanced by one and the draw repeated.
pub fn random_placement(t: &Triangulation, seed: u64) -> Result<Placement> {
  for attempt in 0..MAX_PLACEMENT_ATTEMPTS {
    let s = seed.wrapping_add(attempt as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let coords = t.vertices().iter().map(|&v| (v, sample_point(&mut rng))).collect();
    let p = Placement { coords, seed: s };
    if check_general_position(t, &p).is_ok() {
      return Ok(p);
    }
  }
  Err(Error::GeneralPositionFailure { seed, attempts: MAX_PLACEMENT_ATTEMPTS })
}

/// Keeps the coordinates of boundary vertices from `base` and resamples the
/// inner vertices from `seed` (same retry rule as [`random_placement`]).
pub fn reseed_interior(t: &Triangulation, base: &Placement, seed: u64) -> Result<Placement> {
  for attempt in 0..MAX_PLACEMENT_ATTEMPTS {
    let s = seed.wrapping_add(attempt as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let mut coords = BTreeMap::new();
    for &v in t.vertices() {
      let x = sample_point(&mut rng);
      if t.is_boundary_vertex(v) {
        coords.insert(v, *base.coords.get(&v).ok_or(Error::MissingCoordinates(v))?);
      } else {
        coords.insert(v, x);
      }
    }
    let p = Placement { coords, seed: s };
    if check_general_position(t, &p).is_ok() {
      return Ok(p);
    }
  }
  Err(Error::GeneralPositionFailure { seed, attempts: MAX_PLACEMENT_ATTEMPTS })
}

/// Barycenter of the tetrahedron plus a deterministic perturbation of size
/// at most 10% of the mean coordinate spread.
pub fn perturbed_barycenter(p: &Placement, tuple: &[VertexId; 4], seed: u64) -> Result<Point> {
  let pts: Vec<Vector3<f64>> = tuple.iter().map(|&v| p.point(v)).collect::<Result<_>>()?;
  let bary = pts.iter().fold(Vector3::zeros(), |acc, x| acc + x) / 4.0;
  let spread = pts.iter().map(|x| (x - bary).norm()).sum::<f64>() / 4.0;
  let mut rng = ChaCha8Rng::seed_from_u64(seed);
  let jitter = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
  let x = bary + jitter * (0.1 * spread);
  Ok([x.x, x.y, x.z])
}

/// Element of 𝔢(3): infinitesimal translation `(tx,ty,tz)` followed by
/// rotation `(rx,ry,rz)` about the coordinate origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionGenerator(pub [f64; 6]);

impl MotionGenerator {
  pub fn basis(k: usize) -> Self {
    let mut g = [0.0; 6];
    g[k] = 1.0;
    MotionGenerator(g)
  }

  /// Velocity `t + r × x` of the point `x`.
  pub fn velocity(&self, x: &Point) -> Point {
    let t = Vector3::new(self.0[0], self.0[1], self.0[2]);
    let r = Vector3::new(self.0[3], self.0[4], self.0[5]);
    let v = t + r.cross(&vec3(x));
    [v.x, v.y, v.z]
  }
}

/// Row of ∂l/∂(coordinates) for an edge: gradient with respect to the first
/// endpoint, then the second (which is its negative).
pub fn d_length_d_coords(e: &Edge, p: &Placement) -> Result<[(VertexId, Point); 2]> {
  let d = p.point(e.0)? - p.point(e.1)?;
  let l = d.norm();
  if l == 0.0 {
    return Err(Error::ZeroLength(*e));
  }
  let u = d / l;
  Ok([(e.0, [u.x, u.y, u.z]), (e.1, [-u.x, -u.y, -u.z])])
}

/// Dihedral angle in (0, π) at local edge `k` of the tetrahedron with vertex positions `x`.
pub fn dihedral_angle(x: &[Point; 4], k: usize) -> f64 {
  let (a, b) = LOCAL_EDGES[k];
  let (c, d) = LOCAL_EDGES[5 - k];
  let pa = vec3(&x[a]);
  let e = (vec3(&x[b]) - pa).normalize();
  let mut u = vec3(&x[c]) - pa;
  u -= e * e.dot(&u);
  let mut w = vec3(&x[d]) - pa;
  w -= e * e.dot(&w);
  u.cross(&w).norm().atan2(u.dot(&w))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
  m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn minor4(m: &[[f64; 5]; 5], r: usize, c: usize) -> [[f64; 4]; 4] {
  let mut out = [[0.0; 4]; 4];
  for (i, ri) in (0..5).filter(|&i| i != r).enumerate() {
    for (j, cj) in (0..5).filter(|&j| j != c).enumerate() {
      out[i][j] = m[ri][cj];
    }
  }
  out
}

fn minor3(m: &[[f64; 4]; 4], r: usize, c: usize) -> [[f64; 3]; 3] {
  let mut out = [[0.0; 3]; 3];
  for (i, ri) in (0..4).filter(|&i| i != r).enumerate() {
    for (j, cj) in (0..4).filter(|&j| j != c).enumerate() {
      out[i][j] = m[ri][cj];
    }
  }
  out
}

fn sgn(i: usize) -> f64 {
  if i % 2 == 0 {
    1.0
  } else {
    -1.0
  }
}

fn det4(m: &[[f64; 4]; 4]) -> f64 { (0..4).map(|j| sgn(j) * m[0][j] * det3(&minor3(m, 0, j))).sum() }

/// Cayley–Menger matrix of a tetrahedron: border of ones, squared lengths inside.
fn cayley_menger(q: &[f64; 6]) -> [[f64; 5]; 5] {
  let mut m = [[1.0; 5]; 5];
  m[0][0] = 0.0;
  for i in 1..5 {
    m[i][i] = 0.0;
  }
  for (k, (a, b)) in LOCAL_EDGES.iter().enumerate() {
    m[a + 1][b + 1] = q[k];
    m[b + 1][a + 1] = q[k];
  }
  m
}

fn cofactor(m: &[[f64; 5]; 5], r: usize, c: usize) -> f64 { sgn(r + c) * det4(&minor4(m, r, c)) }

/// ∂ cofactor(r, c) / ∂ q_k, where q_k occupies the two symmetric slots of local edge k.
fn d_cofactor(m: &[[f64; 5]; 5], r: usize, c: usize, k: usize) -> f64 {
  let n = minor4(m, r, c);
  let (a, b) = LOCAL_EDGES[k];
  let mut total = 0.0;
  for (i, j) in [(a + 1, b + 1), (b + 1, a + 1)] {
    if i == r || j == c {
      continue;
    }
    let ii = if i > r { i - 1 } else { i };
    let jj = if j > c { j - 1 } else { j };
    total += sgn(ii + jj) * det3(&minor3(&n, ii, jj));
  }
  sgn(r + c) * total
}

/// Dihedral angles of a tetrahedron as functions of its six edge lengths
/// (local edge order [`LOCAL_EDGES`]), from the Cayley–Menger cofactors:
/// cos θ_ab = C_cd / √(C_cc C_dd) with {c, d} the opposite edge.
pub fn dihedral_angles_from_lengths(l: &[f64; 6]) -> Result<[f64; 6]> {
  Ok(tetra_angle_data(l)?.0)
}

/// Exact Jacobian `J[a][b] = ∂θ_a/∂l_b` of the dihedral angles of one
/// tetrahedron with respect to its edge lengths.
pub fn dihedral_length_jacobian(l: &[f64; 6]) -> Result<[[f64; 6]; 6]> { Ok(tetra_angle_data(l)?.1) }

fn tetra_angle_data(l: &[f64; 6]) -> Result<([f64; 6], [[f64; 6]; 6])> {
  let q = l.map(|x| x * x);
  let m = cayley_menger(&q);
  let cm_det: f64 = (0..5).map(|j| m[0][j] * cofactor(&m, 0, j)).sum();
  if cm_det <= 0.0 {
    return Err(Error::DegenerateGeometry(format!("edge lengths {l:?} do not span a tetrahedron")));
  }
  let volume = (cm_det / 288.0).sqrt();
  let mut angles = [0.0; 6];
  let mut jac = [[0.0; 6]; 6];
  for k in 0..6 {
    let (c, d) = LOCAL_EDGES[5 - k];
    let (rc, rd) = (c + 1, d + 1);
    let ccd = cofactor(&m, rc, rd);
    let ccc = cofactor(&m, rc, rc);
    let cdd = cofactor(&m, rd, rd);
    // C_xx = -16 A_x², A_x the area of the face opposite vertex x
    let s = (ccc * cdd).sqrt();
    let cos = ccd / s;
    let area_c = (-ccc / 16.0).sqrt();
    let area_d = (-cdd / 16.0).sqrt();
    let sin = 1.5 * volume * l[k] / (area_c * area_d);
    angles[k] = sin.atan2(cos);
    for e in 0..6 {
      let dcd = d_cofactor(&m, rc, rd, e);
      let dcc = d_cofactor(&m, rc, rc, e);
      let ddd = d_cofactor(&m, rd, rd, e);
      let dcos_dq = dcd / s - ccd * (dcc * cdd + ccc * ddd) / (2.0 * s * s * s);
      jac[k][e] = -dcos_dq / sin * 2.0 * l[e];
    }
  }
  Ok((angles, jac))
}

/// Lengths, oriented volumes, dihedral angles and their length derivatives for
/// one placement of a triangulation.
#[derive(Clone, Debug)]
pub struct MetricCache {
  /// Edge lengths indexed like [`Triangulation::edges`].
  pub lengths: Vec<f64>,
  /// Oriented volume of each tetrahedron (sign from the manifold orientation).
  pub volumes: Vec<f64>,
  /// Unsigned dihedral angles per tetrahedron in local edge order.
  pub dihedral: Vec<[f64; 6]>,
  /// Global edge index of each local edge.
  pub local_edges: Vec<[usize; 6]>,
  /// ∂θ/∂l per tetrahedron in local edge order.
  pub jacobians: Vec<[[f64; 6]; 6]>,
  /// ω = 2π − Σ s_t θ_t for inner edges, α = −Σ s_t θ_t for boundary edges,
  /// where s_t is the sign of the oriented volume.
  pub edge_angle: Vec<f64>,
}

impl MetricCache {
  pub fn new(t: &Triangulation, p: &Placement) -> Result<Self> {
    let ne = t.edges().len();
    let mut lengths = Vec::with_capacity(ne);
    for e in t.edges() {
      let l = p.length(e)?;
      if l == 0.0 {
        return Err(Error::ZeroLength(*e));
      }
      lengths.push(l);
    }
    let nt = t.tetrahedra().len();
    let mut volumes = Vec::with_capacity(nt);
    let mut dihedral = Vec::with_capacity(nt);
    let mut local_edges = Vec::with_capacity(nt);
    let mut jacobians = Vec::with_capacity(nt);
    let mut edge_angle: Vec<f64> = (0..ne).map(|e| if t.is_boundary_edge(e) { 0.0 } else { 2.0 * PI }).collect();
    for (ti, tuple) in t.tetrahedra().iter().enumerate() {
      let v6 = p.six_volume(tuple)? * f64::from(t.orientation()[ti]);
      if v6.abs() < 1e-14 {
        return Err(Error::DegenerateTetrahedron(*tuple, v6));
      }
      let x: [Point; 4] = [0, 1, 2, 3].map(|i| p.coords[&tuple[i]]);
      let ids = LOCAL_EDGES.map(|(a, b)| t.edge_id(&Edge::new(tuple[a], tuple[b])).expect("edge of tetrahedron"));
      let l = ids.map(|e| lengths[e]);
      let theta: [f64; 6] = std::array::from_fn(|k| dihedral_angle(&x, k));
      let jac = dihedral_length_jacobian(&l)?;
      let s = v6.signum();
      for k in 0..6 {
        edge_angle[ids[k]] -= s * theta[k];
      }
      volumes.push(v6 / 6.0);
      dihedral.push(theta);
      local_edges.push(ids);
      jacobians.push(jac);
    }
    Ok(MetricCache { lengths, volumes, dihedral, local_edges, jacobians, edge_angle })
  }

  pub fn omega(&self, t: &Triangulation, e: usize) -> Option<f64> {
    (!t.is_boundary_edge(e)).then(|| self.edge_angle[e])
  }

  pub fn alpha(&self, t: &Triangulation, e: usize) -> Option<f64> { t.is_boundary_edge(e).then(|| self.edge_angle[e]) }

  /// Row ∂θ_{t,edge}/∂l over the six local edges of tetrahedron `tet`.
  pub fn d_angle_d_lengths(&self, tet: usize, edge: usize) -> Option<[(usize, f64); 6]> {
    let k = self.local_edges[tet].iter().position(|&e| e == edge)?;
    Some(std::array::from_fn(|j| (self.local_edges[tet][j], self.jacobians[tet][k][j])))
  }

  /// Full matrix `F[i][j] = ∂(ω or α)_i / ∂l_j` over all edges.
  pub fn angle_length_matrix(&self, ne: usize) -> DMatrix<f64> {
    let mut f = DMatrix::zeros(ne, ne);
    for (ti, ids) in self.local_edges.iter().enumerate() {
      let s = self.volumes[ti].signum();
      for a in 0..6 {
        for b in 0..6 {
          f[(ids[a], ids[b])] -= s * self.jacobians[ti][a][b];
        }
      }
    }
    f
  }
}
