//! Combinatorial oriented simplicial 3-manifolds with boundary.
//!
//! A [`Triangulation`] is built from a list of vertex 4-tuples. All derived
//! data (edges, faces, incidences, boundary classification, boundary
//! components and a consistent orientation) is computed once at construction
//! and the value is immutable afterwards.

mod builtin;
mod io;
mod moves;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtin::{builtin, ManifoldName};
pub use io::TriangulationFile;
pub use moves::PachnerMove;

pub type VertexId = u32;

/// Unordered pair of vertices, stored with the smaller id first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(pub VertexId, pub VertexId);

impl Edge {
  pub fn new(a: VertexId, b: VertexId) -> Self {
    if a <= b {
      Edge(a, b)
    } else {
      Edge(b, a)
    }
  }

  pub fn contains(&self, v: VertexId) -> bool { self.0 == v || self.1 == v }
}

impl fmt::Display for Edge {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { write!(f, "({},{})", self.0, self.1) }
}

/// Unordered triple of vertices, sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face(pub [VertexId; 3]);

impl Face {
  pub fn new(mut v: [VertexId; 3]) -> Self {
    v.sort_unstable();
    Face(v)
  }

  pub fn edges(&self) -> [Edge; 3] {
    let [a, b, c] = self.0;
    [Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)]
  }
}

/// The six edges of a tetrahedron as pairs of local positions.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Local edge index of the edge opposite to local edge `k`.
pub const fn opposite_local_edge(k: usize) -> usize { 5 - k }

/// Sign of the permutation taking `from` to `to` (both sequences of distinct ids).
pub(crate) fn permutation_sign<T: PartialEq + Copy>(from: &[T], to: &[T]) -> i8 {
  let perm: Vec<usize> = to.iter().map(|x| from.iter().position(|y| y == x).expect("same elements")).collect();
  let mut sign = 1;
  for i in 0..perm.len() {
    for j in i + 1..perm.len() {
      if perm[i] > perm[j] {
        sign = -sign;
      }
    }
  }
  sign
}

/// Orientation that the oriented tetrahedron `(tuple, sign)` induces on one of its faces,
/// relative to the sorted vertex order of that face.
pub(crate) fn induced_face_sign(tuple: &[VertexId; 4], sign: i8, face: &Face) -> i8 {
  let omitted = (0..4).find(|&i| !face.0.contains(&tuple[i])).expect("face of tetrahedron");
  let rest: Vec<VertexId> = (0..4).filter(|&i| i != omitted).map(|i| tuple[i]).collect();
  let parity = if omitted % 2 == 0 { 1 } else { -1 };
  sign * parity * permutation_sign(&face.0, &rest)
}

/// One connected component of the boundary surface.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryComponent {
  pub faces: Vec<Face>,
  pub edges: Vec<Edge>,
  pub vertices: Vec<VertexId>,
}

impl BoundaryComponent {
  pub fn euler_characteristic(&self) -> i64 {
    self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
  }
}

#[derive(Clone, Debug)]
pub struct Triangulation {
  vertices: Vec<VertexId>,
  tetrahedra: Vec<[VertexId; 4]>,
  orientation: Vec<i8>,
  edges: Vec<Edge>,
  edge_index: HashMap<Edge, usize>,
  faces: Vec<Face>,
  face_index: HashMap<Face, usize>,
  face_tets: Vec<Vec<usize>>,
  edge_tets: Vec<Vec<usize>>,
  boundary_vertices: BTreeSet<VertexId>,
  edge_on_boundary: Vec<bool>,
  components: Vec<BoundaryComponent>,
  vertex_component: HashMap<VertexId, usize>,
}

impl Triangulation {
  /// Builds a triangulation from ordered vertex 4-tuples. Tuple order fixes the
  /// orientation of each tetrahedron, so neighbouring tuples must induce
  /// opposite orientations on their common face.
  pub fn new(tetrahedra: Vec<[VertexId; 4]>) -> Result<Self> {
    let signs = vec![1; tetrahedra.len()];
    Self::build(tetrahedra, Some(signs))
  }

  /// Builds from unoriented tuples, deriving a consistent sign per tetrahedron
  /// by a face-matching sweep (the first tetrahedron of every connected piece
  /// keeps its tuple orientation).
  pub fn orienting(tetrahedra: Vec<[VertexId; 4]>) -> Result<Self> { Self::build(tetrahedra, None) }

  /// Builds from tuples with explicit orientation signs; fails if the signs are
  /// not mutually compatible.
  pub fn from_oriented(tetrahedra: Vec<[VertexId; 4]>, signs: Vec<i8>) -> Result<Self> {
    if signs.len() != tetrahedra.len() || signs.iter().any(|s| *s != 1 && *s != -1) {
      return Err(Error::InvalidInput("one sign (+1/-1) per tetrahedron required".into()));
    }
    Self::build(tetrahedra, Some(signs))
  }

  fn build(tetrahedra: Vec<[VertexId; 4]>, signs: Option<Vec<i8>>) -> Result<Self> {
    if tetrahedra.is_empty() {
      return Err(Error::InvalidInput("no tetrahedra".into()));
    }
    let mut seen_tets = BTreeSet::new();
    for t in &tetrahedra {
      let mut s = *t;
      s.sort_unstable();
      if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Degenerate(*t));
      }
      if !seen_tets.insert(s) {
        return Err(Error::NonManifold(format!("tetrahedron {s:?} listed twice")));
      }
    }

    let vertices: Vec<VertexId> =
      tetrahedra.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();

    let mut face_map: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
    let mut edge_map: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (ti, t) in tetrahedra.iter().enumerate() {
      for omit in 0..4 {
        let f: Vec<VertexId> = (0..4).filter(|&i| i != omit).map(|i| t[i]).collect();
        face_map.entry(Face::new([f[0], f[1], f[2]])).or_default().push(ti);
      }
      for (a, b) in LOCAL_EDGES {
        edge_map.entry(Edge::new(t[a], t[b])).or_default().push(ti);
      }
    }
    for (f, ts) in &face_map {
      if ts.len() > 2 {
        return Err(Error::NonManifold(format!("face {:?} belongs to {} tetrahedra", f.0, ts.len())));
      }
    }

    let faces: Vec<Face> = face_map.keys().copied().collect();
    let face_tets: Vec<Vec<usize>> = face_map.values().cloned().collect();
    let face_index: HashMap<Face, usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let edges: Vec<Edge> = edge_map.keys().copied().collect();
    let edge_tets: Vec<Vec<usize>> = edge_map.values().cloned().collect();
    let edge_index: HashMap<Edge, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();

    let boundary_faces: Vec<Face> =
      faces.iter().zip(&face_tets).filter(|(_, ts)| ts.len() == 1).map(|(f, _)| *f).collect();
    let mut boundary_vertices = BTreeSet::new();
    let mut edge_on_boundary = vec![false; edges.len()];
    for f in &boundary_faces {
      boundary_vertices.extend(f.0);
      for e in f.edges() {
        edge_on_boundary[edge_index[&e]] = true;
      }
    }

    check_vertex_links(&vertices, &tetrahedra, &boundary_vertices)?;

    let orientation = orient(&tetrahedra, &faces, &face_tets, signs)?;
    let components = boundary_components(&boundary_faces)?;
    let mut vertex_component = HashMap::new();
    for (k, c) in components.iter().enumerate() {
      for v in &c.vertices {
        vertex_component.insert(*v, k);
      }
    }

    Ok(Triangulation {
      vertices,
      tetrahedra,
      orientation,
      edges,
      edge_index,
      faces,
      face_index,
      face_tets,
      edge_tets,
      boundary_vertices,
      edge_on_boundary,
      components,
      vertex_component,
    })
  }

  pub fn vertices(&self) -> &[VertexId] { &self.vertices }

  pub fn tetrahedra(&self) -> &[[VertexId; 4]] { &self.tetrahedra }

  /// Orientation sign of each tetrahedron relative to its stored tuple.
  pub fn orientation(&self) -> &[i8] { &self.orientation }

  /// Tuple of tetrahedron `t` reordered (if needed) so that it is positively oriented.
  pub fn oriented_tetrahedron(&self, t: usize) -> [VertexId; 4] {
    let mut tuple = self.tetrahedra[t];
    if self.orientation[t] < 0 {
      tuple.swap(2, 3);
    }
    tuple
  }

  pub fn edges(&self) -> &[Edge] { &self.edges }

  pub fn edge_id(&self, e: &Edge) -> Option<usize> { self.edge_index.get(e).copied() }

  pub fn faces(&self) -> &[Face] { &self.faces }

  pub fn face_id(&self, f: &Face) -> Option<usize> { self.face_index.get(f).copied() }

  pub fn face_tetrahedra(&self, f: usize) -> &[usize] { &self.face_tets[f] }

  pub fn edge_tetrahedra(&self, e: usize) -> &[usize] { &self.edge_tets[e] }

  pub fn is_boundary_vertex(&self, v: VertexId) -> bool { self.boundary_vertices.contains(&v) }

  pub fn is_boundary_edge(&self, e: usize) -> bool { self.edge_on_boundary[e] }

  pub fn is_boundary_face(&self, f: usize) -> bool { self.face_tets[f].len() == 1 }

  /// Orientation induced on a boundary face by its tetrahedron, relative to
  /// the sorted vertex order of the face.
  pub fn boundary_face_sign(&self, f: usize) -> Option<i8> {
    match self.face_tets[f].as_slice() {
      [t] => Some(induced_face_sign(&self.tetrahedra[*t], self.orientation[*t], &self.faces[f])),
      _ => None,
    }
  }

  pub fn inner_vertices(&self) -> Vec<VertexId> {
    self.vertices.iter().copied().filter(|v| !self.boundary_vertices.contains(v)).collect()
  }

  /// Indices of inner edges in ascending edge order.
  pub fn inner_edges(&self) -> Vec<usize> { (0..self.edges.len()).filter(|&e| !self.edge_on_boundary[e]).collect() }

  pub fn boundary_components(&self) -> &[BoundaryComponent] { &self.components }

  /// Number of boundary components, `m`.
  pub fn num_boundary_components(&self) -> usize { self.components.len() }

  pub fn component_of_vertex(&self, v: VertexId) -> Option<usize> { self.vertex_component.get(&v).copied() }

  pub fn is_closed(&self) -> bool { self.components.is_empty() }

  pub fn euler_characteristic(&self) -> i64 {
    self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64 - self.tetrahedra.len() as i64
  }

  /// Index of the tetrahedron with the given vertex set, if any.
  pub fn find_tetrahedron(&self, vertices: [VertexId; 4]) -> Option<usize> {
    let mut key = vertices;
    key.sort_unstable();
    self.tetrahedra.iter().position(|t| {
      let mut s = *t;
      s.sort_unstable();
      s == key
    })
  }

  /// Triangulation with every orientation reversed.
  pub fn reversed(&self) -> Triangulation {
    let tets = self.tetrahedra.clone();
    let signs = self.orientation.iter().map(|s| -s).collect();
    Triangulation::from_oriented(tets, signs).expect("reversal preserves validity")
  }

  /// Renames vertices through `map` (ids missing from the map are kept).
  pub fn relabeled(&self, map: &HashMap<VertexId, VertexId>) -> Result<Triangulation> {
    let f = |v: VertexId| map.get(&v).copied().unwrap_or(v);
    let tets = self.tetrahedra.iter().map(|t| [f(t[0]), f(t[1]), f(t[2]), f(t[3])]).collect();
    Triangulation::from_oriented(tets, self.orientation.clone())
  }

  /// Canonical form used for isomorphism-free comparison: sorted list of
  /// positively oriented tetrahedra, each rotated to an even permutation
  /// starting from its smallest vertex.
  pub fn canonical_tetrahedra(&self) -> Vec<[VertexId; 4]> {
    let mut out: Vec<[VertexId; 4]> = (0..self.tetrahedra.len())
      .map(|t| {
        let tuple = self.oriented_tetrahedron(t);
        let mut sorted = tuple;
        sorted.sort_unstable();
        if permutation_sign(&sorted, &tuple) < 0 {
          sorted.swap(2, 3);
        }
        sorted
      })
      .collect();
    out.sort_unstable();
    out
  }
}

fn check_vertex_links(
  vertices: &[VertexId],
  tetrahedra: &[[VertexId; 4]],
  boundary_vertices: &BTreeSet<VertexId>,
) -> Result<()> {
  let mut link: HashMap<VertexId, Vec<[VertexId; 3]>> = HashMap::new();
  for t in tetrahedra {
    for i in 0..4 {
      let mut tri = [0; 3];
      let mut k = 0;
      for j in 0..4 {
        if j != i {
          tri[k] = t[j];
          k += 1;
        }
      }
      tri.sort_unstable();
      link.entry(t[i]).or_default().push(tri);
    }
  }
  for v in vertices {
    let tris = &link[v];
    let mut edge_count: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    let mut verts = BTreeSet::new();
    for tri in tris {
      verts.extend(tri.iter().copied());
      for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        *edge_count.entry((tri[a], tri[b])).or_default() += 1;
      }
    }
    if edge_count.values().any(|&c| c > 2) {
      return Err(Error::NonManifold(format!("link of vertex {v} has an edge in more than two triangles")));
    }
    // connectivity of the link through shared edges
    let mut seen = vec![false; tris.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
      for j in 0..tris.len() {
        if !seen[j] && shares_edge(&tris[i], &tris[j]) {
          seen[j] = true;
          queue.push_back(j);
        }
      }
    }
    if seen.iter().any(|s| !s) {
      return Err(Error::NonManifold(format!("link of vertex {v} is disconnected")));
    }
    let chi = verts.len() as i64 - edge_count.len() as i64 + tris.len() as i64;
    let rim: Vec<(VertexId, VertexId)> = edge_count.iter().filter(|(_, &c)| c == 1).map(|(e, _)| *e).collect();
    if boundary_vertices.contains(v) {
      if chi != 1 || !is_single_cycle(&rim) {
        return Err(Error::NonManifold(format!("link of boundary vertex {v} is not a disk")));
      }
    } else if chi != 2 || !rim.is_empty() {
      return Err(Error::NonManifold(format!("link of inner vertex {v} is not a sphere")));
    }
  }
  Ok(())
}

fn shares_edge(a: &[VertexId; 3], b: &[VertexId; 3]) -> bool { a.iter().filter(|x| b.contains(x)).count() == 2 }

fn is_single_cycle(edges: &[(VertexId, VertexId)]) -> bool {
  if edges.len() < 3 {
    return false;
  }
  let mut adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
  for &(a, b) in edges {
    adj.entry(a).or_default().push(b);
    adj.entry(b).or_default().push(a);
  }
  if adj.values().any(|n| n.len() != 2) {
    return false;
  }
  let start = edges[0].0;
  let (mut prev, mut cur) = (start, adj[&start][0]);
  let mut steps = 1;
  while cur != start {
    let next = if adj[&cur][0] == prev { adj[&cur][1] } else { adj[&cur][0] };
    prev = cur;
    cur = next;
    steps += 1;
  }
  steps == adj.len()
}

fn orient(
  tetrahedra: &[[VertexId; 4]],
  faces: &[Face],
  face_tets: &[Vec<usize>],
  given: Option<Vec<i8>>,
) -> Result<Vec<i8>> {
  let n = tetrahedra.len();
  let mut neighbors: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
  for (fi, ts) in face_tets.iter().enumerate() {
    if ts.len() == 2 {
      neighbors[ts[0]].push((ts[1], fi));
      neighbors[ts[1]].push((ts[0], fi));
    }
  }
  if let Some(signs) = given {
    for (fi, ts) in face_tets.iter().enumerate() {
      if ts.len() == 2 {
        let a = induced_face_sign(&tetrahedra[ts[0]], signs[ts[0]], &faces[fi]);
        let b = induced_face_sign(&tetrahedra[ts[1]], signs[ts[1]], &faces[fi]);
        if a != -b {
          return Err(Error::NonOrientable(format!("given signs disagree across face {:?}", faces[fi].0)));
        }
      }
    }
    return Ok(signs);
  }
  let mut sign = vec![0i8; n];
  for root in 0..n {
    if sign[root] != 0 {
      continue;
    }
    sign[root] = 1;
    let mut queue = VecDeque::from([root]);
    while let Some(t) = queue.pop_front() {
      for &(u, fi) in &neighbors[t] {
        let want = -induced_face_sign(&tetrahedra[t], sign[t], &faces[fi]);
        let su = want * induced_face_sign(&tetrahedra[u], 1, &faces[fi]);
        if sign[u] == 0 {
          sign[u] = su;
          queue.push_back(u);
        } else if sign[u] != su {
          return Err(Error::NonOrientable(format!("conflict across face {:?}", faces[fi].0)));
        }
      }
    }
  }
  Ok(sign)
}

fn boundary_components(boundary_faces: &[Face]) -> Result<Vec<BoundaryComponent>> {
  let n = boundary_faces.len();
  let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
  for (i, f) in boundary_faces.iter().enumerate() {
    for e in f.edges() {
      by_edge.entry(e).or_default().push(i);
    }
  }
  if let Some((e, _)) = by_edge.iter().find(|(_, fs)| fs.len() != 2) {
    return Err(Error::NonManifold(format!("boundary edge {e} is not shared by exactly two boundary faces")));
  }
  let mut comp = vec![usize::MAX; n];
  let mut out = Vec::new();
  for start in 0..n {
    if comp[start] != usize::MAX {
      continue;
    }
    let k = out.len();
    comp[start] = k;
    let mut queue = VecDeque::from([start]);
    let mut members = Vec::new();
    while let Some(i) = queue.pop_front() {
      members.push(i);
      for e in boundary_faces[i].edges() {
        for &j in &by_edge[&e] {
          if comp[j] == usize::MAX {
            comp[j] = k;
            queue.push_back(j);
          }
        }
      }
    }
    let mut faces: Vec<Face> = members.iter().map(|&i| boundary_faces[i]).collect();
    faces.sort_unstable();
    let edges: Vec<Edge> = faces.iter().flat_map(|f| f.edges()).collect::<BTreeSet<_>>().into_iter().collect();
    let vertices: Vec<VertexId> = faces.iter().flat_map(|f| f.0).collect::<BTreeSet<_>>().into_iter().collect();
    let c = BoundaryComponent { faces, edges, vertices };
    if c.euler_characteristic() % 2 != 0 {
      return Err(Error::NonManifold(format!("boundary component with odd Euler characteristic {}", c.euler_characteristic())));
    }
    out.push(c);
  }
  // components are ordered by their smallest vertex id
  out.sort_by_key(|c| c.vertices[0]);
  Ok(out)
}
