use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Placement;
use crate::triangulation::{BoundaryComponent, Edge, Triangulation, VertexId};

/// Basis descriptor for one row or column of a [`LabeledMatrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
  /// Generator of 𝔢(3): 0..3 translations, 3..6 rotations.
  Motion(u8),
  /// Coordinate differential of a vertex, axis 0..3.
  Coord(VertexId, u8),
  /// Sway parameter of boundary component `k`, generator 0..6.
  Sway(usize, u8),
  Length(Edge),
  Deficit(Edge),
  Alpha(Edge),
  /// Element of a dual space.
  Dual(DualLabel),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DualLabel {
  Motion(u8),
  Coord(VertexId, u8),
  Sway(usize, u8),
}

impl Label {
  pub fn dual(self) -> Label {
    match self {
      Label::Motion(i) => Label::Dual(DualLabel::Motion(i)),
      Label::Coord(v, a) => Label::Dual(DualLabel::Coord(v, a)),
      Label::Sway(k, g) => Label::Dual(DualLabel::Sway(k, g)),
      other => other,
    }
  }
}

impl fmt::Display for Label {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    const AXES: [char; 3] = ['x', 'y', 'z'];
    match self {
      Label::Motion(i) => write!(f, "e3[{i}]"),
      Label::Coord(v, a) => write!(f, "d{}_{v}", AXES[*a as usize]),
      Label::Sway(k, g) => write!(f, "sway{k}[{g}]"),
      Label::Length(e) => write!(f, "dl{e}"),
      Label::Deficit(e) => write!(f, "domega{e}"),
      Label::Alpha(e) => write!(f, "dalpha{e}"),
      Label::Dual(d) => match d {
        DualLabel::Motion(i) => write!(f, "e3*[{i}]"),
        DualLabel::Coord(v, a) => write!(f, "d{}*_{v}", AXES[*a as usize]),
        DualLabel::Sway(k, g) => write!(f, "sway{k}*[{g}]"),
      },
    }
  }
}

/// Dense real matrix with a basis descriptor on every row and column.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix {
  pub entries: DMatrix<f64>,
  pub rows: Vec<Label>,
  pub cols: Vec<Label>,
}

impl LabeledMatrix {
  pub fn new(entries: DMatrix<f64>, rows: Vec<Label>, cols: Vec<Label>) -> Self {
    assert_eq!(entries.nrows(), rows.len());
    assert_eq!(entries.ncols(), cols.len());
    LabeledMatrix { entries, rows, cols }
  }

  pub fn row_index(&self, l: &Label) -> Option<usize> { self.rows.iter().position(|x| x == l) }

  pub fn col_index(&self, l: &Label) -> Option<usize> { self.cols.iter().position(|x| x == l) }

  /// Transpose with labels swapped.
  pub fn transpose(&self) -> LabeledMatrix {
    LabeledMatrix { entries: self.entries.transpose(), rows: self.cols.clone(), cols: self.rows.clone() }
  }

  /// Square submatrix picked out by labels, in the given order.
  pub fn select(&self, rows: &[Label], cols: &[Label]) -> DMatrix<f64> {
    let ri: Vec<usize> = rows.iter().map(|l| self.row_index(l).unwrap_or_else(|| panic!("row {l} missing"))).collect();
    let ci: Vec<usize> = cols.iter().map(|l| self.col_index(l).unwrap_or_else(|| panic!("column {l} missing"))).collect();
    crate::linalg::submatrix(&self.entries, &ri, &ci)
  }
}

/// Basis of the space of admissible infinitesimal vertex motions: coordinates
/// of free vertices plus one 𝔢(3) sway per rigidly moving boundary component.
#[derive(Clone, Debug)]
pub struct ConfigSpace {
  pub labels: Vec<Label>,
  index: HashMap<Label, usize>,
  /// Vertex → component whose sway moves it, for vertices without own coordinates.
  swayed: HashMap<VertexId, usize>,
}

impl ConfigSpace {
  /// dx_inner ⊕ m·𝔢(3) of a manifold.
  pub fn interior(t: &Triangulation) -> Self {
    let mut labels: Vec<Label> =
      t.inner_vertices().into_iter().flat_map(|v| (0..3).map(move |a| Label::Coord(v, a))).collect();
    let mut swayed = HashMap::new();
    for (k, c) in t.boundary_components().iter().enumerate() {
      labels.extend((0..6).map(|g| Label::Sway(k, g)));
      for v in &c.vertices {
        swayed.insert(*v, k);
      }
    }
    Self::from_parts(labels, swayed)
  }

  /// (dx)_Γ: all coordinates of the vertices of one surface.
  pub fn surface(c: &BoundaryComponent) -> Self {
    let labels = c.vertices.iter().flat_map(|&v| (0..3).map(move |a| Label::Coord(v, a))).collect();
    Self::from_parts(labels, HashMap::new())
  }

  fn from_parts(labels: Vec<Label>, swayed: HashMap<VertexId, usize>) -> Self {
    let index = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    ConfigSpace { labels, index, swayed }
  }

  pub fn dim(&self) -> usize { self.labels.len() }

  pub fn index_of(&self, l: &Label) -> Option<usize> { self.index.get(l).copied() }

  /// Row of dl_e over this space.
  pub fn length_row(&self, p: &Placement, e: &Edge) -> Result<DVector<f64>> {
    let xp = p.point(e.0)?;
    let xq = p.point(e.1)?;
    let u = (xp - xq) / (xp - xq).norm();
    let mut row = DVector::zeros(self.dim());
    self.add_endpoint(&mut row, e.0, &xp, &u);
    self.add_endpoint(&mut row, e.1, &xq, &-u);
    Ok(row)
  }

  fn add_endpoint(&self, row: &mut DVector<f64>, v: VertexId, x: &Vector3<f64>, u: &Vector3<f64>) {
    if let Some(i) = self.index_of(&Label::Coord(v, 0)) {
      for a in 0..3 {
        row[i + a] += u[a];
      }
    } else if let Some(&k) = self.swayed.get(&v) {
      // u · (t + r × x) = u·t + r·(x × u)
      let i = self.index_of(&Label::Sway(k, 0)).expect("sway block present");
      let xu = x.cross(u);
      for a in 0..3 {
        row[i + a] += u[a];
        row[i + 3 + a] += xu[a];
      }
    }
  }

  /// Matrix sending 𝔢(3) into this space: vertex velocities for coordinates,
  /// identity on every sway block.
  pub fn motion_matrix(&self, p: &Placement) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(self.dim(), 6);
    for (i, l) in self.labels.iter().enumerate() {
      match *l {
        Label::Coord(v, a) => {
          let x = p.point(v)?;
          let a = a as usize;
          m[(i, a)] = 1.0;
          // column 3+b is the velocity e_b × x
          for b in 0..3 {
            let mut e = Vector3::zeros();
            e[b] = 1.0;
            m[(i, 3 + b)] = e.cross(&x)[a];
          }
        }
        Label::Sway(_, g) => m[(i, g as usize)] = 1.0,
        _ => unreachable!("configuration spaces hold coordinates and sways only"),
      }
    }
    Ok(m)
  }
}
