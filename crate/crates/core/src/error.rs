use thiserror::Error;

use crate::triangulation::{Edge, VertexId};

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
  #[error("degenerate tetrahedron: repeated vertex in {0:?}")]
  Degenerate([VertexId; 4]),
  #[error("not a manifold: {0}")]
  NonManifold(String),
  #[error("no orientation-compatible sign assignment exists: {0}")]
  NonOrientable(String),
  #[error("invalid triangulation input: {0}")]
  InvalidInput(String),
  #[error("Pachner move not applicable: {0}")]
  NotApplicable(String),
  #[error("unknown builtin manifold `{0}`")]
  UnknownName(String),

  #[error("general-position guard failed after {attempts} attempts starting at seed {seed}")]
  GeneralPositionFailure { seed: u64, attempts: u32 },
  #[error("vertex {0} has no coordinates")]
  MissingCoordinates(VertexId),
  #[error("degenerate tetrahedron {0:?} (|6V| = {1:e})")]
  DegenerateTetrahedron([VertexId; 4], f64),
  #[error("zero-length edge {0}")]
  ZeroLength(Edge),

  #[error("rank target {target} unreachable, reached {reached}")]
  RankDeficient { target: usize, reached: usize },
  #[error("manifold needs at least three inner vertices, has {0}")]
  MissingInnerVertices(usize),
  #[error("degenerate geometry: {0}")]
  DegenerateGeometry(String),
  #[error("minor of {matrix} is numerically singular (relative size {relative:e})")]
  SingularPlanMinor { matrix: &'static str, relative: f64 },
  #[error("edge {0} is not eligible for C/D (must lie outside every boundary rigid construction)")]
  EdgeNotEligible(Edge),
  #[error("C and D must have equal length ({0} vs {1})")]
  UnequalEdgeSets(usize, usize),

  #[error("Grassmann elements live over different generator registries")]
  RegistryMismatch,
  #[error("exponential requires an even element")]
  OddInput,
  #[error("matrix shape {rows}x{cols} does not match {expected_rows}x{expected_cols} generators")]
  ShapeMismatch { rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
  #[error("kernel trace needs 2n generators on each side, got {0} and {1}")]
  OddGeneratorCount(usize, usize),
  #[error("Grassmann algebra limited to {0} generators")]
  TooManyGenerators(usize),

  #[error("incompatible boundary components: {0}")]
  IncompatibleBoundary(String),
  #[error("placements disagree on glued vertex {0}")]
  PlacementMismatch(VertexId),
}

pub type Result<T> = std::result::Result<T, Error>;
