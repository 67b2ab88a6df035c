//! Generating functions of f3 minors and of the boundary invariants.
//!
//! Matrices here are indexed with rows on the dl side (unstarred generators,
//! the 𝒞 edges) and columns on the dω/dα side (starred generators, the 𝒟
//! edges), i.e. the transpose of the complex's f3.

use nalgebra::DMatrix;

use super::{ordered_product, Generator, GrassmannElement, Registry};
use crate::complex::{build_complex, default_frame, eligible_edges, geometric_factor, MinorPlan, PlanOptions};
use crate::error::{Error, Result};
use crate::geometry::{MetricCache, Placement};
use crate::linalg::{log_det, submatrix, LogScalar, RANK_RTOL};
use crate::rigidity::{RigidConstruction, RigidContext};
use crate::triangulation::{Edge, Triangulation};

/// exp Σ M_ij r_i c_j; the coefficient of r_{i₁}c_{j₁}⋯r_{iₙ}c_{jₙ} is det M[I, J].
pub fn minor_generating_function(m: &DMatrix<f64>, rows: &[Generator], cols: &[Generator]) -> Result<GrassmannElement> {
  if m.nrows() != rows.len() || m.ncols() != cols.len() {
    return Err(Error::ShapeMismatch {
      rows: m.nrows(),
      cols: m.ncols(),
      expected_rows: rows.len(),
      expected_cols: cols.len(),
    });
  }
  let reg = Registry::new(rows.iter().chain(cols).copied().collect())?;
  let mut f = GrassmannElement::zero(&reg);
  for (i, r) in rows.iter().enumerate() {
    for (j, c) in cols.iter().enumerate() {
      f = f.add(&GrassmannElement::monomial(&reg, &[*r, *c], m[(i, j)])?)?;
    }
  }
  f.exponential()
}

/// Φ by the defining Berezin integral: ∫ exp f ∏_{inner} da* da. Exponential
/// cost in the number of edges; meant for small cross-checks.
pub fn phi_berezin(m: &DMatrix<f64>, inner: &[Edge], boundary: &[Edge]) -> Result<GrassmannElement> {
  let edges: Vec<Edge> = inner.iter().chain(boundary).copied().collect();
  let rows: Vec<Generator> = edges.iter().map(|&e| Generator::a(e)).collect();
  let cols: Vec<Generator> = edges.iter().map(|&e| Generator::a_star(e)).collect();
  let full = minor_generating_function(m, &rows, &cols)?.integrate_edges(inner);
  full.restrict(&Registry::of_edges(boundary)?)
}

/// Φ split as `factor · reduced`, keeping the large inner determinant in log form.
#[derive(Clone, Debug)]
pub struct PhiParts {
  pub factor: LogScalar,
  pub reduced: GrassmannElement,
}

impl PhiParts {
  pub fn element(&self) -> GrassmannElement { self.reduced.scale(self.factor.to_f64()) }
}

/// Φ by bordered minors: the coefficient of ∏ₖ a_{iₖ}a*_{jₖ} is
/// det M[inner ⊕ I, inner ⊕ J].
///
/// The inner block is diagonalized by an SVD and its well-conditioned part
/// eliminated by a Schur complement; directions with tiny singular values are
/// kept as extra border rows, so singular inner blocks stay exact.
pub fn phi(m: &DMatrix<f64>, inner: &[Edge], boundary: &[Edge]) -> Result<PhiParts> {
  let n = inner.len();
  let b = boundary.len();
  let total = n + b;
  if m.nrows() != total || m.ncols() != total {
    return Err(Error::ShapeMismatch { rows: m.nrows(), cols: m.ncols(), expected_rows: total, expected_cols: total });
  }
  let reg = Registry::of_edges(boundary)?;
  let (factor, s, r) = reduce_inner(m, n);
  let row_idx: Vec<usize> = boundary.iter().map(|&e| reg.index(&Generator::a(e)).expect("registered")).collect();
  let col_idx: Vec<usize> = boundary.iter().map(|&e| reg.index(&Generator::a_star(e)).expect("registered")).collect();
  let mut reduced = GrassmannElement::zero(&reg);
  let fixed: Vec<usize> = (0..r).collect();
  for k in 0..=b {
    let subsets = combinations(b, k);
    for i_set in &subsets {
      let rows: Vec<usize> = fixed.iter().copied().chain(i_set.iter().map(|i| r + i)).collect();
      for j_set in &subsets {
        let cols: Vec<usize> = fixed.iter().copied().chain(j_set.iter().map(|j| r + j)).collect();
        let d = log_det(&submatrix(&s, &rows, &cols)).to_f64();
        if d == 0.0 {
          continue;
        }
        let seq: Vec<usize> = i_set.iter().zip(j_set).flat_map(|(&i, &j)| [row_idx[i], col_idx[j]]).collect();
        let (mask, sign) = ordered_product(&seq).expect("distinct generators");
        reduced.add_term(mask, sign * d);
      }
    }
  }
  Ok(PhiParts { factor, reduced })
}

/// Returns (sign·∏σ_kept, reduced matrix, number of retained inner rows).
fn reduce_inner(m: &DMatrix<f64>, n: usize) -> (LogScalar, DMatrix<f64>, usize) {
  let total = m.nrows();
  let b = total - n;
  if n == 0 {
    return (LogScalar::ONE, m.clone(), 0);
  }
  let a = m.view((0, 0), (n, n)).into_owned();
  let svd = a.svd(true, true);
  let u = svd.u.expect("requested");
  let v_t = svd.v_t.expect("requested");
  let sigma = svd.singular_values;
  let smax = sigma.iter().fold(0.0f64, |x, &y| x.max(y));
  let kept: Vec<usize> = (0..n).filter(|&i| smax > 0.0 && sigma[i] >= RANK_RTOL * smax).collect();
  let retained: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();

  // T = diag(Uᵀ, I) · M · diag(V, I)
  let mut t = DMatrix::zeros(total, total);
  for i in 0..n {
    t[(i, i)] = sigma[i];
  }
  let upper = u.transpose() * m.view((0, n), (n, b));
  let lower = m.view((n, 0), (b, n)) * v_t.transpose();
  t.view_mut((0, n), (n, b)).copy_from(&upper);
  t.view_mut((n, 0), (b, n)).copy_from(&lower);
  t.view_mut((n, n), (b, b)).copy_from(&m.view((n, n), (b, b)));

  let mut factor = log_det(&u).mul(log_det(&v_t));
  factor = LogScalar { sign: factor.sign, ln: 0.0 };
  for &i in &kept {
    factor = factor.mul(LogScalar::from_f64(sigma[i]));
  }
  let keep_rest: Vec<usize> = retained.iter().copied().chain(n..total).collect();
  let mut s = submatrix(&t, &keep_rest, &keep_rest);
  for &k in &kept {
    let inv = 1.0 / sigma[k];
    for (p, &i) in keep_rest.iter().enumerate() {
      let tik = t[(i, k)];
      if tik == 0.0 {
        continue;
      }
      for (q, &j) in keep_rest.iter().enumerate() {
        s[(p, q)] -= tik * inv * t[(k, j)];
      }
    }
  }
  (factor, s, retained.len())
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
  let mut out = Vec::new();
  let mut cur = Vec::with_capacity(k);
  fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
      out.push(cur.clone());
      return;
    }
    for i in start..n {
      if n - i < k - cur.len() {
        break;
      }
      cur.push(i);
      rec(i + 1, n, k, cur, out);
      cur.pop();
    }
  }
  rec(0, n, k, &mut cur, &mut out);
  out
}

/// 𝐈_M together with the data it was assembled from.
#[derive(Clone, Debug)]
pub struct GeneratingInvariant {
  pub element: GrassmannElement,
  /// minor f1 · minor f5 / (minor f2 · minor f4) · ∏(−6V)/∏_{inner} l²
  pub prefactor: LogScalar,
  pub phi: PhiParts,
  pub plan: MinorPlan,
  /// ℰ_inner, ascending.
  pub inner: Vec<Edge>,
  /// Edges carrying generators, ascending.
  pub boundary: Vec<Edge>,
}

impl GeneratingInvariant {
  /// Coefficient for ordered sets 𝒞 (unstarred) and 𝒟 (starred).
  pub fn coefficient(&self, c: &[Edge], d: &[Edge]) -> f64 {
    if c.len() != d.len() {
      return 0.0;
    }
    let gens: Vec<Generator> = c.iter().zip(d).flat_map(|(&x, &y)| [Generator::a(x), Generator::a_star(y)]).collect();
    self.element.coefficient(&gens)
  }
}

/// Generating function of all boundary invariants of `t`.
pub fn generating_invariant(t: &Triangulation, p: &Placement, opts: &PlanOptions) -> Result<GeneratingInvariant> {
  let eligible = eligible_edges(t, p, opts.surface_rcs.as_deref())?;
  let cache = MetricCache::new(t, p)?;
  let frame = match opts.frame {
    Some(f) => f,
    None => default_frame(t, p)?,
  };
  let rc = match &opts.interior_rc {
    Some(edges) => RigidConstruction::from_edges(t, p, RigidContext::Interior, edges)?,
    None => RigidConstruction::greedy_in_order(t, p, RigidContext::Interior, &t.inner_edges())?,
  };
  let cx = build_complex(t, p, &cache, &rc, frame, &[], &[])?;
  let minors = cx.minors();
  for k in [0, 1, 3, 4] {
    if minors.conditioning[k] < RANK_RTOL || minors.det[k].is_zero() {
      const NAMES: [&str; 5] = ["f1", "f2", "f3", "f4", "f5"];
      return Err(Error::SingularPlanMinor { matrix: NAMES[k], relative: minors.conditioning[k] });
    }
  }
  let prefactor = minors.det[0]
    .mul(minors.det[4])
    .div(minors.det[1].mul(minors.det[3]))
    .mul(geometric_factor(t, &cache));

  let order: Vec<usize> = rc.complement.iter().chain(&eligible).copied().collect();
  let full = cache.angle_length_matrix(t.edges().len());
  // rows: dl side, columns: dω/dα side
  let m = submatrix(&full, &order, &order).transpose();
  let inner: Vec<Edge> = rc.complement.iter().map(|&e| t.edges()[e]).collect();
  let boundary: Vec<Edge> = eligible.iter().map(|&e| t.edges()[e]).collect();
  let phi_parts = phi(&m, &inner, &boundary)?;
  let element = phi_parts.reduced.scale(prefactor.mul(phi_parts.factor).to_f64());
  Ok(GeneratingInvariant { element, prefactor, phi: phi_parts, plan: cx.plan, inner, boundary })
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::linalg::det;
  use rand::{Rng, SeedableRng};
  use rand_chacha::ChaCha8Rng;

  fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> { DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)) }

  fn edges(n: u32) -> Vec<Edge> { (0..n).map(|i| Edge::new(2 * i, 2 * i + 1)).collect() }

  #[test]
  fn one_by_one() {
    let e = edges(1);
    let m = DMatrix::from_element(1, 1, 0.75);
    let u = minor_generating_function(&m, &[Generator::a(e[0])], &[Generator::a_star(e[0])]).unwrap();
    assert_eq!(u.coefficient(&[Generator::a(e[0]), Generator::a_star(e[0])]), 0.75);
    assert_eq!(u.scalar_part(), 1.0);
  }

  #[test]
  fn bordered_phi_matches_berezin_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (ni, nb) in [(0, 2), (1, 2), (2, 2), (3, 1), (2, 0)] {
      let es = edges((ni + nb) as u32);
      let m = random_matrix(&mut rng, ni + nb);
      let a = phi(&m, &es[..ni], &es[ni..]).unwrap().element();
      let b = phi_berezin(&m, &es[..ni], &es[ni..]).unwrap();
      assert_eq!(a.registry(), b.registry());
      let diff = a.sub(&b).unwrap().max_abs();
      assert!(diff < 1e-12 * b.max_abs().max(1.0), "({ni},{nb}): {diff}");
    }
  }

  #[test]
  fn singular_inner_block_handled_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let es = edges(5);
    let mut m = random_matrix(&mut rng, 5);
    // rank-one inner 3×3 block
    for i in 0..3 {
      for j in 0..3 {
        m[(i, j)] = (i as f64 + 1.0) * (j as f64 - 0.5);
      }
    }
    let got = phi(&m, &es[..3], &es[3..]).unwrap().element();
    for i in 0..2 {
      for j in 0..2 {
        let want = det(&submatrix(&m, &[0, 1, 2, 3 + i], &[0, 1, 2, 3 + j]));
        let c = got.coefficient(&[Generator::a(es[3 + i]), Generator::a_star(es[3 + j])]);
        assert!((c - want).abs() < 1e-12, "{c} vs {want}");
      }
    }
    assert!(got.scalar_part().abs() < 1e-12);
  }
}
