//! Dense numerical helpers: log-domain determinants, numerical rank and an
//! incremental row-space accumulator.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value threshold used for numerical rank decisions.
pub const RANK_RTOL: f64 = 1e-8;

/// A real number stored as sign and natural log of its magnitude, so products
/// of many determinants and volumes neither overflow nor underflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScalar {
  pub sign: f64,
  pub ln: f64,
}

impl LogScalar {
  pub const ONE: LogScalar = LogScalar { sign: 1.0, ln: 0.0 };
  pub const ZERO: LogScalar = LogScalar { sign: 0.0, ln: f64::NEG_INFINITY };

  pub fn from_f64(x: f64) -> Self {
    if x == 0.0 {
      LogScalar::ZERO
    } else {
      LogScalar { sign: x.signum(), ln: x.abs().ln() }
    }
  }

  pub fn is_zero(&self) -> bool { self.sign == 0.0 }

  pub fn to_f64(self) -> f64 {
    if self.is_zero() {
      0.0
    } else {
      self.sign * self.ln.exp()
    }
  }

  pub fn mul(self, o: LogScalar) -> LogScalar {
    if self.is_zero() || o.is_zero() {
      return LogScalar::ZERO;
    }
    LogScalar { sign: self.sign * o.sign, ln: self.ln + o.ln }
  }

  pub fn div(self, o: LogScalar) -> LogScalar {
    assert!(!o.is_zero(), "division by zero LogScalar");
    if self.is_zero() {
      return LogScalar::ZERO;
    }
    LogScalar { sign: self.sign * o.sign, ln: self.ln - o.ln }
  }

  pub fn powi(self, k: i32) -> LogScalar {
    if k == 0 {
      return LogScalar::ONE;
    }
    if self.is_zero() {
      return LogScalar::ZERO;
    }
    let sign = if k % 2 == 0 { 1.0 } else { self.sign };
    LogScalar { sign, ln: self.ln * k as f64 }
  }

  pub fn neg(self) -> LogScalar { LogScalar { sign: -self.sign, ln: self.ln } }
}

/// Determinant by Gaussian elimination with partial pivoting, in log form.
pub fn log_det(m: &DMatrix<f64>) -> LogScalar {
  assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
  let n = m.nrows();
  let mut a = m.clone();
  let mut sign = 1.0;
  let mut ln = 0.0;
  for k in 0..n {
    let (mut p, mut best) = (k, a[(k, k)].abs());
    for r in k + 1..n {
      if a[(r, k)].abs() > best {
        best = a[(r, k)].abs();
        p = r;
      }
    }
    if best == 0.0 {
      return LogScalar::ZERO;
    }
    if p != k {
      a.swap_rows(p, k);
      sign = -sign;
    }
    let pivot = a[(k, k)];
    sign *= pivot.signum();
    ln += pivot.abs().ln();
    for r in k + 1..n {
      let factor = a[(r, k)] / pivot;
      if factor != 0.0 {
        for c in k + 1..n {
          a[(r, c)] -= factor * a[(k, c)];
        }
      }
    }
  }
  LogScalar { sign, ln }
}

pub fn det(m: &DMatrix<f64>) -> f64 { log_det(m).to_f64() }

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
  if m.nrows() == 0 || m.ncols() == 0 {
    return Vec::new();
  }
  let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
  s.sort_by(|a, b| b.total_cmp(a));
  s
}

/// σ_min / σ_max of a square matrix (1 for the empty matrix).
pub fn relative_conditioning(m: &DMatrix<f64>) -> f64 {
  let s = singular_values(m);
  match (s.first(), s.last()) {
    (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
    (Some(_), Some(_)) => 0.0,
    _ => 1.0,
  }
}

/// Numerical rank with singular values below `rtol · σ_max` counted as zero.
pub fn numerical_rank(m: &DMatrix<f64>, rtol: f64) -> usize {
  let s = singular_values(m);
  match s.first() {
    Some(&hi) if hi > 0.0 => s.iter().filter(|&&x| x > rtol * hi).count(),
    _ => 0,
  }
}

/// Submatrix with the given rows and columns, in the given order.
pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
  DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Frobenius norm.
pub fn norm(m: &DMatrix<f64>) -> f64 { m.iter().map(|x| x * x).sum::<f64>().sqrt() }

/// Orthonormal basis of a growing row space, used for greedy rank augmentation.
#[derive(Clone, Debug)]
pub struct RowSpace {
  basis: Vec<DVector<f64>>,
  rtol: f64,
  scale: f64,
}

impl RowSpace {
  pub fn new(rtol: f64) -> Self { RowSpace { basis: Vec::new(), rtol, scale: 0.0 } }

  /// Like `new`, but residuals are also measured against `scale`, so rows that
  /// are rounding noise relative to their siblings are rejected.
  pub fn with_scale(rtol: f64, scale: f64) -> Self { RowSpace { basis: Vec::new(), rtol, scale } }

  pub fn rank(&self) -> usize { self.basis.len() }

  /// Adds `row` if its component orthogonal to the current span is larger than
  /// `rtol` times max(its norm, scale). Returns whether the rank increased.
  pub fn try_add(&mut self, row: &DVector<f64>) -> bool {
    let scale = row.norm();
    if scale == 0.0 {
      return false;
    }
    let mut r = row.clone();
    // two passes of Gram-Schmidt keep the basis orthogonal to working precision
    for _ in 0..2 {
      for b in &self.basis {
        let c = b.dot(&r);
        r.axpy(-c, b, 1.0);
      }
    }
    let residual = r.norm();
    if residual > self.rtol * scale.max(self.scale) {
      self.basis.push(r / residual);
      true
    } else {
      false
    }
  }
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn log_det_matches_small_cases() {
    let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
    assert!((det(&m) - 18.0).abs() < 1e-12);
    let p = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    assert_eq!(det(&p), -1.0);
    assert_eq!(det(&DMatrix::zeros(0, 0)), 1.0);
    assert!(log_det(&DMatrix::zeros(2, 2)).is_zero());
  }

  #[test]
  fn log_det_survives_huge_products() {
    let m = DMatrix::from_diagonal_element(400, 400, 1e3);
    let d = log_det(&m);
    assert_eq!(d.sign, 1.0);
    assert!((d.ln - 400.0 * 1e3f64.ln()).abs() < 1e-9);
  }

  #[test]
  fn row_space_rank() {
    let mut rs = RowSpace::new(RANK_RTOL);
    assert!(rs.try_add(&DVector::from_vec(vec![1.0, 0.0, 0.0])));
    assert!(rs.try_add(&DVector::from_vec(vec![1.0, 1.0, 0.0])));
    assert!(!rs.try_add(&DVector::from_vec(vec![2.0, -3.0, 0.0])));
    assert!(rs.try_add(&DVector::from_vec(vec![0.0, 0.0, 5.0])));
    assert_eq!(rs.rank(), 3);
  }
}
