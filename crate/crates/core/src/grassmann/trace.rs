//! Trace of the operator f(b) ↦ ∫ f(a) K(a, b) da_{2n}…da_1.

use super::{Generator, GrassmannElement, Registry};
use crate::error::{Error, Result};

/// Generators a_1…a_{2n} and b_1…b_{2n} of a kernel.
pub fn kernel_generators(n: usize) -> (Vec<Generator>, Vec<Generator>) {
  let fam = |family: char| (1..=2 * n as u32).map(move |index| Generator::Aux { family, index }).collect();
  (fam('a'), fam('b'))
}

pub fn kernel_registry(n: usize) -> Result<Registry> {
  let (a, b) = kernel_generators(n);
  Registry::new(a.into_iter().chain(b).collect())
}

/// ∫ K(a, −a) da_{2n}…da_1.
pub fn kernel_trace(k: &GrassmannElement, n: usize) -> Result<f64> {
  let count = |family: char| {
    k.registry().generators().iter().filter(|g| matches!(g, Generator::Aux { family: f, .. } if *f == family)).count()
  };
  let (na, nb) = (count('a'), count('b'));
  if na != 2 * n || nb != 2 * n || na + nb != k.registry().len() {
    return Err(Error::OddGeneratorCount(na, nb));
  }
  let (a, _) = kernel_generators(n);
  let target = Registry::new(a.clone())?;
  let sub = |g: &Generator| match *g {
    Generator::Aux { family: 'b', index } => (Generator::Aux { family: 'a', index }, -1.0),
    other => (other, 1.0),
  };
  let diag = k.substitute(&sub, &target)?;
  let order: Vec<Generator> = a.into_iter().rev().collect();
  Ok(diag.multiple_integral(&order).scalar_part())
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn single_nonvanishing_element() {
    for n in 1..=3 {
      let reg = kernel_registry(n).unwrap();
      let (a, b) = kernel_generators(n);
      let mut gens: Vec<Generator> = a[1..].to_vec();
      gens.push(b[0]);
      let k = GrassmannElement::monomial(&reg, &gens, 1.0).unwrap();
      assert_eq!(kernel_trace(&k, n).unwrap(), 1.0, "n = {n}");
      assert_eq!(kernel_trace(&GrassmannElement::one(&reg), n).unwrap(), 0.0);
    }
  }

  #[test]
  fn generator_count_checked() {
    let reg = kernel_registry(1).unwrap();
    assert!(matches!(kernel_trace(&GrassmannElement::one(&reg), 2), Err(Error::OddGeneratorCount(2, 2))));
  }
}
