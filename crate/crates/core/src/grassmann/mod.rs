//! Finite Grassmann algebra over ℝ with Berezin integration.
//!
//! Monomials are bitmasks over a sorted generator registry; the stored
//! coefficient belongs to the product of the generators in ascending order.
//! Registries are always sorted by [`Generator`]'s order, so embedding an
//! element into a larger registry never changes a sign.

pub mod generating;
pub mod trace;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::Edge;

pub use generating::{combinations, generating_invariant, minor_generating_function, phi, phi_berezin, GeneratingInvariant};
pub use trace::{kernel_generators, kernel_registry, kernel_trace};

pub const MAX_GENERATORS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
  /// a_e, or a_e* when `starred`.
  Edge { edge: Edge, starred: bool },
  /// Free-standing generator such as the a_i, b_i of a kernel.
  Aux { family: char, index: u32 },
}

impl Generator {
  pub fn a(edge: Edge) -> Self { Generator::Edge { edge, starred: false } }

  pub fn a_star(edge: Edge) -> Self { Generator::Edge { edge, starred: true } }
}

impl fmt::Display for Generator {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match self {
      Generator::Edge { edge, starred: false } => write!(f, "a{edge}"),
      Generator::Edge { edge, starred: true } => write!(f, "a*{edge}"),
      Generator::Aux { family, index } => write!(f, "{family}{index}"),
    }
  }
}

/// Sorted, duplicate-free generator list fixing the canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Registry(Arc<[Generator]>);

impl Registry {
  pub fn new(mut gens: Vec<Generator>) -> Result<Self> {
    gens.sort_unstable();
    gens.dedup();
    if gens.len() > MAX_GENERATORS {
      return Err(Error::TooManyGenerators(MAX_GENERATORS));
    }
    Ok(Registry(gens.into()))
  }

  /// Both generators of every listed edge.
  pub fn of_edges(edges: &[Edge]) -> Result<Self> {
    Self::new(edges.iter().flat_map(|&e| [Generator::a(e), Generator::a_star(e)]).collect())
  }

  pub fn generators(&self) -> &[Generator] { &self.0 }

  pub fn len(&self) -> usize { self.0.len() }

  pub fn is_empty(&self) -> bool { self.0.is_empty() }

  pub fn index(&self, g: &Generator) -> Option<usize> { self.0.binary_search(g).ok() }

  pub fn union(&self, other: &Registry) -> Result<Registry> {
    Registry::new(self.0.iter().chain(other.0.iter()).copied().collect())
  }

  fn contains_all(&self, other: &Registry) -> bool { other.0.iter().all(|g| self.index(g).is_some()) }
}

/// (−1)^{number of set bits of `mask` above bit `i`}.
fn sign_above(mask: u128, i: usize) -> f64 {
  let above = if i >= 127 { 0 } else { mask >> (i + 1) };
  if above.count_ones() % 2 == 0 {
    1.0
  } else {
    -1.0
  }
}

/// Sign of x_a · x_b relative to the canonical product over `a | b`.
fn merge_sign(a: u128, b: u128) -> f64 {
  let mut inversions = 0u32;
  let mut rest = b;
  while rest != 0 {
    let j = rest.trailing_zeros() as usize;
    inversions += (if j >= 127 { 0 } else { a >> (j + 1) }).count_ones();
    rest &= rest - 1;
  }
  if inversions % 2 == 0 {
    1.0
  } else {
    -1.0
  }
}

/// Canonical mask and sign of the ordered product of generators with the
/// given registry indices; `None` if an index repeats.
pub fn ordered_product(indices: &[usize]) -> Option<(u128, f64)> {
  let mut mask = 0u128;
  let mut sign = 1.0;
  for &i in indices {
    if mask & (1 << i) != 0 {
      return None;
    }
    sign *= sign_above(mask, i);
    mask |= 1 << i;
  }
  Some((mask, sign))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannElement {
  registry: Registry,
  terms: BTreeMap<u128, f64>,
}

impl GrassmannElement {
  pub fn zero(registry: &Registry) -> Self { GrassmannElement { registry: registry.clone(), terms: BTreeMap::new() } }

  pub fn scalar(registry: &Registry, c: f64) -> Self {
    let mut e = Self::zero(registry);
    e.add_term(0, c);
    e
  }

  pub fn one(registry: &Registry) -> Self { Self::scalar(registry, 1.0) }

  pub fn generator(registry: &Registry, g: &Generator) -> Result<Self> {
    let i = registry.index(g).ok_or(Error::RegistryMismatch)?;
    let mut e = Self::zero(registry);
    e.add_term(1 << i, 1.0);
    Ok(e)
  }

  /// c times the ordered product of `gens`.
  pub fn monomial(registry: &Registry, gens: &[Generator], c: f64) -> Result<Self> {
    let idx: Vec<usize> = gens.iter().map(|g| registry.index(g).ok_or(Error::RegistryMismatch)).collect::<Result<_>>()?;
    let mut e = Self::zero(registry);
    if let Some((mask, s)) = ordered_product(&idx) {
      e.add_term(mask, s * c);
    }
    Ok(e)
  }

  pub fn registry(&self) -> &Registry { &self.registry }

  /// Canonical (mask, coefficient) pairs.
  pub fn terms(&self) -> impl Iterator<Item = (u128, f64)> + '_ { self.terms.iter().map(|(&m, &c)| (m, c)) }

  pub fn num_terms(&self) -> usize { self.terms.len() }

  pub fn is_zero(&self) -> bool { self.terms.is_empty() }

  pub fn add_term(&mut self, mask: u128, c: f64) {
    if c == 0.0 {
      return;
    }
    let slot = self.terms.entry(mask).or_insert(0.0);
    *slot += c;
    if *slot == 0.0 {
      self.terms.remove(&mask);
    }
  }

  /// Coefficient of the ordered product of `gens` (0 if a generator repeats).
  pub fn coefficient(&self, gens: &[Generator]) -> f64 {
    let mut idx = Vec::with_capacity(gens.len());
    for g in gens {
      match self.registry.index(g) {
        Some(i) => idx.push(i),
        None => return 0.0,
      }
    }
    match ordered_product(&idx) {
      Some((mask, s)) => s * self.terms.get(&mask).copied().unwrap_or(0.0),
      None => 0.0,
    }
  }

  pub fn scalar_part(&self) -> f64 { self.terms.get(&0).copied().unwrap_or(0.0) }

  /// Generators of a canonical monomial, ascending.
  pub fn generators_of(&self, mask: u128) -> Vec<Generator> {
    (0..self.registry.len()).filter(|i| mask & (1 << i) != 0).map(|i| self.registry.0[i]).collect()
  }

  pub fn max_abs(&self) -> f64 { self.terms.values().fold(0.0, |m, c| m.max(c.abs())) }

  pub fn l1(&self) -> f64 { self.terms.values().map(|c| c.abs()).sum() }

  pub fn is_even(&self) -> bool { self.terms.keys().all(|m| m.count_ones() % 2 == 0) }

  /// Same element over a registry containing this one.
  pub fn embed(&self, target: &Registry) -> Result<Self> {
    if *target == self.registry {
      return Ok(self.clone());
    }
    if !target.contains_all(&self.registry) {
      return Err(Error::RegistryMismatch);
    }
    let map: Vec<usize> = self.registry.0.iter().map(|g| target.index(g).expect("checked")).collect();
    let mut out = Self::zero(target);
    for (&m, &c) in &self.terms {
      let mut nm = 0u128;
      for (i, &j) in map.iter().enumerate() {
        if m & (1 << i) != 0 {
          nm |= 1 << j;
        }
      }
      // order-preserving relabeling: no sign change
      out.add_term(nm, c);
    }
    Ok(out)
  }

  fn same_registry(&self, other: &Self) -> Result<()> {
    if self.registry == other.registry {
      Ok(())
    } else {
      Err(Error::RegistryMismatch)
    }
  }

  pub fn add(&self, other: &Self) -> Result<Self> {
    self.same_registry(other)?;
    let mut out = self.clone();
    for (&m, &c) in &other.terms {
      out.add_term(m, c);
    }
    Ok(out)
  }

  pub fn sub(&self, other: &Self) -> Result<Self> { self.add(&other.scale(-1.0)) }

  pub fn scale(&self, s: f64) -> Self {
    let mut out = Self::zero(&self.registry);
    if s != 0.0 {
      for (&m, &c) in &self.terms {
        out.add_term(m, c * s);
      }
    }
    out
  }

  pub fn multiply(&self, other: &Self) -> Result<Self> {
    self.same_registry(other)?;
    let mut acc: BTreeMap<u128, f64> = BTreeMap::new();
    for (&m1, &c1) in &self.terms {
      for (&m2, &c2) in &other.terms {
        if m1 & m2 != 0 {
          continue;
        }
        *acc.entry(m1 | m2).or_insert(0.0) += merge_sign(m1, m2) * c1 * c2;
      }
    }
    acc.retain(|_, c| *c != 0.0);
    Ok(GrassmannElement { registry: self.registry.clone(), terms: acc })
  }

  /// Σ uᵏ/k! for an even element; the scalar part contributes e^{c₀}.
  pub fn exponential(&self) -> Result<Self> {
    if !self.is_even() {
      return Err(Error::OddInput);
    }
    let c0 = self.scalar_part();
    let mut nil = self.clone();
    nil.terms.remove(&0);
    let mut out = Self::one(&self.registry);
    let mut power = Self::one(&self.registry);
    let mut k = 1.0;
    loop {
      power = power.multiply(&nil)?.scale(1.0 / k);
      if power.is_zero() {
        break;
      }
      out = out.add(&power)?;
      k += 1.0;
    }
    Ok(out.scale(c0.exp()))
  }

  /// ∫ u da_g: terms without g vanish, g is moved to the far right and dropped.
  pub fn berezin_integral(&self, g: &Generator) -> Self {
    let mut out = Self::zero(&self.registry);
    let Some(i) = self.registry.index(g) else { return out };
    let bit = 1u128 << i;
    for (&m, &c) in &self.terms {
      if m & bit != 0 {
        out.add_term(m & !bit, sign_above(m, i) * c);
      }
    }
    out
  }

  /// Iterated integral; the first differential in the list is applied first.
  pub fn multiple_integral(&self, differentials: &[Generator]) -> Self {
    differentials.iter().fold(self.clone(), |acc, g| acc.berezin_integral(g))
  }

  /// ∏ da_e* da_e over the edges in order, each pair applied as da_e* then da_e.
  pub fn integrate_edges(&self, edges: &[Edge]) -> Self {
    let diffs: Vec<Generator> = edges.iter().flat_map(|&e| [Generator::a_star(e), Generator::a(e)]).collect();
    self.multiple_integral(&diffs)
  }

  /// Algebra homomorphism sending each generator to `c·g'` per `map`
  /// (unlisted generators map to themselves) into `target`.
  pub fn substitute(&self, map: &dyn Fn(&Generator) -> (Generator, f64), target: &Registry) -> Result<Self> {
    let images: Vec<(usize, f64)> = self
      .registry
      .0
      .iter()
      .map(|g| {
        let (h, c) = map(g);
        target.index(&h).map(|j| (j, c)).ok_or(Error::RegistryMismatch)
      })
      .collect::<Result<_>>()?;
    let mut out = Self::zero(target);
    for (&m, &c) in &self.terms {
      let mut idx = Vec::with_capacity(m.count_ones() as usize);
      let mut coeff = c;
      for (i, &(j, s)) in images.iter().enumerate() {
        if m & (1 << i) != 0 {
          idx.push(j);
          coeff *= s;
        }
      }
      if let Some((nm, sign)) = ordered_product(&idx) {
        out.add_term(nm, sign * coeff);
      }
    }
    Ok(out)
  }

  /// Same element over a smaller registry; fails if a dropped generator is used.
  pub fn restrict(&self, target: &Registry) -> Result<Self> {
    let mut out = Self::zero(target);
    for (&m, &c) in &self.terms {
      let gens = self.generators_of(m);
      let idx: Vec<usize> = gens.iter().map(|g| target.index(g).ok_or(Error::RegistryMismatch)).collect::<Result<_>>()?;
      let (nm, s) = ordered_product(&idx).expect("distinct generators");
      out.add_term(nm, s * c);
    }
    Ok(out)
  }

  /// Product of elements over disjoint or overlapping registries, taken in the union.
  pub fn product(&self, other: &Self) -> Result<Self> {
    let reg = self.registry.union(&other.registry)?;
    self.embed(&reg)?.multiply(&other.embed(&reg)?)
  }

  /// Drops terms with |c| ≤ tol.
  pub fn pruned(&self, tol: f64) -> Self {
    let mut out = self.clone();
    out.terms.retain(|_, c| c.abs() > tol);
    out
  }

  /// Serializable form: (generator names in canonical order, coefficient).
  pub fn to_serializable(&self) -> Vec<(Vec<String>, f64)> {
    self.terms.iter().map(|(&m, &c)| (self.generators_of(m).iter().map(|g| g.to_string()).collect(), c)).collect()
  }

  pub fn to_json(&self) -> serde_json::Value { serde_json::to_value(self.to_serializable()).expect("plain data") }
}
