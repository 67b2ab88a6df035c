//! Self-checks run by `torsio verify`. Each suite returns one [`Check`] per
//! measured quantity; the caller decides how to report them.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{build_complex, eligible_edges, evaluate_robust, PlanOptions};
use crate::error::{Error, Result};
use crate::geometry::{
  d_length_d_coords, dihedral_angles_from_lengths, dihedral_length_jacobian, perturbed_barycenter, random_placement,
  reseed_interior, MetricCache, Placement, Point,
};
use crate::gluing::fixtures::{ball_pair, coned_ball, layered_self_gluing, solid_torus_pair};
use crate::gluing::{check_gluing, check_self_gluing};
use crate::grassmann::{
  kernel_registry, kernel_trace, minor_generating_function, phi, phi_berezin, Generator, GrassmannElement, Registry,
};
use crate::linalg::{det, submatrix};
use crate::rigidity::RigidConstruction;
use crate::rigidity::RigidContext;
use crate::triangulation::{builtin, Edge, ManifoldName, PachnerMove, Triangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
  ComplexIdentities,
  F3Symmetry,
  Derivatives,
  Placement,
  Pachner,
  Minors,
  Berezin,
  Gluing,
  ZeroLemmas,
  Trace,
}

impl Suite {
  pub const ALL: [Suite; 10] = [
    Suite::ComplexIdentities,
    Suite::F3Symmetry,
    Suite::Derivatives,
    Suite::Placement,
    Suite::Pachner,
    Suite::Minors,
    Suite::Berezin,
    Suite::Gluing,
    Suite::ZeroLemmas,
    Suite::Trace,
  ];

  pub fn as_str(&self) -> &'static str {
    match self {
      Suite::ComplexIdentities => "complex-identities",
      Suite::F3Symmetry => "f3-symmetry",
      Suite::Derivatives => "derivatives",
      Suite::Placement => "placement",
      Suite::Pachner => "pachner",
      Suite::Minors => "minors",
      Suite::Berezin => "berezin",
      Suite::Gluing => "gluing",
      Suite::ZeroLemmas => "zero-lemmas",
      Suite::Trace => "trace",
    }
  }

  pub fn default_tolerance(&self) -> f64 {
    match self {
      Suite::ComplexIdentities | Suite::ZeroLemmas => 1e-8,
      Suite::F3Symmetry => 1e-9,
      Suite::Derivatives | Suite::Placement | Suite::Pachner | Suite::Gluing => 1e-6,
      Suite::Minors => 1e-10,
      Suite::Berezin => 0.0,
      Suite::Trace => 1e-12,
    }
  }
}

impl fmt::Display for Suite {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { f.write_str(self.as_str()) }
}

impl FromStr for Suite {
  type Err = Error;

  fn from_str(s: &str) -> Result<Self> {
    Suite::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| Error::InvalidInput(format!("unknown suite `{s}`")))
  }
}

/// One measured quantity against its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
  pub suite: Suite,
  pub name: String,
  pub value: f64,
  pub tolerance: f64,
  pub passed: bool,
}

impl Check {
  fn new(suite: Suite, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
    Check { suite, name: name.into(), value, tolerance, passed: value <= tolerance }
  }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
  pub seeds: Vec<u64>,
  /// Overrides every suite's default tolerance.
  pub tolerance: Option<f64>,
}

impl Default for VerifyOptions {
  fn default() -> Self { VerifyOptions { seeds: (0..10).collect(), tolerance: None } }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
  let tol = opts.tolerance.unwrap_or_else(|| suite.default_tolerance());
  let seeds = &opts.seeds;
  let first = seeds.first().copied().unwrap_or(0);
  match suite {
    Suite::ComplexIdentities => complex_identities(tol, seeds),
    Suite::F3Symmetry => f3_symmetry(tol, seeds),
    Suite::Derivatives => derivatives(tol, first),
    Suite::Placement => placement(tol, seeds),
    Suite::Pachner => pachner(tol, first),
    Suite::Minors => minors(tol, first),
    Suite::Berezin => berezin(tol),
    Suite::Gluing => gluing(tol, &seeds[..seeds.len().min(5)]),
    Suite::ZeroLemmas => zero_lemmas(tol, &seeds[..seeds.len().min(3)]),
    Suite::Trace => trace(tol, first),
  }
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<Check>> {
  let mut out = Vec::new();
  for s in Suite::ALL {
    out.extend(run_suite(s, opts)?);
  }
  Ok(out)
}

fn complex_for(t: &Triangulation, p: &Placement) -> Result<crate::complex::ChainComplex> {
  let cache = MetricCache::new(t, p)?;
  let frame = crate::complex::default_frame(t, p)?;
  let rc = RigidConstruction::greedy_in_order(t, p, RigidContext::Interior, &t.inner_edges())?;
  build_complex(t, p, &cache, &rc, frame, &[], &[])
}

fn complex_identities(tol: f64, seeds: &[u64]) -> Result<Vec<Check>> {
  let mut out = Vec::new();
  for name in ManifoldName::ALL {
    let t = builtin(name);
    let mut worst: f64 = 0.0;
    for &s in seeds {
      let cx = complex_for(&t, &random_placement(&t, s)?)?;
      worst = cx.composition_residuals().into_iter().fold(worst, f64::max);
    }
    out.push(Check::new(Suite::ComplexIdentities, format!("{name}: max relative ‖f_(k+1) f_k‖"), worst, tol));
  }
  Ok(out)
}

fn f3_symmetry(tol: f64, seeds: &[u64]) -> Result<Vec<Check>> {
  let mut out = Vec::new();
  for name in ManifoldName::ALL {
    let t = builtin(name);
    let mut worst: f64 = 0.0;
    for &s in seeds {
      worst = worst.max(complex_for(&t, &random_placement(&t, s)?)?.f3_asymmetry());
    }
    out.push(Check::new(Suite::F3Symmetry, format!("{name}: max |f3_ij − f3_ji| / ‖f3‖"), worst, tol));
  }
  Ok(out)
}

fn random_tetrahedron(rng: &mut ChaCha8Rng) -> [Point; 4] {
  loop {
    let x: [Point; 4] = std::array::from_fn(|_| [rng.gen(), rng.gen(), rng.gen()]);
    let v = |i: usize| nalgebra::Vector3::from(x[i]) - nalgebra::Vector3::from(x[0]);
    if v(1).dot(&v(2).cross(&v(3))).abs() > 1e-2 {
      return x;
    }
  }
}

fn lengths_of(x: &[Point; 4]) -> [f64; 6] {
  let d = |a: usize, b: usize| (0..3).map(|k| (x[a][k] - x[b][k]).powi(2)).sum::<f64>().sqrt();
  crate::triangulation::LOCAL_EDGES.map(|(a, b)| d(a, b))
}

/// Richardson-extrapolated central difference of `f` at `x`.
fn richardson(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
  let c = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
  (4.0 * c(h / 2.0) - c(h)) / 3.0
}

fn derivatives(tol: f64, seed: u64) -> Result<Vec<Check>> {
  let mut rng = ChaCha8Rng::seed_from_u64(seed);
  let (mut worst_len, mut worst_ang): (f64, f64) = (0.0, 0.0);
  for _ in 0..100 {
    let x = random_tetrahedron(&mut rng);
    let l = lengths_of(&x);
    let jac = dihedral_length_jacobian(&l)?;
    for j in 0..6 {
      let col: Vec<f64> = (0..6)
        .map(|i| {
          let f = |s: f64| {
            let mut m = l;
            m[j] = s;
            dihedral_angles_from_lengths(&m).map(|a| a[i]).unwrap_or(f64::NAN)
          };
          richardson(&f, l[j], 1e-5 * l[j])
        })
        .collect();
      let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
      for i in 0..6 {
        worst_ang = worst_ang.max((jac[i][j] - col[i]).abs() / scale);
      }
    }
    let coords = (0..4u32).map(|i| (i, x[i as usize])).collect();
    let p = Placement { coords, seed };
    for (a, b) in crate::triangulation::LOCAL_EDGES {
      let e = Edge::new(a as u32, b as u32);
      let grad = d_length_d_coords(&e, &p)?;
      for (v, g) in grad {
        for k in 0..3 {
          let f = |s: f64| {
            let mut q = p.clone();
            q.coords.get_mut(&v).expect("vertex")[k] = s;
            q.length(&e).unwrap_or(f64::NAN)
          };
          let fd = richardson(&f, p.coords[&v][k], 1e-4);
          worst_len = worst_len.max((g[k] - fd).abs() / g[k].abs().max(1.0));
        }
      }
    }
  }
  Ok(vec![
    Check::new(Suite::Derivatives, "∂l/∂x against finite differences (100 tetrahedra)", worst_len, tol),
    Check::new(Suite::Derivatives, "∂θ/∂l against finite differences (100 tetrahedra)", worst_ang, tol),
  ])
}

fn relative_spread(values: &[f64]) -> f64 {
  let max = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
  let min = values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
  let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
  if scale == 0.0 {
    0.0
  } else {
    (max - min) / scale
  }
}

/// Invariant values of `t` over the given placements, with (𝒞, 𝒟) chosen among
/// the eligible edges for manifolds with boundary.
fn invariant_values(t: &Triangulation, placements: &[Placement], c: &[Edge], d: &[Edge]) -> Result<Vec<f64>> {
  placements.iter().map(|p| Ok(evaluate_robust(t, p, c, d, &PlanOptions::default())?.f64())).collect()
}

/// Placements for the seed-independence checks: full reseeding for closed
/// manifolds, interior-only for manifolds with boundary.
pub fn seed_placements(t: &Triangulation, seeds: &[u64]) -> Result<Vec<Placement>> {
  let base = random_placement(t, seeds.first().copied().unwrap_or(0))?;
  seeds
    .iter()
    .map(|&s| if t.is_closed() { random_placement(t, s) } else { reseed_interior(t, &base, s) })
    .collect()
}

/// First `k` eligible edges as 𝒞 and the next `k` (or the same) as 𝒟.
pub fn sample_boundary_sets(t: &Triangulation, p: &Placement, k: usize) -> Result<(Vec<Edge>, Vec<Edge>)> {
  let el: Vec<Edge> = eligible_edges(t, p, None)?.into_iter().map(|e| t.edges()[e]).collect();
  let k = k.min(el.len());
  let c = el[..k].to_vec();
  let d = if el.len() >= 2 * k { el[k..2 * k].to_vec() } else { c.clone() };
  Ok((c, d))
}

fn placement(tol: f64, seeds: &[u64]) -> Result<Vec<Check>> {
  let mut out = Vec::new();
  for name in [ManifoldName::S3, ManifoldName::S2xS1] {
    let t = builtin(name);
    let v = invariant_values(&t, &seed_placements(&t, seeds)?, &[], &[])?;
    out.push(Check::new(Suite::Placement, format!("{name}: relative spread of I"), relative_spread(&v), tol));
  }
  let balls = [("B3", builtin(ManifoldName::B3)), ("coned B3", coned_ball())];
  for (label, t) in balls {
    let v = invariant_values(&t, &seed_placements(&t, seeds)?, &[], &[])?;
    out.push(Check::new(Suite::Placement, format!("{label}: relative spread of I_(∅,∅)"), relative_spread(&v), tol));
  }
  let t = builtin(ManifoldName::SolidTorus);
  let ps = seed_placements(&t, seeds)?;
  for k in 1..=2 {
    let (c, d) = sample_boundary_sets(&t, &ps[0], k)?;
    let v = invariant_values(&t, &ps, &c, &d)?;
    out.push(Check::new(Suite::Placement, format!("solid-torus: relative spread of I_(C,D), |C| = {k}"), relative_spread(&v), tol));
  }
  Ok(out)
}

/// Applies the first applicable move of `kind` (a 1-4 puts the new vertex near
/// the barycenter), returning the new triangulation and placement.
pub fn apply_first_move(t: &Triangulation, p: &Placement, kind: &str, seed: u64) -> Result<(Triangulation, Placement)> {
  let fresh = t.vertices().iter().max().map_or(0, |v| v + 1);
  let moves = t.applicable_moves(kind, fresh);
  let mut rng = ChaCha8Rng::seed_from_u64(seed);
  let mut order: Vec<usize> = (0..moves.len()).collect();
  for i in (1..order.len()).rev() {
    order.swap(i, rng.gen_range(0..=i));
  }
  for i in order {
    let mv = &moves[i];
    let q = match mv {
      PachnerMove::OneFour { tetrahedron, new_vertex } => p.with_vertex(*new_vertex, perturbed_barycenter(p, tetrahedron, seed)?),
      _ => p.clone(),
    };
    let u = t.apply_pachner(mv)?;
    if crate::geometry::check_general_position(&u, &q).is_ok() {
      return Ok((u, q));
    }
  }
  Err(Error::NotApplicable(format!("no {kind} move applies")))
}

fn relative_change(a: f64, b: f64) -> f64 {
  let scale = a.abs().max(b.abs());
  if scale == 0.0 {
    0.0
  } else {
    (a - b).abs() / scale
  }
}

fn pachner(tol: f64, seed: u64) -> Result<Vec<Check>> {
  let mut out = Vec::new();
  for name in [ManifoldName::S3, ManifoldName::S2xS1, ManifoldName::SolidTorus] {
    let t = builtin(name);
    let p = random_placement(&t, seed)?;
    let (c, d) = if t.is_closed() { (vec![], vec![]) } else { sample_boundary_sets(&t, &p, 1)? };
    let value = |t: &Triangulation, p: &Placement| -> Result<f64> { Ok(evaluate_robust(t, p, &c, &d, &PlanOptions::default())?.f64()) };
    let base = value(&t, &p)?;
    let (t1, p1) = apply_first_move(&t, &p, "1-4", seed)?;
    let after14 = value(&t1, &p1)?;
    out.push(Check::new(Suite::Pachner, format!("{name}: 1→4"), relative_change(base, after14), tol));
    // S³ as ∂Δ⁴ has no 2→3 move; the subdivided one does
    let (t0, p0) = if t.applicable_moves("2-3", 0).is_empty() { (t1, p1) } else { (t, p) };
    let (t2, p2) = apply_first_move(&t0, &p0, "2-3", seed)?;
    out.push(Check::new(Suite::Pachner, format!("{name}: 2→3"), relative_change(base, value(&t2, &p2)?), tol));
  }
  Ok(out)
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> { DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0)) }

fn minors(tol: f64, seed: u64) -> Result<Vec<Check>> {
  let mut rng = ChaCha8Rng::seed_from_u64(seed);
  let mut worst_exp: f64 = 0.0;
  for n in 1..=5 {
    for _ in 0..4 {
      let m = random_matrix(&mut rng, n, n);
      let rows: Vec<Generator> = (0..n as u32).map(|i| Generator::Aux { family: 'r', index: i }).collect();
      let cols: Vec<Generator> = (0..n as u32).map(|i| Generator::Aux { family: 's', index: i }).collect();
      let f = minor_generating_function(&m, &rows, &cols)?;
      for k in 1..=n {
        for ri in crate::grassmann::combinations(n, k) {
          for ci in crate::grassmann::combinations(n, k) {
            let gens: Vec<Generator> = ri.iter().zip(&ci).flat_map(|(&i, &j)| [rows[i], cols[j]]).collect();
            let want = det(&submatrix(&m, &ri, &ci));
            worst_exp = worst_exp.max((f.coefficient(&gens) - want).abs() / want.abs().max(1.0));
          }
        }
      }
    }
  }
  let mut worst_phi: f64 = 0.0;
  for (ni, nb) in [(1, 2), (2, 2), (3, 2), (2, 3)] {
    let m = random_matrix(&mut rng, ni + nb, ni + nb);
    let inner: Vec<Edge> = (0..ni as u32).map(|i| Edge::new(2 * i, 2 * i + 1)).collect();
    let boundary: Vec<Edge> = (0..nb as u32).map(|i| Edge::new(100 + 2 * i, 101 + 2 * i)).collect();
    let a = phi(&m, &inner, &boundary)?.element();
    let b = phi_berezin(&m, &inner, &boundary)?;
    let all: Vec<usize> = (0..ni).collect();
    for k in 0..=nb {
      for ri in crate::grassmann::combinations(nb, k) {
        for ci in crate::grassmann::combinations(nb, k) {
          let r: Vec<usize> = all.iter().copied().chain(ri.iter().map(|i| i + ni)).collect();
          let c: Vec<usize> = all.iter().copied().chain(ci.iter().map(|i| i + ni)).collect();
          let want = det(&submatrix(&m, &r, &c));
          let gens: Vec<Generator> =
            ri.iter().zip(&ci).flat_map(|(&i, &j)| [Generator::a(boundary[i]), Generator::a_star(boundary[j])]).collect();
          let scale = want.abs().max(1.0);
          worst_phi = worst_phi.max((a.coefficient(&gens) - want).abs() / scale).max((b.coefficient(&gens) - want).abs() / scale);
        }
      }
    }
  }
  Ok(vec![
    Check::new(Suite::Minors, "exp f coefficients against determinant minors (n ≤ 5)", worst_exp, tol),
    Check::new(Suite::Minors, "Φ coefficients against bordered minors", worst_phi, tol),
  ])
}

fn berezin(tol: f64) -> Result<Vec<Check>> {
  let reg = Registry::new((0..4).map(|index| Generator::Aux { family: 'x', index }).collect())?;
  let g: Vec<Generator> = reg.generators().to_vec();
  let x = |i: usize| GrassmannElement::generator(&reg, &g[i]);
  let mut worst: f64 = 0.0;
  // ∫ da = 0
  worst = worst.max(GrassmannElement::one(&reg).berezin_integral(&g[0]).max_abs());
  // ∫ a da = 1
  worst = worst.max((x(0)?.berezin_integral(&g[0]).scalar_part() - 1.0).abs());
  // ∫ g h da = g ∫ h da for g free of a
  for u in [x(0)?, x(0)?.multiply(&x(2)?)?, x(3)?.multiply(&x(0)?)?.add(&x(2)?)?] {
    let lhs = x(1)?.multiply(&u)?.berezin_integral(&g[0]);
    let rhs = x(1)?.multiply(&u.berezin_integral(&g[0]))?;
    worst = worst.max(lhs.sub(&rhs)?.max_abs());
  }
  Ok(vec![Check::new(Suite::Berezin, "defining equalities of the Berezin integral", worst, tol)])
}

fn gluing(tol: f64, seeds: &[u64]) -> Result<Vec<Check>> {
  let mut out = Vec::new();
  for pair in [ball_pair as fn(u64) -> Result<_>, solid_torus_pair] {
    let mut worst: f64 = 0.0;
    let mut signs = Vec::new();
    let mut name = "";
    for &s in seeds {
      let f = pair(s)?;
      name = f.name;
      let r = check_gluing(&f.m1, &f.p1, &f.m2, &f.p2, &f.map)?;
      worst = worst.max(r.error());
      signs.push(r.sign());
    }
    let consistent = signs.windows(2).all(|w| w[0] == w[1]);
    out.push(Check::new(Suite::Gluing, format!("{name}: composed vs direct (sign {:+})", signs.first().unwrap_or(&1.0)), worst, tol));
    out.push(Check::new(Suite::Gluing, format!("{name}: one sign across seeds"), if consistent { 0.0 } else { 1.0 }, 0.0));
  }
  Ok(out)
}

fn zero_lemmas(tol: f64, seeds: &[u64]) -> Result<Vec<Check>> {
  let mut out = Vec::new();
  for name in [ManifoldName::S2xI, ManifoldName::T2xI] {
    let (mut composed, mut direct, mut deficient): (f64, f64, bool) = (0.0, 0.0, true);
    for &s in seeds {
      let f = layered_self_gluing(name, s)?;
      let r = check_self_gluing(&f.manifold, &f.placement, &f.map)?;
      composed = composed.max(r.composed.max_abs() / r.scale.max(f64::MIN_POSITIVE));
      direct = direct.max(r.direct.max_abs() / r.direct_scale.max(f64::MIN_POSITIVE));
      deficient &= r.f3_rank.1 < r.f3_rank.0;
    }
    out.push(Check::new(Suite::ZeroLemmas, format!("{name} self-glued: |composed| / scale"), composed, tol));
    out.push(Check::new(Suite::ZeroLemmas, format!("{name} self-glued: |direct I| / scale"), direct, tol));
    out.push(Check::new(Suite::ZeroLemmas, format!("{name} self-glued: f̃3 rank deficient"), if deficient { 0.0 } else { 1.0 }, 0.0));
  }
  Ok(out)
}

/// Σ over monomials f of the coefficient of f in A f.
pub fn operator_trace(k: &GrassmannElement, n: usize) -> Result<f64> {
  let reg = kernel_registry(n)?;
  let k = k.embed(&reg)?;
  let (a, b) = crate::grassmann::kernel_generators(n);
  let order: Vec<Generator> = a.iter().rev().copied().collect();
  let mut total = 0.0;
  for s in 0u32..(1 << (2 * n)) {
    let idx: Vec<usize> = (0..2 * n).filter(|i| s >> i & 1 == 1).collect();
    let fa = GrassmannElement::monomial(&reg, &idx.iter().map(|&i| a[i]).collect::<Vec<_>>(), 1.0)?;
    let image = fa.multiply(&k)?.multiple_integral(&order);
    total += image.coefficient(&idx.iter().map(|&i| b[i]).collect::<Vec<_>>());
  }
  Ok(total)
}

pub fn random_kernel(rng: &mut ChaCha8Rng, n: usize) -> Result<GrassmannElement> {
  let reg = kernel_registry(n)?;
  let mut k = GrassmannElement::zero(&reg);
  for mask in 0u128..(1u128 << (4 * n)) {
    if rng.gen_bool(0.5) {
      k.add_term(mask, rng.gen_range(-1.0..1.0));
    }
  }
  Ok(k)
}

fn trace(tol: f64, seed: u64) -> Result<Vec<Check>> {
  let mut rng = ChaCha8Rng::seed_from_u64(seed);
  let mut worst: f64 = 0.0;
  for i in 0..50 {
    let n = 1 + i % 2;
    let k = random_kernel(&mut rng, n)?;
    worst = worst.max((kernel_trace(&k, n)? - operator_trace(&k, n)?).abs());
  }
  Ok(vec![Check::new(Suite::Trace, "∫K(a,−a) against the operator trace (50 kernels, n ≤ 2)", worst, tol)])
}
