use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torsio_core::complex::{evaluate_robust, invariant_boundary, invariant_closed, PlanOptions};
use torsio_core::geometry::{random_placement, Placement};
use torsio_core::grassmann::{Generator, GrassmannElement, Registry};
use torsio_core::triangulation::{builtin, Edge, ManifoldName};

fn registry(n: u32) -> Registry { Registry::new((0..n).map(|index| Generator::Aux { family: 'x', index }).collect()).unwrap() }

fn element(reg: &Registry, seed: u64, parity: Option<u32>) -> GrassmannElement {
  let mut rng = ChaCha8Rng::seed_from_u64(seed);
  let mut e = GrassmannElement::zero(reg);
  for mask in 0u128..(1 << reg.len()) {
    if parity.map_or(false, |p| mask.count_ones() % 2 != p) || !rng.gen_bool(0.5) {
      continue;
    }
    e.add_term(mask, rng.gen_range(-1.0..1.0));
  }
  e
}

fn close(a: &GrassmannElement, b: &GrassmannElement, tol: f64) -> bool {
  a.sub(b).unwrap().max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
  #![proptest_config(ProptestConfig::with_cases(64))]

  #[test]
  fn multiplication_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
    let reg = registry(6);
    let (x, y, z) = (element(&reg, s1, None), element(&reg, s2, None), element(&reg, s3, None));
    let l = x.multiply(&y).unwrap().multiply(&z).unwrap();
    let r = x.multiply(&y.multiply(&z).unwrap()).unwrap();
    prop_assert!(close(&l, &r, 1e-12));
  }

  #[test]
  fn multiplication_is_bilinear(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), c in -3.0f64..3.0) {
    let reg = registry(5);
    let (x, y, z) = (element(&reg, s1, None), element(&reg, s2, None), element(&reg, s3, None));
    let l = x.scale(c).add(&y).unwrap().multiply(&z).unwrap();
    let r = x.multiply(&z).unwrap().scale(c).add(&y.multiply(&z).unwrap()).unwrap();
    prop_assert!(close(&l, &r, 1e-12));
    let l = z.multiply(&x.add(&y).unwrap()).unwrap();
    let r = z.multiply(&x).unwrap().add(&z.multiply(&y).unwrap()).unwrap();
    prop_assert!(close(&l, &r, 1e-12));
  }

  #[test]
  fn generators_anticommute(i in 0u32..6, j in 0u32..6) {
    let reg = registry(6);
    let gi = GrassmannElement::generator(&reg, &Generator::Aux { family: 'x', index: i }).unwrap();
    let gj = GrassmannElement::generator(&reg, &Generator::Aux { family: 'x', index: j }).unwrap();
    let sum = gi.multiply(&gj).unwrap().add(&gj.multiply(&gi).unwrap()).unwrap();
    prop_assert!(sum.is_zero());
  }

  #[test]
  fn odd_elements_anticommute(s1 in any::<u64>(), s2 in any::<u64>()) {
    let reg = registry(6);
    let (x, y) = (element(&reg, s1, Some(1)), element(&reg, s2, Some(1)));
    let sum = x.multiply(&y).unwrap().add(&y.multiply(&x).unwrap()).unwrap();
    prop_assert!(sum.max_abs() < 1e-12);
  }

  #[test]
  fn even_elements_are_central(s1 in any::<u64>(), s2 in any::<u64>()) {
    let reg = registry(6);
    let (x, y) = (element(&reg, s1, Some(0)), element(&reg, s2, None));
    prop_assert!(close(&x.multiply(&y).unwrap(), &y.multiply(&x).unwrap(), 1e-12));
  }

  #[test]
  fn exponential_turns_sums_into_products(s1 in any::<u64>(), s2 in any::<u64>()) {
    let reg = registry(6);
    let mut x = element(&reg, s1, Some(0));
    let mut y = element(&reg, s2, Some(0));
    x.add_term(0, 0.0);
    y.add_term(0, 0.0);
    let l = x.add(&y).unwrap().exponential().unwrap();
    let r = x.exponential().unwrap().multiply(&y.exponential().unwrap()).unwrap();
    prop_assert!(close(&l, &r, 1e-10));
  }

  #[test]
  fn berezin_integral_is_linear_and_nilpotent(s1 in any::<u64>(), s2 in any::<u64>(), i in 0u32..5, c in -2.0f64..2.0) {
    let reg = registry(5);
    let g = Generator::Aux { family: 'x', index: i };
    let (x, y) = (element(&reg, s1, None), element(&reg, s2, None));
    let l = x.scale(c).add(&y).unwrap().berezin_integral(&g);
    let r = x.berezin_integral(&g).scale(c).add(&y.berezin_integral(&g)).unwrap();
    prop_assert!(close(&l, &r, 1e-12));
    prop_assert!(x.berezin_integral(&g).berezin_integral(&g).is_zero());
  }
}

proptest! {
  #![proptest_config(ProptestConfig::with_cases(16))]

  #[test]
  fn sphere_invariant_is_minus_one(seed in any::<u64>()) {
    let t = builtin(ManifoldName::S3);
    let v = invariant_closed(&t, &random_placement(&t, seed).unwrap()).unwrap();
    prop_assert!((v + 1.0).abs() < 1e-8, "{}", v);
  }

  #[test]
  fn relabeling_vertices_keeps_the_invariant(seed in any::<u64>(), shift in 1u32..50) {
    let t = builtin(ManifoldName::SolidTorus);
    let p = random_placement(&t, seed).unwrap();
    let map: HashMap<u32, u32> = t.vertices().iter().map(|&v| (v, (v * 7 + shift) % 101)).collect();
    let u = t.relabeled(&map).unwrap();
    let q = Placement { coords: p.coords.iter().map(|(v, x)| (map[v], *x)).collect(), seed };
    let rc = torsio_core::rigidity::rigid_construction_surface(&t, 0, &p).unwrap();
    let mapped: Vec<usize> = rc
      .edges
      .iter()
      .map(|&e| {
        let e = t.edges()[e];
        u.edge_id(&Edge::new(map[&e.0], map[&e.1])).unwrap()
      })
      .collect();
    let e = t.edges()[rc.complement[0]];
    let e2 = Edge::new(map[&e.0], map[&e.1]);
    let a = invariant_boundary(&t, &p, &[e], &[e]).unwrap();
    let opts = PlanOptions { surface_rcs: Some(vec![mapped]), ..PlanOptions::default() };
    let b = evaluate_robust(&u, &q, &[e2], &[e2], &opts).unwrap().f64();
    prop_assert!((a - b).abs() <= 1e-6 * a.abs(), "{} vs {}", a, b);
  }
}
