use std::path::Path;

use serde_json::{json, Value};
use torsio_core::complex::PlanOptions;
use torsio_core::geometry::{check_general_position, random_placement, reseed_interior, Placement};
use torsio_core::gluing::fixtures::{ball_pair, layered_self_gluing, partner_placement, solid_torus_pair};
use torsio_core::gluing::{check_gluing, check_self_gluing, glue, self_glue, transport_placement, GluingMap};
use torsio_core::grassmann::generating_invariant;

use torsio_core::triangulation::{builtin, ManifoldName, Triangulation, TriangulationFile};
use torsio_core::verify::{run_suite, Suite, VerifyOptions};

use crate::args::{BuiltinArgs, Command, FixtureArgs, FixtureName, GlueArgs, InvariantArgs, VerifyArgs};
use crate::report::{emit, manifold_summary, read_manifold, read_text, relative_difference, verdict, write_text};
use crate::CliError;

/// RMS residual allowed when moving the second manifold onto the first.
const TRANSPORT_TOL: f64 = 1e-8;

pub fn run(command: Command) -> Result<(), CliError> {
  match command {
    Command::Invariant(a) => invariant(a),
    Command::Verify(a) => verify(a),
    Command::Glue(a) if a.self_glue => glue_self(a),
    Command::Glue(a) => glue_pair(a),
    Command::Builtin(a) => write_builtin(a),
    Command::Fixture(a) => write_fixture(a),
  }
}

/// The file's coordinates when present, a random placement otherwise.
fn placement_of(file: &TriangulationFile, t: &Triangulation, seed: u64) -> Result<Placement, CliError> {
  match file.placement(seed) {
    Some(p) => {
      check_general_position(t, &p)?;
      Ok(p)
    }
    None => Ok(random_placement(t, seed)?),
  }
}

fn invariant(a: InvariantArgs) -> Result<(), CliError> {
  let file = read_manifold(&a.manifold)?;
  let t = file.triangulation()?;
  let base = placement_of(&file, &t, a.common.seed)?;
  let seeds: Vec<u64> = (0..a.seeds).map(|i| a.common.seed.wrapping_add(i)).collect();
  let mut placements = vec![base.clone()];
  for &s in &seeds[1..] {
    // boundary invariants depend on the boundary metric, so only the interior moves
    placements.push(if t.is_closed() { random_placement(&t, s)? } else { reseed_interior(&t, &base, s)? });
  }
  let values = placements
    .iter()
    .map(|p| Ok(generating_invariant(&t, p, &PlanOptions::default())?.element))
    .collect::<Result<Vec<_>, CliError>>()?;
  let reference = &values[0];
  let mut spread: f64 = 0.0;
  for v in &values[1..] {
    spread = spread.max(relative_difference(v, reference)?);
  }
  let passed = spread <= a.tolerance;
  let scalars: Vec<f64> = values.iter().map(|v| v.scalar_part()).collect();
  let has_generators = !reference.registry().is_empty();
  let report = json!({
    "command": "invariant",
    "manifold": manifold_summary(&t),
    "seeds": placements.iter().map(|p| p.seed).collect::<Vec<_>>(),
    "invariant": scalars[0],
    "values": scalars,
    "generating_function": if has_generators { reference.to_json() } else { Value::Null },
    "generators": reference.registry().len(),
    "spread": spread,
    "tolerance": a.tolerance,
    "passed": passed,
  });
  let mut table = vec![
    ("manifold".to_string(), a.manifold.display().to_string()),
    ("invariant".to_string(), format!("{:.12e}", scalars[0])),
  ];
  if has_generators {
    table.push(("generators".into(), reference.registry().len().to_string()));
    table.push(("terms".into(), reference.num_terms().to_string()));
  }
  for (p, v) in placements.iter().zip(&scalars) {
    table.push((format!("seed {}", p.seed), format!("{v:.12e}")));
  }
  table.push(("spread".into(), format!("{spread:.3e} (tolerance {:.1e}) {}", a.tolerance, verdict(passed))));
  emit(&report, a.out.as_deref(), a.common.json, &table)?;
  if passed {
    Ok(())
  } else {
    Err(CliError::Tolerance(format!("placement spread {spread:e} above {:e}", a.tolerance)))
  }
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
  let suites: Vec<Suite> = if a.suite == "all" { Suite::ALL.to_vec() } else { vec![a.suite.parse()?] };
  let opts = VerifyOptions {
    seeds: (0..a.seeds).map(|i| a.common.seed.wrapping_add(i)).collect(),
    tolerance: a.tolerance,
  };
  let mut checks = Vec::new();
  for s in suites {
    checks.extend(run_suite(s, &opts)?);
  }
  let failed = checks.iter().filter(|c| !c.passed).count();
  let report = json!({ "command": "verify", "seeds": opts.seeds, "checks": checks, "failed": failed });
  let table: Vec<(String, String)> = checks
    .iter()
    .map(|c| (format!("{} {}", verdict(c.passed), c.suite), format!("{:<48} {:.3e} (tolerance {:.1e})", c.name, c.value, c.tolerance)))
    .collect();
  emit(&report, a.out.as_deref(), a.common.json, &table)?;
  if failed == 0 {
    Ok(())
  } else {
    Err(CliError::Tolerance(format!("{failed} of {} checks failed", checks.len())))
  }
}

fn read_map(path: &Path) -> Result<GluingMap, CliError> {
  GluingMap::from_json(&read_text(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn glue_pair(a: GlueArgs) -> Result<(), CliError> {
  let map = read_map(&a.map)?;
  let f1 = read_manifold(&a.manifold)?;
  let path2 = a.manifold2.as_deref().expect("clap requires --manifold2 without --self-glue");
  let f2 = read_manifold(path2)?;
  let (m1, m2) = (f1.triangulation()?, f2.triangulation()?);
  let p1 = placement_of(&f1, &m1, a.common.seed)?;
  let mut p2 = match f2.placement(a.common.seed) {
    Some(p) => p,
    None => partner_placement(&m2, &p1, &map, a.common.seed ^ 0x5EED)?,
  };
  if a.transport {
    p2 = transport_placement(&p1, &p2, &map, TRANSPORT_TOL)?;
  }
  let glued = glue(&m1, &p1, &m2, &p2, &map)?;
  let r = check_gluing(&m1, &p1, &m2, &p2, &map)?;
  let tol = a.tolerance.unwrap_or(1e-6);
  let passed = r.error() <= tol;
  if let Some(out) = &a.out {
    write_text(out, &TriangulationFile::from_triangulation(&glued.manifold, Some(&glued.placement)).to_json())?;
  }
  let report = json!({
    "command": "glue",
    "glued": manifold_summary(&glued.manifold),
    "composed": r.composed.to_json(),
    "direct": r.direct.to_json(),
    "error": r.error(),
    "sign": r.sign(),
    "tolerance": tol,
    "passed": passed,
  });
  let table = vec![
    ("glued".to_string(), format!("{} vertices, {} tetrahedra", glued.manifold.vertices().len(), glued.manifold.tetrahedra().len())),
    ("composed (scalar part)".into(), format!("{:.12e}", r.composed.scalar_part())),
    ("direct (scalar part)".into(), format!("{:.12e}", r.direct.scalar_part())),
    ("terms".into(), r.direct.num_terms().to_string()),
    ("sign".into(), format!("{:+}", r.sign())),
    ("relative error".into(), format!("{:.3e} (tolerance {tol:.1e}) {}", r.error(), verdict(passed))),
  ];
  emit(&report, a.report.as_deref(), a.common.json, &table)?;
  if passed {
    Ok(())
  } else {
    Err(CliError::Tolerance(format!("composed and direct differ by {:e}", r.error())))
  }
}

fn glue_self(a: GlueArgs) -> Result<(), CliError> {
  let map = read_map(&a.map)?;
  let file = read_manifold(&a.manifold)?;
  let m = file.triangulation()?;
  let p = placement_of(&file, &m, a.common.seed)?;
  let sg = self_glue(&m, &p, &map)?;
  let r = check_self_gluing(&m, &p, &map)?;
  let tol = a.tolerance.unwrap_or(1e-8);
  let composed = r.composed.max_abs() / r.scale.max(f64::MIN_POSITIVE);
  let direct = r.direct.max_abs() / r.direct_scale.max(f64::MIN_POSITIVE);
  let deficient = r.f3_rank.1 < r.f3_rank.0;
  let passed = composed <= tol && direct <= tol && deficient;
  if let Some(out) = &a.out {
    write_text(out, &TriangulationFile::from_triangulation(&sg.manifold, Some(&sg.placement)).to_json())?;
  }
  let report = json!({
    "command": "glue",
    "self_glue": true,
    "glued": manifold_summary(&sg.manifold),
    "composed": r.composed.to_json(),
    "composed_relative": composed,
    "direct": r.direct.to_json(),
    "direct_relative": direct,
    "f3_size": r.f3_rank.0,
    "f3_rank": r.f3_rank.1,
    "tolerance": tol,
    "passed": passed,
  });
  let table = vec![
    ("glued".to_string(), format!("{} vertices, {} tetrahedra", sg.manifold.vertices().len(), sg.manifold.tetrahedra().len())),
    ("|composed| / scale".into(), format!("{composed:.3e} {}", verdict(composed <= tol))),
    ("|direct| / scale".into(), format!("{direct:.3e} {}", verdict(direct <= tol))),
    ("f3 rank".into(), format!("{} of {} {}", r.f3_rank.1, r.f3_rank.0, verdict(deficient))),
  ];
  emit(&report, a.report.as_deref(), a.common.json, &table)?;
  if passed {
    Ok(())
  } else {
    Err(CliError::Tolerance("self-gluing value is not zero".into()))
  }
}

fn write_builtin(a: BuiltinArgs) -> Result<(), CliError> {
  let name: ManifoldName = a.name.parse()?;
  let t = builtin(name);
  let p = if a.no_coordinates { None } else { Some(random_placement(&t, a.seed)?) };
  write_text(&a.out, &TriangulationFile::from_triangulation(&t, p.as_ref()).to_json())
}

fn write_fixture(a: FixtureArgs) -> Result<(), CliError> {
  std::fs::create_dir_all(&a.out).map_err(|e| CliError::Io(format!("{}: {e}", a.out.display())))?;
  let file = |name: &str| a.out.join(name);
  match a.name {
    FixtureName::BallPair | FixtureName::TorusPair => {
      let f = if matches!(a.name, FixtureName::BallPair) { ball_pair(a.seed)? } else { solid_torus_pair(a.seed)? };
      write_text(&file("m1.json"), &TriangulationFile::from_triangulation(&f.m1, Some(&f.p1)).to_json())?;
      write_text(&file("m2.json"), &TriangulationFile::from_triangulation(&f.m2, Some(&f.p2)).to_json())?;
      write_text(&file("map.json"), &f.map.to_json())
    }
    FixtureName::S2xI | FixtureName::T2xI => {
      let name = if matches!(a.name, FixtureName::S2xI) { ManifoldName::S2xI } else { ManifoldName::T2xI };
      let f = layered_self_gluing(name, a.seed)?;
      write_text(&file("m1.json"), &TriangulationFile::from_triangulation(&f.manifold, Some(&f.placement)).to_json())?;
      write_text(&file("map.json"), &f.map.to_json())
    }
  }
}
