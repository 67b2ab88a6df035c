use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "torsio", version, about = "Geometric torsion invariants of triangulated 3-manifolds")]
pub struct Cli {
  #[command(subcommand)]
  pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
  /// Invariant or generating function of one manifold, checked across placements.
  Invariant(InvariantArgs),
  /// Run built-in verification suites.
  Verify(VerifyArgs),
  /// Glue two manifolds (or one to itself) and compare both sides of the composition law.
  Glue(GlueArgs),
  /// Write a built-in triangulation with a random placement.
  Builtin(BuiltinArgs),
  /// Write a ready-made gluing problem (manifolds and map) into a directory.
  Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct Common {
  /// Base seed for random placements.
  #[arg(long, env = "TORSIO_SEED", default_value_t = 0)]
  pub seed: u64,
  /// Print the JSON report to stdout instead of the table.
  #[arg(long)]
  pub json: bool,
}

#[derive(Debug, Args)]
pub struct InvariantArgs {
  #[arg(long)]
  pub manifold: PathBuf,
  /// Number of placements to compare.
  #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
  pub seeds: u64,
  /// Largest allowed relative spread between placements.
  #[arg(long, default_value_t = 1e-6, value_parser = positive)]
  pub tolerance: f64,
  /// JSON report file.
  #[arg(long)]
  pub out: Option<PathBuf>,
  #[command(flatten)]
  pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
  /// Suite name, or `all`.
  #[arg(long, default_value = "all")]
  pub suite: String,
  #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
  pub seeds: u64,
  /// Overrides the per-suite tolerance.
  #[arg(long, value_parser = positive)]
  pub tolerance: Option<f64>,
  #[arg(long)]
  pub out: Option<PathBuf>,
  #[command(flatten)]
  pub common: Common,
}

#[derive(Debug, Args)]
pub struct GlueArgs {
  #[arg(long)]
  pub manifold: PathBuf,
  #[arg(long, required_unless_present = "self_glue", conflicts_with = "self_glue")]
  pub manifold2: Option<PathBuf>,
  #[arg(long)]
  pub map: PathBuf,
  /// Glue the two mapped boundary components of `--manifold` to each other.
  #[arg(long)]
  pub self_glue: bool,
  /// Move the second manifold rigidly onto the first before gluing.
  #[arg(long)]
  pub transport: bool,
  /// Defaults to 1e-6 relative for pairs and 1e-8 of the scale for self-gluing.
  #[arg(long, value_parser = positive)]
  pub tolerance: Option<f64>,
  /// Glued manifold file.
  #[arg(long)]
  pub out: Option<PathBuf>,
  /// JSON report file.
  #[arg(long)]
  pub report: Option<PathBuf>,
  #[command(flatten)]
  pub common: Common,
}

#[derive(Debug, Args)]
pub struct BuiltinArgs {
  /// S3, B3, S2xI, S2xS1, solid-torus or T2xI.
  pub name: String,
  #[arg(long)]
  pub out: PathBuf,
  /// Leave the coordinates out of the file.
  #[arg(long)]
  pub no_coordinates: bool,
  #[arg(long, env = "TORSIO_SEED", default_value_t = 0)]
  pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FixtureName {
  BallPair,
  TorusPair,
  #[value(name = "S2xI")]
  S2xI,
  #[value(name = "T2xI")]
  T2xI,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
  #[arg(value_enum)]
  pub name: FixtureName,
  /// Directory receiving `m1.json`, `m2.json` (pairs only) and `map.json`.
  #[arg(long)]
  pub out: PathBuf,
  #[arg(long, env = "TORSIO_SEED", default_value_t = 0)]
  pub seed: u64,
}

fn positive(s: &str) -> Result<f64, String> {
  match s.parse::<f64>() {
    Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
    Ok(_) => Err("tolerance must be positive".into()),
    Err(e) => Err(e.to_string()),
  }
}
