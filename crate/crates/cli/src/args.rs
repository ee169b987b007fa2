use std::path::PathBuf;

use altsum_core::FormId;
use clap::{Args, Parser, Subcommand};

use crate::output::Format;
use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "altsum",
    version,
    about = "Integral-only summation of multiple sums, series and polytope sums"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads; falls back to ALTSUM_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact gamma and tau coefficients for one order.
    Coeffs(CoeffsArgs),
    /// Integral-only approximation of a finite multiple sum.
    Sum(SumArgs),
    /// Generalized sum of a possibly divergent series.
    Series(SeriesArgs),
    /// Tight and coarse remainder bounds.
    Bound(BoundArgs),
    /// Unimodular refinement of a half-open cone.
    Decompose(DecomposeArgs),
    /// Lattice-point counts and sums over a polytope.
    Polytope(PolytopeArgs),
    /// Alt versus Euler-Maclaurin accuracy and timing.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    #[arg(long = "quad-nodes", default_value_t = 8)]
    pub nodes: usize,
    #[arg(long = "quad-panels", default_value_t = 2)]
    pub panels: usize,
    #[arg(long = "quad-tol", default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long = "quad-refinements", default_value_t = 3)]
    pub refinements: usize,
}

impl QuadArgs {
    pub fn config(&self) -> CliResult<altsum_core::QuadratureConfig> {
        let cfg = altsum_core::QuadratureConfig {
            nodes_per_panel: self.nodes,
            panels_per_unit: self.panels,
            refinement_tolerance: self.tol,
            max_refinements: self.refinements,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Args)]
pub struct SumArgs {
    #[arg(long)]
    pub m: usize,
    /// Upper limits n1,n2,...; the dimension is their count.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: String,
    /// Antiderivative with mixed partial d^p F / dx1...dxp = f.
    #[arg(long = "F", allow_hyphen_values = true)]
    pub big_f: Option<String>,
    #[arg(long, value_parser = parse_form, default_value = "tau-grouped-right")]
    pub form: FormId,
    #[arg(long)]
    pub force_quad: bool,
    #[arg(long)]
    pub compare_em: bool,
    #[arg(long)]
    pub verbose: bool,
    /// Partial derivative "a1,...,ap:EXPR"; repeatable.
    #[arg(long = "deriv", allow_hyphen_values = true)]
    pub derivs: Vec<String>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub m0: usize,
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: String,
    #[arg(long = "F", allow_hyphen_values = true)]
    pub big_f: String,
    /// Shift c1,...,cp; the dimension is its length.
    #[arg(long, value_delimiter = ',')]
    pub shift: Option<Vec<u64>>,
    /// Dimension, needed only when --shift is absent.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long = "M2m")]
    pub m2m: Option<f64>,
    /// Evaluate at every diagonal shift t*1 for a <= t <= b.
    #[arg(long, value_parser = parse_range)]
    pub scan_shifts: Option<(u64, u64)>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long = "M2m")]
    pub m2m: f64,
    #[arg(long)]
    pub tight: bool,
    /// Use the factor 1.001, valid for m >= 2.
    #[arg(long)]
    pub strict_factor: bool,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Generators as matrix columns, rows separated by ';'.
    #[arg(long)]
    pub matrix: String,
    /// 1 marks a strict coordinate, 0 a closed one.
    #[arg(long, value_delimiter = ',')]
    pub strict: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub apex: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct PolytopeArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, conflicts_with_all = ["f", "support", "m"])]
    pub count: bool,
    #[arg(long = "f", requires_all = ["support", "m"], allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Support box of f, "lo1,hi1;lo2,hi2;...".
    #[arg(long, allow_hyphen_values = true)]
    pub support: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated subset of "poly,exp-neg"; may be empty.
    #[arg(long, default_value = "poly,exp-neg")]
    pub families: String,
    #[arg(long, value_parser = parse_range, default_value = "1:4")]
    pub m: (u64, u64),
    #[arg(long, value_delimiter = ',', default_value = "10,100")]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| format!("bad list entry {t:?}"))
        })
        .collect()
}

pub fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range start {a:?}"))?;
    let b: u64 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad range end {b:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

fn parse_form(s: &str) -> Result<FormId, String> {
    s.parse::<FormId>().map_err(|e| e.to_string())
}

/// "lo1,hi1;lo2,hi2" into per-axis bounds.
pub fn parse_support(s: &str) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for axis in s.split(';') {
        let v: Vec<f64> = parse_list(axis).map_err(CliError::Usage)?;
        if v.len() != 2 {
            return Err(CliError::Usage(format!(
                "support axis {axis:?} needs lo,hi"
            )));
        }
        lo.push(v[0]);
        hi.push(v[1]);
    }
    Ok((lo, hi))
}
