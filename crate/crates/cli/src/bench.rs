use std::sync::Arc;
use std::time::Instant;

use altsum_core::altsum::{em_sum_1d, em_sum_1d_poly};
use altsum_core::boxcalc::{DerivativeOracle, RealFn};
use altsum_core::rational::{int, to_f64};
use altsum_core::{
    evaluate_alt, evaluate_alt_exact, FieldSpec, FormId, Polynomial, QuadratureConfig,
};
use serde_json::{json, Value};

use crate::args::{BenchArgs, GlobalArgs};
use crate::output::{float, float_text, Report, Table};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Poly,
    ExpNeg,
}

impl Family {
    fn parse_list(s: &str) -> CliResult<Vec<Family>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "poly" => Ok(Family::Poly),
                "exp-neg" => Ok(Family::ExpNeg),
                other => Err(CliError::Usage(format!("unknown bench family {other:?}"))),
            })
            .collect()
    }

    fn label(self) -> &'static str {
        match self {
            Family::Poly => "x^5-3x^2+1",
            Family::ExpNeg => "exp(-x)",
        }
    }
}

#[derive(Debug, Clone)]
struct BenchRow {
    function: &'static str,
    m: usize,
    n: u64,
    alt_error: f64,
    em_error: f64,
    alt_time: f64,
    em_time: f64,
}

fn median_time<T>(reps: usize, mut f: impl FnMut() -> CliResult<T>) -> CliResult<(T, f64)> {
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        last = Some(f()?);
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    Ok((
        last.expect("at least one repetition"),
        times[times.len() / 2],
    ))
}

fn poly_family() -> Polynomial {
    Polynomial::from_terms(
        1,
        [(vec![5], int(1)), (vec![2], int(-3)), (vec![0], int(1))],
    )
}

fn exp_neg_field() -> FieldSpec {
    let oracle: DerivativeOracle = Arc::new(|alpha: &[usize]| {
        let sign = if alpha[0].is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let d: RealFn = Arc::new(move |x: &[f64]| Ok(sign * (-x[0]).exp()));
        Some(d)
    });
    FieldSpec::new(1, |x| (-x[0]).exp())
        .with_antiderivative(|x| -(-x[0]).exp())
        .with_derivatives(oracle)
}

fn exp_neg_exact(n: u64) -> f64 {
    -(-(n as f64)).exp_m1() / -(-1f64).exp_m1()
}

fn run_bench(
    families: &[Family],
    ms: (u64, u64),
    ns: &[u64],
    reps: usize,
) -> CliResult<Vec<BenchRow>> {
    let cfg = QuadratureConfig::default();
    let mut rows = Vec::new();
    for &family in families {
        for m in ms.0 as usize..=ms.1 as usize {
            for &n in ns {
                let row = match family {
                    Family::Poly => {
                        let q = poly_family();
                        let field = q.to_field();
                        let exact =
                            (0..n as i64).fold(int(0), |acc, k| acc + q.eval_exact(&[int(k)]));
                        let (alt, alt_time) = median_time(reps, || {
                            Ok(evaluate_alt_exact(&field, m, &[n], FormId::default())?)
                        })?;
                        let (em, em_time) = median_time(reps, || Ok(em_sum_1d_poly(&q, m, n)?))?;
                        BenchRow {
                            function: family.label(),
                            m,
                            n,
                            alt_error: to_f64(&(alt - &exact)).abs(),
                            em_error: to_f64(&(em - &exact)).abs(),
                            alt_time,
                            em_time,
                        }
                    }
                    Family::ExpNeg => {
                        let field = exp_neg_field();
                        let exact = exp_neg_exact(n);
                        let (alt, alt_time) = median_time(reps, || {
                            Ok(evaluate_alt(&field, m, &[n], FormId::default(), &cfg)?
                                .approximation)
                        })?;
                        let (em, em_time) =
                            median_time(reps, || Ok(em_sum_1d(&field, m, n, &cfg)?))?;
                        BenchRow {
                            function: family.label(),
                            m,
                            n,
                            alt_error: (alt - exact).abs(),
                            em_error: (em - exact).abs(),
                            alt_time,
                            em_time,
                        }
                    }
                };
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub fn bench(g: &GlobalArgs, a: &BenchArgs) -> CliResult<Report> {
    let families = Family::parse_list(&a.families)?;
    if a.reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }
    if a.m.0 == 0 {
        return Err(CliError::Usage("orders start at 1".into()));
    }
    let rows = run_bench(&families, a.m, &a.n, a.reps)?;
    let mut table = Table::new(vec![
        "function",
        "m",
        "n",
        "alt_error",
        "em_error",
        "alt_time",
        "em_time",
    ]);
    let mut json_rows: Vec<Value> = Vec::new();
    for r in &rows {
        table.push(vec![
            r.function.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            float_text(r.alt_error),
            float_text(r.em_error),
            float_text(r.alt_time),
            float_text(r.em_time),
        ]);
        json_rows.push(json!({
            "function": r.function,
            "m": r.m,
            "n": r.n,
            "alt_error": float(r.alt_error),
            "em_error": float(r.em_error),
            "alt_time": float(r.alt_time),
            "em_time": float(r.em_time),
        }));
    }
    Ok(Report {
        config: crate::commands::config(
            g,
            "bench",
            json!({
                "families": families.iter().map(|f| f.label()).collect::<Vec<_>>(),
                "m": [a.m.0, a.m.1],
                "n": a.n,
                "reps": a.reps,
            }),
        ),
        result: json!({ "rows": json_rows }),
        diagnostics: json!({ "timing": "wall-clock median in seconds" }),
        table,
    })
}
