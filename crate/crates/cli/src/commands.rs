use altsum_core::altsum::{em_sum_1d, em_sum_1d_poly, exact_sum_rational, IntegrationMethod};
use altsum_core::bounds::{bound_coarse, bound_tight, kappa, lambda_star};
use altsum_core::conedecomp::HalfOpenCone;
use altsum_core::exprdsl::field_from_exprs;
use altsum_core::polytope::{count_with, polytope_alt_sum_with};
use altsum_core::rational::to_f64;
use altsum_core::series::generalized_sum_exact;
use altsum_core::{
    build_plan, evaluate_alt_exact, evaluate_alt_with, exact_polytope_sum, exact_sum, gamma_table,
    generalized_sum, parse, unimodular_refine, BoxDomain, Error, Expr, FieldSpec, IntMatrix,
    LatticePolytope, MultiIndex, Rational,
};
use serde_json::{json, Map, Value};

use crate::args::{
    parse_support, BoundArgs, CoeffsArgs, DecomposeArgs, GlobalArgs, PolytopeArgs, QuadArgs,
    SeriesArgs, SumArgs,
};
use crate::output::{float, float_text, floats, opt_float, rational, Report, Table};
use crate::{CliError, CliResult};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn expr(src: &str, p: usize) -> CliResult<Expr> {
    parse(src, p).map_err(|e| CliError::from(Error::from(e)))
}

pub fn config(g: &GlobalArgs, command: &str, fields: Value) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), json!(command));
    map.insert("format".into(), json!(g.format));
    map.insert("seed".into(), json!(g.seed));
    if let Value::Object(extra) = fields {
        map.extend(extra);
    }
    Value::Object(map)
}

fn quad_config(q: &QuadArgs) -> Value {
    json!({
        "nodes_per_panel": q.nodes,
        "panels_per_unit": q.panels,
        "refinement_tolerance": float(q.tol),
        "max_refinements": q.refinements,
    })
}

fn text_list<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn opt_text(x: Option<f64>) -> String {
    x.map(float_text).unwrap_or_default()
}

pub fn coeffs(g: &GlobalArgs, a: &CoeffsArgs) -> CliResult<Report> {
    let table = gamma_table(a.m)?;
    let mut rows = Vec::new();
    let mut csv = Table::new(vec!["j", "gamma", "tau"]);
    for j in 1..=a.m {
        let (gj, tj) = (table.gamma_j(j)?, table.tau_j(j)?);
        rows.push(json!({ "j": j, "gamma": rational(gj), "tau": rational(tj) }));
        csv.push(vec![
            j.to_string(),
            altsum_core::rational::format_rational(gj),
            altsum_core::rational::format_rational(tj),
        ]);
    }
    Ok(Report {
        config: config(g, "coeffs", json!({ "m": a.m })),
        result: json!({ "rows": rows }),
        diagnostics: json!({}),
        table: csv,
    })
}

fn parse_derivs(specs: &[String], p: usize) -> CliResult<Vec<(MultiIndex, Expr)>> {
    specs
        .iter()
        .map(|s| {
            let (alpha, body) = s
                .split_once(':')
                .ok_or_else(|| usage(format!("--deriv expects \"a1,...,ap:EXPR\", got {s:?}")))?;
            let alpha: MultiIndex = alpha
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| usage(format!("bad multi-index in {s:?}")))
                })
                .collect::<CliResult<_>>()?;
            if alpha.len() != p {
                return Err(usage(format!(
                    "--deriv multi-index {s:?} needs {p} entries"
                )));
            }
            Ok((alpha, expr(body, p)?))
        })
        .collect()
}

/// Exact sum as a float and, when the field is exact, as a rational.
/// `None` when the lattice is too large to enumerate.
fn brute_force(
    f: &FieldSpec,
    n: &[u64],
    warnings: &mut Vec<String>,
) -> CliResult<Option<(f64, Option<Rational>)>> {
    let attempt = if f.has_exact_eval() {
        exact_sum_rational(f, n).map(|r| (to_f64(&r), Some(r)))
    } else {
        exact_sum(f, n).map(|v| (v, None))
    };
    match attempt {
        Ok(v) => Ok(Some(v)),
        Err(Error::SizeLimit { required, cap }) => {
            warnings.push(format!(
                "exact sum skipped: {required} lattice points exceed the cap {cap}"
            ));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn sum(g: &GlobalArgs, a: &SumArgs) -> CliResult<Report> {
    let p = a.n.len();
    if p == 0 {
        return Err(usage("--n needs at least one entry"));
    }
    let cfg = a.quad.config()?;
    let f = expr(&a.f, p)?;
    let big_f = a.big_f.as_deref().map(|s| expr(s, p)).transpose()?;
    let derivs = parse_derivs(&a.derivs, p)?;
    let field = field_from_exprs(p, &f, big_f.as_ref(), &derivs);
    if a.compare_em && p != 1 {
        return Err(usage("--compare-em needs a one-dimensional sum"));
    }
    let plan = build_plan(a.m, &a.n, a.form)?;
    let mut warnings = Vec::new();

    let (approx, approx_exact, method) = if !a.force_quad && field.has_exact_antiderivative() {
        let r = evaluate_alt_exact(&field, a.m, &a.n, a.form)?;
        (to_f64(&r), Some(r), "ftc-exact")
    } else {
        let (how, name) = if a.force_quad || !field.has_antiderivative() {
            (IntegrationMethod::Quadrature, "quadrature")
        } else {
            (IntegrationMethod::Ftc, "ftc")
        };
        (
            evaluate_alt_with(&field, a.m, &a.n, a.form, &cfg, how)?.approximation,
            None,
            name,
        )
    };
    let exact = brute_force(&field, &a.n, &mut warnings)?;
    let residual = exact.as_ref().map(|(v, _)| v - approx);
    let residual_exact = match (&exact, &approx_exact) {
        (Some((_, Some(s))), Some(r)) => Some(s - r),
        _ => None,
    };

    let mut result = json!({
        "approximation": float(approx),
        "approximation_exact": approx_exact.as_ref().map_or(Value::Null, rational),
        "exact_sum": opt_float(exact.as_ref().map(|e| e.0)),
        "exact_sum_exact": exact.as_ref().and_then(|e| e.1.as_ref()).map_or(Value::Null, rational),
        "residual": opt_float(residual),
        "residual_exact": residual_exact.as_ref().map_or(Value::Null, rational),
    });
    let mut header = vec!["approximation", "exact_sum", "residual"];
    let mut row = vec![
        float_text(approx),
        opt_text(exact.as_ref().map(|e| e.0)),
        opt_text(residual),
    ];

    if a.compare_em {
        let poly = f.to_polynomial(1);
        let em = match &poly {
            Some(q) if !a.force_quad => to_f64(&em_sum_1d_poly(q, a.m, a.n[0])?),
            _ => em_sum_1d(&field, a.m, a.n[0], &cfg)?,
        };
        let em_residual = exact.as_ref().map(|(v, _)| v - em);
        result["em_approximation"] = float(em);
        result["em_residual"] = opt_float(em_residual);
        header.extend(["em_approximation", "em_residual"]);
        row.extend([float_text(em), opt_text(em_residual)]);
    }

    let mut diagnostics = json!({
        "method": method,
        "plan_terms": plan.term_count(),
        "weight_sum": rational(&plan.weight_sum()),
        "warnings": warnings,
    });
    if a.verbose {
        let terms: Vec<Value> = plan
            .terms()
            .map(|(w, b)| json!({ "weight": rational(w), "lower": floats(&b.lower), "upper": floats(&b.upper) }))
            .collect();
        diagnostics["plan"] = Value::Array(terms);
    }
    let mut table = Table::new(header);
    table.push(row);
    Ok(Report {
        config: config(
            g,
            "sum",
            json!({
                "m": a.m,
                "p": p,
                "n": a.n,
                "f": a.f,
                "F": a.big_f,
                "deriv": a.derivs,
                "form": a.form.as_str(),
                "force_quad": a.force_quad,
                "compare_em": a.compare_em,
                "verbose": a.verbose,
                "quadrature": quad_config(&a.quad),
            }),
        ),
        result,
        diagnostics,
        table,
    })
}

pub fn series(g: &GlobalArgs, a: &SeriesArgs) -> CliResult<Report> {
    let p = match (&a.shift, a.p) {
        (Some(c), Some(p)) if c.len() != p => {
            return Err(usage(format!(
                "--shift has {} entries but --p is {p}",
                c.len()
            )))
        }
        (Some(c), _) => c.len(),
        (None, Some(p)) => p,
        (None, None) => 1,
    };
    if p == 0 {
        return Err(usage("the dimension must be positive"));
    }
    let shifts: Vec<Vec<u64>> = match a.scan_shifts {
        Some((lo, hi)) => (lo..=hi).map(|t| vec![t; p]).collect(),
        None => vec![a.shift.clone().unwrap_or_else(|| vec![0; p])],
    };
    let f = expr(&a.f, p)?;
    let big_f = expr(&a.big_f, p)?;
    let field = field_from_exprs(p, &f, Some(&big_f), &[]);
    let exact_path = field.has_exact_antiderivative();

    let mut rows = Vec::new();
    let mut table = Table::new(vec![
        "shift",
        "value",
        "value_exact",
        "partial_sum",
        "correction",
        "remainder_bound",
    ]);
    for c in &shifts {
        let r = generalized_sum(&field, a.m, a.m0, c, a.m2m)?;
        let exact = if exact_path {
            Some(generalized_sum_exact(&field, a.m, a.m0, c)?)
        } else {
            None
        };
        rows.push(json!({
            "shift": c,
            "value": float(r.value),
            "value_exact": exact.as_ref().map_or(Value::Null, rational),
            "partial_sum": float(r.partial_sum),
            "correction": float(r.correction),
            "remainder_bound": opt_float(r.remainder_bound),
        }));
        table.push(vec![
            text_list(c),
            float_text(r.value),
            exact
                .as_ref()
                .map(altsum_core::rational::format_rational)
                .unwrap_or_default(),
            float_text(r.partial_sum),
            float_text(r.correction),
            opt_text(r.remainder_bound),
        ]);
    }
    let mut warnings = Vec::new();
    if a.m2m.is_none() {
        warnings.push("no remainder bound: pass --M2m to attach one".to_string());
    }
    Ok(Report {
        config: config(
            g,
            "series",
            json!({
                "m": a.m,
                "m0": a.m0,
                "p": p,
                "f": a.f,
                "F": a.big_f,
                "shifts": shifts,
                "M2m": opt_float(a.m2m),
            }),
        ),
        result: json!({ "rows": rows }),
        diagnostics: json!({
            "exact_path": exact_path,
            "warnings": warnings,
        }),
        table,
    })
}

pub fn bound(g: &GlobalArgs, a: &BoundArgs) -> CliResult<Report> {
    let coarse = bound_coarse(a.m, a.p, a.m2m, a.strict_factor)?;
    let tight = if a.tight {
        let table = gamma_table(a.m)?;
        Some(bound_tight(&table, a.p, a.m2m)?)
    } else {
        None
    };
    let factor = if a.strict_factor {
        altsum_core::bounds::COARSE_FACTOR_STRICT
    } else {
        altsum_core::bounds::COARSE_FACTOR
    };
    let mut table = Table::new(vec![
        "m",
        "p",
        "M2m",
        "tight_bound",
        "coarse_bound",
        "factor",
    ]);
    table.push(vec![
        a.m.to_string(),
        a.p.to_string(),
        float_text(a.m2m),
        opt_text(tight),
        float_text(coarse),
        float_text(factor),
    ]);
    let (t_star, l_star) = lambda_star();
    Ok(Report {
        config: config(
            g,
            "bound",
            json!({
                "m": a.m,
                "p": a.p,
                "M2m": float(a.m2m),
                "tight": a.tight,
                "strict_factor": a.strict_factor,
            }),
        ),
        result: json!({
            "coarse_bound": float(coarse),
            "tight_bound": opt_float(tight),
            "factor": float(factor),
        }),
        diagnostics: json!({
            "t_star": float(t_star),
            "lambda_star": float(l_star),
            "kappa": float(kappa()),
        }),
        table,
    })
}

fn cone_json(c: &HalfOpenCone) -> Value {
    json!({
        "sign": c.sign(),
        "det": c.det().to_string(),
        "apex": c.apex(),
        "generators": c.generators().rows(),
        "strict": c.strict().iter().map(|&s| s as u8).collect::<Vec<_>>(),
    })
}

pub fn decompose(g: &GlobalArgs, a: &DecomposeArgs) -> CliResult<Report> {
    let matrix: IntMatrix = a.matrix.parse().map_err(|e: Error| usage(e.to_string()))?;
    let p = matrix.dim();
    let strict: Vec<bool> = match &a.strict {
        Some(s) if s.len() != p => return Err(usage(format!("--strict needs {p} entries"))),
        Some(s) if s.iter().any(|&x| x > 1) => {
            return Err(usage("--strict entries must be 0 or 1"))
        }
        Some(s) => s.iter().map(|&x| x == 1).collect(),
        None => vec![false; p],
    };
    let apex = match &a.apex {
        Some(v) if v.len() != p => return Err(usage(format!("--apex needs {p} entries"))),
        Some(v) => v.clone(),
        None => vec![0; p],
    };
    if matrix.det() == 0 {
        return Err(usage("the generator matrix is singular"));
    }
    let cone = HalfOpenCone::new(apex.clone(), matrix.clone(), strict.clone(), 1)?;
    let list = unimodular_refine(&cone)?;
    let mut table = Table::new(vec!["sign", "det", "apex", "generators", "strict"]);
    for c in &list.cones {
        table.push(vec![
            c.sign().to_string(),
            c.det().to_string(),
            text_list(c.apex()),
            c.generators().to_string(),
            text_list(&c.strict().iter().map(|&s| s as u8).collect::<Vec<_>>()),
        ]);
    }
    Ok(Report {
        config: config(
            g,
            "decompose",
            json!({
                "matrix": matrix.to_string(),
                "strict": strict.iter().map(|&s| s as u8).collect::<Vec<_>>(),
                "apex": apex,
            }),
        ),
        result: json!({
            "det": cone.det().to_string(),
            "cones": list.cones.iter().map(cone_json).collect::<Vec<_>>(),
        }),
        diagnostics: json!({ "cone_count": list.len() }),
        table,
    })
}

pub fn polytope(g: &GlobalArgs, a: &PolytopeArgs) -> CliResult<Report> {
    let text = std::fs::read_to_string(&a.file)
        .map_err(|e| usage(format!("reading {}: {e}", a.file.display())))?;
    let poly: LatticePolytope = serde_json::from_str(&text)
        .map_err(|e| usage(format!("parsing {}: {e}", a.file.display())))?;
    let decomp = altsum_core::polytope::decompose(&poly, g.seed)?;
    let diagnostics = json!({
        "xi": decomp.xi,
        "vertex_cones": decomp.vertex_cone_count,
        "unimodular_cones": decomp.cones.len(),
    });
    let mut cfg_fields = json!({ "file": a.file.display().to_string(), "polytope": poly });

    if !a.count && a.f.is_none() {
        return Err(usage("polytope needs either --count or --f"));
    }
    if a.count {
        let count = count_with(&decomp)?;
        cfg_fields["mode"] = json!("count");
        let mut table = Table::new(vec!["count"]);
        table.push(vec![count.to_string()]);
        return Ok(Report {
            config: config(g, "polytope", cfg_fields),
            result: json!({ "count": count }),
            diagnostics,
            table,
        });
    }

    let p = poly.dim;
    let src = a.f.as_deref().unwrap_or_default();
    let m = a.m.ok_or_else(|| usage("--m is required with --f"))?;
    let (lo, hi) = parse_support(a.support.as_deref().unwrap_or_default())?;
    if lo.len() != p {
        return Err(usage(format!(
            "--support has {} axes, the polytope has {p}",
            lo.len()
        )));
    }
    let support = BoxDomain::new(lo, hi).map_err(|e| usage(e.to_string()))?;
    let cfg = a.quad.config()?;
    let field = field_from_exprs(p, &expr(src, p)?, None, &[]).with_support(support.clone());
    let approx = polytope_alt_sum_with(&decomp, &field, m, &cfg)?;
    let exact = exact_polytope_sum(&poly, &field)?;
    cfg_fields["mode"] = json!("sum");
    cfg_fields["f"] = json!(src);
    cfg_fields["m"] = json!(m);
    cfg_fields["support"] =
        json!({ "lower": floats(&support.lower), "upper": floats(&support.upper) });
    cfg_fields["quadrature"] = quad_config(&a.quad);
    let mut table = Table::new(vec!["approximation", "exact_sum", "residual"]);
    table.push(vec![
        float_text(approx),
        float_text(exact),
        float_text(exact - approx),
    ]);
    Ok(Report {
        config: config(g, "polytope", cfg_fields),
        result: json!({
            "approximation": float(approx),
            "exact_sum": float(exact),
            "residual": float(exact - approx),
        }),
        diagnostics,
        table,
    })
}
