//! Remainder bounds for the integral-only formula and the constants behind
//! the coarse bound.
//!
//! With `M` a bound on `|sum_k f^(alpha)(k + u)|` over all `|alpha| = 2m` and
//! all shifts `u` in the box of half-width `m/2`,
//!
//! ```text
//! |R_m| <= M / 2^(2m) * sum_{|alpha| = 2m} 1/(alpha+1)! sum_j |gamma_j| j^(alpha+1)
//!       <= M * factor * (pi m)^((p+1)/2) / (2m+1)! * (kappa p m)^(2m)
//! ```

use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boxcalc::{checked, FieldSpec};
use crate::coefficients::{box_indices, compositions, gamma_table, CoefficientTable};
use crate::error::{Error, Result};
use crate::quadrature::NeumaierSum;
use crate::rational::{int, to_f64, Rational};

pub const COARSE_FACTOR: f64 = 1.0331;
pub const COARSE_FACTOR_STRICT: f64 = 1.001;

/// `Lambda(t) = (1-t)^(t-1) (1+t)^(-1-t) t^2`, computed in log space.
pub fn lambda(t: f64) -> f64 {
    log_lambda(t).exp()
}

fn log_lambda(t: f64) -> f64 {
    (t - 1.0) * (1.0 - t).ln() - (1.0 + t) * (1.0 + t).ln() + 2.0 * t.ln()
}

/// The maximizer `t*` and maximum of `Lambda` on `(0, 1)`.
pub fn lambda_star() -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-6, 1.0 - 1e-6);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (log_lambda(c), log_lambda(d));
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = log_lambda(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = log_lambda(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, lambda(t))
}

/// `kappa = sqrt(Lambda* / 4)`.
pub fn kappa() -> f64 {
    (lambda_star().1 / 4.0).sqrt()
}

fn check_m(m2m: f64) -> Result<()> {
    if !(m2m.is_finite() && m2m >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "derivative bound must be finite and nonnegative, got {m2m}"
        )));
    }
    Ok(())
}

fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * int(k as i64))
}

/// The exact factor multiplying `M` in the tight bound.
///
/// The sum over `j` factorizes into one-dimensional sums
/// `prod_r sum_j |gamma_j| j^(alpha_r + 1)`.
pub fn tight_coefficient(table: &CoefficientTable, p: usize) -> Result<Rational> {
    if p == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    let m = table.m();
    let abs_gamma: Vec<Rational> = table.gamma().iter().map(|g| g.abs()).collect();
    // moments[e] = sum_j |gamma_j| j^e for e = 1..=2m+1
    let moments: Vec<Rational> = (0..=2 * m + 1)
        .map(|e| {
            abs_gamma
                .iter()
                .enumerate()
                .map(|(i, g)| g * num_traits::pow(int(i as i64 + 1), e))
                .sum()
        })
        .collect();
    let mut total = Rational::zero();
    for alpha in compositions(2 * m, p) {
        let mut term = Rational::one();
        for &a in &alpha {
            term *= &moments[a + 1] / factorial(a + 1);
        }
        total += term;
    }
    Ok(total / num_traits::pow(int(2), 2 * m))
}

pub fn bound_tight(table: &CoefficientTable, p: usize, m2m: f64) -> Result<f64> {
    check_m(m2m)?;
    Ok(m2m * to_f64(&tight_coefficient(table, p)?))
}

pub fn bound_coarse(m: usize, p: usize, m2m: f64, strict_m_ge_2: bool) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidOrder(0));
    }
    if p == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    if strict_m_ge_2 && m < 2 {
        return Err(Error::InvalidFlag(
            "the 1.001 factor requires m >= 2".into(),
        ));
    }
    check_m(m2m)?;
    let factor = if strict_m_ge_2 {
        COARSE_FACTOR_STRICT
    } else {
        COARSE_FACTOR
    };
    let (mf, pf) = (m as f64, p as f64);
    let fact: f64 = (1..=2 * m + 1).map(|k| k as f64).product();
    Ok(m2m * factor * (PI * mf).powf((pf + 1.0) / 2.0) / fact
        * (kappa() * pf * mf).powi(2 * m as i32))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub m: usize,
    pub p: usize,
    #[serde(rename = "M2m")]
    pub m2m: f64,
    pub tight_bound: f64,
    pub coarse_bound: f64,
    pub factor: f64,
}

pub fn bound_report(m: usize, p: usize, m2m: f64, strict_m_ge_2: bool) -> Result<BoundReport> {
    let table = gamma_table(m)?;
    let coarse_bound = bound_coarse(m, p, m2m, strict_m_ge_2)?;
    let tight_bound = bound_tight(&table, p, m2m)?;
    Ok(BoundReport {
        m,
        p,
        m2m,
        tight_bound,
        coarse_bound,
        factor: if strict_m_ge_2 {
            COARSE_FACTOR_STRICT
        } else {
            COARSE_FACTOR
        },
    })
}

/// Heuristic estimate of `M_{2m}`: the largest `|sum_k f^(alpha)(k + u)|`
/// seen on a grid of `samples` points per axis over the closed box
/// `[-m/2, m/2]^p`. Sampling cannot certify a bound; use it as a diagnostic.
pub fn heuristic_m2m(f: &FieldSpec, m: usize, n: &[u64], samples: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidOrder(0));
    }
    if f.dim() != n.len() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: n.len(),
        });
    }
    let p = n.len();
    let samples = samples.max(2);
    let half = m as f64 / 2.0;
    let grid: Vec<f64> = (0..samples)
        .map(|i| -half + 2.0 * half * i as f64 / (samples - 1) as f64)
        .collect();
    let us = box_indices(&vec![0; p], &vec![samples as i64 - 1; p]);
    let ks = box_indices(
        &vec![0; p],
        &n.iter().map(|&x| x as i64 - 1).collect::<Vec<_>>(),
    );
    let mut best = 0.0f64;
    let mut x = vec![0.0; p];
    for (_, d) in f.derivatives_of_order(2 * m)? {
        for u in &us {
            let mut s = NeumaierSum::default();
            for k in &ks {
                for r in 0..p {
                    x[r] = k[r] as f64 + grid[u[r] as usize];
                }
                s.add(checked(&d, &x)?);
            }
            best = best.max(s.value().abs());
        }
    }
    Ok(best)
}
