//! Generalized sums of possibly divergent multi-index series
//! `sum_{k >= 0} f(k)` through an antiderivative `F` of `f`.
//!
//! ```text
//! A^J(n)  = sum_{alpha in [0, m-1]^p} tau_{1+alpha} sum_{|beta| = alpha} F(n 1_J - 1/2 - beta/2)
//! A~(n)   = sum_{J nonempty} (-1)^(p-|J|) A^J(n)
//! Sum^Alt = sum_{k < c} f(k) - A~(c) - R_c
//! ```
//!
//! The remainder `R_c` is never evaluated; a coarse bound is attached when
//! the caller supplies `M_{2m}`. The order `m0` only fixes which limit is
//! meant; every computed quantity uses the order `m`.

use serde::{Deserialize, Serialize};

use crate::altsum::{exact_sum, exact_sum_rational, sign_orbit};
use crate::bounds::bound_coarse;
use crate::boxcalc::FieldSpec;
use crate::coefficients::{box_indices, gamma_table, tau_of};
use crate::error::{Error, Result};
use crate::rational::{Rational, Scalar};

/// `A^J_{m,F}(n)` where `in_j[r]` marks membership of coordinate `r` in `J`.
pub fn a_superscript_j<S, F>(mut big_f: F, m: usize, n: &[u64], in_j: &[bool]) -> Result<S>
where
    S: Scalar,
    F: FnMut(&[S]) -> Result<S>,
{
    let table = gamma_table(m)?;
    if n.len() != in_j.len() {
        return Err(Error::DimensionMismatch {
            expected: n.len(),
            got: in_j.len(),
        });
    }
    let p = n.len();
    let mi = m as i64;
    let mut total = S::zero();
    let mut x: Vec<S> = Vec::with_capacity(p);
    for alpha in box_indices(&vec![0; p], &vec![mi - 1; p]) {
        let idx: Vec<usize> = alpha.iter().map(|&a| 1 + a as usize).collect();
        let weight = S::from_rational(&tau_of(&table, &idx)?);
        let mut inner = S::zero();
        for beta in sign_orbit(&alpha) {
            x.clear();
            for r in 0..p {
                let nr = if in_j[r] { 2 * n[r] as i64 } else { 0 };
                x.push(S::half(nr - 1 - beta[r]));
            }
            inner = inner + big_f(&x)?;
        }
        total = total + weight * inner;
    }
    Ok(total)
}

/// `A~_{m,F}(n)`, the alternating sum over nonempty `J`.
pub fn a_tilde<S, F>(mut big_f: F, m: usize, n: &[u64]) -> Result<S>
where
    S: Scalar,
    F: FnMut(&[S]) -> Result<S>,
{
    let p = n.len();
    if p == 0 || p >= 64 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: p,
        });
    }
    let mut total = S::zero();
    for mask in 1u64..(1u64 << p) {
        let in_j: Vec<bool> = (0..p).map(|r| mask >> r & 1 == 1).collect();
        let size = in_j.iter().filter(|&&b| b).count();
        let a = a_superscript_j(&mut big_f, m, n, &in_j)?;
        total = if (p - size).is_multiple_of(2) {
            total + a
        } else {
            total - a
        };
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub shift: Vec<u64>,
    pub partial_sum: f64,
    pub correction: f64,
    pub remainder_bound: Option<f64>,
    /// The order used for `correction` and `remainder_bound`.
    pub m: usize,
}

fn check_orders(m: usize, m0: usize) -> Result<()> {
    if m0 == 0 {
        return Err(Error::InvalidOrder(0));
    }
    if m0 > m {
        return Err(Error::OrderMismatch { m0, m });
    }
    Ok(())
}

/// Coarse bound on `|R_{m,f,c}|`: each of the `2^p - 1` shifted remainders
/// is bounded by the coarse bound with the caller's `M_{2m}`.
pub fn shifted_remainder_bound(m: usize, p: usize, m2m: f64) -> Result<f64> {
    let subsets = ((1u64 << p) - 1) as f64;
    Ok(subsets * bound_coarse(m, p, m2m, false)?)
}

/// `sum_{k < c} f(k) - A~_{m,F}(c)`. The caller is responsible for the
/// decay hypotheses that make the limit exist.
pub fn generalized_sum(
    f: &FieldSpec,
    m: usize,
    m0: usize,
    c: &[u64],
    m2m: Option<f64>,
) -> Result<SeriesResult> {
    check_orders(m, m0)?;
    if f.dim() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: c.len(),
        });
    }
    let partial_sum = exact_sum(f, c)?;
    let correction: f64 = a_tilde(|x: &[f64]| f.eval_antiderivative(x), m, c)?;
    let remainder_bound = m2m
        .map(|mm| shifted_remainder_bound(m, c.len(), mm))
        .transpose()?;
    Ok(SeriesResult {
        value: partial_sum - correction,
        shift: c.to_vec(),
        partial_sum,
        correction,
        remainder_bound,
        m,
    })
}

/// Exact-rational version of [`generalized_sum`] for fields carrying exact
/// evaluators.
pub fn generalized_sum_exact(f: &FieldSpec, m: usize, m0: usize, c: &[u64]) -> Result<Rational> {
    check_orders(m, m0)?;
    let partial = exact_sum_rational(f, c)?;
    let correction: Rational = a_tilde(|x: &[Rational]| f.eval_antiderivative_exact(x), m, c)?;
    Ok(partial - correction)
}

/// Generalized sums at each shift in `shifts`. `m2m_at` gives the caller's
/// derivative bound for the shifted function.
pub fn shift_consistency(
    f: &FieldSpec,
    m: usize,
    m0: usize,
    shifts: &[Vec<u64>],
    m2m_at: Option<&dyn Fn(&[u64]) -> f64>,
) -> Result<Vec<SeriesResult>> {
    shifts
        .iter()
        .map(|c| generalized_sum(f, m, m0, c, m2m_at.map(|g| g(c))))
        .collect()
}

/// Heuristic check of the decay hypothesis: for each `t`, the largest
/// central finite-difference estimate of `|F^(alpha)(t 1)|` over
/// `|alpha| = 2 m0`, with step `h`. Not a proof of anything.
pub fn decay_diagnostic(f: &FieldSpec, m0: usize, ts: &[f64], h: f64) -> Result<Vec<(f64, f64)>> {
    if m0 == 0 {
        return Err(Error::InvalidOrder(0));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    let p = f.dim();
    let alphas = crate::coefficients::compositions(2 * m0, p);
    ts.iter()
        .map(|&t| {
            let mut worst = 0.0f64;
            for alpha in &alphas {
                let upper: Vec<i64> = alpha.iter().map(|&a| a as i64).collect();
                let mut acc = 0.0;
                for i in box_indices(&vec![0; p], &upper) {
                    let mut coef = 1.0;
                    let mut x = vec![t; p];
                    for r in 0..p {
                        let (a, ir) = (alpha[r] as i64, i[r]);
                        coef *= binom_f64(a, ir);
                        if (a - ir) % 2 == 1 {
                            coef = -coef;
                        }
                        x[r] += h * (ir as f64 - a as f64 / 2.0);
                    }
                    acc += coef * f.eval_antiderivative(&x)?;
                }
                worst = worst.max((acc / h.powi(2 * m0 as i32)).abs());
            }
            Ok((t, worst))
        })
        .collect()
}

fn binom_f64(n: i64, k: i64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::rational::{int, rat};

    fn identity_field(p: usize) -> FieldSpec {
        Polynomial::monomial(vec![1; p], int(1)).to_field()
    }

    #[test]
    fn a_empty_order_two_hand_value() {
        let big_f = |x: &[Rational]| Ok(&x[0] * &x[0] / int(2));
        let v: Rational = a_superscript_j(big_f, 2, &[7], &[false]).unwrap();
        assert_eq!(v, rat(1, 12));
    }

    #[test]
    fn a_empty_is_constant_in_n() {
        let big_f = |x: &[Rational]| Ok(&x[0] * &x[0] * &x[1] + &x[1]);
        let base: Rational = a_superscript_j(big_f, 3, &[0, 0], &[false, false]).unwrap();
        for n in [[1u64, 2], [5, 9], [13, 0]] {
            let v: Rational = a_superscript_j(big_f, 3, &n, &[false, false]).unwrap();
            assert_eq!(v, base);
        }
    }

    #[test]
    fn order_one_full_set_is_single_point() {
        let big_f = |x: &[f64]| Ok(x[0] * 10.0 + x[1]);
        let v: f64 = a_superscript_j(big_f, 1, &[3, 5], &[true, true]).unwrap();
        assert_eq!(v, 2.5 * 10.0 + 4.5);
    }

    #[test]
    fn a_tilde_of_constant() {
        for p in 1..=4 {
            let v: Rational = a_tilde(|_: &[Rational]| Ok(int(1)), 2, &vec![3; p]).unwrap();
            assert_eq!(v, int(if p % 2 == 1 { 1 } else { -1 }));
        }
    }

    #[test]
    fn zeta_minus_one_family() {
        assert_eq!(
            generalized_sum_exact(&identity_field(1), 2, 2, &[0]).unwrap(),
            rat(-1, 12)
        );
        assert_eq!(
            generalized_sum_exact(&identity_field(2), 2, 2, &[0, 0]).unwrap(),
            rat(1, 144)
        );
        assert_eq!(
            generalized_sum_exact(&identity_field(3), 2, 1, &[0, 0, 0]).unwrap(),
            rat(-1, 1728)
        );
    }

    #[test]
    fn shift_invariance_polynomial() {
        let f = identity_field(1);
        for c in [0u64, 5, 10] {
            assert_eq!(generalized_sum_exact(&f, 2, 2, &[c]).unwrap(), rat(-1, 12));
            assert_eq!(generalized_sum_exact(&f, 3, 2, &[c]).unwrap(), rat(-1, 12));
        }
        let r = generalized_sum(&f, 2, 2, &[5], None).unwrap();
        assert_eq!(r.partial_sum, 10.0);
        assert!((r.value + 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(r.value, r.partial_sum - r.correction);
    }

    #[test]
    fn zero_field() {
        let f = Polynomial::zero(2).to_field();
        let rs = shift_consistency(&f, 2, 1, &[vec![0, 0], vec![3, 2]], None).unwrap();
        assert!(rs.iter().all(|r| r.value == 0.0));
    }

    #[test]
    fn order_checks() {
        let f = identity_field(1);
        assert!(matches!(
            generalized_sum(&f, 1, 2, &[0], None),
            Err(Error::OrderMismatch { m0: 2, m: 1 })
        ));
        assert!(matches!(
            generalized_sum(&f, 1, 0, &[0], None),
            Err(Error::InvalidOrder(0))
        ));
    }

    #[test]
    fn geometric_series() {
        let ln = 0.5f64.ln();
        let f = FieldSpec::new(1, |x| 0.5f64.powf(x[0]))
            .with_antiderivative(move |x| 0.5f64.powf(x[0]) / ln);
        let bound_at = |c: &[u64]| ln.powi(8) * 2.0 * 0.5f64.powf(c[0] as f64 - 2.0);
        let rs =
            shift_consistency(&f, 4, 4, &[vec![0], vec![2], vec![8]], Some(&bound_at)).unwrap();
        for r in &rs {
            assert!((r.value - 2.0).abs() <= r.remainder_bound.unwrap(), "{r:?}");
        }
        assert!(rs[2].remainder_bound < rs[0].remainder_bound);
    }

    #[test]
    fn decay_diagnostic_sees_exponential_decay() {
        let f = FieldSpec::new(1, |x| (-x[0]).exp()).with_antiderivative(|x| -(-x[0]).exp());
        let d = decay_diagnostic(&f, 1, &[0.0, 5.0, 10.0], 0.1).unwrap();
        assert!((d[0].1 - 1.0).abs() < 1e-2);
        assert!(d[2].1 < d[1].1 && d[1].1 < d[0].1);
    }
}
