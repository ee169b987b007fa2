//! Exact coefficients of the integral-only summation formula.
//!
//! For an order `m` the one-dimensional weights are
//!
//! ```text
//! gamma[m, j] = (-1)^(j-1) * (2/j) * C(2m, m+j) / C(2m, m),          j = 1..m
//! tau[m, j]   = gamma[m, j] + gamma[m, j+2] + gamma[m, j+4] + ...
//! ```
//!
//! and multi-index weights are coordinatewise products. Everything here is
//! exact; floats only appear once a weight multiplies an integral.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// A multi-index: one nonnegative entry per ambient coordinate.
pub type MultiIndex = Vec<usize>;

/// The exact `gamma` and `tau` rows for one order `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    m: usize,
    gamma: Vec<Rational>,
    tau: Vec<Rational>,
}

impl CoefficientTable {
    pub fn m(&self) -> usize {
        self.m
    }

    /// `gamma[m, 1..=m]`, index 0 holds `gamma[m, 1]`.
    pub fn gamma(&self) -> &[Rational] {
        &self.gamma
    }

    /// `tau[m, 1..=m]`, index 0 holds `tau[m, 1]`.
    pub fn tau(&self) -> &[Rational] {
        &self.tau
    }

    pub fn gamma_j(&self, j: usize) -> Result<&Rational> {
        self.check_index(j)?;
        Ok(&self.gamma[j - 1])
    }

    pub fn tau_j(&self, j: usize) -> Result<&Rational> {
        self.check_index(j)?;
        Ok(&self.tau[j - 1])
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.m {
            Err(Error::IndexOutOfRange {
                index: j,
                max: self.m,
            })
        } else {
            Ok(())
        }
    }
}

/// Row `n` of Pascal's triangle, built by the additive recurrence.
pub fn pascal_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigInt::one());
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigInt::one());
        row = next;
    }
    row
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        pascal_row(n).swap_remove(k)
    }
}

fn build_table(m: usize) -> CoefficientTable {
    let row = pascal_row(2 * m);
    let central = Rational::from_integer(row[m].clone());
    let gamma: Vec<Rational> = (1..=m)
        .map(|j| {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            Rational::new(BigInt::from(2 * sign), BigInt::from(j))
                * Rational::from_integer(row[m + j].clone())
                / &central
        })
        .collect();
    let tau = (1..=m)
        .map(|j| {
            (j..=m)
                .step_by(2)
                .fold(Rational::zero(), |acc, i| acc + &gamma[i - 1])
        })
        .collect();
    CoefficientTable { m, gamma, tau }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<CoefficientTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CoefficientTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The coefficient table of order `m`, cached per process.
pub fn gamma_table(m: usize) -> Result<Arc<CoefficientTable>> {
    if m == 0 {
        return Err(Error::InvalidOrder(m));
    }
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    Ok(guard
        .entry(m)
        .or_insert_with(|| Arc::new(build_table(m)))
        .clone())
}

/// `prod_r tau[m, j_r]`.
pub fn tau_of(table: &CoefficientTable, multi_j: &[usize]) -> Result<Rational> {
    multi_j
        .iter()
        .try_fold(Rational::one(), |acc, &j| Ok(acc * table.tau_j(j)?))
}

/// `prod_r gamma[m, j_r]`.
pub fn gamma_of(table: &CoefficientTable, multi_j: &[usize]) -> Result<Rational> {
    multi_j
        .iter()
        .try_fold(Rational::one(), |acc, &j| Ok(acc * table.gamma_j(j)?))
}

/// Bernoulli number `B_j` with the convention `B_1 = -1/2`.
pub fn bernoulli(j: usize) -> Rational {
    bernoulli_numbers(j).swap_remove(j)
}

/// `B_0..=B_n` from `sum_{i=0}^{k} C(k+1, i) B_i = 0`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![Rational::one()];
    for k in 1..=n {
        let row = pascal_row(k + 1);
        let s = (0..k).fold(Rational::zero(), |acc, i| {
            acc + Rational::from_integer(row[i].clone()) * &b[i]
        });
        b.push(-s / int(k as i64 + 1));
    }
    b
}

/// All nonnegative `parts`-tuples with coordinate sum `total`, in
/// lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<MultiIndex> {
    assert!(parts >= 1, "compositions need at least one part");
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    fill_compositions(total, 0, &mut cur, &mut out);
    out
}

fn fill_compositions(left: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for a in 0..=left {
        cur[pos] = a;
        fill_compositions(left - a, pos + 1, cur, out);
    }
}

/// Every multi-index `alpha` with `lower <= alpha <= upper` entrywise, the
/// last coordinate varying fastest.
pub fn box_indices(lower: &[i64], upper: &[i64]) -> Vec<Vec<i64>> {
    debug_assert_eq!(lower.len(), upper.len());
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lower.to_vec();
    loop {
        out.push(cur.clone());
        let mut r = cur.len();
        loop {
            if r == 0 {
                return out;
            }
            r -= 1;
            if cur[r] < upper[r] {
                cur[r] += 1;
                break;
            }
            cur[r] = lower[r];
        }
    }
}
