//! Signed integrals over axis-aligned boxes.
//!
//! A box is given by two corners `lower` and `upper` with no ordering
//! requirement: every coordinate with `lower_r > upper_r` flips the sign of
//! the integral. Two routes are available, the alternating corner sum of an
//! antiderivative and composite tensor Gauss–Legendre quadrature.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::MultiIndex;
use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, NeumaierSum};
use crate::rational::{Rational, Scalar};

pub type RealFn = Arc<dyn Fn(&[f64]) -> Result<f64, String> + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(&[Rational]) -> Result<Rational, String> + Send + Sync>;
/// Maps a multi-index `alpha` to the partial derivative `f^(alpha)`, or
/// `None` when that derivative is not available.
pub type DerivativeOracle = Arc<dyn Fn(&[usize]) -> Option<RealFn> + Send + Sync>;

pub fn real_fn<F>(f: F) -> RealFn
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    Arc::new(move |x| Ok(f(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().chain(&upper).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("box corners must be finite".into()));
        }
        Ok(BoxDomain { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// `(-1)^(number of coordinates with lower > upper)`.
    pub fn orientation(&self) -> f64 {
        let flips = self
            .lower
            .iter()
            .zip(&self.upper)
            .filter(|(l, u)| l > u)
            .count();
        if flips % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Same box with corners swapped in coordinate `axis`.
    pub fn flipped(&self, axis: usize) -> BoxDomain {
        let mut b = self.clone();
        std::mem::swap(&mut b.lower[axis], &mut b.upper[axis]);
        b
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (l, u))| *x >= l.min(*u) && *x <= l.max(*u))
    }
}

impl fmt::Display for BoxDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} -> {:?}]", self.lower, self.upper)
    }
}

/// A real-valued function on `R^p` together with whatever extra structure
/// the caller can supply.
#[derive(Clone)]
pub struct FieldSpec {
    p: usize,
    eval: RealFn,
    antiderivative: Option<RealFn>,
    derivatives: Option<DerivativeOracle>,
    exact_eval: Option<ExactFn>,
    exact_antiderivative: Option<ExactFn>,
    support: Option<BoxDomain>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("antiderivative", &self.antiderivative.is_some())
            .field("derivatives", &self.derivatives.is_some())
            .field("exact", &self.exact_eval.is_some())
            .field("support", &self.support)
            .finish()
    }
}

impl FieldSpec {
    pub fn new<F>(p: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::from_fn(p, real_fn(f))
    }

    pub fn from_fn(p: usize, eval: RealFn) -> Self {
        FieldSpec {
            p,
            eval,
            antiderivative: None,
            derivatives: None,
            exact_eval: None,
            exact_antiderivative: None,
            support: None,
        }
    }

    /// `F` with `d^p F / dx_1 ... dx_p = f`.
    pub fn with_antiderivative<F>(self, big_f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.with_antiderivative_fn(real_fn(big_f))
    }

    pub fn with_antiderivative_fn(mut self, big_f: RealFn) -> Self {
        self.antiderivative = Some(big_f);
        self
    }

    pub fn with_derivatives(mut self, oracle: DerivativeOracle) -> Self {
        self.derivatives = Some(oracle);
        self
    }

    /// Exact-rational evaluators for `f` and (optionally) its antiderivative;
    /// these enable the bit-exact paths.
    pub fn with_exact(mut self, eval: ExactFn, antiderivative: Option<ExactFn>) -> Self {
        self.exact_eval = Some(eval);
        self.exact_antiderivative = antiderivative;
        self
    }

    pub fn with_support(mut self, support: BoxDomain) -> Self {
        self.support = Some(support);
        self
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn has_antiderivative(&self) -> bool {
        self.antiderivative.is_some()
    }

    pub fn has_exact_antiderivative(&self) -> bool {
        self.exact_antiderivative.is_some()
    }

    pub fn has_exact_eval(&self) -> bool {
        self.exact_eval.is_some()
    }

    pub fn support(&self) -> Option<&BoxDomain> {
        self.support.as_ref()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        checked(&self.eval, x)
    }

    pub fn eval_antiderivative(&self, x: &[f64]) -> Result<f64> {
        let big_f = self
            .antiderivative
            .as_ref()
            .ok_or_else(|| Error::Capability("an antiderivative is required".into()))?;
        checked(big_f, x)
    }

    pub fn antiderivative_fn(&self) -> Option<&RealFn> {
        self.antiderivative.as_ref()
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Result<Rational> {
        let f = self
            .exact_eval
            .as_ref()
            .ok_or_else(|| Error::Capability("an exact evaluator is required".into()))?;
        f(x).map_err(|message| exact_err(x, message))
    }

    pub fn eval_antiderivative_exact(&self, x: &[Rational]) -> Result<Rational> {
        let f = self
            .exact_antiderivative
            .as_ref()
            .ok_or_else(|| Error::Capability("an exact antiderivative is required".into()))?;
        f(x).map_err(|message| exact_err(x, message))
    }

    /// `f^(alpha)`; the zero multi-index returns `f` itself when no oracle
    /// is attached.
    pub fn derivative(&self, alpha: &[usize]) -> Result<RealFn> {
        if let Some(oracle) = &self.derivatives {
            if let Some(d) = oracle(alpha) {
                return Ok(d);
            }
        }
        if alpha.iter().all(|&a| a == 0) {
            return Ok(self.eval.clone());
        }
        Err(Error::Capability(format!(
            "derivative of order {alpha:?} is not available"
        )))
    }

    pub fn has_derivatives(&self) -> bool {
        self.derivatives.is_some()
    }

    /// All partials of total order `order`, keyed by the multi-index.
    pub fn derivatives_of_order(&self, order: usize) -> Result<Vec<(MultiIndex, RealFn)>> {
        crate::coefficients::compositions(order, self.p)
            .into_iter()
            .map(|a| {
                let d = self.derivative(&a)?;
                Ok((a, d))
            })
            .collect()
    }
}

fn exact_err(x: &[Rational], message: String) -> Error {
    Error::Evaluation {
        point: x.iter().map(crate::rational::to_f64).collect(),
        message,
    }
}

/// Evaluates and rejects non-finite values.
pub fn checked(f: &RealFn, x: &[f64]) -> Result<f64> {
    match f(x) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(Error::Evaluation {
            point: x.to_vec(),
            message: format!("non-finite value {v}"),
        }),
        Err(message) => Err(Error::Evaluation {
            point: x.to_vec(),
            message,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss–Legendre order of each panel.
    pub nodes_per_panel: usize,
    /// Panels per unit length on the coarse level.
    pub panels_per_unit: usize,
    pub refinement_tolerance: f64,
    /// How many times the panel count may double before giving up.
    pub max_refinements: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes_per_panel: 8,
            panels_per_unit: 2,
            refinement_tolerance: 1e-10,
            max_refinements: 3,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_panel == 0
            || self.panels_per_unit == 0
            || self.refinement_tolerance.is_nan()
            || self.refinement_tolerance <= 0.0
        {
            return Err(Error::InvalidInput(
                "quadrature settings must all be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Signed box integral by the multidimensional fundamental theorem of
/// calculus: `sum_{J subset [p]} (-1)^(p-|J|) F(u + (v-u) 1_J)`.
pub fn integrate_ftc(f: &FieldSpec, bx: &BoxDomain) -> Result<f64> {
    check_dim(f.dim(), bx.dim())?;
    let big_f = f
        .antiderivative
        .as_ref()
        .ok_or_else(|| Error::Capability("integrate_ftc needs an antiderivative".into()))?;
    corner_sum(&bx.lower, &bx.upper, |x| checked(big_f, x))
}

/// Exact counterpart of [`integrate_ftc`] on a rational box.
pub fn integrate_ftc_exact(
    f: &FieldSpec,
    lower: &[Rational],
    upper: &[Rational],
) -> Result<Rational> {
    check_dim(f.dim(), lower.len())?;
    corner_sum(lower, upper, |x| f.eval_antiderivative_exact(x))
}

/// Alternating corner sum, visiting the `2^p` subsets in Gray-code order so
/// each step changes a single coordinate of the corner.
pub fn corner_sum<S, F>(lower: &[S], upper: &[S], mut big_f: F) -> Result<S>
where
    S: Scalar,
    F: FnMut(&[S]) -> Result<S>,
{
    let p = lower.len();
    if upper.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: upper.len(),
        });
    }
    let mut corner = lower.to_vec();
    let mut in_j = vec![false; p];
    let mut size = 0usize;
    let sign = |size: usize| (p - size).is_multiple_of(2);
    let first = big_f(&corner)?;
    let mut total = if sign(0) { first } else { -first };
    for step in 1u64..(1u64 << p) {
        let r = step.trailing_zeros() as usize;
        in_j[r] = !in_j[r];
        if in_j[r] {
            corner[r] = upper[r].clone();
            size += 1;
        } else {
            corner[r] = lower[r].clone();
            size -= 1;
        }
        let v = big_f(&corner)?;
        total = if sign(size) { total + v } else { total - v };
    }
    Ok(total)
}

/// Signed box integral by composite tensor Gauss–Legendre quadrature. The
/// panel count doubles until two successive values agree to within
/// `refinement_tolerance * max(1, |value|)`.
pub fn integrate_quad(f: &FieldSpec, bx: &BoxDomain, cfg: &QuadratureConfig) -> Result<f64> {
    check_dim(f.dim(), bx.dim())?;
    cfg.validate()?;
    integrate_quad_fn(&f.eval, bx, cfg)
}

pub fn integrate_quad_fn(f: &RealFn, bx: &BoxDomain, cfg: &QuadratureConfig) -> Result<f64> {
    if bx.lower.iter().zip(&bx.upper).any(|(l, u)| l == u) {
        return Ok(0.0);
    }
    let sign = bx.orientation();
    let lo: Vec<f64> = bx
        .lower
        .iter()
        .zip(&bx.upper)
        .map(|(a, b)| a.min(*b))
        .collect();
    let hi: Vec<f64> = bx
        .lower
        .iter()
        .zip(&bx.upper)
        .map(|(a, b)| a.max(*b))
        .collect();
    let base: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (((b - a) * cfg.panels_per_unit as f64).ceil() as usize).max(1))
        .collect();
    let rule = GaussLegendre::new(cfg.nodes_per_panel);
    let mut coarse = tensor_rule(f, &lo, &hi, &base, &rule)?;
    let levels = cfg.max_refinements.max(1);
    for level in 1..=levels {
        let panels: Vec<usize> = base.iter().map(|&b| b << level).collect();
        let fine = tensor_rule(f, &lo, &hi, &panels, &rule)?;
        if (fine - coarse).abs() <= cfg.refinement_tolerance * fine.abs().max(1.0) {
            return Ok(sign * fine);
        }
        if level == levels {
            return Err(Error::ToleranceNotMet {
                coarse: sign * coarse,
                fine: sign * fine,
            });
        }
        coarse = fine;
    }
    unreachable!("refinement loop always returns")
}

/// One fixed composite tensor rule on the ordered box `[lo, hi]`.
pub fn tensor_rule(
    f: &RealFn,
    lo: &[f64],
    hi: &[f64],
    panels: &[usize],
    rule: &GaussLegendre,
) -> Result<f64> {
    let axes: Vec<Vec<(f64, f64)>> = (0..lo.len())
        .map(|r| rule.composite(lo[r], hi[r], panels[r]))
        .collect();
    tensor_sum(f, &axes)
}

/// `sum_i prod_r w_{r,i_r} f(x_{1,i_1}, ..., x_{p,i_p})` over per-axis
/// node lists. The outermost axis is split across threads; partial sums are
/// reduced in index order so the result does not depend on the pool size.
pub fn tensor_sum(f: &RealFn, axes: &[Vec<(f64, f64)>]) -> Result<f64> {
    let p = axes.len();
    if p == 0 {
        return checked(f, &[]);
    }
    let partials: Vec<Result<f64>> = axes[0]
        .par_iter()
        .map(|&(x0, w0)| {
            let mut point = vec![0.0; p];
            point[0] = x0;
            let mut idx = vec![0usize; p];
            let mut acc = NeumaierSum::default();
            if axes[1..].iter().any(|a| a.is_empty()) {
                return Ok(0.0);
            }
            loop {
                let mut w = w0;
                for r in 1..p {
                    let (x, wr) = axes[r][idx[r]];
                    point[r] = x;
                    w *= wr;
                }
                acc.add(w * checked(f, &point)?);
                let mut r = p;
                loop {
                    r -= 1;
                    if r == 0 {
                        return Ok(acc.value());
                    }
                    idx[r] += 1;
                    if idx[r] < axes[r].len() {
                        break;
                    }
                    idx[r] = 0;
                }
            }
        })
        .collect();
    let mut total = NeumaierSum::default();
    for part in partials {
        total.add(part?);
    }
    Ok(total.value())
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}
