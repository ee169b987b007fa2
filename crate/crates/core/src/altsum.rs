//! The integral-only approximation `A_m` of a multiple sum
//! `sum_{0 <= k <= n-1} f(k)`, its remainder and the Euler–Maclaurin
//! baseline for `p = 1`.
//!
//! `A_m` has six equivalent expressions. Each one becomes an
//! [`IntegralPlan`]: a weighted list of signed boxes. "Left" forms use boxes
//! centred at `(n - 1)/2`; "right" forms use boxes of edge vector `n`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxcalc::{
    checked, integrate_ftc, integrate_ftc_exact, integrate_quad, BoxDomain, FieldSpec,
    QuadratureConfig,
};
use crate::coefficients::{bernoulli, box_indices, compositions, gamma_of, gamma_table, tau_of};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::quadrature::{GaussLegendre, NeumaierSum};
use crate::rational::{from_f64_exact, int, to_f64, Rational};

/// Default cap on the number of lattice points a brute-force sum may visit.
pub const DEFAULT_SUM_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormId {
    /// `gamma`-weighted boxes `[i - j/2, n - 1 + j/2 - i]`.
    GammaLeft,
    /// `gamma`-weighted boxes `[-1 + j/2 - i, n - 1 + j/2 - i]`.
    GammaRight,
    /// `tau`-weighted boxes `[beta/2 - 1/2, n - 1/2 - beta/2]`.
    TauSymmetricLeft,
    /// `tau`-weighted boxes `[-1/2 - beta/2, n - 1/2 - beta/2]`.
    TauSymmetricRight,
    /// As [`FormId::TauSymmetricLeft`], grouped by `alpha = |beta|`.
    TauGroupedLeft,
    /// As [`FormId::TauSymmetricRight`], grouped by `alpha = |beta|`.
    #[default]
    TauGroupedRight,
}

impl FormId {
    pub const ALL: [FormId; 6] = [
        FormId::GammaLeft,
        FormId::GammaRight,
        FormId::TauSymmetricLeft,
        FormId::TauSymmetricRight,
        FormId::TauGroupedLeft,
        FormId::TauGroupedRight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormId::GammaLeft => "gamma-left",
            FormId::GammaRight => "gamma-right",
            FormId::TauSymmetricLeft => "tau-symmetric-left",
            FormId::TauSymmetricRight => "tau-symmetric-right",
            FormId::TauGroupedLeft => "tau-grouped-left",
            FormId::TauGroupedRight => "tau-grouped-right",
        }
    }

    pub fn is_left(self) -> bool {
        matches!(
            self,
            FormId::GammaLeft | FormId::TauSymmetricLeft | FormId::TauGroupedLeft
        )
    }
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown form id {s:?}")))
    }
}

/// Boxes sharing one weight. Non-grouped forms have one box per group.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanGroup {
    pub weight: Rational,
    pub boxes: Vec<BoxDomain>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralPlan {
    pub form: FormId,
    pub m: usize,
    pub n: Vec<u64>,
    pub groups: Vec<PlanGroup>,
}

impl IntegralPlan {
    /// Flattened `(weight, box)` terms.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &BoxDomain)> {
        self.groups
            .iter()
            .flat_map(|g| g.boxes.iter().map(move |b| (&g.weight, b)))
    }

    pub fn term_count(&self) -> usize {
        self.groups.iter().map(|g| g.boxes.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Sum of the coefficients of all integrals; one for every non-empty plan.
    pub fn weight_sum(&self) -> Rational {
        self.terms().map(|(w, _)| w.clone()).sum()
    }

    /// Evaluates `sum weight * integral(box)`, summing each group before
    /// weighting it.
    pub fn evaluate<F>(&self, mut integral: F) -> Result<f64>
    where
        F: FnMut(&BoxDomain) -> Result<f64>,
    {
        let mut total = NeumaierSum::default();
        for g in &self.groups {
            let mut inner = NeumaierSum::default();
            for b in &g.boxes {
                inner.add(integral(b)?);
            }
            total.add(to_f64(&g.weight) * inner.value());
        }
        Ok(total.value())
    }

    pub fn evaluate_exact<F>(&self, mut integral: F) -> Result<Rational>
    where
        F: FnMut(&[Rational], &[Rational]) -> Result<Rational>,
    {
        let mut total = Rational::zero();
        for g in &self.groups {
            let mut inner = Rational::zero();
            for b in &g.boxes {
                let lo = exact_corner(&b.lower)?;
                let hi = exact_corner(&b.upper)?;
                inner += integral(&lo, &hi)?;
            }
            total += &g.weight * inner;
        }
        Ok(total)
    }
}

fn exact_corner(x: &[f64]) -> Result<Vec<Rational>> {
    x.iter()
        .map(|&v| {
            from_f64_exact(v).ok_or_else(|| Error::InvalidInput("non-finite box corner".into()))
        })
        .collect()
}

fn halves(twice: &[i64]) -> Vec<f64> {
    twice.iter().map(|&t| t as f64 / 2.0).collect()
}

/// Builds the weighted box list for one of the six forms of `A_m`.
pub fn build_plan(m: usize, n: &[u64], form: FormId) -> Result<IntegralPlan> {
    let table = gamma_table(m)?;
    if n.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    let p = n.len();
    let mut plan = IntegralPlan {
        form,
        m,
        n: n.to_vec(),
        groups: Vec::new(),
    };
    if n.contains(&0) {
        return Ok(plan);
    }
    let n2: Vec<i64> = n.iter().map(|&nr| 2 * nr as i64).collect();
    let mi = m as i64;
    match form {
        FormId::GammaLeft | FormId::GammaRight => {
            for j in box_indices(&vec![1; p], &vec![mi; p]) {
                let ju: Vec<usize> = j.iter().map(|&x| x as usize).collect();
                let weight = gamma_of(&table, &ju)?;
                let upper_i: Vec<i64> = j.iter().map(|x| x - 1).collect();
                let boxes = box_indices(&vec![0; p], &upper_i)
                    .into_iter()
                    .map(|i| {
                        // twice the corner coordinates
                        let lower: Vec<i64> = (0..p)
                            .map(|r| {
                                if form == FormId::GammaLeft {
                                    2 * i[r] - j[r]
                                } else {
                                    -2 + j[r] - 2 * i[r]
                                }
                            })
                            .collect();
                        let upper: Vec<i64> = (0..p).map(|r| n2[r] - 2 + j[r] - 2 * i[r]).collect();
                        BoxDomain::new(halves(&lower), halves(&upper))
                    })
                    .collect::<Result<Vec<_>>>()?;
                plan.groups.push(PlanGroup { weight, boxes });
            }
        }
        FormId::TauSymmetricLeft | FormId::TauSymmetricRight => {
            for beta in box_indices(&vec![1 - mi; p], &vec![mi - 1; p]) {
                let idx: Vec<usize> = beta.iter().map(|b| 1 + b.unsigned_abs() as usize).collect();
                let weight = tau_of(&table, &idx)?;
                let bx = tau_box(&beta, &n2, form.is_left())?;
                plan.groups.push(PlanGroup {
                    weight,
                    boxes: vec![bx],
                });
            }
        }
        FormId::TauGroupedLeft | FormId::TauGroupedRight => {
            for alpha in box_indices(&vec![0; p], &vec![mi - 1; p]) {
                let idx: Vec<usize> = alpha.iter().map(|&a| 1 + a as usize).collect();
                let weight = tau_of(&table, &idx)?;
                let boxes = sign_orbit(&alpha)
                    .into_iter()
                    .map(|beta| tau_box(&beta, &n2, form.is_left()))
                    .collect::<Result<Vec<_>>>()?;
                plan.groups.push(PlanGroup { weight, boxes });
            }
        }
    }
    Ok(plan)
}

fn tau_box(beta: &[i64], n2: &[i64], left: bool) -> Result<BoxDomain> {
    let lower: Vec<i64> = beta
        .iter()
        .map(|&b| if left { b - 1 } else { -1 - b })
        .collect();
    let upper: Vec<i64> = beta.iter().zip(n2).map(|(&b, &n)| n - 1 - b).collect();
    BoxDomain::new(halves(&lower), halves(&upper))
}

/// All `beta` with `|beta| = alpha` coordinatewise.
pub fn sign_orbit(alpha: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(alpha.len())];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * 2);
        for prefix in &out {
            let choices: &[i64] = if a == 0 { &[0] } else { &[-a, a] };
            for &c in choices {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// How box integrals are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrationMethod {
    /// Corner sums when an antiderivative is attached, quadrature otherwise.
    #[default]
    Auto,
    Ftc,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltResult {
    pub approximation: f64,
    pub exact_sum: Option<f64>,
    /// `exact_sum - approximation`, which equals `-R_m`.
    pub residual: Option<f64>,
}

impl AltResult {
    pub fn with_exact_sum(mut self, exact: f64) -> Self {
        self.exact_sum = Some(exact);
        self.residual = Some(exact - self.approximation);
        self
    }
}

pub fn evaluate_alt(
    f: &FieldSpec,
    m: usize,
    n: &[u64],
    form: FormId,
    cfg: &QuadratureConfig,
) -> Result<AltResult> {
    evaluate_alt_with(f, m, n, form, cfg, IntegrationMethod::Auto)
}

pub fn evaluate_alt_with(
    f: &FieldSpec,
    m: usize,
    n: &[u64],
    form: FormId,
    cfg: &QuadratureConfig,
    method: IntegrationMethod,
) -> Result<AltResult> {
    check_dim(f, n)?;
    let plan = build_plan(m, n, form)?;
    let use_ftc = match method {
        IntegrationMethod::Auto => f.has_antiderivative(),
        IntegrationMethod::Ftc => true,
        IntegrationMethod::Quadrature => false,
    };
    let approximation = if use_ftc {
        plan.evaluate(|b| integrate_ftc(f, b))?
    } else {
        plan.evaluate(|b| integrate_quad(f, b, cfg))?
    };
    Ok(AltResult {
        approximation,
        exact_sum: None,
        residual: None,
    })
}

/// `A_m` in exact rational arithmetic via the attached exact antiderivative.
pub fn evaluate_alt_exact(f: &FieldSpec, m: usize, n: &[u64], form: FormId) -> Result<Rational> {
    check_dim(f, n)?;
    let plan = build_plan(m, n, form)?;
    plan.evaluate_exact(|lo, hi| integrate_ftc_exact(f, lo, hi))
}

fn check_dim(f: &FieldSpec, n: &[u64]) -> Result<()> {
    if f.dim() != n.len() {
        Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: n.len(),
        })
    } else {
        Ok(())
    }
}

fn lattice_size(n: &[u64]) -> u128 {
    n.iter().map(|&x| x as u128).product()
}

fn grid_upper(n: &[u64]) -> Vec<i64> {
    n.iter().map(|&x| x as i64 - 1).collect()
}

/// Plain iterated sum over `0 <= k <= n - 1`, last coordinate fastest.
pub fn exact_sum(f: &FieldSpec, n: &[u64]) -> Result<f64> {
    exact_sum_capped(f, n, DEFAULT_SUM_CAP)
}

pub fn exact_sum_capped(f: &FieldSpec, n: &[u64], cap: u128) -> Result<f64> {
    check_dim(f, n)?;
    let size = lattice_size(n);
    if size > cap {
        return Err(Error::SizeLimit {
            required: size,
            cap,
        });
    }
    let mut acc = NeumaierSum::default();
    let mut x = vec![0.0; n.len()];
    for k in box_indices(&vec![0; n.len()], &grid_upper(n)) {
        for (xr, kr) in x.iter_mut().zip(&k) {
            *xr = *kr as f64;
        }
        acc.add(f.eval(&x)?);
    }
    Ok(acc.value())
}

pub fn exact_sum_rational(f: &FieldSpec, n: &[u64]) -> Result<Rational> {
    check_dim(f, n)?;
    let size = lattice_size(n);
    if size > DEFAULT_SUM_CAP {
        return Err(Error::SizeLimit {
            required: size,
            cap: DEFAULT_SUM_CAP,
        });
    }
    box_indices(&vec![0; n.len()], &grid_upper(n))
        .into_iter()
        .try_fold(Rational::zero(), |acc, k| {
            let x: Vec<Rational> = k.iter().map(|&v| int(v)).collect();
            Ok(acc + f.eval_exact(&x)?)
        })
}

/// Node counts for the direct remainder integral.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderQuadrature {
    pub s_nodes: usize,
    pub v_nodes_per_panel: usize,
    pub v_panels_per_unit: usize,
}

impl Default for RemainderQuadrature {
    fn default() -> Self {
        RemainderQuadrature {
            s_nodes: 32,
            v_nodes_per_panel: 8,
            v_panels_per_unit: 2,
        }
    }
}

pub const REMAINDER_MAX_DIM: usize = 3;
pub const REMAINDER_MAX_ORDER: usize = 3;

/// Direct numerical evaluation of the remainder `R_m`
///
/// ```text
/// R_m = m / 2^(2m+p-1) * sum_{|alpha| = 2m} 1/alpha!
///       * int_0^1 ds (1-s)^(2m-1) int_{[-1,1]^p} dv v^alpha
///       * sum_j gamma_{m,j} j^(alpha+1) sum_k f^(alpha)(k + s j v / 2)
/// ```
///
/// so that `sum_k f(k) = A_m - R_m`.
pub fn remainder_direct(f: &FieldSpec, m: usize, n: &[u64]) -> Result<f64> {
    remainder_direct_with(f, m, n, &RemainderQuadrature::default())
}

pub fn remainder_direct_with(
    f: &FieldSpec,
    m: usize,
    n: &[u64],
    quad: &RemainderQuadrature,
) -> Result<f64> {
    check_dim(f, n)?;
    let table = gamma_table(m)?;
    let p = n.len();
    if p > REMAINDER_MAX_DIM || m > REMAINDER_MAX_ORDER {
        return Err(Error::InvalidInput(format!(
            "direct remainder evaluation is limited to p <= {REMAINDER_MAX_DIM} and m <= {REMAINDER_MAX_ORDER}"
        )));
    }
    if !f.has_derivatives() {
        return Err(Error::Capability(
            "remainder_direct needs a derivative oracle".into(),
        ));
    }
    if n.contains(&0) {
        return Ok(0.0);
    }

    let s_rule = GaussLegendre::new(quad.s_nodes);
    let s_nodes: Vec<(f64, f64)> = s_rule
        .mapped(0.0, 1.0)
        .map(|(s, w)| (s, w * (1.0 - s).powi(2 * m as i32 - 1)))
        .collect();
    let v_rule = GaussLegendre::new(quad.v_nodes_per_panel);
    let v_axis = v_rule.composite(-1.0, 1.0, 2 * quad.v_panels_per_unit);
    let v_points: Vec<(Vec<f64>, f64)> =
        box_indices(&vec![0; p], &vec![v_axis.len() as i64 - 1; p])
            .into_iter()
            .map(|idx| {
                let v: Vec<f64> = idx.iter().map(|&i| v_axis[i as usize].0).collect();
                let w: f64 = idx.iter().map(|&i| v_axis[i as usize].1).product();
                (v, w)
            })
            .collect();
    let js = box_indices(&vec![1; p], &vec![m as i64; p]);
    let ks = box_indices(&vec![0; p], &grid_upper(n));

    let mut total = NeumaierSum::default();
    for alpha in compositions(2 * m, p) {
        let d = f.derivative(&alpha)?;
        let alpha_fact: f64 = alpha.iter().map(|&a| factorial(a)).product();
        let coeffs: Vec<(Vec<f64>, f64)> = js
            .iter()
            .map(|j| {
                let ju: Vec<usize> = j.iter().map(|&x| x as usize).collect();
                let g = to_f64(&gamma_of(&table, &ju)?);
                let pw: f64 = j
                    .iter()
                    .zip(&alpha)
                    .map(|(&jr, &a)| (jr as f64).powi(a as i32 + 1))
                    .product();
                Ok((j.iter().map(|&x| x as f64).collect(), g * pw))
            })
            .collect::<Result<_>>()?;
        let per_s: Vec<Result<f64>> = s_nodes
            .par_iter()
            .map(|&(s, ws)| {
                let mut acc = NeumaierSum::default();
                let mut x = vec![0.0; p];
                for (v, wv) in &v_points {
                    let va: f64 = v
                        .iter()
                        .zip(&alpha)
                        .map(|(vr, &a)| vr.powi(a as i32))
                        .product();
                    if va == 0.0 {
                        continue;
                    }
                    let mut inner = NeumaierSum::default();
                    for (j, c) in &coeffs {
                        let mut ksum = NeumaierSum::default();
                        for k in &ks {
                            for r in 0..p {
                                x[r] = k[r] as f64 + s * j[r] * v[r] / 2.0;
                            }
                            ksum.add(checked(&d, &x)?);
                        }
                        inner.add(c * ksum.value());
                    }
                    acc.add(wv * va * inner.value());
                }
                Ok(ws * acc.value())
            })
            .collect();
        let mut s_total = NeumaierSum::default();
        for v in per_s {
            s_total.add(v?);
        }
        total.add(s_total.value() / alpha_fact);
    }
    let prefactor = m as f64 / 2f64.powi((2 * m + p - 1) as i32);
    Ok(prefactor * total.value())
}

fn factorial(a: usize) -> f64 {
    (1..=a).map(|i| i as f64).product()
}

/// One-dimensional Euler–Maclaurin approximation
/// `int_0^n f + sum_{j=1}^{2m-1} B_j / j! [f^(j-1)(n) - f^(j-1)(0)]`.
pub fn em_sum_1d(f: &FieldSpec, m: usize, n: u64, cfg: &QuadratureConfig) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::Capability(
            "the Euler-Maclaurin baseline is one-dimensional".into(),
        ));
    }
    if m == 0 {
        return Err(Error::InvalidOrder(0));
    }
    let whole = BoxDomain::new(vec![0.0], vec![n as f64])?;
    let integral = if f.has_antiderivative() {
        integrate_ftc(f, &whole)?
    } else {
        integrate_quad(f, &whole, cfg)?
    };
    let b = crate::coefficients::bernoulli_numbers(2 * m - 1);
    let mut total = NeumaierSum::default();
    total.add(integral);
    let mut fact = Rational::one();
    for (j, bj) in b.iter().enumerate().skip(1) {
        fact *= int(j as i64);
        if bj.is_zero() {
            continue;
        }
        let d = f.derivative(&[j - 1])?;
        let diff = checked(&d, &[n as f64])? - checked(&d, &[0.0])?;
        total.add(to_f64(&(bj / &fact)) * diff);
    }
    Ok(total.value())
}

/// [`em_sum_1d`] in exact arithmetic for a one-variable polynomial.
pub fn em_sum_1d_poly(q: &Polynomial, m: usize, n: u64) -> Result<Rational> {
    if q.dim() != 1 {
        return Err(Error::Capability(
            "the Euler-Maclaurin baseline is one-dimensional".into(),
        ));
    }
    if m == 0 {
        return Err(Error::InvalidOrder(0));
    }
    let (zero, end) = ([Rational::zero()], [int(n as i64)]);
    let anti = q.antiderivative();
    let mut total = anti.eval_exact(&end) - anti.eval_exact(&zero);
    let b = crate::coefficients::bernoulli_numbers(2 * m - 1);
    let mut fact = Rational::one();
    for (j, bj) in b.iter().enumerate().skip(1) {
        fact *= int(j as i64);
        let d = q.derivative(&[j - 1]);
        total += bj / &fact * (d.eval_exact(&end) - d.eval_exact(&zero));
    }
    Ok(total)
}

/// Exact `B_j` used by [`em_sum_1d`]; re-exported for reporting.
pub fn em_weight(j: usize) -> Rational {
    bernoulli(j)
}
