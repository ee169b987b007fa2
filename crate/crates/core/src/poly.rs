//! Sparse multivariate polynomials with rational coefficients.
//!
//! Used to build fields whose antiderivatives and partial derivatives are
//! known exactly, which is what the bit-exact checks need.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::boxcalc::{DerivativeOracle, FieldSpec, RealFn};
use crate::rational::{int, to_f64, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    p: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn zero(p: usize) -> Self {
        Polynomial {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: usize, c: Rational) -> Self {
        let mut q = Self::zero(p);
        q.add_term(vec![0; p], c);
        q
    }

    /// `c * x^exponents`.
    pub fn monomial(exponents: Vec<u32>, c: Rational) -> Self {
        let mut q = Self::zero(exponents.len());
        q.add_term(exponents, c);
        q
    }

    pub fn from_terms(p: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut q = Self::zero(p);
        for (e, c) in terms {
            q.add_term(e, c);
        }
        q
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: Rational) {
        assert_eq!(exponents.len(), self.p, "exponent vector has wrong length");
        let entry = self.terms.entry(exponents).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (e, c)| {
            let mono = e.iter().zip(x).fold(c.clone(), |m, (&k, xi)| {
                m * num_traits::pow(xi.clone(), k as usize)
            });
            acc + mono
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(to_f64(c), |m, (&k, xi)| m * xi.powi(k as i32))
            })
            .sum()
    }

    /// The mixed partial `d^|alpha| / dx^alpha`.
    pub fn derivative(&self, alpha: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(self.p);
        for (e, c) in &self.terms {
            if e.iter().zip(alpha).any(|(&k, &a)| (k as usize) < a) {
                continue;
            }
            let mut coef = c.clone();
            let mut ne = e.clone();
            for (r, &a) in alpha.iter().enumerate() {
                for t in 0..a {
                    coef *= int(e[r] as i64 - t as i64);
                }
                ne[r] -= a as u32;
            }
            out.add_term(ne, coef);
        }
        out
    }

    /// The antiderivative obtained by integrating once in every variable
    /// from zero, so that its `(1, ..., 1)` mixed partial is `self`.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.p);
        for (e, c) in &self.terms {
            let denom = e
                .iter()
                .fold(Rational::one(), |d, &k| d * int(k as i64 + 1));
            out.add_term(e.iter().map(|k| k + 1).collect(), c / denom);
        }
        out
    }

    /// An upper bound for `|self|` on the cube `[-1, 1]^p`.
    pub fn abs_coefficient_sum(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Substitutes `x_r -> scale_r * x_r + shift_r` in every coordinate.
    pub fn affine_substitute(&self, scale: &[Rational], shift: &[Rational]) -> Polynomial {
        let mut out = Polynomial::constant(self.p, Rational::zero());
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(self.p, c.clone());
            for (r, &k) in e.iter().enumerate() {
                let mut lin = Polynomial::zero(self.p);
                let mut ex = vec![0; self.p];
                ex[r] = 1;
                lin.add_term(ex, scale[r].clone());
                lin.add_term(vec![0; self.p], shift[r].clone());
                for _ in 0..k {
                    term = term.mul(&lin);
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.p);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn to_real_fn(&self) -> RealFn {
        let me = self.clone();
        Arc::new(move |x| Ok(me.eval(x)))
    }

    /// A field carrying exact evaluation, the exact antiderivative and every
    /// partial derivative.
    pub fn to_field(&self) -> FieldSpec {
        let anti = self.antiderivative();
        let anti_f = anti.clone();
        let me_exact = self.clone();
        let me_deriv = self.clone();
        let oracle: DerivativeOracle =
            Arc::new(move |alpha: &[usize]| Some(me_deriv.derivative(alpha).to_real_fn()));
        FieldSpec::from_fn(self.p, self.to_real_fn())
            .with_antiderivative(move |x| anti_f.eval(x))
            .with_derivatives(oracle)
            .with_exact(
                Arc::new(move |x: &[Rational]| Ok(me_exact.eval_exact(x))),
                Some(Arc::new(move |x: &[Rational]| Ok(anti.eval_exact(x)))),
            )
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (r, &k) in e.iter().enumerate() {
                if k > 0 {
                    write!(f, "*x{}^{}", r + 1, k)?;
                }
            }
        }
        Ok(())
    }
}
