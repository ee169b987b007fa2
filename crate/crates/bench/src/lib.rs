//! Shared inputs for the benchmarks.

use std::sync::Arc;

use altsum_core::boxcalc::{DerivativeOracle, RealFn};
use altsum_core::rational::int;
use altsum_core::{FieldSpec, HalfOpenCone, IntMatrix, LatticePolytope, Polynomial};

pub fn quintic() -> Polynomial {
    Polynomial::from_terms(
        1,
        [(vec![5], int(1)), (vec![2], int(-3)), (vec![0], int(1))],
    )
}

/// exp(-(x1 + ... + xp)) with every partial derivative supplied.
pub fn exp_neg(p: usize) -> FieldSpec {
    let oracle: DerivativeOracle = Arc::new(|alpha: &[usize]| {
        let order: usize = alpha.iter().sum();
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        let d: RealFn = Arc::new(move |x: &[f64]| Ok(sign * (-x.iter().sum::<f64>()).exp()));
        Some(d)
    });
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    FieldSpec::new(p, |x| (-x.iter().sum::<f64>()).exp())
        .with_antiderivative(move |x| sign * (-x.iter().sum::<f64>()).exp())
        .with_derivatives(oracle)
}

pub fn skew_cone(k: i64) -> HalfOpenCone {
    let g = IntMatrix::from_columns(&[vec![1, 0, 0], vec![1, k, 0], vec![0, 1, k]])
        .expect("valid matrix");
    HalfOpenCone::new(vec![0, 0, 0], g, vec![true, false, false], 1).expect("valid cone")
}

pub fn triangle(size: i64) -> LatticePolytope {
    LatticePolytope::new(vec![vec![0, 0], vec![size, 0], vec![0, size]]).expect("valid polytope")
}

pub fn cube(size: i64) -> LatticePolytope {
    let mut v = Vec::new();
    for i in 0..8 {
        v.push(
            (0..3)
                .map(|b| if i >> b & 1 == 1 { size } else { 0 })
                .collect(),
        );
    }
    LatticePolytope::new(v).expect("valid polytope")
}
