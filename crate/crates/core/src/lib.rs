//! Integral-only approximation of multiple sums, generalized sums of
//! divergent multi-index series, and sums over lattice polytopes through
//! signed unimodular cone decompositions.

pub mod altsum;
pub mod bounds;
pub mod boxcalc;
pub mod coefficients;
pub mod conedecomp;
pub mod error;
pub mod exprdsl;
pub mod poly;
pub mod polytope;
pub mod quadrature;
pub mod rational;
pub mod series;

pub use altsum::{
    build_plan, em_sum_1d, em_sum_1d_poly, evaluate_alt, evaluate_alt_exact, evaluate_alt_with,
    exact_sum, exact_sum_rational, remainder_direct, AltResult, FormId, IntegralPlan,
    IntegrationMethod,
};
pub use bounds::{bound_coarse, bound_report, bound_tight, kappa, lambda_star, BoundReport};
pub use boxcalc::{integrate_ftc, integrate_quad, BoxDomain, FieldSpec, QuadratureConfig};
pub use coefficients::{
    bernoulli, compositions, gamma_table, tau_of, CoefficientTable, MultiIndex,
};
pub use conedecomp::{
    cone_contains, cone_lattice_points, epsilon_assignment, find_w, unimodular_refine, ConeList,
    HalfOpenCone, IntMatrix,
};
pub use error::{Error, Result};
pub use exprdsl::{parse, Expr};
pub use poly::Polynomial;
pub use polytope::{
    count_lattice_points, exact_polytope_sum, polytope_alt_sum, resolve_adjacency, vertex_cones,
    LatticePolytope, SignedDecomposition,
};
pub use rational::Rational;
pub use series::{a_superscript_j, a_tilde, generalized_sum, shift_consistency, SeriesResult};
