//! Simple lattice polytopes: facets and edges from the vertex list, signed
//! half-open vertex-cone decompositions of the indicator (flipping edge
//! directions against a generic `xi`), lattice point counts, and the
//! integral-only approximation of `sum_{k in P} f(k)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::altsum::DEFAULT_SUM_CAP;
use crate::boxcalc::{integrate_quad_fn, BoxDomain, FieldSpec, QuadratureConfig, RealFn};
use crate::coefficients::{box_indices, gamma_table, tau_of};
use crate::conedecomp::{
    cone_contains, cone_lattice_count, image_bounds, unimodular_refine, ConeList, HalfOpenCone,
    IntMatrix,
};
use crate::error::{Error, Result};
use crate::quadrature::NeumaierSum;
use crate::rational::{int, to_f64, Rational};

/// Random directions tried after the default one.
pub const XI_RETRIES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePolytope {
    pub dim: usize,
    pub vertices: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<Vec<Vec<usize>>>,
}

/// `normal . x <= offset`, with `normal` primitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Halfspace {
    pub fn contains(&self, x: &[Rational]) -> bool {
        let s = self
            .normal
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (&a, xi)| acc + int(a) * xi);
        s <= int(self.offset)
    }

    fn contains_int(&self, x: &[i64]) -> bool {
        dot(&self.normal, x) <= self.offset
    }

    fn tight_at(&self, x: &[i64]) -> bool {
        dot(&self.normal, x) == self.offset
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Rank by fraction-free elimination.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..a.len() {
            let (num, den) = (a[i][c], a[r][c]);
            for j in 0..cols {
                a[i][j] = a[i][j] * den - a[r][j] * num;
            }
            let g = a[i].iter().fold(0i128, |g, &x| g.gcd(&x));
            if g > 1 {
                a[i].iter_mut().for_each(|x| *x /= g);
            }
        }
        r += 1;
    }
    r
}

/// A normal to the hyperplane through `p` points, via cofactor expansion.
fn hyperplane_normal(points: &[&Vec<i64>]) -> Option<Vec<i64>> {
    let p = points[0].len();
    let diffs: Vec<Vec<i64>> = points[1..].iter().map(|q| sub(q, points[0])).collect();
    let normal: Vec<i64> = (0..p)
        .map(|c| {
            let minor: Vec<Vec<i64>> = diffs
                .iter()
                .map(|d| (0..p).filter(|&j| j != c).map(|j| d[j]).collect())
                .collect();
            let det = if p == 1 {
                1
            } else {
                IntMatrix::from_rows(&minor).map(|m| m.det()).unwrap_or(0) as i64
            };
            if c % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect();
    let g = normal.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        None
    } else {
        Some(normal.into_iter().map(|x| x / g).collect())
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl LatticePolytope {
    pub fn new(vertices: Vec<Vec<i64>>) -> Result<Self> {
        let dim = vertices.first().map_or(0, |v| v.len());
        Ok(LatticePolytope {
            dim,
            vertices,
            adjacency: None,
        })
    }

    /// The box `[lo, hi]` as a polytope.
    pub fn lattice_box(lo: &[i64], hi: &[i64]) -> Result<Self> {
        let p = lo.len();
        let vertices = box_indices(&vec![0; p], &vec![1; p])
            .into_iter()
            .map(|c| {
                (0..p)
                    .map(|r| if c[r] == 0 { lo[r] } else { hi[r] })
                    .collect()
            })
            .collect();
        Self::new(vertices)
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput(
                "polytope dimension must be positive".into(),
            ));
        }
        if let Some(v) = self.vertices.iter().find(|v| v.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let distinct: BTreeSet<&Vec<i64>> = self.vertices.iter().collect();
        if distinct.len() != self.vertices.len() {
            return Err(Error::InvalidInput("repeated vertex".into()));
        }
        if self.vertices.len() <= self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.vertices.len().saturating_sub(1),
            });
        }
        let diffs: Vec<Vec<i64>> = self.vertices[1..]
            .iter()
            .map(|v| sub(v, &self.vertices[0]))
            .collect();
        let r = rank(&diffs);
        if r < self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: r,
            });
        }
        Ok(())
    }

    /// Facet inequalities, found by testing every hyperplane spanned by
    /// `p` vertices for being supporting.
    pub fn halfspaces(&self) -> Result<Vec<Halfspace>> {
        self.validate()?;
        let mut out = BTreeSet::new();
        for s in subsets(self.vertices.len(), self.dim) {
            let pts: Vec<&Vec<i64>> = s.iter().map(|&i| &self.vertices[i]).collect();
            let Some(normal) = hyperplane_normal(&pts) else {
                continue;
            };
            let offset = dot(&normal, pts[0]);
            let side: Vec<i64> = self
                .vertices
                .iter()
                .map(|v| (dot(&normal, v) - offset).signum())
                .collect();
            let h = if side.iter().all(|&s| s <= 0) {
                Halfspace { normal, offset }
            } else if side.iter().all(|&s| s >= 0) {
                Halfspace {
                    normal: normal.iter().map(|x| -x).collect(),
                    offset: -offset,
                }
            } else {
                continue;
            };
            // a facet carries p affinely independent vertices
            let on: Vec<&Vec<i64>> = self.vertices.iter().filter(|v| h.tight_at(v)).collect();
            let d: Vec<Vec<i64>> = on[1..].iter().map(|v| sub(v, on[0])).collect();
            if rank(&d) == self.dim - 1 {
                out.insert(h);
            }
        }
        let facets: Vec<Halfspace> = out.into_iter().collect();
        for (i, v) in self.vertices.iter().enumerate() {
            let normals: Vec<Vec<i64>> = facets
                .iter()
                .filter(|h| h.tight_at(v))
                .map(|h| h.normal.clone())
                .collect();
            if rank(&normals) < self.dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} {v:?} is not a vertex of the convex hull"
                )));
            }
        }
        Ok(facets)
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        Ok(self.halfspaces()?.iter().all(|h| h.contains(x)))
    }

    /// Integer bounding box of the vertices.
    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        (0..self.dim)
            .map(|r| {
                let it = self.vertices.iter().map(|v| v[r]);
                (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
            })
            .unzip()
    }

    pub fn adjacency(&self) -> Option<&[Vec<usize>]> {
        self.adjacency.as_deref()
    }
}

/// Fills in the vertex adjacency (or validates a supplied one) and checks
/// that the polytope is simple.
pub fn resolve_adjacency(poly: &LatticePolytope) -> Result<LatticePolytope> {
    let facets = poly.halfspaces()?;
    let p = poly.dim;
    let nv = poly.vertices.len();
    let adjacency = match &poly.adjacency {
        Some(adj) => {
            if adj.len() != nv {
                return Err(Error::DimensionMismatch {
                    expected: nv,
                    got: adj.len(),
                });
            }
            for (i, nbrs) in adj.iter().enumerate() {
                for &j in nbrs {
                    if j >= nv || j == i || !adj[j].contains(&i) {
                        return Err(Error::InvalidInput(format!(
                            "adjacency entry {i} -> {j} is invalid or not symmetric"
                        )));
                    }
                }
            }
            adj.clone()
        }
        None => {
            let tight: Vec<Vec<usize>> = poly
                .vertices
                .iter()
                .map(|v| {
                    (0..facets.len())
                        .filter(|&f| facets[f].tight_at(v))
                        .collect()
                })
                .collect();
            let mut adj = vec![Vec::new(); nv];
            for a in 0..nv {
                for b in a + 1..nv {
                    let common: Vec<usize> = tight[a]
                        .iter()
                        .filter(|f| tight[b].contains(f))
                        .copied()
                        .collect();
                    let normals: Vec<Vec<i64>> =
                        common.iter().map(|&f| facets[f].normal.clone()).collect();
                    if rank(&normals) != p - 1 {
                        continue;
                    }
                    let on_face = (0..nv)
                        .filter(|&c| {
                            common
                                .iter()
                                .all(|&f| facets[f].tight_at(&poly.vertices[c]))
                        })
                        .count();
                    if on_face == 2 {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
            }
            adj
        }
    };
    if let Some((i, nbrs)) = adjacency.iter().enumerate().find(|(_, n)| n.len() != p) {
        return Err(Error::UnsupportedPolytope(format!(
            "vertex {i} meets {} edges in dimension {p}; only simple polytopes are supported \
             (the general signed decomposition of non-simple polytopes is not implemented)",
            nbrs.len()
        )));
    }
    Ok(LatticePolytope {
        dim: p,
        vertices: poly.vertices.clone(),
        adjacency: Some(adjacency),
    })
}

fn primitive(d: Vec<i64>) -> Vec<i64> {
    let g = d.iter().fold(0i64, |g, &x| g.gcd(&x));
    d.into_iter().map(|x| x / g).collect()
}

fn edge_directions(poly: &LatticePolytope) -> Result<Vec<Vec<Vec<i64>>>> {
    let adj = poly
        .adjacency
        .as_ref()
        .ok_or_else(|| Error::Internal("adjacency not resolved".into()))?;
    Ok(poly
        .vertices
        .iter()
        .zip(adj)
        .map(|(v, nbrs)| {
            nbrs.iter()
                .map(|&j| primitive(sub(&poly.vertices[j], v)))
                .collect()
        })
        .collect())
}

fn is_generic(xi: &[i64], dirs: &[Vec<Vec<i64>>]) -> bool {
    dirs.iter().flatten().all(|d| dot(xi, d) != 0)
}

/// `(1, M, M^2, ...)` with `M` larger than twice every edge coordinate, so
/// that no primitive edge direction is orthogonal to it; seeded random
/// vectors are the fallback.
pub fn generic_direction(poly: &LatticePolytope, seed: u64) -> Result<Vec<i64>> {
    let resolved = resolve_adjacency(poly)?;
    let dirs = edge_directions(&resolved)?;
    let max = dirs
        .iter()
        .flatten()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or(1);
    let base = 2 * max + 1;
    let xi: Vec<i64> = (0..poly.dim)
        .scan(1i64, |acc, _| {
            let cur = *acc;
            *acc = acc.saturating_mul(base);
            Some(cur)
        })
        .collect();
    if is_generic(&xi, &dirs) {
        return Ok(xi);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..XI_RETRIES {
        let xi: Vec<i64> = (0..poly.dim).map(|_| rng.gen_range(-1000..=1000)).collect();
        if is_generic(&xi, &dirs) {
            return Ok(xi);
        }
    }
    Err(Error::GenericityExhausted(XI_RETRIES + 1))
}

#[derive(Debug, Clone)]
pub struct SignedDecomposition {
    pub cones: ConeList,
    pub xi: Vec<i64>,
    pub polytope: LatticePolytope,
    /// Number of vertex cones before unimodular refinement.
    pub vertex_cone_count: usize,
}

impl SignedDecomposition {
    pub fn indicator(&self, x: &[Rational]) -> i64 {
        self.cones.indicator(x)
    }
}

/// Signed unimodular decomposition of `[P]` using the direction `xi`.
pub fn vertex_cones(poly: &LatticePolytope, xi: &[i64]) -> Result<SignedDecomposition> {
    let resolved = resolve_adjacency(poly)?;
    if xi.len() != resolved.dim {
        return Err(Error::DimensionMismatch {
            expected: resolved.dim,
            got: xi.len(),
        });
    }
    let dirs = edge_directions(&resolved)?;
    if !is_generic(xi, &dirs) {
        return Err(Error::Degenerate(format!(
            "direction {xi:?} is orthogonal to an edge"
        )));
    }
    let mut cones = Vec::new();
    for (v, ds) in resolved.vertices.iter().zip(&dirs) {
        let mut strict = vec![false; resolved.dim];
        let mut sign = 1;
        let cols: Vec<Vec<i64>> = ds
            .iter()
            .enumerate()
            .map(|(i, d)| {
                if dot(xi, d) < 0 {
                    strict[i] = true;
                    sign = -sign;
                    d.iter().map(|x| -x).collect()
                } else {
                    d.clone()
                }
            })
            .collect();
        let cone = HalfOpenCone::new(v.clone(), IntMatrix::from_columns(&cols)?, strict, sign)?;
        cones.push(cone);
    }
    let vertex_cone_count = cones.len();
    let mut refined = Vec::new();
    for c in &cones {
        refined.extend(unimodular_refine(c)?.cones);
    }
    Ok(SignedDecomposition {
        cones: ConeList { cones: refined },
        xi: xi.to_vec(),
        polytope: resolved,
        vertex_cone_count,
    })
}

/// [`vertex_cones`] with [`generic_direction`].
pub fn decompose(poly: &LatticePolytope, seed: u64) -> Result<SignedDecomposition> {
    let xi = generic_direction(poly, seed)?;
    vertex_cones(poly, &xi)
}

/// `#(P ∩ Z^p)` from the signed decomposition, counting each cone inside
/// the bounding box of `P`.
pub fn count_lattice_points(poly: &LatticePolytope) -> Result<u64> {
    count_with(&decompose(poly, 0)?)
}

pub fn count_with(decomp: &SignedDecomposition) -> Result<u64> {
    let (lo, hi) = decomp.polytope.bounding_box();
    let mut total = 0i64;
    for c in &decomp.cones.cones {
        total += c.sign() as i64 * cone_lattice_count(c, &lo, &hi)? as i64;
    }
    u64::try_from(total).map_err(|_| Error::Internal(format!("negative lattice count {total}")))
}

fn box_size(lo: &[i64], hi: &[i64]) -> u128 {
    lo.iter()
        .zip(hi)
        .map(|(l, h)| (h - l + 1).max(0) as u128)
        .product()
}

/// Lattice points of `P` by scanning its bounding box.
pub fn brute_force_points(poly: &LatticePolytope) -> Result<Vec<Vec<i64>>> {
    let facets = poly.halfspaces()?;
    let (lo, hi) = poly.bounding_box();
    let size = box_size(&lo, &hi);
    if size > DEFAULT_SUM_CAP {
        return Err(Error::SizeLimit {
            required: size,
            cap: DEFAULT_SUM_CAP,
        });
    }
    Ok(box_indices(&lo, &hi)
        .into_iter()
        .filter(|k| facets.iter().all(|h| h.contains_int(k)))
        .collect())
}

/// `sum_{k in P ∩ Z^p} f(k)` by direct enumeration.
pub fn exact_polytope_sum(poly: &LatticePolytope, f: &FieldSpec) -> Result<f64> {
    if f.dim() != poly.dim {
        return Err(Error::DimensionMismatch {
            expected: poly.dim,
            got: f.dim(),
        });
    }
    let mut acc = NeumaierSum::default();
    for k in brute_force_points(poly)? {
        let x: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        acc.add(f.eval(&x)?);
    }
    Ok(acc.value())
}

/// The integral-only approximation
/// `sum_beta tau_{1+|beta|} sum_cones sign * int_{y >= 1_J - (1+beta)/2} f(v + A y) dy`,
/// each cone integral truncated to the preimage of the support box of `f`.
pub fn polytope_alt_sum(
    poly: &LatticePolytope,
    f: &FieldSpec,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let decomp = decompose(poly, 0)?;
    polytope_alt_sum_with(&decomp, f, m, cfg)
}

pub fn polytope_alt_sum_with(
    decomp: &SignedDecomposition,
    f: &FieldSpec,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let table = gamma_table(m)?;
    let p = decomp.polytope.dim;
    if f.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: f.dim(),
        });
    }
    let support = f
        .support()
        .ok_or_else(|| Error::Capability("polytope sums need a compact support box".into()))?;
    // widen to integers so the interval image stays integral
    let slo: Vec<i64> = support.lower.iter().map(|x| x.floor() as i64).collect();
    let shi: Vec<i64> = support.upper.iter().map(|x| x.ceil() as i64).collect();

    let mi = m as i64;
    let mut total = NeumaierSum::default();
    for c in &decomp.cones.cones {
        let inv = c.inverse_unimodular()?;
        let (ylo, yhi) = image_bounds(&inv, p, c.apex(), &slo, &shi);
        let a = c.generators().clone();
        let apex: Vec<f64> = c.apex().iter().map(|&v| v as f64).collect();
        let g = f.clone();
        let pullback: RealFn = Arc::new(move |y: &[f64]| {
            let x: Vec<f64> = (0..apex.len())
                .map(|r| apex[r] + (0..y.len()).map(|c| a.get(r, c) as f64 * y[c]).sum::<f64>())
                .collect();
            g.eval(&x).map_err(|e| e.to_string())
        });
        let mut cone_sum = NeumaierSum::default();
        for beta in box_indices(&vec![1 - mi; p], &vec![mi - 1; p]) {
            let idx: Vec<usize> = beta.iter().map(|b| 1 + b.unsigned_abs() as usize).collect();
            let weight = to_f64(&tau_of(&table, &idx)?);
            let lower: Vec<f64> = (0..p)
                .map(|r| {
                    (c.strict()[r] as i64 as f64 - (1 + beta[r]) as f64 / 2.0).max(ylo[r] as f64)
                })
                .collect();
            let upper: Vec<f64> = yhi.iter().map(|&h| h as f64).collect();
            if lower.iter().zip(&upper).any(|(l, u)| l >= u) {
                continue;
            }
            let bx = BoxDomain::new(lower, upper)?;
            cone_sum.add(weight * integrate_quad_fn(&pullback, &bx, cfg)?);
        }
        total.add(c.sign() as f64 * cone_sum.value());
    }
    Ok(total.value())
}

/// The perturbed indicator
/// `sum_{|beta| = alpha} sum_cones sign * [C + A(1_J - (1+beta)/2)](x)`
/// at `x`. Diagnostic only.
pub fn perturbed_indicator(
    decomp: &SignedDecomposition,
    alpha: &[i64],
    x: &[Rational],
) -> Result<i64> {
    let p = decomp.polytope.dim;
    if alpha.len() != p || x.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: alpha.len().min(x.len()),
        });
    }
    let mut total = 0;
    for beta in crate::altsum::sign_orbit(alpha) {
        for c in &decomp.cones.cones {
            // x - A(1_J - (1+beta)/2) must lie in C
            let a = c.generators();
            let shift: Vec<Rational> = (0..p)
                .map(|col| {
                    int(c.strict()[col] as i64) - Rational::new((1 + beta[col]).into(), 2.into())
                })
                .collect();
            let moved: Vec<Rational> = (0..p)
                .map(|r| {
                    let s = (0..p).fold(Rational::zero(), |acc, col| {
                        acc + int(a.get(r, col)) * &shift[col]
                    });
                    &x[r] - s
                })
                .collect();
            if cone_contains(c, &moved) {
                total += c.sign() as i64;
            }
        }
    }
    Ok(total)
}

/// [`perturbed_indicator`] on the grid `lo + i / denom` up to `hi`.
pub fn perturbed_indicator_grid(
    decomp: &SignedDecomposition,
    alpha: &[i64],
    lo: &[i64],
    hi: &[i64],
    denom: i64,
) -> Result<Vec<(Vec<Rational>, i64)>> {
    if denom <= 0 {
        return Err(Error::InvalidInput(
            "grid denominator must be positive".into(),
        ));
    }
    let slo: Vec<i64> = lo.iter().map(|x| x * denom).collect();
    let shi: Vec<i64> = hi.iter().map(|x| x * denom).collect();
    let size = box_size(&slo, &shi);
    if size > DEFAULT_SUM_CAP {
        return Err(Error::SizeLimit {
            required: size,
            cap: DEFAULT_SUM_CAP,
        });
    }
    box_indices(&slo, &shi)
        .into_iter()
        .map(|k| {
            let x: Vec<Rational> = k
                .iter()
                .map(|&v| Rational::new(v.into(), denom.into()))
                .collect();
            let val = perturbed_indicator(decomp, alpha, &x)?;
            Ok((x, val))
        })
        .collect()
}
