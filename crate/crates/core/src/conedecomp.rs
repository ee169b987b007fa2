//! Half-open integer cones `v + A R+_J` and their refinement into signed
//! sums of unimodular cones.
//!
//! Coordinates listed in `J` are strict (`y_j > 0`), the others closed
//! (`y_j >= 0`). Internally the closed/strict flag is the `epsilon` of the
//! refinement lemma: `true` means closed.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::box_indices;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Square integer matrix, stored row-major. Cone generators are its columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    p: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let p = rows.len();
        if p == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: bad.len(),
            });
        }
        Ok(IntMatrix {
            p,
            entries: rows.concat(),
        })
    }

    pub fn from_columns(cols: &[Vec<i64>]) -> Result<Self> {
        let m = Self::from_rows(cols)?;
        Ok(m.transpose())
    }

    pub fn identity(p: usize) -> Self {
        let mut entries = vec![0; p * p];
        for i in 0..p {
            entries[i * p + i] = 1;
        }
        IntMatrix { p, entries }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.p + c]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.p).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.p).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let p = self.p;
        let mut entries = vec![0; p * p];
        for r in 0..p {
            for c in 0..p {
                entries[c * p + r] = self.get(r, c);
            }
        }
        IntMatrix { p, entries }
    }

    pub fn with_column(&self, c: usize, col: &[i64]) -> Self {
        let mut out = self.clone();
        for (r, &v) in col.iter().enumerate() {
            out.entries[r * self.p + c] = v;
        }
        out
    }

    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        (0..self.p)
            .map(|r| (0..self.p).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }

    /// Fraction-free (Bareiss) elimination in `i128`.
    pub fn det(&self) -> i128 {
        det_i128(self.p, self.entries.iter().map(|&x| x as i128).collect())
    }

    /// `adj(A)` with `A adj(A) = det(A) I`, row-major.
    pub fn adjugate(&self) -> Vec<i128> {
        let p = self.p;
        if p == 1 {
            return vec![1];
        }
        let mut adj = vec![0i128; p * p];
        for r in 0..p {
            for c in 0..p {
                let mut minor = Vec::with_capacity((p - 1) * (p - 1));
                for rr in (0..p).filter(|&x| x != r) {
                    for cc in (0..p).filter(|&x| x != c) {
                        minor.push(self.get(rr, cc) as i128);
                    }
                }
                let cof = det_i128(p - 1, minor);
                adj[c * p + r] = if (r + c) % 2 == 0 { cof } else { -cof };
            }
        }
        adj
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }
}

fn det_i128(n: usize, mut a: Vec<i128>) -> i128 {
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n.saturating_sub(1) {
        if a[k * n + k] == 0 {
            match (k + 1..n).find(|&i| a[i * n + k] != 0) {
                Some(i) => {
                    for c in 0..n {
                        a.swap(k * n + c, i * n + c);
                    }
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
            }
        }
        prev = a[k * n + k];
    }
    sign * a[n * n - 1]
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

impl std::str::FromStr for IntMatrix {
    type Err = Error;

    /// Rows separated by `;`, entries by `,`.
    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|e| {
                        e.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::InvalidInput(format!("bad matrix entry {e:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        IntMatrix::from_rows(&rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfOpenCone {
    apex: Vec<i64>,
    generators: IntMatrix,
    strict: Vec<bool>,
    sign: i32,
    det: i128,
    adj: Vec<i128>,
}

impl HalfOpenCone {
    pub fn new(
        apex: Vec<i64>,
        generators: IntMatrix,
        strict: Vec<bool>,
        sign: i32,
    ) -> Result<Self> {
        let p = generators.dim();
        for len in [apex.len(), strict.len()] {
            if len != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: len,
                });
            }
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidInput(format!(
                "cone sign must be +1 or -1, got {sign}"
            )));
        }
        let det = generators.det();
        if det == 0 {
            return Err(Error::Degenerate(
                "cone generators are linearly dependent".into(),
            ));
        }
        let adj = generators.adjugate();
        Ok(HalfOpenCone {
            apex,
            generators,
            strict,
            sign,
            det,
            adj,
        })
    }

    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    pub fn apex(&self) -> &[i64] {
        &self.apex
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    pub fn strict(&self) -> &[bool] {
        &self.strict
    }

    /// Zero-based indices of the strict coordinates.
    pub fn strict_set(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.strict[j]).collect()
    }

    pub fn sign(&self) -> i32 {
        self.sign
    }

    pub fn det(&self) -> i128 {
        self.det
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs() == 1
    }

    /// `det(A) * A^{-1} (x - v)`, computed exactly.
    fn scaled_coords(&self, x: &[Rational]) -> Vec<Rational> {
        let p = self.dim();
        let d: Vec<Rational> = x
            .iter()
            .zip(&self.apex)
            .map(|(xi, &vi)| xi - int(vi))
            .collect();
        (0..p)
            .map(|i| {
                (0..p).fold(Rational::zero(), |acc, r| {
                    acc + Rational::from_integer(self.adj[i * p + r].into()) * &d[r]
                })
            })
            .collect()
    }

    /// `A^{-1}(x - v)`.
    pub fn coordinates(&self, x: &[Rational]) -> Vec<Rational> {
        let det = Rational::from_integer(self.det.into());
        self.scaled_coords(x)
            .into_iter()
            .map(|z| z / &det)
            .collect()
    }

    /// `A^{-1}` for a unimodular cone, as integers.
    pub fn inverse_unimodular(&self) -> Result<Vec<i64>> {
        if !self.is_unimodular() {
            return Err(Error::Capability("cone is not unimodular".into()));
        }
        Ok(self.adj.iter().map(|&a| (a * self.det) as i64).collect())
    }
}

/// `true` iff `x` lies in the cone.
pub fn cone_contains(cone: &HalfOpenCone, x: &[Rational]) -> bool {
    let positive_det = cone.det > 0;
    cone.scaled_coords(x)
        .iter()
        .zip(&cone.strict)
        .all(|(z, &strict)| {
            let z = if positive_det { z.clone() } else { -z };
            if strict {
                z.is_positive()
            } else {
                !z.is_negative()
            }
        })
}

/// A signed list of cones standing for `sum sign * [cone]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConeList {
    pub cones: Vec<HalfOpenCone>,
}

impl ConeList {
    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn indicator(&self, x: &[Rational]) -> i64 {
        self.cones
            .iter()
            .filter(|c| cone_contains(c, x))
            .map(|c| c.sign as i64)
            .sum()
    }
}

/// The lexicographically smallest nonzero integer point `w` of the
/// fundamental parallelepiped `{A x : x in [0, 1)^p}`.
pub fn find_w(a: &IntMatrix) -> Result<Vec<i64>> {
    let det = a.det();
    if det.abs() < 2 {
        return Err(Error::InvalidInput(format!(
            "find_w needs |det A| >= 2, got {det}"
        )));
    }
    let p = a.dim();
    let adj = a.adjugate();
    let (lo, hi): (Vec<i64>, Vec<i64>) = (0..p)
        .map(|r| {
            let row: Vec<i64> = (0..p).map(|c| a.get(r, c)).collect();
            (
                row.iter().filter(|&&x| x < 0).sum::<i64>(),
                row.iter().filter(|&&x| x > 0).sum::<i64>(),
            )
        })
        .unzip();
    box_indices(&lo, &hi)
        .into_iter()
        .find(|w| w.iter().any(|&x| x != 0) && in_parallelepiped(&adj, det, w))
        .ok_or_else(|| Error::Internal("no interior lattice point in the parallelepiped".into()))
}

fn in_parallelepiped(adj: &[i128], det: i128, w: &[i64]) -> bool {
    parallelepiped_coords(adj, det, w)
        .iter()
        .all(|&z| 0 <= z && z < det.abs())
}

/// `|det A| * A^{-1} w`.
fn parallelepiped_coords(adj: &[i128], det: i128, w: &[i64]) -> Vec<i128> {
    let p = w.len();
    (0..p)
        .map(|i| {
            let z: i128 = (0..p).map(|r| adj[i * p + r] * w[r] as i128).sum();
            if det > 0 {
                z
            } else {
                -z
            }
        })
        .collect()
}

/// Rows `epsilon_{i, .}` for each `i` in `k` (in the given order), where
/// `true` means closed.
///
/// `k` is processed in the order of nondecreasing `epsilon_i`, ties broken
/// by index; `epsilon_{ij} = 1` exactly when `i` precedes `j` in that order.
pub fn epsilon_assignment(base_eps: &[bool], k: &[usize]) -> Result<Vec<Vec<bool>>> {
    if k.is_empty() {
        return Err(Error::InvalidInput("K must be nonempty".into()));
    }
    let p = base_eps.len();
    if let Some(&bad) = k.iter().find(|&&i| i >= p) {
        return Err(Error::IndexOutOfRange { index: bad, max: p });
    }
    let mut order: Vec<usize> = k.to_vec();
    order.sort_by_key(|&i| (base_eps[i], i));
    order.dedup();
    if order.len() != k.len() {
        return Err(Error::InvalidInput("K has repeated indices".into()));
    }
    let mut pos = vec![usize::MAX; p];
    for (t, &i) in order.iter().enumerate() {
        pos[i] = t;
    }
    let rows: Vec<Vec<bool>> = k
        .iter()
        .map(|&i| {
            (0..p)
                .map(|j| {
                    if j == i || pos[j] == usize::MAX {
                        base_eps[j]
                    } else {
                        pos[i] < pos[j]
                    }
                })
                .collect()
        })
        .collect();
    check_epsilon_conditions(base_eps, k, &rows).map_err(Error::Internal)?;
    Ok(rows)
}

/// Checks conditions (i)-(v) of the refinement lemma.
pub fn check_epsilon_conditions(
    base_eps: &[bool],
    k: &[usize],
    rows: &[Vec<bool>],
) -> std::result::Result<(), String> {
    let p = base_eps.len();
    let in_k = |j: usize| k.contains(&j);
    for (a, &i) in k.iter().enumerate() {
        let row = &rows[a];
        for j in (0..p).filter(|&j| !in_k(j)) {
            if row[j] != base_eps[j] {
                return Err(format!("(i) fails at ({i}, {j})"));
            }
        }
        if row[i] != base_eps[i] {
            return Err(format!("(ii) fails at {i}"));
        }
        for (b, &j) in k.iter().enumerate() {
            if i != j && (row[j] as u8 + rows[b][i] as u8) != 1 {
                return Err(format!("(iii) fails at ({i}, {j})"));
            }
            if base_eps[i] && row[j] && !base_eps[j] {
                return Err(format!("(iv) fails at ({i}, {j})"));
            }
        }
    }
    // (v): every nonempty subset has a member dominating the rest
    let kk = k.len();
    if kk < 64 {
        for mask in 1u64..(1u64 << kk) {
            let members: Vec<usize> = (0..kk).filter(|&t| mask >> t & 1 == 1).collect();
            let ok = members
                .iter()
                .any(|&a| members.iter().all(|&b| a == b || rows[a][k[b]]));
            if !ok {
                return Err(format!("(v) fails for subset mask {mask:#b}"));
            }
        }
    }
    Ok(())
}

/// Splits a cone into unimodular cones with the same apex and sign whose
/// indicators sum to the indicator of the input.
pub fn unimodular_refine(cone: &HalfOpenCone) -> Result<ConeList> {
    let mut out = Vec::new();
    let mut stack = vec![cone.clone()];
    while let Some(c) = stack.pop() {
        if c.is_unimodular() {
            out.push(c);
            continue;
        }
        let d = c.det.abs();
        let w = find_w(&c.generators)?;
        let z = parallelepiped_coords(&c.adj, c.det, &w);
        let k: Vec<usize> = (0..c.dim()).filter(|&i| z[i] > 0).collect();
        let eps: Vec<bool> = c.strict.iter().map(|s| !s).collect();
        let rows = epsilon_assignment(&eps, &k)?;
        let mut children = Vec::with_capacity(k.len());
        for (row, &i) in rows.iter().zip(&k) {
            let child = HalfOpenCone::new(
                c.apex.clone(),
                c.generators.with_column(i, &w),
                row.iter().map(|e| !e).collect(),
                c.sign,
            )?;
            if child.det.abs() != z[i] || z[i] >= d {
                return Err(Error::Internal(format!(
                    "child determinant {} does not shrink below {d}",
                    child.det
                )));
            }
            children.push(child);
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(ConeList { cones: out })
}

/// Calls `visit` on every lattice point of a unimodular cone inside the
/// integer box `[lo, hi]`, via `k = v + A(l + 1_J)`, `l >= 0`.
pub fn for_each_cone_lattice_point<F>(
    cone: &HalfOpenCone,
    lo: &[i64],
    hi: &[i64],
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[i64]),
{
    let p = cone.dim();
    if lo.len() != p || hi.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: lo.len().min(hi.len()),
        });
    }
    let inv = cone.inverse_unimodular()?;
    let (ylo, yhi) = image_bounds(&inv, p, cone.apex(), lo, hi);
    let shift: Vec<i64> = cone.strict.iter().map(|&s| s as i64).collect();
    let llo: Vec<i64> = (0..p).map(|i| (ylo[i] - shift[i]).max(0)).collect();
    let lhi: Vec<i64> = (0..p).map(|i| yhi[i] - shift[i]).collect();
    let mut y = vec![0; p];
    for l in box_indices(&llo, &lhi) {
        for i in 0..p {
            y[i] = l[i] + shift[i];
        }
        let mut x = cone.generators.mul_vec(&y);
        for (xi, vi) in x.iter_mut().zip(cone.apex()) {
            *xi += vi;
        }
        if x.iter()
            .zip(lo.iter().zip(hi))
            .all(|(xi, (l, h))| l <= xi && xi <= h)
        {
            visit(&x);
        }
    }
    Ok(())
}

/// Interval image of `{M (x - v) : lo <= x <= hi}` for an integer matrix `M`.
pub(crate) fn image_bounds(
    m: &[i64],
    p: usize,
    v: &[i64],
    lo: &[i64],
    hi: &[i64],
) -> (Vec<i64>, Vec<i64>) {
    (0..p)
        .map(|i| {
            (0..p).fold((0, 0), |(a, b), r| {
                let c = m[i * p + r];
                let (x0, x1) = (c * (lo[r] - v[r]), c * (hi[r] - v[r]));
                (a + x0.min(x1), b + x0.max(x1))
            })
        })
        .unzip()
}

pub fn cone_lattice_points(cone: &HalfOpenCone, lo: &[i64], hi: &[i64]) -> Result<Vec<Vec<i64>>> {
    let mut pts = Vec::new();
    for_each_cone_lattice_point(cone, lo, hi, |x| pts.push(x.to_vec()))?;
    pts.sort();
    Ok(pts)
}

pub fn cone_lattice_count(cone: &HalfOpenCone, lo: &[i64], hi: &[i64]) -> Result<u64> {
    let mut n = 0u64;
    for_each_cone_lattice_point(cone, lo, hi, |_| n += 1)?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn ints(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn determinants_and_adjugates() {
        assert_eq!(m(&[&[1, 1], &[0, 2]]).det(), 2);
        assert_eq!(m(&[&[2, 1], &[1, 2]]).det(), 3);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), -1);
        let a = m(&[&[2, 0, 1], &[1, 3, 0], &[0, 1, 4]]);
        assert_eq!(a.det(), 25);
        let adj = a.adjugate();
        for r in 0..3 {
            for c in 0..3 {
                let s: i128 = (0..3).map(|t| a.get(r, t) as i128 * adj[t * 3 + c]).sum();
                assert_eq!(s, if r == c { 25 } else { 0 });
            }
        }
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), 0);
        assert_eq!(
            "1,1;0,2".parse::<IntMatrix>().unwrap(),
            m(&[&[1, 1], &[0, 2]])
        );
    }

    #[test]
    fn membership_examples() {
        let closed =
            HalfOpenCone::new(vec![0, 0], IntMatrix::identity(2), vec![false; 2], 1).unwrap();
        assert!(cone_contains(&closed, &ints(&[0, 0])));
        let open = HalfOpenCone::new(vec![0, 0], IntMatrix::identity(2), vec![true; 2], 1).unwrap();
        assert!(!cone_contains(&open, &ints(&[0, 0])));
        let c = HalfOpenCone::new(vec![0, 0], m(&[&[1, 1], &[0, 2]]), vec![false; 2], 1).unwrap();
        assert!(cone_contains(&c, &ints(&[1, 1])));
        assert_eq!(c.coordinates(&ints(&[1, 1])), vec![rat(1, 2), rat(1, 2)]);
        assert!(!cone_contains(&c, &ints(&[0, 1])));
    }

    #[test]
    fn negative_determinant_membership() {
        let c =
            HalfOpenCone::new(vec![1, 1], m(&[&[0, 1], &[1, 0]]), vec![false, true], -1).unwrap();
        // y = (x2 - 1, x1 - 1), second coordinate strict
        assert!(cone_contains(&c, &ints(&[2, 1])));
        assert!(!cone_contains(&c, &ints(&[1, 2])));
    }

    #[test]
    fn w_examples() {
        assert_eq!(find_w(&m(&[&[1, 1], &[0, 2]])).unwrap(), vec![1, 1]);
        assert_eq!(find_w(&m(&[&[1, 0], &[0, 3]])).unwrap(), vec![0, 1]);
        assert_eq!(find_w(&m(&[&[2, 1], &[1, 2]])).unwrap(), vec![1, 1]);
        assert!(find_w(&IntMatrix::identity(2)).is_err());
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_assignment(&[true], &[0]).unwrap(), vec![vec![true]]);
        assert_eq!(
            epsilon_assignment(&[false, true], &[0, 1]).unwrap(),
            vec![vec![false, true], vec![false, true]]
        );
        assert_eq!(
            epsilon_assignment(&[true, false], &[0, 1]).unwrap(),
            vec![vec![true, false], vec![true, false]]
        );
    }

    #[test]
    fn epsilon_exhaustive() {
        for p in 1..=5usize {
            for eps_mask in 0u32..(1 << p) {
                let eps: Vec<bool> = (0..p).map(|j| eps_mask >> j & 1 == 1).collect();
                for k_mask in 1u32..(1 << p) {
                    let k: Vec<usize> = (0..p).filter(|&j| k_mask >> j & 1 == 1).collect();
                    let rows = epsilon_assignment(&eps, &k).unwrap();
                    check_epsilon_conditions(&eps, &k, &rows).unwrap();
                }
            }
        }
    }

    #[test]
    fn checker_rejects_bad_rows() {
        // both rows claim priority over each other
        let rows = vec![vec![false, true], vec![true, false]];
        assert!(check_epsilon_conditions(&[false, false], &[0, 1], &rows).is_err());
    }

    fn assert_identity(parent: &HalfOpenCone, children: &ConeList, radius: i64) {
        for x in -2 * radius..=2 * radius {
            for y in -2 * radius..=2 * radius {
                let pt = vec![rat(x, 2), rat(y, 2)];
                let want = if cone_contains(parent, &pt) {
                    parent.sign() as i64
                } else {
                    0
                };
                assert_eq!(children.indicator(&pt), want, "at {pt:?}");
            }
        }
    }

    #[test]
    fn refine_examples() {
        let id =
            HalfOpenCone::new(vec![0, 0], IntMatrix::identity(2), vec![true, false], 1).unwrap();
        assert_eq!(unimodular_refine(&id).unwrap().cones, vec![id.clone()]);

        let c = HalfOpenCone::new(vec![0, 0], m(&[&[1, 1], &[0, 2]]), vec![false; 2], 1).unwrap();
        let out = unimodular_refine(&c).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.cones.iter().all(|k| k.is_unimodular() && k.sign() == 1));
        assert_identity(&c, &out, 10);

        let c3 =
            HalfOpenCone::new(vec![1, -1], m(&[&[2, 1], &[1, 2]]), vec![true, false], -1).unwrap();
        let out3 = unimodular_refine(&c3).unwrap();
        assert!(out3
            .cones
            .iter()
            .all(|k| k.det().abs() == 1 && k.apex() == [1, -1]));
        assert_identity(&c3, &out3, 10);
    }

    #[test]
    fn lattice_point_examples() {
        let id = HalfOpenCone::new(vec![0, 0], IntMatrix::identity(2), vec![false; 2], 1).unwrap();
        assert_eq!(cone_lattice_points(&id, &[0, 0], &[2, 2]).unwrap().len(), 9);
        let open = HalfOpenCone::new(vec![0, 0], IntMatrix::identity(2), vec![true; 2], 1).unwrap();
        assert_eq!(
            cone_lattice_points(&open, &[0, 0], &[2, 2]).unwrap(),
            vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]
        );
        let shear =
            HalfOpenCone::new(vec![0, 0], m(&[&[1, 1], &[0, 1]]), vec![false; 2], 1).unwrap();
        let pts = cone_lattice_points(&shear, &[0, 0], &[3, 3]).unwrap();
        assert_eq!(pts.len(), 10);
        assert!(pts.iter().all(|q| q[1] <= q[0]));
        let bad = HalfOpenCone::new(vec![0, 0], m(&[&[1, 1], &[0, 2]]), vec![false; 2], 1).unwrap();
        assert!(matches!(
            cone_lattice_points(&bad, &[0, 0], &[1, 1]),
            Err(Error::Capability(_))
        ));
    }
}
