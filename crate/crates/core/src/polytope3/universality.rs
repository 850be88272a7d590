//! Encoding `{y >= 0 : A y = b}` as a face of an axial 3-way transportation polytope.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{affine_dimension, EqualityPolytope, Matrix};
use crate::scalar::Scalar;
use crate::tables::{AxialMargins, Table3};

/// Cap on integer points enumerated while verifying an encoding.
pub const INTEGER_POINT_LIMIT: u128 = 1_000_000;

/// An integer system `A y = b` over `y >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntSystem {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
}

impl IntSystem {
    pub fn new(a: Vec<Vec<i64>>, b: Vec<i64>) -> Result<Self> {
        let n = a.first().map_or(0, Vec::len);
        if a.is_empty() || n == 0 || a.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch(
                "A must be a non-empty rectangular matrix".into(),
            ));
        }
        if a.len() != b.len() {
            return Err(Error::ShapeMismatch(format!(
                "A has {} rows but b has {} entries",
                a.len(),
                b.len()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn equations(&self) -> usize {
        self.a.len()
    }

    pub fn variables(&self) -> usize {
        self.a[0].len()
    }

    pub fn polytope<T: Scalar>(&self) -> EqualityPolytope<T> {
        let rows = self
            .a
            .iter()
            .map(|row| row.iter().map(|&v| T::from_i64(v)).collect())
            .collect();
        EqualityPolytope::new(
            Matrix::from_rows(rows),
            self.b.iter().map(|&v| T::from_i64(v)).collect(),
        )
    }
}

/// Result of the coefficient reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step1 {
    pub system: IntSystem,
    /// `variables[c] = (j, s)`: reduced variable `c` equals `2^s y_j`.
    pub variables: Vec<(usize, usize)>,
}

fn bit_length(v: i64) -> usize {
    64 - v.unsigned_abs().leading_zeros() as usize
}

/// Rewrites `A y = b` with coefficients in `{-1, 0, 1, 2}`.
///
/// Variable `y_j` becomes the chain `x_{j,0}, ..., x_{j,k_j}` tied by
/// `2 x_{j,s} - x_{j,s+1} = 0`, where `k_j + 1` is the largest bit length in
/// column `j`. A coefficient `a` is replaced by `sign(a)` times the sum of the
/// `x_{j,s}` at the one bits of `|a|`. Chain equations come first, grouped by
/// variable, followed by the rewritten original equations.
pub fn universality_step1(sys: &IntSystem) -> Step1 {
    let (m, n) = (sys.equations(), sys.variables());
    let k: Vec<usize> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| bit_length(sys.a[i][j]))
                .max()
                .unwrap_or(0)
                .max(1)
                - 1
        })
        .collect();
    let mut variables = Vec::new();
    let mut first = Vec::with_capacity(n);
    for (j, &kj) in k.iter().enumerate() {
        first.push(variables.len());
        variables.extend((0..=kj).map(|s| (j, s)));
    }
    let width = variables.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (j, &kj) in k.iter().enumerate() {
        for s in 0..kj {
            let mut row = vec![0; width];
            row[first[j] + s] = 2;
            row[first[j] + s + 1] = -1;
            a.push(row);
            b.push(0);
        }
    }
    for i in 0..m {
        let mut row = vec![0; width];
        for j in 0..n {
            let c = sys.a[i][j];
            let sign = c.signum();
            let mag = c.unsigned_abs();
            for s in 0..=k[j] {
                if mag >> s & 1 == 1 {
                    row[first[j] + s] = sign;
                }
            }
        }
        a.push(row);
        b.push(sys.b[i]);
    }
    Step1 {
        system: IntSystem { a, b },
        variables,
    }
}

/// An axial `r x r x (m+1)` polytope whose face `{forbidden cells = 0}` represents a source polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalityEncoding<T> {
    pub source: IntSystem,
    pub reduced: IntSystem,
    /// `variables[c] = (j, s)`: reduced variable `c` equals `2^s y_j`.
    pub variables: Vec<(usize, usize)>,
    /// Upper bound on every coordinate of the reduced polytope.
    pub bound: i64,
    /// `r_c` for each reduced variable.
    pub block_sizes: Vec<usize>,
    pub margins: AxialMargins<T>,
    /// Sorted cells forced to zero.
    pub forbidden: Vec<(usize, usize, usize)>,
    /// Cell holding each source variable.
    pub coordinate_map: Vec<(usize, usize, usize)>,
}

impl<T: Scalar> UniversalityEncoding<T> {
    pub fn shape(&self) -> (usize, usize, usize) {
        self.margins.shape()
    }

    /// Complement of the forbidden set, in lexicographic order.
    pub fn allowed(&self) -> Vec<(usize, usize, usize)> {
        let (p, q, s) = self.shape();
        let forbidden: BTreeSet<_> = self.forbidden.iter().copied().collect();
        let mut out = Vec::new();
        for i in 0..p {
            for j in 0..q {
                for k in 0..s {
                    if !forbidden.contains(&(i, j, k)) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// The face as a polytope over the allowed cells only.
    pub fn face_polytope(&self) -> EqualityPolytope<T> {
        let (p, q, s) = self.shape();
        let allowed = self.allowed();
        let mut rows = vec![vec![T::zero(); allowed.len()]; p + q + s];
        for (c, &(i, j, k)) in allowed.iter().enumerate() {
            rows[i][c] = T::one();
            rows[p + j][c] = T::one();
            rows[p + q + k][c] = T::one();
        }
        let m = &self.margins;
        let rhs = m.u.iter().chain(&m.v).chain(&m.w).cloned().collect();
        EqualityPolytope::new(Matrix::from_rows(rows), rhs)
    }

    /// Places values of the allowed cells into a full table.
    pub fn embed(&self, point: &[T]) -> Table3<T> {
        let (p, q, s) = self.shape();
        let mut x = Table3::zeros(p, q, s);
        for (&(i, j, k), v) in self.allowed().iter().zip(point) {
            x.set(i, j, k, v.clone());
        }
        x
    }

    /// Source coordinates read off the designated cells.
    pub fn project(&self, x: &Table3<T>) -> Vec<T> {
        self.coordinate_map
            .iter()
            .map(|&(i, j, k)| x.get(i, j, k).clone())
            .collect()
    }

    pub fn source_polytope(&self) -> EqualityPolytope<T> {
        self.source.polytope()
    }

    pub fn face_vertices(&self) -> Result<Vec<Table3<T>>> {
        Ok(self
            .face_polytope()
            .vertices()?
            .iter()
            .map(|v| self.embed(v))
            .collect())
    }

    pub fn face_integer_points(&self) -> Result<Vec<Table3<T>>> {
        Ok(self
            .face_polytope()
            .integer_points(&BigInt::from(self.bound), INTEGER_POINT_LIMIT)?
            .iter()
            .map(|v| self.embed(v))
            .collect())
    }

    /// Whether a table lies on the encoded face.
    pub fn contains(&self, x: &Table3<T>) -> bool {
        x.shape() == self.shape()
            && x.is_nonnegative()
            && x.satisfies_axial(&self.margins)
            && self
                .forbidden
                .iter()
                .all(|&(i, j, k)| x.get(i, j, k).is_zero())
    }
}

fn overflow() -> Error {
    Error::BoundViolated("margin arithmetic overflows i64".into())
}

/// Largest vertex coordinate of `{x >= 0 : C x = d}`, rounded up; `None` if empty.
fn vertex_bound<T: Scalar>(sys: &IntSystem) -> Result<Option<BigInt>> {
    let poly = sys.polytope::<T>();
    let vertices = poly.vertices()?;
    if vertices.is_empty() {
        return Ok(None);
    }
    if poly.has_recession_direction()? {
        return Err(Error::BoundViolated("the polyhedron is unbounded".into()));
    }
    Ok(vertices.iter().flatten().map(|v| v.ceil_bigint()).max())
}

fn encode<T: Scalar>(
    source: IntSystem,
    step1: Step1,
    bound: Option<i64>,
) -> Result<UniversalityEncoding<T>> {
    let c = &step1.system;
    let (m, n) = (c.equations(), c.variables());
    if let Some(j) = (0..n).find(|&j| (0..m).all(|k| c.a[k][j] == 0)) {
        return Err(Error::BoundViolated(format!(
            "variable {j} appears in no equation"
        )));
    }
    if c.a.iter().flatten().any(|v| !(-1..=2).contains(v)) {
        return Err(Error::InvalidMargins(
            "reduced coefficients must lie in {-1,0,1,2}".into(),
        ));
    }
    let needed = vertex_bound::<T>(c)?;
    let bound = match (bound, needed) {
        (Some(u), Some(need)) if BigInt::from(u) < need => {
            return Err(Error::BoundViolated(format!(
                "U = {u} is below a vertex coordinate {need}"
            )))
        }
        (Some(u), _) if u < 1 => return Err(Error::BoundViolated("U must be positive".into())),
        (Some(u), _) => u,
        (None, Some(need)) => i64::try_from(need).map_err(|_| overflow())?.max(1),
        (None, None) => 1,
    };

    let sizes: Vec<usize> = (0..n)
        .map(|j| {
            let pos: i64 = (0..m).map(|k| c.a[k][j].max(0)).sum();
            let neg: i64 = (0..m).map(|k| (-c.a[k][j]).max(0)).sum();
            pos.max(neg) as usize
        })
        .collect();
    let r: usize = sizes.iter().sum();

    let mut allowed = BTreeSet::new();
    let mut designated = Vec::with_capacity(n);
    let mut offset = 0;
    for (j, &rj) in sizes.iter().enumerate() {
        // heights of the y copies and of the complementary copies
        let mut yh = Vec::with_capacity(rj);
        let mut ybh = Vec::with_capacity(rj);
        for k in 0..m {
            let a = c.a[k][j];
            if a > 0 {
                yh.extend(std::iter::repeat_n(k, a as usize));
            } else if a < 0 {
                ybh.extend(std::iter::repeat_n(k, a.unsigned_abs() as usize));
            }
        }
        yh.resize(rj, m);
        ybh.resize(rj, m);
        for l in 0..rj {
            allowed.insert((offset + l, offset + l, yh[l]));
            allowed.insert((offset + l, offset + (l + 1) % rj, ybh[l]));
        }
        designated.push((offset, offset, yh[0]));
        offset += rj;
    }

    let u = bound;
    let mut w = Vec::with_capacity(m + 1);
    for k in 0..m {
        let neg: i64 = c.a[k].iter().map(|&v| (-v).max(0)).sum();
        let wk = neg
            .checked_mul(u)
            .and_then(|x| x.checked_add(c.b[k]))
            .ok_or_else(overflow)?;
        if wk < 0 {
            return Err(Error::Infeasible(format!(
                "layer {k} would need a negative sum"
            )));
        }
        w.push(wk);
    }
    let total = i64::try_from(r)
        .ok()
        .and_then(|r| r.checked_mul(u))
        .ok_or_else(overflow)?;
    let slack = w
        .iter()
        .try_fold(total, |acc, &x| acc.checked_sub(x))
        .ok_or_else(overflow)?;
    if slack < 0 {
        return Err(Error::Infeasible(
            "slack layer would need a negative sum".into(),
        ));
    }
    w.push(slack);

    let mut forbidden = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..=m {
                if !allowed.contains(&(i, j, k)) {
                    forbidden.push((i, j, k));
                }
            }
        }
    }
    let coordinate_map = (0..source.variables())
        .map(|t| {
            let c0 = step1
                .variables
                .iter()
                .position(|&(j, s)| j == t && s == 0)
                .expect("every source variable has a reduced copy");
            designated[c0]
        })
        .collect();
    let int = |v: i64| T::from_i64(v);
    let margins = AxialMargins::new(
        vec![int(u); r],
        vec![int(u); r],
        w.into_iter().map(int).collect(),
    )?;
    Ok(UniversalityEncoding {
        source,
        reduced: step1.system,
        variables: step1.variables,
        bound,
        block_sizes: sizes,
        margins,
        forbidden,
        coordinate_map,
    })
}

/// Encodes `{x >= 0 : C x = d}` with coefficients in `{-1,0,1,2}`.
///
/// Reduced variable `c` gets an `r_c x r_c x (m+1)` box holding `r_c` copies
/// of `x_c` on its diagonal and `r_c` copies of `U - x_c` on the cyclic
/// superdiagonal. A positive coefficient `a` in equation `k` puts `a` copies
/// of `x_c` in layer `k`; a negative one puts `|a|` complementary copies
/// there; the rest go to the slack layer `m`. Only those cells are allowed.
/// `U` defaults to the largest vertex coordinate of the system.
pub fn universality_step2<T: Scalar>(
    c: &IntSystem,
    bound: Option<i64>,
) -> Result<UniversalityEncoding<T>> {
    let step1 = Step1 {
        system: c.clone(),
        variables: (0..c.variables()).map(|j| (j, 0)).collect(),
    };
    encode(c.clone(), step1, bound)
}

/// Both steps: `{y >= 0 : A y = b}` as a face of an axial polytope.
pub fn universality_encode<T: Scalar>(
    source: &IntSystem,
    bound: Option<i64>,
) -> Result<UniversalityEncoding<T>> {
    encode(source.clone(), universality_step1(source), bound)
}

/// Whether projection onto the designated cells maps `face_points`
/// bijectively onto `source_points`, with every face point on the face.
pub fn verify_representation<T: Scalar>(
    enc: &UniversalityEncoding<T>,
    source_points: &[Vec<T>],
    face_points: &[Table3<T>],
) -> bool {
    if face_points.len() != source_points.len() || !face_points.iter().all(|x| enc.contains(x)) {
        return false;
    }
    let images: BTreeSet<Vec<T>> = face_points.iter().map(|x| enc.project(x)).collect();
    let targets: BTreeSet<Vec<T>> = source_points.iter().cloned().collect();
    images.len() == face_points.len() && images == targets
}

/// Side-by-side invariants of a source polytope and its encoded face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationReport {
    pub source_vertices: usize,
    pub face_vertices: usize,
    pub source_edges: usize,
    pub face_edges: usize,
    pub source_integer_points: usize,
    pub face_integer_points: usize,
    pub source_dimension: isize,
    pub face_dimension: isize,
    pub vertex_bijection: bool,
    pub integer_bijection: bool,
}

impl RepresentationReport {
    pub fn holds(&self) -> bool {
        self.vertex_bijection
            && self.integer_bijection
            && self.source_edges == self.face_edges
            && self.source_dimension == self.face_dimension
    }
}

/// Enumerates both sides and checks the representation.
pub fn verify_encoding<T: Scalar>(enc: &UniversalityEncoding<T>) -> Result<RepresentationReport> {
    let source = enc.source_polytope();
    let sv = source.vertices()?;
    let si = source.integer_points(&BigInt::from(enc.bound), INTEGER_POINT_LIMIT)?;
    let face = enc.face_polytope();
    let fv_raw = face.vertices()?;
    let fv: Vec<Table3<T>> = fv_raw.iter().map(|v| enc.embed(v)).collect();
    let fi = enc.face_integer_points()?;
    Ok(RepresentationReport {
        source_vertices: sv.len(),
        face_vertices: fv.len(),
        source_edges: source.edges(&sv).len(),
        face_edges: face.edges(&fv_raw).len(),
        source_integer_points: si.len(),
        face_integer_points: fi.len(),
        source_dimension: affine_dimension(&sv),
        face_dimension: affine_dimension(&fv_raw),
        vertex_bijection: verify_representation(enc, &sv, &fv),
        integer_bijection: verify_representation(enc, &si, &fi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn sys(a: &[&[i64]], b: &[i64]) -> IntSystem {
        IntSystem::new(a.iter().map(|r| r.to_vec()).collect(), b.to_vec()).unwrap()
    }

    #[test]
    fn step1_displayed_system() {
        let s = universality_step1(&sys(&[&[3, -5, 2]], &[7]));
        assert_eq!(
            s.variables,
            vec![(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1)]
        );
        let expected = sys(
            &[
                &[2, -1, 0, 0, 0, 0, 0],
                &[0, 0, 2, -1, 0, 0, 0],
                &[0, 0, 0, 2, -1, 0, 0],
                &[0, 0, 0, 0, 0, 2, -1],
                &[1, 1, -1, 0, -1, 0, 1],
            ],
            &[0, 0, 0, 0, 7],
        );
        assert_eq!(s.system, expected);
    }

    #[test]
    fn step1_small_cases() {
        let one = sys(&[&[1]], &[1]);
        assert_eq!(universality_step1(&one).system, one);
        let two = universality_step1(&sys(&[&[2]], &[1]));
        assert_eq!(two.system, sys(&[&[2, -1], &[0, 1]], &[0, 1]));
    }

    #[test]
    fn half_point() {
        let enc = universality_encode::<Rational>(&sys(&[&[2]], &[1]), None).unwrap();
        assert_eq!(enc.bound, 1);
        assert_eq!(enc.shape(), (3, 3, 3));
        let face = enc.face_vertices().unwrap();
        assert_eq!(face.len(), 1);
        assert_eq!(enc.project(&face[0]), vec![Rational::from_frac(1, 2)]);
        let report = verify_encoding(&enc).unwrap();
        assert!(report.holds());
        assert_eq!(report.face_integer_points, 0);
    }

    #[test]
    fn block_pattern() {
        // coefficient columns with r = 3, 1, 2
        let c = sys(&[&[2, 1, 1], &[1, -1, -1], &[0, 0, 1]], &[4, 0, 1]);
        let enc = universality_step2::<Rational>(&c, Some(4)).unwrap();
        assert_eq!(enc.block_sizes, vec![3, 1, 2]);
        let top: BTreeSet<(usize, usize)> = enc.allowed().iter().map(|&(i, j, _)| (i, j)).collect();
        let expected: BTreeSet<(usize, usize)> = [
            (0, 0),
            (0, 1),
            (1, 1),
            (1, 2),
            (2, 0),
            (2, 2),
            (3, 3),
            (4, 4),
            (4, 5),
            (5, 4),
            (5, 5),
        ]
        .into_iter()
        .collect();
        assert_eq!(top, expected);
    }

    #[test]
    fn unit_square_diagonal() {
        let enc = universality_encode::<Rational>(&sys(&[&[1, 1]], &[1]), None).unwrap();
        let report = verify_encoding(&enc).unwrap();
        assert!(report.holds(), "{report:?}");
        assert_eq!(report.face_integer_points, 2);
        assert_eq!(report.face_vertices, 2);
    }

    #[test]
    fn mixed_signs() {
        let enc = universality_encode::<Rational>(&sys(&[&[3, -5, 2], &[1, 1, 1]], &[7, 5]), None)
            .unwrap();
        let report = verify_encoding(&enc).unwrap();
        assert!(report.holds(), "{report:?}");
    }

    #[test]
    fn corrupted_margin_fails() {
        let enc = universality_encode::<Rational>(&sys(&[&[1, 2]], &[3]), None).unwrap();
        let sv = enc.source_polytope().vertices().unwrap();
        assert!(verify_representation(
            &enc,
            &sv,
            &enc.face_vertices().unwrap()
        ));
        let mut bad = enc.clone();
        let last = bad.margins.w.len() - 1;
        bad.margins.w[0] = bad.margins.w[0].clone() + Rational::from_i64(1);
        bad.margins.w[last] = bad.margins.w[last].clone() - Rational::from_i64(1);
        assert!(!verify_representation(
            &bad,
            &sv,
            &bad.face_vertices().unwrap()
        ));
    }

    #[test]
    fn bounds_are_checked() {
        let unbounded = sys(&[&[1, -1]], &[0]);
        assert!(matches!(
            universality_encode::<Rational>(&unbounded, None),
            Err(Error::BoundViolated(_))
        ));
        let tight = sys(&[&[1, 1]], &[5]);
        assert!(matches!(
            universality_encode::<Rational>(&tight, Some(4)),
            Err(Error::BoundViolated(_))
        ));
        let zero_col = sys(&[&[1, 0]], &[1]);
        assert!(matches!(
            universality_encode::<Rational>(&zero_col, None),
            Err(Error::BoundViolated(_))
        ));
    }
}
