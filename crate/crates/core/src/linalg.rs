//! Exact dense linear algebra and standard-form polytopes `{x >= 0 : Ax = b}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::error::{too_large, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Submatrix keeping the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                out.set(r, k, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                out.set(a, b, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, lead);
            let inv = T::one() / m.get(lead, c).clone();
            for k in c..m.cols {
                let v = m.get(lead, k).clone() * inv.clone();
                m.set(lead, k, v);
            }
            for r in 0..m.rows {
                if r == lead || m.get(r, c).is_zero() {
                    continue;
                }
                let f = m.get(r, c).clone();
                for k in c..m.cols {
                    if m.get(lead, k).is_zero() {
                        continue;
                    }
                    let v = m.get(r, k).clone() - f.clone() * m.get(lead, k).clone();
                    m.set(r, k, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }

    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m.get(r, c).is_zero()) else {
                return T::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = det * pivot.clone();
            for r in c + 1..n {
                if m.get(r, c).is_zero() {
                    continue;
                }
                let f = m.get(r, c).clone() / pivot.clone();
                for k in c..n {
                    let v = m.get(r, k).clone() - f.clone() * m.get(c, k).clone();
                    m.set(r, k, v);
                }
            }
        }
        det
    }

    /// One solution of `self * x = b` with free variables at zero.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = red.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = -red.get(r, f).clone();
                }
                v
            })
            .collect()
    }
}

/// Affine dimension of a finite point set (`-1` for the empty set).
pub fn affine_dimension<T: Scalar>(points: &[Vec<T>]) -> isize {
    let Some(base) = points.first() else {
        return -1;
    };
    let diffs: Vec<Vec<T>> = points[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(base)
                .map(|(a, b)| a.clone() - b.clone())
                .collect()
        })
        .collect();
    if diffs.is_empty() {
        return 0;
    }
    Matrix::from_rows(diffs).rank() as isize
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Cap on the number of candidate zero-sets examined by [`EqualityPolytope::vertices`].
pub const VERTEX_SUBSET_LIMIT: u128 = 50_000_000;

/// The polyhedron `{x >= 0 : a x = b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityPolytope<T> {
    pub a: Matrix<T>,
    pub b: Vec<T>,
}

impl<T: Scalar> EqualityPolytope<T> {
    pub fn new(a: Matrix<T>, b: Vec<T>) -> Self {
        assert_eq!(a.nrows(), b.len());
        Self { a, b }
    }

    pub fn dim_ambient(&self) -> usize {
        self.a.ncols()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.a.ncols()
            && x.iter().all(|v| !v.is_negative())
            && self.a.mul_vec(x) == self.b
    }

    /// A feasible point is a vertex iff the columns on its support are independent.
    pub fn is_vertex(&self, x: &[T]) -> bool {
        if !self.contains(x) {
            return false;
        }
        let support: Vec<usize> = (0..x.len()).filter(|&i| !x[i].is_zero()).collect();
        self.a.select_columns(&support).rank() == support.len()
    }

    /// Affine parametrization `x0 + N t` of the solution space; `None` if `a x = b` is inconsistent.
    /// Row `i` of the returned matrix is `N_i`.
    fn parametrize(&self) -> Option<(Vec<T>, Vec<Vec<T>>)> {
        let x0 = self.a.solve(&self.b)?;
        let kernel = self.a.kernel_basis();
        let rows = (0..self.a.ncols())
            .map(|i| kernel.iter().map(|v| v[i].clone()).collect())
            .collect();
        Some((x0, rows))
    }

    /// All vertices, sorted lexicographically.
    ///
    /// Runs the double description method on the homogenized cone
    /// `{(t, l) : l >= 0, l x0 + N t >= 0}` of the parametrization `x0 + N t`;
    /// extreme rays with `l > 0` are the vertices. Arithmetic is first tried in
    /// `i128` rationals and redone exactly on overflow.
    pub fn vertices(&self) -> Result<Vec<Vec<T>>> {
        let Some((x0, rows)) = self.parametrize() else {
            return Ok(Vec::new());
        };
        let k = rows.first().map_or(0, Vec::len);
        if k == 0 {
            return Ok(if x0.iter().any(|v| v.is_negative()) {
                Vec::new()
            } else {
                vec![x0]
            });
        }
        if let Some((sx, sr)) = to_small_system(&x0, &rows) {
            if let Some(found) = double_description::<CheckedArith>(&sx, &sr, k)? {
                return Ok(from_small_points(found));
            }
        }
        let found = double_description::<ExactArith<T>>(&x0, &rows, k)?;
        Ok(found.expect("exact arithmetic cannot overflow"))
    }

    /// Vertices by exhaustive search over zero sets; an independent check on [`Self::vertices`].
    ///
    /// A vertex is a feasible point at which `dim(t)` coordinates with
    /// linearly independent rows of `N` vanish. Zero sets are enumerated depth
    /// first with an incrementally maintained echelon form, so dependent
    /// prefixes are cut immediately.
    pub fn vertices_by_zero_sets(&self) -> Result<Vec<Vec<T>>> {
        let Some((x0, rows)) = self.parametrize() else {
            return Ok(Vec::new());
        };
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if k == 0 {
            return Ok(if x0.iter().any(|v| v.is_negative()) {
                Vec::new()
            } else {
                vec![x0]
            });
        }
        let candidates = binomial_u128(n, k);
        if candidates > VERTEX_SUBSET_LIMIT {
            return Err(too_large(
                format!("vertex enumeration over C({n},{k}) zero-sets"),
                VERTEX_SUBSET_LIMIT,
            ));
        }
        if let Some((sx, sr)) = to_small_system(&x0, &rows) {
            if let Some(found) = run_search::<CheckedArith>(&sx, &sr, k) {
                return Ok(from_small_points(found));
            }
        }
        Ok(run_search::<ExactArith<T>>(&x0, &rows, k).expect("exact arithmetic cannot overflow"))
    }

    /// Dimension of the smallest face containing every given feasible point.
    pub fn face_dimension(&self, points: &[&[T]]) -> usize {
        let n = self.a.ncols();
        let support: Vec<usize> = (0..n)
            .filter(|&i| points.iter().any(|p| !p[i].is_zero()))
            .collect();
        support.len() - self.a.select_columns(&support).rank()
    }

    pub fn adjacent(&self, v: &[T], w: &[T]) -> bool {
        v != w && self.face_dimension(&[v, w]) == 1
    }

    /// Edge list over the given (sorted) vertex list.
    pub fn edges(&self, vertices: &[Vec<T>]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if self.adjacent(&vertices[i], &vertices[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// All integer points, given an upper bound valid for every coordinate.
    ///
    /// Free variables of the reduced row echelon form range over
    /// `[0, bound]`; the pivot variables are then determined.
    pub fn integer_points(&self, bound: &BigInt, limit: u128) -> Result<Vec<Vec<T>>> {
        let n = self.a.ncols();
        let mut aug = Matrix::zeros(self.a.nrows(), n + 1);
        for r in 0..self.a.nrows() {
            for c in 0..n {
                aug.set(r, c, self.a.get(r, c).clone());
            }
            aug.set(r, n, self.b[r].clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&n) {
            return Ok(Vec::new());
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let side = bound.to_u128().map(|b| b + 1).unwrap_or(u128::MAX);
        let total = (0..free.len()).try_fold(1u128, |acc, _| acc.checked_mul(side));
        match total {
            Some(t) if t <= limit => {}
            _ => {
                return Err(too_large(
                    format!("integer-point box ({} free variables)", free.len()),
                    limit,
                ))
            }
        }
        let bound_t = T::from_bigint(bound);
        let mut out = Vec::new();
        let mut assign = vec![T::zero(); free.len()];
        loop {
            let mut x = vec![T::zero(); n];
            for (f, v) in free.iter().zip(&assign) {
                x[*f] = v.clone();
            }
            let mut ok = true;
            for (r, &c) in pivots.iter().enumerate() {
                let mut v = red.get(r, n).clone();
                for (f, val) in free.iter().zip(&assign) {
                    let coef = red.get(r, *f);
                    if !coef.is_zero() {
                        v = v - coef.clone() * val.clone();
                    }
                }
                if v.is_negative() || !v.is_integral() {
                    ok = false;
                    break;
                }
                x[c] = v;
            }
            if ok {
                out.push(x);
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == assign.len() {
                    out.sort();
                    return Ok(out);
                }
                if assign[pos] < bound_t {
                    assign[pos] = assign[pos].clone() + T::one();
                    break;
                }
                assign[pos] = T::zero();
                pos += 1;
            }
        }
    }

    /// Whether some nonzero `z >= 0` has `a z = 0` (the polyhedron is unbounded when non-empty).
    pub fn has_recession_direction(&self) -> Result<bool> {
        let n = self.a.ncols();
        let mut rows = self.a.to_rows();
        rows.push(vec![T::one(); n]);
        let mut b = vec![T::zero(); self.a.nrows()];
        b.push(T::one());
        let cone = EqualityPolytope::new(Matrix::from_rows(rows), b);
        Ok(!cone.vertices()?.is_empty())
    }
}

/// Field operations for the zero-set search; `None` signals overflow.
trait Arith {
    type V: Clone + Ord;
    fn zero() -> Self::V;
    fn one() -> Self::V;
    fn is_zero(a: &Self::V) -> bool;
    fn is_negative(a: &Self::V) -> bool;
    fn add(a: &Self::V, b: &Self::V) -> Option<Self::V>;
    fn sub(a: &Self::V, b: &Self::V) -> Option<Self::V>;
    fn mul(a: &Self::V, b: &Self::V) -> Option<Self::V>;
    fn div(a: &Self::V, b: &Self::V) -> Option<Self::V>;
}

struct ExactArith<T>(std::marker::PhantomData<T>);

impl<T: Scalar> Arith for ExactArith<T> {
    type V = T;
    fn zero() -> T {
        T::zero()
    }
    fn one() -> T {
        T::one()
    }
    fn is_zero(a: &T) -> bool {
        a.is_zero()
    }
    fn is_negative(a: &T) -> bool {
        a.is_negative()
    }
    fn add(a: &T, b: &T) -> Option<T> {
        Some(a.clone() + b.clone())
    }
    fn sub(a: &T, b: &T) -> Option<T> {
        Some(a.clone() - b.clone())
    }
    fn mul(a: &T, b: &T) -> Option<T> {
        Some(a.clone() * b.clone())
    }
    fn div(a: &T, b: &T) -> Option<T> {
        Some(a.clone() / b.clone())
    }
}

type Small = Ratio<i128>;

/// Machine-word rationals with overflow detection.
struct CheckedArith;

impl Arith for CheckedArith {
    type V = Small;
    fn zero() -> Small {
        Small::zero()
    }
    fn one() -> Small {
        Small::one()
    }
    fn is_zero(a: &Small) -> bool {
        a.is_zero()
    }
    fn is_negative(a: &Small) -> bool {
        a.is_negative()
    }
    fn add(a: &Small, b: &Small) -> Option<Small> {
        a.checked_add(b)
    }
    fn sub(a: &Small, b: &Small) -> Option<Small> {
        a.checked_sub(b)
    }
    fn mul(a: &Small, b: &Small) -> Option<Small> {
        a.checked_mul(b)
    }
    fn div(a: &Small, b: &Small) -> Option<Small> {
        a.checked_div(b)
    }
}

fn to_small<T: Scalar>(v: &T) -> Option<Small> {
    let n = v.numer_big().to_i128()?;
    let d = v.denom_big().to_i128()?;
    // keep headroom so that negation and single products of inputs stay representable
    const LIMIT: i128 = 1 << 100;
    (n.abs() < LIMIT && d < LIMIT).then(|| Small::new_raw(n, d))
}

fn from_small<T: Scalar>(v: &Small) -> T {
    T::from_bigint(&BigInt::from(*v.numer())) / T::from_bigint(&BigInt::from(*v.denom()))
}

fn to_small_system<T: Scalar>(x0: &[T], rows: &[Vec<T>]) -> Option<(Vec<Small>, Vec<Vec<Small>>)> {
    let x0 = x0.iter().map(to_small).collect::<Option<_>>()?;
    let rows = rows
        .iter()
        .map(|r| r.iter().map(to_small).collect::<Option<_>>())
        .collect::<Option<_>>()?;
    Some((x0, rows))
}

fn from_small_points<T: Scalar>(found: Vec<Vec<Small>>) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = found
        .into_iter()
        .map(|x| x.iter().map(from_small).collect())
        .collect();
    out.sort();
    out
}

/// Cap on the number of intermediate rays in [`EqualityPolytope::vertices`].
pub const RAY_LIMIT: usize = 2_000_000;

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Self) -> Self {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn contains_all(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| b & !a == 0)
    }
}

struct Ray<V> {
    v: Vec<V>,
    /// constraints already processed that this ray satisfies with equality
    tight: Bits,
}

fn dot<A: Arith>(g: &[A::V], r: &[A::V]) -> Option<A::V> {
    let mut acc = A::zero();
    for (a, b) in g.iter().zip(r) {
        if !A::is_zero(a) && !A::is_zero(b) {
            acc = A::add(&acc, &A::mul(a, b)?)?;
        }
    }
    Some(acc)
}

/// Scales a ray so its first non-zero entry is `+-1`.
fn normalize<A: Arith>(v: &mut [A::V]) -> Option<()> {
    let Some(lead) = v.iter().find(|x| !A::is_zero(x)).cloned() else {
        return Some(());
    };
    let lead = if A::is_negative(&lead) {
        A::sub(&A::zero(), &lead)?
    } else {
        lead
    };
    if lead != A::one() {
        for x in v.iter_mut() {
            if !A::is_zero(x) {
                *x = A::div(x, &lead)?;
            }
        }
    }
    Some(())
}

/// Inverse of a square matrix, `None` on overflow; the matrix must be invertible.
fn invert<A: Arith>(m: &[Vec<A::V>]) -> Option<Vec<Vec<A::V>>> {
    let d = m.len();
    let mut aug: Vec<Vec<A::V>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| if i == j { A::one() } else { A::zero() }));
            r
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| !A::is_zero(&aug[r][c]))?;
        aug.swap(c, p);
        let lead = aug[c][c].clone();
        for x in aug[c].iter_mut() {
            *x = A::div(x, &lead)?;
        }
        for r in 0..d {
            if r != c && !A::is_zero(&aug[r][c]) {
                let f = aug[r][c].clone();
                for j in 0..2 * d {
                    let sub = A::mul(&f, &aug[c][j])?;
                    aug[r][j] = A::sub(&aug[r][j], &sub)?;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[d..].to_vec()).collect())
}

/// Vertices of `{x0 + N t >= 0}` by double description; `Ok(None)` on overflow.
fn double_description<A: Arith>(
    x0: &[A::V],
    rows: &[Vec<A::V>],
    k: usize,
) -> Result<Option<Vec<Vec<A::V>>>> {
    let Some(found) = dd_rays::<A>(x0, rows, k)? else {
        return Ok(None);
    };
    Ok(dd_points::<A>(x0, rows, k, found))
}

fn dd_rays<A: Arith>(x0: &[A::V], rows: &[Vec<A::V>], k: usize) -> Result<Option<Vec<Vec<A::V>>>> {
    macro_rules! tri {
        ($e:expr) => {
            match $e {
                Some(v) => v,
                None => return Ok(None),
            }
        };
    }
    let n = rows.len();
    let d = k + 1;
    // constraint g_i = (N_i, x0_i) for i < n; g_n = (0, ..., 0, 1)
    let mut cons: Vec<Vec<A::V>> = rows
        .iter()
        .zip(x0)
        .map(|(r, b)| {
            let mut g = r.clone();
            g.push(b.clone());
            g
        })
        .collect();
    let mut last = vec![A::zero(); d];
    last[k] = A::one();
    cons.push(last);

    // greedy choice of d independent constraints, starting with l >= 0
    let order: Vec<usize> = std::iter::once(n).chain(0..n).collect();
    let mut basis: Vec<usize> = Vec::with_capacity(d);
    let mut echelon: Vec<(usize, Vec<A::V>)> = Vec::new();
    for &c in &order {
        if basis.len() == d {
            break;
        }
        let mut row = cons[c].clone();
        for (piv, e) in &echelon {
            let f = row[*piv].clone();
            if A::is_zero(&f) {
                continue;
            }
            for (a, b) in row.iter_mut().zip(e) {
                if !A::is_zero(b) {
                    *a = tri!(A::sub(a, &tri!(A::mul(&f, b))));
                }
            }
        }
        if let Some(piv) = row.iter().position(|v| !A::is_zero(v)) {
            let lead = row[piv].clone();
            for v in row.iter_mut() {
                *v = tri!(A::div(v, &lead));
            }
            echelon.push((piv, row));
            basis.push(c);
        }
    }
    debug_assert_eq!(basis.len(), d, "the parametrization has full column rank");
    let g0: Vec<Vec<A::V>> = basis.iter().map(|&c| cons[c].clone()).collect();
    let inv = tri!(invert::<A>(&g0));
    let mut rays: Vec<Ray<A::V>> = (0..d)
        .map(|j| {
            let mut tight = Bits::new(n + 1);
            for (i, &c) in basis.iter().enumerate() {
                if i != j {
                    tight.set(c);
                }
            }
            Ray {
                v: (0..d).map(|r| inv[r][j].clone()).collect(),
                tight,
            }
        })
        .collect();
    for r in rays.iter_mut() {
        tri!(normalize::<A>(&mut r.v));
    }

    let in_basis: BTreeSet<usize> = basis.iter().copied().collect();
    for c in (0..=n).filter(|c| !in_basis.contains(c)) {
        let g = &cons[c];
        let mut signs = Vec::with_capacity(rays.len());
        for r in &rays {
            signs.push(tri!(dot::<A>(g, &r.v)));
        }
        let neg: Vec<usize> = (0..rays.len())
            .filter(|&i| A::is_negative(&signs[i]))
            .collect();
        if neg.is_empty() {
            for (r, s) in rays.iter_mut().zip(&signs) {
                if A::is_zero(s) {
                    r.tight.set(c);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len())
            .filter(|&i| !A::is_zero(&signs[i]) && !A::is_negative(&signs[i]))
            .collect();
        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].tight.and(&rays[q].tight);
                if (common.count() as usize) + 2 < d {
                    continue;
                }
                let blocked = (0..rays.len())
                    .any(|o| o != p && o != q && rays[o].tight.contains_all(&common));
                if blocked {
                    continue;
                }
                // s_p * q - s_q * p vanishes on g_c
                let (sp, sq) = (&signs[p], &signs[q]);
                let mut v = Vec::with_capacity(d);
                for (a, b) in rays[q].v.iter().zip(&rays[p].v) {
                    v.push(tri!(A::sub(&tri!(A::mul(sp, a)), &tri!(A::mul(sq, b)))));
                }
                tri!(normalize::<A>(&mut v));
                let mut tight = common;
                tight.set(c);
                fresh.push(Ray { v, tight });
            }
        }
        let mut next: Vec<Ray<A::V>> = Vec::with_capacity(pos.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if A::is_negative(&signs[i]) {
                continue;
            }
            if A::is_zero(&signs[i]) {
                r.tight.set(c);
            }
            next.push(r);
        }
        next.extend(fresh);
        if next.len() > RAY_LIMIT {
            return Err(too_large("double description ray set", RAY_LIMIT));
        }
        rays = next;
    }
    Ok(Some(rays.into_iter().map(|r| r.v).collect()))
}

/// Points `x0 + N t / l` for the rays with `l > 0`, sorted; `None` on overflow.
fn dd_points<A: Arith>(
    x0: &[A::V],
    rows: &[Vec<A::V>],
    k: usize,
    rays: Vec<Vec<A::V>>,
) -> Option<Vec<Vec<A::V>>> {
    let mut found = BTreeSet::new();
    for r in rays {
        let l = &r[k];
        if A::is_zero(l) || A::is_negative(l) {
            continue;
        }
        let mut t = Vec::with_capacity(k);
        for v in &r[..k] {
            t.push(A::div(v, l)?);
        }
        let mut x = Vec::with_capacity(x0.len());
        for (base, row) in x0.iter().zip(rows) {
            let mut v = base.clone();
            for (coef, tv) in row.iter().zip(&t) {
                if !A::is_zero(coef) && !A::is_zero(tv) {
                    v = A::add(&v, &A::mul(coef, tv)?)?;
                }
            }
            x.push(v);
        }
        found.insert(x);
    }
    Some(found.into_iter().collect())
}

fn run_search<A: Arith>(x0: &[A::V], rows: &[Vec<A::V>], k: usize) -> Option<Vec<Vec<A::V>>> {
    let mut search = ZeroSetSearch::<A> {
        x0,
        rows,
        k,
        stack: Vec::with_capacity(k),
        found: BTreeSet::new(),
    };
    search.descend(0)?;
    Some(search.found.into_iter().collect())
}

struct ZeroSetSearch<'a, A: Arith> {
    x0: &'a [A::V],
    rows: &'a [Vec<A::V>],
    k: usize,
    /// echelon rows: (pivot, coefficients, rhs); each has zeros at earlier pivots.
    stack: Vec<(usize, Vec<A::V>, A::V)>,
    found: BTreeSet<Vec<A::V>>,
}

impl<A: Arith> ZeroSetSearch<'_, A> {
    fn descend(&mut self, start: usize) -> Option<()> {
        let n = self.rows.len();
        let depth = self.stack.len();
        if depth == self.k {
            return self.leaf();
        }
        let remaining = self.k - depth;
        for i in start..=n - remaining {
            let mut row = self.rows[i].clone();
            let mut rhs = A::sub(&A::zero(), &self.x0[i])?;
            for (piv, e, e_rhs) in &self.stack {
                let f = row[*piv].clone();
                if A::is_zero(&f) {
                    continue;
                }
                for (a, b) in row.iter_mut().zip(e) {
                    if !A::is_zero(b) {
                        *a = A::sub(a, &A::mul(&f, b)?)?;
                    }
                }
                rhs = A::sub(&rhs, &A::mul(&f, e_rhs)?)?;
            }
            let Some(piv) = row.iter().position(|v| !A::is_zero(v)) else {
                continue;
            };
            let lead = row[piv].clone();
            if lead != A::one() {
                for v in row.iter_mut() {
                    if !A::is_zero(v) {
                        *v = A::div(v, &lead)?;
                    }
                }
                rhs = A::div(&rhs, &lead)?;
            }
            self.stack.push((piv, row, rhs));
            let res = self.descend(i + 1);
            self.stack.pop();
            res?;
        }
        Some(())
    }

    fn leaf(&mut self) -> Option<()> {
        let mut t = vec![A::zero(); self.k];
        for (piv, row, rhs) in self.stack.iter().rev() {
            let mut v = rhs.clone();
            for (c, coef) in row.iter().enumerate() {
                if c != *piv && !A::is_zero(coef) && !A::is_zero(&t[c]) {
                    v = A::sub(&v, &A::mul(coef, &t[c])?)?;
                }
            }
            t[*piv] = v;
        }
        let mut x = Vec::with_capacity(self.x0.len());
        for (base, row) in self.x0.iter().zip(self.rows) {
            let mut v = base.clone();
            for (coef, tv) in row.iter().zip(&t) {
                if !A::is_zero(coef) && !A::is_zero(tv) {
                    v = A::add(&v, &A::mul(coef, tv)?)?;
                }
            }
            if A::is_negative(&v) {
                return Some(());
            }
            x.push(v);
        }
        self.found.insert(x);
        Some(())
    }
}
