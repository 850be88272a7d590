//! Margin and table containers and support graphs.

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};

fn check_nonneg<T: Scalar>(name: &str, xs: &[T]) -> Result<()> {
    if let Some(bad) = xs.iter().find(|x| x.is_negative()) {
        return Err(Error::InvalidMargins(format!(
            "{name} has negative entry {bad}"
        )));
    }
    Ok(())
}

fn check_len(name: &str, len: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::InvalidMargins(format!("{name} must be non-empty")));
    }
    Ok(())
}

/// Row sums `u` (length p) and column sums `v` (length q) of a 2-way table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Margins2<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> Margins2<T> {
    pub fn new(u: Vec<T>, v: Vec<T>) -> Result<Self> {
        check_len("u", u.len())?;
        check_len("v", v.len())?;
        check_nonneg("u", &u)?;
        check_nonneg("v", &v)?;
        Ok(Self { u, v })
    }

    pub fn from_ints(u: &[i64], v: &[i64]) -> Result<Self> {
        Self::new(
            u.iter().map(|&x| T::from_i64(x)).collect(),
            v.iter().map(|&x| T::from_i64(x)).collect(),
        )
    }

    pub fn p(&self) -> usize {
        self.u.len()
    }

    pub fn q(&self) -> usize {
        self.v.len()
    }

    pub fn total(&self) -> T {
        sum(&self.u)
    }

    pub fn is_balanced(&self) -> bool {
        sum(&self.u) == sum(&self.v)
    }

    pub fn all_positive(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_positive())
    }

    pub fn transpose(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }
}

/// The three 1-marginals of a p x q x s table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AxialMargins<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub w: Vec<T>,
}

impl<T: Scalar> AxialMargins<T> {
    pub fn new(u: Vec<T>, v: Vec<T>, w: Vec<T>) -> Result<Self> {
        check_len("u", u.len())?;
        check_len("v", v.len())?;
        check_len("w", w.len())?;
        check_nonneg("u", &u)?;
        check_nonneg("v", &v)?;
        check_nonneg("w", &w)?;
        Ok(Self { u, v, w })
    }

    pub fn from_ints(u: &[i64], v: &[i64], w: &[i64]) -> Result<Self> {
        let f = |xs: &[i64]| xs.iter().map(|&x| T::from_i64(x)).collect();
        Self::new(f(u), f(v), f(w))
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.u.len(), self.v.len(), self.w.len())
    }
}

/// The three 2-marginals of a p x q x s table:
/// `u[j][k] = sum_i x[i][j][k]`, `v[i][k] = sum_j x[i][j][k]`, `w[i][j] = sum_k x[i][j][k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanarMargins<T> {
    pub u: Vec<Vec<T>>,
    pub v: Vec<Vec<T>>,
    pub w: Vec<Vec<T>>,
}

fn rect<T>(name: &str, m: &[Vec<T>]) -> Result<(usize, usize)> {
    let r = m.len();
    let c = m.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || m.iter().any(|row| row.len() != c) {
        return Err(Error::InvalidMargins(format!(
            "{name} must be a non-empty rectangular matrix"
        )));
    }
    Ok((r, c))
}

impl<T: Scalar> PlanarMargins<T> {
    pub fn new(u: Vec<Vec<T>>, v: Vec<Vec<T>>, w: Vec<Vec<T>>) -> Result<Self> {
        let (q, s) = rect("U", &u)?;
        let (p, s2) = rect("V", &v)?;
        let (p2, q2) = rect("W", &w)?;
        if s != s2 || p != p2 || q != q2 {
            return Err(Error::InvalidMargins(format!(
                "inconsistent shapes: U {q}x{s}, V {p}x{s2}, W {p2}x{q2}"
            )));
        }
        for (name, m) in [("U", &u), ("V", &v), ("W", &w)] {
            for row in m.iter() {
                check_nonneg(name, row)?;
            }
        }
        Ok(Self { u, v, w })
    }

    pub fn from_ints(u: &[Vec<i64>], v: &[Vec<i64>], w: &[Vec<i64>]) -> Result<Self> {
        let f = |m: &[Vec<i64>]| {
            m.iter()
                .map(|row| row.iter().map(|&x| T::from_i64(x)).collect())
                .collect()
        };
        Self::new(f(u), f(v), f(w))
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.v.len(), self.u.len(), self.u[0].len())
    }

    /// The 1-marginals implied by each pair of 2-marginals agree.
    pub fn is_consistent(&self) -> bool {
        let (p, q, s) = self.shape();
        let row = |m: &Vec<Vec<T>>, r: usize| sum(&m[r]);
        let col = |m: &Vec<Vec<T>>, c: usize| sum(m.iter().map(|row| &row[c]));
        (0..p).all(|i| row(&self.v, i) == row(&self.w, i))
            && (0..q).all(|j| row(&self.u, j) == col(&self.w, j))
            && (0..s).all(|k| col(&self.u, k) == col(&self.v, k))
    }
}

/// A dense p x q table, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Table2<T> {
    p: usize,
    q: usize,
    data: Vec<T>,
}

impl<T: Scalar> Table2<T> {
    pub fn zeros(p: usize, q: usize) -> Self {
        Self {
            p,
            q,
            data: vec![T::zero(); p * q],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let (p, q) = rect("table", &rows)?;
        Ok(Self {
            p,
            q,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from_i64(x)).collect())
                .collect(),
        )
    }

    /// Builds from cell values in lexicographic order.
    pub fn from_cells(p: usize, q: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), p * q);
        Self { p, q, data }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.q + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.q + j] = v;
    }

    pub fn cells(&self) -> &[T] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.q).map(<[T]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.data.chunks(self.q).map(|r| sum(r)).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.q)
            .map(|j| sum((0..self.p).map(|i| self.get(i, j))))
            .collect()
    }

    pub fn support(&self) -> Vec<(usize, usize)> {
        (0..self.p)
            .flat_map(|i| (0..self.q).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j).is_positive())
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.data.iter().filter(|x| x.is_positive()).count()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(Scalar::is_integral)
    }

    pub fn satisfies(&self, m: &Margins2<T>) -> bool {
        self.shape() == (m.p(), m.q())
            && self.is_nonnegative()
            && self.row_sums() == m.u
            && self.col_sums() == m.v
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.q, self.p);
        for i in 0..self.p {
            for j in 0..self.q {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }
}

/// `(U, V, W)` with `U[j][k]`, `V[i][k]`, `W[i][j]`.
pub type PlanarSums<T> = (Vec<Vec<T>>, Vec<Vec<T>>, Vec<Vec<T>>);

/// A dense p x q x s table; cell (i,j,k) is stored at `(i*q + j)*s + k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Table3<T> {
    p: usize,
    q: usize,
    s: usize,
    data: Vec<T>,
}

impl<T: Scalar> Table3<T> {
    pub fn zeros(p: usize, q: usize, s: usize) -> Self {
        Self {
            p,
            q,
            s,
            data: vec![T::zero(); p * q * s],
        }
    }

    pub fn from_cells(p: usize, q: usize, s: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), p * q * s);
        Self { p, q, s, data }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.p, self.q, self.s)
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.q + j) * self.s + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.data[self.index(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        let idx = self.index(i, j, k);
        self.data[idx] = v;
    }

    pub fn cells(&self) -> &[T] {
        &self.data
    }

    /// Nested `[i][j][k]` arrays.
    pub fn nested(&self) -> Vec<Vec<Vec<T>>> {
        (0..self.p)
            .map(|i| {
                (0..self.q)
                    .map(|j| (0..self.s).map(|k| self.get(i, j, k).clone()).collect())
                    .collect()
            })
            .collect()
    }

    pub fn axial_sums(&self) -> (Vec<T>, Vec<T>, Vec<T>) {
        let (p, q, s) = self.shape();
        let mut u = vec![T::zero(); p];
        let mut v = vec![T::zero(); q];
        let mut w = vec![T::zero(); s];
        for i in 0..p {
            for j in 0..q {
                for k in 0..s {
                    let x = self.get(i, j, k);
                    if x.is_zero() {
                        continue;
                    }
                    u[i] = u[i].clone() + x.clone();
                    v[j] = v[j].clone() + x.clone();
                    w[k] = w[k].clone() + x.clone();
                }
            }
        }
        (u, v, w)
    }

    pub fn planar_sums(&self) -> PlanarSums<T> {
        let (p, q, s) = self.shape();
        let mut u = vec![vec![T::zero(); s]; q];
        let mut v = vec![vec![T::zero(); s]; p];
        let mut w = vec![vec![T::zero(); q]; p];
        for i in 0..p {
            for j in 0..q {
                for k in 0..s {
                    let x = self.get(i, j, k).clone();
                    u[j][k] = u[j][k].clone() + x.clone();
                    v[i][k] = v[i][k].clone() + x.clone();
                    w[i][j] = w[i][j].clone() + x;
                }
            }
        }
        (u, v, w)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(Scalar::is_integral)
    }

    pub fn support_size(&self) -> usize {
        self.data.iter().filter(|x| x.is_positive()).count()
    }

    pub fn satisfies_axial(&self, m: &AxialMargins<T>) -> bool {
        let (u, v, w) = self.axial_sums();
        self.shape() == m.shape() && self.is_nonnegative() && u == m.u && v == m.v && w == m.w
    }

    pub fn satisfies_planar(&self, m: &PlanarMargins<T>) -> bool {
        let (u, v, w) = self.planar_sums();
        self.shape() == m.shape() && self.is_nonnegative() && u == m.u && v == m.v && w == m.w
    }
}

/// Bipartite graph on supplies `0..p` and demands `0..q` with an edge per positive cell.
///
/// Nodes are addressed with a unified index: supply `i` is `i`, demand `j` is `p + j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportGraph {
    p: usize,
    q: usize,
    edges: Vec<(usize, usize)>,
}

impl SupportGraph {
    pub fn new(p: usize, q: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        assert!(edges.iter().all(|&(i, j)| i < p && j < q));
        Self { p, q, edges }
    }

    pub fn nodes(&self) -> usize {
        self.p + self.q
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    pub fn supply_degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == i).count()
    }

    pub fn demand_degree(&self, j: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == j).count()
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.q), (other.p, other.q));
        let mut e = self.edges.clone();
        e.extend_from_slice(&other.edges);
        Self::new(self.p, self.q, e)
    }

    /// Number of connected components, isolated nodes included.
    pub fn components(&self) -> usize {
        let mut dsu = Dsu::new(self.nodes());
        let mut comps = self.nodes();
        for &(i, j) in &self.edges {
            if dsu.union(i, self.p + j) {
                comps -= 1;
            }
        }
        comps
    }

    /// Dimension of the cycle space, `|E| - |V| + components`.
    pub fn cyclomatic_number(&self) -> usize {
        self.edges.len() + self.components() - self.nodes()
    }

    pub fn is_forest(&self) -> bool {
        self.cyclomatic_number() == 0
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.is_forest() && self.components() == 1
    }
}

pub fn support_graph<T: Scalar>(x: &Table2<T>) -> SupportGraph {
    let (p, q) = x.shape();
    SupportGraph::new(p, q, x.support())
}

/// Disjoint-set forest with path halving.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Returns false if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
