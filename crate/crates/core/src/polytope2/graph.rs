use std::collections::VecDeque;
use std::fmt::Write;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tables::{support_graph, Margins2, Table2};

use super::vertices::{enumerate_vertices, VertexSet2};

/// Undirected graph on vertex indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeGraph {
    adjacency: Vec<Vec<usize>>,
}

impl PolytopeGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            assert!(a != b && a < n && b < n, "bad edge ({a},{b})");
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self { adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .collect()
    }

    /// BFS distances; `None` for unreachable vertices.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap() + 1;
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        self.distances_from(a)[b]
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n");
        for v in 0..self.vertex_count() {
            let _ = writeln!(out, "  v{v};");
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  v{a} -- v{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Two distinct vertices are adjacent iff the union of their support graphs has exactly one cycle.
pub fn adjacent<T: Scalar>(x: &Table2<T>, y: &Table2<T>) -> bool {
    x != y
        && support_graph(x)
            .union(&support_graph(y))
            .cyclomatic_number()
            == 1
}

pub fn graph_of<T: Scalar>(vs: &VertexSet2<T>) -> PolytopeGraph {
    let n = vs.len();
    let supports: Vec<_> = vs.vertices.iter().map(support_graph).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if supports[a].union(&supports[b]).cyclomatic_number() == 1 {
                edges.push((a, b));
            }
        }
    }
    PolytopeGraph::from_edges(n, &edges)
}

/// Vertex set and graph; vertex `k` of the graph is `vertices[k]`.
pub fn polytope_graph<T: Scalar>(m: &Margins2<T>) -> Result<(VertexSet2<T>, PolytopeGraph)> {
    let vs = enumerate_vertices(m)?;
    let g = graph_of(&vs);
    Ok((vs, g))
}

/// Largest BFS distance over all pairs.
pub fn diameter(g: &PolytopeGraph) -> usize {
    (0..g.vertex_count())
        .map(|v| {
            g.distances_from(v)
                .into_iter()
                .map(|d| d.expect("polytope graph must be connected"))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Degree of every vertex of the p-th Birkhoff polytope: `sum_{k=0}^{p-2} C(p,k) (p-k-1)!`.
pub fn birkhoff_degree(p: usize) -> BigUint {
    let fact = |n: usize| (1..=n).fold(BigUint::one(), |acc, k| acc * k);
    let binom = |n: usize, k: usize| fact(n) / (fact(k) * fact(n - k));
    (0..p.saturating_sub(1)).fold(BigUint::zero(), |acc, k| {
        acc + binom(p, k) * fact(p - k - 1)
    })
}

/// Cost vector over the cells of a p x p table: cell (i,j) gets `alpha^(i p + j)` (0-based).
pub fn pak_cost<T: Scalar>(p: usize, alpha: &T) -> Result<Vec<T>> {
    let bound = T::one() / T::from_i64(p as i64);
    if !alpha.is_positive() || *alpha >= bound {
        return Err(Error::InvalidAlpha);
    }
    let mut out = Vec::with_capacity(p * p);
    let mut power = T::one();
    for _ in 0..p * p {
        out.push(power.clone());
        power = power * alpha.clone();
    }
    Ok(out)
}

/// Longest path (in edges) along which the cost strictly decreases at every step.
pub fn longest_decreasing_path<T: Scalar>(
    g: &PolytopeGraph,
    vertices: &[Table2<T>],
    cost: &[T],
) -> usize {
    let value: Vec<T> = vertices
        .iter()
        .map(|x| {
            x.cells()
                .iter()
                .zip(cost)
                .fold(T::zero(), |acc, (a, c)| acc + a.clone() * c.clone())
        })
        .collect();
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    // increasing cost: every strictly-lower neighbor is finalized first
    order.sort_by(|&a, &b| value[a].cmp(&value[b]));
    let mut longest = vec![0usize; vertices.len()];
    for &v in &order {
        longest[v] = g
            .neighbors(v)
            .iter()
            .filter(|&&w| value[w] < value[v])
            .map(|&w| longest[w] + 1)
            .max()
            .unwrap_or(0);
    }
    longest.into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope2::birkhoff_margins;
    use crate::Rational;

    fn perm(p: usize, sigma: &[usize]) -> Table2<Rational> {
        let mut t = Table2::zeros(p, p);
        for (i, &j) in sigma.iter().enumerate() {
            t.set(i, j, Rational::one());
        }
        t
    }

    #[test]
    fn adjacency_in_b3() {
        let id = perm(3, &[0, 1, 2]);
        assert!(adjacent(&id, &perm(3, &[1, 0, 2])));
        assert!(adjacent(&id, &perm(3, &[1, 2, 0])));
        assert!(!adjacent(&id, &id));
    }

    #[test]
    fn b3_is_complete() {
        let (vs, g) = polytope_graph(&birkhoff_margins::<Rational>(3)).unwrap();
        assert_eq!(vs.len(), 6);
        assert!((0..6).all(|v| g.degree(v) == 5));
        assert_eq!(diameter(&g), 1);
    }

    #[test]
    fn birkhoff_degree_formula() {
        assert_eq!(birkhoff_degree(2), BigUint::from(1u32));
        assert_eq!(birkhoff_degree(3), BigUint::from(5u32));
        assert_eq!(birkhoff_degree(4), BigUint::from(20u32));
    }

    #[test]
    fn pak_cost_values() {
        let c = pak_cost(2, &Rational::from_frac(1, 3)).unwrap();
        let expect: Vec<Rational> = [(1, 1), (1, 3), (1, 9), (1, 27)]
            .iter()
            .map(|&(a, b)| Rational::from_frac(a, b))
            .collect();
        assert_eq!(c, expect);
        assert!(matches!(
            pak_cost(2, &Rational::from_frac(1, 2)),
            Err(Error::InvalidAlpha)
        ));
        assert!(matches!(
            pak_cost(2, &Rational::zero()),
            Err(Error::InvalidAlpha)
        ));
    }

    #[test]
    fn decreasing_path_on_b3() {
        let (vs, g) = polytope_graph(&birkhoff_margins::<Rational>(3)).unwrap();
        let cost = pak_cost(3, &Rational::from_frac(1, 4)).unwrap();
        // K_6 with distinct costs: a path through all six vertices
        assert_eq!(longest_decreasing_path(&g, &vs.vertices, &cost), 5);
    }

    #[test]
    fn dot_export() {
        let g = PolytopeGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let dot = g.to_dot("p");
        assert!(dot.contains("v0 -- v1;"));
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(diameter(&g), 2);
    }
}
