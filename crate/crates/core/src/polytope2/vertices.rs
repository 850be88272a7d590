use std::collections::BTreeSet;

use crate::error::{too_large, Error, Result};
use crate::scalar::Scalar;
use crate::tables::{Dsu, Margins2, Table2};

use super::require_feasible;

/// Size guard on `p * q` for spanning-tree enumeration.
pub const ENUMERATION_CELL_LIMIT: usize = 36;

/// All vertices of a 2-way polytope in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet2<T> {
    pub margins: Margins2<T>,
    pub vertices: Vec<Table2<T>>,
    /// Some vertex has fewer than `p + q - 1` positive entries.
    pub degenerate: bool,
}

impl<T: Scalar> VertexSet2<T> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, x: &Table2<T>) -> Option<usize> {
        self.vertices.binary_search(x).ok()
    }
}

/// Solves the margin equations on the cells of a spanning tree of `K_{p,q}`.
///
/// Peels leaves: a leaf's only edge carries its whole remaining margin.
/// Returns `None` if the tree is not spanning.
pub fn solve_on_tree<T: Scalar>(m: &Margins2<T>, tree: &[(usize, usize)]) -> Option<Table2<T>> {
    let (p, q) = (m.p(), m.q());
    if tree.len() + 1 != p + q {
        return None;
    }
    let mut residual: Vec<T> = m.u.iter().chain(&m.v).cloned().collect();
    let mut degree = vec![0usize; p + q];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); p + q];
    for (e, &(i, j)) in tree.iter().enumerate() {
        degree[i] += 1;
        degree[p + j] += 1;
        incident[i].push(e);
        incident[p + j].push(e);
    }
    let mut done = vec![false; tree.len()];
    let mut x = Table2::zeros(p, q);
    let mut stack: Vec<usize> = (0..p + q).filter(|&n| degree[n] == 1).collect();
    let mut assigned = 0;
    while let Some(node) = stack.pop() {
        if degree[node] != 1 {
            continue;
        }
        let Some(&e) = incident[node].iter().find(|&&e| !done[e]) else {
            continue;
        };
        done[e] = true;
        assigned += 1;
        let (i, j) = tree[e];
        let other = if node == i { p + j } else { i };
        let val = residual[node].clone();
        residual[node] = T::zero();
        residual[other] = residual[other].clone() - val.clone();
        x.set(i, j, val);
        degree[node] -= 1;
        degree[other] -= 1;
        if degree[other] == 1 {
            stack.push(other);
        }
    }
    (assigned == tree.len()).then_some(x)
}

struct TreeSearch<'a, T> {
    m: &'a Margins2<T>,
    edges: Vec<(usize, usize)>,
    chosen: Vec<(usize, usize)>,
    excluded: Vec<bool>,
    found: BTreeSet<Table2<T>>,
    trees: usize,
}

impl<T: Scalar> TreeSearch<'_, T> {
    fn nodes(&self) -> usize {
        self.m.p() + self.m.q()
    }

    /// The chosen edges plus all undecided ones from `from` on still connect every node.
    fn can_span(&self, from: usize) -> bool {
        let p = self.m.p();
        let mut dsu = Dsu::new(self.nodes());
        let mut comps = self.nodes();
        let undecided = self.edges[from..]
            .iter()
            .zip(&self.excluded[from..])
            .filter(|(_, &x)| !x)
            .map(|(e, _)| e);
        for &(i, j) in self.chosen.iter().chain(undecided) {
            if dsu.union(i, p + j) {
                comps -= 1;
            }
        }
        comps == 1
    }

    fn creates_cycle(&self, e: (usize, usize)) -> bool {
        let p = self.m.p();
        let mut dsu = Dsu::new(self.nodes());
        for &(i, j) in &self.chosen {
            dsu.union(i, p + j);
        }
        dsu.find(e.0) == dsu.find(p + e.1)
    }

    fn run(&mut self, idx: usize) {
        let need = self.nodes() - 1;
        if self.chosen.len() == need {
            self.trees += 1;
            if let Some(x) = solve_on_tree(self.m, &self.chosen) {
                if x.is_nonnegative() {
                    self.found.insert(x);
                }
            }
            return;
        }
        if idx == self.edges.len() || self.chosen.len() + (self.edges.len() - idx) < need {
            return;
        }
        let e = self.edges[idx];
        if !self.creates_cycle(e) {
            self.chosen.push(e);
            self.run(idx + 1);
            self.chosen.pop();
        }
        self.excluded[idx] = true;
        if self.can_span(idx + 1) {
            self.run(idx + 1);
        }
        self.excluded[idx] = false;
    }
}

/// Enumerates vertices through the spanning trees of `K_{p,q}`.
///
/// Every vertex has a forest support that extends to a spanning tree, and
/// the margin equations have a unique solution on a spanning tree. Each of
/// the `p^(q-1) q^(p-1)` trees is solved; non-negative solutions are kept and
/// deduplicated (duplicates arise exactly for degenerate vertices).
pub fn enumerate_vertices<T: Scalar>(m: &Margins2<T>) -> Result<VertexSet2<T>> {
    require_feasible(m)?;
    if !m.all_positive() {
        return Err(Error::InvalidMargins(
            "vertex enumeration needs strictly positive margins".into(),
        ));
    }
    let (p, q) = (m.p(), m.q());
    if p * q > ENUMERATION_CELL_LIMIT {
        return Err(too_large(
            format!("{p}x{q} table"),
            format!("p*q <= {ENUMERATION_CELL_LIMIT}"),
        ));
    }
    let edges: Vec<(usize, usize)> = (0..p).flat_map(|i| (0..q).map(move |j| (i, j))).collect();
    let mut search = TreeSearch {
        m,
        excluded: vec![false; edges.len()],
        edges,
        chosen: Vec::with_capacity(p + q - 1),
        found: BTreeSet::new(),
        trees: 0,
    };
    search.run(0);
    let vertices: Vec<Table2<T>> = search.found.into_iter().collect();
    let degenerate = vertices.iter().any(|x| x.support_size() < p + q - 1);
    Ok(VertexSet2 {
        margins: m.clone(),
        vertices,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope2::birkhoff_margins;
    use crate::Rational;
    use num_traits::{One, Zero};

    fn m(u: &[i64], v: &[i64]) -> Margins2<Rational> {
        Margins2::from_ints(u, v).unwrap()
    }

    #[test]
    fn search_visits_every_spanning_tree() {
        for (p, q) in [(1, 3), (2, 2), (2, 3), (3, 3), (2, 4), (3, 4)] {
            let margins = m(&vec![1; p], &vec![1; q]);
            let edges: Vec<(usize, usize)> =
                (0..p).flat_map(|i| (0..q).map(move |j| (i, j))).collect();
            let mut search = TreeSearch {
                m: &margins,
                excluded: vec![false; edges.len()],
                edges,
                chosen: Vec::new(),
                found: BTreeSet::new(),
                trees: 0,
            };
            search.run(0);
            let expected = p.pow(q as u32 - 1) * q.pow(p as u32 - 1);
            assert_eq!(search.trees, expected, "{p}x{q}");
        }
    }

    #[test]
    fn birkhoff_three_has_six_permutations() {
        let vs = enumerate_vertices(&birkhoff_margins::<Rational>(3)).unwrap();
        assert_eq!(vs.len(), 6);
        assert!(vs.degenerate);
        for x in &vs.vertices {
            assert_eq!(x.support_size(), 3);
            assert!(x.cells().iter().all(|c| c.is_zero() || c.is_one()));
        }
    }

    #[test]
    fn single_row_has_one_vertex() {
        let vs = enumerate_vertices(&m(&[7], &[1, 2, 4])).unwrap();
        assert_eq!(vs.len(), 1);
        assert!(!vs.degenerate);
    }

    #[test]
    fn example_margins_vertices_are_trees() {
        let margins = m(&[5, 5, 1], &[2, 7, 2]);
        let vs = enumerate_vertices(&margins).unwrap();
        assert!([9, 12, 15, 18].contains(&vs.len()));
        assert!(!vs.degenerate);
        for x in &vs.vertices {
            assert!(x.satisfies(&margins));
            assert_eq!(x.support_size(), 5);
        }
        let nw = crate::polytope2::northwest_corner(&margins).unwrap();
        assert!(vs.index_of(&nw).is_some());
    }

    #[test]
    fn guards() {
        assert!(matches!(
            enumerate_vertices(&m(&[1; 7], &[1; 7])),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            enumerate_vertices(&m(&[0, 2], &[1, 1])),
            Err(Error::InvalidMargins(_))
        ));
    }

    #[test]
    fn solve_on_tree_rejects_short_edge_lists() {
        assert!(solve_on_tree(&m(&[1, 1], &[1, 1]), &[(0, 0)]).is_none());
    }
}
