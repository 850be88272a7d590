use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tables::{support_graph, Margins2, Table2};

use super::{is_generic, VertexSet2};

/// A walk along polytope edges, starting vertex first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotPath<T> {
    pub vertices: Vec<Table2<T>>,
}

impl<T: Scalar> PivotPath<T> {
    /// Number of pivots.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Positions of the path's tables in a vertex set.
    pub fn indices(&self, vs: &VertexSet2<T>) -> Option<Vec<usize>> {
        self.vertices.iter().map(|x| vs.index_of(x)).collect()
    }
}

/// Node-level view of a table: supplies are `0..p`, demands `p..p+q`.
struct Walker<'a, T> {
    p: usize,
    q: usize,
    x: &'a Table2<T>,
    active: Vec<bool>,
}

impl<T: Scalar> Walker<'_, T> {
    fn cell(&self, a: usize, b: usize) -> (usize, usize) {
        if a < self.p {
            (a, b - self.p)
        } else {
            (b, a - self.p)
        }
    }

    fn neighbors(&self, t: &Table2<T>, n: usize) -> Vec<usize> {
        if n < self.p {
            (0..self.q)
                .filter(|&j| self.active[self.p + j] && t.get(n, j).is_positive())
                .map(|j| self.p + j)
                .collect()
        } else {
            let j = n - self.p;
            (0..self.p)
                .filter(|&i| self.active[i] && t.get(i, j).is_positive())
                .collect()
        }
    }

    /// Path of nodes from `from` to `to` in the support tree of `t`.
    fn tree_path(&self, t: &Table2<T>, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.p + self.q];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            if n == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for w in self.neighbors(t, n) {
                if prev[w] == usize::MAX {
                    prev[w] = n;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Pivots the edge `(a, b)` into the support tree of `t`.
    fn pivot(&self, t: &Table2<T>, a: usize, b: usize) -> Result<Table2<T>> {
        let path = self.tree_path(t, b, a).ok_or(Error::Degenerate)?;
        // cycle: a -> b (+), then along the path with alternating signs
        let mut plus = vec![self.cell(a, b)];
        let mut minus = Vec::new();
        for (k, w) in path.windows(2).enumerate() {
            let c = self.cell(w[0], w[1]);
            if k % 2 == 0 {
                minus.push(c);
            } else {
                plus.push(c);
            }
        }
        let theta = minus
            .iter()
            .map(|&(i, j)| t.get(i, j).clone())
            .min()
            .ok_or(Error::Degenerate)?;
        let leaving = minus
            .iter()
            .filter(|&&(i, j)| *t.get(i, j) == theta)
            .count();
        if leaving != 1 {
            return Err(Error::Degenerate);
        }
        let mut next = t.clone();
        for &(i, j) in &plus {
            next.set(i, j, t.get(i, j).clone() + theta.clone());
        }
        for &(i, j) in &minus {
            next.set(i, j, t.get(i, j).clone() - theta.clone());
        }
        Ok(next)
    }

    /// Active nodes that are adjacent to at least one active leaf of `B(x)`, with those leaves.
    fn candidates(&self) -> Vec<(usize, Vec<usize>)> {
        let n = self.p + self.q;
        let mut out = Vec::new();
        for c in (0..n).filter(|&c| self.active[c]) {
            let leaves: Vec<usize> = self
                .neighbors(self.x, c)
                .into_iter()
                .filter(|&l| self.neighbors(self.x, l).len() == 1)
                .collect();
            if !leaves.is_empty() {
                out.push((c, leaves));
            }
        }
        // most leaves first, then smallest node index
        out.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
        out
    }

    /// Pivots `y` until every node of `leaves` hangs off `sigma` as a leaf.
    fn attach_leaves(
        &self,
        y: &Table2<T>,
        sigma: usize,
        leaves: &[usize],
        cap: usize,
    ) -> Result<Option<Vec<Table2<T>>>> {
        let mut steps = Vec::new();
        let mut cur = y.clone();
        for &delta in leaves {
            if !self.neighbors(&cur, sigma).contains(&delta) {
                cur = self.pivot(&cur, sigma, delta)?;
                steps.push(cur.clone());
            }
            while let Some(other) = self
                .neighbors(&cur, delta)
                .into_iter()
                .find(|&n| n != sigma)
            {
                if steps.len() >= cap {
                    return Ok(None);
                }
                let Some(hat) = self.pick_hat(&cur, sigma, delta, other, leaves) else {
                    return Ok(None);
                };
                cur = self.pivot(&cur, other, hat)?;
                steps.push(cur.clone());
            }
        }
        Ok(Some(steps))
    }

    /// Entering partner for `other`: a neighbor of `sigma` outside `leaves`
    /// (closing a 4-cycle), else the nearest such node beyond `delta`.
    fn pick_hat(
        &self,
        t: &Table2<T>,
        sigma: usize,
        delta: usize,
        other: usize,
        leaves: &[usize],
    ) -> Option<usize> {
        let direct = self
            .neighbors(t, sigma)
            .into_iter()
            .find(|n| !leaves.contains(n));
        if direct.is_some() {
            return direct;
        }
        // BFS from delta without crossing back to `other`
        let mut seen = vec![false; self.p + self.q];
        seen[delta] = true;
        seen[other] = true;
        let mut queue = VecDeque::from([delta]);
        while let Some(n) = queue.pop_front() {
            for w in self.neighbors(t, n) {
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                if (w < self.p) == (delta < self.p) && !leaves.contains(&w) {
                    return Some(w);
                }
                queue.push_back(w);
            }
        }
        None
    }

    fn side_count(&self, supply: bool) -> usize {
        (0..self.p + self.q)
            .filter(|&n| self.active[n] && (n < self.p) == supply)
            .count()
    }
}

/// Walk from `y` to `x` by repeatedly making a group of leaves of `B(x)` common to both trees.
///
/// Among the nodes of `B(x)` carrying leaf neighbors, tried with the most
/// leaves first (ties by smallest index), the first whose pivot count stays
/// within `4r` is taken; if none does, the cheapest one is. The total is
/// checked against `4(p+q-2)`.
pub fn hurkens_walk<T: Scalar>(
    m: &Margins2<T>,
    x: &Table2<T>,
    y: &Table2<T>,
) -> Result<PivotPath<T>> {
    let (p, q) = (m.p(), m.q());
    for t in [x, y] {
        if !t.satisfies(m) || !t.is_nonnegative() {
            return Err(Error::NotInPolytope);
        }
    }
    if !m.all_positive() || !is_generic(m)? {
        return Err(Error::Degenerate);
    }
    for t in [x, y] {
        if !support_graph(t).is_spanning_tree() {
            return Err(Error::InvalidMargins(
                "walk endpoints must be vertices".into(),
            ));
        }
    }
    let budget = 4 * (p + q).saturating_sub(2);
    let mut walker = Walker {
        p,
        q,
        x,
        active: vec![true; p + q],
    };
    let mut path = vec![y.clone()];
    let mut cur = y.clone();
    while walker.side_count(true) > 1 && walker.side_count(false) > 1 && cur != *x {
        let mut best: Option<(Vec<usize>, Vec<Table2<T>>)> = None;
        for (sigma, leaves) in walker.candidates() {
            let cap = budget + 1;
            let Some(steps) = walker.attach_leaves(&cur, sigma, &leaves, cap)? else {
                continue;
            };
            let good = steps.len() <= 4 * leaves.len();
            if best.as_ref().is_none_or(|(_, s)| steps.len() < s.len()) {
                best = Some((leaves, steps));
            }
            if good {
                break;
            }
        }
        let (leaves, steps) = best.ok_or(Error::BudgetExceeded {
            used: path.len() - 1,
            budget,
        })?;
        if let Some(last) = steps.last() {
            cur = last.clone();
        }
        path.extend(steps);
        for l in leaves {
            walker.active[l] = false;
        }
        if path.len() - 1 > budget {
            return Err(Error::BudgetExceeded {
                used: path.len() - 1,
                budget,
            });
        }
    }
    debug_assert_eq!(&cur, x);
    if cur != *x {
        return Err(Error::Degenerate);
    }
    Ok(PivotPath { vertices: path })
}
