//! Classical 2-way transportation polytopes
//! `{x in R^{p x q}_{>=0} : row sums u, column sums v}`.

mod facets;
mod graph;
mod hurkens;
mod slice;
mod vertices;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

pub use facets::{facet_count, facet_indicator};
pub use graph::{
    adjacent, birkhoff_degree, diameter, graph_of, longest_decreasing_path, pak_cost,
    polytope_graph, PolytopeGraph,
};
pub use hurkens::{hurkens_walk, PivotPath};
pub use slice::{
    hamming, side_signature, signature_pivot_walk, CubeSlice, Side, SideSignature,
    SLICE_DIMENSION_LIMIT,
};
pub use vertices::{enumerate_vertices, solve_on_tree, VertexSet2, ENUMERATION_CELL_LIMIT};

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};
use crate::tables::{support_graph, Margins2, Table2};

/// Largest `p + q` accepted by the exhaustive genericity test.
pub const GENERICITY_NODE_LIMIT: usize = 24;

fn check_entries<T: Scalar>(m: &Margins2<T>) -> Result<()> {
    if m.u.iter().chain(&m.v).any(|x| x.is_negative()) {
        return Err(Error::InvalidMargins("negative margin".into()));
    }
    Ok(())
}

fn require_feasible<T: Scalar>(m: &Margins2<T>) -> Result<()> {
    if !is_feasible(m)? {
        return Err(Error::Infeasible(format!(
            "row total {} differs from column total {}",
            sum(&m.u),
            sum(&m.v)
        )));
    }
    Ok(())
}

/// Non-empty iff the row and column totals agree.
pub fn is_feasible<T: Scalar>(m: &Margins2<T>) -> Result<bool> {
    check_entries(m)?;
    Ok(m.is_balanced())
}

/// `(p-1)(q-1)`, the dimension of a non-empty polytope with positive margins.
pub fn dimension2(p: usize, q: usize) -> usize {
    (p - 1) * (q - 1)
}

/// Northwest corner rule: cells in lexicographic order get the smaller remaining margin.
pub fn northwest_corner<T: Scalar>(m: &Margins2<T>) -> Result<Table2<T>> {
    require_feasible(m)?;
    let mut rows = m.u.clone();
    let mut cols = m.v.clone();
    let mut x = Table2::zeros(m.p(), m.q());
    for i in 0..m.p() {
        for j in 0..m.q() {
            let t = rows[i].clone().min(cols[j].clone());
            rows[i] = rows[i].clone() - t.clone();
            cols[j] = cols[j].clone() - t.clone();
            x.set(i, j, t);
        }
    }
    Ok(x)
}

fn subset_sums<T: Scalar>(xs: &[T]) -> Vec<T> {
    // sums of non-empty proper subsets
    let n = xs.len();
    let mut out = Vec::with_capacity((1usize << n).saturating_sub(2));
    let mut all = vec![T::zero(); 1 << n];
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        all[mask] = all[mask & (mask - 1)].clone() + xs[low].clone();
        if mask != (1 << n) - 1 {
            out.push(all[mask].clone());
        }
    }
    out
}

/// No non-empty proper row subset has the same sum as a non-empty proper column subset.
pub fn is_generic<T: Scalar>(m: &Margins2<T>) -> Result<bool> {
    require_feasible(m)?;
    let got = m.p() + m.q();
    if got > GENERICITY_NODE_LIMIT {
        return Err(Error::TooLargeForExactCheck {
            got,
            limit: GENERICITY_NODE_LIMIT,
        });
    }
    let rows: BTreeSet<T> = subset_sums(&m.u).into_iter().collect();
    Ok(subset_sums(&m.v).iter().all(|s| !rows.contains(s)))
}

/// Klee-Witzgall test: a point of the polytope is a vertex iff its support graph is a forest.
pub fn is_vertex<T: Scalar>(x: &Table2<T>, m: &Margins2<T>) -> Result<bool> {
    if !m.all_positive() {
        return Err(Error::InvalidMargins(
            "vertex test needs strictly positive margins".into(),
        ));
    }
    if !x.satisfies(m) {
        return Err(Error::NotInPolytope);
    }
    Ok(support_graph(x).is_forest())
}

pub fn birkhoff_margins<T: Scalar>(p: usize) -> Margins2<T> {
    Margins2 {
        u: vec![T::one(); p],
        v: vec![T::one(); p],
    }
}

/// `u = (q,...,q)`, `v = (p,...,p)`.
pub fn central_margins<T: Scalar>(p: usize, q: usize) -> Margins2<T> {
    Margins2 {
        u: vec![T::from_i64(q as i64); p],
        v: vec![T::from_i64(p as i64); q],
    }
}

/// Generic perturbation of a feasible instance.
///
/// Adds `eps^(c+1)` to every cell `c` of the northwest-corner vertex and
/// returns the recomputed margins. Each subset-sum difference picks up a
/// non-zero signed sum of distinct powers of `eps`; with `eps = 1/N` and
/// `N > max(2, 2D)` (`D` the common denominator of the margins) that term is
/// smaller than any existing non-zero gap, so no collision survives and no
/// existing gap closes.
pub fn perturb<T: Scalar>(m: &Margins2<T>) -> Result<Margins2<T>> {
    let x = northwest_corner(m)?;
    let denom =
        m.u.iter()
            .chain(&m.v)
            .fold(BigInt::one(), |acc, v| acc.lcm(&v.denom_big()));
    let n = (denom * BigInt::from(2) + BigInt::one()).max(BigInt::from(3));
    let eps = T::one() / T::from_bigint(&n);
    let (p, q) = x.shape();
    let mut y = x.clone();
    let mut power = eps.clone();
    for i in 0..p {
        for j in 0..q {
            y.set(i, j, x.get(i, j).clone() + power.clone());
            power = power * eps.clone();
        }
    }
    Margins2::new(y.row_sums(), y.col_sums())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn m(u: &[i64], v: &[i64]) -> Margins2<Rational> {
        Margins2::from_ints(u, v).unwrap()
    }

    fn t(rows: &[&[i64]]) -> Table2<Rational> {
        Table2::from_int_rows(rows).unwrap()
    }

    #[test]
    fn feasibility() {
        assert!(is_feasible(&m(&[5, 5, 1], &[2, 7, 2])).unwrap());
        assert!(!is_feasible(&m(&[1, 2], &[4])).unwrap());
        assert!(is_feasible(&m(&[0, 0], &[0, 0])).unwrap());
        let bad = Margins2 {
            u: vec![Rational::from_i64(-1)],
            v: vec![Rational::from_i64(-1)],
        };
        assert!(matches!(is_feasible(&bad), Err(Error::InvalidMargins(_))));
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension2(3, 3), 4);
        assert_eq!(dimension2(1, 7), 0);
        assert_eq!(dimension2(5, 2), 4);
    }

    #[test]
    fn northwest_corner_examples() {
        assert_eq!(
            northwest_corner(&m(&[5, 5, 1], &[2, 7, 2])).unwrap(),
            t(&[&[2, 3, 0], &[0, 4, 1], &[0, 0, 1]])
        );
        assert_eq!(northwest_corner(&m(&[1], &[1])).unwrap(), t(&[&[1]]));
        assert_eq!(
            northwest_corner(&m(&[2, 2], &[2, 2])).unwrap(),
            t(&[&[2, 0], &[0, 2]])
        );
        assert!(matches!(
            northwest_corner(&m(&[1], &[2])),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn genericity() {
        assert!(is_generic(&m(&[5, 5, 1], &[2, 7, 2])).unwrap());
        assert!(!is_generic(&m(&[1, 1], &[1, 1])).unwrap());
        // central 2x4: u=(4,4), v=(2,2,2,2); 4 = 2+2
        assert!(!is_generic(&central_margins::<Rational>(2, 4)).unwrap());
        assert!(!is_generic(&central_margins::<Rational>(3, 3)).unwrap());
        let big = Margins2::<Rational>::from_ints(&[1; 13], &[1; 13]).unwrap();
        assert!(matches!(
            is_generic(&big),
            Err(Error::TooLargeForExactCheck { .. })
        ));
    }

    #[test]
    fn vertex_test() {
        let tree_vertex = t(&[&[2, 2, 1], &[0, 5, 0], &[0, 0, 1]]);
        let margins = m(&[5, 5, 1], &[2, 7, 2]);
        assert!(is_vertex(&tree_vertex, &margins).unwrap());
        assert_eq!(tree_vertex.support_size(), 3 + 3 - 1);
        let dense = t(&[
            &[68, 119, 26, 7],
            &[20, 84, 17, 94],
            &[15, 54, 14, 10],
            &[5, 29, 14, 16],
        ]);
        let dense_margins = m(&[220, 215, 93, 64], &[108, 286, 71, 127]);
        assert!(!is_vertex(&dense, &dense_margins).unwrap());
        assert!(is_vertex(&t(&[&[1, 0], &[0, 1]]), &m(&[1, 1], &[1, 1])).unwrap());
        assert!(matches!(
            is_vertex(&t(&[&[1, 0], &[1, 0]]), &m(&[1, 1], &[1, 1])),
            Err(Error::NotInPolytope)
        ));
    }

    #[test]
    fn birkhoff_and_central() {
        let b = birkhoff_margins::<Rational>(2);
        assert_eq!(b, m(&[1, 1], &[1, 1]));
        assert_eq!(central_margins::<Rational>(2, 3), m(&[3, 3], &[2, 2, 2]));
    }

    #[test]
    fn perturbation_is_generic_and_close() {
        for margins in [
            central_margins::<Rational>(3, 3),
            birkhoff_margins(4),
            m(&[2, 2], &[1, 1, 2]),
        ] {
            let pert = perturb(&margins).unwrap();
            assert!(is_generic(&pert).unwrap());
            assert!(pert.is_balanced());
            for (a, b) in pert.u.iter().zip(&margins.u) {
                assert!(a > b && a.clone() - b.clone() < Rational::one());
            }
        }
    }
}
