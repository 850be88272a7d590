//! 3-way axial (1-margin) and planar (2-margin) transportation polytopes.

mod junginger;
mod universality;

use std::collections::BTreeSet;

pub use junginger::{
    default_big_m, junginger_reduce, objective, AxialProblem, JungingerReduction, PlanarProblem,
};
pub use universality::{
    universality_encode, universality_step1, universality_step2, verify_encoding,
    verify_representation, IntSystem, RepresentationReport, Step1, UniversalityEncoding,
};

use crate::constraint::ConstraintSystem;
use crate::error::{too_large, Error, Result};
use crate::polytope2::PolytopeGraph;
use crate::scalar::{sum, Scalar};
use crate::tables::{AxialMargins, PlanarMargins, Table3};

/// Largest number of cells accepted by the 3-way vertex enumerator.
pub const CELL_LIMIT_3WAY: usize = 27;

/// Margins of either 3-way family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Margins3<T> {
    Axial(AxialMargins<T>),
    Planar(PlanarMargins<T>),
}

impl<T: Scalar> Margins3<T> {
    pub fn shape(&self) -> (usize, usize, usize) {
        match self {
            Margins3::Axial(m) => m.shape(),
            Margins3::Planar(m) => m.shape(),
        }
    }

    pub fn system(&self) -> ConstraintSystem<T> {
        match self {
            Margins3::Axial(m) => ConstraintSystem::for_axial(m),
            Margins3::Planar(m) => ConstraintSystem::for_planar(m),
        }
    }

    pub fn is_satisfied_by(&self, x: &Table3<T>) -> bool {
        match self {
            Margins3::Axial(m) => x.satisfies_axial(m),
            Margins3::Planar(m) => x.satisfies_planar(m),
        }
    }
}

/// Non-empty iff the three totals coincide.
pub fn axial_feasible<T: Scalar>(m: &AxialMargins<T>) -> Result<bool> {
    if m.u.iter().chain(&m.v).chain(&m.w).any(|x| x.is_negative()) {
        return Err(Error::InvalidMargins("negative margin".into()));
    }
    let (a, b, c) = (sum(&m.u), sum(&m.v), sum(&m.w));
    Ok(a == b && b == c)
}

/// Cells in lexicographic order get the least of the three remaining margins.
pub fn axial_nw_corner<T: Scalar>(m: &AxialMargins<T>) -> Result<Table3<T>> {
    if !axial_feasible(m)? {
        return Err(Error::Infeasible("axial totals differ".into()));
    }
    let (p, q, s) = m.shape();
    let (mut u, mut v, mut w) = (m.u.clone(), m.v.clone(), m.w.clone());
    let mut x = Table3::zeros(p, q, s);
    for i in 0..p {
        for j in 0..q {
            for k in 0..s {
                let t = u[i].clone().min(v[j].clone()).min(w[k].clone());
                if t.is_zero() {
                    continue;
                }
                u[i] = u[i].clone() - t.clone();
                v[j] = v[j].clone() - t.clone();
                w[k] = w[k].clone() - t.clone();
                x.set(i, j, k, t);
            }
        }
    }
    Ok(x)
}

/// All vertices, sorted, as basic feasible solutions of the margin system.
pub fn enumerate_vertices_3way<T: Scalar>(m: &Margins3<T>) -> Result<Vec<Table3<T>>> {
    let (p, q, s) = m.shape();
    if p * q * s > CELL_LIMIT_3WAY {
        return Err(too_large(
            format!("{p}x{q}x{s} table"),
            format!("at most {CELL_LIMIT_3WAY} cells"),
        ));
    }
    let points = m.system().polytope().vertices()?;
    Ok(points
        .into_iter()
        .map(|cells| Table3::from_cells(p, q, s, cells))
        .collect())
}

/// Vertices and graph; two vertices are adjacent iff their smallest common face is an edge.
pub fn graph_3way<T: Scalar>(m: &Margins3<T>) -> Result<(Vec<Table3<T>>, PolytopeGraph)> {
    let vertices = enumerate_vertices_3way(m)?;
    let poly = m.system().polytope();
    let cells: Vec<Vec<T>> = vertices.iter().map(|x| x.cells().to_vec()).collect();
    let g = PolytopeGraph::from_edges(vertices.len(), &poly.edges(&cells));
    Ok((vertices, g))
}

/// Whether every vertex has as many positive entries as the rank of the margin system.
pub fn is_nondegenerate_3way<T: Scalar>(m: &Margins3<T>, vertices: &[Table3<T>]) -> bool {
    let rank = m.system().matrix.rank();
    vertices.iter().all(|x| x.support_size() == rank)
}

/// `u = (qs,...)`, `v = (ps,...)`, `w = (pq,...)`.
pub fn generalized_birkhoff_axial<T: Scalar>(p: usize, q: usize, s: usize) -> AxialMargins<T> {
    let c = |n: usize, len: usize| vec![T::from_i64(n as i64); len];
    AxialMargins {
        u: c(q * s, p),
        v: c(p * s, q),
        w: c(p * q, s),
    }
}

/// `U ≡ p`, `V ≡ q`, `W ≡ s`.
pub fn generalized_birkhoff_planar<T: Scalar>(p: usize, q: usize, s: usize) -> PlanarMargins<T> {
    let c = |n: usize, r: usize, cols: usize| vec![vec![T::from_i64(n as i64); cols]; r];
    PlanarMargins {
        u: c(p, q, s),
        v: c(q, p, s),
        w: c(s, p, q),
    }
}

pub const LATIN_SQUARE_LIMIT: usize = 4;

/// The 0/1 tables with every line sum 1, i.e. `x[i][j][k] = 1` iff `L[i][j] = k` for a Latin square `L`.
pub fn latin_square_vertices<T: Scalar>(p: usize) -> Result<Vec<Table3<T>>> {
    if p > LATIN_SQUARE_LIMIT {
        return Err(too_large(
            format!("{p}x{p} Latin squares"),
            format!("p <= {LATIN_SQUARE_LIMIT}"),
        ));
    }
    let mut squares = Vec::new();
    let mut grid = vec![usize::MAX; p * p];
    fill_latin(p, 0, &mut grid, &mut squares);
    let mut out: Vec<Table3<T>> = squares
        .into_iter()
        .map(|g| {
            let mut x = Table3::zeros(p, p, p);
            for i in 0..p {
                for j in 0..p {
                    x.set(i, j, g[i * p + j], T::one());
                }
            }
            x
        })
        .collect();
    out.sort();
    Ok(out)
}

fn fill_latin(p: usize, cell: usize, grid: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cell == p * p {
        out.push(grid.clone());
        return;
    }
    let (i, j) = (cell / p, cell % p);
    for k in 0..p {
        let clash = (0..j).any(|c| grid[i * p + c] == k) || (0..i).any(|r| grid[r * p + j] == k);
        if !clash {
            grid[cell] = k;
            fill_latin(p, cell + 1, grid, out);
        }
    }
    grid[cell] = usize::MAX;
}

/// Distinct positive entries in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum<T>(pub Vec<T>);

pub fn spectrum<T: Scalar>(x: &Table3<T>) -> Spectrum<T> {
    let values: BTreeSet<T> = x
        .cells()
        .iter()
        .filter(|v| v.is_positive())
        .cloned()
        .collect();
    Spectrum(values.into_iter().rev().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn feasibility() {
        let ok = AxialMargins::<Rational>::from_ints(&[2, 2], &[2, 2], &[1, 1, 2]).unwrap();
        assert!(axial_feasible(&ok).unwrap());
        let bad = AxialMargins::<Rational>::from_ints(&[1], &[1], &[2]).unwrap();
        assert!(!axial_feasible(&bad).unwrap());
        assert!(axial_feasible(&generalized_birkhoff_axial::<Rational>(2, 3, 4)).unwrap());
        assert!(matches!(axial_nw_corner(&bad), Err(Error::Infeasible(_))));
    }

    #[test]
    fn nw_corner() {
        let m = AxialMargins::<Rational>::from_ints(&[1, 1], &[1, 1], &[1, 1]).unwrap();
        let x = axial_nw_corner(&m).unwrap();
        assert_eq!(x.get(0, 0, 0), &r(1));
        assert_eq!(x.get(1, 1, 1), &r(1));
        assert_eq!(x.support_size(), 2);
        let one = AxialMargins::<Rational>::from_ints(&[7], &[7], &[7]).unwrap();
        assert_eq!(axial_nw_corner(&one).unwrap().get(0, 0, 0), &r(7));
        let gb = generalized_birkhoff_axial::<Rational>(2, 2, 2);
        let x = axial_nw_corner(&gb).unwrap();
        assert_eq!(x.get(0, 0, 0), &r(4));
        assert!(x.satisfies_axial(&gb));
    }

    #[test]
    fn birkhoff_margins() {
        let a = generalized_birkhoff_axial::<Rational>(2, 2, 2);
        assert_eq!(a.u, vec![r(4), r(4)]);
        assert_eq!(a.w, vec![r(4), r(4)]);
        let p = generalized_birkhoff_planar::<Rational>(3, 3, 3);
        assert!(p
            .u
            .iter()
            .chain(&p.v)
            .chain(&p.w)
            .flatten()
            .all(|x| *x == r(3)));
        assert!(p.is_consistent());
    }

    #[test]
    fn latin_squares() {
        let counts: Vec<usize> = (1..=3)
            .map(|p| latin_square_vertices::<Rational>(p).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 2, 12]);
        let planar = Margins3::Planar(
            PlanarMargins::from_ints(
                &vec![vec![1; 3]; 3],
                &vec![vec![1; 3]; 3],
                &vec![vec![1; 3]; 3],
            )
            .unwrap(),
        );
        let poly = planar.system().polytope();
        for x in latin_square_vertices::<Rational>(3).unwrap() {
            assert!(planar.is_satisfied_by(&x));
            assert!(poly.is_vertex(x.cells()));
            assert_eq!(spectrum(&x), Spectrum(vec![r(1)]));
        }
        assert!(latin_square_vertices::<Rational>(5).is_err());
    }

    #[test]
    fn spectra() {
        assert!(spectrum(&Table3::<Rational>::zeros(2, 2, 2)).0.is_empty());
        let mut x = Table3::<Rational>::zeros(1, 1, 3);
        x.set(0, 0, 0, r(2));
        x.set(0, 0, 1, r(4));
        x.set(0, 0, 2, r(2));
        assert_eq!(spectrum(&x), Spectrum(vec![r(4), r(2)]));
    }

    #[test]
    fn axial_2x2x2_vertices() {
        let m = Margins3::Axial(
            AxialMargins::<Rational>::from_ints(&[5, 8], &[6, 7], &[4, 9]).unwrap(),
        );
        let (vs, g) = graph_3way(&m).unwrap();
        assert!(!vs.is_empty());
        assert!(vs.iter().all(|x| m.is_satisfied_by(x)));
        assert!(vs.iter().all(|x| x.support_size() <= 4));
        assert!(g.is_connected());
        assert!(crate::polytope2::diameter(&g) <= 2 * 4 * 4);
    }

    #[test]
    fn size_guard() {
        let m = Margins3::Axial(generalized_birkhoff_axial::<Rational>(4, 4, 2));
        assert!(matches!(
            enumerate_vertices_3way(&m),
            Err(Error::TooLarge { .. })
        ));
    }
}
