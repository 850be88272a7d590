//! Margin-equation systems `A x = b` over the cells of a table.

use serde::{Deserialize, Serialize};

use crate::linalg::{EqualityPolytope, Matrix};
use crate::scalar::Scalar;
use crate::tables::{AxialMargins, Margins2, PlanarMargins};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[serde(rename = "2way")]
    TwoWay,
    Axial,
    Planar,
}

/// Table shape; `s` is ignored for 2-way systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub p: usize,
    pub q: usize,
    pub s: usize,
}

impl Shape {
    pub fn two(p: usize, q: usize) -> Self {
        Self { p, q, s: 1 }
    }

    pub fn three(p: usize, q: usize, s: usize) -> Self {
        Self { p, q, s }
    }
}

/// Rank of the constraint matrix as a closed form.
pub fn expected_rank(kind: Kind, shape: Shape) -> usize {
    let Shape { p, q, s } = shape;
    match kind {
        Kind::TwoWay => p + q - 1,
        Kind::Axial => p + q + s - 2,
        Kind::Planar => p * q + p * s + q * s + 1 - p - q - s,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem<T> {
    pub kind: Kind,
    pub shape: Shape,
    /// 0/1 matrix; rows are margin equations, columns are cells in lexicographic order.
    pub matrix: Matrix<T>,
    pub rhs: Vec<T>,
}

impl<T: Scalar> ConstraintSystem<T> {
    pub fn cells(&self) -> usize {
        self.matrix.ncols()
    }

    /// Column index of a cell; `k` is ignored for 2-way systems.
    pub fn column(&self, i: usize, j: usize, k: usize) -> usize {
        match self.kind {
            Kind::TwoWay => i * self.shape.q + j,
            _ => (i * self.shape.q + j) * self.shape.s + k,
        }
    }

    /// Inverse of [`Self::column`].
    pub fn cell(&self, col: usize) -> (usize, usize, usize) {
        let Shape { q, s, .. } = self.shape;
        match self.kind {
            Kind::TwoWay => (col / q, col % q, 0),
            _ => (col / (q * s), (col / s) % q, col % s),
        }
    }

    pub fn polytope(&self) -> EqualityPolytope<T> {
        EqualityPolytope::new(self.matrix.clone(), self.rhs.clone())
    }

    pub fn for_margins2(m: &Margins2<T>) -> Self {
        let mut sys = build_constraint_system(Kind::TwoWay, Shape::two(m.p(), m.q()));
        sys.rhs = m.u.iter().chain(&m.v).cloned().collect();
        sys
    }

    pub fn for_axial(m: &AxialMargins<T>) -> Self {
        let (p, q, s) = m.shape();
        let mut sys = build_constraint_system(Kind::Axial, Shape::three(p, q, s));
        sys.rhs = m.u.iter().chain(&m.v).chain(&m.w).cloned().collect();
        sys
    }

    pub fn for_planar(m: &PlanarMargins<T>) -> Self {
        let (p, q, s) = m.shape();
        let mut sys = build_constraint_system(Kind::Planar, Shape::three(p, q, s));
        sys.rhs =
            m.u.iter()
                .chain(&m.v)
                .chain(&m.w)
                .flat_map(|row| row.iter().cloned())
                .collect();
        sys
    }
}

/// Builds the 0/1 margin matrix with a zero right-hand side.
///
/// Row order: 2-way `u_i` then `v_j`; axial `u_i, v_j, w_k`; planar
/// `U[j][k]` (sum over i), `V[i][k]` (sum over j), `W[i][j]` (sum over k),
/// each block in lexicographic order.
pub fn build_constraint_system<T: Scalar>(kind: Kind, shape: Shape) -> ConstraintSystem<T> {
    let Shape { p, q, s } = shape;
    assert!(p >= 1 && q >= 1 && s >= 1, "shape dimensions must be >= 1");
    let (rows, cols) = match kind {
        Kind::TwoWay => (p + q, p * q),
        Kind::Axial => (p + q + s, p * q * s),
        Kind::Planar => (q * s + p * s + p * q, p * q * s),
    };
    let mut a = Matrix::zeros(rows, cols);
    match kind {
        Kind::TwoWay => {
            for i in 0..p {
                for j in 0..q {
                    let c = i * q + j;
                    a.set(i, c, T::one());
                    a.set(p + j, c, T::one());
                }
            }
        }
        Kind::Axial => {
            for i in 0..p {
                for j in 0..q {
                    for k in 0..s {
                        let c = (i * q + j) * s + k;
                        a.set(i, c, T::one());
                        a.set(p + j, c, T::one());
                        a.set(p + q + k, c, T::one());
                    }
                }
            }
        }
        Kind::Planar => {
            for i in 0..p {
                for j in 0..q {
                    for k in 0..s {
                        let c = (i * q + j) * s + k;
                        a.set(j * s + k, c, T::one());
                        a.set(q * s + i * s + k, c, T::one());
                        a.set(q * s + p * s + i * q + j, c, T::one());
                    }
                }
            }
        }
    }
    ConstraintSystem {
        kind,
        shape,
        matrix: a,
        rhs: vec![T::zero(); rows],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Zero;

    fn column_ones(sys: &ConstraintSystem<Rational>, c: usize) -> usize {
        sys.matrix.column(c).iter().filter(|v| !v.is_zero()).count()
    }

    #[test]
    fn two_way_3x3_is_6x9_rank_5() {
        let sys = build_constraint_system::<Rational>(Kind::TwoWay, Shape::two(3, 3));
        assert_eq!((sys.matrix.nrows(), sys.matrix.ncols()), (6, 9));
        assert_eq!(sys.matrix.rank(), 5);
        assert!((0..9).all(|c| column_ones(&sys, c) == 2));
    }

    #[test]
    fn axial_2x2x2_is_6x8_rank_4() {
        let sys = build_constraint_system::<Rational>(Kind::Axial, Shape::three(2, 2, 2));
        assert_eq!((sys.matrix.nrows(), sys.matrix.ncols()), (6, 8));
        assert_eq!(sys.matrix.rank(), 4);
    }

    #[test]
    fn planar_3x3x3_is_27x27_rank_19() {
        let sys = build_constraint_system::<Rational>(Kind::Planar, Shape::three(3, 3, 3));
        assert_eq!((sys.matrix.nrows(), sys.matrix.ncols()), (27, 27));
        assert_eq!(sys.matrix.rank(), 19);
        assert!((0..27).all(|c| column_ones(&sys, c) == 3));
    }

    #[test]
    fn column_cell_round_trip() {
        let sys = build_constraint_system::<Rational>(Kind::Planar, Shape::three(2, 3, 4));
        for c in 0..sys.cells() {
            let (i, j, k) = sys.cell(c);
            assert_eq!(sys.column(i, j, k), c);
        }
    }

    #[test]
    fn small_rank_formulas() {
        for p in 1..=3 {
            for q in 1..=3 {
                for s in 1..=3 {
                    for kind in [Kind::Axial, Kind::Planar] {
                        let shape = Shape::three(p, q, s);
                        let sys = build_constraint_system::<Rational>(kind, shape);
                        assert_eq!(
                            sys.matrix.rank(),
                            expected_rank(kind, shape),
                            "{kind:?} {p}x{q}x{s}"
                        );
                    }
                }
            }
        }
    }
}
