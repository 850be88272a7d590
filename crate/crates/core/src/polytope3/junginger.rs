//! Reduction of 1-margin (axial) problems to 2-margin (planar) problems.

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};
use crate::tables::{AxialMargins, PlanarMargins, Table3};

use super::axial_feasible;

/// Axial margins with an optional linear cost over the cells (`Table3` layout).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxialProblem<T> {
    pub margins: AxialMargins<T>,
    pub cost: Option<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarProblem<T> {
    pub margins: PlanarMargins<T>,
    pub cost: Option<Vec<T>>,
}

impl<T: Scalar> AxialProblem<T> {
    pub fn new(margins: AxialMargins<T>, cost: Option<Vec<T>>) -> Result<Self> {
        let (p, q, s) = margins.shape();
        if let Some(c) = &cost {
            if c.len() != p * q * s {
                return Err(Error::ShapeMismatch(format!(
                    "cost has {} entries, table has {}",
                    c.len(),
                    p * q * s
                )));
            }
        }
        Ok(Self { margins, cost })
    }
}

/// `sum_c cost_c x_c`; a missing cost is zero.
pub fn objective<T: Scalar>(cost: Option<&[T]>, x: &Table3<T>) -> T {
    match cost {
        None => T::zero(),
        Some(c) => c
            .iter()
            .zip(x.cells())
            .filter(|(_, v)| !v.is_zero())
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()),
    }
}

/// `1 + (sum |c|) * (total margin mass)`.
pub fn default_big_m<T: Scalar>(problem: &AxialProblem<T>) -> T {
    let weight = problem.cost.as_ref().map_or(T::zero(), |c| {
        c.iter().fold(T::zero(), |acc, v| acc + v.abs())
    });
    T::one() + weight * sum(&problem.margins.u)
}

/// The planar problem of size `(p+1) x (q+1) x (s+1)` plus the data needed to move between the two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JungingerReduction<T> {
    pub planar: PlanarProblem<T>,
    pub beta: T,
    pub big_m: T,
    shape: (usize, usize, usize),
}

impl<T: Scalar> JungingerReduction<T> {
    /// Constant `3 M beta` separating the two optimal values.
    pub fn offset(&self) -> T {
        T::from_i64(3) * self.big_m.clone() * self.beta.clone()
    }

    /// Extends an axial table: one-out cells complete each line to `beta`,
    /// the far corner is `beta`, all other out-of-range cells are zero.
    pub fn lift(&self, x: &Table3<T>) -> Result<Table3<T>> {
        let (p, q, s) = self.shape;
        if x.shape() != self.shape {
            return Err(Error::ShapeMismatch(format!(
                "expected a {p}x{q}x{s} table"
            )));
        }
        let mut y = Table3::zeros(p + 1, q + 1, s + 1);
        let beta = &self.beta;
        for i in 0..p {
            for j in 0..q {
                let mut line = T::zero();
                for k in 0..s {
                    y.set(i, j, k, x.get(i, j, k).clone());
                    line = line + x.get(i, j, k).clone();
                }
                y.set(i, j, s, beta.clone() - line);
            }
        }
        for i in 0..p {
            for k in 0..s {
                let line = (0..q).fold(T::zero(), |acc, j| acc + x.get(i, j, k).clone());
                y.set(i, q, k, beta.clone() - line);
            }
        }
        for j in 0..q {
            for k in 0..s {
                let line = (0..p).fold(T::zero(), |acc, i| acc + x.get(i, j, k).clone());
                y.set(p, j, k, beta.clone() - line);
            }
        }
        y.set(p, q, s, beta.clone());
        Ok(y)
    }

    /// The in-range block of a planar table.
    pub fn restrict(&self, y: &Table3<T>) -> Result<Table3<T>> {
        let (p, q, s) = self.shape;
        if y.shape() != (p + 1, q + 1, s + 1) {
            return Err(Error::ShapeMismatch(format!(
                "expected a {}x{}x{} table",
                p + 1,
                q + 1,
                s + 1
            )));
        }
        let mut x = Table3::zeros(p, q, s);
        for i in 0..p {
            for j in 0..q {
                for k in 0..s {
                    x.set(i, j, k, y.get(i, j, k).clone());
                }
            }
        }
        Ok(x)
    }

    /// Sum of the cells with exactly one in-range index; zero on every lifted table.
    pub fn penalized_mass(&self, y: &Table3<T>) -> T {
        let (p, q, s) = self.shape;
        let (pp, qq, ss) = y.shape();
        let mut total = T::zero();
        for i in 0..pp {
            for j in 0..qq {
                for k in 0..ss {
                    let inside = (i < p) as u8 + (j < q) as u8 + (k < s) as u8;
                    if inside == 1 {
                        total = total + y.get(i, j, k).clone();
                    }
                }
            }
        }
        total
    }
}

/// Builds the planar problem whose optimum is the axial optimum plus `3 M beta`.
///
/// `beta` is the largest 1-margin. Cells with all three indices in range
/// keep the axial cost; cells with two in range cost 0; cells with one in
/// range cost `2M`; the far corner costs `3M`. On the planar polytope this
/// cost equals `c·x + 3M beta + M·(mass on one-in-range cells)`, so any
/// optimum with large `M` leaves those cells empty.
pub fn junginger_reduce<T: Scalar>(
    problem: &AxialProblem<T>,
    big_m: Option<T>,
) -> Result<JungingerReduction<T>> {
    let m = &problem.margins;
    if !axial_feasible(m)? {
        return Err(Error::Infeasible("axial totals differ".into()));
    }
    let (p, q, s) = m.shape();
    let big_m = big_m.unwrap_or_else(|| default_big_m(problem));
    let beta =
        m.u.iter()
            .chain(&m.v)
            .chain(&m.w)
            .max()
            .cloned()
            .unwrap_or_else(T::zero);
    let times = |n: usize| T::from_i64(n as i64) * beta.clone();

    // U[j][k] sums over i
    let mut u = vec![vec![beta.clone(); s + 1]; q + 1];
    for k in 0..s {
        u[q][k] = times(p) - m.w[k].clone();
    }
    for j in 0..q {
        u[j][s] = times(p) - m.v[j].clone();
    }
    // V[i][k] sums over j
    let mut v = vec![vec![beta.clone(); s + 1]; p + 1];
    for i in 0..p {
        v[i][s] = times(q) - m.u[i].clone();
    }
    for k in 0..s {
        v[p][k] = times(q) - m.w[k].clone();
    }
    // W[i][j] sums over k
    let mut w = vec![vec![beta.clone(); q + 1]; p + 1];
    for j in 0..q {
        w[p][j] = times(s) - m.v[j].clone();
    }
    for i in 0..p {
        w[i][q] = times(s) - m.u[i].clone();
    }
    let margins = PlanarMargins::new(u, v, w)?;

    let base = problem.cost.clone();
    let mut cost = Vec::with_capacity((p + 1) * (q + 1) * (s + 1));
    for i in 0..=p {
        for j in 0..=q {
            for k in 0..=s {
                let inside = (i < p) as u8 + (j < q) as u8 + (k < s) as u8;
                cost.push(match inside {
                    3 => base
                        .as_ref()
                        .map_or(T::zero(), |c| c[(i * q + j) * s + k].clone()),
                    2 => T::zero(),
                    1 => T::from_i64(2) * big_m.clone(),
                    _ => T::from_i64(3) * big_m.clone(),
                });
            }
        }
    }
    Ok(JungingerReduction {
        planar: PlanarProblem {
            margins,
            cost: Some(cost),
        },
        beta,
        big_m,
        shape: (p, q, s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope3::{enumerate_vertices_3way, Margins3};
    use crate::Rational;
    use num_traits::Zero;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn problem() -> AxialProblem<Rational> {
        let m = AxialMargins::from_ints(&[3, 5], &[4, 4], &[2, 6]).unwrap();
        let cost = [3, -1, 4, 1, -5, 9, 2, 6].iter().map(|&c| r(c)).collect();
        AxialProblem::new(m, Some(cost)).unwrap()
    }

    #[test]
    fn margins_match_the_worked_formulas() {
        let red = junginger_reduce(&problem(), None).unwrap();
        let pm = &red.planar.margins;
        assert_eq!(red.beta, r(6));
        assert_eq!(pm.shape(), (3, 3, 3));
        // U[q+1][k] = p beta - w_k
        assert_eq!(pm.u[2][0], r(2 * 6 - 2));
        // V[i][s+1] = q beta - u_i
        assert_eq!(pm.v[1][2], r(2 * 6 - 5));
        // W[p+1][j] = s beta - v_j
        assert_eq!(pm.w[2][1], r(2 * 6 - 4));
        assert_eq!(pm.w[2][2], r(6));
        assert!(pm.is_consistent());
    }

    #[test]
    fn lift_and_restrict() {
        let pr = problem();
        let red = junginger_reduce(&pr, None).unwrap();
        let x = crate::polytope3::axial_nw_corner(&pr.margins).unwrap();
        let y = red.lift(&x).unwrap();
        assert!(y.satisfies_planar(&red.planar.margins));
        assert!(y.is_integral());
        assert_eq!(red.restrict(&y).unwrap(), x);
        assert!(red.penalized_mass(&y).is_zero());
        let cost = red.planar.cost.as_deref();
        assert_eq!(
            objective(cost, &y),
            objective(pr.cost.as_deref(), &x) + red.offset()
        );
    }

    #[test]
    fn optimal_values_agree() {
        let pr = problem();
        let red = junginger_reduce(&pr, None).unwrap();
        let axial = enumerate_vertices_3way(&Margins3::Axial(pr.margins.clone())).unwrap();
        let planar =
            enumerate_vertices_3way(&Margins3::Planar(red.planar.margins.clone())).unwrap();
        let best_axial = axial
            .iter()
            .map(|x| objective(pr.cost.as_deref(), x))
            .min()
            .unwrap();
        let best_planar = planar
            .iter()
            .map(|y| objective(red.planar.cost.as_deref(), y))
            .min()
            .unwrap();
        assert_eq!(best_planar - red.offset(), best_axial);
    }
}
