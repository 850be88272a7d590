//! Integer points of 2-way transportation polytopes.

mod ehrhart;
mod moves;

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

pub use ehrhart::{
    birkhoff_normalized_volume, ehrhart_interpolate, evaluate_polynomial, semi_magic_count,
    EhrhartSamples, SEMI_MAGIC_P_LIMIT, SEMI_MAGIC_T_LIMIT, VOLUME_P_LIMIT,
};
pub use moves::{graver_moves, moves_connect, sample_table, Move, MoveBasis, TableSampler};

use crate::error::{too_large, Error, Result};
use crate::scalar::Scalar;
use crate::tables::{Margins2, Table2};

/// Largest number of tables [`enumerate_tables`] will produce.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;
/// Work budget (inner combinations) for [`count_tables`].
pub const COUNT_WORK_LIMIT: u64 = 200_000_000;

/// Non-negative integer margins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMargins2 {
    pub u: Vec<u64>,
    pub v: Vec<u64>,
}

impl IntMargins2 {
    pub fn new(u: Vec<u64>, v: Vec<u64>) -> Result<Self> {
        if u.is_empty() || v.is_empty() {
            return Err(Error::InvalidMargins(
                "need at least one row and one column".into(),
            ));
        }
        Ok(Self { u, v })
    }

    pub fn p(&self) -> usize {
        self.u.len()
    }

    pub fn q(&self) -> usize {
        self.v.len()
    }

    pub fn total(&self) -> u64 {
        self.u.iter().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.u.iter().map(|&x| x as u128).sum::<u128>()
            == self.v.iter().map(|&x| x as u128).sum::<u128>()
    }

    pub fn transpose(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    pub fn to_margins<T: Scalar>(&self) -> Margins2<T> {
        let f = |xs: &[u64]| {
            xs.iter()
                .map(|&x| T::from_bigint(&BigInt::from(x)))
                .collect()
        };
        Margins2 {
            u: f(&self.u),
            v: f(&self.v),
        }
    }

    /// Integral non-negative margins that fit in `u64`.
    pub fn from_margins<T: Scalar>(m: &Margins2<T>) -> Result<Self> {
        let f = |xs: &[T]| {
            xs.iter()
                .map(|x| {
                    x.to_bigint().and_then(|b| b.to_u64()).ok_or_else(|| {
                        Error::InvalidMargins(format!("{x} is not a non-negative 64-bit integer"))
                    })
                })
                .collect::<Result<Vec<u64>>>()
        };
        Self::new(f(&m.u)?, f(&m.v)?)
    }
}

/// A dense non-negative integer table, row-major; ordered lexicographically by cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntTable2 {
    p: usize,
    q: usize,
    cells: Vec<u64>,
}

impl IntTable2 {
    pub fn zeros(p: usize, q: usize) -> Self {
        Self {
            p,
            q,
            cells: vec![0; p * q],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let q = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || q == 0 || rows.iter().any(|r| r.len() != q) {
            return Err(Error::ShapeMismatch(
                "table rows must be non-empty and equally long".into(),
            ));
        }
        Ok(Self {
            p: rows.len(),
            q,
            cells: rows.concat(),
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.cells[i * self.q + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.cells[i * self.q + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.cells.chunks(self.q).map(<[u64]>::to_vec).collect()
    }

    pub fn satisfies(&self, m: &IntMargins2) -> bool {
        self.shape() == (m.p(), m.q())
            && (0..self.p).all(|i| (0..self.q).map(|j| self.get(i, j)).sum::<u64>() == m.u[i])
            && (0..self.q).all(|j| (0..self.p).map(|i| self.get(i, j)).sum::<u64>() == m.v[j])
    }

    pub fn to_table<T: Scalar>(&self) -> Table2<T> {
        Table2::from_cells(
            self.p,
            self.q,
            self.cells
                .iter()
                .map(|&x| T::from_bigint(&BigInt::from(x)))
                .collect(),
        )
    }
}

fn binomial_big(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn binomial_i128(n: u64, k: u64) -> Option<i128> {
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as i128)? / (i + 1) as i128;
    }
    Some(acc)
}

/// Number of `x` with `0 <= x_j <= w_j` and `sum x = s`, by inclusion-exclusion.
pub fn bounded_compositions(s: u64, w: &[u64]) -> BigUint {
    let q = w.len();
    if q == 0 {
        return BigUint::from(u32::from(s == 0));
    }
    if q <= 20 {
        if let Some(v) = bounded_compositions_small(s, w) {
            return BigUint::from(v as u128);
        }
    }
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for mask in 0u64..1 << q {
        let cut: u64 = (0..q)
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| w[j] + 1)
            .sum();
        if cut > s {
            continue;
        }
        let term = binomial_big(s - cut + q as u64 - 1, q as u64 - 1);
        if mask.count_ones() % 2 == 0 {
            pos += term;
        } else {
            neg += term;
        }
    }
    pos - neg
}

fn bounded_compositions_small(s: u64, w: &[u64]) -> Option<i128> {
    let q = w.len();
    let mut total: i128 = 0;
    for mask in 0u32..1 << q {
        let mut cut: u64 = 0;
        for j in 0..q {
            if mask >> j & 1 == 1 {
                cut = cut.checked_add(w[j] + 1)?;
            }
        }
        if cut > s {
            continue;
        }
        let term = binomial_i128(s - cut + q as u64 - 1, q as u64 - 1)?;
        total = if mask.count_ones() % 2 == 0 {
            total.checked_add(term)?
        } else {
            total.checked_sub(term)?
        };
    }
    Some(total)
}

/// Calls `f` on every `x` with `0 <= x_j <= bounds_j` and `sum x = total`, lexicographically.
fn for_each_bounded(bounds: &[u64], total: u64, f: &mut impl FnMut(&[u64])) {
    let mut tail = vec![0u64; bounds.len() + 1];
    for j in (0..bounds.len()).rev() {
        tail[j] = tail[j + 1].saturating_add(bounds[j]);
    }
    let mut x = vec![0u64; bounds.len()];
    fn rec(
        j: usize,
        left: u64,
        bounds: &[u64],
        tail: &[u64],
        x: &mut Vec<u64>,
        f: &mut impl FnMut(&[u64]),
    ) {
        if j == bounds.len() {
            if left == 0 {
                f(x);
            }
            return;
        }
        let lo = left.saturating_sub(tail[j + 1]);
        let hi = bounds[j].min(left);
        for v in lo..=hi {
            x[j] = v;
            rec(j + 1, left - v, bounds, tail, x, f);
        }
    }
    if tail[0] >= total {
        rec(0, total, bounds, &tail, &mut x, f);
    }
}

/// Tables with row sums `rows` and column sums `w`.
fn count_block(rows: &[u64], w: &[u64], budget: &mut u64) -> Result<BigUint> {
    match rows.len() {
        0 => Ok(BigUint::from(u32::from(w.iter().all(|&x| x == 0)))),
        1 => Ok(BigUint::from(u32::from(w.iter().sum::<u64>() == rows[0]))),
        2 => Ok(bounded_compositions(rows[0], w)),
        _ => {
            let mut acc = BigUint::zero();
            let mut err = None;
            let mut rest = vec![0u64; w.len()];
            for_each_bounded(w, rows[0], &mut |x| {
                if err.is_some() {
                    return;
                }
                if *budget == 0 {
                    err = Some(too_large(
                        "table count",
                        format!("{COUNT_WORK_LIMIT} combinations"),
                    ));
                    return;
                }
                *budget -= 1;
                for j in 0..w.len() {
                    rest[j] = w[j] - x[j];
                }
                match count_block(&rows[1..], &rest, budget) {
                    Ok(c) => acc += c,
                    Err(e) => err = Some(e),
                }
            });
            err.map_or(Ok(acc), Err)
        }
    }
}

/// Number of non-negative integer tables with the given margins.
///
/// Rows are split into a top and a bottom half. For every vector `w` of
/// column sums of the top half, the two halves are counted independently
/// (two-row blocks by inclusion-exclusion over bounded compositions) and
/// the products are summed.
pub fn count_tables(m: &IntMargins2) -> Result<BigUint> {
    if !m.is_balanced() {
        return Ok(BigUint::zero());
    }
    let m = if m.p() > m.q() {
        m.transpose()
    } else {
        m.clone()
    };
    let half = m.p().div_ceil(2);
    let (top, bottom) = m.u.split_at(half);
    let top_total: u64 = top.iter().sum();
    let middle = bounded_compositions(top_total, &m.v);
    if middle > BigUint::from(COUNT_WORK_LIMIT) {
        return Err(too_large(
            "table count",
            format!("{COUNT_WORK_LIMIT} combinations"),
        ));
    }
    let mut budget = COUNT_WORK_LIMIT;
    let mut acc = BigUint::zero();
    let mut err = None;
    let mut rest = vec![0u64; m.q()];
    for_each_bounded(&m.v, top_total, &mut |w| {
        if err.is_some() {
            return;
        }
        let a = match count_block(top, w, &mut budget) {
            Ok(a) => a,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        if a.is_zero() {
            return;
        }
        for j in 0..w.len() {
            rest[j] = m.v[j] - w[j];
        }
        match count_block(bottom, &rest, &mut budget) {
            Ok(b) => acc += a * b,
            Err(e) => err = Some(e),
        }
    });
    err.map_or(Ok(acc), Err)
}

/// All integer tables with the given margins, in lexicographic order.
pub fn enumerate_tables(m: &IntMargins2) -> Result<Vec<IntTable2>> {
    let count = count_tables(m)?;
    if count > BigUint::from(ENUMERATION_LIMIT) {
        return Err(Error::TooMany {
            limit: ENUMERATION_LIMIT as usize,
        });
    }
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    if count.is_zero() {
        return Ok(out);
    }
    let mut x = IntTable2::zeros(m.p(), m.q());
    fill_rows(m, 0, &mut m.v.clone(), &mut x, &mut out);
    out.sort();
    Ok(out)
}

fn fill_rows(
    m: &IntMargins2,
    i: usize,
    cols: &mut Vec<u64>,
    x: &mut IntTable2,
    out: &mut Vec<IntTable2>,
) {
    if i + 1 == m.p() {
        for (j, &c) in cols.iter().enumerate() {
            x.set(i, j, c);
        }
        out.push(x.clone());
        return;
    }
    let bounds = cols.clone();
    for_each_bounded(&bounds, m.u[i], &mut |row| {
        for (j, &v) in row.iter().enumerate() {
            x.set(i, j, v);
            cols[j] = bounds[j] - v;
        }
        fill_rows(m, i + 1, cols, x, out);
    });
    cols.copy_from_slice(&bounds);
}

/// The least and greatest values of cell `(i, j)` (0-based) over the polytope,
/// `max(0, u_i + v_j - total)` and `min(u_i, v_j)`.
///
/// Both are integers for integral margins and, since the constraint matrix
/// is totally unimodular, attained by integer tables; every value in
/// between is attained too (see [`attained_values`] for the check).
pub fn integer_range(m: &IntMargins2, cell: (usize, usize)) -> Result<(u64, u64)> {
    let (i, j) = cell;
    if i >= m.p() || j >= m.q() {
        return Err(Error::ShapeMismatch(format!(
            "cell ({i},{j}) outside a {}x{} table",
            m.p(),
            m.q()
        )));
    }
    if !m.is_balanced() {
        return Err(Error::Infeasible("row and column totals differ".into()));
    }
    let lo = (m.u[i] + m.v[j]).saturating_sub(m.total());
    Ok((lo, m.u[i].min(m.v[j])))
}

/// Values of cell `(i, j)` over all integer tables, by enumeration.
pub fn attained_values(m: &IntMargins2, cell: (usize, usize)) -> Result<BTreeSet<u64>> {
    integer_range(m, cell)?;
    Ok(enumerate_tables(m)?
        .iter()
        .map(|x| x.get(cell.0, cell.1))
        .collect())
}

/// The northwest-corner table of integral margins.
pub fn int_northwest_corner(m: &IntMargins2) -> Result<IntTable2> {
    if !m.is_balanced() {
        return Err(Error::Infeasible("row and column totals differ".into()));
    }
    let (mut rows, mut cols) = (m.u.clone(), m.v.clone());
    let mut x = IntTable2::zeros(m.p(), m.q());
    for i in 0..m.p() {
        for j in 0..m.q() {
            let t = rows[i].min(cols[j]);
            rows[i] -= t;
            cols[j] -= t;
            x.set(i, j, t);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(u: &[u64], v: &[u64]) -> IntMargins2 {
        IntMargins2::new(u.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(
            count_tables(&m(&[1, 1], &[1, 1])).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(
            count_tables(&m(&[2, 2], &[2, 2])).unwrap(),
            BigUint::from(3u32)
        );
        assert_eq!(count_tables(&m(&[1, 1], &[1, 2])).unwrap(), BigUint::zero());
        assert_eq!(
            count_tables(&m(&[5], &[2, 3])).unwrap(),
            BigUint::from(1u32)
        );
        // 3x3 with line sums 1: the 6 permutation matrices
        assert_eq!(
            count_tables(&m(&[1; 3], &[1; 3])).unwrap(),
            BigUint::from(6u32)
        );
        // five rows exercise the recursive block
        let five = m(&[1; 5], &[1; 5]);
        assert_eq!(count_tables(&five).unwrap(), BigUint::from(120u32));
    }

    #[test]
    fn bounded_composition_formula() {
        let brute = |s: u64, w: &[u64]| {
            let mut n = 0u64;
            for_each_bounded(w, s, &mut |_| n += 1);
            n
        };
        for s in 0..12 {
            for w in [[3u64, 4, 5].as_slice(), &[0, 2], &[7], &[1, 1, 1, 1]] {
                assert_eq!(bounded_compositions(s, w), BigUint::from(brute(s, w)));
            }
        }
    }

    #[test]
    fn enumeration_order_and_count() {
        let tables = enumerate_tables(&m(&[1, 1], &[1, 1])).unwrap();
        assert_eq!(tables[0].rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(tables[1].rows(), vec![vec![1, 0], vec![0, 1]]);
        let mm = m(&[3, 2, 4], &[2, 5, 2]);
        let tables = enumerate_tables(&mm).unwrap();
        assert_eq!(BigUint::from(tables.len()), count_tables(&mm).unwrap());
        assert!(tables.iter().all(|x| x.satisfies(&mm)));
        assert!(tables.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ranges() {
        let mm = m(&[1, 1], &[1, 1]);
        assert_eq!(integer_range(&mm, (0, 0)).unwrap(), (0, 1));
        let mm = m(&[5, 1], &[4, 2]);
        assert_eq!(integer_range(&mm, (0, 0)).unwrap(), (3, 4));
        let vals = attained_values(&mm, (0, 0)).unwrap();
        assert_eq!(vals, [3, 4].into_iter().collect());
        assert!(integer_range(&m(&[1], &[2]), (0, 0)).is_err());
        assert!(integer_range(&mm, (2, 0)).is_err());
    }
}
