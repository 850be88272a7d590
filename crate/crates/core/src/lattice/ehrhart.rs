use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{too_large, Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

pub const SEMI_MAGIC_P_LIMIT: usize = 5;
pub const SEMI_MAGIC_T_LIMIT: u64 = 20;
pub const VOLUME_P_LIMIT: usize = 5;

/// Lattice-point counts of the dilations `t P` of a polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EhrhartSamples {
    pub id: String,
    pub samples: Vec<(u64, BigUint)>,
}

/// Number of `p x p` non-negative integer matrices with every line sum `t`.
///
/// Rows are filled one at a time; the state is the multiset of remaining
/// column sums (kept sorted, since column order does not matter).
pub fn semi_magic_count(p: usize, t: u64) -> Result<BigUint> {
    if p == 0 {
        return Err(Error::InvalidMargins("p must be at least 1".into()));
    }
    if p > SEMI_MAGIC_P_LIMIT || t > SEMI_MAGIC_T_LIMIT {
        return Err(too_large(
            format!("semi-magic count ({p}, {t})"),
            format!("p <= {SEMI_MAGIC_P_LIMIT}, t <= {SEMI_MAGIC_T_LIMIT}"),
        ));
    }
    let mut states: HashMap<Vec<u64>, BigUint> = HashMap::from([(vec![t; p], BigUint::one())]);
    // the last row is forced
    for _ in 0..p - 1 {
        let mut next: HashMap<Vec<u64>, BigUint> = HashMap::new();
        for (cols, count) in &states {
            let mut row = vec![0u64; p];
            each_row(cols, 0, t, &mut row, &mut |row| {
                let mut rest: Vec<u64> = cols.iter().zip(row).map(|(c, x)| c - x).collect();
                rest.sort_unstable();
                *next.entry(rest).or_insert_with(BigUint::zero) += count;
            });
        }
        states = next;
    }
    Ok(states.into_values().sum())
}

fn each_row(cols: &[u64], j: usize, left: u64, row: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if j + 1 == cols.len() {
        if left <= cols[j] {
            row[j] = left;
            f(row);
        }
        return;
    }
    for v in 0..=left.min(cols[j]) {
        row[j] = v;
        each_row(cols, j + 1, left - v, row, f);
    }
}

/// Coefficients (constant term first) of the degree-`dim` polynomial through
/// the first `dim + 1` samples at distinct dilations, by exact Lagrange interpolation.
pub fn ehrhart_interpolate<T: Scalar>(samples: &EhrhartSamples, dim: usize) -> Result<Vec<T>> {
    let mut points: Vec<(T, T)> = Vec::new();
    for (t, c) in &samples.samples {
        let x = T::from_bigint(&BigInt::from(*t));
        if points.iter().all(|(px, _)| *px != x) {
            points.push((x, T::from_bigint(&BigInt::from(c.clone()))));
        }
        if points.len() == dim + 1 {
            break;
        }
    }
    if points.len() < dim + 1 {
        return Err(Error::NeedMoreSamples {
            need: dim + 1,
            got: points.len(),
        });
    }
    let mut coeffs = vec![T::zero(); dim + 1];
    for (i, (xi, yi)) in points.iter().enumerate() {
        // basis polynomial prod_{j != i} (x - x_j), built up term by term
        let mut basis = vec![T::one()];
        let mut denom = T::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![T::zero(); basis.len() + 1];
            for (d, b) in basis.iter().enumerate() {
                next[d + 1] = next[d + 1].clone() + b.clone();
                next[d] = next[d].clone() - b.clone() * xj.clone();
            }
            basis = next;
            denom = denom * (xi.clone() - xj.clone());
        }
        let scale = yi.clone() / denom;
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c = c.clone() + scale.clone() * b.clone();
        }
    }
    Ok(coeffs)
}

/// Value at `t` of a polynomial given constant term first.
pub fn evaluate_polynomial<T: Scalar>(coeffs: &[T], t: &T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * t.clone() + c.clone())
}

/// `dim! * (leading Ehrhart coefficient)` of the Birkhoff polytope `B_p`, `dim = (p-1)^2`.
pub fn birkhoff_normalized_volume(p: usize) -> Result<BigUint> {
    if p == 0 {
        return Err(Error::InvalidMargins("p must be at least 1".into()));
    }
    if p > VOLUME_P_LIMIT {
        return Err(too_large(
            format!("B_{p} volume"),
            format!("p <= {VOLUME_P_LIMIT}"),
        ));
    }
    let dim = (p - 1) * (p - 1);
    let samples = EhrhartSamples {
        id: format!("B_{p}"),
        samples: (0..=dim as u64)
            .map(|t| Ok((t, semi_magic_count(p, t)?)))
            .collect::<Result<_>>()?,
    };
    let coeffs: Vec<Rational> = ehrhart_interpolate(&samples, dim)?;
    let factorial: BigInt = (1..=dim as u64).map(BigInt::from).product();
    let volume = coeffs[dim].clone() * Rational::from_bigint(&factorial);
    volume
        .to_bigint()
        .and_then(|v| v.to_biguint())
        .ok_or_else(|| {
            Error::Parse(format!(
                "normalized volume {volume} is not a non-negative integer"
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semi_magic_small() {
        assert_eq!(semi_magic_count(3, 1).unwrap(), BigUint::from(6u32));
        assert_eq!(semi_magic_count(3, 2).unwrap(), BigUint::from(21u32));
        assert_eq!(semi_magic_count(4, 0).unwrap(), BigUint::one());
        assert_eq!(semi_magic_count(1, 9).unwrap(), BigUint::one());
        for (p, f) in [(1u32, 1u32), (2, 2), (3, 6), (4, 24), (5, 120)] {
            assert_eq!(semi_magic_count(p as usize, 1).unwrap(), BigUint::from(f));
        }
        assert!(semi_magic_count(6, 1).is_err());
    }

    #[test]
    fn b3_polynomial() {
        let samples = EhrhartSamples {
            id: "B_3".into(),
            samples: (0..=4)
                .map(|t| (t, semi_magic_count(3, t).unwrap()))
                .collect(),
        };
        let c: Vec<Rational> = ehrhart_interpolate(&samples, 4).unwrap();
        assert_eq!(c[4], Rational::from_frac(1, 8));
        assert!(c[0].is_one());
        let five = semi_magic_count(3, 5).unwrap();
        assert_eq!(
            evaluate_polynomial(&c, &Rational::from_i64(5)),
            Rational::from_bigint(&BigInt::from(five))
        );
    }

    #[test]
    fn interpolation_edge_cases() {
        let point = EhrhartSamples {
            id: "origin".into(),
            samples: vec![(0, BigUint::one()), (3, BigUint::one())],
        };
        let c: Vec<Rational> = ehrhart_interpolate(&point, 0).unwrap();
        assert_eq!(c, vec![Rational::one()]);
        let dup = EhrhartSamples {
            id: "dup".into(),
            samples: vec![(1, BigUint::one()), (1, BigUint::one())],
        };
        assert!(matches!(
            ehrhart_interpolate::<Rational>(&dup, 1),
            Err(Error::NeedMoreSamples { need: 2, got: 1 })
        ));
    }

    #[test]
    fn volumes() {
        let got: Vec<BigUint> = (1..=4)
            .map(|p| birkhoff_normalized_volume(p).unwrap())
            .collect();
        let want: Vec<BigUint> = [1u32, 1, 3, 352].into_iter().map(BigUint::from).collect();
        assert_eq!(got, want);
    }
}
