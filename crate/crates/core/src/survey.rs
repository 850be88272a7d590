//! Random-margin surveys of vertex counts, compared against the published lists.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope2::{enumerate_vertices, is_generic};
use crate::polytope3::{enumerate_vertices_3way, is_nondegenerate_3way, Margins3};
use crate::scalar::Scalar;
use crate::tables::{AxialMargins, Margins2, PlanarMargins, Table3};
use crate::Rational;

/// Margins are drawn from `[1, MARGIN_MAX]`.
pub const MARGIN_MAX: i64 = 1000;
/// Attempts allowed per requested sample before giving up.
pub const ATTEMPTS_PER_TRIAL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurveyFamily {
    #[serde(rename = "2way")]
    TwoWay,
    Axial,
    Planar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurveyReport {
    pub family: SurveyFamily,
    pub shape: Vec<usize>,
    pub seed: u64,
    /// Accepted (generic or non-degenerate) instances.
    pub trials: usize,
    pub rejected: usize,
    pub observed: BTreeSet<usize>,
    pub reference: Option<BTreeSet<usize>>,
    /// `observed ⊆ reference`, when a reference list exists.
    pub subset: Option<bool>,
    /// Reference values never observed.
    pub missing: Option<BTreeSet<usize>>,
}

impl SurveyReport {
    fn finish(mut self) -> Self {
        if let Some(r) = &self.reference {
            self.subset = Some(self.observed.is_subset(r));
            self.missing = Some(r.difference(&self.observed).copied().collect());
        }
        self
    }
}

fn range(a: usize, b: usize) -> Vec<usize> {
    (a..=b).collect()
}

/// Published vertex counts of generic `p x q` polytopes.
pub fn reference_2way(p: usize, q: usize) -> Option<BTreeSet<usize>> {
    let (p, q) = (p.min(q), p.max(q));
    let v: Vec<usize> = match (p, q) {
        (2, 3) => vec![3, 4, 5, 6],
        (2, 4) => vec![4, 6, 8, 10, 12],
        (2, 5) => [vec![5, 8, 11, 12], range(14, 30)].concat(),
        (3, 3) => vec![9, 12, 15, 18],
        (3, 4) => vec![
            16, 21, 24, 26, 27, 29, 31, 32, 34, 36, 37, 39, 40, 41, 42, 44, 45, 46, 48, 49, 50, 52,
            53, 54, 56, 57, 58, 60, 61, 62, 63, 64, 66, 67, 68, 70, 71, 72, 74, 75, 76, 78, 80, 84,
            90, 96,
        ],
        (4, 4) => [
            vec![108, 116, 124, 128],
            (136..=288).step_by(4).collect(),
            vec![296, 300, 304, 312, 320, 340, 360],
        ]
        .concat(),
        _ => return None,
    };
    Some(v.into_iter().collect())
}

/// Published vertex counts of non-degenerate axial polytopes.
pub fn reference_axial(shape: (usize, usize, usize)) -> Option<BTreeSet<usize>> {
    let mut dims = [shape.0, shape.1, shape.2];
    dims.sort_unstable();
    let v: Vec<usize> = match dims {
        [2, 2, 2] => vec![8, 11, 14],
        [2, 2, 3] => [
            vec![18, 24, 30, 32],
            (36..=80).step_by(2).collect(),
            vec![84, 86, 96, 108],
        ]
        .concat(),
        _ => return None,
    };
    Some(v.into_iter().collect())
}

/// Published vertex counts of non-degenerate planar polytopes.
pub fn reference_planar(shape: (usize, usize, usize)) -> Option<BTreeSet<usize>> {
    let mut dims = [shape.0, shape.1, shape.2];
    dims.sort_unstable();
    let v: Vec<usize> = match dims {
        [2, 2, 2] => vec![2],
        [2, 2, 3] => vec![3, 4, 5, 6],
        [2, 2, 4] => vec![4, 6, 8, 10, 12],
        [2, 2, 5] => [vec![5, 8, 11, 12], range(14, 30)].concat(),
        [2, 3, 3] => [vec![5, 8, 9, 11], range(12, 59)].concat(),
        _ => return None,
    };
    Some(v.into_iter().collect())
}

fn uniform_margins(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(1..=MARGIN_MAX)).collect()
}

/// A uniformly random composition of `total` into `parts` positive integers.
fn composition(rng: &mut ChaCha8Rng, total: i64, parts: usize) -> Option<Vec<i64>> {
    if total < parts as i64 {
        return None;
    }
    let mut cuts: BTreeSet<i64> = BTreeSet::new();
    while cuts.len() < parts - 1 {
        cuts.insert(rng.gen_range(1..total));
    }
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    Some(out)
}

fn ints<T: Scalar>(xs: &[i64]) -> Vec<T> {
    xs.iter().map(|&x| T::from_i64(x)).collect()
}

fn run(
    family: SurveyFamily,
    shape: Vec<usize>,
    trials: usize,
    seed: u64,
    reference: Option<BTreeSet<usize>>,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> Result<Option<usize>>,
) -> Result<SurveyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = BTreeSet::new();
    let (mut accepted, mut rejected) = (0, 0);
    let cap = trials
        .saturating_mul(ATTEMPTS_PER_TRIAL)
        .max(ATTEMPTS_PER_TRIAL);
    while accepted < trials {
        if accepted + rejected >= cap {
            return Err(Error::Degenerate);
        }
        match sample(&mut rng)? {
            Some(n) => {
                observed.insert(n);
                accepted += 1;
            }
            None => rejected += 1,
        }
    }
    Ok(SurveyReport {
        family,
        shape,
        seed,
        trials: accepted,
        rejected,
        observed,
        reference,
        subset: None,
        missing: None,
    }
    .finish())
}

/// Vertex counts of random generic `p x q` polytopes.
///
/// `u_i` is uniform in `[1, 1000]`, `v` is a uniform random composition of
/// the total into `q` positive parts; non-generic draws are rejected.
pub fn survey_2way(p: usize, q: usize, trials: usize, seed: u64) -> Result<SurveyReport> {
    if p < 2 || q < 2 {
        return Err(Error::InvalidMargins("survey needs p, q >= 2".into()));
    }
    run(
        SurveyFamily::TwoWay,
        vec![p, q],
        trials,
        seed,
        reference_2way(p, q),
        |rng| {
            let u = uniform_margins(rng, p);
            let Some(v) = composition(rng, u.iter().sum(), q) else {
                return Ok(None);
            };
            let m = Margins2::<Rational>::new(ints(&u), ints(&v))?;
            if !is_generic(&m)? {
                return Ok(None);
            }
            Ok(Some(enumerate_vertices(&m)?.len()))
        },
    )
}

/// Vertex counts of random non-degenerate axial polytopes.
///
/// Margins are drawn as in [`survey_2way`] (`u` uniform, `v` and `w`
/// random compositions); a draw is rejected when some vertex has fewer
/// than `p+q+s-2` positive entries.
pub fn survey_axial(
    shape: (usize, usize, usize),
    trials: usize,
    seed: u64,
) -> Result<SurveyReport> {
    let (p, q, s) = shape;
    run(
        SurveyFamily::Axial,
        vec![p, q, s],
        trials,
        seed,
        reference_axial(shape),
        |rng| {
            let u = uniform_margins(rng, p);
            let total = u.iter().sum();
            let (Some(v), Some(w)) = (composition(rng, total, q), composition(rng, total, s))
            else {
                return Ok(None);
            };
            let m = Margins3::Axial(AxialMargins::<Rational>::new(ints(&u), ints(&v), ints(&w))?);
            let vs = enumerate_vertices_3way(&m)?;
            Ok(is_nondegenerate_3way(&m, &vs).then_some(vs.len()))
        },
    )
}

/// Vertex counts of random non-degenerate planar polytopes.
///
/// Margins are the 2-marginals of a table with entries uniform in
/// `[1, 1000]`, so they are always feasible; degenerate draws are rejected.
pub fn survey_planar(
    shape: (usize, usize, usize),
    trials: usize,
    seed: u64,
) -> Result<SurveyReport> {
    let (p, q, s) = shape;
    run(
        SurveyFamily::Planar,
        vec![p, q, s],
        trials,
        seed,
        reference_planar(shape),
        |rng| {
            let cells = uniform_margins(rng, p * q * s);
            let x = Table3::<Rational>::from_cells(p, q, s, ints(&cells));
            let (u, v, w) = x.planar_sums();
            let m = Margins3::Planar(PlanarMargins::new(u, v, w)?);
            let vs = enumerate_vertices_3way(&m)?;
            Ok(is_nondegenerate_3way(&m, &vs).then_some(vs.len()))
        },
    )
}

/// Integer margins of a table with entries uniform in `[1, max]`.
pub fn random_table_margins(
    rng: &mut impl Rng,
    p: usize,
    q: usize,
    max: i64,
) -> Margins2<Rational> {
    let mut u = vec![BigInt::from(0); p];
    let mut v = vec![BigInt::from(0); q];
    for ui in u.iter_mut() {
        for vj in v.iter_mut() {
            let x = BigInt::from(rng.gen_range(1..=max));
            *ui += &x;
            *vj += &x;
        }
    }
    Margins2 {
        u: u.iter().map(Rational::from_bigint).collect(),
        v: v.iter().map(Rational::from_bigint).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_are_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let c = composition(&mut rng, 17, 4).unwrap();
            assert_eq!(c.iter().sum::<i64>(), 17);
            assert!(c.iter().all(|&x| x > 0));
        }
        assert!(composition(&mut rng, 2, 3).is_none());
    }

    #[test]
    fn references() {
        assert_eq!(reference_2way(3, 2), reference_2way(2, 3));
        assert_eq!(reference_2way(2, 5).unwrap().len(), 21);
        assert_eq!(reference_2way(3, 4).unwrap().len(), 46);
        assert_eq!(reference_2way(4, 4).unwrap().len(), 50);
        assert_eq!(reference_axial((2, 3, 2)).unwrap().len(), 31);
        assert_eq!(reference_planar((3, 2, 3)).unwrap().len(), 52);
        assert!(reference_2way(5, 5).is_none());
    }

    #[test]
    fn small_surveys() {
        let r = survey_2way(2, 3, 60, 1).unwrap();
        assert_eq!(r.subset, Some(true));
        assert_eq!(r.trials, 60);
        let again = survey_2way(2, 3, 60, 1).unwrap();
        assert_eq!(r, again);
        let a = survey_axial((2, 2, 2), 20, 5).unwrap();
        assert_eq!(a.subset, Some(true));
        let pl = survey_planar((2, 2, 2), 10, 5).unwrap();
        assert_eq!(pl.observed, [2].into_iter().collect());
    }
}
