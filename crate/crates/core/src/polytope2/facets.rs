use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tables::Margins2;

use super::require_feasible;

fn check_range<T: Scalar>(m: &Margins2<T>) -> Result<()> {
    if m.p() * m.q() <= 4 {
        return Err(Error::LemmaOutOfRange { p: m.p(), q: m.q() });
    }
    require_feasible(m)?;
    if !m.all_positive() {
        return Err(Error::InvalidMargins(
            "facet test needs strictly positive margins".into(),
        ));
    }
    Ok(())
}

/// Whether `x[i][j] = 0` (0-based cell) defines a facet: `u_i + v_j < total`.
pub fn facet_indicator<T: Scalar>(m: &Margins2<T>, i: usize, j: usize) -> Result<bool> {
    check_range(m)?;
    if i >= m.p() || j >= m.q() {
        return Err(Error::ShapeMismatch(format!(
            "cell ({i},{j}) outside {}x{}",
            m.p(),
            m.q()
        )));
    }
    Ok(m.u[i].clone() + m.v[j].clone() < m.total())
}

pub fn facet_count<T: Scalar>(m: &Margins2<T>) -> Result<usize> {
    check_range(m)?;
    let total = m.total();
    Ok(m.u
        .iter()
        .flat_map(|a| m.v.iter().map(move |b| a.clone() + b.clone()))
        .filter(|s| *s < total)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn m(u: &[i64], v: &[i64]) -> Margins2<Rational> {
        Margins2::from_ints(u, v).unwrap()
    }

    #[test]
    fn facet_and_non_facet() {
        let margins = m(&[100, 6, 6], &[38, 37, 37]);
        assert!(facet_indicator(&margins, 2, 2).unwrap());
        assert!(!facet_indicator(&margins, 0, 0).unwrap());
        assert_eq!(facet_count(&margins).unwrap(), 6);
    }

    #[test]
    fn lemma_range() {
        assert!(matches!(
            facet_count(&m(&[1, 1], &[1, 1])),
            Err(Error::LemmaOutOfRange { p: 2, q: 2 })
        ));
        assert_eq!(facet_count(&m(&[1, 1, 1], &[1, 1, 1])).unwrap(), 9);
    }
}
