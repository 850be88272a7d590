use std::collections::BTreeSet;
use std::fmt;

use crate::error::{too_large, Error, Result};
use crate::scalar::Scalar;
use crate::tables::{Margins2, Table2};

use super::graph::PolytopeGraph;

/// Largest cube dimension the slice enumerator accepts.
pub const SLICE_DIMENSION_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Zero,
    One,
    Star,
}

impl Side {
    fn symbol(self) -> char {
        match self {
            Side::Zero => '0',
            Side::One => '1',
            Side::Star => '*',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SideSignature(pub Vec<Side>);

impl fmt::Display for SideSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

impl std::str::FromStr for SideSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Side::Zero),
                '1' => Ok(Side::One),
                '*' => Ok(Side::Star),
                other => Err(Error::Parse(format!("bad signature character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SideSignature)
    }
}

/// Number of positions where the characters differ.
pub fn hamming(a: &SideSignature, b: &SideSignature) -> Result<usize> {
    if a.0.len() != b.0.len() {
        return Err(Error::ShapeMismatch(format!(
            "signatures of length {} and {}",
            a.0.len(),
            b.0.len()
        )));
    }
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count())
}

/// `[0,1]^d ∩ {x : a·x = b}` for a hyperplane avoiding every cube vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeSlice<T> {
    a: Vec<T>,
    b: T,
    vertices: Vec<Vec<T>>,
}

impl<T: Scalar> CubeSlice<T> {
    pub fn new(a: Vec<T>, b: T) -> Result<Self> {
        let d = a.len();
        if d == 0 || a.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidMargins(
                "hyperplane needs a non-zero normal".into(),
            ));
        }
        if d > SLICE_DIMENSION_LIMIT {
            return Err(too_large(
                format!("{d}-cube"),
                format!("d <= {SLICE_DIMENSION_LIMIT}"),
            ));
        }
        let dot = |mask: usize| {
            (0..d)
                .filter(|k| mask >> k & 1 == 1)
                .fold(T::zero(), |acc, k| acc + a[k].clone())
        };
        if (0..1usize << d).any(|mask| dot(mask) == b) {
            return Err(Error::NotGeneric);
        }
        let mut found = BTreeSet::new();
        for i in (0..d).filter(|&i| !a[i].is_zero()) {
            for mask in (0..1usize << d).filter(|mask| mask >> i & 1 == 0) {
                let t = (b.clone() - dot(mask)) / a[i].clone();
                if t.is_positive() && t < T::one() {
                    let mut v: Vec<T> = (0..d)
                        .map(|k| {
                            if mask >> k & 1 == 1 {
                                T::one()
                            } else {
                                T::zero()
                            }
                        })
                        .collect();
                    v[i] = t;
                    found.insert(v);
                }
            }
        }
        Ok(Self {
            a,
            b,
            vertices: found.into_iter().collect(),
        })
    }

    /// The slice of a `p x 2` polytope: first-column entries scaled by `1/u_i`.
    pub fn from_margins(m: &Margins2<T>) -> Result<Self> {
        if m.q() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "need p x 2 margins, got {}x{}",
                m.p(),
                m.q()
            )));
        }
        if !m.all_positive() || !m.is_balanced() {
            return Err(Error::InvalidMargins(
                "need balanced positive margins".into(),
            ));
        }
        Self::new(m.u.clone(), m.v[0].clone())
    }

    /// Image of a `p x 2` table in the slice built by [`Self::from_margins`].
    pub fn point_of_table(&self, x: &Table2<T>) -> Vec<T> {
        (0..x.shape().0)
            .map(|i| x.get(i, 0).clone() / self.a[i].clone())
            .collect()
    }

    pub fn dim_ambient(&self) -> usize {
        self.a.len()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.a.len()
            && x.iter().all(|v| !v.is_negative() && *v <= T::one())
            && x.iter()
                .zip(&self.a)
                .fold(T::zero(), |acc, (v, c)| acc + v.clone() * c.clone())
                == self.b
    }

    /// Vertices in lexicographic order; each lies inside a cube edge.
    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    pub fn signatures(&self) -> Vec<SideSignature> {
        self.vertices.iter().map(|v| signature_of(v)).collect()
    }

    /// Two vertices are adjacent iff they lie on a common 2-face of the cube.
    pub fn graph(&self) -> PolytopeGraph {
        let sigs = self.signatures();
        let mut edges = Vec::new();
        for a in 0..sigs.len() {
            for b in a + 1..sigs.len() {
                let (sa, sb) = (&sigs[a].0, &sigs[b].0);
                let ia = sa.iter().position(|&s| s == Side::Star);
                let ib = sb.iter().position(|&s| s == Side::Star);
                if let (Some(i), Some(j)) = (ia, ib) {
                    let free: BTreeSet<usize> = (0..sa.len())
                        .filter(|&k| k == i || k == j || sa[k] != sb[k])
                        .collect();
                    if free.len() == 2 {
                        edges.push((a, b));
                    }
                }
            }
        }
        PolytopeGraph::from_edges(sigs.len(), &edges)
    }

    /// Facets are the non-empty sections `x_i = 0` or `x_i = 1`.
    pub fn facet_count(&self) -> usize {
        self.signatures()
            .iter()
            .flat_map(|s| {
                s.0.iter()
                    .copied()
                    .enumerate()
                    .filter(|(_, c)| *c != Side::Star)
            })
            .collect::<BTreeSet<_>>()
            .len()
    }
}

fn signature_of<T: Scalar>(v: &[T]) -> SideSignature {
    SideSignature(
        v.iter()
            .map(|x| {
                if x.is_zero() {
                    Side::Zero
                } else if x.is_one() {
                    Side::One
                } else {
                    Side::Star
                }
            })
            .collect(),
    )
}

pub fn side_signature<T: Scalar>(point: &[T], slice: &CubeSlice<T>) -> Result<SideSignature> {
    if !slice.contains(point) {
        return Err(Error::NotInPolytope);
    }
    Ok(signature_of(point))
}

/// Walk from vertex `v` to vertex `w` (indices into [`CubeSlice::vertices`]).
///
/// Each step moves to a neighbor one step closer to `w` in the graph,
/// preferring one that lowers the Hamming distance of the signatures. A
/// Hamming-lowering pivot does not always exist (opposite corners of the
/// hexagon `x+y+z = 3/2` are 3 pivots apart at Hamming distance 2).
pub fn signature_pivot_walk<T: Scalar>(
    slice: &CubeSlice<T>,
    v: usize,
    w: usize,
) -> Result<Vec<usize>> {
    let sigs = slice.signatures();
    let g = slice.graph();
    let to_w = g.distances_from(w);
    let mut path = vec![v];
    let mut cur = v;
    while cur != w {
        let d = to_w[cur].ok_or(Error::NotGeneric)?;
        let mut best: Option<(usize, usize)> = None;
        for &n in g.neighbors(cur) {
            if to_w[n] == Some(d - 1) {
                let h = hamming(&sigs[n], &sigs[w])?;
                if best.is_none_or(|(bh, _)| h < bh) {
                    best = Some((h, n));
                }
            }
        }
        let (_, next) = best.ok_or(Error::NotGeneric)?;
        path.push(next);
        cur = next;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope2::{diameter, polytope_graph};
    use crate::Rational;
    use num_traits::{One, Zero};

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn hamming_table() {
        let s = |t: &str| t.parse::<SideSignature>().unwrap();
        assert_eq!(hamming(&s("0"), &s("*")).unwrap(), 1);
        assert_eq!(hamming(&s("*"), &s("*")).unwrap(), 0);
        assert_eq!(hamming(&s("01*"), &s("10*")).unwrap(), 2);
        assert!(hamming(&s("0"), &s("01")).is_err());
        assert_eq!(s("01*").to_string(), "01*");
    }

    #[test]
    fn triangle_slice() {
        // x + y + z = 1/2 cuts a corner: a triangle
        let slice = CubeSlice::new(vec![r(1), r(1), r(1)], Rational::from_frac(1, 2)).unwrap();
        assert_eq!(slice.vertices().len(), 3);
        let g = slice.graph();
        assert!((0..3).all(|v| g.degree(v) == 2));
        assert_eq!(slice.facet_count(), 3);
        let walk = signature_pivot_walk(&slice, 0, 0).unwrap();
        assert_eq!(walk, vec![0]);
    }

    #[test]
    fn hexagon_slice() {
        let slice = CubeSlice::new(vec![r(1), r(1), r(1)], Rational::from_frac(3, 2)).unwrap();
        assert_eq!(slice.vertices().len(), 6);
        assert_eq!(slice.facet_count(), 6);
        let sigs = slice.signatures();
        let g = slice.graph();
        for v in 0..6 {
            for w in 0..6 {
                let walk = signature_pivot_walk(&slice, v, w).unwrap();
                assert_eq!(walk.len() - 1, g.distance(v, w).unwrap());
            }
        }
        let a = slice
            .vertices()
            .iter()
            .position(|x| x[0].is_one() && x[2].is_zero())
            .unwrap();
        let b = slice
            .vertices()
            .iter()
            .position(|x| x[0].is_zero() && x[2].is_one())
            .unwrap();
        assert_eq!(hamming(&sigs[a], &sigs[b]).unwrap(), 2);
        assert_eq!(g.distance(a, b), Some(3));
    }

    #[test]
    fn cube_vertex_on_plane() {
        assert!(matches!(
            CubeSlice::new(vec![r(1), r(1)], r(1)),
            Err(Error::NotGeneric)
        ));
    }

    #[test]
    fn p_by_two_matches_transportation_graph() {
        let m = Margins2::from_ints(&[3, 5, 9, 17], &[16, 18]).unwrap();
        let slice = CubeSlice::from_margins(&m).unwrap();
        let (vs, g) = polytope_graph(&m).unwrap();
        assert_eq!(slice.vertices().len(), vs.len());
        let image: BTreeSet<Vec<Rational>> = vs
            .vertices
            .iter()
            .map(|x| slice.point_of_table(x))
            .collect();
        assert_eq!(image, slice.vertices().iter().cloned().collect());
        let sg = slice.graph();
        assert_eq!(sg.edges().len(), g.edges().len());
        assert!(diameter(&g) + (m.p() - 1) <= slice.facet_count());
        let pt = slice.point_of_table(&vs.vertices[0]);
        assert!(side_signature(&pt, &slice).is_ok());
    }
}
