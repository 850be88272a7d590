use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{enumerate_tables, int_northwest_corner, IntMargins2, IntTable2};
use crate::error::{Error, Result};

/// `+1` at `(i1, j1)` and `(i2, j2)`, `-1` at `(i1, j2)` and `(i2, j1)`, with `i1 < i2`, `j1 < j2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl Move {
    /// The four non-zero cells with their signs.
    pub fn entries(&self) -> [((usize, usize), i64); 4] {
        let ((i1, i2), (j1, j2)) = (self.rows, self.cols);
        [((i1, j1), 1), ((i1, j2), -1), ((i2, j1), -1), ((i2, j2), 1)]
    }

    pub fn to_matrix(&self, p: usize, q: usize) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; q]; p];
        for ((i, j), s) in self.entries() {
            out[i][j] = s;
        }
        out
    }

    /// `x + sign * move`, or `None` if an entry would go negative.
    pub fn apply(&self, x: &IntTable2, positive: bool) -> Option<IntTable2> {
        let mut y = x.clone();
        for ((i, j), s) in self.entries() {
            let delta = if positive { s } else { -s };
            let v = x.get(i, j);
            y.set(i, j, if delta > 0 { v + 1 } else { v.checked_sub(1)? });
        }
        Some(y)
    }
}

/// The 2x2-rectangle moves, one representative per `+-` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveBasis {
    pub p: usize,
    pub q: usize,
    pub moves: Vec<Move>,
}

/// All `C(p,2) C(q,2)` basic moves, in lexicographic order; empty if `p < 2` or `q < 2`.
pub fn graver_moves(p: usize, q: usize) -> MoveBasis {
    let mut moves = Vec::new();
    for i1 in 0..p {
        for i2 in i1 + 1..p {
            for j1 in 0..q {
                for j2 in j1 + 1..q {
                    moves.push(Move {
                        rows: (i1, i2),
                        cols: (j1, j2),
                    });
                }
            }
        }
    }
    MoveBasis { p, q, moves }
}

/// Whether the basic moves connect all integer tables with these margins.
pub fn moves_connect(m: &IntMargins2) -> Result<bool> {
    let tables = enumerate_tables(m)?;
    if tables.is_empty() {
        return Err(Error::Infeasible("no integer tables".into()));
    }
    let index: HashMap<&IntTable2, usize> =
        tables.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let basis = graver_moves(m.p(), m.q());
    let mut seen = vec![false; tables.len()];
    seen[0] = true;
    let mut reached = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for mv in &basis.moves {
            for positive in [true, false] {
                let Some(y) = mv.apply(&tables[a], positive) else {
                    continue;
                };
                let b = *index.get(&y).expect("moves preserve the margins");
                if !seen[b] {
                    seen[b] = true;
                    reached += 1;
                    queue.push_back(b);
                }
            }
        }
    }
    Ok(reached == tables.len())
}

/// Lazy random walk on integer tables: a uniformly chosen signed move is
/// applied when the result stays non-negative, otherwise the chain holds.
#[derive(Debug, Clone)]
pub struct TableSampler {
    current: IntTable2,
    basis: MoveBasis,
    rng: ChaCha8Rng,
}

impl TableSampler {
    /// Starts at the northwest-corner table.
    pub fn new(m: &IntMargins2, seed: u64) -> Result<Self> {
        Ok(Self {
            current: int_northwest_corner(m)?,
            basis: graver_moves(m.p(), m.q()),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn current(&self) -> &IntTable2 {
        &self.current
    }

    pub fn step(&mut self) -> &IntTable2 {
        if !self.basis.moves.is_empty() {
            let mv = self.basis.moves[self.rng.gen_range(0..self.basis.moves.len())];
            let positive = self.rng.gen_bool(0.5);
            if let Some(next) = mv.apply(&self.current, positive) {
                self.current = next;
            }
        }
        &self.current
    }
}

/// State of the lazy walk after `steps` steps from the northwest corner.
pub fn sample_table(m: &IntMargins2, steps: u64, seed: u64) -> Result<IntTable2> {
    let mut sampler = TableSampler::new(m, seed)?;
    for _ in 0..steps {
        sampler.step();
    }
    Ok(sampler.current)
}
