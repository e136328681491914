//! Level schedule of the recursive recovery.

use crate::error::Error;

/// Parameters of one recovery level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    /// Bound on |T| entering the level.
    pub a: f64,
    /// Bound on the residual's support outside T entering the level.
    pub b: f64,
    /// Per-sketch error budget.
    pub gamma: f64,
}

impl Level {
    /// Size T is padded to at this level.
    pub fn pad(&self) -> usize {
        self.a.ceil() as usize
    }

    fn next(&self) -> Level {
        Level {
            a: self.a / 4.0,
            b: self.b + 12.0 * (self.gamma * self.b + self.b * self.b / self.a),
            gamma: self.gamma / 2.0,
        }
    }
}

/// The levels actually run, plus the capacity of the final exact decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    levels: Vec<Level>,
    max_depth: usize,
    final_sparsity: usize,
}

pub const FIRST_GAMMA: f64 = 1.0 / 24.0;

impl Schedule {
    /// Levels continue while a_j ≥ 100·b_j, for at most ⌈log₂ log₂ n⌉ levels.
    pub fn new(n: u32, a: usize, b: usize) -> Result<Self, Error> {
        if n < 2 || a == 0 {
            return Err(Error::InvalidParameter(format!("schedule needs n >= 2 and a >= 1 (n={n}, a={a})")));
        }
        let max_depth = (n as f64).log2().log2().ceil().max(0.0) as usize;
        let mut levels = Vec::new();
        let mut cur = Level { a: a as f64, b: b as f64, gamma: FIRST_GAMMA };
        while levels.len() < max_depth && cur.a >= 100.0 * cur.b {
            levels.push(cur);
            cur = cur.next();
        }
        let final_sparsity = match levels.last() {
            Some(l) => (l.a + l.b).ceil() as usize,
            None => a + b,
        };
        Ok(Schedule { levels, max_depth, final_sparsity })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Sparsity the final decoder is sized for.
    pub fn final_sparsity(&self) -> usize {
        self.final_sparsity
    }
}
