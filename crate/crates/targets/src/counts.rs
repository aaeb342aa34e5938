//! Tabulated samples: integer counts on a contiguous grid spanning the
//! observed range, plus the bit-exact `x,count` CSV form.

use thiserror::Error;

/// Counts per integer on a contiguous grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    x_min: i64,
    counts: Vec<u64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountsError {
    #[error("count table needs at least one observation")]
    Empty,
    #[error("CSV line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("x values must be strictly ascending (line {line})")]
    NonAscending { line: usize },
}

impl CountTable {
    /// Build from an explicit grid starting at `x_min`. The declared grid
    /// is kept as-is (zero-count edge bins included): the grid size K
    /// enters the smoothing denominator downstream, so it is data.
    pub fn new(x_min: i64, counts: Vec<u64>) -> Result<CountTable, CountsError> {
        if counts.is_empty() || counts.iter().all(|&c| c == 0) {
            return Err(CountsError::Empty);
        }
        Ok(CountTable { x_min, counts })
    }

    /// Tabulate raw draws.
    pub fn from_draws(draws: &[i64]) -> Result<CountTable, CountsError> {
        let (&lo, &hi) = match (draws.iter().min(), draws.iter().max()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(CountsError::Empty),
        };
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for &d in draws {
            counts[(d - lo) as usize] += 1;
        }
        CountTable::new(lo, counts)
    }

    pub fn x_min(&self) -> i64 {
        self.x_min
    }

    pub fn x_max(&self) -> i64 {
        self.x_min + self.counts.len() as i64 - 1
    }

    /// Grid size K = x_max − x_min + 1.
    pub fn grid_size(&self) -> usize {
        self.counts.len()
    }

    /// Total observation count M.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, x: i64) -> u64 {
        if x < self.x_min {
            return 0;
        }
        self.counts.get((x - self.x_min) as usize).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.x_min + i as i64, c))
    }

    /// Parse the `x,count` CSV form. Rows must be ascending in x; gaps are
    /// filled with zero counts on the contiguous grid.
    pub fn from_csv(text: &str) -> Result<CountTable, CountsError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(CountsError::Empty)?;
        if header.trim() != "x,count" {
            return Err(CountsError::Csv {
                line: 1,
                reason: format!("expected header `x,count`, found `{}`", header.trim()),
            });
        }
        let mut pairs: Vec<(i64, u64)> = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1;
            let row = raw.trim();
            if row.is_empty() {
                continue;
            }
            let (xs, cs) = row.split_once(',').ok_or_else(|| CountsError::Csv {
                line,
                reason: format!("expected `x,count`, found `{row}`"),
            })?;
            let x: i64 = xs.trim().parse().map_err(|_| CountsError::Csv {
                line,
                reason: format!("bad x value `{xs}`"),
            })?;
            let c: u64 = cs.trim().parse().map_err(|_| CountsError::Csv {
                line,
                reason: format!("bad count value `{cs}`"),
            })?;
            if let Some(&(prev, _)) = pairs.last() {
                if x <= prev {
                    return Err(CountsError::NonAscending { line });
                }
            }
            pairs.push((x, c));
        }
        let (&(lo, _), &(hi, _)) = match (pairs.first(), pairs.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(CountsError::Empty),
        };
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for (x, c) in pairs {
            counts[(x - lo) as usize] = c;
        }
        CountTable::new(lo, counts)
    }

    /// Render the bit-exact CSV form: header plus one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,count\n");
        for (x, c) in self.iter() {
            out.push_str(&format!("{x},{c}\n"));
        }
        out
    }
}
