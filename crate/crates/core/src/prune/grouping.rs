use std::ops::Range;

use super::{PruneError, Result};

/// Consecutive filter groups of one layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    filters: usize,
    ranges: Vec<Range<usize>>,
}

/// Split `n` filters into `g` consecutive groups. The first `g - 1` groups
/// hold `n / g` filters each and the last one absorbs the remainder.
pub fn group_filters(n: usize, g: usize) -> Result<Grouping> {
    if g == 0 || g > n {
        return Err(PruneError::InvalidGrouping(format!("{g} groups over {n} filters")));
    }
    let size = n / g;
    let ranges = (0..g)
        .map(|k| {
            let end = if k + 1 == g { n } else { (k + 1) * size };
            k * size..end
        })
        .collect();
    Ok(Grouping { filters: n, ranges })
}

impl Grouping {
    pub fn filters(&self) -> usize {
        self.filters
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn range(&self, group: usize) -> Range<usize> {
        self.ranges[group].clone()
    }

    pub fn group_of(&self, filter: usize) -> usize {
        let size = self.ranges[0].len();
        (filter / size).min(self.ranges.len() - 1)
    }
}
