use crate::error::{Error, Result};

/// Resource guard on the number of deterministic strategies.
pub const MAX_STRATEGIES: u64 = 1 << 20;

/// All deterministic response functions λ: x ↦ a. Row λ lists the outcome for
/// each setting; λ enumerates outcome tuples in base-O order with setting 0
/// as the least significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyTable {
    pub settings: usize,
    pub outcomes: usize,
    pub table: Vec<Vec<u8>>,
}

impl StrategyTable {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// D(a|x, λ)
    pub fn response(&self, lambda: usize, x: usize) -> usize {
        self.table[lambda][x] as usize
    }
}

pub fn deterministic_strategies(settings: usize, outcomes: usize) -> Result<StrategyTable> {
    if settings == 0 || outcomes == 0 || outcomes > u8::MAX as usize + 1 {
        return Err(Error::InvalidMeasurement(format!(
            "{settings} settings with {outcomes} outcomes"
        )));
    }
    let count = (outcomes as u128)
        .checked_pow(settings as u32)
        .unwrap_or(u128::MAX);
    if count > MAX_STRATEGIES as u128 {
        return Err(Error::SizeExceeded {
            count,
            limit: MAX_STRATEGIES,
        });
    }
    let table = (0..count as usize)
        .map(|mut l| {
            (0..settings)
                .map(|_| {
                    let a = (l % outcomes) as u8;
                    l /= outcomes;
                    a
                })
                .collect()
        })
        .collect();
    Ok(StrategyTable {
        settings,
        outcomes,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        assert_eq!(deterministic_strategies(1, 2).unwrap().len(), 2);
        assert_eq!(deterministic_strategies(10, 2).unwrap().len(), 1024);
        assert_eq!(deterministic_strategies(3, 3).unwrap().len(), 27);
        assert!(matches!(
            deterministic_strategies(21, 2),
            Err(Error::SizeExceeded { count: 2097152, .. })
        ));
        assert!(matches!(
            deterministic_strategies(200, 2),
            Err(Error::SizeExceeded { .. })
        ));
    }

    #[test]
    fn exhaustive_and_distinct() {
        let t = deterministic_strategies(4, 3).unwrap();
        let set: HashSet<_> = t.table.iter().cloned().collect();
        assert_eq!(set.len(), 81);
        assert!(t
            .table
            .iter()
            .all(|row| row.len() == 4 && row.iter().all(|&a| a < 3)));
    }
}
