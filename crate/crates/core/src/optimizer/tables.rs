//! The predefined quantization table set searched by the global phase.

use crate::codec::QuantTable;

/// Scale factor of the finest table in a default set.
const FACTOR_FINEST: f64 = 0.02;

/// Scale factor of the coarsest table in a default set.
const FACTOR_COARSEST: f64 = 3.0;

/// Ordered list of quantization tables, finest first, elementwise
/// non-decreasing along the list.
#[derive(Debug, Clone)]
pub struct QuantTableSet {
    tables: Vec<QuantTable>,
}

impl QuantTableSet {
    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn get(&self, index: usize) -> &QuantTable {
        &self.tables[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &QuantTable> {
        self.tables.iter()
    }
}

/// Builds `n` tables by scaling the Annex K base tables along a geometric
/// factor sequence from near-lossless to coarse. Requires `n >= 2`.
pub fn build_table_set(n: usize) -> QuantTableSet {
    assert!(n >= 2, "a table set needs at least two tables");
    let ratio = (FACTOR_COARSEST / FACTOR_FINEST).powf(1.0 / (n - 1) as f64);
    let tables: Vec<QuantTable> = (0..n)
        .map(|i| QuantTable::annex_k_scaled(FACTOR_FINEST * ratio.powi(i as i32)))
        .collect();
    for pair in tables.windows(2) {
        debug_assert!(pair[1].coarser_or_equal(&pair[0]));
    }
    QuantTableSet { tables }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_tables_are_elementwise_non_decreasing() {
        let set = build_table_set(16);
        for i in 1..set.len() {
            assert!(
                set.get(i).coarser_or_equal(set.get(i - 1)),
                "table {i} not coarser than {}",
                i - 1
            );
        }
    }

    #[test]
    fn sixteen_tables_are_pairwise_distinct() {
        let set = build_table_set(16);
        for i in 0..set.len() {
            for j in (i + 1)..set.len() {
                assert_ne!(set.get(i), set.get(j), "tables {i} and {j} collide");
            }
        }
    }

    #[test]
    fn factor_zero_limit_is_all_ones() {
        let t = QuantTable::annex_k_scaled(0.0);
        for c in 0..3 {
            assert!(t.component(c).iter().all(|&v| v == 1));
        }
    }

    #[test]
    #[should_panic]
    fn single_table_set_rejected() {
        build_table_set(1);
    }
}
