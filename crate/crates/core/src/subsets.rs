//! Canonical enumeration helpers shared by the cause and explanation searches.

use itertools::Itertools;

use crate::model::Value;

/// Subsets of `items` in ascending size, each size in lexicographic order of
/// positions, up to `max` elements.
pub(crate) fn by_size<T: Clone>(items: &[T], max: usize) -> impl Iterator<Item = Vec<T>> + '_ {
    (0..=max.min(items.len())).flat_map(move |k| items.iter().cloned().combinations(k))
}

/// Every joint assignment over `ranges`, the last range varying fastest.
pub(crate) fn joint_values(ranges: Vec<&[Value]>) -> impl Iterator<Item = Vec<Value>> + '_ {
    let total: usize = ranges.iter().map(|r| r.len()).product();
    let mut digits = vec![0usize; ranges.len()];
    (0..total).map(move |_| {
        let out = digits.iter().zip(&ranges).map(|(&d, r)| r[d].clone()).collect();
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < ranges[k].len() {
                break;
            }
            digits[k] = 0;
        }
        out
    })
}
