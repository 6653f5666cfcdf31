//! Attribute-pattern mining over curated combinations and the three
//! candidate generators (random, cid-based, pattern-based).

mod patterns;
mod selectors;

pub use patterns::{
    count_patterns, extract_patterns, load_pattern_table, save_pattern_table, slot_of,
    AttributePattern, PatternKey, PatternTable, Slot,
};
pub use selectors::{select_cid, select_pattern, select_random, Method};

#[cfg(test)]
mod tests;
