//! Built-in example jobs, shipped as job files rather than precomputed
//! results; their expected outcomes are asserted by the test suite.

/// Names and TOML sources of the built-in jobs.
pub const ENTRIES: [(&str, &str); 5] = [
    ("klein-pgl27", include_str!("catalog/klein-pgl27.toml")),
    ("pgl25-245", include_str!("catalog/pgl25-245.toml")),
    ("pgl25-245-lift", include_str!("catalog/pgl25-245-lift.toml")),
    ("psl27-334", include_str!("catalog/psl27-334.toml")),
    ("pgl27-238", include_str!("catalog/pgl27-238.toml")),
];

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(name, _)| *name).collect()
}

pub fn job(name: &str) -> Option<&'static str> {
    ENTRIES
        .iter()
        .find(|(entry, _)| *entry == name)
        .map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::job::parse_job;

    #[test]
    fn every_catalog_entry_parses() {
        for (name, text) in ENTRIES {
            parse_job(text).unwrap_or_else(|e| panic!("catalog entry {name}: {e}"));
        }
    }
}
