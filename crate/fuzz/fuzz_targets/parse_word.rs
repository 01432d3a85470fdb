#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use momentkit::WeylGroup;

static GROUPS: OnceLock<Vec<WeylGroup>> = OnceLock::new();

fuzz_target!(|data: &[u8]| {
    let groups = GROUPS.get_or_init(|| ["A3", "B3", "G2"].iter().map(|t| WeylGroup::parse_type(t).unwrap()).collect());
    if let Ok(s) = std::str::from_utf8(data) {
        for g in groups {
            if let Ok(w) = g.parse_word(s) {
                // canonical words parse back to the same element
                assert_eq!(g.parse_word(&g.word(w)).unwrap(), w);
                assert!(g.word(w).len() <= s.len());
            }
        }
    }
});
