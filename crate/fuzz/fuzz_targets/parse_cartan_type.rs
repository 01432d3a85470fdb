#![no_main]

use libfuzzer_sys::fuzz_target;
use momentkit::WeylGroup;

fuzz_target!(|data: &[u8]| {
    if data.len() < 16 {
        if let Ok(s) = std::str::from_utf8(data) {
            if let Ok(g) = WeylGroup::parse_type(s) {
                assert_eq!(g.length(g.longest()) as usize, g.reflections().len());
            }
        }
    }
});
