#![no_main]

use libfuzzer_sys::fuzz_target;
use momentkit_cli::config;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(map) = config::parse(s) {
            assert!(map.keys().all(|k| config::KEYS.contains(&k.as_str())));
        }
    }
});
