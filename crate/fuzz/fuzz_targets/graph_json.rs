#![no_main]

use libfuzzer_sys::fuzz_target;
use momentkit::graph::MomentGraph;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = MomentGraph::from_json(s) {
            let again = MomentGraph::from_json(&g.to_json()).unwrap();
            assert_eq!(again.to_json(), g.to_json());
            let _ = g.to_dot();
        }
    }
});
