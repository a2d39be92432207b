#![no_main]

use brieskorn::plumbing::{intersection_matrix, PlumbingGraph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = PlumbingGraph::from_json(s) {
        // Accepted graphs must round-trip and yield a symmetric form.
        let again = PlumbingGraph::from_json(&g.to_json_value().to_string()).expect("round trip");
        assert_eq!(again, g);
        assert!(intersection_matrix(&g).is_symmetric());
    }
});
