#![no_main]

use brieskorn::knots::{fox_milnor_test, IntPolynomial};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = IntPolynomial::from_json(s) {
        let _ = p.to_string();
        // A small explicit bound keeps each run short.
        let _ = fox_milnor_test(&p, Some(3));
    }
});
