#![no_main]

use brieskorn::seifert::{normalize, BrieskornTriple};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = s.parse::<BrieskornTriple>() {
        let shown: BrieskornTriple = t.as_given().map(|x| x.to_string()).join(",").parse().expect("reparse");
        assert_eq!(shown, t);
        let _ = normalize(&t);
    }
});
