#![no_main]

use brieskorn::seifert::SeifertData;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(d) = SeifertData::from_json(s) {
        let _ = d.euler_number();
        let _ = d.is_normalized();
    }
});
