#![no_main]

use brieskorn::exact::IntegerMatrix;
use brieskorn::json::matrix_from_str;
use brieskorn::lattice::{canonical_form, DiagonalEmbedding};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let q = IntegerMatrix::from_rows(&[
        [-1, 1, 1, 1, 0],
        [1, -3, 0, 0, 0],
        [1, 0, -4, 0, 0],
        [1, 0, 0, -3, 1],
        [0, 0, 0, 1, -2],
    ]);
    if let Ok(m) = matrix_from_str(s) {
        let _ = canonical_form(&m);
    }
    if let Ok(e) = DiagonalEmbedding::from_json(&q, s) {
        assert!(DiagonalEmbedding::new(&q, e.canonical().into_matrix()).is_ok());
    }
});
