//! Matrices printed in the worked examples, shared by unit tests.

use crate::exact::IntegerMatrix;

pub(crate) fn q345() -> IntegerMatrix {
    IntegerMatrix::from_rows(&[
        [-1, 1, 1, 1, 0],
        [1, -3, 0, 0, 0],
        [1, 0, -4, 0, 0],
        [1, 0, 0, -3, 1],
        [0, 0, 0, 1, -2],
    ])
}

/// Diagonalizing matrix for Σ(3,4,5); column j is F_j in the diagonal basis.
pub(crate) fn c_inv_345() -> IntegerMatrix {
    IntegerMatrix::from_rows(&[
        [1, -1, -1, -1, 0],
        [0, 0, 1, 0, -1],
        [0, 1, -1, 0, 0],
        [0, 1, 0, -1, 0],
        [0, 0, 1, -1, 1],
    ])
}

pub(crate) fn q358() -> IntegerMatrix {
    IntegerMatrix::from_rows(&[
        [-1, 1, 0, 1, 1],
        [1, -2, 1, 0, 0],
        [0, 1, -2, 0, 0],
        [1, 0, 0, -5, 0],
        [1, 0, 0, 0, -8],
    ])
}

pub(crate) fn c_inv_358() -> IntegerMatrix {
    IntegerMatrix::from_rows(&[
        [1, -1, 0, -1, -1],
        [0, 1, -1, -1, -1],
        [0, 0, 1, -1, -1],
        [0, 0, 0, -1, 2],
        [0, 0, 0, -1, 1],
    ])
}
