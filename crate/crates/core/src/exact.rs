//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers or rationals;
//! there is no floating point anywhere in this module.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from machine-integer rows. Panics on ragged input;
    /// intended for literals.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "ragged matrix literal");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    /// Fallible variant of [`IntegerMatrix::from_rows`] for untrusted input.
    pub fn try_from_rows(rows: &[Vec<BigInt>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rows as machine integers, if every entry fits.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::invalid("matrix shapes do not agree for product"));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::invalid("vector length does not match matrix"));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Quadratic form value vᵗ·M·v.
    pub fn quadratic(&self, v: &[BigInt]) -> Result<BigInt> {
        let mv = self.mul_vec(v)?;
        Ok(v.iter().zip(&mv).map(|(a, b)| a * b).sum())
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::invalid("determinant of a non-square matrix"));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| {
                self.row(i)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            }))
            .finish()
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.data.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for i in 0..self.rows {
            let line: Vec<String> = self
                .row(i)
                .iter()
                .map(|x| format!("{x:>width$}"))
                .collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// Longest continued fraction expansion produced before giving up.
pub const MAX_CF_LEN: usize = 1 << 16;

/// Negative (Hirzebruch–Jung) continued fraction of `alpha / beta`.
///
/// Returns `[x1, .., xk]`, each `>= 2`, with
/// `alpha / beta = x1 - 1/(x2 - 1/(... - 1/xk))`.
pub fn neg_continued_fraction<T>(alpha: T, beta: T) -> Result<Vec<T>>
where
    T: Integer + Clone + fmt::Display,
{
    if !(T::zero() < beta && beta < alpha) {
        if beta == T::one() && alpha == T::one() {
            return Err(Error::invalid("continued fraction of 1/1 has no entries >= 2"));
        }
        return Err(Error::invalid(format!(
            "continued fraction needs 0 < beta < alpha, got {alpha}/{beta}"
        )));
    }
    if !alpha.gcd(&beta).is_one() {
        return Err(Error::invalid(format!("{alpha} and {beta} are not coprime")));
    }
    let (mut a, mut b) = (alpha, beta);
    let mut out = Vec::new();
    loop {
        let (q, r) = a.div_rem(&b);
        if r.is_zero() {
            out.push(q);
            return Ok(out);
        }
        let x = q + T::one();
        let next = x.clone() * b.clone() - a;
        out.push(x);
        if out.len() >= MAX_CF_LEN {
            return Err(Error::invalid(format!("continued fraction longer than {MAX_CF_LEN} entries")));
        }
        a = b;
        b = next;
    }
}

/// Evaluates `x1 - 1/(x2 - 1/(...))` exactly.
pub fn eval_neg_continued_fraction(entries: &[BigInt]) -> Option<Rational> {
    let mut acc: Option<Rational> = None;
    for x in entries.iter().rev() {
        let x = Rational::from_integer(x.clone());
        acc = Some(match acc {
            None => x,
            Some(tail) if tail.is_zero() => return None,
            Some(tail) => x - tail.recip(),
        });
    }
    acc
}

/// Inertia of a real symmetric form: counts of positive, negative and
/// zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }

    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }

    pub fn is_negative_definite(&self) -> bool {
        self.positive == 0 && self.zero == 0
    }
}

/// Exact inertia by symmetric congruence diagonalization over the rationals.
///
/// A zero diagonal with a nonzero off-diagonal entry `q_ij` is repaired by
/// adding row/column `j` to row/column `i`, which makes the new diagonal
/// entry `2 q_ij` when both diagonals vanish.
pub fn signature(q: &IntegerMatrix) -> Result<Inertia> {
    if !q.is_symmetric() {
        return Err(Error::invalid("signature requires a symmetric matrix"));
    }
    let rows = q.to_rows();
    // Machine-width fractions first; any overflow falls back to big ones.
    let small: Option<Vec<Vec<Ratio<i128>>>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128().map(Ratio::from_integer)).collect())
        .collect();
    if let Some(inertia) = small.and_then(congruence_inertia) {
        return Ok(inertia);
    }
    big_inertia(rows.into_iter().map(|r| r.into_iter().map(Rational::from_integer).collect()).collect())
}

/// [`signature`] for a symmetric matrix given as machine-integer rows,
/// skipping the big-integer representation.
pub(crate) fn signature_i64(rows: &[Vec<i64>]) -> Result<Inertia> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) || (0..n).any(|i| (0..i).any(|j| rows[i][j] != rows[j][i])) {
        return Err(Error::invalid("signature requires a symmetric matrix"));
    }
    let small = rows
        .iter()
        .map(|r| r.iter().map(|&x| Ratio::from_integer(x as i128)).collect())
        .collect();
    if let Some(inertia) = congruence_inertia(small) {
        return Ok(inertia);
    }
    big_inertia(
        rows.iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect(),
    )
}

fn big_inertia(a: Vec<Vec<Rational>>) -> Result<Inertia> {
    congruence_inertia(a).ok_or_else(|| Error::internal("exact elimination overflowed"))
}

/// Field operations that may refuse (overflow) instead of wrapping.
trait CheckedField: Clone + Zero {
    fn add_c(&self, o: &Self) -> Option<Self>;
    fn sub_c(&self, o: &Self) -> Option<Self>;
    fn mul_c(&self, o: &Self) -> Option<Self>;
    fn div_c(&self, o: &Self) -> Option<Self>;
    fn positive(&self) -> bool;
}

impl CheckedField for Rational {
    fn add_c(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub_c(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul_c(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_c(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn positive(&self) -> bool {
        self.is_positive()
    }
}

impl CheckedField for Ratio<i128> {
    fn add_c(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub_c(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul_c(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div_c(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn positive(&self) -> bool {
        *self.numer() > 0
    }
}

/// Symmetric elimination; `None` when an operation overflowed.
fn congruence_inertia<T: CheckedField>(mut a: Vec<Vec<T>>) -> Option<Inertia> {
    let n = a.len();
    let mut inertia = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for k in 0..n {
        if let Some(i) = (k..n).find(|&i| !a[i][i].is_zero()) {
            sym_swap(&mut a, i, k);
        } else {
            let off = (k..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_zero());
            match off {
                None => {
                    inertia.zero += n - k;
                    break;
                }
                Some((i, j)) => {
                    // row_i += row_j, then col_i += col_j
                    for c in k..n {
                        a[i][c] = a[i][c].add_c(&a[j][c])?;
                    }
                    for r in k..n {
                        a[r][i] = a[r][i].add_c(&a[r][j])?;
                    }
                    sym_swap(&mut a, i, k);
                }
            }
        }
        let pivot = a[k][k].clone();
        debug_assert!(!pivot.is_zero());
        if pivot.positive() {
            inertia.positive += 1;
        } else {
            inertia.negative += 1;
        }
        // Only the nonzero part of the pivot row contributes, so sparse
        // forms (plumbings, torus knot Seifert forms) stay cheap.
        let support: Vec<usize> = (k + 1..n).filter(|&j| !a[k][j].is_zero()).collect();
        for (x, &i) in support.iter().enumerate() {
            let f = a[i][k].div_c(&pivot)?;
            for &j in &support[x..] {
                let v = a[i][j].sub_c(&f.mul_c(&a[k][j])?)?;
                a[j][i] = v.clone();
                a[i][j] = v;
            }
        }
        for i in k + 1..n {
            a[i][k] = T::zero();
            a[k][i] = T::zero();
        }
    }
    Some(inertia)
}

fn sym_swap<T>(a: &mut [Vec<T>], i: usize, k: usize) {
    if i == k {
        return;
    }
    a.swap(i, k);
    for row in a.iter_mut() {
        row.swap(i, k);
    }
}

/// Solves `Q x = b` over the integers for a unimodular `Q`.
pub fn solve_unimodular(q: &IntegerMatrix, b: &[BigInt]) -> Result<Vec<BigInt>> {
    if !q.is_square() || b.len() != q.rows() {
        return Err(Error::invalid("solve_unimodular: shape mismatch"));
    }
    let det = q.determinant()?;
    if det.abs() != BigInt::one() {
        return Err(Error::NotUnimodular(det));
    }
    let n = q.rows();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            q.row(i)
                .iter()
                .cloned()
                .chain(std::iter::once(b[i].clone()))
                .map(Rational::from_integer)
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .find(|&i| !a[i][k].is_zero())
            .ok_or_else(|| Error::internal("unimodular matrix reported singular"))?;
        a.swap(p, k);
        let pivot = a[k][k].clone();
        for c in k..=n {
            let v = &a[k][c] / &pivot;
            a[k][c] = v;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for c in k..=n {
                let v = &f * &a[k][c];
                a[i][c] -= v;
            }
        }
    }
    let x: Vec<BigInt> = a
        .iter()
        .map(|row| {
            let v = &row[n];
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(Error::internal("non-integral solution for unimodular system"))
            }
        })
        .collect::<Result<_>>()?;
    if q.mul_vec(&x)? != b {
        return Err(Error::internal("solve_unimodular residual is nonzero"));
    }
    Ok(x)
}

/// Solves `Q w = d (mod 2)` for a matrix with odd determinant.
pub fn solve_mod2(q: &IntegerMatrix, d: &[bool]) -> Result<Vec<bool>> {
    if !q.is_square() || d.len() != q.rows() {
        return Err(Error::invalid("solve_mod2: shape mismatch"));
    }
    let n = q.rows();
    let mut a: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            q.row(i)
                .iter()
                .map(BigInt::is_odd)
                .chain(std::iter::once(d[i]))
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| a[i][k]).ok_or(Error::EvenDeterminant)?;
        a.swap(p, k);
        for i in 0..n {
            if i != k && a[i][k] {
                for c in k..=n {
                    let v = a[k][c];
                    a[i][c] ^= v;
                }
            }
        }
    }
    let w: Vec<bool> = a.iter().map(|r| r[n]).collect();
    for i in 0..n {
        let lhs = q
            .row(i)
            .iter()
            .zip(&w)
            .filter(|(x, &wi)| wi && x.is_odd())
            .count()
            % 2
            == 1;
        if lhs != d[i] {
            return Err(Error::internal("solve_mod2 residual is nonzero"));
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::q345;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }


    fn gamma_prime(m: i64) -> IntegerMatrix {
        IntegerMatrix::from_rows(&[
            [0, 1, 1, 1],
            [1, 2 * m - 1, 0, 0],
            [1, 0, -m, 0],
            [1, 0, 0, 2 * m + 1],
        ])
    }

    /// Cofactor-expansion determinant, independent of Bareiss.
    fn cofactor_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn continued_fraction_examples() {
        assert_eq!(neg_continued_fraction(5i64, 2).unwrap(), vec![3, 2]);
        assert_eq!(neg_continued_fraction(2i64, 1).unwrap(), vec![2]);
        assert_eq!(neg_continued_fraction(5i64, 4).unwrap(), vec![2, 2, 2, 2]);
        // 2 - 1/(2 - 1/(2 - 1/2)) evaluated by hand
        let r = eval_neg_continued_fraction(&big(&[2, 2, 2, 2])).unwrap();
        assert_eq!(r, Rational::new(5.into(), 4.into()));
    }

    #[test]
    fn continued_fraction_rejects_bad_input() {
        assert!(neg_continued_fraction(5i64, 5).is_err());
        assert!(neg_continued_fraction(5i64, 0).is_err());
        assert!(neg_continued_fraction(6i64, 4).is_err());
        assert!(neg_continued_fraction(3i64, 7).is_err());
        assert!(neg_continued_fraction(1i64, 1).is_err());
    }

    #[test]
    fn continued_fraction_bigint() {
        let a: BigInt = "300000000000000000000000000001".parse().unwrap();
        let b = BigInt::from(3);
        let cf = neg_continued_fraction(a.clone(), b.clone()).unwrap();
        assert_eq!(eval_neg_continued_fraction(&cf).unwrap(), Rational::new(a, b));
    }

    #[test]
    fn signature_q345_matches_minor_oracle() {
        let q = q345();
        let rows = q.to_i64_rows().unwrap();
        // Sylvester: negative definite iff (-1)^k D_k > 0 for every leading minor.
        for k in 1..=5 {
            let minor: Vec<Vec<i64>> = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
            let d = cofactor_det(&minor);
            assert!(if k % 2 == 0 { d > 0 } else { d < 0 }, "minor {k} = {d}");
        }
        let s = signature(&q).unwrap();
        assert_eq!((s.positive, s.negative, s.zero), (0, 5, 0));
    }

    #[test]
    fn signature_indefinite_with_zero_pivot() {
        let s = signature(&gamma_prime(2)).unwrap();
        assert_eq!((s.positive, s.negative, s.zero), (2, 2, 0));
        assert_eq!(s.signature(), 0);
        for m in 2..12 {
            assert_eq!(signature(&gamma_prime(m)).unwrap().signature(), 0);
        }
    }

    #[test]
    fn signature_trivial_cases() {
        let s = signature(&IntegerMatrix::identity(3).neg()).unwrap();
        assert_eq!((s.positive, s.negative, s.zero), (0, 3, 0));
        let z = signature(&IntegerMatrix::zeros(2, 2)).unwrap();
        assert_eq!((z.positive, z.negative, z.zero), (0, 0, 2));
        let h = signature(&IntegerMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap();
        assert_eq!((h.positive, h.negative, h.zero), (1, 1, 0));
        assert!(signature(&IntegerMatrix::from_rows(&[[0, 1], [2, 0]])).is_err());
    }

    #[test]
    fn determinant_matches_cofactor() {
        let q = q345();
        assert_eq!(q.determinant().unwrap(), BigInt::from(cofactor_det(&q.to_i64_rows().unwrap())));
        assert_eq!(gamma_prime(3).determinant().unwrap(), BigInt::from(1));
    }

    #[test]
    fn solve_unimodular_fixed_sphere_system() {
        let x = solve_unimodular(&q345(), &big(&[0, 0, 1, 0, 0])).unwrap();
        let abs: Vec<BigInt> = x.iter().map(|v| v.abs()).collect();
        assert_eq!(abs, big(&[15, 5, 4, 6, 3]));
        let zero = solve_unimodular(&q345(), &big(&[0; 5])).unwrap();
        assert!(zero.iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_unimodular_rejects_non_unimodular() {
        let q = IntegerMatrix::from_rows(&[[2, 0], [0, 1]]);
        assert_eq!(
            solve_unimodular(&q, &big(&[1, 1])),
            Err(Error::NotUnimodular(BigInt::from(2)))
        );
    }

    #[test]
    fn solve_mod2_examples() {
        let d = [false, true, false, true];
        let w = solve_mod2(&gamma_prime(2), &d).unwrap();
        assert_eq!(w, vec![false, true, false, true]);
        // exhaustive uniqueness over all 16 vectors
        let q = gamma_prime(2).to_i64_rows().unwrap();
        let sols: Vec<u32> = (0..16u32)
            .filter(|mask| {
                (0..4).all(|i| {
                    let s: i64 = (0..4).filter(|j| mask >> j & 1 == 1).map(|j| q[i][j]).sum();
                    (s.rem_euclid(2) == 1) == d[i]
                })
            })
            .collect();
        assert_eq!(sols, vec![0b1010]);
        assert_eq!(solve_mod2(&gamma_prime(2), &[false; 4]).unwrap(), vec![false; 4]);
        let even = IntegerMatrix::from_rows(&[[2, 1], [1, 2]]).neg();
        assert!(solve_mod2(&IntegerMatrix::from_rows(&[[2, 0], [0, 1]]), &[true, true]).is_err());
        assert!(solve_mod2(&even, &[false, false]).is_ok());
    }

    #[test]
    fn continued_fraction_length_is_capped() {
        let n = 1i64 << 20;
        assert!(neg_continued_fraction(n + 1, n).is_err());
    }

    fn random_matrix(rng: &mut impl rand::Rng, n: usize, range: i64) -> IntegerMatrix {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-range..=range)).collect()).collect();
        IntegerMatrix::from_rows(&rows)
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(1000))]

        #[test]
        fn continued_fraction_reevaluates(alpha in 2i64..100_000, beta_seed in 1i64..100_000) {
            let beta = 1 + beta_seed % (alpha - 1);
            proptest::prop_assume!(num_integer::gcd(alpha, beta) == 1);
            let cf = neg_continued_fraction(alpha, beta).unwrap();
            proptest::prop_assert!(cf.iter().all(|&x| x >= 2));
            let big_cf: Vec<BigInt> = cf.iter().map(|&x| BigInt::from(x)).collect();
            proptest::prop_assert_eq!(
                eval_neg_continued_fraction(&big_cf).unwrap(),
                Rational::new(alpha.into(), beta.into())
            );
        }
    }

    fn big_path(rows: &[Vec<i64>]) -> Inertia {
        big_inertia(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn machine_path_overflow_falls_back() {
        let m = i64::MAX;
        let rows = vec![vec![m, m - 1, 3], vec![m - 1, m - 2, m], vec![3, m, -m]];
        assert!(congruence_inertia(
            rows.iter()
                .map(|r| r.iter().map(|&x| Ratio::from_integer(x as i128)).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        )
        .is_none());
        assert_eq!(signature_i64(&rows).unwrap(), big_path(&rows));
        assert_eq!(signature(&IntegerMatrix::from_rows(&rows)).unwrap(), big_path(&rows));
        assert!(signature_i64(&[vec![1, 2], vec![3, 1]]).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(300))]

        #[test]
        fn machine_path_matches_big_path(seed in proptest::prelude::any::<u64>(), n in 1usize..7, wide in proptest::prelude::any::<bool>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let range = if wide { i64::MAX } else { 3 };
            let mut rows = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in i..n {
                    // sparse, so zero pivots and the repair step occur
                    let x = if rng.gen_bool(0.4) { 0 } else { rng.gen_range(-range..=range) };
                    rows[i][j] = x;
                    rows[j][i] = x;
                }
            }
            let expected = big_path(&rows);
            proptest::prop_assert_eq!(signature_i64(&rows).unwrap(), expected);
            proptest::prop_assert_eq!(signature(&IntegerMatrix::from_rows(&rows)).unwrap(), expected);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(200))]

        #[test]
        fn inertia_is_congruence_invariant(seed in proptest::prelude::any::<u64>(), n in 1usize..7) {
            use rand::SeedableRng;
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n, 4);
            let q = a.transpose().mul(&a).unwrap().neg();
            let q = {
                // symmetric with mixed signs
                let d = random_matrix(&mut rng, n, 3);
                let dd = d.transpose().mul(&d).unwrap();
                let mut m = q.clone();
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = &q[(i, j)] + &dd[(i, j)];
                    }
                }
                m
            };
            let g = loop {
                let g = random_matrix(&mut rng, n, 3);
                if !g.determinant().unwrap().is_zero() {
                    break g;
                }
            };
            let moved = g.transpose().mul(&q).unwrap().mul(&g).unwrap();
            proptest::prop_assert_eq!(signature(&q).unwrap(), signature(&moved).unwrap());
            let s = signature(&q).unwrap();
            proptest::prop_assert_eq!(s.positive + s.negative + s.zero, n);
            proptest::prop_assert_eq!(s.zero == 0, !q.determinant().unwrap().is_zero());
        }

        #[test]
        fn solve_mod2_matches_exhaustion(seed in proptest::prelude::any::<u64>(), n in 1usize..=8) {
            use rand::SeedableRng;
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut q = random_matrix(&mut rng, n, 3);
            for i in 0..n {
                for j in 0..i {
                    let v = q[(i, j)].clone();
                    q[(j, i)] = v;
                }
            }
            let qi = q.to_i64_rows().unwrap();
            let d: Vec<bool> = (0..n).map(|i| qi[i][i].rem_euclid(2) == 1).collect();
            let sols: Vec<u32> = (0..1u32 << n)
                .filter(|m| {
                    (0..n).all(|i| {
                        let s: i64 = (0..n).filter(|j| m >> j & 1 == 1).map(|j| qi[i][j]).sum();
                        (s.rem_euclid(2) == 1) == d[i]
                    })
                })
                .collect();
            let odd = q.determinant().unwrap().is_odd();
            match solve_mod2(&q, &d) {
                Ok(w) => {
                    proptest::prop_assert!(odd);
                    let mask: u32 = (0..n).filter(|&i| w[i]).map(|i| 1 << i).sum();
                    proptest::prop_assert_eq!(sols, vec![mask]);
                }
                Err(_) => proptest::prop_assert!(!odd),
            }
        }
    }
}
