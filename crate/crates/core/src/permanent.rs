//! Matrix permanents by Ryser's inclusion-exclusion formula.
//!
//! `Per(A) = (-1)^n sum_{S subset of columns} (-1)^|S| prod_i sum_{j in S} a_ij`
//!
//! Subsets are visited in reflected Gray-code order so consecutive subsets
//! differ by one column and the row sums update in `O(n)`, for `O(2^n n)`
//! work overall. The Gray sequence is cut into fixed-size chunks that are
//! summed independently and then added in chunk order, so the result does
//! not depend on the number of worker threads.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::parallel;

/// Largest matrix order accepted by [`permanent`].
pub const DEFAULT_PERMANENT_CAP: usize = 20;

/// Each chunk covers `2^CHUNK_BITS` consecutive Gray-code subsets.
const CHUNK_BITS: u32 = 12;

/// Permanent of a square complex matrix of order at most
/// [`DEFAULT_PERMANENT_CAP`]. The empty matrix has permanent 1.
pub fn permanent(a: &DMatrix<Complex64>) -> Result<Complex64> {
    permanent_with_cap(a, DEFAULT_PERMANENT_CAP)
}

pub fn permanent_with_cap(a: &DMatrix<Complex64>, cap: usize) -> Result<Complex64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(domain(format!("permanent needs a square matrix, got {}x{}", n, a.ncols())));
    }
    if n > cap {
        return Err(Error::ResourceLimit { what: "permanent order", count: n as u128, cap: cap as u128 });
    }
    Ok(ryser(a))
}

fn ryser(a: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    match n {
        0 => return Complex64::new(1.0, 0.0),
        1 => return a[(0, 0)],
        2 => return a[(0, 0)] * a[(1, 1)] + a[(0, 1)] * a[(1, 0)],
        _ => {}
    }
    // Column-major storage: column j is cols[j * n..(j + 1) * n].
    let cols = a.as_slice();
    let subsets = 1u64 << n;
    let chunk_len = 1u64 << CHUNK_BITS.min(n as u32);
    let chunks = (subsets / chunk_len) as usize;

    let partials = parallel::map_indexed(chunks, |c| {
        let lo = c as u64 * chunk_len;
        gray_chunk(cols, n, lo, lo + chunk_len)
    });
    let total: Complex64 = partials.into_iter().sum();
    if n.is_multiple_of(2) {
        total
    } else {
        -total
    }
}

/// Signed sum over Gray-code indices `lo..hi`.
fn gray_chunk(cols: &[Complex64], n: usize, lo: u64, hi: u64) -> Complex64 {
    let mut subset = lo ^ (lo >> 1);
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        if subset >> j & 1 == 1 {
            for (s, &x) in row_sums.iter_mut().zip(&cols[j * n..(j + 1) * n]) {
                *s += x;
            }
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    if subset != 0 {
        acc += signed_product(&row_sums, subset);
    }
    for k in lo + 1..hi {
        let j = k.trailing_zeros() as usize;
        subset ^= 1 << j;
        let col = &cols[j * n..(j + 1) * n];
        if subset >> j & 1 == 1 {
            for (s, &x) in row_sums.iter_mut().zip(col) {
                *s += x;
            }
        } else {
            for (s, &x) in row_sums.iter_mut().zip(col) {
                *s -= x;
            }
        }
        acc += signed_product(&row_sums, subset);
    }
    acc
}

#[inline]
fn signed_product(row_sums: &[Complex64], subset: u64) -> Complex64 {
    let prod = row_sums.iter().fold(Complex64::new(1.0, 0.0), |p, &s| p * s);
    if subset.count_ones().is_multiple_of(2) {
        prod
    } else {
        -prod
    }
}

/// Permanent of the `n x n` matrix obtained from `a` by repeating row `i`
/// `row_mult[i]` times and column `j` `col_mult[j]` times.
///
/// Copies of a repeated column are interchangeable, so Ryser's subset sum
/// collapses to a sum over how many copies `k_j` of each column are taken,
/// weighted by `prod_j C(col_mult[j], k_j)`, and the product over repeated
/// rows becomes a power:
///
/// `Per = (-1)^n sum_k (-1)^|k| prod_j C(c_j, k_j) prod_i (sum_j k_j a_ij)^(r_i)`
///
/// The `k` vectors are visited in reflected mixed-radix Gray order. The sum
/// runs over the columns or the rows, whichever gives fewer terms
/// (`Per(A) = Per(A^T)`), so the cost is `min(prod (r_i + 1), prod (c_j + 1))`
/// steps instead of `2^n`. Runs on the calling thread.
pub fn permanent_with_multiplicities(
    a: &DMatrix<Complex64>,
    row_mult: &[u32],
    col_mult: &[u32],
    cap: usize,
) -> Result<Complex64> {
    if a.nrows() != row_mult.len() || a.ncols() != col_mult.len() {
        return Err(domain(format!(
            "multiplicity lengths {}x{} do not match a {}x{} matrix",
            row_mult.len(),
            col_mult.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    let n: u64 = row_mult.iter().map(|&k| k as u64).sum();
    let n_cols: u64 = col_mult.iter().map(|&k| k as u64).sum();
    if n != n_cols {
        return Err(domain(format!("expanded matrix is {n}x{n_cols}, not square")));
    }
    if n > cap as u64 {
        return Err(Error::ResourceLimit { what: "permanent order", count: n as u128, cap: cap as u128 });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let terms = |m: &[u32]| m.iter().map(|&k| k as f64 + 1.0).product::<f64>();
    let total = if terms(col_mult) <= terms(row_mult) {
        multiset_ryser(a, row_mult, col_mult)
    } else {
        multiset_ryser(&a.transpose(), col_mult, row_mult)
    };
    Ok(if n.is_multiple_of(2) { total } else { -total })
}

/// The signed sum of [`permanent_with_multiplicities`] without the `(-1)^n`.
fn multiset_ryser(a: &DMatrix<Complex64>, row_mult: &[u32], col_mult: &[u32]) -> Complex64 {
    let rows: Vec<usize> = (0..a.nrows()).filter(|&i| row_mult[i] > 0).collect();
    let cols: Vec<usize> = (0..a.ncols()).filter(|&j| col_mult[j] > 0).collect();
    let radix: Vec<u32> = cols.iter().map(|&j| col_mult[j]).collect();
    let powers: Vec<i32> = rows.iter().map(|&i| row_mult[i] as i32).collect();
    let column = |d: usize| -> Vec<Complex64> { rows.iter().map(|&i| a[(i, cols[d])]).collect() };
    let col_data: Vec<Vec<Complex64>> = (0..cols.len()).map(column).collect();

    let mut digits = vec![0u32; cols.len()];
    let mut dir = vec![true; cols.len()];
    let mut row_sums = vec![Complex64::new(0.0, 0.0); rows.len()];
    let mut weight = 1.0f64;
    let mut odd = false;
    // The all-zero vector contributes nothing: every row sum is zero.
    let mut acc = Complex64::new(0.0, 0.0);
    while let Some(d) = (0..digits.len()).find(|&d| if dir[d] { digits[d] < radix[d] } else { digits[d] > 0 }) {
        for flip in dir.iter_mut().take(d) {
            *flip = !*flip;
        }
        let k = digits[d];
        if dir[d] {
            weight = weight * (radix[d] - k) as f64 / (k + 1) as f64;
            digits[d] = k + 1;
            for (s, &x) in row_sums.iter_mut().zip(&col_data[d]) {
                *s += x;
            }
        } else {
            weight = weight * k as f64 / (radix[d] - k + 1) as f64;
            digits[d] = k - 1;
            for (s, &x) in row_sums.iter_mut().zip(&col_data[d]) {
                *s -= x;
            }
        }
        odd = !odd;
        let prod = row_sums.iter().zip(&powers).fold(Complex64::new(1.0, 0.0), |p, (&s, &e)| p * s.powi(e));
        let term = prod * weight.round();
        if odd {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_cases() {
        assert_eq!(permanent(&DMatrix::zeros(0, 0)).unwrap(), c(1.0, 0.0));
        assert_eq!(permanent(&DMatrix::from_element(1, 1, c(2.0, -1.0))).unwrap(), c(2.0, -1.0));
        assert_eq!(permanent(&DMatrix::identity(3, 3)).unwrap(), c(1.0, 0.0));
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]).map(|x| c(x, 0.0));
        // 1(5*9+6*8) + 2(4*9+6*7) + 3(4*8+5*7)
        assert_eq!(permanent(&m).unwrap(), c(450.0, 0.0));
    }

    #[test]
    fn all_ones_is_factorial() {
        let mut fact = 1.0;
        for n in 1..=12usize {
            fact *= n as f64;
            let ones = DMatrix::from_element(n, n, c(1.0, 0.0));
            assert_eq!(permanent(&ones).unwrap(), c(fact, 0.0), "n = {n}");
        }
    }

    #[test]
    fn chunking_covers_every_subset() {
        // 14 > CHUNK_BITS, so several chunks are summed.
        let n = 14;
        let ones = DMatrix::from_element(n, n, c(1.0, 0.0));
        assert_eq!(permanent(&ones).unwrap(), c(87_178_291_200.0, 0.0));
    }

    fn expand(a: &DMatrix<Complex64>, rows: &[u32], cols: &[u32]) -> DMatrix<Complex64> {
        let r: Vec<usize> = rows.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
        let c: Vec<usize> = cols.iter().enumerate().flat_map(|(j, &k)| std::iter::repeat_n(j, k as usize)).collect();
        DMatrix::from_fn(r.len(), c.len(), |x, y| a[(r[x], c[y])])
    }

    #[test]
    fn multiplicities_match_expanded_ryser() {
        let a = DMatrix::from_fn(4, 5, |i, j| c((i * 5 + j) as f64 * 0.1 - 0.7, (i + 2 * j) as f64 * 0.05 - 0.3));
        for (rows, cols) in [
            (vec![1, 1, 1, 1], vec![1, 1, 1, 1, 0]),
            (vec![3, 0, 2, 1], vec![0, 2, 2, 1, 1]),
            (vec![0, 4, 0, 0], vec![1, 0, 3, 0, 0]),
            (vec![2, 2, 2, 1], vec![7, 0, 0, 0, 0]),
            (vec![1, 0, 0, 0], vec![0, 0, 0, 0, 1]),
        ] {
            let got = permanent_with_multiplicities(&a, &rows, &cols, 20).unwrap();
            let want = permanent(&expand(&a, &rows, &cols)).unwrap();
            assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0), "{rows:?} {cols:?}: {got} vs {want}");
        }
        let none = permanent_with_multiplicities(&a, &[0; 4], &[0; 5], 20).unwrap();
        assert_eq!(none, c(1.0, 0.0));
    }

    #[test]
    fn multiplicities_validate_input() {
        let a = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(permanent_with_multiplicities(&a, &[1, 1], &[1], 20).is_err());
        assert!(permanent_with_multiplicities(&a, &[2, 1], &[1, 1], 20).is_err());
        assert!(matches!(
            permanent_with_multiplicities(&a, &[3, 3], &[3, 3], 5),
            Err(Error::ResourceLimit { count: 6, .. })
        ));
        // All-ones 2x2 with multiplicities (3,3): 6! = 720.
        assert_eq!(permanent_with_multiplicities(&a, &[3, 3], &[3, 3], 20).unwrap(), c(720.0, 0.0));
    }

    #[test]
    fn rejects_bad_shapes_and_large_orders() {
        assert!(matches!(permanent(&DMatrix::zeros(2, 3)), Err(Error::Domain(_))));
        assert!(matches!(
            permanent_with_cap(&DMatrix::zeros(5, 5), 4),
            Err(Error::ResourceLimit { count: 5, cap: 4, .. })
        ));
    }
}
