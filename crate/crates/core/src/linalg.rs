//! Small dense helpers: determinants with term-magnitude bounds and a rank-revealing elimination.

use crate::scalar::Real;

/// Determinant by cofactor expansion, with the permanent of `|a|` (sum of term magnitudes).
pub fn det_with_scale<T: Real>(a: &[Vec<T>]) -> (T, T) {
    let n = a.len();
    let cols: Vec<usize> = (0..n).collect();
    expand(a, 0, &cols)
}

fn expand<T: Real>(a: &[Vec<T>], row: usize, cols: &[usize]) -> (T, T) {
    if cols.is_empty() {
        return (T::one(), T::one());
    }
    let mut det = T::zero();
    let mut perm = T::zero();
    for (k, &c) in cols.iter().enumerate() {
        let x = a[row][c];
        if x == T::zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&d| d != c).collect();
        let (d, p) = expand(a, row + 1, &rest);
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        det = det + sign * x * d;
        perm = perm + x.abs() * p;
    }
    (det, perm)
}

/// Outcome of Gaussian elimination with complete pivoting.
#[derive(Debug, Clone, PartialEq)]
pub struct Elimination<T> {
    pub rank: usize,
    /// Columns that received a pivot, in pivot order.
    pub pivot_cols: Vec<usize>,
    pub pivots: Vec<T>,
    pub threshold: T,
}

/// Rank of a dense matrix (rows of equal length); pivots below `rel * max|entry|` count as zero.
pub fn eliminate<T: Real>(rows: &[Vec<T>], rel: T) -> Elimination<T> {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let max = m.iter().flatten().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let threshold = rel * max;
    let mut col_perm: Vec<usize> = (0..ncols).collect();
    let mut pivots = Vec::new();
    let mut pivot_cols = Vec::new();
    for step in 0..nrows.min(ncols) {
        let mut best = (step, step, T::zero());
        for (r, row) in m.iter().enumerate().skip(step) {
            for c in step..ncols {
                let x = row[col_perm[c]].abs();
                if x > best.2 {
                    best = (r, c, x);
                }
            }
        }
        if best.2 <= threshold || best.2 == T::zero() {
            break;
        }
        m.swap(step, best.0);
        col_perm.swap(step, best.1);
        let pc = col_perm[step];
        let p = m[step][pc];
        let pivot_row = m[step].clone();
        for row in m.iter_mut().skip(step + 1) {
            let f = row[pc] / p;
            if f != T::zero() {
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = *x - f * y;
                }
            }
        }
        pivots.push(p);
        pivot_cols.push(pc);
    }
    Elimination { rank: pivots.len(), pivot_cols, pivots, threshold }
}

/// Eigen-decomposition of a symmetric 2x2 matrix: eigenvalues (descending) and unit eigenvectors.
pub fn sym2_eigen<T: Real>(a: T, b: T, c: T) -> ([T; 2], [[T; 2]; 2]) {
    let two = T::one() + T::one();
    let mean = (a + c) / two;
    let r = ((a - c) / two).hypot(b);
    let alpha = (two * b).atan2(a - c) / two;
    ([mean + r, mean - r], [[alpha.cos(), alpha.sin()], [-alpha.sin(), alpha.cos()]])
}

/// Solves the 2x2 system `m x = r`; `None` when singular.
pub fn solve2<T: Real>(m: [[T; 2]; 2], r: [T; 2]) -> Option<[T; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == T::zero() || !det.is_finite() {
        return None;
    }
    Some([(r[0] * m[1][1] - m[0][1] * r[1]) / det, (m[0][0] * r[1] - m[1][0] * r[0]) / det])
}
