//! Exact linear algebra kernels: fraction-free determinants, column-style
//! Hermite normal forms, Diophantine solves and rational elimination.
//!
//! Matrices are dense `Vec<Vec<T>>` in row-major order. Everything here is
//! desk-scale (rank <= 6 or so); clarity over cleverness.

use num::rational::Ratio;
use num::{One, Zero};

use crate::Scalar;

pub(crate) type Mat<T> = Vec<Vec<T>>;

pub(crate) fn identity<T: Scalar>(n: usize) -> Mat<T> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

/// Determinant by the Bareiss fraction-free algorithm. Exact: every
/// division in the update is an exact integer division.
pub(crate) fn det<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut a: Mat<T> = m.to_vec();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !a[i][k].is_zero());
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num / prev.clone();
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Column-style Hermite normal form.
///
/// Returns `(h, u, pivots)` with `h = a * u`, `u` unimodular, and `h` in
/// canonical column echelon form: each pivot is positive, entries to the
/// right of a pivot in its row are zero, entries to the left lie in
/// `[0, pivot)`. The form is unique for the column lattice of `a`, which
/// is what makes lattice bases canonical and comparable.
pub(crate) fn hnf_columns<T: Scalar>(a: &[Vec<T>]) -> (Mat<T>, Mat<T>, Vec<(usize, usize)>) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut h: Mat<T> = a.to_vec();
    let mut u = identity::<T>(cols);
    let mut pivots = Vec::new();
    let mut pc = 0usize;

    let swap_cols = |h: &mut Mat<T>, u: &mut Mat<T>, x: usize, y: usize| {
        for row in h.iter_mut() {
            row.swap(x, y);
        }
        for row in u.iter_mut() {
            row.swap(x, y);
        }
    };
    // col_j -= q * col_k
    let sub_col = |h: &mut Mat<T>, u: &mut Mat<T>, j: usize, q: &T, k: usize| {
        for row in h.iter_mut() {
            row[j] = row[j].clone() - q.clone() * row[k].clone();
        }
        for row in u.iter_mut() {
            row[j] = row[j].clone() - q.clone() * row[k].clone();
        }
    };

    for row in 0..rows {
        if pc == cols {
            break;
        }
        if (pc..cols).all(|j| h[row][j].is_zero()) {
            continue;
        }
        // Euclidean reduction across the columns of this row.
        loop {
            let mut best: Option<usize> = None;
            for j in pc..cols {
                if !h[row][j].is_zero() {
                    best = match best {
                        Some(b) if h[row][b].abs() <= h[row][j].abs() => Some(b),
                        _ => Some(j),
                    };
                }
            }
            let b = best.expect("nonzero entry exists");
            if b != pc {
                swap_cols(&mut h, &mut u, pc, b);
            }
            let mut done = true;
            for j in pc + 1..cols {
                if !h[row][j].is_zero() {
                    let q = h[row][j].clone() / h[row][pc].clone();
                    if !q.is_zero() {
                        sub_col(&mut h, &mut u, j, &q, pc);
                    }
                    if !h[row][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[row][pc].is_negative() {
            for r in h.iter_mut() {
                r[pc] = -r[pc].clone();
            }
            for r in u.iter_mut() {
                r[pc] = -r[pc].clone();
            }
        }
        // Canonical reduction of the columns left of the pivot.
        for j in 0..pc {
            let q = h[row][j].div_floor(&h[row][pc]);
            if !q.is_zero() {
                sub_col(&mut h, &mut u, j, &q, pc);
            }
        }
        pivots.push((row, pc));
        pc += 1;
    }
    (h, u, pivots)
}

/// One integer solution of `a x = b`, if any.
pub(crate) fn solve_diophantine<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let (h, u, pivots) = hnf_columns(a);
    let mut z = vec![T::zero(); cols];
    let mut piv_iter = pivots.iter().peekable();
    for row in 0..rows {
        let mut rhs = b[row].clone();
        match piv_iter.peek() {
            Some(&&(prow, pcol)) if prow == row => {
                for (j, zj) in z.iter().enumerate().take(pcol) {
                    rhs = rhs - h[row][j].clone() * zj.clone();
                }
                let (q, rem) = rhs.div_rem(&h[row][pcol]);
                if !rem.is_zero() {
                    return None;
                }
                z[pcol] = q;
                piv_iter.next();
            }
            _ => {
                for (j, zj) in z.iter().enumerate() {
                    rhs = rhs - h[row][j].clone() * zj.clone();
                }
                if !rhs.is_zero() {
                    return None;
                }
            }
        }
    }
    let mut x = vec![T::zero(); cols];
    for (i, xi) in x.iter_mut().enumerate() {
        for (j, zj) in z.iter().enumerate() {
            *xi = xi.clone() + u[i][j].clone() * zj.clone();
        }
    }
    Some(x)
}

/// gcd of all maximal (k x k) minors of an n x k matrix, k <= n.
/// Value 1 means the columns span a saturated sublattice with themselves
/// as basis, i.e. the spanned facet is smooth.
pub(crate) fn gcd_max_minors<T: Scalar>(a: &[Vec<T>], k: usize) -> T {
    let n = a.len();
    debug_assert!(k <= n);
    let mut g = T::zero();
    let mut rows: Vec<usize> = (0..k).collect();
    loop {
        let sub: Mat<T> = rows.iter().map(|&r| a[r].clone()).collect();
        g = g.gcd(&det(&sub));
        if g.is_one() {
            return g;
        }
        // next k-combination of 0..n
        let mut i = k;
        loop {
            if i == 0 {
                return g;
            }
            i -= 1;
            if rows[i] != i + n - k {
                rows[i] += 1;
                for j in i + 1..k {
                    rows[j] = rows[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Unique rational solution of `a x = b` (rows >= cols). `None` when the
/// system is inconsistent or the solution is not unique.
pub(crate) fn solve_unique<T: Scalar>(
    a: &[Vec<Ratio<T>>],
    b: &[Ratio<T>],
) -> Option<Vec<Ratio<T>>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Ratio<T>>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_rows = Vec::with_capacity(cols);
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            return None; // rank-deficient column: solution not unique
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for j in c..=cols {
            m[r][j] = m[r][j].clone() / inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    m[i][j] = m[i][j].clone() - f.clone() * m[r][j].clone();
                }
            }
        }
        pivot_rows.push(r);
        r += 1;
    }
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return None; // inconsistent
        }
    }
    Some((0..cols).map(|c| m[pivot_rows[c]][cols].clone()).collect())
}

/// A nonzero kernel vector of `a` (rows x n), provided the kernel is
/// exactly one-dimensional.
pub(crate) fn kernel_vector<T: Scalar>(a: &[Vec<Ratio<T>>]) -> Option<Vec<Ratio<T>>> {
    let rows = a.len();
    let n = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Ratio<T>>> = a.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for c in 0..n {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for j in c..n {
            m[r][j] = m[r][j].clone() / inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..n {
                    m[i][j] = m[i][j].clone() - f.clone() * m[r][j].clone();
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    if free.len() != 1 {
        return None;
    }
    let fc = free[0];
    let mut v = vec![Ratio::zero(); n];
    v[fc] = Ratio::one();
    for &(pr, pc) in pivots.iter() {
        v[pc] = -m[pr][fc].clone();
    }
    Some(v)
}
