//! Minimal dense linear algebra for the small (k <= 4) systems that show up
//! in the regression code. Matrices are row-major `Vec<Vec<f64>>`.

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot is zero to machine precision.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if !m[pivot_row][col].is_finite() || m[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Invert a square matrix column by column. `None` if singular.
pub fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve(a, &e)?);
    }
    // cols[j][i] is the (i, j) entry of the inverse
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// Lower-triangular Cholesky factor of a symmetric positive semi-definite
/// matrix. A small jitter `1e-12 * trace` is added to the diagonal (and
/// escalated a few times) when the factorization stalls on a semi-definite
/// input. An all-zero matrix factors to the zero matrix.
pub fn cholesky_psd(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let trace: f64 = (0..n).map(|i| a[i][i]).sum();
    if a.iter().flatten().all(|&v| v == 0.0) {
        return Some(vec![vec![0.0; n]; n]);
    }
    let mut jitter = 1e-12 * trace.abs();
    for attempt in 0..7 {
        let eps = if attempt == 0 { 0.0 } else { jitter };
        if let Some(l) = cholesky_strict(a, eps) {
            return Some(l);
        }
        if attempt > 0 {
            jitter *= 10.0;
        }
    }
    None
}

fn cholesky_strict(a: &[Vec<f64>], eps: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j] + if i == j { eps } else { 0.0 };
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum < 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else if l[j][j] == 0.0 {
                // semi-definite direction: consistent only if sum is 0 too
                if sum.abs() > eps.max(1e-300) {
                    return None;
                }
                l[i][j] = 0.0;
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

/// `y = L x` for lower-triangular `L`.
pub fn lower_tri_mul(l: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let n = l.len();
    (0..n)
        .map(|i| (0..=i).map(|k| l[i][k] * x[k]).sum())
        .collect()
}

/// Allocation-free 4x4 solve with partial pivoting, for hot loops.
pub fn solve4(a: &[[f64; 4]; 4], b: &[f64; 4]) -> Option<[f64; 4]> {
    let mut m = [[0.0; 5]; 4];
    for i in 0..4 {
        m[i][..4].copy_from_slice(&a[i]);
        m[i][4] = b[i];
    }
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if !m[pivot][col].is_finite() || m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            for k in col..5 {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut acc = m[row][4];
        for k in row + 1..4 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}
