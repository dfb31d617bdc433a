//! Small dense solvers: partial-pivoting elimination over reals and
//! fraction-free (Bareiss) elimination over the integers.

use dashu_int::IBig;

use crate::hp::{abs, is_zero, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("singular linear system")]
pub struct SingularSystem;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_real(mut a: Vec<Vec<Real>>, mut b: Vec<Real>) -> Result<Vec<Real>, SingularSystem> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| abs(&a[i][k]).cmp(&abs(&a[j][k])))
            .ok_or(SingularSystem)?;
        if is_zero(&a[pivot][k]) {
            return Err(SingularSystem);
        }
        a.swap(k, pivot);
        b.swap(k, pivot);
        let (top, rest) = a.split_at_mut(k + 1);
        let pr = &top[k];
        let (bt, brest) = b.split_at_mut(k + 1);
        for (row, bi) in rest.iter_mut().zip(brest) {
            let f = &row[k] / &pr[k];
            for (x, p) in row[k..].iter_mut().zip(&pr[k..]) {
                *x -= &f * p;
            }
            *bi -= &f * &bt[k];
        }
    }
    let mut x = b.clone();
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for j in i + 1..n {
            s -= &a[i][j] * &x[j];
        }
        x[i] = s / &a[i][i];
    }
    Ok(x)
}

/// Fraction-free solve of `a x = b` over the integers.
///
/// Returns `(y, d)` with `d ≠ 0` and `a y = d b`, so `x = y / d`. Here `d`
/// is `± det a`.
pub fn bareiss_solve(mut a: Vec<Vec<IBig>>, b: Vec<IBig>) -> Result<(Vec<IBig>, IBig), SingularSystem> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    if n == 0 {
        return Ok((Vec::new(), IBig::ONE));
    }
    for (row, v) in a.iter_mut().zip(b) {
        row.push(v);
    }
    let mut prev = IBig::ONE;
    for k in 0..n {
        let pivot = (k..n).find(|&i| a[i][k] != IBig::ZERO).ok_or(SingularSystem)?;
        a.swap(k, pivot);
        let (top, rest) = a.split_at_mut(k + 1);
        let pr = &top[k];
        for row in rest.iter_mut() {
            let f = row[k].clone();
            if f == IBig::ZERO {
                // (p·a_ij − 0·a_kj) / prev
                for x in &mut row[k + 1..=n] {
                    *x = &pr[k] * &*x / &prev;
                }
            } else {
                for (x, p) in row[k + 1..=n].iter_mut().zip(&pr[k + 1..=n]) {
                    *x = (&pr[k] * &*x - &f * p) / &prev;
                }
            }
            row[k] = IBig::ZERO;
        }
        prev = a[k][k].clone();
    }
    let d = prev;
    let mut y = vec![IBig::ZERO; n];
    for i in (0..n).rev() {
        let mut s = &d * &a[i][n];
        for j in i + 1..n {
            s -= &a[i][j] * &y[j];
        }
        y[i] = s / &a[i][i];
    }
    Ok((y, d))
}

/// Integer null vector of an `r × c` matrix by fraction-free echelon
/// elimination, visiting columns in `order`.
///
/// The last column of `order` must come out free; it receives the product
/// scale `d ≠ 0` and every other free column is zero. Dependent columns late
/// in `order` are therefore the ones dropped when the kernel is larger than
/// one dimension.
pub fn bareiss_null_vector(a: &[Vec<IBig>], order: &[usize]) -> Result<Vec<IBig>, SingularSystem> {
    let r = a.len();
    let c = order.len();
    let mut m: Vec<Vec<IBig>> = a
        .iter()
        .map(|row| order.iter().map(|&j| row[j].clone()).collect())
        .collect();
    let mut prev = IBig::ONE;
    let mut pivots: Vec<usize> = Vec::new();
    let mut h = 0;
    for col in 0..c {
        if h == r {
            break;
        }
        let Some(p) = (h..r).find(|&i| m[i][col] != IBig::ZERO) else {
            continue;
        };
        m.swap(h, p);
        let (top, rest) = m.split_at_mut(h + 1);
        let pr = &top[h];
        for row in rest.iter_mut() {
            let f = std::mem::replace(&mut row[col], IBig::ZERO);
            for j in col + 1..c {
                row[j] = if f == IBig::ZERO {
                    &pr[col] * &row[j] / &prev
                } else {
                    (&pr[col] * &row[j] - &f * &pr[j]) / &prev
                };
            }
        }
        prev = m[h][col].clone();
        pivots.push(col);
        h += 1;
    }
    if pivots.last() == Some(&(c - 1)) {
        return Err(SingularSystem);
    }
    let mut v = vec![IBig::ZERO; c];
    v[c - 1] = prev;
    for (t, &col) in pivots.iter().enumerate().rev() {
        let mut s = IBig::ZERO;
        for j in col + 1..c {
            if v[j] != IBig::ZERO {
                s -= &m[t][j] * &v[j];
            }
        }
        v[col] = s / &m[t][col];
    }
    let mut out = vec![IBig::ZERO; c];
    for (pos, &j) in order.iter().enumerate() {
        out[j] = std::mem::take(&mut v[pos]);
    }
    Ok(out)
}
