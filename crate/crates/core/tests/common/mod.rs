//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use fbl_core::NormedSpace;

/// `max_± ‖Σ ±x_j*‖` in the dual norm by plain enumeration of all `2^N`
/// sign vectors.
pub fn sign_oracle(space: &NormedSpace, atoms: &[Vec<f64>]) -> f64 {
    let n = space.dim();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << atoms.len()) {
        let mut sum = vec![0.0; n];
        for (j, a) in atoms.iter().enumerate() {
            let s = if mask >> j & 1 == 1 { -1.0 } else { 1.0 };
            for k in 0..n {
                sum[k] += s * a[k];
            }
        }
        best = best.max(space.dual_norm(&sum).unwrap());
    }
    best
}

/// `sup |f|` over the unit sphere of the dual of a planar space, on
/// `points` equally spaced angles.
pub fn planar_sup(space: &NormedSpace, points: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    (0..points)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
            let u = [t.cos(), t.sin()];
            let r = space.dual_norm(&u).unwrap();
            f(&[u[0] / r, u[1] / r]).abs()
        })
        .fold(0.0, f64::max)
}

/// Exact optimum of `min c·x` subject to `A x = b`, `x ≥ 0` over integer
/// data, by enumerating every basis. Floating point screens the bases; the
/// winner is re-solved exactly with fraction-free elimination.
/// Returns `None` when no basis is feasible.
pub fn vertex_enumeration(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> Option<f64> {
    let m = a.len();
    let n = c.len();
    let mut cols: Vec<usize> = (0..m).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        if let Some(x) = solve_f64(a, b, &cols) {
            if x.iter().all(|v| *v >= -1e-9) {
                let obj: f64 = cols.iter().zip(&x).map(|(&j, v)| c[j] as f64 * v).sum();
                if best.as_ref().is_none_or(|(v, _)| obj < *v - 1e-12 * v.abs().max(1.0)) {
                    best = Some((obj, cols.clone()));
                }
            }
        }
        if !next_combination(&mut cols, n) {
            break;
        }
    }
    let (_, basis) = best?;
    let (nums, den) = solve_exact(a, b, &basis).expect("screened basis is nonsingular");
    assert!(nums.iter().all(|v| v.signum() * den.signum() >= 0), "exact solution infeasible");
    let obj_num: i128 = basis.iter().zip(&nums).map(|(&j, v)| c[j] as i128 * v).sum();
    Some(obj_num as f64 / den as f64)
}

fn next_combination(cols: &mut [usize], n: usize) -> bool {
    let k = cols.len();
    for i in (0..k).rev() {
        if cols[i] < n - k + i {
            cols[i] += 1;
            for j in i + 1..k {
                cols[j] = cols[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn solve_f64(a: &[Vec<i64>], b: &[i64], cols: &[usize]) -> Option<Vec<f64>> {
    let m = a.len();
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = cols.iter().map(|&j| a[i][j] as f64).collect();
            row.push(b[i] as f64);
            row
        })
        .collect();
    for k in 0..m {
        let piv = (k..m).max_by(|&x, &y| t[x][k].abs().total_cmp(&t[y][k].abs()))?;
        if t[piv][k].abs() < 1e-9 {
            return None;
        }
        t.swap(k, piv);
        for i in 0..m {
            if i != k {
                let f = t[i][k] / t[k][k];
                if f != 0.0 {
                    for j in k..=m {
                        t[i][j] -= f * t[k][j];
                    }
                }
            }
        }
    }
    Some((0..m).map(|i| t[i][m] / t[i][i]).collect())
}

/// Cramer's rule with Bareiss determinants: `x_i = nums[i] / den`.
fn solve_exact(a: &[Vec<i64>], b: &[i64], cols: &[usize]) -> Option<(Vec<i128>, i128)> {
    let m = a.len();
    let base: Vec<Vec<i128>> = (0..m)
        .map(|i| cols.iter().map(|&j| a[i][j] as i128).collect())
        .collect();
    let den = bareiss_det(base.clone());
    if den == 0 {
        return None;
    }
    let nums = (0..m)
        .map(|col| {
            let mut mat = base.clone();
            for i in 0..m {
                mat[i][col] = b[i] as i128;
            }
            bareiss_det(mat)
        })
        .collect();
    Some((nums, den))
}

fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Dual norm of `a` for `ℓ_q`, written out directly.
pub fn lq_dual(q: f64, a: &[f64]) -> f64 {
    let r = if q == 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    };
    if r.is_infinite() {
        a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    } else {
        a.iter().map(|x| x.abs().powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `H_n`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|j| 1.0 / j as f64).sum()
}
