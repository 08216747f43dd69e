//! Dense linear algebra: symmetric eigenvalues, singular values, exact rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues of a symmetric row-major `n x n` matrix, in descending order.
///
/// Householder reduction to tridiagonal form followed by implicit QL with
/// Wilkinson shifts. An off-diagonal element is treated as zero once it drops
/// below machine epsilon relative to its neighbouring diagonal entries or to
/// the norm of the tridiagonal matrix.
pub fn sym_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = a.to_vec();
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(d)
}

/// Returns `(diagonal, subdiagonal)` with `e[i]` coupling rows `i - 1, i`.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let idx = |i: usize, j: usize| i * n + j;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[idx(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[idx(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[idx(j, k)] -= f * e[k] + g * a[idx(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        let _ = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[idx(i, i)];
    }
    (d, e)
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let norm = d.iter().zip(e.iter()).fold(0.0f64, |m, (x, y)| m.max(x.abs() + y.abs()));
    let floor = f64::EPSILON * norm;
    let mut total = 0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            total += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::EigenNoConvergence { iterations: total });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Singular values (descending) of a row-major `rows x cols` matrix.
///
/// Symmetric input uses `|eig(M)|`; otherwise the eigenvalues of the smaller
/// Gram matrix.
pub fn singular_values(a: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), rows * cols);
    if rows == cols && is_symmetric(a, rows) {
        let mut s: Vec<f64> = sym_eigenvalues(a, rows)?.into_iter().map(f64::abs).collect();
        s.sort_by(|x, y| y.partial_cmp(x).unwrap());
        return Ok(s);
    }
    let (k, gram) = if cols <= rows {
        let mut g = vec![0.0; cols * cols];
        for r in 0..rows {
            let row = &a[r * cols..(r + 1) * cols];
            for i in 0..cols {
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..cols {
                    g[i * cols + j] += row[i] * row[j];
                }
            }
        }
        (cols, g)
    } else {
        let mut g = vec![0.0; rows * rows];
        for i in 0..rows {
            for j in 0..rows {
                g[i * rows + j] =
                    (0..cols).map(|c| a[i * cols + c] * a[j * cols + c]).sum();
            }
        }
        (rows, g)
    };
    let mut s: Vec<f64> = sym_eigenvalues(&gram, k)?.into_iter().map(|v| v.max(0.0).sqrt()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(s)
}

pub fn is_symmetric<T: PartialEq>(a: &[T], n: usize) -> bool {
    (0..n).all(|i| (i + 1..n).all(|j| a[i * n + j] == a[j * n + i]))
}

/// Exact rank of an integer matrix.
///
/// Eliminates modulo a 61-bit prime, which bounds the rank from below. The
/// bound is certified exact by lifting the modular kernel basis to integer
/// vectors and checking `M v = 0` over the integers. Without a certificate it
/// falls back to integer row echelon form, in `i128` and then `BigInt`.
pub fn rank_exact(a: &[i64], rows: usize, cols: usize) -> usize {
    assert_eq!(a.len(), rows * cols);
    if let Some(r) = rank_certified(a, rows, cols) {
        return r;
    }
    let m: Vec<Vec<i128>> = (0..rows).map(|r| a[r * cols..(r + 1) * cols].iter().map(|&v| v as i128).collect()).collect();
    match rank_i128(m) {
        Some(r) => r,
        None => {
            let m = (0..rows).map(|r| a[r * cols..(r + 1) * cols].iter().map(|&v| BigInt::from(v)).collect()).collect();
            rank_big(m)
        }
    }
}

const P: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn inv_mod(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, P - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

/// `(num, den)` with `num / den = a (mod P)` and both below `sqrt(P / 2)`.
fn reconstruct(a: u64) -> Option<(i128, i128)> {
    let bound = ((P / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (P as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    Some(if t1 < 0 { (-r1, -t1) } else { (r1, t1) })
}

fn rank_certified(a: &[i64], rows: usize, cols: usize) -> Option<usize> {
    let mut m: Vec<Vec<u64>> =
        (0..rows).map(|r| a[r * cols..(r + 1) * cols].iter().map(|&v| v.rem_euclid(P as i64) as u64).collect()).collect();
    let mut pivots = Vec::new();
    for c in 0..cols {
        let rank = pivots.len();
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        let inv = inv_mod(m[rank][c]);
        m[rank][c..].iter_mut().for_each(|v| *v = mul_mod(*v, inv));
        let prow = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            let f = row[c];
            if r == rank || f == 0 {
                continue;
            }
            for j in c..cols {
                row[j] = (row[j] + P - mul_mod(f, prow[j])) % P;
            }
        }
        pivots.push(c);
    }
    let rank = pivots.len();
    let mut is_pivot = vec![false; cols];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        // v[free] = 1, v[pivot_i] = -m[i][free].
        let mut entries = vec![(0i128, 1i128); cols];
        entries[free] = (1, 1);
        for (i, &pc) in pivots.iter().enumerate() {
            entries[pc] = reconstruct((P - m[i][free]) % P)?;
        }
        let lcm = entries.iter().try_fold(1i128, |l, &(_, d)| l.checked_mul(d / l.gcd(&d)))?;
        let v: Vec<i128> = entries.iter().map(|&(n, d)| n.checked_mul(lcm / d)).collect::<Option<_>>()?;
        for r in 0..rows {
            let mut dot = 0i128;
            for (j, &x) in v.iter().enumerate() {
                dot = dot.checked_add((a[r * cols + j] as i128).checked_mul(x)?)?;
            }
            if dot != 0 {
                return None;
            }
        }
    }
    Some(rank)
}

fn rank_i128(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank];
        let pv = prow[c];
        for row in tail.iter_mut() {
            let a = row[c];
            if a == 0 {
                continue;
            }
            let g = pv.gcd(&a);
            let (x, y) = (pv / g, a / g);
            let mut content = 0i128;
            for j in c..cols {
                let v = row[j].checked_mul(x)?.checked_sub(prow[j].checked_mul(y)?)?;
                row[j] = v;
                content = content.gcd(&v);
            }
            if content > 1 {
                row[c..].iter_mut().for_each(|v| *v /= content);
            }
        }
        rank += 1;
    }
    Some(rank)
}

fn rank_big(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank];
        let pv = prow[c].clone();
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let g = pv.gcd(&row[c]);
            let (x, y) = (&pv / &g, &row[c] / &g);
            let mut content = BigInt::zero();
            for j in c..cols {
                let v = &row[j] * &x - &prow[j] * &y;
                content = content.gcd(&v);
                row[j] = v;
            }
            if content.abs() > BigInt::from(1) {
                row[c..].iter_mut().for_each(|v| *v /= &content);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn small_symmetric_eigenvalues() {
        assert!(approx_eq(&sym_eigenvalues(&[0.0, 1.0, 1.0, 0.0], 2).unwrap(), &[1.0, -1.0], 1e-14));
        assert!(approx_eq(&sym_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2).unwrap(), &[3.0, 1.0], 1e-14));
        let a = [4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let ev = sym_eigenvalues(&a, 3).unwrap();
        // Trace and Frobenius norm are preserved.
        assert!((ev.iter().sum::<f64>() - 9.0).abs() < 1e-12);
        assert!((ev.iter().map(|v| v * v).sum::<f64>() - 33.0).abs() < 1e-10);
        // Characteristic polynomial vanishes at every eigenvalue.
        for l in ev {
            let det = (4.0 - l) * ((3.0 - l) * (2.0 - l) - 1.0) - (2.0 - l);
            assert!(det.abs() < 1e-10);
        }
    }

    #[test]
    fn modular_rank_matches_integer_elimination() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        for trial in 0..200 {
            let (rows, cols) = (1 + trial % 7, 1 + (trial / 7) % 7);
            // Low-rank products plus small noise entries.
            let k = 1 + trial % 3;
            let u: Vec<i64> = (0..rows * k).map(|_| next() % 5 - 2).collect();
            let w: Vec<i64> = (0..k * cols).map(|_| next() % 5 - 2).collect();
            let mut a: Vec<i64> = (0..rows * cols)
                .map(|i| (0..k).map(|t| u[(i / cols) * k + t] * w[t * cols + i % cols]).sum())
                .collect();
            if trial % 4 == 0 {
                a[0] += 1;
            }
            let m: Vec<Vec<i128>> = (0..rows).map(|r| a[r * cols..(r + 1) * cols].iter().map(|&v| v as i128).collect()).collect();
            assert_eq!(rank_exact(&a, rows, cols), rank_i128(m).unwrap(), "trial {trial}");
        }
    }

    #[test]
    fn reconstruction_inverts_modular_fractions() {
        for (n, d) in [(3i128, 7i128), (-5, 2), (0, 1), (41152, 263), (-1_000_000, 999_983)] {
            let a = (n.rem_euclid(P as i128) as u64, d as u64);
            let x = mul_mod(a.0, inv_mod(a.1));
            assert_eq!(reconstruct(x), Some((n, d)));
        }
    }

    #[test]
    fn hadamard_spectrum() {
        // Sylvester Hadamard matrix of order 16: eigenvalues +-4, eight each.
        let n: usize = 16;
        let a: Vec<f64> =
            (0..n * n).map(|i| if ((i / n) & (i % n)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 }).collect();
        let ev = sym_eigenvalues(&a, n).unwrap();
        assert!(ev[..8].iter().all(|v| (v - 4.0).abs() < 1e-12));
        assert!(ev[8..].iter().all(|v| (v + 4.0).abs() < 1e-12));
    }

    #[test]
    fn diagonal_and_zero() {
        let ev = sym_eigenvalues(&[0.0; 9], 3).unwrap();
        assert_eq!(ev, vec![0.0; 3]);
        let a = [3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        assert_eq!(sym_eigenvalues(&a, 3).unwrap(), vec![3.0, 2.0, -1.0]);
        assert!(sym_eigenvalues(&[], 0).unwrap().is_empty());
    }

    #[test]
    fn rectangular_singular_values() {
        // [[3, 0], [4, 5]] has singular values sqrt(45), sqrt(5).
        let s = singular_values(&[3.0, 0.0, 4.0, 5.0], 2, 2).unwrap();
        assert!(approx_eq(&s, &[45f64.sqrt(), 5f64.sqrt()], 1e-12));
        let s = singular_values(&[1.0, 1.0, 1.0], 1, 3).unwrap();
        assert!(approx_eq(&s, &[3f64.sqrt()], 1e-12));
        let s = singular_values(&[1.0, 1.0, 1.0], 3, 1).unwrap();
        assert!(approx_eq(&s, &[3f64.sqrt()], 1e-12));
    }

    #[test]
    fn exact_ranks() {
        assert_eq!(rank_exact(&[0, 1, 1, 0], 2, 2), 2);
        assert_eq!(rank_exact(&[0; 6], 2, 3), 0);
        assert_eq!(rank_exact(&[1, 2, 3, 2, 4, 6, 1, 0, 1], 3, 3), 2);
        assert_eq!(rank_exact(&[], 0, 0), 0);
    }

    #[test]
    fn big_fallback_agrees() {
        // Near-singular integer matrices with large entries overflow i128.
        let big = 1i64 << 40;
        let a = [big, big + 1, 7, big - 3, big, 11, 2 * big - 3, 2 * big + 1, 18];
        let m: Vec<Vec<BigInt>> = (0..3).map(|r| a[r * 3..r * 3 + 3].iter().map(|&v| BigInt::from(v)).collect()).collect();
        assert_eq!(rank_exact(&a, 3, 3), rank_big(m));
        assert_eq!(rank_exact(&a, 3, 3), 2);
    }
}
