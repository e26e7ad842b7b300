//! Dense kernels for the surrogate's hot loops: a blocked Cholesky and a
//! multi-column forward substitution, both on row-major buffers and both
//! pushing most of their work through `dgemm`.
//!
//! Only the lower triangle of a factored buffer is meaningful. The strict
//! upper triangle is left in an unspecified state.

/// Panel width of the blocked Cholesky.
const CHOL_BLOCK: usize = 8;
/// Rows per block of the multi-column forward substitution.
const SOLVE_BLOCK: usize = 32;

/// Unblocked factorization of the `m x m` diagonal block at `(r0, r0)`.
fn chol_diagonal(a: &mut [f64], n: usize, r0: usize, m: usize) -> bool {
    for j in r0..r0 + m {
        for k in r0..j {
            let mut s = a[j * n + k];
            for t in r0..k {
                s -= a[j * n + t] * a[k * n + t];
            }
            a[j * n + k] = s / a[k * n + k];
        }
        let mut s = a[j * n + j];
        for t in r0..j {
            s -= a[j * n + t] * a[j * n + t];
        }
        if !(s > 0.0 && s.is_finite()) {
            return false;
        }
        a[j * n + j] = s.sqrt();
    }
    true
}

/// In-place Cholesky `A = L L^T` of the symmetric row-major `n x n` buffer
/// `a`, reading and writing the lower triangle. Returns false when a pivot
/// is not positive; `a` is then garbage.
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    assert_eq!(a.len(), n * n);
    let mut r0 = 0;
    while r0 < n {
        let m = CHOL_BLOCK.min(n - r0);
        if r0 > 0 {
            // A[r0.., r0..r0+m] -= L[r0.., ..r0] L[r0..r0+m, ..r0]^T
            // SAFETY: every pointer stays inside `a`. The product reads
            // columns `..r0` and writes columns `r0..r0+m`, so the output
            // never overlaps either input.
            unsafe {
                let p = a.as_mut_ptr();
                matrixmultiply::dgemm(
                    n - r0,
                    r0,
                    m,
                    -1.0,
                    p.add(r0 * n),
                    n as isize,
                    1,
                    p.add(r0 * n),
                    1,
                    n as isize,
                    1.0,
                    p.add(r0 * n + r0),
                    n as isize,
                    1,
                );
            }
        }
        if !chol_diagonal(a, n, r0, m) {
            return false;
        }
        // rows below the panel: X L_kk^T = A_ik by substitution
        for i in r0 + m..n {
            for k in r0..r0 + m {
                let mut s = a[i * n + k];
                for t in r0..k {
                    s -= a[i * n + t] * a[k * n + t];
                }
                a[i * n + k] = s / a[k * n + k];
            }
        }
        r0 += m;
    }
    true
}

/// `x <- L^{-1} x` for one right-hand side.
pub(crate) fn forward(l: &[f64], n: usize, x: &mut [f64]) {
    for j in 0..n {
        let s: f64 = l[j * n..j * n + j].iter().zip(&x[..j]).map(|(a, b)| a * b).sum();
        x[j] = (x[j] - s) / l[j * n + j];
    }
}

/// `x <- L^{-T} x` for one right-hand side.
pub(crate) fn backward(l: &[f64], n: usize, x: &mut [f64]) {
    for j in (0..n).rev() {
        let v = x[j] / l[j * n + j];
        x[j] = v;
        for i in 0..j {
            x[i] -= l[j * n + i] * v;
        }
    }
}

/// `W <- L^{-1} W` for a row-major `n x b` block of right-hand sides.
pub(crate) fn forward_block(l: &[f64], n: usize, w: &mut [f64], b: usize) {
    assert_eq!(w.len(), n * b);
    let mut r0 = 0;
    while r0 < n {
        let m = SOLVE_BLOCK.min(n - r0);
        if r0 > 0 && b > 0 {
            let (done, rest) = w.split_at_mut(r0 * b);
            // SAFETY: `done` holds rows `..r0` of W, `rest` the rows from
            // `r0`, and the row block of L lies inside `l`.
            unsafe {
                matrixmultiply::dgemm(
                    m,
                    r0,
                    b,
                    -1.0,
                    l.as_ptr().add(r0 * n),
                    n as isize,
                    1,
                    done.as_ptr(),
                    b as isize,
                    1,
                    1.0,
                    rest.as_mut_ptr(),
                    b as isize,
                    1,
                );
            }
        }
        for j in r0..r0 + m {
            let (done, rest) = w.split_at_mut(j * b);
            let cur = &mut rest[..b];
            for t in r0..j {
                let c = l[j * n + t];
                for (x, s) in cur.iter_mut().zip(&done[t * b..(t + 1) * b]) {
                    *x -= c * s;
                }
            }
            let d = l[j * n + j];
            cur.iter_mut().for_each(|x| *x /= d);
        }
        r0 += m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::jacobi_eigenvalues;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n + 3, |_, _| rng.random::<f64>() - 0.5);
        let a = &g * g.transpose() + DMatrix::identity(n, n) * 1e-3;
        // symmetric, so the column-major slice is also the row-major one
        a.as_slice().to_vec()
    }

    fn lower(l: &[f64], n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |r, c| if c <= r { l[r * n + c] } else { 0.0 })
    }

    #[test]
    fn reconstructs_across_block_boundaries() {
        for n in [1, 2, 7, 8, 9, 17, 33, 70] {
            let a = random_spd(n, n as u64);
            let mut l = a.clone();
            assert!(cholesky_in_place(&mut l, n));
            let lm = lower(&l, n);
            let back = &lm * lm.transpose();
            let want = DMatrix::from_row_slice(n, n, &a);
            assert!((back - &want).amax() < 1e-12 * want.amax().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn rejects_indefinite() {
        let n = 12;
        let mut a = random_spd(n, 4);
        a[5 * n + 5] = -1.0;
        assert!(!cholesky_in_place(&mut a, n));
        let mut z = vec![0.0; 9];
        assert!(!cholesky_in_place(&mut z, 3));
        let mut nan = vec![f64::NAN; 4];
        assert!(!cholesky_in_place(&mut nan, 2));
    }

    #[test]
    fn solves_against_nalgebra() {
        let n = 45;
        let a = random_spd(n, 9);
        let mut l = a.clone();
        assert!(cholesky_in_place(&mut l, n));
        let am = DMatrix::from_row_slice(n, n, &a);
        let inv = am.clone().try_inverse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut x = b.clone();
        forward(&l, n, &mut x);
        backward(&l, n, &mut x);
        let want = &inv * nalgebra::DVector::from_vec(b);
        let err = x.iter().zip(want.iter()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8 * want.amax().max(1.0), "{err}");
        assert!(jacobi_eigenvalues(&am)[0] > 0.0);
    }

    proptest! {
        #[test]
        fn block_solve_matches_column_solves(n in 1usize..80, b in 0usize..20, seed in 0u64..500) {
            let a = random_spd(n, seed);
            let mut l = a.clone();
            prop_assert!(cholesky_in_place(&mut l, n));
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
            let w0: Vec<f64> = (0..n * b).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut w = w0.clone();
            forward_block(&l, n, &mut w, b);
            for q in 0..b {
                let mut col: Vec<f64> = (0..n).map(|j| w0[j * b + q]).collect();
                forward(&l, n, &mut col);
                for j in 0..n {
                    let d = (col[j] - w[j * b + q]).abs();
                    prop_assert!(d <= 1e-9 * col[j].abs().max(1.0), "row {} col {}: {}", j, q, d);
                }
            }
        }
    }
}
