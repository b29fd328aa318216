//! Small dense solvers used by the approximation routines.
//!
//! Matrices are row-major `n x n` slices.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// Solves `A x = b` by LU with partial pivoting; `a` and `b` are overwritten.
pub fn lu_solve<T: Real>(a: &mut [T], b: &mut [T]) -> Result<()> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().map(|v| Float::abs(*v)).fold(T::zero(), T::max);
    let tiny = scale * T::epsilon() * T::from_usize_lossy(n.max(1));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| Float::abs(a[i * n + col]).partial_cmp(&Float::abs(a[j * n + col])).unwrap())
            .expect("nonempty range");
        if !(Float::abs(a[piv * n + col]) > tiny) {
            return Err(Error::Solver(format!("singular matrix at column {col}")));
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for i in col + 1..n {
            let factor = a[i * n + col] / d;
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                a[i * n + k] = a[i * n + k] - factor * a[col * n + k];
            }
            b[i] = b[i] - factor * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s = s - a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Ok(())
}

/// Solves `A x = b` for Hermitian positive definite `A` by Cholesky; `a` and `b` are overwritten.
pub fn hermitian_solve<T: Real>(a: &mut [Complex<T>], b: &mut [Complex<T>]) -> Result<()> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    // Lower factor L stored in the lower triangle, A = L L^H.
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d = d - a[j * n + k].norm_sqr();
        }
        if !(d > T::zero()) {
            return Err(Error::Solver(format!("matrix not positive definite at row {j}")));
        }
        let d = d.sqrt();
        a[j * n + j] = Complex::new(d, T::zero());
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i].re;
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s = s - a[k * n + i].conj() * b[k];
        }
        b[i] = s / a[i * n + i].re;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_small_system() {
        let mut a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x = [1.0, -2.0, 0.5];
        let mut b: Vec<f64> = (0..3).map(|i| (0..3).map(|k| a[i * 3 + k] * x[k]).sum()).collect();
        lu_solve(&mut a, &mut b).unwrap();
        for (u, v) in b.iter().zip(x) {
            assert!((u - v).abs() < 1e-14);
        }
        let mut s = vec![1.0, 2.0, 2.0, 4.0];
        assert!(lu_solve(&mut s, &mut [1.0, 1.0]).is_err());
    }

    #[test]
    fn hermitian_small_system() {
        let c = |re, im| Complex::new(re, im);
        let a0 = vec![c(4.0, 0.0), c(1.0, 1.0), c(0.0, -0.5), c(1.0, -1.0), c(3.0, 0.0), c(0.2, 0.0), c(0.0, 0.5), c(0.2, 0.0), c(2.0, 0.0)];
        let x = [c(1.0, 0.5), c(-1.0, 0.0), c(0.25, -2.0)];
        let mut b: Vec<Complex<f64>> = (0..3).map(|i| (0..3).map(|k| a0[i * 3 + k] * x[k]).sum()).collect();
        let mut a = a0.clone();
        hermitian_solve(&mut a, &mut b).unwrap();
        for (u, v) in b.iter().zip(x) {
            assert!((u - v).norm() < 1e-13);
        }
        let mut neg = vec![c(-1.0, 0.0)];
        assert!(hermitian_solve(&mut neg, &mut [c(1.0, 0.0)]).is_err());
    }
}
