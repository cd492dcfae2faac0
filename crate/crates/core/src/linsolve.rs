//! Jacobi-preconditioned conjugate gradients for the SPD grid operators.

use alloc::vec;

use crate::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Solves `A x = b` in place, starting from the incoming `x`, until the true
/// residual satisfies `‖b − A x‖₂ ≤ target`. `diag` is the diagonal of `A`.
/// Returns the number of iterations used.
pub(crate) fn pcg(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    target: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut iterations = 0;

    // The recurrence residual drifts from the true one; restart from the
    // true residual whenever they disagree at convergence.
    loop {
        apply(x, &mut ap);
        for k in 0..n {
            r[k] = b[k] - ap[k];
        }
        let true_res = norm(&r);
        if true_res <= target {
            return Ok(iterations);
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence { iterations, residual: true_res, target });
        }

        for k in 0..n {
            z[k] = r[k] / diag[k];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);

        while iterations < max_iter {
            iterations += 1;
            apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                // breakdown: p is numerically zero
                break;
            }
            let step = rz / pap;
            for k in 0..n {
                x[k] += step * p[k];
                r[k] -= step * ap[k];
            }
            if norm(&r) <= 0.5 * target {
                break;
            }
            for k in 0..n {
                z[k] = r[k] / diag[k];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for k in 0..n {
                p[k] = z[k] + beta * p[k];
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence { iterations, residual: f64::NAN, target });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_tridiagonal_system() {
        let n = 50;
        let apply = |x: &[f64], y: &mut [f64]| {
            for k in 0..n {
                let left = if k > 0 { x[k - 1] } else { 0.0 };
                let right = if k + 1 < n { x[k + 1] } else { 0.0 };
                y[k] = 3.0 * x[k] - left - right;
            }
        };
        let b: alloc::vec::Vec<f64> = (0..n).map(|k| (k as f64).sin()).collect();
        let mut x = vec![0.0; n];
        let its = pcg(apply, &vec![3.0; n], &b, &mut x, 1e-12, 200).unwrap();
        assert!(its > 0 && its <= n);
        let mut ax = vec![0.0; n];
        apply(&x, &mut ax);
        let res: f64 = ax.iter().zip(&b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(res <= 1e-12);
    }

    #[test]
    fn reports_exhausted_budget() {
        let n = 40;
        let apply = |x: &[f64], y: &mut [f64]| {
            for k in 0..n {
                let left = if k > 0 { x[k - 1] } else { 0.0 };
                let right = if k + 1 < n { x[k + 1] } else { 0.0 };
                y[k] = 2.0001 * x[k] - left - right;
            }
        };
        let b = vec![1.0; n];
        let mut x = vec![0.0; n];
        let err = pcg(apply, &vec![2.0001; n], &b, &mut x, 1e-14, 3).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 3, .. }));
    }

    #[test]
    fn converged_guess_costs_nothing() {
        let apply = |x: &[f64], y: &mut [f64]| y.copy_from_slice(x);
        let b = vec![2.0; 10];
        let mut x = b.clone();
        assert_eq!(pcg(apply, &[1.0; 10], &b, &mut x, 1e-15, 5).unwrap(), 0);
    }
}
