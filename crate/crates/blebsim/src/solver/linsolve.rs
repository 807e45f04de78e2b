//! Matrix-free preconditioned conjugate gradients.
//!
//! Every implicit operator in the solver is a polynomial in one symmetric
//! second-difference operator (plus positive diagonal weights), so CG
//! applies directly.

use super::SolverError;

/// Solve `A x = b` for a symmetric positive (semi-)definite matrix-free
/// operator, with an optional diagonal preconditioner. `x` carries the
/// initial guess. Returns the iteration count.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    diag_precond: Option<&[f64]>,
    rel_tol: f64,
    max_iters: usize,
) -> Result<usize, SolverError> {
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];

    apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = rel_tol * b_norm.max(1e-300);

    let precond = |r: &[f64], z: &mut [f64]| match diag_precond {
        Some(d) => {
            for i in 0..r.len() {
                z[i] = r[i] / d[i];
            }
        }
        None => z.copy_from_slice(r),
    };

    precond(&r, &mut z);
    p.copy_from_slice(&z);
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();

    for it in 0..max_iters {
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= tol {
            return Ok(it);
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            // Breakdown: either a null direction of a semi-definite system
            // or round-off at convergence. Accept if the residual is close.
            if r_norm <= 100.0 * tol {
                return Ok(it);
            }
            return Err(SolverError::LinearSolve(format!(
                "CG breakdown (pᵀAp = {pap:.3e}) at residual {r_norm:.3e}"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precond(&r, &mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r_norm <= tol * 10.0 {
        return Ok(max_iters);
    }
    Err(SolverError::LinearSolve(format!(
        "CG stalled: residual {r_norm:.3e} after {max_iters} iterations (target {tol:.3e})"
    )))
}
