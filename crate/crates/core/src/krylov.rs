//! Restarted GMRES on matrix-free operators.
//!
//! One Krylov kernel serves both the grad-div Schur solve (mildly
//! nonsymmetric, clustered spectrum with a single small outlier) and the
//! nonsymmetric linearized advection-diffusion solve of the projection
//! baseline.

/// Outcome of an iterative solve. `rel_residual` is the true residual of the
/// returned iterate relative to ||b||.
#[derive(Debug, Clone, Copy)]
pub struct KrylovOutcome {
    pub iterations: usize,
    pub rel_residual: f64,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve A x = b with restarted GMRES. `x` holds the initial guess on entry
/// and the final iterate on exit. Stops when the true relative residual
/// drops below `rel_tol`, when `max_iters` operator applications are spent,
/// or when a restart cycle stagnates (residual improvement < 1%).
pub fn gmres(
    apply: &mut dyn FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iters: usize,
    restart: usize,
) -> KrylovOutcome {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.fill(0.0);
        return KrylovOutcome {
            iterations: 0,
            rel_residual: 0.0,
            converged: true,
        };
    }
    let target = rel_tol * bnorm;
    let m = restart.max(1);

    let mut scratch = vec![0.0; n];
    let mut r = vec![0.0; n];
    let residual = |apply: &mut dyn FnMut(&[f64], &mut [f64]),
                    x: &[f64],
                    r: &mut Vec<f64>,
                    scratch: &mut Vec<f64>| {
        apply(x, scratch);
        for i in 0..x.len() {
            r[i] = b[i] - scratch[i];
        }
    };

    residual(apply, x, &mut r, &mut scratch);
    let mut rnorm = norm(&r);
    let mut iterations = 0;

    while rnorm > target && iterations < max_iters {
        let cycle_start = rnorm;
        // Arnoldi basis and Hessenberg factors for one restart cycle.
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / rnorm).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = rnorm;
        let mut k_used = 0;

        for k in 0..m {
            if iterations >= max_iters {
                break;
            }
            apply(&basis[k], &mut scratch);
            iterations += 1;
            // modified Gram-Schmidt
            let mut w = scratch.clone();
            for (i, v) in basis.iter().enumerate() {
                let hik = dot(&w, v);
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(v) {
                    *wj -= hik * vj;
                }
            }
            let hkk = norm(&w);
            h[k + 1][k] = hkk;
            // previous Givens rotations
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            // new rotation zeroing h[k+1][k]
            let denom = (h[k][k] * h[k][k] + hkk * hkk).sqrt();
            if denom == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / denom;
            sn[k] = hkk / denom;
            h[k][k] = denom;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;

            let est = g[k + 1].abs();
            if hkk == 0.0 || est <= 0.2 * target {
                break;
            }
            if k + 1 < m + 1 {
                basis.push(w.iter().map(|v| v / hkk).collect());
            }
        }

        if k_used > 0 {
            // back substitution for the least-squares coefficients
            let mut y = vec![0.0; k_used];
            for i in (0..k_used).rev() {
                let mut s = g[i];
                for j in i + 1..k_used {
                    s -= h[i][j] * y[j];
                }
                y[i] = s / h[i][i];
            }
            for (j, yj) in y.iter().enumerate() {
                for (xi, vi) in x.iter_mut().zip(&basis[j]) {
                    *xi += yj * vi;
                }
            }
        }

        residual(apply, x, &mut r, &mut scratch);
        rnorm = norm(&r);
        // a restart cycle that cannot halve the residual is at its floor
        if k_used == 0 || rnorm > 0.5 * cycle_start {
            break;
        }
    }

    KrylovOutcome {
        iterations,
        rel_residual: rnorm / bnorm,
        converged: rnorm <= target,
    }
}
