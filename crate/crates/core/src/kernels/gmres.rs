//! Restarted GMRES with modified Gram-Schmidt Arnoldi and Givens-rotation
//! least squares. The operator is any closure `y ← A x`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Relative residual target `‖Ax − b‖ / ‖b‖`.
    pub tol: f64,
    /// Inner iterations per cycle; clamped to the system size.
    pub restart: usize,
    /// Total inner iterations across all cycles.
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            restart: 30,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    /// Relative residual of the returned iterate.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Arnoldi produced a (numerically) zero vector before convergence.
    pub breakdown: bool,
    /// Relative least-squares residual after each inner iteration.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual<F>(apply: &F, x: &[f64], b: &[f64], scratch: &mut [f64]) -> Vec<f64>
where
    F: Fn(&[f64], &mut [f64]),
{
    apply(x, scratch);
    b.iter()
        .zip(scratch.iter())
        .map(|(bi, ai)| bi - ai)
        .collect()
}

pub fn gmres_solve<F>(apply: F, b: &[f64], x0: Option<&[f64]>, opts: GmresOptions) -> GmresOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut x = x0.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; n]);
    let bnorm = norm(b);
    let mut history = Vec::new();
    if bnorm == 0.0 {
        return GmresOutcome {
            x: vec![0.0; n],
            residual_norm: 0.0,
            iterations: 0,
            converged: true,
            breakdown: false,
            history,
        };
    }
    let m = opts.restart.clamp(1, n.max(1));
    let mut scratch = vec![0.0; n];
    let mut iterations = 0;
    let mut breakdown = false;

    let mut r = residual(&apply, &x, b, &mut scratch);
    let mut rel = norm(&r) / bnorm;

    while rel > opts.tol && iterations < opts.max_iter {
        let beta = norm(&r);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // Hessenberg columns, already rotated
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<(f64, f64)> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        let mut cycle_breakdown = false;

        while k < m && iterations < opts.max_iter {
            let mut w = vec![0.0; n];
            apply(&basis[k], &mut w);
            let w_norm0 = norm(&w);
            let mut col = vec![0.0; k + 2];
            for (i, v) in basis.iter().enumerate().take(k + 1) {
                let hij = dot(&w, v);
                col[i] = hij;
                for (wj, vj) in w.iter_mut().zip(v) {
                    *wj -= hij * vj;
                }
            }
            let hk1 = norm(&w);
            col[k + 1] = hk1;
            for (i, &(c, s)) in cs.iter().enumerate() {
                let a = col[i];
                let bb = col[i + 1];
                col[i] = c * a + s * bb;
                col[i + 1] = -s * a + c * bb;
            }
            let (a, bb) = (col[k], col[k + 1]);
            let rho = a.hypot(bb);
            let (c, s) = if rho == 0.0 {
                (1.0, 0.0)
            } else {
                (a / rho, bb / rho)
            };
            col[k] = rho;
            col[k + 1] = 0.0;
            g[k + 1] = -s * g[k];
            g[k] *= c;
            cs.push((c, s));
            h.push(col);
            iterations += 1;
            k += 1;
            history.push(g[k].abs() / bnorm);

            if hk1 <= 1e-14 * w_norm0.max(f64::MIN_POSITIVE) {
                cycle_breakdown = true;
                break;
            }
            if g[k].abs() / bnorm <= opts.tol {
                break;
            }
            basis.push(w.iter().map(|v| v / hk1).collect());
        }

        // back substitution on the k × k upper triangle
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in (i + 1)..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { acc / h[i][i] } else { 0.0 };
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[j]) {
                *xi += yj * vi;
            }
        }
        r = residual(&apply, &x, b, &mut scratch);
        rel = norm(&r) / bnorm;
        if cycle_breakdown {
            breakdown = rel > opts.tol;
            break;
        }
    }

    GmresOutcome {
        x,
        residual_norm: rel,
        iterations,
        converged: rel <= opts.tol,
        breakdown,
        history,
    }
}

/// Thomas algorithm for tridiagonal systems. `lower[0]` and `upper[n-1]`
/// are ignored.
pub fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
