//! Truncated singular value decomposition by one-sided (Hestenes) Jacobi
//! rotations.
//!
//! Column pairs are swept in a fixed cyclic order, so the factorisation is a
//! deterministic function of the input. Singular values come back sorted in
//! descending order; zero singular values receive completed orthonormal
//! vectors so `U` and `Vh` always stay orthonormal.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows × k`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// `k` values, non-increasing, non-negative.
    pub singular_values: Vec<f64>,
    /// `k × cols`, orthonormal rows.
    pub vh: DMatrix<f64>,
    /// Sum of squared singular values that were dropped.
    pub discarded_weight: f64,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `U · diag(σ) · Vh`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * &self.vh
    }
}

/// Full thin SVD: `A = U diag(σ) Vh` with `k = min(rows, cols)`.
pub fn thin_svd(a: &DMatrix<f64>) -> Result<SvdResult> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("svd input"));
    }
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch(format!("empty {m}x{n} matrix")));
    }
    if m >= n {
        let (u, s, v) = jacobi_tall(a);
        Ok(SvdResult {
            u,
            singular_values: s,
            vh: v.transpose(),
            discarded_weight: 0.0,
        })
    } else {
        // A^T = V S U^T
        let (v, s, u) = jacobi_tall(&a.transpose());
        Ok(SvdResult {
            u,
            singular_values: s,
            vh: v.transpose(),
            discarded_weight: 0.0,
        })
    }
}

/// Keeps `k = min(chi_max, #{σ_i > cutoff·σ_1}, numerical rank)` triplets,
/// with `k ≥ 1`.
pub fn truncated_svd(a: &DMatrix<f64>, chi_max: usize, cutoff: f64) -> Result<SvdResult> {
    if chi_max == 0 {
        return Err(Error::param("chi_max", "must be >= 1"));
    }
    if !(cutoff >= 0.0) {
        return Err(Error::param("cutoff", "must be >= 0"));
    }
    let full = thin_svd(a)?;
    let s = &full.singular_values;
    let s1 = s[0];
    let (m, n) = a.shape();
    let rank_floor = s1 * (m.max(n) as f64) * f64::EPSILON;
    let above = s
        .iter()
        .take_while(|&&v| v > cutoff * s1 && v > rank_floor)
        .count();
    let k = chi_max.min(above).max(1);
    Ok(keep_leading(full, k))
}

fn keep_leading(full: SvdResult, k: usize) -> SvdResult {
    let discarded_weight = full.singular_values[k..].iter().map(|v| v * v).sum();
    SvdResult {
        u: full.u.columns(0, k).into_owned(),
        singular_values: full.singular_values[..k].to_vec(),
        vh: full.vh.rows(0, k).into_owned(),
        discarded_weight,
    }
}

/// One-sided Jacobi on an `m × n` matrix with `m ≥ n`.
/// Returns `(U: m×n, σ: n, V: n×n)`.
fn jacobi_tall(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (m, n) = a.shape();
    // column-major storage: column j occupies w[j*m..(j+1)*m]
    let mut w: Vec<f64> = a.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for j in 0..n {
        v[j * n + j] = 1.0;
    }
    let tol = 1e-15;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let cp = &w[p * m..(p + 1) * m];
                    let cq = &w[q * m..(q + 1) * m];
                    let mut a2 = 0.0;
                    let mut b2 = 0.0;
                    let mut g = 0.0;
                    for i in 0..m {
                        a2 += cp[i] * cp[i];
                        b2 += cq[i] * cq[i];
                        g += cp[i] * cq[i];
                    }
                    (a2, b2, g)
                };
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, m, p, q, c, s);
                rotate_columns(&mut v, n, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let col = &w[j * m..(j + 1) * m];
            (col.iter().map(|x| x * x).sum::<f64>().sqrt(), j)
        })
        .collect();
    // stable ordering keeps ties deterministic
    sigma.sort_by(|a, b| b.0.total_cmp(&a.0));

    let s_max = sigma[0].0;
    let floor = s_max * (m as f64) * f64::EPSILON;
    let mut u = DMatrix::<f64>::zeros(m, n);
    let mut vout = DMatrix::<f64>::zeros(n, n);
    let mut s_out = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &(s, j)) in sigma.iter().enumerate() {
        s_out.push(s);
        for i in 0..n {
            vout[(i, k)] = v[j * n + i];
        }
        if s > floor && s > 0.0 {
            for i in 0..m {
                u[(i, k)] = w[j * m + i] / s;
            }
        } else {
            missing.push(k);
        }
    }
    complete_orthonormal(&mut u, &missing);
    (u, s_out, vout)
}

fn rotate_columns(data: &mut [f64], rows: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for i in 0..rows {
        let x = cp[i];
        let y = cq[i];
        cp[i] = c * x - s * y;
        cq[i] = s * x + c * y;
    }
}

/// Fill the listed columns of `u` with unit vectors orthogonal to all other
/// columns (modified Gram-Schmidt against canonical basis candidates).
pub(crate) fn complete_orthonormal(u: &mut DMatrix<f64>, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = u.nrows();
    for &k in missing {
        u.column_mut(k).fill(0.0);
    }
    let mut candidate = 0;
    for &k in missing {
        loop {
            assert!(candidate < m, "cannot complete an orthonormal basis");
            let mut e = nalgebra::DVector::<f64>::zeros(m);
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for j in 0..u.ncols() {
                    if j == k {
                        continue;
                    }
                    let col = u.column(j);
                    let d = col.dot(&e);
                    e.axpy(-d, &col, 1.0);
                }
            }
            let norm = e.norm();
            if norm > 1e-8 {
                u.column_mut(k).copy_from(&(e / norm));
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn orthonormality_defect(q: &DMatrix<f64>) -> f64 {
        let g = q.transpose() * q;
        (g - DMatrix::identity(q.ncols(), q.ncols())).amax()
    }

    #[test]
    fn identity() {
        let r = truncated_svd(&DMatrix::identity(2, 2), 2, 0.0).unwrap();
        assert_eq!(r.singular_values, vec![1.0, 1.0]);
        assert_eq!(r.discarded_weight, 0.0);
    }

    #[test]
    fn diagonal_truncation() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        let r = truncated_svd(&a, 1, 0.0).unwrap();
        assert_eq!(r.singular_values.len(), 1);
        assert!((r.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((r.discarded_weight - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let v = nalgebra::DVector::from_vec(vec![0.3, 0.1, -0.7]);
        let a = &u * v.transpose();
        for chi in [1, 2, 3, 10] {
            let r = truncated_svd(&a, chi, 0.0).unwrap();
            assert_eq!(r.rank(), 1);
            assert!((r.reconstruct() - &a).amax() < 1e-10);
        }
    }

    #[test]
    fn zero_matrix_keeps_one_triplet() {
        let a = DMatrix::<f64>::zeros(3, 4);
        let r = truncated_svd(&a, 4, 0.0).unwrap();
        assert_eq!(r.rank(), 1);
        assert_eq!(r.singular_values[0], 0.0);
        assert!(orthonormality_defect(&r.u) < 1e-12);
        assert!(orthonormality_defect(&r.vh.transpose()) < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = DMatrix::<f64>::zeros(2, 2);
        a[(0, 1)] = f64::NAN;
        assert!(matches!(
            truncated_svd(&a, 2, 0.0),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn matches_reference_singular_values() {
        for (m, n, seed) in [(7, 5, 1), (5, 9, 2), (32, 32, 3), (64, 17, 4)] {
            let a = random(m, n, seed);
            let ours = thin_svd(&a).unwrap();
            let mut reference: Vec<f64> = a
                .clone()
                .svd(false, false)
                .singular_values
                .iter()
                .copied()
                .collect();
            reference.sort_by(|x, y| y.total_cmp(x));
            for (x, y) in ours.singular_values.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-11 * reference[0], "{x} vs {y}");
            }
            assert!(orthonormality_defect(&ours.u) < 1e-10);
            assert!(orthonormality_defect(&ours.vh.transpose()) < 1e-10);
        }
    }

    #[test]
    fn discarded_weight_matches_reconstruction_error() {
        for (m, n, chi, seed) in [
            (40, 30, 5, 10),
            (16, 64, 3, 11),
            (256, 256, 40, 12),
            (100, 3, 2, 13),
        ] {
            let a = random(m, n, seed);
            let r = truncated_svd(&a, chi, 0.0).unwrap();
            let err2 = (r.reconstruct() - &a).norm_squared();
            let scale = a.norm_squared();
            assert!((err2 - r.discarded_weight).abs() <= 1e-8 * scale);
            assert!(r.singular_values.windows(2).all(|w| w[0] >= w[1]));
            assert!(orthonormality_defect(&r.u) < 1e-10);
            assert!(orthonormality_defect(&r.vh.transpose()) < 1e-10);
        }
    }

    #[test]
    fn relative_cutoff() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![10.0, 1.0, 1e-3, 1e-9]));
        assert_eq!(truncated_svd(&a, 10, 1e-2).unwrap().rank(), 2);
        assert_eq!(truncated_svd(&a, 10, 1e-5).unwrap().rank(), 3);
        assert_eq!(truncated_svd(&a, 10, 0.0).unwrap().rank(), 4);
        // scale invariance of the relative threshold
        assert_eq!(truncated_svd(&(a * 1e6), 10, 1e-2).unwrap().rank(), 2);
    }

    #[test]
    fn deterministic() {
        let a = random(20, 12, 99);
        let r1 = thin_svd(&a).unwrap();
        let r2 = thin_svd(&a).unwrap();
        assert_eq!(r1.u, r2.u);
        assert_eq!(r1.singular_values, r2.singular_values);
        assert_eq!(r1.vh, r2.vh);
    }
}
