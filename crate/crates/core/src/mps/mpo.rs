use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::truncated_svd;

use super::state::{mps_truncate, Mps, Tensor3, TruncationPolicy, BOND_CAP};

/// Largest chain accepted by [`mpo_from_matrix`] (a `2^L × 2^L` dense input).
pub const MPO_MAX_SITES: usize = 10;

/// Rank-4 operator tensor with layout `(left, out, in, right)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    left: usize,
    right: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    #[inline]
    pub fn get(&self, l: usize, so: usize, si: usize, r: usize) -> f64 {
        self.data[((l * 2 + so) * 2 + si) * self.right + r]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mpo {
    sites: Vec<Tensor4>,
}

impl Mpo {
    pub fn identity(sites: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::param("sites", "an MPO needs at least one site"));
        }
        let t = Tensor4 {
            left: 1,
            right: 1,
            data: vec![1.0, 0.0, 0.0, 1.0],
        };
        Ok(Self {
            sites: vec![t; sites],
        })
    }

    pub fn sites(&self) -> &[Tensor4] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1]
            .iter()
            .map(|t| t.right)
            .collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Dense `2^L × 2^L` matrix.
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        let l = self.n_sites();
        if l > MPO_MAX_SITES {
            return Err(Error::GuardExceeded {
                what: "MPO sites for dense materialisation",
                value: l,
                limit: MPO_MAX_SITES,
            });
        }
        let n = 1usize << l;
        // acc[(row, col)][bond]
        let mut acc: Vec<Vec<f64>> = vec![vec![1.0]];
        let mut dim = 1;
        for t in &self.sites {
            let mut next = vec![vec![0.0; t.right]; dim * dim * 4];
            for row in 0..dim {
                for col in 0..dim {
                    let cur = &acc[row * dim + col];
                    for so in 0..2 {
                        for si in 0..2 {
                            let idx = (row * 2 + so) * (dim * 2) + col * 2 + si;
                            for (a, w) in cur.iter().enumerate() {
                                for r in 0..t.right {
                                    next[idx][r] += w * t.get(a, so, si, r);
                                }
                            }
                        }
                    }
                }
            }
            acc = next;
            dim *= 2;
        }
        Ok(DMatrix::from_fn(n, n, |i, j| acc[i * n + j][0]))
    }
}

/// Tensor-train factorisation of a dense operator; at each bond singular
/// values `≤ tol · σ₁` are dropped.
pub fn mpo_from_matrix(op: &DMatrix<f64>, tol: f64) -> Result<Mpo> {
    let (rows, cols) = op.shape();
    if rows != cols || rows < 2 || !rows.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "operator must be square with power-of-two size, got {rows}x{cols}"
        )));
    }
    let l = rows.trailing_zeros() as usize;
    if l > MPO_MAX_SITES {
        return Err(Error::GuardExceeded {
            what: "MPO sites",
            value: l,
            limit: MPO_MAX_SITES,
        });
    }
    // regroup into site-major order: index = Σ_k (2·i_k + j_k) · 4^{L−1−k}
    let n = rows;
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut idx = 0;
            for k in 0..l {
                let bit = l - 1 - k;
                idx = idx * 4 + ((i >> bit) & 1) * 2 + ((j >> bit) & 1);
            }
            t[idx] = op[(i, j)];
        }
    }
    let mut sites = Vec::with_capacity(l);
    let mut w = 1;
    let mut carry = t;
    for k in 0..l - 1 {
        let rest = 1usize << (2 * (l - k - 1));
        let m = DMatrix::from_row_slice(w * 4, rest, &carry);
        let svd = truncated_svd(&m, BOND_CAP, tol)?;
        let chi = svd.rank();
        sites.push(Tensor4 {
            left: w,
            right: chi,
            data: svd.u.transpose().as_slice().to_vec(),
        });
        let mut sv = svd.vh;
        for (i, s) in svd.singular_values.iter().enumerate() {
            sv.row_mut(i).scale_mut(*s);
        }
        carry = sv.transpose().as_slice().to_vec();
        w = chi;
    }
    sites.push(Tensor4 {
        left: w,
        right: 1,
        data: carry,
    });
    Ok(Mpo { sites })
}

/// Site-wise contraction (bonds multiply), followed by truncation.
pub fn mpo_apply(mpo: &Mpo, mps: &Mps, policy: TruncationPolicy) -> Result<Mps> {
    Ok(mps_truncate(&mpo_contract(mpo, mps)?, policy).mps)
}

/// Untruncated [`mpo_apply`]; bonds are `w · χ`.
pub fn mpo_contract(mpo: &Mpo, mps: &Mps) -> Result<Mps> {
    if mpo.n_sites() != mps.n_sites() {
        return Err(Error::GridMismatch {
            left: 1 << mpo.n_sites(),
            right: mps.len(),
        });
    }
    let mut sites = Vec::with_capacity(mps.n_sites());
    for (w, a) in mpo.sites.iter().zip(mps.sites()) {
        let (left, right) = (w.left * a.left(), w.right * a.right());
        if right > BOND_CAP {
            return Err(Error::BondOverflow {
                bond: right,
                cap: BOND_CAP,
            });
        }
        let mut t = Tensor3::zeros(left, right);
        for wl in 0..w.left {
            for al in 0..a.left() {
                let l = wl * a.left() + al;
                for so in 0..2 {
                    for si in 0..2 {
                        for wr in 0..w.right {
                            let c = w.get(wl, so, si, wr);
                            if c == 0.0 {
                                continue;
                            }
                            for ar in 0..a.right() {
                                let r = wr * a.right() + ar;
                                t.set(l, so, r, t.get(l, so, r) + c * a.get(al, si, ar));
                            }
                        }
                    }
                }
            }
        }
        sites.push(t);
    }
    Mps::from_sites(sites, mps.scale())
}
