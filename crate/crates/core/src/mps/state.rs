use nalgebra::DMatrix;

use crate::error::{require_power_of_two, Error, Result};
use crate::kernels::{thin_svd, truncated_svd};

/// Hard limit on any bond, checked before a bond-growing operation.
pub const BOND_CAP: usize = 4096;
/// Largest chain that may be materialised as a dense vector.
pub const DENSE_MAX_SITES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub chi_max: usize,
    /// Singular values `≤ cutoff · σ₁` are dropped at each bond.
    pub cutoff: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            chi_max: 16,
            cutoff: 1e-10,
        }
    }
}

impl TruncationPolicy {
    pub fn new(chi_max: usize, cutoff: f64) -> Result<Self> {
        let p = Self { chi_max, cutoff };
        p.validate()?;
        Ok(p)
    }

    /// No bond limit short of [`BOND_CAP`] and no relative cutoff.
    pub fn exact() -> Self {
        Self {
            chi_max: BOND_CAP,
            cutoff: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.chi_max == 0 {
            return Err(Error::param("chi_max", "must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.cutoff) {
            return Err(Error::param(
                "cutoff",
                format!("must lie in [0, 1), got {}", self.cutoff),
            ));
        }
        Ok(())
    }
}

/// Rank-3 site tensor with layout `(left, physical, right)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    left: usize,
    right: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            data: vec![0.0; left * 2 * right],
        }
    }

    pub fn from_data(left: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != left * 2 * right {
            return Err(Error::DimensionMismatch(format!(
                "tensor ({left}, 2, {right}) needs {} entries, got {}",
                left * 2 * right,
                data.len()
            )));
        }
        Ok(Self { left, right, data })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, l: usize, s: usize, r: usize) -> f64 {
        self.data[(l * 2 + s) * self.right + r]
    }

    #[inline]
    pub fn set(&mut self, l: usize, s: usize, r: usize, v: f64) {
        self.data[(l * 2 + s) * self.right + r] = v;
    }

    /// `(left·2) × right` unfolding.
    fn left_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.left * 2, self.right, &self.data)
    }

    /// `left × (2·right)` unfolding.
    fn right_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.left, 2 * self.right, &self.data)
    }

    fn from_left_matrix(m: &DMatrix<f64>) -> Self {
        let (rows, right) = m.shape();
        Self {
            left: rows / 2,
            right,
            data: row_major(m),
        }
    }

    fn from_right_matrix(m: &DMatrix<f64>) -> Self {
        let (left, cols) = m.shape();
        Self {
            left,
            right: cols / 2,
            data: row_major(m),
        }
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

/// Tensor train with an explicit global scalar factor. The represented
/// vector is `scale · contract(sites)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mps {
    sites: Vec<Tensor3>,
    scale: f64,
}

/// Output of [`mps_truncate`].
#[derive(Debug, Clone)]
pub struct Truncated {
    pub mps: Mps,
    /// Sum over bonds of the dropped squared singular values, in the
    /// units of the represented vector.
    pub discarded_weight: f64,
}

impl Mps {
    pub fn from_sites(sites: Vec<Tensor3>, scale: f64) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::param("sites", "an MPS needs at least one site"));
        }
        if sites[0].left != 1 || sites[sites.len() - 1].right != 1 {
            return Err(Error::DimensionMismatch("boundary bonds must be 1".into()));
        }
        for (k, w) in sites.windows(2).enumerate() {
            if w[0].right != w[1].left {
                return Err(Error::DimensionMismatch(format!(
                    "bond {} mismatch: {} vs {}",
                    k + 1,
                    w[0].right,
                    w[1].left
                )));
            }
        }
        Ok(Self { sites, scale })
    }

    /// Product state `⊗_k (a_k |0⟩ + b_k |1⟩)`.
    pub fn product(factors: &[[f64; 2]]) -> Result<Self> {
        let sites = factors
            .iter()
            .map(|f| Tensor3::from_data(1, 1, f.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sites(sites, 1.0)
    }

    /// Computational basis vector `e_index` on `sites` sites.
    pub fn basis_state(sites: usize, index: usize) -> Result<Self> {
        if sites == 0 || (sites < usize::BITS as usize && index >> sites != 0) {
            return Err(Error::param(
                "index",
                format!("{index} out of range for {sites} sites"),
            ));
        }
        let factors: Vec<[f64; 2]> = (0..sites)
            .map(|k| {
                if (index >> (sites - 1 - k)) & 1 == 1 {
                    [0.0, 1.0]
                } else {
                    [1.0, 0.0]
                }
            })
            .collect();
        Self::product(&factors)
    }

    /// Constant vector with every entry equal to `value`.
    pub fn constant(sites: usize, value: f64) -> Result<Self> {
        let mut m = Self::product(&vec![[1.0, 1.0]; sites])?;
        m.scale = value;
        Ok(m)
    }

    pub fn sites(&self) -> &[Tensor3] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn len(&self) -> usize {
        1usize << self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }

    /// Internal bond dimensions `χ₁ … χ_{L−1}`.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1]
            .iter()
            .map(|t| t.right)
            .collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Single entry `v[index]`, contracting one path through the train.
    pub fn amplitude(&self, index: usize) -> f64 {
        let l = self.sites.len();
        let mut row = vec![1.0];
        for (k, t) in self.sites.iter().enumerate() {
            let s = (index >> (l - 1 - k)) & 1;
            let mut next = vec![0.0; t.right];
            for (a, ra) in row.iter().enumerate() {
                if *ra == 0.0 {
                    continue;
                }
                for (r, nr) in next.iter_mut().enumerate() {
                    *nr += ra * t.get(a, s, r);
                }
            }
            row = next;
        }
        self.scale * row[0]
    }

    fn check_same_length(&self, other: &Mps) -> Result<()> {
        if self.sites.len() != other.sites.len() {
            return Err(Error::GridMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

pub fn mps_from_vector(v: &[f64], policy: TruncationPolicy) -> Result<Mps> {
    policy.validate()?;
    let l = require_power_of_two(v.len())? as usize;
    if l == 0 {
        return Err(Error::InvalidGrid(
            "an MPS needs at least two amplitudes".into(),
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("mps_from_vector input"));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Mps::constant(l, 0.0);
    }
    let mut sites = Vec::with_capacity(l);
    let mut r = 1;
    // carry holds Σ V† for the unprocessed sites, row-major r × rest
    let mut carry: Vec<f64> = v.iter().map(|x| x / norm).collect();
    for k in 0..l - 1 {
        let rest = 1usize << (l - k - 1);
        let m = DMatrix::from_row_slice(r * 2, rest, &carry);
        let svd = truncated_svd(&m, policy.chi_max, policy.cutoff)?;
        let chi = svd.rank();
        sites.push(Tensor3::from_left_matrix(&svd.u));
        let mut sv = svd.vh;
        for (i, s) in svd.singular_values.iter().enumerate() {
            sv.row_mut(i).scale_mut(*s);
        }
        carry = row_major(&sv);
        r = chi;
    }
    sites.push(Tensor3::from_data(r, 1, carry)?);
    let mut mps = Mps::from_sites(sites, norm)?;
    normalise_site(&mut mps, l - 1);
    Ok(mps)
}

/// Moves the Frobenius norm of site `k` into the scale factor.
fn normalise_site(mps: &mut Mps, k: usize) {
    let f = mps.sites[k].frobenius();
    if f > 0.0 && f.is_finite() {
        mps.sites[k].data.iter_mut().for_each(|x| *x /= f);
        mps.scale *= f;
    }
}

pub fn mps_to_vector(mps: &Mps) -> Result<Vec<f64>> {
    let l = mps.n_sites();
    if l > DENSE_MAX_SITES {
        return Err(Error::GuardExceeded {
            what: "sites for dense materialisation",
            value: l,
            limit: DENSE_MAX_SITES,
        });
    }
    // acc is row-major (prefix states) × bond
    let mut acc = vec![1.0];
    let mut rows = 1;
    for t in &mps.sites {
        let mut next = vec![0.0; rows * 2 * t.right];
        for p in 0..rows {
            for a in 0..t.left {
                let w = acc[p * t.left + a];
                if w == 0.0 {
                    continue;
                }
                for s in 0..2 {
                    let base = (p * 2 + s) * t.right;
                    for r in 0..t.right {
                        next[base + r] += w * t.get(a, s, r);
                    }
                }
            }
        }
        acc = next;
        rows *= 2;
    }
    Ok(acc.into_iter().map(|x| x * mps.scale).collect())
}

/// Left-orthogonalising QR sweep; the norm ends up on the last site.
fn left_canonicalise(mps: &mut Mps, upto: usize) {
    for k in 0..upto {
        let m = mps.sites[k].left_matrix();
        let qr = m.qr();
        let q = qr.q();
        let r = qr.r();
        mps.sites[k] = Tensor3::from_left_matrix(&q);
        let next = &mps.sites[k + 1];
        let nm = &r * next.right_matrix();
        mps.sites[k + 1] = Tensor3::from_right_matrix(&nm);
    }
}

/// Left-orthogonalise, then truncate right-to-left. The result is
/// right-canonical with unit-norm site 0 and the norm in `scale`.
pub fn mps_truncate(mps: &Mps, policy: TruncationPolicy) -> Truncated {
    let mut out = mps.clone();
    let l = out.n_sites();
    left_canonicalise(&mut out, l - 1);
    normalise_site(&mut out, l - 1);
    let scale2 = out.scale * out.scale;
    let mut discarded = 0.0;
    for k in (1..l).rev() {
        let m = out.sites[k].right_matrix();
        if m.iter().any(|x| !x.is_finite()) {
            break;
        }
        let svd = match truncated_svd(&m, policy.chi_max.max(1), policy.cutoff.max(0.0)) {
            Ok(s) => s,
            Err(_) => break,
        };
        discarded += svd.discarded_weight * scale2;
        out.sites[k] = Tensor3::from_right_matrix(&svd.vh);
        let mut us = svd.u;
        for (j, s) in svd.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        let prev = out.sites[k - 1].left_matrix() * us;
        out.sites[k - 1] = Tensor3::from_left_matrix(&prev);
    }
    normalise_site(&mut out, 0);
    Truncated {
        mps: out,
        discarded_weight: discarded,
    }
}

fn check_bond(bond: usize) -> Result<()> {
    if bond > BOND_CAP {
        return Err(Error::BondOverflow {
            bond,
            cap: BOND_CAP,
        });
    }
    Ok(())
}

/// Site-wise Kronecker product of bond matrices, without truncation.
/// Every bond of the result is `χ_A · χ_B`.
pub fn hadamard_product(a: &Mps, b: &Mps) -> Result<Mps> {
    a.check_same_length(b)?;
    let mut sites = Vec::with_capacity(a.n_sites());
    for (ta, tb) in a.sites.iter().zip(&b.sites) {
        let (left, right) = (ta.left * tb.left, ta.right * tb.right);
        check_bond(right)?;
        let mut t = Tensor3::zeros(left, right);
        for la in 0..ta.left {
            for lb in 0..tb.left {
                for s in 0..2 {
                    for ra in 0..ta.right {
                        let x = ta.get(la, s, ra);
                        if x == 0.0 {
                            continue;
                        }
                        for rb in 0..tb.right {
                            t.set(
                                la * tb.left + lb,
                                s,
                                ra * tb.right + rb,
                                x * tb.get(lb, s, rb),
                            );
                        }
                    }
                }
            }
        }
        sites.push(t);
    }
    Mps::from_sites(sites, a.scale * b.scale)
}

pub fn mps_hadamard(a: &Mps, b: &Mps, policy: TruncationPolicy) -> Result<Mps> {
    Ok(mps_truncate(&hadamard_product(a, b)?, policy).mps)
}

/// `a·A + b·B` by direct sum of the site tensors, then truncation.
pub fn mps_add(x: &Mps, y: &Mps, a: f64, b: f64, policy: TruncationPolicy) -> Result<Mps> {
    Ok(mps_truncate(&direct_sum(x, y, a, b)?, policy).mps)
}

/// Untruncated `a·A + b·B`; internal bonds are `χ_A + χ_B`.
pub fn direct_sum(x: &Mps, y: &Mps, a: f64, b: f64) -> Result<Mps> {
    x.check_same_length(y)?;
    let l = x.n_sites();
    let (wa, wb) = (a * x.scale, b * y.scale);
    let mut sites = Vec::with_capacity(l);
    for k in 0..l {
        let (tx, ty) = (&x.sites[k], &y.sites[k]);
        let t = if l == 1 {
            let data = tx
                .data
                .iter()
                .zip(&ty.data)
                .map(|(p, q)| wa * p + wb * q)
                .collect();
            Tensor3::from_data(1, 1, data)?
        } else if k == 0 {
            let right = tx.right + ty.right;
            check_bond(right)?;
            let mut t = Tensor3::zeros(1, right);
            for s in 0..2 {
                for r in 0..tx.right {
                    t.set(0, s, r, wa * tx.get(0, s, r));
                }
                for r in 0..ty.right {
                    t.set(0, s, tx.right + r, wb * ty.get(0, s, r));
                }
            }
            t
        } else if k == l - 1 {
            let mut t = Tensor3::zeros(tx.left + ty.left, 1);
            for s in 0..2 {
                for q in 0..tx.left {
                    t.set(q, s, 0, tx.get(q, s, 0));
                }
                for q in 0..ty.left {
                    t.set(tx.left + q, s, 0, ty.get(q, s, 0));
                }
            }
            t
        } else {
            let right = tx.right + ty.right;
            check_bond(right)?;
            let mut t = Tensor3::zeros(tx.left + ty.left, right);
            for s in 0..2 {
                for q in 0..tx.left {
                    for r in 0..tx.right {
                        t.set(q, s, r, tx.get(q, s, r));
                    }
                }
                for q in 0..ty.left {
                    for r in 0..ty.right {
                        t.set(tx.left + q, s, tx.right + r, ty.get(q, s, r));
                    }
                }
            }
            t
        };
        sites.push(t);
    }
    Mps::from_sites(sites, 1.0)
}

/// Schmidt coefficients across the bond between sites `cut − 1` and `cut`,
/// including the global scale.
pub fn schmidt_values(mps: &Mps, cut: usize) -> Result<Vec<f64>> {
    let l = mps.n_sites();
    if cut == 0 || cut >= l {
        return Err(Error::InvalidCut { cut, sites: l });
    }
    let mut m = mps.clone();
    left_canonicalise(&mut m, l - 1);
    // right-orthogonalise down to the cut with QR of the transposed unfolding
    for k in (cut + 1..l).rev() {
        let mt = m.sites[k].right_matrix().transpose();
        let qr = mt.qr();
        let q = qr.q().transpose();
        let r = qr.r().transpose();
        m.sites[k] = Tensor3::from_right_matrix(&q);
        let prev = m.sites[k - 1].left_matrix() * r;
        m.sites[k - 1] = Tensor3::from_left_matrix(&prev);
    }
    let svd = thin_svd(&m.sites[cut].right_matrix())?;
    Ok(svd
        .singular_values
        .iter()
        .map(|s| s * m.scale.abs())
        .collect())
}

/// Von Neumann entropy `−Σ pᵢ ln pᵢ` of the normalised Schmidt spectrum.
pub fn entanglement_entropy(mps: &Mps, cut: usize) -> Result<f64> {
    let sv = schmidt_values(mps, cut)?;
    let total: f64 = sv.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let h: f64 = sv
        .iter()
        .map(|s| s * s / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    // a product state gives −1·ln 1 = −0
    Ok(h.max(0.0) + 0.0)
}
