use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{require_power_of_two, Error, Result};
use crate::kernels::linalg::hermitian_defect;
use crate::kernels::CMatrix;

/// Largest register accepted by [`pauli_decompose`] (`4^n` strings).
pub const PAULI_MAX_QUBITS: u32 = 7;

/// Relative prune threshold for decomposition coefficients.
const PRUNE: f64 = 1e-12;

/// `n`-qubit Pauli string as X and Z bit masks (`Y = iXZ`). Character `k`
/// of the label acts on bit `n − 1 − k`, matching the grid-index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub n: u32,
    pub x: u32,
    pub z: u32,
}

impl PauliString {
    pub fn identity(n: u32) -> Self {
        Self { n, x: 0, z: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn label(&self) -> String {
        (0..self.n)
            .map(|k| {
                let bit = self.n - 1 - k;
                match ((self.x >> bit) & 1, (self.z >> bit) & 1) {
                    (0, 0) => 'I',
                    (1, 0) => 'X',
                    (1, 1) => 'Y',
                    _ => 'Z',
                }
            })
            .collect()
    }

    /// `P|b⟩ = i^{|x∧z|} (−1)^{|b∧z|} |b ⊕ x⟩`.
    #[inline]
    pub fn action(&self, b: usize) -> (usize, Complex64) {
        let y = (self.x & self.z).count_ones();
        let sign = if ((b as u32) & self.z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let phase = match y % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        };
        (b ^ self.x as usize, phase)
    }

    /// `out ← P ψ`.
    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        for (b, a) in psi.iter().enumerate() {
            let (t, ph) = self.action(b);
            out[t] = ph * a;
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (t, ph) = self.action(b);
            m[(t, b)] = ph;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count() as u32;
        if n == 0 || n > 31 {
            return Err(Error::param("pauli", format!("bad string length {n}")));
        }
        let (mut x, mut z) = (0u32, 0u32);
        for (k, c) in s.chars().enumerate() {
            let bit = 1 << (n - 1 - k as u32);
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                'Z' => z |= bit,
                other => {
                    return Err(Error::param(
                        "pauli",
                        format!("unknown character `{other}`"),
                    ))
                }
            }
        }
        Ok(Self { n, x, z })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub string: PauliString,
}

/// Real-weighted sum of distinct Pauli strings, kept in descending `|c|`
/// order (ties broken by label).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTermSum {
    n: u32,
    terms: Vec<PauliTerm>,
}

impl PauliTermSum {
    pub fn new(n: u32, mut terms: Vec<PauliTerm>) -> Result<Self> {
        if terms.iter().any(|t| t.string.n != n) {
            return Err(Error::DimensionMismatch(
                "all strings must act on the same register".into(),
            ));
        }
        terms.sort_by(|a, b| {
            b.coeff
                .abs()
                .total_cmp(&a.coeff.abs())
                .then_with(|| a.string.label().cmp(&b.string.label()))
        });
        let mut seen = std::collections::HashSet::new();
        if !terms.iter().all(|t| seen.insert(t.string)) {
            return Err(Error::param("terms", "duplicate Pauli strings"));
        }
        Ok(Self { n, terms })
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ cⱼ Pⱼ` as a dense matrix.
    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            for b in 0..dim {
                let (r, ph) = t.string.action(b);
                m[(r, b)] += ph * t.coeff;
            }
        }
        m
    }

    /// `out ← H ψ` without forming `H`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for t in &self.terms {
            for (b, a) in psi.iter().enumerate() {
                let (r, ph) = t.string.action(b);
                out[r] += ph * a * t.coeff;
            }
        }
        out
    }
}

/// `cⱼ = Tr(Pⱼ H) / 2ⁿ` over all `4ⁿ` strings, pruning
/// `|cⱼ| ≤ 1e-12 · max|c|`.
pub fn pauli_decompose(h: &CMatrix) -> Result<PauliTermSum> {
    let (rows, cols) = h.shape();
    if rows != cols {
        return Err(Error::DimensionMismatch(format!(
            "{rows}x{cols} matrix is not square"
        )));
    }
    let n = require_power_of_two(rows)?;
    if n > PAULI_MAX_QUBITS {
        return Err(Error::GuardExceeded {
            what: "qubits for Pauli decomposition",
            value: n as usize,
            limit: PAULI_MAX_QUBITS as usize,
        });
    }
    let defect = hermitian_defect(h);
    if defect > 1e-10 {
        return Err(Error::NonHermitian(defect));
    }
    let dim = rows;
    let mut raw = Vec::new();
    for x in 0..dim as u32 {
        for z in 0..dim as u32 {
            let p = PauliString { n, x, z };
            // Tr(P H) = Σ_b ⟨b ⊕ x| P |b⟩ H[b, b ⊕ x]
            let mut tr = Complex64::new(0.0, 0.0);
            for b in 0..dim {
                let (t, ph) = p.action(b);
                let hv = h[(b, t)];
                if hv != Complex64::new(0.0, 0.0) {
                    tr += ph * hv;
                }
            }
            let c = tr.re / dim as f64;
            if c != 0.0 {
                raw.push(PauliTerm {
                    coeff: c,
                    string: p,
                });
            }
        }
    }
    let cmax = raw.iter().fold(0.0f64, |m, t| m.max(t.coeff.abs()));
    raw.retain(|t| t.coeff.abs() > PRUNE * cmax);
    PauliTermSum::new(n, raw)
}
