//! The spin-1 bilinear-biquadratic chain
//!
//! `H(θ) = Σ_bonds [cos θ (S_i·S_j) + sin θ (S_i·S_j)²]`
//!
//! assembled as a real symmetric sparse operator in the S_z product basis.
//!
//! Basis convention: a basis index is a base-3 number whose most significant
//! digit is site 0, and digit 0/1/2 stands for m = +1/0/-1.
//!
//! The bilinear and biquadratic parts are assembled once per
//! `(length, boundary)` in [`ChainTerms`]; a θ point is then a two-term
//! linear combination over a shared sparsity pattern.
//!
//! With periodic boundaries and `length == 2` both bonds `(0, 1)` and
//! `(1, 0)` are kept, so the single physical bond is counted twice.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinops::spin1_operators;

/// Largest chain length accepted for sparse assembly (3^12 = 531441 rows).
pub const MAX_SPARSE_LENGTH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            "open" | "obc" => Ok(Boundary::Open),
            other => Err(Error::Config(format!("unknown boundary `{other}`"))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        })
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinChainSpec {
    pub length: usize,
    pub boundary: Boundary,
    /// Coupling angle in radians, normalized into `[-π, π)`.
    pub theta: f64,
}

impl SpinChainSpec {
    pub fn new(length: usize, boundary: Boundary, theta: f64) -> Result<Self> {
        if length < 2 {
            return Err(Error::Domain(format!("chain length {length} < 2")));
        }
        Ok(SpinChainSpec { length, boundary, theta: normalize_angle(theta) })
    }

    pub fn dim(&self) -> usize {
        3usize.pow(self.length as u32)
    }

    pub fn bond_count(&self) -> usize {
        bonds(self.length, self.boundary).len()
    }
}

/// The site pairs summed over: `(i, i+1)` for `i < L-1`, plus `(L-1, 0)`
/// for periodic chains.
pub fn bonds(length: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut out: Vec<_> = (0..length - 1).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic {
        out.push((length - 1, 0));
    }
    out
}

/// Digit helpers for the base-3 product basis.
#[derive(Debug, Clone, Copy)]
pub struct BasisIndex {
    pub length: usize,
}

impl BasisIndex {
    pub fn new(length: usize) -> Self {
        BasisIndex { length }
    }

    pub fn dim(&self) -> usize {
        3usize.pow(self.length as u32)
    }

    /// Place value of `site` (site 0 is most significant).
    pub fn stride(&self, site: usize) -> usize {
        3usize.pow((self.length - 1 - site) as u32)
    }

    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.stride(site)) % 3
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.length).map(|s| self.digit(index, s)).collect()
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * 3 + d)
    }

    /// Magnetic quantum number encoded by a digit.
    pub fn m_of_digit(digit: usize) -> i32 {
        1 - digit as i32
    }
}

/// `S_1·S_2 = Σ_a S_a ⊗ S_a` on two spin-1 sites; real in the S_z basis.
pub fn heisenberg_exchange() -> DMatrix<f64> {
    let s = spin1_operators();
    let mut out = DMatrix::<f64>::zeros(9, 9);
    for op in s.components() {
        let k = op.kronecker(op);
        for (o, z) in out.iter_mut().zip(k.iter()) {
            debug_assert!(z.im.abs() < 1e-15);
            *o += z.re;
        }
    }
    out
}

/// `cos θ (S·S) + sin θ (S·S)²` on two sites, a 9×9 real symmetric matrix.
pub fn bond_operator(theta: f64) -> DMatrix<f64> {
    let x = heisenberg_exchange();
    let x2 = &x * &x;
    x * theta.cos() + x2 * theta.sin()
}

/// Real symmetric sparse operator in compressed-row form.
#[derive(Debug, Clone)]
pub struct SparseSymmetricOperator {
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSymmetricOperator {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzeros as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, self.cols[p] as usize, self.vals[p]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (self.cols[p] as usize, self.vals[p]))
    }

    /// `y = H x`. Summation order is fixed by the row layout.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[p] * x[self.cols[p] as usize];
            }
            *out = acc;
        }
    }

    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: v.len() });
        }
        let mut out = DVector::zeros(self.dim);
        self.apply_into(v.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    pub fn trace(&self) -> f64 {
        self.entries().filter(|(r, c, _)| r == c).map(|(_, _, v)| v).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] += v;
        }
        m
    }

    /// The principal submatrix on `indices` (sorted ascending), assuming no
    /// entries couple `indices` to the rest.
    pub fn restrict(&self, indices: &[usize]) -> SparseSymmetricOperator {
        let mut local = std::collections::HashMap::with_capacity(indices.len());
        for (i, &r) in indices.iter().enumerate() {
            local.insert(r, i as u32);
        }
        let mut row_ptr = Vec::with_capacity(indices.len() + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &r in indices {
            for (c, v) in self.row(r) {
                if let Some(&lc) = local.get(&c) {
                    cols.push(lc);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseSymmetricOperator { dim: indices.len(), row_ptr, cols, vals }
    }

    /// Builds an operator from a dense symmetric matrix, keeping exact nonzeros.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
        }
        let dim = m.nrows();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                if m[(r, c)] != 0.0 {
                    cols.push(c as u32);
                    vals.push(m[(r, c)]);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseSymmetricOperator { dim, row_ptr, cols, vals })
    }
}

/// Bilinear and biquadratic parts of the chain on a shared pattern.
#[derive(Debug, Clone)]
pub struct ChainTerms {
    pub length: usize,
    pub boundary: Boundary,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    bilinear: Vec<f64>,
    biquadratic: Vec<f64>,
}

impl ChainTerms {
    pub fn new(length: usize, boundary: Boundary) -> Result<Self> {
        if !(2..=MAX_SPARSE_LENGTH).contains(&length) {
            return Err(Error::ResourceLimit(format!(
                "chain length {length} outside supported range 2..={MAX_SPARSE_LENGTH}"
            )));
        }
        let basis = BasisIndex::new(length);
        let dim = basis.dim();
        let x = heisenberg_exchange();
        let x2 = &x * &x;
        // Nonzero pattern of the local 9×9 blocks, column-wise per local input state.
        let mut local: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); 9];
        for (p, col) in local.iter_mut().enumerate() {
            for q in 0..9 {
                let (a, b) = (x[(q, p)], x2[(q, p)]);
                if a != 0.0 || b != 0.0 {
                    col.push((q, a, b));
                }
            }
        }
        let bond_list = bonds(length, boundary);
        let strides: Vec<(usize, usize)> =
            bond_list.iter().map(|&(i, j)| (basis.stride(i), basis.stride(j))).collect();

        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let mut cols: Vec<u32> = Vec::new();
        let mut bilinear = Vec::new();
        let mut biquadratic = Vec::new();
        let mut scratch: Vec<(usize, f64, f64)> = Vec::new();
        for r in 0..dim {
            scratch.clear();
            for &(si, sj) in &strides {
                let di = (r / si) % 3;
                let dj = (r / sj) % 3;
                let base = r - di * si - dj * sj;
                // H is symmetric, so row r equals column r of the local blocks.
                for &(q, a, b) in &local[3 * di + dj] {
                    let c = base + (q / 3) * si + (q % 3) * sj;
                    scratch.push((c, a, b));
                }
            }
            scratch.sort_by_key(|e| e.0);
            let mut it = scratch.iter().peekable();
            while let Some(&(c, mut a, mut b)) = it.next() {
                while let Some(&&(c2, a2, b2)) = it.peek() {
                    if c2 != c {
                        break;
                    }
                    a += a2;
                    b += b2;
                    it.next();
                }
                if a != 0.0 || b != 0.0 {
                    cols.push(c as u32);
                    bilinear.push(a);
                    biquadratic.push(b);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(ChainTerms { length, boundary, dim, row_ptr, cols, bilinear, biquadratic })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `cos θ · H_bl + sin θ · H_bq`.
    pub fn operator(&self, theta: f64) -> SparseSymmetricOperator {
        self.combination(theta.cos(), theta.sin())
    }

    pub fn combination(&self, bilinear: f64, biquadratic: f64) -> SparseSymmetricOperator {
        let vals = self
            .bilinear
            .iter()
            .zip(&self.biquadratic)
            .map(|(a, b)| bilinear * a + biquadratic * b)
            .collect();
        SparseSymmetricOperator {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals,
        }
    }
}

pub fn build_hamiltonian(spec: &SpinChainSpec) -> Result<SparseSymmetricOperator> {
    Ok(ChainTerms::new(spec.length, spec.boundary)?.operator(spec.theta))
}

/// Applies `h` to `v`; alias of [`SparseSymmetricOperator::apply`].
pub fn apply(h: &SparseSymmetricOperator, v: &DVector<f64>) -> Result<DVector<f64>> {
    h.apply(v)
}
