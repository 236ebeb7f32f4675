//! Ground-state and thermal density matrices, and the index machinery for
//! partial traces and partial transposes.
//!
//! A state on a chain is usually kept as a [`StateEnsemble`]: real
//! eigenvectors of the Hamiltonian with their statistical weights. Reduced
//! states are then computed straight from the vectors and the full
//! `3^L × 3^L` matrix is only formed when a measure needs it.
//!
//! Site (factor) indices are 0-based throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectra::{GroundSpace, Spectrum};
use crate::CMatrix;

pub type CVector = DVector<Complex64>;

/// Largest matrix dimension for which a full density matrix is formed.
pub const DENSE_STATE_GUARD: usize = 6561;

/// Relative weight below which thermal components are dropped (far below
/// double-precision resolution of the remaining trace).
const THERMAL_WEIGHT_CUTOFF: f64 = 1e-18;

const VALIDATION_TOL: f64 = 1e-10;

/// A density matrix on a tensor-product space with explicit factor dims.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub dims: Vec<usize>,
    pub matrix: CMatrix,
    pub label: String,
    /// Set when the state was averaged over a degenerate ground manifold.
    pub degenerate: bool,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: matrix.nrows() });
        }
        Ok(DensityMatrix { dims, matrix, label: label.into(), degenerate: false })
    }

    pub fn from_pure(state: &PureState, label: impl Into<String>) -> Result<Self> {
        let psi = &state.amplitudes;
        DensityMatrix::new(state.dims.clone(), psi * psi.adjoint(), label)
    }

    pub fn from_real(dims: Vec<usize>, matrix: &DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        DensityMatrix::new(dims, matrix.map(|x| Complex64::new(x, 0.0)), label)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Re-factorizes the same matrix with different (compatible) factor dims.
    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: n });
        }
        self.dims = dims;
        Ok(self)
    }

    /// Checks Hermiticity, unit trace and positivity to 1e-10.
    pub fn validate(&self) -> Result<()> {
        let herm = (&self.matrix - self.matrix.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > VALIDATION_TOL {
            return Err(Error::Domain(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > VALIDATION_TOL || tr.im.abs() > VALIDATION_TOL {
            return Err(Error::Domain(format!("trace {tr} != 1")));
        }
        let min = crate::linalg::hermitian_eigenvalues(&self.matrix)[0];
        if min < -VALIDATION_TOL {
            return Err(Error::Domain(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

/// A normalized pure state with factor dims.
#[derive(Debug, Clone)]
pub struct PureState {
    pub dims: Vec<usize>,
    pub amplitudes: CVector,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let n: usize = dims.iter().product();
        if amplitudes.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("state norm {norm} != 1")));
        }
        Ok(PureState { dims, amplitudes })
    }

    pub fn from_real(dims: Vec<usize>, v: &DVector<f64>) -> Result<Self> {
        PureState::new(dims, v.map(|x| Complex64::new(x, 0.0)))
    }

    /// Coefficient matrix `M[a, b]` with `a` running over `left` factors and
    /// `b` over the rest (both in ascending factor order).
    pub fn coefficient_matrix(&self, left: &[usize]) -> Result<CMatrix> {
        let layout = SplitLayout::new(&self.dims, left)?;
        let mut m = CMatrix::zeros(layout.left_dim, layout.right_dim);
        for (i, &z) in self.amplitudes.iter().enumerate() {
            m[(layout.left[i], layout.right[i])] = z;
        }
        Ok(m)
    }
}

/// Split of a set of factors into two nonempty complementary site sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Bipartition {
    pub fn new(mut left: Vec<usize>, sites: usize) -> Result<Self> {
        left.sort_unstable();
        left.dedup();
        if left.is_empty() || left.len() >= sites || left.iter().any(|&s| s >= sites) {
            return Err(Error::Domain(format!("invalid bipartition {left:?} of {sites} sites")));
        }
        let right = (0..sites).filter(|s| !left.contains(s)).collect();
        Ok(Bipartition { left, right })
    }

    /// Sites `0..at` against `at..sites`.
    pub fn split_at(at: usize, sites: usize) -> Result<Self> {
        Bipartition::new((0..at).collect(), sites)
    }

    pub fn sites(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// `(d_left, d_right, left_first)` when both sides are contiguous blocks.
    pub fn contiguous_dims(&self, dims: &[usize]) -> Result<(usize, usize, bool)> {
        if self.sites() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), actual: self.sites() });
        }
        let k = self.left.len();
        let left_first = self.left == (0..k).collect::<Vec<_>>();
        let left_last = self.right == (0..self.right.len()).collect::<Vec<_>>();
        if !left_first && !left_last {
            return Err(Error::UnsupportedLayout(format!(
                "bipartition {:?}|{:?} is not two contiguous blocks",
                self.left, self.right
            )));
        }
        let dl = self.left.iter().map(|&s| dims[s]).product();
        let dr = self.right.iter().map(|&s| dims[s]).product();
        Ok((dl, dr, left_first))
    }
}

/// Maps each full index to its (kept, rest) pair of multi-indices.
struct SplitLayout {
    left: Vec<usize>,
    right: Vec<usize>,
    left_dim: usize,
    right_dim: usize,
}

impl SplitLayout {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        if keep.is_empty() || keep.iter().any(|&s| s >= dims.len()) {
            return Err(Error::Domain(format!("invalid site set {keep:?} for {} factors", dims.len())));
        }
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() {
            return Err(Error::Domain(format!("repeated sites in {keep:?}")));
        }
        let n: usize = dims.iter().product();
        let left_dim = sorted.iter().map(|&s| dims[s]).product();
        let right_dim = n / left_dim;
        let is_kept: Vec<bool> = (0..dims.len()).map(|s| sorted.contains(&s)).collect();
        let mut left = vec![0; n];
        let mut right = vec![0; n];
        let mut digits = vec![0usize; dims.len()];
        for i in 0..n {
            let (mut a, mut b) = (0, 0);
            for (s, &d) in dims.iter().enumerate() {
                if is_kept[s] {
                    a = a * d + digits[s];
                } else {
                    b = b * d + digits[s];
                }
            }
            left[i] = a;
            right[i] = b;
            // Increment mixed-radix counter, last factor fastest.
            for s in (0..dims.len()).rev() {
                digits[s] += 1;
                if digits[s] < dims[s] {
                    break;
                }
                digits[s] = 0;
            }
        }
        Ok(SplitLayout { left, right, left_dim, right_dim })
    }
}

/// Reduced density matrix on `keep` (kept factors in ascending order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let layout = SplitLayout::new(&rho.dims, keep)?;
    // by_rest[b] lists (a, full index) pairs sharing the traced multi-index b.
    let mut by_rest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); layout.right_dim];
    for i in 0..rho.dim() {
        by_rest[layout.right[i]].push((layout.left[i], i));
    }
    let mut out = CMatrix::zeros(layout.left_dim, layout.left_dim);
    for group in &by_rest {
        for &(a, i) in group {
            for &(a2, j) in group {
                out[(a, a2)] += rho.matrix[(i, j)];
            }
        }
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    let dims = kept.iter().map(|&s| rho.dims[s]).collect();
    let mut r = DensityMatrix::new(dims, out, format!("{} reduced to {:?}", rho.label, kept))?;
    r.degenerate = rho.degenerate;
    Ok(r)
}

/// Partial transpose on the `right` side of a contiguous bipartition.
pub fn partial_transpose(rho: &DensityMatrix, bipart: &Bipartition) -> Result<CMatrix> {
    let (dl, dr, left_first) = bipart.contiguous_dims(&rho.dims)?;
    // Coarse two-factor layout (outer, inner); the transposed factor is the right side.
    let (outer, inner, transpose_inner) = if left_first { (dl, dr, true) } else { (dr, dl, false) };
    let n = outer * inner;
    let mut out = CMatrix::zeros(n, n);
    for a in 0..outer {
        for b in 0..inner {
            for a2 in 0..outer {
                for b2 in 0..inner {
                    let src = rho.matrix[(a * inner + b, a2 * inner + b2)];
                    let (r, c) = if transpose_inner {
                        (a * inner + b2, a2 * inner + b)
                    } else {
                        (a2 * inner + b, a * inner + b2)
                    };
                    out[(r, c)] = src;
                }
            }
        }
    }
    Ok(out)
}

/// Weighted set of orthonormal real state vectors: `ρ = Σ_k w_k |v_k><v_k|`.
#[derive(Debug, Clone)]
pub struct StateEnsemble {
    pub dims: Vec<usize>,
    /// Nonnegative, summing to one.
    pub weights: Vec<f64>,
    /// One column per weight.
    pub vectors: DMatrix<f64>,
    pub label: String,
    pub degenerate: bool,
}

impl StateEnsemble {
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == 1
    }

    pub fn pure_state(&self, k: usize) -> Result<PureState> {
        PureState::from_real(self.dims.clone(), &self.vectors.column(k).into_owned())
    }

    /// Full density matrix; refused above [`DENSE_STATE_GUARD`].
    pub fn to_density(&self) -> Result<DensityMatrix> {
        if self.dim() > DENSE_STATE_GUARD {
            return Err(Error::ResourceLimit(format!(
                "density matrix of dimension {} exceeds guard {DENSE_STATE_GUARD}",
                self.dim()
            )));
        }
        let mut scaled = self.vectors.clone();
        for (k, &w) in self.weights.iter().enumerate() {
            scaled.column_mut(k).scale_mut(w);
        }
        let rho = &scaled * self.vectors.transpose();
        let mut d = DensityMatrix::from_real(self.dims.clone(), &rho, self.label.clone())?;
        d.degenerate = self.degenerate;
        Ok(d)
    }

    /// Reduced density matrix on `keep`, computed from the vectors.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let layout = SplitLayout::new(&self.dims, keep)?;
        let mut out = DMatrix::<f64>::zeros(layout.left_dim, layout.left_dim);
        let mut m = DMatrix::<f64>::zeros(layout.left_dim, layout.right_dim);
        for (k, &w) in self.weights.iter().enumerate() {
            for (i, &x) in self.vectors.column(k).iter().enumerate() {
                m[(layout.left[i], layout.right[i])] = x;
            }
            out.gemm(w, &m, &m.transpose(), 1.0);
        }
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        let dims = kept.iter().map(|&s| self.dims[s]).collect();
        let mut d = DensityMatrix::from_real(dims, &out, format!("{} reduced to {:?}", self.label, kept))?;
        d.degenerate = self.degenerate;
        Ok(d)
    }
}

/// Factor dims for a chain state of dimension `3^L`; a single factor otherwise.
pub fn chain_dims(dim: usize) -> Vec<usize> {
    let mut n = dim;
    let mut l = 0;
    while n > 1 && n % 3 == 0 {
        n /= 3;
        l += 1;
    }
    if n == 1 && l > 0 {
        vec![3; l]
    } else {
        vec![dim]
    }
}

/// Uniform mixture over the ground manifold (a pure state when it is
/// nondegenerate).
pub fn ground_state_ensemble(gs: &GroundSpace) -> StateEnsemble {
    let g = gs.degeneracy();
    StateEnsemble {
        dims: chain_dims(gs.dim()),
        weights: vec![1.0 / g as f64; g],
        vectors: gs.vectors.clone(),
        label: format!("ground state (degeneracy {g})"),
        degenerate: g > 1,
    }
}

pub fn ground_state_density(gs: &GroundSpace) -> Result<DensityMatrix> {
    ground_state_ensemble(gs).to_density()
}

/// Gibbs ensemble `e^{-H/T}/Z` (k_B = 1) from a complete spectrum.
pub fn thermal_ensemble(spectrum: &Spectrum, temperature: f64) -> Result<StateEnsemble> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be positive and finite, got {temperature} (use the ground state for T = 0)"
        )));
    }
    if !spectrum.complete {
        return Err(Error::Contract("thermal state needs the complete spectrum".into()));
    }
    let vecs = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Contract("thermal state needs eigenvectors".into()))?;
    let e0 = spectrum.eigenvalues[0];
    let boltzmann: Vec<f64> = spectrum.eigenvalues.iter().map(|e| (-(e - e0) / temperature).exp()).collect();
    let kept: Vec<usize> = (0..boltzmann.len()).filter(|&n| boltzmann[n] > THERMAL_WEIGHT_CUTOFF).collect();
    let z: f64 = kept.iter().map(|&n| boltzmann[n]).sum();
    let weights = kept.iter().map(|&n| boltzmann[n] / z).collect();
    let vectors = vecs.select_columns(kept.iter());
    Ok(StateEnsemble {
        dims: chain_dims(vecs.nrows()),
        weights,
        vectors,
        label: format!("thermal state T = {temperature}"),
        degenerate: false,
    })
}

pub fn thermal_state(spectrum: &Spectrum, temperature: f64) -> Result<DensityMatrix> {
    thermal_ensemble(spectrum, temperature)?.to_density()
}
