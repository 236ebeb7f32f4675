//! Eigen-solvers for the chain operator.
//!
//! [`dense_eigh`] returns the complete spectrum and is what thermal states
//! need. [`lanczos_extremal`] returns a few of the lowest eigenpairs with a
//! restarted block Lanczos iteration using full reorthogonalization.
//!
//! Both solvers split the operator into the connected components of its
//! sparsity graph before doing any work. For the chain these are the total
//! S_z sectors, so a spin multiplet contributes one state per component and
//! degenerate ground manifolds are found without relying on a block Krylov
//! space to separate copies of the same eigenvalue.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseSymmetricOperator;
use crate::linalg;

/// Largest dimension [`dense_eigh`] accepts without an explicit override (L = 8).
pub const DENSE_DIM_GUARD: usize = 6561;
/// Relative energy window used to group ground-state degeneracies.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;
pub const DEFAULT_LANCZOS_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x5eed_b11b;

/// Components up to this size are diagonalized densely inside the Lanczos
/// driver.
const SMALL_COMPONENT: usize = 256;
/// Saturated components at this count go straight to a dense solve.
const DENSE_JUMP: usize = 16;

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, paired with `eigenvalues`.
    pub eigenvectors: Option<DMatrix<f64>>,
    /// Whether every eigenvalue of the operator is present.
    pub complete: bool,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

#[derive(Debug, Clone)]
pub struct GroundSpace {
    pub energy: f64,
    /// Orthonormal basis of the ground manifold, one column per state.
    pub vectors: DMatrix<f64>,
}

impl GroundSpace {
    pub fn degeneracy(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }
}

/// Complete spectrum with eigenvectors; refuses `dim > DENSE_DIM_GUARD`.
pub fn dense_eigh(h: &SparseSymmetricOperator) -> Result<Spectrum> {
    dense_eigh_with(h, false)
}

pub fn dense_eigh_with(h: &SparseSymmetricOperator, allow_large: bool) -> Result<Spectrum> {
    if h.dim > DENSE_DIM_GUARD && !allow_large {
        return Err(Error::ResourceLimit(format!(
            "dense eigensolve of dimension {} exceeds guard {DENSE_DIM_GUARD}",
            h.dim
        )));
    }
    let (eigenvalues, vectors) = linalg::sparse_symmetric_eigh(h);
    Ok(Spectrum { eigenvalues, eigenvectors: Some(vectors), complete: true })
}

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    pub count: usize,
    /// Required residual norm `‖H v - E v‖` for every returned pair.
    pub tol: f64,
    pub seed: u64,
    pub max_restarts: usize,
}

impl LanczosOptions {
    pub fn new(count: usize, tol: f64) -> Self {
        LanczosOptions { count, tol, seed: DEFAULT_SEED, max_restarts: 200 }
    }
}

/// The `k` lowest eigenpairs of `h`, each with residual at most `tol`.
pub fn lanczos_extremal(h: &SparseSymmetricOperator, k: usize, tol: f64) -> Result<Spectrum> {
    lanczos_extremal_with(h, &LanczosOptions::new(k, tol))
}

pub fn lanczos_extremal_with(h: &SparseSymmetricOperator, opts: &LanczosOptions) -> Result<Spectrum> {
    let k = opts.count;
    if k == 0 || k > h.dim {
        return Err(Error::Domain(format!("requested {k} eigenpairs of a {}-dimensional operator", h.dim)));
    }
    let mut pairs: Vec<(f64, usize, DVector<f64>)> = Vec::new();
    for (ci, comp) in Component::split(h).into_iter().enumerate() {
        let want = k.min(comp.dim());
        let (vals, vecs) = comp.lowest(want, opts, ci as u64)?;
        for (j, &v) in vals.iter().enumerate() {
            pairs.push((v, ci, comp.lift(&vecs.column(j).into_owned(), h.dim)));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    pairs.truncate(k);
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let columns: Vec<_> = pairs.into_iter().map(|p| p.2).collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(DMatrix::from_columns(&columns)),
        complete: k == h.dim,
    })
}

/// All eigenvectors with `E_n - E_0 <= degeneracy_tol · (1 + |E_0|)`.
pub fn ground_space(spectrum: &Spectrum, degeneracy_tol: f64) -> Result<GroundSpace> {
    let vecs = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Contract("spectrum carries no eigenvectors".into()))?;
    if spectrum.is_empty() {
        return Err(Error::Contract("empty spectrum".into()));
    }
    let e0 = spectrum.eigenvalues[0];
    let window = degeneracy_tol * (1.0 + e0.abs());
    let g = spectrum.eigenvalues.iter().take_while(|&&e| e - e0 <= window).count();
    Ok(GroundSpace { energy: e0, vectors: vecs.columns(0, g).into_owned() })
}

#[derive(Debug, Clone)]
pub struct GroundSolverOptions {
    pub tol: f64,
    pub degeneracy_tol: f64,
    pub seed: u64,
    /// Eigenpairs requested per component before expanding.
    pub initial_count: usize,
}

impl Default for GroundSolverOptions {
    fn default() -> Self {
        GroundSolverOptions {
            tol: DEFAULT_LANCZOS_TOL,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            seed: DEFAULT_SEED,
            initial_count: 2,
        }
    }
}

/// Iterative ground-manifold solve. Each component first yields
/// `initial_count` eigenpairs; any component whose computed pairs all lie in
/// the ground window is re-solved with twice as many until a level above
/// the window appears (or the component is exhausted). From `DENSE_JUMP`
/// pairs on, a saturated component is solved densely instead.
pub fn lanczos_ground_space(h: &SparseSymmetricOperator, opts: &GroundSolverOptions) -> Result<GroundSpace> {
    let comps = Component::split(h);
    let lopts = LanczosOptions { count: 0, tol: opts.tol, seed: opts.seed, max_restarts: 200 };
    let mut counts: Vec<usize> = comps.iter().map(|c| opts.initial_count.max(1).min(c.dim())).collect();
    let mut solved: Vec<Option<(Vec<f64>, DMatrix<f64>)>> = vec![None; comps.len()];
    loop {
        for (ci, comp) in comps.iter().enumerate() {
            if solved[ci].is_none() {
                solved[ci] = Some(comp.lowest(counts[ci], &lopts, ci as u64)?);
            }
        }
        let e0 = solved
            .iter()
            .flatten()
            .map(|(v, _)| v[0])
            .fold(f64::INFINITY, f64::min);
        let window = opts.degeneracy_tol * (1.0 + e0.abs());
        let mut expanded = false;
        for (ci, comp) in comps.iter().enumerate() {
            let (vals, _) = solved[ci].as_ref().unwrap();
            let saturated = vals.iter().all(|&e| e - e0 <= window);
            if saturated && vals.len() < comp.dim() {
                let next = if counts[ci] >= DENSE_JUMP { comp.dense_threshold() } else { counts[ci] * 2 };
                counts[ci] = next.max(counts[ci] + 1).min(comp.dim());
                solved[ci] = None;
                expanded = true;
            }
        }
        if expanded {
            continue;
        }
        let mut columns = Vec::new();
        for (ci, comp) in comps.iter().enumerate() {
            let (vals, vecs) = solved[ci].as_ref().unwrap();
            for (j, &e) in vals.iter().enumerate() {
                if e - e0 <= window {
                    columns.push(comp.lift(&vecs.column(j).into_owned(), h.dim));
                }
            }
        }
        return Ok(GroundSpace { energy: e0, vectors: DMatrix::from_columns(&columns) });
    }
}

/// Ground manifold from the complete dense spectrum.
pub fn dense_ground_space(h: &SparseSymmetricOperator, degeneracy_tol: f64, allow_large: bool) -> Result<GroundSpace> {
    ground_space(&dense_eigh_with(h, allow_large)?, degeneracy_tol)
}

/// A connected block of the operator in local indexing.
struct Component {
    indices: Vec<usize>,
    op: SparseSymmetricOperator,
}

impl Component {
    fn split(h: &SparseSymmetricOperator) -> Vec<Component> {
        let groups = linalg::sparse_component_groups(h);
        groups
            .into_iter()
            .map(|indices| {
                let op = h.restrict(&indices);
                Component { indices, op }
            })
            .collect()
    }

    fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Smallest count for which a full dense solve beats a Krylov basis
    /// covering half the component.
    fn dense_threshold(&self) -> usize {
        if self.dim() <= SMALL_COMPONENT {
            return 0;
        }
        (1..=self.dim()).find(|&c| ((c + 4) * 12).max(c + 100) * 2 >= self.dim()).unwrap_or(self.dim())
    }

    fn lift(&self, v: &DVector<f64>, dim: usize) -> DVector<f64> {
        let mut out = DVector::zeros(dim);
        for (i, &row) in self.indices.iter().enumerate() {
            out[row] = v[i];
        }
        out
    }

    fn lowest(&self, count: usize, opts: &LanczosOptions, salt: u64) -> Result<(Vec<f64>, DMatrix<f64>)> {
        if count >= self.dense_threshold() {
            let (vals, vecs) = linalg::sparse_symmetric_eigh(&self.op);
            // Finish the cluster at the cut and include one level past it.
            let cut = vals[count - 1];
            let cluster = count + vals[count..].iter().take_while(|&&e| e - cut <= 1e-8 * (1.0 + cut.abs())).count();
            let n = (cluster + 1).min(vals.len());
            return Ok((vals[..n].to_vec(), vecs.columns(0, n).into_owned()));
        }
        let seed = opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        block_lanczos(&self.op, count, opts.tol, seed, opts.max_restarts)
    }
}

/// Appends the columns of `block` to the basis after orthogonalizing them
/// twice against everything already present. Returns how many were kept.
fn append_block(
    h: &SparseSymmetricOperator,
    basis: &mut DMatrix<f64>,
    images: &mut DMatrix<f64>,
    used: &mut usize,
    block: &DMatrix<f64>,
) -> usize {
    let cap = basis.ncols();
    let mut kept = 0;
    for j in 0..block.ncols() {
        if *used >= cap {
            break;
        }
        let mut w = block.column(j).into_owned();
        let norm0 = w.norm();
        if norm0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            if *used > 0 {
                let q = basis.columns(0, *used);
                let c = q.tr_mul(&w);
                w.gemv(-1.0, &q, &c, 1.0);
            }
        }
        let norm = w.norm();
        if norm <= 1e-10 * norm0 || norm < 1e-300 {
            continue;
        }
        w /= norm;
        let mut hw = DVector::zeros(h.dim);
        h.apply_into(w.as_slice(), hw.as_mut_slice());
        basis.set_column(*used, &w);
        images.set_column(*used, &hw);
        *used += 1;
        kept += 1;
    }
    kept
}

/// Restarted block Lanczos with full reorthogonalization and Rayleigh-Ritz
/// extraction. Block size is `count + 4`; each cycle restarts from the
/// lowest Ritz vectors of the previous one.
fn block_lanczos(
    h: &SparseSymmetricOperator,
    count: usize,
    tol: f64,
    seed: u64,
    max_restarts: usize,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = h.dim;
    let block = (count + 4).min(n);
    let max_basis = n.min((block * 12).max(block + 96));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = DMatrix::from_fn(n, block, |_, _| rng.gen_range(-1.0..1.0));
    let mut best = f64::INFINITY;

    for _ in 0..max_restarts {
        let mut basis = DMatrix::<f64>::zeros(n, max_basis);
        let mut images = DMatrix::<f64>::zeros(n, max_basis);
        let mut used = 0;
        let mut last = append_block(h, &mut basis, &mut images, &mut used, &start);
        while used < max_basis && last > 0 {
            let next = images.columns(used - last, last).into_owned();
            last = append_block(h, &mut basis, &mut images, &mut used, &next);
        }

        let q = basis.columns(0, used);
        let hq = images.columns(0, used);
        let mut t = q.tr_mul(&hq);
        t = (&t + t.transpose()) * 0.5;
        let (ritz, s) = linalg::symmetric_eigh(&t);
        let keep = block.min(used);
        let s = s.columns(0, keep);
        let y = q * s;
        let hy = hq * s;

        let mut worst: f64 = 0.0;
        for j in 0..count.min(keep) {
            let r = (hy.column(j) - y.column(j) * ritz[j]).norm();
            worst = worst.max(r);
        }
        best = best.min(worst);
        if keep >= count && worst <= tol {
            return Ok((ritz[..count].to_vec(), y.columns(0, count).into_owned()));
        }
        start = y;
    }
    Err(Error::Convergence { iterations: max_restarts, best_residual: best })
}
