//! Bipartite entanglement and correlation measures.
//!
//! * negativity of the partial transpose,
//! * Wootters concurrence and entanglement of formation (two qubits),
//! * the concurrence vector built from SO(d_A) ⊗ SO(d_B) generator pairs,
//!   for mixed states, pure states and low-rank mixtures,
//! * von Neumann entropy and Schmidt coefficients,
//! * the coherence-vector decomposition and the total / classical /
//!   quantum correlation triple obtained from the criterion matrix
//!   `Λ = K Kᵀ - |λ_B|² λ_A λ_Aᵀ`.
//!
//! Entropies use the natural logarithm.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, psd_sqrt, self_adjoint_eigenvalues, self_adjoint_eigh, singular_values, symmetric_eigenvalues,
};
use crate::spinops::{so_generators, so_pairs, su_generators};
use crate::states::{partial_transpose, Bipartition, DensityMatrix, PureState, StateEnsemble};
use crate::CMatrix;

/// Eigenvalues of the partial transpose above `-NEGATIVITY_FLOOR` count as zero.
pub const NEGATIVITY_FLOOR: f64 = 1e-10;
/// Density-matrix eigenvalues below this are treated as zero in entropies.
pub const ENTROPY_FLOOR: f64 = 1e-12;
/// Largest `d_A · d_B` for the mixed-state concurrence path.
pub const MIXED_CONCURRENCE_GUARD: usize = 81;
/// Concurrence components are reported only up to this many generator pairs.
pub const COMPONENT_REPORT_LIMIT: usize = 4096;
/// Upper bound on `pairs · rank` for the ensemble concurrence path.
pub const LOW_RANK_WORK_GUARD: usize = 2_000_000_000;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Sum of `|μ|` over the negative eigenvalues of the partial transpose.
pub fn negativity(rho: &DensityMatrix, bipart: &Bipartition) -> Result<f64> {
    let pt = partial_transpose(rho, bipart)?;
    Ok(negative_part(&hermitian_eigenvalues(&pt)))
}

fn negative_part(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().filter(|&&m| m < -NEGATIVITY_FLOOR).map(|m| -m).sum()
}

/// Negativity of a pure state from its Schmidt coefficients: the partial
/// transpose has eigenvalues `λ_i²` and `±λ_i λ_j` (i < j).
pub fn pure_negativity(state: &PureState, bipart: &Bipartition) -> Result<f64> {
    bipart.contiguous_dims(&state.dims)?;
    let s = schmidt_coefficients(state, bipart)?;
    let mut negatives = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            negatives.push(-s[i] * s[j]);
        }
    }
    Ok(negative_part(&negatives))
}

/// Negativity of an ensemble; pure states use the Schmidt route.
pub fn ensemble_negativity(ens: &StateEnsemble, bipart: &Bipartition) -> Result<f64> {
    if ens.is_pure() {
        return pure_negativity(&ens.pure_state(0)?, bipart);
    }
    negativity(&ens.to_density()?, bipart)
}

/// `λ_i` (descending) of the concurrence construction for the generator
/// product `a`: square roots of the eigenvalues of `ρ a ρ* a`, obtained from
/// the Hermitian `√ρ (a ρ* a) √ρ`, which has the same spectrum.
fn flip_roots(sqrt_rho: &CMatrix, rho_conj: &CMatrix, a: &CMatrix) -> Vec<f64> {
    let tilde = a * rho_conj * a;
    let m = sqrt_rho * tilde * sqrt_rho;
    let m = (&m + m.adjoint()) * c(0.5);
    let eig = hermitian_eigenvalues(&m);
    // Rounding noise of order ε in a zero eigenvalue would become √ε in the root.
    let cut = 64.0 * f64::EPSILON * eig.iter().map(|e| e.abs()).sum::<f64>();
    let mut roots: Vec<f64> = eig.iter().map(|&e| if e > cut { e.sqrt() } else { 0.0 }).collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

/// `max{0, 2 max λ - Σ λ}`.
fn component_from_roots(roots: &[f64]) -> f64 {
    let max = roots.iter().copied().fold(0.0f64, f64::max);
    let sum: f64 = roots.iter().sum();
    (2.0 * max - sum).max(0.0)
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims != [2, 2] {
        return Err(Error::Domain(format!("two-qubit state required, got dims {:?}", rho.dims)));
    }
    Ok(())
}

/// `max{0, λ1 - λ2 - λ3 - λ4}` with the spin flip `σ_y ⊗ σ_y`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let i = Complex64::new(0.0, 1.0);
    let sy = CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]);
    let flip = sy.kronecker(&sy);
    let roots = flip_roots(&psd_sqrt(&rho.matrix), &rho.matrix.conjugate(), &flip);
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

/// Natural-log binary entropy with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// Entanglement of formation of a two-qubit state, `H(1/2 + √(1 - C²)/2)`.
pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    let conc = wootters_concurrence(rho)?;
    let x = 0.5 + 0.5 * (1.0 - conc * conc).max(0.0).sqrt();
    binary_entropy(x.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceComponent {
    /// Index of the SO(d_A) generator (lexicographic pair order).
    pub alpha: usize,
    /// Index of the SO(d_B) generator.
    pub beta: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceResult {
    /// `|C|² = Σ C_αβ²`.
    pub norm_squared: f64,
    /// Omitted when there are more than [`COMPONENT_REPORT_LIMIT`] pairs.
    pub components: Option<Vec<ConcurrenceComponent>>,
}

impl ConcurrenceResult {
    pub fn norm(&self) -> f64 {
        self.norm_squared.sqrt()
    }
}

struct ComponentSink {
    norm_squared: f64,
    components: Option<Vec<ConcurrenceComponent>>,
}

impl ComponentSink {
    fn new(pairs: usize) -> Self {
        let components = (pairs <= COMPONENT_REPORT_LIMIT).then(|| Vec::with_capacity(pairs));
        ComponentSink { norm_squared: 0.0, components }
    }

    fn push(&mut self, alpha: usize, beta: usize, value: f64) {
        self.norm_squared += value * value;
        if let Some(list) = self.components.as_mut() {
            list.push(ConcurrenceComponent { alpha, beta, value });
        }
    }

    fn finish(self) -> ConcurrenceResult {
        ConcurrenceResult { norm_squared: self.norm_squared, components: self.components }
    }
}

/// Concurrence vector of a mixed state across a contiguous bipartition.
pub fn generalized_concurrence(rho: &DensityMatrix, bipart: &Bipartition) -> Result<ConcurrenceResult> {
    let (dl, dr, left_first) = bipart.contiguous_dims(&rho.dims)?;
    if dl * dr > MIXED_CONCURRENCE_GUARD {
        return Err(Error::ResourceLimit(format!(
            "mixed-state concurrence limited to d_A·d_B <= {MIXED_CONCURRENCE_GUARD} (got {}); use the pure-state path",
            dl * dr
        )));
    }
    let ga = so_generators(dl)?;
    let gb = so_generators(dr)?;
    let sqrt_rho = psd_sqrt(&rho.matrix);
    let rho_conj = rho.matrix.conjugate();
    let mut sink = ComponentSink::new(ga.len() * gb.len());
    for (alpha, la) in ga.generators.iter().enumerate() {
        for (beta, lb) in gb.generators.iter().enumerate() {
            let a = if left_first { la.kronecker(lb) } else { lb.kronecker(la) };
            sink.push(alpha, beta, component_from_roots(&flip_roots(&sqrt_rho, &rho_conj, &a)));
        }
    }
    Ok(sink.finish())
}

/// `<u|(L_α ⊗ L_β)|v̄>` for coefficient matrices `u`, `v` (rows = left
/// factor), with `L_α = -i(|j><k| - |k><j|)` and `L_β = -i(|m><n| - |n><m|)`.
/// Only the four nonzero entries of each generator contribute.
fn so_pair_element(u: &CMatrix, v: &CMatrix, (j, k): (usize, usize), (m, n): (usize, usize)) -> Complex64 {
    let e = |a: usize, b: usize, a2: usize, b2: usize| u[(a, b)].conj() * v[(a2, b2)].conj();
    -(e(j, m, k, n) - e(j, n, k, m) - e(k, m, j, n) + e(k, n, j, m))
}

/// Concurrence vector of a pure state, `C_αβ = |<ψ|(L_α ⊗ L_β)|ψ*>|`.
/// Generator pairs are streamed, never stored, so the right factor may be
/// as large as `3^(L-1)`.
pub fn pure_concurrence(state: &PureState, bipart: &Bipartition) -> Result<ConcurrenceResult> {
    bipart.contiguous_dims(&state.dims)?;
    let m = state.coefficient_matrix(&bipart.left)?;
    let (dl, dr) = (m.nrows(), m.ncols());
    let pairs = dl * (dl - 1) / 2 * (dr * (dr - 1) / 2);
    let mut sink = ComponentSink::new(pairs);
    for (alpha, pa) in so_pairs(dl).enumerate() {
        for (beta, pb) in so_pairs(dr).enumerate() {
            sink.push(alpha, beta, so_pair_element(&m, &m, pa, pb).norm());
        }
    }
    Ok(sink.finish())
}

/// Concurrence vector of a mixture `ρ = Σ_k w_k |v_k><v_k|` of real
/// vectors. `L_α ⊗ L_β` is real and supported on the four basis states
/// `S = {jm, jn, km, kn}`, so the nonzero eigenvalues of `ρ A ρ* A` are the
/// squares of the eigenvalues of `ρ_S^{1/2} A_S ρ_S^{1/2}` with `ρ_S` the
/// 4 × 4 block of `ρ` on `S`. Only those blocks are formed.
pub fn ensemble_concurrence(ens: &StateEnsemble, bipart: &Bipartition) -> Result<ConcurrenceResult> {
    if ens.is_pure() {
        return pure_concurrence(&ens.pure_state(0)?, bipart);
    }
    bipart.contiguous_dims(&ens.dims)?;
    let rank = ens.rank();
    let coeffs: Vec<CMatrix> = (0..rank)
        .map(|k| ens.pure_state(k).and_then(|s| s.coefficient_matrix(&bipart.left)))
        .collect::<Result<_>>()?;
    let (dl, dr) = (coeffs[0].nrows(), coeffs[0].ncols());
    let pairs = dl * (dl - 1) / 2 * (dr * (dr - 1) / 2);
    if pairs.saturating_mul(rank) > LOW_RANK_WORK_GUARD {
        return Err(Error::ResourceLimit(format!(
            "mixed-state concurrence with rank {rank} over {pairs} generator pairs exceeds work guard"
        )));
    }
    // x[(a·d_B + b)·r + k] = √w_k <a b|v_k>
    let mut x = vec![0.0; dl * dr * rank];
    for (k, m) in coeffs.iter().enumerate() {
        let sw = ens.weights[k].sqrt();
        for a in 0..dl {
            for b in 0..dr {
                x[(a * dr + b) * rank + k] = sw * m[(a, b)].re;
            }
        }
    }
    let row = |a: usize, b: usize| &x[(a * dr + b) * rank..(a * dr + b + 1) * rank];
    let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(u, v)| u * v).sum::<f64>();
    // Ordering jm, jn, km, kn; A = -(E_jk - E_kj) ⊗ (E_mn - E_nm).
    let a_s = Matrix4::new(0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0);
    let mut sink = ComponentSink::new(pairs);
    for (alpha, (j, k)) in so_pairs(dl).enumerate() {
        for (beta, (m, n)) in so_pairs(dr).enumerate() {
            let s = [row(j, m), row(j, n), row(k, m), row(k, n)];
            let rho_s = Matrix4::from_fn(|p, q| dot(s[p], s[q]));
            let value = if rho_s.iter().all(|&v| v == 0.0) {
                0.0
            } else {
                let (vals, vecs) = self_adjoint_eigh(&DMatrix::from_iterator(4, 4, rho_s.iter().copied()));
                let root = Vector4::from_iterator(vals.iter().map(|v| v.max(0.0).sqrt()));
                let u = Matrix4::from_iterator(vecs.iter().copied());
                let sqrt_s = u * Matrix4::from_diagonal(&root) * u.transpose();
                let t = sqrt_s * a_s * sqrt_s;
                let t = (t + t.transpose()) * 0.5;
                let mu = self_adjoint_eigenvalues(&DMatrix::from_iterator(4, 4, t.iter().copied()));
                let scale = 64.0 * f64::EPSILON * rho_s.trace();
                let roots: Vec<f64> = mu.iter().map(|v| v.abs()).filter(|&v| v > scale).collect();
                component_from_roots(&roots)
            };
            sink.push(alpha, beta, value);
        }
    }
    Ok(sink.finish())
}

/// `-Σ p ln p` over eigenvalues, with eigenvalues below [`ENTROPY_FLOOR`] dropped.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_probabilities(&hermitian_eigenvalues(&rho.matrix))
}

fn entropy_of_probabilities(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > ENTROPY_FLOOR).map(|&x| -x * x.ln()).sum::<f64>().max(0.0)
}

/// Descending singular values of the coefficient matrix across `bipart`.
pub fn schmidt_coefficients(state: &PureState, bipart: &Bipartition) -> Result<Vec<f64>> {
    if bipart.sites() != state.dims.len() {
        return Err(Error::DimensionMismatch { expected: state.dims.len(), actual: bipart.sites() });
    }
    let m = state.coefficient_matrix(&bipart.left)?;
    let m = if m.nrows() <= m.ncols() { m } else { m.adjoint() };
    let mut s = singular_values(&m);
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Entanglement entropy `-Σ λ² ln λ²` from Schmidt coefficients.
pub fn schmidt_entropy(coefficients: &[f64]) -> f64 {
    let p: Vec<f64> = coefficients.iter().map(|s| s * s).collect();
    entropy_of_probabilities(&p)
}

/// Local Bloch vectors and correlation tensor over SU(d) generators.
#[derive(Debug, Clone)]
pub struct CoherenceDecomposition {
    pub dim_a: usize,
    pub dim_b: usize,
    /// `λ_Ai = tr(ρ λ̂_Ai ⊗ I)`.
    pub bloch_a: DVector<f64>,
    /// `λ_Bi = tr(ρ I ⊗ λ̂_Bi)`.
    pub bloch_b: DVector<f64>,
    /// `K_ij = tr(ρ λ̂_Ai ⊗ λ̂_Bj)`.
    pub k_tensor: DMatrix<f64>,
}

impl CoherenceDecomposition {
    /// `I/(d_A d_B) + Σ λ_Ai λ̂_Ai ⊗ I/(2 d_B) + Σ λ_Bj I ⊗ λ̂_Bj/(2 d_A) + Σ K_ij λ̂_Ai ⊗ λ̂_Bj / 4`.
    pub fn reconstruct(&self) -> Result<CMatrix> {
        let (da, db) = (self.dim_a, self.dim_b);
        let ga = su_generators(da)?;
        let gb = su_generators(db)?;
        let ia = CMatrix::identity(da, da);
        let ib = CMatrix::identity(db, db);
        let mut rho = CMatrix::identity(da * db, da * db) * c(1.0 / (da * db) as f64);
        for (i, g) in ga.generators.iter().enumerate() {
            rho += g.kronecker(&ib) * c(self.bloch_a[i] / (2.0 * db as f64));
        }
        for (j, g) in gb.generators.iter().enumerate() {
            rho += ia.kronecker(g) * c(self.bloch_b[j] / (2.0 * da as f64));
        }
        for (i, gi) in ga.generators.iter().enumerate() {
            for (j, gj) in gb.generators.iter().enumerate() {
                rho += gi.kronecker(gj) * c(self.k_tensor[(i, j)] / 4.0);
            }
        }
        Ok(rho)
    }
}

pub fn coherence_decomposition(rho: &DensityMatrix) -> Result<CoherenceDecomposition> {
    if rho.dims.len() != 2 {
        return Err(Error::Domain(format!("two-factor state required, got dims {:?}", rho.dims)));
    }
    let (da, db) = (rho.dims[0], rho.dims[1]);
    let ga = su_generators(da)?;
    let gb = su_generators(db)?;
    // x[j][(a, a')] = Σ_{b,b'} ρ[(a,b),(a',b')] G_j[b',b], and the same with the identity.
    let block_trace = |g: Option<&CMatrix>| {
        CMatrix::from_fn(da, da, |a, a2| {
            let mut acc = c(0.0);
            for b in 0..db {
                match g {
                    None => acc += rho.matrix[(a * db + b, a2 * db + b)],
                    Some(g) => {
                        for b2 in 0..db {
                            if g[(b2, b)] != c(0.0) {
                                acc += rho.matrix[(a * db + b, a2 * db + b2)] * g[(b2, b)];
                            }
                        }
                    }
                }
            }
            acc
        })
    };
    let trace_with = |g: &CMatrix, x: &CMatrix| (g * x).trace().re;
    let reduced_a = block_trace(None);
    let bloch_a = DVector::from_iterator(ga.len(), ga.generators.iter().map(|g| trace_with(g, &reduced_a)));
    let partial: Vec<CMatrix> = gb.generators.iter().map(|g| block_trace(Some(g))).collect();
    let bloch_b = DVector::from_iterator(gb.len(), partial.iter().map(|x| x.trace().re));
    let k_tensor = DMatrix::from_fn(ga.len(), gb.len(), |i, j| trace_with(&ga.generators[i], &partial[j]));
    Ok(CoherenceDecomposition { dim_a: da, dim_b: db, bloch_a, bloch_b, k_tensor })
}

/// How criterion-matrix eigenvalues are ordered before the classical /
/// quantum index split.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaOrdering {
    #[default]
    DescendingAbs,
    DescendingValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZhouCorrelations {
    pub total: f64,
    pub classical: f64,
    pub quantum: f64,
    /// Eigenvalues of the criterion matrix in the split order.
    pub criterion_eigenvalues: Vec<f64>,
}

/// Criterion matrix `K Kᵀ - (λ_B·λ_B) λ_A λ_Aᵀ`.
pub fn criterion_matrix(decomp: &CoherenceDecomposition) -> DMatrix<f64> {
    let b2 = decomp.bloch_b.norm_squared();
    &decomp.k_tensor * decomp.k_tensor.transpose() - &decomp.bloch_a * decomp.bloch_a.transpose() * b2
}

pub fn zhou_correlations(decomp: &CoherenceDecomposition, dim_a: usize) -> Result<ZhouCorrelations> {
    zhou_correlations_with(decomp, dim_a, LambdaOrdering::default())
}

/// `C = ¼ Σ_{i<d_A} |Λ_i|`, `Q = ¼ Σ_{i>=d_A} |Λ_i|` (1-based `i`),
/// `τ = C + Q`.
pub fn zhou_correlations_with(
    decomp: &CoherenceDecomposition,
    dim_a: usize,
    ordering: LambdaOrdering,
) -> Result<ZhouCorrelations> {
    let n = dim_a * dim_a - 1;
    if decomp.dim_a != dim_a || decomp.bloch_a.len() != n || decomp.k_tensor.nrows() != n {
        return Err(Error::Domain(format!(
            "decomposition with {} local components does not match d_A = {dim_a}",
            decomp.bloch_a.len()
        )));
    }
    let mut lambda = symmetric_eigenvalues(&criterion_matrix(decomp));
    match ordering {
        LambdaOrdering::DescendingAbs => lambda.sort_by(|a, b| b.abs().total_cmp(&a.abs())),
        LambdaOrdering::DescendingValue => lambda.sort_by(|a, b| b.total_cmp(a)),
    }
    let classical = lambda[..dim_a - 1].iter().map(|x| x.abs()).sum::<f64>() / 4.0;
    let quantum = lambda[dim_a - 1..].iter().map(|x| x.abs()).sum::<f64>() / 4.0;
    Ok(ZhouCorrelations { total: classical + quantum, classical, quantum, criterion_eigenvalues: lambda })
}

/// Zhou correlations of a two-factor state.
pub fn zhou_of(rho: &DensityMatrix) -> Result<ZhouCorrelations> {
    let d = coherence_decomposition(rho)?;
    zhou_correlations(&d, d.dim_a)
}
