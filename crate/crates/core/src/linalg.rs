//! Dense Hermitian eigensolvers that first split the matrix into the
//! connected components of its nonzero pattern. Blocks are diagonalized
//! with faer; matrices cross the boundary as nalgebra types.
//!
//! Operators conserving a quantum number (total S_z for the chain, or
//! m_A - m_B for its partial transpose) are block diagonal up to a
//! permutation, so each block is diagonalized on its own.

use faer::{Mat, Side};
use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::hamiltonian::SparseSymmetricOperator;
use crate::CMatrix;

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Components as sorted index lists, ordered by smallest member.
    fn groups(mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }
}

fn dense_components<T: ComplexField>(m: &DMatrix<T>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut sets = DisjointSets::new(n);
    let zero = T::zero();
    for c in 0..n {
        for r in 0..c {
            if m[(r, c)] != zero || m[(c, r)] != zero {
                sets.union(r, c);
            }
        }
    }
    sets.groups()
}

/// Index sets of the connected components of `h`'s off-diagonal pattern,
/// ordered by smallest member.
pub fn sparse_component_groups(h: &SparseSymmetricOperator) -> Vec<Vec<usize>> {
    let mut sets = DisjointSets::new(h.dim);
    for (r, c, v) in h.entries() {
        if v != 0.0 && r != c {
            sets.union(r, c);
        }
    }
    sets.groups()
}

/// Scalars handled by the faer eigensolver.
pub trait EigScalar: ComplexField<RealField = f64> + Copy + faer::traits::ComplexField<Real = f64> {}
impl EigScalar for f64 {}
impl EigScalar for Complex64 {}

fn to_faer<T: EigScalar>(m: &DMatrix<T>) -> Mat<T> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Ascending eigenvalues and orthonormal eigenvectors of a self-adjoint matrix.
pub fn self_adjoint_eigh<T: EigScalar>(m: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let evd = to_faer(m).self_adjoint_eigen(Side::Lower).expect("self-adjoint eigensolver failed to converge");
    let (u, s) = (evd.U(), evd.S());
    let s = s.column_vector();
    let values = (0..n).map(|i| ComplexField::real(s[i])).collect();
    (values, DMatrix::from_fn(n, n, |i, j| u[(i, j)]))
}

/// Ascending eigenvalues of a self-adjoint matrix.
pub fn self_adjoint_eigenvalues<T: EigScalar>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    to_faer(m).self_adjoint_eigenvalues(Side::Lower).expect("self-adjoint eigensolver failed to converge")
}

/// Nonincreasing singular values.
pub fn singular_values<T: EigScalar>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("singular value decomposition failed to converge")
}

fn extract<T: ComplexField + Copy>(m: &DMatrix<T>, idx: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order
}

/// Eigen-decomposition of each component; returns ascending eigenvalues and
/// the matching eigenvectors as columns of an `n × n` matrix.
fn blocked_eigh<T>(n: usize, blocks: Vec<(Vec<usize>, DMatrix<T>)>) -> (Vec<f64>, DMatrix<T>)
where
    T: EigScalar,
{
    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<(Vec<usize>, DVector<T>)> = Vec::with_capacity(n);
    for (idx, block) in blocks {
        let (vals, vecs) = self_adjoint_eigh(&block);
        for (k, ev) in vals.into_iter().enumerate() {
            values.push(ev);
            columns.push((idx.clone(), vecs.column(k).into_owned()));
        }
    }
    let order = ascending_order(&values);
    let mut vectors = DMatrix::<T>::zeros(n, n);
    let mut sorted = Vec::with_capacity(n);
    for (out_col, &k) in order.iter().enumerate() {
        sorted.push(values[k]);
        let (idx, v) = &columns[k];
        for (i, &row) in idx.iter().enumerate() {
            vectors[(row, out_col)] = v[i];
        }
    }
    (sorted, vectors)
}

fn blocked_eigenvalues<T>(blocks: impl Iterator<Item = DMatrix<T>>) -> Vec<f64>
where
    T: EigScalar,
{
    let mut values: Vec<f64> = Vec::new();
    for block in blocks {
        if block.nrows() == 1 {
            values.push(block[(0, 0)].real());
        } else {
            values.extend(self_adjoint_eigenvalues(&block));
        }
    }
    values.sort_by(f64::total_cmp);
    values
}

/// Full eigen-decomposition of a real symmetric sparse operator.
pub fn sparse_symmetric_eigh(h: &SparseSymmetricOperator) -> (Vec<f64>, DMatrix<f64>) {
    let groups = sparse_component_groups(h);
    let mut pos = vec![0usize; h.dim];
    for g in &groups {
        for (i, &row) in g.iter().enumerate() {
            pos[row] = i;
        }
    }
    let mut owner = vec![0usize; h.dim];
    for (gi, g) in groups.iter().enumerate() {
        for &row in g {
            owner[row] = gi;
        }
    }
    let mut blocks: Vec<DMatrix<f64>> = groups.iter().map(|g| DMatrix::zeros(g.len(), g.len())).collect();
    for (r, c, v) in h.entries() {
        blocks[owner[r]][(pos[r], pos[c])] += v;
    }
    blocked_eigh(h.dim, groups.into_iter().zip(blocks).collect())
}

/// Full eigen-decomposition of a dense real symmetric matrix.
pub fn symmetric_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let groups = dense_components(m);
    let blocks = groups.into_iter().map(|g| {
        let b = extract(m, &g);
        (g, b)
    });
    blocked_eigh(m.nrows(), blocks.collect())
}

/// Ascending eigenvalues of a dense real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let groups = dense_components(m);
    blocked_eigenvalues(groups.iter().map(|g| extract(m, g)))
}

/// Ascending eigenvalues of a Hermitian matrix, using real arithmetic when
/// the matrix has no imaginary part.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.iter().all(|z| z.im == 0.0) {
        return symmetric_eigenvalues(&m.map(|z| z.re));
    }
    let groups = dense_components(m);
    blocked_eigenvalues(groups.iter().map(|g| extract(m, g)))
}

/// Ascending eigenvalues and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    if m.iter().all(|z| z.im == 0.0) {
        let (v, vecs) = symmetric_eigh(&m.map(|z| z.re));
        return (v, vecs.map(|x| Complex64::new(x, 0.0)));
    }
    let groups = dense_components(m);
    let blocks = groups.into_iter().map(|g| {
        let b = extract(m, &g);
        (g, b)
    });
    blocked_eigh(m.nrows(), blocks.collect())
}

/// Positive semidefinite square root of a Hermitian matrix (negative
/// eigenvalues clipped to zero).
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&x| Complex64::new(x.max(0.0).sqrt(), 0.0)));
    &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
}
