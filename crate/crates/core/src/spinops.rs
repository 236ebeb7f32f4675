//! Spin-1 single-site operators and the traceless Hermitian generator
//! families used by the concurrence vector (SO(d)) and the coherence-vector
//! decomposition (SU(d)).
//!
//! All generators are normalized so that `tr(G_i G_j) = 2 δ_ij`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CMatrix;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Spin-1 operators in the S_z eigenbasis ordered (m = +1, 0, -1), ħ = 1.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
}

impl SpinOperators {
    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.sx, &self.sy, &self.sz]
    }
}

pub fn spin1_operators() -> SpinOperators {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| Complex64::new(x, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let sx = DMatrix::from_row_slice(3, 3, &[z, c(r), z, c(r), z, c(r), z, c(r), z]);
    let sy = DMatrix::from_row_slice(
        3,
        3,
        &[z, -I * r, z, I * r, z, -I * r, z, I * r, z],
    );
    let sz = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), z, c(-1.0)]));
    SpinOperators { sx, sy, sz }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Antisymmetric-type generators of SO(d), `d(d-1)/2` of them.
    So,
    /// Generalized Gell-Mann matrices of SU(d), `d² - 1` of them.
    Su,
}

/// An ordered basis of traceless Hermitian `d × d` generators.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub dim: usize,
    pub kind: GeneratorKind,
    pub generators: Vec<CMatrix>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Index range of the antisymmetric (SO) block inside the set.
    pub fn antisymmetric_block(&self) -> std::ops::Range<usize> {
        let n = self.dim * (self.dim - 1) / 2;
        match self.kind {
            GeneratorKind::So => 0..n,
            GeneratorKind::Su => n..2 * n,
        }
    }
}

/// Lexicographic `(j, k)` pairs with `0 <= j < k < d`, the index set of the
/// SO(d) generators. Lazy, so it can be streamed for very large `d`.
pub fn so_pairs(d: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..d).flat_map(move |j| (j + 1..d).map(move |k| (j, k)))
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// `L^(jk) = -i(|j><k| - |k><j|)`.
pub fn so_generator(d: usize, j: usize, k: usize) -> CMatrix {
    let mut g = CMatrix::zeros(d, d);
    g[(j, k)] = -I;
    g[(k, j)] = I;
    g
}

/// The `d(d-1)/2` generators of SO(d), ordered lexicographically in `(j, k)`.
/// For `d = 2` this is exactly the Pauli-y matrix.
pub fn so_generators(d: usize) -> Result<GeneratorSet> {
    check_dim(d)?;
    let generators = so_pairs(d).map(|(j, k)| so_generator(d, j, k)).collect();
    Ok(GeneratorSet { dim: d, kind: GeneratorKind::So, generators })
}

/// The `d² - 1` generalized Gell-Mann matrices of SU(d).
///
/// Ordering: symmetric off-diagonal `|j><k| + |k><j|` (lexicographic in
/// `(j, k)`), then antisymmetric off-diagonal (identical to
/// [`so_generators`], same order), then the `d - 1` diagonal matrices
/// `sqrt(2/(l(l+1))) (Σ_{m<l} |m><m| - l |l><l|)` for `l = 1..d`.
pub fn su_generators(d: usize) -> Result<GeneratorSet> {
    check_dim(d)?;
    let one = Complex64::new(1.0, 0.0);
    let mut generators = Vec::with_capacity(d * d - 1);
    for (j, k) in so_pairs(d) {
        let mut g = CMatrix::zeros(d, d);
        g[(j, k)] = one;
        g[(k, j)] = one;
        generators.push(g);
    }
    generators.extend(so_pairs(d).map(|(j, k)| so_generator(d, j, k)));
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut g = CMatrix::zeros(d, d);
        for m in 0..l {
            g[(m, m)] = Complex64::new(scale, 0.0);
        }
        g[(l, l)] = Complex64::new(-scale * l as f64, 0.0);
        generators.push(g);
    }
    Ok(GeneratorSet { dim: d, kind: GeneratorKind::Su, generators })
}
