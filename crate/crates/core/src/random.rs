//! Seeded pseudo-random states, unitaries and skew-Hermitian matrices.
//!
//! All draws come from a ChaCha8 stream seeded with a `u64`, which is
//! platform-independent, so a seed pins the output bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{CMatrix, CVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex standard Gaussian with independent real and imaginary parts.
pub fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized complex Gaussian vector.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> CVector {
    CVector::from_vec((0..dim).map(|_| gaussian(rng)).collect()).normalized()
}

/// Normalized state drawn from a fresh stream for `seed`.
pub fn seeded_state(seed: u64, dim: usize) -> CVector {
    random_state(&mut rng(seed), dim)
}

/// Haar-distributed unitary: Gram–Schmidt QR of a Gaussian matrix with the
/// phases of R's diagonal absorbed into Q.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<C64> = (0..n).map(|r| g[(r, j)]).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    CMatrix::from_fn(n, n, |r, col| cols[col][r])
}

/// Random skew-Hermitian matrix `(G − G†)/2` with Gaussian `G`.
pub fn random_skew_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    (&g - &g.adjoint()).scale_real(0.5)
}

/// Random Hermitian matrix `(G + G†)/2` with Gaussian `G`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    (&g + &g.adjoint()).scale_real(0.5)
}
