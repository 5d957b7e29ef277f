//! Lie algebra of simulable Hamiltonians.
//!
//! For a coined walk with shift `S` of order `r`, the reachable effective
//! Hamiltonians (times `−i`) form the real Lie algebra generated by
//! `S^k (u(c) ⊗ I_N) S^{r−k}`, `k = 0..r−1`. This module builds those
//! generators, closes them under brackets numerically, and answers membership
//! queries against the resulting orthonormal basis.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{c, commutator, hermitian_eig, kron, CMatrix, C64, HERMITIAN_TOL};
use crate::walks::{example_walk, shift_order, CoinedWalk};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-6;

fn unit(n: usize, j: usize, k: usize, z: C64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(j, k)] = z;
    m
}

/// Basis of `u(c)`: `i·E_kk`, then `E_jk − E_kj` and `i(E_jk + E_kj)` for `j < k`.
pub fn u_basis(coin_dim: usize) -> Vec<CMatrix> {
    let n = coin_dim;
    let mut out: Vec<CMatrix> = (0..n).map(|k| unit(n, k, k, c(0.0, 1.0))).collect();
    for j in 0..n {
        for k in j + 1..n {
            out.push(&unit(n, j, k, c(1.0, 0.0)) - &unit(n, k, j, c(1.0, 0.0)));
            out.push(&unit(n, j, k, c(0.0, 1.0)) + &unit(n, k, j, c(0.0, 1.0)));
        }
    }
    out
}

/// Traceless basis of `su(c)`: the off-diagonal part of [`u_basis`] plus
/// `c − 1` diagonal elements `i·diag(1, …, 1, −l, 0, …)/√(l(l+1))`.
pub fn su_basis(coin_dim: usize) -> Result<Vec<CMatrix>> {
    let n = coin_dim;
    if n < 2 {
        return Err(Error::TooSmall {
            what: "coin dimension",
            min: 2,
            got: n,
        });
    }
    let mut out = Vec::with_capacity(n * n - 1);
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut d = vec![c(0.0, 0.0); n];
        for z in d.iter_mut().take(l) {
            *z = c(0.0, 1.0 / norm);
        }
        d[l] = c(0.0, -(l as f64) / norm);
        out.push(CMatrix::diag(&d));
    }
    out.extend(u_basis(n).into_iter().skip(n));
    Ok(out)
}

/// `S^k (B ⊗ I_N) S^{r−k}` for `k = 0..r−1` and `B` over [`u_basis`], `k`-major.
pub fn generators(w: &CoinedWalk) -> Vec<CMatrix> {
    let r = shift_order(w);
    let s = w.shift_matrix();
    let id = CMatrix::identity(w.walker_dim());
    let lifted: Vec<CMatrix> = u_basis(w.coin_dim()).iter().map(|b| kron(b, &id)).collect();
    let mut out = Vec::with_capacity(r * lifted.len());
    let mut sk = CMatrix::identity(w.dim());
    for _ in 0..r {
        let sk_inv = sk.transpose();
        out.extend(lifted.iter().map(|g| &(&sk * g) * &sk_inv));
        sk = &s * &sk;
    }
    out
}

fn flatten(m: &CMatrix) -> Vec<f64> {
    m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal (real Hilbert–Schmidt) basis of a Lie algebra of skew-Hermitian matrices.
#[derive(Clone, Debug)]
pub struct LieBasis {
    dim_ambient: usize,
    elements: Vec<CMatrix>,
    flat: Vec<Vec<f64>>,
    tol: f64,
    generator_count: usize,
    passes: usize,
}

/// Summary written by the `closure` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureReport {
    pub ambient_dim: usize,
    pub dimension: usize,
    pub tolerance: f64,
    pub generator_count: usize,
    pub passes: usize,
}

impl LieBasis {
    fn empty(dim_ambient: usize, tol: f64, generator_count: usize) -> Self {
        Self {
            dim_ambient,
            elements: vec![],
            flat: vec![],
            tol,
            generator_count,
            passes: 0,
        }
    }

    /// Side length of the matrices (`c·N` for a walk).
    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    /// Dimension of the algebra.
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    pub fn report(&self) -> ClosureReport {
        ClosureReport {
            ambient_dim: self.dim_ambient,
            dimension: self.dimension(),
            tolerance: self.tol,
            generator_count: self.generator_count,
            passes: self.passes,
        }
    }

    /// Normalizes `candidate`, removes its projection on the current span
    /// (two Gram–Schmidt passes) and admits the remainder when its norm exceeds `tol`.
    fn try_admit(&mut self, candidate: CMatrix) -> bool {
        let mut v = flatten(&candidate);
        let n0 = norm(&v);
        if n0 == 0.0 || !n0.is_finite() {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= n0);
        self.project_out(&mut v);
        // the second pass moves the residual by O(ε) only, so clear members stop here
        if norm(&v) <= 0.5 * self.tol {
            return false;
        }
        self.project_out(&mut v);
        let r = norm(&v);
        if r <= self.tol {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= r);
        let d = self.dim_ambient;
        let m = CMatrix::from_vec(d, d, v.chunks(2).map(|p| c(p[0], p[1])).collect())
            .expect("flattened square");
        self.elements.push(m);
        self.flat.push(v);
        true
    }

    fn project_out(&self, v: &mut [f64]) {
        for b in &self.flat {
            let p = dot(b, v);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
    }

    /// `‖x − Σ_k ⟨b_k, x⟩ b_k‖`
    fn projection_residual(&self, x: &CMatrix) -> f64 {
        let mut v = flatten(x);
        self.project_out(&mut v);
        norm(&v)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::ToleranceOutOfRange(tol));
    }
    Ok(())
}

fn check_skew(x: &CMatrix) -> Result<()> {
    let residual = x.skew_hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotSkewHermitian { residual });
    }
    Ok(())
}

/// Real Lie algebra generated by `gens`, as an orthonormal basis.
///
/// The algebra is spanned by nested brackets `[g₁, [g₂, …, g_k]]` of
/// generators, so each pass brackets the elements admitted in the previous
/// pass with the (orthonormalized) generators only. The loop ends after a
/// pass that admits nothing.
pub fn lie_closure(gens: &[CMatrix], tol: f64) -> Result<LieBasis> {
    check_tol(tol)?;
    let dim = gens.first().map(|g| g.rows()).unwrap_or(0);
    for g in gens {
        if g.shape() != (dim, dim) {
            return Err(Error::DimMismatch {
                expected: format!("{dim}x{dim}"),
                got: format!("{}x{}", g.rows(), g.cols()),
            });
        }
        check_skew(g)?;
    }
    let mut basis = LieBasis::empty(dim, tol, gens.len());
    for g in gens {
        basis.try_admit(g.clone());
    }
    let spanning = basis.dimension();
    let cap = dim * dim + 10;
    let mut frontier = 0;
    loop {
        basis.passes += 1;
        if basis.passes > cap {
            return Err(Error::IterationCapExceeded(cap));
        }
        let known = basis.dimension();
        for j in frontier..known {
            for i in 0..spanning.min(j) {
                let bracket = commutator(&basis.elements[i], &basis.elements[j])?;
                basis.try_admit(bracket);
            }
        }
        if basis.dimension() == known {
            break;
        }
        frontier = known;
    }
    Ok(basis)
}

/// Relative distance of `x` from the span: `‖x − P x‖_F / ‖x‖_F` (0 for `x = 0`).
pub fn member_residual(basis: &LieBasis, x: &CMatrix) -> Result<f64> {
    let d = basis.dim_ambient;
    if x.shape() != (d, d) {
        return Err(Error::DimMismatch {
            expected: format!("{d}x{d}"),
            got: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    check_skew(x)?;
    let nx = x.frobenius_norm();
    if nx == 0.0 {
        return Ok(0.0);
    }
    Ok(basis.projection_residual(x) / nx)
}

/// Whether `−i·h` lies in the algebra up to `tol`.
pub fn is_simulable(basis: &LieBasis, h: &CMatrix, tol: f64) -> Result<bool> {
    let residual = h.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NonHermitian { residual });
    }
    Ok(member_residual(basis, &h.scale(c(0.0, -1.0)))? <= tol)
}

/// `max_b member_residual(S b S⁻¹)` over the basis.
pub fn conjugation_invariance_residual(basis: &LieBasis, w: &CoinedWalk) -> Result<f64> {
    if w.dim() != basis.dim_ambient {
        return Err(Error::DimMismatch {
            expected: basis.dim_ambient.to_string(),
            got: w.dim().to_string(),
        });
    }
    let s = w.shift_matrix();
    let s_inv = s.transpose();
    basis
        .elements
        .iter()
        .map(|b| member_residual(basis, &(&(&s * b) * &s_inv)))
        .try_fold(0.0_f64, |acc, r| Ok(acc.max(r?)))
}

/// Eigenvalues rounded to `digits` decimals with multiplicities, largest first.
///
/// Hermitian input is diagonalized directly; skew-Hermitian input `X` is
/// reported through the eigenvalues of `−iX`, so an eigenvalue `iμ` of `X`
/// shows up as `μ`.
pub fn spectrum_multiset(h: &CMatrix, digits: i32) -> Result<Vec<(f64, usize)>> {
    let values = if h.is_hermitian(HERMITIAN_TOL) {
        hermitian_eig(h)?.values
    } else if h.is_skew_hermitian(HERMITIAN_TOL) {
        hermitian_eig(&h.scale(c(0.0, -1.0)))?.values
    } else {
        return Err(Error::NonNormalInput);
    };
    let scale = 10f64.powi(digits);
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *counts.entry((v * scale).round() as i64).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .rev()
        .map(|(k, m)| (k as f64 / scale + 0.0, m))
        .collect())
}

/// Closure of the example walk's generators at [`DEFAULT_TOL`].
pub fn example_closure() -> LieBasis {
    lie_closure(&generators(&example_walk()), DEFAULT_TOL)
        .expect("example generators are skew-Hermitian")
}

/// `diag(−3i, i, 2i) ⊗ I₄`
pub fn example_diagonal_element() -> CMatrix {
    kron(
        &CMatrix::diag(&[c(0.0, -3.0), c(0.0, 1.0), c(0.0, 2.0)]),
        &CMatrix::identity(4),
    )
}

/// Element `A⊗I + B⊗S₁ + C⊗S₂ + D⊗S₃` of the example algebra with spectrum
/// `±3i` (once), `±i` (three times) and `0` (four times).
///
/// `S₁, S₂, S₃` share the eigenvectors `(1,1,1,1)/2`, `(1,−1,1,−1)/2`,
/// `(1,1,−1,−1)/2`, `(1,−1,−1,1)/2` with sign patterns `(+,+,+)`, `(+,−,−)`,
/// `(−,+,−)`, `(−,−,+)`. On eigenvector `k` the element acts on the coin as
/// `M_k = A + s₁(k)B + s₂(k)C + s₃(k)D`; choosing `M₀ = diag(3i, −3i, 0)` and
/// `M₁ = M₂ = M₃ = diag(i, −i, 0)` and inverting the (orthogonal) sign table
/// gives traceless `A, B, C, D`.
pub fn example_subspace_element() -> CMatrix {
    let signs: [[f64; 3]; 4] = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let blocks: Vec<CMatrix> = (0..4)
        .map(|k| {
            let a = if k == 0 { 3.0 } else { 1.0 };
            CMatrix::diag(&[c(0.0, a), c(0.0, -a), c(0.0, 0.0)])
        })
        .collect();
    let combine = |weights: &dyn Fn(usize) -> f64| -> CMatrix {
        blocks
            .iter()
            .enumerate()
            .fold(CMatrix::zeros(3, 3), |acc, (k, m)| {
                &acc + &m.scale_real(weights(k) / 4.0)
            })
    };
    let a = combine(&|_| 1.0);
    let coeffs: Vec<CMatrix> = (0..3).map(|s| combine(&|k| signs[k][s])).collect();
    let w = example_walk();
    let mut x = kron(&a, &CMatrix::identity(4));
    for (s, b) in coeffs.iter().enumerate() {
        x = &x + &kron(b, &w.coin_block(s));
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::hs_inner;
    use crate::walks::cycle_walk;

    // rank of the real span, without bracketing
    fn gram_rank(mats: &[CMatrix]) -> usize {
        let mut b = LieBasis::empty(mats[0].rows(), 1e-9, mats.len());
        mats.iter().filter(|m| b.try_admit((*m).clone())).count()
    }

    #[test]
    fn u_basis_cases() {
        let u1 = u_basis(1);
        assert_eq!(u1, vec![CMatrix::diag(&[c(0.0, 1.0)])]);
        let u2 = u_basis(2);
        assert_eq!(u2.len(), 4);
        for (i, a) in u2.iter().enumerate() {
            assert!(a.is_skew_hermitian(0.0));
            for b in &u2[i + 1..] {
                assert_eq!(hs_inner(a, b).unwrap(), 0.0);
            }
        }
        let u3 = u_basis(3);
        assert_eq!(u3.len(), 9);
        assert_eq!(gram_rank(&u3), 9);
    }

    #[test]
    fn su_basis_cases() {
        assert_eq!(su_basis(2).unwrap().len(), 3);
        let su3 = su_basis(3).unwrap();
        assert_eq!(su3.len(), 8);
        assert_eq!(gram_rank(&su3), 8);
        assert!(su3
            .iter()
            .all(|m| m.trace().norm() <= 1e-14 && m.is_skew_hermitian(0.0)));
        assert!(su_basis(1).is_err());
    }

    #[test]
    fn generator_counts() {
        assert_eq!(generators(&example_walk()).len(), 18);
        let w = cycle_walk(4).unwrap();
        let gens = generators(&w);
        assert_eq!(gens.len(), 16);
        assert!(gens
            .iter()
            .all(|g| g.is_skew_hermitian(0.0) && hs_inner(g, g).unwrap() > 0.0));
        // conjugating the k-th family by S gives the (k+1 mod r)-th family
        let s = w.shift_matrix();
        for (idx, g) in gens.iter().enumerate() {
            let conj = &(&s * g) * &s.transpose();
            assert_eq!(conj, gens[(idx + 4) % 16]);
        }
    }

    #[test]
    fn closure_small_cases() {
        let lifted: Vec<CMatrix> = u_basis(2)
            .iter()
            .map(|b| kron(b, &CMatrix::identity(3)))
            .collect();
        let basis = lie_closure(&lifted, DEFAULT_TOL).unwrap();
        assert_eq!(basis.dimension(), 4);

        let x = u_basis(3)[4].clone();
        assert_eq!(lie_closure(&[x], DEFAULT_TOL).unwrap().dimension(), 1);

        assert!(matches!(
            lie_closure(&[CMatrix::identity(2)], DEFAULT_TOL),
            Err(Error::NotSkewHermitian { .. })
        ));
        assert!(matches!(
            lie_closure(&lifted, 1e-3),
            Err(Error::ToleranceOutOfRange(_))
        ));
    }

    #[test]
    fn basis_is_orthonormal() {
        let basis = example_closure();
        let els = basis.elements();
        for (i, a) in els.iter().enumerate() {
            assert!(a.is_skew_hermitian(1e-10));
            assert!((hs_inner(a, a).unwrap() - 1.0).abs() <= basis.tol());
            for b in &els[i + 1..] {
                assert!(hs_inner(a, b).unwrap().abs() <= basis.tol());
            }
        }
    }

    #[test]
    fn example_closure_dimension_and_members() {
        let basis = example_closure();
        assert_eq!(basis.dimension(), 33);
        assert!(member_residual(&basis, &basis.elements()[5]).unwrap() <= 1e-10);
        assert!(member_residual(&basis, &example_diagonal_element()).unwrap() <= 1e-8);
        let outside = kron(&unit(3, 0, 0, c(0.0, 1.0)), &unit(4, 0, 0, c(1.0, 0.0)));
        assert!(member_residual(&basis, &outside).unwrap() > 0.1);
        assert_eq!(
            member_residual(&basis, &CMatrix::zeros(12, 12)).unwrap(),
            0.0
        );
        assert!(member_residual(&basis, &CMatrix::zeros(4, 4)).is_err());
        assert!(matches!(
            member_residual(&basis, &CMatrix::identity(12)),
            Err(Error::NotSkewHermitian { .. })
        ));
    }

    #[test]
    fn simulable_queries() {
        let w = cycle_walk(4).unwrap();
        let basis = lie_closure(&generators(&w), DEFAULT_TOL).unwrap();
        let h = crate::limits::limit_hamiltonian_cycle(4).unwrap();
        assert!(is_simulable(&basis, &h, 1e-6).unwrap());
        assert!(is_simulable(&basis, &CMatrix::zeros(8, 8), 1e-6).unwrap());

        let ex = example_closure();
        let localized = kron(&unit(3, 0, 0, c(1.0, 0.0)), &unit(4, 0, 0, c(1.0, 0.0)));
        assert!(!is_simulable(&ex, &localized, 1e-6).unwrap());
        let not_herm = unit(12, 0, 1, c(1.0, 0.0));
        assert!(matches!(
            is_simulable(&ex, &not_herm, 1e-6),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn cycle4_closure_matches_analytic_basis() {
        // F² is an involution for n = 4; on its ±1 eigenspaces the generators act
        // as B and σz·B·σz, so the algebra is i·1 ⊕ su(2) ⊕ su(2) (dimension 7).
        let f = CMatrix::permutation(&[1, 2, 3, 0]);
        let p = &f * &f;
        let id = CMatrix::identity(4);
        let q_plus = (&id + &p).scale_real(0.5);
        let q_minus = (&id - &p).scale_real(0.5);
        let sz = CMatrix::diag_real(&[1.0, -1.0]);
        let mut oracle = vec![CMatrix::identity(8).scale(c(0.0, 1.0))];
        for x in su_basis(2).unwrap() {
            oracle.push(kron(&x, &q_plus));
            oracle.push(kron(&(&(&sz * &x) * &sz), &q_minus));
        }
        let analytic = lie_closure(&oracle, DEFAULT_TOL).unwrap();
        assert_eq!(analytic.dimension(), 7);

        let basis = lie_closure(&generators(&cycle_walk(4).unwrap()), DEFAULT_TOL).unwrap();
        assert_eq!(basis.dimension(), 7);
        for x in analytic.elements() {
            assert!(member_residual(&basis, x).unwrap() <= 1e-9);
        }
        for tol in [1e-10, 1e-8] {
            assert_eq!(
                lie_closure(&generators(&cycle_walk(4).unwrap()), tol)
                    .unwrap()
                    .dimension(),
                7
            );
        }
    }

    #[test]
    fn conjugation_invariance() {
        let w = example_walk();
        assert!(conjugation_invariance_residual(&example_closure(), &w).unwrap() <= 1e-8);
        let c4 = cycle_walk(4).unwrap();
        let basis = lie_closure(&generators(&c4), DEFAULT_TOL).unwrap();
        assert!(conjugation_invariance_residual(&basis, &c4).unwrap() <= 1e-8);
        let scalar = lie_closure(&[CMatrix::identity(8).scale(c(0.0, 1.0))], DEFAULT_TOL).unwrap();
        assert!(conjugation_invariance_residual(&scalar, &c4).unwrap() <= 1e-14);
        assert!(conjugation_invariance_residual(&scalar, &w).is_err());
    }

    #[test]
    fn spectra() {
        let a = crate::graphs::adjacency(example_walk().graph());
        assert_eq!(spectrum_multiset(&a, 8).unwrap(), vec![(3.0, 1), (-1.0, 3)]);
        let h = crate::limits::limit_hamiltonian_cycle(4).unwrap();
        assert_eq!(
            spectrum_multiset(&h, 8).unwrap(),
            vec![(2.0, 2), (0.0, 4), (-2.0, 2)]
        );
        assert_eq!(
            spectrum_multiset(&CMatrix::zeros(5, 5), 8).unwrap(),
            vec![(0.0, 5)]
        );
        let bad = unit(2, 0, 1, c(1.0, 0.0));
        assert_eq!(spectrum_multiset(&bad, 8), Err(Error::NonNormalInput));
    }

    #[test]
    fn subspace_element() {
        let x = example_subspace_element();
        assert!(x.is_skew_hermitian(1e-14));
        assert_eq!(
            spectrum_multiset(&x, 8).unwrap(),
            vec![(3.0, 1), (1.0, 3), (0.0, 4), (-1.0, 3), (-3.0, 1)]
        );
        assert!(member_residual(&example_closure(), &x).unwrap() <= 1e-8);
    }
}
