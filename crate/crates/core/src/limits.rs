//! Perturbed coin protocols and the limit that turns coined steps into
//! continuous-time evolution.
//!
//! An [`Atom`] is a sequence of steps `M_j(x) = S·(C_j e^{E_j a_j x} ⊗ I)` whose
//! unperturbed product `M_1(0)·…·M_m(0)` is a global phase `φ` times the
//! identity. Its effective Hamiltonian `H = iφ⁻¹·T′(0)` satisfies
//! `φ⁻¹T(x) = e^{−iHx} + O(x²)`, and `(φ⁻¹T(γt/m))^m → e^{−iγHt}` as `m → ∞`.
//!
//! Products are written left to right: `M_m` is applied to a state first.
//! Composite protocols realize sums ([`Protocol::concat`]) and brackets
//! ([`Protocol::commutator`]) of effective Hamiltonians.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{adjacency, laplacian};
use crate::numerics::{
    c, commutator, expm_hermitian, expm_skew_hermitian, kron, CMatrix, CVector, C64, HERMITIAN_TOL,
};
use crate::walks::{circulant_shift, cycle_walk, CoinedWalk};

/// Perturbation parameters must lie in `[0, EPSILON)`.
pub const EPSILON: f64 = 1.0;

/// Tolerance for the reference trajectory being a multiple of the identity.
pub const PHASE_TOL: f64 = 1e-10;

/// One perturbed step: coin `C`, skew-Hermitian generator `E`, slope `a` (`f(x) = a·x`).
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolStep {
    coin: CMatrix,
    generator: CMatrix,
    slope: f64,
}

impl ProtocolStep {
    pub fn new(coin: CMatrix, generator: CMatrix, slope: f64) -> Result<Self> {
        if !coin.is_square() || generator.shape() != coin.shape() {
            return Err(Error::DimMismatch {
                expected: format!("{0}x{0} coin and generator", coin.rows()),
                got: format!(
                    "{}x{} and {}x{}",
                    coin.rows(),
                    coin.cols(),
                    generator.rows(),
                    generator.cols()
                ),
            });
        }
        let residual = coin.unitary_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotUnitary { residual });
        }
        let residual = generator.skew_hermitian_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotSkewHermitian { residual });
        }
        if !slope.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "slope must be finite, got {slope}"
            )));
        }
        Ok(Self {
            coin,
            generator,
            slope,
        })
    }

    /// Unperturbed step with coin `C`.
    pub fn plain(coin: CMatrix) -> Result<Self> {
        let n = coin.rows();
        Self::new(coin, CMatrix::zeros(n, n), 0.0)
    }

    pub fn coin(&self) -> &CMatrix {
        &self.coin
    }

    pub fn generator(&self) -> &CMatrix {
        &self.generator
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    fn perturbed_coin(&self, x: f64) -> Result<CMatrix> {
        let s = self.slope * x;
        if s == 0.0 {
            return Ok(self.coin.clone());
        }
        Ok(&self.coin * &expm_skew_hermitian(&self.generator, s)?)
    }
}

/// Sequence of perturbed steps on one walk, validated to return to the
/// identity (up to a phase) at `x = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    walk: CoinedWalk,
    steps: Vec<ProtocolStep>,
    phase: C64,
}

impl Atom {
    pub fn new(walk: CoinedWalk, steps: Vec<ProtocolStep>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidArgument(
                "protocol needs at least one step".into(),
            ));
        }
        let coin_dim = walk.coin_dim();
        if let Some(bad) = steps.iter().find(|s| s.coin.rows() != coin_dim) {
            return Err(Error::DimMismatch {
                expected: format!("{coin_dim}x{coin_dim} coins"),
                got: format!("{0}x{0}", bad.coin.rows()),
            });
        }
        let mut atom = Self {
            walk,
            steps,
            phase: c(1.0, 0.0),
        };
        let product = atom.product(0.0)?;
        let dim = product.rows();
        let phase = product.trace() / dim as f64;
        let residual = (&product - &CMatrix::identity(dim).scale(phase)).frobenius_norm();
        if residual > PHASE_TOL || (phase.norm() - 1.0).abs() > PHASE_TOL {
            return Err(Error::NotScalarAtZero { residual });
        }
        atom.phase = phase;
        Ok(atom)
    }

    pub fn walk(&self) -> &CoinedWalk {
        &self.walk
    }

    pub fn steps(&self) -> &[ProtocolStep] {
        &self.steps
    }

    pub fn phase(&self) -> C64 {
        self.phase
    }

    fn lift(&self, coin_op: &CMatrix) -> CMatrix {
        &self.walk.shift_matrix() * &kron(coin_op, &CMatrix::identity(self.walk.walker_dim()))
    }

    /// `M_1(x)·…·M_m(x)`, including the reference phase.
    fn product(&self, x: f64) -> Result<CMatrix> {
        let mut out = CMatrix::identity(self.walk.dim());
        for step in &self.steps {
            out = &out * &self.lift(&step.perturbed_coin(x)?);
        }
        Ok(out)
    }

    /// `iφ⁻¹·Σ_j M_1…M_{j−1} · S(C_j E_j a_j ⊗ I) · M_{j+1}…M_m`, all at `x = 0`.
    fn effective_hamiltonian(&self) -> CMatrix {
        let dim = self.walk.dim();
        let plain: Vec<CMatrix> = self.steps.iter().map(|s| self.lift(&s.coin)).collect();
        // suffix[j] = M_j … M_m
        let mut suffix = vec![CMatrix::identity(dim); plain.len() + 1];
        for j in (0..plain.len()).rev() {
            suffix[j] = &plain[j] * &suffix[j + 1];
        }
        let mut prefix = CMatrix::identity(dim);
        let mut derivative = CMatrix::zeros(dim, dim);
        for (j, step) in self.steps.iter().enumerate() {
            if step.slope != 0.0 {
                let tangent = self.lift(&(&step.coin * &step.generator).scale_real(step.slope));
                derivative = &derivative + &(&(&prefix * &tangent) * &suffix[j + 1]);
            }
            prefix = &prefix * &plain[j];
        }
        derivative.scale(c(0.0, 1.0) / self.phase)
    }
}

/// Protocol expression: an atom, a concatenation, or a group commutator.
#[derive(Clone, Debug, PartialEq)]
pub enum Protocol {
    Atom(Atom),
    /// `U_left(x)·U_right(x)`; effective Hamiltonian `H_left + H_right`.
    Concat(Box<Protocol>, Box<Protocol>),
    /// `U₁U₂U₁⁻¹U₂⁻¹` at `√x`; effective Hamiltonian `−i[H₁, H₂]`.
    Commutator(Box<Protocol>, Box<Protocol>),
}

impl Protocol {
    pub fn atom(walk: CoinedWalk, steps: Vec<ProtocolStep>) -> Result<Self> {
        Atom::new(walk, steps).map(Protocol::Atom)
    }

    pub fn concat(left: Protocol, right: Protocol) -> Result<Self> {
        if left.walk() != right.walk() {
            return Err(Error::MixedWalks);
        }
        Ok(Protocol::Concat(Box::new(left), Box::new(right)))
    }

    pub fn commutator(left: Protocol, right: Protocol) -> Result<Self> {
        if left.walk() != right.walk() {
            return Err(Error::MixedWalks);
        }
        Ok(Protocol::Commutator(Box::new(left), Box::new(right)))
    }

    /// The walk every atom in this expression runs on.
    pub fn walk(&self) -> &CoinedWalk {
        match self {
            Protocol::Atom(a) => &a.walk,
            Protocol::Concat(l, _) | Protocol::Commutator(l, _) => l.walk(),
        }
    }

    /// Number of walk steps one application of the protocol takes.
    pub fn step_count(&self) -> usize {
        match self {
            Protocol::Atom(a) => a.steps.len(),
            Protocol::Concat(l, r) => l.step_count() + r.step_count(),
            Protocol::Commutator(l, r) => 2 * (l.step_count() + r.step_count()),
        }
    }
}

/// `C(x) = R·e^{iDx}` with `R = [[0, −i], [−i, 0]]`, `D = [[0, −1], [−1, 0]]`.
pub fn strauch_coin(x: f64) -> CMatrix {
    let d_gen = strauch_generator();
    &strauch_r() * &expm_skew_hermitian(&d_gen, x).expect("iD is skew-Hermitian")
}

fn strauch_r() -> CMatrix {
    CMatrix::from_vec(
        2,
        2,
        vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, -1.0), c(0.0, 0.0)],
    )
    .expect("2x2")
}

/// `iD`
fn strauch_generator() -> CMatrix {
    CMatrix::from_vec(
        2,
        2,
        vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, -1.0), c(0.0, 0.0)],
    )
    .expect("2x2")
}

/// Two identical steps with coin `R·e^{iDx}` on the `n`-cycle; reference phase `−1`.
pub fn strauch_protocol(n: usize) -> Result<Protocol> {
    let walk = cycle_walk(n)?;
    let step = ProtocolStep::new(strauch_r(), strauch_generator(), 1.0)?;
    Protocol::atom(walk, vec![step.clone(), step])
}

/// `S e^{Ex} · S^{n−1} · e^{Ex}` on the `n`-cycle with `E = [[0, −i], [−i, 0]]`
/// and identity coins; reference phase `+1`.
pub fn evencyc_protocol(n: usize) -> Result<Protocol> {
    let walk = cycle_walk(n)?;
    let e = CMatrix::from_vec(
        2,
        2,
        vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, -1.0), c(0.0, 0.0)],
    )?;
    let kick = ProtocolStep::new(CMatrix::identity(2), e, 1.0)?;
    let idle = ProtocolStep::plain(CMatrix::identity(2))?;
    let mut steps = Vec::with_capacity(n);
    steps.push(kick.clone());
    steps.extend(std::iter::repeat_n(idle, n - 2));
    steps.push(kick);
    Protocol::atom(walk, steps)
}

/// `H = [[0, I + F²], [I + F^{2T}, 0]]` on the `2n`-dimensional cycle walk space.
pub fn limit_hamiltonian_cycle(n: usize) -> Result<CMatrix> {
    if n < 3 {
        return Err(Error::TooSmall {
            what: "cycle length",
            min: 3,
            got: n,
        });
    }
    let f = circulant_shift(n)?;
    let upper = &CMatrix::identity(n) + &(&f * &f);
    let mut h = CMatrix::zeros(2 * n, 2 * n);
    h.set_block(0, n, &upper);
    h.set_block(n, 0, &upper.transpose());
    Ok(h)
}

/// Global phase `φ` with `U(0) = φ·I`. Always `1` for commutators.
pub fn reference_phase(p: &Protocol) -> C64 {
    match p {
        Protocol::Atom(a) => a.phase,
        Protocol::Concat(l, r) => reference_phase(l) * reference_phase(r),
        Protocol::Commutator(..) => c(1.0, 0.0),
    }
}

fn check_domain(x: f64) -> Result<()> {
    if !(0.0..EPSILON).contains(&x) {
        return Err(Error::DomainExceeded(x));
    }
    Ok(())
}

/// `U(x)` of the protocol, phase included.
pub fn protocol_unitary(p: &Protocol, x: f64) -> Result<CMatrix> {
    check_domain(x)?;
    match p {
        Protocol::Atom(a) => a.product(x),
        Protocol::Concat(l, r) => Ok(&protocol_unitary(l, x)? * &protocol_unitary(r, x)?),
        Protocol::Commutator(l, r) => {
            let root = x.sqrt();
            let u1 = protocol_unitary(l, root)?;
            let u2 = protocol_unitary(r, root)?;
            Ok(&(&(&u1 * &u2) * &u1.adjoint()) * &u2.adjoint())
        }
    }
}

/// `H` with `φ⁻¹U(x) = e^{−iHx} + o(x)`.
pub fn effective_hamiltonian(p: &Protocol) -> CMatrix {
    match p {
        Protocol::Atom(a) => a.effective_hamiltonian(),
        Protocol::Concat(l, r) => &effective_hamiltonian(l) + &effective_hamiltonian(r),
        Protocol::Commutator(l, r) => {
            let bracket = commutator(&effective_hamiltonian(l), &effective_hamiltonian(r))
                .expect("same walk");
            bracket.scale(c(0.0, -1.0))
        }
    }
}

/// Forward-difference estimate `iφ⁻¹(U(h) − U(0))/h`.
pub fn effective_hamiltonian_fd(p: &Protocol, h: f64) -> Result<CMatrix> {
    let phase = reference_phase(p);
    let diff = &protocol_unitary(p, h)? - &protocol_unitary(p, 0.0)?;
    Ok(diff.scale(c(0.0, 1.0) / (phase * h)))
}

/// `‖φ⁻¹U(x) − e^{−iHx}‖_F`
pub fn single_step_error(p: &Protocol, x: f64) -> Result<f64> {
    let u = protocol_unitary(p, x)?.scale(reference_phase(p).inv());
    let target = expm_hermitian(&effective_hamiltonian(p), x)?;
    Ok((&u - &target).frobenius_norm())
}

/// `(φ⁻¹U(x))^m` with `x = γt/m`, and its Frobenius distance to `e^{−iγHt}`.
pub fn repeated_limit(p: &Protocol, gamma: f64, t: f64, m: usize) -> Result<(CMatrix, f64)> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "repetition count must be at least 1".into(),
        ));
    }
    let x = gamma * t / m as f64;
    let unit = protocol_unitary(p, x)?.scale(reference_phase(p).inv());
    let result = unit.pow(m);
    let target = expm_hermitian(&effective_hamiltonian(p), gamma * t)?;
    let error = (&result - &target).frobenius_norm();
    Ok((result, error))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceSample {
    /// Repetition count, absent for single-step samples.
    pub m: Option<usize>,
    pub x: f64,
    pub error: f64,
}

/// Error samples in order of decreasing `x`, with the least-squares slope of
/// `log error` against `log x` over the smaller half of the `x` values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub samples: Vec<ConvergenceSample>,
    pub fitted_exponent: Option<f64>,
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable (strictly positive) points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// [`log_log_slope`] over the last `⌈n/2⌉` points (at least two), i.e. the
/// smallest half of `x` when points are ordered by decreasing `x`.
pub fn smallest_half_slope(points: &[(f64, f64)]) -> Option<f64> {
    let keep = points.len().div_ceil(2).max(2).min(points.len());
    log_log_slope(&points[points.len() - keep..])
}

fn fit_smallest_half(samples: &[ConvergenceSample]) -> Option<f64> {
    let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.x, s.error)).collect();
    smallest_half_slope(&points)
}

/// Repeated-limit errors for each `m` (strictly ascending); `x = γt/m`.
pub fn convergence_study(
    p: &Protocol,
    gamma: f64,
    t: f64,
    m_list: &[usize],
) -> Result<ConvergenceReport> {
    if m_list.is_empty() || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "m list must be nonempty and strictly ascending".into(),
        ));
    }
    let samples = m_list
        .iter()
        .map(|&m| {
            let (_, error) = repeated_limit(p, gamma, t, m)?;
            Ok(ConvergenceSample {
                m: Some(m),
                x: gamma * t / m as f64,
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fitted_exponent = fit_smallest_half(&samples);
    Ok(ConvergenceReport {
        samples,
        fitted_exponent,
    })
}

/// Single-step errors on a strictly decreasing grid of `x` values.
pub fn single_step_study(p: &Protocol, xs: &[f64]) -> Result<ConvergenceReport> {
    if xs.is_empty() || xs.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument(
            "x grid must be nonempty and strictly decreasing".into(),
        ));
    }
    let samples = xs
        .iter()
        .map(|&x| {
            Ok(ConvergenceSample {
                m: None,
                x,
                error: single_step_error(p, x)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fitted_exponent = fit_smallest_half(&samples);
    Ok(ConvergenceReport {
        samples,
        fitted_exponent,
    })
}

/// `ψ = [ψ_R; ψ_L]`
pub fn chiral_split(psi: &CVector, n: usize) -> Result<(CVector, CVector)> {
    if psi.dim() != 2 * n {
        return Err(Error::DimMismatch {
            expected: format!("dimension {}", 2 * n),
            got: psi.dim().to_string(),
        });
    }
    let (r, l) = psi.as_slice().split_at(n);
    Ok((CVector::from_vec(r.to_vec()), CVector::from_vec(l.to_vec())))
}

/// The four combinations of the two chiralities that evolve under `±γA` on the cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiralParts {
    /// `ψ_R + Fψ_L`
    pub plus1: CVector,
    /// `ψ_L + Fᵀψ_R`
    pub plus2: CVector,
    /// `ψ_R − Fψ_L`
    pub minus1: CVector,
    /// `ψ_L − Fᵀψ_R`
    pub minus2: CVector,
}

impl ChiralParts {
    /// `½([Ψ₁₊; Ψ₂₊] + [Ψ₁₋; Ψ₂₋])`, which equals `[ψ_R; ψ_L]`.
    pub fn reconstruct(&self) -> CVector {
        let sum = &self.plus1.stack(&self.plus2) + &self.minus1.stack(&self.minus2);
        sum.scale(c(0.5, 0.0))
    }
}

pub fn chiral_combinations(psi_r: &CVector, psi_l: &CVector, n: usize) -> Result<ChiralParts> {
    for v in [psi_r, psi_l] {
        if v.dim() != n {
            return Err(Error::DimMismatch {
                expected: format!("dimension {n}"),
                got: v.dim().to_string(),
            });
        }
    }
    let f = circulant_shift(n)?;
    let f_l = f.apply(psi_l);
    let ft_r = f.transpose().apply(psi_r);
    Ok(ChiralParts {
        plus1: psi_r + &f_l,
        plus2: psi_l + &ft_r,
        minus1: psi_r - &f_l,
        minus2: psi_l - &ft_r,
    })
}

/// Direction of a chiral component: `+` evolves under `+γA`, `−` under `−γA`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `Φ = (e^{±2iγt}/2)·Ψ`; turns `iΨ̇ = ±γAΨ` into `iΦ̇ = ±γLΦ` with `L = −2I + A`.
pub fn phi_transform(psi_pm: &CVector, gamma: f64, t: f64, sign: Sign) -> CVector {
    psi_pm.scale(C64::from_polar(0.5, sign.value() * 2.0 * gamma * t))
}

/// Residuals of the exact chiral identities on the `n`-cycle for initial state `psi0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiralResiduals {
    /// max over the four `Ψ` of `‖Ψ(t) − e^{∓iγAt}Ψ(0)‖`
    pub adjacency: f64,
    /// max over the four `Φ` of `‖Φ(t) − e^{∓iγLt}Φ(0)‖`
    pub laplacian: f64,
    /// `‖½(Ψ₊ + Ψ₋)(t) − ψ(t)‖`
    pub reconstruction: f64,
}

/// Evolves `psi0` with `e^{−iγHt}` (`H` from [`limit_hamiltonian_cycle`]) and
/// checks the chiral components against adjacency and Laplacian dynamics.
pub fn chiral_residuals(n: usize, psi0: &CVector, gamma: f64, t: f64) -> Result<ChiralResiduals> {
    let h = limit_hamiltonian_cycle(n)?;
    let psi_t = expm_hermitian(&h, gamma * t)?.apply(psi0);
    let parts_of = |psi: &CVector| -> Result<ChiralParts> {
        let (r, l) = chiral_split(psi, n)?;
        chiral_combinations(&r, &l, n)
    };
    let (p0, pt) = (parts_of(psi0)?, parts_of(&psi_t)?);
    let graph = crate::graphs::cycle_graph(n)?;
    let a = adjacency(&graph);
    let l = laplacian(&graph);
    let mut adjacency_res: f64 = 0.0;
    let mut laplacian_res: f64 = 0.0;
    for sign in [Sign::Plus, Sign::Minus] {
        let s = sign.value();
        let ua = expm_hermitian(&a, s * gamma * t)?;
        let ul = expm_hermitian(&l, s * gamma * t)?;
        let pairs = match sign {
            Sign::Plus => [(&p0.plus1, &pt.plus1), (&p0.plus2, &pt.plus2)],
            Sign::Minus => [(&p0.minus1, &pt.minus1), (&p0.minus2, &pt.minus2)],
        };
        for (start, end) in pairs {
            adjacency_res = adjacency_res.max((end - &ua.apply(start)).norm());
            let phi0 = phi_transform(start, gamma, 0.0, sign);
            let phit = phi_transform(end, gamma, t, sign);
            laplacian_res = laplacian_res.max((&phit - &ul.apply(&phi0)).norm());
        }
    }
    let reconstruction = (&pt.reconstruct() - &psi_t).norm();
    Ok(ChiralResiduals {
        adjacency: adjacency_res,
        laplacian: laplacian_res,
        reconstruction,
    })
}
