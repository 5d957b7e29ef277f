//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every exported function returns a JSON string. Errors come back as
//! `{"error": "..."}` so the page can show them without a JS exception.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use qwl_core::liealg::{
    example_diagonal_element, example_subspace_element, generators, lie_closure, member_residual,
    spectrum_multiset, DEFAULT_TOL,
};
use qwl_core::limits::{
    convergence_study, effective_hamiltonian, evencyc_protocol, protocol_unitary, reference_phase,
    single_step_error, strauch_protocol, Protocol,
};
use qwl_core::numerics::{expm_hermitian, CVector};
use qwl_core::walks::{cycle_walk, example_walk, lattice_walk};
use qwl_core::Error;

const MAX_CYCLE: usize = 64;

fn respond<T: Serialize>(result: Result<T, Error>) -> String {
    match result {
        Ok(value) => serde_json::to_string(&value).expect("finite values"),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn cycle_protocol(name: &str, n: usize) -> Result<Protocol, Error> {
    if n > MAX_CYCLE {
        return Err(Error::InvalidArgument(format!(
            "cycle length is capped at {MAX_CYCLE} in the demo"
        )));
    }
    match name {
        "strauch" => strauch_protocol(n),
        "evencyc" => evencyc_protocol(n),
        _ => Err(Error::InvalidArgument(format!("unknown protocol `{name}`"))),
    }
}

#[derive(Serialize)]
pub struct Curve {
    pub m: Vec<usize>,
    pub x: Vec<f64>,
    pub repeated_error: Vec<f64>,
    pub single_step_error: Vec<f64>,
    pub fitted_exponent: Option<f64>,
}

/// Repeated-limit and single-step errors for `m = 2^k`, `k = 3..=max_power`.
pub fn convergence_curve_native(
    protocol: &str,
    n: usize,
    gamma: f64,
    t: f64,
    max_power: u32,
) -> Result<Curve, Error> {
    let p = cycle_protocol(protocol, n)?;
    let m_list: Vec<usize> = (3..=max_power.clamp(4, 12)).map(|k| 1usize << k).collect();
    let study = convergence_study(&p, gamma, t, &m_list)?;
    let single = study
        .samples
        .iter()
        .map(|s| single_step_error(&p, s.x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Curve {
        m: m_list,
        x: study.samples.iter().map(|s| s.x).collect(),
        repeated_error: study.samples.iter().map(|s| s.error).collect(),
        single_step_error: single,
        fitted_exponent: study.fitted_exponent,
    })
}

#[wasm_bindgen]
pub fn convergence_curve(protocol: &str, n: usize, gamma: f64, t: f64, max_power: u32) -> String {
    respond(convergence_curve_native(protocol, n, gamma, t, max_power))
}

#[derive(Serialize)]
pub struct Distributions {
    /// Vertex marginals after `m` protocol applications.
    pub discrete: Vec<f64>,
    /// Vertex marginals of the limit evolution `e^{−iγHt}`.
    pub limit: Vec<f64>,
    /// Total variation distance between the two.
    pub distance: f64,
}

fn vertex_marginals(psi: &CVector, n: usize) -> Vec<f64> {
    let p = psi.probabilities();
    (0..n).map(|j| p[j] + p[n + j]).collect()
}

/// Walker starting at vertex 0 with coin state `(|R⟩ + i|L⟩)/√2`.
pub fn walk_distributions_native(
    protocol: &str,
    n: usize,
    gamma: f64,
    t: f64,
    m: usize,
) -> Result<Distributions, Error> {
    let p = cycle_protocol(protocol, n)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let mut amp = vec![qwl_core::numerics::c(0.0, 0.0); 2 * n];
    amp[0] = qwl_core::numerics::c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amp[n] = qwl_core::numerics::c(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let psi0 = CVector::from_vec(amp);

    let step = protocol_unitary(&p, gamma * t / m as f64)?.scale(reference_phase(&p).inv());
    let mut psi = psi0.clone();
    for _ in 0..m {
        psi = step.apply(&psi);
    }
    let limit_psi = expm_hermitian(&effective_hamiltonian(&p), gamma * t)?.apply(&psi0);
    let discrete = vertex_marginals(&psi, n);
    let limit = vertex_marginals(&limit_psi, n);
    let distance = 0.5
        * discrete
            .iter()
            .zip(&limit)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
    Ok(Distributions {
        discrete,
        limit,
        distance,
    })
}

#[wasm_bindgen]
pub fn walk_distributions(protocol: &str, n: usize, gamma: f64, t: f64, m: usize) -> String {
    respond(walk_distributions_native(protocol, n, gamma, t, m))
}

/// Closure dimension for `cycle` (size `n`), `lattice` (`n × n`) or `example`.
/// For the example walk the report also carries the membership checks.
pub fn closure_summary_native(kind: &str, n: usize) -> Result<serde_json::Value, Error> {
    let walk = match kind {
        "cycle" if n <= 12 => cycle_walk(n)?,
        "lattice" if n <= 3 => lattice_walk(n, 2)?,
        "example" => example_walk(),
        "cycle" | "lattice" => {
            return Err(Error::InvalidArgument(format!(
                "{kind} size {n} is too large for the demo"
            )))
        }
        _ => return Err(Error::InvalidArgument(format!("unknown walk `{kind}`"))),
    };
    let basis = lie_closure(&generators(&walk), DEFAULT_TOL)?;
    let mut report = json!({
        "walk": kind,
        "ambient_dim": basis.dim_ambient(),
        "dimension": basis.dimension(),
        "generator_count": basis.generator_count(),
        "passes": basis.passes(),
    });
    if kind == "example" {
        let x = example_subspace_element();
        report["diagonal_residual"] = json!(member_residual(&basis, &example_diagonal_element())?);
        report["element_residual"] = json!(member_residual(&basis, &x)?);
        report["element_spectrum"] = json!(spectrum_multiset(&x, 8)?);
    }
    Ok(report)
}

#[wasm_bindgen]
pub fn closure_summary(kind: &str, n: usize) -> String {
    respond(closure_summary_native(kind, n))
}
