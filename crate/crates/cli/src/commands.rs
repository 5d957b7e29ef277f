use serde::Serialize;
use serde_json::{json, Value};

use qwl_core::graphs::{adjacency, regular_degree};
use qwl_core::liealg::{
    example_diagonal_element, example_subspace_element, generators, is_simulable, lie_closure,
    member_residual, spectrum_multiset, LieBasis, MAX_TOL, MIN_TOL,
};
use qwl_core::limits::{
    chiral_residuals, convergence_study, effective_hamiltonian, repeated_limit, single_step_error,
    smallest_half_slope, Protocol,
};
use qwl_core::numerics::{c, expm_hermitian, CMatrix};
use qwl_core::random::seeded_state;
use qwl_core::walks::{example_walk, shift_order, CoinedWalk};
use qwl_core::Error;

use crate::specs::{parse_protocol, parse_walk, read_matrix};
use crate::{Cli, CliError, Command, Format, Outcome};

/// Bound on the chiral projection residuals.
const PROJECTION_TOL: f64 = 1e-10;
/// Bound on the example's membership residuals.
const EXAMPLE_TOL: f64 = 1e-8;
const SPECTRUM_DIGITS: i32 = 8;

/// Runs one command and returns the complete report.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    validate(cli)?;
    match cli.command {
        Command::Info => info(cli),
        Command::Converge => converge(cli),
        Command::Evolve => evolve(cli),
        Command::Project => project(cli),
        Command::Closure => closure(cli),
        Command::Simulable => simulable(cli),
        Command::Example => example(cli),
    }
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    if !(cli.gamma.is_finite() && cli.gamma > 0.0) {
        return Err(CliError::Invalid(format!(
            "--gamma must be positive, got {}",
            cli.gamma
        )));
    }
    if !(cli.t.is_finite() && cli.t >= 0.0) {
        return Err(CliError::Invalid(format!(
            "--t must be nonnegative, got {}",
            cli.t
        )));
    }
    if !(MIN_TOL..=MAX_TOL).contains(&cli.tol) {
        return Err(Error::ToleranceOutOfRange(cli.tol).into());
    }
    Ok(())
}

fn walk(cli: &Cli) -> Result<CoinedWalk, CliError> {
    let spec = cli
        .walk
        .as_deref()
        .ok_or_else(|| CliError::Invalid("--walk is required".into()))?;
    parse_walk(spec)
}

fn protocol(cli: &Cli) -> Result<Protocol, CliError> {
    let spec = cli
        .protocol
        .as_deref()
        .ok_or_else(|| CliError::Invalid("--protocol is required".into()))?;
    let walk = cli.walk.as_deref().map(parse_walk).transpose()?;
    parse_protocol(spec, walk.as_ref())
}

fn json_only(cli: &Cli) -> Result<(), CliError> {
    match cli.format {
        Some(Format::Csv) => Err(CliError::Invalid(
            format!("{:?} reports are JSON only", cli.command).to_lowercase(),
        )),
        _ => Ok(()),
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report values are finite");
    text.push('\n');
    text
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV table with a trailing `fitted_exponent` row (empty when no fit exists).
fn csv_table(header: &[&str], rows: &[Vec<String>], exponent: Option<f64>) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(vec![]);
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.write_record([
        "fitted_exponent".to_string(),
        exponent.map(num).unwrap_or_default(),
    ])
    .expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn spectrum_json(spectrum: &[(f64, usize)]) -> Value {
    json!(spectrum
        .iter()
        .map(|&(v, m)| json!([v, m]))
        .collect::<Vec<_>>())
}

fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            json!((0..m.cols())
                .map(|k| [m[(r, k)].re, m[(r, k)].im])
                .collect::<Vec<_>>())
        })
        .collect();
    Value::Array(rows)
}

fn info(cli: &Cli) -> Result<Outcome, CliError> {
    json_only(cli)?;
    let w = walk(cli)?;
    let spectrum = spectrum_multiset(&adjacency(w.graph()), SPECTRUM_DIGITS)?;
    let report = json!({
        "walk": cli.walk,
        "coin_dim": w.coin_dim(),
        "walker_dim": w.walker_dim(),
        "dim": w.dim(),
        "shift_order": shift_order(&w),
        "degree": regular_degree(w.graph()),
        "adjacency_spectrum": spectrum_json(&spectrum),
    });
    Ok(Outcome {
        text: to_json(&report),
        passed: true,
    })
}

#[derive(Serialize)]
struct ConvergeRow {
    m: usize,
    x: f64,
    single_step_error: f64,
    repeated_error: f64,
}

fn converge(cli: &Cli) -> Result<Outcome, CliError> {
    let p = protocol(cli)?;
    let study = convergence_study(&p, cli.gamma, cli.t, &cli.m_list)?;
    let rows = study
        .samples
        .iter()
        .map(|s| {
            let m = s.m.expect("repeated samples carry m");
            Ok(ConvergeRow {
                m,
                x: s.x,
                single_step_error: single_step_error(&p, s.x)?,
                repeated_error: s.error,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.m.to_string(),
                        num(r.x),
                        num(r.single_step_error),
                        num(r.repeated_error),
                    ]
                })
                .collect();
            csv_table(
                &["m", "x", "single_step_error", "repeated_error"],
                &table,
                study.fitted_exponent,
            )
        }
        Format::Json => to_json(&json!({
            "protocol": cli.protocol,
            "walk": cli.walk,
            "gamma": cli.gamma,
            "t": cli.t,
            "samples": rows,
            "fitted_exponent": study.fitted_exponent,
        })),
    };
    Ok(Outcome { text, passed: true })
}

#[derive(Serialize)]
struct EvolveRow {
    m: usize,
    x: f64,
    state_error: f64,
}

fn evolve(cli: &Cli) -> Result<Outcome, CliError> {
    let p = protocol(cli)?;
    if cli.m_list.is_empty() || cli.m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Invalid(
            "--m-list must be nonempty and strictly ascending".into(),
        ));
    }
    let psi0 = seeded_state(cli.seed, p.walk().dim());
    let target = expm_hermitian(&effective_hamiltonian(&p), cli.gamma * cli.t)?.apply(&psi0);
    let rows = cli
        .m_list
        .iter()
        .map(|&m| {
            let (u, _) = repeated_limit(&p, cli.gamma, cli.t, m)?;
            let state_error = (&u.apply(&psi0) - &target).norm();
            Ok(EvolveRow {
                m,
                x: cli.gamma * cli.t / m as f64,
                state_error,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.x, r.state_error)).collect();
    let exponent = smallest_half_slope(&points);
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.m.to_string(), num(r.x), num(r.state_error)])
                .collect();
            csv_table(&["m", "x", "state_error"], &table, exponent)
        }
        Format::Json => to_json(&json!({
            "protocol": cli.protocol,
            "walk": cli.walk,
            "gamma": cli.gamma,
            "t": cli.t,
            "seed": cli.seed,
            "samples": rows,
            "fitted_exponent": exponent,
        })),
    };
    Ok(Outcome { text, passed: true })
}

fn project(cli: &Cli) -> Result<Outcome, CliError> {
    json_only(cli)?;
    let w = walk(cli)?;
    let n = w.as_cycle().ok_or(Error::NotACycle)?;
    let r = chiral_residuals(n, &seeded_state(cli.seed, 2 * n), cli.gamma, cli.t)?;
    let passed = [r.adjacency, r.laplacian, r.reconstruction]
        .iter()
        .all(|&x| x <= PROJECTION_TOL);
    let report = json!({
        "walk": cli.walk,
        "seed": cli.seed,
        "gamma": cli.gamma,
        "t": cli.t,
        "adjacency_residual": r.adjacency,
        "laplacian_residual": r.laplacian,
        "reconstruction_residual": r.reconstruction,
        "tolerance": PROJECTION_TOL,
        "passed": passed,
    });
    Ok(Outcome {
        text: to_json(&report),
        passed,
    })
}

fn closure_of(w: &CoinedWalk, tol: f64) -> Result<LieBasis, CliError> {
    Ok(lie_closure(&generators(w), tol)?)
}

fn closure(cli: &Cli) -> Result<Outcome, CliError> {
    json_only(cli)?;
    let basis = closure_of(&walk(cli)?, cli.tol)?;
    let mut report = serde_json::to_value(basis.report()).expect("plain struct");
    if cli.dump_basis {
        report["basis"] = Value::Array(basis.elements().iter().map(matrix_json).collect());
    }
    Ok(Outcome {
        text: to_json(&report),
        passed: true,
    })
}

fn simulable(cli: &Cli) -> Result<Outcome, CliError> {
    json_only(cli)?;
    let w = walk(cli)?;
    let path = cli
        .hamiltonian
        .as_deref()
        .ok_or_else(|| CliError::Invalid("--hamiltonian is required".into()))?;
    let h = read_matrix(path)?;
    let basis = closure_of(&w, cli.tol)?;
    let verdict = is_simulable(&basis, &h, cli.tol)?;
    let residual = member_residual(&basis, &h.scale(c(0.0, -1.0)))?;
    let report = json!({
        "walk": cli.walk,
        "closure_dimension": basis.dimension(),
        "residual": residual,
        "tolerance": cli.tol,
        "simulable": verdict,
    });
    Ok(Outcome {
        text: to_json(&report),
        passed: true,
    })
}

fn item(name: &str, pass: bool, value: Value) -> Value {
    json!({ "name": name, "pass": pass, "value": value })
}

fn example(cli: &Cli) -> Result<Outcome, CliError> {
    json_only(cli)?;
    let w = example_walk();
    let basis = closure_of(&w, cli.tol)?;

    let order = shift_order(&w);
    let adj = spectrum_multiset(&adjacency(w.graph()), SPECTRUM_DIGITS)?;
    let diagonal = member_residual(&basis, &example_diagonal_element())?;
    let x = example_subspace_element();
    let x_spectrum = spectrum_multiset(&x, SPECTRUM_DIGITS)?;
    let x_residual = member_residual(&basis, &x)?;

    let items = vec![
        item("shift_order", order == 2, json!(order)),
        item(
            "adjacency_spectrum",
            adj == [(3.0, 1), (-1.0, 3)],
            spectrum_json(&adj),
        ),
        item(
            "closure_dimension",
            basis.dimension() == 33,
            json!(basis.dimension()),
        ),
        item(
            "diagonal_membership",
            diagonal <= EXAMPLE_TOL,
            json!({ "residual": diagonal }),
        ),
        item(
            "subspace_element",
            x_spectrum == [(3.0, 1), (1.0, 3), (0.0, 4), (-1.0, 3), (-3.0, 1)]
                && x_residual <= EXAMPLE_TOL,
            json!({ "imaginary_spectrum": spectrum_json(&x_spectrum), "residual": x_residual }),
        ),
    ];
    let passed = items.iter().all(|i| i["pass"] == json!(true));
    let report = json!({ "tolerance": cli.tol, "items": items, "passed": passed });
    Ok(Outcome {
        text: to_json(&report),
        passed,
    })
}
