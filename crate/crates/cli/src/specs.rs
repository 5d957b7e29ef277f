//! Walk, protocol and matrix specifications given on the command line or in JSON files.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use qwl_core::limits::{evencyc_protocol, strauch_protocol, Protocol, ProtocolStep};
use qwl_core::numerics::{c, CMatrix};
use qwl_core::walks::{cycle_walk, example_walk, lattice_walk, CoinedWalk, WalkJson};

use crate::CliError;

fn bad(token: &str, why: impl std::fmt::Display) -> CliError {
    CliError::BadSpec {
        token: token.to_string(),
        reason: why.to_string(),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(token: &str, path: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(Path::new(path)).map_err(|e| bad(token, e))?;
    serde_json::from_str(&text).map_err(|e| bad(token, e))
}

fn parse_count(token: &str, s: &str) -> Result<usize, CliError> {
    s.trim()
        .parse()
        .map_err(|_| bad(token, format!("`{s}` is not a nonnegative integer")))
}

/// `cycle:N`, `lattice:N,D`, `example` or `file:PATH` (walk JSON).
pub fn parse_walk(spec: &str) -> Result<CoinedWalk, CliError> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let walk = match kind {
        "cycle" => cycle_walk(parse_count(spec, arg)?),
        "lattice" => {
            let (n, d) = arg
                .split_once(',')
                .ok_or_else(|| bad(spec, "expected lattice:N,D"))?;
            lattice_walk(parse_count(spec, n)?, parse_count(spec, d)?)
        }
        "example" if arg.is_empty() => Ok(example_walk()),
        "file" => {
            let json: WalkJson = read_json(spec, arg)?;
            CoinedWalk::from_json(&json)
        }
        _ => {
            return Err(bad(
                spec,
                "unknown walk; expected cycle:N, lattice:N,D, example or file:PATH",
            ))
        }
    };
    walk.map_err(|e| bad(spec, e))
}

/// Square complex matrix as rows of `[re, im]` pairs.
#[derive(Clone, Debug, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    pub fn to_matrix(&self, token: &str) -> Result<CMatrix, CliError> {
        let n = self.0.len();
        if n == 0 || self.0.iter().any(|row| row.len() != n) {
            return Err(bad(token, "matrix must be square and nonempty"));
        }
        let data = self.0.iter().flatten().map(|&[re, im]| c(re, im)).collect();
        CMatrix::from_vec(n, n, data).map_err(|e| bad(token, e))
    }
}

/// Hermitian matrix file for `simulable`.
pub fn read_matrix(path: &str) -> Result<CMatrix, CliError> {
    let json: MatrixJson = read_json(path, path)?;
    json.to_matrix(path)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum WalkRef {
    Spec(String),
    Inline(WalkJson),
}

#[derive(Clone, Debug, Deserialize)]
struct StepJson {
    coin: MatrixJson,
    #[serde(default)]
    generator: Option<MatrixJson>,
    #[serde(default)]
    slope: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
enum NodeJson {
    Atom {
        #[serde(default)]
        walk: Option<WalkRef>,
        steps: Vec<StepJson>,
    },
    Concat {
        #[serde(default)]
        walk: Option<WalkRef>,
        left: Box<ProtocolJson>,
        right: Box<ProtocolJson>,
    },
    Commutator {
        #[serde(default)]
        walk: Option<WalkRef>,
        left: Box<ProtocolJson>,
        right: Box<ProtocolJson>,
    },
}

/// A protocol node, or the name of a built-in protocol.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ProtocolJson {
    Builtin(String),
    Node(NodeJson),
}

fn builtin(token: &str, name: &str, walk: Option<&CoinedWalk>) -> Result<Protocol, CliError> {
    let walk = walk.ok_or_else(|| bad(token, format!("protocol `{name}` needs a cycle walk")))?;
    let n = walk
        .as_cycle()
        .ok_or_else(|| bad(token, format!("protocol `{name}` runs on cycle walks only")))?;
    match name {
        "strauch" => strauch_protocol(n),
        "evencyc" => evencyc_protocol(n),
        _ => {
            return Err(bad(
                token,
                format!("unknown protocol `{name}`; expected strauch, evencyc or file:PATH"),
            ))
        }
    }
    .map_err(|e| bad(token, e))
}

fn resolve_walk(
    token: &str,
    own: &Option<WalkRef>,
    inherited: Option<&CoinedWalk>,
) -> Result<Option<CoinedWalk>, CliError> {
    match own {
        Some(WalkRef::Spec(s)) => parse_walk(s).map(Some),
        Some(WalkRef::Inline(json)) => CoinedWalk::from_json(json)
            .map(Some)
            .map_err(|e| bad(token, e)),
        None => Ok(inherited.cloned()),
    }
}

fn build(
    token: &str,
    node: &ProtocolJson,
    walk: Option<&CoinedWalk>,
) -> Result<Protocol, CliError> {
    let node = match node {
        ProtocolJson::Builtin(name) => return builtin(token, name, walk),
        ProtocolJson::Node(node) => node,
    };
    match node {
        NodeJson::Atom { walk: own, steps } => {
            let walk =
                resolve_walk(token, own, walk)?.ok_or_else(|| bad(token, "atom has no walk"))?;
            let steps = steps
                .iter()
                .map(|s| {
                    let coin = s.coin.to_matrix(token)?;
                    match &s.generator {
                        Some(g) => ProtocolStep::new(coin, g.to_matrix(token)?, s.slope),
                        None => ProtocolStep::plain(coin),
                    }
                    .map_err(|e| bad(token, e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Protocol::atom(walk, steps).map_err(|e| bad(token, e))
        }
        NodeJson::Concat {
            walk: own,
            left,
            right,
        }
        | NodeJson::Commutator {
            walk: own,
            left,
            right,
        } => {
            let walk = resolve_walk(token, own, walk)?;
            let l = build(token, left, walk.as_ref())?;
            let r = build(token, right, walk.as_ref())?;
            match node {
                NodeJson::Concat { .. } => Protocol::concat(l, r),
                _ => Protocol::commutator(l, r),
            }
            .map_err(|e| bad(token, e))
        }
    }
}

/// `strauch`, `evencyc` or `file:PATH` (protocol JSON). Built-ins run on `walk`,
/// which must be a cycle; JSON nodes without their own walk inherit it.
pub fn parse_protocol(spec: &str, walk: Option<&CoinedWalk>) -> Result<Protocol, CliError> {
    match spec.split_once(':') {
        Some(("file", path)) => {
            let json: ProtocolJson = read_json(spec, path)?;
            build(spec, &json, walk)
        }
        _ => builtin(spec, spec, walk),
    }
}
