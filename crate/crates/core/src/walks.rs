//! Coined discrete-time walks, the edge-space form they are isomorphic to, and
//! the continuous-time / classical propagators they are compared against.
//!
//! Basis convention on coin ⊗ walker space: `|c_k, j⟩` sits at index `k·N + j`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{
    self, cartesian_product, complete_graph, cycle_graph, regular_degree, Graph, GraphJson,
};
use crate::numerics::{expm_hermitian, hermitian_apply, kron, CMatrix, C64, HERMITIAN_TOL};

/// Cyclic forward shift `F` on `n` sites: `F·e_k = e_{k+1 mod n}`.
pub fn circulant_shift(n: usize) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::TooSmall {
            what: "circulant size",
            min: 2,
            got: n,
        });
    }
    Ok(CMatrix::permutation(
        &(0..n).map(|k| (k + 1) % n).collect::<Vec<_>>(),
    ))
}

/// Coined walk on a regular graph: for each coin result `k`, a bijective move
/// table `j ↦ n_j(c_k)` along the edges of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinedWalk {
    graph: Graph,
    moves: Vec<Vec<usize>>,
    shift: Vec<usize>,
}

/// On-disk form of a walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkJson {
    pub graph: GraphJson,
    pub coin_dim: usize,
    pub moves: Vec<Vec<usize>>,
}

impl CoinedWalk {
    /// Validates a move table against `graph`. Each row is one coin result.
    pub fn new(graph: Graph, moves: Vec<Vec<usize>>) -> Result<Self> {
        let n = graph.vertex_count();
        let degree = regular_degree(&graph).ok_or(Error::NotRegular)?;
        if moves.len() != degree {
            return Err(Error::InvalidWalk(format!(
                "graph has degree {degree} but {} coin results were given",
                moves.len()
            )));
        }
        for (k, row) in moves.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidWalk(format!(
                    "coin result {k} lists {} targets for {n} vertices",
                    row.len()
                )));
            }
            let mut hit = vec![false; n];
            for (j, &target) in row.iter().enumerate() {
                if target >= n {
                    return Err(Error::InvalidWalk(format!(
                        "coin result {k} sends vertex {j} to {target}"
                    )));
                }
                if hit[target] {
                    return Err(Error::NotBijective { coin: k });
                }
                hit[target] = true;
                if !graph.has_edge(j, target) {
                    return Err(Error::NotAnEdge { vertex: j, coin: k });
                }
            }
        }
        for j in 0..n {
            let mut targets: Vec<usize> = moves.iter().map(|row| row[j]).collect();
            targets.sort_unstable();
            if targets.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::RepeatedNeighbor { vertex: j });
            }
        }
        let shift = moves
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().map(move |&t| k * n + t))
            .collect();
        Ok(Self {
            graph,
            moves,
            shift,
        })
    }

    pub fn coin_dim(&self) -> usize {
        self.moves.len()
    }

    pub fn walker_dim(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `c·N`
    pub fn dim(&self) -> usize {
        self.coin_dim() * self.walker_dim()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// `n_j(c_k)`
    pub fn target(&self, coin: usize, vertex: usize) -> usize {
        self.moves[coin][vertex]
    }

    pub fn moves(&self) -> &[Vec<usize>] {
        &self.moves
    }

    /// Shift as a permutation of basis indices: `S e_i = e_{shift[i]}`.
    pub fn shift_permutation(&self) -> &[usize] {
        &self.shift
    }

    pub fn shift_matrix(&self) -> CMatrix {
        CMatrix::permutation(&self.shift)
    }

    /// Walker-space permutation matrix of one coin result (the `k`-th diagonal block of `S`).
    pub fn coin_block(&self, coin: usize) -> CMatrix {
        CMatrix::permutation(&self.moves[coin])
    }

    /// Length `n` if this is the standard cycle walk (forward, backward).
    pub fn as_cycle(&self) -> Option<usize> {
        let n = self.walker_dim();
        (self.coin_dim() == 2
            && n >= 3
            && (0..n)
                .all(|j| self.moves[0][j] == (j + 1) % n && self.moves[1][j] == (j + n - 1) % n))
        .then_some(n)
    }

    pub fn to_json(&self) -> WalkJson {
        WalkJson {
            graph: self.graph.to_json(),
            coin_dim: self.coin_dim(),
            moves: self.moves.clone(),
        }
    }

    pub fn from_json(json: &WalkJson) -> Result<Self> {
        if json.coin_dim != json.moves.len() {
            return Err(Error::InvalidWalk(format!(
                "coin_dim is {} but {} move rows were given",
                json.coin_dim,
                json.moves.len()
            )));
        }
        Self::new(Graph::from_json(&json.graph)?, json.moves.clone())
    }
}

/// Same as [`CoinedWalk::new`].
pub fn graph_coined_walk(g: &Graph, moves: Vec<Vec<usize>>) -> Result<CoinedWalk> {
    CoinedWalk::new(g.clone(), moves)
}

/// Walk on the `n`-cycle; coin 0 moves forward, coin 1 backward.
pub fn cycle_walk(n: usize) -> Result<CoinedWalk> {
    let g = cycle_graph(n)?;
    let forward = (0..n).map(|j| (j + 1) % n).collect();
    let backward = (0..n).map(|j| (j + n - 1) % n).collect();
    CoinedWalk::new(g, vec![forward, backward])
}

/// Walk on the periodic `d`-lattice `C_n □ … □ C_n`. Coin results come in
/// (forward, backward) pairs, one pair per coordinate, coordinate 0 first.
pub fn lattice_walk(n: usize, d: usize) -> Result<CoinedWalk> {
    if d < 1 {
        return Err(Error::TooSmall {
            what: "lattice dimension",
            min: 1,
            got: d,
        });
    }
    let cycle = cycle_graph(n)?;
    let mut g = cycle.clone();
    for _ in 1..d {
        g = cartesian_product(&g, &cycle);
    }
    let total = n.pow(d as u32);
    let mut moves = Vec::with_capacity(2 * d);
    for l in 0..d {
        let stride = n.pow((d - 1 - l) as u32);
        for step in [1, n - 1] {
            moves.push(
                (0..total)
                    .map(|j| {
                        let coord = (j / stride) % n;
                        j - coord * stride + ((coord + step) % n) * stride
                    })
                    .collect(),
            );
        }
    }
    CoinedWalk::new(g, moves)
}

/// Three-coin walk on the complete graph over `A, B, C, D`: coin 1 swaps
/// `A↔C, B↔D`, coin 2 swaps `A↔B, C↔D`, coin 3 swaps `A↔D, B↔C`.
pub fn example_walk() -> CoinedWalk {
    let moves = vec![vec![2, 3, 0, 1], vec![1, 0, 3, 2], vec![3, 2, 1, 0]];
    CoinedWalk::new(complete_graph(4).expect("K4"), moves).expect("example walk is valid")
}

fn check_coin(w: &CoinedWalk, coin: &CMatrix) -> Result<()> {
    let c = w.coin_dim();
    if coin.shape() != (c, c) {
        return Err(Error::DimMismatch {
            expected: format!("{c}x{c} coin"),
            got: format!("{}x{}", coin.rows(), coin.cols()),
        });
    }
    let residual = coin.unitary_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

/// One walk step `S·(C ⊗ I_N)`.
pub fn step_operator(w: &CoinedWalk, coin: &CMatrix) -> Result<CMatrix> {
    check_coin(w, coin)?;
    Ok(&w.shift_matrix() * &kron(coin, &CMatrix::identity(w.walker_dim())))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Order of a permutation: lcm of its cycle lengths.
pub fn permutation_order(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut order = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        order = order / gcd(order, len) * len;
    }
    order
}

/// Least `r ≥ 1` with `S^r = I`.
pub fn shift_order(w: &CoinedWalk) -> usize {
    permutation_order(&w.shift)
}

/// The general (edge-space) form of a coined walk.
///
/// The edge basis is the list of directed edges `(j, k)` in lexicographic
/// order, so the coin operator is block-diagonal over groups sharing the
/// present vertex `j`.
#[derive(Clone, Debug)]
pub struct EdgeWalk {
    pub edge_basis: Vec<(usize, usize)>,
    /// `W|j, n_j(c_k)⟩ = |n_j(c_k), n_{n_j(c_k)}(c_k)⟩`
    pub w_matrix: CMatrix,
    /// `C̃ = Σ_j |j⟩⟨j| ⊗ Q_j` with `Q_j|n_j(c_k)⟩ = Σ_l α_lk |n_j(c_l)⟩`
    pub coin_blocks: CMatrix,
    /// `χ|c_k, j⟩ = |j, n_j(c_k)⟩`
    pub chi: CMatrix,
}

pub fn coined_to_edge_walk(w: &CoinedWalk, coin: &CMatrix) -> Result<EdgeWalk> {
    check_coin(w, coin)?;
    let (c, n) = (w.coin_dim(), w.walker_dim());
    let dim = c * n;
    let mut edge_basis: Vec<(usize, usize)> = (0..c)
        .flat_map(|k| (0..n).map(move |j| (j, w.target(k, j))))
        .collect();
    edge_basis.sort_unstable();
    let index: BTreeMap<(usize, usize), usize> = edge_basis
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let at = |j: usize, k: usize| index[&(j, w.target(k, j))];

    let one = C64::new(1.0, 0.0);
    let mut chi = CMatrix::zeros(dim, dim);
    let mut w_matrix = CMatrix::zeros(dim, dim);
    let mut coin_blocks = CMatrix::zeros(dim, dim);
    for k in 0..c {
        for j in 0..n {
            let col = at(j, k);
            chi[(col, k * n + j)] = one;
            let next = w.target(k, j);
            w_matrix[(at(next, k), col)] = one;
            for l in 0..c {
                coin_blocks[(at(j, l), col)] = coin[(l, k)];
            }
        }
    }
    Ok(EdgeWalk {
        edge_basis,
        w_matrix,
        coin_blocks,
        chi,
    })
}

/// `‖χ·S·(C⊗I) − W·C̃·χ‖_F`
pub fn intertwining_residual(w: &CoinedWalk, coin: &CMatrix) -> Result<f64> {
    let edge = coined_to_edge_walk(w, coin)?;
    let lhs = &edge.chi * &step_operator(w, coin)?;
    let rhs = &(&edge.w_matrix * &edge.coin_blocks) * &edge.chi;
    Ok((&lhs - &rhs).frobenius_norm())
}

/// `e^{−iγht}`
pub fn ctqw_propagator(h: &CMatrix, gamma: f64, t: f64) -> Result<CMatrix> {
    expm_hermitian(h, gamma * t)
}

fn check_laplacian(l: &CMatrix) -> Result<()> {
    if !l.is_square() || l.as_slice().iter().any(|z| z.im != 0.0) || l.hermitian_residual() != 0.0 {
        return Err(Error::NotLaplacian);
    }
    let n = l.rows();
    for col in 0..n {
        let sum: f64 = (0..n).map(|r| l[(r, col)].re).sum();
        if sum.abs() > 1e-12 || (0..n).any(|r| r != col && l[(r, col)].re < 0.0) {
            return Err(Error::NotLaplacian);
        }
    }
    Ok(())
}

/// `e^{γlt}` for a graph Laplacian `l`; column-stochastic.
pub fn ctrw_propagator(l: &CMatrix, gamma: f64, t: f64) -> Result<CMatrix> {
    check_laplacian(l)?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    hermitian_apply(l, |lambda| C64::new((gamma * t * lambda).exp(), 0.0))
}

/// Vector of probabilities (or any nonnegative quantities) on the vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct RealState(pub Vec<f64>);

impl RealState {
    pub fn point_mass(dim: usize, j: usize) -> Self {
        let mut p = vec![0.0; dim];
        p[j] = 1.0;
        Self(p)
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// One classical step `p′ = p + γ·dt·L·p`. Requires `γ·dt·max_degree ≤ 1`.
pub fn dtrw_step(p: &RealState, l: &CMatrix, gamma: f64, dt: f64) -> Result<RealState> {
    let n = l.rows();
    if !l.is_square() || p.0.len() != n {
        return Err(Error::DimMismatch {
            expected: format!("{n} entries"),
            got: format!("{}", p.0.len()),
        });
    }
    let max_degree = (0..n).map(|j| -l[(j, j)].re).fold(0.0, f64::max);
    let rate = gamma * dt * max_degree;
    if rate > 1.0 {
        return Err(Error::Unstable(rate));
    }
    let out = (0..n)
        .map(|r| p.0[r] + gamma * dt * (0..n).map(|col| l[(r, col)].re * p.0[col]).sum::<f64>())
        .collect();
    Ok(RealState(out))
}

/// Laplacian of the walk's underlying graph.
pub fn walk_laplacian(w: &CoinedWalk) -> CMatrix {
    graphs::laplacian(w.graph())
}
