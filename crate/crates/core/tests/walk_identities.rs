use qwl_core::graphs::{adjacency, cycle_graph, laplacian};
use qwl_core::numerics::{kron, CMatrix};
use qwl_core::random::{random_unitary, rng};
use qwl_core::walks::{
    ctqw_propagator, ctrw_propagator, cycle_walk, dtrw_step, example_walk, intertwining_residual,
    lattice_walk, CoinedWalk, RealState,
};

fn shipped_walks() -> Vec<CoinedWalk> {
    let mut walks: Vec<CoinedWalk> = (3..=8).map(|n| cycle_walk(n).unwrap()).collect();
    walks.push(lattice_walk(3, 2).unwrap());
    walks.push(example_walk());
    walks
}

#[test]
fn intertwining_holds_for_random_coins() {
    let mut r = rng(2024);
    for w in shipped_walks() {
        let bound = 1e-12 * w.dim() as f64;
        for _ in 0..20 {
            let coin = random_unitary(&mut r, w.coin_dim());
            let residual = intertwining_residual(&w, &coin).unwrap();
            assert!(residual <= bound, "dim {}: residual {residual:e}", w.dim());
        }
    }
}

#[test]
fn lattice_ctqw_factorizes() {
    let c3 = cycle_graph(3).unwrap();
    let lat = lattice_walk(3, 2).unwrap();
    for (gamma, t) in [(1.0, 0.7), (0.3, 2.5)] {
        let a = adjacency(lat.graph());
        let factor = ctqw_propagator(&adjacency(&c3), gamma, t).unwrap();
        let diff = &ctqw_propagator(&a, gamma, t).unwrap() - &kron(&factor, &factor);
        assert!(diff.frobenius_norm() <= 1e-9);

        let l = laplacian(lat.graph());
        let factor = ctqw_propagator(&laplacian(&c3), gamma, t).unwrap();
        let diff = &ctqw_propagator(&l, gamma, t).unwrap() - &kron(&factor, &factor);
        assert!(diff.frobenius_norm() <= 1e-9);
    }
}

#[test]
fn ctrw_is_column_stochastic() {
    for n in [3, 5, 8] {
        let l = laplacian(&cycle_graph(n).unwrap());
        for t in [0.0, 0.4, 3.0] {
            let p = ctrw_propagator(&l, 1.0, t).unwrap();
            for col in 0..n {
                let sum: f64 = (0..n).map(|r| p[(r, col)].re).sum();
                assert!((sum - 1.0).abs() <= 1e-10);
                assert!((0..n).all(|r| p[(r, col)].re >= -1e-12 && p[(r, col)].im.abs() <= 1e-12));
            }
        }
    }
}

fn dtrw_error(l: &CMatrix, gamma: f64, t: f64, k: usize) -> f64 {
    let n = l.rows();
    let mut p = RealState::point_mass(n, 0);
    for _ in 0..k {
        p = dtrw_step(&p, l, gamma, t / k as f64).unwrap();
    }
    let exact = ctrw_propagator(l, gamma, t).unwrap();
    (0..n)
        .map(|r| (p.0[r] - exact[(r, 0)].re).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn dtrw_converges_at_first_order() {
    let l = laplacian(&cycle_graph(6).unwrap());
    let errors: Vec<f64> = [250, 500, 1000]
        .iter()
        .map(|&k| dtrw_error(&l, 1.0, 1.0, k))
        .collect();
    for pair in errors.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
    }
}
