use qwl_demo::{
    closure_summary, closure_summary_native, convergence_curve_native, walk_distributions,
    walk_distributions_native,
};

#[test]
fn curve_halves_with_m() {
    let curve = convergence_curve_native("strauch", 8, 1.0, 1.0, 10).unwrap();
    assert_eq!(curve.m, vec![8, 16, 32, 64, 128, 256, 512, 1024]);
    assert!((curve.fitted_exponent.unwrap() - 1.0).abs() <= 0.15);
    assert!(curve.repeated_error.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn distributions_approach_the_limit() {
    let coarse = walk_distributions_native("evencyc", 10, 1.0, 2.0, 16).unwrap();
    let fine = walk_distributions_native("evencyc", 10, 1.0, 2.0, 1024).unwrap();
    assert!(fine.distance < coarse.distance);
    for d in [&fine.discrete, &fine.limit] {
        assert_eq!(d.len(), 10);
        assert!((d.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn closures() {
    let ex = closure_summary_native("example", 0).unwrap();
    assert_eq!(ex["dimension"], 33);
    assert!(ex["element_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(closure_summary_native("cycle", 4).unwrap()["dimension"], 7);
    assert!(closure_summary("cycle", 40).contains("error"));
    assert!(closure_summary("torus", 3).contains("error"));
    assert!(walk_distributions("trotter", 5, 1.0, 1.0, 8).contains("error"));
}
