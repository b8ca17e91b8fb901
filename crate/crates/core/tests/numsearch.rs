use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use waring_core::numsearch::{
    gradient, loss, polish, search, search_from, Init, NumericCandidate, SearchOptions,
};
use waring_core::symmetry::rho_ops;
use waring_core::{Tau, WaringDecomposition};

fn exact() -> NumericCandidate {
    NumericCandidate::from_exact(&WaringDecomposition::rank18(&Tau::exact()))
}

fn fd_check(c: &NumericCandidate) {
    let h = 1e-6;
    let g = gradient(c).unwrap();
    for i in 0..c.r() {
        for k in 0..c.n() * c.n() {
            for (dir, analytic) in [(Complex64::new(1.0, 0.0), g[i][k].re), (Complex64::new(0.0, 1.0), g[i][k].im)] {
                let shifted = |s: f64| {
                    let mut ms = c.matrices().to_vec();
                    ms[i][k] += dir * s;
                    loss(&NumericCandidate::new(c.n(), ms).unwrap()).unwrap()
                };
                let numeric = (shifted(h) - shifted(-h)) / (2.0 * h);
                let err = (numeric - analytic).abs() / analytic.abs().max(1.0);
                assert!(err < 1e-5, "entry ({i},{k}) analytic {analytic} numeric {numeric}");
            }
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        fd_check(&NumericCandidate::gaussian(2, 2, 1.0, &mut rng));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    fd_check(&NumericCandidate::gaussian(3, 3, 0.7, &mut rng));
}

#[test]
fn perturbed_exact_reconverges() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = exact().perturbed(1e-3, &mut rng);
    let opts = SearchOptions { tolerance: 1e-16, ..Default::default() };
    let res = polish(&c, &opts).unwrap();
    eprintln!("polish: loss {:e} after {} iterations in {:?}", res.loss, res.iterations, start.elapsed());
    assert!(res.converged && res.loss < 1e-16);
    assert_eq!(res.loss, loss(&res.best).unwrap());
}

#[test]
fn polishing_the_exact_solution_does_not_increase_loss() {
    let c = exact();
    let res = polish(&c, &SearchOptions::default()).unwrap();
    assert!(res.loss <= loss(&c).unwrap());
}

#[test]
fn conjugated_exact_solution_stays_exact() {
    let d = WaringDecomposition::rank18(&Tau::exact());
    for op in rho_ops() {
        let moved = WaringDecomposition::new(
            d.weight.clone(),
            d.matrices.iter().map(|m| op.apply(m)).collect(),
            d.tau.clone(),
        )
        .unwrap();
        assert!(loss(&NumericCandidate::from_exact(&moved)).unwrap() < 1e-16);
    }
}

#[test]
fn search_is_deterministic() {
    let opts = SearchOptions { restarts: 4, max_iters: 300, ..Default::default() };
    let a = search(2, 3, 11, &opts).unwrap();
    let b = search(2, 3, 11, &opts).unwrap();
    assert_eq!(a, b);
    let par = search(2, 3, 11, &SearchOptions { jobs: 3, ..opts }).unwrap();
    assert_eq!(a, par);
    let c = search(2, 3, 12, &opts).unwrap();
    assert_ne!(a.best, c.best);
}

#[test]
fn perturbed_search_from_exact() {
    let init = Init::Perturb { base: exact(), scale: 1e-3 };
    let res = search_from(&init, 7, &SearchOptions { tolerance: 1e-16, ..Default::default() }).unwrap();
    assert!(res.converged);
    assert_eq!(res.seed, 7);
}

#[test]
fn rank_one_cannot_match_three_by_three() {
    let res = search(3, 1, 1, &SearchOptions { max_iters: 2000, ..Default::default() }).unwrap();
    assert!(!res.converged);
    assert!(res.loss > 1.0);
}
