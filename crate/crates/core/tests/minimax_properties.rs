use convmax::minimax::*;
use convmax::{Number, Scalar};
use proptest::prelude::*;

fn cfg(seed: u64) -> MinimaxConfig {
    MinimaxConfig { multistarts: 4, seed, ..MinimaxConfig::default() }
}

/// Sup of the convolution of the factors, computed by summing over all index tuples.
fn brute_sup(factors: &[Vec<f64>]) -> f64 {
    let m = factors[0].len() - 1;
    let k = factors.len();
    let mut out = vec![0.0; k * m + 1];
    let mut idx = vec![0usize; k];
    loop {
        let s: usize = idx.iter().sum();
        out[s] += idx.iter().zip(factors).map(|(&i, f)| f[i]).product::<f64>();
        let mut pos = 0;
        while pos < k {
            idx[pos] += 1;
            if idx[pos] <= m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == k {
            break;
        }
    }
    out.into_iter().fold(0.0, f64::max)
}

fn factors_of(r: &MinimaxResult) -> Vec<Vec<f64>> {
    match r.mode {
        FactorMode::Diagonal => vec![r.argument[0].clone(); r.k],
        FactorMode::General => r.argument.clone(),
    }
}

fn check_result(r: &MinimaxResult) -> Result<(), TestCaseError> {
    for w in &r.argument {
        prop_assert_eq!(w.len(), r.m + 1);
        prop_assert!(w.iter().all(|&v| v >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    prop_assert!((brute_sup(&factors_of(r)) - r.value).abs() <= 1e-12);
    prop_assert!(r.value >= 1.0 / (r.k * r.m + 1) as f64 - 1e-12);
    prop_assert!(!r.shared_modes.is_empty());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_results_are_consistent(k in 2usize..=4, m in 1usize..=3, seed in any::<u64>()) {
        let d = diagonal_constant(k, m, &cfg(seed)).unwrap();
        let g = general_constant(k, m, &cfg(seed)).unwrap();
        check_result(&d)?;
        check_result(&g)?;
        prop_assert!(g.value <= d.value + 1e-12);
        prop_assert_eq!(diagonal_constant(k, m, &cfg(seed)).unwrap(), d);
    }

    #[test]
    fn refining_a_grid_point_never_worsens_it(k in 2usize..=3, m in 1usize..=2, n in 2usize..=8) {
        for mode in [FactorMode::Diagonal, FactorMode::General] {
            let bracket = grid_oracle(k, m, n, mode, DEFAULT_GRID_BUDGET).unwrap();
            let start: Vec<Vec<f64>> = bracket.argmin.iter().map(|w| w.iter().map(Number::to_f64).collect()).collect();
            let r = solve(Shape { k, m, mode }, &MinimaxConfig { multistarts: 1, ..cfg(0) }, &[start]).unwrap();
            prop_assert!(r.value <= bracket.upper.to_f64() + 1e-12);
            prop_assert!(bracket.lower.to_f64() <= r.value + 1e-12);
        }
    }

    #[test]
    fn padding_a_zero_weight_cannot_increase_the_constant(k in 2usize..=3, m in 1usize..=3) {
        let r = diagonal_constant(k, m, &cfg(1)).unwrap();
        let next = solve(Shape { k, m: m + 1, mode: FactorMode::Diagonal }, &cfg(1), std::slice::from_ref(&r.argument)).unwrap();
        prop_assert!(next.value <= r.value + 1e-12);
    }
}

#[test]
fn m1_matches_closed_form_in_both_modes() {
    for k in 2..=5 {
        let exact = convmax::constants::optimal_constant(k).unwrap().to_f64();
        let full = MinimaxConfig { seed: 3, ..MinimaxConfig::default() };
        for r in [diagonal_constant(k, 1, &full).unwrap(), general_constant(k, 1, &full).unwrap()] {
            assert!((r.value - exact).abs() <= 1e-9, "k={k} {:?}", r.mode);
            assert!(r.shared_modes.len() >= 2);
        }
        let x = intersection_restricted_solve(k).unwrap();
        assert_eq!(x.exact_value, Some(Number::Exact(convmax::constants::optimal_constant(k).unwrap())));
    }
}

#[test]
fn invalid_arguments_are_rejected() {
    assert!(diagonal_constant(1, 1, &cfg(0)).is_err());
    assert!(diagonal_constant(2, 0, &cfg(0)).is_err());
    assert!(diagonal_constant(2, 1, &MinimaxConfig { tolerance: 0.0, ..cfg(0) }).is_err());
    assert!(grid_oracle(2, 1, 0, FactorMode::General, DEFAULT_GRID_BUDGET).is_err());
    assert!(grid_oracle(4, 3, 200, FactorMode::General, 1000).is_err());
}
