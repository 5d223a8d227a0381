use proptest::prelude::*;
use rsfa_core::fpt::solve_rsfa_fpt_detailed;
use rsfa_core::io::{format_forest, generate, parse_forest};
use rsfa_core::{
    greedy_baseline, oracle_optimum, solve_rsfa_exact, solve_rsfa_fpt, solve_rsfa_ptas, validate_rsfa, Instance,
    OracleConfig, PtasConfig,
};

fn instance(max_n: usize, max_m: usize, coord_max: i64) -> impl Strategy<Value = Instance> {
    (0..=max_n, 1..=max_m, any::<u64>()).prop_map(move |(n, m, seed)| generate(n, m, coord_max, seed, false).unwrap())
}

fn general_position(max_total: usize) -> impl Strategy<Value = Instance> {
    (2..=max_total, any::<u64>())
        .prop_flat_map(|(total, seed)| (Just(total), 1..total, Just(seed)))
        .prop_map(|(total, m, seed)| generate(total - m, m, 12, seed, true).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_and_sweep_agree(inst in instance(6, 3, 7)) {
        let exact = solve_rsfa_exact(&inst).unwrap();
        let fpt = solve_rsfa_fpt(&inst).unwrap();
        prop_assert_eq!(exact.value, fpt.value);
        prop_assert_eq!(exact.forest.weight(), exact.value);
        prop_assert!(validate_rsfa(&exact.forest, &inst).feasible());
        prop_assert!(validate_rsfa(&fpt.forest, &inst).feasible());
    }

    #[test]
    fn sweep_states_fit_the_window(inst in instance(6, 3, 7)) {
        let out = solve_rsfa_fpt_detailed(&inst).unwrap();
        let g = rsfa_core::HananGrid::build(&inst.all_points());
        prop_assert!(out.max_states <= 1usize << g.h().min(g.v()));
    }

    #[test]
    fn greedy_is_feasible_and_never_beats_the_optimum(inst in instance(6, 3, 9)) {
        let exact = solve_rsfa_exact(&inst).unwrap();
        let greedy = greedy_baseline(&inst).unwrap();
        prop_assert!(greedy.value >= exact.value);
        prop_assert!(validate_rsfa(&greedy.forest, &inst).feasible());
    }

    #[test]
    fn oracle_matches_exact_on_small_grids(inst in instance(3, 2, 3)) {
        let oracle = oracle_optimum(&inst, &OracleConfig { edge_budget: 24 });
        prop_assume!(oracle.is_ok());
        prop_assert_eq!(oracle.unwrap().value, solve_rsfa_exact(&inst).unwrap().value);
    }

    #[test]
    fn ptas_is_sandwiched(inst in general_position(5), k in 1usize..=2) {
        let opt = solve_rsfa_exact(&inst).unwrap().value;
        let sol = solve_rsfa_ptas(&inst, &PtasConfig::with_k(k)).unwrap();
        let k = k as i64;
        prop_assert!(opt <= sol.value && sol.value * k <= opt * (k + 1), "{} vs {}", sol.value, opt);
        prop_assert!(validate_rsfa(&sol.forest, &inst).feasible());
        prop_assert_eq!(sol.internal_value % sol.internal_scale, 0);
    }

    #[test]
    fn solutions_survive_the_text_format(inst in instance(5, 2, 9)) {
        let sol = solve_rsfa_exact(&inst).unwrap();
        let back = parse_forest(&format_forest(&sol.forest)).unwrap();
        prop_assert_eq!(&back, &sol.forest);
        prop_assert!(validate_rsfa(&back, &inst).feasible());
    }

    #[test]
    fn scaling_scales_every_optimum(inst in instance(5, 2, 6), s in 1i64..4) {
        let a = solve_rsfa_exact(&inst).unwrap().value;
        let b = solve_rsfa_exact(&inst.scaled(s)).unwrap().value;
        prop_assert_eq!(a * s, b);
    }
}
