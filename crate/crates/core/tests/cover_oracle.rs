mod common;

use common::brute_force_cover_count;
use proptest::prelude::*;
use qsteiner::cover::{check_solution, solve, solve_portfolio, CoverSolution};
use qsteiner::{ExactCoverInstance, Outcome, SearchBudget, SearchMode};

fn instance_strategy() -> impl Strategy<Value = (usize, Vec<Vec<u32>>)> {
    (1usize..=12).prop_flat_map(|u| {
        let set = proptest::collection::btree_set(0..u as u32, 1..=u.min(4));
        (Just(u), proptest::collection::vec(set.prop_map(|s| s.into_iter().collect()), 1..=20))
    })
}

fn build(u: usize, sets: &[Vec<u32>]) -> ExactCoverInstance {
    ExactCoverInstance::new(u, sets.iter().cloned().enumerate().map(|(i, s)| (i as u32, s)).collect()).unwrap()
}

fn count(inst: &ExactCoverInstance, seed: Option<u64>) -> u64 {
    let budget = SearchBudget { seed, ..SearchBudget::unlimited(SearchMode::CountAll) };
    match solve(inst, &budget).outcome {
        Outcome::Counted(c) => c,
        Outcome::Exhausted => 0,
        o => panic!("unexpected {o:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn count_all_matches_brute_force((u, sets) in instance_strategy(), seed in any::<u64>()) {
        let inst = build(u, &sets);
        let want = brute_force_cover_count(u, &sets);
        prop_assert_eq!(count(&inst, None), want);
        prop_assert_eq!(count(&inst, Some(seed)), want);
    }

    #[test]
    fn enumerated_solutions_are_exact_and_distinct((u, sets) in instance_strategy()) {
        let inst = build(u, &sets);
        let want = brute_force_cover_count(u, &sets);
        let report = solve(&inst, &SearchBudget::unlimited(SearchMode::EnumerateUpTo(u64::MAX)));
        let sols: Vec<CoverSolution> = match report.outcome {
            Outcome::Found(s) => s,
            Outcome::Exhausted => Vec::new(),
            o => panic!("unexpected {o:?}"),
        };
        prop_assert_eq!(sols.len() as u64, want);
        let mut keys: Vec<Vec<u32>> = sols
            .iter()
            .map(|s| {
                let mut k = s.0.clone();
                k.sort_unstable();
                k
            })
            .collect();
        for s in &sols {
            prop_assert!(check_solution(&inst, &s.0).is_valid());
        }
        keys.sort();
        keys.dedup();
        prop_assert_eq!(keys.len() as u64, want);
    }

    #[test]
    fn first_solution_agrees_with_existence((u, sets) in instance_strategy()) {
        let inst = build(u, &sets);
        let want = brute_force_cover_count(u, &sets);
        match solve(&inst, &SearchBudget::unlimited(SearchMode::FirstSolution)).outcome {
            Outcome::Found(s) => {
                prop_assert!(want > 0);
                prop_assert_eq!(s.len(), 1);
                prop_assert!(check_solution(&inst, &s[0].0).is_valid());
            }
            Outcome::Exhausted => prop_assert_eq!(want, 0),
            o => panic!("unexpected {o:?}"),
        }
        let p = solve_portfolio(&inst, &SearchBudget::unlimited(SearchMode::FirstSolution), 3);
        prop_assert_eq!(matches!(p.report.outcome, Outcome::Found(_)), want > 0);
    }
}

#[test]
fn node_budget_is_reported_separately_from_exhaustion() {
    // 12 columns, all pairs: many covers, none reachable in 3 nodes
    let sets: Vec<Vec<u32>> = (0..12u32).flat_map(|a| (a + 1..12).map(move |b| vec![a, b])).collect();
    let inst = build(12, &sets);
    let budget = SearchBudget { node_limit: Some(3), ..SearchBudget::unlimited(SearchMode::CountAll) };
    let r = solve(&inst, &budget);
    assert!(matches!(r.outcome, Outcome::BudgetExceeded { .. }), "{:?}", r.outcome);
    assert!(r.stats.nodes <= 3);
    assert_eq!(count(&inst, None), 10395);
}
