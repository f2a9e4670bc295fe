mod common;

use proptest::prelude::*;

use vlsaf::model::{DpCurve, TimingDag};
use vlsaf::voltage::{build_split_dag, relax, solve_voltage_assignment, EdgeClass, SplitDag, VaOptions};

use common::*;

fn check_timing(dag: &TimingDag, va: &vlsaf::model::VoltageAssignment) -> Result<(), TestCaseError> {
    prop_assert_eq!(va.timing_violations(dag), 0);
    prop_assert!(dag.longest_path(&va.module_delay, &va.edge_delay) <= dag.t_cycle);
    for (e, &d) in dag.edges().iter().zip(&va.edge_delay) {
        prop_assert!(va.mu[SplitDag::input(e.to)] - va.mu[SplitDag::output(e.from)] >= d);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn exact_solver_matches_enumeration(seed in any::<u64>(), m in 1usize..7, k in 2usize..5) {
        let mut r = rng(seed);
        let (dag, curves, delays, _) = random_va_instance(&mut r, m, k);
        let want = brute_force_power(m, dag.edges(), &curves, &delays, dag.t_cycle);
        let got = solve_voltage_assignment(&dag, &curves, &delays, VaOptions::EXACT);
        match want {
            None => prop_assert!(got.is_err()),
            Some(p) => {
                let va = got.unwrap();
                prop_assert_eq!(va.total_power, p);
                let recomputed: i64 = va.levels.iter().zip(&curves).map(|(&l, c)| c.power(l - 1)).sum();
                prop_assert_eq!(recomputed, p);
                check_timing(&dag, &va)?;
            }
        }
    }

    #[test]
    fn any_budget_stays_feasible_and_above_bound(seed in any::<u64>(), m in 1usize..9, k in 2usize..5, nodes in 1usize..6) {
        let mut r = rng(seed);
        let (dag, curves, delays, _) = random_va_instance(&mut r, m, k);
        let va = solve_voltage_assignment(&dag, &curves, &delays, VaOptions { node_limit: nodes }).unwrap();
        check_timing(&dag, &va)?;
        let exact = solve_voltage_assignment(&dag, &curves, &delays, VaOptions::EXACT).unwrap();
        prop_assert!(va.total_power >= exact.total_power);
        let bound = relax(&dag, &curves, &delays).unwrap().power_bound();
        prop_assert!(bound <= exact.total_power);
    }

    #[test]
    fn looser_clock_never_costs_power(seed in any::<u64>(), m in 1usize..8, k in 2usize..5) {
        let mut r = rng(seed);
        let (dag, curves, delays, _) = random_va_instance(&mut r, m, k);
        let mut last = i64::MAX;
        for extra in [0, 1, 3, 7, 20] {
            let d = TimingDag::new(m, dag.edges().to_vec(), dag.t_cycle + extra, dag.delta).unwrap();
            let p = solve_voltage_assignment(&d, &curves, &delays, VaOptions::EXACT).unwrap().total_power;
            prop_assert!(p <= last);
            last = p;
        }
    }

    #[test]
    fn single_point_curves_are_forced(seed in any::<u64>(), m in 1usize..8) {
        let mut r = rng(seed);
        let (dag, curves, delays, _) = random_va_instance(&mut r, m, 2);
        let flat: Vec<DpCurve> = curves.iter().map(|c| DpCurve::new(vec![c.points()[0]]).unwrap()).collect();
        let fast: Vec<i64> = flat.iter().map(|c| c.delay(0)).collect();
        let loose = TimingDag::new(m, dag.edges().to_vec(), forward_longest_path(m, dag.edges(), &fast, &delays), dag.delta).unwrap();
        let va = solve_voltage_assignment(&loose, &flat, &delays, VaOptions::EXACT).unwrap();
        prop_assert_eq!(va.total_power, flat.iter().map(|c| c.power(0)).sum::<i64>());
        prop_assert!(va.levels.iter().all(|&l| l == 1));
    }

    #[test]
    fn split_dag_shape(seed in any::<u64>(), m in 1usize..12) {
        let mut r = rng(seed);
        let (dag, ..) = random_va_instance(&mut r, m, 2);
        let split = build_split_dag(&dag);
        prop_assert_eq!(split.num_nodes(), 2 * m + 2);
        prop_assert_eq!(split.count(EdgeClass::Module), m);
        prop_assert_eq!(split.count(EdgeClass::Interconnect) >= dag.edges().len(), true);
        // Every node is reachable from s and reaches t.
        let n = split.num_nodes();
        let mut fwd = vec![false; n];
        let mut bwd = vec![false; n];
        fwd[SplitDag::SOURCE] = true;
        bwd[SplitDag::SINK] = true;
        for _ in 0..n {
            for e in split.edges() {
                if e.to == SplitDag::SINK && e.from == SplitDag::SOURCE {
                    continue;
                }
                if fwd[e.from] {
                    fwd[e.to] = true;
                }
                if bwd[e.to] {
                    bwd[e.from] = true;
                }
            }
        }
        prop_assert!(fwd.iter().all(|&x| x));
        prop_assert!(bwd.iter().all(|&x| x));
    }
}
