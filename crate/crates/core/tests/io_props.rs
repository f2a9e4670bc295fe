mod common;

use proptest::prelude::*;

use vlsaf::anneal::Mode;
use vlsaf::io::{parse_design, run_pipeline, Bench, GenConfig, generate_benchmark};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn benchmark_text_round_trips(m in 1usize..40, k in 2usize..5, seed in any::<u64>()) {
        let b = generate_benchmark(&GenConfig::new(m, k, seed)).unwrap();
        let back = Bench::parse(&b.blocks_text(), &b.nets_text(), &b.voltage_text()).unwrap();
        prop_assert_eq!(back.blocks_text(), b.blocks_text());
        prop_assert_eq!(back.nets_text(), b.nets_text());
        prop_assert_eq!(back.voltage_text(), b.voltage_text());
        prop_assert_eq!(back.modules.len(), m);
        prop_assert_eq!(back.num_levels(), k);
        prop_assert!(back.dag().is_ok());
    }

    #[test]
    fn fewer_levels_keep_a_valid_bench(m in 1usize..20, k in 2usize..5, seed in any::<u64>()) {
        let b = generate_benchmark(&GenConfig::new(m, k, seed)).unwrap();
        for j in 1..=k {
            let t = b.truncate_levels(j).unwrap();
            prop_assert_eq!(t.num_levels(), j);
            prop_assert!(t.inputs().is_ok());
        }
    }
}

#[test]
fn written_design_and_svg_are_well_formed() {
    for seed in 0..4 {
        let out = run_pipeline(&generated(10, 3, seed), &quick(Mode::Vlsaf, seed, 2)).unwrap();
        let svg = out.svg();
        xml_well_formed(&svg).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<rect").count(), 1 + 2 * out.design.modules.len() + out.design.shifters.len());

        let file = parse_design(&out.design_text()).unwrap();
        assert_eq!(file.chip, out.design.chip);
        assert_eq!(file.modules.len(), out.design.modules.len());
        for (i, fm) in file.modules.iter().enumerate() {
            assert_eq!(fm.rect, out.design.modules[i]);
            assert_eq!(fm.room, out.design.rooms[i]);
            assert_eq!(fm.level, out.design.levels[i]);
        }
        assert_eq!(file.shifters.len(), out.design.shifters.len());
    }
}

#[test]
fn xml_checker_rejects_broken_documents() {
    assert!(xml_well_formed("<a><b/></a>").is_ok());
    assert!(xml_well_formed("<a><b></a>").is_err());
    assert!(xml_well_formed("<a x=\"1></a>").is_err());
    assert!(xml_well_formed("<a/><b/>").is_err());
}

#[test]
fn report_keys_are_stable() {
    let out = run_pipeline(&generated(8, 2, 3), &quick(Mode::VafLsi, 3, 2)).unwrap();
    let kv = out.report.to_kv();
    let keys: Vec<&str> = kv.lines().map(|l| l.split(' ').next().unwrap()).collect();
    for k in ["mode", "power", "wirelength", "pnr", "shifters", "ilo_pct", "ws_pct", "area"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert!(!kv.contains("time"));
    assert!(!kv.contains("-0.000000"));
    let table = out.report.to_table(Some(1.5));
    assert!(table.contains("time (s)"));
}
