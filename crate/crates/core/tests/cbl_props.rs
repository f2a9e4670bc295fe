mod common;

use proptest::prelude::*;

use vlsaf::cbl::{hpwl_of, islands, pack, perturb, pnr, Cbl};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rooms_tile_the_chip(seed in any::<u64>(), m in 1usize..25, moves in 0usize..40) {
        let mut r = rng(seed);
        let curves: Vec<_> = (0..m).map(|_| random_curve(&mut r, 2)).collect();
        let modules = random_modules(&mut r, &curves);
        let mut cbl = Cbl::random(m, &mut r);
        for _ in 0..moves {
            cbl = perturb(&cbl, &mut r, true);
        }
        prop_assert!(cbl.validate(m).is_ok());
        let fp = pack(&cbl, &modules).unwrap();
        let total: i64 = fp.rooms.iter().map(|x| x.area()).sum();
        prop_assert_eq!(total, fp.area());
        for (i, a) in fp.rooms.iter().enumerate() {
            prop_assert_eq!(a.module, i);
            let (w, h) = fp.module_dims[i];
            prop_assert!(a.width >= w && a.height >= h);
            prop_assert!(a.x >= 0 && a.y >= 0 && a.x + a.width <= fp.width && a.y + a.height <= fp.height);
            for b in &fp.rooms[i + 1..] {
                let ox = (a.x + a.width).min(b.x + b.width) - a.x.max(b.x);
                let oy = (a.y + a.height).min(b.y + b.height) - a.y.max(b.y);
                prop_assert!(ox <= 0 || oy <= 0, "rooms {:?} and {:?} overlap", a, b);
            }
            let md = &modules[i];
            prop_assert!((w, h) == (md.width, md.height) || (w, h) == (md.height, md.width));
        }
        let sorted = {
            let mut o = cbl.order.clone();
            o.sort_unstable();
            o
        };
        prop_assert_eq!(sorted, (0..m).collect::<Vec<_>>());
    }

    #[test]
    fn hpwl_ignores_translation(seed in any::<u64>(), m in 2usize..12, dx in -50.0f64..50.0, dy in -50.0f64..50.0) {
        let mut r = rng(seed);
        let edges = random_forward_edges(&mut r, m);
        let pts: Vec<(f64, f64)> = (0..m).map(|i| ((i * 7 % 11) as f64, (i * 5 % 13) as f64)).collect();
        let moved: Vec<(f64, f64)> = pts.iter().map(|p| (p.0 + dx, p.1 + dy)).collect();
        let a = hpwl_of(&pts, &edges).unwrap();
        let b = hpwl_of(&moved, &edges).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn islands_partition_rooms(seed in any::<u64>(), m in 1usize..20, k in 1usize..4) {
        let mut r = rng(seed);
        let curves: Vec<_> = (0..m).map(|_| random_curve(&mut r, 2)).collect();
        let modules = random_modules(&mut r, &curves);
        let fp = random_floorplan(&mut r, &modules);
        let levels: Vec<usize> = (0..m).map(|_| rand::Rng::gen_range(&mut r, 1..=k)).collect();
        let isl = islands(&fp, &levels);
        let mut seen = vec![0; m];
        for g in &isl {
            prop_assert!(g.iter().all(|&i| levels[i] == levels[g[0]]));
            for &i in g {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        // One island per level never costs more than the summed room boxes.
        let all = pnr(&fp, &levels, true);
        let without_top = pnr(&fp, &levels, false);
        prop_assert!(without_top <= all);
        let rooms: i64 = fp.rooms.iter().map(|x| x.width + x.height).sum();
        prop_assert!(all <= rooms);
    }
}
