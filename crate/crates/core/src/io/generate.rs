//! Seeded synthetic benchmarks.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cbl::{pack, Cbl};
use crate::error::{Error, Result};
use crate::io::bench::Bench;
use crate::model::{modify_dp_curve, Delay, DpCurve, LsDpCurve, Module, MultiPinNet, TimingDag};
use crate::voltage::edge_delays;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub modules: usize,
    pub levels: usize,
    pub seed: u64,
    /// Nets per module.
    pub density: f64,
    /// Clock period as a multiple of the all-fastest critical path.
    pub slack: f64,
    pub delta: f64,
    pub ls_area: i64,
    /// Inclusive range of block widths and heights.
    pub min_dim: i64,
    pub max_dim: i64,
}

impl GenConfig {
    pub fn new(modules: usize, levels: usize, seed: u64) -> Self {
        GenConfig { modules, levels, seed, density: 1.0, slack: 1.1, delta: 0.1, ls_area: 4, min_dim: 10, max_dim: 40 }
    }
}

const REFERENCE_PACKINGS: usize = 16;

/// Largest clock period written for unbounded slack.
pub const MAX_T_CYCLE: Delay = 1_000_000_000;

fn random_curve<R: Rng>(rng: &mut R, k: usize) -> DpCurve {
    let mut d = vec![rng.gen_range(5..=15i64)];
    for _ in 1..k {
        let last = *d.last().expect("nonempty");
        d.push(last + rng.gen_range(2..=6));
    }
    // Slope magnitudes strictly decreasing from fast to slow levels.
    let mut sigma = vec![0i64; k.saturating_sub(1)];
    if k > 1 {
        sigma[k - 2] = rng.gen_range(1..=3);
        for s in (0..k - 2).rev() {
            sigma[s] = sigma[s + 1] + rng.gen_range(1..=4);
        }
    }
    let mut p = vec![0i64; k];
    p[k - 1] = rng.gen_range(10..=40);
    for s in (0..k - 1).rev() {
        p[s] = p[s + 1] + sigma[s] * (d[s + 1] - d[s]);
    }
    DpCurve::new(d.into_iter().zip(p).collect()).expect("curve built convex")
}

fn ls_curve(k: usize, area: i64) -> Result<LsDpCurve> {
    let pairs = (0..k as i64).map(|s| (s, s * (s + 1) / 2)).collect();
    LsDpCurve::new(pairs, area)
}

/// Random blocks, nets over a fixed topological order, convex curves whose
/// shifter-adjusted versions stay valid, and a clock period set from the
/// full-speed critical path of sample packings.
pub fn generate_benchmark(cfg: &GenConfig) -> Result<Bench> {
    if cfg.modules == 0 || cfg.levels < 2 {
        return Err(Error::Config("need at least one module and two voltage levels".into()));
    }
    if cfg.min_dim <= 0 || cfg.max_dim < cfg.min_dim || cfg.ls_area <= 0 {
        return Err(Error::Config("invalid block or shifter size".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ls = ls_curve(cfg.levels, cfg.ls_area)?;
    let m = cfg.modules;

    let mut modules = Vec::with_capacity(m);
    for i in 0..m {
        let w = rng.gen_range(cfg.min_dim..=cfg.max_dim);
        let h = rng.gen_range(cfg.min_dim..=cfg.max_dim);
        let curve = loop {
            let c = random_curve(&mut rng, cfg.levels);
            if modify_dp_curve(&c, &ls).is_ok() {
                break c;
            }
        };
        modules.push(Module::new(format!("b{i}"), w, h, curve)?);
    }

    let mut nets = Vec::new();
    if m > 1 {
        let count = ((cfg.density * m as f64).round() as usize).max(1);
        for n in 0..count {
            let source = rng.gen_range(0..m - 1);
            let room = m - 1 - source;
            let fanout = rng.gen_range(1..=room.min(3));
            let mut sinks: Vec<usize> = sample(&mut rng, room, fanout).into_iter().map(|j| source + 1 + j).collect();
            sinks.sort_unstable();
            nets.push(MultiPinNet { name: format!("n{n}"), source, sinks });
        }
    }

    let dag = TimingDag::from_nets(m, &nets, 1, cfg.delta)?;
    let fast: Vec<Delay> = modules.iter().map(|b| modify_dp_curve(&b.curve, &ls).map(|c| c.delay(0))).collect::<Result<_>>()?;
    // The tightest of a few random packings, so at least one packing meets the clock at full speed.
    let mut critical = Delay::MAX;
    for _ in 0..REFERENCE_PACKINGS {
        let fp = pack(&Cbl::random(m, &mut rng), &modules)?;
        critical = critical.min(dag.longest_path(&fast, &edge_delays(&fp, &dag)));
    }
    let t = cfg.slack * critical as f64;
    let t_cycle = if t.is_finite() { (t.ceil() as Delay).clamp(1, MAX_T_CYCLE) } else { MAX_T_CYCLE };

    Ok(Bench { modules, nets, t_cycle, delta: cfg.delta, ls_curve: ls, units: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_convex;

    #[test]
    fn same_seed_same_bundle() {
        let a = generate_benchmark(&GenConfig::new(10, 3, 7)).unwrap();
        let b = generate_benchmark(&GenConfig::new(10, 3, 7)).unwrap();
        assert_eq!(a.voltage_text(), b.voltage_text());
        assert_eq!(a.blocks_text(), b.blocks_text());
        assert_eq!(a.nets_text(), b.nets_text());
    }

    #[test]
    fn curves_are_convex() {
        for seed in 0..20 {
            let b = generate_benchmark(&GenConfig::new(12, 4, seed)).unwrap();
            for m in &b.modules {
                assert!(check_convex(m.curve.points()));
                assert!(modify_dp_curve(&m.curve, &b.ls_curve).is_ok());
            }
        }
    }

    #[test]
    fn single_module() {
        let b = generate_benchmark(&GenConfig::new(1, 2, 0)).unwrap();
        assert!(b.nets.is_empty());
        assert!(b.t_cycle > 0);
    }
}
