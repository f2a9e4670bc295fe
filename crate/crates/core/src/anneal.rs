//! Simulated-annealing floorplanner.
//!
//! Each candidate corner block list is packed, gated on interconnect delay,
//! assigned voltages and, unless disabled, assigned level shifters. The cost
//! is `Φ = λ_A A + λ_W W + λ_P P + λ_R R + λ_N N` over chip area, wirelength,
//! power, power-network resource and unassigned shifters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cbl::{hpwl, pack, perturb, pnr, Cbl, Floorplan};
use crate::error::{Error, Result};
use crate::ls::{plan_ls, LsCostParams, LsPlan};
use crate::model::{modify_dp_curve, Delay, DpCurve, LsDpCurve, Module, Power, TimingDag, VoltageAssignment};
use crate::voltage::{edge_delays, feasibility_gate, solve_voltage_assignment, Gate, VaOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    pub area: f64,
    pub wire: f64,
    pub power: f64,
    pub pnr: f64,
    pub unassigned: f64,
}

impl CostWeights {
    /// Unit weights with the unassigned-shifter term at `10 * a_ls`.
    pub fn defaults(a_ls: i64) -> Self {
        CostWeights { area: 1.0, wire: 1.0, power: 1.0, pnr: 1.0, unassigned: 10.0 * a_ls as f64 }
    }

    pub fn validate(&self) -> Result<()> {
        let w = [self.area, self.wire, self.power, self.pnr, self.unassigned];
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("weights must be finite and non-negative".into()));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::Config("at least one weight must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Level shifters assigned for every candidate.
    Vlsaf,
    /// Level shifters assigned only once, on the final floorplan.
    VafLsi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealConfig {
    /// Sampled from random moves when unset.
    pub initial_temp: Option<f64>,
    pub cooling: f64,
    /// `10 * m` when unset.
    pub moves_per_temp: Option<usize>,
    pub stop_temp: f64,
    /// Stop once the acceptance ratio at one temperature drops below this.
    pub min_accept: f64,
    pub max_temps: Option<usize>,
    pub seed: u64,
    /// Independent chains run in parallel; the best one wins.
    pub starts: usize,
    pub allow_rotation: bool,
    /// Voltage-assignment search budget per candidate.
    pub search_nodes: usize,
    /// Budget for re-solving the stored best.
    pub final_nodes: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            initial_temp: None,
            cooling: 0.95,
            moves_per_temp: None,
            stop_temp: 1e-3,
            min_accept: 0.01,
            max_temps: None,
            seed: 1,
            starts: 1,
            allow_rotation: true,
            search_nodes: 1,
            final_nodes: 4096,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::Config("cooling ratio must lie strictly between 0 and 1".into()));
        }
        if self.starts == 0 {
            return Err(Error::Config("at least one start is needed".into()));
        }
        if matches!(self.initial_temp, Some(t) if !(t > 0.0)) || !(self.stop_temp > 0.0) {
            return Err(Error::Config("temperatures must be positive".into()));
        }
        Ok(())
    }
}

/// Validated problem data shared by all candidates.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub modules: Vec<Module>,
    pub dag: TimingDag,
    pub ls_curve: LsDpCurve,
    /// Module curves with level-shifter cost folded in.
    pub curves: Vec<DpCurve>,
    pub ls_params: LsCostParams,
}

impl Inputs {
    pub fn new(modules: Vec<Module>, dag: TimingDag, ls_curve: LsDpCurve) -> Result<Self> {
        if modules.len() != dag.num_modules() {
            return Err(Error::Config("module count does not match the DAG".into()));
        }
        if modules.is_empty() {
            return Err(Error::Config("no modules".into()));
        }
        let curves = modules.iter().map(|m| modify_dp_curve(&m.curve, &ls_curve)).collect::<Result<_>>()?;
        Ok(Inputs { modules, dag, ls_curve, curves, ls_params: LsCostParams::default() })
    }

    pub fn a_ls(&self) -> i64 {
        self.ls_curve.area()
    }

    /// Summed power with every module at level 1.
    pub fn max_power(&self) -> Power {
        self.curves.iter().map(|c| c.power(0)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Components {
    pub area: i64,
    pub wire: f64,
    pub power: Power,
    pub pnr: i64,
    pub unassigned: usize,
}

impl Components {
    pub fn phi(&self, w: &CostWeights) -> f64 {
        w.area * self.area as f64
            + w.wire * self.wire
            + w.power * self.power as f64
            + w.pnr * self.pnr as f64
            + w.unassigned * self.unassigned as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub cbl: Cbl,
    pub floorplan: Floorplan,
    pub delays: Vec<Delay>,
    pub va: VoltageAssignment,
    /// Absent when shifters are deferred.
    pub ls: Option<LsPlan>,
    pub components: Components,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    Feasible(Box<Candidate>),
    /// Timing cannot be met; `Φ` is taken as infinite.
    Infeasible(String),
}

impl Evaluation {
    pub fn phi(&self) -> f64 {
        match self {
            Evaluation::Feasible(c) => c.phi,
            Evaluation::Infeasible(_) => f64::INFINITY,
        }
    }
}

/// Pack, gate on interconnect delay, assign voltages, assign shifters.
pub fn evaluate(cbl: &Cbl, weights: &CostWeights, inputs: &Inputs, mode: Mode, va: VaOptions) -> Result<Evaluation> {
    let fp = pack(cbl, &inputs.modules)?;
    let delays = edge_delays(&fp, &inputs.dag);
    if let Gate::Infeasible(k) = feasibility_gate(&delays, inputs.dag.t_cycle) {
        return Ok(Evaluation::Infeasible(format!("edge {k} alone exceeds the clock period")));
    }
    let assignment = match solve_voltage_assignment(&inputs.dag, &inputs.curves, &delays, va) {
        Ok(a) => a,
        Err(Error::TimingInfeasible(why)) => return Ok(Evaluation::Infeasible(why)),
        Err(e) => return Err(e),
    };
    let ls = match mode {
        Mode::Vlsaf => Some(plan_ls(&fp, &inputs.dag, &assignment, inputs.a_ls(), inputs.ls_params)),
        Mode::VafLsi => None,
    };
    let components = Components {
        area: fp.area(),
        wire: hpwl(&fp, inputs.dag.edges())?,
        power: assignment.total_power,
        pnr: pnr(&fp, &assignment.levels, true),
        unassigned: ls.as_ref().map_or(0, |p| p.assignment.unassigned()),
    };
    let phi = components.phi(weights);
    Ok(Evaluation::Feasible(Box::new(Candidate { cbl: cbl.clone(), floorplan: fp, delays, va: assignment, ls, components, phi })))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    pub best: Candidate,
    /// `Φ` of the starting candidate, infinite if it missed timing.
    pub initial_phi: f64,
    /// `Φ` at every improvement of the stored best.
    pub best_trace: Vec<f64>,
    pub temperatures: usize,
    pub evaluations: usize,
    pub seed: u64,
}

/// Stored-best order: lower `Φ`, then fewer unassigned shifters.
fn better(a: &Candidate, b: &Candidate) -> bool {
    a.phi < b.phi || (a.phi == b.phi && a.components.unassigned < b.components.unassigned)
}

/// Runs `config.starts` chains seeded `seed, seed + 1, ...` and keeps the best.
pub fn anneal(config: &AnnealConfig, weights: &CostWeights, inputs: &Inputs, mode: Mode) -> Result<AnnealOutcome> {
    config.validate()?;
    weights.validate()?;
    let runs: Vec<Result<AnnealOutcome>> = (0..config.starts as u64)
        .into_par_iter()
        .map(|k| anneal_chain(config, config.seed.wrapping_add(k), weights, inputs, mode))
        .collect();
    let mut best: Option<AnnealOutcome> = None;
    let mut last_err = None;
    for r in runs {
        match r {
            Ok(o) => {
                if best.as_ref().map_or(true, |b| better(&o.best, &b.best)) {
                    best = Some(o);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let mut out = match (best, last_err) {
        (Some(b), _) => b,
        (None, Some(e)) => return Err(e),
        (None, None) => unreachable!("at least one start"),
    };
    if config.final_nodes > config.search_nodes {
        let opts = VaOptions { node_limit: config.final_nodes };
        if let Evaluation::Feasible(c) = evaluate(&out.best.cbl, weights, inputs, mode, opts)? {
            if !better(&out.best, &c) {
                out.best = *c;
            }
        }
    }
    Ok(out)
}

fn anneal_chain(config: &AnnealConfig, seed: u64, weights: &CostWeights, inputs: &Inputs, mode: Mode) -> Result<AnnealOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = inputs.modules.len();
    let va = VaOptions { node_limit: config.search_nodes };
    let mut evaluations = 0usize;
    let eval = |cbl: &Cbl, evaluations: &mut usize| -> Result<Evaluation> {
        *evaluations += 1;
        evaluate(cbl, weights, inputs, mode, va)
    };

    let mut cur_cbl = Cbl::random(m, &mut rng);
    let first = eval(&cur_cbl, &mut evaluations)?;
    let initial_phi = first.phi();
    let mut cur_phi = initial_phi;
    let mut best: Option<Candidate> = None;
    let mut best_trace = Vec::new();
    if let Evaluation::Feasible(c) = first {
        best_trace.push(c.phi);
        best = Some(*c);
    }

    let moves = config.moves_per_temp.unwrap_or(10 * m);
    let mut temp = match config.initial_temp {
        Some(t) => t,
        None => sample_temperature(&cur_cbl, cur_phi, &mut rng, config.allow_rotation, |c| {
            eval(c, &mut evaluations).map(|e| e.phi())
        })?,
    };
    let mut temperatures = 0usize;
    while moves > 0 && temp > config.stop_temp && config.max_temps.map_or(true, |t| temperatures < t) {
        temperatures += 1;
        let mut accepted = 0usize;
        for _ in 0..moves {
            let next = perturb(&cur_cbl, &mut rng, config.allow_rotation);
            let e = eval(&next, &mut evaluations)?;
            let phi = e.phi();
            let u: f64 = rng.gen();
            // Walk freely until the chain first meets timing.
            let take = if !cur_phi.is_finite() {
                true
            } else if !phi.is_finite() {
                false
            } else if phi <= cur_phi {
                true
            } else {
                u < (-(phi - cur_phi) / temp).exp()
            };
            if take {
                accepted += 1;
                cur_cbl = next;
                cur_phi = phi;
                if let Evaluation::Feasible(c) = e {
                    if best.as_ref().map_or(true, |b| better(&c, b)) {
                        best_trace.push(c.phi);
                        best = Some(*c);
                    }
                }
            }
        }
        if (accepted as f64) < config.min_accept * moves as f64 && cur_phi.is_finite() {
            break;
        }
        temp *= config.cooling;
    }

    let best = best.ok_or(Error::NoFeasibleFloorplan(evaluations))?;
    Ok(AnnealOutcome { best, initial_phi, best_trace, temperatures, evaluations, seed })
}

/// Temperature at which the average uphill move from the start is accepted
/// with probability 0.8.
fn sample_temperature<R: Rng>(
    start: &Cbl,
    start_phi: f64,
    rng: &mut R,
    allow_rotation: bool,
    mut eval: impl FnMut(&Cbl) -> Result<f64>,
) -> Result<f64> {
    let mut ups = Vec::new();
    let mut base = start.clone();
    let mut base_phi = start_phi;
    for _ in 0..32 {
        let next = perturb(&base, rng, allow_rotation);
        let phi = eval(&next)?;
        if phi.is_finite() || !base_phi.is_finite() {
            if base_phi.is_finite() && phi > base_phi {
                ups.push(phi - base_phi);
            }
            base = next;
            base_phi = phi;
        }
    }
    let mean = if ups.is_empty() { 1.0 } else { ups.iter().sum::<f64>() / ups.len() as f64 };
    Ok((mean / -(0.8f64).ln()).max(1e-2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MultiPinNet;

    fn inputs() -> Inputs {
        let mk = |id: &str, w, h| Module::new(id, w, h, DpCurve::new(vec![(2, 20), (4, 8)]).unwrap()).unwrap();
        let modules = vec![mk("a", 4, 3), mk("b", 2, 5), mk("c", 3, 3)];
        let nets = vec![
            MultiPinNet { name: "n0".into(), source: 0, sinks: vec![1, 2] },
            MultiPinNet { name: "n1".into(), source: 1, sinks: vec![2] },
        ];
        let dag = TimingDag::from_nets(3, &nets, 30, 0.5).unwrap();
        Inputs::new(modules, dag, LsDpCurve::new(vec![(0, 0), (1, 1)], 1).unwrap()).unwrap()
    }

    #[test]
    fn single_term_weight() {
        let inp = inputs();
        let w = CostWeights { area: 1.0, wire: 0.0, power: 0.0, pnr: 0.0, unassigned: 0.0 };
        let Evaluation::Feasible(c) = evaluate(&Cbl::initial(3), &w, &inp, Mode::Vlsaf, VaOptions::EXACT).unwrap() else {
            panic!("infeasible");
        };
        assert_eq!(c.phi, c.floorplan.area() as f64);
        assert_eq!(c.components.phi(&w), c.phi);
    }

    #[test]
    fn zero_moves_returns_start() {
        let inp = inputs();
        let cfg = AnnealConfig { moves_per_temp: Some(0), initial_temp: Some(10.0), ..Default::default() };
        let out = anneal(&cfg, &CostWeights::defaults(1), &inp, Mode::Vlsaf).unwrap();
        assert_eq!(out.evaluations, 1);
        assert_eq!(out.best.phi, out.initial_phi);
    }

    #[test]
    fn seeded_runs_repeat() {
        let inp = inputs();
        let cfg = AnnealConfig { max_temps: Some(5), seed: 9, ..Default::default() };
        let a = anneal(&cfg, &CostWeights::defaults(1), &inp, Mode::Vlsaf).unwrap();
        let b = anneal(&cfg, &CostWeights::defaults(1), &inp, Mode::Vlsaf).unwrap();
        assert_eq!(a, b);
        assert!(a.best_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn deferred_mode_has_no_ls_term() {
        let inp = inputs();
        let w = CostWeights::defaults(1);
        let Evaluation::Feasible(c) = evaluate(&Cbl::initial(3), &w, &inp, Mode::VafLsi, VaOptions::EXACT).unwrap() else {
            panic!("infeasible");
        };
        assert!(c.ls.is_none());
        assert_eq!(c.components.unassigned, 0);
    }

    #[test]
    fn rejects_bad_cooling() {
        let cfg = AnnealConfig { cooling: 1.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
