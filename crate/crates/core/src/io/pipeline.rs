//! End-to-end run: anneal, assign shifters on the stored best, redistribute
//! white space, report.

use crate::anneal::{anneal, AnnealConfig, AnnealOutcome, CostWeights, Inputs, Mode};
use crate::error::Result;
use crate::io::bench::Bench;
use crate::io::design::write_design;
use crate::io::report::RunReport;
use crate::io::svg::render_svg;
use crate::ls::{plan_ls, LsPlan};
use crate::model::TimingDag;
use crate::wsr::{run_wsr, PlacedDesign, WsrConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub anneal: AnnealConfig,
    /// Derived from the shifter area when unset.
    pub weights: Option<CostWeights>,
    pub final_moves: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { mode: Mode::Vlsaf, anneal: AnnealConfig::default(), weights: None, final_moves: true }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: RunReport,
    pub design: PlacedDesign,
    pub plan: LsPlan,
    pub outcome: AnnealOutcome,
    pub inputs: Inputs,
}

impl PipelineOutput {
    pub fn dag(&self) -> &TimingDag {
        &self.inputs.dag
    }

    pub fn svg(&self) -> String {
        render_svg(&self.design)
    }

    pub fn design_text(&self) -> String {
        let ids: Vec<String> = self.inputs.modules.iter().map(|m| m.id.clone()).collect();
        write_design(&self.design, &self.inputs.dag, &ids)
    }
}

pub fn run_pipeline(bench: &Bench, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let inputs = bench.inputs()?;
    let weights = cfg.weights.unwrap_or_else(|| CostWeights::defaults(inputs.a_ls()));
    let outcome = anneal(&cfg.anneal, &weights, &inputs, cfg.mode)?;
    let best = &outcome.best;
    let plan = match &best.ls {
        Some(p) => p.clone(),
        None => plan_ls(&best.floorplan, &inputs.dag, &best.va, inputs.a_ls(), inputs.ls_params),
    };
    let wsr = WsrConfig { final_moves: cfg.final_moves, ..WsrConfig::new(inputs.a_ls()) };
    let design = run_wsr(&best.floorplan, &inputs.dag, &best.va.levels, &plan, wsr);

    let dag = &inputs.dag;
    let hpwl = design.hpwl(dag);
    // Adding zero turns the -0.0 of an empty sum into 0.0.
    let ilo = design.total_ilo(dag) + 0.0;
    let area = design.area();
    let module_area: f64 = design.modules.iter().map(|m| m.area()).sum();
    let report = RunReport {
        mode: match cfg.mode {
            Mode::Vlsaf => "vlsaf".into(),
            Mode::VafLsi => "vaf-lsi".into(),
        },
        seed: cfg.anneal.seed,
        modules: inputs.modules.len(),
        nets: dag.edges().len(),
        levels: inputs.ls_curve.len(),
        t_cycle: dag.t_cycle,
        critical_path: dag.longest_path(&best.va.module_delay, &best.va.edge_delay),
        timing_violations: best.va.timing_violations(dag),
        max_power: inputs.max_power(),
        power: best.va.total_power,
        area,
        chip_width: best.floorplan.width,
        chip_height: best.floorplan.height,
        ws_pct: if area > 0.0 { 100.0 * (area - module_area) / area } else { 0.0 },
        hpwl,
        ilo,
        ilo_pct: if hpwl > 0.0 { 100.0 * ilo / hpwl } else { 0.0 },
        wirelength: hpwl + ilo,
        pnr: design.pnr(),
        shifters: plan.assignment.instances.len(),
        unassigned: plan.assignment.unassigned(),
        via_els: design.via_els.len(),
        failed: design.failed.len(),
        phi: best.phi,
        evaluations: outcome.evaluations,
        temperatures: outcome.temperatures,
    };
    Ok(PipelineOutput { report, design, plan, outcome, inputs })
}
