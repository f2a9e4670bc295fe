//! Run reports as key-value text and as a readable table.

use std::fmt::Write as _;

use crate::model::{Delay, Power};

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub mode: String,
    pub seed: u64,
    pub modules: usize,
    pub nets: usize,
    pub levels: usize,
    pub t_cycle: Delay,
    pub critical_path: Delay,
    pub timing_violations: usize,
    pub max_power: Power,
    pub power: Power,
    /// Bounding box of modules and shifters.
    pub area: f64,
    pub chip_width: i64,
    pub chip_height: i64,
    /// White space share of `area`, percent.
    pub ws_pct: f64,
    pub hpwl: f64,
    pub ilo: f64,
    pub ilo_pct: f64,
    /// `hpwl + ilo`.
    pub wirelength: f64,
    pub pnr: f64,
    pub shifters: usize,
    /// Left without a room after the flow assignment.
    pub unassigned: usize,
    pub via_els: usize,
    pub failed: usize,
    pub phi: f64,
    pub evaluations: usize,
    pub temperatures: usize,
}

impl RunReport {
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} {v}");
        };
        kv("mode", self.mode.clone());
        kv("seed", self.seed.to_string());
        kv("modules", self.modules.to_string());
        kv("nets", self.nets.to_string());
        kv("levels", self.levels.to_string());
        kv("t_cycle", self.t_cycle.to_string());
        kv("critical_path", self.critical_path.to_string());
        kv("timing_violations", self.timing_violations.to_string());
        kv("max_power", self.max_power.to_string());
        kv("power", self.power.to_string());
        kv("area", format!("{:.6}", self.area));
        kv("chip_width", self.chip_width.to_string());
        kv("chip_height", self.chip_height.to_string());
        kv("ws_pct", format!("{:.6}", self.ws_pct));
        kv("hpwl", format!("{:.6}", self.hpwl));
        kv("ilo", format!("{:.6}", self.ilo));
        kv("ilo_pct", format!("{:.6}", self.ilo_pct));
        kv("wirelength", format!("{:.6}", self.wirelength));
        kv("pnr", format!("{:.6}", self.pnr));
        kv("shifters", self.shifters.to_string());
        kv("unassigned", self.unassigned.to_string());
        kv("via_els", self.via_els.to_string());
        kv("failed", self.failed.to_string());
        kv("phi", format!("{:.6}", self.phi));
        kv("evaluations", self.evaluations.to_string());
        kv("temperatures", self.temperatures.to_string());
        s
    }

    /// Table for the terminal; `runtime` in seconds is shown when given.
    pub fn to_table(&self, runtime: Option<f64>) -> String {
        let rows: Vec<(&str, String)> = vec![
            ("mode", self.mode.clone()),
            ("modules / nets / levels", format!("{} / {} / {}", self.modules, self.nets, self.levels)),
            ("power (max)", format!("{} ({})", self.power, self.max_power)),
            ("critical path / T_cycle", format!("{} / {}", self.critical_path, self.t_cycle)),
            ("wire length w. LS", format!("{:.2}", self.wirelength)),
            ("ILO (%)", format!("{:.2} ({:.2})", self.ilo, self.ilo_pct)),
            ("PNR", format!("{:.2}", self.pnr)),
            ("LS number", self.shifters.to_string()),
            ("LS unassigned / via ELS / failed", format!("{} / {} / {}", self.unassigned, self.via_els, self.failed)),
            ("area", format!("{:.2} ({} x {} rooms)", self.area, self.chip_width, self.chip_height)),
            ("W.S (%)", format!("{:.2}", self.ws_pct)),
            ("cost", format!("{:.2}", self.phi)),
            ("evaluations", self.evaluations.to_string()),
        ];
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<width$}  {v}");
        }
        if let Some(t) = runtime {
            let _ = writeln!(s, "{:<width$}  {t:.2}", "time (s)");
        }
        s
    }
}
