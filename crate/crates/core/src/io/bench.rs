//! Benchmark bundles: `blocks.txt`, `nets.txt` and `voltage.txt`.
//!
//! All three files are whitespace separated with `#` comments.
//!
//! ```text
//! # blocks.txt: id width height
//! a 40 30
//! # nets.txt: net source sink [sink ...]
//! n1 a b c
//! # voltage.txt
//! T_CYCLE 120
//! DELTA 0.1
//! LS_AREA 4
//! LS_CURVE (0,0) (1,2)
//! UNITS ps uW
//! a (10,90) (14,40)
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::anneal::Inputs;
use crate::error::{Error, Result};
use crate::model::{Delay, DpCurve, LsDpCurve, Module, MultiPinNet, Power, TimingDag};

pub const BLOCKS_FILE: &str = "blocks.txt";
pub const NETS_FILE: &str = "nets.txt";
pub const VOLTAGE_FILE: &str = "voltage.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct Bench {
    pub modules: Vec<Module>,
    pub nets: Vec<MultiPinNet>,
    pub t_cycle: Delay,
    pub delta: f64,
    pub ls_curve: LsDpCurve,
    pub units: Option<String>,
}

fn perr(file: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { file: file.into(), line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn parse_pairs(file: &str, line: usize, text: &str) -> Result<Vec<(i64, i64)>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| perr(file, line, format!("expected `(delay,power)` at `{rest}`")))?;
        let (d, p) = body.0.split_once(',').ok_or_else(|| perr(file, line, format!("expected `,` in `({})`", body.0)))?;
        let d = d.parse().map_err(|_| perr(file, line, format!("bad delay `{d}`")))?;
        let p = p.parse().map_err(|_| perr(file, line, format!("bad power `{p}`")))?;
        out.push((d, p));
        rest = body.1;
    }
    if out.is_empty() {
        return Err(perr(file, line, "no (delay,power) pairs"));
    }
    Ok(out)
}

impl Bench {
    pub fn parse(blocks: &str, nets: &str, voltage: &str) -> Result<Bench> {
        let mut dims: Vec<(String, i64, i64)> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (ln, t) in lines(blocks) {
            if t.len() != 3 {
                return Err(perr(BLOCKS_FILE, ln, "expected `id width height`"));
            }
            let w = t[1].parse().map_err(|_| perr(BLOCKS_FILE, ln, format!("bad width `{}`", t[1])))?;
            let h = t[2].parse().map_err(|_| perr(BLOCKS_FILE, ln, format!("bad height `{}`", t[2])))?;
            if index.insert(t[0].to_string(), dims.len()).is_some() {
                return Err(perr(BLOCKS_FILE, ln, format!("duplicate module `{}`", t[0])));
            }
            dims.push((t[0].to_string(), w, h));
        }

        let mut net_list = Vec::new();
        for (ln, t) in lines(nets) {
            if t.len() < 3 {
                return Err(perr(NETS_FILE, ln, "expected `net source sink [sink ...]`"));
            }
            let pin = |name: &str| index.get(name).copied().ok_or_else(|| perr(NETS_FILE, ln, format!("unknown module `{name}`")));
            let source = pin(t[1])?;
            let sinks = t[2..].iter().map(|s| pin(s)).collect::<Result<Vec<_>>>()?;
            net_list.push(MultiPinNet { name: t[0].to_string(), source, sinks });
        }

        let (mut t_cycle, mut delta, mut ls_area, mut ls_pairs, mut units) = (None, None, None, None, None);
        let mut curves: Vec<Option<Vec<(Delay, Power)>>> = vec![None; dims.len()];
        for (ln, t) in lines(voltage) {
            let rest = t[1..].join(" ");
            let need_one = || {
                if t.len() == 2 {
                    Ok(t[1])
                } else {
                    Err(perr(VOLTAGE_FILE, ln, format!("`{}` takes one value", t[0])))
                }
            };
            match t[0] {
                "T_CYCLE" => t_cycle = Some(need_one()?.parse().map_err(|_| perr(VOLTAGE_FILE, ln, "bad T_CYCLE"))?),
                "DELTA" => delta = Some(need_one()?.parse::<f64>().map_err(|_| perr(VOLTAGE_FILE, ln, "bad DELTA"))?),
                "LS_AREA" => ls_area = Some(need_one()?.parse::<i64>().map_err(|_| perr(VOLTAGE_FILE, ln, "bad LS_AREA"))?),
                "LS_CURVE" => ls_pairs = Some((ln, parse_pairs(VOLTAGE_FILE, ln, &rest)?)),
                "UNITS" => units = Some(rest),
                id => {
                    let &i = index.get(id).ok_or_else(|| perr(VOLTAGE_FILE, ln, format!("unknown module `{id}`")))?;
                    if curves[i].is_some() {
                        return Err(perr(VOLTAGE_FILE, ln, format!("second curve for `{id}`")));
                    }
                    curves[i] = Some(parse_pairs(VOLTAGE_FILE, ln, &rest)?);
                }
            }
        }
        let t_cycle: Delay = t_cycle.ok_or_else(|| perr(VOLTAGE_FILE, 0, "missing T_CYCLE"))?;
        let delta = delta.ok_or_else(|| perr(VOLTAGE_FILE, 0, "missing DELTA"))?;
        let ls_area = ls_area.ok_or_else(|| perr(VOLTAGE_FILE, 0, "missing LS_AREA"))?;
        let (ls_line, ls_pairs) = ls_pairs.ok_or_else(|| perr(VOLTAGE_FILE, 0, "missing LS_CURVE"))?;
        if t_cycle <= 0 || !(delta > 0.0) {
            return Err(perr(VOLTAGE_FILE, 0, "T_CYCLE and DELTA must be positive"));
        }
        let ls_curve = LsDpCurve::new(ls_pairs, ls_area).map_err(|e| perr(VOLTAGE_FILE, ls_line, e.to_string()))?;

        let mut modules = Vec::with_capacity(dims.len());
        for ((id, w, h), c) in dims.into_iter().zip(curves) {
            let pts = c.ok_or_else(|| perr(VOLTAGE_FILE, 0, format!("no curve for `{id}`")))?;
            let curve = DpCurve::new(pts).map_err(|e| perr(VOLTAGE_FILE, 0, format!("`{id}`: {e}")))?;
            modules.push(Module::new(id, w, h, curve)?);
        }
        let bench = Bench { modules, nets: net_list, t_cycle, delta, ls_curve, units };
        bench.dag()?;
        Ok(bench)
    }

    pub fn read_dir(dir: &Path) -> Result<Bench> {
        let read = |f: &str| fs::read_to_string(dir.join(f)).map_err(|e| Error::Io(format!("{}: {e}", dir.join(f).display())));
        Bench::parse(&read(BLOCKS_FILE)?, &read(NETS_FILE)?, &read(VOLTAGE_FILE)?)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(BLOCKS_FILE), self.blocks_text())?;
        fs::write(dir.join(NETS_FILE), self.nets_text())?;
        fs::write(dir.join(VOLTAGE_FILE), self.voltage_text())?;
        Ok(())
    }

    pub fn blocks_text(&self) -> String {
        let mut s = String::from("# id width height\n");
        for m in &self.modules {
            let _ = writeln!(s, "{} {} {}", m.id, m.width, m.height);
        }
        s
    }

    pub fn nets_text(&self) -> String {
        let mut s = String::from("# net source sinks...\n");
        for n in &self.nets {
            let _ = write!(s, "{} {}", n.name, self.modules[n.source].id);
            for &k in &n.sinks {
                let _ = write!(s, " {}", self.modules[k].id);
            }
            s.push('\n');
        }
        s
    }

    pub fn voltage_text(&self) -> String {
        let pairs = |p: &[(i64, i64)]| p.iter().map(|(d, q)| format!("({d},{q})")).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "T_CYCLE {}", self.t_cycle);
        let _ = writeln!(s, "DELTA {}", self.delta);
        let _ = writeln!(s, "LS_AREA {}", self.ls_curve.area());
        let _ = writeln!(s, "LS_CURVE {}", pairs(self.ls_curve.pairs()));
        if let Some(u) = &self.units {
            let _ = writeln!(s, "UNITS {u}");
        }
        for m in &self.modules {
            let _ = writeln!(s, "{} {}", m.id, pairs(m.curve.points()));
        }
        s
    }

    pub fn dag(&self) -> Result<TimingDag> {
        TimingDag::from_nets(self.modules.len(), &self.nets, self.t_cycle, self.delta)
    }

    pub fn num_levels(&self) -> usize {
        self.ls_curve.len()
    }

    /// Keeps the first `k` voltage levels of every curve.
    pub fn truncate_levels(&self, k: usize) -> Result<Bench> {
        if k == 0 || k > self.num_levels() || self.modules.iter().any(|m| m.curve.len() < k) {
            return Err(Error::Config(format!("cannot keep {k} voltage levels")));
        }
        let mut out = self.clone();
        for m in &mut out.modules {
            m.curve = DpCurve::new(m.curve.points()[..k].to_vec())?;
        }
        out.ls_curve = LsDpCurve::new(self.ls_curve.pairs()[..k].to_vec(), self.ls_curve.area())?;
        Ok(out)
    }

    pub fn inputs(&self) -> Result<Inputs> {
        Inputs::new(self.modules.clone(), self.dag()?, self.ls_curve.clone())
    }
}
