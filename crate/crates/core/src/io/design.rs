//! Placed-design text file.
//!
//! ```text
//! CHIP x0 y0 x1 y1
//! MODULE id level x0 y0 x1 y1 room_x0 room_y0 room_x1 room_y1
//! NET net from to
//! LS instance net_index x0 y0 x1 y1
//! ```
//!
//! Coordinates are written in shortest round-trip form, so parsing a file
//! recovers every value exactly. `NET` lines list two-pin nets in order and
//! `LS` refers to them by position.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::model::TimingDag;
use crate::wsr::PlacedDesign;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignModule {
    pub id: String,
    pub level: usize,
    pub rect: Rect,
    pub room: Rect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignFile {
    pub chip: Rect,
    pub modules: Vec<DesignModule>,
    /// `(name, from, to)` with module positions.
    pub nets: Vec<(String, usize, usize)>,
    /// `(instance, net index, rect)`.
    pub shifters: Vec<(usize, usize, Rect)>,
}

fn rect_text(r: &Rect) -> String {
    format!("{} {} {} {}", r.x0, r.y0, r.x1, r.y1)
}

pub fn write_design(design: &PlacedDesign, dag: &TimingDag, ids: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "CHIP {}", rect_text(&design.chip));
    for (i, m) in design.modules.iter().enumerate() {
        let _ = writeln!(s, "MODULE {} {} {} {}", ids[i], design.levels[i], rect_text(m), rect_text(&design.rooms[i]));
    }
    for e in dag.edges() {
        let _ = writeln!(s, "NET {} {} {}", e.net, ids[e.from], ids[e.to]);
    }
    for l in &design.shifters {
        let _ = writeln!(s, "LS {} {} {}", l.instance, l.edge, rect_text(&l.rect));
    }
    s
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { file: "design".into(), line, msg: msg.into() }
}

fn nums(ln: usize, toks: &[&str]) -> Result<Vec<f64>> {
    toks.iter().map(|t| t.parse::<f64>().map_err(|_| err(ln, format!("bad number `{t}`")))).collect()
}

fn rect(ln: usize, toks: &[&str]) -> Result<Rect> {
    let v = nums(ln, toks)?;
    Ok(Rect { x0: v[0], y0: v[1], x1: v[2], y1: v[3] })
}

pub fn parse_design(text: &str) -> Result<DesignFile> {
    let mut chip = None;
    let mut modules: Vec<DesignModule> = Vec::new();
    let mut nets = Vec::new();
    let mut shifters = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.first().copied() {
            None => {}
            Some("CHIP") if t.len() == 5 => chip = Some(rect(ln, &t[1..])?),
            Some("MODULE") if t.len() == 11 => modules.push(DesignModule {
                id: t[1].to_string(),
                level: t[2].parse().map_err(|_| err(ln, "bad level"))?,
                rect: rect(ln, &t[3..7])?,
                room: rect(ln, &t[7..11])?,
            }),
            Some("NET") if t.len() == 4 => {
                let find = |id: &str| modules.iter().position(|m| m.id == id).ok_or_else(|| err(ln, format!("unknown module `{id}`")));
                nets.push((t[1].to_string(), find(t[2])?, find(t[3])?));
            }
            Some("LS") if t.len() == 7 => {
                let inst = t[1].parse().map_err(|_| err(ln, "bad instance"))?;
                let net: usize = t[2].parse().map_err(|_| err(ln, "bad net index"))?;
                if net >= nets.len() {
                    return Err(err(ln, "net index out of range"));
                }
                shifters.push((inst, net, rect(ln, &t[3..7])?));
            }
            Some(other) => return Err(err(ln, format!("unexpected `{other}` line"))),
        }
    }
    Ok(DesignFile { chip: chip.ok_or_else(|| err(0, "missing CHIP"))?, modules, nets, shifters })
}
