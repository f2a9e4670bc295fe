use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use vlsaf::anneal::{AnnealConfig, CostWeights, Mode};
use vlsaf::io::{generate_benchmark, run_pipeline, Bench, GenConfig, PipelineConfig};
use vlsaf::Error;

#[derive(Parser)]
#[command(name = "vlsaf", version, about = "Voltage and level-shifter assignment driven floorplanning")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Vlsaf,
    VafLsi,
}

#[derive(Subcommand)]
enum Cmd {
    /// Floorplan a benchmark directory.
    Run {
        #[arg(long)]
        bench: PathBuf,
        #[arg(long, value_enum, default_value = "vlsaf")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use only the first k voltage levels.
        #[arg(long)]
        voltages: Option<usize>,
        /// λA,λW,λP,λR,λN
        #[arg(long)]
        weights: Option<String>,
        /// Comma-separated key=value list: t0, cooling, moves, stop, min-accept,
        /// max-temps, starts, search-nodes, final-nodes, rotation.
        #[arg(long = "sa-schedule")]
        sa_schedule: Option<String>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        design: Option<PathBuf>,
    },
    /// Write a seeded synthetic benchmark.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        modules: usize,
        #[arg(long, default_value_t = 2)]
        voltages: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Nets per module.
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        /// Clock period over the estimated all-fastest critical path.
        #[arg(long, default_value_t = 1.1)]
        slack: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long = "ls-area", default_value_t = 4)]
        ls_area: i64,
    },
}

fn parse_weights(s: &str) -> Result<CostWeights, Error> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad weight `{t}`"))))
        .collect::<Result<_, _>>()?;
    if v.len() != 5 {
        return Err(Error::Config("expected five weights".into()));
    }
    let w = CostWeights { area: v[0], wire: v[1], power: v[2], pnr: v[3], unassigned: v[4] };
    w.validate()?;
    Ok(w)
}

fn parse_schedule(s: &str, mut cfg: AnnealConfig) -> Result<AnnealConfig, Error> {
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got `{item}`")))?;
        let bad = || Error::Config(format!("bad value for `{k}`: `{v}`"));
        let f = || v.parse::<f64>().map_err(|_| bad());
        let n = || v.parse::<usize>().map_err(|_| bad());
        match k {
            "t0" => cfg.initial_temp = Some(f()?),
            "cooling" => cfg.cooling = f()?,
            "moves" => cfg.moves_per_temp = Some(n()?),
            "stop" => cfg.stop_temp = f()?,
            "min-accept" => cfg.min_accept = f()?,
            "max-temps" => cfg.max_temps = Some(n()?),
            "starts" => cfg.starts = n()?,
            "search-nodes" => cfg.search_nodes = n()?,
            "final-nodes" => cfg.final_nodes = n()?,
            "rotation" => cfg.allow_rotation = v.parse().map_err(|_| bad())?,
            _ => return Err(Error::Config(format!("unknown schedule key `{k}`"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::TimingInfeasible(_) | Error::NoFeasibleFloorplan(_) | Error::FlowInfeasible => 1,
        _ => 2,
    }
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Run { bench, mode, seed, voltages, weights, sa_schedule, svg, report, design } => {
            let mut b = Bench::read_dir(&bench)?;
            if let Some(k) = voltages {
                b = b.truncate_levels(k)?;
            }
            let mut anneal = AnnealConfig { seed, ..AnnealConfig::default() };
            if let Some(s) = sa_schedule {
                anneal = parse_schedule(&s, anneal)?;
            }
            let cfg = PipelineConfig {
                mode: match mode {
                    ModeArg::Vlsaf => Mode::Vlsaf,
                    ModeArg::VafLsi => Mode::VafLsi,
                },
                anneal,
                weights: weights.as_deref().map(parse_weights).transpose()?,
                final_moves: true,
            };
            let start = Instant::now();
            let out = run_pipeline(&b, &cfg)?;
            let elapsed = start.elapsed().as_secs_f64();
            print!("{}", out.report.to_table(Some(elapsed)));
            if let Some(p) = report {
                std::fs::write(p, out.report.to_kv())?;
            }
            if let Some(p) = svg {
                std::fs::write(p, out.svg())?;
            }
            if let Some(p) = design {
                std::fs::write(p, out.design_text())?;
            }
            Ok(())
        }
        Cmd::Generate { out, modules, voltages, seed, density, slack, delta, ls_area } => {
            let cfg = GenConfig { density, slack, delta, ls_area, ..GenConfig::new(modules, voltages, seed) };
            let b = generate_benchmark(&cfg)?;
            b.write_dir(&out)?;
            println!("wrote {} modules, {} nets to {}", b.modules.len(), b.nets.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
