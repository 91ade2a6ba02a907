//! Experiment driver behind the `ssdyn` binary: config handling, CSV output
//! and companion gnuplot scripts.
//!
//! Settings come from an optional TOML file (`--config`); any flag given on
//! the command line overrides the file. The output root is `--out`, else
//! `$SSDYN_OUT`, else the file's `out`, else `./out`; each run writes into
//! `<root>/<name>/` where `name` defaults to the subcommand.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::accuracy::{convergence_study, ladder, ExactProblem};
use crate::error::{Error, Result};
use crate::problems::fem::rod;
use crate::problems::{
    dissipation_metric, isotropy_defect, membrane_assembly, membrane_rays, rod_assembly, sdof_case,
    semidiscrete_modal_oracle, spring_pendulum, van_der_pol, SdofKind, VanDerPol,
};
use crate::reference::rk4_sampled;
use crate::spectral::{
    bifurcation_point, dissipation_omega, spectral_sample, stability_limit, StabilityLimit,
};
use crate::stepper::{integrate, NewtonOptions};
use crate::system::{initial_state, SecondOrderSystem, State, Trajectory, Variable};
use crate::tables::{parse_spec, ButcherTable};

pub const OUT_ENV: &str = "SSDYN_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "ssdyn",
    version,
    about = "Single-solve explicit integrators: spectra, convergence and wave benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Spectra,
    Stability,
    Converge,
    Simulate,
    Wave1d,
    Wave2d,
    Audit,
}

impl CommandKind {
    pub fn id(&self) -> &'static str {
        match self {
            CommandKind::Spectra => "spectra",
            CommandKind::Stability => "stability",
            CommandKind::Converge => "converge",
            CommandKind::Simulate => "simulate",
            CommandKind::Wave1d => "wave1d",
            CommandKind::Wave2d => "wave2d",
            CommandKind::Audit => "audit",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ρ, ξ̄ and PE against Ω = ωΔt.
    Spectra(Flags),
    /// Ω_s and Ω_b against ξ.
    Stability(Flags),
    /// Global-error convergence on an SDOF case.
    Converge(Flags),
    /// Trajectories of SDOF or nonlinear benchmarks.
    Simulate(Flags),
    /// Rod under a suddenly applied end force.
    Wave1d(Flags),
    /// Center-loaded square membrane.
    Wave2d(Flags),
    /// Order conditions, classification and stability of tables.
    Audit(Flags),
    /// Run the command named in a config file.
    Run {
        #[arg(value_name = "CONFIG")]
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

/// Flags shared by every subcommand; each overrides the config key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Algorithms, e.g. `new2,gsse:0.8,gssi:0.8:0.2`.
    #[arg(long, alias = "alg", value_delimiter = ',', num_args = 1..)]
    pub algs: Option<Vec<String>>,
    #[arg(long, num_args = 1..)]
    pub xi: Option<Vec<f64>>,
    #[arg(long)]
    pub omega_min: Option<f64>,
    #[arg(long)]
    pub omega_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub dts: Option<Vec<f64>>,
    #[arg(long)]
    pub k_min: Option<i32>,
    #[arg(long)]
    pub k_max: Option<i32>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub n_elem: Option<usize>,
    #[arg(long)]
    pub n_side: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub alpha_k: Option<f64>,
    #[arg(long)]
    pub alpha_m: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Solve the membrane on the whole square instead of a quarter.
    #[arg(long)]
    pub full: bool,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub nodes: Option<Vec<usize>>,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub amp: Option<f64>,
    #[arg(long)]
    pub omega_p: Option<f64>,
    #[arg(long)]
    pub reference_dt: Option<f64>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Config-file schema; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<CommandKind>,
    pub name: Option<String>,
    #[serde(alias = "alg")]
    pub algs: Option<Vec<String>>,
    pub xi: Option<Vec<f64>>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub points: Option<usize>,
    pub problem: Option<String>,
    pub dt: Option<f64>,
    pub dts: Option<Vec<f64>>,
    pub k_min: Option<i32>,
    pub k_max: Option<i32>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub n_elem: Option<usize>,
    pub n_side: Option<usize>,
    pub r: Option<f64>,
    pub alpha_k: Option<f64>,
    pub alpha_m: Option<f64>,
    pub zeta: Option<f64>,
    pub quarter: Option<bool>,
    pub nodes: Option<Vec<usize>>,
    pub stride: Option<usize>,
    pub mu: Option<f64>,
    pub amp: Option<f64>,
    pub omega_p: Option<f64>,
    pub reference_dt: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Flags win over file values.
    pub fn overridden_by(mut self, f: &Flags) -> Self {
        macro_rules! take {
            ($($field:ident),*) => { $( if f.$field.is_some() { self.$field = f.$field.clone(); } )* };
        }
        take!(
            algs,
            xi,
            omega_min,
            omega_max,
            points,
            problem,
            dt,
            dts,
            k_min,
            k_max,
            cfl,
            t_end,
            n_elem,
            n_side,
            r,
            alpha_k,
            alpha_m,
            zeta,
            nodes,
            stride,
            mu,
            amp,
            omega_p,
            reference_dt,
            name,
            out
        );
        if f.full {
            self.quarter = Some(false);
        }
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Paths written by a run.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
    /// Human-readable summary printed to stdout.
    pub summary: String,
}

pub fn run_cli(cli: Cli) -> Result<Artifacts> {
    let (kind, flags) = match cli.command {
        Command::Spectra(f) => (Some(CommandKind::Spectra), f),
        Command::Stability(f) => (Some(CommandKind::Stability), f),
        Command::Converge(f) => (Some(CommandKind::Converge), f),
        Command::Simulate(f) => (Some(CommandKind::Simulate), f),
        Command::Wave1d(f) => (Some(CommandKind::Wave1d), f),
        Command::Wave2d(f) => (Some(CommandKind::Wave2d), f),
        Command::Audit(f) => (Some(CommandKind::Audit), f),
        Command::Run { file, mut flags } => {
            flags.config = Some(file);
            (None, flags)
        }
    };
    let file = match &flags.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let kind = kind
        .or(file.command)
        .ok_or_else(|| Error::Config("field `command` is required for `run`".into()))?;
    let cfg = file.overridden_by(&flags);
    let out = output_root(flags.out.as_deref(), cfg.out.as_deref())
        .join(cfg.name.as_deref().unwrap_or(kind.id()));
    run(kind, &cfg, &out)
}

/// Flag, then environment, then config file, then `./out`.
pub fn output_root(flag: Option<&Path>, file: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    file.map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("out"))
}

pub fn run(kind: CommandKind, cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts> {
    fs::create_dir_all(out)?;
    match kind {
        CommandKind::Spectra => spectra(cfg, out),
        CommandKind::Stability => stability(cfg, out),
        CommandKind::Converge => converge(cfg, out),
        CommandKind::Simulate => simulate(cfg, out),
        CommandKind::Wave1d => wave1d(cfg, out),
        CommandKind::Wave2d => wave2d(cfg, out),
        CommandKind::Audit => audit(cfg, out),
    }
}

fn algorithms(cfg: &ExperimentConfig, default: &[&str]) -> Result<Vec<ButcherTable>> {
    let names: Vec<String> = cfg
        .algs
        .clone()
        .unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect());
    if names.is_empty() {
        return Err(Error::Config("field `algs` is empty".into()));
    }
    names
        .iter()
        .map(|n| parse_spec(n).map_err(|e| Error::Config(format!("field `algs`: {e}"))))
        .collect()
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::Config(format!(
            "field `{name}` must be positive, got {x}"
        ))),
        _ => Ok(v),
    }
}

/// File-name friendly label: `GSSE(0.8,0)` → `gsse_0.8_0`.
pub fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    s.split('_')
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

fn with_alg(alg: &ButcherTable, e: Error) -> Error {
    Error::Config(format!("algorithm {}: {e}", alg.label()))
}

struct Csv {
    path: PathBuf,
    w: csv::Writer<fs::File>,
}

impl Csv {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        Ok(Self { path, w })
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        self.w.write_record(fields)?;
        Ok(())
    }

    fn finish(mut self, art: &mut Artifacts) -> Result<()> {
        self.w.flush()?;
        art.files.push(self.path);
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), num)
}

fn script(dir: &Path, name: &str, body: String, art: &mut Artifacts) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body)?;
    art.files.push(path);
    Ok(())
}

fn gp_header(title: &str, out_png: &str) -> String {
    format!(
        "# gnuplot script; run `gnuplot {}` from this directory\nset datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\nset output '{out_png}'\nset title '{title}'\nset grid\n",
        out_png.replace(".png", ".gp")
    )
}

fn spectra(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts> {
    let algs = algorithms(cfg, &["new2"])?;
    let xis = cfg.xi.clone().unwrap_or_else(|| vec![0.0]);
    if let Some(x) = xis.iter().find(|x| !(0.0..1.0).contains(*x)) {
        return Err(Error::Config(format!("field `xi`: {x} outside [0, 1)")));
    }
    let lo = positive("omega_min", cfg.omega_min)?.unwrap_or(1e-2);
    let hi = positive("omega_max", cfg.omega_max)?.unwrap_or(10.0);
    let n = cfg.points.unwrap_or(400).max(2);
    if hi <= lo {
        return Err(Error::Config(
            "field `omega_max` must exceed `omega_min`".into(),
        ));
    }
    let grid: Vec<f64> = (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect();
    let mut art = Artifacts::default();
    let mut gp = String::new();
    for alg in &algs {
        let file = format!("spectra_{}.csv", slug(&alg.label()));
        let mut csv = Csv::create(out, &file, &["omega_dt", "xi", "rho", "xibar", "pe"])?;
        for &xi in &xis {
            for &w in &grid {
                let s = spectral_sample(alg, xi, w).map_err(|e| with_alg(alg, e))?;
                csv.row(&[num(w), num(xi), num(s.rho), opt(s.xibar), opt(s.pe)])?;
            }
        }
        csv.finish(&mut art)?;
        let base = file.trim_end_matches(".csv");
        gp.clear();
        gp += &gp_header(
            &format!("{} spectral properties", alg.label()),
            &format!("{base}.png"),
        );
        gp += "set logscale x\nset xlabel 'Omega = omega dt'\nset multiplot layout 3,1\n";
        for (col, label) in [(3, "rho"), (4, "xibar"), (5, "PE")] {
            let _ = write!(gp, "set ylabel '{label}'\nplot ");
            let curves: Vec<String> = xis
                .iter()
                .map(|xi| {
                    format!("'{file}' using 1:($2=={xi} ? ${col} : 1/0) with lines title 'xi={xi}'")
                })
                .collect();
            gp += &curves.join(", ");
            gp += "\n";
        }
        gp += "unset multiplot\n";
        script(out, &format!("{base}.gp"), gp.clone(), &mut art)?;
    }
    art.summary = format!(
        "{} algorithm(s) × {} ξ value(s) × {n} Ω points",
        algs.len(),
        xis.len()
    );
    Ok(art)
}

fn limit_value(l: StabilityLimit) -> f64 {
    match l {
        StabilityLimit::Conditional(w) => w,
        StabilityLimit::Unconditional => f64::INFINITY,
        StabilityLimit::Empty => 0.0,
    }
}

fn stability(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts> {
    let algs = algorithms(cfg, &["new1", "new2", "ne", "gsse:0.8"])?;
    let xis = cfg
        .xi
        .clone()
        .unwrap_or_else(|| (0..=9).map(|i| i as f64 / 10.0).collect());
    let mut art = Artifacts::default();
    let mut csv = Csv::create(out, "stability.csv", &["alg", "xi", "omega_s", "omega_b"])?;
    let mut summary = String::new();
    for alg in &algs {
        for &xi in &xis {
            let ws = stability_limit(alg, xi, 1e-12).map_err(|e| with_alg(alg, e))?;
            let wb = bifurcation_point(alg, xi, 1e-10).map_err(|e| with_alg(alg, e))?;
            csv.row(&[alg.label(), num(xi), num(limit_value(ws)), opt(wb)])?;
            let _ = writeln!(
                summary,
                "{:<16} xi={xi:<5} omega_s={:<12.8} omega_b={}",
                alg.label(),
                limit_value(ws),
                opt(wb)
            );
        }
    }
    csv.finish(&mut art)?;
    let mut gp = gp_header("stability limit", "stability.png");
    gp += "set xlabel 'xi'\nset ylabel 'Omega_s'\nplot ";
    let curves: Vec<String> = algs
        .iter()
        .map(|a| format!("'stability.csv' using 2:(strcol(1) eq '{0}' ? $3 : 1/0) with linespoints title '{0}'", a.label()))
        .collect();
    gp += &curves.join(", ");
    gp += "\n";
    script(out, "stability.gp", gp, &mut art)?;
    art.summary = summary;
    Ok(art)
}

fn sdof_kind(cfg: &ExperimentConfig, default: SdofKind) -> Result<SdofKind> {
    match &cfg.problem {
        None => Ok(default),
        Some(p) => SdofKind::parse(p)
            .ok_or_else(|| Error::Config(format!("field `problem`: `{p}` is not an SDOF case"))),
    }
}

fn converge(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts> {
    let algs = algorithms(cfg, &["new1", "new2"])?;
    let kind = sdof_kind(cfg, SdofKind::ForcedUndamped)?;
    let case = sdof_case(kind);
    let dts = match &cfg.dts {
        Some(d) => {
            for &x in d {
                positive("dts", Some(x))?;
            }
            let mut d = d.clone();
            d.sort_by(|a, b| b.total_cmp(a));
            d
        }
        None => ladder(case.t_end, cfg.k_min.unwrap_or(2)..=cfg.k_max.unwrap_or(7)),
    };
    let mut art = Artifacts::default();
    let mut slopes = Csv::create(
        out,
        &format!("slopes_{}.csv", kind.id()),
        &["alg", "slope_u", "slope_v", "slope_a"],
    )?;
    let mut summary = format!("{:<16} {:>8} {:>8} {:>8}\n", kind.id(), "u", "v", "a");
    let mut gp = gp_header(
        &format!("convergence: {}", kind.id()),
        &format!("converge_{}.png", kind.id()),
    );
    gp += "set logscale xy\nset xlabel 'dt'\nset ylabel 'relative global error'\nset format y '%.0e'\nplot ";
    let mut curves = Vec::new();
    for alg in &algs {
        let r = convergence_study(alg, &case, &dts).map_err(|e| with_alg(alg, e))?;
        let file = format!("converge_{}_{}.csv", kind.id(), slug(&alg.label()));
        let mut csv = Csv::create(out, &file, &["dt", "err_u", "err_v", "err_a"])?;
        for i in 0..r.dts.len() {
            let ea = r.errors_a.as_ref().map(|e| e[i]);
            csv.row(&[
                num(r.dts[i]),
                num(r.errors_u[i]),
                num(r.errors_v[i]),
                opt(ea),
            ])?;
        }
        csv.finish(&mut art)?;
        slopes.row(&[alg.label(), num(r.slope_u), num(r.slope_v), opt(r.slope_a)])?;
        let _ = writeln!(
            summary,
            "{:<16} {:>8.3} {:>8.3} {:>8}",
            alg.label(),
            r.slope_u,
            r.slope_v,
            r.slope_a.map_or("-".into(), |a| format!("{a:.3}"))
        );
        curves.push(format!(
            "'{file}' using 1:2 with linespoints title '{} u'",
            alg.label()
        ));
    }
    slopes.finish(&mut art)?;
    gp += &curves.join(", ");
    gp += "\n";
    script(out, &format!("converge_{}.gp", kind.id()), gp, &mut art)?;
    art.summary = summary;
    Ok(art)
}

fn write_trajectory(
    csv: &mut Csv,
    traj: &Trajectory,
    nodes: &[usize],
    stride: usize,
) -> Result<()> {
    for s in traj.states.iter().step_by(stride.max(1)) {
        for &i in nodes {
            csv.row(&[num(s.t), i.to_string(), num(s.u[i]), num(s.v[i])])?;
        }
    }
    Ok(())
}

fn check_nodes(nodes: &[usize], dim: usize) -> Result<()> {
    match nodes.iter().find(|&&i| i >= dim) {
        Some(i) => Err(Error::Config(format!(
            "field `nodes`: {i} out of range (dimension {dim})"
        ))),
        None => Ok(()),
    }
}

const SIM_HEADER: [&str; 4] = ["t", "node", "u", "v"];

fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts> {
    let algs = algorithms(cfg, &["new2"])?;
    let problem = cfg.problem.clone().unwrap_or_else(|| "van-der-pol".into());
    let stride = cfg.stride.unwrap_or(1);
    let dt_flag = positive("dt", cfg.dt)?;
    let t_flag = positive("t_end", cfg.t_end)?;
    let mut art = Artifacts::default();
    let pid = problem.to_ascii_lowercase().replace('_', "-");

    let (sys, s0, dt, t_end, exact): (
        Box<dyn SecondOrderSystem>,
        State,
        f64,
        f64,
        Option<Box<dyn ExactProblem>>,
    ) = if let Some(kind) = SdofKind::parse(&pid) {
        let case = sdof_case(kind);
        let s0 = case.exact(0.0);
        let t_end = t_flag.unwrap_or(case.t_end);
        (
            Box::new(case.linear().clone()),
            s0,
            dt_flag.unwrap_or(0.01),
            t_end,
            Some(Box::new(case)),
        )
    } else if pid == "van-der-pol" || pid == "vdp" {
        let sys = van_der_pol(
            cfg.mu.unwrap_or(5.0),
            cfg.amp.unwrap_or(5.0),
            cfg.omega_p.unwrap_or(2.5),
        );
        let s0 = initial_state(
            &sys,
            0.0,
            DVector::from_element(1, VanDerPol::X0),
            DVector::from_element(1, VanDerPol::V0),
        )?;
        (
            Box::new(sys),
            s0,
            dt_flag.unwrap_or(0.005),
            t_flag.unwrap_or(30.0),
            None,
        )
    } else if pid == "spring-pendulum" || pid == "pendulum" {
        let sys = spring_pendulum();
        let s0 = initial_state(&sys, 0.0, sys.initial_displacement(), DVector::zeros(2))?;
        (
            Box::new(sys),
            s0,
            dt_flag.unwrap_or(0.01),
            t_flag.unwrap_or(10.0),
            None,
        )
    } else {
        return Err(Error::Config(format!(
            "field `problem`: unknown `{problem}` (sdof cases, van-der-pol, spring-pendulum)"
        )));
    };
    let nodes: Vec<usize> = cfg
        .nodes
        .clone()
        .unwrap_or_else(|| (0..sys.dim()).collect());
    check_nodes(&nodes, sys.dim())?;

    let mut files = Vec::new();
    for alg in &algs {
        let traj = integrate(alg, sys.as_ref(), &s0, dt, t_end, NewtonOptions::default())
            .map_err(|e| with_alg(alg, e))?;
        let file = format!("sim_{pid}_{}.csv", slug(&alg.label()));
        let mut csv = Csv::create(out, &file, &SIM_HEADER)?;
        write_trajectory(&mut csv, &traj, &nodes, stride)?;
        csv.finish(&mut art)?;
        files.push((file, alg.label()));
    }
    // reference curve
    let ref_file = format!("sim_{pid}_reference.csv");
    let mut csv = Csv::create(out, &ref_file, &SIM_HEADER)?;
    match &exact {
        Some(p) => {
            let n = crate::stepper::step_count(0.0, t_end, dt);
            for k in (0..=n).step_by(stride.max(1)) {
                let s = p.exact(k as f64 * dt);
                for &i in &nodes {
                    csv.row(&[num(s.t), i.to_string(), num(s.u[i]), num(s.v[i])])?;
                }
            }
        }
        None => {
            let rdt = positive("reference_dt", cfg.reference_dt)?.unwrap_or(dt / 50.0);
            let sub = (dt / rdt).round().max(1.0) as usize;
            let traj = rk4_sampled(sys.as_ref(), &s0, dt / sub as f64, t_end, sub)?;
            write_trajectory(&mut csv, &traj, &nodes, stride)?;
        }
    }
    csv.finish(&mut art)?;
    files.push((ref_file, "reference".into()));

    let mut gp = gp_header(
        &format!("{pid}: u(t), node {}", nodes[0]),
        &format!("sim_{pid}.png"),
    );
    gp += "set xlabel 't'\nset ylabel 'u'\nplot ";
    let curves: Vec<String> = files
        .iter()
        .map(|(f, l)| {
            format!(
                "'{f}' using 1:($2=={} ? $3 : 1/0) with lines title '{l}'",
                nodes[0]
            )
        })
        .collect();
    gp += &curves.join(", ");
    gp += "\n";
    script(out, &format!("sim_{pid}.gp"), gp, &mut art)?;
    art.summary = format!("{pid}: {} run(s), dt = {dt}, T = {t_end}", algs.len());
    Ok(art)
}

fn wave1d(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts> {
    let algs = algorithms(cfg, &["new1", "new2", "ne"])?;
    let fp = rod_assembly(cfg.n_elem.unwrap_or(100), cfg.r.unwrap_or(0.5))
        .map_err(|e| Error::Config(e.to_string()))?;
    let w_max = fp.omega_max()?;
    let l_over_c = rod::LENGTH / fp.c0;
    let t_end = positive("t_end", cfg.t_end)?.unwrap_or(1.4 * l_over_c);
    let window = (0.6 * l_over_c, (1.4 * l_over_c).min(t_end));
    let mid = fp.dim() / 2 - 1;
    let nodes = cfg.nodes.clone().unwrap_or_else(|| vec![mid]);
    check_nodes(&nodes, fp.dim())?;
    let stride = cfg.stride.unwrap_or(1);
    let sys = fp.system();
    let s0 = fp.rest_state()?;
    let plateau = rod::END_FORCE / (rod::DENSITY * rod::AREA * fp.c0);
    let mut art = Artifacts::default();
    let mut metrics = Csv::create(
        out,
        "wave1d_metrics.csv",
        &["alg", "dt", "omega_dt", "overshoot", "total_variation"],
    )?;
    let mut summary = String::new();
    let mut files = Vec::new();
    for alg in &algs {
        let dt = match (positive("dt", cfg.dt)?, positive("cfl", cfg.cfl)?) {
            (Some(dt), _) => dt,
            (None, Some(c)) => c * fp.mesh.dx / fp.c0,
            (None, None) => dissipation_omega(alg, 0.0).map_err(|e| with_alg(alg, e))? / w_max,
        };
        let traj = integrate(alg, &sys, &s0, dt, t_end, NewtonOptions::default())
            .map_err(|e| with_alg(alg, e))?;
        let file = format!("wave1d_{}.csv", slug(&alg.label()));
        let mut csv = Csv::create(out, &file, &SIM_HEADER)?;
        write_trajectory(&mut csv, &traj, &nodes, stride)?;
        csv.finish(&mut art)?;
        let m = dissipation_metric(&traj, Variable::Velocity, nodes[0], window, Some(plateau))?;
        metrics.row(&[
            alg.label(),
            num(dt),
            num(dt * w_max),
            num(m.overshoot),
            num(m.total_variation),
        ])?;
        let _ = writeln!(
            summary,
            "{:<16} dt={dt:.4e} Omega={:.4} overshoot={:.4e} TV={:.4e}",
            alg.label(),
            dt * w_max,
            m.overshoot,
            m.total_variation
        );
        files.push((file, alg.label(), traj.times()));
    }
    metrics.finish(&mut art)?;
    // semidiscrete oracle on the first run's time grid
    let times = files[0].2.clone();
    let oracle = semidiscrete_modal_oracle(&fp, &times)?;
    let mut csv = Csv::create(out, "wave1d_oracle.csv", &SIM_HEADER)?;
    write_trajectory(
        &mut csv,
        &Trajectory {
            dt: times.get(1).copied().unwrap_or(0.0),
            states: oracle,
        },
        &nodes,
        stride,
    )?;
    csv.finish(&mut art)?;

    let mut gp = gp_header(&format!("rod: velocity at node {}", nodes[0]), "wave1d.png");
    gp += "set xlabel 't'\nset ylabel 'v'\nplot ";
    let mut curves: Vec<String> = files
        .iter()
        .map(|(f, l, _)| {
            format!(
                "'{f}' using 1:($2=={} ? $4 : 1/0) with lines title '{l}'",
                nodes[0]
            )
        })
        .collect();
    curves.push(format!(
        "'wave1d_oracle.csv' using 1:($2=={} ? $4 : 1/0) with lines dt 2 title 'modal oracle'",
        nodes[0]
    ));
    gp += &curves.join(", ");
    gp += "\n";
    script(out, "wave1d.gp", gp, &mut art)?;
    art.summary = summary;
    Ok(art)
}

fn wave2d(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts> {
    let algs = algorithms(cfg, &["new2", "ne"])?;
    let alpha_k = cfg.alpha_k.unwrap_or((2.0f64 / 3.0).sqrt());
    let fp = membrane_assembly(
        cfg.n_side.unwrap_or(60),
        cfg.zeta.unwrap_or(1.0),
        cfg.r.unwrap_or(0.5),
        alpha_k,
        cfg.alpha_m.unwrap_or(alpha_k),
        cfg.quarter.unwrap_or(true),
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    let dt = match positive("dt", cfg.dt)? {
        Some(dt) => dt,
        None => positive("cfl", cfg.cfl)?.unwrap_or(0.5) * fp.mesh.dx / fp.c0,
    };
    let t_end = positive("t_end", cfg.t_end)?.unwrap_or(6.25);
    let sys = fp.system();
    let s0 = fp.rest_state()?;
    let mut art = Artifacts::default();
    let mut nodes = Csv::create(out, "wave2d_nodes.csv", &["node", "x", "y"])?;
    for (i, c) in fp.mesh.coords.iter().enumerate() {
        nodes.row(&[i.to_string(), num(c[0]), num(c[1])])?;
    }
    nodes.finish(&mut art)?;
    let mut metrics = Csv::create(
        out,
        "wave2d_metrics.csv",
        &["alg", "alpha_k", "alpha_m", "dt", "isotropy_l2"],
    )?;
    let mut summary = String::new();
    let mut ray_files = Vec::new();
    let all: Vec<usize> = (0..fp.dim()).collect();
    for alg in &algs {
        let traj = integrate(alg, &sys, &s0, dt, t_end, NewtonOptions::default())
            .map_err(|e| with_alg(alg, e))?;
        let last = traj.last();
        let tag = slug(&alg.label());
        let mut csv = Csv::create(out, &format!("wave2d_{tag}.csv"), &SIM_HEADER)?;
        let snapshot = Trajectory {
            dt,
            states: vec![last.clone()],
        };
        write_trajectory(&mut csv, &snapshot, cfg.nodes.as_deref().unwrap_or(&all), 1)?;
        csv.finish(&mut art)?;
        let ((r0, p0), (r45, p45)) = membrane_rays(&fp, &last.u);
        let file = format!("wave2d_rays_{tag}.csv");
        let mut rays = Csv::create(out, &file, &["theta_deg", "radius", "u"])?;
        for (r, u) in r0.iter().zip(&p0) {
            rays.row(&["0".into(), num(*r), num(*u)])?;
        }
        for (r, u) in r45.iter().zip(&p45) {
            rays.row(&["45".into(), num(*r), num(*u)])?;
        }
        rays.finish(&mut art)?;
        let iso = isotropy_defect(&fp, &last.u);
        metrics.row(&[
            alg.label(),
            num(fp.mesh.alpha_k),
            num(fp.mesh.alpha_m),
            num(dt),
            num(iso),
        ])?;
        let _ = writeln!(
            summary,
            "{:<16} alpha_k={:.4} isotropy_l2={iso:.4e}",
            alg.label(),
            fp.mesh.alpha_k
        );
        ray_files.push((file, alg.label()));
    }
    metrics.finish(&mut art)?;
    let mut gp = gp_header(&format!("membrane profiles at t = {t_end}"), "wave2d.png");
    gp += "set xlabel 'r'\nset ylabel 'u'\nplot ";
    let mut curves = Vec::new();
    for (f, l) in &ray_files {
        curves.push(format!(
            "'{f}' using 2:($1==0 ? $3 : 1/0) with lines title '{l} theta=0'"
        ));
        curves.push(format!(
            "'{f}' using 2:($1==45 ? $3 : 1/0) with lines dt 2 title '{l} theta=45'"
        ));
    }
    gp += &curves.join(", ");
    gp += "\n";
    script(out, "wave2d.gp", gp, &mut art)?;
    art.summary = summary;
    Ok(art)
}

fn audit(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts> {
    let algs = algorithms(cfg, &["new1", "new2"])?;
    let mut text = String::new();
    for alg in &algs {
        let _ = writeln!(text, "[{}]", alg.label());
        let _ = writeln!(text, "p = {:.16}", alg.p);
        let _ = writeln!(text, "alpha = {:?}", alg.alpha);
        let _ = writeln!(text, "classification = {:?}", alg.classification());
        let c = alg.claimed;
        let fmt = |o: crate::tables::Orders| {
            format!(
                "{}{}{}",
                o.disp,
                o.vel,
                o.acc.map_or("-".into(), |a| a.to_string())
            )
        };
        let _ = writeln!(
            text,
            "claimed orders (undamped/damped) = {}/{}",
            fmt(c.undamped),
            fmt(c.damped)
        );
        let sci = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(
            text,
            "identical second-order residuals = [{}]",
            sci(&alg.identical_second_order_residuals())
        );
        let _ = writeln!(
            text,
            "displacement/velocity residuals = [{}]",
            sci(&alg.displacement_velocity_residuals(true))
        );
        match alg.order_condition_defect() {
            Some(d) => {
                let _ = writeln!(
                    text,
                    "claimed-order defect = {d:.3e} ({})",
                    if d <= 1e-14 { "ok" } else { "VIOLATED" }
                );
            }
            None => {
                let _ = writeln!(text, "claimed-order defect = n/a (first order)");
            }
        }
        let ws = stability_limit(alg, 0.0, 1e-12).map_err(|e| with_alg(alg, e))?;
        let wb = bifurcation_point(alg, 0.0, 1e-10).map_err(|e| with_alg(alg, e))?;
        let _ = writeln!(
            text,
            "omega_s(xi=0) = {}",
            match ws {
                StabilityLimit::Conditional(w) => format!("{w:.10}"),
                StabilityLimit::Unconditional => "unconditional".into(),
                StabilityLimit::Empty => "empty".into(),
            }
        );
        let _ = writeln!(
            text,
            "omega_b(xi=0) = {}\n",
            wb.map_or("none".into(), |w| format!("{w:.10}"))
        );
    }
    let mut art = Artifacts::default();
    let path = out.join("audit.txt");
    fs::write(&path, &text)?;
    art.files.push(path);
    art.summary = text;
    Ok(art)
}
