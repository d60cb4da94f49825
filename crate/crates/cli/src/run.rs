//! Dispatch of the subcommands, file emission and the run report.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sfl::geometry::{JumpSet, Segment, VoidSet};
use sfl::grid::write_dump;
use sfl::phasefield::{
    alternate_minimize, energy_geps, extract_profile, gamma_sweep, l1_to_subgraph, PhaseParams,
    Scenario, Step,
};
use sfl::profile::Profile;
use sfl::recovery::{graph_approx, phasefield_recovery, RecoveryParams};
use sfl::sharp::{
    energy_f, energy_f_relaxed, energy_g, energy_g_relaxed, film_bulk, slab_crack, slab_void,
    FilmConfig, VoidConfig,
};
use sfl::slicing::fubini_residual;
use sfl::{DisplacementField, ElasticDensity, Grid};

use crate::config::{ExperimentConfig, ProfileKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Evaluate,
    Minimize,
    GammaSweep,
    SliceCheck,
    Recovery,
    CollapseBench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    AssertionFailed,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::AssertionFailed => 2,
            Status::Error => 1,
        }
    }
}

/// One sub-run (an energy evaluation, one `ε`, one direction, ...).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunEntry {
    pub label: String,
    pub passed: bool,
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl RunEntry {
    fn new(label: impl Into<String>, passed: bool, values: &[(&str, f64)]) -> Self {
        RunEntry {
            label: label.into(),
            passed,
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            message: None,
        }
    }

    fn with_message(mut self, m: impl Into<String>) -> Self {
        self.message = Some(m.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: Command,
    pub name: String,
    pub status: Status,
    pub config_hash: String,
    pub seed: u64,
    pub wall_time_secs: f64,
    pub runs: Vec<RunEntry>,
    /// Files written by the run, relative to the output directory.
    pub manifest: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The single writer for a run's files; records every file it emits.
struct Emitter {
    dir: PathBuf,
    manifest: Vec<String>,
}

impl Emitter {
    fn new(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Emitter {
            dir: dir.to_path_buf(),
            manifest: Vec::new(),
        })
    }

    fn csv(&mut self, name: &str, header: &str, rows: &[String]) -> std::io::Result<()> {
        let mut text = String::with_capacity(64 * (rows.len() + 1));
        text.push_str(header);
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        fs::write(self.dir.join(name), text)?;
        self.manifest.push(name.to_string());
        Ok(())
    }

    fn dump(&mut self, name: &str, grid: &Grid, values: &[f64]) -> std::io::Result<()> {
        let file = fs::File::create(self.dir.join(name))?;
        write_dump(BufWriter::new(file), grid, values)?;
        self.manifest.push(name.to_string());
        Ok(())
    }

    fn displacement(&mut self, prefix: &str, u: &DisplacementField) -> std::io::Result<()> {
        self.dump(&format!("{prefix}u1.dump"), u.grid(), &u.component(0))?;
        self.dump(&format!("{prefix}u2.dump"), u.grid(), &u.component(1))
    }
}

type RunResult = Result<Vec<RunEntry>, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn density(cfg: &ExperimentConfig) -> Result<ElasticDensity, String> {
    if cfg.p == 2.0 {
        ElasticDensity::hooke(cfg.mu, cfg.lambda).map_err(err)
    } else {
        ElasticDensity::power(cfg.mu, cfg.p).map_err(err)
    }
}

fn params(cfg: &ExperimentConfig, eps: f64) -> Result<PhaseParams, String> {
    let mut p = PhaseParams::new(eps, cfg.p)
        .map_err(err)?
        .with_well(cfg.well)
        .with_eta(cfg.eta_scale * eps.powf(cfg.p))
        .map_err(err)?;
    p.tol_energy = cfg.tol_energy;
    p.tol_cg = cfg.tol_cg;
    p.max_outer = cfg.max_outer;
    p.max_v_iters = cfg.max_v_iters;
    p.volume = cfg.volume;
    Ok(p)
}

fn scenario(cfg: &ExperimentConfig) -> Scenario {
    Scenario {
        width: cfg.width,
        cap: cfg.cap,
        nx: cfg.nx,
        ny: cfg.ny,
        mismatch: cfg.mismatch,
        volume: cfg.volume,
        init: cfg.init,
    }
}

fn profile(cfg: &ExperimentConfig) -> Result<(Profile, JumpSet), String> {
    let spec = cfg
        .profile
        .as_ref()
        .ok_or("this command needs a [profile] section")?;
    let h = match spec.kind {
        ProfileKind::Smooth => Profile::smooth(spec.x.clone(), spec.h.clone()),
        ProfileKind::Steps => Profile::steps(&spec.x, &spec.h),
    }
    .map_err(err)?;
    let cuts = spec
        .cuts
        .iter()
        .map(|&(x, y0, y1)| Segment::vertical(x, y0, y1))
        .collect::<sfl::Result<Vec<_>>>()
        .map_err(err)?;
    Ok((h, JumpSet::new(cuts)))
}

fn sharp_row(label: &str, bulk: f64, s1: f64, s2: f64, total: f64) -> String {
    format!("{label},{bulk},{s1},{s2},{total}")
}

fn evaluate(cfg: &ExperimentConfig, out: &mut Emitter) -> RunResult {
    let d = density(cfg)?;
    let delta = cfg.mismatch;
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    if cfg.profile.is_some() {
        let (h, cuts) = profile(cfg)?;
        let grid = Grid::film(cfg.width, cfg.cap, cfg.nx, cfg.ny).map_err(err)?;
        let u = DisplacementField::from_fn(&grid, |p| {
            if p[1] <= h.eval_upper(p[0]) {
                [delta * p[0], 0.0]
            } else {
                [0.0, 0.0]
            }
        });
        let film = FilmConfig::new(h.clone(), u).with_cuts(cuts.clone());
        let relaxed = energy_g_relaxed(&film, &d).map_err(err)?;
        let mut passed = relaxed.diagnostic.is_none();
        if h.is_smooth() && cuts.is_empty() {
            let sharp = energy_g(&film, &d).map_err(err)?;
            rows.push(sharp_row("G", sharp.bulk, sharp.surface, 0.0, sharp.total));
            passed &= relaxed.total <= sharp.total + 1e-12;
            runs.push(RunEntry::new(
                "G",
                true,
                &[
                    ("bulk", sharp.bulk),
                    ("surface", sharp.surface),
                    ("total", sharp.total),
                ],
            ));
        }
        rows.push(sharp_row(
            "Gbar",
            relaxed.bulk,
            relaxed.graph_surface,
            relaxed.cut_surface,
            relaxed.total,
        ));
        let mut entry = RunEntry::new(
            "Gbar",
            passed,
            &[
                ("bulk", relaxed.bulk),
                ("graph_surface", relaxed.graph_surface),
                ("cut_surface", relaxed.cut_surface),
                ("total", relaxed.total),
            ],
        );
        if let Some(m) = relaxed.diagnostic {
            entry = entry.with_message(m);
        }
        runs.push(entry);
    }
    if cfg.void.rect.is_some() || !cfg.void.cracks.is_empty() {
        let grid = Grid::rect((0.0, cfg.width), (0.0, cfg.cap), cfg.nx, cfg.ny).map_err(err)?;
        let void = match cfg.void.rect {
            Some([x0, x1, y0, y1]) => VoidSet::rectangle(x0, x1, y0, y1).map_err(err)?,
            None => VoidSet::empty(),
        };
        let cracks = cfg
            .void
            .cracks
            .iter()
            .map(|c| Segment::with_right_normal([c[0], c[1]], [c[2], c[3]]))
            .collect::<sfl::Result<Vec<_>>>()
            .map_err(err)?;
        let u = DisplacementField::from_fn(&grid, |p| {
            if void.contains_open(p) {
                [0.0, 0.0]
            } else {
                [delta * p[0], 0.0]
            }
        });
        let vc = VoidConfig::new(void, u).with_cracks(JumpSet::new(cracks));
        let relaxed = energy_f_relaxed(&vc, &d, &cfg.norm).map_err(err)?;
        let mut passed = true;
        if cfg.void.cracks.is_empty() {
            let sharp = energy_f(&vc, &d, &cfg.norm).map_err(err)?;
            rows.push(sharp_row("F", sharp.bulk, sharp.surface, 0.0, sharp.total));
            passed = relaxed.total <= sharp.total + 1e-12;
            runs.push(RunEntry::new(
                "F",
                true,
                &[
                    ("bulk", sharp.bulk),
                    ("surface", sharp.surface),
                    ("total", sharp.total),
                ],
            ));
        }
        rows.push(sharp_row(
            "Fbar",
            relaxed.bulk,
            relaxed.void_surface,
            relaxed.crack_surface,
            relaxed.total,
        ));
        runs.push(RunEntry::new(
            "Fbar",
            passed,
            &[
                ("bulk", relaxed.bulk),
                ("void_surface", relaxed.void_surface),
                ("crack_surface", relaxed.crack_surface),
                ("total", relaxed.total),
            ],
        ));
    }
    if runs.is_empty() {
        return Err("evaluate needs a [profile] or a [void] section".to_string());
    }
    out.csv("energies.csv", "label,bulk,surface1,surface2,total", &rows)
        .map_err(err)?;
    Ok(runs)
}

fn minimize(cfg: &ExperimentConfig, out: &mut Emitter) -> RunResult {
    let d = density(cfg)?;
    let eps = cfg.eps[0];
    let pr = params(cfg, eps)?;
    let sc = scenario(cfg);
    let init = sc.initial_state(&pr).map_err(err)?;
    let u0 = sc.substrate_datum(init.v.grid());
    let res = alternate_minimize(init, &pr, &d, &u0).map_err(err)?;
    let trace: Vec<String> = res
        .trace
        .iter()
        .map(|t| {
            let step = match t.step {
                Step::Start => "start",
                Step::U => "u",
                Step::V => "v",
                Step::Volume => "volume",
            };
            format!("{},{step},{}", t.outer, t.total)
        })
        .collect();
    out.csv("trace.csv", "outer,step,total", &trace)
        .map_err(err)?;
    let h = extract_profile(&res.state.v, 0.5, pr.tilt).map_err(err)?;
    let l1 = l1_to_subgraph(&res.state.v, &h);
    let relaxed = film_bulk(&res.state.u, &h, &d) + h.graph_length();
    let e = &res.energy;
    out.csv(
        "energy.csv",
        "eps,total,elastic,surface_proxy,l1_to_sharp",
        &[format!(
            "{eps},{},{},{},{l1}",
            e.total,
            e.elastic,
            e.surface()
        )],
    )
    .map_err(err)?;
    let (xs, hs) = h.nodes();
    let prof: Vec<String> = xs
        .iter()
        .zip(&hs)
        .map(|(x, y)| format!("{x},{y}"))
        .collect();
    out.csv("profile.csv", "x,h", &prof).map_err(err)?;
    if cfg.dumps {
        out.dump("v.dump", res.state.v.grid(), res.state.v.values())
            .map_err(err)?;
        out.displacement("", &res.state.u).map_err(err)?;
    }
    let monotone = res.is_monotone(1e-12);
    let entry = RunEntry::new(
        format!("eps={eps}"),
        monotone,
        &[
            ("eps", eps),
            ("total", e.total),
            ("elastic", e.elastic),
            ("surface_proxy", e.surface()),
            ("l1_to_sharp", l1),
            ("relaxed_total", relaxed),
            ("outer_iterations", res.outer_iterations as f64),
        ],
    );
    Ok(vec![if monotone {
        entry
    } else {
        entry.with_message("energy trace increased at a descent half-step")
    }])
}

fn sweep(cfg: &ExperimentConfig, out: &mut Emitter) -> RunResult {
    let d = density(cfg)?;
    let base = params(cfg, cfg.eps[0])?;
    let rows = gamma_sweep(&cfg.eps, &scenario(cfg), &base, &d).map_err(err)?;
    let csv: Vec<String> = rows.iter().map(|r| r.csv_row()).collect();
    out.csv(
        "sweep.csv",
        "eps,total,elastic,surface_proxy,l1_to_sharp",
        &csv,
    )
    .map_err(err)?;
    let last = rows.len() - 1;
    let mut runs = Vec::new();
    for (k, r) in rows.iter().enumerate() {
        if let (true, Some(state)) = (cfg.dumps, &r.state) {
            out.dump(&format!("v_eps{k}.dump"), state.v.grid(), state.v.values())
                .map_err(err)?;
            out.displacement(&format!("eps{k}_"), &state.u)
                .map_err(err)?;
        }
        let mut problems = Vec::new();
        if let Some(e) = &r.error {
            problems.push(e.clone());
        }
        if r.error.is_none() && !r.monotone {
            problems.push("energy trace increased at a descent half-step".to_string());
        }
        if k == last && r.error.is_none() && r.total < r.relaxed_total - 0.05 {
            problems.push(format!(
                "liminf check failed: {} < {} - 0.05",
                r.total, r.relaxed_total
            ));
        }
        let entry = RunEntry::new(
            format!("eps={}", r.eps),
            problems.is_empty(),
            &[
                ("eps", r.eps),
                ("total", r.total),
                ("elastic", r.elastic),
                ("surface_proxy", r.surface_proxy),
                ("l1_to_sharp", r.l1_to_sharp),
                ("relaxed_total", r.relaxed_total),
            ],
        );
        runs.push(if problems.is_empty() {
            entry
        } else {
            entry.with_message(problems.join("; "))
        });
    }
    Ok(runs)
}

fn slice_check(cfg: &ExperimentConfig, out: &mut Emitter) -> RunResult {
    let grid = Grid::rect((0.0, cfg.width), (0.0, cfg.cap), cfg.nx, cfg.ny).map_err(err)?;
    let a = cfg.slice.affine;
    let u = DisplacementField::from_fn(&grid, |p| {
        [a[0] * p[0] + a[1] * p[1], a[2] * p[0] + a[3] * p[1]]
    });
    let void = match cfg.void.rect {
        Some([x0, x1, y0, y1]) => VoidSet::rectangle(x0, x1, y0, y1),
        None => VoidSet::rectangle(
            0.25 * cfg.width,
            0.75 * cfg.width,
            0.25 * cfg.cap,
            0.75 * cfg.cap,
        ),
    }
    .map_err(err)?;
    let eps = cfg.eps[0];
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &deg in &cfg.slice.directions {
        let t = deg.to_radians();
        let xi = [t.cos(), t.sin()];
        let rep = fubini_residual(&u, &void, xi, eps, cfg.p, &cfg.norm, cfg.slice.line_spacing)
            .map_err(err)?;
        rows.push(format!(
            "{deg},{eps},{},{},{}",
            rep.lhs, rep.rhs, rep.residual
        ));
        runs.push(RunEntry::new(
            format!("xi={deg}deg"),
            rep.residual <= cfg.slice.tol,
            &[
                ("lhs", rep.lhs),
                ("rhs", rep.rhs),
                ("residual", rep.residual),
                ("lines", rep.lines as f64),
            ],
        ));
    }
    out.csv("slices.csv", "xi,eps,lhs,rhs,residual", &rows)
        .map_err(err)?;
    Ok(runs)
}

fn recovery(cfg: &ExperimentConfig, out: &mut Emitter) -> RunResult {
    let (h, cuts) = profile(cfg)?;
    let eps = cfg.eps[0];
    let rp = RecoveryParams::new(eps, cfg.delta, cfg.sigma).map_err(err)?;
    let (g, rep) = graph_approx(&h, &cuts, &rp).map_err(err)?;
    let grid = Grid::film(cfg.width, cfg.cap, cfg.nx, cfg.ny).map_err(err)?;
    let v = phasefield_recovery(&g, &grid, eps, cfg.well, &cuts).map_err(err)?;
    let d = density(cfg)?;
    let pr = params(cfg, eps)?;
    let e = energy_geps(&DisplacementField::zeros(&grid), &v, &pr, &d).map_err(err)?;
    let target = energy_g_relaxed(
        &FilmConfig::new(h, DisplacementField::zeros(&grid)).with_cuts(cuts),
        &d,
    )
    .map_err(err)?
    .total;
    let (xs, gs) = g.nodes();
    let samples: Vec<String> = xs
        .iter()
        .zip(&gs)
        .map(|(x, y)| format!("{x},{y}"))
        .collect();
    out.csv("g.csv", "x,g", &samples).map_err(err)?;
    out.csv(
        "recovery.csv",
        "eps,delta,sigma,l1_err,surface_err",
        &[format!(
            "{eps},{},{},{},{}",
            cfg.delta, cfg.sigma, rep.l1_err, rep.surface_err
        )],
    )
    .map_err(err)?;
    if cfg.dumps {
        out.dump("v.dump", &grid, v.values()).map_err(err)?;
    }
    let entry = RunEntry::new(
        format!("eps={eps}"),
        rep.satisfied,
        &[
            ("l1_err", rep.l1_err),
            ("surface_err", rep.surface_err),
            ("surface", rep.surface),
            ("target_surface", rep.target_surface),
            ("energy_geps", e.total),
            ("relaxed_target", target),
        ],
    );
    Ok(vec![if rep.satisfied {
        entry
    } else {
        entry.with_message("graph approximation misses the eps closeness; refine delta and sigma")
    }])
}

fn collapse_bench(cfg: &ExperimentConfig, out: &mut Emitter) -> RunResult {
    let grid = Grid::rect((0.0, cfg.width), (0.0, cfg.cap), cfg.nx, cfg.ny).map_err(err)?;
    let d = density(cfg)?;
    let ell = cfg.collapse_length;
    let x0 = 0.5 * (cfg.width - ell);
    let y = 0.5 * cfg.cap;
    let u = DisplacementField::zeros(&grid);
    let limit = VoidConfig::new(VoidSet::empty(), u.clone())
        .with_cracks(slab_crack(x0, ell, y).map_err(err)?);
    let relaxed = energy_f_relaxed(&limit, &d, &cfg.norm).map_err(err)?.total;
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for n in 1..=cfg.collapse_levels {
        let t = 0.5f64.powi(n as i32);
        let vc = VoidConfig::new(slab_void(x0, ell, y, t).map_err(err)?, u.clone());
        let e = energy_f(&vc, &d, &cfg.norm).map_err(err)?.total;
        let gap = e - relaxed;
        // the slab's two vertical ends carry φ(±e₁) each
        let expected = 2.0 * t * cfg.norm.phi([1.0, 0.0]);
        rows.push(format!("{n},{t},{e},{relaxed},{gap}"));
        runs.push(RunEntry::new(
            format!("n={n}"),
            gap >= 0.0 && (gap - expected).abs() <= 1e-12,
            &[
                ("thickness", t),
                ("energy", e),
                ("limit", relaxed),
                ("gap", gap),
            ],
        ));
    }
    out.csv("collapse.csv", "n,thickness,energy,limit,gap", &rows)
        .map_err(err)?;
    Ok(runs)
}

/// Runs a subcommand, writing its files and `report.json` into `cfg.out_dir`.
pub fn run(cfg: &ExperimentConfig, command: Command) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport {
        command,
        name: cfg.name.clone(),
        status: Status::Error,
        config_hash: cfg.hash.clone(),
        seed: cfg.seed,
        wall_time_secs: 0.0,
        runs: Vec::new(),
        manifest: Vec::new(),
        error: None,
    };
    let mut out = match Emitter::new(&cfg.out_dir) {
        Ok(e) => e,
        Err(e) => {
            report.error = Some(format!("cannot create {}: {e}", cfg.out_dir.display()));
            return report;
        }
    };
    let result = match command {
        Command::Evaluate => evaluate(cfg, &mut out),
        Command::Minimize => minimize(cfg, &mut out),
        Command::GammaSweep => sweep(cfg, &mut out),
        Command::SliceCheck => slice_check(cfg, &mut out),
        Command::Recovery => recovery(cfg, &mut out),
        Command::CollapseBench => collapse_bench(cfg, &mut out),
    };
    match result {
        Ok(runs) => {
            report.status = if runs.iter().all(|r| r.passed) {
                Status::Pass
            } else {
                Status::AssertionFailed
            };
            report.runs = runs;
        }
        Err(e) => report.error = Some(e),
    }
    report.manifest = out.manifest;
    report.wall_time_secs = start.elapsed().as_secs_f64();
    let json = serde_json::to_string_pretty(&report).unwrap_or_default();
    if let Err(e) = fs::write(cfg.out_dir.join("report.json"), json + "\n") {
        report.status = Status::Error;
        report.error = Some(format!("cannot write report.json: {e}"));
    }
    report
}
