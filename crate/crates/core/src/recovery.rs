//! Recovery constructions: smooth subgraph approximations of profiles with
//! vertical cuts, optimal-transition phase fields and volume rescaling.

use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};
use crate::geometry::{point_segment_distance, JumpSet, Point};
use crate::grid::{Grid, PhaseField};
use crate::phasefield::Well;
use crate::profile::Profile;
use crate::sharp::{vertical_extension, VerticalExtension};

/// The optimal transition `q` solving `q′ = −√(2W(q))`, `q(0) = 1/2`,
/// tabulated on `[−T, T]` and saturated to 1 and 0 outside.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    t_max: f64,
    dt: f64,
    values: Vec<f64>,
}

const TABLE_T: f64 = 20.0;
const TABLE_DT: f64 = 1e-3;

impl TransitionTable {
    /// Integrates the profile ODE with step-doubling adaptive RK4 between table nodes.
    pub fn build(well: Well) -> Self {
        let n = (TABLE_T / TABLE_DT).round() as usize;
        let rhs = |q: f64| -(2.0 * well.w(q.clamp(0.0, 1.0))).max(0.0).sqrt();
        let mut values = vec![0.0; 2 * n + 1];
        values[n] = 0.5;
        for dir in [1.0, -1.0] {
            let mut q = 0.5;
            for k in 1..=n {
                q = adaptive_rk4(&rhs, q, dir * TABLE_DT, 1e-14).clamp(0.0, 1.0);
                let idx = if dir > 0.0 { n + k } else { n - k };
                values[idx] = q;
            }
        }
        values[0] = 1.0;
        values[2 * n] = 0.0;
        TransitionTable {
            t_max: TABLE_T,
            dt: TABLE_DT,
            values,
        }
    }

    /// Cached table per well.
    pub fn get(well: Well) -> &'static TransitionTable {
        static DOUBLE: OnceLock<TransitionTable> = OnceLock::new();
        static OBSTACLE: OnceLock<TransitionTable> = OnceLock::new();
        match well {
            Well::DoubleWell => DOUBLE.get_or_init(|| TransitionTable::build(well)),
            Well::Obstacle => OBSTACLE.get_or_init(|| TransitionTable::build(well)),
        }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// `q(t)`, non-increasing, equal to 1 for `t <= −T` and 0 for `t >= T`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= -self.t_max {
            return 1.0;
        }
        if t >= self.t_max {
            return 0.0;
        }
        let s = (t + self.t_max) / self.dt;
        let k = (s.floor() as usize).min(self.values.len() - 2);
        let w = s - k as f64;
        (1.0 - w) * self.values[k] + w * self.values[k + 1]
    }

    /// The `t` with `q(t) = level`, by bisection.
    pub fn inverse(&self, level: f64) -> f64 {
        let (mut a, mut b) = (-self.t_max, self.t_max);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.eval(m) > level {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

fn rk4(f: &impl Fn(f64) -> f64, q: f64, h: f64) -> f64 {
    let k1 = f(q);
    let k2 = f(q + 0.5 * h * k1);
    let k3 = f(q + 0.5 * h * k2);
    let k4 = f(q + h * k3);
    q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn adaptive_rk4(f: &impl Fn(f64) -> f64, q0: f64, span: f64, tol: f64) -> f64 {
    let mut q = q0;
    let mut done = 0.0;
    let mut h = span;
    while (span - done).abs() > 1e-18 {
        if (done + h - span) * span.signum() > 0.0 {
            h = span - done;
        }
        let full = rk4(f, q, h);
        let half = rk4(f, rk4(f, q, 0.5 * h), 0.5 * h);
        if (full - half).abs() <= tol || h.abs() < 1e-9 {
            q = half + (half - full) / 15.0;
            done += h;
            h *= 2.0;
        } else {
            h *= 0.5;
        }
    }
    q
}

/// Slot half-width around a cut, in units of `ε`; `q(3)` is about `0.014`.
const SLOT_HALF_WIDTH: f64 = 3.0;

/// Parameters of the graph approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryParams {
    /// Target closeness for both report entries.
    pub eps: f64,
    /// Half-width of the dip carved at each cut.
    pub delta: f64,
    /// Mollifier half-width.
    pub sigma: f64,
}

impl RecoveryParams {
    pub fn new(eps: f64, delta: f64, sigma: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return invalid("recovery closeness must be positive");
        }
        if !(sigma > 0.0 && sigma < delta) {
            return invalid(format!(
                "need 0 < sigma < delta, got sigma = {sigma}, delta = {delta}"
            ));
        }
        Ok(RecoveryParams { eps, delta, sigma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphApproxReport {
    pub l1_err: f64,
    /// `|∫√(1+g′²) − (graph length of h + 2 Σ cut lengths)|`.
    pub surface_err: f64,
    pub surface: f64,
    pub target_surface: f64,
    pub satisfied: bool,
}

/// Cuts as `(x, lower end, upper end)` after vertical extension.
fn extended_cuts(h: &Profile, cuts: &JumpSet) -> Result<Vec<(f64, f64, f64)>> {
    match vertical_extension(cuts, h) {
        VerticalExtension::Infinite => invalid("cuts must be vertical"),
        VerticalExtension::Finite(ext) => {
            let mut out: Vec<(f64, f64, f64)> = ext
                .segments()
                .iter()
                .map(|s| (s.a[0], s.a[1].min(s.b[1]), s.a[1].max(s.b[1])))
                .collect();
            out.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok(out)
        }
    }
}

/// A smooth profile `g` close to `h` in `L¹` whose graph length approximates
/// the graph length of `h` plus twice the cut lengths: `h` is lowered to the
/// bottom of each cut over a trapezoidal dip of half-width `δ`, then
/// mollified at scale `σ`.
pub fn graph_approx(
    h: &Profile,
    cuts: &JumpSet,
    params: &RecoveryParams,
) -> Result<(Profile, GraphApproxReport)> {
    let cuts = extended_cuts(h, cuts)?;
    let delta = params.delta;
    for w in cuts.windows(2) {
        if w[1].0 - w[0].0 <= 4.0 * delta {
            return Err(Error::OverlappingDips(w[1].0));
        }
    }
    let (a, b) = h.domain();
    let top = h.sup();
    let step = (params.sigma / 8.0).min(delta / 16.0);
    let n = ((b - a) / step).ceil() as usize;
    let step = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=n)
        .map(|k| if k == n { b } else { a + k as f64 * step })
        .collect();
    let base: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let mut v = h.eval(x);
            for &(xc, lo, _) in &cuts {
                let r = (x - xc).abs();
                if r < delta {
                    let dip = lo + 2.0 * (top - lo) / delta * (r - 0.5 * delta).max(0.0);
                    v = v.min(dip);
                }
            }
            v
        })
        .collect();

    // mollify with the standard bump, reflecting evenly at the ends of ω
    let half = (params.sigma / step).round().max(1.0) as isize;
    let kernel: Vec<f64> = (-half..=half)
        .map(|k| {
            let r = k as f64 / (half as f64 + 1.0);
            (-1.0 / (1.0 - r * r)).exp()
        })
        .collect();
    let norm: f64 = kernel.iter().sum();
    let last = n as isize;
    let gs: Vec<f64> = (0..=last)
        .map(|k| {
            let mut s = 0.0;
            for (m, w) in (-half..=half).zip(&kernel) {
                let mut idx = k + m;
                if idx < 0 {
                    idx = -idx;
                }
                if idx > last {
                    idx = 2 * last - idx;
                }
                s += w * base[idx.clamp(0, last) as usize];
            }
            (s / norm).max(0.0)
        })
        .collect();
    let g = Profile::smooth(xs, gs)?;

    let target_surface = h.graph_length() + 2.0 * cuts.iter().map(|c| c.2 - c.1).sum::<f64>();
    let surface = g.arc_length();
    let l1_err = h.l1_distance(&g);
    let surface_err = (surface - target_surface).abs();
    Ok((
        g,
        GraphApproxReport {
            l1_err,
            surface_err,
            surface,
            target_surface,
            satisfied: l1_err <= params.eps && surface_err <= params.eps,
        },
    ))
}

/// Ramer–Douglas–Peucker simplification with absolute tolerance `tol`.
fn simplify(points: &[Point], tol: f64) -> Vec<Point> {
    if points.len() < 3 {
        return points.to_vec();
    }
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    let mut stack = vec![(0usize, points.len() - 1)];
    while let Some((s, e)) = stack.pop() {
        if e <= s + 1 {
            continue;
        }
        let (mut worst, mut at) = (0.0, s);
        for k in s + 1..e {
            let d = point_segment_distance(points[k], points[s], points[e]);
            if d > worst {
                worst = d;
                at = k;
            }
        }
        if worst > tol {
            keep[at] = true;
            stack.push((s, at));
            stack.push((at, e));
        }
    }
    points
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(p, _)| *p)
        .collect()
}

/// The graph of a profile as a polyline, jumps included as vertical pieces.
fn graph_polyline(g: &Profile) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(g.pieces().len() + 1);
    for p in g.pieces() {
        let a = [p.x0, p.h0];
        if pts.last() != Some(&a) {
            pts.push(a);
        }
        pts.push([p.x1, p.h1]);
    }
    pts
}

/// `v(x) = q(d_s(x)/ε)` with `d_s` the signed distance to the graph of `g`
/// (positive above), clipped to the bands. Each vertical cut with lower end
/// `(x_i, y_i)` additionally opens a slot `[x_i − w, x_i + w] × [y_i, ∞)`,
/// `w = 3ε`: the field is lowered to `q(d_i/ε)` with `d_i` the signed distance
/// to the slot, so both faces of the cut carry an almost full transition
/// even when the dips of `g` are much narrower than `ε`.
///
/// Both distances are monotone along vertical lines, so every column is
/// non-increasing by construction.
pub fn phasefield_recovery(
    g: &Profile,
    grid: &Grid,
    eps: f64,
    well: Well,
    cuts: &JumpSet,
) -> Result<PhaseField> {
    if !(eps > 0.0) {
        return invalid("eps must be positive");
    }
    let (Some(sub), Some(cap)) = (grid.substrate_top_row(), grid.cap_row()) else {
        return Err(Error::Precondition(
            "phase fields need a film grid".to_string(),
        ));
    };
    let table = TransitionTable::get(well);
    let reach = table.t_max() * eps;
    let line = simplify(&graph_polyline(g), 1e-10);
    let segs: Vec<(Point, Point)> = line.windows(2).map(|w| (w[0], w[1])).collect();
    // only the lower ends matter; `g` may already carry a dip at each cut
    let mut cut_list: Vec<(f64, f64)> = Vec::with_capacity(cuts.segments().len());
    for s in cuts.segments() {
        if !s.is_vertical() {
            return invalid("cuts must be vertical");
        }
        cut_list.push((0.5 * (s.a[0] + s.b[0]), s.a[1].min(s.b[1])));
    }
    let w = SLOT_HALF_WIDTH * eps;

    let mut values = vec![0.0; grid.node_count()];
    for i in 0..grid.nodes_x() {
        let x = grid.x(i);
        let near: Vec<&(Point, Point)> = segs
            .iter()
            .filter(|(a, b)| a[0].min(b[0]) <= x + reach && a[0].max(b[0]) >= x - reach)
            .collect();
        let (lo, hi) = (g.eval_lower(x), g.eval_upper(x));
        for j in 0..grid.nodes_y() {
            let k = grid.node(i, j);
            if j <= sub {
                values[k] = 1.0;
                continue;
            }
            if j >= cap {
                values[k] = 0.0;
                continue;
            }
            let y = grid.y(j);
            let mut d = reach;
            for (a, b) in &near {
                if a[1].min(b[1]) > y + d || a[1].max(b[1]) < y - d {
                    continue;
                }
                d = d.min(point_segment_distance([x, y], *a, *b));
            }
            let signed = if y > hi {
                d
            } else if y < lo {
                -d
            } else {
                0.0
            };
            let mut v = table.eval(signed / eps);
            for &(xc, yc) in &cut_list {
                let (dx, dy) = ((x - xc).abs() - w, yc - y);
                let t = if dx <= 0.0 && dy <= 0.0 {
                    (-dx).min(-dy)
                } else {
                    -dx.max(0.0).hypot(dy.max(0.0))
                };
                v = v.min(table.eval(t / eps));
            }
            values[k] = v;
        }
    }
    PhaseField::new(grid.clone(), values)
}

/// `h* = ĥ / r` with `r = m⁻¹ ∫ ĥ`, where `ĥ = h ∧ (M − δ)` when `h`
/// reaches the cap `M` and `ĥ = h` otherwise.
pub fn volume_rescale(h: &Profile, m: f64, cap: f64, truncation: f64) -> Result<Profile> {
    let (a, b) = h.domain();
    let max_volume = cap * (b - a);
    if !(m > 0.0 && m < max_volume) {
        return Err(Error::Precondition(format!(
            "volume target must satisfy 0 < m < M|ω| = {max_volume}, got {m}"
        )));
    }
    let hat = if h.sup() >= cap {
        if !(truncation > 0.0 && truncation < cap) {
            return invalid("truncation depth must lie in (0, M)");
        }
        h.truncated(cap - truncation)
    } else {
        h.clone()
    };
    let integral = hat.integral();
    if !(integral > 0.0) {
        return invalid("cannot rescale a profile with zero volume");
    }
    if integral == m {
        return Ok(hat);
    }
    let r = integral / m;
    let out = hat.scaled(r);
    if out.sup() > cap {
        return invalid(format!(
            "rescaled profile exceeds the cap (sup = {}); the volume target is infeasible for this shape",
            out.sup()
        ));
    }
    Ok(out)
}
