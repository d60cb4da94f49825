//! Experiment configuration: `[section]` headers, one `key = value` per
//! line, `#` comments. Every error names the offending line.

use std::collections::BTreeMap;
use std::path::PathBuf;

use sfl::phasefield::{Init, Well};
use sfl::SurfaceNorm;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {second}: duplicate key `{key}` in [{section}] (first set on line {first})")]
    Duplicate {
        section: String,
        key: String,
        first: usize,
        second: usize,
    },
    #[error("line {line}: `{key}`: {message}")]
    Value {
        line: usize,
        key: String,
        message: String,
    },
    #[error("line {line}: missing required key `{key}` in [{section}]")]
    Missing {
        line: usize,
        section: String,
        key: String,
    },
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("scenario", &["name", "L", "M", "nx", "ny"]),
    (
        "physics",
        &[
            "p",
            "mu",
            "lambda",
            "delta_mismatch",
            "norm",
            "norm_q",
            "norm_weights",
            "norm_matrix",
            "angular_samples",
        ],
    ),
    (
        "phasefield",
        &[
            "eps",
            "eta_scale",
            "well",
            "tol_energy",
            "tol_cg",
            "max_outer",
            "max_v_iters",
            "init",
            "amplitude",
            "seed",
            "volume_m",
        ],
    ),
    ("profile", &["kind", "x", "h", "cuts"]),
    ("recovery", &["delta", "sigma"]),
    ("void", &["rect", "cracks"]),
    ("slice", &["directions", "line_spacing", "affine", "tol"]),
    ("collapse", &["levels", "length"]),
    ("output", &["dir", "dumps"]),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

/// Raw `section -> key -> entry` table with line numbers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    pub sections: BTreeMap<String, BTreeMap<String, Entry>>,
    pub section_lines: BTreeMap<String, usize>,
    pub lines: usize,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        let mut current: Option<String> = None;
        for (k, line) in text.lines().enumerate() {
            let n = k + 1;
            raw.lines = n;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(ConfigError::Syntax {
                        line: n,
                        message: format!("unterminated section header `{line}`"),
                    });
                };
                let name = name.trim().to_string();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::UnknownSection {
                        line: n,
                        section: name,
                    });
                }
                if let Some(first) = raw.section_lines.get(&name) {
                    return Err(ConfigError::Syntax {
                        line: n,
                        message: format!("section [{name}] repeated (first on line {first})"),
                    });
                }
                raw.section_lines.insert(name.clone(), n);
                raw.sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: n,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let Some(section) = current.clone() else {
                return Err(ConfigError::Syntax {
                    line: n,
                    message: "key outside of any [section]".to_string(),
                });
            };
            let key = key.trim().to_string();
            let allowed = SCHEMA
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, k)| *k)
                .unwrap_or(&[]);
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey {
                    line: n,
                    section,
                    key,
                });
            }
            let table = raw.sections.entry(section.clone()).or_default();
            if let Some(prev) = table.get(&key) {
                return Err(ConfigError::Duplicate {
                    section,
                    key,
                    first: prev.line,
                    second: n,
                });
            }
            table.insert(
                key,
                Entry {
                    value: value.trim().to_string(),
                    line: n,
                },
            );
        }
        Ok(raw)
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section)?.get(key)
    }

    fn require(&self, section: &str, key: &str) -> Result<&Entry, ConfigError> {
        self.get(section, key).ok_or_else(|| ConfigError::Missing {
            line: self
                .section_lines
                .get(section)
                .copied()
                .unwrap_or(self.lines.max(1)),
            section: section.to_string(),
            key: key.to_string(),
        })
    }

    /// SHA-256 over the sorted `section.key=value` lines, leaving out
    /// `[output]`, which does not change any result.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for (s, table) in self.sections.iter().filter(|(s, _)| s.as_str() != "output") {
            for (k, e) in table {
                hasher.update(format!("{s}.{k}={}\n", e.value).as_bytes());
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Replaces (or inserts) a value, as done by command-line overrides.
    pub fn set(&mut self, section: &str, key: &str, value: String) {
        let line = self.get(section, key).map_or(0, |e| e.line);
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), Entry { value, line });
    }
}

fn value_err(e: &Entry, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        line: e.line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_f64(e: &Entry, key: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_number(&e.value)
        .ok_or_else(|| value_err(e, key, format!("not a number: `{}`", e.value)))?;
    if !v.is_finite() {
        return Err(value_err(e, key, "must be finite"));
    }
    Ok(v)
}

/// Accepts decimals and simple fractions such as `1/32`.
fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.trim().parse().ok(),
    }
}

fn parse_list(e: &Entry, key: &str) -> Result<Vec<f64>, ConfigError> {
    e.value
        .split(',')
        .map(|s| {
            parse_number(s)
                .filter(|v| v.is_finite())
                .ok_or_else(|| value_err(e, key, format!("not a number: `{}`", s.trim())))
        })
        .collect()
}

fn parse_usize(e: &Entry, key: &str) -> Result<usize, ConfigError> {
    e.value
        .parse()
        .map_err(|_| value_err(e, key, format!("not a non-negative integer: `{}`", e.value)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    Smooth,
    Steps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub x: Vec<f64>,
    pub h: Vec<f64>,
    /// Vertical cuts `(x, y0, y1)`.
    pub cuts: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoidSpec {
    pub rect: Option<[f64; 4]>,
    /// Crack segments `(x0, y0, x1, y1)`.
    pub cracks: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    /// Directions as angles in degrees.
    pub directions: Vec<f64>,
    pub line_spacing: f64,
    pub affine: [f64; 4],
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub width: f64,
    pub cap: f64,
    pub nx: usize,
    pub ny: usize,
    pub p: f64,
    pub mu: f64,
    pub lambda: f64,
    pub mismatch: f64,
    pub norm: SurfaceNorm,
    pub angular_samples: usize,
    /// Strictly decreasing list; single-run commands use the first entry.
    pub eps: Vec<f64>,
    /// `η = eta_scale · ε^p`.
    pub eta_scale: f64,
    pub well: Well,
    pub tol_energy: f64,
    pub tol_cg: f64,
    pub max_outer: usize,
    pub max_v_iters: usize,
    pub init: Init,
    pub seed: u64,
    pub volume: Option<f64>,
    pub profile: Option<ProfileSpec>,
    pub delta: f64,
    pub sigma: f64,
    pub void: VoidSpec,
    pub slice: SliceSpec,
    pub collapse_levels: usize,
    pub collapse_length: f64,
    pub out_dir: PathBuf,
    pub dumps: bool,
    pub hash: String,
}

struct Reader<'a> {
    raw: &'a RawConfig,
}

impl Reader<'_> {
    fn f64_or(&self, s: &str, k: &str, default: f64) -> Result<f64, ConfigError> {
        self.raw.get(s, k).map_or(Ok(default), |e| parse_f64(e, k))
    }

    fn usize_or(&self, s: &str, k: &str, default: usize) -> Result<usize, ConfigError> {
        self.raw
            .get(s, k)
            .map_or(Ok(default), |e| parse_usize(e, k))
    }

    /// Checks a parsed value against a predicate, reporting the key's line.
    fn check<T>(
        &self,
        s: &str,
        k: &str,
        v: T,
        ok: impl Fn(&T) -> bool,
        msg: &str,
    ) -> Result<T, ConfigError> {
        if ok(&v) {
            return Ok(v);
        }
        let line = self.raw.get(s, k).map_or(0, |e| e.line);
        Err(ConfigError::Value {
            line,
            key: k.to_string(),
            message: msg.to_string(),
        })
    }
}

fn parse_cuts(e: &Entry) -> Result<Vec<(f64, f64, f64)>, ConfigError> {
    e.value
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|c| {
            let v: Vec<f64> = c.split(':').filter_map(parse_number).collect();
            match v.as_slice() {
                [x, y0, y1] if y1 > y0 => Ok((*x, *y0, *y1)),
                _ => Err(value_err(
                    e,
                    "cuts",
                    format!("expected `x:y0:y1` with y0 < y1, got `{}`", c.trim()),
                )),
            }
        })
        .collect()
}

fn parse_segments(e: &Entry) -> Result<Vec<[f64; 4]>, ConfigError> {
    e.value
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|c| {
            let v: Vec<f64> = c.split(':').filter_map(parse_number).collect();
            match v.as_slice() {
                [a, b, c2, d] => Ok([*a, *b, *c2, *d]),
                _ => Err(value_err(
                    e,
                    "cracks",
                    format!("expected `x0:y0:x1:y1`, got `{}`", c.trim()),
                )),
            }
        })
        .collect()
}

/// Parses and validates a configuration, filling defaults
/// (`η = ε^p`, double-well `W`, flat init, seed 0).
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw = RawConfig::parse(text)?;
    from_raw(&raw)
}

pub fn from_raw(raw: &RawConfig) -> Result<ExperimentConfig, ConfigError> {
    let r = Reader { raw };
    let name = raw
        .get("scenario", "name")
        .map_or("run".to_string(), |e| e.value.clone());
    let width = parse_f64(raw.require("scenario", "L")?, "L")?;
    let width = r.check("scenario", "L", width, |v| *v > 0.0, "L must be positive")?;
    let cap = parse_f64(raw.require("scenario", "M")?, "M")?;
    let cap = r.check("scenario", "M", cap, |v| *v > 0.0, "M must be positive")?;
    let nx = parse_usize(raw.require("scenario", "nx")?, "nx")?;
    let nx = r.check("scenario", "nx", nx, |v| *v >= 2, "nx must be at least 2")?;
    let ny = parse_usize(raw.require("scenario", "ny")?, "ny")?;
    // film commands additionally need x_d = 0 and x_d = M on grid rows,
    // which the grid constructor reports
    let ny = r.check("scenario", "ny", ny, |v| *v >= 2, "ny must be at least 2")?;

    let p = r.f64_or("physics", "p", 2.0)?;
    let p = r.check(
        "physics",
        "p",
        p,
        |v| *v > 1.0,
        "growth exponent must satisfy p > 1",
    )?;
    let mu = r.f64_or("physics", "mu", 1.0)?;
    let mu = r.check("physics", "mu", mu, |v| *v > 0.0, "mu must be positive")?;
    let lambda = r.f64_or("physics", "lambda", 1.0)?;
    let lambda = r.check(
        "physics",
        "lambda",
        lambda,
        |v| mu + v > 0.0,
        "need mu + lambda > 0",
    )?;
    let mismatch = r.f64_or("physics", "delta_mismatch", 0.0)?;
    let norm = match raw.get("physics", "norm").map(|e| (e, e.value.as_str())) {
        None | Some((_, "euclidean")) => SurfaceNorm::Euclidean,
        Some((e, "lq")) => {
            let q = r.f64_or("physics", "norm_q", 2.0)?;
            let w = raw
                .get("physics", "norm_weights")
                .map_or(Ok(vec![1.0, 1.0]), |e| parse_list(e, "norm_weights"))?;
            if w.len() != 2 {
                return Err(value_err(e, "norm_weights", "expected two weights"));
            }
            SurfaceNorm::weighted_lq(q, [w[0], w[1]])
                .map_err(|err| value_err(e, "norm", err.to_string()))?
        }
        Some((e, "matrix")) => {
            let m = raw
                .get("physics", "norm_matrix")
                .ok_or_else(|| {
                    value_err(
                        e,
                        "norm",
                        "matrix norm needs `norm_matrix = a11, a12, a21, a22`",
                    )
                })
                .and_then(|m| parse_list(m, "norm_matrix"))?;
            if m.len() != 4 {
                return Err(value_err(e, "norm_matrix", "expected four entries"));
            }
            SurfaceNorm::matrix([[m[0], m[1]], [m[2], m[3]]])
                .map_err(|err| value_err(e, "norm", err.to_string()))?
        }
        Some((e, other)) => {
            return Err(value_err(
                e,
                "norm",
                format!("expected euclidean, lq or matrix, got `{other}`"),
            ))
        }
    };
    let angular_samples = r.usize_or("physics", "angular_samples", 720)?;
    let angular_samples = r.check(
        "physics",
        "angular_samples",
        angular_samples,
        |v| *v >= 8,
        "need at least 8 samples",
    )?;

    let eps_entry = raw.require("phasefield", "eps")?;
    let eps = parse_list(eps_entry, "eps")?;
    if eps.is_empty() || eps.iter().any(|e| *e <= 0.0) {
        return Err(value_err(eps_entry, "eps", "every eps must be positive"));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(value_err(
            eps_entry,
            "eps",
            "eps list must be strictly decreasing",
        ));
    }
    let eta_scale = r.f64_or("phasefield", "eta_scale", 1.0)?;
    let eta_scale = r.check(
        "phasefield",
        "eta_scale",
        eta_scale,
        |v| *v > 0.0,
        "eta_scale must be positive",
    )?;
    let well = match raw.get("phasefield", "well").map(|e| (e, e.value.as_str())) {
        None | Some((_, "doubleWell")) => Well::DoubleWell,
        Some((_, "obstacle")) => Well::Obstacle,
        Some((e, other)) => {
            return Err(value_err(
                e,
                "well",
                format!("expected doubleWell or obstacle, got `{other}`"),
            ))
        }
    };
    let tol_energy = r.f64_or("phasefield", "tol_energy", 1e-8)?;
    let tol_energy = r.check(
        "phasefield",
        "tol_energy",
        tol_energy,
        |v| *v > 0.0,
        "must be positive",
    )?;
    let tol_cg = r.f64_or("phasefield", "tol_cg", 1e-10)?;
    let tol_cg = r.check(
        "phasefield",
        "tol_cg",
        tol_cg,
        |v| *v > 0.0,
        "must be positive",
    )?;
    let max_outer = r.usize_or("phasefield", "max_outer", 20)?;
    let max_v_iters = r.usize_or("phasefield", "max_v_iters", 3000)?;
    let seed = match raw.get("phasefield", "seed") {
        None => 0,
        Some(e) => e
            .value
            .parse()
            .map_err(|_| value_err(e, "seed", "expected an unsigned 64-bit integer"))?,
    };
    let init = match raw.get("phasefield", "init").map(|e| (e, e.value.as_str())) {
        None | Some((_, "flat")) => Init::Flat,
        Some((_, "perturbed")) => {
            let amplitude = r.f64_or("phasefield", "amplitude", 0.1)?;
            let amplitude = r.check(
                "phasefield",
                "amplitude",
                amplitude,
                |v| *v >= 0.0,
                "must be non-negative",
            )?;
            Init::Perturbed { amplitude, seed }
        }
        Some((e, other)) => {
            return Err(value_err(
                e,
                "init",
                format!("expected flat or perturbed, got `{other}`"),
            ))
        }
    };
    let volume = match raw.get("phasefield", "volume_m") {
        None => None,
        Some(e) => {
            let m = parse_f64(e, "volume_m")?;
            if !(m > 0.0 && m < cap * width) {
                return Err(value_err(
                    e,
                    "volume_m",
                    format!("need 0 < m < M L = {}", cap * width),
                ));
            }
            Some(m)
        }
    };

    let profile = match (raw.get("profile", "x"), raw.get("profile", "h")) {
        (None, None) => None,
        (Some(xe), Some(he)) => {
            let kind = match raw.get("profile", "kind").map(|e| (e, e.value.as_str())) {
                None | Some((_, "smooth")) => ProfileKind::Smooth,
                Some((_, "steps")) => ProfileKind::Steps,
                Some((e, other)) => {
                    return Err(value_err(
                        e,
                        "kind",
                        format!("expected smooth or steps, got `{other}`"),
                    ))
                }
            };
            let x = parse_list(xe, "x")?;
            let h = parse_list(he, "h")?;
            let expected = if kind == ProfileKind::Smooth {
                x.len()
            } else {
                x.len().saturating_sub(1)
            };
            if h.len() != expected || x.len() < 2 {
                return Err(value_err(
                    he,
                    "h",
                    format!("expected {expected} heights for {} abscissae", x.len()),
                ));
            }
            if h.iter().any(|v| *v < 0.0 || *v > cap) {
                return Err(value_err(
                    he,
                    "h",
                    format!("heights must lie in [0, M = {cap}]"),
                ));
            }
            let cuts = raw
                .get("profile", "cuts")
                .map_or(Ok(Vec::new()), parse_cuts)?;
            Some(ProfileSpec { kind, x, h, cuts })
        }
        (Some(e), None) | (None, Some(e)) => {
            return Err(value_err(e, "profile", "a profile needs both `x` and `h`"));
        }
    };
    let delta = r.f64_or("recovery", "delta", 1.0 / 256.0)?;
    let delta = r.check("recovery", "delta", delta, |v| *v > 0.0, "must be positive")?;
    let sigma = r.f64_or("recovery", "sigma", delta / 8.0)?;
    let sigma = r.check(
        "recovery",
        "sigma",
        sigma,
        |v| *v > 0.0 && *v < delta,
        "need 0 < sigma < delta",
    )?;

    let rect = match raw.get("void", "rect") {
        None => None,
        Some(e) => {
            let v = parse_list(e, "rect")?;
            match v.as_slice() {
                [a, b, c, d] if a < b && c < d => Some([*a, *b, *c, *d]),
                _ => {
                    return Err(value_err(
                        e,
                        "rect",
                        "expected `x0, x1, y0, y1` with x0 < x1 and y0 < y1",
                    ))
                }
            }
        }
    };
    let cracks = raw
        .get("void", "cracks")
        .map_or(Ok(Vec::new()), parse_segments)?;

    let directions = raw
        .get("slice", "directions")
        .map_or(Ok(vec![0.0, 90.0]), |e| parse_list(e, "directions"))?;
    let line_spacing = r.f64_or("slice", "line_spacing", 1.0 / 256.0)?;
    let line_spacing = r.check(
        "slice",
        "line_spacing",
        line_spacing,
        |v| *v > 0.0,
        "must be positive",
    )?;
    let affine = match raw.get("slice", "affine") {
        None => [0.4, 0.3, -0.2, 0.1],
        Some(e) => {
            let v = parse_list(e, "affine")?;
            match v.as_slice() {
                [a, b, c, d] => [*a, *b, *c, *d],
                _ => {
                    return Err(value_err(
                        e,
                        "affine",
                        "expected four entries a11, a12, a21, a22",
                    ))
                }
            }
        }
    };
    let slice_tol = r.f64_or("slice", "tol", 1e-3)?;

    let collapse_levels = r.usize_or("collapse", "levels", 10)?;
    let collapse_levels = r.check(
        "collapse",
        "levels",
        collapse_levels,
        |v| (1..=40).contains(v),
        "levels must be in 1..=40",
    )?;
    let collapse_length = r.f64_or("collapse", "length", 0.5)?;
    let collapse_length = r.check(
        "collapse",
        "length",
        collapse_length,
        |v| *v > 0.0 && *v < width,
        "need 0 < length < L",
    )?;

    let out_dir = PathBuf::from(raw.get("output", "dir").map_or("out", |e| e.value.as_str()));
    let dumps = match raw.get("output", "dumps").map(|e| (e, e.value.as_str())) {
        None | Some((_, "true")) => true,
        Some((_, "false")) => false,
        Some((e, other)) => {
            return Err(value_err(
                e,
                "dumps",
                format!("expected true or false, got `{other}`"),
            ))
        }
    };

    Ok(ExperimentConfig {
        name,
        width,
        cap,
        nx,
        ny,
        p,
        mu,
        lambda,
        mismatch,
        norm,
        angular_samples,
        eps,
        eta_scale,
        well,
        tol_energy,
        tol_cg,
        max_outer,
        max_v_iters,
        init,
        seed,
        volume,
        profile,
        delta,
        sigma,
        void: VoidSpec { rect, cracks },
        slice: SliceSpec {
            directions,
            line_spacing,
            affine,
            tol: slice_tol,
        },
        collapse_levels,
        collapse_length,
        out_dir,
        dumps,
        hash: raw.hash(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[scenario]\nL = 1\nM = 1\nnx = 8\nny = 15\n[phasefield]\neps = 1/8\n";

    #[test]
    fn defaults_filled() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.eps, vec![0.125]);
        assert_eq!(c.eta_scale, 1.0);
        assert_eq!(c.well, Well::DoubleWell);
        assert_eq!(c.p, 2.0);
        assert_eq!(c.init, Init::Flat);
        assert_eq!(c.volume, None);
    }

    #[test]
    fn p_one_rejected_with_line() {
        let text = format!("{MINIMAL}[physics]\np = 1\n");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Value { line: 9, .. }), "{err}");
        assert!(err.to_string().contains("p > 1"));
    }

    #[test]
    fn duplicate_reports_both_lines() {
        let text = "[scenario]\nL = 1\nM = 1\nL = 2\n";
        match RawConfig::parse(text).unwrap_err() {
            ConfigError::Duplicate { first, second, .. } => assert_eq!((first, second), (2, 4)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_key_and_missing_key() {
        let err = parse_config("[scenario]\nL = 1\nwidth = 2\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                line: 3,
                section: "scenario".into(),
                key: "width".into()
            }
        );
        let err = parse_config("[scenario]\nL = 1\nM = 1\nnx = 8\nny = 15\n").unwrap_err();
        assert!(
            matches!(err, ConfigError::Missing { ref key, .. } if key == "eps"),
            "{err}"
        );
    }

    #[test]
    fn volume_range_checked() {
        let text = format!("{MINIMAL}volume_m = 1.5\n");
        assert!(matches!(
            parse_config(&text),
            Err(ConfigError::Value { line: 8, .. })
        ));
    }

    #[test]
    fn hash_ignores_order() {
        let a = RawConfig::parse("[scenario]\nL = 1\nM = 1\n[phasefield]\neps = 0.1\n").unwrap();
        let b = RawConfig::parse("[phasefield]\neps = 0.1\n\n[scenario]\nM = 1 # cap\nL = 1\n")
            .unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RawConfig::parse("[scenario]\nL = 1\nM = 2\n[phasefield]\neps = 0.1\n").unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn profile_and_cuts() {
        let text = format!(
            "{MINIMAL}[profile]\nkind = steps\nx = 0, 0.5, 1\nh = 0.6, 0.3\ncuts = 0.25:0.3:0.6\n"
        );
        let c = parse_config(&text).unwrap();
        let p = c.profile.unwrap();
        assert_eq!(p.kind, ProfileKind::Steps);
        assert_eq!(p.cuts, vec![(0.25, 0.3, 0.6)]);
    }
}
