//! Film height profiles `h: ω → [0, M]` on an interval `ω`.
//!
//! A profile is a contiguous list of linear pieces. A *smooth* profile is
//! continuous (nodal values interpreted piecewise-linearly); a *piecewise*
//! profile may jump between pieces, and the jump heights count as vertical
//! parts of the generalized graph.

use crate::error::{invalid, Result};

const JUMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub x0: f64,
    pub x1: f64,
    pub h0: f64,
    pub h1: f64,
}

impl Piece {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }
    pub fn slope(&self) -> f64 {
        (self.h1 - self.h0) / (self.x1 - self.x0)
    }
    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.x0) / (self.x1 - self.x0);
        self.h0 + t * (self.h1 - self.h0)
    }
    pub fn arc_length(&self) -> f64 {
        self.width().hypot(self.h1 - self.h0)
    }
    pub fn integral(&self) -> f64 {
        0.5 * self.width() * (self.h0 + self.h1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Smooth,
    Piecewise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pieces: Vec<Piece>,
    kind: ProfileKind,
}

/// A jump of a piecewise profile at `x` from `left` to `right`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub x: f64,
    pub left: f64,
    pub right: f64,
}

impl Jump {
    pub fn height(&self) -> f64 {
        (self.right - self.left).abs()
    }
}

impl Profile {
    /// Continuous piecewise-linear profile through `(xs[k], hs[k])`.
    pub fn smooth(xs: Vec<f64>, hs: Vec<f64>) -> Result<Self> {
        if xs.len() != hs.len() || xs.len() < 2 {
            return invalid("smooth profile needs matching xs/hs with at least two nodes");
        }
        if xs.iter().chain(&hs).any(|v| !v.is_finite()) {
            return invalid("profile values must be finite");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("profile nodes must be strictly increasing");
        }
        if hs.iter().any(|&h| h < 0.0) {
            return invalid("profile heights must be nonnegative");
        }
        let pieces = xs
            .windows(2)
            .zip(hs.windows(2))
            .map(|(x, h)| Piece {
                x0: x[0],
                x1: x[1],
                h0: h[0],
                h1: h[1],
            })
            .collect();
        Ok(Profile {
            pieces,
            kind: ProfileKind::Smooth,
        })
    }

    pub fn flat(x0: f64, x1: f64, height: f64) -> Result<Self> {
        Profile::smooth(vec![x0, x1], vec![height, height])
    }

    /// Contiguous linear pieces, possibly with jumps at interior breakpoints.
    pub fn piecewise(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return invalid("piecewise profile needs at least one piece");
        }
        for p in &pieces {
            if ![p.x0, p.x1, p.h0, p.h1].iter().all(|v| v.is_finite()) || !(p.x1 > p.x0) {
                return invalid(format!("bad profile piece {p:?}"));
            }
            if p.h0 < 0.0 || p.h1 < 0.0 {
                return invalid("profile heights must be nonnegative");
            }
        }
        if pieces
            .windows(2)
            .any(|w| (w[1].x0 - w[0].x1).abs() > JUMP_TOL)
        {
            return invalid("profile pieces must be contiguous");
        }
        Ok(Profile {
            pieces,
            kind: ProfileKind::Piecewise,
        })
    }

    /// Piecewise-constant profile: `heights[k]` on `(breaks[k], breaks[k+1])`.
    pub fn steps(breaks: &[f64], heights: &[f64]) -> Result<Self> {
        if breaks.len() != heights.len() + 1 {
            return invalid("steps need one more breakpoint than heights");
        }
        Profile::piecewise(
            breaks
                .windows(2)
                .zip(heights)
                .map(|(b, &h)| Piece {
                    x0: b[0],
                    x1: b[1],
                    h0: h,
                    h1: h,
                })
                .collect(),
        )
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }
    pub fn is_smooth(&self) -> bool {
        self.kind == ProfileKind::Smooth
    }
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }
    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].x0, self.pieces[self.pieces.len() - 1].x1)
    }

    /// Nodal form `(xs, hs)` of a smooth profile.
    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let mut xs: Vec<f64> = self.pieces.iter().map(|p| p.x0).collect();
        let mut hs: Vec<f64> = self.pieces.iter().map(|p| p.h0).collect();
        let last = self.pieces[self.pieces.len() - 1];
        xs.push(last.x1);
        hs.push(last.h1);
        (xs, hs)
    }

    pub fn check_range(&self, cap: f64) -> Result<()> {
        for p in &self.pieces {
            if p.h0 > cap + JUMP_TOL || p.h1 > cap + JUMP_TOL {
                return invalid(format!("profile exceeds the height cap {cap}"));
            }
        }
        Ok(())
    }

    fn piece_index(&self, x: f64) -> usize {
        let k = self.pieces.partition_point(|p| p.x0 <= x);
        k.saturating_sub(1).min(self.pieces.len() - 1)
    }

    /// `h(x)`, right-continuous at jumps.
    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].eval(x)
    }

    fn one_sided(&self, x: f64) -> (f64, f64) {
        let k = self.piece_index(x);
        let right = self.pieces[k].eval(x);
        let left = if k > 0 && (x - self.pieces[k].x0).abs() <= JUMP_TOL {
            self.pieces[k - 1].h1
        } else {
            right
        };
        (left, right)
    }

    /// `min(h(x−), h(x+))`: the top of the density-one part of the subgraph.
    pub fn eval_lower(&self, x: f64) -> f64 {
        let (l, r) = self.one_sided(x);
        l.min(r)
    }

    /// `max(h(x−), h(x+))`.
    pub fn eval_upper(&self, x: f64) -> f64 {
        let (l, r) = self.one_sided(x);
        l.max(r)
    }

    pub fn jumps(&self) -> Vec<Jump> {
        self.pieces
            .windows(2)
            .filter(|w| (w[1].h0 - w[0].h1).abs() > JUMP_TOL)
            .map(|w| Jump {
                x: w[1].x0,
                left: w[0].h1,
                right: w[1].h0,
            })
            .collect()
    }

    /// Sum of the arc lengths of the pieces.
    pub fn arc_length(&self) -> f64 {
        self.pieces.iter().map(Piece::arc_length).sum()
    }

    /// Length of the generalized graph: arc lengths plus jump heights.
    pub fn graph_length(&self) -> f64 {
        self.arc_length() + self.jumps().iter().map(Jump::height).sum::<f64>()
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(Piece::integral).sum()
    }

    pub fn sup(&self) -> f64 {
        self.pieces
            .iter()
            .fold(0.0_f64, |m, p| m.max(p.h0).max(p.h1))
    }

    /// `h / r`.
    pub fn scaled(&self, r: f64) -> Profile {
        Profile {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    h0: p.h0 / r,
                    h1: p.h1 / r,
                    ..*p
                })
                .collect(),
            kind: self.kind,
        }
    }

    /// `h ∧ cap`, splitting pieces where they cross `cap`.
    pub fn truncated(&self, cap: f64) -> Profile {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let crosses = (p.h0 - cap) * (p.h1 - cap) < 0.0;
            if crosses {
                let xc = p.x0 + (cap - p.h0) / (p.h1 - p.h0) * p.width();
                pieces.push(Piece {
                    x0: p.x0,
                    x1: xc,
                    h0: p.h0.min(cap),
                    h1: cap,
                });
                pieces.push(Piece {
                    x0: xc,
                    x1: p.x1,
                    h0: cap,
                    h1: p.h1.min(cap),
                });
            } else {
                pieces.push(Piece {
                    h0: p.h0.min(cap),
                    h1: p.h1.min(cap),
                    ..*p
                });
            }
        }
        pieces.retain(|p| p.x1 > p.x0);
        Profile {
            pieces,
            kind: self.kind,
        }
    }

    /// Pieces overlapping `(a, b)`, clipped to it.
    pub fn pieces_on(&self, a: f64, b: f64) -> impl Iterator<Item = Piece> + '_ {
        let start = self.piece_index(a);
        self.pieces[start..]
            .iter()
            .take_while(move |p| p.x0 < b)
            .filter_map(move |p| {
                let x0 = p.x0.max(a);
                let x1 = p.x1.min(b);
                (x1 > x0).then(|| Piece {
                    x0,
                    x1,
                    h0: p.eval(x0),
                    h1: p.eval(x1),
                })
            })
    }

    /// `∫_a^b clamp(h(x) − lo, 0, hi − lo) dx`, exact for piecewise-linear `h`.
    pub fn clamped_integral(&self, a: f64, b: f64, lo: f64, hi: f64) -> f64 {
        self.pieces_on(a, b)
            .map(|p| integrate_clamped_linear(p.x0, p.x1, p.h0, p.h1, lo, hi))
            .sum()
    }

    /// `‖self − other‖_{L¹}` over the common domain, exact.
    pub fn l1_distance(&self, other: &Profile) -> f64 {
        let (a0, b0) = self.domain();
        let (a1, b1) = other.domain();
        let (a, b) = (a0.max(a1), b0.min(b1));
        let mut xs: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .flat_map(|p| [p.x0, p.x1])
            .filter(|&x| x > a && x < b)
            .collect();
        xs.push(a);
        xs.push(b);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut total = 0.0;
        for w in xs.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let mid = 0.5 * (x0 + x1);
            let pa = self.pieces[self.piece_index(mid)];
            let pb = other.pieces[other.piece_index(mid)];
            let d0 = pa.eval(x0) - pb.eval(x0);
            let d1 = pa.eval(x1) - pb.eval(x1);
            total += abs_linear_integral(x1 - x0, d0, d1);
        }
        total
    }
}

/// `∫ |linear|` over an interval of width `w` with end values `d0`, `d1`.
fn abs_linear_integral(w: f64, d0: f64, d1: f64) -> f64 {
    if d0 * d1 >= 0.0 {
        0.5 * w * (d0.abs() + d1.abs())
    } else {
        0.5 * w * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs())
    }
}

/// `∫_{xa}^{xb} clamp(f(x) − lo, 0, hi − lo) dx` for linear `f` with end values `fa`, `fb`.
pub fn integrate_clamped_linear(xa: f64, xb: f64, fa: f64, fb: f64, lo: f64, hi: f64) -> f64 {
    let w = xb - xa;
    if w <= 0.0 {
        return 0.0;
    }
    let mut ts = vec![0.0, 1.0];
    if fb != fa {
        for level in [lo, hi] {
            let t = (level - fa) / (fb - fa);
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    let g = |t: f64| (fa + t * (fb - fa)).clamp(lo, hi) - lo;
    ts.windows(2)
        .map(|s| 0.5 * (s[1] - s[0]) * (g(s[0]) + g(s[1])))
        .sum::<f64>()
        * w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_length_of_step() {
        let h = Profile::steps(&[0.0, 0.5, 1.0], &[0.3, 0.0]).unwrap();
        assert!((h.graph_length() - 1.3).abs() < 1e-15);
        assert_eq!(h.jumps().len(), 1);
        assert_eq!(h.eval_lower(0.5), 0.0);
        assert_eq!(h.eval_upper(0.5), 0.3);
        assert_eq!(h.eval(0.25), 0.3);
    }

    #[test]
    fn sloped_length() {
        let h = Profile::smooth(vec![0.0, 1.0], vec![0.0, 0.5]).unwrap();
        assert!((h.graph_length() - 1.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn clamped_integral_matches_brute_force() {
        let h = Profile::smooth(vec![0.0, 0.3, 0.7, 1.0], vec![0.1, 0.9, 0.2, 0.5]).unwrap();
        let (lo, hi) = (0.25, 0.6);
        let n = 200_000;
        let brute: f64 = (0..n)
            .map(|k| {
                let x = (k as f64 + 0.5) / n as f64;
                (h.eval(x).clamp(lo, hi) - lo) / n as f64
            })
            .sum();
        assert!((h.clamped_integral(0.0, 1.0, lo, hi) - brute).abs() < 1e-9);
    }

    #[test]
    fn truncation_and_scaling() {
        let h = Profile::smooth(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let t = h.truncated(0.5);
        assert!((t.integral() - (0.125 + 0.25)).abs() < 1e-15);
        assert!((h.scaled(2.0).integral() - 0.25).abs() < 1e-15);
        assert!((h.l1_distance(&t) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn invalid_profiles() {
        assert!(Profile::smooth(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Profile::smooth(vec![0.0, 1.0], vec![-1.0, 1.0]).is_err());
        assert!(Profile::piecewise(vec![
            Piece {
                x0: 0.0,
                x1: 0.4,
                h0: 0.0,
                h1: 0.0
            },
            Piece {
                x0: 0.5,
                x1: 1.0,
                h0: 0.0,
                h1: 0.0
            },
        ])
        .is_err());
        assert!(Profile::flat(0.0, 1.0, 2.0)
            .unwrap()
            .check_range(1.0)
            .is_err());
    }
}
