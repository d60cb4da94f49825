//! Planar primitives: oriented segments, jump sets and polygonal void sets.

use crate::error::{invalid, Result};

pub type Point = [f64; 2];

const GEOM_TOL: f64 = 1e-12;

#[inline]
pub fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn sub(a: Point, b: Point) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// An oriented segment `[a, b]` with unit normal `normal ⟂ (b − a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    pub normal: [f64; 2],
}

impl Segment {
    pub fn new(a: Point, b: Point, normal: [f64; 2]) -> Result<Self> {
        let d = sub(b, a);
        let len = norm(d);
        if !(len > GEOM_TOL) || !len.is_finite() {
            return invalid(format!("segment {a:?}-{b:?} has no length"));
        }
        if (norm(normal) - 1.0).abs() > 1e-9 {
            return invalid(format!("segment normal {normal:?} is not a unit vector"));
        }
        if dot(normal, d).abs() > 1e-9 * len {
            return invalid(format!(
                "normal {normal:?} is not orthogonal to {a:?}-{b:?}"
            ));
        }
        Ok(Segment { a, b, normal })
    }

    /// Normal obtained by rotating `b − a` clockwise (outer normal for
    /// counter-clockwise boundaries).
    pub fn with_right_normal(a: Point, b: Point) -> Result<Self> {
        let d = sub(b, a);
        let len = norm(d);
        if !(len > GEOM_TOL) {
            return invalid(format!("segment {a:?}-{b:?} has no length"));
        }
        Segment::new(a, b, [d[1] / len, -d[0] / len])
    }

    /// Vertical segment `{x} × [y0, y1]` with normal `e₁`.
    pub fn vertical(x: f64, y0: f64, y1: f64) -> Result<Self> {
        let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        Segment::new([x, lo], [x, hi], [1.0, 0.0])
    }

    pub fn length(&self) -> f64 {
        norm(sub(self.b, self.a))
    }

    pub fn is_vertical(&self) -> bool {
        (self.b[0] - self.a[0]).abs() <= 1e-12 * self.length().max(1.0)
    }

    pub fn point_at(&self, t: f64) -> Point {
        [
            self.a[0] + t * (self.b[0] - self.a[0]),
            self.a[1] + t * (self.b[1] - self.a[1]),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JumpSet {
    segments: Vec<Segment>,
}

impl JumpSet {
    pub fn new(segments: Vec<Segment>) -> Self {
        JumpSet { segments }
    }
    pub fn empty() -> Self {
        JumpSet::default()
    }
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return invalid(format!(
                "rectangle [{x0}, {x1}] x [{y0}, {y1}] is degenerate"
            ));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn overlap_area(&self, other: &Rect) -> f64 {
        let w = self.x1.min(other.x1) - self.x0.max(other.x0);
        let h = self.y1.min(other.y1) - self.y0.max(other.y0);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    pub fn contains_open(&self, p: Point) -> bool {
        p[0] > self.x0 && p[0] < self.x1 && p[1] > self.y0 && p[1] < self.y1
    }

    pub fn contains_closed(&self, p: Point, tol: f64) -> bool {
        p[0] >= self.x0 - tol
            && p[0] <= self.x1 + tol
            && p[1] >= self.y0 - tol
            && p[1] <= self.y1 + tol
    }

    fn corners(&self) -> [Point; 4] {
        [
            [self.x0, self.y0],
            [self.x1, self.y0],
            [self.x1, self.y1],
            [self.x0, self.y1],
        ]
    }

    /// Parameter interval of `{p0 + t d} ∩ rect`, if it has positive length.
    pub(crate) fn line_interval(&self, p0: Point, d: [f64; 2]) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (o, dir, a, b) in [
            (p0[0], d[0], self.x0, self.x1),
            (p0[1], d[1], self.y0, self.y1),
        ] {
            if dir.abs() < 1e-300 {
                if o <= a || o >= b {
                    return None;
                }
            } else {
                let (t0, t1) = ((a - o) / dir, (b - o) / dir);
                lo = lo.max(t0.min(t1));
                hi = hi.min(t0.max(t1));
            }
        }
        (hi > lo).then_some((lo, hi))
    }
}

/// The void region `E`: a union of closed rectangles with pairwise disjoint
/// interiors, or a simple polygon (stored counter-clockwise).
#[derive(Debug, Clone, PartialEq)]
pub enum VoidSet {
    Rectangles(Vec<Rect>),
    Polygon(Vec<Point>),
}

impl VoidSet {
    pub fn empty() -> Self {
        VoidSet::Rectangles(Vec::new())
    }

    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Ok(VoidSet::Rectangles(vec![Rect::new(x0, x1, y0, y1)?]))
    }

    pub fn rectangles(rects: Vec<Rect>) -> Result<Self> {
        for (k, r) in rects.iter().enumerate() {
            for s in &rects[k + 1..] {
                if r.overlap_area(s) > GEOM_TOL {
                    return invalid(format!("void rectangles {r:?} and {s:?} overlap"));
                }
            }
        }
        Ok(VoidSet::Rectangles(rects))
    }

    pub fn polygon(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return invalid("polygon needs at least three vertices");
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("polygon has non-finite vertices");
        }
        let n = vertices.len();
        for k in 0..n {
            if norm(sub(vertices[(k + 1) % n], vertices[k])) <= GEOM_TOL {
                return invalid("polygon has a repeated vertex");
            }
        }
        // simplicity: non-adjacent edges must not intersect
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(
                    vertices[i],
                    vertices[(i + 1) % n],
                    vertices[j],
                    vertices[(j + 1) % n],
                ) {
                    return invalid("polygon is not simple");
                }
            }
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Ok(VoidSet::Polygon(vertices))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, VoidSet::Rectangles(r) if r.is_empty())
    }

    pub fn area(&self) -> f64 {
        match self {
            VoidSet::Rectangles(rects) => rects.iter().map(Rect::area).sum(),
            VoidSet::Polygon(v) => signed_area(v),
        }
    }

    pub fn bounding_box(&self) -> Option<Rect> {
        let pts: Vec<Point> = match self {
            VoidSet::Rectangles(rects) => rects.iter().flat_map(|r| r.corners()).collect(),
            VoidSet::Polygon(v) => v.clone(),
        };
        if pts.is_empty() {
            return None;
        }
        let mut b = Rect {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for p in pts {
            b.x0 = b.x0.min(p[0]);
            b.x1 = b.x1.max(p[0]);
            b.y0 = b.y0.min(p[1]);
            b.y1 = b.y1.max(p[1]);
        }
        Some(b)
    }

    /// Boundary `∂E` as segments with outer normals.
    pub fn boundary(&self) -> Vec<Segment> {
        match self {
            VoidSet::Polygon(v) => {
                let n = v.len();
                (0..n)
                    .filter_map(|k| Segment::with_right_normal(v[k], v[(k + 1) % n]).ok())
                    .collect()
            }
            VoidSet::Rectangles(rects) => rectangle_union_boundary(rects),
        }
    }

    /// Area of `E ∩ cell`.
    pub fn area_in(&self, cell: &Rect) -> f64 {
        match self {
            VoidSet::Rectangles(rects) => rects.iter().map(|r| r.overlap_area(cell)).sum(),
            VoidSet::Polygon(v) => {
                let clipped = clip_to_rect(v, cell);
                if clipped.len() < 3 {
                    0.0
                } else {
                    signed_area(&clipped).abs()
                }
            }
        }
    }

    /// Whether `p` lies in the interior of `E`.
    pub fn contains_open(&self, p: Point) -> bool {
        match self {
            VoidSet::Rectangles(rects) => {
                let h = 1e-9;
                rects.iter().any(|r| r.contains_open(p))
                    || [[h, h], [h, -h], [-h, h], [-h, -h]].iter().all(|o| {
                        rects
                            .iter()
                            .any(|r| r.contains_open([p[0] + o[0], p[1] + o[1]]))
                    })
            }
            VoidSet::Polygon(v) => {
                point_in_polygon(v, p)
                    && v.iter().enumerate().all(|(k, a)| {
                        point_segment_distance(p, *a, v[(k + 1) % v.len()]) > GEOM_TOL
                    })
            }
        }
    }

    /// Sorted, merged parameter intervals `{t : p0 + t d ∈ E}`.
    pub fn line_intervals(&self, p0: Point, d: [f64; 2]) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = match self {
            VoidSet::Rectangles(rects) => rects
                .iter()
                .filter_map(|r| r.line_interval(p0, d))
                .collect(),
            VoidSet::Polygon(v) => polygon_line_intervals(v, p0, d),
        };
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        merge_intervals(out)
    }

    /// Length of the part of `seg` lying in `Ē`.
    pub fn length_inside(&self, seg: &Segment) -> f64 {
        let d = sub(seg.b, seg.a);
        let len = seg.length();
        self.line_intervals(seg.a, d)
            .iter()
            .map(|&(a, b)| (b.min(1.0) - a.max(0.0)).max(0.0))
            .sum::<f64>()
            * len
    }
}

fn merge_intervals(sorted: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (a, b) in sorted {
        match merged.last_mut() {
            Some(last) if a <= last.1 + GEOM_TOL => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged
}

/// Subtracts sorted disjoint `holes` from `[lo, hi]`.
pub(crate) fn interval_difference(lo: f64, hi: f64, holes: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut holes: Vec<(f64, f64)> = holes.to_vec();
    holes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let holes = merge_intervals(holes);
    let mut out = Vec::new();
    let mut cur = lo;
    for (a, b) in holes {
        if b <= cur {
            continue;
        }
        if a >= hi {
            break;
        }
        if a > cur {
            out.push((cur, a));
        }
        cur = cur.max(b);
    }
    if cur < hi {
        out.push((cur, hi));
    }
    out.retain(|(a, b)| b - a > GEOM_TOL);
    out
}

fn rectangle_union_boundary(rects: &[Rect]) -> Vec<Segment> {
    // edge = (fixed coordinate, lo, hi, outward normal, axis): axis 0 = horizontal edge
    struct Edge {
        level: f64,
        lo: f64,
        hi: f64,
        normal: [f64; 2],
        horizontal: bool,
    }
    let edges_of = |r: &Rect| {
        [
            Edge {
                level: r.y0,
                lo: r.x0,
                hi: r.x1,
                normal: [0.0, -1.0],
                horizontal: true,
            },
            Edge {
                level: r.y1,
                lo: r.x0,
                hi: r.x1,
                normal: [0.0, 1.0],
                horizontal: true,
            },
            Edge {
                level: r.x0,
                lo: r.y0,
                hi: r.y1,
                normal: [-1.0, 0.0],
                horizontal: false,
            },
            Edge {
                level: r.x1,
                lo: r.y0,
                hi: r.y1,
                normal: [1.0, 0.0],
                horizontal: false,
            },
        ]
    };
    let all: Vec<(usize, Edge)> = rects
        .iter()
        .enumerate()
        .flat_map(|(k, r)| edges_of(r).into_iter().map(move |e| (k, e)))
        .collect();
    let mut out = Vec::new();
    for (k, e) in &all {
        // portions shared with an opposite-facing edge of another rectangle are interior
        let holes: Vec<(f64, f64)> = all
            .iter()
            .filter(|(m, o)| {
                m != k
                    && o.horizontal == e.horizontal
                    && (o.level - e.level).abs() <= GEOM_TOL
                    && dot(o.normal, e.normal) < 0.0
            })
            .map(|(_, o)| (o.lo, o.hi))
            .collect();
        for (lo, hi) in interval_difference(e.lo, e.hi, &holes) {
            let (a, b) = if e.horizontal {
                ([lo, e.level], [hi, e.level])
            } else {
                ([e.level, lo], [e.level, hi])
            };
            out.push(Segment {
                a,
                b,
                normal: e.normal,
            });
        }
    }
    out
}

pub fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|k| {
            let p = v[k];
            let q = v[(k + 1) % n];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, p: Point, c: f64| {
        c.abs() <= GEOM_TOL
            && p[0] >= a[0].min(b[0]) - GEOM_TOL
            && p[0] <= a[0].max(b[0]) + GEOM_TOL
            && p[1] >= a[1].min(b[1]) - GEOM_TOL
            && p[1] <= a[1].max(b[1]) + GEOM_TOL
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = sub(b, a);
    let l2 = dot(d, d);
    let t = if l2 > 0.0 {
        (dot(sub(p, a), d) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    norm(sub(p, [a[0] + t * d[0], a[1] + t * d[1]]))
}

fn point_in_polygon(v: &[Point], p: Point) -> bool {
    let n = v.len();
    let mut inside = false;
    for k in 0..n {
        let a = v[k];
        let b = v[(k + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn polygon_line_intervals(v: &[Point], p0: Point, d: [f64; 2]) -> Vec<(f64, f64)> {
    // signed distance of vertices from the line, half-open crossing rule
    let nrm = [-d[1], d[0]];
    let dd = dot(d, d);
    let n = v.len();
    let mut ts = Vec::new();
    for k in 0..n {
        let a = v[k];
        let b = v[(k + 1) % n];
        let sa = dot(sub(a, p0), nrm);
        let sb = dot(sub(b, p0), nrm);
        if (sa > 0.0) != (sb > 0.0) {
            let s = sa / (sa - sb);
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            ts.push(dot(sub(x, p0), d) / dd);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.chunks_exact(2)
        .filter(|c| c[1] > c[0])
        .map(|c| (c[0], c[1]))
        .collect()
}

/// Sutherland–Hodgman clip of a polygon against an axis-aligned rectangle.
fn clip_to_rect(poly: &[Point], r: &Rect) -> Vec<Point> {
    let mut out = poly.to_vec();
    // (axis, bound, keep_greater)
    for (axis, bound, keep_ge) in [
        (0, r.x0, true),
        (0, r.x1, false),
        (1, r.y0, true),
        (1, r.y1, false),
    ] {
        if out.is_empty() {
            break;
        }
        let input = std::mem::take(&mut out);
        let inside = |p: &Point| {
            if keep_ge {
                p[axis] >= bound
            } else {
                p[axis] <= bound
            }
        };
        let n = input.len();
        for k in 0..n {
            let cur = input[k];
            let prev = input[(k + n - 1) % n];
            let (ci, pi) = (inside(&cur), inside(&prev));
            if ci != pi {
                let s = (bound - prev[axis]) / (cur[axis] - prev[axis]);
                out.push([
                    prev[0] + s * (cur[0] - prev[0]),
                    prev[1] + s * (cur[1] - prev[1]),
                ]);
            }
            if ci {
                out.push(cur);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_validation() {
        assert!(Segment::new([0.0, 0.0], [0.0, 0.0], [1.0, 0.0]).is_err());
        assert!(Segment::new([0.0, 0.0], [1.0, 0.0], [1.0, 0.0]).is_err());
        assert!(Segment::new([0.0, 0.0], [1.0, 0.0], [0.0, 2.0]).is_err());
        let s = Segment::with_right_normal([0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(s.normal, [0.0, -1.0]);
    }

    #[test]
    fn rectangle_and_polygon_agree() {
        let r = VoidSet::rectangle(0.25, 0.75, 0.25, 0.75).unwrap();
        let p =
            VoidSet::polygon(vec![[0.25, 0.75], [0.75, 0.75], [0.75, 0.25], [0.25, 0.25]]).unwrap();
        assert!((r.area() - 0.25).abs() < 1e-15);
        assert!((p.area() - 0.25).abs() < 1e-15);
        let cell = Rect::new(0.5, 1.0, 0.0, 0.3).unwrap();
        assert!((r.area_in(&cell) - 0.0125).abs() < 1e-15);
        assert!((p.area_in(&cell) - 0.0125).abs() < 1e-15);
        let lr: f64 = r.boundary().iter().map(Segment::length).sum();
        let lp: f64 = p.boundary().iter().map(Segment::length).sum();
        assert!((lr - 2.0).abs() < 1e-15 && (lp - 2.0).abs() < 1e-15);
        // outer normals point away from the center
        for s in p.boundary().iter().chain(r.boundary().iter()) {
            let mid = s.point_at(0.5);
            assert!(dot(s.normal, sub(mid, [0.5, 0.5])) > 0.0);
        }
    }

    #[test]
    fn adjacent_rectangles_share_no_boundary() {
        let e = VoidSet::rectangles(vec![
            Rect::new(0.0, 0.5, 0.0, 0.5).unwrap(),
            Rect::new(0.5, 1.0, 0.0, 0.5).unwrap(),
        ])
        .unwrap();
        let len: f64 = e.boundary().iter().map(Segment::length).sum();
        assert!((len - 3.0).abs() < 1e-15);
        assert!(VoidSet::rectangles(vec![
            Rect::new(0.0, 0.6, 0.0, 0.5).unwrap(),
            Rect::new(0.5, 1.0, 0.0, 0.5).unwrap(),
        ])
        .is_err());
    }

    #[test]
    fn line_intervals_of_l_shape() {
        let l = VoidSet::polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        assert!((l.area() - 3.0).abs() < 1e-15);
        let iv = l.line_intervals([-1.0, 0.5], [1.0, 0.0]);
        assert_eq!(iv.len(), 1);
        assert!((iv[0].0 - 1.0).abs() < 1e-15 && (iv[0].1 - 3.0).abs() < 1e-15);
        let iv = l.line_intervals([0.5, 1.5], [1.0, 0.0]);
        assert!((iv[0].1 - iv[0].0 - 1.0).abs() < 1e-15);
        assert!(l.contains_open([0.5, 0.5]));
        assert!(!l.contains_open([1.5, 1.5]));
        assert!(!l.contains_open([1.0, 1.5]));
    }

    #[test]
    fn non_simple_polygon_rejected() {
        assert!(VoidSet::polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn interval_difference_basics() {
        let d = interval_difference(0.0, 1.0, &[(0.2, 0.3), (0.25, 0.5), (0.9, 2.0)]);
        assert_eq!(d, vec![(0.0, 0.2), (0.5, 0.9)]);
    }
}
