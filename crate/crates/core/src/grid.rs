//! Uniform tensor grids and the nodal fields that live on them.
//!
//! Nodes are stored row-major with the row index running along `x_d`
//! (bottom row first), so node `(i, j)` sits at `(x_min + i hx, y_min + j hy)`.
//! Cell `(i, j)` is the rectangle spanned by nodes `(i, j)` and `(i+1, j+1)`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::Mat2;

const LINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    height_cap: Option<f64>,
}

impl Grid {
    /// Film reference domain `(0, width) x (-1, height_cap + 1)`.
    ///
    /// `ny` must place both `x_d = 0` and `x_d = height_cap` on grid lines.
    pub fn film(width: f64, height_cap: f64, nx: usize, ny: usize) -> Result<Grid> {
        if !(width > 0.0 && width.is_finite()) {
            return invalid(format!("film width must be positive, got {width}"));
        }
        if !(height_cap > 0.0 && height_cap.is_finite()) {
            return invalid(format!("height cap M must be positive, got {height_cap}"));
        }
        let grid = Grid::rect((0.0, width), (-1.0, height_cap + 1.0), nx, ny)?;
        for level in [0.0, height_cap] {
            if grid.row_at(level).is_none() {
                return invalid(format!(
                    "ny = {ny} does not put x_d = {level} on a grid line (hy = {})",
                    grid.hy
                ));
            }
        }
        Ok(Grid {
            height_cap: Some(height_cap),
            ..grid
        })
    }

    /// Plain rectangle `(x0, x1) x (y0, y1)`.
    pub fn rect(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Grid> {
        if nx < 2 || ny < 2 {
            return invalid(format!(
                "need at least 2 cells per direction, got {nx}x{ny}"
            ));
        }
        if !(x.1 > x.0 && y.1 > y.0) || ![x.0, x.1, y.0, y.1].iter().all(|v| v.is_finite()) {
            return invalid("degenerate grid extent");
        }
        Ok(Grid {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            nx,
            ny,
            hx: (x.1 - x.0) / nx as f64,
            hy: (y.1 - y.0) / ny as f64,
            height_cap: None,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    pub fn x_range(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }
    pub fn y_range(&self) -> (f64, f64) {
        (self.y_min, self.y_max)
    }
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }
    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    /// `M` for film grids, `None` for plain rectangles.
    pub fn height_cap(&self) -> Option<f64> {
        self.height_cap
    }

    pub fn nodes_x(&self) -> usize {
        self.nx + 1
    }
    pub fn nodes_y(&self) -> usize {
        self.ny + 1
    }
    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }
    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.hx
        }
    }
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny {
            self.y_max
        } else {
            self.y_min + j as f64 * self.hy
        }
    }
    pub fn node_point(&self, i: usize, j: usize) -> Point {
        [self.x(i), self.y(j)]
    }
    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        [
            self.x_min + (i as f64 + 0.5) * self.hx,
            self.y_min + (j as f64 + 0.5) * self.hy,
        ]
    }

    /// Row index whose grid line is `y`, if any.
    pub fn row_at(&self, y: f64) -> Option<usize> {
        let t = (y - self.y_min) / self.hy;
        let j = t.round();
        if (t - j).abs() <= LINE_TOL && j >= 0.0 && j <= self.ny as f64 {
            Some(j as usize)
        } else {
            None
        }
    }

    /// Highest row lying at or below `x_d = 0` (film grids).
    pub fn substrate_top_row(&self) -> Option<usize> {
        self.height_cap?;
        self.row_at(0.0)
    }

    /// Row of `x_d = M` (film grids).
    pub fn cap_row(&self) -> Option<usize> {
        self.row_at(self.height_cap?)
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    pub(crate) fn same_as(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Bilinear interpolation of nodal scalars at an arbitrary point of the closed domain.
    pub fn interpolate(&self, values: &[f64], p: Point) -> f64 {
        let (i, s) = locate(p[0], self.x_min, self.hx, self.nx);
        let (j, t) = locate(p[1], self.y_min, self.hy, self.ny);
        let v00 = values[self.node(i, j)];
        let v10 = values[self.node(i + 1, j)];
        let v01 = values[self.node(i, j + 1)];
        let v11 = values[self.node(i + 1, j + 1)];
        (1.0 - s) * (1.0 - t) * v00 + s * (1.0 - t) * v10 + (1.0 - s) * t * v01 + s * t * v11
    }

    /// The four node indices of cell `(i, j)`: `[n00, n10, n01, n11]`.
    #[inline]
    pub fn cell_nodes(&self, i: usize, j: usize) -> [usize; 4] {
        let n00 = self.node(i, j);
        [n00, n00 + 1, n00 + self.nx + 1, n00 + self.nx + 2]
    }
}

fn locate(x: f64, x0: f64, h: f64, n: usize) -> (usize, f64) {
    let t = ((x - x0) / h).clamp(0.0, n as f64);
    let i = (t.floor() as usize).min(n - 1);
    (i, t - i as f64)
}

/// Centered-difference gradient of a nodal vector field at the center of cell `(i, j)`;
/// `g[a][b] = d u_a / d x_b`.
#[inline]
pub(crate) fn cell_gradient(grid: &Grid, u: &[[f64; 2]], i: usize, j: usize) -> Mat2 {
    let [n00, n10, n01, n11] = grid.cell_nodes(i, j);
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        g[a][0] = (u[n10][a] + u[n11][a] - u[n00][a] - u[n01][a]) / (2.0 * grid.hx);
        g[a][1] = (u[n01][a] + u[n11][a] - u[n00][a] - u[n10][a]) / (2.0 * grid.hy);
    }
    g
}

/// A nodal vector field `u: nodes -> R^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    grid: Grid,
    values: Vec<[f64; 2]>,
}

impl DisplacementField {
    pub fn new(grid: Grid, values: Vec<[f64; 2]>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return invalid(format!(
                "expected {} nodal values, got {}",
                grid.node_count(),
                values.len()
            ));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("displacement field"));
        }
        Ok(DisplacementField { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        DisplacementField {
            values: vec![[0.0; 2]; grid.node_count()],
            grid: grid.clone(),
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: &Grid, f: impl Fn(Point) -> [f64; 2]) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for j in 0..grid.nodes_y() {
            for i in 0..grid.nodes_x() {
                values.push(f(grid.node_point(i, j)));
            }
        }
        DisplacementField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [[f64; 2]] {
        &mut self.values
    }
    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        self.values[self.grid.node(i, j)]
    }

    pub fn cell_gradient(&self, i: usize, j: usize) -> Mat2 {
        cell_gradient(&self.grid, &self.values, i, j)
    }

    pub fn component(&self, a: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[a]).collect()
    }

    pub fn interpolate(&self, p: Point) -> [f64; 2] {
        let ux = self.grid.interpolate(&self.component(0), p);
        let uy = self.grid.interpolate(&self.component(1), p);
        [ux, uy]
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// A nodal scalar phase field. Admissibility is checked separately, since
/// inadmissible fields are legitimate inputs to the energy (which is then `+inf`).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    grid: Grid,
    values: Vec<f64>,
}

impl PhaseField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return invalid(format!(
                "expected {} nodal values, got {}",
                grid.node_count(),
                values.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("phase field"));
        }
        Ok(PhaseField { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(Point) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for j in 0..grid.nodes_y() {
            for i in 0..grid.nodes_x() {
                values.push(f(grid.node_point(i, j)));
            }
        }
        PhaseField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.node(i, j)]
    }

    /// Checks `0 <= v <= 1`, `v = 1` for `x_d <= 0`, `v = 0` for `x_d >= M`
    /// and `v` non-increasing along every column.
    pub fn check_admissible(&self) -> Result<()> {
        let g = &self.grid;
        let (Some(sub), Some(cap)) = (g.substrate_top_row(), g.cap_row()) else {
            return Err(Error::Inadmissible(
                "phase fields need a film grid".to_string(),
            ));
        };
        for i in 0..g.nodes_x() {
            let mut prev = f64::INFINITY;
            for j in 0..g.nodes_y() {
                let v = self.at(i, j);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Inadmissible(format!(
                        "v = {v} outside [0, 1] at node ({i}, {j})"
                    )));
                }
                if j <= sub && v != 1.0 {
                    return Err(Error::Inadmissible(format!(
                        "v = {v} != 1 in the substrate band at node ({i}, {j})"
                    )));
                }
                if j >= cap && v != 0.0 {
                    return Err(Error::Inadmissible(format!(
                        "v = {v} != 0 above the height cap at node ({i}, {j})"
                    )));
                }
                if v > prev {
                    return Err(Error::NonMonotone { column: i });
                }
                prev = v;
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        self.check_admissible().is_ok()
    }
}

/// Writes nodal scalars as a plain-text matrix, one grid row per line
/// (bottom row first), after a `# nx ny L M` header.
pub fn write_dump<W: Write>(mut out: W, grid: &Grid, values: &[f64]) -> std::io::Result<()> {
    let m = grid.height_cap().unwrap_or(grid.y_max - grid.y_min);
    writeln!(out, "# {} {} {} {}", grid.nx, grid.ny, grid.width(), m)?;
    let mut line = String::new();
    for j in 0..grid.nodes_y() {
        line.clear();
        for i in 0..grid.nodes_x() {
            if i > 0 {
                line.push(' ');
            }
            write!(line, "{}", values[grid.node(i, j)]).unwrap();
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads a dump written by [`write_dump`]; returns `(nx, ny, L, M, values)`.
pub fn read_dump<R: BufRead>(input: R) -> Result<(usize, usize, f64, f64, Vec<f64>)> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(Ok(h)) => h,
        _ => return invalid("empty grid dump"),
    };
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .map(|h| h.split_whitespace().collect())
        .unwrap_or_default();
    if fields.len() != 4 {
        return invalid(format!("bad dump header {header:?}"));
    }
    let parse_err = |s: &str| Error::InvalidInput(format!("bad number {s:?} in dump"));
    let nx: usize = fields[0].parse().map_err(|_| parse_err(fields[0]))?;
    let ny: usize = fields[1].parse().map_err(|_| parse_err(fields[1]))?;
    let l: f64 = fields[2].parse().map_err(|_| parse_err(fields[2]))?;
    let m: f64 = fields[3].parse().map_err(|_| parse_err(fields[3]))?;
    let mut values = Vec::with_capacity((nx + 1) * (ny + 1));
    for line in lines {
        let line = line.map_err(|e| Error::InvalidInput(e.to_string()))?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| parse_err(s)))
            .collect::<Result<_>>()?;
        if row.is_empty() {
            continue;
        }
        if row.len() != nx + 1 {
            return invalid(format!(
                "dump row has {} values, expected {}",
                row.len(),
                nx + 1
            ));
        }
        values.extend(row);
    }
    if values.len() != (nx + 1) * (ny + 1) {
        return invalid("dump has the wrong number of rows");
    }
    Ok((nx, ny, l, m, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn film_grid_lines() {
        let g = Grid::film(1.0, 1.0, 8, 255).unwrap();
        assert_eq!(g.substrate_top_row(), Some(85));
        assert_eq!(g.cap_row(), Some(170));
        assert!(Grid::film(1.0, 1.0, 8, 256).is_err());
        assert!(Grid::film(1.0, 1.0, 1, 6).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_bilinear() {
        let g = Grid::rect((0.0, 2.0), (-1.0, 1.0), 4, 5).unwrap();
        let f = |p: Point| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1];
        let vals = PhaseField::from_fn(&g, f);
        for p in [[0.3, 0.2], [1.99, -0.97], [2.0, 1.0], [0.0, -1.0]] {
            assert!((g.interpolate(vals.values(), p) - f(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn dump_round_trip() {
        let g = Grid::film(1.0, 1.0, 3, 6).unwrap();
        let v = PhaseField::from_fn(&g, |p| p[0] * 0.1 + p[1] / 3.0);
        let mut buf = Vec::new();
        write_dump(&mut buf, &g, v.values()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# 3 6 1 1\n"));
        let (nx, ny, l, m, vals) = read_dump(&buf[..]).unwrap();
        assert_eq!((nx, ny, l, m), (3, 6, 1.0, 1.0));
        assert_eq!(vals, v.values());
    }

    #[test]
    fn admissibility_checks() {
        let g = Grid::film(1.0, 1.0, 2, 12).unwrap();
        let ok = PhaseField::from_fn(&g, |p| (1.0 - p[1]).clamp(0.0, 1.0));
        assert!(ok.is_admissible());
        let mut bad = ok.clone();
        let n = g.node(1, 6);
        bad.values_mut()[n] = 0.9;
        assert_eq!(
            bad.check_admissible(),
            Err(Error::NonMonotone { column: 1 })
        );
        let mut band = ok.clone();
        band.values_mut()[g.node(0, 0)] = 0.5;
        assert!(matches!(
            band.check_admissible(),
            Err(Error::Inadmissible(_))
        ));
    }
}
