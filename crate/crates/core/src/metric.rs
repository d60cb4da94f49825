//! Fields with values in the one-point compactification `R² ∪ {∞}` and the
//! bounded metric `d̄(u, w) = ∫_Ω |ψ(u) − ψ(w)| dx`, where `ψ` is the inverse
//! stereographic projection onto the unit sphere `S² ⊂ R³` (`ψ(∞)` is the
//! north pole `e₃`, `ψ(0)` the south pole).

use crate::error::{invalid, Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtValue {
    Finite([f64; 2]),
    Infinite,
}

impl ExtValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }
}

/// Inverse stereographic projection `R² ∪ {∞} → S²`.
pub fn psi(value: ExtValue) -> [f64; 3] {
    match value {
        ExtValue::Infinite => [0.0, 0.0, 1.0],
        ExtValue::Finite([x, y]) => {
            let r2 = x * x + y * y;
            if !r2.is_finite() {
                return [0.0, 0.0, 1.0];
            }
            let d = 1.0 + r2;
            [2.0 * x / d, 2.0 * y / d, (r2 - 1.0) / d]
        }
    }
}

/// Chordal distance `|ψ(a) − ψ(b)|`, at most 2.
pub fn point_distance(a: ExtValue, b: ExtValue) -> f64 {
    if a == b {
        return 0.0;
    }
    let p = psi(a);
    let q = psi(b);
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedField {
    grid: Grid,
    values: Vec<ExtValue>,
}

impl ExtendedField {
    pub fn new(grid: Grid, values: Vec<ExtValue>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return invalid(format!(
                "expected {} nodal values, got {}",
                grid.node_count(),
                values.len()
            ));
        }
        if values
            .iter()
            .any(|v| matches!(v, ExtValue::Finite(x) if !(x[0].is_finite() && x[1].is_finite())))
        {
            return Err(Error::NonFinite("extended field (use ExtValue::Infinite)"));
        }
        Ok(ExtendedField { grid, values })
    }

    pub fn constant(grid: &Grid, value: ExtValue) -> Self {
        ExtendedField {
            grid: grid.clone(),
            values: vec![value; grid.node_count()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[ExtValue] {
        &self.values
    }

    /// `false` exactly at the nodes carrying `∞`.
    pub fn finite_mask(&self) -> Vec<bool> {
        self.values.iter().map(ExtValue::is_finite).collect()
    }
}

/// `d̄(u, w)`: cell-midpoint quadrature of the bilinear interpolant of the
/// nodal distances `|ψ(u_k) − ψ(w_k)|`.
pub fn dbar(u: &ExtendedField, w: &ExtendedField) -> Result<f64> {
    u.grid.same_as(&w.grid)?;
    let g = &u.grid;
    let nodal: Vec<f64> = u
        .values
        .iter()
        .zip(&w.values)
        .map(|(a, b)| point_distance(*a, *b))
        .collect();
    let mut sum = 0.0;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let [a, b, c, d] = g.cell_nodes(i, j);
            sum += 0.25 * (nodal[a] + nodal[b] + nodal[c] + nodal[d]);
        }
    }
    Ok(sum * g.cell_area())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid() -> Grid {
        // |Ω| = (1/3) * 3 = 1
        Grid::film(1.0 / 3.0, 1.0, 4, 6).unwrap()
    }

    #[test]
    fn poles_and_equator() {
        assert_eq!(psi(ExtValue::Finite([0.0, 0.0])), [0.0, 0.0, -1.0]);
        assert_eq!(psi(ExtValue::Infinite), [0.0, 0.0, 1.0]);
        assert_eq!(psi(ExtValue::Finite([1.0, 0.0])), [1.0, 0.0, 0.0]);
        let q = psi(ExtValue::Finite([3.0, -4.0]));
        assert!((q[0].powi(2) + q[1].powi(2) + q[2].powi(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dbar_examples() {
        let g = unit_grid();
        let zero = ExtendedField::constant(&g, ExtValue::Finite([0.0, 0.0]));
        let inf = ExtendedField::constant(&g, ExtValue::Infinite);
        let e1 = ExtendedField::constant(&g, ExtValue::Finite([1.0, 0.0]));
        assert_eq!(dbar(&zero, &zero).unwrap(), 0.0);
        assert!((dbar(&zero, &inf).unwrap() - 2.0).abs() < 1e-12);
        assert!((dbar(&e1, &zero).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let other =
            ExtendedField::constant(&Grid::film(1.0, 1.0, 4, 6).unwrap(), ExtValue::Infinite);
        assert_eq!(dbar(&zero, &other), Err(Error::GridMismatch));
    }

    #[test]
    fn infinite_mask() {
        let g = unit_grid();
        let f = ExtendedField::constant(&g, ExtValue::Infinite);
        assert!(f.finite_mask().iter().all(|m| !m));
        assert!(ExtendedField::new(
            g.clone(),
            vec![ExtValue::Finite([f64::INFINITY, 0.0]); g.node_count()]
        )
        .is_err());
    }
}
