use crate::error::{invalid, Error, Result};
use crate::grid::PhaseField;
use crate::profile::Profile;

/// `ṽ = 0 ∨ (v − δ x_d) ∧ 1`, which makes columns strictly decreasing
/// wherever `0 < ṽ < 1`.
pub fn tilt(v: &PhaseField, delta: f64) -> PhaseField {
    let g = v.grid();
    let mut out = v.clone();
    for j in 0..g.nodes_y() {
        let y = g.y(j);
        for i in 0..g.nodes_x() {
            let k = g.node(i, j);
            out.values_mut()[k] = (v.values()[k] - delta * y).clamp(0.0, 1.0);
        }
    }
    out
}

/// The profile whose subgraph is the superlevel set `{v > s}`:
/// `h(x′) = sup{x_d ∈ [0, M] : v(x′, x_d) > s}` per column, with linear
/// interpolation across the first crossing.
pub fn extract_profile(v: &PhaseField, s: f64, tilt_by: Option<f64>) -> Result<Profile> {
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("superlevel must lie in (0, 1), got {s}"));
    }
    let tilted;
    let v = match tilt_by {
        Some(d) => {
            tilted = tilt(v, d);
            &tilted
        }
        None => v,
    };
    let g = v.grid();
    let (Some(j0), Some(cap)) = (g.substrate_top_row(), g.cap_row()) else {
        return Err(Error::Precondition(
            "profile extraction needs a film grid".to_string(),
        ));
    };
    let m = g.height_cap().unwrap_or(0.0);
    let mut xs = Vec::with_capacity(g.nodes_x());
    let mut hs = Vec::with_capacity(g.nodes_x());
    for i in 0..g.nodes_x() {
        for j in 0..g.ny() {
            if v.at(i, j + 1) > v.at(i, j) {
                return Err(Error::NonMonotone { column: i });
            }
        }
        let mut h = 0.0;
        if v.at(i, j0) > s {
            h = m;
            for j in j0..cap {
                let (a, b) = (v.at(i, j), v.at(i, j + 1));
                if b <= s {
                    h = g.y(j) + (a - s) / (a - b) * g.hy();
                    break;
                }
            }
        }
        xs.push(g.x(i));
        hs.push(h.clamp(0.0, m));
    }
    Profile::smooth(xs, hs)
}

/// `∫_Ω |v − χ_{subgraph of h}|` by cell-midpoint quadrature, with the
/// subgraph including the substrate band.
pub fn l1_to_subgraph(v: &PhaseField, h: &Profile) -> f64 {
    let g = v.grid();
    let vals = v.values();
    let mut sum = 0.0;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let [a, b, c, d] = g.cell_nodes(i, j);
            let mid = 0.25 * (vals[a] + vals[b] + vals[c] + vals[d]);
            let [x, y] = g.cell_center(i, j);
            let chi = if y < h.eval(x) { 1.0 } else { 0.0 };
            sum += (mid - chi).abs();
        }
    }
    sum * g.cell_area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn linear_column_crossings() {
        let g = Grid::film(1.0, 1.0, 4, 30).unwrap();
        let v = PhaseField::from_fn(&g, |p| (1.0 - p[1]).clamp(0.0, 1.0));
        for s in [0.1, 0.5, 0.9] {
            let h = extract_profile(&v, s, None).unwrap();
            for x in [0.0, 0.5, 1.0] {
                assert!((h.eval(x) - (1.0 - s)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sharp_field_recovers_height() {
        let g = Grid::film(1.0, 1.0, 4, 30).unwrap();
        let v = PhaseField::from_fn(&g, |p| if p[1] <= 0.4 + 1e-12 { 1.0 } else { 0.0 });
        for s in [0.1, 0.5, 0.9] {
            let h = extract_profile(&v, s, None).unwrap();
            assert!((h.eval(0.5) - 0.4).abs() <= g.hy());
        }
        let lo = extract_profile(&v, 0.9, None).unwrap();
        let hi = extract_profile(&v, 0.1, None).unwrap();
        assert!(lo
            .pieces()
            .iter()
            .zip(hi.pieces())
            .all(|(a, b)| a.h0 <= b.h0));
    }

    #[test]
    fn non_monotone_column_rejected() {
        let g = Grid::film(1.0, 1.0, 4, 30).unwrap();
        let mut v = PhaseField::from_fn(&g, |p| (1.0 - p[1]).clamp(0.0, 1.0));
        let n = g.node(1, 15);
        v.values_mut()[n] = 1.0;
        assert_eq!(
            extract_profile(&v, 0.5, None),
            Err(Error::NonMonotone { column: 1 })
        );
    }
}
