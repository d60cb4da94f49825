use crate::elastic::ElasticDensity;
use crate::error::{Error, Result};
use crate::grid::{DisplacementField, Grid, PhaseField};

use super::energy::cell_value_gradient;
use super::{ElasticBoundary, PhaseParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    /// Final residual relative to the right-hand side.
    pub residual: f64,
}

fn fixed_mask(g: &Grid, boundary: ElasticBoundary) -> Result<Vec<bool>> {
    let mut fixed = vec![false; g.node_count()];
    if let Some(top) = g.substrate_top_row() {
        for j in 0..=top {
            for i in 0..g.nodes_x() {
                fixed[g.node(i, j)] = true;
            }
        }
    } else if boundary == ElasticBoundary::Substrate {
        return Err(Error::Precondition(
            "substrate conditions need a film grid".to_string(),
        ));
    }
    if boundary == ElasticBoundary::Clamped {
        for j in 0..g.nodes_y() {
            fixed[g.node(0, j)] = true;
            fixed[g.node(g.nx(), j)] = true;
        }
        for i in 0..g.nodes_x() {
            fixed[g.node(i, 0)] = true;
            fixed[g.node(i, g.ny())] = true;
        }
    }
    Ok(fixed)
}

/// Gradient of `Σ_c w_c |c| f(∇u_c)` with respect to the nodal values.
fn elastic_gradient(
    g: &Grid,
    u: &[[f64; 2]],
    weights: &[f64],
    density: &ElasticDensity,
    out: &mut [[f64; 2]],
) {
    out.iter_mut().for_each(|x| *x = [0.0; 2]);
    let area = g.cell_area();
    let (cx, cy) = (0.5 / g.hx(), 0.5 / g.hy());
    let mut c = 0;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let w = weights[c] * area;
            c += 1;
            let s = density.stress(&crate::grid::cell_gradient(g, u, i, j));
            let [n00, n10, n01, n11] = g.cell_nodes(i, j);
            for a in 0..2 {
                let sx = w * s[a][0] * cx;
                let sy = w * s[a][1] * cy;
                out[n00][a] += -sx - sy;
                out[n10][a] += sx - sy;
                out[n01][a] += -sx + sy;
                out[n11][a] += sx + sy;
            }
        }
    }
}

fn diagonal(g: &Grid, weights: &[f64], density: &ElasticDensity) -> Vec<[f64; 2]> {
    let mut d = vec![[0.0; 2]; g.node_count()];
    let area = g.cell_area();
    let (cx, cy) = (0.5 / g.hx(), 0.5 / g.hy());
    let mut c = 0;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let w = weights[c] * area;
            c += 1;
            let nodes = g.cell_nodes(i, j);
            let signs = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)];
            for (n, (sx, sy)) in nodes.iter().zip(signs) {
                for a in 0..2 {
                    let mut z = [[0.0; 2]; 2];
                    z[a][0] = sx * cx;
                    z[a][1] = sy * cy;
                    // the Hessian of a quadratic density satisfies ζ:Hζ = 2 f(ζ)
                    d[*n][a] += w * 2.0 * density.eval_unchecked(&z);
                }
            }
        }
    }
    d
}

fn dot(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x[0] * y[0] + x[1] * y[1])
        .sum()
}

/// Minimizes `∫ (v² + η) f(e(u))` over `u` with `u = u₀` on the Dirichlet
/// nodes, by Jacobi-preconditioned conjugate gradients warm-started at `init`.
pub fn solve_u(
    init: &DisplacementField,
    v: &PhaseField,
    params: &PhaseParams,
    density: &ElasticDensity,
    u0: &DisplacementField,
) -> Result<(DisplacementField, CgStats)> {
    if !density.is_quadratic() || !matches!(density, ElasticDensity::Hooke { .. }) {
        return Err(Error::Precondition(
            "the elastic solver needs the quadratic Hooke density (p = 2)".to_string(),
        ));
    }
    let g = v.grid();
    g.same_as(init.grid())?;
    g.same_as(u0.grid())?;
    let fixed = fixed_mask(g, params.boundary)?;
    let vals = v.values();
    let mut weights = Vec::with_capacity(g.cell_count());
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let (m, _, _) = cell_value_gradient(g, vals, i, j);
            weights.push(m * m + params.eta);
        }
    }

    let n = g.node_count();
    let mut x: Vec<[f64; 2]> = init.values().to_vec();
    for k in 0..n {
        if fixed[k] {
            x[k] = u0.values()[k];
        }
    }
    let mask = |r: &mut [[f64; 2]]| {
        for k in 0..n {
            if fixed[k] {
                r[k] = [0.0; 2];
            }
        }
    };

    // right-hand side scale: K applied to the Dirichlet lift alone
    let mut lift = x.clone();
    for k in 0..n {
        if !fixed[k] {
            lift[k] = [0.0; 2];
        }
    }
    let mut tmp = vec![[0.0; 2]; n];
    elastic_gradient(g, &lift, &weights, density, &mut tmp);
    mask(&mut tmp);
    let b_norm = dot(&tmp, &tmp).sqrt();

    let mut r = vec![[0.0; 2]; n];
    elastic_gradient(g, &x, &weights, density, &mut r);
    r.iter_mut().for_each(|e| *e = [-e[0], -e[1]]);
    mask(&mut r);

    let diag = diagonal(g, &weights, density);
    let precond = |r: &[[f64; 2]], z: &mut [[f64; 2]]| {
        for k in 0..n {
            for a in 0..2 {
                z[k][a] = if fixed[k] || diag[k][a] <= 0.0 {
                    0.0
                } else {
                    r[k][a] / diag[k][a]
                };
            }
        }
    };
    let scale = if b_norm > 0.0 { b_norm } else { 1.0 };
    let target = params.tol_cg * scale;

    let mut z = vec![[0.0; 2]; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt();
    let mut it = 0;
    let mut ap = vec![[0.0; 2]; n];
    while res > target {
        if it >= params.max_cg {
            return Err(Error::NotConverged {
                iterations: it,
                residual: res / scale,
            });
        }
        elastic_gradient(g, &p, &weights, density, &mut ap);
        mask(&mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            for a in 0..2 {
                x[k][a] += alpha * p[k][a];
                r[k][a] -= alpha * ap[k][a];
            }
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            for a in 0..2 {
                p[k][a] = z[k][a] + beta * p[k][a];
            }
        }
        res = dot(&r, &r).sqrt();
        it += 1;
    }
    Ok((
        DisplacementField::new(g.clone(), x)?,
        CgStats {
            iterations: it,
            residual: res / scale,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasefield::energy_geps;

    fn params(boundary: ElasticBoundary) -> PhaseParams {
        let mut p = PhaseParams::new(0.1, 2.0).unwrap();
        p.boundary = boundary;
        p.tol_cg = 1e-12;
        p
    }

    #[test]
    fn clamped_patch_test() {
        let g = Grid::film(1.0, 1.0, 16, 30).unwrap();
        let a = [[0.02, 0.01], [0.01, -0.03]];
        let affine = DisplacementField::from_fn(&g, |p| {
            [
                a[0][0] * p[0] + a[0][1] * p[1],
                a[1][0] * p[0] + a[1][1] * p[1],
            ]
        });
        let v = PhaseField::from_fn(&g, |_| 1.0);
        let d = ElasticDensity::hooke(1.0, 0.5).unwrap();
        let (u, stats) = solve_u(
            &DisplacementField::zeros(&g),
            &v,
            &params(ElasticBoundary::Clamped),
            &d,
            &affine,
        )
        .unwrap();
        let err = u
            .values()
            .iter()
            .zip(affine.values())
            .map(|(x, y)| (x[0] - y[0]).abs().max((x[1] - y[1]).abs()))
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err} after {} iterations", stats.iterations);
    }

    #[test]
    fn zero_datum_gives_zero() {
        let g = Grid::film(1.0, 1.0, 8, 12).unwrap();
        let v = PhaseField::from_fn(&g, |p| if p[1] <= 0.0 { 1.0 } else { 0.0 });
        let d = ElasticDensity::hooke(1.0, 1.0).unwrap();
        let z = DisplacementField::zeros(&g);
        let (u, _) = solve_u(&z, &v, &params(ElasticBoundary::Substrate), &d, &z).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn mismatch_energy_beats_extension_by_zero() {
        let g = Grid::film(1.0, 1.0, 16, 30).unwrap();
        let delta = 0.1;
        let u0 = DisplacementField::from_fn(&g, |p| {
            if p[1] <= 0.0 {
                [delta * p[0], 0.0]
            } else {
                [0.0, 0.0]
            }
        });
        let v = PhaseField::from_fn(&g, |p| if p[1] <= 0.5 { 1.0 } else { 0.0 });
        let d = ElasticDensity::hooke(1.0, 1.0).unwrap();
        let pr = params(ElasticBoundary::Substrate);
        let (u, _) = solve_u(&u0, &v, &pr, &d, &u0).unwrap();
        let candidate = energy_geps(&u0, &v, &pr, &d).unwrap().elastic;
        let solved = energy_geps(&u, &v, &pr, &d).unwrap().elastic;
        assert!(solved <= candidate, "{solved} > {candidate}");
    }

    #[test]
    fn power_density_rejected() {
        let g = Grid::film(1.0, 1.0, 4, 6).unwrap();
        let v = PhaseField::from_fn(&g, |_| 1.0);
        let z = DisplacementField::zeros(&g);
        let d = ElasticDensity::power(1.0, 3.0).unwrap();
        assert!(matches!(
            solve_u(&z, &v, &params(ElasticBoundary::Substrate), &d, &z),
            Err(Error::Precondition(_))
        ));
    }
}
