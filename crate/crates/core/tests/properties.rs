use proptest::prelude::*;
use sfl::metric::point_distance;
use sfl::{dbar, ElasticDensity, ExtValue, ExtendedField, Grid, Profile, SurfaceNorm};

fn ext() -> impl Strategy<Value = ExtValue> {
    prop_oneof![
        4 => (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(a, b)| ExtValue::Finite([a, b])),
        1 => Just(ExtValue::Infinite),
    ]
}

fn field(grid: &Grid) -> impl Strategy<Value = ExtendedField> {
    let grid = grid.clone();
    prop::collection::vec(ext(), grid.node_count())
        .prop_map(move |v| ExtendedField::new(grid.clone(), v).unwrap())
}

fn small_grid() -> Grid {
    Grid::rect((0.0, 1.0), (0.0, 1.0), 3, 3).unwrap()
}

fn matrix() -> impl Strategy<Value = [[f64; 2]; 2]> {
    prop::array::uniform2(prop::array::uniform2(-3.0..3.0f64))
}

proptest! {
    #[test]
    fn chordal_distance_is_a_bounded_metric(a in ext(), b in ext(), c in ext()) {
        let ab = point_distance(a, b);
        prop_assert!(ab >= 0.0 && ab <= 2.0 + 1e-12);
        prop_assert!((ab - point_distance(b, a)).abs() < 1e-12);
        prop_assert!(ab <= point_distance(a, c) + point_distance(c, b) + 1e-12);
        prop_assert_eq!(point_distance(a, a), 0.0);
    }

    #[test]
    fn dbar_is_a_pseudometric(
        (u, w, z) in (field(&small_grid()), field(&small_grid()), field(&small_grid()))
    ) {
        let uw = dbar(&u, &w).unwrap();
        prop_assert!((uw - dbar(&w, &u).unwrap()).abs() < 1e-12);
        prop_assert_eq!(dbar(&u, &u).unwrap(), 0.0);
        prop_assert!(uw <= dbar(&u, &z).unwrap() + dbar(&z, &w).unwrap() + 1e-12);
        prop_assert!(uw <= 2.0 * small_grid().area() + 1e-12);
    }

    #[test]
    fn energy_ignores_skew_part(z in matrix(), s in -3.0..3.0f64, mu in 0.1..5.0f64, lambda in 0.0..5.0f64) {
        let skewed = [[z[0][0], z[0][1] + s], [z[1][0] - s, z[1][1]]];
        let hooke = ElasticDensity::hooke(mu, lambda).unwrap();
        let a = hooke.eval(&z).unwrap();
        prop_assert!((a - hooke.eval(&skewed).unwrap()).abs() <= 1e-10 * (1.0 + a));
        let power = ElasticDensity::power(mu, 1.5).unwrap();
        let b = power.eval(&z).unwrap();
        prop_assert!((b - power.eval(&skewed).unwrap()).abs() <= 1e-10 * (1.0 + b));
    }

    #[test]
    fn norm_pairing_obeys_the_dual_inequality(
        nu in prop::array::uniform2(-5.0..5.0f64),
        xi in prop::array::uniform2(-5.0..5.0f64),
        q in 1.1..6.0f64,
        w in prop::array::uniform2(0.2..3.0f64),
        t in 0.01..10.0f64,
    ) {
        let norm = SurfaceNorm::weighted_lq(q, w).unwrap();
        let pairing = nu[0] * xi[0] + nu[1] * xi[1];
        prop_assert!(pairing <= norm.phi(nu) * norm.dual(xi) * (1.0 + 1e-10) + 1e-12);
        let scaled = [t * nu[0], t * nu[1]];
        prop_assert!((norm.phi(scaled) - t * norm.phi(nu)).abs() <= 1e-10 * (1.0 + t * norm.phi(nu)));
    }

    #[test]
    fn densities_are_homogeneous(z in matrix(), t in 0.01..10.0f64, p in 1.1..4.0f64) {
        let hooke = ElasticDensity::hooke(1.3, 0.7).unwrap();
        let tz = [[t * z[0][0], t * z[0][1]], [t * z[1][0], t * z[1][1]]];
        let a = hooke.eval(&z).unwrap();
        prop_assert!((hooke.eval(&tz).unwrap() - t * t * a).abs() <= 1e-10 * (1.0 + t * t * a));
        let power = ElasticDensity::power(2.0, p).unwrap();
        let b = power.eval(&z).unwrap();
        prop_assert!((power.eval(&tz).unwrap() - t.powf(p) * b).abs() <= 1e-9 * (1.0 + t.powf(p) * b));
    }

    #[test]
    fn graph_length_scales_under_dilation(
        hs in prop::collection::vec(0.0..2.0f64, 2..7),
        t in 0.1..10.0f64,
    ) {
        let n = hs.len();
        let xs: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let unit = Profile::smooth(xs.clone(), hs.clone()).unwrap();
        let big = Profile::smooth(xs.iter().map(|x| t * x).collect(), hs.iter().map(|h| t * h).collect()).unwrap();
        prop_assert!((big.arc_length() - t * unit.arc_length()).abs() <= 1e-12 * (1.0 + big.arc_length()));
        prop_assert!((big.integral() - t * t * unit.integral()).abs() <= 1e-12 * (1.0 + big.integral()));
        prop_assert!(unit.arc_length() >= 1.0 - 1e-12);
    }

    #[test]
    fn l1_distance_matches_integral_for_ordered_profiles(
        hs in prop::collection::vec(0.0..0.5f64, 2..6),
        lift in 0.0..0.5f64,
    ) {
        let n = hs.len();
        let xs: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let lower = Profile::smooth(xs.clone(), hs.clone()).unwrap();
        let upper = Profile::smooth(xs, hs.iter().map(|h| h + lift).collect()).unwrap();
        prop_assert!((lower.l1_distance(&upper) - lift).abs() < 1e-12);
        prop_assert!((upper.integral() - lower.integral() - lift).abs() < 1e-12);
    }
}
