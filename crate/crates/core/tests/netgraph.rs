mod common;

use common::{connected, jacobi_eigenvalues, lambda2, RefChannel};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::RngExt;
use relaynet::channel::{ChannelCurve, ChannelParams};
use relaynet::geometry::Point;
use relaynet::netgraph::*;

fn defaults() -> ChannelCurve {
    ChannelCurve::new(ChannelParams::default()).unwrap()
}

fn graph(n: usize, edges: &[(usize, usize, f64)]) -> RateGraph {
    let mut w = DMatrix::zeros(n, n);
    for &(i, j, x) in edges {
        w[(i, j)] = x;
    }
    RateGraph::from_weights(w)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[test]
fn analytic_spectra() {
    let w = 0.37;
    assert!((algebraic_connectivity(&graph(2, &[(0, 1, w)])) - 2.0 * w).abs() < 1e-12);
    let tri = graph(3, &[(0, 1, w), (1, 2, w), (0, 2, w)]);
    assert!((algebraic_connectivity(&tri) - 3.0 * w).abs() < 1e-12);
    let path = graph(3, &[(0, 1, w), (1, 2, w)]);
    assert!((algebraic_connectivity(&path) - w).abs() < 1e-12);
    let split = graph(4, &[(0, 1, w), (2, 3, w)]);
    assert_eq!(algebraic_connectivity(&split), 0.0);
    assert!(!is_connected(&split));
}

#[test]
fn trivial_connectivity_cases() {
    let c = defaults();
    assert!(is_connected(&RateGraph::from_positions(&[Point::ORIGIN], &c)));
    let far = Point::new(c.cutoff_distance_m + 0.1, 0.0);
    let g = RateGraph::from_positions(&[Point::ORIGIN, far], &c);
    assert!(!is_connected(&g));
    assert_eq!(g.weight(0, 1), 0.0);
    let chain: Vec<Point> = (0..8).map(|i| Point::new(i as f64 * c.cutoff_distance_m / 2.0, 0.0)).collect();
    assert!(positions_connected(&chain, &c));
}

#[test]
fn adjacency_orders_tasks_first() {
    let c = defaults();
    let cfg = TeamConfig::new(vec![Point::ORIGIN, Point::new(10.0, 0.0)], vec![Point::new(0.0, 5.0)]).unwrap();
    let g = adjacency(&cfg, &c);
    assert_eq!(g.size(), 3);
    assert_eq!(g.weight(0, 2), c.rate(5.0));
    assert_eq!(g.weight(1, 0), c.rate(10.0));
}

#[test]
fn team_validation() {
    assert!(matches!(TeamConfig::new(vec![Point::ORIGIN], vec![]), Err(TeamError::TooFewTasks(1))));
    assert!(TeamConfig::new(vec![Point::ORIGIN, Point::new(f64::NAN, 0.0)], vec![]).is_err());
}

#[test]
fn min_power_examples() {
    let p = ChannelParams::default();
    let dc = defaults().cutoff_distance_m;
    let near = TeamConfig::new(vec![Point::ORIGIN, Point::new(10.0, 0.0)], vec![]).unwrap();
    assert_eq!(min_connecting_power(&near, &p, 30.0).unwrap(), Some(0.0));

    let d = 1.1 * dc;
    let pair = TeamConfig::new(vec![Point::ORIGIN, Point::new(d, 0.0)], vec![]).unwrap();
    let got = min_connecting_power(&pair, &p, 30.0).unwrap().unwrap();
    let expected = 2.52 * 10.0 * 1.1f64.log10();
    assert!((got - expected).abs() <= 0.02, "{got} vs {expected}");

    let hopeless = TeamConfig::new(vec![Point::ORIGIN, Point::new(100.0 * dc, 0.0)], vec![]).unwrap();
    assert_eq!(min_connecting_power(&hopeless, &p, 10.0).unwrap(), None);
}

#[test]
fn rates_match_reference_channel() {
    let c = defaults();
    let r = RefChannel::defaults(0.0).curve();
    for i in 0..400 {
        let d = i as f64 * 0.1;
        assert!((c.rate(d) - r.rate(d)).abs() < 1e-7, "{d}");
    }
}

#[test]
fn lambda2_matches_jacobi_on_random_teams() {
    let c = defaults();
    let mut rng = common::rng(3);
    for _ in 0..300 {
        let n = rng.random_range(2..=6);
        let pts = common::random_points(&mut rng, n, 25.0);
        let g = RateGraph::from_positions(&pts, &c);
        let w = rows(g.weights());
        let ours = algebraic_connectivity(&g);
        assert!((ours - lambda2(&w)).abs() < 1e-8);
        assert_eq!(is_connected(&g), connected(&w));
        assert_eq!(ours > CONNECTIVITY_TOLERANCE, is_connected(&g));
    }
}

proptest! {
    #[test]
    fn laplacian_rows_sum_to_zero_and_psd(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = common::rng(seed);
        let pts = common::random_points(&mut rng, n, 30.0);
        let g = RateGraph::from_positions(&pts, &defaults());
        let l = laplacian(&g);
        for i in 0..n {
            prop_assert!(l.row(i).sum().abs() < 1e-12);
            prop_assert_eq!(g.weight(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(g.weight(i, j), g.weight(j, i));
                prop_assert!((0.0..=1.0).contains(&g.weight(i, j)));
            }
        }
        prop_assert!(jacobi_eigenvalues(&rows(&l))[0] >= -1e-10);
    }

    #[test]
    fn more_power_never_lowers_connectivity(seed in any::<u64>(), n in 2usize..7, pt in -10.0f64..20.0) {
        let mut rng = common::rng(seed);
        let pts = common::random_points(&mut rng, n, 40.0);
        let base = ChannelParams::default().with_transmit_power(pt);
        let lo = positions_connectivity(&pts, &ChannelCurve::new(base).unwrap());
        let hi = positions_connectivity(&pts, &ChannelCurve::new(base.with_transmit_power(pt + 1.0)).unwrap());
        prop_assert!(hi >= lo - 1e-10);
    }

    #[test]
    fn min_power_is_a_threshold(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = common::rng(seed);
        let pts = common::random_points(&mut rng, n, 60.0);
        let p = ChannelParams::default();
        if let Some(found) = min_connecting_power_for(&pts, &p, 30.0).unwrap() {
            let at = |dbm: f64| positions_connected(&pts, &ChannelCurve::new(p.with_transmit_power(dbm)).unwrap());
            prop_assert!(at(found));
            if found > p.transmit_power_dbm {
                prop_assert!(!at(found - 0.02));
            }
        }
    }
}
