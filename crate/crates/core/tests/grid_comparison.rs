use deadcore::grid::{
    lipschitz_estimate, ring_operator, rotation_invariance_check, solve, DiscGrid, GridConfig, NodeKind,
};
use deadcore::model::{eval_nonlinearity, ModelSpec};

fn spec() -> ModelSpec {
    ModelSpec::hardy_henon(0.5, 1.0, 0.0, 1.0)
}

fn boundary(p: [f64; 2]) -> f64 {
    0.6 + 0.2 * p[0] - 0.1 * p[1]
}

/// Undamped Jacobi with bisection nodal solves, started from `start`.
fn brute_force(grid: &DiscGrid, spec: &ModelSpec, shift: f64, start: f64) -> Vec<f64> {
    let mut g = grid.clone();
    g.apply_boundary(&boundary);
    let interior = g.interior_nodes();
    for &i in &interior {
        g.values[i] = start;
    }
    for _ in 0..20_000 {
        let old = g.values.clone();
        let mut change = 0.0f64;
        for &i in &interior {
            let arms: Vec<(f64, f64)> = g
                .arms(i)
                .iter()
                .map(|a| (a.node.map_or(a.value, |j| old[j]), a.len))
                .collect();
            let r = g.distance_to_center(i);
            let f = |u: f64| ring_operator(spec.beta, u, &arms) - eval_nonlinearity(spec, r, u).unwrap() - shift;
            let (mut lo, mut hi) = (-10.0, 10.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let next = 0.5 * (lo + hi);
            change = change.max((next - old[i]).abs());
            g.values[i] = next;
        }
        if change < 1e-14 {
            break;
        }
    }
    g.values
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn brute_force_oracle_on_nine_by_nine() {
    let grid = DiscGrid::with_nodes([0.0, 0.0], 1.0, 9, 2).unwrap();
    let spec = spec();
    let from_above = brute_force(&grid, &spec, 0.0, 2.0);
    let from_below = brute_force(&grid, &spec, 0.0, 0.0);
    assert!(max_gap(&from_above, &from_below) < 1e-10);
    let sol = solve(&spec, grid.clone(), &boundary, 0.0, &GridConfig::default()).unwrap();
    assert!(sol.converged);
    assert!(max_gap(&sol.grid.values, &from_above) < 1e-7);
}

#[test]
fn larger_source_shift_gives_smaller_solution() {
    let grid = DiscGrid::with_nodes([0.0, 0.0], 1.0, 9, 2).unwrap();
    let spec = spec();
    let base = brute_force(&grid, &spec, 0.0, 2.0);
    let shifted = brute_force(&grid, &spec, 0.3, 2.0);
    let sol = solve(&spec, grid.clone(), &boundary, 0.3, &GridConfig::default()).unwrap();
    assert!(max_gap(&sol.grid.values, &shifted) < 1e-7);
    let mut strict = false;
    for i in grid.interior_nodes() {
        assert!(shifted[i] <= base[i]);
        strict |= shifted[i] < base[i] - 1e-6;
    }
    assert!(strict);
}

#[test]
fn ordered_boundary_data_give_ordered_solutions() {
    let spec = ModelSpec::hardy_henon(0.0, 0.0, 0.0, 1.0);
    let run = |g: &dyn Fn([f64; 2]) -> f64| {
        let grid = DiscGrid::with_nodes([0.0, 0.0], 1.8, 33, 2).unwrap();
        solve(&spec, grid, g, 0.0, &GridConfig::default()).unwrap()
    };
    let low = run(&|p| 0.8 + 0.1 * p[0]);
    let high = run(&|p| 1.0 + 0.1 * p[0] + 0.05 * p[1] * p[1]);
    assert!(low.converged && high.converged);
    for i in low.grid.active_nodes() {
        assert!(low.grid.values[i] <= high.grid.values[i], "node {i}");
    }
}

#[test]
fn axis_rotation_is_exact_on_lattice() {
    let spec = ModelSpec::hardy_henon(0.0, 0.0, 0.0, 1.0);
    let grid = DiscGrid::with_nodes([0.0, 0.0], 1.8, 33, 2).unwrap();
    let sol = solve(&spec, grid, &|_| 1.0, 0.0, &GridConfig::default()).unwrap();
    assert!(rotation_invariance_check(&sol, &[std::f64::consts::FRAC_PI_2]) < 1e-9);
    let lip = lipschitz_estimate(&sol, 1.0);
    let eps = sol.grid.spacing;
    assert!(rotation_invariance_check(&sol, &[std::f64::consts::PI / 6.0]) <= 2.0 * eps * lip);
}

#[test]
fn lipschitz_estimate_is_stable_under_refinement() {
    let spec = ModelSpec::hardy_henon(0.0, 0.0, 0.0, 1.0);
    let lip = |n| {
        let grid = DiscGrid::with_nodes([0.0, 0.0], 1.8, n, 2).unwrap();
        let sol = solve(&spec, grid, &|_| 1.0, 0.0, &GridConfig::default()).unwrap();
        assert!(sol.converged);
        lipschitz_estimate(&sol, 1.0)
    };
    let (coarse, fine) = (lip(33), lip(65));
    let ratio = coarse.max(fine) / coarse.min(fine);
    assert!(ratio <= 1.2, "ratio {ratio}");
    // sup h′ = pτT^{p−1} = √2 for the unit datum
    assert!((fine - 2f64.sqrt()).abs() < 0.05 * 2f64.sqrt());
}

#[test]
fn boundary_nodes_lie_on_the_circle() {
    let grid = DiscGrid::with_nodes([0.5, -0.25], 2.0, 21, 2).unwrap();
    for i in 0..grid.kinds.len() {
        let r = grid.distance_to_center(i);
        match grid.kinds[i] {
            NodeKind::Interior => assert!(r < 2.0),
            NodeKind::Boundary => assert!((r - 2.0).abs() < 1e-9),
            NodeKind::Outside => assert!(r > 2.0),
        }
        for arm in grid.arms(i) {
            let p = arm.point;
            assert!(((p[0] - 0.5).hypot(p[1] + 0.25)) <= 2.0 + 1e-9);
        }
    }
}
