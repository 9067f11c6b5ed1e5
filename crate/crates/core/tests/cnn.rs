use tplcnn_core::cnn::{cnn_run, CnnTemplate};
use tplcnn_core::Grid;

/// Closed form of `dx/dt = -x + 2 sat(x)` for one uncoupled cell.
fn bistable_exact(x0: f64, t: f64) -> f64 {
    let s = x0.signum();
    let a = x0.abs();
    if a >= 1.0 {
        return s * (2.0 - (2.0 - a) * (-t).exp());
    }
    if a == 0.0 {
        return 0.0;
    }
    let t1 = (1.0 / a).ln();
    if t <= t1 {
        s * a * t.exp()
    } else {
        s * (2.0 - (-(t - t1)).exp())
    }
}

#[test]
fn bistable_cells_match_the_scalar_solution() {
    let x0 = Grid::from_vec(2, 3, vec![0.3, -0.05, 0.8, -0.9, 1.5, -0.6]).unwrap();
    let u = Grid::filled(2, 3, 0.0);
    let t_end = 6.0;
    let run = cnn_run(&x0, &u, &CnnTemplate::center(2.0, 0.0, 0.0), 1e-3, t_end, 1e-14).unwrap();
    assert!(!run.converged);
    for (x, &start) in run.x.iter().zip(x0.iter()) {
        let want = bistable_exact(start, t_end);
        assert!((x - want).abs() < 1e-6, "x0={start}: {x} vs {want}");
    }
}

#[test]
fn bistable_cells_settle_at_plus_minus_two() {
    let x0 = Grid::from_vec(1, 4, vec![0.2, -0.2, 0.01, -1.3]).unwrap();
    let u = Grid::filled(1, 4, 0.0);
    let run = cnn_run(&x0, &u, &CnnTemplate::center(2.0, 0.0, 0.0), 0.01, 100.0, 1e-9).unwrap();
    assert!(run.converged);
    let want = [2.0, -2.0, 2.0, -2.0];
    for (x, w) in run.x.iter().zip(want) {
        assert!((x - w).abs() < 1e-8);
    }
}

#[test]
fn decay_without_template() {
    let x0 = Grid::from_fn(3, 3, |r, c| (r as f64 - 1.0) * 0.7 + c as f64 * 0.2);
    let u = Grid::filled(3, 3, 0.0);
    let run = cnn_run(&x0, &u, &CnnTemplate::zero(), 0.01, 2.0, 1e-14).unwrap();
    for (x, &start) in run.x.iter().zip(x0.iter()) {
        assert!((x - start * (-2f64).exp()).abs() < 1e-9);
    }
}

#[test]
fn input_drive_sets_the_fixed_point() {
    let u = Grid::from_fn(4, 4, |r, c| ((r + c) % 3) as f64 * 0.1);
    let x0 = Grid::filled(4, 4, 0.0);
    let run = cnn_run(&x0, &u, &CnnTemplate::center(0.0, 1.5, -0.2), 0.05, 60.0, 1e-10).unwrap();
    assert!(run.converged);
    for (x, &ui) in run.x.iter().zip(u.iter()) {
        assert!((x - (1.5 * ui - 0.2)).abs() < 1e-9);
    }
}

fn smooth_case(dt: f64) -> Grid<f64> {
    let mut t = CnnTemplate::zero();
    t.a = [[0.05, 0.1, 0.05], [0.1, 0.6, 0.1], [0.05, 0.1, 0.05]];
    t.b = [[0.0, 0.1, 0.0], [0.1, 0.2, 0.1], [0.0, 0.1, 0.0]];
    t.z = 0.05;
    let x0 = Grid::from_fn(5, 5, |r, c| 0.1 * ((r * 5 + c) % 7) as f64 - 0.3);
    let u = Grid::from_fn(5, 5, |r, c| if (r + c) % 2 == 0 { 0.4 } else { -0.2 });
    cnn_run(&x0, &u, &t, dt, 1.0, 1e-14).unwrap().x
}

#[test]
fn rk4_error_shrinks_sixteenfold_when_step_halves() {
    let reference = smooth_case(1e-4);
    assert!(reference.iter().all(|x| x.abs() < 1.0), "left the linear region");
    let err = |dt: f64| {
        smooth_case(dt)
            .iter()
            .zip(reference.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    };
    let ratio = err(0.2) / err(0.1);
    assert!((ratio - 16.0).abs() <= 4.0, "ratio {ratio}");
}
