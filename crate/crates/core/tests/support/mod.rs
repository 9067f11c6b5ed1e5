pub mod dense;

use dense::DenseLattice;
use tplcnn_core::network::{Network, NetworkConfig, Pump};
use tplcnn_core::Grid;

pub struct Case {
    pub rows: usize,
    pub cols: usize,
    pub c: f64,
    pub bias: Vec<f64>,
    pub amplitude: f64,
    pub period: f64,
    pub cycles: u64,
}

/// Runs `case` on the banded network at `T_p / 64` and on the dense
/// reference at a further 64x finer step, cycle by cycle. Returns the
/// number of events, or the first disagreement.
pub fn compare_with_dense(case: &Case) -> Result<usize, String> {
    let mut cfg = NetworkConfig::uniform(
        case.rows,
        case.cols,
        0.0,
        Pump::new(case.amplitude, case.period),
        case.c,
    );
    cfg.bias = Grid::from_vec(case.rows, case.cols, case.bias.clone()).map_err(|e| e.to_string())?;
    cfg.time_step = case.period / 64.0;
    let mut net = Network::new(cfg.clone()).map_err(|e| e.to_string())?;
    let mut dense = DenseLattice::new(
        case.rows,
        case.cols,
        case.c,
        case.bias.clone(),
        case.amplitude,
        case.period,
    );
    let h = cfg.time_step / 64.0;
    let mut total = 0;
    for cycle in 0..case.cycles {
        let before = net.state().event_log.len();
        net.run_cycle().map_err(|e| e.to_string())?;
        let ours = &net.state().event_log[before..];
        let theirs = dense.run_cycle(cycle, h);
        let a: Vec<_> = ours.iter().map(|e| (e.cycle, e.row, e.col)).collect();
        let b: Vec<_> = theirs.iter().map(|e| (e.cycle, e.row, e.col)).collect();
        if a != b {
            return Err(format!("event sequence differs in cycle {cycle}: {a:?} vs {b:?}"));
        }
        for (x, y) in ours.iter().zip(&theirs) {
            if (x.time - y.time).abs() >= 1e-6 {
                return Err(format!("event time {} vs {}", x.time, y.time));
            }
        }
        let dv = dense.voltages();
        for (i, (x, y)) in net.voltages().iter().zip(&dv).enumerate() {
            if (x - y).abs() >= 1e-6 {
                return Err(format!("cycle {cycle} cell {i}: voltage {x} vs {y}"));
            }
        }
        total += ours.len();
    }
    Ok(total)
}

/// The lattices used by the oracle tests.
pub fn standard_cases() -> Vec<(&'static str, Case)> {
    vec![
        (
            "2x2 uneven bias",
            Case {
                rows: 2,
                cols: 2,
                c: 0.3,
                bias: vec![0.5, 0.62, 0.55, 0.7],
                amplitude: 0.3,
                period: 1.5,
                cycles: 30,
            },
        ),
        (
            "2x2 uniform bias",
            Case {
                rows: 2,
                cols: 2,
                c: 0.2,
                bias: vec![0.5; 4],
                amplitude: 0.3,
                period: 1.55,
                cycles: 30,
            },
        ),
        (
            "3x3 strong coupling",
            Case {
                rows: 3,
                cols: 3,
                c: 0.8,
                bias: vec![0.45, 0.6, 0.5, 0.7, 0.55, 0.65, 0.5, 0.58, 0.62],
                amplitude: 0.25,
                period: 1.2,
                cycles: 25,
            },
        ),
        (
            "3x3 weak coupling",
            Case {
                rows: 3,
                cols: 3,
                c: 0.05,
                bias: (0..9).map(|i| 0.5 + 0.03 * i as f64).collect(),
                amplitude: 0.3,
                period: 0.9,
                cycles: 25,
            },
        ),
    ]
}
