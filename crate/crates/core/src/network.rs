//! 2D lattice of tunnel-junction elements with nearest-neighbour
//! capacitive coupling.
//!
//! Cell charges obey `dq/dt = R^-1 (bias + v_pump(t) - v)` with
//! `v = C^-1 q (+ boundary)`, integrated with classical RK4 (every stage
//! sees freshly solved voltages). Threshold crossings are handled in time
//! order: the earliest crossing inside a step is located by bisection on the
//! step's continuous RK4 extension, the lattice is integrated up to it, the
//! crossing cells tunnel, any cell pushed over threshold fires in cascade
//! passes at the same instant, and integration restarts from there.

use alloc::vec;
use alloc::vec::Vec;

use crate::capacitance::{Boundary, CapacitanceOperator, Coupling};
use crate::element::{CROSSING_TOLERANCE, DEFAULT_STEPS_PER_CYCLE, DEFAULT_THRESHOLD};
use crate::math::{sin, PI};
use crate::tunneling::{HazardClock, StochasticTunneling};
use crate::{Error, Grid, Result};

/// Maximum cascade passes at one instant.
pub const MAX_CASCADE_PASSES: usize = 100;

/// Global AC pump shared by every cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pump {
    pub amplitude: f64,
    pub period: f64,
    pub phase: f64,
}

impl Pump {
    pub fn new(amplitude: f64, period: f64) -> Self {
        Pump {
            amplitude,
            period,
            phase: 0.0,
        }
    }

    #[inline]
    pub fn voltage(&self, t: f64) -> f64 {
        self.amplitude * sin(2.0 * PI * t / self.period + self.phase)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Per-cell dc bias (units of e/C).
    pub bias: Grid<f64>,
    pub pump: Pump,
    pub coupling: Coupling,
    pub boundary: Boundary,
    /// Per-cell series resistance.
    pub resistance: Grid<f64>,
    pub threshold: f64,
    pub time_step: f64,
    pub initial_charge: Grid<f64>,
    pub stochastic: Option<StochasticTunneling>,
}

impl NetworkConfig {
    /// Uniform lattice with open boundary, unit resistances, zero initial
    /// charge, the default threshold and `T_p / 256` steps.
    pub fn uniform(rows: usize, cols: usize, v_dc: f64, pump: Pump, coupling: f64) -> Self {
        NetworkConfig {
            bias: Grid::filled(rows, cols, v_dc),
            pump,
            coupling: Coupling::uniform(rows, cols, coupling),
            boundary: Boundary::Open,
            resistance: Grid::filled(rows, cols, 1.0),
            threshold: DEFAULT_THRESHOLD,
            time_step: pump.period / DEFAULT_STEPS_PER_CYCLE as f64,
            initial_charge: Grid::filled(rows, cols, 0.0),
            stochastic: None,
        }
    }

    pub fn rows(&self) -> usize {
        self.bias.rows()
    }

    pub fn cols(&self) -> usize {
        self.bias.cols()
    }

    pub fn validate(&self) -> Result<()> {
        let (rows, cols) = self.bias.dims();
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("lattice must have at least one cell"));
        }
        self.bias.check_dims(&self.resistance, "resistance")?;
        self.bias.check_dims(&self.initial_charge, "initial charge")?;
        self.coupling.validate(rows, cols)?;
        if self.resistance.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::invalid("resistances must be finite and > 0"));
        }
        if self.bias.iter().chain(self.initial_charge.iter()).any(|x| !x.is_finite()) {
            return Err(Error::invalid("bias and initial charge must be finite"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::invalid("threshold must be > 0"));
        }
        if !(self.time_step > 0.0) || !self.time_step.is_finite() {
            return Err(Error::invalid("time step must be > 0"));
        }
        if !(self.pump.period > 0.0) || !self.pump.period.is_finite() {
            return Err(Error::invalid("pump period must be > 0"));
        }
        if !(self.pump.amplitude >= 0.0) || !self.pump.phase.is_finite() {
            return Err(Error::invalid("pump amplitude must be >= 0"));
        }
        if let Some(s) = &self.stochastic {
            s.validate()?;
        }
        Ok(())
    }
}

pub fn build_capacitance_operator(config: &NetworkConfig) -> Result<CapacitanceOperator> {
    config.validate()?;
    CapacitanceOperator::new(config.rows(), config.cols(), &config.coupling, &config.boundary)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkEvent {
    pub cycle: u64,
    pub time: f64,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub charge: Grid<f64>,
    pub time: f64,
    /// Completed pump cycles.
    pub cycle_index: u64,
    pub tunneled_this_cycle: Grid<bool>,
    pub event_log: Vec<NetworkEvent>,
}

impl NetworkState {
    pub fn initial(config: &NetworkConfig) -> Self {
        NetworkState {
            charge: config.initial_charge.clone(),
            time: 0.0,
            cycle_index: 0,
            tunneled_this_cycle: Grid::filled(config.rows(), config.cols(), false),
            event_log: Vec::new(),
        }
    }
}

/// Solves `C v = q` (plus fixed-boundary terms) for the current charges.
pub fn voltages(state: &NetworkState, op: &CapacitanceOperator) -> Grid<f64> {
    let v = op.voltages(state.charge.as_slice());
    Grid::from_vec(state.charge.rows(), state.charge.cols(), v).expect("operator matches state")
}

/// Result of one integration step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub events: Vec<NetworkEvent>,
    /// Tunneled-this-cycle snapshot when the step closed a pump cycle.
    pub completed_cycle: Option<Grid<bool>>,
}

struct Workspace {
    k: [Vec<f64>; 4],
    w: [Vec<f64>; 4],
    stage: Vec<f64>,
    scratch: Vec<f64>,
    tmp: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            k: core::array::from_fn(|_| vec![0.0; n]),
            w: core::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
            scratch: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }
}

/// Continuous extension weights of classical RK4 at fraction `theta`.
#[inline]
fn dense_weights(theta: f64) -> [f64; 4] {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let mid = t2 - 2.0 * t3 / 3.0;
    [theta - 1.5 * t2 + 2.0 * t3 / 3.0, mid, mid, -0.5 * t2 + 2.0 * t3 / 3.0]
}

fn push_event(state: &mut NetworkState, cell: usize, time: f64, cycle: u64, out: &mut Vec<NetworkEvent>) {
    let cols = state.charge.cols();
    let ev = NetworkEvent {
        cycle,
        time,
        row: cell / cols,
        col: cell % cols,
    };
    state.tunneled_this_cycle.as_mut_slice()[cell] = true;
    state.event_log.push(ev);
    out.push(ev);
}

/// Fires every cell at or above threshold, one electron per cell per pass
/// in row-major order, re-solving between passes until none remain.
fn cascade(
    state: &mut NetworkState,
    voltage: &mut [f64],
    op: &CapacitanceOperator,
    threshold: f64,
    ws: &mut Workspace,
    out: &mut Vec<NetworkEvent>,
) -> Result<usize> {
    let mut fired = 0;
    let mut passes = 0;
    loop {
        let above: Vec<usize> = (0..voltage.len()).filter(|&i| voltage[i] >= threshold).collect();
        if above.is_empty() {
            return Ok(fired);
        }
        passes += 1;
        if passes > MAX_CASCADE_PASSES {
            return Err(Error::CascadeOverflow {
                time: state.time,
                events: fired,
                cycle: Some(state.cycle_index),
            });
        }
        let (time, cycle) = (state.time, state.cycle_index);
        for &cell in &above {
            state.charge.as_mut_slice()[cell] -= 1.0;
            push_event(state, cell, time, cycle, out);
            fired += 1;
        }
        op.solve_into(state.charge.as_slice(), voltage, &mut ws.scratch);
        for (v, b) in voltage.iter_mut().zip(op.boundary_voltage()) {
            *v += b;
        }
    }
}

/// Runs the threshold cascade at the state's current time and returns the
/// fired cells in firing order.
pub fn apply_tunnel_events(
    state: &mut NetworkState,
    op: &CapacitanceOperator,
    threshold: f64,
) -> Result<Vec<(usize, usize)>> {
    let mut voltage = op.voltages(state.charge.as_slice());
    let mut ws = Workspace::new(op.len());
    let mut out = Vec::new();
    cascade(state, &mut voltage, op, threshold, &mut ws, &mut out)?;
    Ok(out.iter().map(|e| (e.row, e.col)).collect())
}

/// RK4 stages from the current state over `h`; leaves the charge and
/// voltage increments' stage derivatives in `ws.k` / `ws.w` and the
/// end-of-step voltage in `ws.tmp`.
fn rk4_stages(config: &NetworkConfig, op: &CapacitanceOperator, voltage: &[f64], t: f64, h: f64, ws: &mut Workspace) {
    let n = op.len();
    let bias = config.bias.as_slice();
    let res = config.resistance.as_slice();
    let drive = [
        config.pump.voltage(t),
        config.pump.voltage(t + 0.5 * h),
        config.pump.voltage(t + 0.5 * h),
        config.pump.voltage(t + h),
    ];
    let stage_scale = [0.0, 0.5 * h, 0.5 * h, h];
    let Workspace { k, w, stage, scratch, tmp } = ws;
    for s in 0..4 {
        if s == 0 {
            stage.copy_from_slice(voltage);
        } else {
            for i in 0..n {
                stage[i] = voltage[i] + stage_scale[s] * w[s - 1][i];
            }
        }
        for i in 0..n {
            k[s][i] = (bias[i] + drive[s] - stage[i]) / res[i];
        }
        op.solve_into(&k[s], &mut w[s], scratch);
    }
    let sixth = h / 6.0;
    for i in 0..n {
        tmp[i] = voltage[i] + sixth * (w[0][i] + 2.0 * w[1][i] + 2.0 * w[2][i] + w[3][i]);
    }
}

/// Commits the stages in `ws` to the charge and voltage.
fn rk4_commit(charge: &mut [f64], voltage: &mut Vec<f64>, h: f64, ws: &mut Workspace) {
    let sixth = h / 6.0;
    let k = &ws.k;
    for (i, q) in charge.iter_mut().enumerate() {
        *q += sixth * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
    core::mem::swap(voltage, &mut ws.tmp);
}

/// Fraction of the step at which cell `i` first reaches `vth` on the RK4
/// continuous extension, refined to `CROSSING_TOLERANCE` in time.
fn crossing_fraction(voltage: &[f64], ws: &Workspace, i: usize, h: f64, vth: f64) -> f64 {
    let at = |theta: f64| {
        let b = dense_weights(theta);
        voltage[i] + h * (b[0] * ws.w[0][i] + b[1] * ws.w[1][i] + b[2] * ws.w[2][i] + b[3] * ws.w[3][i])
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while (hi - lo) * h > CROSSING_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid) >= vth {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Upper bound on event instants handled inside one step.
const MAX_EVENT_TIMES_PER_STEP: usize = 1 << 16;

fn step_impl(
    config: &NetworkConfig,
    op: &CapacitanceOperator,
    state: &mut NetworkState,
    voltage: &mut Vec<f64>,
    ws: &mut Workspace,
    clocks: Option<&mut Vec<HazardClock>>,
    dt: f64,
) -> Result<StepOutcome> {
    let n = op.len();
    let period = config.pump.period;
    let vth = config.threshold;
    let cycle = state.cycle_index;
    let boundary_time = (cycle + 1) as f64 * period;
    let mut target = state.time + dt;
    let closes_cycle = target >= boundary_time - 1e-9 * period;
    if closes_cycle {
        target = boundary_time;
    }

    let mut events = Vec::new();
    cascade(state, voltage, op, vth, ws, &mut events)?;

    match clocks {
        None => {
            // Integrate to the earliest threshold crossing, fire, restart.
            let mut instants = 0;
            loop {
                let t = state.time;
                let h = target - t;
                if h <= 0.0 {
                    break;
                }
                rk4_stages(config, op, voltage, t, h, ws);
                let mut first = f64::INFINITY;
                let mut crossing: Vec<(usize, f64)> = Vec::new();
                for i in 0..n {
                    if ws.tmp[i] >= vth {
                        let theta = crossing_fraction(voltage, ws, i, h, vth);
                        first = first.min(theta);
                        crossing.push((i, theta));
                    }
                }
                if crossing.is_empty() {
                    rk4_commit(state.charge.as_mut_slice(), voltage, h, ws);
                    state.time = target;
                    break;
                }
                instants += 1;
                if instants > MAX_EVENT_TIMES_PER_STEP {
                    return Err(Error::CascadeOverflow {
                        time: t,
                        events: events.len(),
                        cycle: Some(cycle),
                    });
                }
                let window = 2.0 * CROSSING_TOLERANCE / h;
                let group: Vec<usize> = crossing
                    .iter()
                    .filter(|c| c.1 <= first + window)
                    .map(|c| c.0)
                    .collect();
                let (event_time, sub) = if first >= 1.0 {
                    (target, h)
                } else {
                    (t + first * h, first * h)
                };
                if sub < h {
                    rk4_stages(config, op, voltage, t, sub, ws);
                }
                rk4_commit(state.charge.as_mut_slice(), voltage, sub, ws);
                state.time = event_time;
                for &cell in &group {
                    state.charge.as_mut_slice()[cell] -= 1.0;
                    push_event(state, cell, event_time, cycle, &mut events);
                }
                op.solve_into(state.charge.as_slice(), voltage, &mut ws.scratch);
                for (v, b) in voltage.iter_mut().zip(op.boundary_voltage()) {
                    *v += b;
                }
                cascade(state, voltage, op, vth, ws, &mut events)?;
            }
        }
        Some(clocks) => {
            let t = state.time;
            let h = target - t;
            rk4_stages(config, op, voltage, t, h, ws);
            let rates = config.stochastic.expect("clocks imply stochastic mode");
            let mut fired = Vec::new();
            for i in 0..n {
                let hazard = 0.5 * (rates.rate(voltage[i] - vth) + rates.rate(ws.tmp[i] - vth)) * h;
                let count = clocks[i].advance(hazard);
                if count > crate::element::MAX_EVENTS_PER_STEP {
                    return Err(Error::CascadeOverflow {
                        time: target,
                        events: count,
                        cycle: Some(cycle),
                    });
                }
                fired.extend(core::iter::repeat_n(i, count));
            }
            rk4_commit(state.charge.as_mut_slice(), voltage, h, ws);
            state.time = target;
            if !fired.is_empty() {
                for &cell in &fired {
                    state.charge.as_mut_slice()[cell] -= 1.0;
                    push_event(state, cell, target, cycle, &mut events);
                }
                op.solve_into(state.charge.as_slice(), voltage, &mut ws.scratch);
                for (v, b) in voltage.iter_mut().zip(op.boundary_voltage()) {
                    *v += b;
                }
            }
        }
    }
    state.time = target;

    let completed_cycle = if closes_cycle {
        let rows = state.tunneled_this_cycle.rows();
        let cols = state.tunneled_this_cycle.cols();
        let snapshot = core::mem::replace(
            &mut state.tunneled_this_cycle,
            Grid::filled(rows, cols, false),
        );
        state.cycle_index += 1;
        Some(snapshot)
    } else {
        None
    };
    Ok(StepOutcome {
        events,
        completed_cycle,
    })
}

/// Stateful lattice simulator owning its operator and buffers.
pub struct Network {
    config: NetworkConfig,
    op: CapacitanceOperator,
    state: NetworkState,
    voltage: Vec<f64>,
    ws: Workspace,
    clocks: Option<Vec<HazardClock>>,
}

impl Network {
    pub fn new(config: NetworkConfig) -> Result<Self> {
        let op = build_capacitance_operator(&config)?;
        let state = NetworkState::initial(&config);
        Ok(Self::from_parts(config, op, state))
    }

    fn from_parts(config: NetworkConfig, op: CapacitanceOperator, state: NetworkState) -> Self {
        let voltage = op.voltages(state.charge.as_slice());
        let ws = Workspace::new(op.len());
        let clocks = config.stochastic.map(|s| {
            (0..op.len() as u64)
                .map(|cell| HazardClock::new(s.seed ^ cell.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
                .collect()
        });
        Network {
            config,
            op,
            state,
            voltage,
            ws,
            clocks,
        }
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn operator(&self) -> &CapacitanceOperator {
        &self.op
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn into_state(self) -> NetworkState {
        self.state
    }

    /// Current cell voltages.
    pub fn voltages(&self) -> &[f64] {
        &self.voltage
    }

    /// One step of the configured size, shortened to land on a pump-cycle boundary.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let dt = self.config.time_step;
        step_impl(
            &self.config,
            &self.op,
            &mut self.state,
            &mut self.voltage,
            &mut self.ws,
            self.clocks.as_mut(),
            dt,
        )
    }

    /// Steps until the current pump cycle closes; returns its phase map.
    pub fn run_cycle(&mut self) -> Result<Grid<bool>> {
        loop {
            let outcome = self.step()?;
            if let Some(map) = outcome.completed_cycle {
                return Ok(map);
            }
        }
    }
}

/// Advances a state by one configured step.
///
/// Stochastic configurations need persistent generator state; use
/// [`Network`] for those.
pub fn step_network(
    mut state: NetworkState,
    config: &NetworkConfig,
    op: &CapacitanceOperator,
) -> Result<(NetworkState, StepOutcome)> {
    if config.stochastic.is_some() {
        return Err(Error::invalid(
            "stochastic stepping needs a Network to carry its generators",
        ));
    }
    if op.rows() != config.rows() || op.cols() != config.cols() {
        return Err(Error::DimensionMismatch("operator does not match config".into()));
    }
    config.bias.check_dims(&state.charge, "state charge")?;
    let mut voltage = op.voltages(state.charge.as_slice());
    let mut ws = Workspace::new(op.len());
    let outcome = step_impl(config, op, &mut state, &mut voltage, &mut ws, None, config.time_step)?;
    Ok((state, outcome))
}

/// Phase maps, events and final state of a multi-cycle run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// One tunneled-this-cycle map per completed pump cycle.
    pub phase_maps: Vec<Grid<bool>>,
    pub events: Vec<NetworkEvent>,
    pub final_state: NetworkState,
    pub pump_period: f64,
}

impl RunRecord {
    pub fn rows(&self) -> usize {
        self.final_state.charge.rows()
    }

    pub fn cols(&self) -> usize {
        self.final_state.charge.cols()
    }

    pub fn cycles(&self) -> usize {
        self.phase_maps.len()
    }
}

pub fn run_network(config: &NetworkConfig, n_cycles: usize) -> Result<RunRecord> {
    if n_cycles == 0 {
        return Err(Error::invalid("at least one cycle is required"));
    }
    let mut net = Network::new(config.clone())?;
    let mut maps = Vec::with_capacity(n_cycles);
    for _ in 0..n_cycles {
        let cycle = net.state.cycle_index;
        let map = net.run_cycle().map_err(|e| match e {
            Error::CascadeOverflow { time, events, .. } => Error::CascadeOverflow {
                time,
                events,
                cycle: Some(cycle),
            },
            other => other,
        })?;
        maps.push(map);
    }
    let mut final_state = net.into_state();
    let events = core::mem::take(&mut final_state.event_log);
    Ok(RunRecord {
        phase_maps: maps,
        events,
        final_state,
        pump_period: config.pump.period,
    })
}
