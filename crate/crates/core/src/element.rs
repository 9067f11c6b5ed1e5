//! A single resistively loaded tunnel junction under an AC pump.
//!
//! Between tunneling events the junction charge obeys
//! `dq/dt = (v_pump(t) - q) / r`; whenever `q` reaches the threshold one
//! electron tunnels and `q` drops by exactly 1. Crossing instants are
//! refined by bisection on a re-integrated RK4 sub-step.

use alloc::vec::Vec;

use crate::math::{atan2, cos, floor, ln, rem_euclid, sin, sqrt, PI};
use crate::tunneling::{HazardClock, StochasticTunneling};
use crate::{Error, Result};

/// Events allowed inside one integration step before the step is declared runaway.
pub const MAX_EVENTS_PER_STEP: usize = 100;
/// Absolute time tolerance of crossing-time bisection.
pub const CROSSING_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_STEPS_PER_CYCLE: usize = 256;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementParams {
    /// dc bias, units of e/C.
    pub v_dc: f64,
    /// Pump amplitude, units of e/C.
    pub v_ac: f64,
    /// Pump period, units of RC.
    pub pump_period: f64,
    /// Pump phase offset, radians.
    pub pump_phase: f64,
    /// Series resistance (normalized).
    pub resistance: f64,
    /// Tunneling threshold voltage, units of e/C.
    pub threshold: f64,
    pub stochastic: Option<StochasticTunneling>,
}

impl ElementParams {
    pub fn new(v_dc: f64, v_ac: f64, pump_period: f64) -> Self {
        ElementParams {
            v_dc,
            v_ac,
            pump_period,
            pump_phase: 0.0,
            resistance: 1.0,
            threshold: DEFAULT_THRESHOLD,
            stochastic: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pump_period > 0.0) || !self.pump_period.is_finite() {
            return Err(Error::invalid("pump period must be > 0"));
        }
        if !(self.resistance > 0.0) {
            return Err(Error::invalid("resistance must be > 0"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::invalid("threshold must be > 0"));
        }
        if !(self.v_ac >= 0.0) {
            return Err(Error::invalid("pump amplitude must be >= 0"));
        }
        if !self.v_dc.is_finite() || !self.pump_phase.is_finite() {
            return Err(Error::invalid("bias and pump phase must be finite"));
        }
        if let Some(s) = &self.stochastic {
            s.validate()?;
        }
        Ok(())
    }

    #[inline]
    pub fn pump_voltage(&self, t: f64) -> f64 {
        pump_voltage(self, t)
    }

    pub fn default_time_step(&self) -> f64 {
        self.pump_period / DEFAULT_STEPS_PER_CYCLE as f64
    }

    #[inline]
    fn rate(&self, t: f64, q: f64) -> f64 {
        (self.pump_voltage(t) - q) / self.resistance
    }

    /// One classical RK4 step of the inter-event charging equation.
    #[inline]
    fn rk4(&self, t: f64, q: f64, h: f64) -> f64 {
        let half = 0.5 * h;
        let k1 = self.rate(t, q);
        let k2 = self.rate(t + half, q + half * k1);
        let k3 = self.rate(t + half, q + half * k2);
        let k4 = self.rate(t + h, q + h * k3);
        q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }
}

/// `v_dc + v_ac * sin(2 pi t / T_p + phase)`.
#[inline]
pub fn pump_voltage(params: &ElementParams, t: f64) -> f64 {
    params.v_dc + params.v_ac * sin(2.0 * PI * t / params.pump_period + params.pump_phase)
}

/// Junction charge (units of e) at elapsed time (units of RC).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementState {
    pub charge: f64,
    pub time: f64,
}

/// Tunneling instants of one element.
///
/// Times are non-decreasing; they only repeat when a charge far above
/// threshold discharges through several electrons at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTrain {
    pub events: Vec<f64>,
    pub pump_period: f64,
}

impl EventTrain {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events with `from <= t < to`.
    pub fn between(&self, from: f64, to: f64) -> &[f64] {
        let lo = self.events.partition_point(|&t| t < from);
        let hi = self.events.partition_point(|&t| t < to);
        &self.events[lo..hi]
    }

    pub fn intervals(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.windows(2).map(|w| w[1] - w[0])
    }
}

/// Stateful single-element simulator. Holds the generator for stochastic mode.
#[derive(Debug, Clone)]
pub struct Element {
    params: ElementParams,
    state: ElementState,
    clock: Option<HazardClock>,
}

impl Element {
    pub fn new(params: ElementParams, initial_charge: f64) -> Result<Self> {
        params.validate()?;
        if !initial_charge.is_finite() {
            return Err(Error::invalid("initial charge must be finite"));
        }
        Ok(Element {
            clock: params.stochastic.map(|s| HazardClock::new(s.seed)),
            params,
            state: ElementState {
                charge: initial_charge,
                time: 0.0,
            },
        })
    }

    pub fn params(&self) -> &ElementParams {
        &self.params
    }

    pub fn state(&self) -> ElementState {
        self.state
    }

    /// Advances by `dt`, appending event times to `events`.
    pub fn step(&mut self, dt: f64, events: &mut Vec<f64>) -> Result<usize> {
        if !(dt > 0.0) {
            return Err(Error::invalid("time step must be > 0"));
        }
        let target = self.state.time + dt;
        self.advance_to(target, events)
    }

    /// Advances to absolute time `target` as a single integration step.
    pub fn advance_to(&mut self, target: f64, events: &mut Vec<f64>) -> Result<usize> {
        if self.clock.is_some() {
            self.advance_stochastic(target, events)
        } else {
            self.advance_deterministic(target, events)
        }
    }

    fn advance_deterministic(&mut self, target: f64, events: &mut Vec<f64>) -> Result<usize> {
        let p = self.params;
        let vth = p.threshold;
        let mut t = self.state.time;
        let mut q = self.state.charge;
        let mut fired = 0usize;
        loop {
            while q >= vth {
                q -= 1.0;
                events.push(t);
                fired += 1;
                if fired > MAX_EVENTS_PER_STEP {
                    return Err(Error::CascadeOverflow {
                        time: t,
                        events: fired,
                        cycle: None,
                    });
                }
            }
            if t >= target {
                break;
            }
            let h = target - t;
            let q_end = p.rk4(t, q, h);
            if q_end < vth {
                t = target;
                q = q_end;
                break;
            }
            // q(t) < vth <= q(t + h): bracket the crossing.
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > CROSSING_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if p.rk4(t, q, mid) >= vth {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if hi == h {
                q = q_end;
                t = target;
            } else {
                q = p.rk4(t, q, hi);
                t += hi;
            }
        }
        self.state = ElementState { charge: q, time: t };
        Ok(fired)
    }

    fn advance_stochastic(&mut self, target: f64, events: &mut Vec<f64>) -> Result<usize> {
        let p = self.params;
        let rates = p.stochastic.expect("stochastic clock without parameters");
        let t = self.state.time;
        let q0 = self.state.charge;
        let h = target - t;
        if !(h > 0.0) {
            return Ok(0);
        }
        let q1 = p.rk4(t, q0, h);
        let hazard =
            0.5 * (rates.rate(q0 - p.threshold) + rates.rate(q1 - p.threshold)) * h;
        let clock = self.clock.as_mut().expect("checked by caller");
        let fired = clock.advance(hazard);
        if fired > MAX_EVENTS_PER_STEP {
            return Err(Error::CascadeOverflow {
                time: target,
                events: fired,
                cycle: None,
            });
        }
        for _ in 0..fired {
            events.push(target);
        }
        self.state = ElementState {
            charge: q1 - fired as f64,
            time: target,
        };
        Ok(fired)
    }
}

/// Stateless deterministic step. Stochastic parameters need the generator
/// state carried by [`Element`], so they are rejected here.
pub fn step_element(
    state: ElementState,
    params: &ElementParams,
    dt: f64,
) -> Result<(ElementState, Vec<f64>)> {
    if params.stochastic.is_some() {
        return Err(Error::invalid(
            "stochastic stepping needs an Element to carry its generator",
        ));
    }
    let mut el = Element::new(*params, state.charge)?;
    el.state.time = state.time;
    let mut events = Vec::new();
    el.step(dt, &mut events)?;
    Ok((el.state, events))
}

/// Full event record on `[0, t_end]` with steps of `dt` (the last one shortened).
pub fn simulate_element(
    params: &ElementParams,
    initial_charge: f64,
    t_end: f64,
    dt: f64,
) -> Result<EventTrain> {
    if !(t_end > 0.0) {
        return Err(Error::invalid("end time must be > 0"));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("time step must be > 0"));
    }
    let mut el = Element::new(*params, initial_charge)?;
    let steps = libm::ceil(t_end / dt) as u64;
    let mut events = Vec::new();
    for k in 1..=steps {
        let target = if k == steps { t_end } else { k as f64 * dt };
        el.advance_to(target, &mut events)?;
    }
    Ok(EventTrain {
        events,
        pump_period: params.pump_period,
    })
}

/// Unpumped relaxation-oscillation frequency `1 / ln((v_dc + v_th)/(v_dc - v_th))`.
pub fn natural_frequency(params: &ElementParams) -> Result<Option<f64>> {
    if params.v_ac != 0.0 {
        return Err(Error::DomainError);
    }
    let (v, th) = (params.v_dc, params.threshold);
    if v <= th {
        return Ok(None);
    }
    Ok(Some(1.0 / (params.resistance * ln((v + th) / (v - th)))))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockCriteria {
    /// Maximum phase standard deviation, as a fraction of the pump period.
    pub jitter_threshold: f64,
    pub max_code_length: usize,
    pub min_events: usize,
}

impl Default for LockCriteria {
    fn default() -> Self {
        LockCriteria {
            jitter_threshold: 0.05,
            max_code_length: 16,
            min_events: 8,
        }
    }
}

/// Outcome of lock detection on one event train.
///
/// `phase_mean` and `jitter` are in units of the pump period. For a lock
/// of order `n` the phase lies in `[0, n)`; otherwise it is measured in
/// the single-cycle frame. Both are NaN for an empty window.
#[derive(Debug, Clone)]
pub struct LockResult {
    pub lock_order: Option<u32>,
    pub phase_mean: f64,
    pub jitter: f64,
    pub coded_sequence: Option<Vec<u32>>,
    pub event_count: usize,
}

impl PartialEq for LockResult {
    fn eq(&self, other: &Self) -> bool {
        self.lock_order == other.lock_order
            && self.phase_mean.to_bits() == other.phase_mean.to_bits()
            && self.jitter.to_bits() == other.jitter.to_bits()
            && self.coded_sequence == other.coded_sequence
            && self.event_count == other.event_count
    }
}

impl LockResult {
    fn unlocked(event_count: usize, phase_mean: f64, jitter: f64) -> Self {
        LockResult {
            lock_order: None,
            phase_mean,
            jitter,
            coded_sequence: None,
            event_count,
        }
    }

    pub fn is_locked(&self) -> bool {
        self.lock_order.is_some()
    }
}

/// Circular mean and spread of `phases` (in cycles) on a frame of `frame` cycles.
fn phase_statistics(phases: &[f64], frame: f64) -> (f64, f64) {
    let (mut s, mut c) = (0.0, 0.0);
    for &ph in phases {
        let a = 2.0 * PI * ph / frame;
        s += sin(a);
        c += cos(a);
    }
    let mean = rem_euclid(atan2(s, c) * frame / (2.0 * PI), frame);
    let mut var = 0.0;
    for &ph in phases {
        let mut d = rem_euclid(ph - mean, frame);
        if d >= 0.5 * frame {
            d -= frame;
        }
        var += d * d;
    }
    (mean, sqrt(var / phases.len() as f64))
}

pub fn detect_lock(
    train: &EventTrain,
    transient_cycles: usize,
    window_cycles: usize,
) -> Result<LockResult> {
    detect_lock_with(train, transient_cycles, window_cycles, &LockCriteria::default())
}

/// Classifies the events inside `[transient, transient + window)` pump cycles.
///
/// A lock of order `n` means every consecutive pair of events is exactly
/// `n` cycles apart, the window is covered end to end, and the phase
/// jitter is below the threshold. Failing that, an exactly repeating
/// pattern of cycle gaps (length <= `max_code_length`, seen at least twice)
/// is reported as a coded sequence.
pub fn detect_lock_with(
    train: &EventTrain,
    transient_cycles: usize,
    window_cycles: usize,
    criteria: &LockCriteria,
) -> Result<LockResult> {
    let period = train.pump_period;
    if !(period > 0.0) {
        return Err(Error::invalid("pump period must be > 0"));
    }
    if window_cycles == 0 {
        return Err(Error::EmptyWindow);
    }
    let first_cycle = transient_cycles as i64;
    let end_cycle = (transient_cycles + window_cycles) as i64;
    let window = train.between(
        transient_cycles as f64 * period,
        (transient_cycles + window_cycles) as f64 * period,
    );
    if window.is_empty() {
        return Ok(LockResult::unlocked(0, f64::NAN, f64::NAN));
    }
    if window.len() < criteria.min_events {
        return Err(Error::InsufficientData {
            found: window.len(),
            needed: criteria.min_events,
        });
    }

    let cycles: Vec<i64> = window.iter().map(|&t| floor(t / period) as i64).collect();
    let gaps: Vec<i64> = cycles.windows(2).map(|w| w[1] - w[0]).collect();
    let unit_phases: Vec<f64> = window.iter().map(|&t| t / period).collect();

    let n = gaps[0];
    if n > 0 && gaps.iter().all(|&g| g == n) {
        let covered =
            cycles[0] - first_cycle < n && (end_cycle - 1) - cycles[cycles.len() - 1] < n;
        let (mean, jitter) = phase_statistics(&unit_phases, n as f64);
        if covered && jitter < criteria.jitter_threshold {
            return Ok(LockResult {
                lock_order: Some(n as u32),
                phase_mean: mean,
                jitter,
                coded_sequence: None,
                event_count: window.len(),
            });
        }
    }

    let (mean, jitter) = phase_statistics(&unit_phases, 1.0);
    let mut result = LockResult::unlocked(window.len(), mean, jitter);
    if gaps.iter().all(|&g| g > 0) {
        let max_len = criteria.max_code_length.min(gaps.len() / 2);
        for p in 2..=max_len {
            if (p..gaps.len()).all(|i| gaps[i] == gaps[i - p]) {
                result.coded_sequence = Some(gaps[..p].iter().map(|&g| g as u32).collect());
                break;
            }
        }
    }
    Ok(result)
}

/// Evenly spaced values; a single-point axis yields `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Linspace {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Linspace { start, stop, count }
    }

    pub fn single(value: f64) -> Self {
        Linspace::new(value, value, 1)
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => alloc::vec![self.start],
            n => (0..n)
                .map(|k| {
                    if k == n - 1 {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxes {
    pub v_dc: Linspace,
    pub v_ac: Linspace,
    pub pump_period: Linspace,
}

impl SweepAxes {
    /// Grid points with `v_dc` outermost and the pump period innermost.
    pub fn points(&self) -> Vec<SweepPoint> {
        let (dcs, acs, tps) = (
            self.v_dc.values(),
            self.v_ac.values(),
            self.pump_period.values(),
        );
        let mut out = Vec::with_capacity(dcs.len() * acs.len() * tps.len());
        for &v_dc in &dcs {
            for &v_ac in &acs {
                for &pump_period in &tps {
                    out.push(SweepPoint {
                        v_dc,
                        v_ac,
                        pump_period,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub v_dc: f64,
    pub v_ac: f64,
    pub pump_period: f64,
}

impl SweepPoint {
    pub fn apply(&self, base: &ElementParams) -> ElementParams {
        ElementParams {
            v_dc: self.v_dc,
            v_ac: self.v_ac,
            pump_period: self.pump_period,
            ..*base
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub initial_charge: f64,
    pub transient_cycles: usize,
    pub window_cycles: usize,
    pub steps_per_cycle: usize,
    pub criteria: LockCriteria,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            initial_charge: 0.0,
            transient_cycles: 100,
            window_cycles: 1000,
            steps_per_cycle: DEFAULT_STEPS_PER_CYCLE,
            criteria: LockCriteria::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub outcome: core::result::Result<LockResult, Error>,
}

impl SweepRow {
    pub fn lock_order(&self) -> Option<u32> {
        self.outcome.as_ref().ok().and_then(|r| r.lock_order)
    }
}

/// Simulates one sweep point and classifies its post-transient window.
pub fn evaluate_point(
    base: &ElementParams,
    point: SweepPoint,
    settings: &SweepSettings,
) -> SweepRow {
    let outcome = (|| {
        if settings.steps_per_cycle == 0 {
            return Err(Error::invalid("steps per cycle must be >= 1"));
        }
        let params = point.apply(base);
        params.validate()?;
        let cycles = settings.transient_cycles + settings.window_cycles;
        let t_end = cycles as f64 * params.pump_period;
        let dt = params.pump_period / settings.steps_per_cycle as f64;
        let train = simulate_element(&params, settings.initial_charge, t_end, dt)?;
        detect_lock_with(
            &train,
            settings.transient_cycles,
            settings.window_cycles,
            &settings.criteria,
        )
    })();
    SweepRow { point, outcome }
}

/// Sequential sweep; rows follow [`SweepAxes::points`] order.
pub fn sweep_lock_map(
    base: &ElementParams,
    axes: &SweepAxes,
    settings: &SweepSettings,
) -> Vec<SweepRow> {
    axes.points()
        .into_iter()
        .map(|p| evaluate_point(base, p, settings))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unpumped(v_dc: f64) -> ElementParams {
        ElementParams::new(v_dc, 0.0, 1.0)
    }

    #[test]
    fn pump_voltage_quarter_points() {
        let p = ElementParams::new(0.6, 0.3, 2.0);
        assert_eq!(pump_voltage(&p, 0.0), 0.6);
        assert!((pump_voltage(&p, 0.5) - 0.9).abs() < 1e-15);
        assert!((pump_voltage(&p, 1.0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn subthreshold_relaxes_without_events() {
        let p = unpumped(0.4);
        let mut el = Element::new(p, 0.0).unwrap();
        let mut ev = Vec::new();
        for _ in 0..20_000 {
            el.step(1e-3, &mut ev).unwrap();
        }
        assert!(ev.is_empty());
        assert!((el.state().charge - 0.4).abs() < 1e-8);
    }

    #[test]
    fn charge_at_threshold_fires_immediately() {
        let p = ElementParams::new(0.3, 0.2, 1.0);
        let (state, events) = step_element(
            ElementState {
                charge: 0.5,
                time: 0.0,
            },
            &p,
            1e-3,
        )
        .unwrap();
        assert_eq!(events, vec![0.0]);
        // q jumped to -0.5 then charged for 1e-3.
        assert!(state.charge < -0.49 && state.charge > -0.5);
    }

    #[test]
    fn each_event_removes_one_electron() {
        let p = unpumped(1.0);
        let mut el = Element::new(p, 0.0).unwrap();
        let mut ev = Vec::new();
        while ev.is_empty() {
            el.step(1e-3, &mut ev).unwrap();
        }
        // Crossing at t0 = ln 2; charge continues from -0.5.
        let t0 = ev[0];
        assert!((t0 - core::f64::consts::LN_2).abs() < 2e-9);
        let expected = 1.0 - 1.5 * libm::exp(-(el.state().time - t0));
        assert!((el.state().charge - expected).abs() < 5e-9);
    }

    #[test]
    fn runaway_charge_overflows() {
        let p = unpumped(0.0);
        let err = step_element(
            ElementState {
                charge: 150.0,
                time: 0.0,
            },
            &p,
            1e-3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::CascadeOverflow { .. }));
    }

    #[test]
    fn natural_frequency_cases() {
        let f = natural_frequency(&unpumped(1.0)).unwrap().unwrap();
        assert!((f - 1.0 / libm::log(3.0)).abs() < 1e-12);
        assert_eq!(natural_frequency(&unpumped(0.4)).unwrap(), None);
        let big = natural_frequency(&unpumped(100.0)).unwrap().unwrap();
        assert!((big - 100.0).abs() / 100.0 < 0.01);
        assert_eq!(
            natural_frequency(&ElementParams::new(1.0, 0.1, 1.0)),
            Err(Error::DomainError)
        );
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ElementParams::new(0.5, 0.1, 0.0).validate().is_err());
        assert!(ElementParams::new(0.5, -0.1, 1.0).validate().is_err());
        let mut p = ElementParams::new(0.5, 0.1, 1.0);
        p.resistance = 0.0;
        assert!(p.validate().is_err());
    }

    fn train(events: Vec<f64>, period: f64) -> EventTrain {
        EventTrain {
            events,
            pump_period: period,
        }
    }

    #[test]
    fn constructed_half_rate_train_locks() {
        let t = train((0..200).map(|m| (2 * m) as f64 + 0.25).collect(), 1.0);
        let r = detect_lock(&t, 10, 300).unwrap();
        assert_eq!(r.lock_order, Some(2));
        assert!((r.phase_mean - 0.25).abs() < 1e-9);
        assert!(r.jitter < 1e-9);
    }

    #[test]
    fn coded_gaps_are_reported() {
        let mut ev = Vec::new();
        let mut c = 0i64;
        for k in 0..80 {
            ev.push(c as f64 + 0.4);
            c += [3, 3, 3, 2][k % 4];
        }
        let r = detect_lock(&train(ev, 1.0), 0, c as usize).unwrap();
        assert_eq!(r.lock_order, None);
        assert_eq!(r.coded_sequence, Some(vec![3, 3, 3, 2]));
    }

    #[test]
    fn few_events_is_insufficient() {
        let r = detect_lock(&train(vec![0.5, 2.5, 4.5], 1.0), 0, 10);
        assert_eq!(
            r,
            Err(Error::InsufficientData {
                found: 3,
                needed: 8
            })
        );
    }

    #[test]
    fn window_must_be_covered_for_lock() {
        // Locked for 20 cycles then silent for the rest of the window.
        let t = train((0..10).map(|m| (2 * m) as f64 + 0.1).collect(), 1.0);
        let r = detect_lock(&t, 0, 100).unwrap();
        assert_eq!(r.lock_order, None);
    }

    #[test]
    fn linspace_endpoints_exact() {
        let v = Linspace::new(0.1, 0.7, 4).values();
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[3], 0.7);
        assert_eq!(Linspace::single(2.0).values(), vec![2.0]);
    }

    #[test]
    fn stochastic_mode_is_seeded() {
        let mut p = ElementParams::new(0.7, 0.1, 1.0);
        p.stochastic = Some(StochasticTunneling {
            tunnel_resistance: 0.05,
            temperature: 0.01,
            seed: 42,
        });
        let a = simulate_element(&p, 0.0, 50.0, 1e-2).unwrap();
        let b = simulate_element(&p, 0.0, 50.0, 1e-2).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
        p.stochastic.as_mut().unwrap().seed = 43;
        let c = simulate_element(&p, 0.0, 50.0, 1e-2).unwrap();
        assert_ne!(a.events, c.events);
    }
}
