//! Scenario execution: everything is resolved and validated up front, then
//! simulated, then written.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tplcnn_core::analysis::{
    best_segmentation, centroid_track, corner_score, detect_period, edge_score, phase_class_map,
    PhaseMapSequence,
};
use tplcnn_core::capacitance::{Boundary, Coupling, FixedBoundary};
use tplcnn_core::cnn::{cnn_run, CnnTemplate};
use tplcnn_core::element::{
    evaluate_point, ElementParams, LockCriteria, Linspace, SweepAxes, SweepRow, SweepSettings,
};
use tplcnn_core::network::{run_network, NetworkConfig, NetworkEvent, Pump, RunRecord};
use tplcnn_core::{Grid, StochasticTunneling};

use crate::error::{CliError, Result};
use crate::inputs::{self, Axis};
use crate::pgm::{self, GrayImage};
use crate::scenario::*;

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

/// File name of the phase-map frame for `cycle`.
pub fn frame_name(cycle: usize) -> String {
    format!("cycle_{cycle:06}.pgm")
}

pub fn events_csv(events: &[NetworkEvent]) -> String {
    let mut out = String::from("cycle,time,row,col\n");
    for e in events {
        writeln!(out, "{},{:.9},{},{}", e.cycle, e.time, e.row, e.col).unwrap();
    }
    out
}

/// Ordered `key,value` rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub rows: Vec<(String, String)>,
}

impl Summary {
    fn push(&mut self, key: &str, value: impl ToString) {
        self.rows.push((key.to_string(), value.to_string()));
    }

    fn push_f(&mut self, key: &str, value: f64) {
        self.push(key, format!("{value:.9}"));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.rows
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        for (k, v) in &self.rows {
            writeln!(out, "{k},{v}").unwrap();
        }
        out
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn load_image(base: &Path, path: &Path, scale: usize) -> Result<GrayImage> {
    if scale == 0 {
        return Err(CliError::config("pixel_scale must be >= 1"));
    }
    let img = GrayImage::read(&resolve(base, path)).map_err(|e| match e {
        CliError::Io { path, source } => CliError::config(format!("{}: {source}", path.display())),
        other => other,
    })?;
    Ok(if scale > 1 { img.upscale(scale) } else { img })
}

fn check_dims(what: &str, img: &GrayImage, rows: usize, cols: usize) -> Result<()> {
    if img.height() != rows || img.width() != cols {
        return Err(CliError::config(format!(
            "{what} is {}x{} but the lattice is {rows}x{cols}",
            img.height(),
            img.width()
        )));
    }
    Ok(())
}

pub fn run_scenario_file(path: &Path, opts: &RunOptions) -> Result<Summary> {
    let scenario = Scenario::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    run_scenario(&scenario, base, opts)
}

/// Runs a parsed scenario whose relative paths resolve against `base`.
pub fn run_scenario(scenario: &Scenario, base: &Path, opts: &RunOptions) -> Result<Summary> {
    scenario.check()?;
    let out = opts
        .out
        .clone()
        .or_else(|| scenario.output.as_ref().map(|p| resolve(base, p)))
        .ok_or_else(|| CliError::config("no output directory: pass --out or set `output`"))?;
    if opts.threads == Some(0) {
        return Err(CliError::config("--threads must be >= 1"));
    }
    let seed = opts.seed.or(scenario.seed).unwrap_or(0);
    let job = prepare(scenario, base, seed)?;
    fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    let summary = match job {
        Job::Sweep(sweep) => run_sweep(&sweep, opts.threads, &out)?,
        Job::Network(net) => run_net(&net, &out)?,
        Job::Cnn(cnn) => run_cnn(&cnn, &out)?,
        Job::Analyze(an) => run_analyze(&an, &out)?,
    };
    Ok(summary)
}

enum Job {
    Sweep(SweepJob),
    Network(Box<NetworkJob>),
    Cnn(CnnJob),
    Analyze(AnalyzeJob),
}

fn prepare(s: &Scenario, base: &Path, seed: u64) -> Result<Job> {
    let stochastic = s.stochastic.as_ref().map(|st| StochasticTunneling {
        tunnel_resistance: st.tunnel_resistance,
        temperature: st.temperature,
        seed,
    });
    Ok(match s.kind {
        Kind::ElementSweep => Job::Sweep(prepare_sweep(s.element.as_ref().unwrap(), stochastic)?),
        Kind::NetworkRun => Job::Network(Box::new(prepare_network(s, base, stochastic)?)),
        Kind::CnnRun => Job::Cnn(prepare_cnn(s.cnn.as_ref().unwrap(), base)?),
        Kind::Analyze => Job::Analyze(prepare_analyze(s, base)?),
    })
}

// ---------------------------------------------------------------- sweeps

struct SweepJob {
    base: ElementParams,
    axes: SweepAxes,
    settings: SweepSettings,
}

fn linspace(axis: SweepAxis, name: &str) -> Result<Linspace> {
    match axis {
        SweepAxis::Value(v) => Ok(Linspace::single(v)),
        SweepAxis::Range(r) if r.count >= 1 => Ok(Linspace::new(r.start, r.stop, r.count)),
        SweepAxis::Range(_) => Err(CliError::config(format!("{name}: count must be >= 1"))),
    }
}

fn prepare_sweep(e: &ElementSection, stochastic: Option<StochasticTunneling>) -> Result<SweepJob> {
    let axes = SweepAxes {
        v_dc: linspace(e.v_dc, "v_dc")?,
        v_ac: linspace(e.v_ac, "v_ac")?,
        pump_period: linspace(e.pump_period, "pump_period")?,
    };
    let base = ElementParams {
        pump_phase: e.pump_phase,
        resistance: e.resistance,
        threshold: e.threshold,
        stochastic,
        ..ElementParams::new(0.0, 0.0, 1.0)
    };
    for p in axes.points() {
        p.apply(&base).validate()?;
    }
    if e.steps_per_cycle == 0 || e.window_cycles == 0 {
        return Err(CliError::config("steps_per_cycle and window_cycles must be >= 1"));
    }
    let settings = SweepSettings {
        initial_charge: e.initial_charge,
        transient_cycles: e.transient_cycles,
        window_cycles: e.window_cycles,
        steps_per_cycle: e.steps_per_cycle,
        criteria: LockCriteria {
            jitter_threshold: e.jitter_threshold,
            ..LockCriteria::default()
        },
    };
    Ok(SweepJob {
        base,
        axes,
        settings,
    })
}

/// Evaluates every sweep point on a pool of `threads` workers; rows come
/// back in axis order regardless of scheduling.
pub fn parallel_sweep(
    base: &ElementParams,
    axes: &SweepAxes,
    settings: &SweepSettings,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>> {
    let points = axes.points();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        points
            .into_par_iter()
            .map(|p| evaluate_point(base, p, settings))
            .collect()
    }))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "v_dc,v_ac,pump_period,status,lock_order,phase_mean,jitter,event_count,coded_sequence\n",
    );
    for row in rows {
        let p = row.point;
        let _ = write!(out, "{:.9},{:.9},{:.9},", p.v_dc, p.v_ac, p.pump_period);
        match &row.outcome {
            Ok(lock) => {
                let status = match (lock.lock_order, &lock.coded_sequence) {
                    (Some(_), _) => "locked",
                    (None, Some(_)) => "coded",
                    (None, None) => "unlocked",
                };
                let order = lock.lock_order.map(|n| n.to_string()).unwrap_or_default();
                let code = lock
                    .coded_sequence
                    .as_ref()
                    .map(|c| c.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" "))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{status},{order},{:.9},{:.9},{},{code}",
                    lock.phase_mean, lock.jitter, lock.event_count
                );
            }
            Err(tplcnn_core::Error::InsufficientData { found, .. }) => {
                let _ = writeln!(out, "insufficient-data,,,,{found},");
            }
            Err(e) => {
                let _ = writeln!(out, "error:{},,,,,", e.to_string().replace(',', ";"));
            }
        }
    }
    out
}

fn run_sweep(job: &SweepJob, threads: Option<usize>, out: &Path) -> Result<Summary> {
    let rows = parallel_sweep(&job.base, &job.axes, &job.settings, threads)?;
    write_file(&out.join("summary.csv"), sweep_csv(&rows))?;
    let mut summary = Summary::default();
    summary.push("points", rows.len());
    summary.push(
        "locked",
        rows.iter().filter(|r| r.lock_order().is_some()).count(),
    );
    Ok(summary)
}

// --------------------------------------------------------------- network

struct NetworkJob {
    config: NetworkConfig,
    cycles: usize,
    analysis: AnalysisSection,
    /// Source image behind the bias, when the bias is image based.
    bias_image: Option<GrayImage>,
}

/// Greyscale image behind a bias source, if any.
pub fn bias_image(src: &BiasSource, rows: usize, cols: usize, base: &Path) -> Result<Option<(GrayImage, f64, f64)>> {
    Ok(match src {
        BiasSource::Uniform { .. } => None,
        BiasSource::Image {
            path,
            v_lo,
            v_hi,
            pixel_scale,
        } => Some((load_image(base, path, *pixel_scale)?, *v_lo, *v_hi)),
        BiasSource::Rectangle {
            v_lo,
            v_hi,
            top,
            left,
            height,
            width,
        } => Some((inputs::rectangle(rows, cols, *top, *left, *height, *width), *v_lo, *v_hi)),
        BiasSource::SquareInSquare { v_lo, v_hi, inner } => {
            Some((inputs::square_in_square(rows, cols, *inner), *v_lo, *v_hi))
        }
        BiasSource::RampBlob {
            v_lo,
            v_hi,
            ramp_max,
            blob_row,
            blob_col,
            blob_radius,
        } => Some((
            inputs::ramp_blob(rows, cols, *ramp_max, *blob_row, *blob_col, *blob_radius),
            *v_lo,
            *v_hi,
        )),
    })
}

fn prepare_network(
    s: &Scenario,
    base: &Path,
    stochastic: Option<StochasticTunneling>,
) -> Result<NetworkJob> {
    let n = s.network.as_ref().unwrap();
    let (rows, cols) = (n.rows, n.cols);
    if rows == 0 || cols == 0 {
        return Err(CliError::config("rows and cols must be >= 1"));
    }
    if n.cycles == 0 {
        return Err(CliError::config("cycles must be >= 1"));
    }
    if n.steps_per_cycle == 0 {
        return Err(CliError::config("steps_per_cycle must be >= 1"));
    }
    let src = s.bias.as_ref().unwrap();
    let image = bias_image(src, rows, cols, base)?;
    let bias = match (&image, src) {
        (Some((img, lo, hi)), _) => {
            check_dims("bias image", img, rows, cols)?;
            inputs::bias_from_image(img, *lo, *hi)?
        }
        (None, BiasSource::Uniform { level }) => Grid::filled(rows, cols, *level),
        (None, _) => unreachable!("only uniform bias has no image"),
    };
    let initial_charge = match &s.initial_charge {
        None => Grid::filled(rows, cols, 0.0),
        Some(ChargeSource::Uniform { value }) => Grid::filled(rows, cols, *value),
        Some(ChargeSource::Gradient { q_min, q_max, axis }) => {
            let axis = match axis {
                AxisName::Rows => Axis::Rows,
                AxisName::Columns => Axis::Columns,
            };
            inputs::charge_gradient_init(rows, cols, *q_min, *q_max, axis)?
        }
        Some(ChargeSource::Image {
            path,
            q_lo,
            q_hi,
            pixel_scale,
        }) => {
            let img = load_image(base, path, *pixel_scale)?;
            check_dims("initial charge image", &img, rows, cols)?;
            inputs::bias_from_image(&img, *q_lo, *q_hi)?
        }
    };
    let boundary = match n.boundary {
        BoundaryKind::Open => Boundary::Open,
        BoundaryKind::Periodic => Boundary::Periodic,
        BoundaryKind::Fixed => Boundary::Fixed(FixedBoundary::uniform(
            rows,
            cols,
            n.fixed_coupling.unwrap(),
            n.fixed_voltage.unwrap(),
        )),
    };
    let pump = Pump {
        phase: n.pump_phase,
        ..Pump::new(n.pump_amplitude, n.pump_period)
    };
    let config = NetworkConfig {
        bias,
        pump,
        coupling: Coupling::uniform(rows, cols, n.coupling),
        boundary,
        resistance: Grid::filled(rows, cols, n.resistance),
        threshold: n.threshold,
        time_step: n.pump_period / n.steps_per_cycle as f64,
        initial_charge,
        stochastic,
    };
    config.validate()?;
    let analysis = s.analysis.clone().unwrap_or_default();
    let needs_image = analysis.edge || analysis.segmentation || analysis.corner_radius.is_some();
    if needs_image && image.is_none() {
        return Err(CliError::config(
            "edge, corner and segmentation scores need an image-based bias",
        ));
    }
    if analysis.transient_skip >= n.cycles {
        return Err(CliError::config("transient_skip must be below cycles"));
    }
    Ok(NetworkJob {
        config,
        cycles: n.cycles,
        analysis,
        bias_image: image.map(|(img, _, _)| img),
    })
}

/// Runs a network scenario's simulation without writing anything.
pub fn simulate_network_scenario(scenario: &Scenario, base: &Path, seed: u64) -> Result<RunRecord> {
    scenario.check()?;
    if scenario.kind != Kind::NetworkRun {
        return Err(CliError::config("not a network-run scenario"));
    }
    let stochastic = scenario.stochastic.as_ref().map(|st| StochasticTunneling {
        tunnel_resistance: st.tunnel_resistance,
        temperature: st.temperature,
        seed: scenario.seed.unwrap_or(seed),
    });
    let job = prepare_network(scenario, base, stochastic)?;
    Ok(run_network(&job.config, job.cycles)?)
}

/// Analysis inputs derived from a bias image: mask is `pixel >= 128`.
fn mask_of(img: &GrayImage) -> Grid<bool> {
    pgm::image_to_phase_map(img)
}

/// Period, edge/corner, segmentation and centroid figures for a sequence.
pub fn analyze_sequence(
    seq: &PhaseMapSequence,
    analysis: &AnalysisSection,
    mask: Option<&Grid<bool>>,
    gray: Option<&Grid<f64>>,
    summary: &mut Summary,
) -> Result<()> {
    let distinct: std::collections::HashSet<&Grid<bool>> = seq.analyzed().map(|(_, m)| m).collect();
    summary.push("distinct_maps", distinct.len());
    let varied = seq
        .analyzed()
        .filter(|(_, m)| {
            let set = m.iter().filter(|&&b| b).count();
            set != 0 && set != m.len()
        })
        .count();
    summary.push("varied_maps", varied);
    summary.push("analyzed_cycles", seq.len() - seq.transient_skip.min(seq.len()));
    match detect_period(seq, analysis.max_period) {
        Some(p) => summary.push("period", p),
        None => summary.push("period", "none"),
    }
    if analysis.edge {
        let mask = mask.ok_or_else(|| CliError::config("edge score needs a mask"))?;
        let s = edge_score(seq, mask)?;
        summary.push("edge_best_cycle", s.best.0);
        summary.push_f("edge_f1", s.best.1.f1);
        summary.push_f("edge_precision", s.best.1.precision);
        summary.push_f("edge_recall", s.best.1.recall);
    }
    if let Some(radius) = analysis.corner_radius {
        let mask = mask.ok_or_else(|| CliError::config("corner score needs a mask"))?;
        let s = corner_score(seq, mask, radius)?;
        summary.push("corner_best_cycle", s.best.0);
        summary.push_f("corner_f1", s.best.1.f1);
    }
    if analysis.segmentation {
        let gray = gray.ok_or_else(|| CliError::config("segmentation needs a grey input"))?;
        match best_segmentation(seq, gray) {
            Ok((k, s)) => {
                summary.push("segmentation_cycle", k);
                summary.push_f("segmentation_threshold", s.threshold);
                summary.push_f("segmentation_agreement", s.agreement);
            }
            Err(tplcnn_core::Error::AllEmpty) => summary.push("segmentation_cycle", "none"),
            Err(e) => return Err(e.into()),
        }
    }
    if analysis.centroid {
        match centroid_track(seq) {
            Ok(track) => {
                let valid: Vec<_> = track.valid().collect();
                let (first, last) = (valid[0].1, valid[valid.len() - 1].1);
                summary.push_f("centroid_first_col", first.1);
                summary.push_f("centroid_last_col", last.1);
                summary.push("centroid_skipped", track.skipped().count());
                match track.monotone_column_shift() {
                    Some(shift) => summary.push_f("centroid_monotone_shift", shift),
                    None => summary.push("centroid_monotone_shift", "none"),
                }
            }
            Err(tplcnn_core::Error::AllEmpty) => summary.push("centroid_first_col", "none"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn run_net(job: &NetworkJob, out: &Path) -> Result<Summary> {
    let record = run_network(&job.config, job.cycles)?;
    for (k, map) in record.phase_maps.iter().enumerate() {
        pgm::phase_map_image(map).write(&out.join(frame_name(k)))?;
    }
    write_file(&out.join("events.csv"), events_csv(&record.events))?;
    let mut summary = Summary::default();
    summary.push("rows", record.rows());
    summary.push("cols", record.cols());
    summary.push("cycles", record.cycles());
    summary.push("events", record.events.len());
    let seq = PhaseMapSequence::from_record(&record, job.analysis.transient_skip)?;
    let mask = job.bias_image.as_ref().map(mask_of);
    let gray = job.bias_image.as_ref().map(GrayImage::unit);
    analyze_sequence(&seq, &job.analysis, mask.as_ref(), gray.as_ref(), &mut summary)?;
    if let Some(order) = job.analysis.class_order {
        let classes = phase_class_map(&record, job.analysis.transient_skip..job.cycles, order)?;
        pgm::class_map_image(&classes.classes, order).write(&out.join("classes.pgm"))?;
        let locked = classes.classes.iter().filter(|c| c.is_some()).count();
        summary.push("class_locked_cells", locked);
    }
    write_file(&out.join("summary.csv"), summary.to_csv())?;
    Ok(summary)
}

// ------------------------------------------------------------------- cnn

struct CnnJob {
    template: CnnTemplate,
    x0: Grid<f64>,
    u: Grid<f64>,
    dt: f64,
    t_end: f64,
    tol: f64,
}

/// Parses a template file: 19 whitespace-separated numbers.
pub fn parse_template(text: &str) -> std::result::Result<CnnTemplate, String> {
    let values: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect::<std::result::Result<_, _>>()?;
    CnnTemplate::from_slice(&values).map_err(|e| e.to_string())
}

pub fn format_template(t: &CnnTemplate) -> String {
    let v = t.to_array();
    let row = |s: &[f64]| s.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    for chunk in v[..18].chunks(3) {
        out.push_str(&row(chunk));
        out.push('\n');
    }
    out.push_str(&format!("{}\n", v[18]));
    out
}

fn field(spec: &FieldSpec, rows: usize, cols: usize, base: &Path, what: &str) -> Result<Grid<f64>> {
    match spec {
        FieldSpec::Value(v) => Ok(Grid::filled(rows, cols, *v)),
        FieldSpec::Image(path) => {
            let img = load_image(base, path, 1)?;
            check_dims(what, &img, rows, cols)?;
            Ok(img.pixels.map(|&p| 2.0 * p as f64 / 255.0 - 1.0))
        }
    }
}

fn prepare_cnn(c: &CnnSection, base: &Path) -> Result<CnnJob> {
    let template = match &c.template {
        TemplateSpec::Inline(values) => CnnTemplate::from_slice(values)?,
        TemplateSpec::File(path) => {
            let path = resolve(base, path);
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            parse_template(&text).map_err(|msg| CliError::Format { path, msg })?
        }
    };
    if c.rows == 0 || c.cols == 0 {
        return Err(CliError::config("rows and cols must be >= 1"));
    }
    if !(c.dt > 0.0 && c.tol > 0.0 && c.t_end >= 0.0) {
        return Err(CliError::config("dt and tol must be > 0, t_end >= 0"));
    }
    Ok(CnnJob {
        template,
        x0: field(&c.x0, c.rows, c.cols, base, "x0 image")?,
        u: field(&c.u, c.rows, c.cols, base, "u image")?,
        dt: c.dt,
        t_end: c.t_end,
        tol: c.tol,
    })
}

fn run_cnn(job: &CnnJob, out: &Path) -> Result<Summary> {
    let run = cnn_run(&job.x0, &job.u, &job.template, job.dt, job.t_end, job.tol)?;
    pgm::signed_unit_image(&run.x).write(&out.join("state.pgm"))?;
    let output = run.x.map(|&x| tplcnn_core::cnn::saturation(x));
    pgm::signed_unit_image(&output).write(&out.join("output.pgm"))?;
    write_file(&out.join("template.txt"), format_template(&job.template))?;
    let mut summary = Summary::default();
    summary.push("converged", run.converged);
    summary.push_f("t_stop", run.t_stop);
    let positive = output.iter().filter(|&&y| y > 0.0).count();
    summary.push("positive_cells", positive);
    write_file(&out.join("summary.csv"), summary.to_csv())?;
    Ok(summary)
}

// --------------------------------------------------------------- analyze

struct AnalyzeJob {
    maps: Vec<Grid<bool>>,
    analysis: AnalysisSection,
    mask: Option<Grid<bool>>,
    gray: Option<Grid<f64>>,
}

/// Reads `cycle_%06d.pgm` frames 0, 1, 2, ... until the first gap.
pub fn read_frames(dir: &Path) -> Result<Vec<Grid<bool>>> {
    let mut maps = Vec::new();
    loop {
        let path = dir.join(frame_name(maps.len()));
        if !path.exists() {
            break;
        }
        maps.push(pgm::image_to_phase_map(&GrayImage::read(&path)?));
    }
    if maps.is_empty() {
        return Err(CliError::config(format!(
            "no {} in {}",
            frame_name(0),
            dir.display()
        )));
    }
    Ok(maps)
}

fn prepare_analyze(s: &Scenario, base: &Path) -> Result<AnalyzeJob> {
    let frames = s.frames.as_ref().unwrap();
    let maps = read_frames(&resolve(base, &frames.dir))?;
    let (rows, cols) = maps[0].dims();
    let mask = match &frames.mask {
        Some(p) => {
            let img = load_image(base, p, 1)?;
            check_dims("mask", &img, rows, cols)?;
            Some(mask_of(&img))
        }
        None => None,
    };
    let gray = match &frames.gray {
        Some(p) => {
            let img = load_image(base, p, 1)?;
            check_dims("grey input", &img, rows, cols)?;
            Some(img.unit())
        }
        None => None,
    };
    let analysis = s.analysis.clone().unwrap_or_default();
    if (analysis.edge || analysis.corner_radius.is_some()) && mask.is_none() {
        return Err(CliError::config("edge and corner scores need frames.mask"));
    }
    if analysis.segmentation && gray.is_none() {
        return Err(CliError::config("segmentation needs frames.gray"));
    }
    if analysis.class_order.is_some() {
        return Err(CliError::config("class_order needs the event log of a network-run"));
    }
    if analysis.transient_skip >= maps.len() {
        return Err(CliError::config("transient_skip must be below the frame count"));
    }
    Ok(AnalyzeJob {
        maps,
        analysis,
        mask,
        gray,
    })
}

fn run_analyze(job: &AnalyzeJob, out: &Path) -> Result<Summary> {
    let seq = PhaseMapSequence::new(job.maps.clone(), job.analysis.transient_skip)?;
    let mut summary = Summary::default();
    summary.push("cycles", seq.len());
    analyze_sequence(&seq, &job.analysis, job.mask.as_ref(), job.gray.as_ref(), &mut summary)?;
    write_file(&out.join("summary.csv"), summary.to_csv())?;
    Ok(summary)
}
