//! Reference integrator for the standard cellular nonlinear network:
//! `dx/dt = -x + z + sum A f(x) + sum B u` over a 3x3 neighbourhood.

use alloc::vec::Vec;

use crate::{Error, Grid, Result};

/// Divergence guard for `cnn_run`.
pub const BLOWUP_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnnTemplate {
    /// Feedback weights, row-major, centre at `[1][1]`.
    pub a: [[f64; 3]; 3],
    /// Input weights, row-major.
    pub b: [[f64; 3]; 3],
    pub z: f64,
}

impl CnnTemplate {
    pub const PARAMS: usize = 19;

    pub fn zero() -> Self {
        CnnTemplate {
            a: [[0.0; 3]; 3],
            b: [[0.0; 3]; 3],
            z: 0.0,
        }
    }

    /// Template with only the centre weights set.
    pub fn center(a: f64, b: f64, z: f64) -> Self {
        let mut t = CnnTemplate::zero();
        t.a[1][1] = a;
        t.b[1][1] = b;
        t.z = z;
        t
    }

    /// A (9, row-major), B (9, row-major), z.
    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.len() != Self::PARAMS {
            return Err(Error::invalid(alloc::format!(
                "template needs {} values, got {}",
                Self::PARAMS,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(alloc::format!("non-finite template value {v}")));
        }
        let mut t = CnnTemplate::zero();
        for k in 0..9 {
            t.a[k / 3][k % 3] = values[k];
            t.b[k / 3][k % 3] = values[9 + k];
        }
        t.z = values[18];
        Ok(t)
    }

    pub fn to_array(&self) -> [f64; 19] {
        let mut out = [0.0; 19];
        for k in 0..9 {
            out[k] = self.a[k / 3][k % 3];
            out[9 + k] = self.b[k / 3][k % 3];
        }
        out[18] = self.z;
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnState {
    pub x: Grid<f64>,
    pub u: Grid<f64>,
    pub t: f64,
}

impl CnnState {
    pub fn new(x: Grid<f64>, u: Grid<f64>) -> Result<Self> {
        x.check_dims(&u, "input")?;
        Ok(CnnState { x, u, t: 0.0 })
    }
}

/// Piecewise-linear saturation `(|x+1| - |x-1|) / 2`.
pub fn saturation(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// 3x3 correlation with zero padding, accumulated into `out`.
fn correlate_add(w: &[[f64; 3]; 3], src: &Grid<f64>, out: &mut [f64]) {
    let (rows, cols) = src.dims();
    let data = src.as_slice();
    for (dr, wrow) in w.iter().enumerate() {
        for (dc, &weight) in wrow.iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            for r in 0..rows {
                let sr = r as isize + dr as isize - 1;
                if sr < 0 || sr >= rows as isize {
                    continue;
                }
                let srow = &data[sr as usize * cols..(sr as usize + 1) * cols];
                let orow = &mut out[r * cols..(r + 1) * cols];
                for (c, o) in orow.iter_mut().enumerate() {
                    let sc = c as isize + dc as isize - 1;
                    if sc >= 0 && sc < cols as isize {
                        *o += weight * srow[sc as usize];
                    }
                }
            }
        }
    }
}

struct Deriv {
    /// `z + B * u`, constant over a run.
    drive: Vec<f64>,
    fx: Grid<f64>,
}

impl Deriv {
    fn new(u: &Grid<f64>, template: &CnnTemplate) -> Self {
        let mut drive = alloc::vec![template.z; u.len()];
        correlate_add(&template.b, u, &mut drive);
        Deriv {
            drive,
            fx: Grid::filled(u.rows(), u.cols(), 0.0),
        }
    }

    fn eval(&mut self, x: &Grid<f64>, template: &CnnTemplate, out: &mut [f64]) {
        for (f, &v) in self.fx.as_mut_slice().iter_mut().zip(x.iter()) {
            *f = saturation(v);
        }
        for ((o, &d), &v) in out.iter_mut().zip(&self.drive).zip(x.iter()) {
            *o = d - v;
        }
        correlate_add(&template.a, &self.fx, out);
    }
}

/// Right-hand side of the state equation at `state`.
pub fn cnn_derivative(state: &CnnState, template: &CnnTemplate) -> Result<Grid<f64>> {
    state.x.check_dims(&state.u, "input")?;
    let mut d = Deriv::new(&state.u, template);
    let mut out = Grid::filled(state.x.rows(), state.x.cols(), 0.0);
    d.eval(&state.x, template, out.as_mut_slice());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnRun {
    pub x: Grid<f64>,
    pub converged: bool,
    pub t_stop: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// RK4 from `x0` until `max |dx/dt| < tol` or `t_end`.
pub fn cnn_run(
    x0: &Grid<f64>,
    u: &Grid<f64>,
    template: &CnnTemplate,
    dt: f64,
    t_end: f64,
    tol: f64,
) -> Result<CnnRun> {
    x0.check_dims(u, "input")?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("time step must be positive"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::invalid("t_end must be finite and >= 0"));
    }
    let n = x0.len();
    let mut deriv = Deriv::new(u, template);
    let mut x = x0.clone();
    let mut stage = x0.clone();
    let mut k = [
        alloc::vec![0.0; n],
        alloc::vec![0.0; n],
        alloc::vec![0.0; n],
        alloc::vec![0.0; n],
    ];
    let mut t = 0.0;
    let mut step = 0u64;
    loop {
        deriv.eval(&x, template, &mut k[0]);
        if max_abs(&k[0]) < tol {
            return Ok(CnnRun {
                x,
                converged: true,
                t_stop: t,
            });
        }
        if t >= t_end {
            return Ok(CnnRun {
                x,
                converged: false,
                t_stop: t,
            });
        }
        let next = ((step + 1) as f64 * dt).min(t_end);
        let h = next - t;
        for (stage_idx, a) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
            let (prev, rest) = k.split_at_mut(stage_idx);
            for ((s, &xv), &kv) in stage
                .as_mut_slice()
                .iter_mut()
                .zip(x.iter())
                .zip(prev[stage_idx - 1].iter())
            {
                *s = xv + a * h * kv;
            }
            deriv.eval(&stage, template, &mut rest[0]);
        }
        for (i, xv) in x.as_mut_slice().iter_mut().enumerate() {
            *xv += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        t = next;
        step += 1;
        let m = max_abs(x.as_slice());
        if !(m <= BLOWUP_LIMIT) {
            return Err(Error::NumericalBlowup { time: t, magnitude: m });
        }
    }
}
