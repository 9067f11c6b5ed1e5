//! Brute-force reference lattice: dense capacitance matrix, Gaussian
//! elimination per solve, fine fixed-step RK4 and an explicit restart at
//! every threshold crossing. Shares no code with the library simulator.

#![allow(dead_code)]

pub struct DenseLattice {
    pub rows: usize,
    pub cols: usize,
    /// Row-major n x n capacitance matrix.
    pub cap: Vec<f64>,
    pub bias: Vec<f64>,
    pub resistance: f64,
    pub threshold: f64,
    pub amplitude: f64,
    pub period: f64,
    pub phase: f64,
    pub charge: Vec<f64>,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseEvent {
    pub cycle: u64,
    pub time: f64,
    pub row: usize,
    pub col: usize,
}

/// Crossings closer than this are treated as one instant.
const SAME_INSTANT: f64 = 1e-8;

impl DenseLattice {
    /// Open-boundary lattice with uniform nearest-neighbour coupling `c`.
    pub fn new(rows: usize, cols: usize, c: f64, bias: Vec<f64>, amplitude: f64, period: f64) -> Self {
        let n = rows * cols;
        let mut cap = vec![0.0; n * n];
        for r in 0..rows {
            for col in 0..cols {
                let i = r * cols + col;
                cap[i * n + i] += 1.0;
                let mut link = |j: usize| {
                    cap[i * n + i] += c;
                    cap[i * n + j] -= c;
                };
                if r > 0 {
                    link(i - cols);
                }
                if r + 1 < rows {
                    link(i + cols);
                }
                if col > 0 {
                    link(i - 1);
                }
                if col + 1 < cols {
                    link(i + 1);
                }
            }
        }
        DenseLattice {
            rows,
            cols,
            cap,
            bias,
            resistance: 1.0,
            threshold: 0.5,
            amplitude,
            period,
            phase: 0.0,
            charge: vec![0.0; n],
            time: 0.0,
        }
    }

    fn n(&self) -> usize {
        self.rows * self.cols
    }

    /// Solves `C v = q` by Gaussian elimination with partial pivoting.
    pub fn voltages_of(&self, q: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut a = self.cap.clone();
        let mut b = q.to_vec();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                .unwrap();
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                b.swap(k, p);
            }
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i * n + i];
        }
        x
    }

    pub fn voltages(&self) -> Vec<f64> {
        self.voltages_of(&self.charge)
    }

    fn rhs(&self, t: f64, q: &[f64]) -> Vec<f64> {
        let v = self.voltages_of(q);
        let pump = self.amplitude * (2.0 * std::f64::consts::PI * t / self.period + self.phase).sin();
        (0..q.len())
            .map(|i| (self.bias[i] + pump - v[i]) / self.resistance)
            .collect()
    }

    fn rk4(&self, t: f64, q: &[f64], h: f64) -> Vec<f64> {
        let add = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> {
            x.iter().zip(k).map(|(a, b)| a + s * b).collect()
        };
        let k1 = self.rhs(t, q);
        let k2 = self.rhs(t + h / 2.0, &add(q, &k1, h / 2.0));
        let k3 = self.rhs(t + h / 2.0, &add(q, &k2, h / 2.0));
        let k4 = self.rhs(t + h, &add(q, &k3, h));
        (0..q.len())
            .map(|i| q[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }

    fn fire(&mut self, cells: &[usize], cycle: u64, out: &mut Vec<DenseEvent>) {
        for &i in cells {
            self.charge[i] -= 1.0;
            out.push(DenseEvent {
                cycle,
                time: self.time,
                row: i / self.cols,
                col: i % self.cols,
            });
        }
    }

    /// Fires every supra-threshold cell, pass by pass, until none remain.
    fn cascade(&mut self, cycle: u64, out: &mut Vec<DenseEvent>) {
        for _ in 0..1000 {
            let v = self.voltages();
            let above: Vec<usize> = (0..v.len()).filter(|&i| v[i] >= self.threshold).collect();
            if above.is_empty() {
                return;
            }
            self.fire(&above, cycle, out);
        }
        panic!("oracle cascade did not settle");
    }

    /// Integrates to `t_end` with steps no longer than `h`, firing at
    /// threshold crossings located by bisection on re-integrated sub-steps.
    pub fn advance(&mut self, t_end: f64, h: f64, cycle: u64, out: &mut Vec<DenseEvent>) {
        self.cascade(cycle, out);
        while self.time < t_end {
            let step = (t_end - self.time).min(h);
            let next = self.rk4(self.time, &self.charge, step);
            let v_next = self.voltages_of(&next);
            let crossing: Vec<usize> =
                (0..v_next.len()).filter(|&i| v_next[i] >= self.threshold).collect();
            if crossing.is_empty() {
                self.charge = next;
                self.time += step;
                continue;
            }
            let mut times = Vec::new();
            for &i in &crossing {
                let (mut lo, mut hi) = (0.0, step);
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    let q = self.rk4(self.time, &self.charge, mid);
                    if self.voltages_of(&q)[i] >= self.threshold {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                times.push((i, hi));
            }
            let first = times.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
            let group: Vec<usize> = times
                .iter()
                .filter(|t| t.1 <= first + SAME_INSTANT)
                .map(|t| t.0)
                .collect();
            self.charge = self.rk4(self.time, &self.charge, first);
            self.time += first;
            self.fire(&group, cycle, out);
            self.cascade(cycle, out);
        }
        self.time = t_end;
    }

    /// Runs one pump cycle; the returned events all belong to `cycle`.
    pub fn run_cycle(&mut self, cycle: u64, h: f64) -> Vec<DenseEvent> {
        let mut out = Vec::new();
        let end = (cycle + 1) as f64 * self.period;
        self.advance(end, h, cycle, &mut out);
        self.cascade(cycle, &mut out);
        out
    }
}
