//! Electrostatics of the capacitively coupled lattice.
//!
//! Each cell has unit self-capacitance to ground and a coupling capacitance
//! `c >= 0` to each of its four nearest neighbours. The capacitance matrix
//! (`1 + sum of incident c` on the diagonal, `-c` per coupled pair) is SPD
//! and is factorized once with an envelope (skyline) Cholesky. Cells are
//! ordered line by line along the longer axis so the envelope width is the
//! shorter dimension; with periodic wrap the lines are visited in folded
//! order (0, L-1, 1, L-2, ...) so the wrap edges stay inside a band of two
//! lines.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Grid, Result};

/// Per-edge coupling capacitances, units of the self-capacitance.
///
/// `horizontal[(r, c)]` couples `(r, c)` with `(r, c + 1)` and
/// `vertical[(r, c)]` couples `(r, c)` with `(r + 1, c)`. The last column
/// of `horizontal` and last row of `vertical` are the wraparound edges and
/// are only used with [`Boundary::Periodic`].
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub horizontal: Grid<f64>,
    pub vertical: Grid<f64>,
}

impl Coupling {
    pub fn uniform(rows: usize, cols: usize, c: f64) -> Self {
        Coupling {
            horizontal: Grid::filled(rows, cols, c),
            vertical: Grid::filled(rows, cols, c),
        }
    }

    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        for (name, g) in [("horizontal", &self.horizontal), ("vertical", &self.vertical)] {
            if g.dims() != (rows, cols) {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "{name} coupling is {}x{}, lattice is {rows}x{cols}",
                    g.rows(),
                    g.cols()
                )));
            }
            if g.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
                return Err(Error::invalid("coupling capacitances must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// Electrodes held at fixed voltages around the lattice, each coupled to
/// its adjacent edge cell with capacitance `coupling`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedBoundary {
    pub coupling: f64,
    /// One voltage per column.
    pub top: Vec<f64>,
    pub bottom: Vec<f64>,
    /// One voltage per row.
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl FixedBoundary {
    pub fn uniform(rows: usize, cols: usize, coupling: f64, voltage: f64) -> Self {
        FixedBoundary {
            coupling,
            top: vec![voltage; cols],
            bottom: vec![voltage; cols],
            left: vec![voltage; rows],
            right: vec![voltage; rows],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
    Fixed(FixedBoundary),
}

#[derive(Debug, Clone)]
pub struct CapacitanceOperator {
    rows: usize,
    cols: usize,
    /// cell index -> elimination position
    position: Vec<usize>,
    /// elimination position -> cell index
    order: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    factor: Vec<f64>,
    diag: Vec<f64>,
    /// (a, b, c) with a < b in cell indices.
    edges: Vec<(usize, usize, f64)>,
    boundary_charge: Vec<f64>,
    boundary_voltage: Vec<f64>,
}

fn elimination_order(rows: usize, cols: usize, periodic: bool) -> Vec<usize> {
    // Lines run along the shorter axis.
    let by_rows = cols <= rows;
    let (lines, len) = if by_rows { (rows, cols) } else { (cols, rows) };
    let line_seq: Vec<usize> = if periodic {
        let mut s = Vec::with_capacity(lines);
        let (mut lo, mut hi) = (0usize, lines);
        while lo < hi {
            s.push(lo);
            lo += 1;
            if lo < hi {
                hi -= 1;
                s.push(hi);
            }
        }
        s
    } else {
        (0..lines).collect()
    };
    let mut order = Vec::with_capacity(rows * cols);
    for &line in &line_seq {
        for k in 0..len {
            let (r, c) = if by_rows { (line, k) } else { (k, line) };
            order.push(r * cols + c);
        }
    }
    order
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

impl CapacitanceOperator {
    pub fn new(rows: usize, cols: usize, coupling: &Coupling, boundary: &Boundary) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("lattice must have at least one cell"));
        }
        coupling.validate(rows, cols)?;
        let n = rows * cols;
        let periodic = matches!(boundary, Boundary::Periodic);

        let mut diag = vec![1.0; n];
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut add_edge = |a: usize, b: usize, c: f64, diag: &mut Vec<f64>| {
            if a == b || c == 0.0 {
                return;
            }
            diag[a] += c;
            diag[b] += c;
            edges.push((a.min(b), a.max(b), c));
        };
        for r in 0..rows {
            for c in 0..cols {
                let here = r * cols + c;
                if c + 1 < cols {
                    add_edge(here, here + 1, coupling.horizontal[(r, c)], &mut diag);
                } else if periodic {
                    add_edge(here, r * cols, coupling.horizontal[(r, c)], &mut diag);
                }
                if r + 1 < rows {
                    add_edge(here, here + cols, coupling.vertical[(r, c)], &mut diag);
                } else if periodic {
                    add_edge(here, c, coupling.vertical[(r, c)], &mut diag);
                }
            }
        }

        let mut boundary_charge = vec![0.0; n];
        if let Boundary::Fixed(fb) = boundary {
            if fb.top.len() != cols
                || fb.bottom.len() != cols
                || fb.left.len() != rows
                || fb.right.len() != rows
            {
                return Err(Error::DimensionMismatch(
                    "fixed boundary voltages must match the lattice edges".into(),
                ));
            }
            if !(fb.coupling >= 0.0) || !fb.coupling.is_finite() {
                return Err(Error::invalid("boundary coupling must be finite and >= 0"));
            }
            let cb = fb.coupling;
            for c in 0..cols {
                for (r, v) in [(0, fb.top[c]), (rows - 1, fb.bottom[c])] {
                    diag[r * cols + c] += cb;
                    boundary_charge[r * cols + c] += cb * v;
                }
            }
            for r in 0..rows {
                for (c, v) in [(0, fb.left[r]), (cols - 1, fb.right[r])] {
                    diag[r * cols + c] += cb;
                    boundary_charge[r * cols + c] += cb * v;
                }
            }
        }

        let order = elimination_order(rows, cols, periodic);
        let mut position = vec![0; n];
        for (p, &cell) in order.iter().enumerate() {
            position[cell] = p;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for &(a, b, _) in &edges {
            let (pa, pb) = (position[a], position[b]);
            let (lo, hi) = (pa.min(pb), pa.max(pb));
            first[hi] = first[hi].min(lo);
        }
        let mut offset = Vec::with_capacity(n + 1);
        let mut total = 0;
        for (k, &f) in first.iter().enumerate() {
            offset.push(total);
            total += k - f + 1;
        }
        offset.push(total);

        let mut factor = vec![0.0; total];
        for k in 0..n {
            factor[offset[k] + k - first[k]] = diag[order[k]];
        }
        for &(a, b, c) in &edges {
            let (pa, pb) = (position[a], position[b]);
            let (lo, hi) = (pa.min(pb), pa.max(pb));
            factor[offset[hi] + lo - first[hi]] -= c;
        }

        let mut op = CapacitanceOperator {
            rows,
            cols,
            position,
            order,
            first,
            offset,
            factor,
            diag,
            edges,
            boundary_charge,
            boundary_voltage: Vec::new(),
        };
        op.factorize()?;
        op.boundary_voltage = op.solve(&op.boundary_charge);
        Ok(op)
    }

    fn factorize(&mut self) -> Result<()> {
        let n = self.order.len();
        for k in 0..n {
            let fk = self.first[k];
            let ok = self.offset[k];
            for j in fk..k {
                let fj = self.first[j];
                let oj = self.offset[j];
                let m0 = fk.max(fj);
                let s = {
                    let lk = &self.factor[ok + m0 - fk..ok + j - fk];
                    let lj = &self.factor[oj + m0 - fj..oj + j - fj];
                    dot(lk, lj)
                };
                let djj = self.factor[oj + j - fj];
                let idx = ok + j - fk;
                self.factor[idx] = (self.factor[idx] - s) / djj;
            }
            let row = &self.factor[ok..ok + k - fk];
            let d = self.factor[ok + k - fk] - dot(row, row);
            if !(d > 0.0) {
                return Err(Error::SingularMatrix(self.order[k]));
            }
            self.factor[ok + k - fk] = sqrt(d);
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Stored entries of the Cholesky factor.
    pub fn envelope_size(&self) -> usize {
        self.factor.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Coupled pairs `(a, b, c)` in cell indices, `a < b`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Induced charge from fixed boundary electrodes (zero otherwise).
    pub fn boundary_charge(&self) -> &[f64] {
        &self.boundary_charge
    }

    /// Cell voltages produced by the boundary electrodes alone.
    pub fn boundary_voltage(&self) -> &[f64] {
        &self.boundary_voltage
    }

    /// `C v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.len());
        let mut out: Vec<f64> = self.diag.iter().zip(v).map(|(d, x)| d * x).collect();
        for &(a, b, c) in &self.edges {
            out[a] -= c * v[b];
            out[b] -= c * v[a];
        }
        out
    }

    /// `C^-1 rhs` (homogeneous part only, no boundary contribution).
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let mut scratch = vec![0.0; self.len()];
        self.solve_into(rhs, &mut out, &mut scratch);
        out
    }

    /// Allocation-free form of [`solve`](Self::solve); `scratch` must have
    /// the lattice length.
    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let n = self.len();
        assert!(rhs.len() == n && out.len() == n && scratch.len() == n);
        let y = scratch;
        for (p, &cell) in self.order.iter().enumerate() {
            y[p] = rhs[cell];
        }
        for k in 0..n {
            let fk = self.first[k];
            let ok = self.offset[k];
            let s = dot(&self.factor[ok..ok + k - fk], &y[fk..k]);
            y[k] = (y[k] - s) / self.factor[ok + k - fk];
        }
        for k in (0..n).rev() {
            let fk = self.first[k];
            let ok = self.offset[k];
            let xk = y[k] / self.factor[ok + k - fk];
            y[k] = xk;
            let row = &self.factor[ok..ok + k - fk];
            for (yj, l) in y[fk..k].iter_mut().zip(row) {
                *yj -= l * xk;
            }
        }
        for (cell, o) in out.iter_mut().enumerate() {
            *o = y[self.position[cell]];
        }
    }

    /// Cell voltages for the given charges, including fixed-boundary terms.
    pub fn voltages(&self, charge: &[f64]) -> Vec<f64> {
        let mut v = self.solve(charge);
        for (x, b) in v.iter_mut().zip(&self.boundary_voltage) {
            *x += b;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(op: &CapacitanceOperator, q: &[f64]) -> f64 {
        let v = op.solve(q);
        let cv = op.apply(&v);
        cv.iter()
            .zip(q)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_cell_is_identity() {
        let op = CapacitanceOperator::new(1, 1, &Coupling::uniform(1, 1, 0.3), &Boundary::Open)
            .unwrap();
        assert_eq!(op.solve(&[0.7]), vec![0.7]);
    }

    #[test]
    fn two_cells_match_hand_inverse() {
        let op = CapacitanceOperator::new(1, 2, &Coupling::uniform(1, 2, 0.2), &Boundary::Open)
            .unwrap();
        assert_eq!(op.diagonal(), &[1.2, 1.2]);
        let v = op.solve(&[1.0, 0.0]);
        assert!((v[0] - 6.0 / 7.0).abs() < 1e-14);
        assert!((v[1] - 1.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn zero_coupling_is_identity() {
        let op = CapacitanceOperator::new(3, 4, &Coupling::uniform(3, 4, 0.0), &Boundary::Periodic)
            .unwrap();
        let q: Vec<f64> = (0..12).map(|k| k as f64 * 0.1 - 0.4).collect();
        assert_eq!(op.solve(&q), q);
    }

    #[test]
    fn periodic_envelope_stays_banded() {
        let op =
            CapacitanceOperator::new(16, 16, &Coupling::uniform(16, 16, 0.2), &Boundary::Periodic)
                .unwrap();
        // Folded ordering keeps each row within two lattice lines.
        assert!(op.envelope_size() <= 256 * (2 * 16 + 1));
        let q: Vec<f64> = (0..256).map(|k| ((k * 37) % 11) as f64 - 5.0).collect();
        assert!(residual(&op, &q) <= 1e-10 * 5.0);
        // Uniform charge on a periodic lattice sees no coupling.
        let v = op.solve(&vec![0.3; 256]);
        assert!(v.iter().all(|x| (x - 0.3).abs() < 1e-14));
    }

    #[test]
    fn wide_lattice_uses_column_lines() {
        let op = CapacitanceOperator::new(3, 50, &Coupling::uniform(3, 50, 0.4), &Boundary::Open)
            .unwrap();
        assert!(op.envelope_size() <= 150 * 4);
        let q: Vec<f64> = (0..150).map(|k| (k % 7) as f64).collect();
        assert!(residual(&op, &q) <= 1e-10 * 6.0);
    }

    #[test]
    fn fixed_boundary_moves_voltages_to_rhs() {
        let fb = FixedBoundary::uniform(2, 2, 0.5, 0.8);
        let op = CapacitanceOperator::new(2, 2, &Coupling::uniform(2, 2, 0.1), &Boundary::Fixed(fb))
            .unwrap();
        // Each corner cell touches two electrodes.
        assert!((op.diagonal()[0] - (1.0 + 0.2 + 1.0)).abs() < 1e-15);
        assert!((op.boundary_charge()[0] - 0.8).abs() < 1e-15);
        // With no charge on the cells every cell sits at the symmetric solution
        // v = 2*0.5*0.8 / (1 + 2*0.5).
        let v = op.voltages(&[0.0; 4]);
        for x in v {
            assert!((x - 0.4).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_coupling_rejected() {
        let mut c = Coupling::uniform(2, 2, 0.1);
        c.vertical[(0, 1)] = -0.1;
        assert!(CapacitanceOperator::new(2, 2, &c, &Boundary::Open).is_err());
    }
}
