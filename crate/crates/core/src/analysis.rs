//! Phase-state maps and the measurements taken on them: attractor period,
//! pattern centroid drift, edge/corner outlining and threshold segmentation.

use alloc::vec::Vec;

use crate::network::{NetworkEvent, RunRecord};
use crate::{Error, Grid, Result};

/// Binary phase map: `true` where a cell tunneled during the cycle.
pub type PhaseMap = Grid<bool>;

/// n-ary phase map: firing-cycle residue mod `order`, `None` for unlocked
/// or silent cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMap {
    pub order: u32,
    pub classes: Grid<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseMapSequence {
    pub maps: Vec<PhaseMap>,
    /// Leading cycles excluded from analysis.
    pub transient_skip: usize,
}

impl PhaseMapSequence {
    pub fn new(maps: Vec<PhaseMap>, transient_skip: usize) -> Result<Self> {
        let first = maps.first().ok_or(Error::EmptyWindow)?;
        if let Some(bad) = maps.iter().find(|m| !m.same_dims(first)) {
            return Err(Error::DimensionMismatch(alloc::format!(
                "map is {}x{}, sequence is {}x{}",
                bad.rows(),
                bad.cols(),
                first.rows(),
                first.cols()
            )));
        }
        Ok(PhaseMapSequence {
            maps,
            transient_skip,
        })
    }

    pub fn from_record(record: &RunRecord, transient_skip: usize) -> Result<Self> {
        PhaseMapSequence::new(record.phase_maps.clone(), transient_skip)
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.maps[0].dims()
    }

    /// Maps after the transient, with their absolute cycle indices.
    pub fn analyzed(&self) -> impl Iterator<Item = (usize, &PhaseMap)> {
        self.maps.iter().enumerate().skip(self.transient_skip)
    }
}

fn events_in_cycles(events: &[NetworkEvent], from: u64, to: u64) -> &[NetworkEvent] {
    let lo = events.partition_point(|e| e.cycle < from);
    let hi = events.partition_point(|e| e.cycle < to);
    &events[lo..hi]
}

/// Cell is set iff it tunneled at least once during `cycle`.
pub fn phase_map_for_cycle(record: &RunRecord, cycle: usize) -> Result<PhaseMap> {
    if cycle >= record.cycles() {
        return Err(Error::IndexOutOfRange {
            index: cycle,
            len: record.cycles(),
        });
    }
    let mut map = Grid::filled(record.rows(), record.cols(), false);
    for e in events_in_cycles(&record.events, cycle as u64, cycle as u64 + 1) {
        map[(e.row, e.col)] = true;
    }
    Ok(map)
}

/// Per-cell firing residue mod `order` over the cycles in `window`.
///
/// A cell whose events all fall on the same residue gets that class; cells
/// with drifting residues, or no events, are `None`.
pub fn phase_class_map(
    record: &RunRecord,
    window: core::ops::Range<usize>,
    order: u32,
) -> Result<ClassMap> {
    if order == 0 {
        return Err(Error::invalid("lock order must be >= 1"));
    }
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let (rows, cols) = (record.rows(), record.cols());
    // None: silent so far; Some(Some(r)): consistent residue; Some(None): drifting.
    let mut seen: Grid<Option<Option<u32>>> = Grid::filled(rows, cols, None);
    for e in events_in_cycles(&record.events, window.start as u64, window.end as u64) {
        let residue = (e.cycle % order as u64) as u32;
        let slot = &mut seen[(e.row, e.col)];
        *slot = match *slot {
            None => Some(Some(residue)),
            Some(Some(r)) if r == residue => Some(Some(r)),
            _ => Some(None),
        };
    }
    Ok(ClassMap {
        order,
        classes: seen.map(|s| s.flatten()),
    })
}

/// Smallest `P` in `1..=max_period` such that every post-transient map
/// equals the map `P` cycles later. Only periods seen at least twice in
/// the analyzed part are considered.
pub fn detect_period(seq: &PhaseMapSequence, max_period: usize) -> Option<usize> {
    let maps = &seq.maps;
    let start = seq.transient_skip.min(maps.len());
    let available = maps.len() - start;
    for p in 1..=max_period.min(available / 2) {
        if (start..maps.len() - p).all(|i| maps[i] == maps[i + p]) {
            return Some(p);
        }
    }
    None
}

/// Mean row/column of set cells per analyzed cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidTrack {
    /// `(cycle, centroid)`; centroid is `None` for an empty map.
    pub points: Vec<(usize, Option<(f64, f64)>)>,
}

impl CentroidTrack {
    /// Cycles whose map had no set cell.
    pub fn skipped(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().filter(|p| p.1.is_none()).map(|p| p.0)
    }

    pub fn valid(&self) -> impl Iterator<Item = (usize, (f64, f64))> + '_ {
        self.points.iter().filter_map(|&(k, c)| c.map(|c| (k, c)))
    }

    /// Net column displacement, last minus first valid centroid, when the
    /// column sequence is monotone (non-decreasing or non-increasing).
    pub fn monotone_column_shift(&self) -> Option<f64> {
        let cols: Vec<f64> = self.valid().map(|(_, p)| p.1).collect();
        let first = *cols.first()?;
        let last = *cols.last()?;
        let up = cols.windows(2).all(|w| w[1] >= w[0]);
        let down = cols.windows(2).all(|w| w[1] <= w[0]);
        (up || down).then_some(last - first)
    }
}

pub fn centroid(map: &PhaseMap) -> Option<(f64, f64)> {
    let (mut n, mut sr, mut sc) = (0usize, 0.0, 0.0);
    for (r, c, &set) in map.indexed() {
        if set {
            n += 1;
            sr += r as f64;
            sc += c as f64;
        }
    }
    (n > 0).then(|| (sr / n as f64, sc / n as f64))
}

pub fn centroid_track(seq: &PhaseMapSequence) -> Result<CentroidTrack> {
    let points: Vec<_> = seq.analyzed().map(|(k, m)| (k, centroid(m))).collect();
    if points.iter().all(|p| p.1.is_none()) {
        return Err(Error::AllEmpty);
    }
    Ok(CentroidTrack { points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn score(predicted: &Grid<bool>, truth: &Grid<bool>) -> Prf {
        let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
        for (&p, &t) in predicted.iter().zip(truth.iter()) {
            match (p, t) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                _ => {}
            }
        }
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fneg == 0 { 0.0 } else { tp as f64 / (tp + fneg) as f64 };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetScore {
    /// Score per analyzed cycle, `(cycle, score)`.
    pub per_cycle: Vec<(usize, Prf)>,
    /// Highest F1; the earliest cycle wins ties.
    pub best: (usize, Prf),
}

/// Inner 4-neighbourhood boundary of a mask: set cells with an unset
/// 4-neighbour or lying on the grid edge.
pub fn inner_boundary(mask: &Grid<bool>) -> Grid<bool> {
    let (rows, cols) = mask.dims();
    Grid::from_fn(rows, cols, |r, c| {
        if !mask[(r, c)] {
            return false;
        }
        r == 0
            || c == 0
            || r + 1 == rows
            || c + 1 == cols
            || !mask[(r - 1, c)]
            || !mask[(r + 1, c)]
            || !mask[(r, c - 1)]
            || !mask[(r, c + 1)]
    })
}

/// Corner cells of a mask (set cells missing a vertical and a horizontal
/// neighbour), dilated by `radius` in the Chebyshev metric.
pub fn corner_mask(mask: &Grid<bool>, radius: usize) -> Grid<bool> {
    let (rows, cols) = mask.dims();
    let at = |r: isize, c: isize| {
        r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols && mask[(r as usize, c as usize)]
    };
    let corners = Grid::from_fn(rows, cols, |r, c| {
        let (ri, ci) = (r as isize, c as isize);
        at(ri, ci)
            && (!at(ri - 1, ci) || !at(ri + 1, ci))
            && (!at(ri, ci - 1) || !at(ri, ci + 1))
    });
    let rad = radius as isize;
    Grid::from_fn(rows, cols, |r, c| {
        let (ri, ci) = (r as isize, c as isize);
        (-rad..=rad).any(|dr| {
            (-rad..=rad).any(|dc| {
                let (rr, cc) = (ri + dr, ci + dc);
                rr >= 0
                    && cc >= 0
                    && (rr as usize) < rows
                    && (cc as usize) < cols
                    && corners[(rr as usize, cc as usize)]
            })
        })
    })
}

fn check_mask(mask: &Grid<bool>) -> Result<()> {
    let set = mask.iter().filter(|&&b| b).count();
    if set == 0 || set == mask.len() {
        return Err(Error::DegenerateMask);
    }
    Ok(())
}

/// Per-cycle precision/recall/F1 of the maps against an arbitrary target.
pub fn target_score(seq: &PhaseMapSequence, target: &Grid<bool>) -> Result<TargetScore> {
    if seq.dims() != target.dims() {
        return Err(Error::DimensionMismatch("target does not match the maps".into()));
    }
    let per_cycle: Vec<(usize, Prf)> =
        seq.analyzed().map(|(k, m)| (k, Prf::score(m, target))).collect();
    let best = per_cycle
        .iter()
        .copied()
        .fold(None, |acc: Option<(usize, Prf)>, cur| match acc {
            Some(a) if a.1.f1 >= cur.1.f1 => Some(a),
            _ => Some(cur),
        })
        .ok_or(Error::EmptyWindow)?;
    Ok(TargetScore { per_cycle, best })
}

/// Scores each cycle against the inner boundary of `input_mask`.
pub fn edge_score(seq: &PhaseMapSequence, input_mask: &Grid<bool>) -> Result<TargetScore> {
    check_mask(input_mask)?;
    target_score(seq, &inner_boundary(input_mask))
}

/// Scores each cycle against the dilated corners of `input_mask`.
pub fn corner_score(
    seq: &PhaseMapSequence,
    input_mask: &Grid<bool>,
    radius: usize,
) -> Result<TargetScore> {
    check_mask(input_mask)?;
    target_score(seq, &corner_mask(input_mask, radius))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segmentation {
    pub threshold: f64,
    pub agreement: f64,
}

/// Best agreement between `map` and `gray >= threshold` over every distinct
/// input value as threshold, plus `+inf` (the all-false partition); ties go
/// to the smaller threshold.
pub fn segmentation_score(map: &PhaseMap, gray: &Grid<f64>) -> Result<Segmentation> {
    map.check_dims(gray, "gray input")?;
    if gray.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut cells: Vec<(f64, bool)> = gray.iter().copied().zip(map.iter().copied()).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = cells.len();
    // With threshold cells[i].0, cells[i..] predict set.
    let set_total = cells.iter().filter(|c| c.1).count();
    let mut unset_below = 0usize;
    let mut set_below = 0usize;
    let mut best: Option<Segmentation> = None;
    let mut i = 0;
    while i < n {
        let value = cells[i].0;
        let agree = unset_below + (set_total - set_below);
        let agreement = agree as f64 / n as f64;
        if best.is_none_or(|b| agreement > b.agreement) {
            best = Some(Segmentation {
                threshold: value,
                agreement,
            });
        }
        while i < n && cells[i].0 == value {
            if cells[i].1 {
                set_below += 1;
            } else {
                unset_below += 1;
            }
            i += 1;
        }
    }
    let all_false = unset_below as f64 / n as f64;
    if best.is_none_or(|b| all_false > b.agreement) {
        best = Some(Segmentation {
            threshold: f64::INFINITY,
            agreement: all_false,
        });
    }
    Ok(best.expect("non-empty input"))
}

/// Best segmentation over the analyzed cycles whose map has both set and
/// unset cells; earliest cycle wins ties. A constant map only reproduces
/// the trivial all-true or all-false partition, so it is never selected.
pub fn best_segmentation(
    seq: &PhaseMapSequence,
    gray: &Grid<f64>,
) -> Result<(usize, Segmentation)> {
    let mut best: Option<(usize, Segmentation)> = None;
    for (k, m) in seq.analyzed() {
        let set = m.iter().filter(|&&b| b).count();
        if set == 0 || set == m.len() {
            continue;
        }
        let s = segmentation_score(m, gray)?;
        if best.is_none_or(|b| s.agreement > b.1.agreement) {
            best = Some((k, s));
        }
    }
    best.ok_or(Error::AllEmpty)
}
