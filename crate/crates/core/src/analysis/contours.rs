//! Regions of the `(beta1, alpha1)` square, at `alpha2 = beta2 = 0`, that give
//! entangled joint states, traced with marching squares on the concurrence
//! margin.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::boundary::BoundaryCurve;
use crate::error::Result;
use crate::measures::concurrence_margin;
use crate::states::{initial_qubit_state, rho_sr};
use crate::statistics::{Grid1D, ENTANGLEMENT_THRESHOLD};
use crate::transfer_tensor::TransferTensor;

/// Sampled field with `beta1` along x and `alpha1` along y.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneField {
    pub grid: Grid1D,
    /// `values[ix * n + iy]`.
    pub values: Vec<f64>,
}

impl PlaneField {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.len() + iy]
    }

    pub fn inside(&self, ix: usize, iy: usize) -> bool {
        self.at(ix, iy) > ENTANGLEMENT_THRESHOLD
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreimageContour {
    pub lambda_r: f64,
    pub lambda_s: f64,
    /// Closed loops of `(beta1, alpha1)` points around the entangled region.
    pub polylines: Vec<Vec<(f64, f64)>>,
    pub area: f64,
    /// Connected pieces of the region on the grid.
    pub components: usize,
    /// One piece and no enclosed separable holes.
    pub simply_connected: bool,
}

impl PreimageContour {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn max_alpha1(&self) -> f64 {
        self.polylines.iter().flatten().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_beta1(&self) -> f64 {
        self.polylines.iter().flatten().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Concurrence margin on the `(beta1, alpha1)` grid.
pub fn margin_field(t: &TransferTensor<f64>, lambda_s: f64, lambda_r: f64, grid: Grid1D) -> Result<PlaneField> {
    let n = grid.len();
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (beta1, alpha1) = (grid.node(k / n), grid.node(k % n));
            let s = initial_qubit_state(lambda_s, alpha1, 0.0);
            let r = initial_qubit_state(lambda_r, beta1, 0.0);
            concurrence_margin(&rho_sr(t, &s, &r))
        })
        .collect::<Result<_>>()?;
    Ok(PlaneField { grid, values })
}

/// Grid edge identified by its lower/left node and direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Edge {
    ix: i64,
    iy: i64,
    vertical: bool,
}

struct Tracer<'a> {
    field: &'a PlaneField,
    level: f64,
}

impl Tracer<'_> {
    /// Node value; nodes just outside the square count as separable.
    fn value(&self, ix: i64, iy: i64) -> Option<f64> {
        let n = self.field.len() as i64;
        (0..n).contains(&ix).then_some(())?;
        (0..n).contains(&iy).then_some(())?;
        Some(self.field.at(ix as usize, iy as usize))
    }

    fn is_in(&self, ix: i64, iy: i64) -> bool {
        self.value(ix, iy).is_some_and(|v| v > self.level)
    }

    fn coord(&self, i: i64) -> f64 {
        self.field.grid.node(i as usize)
    }

    /// Crossing point on an edge. On edges leaving the square the point is
    /// pinned to the node inside it, so the outline follows the border.
    fn point(&self, e: Edge) -> (f64, f64) {
        let (ix2, iy2) = if e.vertical { (e.ix, e.iy + 1) } else { (e.ix + 1, e.iy) };
        match (self.value(e.ix, e.iy), self.value(ix2, iy2)) {
            (Some(a), Some(b)) => {
                let s = ((self.level - a) / (b - a)).clamp(0.0, 1.0);
                let (x0, y0) = (self.coord(e.ix), self.coord(e.iy));
                let (x1, y1) = (self.coord(ix2), self.coord(iy2));
                (x0 + s * (x1 - x0), y0 + s * (y1 - y0))
            }
            (Some(_), None) => (self.coord(e.ix), self.coord(e.iy)),
            (None, Some(_)) => (self.coord(ix2), self.coord(iy2)),
            (None, None) => unreachable!("edge with no node inside the square"),
        }
    }

    /// Marching-squares segments for the padded grid, cells `-1..n`.
    fn segments(&self) -> Vec<(Edge, Edge)> {
        let n = self.field.len() as i64;
        let mut out = Vec::new();
        for ix in -1..n {
            for iy in -1..n {
                let corners = [
                    self.is_in(ix, iy),
                    self.is_in(ix + 1, iy),
                    self.is_in(ix + 1, iy + 1),
                    self.is_in(ix, iy + 1),
                ];
                let bottom = Edge { ix, iy, vertical: false };
                let right = Edge { ix: ix + 1, iy, vertical: true };
                let top = Edge { ix, iy: iy + 1, vertical: false };
                let left = Edge { ix, iy, vertical: true };
                let case = corners.iter().enumerate().fold(0, |acc, (k, &c)| acc | ((c as u8) << k));
                let mut push = |a, b| out.push((a, b));
                match case {
                    0 | 15 => {}
                    1 | 14 => push(left, bottom),
                    2 | 13 => push(bottom, right),
                    3 | 12 => push(left, right),
                    4 | 11 => push(right, top),
                    6 | 9 => push(bottom, top),
                    7 | 8 => push(left, top),
                    5 | 10 => {
                        let centre = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)]
                            .iter()
                            .map(|&(a, b)| self.value(a, b).unwrap_or(self.level - 1.0))
                            .sum::<f64>()
                            / 4.0;
                        let joined = centre > self.level;
                        if (case == 5) == joined {
                            push(left, top);
                            push(bottom, right);
                        } else {
                            push(left, bottom);
                            push(right, top);
                        }
                    }
                    _ => unreachable!(),
                }
            }
        }
        out
    }

    /// Links segments into closed loops.
    fn loops(&self) -> Vec<Vec<(f64, f64)>> {
        let segments = self.segments();
        let mut adjacency: HashMap<Edge, Vec<usize>> = HashMap::new();
        for (k, (a, b)) in segments.iter().enumerate() {
            adjacency.entry(*a).or_default().push(k);
            adjacency.entry(*b).or_default().push(k);
        }
        let mut used = vec![false; segments.len()];
        let mut loops = Vec::new();
        for start in 0..segments.len() {
            if used[start] {
                continue;
            }
            used[start] = true;
            let (first, mut current) = segments[start];
            let mut chain = vec![self.point(first), self.point(current)];
            while current != first {
                let next = adjacency[&current].iter().copied().find(|&k| !used[k]);
                let Some(k) = next else { break };
                used[k] = true;
                let (a, b) = segments[k];
                current = if a == current { b } else { a };
                chain.push(self.point(current));
            }
            loops.push(chain);
        }
        loops
    }

    /// Area of the region under linear interpolation along cell edges.
    fn area(&self) -> f64 {
        let n = self.field.len() as i64;
        let mut total = 0.0;
        for ix in 0..n - 1 {
            for iy in 0..n - 1 {
                let corners = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)];
                let mut poly = Vec::with_capacity(8);
                for k in 0..4 {
                    let (a, b) = (corners[k], corners[(k + 1) % 4]);
                    if self.is_in(a.0, a.1) {
                        poly.push((self.coord(a.0), self.coord(a.1)));
                    }
                    if self.is_in(a.0, a.1) != self.is_in(b.0, b.1) {
                        let e = match k {
                            0 => Edge { ix, iy, vertical: false },
                            1 => Edge { ix: ix + 1, iy, vertical: true },
                            2 => Edge { ix, iy: iy + 1, vertical: false },
                            _ => Edge { ix, iy, vertical: true },
                        };
                        poly.push(self.point(e));
                    }
                }
                total += shoelace(&poly).abs();
            }
        }
        total
    }
}

fn shoelace(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    (0..n).map(|k| poly[k].0 * poly[(k + 1) % n].1 - poly[(k + 1) % n].0 * poly[k].1).sum::<f64>() / 2.0
}

/// Number of 4-connected groups of nodes where `member` holds, on the grid
/// padded by one ring of non-members when `padded` is set (the ring is
/// counted as a member instead, to join everything touching the border).
fn count_components(n: usize, member: impl Fn(i64, i64) -> bool, ring: bool, diagonal: bool) -> usize {
    let lo = if ring { -1 } else { 0 };
    let hi = if ring { n as i64 + 1 } else { n as i64 };
    let size = (hi - lo) as usize;
    let idx = |x: i64, y: i64| ((x - lo) as usize) * size + (y - lo) as usize;
    let is_member = |x: i64, y: i64| {
        let border = x < 0 || y < 0 || x >= n as i64 || y >= n as i64;
        if border {
            ring
        } else {
            member(x, y)
        }
    };
    let mut seen = vec![false; size * size];
    let mut count = 0;
    let mut steps: Vec<(i64, i64)> = vec![(1, 0), (-1, 0), (0, 1), (0, -1)];
    if diagonal {
        steps.extend([(1, 1), (1, -1), (-1, 1), (-1, -1)]);
    }
    for x in lo..hi {
        for y in lo..hi {
            if seen[idx(x, y)] || !is_member(x, y) {
                continue;
            }
            count += 1;
            let mut stack = vec![(x, y)];
            seen[idx(x, y)] = true;
            while let Some((cx, cy)) = stack.pop() {
                for (dx, dy) in &steps {
                    let (nx, ny) = (cx + dx, cy + dy);
                    if nx < lo || ny < lo || nx >= hi || ny >= hi || seen[idx(nx, ny)] || !is_member(nx, ny) {
                        continue;
                    }
                    seen[idx(nx, ny)] = true;
                    stack.push((nx, ny));
                }
            }
        }
    }
    count
}

/// Outline, area and connectivity of the entangled part of a sampled plane.
pub fn contour_from_field(field: &PlaneField, lambda_r: f64, lambda_s: f64) -> PreimageContour {
    let tracer = Tracer { field, level: ENTANGLEMENT_THRESHOLD };
    let n = field.len();
    let components = count_components(n, |x, y| field.inside(x as usize, y as usize), false, false);
    // Separable nodes joined (8-connected) with the outside ring: more than
    // one group means a hole.
    let outside = count_components(n, |x, y| !field.inside(x as usize, y as usize), true, true);
    PreimageContour {
        lambda_r,
        lambda_s,
        polylines: tracer.loops(),
        area: tracer.area(),
        components,
        simply_connected: components <= 1 && outside == 1,
    }
}

pub fn preimage_contours(t: &TransferTensor<f64>, lambda_pairs: &[(f64, f64)], grid: Grid1D) -> Result<Vec<PreimageContour>> {
    lambda_pairs
        .iter()
        .map(|&(lambda_r, lambda_s)| {
            let field = margin_field(t, lambda_s, lambda_r, grid)?;
            Ok(contour_from_field(&field, lambda_r, lambda_s))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedScan {
    pub shift: f64,
    pub contours: Vec<PreimageContour>,
    /// Displaced points that left the unit square, `(lambda_r, lambda_s)`.
    pub skipped: Vec<(f64, f64)>,
}

/// Contours for every point of `B` moved by `shift` along the diagonal
/// direction `(1, 1) / sqrt 2`. Points pushed out of the unit square are
/// listed in `skipped` instead.
pub fn shifted_boundary_scan(
    t: &TransferTensor<f64>,
    boundary: &BoundaryCurve,
    shift: f64,
    grid: Grid1D,
) -> Result<ShiftedScan> {
    if !(shift >= 0.0) {
        return Err(crate::Error::InvalidArgument(format!("shift must be nonnegative, got {shift}")));
    }
    let d = shift / std::f64::consts::SQRT_2;
    let (inside, skipped): (Vec<(f64, f64)>, Vec<(f64, f64)>) = boundary
        .points
        .iter()
        .map(|&(lr, ls)| (lr + d, ls + d))
        .partition(|&(lr, ls)| (0.0..=1.0).contains(&lr) && (0.0..=1.0).contains(&ls));
    Ok(ShiftedScan { shift, contours: preimage_contours(t, &inside, grid)?, skipped })
}

/// Contour rows `contour_id,beta1,alpha1`, one id per closed loop, preceded by
/// `# key=value` lines describing each eigenvalue pair.
pub fn write_contours_csv<W: std::io::Write>(contours: &[PreimageContour], mut w: W) -> Result<()> {
    let mut id = 0;
    for c in contours {
        writeln!(
            w,
            "# lambda_r={} lambda_s={} area={} components={} simply_connected={} loops={}..{}",
            c.lambda_r,
            c.lambda_s,
            c.area,
            c.components,
            c.simply_connected,
            id,
            id + c.polylines.len()
        )?;
    }
    writeln!(w, "contour_id,beta1,alpha1")?;
    for c in contours {
        for line in &c.polylines {
            for &(b, a) in line {
                writeln!(w, "{id},{b},{a}")?;
            }
            id += 1;
        }
    }
    Ok(())
}
