//! DIRECT (DIviding RECTangles) global minimization over a box.
//!
//! Canonical Jones–Perttunen–Stuckman scheme: the box is mapped onto the
//! unit hypercube, every rectangle is sampled at its center, and each
//! iteration trisects the potentially optimal rectangles, i.e. those on the
//! lower-right convex hull of (half-diagonal, value) that also promise an
//! `epsilon`-relative improvement over the incumbent.
//!
//! New sample points of one iteration are evaluated in parallel and merged
//! in creation order, so results do not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TransferError};

/// Value assigned to centers where the objective is not finite.
pub const PENALTY: f64 = 1e30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(TransferError::InvalidInput("search box bounds must have equal, nonzero length".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(TransferError::InvalidInput("search box needs lower < upper in every dimension".into()));
        }
        Ok(Self { lower, upper })
    }

    /// `[-half_width, half_width]^dim`.
    pub fn symmetric(half_width: f64, dim: usize) -> Result<Self> {
        Self::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn to_original(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(c, (l, u))| l + c * (u - l))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    /// Center in unit-cube coordinates.
    pub center: Vec<f64>,
    /// Trisections applied per dimension; side length is `3^-side_thirds[i]`.
    pub side_thirds: Vec<u32>,
    pub f_center: f64,
    /// Creation index, equal to the evaluation index of the center.
    pub id: usize,
}

impl Rectangle {
    /// Half-diagonal length.
    pub fn size(&self) -> f64 {
        0.5 * self.side_thirds.iter().map(|&k| 3f64.powi(-2 * k as i32)).sum::<f64>().sqrt()
    }

    pub fn volume(&self) -> f64 {
        self.side_thirds.iter().map(|&k| 3f64.powi(-(k as i32))).product()
    }

    pub fn longest_side(&self) -> f64 {
        3f64.powi(-(*self.side_thirds.iter().min().unwrap() as i32))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// `(evaluation index, best value so far)` at every improvement.
    pub history: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectOptions {
    pub max_evals: usize,
    pub epsilon: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self { max_evals: 3000, epsilon: 1e-4 }
    }
}

/// Iterative DIRECT search; use [`direct_minimize`] for a one-shot run.
pub struct DirectSearch<F> {
    objective: F,
    bounds: SearchBox,
    options: DirectOptions,
    rects: Vec<Rectangle>,
    evaluations: usize,
    iterations: usize,
    best: usize,
    history: Vec<(usize, f64)>,
}

impl<F> DirectSearch<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    /// Evaluates the center of the unit cube.
    pub fn new(objective: F, bounds: SearchBox, options: DirectOptions) -> Result<Self> {
        if options.max_evals == 0 {
            return Err(TransferError::InvalidInput("max_evals must be >= 1".into()));
        }
        if !(options.epsilon >= 0.0) {
            return Err(TransferError::InvalidInput("epsilon must be >= 0".into()));
        }
        let dim = bounds.dim();
        let center = vec![0.5; dim];
        let f = sanitize(objective(&bounds.to_original(&center)));
        Ok(Self {
            objective,
            bounds,
            options,
            rects: vec![Rectangle { center, side_thirds: vec![0; dim], f_center: f, id: 0 }],
            evaluations: 1,
            iterations: 0,
            best: 0,
            history: vec![(0, f)],
        })
    }

    pub fn rectangles(&self) -> &[Rectangle] {
        &self.rects
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Sum of the live rectangle volumes (the unit cube partition).
    pub fn partition_volume(&self) -> f64 {
        // summed in increasing order to keep rounding at the 1e-16 level
        let mut v: Vec<f64> = self.rects.iter().map(Rectangle::volume).collect();
        v.sort_by(f64::total_cmp);
        v.iter().sum()
    }

    pub fn max_side(&self) -> f64 {
        self.rects.iter().map(Rectangle::longest_side).fold(0.0, f64::max)
    }

    /// Indices of the potentially optimal rectangles, largest first.
    pub fn potentially_optimal(&self) -> Vec<usize> {
        // best rectangle of every distinct size, ties to lower value then id
        let mut groups: Vec<(Vec<u32>, f64, usize)> = Vec::new();
        let mut order: Vec<usize> = (0..self.rects.len()).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (&self.rects[a], &self.rects[b]);
            size_key(ra)
                .cmp(&size_key(rb))
                .then(ra.f_center.total_cmp(&rb.f_center))
                .then(ra.id.cmp(&rb.id))
        });
        for i in order {
            let key = size_key(&self.rects[i]);
            if groups.last().map_or(true, |g| g.0 != key) {
                groups.push((key, self.rects[i].size(), i));
            }
        }
        // groups are sorted by decreasing size (key = sorted thirds ascending)
        let fmin = self.rects[self.best].f_center;
        let threshold = fmin - self.options.epsilon * fmin.abs();
        let mut selected = Vec::new();
        for (j, &(_, dj, idx)) in groups.iter().enumerate() {
            let fj = self.rects[idx].f_center;
            let mut k_low: f64 = 0.0;
            let mut k_high = f64::INFINITY;
            for (i, &(_, di, other)) in groups.iter().enumerate() {
                if i == j {
                    continue;
                }
                let fi = self.rects[other].f_center;
                if di < dj {
                    k_low = k_low.max((fj - fi) / (dj - di));
                } else if di > dj {
                    k_high = k_high.min((fi - fj) / (di - dj));
                }
            }
            if k_low > k_high {
                continue;
            }
            if k_high.is_finite() && fj - k_high * dj > threshold {
                continue;
            }
            selected.push(idx);
        }
        selected
    }

    /// Runs one iteration. Returns false once the budget is exhausted.
    pub fn step(&mut self) -> bool {
        if self.evaluations >= self.options.max_evals {
            return false;
        }
        let selected = self.potentially_optimal();

        // plan every division of this iteration before evaluating anything
        struct Plan {
            rect: usize,
            dims: Vec<usize>,
            delta: f64,
        }
        let mut plans = Vec::new();
        let mut budget = self.options.max_evals - self.evaluations;
        for idx in selected {
            let r = &self.rects[idx];
            let kmin = *r.side_thirds.iter().min().unwrap();
            let dims: Vec<usize> = (0..r.side_thirds.len()).filter(|&i| r.side_thirds[i] == kmin).collect();
            let cost = 2 * dims.len();
            if cost > budget {
                break;
            }
            budget -= cost;
            plans.push(Plan { rect: idx, dims, delta: 3f64.powi(-(kmin as i32 + 1)) });
        }
        if plans.is_empty() {
            self.evaluations = self.options.max_evals;
            return false;
        }

        let mut points: Vec<Vec<f64>> = Vec::new();
        for p in &plans {
            for &d in &p.dims {
                for sign in [-1.0, 1.0] {
                    let mut c = self.rects[p.rect].center.clone();
                    c[d] += sign * p.delta;
                    points.push(c);
                }
            }
        }
        let bounds = &self.bounds;
        let objective = &self.objective;
        let values: Vec<f64> =
            points.par_iter().map(|c| sanitize(objective(&bounds.to_original(c)))).collect();

        let mut cursor = 0;
        for p in plans {
            let n = p.dims.len();
            let samples = &values[cursor..cursor + 2 * n];
            let centers = &points[cursor..cursor + 2 * n];
            cursor += 2 * n;

            // split the dimension with the best sample first
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                let wa = samples[2 * a].min(samples[2 * a + 1]);
                let wb = samples[2 * b].min(samples[2 * b + 1]);
                wa.total_cmp(&wb).then(p.dims[a].cmp(&p.dims[b]))
            });
            let mut thirds = self.rects[p.rect].side_thirds.clone();
            let mut children: Vec<(usize, Rectangle)> = Vec::with_capacity(2 * n);
            for &o in &order {
                thirds[p.dims[o]] += 1;
                for s in 0..2 {
                    let slot = 2 * o + s;
                    children.push((
                        slot,
                        Rectangle {
                            center: centers[slot].clone(),
                            side_thirds: thirds.clone(),
                            f_center: samples[slot],
                            id: 0,
                        },
                    ));
                }
            }
            self.rects[p.rect].side_thirds = thirds;
            // ids follow sampling order
            children.sort_by_key(|c| c.0);
            for (_, mut child) in children {
                child.id = self.evaluations;
                self.evaluations += 1;
                let better = child.f_center < self.rects[self.best].f_center;
                self.rects.push(child);
                if better {
                    self.best = self.rects.len() - 1;
                    self.history.push((self.evaluations - 1, self.rects[self.best].f_center));
                }
            }
        }
        self.iterations += 1;
        self.evaluations < self.options.max_evals
    }

    pub fn report(&self) -> OptimizerReport {
        let best = &self.rects[self.best];
        OptimizerReport {
            best_point: self.bounds.to_original(&best.center),
            best_value: best.f_center,
            evaluations: self.evaluations.min(self.rects.len()),
            iterations: self.iterations,
            history: self.history.clone(),
        }
    }
}

/// Sorted-ascending trisection counts identify a rectangle's shape class;
/// lexicographically smaller keys are larger rectangles.
fn size_key(r: &Rectangle) -> Vec<u32> {
    let mut k = r.side_thirds.clone();
    k.sort_unstable();
    k
}

fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        PENALTY
    }
}

/// Minimizes `objective` over `bounds` with at most `max_evals` evaluations.
pub fn direct_minimize<F>(objective: F, bounds: SearchBox, max_evals: usize, epsilon: f64) -> Result<OptimizerReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut search = DirectSearch::new(objective, bounds, DirectOptions { max_evals, epsilon })?;
    while search.step() {}
    Ok(search.report())
}
