use rayon::prelude::*;
use serde::Serialize;

use super::curvature::{riemann, CurvatureMode};
use super::metric::Metric;
use super::Point;
use crate::error::{Error, Result};

/// Tensor-product grid, one coordinate list per axis. Points are visited in
/// lexicographic order with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.is_empty()) {
            return Err(Error::invalid("grid", "every axis needs at least one point"));
        }
        Ok(Grid { axes })
    }

    /// `count` evenly spaced values on `[lo, hi]`, endpoints included, on
    /// each of `n` axes.
    pub fn uniform(n: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        Grid::new(vec![linspace(lo, hi, count)?; n])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (a, axis) in self.axes.iter().enumerate().rev() {
            idx[a] = flat % axis.len();
            flat /= axis.len();
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Point {
        Point(
            self.index(flat)
                .into_iter()
                .zip(&self.axes)
                .map(|(i, axis)| axis[i])
                .collect(),
        )
    }
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("grid", "need finite bounds and a positive count"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k == count - 1 { hi } else { lo + step * k as f64 })
        .collect())
}

/// Outcome of a flatness scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    #[serde(rename = "max_abs_R")]
    pub max_abs_r: f64,
    pub argmax_point: Point,
    pub argmax_index: Vec<usize>,
    pub pass: bool,
    pub tol: f64,
    pub points: usize,
    /// Max |R| at each grid point, in grid order.
    #[serde(skip)]
    pub per_point: Vec<f64>,
}

/// Max |R^i_jkl| over every grid point. Points are evaluated in parallel;
/// the result does not depend on evaluation order (ties go to the smallest
/// grid index, and the first failing point in grid order is reported).
pub fn flatness_scan<M: Metric + ?Sized>(
    metric: &M,
    grid: &Grid,
    tol: f64,
    mode: CurvatureMode,
) -> Result<ScanReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    if grid.dim() != metric.dim() {
        return Err(Error::invalid(
            "grid",
            format!("grid has {} axes, metric has dimension {}", grid.dim(), metric.dim()),
        ));
    }
    let results: Vec<Result<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x = grid.point(k);
            riemann(metric, &x, mode)
                .map(|r| r.max_abs())
                .map_err(|e| Error::AtPoint {
                    point: x.0,
                    source: Box::new(e),
                })
        })
        .collect();
    let per_point = results.into_iter().collect::<Result<Vec<f64>>>()?;
    let (best_at, max_abs_r) = per_point
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(ScanReport {
        max_abs_r,
        argmax_point: grid.point(best_at),
        argmax_index: grid.index(best_at),
        pass: max_abs_r <= tol,
        tol,
        points: per_point.len(),
        per_point,
    })
}
