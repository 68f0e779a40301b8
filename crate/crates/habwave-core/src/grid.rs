//! Uniform one-dimensional grids and sampled fields.
//!
//! A [`SpatialGrid`] discretizes a closed interval `[x_min, x_max]` into `n`
//! evenly spaced points. A [`Field`] carries one value per grid point and
//! evaluates off-grid coordinates by linear interpolation, extending as a
//! constant beyond the edges: the truncation edge is the numerical stand-in
//! for the homogeneous habitat at infinity, where profiles are flat.
//!
//! [`Samples`] holds irregular `(x, y)` data (tabulated kernels, measured
//! habitat profiles, initial states from files) with the same interpolation
//! rule, so everything that enters the solver goes through one code path.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Uniform grid with `n` points on the closed interval `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl SpatialGrid {
    /// Builds a grid; requires finite bounds in increasing order and `n >= 2`.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::invalid("x_min/x_max", "bounds must be finite"));
        }
        if x_min >= x_max {
            return Err(Error::invalid(
                "x_min/x_max",
                format!("need x_min < x_max, got [{x_min}, {x_max}]"),
            ));
        }
        if n < 2 {
            return Err(Error::invalid("n", format!("need at least 2 points, got {n}")));
        }
        Ok(SpatialGrid { x_min, x_max, n })
    }

    /// Left endpoint.
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    /// Right endpoint.
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.n
    }

    /// Grids are never empty; provided for clippy-completeness.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance between neighbouring points.
    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    /// Coordinate of the `i`-th point (0-based, `i < len`).
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        self.x_min + i as f64 * self.spacing()
    }

    /// Iterator over all grid coordinates.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    /// Inclusive index range of grid points inside `[lo, hi]`, or `None` when
    /// the window misses the grid entirely. A half-spacing slack absorbs
    /// floating-point jitter at window edges.
    pub fn index_range(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        if lo > hi {
            return None;
        }
        let h = self.spacing();
        let slack = 1e-9 * h;
        let first = ((lo - self.x_min - slack) / h).ceil().max(0.0);
        let last = ((hi - self.x_min + slack) / h).floor();
        if last < 0.0 || first > (self.n - 1) as f64 || first > last {
            return None;
        }
        let first = first as usize;
        let last = (last as usize).min(self.n - 1);
        Some((first, last))
    }
}

/// Supremum of a quantity over a window, together with how many grid points
/// the window actually contained (`points == 0` means the window was empty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSup {
    /// Largest value seen over the window (0 when the window is empty).
    pub value: f64,
    /// Number of grid points inside the window.
    pub points: usize,
}

/// A field sampled on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpatialGrid,
    values: Vec<f64>,
}

impl Field {
    /// Samples `f` at every grid point.
    pub fn from_fn(grid: SpatialGrid, f: impl FnMut(f64) -> f64) -> Self {
        let values = grid.points().map(f).collect();
        Field { grid, values }
    }

    /// Field with the same value everywhere.
    pub fn constant(grid: SpatialGrid, value: f64) -> Self {
        Field {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Wraps an explicit value vector; its length must match the grid.
    pub fn from_values(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values })
    }

    /// Grid the field lives on.
    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    /// Raw values, one per grid point.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Evaluates at an arbitrary coordinate: linear interpolation between
    /// nodes, constant extension beyond the edges, exact at grid points.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len();
        if x <= self.grid.x_min() {
            return self.values[0];
        }
        if x >= self.grid.x_max() {
            return self.values[n - 1];
        }
        let h = self.grid.spacing();
        let t = (x - self.grid.x_min()) / h;
        let i = (t.floor() as usize).min(n - 2);
        let frac = t - i as f64;
        if frac <= 0.0 {
            return self.values[i];
        }
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Largest value on the grid.
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest value on the grid.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Supremum norm of the difference with `other` over the whole grid.
    pub fn sup_diff(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Supremum of `|self - other|` over grid points in `[lo, hi]`.
    pub fn sup_diff_on(&self, other: &Field, lo: f64, hi: f64) -> Result<WindowSup> {
        self.check_same_grid(other)?;
        Ok(self.window_sup(lo, hi, |i| (self.values[i] - other.values[i]).abs()))
    }

    /// Supremum of `|self|` over grid points in `[lo, hi]`.
    pub fn sup_on(&self, lo: f64, hi: f64) -> WindowSup {
        self.window_sup(lo, hi, |i| self.values[i].abs())
    }

    fn window_sup(&self, lo: f64, hi: f64, f: impl Fn(usize) -> f64) -> WindowSup {
        match self.grid.index_range(lo, hi) {
            None => WindowSup { value: 0.0, points: 0 },
            Some((a, b)) => {
                let value = (a..=b).map(f).fold(0.0, f64::max);
                WindowSup { value, points: b - a + 1 }
            }
        }
    }

    /// Mean values over the outer `fraction` of the grid on each side,
    /// `(left_tail, right_tail)`. Used to read off limiting states of fronts.
    pub fn tail_means(&self, fraction: f64) -> (f64, f64) {
        let n = self.grid.len();
        let m = ((n as f64 * fraction).ceil() as usize).clamp(1, n);
        let left: f64 = self.values[..m].iter().sum::<f64>() / m as f64;
        let right: f64 = self.values[n - m..].iter().sum::<f64>() / m as f64;
        (left, right)
    }

    /// Writes `x,u` rows in full double precision, with a header line.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,u")?;
        for (x, u) in self.grid.points().zip(&self.values) {
            writeln!(w, "{x:.16e},{u:.16e}")?;
        }
        Ok(())
    }

    /// Reads `x,u` rows and resamples them onto `grid` by linear
    /// interpolation (constant beyond the file's range).
    pub fn read_csv(grid: SpatialGrid, r: impl BufRead) -> Result<Self> {
        let samples = Samples::from_csv(r)?;
        Ok(Field::from_fn(grid, |x| samples.eval(x)))
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "fields live on different grids".to_string(),
            ));
        }
        Ok(())
    }
}

/// Irregularly spaced `(x, y)` samples with strictly increasing `x`.
///
/// Evaluation interpolates linearly between neighbours and extends as a
/// constant outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Samples {
    /// Builds from `(x, y)` pairs; sorts by `x` and rejects duplicates,
    /// non-finite entries, and inputs with fewer than two points.
    pub fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::invalid(
                "samples",
                format!("need at least 2 samples, got {}", pairs.len()),
            ));
        }
        if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::invalid("samples", "all samples must be finite"));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("samples", "duplicate x coordinates"));
        }
        let (xs, ys) = pairs.into_iter().unzip();
        Ok(Samples { xs, ys })
    }

    /// Parses two-column CSV (`x,y` rows, optional header).
    pub fn from_csv(r: impl BufRead) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut pairs = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Precondition(format!(
                    "csv row {} has {} fields, expected 2",
                    line + 1,
                    record.len()
                )));
            }
            let x = record[0].parse::<f64>();
            let y = record[1].parse::<f64>();
            match (x, y) {
                (Ok(x), Ok(y)) => pairs.push((x, y)),
                // A non-numeric first row is a header; anywhere else it is an error.
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Precondition(format!(
                        "csv row {} is not numeric: {:?}",
                        line + 1,
                        record
                    )))
                }
            }
        }
        Samples::from_pairs(pairs)
    }

    /// Smallest sampled coordinate.
    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    /// Largest sampled coordinate.
    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Sampled values.
    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Sampled coordinates (strictly increasing).
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// Linear interpolation, constant beyond the sampled range.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.x_min() {
            return self.ys[0];
        }
        if x >= self.x_max() {
            return *self.ys.last().unwrap();
        }
        // partition_point returns the first index with xs[i] > x; x is
        // strictly inside the range, so 1 <= i <= len-1.
        let i = self.xs.partition_point(|&xi| xi <= x);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        y0 + (x - x0) / (x1 - x0) * (y1 - y0)
    }

    /// Trapezoid-rule integral of `f(x, y)` over the sampled range.
    pub fn trapezoid(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.xs.len() {
            let dx = self.xs[i] - self.xs[i - 1];
            let fa = f(self.xs[i - 1], self.ys[i - 1]);
            let fb = f(self.xs[i], self.ys[i]);
            acc += 0.5 * dx * (fa + fb);
        }
        acc
    }
}
