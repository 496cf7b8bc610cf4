//! Uniform one-dimensional grids and real-valued sample fields.
//!
//! Every profile handled by the library (`u`, `v`, `ū`, test fields) is a
//! [`Field`]: samples on a [`UniformGrid`] with nodes `x(i) = x_min + i·dx`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
// Inherent f64 methods shadow the trait whenever std is linked; the import
// is what makes `.ceil()`/`.abs()` resolve in pure no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

/// A uniform grid `x(i) = x_min + i·dx`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    x_min: f64,
    dx: f64,
    n: usize,
}

/// Construction errors for grids and fields.
#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    /// Spacing must be positive and finite.
    BadSpacing(f64),
    /// At least two sample points are required.
    TooFewPoints(usize),
    /// `x_min` must be finite.
    BadOrigin(f64),
    /// Field value length does not match the grid point count.
    LengthMismatch { expected: usize, got: usize },
    /// A field value is NaN or infinite.
    NonFiniteValue { index: usize, value: f64 },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::BadSpacing(dx) => write!(f, "grid spacing must be positive and finite, got {dx}"),
            GridError::TooFewPoints(n) => write!(f, "grid needs at least 2 points, got {n}"),
            GridError::BadOrigin(x) => write!(f, "grid origin must be finite, got {x}"),
            GridError::LengthMismatch { expected, got } => {
                write!(f, "field has {got} values but the grid has {expected} points")
            }
            GridError::NonFiniteValue { index, value } => {
                write!(f, "field value at index {index} is not finite: {value}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridError {}

impl UniformGrid {
    /// Grid with `n ≥ 2` points starting at `x_min` with spacing `dx > 0`.
    pub fn new(x_min: f64, dx: f64, n: usize) -> Result<Self, GridError> {
        if !x_min.is_finite() {
            return Err(GridError::BadOrigin(x_min));
        }
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(GridError::BadSpacing(dx));
        }
        if n < 2 {
            return Err(GridError::TooFewPoints(n));
        }
        Ok(UniformGrid { x_min, dx, n })
    }

    /// Grid spanning `[a, b]` with spacing at most `dx_max` (shrunk so the
    /// nodes land exactly on both endpoints).
    pub fn spanning(a: f64, b: f64, dx_max: f64) -> Result<Self, GridError> {
        if !(b > a) {
            return Err(GridError::BadSpacing(b - a));
        }
        if !(dx_max > 0.0) || !dx_max.is_finite() {
            return Err(GridError::BadSpacing(dx_max));
        }
        let cells = ((b - a) / dx_max).ceil() as usize;
        let cells = cells.max(1);
        UniformGrid::new(a, (b - a) / cells as f64, cells + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.dx * (self.n - 1) as f64
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // n ≥ 2 by construction
    }

    /// Node coordinate `x_min + i·dx`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx * i as f64
    }

    /// All node coordinates.
    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Index of the node nearest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = (x - self.x_min) / self.dx;
        if t <= 0.0 {
            0
        } else {
            ((t + 0.5) as usize).min(self.n - 1)
        }
    }

    /// True when `x` lies within `[x_min, x_max]` up to a half-spacing slack.
    pub fn covers(&self, x: f64) -> bool {
        x >= self.x_min - 0.5 * self.dx && x <= self.x_max() + 0.5 * self.dx
    }
}

/// Real-valued samples on a [`UniformGrid`]. All values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl Field {
    /// Wrap samples, checking length and finiteness.
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GridError::NonFiniteValue { index: i, value: v });
            }
        }
        Ok(Field { grid, values })
    }

    /// Sample a function on the grid.
    pub fn sample(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self, GridError> {
        let values: Vec<f64> = grid.xs().map(f).collect();
        Field::new(grid, values)
    }

    /// Constant field.
    pub fn constant(grid: UniformGrid, value: f64) -> Result<Self, GridError> {
        let n = grid.len();
        Field::new(grid, alloc::vec![value; n])
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at node `i`.
    pub fn v(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Replace the samples in place (same grid), revalidating finiteness.
    pub fn set_values(&mut self, values: Vec<f64>) -> Result<(), GridError> {
        let replaced = Field::new(self.grid.clone(), values)?;
        self.values = replaced.values;
        Ok(())
    }

    /// Sup-norm distance to another field on the same grid.
    pub fn sup_distance(&self, other: &Field) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Cubic (4-point Lagrange) interpolation at an arbitrary position,
    /// clamped to the grid range. Falls back to the one-sided stencil near
    /// the ends; exact at the nodes.
    pub fn interp(&self, x: f64) -> f64 {
        interp_cubic(&self.grid, &self.values, x)
    }

    /// Short human-readable summary (for error messages).
    pub fn describe(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = write!(
            s,
            "field on [{:.6}, {:.6}], n = {}, dx = {:.3e}",
            self.grid.x_min(),
            self.grid.x_max(),
            self.grid.len(),
            self.grid.dx()
        );
        s
    }
}

/// Trapezoid-rule integral of nodal `values` over the grid.
pub fn trapezoid(grid: &UniformGrid, values: &[f64]) -> f64 {
    debug_assert_eq!(grid.len(), values.len());
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..n - 1].iter().sum();
    grid.dx() * (0.5 * (values[0] + values[n - 1]) + interior)
}

/// 4-point Lagrange interpolation of `values` at `x` (uniform grid).
///
/// Fourth-order accurate in the interior; clamps the stencil at the ends.
pub(crate) fn interp_cubic(grid: &UniformGrid, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    debug_assert!(n >= 2);
    let t = (x - grid.x_min()) / grid.dx();
    if t <= 0.0 {
        return values[0];
    }
    if t >= (n - 1) as f64 {
        return values[n - 1];
    }
    if n < 4 {
        // linear fallback for tiny grids
        let i = (t as usize).min(n - 2);
        let s = t - i as f64;
        return values[i] * (1.0 - s) + values[i + 1] * s;
    }
    // stencil [k, k+3] containing the cell of x
    let cell = t as usize; // in [0, n-2]
    let k = cell.saturating_sub(1).min(n - 4);
    let s = t - k as f64; // position in stencil units, in (0, 3)
    let (s0, s1, s2, s3) = (s, s - 1.0, s - 2.0, s - 3.0);
    let w0 = -s1 * s2 * s3 / 6.0;
    let w1 = s0 * s2 * s3 / 2.0;
    let w2 = -s0 * s1 * s3 / 2.0;
    let w3 = s0 * s1 * s2 / 6.0;
    w0 * values[k] + w1 * values[k + 1] + w2 * values[k + 2] + w3 * values[k + 3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn grid_basics() {
        let g = UniformGrid::new(-1.0, 0.5, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.x(0), -1.0);
        assert_eq!(g.x(4), 1.0);
        assert_eq!(g.x_max(), 1.0);
        assert!(UniformGrid::new(0.0, 0.0, 5).is_err());
        assert!(UniformGrid::new(0.0, -1.0, 5).is_err());
        assert!(UniformGrid::new(0.0, 1.0, 1).is_err());
        assert!(UniformGrid::new(f64::NAN, 1.0, 4).is_err());
    }

    #[test]
    fn spanning_hits_endpoints() {
        let g = UniformGrid::spanning(-40.0, 40.0, 0.007).unwrap();
        assert!(g.dx() <= 0.007);
        assert!((g.x_max() - 40.0).abs() < 1e-12);
        assert!((g.x_min() + 40.0).abs() < 1e-12);
    }

    #[test]
    fn field_validation() {
        let g = UniformGrid::new(0.0, 1.0, 3).unwrap();
        assert!(Field::new(g.clone(), vec![1.0, 2.0]).is_err());
        assert!(Field::new(g.clone(), vec![1.0, f64::NAN, 2.0]).is_err());
        let f = Field::new(g, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.v(1), 2.0);
    }

    #[test]
    fn nearest_index_clamps() {
        let g = UniformGrid::new(0.0, 1.0, 4).unwrap();
        assert_eq!(g.nearest_index(-5.0), 0);
        assert_eq!(g.nearest_index(0.4), 0);
        assert_eq!(g.nearest_index(0.6), 1);
        assert_eq!(g.nearest_index(99.0), 3);
    }

    #[test]
    fn cubic_interp_reproduces_cubics() {
        // 4-point Lagrange is exact on cubic polynomials.
        let g = UniformGrid::new(-2.0, 0.25, 17).unwrap();
        let p = |x: f64| 0.3 * x * x * x - 1.2 * x * x + x - 0.7;
        let f = Field::sample(g, p).unwrap();
        for &x in &[-1.97, -1.2, -0.3, 0.01, 0.93, 1.49, 1.999] {
            assert!((f.interp(x) - p(x)).abs() < 1e-12, "x = {x}");
        }
        // exact at nodes
        for i in 0..f.len() {
            assert_eq!(f.interp(f.grid().x(i)), f.v(i));
        }
    }

    #[test]
    fn trapezoid_exact_on_linear() {
        let g = UniformGrid::new(0.0, 0.1, 11).unwrap();
        let f = Field::sample(g, |x| 3.0 * x - 1.0).unwrap();
        // ∫₀¹ (3x−1) = 0.5
        assert!((trapezoid(f.grid(), f.values()) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn interp_clamps_outside() {
        let g = UniformGrid::new(0.0, 1.0, 5).unwrap();
        let f = Field::sample(g, |x| x).unwrap();
        assert_eq!(f.interp(-3.0), 0.0);
        assert_eq!(f.interp(9.0), 4.0);
    }
}
