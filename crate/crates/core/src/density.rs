//! Density of `u = aᵀx` for `x` uniform on `[-1, 1]^m`.
//!
//! Each term `a_i x_i` is uniform on `[-|a_i|, |a_i|]`, so the induced density
//! is the repeated convolution of scaled box densities. The convolution runs
//! on an odd, equispaced grid spanning the exact support `[-Σ|a_i|, Σ|a_i|]`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::par;

/// Grid sizes above this use the FFT convolution path.
pub const FFT_THRESHOLD: usize = 4096;

/// Unit-norm direction `a` defining the ridge variable `u = aᵀx`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeDirection {
    components: Vec<f64>,
}

impl RidgeDirection {
    /// Normalizes `components` to unit 2-norm.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() || components.iter().any(|c| !c.is_finite()) {
            return Err(Error::ZeroDirection);
        }
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroDirection);
        }
        Ok(Self {
            components: components.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// The normalized ones vector `(1, …, 1)/√m`.
    pub fn ones(dim: usize) -> Result<Self> {
        Self::new(vec![1.0; dim])
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `aᵀx`.
    pub fn project(&self, x: &[f64]) -> f64 {
        self.components.iter().zip(x).map(|(a, x)| a * x).sum()
    }

    /// Interval `[aᵀsign(-a), aᵀsign(a)]` swept by `aᵀx` over the hypercube.
    pub fn support_bounds(&self) -> (f64, f64) {
        let right: f64 = self.components.iter().map(|c| c.abs()).sum();
        (-right, right)
    }

    /// Corner `sign(a)` maximizing `aᵀx`; zero components map to 0.
    pub fn upper_corner(&self) -> Vec<f64> {
        self.components.iter().map(|&c| sign(c)).collect()
    }

    /// Corner `sign(-a)` minimizing `aᵀx`.
    pub fn lower_corner(&self) -> Vec<f64> {
        self.components.iter().map(|&c| sign(-c)).collect()
    }
}

fn sign(c: f64) -> f64 {
    if c > 0.0 {
        1.0
    } else if c < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Free-function form of [`RidgeDirection::support_bounds`].
pub fn support_bounds(a: &RidgeDirection) -> (f64, f64) {
    a.support_bounds()
}

/// Density values on the equispaced grid `u_j = u_left + j Δu`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    u_left: f64,
    u_right: f64,
    values: Vec<f64>,
}

impl DensityGrid {
    /// Wraps raw grid values. `values.len()` must be odd and at least 3.
    pub fn new(u_left: f64, u_right: f64, values: Vec<f64>) -> Result<Self> {
        check_grid_size(values.len())?;
        if !(u_left < u_right) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must satisfy u_left < u_right, got [{u_left}, {u_right}]"
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "density values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            u_left,
            u_right,
            values,
        })
    }

    pub fn u_left(&self) -> f64 {
        self.u_left
    }

    pub fn u_right(&self) -> f64 {
        self.u_right
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        (self.u_right - self.u_left) / (self.n_points() - 1) as f64
    }

    /// Grid abscissa `u_j`, computed from the midpoint so that the grid is
    /// exactly antisymmetric for symmetric bounds.
    pub fn node(&self, j: usize) -> f64 {
        let center = ((self.n_points() - 1) / 2) as f64;
        let mid = 0.5 * (self.u_left + self.u_right);
        mid + (j as f64 - center) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points()).map(|j| self.node(j)).collect()
    }

    /// Trapezoidal integral of the values over the grid.
    pub fn mass(&self) -> f64 {
        let n = self.values.len();
        let interior: f64 = self.values.iter().sum();
        self.spacing() * (interior - 0.5 * (self.values[0] + self.values[n - 1]))
    }

    /// `u,q` table, one row per grid point.
    pub fn to_csv(&self) -> CsvTable {
        let mut table = CsvTable::new(&["u", "q"]);
        for (j, q) in self.values.iter().enumerate() {
            table.push(&[self.node(j), *q]);
        }
        table
    }
}

/// Trapezoidal mass of a density grid.
pub fn density_mass(grid: &DensityGrid) -> f64 {
    grid.mass()
}

/// How the discrete convolution is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvolutionMethod {
    /// Direct summation up to [`FFT_THRESHOLD`] points, FFT above.
    #[default]
    Auto,
    Direct,
    Fft,
}

fn check_grid_size(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        Err(Error::InvalidGridSize(n))
    } else {
        Ok(())
    }
}

/// Induced density of `aᵀx` on an `n_points` grid.
pub fn convolve_density(a: &RidgeDirection, n_points: usize) -> Result<DensityGrid> {
    convolve_density_with(a, n_points, ConvolutionMethod::Auto)
}

/// [`convolve_density`] with an explicit convolution method.
pub fn convolve_density_with(
    a: &RidgeDirection,
    n_points: usize,
    method: ConvolutionMethod,
) -> Result<DensityGrid> {
    check_grid_size(n_points)?;
    let mut widths: Vec<f64> = a
        .components()
        .iter()
        .map(|c| c.abs())
        .filter(|w| *w > 0.0)
        .collect();
    if widths.is_empty() {
        return Err(Error::ZeroDirection);
    }
    // Widest factors first; ties are equal values so the order is canonical.
    widths.sort_by(|x, y| y.total_cmp(x));

    let (u_left, u_right) = a.support_bounds();
    let half = (n_points - 1) / 2;
    let du = (u_right - u_left) / (n_points - 1) as f64;

    let mut values = box_factor(widths[0], half, du);
    let use_fft = match method {
        ConvolutionMethod::Auto => n_points > FFT_THRESHOLD,
        ConvolutionMethod::Direct => false,
        ConvolutionMethod::Fft => true,
    };
    let mut planner = FftPlanner::new();
    for &width in &widths[1..] {
        let kernel = kernel_factor(width, half, du);
        values = if use_fft {
            convolve_fft(&values, &kernel, du, &mut planner)
        } else {
            convolve_direct(&values, &kernel, du)
        };
    }

    let mut grid = DensityGrid {
        u_left,
        u_right,
        values,
    };
    let mass = grid.mass();
    for v in &mut grid.values {
        *v /= mass;
    }
    Ok(grid)
}

/// Cell averages of the box density `1/(2w)` on `[-w, w]`, with the cells of
/// the two end nodes clipped to the grid.
fn box_factor(width: f64, half: usize, du: f64) -> Vec<f64> {
    let n = 2 * half + 1;
    let edge = half as f64 * du;
    (0..n)
        .map(|j| {
            let k = j as f64 - half as f64;
            let lo = ((k - 0.5) * du).max(-edge);
            let hi = ((k + 0.5) * du).min(edge);
            let overlap = (hi.min(width) - lo.max(-width)).max(0.0);
            overlap / (2.0 * width) / (hi - lo)
        })
        .collect()
}

/// Convolution kernel for one factor, stored on offsets `-h..=h`.
struct Kernel {
    half: usize,
    taps: Vec<f64>,
}

fn kernel_factor(width: f64, grid_half: usize, du: f64) -> Kernel {
    if width < du {
        // Narrower than one cell: a unit-mass impulse.
        return Kernel {
            half: 0,
            taps: vec![1.0 / du],
        };
    }
    let half = ((width / du + 0.5).ceil() as usize).min(grid_half);
    let full = box_factor(width, grid_half, du);
    Kernel {
        half,
        taps: full[grid_half - half..=grid_half + half].to_vec(),
    }
}

fn convolve_direct(values: &[f64], kernel: &Kernel, du: f64) -> Vec<f64> {
    let n = values.len() as isize;
    let h = kernel.half as isize;
    par::map_range(values.len(), |j| {
        let j = j as isize;
        let lo = (-h).max(j - n + 1);
        let hi = h.min(j);
        let mut acc = 0.0;
        for t in lo..=hi {
            acc += kernel.taps[(t + h) as usize] * values[(j - t) as usize];
        }
        acc * du
    })
}

fn convolve_fft(
    values: &[f64],
    kernel: &Kernel,
    du: f64,
    planner: &mut FftPlanner<f64>,
) -> Vec<f64> {
    let n = values.len();
    let taps = kernel.taps.len();
    let len = (n + taps - 1).next_power_of_two();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);

    let mut signal: Vec<Complex<f64>> = values
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    let mut filter: Vec<Complex<f64>> = kernel
        .taps
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    forward.process(&mut signal);
    forward.process(&mut filter);
    for (s, f) in signal.iter_mut().zip(&filter) {
        *s *= *f;
    }
    inverse.process(&mut signal);

    let scale = du / len as f64;
    let raw: Vec<f64> = signal[kernel.half..kernel.half + n]
        .iter()
        .map(|c| c.re * scale)
        .collect();
    // Transform roundoff leaves ~1e-17 noise where the density vanishes.
    let floor = raw.iter().fold(0.0_f64, |m, v| m.max(*v)) * 8.0 * f64::EPSILON;
    raw.into_iter()
        .map(|v| if v <= floor { 0.0 } else { v })
        .collect()
}
