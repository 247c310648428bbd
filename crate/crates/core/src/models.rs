//! Test functions and the full-dimensional baseline.
//!
//! Every model takes normalized inputs `x ∈ [-1,1]^m` and owns any affine map
//! to physical ranges.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::density::RidgeDirection;
use crate::error::{Error, Result};
use crate::nearridge::stream_rng;

/// Inputs may exceed the unit box by this much before being rejected.
const DOMAIN_SLACK: f64 = 1e-12;

fn check_domain(x: &[f64], dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            actual: x.len(),
        });
    }
    match x.iter().position(|v| !(v.abs() <= 1.0 + DOMAIN_SLACK)) {
        Some(index) => Err(Error::DomainViolation {
            index,
            value: x[index],
        }),
        None => Ok(()),
    }
}

/// Profile of the exact-ridge example, `sin(2πu) + cos(πu/2)`.
pub fn exact_ridge_profile(u: f64) -> f64 {
    (2.0 * PI * u).sin() + (0.5 * PI * u).cos()
}

/// `sin(2π aᵀx) + cos(π/2 aᵀx)`.
pub fn exact_ridge_example(x: &[f64], a: &RidgeDirection) -> Result<f64> {
    check_domain(x, a.dim())?;
    Ok(exact_ridge_profile(a.project(x)))
}

/// `E[cos(k aᵀx)] = Π_i sin(k a_i)/(k a_i)` over the uniform hypercube.
fn cosine_mean(a: &RidgeDirection, k: f64) -> f64 {
    a.components()
        .iter()
        .map(|&c| {
            let t = k * c;
            if t == 0.0 {
                1.0
            } else {
                t.sin() / t
            }
        })
        .product()
}

/// Its integral over the uniform hypercube: `Π_i sinc(π a_i / 2)`.
///
/// Only the cosine term contributes; the sine term is odd in `u`.
pub fn exact_ridge_integral(a: &RidgeDirection) -> f64 {
    cosine_mean(a, 0.5 * PI)
}

/// Integral of the near-ridge example; the sine and complement terms are odd.
pub fn near_ridge_integral(a: &RidgeDirection) -> f64 {
    0.2 * cosine_mean(a, 0.8 * PI)
}

/// Orthonormal basis `B` (`m × (m-1)`) of the complement of `a`, stored by
/// column.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoComplementBasis {
    columns: Vec<Vec<f64>>,
}

impl OrthoComplementBasis {
    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// `Bᵀx`.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|c| dot(c, x)).collect()
    }

    /// `xᵀB𝟏`, the sum of `Bᵀx`.
    pub fn coordinate_sum(&self, x: &[f64]) -> f64 {
        self.columns.iter().map(|c| dot(c, x)).sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt (applied twice) of seeded Gaussian vectors against `a`.
pub fn make_orthocomplement(a: &RidgeDirection, seed: u64) -> OrthoComplementBasis {
    let m = a.dim();
    let mut rng = stream_rng(seed, 0);
    let mut basis: Vec<Vec<f64>> = vec![a.components().to_vec()];
    while basis.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis.remove(0);
    OrthoComplementBasis { columns: basis }
}

/// Profile of the near-ridge example: `sin(πu/5) + cos(4πu/5)/5`. The
/// complement term has zero conditional mean on every slice, so this is also
/// the conditional expectation.
pub fn near_ridge_profile(u: f64) -> f64 {
    (PI * u / 5.0).sin() + 0.2 * (0.8 * PI * u).cos()
}

/// `sin(π/5 aᵀx) + cos(4π/5 aᵀx)/5 + xᵀB𝟏/40`.
pub fn near_ridge_example(
    x: &[f64],
    a: &RidgeDirection,
    basis: &OrthoComplementBasis,
) -> Result<f64> {
    check_domain(x, a.dim())?;
    Ok(near_ridge_profile(a.project(x)) + basis.coordinate_sum(x) / 40.0)
}

/// Log-range of each Hartmann input, in the order μ, ρ, ∂p₀/∂x, η, B₀.
pub const HARTMANN_RANGES: [(f64, f64); 5] = [
    (0.05, 0.2),
    (1.0, 5.0),
    (0.5, 3.0),
    (0.5, 3.0),
    (0.25, 1.0),
];

/// Default channel width.
pub const HARTMANN_DEFAULT_WIDTH: f64 = 0.1;

/// Physical inputs of the Hartmann model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HartmannInput {
    pub log_mu: f64,
    pub log_rho: f64,
    pub log_dp0dx: f64,
    pub log_eta: f64,
    pub log_b0: f64,
    pub ell: f64,
}

impl HartmannInput {
    /// Maps normalized `x ∈ [-1,1]⁵` affinely onto the log-ranges.
    pub fn from_normalized(x: &[f64], ell: f64) -> Result<Self> {
        check_domain(x, 5)?;
        let log = |i: usize| {
            let (lo, hi) = HARTMANN_RANGES[i];
            let (lo, hi) = (lo.ln(), hi.ln());
            lo + 0.5 * (x[i] + 1.0) * (hi - lo)
        };
        Ok(Self {
            log_mu: log(0),
            log_rho: log(1),
            log_dp0dx: log(2),
            log_eta: log(3),
            log_b0: log(4),
            ell,
        })
    }

    /// Average flow velocity across the channel.
    pub fn u_avg(&self) -> f64 {
        let mu = self.log_mu.exp();
        let dp0dx = self.log_dp0dx.exp();
        let eta = self.log_eta.exp();
        let b0 = self.log_b0.exp();
        let root = (eta * mu).sqrt();
        let z = root / (b0 * self.ell);
        -dp0dx * eta / (b0 * b0) * (1.0 - self.ell * b0 / root / z.tanh())
    }
}

/// Hartmann `u_avg` at normalized inputs with channel width `ell`.
pub fn hartmann_uavg_with_width(x: &[f64], ell: f64) -> Result<f64> {
    Ok(HartmannInput::from_normalized(x, ell)?.u_avg())
}

/// Hartmann `u_avg` with the default channel width.
pub fn hartmann_uavg(x: &[f64]) -> Result<f64> {
    hartmann_uavg_with_width(x, HARTMANN_DEFAULT_WIDTH)
}

/// Central finite-difference gradient with step `h`, one-sided where a
/// coordinate sits on the boundary.
pub fn finite_difference_gradient<F>(f: &F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let hi = (x[i] + h).min(1.0);
            let lo = (x[i] - h).max(-1.0);
            probe[i] = hi;
            let up = f(&probe);
            probe[i] = lo;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (hi - lo)
        })
        .collect()
}

/// Normalized average of finite-difference gradients at `points` seeded
/// uniform points.
pub fn gradient_direction<F>(f: &F, dim: usize, points: usize, seed: u64) -> Result<RidgeDirection>
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = stream_rng(seed, 0);
    let mut sum = vec![0.0; dim];
    for _ in 0..points {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        for (s, g) in sum.iter_mut().zip(finite_difference_gradient(f, &x, 1e-6)) {
            *s += g;
        }
    }
    RidgeDirection::new(sum)
}

/// Normalized standard Gaussian vector drawn from `seed`.
pub fn random_direction(dim: usize, seed: u64) -> Result<RidgeDirection> {
    let mut rng = stream_rng(seed, 0);
    RidgeDirection::new((0..dim).map(|_| rng.sample(StandardNormal)).collect())
}

/// Ridge direction used for the Hartmann studies.
pub fn hartmann_direction(seed: u64) -> Result<RidgeDirection> {
    let f = |x: &[f64]| hartmann_uavg(x).unwrap_or(f64::NAN);
    gradient_direction(&f, 5, 50, seed)
}

/// Orthonormal Legendre polynomials `√(2n+1) P_n(x)` for `n = 0..=degree`.
pub fn legendre_values(x: f64, degree: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(degree + 1);
    p.push(1.0);
    if degree >= 1 {
        p.push(x);
    }
    for n in 1..degree {
        let nf = n as f64;
        p.push(((2.0 * nf + 1.0) * x * p[n] - nf * p[n - 1]) / (nf + 1.0));
    }
    p.iter()
        .enumerate()
        .map(|(n, v)| v * ((2 * n + 1) as f64).sqrt())
        .collect()
}

/// Multi-indices of total degree at most `degree`, graded by degree.
pub fn total_degree_indices(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    fn fill(prefix: &mut Vec<usize>, dim: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            fill(prefix, dim, left - k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=degree {
        fill(&mut Vec::with_capacity(dim), dim, total, &mut out);
    }
    out
}

/// Tensor-Legendre expansion on `[-1,1]^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreExpansion {
    dim: usize,
    degree: usize,
    indices: Vec<Vec<usize>>,
    coefficients: Vec<f64>,
}

impl LegendreExpansion {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn basis_row(&self, x: &[f64]) -> Vec<f64> {
        basis_row(&self.indices, self.degree, x)
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        dot(&self.basis_row(x), &self.coefficients)
    }
}

fn basis_row(indices: &[Vec<usize>], degree: usize, x: &[f64]) -> Vec<f64> {
    let tables: Vec<Vec<f64>> = x.iter().map(|&xi| legendre_values(xi, degree)).collect();
    indices
        .iter()
        .map(|alpha| alpha.iter().zip(&tables).map(|(&k, t)| t[k]).product())
        .collect()
}

/// Regularized least squares over the total-degree Legendre basis:
/// `(ΨᵀΨ + penalty·I) c = Ψᵀy`.
pub fn legendre_ls_baseline(
    samples: &[(Vec<f64>, f64)],
    total_degree: usize,
    ridge_penalty: f64,
) -> Result<LegendreExpansion> {
    let Some((first, _)) = samples.first() else {
        return Err(Error::InvalidArgument("no samples".into()));
    };
    if !(ridge_penalty >= 0.0 && ridge_penalty.is_finite()) {
        return Err(Error::InvalidArgument("ridge penalty must be nonnegative".into()));
    }
    let dim = first.len();
    for (x, _) in samples {
        check_domain(x, dim)?;
    }
    let indices = total_degree_indices(dim, total_degree);
    let k = indices.len();
    if ridge_penalty == 0.0 && samples.len() < k {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot determine {k} coefficients without a penalty",
            samples.len()
        )));
    }
    let rows: Vec<f64> = samples
        .iter()
        .flat_map(|(x, _)| basis_row(&indices, total_degree, x))
        .collect();
    let psi = DMatrix::from_row_slice(samples.len(), k, &rows);
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|(_, v)| *v));
    let mut gram = psi.transpose() * &psi;
    for i in 0..k {
        gram[(i, i)] += ridge_penalty;
    }
    let rhs = psi.transpose() * y;
    let chol = gram.cholesky().ok_or_else(|| {
        Error::InvalidMeasure("normal equations are not positive definite".into())
    })?;
    let coefficients = chol.solve(&rhs).iter().copied().collect();
    Ok(LegendreExpansion {
        dim,
        degree: total_degree,
        indices,
        coefficients,
    })
}

/// Models available by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    ExactRidge,
    NearRidge,
    Hartmann,
    Constant,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::ExactRidge,
        ModelKind::NearRidge,
        ModelKind::Hartmann,
        ModelKind::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ExactRidge => "exact_ridge",
            Self::NearRidge => "near_ridge",
            Self::Hartmann => "hartmann",
            Self::Constant => "constant",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model `{name}`")))
    }

    pub fn dim(self) -> usize {
        match self {
            Self::ExactRidge | Self::NearRidge => 25,
            Self::Hartmann | Self::Constant => 5,
        }
    }

    /// Whether `f` is an exact ridge function of any direction it is built with.
    pub fn is_exact_ridge(self) -> bool {
        matches!(self, Self::ExactRidge | Self::Constant)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A model bound to a ridge direction.
#[derive(Clone)]
pub struct Model {
    kind: ModelKind,
    direction: RidgeDirection,
    evaluator: Evaluator,
    profile: Option<Profile>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("kind", &self.kind)
            .field("direction", &self.direction)
            .finish_non_exhaustive()
    }
}

impl Model {
    /// Binds `kind` to `direction`. The near-ridge complement basis is drawn
    /// from `seed`. Inputs outside the hypercube evaluate to NaN.
    pub fn new(kind: ModelKind, direction: RidgeDirection, seed: u64) -> Result<Self> {
        if direction.dim() != kind.dim() {
            return Err(Error::LengthMismatch {
                expected: kind.dim(),
                actual: direction.dim(),
            });
        }
        let a = direction.clone();
        let (evaluator, profile): (Evaluator, Option<Profile>) = match kind {
            ModelKind::ExactRidge => (
                Arc::new(move |x: &[f64]| exact_ridge_example(x, &a).unwrap_or(f64::NAN)),
                Some(Arc::new(exact_ridge_profile)),
            ),
            ModelKind::NearRidge => {
                let basis = make_orthocomplement(&a, seed);
                (
                    Arc::new(move |x: &[f64]| {
                        near_ridge_example(x, &a, &basis).unwrap_or(f64::NAN)
                    }),
                    Some(Arc::new(near_ridge_profile)),
                )
            }
            ModelKind::Hartmann => (
                Arc::new(|x: &[f64]| hartmann_uavg(x).unwrap_or(f64::NAN)),
                None,
            ),
            ModelKind::Constant => (Arc::new(|_: &[f64]| 1.0), Some(Arc::new(|_| 1.0))),
        };
        Ok(Self {
            kind,
            direction,
            evaluator,
            profile,
        })
    }

    /// The model with its default direction: `𝟏/√m`, or the averaged
    /// gradient for Hartmann.
    pub fn with_default_direction(kind: ModelKind, seed: u64) -> Result<Self> {
        let direction = match kind {
            ModelKind::Hartmann => hartmann_direction(seed)?,
            _ => RidgeDirection::ones(kind.dim())?,
        };
        Self::new(kind, direction, seed)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn direction(&self) -> &RidgeDirection {
        &self.direction
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }

    /// Shareable evaluator, `Send + Sync`.
    pub fn evaluator(&self) -> impl Fn(&[f64]) -> f64 + Send + Sync + '_ {
        move |x| (self.evaluator)(x)
    }

    /// Closed-form conditional-mean profile, when known.
    pub fn profile(&self, u: f64) -> Option<f64> {
        self.profile.as_ref().map(|p| p(u))
    }

    pub fn has_profile(&self) -> bool {
        self.profile.is_some()
    }

    /// Closed-form integral over the hypercube, when known.
    pub fn integral(&self) -> Option<f64> {
        match self.kind {
            ModelKind::ExactRidge => Some(exact_ridge_integral(&self.direction)),
            ModelKind::NearRidge => Some(near_ridge_integral(&self.direction)),
            ModelKind::Constant => Some(1.0),
            ModelKind::Hartmann => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_ridge_values() {
        assert_eq!(exact_ridge_profile(0.0), 1.0);
        assert!(exact_ridge_profile(1.0).abs() < 1e-15);
        let v = exact_ridge_profile(0.25);
        assert!((v - (1.0 + (PI / 8.0).cos())).abs() < 1e-15);
        assert!((v - 1.923_879_532_511_286_7).abs() < 1e-12);
    }

    #[test]
    fn exact_ridge_rejects_outside_points() {
        let a = RidgeDirection::ones(3).unwrap();
        assert!(matches!(
            exact_ridge_example(&[0.0, 1.5, 0.0], &a),
            Err(Error::DomainViolation { index: 1, .. })
        ));
        assert!(exact_ridge_example(&[0.0; 2], &a).is_err());
    }

    #[test]
    fn orthocomplement_invariants() {
        let a = RidgeDirection::new(vec![1.0, 0.0]).unwrap();
        let b = make_orthocomplement(&a, 5);
        assert_eq!(b.columns().len(), 1);
        assert!(b.columns()[0][0].abs() < 1e-15);
        assert!((b.columns()[0][1].abs() - 1.0).abs() < 1e-15);

        let a = RidgeDirection::new((1..=25).map(|i| (i as f64).sin()).collect()).unwrap();
        let b = make_orthocomplement(&a, 9);
        assert_eq!(b, make_orthocomplement(&a, 9));
        let cols = b.columns();
        assert_eq!(cols.len(), 24);
        for (i, c) in cols.iter().enumerate() {
            assert!(a.project(c).abs() < 1e-12);
            for (j, d) in cols.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(c, d) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn near_ridge_values() {
        let a = RidgeDirection::ones(25).unwrap();
        let b = make_orthocomplement(&a, 1);
        assert!((near_ridge_example(&[0.0; 25], &a, &b).unwrap() - 0.2).abs() < 1e-15);
        // A point on the λ = 0 slice along the first complement column.
        let x: Vec<f64> = b.columns()[0].iter().map(|v| 0.5 * v).collect();
        let expected = 0.2 + b.coordinate_sum(&x) / 40.0;
        assert!((b.coordinates(&x)[0] - 0.5).abs() < 1e-12);
        assert!((near_ridge_example(&x, &a, &b).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn hartmann_ignores_density() {
        let mut x = [0.3, -0.7, 0.1, 0.5, -0.2];
        let base = hartmann_uavg(&x).unwrap();
        for rho in [-1.0, 0.0, 1.0] {
            x[1] = rho;
            assert_eq!(hartmann_uavg(&x).unwrap(), base);
        }
    }

    #[test]
    fn hartmann_center_pins() {
        // Geometric midpoints of the physical ranges.
        let mid = |(lo, hi): (f64, f64)| (lo * hi).sqrt();
        let (mu, dp, eta, b0) = (
            mid(HARTMANN_RANGES[0]),
            mid(HARTMANN_RANGES[2]),
            mid(HARTMANN_RANGES[3]),
            mid(HARTMANN_RANGES[4]),
        );
        for ell in [1.0, 0.1] {
            let root = (eta * mu).sqrt();
            let z = root / (b0 * ell);
            let coth = z.cosh() / z.sinh();
            let expected = -dp * eta / (b0 * b0) * (1.0 - ell * b0 / root * coth);
            let got = hartmann_uavg_with_width(&[0.0; 5], ell).unwrap();
            assert!((got - expected).abs() < 1e-13 * expected.abs(), "{got} {expected}");
        }
        // Independent 30-digit evaluations.
        let v = hartmann_uavg_with_width(&[0.0; 5], 1.0).unwrap();
        assert!((v - 8.185_034_343_298_47).abs() < 1e-12, "{v}");
        let v = hartmann_uavg(&[0.0; 5]).unwrap();
        assert!((v + 5.142_766_443_382_89).abs() < 1e-12, "{v}");
    }

    #[test]
    fn hartmann_linear_in_pressure_gradient() {
        let lo = HartmannInput::from_normalized(&[0.1, 0.0, -1.0, 0.4, -0.3], 0.1).unwrap();
        let mut hi = lo;
        hi.log_dp0dx += 2f64.ln();
        assert!((hi.u_avg() - 2.0 * lo.u_avg()).abs() < 1e-12 * lo.u_avg().abs());
    }

    #[test]
    fn hartmann_gradients_align() {
        let f = |x: &[f64]| hartmann_uavg(x).unwrap();
        let mut rng = stream_rng(2024, 0);
        let grads: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                let x: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let g = finite_difference_gradient(&f, &x, 1e-6);
                let n = dot(&g, &g).sqrt();
                g.into_iter().map(|v| v / n).collect()
            })
            .collect();
        for g in &grads {
            for h in &grads {
                assert!(dot(g, h) > 0.95, "{}", dot(g, h));
            }
        }
        let a = hartmann_direction(0).unwrap();
        assert!(a.components()[1].abs() < 1e-9);
    }

    #[test]
    fn legendre_basis() {
        let p = legendre_values(0.5, 3);
        assert_eq!(p[0], 1.0);
        assert!((p[1] - 3f64.sqrt() * 0.5).abs() < 1e-15);
        assert!((p[2] - 5f64.sqrt() * (3.0 * 0.25 - 1.0) / 2.0).abs() < 1e-15);
        assert!((p[3] - 7f64.sqrt() * (5.0 * 0.125 - 1.5) / 2.0).abs() < 1e-15);
        assert_eq!(total_degree_indices(5, 3).len(), 56);
        assert_eq!(total_degree_indices(1, 4).len(), 5);
        assert_eq!(total_degree_indices(3, 1)[0], vec![0, 0, 0]);
    }

    #[test]
    fn baseline_constant_and_interpolation() {
        let mut rng = stream_rng(3, 0);
        let samples: Vec<(Vec<f64>, f64)> = (0..200)
            .map(|_| ((0..3).map(|_| rng.random_range(-1.0..=1.0)).collect(), 2.5))
            .collect();
        let fit = legendre_ls_baseline(&samples, 2, 1e-8).unwrap();
        assert!((fit.coefficients()[0] - 2.5).abs() < 1e-8);
        for c in &fit.coefficients()[1..] {
            assert!(c.abs() < 1e-10, "{c}");
        }

        let samples = vec![(vec![-0.5], 1.0), (vec![0.75], -2.0)];
        let fit = legendre_ls_baseline(&samples, 1, 0.0).unwrap();
        for (x, y) in &samples {
            assert!((fit.evaluate(x) - y).abs() < 1e-12);
        }
        assert!(legendre_ls_baseline(&samples, 3, 0.0).is_err());
    }

    #[test]
    fn registry() {
        for kind in ModelKind::ALL {
            assert_eq!(ModelKind::from_name(kind.name()).unwrap(), kind);
        }
        assert!(ModelKind::from_name("nope").is_err());
        let m = Model::with_default_direction(ModelKind::ExactRidge, 0).unwrap();
        assert_eq!(m.evaluate(&[0.0; 25]), 1.0);
        assert!(m.evaluate(&[2.0; 25]).is_nan());
        assert_eq!(m.profile(0.25), Some(exact_ridge_profile(0.25)));
        let h = Model::with_default_direction(ModelKind::Hartmann, 0).unwrap();
        assert!(!h.has_profile());
        assert!(Model::new(ModelKind::Hartmann, RidgeDirection::ones(3).unwrap(), 0).is_err());
    }

    #[test]
    fn closed_form_integrals_match_monte_carlo() {
        use crate::diagnostics::monte_carlo_mean;
        for kind in [ModelKind::ExactRidge, ModelKind::NearRidge] {
            let a = RidgeDirection::new((1..=25).map(|i| (i as f64).cos()).collect()).unwrap();
            let m = Model::new(kind, a, 0).unwrap();
            let (mean, se) = monte_carlo_mean(m.evaluator(), 25, 200_000, 1);
            assert!((mean - m.integral().unwrap()).abs() < 4.0 * se, "{kind}");
        }
    }

    #[test]
    fn sinc_product_integral() {
        let a = RidgeDirection::new(vec![1.0]).unwrap();
        assert!((exact_ridge_integral(&a) - 2.0 / PI).abs() < 1e-15);
    }
}
