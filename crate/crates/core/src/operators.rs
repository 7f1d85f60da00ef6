//! Grid wave functions and Hermitian operators.
//!
//! Wave functions live on a uniform [`Grid1D`] and use the Riemann inner
//! product `⟨a,b⟩ = Σ aₖ b̄ₖ dx`. Operators are dense complex matrices acting
//! on the sample vector.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance enforced by every operator constructor.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Normalization tolerance for states handed to [`expectation`] and friends.
pub const STATE_NORM_TOL: f64 = 1e-9;

/// Pivot threshold below which [`gram_schmidt`] reports linear dependence.
pub const PIVOT_TOL: f64 = 1e-10;

/// Eigenvalue gap below which eigenvectors are treated as one cluster.
pub const DEGENERACY_GAP: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Vanishing,
}

/// Uniform grid on `[x_min, x_max)`.
///
/// Periodic grids sample `x_min + j·dx`. Vanishing grids sample cell centres
/// `x_min + (j + ½)·dx`, so a symmetric interval gives a symmetric point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dx: f64,
    pub boundary: Boundary,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize, boundary: Boundary) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParameter(format!("grid needs n >= 4, got {n}")));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidParameter(format!(
                "grid interval [{x_min}, {x_max}) is empty or not finite"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            dx: (x_max - x_min) / n as f64,
            boundary,
        })
    }

    pub fn periodic(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        Self::new(x_min, x_max, n, Boundary::Periodic)
    }

    pub fn vanishing(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        Self::new(x_min, x_max, n, Boundary::Vanishing)
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, j: usize) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.x_min + j as f64 * self.dx,
            Boundary::Vanishing => self.x_min + (j as f64 + 0.5) * self.dx,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumber of the `m`-th Fourier mode, `2πm/L`.
    pub fn wavenumber(&self, m: i64) -> f64 {
        2.0 * std::f64::consts::PI * m as f64 / self.length()
    }

    fn check_same(&self, other: &Grid1D) -> Result<()> {
        let tol = 1e-12 * self.length().abs().max(1.0);
        if self.n != other.n
            || self.boundary != other.boundary
            || (self.x_min - other.x_min).abs() > tol
            || (self.x_max - other.x_max).abs() > tol
        {
            return Err(Error::GridMismatch(format!(
                "[{}, {}) n={} vs [{}, {}) n={}",
                self.x_min, self.x_max, self.n, other.x_min, other.x_max, other.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid1D,
    samples: DVector<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, samples: DVector<Complex64>) -> Result<Self> {
        if samples.len() != grid.n {
            return Err(Error::DimensionMismatch {
                expected: grid.n,
                found: samples.len(),
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = DVector::from_iterator(grid.n, grid.points().into_iter().map(f));
        Self { grid, samples }
    }

    pub fn from_real_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Normalized discrete plane wave `e^{i k_m x}` with `k_m = 2πm/L`.
    pub fn fourier_mode(grid: Grid1D, m: i64) -> Self {
        let k = grid.wavenumber(m);
        let amp = 1.0 / grid.length().sqrt();
        Self::from_fn(grid, |x| Complex64::from_polar(amp, k * (x - grid.x_min)))
    }

    /// Normalized Gaussian packet centred at `x0` with position spread `sigma`
    /// and mean wavenumber `k0`.
    pub fn gaussian(grid: Grid1D, x0: f64, sigma: f64, k0: f64) -> Self {
        let psi = Self::from_fn(grid, |x| {
            let d = x - x0;
            Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), k0 * x)
        });
        psi.normalized().unwrap_or(psi)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn samples(&self) -> &DVector<Complex64> {
        &self.samples
    }

    pub fn into_samples(self) -> DVector<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::DegenerateState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.map(|c| c * s),
        }
    }

    pub fn with_samples(&self, samples: DVector<Complex64>) -> Result<Self> {
        Self::new(self.grid, samples)
    }

    /// `|ψ(x)|²` at every grid point.
    pub fn density(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `∫ f(x)|ψ(x)|² dx`.
    pub fn moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .map(|(j, c)| f(self.grid.x(j)) * c.norm_sqr())
            .sum::<f64>()
            * self.grid.dx
    }
}

/// `Σ aₖ conj(bₖ) dx`.
pub fn inner(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    a.grid.check_same(&b.grid)?;
    Ok(a.samples
        .iter()
        .zip(b.samples.iter())
        .map(|(x, y)| x * y.conj())
        .sum::<Complex64>()
        * a.grid.dx)
}

/// Modified Gram–Schmidt. Fails on the first input whose residual norm after
/// projection falls below [`PIVOT_TOL`] times its original norm.
pub fn gram_schmidt(fns: &[WaveFunction]) -> Result<Vec<WaveFunction>> {
    let mut out: Vec<WaveFunction> = Vec::with_capacity(fns.len());
    for (index, f) in fns.iter().enumerate() {
        if let Some(first) = out.first() {
            first.grid.check_same(&f.grid)?;
        }
        let scale = f.norm();
        let mut v = f.clone();
        for q in &out {
            let c = inner(&v, q)?;
            v.samples -= &q.samples * c;
        }
        for q in &out {
            let c = inner(&v, q)?;
            v.samples -= &q.samples * c;
        }
        let pivot = v.norm();
        if !(scale > 0.0) || pivot < PIVOT_TOL * scale.max(1.0) {
            return Err(Error::LinearlyDependent { index, pivot });
        }
        out.push(v.scaled(Complex64::new(1.0 / pivot, 0.0)));
    }
    Ok(out)
}

/// Largest deviation of the Gram matrix of `fns` from the identity.
pub fn orthonormality_defect(fns: &[WaveFunction]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, a) in fns.iter().enumerate() {
        for (j, b) in fns.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(a, b)? - target).norm());
        }
    }
    Ok(worst)
}

/// Dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    matrix: DMatrix<Complex64>,
}

impl HermitianOp {
    /// Accepts `m` when `max|m − m†|` is below [`HERMITIAN_TOL`] relative to
    /// the largest entry, then stores the exact Hermitian part.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let deviation = hermiticity_defect(&m);
        let scale = m.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
        if !(deviation <= HERMITIAN_TOL * scale) {
            return Err(Error::NotHermitian { deviation });
        }
        let adj = m.adjoint();
        Ok(Self {
            matrix: (m + adj) * Complex64::new(0.5, 0.0),
        })
    }

    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|r| Complex64::new(r, 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            matrix: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(values[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|c| c.im == 0.0)
    }

    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        self.check_dim(psi.len())?;
        Ok(WaveFunction {
            grid: psi.grid,
            samples: &self.matrix * &psi.samples,
        })
    }

    pub fn add(&self, other: &HermitianOp) -> Result<HermitianOp> {
        self.check_dim(other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scale(&self, s: f64) -> HermitianOp {
        Self {
            matrix: &self.matrix * Complex64::new(s, 0.0),
        }
    }

    /// `[A, B] = AB − BA` (anti-Hermitian, so returned as a plain matrix).
    pub fn commutator(&self, other: &HermitianOp) -> Result<DMatrix<Complex64>> {
        self.check_dim(other.dim())?;
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.matrix)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Ascending eigenvalues with orthonormal (Euclidean) eigenvector columns.
///
/// Each eigenvector's phase is fixed so that its first entry of magnitude
/// above `1e-8` is real and positive. Vectors in a cluster of eigenvalues
/// closer than [`DEGENERACY_GAP`] are re-orthonormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn of(m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        let (values, vectors) = if m.iter().all(|c| c.im == 0.0) {
            let eig = SymmetricEigen::new(m.map(|c| c.re));
            (
                eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
                eig.eigenvectors.map(|r| Complex64::new(r, 0.0)),
            )
        } else {
            let eig = SymmetricEigen::new(m.clone());
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
        let mut eigenvectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);

        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && eigenvalues[end] - eigenvalues[end - 1] < DEGENERACY_GAP {
                end += 1;
            }
            if end - start > 1 {
                reorthonormalize(&mut eigenvectors, start, end);
            }
            start = end;
        }
        for j in 0..n {
            fix_phase(&mut eigenvectors, j);
        }
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// The `k`-th eigenvector as a grid function normalized in the `dx` inner
    /// product.
    pub fn eigenfunction(&self, k: usize, grid: Grid1D) -> Result<WaveFunction> {
        let v = self.vector(k) / Complex64::new(grid.dx.sqrt(), 0.0);
        WaveFunction::new(grid, v)
    }

    /// Largest `‖Hv − λv‖` over all pairs.
    pub fn max_residual(&self, m: &DMatrix<Complex64>) -> f64 {
        (0..self.len())
            .map(|k| {
                let v = self.vector(k);
                (m * &v - &v * Complex64::new(self.eigenvalues[k], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `V†V` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        let n = g.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let t = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - t).norm());
            }
        }
        worst
    }
}

fn reorthonormalize(v: &mut DMatrix<Complex64>, start: usize, end: usize) {
    for j in start..end {
        for _ in 0..2 {
            for i in start..j {
                let qi = v.column(i).into_owned();
                let c = qi.dotc(&v.column(j));
                let mut col = v.column_mut(j);
                col -= qi * c;
            }
        }
        let nrm = v.column(j).norm();
        if nrm > 0.0 {
            let mut col = v.column_mut(j);
            col /= Complex64::new(nrm, 0.0);
        }
    }
}

fn fix_phase(v: &mut DMatrix<Complex64>, j: usize) {
    let pivot = v.column(j).iter().copied().find(|c| c.norm() > 1e-8);
    if let Some(p) = pivot {
        let phase = p.conj() / p.norm();
        let mut col = v.column_mut(j);
        col *= phase;
    }
}

/// `H = Σₖ pₖ |Ψₖ⟩⟨Ψₖ| dx` from grid-orthonormal eigenfunctions.
pub fn op_from_eigensystem(vals: &[f64], fns: &[WaveFunction]) -> Result<HermitianOp> {
    if vals.len() != fns.len() {
        return Err(Error::DimensionMismatch {
            expected: fns.len(),
            found: vals.len(),
        });
    }
    let Some(first) = fns.first() else {
        return Err(Error::InvalidParameter("empty eigensystem".into()));
    };
    let deviation = orthonormality_defect(fns)?;
    if deviation > 1e-8 {
        return Err(Error::NotOrthonormal { deviation });
    }
    let n = first.len();
    let dx = first.grid.dx;
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for (p, f) in vals.iter().zip(fns) {
        let s = &f.samples;
        h += s * s.adjoint() * Complex64::new(p * dx, 0.0);
    }
    HermitianOp::new(h)
}

/// `x̂` as the diagonal of grid positions.
pub fn position_op(grid: &Grid1D) -> HermitianOp {
    HermitianOp::diagonal(&grid.points())
}

/// `−iħ (ψⱼ₊₁ − ψⱼ₋₁)/(2dx)` with periodic wrap.
pub fn momentum_op(grid: &Grid1D, hbar: f64) -> Result<HermitianOp> {
    if grid.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary(
            "momentum requires a periodic grid; the central stencil is not Hermitian with vanishing ends".into(),
        ));
    }
    let n = grid.n;
    let c = -I * hbar / (2.0 * grid.dx);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(j, (j + 1) % n)] += c;
        m[(j, (j + n - 1) % n)] -= c;
    }
    HermitianOp::new(m)
}

/// `−iħ d/dx` diagonalized by the discrete Fourier transform. Exact on
/// band-limited periodic samples, unlike the central stencil of [`momentum_op`].
pub fn spectral_momentum_op(grid: &Grid1D, hbar: f64) -> Result<HermitianOp> {
    if grid.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary(
            "spectral momentum requires a periodic grid".into(),
        ));
    }
    let n = grid.n;
    let half = (n / 2) as i64;
    // the unsigned Nyquist mode of an even grid is left out
    let lo = if n.is_multiple_of(2) { 1 - half } else { -half };
    // row j, column l depends only on (j − l) mod n
    let kernel: Vec<Complex64> = (0..n)
        .map(|d| {
            (lo..n as i64 - half)
                .map(|m| {
                    let phase = 2.0 * std::f64::consts::PI * (m * d as i64) as f64 / n as f64;
                    Complex64::from_polar(hbar * grid.wavenumber(m), phase)
                })
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    let m = DMatrix::<Complex64>::from_fn(n, n, |j, l| kernel[(j + n - l) % n]);
    HermitianOp::new(m)
}

/// Matrix-free action of [`momentum_op`] on periodic samples.
pub fn apply_momentum(grid: &Grid1D, hbar: f64, samples: &[Complex64]) -> Result<Vec<Complex64>> {
    if grid.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary("momentum requires a periodic grid".into()));
    }
    let n = samples.len();
    if n != grid.n {
        return Err(Error::DimensionMismatch {
            expected: grid.n,
            found: n,
        });
    }
    let c = -I * hbar / (2.0 * grid.dx);
    Ok((0..n)
        .map(|j| c * (samples[(j + 1) % n] - samples[(j + n - 1) % n]))
        .collect())
}

/// `⟨ψ|p̂|ψ⟩ / ⟨ψ|ψ⟩` with the central-difference momentum.
pub fn momentum_expectation(grid: &Grid1D, hbar: f64, samples: &[Complex64]) -> Result<f64> {
    let p = apply_momentum(grid, hbar, samples)?;
    let num: Complex64 = samples.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = samples.iter().map(|a| a.norm_sqr()).sum();
    if !(den > 0.0) {
        return Err(Error::DegenerateState);
    }
    Ok(num.re / den)
}

/// Exact eigenvalue of [`momentum_op`] on the Fourier mode with wavenumber `k`.
pub fn momentum_symbol(k: f64, dx: f64, hbar: f64) -> f64 {
    hbar * (k * dx).sin() / dx
}

/// `−i·scale·d/dθ` on a periodic angle grid `[−period/2, period/2)`.
#[derive(Debug, Clone)]
pub struct PeriodicGenerator {
    pub grid: Grid1D,
    pub op: HermitianOp,
    pub spectrum: Spectrum,
    /// Continuum ladder spacing `2π·scale/period`.
    pub spacing: f64,
}

impl PeriodicGenerator {
    /// Eigenvalue of the discrete generator on `e^{imθ}`; tends to `m·spacing`.
    pub fn mode_eigenvalue(&self, m: i64) -> f64 {
        momentum_symbol(
            self.grid.wavenumber(m),
            self.grid.dx,
            self.spacing * self.grid.length() / (2.0 * std::f64::consts::PI),
        )
    }
}

pub fn periodic_generator(n: usize, period: f64, scale: f64) -> Result<PeriodicGenerator> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "period must be positive, got {period}"
        )));
    }
    let grid = Grid1D::periodic(-0.5 * period, 0.5 * period, n)?;
    let op = momentum_op(&grid, scale)?;
    let spectrum = op.spectrum();
    Ok(PeriodicGenerator {
        grid,
        op,
        spectrum,
        spacing: 2.0 * std::f64::consts::PI * scale / period,
    })
}

/// `⟨ψ|H|ψ⟩` for a normalized state.
pub fn expectation(h: &HermitianOp, psi: &WaveFunction) -> Result<f64> {
    let norm = psi.norm_sqr();
    if (norm - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let z = raw_expectation(h, psi)?;
    if z.im.abs() > 1e-10 * z.re.abs().max(1.0) {
        return Err(Error::ComplexExpectation { imag: z.im });
    }
    Ok(z.re)
}

fn raw_expectation(h: &HermitianOp, psi: &WaveFunction) -> Result<Complex64> {
    let hpsi = h.apply(psi)?;
    Ok(psi.samples.dotc(&hpsi.samples) * psi.grid.dx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uncertainty {
    pub d_a: f64,
    pub d_b: f64,
    /// `½|⟨ψ|[A,B]|ψ⟩|`.
    pub bound: f64,
}

impl Uncertainty {
    pub fn product(&self) -> f64 {
        self.d_a * self.d_b
    }
}

/// Standard deviations of `A` and `B` in `ψ` together with the Robertson bound.
pub fn commutator_uncertainty(a: &HermitianOp, b: &HermitianOp, psi: &WaveFunction) -> Result<Uncertainty> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.dim() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: psi.len(),
        });
    }
    let dx = psi.grid.dx;
    let apsi = &a.matrix * &psi.samples;
    let bpsi = &b.matrix * &psi.samples;
    let spread = |opsi: &DVector<Complex64>| -> Result<f64> {
        let z = psi.samples.dotc(opsi) * dx;
        if z.im.abs() > 1e-10 * z.re.abs().max(1.0) {
            return Err(Error::ComplexExpectation { imag: z.im });
        }
        let dev = opsi - &psi.samples * Complex64::new(z.re, 0.0);
        Ok((dev.norm_squared() * dx).sqrt())
    };
    let d_a = spread(&apsi)?;
    let d_b = spread(&bpsi)?;
    // ⟨ψ|[A,B]|ψ⟩ = 2i·Im⟨Aψ|Bψ⟩ for Hermitian A, B.
    let bound = (apsi.dotc(&bpsi) * dx).im.abs();
    Ok(Uncertainty { d_a, d_b, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_rejects_small_or_empty() {
        assert!(Grid1D::periodic(0.0, 1.0, 3).is_err());
        assert!(Grid1D::periodic(1.0, 1.0, 8).is_err());
        let g = Grid1D::vanishing(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.points(), vec![-0.75, -0.25, 0.25, 0.75]);
    }

    #[test]
    fn inner_examples() {
        let g = Grid1D::periodic(0.0, 2.0 * PI, 32).unwrap();
        let a = WaveFunction::fourier_mode(g, 2);
        let b = WaveFunction::fourier_mode(g, -3);
        assert!((inner(&a, &a).unwrap() - c(1.0)).norm() < 1e-12);
        assert!(inner(&a, &b).unwrap().norm() < 1e-12);
        let ab = inner(&a, &b).unwrap();
        let ba = inner(&b, &a).unwrap();
        assert_eq!(ab, ba.conj());

        let other = Grid1D::periodic(0.0, 2.0 * PI, 64).unwrap();
        assert!(matches!(
            inner(&a, &WaveFunction::fourier_mode(other, 1)),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn gram_schmidt_examples() {
        let g = Grid1D::periodic(0.0, 2.0 * PI, 16).unwrap();
        let basis: Vec<_> = (0..4).map(|m| WaveFunction::fourier_mode(g, m)).collect();
        let out = gram_schmidt(&basis).unwrap();
        for (a, b) in basis.iter().zip(&out) {
            assert!((a.samples() - b.samples()).norm() < 1e-12);
        }

        let g = Grid1D::vanishing(-1.0, 1.0, 40).unwrap();
        let one = WaveFunction::from_real_fn(g, |_| 1.0);
        let x = WaveFunction::from_real_fn(g, |x| x);
        let out = gram_schmidt(&[one, x]).unwrap();
        assert!(inner(&out[0], &out[1]).unwrap().norm() < 1e-12);
        let s0 = out[0].samples();
        assert!(s0.iter().all(|v| (v - s0[0]).norm() < 1e-12));
        let s1 = out[1].samples();
        for j in 0..g.n {
            assert!((s1[j] + s1[g.n - 1 - j]).norm() < 1e-12);
        }

        let f = WaveFunction::from_real_fn(g, |x| (x * 3.0).cos());
        let err = gram_schmidt(&[f.clone(), f.scaled(c(2.0))]).unwrap_err();
        assert!(matches!(err, Error::LinearlyDependent { index: 1, .. }));
    }

    #[test]
    fn op_from_eigensystem_examples() {
        let g = Grid1D::periodic(0.0, 2.0 * PI, 16).unwrap();
        let ms: Vec<i64> = (-8..8).collect();
        let basis: Vec<_> = ms.iter().map(|&m| WaveFunction::fourier_mode(g, m)).collect();

        let zero = op_from_eigensystem(&[0.0; 16], &basis).unwrap();
        assert!(zero.matrix().iter().all(|z| z.norm() < 1e-15));

        let id = op_from_eigensystem(&[1.0; 16], &basis).unwrap();
        assert!((id.matrix() - DMatrix::<Complex64>::identity(16, 16)).camax() < 1e-10);

        let hbar = 0.7;
        let vals: Vec<f64> = ms
            .iter()
            .map(|&m| momentum_symbol(g.wavenumber(m), g.dx, hbar))
            .collect();
        let built = op_from_eigensystem(&vals, &basis).unwrap();
        let p = momentum_op(&g, hbar).unwrap();
        assert!((built.matrix() - p.matrix()).camax() < 1e-10);

        for (f, &v) in basis.iter().zip(&vals) {
            let hf = built.apply(f).unwrap();
            assert!((hf.samples() - f.samples() * c(v)).norm() < 1e-8);
        }

        let mut bad = basis.clone();
        bad[1] = bad[0].clone();
        assert!(matches!(
            op_from_eigensystem(&vals, &bad),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn momentum_examples() {
        let g = Grid1D::periodic(-PI, PI, 64).unwrap();
        let p = momentum_op(&g, 1.0).unwrap();
        assert!(p.hermiticity_defect() < 1e-15);
        let k0 = p.apply(&WaveFunction::fourier_mode(g, 0)).unwrap();
        assert!(k0.samples().camax() < 1e-14);
        for m in [-5i64, 1, 3, 7] {
            let f = WaveFunction::fourier_mode(g, m);
            let pf = p.apply(&f).unwrap();
            let lam = momentum_symbol(g.wavenumber(m), g.dx, 1.0);
            assert!((pf.samples() - f.samples() * c(lam)).camax() < 1e-12);
        }
        let psi = WaveFunction::gaussian(g, 0.3, 0.5, 2.0);
        let direct = apply_momentum(&g, 1.0, psi.samples().as_slice()).unwrap();
        let dense = p.apply(&psi).unwrap();
        for (a, b) in direct.iter().zip(dense.samples().iter()) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!(matches!(
            momentum_op(&Grid1D::vanishing(-1.0, 1.0, 8).unwrap(), 1.0),
            Err(Error::UnsupportedBoundary(_))
        ));
    }

    #[test]
    fn spectrum_of_diagonal_and_phase_convention() {
        let h = HermitianOp::diagonal(&[3.0, -1.0, 2.0]);
        let s = h.spectrum();
        assert_eq!(s.eigenvalues, vec![-1.0, 2.0, 3.0]);
        for k in 0..3 {
            let v = s.vector(k);
            let p = v.iter().find(|z| z.norm() > 1e-8).unwrap();
            assert!(p.im.abs() < 1e-15 && p.re > 0.0);
        }
        assert!(s.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn complex_spectrum_residuals() {
        let g = Grid1D::periodic(0.0, 1.0, 24).unwrap();
        let p = momentum_op(&g, 1.0).unwrap();
        let s = p.spectrum();
        assert!(s.max_residual(p.matrix()) < 1e-8);
        assert!(s.orthonormality_defect() < 1e-10);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn expectation_examples() {
        let g = Grid1D::periodic(0.0, 2.0 * PI, 32).unwrap();
        let p = momentum_op(&g, 1.0).unwrap();
        let f2 = WaveFunction::fourier_mode(g, 2);
        let f5 = WaveFunction::fourier_mode(g, 5);
        let p2 = momentum_symbol(2.0, g.dx, 1.0);
        let p5 = momentum_symbol(5.0, g.dx, 1.0);
        assert!((expectation(&p, &f2).unwrap() - p2).abs() < 1e-12);

        let r = 0.5f64.sqrt();
        let sup = f2.with_samples(f2.samples() * c(r) + f5.samples() * c(r)).unwrap();
        assert!((expectation(&p, &sup).unwrap() - 0.5 * (p2 + p5)).abs() < 1e-12);
        assert!((expectation(&HermitianOp::identity(32), &sup).unwrap() - 1.0).abs() < 1e-12);

        assert!(matches!(
            expectation(&p, &f2.scaled(c(2.0))),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn uncertainty_examples() {
        let g = Grid1D::periodic(-20.0, 20.0, 512).unwrap();
        let x = position_op(&g);
        let psi = WaveFunction::gaussian(g, 0.0, 2.0, 0.0);
        let u = commutator_uncertainty(&x, &x, &psi).unwrap();
        assert!(u.bound < 1e-15);

        let p = momentum_op(&g, 1.0).unwrap();
        let u = commutator_uncertainty(&x, &p, &psi).unwrap();
        assert!((u.product() - 0.5).abs() < 0.005, "{u:?}");
        assert!(u.product() >= u.bound - 1e-9);

        assert!(commutator_uncertainty(&x, &HermitianOp::identity(3), &psi).is_err());
    }

    #[test]
    fn periodic_generator_examples() {
        let gen = periodic_generator(128, 2.0 * PI, 1.0).unwrap();
        assert!((gen.spacing - 1.0).abs() < 1e-15);
        let zero = gen.op.apply(&WaveFunction::fourier_mode(gen.grid, 0)).unwrap();
        assert!(zero.samples().camax() == 0.0);
        for m in 1..4i64 {
            let lam = gen.mode_eigenvalue(m);
            let h = gen.grid.dx;
            let grid_err = (m as f64).powi(3) * h * h / 6.0;
            assert!((lam - m as f64).abs() <= grid_err * 1.01);
        }

        let q = 3.0;
        let gen = periodic_generator(128, 2.0 * PI / q, 1.0).unwrap();
        assert!((gen.spacing - q).abs() < 1e-12);
        assert!((gen.mode_eigenvalue(1) - q).abs() < 1e-2 * q);
        assert!((gen.mode_eigenvalue(-2) + 2.0 * q).abs() < 1e-2 * q);
    }
}
