//! Time-sliced propagators and discrete classical paths.
//!
//! Each slice is the symmetric split
//! `e^{−iR dt/2ħ} · K_free(dt) · e^{−iR dt/2ħ}` with the free factor applied
//! exactly in Fourier space on the periodic grid. The kernel convention is
//! `ψ(x, t) = Σⱼ K(x, xⱼ) ψ(xⱼ) dx`, so `K → I/dx` as `t → 0`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::operators::{Boundary, Grid1D, WaveFunction};
use crate::schrod::Potential;

/// Analytic potential shapes with the derivatives the least-action solver needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialShape {
    Free,
    /// `R = g·x`.
    Linear {
        g: f64,
    },
    /// `R = ½mω²x²`.
    Harmonic {
        omega: f64,
    },
}

impl PotentialShape {
    pub fn value(&self, x: f64, mass: f64) -> f64 {
        match *self {
            Self::Free => 0.0,
            Self::Linear { g } => g * x,
            Self::Harmonic { omega } => 0.5 * mass * omega * omega * x * x,
        }
    }

    pub fn grad(&self, x: f64, mass: f64) -> f64 {
        match *self {
            Self::Free => 0.0,
            Self::Linear { g } => g,
            Self::Harmonic { omega } => mass * omega * omega * x,
        }
    }

    pub fn curvature(&self, mass: f64) -> f64 {
        match *self {
            Self::Harmonic { omega } => mass * omega * omega,
            _ => 0.0,
        }
    }

    pub fn sample(&self, grid: Grid1D, mass: f64) -> Result<Potential> {
        Potential::from_fn(grid, |x| self.value(x, mass))
    }
}

/// `L = (m/2)ẋ² − R(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianSpec {
    pub mass: f64,
    pub hbar: f64,
    pub shape: PotentialShape,
}

impl LagrangianSpec {
    pub fn new(mass: f64, hbar: f64, shape: PotentialShape) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { mass, hbar, shape })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slicing {
    pub t1: f64,
    pub t2: f64,
    pub n_slices: usize,
}

impl Slicing {
    pub fn new(t1: f64, t2: f64, n_slices: usize) -> Result<Self> {
        if !(t2 > t1) || !t1.is_finite() || !t2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "slicing needs t2 > t1 (t1={t1}, t2={t2})"
            )));
        }
        if n_slices == 0 {
            return Err(Error::InvalidParameter("slicing needs at least one slice".into()));
        }
        Ok(Self { t1, t2, n_slices })
    }

    pub fn duration(&self) -> f64 {
        self.t2 - self.t1
    }

    pub fn dt(&self) -> f64 {
        self.duration() / self.n_slices as f64
    }
}

/// Sampled kernel `K(x_out, x_in)` over a time interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorMatrix {
    pub grid: Grid1D,
    pub duration: f64,
    pub matrix: DMatrix<Complex64>,
    /// Set when the per-slice kinetic phase at the Nyquist wavenumber,
    /// `ħk²dt/2m`, exceeds π.
    pub resolution_warning: bool,
}

impl PropagatorMatrix {
    /// `Σⱼ K(x, xⱼ) ψ(xⱼ) dx`.
    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        if *psi.grid() != self.grid {
            return Err(Error::GridMismatch("propagator and state grids differ".into()));
        }
        let out = &self.matrix * psi.samples() * Complex64::new(self.grid.dx, 0.0);
        WaveFunction::new(self.grid, out)
    }

    /// `K(t₂,t₃)·K(t₁,t₂)·dx` where `self` is the later interval.
    pub fn after(&self, earlier: &PropagatorMatrix) -> Result<PropagatorMatrix> {
        if self.grid != earlier.grid {
            return Err(Error::GridMismatch("propagator grids differ".into()));
        }
        Ok(PropagatorMatrix {
            grid: self.grid,
            duration: self.duration + earlier.duration,
            matrix: &self.matrix * &earlier.matrix * Complex64::new(self.grid.dx, 0.0),
            resolution_warning: self.resolution_warning || earlier.resolution_warning,
        })
    }

    /// `max |(K dx)†(K dx) − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let u = &self.matrix * Complex64::new(self.grid.dx, 0.0);
        let g = u.adjoint() * &u;
        max_identity_deviation(&g)
    }

    /// `max |K_a − K_b| · dx`, the entrywise distance of the evolution matrices.
    pub fn distance(&self, other: &PropagatorMatrix) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("propagator grids differ".into()));
        }
        Ok((&self.matrix - &other.matrix).camax() * self.grid.dx)
    }
}

fn max_identity_deviation(g: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let t = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - t).norm());
        }
    }
    worst
}

struct Slicer {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    half_potential: Vec<Complex64>,
    full_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
}

impl Slicer {
    fn new(spec: &LagrangianSpec, grid: &Grid1D, dt: f64) -> Self {
        let n = grid.n;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let half_potential: Vec<Complex64> = grid
            .points()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, -spec.shape.value(x, spec.mass) * dt / (2.0 * spec.hbar)))
            .collect();
        let kinetic = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
                let k = grid.wavenumber(m);
                let phase = -spec.hbar * k * k * dt / (2.0 * spec.mass);
                Complex64::from_polar(1.0 / n as f64, phase)
            })
            .collect();
        let full_potential = half_potential.iter().map(|c| c * c).collect();
        Self {
            n,
            fwd,
            inv,
            half_potential,
            full_potential,
            kinetic,
        }
    }

    /// Apply `slices` split steps to `buf` in place, fusing adjacent
    /// half-step potential factors.
    fn run(&self, buf: &mut [Complex64], slices: usize, scratch: &mut [Complex64]) {
        for (b, e) in buf.iter_mut().zip(&self.half_potential) {
            *b *= e;
        }
        for s in 0..slices {
            self.fwd.process_with_scratch(buf, scratch);
            for (b, k) in buf.iter_mut().zip(&self.kinetic) {
                *b *= k;
            }
            self.inv.process_with_scratch(buf, scratch);
            let factor = if s + 1 == slices {
                &self.half_potential
            } else {
                &self.full_potential
            };
            for (b, f) in buf.iter_mut().zip(factor) {
                *b *= f;
            }
        }
    }

    fn scratch_len(&self) -> usize {
        self.fwd
            .get_inplace_scratch_len()
            .max(self.inv.get_inplace_scratch_len())
            .max(self.n)
    }
}

/// Split-operator propagator over `s` on a periodic grid.
pub fn propagator(spec: &LagrangianSpec, s: &Slicing, grid: &Grid1D) -> Result<PropagatorMatrix> {
    if grid.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary(
            "propagators are built on periodic grids".into(),
        ));
    }
    let dt = s.dt();
    let n = grid.n;
    let slicer = Slicer::new(spec, grid, dt);
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    let inv_dx = 1.0 / grid.dx;
    matrix.as_mut_slice().par_chunks_mut(n).enumerate().for_each_init(
        || vec![Complex64::new(0.0, 0.0); slicer.scratch_len()],
        |scratch, (col, buf)| {
            buf[col] = Complex64::new(inv_dx, 0.0);
            slicer.run(buf, s.n_slices, scratch);
        },
    );
    let k_max = PI / grid.dx;
    let nyquist_phase = spec.hbar * k_max * k_max * dt / (2.0 * spec.mass);
    Ok(PropagatorMatrix {
        grid: *grid,
        duration: s.duration(),
        matrix,
        resolution_warning: nyquist_phase > PI,
    })
}

/// Evolve one state through the same slicing without forming the matrix.
pub fn propagate(spec: &LagrangianSpec, s: &Slicing, psi: &WaveFunction) -> Result<WaveFunction> {
    let grid = *psi.grid();
    if grid.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary(
            "propagators are built on periodic grids".into(),
        ));
    }
    let slicer = Slicer::new(spec, &grid, s.dt());
    let mut scratch = vec![Complex64::new(0.0, 0.0); slicer.scratch_len()];
    let mut buf: Vec<Complex64> = psi.samples().iter().copied().collect();
    slicer.run(&mut buf, s.n_slices, &mut scratch);
    WaveFunction::new(grid, nalgebra::DVector::from_vec(buf))
}

/// `max |K·ψ₀·dx − ψ_evolved|` for a state evolved over the same interval.
pub fn compare(k: &PropagatorMatrix, psi0: &WaveFunction, evolved: &WaveFunction, t_evolved: f64) -> Result<f64> {
    if *evolved.grid() != k.grid || *psi0.grid() != k.grid {
        return Err(Error::GridMismatch("propagator and state grids differ".into()));
    }
    if (t_evolved - k.duration).abs() > 1e-9 * k.duration.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "time mismatch: propagator spans {} but state was evolved for {t_evolved}",
            k.duration
        )));
    }
    let kpsi = k.apply(psi0)?;
    Ok((kpsi.samples() - evolved.samples()).camax())
}

/// `√(m/2πiħt)·exp(im(x−x′)²/2ħt)`.
pub fn free_kernel(mass: f64, hbar: f64, t: f64, x: f64, xp: f64) -> Complex64 {
    let amp = (mass / (2.0 * PI * hbar * t)).sqrt();
    let phase = mass * (x - xp).powi(2) / (2.0 * hbar * t) - PI / 4.0;
    Complex64::from_polar(amp, phase)
}

/// Harmonic-oscillator kernel, with the Maslov phase `−π/2` per crossed
/// focal time. Undefined at `ωt ∈ πℤ`.
pub fn mehler_kernel(mass: f64, omega: f64, hbar: f64, t: f64, x: f64, xp: f64) -> Complex64 {
    let (s, c) = (omega * t).sin_cos();
    let amp = (mass * omega / (2.0 * PI * hbar * s.abs())).sqrt();
    let crossings = (omega * t / PI).floor();
    let phase =
        mass * omega / (2.0 * hbar * s) * ((x * x + xp * xp) * c - 2.0 * x * xp) - PI / 4.0 - PI / 2.0 * crossings;
    Complex64::from_polar(amp, phase)
}

/// Classical action of the harmonic oscillator between `(x1, 0)` and `(x2, T)`.
pub fn harmonic_action(mass: f64, omega: f64, x1: f64, x2: f64, t: f64) -> f64 {
    let (s, c) = (omega * t).sin_cos();
    mass * omega / (2.0 * s) * ((x1 * x1 + x2 * x2) * c - 2.0 * x1 * x2)
}

/// Duration at which an `n`-point periodic grid of length `L` represents the
/// free kernel exactly: `T* = mL²/(2πħn)`.
pub fn grid_matched_time(mass: f64, hbar: f64, grid: &Grid1D) -> f64 {
    mass * grid.length().powi(2) / (2.0 * PI * hbar * grid.n as f64)
}

/// Grid length for which the quarter-period oscillator kernel is a centred
/// DFT: `L² = 2πnħ/(mω)`.
pub fn balanced_length(mass: f64, omega: f64, hbar: f64, n: usize) -> f64 {
    (2.0 * PI * n as f64 * hbar / (mass * omega)).sqrt()
}

/// Largest entrywise `|K − K_ref|/|K_ref|` over index pairs accepted by `mask`.
pub fn kernel_relative_error(
    k: &PropagatorMatrix,
    reference: impl Fn(f64, f64) -> Complex64,
    mask: impl Fn(f64, f64) -> bool,
) -> f64 {
    let xs = k.grid.points();
    let mut worst = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &xp) in xs.iter().enumerate() {
            if !mask(x, xp) {
                continue;
            }
            let r = reference(x, xp);
            worst = worst.max((k.matrix[(i, j)] - r).norm() / r.norm());
        }
    }
    worst
}

/// Discrete stationary path between fixed endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub action: f64,
    /// Largest `|m Δ²x/Δt² + R′(x)|` over interior knots.
    pub residual: f64,
    pub iterations: usize,
}

/// Residual tolerance for [`classical_action`].
pub const ACTION_RESIDUAL_TOL: f64 = 1e-6;

const ACTION_MAX_ITER: usize = 50;

/// Stationary point of `S = Σ [m/2 (Δx/Δt)² − ½(R(xᵢ) + R(xᵢ₊₁))] Δt` with
/// fixed ends, found by Newton iteration from the straight line.
pub fn classical_action(spec: &LagrangianSpec, x1: f64, x2: f64, t: f64, n_knots: usize) -> Result<ClassicalPath> {
    if n_knots < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 knots, got {n_knots}")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("duration must be positive, got {t}")));
    }
    let m = spec.mass;
    let h = t / (n_knots - 1) as f64;
    let times: Vec<f64> = (0..n_knots).map(|i| i as f64 * h).collect();
    let mut x: Vec<f64> = times.iter().map(|s| x1 + (x2 - x1) * s / t).collect();
    let interior = n_knots - 2;

    let residuals = |x: &[f64]| -> Vec<f64> {
        (1..=interior)
            .map(|i| m * (x[i + 1] - 2.0 * x[i] + x[i - 1]) / (h * h) + spec.shape.grad(x[i], m))
            .collect()
    };
    let max_abs = |r: &[f64]| r.iter().fold(0.0f64, |a, b| a.max(b.abs()));

    let mut res = residuals(&x);
    let mut iterations = 0;
    // stop once the residual is at round-off level for the chosen step
    let floor = 1e-12 * (m * (x2 - x1).abs().max(1.0) / (h * h)).max(1.0);
    while max_abs(&res) > floor.max(ACTION_RESIDUAL_TOL * 1e-3) && iterations < ACTION_MAX_ITER {
        // Jacobian of the residual: tridiagonal with m/h² off the diagonal
        let off = m / (h * h);
        let diag: Vec<f64> = (1..=interior).map(|_| -2.0 * off + spec.shape.curvature(m)).collect();
        let delta = solve_tridiagonal(off, &diag, &res.iter().map(|r| -r).collect::<Vec<_>>())?;
        for (i, d) in delta.iter().enumerate() {
            x[i + 1] += d;
        }
        iterations += 1;
        let next = residuals(&x);
        if max_abs(&next) >= max_abs(&res) && iterations > 2 {
            res = next;
            break;
        }
        res = next;
    }
    let residual = max_abs(&res);
    if !(residual < ACTION_RESIDUAL_TOL) {
        return Err(Error::NoConvergence { residual, iterations });
    }
    let action = (0..n_knots - 1)
        .map(|i| {
            let v = (x[i + 1] - x[i]) / h;
            (0.5 * m * v * v - 0.5 * (spec.shape.value(x[i], m) + spec.shape.value(x[i + 1], m))) * h
        })
        .sum();
    Ok(ClassicalPath {
        times,
        positions: x,
        action,
        residual,
        iterations,
    })
}

/// Thomas algorithm for a symmetric tridiagonal system with constant
/// off-diagonal `off`.
fn solve_tridiagonal(off: f64, diag: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom.abs() < f64::MIN_POSITIVE {
        return Err(Error::NoConvergence {
            residual: f64::INFINITY,
            iterations: 0,
        });
    }
    c[0] = off / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off * c[i - 1];
        if denom.abs() < f64::MIN_POSITIVE {
            return Err(Error::NoConvergence {
                residual: f64::INFINITY,
                iterations: 0,
            });
        }
        c[i] = off / denom;
        d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    Ok(out)
}

/// Result of comparing the sliced kernel's phase with `S_cl/ħ` at one `ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub hbar: f64,
    pub classical_phase: f64,
    /// `arg K − arg(prefactor) − S_cl/ħ`, wrapped to `(−π, π]`.
    pub mismatch: f64,
}

/// Stationary-phase check of the sliced harmonic propagator: `arg K(x2, x1)`
/// against `S_cl/ħ − π/4` (plus the Maslov phase) as `ħ` shrinks. Each run
/// uses a balanced grid of `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbarScan {
    pub mass: f64,
    pub omega: f64,
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub n: usize,
    pub n_slices: usize,
}

impl HbarScan {
    pub fn run(&self, hbars: &[f64]) -> Result<Vec<PhaseSample>> {
        let (mass, omega, t) = (self.mass, self.omega, self.t);
        let s_cl = harmonic_action(mass, omega, self.x1, self.x2, t);
        let crossings = (omega * t / PI).floor();
        hbars
            .iter()
            .map(|&hbar| {
                let spec = LagrangianSpec::new(mass, hbar, PotentialShape::Harmonic { omega })?;
                let l = balanced_length(mass, omega, hbar, self.n);
                let grid = Grid1D::periodic(-0.5 * l, 0.5 * l, self.n)?;
                let psi = point_source(&grid, self.x1)?;
                let out = propagate(&spec, &Slicing::new(0.0, t, self.n_slices)?, &psi)?;
                let (i, j) = (nearest_index(&grid, self.x1), nearest_index(&grid, self.x2));
                let s_grid = harmonic_action(mass, omega, grid.x(i), grid.x(j), t);
                let expected = s_grid / hbar - PI / 4.0 - PI / 2.0 * crossings;
                Ok(PhaseSample {
                    hbar,
                    classical_phase: s_cl / hbar,
                    mismatch: wrap_phase(out.samples()[j].arg() - expected),
                })
            })
            .collect()
    }
}

fn point_source(grid: &Grid1D, x: f64) -> Result<WaveFunction> {
    let j = nearest_index(grid, x);
    let mut v = nalgebra::DVector::from_element(grid.n, Complex64::new(0.0, 0.0));
    v[j] = Complex64::new(1.0 / grid.dx, 0.0);
    WaveFunction::new(*grid, v)
}

fn nearest_index(grid: &Grid1D, x: f64) -> usize {
    let j = ((x - grid.x(0)) / grid.dx).round();
    (j.max(0.0) as usize).min(grid.n - 1)
}

pub fn wrap_phase(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_spec() -> LagrangianSpec {
        LagrangianSpec::new(1.0, 1.0, PotentialShape::Free).unwrap()
    }

    #[test]
    fn slicing_validation() {
        assert!(Slicing::new(1.0, 1.0, 4).is_err());
        assert!(Slicing::new(0.0, 1.0, 0).is_err());
        assert!(LagrangianSpec::new(0.0, 1.0, PotentialShape::Free).is_err());
    }

    #[test]
    fn free_kernel_matches_at_grid_matched_time() {
        let g = Grid1D::periodic(-20.0, 20.0, 128).unwrap();
        let t = grid_matched_time(1.0, 1.0, &g);
        let k = propagator(&free_spec(), &Slicing::new(0.0, t, 64).unwrap(), &g).unwrap();
        let err = kernel_relative_error(&k, |x, xp| free_kernel(1.0, 1.0, t, x, xp), |_, _| true);
        assert!(err < 1e-10, "{err}");
        assert!(!k.resolution_warning);
    }

    #[test]
    fn short_time_is_identity() {
        let g = Grid1D::periodic(-10.0, 10.0, 64).unwrap();
        let k = propagator(&free_spec(), &Slicing::new(0.0, 1e-9, 1).unwrap(), &g).unwrap();
        let psi = WaveFunction::gaussian(g, 0.0, 1.0, 0.5);
        let out = k.apply(&psi).unwrap();
        assert!((out.samples() - psi.samples()).camax() < 1e-6);
    }

    #[test]
    fn unitarity_at_round_off() {
        let g = Grid1D::periodic(-8.0, 8.0, 64).unwrap();
        let spec = LagrangianSpec::new(1.0, 1.0, PotentialShape::Harmonic { omega: 1.0 }).unwrap();
        for n in [8, 16, 32] {
            let k = propagator(&spec, &Slicing::new(0.0, 1.0, n).unwrap(), &g).unwrap();
            assert!(k.unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn classical_action_free_and_linear() {
        let spec = free_spec();
        let p = classical_action(&spec, -1.0, 2.0, 1.5, 11).unwrap();
        assert!((p.action - 9.0 / 3.0).abs() < 1e-12);
        for (t, x) in p.times.iter().zip(&p.positions) {
            assert!((x - (-1.0 + 2.0 * t)).abs() < 1e-12);
        }

        let g = 0.8;
        let spec = LagrangianSpec::new(2.0, 1.0, PotentialShape::Linear { g }).unwrap();
        let (x1, x2, t) = (0.0, 1.0, 2.0);
        let p = classical_action(&spec, x1, x2, t, 41).unwrap();
        let a = -g / 2.0;
        let v0 = (x2 - x1 - 0.5 * a * t * t) / t;
        for (s, x) in p.times.iter().zip(&p.positions) {
            assert!((x - (x1 + v0 * s + 0.5 * a * s * s)).abs() < 1e-8);
        }
    }

    #[test]
    fn classical_action_harmonic() {
        let spec = LagrangianSpec::new(1.0, 1.0, PotentialShape::Harmonic { omega: 1.0 }).unwrap();
        let (x1, x2, t) = (0.5, -0.3, 1.2);
        let p = classical_action(&spec, x1, x2, t, 4001).unwrap();
        let exact = harmonic_action(1.0, 1.0, x1, x2, t);
        assert!((p.action - exact).abs() < 1e-6, "{} vs {exact}", p.action);
        assert!(p.residual < ACTION_RESIDUAL_TOL);
        assert!(classical_action(&spec, 0.0, 1.0, 1.0, 2).is_err());
    }

    #[test]
    fn compare_rejects_time_mismatch() {
        let g = Grid1D::periodic(-10.0, 10.0, 32).unwrap();
        let k = propagator(&free_spec(), &Slicing::new(0.0, 0.5, 4).unwrap(), &g).unwrap();
        let psi = WaveFunction::gaussian(g, 0.0, 1.0, 0.0);
        assert!(compare(&k, &psi, &psi, 0.4).is_err());
    }

    #[test]
    fn mehler_agreement_in_central_block() {
        let spec = LagrangianSpec::new(1.0, 1.0, PotentialShape::Harmonic { omega: 1.0 }).unwrap();
        let l = balanced_length(1.0, 1.0, 1.0, 512);
        let g = Grid1D::periodic(-0.5 * l, 0.5 * l, 512).unwrap();
        let k = propagator(&spec, &Slicing::new(0.0, 1.0, 128).unwrap(), &g).unwrap();
        let err = kernel_relative_error(
            &k,
            |x, xp| mehler_kernel(1.0, 1.0, 1.0, 1.0, x, xp),
            |x, xp| x.abs() <= 5.0 && xp.abs() <= 5.0,
        );
        assert!(err < 1e-2, "{err}");
    }

    #[test]
    fn split_error_is_second_order_in_slices() {
        let spec = LagrangianSpec::new(1.0, 1.0, PotentialShape::Harmonic { omega: 1.0 }).unwrap();
        let g = Grid1D::periodic(-20.0, 20.0, 256).unwrap();
        let psi = WaveFunction::gaussian(g, 1.0, 1.0, 0.5);
        let reference = propagate(&spec, &Slicing::new(0.0, 1.0, 4096).unwrap(), &psi).unwrap();
        let err = |n| {
            let out = propagate(&spec, &Slicing::new(0.0, 1.0, n).unwrap(), &psi).unwrap();
            (out.samples() - reference.samples()).camax()
        };
        let (a, b, c) = (err(16), err(32), err(64));
        for r in [a / b, b / c] {
            assert!((r - 4.0).abs() < 0.3 * 4.0, "ratio {r}");
        }
    }

    #[test]
    fn semigroup_defect_shrinks_with_slices() {
        let spec = LagrangianSpec::new(1.0, 1.0, PotentialShape::Harmonic { omega: 1.0 }).unwrap();
        let g = Grid1D::periodic(-10.0, 10.0, 128).unwrap();
        let defect = |n| {
            let a = propagator(&spec, &Slicing::new(0.0, 0.4, n).unwrap(), &g).unwrap();
            let b = propagator(&spec, &Slicing::new(0.4, 1.0, n).unwrap(), &g).unwrap();
            let c = propagator(&spec, &Slicing::new(0.0, 1.0, n).unwrap(), &g).unwrap();
            b.after(&a).unwrap().distance(&c).unwrap()
        };
        let d: Vec<f64> = [16, 32, 64].into_iter().map(defect).collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    }

    #[test]
    fn hbar_scan_phase_tracks_action() {
        let scan = HbarScan {
            mass: 1.0,
            omega: 1.0,
            t: 1.0,
            x1: 1.0,
            x2: -0.8,
            n: 256,
            n_slices: 128,
        };
        let out = scan.run(&[1.0, 0.25, 0.05]).unwrap();
        let last = out.last().unwrap();
        assert!(last.mismatch.abs() < 0.02 * last.classical_phase.abs());
        assert!(out.windows(2).all(|w| w[1].classical_phase > w[0].classical_phase));
    }

    #[test]
    fn wrap_phase_range() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-0.5) + 0.5).abs() < 1e-15);
    }
}
