//! Grid Schrödinger solver on the U/V leapfrog.
//!
//! `iħΨ̇ = −(ħ²/2m)Ψ'' + RΨ` on a periodic grid, with the observables needed
//! for Ehrenfest checks logged along the way. The 3D solver handles
//! separable `R(x) + R(y) + R(z)` by sweeping the 1D step along each axis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel_evolution::{pde_evolve, EffectiveDynamics, SplitState, DEFAULT_STABILITY_FACTOR};
use crate::operators::{momentum_expectation, Boundary, Grid1D, HermitianOp, Spectrum, WaveFunction};

/// Height of emulated hard walls in units of `ħ²/(m·dx²)`.
pub const WALL_HEIGHT: f64 = 1e6;

/// `R(x)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    grid: Grid1D,
    samples: Vec<f64>,
}

impl Potential {
    pub fn new(grid: Grid1D, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n {
            return Err(Error::DimensionMismatch {
                expected: grid.n,
                found: samples.len(),
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("potential has non-finite samples".into()));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn constant(grid: Grid1D, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.n])
    }

    pub fn zero(grid: Grid1D) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.n],
        }
    }

    /// `½mω²(x − x0)²`.
    pub fn harmonic(grid: Grid1D, mass: f64, omega: f64, x0: f64) -> Result<Self> {
        Self::from_fn(grid, |x| 0.5 * mass * omega * omega * (x - x0).powi(2))
    }

    /// `g·x`.
    pub fn linear(grid: Grid1D, g: f64) -> Result<Self> {
        Self::from_fn(grid, |x| g * x)
    }

    /// Zero on `[left, right]` and [`WALL_HEIGHT`]`·ħ²/(m·dx²)` elsewhere.
    pub fn well(grid: Grid1D, left: f64, right: f64, hbar: f64, mass: f64) -> Result<Self> {
        let wall = WALL_HEIGHT * hbar * hbar / (mass * grid.dx * grid.dx);
        Self::from_fn(grid, |x| if x >= left && x <= right { 0.0 } else { wall })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `dR/dx` by central differences, one-sided at the two ends.
    pub fn gradient(&self) -> Vec<f64> {
        let (n, h, r) = (self.samples.len(), self.grid.dx, &self.samples);
        (0..n)
            .map(|j| match j {
                0 => (r[1] - r[0]) / h,
                j if j == n - 1 => (r[n - 1] - r[n - 2]) / h,
                j => (r[j + 1] - r[j - 1]) / (2.0 * h),
            })
            .collect()
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|v| v + c).collect(),
        }
    }

    fn dynamics(&self, hbar: f64, mass: f64) -> Result<EffectiveDynamics> {
        EffectiveDynamics::new(mass, self.samples.clone(), hbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolConfig {
    pub hbar: f64,
    pub mass: f64,
    pub dt: f64,
    pub steps: usize,
    pub stability_factor: f64,
    /// Record observables every this many steps (and at the last step).
    pub log_every: usize,
}

impl Default for EvolConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            dt: 1e-3,
            steps: 1000,
            stability_factor: DEFAULT_STABILITY_FACTOR,
            log_every: 10,
        }
    }
}

impl EvolConfig {
    /// Largest admissible `|dt|` on `grid` for potential `r`.
    pub fn stability_bound(&self, r: &Potential) -> Result<f64> {
        Ok(r.dynamics(self.hbar, self.mass)?
            .stability_bound(r.grid.dx, self.stability_factor))
    }

    fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        if !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be finite, got {}", self.dt)));
        }
        if !(self.stability_factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stability_factor must be positive, got {}",
                self.stability_factor
            )));
        }
        if self.log_every == 0 {
            return Err(Error::InvalidParameter("log_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub norm: f64,
    pub x_mean: f64,
    pub p_mean: f64,
    pub energy: f64,
}

/// Observables at the logged times plus the matching position densities.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub records: Vec<TrajectoryRecord>,
    pub densities: Vec<Vec<f64>>,
}

impl TrajectoryLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Largest `|norm(t) − norm(0)|`.
    pub fn norm_drift(&self) -> f64 {
        let Some(first) = self.records.first() else {
            return 0.0;
        };
        self.records
            .iter()
            .map(|r| (r.norm - first.norm).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|E(t) − E(0)| / |E(0)|`.
    pub fn energy_drift(&self) -> f64 {
        let Some(first) = self.records.first() else {
            return 0.0;
        };
        let scale = first.energy.abs().max(f64::MIN_POSITIVE);
        self.records
            .iter()
            .map(|r| (r.energy - first.energy).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// `⟨x²⟩ − ⟨x⟩²` at every logged time.
    pub fn variances(&self, grid: &Grid1D) -> Vec<f64> {
        self.densities
            .iter()
            .map(|rho| {
                let xs = grid.points();
                let m0: f64 = rho.iter().sum();
                let m1: f64 = rho.iter().zip(&xs).map(|(p, x)| p * x).sum();
                let m2: f64 = rho.iter().zip(&xs).map(|(p, x)| p * x * x).sum();
                m2 / m0 - (m1 / m0).powi(2)
            })
            .collect()
    }
}

fn record(t: f64, s: &SplitState, grid: &Grid1D, d: &EffectiveDynamics) -> Result<(TrajectoryRecord, Vec<f64>)> {
    let dx = grid.dx;
    let psi = s.psi();
    let rho: Vec<f64> = psi.iter().map(|c| c.norm_sqr()).collect();
    let norm = rho.iter().sum::<f64>() * dx;
    let x_mean = rho.iter().zip(grid.points()).map(|(p, x)| p * x).sum::<f64>() * dx / norm;
    let p_mean = momentum_expectation(grid, d.hbar, &psi)?;
    let hu = d.apply(&s.u, dx);
    let hv = d.apply(&s.v, dx);
    let e = (s.u.iter().zip(&hu).map(|(a, b)| a * b).sum::<f64>()
        + s.v.iter().zip(&hv).map(|(a, b)| a * b).sum::<f64>())
        * dx
        / norm;
    Ok((
        TrajectoryRecord {
            t,
            norm,
            x_mean,
            p_mean,
            energy: e,
        },
        rho,
    ))
}

/// Evolve `psi0` for `cfg.steps` leapfrog steps.
pub fn evolve(psi0: &WaveFunction, r: &Potential, cfg: &EvolConfig) -> Result<(WaveFunction, TrajectoryLog)> {
    cfg.validate()?;
    let grid = *psi0.grid();
    if grid != r.grid {
        return Err(Error::GridMismatch("wave function and potential grids differ".into()));
    }
    if grid.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary(
            "time evolution runs on periodic grids; emulate hard walls with Potential::well".into(),
        ));
    }
    let norm = psi0.norm_sqr();
    if (norm - 1.0).abs() > crate::operators::STATE_NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let d = r.dynamics(cfg.hbar, cfg.mass)?;
    let bound = d.stability_bound(grid.dx, cfg.stability_factor);
    if !(cfg.dt.abs() <= bound) {
        return Err(Error::Unstable { dt: cfg.dt, bound });
    }

    let mut log = TrajectoryLog::default();
    let mut s = SplitState::from_wave(psi0);
    let push = |log: &mut TrajectoryLog, t: f64, s: &SplitState| -> Result<()> {
        let (rec, rho) = record(t, s, &grid, &d)?;
        log.records.push(rec);
        log.densities.push(rho);
        Ok(())
    };
    push(&mut log, 0.0, &s)?;
    let mut done = 0;
    while done < cfg.steps {
        let chunk = cfg.log_every.min(cfg.steps - done);
        s = pde_evolve(&s, &d, grid.dx, cfg.dt, chunk, cfg.stability_factor).map_err(|e| match e {
            Error::NonFinite { step } => Error::NonFinite { step: done + step },
            other => other,
        })?;
        done += chunk;
        push(&mut log, done as f64 * cfg.dt, &s)?;
    }
    let samples = nalgebra::DVector::from_vec(s.psi());
    Ok((WaveFunction::new(grid, samples)?, log))
}

/// Dense `H = −(ħ²/2m)Δ + R` with the three-point Laplacian; wraps around on
/// periodic grids and vanishes outside the end points otherwise.
pub fn hamiltonian(r: &Potential, hbar: f64, mass: f64) -> Result<HermitianOp> {
    let n = r.grid.n;
    let a = hbar * hbar / (2.0 * mass * r.grid.dx * r.grid.dx);
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = 2.0 * a + r.samples[i];
        if i + 1 < n {
            h[(i, i + 1)] = -a;
            h[(i + 1, i)] = -a;
        }
    }
    if r.grid.boundary == Boundary::Periodic {
        h[(0, n - 1)] = -a;
        h[(n - 1, 0)] = -a;
    }
    HermitianOp::from_real(h)
}

/// Lowest `count` eigenpairs of [`hamiltonian`].
pub fn stationary(r: &Potential, hbar: f64, mass: f64, count: usize) -> Result<Spectrum> {
    if count > r.grid.n {
        return Err(Error::InvalidParameter(format!(
            "requested {count} states from a {}-point grid",
            r.grid.n
        )));
    }
    if !(hbar > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidParameter("hbar and mass must be positive".into()));
    }
    let full = hamiltonian(r, hbar, mass)?.spectrum();
    Ok(Spectrum {
        eigenvalues: full.eigenvalues[..count].to_vec(),
        eigenvectors: full.eigenvectors.columns(0, count).into_owned(),
    })
}

/// Largest `|d⟨p⟩/dt + ⟨∇R⟩|` over the interior log samples, with `d/dt`
/// from three-point differences on the (possibly uneven) log times.
pub fn ehrenfest(log: &TrajectoryLog, r: &Potential) -> Result<f64> {
    Ok(ehrenfest_residuals(log, r)?
        .into_iter()
        .map(|(_, res)| res.abs())
        .fold(0.0, f64::max))
}

/// `(t, d⟨p⟩/dt + ⟨∇R⟩)` at every interior log sample.
pub fn ehrenfest_residuals(log: &TrajectoryLog, r: &Potential) -> Result<Vec<(f64, f64)>> {
    let n = log.records.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "Ehrenfest check needs at least 3 log samples, got {n}"
        )));
    }
    let grad = r.gradient();
    let mean_grad = |rho: &[f64]| -> Result<f64> {
        if rho.len() != grad.len() {
            return Err(Error::DimensionMismatch {
                expected: grad.len(),
                found: rho.len(),
            });
        }
        let m0: f64 = rho.iter().sum();
        Ok(rho.iter().zip(&grad).map(|(p, g)| p * g).sum::<f64>() / m0)
    };
    let mut out = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let (a, b, c) = (&log.records[i - 1], &log.records[i], &log.records[i + 1]);
        let (hm, hp) = (b.t - a.t, c.t - b.t);
        let dpdt = (hm * hm * c.p_mean - hp * hp * a.p_mean + (hp * hp - hm * hm) * b.p_mean) / (hm * hp * (hm + hp));
        out.push((b.t, dpdt + mean_grad(&log.densities[i])?));
    }
    Ok(out)
}

/// `R(x) + R(y) + R(z)` on a product grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparablePotential {
    pub axes: [Potential; 3],
}

impl SeparablePotential {
    pub fn new(x: Potential, y: Potential, z: Potential) -> Self {
        Self { axes: [x, y, z] }
    }

    pub fn grids(&self) -> [Grid1D; 3] {
        [self.axes[0].grid, self.axes[1].grid, self.axes[2].grid]
    }
}

/// Complex samples on a product grid, stored with `z` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction3 {
    grids: [Grid1D; 3],
    samples: Vec<Complex64>,
}

impl WaveFunction3 {
    pub fn new(grids: [Grid1D; 3], samples: Vec<Complex64>) -> Result<Self> {
        let len = grids.iter().map(|g| g.n).product();
        if samples.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: samples.len(),
            });
        }
        Ok(Self { grids, samples })
    }

    pub fn product(a: &WaveFunction, b: &WaveFunction, c: &WaveFunction) -> Self {
        let grids = [*a.grid(), *b.grid(), *c.grid()];
        let mut samples = Vec::with_capacity(a.len() * b.len() * c.len());
        for x in a.samples().iter() {
            for y in b.samples().iter() {
                for z in c.samples().iter() {
                    samples.push(x * y * z);
                }
            }
        }
        Self { grids, samples }
    }

    pub fn grids(&self) -> [Grid1D; 3] {
        self.grids
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn norm_sqr(&self) -> f64 {
        let dv: f64 = self.grids.iter().map(|g| g.dx).product();
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * dv
    }

    /// Max pointwise distance to the product `a ⊗ b ⊗ c`.
    pub fn distance_to_product(&self, a: &WaveFunction, b: &WaveFunction, c: &WaveFunction) -> f64 {
        let p = Self::product(a, b, c);
        self.samples
            .iter()
            .zip(&p.samples)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

fn axis_lines(dims: [usize; 3], axis: usize) -> (usize, Vec<usize>) {
    let strides = [dims[1] * dims[2], dims[2], 1];
    let stride = strides[axis];
    let mut starts = Vec::new();
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let idx = [i, j, k];
                if idx[axis] == 0 {
                    starts.push(i * strides[0] + j * strides[1] + k);
                }
            }
        }
    }
    (stride, starts)
}

/// Evolve on a product grid. Each step applies the 1D leapfrog step along
/// `x`, then `y`, then `z`.
pub fn evolve3(psi0: &WaveFunction3, r: &SeparablePotential, cfg: &EvolConfig) -> Result<WaveFunction3> {
    cfg.validate()?;
    let grids = psi0.grids;
    if grids != r.grids() {
        return Err(Error::GridMismatch("wave function and potential grids differ".into()));
    }
    if grids.iter().any(|g| g.boundary != Boundary::Periodic) {
        return Err(Error::UnsupportedBoundary(
            "time evolution runs on periodic grids".into(),
        ));
    }
    let dims = [grids[0].n, grids[1].n, grids[2].n];
    let dyns = r
        .axes
        .iter()
        .map(|p| p.dynamics(cfg.hbar, cfg.mass))
        .collect::<Result<Vec<_>>>()?;
    for (d, g) in dyns.iter().zip(&grids) {
        let bound = d.stability_bound(g.dx, cfg.stability_factor);
        if !(cfg.dt.abs() <= bound) {
            return Err(Error::Unstable { dt: cfg.dt, bound });
        }
    }
    let lines: Vec<(usize, Vec<usize>)> = (0..3).map(|a| axis_lines(dims, a)).collect();
    let mut u: Vec<f64> = psi0.samples.iter().map(|c| c.re).collect();
    let mut v: Vec<f64> = psi0.samples.iter().map(|c| c.im).collect();
    for step in 0..cfg.steps {
        for axis in 0..3 {
            let (stride, starts) = &lines[axis];
            let n = dims[axis];
            for &start in starts {
                let idx: Vec<usize> = (0..n).map(|m| start + m * stride).collect();
                let s = SplitState {
                    u: idx.iter().map(|&i| u[i]).collect(),
                    v: idx.iter().map(|&i| v[i]).collect(),
                };
                let out = pde_evolve(&s, &dyns[axis], grids[axis].dx, cfg.dt, 1, cfg.stability_factor)?;
                for (m, &i) in idx.iter().enumerate() {
                    u[i] = out.u[m];
                    v[i] = out.v[m];
                }
            }
        }
        if u.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step: step + 1 });
        }
    }
    let samples = u.into_iter().zip(v).map(|(a, b)| Complex64::new(a, b)).collect();
    WaveFunction3::new(grids, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::inner;
    use std::f64::consts::PI;

    fn grid(n: usize, l: f64) -> Grid1D {
        Grid1D::periodic(-0.5 * l, 0.5 * l, n).unwrap()
    }

    #[test]
    fn harmonic_ground_state_is_stationary() {
        let g = grid(256, 20.0);
        let r = Potential::harmonic(g, 1.0, 1.0, 0.0).unwrap();
        let spec = stationary(&r, 1.0, 1.0, 1).unwrap();
        let psi0 = spec.eigenfunction(0, g).unwrap();
        let cfg = EvolConfig {
            dt: 1e-3,
            steps: 2000,
            log_every: 500,
            ..Default::default()
        };
        let (psi, _) = evolve(&psi0, &r, &cfg).unwrap();
        let overlap = inner(&psi, &psi0).unwrap().norm();
        assert!((overlap - 1.0).abs() < 1e-6, "{overlap}");
    }

    #[test]
    fn free_gaussian_width_doubles_on_schedule() {
        let g = grid(512, 60.0);
        let sigma0 = 1.0;
        let psi0 = WaveFunction::gaussian(g, 0.0, sigma0, 0.0);
        let t_double = 2.0 * 3f64.sqrt() * sigma0 * sigma0;
        let dt = 2e-3;
        let steps = (t_double / dt).round() as usize;
        let cfg = EvolConfig {
            dt,
            steps,
            log_every: steps,
            ..Default::default()
        };
        let (_, log) = evolve(&psi0, &Potential::zero(g), &cfg).unwrap();
        let t = log.records.last().unwrap().t;
        let expect = sigma0 * sigma0 + (t / (2.0 * sigma0)).powi(2);
        let got = *log.variances(&g).last().unwrap();
        assert!(((got - expect) / expect).abs() < 0.01, "{got} vs {expect}");
    }

    #[test]
    fn zero_steps_is_identity() {
        let g = grid(64, 10.0);
        let psi0 = WaveFunction::gaussian(g, 0.5, 1.0, 1.0);
        let cfg = EvolConfig {
            steps: 0,
            ..Default::default()
        };
        let (psi, log) = evolve(&psi0, &Potential::zero(g), &cfg).unwrap();
        assert_eq!(psi, psi0);
        assert_eq!(log.len(), 1);
    }

    #[test]
    fn infinite_well_levels_scale_quadratically() {
        let g = grid(400, 2.0);
        let r = Potential::well(g, -0.5, 0.5, 1.0, 1.0).unwrap();
        let spec = stationary(&r, 1.0, 1.0, 3).unwrap();
        let e1 = spec.eigenvalues[0];
        let inside = g.points().iter().filter(|x| x.abs() <= 0.5).count();
        let width = (inside + 1) as f64 * g.dx;
        for (k, e) in spec.eigenvalues.iter().enumerate() {
            let ratio = e / e1;
            let n2 = ((k + 1) * (k + 1)) as f64;
            assert!((ratio - n2).abs() < 0.02 * n2, "level {k}: {ratio}");
        }
        assert!((e1 - PI * PI / (2.0 * width * width)).abs() < 0.02 * e1, "{e1}");
    }

    #[test]
    fn harmonic_spacing() {
        let g = grid(256, 20.0);
        let omega = 1.3;
        let r = Potential::harmonic(g, 1.0, omega, 0.0).unwrap();
        let e = stationary(&r, 1.0, 1.0, 5).unwrap().eigenvalues;
        for w in e.windows(2) {
            assert!(((w[1] - w[0]) - omega).abs() < 0.01 * omega);
        }
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let g = grid(64, 10.0);
        let r = Potential::harmonic(g, 1.0, 1.0, 0.0).unwrap();
        let a = stationary(&r, 1.0, 1.0, 6).unwrap().eigenvalues;
        let b = stationary(&r.shifted(2.5), 1.0, 1.0, 6).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((y - x - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn ehrenfest_free_and_linear() {
        let g = grid(512, 40.0);
        let psi0 = WaveFunction::gaussian(g, 0.0, 1.5, 0.3);
        let cfg = EvolConfig {
            dt: 1e-3,
            steps: 2000,
            log_every: 100,
            ..Default::default()
        };
        let (_, log) = evolve(&psi0, &Potential::zero(g), &cfg).unwrap();
        assert!(ehrenfest(&log, &Potential::zero(g)).unwrap() < 1e-8);

        let gacc = 0.05;
        let r = Potential::linear(g, gacc).unwrap();
        let psi0 = WaveFunction::gaussian(g, 0.0, 1.5, 0.0);
        let (_, log) = evolve(&psi0, &r, &cfg).unwrap();
        for (_, res) in ehrenfest_residuals(&log, &r).unwrap() {
            assert!(res.abs() < 1e-3 * gacc, "{res}");
        }
    }

    #[test]
    fn ehrenfest_harmonic_period() {
        let g = grid(1024, 20.0);
        let r = Potential::harmonic(g, 1.0, 1.0, 0.0).unwrap();
        let psi0 = WaveFunction::gaussian(g, 1.0, 0.5f64.sqrt(), 0.0);
        let dt = 5e-5;
        let cfg = EvolConfig {
            dt,
            steps: (2.0 * PI / dt).round() as usize,
            log_every: 200,
            ..Default::default()
        };
        let (_, log) = evolve(&psi0, &r, &cfg).unwrap();
        let dev = ehrenfest(&log, &r).unwrap();
        assert!(dev < 1e-3, "{dev}");
        assert!(ehrenfest(&TrajectoryLog::default(), &r).is_err());
    }

    #[test]
    fn time_reversal() {
        let g = grid(256, 30.0);
        let r = Potential::harmonic(g, 1.0, 0.5, 0.0).unwrap();
        let psi0 = WaveFunction::gaussian(g, -1.0, 1.0, 1.0);
        let fwd = EvolConfig {
            dt: 2e-3,
            steps: 1000,
            log_every: 1000,
            ..Default::default()
        };
        let (mid, _) = evolve(&psi0, &r, &fwd).unwrap();
        let mid = mid.normalized().unwrap();
        let back = EvolConfig { dt: -2e-3, ..fwd };
        let (end, _) = evolve(&mid, &r, &back).unwrap();
        let err = (end.samples() - psi0.samples()).camax();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn stability_and_input_checks() {
        let g = grid(64, 10.0);
        let psi0 = WaveFunction::gaussian(g, 0.0, 1.0, 0.0);
        let cfg = EvolConfig {
            dt: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            evolve(&psi0, &Potential::zero(g), &cfg),
            Err(Error::Unstable { .. })
        ));
        let cfg = EvolConfig::default();
        assert!(matches!(
            evolve(&psi0.scaled(Complex64::new(2.0, 0.0)), &Potential::zero(g), &cfg),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn separable_3d_stays_product() {
        let g = grid(16, 12.0);
        let r = Potential::harmonic(g, 1.0, 1.0, 0.0).unwrap();
        let pot = SeparablePotential::new(r.clone(), r.clone(), r.clone());
        let a = WaveFunction::gaussian(g, 0.5, 1.0, 0.4);
        let b = WaveFunction::gaussian(g, -0.3, 1.2, 0.0);
        let c = WaveFunction::gaussian(g, 0.0, 0.9, -0.2);
        let psi0 = WaveFunction3::product(&a, &b, &c);
        let cfg = EvolConfig {
            dt: 2.5e-4,
            steps: 400,
            log_every: 400,
            ..Default::default()
        };
        let out = evolve3(&psi0, &pot, &cfg).unwrap();
        let (ax, _) = evolve(&a, &r, &cfg).unwrap();
        let (bx, _) = evolve(&b, &r, &cfg).unwrap();
        let (cx, _) = evolve(&c, &r, &cfg).unwrap();
        let d = out.distance_to_product(&ax, &bx, &cx);
        assert!(d < 1e-8, "{d}");
        assert!((out.norm_sqr() - 1.0).abs() < 1e-6);
    }
}
