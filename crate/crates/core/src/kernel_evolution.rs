//! Transition kernels and the U/V evolution they generate.
//!
//! A kernel `φ(x, ε) = r₀(x)δ(ε) + ħ²r₂(x, ε)` drives
//!
//! ```text
//!  ħ dU(x) = dt ∫ V(x+ε) φ(x,ε) dε
//! −ħ dV(x) = dt ∫ U(x+ε) φ(x,ε) dε
//! ```
//!
//! Its moments `P = ∫φ dε` and `Q = ½∫φε² dε` give the effective dynamics
//! `Q = −ħ²/2m`, `R = P`, i.e. the Schrödinger equation for `Ψ = U + iV`.
//!
//! Both the convolution update and the finite-difference update use the same
//! synchronized Störmer–Verlet step
//!
//! ```text
//! V½ = V  − (dt/2ħ) H U
//! U₁ = U  + (dt/ħ)  H V½
//! V₁ = V½ − (dt/2ħ) H U₁
//! ```
//!
//! which is the staggered leapfrog with `V` kicked at half steps. It is
//! time-reversible and reduces to the identity at `dt = 0`. All grids are
//! periodic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::WaveFunction;

/// Default Courant-like factor `c` in `dt ≤ c·m·dx²/ħ`.
pub const DEFAULT_STABILITY_FACTOR: f64 = 0.25;

/// Relative spread of `Q(x)` tolerated by [`to_dynamics`].
pub const MASS_SPREAD_TOL: f64 = 1e-9;

/// Symmetric ε grid `εⱼ = j·dε`, `j = −J..=J`, with trapezoid weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsGrid {
    pub half_points: usize,
    pub d_eps: f64,
}

impl EpsGrid {
    pub fn len(&self) -> usize {
        2 * self.half_points + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eps(&self, idx: usize) -> f64 {
        (idx as f64 - self.half_points as f64) * self.d_eps
    }

    pub fn offset(&self, idx: usize) -> isize {
        idx as isize - self.half_points as isize
    }

    /// Half-width `ε_max = J·dε` of the support.
    pub fn eps_max(&self) -> f64 {
        self.half_points as f64 * self.d_eps
    }

    pub fn weights(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                if self.half_points > 0 && (i == 0 || i == n - 1) {
                    0.5 * self.d_eps
                } else {
                    self.d_eps
                }
            })
            .collect()
    }
}

/// Kernel sampled on a periodic x grid with spacing `dx`; the ε grid shares
/// that spacing so `x + ε` always lands on a grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    pub hbar: f64,
    pub dx: f64,
    pub r0: Vec<f64>,
    /// Row `i` holds `r₂(xᵢ, εⱼ)` for `j` over [`TransitionKernel::eps_grid`].
    pub r2: Vec<Vec<f64>>,
    eps: EpsGrid,
}

impl TransitionKernel {
    pub fn new(hbar: f64, dx: f64, half_points: usize, r0: Vec<f64>, r2: Vec<Vec<f64>>) -> Result<Self> {
        if !(hbar > 0.0) || !(dx > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar and dx must be positive (hbar={hbar}, dx={dx})"
            )));
        }
        let eps = EpsGrid { half_points, d_eps: dx };
        if r2.len() != r0.len() {
            return Err(Error::DimensionMismatch {
                expected: r0.len(),
                found: r2.len(),
            });
        }
        if 2 * half_points + 1 > r0.len() {
            return Err(Error::InvalidParameter(format!(
                "kernel support of {} points exceeds the {}-point periodic grid",
                2 * half_points + 1,
                r0.len()
            )));
        }
        for row in &r2 {
            if row.len() != eps.len() {
                return Err(Error::DimensionMismatch {
                    expected: eps.len(),
                    found: row.len(),
                });
            }
            for j in 0..half_points {
                let (a, b) = (row[j], row[eps.len() - 1 - j]);
                if (a - b).abs() > 1e-14 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "r2 is not even in epsilon: {a} vs {b}"
                    )));
                }
            }
        }
        if r0.iter().chain(r2.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("kernel has non-finite entries".into()));
        }
        Ok(Self { hbar, dx, r0, r2, eps })
    }

    /// Pure δ kernel `φ = r₀(x)δ(ε)`.
    pub fn delta(hbar: f64, dx: f64, r0: Vec<f64>) -> Result<Self> {
        let r2 = vec![vec![0.0]; r0.len()];
        Self::new(hbar, dx, 0, r0, r2)
    }

    /// Box kernel `r₂ = c` on `|ε| ≤ J·dx` with `c` and `r₀` chosen so the
    /// discrete moments reproduce `Q = −ħ²/2m` and `P = R` exactly.
    pub fn boxed(hbar: f64, dx: f64, half_points: usize, mass: f64, r: &[f64]) -> Result<Self> {
        if half_points == 0 {
            return Err(Error::InvalidParameter("box kernel needs half_points >= 1".into()));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        let eps = EpsGrid { half_points, d_eps: dx };
        let w = eps.weights();
        let m0: f64 = w.iter().sum();
        let m2: f64 = w.iter().enumerate().map(|(j, wj)| wj * eps.eps(j).powi(2)).sum();
        let c = -1.0 / (mass * m2);
        let r0 = r.iter().map(|ri| ri - hbar * hbar * c * m0).collect();
        let r2 = vec![vec![c; eps.len()]; r.len()];
        Self::new(hbar, dx, half_points, r0, r2)
    }

    pub fn n(&self) -> usize {
        self.r0.len()
    }

    pub fn eps_grid(&self) -> EpsGrid {
        self.eps
    }

    /// `∫ φ(x, ε) ε dε` at every x; zero for an even kernel.
    pub fn first_moment(&self) -> Vec<f64> {
        self.weighted_moment(|e| e)
    }

    fn weighted_moment(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let w = self.eps.weights();
        let h2 = self.hbar * self.hbar;
        let half = self.eps.half_points;
        self.r2
            .iter()
            .map(|row| {
                // pair ±ε so odd moments cancel term by term
                let mut acc = w[half] * row[half] * f(0.0);
                for j in 1..=half {
                    let (lo, hi) = (half - j, half + j);
                    acc += w[lo] * row[lo] * f(self.eps.eps(lo)) + w[hi] * row[hi] * f(self.eps.eps(hi));
                }
                h2 * acc
            })
            .collect()
    }

    /// Gershgorin bound on the spectral radius of the convolution operator.
    pub fn spectral_radius_bound(&self) -> f64 {
        let w = self.eps.weights();
        let h2 = self.hbar * self.hbar;
        self.r0
            .iter()
            .zip(&self.r2)
            .map(|(a, row)| a.abs() + h2 * row.iter().zip(&w).map(|(r, wj)| (r * wj).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `(Kf)ᵢ = r₀ᵢ fᵢ + ħ² Σⱼ wⱼ r₂(xᵢ, εⱼ) f(xᵢ + εⱼ)`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n();
        let w = self.eps.weights();
        let h2 = self.hbar * self.hbar;
        (0..n)
            .map(|i| {
                let row = &self.r2[i];
                let mut acc = 0.0;
                for (j, (r, wj)) in row.iter().zip(&w).enumerate() {
                    let k = (i as isize + self.eps.offset(j)).rem_euclid(n as isize) as usize;
                    acc += wj * r * f[k];
                }
                self.r0[i] * f[i] + h2 * acc
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMoments {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Trapezoid moments `P = r₀ + ħ²∫r₂ dε`, `Q = ½ħ²∫r₂ε² dε`.
pub fn moments(k: &TransitionKernel) -> KernelMoments {
    let p0 = k.weighted_moment(|_| 1.0);
    let p = k.r0.iter().zip(p0).map(|(a, b)| a + b).collect();
    let q = k.weighted_moment(|e| 0.5 * e * e);
    KernelMoments { p, q }
}

/// Mass and potential-like function of the limiting Schrödinger equation.
///
/// `mass` is `+∞` only for the static limit of a kernel without a smooth
/// part, which [`to_dynamics`] never returns.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveDynamics {
    pub mass: f64,
    pub r: Vec<f64>,
    pub hbar: f64,
}

impl EffectiveDynamics {
    pub fn new(mass: f64, r: Vec<f64>, hbar: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("R has non-finite entries".into()));
        }
        Ok(Self { mass, r, hbar })
    }

    /// Dynamics with no kinetic term: each point rotates at `R(x)/ħ`.
    pub fn static_limit(r: Vec<f64>, hbar: f64) -> Self {
        Self {
            mass: f64::INFINITY,
            r,
            hbar,
        }
    }

    /// `ħ²/2m`, zero in the static limit.
    pub fn kinetic(&self) -> f64 {
        if self.mass.is_finite() {
            self.hbar * self.hbar / (2.0 * self.mass)
        } else {
            0.0
        }
    }

    /// `(Hf)ᵢ = −(ħ²/2m)(fᵢ₊₁ − 2fᵢ + fᵢ₋₁)/dx² + Rᵢfᵢ`, periodic.
    pub fn apply(&self, f: &[f64], dx: f64) -> Vec<f64> {
        let n = f.len();
        let a = self.kinetic() / (dx * dx);
        (0..n)
            .map(|i| {
                let l = f[(i + n - 1) % n];
                let r = f[(i + 1) % n];
                -a * (l - 2.0 * f[i] + r) + self.r[i] * f[i]
            })
            .collect()
    }

    /// Bound on `|λ|` for the discrete Hamiltonian.
    pub fn spectral_radius_bound(&self, dx: f64) -> f64 {
        let lo = self.r.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.r.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 4.0 * self.kinetic() / (dx * dx);
        lo.abs().max(hi.abs())
    }

    /// Largest admissible `|dt|`: the Courant-like `c·m·dx²/ħ` and the
    /// leapfrog limit `2ħ/|λ|max`, whichever is smaller.
    pub fn stability_bound(&self, dx: f64, factor: f64) -> f64 {
        let courant = if self.mass.is_finite() {
            factor * self.mass * dx * dx / self.hbar
        } else {
            f64::INFINITY
        };
        let rho = self.spectral_radius_bound(dx);
        let leapfrog = if rho > 0.0 {
            2.0 * self.hbar / rho
        } else {
            f64::INFINITY
        };
        courant.min(leapfrog)
    }
}

/// `m = −ħ²/(2⟨Q⟩)`, `R = P`.
pub fn to_dynamics(m: &KernelMoments, hbar: f64) -> Result<EffectiveDynamics> {
    if m.q.is_empty() {
        return Err(Error::InvalidParameter("empty moments".into()));
    }
    if let Some((i, q)) = m.q.iter().enumerate().find(|(_, q)| !(**q < 0.0)) {
        return Err(Error::NotParticleLike(format!("Q = {q:.3e} >= 0 at index {i}")));
    }
    let mean = m.q.iter().sum::<f64>() / m.q.len() as f64;
    let lo = m.q.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = m.q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / mean.abs();
    if spread > MASS_SPREAD_TOL {
        return Err(Error::MassNotConstant { spread });
    }
    EffectiveDynamics::new(-hbar * hbar / (2.0 * mean), m.p.clone(), hbar)
}

/// Real and imaginary parts of `Ψ` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl SplitState {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(Self { u, v })
    }

    pub fn from_wave(psi: &WaveFunction) -> Self {
        Self {
            u: psi.samples().iter().map(|c| c.re).collect(),
            v: psi.samples().iter().map(|c| c.im).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn psi(&self) -> Vec<Complex64> {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect()
    }

    /// `Σ (U² + V²) dx`.
    pub fn norm_sqr(&self, dx: f64) -> f64 {
        self.u.iter().zip(&self.v).map(|(a, b)| a * a + b * b).sum::<f64>() * dx
    }

    /// Multiply `Ψ` by `e^{iα}`.
    pub fn rotated(&self, alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self {
            u: self.u.iter().zip(&self.v).map(|(a, b)| c * a - s * b).collect(),
            v: self.u.iter().zip(&self.v).map(|(a, b)| s * a + c * b).collect(),
        }
    }

    fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }
}

/// Max pointwise `|Ψ_a − Ψ_b|`.
pub fn max_abs_diff(a: &SplitState, b: &SplitState) -> f64 {
    a.u.iter()
        .zip(&a.v)
        .zip(b.u.iter().zip(&b.v))
        .map(|((ua, va), (ub, vb))| (ua - ub).hypot(va - vb))
        .fold(0.0, f64::max)
}

fn verlet(s: &SplitState, dt: f64, hbar: f64, h: impl Fn(&[f64]) -> Vec<f64>) -> SplitState {
    if dt == 0.0 {
        return s.clone();
    }
    let a = 0.5 * dt / hbar;
    let hu = h(&s.u);
    let v_half: Vec<f64> = s.v.iter().zip(&hu).map(|(v, x)| v - a * x).collect();
    let hv = h(&v_half);
    let u: Vec<f64> = s.u.iter().zip(&hv).map(|(u, x)| u + 2.0 * a * x).collect();
    let hu = h(&u);
    let v = v_half.iter().zip(&hu).map(|(v, x)| v - a * x).collect();
    SplitState { u, v }
}

fn check_len(s: &SplitState, n: usize) -> Result<()> {
    if s.u.len() != n || s.v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.u.len().max(s.v.len()),
        });
    }
    Ok(())
}

fn kernel_bound(k: &TransitionKernel) -> f64 {
    let rho = k.spectral_radius_bound();
    if rho > 0.0 {
        2.0 * k.hbar / rho
    } else {
        f64::INFINITY
    }
}

/// One convolution step. `|dt|` must stay below `2ħ/ρ` with `ρ` the
/// Gershgorin bound of the kernel operator.
pub fn integral_step(s: &SplitState, k: &TransitionKernel, dt: f64) -> Result<SplitState> {
    integral_evolve(s, k, dt, 1)
}

/// `steps` convolution steps.
pub fn integral_evolve(s: &SplitState, k: &TransitionKernel, dt: f64, steps: usize) -> Result<SplitState> {
    check_len(s, k.n())?;
    let bound = kernel_bound(k);
    if !(dt.abs() < bound) {
        return Err(Error::Unstable { dt, bound });
    }
    let mut cur = s.clone();
    for step in 0..steps {
        cur = verlet(&cur, dt, k.hbar, |f| k.apply(f));
        if !cur.is_finite() {
            return Err(Error::NonFinite { step: step + 1 });
        }
    }
    Ok(cur)
}

/// One finite-difference step at the default stability factor.
pub fn pde_step(s: &SplitState, d: &EffectiveDynamics, dx: f64, dt: f64) -> Result<SplitState> {
    pde_evolve(s, d, dx, dt, 1, DEFAULT_STABILITY_FACTOR)
}

/// `steps` finite-difference steps, checking `|dt|` against
/// [`EffectiveDynamics::stability_bound`].
pub fn pde_evolve(
    s: &SplitState,
    d: &EffectiveDynamics,
    dx: f64,
    dt: f64,
    steps: usize,
    factor: f64,
) -> Result<SplitState> {
    check_len(s, d.r.len())?;
    let bound = d.stability_bound(dx, factor);
    if !(dt.abs() <= bound) {
        return Err(Error::Unstable { dt, bound });
    }
    let mut cur = s.clone();
    for step in 0..steps {
        cur = verlet(&cur, dt, d.hbar, |f| d.apply(f, dx));
        if !cur.is_finite() {
            return Err(Error::NonFinite { step: step + 1 });
        }
    }
    Ok(cur)
}

/// Evolve `psi0` for time `t` once with the kernel and once with its
/// effective dynamics, and return the max pointwise difference.
///
/// The step count is `⌈t/dt⌉` with the step shrunk to land on `t`. A kernel
/// without a smooth part is compared against the static limit.
pub fn consistency(k: &TransitionKernel, psi0: &SplitState, t: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need t >= 0 and dt > 0 (t={t}, dt={dt})"
        )));
    }
    let m = moments(k);
    let d = if m.q.iter().all(|&q| q == 0.0) {
        EffectiveDynamics::static_limit(m.p.clone(), k.hbar)
    } else {
        to_dynamics(&m, k.hbar)?
    };
    let steps = (t / dt).ceil() as usize;
    let h = if steps > 0 { t / steps as f64 } else { 0.0 };
    let a = integral_evolve(psi0, k, h, steps)?;
    let b = pde_evolve(psi0, &d, k.dx, h, steps, DEFAULT_STABILITY_FACTOR)?;
    Ok(max_abs_diff(&a, &b))
}
