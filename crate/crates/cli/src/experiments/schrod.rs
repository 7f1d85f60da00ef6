use dimech_core::operators::{Grid1D, WaveFunction};
use dimech_core::schrod::{ehrenfest_residuals, evolve, stationary, EvolConfig, Potential};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::Outcome;
use crate::config::Issues;
use crate::report::Check;
use crate::table::Table;

fn periodic(n: usize, length: f64) -> dimech_core::Result<Grid1D> {
    Grid1D::periodic(-0.5 * length, 0.5 * length, n)
}

/// Free Gaussian spreading, long-run norm and forward/backward return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketSpread {
    pub n: usize,
    pub length: f64,
    pub sigma0: f64,
    pub hbar: f64,
    pub mass: f64,
    pub dt: f64,
    pub log_every: usize,
    pub norm_steps: usize,
    pub reversal_steps: usize,
    /// Carrier wavenumber of the packet used for the norm and reversal runs.
    pub k0: f64,
}

impl Default for PacketSpread {
    fn default() -> Self {
        Self {
            n: 512,
            length: 60.0,
            sigma0: 1.0,
            hbar: 1.0,
            mass: 1.0,
            dt: 2e-3,
            log_every: 50,
            norm_steps: 10_000,
            reversal_steps: 1000,
            k0: 1.0,
        }
    }
}

impl PacketSpread {
    pub fn check(&self, issues: &mut Issues) {
        issues.within("n", self.n, 16, 1024);
        issues.positive("length", self.length);
        issues.positive("sigma0", self.sigma0);
        issues.positive("hbar", self.hbar);
        issues.positive("mass", self.mass);
        issues.positive("dt", self.dt);
        issues.within("log_every", self.log_every, 1, usize::MAX);
        issues.within("norm_steps", self.norm_steps, 1, 1_000_000);
        issues.within("reversal_steps", self.reversal_steps, 1, 1_000_000);
        issues.finite("k0", self.k0);
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let g = periodic(self.n, self.length)?;
        let free = Potential::zero(g);
        let base = EvolConfig {
            hbar: self.hbar,
            mass: self.mass,
            dt: self.dt,
            log_every: self.log_every,
            ..Default::default()
        };

        // width doubles when (ħt/2mσ₀²)² = 3
        let t_double = 2.0 * 3f64.sqrt() * self.mass * self.sigma0.powi(2) / self.hbar;
        let steps = (t_double / self.dt).round() as usize;
        let psi0 = WaveFunction::gaussian(g, 0.0, self.sigma0, 0.0);
        let (_, log) = evolve(&psi0, &free, &EvolConfig { steps, ..base })?;
        let mut width = Table::new("width", &[("t", "T"), ("variance", "L^2"), ("variance_exact", "L^2")]);
        let law = |t: f64| self.sigma0.powi(2) + (self.hbar * t / (2.0 * self.mass * self.sigma0)).powi(2);
        for (rec, var) in log.records.iter().zip(log.variances(&g)) {
            width.push(vec![rec.t.into(), var.into(), law(rec.t).into()]);
        }
        let t_end = log.records.last().map_or(0.0, |r| r.t);
        let var_end = log.variances(&g).last().copied().unwrap_or(f64::NAN);
        let width_err = (var_end.sqrt() / law(t_end).sqrt() - 1.0).abs();

        let moving = WaveFunction::gaussian(g, 0.0, self.sigma0, self.k0);
        let long = EvolConfig {
            steps: self.norm_steps,
            log_every: (self.norm_steps / 200).max(1),
            ..base
        };
        let (_, long_log) = evolve(&moving, &free, &long)?;
        let mut norm = Table::new("norm", &[("t", "T"), ("norm", "1"), ("energy", "E")]);
        for rec in &long_log.records {
            norm.push(vec![rec.t.into(), rec.norm.into(), rec.energy.into()]);
        }

        let fwd = EvolConfig {
            steps: self.reversal_steps,
            log_every: self.reversal_steps,
            ..base
        };
        let (mid, _) = evolve(&moving, &free, &fwd)?;
        let (back, _) = evolve(&mid.normalized()?, &free, &EvolConfig { dt: -self.dt, ..fwd })?;
        let reversal = (back.samples() - moving.samples()).camax();

        Ok(Outcome {
            tables: vec![width, norm],
            checks: vec![
                Check::below("width_law_relative", width_err, 0.01),
                Check::below("norm_drift", long_log.norm_drift(), 1e-6),
                Check::below("time_reversal_error", reversal, 1e-8),
            ],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaryStates {
    pub n: usize,
    pub length: f64,
    pub omega: f64,
    pub hbar: f64,
    pub mass: f64,
    pub levels: usize,
}

impl Default for StationaryStates {
    fn default() -> Self {
        Self {
            n: 256,
            length: 20.0,
            omega: 1.0,
            hbar: 1.0,
            mass: 1.0,
            levels: 6,
        }
    }
}

impl StationaryStates {
    pub fn check(&self, issues: &mut Issues) {
        issues.within("n", self.n, 16, 1024);
        issues.positive("length", self.length);
        issues.positive("omega", self.omega);
        issues.positive("hbar", self.hbar);
        issues.positive("mass", self.mass);
        issues.within("levels", self.levels, 2, self.n / 4);
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let g = periodic(self.n, self.length)?;
        let r = Potential::harmonic(g, self.mass, self.omega, 0.0)?;
        let e = stationary(&r, self.hbar, self.mass, self.levels)?.eigenvalues;
        let quantum = self.hbar * self.omega;
        let mut t = Table::new(
            "levels",
            &[("level", "1"), ("energy", "E"), ("energy_exact", "E"), ("spacing", "E")],
        );
        let mut level_err = 0.0f64;
        let mut spacing_err = 0.0f64;
        for (k, &ek) in e.iter().enumerate() {
            let exact = (k as f64 + 0.5) * quantum;
            level_err = level_err.max((ek - exact).abs() / exact);
            let spacing = if k > 0 { ek - e[k - 1] } else { f64::NAN };
            if k > 0 {
                spacing_err = spacing_err.max((spacing / quantum - 1.0).abs());
            }
            t.push(vec![k.into(), ek.into(), exact.into(), spacing.into()]);
        }
        Ok(Outcome {
            tables: vec![t],
            checks: vec![
                Check::below("level_spacing_relative", spacing_err, 0.01),
                Check::below("level_relative", level_err, 0.01),
            ],
        })
    }
}

/// One period in `R = ½mω²x² + g·x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ehrenfest {
    pub n: usize,
    pub length: f64,
    pub omega: f64,
    pub g: f64,
    pub hbar: f64,
    pub mass: f64,
    pub x0: f64,
    pub sigma: f64,
    pub k0: f64,
    pub dt: f64,
    pub log_every: usize,
}

impl Default for Ehrenfest {
    fn default() -> Self {
        Self {
            n: 1024,
            length: 20.0,
            omega: 1.0,
            g: 0.1,
            hbar: 1.0,
            mass: 1.0,
            x0: 1.0,
            sigma: 0.5f64.sqrt(),
            k0: 0.0,
            dt: 5e-5,
            log_every: 200,
        }
    }
}

impl Ehrenfest {
    pub fn check(&self, issues: &mut Issues) {
        issues.within("n", self.n, 16, 1024);
        issues.positive("length", self.length);
        issues.positive("omega", self.omega);
        issues.finite("g", self.g);
        issues.positive("hbar", self.hbar);
        issues.positive("mass", self.mass);
        issues.finite("x0", self.x0);
        issues.positive("sigma", self.sigma);
        issues.finite("k0", self.k0);
        issues.positive("dt", self.dt);
        issues.within("log_every", self.log_every, 1, usize::MAX);
        if self.dt.is_finite() && self.dt > 0.0 && self.omega > 0.0 && 2.0 * PI / self.omega / self.dt > 5e6 {
            issues.fail("dt", "more than 5e6 steps per period");
        }
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let g = periodic(self.n, self.length)?;
        let (m, w, f) = (self.mass, self.omega, self.g);
        let r = Potential::from_fn(g, |x| 0.5 * m * w * w * x * x + f * x)?;
        let psi0 = WaveFunction::gaussian(g, self.x0, self.sigma, self.k0);
        let cfg = EvolConfig {
            hbar: self.hbar,
            mass: self.mass,
            dt: self.dt,
            steps: (2.0 * PI / self.omega / self.dt).round() as usize,
            log_every: self.log_every,
            ..Default::default()
        };
        let (_, log) = evolve(&psi0, &r, &cfg)?;
        let residuals = ehrenfest_residuals(&log, &r)?;
        let mut t = Table::new(
            "residuals",
            &[("t", "T"), ("x_mean", "L"), ("p_mean", "hbar/L"), ("residual", "E/L")],
        );
        let mut worst = 0.0f64;
        for (i, (time, res)) in residuals.iter().enumerate() {
            let rec = &log.records[i + 1];
            worst = worst.max(res.abs());
            t.push(vec![
                (*time).into(),
                rec.x_mean.into(),
                rec.p_mean.into(),
                (*res).into(),
            ]);
        }
        Ok(Outcome {
            tables: vec![t],
            checks: vec![
                Check::below("ehrenfest_residual", worst, 1e-3),
                Check::below("norm_drift", log.norm_drift(), 1e-6),
            ],
        })
    }
}
