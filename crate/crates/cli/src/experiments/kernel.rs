use dimech_core::kernel_evolution::{consistency, moments, to_dynamics, SplitState, TransitionKernel};
use dimech_core::operators::{Grid1D, WaveFunction};
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::config::Issues;
use crate::report::Check;
use crate::table::Table;

/// Box kernels of decreasing half-width against the Schrodinger equation
/// built from their moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConsistency {
    pub n: usize,
    pub length: f64,
    pub sigma: f64,
    pub k0: f64,
    pub mass: f64,
    pub hbar: f64,
    pub t: f64,
    pub dt: f64,
    /// Box half-widths in grid points, widest first.
    pub half_widths: Vec<usize>,
    pub min_order: f64,
}

impl Default for KernelConsistency {
    fn default() -> Self {
        Self {
            n: 512,
            length: 40.0,
            sigma: 2.0,
            k0: 0.0,
            mass: 1.0,
            hbar: 1.0,
            t: 1.0,
            dt: 1e-3,
            half_widths: vec![16, 8, 4, 2],
            min_order: 2.0,
        }
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

impl KernelConsistency {
    pub fn check(&self, issues: &mut Issues) {
        issues.within("n", self.n, 16, 4096);
        issues.positive("length", self.length);
        issues.positive("sigma", self.sigma);
        issues.finite("k0", self.k0);
        issues.positive("mass", self.mass);
        issues.positive("hbar", self.hbar);
        issues.positive("t", self.t);
        issues.positive("dt", self.dt);
        if self.half_widths.len() < 2 {
            issues.fail("half_widths", "need at least two widths for an order estimate");
        }
        for &j in &self.half_widths {
            if j < 2 || 2 * j + 1 > self.n / 4 {
                issues.fail("half_widths", format!("half-width {j} must lie in [2, n/8]"));
            }
        }
        issues.finite("min_order", self.min_order);
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let g = Grid1D::periodic(-0.5 * self.length, 0.5 * self.length, self.n)?;
        let psi = SplitState::from_wave(&WaveFunction::gaussian(g, 0.0, self.sigma, self.k0));
        let r = vec![0.0; g.n];
        let mut t = Table::new(
            "ladder",
            &[
                ("half_width_points", "1"),
                ("width", "L"),
                ("mass_recovered", "M"),
                ("consistency_error", "1"),
                ("pairwise_order", "1"),
            ],
        );
        let mut widths: Vec<f64> = Vec::new();
        let mut errors: Vec<f64> = Vec::new();
        let mut mass_dev = 0.0f64;
        for &j in &self.half_widths {
            let k = TransitionKernel::boxed(self.hbar, g.dx, j, self.mass, &r)?;
            let d = to_dynamics(&moments(&k), self.hbar)?;
            mass_dev = mass_dev.max((d.mass - self.mass).abs() / self.mass);
            let err = consistency(&k, &psi, self.t, self.dt)?;
            let w = j as f64 * g.dx;
            let order = match (widths.last(), errors.last()) {
                (Some(&w0), Some(&e0)) => (e0 / err).ln() / (w0 / w).ln(),
                _ => f64::NAN,
            };
            t.push(vec![j.into(), w.into(), d.mass.into(), err.into(), order.into()]);
            widths.push(w);
            errors.push(err);
        }
        let order = log_slope(&widths, &errors);
        Ok(Outcome {
            tables: vec![t],
            checks: vec![
                Check::below("mass_round_trip_relative", mass_dev, 1e-10),
                Check::at_least("fitted_order", order, self.min_order),
            ],
        })
    }
}
