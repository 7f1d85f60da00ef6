use dimech_core::operators::{
    commutator_uncertainty, momentum_op, position_op, spectral_momentum_op, Grid1D, WaveFunction,
};
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::config::Issues;
use crate::report::Check;
use crate::table::Table;

/// Gaussian packets on a periodic grid. `dp` uses the spectral momentum; the
/// central-stencil product is reported next to its own Robertson bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Uncertainty {
    pub hbar: f64,
    pub n: usize,
    pub length: f64,
    pub sigmas: Vec<f64>,
}

impl Default for Uncertainty {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            n: 512,
            length: 60.0,
            sigmas: vec![0.5, 0.75, 1.0, 1.5, 2.0, 3.0],
        }
    }
}

impl Uncertainty {
    pub fn check(&self, issues: &mut Issues) {
        issues.positive("hbar", self.hbar);
        issues.within("n", self.n, 16, 1024);
        issues.positive("length", self.length);
        issues.non_empty("sigmas", &self.sigmas);
        for s in &self.sigmas {
            issues.positive("sigmas", *s);
            if *s > self.length / 16.0 {
                issues.fail(
                    "sigmas",
                    format!("sigma {s} exceeds length / 16; the tails would reach the box edge"),
                );
            }
            if self.n > 0 && *s < 4.0 * self.length / self.n as f64 {
                issues.fail("sigmas", format!("sigma {s} is below four grid spacings"));
            }
        }
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let g = Grid1D::periodic(-0.5 * self.length, 0.5 * self.length, self.n)?;
        let x = position_op(&g);
        let p = spectral_momentum_op(&g, self.hbar)?;
        let p_fd = momentum_op(&g, self.hbar)?;
        let half = 0.5 * self.hbar;
        let mut t = Table::new(
            "gaussians",
            &[
                ("sigma0", "L"),
                ("dx", "L"),
                ("dp", "hbar/L"),
                ("dxdp", "hbar"),
                ("hbar_half", "hbar"),
                ("dxdp_stencil", "hbar"),
                ("robertson_stencil", "hbar"),
            ],
        );
        let mut floor = f64::INFINITY;
        let mut equality = 0.0f64;
        let mut stencil = f64::INFINITY;
        for &sigma in &self.sigmas {
            let psi = WaveFunction::gaussian(g, 0.0, sigma, 0.0);
            let u = commutator_uncertainty(&x, &p, &psi)?;
            let v = commutator_uncertainty(&x, &p_fd, &psi)?;
            floor = floor.min(u.product() - half);
            equality = equality.max((u.product() / half - 1.0).abs());
            stencil = stencil.min(v.product() - v.bound);
            t.push(vec![
                sigma.into(),
                u.d_a.into(),
                u.d_b.into(),
                u.product().into(),
                half.into(),
                v.product().into(),
                v.bound.into(),
            ]);
        }
        Ok(Outcome {
            tables: vec![t],
            checks: vec![
                Check::at_least("dxdp_minus_hbar_half", floor, -1e-9),
                Check::below("gaussian_equality_relative", equality, 0.01),
                Check::at_least("stencil_robertson_margin", stencil, -1e-9),
            ],
        })
    }
}
