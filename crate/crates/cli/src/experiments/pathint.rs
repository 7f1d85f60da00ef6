use dimech_core::operators::Grid1D;
use dimech_core::pathint::{
    balanced_length, classical_action, free_kernel, grid_matched_time, harmonic_action, kernel_relative_error,
    mehler_kernel, propagator, HbarScan, LagrangianSpec, PotentialShape, Slicing,
};
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::config::Issues;
use crate::report::Check;
use crate::table::Table;

/// Sliced propagators against closed-form kernels. The free comparison runs
/// at the grid-matched time `mL²/(2πħn)`, where the periodic grid carries the
/// continuum kernel exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagatorCompare {
    pub n: usize,
    pub length: f64,
    pub slices: usize,
    pub mass: f64,
    pub hbar: f64,
    pub omega: f64,
    /// Duration of the harmonic (Mehler) comparison.
    pub t_harmonic: f64,
    pub harmonic_slices: usize,
    /// Half-width of the central block used for the Mehler comparison.
    pub central_block: f64,
    pub semigroup_n: usize,
    pub semigroup_length: f64,
    pub semigroup_split: f64,
    pub semigroup_total: f64,
    pub semigroup_slices: Vec<usize>,
}

impl Default for PropagatorCompare {
    fn default() -> Self {
        Self {
            n: 512,
            length: 40.0,
            slices: 256,
            mass: 1.0,
            hbar: 1.0,
            omega: 1.0,
            t_harmonic: 1.0,
            harmonic_slices: 128,
            central_block: 5.0,
            semigroup_n: 128,
            semigroup_length: 20.0,
            semigroup_split: 0.4,
            semigroup_total: 1.0,
            semigroup_slices: vec![16, 32, 64, 128],
        }
    }
}

impl PropagatorCompare {
    pub fn check(&self, issues: &mut Issues) {
        issues.within("n", self.n, 16, 1024);
        if !self.n.is_multiple_of(2) {
            issues.fail("n", "must be even");
        }
        issues.positive("length", self.length);
        issues.within("slices", self.slices, 1, 4096);
        issues.positive("mass", self.mass);
        issues.positive("hbar", self.hbar);
        issues.positive("omega", self.omega);
        issues.positive("t_harmonic", self.t_harmonic);
        if (self.omega * self.t_harmonic).sin().abs() < 0.5 {
            issues.fail("t_harmonic", "too close to a focal time (|sin wT| < 0.5)");
        }
        issues.within("harmonic_slices", self.harmonic_slices, 1, 4096);
        issues.positive("central_block", self.central_block);
        issues.within("semigroup_n", self.semigroup_n, 16, 512);
        issues.positive("semigroup_length", self.semigroup_length);
        issues.positive("semigroup_total", self.semigroup_total);
        if !(self.semigroup_split > 0.0 && self.semigroup_split < self.semigroup_total) {
            issues.fail("semigroup_split", "must lie strictly inside (0, semigroup_total)");
        }
        if self.semigroup_slices.len() < 2 {
            issues.fail("semigroup_slices", "need at least two slice counts");
        }
        if !self.semigroup_slices.windows(2).all(|w| w[0] < w[1]) {
            issues.fail("semigroup_slices", "must be strictly increasing");
        }
        for &s in &self.semigroup_slices {
            issues.within("semigroup_slices", s, 1, 1024);
        }
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let (m, hbar) = (self.mass, self.hbar);
        let g = Grid1D::periodic(-0.5 * self.length, 0.5 * self.length, self.n)?;
        let t_star = grid_matched_time(m, hbar, &g);
        let free = LagrangianSpec::new(m, hbar, PotentialShape::Free)?;
        let k = propagator(&free, &Slicing::new(0.0, t_star, self.slices)?, &g)?;
        let free_err = kernel_relative_error(&k, |x, xp| free_kernel(m, hbar, t_star, x, xp), |_, _| true);
        let mut row = Table::new(
            "free-row",
            &[
                ("x", "L"),
                ("re_k", "1/L"),
                ("im_k", "1/L"),
                ("re_k_exact", "1/L"),
                ("im_k_exact", "1/L"),
            ],
        );
        let centre = self.n / 2;
        for (i, x) in g.points().into_iter().enumerate() {
            let exact = free_kernel(m, hbar, t_star, x, g.x(centre));
            let z = k.matrix[(i, centre)];
            row.push(vec![
                x.into(),
                z.re.into(),
                z.im.into(),
                exact.re.into(),
                exact.im.into(),
            ]);
        }

        let harm = LagrangianSpec::new(m, hbar, PotentialShape::Harmonic { omega: self.omega })?;
        let l = balanced_length(m, self.omega, hbar, self.n);
        let gb = Grid1D::periodic(-0.5 * l, 0.5 * l, self.n)?;
        let kh = propagator(&harm, &Slicing::new(0.0, self.t_harmonic, self.harmonic_slices)?, &gb)?;
        let block = self.central_block;
        let mehler_err = kernel_relative_error(
            &kh,
            |x, xp| mehler_kernel(m, self.omega, hbar, self.t_harmonic, x, xp),
            |x, xp| x.abs() <= block && xp.abs() <= block,
        );

        let gs = Grid1D::periodic(
            -0.5 * self.semigroup_length,
            0.5 * self.semigroup_length,
            self.semigroup_n,
        )?;
        let mut semigroup = Table::new(
            "semigroup",
            &[("slices", "1"), ("composition_defect", "1"), ("unitarity_defect", "1")],
        );
        let mut defects = Vec::new();
        let mut unitarity = kh.unitarity_defect().max(k.unitarity_defect());
        for &n in &self.semigroup_slices {
            let a = propagator(&harm, &Slicing::new(0.0, self.semigroup_split, n)?, &gs)?;
            let b = propagator(
                &harm,
                &Slicing::new(self.semigroup_split, self.semigroup_total, n)?,
                &gs,
            )?;
            let c = propagator(&harm, &Slicing::new(0.0, self.semigroup_total, n)?, &gs)?;
            let d = b.after(&a)?.distance(&c)?;
            unitarity = unitarity.max(c.unitarity_defect());
            semigroup.push(vec![n.into(), d.into(), c.unitarity_defect().into()]);
            defects.push(d);
        }
        let decreasing = defects.windows(2).all(|w| w[1] < w[0]);

        Ok(Outcome {
            tables: vec![row, semigroup],
            checks: vec![
                Check::below("free_kernel_relative_error", free_err, 1e-3),
                Check::holds("free_resolution_ok", !k.resolution_warning),
                Check::below("mehler_central_relative_error", mehler_err, 1e-2),
                Check::holds("semigroup_defect_decreasing", decreasing),
                Check::below("unitarity_defect", unitarity, 1e-10),
            ],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeastAction {
    pub mass: f64,
    pub omega: f64,
    pub g: f64,
    pub x1: f64,
    pub x2: f64,
    pub times: Vec<f64>,
    pub knots: usize,
    pub hbars: Vec<f64>,
    pub scan_t: f64,
    pub scan_n: usize,
    pub scan_slices: usize,
}

impl Default for LeastAction {
    fn default() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            g: 0.5,
            x1: 1.0,
            x2: -0.8,
            times: vec![0.5, 1.0, 2.0],
            knots: 4001,
            hbars: vec![1.0, 0.5, 0.25, 0.1, 0.05],
            scan_t: 1.0,
            scan_n: 256,
            scan_slices: 256,
        }
    }
}

impl LeastAction {
    pub fn check(&self, issues: &mut Issues) {
        issues.positive("mass", self.mass);
        issues.positive("omega", self.omega);
        issues.finite("g", self.g);
        issues.finite("x1", self.x1);
        issues.finite("x2", self.x2);
        issues.non_empty("times", &self.times);
        for &t in &self.times {
            issues.positive("times", t);
            if (self.omega * t).sin().abs() < 0.1 {
                issues.fail("times", format!("t = {t} is too close to a focal time"));
            }
        }
        issues.within("knots", self.knots, 3, 100_001);
        issues.non_empty("hbars", &self.hbars);
        for &h in &self.hbars {
            issues.positive("hbars", h);
        }
        issues.positive("scan_t", self.scan_t);
        issues.within("scan_n", self.scan_n, 16, 1024);
        issues.within("scan_slices", self.scan_slices, 1, 4096);
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let (m, w, g, x1, x2) = (self.mass, self.omega, self.g, self.x1, self.x2);
        let mut t = Table::new(
            "actions",
            &[
                ("potential", "-"),
                ("t", "T"),
                ("action", "hbar"),
                ("action_exact", "hbar"),
                ("relative_error", "1"),
                ("newton_iterations", "1"),
            ],
        );
        let mut worst_harm = 0.0f64;
        let mut worst_other = 0.0f64;
        for &tt in &self.times {
            let cases = [
                ("free", PotentialShape::Free, m * (x2 - x1).powi(2) / (2.0 * tt)),
                (
                    "linear",
                    PotentialShape::Linear { g },
                    m * (x2 - x1).powi(2) / (2.0 * tt) - g * tt * (x1 + x2) / 2.0 - g * g * tt.powi(3) / (24.0 * m),
                ),
                (
                    "harmonic",
                    PotentialShape::Harmonic { omega: w },
                    harmonic_action(m, w, x1, x2, tt),
                ),
            ];
            for (name, shape, exact) in cases {
                let path = classical_action(&LagrangianSpec::new(m, 1.0, shape)?, x1, x2, tt, self.knots)?;
                let rel = (path.action - exact).abs() / exact.abs().max(1e-300);
                if name == "harmonic" {
                    worst_harm = worst_harm.max(rel);
                } else {
                    worst_other = worst_other.max(rel);
                }
                t.push(vec![
                    name.into(),
                    tt.into(),
                    path.action.into(),
                    exact.into(),
                    rel.into(),
                    path.iterations.into(),
                ]);
            }
        }

        let scan = HbarScan {
            mass: m,
            omega: w,
            t: self.scan_t,
            x1,
            x2,
            n: self.scan_n,
            n_slices: self.scan_slices,
        };
        let mut phase = Table::new(
            "phase",
            &[("hbar", "hbar"), ("action_over_hbar", "1"), ("phase_mismatch", "rad")],
        );
        let mut worst_phase = 0.0f64;
        for s in scan.run(&self.hbars)? {
            worst_phase = worst_phase.max(s.mismatch.abs() / s.classical_phase.abs().max(1.0));
            phase.push(vec![s.hbar.into(), s.classical_phase.into(), s.mismatch.into()]);
        }

        Ok(Outcome {
            tables: vec![t, phase],
            checks: vec![
                Check::below("harmonic_action_relative", worst_harm, 1e-6),
                Check::below("free_linear_action_relative", worst_other, 1e-6),
                Check::below("phase_mismatch_relative", worst_phase, 0.02),
            ],
        })
    }
}
