use dimech_core::grassmann::{dirac_mode_hamiltonian, fermi_oscillator, oscillation_residual, tensor_sum, GOperator};
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::config::Issues;
use crate::report::Check;
use crate::table::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FermiOscillator {
    pub omegas: Vec<f64>,
}

impl Default for FermiOscillator {
    fn default() -> Self {
        Self {
            omegas: vec![0.5, 1.0, 2.0],
        }
    }
}

impl FermiOscillator {
    pub fn check(&self, issues: &mut Issues) {
        issues.non_empty("omegas", &self.omegas);
        for w in &self.omegas {
            issues.positive("omegas", *w);
            issues.within("omegas", *w, 1e-3, 1e3);
        }
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let mut algebra = Table::new(
            "algebra",
            &[
                ("omega", "E"),
                ("generator_defect", "1"),
                ("ladder_anticommutator_defect", "E"),
                ("ladder_nilpotency_defect", "E"),
                ("eom_residual", "E^2"),
                ("first_order_residual", "E"),
                ("metric_hermiticity_defect", "E"),
            ],
        );
        let mut spectrum = Table::new(
            "spectrum",
            &[
                ("omega", "E"),
                ("index", "1"),
                ("re", "E"),
                ("im", "E"),
                ("expected", "E"),
            ],
        );
        let (mut gen, mut anti, mut nil, mut eig, mut eom, mut first) =
            (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for &w in &self.omegas {
            let osc = fermi_oscillator(w)?;
            let mut g = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    let li = GOperator::left_mul(osc.alg, i)?;
                    let lj = GOperator::left_mul(osc.alg, j)?;
                    let di = GOperator::deriv(osc.alg, i)?;
                    let dj = GOperator::deriv(osc.alg, j)?;
                    let delta = if i == j { 1.0 } else { 0.0 };
                    g = g
                        .max(li.anticommutator(&lj).max_abs())
                        .max(di.anticommutator(&dj).max_abs())
                        .max(di.anticommutator(&lj).distance_to_scalar(delta));
                }
            }
            let (a, n) = osc.mode.algebra_defects();
            let mut vals = osc.mode.number().eigenvalues()?;
            vals.sort_by(|x, y| x.re.total_cmp(&y.re));
            for (k, v) in vals.iter().enumerate() {
                let expected = if k < vals.len() / 2 { 0.0 } else { 2.0 * w };
                eig = eig.max((v.re - expected).abs()).max(v.im.abs());
                spectrum.push(vec![w.into(), k.into(), v.re.into(), v.im.into(), expected.into()]);
            }
            let e = osc.eom_residual()?;
            let f = osc.first_order_residual()?;
            let herm = osc.hamiltonian.metric_hermiticity_defect(&osc.metric);
            algebra.push(vec![
                w.into(),
                g.into(),
                a.into(),
                n.into(),
                e.into(),
                f.into(),
                herm.into(),
            ]);
            gen = gen.max(g);
            anti = anti.max(a);
            nil = nil.max(n);
            eom = eom.max(e);
            first = first.max(f).max(herm);
        }
        Ok(Outcome {
            tables: vec![algebra, spectrum],
            checks: vec![
                Check::holds("generators_exact", gen == 0.0),
                Check::below("ladder_anticommutator_defect", anti, 1e-14),
                Check::below("ladder_nilpotency_defect", nil, 1e-14),
                Check::below("number_spectrum_error", eig, 1e-12),
                Check::below("eom_residual", eom, 1e-12),
                Check::below("first_order_and_metric_defect", first, 1e-12),
            ],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiracModes {
    pub omegas: Vec<f64>,
}

impl Default for DiracModes {
    fn default() -> Self {
        Self {
            omegas: vec![0.7, 1.3, 2.0],
        }
    }
}

impl DiracModes {
    pub fn check(&self, issues: &mut Issues) {
        issues.within("omegas", self.omegas.len(), 1, 4);
        for w in &self.omegas {
            issues.within("omegas", *w, 0.0, 1e3);
        }
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let modes = dirac_mode_hamiltonian(&self.omegas)?;
        let labels: Vec<Vec<f64>> = self.omegas.iter().map(|w| vec![-2.0 * w, 0.0, 0.0, 2.0 * w]).collect();
        let expected = tensor_sum(&labels);
        let mut spectrum = Table::new("spectrum", &[("index", "1"), ("eigenvalue", "E"), ("tensor_sum", "E")]);
        let mut worst = 0.0f64;
        for (k, (a, b)) in modes.spectrum.iter().zip(&expected).enumerate() {
            worst = worst.max((a - b).abs());
            spectrum.push(vec![k.into(), (*a).into(), (*b).into()]);
        }
        let mut eom = Table::new(
            "eom",
            &[("label", "1"), ("omega", "E"), ("frequency", "E"), ("residual", "E^2")],
        );
        let mut worst_eom = 0.0f64;
        for (l, (m, &w)) in modes.modes.iter().zip(&self.omegas).enumerate() {
            let d = GOperator::left_mul(modes.alg, m.d)?;
            let r = oscillation_residual(&modes.hamiltonian, &d, 2.0 * w);
            worst_eom = worst_eom.max(r / (2.0 * w).powi(2).max(1.0));
            eom.push(vec![l.into(), w.into(), (2.0 * w).into(), r.into()]);
        }
        Ok(Outcome {
            tables: vec![spectrum, eom],
            checks: vec![
                Check::holds("spectrum_size", modes.spectrum.len() == expected.len()),
                Check::below("tensor_sum_error", worst, 1e-12),
                Check::below("eom_relative_residual", worst_eom, 1e-12),
            ],
        })
    }
}
