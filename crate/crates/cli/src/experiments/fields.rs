use dimech_core::fields::{
    assemble_field, build_modes, equal_time_ccr, heisenberg_check, ladder, lattice_modes_1d, lattice_sites_1d,
    single_mode_hamiltonian, FockTrunc, ModeKind, ModeSet, Vec3, MAX_FIELD_CUTOFF, MAX_FIELD_MODES,
};
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::config::Issues;
use crate::report::Check;
use crate::table::Table;

/// Settings shared by the three mode experiments.
#[derive(Debug, Clone, PartialEq)]
struct ModeSettings {
    k: Vec<Vec3>,
    cutoff: usize,
    levels: usize,
    heisenberg_cutoff: usize,
    heisenberg_dt: f64,
    heisenberg_times: Vec<f64>,
}

impl ModeSettings {
    fn check(&self, issues: &mut Issues, massless: bool) {
        issues.non_empty("k", &self.k);
        for k in &self.k {
            if k.iter().any(|c| !c.is_finite()) {
                issues.fail("k", "wave vector components must be finite");
            } else if massless && k.iter().all(|&c| c == 0.0) {
                issues.fail("k", "k = 0 has no massless mode");
            }
        }
        issues.within("cutoff", self.cutoff, 2, 64);
        issues.within("levels", self.levels, 1, self.cutoff / 2);
        issues.within("heisenberg_cutoff", self.heisenberg_cutoff, 3, 64);
        issues.positive("heisenberg_dt", self.heisenberg_dt);
        issues.non_empty("heisenberg_times", &self.heisenberg_times);
        for t in &self.heisenberg_times {
            issues.finite("heisenberg_times", *t);
        }
    }

    fn run(&self, kind: ModeKind) -> dimech_core::Result<(ModeSet, Outcome)> {
        let modes = build_modes(kind, &self.k)?;
        let mut spectrum = Table::new(
            "spectrum",
            &[
                ("mode", "1"),
                ("kx", "1/L"),
                ("ky", "1/L"),
                ("kz", "1/L"),
                ("omega", "E"),
                ("level", "1"),
                ("energy", "E"),
                ("energy_exact", "E"),
            ],
        );
        let mut algebra = Table::new(
            "algebra",
            &[
                ("mode", "1"),
                ("omega", "E"),
                ("commutator_defect", "E"),
                ("heisenberg_sub_cutoff", "1"),
                ("heisenberg_full", "1"),
            ],
        );
        let (mut comm, mut level_err, mut heis) = (0.0f64, 0.0f64, 0.0f64);
        for (i, (k, &w)) in modes.k_list.iter().zip(&modes.omega).enumerate() {
            let mo = ladder(w, self.cutoff)?;
            let h = single_mode_hamiltonian(w, self.cutoff)?;
            for n in 0..self.levels {
                let e = h.spectrum.eigenvalues[n];
                let exact = (n as f64 + 0.5) * w;
                level_err = level_err.max((e - exact).abs());
                spectrum.push(vec![
                    i.into(),
                    k[0].into(),
                    k[1].into(),
                    k[2].into(),
                    w.into(),
                    n.into(),
                    e.into(),
                    exact.into(),
                ]);
            }
            let hm = heisenberg_check(
                &ladder(w, self.heisenberg_cutoff)?,
                &self.heisenberg_times,
                self.heisenberg_dt,
            )?;
            comm = comm.max(mo.commutator_defect());
            heis = heis.max(hm.sub_cutoff);
            algebra.push(vec![
                i.into(),
                w.into(),
                mo.commutator_defect().into(),
                hm.sub_cutoff.into(),
                hm.full.into(),
            ]);
        }
        let out = Outcome {
            tables: vec![spectrum, algebra],
            checks: vec![
                Check::below("ladder_commutator_defect", comm, 1e-12),
                Check::below("single_mode_level_error", level_err, 1e-6),
                Check::below("heisenberg_sub_cutoff", heis, 1e-6),
            ],
        };
        Ok((modes, out))
    }
}

fn polarization_table(modes: &ModeSet) -> Table {
    let mut t = Table::new(
        "polarizations",
        &[
            ("mode", "1"),
            ("polarization", "1"),
            ("ex", "1"),
            ("ey", "1"),
            ("ez", "1"),
            ("k_dot_e", "1/L"),
        ],
    );
    for (i, (k, es)) in modes.k_list.iter().zip(&modes.polarizations).enumerate() {
        for (p, e) in es.iter().enumerate() {
            let kd = k[0] * e[0] + k[1] * e[1] + k[2] * e[2];
            t.push(vec![
                i.into(),
                p.into(),
                e[0].into(),
                e[1].into(),
                e[2].into(),
                kd.into(),
            ]);
        }
    }
    t
}

fn default_k() -> Vec<Vec3> {
    vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]
}

/// Klein-Gordon or Proca modes. `cutoff` is the Fock truncation for the
/// ladder algebra and the single-mode spectrum; `levels` are compared
/// against `(n + 1/2)ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MassiveModes {
    pub mass: f64,
    pub k: Vec<Vec3>,
    pub cutoff: usize,
    pub levels: usize,
    pub heisenberg_cutoff: usize,
    pub heisenberg_dt: f64,
    pub heisenberg_times: Vec<f64>,
}

impl Default for MassiveModes {
    fn default() -> Self {
        Self {
            mass: 1.0,
            k: default_k(),
            cutoff: 20,
            levels: 6,
            heisenberg_cutoff: 12,
            heisenberg_dt: 2e-4,
            heisenberg_times: vec![0.0, 0.3, 1.1, 2.5],
        }
    }
}

pub type KgModes = MassiveModes;
pub type ProcaModes = MassiveModes;

impl MassiveModes {
    fn settings(&self) -> ModeSettings {
        ModeSettings {
            k: self.k.clone(),
            cutoff: self.cutoff,
            levels: self.levels,
            heisenberg_cutoff: self.heisenberg_cutoff,
            heisenberg_dt: self.heisenberg_dt,
            heisenberg_times: self.heisenberg_times.clone(),
        }
    }

    pub fn check(&self, issues: &mut Issues) {
        issues.positive("mass", self.mass);
        self.settings().check(issues, false);
    }

    pub fn run_klein_gordon(&self) -> dimech_core::Result<Outcome> {
        Ok(self.settings().run(ModeKind::KleinGordon { mass: self.mass })?.1)
    }

    pub fn run_proca(&self) -> dimech_core::Result<Outcome> {
        let (modes, mut out) = self.settings().run(ModeKind::Proca { mass: self.mass })?;
        out.tables.push(polarization_table(&modes));
        out.checks.push(Check::holds(
            "three_polarizations",
            modes.polarizations.iter().all(|p| p.len() == 3),
        ));
        out.checks.push(Check::below(
            "polarization_orthonormality_defect",
            modes.polarization_orthonormality_defect(),
            1e-14,
        ));
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxwellModes {
    pub k: Vec<Vec3>,
    pub cutoff: usize,
    pub levels: usize,
    pub heisenberg_cutoff: usize,
    pub heisenberg_dt: f64,
    pub heisenberg_times: Vec<f64>,
}

impl Default for MaxwellModes {
    fn default() -> Self {
        let m = MassiveModes::default();
        Self {
            k: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [1.0, 2.0, -1.0]],
            cutoff: m.cutoff,
            levels: m.levels,
            heisenberg_cutoff: m.heisenberg_cutoff,
            heisenberg_dt: m.heisenberg_dt,
            heisenberg_times: m.heisenberg_times,
        }
    }
}

impl MaxwellModes {
    fn settings(&self) -> ModeSettings {
        ModeSettings {
            k: self.k.clone(),
            cutoff: self.cutoff,
            levels: self.levels,
            heisenberg_cutoff: self.heisenberg_cutoff,
            heisenberg_dt: self.heisenberg_dt,
            heisenberg_times: self.heisenberg_times.clone(),
        }
    }

    pub fn check(&self, issues: &mut Issues) {
        self.settings().check(issues, true);
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let (modes, mut out) = self.settings().run(ModeKind::Maxwell)?;
        out.tables.push(polarization_table(&modes));
        out.checks.push(Check::below(
            "transversality_defect",
            modes.transversality_defect(),
            1e-14,
        ));
        out.checks.push(Check::below(
            "polarization_orthonormality_defect",
            modes.polarization_orthonormality_defect(),
            1e-14,
        ));
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    KleinGordon,
    Maxwell,
    Proca,
}

/// Equal-time commutators of `φ` and `π` on a periodic 1D lattice whose
/// modes are `k = 2πm/L` for the listed `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldCcr {
    pub kind: FieldKind,
    pub mass: f64,
    pub sites: usize,
    pub length: f64,
    pub mode_indices: Vec<i64>,
    pub cutoff: usize,
}

impl Default for FieldCcr {
    fn default() -> Self {
        Self {
            kind: FieldKind::KleinGordon,
            mass: 1.0,
            sites: 3,
            length: 3.0,
            mode_indices: vec![-1, 0, 1],
            cutoff: 5,
        }
    }
}

impl FieldCcr {
    fn mode_kind(&self) -> ModeKind {
        match self.kind {
            FieldKind::KleinGordon => ModeKind::KleinGordon { mass: self.mass },
            FieldKind::Maxwell => ModeKind::Maxwell,
            FieldKind::Proca => ModeKind::Proca { mass: self.mass },
        }
    }

    pub fn check(&self, issues: &mut Issues) {
        if self.kind == FieldKind::Maxwell {
            if self.mode_indices.contains(&0) {
                issues.fail("mode_indices", "m = 0 has no massless mode");
            }
        } else {
            issues.positive("mass", self.mass);
        }
        issues.within("sites", self.sites, 1, 16);
        issues.positive("length", self.length);
        issues.non_empty("mode_indices", &self.mode_indices);
        issues.within("cutoff", self.cutoff, 3, MAX_FIELD_CUTOFF);
        let oscillators = self.mode_indices.len() * self.mode_kind().polarization_count();
        if oscillators > MAX_FIELD_MODES {
            issues.fail(
                "mode_indices",
                format!("{oscillators} oscillators exceed the limit of {MAX_FIELD_MODES}"),
            );
        }
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        let modes = build_modes(self.mode_kind(), &lattice_modes_1d(self.length, &self.mode_indices))?;
        let f = assemble_field(
            &modes,
            &lattice_sites_1d(self.length, self.sites),
            self.length,
            FockTrunc::new(self.cutoff)?,
        )?;
        let r = equal_time_ccr(&f);
        let vacuum = (0..self.sites)
            .map(|s| (f.vacuum_phi_sq(s) - f.vacuum_phi_sq_oracle()).abs())
            .fold(0.0, f64::max);
        let mut t = Table::new("commutators", &[("quantity", "-"), ("deviation", "1/L")]);
        t.push(vec!["phi_pi_lattice_delta".into(), r.phi_pi.into()]);
        t.push(vec!["phi_pi_mode_sum".into(), r.phi_pi_mode_sum.into()]);
        t.push(vec!["phi_phi".into(), r.phi_phi.into()]);
        t.push(vec!["pi_pi".into(), r.pi_pi.into()]);
        t.push(vec!["vacuum_phi_sq".into(), vacuum.into()]);
        t.push(vec!["complete_basis".into(), r.complete_basis.into()]);
        let mut checks = vec![
            Check::below("phi_pi_mode_sum", r.phi_pi_mode_sum, 1e-8),
            Check::below("phi_phi", r.phi_phi, 1e-8),
            Check::below("pi_pi", r.pi_pi, 1e-8),
            Check::below("vacuum_phi_sq", vacuum, 1e-10),
        ];
        if r.complete_basis {
            checks.push(Check::below("phi_pi_lattice_delta", r.phi_pi, 1e-8));
        }
        Ok(Outcome {
            tables: vec![t],
            checks,
        })
    }
}
