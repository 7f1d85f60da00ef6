//! Mode-space quantization of free linear bosonic fields.
//!
//! Each mode is an oscillator with ladder operators normalized so that
//! `[A, A†] = 2ω`; the conventional `a = A/√(2ω)` is available through
//! [`ModeOperators::conventional`]. The per-mode Hamiltonian is
//! `¼(A†A + AA†)`, whose spectrum is `(n + ½)ω`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{Grid1D, HermitianOp, Spectrum};
use crate::pathint::{propagator, LagrangianSpec, PotentialShape, PropagatorMatrix, Slicing};

pub const MAX_FIELD_MODES: usize = 3;
pub const MAX_FIELD_CUTOFF: usize = 6;
const COMPLETE_BASIS_TOL: f64 = 1e-12;

type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeKind {
    KleinGordon { mass: f64 },
    Maxwell,
    Proca { mass: f64 },
}

impl ModeKind {
    pub fn mass(&self) -> f64 {
        match *self {
            Self::KleinGordon { mass } | Self::Proca { mass } => mass,
            Self::Maxwell => 0.0,
        }
    }

    pub fn polarization_count(&self) -> usize {
        match self {
            Self::KleinGordon { .. } => 1,
            Self::Maxwell => 2,
            Self::Proca { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::KleinGordon { .. } => "klein-gordon",
            Self::Maxwell => "maxwell",
            Self::Proca { .. } => "proca",
        }
    }
}

pub type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn unit(a: &Vec3) -> Vec3 {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Orthonormal pair spanning the plane orthogonal to `k`. The seed axis is
/// the one least aligned with `k`.
pub fn transverse_basis(k: &Vec3) -> [Vec3; 2] {
    let khat = unit(k);
    let axis = (0..3)
        .min_by(|&i, &j| khat[i].abs().total_cmp(&khat[j].abs()))
        .unwrap_or(0);
    let mut seed = [0.0; 3];
    seed[axis] = 1.0;
    let proj = dot(&seed, &khat);
    let e1 = unit(&[
        seed[0] - proj * khat[0],
        seed[1] - proj * khat[1],
        seed[2] - proj * khat[2],
    ]);
    let e2 = cross(&khat, &e1);
    [e1, e2]
}

/// Dispersion and polarization data for a list of wave vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub kind: ModeKind,
    pub k_list: Vec<Vec3>,
    pub omega: Vec<f64>,
    /// Polarization vectors per wave vector; empty for the scalar field.
    pub polarizations: Vec<Vec<Vec3>>,
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.k_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_list.is_empty()
    }

    pub fn polarization_count(&self) -> usize {
        self.kind.polarization_count()
    }

    /// Number of independent oscillators, one per (k, polarization).
    pub fn oscillator_count(&self) -> usize {
        self.len() * self.polarization_count()
    }

    /// `max |e·k|` over the transverse polarizations; zero for the scalar field.
    pub fn transversality_defect(&self) -> f64 {
        let transverse = match self.kind {
            ModeKind::KleinGordon { .. } => 0,
            _ => 2,
        };
        self.k_list
            .iter()
            .zip(&self.polarizations)
            .flat_map(|(k, es)| es.iter().take(transverse).map(move |e| dot(e, k).abs()))
            .fold(0.0, f64::max)
    }

    /// `max |eᵢ·eⱼ − δᵢⱼ|` over each wave vector's polarizations.
    pub fn polarization_orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for es in &self.polarizations {
            for (i, a) in es.iter().enumerate() {
                for (j, b) in es.iter().enumerate() {
                    let t = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((dot(a, b) - t).abs());
                }
            }
        }
        worst
    }
}

pub fn build_modes(kind: ModeKind, k_list: &[Vec3]) -> Result<ModeSet> {
    if k_list.is_empty() {
        return Err(Error::InvalidParameter("mode list is empty".into()));
    }
    let mass = kind.mass();
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mass must be non-negative, got {mass}"
        )));
    }
    let mut omega = Vec::with_capacity(k_list.len());
    let mut polarizations = Vec::with_capacity(k_list.len());
    for k in k_list {
        if k.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite wave vector {k:?}")));
        }
        let k2 = dot(k, k);
        let w = (k2 + mass * mass).sqrt();
        if !(w > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "infrared mode excluded: k = {k:?} has zero frequency"
            )));
        }
        if matches!(kind, ModeKind::Maxwell) && k2 == 0.0 {
            return Err(Error::InvalidParameter("infrared mode excluded: k = 0".into()));
        }
        omega.push(w);
        polarizations.push(match kind {
            ModeKind::KleinGordon { .. } => Vec::new(),
            ModeKind::Maxwell => transverse_basis(k).to_vec(),
            ModeKind::Proca { .. } if k2 == 0.0 => {
                vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
            }
            ModeKind::Proca { .. } => {
                let [e1, e2] = transverse_basis(k);
                vec![e1, e2, unit(k)]
            }
        });
    }
    Ok(ModeSet {
        kind,
        k_list: k_list.to_vec(),
        omega,
        polarizations,
    })
}

/// Number-basis truncation `|0⟩ … |N−1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTrunc {
    pub cutoff: usize,
}

impl FockTrunc {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fock cutoff must be at least 2, got {cutoff}"
            )));
        }
        Ok(Self { cutoff })
    }
}

/// Ladder pair with `[A, A†] = 2ω` below the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperators {
    pub a: CMat,
    pub a_dag: CMat,
    pub omega: f64,
}

pub fn ladder(omega: f64, cutoff: usize) -> Result<ModeOperators> {
    FockTrunc::new(cutoff)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let scale = (2.0 * omega).sqrt();
    let mut a = CMat::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = c(scale * (n as f64).sqrt());
    }
    let a_dag = a.adjoint();
    Ok(ModeOperators { a, a_dag, omega })
}

impl ModeOperators {
    pub fn cutoff(&self) -> usize {
        self.a.nrows()
    }

    pub fn commutator(&self) -> CMat {
        &self.a * &self.a_dag - &self.a_dag * &self.a
    }

    /// `max |[A, A†]ₙₘ − 2ω δₙₘ|` over `n, m ≤ N−2`.
    pub fn commutator_defect(&self) -> f64 {
        let comm = self.commutator();
        let keep = self.cutoff() - 1;
        let mut worst = 0.0f64;
        for i in 0..keep {
            for j in 0..keep {
                let t = if i == j { 2.0 * self.omega } else { 0.0 };
                worst = worst.max((comm[(i, j)] - t).norm());
            }
        }
        worst
    }

    /// `¼(A†A + AA†)`.
    pub fn hamiltonian(&self) -> HermitianOp {
        let h = (&self.a_dag * &self.a + &self.a * &self.a_dag) * c(0.25);
        HermitianOp::new(h).expect("ladder Hamiltonian is Hermitian by construction")
    }

    /// Coordinate `(A + A†)/2ω`.
    pub fn coordinate(&self) -> CMat {
        (&self.a + &self.a_dag) * c(1.0 / (2.0 * self.omega))
    }

    /// `(a, a†)` with `[a, a†] = 1`.
    pub fn conventional(&self) -> (CMat, CMat) {
        let s = c(1.0 / (2.0 * self.omega).sqrt());
        (&self.a * s, &self.a_dag * s)
    }
}

/// Discrete-variable representation of `½(−∂² + ω²b²)` on the `N`
/// Gauss–Hermite nodes for frequency `ω`.
#[derive(Debug, Clone)]
pub struct SingleModeHamiltonian {
    pub nodes: Vec<f64>,
    pub op: HermitianOp,
    pub spectrum: Spectrum,
}

pub fn single_mode_hamiltonian(omega: f64, cutoff: usize) -> Result<SingleModeHamiltonian> {
    FockTrunc::new(cutoff)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let n = cutoff;
    let mut x = DMatrix::<f64>::zeros(n, n);
    for j in 1..n {
        let v = (j as f64 / (2.0 * omega)).sqrt();
        x[(j - 1, j)] = v;
        x[(j, j - 1)] = v;
    }
    let eig = nalgebra::SymmetricEigen::new(x);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let nodes: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let t = DMatrix::<f64>::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);

    let mut kinetic = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        kinetic[(j, j)] = 0.25 * omega * (2 * j + 1) as f64;
        if j + 2 < n {
            let v = -0.25 * omega * (((j + 1) * (j + 2)) as f64).sqrt();
            kinetic[(j, j + 2)] = v;
            kinetic[(j + 2, j)] = v;
        }
    }
    let mut h = t.transpose() * kinetic * &t;
    for (i, xi) in nodes.iter().enumerate() {
        h[(i, i)] += 0.5 * omega * omega * xi * xi;
    }
    let op = HermitianOp::from_real(h)?;
    let spectrum = op.spectrum();
    Ok(SingleModeHamiltonian { nodes, op, spectrum })
}

/// Normalized oscillator eigenfunctions `ψ₀ … ψ_{count−1}` at `x` for unit
/// mass and `ħ = 1`.
pub fn hermite_functions(omega: f64, count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let s = omega.sqrt() * x;
    let p0 = (omega / std::f64::consts::PI).powf(0.25) * (-0.5 * s * s).exp();
    out.push(p0);
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * s * p0);
    }
    for n in 2..count {
        let nf = n as f64;
        let next = (2.0 / nf).sqrt() * s * out[n - 1] - ((nf - 1.0) / nf).sqrt() * out[n - 2];
        out.push(next);
    }
    out
}

/// Weak completeness check: apply `Σ_{n<N} ψₙ(a)ψₙ(a′) da` to `f` on
/// `grid` and return the largest pointwise deviation from `f`.
pub fn completeness_defect(omega: f64, n_terms: usize, grid: &Grid1D, f: impl Fn(f64) -> f64) -> f64 {
    let xs = grid.points();
    let table: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(omega, n_terms, x)).collect();
    let fx: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let coeffs: Vec<f64> = (0..n_terms)
        .map(|n| table.iter().zip(&fx).map(|(row, v)| row[n] * v).sum::<f64>() * grid.dx)
        .collect();
    table
        .iter()
        .zip(&fx)
        .map(|(row, v)| (row.iter().zip(&coeffs).map(|(p, c)| p * c).sum::<f64>() - v).abs())
        .fold(0.0, f64::max)
}

/// Residuals of `ä + ω²a = 0` for the Heisenberg-evolved coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergReport {
    /// Over matrix elements with both indices `≤ N−2`.
    pub sub_cutoff: f64,
    pub full: f64,
}

/// Evolve `a(t) = e^{iHt} a e^{−iHt}` with `H = ¼(A†A + AA†)` and measure
/// the second-difference residual at each time in `times`.
pub fn heisenberg_check(mo: &ModeOperators, times: &[f64], dt: f64) -> Result<HeisenbergReport> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let evolver = HeisenbergEvolver::new(&mo.hamiltonian());
    let a0 = mo.coordinate();
    let keep = mo.cutoff() - 1;
    let w2 = mo.omega * mo.omega;
    let mut report = HeisenbergReport {
        sub_cutoff: 0.0,
        full: 0.0,
    };
    for &t in times {
        let prev = evolver.evolve(&a0, t - dt);
        let here = evolver.evolve(&a0, t);
        let next = evolver.evolve(&a0, t + dt);
        let r = (next - &here * c(2.0) + prev) * c(1.0 / (dt * dt)) + here * c(w2);
        for i in 0..r.nrows() {
            for j in 0..r.ncols() {
                let v = r[(i, j)].norm();
                report.full = report.full.max(v);
                if i < keep && j < keep {
                    report.sub_cutoff = report.sub_cutoff.max(v);
                }
            }
        }
    }
    Ok(report)
}

/// `O(t) = e^{iHt} O e^{−iHt}` through the eigen-decomposition of `H`.
#[derive(Debug, Clone)]
pub struct HeisenbergEvolver {
    spectrum: Spectrum,
}

impl HeisenbergEvolver {
    pub fn new(h: &HermitianOp) -> Self {
        Self { spectrum: h.spectrum() }
    }

    pub fn evolve(&self, op: &CMat, t: f64) -> CMat {
        let v = &self.spectrum.eigenvectors;
        let e = &self.spectrum.eigenvalues;
        let mut inner = v.adjoint() * op * v;
        for i in 0..e.len() {
            for j in 0..e.len() {
                inner[(i, j)] *= Complex64::from_polar(1.0, (e[i] - e[j]) * t);
            }
        }
        v * inner * v.adjoint()
    }
}

/// Field operators on a finite set of lattice sites, acting on the tensor
/// product of the truncated mode spaces.
#[derive(Debug, Clone)]
pub struct LatticeFieldOps {
    pub modes: ModeSet,
    pub positions: Vec<Vec3>,
    pub volume: f64,
    pub trunc: FockTrunc,
    /// `phi[site][component]`; one component for the scalar field, three otherwise.
    pub phi: Vec<Vec<CMat>>,
    pub pi: Vec<Vec<CMat>>,
    pub hamiltonian: HermitianOp,
    /// Occupation numbers of each oscillator, per basis state.
    pub occupations: Vec<Vec<usize>>,
}

fn kron_embed(op: &CMat, slot: usize, count: usize, cutoff: usize) -> CMat {
    let mut out = CMat::identity(1, 1);
    for s in 0..count {
        let factor = if s == slot {
            op.clone()
        } else {
            CMat::identity(cutoff, cutoff)
        };
        out = out.kronecker(&factor);
    }
    out
}

/// `φ(x) = Σ (1/2ω√V) e (A e^{−ik·x} + A† e^{ik·x})` and `π = i[H, φ]` with
/// `H = Σ ¼(A†A + AA†)`.
pub fn assemble_field(modes: &ModeSet, positions: &[Vec3], volume: f64, trunc: FockTrunc) -> Result<LatticeFieldOps> {
    let count = modes.oscillator_count();
    if count > MAX_FIELD_MODES || trunc.cutoff > MAX_FIELD_CUTOFF {
        return Err(Error::TooLarge(format!(
            "field assembly limited to {MAX_FIELD_MODES} oscillators with cutoff ≤ {MAX_FIELD_CUTOFF}; got {count} with cutoff {}",
            trunc.cutoff
        )));
    }
    if positions.is_empty() {
        return Err(Error::InvalidParameter("no lattice positions".into()));
    }
    if !(volume > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "volume must be positive, got {volume}"
        )));
    }
    let n = trunc.cutoff;
    let dim = n.pow(count as u32);
    let components = if modes.polarization_count() == 1 { 1 } else { 3 };

    let mut oscillators = Vec::with_capacity(count);
    for (idx, (k, w)) in modes.k_list.iter().zip(&modes.omega).enumerate() {
        let pols: Vec<Vec3> = if components == 1 {
            vec![[1.0, 0.0, 0.0]]
        } else {
            modes.polarizations[idx].clone()
        };
        for e in pols {
            oscillators.push((*k, *w, e));
        }
    }

    let mut a_ops = Vec::with_capacity(count);
    let mut h = CMat::zeros(dim, dim);
    for (slot, (_, w, _)) in oscillators.iter().enumerate() {
        let mo = ladder(*w, n)?;
        let a = kron_embed(&mo.a, slot, count, n);
        h += kron_embed(mo.hamiltonian().matrix(), slot, count, n);
        a_ops.push(a);
    }
    let hamiltonian = HermitianOp::new(h)?;

    let norm = 1.0 / volume.sqrt();
    let mut phi = Vec::with_capacity(positions.len());
    let mut pi = Vec::with_capacity(positions.len());
    for x in positions {
        let mut site_phi = vec![CMat::zeros(dim, dim); components];
        for ((k, w, e), a) in oscillators.iter().zip(&a_ops) {
            let phase = Complex64::from_polar(1.0, -dot(k, x));
            let term = a * phase;
            let term = &term + term.adjoint();
            let s = norm / (2.0 * w);
            for (comp, out) in site_phi.iter_mut().enumerate() {
                *out += &term * c(s * e[comp]);
            }
        }
        let site_pi: Vec<CMat> = site_phi
            .iter()
            .map(|p| (hamiltonian.matrix() * p - p * hamiltonian.matrix()) * Complex64::new(0.0, 1.0))
            .collect();
        phi.push(site_phi);
        pi.push(site_pi);
    }

    let occupations = (0..dim)
        .map(|mut s| {
            let mut occ = vec![0; count];
            for slot in (0..count).rev() {
                occ[slot] = s % n;
                s /= n;
            }
            occ
        })
        .collect();

    Ok(LatticeFieldOps {
        modes: modes.clone(),
        positions: positions.to_vec(),
        volume,
        trunc,
        phi,
        pi,
        hamiltonian,
        occupations,
    })
}

impl LatticeFieldOps {
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume / self.positions.len() as f64
    }

    /// Basis states in which every oscillator sits at least two levels
    /// below the cutoff, so that `π = i[H, φ]` only reaches exact levels.
    pub fn interior_states(&self) -> Vec<usize> {
        let top = self.trunc.cutoff.saturating_sub(2);
        self.occupations
            .iter()
            .enumerate()
            .filter(|(_, occ)| occ.iter().all(|&o| o < top))
            .map(|(i, _)| i)
            .collect()
    }

    /// `⟨0|φ_c(x)²|0⟩` summed over components.
    pub fn vacuum_phi_sq(&self, site: usize) -> f64 {
        self.phi[site]
            .iter()
            .map(|p| {
                let col = p.column(0);
                col.iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum()
    }

    /// `Σ_k n_pol/(2ω_k V)`.
    pub fn vacuum_phi_sq_oracle(&self) -> f64 {
        let pols = self.modes.polarization_count() as f64;
        self.modes.omega.iter().map(|w| pols / (2.0 * w * self.volume)).sum()
    }

    /// Polarization projector kernel `(1/V) Σ_k Σ_λ e_λ,i e_λ,j cos(k·r)`.
    fn mode_kernel(&self, r: &Vec3, i: usize, j: usize) -> f64 {
        let mut total = 0.0;
        for (idx, k) in self.modes.k_list.iter().enumerate() {
            let proj = if self.modes.polarization_count() == 1 {
                1.0
            } else {
                self.modes.polarizations[idx].iter().map(|e| e[i] * e[j]).sum()
            };
            total += proj * dot(k, r).cos();
        }
        total / self.volume
    }

    /// Lattice delta, projected onto transverse directions for the Maxwell field.
    fn lattice_delta(&self, a: usize, b: usize, i: usize, j: usize) -> f64 {
        if a != b {
            return 0.0;
        }
        let base = if i == j { 1.0 } else { 0.0 };
        match self.modes.kind {
            ModeKind::Maxwell => {
                let mut sum = 0.0;
                let mut count = 0usize;
                for k in &self.modes.k_list {
                    let kk = dot(k, k);
                    sum += base - k[i] * k[j] / kk;
                    count += 1;
                }
                sum / count as f64 / self.cell_volume()
            }
            _ => base / self.cell_volume(),
        }
    }
}

/// Equal-time commutator deviations on the interior block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcrReport {
    /// `max |[φᵢ(x), πⱼ(y)] − i δ_xy δᵢⱼ/Δx|` (transverse delta for Maxwell).
    pub phi_pi: f64,
    /// `max |[φᵢ(x), πⱼ(y)] − i K_modes|` against the mode-sum kernel.
    pub phi_pi_mode_sum: f64,
    pub phi_phi: f64,
    pub pi_pi: f64,
    /// True when the mode sum reproduces the lattice delta; otherwise the
    /// delta is not expected and only `phi_pi_mode_sum` is meaningful.
    pub complete_basis: bool,
}

pub fn equal_time_ccr(f: &LatticeFieldOps) -> CcrReport {
    let keep = f.interior_states();
    let sites = f.positions.len();
    let comps = f.phi[0].len();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut report = CcrReport {
        phi_pi: 0.0,
        phi_pi_mode_sum: 0.0,
        phi_phi: 0.0,
        pi_pi: 0.0,
        complete_basis: true,
    };
    let block_dev = |m: &CMat, target: Complex64| -> f64 {
        let mut worst = 0.0f64;
        for (ii, &r) in keep.iter().enumerate() {
            for (jj, &s) in keep.iter().enumerate() {
                let t = if ii == jj { target } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((m[(r, s)] - t).norm());
            }
        }
        worst
    };
    let comm = |a: &CMat, b: &CMat| a * b - b * a;
    for a in 0..sites {
        for b in 0..sites {
            let r = [
                f.positions[a][0] - f.positions[b][0],
                f.positions[a][1] - f.positions[b][1],
                f.positions[a][2] - f.positions[b][2],
            ];
            for i in 0..comps {
                for j in 0..comps {
                    let kern = f.mode_kernel(&r, i, j);
                    let delta = f.lattice_delta(a, b, i, j);
                    if (kern - delta).abs() > COMPLETE_BASIS_TOL * delta.abs().max(1.0 / f.cell_volume()) {
                        report.complete_basis = false;
                    }
                    let pp = comm(&f.phi[a][i], &f.pi[b][j]);
                    report.phi_pi = report.phi_pi.max(block_dev(&pp, i_unit * delta));
                    report.phi_pi_mode_sum = report.phi_pi_mode_sum.max(block_dev(&pp, i_unit * kern));
                    let zero = Complex64::new(0.0, 0.0);
                    report.phi_phi = report.phi_phi.max(block_dev(&comm(&f.phi[a][i], &f.phi[b][j]), zero));
                    report.pi_pi = report.pi_pi.max(block_dev(&comm(&f.pi[a][i], &f.pi[b][j]), zero));
                }
            }
        }
    }
    report
}

/// Sliced propagator of the single-mode Lagrangian `½(ȧ² − ω²a²)`.
pub fn mode_propagator(omega: f64, slicing: &Slicing, grid: &Grid1D) -> Result<PropagatorMatrix> {
    let shape = if omega == 0.0 {
        PotentialShape::Free
    } else {
        PotentialShape::Harmonic { omega }
    };
    propagator(&LagrangianSpec::new(1.0, 1.0, shape)?, slicing, grid)
}

/// Wave vectors `2πm/L` along x for `m` in `ms`.
pub fn lattice_modes_1d(length: f64, ms: &[i64]) -> Vec<Vec3> {
    ms.iter()
        .map(|&m| [2.0 * std::f64::consts::PI * m as f64 / length, 0.0, 0.0])
        .collect()
}

/// Sites `j·L/n` along x.
pub fn lattice_sites_1d(length: f64, n: usize) -> Vec<Vec3> {
    (0..n).map(|j| [j as f64 * length / n as f64, 0.0, 0.0]).collect()
}
