//! Acceptance suite: one line per criterion, then a non-zero exit if any failed.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dimech_cli::config::ExperimentName;
use dimech_core::fields::{
    assemble_field, build_modes, equal_time_ccr, heisenberg_check, ladder, lattice_modes_1d, lattice_sites_1d,
    single_mode_hamiltonian, FockTrunc, ModeKind,
};
use dimech_core::gprob::{born, chain, classical_from_pairs, normalize, Amplitude, GState, PairSpace};
use dimech_core::grassmann::{
    dirac_mode_hamiltonian, fermi_oscillator, gmul, oscillation_residual, tensor_sum, GAlgebra, GOperator, Multivector,
};
use dimech_core::kernel_evolution::{consistency, moments, to_dynamics, SplitState, TransitionKernel};
use dimech_core::operators::{
    commutator_uncertainty, momentum_op, momentum_symbol, periodic_generator, position_op, spectral_momentum_op,
    Grid1D, WaveFunction,
};
use dimech_core::pathint::{
    classical_action, free_kernel, grid_matched_time, harmonic_action, kernel_relative_error, propagator,
    LagrangianSpec, PotentialShape, Slicing,
};
use dimech_core::schrod::{ehrenfest_residuals, evolve, stationary, EvolConfig, Potential};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

mod tol {
    pub const CHAIN: f64 = 1e-14;
    pub const BORN_SUM: f64 = 1e-12;
    pub const PAIR_MEASURE: f64 = 1e-12;
    pub const MOMENTUM_RATIO: f64 = 4.0;
    pub const MOMENTUM_RATIO_REL: f64 = 0.2;
    pub const UNCERTAINTY_FLOOR: f64 = 1e-9;
    pub const GAUSSIAN_REL: f64 = 0.01;
    pub const MASS_ROUND_TRIP: f64 = 1e-10;
    pub const KERNEL_ORDER: f64 = 2.0;
    pub const NORM_DRIFT: f64 = 1e-6;
    pub const WIDTH_LAW: f64 = 0.01;
    pub const LEVEL_SPACING: f64 = 0.01;
    pub const EHRENFEST: f64 = 1e-3;
    pub const REVERSAL: f64 = 1e-8;
    pub const FREE_KERNEL: f64 = 1e-3;
    pub const LEAST_ACTION: f64 = 1e-6;
    pub const LADDER: f64 = 1e-12;
    pub const SINGLE_MODE: f64 = 1e-6;
    pub const CCR: f64 = 1e-8;
    /// Roundoff floor for quantities that vanish identically.
    pub const TRANSVERSE: f64 = 1e-14;
    pub const HEISENBERG: f64 = 1e-6;
    pub const FERMI_ANTI: f64 = 1e-14;
    pub const FERMI_SPECTRUM: f64 = 1e-12;
    pub const DIRAC_SUM: f64 = 1e-12;
    pub const FERMI_EOM: f64 = 1e-12;
}

mod limit {
    use std::time::Duration;
    pub const GPROB: Duration = Duration::from_secs(1);
    pub const OPERATORS: Duration = Duration::from_secs(5);
    pub const KERNEL: Duration = Duration::from_secs(30);
    pub const SCHROD: Duration = Duration::from_secs(30);
    pub const PATHINT: Duration = Duration::from_secs(60);
    pub const FIELDS: Duration = Duration::from_secs(60);
    pub const GRASSMANN: Duration = Duration::from_secs(5);
    pub const CLI_EACH: Duration = Duration::from_secs(60);
}

/// Outcome of one sub-check inside a criterion.
struct Part {
    name: &'static str,
    value: f64,
    ok: bool,
}

fn below(name: &'static str, value: f64, bound: f64) -> Part {
    Part {
        name,
        value,
        ok: value < bound,
    }
}

fn at_least(name: &'static str, value: f64, bound: f64) -> Part {
    Part {
        name,
        value,
        ok: value >= bound,
    }
}

fn holds(name: &'static str, ok: bool) -> Part {
    Part {
        name,
        value: if ok { 1.0 } else { 0.0 },
        ok,
    }
}

fn report(label: &str, limit: Duration, f: impl FnOnce() -> Vec<Part>) -> bool {
    let start = Instant::now();
    let parts = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < limit;
    let ok = in_time && parts.iter().all(|p| p.ok);
    println!(
        "{}  {label:<12} {:>8.2} s (limit {} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    for p in &parts {
        println!(
            "      {} {:<40} {:.4e}",
            if p.ok { "ok  " } else { "FAIL" },
            p.name,
            p.value
        );
    }
    ok
}

fn random_amp(rng: &mut ChaCha8Rng) -> Amplitude {
    Amplitude::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

fn gprob_algebra() -> Vec<Part> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut assoc, mut magn, mut born_sum) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (a, b, c) = (random_amp(&mut rng), random_amp(&mut rng), random_amp(&mut rng));
        let l = chain(chain(a, b), c);
        let r = chain(a, chain(b, c));
        assoc = assoc.max((l.u - r.u).abs().max((l.v - r.v).abs()));
        let m = a.magnitude() * b.magnitude();
        magn = magn.max((chain(a, b).magnitude() - m).abs() / m.max(1.0));

        let k = rng.gen_range(1..12);
        let raw = GState::from_pairs((0..k).map(|i| (format!("e{i}"), random_amp(&mut rng))));
        if raw.total_weight() > 1e-6 {
            let space = born(&normalize(&raw).unwrap()).unwrap();
            born_sum = born_sum.max((space.total() - 1.0).abs());
        }
    }

    let mut measure = 0.0f64;
    for _ in 0..100 {
        let (ka, kb) = (rng.gen_range(1..7), rng.gen_range(1..7));
        let ps = PairSpace::from_fn(ka, kb, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let space = classical_from_pairs(&ps.normalized().unwrap()).unwrap();
        let events = space.events().to_vec();
        let mut sum = 0.0;
        for e in &events {
            let p = space.prob(e).unwrap();
            if p < 0.0 {
                measure = f64::INFINITY;
            }
            sum += p;
        }
        let (first, rest) = events.split_at(events.len() / 2);
        let split = space.prob_of_union(first) + space.prob_of_union(rest);
        measure = measure
            .max((sum - 1.0).abs())
            .max((split - space.prob_of_union(&events)).abs());
    }

    vec![
        below("chain associativity", assoc, tol::CHAIN),
        below("magnitude multiplicativity", magn, tol::CHAIN),
        below("born total minus one", born_sum, tol::BORN_SUM),
        below("pair-space additivity", measure, tol::PAIR_MEASURE),
    ]
}

/// Gaussian envelope times a random complex quartic.
fn random_state(grid: Grid1D, rng: &mut ChaCha8Rng) -> WaveFunction {
    let x0 = rng.gen_range(-4.0..4.0);
    let s = rng.gen_range(0.8..2.0);
    let k0 = rng.gen_range(-1.0..1.0);
    let coeffs: Vec<Complex64> = (0..5)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    WaveFunction::from_fn(grid, |x| {
        let u = (x - x0) / s;
        let poly = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + c);
        poly * Complex64::from_polar((-0.5 * u * u).exp(), k0 * x)
    })
    .normalized()
    .unwrap()
}

fn operator_suite() -> Vec<Part> {
    let err = |n: usize| {
        let g = Grid1D::periodic(0.0, 2.0 * PI, n).unwrap();
        let k = g.wavenumber(3);
        (momentum_symbol(k, g.dx, 1.0) - k).abs()
    };
    let ratio = err(64) / err(128);

    let hbar = 1.0;
    let g = Grid1D::periodic(-30.0, 30.0, 512).unwrap();
    let x = position_op(&g);
    let p = spectral_momentum_op(&g, hbar).unwrap();
    let p_fd = momentum_op(&g, hbar).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut floor, mut robertson) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..500 {
        let psi = random_state(g, &mut rng);
        floor = floor.min(commutator_uncertainty(&x, &p, &psi).unwrap().product() - 0.5 * hbar);
        let u = commutator_uncertainty(&x, &p_fd, &psi).unwrap();
        robertson = robertson.min(u.product() - u.bound);
    }

    let mut gauss = 0.0f64;
    for sigma in [0.5, 1.0, 2.0, 3.0] {
        let psi = WaveFunction::gaussian(g, 0.0, sigma, 0.0);
        for op in [&p, &p_fd] {
            let u = commutator_uncertainty(&x, op, &psi).unwrap();
            gauss = gauss.max((u.product() / (0.5 * hbar) - 1.0).abs());
        }
    }

    let mut ladder_err = 0.0f64;
    let mut zero_mode = 0.0f64;
    for q in [1.0, 2.0, 3.0] {
        let gen = periodic_generator(128, 2.0 * PI / q, 1.0).unwrap();
        let h = gen.grid.dx * q;
        for m in -3..=3i64 {
            let grid_err = (m.unsigned_abs() as f64).powi(3) * q * h * h / 6.0;
            let dev = (gen.mode_eigenvalue(m) - m as f64 * q).abs();
            ladder_err = ladder_err.max(dev / (grid_err * 1.01 + 1e-12));
        }
        let smallest = gen
            .spectrum
            .eigenvalues
            .iter()
            .map(|e| e.abs())
            .fold(f64::INFINITY, f64::min);
        zero_mode = zero_mode.max(smallest);
    }

    vec![
        below(
            "plane-wave ratio |r - 4| / 4",
            (ratio / tol::MOMENTUM_RATIO - 1.0).abs(),
            tol::MOMENTUM_RATIO_REL,
        ),
        at_least("min dx*dp - hbar/2 (500 states)", floor, -tol::UNCERTAINTY_FLOOR),
        at_least(
            "min margin over stencil Robertson bound",
            robertson,
            -tol::UNCERTAINTY_FLOOR,
        ),
        below("gaussian dx*dp / (hbar/2) - 1", gauss, tol::GAUSSIAN_REL),
        below("ladder deviation / grid error", ladder_err, 1.0),
        below("zero mode", zero_mode, 1e-10),
    ]
}

fn kernel_to_schrodinger() -> Vec<Part> {
    let (hbar, mass) = (1.0, 1.0);
    let g = Grid1D::periodic(-20.0, 20.0, 512).unwrap();
    let psi = SplitState::from_wave(&WaveFunction::gaussian(g, 0.0, 2.0, 0.0));
    let r = vec![0.0; g.n];

    let mut round_trip = 0.0f64;
    for m in [0.3, 1.0, 4.0] {
        for j in [1, 4, 16] {
            let k = TransitionKernel::boxed(hbar, g.dx, j, m, &r).unwrap();
            let d = to_dynamics(&moments(&k), hbar).unwrap();
            round_trip = round_trip.max((d.mass - m).abs() / m);
        }
    }

    let (mut lw, mut le) = (Vec::new(), Vec::new());
    for j in [16usize, 8, 4, 2] {
        let k = TransitionKernel::boxed(hbar, g.dx, j, mass, &r).unwrap();
        let e = consistency(&k, &psi, 1.0, 1e-3).unwrap();
        lw.push((j as f64 * g.dx).ln());
        le.push(e.ln());
    }
    let n = lw.len() as f64;
    let (mx, my) = (lw.iter().sum::<f64>() / n, le.iter().sum::<f64>() / n);
    let sxy: f64 = lw.iter().zip(&le).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lw.iter().map(|a| (a - mx).powi(2)).sum();
    let order = sxy / sxx;

    vec![
        below("mass round trip (relative)", round_trip, tol::MASS_ROUND_TRIP),
        at_least("least-squares order, 4 widths", order, tol::KERNEL_ORDER),
    ]
}

fn schrodinger_solver() -> Vec<Part> {
    let g = Grid1D::periodic(-30.0, 30.0, 512).unwrap();
    let free = Potential::zero(g);
    let base = EvolConfig {
        dt: 2e-3,
        log_every: 50,
        ..Default::default()
    };

    let moving = WaveFunction::gaussian(g, 0.0, 1.0, 1.0);
    let (_, long) = evolve(&moving, &free, &EvolConfig { steps: 10_000, ..base }).unwrap();

    let sigma0 = 1.0;
    let t_double = 2.0 * 3f64.sqrt() * sigma0 * sigma0;
    let steps = (t_double / base.dt).round() as usize;
    let (_, log) = evolve(
        &WaveFunction::gaussian(g, 0.0, sigma0, 0.0),
        &free,
        &EvolConfig { steps, ..base },
    )
    .unwrap();
    let t_end = log.records.last().unwrap().t;
    let var = *log.variances(&g).last().unwrap();
    let width = (var.sqrt() / (sigma0 * sigma0 + (t_end / (2.0 * sigma0)).powi(2)).sqrt() - 1.0).abs();

    let gs = Grid1D::periodic(-10.0, 10.0, 256).unwrap();
    let e = stationary(&Potential::harmonic(gs, 1.0, 1.0, 0.0).unwrap(), 1.0, 1.0, 6)
        .unwrap()
        .eigenvalues;
    let spacing = e.windows(2).map(|w| (w[1] - w[0] - 1.0).abs()).fold(0.0, f64::max);

    let ge = Grid1D::periodic(-10.0, 10.0, 1024).unwrap();
    let mut ehr = 0.0f64;
    for (w, f) in [(1.0, 0.0), (1.0, 0.1), (1.5, -0.2)] {
        let r = Potential::from_fn(ge, |x| 0.5 * w * w * x * x + f * x).unwrap();
        let psi0 = WaveFunction::gaussian(ge, 1.0, 0.5f64.sqrt(), 0.3);
        let dt = 5e-5;
        let cfg = EvolConfig {
            dt,
            steps: (2.0 * PI / w / dt).round() as usize,
            log_every: 200,
            ..Default::default()
        };
        let (_, log) = evolve(&psi0, &r, &cfg).unwrap();
        let worst = ehrenfest_residuals(&log, &r)
            .unwrap()
            .iter()
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        ehr = ehr.max(worst);
    }

    let fwd = EvolConfig {
        steps: 1000,
        log_every: 1000,
        ..base
    };
    let (mid, _) = evolve(&moving, &free, &fwd).unwrap();
    let (back, _) = evolve(&mid.normalized().unwrap(), &free, &EvolConfig { dt: -base.dt, ..fwd }).unwrap();
    let reversal = (back.samples() - moving.samples()).camax();

    vec![
        below("norm drift, 1e4 steps", long.norm_drift(), tol::NORM_DRIFT),
        below("width at doubling time (relative)", width, tol::WIDTH_LAW),
        below("harmonic spacing / (hbar w) - 1", spacing, tol::LEVEL_SPACING),
        below("Ehrenfest residual, one period", ehr, tol::EHRENFEST),
        below("time-reversal return", reversal, tol::REVERSAL),
    ]
}

fn path_integral() -> Vec<Part> {
    let (m, hbar) = (1.0, 1.0);
    let g = Grid1D::periodic(-20.0, 20.0, 512).unwrap();
    let t_star = grid_matched_time(m, hbar, &g);
    let free = LagrangianSpec::new(m, hbar, PotentialShape::Free).unwrap();
    let k = propagator(&free, &Slicing::new(0.0, t_star, 256).unwrap(), &g).unwrap();
    let free_err = kernel_relative_error(&k, |x, xp| free_kernel(m, hbar, t_star, x, xp), |_, _| true);

    let harm = LagrangianSpec::new(m, hbar, PotentialShape::Harmonic { omega: 1.0 }).unwrap();
    let gs = Grid1D::periodic(-10.0, 10.0, 128).unwrap();
    let mut defects = Vec::new();
    for n in [8usize, 16, 32, 64] {
        let a = propagator(&harm, &Slicing::new(0.0, 0.4, n).unwrap(), &gs).unwrap();
        let b = propagator(&harm, &Slicing::new(0.4, 1.0, n).unwrap(), &gs).unwrap();
        let c = propagator(&harm, &Slicing::new(0.0, 1.0, n).unwrap(), &gs).unwrap();
        defects.push(b.after(&a).unwrap().distance(&c).unwrap());
    }
    let decreasing = defects.windows(2).all(|w| w[1] < w[0]);

    let mut action = 0.0f64;
    for omega in [0.5f64, 1.0, 1.7] {
        for t in [0.4, 1.0, 2.2] {
            if (omega * t).sin().abs() < 0.1 {
                continue;
            }
            let spec = LagrangianSpec::new(m, hbar, PotentialShape::Harmonic { omega }).unwrap();
            let path = classical_action(&spec, 0.7, -0.4, t, 16_001).unwrap();
            let exact = harmonic_action(m, omega, 0.7, -0.4, t);
            action = action.max((path.action - exact).abs() / exact.abs());
        }
    }

    vec![
        below("free kernel relative error, 256 slices", free_err, tol::FREE_KERNEL),
        holds("semigroup defect decreasing", decreasing),
        below("harmonic action (relative)", action, tol::LEAST_ACTION),
    ]
}

fn bosonic_fields() -> Vec<Part> {
    let kinds = [
        (
            ModeKind::KleinGordon { mass: 1.0 },
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]],
        ),
        (
            ModeKind::Maxwell,
            vec![[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [1.0, 2.0, -1.0]],
        ),
        (ModeKind::Proca { mass: 0.5 }, vec![[0.0, 0.0, 0.0], [0.0, 0.0, 3.0]]),
    ];
    let (mut comm, mut heis) = (0.0f64, 0.0f64);
    let mut transverse = 0.0f64;
    for (kind, ks) in kinds {
        let modes = build_modes(kind, &ks).unwrap();
        if kind == ModeKind::Maxwell {
            transverse = modes.transversality_defect();
        }
        for &w in &modes.omega {
            comm = comm.max(ladder(w, 20).unwrap().commutator_defect() / w.max(1.0));
            let h = heisenberg_check(&ladder(w, 12).unwrap(), &[0.0, 0.3, 1.1, 2.5], 2e-4).unwrap();
            heis = heis.max(h.sub_cutoff);
        }
    }

    let mut spectrum = 0.0f64;
    for w in [0.5, 1.0, 2.5] {
        let h = single_mode_hamiltonian(w, 20).unwrap();
        for n in 0..=5 {
            spectrum = spectrum.max((h.spectrum.eigenvalues[n] - (n as f64 + 0.5) * w).abs());
        }
    }

    let modes = build_modes(ModeKind::KleinGordon { mass: 1.0 }, &lattice_modes_1d(3.0, &[-1, 0, 1])).unwrap();
    let f = assemble_field(&modes, &lattice_sites_1d(3.0, 3), 3.0, FockTrunc::new(5).unwrap()).unwrap();
    let ccr = equal_time_ccr(&f);

    vec![
        below("[A, A+] - 2w, sub-cutoff", comm, tol::LADDER),
        below("single-mode (n + 1/2)w, n <= 5", spectrum, tol::SINGLE_MODE),
        holds("lattice modes complete", ccr.complete_basis),
        below("[phi, pi] - i delta / dx", ccr.phi_pi, tol::CCR),
        below("[phi, phi] and [pi, pi]", ccr.phi_phi.max(ccr.pi_pi), tol::CCR),
        below("Maxwell k . e", transverse, tol::TRANSVERSE),
        below("Heisenberg residual, sub-cutoff", heis, tol::HEISENBERG),
    ]
}

fn grassmann_sector() -> Vec<Part> {
    let alg = GAlgebra::new(4).unwrap();
    let mut exact = true;
    for i in 0..4 {
        let gi = Multivector::generator(alg, i).unwrap();
        exact &= gmul(&gi, &gi)
            .unwrap()
            .coeffs()
            .iter()
            .all(|c| *c == Complex64::new(0.0, 0.0));
        for j in 0..4 {
            let gj = Multivector::generator(alg, j).unwrap();
            let sum = gmul(&gi, &gj).unwrap().add(&gmul(&gj, &gi).unwrap()).unwrap();
            exact &= sum.coeffs().iter().all(|c| *c == Complex64::new(0.0, 0.0));
            let di = GOperator::deriv(alg, i).unwrap();
            let lj = GOperator::left_mul(alg, j).unwrap();
            exact &= di.compose(&di).max_abs() == 0.0;
            exact &= di.anticommutator(&GOperator::deriv(alg, j).unwrap()).max_abs() == 0.0;
            exact &= di
                .anticommutator(&lj)
                .distance_to_scalar(if i == j { 1.0 } else { 0.0 })
                == 0.0;
        }
    }

    let (mut anti, mut spectrum, mut eom) = (0.0f64, 0.0f64, 0.0f64);
    for w in [0.3, 1.0, 2.0, 4.5] {
        let osc = fermi_oscillator(w).unwrap();
        anti = anti.max(osc.mode.algebra_defects().0);
        let mut ev: Vec<f64> = osc.mode.number().eigenvalues().unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let imag = osc
            .mode
            .number()
            .eigenvalues()
            .unwrap()
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max);
        let expected = [0.0, 0.0, 2.0 * w, 2.0 * w];
        let dev = ev.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(imag, f64::max);
        spectrum = spectrum.max(dev);
        eom = eom.max(osc.eom_residual().unwrap());
    }

    let omegas = [0.7, 1.3, 2.0];
    let dirac = dirac_mode_hamiltonian(&omegas).unwrap();
    let per_label: Vec<Vec<f64>> = omegas.iter().map(|w| vec![-2.0 * w, 0.0, 0.0, 2.0 * w]).collect();
    let sum = tensor_sum(&per_label);
    let mut tensor = if sum.len() == dirac.spectrum.len() {
        0.0f64
    } else {
        f64::INFINITY
    };
    for (a, b) in dirac.spectrum.iter().zip(&sum) {
        tensor = tensor.max((a - b).abs());
    }
    let mut dirac_eom = 0.0f64;
    for (mode, w) in dirac.modes.iter().zip(omegas) {
        let d = GOperator::left_mul(dirac.alg, mode.d).unwrap();
        dirac_eom = dirac_eom.max(oscillation_residual(&dirac.hamiltonian, &d, 2.0 * w) / (4.0 * w * w));
    }

    vec![
        holds("nilpotency and anticommutation exact", exact),
        below("{F+, F} - 2w", anti, tol::FERMI_ANTI),
        below("F+F spectrum vs {0, 2w}", spectrum, tol::FERMI_SPECTRUM),
        below("Dirac spectrum vs tensor sum", tensor, tol::DIRAC_SUM),
        below("operator EOM residual", eom, tol::FERMI_EOM),
        below("Dirac d oscillates at 2w (relative)", dirac_eom, tol::FERMI_EOM),
    ]
}

fn dimech(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dimech"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

const MUTATIONS: [(&str, &str); 10] = [
    (
        "unknown top-level key",
        r#"{"experiment": "uncertainty", "parameters": {}, "seed": 3}"#,
    ),
    (
        "unknown parameter",
        r#"{"experiment": "packet-spread", "parameters": {"sigma": 1.0}}"#,
    ),
    (
        "dt as string",
        r#"{"experiment": "packet-spread", "parameters": {"dt": "0.002"}}"#,
    ),
    ("missing experiment", r#"{"parameters": {}}"#),
    ("missing parameters", r#"{"experiment": "ehrenfest"}"#),
    (
        "unknown experiment",
        r#"{"experiment": "wave-collapse", "parameters": {}}"#,
    ),
    (
        "bad format",
        r#"{"experiment": "gprob-born", "parameters": {}, "format": "xml"}"#,
    ),
    (
        "negative count",
        r#"{"experiment": "stationary-states", "parameters": {"levels": -3}}"#,
    ),
    (
        "truncated document",
        r#"{"experiment": "kg-modes", "parameters": {"cutoff": 20"#,
    ),
    (
        "zero time step",
        r#"{"experiment": "kernel-consistency", "parameters": {"dt": 0.0}}"#,
    ),
];

fn cli() -> Vec<Part> {
    let work = tempfile::tempdir().unwrap();
    let dir = work.path();
    let (mut green, mut deterministic, mut slowest) = (true, true, 0.0f64);
    for name in ExperimentName::ALL {
        let cfg = format!("{}.json", name.as_str());
        std::fs::write(
            dir.join(&cfg),
            format!(r#"{{"experiment": "{}", "parameters": {{}}}}"#, name.as_str()),
        )
        .unwrap();
        let mut outputs = Vec::new();
        for run in ["a", "b"] {
            let out = format!("{}-{run}", name.as_str());
            let start = Instant::now();
            let o = dimech(&["run", "--config", &cfg, "--out", &out], dir);
            slowest = slowest.max(start.elapsed().as_secs_f64());
            if !o.status.success() {
                green = false;
                println!("      {} exited with {:?}", name.as_str(), o.status.code());
            }
            outputs.push(read_dir_bytes(&dir.join(&out)));
        }
        if outputs[0] != outputs[1] {
            deterministic = false;
            println!("      {} differs between runs", name.as_str());
        }
    }

    let mut caught = 0;
    for (label, text) in MUTATIONS {
        std::fs::write(dir.join("mutant.json"), text).unwrap();
        let o = dimech(&["validate", "--config", "mutant.json"], dir);
        if o.status.code() == Some(2) && !o.stderr.is_empty() {
            caught += 1;
        } else {
            println!("      mutation not caught: {label}");
        }
    }

    vec![
        holds("all experiments green at defaults", green),
        holds("outputs byte-identical across runs", deterministic),
        below("slowest run [s]", slowest, limit::CLI_EACH.as_secs_f64()),
        at_least("mutations caught (of 10)", caught as f64, MUTATIONS.len() as f64),
    ]
}

fn main() -> ExitCode {
    let results = [
        report("gprob", limit::GPROB, gprob_algebra),
        report("operators", limit::OPERATORS, operator_suite),
        report("kernel", limit::KERNEL, kernel_to_schrodinger),
        report("schrod", limit::SCHROD, schrodinger_solver),
        report("pathint", limit::PATHINT, path_integral),
        report("fields", limit::FIELDS, bosonic_fields),
        report("grassmann", limit::GRASSMANN, grassmann_sector),
        report("cli", limit::CLI_EACH * 2 * ExperimentName::ALL.len() as u32, cli),
    ];
    let passed = results.iter().filter(|ok| **ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
