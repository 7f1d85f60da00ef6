//! Finite Grassmann algebra, Berezin calculus and fermionic mode operators.
//!
//! Monomials are bitmasks over generator indices in ascending order. Operators
//! act on the `2ⁿ` coefficient space as dense matrices. Derivatives are left
//! derivatives, and the Berezin integral over a generator is the same map.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::HermitianOp;

pub const MAX_GENERATORS: usize = 12;

type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GAlgebra {
    n: usize,
}

impl GAlgebra {
    pub fn new(n_generators: usize) -> Result<Self> {
        if n_generators > MAX_GENERATORS {
            return Err(Error::TooLarge(format!(
                "Grassmann algebra limited to {MAX_GENERATORS} generators, got {n_generators}"
            )));
        }
        Ok(Self { n: n_generators })
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn check(&self, g: usize) -> Result<()> {
        if g >= self.n {
            return Err(Error::BadGenerator { index: g, n: self.n });
        }
        Ok(())
    }

    fn same(&self, other: &GAlgebra) -> Result<()> {
        if self != other {
            return Err(Error::AlgebraMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// Sign of the reordering that brings monomial `a` followed by `b` into
/// ascending order. Callers guarantee `a & b == 0`.
fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let g = rest.trailing_zeros();
        swaps += (a >> (g + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    alg: GAlgebra,
    coeffs: Vec<Complex64>,
}

impl Multivector {
    pub fn zero(alg: GAlgebra) -> Self {
        Self {
            alg,
            coeffs: vec![ZERO; alg.dim()],
        }
    }

    pub fn scalar(alg: GAlgebra, v: Complex64) -> Self {
        let mut m = Self::zero(alg);
        m.coeffs[0] = v;
        m
    }

    pub fn monomial(alg: GAlgebra, mask: usize, v: Complex64) -> Result<Self> {
        if mask >= alg.dim() {
            return Err(Error::BadGenerator {
                index: usize::BITS as usize - mask.leading_zeros() as usize - 1,
                n: alg.n,
            });
        }
        let mut m = Self::zero(alg);
        m.coeffs[mask] = v;
        Ok(m)
    }

    pub fn generator(alg: GAlgebra, g: usize) -> Result<Self> {
        alg.check(g)?;
        Self::monomial(alg, 1 << g, Complex64::new(1.0, 0.0))
    }

    pub fn from_coeffs(alg: GAlgebra, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != alg.dim() {
            return Err(Error::DimensionMismatch {
                expected: alg.dim(),
                found: coeffs.len(),
            });
        }
        Ok(Self { alg, coeffs })
    }

    pub fn algebra(&self) -> GAlgebra {
        self.alg
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> Complex64 {
        self.coeffs.get(mask).copied().unwrap_or(ZERO)
    }

    pub fn add(&self, other: &Multivector) -> Result<Multivector> {
        self.alg.same(&other.alg)?;
        Ok(Self {
            alg: self.alg,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> Multivector {
        Self {
            alg: self.alg,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Multivector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn gmul(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    a.alg.same(&b.alg)?;
    let mut out = Multivector::zero(a.alg);
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            if y == ZERO || i & j != 0 {
                continue;
            }
            out.coeffs[i | j] += x * y * reorder_sign(i, j);
        }
    }
    Ok(out)
}

/// Left derivative with respect to generator `g`.
pub fn berezin_diff(mv: &Multivector, g: usize) -> Result<Multivector> {
    Ok(GOperator::deriv(mv.alg, g)?.apply(mv))
}

/// Berezin integral over `g`; identical to the left derivative.
pub fn berezin_int(mv: &Multivector, g: usize) -> Result<Multivector> {
    berezin_diff(mv, g)
}

/// Linear map on the coefficient space of an algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct GOperator {
    alg: GAlgebra,
    matrix: CMat,
}

impl GOperator {
    pub fn from_matrix(alg: GAlgebra, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != alg.dim() || matrix.ncols() != alg.dim() {
            return Err(Error::DimensionMismatch {
                expected: alg.dim(),
                found: matrix.nrows(),
            });
        }
        Ok(Self { alg, matrix })
    }

    pub fn zero(alg: GAlgebra) -> Self {
        Self {
            alg,
            matrix: CMat::zeros(alg.dim(), alg.dim()),
        }
    }

    pub fn identity(alg: GAlgebra) -> Self {
        Self {
            alg,
            matrix: CMat::identity(alg.dim(), alg.dim()),
        }
    }

    /// Left multiplication by generator `g`.
    pub fn left_mul(alg: GAlgebra, g: usize) -> Result<Self> {
        alg.check(g)?;
        let bit = 1 << g;
        let mut m = CMat::zeros(alg.dim(), alg.dim());
        for mask in 0..alg.dim() {
            if mask & bit == 0 {
                m[(mask | bit, mask)] = Complex64::new(reorder_sign(bit, mask), 0.0);
            }
        }
        Ok(Self { alg, matrix: m })
    }

    /// Left derivative `∂/∂g`.
    pub fn deriv(alg: GAlgebra, g: usize) -> Result<Self> {
        alg.check(g)?;
        let bit = 1 << g;
        let mut m = CMat::zeros(alg.dim(), alg.dim());
        for mask in 0..alg.dim() {
            if mask & bit != 0 {
                let rest = mask & !bit;
                m[(rest, mask)] = Complex64::new(reorder_sign(bit, rest), 0.0);
            }
        }
        Ok(Self { alg, matrix: m })
    }

    pub fn algebra(&self) -> GAlgebra {
        self.alg
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn apply(&self, mv: &Multivector) -> Multivector {
        let v = nalgebra::DVector::from_column_slice(&mv.coeffs);
        let out = &self.matrix * v;
        Multivector {
            alg: self.alg,
            coeffs: out.iter().copied().collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GOperator) -> GOperator {
        GOperator {
            alg: self.alg,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &GOperator) -> GOperator {
        GOperator {
            alg: self.alg,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &GOperator) -> GOperator {
        GOperator {
            alg: self.alg,
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, s: Complex64) -> GOperator {
        GOperator {
            alg: self.alg,
            matrix: &self.matrix * s,
        }
    }

    pub fn commutator(&self, other: &GOperator) -> GOperator {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn anticommutator(&self, other: &GOperator) -> GOperator {
        self.compose(other).add(&other.compose(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &GOperator) -> f64 {
        self.sub(other).max_abs()
    }

    /// `max |self − s·I|`.
    pub fn distance_to_scalar(&self, s: f64) -> f64 {
        self.distance(&GOperator::identity(self.alg).scale(Complex64::new(s, 0.0)))
    }

    /// Eigenvalues by complex Schur decomposition, sorted by real part.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let schur = Schur::new(self.matrix.clone());
        let vals = schur.eigenvalues().ok_or(Error::NoConvergence {
            residual: f64::NAN,
            iterations: 0,
        })?;
        let mut v: Vec<Complex64> = vals.iter().copied().collect();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(v)
    }

    /// `max |(GA) − (GA)†|` for a diagonal positive metric `G`.
    pub fn metric_hermiticity_defect(&self, metric: &[f64]) -> f64 {
        let g = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            metric.len(),
            metric.iter().map(|&w| Complex64::new(w, 0.0)),
        ));
        let ga = g * &self.matrix;
        (&ga - ga.adjoint()).camax()
    }

    /// `S A S⁻¹` with `S = diag(√G)`; Hermitian when `A` is self-adjoint
    /// under the metric `G`.
    pub fn symmetrized(&self, metric: &[f64]) -> Result<HermitianOp> {
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] *= (metric[i] / metric[j]).sqrt();
            }
        }
        HermitianOp::new(m)
    }

    /// `e^{iHt} A e^{−iHt}` for `H` self-adjoint under the diagonal metric.
    pub fn heisenberg(&self, h: &GOperator, metric: &[f64], t: f64) -> Result<GOperator> {
        let hs = h.symmetrized(metric)?;
        let spec = hs.spectrum();
        let v = &spec.eigenvectors;
        let s: Vec<f64> = metric.iter().map(|w| w.sqrt()).collect();
        let mut a = self.matrix.clone();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                a[(i, j)] *= s[i] / s[j];
            }
        }
        let mut inner = v.adjoint() * a * v;
        let e = &spec.eigenvalues;
        for i in 0..e.len() {
            for j in 0..e.len() {
                inner[(i, j)] *= Complex64::from_polar(1.0, (e[i] - e[j]) * t);
            }
        }
        let mut out = v * inner * v.adjoint();
        for i in 0..out.nrows() {
            for j in 0..out.ncols() {
                out[(i, j)] *= s[j] / s[i];
            }
        }
        Ok(GOperator {
            alg: self.alg,
            matrix: out,
        })
    }
}

/// Coefficients of `Ĥ = c00 ∂_{b*}∂_b + c11 ∂_{b*} + c12 ∂_b + c20 + c30 (b + b*) + c40 b b*`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThetaCoefficients {
    pub c00: f64,
    pub c11: f64,
    pub c12: f64,
    pub c20: f64,
    pub c30: f64,
    pub c40: f64,
}

impl ThetaCoefficients {
    pub fn oscillator(omega: f64) -> Self {
        Self {
            c00: 1.0,
            c40: omega * omega,
            ..Self::default()
        }
    }
}

/// Generator indices of `b` and `b*` in the two-generator algebra.
pub const B: usize = 0;
pub const B_STAR: usize = 1;

pub fn hamiltonian_from_theta(c: &ThetaCoefficients, alg: GAlgebra) -> Result<GOperator> {
    if alg.generators() != 2 {
        return Err(Error::InvalidParameter(format!(
            "theta Hamiltonian needs the two-generator algebra, got {} generators",
            alg.generators()
        )));
    }
    let r = |v: f64| Complex64::new(v, 0.0);
    let d_b = GOperator::deriv(alg, B)?;
    let d_bs = GOperator::deriv(alg, B_STAR)?;
    let l_b = GOperator::left_mul(alg, B)?;
    let l_bs = GOperator::left_mul(alg, B_STAR)?;
    Ok(d_bs
        .compose(&d_b)
        .scale(r(c.c00))
        .add(&d_bs.scale(r(c.c11)))
        .add(&d_b.scale(r(c.c12)))
        .add(&GOperator::identity(alg).scale(r(c.c20)))
        .add(&l_b.add(&l_bs).scale(r(c.c30)))
        .add(&l_b.compose(&l_bs).scale(r(c.c40))))
}

/// Ladder operators for one `(d, d*)` pair:
/// `F = Δ^{−½}∂_{d*} + Δ^{½}ω d`, `F† = Δ^{−½}∂_d + Δ^{½}ω d*`,
/// `E† = Δ^{−½}∂_{d*} − Δ^{½}ω d`, `E = −(Δ^{−½}∂_d − Δ^{½}ω d*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionMode {
    pub omega: f64,
    pub scale: f64,
    pub d: usize,
    pub d_star: usize,
    pub f: GOperator,
    pub f_dag: GOperator,
    pub e: GOperator,
    pub e_dag: GOperator,
}

impl FermionMode {
    pub fn with_scale(alg: GAlgebra, d: usize, d_star: usize, omega: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        let r = |v: f64| Complex64::new(v, 0.0);
        let a = r(scale.powf(-0.5));
        let b = r(scale.sqrt() * omega);
        let dd = GOperator::deriv(alg, d)?;
        let dds = GOperator::deriv(alg, d_star)?;
        let ld = GOperator::left_mul(alg, d)?;
        let lds = GOperator::left_mul(alg, d_star)?;
        let f = dds.scale(a).add(&ld.scale(b));
        let f_dag = dd.scale(a).add(&lds.scale(b));
        let e_dag = dds.scale(a).sub(&ld.scale(b));
        let e = dd.scale(a).sub(&lds.scale(b)).scale(r(-1.0));
        Ok(Self {
            omega,
            scale,
            d,
            d_star,
            f,
            f_dag,
            e,
            e_dag,
        })
    }

    pub fn number(&self) -> GOperator {
        self.f_dag.compose(&self.f)
    }

    /// `F†F − EE†`.
    pub fn dirac_term(&self) -> GOperator {
        self.number().sub(&self.e.compose(&self.e_dag))
    }

    /// Largest deviation of `{F†,F}` and `{E†,E}` from `2ω·I`, together with
    /// the largest of `F², F†², E², E†²` and the mixed `{F,E}`-type anticommutators.
    pub fn algebra_defects(&self) -> (f64, f64) {
        let two_w = 2.0 * self.omega;
        let anti = self
            .f_dag
            .anticommutator(&self.f)
            .distance_to_scalar(two_w)
            .max(self.e_dag.anticommutator(&self.e).distance_to_scalar(two_w));
        let ops = [&self.f, &self.f_dag, &self.e, &self.e_dag];
        let mut nil = 0.0f64;
        for o in ops {
            nil = nil.max(o.compose(o).max_abs());
        }
        for x in [&self.f, &self.f_dag] {
            for y in [&self.e, &self.e_dag] {
                nil = nil.max(x.anticommutator(y).max_abs());
            }
        }
        (anti, nil)
    }
}

/// Diagonal metric `G_m = ω^{−|m|}` over the monomials of the pair
/// `(d, d*)`, under which `F†` is the adjoint of `F` at unit scale.
pub fn pair_metric(alg: GAlgebra, pairs: &[(usize, usize, f64)]) -> Vec<f64> {
    (0..alg.dim())
        .map(|mask| {
            pairs
                .iter()
                .map(|&(d, ds, w)| {
                    let k = ((mask >> d) & 1) + ((mask >> ds) & 1);
                    w.powi(-(k as i32))
                })
                .product()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct FermiOscillator {
    pub alg: GAlgebra,
    pub hamiltonian: GOperator,
    pub mode: FermionMode,
    pub metric: Vec<f64>,
}

impl FermiOscillator {
    /// Residual of `b̈ + ω²b` with `ḃ = i[H, b]`.
    pub fn eom_residual(&self) -> Result<f64> {
        let i = Complex64::new(0.0, 1.0);
        let b = GOperator::left_mul(self.alg, B)?;
        let bs = GOperator::left_mul(self.alg, B_STAR)?;
        let w2 = Complex64::new(self.mode.omega.powi(2), 0.0);
        let mut worst = 0.0f64;
        for g in [b, bs] {
            let dot = self.hamiltonian.commutator(&g).scale(i);
            let ddot = self.hamiltonian.commutator(&dot).scale(i);
            worst = worst.max(ddot.add(&g.scale(w2)).max_abs());
        }
        Ok(worst)
    }

    /// `ḃ = i[H, b]` compared with `i∂_{b*}`, and `ḃ* = i[H, b*]` with `−i∂_b`.
    pub fn first_order_residual(&self) -> Result<f64> {
        let i = Complex64::new(0.0, 1.0);
        let b = GOperator::left_mul(self.alg, B)?;
        let bs = GOperator::left_mul(self.alg, B_STAR)?;
        let db = GOperator::deriv(self.alg, B)?;
        let dbs = GOperator::deriv(self.alg, B_STAR)?;
        let r1 = self.hamiltonian.commutator(&b).scale(i).distance(&dbs.scale(i));
        let r2 = self.hamiltonian.commutator(&bs).scale(i).distance(&db.scale(-i));
        Ok(r1.max(r2))
    }
}

/// `H = ∂_{b*}∂_b + ω² b b*` with unit-scale ladder operators on `(b, b*)`.
pub fn fermi_oscillator(omega: f64) -> Result<FermiOscillator> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let alg = GAlgebra::new(2)?;
    let hamiltonian = hamiltonian_from_theta(&ThetaCoefficients::oscillator(omega), alg)?;
    let mode = FermionMode::with_scale(alg, B, B_STAR, omega, 1.0)?;
    let metric = pair_metric(alg, &[(B, B_STAR, omega)]);
    Ok(FermiOscillator {
        alg,
        hamiltonian,
        mode,
        metric,
    })
}

#[derive(Debug, Clone)]
pub struct DiracModes {
    pub alg: GAlgebra,
    pub modes: Vec<FermionMode>,
    pub hamiltonian: GOperator,
    /// Sorted eigenvalues.
    pub spectrum: Vec<f64>,
}

/// `H = Σ_l (F_l†F_l − E_l E_l†)`, label `l` on generators `(2l, 2l+1)`.
/// Each label uses scale `Δ = 1/ω`, which makes `H` Hermitian; its term is
/// `2ω(∂_d∂_{d*} + d* d)`, so a label with `ω = 0` contributes nothing.
pub fn dirac_mode_hamiltonian(omegas: &[f64]) -> Result<DiracModes> {
    let alg = GAlgebra::new(2 * omegas.len())?;
    let mut hamiltonian = GOperator::zero(alg);
    let mut modes = Vec::with_capacity(omegas.len());
    for (l, &w) in omegas.iter().enumerate() {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be non-negative, got {w}")));
        }
        let scale = if w > 0.0 { 1.0 / w } else { 1.0 };
        let mode = FermionMode::with_scale(alg, 2 * l, 2 * l + 1, w, scale)?;
        if w > 0.0 {
            hamiltonian = hamiltonian.add(&mode.dirac_term());
        }
        modes.push(mode);
    }
    let h = HermitianOp::new(hamiltonian.matrix().clone())?;
    let spectrum = h.spectrum().eigenvalues;
    Ok(DiracModes {
        alg,
        modes,
        hamiltonian,
        spectrum,
    })
}

/// `max |−[H,[H,A]] + ν²A|`, the residual of `Ä = −ν²A` with `Ȧ = i[H, A]`.
pub fn oscillation_residual(h: &GOperator, a: &GOperator, nu: f64) -> f64 {
    let ddot = h.commutator(&h.commutator(a)).scale(Complex64::new(-1.0, 0.0));
    ddot.add(&a.scale(Complex64::new(nu * nu, 0.0))).max_abs()
}

/// All sums of one value from each list, sorted.
pub fn tensor_sum(spectra: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0];
    for s in spectra {
        out = out.iter().flat_map(|a| s.iter().map(move |b| a + b)).collect();
    }
    out.sort_by(f64::total_cmp);
    out
}
