//! Complex event amplitudes ("g-probabilities").
//!
//! An [`Amplitude`] carries a "stay" component `u` (no ordering between the
//! two states) and a "transition" component `v` (ordering defined). Chaining
//! logically related events multiplies amplitudes as complex numbers and
//! alternatives over unrelated states add componentwise. Probabilities only
//! appear once the density matrix is diagonal (exact testing), where the
//! squared magnitudes form an ordinary additive measure.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for the unit-norm checks at API boundaries.
pub const NORM_TOL: f64 = 1e-9;

/// Default threshold for [`DensityMatrix::exact_testing`].
pub const EXACT_TESTING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Amplitude {
    pub u: f64,
    pub v: f64,
}

impl Amplitude {
    pub const ZERO: Amplitude = Amplitude { u: 0.0, v: 0.0 };
    pub const ONE: Amplitude = Amplitude { u: 1.0, v: 0.0 };

    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    /// Squared magnitude `u² + v²`.
    pub fn weight(&self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    pub fn magnitude(&self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.u, -self.v)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.u * s, self.v * s)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im)
    }
}

impl From<Complex64> for Amplitude {
    fn from(c: Complex64) -> Self {
        Self::from_complex(c)
    }
}

impl From<Amplitude> for Complex64 {
    fn from(a: Amplitude) -> Self {
        a.to_complex()
    }
}

/// Amplitude of the chain `1 → 2 → 3` given the links `1 → 2` (`c21`) and
/// `2 → 3` (`c32`):
///
/// ```text
/// u = U₁₂U₂₃ − V₁₂V₂₃
/// v = V₁₂U₂₃ + U₁₂V₂₃
/// ```
pub fn chain(c21: Amplitude, c32: Amplitude) -> Amplitude {
    Amplitude {
        u: c21.u * c32.u - c21.v * c32.v,
        v: c21.v * c32.u + c21.u * c32.v,
    }
}

/// Amplitude of reaching a state from either of two unrelated states.
pub fn alt_sum(ca: Amplitude, cb: Amplitude) -> Amplitude {
    Amplitude {
        u: ca.u + cb.u,
        v: ca.v + cb.v,
    }
}

/// Opaque identifier of an elementary state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl From<usize> for Label {
    fn from(i: usize) -> Self {
        Self(i.to_string())
    }
}

/// A directed event between two labelled states.
#[derive(Debug, Clone, PartialEq)]
pub struct EventPair {
    pub from_label: Label,
    pub to_label: Label,
    pub amp: Amplitude,
}

impl EventPair {
    pub fn new(from: impl Into<Label>, to: impl Into<Label>, amp: Amplitude) -> Self {
        Self {
            from_label: from.into(),
            to_label: to.into(),
            amp,
        }
    }

    /// The same event read in the opposite direction: `V₂₁ = −V₁₂`, `U₂₁ = U₁₂`.
    pub fn swapped(&self) -> Self {
        Self {
            from_label: self.to_label.clone(),
            to_label: self.from_label.clone(),
            amp: self.amp.conj(),
        }
    }
}

/// Map from elementary states to amplitudes, kept in label order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GState {
    amplitudes: BTreeMap<Label, Amplitude>,
}

impl GState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<L, I>(pairs: I) -> Self
    where
        L: Into<Label>,
        I: IntoIterator<Item = (L, Amplitude)>,
    {
        Self {
            amplitudes: pairs.into_iter().map(|(l, a)| (l.into(), a)).collect(),
        }
    }

    pub fn insert(&mut self, label: impl Into<Label>, amp: Amplitude) {
        self.amplitudes.insert(label.into(), amp);
    }

    pub fn get(&self, label: &Label) -> Option<Amplitude> {
        self.amplitudes.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.amplitudes.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Amplitude)> {
        self.amplitudes.iter()
    }

    /// `Σ Ψ(aᵢ)Ψ*(aᵢ)`.
    pub fn total_weight(&self) -> f64 {
        self.amplitudes.values().map(Amplitude::weight).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_weight() - 1.0).abs() <= NORM_TOL
    }

    fn require_normalized(&self) -> Result<()> {
        let norm = self.total_weight();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }
}

/// Rescale a state so that its weights sum to one. Ratios between amplitudes
/// are preserved.
pub fn normalize(state: &GState) -> Result<GState> {
    let total = state.total_weight();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateState);
    }
    let s = total.sqrt().recip();
    Ok(GState {
        amplitudes: state.amplitudes.iter().map(|(l, a)| (l.clone(), a.scale(s))).collect(),
    })
}

/// `Pᵢⱼ = Ψ(aᵢ)Ψ*(aⱼ)` over the labels of a normalized state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<Label>,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest `|Pᵢⱼ − P*ⱼᵢ|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let p = &self.entries;
        let n = p.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((p[(i, j)] - p[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest 2×2 minor magnitude; zero for a rank-one matrix.
    pub fn rank_one_defect(&self) -> f64 {
        let p = &self.entries;
        let n = p.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    for l in (k + 1)..n {
                        let minor = p[(i, k)] * p[(j, l)] - p[(i, l)] * p[(j, k)];
                        worst = worst.max(minor.norm());
                    }
                }
            }
        }
        worst
    }

    /// True when every off-diagonal entry is below `tol`, i.e. no alternative
    /// event can occur together with a given one.
    pub fn exact_testing(&self, tol: f64) -> bool {
        let p = &self.entries;
        let n = p.nrows();
        (0..n).all(|i| (0..n).all(|j| i == j || p[(i, j)].norm() < tol))
    }
}

pub fn density(state: &GState) -> Result<DensityMatrix> {
    state.require_normalized()?;
    let labels: Vec<Label> = state.labels().cloned().collect();
    let psi: Vec<Complex64> = state.amplitudes.values().map(|a| a.to_complex()).collect();
    let n = psi.len();
    let entries = DMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
    Ok(DensityMatrix { labels, entries })
}

/// A finite classical probability space over disjoint elementary events.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSpace {
    events: Vec<Label>,
    measure: BTreeMap<Label, f64>,
}

impl ClassicalSpace {
    pub fn events(&self) -> &[Label] {
        &self.events
    }

    pub fn prob(&self, label: &Label) -> Option<f64> {
        self.measure.get(label).copied()
    }

    /// Probability of the union of distinct elementary events.
    pub fn prob_of_union<'a, I>(&self, labels: I) -> f64
    where
        I: IntoIterator<Item = &'a Label>,
    {
        let mut seen = std::collections::BTreeSet::new();
        labels
            .into_iter()
            .filter(|l| seen.insert(*l))
            .filter_map(|l| self.measure.get(l))
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.measure.values().sum()
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.measure.values().all(|&p| p >= 0.0) && (self.total() - 1.0).abs() <= tol
    }
}

/// Born weights `P(aᵢ) = Ψ(aᵢ)Ψ*(aᵢ)` of a normalized state.
pub fn born(state: &GState) -> Result<ClassicalSpace> {
    state.require_normalized()?;
    let events: Vec<Label> = state.labels().cloned().collect();
    let measure = state.amplitudes.iter().map(|(l, a)| (l.clone(), a.weight())).collect();
    Ok(ClassicalSpace { events, measure })
}

/// Amplitudes `Ψ(⟨aᵢ|bⱼ⟩)` of pairs of events drawn from two index sets.
/// The reversed pair is the complex conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSpace {
    amps: DMatrix<Complex64>,
}

impl PairSpace {
    /// Rows index `aᵢ`, columns index `bⱼ`.
    pub fn new(amps: DMatrix<Complex64>) -> Self {
        Self { amps }
    }

    pub fn from_fn(ka: usize, kb: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            amps: DMatrix::from_fn(ka, kb, f),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.amps.shape()
    }

    /// `Ψ(⟨aᵢ|bⱼ⟩)`.
    pub fn forward(&self, i: usize, j: usize) -> Complex64 {
        self.amps[(i, j)]
    }

    /// `Ψ(⟨bⱼ|aᵢ⟩) = Ψ*(⟨aᵢ|bⱼ⟩)`.
    pub fn reverse(&self, i: usize, j: usize) -> Complex64 {
        self.amps[(i, j)].conj()
    }

    pub fn total_weight(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_weight();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegenerateState);
        }
        Ok(Self {
            amps: self.amps.map(|c| c / total.sqrt()),
        })
    }
}

/// Collapse each row of pairs `⟨aᵢ|bⱼ⟩ ∩ ⟨bⱼ|aᵢ⟩` into the elementary event
/// `aᵢ` with `P(aᵢ) = Σⱼ Ψ(⟨aᵢ|bⱼ⟩)Ψ(⟨bⱼ|aᵢ⟩)`.
pub fn classical_from_pairs(ps: &PairSpace) -> Result<ClassicalSpace> {
    let total = ps.total_weight();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm: total });
    }
    let (ka, kb) = ps.shape();
    let events: Vec<Label> = (0..ka).map(|i| Label::new(format!("a{i}"))).collect();
    let measure = events
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let p: f64 = (0..kb).map(|j| (ps.forward(i, j) * ps.reverse(i, j)).re).sum();
            (l.clone(), p)
        })
        .collect();
    Ok(ClassicalSpace { events, measure })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amp(u: f64, v: f64) -> Amplitude {
        Amplitude::new(u, v)
    }

    fn close(a: Amplitude, b: Amplitude, tol: f64) -> bool {
        (a.u - b.u).abs() <= tol && (a.v - b.v).abs() <= tol
    }

    #[test]
    fn chain_examples() {
        assert_eq!(chain(amp(0.0, 1.0), amp(0.0, 1.0)), amp(-1.0, 0.0));
        let x = amp(0.3, -0.7);
        assert_eq!(chain(Amplitude::ONE, x), x);
        // complex-multiplication oracle
        let expect = Complex64::new(0.6, 0.8) * Complex64::new(0.6, -0.8);
        let got = chain(amp(0.6, 0.8), amp(0.6, -0.8));
        assert!(close(got, expect.into(), 1e-15));
        assert!(close(got, amp(1.0, 0.0), 1e-15));
    }

    #[test]
    fn alt_sum_examples() {
        assert!(close(alt_sum(amp(0.3, 0.4), amp(0.1, -0.2)), amp(0.4, 0.2), 1e-15));
        let x = amp(-2.5, 0.125);
        assert_eq!(alt_sum(x, Amplitude::ZERO), x);
        let expect = Complex64::new(0.5, 0.5) + Complex64::new(0.5, -0.5);
        assert!(close(alt_sum(amp(0.5, 0.5), amp(0.5, -0.5)), expect.into(), 0.0));
    }

    #[test]
    fn swap_negates_transition_component() {
        let e = EventPair::new("1", "2", amp(0.25, -0.5));
        let s = e.swapped();
        assert_eq!(s.amp.u, 0.25);
        assert_eq!(s.amp.v, 0.5);
        assert_eq!(s.from_label, Label::from("2"));
        assert_eq!(s.swapped(), e);
    }

    #[test]
    fn normalize_examples() {
        let s = normalize(&GState::from_pairs([("a", amp(2.0, 0.0))])).unwrap();
        assert_eq!(s.get(&"a".into()), Some(amp(1.0, 0.0)));

        let s = normalize(&GState::from_pairs([("a", amp(1.0, 0.0)), ("b", amp(0.0, 1.0))])).unwrap();
        let r = 0.5f64.sqrt();
        assert!(close(s.get(&"a".into()).unwrap(), amp(r, 0.0), 1e-15));
        assert!(close(s.get(&"b".into()).unwrap(), amp(0.0, r), 1e-15));

        let err = normalize(&GState::from_pairs([("a", Amplitude::ZERO)])).unwrap_err();
        assert_eq!(err, Error::DegenerateState);
        assert!(normalize(&GState::new()).is_err());
    }

    #[test]
    fn density_examples() {
        let dm = density(&GState::from_pairs([("a", amp(1.0, 0.0))])).unwrap();
        assert_eq!(dm.entries()[(0, 0)], Complex64::new(1.0, 0.0));
        assert!(dm.exact_testing(EXACT_TESTING_TOL));

        let r = 0.5f64.sqrt();
        let dm = density(&GState::from_pairs([("a", amp(r, 0.0)), ("b", amp(r, 0.0))])).unwrap();
        assert!((dm.entries()[(0, 1)].re - 0.5).abs() < 1e-15);
        assert!(!dm.exact_testing(1e-6));
        assert!(dm.hermiticity_defect() < 1e-15);
        assert!((dm.trace().re - 1.0).abs() < 1e-12);
        assert!(dm.rank_one_defect() < 1e-15);
    }

    #[test]
    fn density_rejects_unnormalized() {
        let err = density(&GState::from_pairs([("a", amp(2.0, 0.0))])).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
        assert!(born(&GState::from_pairs([("a", amp(0.5, 0.0))])).is_err());
    }

    #[test]
    fn born_examples() {
        let cs = born(&GState::from_pairs([("a", amp(1.0, 0.0))])).unwrap();
        assert_eq!(cs.prob(&"a".into()), Some(1.0));

        let cs = born(&GState::from_pairs([("a", amp(0.6, 0.0)), ("b", amp(0.0, 0.8))])).unwrap();
        assert!((cs.prob(&"a".into()).unwrap() - 0.36).abs() < 1e-15);
        assert!((cs.prob(&"b".into()).unwrap() - 0.64).abs() < 1e-15);
        let a: Label = "a".into();
        let b: Label = "b".into();
        assert!((cs.prob_of_union([&a, &b]) - 1.0).abs() < 1e-15);
        // repeated labels are one event
        assert!((cs.prob_of_union([&a, &a]) - 0.36).abs() < 1e-15);
    }

    #[test]
    fn pairs_examples() {
        let ps = PairSpace::from_fn(1, 1, |_, _| Complex64::new(0.0, 1.0));
        let cs = classical_from_pairs(&ps).unwrap();
        assert!((cs.prob(&"a0".into()).unwrap() - 1.0).abs() < 1e-15);

        let ps = PairSpace::from_fn(2, 2, |i, j| Complex64::from_polar(0.5, (i + 2 * j) as f64));
        let cs = classical_from_pairs(&ps).unwrap();
        assert!((cs.prob(&"a0".into()).unwrap() - 0.5).abs() < 1e-15);
        assert!((cs.prob(&"a1".into()).unwrap() - 0.5).abs() < 1e-15);

        let bad = PairSpace::from_fn(2, 2, |_, _| Complex64::new(1.0, 0.0));
        assert!(matches!(classical_from_pairs(&bad), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn pair_reverse_is_conjugate() {
        let ps = PairSpace::from_fn(2, 3, |i, j| Complex64::new(i as f64, j as f64 + 1.0));
        assert_eq!(ps.reverse(1, 2), ps.forward(1, 2).conj());
    }
}
