//! Step operators and walk protocols.
//!
//! A protocol is an ordered list of primitive factors applied once per step.
//! In quasi-momentum space the forward hop `t|m> = |m+1>` becomes the phase
//! `e^{iq}` on the upper-right entry of the translation; the lattice oracle
//! uses the same pairing, so the two representations agree site by site.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::par;
use crate::su2::Su2Matrix;

/// Primitive operations a step is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    /// Coin rotation `W`.
    Coin,
    /// Coin-dependent translation `T(delta)`.
    Translation,
    /// Half-retardation translation `T(delta/2)`, the principal `sqrt(T(delta))`.
    SqrtTranslation,
    /// Basis rotation `R`.
    Rotation,
    /// `R^dagger`.
    RotationAdjoint,
}

impl Factor {
    pub fn symbol(self) -> &'static str {
        match self {
            Factor::Coin => "W",
            Factor::Translation => "T",
            Factor::SqrtTranslation => "sqrtT",
            Factor::Rotation => "R",
            Factor::RotationAdjoint => "Rdag",
        }
    }

    pub fn is_translation(self) -> bool {
        matches!(self, Factor::Translation | Factor::SqrtTranslation)
    }

    /// Retardation of the translation plate for a step parameter `delta`.
    pub fn translation_delta(self, delta: f64) -> Option<f64> {
        match self {
            Factor::Translation => Some(delta),
            Factor::SqrtTranslation => Some(delta / 2.0),
            _ => None,
        }
    }

    /// Site-local coin matrix, for the factors that do not translate.
    pub fn coin_matrix(self) -> Option<Su2Matrix> {
        match self {
            Factor::Coin => Some(coin_w()),
            Factor::Rotation => Some(rotation_r()),
            Factor::RotationAdjoint => Some(rotation_r().adjoint()),
            _ => None,
        }
    }

    pub fn bloch(self, delta: f64, q: f64) -> Su2Matrix {
        match self.translation_delta(delta) {
            Some(d) => translation_t_bloch(d, q),
            None => self
                .coin_matrix()
                .expect("non-translation factors are coins"),
        }
    }
}

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "W" => Ok(Factor::Coin),
            "T" => Ok(Factor::Translation),
            "sqrtT" => Ok(Factor::SqrtTranslation),
            "R" => Ok(Factor::Rotation),
            "Rdag" => Ok(Factor::RotationAdjoint),
            other => Err(Error::UnknownFamily(format!("factor {other}"))),
        }
    }
}

/// Step-operator family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `U1 = T W`.
    U1,
    /// `U2 = sqrt(T) W sqrt(T)`.
    U2,
    /// `U3 = R^dagger T W R`.
    U3,
    /// Factors listed in application order (first entry acts first).
    Custom(Vec<Factor>),
}

impl Family {
    /// Factors in application order.
    pub fn factors(&self) -> Vec<Factor> {
        use Factor::*;
        match self {
            Family::U1 => vec![Coin, Translation],
            Family::U2 => vec![SqrtTranslation, Coin, SqrtTranslation],
            Family::U3 => vec![Rotation, Coin, Translation, RotationAdjoint],
            Family::Custom(f) => f.clone(),
        }
    }

    /// Upper bound on how far one step moves the walker.
    pub fn coupling_range(&self) -> usize {
        self.factors().iter().filter(|f| f.is_translation()).count()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::U1 => write!(f, "U1"),
            Family::U2 => write!(f, "U2"),
            Family::U3 => write!(f, "U3"),
            Family::Custom(factors) => {
                let names: Vec<_> = factors.iter().map(|x| x.symbol()).collect();
                write!(f, "custom[{}]", names.join(","))
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "U1" | "u1" => Ok(Family::U1),
            "U2" | "u2" => Ok(Family::U2),
            "U3" | "u3" => Ok(Family::U3),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// How disordered step parameters are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderDistribution {
    /// Uniform over `[center - half_width, center + half_width]`.
    #[default]
    Uniform,
    /// Each step is `center - half_width` or `center + half_width` with equal odds.
    TwoValued,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disorder {
    pub seed: u64,
    pub center: f64,
    pub half_width: f64,
    #[serde(default)]
    pub distribution: DisorderDistribution,
}

impl Disorder {
    pub fn uniform(seed: u64, center: f64, half_width: f64) -> Self {
        Self {
            seed,
            center,
            half_width,
            distribution: DisorderDistribution::Uniform,
        }
    }

    pub fn schedule(&self, tau: usize) -> Vec<f64> {
        if self.half_width == 0.0 {
            return vec![self.center; tau];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (lo, hi) = (self.center - self.half_width, self.center + self.half_width);
        match self.distribution {
            DisorderDistribution::Uniform => (0..tau).map(|_| rng.random_range(lo..=hi)).collect(),
            DisorderDistribution::TwoValued => (0..tau)
                .map(|_| if rng.random_bool(0.5) { hi } else { lo })
                .collect(),
        }
    }
}

/// `tau` step parameters drawn independently from the seeded uniform
/// distribution on `[center - half_width, center + half_width]`.
pub fn disorder_schedule(seed: u64, tau: usize, center: f64, half_width: f64) -> Vec<f64> {
    Disorder::uniform(seed, center, half_width.abs()).schedule(tau)
}

/// A full walk: family, per-step parameters and step count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub family: Family,
    pub delta_schedule: Vec<f64>,
    pub tau: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<Disorder>,
}

impl ProtocolSpec {
    pub fn constant(family: Family, delta: f64, tau: usize) -> Self {
        Self {
            family,
            delta_schedule: vec![delta; tau],
            tau,
            disorder: None,
        }
    }

    pub fn disordered(family: Family, tau: usize, disorder: Disorder) -> Result<Self> {
        if disorder.half_width < 0.0 || !disorder.half_width.is_finite() {
            return Err(Error::InvalidProtocol(format!(
                "disorder half-width must be non-negative, got {}",
                disorder.half_width
            )));
        }
        Ok(Self {
            family,
            delta_schedule: disorder.schedule(tau),
            tau,
            disorder: Some(disorder),
        })
    }

    pub fn from_schedule(family: Family, delta_schedule: Vec<f64>) -> Self {
        Self {
            family,
            tau: delta_schedule.len(),
            delta_schedule,
            disorder: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta_schedule.len() != self.tau {
            return Err(Error::InvalidProtocol(format!(
                "schedule has {} entries for tau = {}",
                self.delta_schedule.len(),
                self.tau
            )));
        }
        if let Some(d) = &self.disorder {
            let (lo, hi) = (d.center - d.half_width, d.center + d.half_width);
            if let Some(bad) = self.delta_schedule.iter().find(|&&x| x < lo || x > hi) {
                return Err(Error::InvalidProtocol(format!(
                    "disordered delta {bad} outside [{lo}, {hi}]"
                )));
            }
        }
        if let Some(bad) = self.delta_schedule.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidProtocol(format!("non-finite delta {bad}")));
        }
        Ok(())
    }

    /// True when every step shares the same parameter.
    pub fn is_constant(&self) -> bool {
        self.delta_schedule.windows(2).all(|w| w[0] == w[1])
    }

    pub fn coupling_range(&self) -> usize {
        self.family.coupling_range()
    }

    /// Largest displacement reachable after all steps.
    pub fn light_cone(&self) -> usize {
        self.coupling_range() * self.tau
    }

    /// Steps `range` as a protocol of their own.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        let delta_schedule = self.delta_schedule[range].to_vec();
        Self {
            family: self.family.clone(),
            tau: delta_schedule.len(),
            delta_schedule,
            disorder: self.disorder,
        }
    }

    /// Short human-readable description.
    pub fn label(&self) -> String {
        match (&self.disorder, self.delta_schedule.first()) {
            (Some(d), _) => format!(
                "{} disorder(seed={},center={:.12},half_width={:.12})",
                self.family, d.seed, d.center, d.half_width
            ),
            (None, Some(&d)) if self.is_constant() => format!("{} delta={:.12}", self.family, d),
            (None, Some(_)) => format!("{} schedule", self.family),
            (None, None) => format!("{} empty", self.family),
        }
    }

    /// Hex digest over family, step count and the exact schedule bits.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.family.to_string().as_bytes());
        h.update((self.tau as u64).to_le_bytes());
        for d in &self.delta_schedule {
            h.update(d.to_bits().to_le_bytes());
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Quasi-momentum sampling of one Brillouin zone of length `bz_length_mm`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochGrid {
    pub bz_length_mm: f64,
    pub pitch_mm: f64,
    pub n_samples: usize,
}

impl BlochGrid {
    pub fn new(bz_length_mm: f64, pitch_mm: f64) -> Result<Self> {
        if !(bz_length_mm > 0.0 && pitch_mm > 0.0) {
            return Err(Error::InvalidGrid(
                "length and pitch must be positive".into(),
            ));
        }
        let ratio = bz_length_mm / pitch_mm;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "pitch {pitch_mm} mm does not divide {bz_length_mm} mm"
            )));
        }
        Ok(Self {
            bz_length_mm,
            pitch_mm,
            n_samples: n as usize,
        })
    }

    /// `n_samples` equally spaced samples over `bz_length_mm`.
    pub fn with_samples(bz_length_mm: f64, n_samples: usize) -> Result<Self> {
        if n_samples == 0 || bz_length_mm <= 0.0 {
            return Err(Error::InvalidGrid(
                "need a positive length and sample count".into(),
            ));
        }
        Ok(Self {
            bz_length_mm,
            pitch_mm: bz_length_mm / n_samples as f64,
            n_samples,
        })
    }

    /// 5 mm zone sampled every 4 um.
    pub fn standard() -> Self {
        Self::new(5.0, 0.004).expect("4 um divides 5 mm")
    }

    pub fn quasi_momentum(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_samples as f64
    }

    pub fn position_mm(&self, k: usize) -> f64 {
        k as f64 * self.pitch_mm
    }
}

pub fn coin_w() -> Su2Matrix {
    let s = FRAC_1_SQRT_2;
    Su2Matrix::new([
        [C64::new(s, 0.0), C64::new(0.0, s)],
        [C64::new(0.0, s), C64::new(s, 0.0)],
    ])
}

pub fn rotation_r() -> Su2Matrix {
    let (s, c) = (PI / 8.0).sin_cos();
    Su2Matrix::new([
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -s), C64::new(c, 0.0)],
    ])
}

pub fn translation_t_bloch(delta: f64, q: f64) -> Su2Matrix {
    let (s, c) = (delta / 2.0).sin_cos();
    let hop = C64::new(0.0, s);
    Su2Matrix::new([
        [C64::new(c, 0.0), hop * C64::from_polar(1.0, q)],
        [hop * C64::from_polar(1.0, -q), C64::new(c, 0.0)],
    ])
}

pub fn sqrt_translation_bloch(delta: f64, q: f64) -> Su2Matrix {
    translation_t_bloch(delta / 2.0, q)
}

/// Bloch matrix of step `step_index` at quasi-momentum `q`.
pub fn step_operator(spec: &ProtocolSpec, step_index: usize, q: f64) -> Result<Su2Matrix> {
    let delta = *spec.delta_schedule.get(step_index).ok_or_else(|| {
        Error::InvalidProtocol(format!("step {step_index} outside 0..{}", spec.tau))
    })?;
    Ok(step_bloch(&spec.family.factors(), delta, q))
}

fn step_bloch(factors: &[Factor], delta: f64, q: f64) -> Su2Matrix {
    factors
        .iter()
        .fold(Su2Matrix::IDENTITY, |acc, f| f.bloch(delta, q) * acc)
}

/// Bloch operator of the whole walk at `q`; step 1 acts first.
pub fn walk_operator_bloch(spec: &ProtocolSpec, q: f64) -> Su2Matrix {
    let factors = spec.family.factors();
    if spec.tau > 0 && spec.is_constant() {
        let step = step_bloch(&factors, spec.delta_schedule[0], q);
        if let Ok(p) = step.power(spec.tau as u32) {
            return p;
        }
    }
    spec.delta_schedule
        .iter()
        .fold(Su2Matrix::IDENTITY, |acc, &d| {
            step_bloch(&factors, d, q) * acc
        })
}

/// Single-step quasi-energies over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiEnergySpectrum {
    pub quasi_momenta: Vec<f64>,
    /// `(E_plus, E_minus)` per sample.
    pub bands: Vec<(f64, f64)>,
}

pub fn quasienergy_map(spec: &ProtocolSpec, grid: &BlochGrid) -> Result<QuasiEnergySpectrum> {
    if spec.tau != 1 {
        return Err(Error::InvalidProtocol(format!(
            "quasi-energy map needs a single step, got tau = {}",
            spec.tau
        )));
    }
    let quasi_momenta: Vec<f64> = (0..grid.n_samples)
        .map(|k| grid.quasi_momentum(k))
        .collect();
    let bands = par::map_slice(&quasi_momenta, |&q| {
        walk_operator_bloch(spec, q).eigenphases()
    });
    Ok(QuasiEnergySpectrum {
        quasi_momenta,
        bands,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn coin_and_rotation_entries() {
        let s = FRAC_1_SQRT_2;
        let w = coin_w().entries();
        assert_eq!(w, [[c(s, 0.0), c(0.0, s)], [c(0.0, s), c(s, 0.0)]]);
        assert!((coin_w().adjoint() * coin_w()).max_abs_diff(&Su2Matrix::IDENTITY) < 1e-15);
        assert!(coin_w().max_abs_diff(&crate::su2::waveplate(PI / 2.0, 0.0)) < 1e-15);

        let r = rotation_r();
        let (cs, sn) = ((PI / 8.0).cos(), (PI / 8.0).sin());
        assert!((r.entry(0, 0) - c(cs, 0.0)).norm() < 1e-15);
        assert!((r.entry(0, 1) - c(0.0, -sn)).norm() < 1e-15);
        assert!((r.entry(1, 0) - c(0.0, -sn)).norm() < 1e-15);
        assert!((r.adjoint() * r).max_abs_diff(&Su2Matrix::IDENTITY) < 1e-15);
        let p = crate::su2::pauli_decompose(&r);
        assert!((p.c[0] - c(cs, 0.0)).norm() < 1e-15);
        assert!((p.c[1] - c(0.0, -sn)).norm() < 1e-15);
        assert!(p.c[2].norm() < 1e-15 && p.c[3].norm() < 1e-15);
    }

    #[test]
    fn translation_examples() {
        for q in [0.0, 0.4, 2.0, -3.0] {
            assert!(translation_t_bloch(0.0, q).max_abs_diff(&Su2Matrix::IDENTITY) < 1e-15);
            let minus = Su2Matrix::IDENTITY.scale(c(-1.0, 0.0));
            assert!(translation_t_bloch(2.0 * PI, q).max_abs_diff(&minus) < 1e-15);
            let half = Su2Matrix::new([
                [c(0.0, 0.0), c(0.0, 1.0) * C64::from_polar(1.0, q)],
                [c(0.0, 1.0) * C64::from_polar(1.0, -q), c(0.0, 0.0)],
            ]);
            assert!(translation_t_bloch(PI, q).max_abs_diff(&half) < 1e-15);
            assert!(sqrt_translation_bloch(0.0, q).max_abs_diff(&Su2Matrix::IDENTITY) < 1e-15);
            assert_eq!(
                sqrt_translation_bloch(PI, q),
                translation_t_bloch(PI / 2.0, q)
            );
        }
    }

    #[test]
    fn step_operator_examples() {
        // T(pi)(0) W = [[0,i],[i,0]] (1/sqrt2)[[1,i],[i,1]] = (1/sqrt2)[[-1,i],[i,-1]].
        let u1 = ProtocolSpec::constant(Family::U1, PI, 1);
        let s = FRAC_1_SQRT_2;
        let expected = Su2Matrix::new([[c(-s, 0.0), c(0.0, s)], [c(0.0, s), c(-s, 0.0)]]);
        assert!(step_operator(&u1, 0, 0.0).unwrap().max_abs_diff(&expected) < 1e-15);

        let u3 = ProtocolSpec::constant(Family::U3, PI, 1);
        for q in [0.0, 1.3, 4.0] {
            let m = step_operator(&u3, 0, q).unwrap();
            assert!((m.det().norm() - 1.0).abs() < 1e-14);
        }
        let u2 = ProtocolSpec::constant(Family::U2, 0.0, 1);
        assert!(step_operator(&u2, 0, 0.7).unwrap().max_abs_diff(&coin_w()) < 1e-15);
        assert!(step_operator(&u2, 1, 0.7).is_err());
    }

    #[test]
    fn walk_operator_examples() {
        let zero = ProtocolSpec::constant(Family::U1, PI, 0);
        assert_eq!(walk_operator_bloch(&zero, 0.3), Su2Matrix::IDENTITY);

        let spec = ProtocolSpec::constant(Family::U1, PI, 20);
        for q in [0.0, 0.9, 2.2] {
            let step = step_operator(&spec, 0, q).unwrap();
            let expected = step.power(20).unwrap();
            assert!(walk_operator_bloch(&spec, q).max_abs_diff(&expected) < 1e-10);
        }

        // One step has cos E = -cos(q)/sqrt2, i.e. E = +-pi/2 at q = pi/2;
        // two steps land on -1 twice.
        let two = ProtocolSpec::constant(Family::U1, PI, 2);
        let (a, b) = walk_operator_bloch(&two, PI / 2.0).eigenphases();
        assert!((a - PI).abs() < 1e-12 && (b.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn constant_power_matches_product_for_long_walks() {
        let spec = ProtocolSpec::constant(Family::U3, PI, 320);
        for q in [0.1, 1.7, 5.9] {
            let step = step_operator(&spec, 0, q).unwrap();
            let mut acc = Su2Matrix::IDENTITY;
            for _ in 0..320 {
                acc = step * acc;
            }
            assert!(walk_operator_bloch(&spec, q).max_abs_diff(&acc) < 1e-10);
        }
    }

    #[test]
    fn quasienergy_examples() {
        let grid = BlochGrid::with_samples(5.0, 64).unwrap();
        let id = ProtocolSpec::constant(Family::Custom(vec![Factor::Translation]), 0.0, 1);
        let spectrum = quasienergy_map(&id, &grid).unwrap();
        assert!(spectrum.bands.iter().all(|&(a, b)| a == 0.0 && b == 0.0));

        let u1 = ProtocolSpec::constant(Family::U1, PI, 1);
        let spectrum = quasienergy_map(&u1, &grid).unwrap();
        for (&q, &(ep, em)) in spectrum.quasi_momenta.iter().zip(&spectrum.bands) {
            // Analytic trace of T(pi)(q) W is -sqrt2 cos q.
            let cos_e = -q.cos() / 2f64.sqrt();
            assert!((ep.cos() - cos_e).abs() < 1e-12);
            assert!((em.cos() - cos_e).abs() < 1e-12);
            assert!((ep + em).abs() < 1e-12);
            let shifted = walk_operator_bloch(&u1, q + 2.0 * PI).eigenphases();
            assert!((shifted.0 - ep).abs() < 1e-12 && (shifted.1 - em).abs() < 1e-12);
        }
        assert!(quasienergy_map(&ProtocolSpec::constant(Family::U1, PI, 2), &grid).is_err());
    }

    #[test]
    fn disorder_examples() {
        assert_eq!(disorder_schedule(9, 5, 1.0, 0.0), vec![1.0; 5]);
        assert_eq!(
            disorder_schedule(42, 100, PI, PI / 5.0),
            disorder_schedule(42, 100, PI, PI / 5.0)
        );
        assert_ne!(
            disorder_schedule(42, 100, PI, PI / 5.0),
            disorder_schedule(43, 100, PI, PI / 5.0)
        );

        let n = 100_000;
        let hw = PI / 5.0;
        let xs = disorder_schedule(7, n, PI, hw);
        let mean = xs.iter().sum::<f64>() / n as f64;
        // Uniform on [pi - hw, pi + hw] has standard deviation hw / sqrt3.
        let sigma_mean = hw / 3f64.sqrt() / (n as f64).sqrt();
        assert!((mean - PI).abs() < 3.0 * sigma_mean);
        assert!(xs.iter().all(|&x| (PI - hw..=PI + hw).contains(&x)));

        let two = Disorder {
            distribution: DisorderDistribution::TwoValued,
            ..Disorder::uniform(3, PI, hw)
        };
        assert!(two
            .schedule(50)
            .iter()
            .all(|&x| x == PI - hw || x == PI + hw));
    }

    #[test]
    fn spec_validation() {
        let mut spec = ProtocolSpec::constant(Family::U1, PI, 3);
        assert!(spec.validate().is_ok());
        spec.tau = 4;
        assert!(spec.validate().is_err());
        let d = ProtocolSpec::disordered(Family::U3, 10, Disorder::uniform(1, PI, 0.1)).unwrap();
        assert!(d.validate().is_ok());
        let mut bad = d.clone();
        bad.delta_schedule[3] = 0.0;
        assert!(bad.validate().is_err());
        assert!(ProtocolSpec::disordered(Family::U3, 10, Disorder::uniform(1, PI, -0.1)).is_err());
        assert!("U4".parse::<Family>().is_err());
        assert_eq!("U2".parse::<Family>().unwrap(), Family::U2);
    }

    #[test]
    fn grid_construction() {
        let g = BlochGrid::standard();
        assert_eq!(g.n_samples, 1250);
        assert!(BlochGrid::new(5.0, 0.0035).is_err());
        assert!((g.quasi_momentum(625) - PI).abs() < 1e-15);
    }

    #[test]
    fn fingerprint_tracks_schedule() {
        let a = ProtocolSpec::constant(Family::U1, PI, 20);
        let mut b = a.clone();
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.delta_schedule[7] += 1e-15;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    proptest! {
        #[test]
        fn sqrt_translation_squares_back(delta in -10.0f64..10.0, q in -10.0f64..10.0) {
            let r = sqrt_translation_bloch(delta, q);
            prop_assert!((r * r).max_abs_diff(&translation_t_bloch(delta, q)) < 1e-13);
        }

        #[test]
        fn steps_are_unitary_and_periodic(fam in 0usize..3, delta in 0.0f64..(2.0 * PI), q in -PI..PI) {
            let family = [Family::U1, Family::U2, Family::U3][fam].clone();
            let spec = ProtocolSpec::constant(family, delta, 3);
            let u = step_operator(&spec, 0, q).unwrap();
            prop_assert!(u.is_unitary(1e-12));
            let w = walk_operator_bloch(&spec, q);
            prop_assert!(w.max_abs_diff(&walk_operator_bloch(&spec, q + 2.0 * PI)) < 1e-13);
        }
    }
}
