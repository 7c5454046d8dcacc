//! Position-space walker evolution, the reference the compiled plates are
//! checked against.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::protocols::{walk_operator_bloch, BlochGrid, Factor, ProtocolSpec};

/// Tolerance on the norm of a user-supplied coin vector.
pub const COIN_NORM_TOL: f64 = 1e-8;
/// Extra sites allocated beyond the light cone.
pub const SITE_MARGIN: usize = 4;

/// Amplitudes `(alpha_m, beta_m)` for coin states `(|L>, |R>)` over sites
/// `-half_width..=half_width`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerState {
    half_width: usize,
    alpha: Vec<C64>,
    beta: Vec<C64>,
}

impl WalkerState {
    pub fn zeros(half_width: usize) -> Self {
        let n = 2 * half_width + 1;
        Self {
            half_width,
            alpha: vec![C64::new(0.0, 0.0); n],
            beta: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// All amplitude on site 0 with coin state `coin`.
    pub fn localized(coin: [C64; 2], half_width: usize) -> Result<Self> {
        let norm = (coin[0].norm_sqr() + coin[1].norm_sqr()).sqrt();
        if (norm - 1.0).abs() > COIN_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let mut s = Self::zeros(half_width);
        s.alpha[half_width] = coin[0];
        s.beta[half_width] = coin[1];
        Ok(s)
    }

    /// Localized input sized for `spec`: light cone plus [`SITE_MARGIN`].
    pub fn localized_for(coin: [C64; 2], spec: &ProtocolSpec) -> Result<Self> {
        Self::localized(coin, spec.light_cone() + SITE_MARGIN)
    }

    /// Build from per-site `(alpha, beta)` pairs for sites `-M..=M`.
    pub fn from_amplitudes(alpha: Vec<C64>, beta: Vec<C64>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.len().is_multiple_of(2) {
            return Err(Error::InvalidProtocol(
                "amplitude vectors must share an odd length".into(),
            ));
        }
        Ok(Self {
            half_width: alpha.len() / 2,
            alpha,
            beta,
        })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        let m = self.half_width as i64;
        -m..=m
    }

    pub fn alpha(&self) -> &[C64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[C64] {
        &self.beta
    }

    /// `(alpha_m, beta_m)`, zero outside the stored range.
    pub fn amplitude(&self, m: i64) -> [C64; 2] {
        match self.index(m) {
            Some(i) => [self.alpha[i], self.beta[i]],
            None => [C64::new(0.0, 0.0); 2],
        }
    }

    fn index(&self, m: i64) -> Option<usize> {
        let i = m + self.half_width as i64;
        (0..self.alpha.len() as i64)
            .contains(&i)
            .then_some(i as usize)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum()
    }

    /// Largest `|m|` carrying nonzero amplitude.
    pub fn support_radius(&self) -> usize {
        let h = self.half_width as i64;
        self.sites()
            .filter(|&m| {
                let [a, b] = self.amplitude(m);
                a != C64::new(0.0, 0.0) || b != C64::new(0.0, 0.0)
            })
            .map(|m| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
            .min(h as usize)
    }

    /// Same state on a wider site range.
    pub fn padded(&self, half_width: usize) -> Self {
        if half_width <= self.half_width {
            return self.clone();
        }
        let mut out = Self::zeros(half_width);
        let shift = half_width - self.half_width;
        out.alpha[shift..shift + self.alpha.len()].copy_from_slice(&self.alpha);
        out.beta[shift..shift + self.beta.len()].copy_from_slice(&self.beta);
        out
    }

    fn apply_coin(&mut self, u: &crate::su2::Su2Matrix) {
        for (a, b) in self.alpha.iter_mut().zip(self.beta.iter_mut()) {
            let [na, nb] = u.apply([*a, *b]);
            *a = na;
            *b = nb;
        }
    }

    /// `T(delta)`: `alpha'_m = c alpha_m + i s beta_{m-1}`,
    /// `beta'_m = i s alpha_{m+1} + c beta_m`.
    fn apply_translation(&mut self, delta: f64) {
        let (s, c) = (delta / 2.0).sin_cos();
        let hop = C64::new(0.0, s);
        let n = self.alpha.len();
        let old_alpha = self.alpha.clone();
        let old_beta = self.beta.clone();
        for i in 0..n {
            let from_left = if i > 0 {
                old_beta[i - 1]
            } else {
                C64::new(0.0, 0.0)
            };
            let from_right = if i + 1 < n {
                old_alpha[i + 1]
            } else {
                C64::new(0.0, 0.0)
            };
            self.alpha[i] = old_alpha[i] * c + hop * from_left;
            self.beta[i] = hop * from_right + old_beta[i] * c;
        }
    }

    fn apply_step(&mut self, factors: &[Factor], delta: f64) {
        for f in factors {
            match f.translation_delta(delta) {
                Some(d) => self.apply_translation(d),
                None => self.apply_coin(&f.coin_matrix().expect("coin factor")),
            }
        }
    }
}

fn check_range(state: &WalkerState, spec: &ProtocolSpec) -> Result<()> {
    let required = state.support_radius() + spec.light_cone();
    if state.half_width < required {
        return Err(Error::InsufficientSiteRange {
            required,
            available: state.half_width,
        });
    }
    Ok(())
}

/// Apply every step of `spec` in position space.
pub fn evolve(state0: &WalkerState, spec: &ProtocolSpec) -> Result<WalkerState> {
    evolve_observed(state0, spec, |_, _| {})
}

/// [`evolve`], calling `observe(step, state)` after each step (and with
/// step 0 for the input).
pub fn evolve_observed<F>(
    state0: &WalkerState,
    spec: &ProtocolSpec,
    mut observe: F,
) -> Result<WalkerState>
where
    F: FnMut(usize, &WalkerState),
{
    spec.validate()?;
    check_range(state0, spec)?;
    let factors = spec.family.factors();
    let mut state = state0.clone();
    observe(0, &state);
    for (i, &delta) in spec.delta_schedule.iter().enumerate() {
        state.apply_step(&factors, delta);
        observe(i + 1, &state);
    }
    Ok(state)
}

/// Site occupation probabilities `P(m)` over a contiguous site range.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityDistribution {
    first_site: i64,
    probs: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(first_site: i64, probs: Vec<f64>) -> Self {
        Self { first_site, probs }
    }

    /// Divide by the total; `None` when the total is zero.
    pub fn normalized(first_site: i64, mut probs: Vec<f64>) -> Option<Self> {
        let total: f64 = probs.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return None;
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Some(Self { first_site, probs })
    }

    pub fn first_site(&self) -> i64 {
        self.first_site
    }

    pub fn last_site(&self) -> i64 {
        self.first_site + self.probs.len() as i64 - 1
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        self.first_site..=self.last_site()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// `P(m)`, zero outside the stored range.
    pub fn get(&self, m: i64) -> f64 {
        let i = m - self.first_site;
        if i < 0 || i >= self.probs.len() as i64 {
            0.0
        } else {
            self.probs[i as usize]
        }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.first_site + i as i64, p))
    }

    /// Sites with `P(m) > threshold`.
    pub fn occupied_sites(&self, threshold: f64) -> usize {
        self.probs.iter().filter(|&&p| p > threshold).count()
    }

    /// `(1/2) sum |P - Q|` over the union of both ranges.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let lo = self.first_site.min(other.first_site);
        let hi = self.last_site().max(other.last_site());
        0.5 * (lo..=hi)
            .map(|m| (self.get(m) - other.get(m)).abs())
            .sum::<f64>()
    }
}

/// Marginalize the coin: `P(m) = |alpha_m|^2 + |beta_m|^2`.
pub fn distribution(state: &WalkerState) -> ProbabilityDistribution {
    let probs = state
        .alpha
        .iter()
        .zip(&state.beta)
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .collect();
    ProbabilityDistribution::new(-(state.half_width as i64), probs)
}

struct FourierPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FourierPair {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }
}

/// Coin spinors at `q_k = 2 pi k / n`: `psi(q) = sum_m psi_m e^{i m q}`.
pub fn to_quasi_momentum(state: &WalkerState, n: usize) -> Result<Vec<[C64; 2]>> {
    let occupied = 2 * state.support_radius() + 1;
    if n < occupied {
        return Err(Error::GridTooCoarse {
            samples: n,
            required: occupied,
        });
    }
    let fft = FourierPair::new(n);
    let mut a = vec![C64::new(0.0, 0.0); n];
    let mut b = vec![C64::new(0.0, 0.0); n];
    for m in state.sites() {
        let [am, bm] = state.amplitude(m);
        let j = m.rem_euclid(n as i64) as usize;
        a[j] += am;
        b[j] += bm;
    }
    // The unnormalized inverse transform carries the e^{+i m q} kernel.
    fft.inverse.process(&mut a);
    fft.inverse.process(&mut b);
    Ok(a.into_iter().zip(b).map(|(x, y)| [x, y]).collect())
}

/// Inverse of [`to_quasi_momentum`] onto sites `-half_width..=half_width`.
pub fn from_quasi_momentum(spinors: &[[C64; 2]], half_width: usize) -> Result<WalkerState> {
    let n = spinors.len();
    if n < 2 * half_width + 1 {
        return Err(Error::GridTooCoarse {
            samples: n,
            required: 2 * half_width + 1,
        });
    }
    let fft = FourierPair::new(n);
    let mut a: Vec<C64> = spinors.iter().map(|s| s[0]).collect();
    let mut b: Vec<C64> = spinors.iter().map(|s| s[1]).collect();
    fft.forward.process(&mut a);
    fft.forward.process(&mut b);
    let scale = 1.0 / n as f64;
    let mut out = WalkerState::zeros(half_width);
    for m in out.sites() {
        let j = m.rem_euclid(n as i64) as usize;
        let i = out.index(m).expect("site in range");
        out.alpha[i] = a[j] * scale;
        out.beta[i] = b[j] * scale;
    }
    Ok(out)
}

/// Evolve through quasi-momentum space: transform, multiply by the walk's
/// Bloch operator at every grid sample, transform back.
pub fn bloch_evolve(
    state0: &WalkerState,
    spec: &ProtocolSpec,
    grid: &BlochGrid,
) -> Result<WalkerState> {
    spec.validate()?;
    check_range(state0, spec)?;
    let final_radius = state0.support_radius() + spec.light_cone();
    let required = 2 * final_radius + 1;
    if grid.n_samples < required {
        return Err(Error::GridTooCoarse {
            samples: grid.n_samples,
            required,
        });
    }
    let spinors = to_quasi_momentum(state0, grid.n_samples)?;
    let evolved = crate::par::map_range(grid.n_samples, |k| {
        walk_operator_bloch(spec, grid.quasi_momentum(k)).apply(spinors[k])
    });
    from_quasi_momentum(&evolved, state0.half_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{Disorder, Family};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn left() -> [C64; 2] {
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    }

    fn diff(a: &WalkerState, b: &WalkerState) -> f64 {
        let h = a.half_width().max(b.half_width()) as i64;
        (-h..=h)
            .map(|m| {
                let [x, y] = a.amplitude(m);
                let [u, v] = b.amplitude(m);
                (x - u).norm_sqr() + (y - v).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn localized_inputs() {
        let s = WalkerState::localized(left(), 3).unwrap();
        assert_eq!(s.amplitude(0), left());
        assert_eq!(s.norm_sqr(), 1.0);
        let phi = 0.7;
        let lin = [
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::from_polar(FRAC_1_SQRT_2, phi),
        ];
        let s = WalkerState::localized(lin, 3).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(matches!(
            WalkerState::localized([C64::new(1.0, 0.0), C64::new(0.1, 0.0)], 3),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn evolve_examples() {
        let spec = ProtocolSpec::constant(Family::U1, PI, 0);
        let s = WalkerState::localized(left(), 2).unwrap();
        assert_eq!(evolve(&s, &spec).unwrap(), s);

        // One step of T(pi) W on |0,L>: W gives (|L> + i|R>)/sqrt2, then
        // T(pi) sends L -> R at m-1 and R -> L at m+1 with factor i.
        let spec = ProtocolSpec::constant(Family::U1, PI, 1);
        let s = WalkerState::localized_for(left(), &spec).unwrap();
        let out = evolve(&s, &spec).unwrap();
        let p = distribution(&out);
        assert!((p.get(-1) - 0.5).abs() < 1e-15 && (p.get(1) - 0.5).abs() < 1e-15);
        assert!(p.get(0) < 1e-30);
        let s2 = FRAC_1_SQRT_2;
        assert!((out.amplitude(1)[0] - C64::new(-s2, 0.0)).norm() < 1e-15);
        assert!((out.amplitude(-1)[1] - C64::new(0.0, s2)).norm() < 1e-15);
    }

    #[test]
    fn twenty_step_peaks_sit_near_ballistic_front() {
        // Group velocity max |dE/dq| of cos E = -cos q / sqrt2 is 1/sqrt2.
        let spec = ProtocolSpec::constant(Family::U1, PI, 20);
        let s = WalkerState::localized_for(left(), &spec).unwrap();
        let p = distribution(&evolve(&s, &spec).unwrap());
        let front = 20.0 * FRAC_1_SQRT_2;
        let argmax = |range: std::ops::RangeInclusive<i64>| {
            range
                .map(|m| (m, p.get(m)))
                .fold((0, -1.0), |best, x| if x.1 > best.1 { x } else { best })
                .0
        };
        let right = argmax(1..=20) as f64;
        let leftpk = argmax(-20..=-1) as f64;
        assert!((right - front).abs() <= 3.0, "right peak {right}");
        assert!((leftpk + front).abs() <= 3.0, "left peak {leftpk}");
        assert!((p.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn insufficient_range_is_rejected() {
        let spec = ProtocolSpec::constant(Family::U2, 1.0, 10);
        let s = WalkerState::localized(left(), 19).unwrap();
        assert!(matches!(
            evolve(&s, &spec),
            Err(Error::InsufficientSiteRange {
                required: 20,
                available: 19
            })
        ));
    }

    #[test]
    fn distribution_examples() {
        let s = WalkerState::localized(left(), 1).unwrap();
        assert_eq!(distribution(&s).get(0), 1.0);
        let h = FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let st = WalkerState::from_amplitudes(
            vec![C64::new(h, 0.0), z, z],
            vec![z, z, C64::new(h, 0.0)],
        )
        .unwrap();
        let p = distribution(&st);
        assert!((p.get(-1) - 0.5).abs() < 1e-15 && (p.get(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fourier_round_trip_pins_pairing() {
        let st = WalkerState::from_amplitudes(
            (0..7).map(|i| C64::new(i as f64, 0.5)).collect(),
            (0..7).map(|i| C64::new(-0.3, i as f64)).collect(),
        )
        .unwrap();
        let k = to_quasi_momentum(&st, 16).unwrap();
        // Site m = 1 alone maps to e^{i q}.
        let mut one = WalkerState::zeros(3);
        one.alpha[4] = C64::new(1.0, 0.0);
        let k1 = to_quasi_momentum(&one, 16).unwrap();
        let q = 2.0 * PI * 3.0 / 16.0;
        assert!((k1[3][0] - C64::from_polar(1.0, q)).norm() < 1e-14);
        let back = from_quasi_momentum(&k, 3).unwrap();
        assert!(diff(&back, &st) < 1e-12);
    }

    #[test]
    fn bloch_matches_position_space() {
        let cases = [
            ProtocolSpec::constant(Family::U1, PI, 20),
            ProtocolSpec::constant(Family::U2, 7.0 * PI / 4.0, 40),
            ProtocolSpec::constant(Family::U3, PI, 30),
            ProtocolSpec::disordered(Family::U3, 25, Disorder::uniform(5, PI, PI / 5.0)).unwrap(),
        ];
        for spec in &cases {
            let s = WalkerState::localized_for(left(), spec).unwrap();
            let grid = BlochGrid::with_samples(5.0, 2 * s.half_width() + 1).unwrap();
            let a = evolve(&s, spec).unwrap();
            let b = bloch_evolve(&s, spec, &grid).unwrap();
            assert!(diff(&a, &b) < 1e-9, "{}", spec.label());
        }
        let id = ProtocolSpec::constant(Family::Custom(vec![Factor::Translation]), 0.0, 3);
        let s = WalkerState::localized_for(left(), &id).unwrap();
        let grid = BlochGrid::with_samples(5.0, 64).unwrap();
        assert!(diff(&bloch_evolve(&s, &id, &grid).unwrap(), &s) < 1e-14);
    }

    #[test]
    fn bloch_rejects_coarse_grid() {
        let spec = ProtocolSpec::constant(Family::U1, PI, 20);
        let s = WalkerState::localized_for(left(), &spec).unwrap();
        let grid = BlochGrid::with_samples(5.0, 30).unwrap();
        assert!(matches!(
            bloch_evolve(&s, &spec, &grid),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
