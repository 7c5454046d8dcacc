//! Distribution similarity, coin tomography and entanglement entropy.
//!
//! Polarization projections in the circular basis `(|L>, |R>)`:
//!
//! | projection | vector            | Stokes | Pauli |
//! |------------|-------------------|--------|-------|
//! | H / V      | `(L +- R)/sqrt2`  | s1     | σ1    |
//! | D / A      | `(L +- iR)/sqrt2` | s2     | σ2    |
//! | L / R      | `L`, `R`          | s3     | σ3    |
//!
//! so that `rho_c = (I + s1 σ1 + s2 σ2 + s3 σ3) / 2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{evolve_observed, ProbabilityDistribution, WalkerState};
use crate::par;
use crate::protocols::{Disorder, Family, ProtocolSpec};

/// `(sum_m sqrt(P(m) Q(m)))^2` over the union of both site ranges.
pub fn similarity(p: &ProbabilityDistribution, q: &ProbabilityDistribution) -> f64 {
    let lo = p.first_site().min(q.first_site());
    let hi = p.last_site().max(q.last_site());
    let s: f64 = (lo..=hi).map(|m| (p.get(m) * q.get(m)).sqrt()).sum();
    s * s
}

/// Reduced coin state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinDensityMatrix {
    pub rho: [[C64; 2]; 2],
}

impl CoinDensityMatrix {
    pub fn trace(&self) -> f64 {
        self.rho[0][0].re + self.rho[1][1].re
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = (self.rho[0][1] - self.rho[1][0].conj()).norm();
        d.max(self.rho[0][0].im.abs()).max(self.rho[1][1].im.abs())
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.rho[0][0].re;
        let d = self.rho[1][1].re;
        let mean = (a + d) / 2.0;
        let r = ((a - d) / 2.0).hypot(self.rho[0][1].norm());
        [mean - r, mean + r]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.rho[i][j] - other.rho[i][j]).norm());
            }
        }
        m
    }

    pub fn stokes(&self) -> StokesVector {
        StokesVector {
            s1: 2.0 * self.rho[0][1].re,
            s2: -2.0 * self.rho[0][1].im,
            s3: self.rho[0][0].re - self.rho[1][1].re,
        }
    }
}

pub fn reduced_density_matrix(state: &WalkerState) -> CoinDensityMatrix {
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for (a, b) in state.alpha().iter().zip(state.beta()) {
        rho[0][0] += a * a.conj();
        rho[0][1] += a * b.conj();
        rho[1][1] += b * b.conj();
    }
    rho[1][0] = rho[0][1].conj();
    CoinDensityMatrix { rho }
}

/// Eigenvalues below this are numerical noise and treated as zero.
pub const EIGENVALUE_CLIP: f64 = 1e-10;

/// `-sum lambda log2 lambda`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &CoinDensityMatrix) -> f64 {
    rho.eigenvalues()
        .iter()
        .map(|&l| {
            let l = if (-EIGENVALUE_CLIP..0.0).contains(&l) {
                0.0
            } else {
                l
            };
            if l > 0.0 {
                -l * l.log2()
            } else {
                0.0
            }
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StokesVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn norm(&self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt()
    }

    pub fn density_matrix(&self) -> CoinDensityMatrix {
        CoinDensityMatrix {
            rho: [
                [
                    C64::new((1.0 + self.s3) / 2.0, 0.0),
                    C64::new(self.s1, -self.s2) / 2.0,
                ],
                [
                    C64::new(self.s1, self.s2) / 2.0,
                    C64::new((1.0 - self.s3) / 2.0, 0.0),
                ],
            ],
        }
    }
}

/// Total intensities behind the six polarization projections.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjectionIntensities {
    pub h: f64,
    pub v: f64,
    pub d: f64,
    pub a: f64,
    pub l: f64,
    pub r: f64,
}

impl ProjectionIntensities {
    pub fn as_array(&self) -> [f64; 6] {
        [self.h, self.v, self.d, self.a, self.l, self.r]
    }
}

/// Projector vectors in the order H, V, D, A, L, R.
pub fn projection_vectors() -> [[C64; 2]; 6] {
    let s = FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    [
        [re(s), re(s)],
        [re(s), re(-s)],
        [re(s), C64::new(0.0, s)],
        [re(s), C64::new(0.0, -s)],
        [re(1.0), re(0.0)],
        [re(0.0), re(1.0)],
    ]
}

/// Intensity of each projection summed over all walker sites.
pub fn simulate_projections(state: &WalkerState) -> ProjectionIntensities {
    let vecs = projection_vectors();
    let mut out = [0.0; 6];
    for (a, b) in state.alpha().iter().zip(state.beta()) {
        for (o, p) in out.iter_mut().zip(&vecs) {
            *o += (p[0].conj() * a + p[1].conj() * b).norm_sqr();
        }
    }
    let [h, v, d, a, l, r] = out;
    ProjectionIntensities { h, v, d, a, l, r }
}

/// Stokes parameters from the normalized projection differences.
pub fn stokes_from_projections(
    i: &ProjectionIntensities,
) -> Result<(StokesVector, CoinDensityMatrix)> {
    if i.as_array().iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::Measurement(
            "intensities must be finite and non-negative".into(),
        ));
    }
    let ratio = |p: f64, m: f64| {
        if p + m > 0.0 {
            Ok((p - m) / (p + m))
        } else {
            Err(Error::Measurement(
                "a projection pair has zero total intensity".into(),
            ))
        }
    };
    let mut s = StokesVector {
        s1: ratio(i.h, i.v)?,
        s2: ratio(i.d, i.a)?,
        s3: ratio(i.l, i.r)?,
    };
    let norm = s.norm();
    if norm > 1.0 + 1e-6 {
        return Err(Error::UnphysicalStokes { norm });
    }
    if norm > 1.0 {
        s.s1 /= norm;
        s.s2 /= norm;
        s.s3 /= norm;
    }
    Ok((s, s.density_matrix()))
}

/// `(|L> + e^{i phi} |R>) / sqrt2`: linear polarization at azimuth `phi`
/// on the Poincare sphere.
pub fn linear_input(phi: f64) -> [C64; 2] {
    [
        C64::new(FRAC_1_SQRT_2, 0.0),
        C64::from_polar(FRAC_1_SQRT_2, phi),
    ]
}

/// `n` linear inputs evenly spaced over `[0, 2 pi)`.
pub fn linear_inputs(n: usize) -> Vec<[C64; 2]> {
    (0..n)
        .map(|k| linear_input(2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// Walks sharing a family and mean parameter, optionally with step-to-step
/// disorder. Realization `r` uses seed `disorder.seed + r`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyEnsemble {
    pub family: Family,
    pub delta: f64,
    pub disorder: Option<Disorder>,
    pub n_realizations: usize,
}

impl EntropyEnsemble {
    pub fn ordered(family: Family, delta: f64) -> Self {
        Self {
            family,
            delta,
            disorder: None,
            n_realizations: 1,
        }
    }

    pub fn disordered(family: Family, disorder: Disorder, n_realizations: usize) -> Self {
        Self {
            family,
            delta: disorder.center,
            disorder: Some(disorder),
            n_realizations,
        }
    }

    pub fn realization(&self, r: usize, tau: usize) -> Result<ProtocolSpec> {
        match &self.disorder {
            None => Ok(ProtocolSpec::constant(self.family.clone(), self.delta, tau)),
            Some(d) => ProtocolSpec::disordered(
                self.family.clone(),
                tau,
                Disorder {
                    seed: d.seed.wrapping_add(r as u64),
                    ..*d
                },
            ),
        }
    }
}

/// Entropy after each requested step count; `samples[input][realization][i]`
/// belongs to `taus[i]`.
pub fn entropy_samples(
    ens: &EntropyEnsemble,
    inputs: &[[C64; 2]],
    taus: &[usize],
) -> Result<Vec<Vec<Vec<f64>>>> {
    if inputs.is_empty() || ens.n_realizations == 0 {
        return Err(Error::InvalidProtocol(
            "entropy ensembles need inputs and realizations".into(),
        ));
    }
    let tau_max = taus.iter().copied().max().unwrap_or(0);
    let n_real = ens.n_realizations;
    let flat = par::try_map_range(inputs.len() * n_real, |job| {
        let (i, r) = (job / n_real, job % n_real);
        let spec = ens.realization(r, tau_max)?;
        let state = WalkerState::localized_for(inputs[i], &spec)?;
        let mut at_step = vec![f64::NAN; tau_max + 1];
        evolve_observed(&state, &spec, |step, s| {
            if taus.contains(&step) {
                at_step[step] = von_neumann_entropy(&reduced_density_matrix(s));
            }
        })?;
        Ok::<_, Error>(taus.iter().map(|&t| at_step[t]).collect::<Vec<f64>>())
    })?;
    let mut out = Vec::with_capacity(inputs.len());
    let mut it = flat.into_iter();
    for _ in inputs {
        out.push(it.by_ref().take(n_real).collect());
    }
    Ok(out)
}

/// Mean entropy and its standard error at each step count.
///
/// With several realizations the error is taken across per-realization
/// means; a single realization uses the spread over inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyCurve {
    pub taus: Vec<usize>,
    pub mean: Vec<f64>,
    pub sem: Vec<f64>,
    pub n_samples: usize,
}

fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mu, 0.0);
    }
    let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1.0);
    (mu, (var / n).sqrt())
}

pub fn entropy_dynamics(
    ens: &EntropyEnsemble,
    inputs: &[[C64; 2]],
    taus: &[usize],
) -> Result<EntropyCurve> {
    let samples = entropy_samples(ens, inputs, taus)?;
    let n_real = ens.n_realizations;
    let mut mean = Vec::with_capacity(taus.len());
    let mut sem = Vec::with_capacity(taus.len());
    for i in 0..taus.len() {
        let units: Vec<f64> = if n_real > 1 {
            (0..n_real)
                .map(|r| {
                    samples.iter().map(|per_input| per_input[r][i]).sum::<f64>()
                        / inputs.len() as f64
                })
                .collect()
        } else {
            samples.iter().flatten().map(|v| v[i]).collect()
        };
        let (mu, se) = mean_sem(&units);
        mean.push(mu);
        sem.push(se);
    }
    Ok(EntropyCurve {
        taus: taus.to_vec(),
        mean,
        sem,
        n_samples: inputs.len() * n_real,
    })
}

/// Realization-averaged entropy at `tau` for each input.
pub fn entropy_per_input(
    ens: &EntropyEnsemble,
    inputs: &[[C64; 2]],
    tau: usize,
) -> Result<Vec<f64>> {
    let samples = entropy_samples(ens, inputs, &[tau])?;
    Ok(samples
        .iter()
        .map(|per_real| per_real.iter().map(|v| v[0]).sum::<f64>() / per_real.len() as f64)
        .collect())
}
