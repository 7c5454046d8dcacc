//! One-dimensional wave-optics model of the plate stack.
//!
//! A Gaussian beam carries the coin in its circular polarization. Each plate
//! multiplies the field pointwise by a waveplate Jones matrix whose axis
//! follows the compiled pattern, the far field is computed with an FFT, and
//! the walker site `m` is read from the overlap with the Gaussian envelope
//! centered at transverse momentum `2 pi m / Lambda`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::compiler::{PlatePatternSet, PLATE_RETARDATIONS};
use crate::error::{Error, Result};
use crate::lattice::ProbabilityDistribution;
use crate::par;
use crate::protocols::BlochGrid;
use crate::su2::waveplate;

/// Default half-width of random per-plate offsets (one minimum feature).
pub const DEFAULT_OFFSET_HALF_WIDTH_MM: f64 = 0.020;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpticsParams {
    /// Transverse period of the patterns.
    pub period_mm: f64,
    /// Window length in units of the period.
    pub window_periods: usize,
    pub pitch_um: f64,
    pub waist_mm: f64,
    pub wavelength_nm: f64,
}

impl OpticsParams {
    /// Eight-period window at 2 um pitch with `w0 = Lambda`.
    pub fn for_grid(grid: &BlochGrid) -> Self {
        Self {
            period_mm: grid.bz_length_mm,
            window_periods: 8,
            pitch_um: 2.0,
            waist_mm: grid.bz_length_mm,
            wavelength_nm: 633.0,
        }
    }

    pub fn window_mm(&self) -> f64 {
        self.period_mm * self.window_periods as f64
    }

    pub fn samples_per_period(&self) -> Result<usize> {
        let n = self.period_mm * 1e3 / self.pitch_um;
        if self.pitch_um <= 0.0 || n < 1.0 || (n - n.round()).abs() > 1e-6 {
            return Err(Error::Optics(format!(
                "pitch {} um does not divide the period {} mm",
                self.pitch_um, self.period_mm
            )));
        }
        Ok(n.round() as usize)
    }

    pub fn n_samples(&self) -> Result<usize> {
        Ok(self.samples_per_period()? * self.window_periods)
    }

    /// Half-width, in FFT bins, of the mode projection window.
    fn projection_half_span(&self) -> usize {
        let sigma_bins = self.window_mm() / (PI * self.waist_mm) * std::f64::consts::SQRT_2;
        (6.0 * sigma_bins).ceil() as usize
    }

    /// Largest `|m|` whose projection window stays below Nyquist.
    pub fn max_resolvable_mode(&self) -> Result<usize> {
        let half = self.n_samples()? / 2;
        let span = self.projection_half_span();
        Ok(half.saturating_sub(span + 1) / self.window_periods)
    }
}

/// Sampled transverse field in the circular basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalField {
    pub params: OpticsParams,
    pub x0_mm: f64,
    pub dx_mm: f64,
    pub samples: Vec<[C64; 2]>,
}

impl OpticalField {
    pub fn x_mm(&self, j: usize) -> f64 {
        self.x0_mm + j as f64 * self.dx_mm
    }

    pub fn power(&self) -> f64 {
        self.samples
            .iter()
            .map(|[l, r]| l.norm_sqr() + r.norm_sqr())
            .sum()
    }

    /// Power in each circular component.
    pub fn component_powers(&self) -> [f64; 2] {
        let mut p = [0.0; 2];
        for s in &self.samples {
            p[0] += s[0].norm_sqr();
            p[1] += s[1].norm_sqr();
        }
        p
    }
}

/// Gaussian beam `exp(-x^2/w0^2)` with uniform polarization, unit power.
pub fn prepare_input(polarization: [C64; 2], params: &OpticsParams) -> Result<OpticalField> {
    let norm = polarization[0].norm_sqr() + polarization[1].norm_sqr();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm });
    }
    if params.window_mm() < 6.0 * params.waist_mm {
        return Err(Error::Optics(format!(
            "window {} mm is smaller than 6 w0 = {} mm",
            params.window_mm(),
            6.0 * params.waist_mm
        )));
    }
    if params.waist_mm < params.period_mm {
        log::warn!(
            "waist {} mm below the period {} mm: modes overlap",
            params.waist_mm,
            params.period_mm
        );
    }
    let n = params.n_samples()?;
    let dx = params.pitch_um * 1e-3;
    let x0 = -params.window_mm() / 2.0;
    let env: Vec<f64> = (0..n)
        .map(|j| {
            let x = x0 + j as f64 * dx;
            (-(x * x) / (params.waist_mm * params.waist_mm)).exp()
        })
        .collect();
    let scale = 1.0 / env.iter().map(|e| e * e).sum::<f64>().sqrt();
    let samples = env
        .iter()
        .map(|&e| [polarization[0] * e * scale, polarization[1] * e * scale])
        .collect();
    Ok(OpticalField {
        params: *params,
        x0_mm: x0,
        dx_mm: dx,
        samples,
    })
}

/// Periodic linear interpolation of a plate profile. Neighbouring samples
/// are first brought within pi/2 of each other, since the axis is only
/// defined mod pi.
pub fn interpolate_angle(theta: &[f64], grid: &BlochGrid, x_mm: f64) -> f64 {
    let n = theta.len();
    let u = x_mm.rem_euclid(grid.bz_length_mm) / grid.pitch_mm;
    let k0 = (u.floor() as usize).min(n - 1);
    let frac = u - k0 as f64;
    let a = theta[k0];
    let mut b = theta[(k0 + 1) % n];
    b += PI * ((a - b) / PI).round();
    a + frac * (b - a)
}

/// Multiply the field by the waveplate `Q_delta(theta(x - shift))`.
pub fn apply_plate(
    field: &mut OpticalField,
    theta: &[f64],
    grid: &BlochGrid,
    delta: f64,
    shift_mm: f64,
) {
    let x0 = field.x0_mm;
    let dx = field.dx_mm;
    let new: Vec<[C64; 2]> = par::map_range(field.samples.len(), |j| {
        let x = x0 + j as f64 * dx;
        let th = interpolate_angle(theta, grid, x - shift_mm);
        waveplate(delta, th).apply(field.samples[j])
    });
    field.samples = new;
}

/// Plates of one or more cascaded stages, with optional per-plate shifts.
#[derive(Clone, Debug)]
pub struct OpticalSetup {
    pub stages: Vec<PlatePatternSet>,
    pub retardations: [f64; 3],
    /// Transverse shift of every plate, one triple per stage.
    pub offsets_mm: Vec<[f64; 3]>,
}

impl OpticalSetup {
    pub fn new(stages: Vec<PlatePatternSet>) -> Self {
        let offsets_mm = vec![[0.0; 3]; stages.len()];
        Self {
            stages,
            retardations: PLATE_RETARDATIONS,
            offsets_mm,
        }
    }

    /// All plates tuned to a full-wave retardation: the beam passes unchanged.
    pub fn off(stages: Vec<PlatePatternSet>) -> Self {
        Self {
            retardations: [2.0 * PI; 3],
            ..Self::new(stages)
        }
    }

    pub fn with_offsets(mut self, offsets_mm: Vec<[f64; 3]>) -> Result<Self> {
        if offsets_mm.len() != self.stages.len() {
            return Err(Error::Optics(format!(
                "{} offset triples for {} stages",
                offsets_mm.len(),
                self.stages.len()
            )));
        }
        self.offsets_mm = offsets_mm;
        Ok(self)
    }

    pub fn propagate(&self, field: &mut OpticalField) {
        for (stage, offsets) in self.stages.iter().zip(&self.offsets_mm) {
            for ((theta, &delta), &shift) in stage.theta.iter().zip(&self.retardations).zip(offsets)
            {
                apply_plate(field, theta, &stage.grid, delta, shift);
            }
        }
    }
}

/// Unitary discrete spectrum, with bin `j` at `k = 2 pi j / X` and the
/// window offset phase removed.
pub fn spectrum(field: &OpticalField) -> Vec<[C64; 2]> {
    let n = field.samples.len();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut comps: Vec<Vec<C64>> = (0..2)
        .map(|c| field.samples.iter().map(|s| s[c]).collect())
        .collect();
    for buf in &mut comps {
        fft.process(buf);
    }
    let window = field.params.window_mm();
    (0..n)
        .map(|j| {
            let signed = if j <= n / 2 {
                j as f64
            } else {
                j as f64 - n as f64
            };
            let k = 2.0 * PI * signed / window;
            let phase = C64::from_polar(scale, -k * field.x0_mm);
            [comps[0][j] * phase, comps[1][j] * phase]
        })
        .collect()
}

/// Polarization-resolved amplitudes of the walker sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeAmplitudes {
    pub first_mode: i64,
    pub amplitudes: Vec<[C64; 2]>,
}

impl ModeAmplitudes {
    pub fn modes(&self) -> RangeInclusive<i64> {
        self.first_mode..=self.first_mode + self.amplitudes.len() as i64 - 1
    }

    pub fn get(&self, m: i64) -> [C64; 2] {
        let i = m - self.first_mode;
        if i < 0 || i as usize >= self.amplitudes.len() {
            [C64::new(0.0, 0.0); 2]
        } else {
            self.amplitudes[i as usize]
        }
    }

    pub fn total_power(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|[l, r]| l.norm_sqr() + r.norm_sqr())
            .sum()
    }

    pub fn distribution(&self) -> ProbabilityDistribution {
        ProbabilityDistribution::new(
            self.first_mode,
            self.amplitudes
                .iter()
                .map(|[l, r]| l.norm_sqr() + r.norm_sqr())
                .collect(),
        )
    }
}

/// Project the far field onto modes `-max_mode..=max_mode` and normalize.
pub fn far_field(field: &OpticalField, max_mode: usize) -> Result<ModeAmplitudes> {
    let raw = project_modes(field, max_mode)?;
    let total = raw.total_power();
    if total <= 0.0 {
        return Err(Error::ZeroIntensity);
    }
    let s = 1.0 / total.sqrt();
    Ok(ModeAmplitudes {
        first_mode: raw.first_mode,
        amplitudes: raw.amplitudes.iter().map(|[l, r]| [l * s, r * s]).collect(),
    })
}

fn project_modes(field: &OpticalField, max_mode: usize) -> Result<ModeAmplitudes> {
    let p = &field.params;
    let limit = p.max_resolvable_mode()?;
    if max_mode > limit {
        return Err(Error::Aliasing {
            mode: max_mode as i64,
            limit: limit as i64,
        });
    }
    let spec = spectrum(field);
    let n = spec.len() as i64;
    let span = p.projection_half_span() as i64;
    let bin_k = 2.0 * PI / p.window_mm();
    let weights: Vec<f64> = (-span..=span)
        .map(|d| {
            let dk = d as f64 * bin_k;
            (-dk * dk * p.waist_mm * p.waist_mm / 4.0).exp()
        })
        .collect();
    let wnorm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let periods = p.window_periods as i64;
    let m0 = -(max_mode as i64);
    let amplitudes = par::map_range(2 * max_mode + 1, |i| {
        let centre = (m0 + i as i64) * periods;
        let mut acc = [C64::new(0.0, 0.0); 2];
        for (w, d) in weights.iter().zip(-span..=span) {
            let bin = (centre + d).rem_euclid(n) as usize;
            acc[0] += spec[bin][0] * (w / wnorm);
            acc[1] += spec[bin][1] * (w / wnorm);
        }
        acc
    });
    Ok(ModeAmplitudes {
        first_mode: m0,
        amplitudes,
    })
}

/// Power leaking into mode 1 when only mode 0 is excited, relative to the
/// mode-0 power.
pub fn adjacent_mode_crosstalk(params: &OpticsParams) -> Result<f64> {
    let field = prepare_input([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], params)?;
    let modes = project_modes(&field, 1)?;
    Ok(modes.distribution().get(1) / modes.distribution().get(0))
}

/// Input beam through the setup, read out as mode amplitudes.
pub fn simulate(
    setup: &OpticalSetup,
    polarization: [C64; 2],
    params: &OpticsParams,
    max_mode: usize,
) -> Result<ModeAmplitudes> {
    let mut field = prepare_input(polarization, params)?;
    setup.propagate(&mut field);
    far_field(&field, max_mode)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraParams {
    pub spot_spacing: usize,
    pub spot_sigma: f64,
    /// Pixels between the outermost spot centres and the image edge.
    pub margin: usize,
    pub height: usize,
    /// Peak of the uniform additive noise, relative to a unit-power spot's
    /// peak pixel. Zero disables noise.
    pub noise_floor: f64,
    pub seed: u64,
}

impl Default for CameraParams {
    fn default() -> Self {
        Self {
            spot_spacing: 12,
            spot_sigma: 1.5,
            margin: 12,
            height: 25,
            noise_floor: 0.0,
            seed: 0,
        }
    }
}

/// Fraction of a sampled spot inside the 5x5 integration box.
pub fn box_capture_fraction(sigma: f64) -> f64 {
    let radius = stamp_radius(sigma);
    let g = |d: i64| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp();
    let inner: f64 = (-2..=2).map(g).sum();
    let outer: f64 = (-radius..=radius).map(g).sum();
    (inner / outer).powi(2)
}

fn stamp_radius(sigma: f64) -> i64 {
    (5.0 * sigma).ceil().max(2.0) as i64
}

#[derive(Clone, Debug, PartialEq)]
pub struct CameraImage {
    pub width: usize,
    pub height: usize,
    /// Row-major intensities.
    pub pixels: Vec<f64>,
    /// Pixel of site 0.
    pub origin: (usize, usize),
    pub spot_spacing: usize,
}

impl CameraImage {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn total(&self) -> f64 {
        self.pixels.iter().sum()
    }

    /// Brightest pixel; the first one in row-major order on ties.
    pub fn brightest(&self) -> (usize, usize) {
        let (i, _) =
            self.pixels
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                    if v > best.1 {
                        (i, v)
                    } else {
                        best
                    }
                });
        (i % self.width, i / self.width)
    }

    /// Sites whose spot centres fall inside the image.
    pub fn sites(&self) -> RangeInclusive<i64> {
        let s = self.spot_spacing as i64;
        let ox = self.origin.0 as i64;
        let lo = -(ox / s);
        let hi = (self.width as i64 - 1 - ox) / s;
        lo..=hi
    }

    /// Binary PGM, 16 bits per pixel, scaled so the brightest pixel is 65535.
    pub fn to_pgm16(&self) -> Vec<u8> {
        let max = self.pixels.iter().copied().fold(0.0, f64::max);
        let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };
        let mut out = format!("P5\n{} {}\n65535\n", self.width, self.height).into_bytes();
        for &v in &self.pixels {
            let q = (v * scale).round().clamp(0.0, 65535.0) as u16;
            out.extend_from_slice(&q.to_be_bytes());
        }
        out
    }
}

/// Sampled Gaussian spots along one row, one per site, each carrying the
/// site's probability.
pub fn render_camera(dist: &ProbabilityDistribution, cam: &CameraParams) -> Result<CameraImage> {
    if cam.spot_spacing == 0 || cam.spot_sigma <= 0.0 {
        return Err(Error::Optics(
            "spot spacing and width must be positive".into(),
        ));
    }
    let capture = box_capture_fraction(cam.spot_sigma);
    if capture < 0.99 {
        log::warn!(
            "5x5 box captures {:.1}% of a spot with sigma {} px",
            100.0 * capture,
            cam.spot_sigma
        );
    }
    let radius = stamp_radius(cam.spot_sigma);
    if (cam.margin as i64) < radius || (cam.height as i64) < 2 * radius + 1 {
        return Err(Error::Optics(format!(
            "margin {} px and height {} px cannot hold spots of radius {radius} px",
            cam.margin, cam.height
        )));
    }
    let n_sites = dist.probabilities().len();
    let width = (n_sites.max(1) - 1) * cam.spot_spacing + 2 * cam.margin + 1;
    let height = cam.height;
    let origin = (
        cam.margin + (-dist.first_site()) as usize * cam.spot_spacing,
        height / 2,
    );

    let g = |d: i64| (-(d * d) as f64 / (2.0 * cam.spot_sigma * cam.spot_sigma)).exp();
    let profile: Vec<f64> = (-radius..=radius).map(g).collect();
    let z: f64 = profile.iter().sum::<f64>().powi(2);

    let mut pixels = vec![0.0; width * height];
    for (i, p) in dist.probabilities().iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let cx = (cam.margin + i * cam.spot_spacing) as i64;
        let cy = origin.1 as i64;
        for (dy, gy) in (-radius..=radius).zip(&profile) {
            let row = (cy + dy) as usize * width;
            for (dx, gx) in (-radius..=radius).zip(&profile) {
                pixels[row + (cx + dx) as usize] += p * gx * gy / z;
            }
        }
    }
    if cam.noise_floor > 0.0 {
        let peak = 1.0 / z;
        let mut rng = ChaCha8Rng::seed_from_u64(cam.seed);
        for v in &mut pixels {
            *v += rng.random_range(0.0..cam.noise_floor * peak);
        }
    }
    Ok(CameraImage {
        width,
        height,
        pixels,
        origin,
        spot_spacing: cam.spot_spacing,
    })
}

/// Sum a 5x5 box around each site's spot and normalize to the total.
pub fn extract_distribution(
    image: &CameraImage,
    origin: (usize, usize),
    spot_spacing: usize,
    sites: RangeInclusive<i64>,
) -> Result<ProbabilityDistribution> {
    let first = *sites.start();
    let mut raw = Vec::new();
    for m in sites {
        let cx = origin.0 as i64 + m * spot_spacing as i64;
        let cy = origin.1 as i64;
        if cx < 2 || cy < 2 || cx + 2 >= image.width as i64 || cy + 2 >= image.height as i64 {
            return Err(Error::SpotOutOfBounds { site: m });
        }
        let mut sum = 0.0;
        for y in (cy - 2)..=(cy + 2) {
            for x in (cx - 2)..=(cx + 2) {
                sum += image.get(x as usize, y as usize);
            }
        }
        raw.push(sum);
    }
    ProbabilityDistribution::normalized(first, raw).ok_or(Error::ZeroIntensity)
}

/// Origin calibration: with every plate off, only site 0 lights up.
pub fn calibrate_origin(off_image: &CameraImage) -> (usize, usize) {
    off_image.brightest()
}

/// Independent uniform shifts in `[-half_width, half_width]` for every
/// plate of every stage, one set per repeat.
pub fn random_offsets(
    seed: u64,
    repeats: usize,
    n_stages: usize,
    half_width_mm: f64,
) -> Vec<Vec<[f64; 3]>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..repeats)
        .map(|_| {
            (0..n_stages)
                .map(|_| {
                    let mut draw = || {
                        if half_width_mm > 0.0 {
                            rng.random_range(-half_width_mm..=half_width_mm)
                        } else {
                            0.0
                        }
                    };
                    [draw(), draw(), draw()]
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MisalignmentStudy {
    pub mean: ProbabilityDistribution,
    /// Standard error of the mean, per site of `mean`.
    pub sem: Vec<f64>,
    pub runs: Vec<ProbabilityDistribution>,
}

pub fn misalignment_study(
    setup: &OpticalSetup,
    polarization: [C64; 2],
    params: &OpticsParams,
    offsets: &[Vec<[f64; 3]>],
    max_mode: usize,
) -> Result<MisalignmentStudy> {
    if offsets.len() < 2 {
        return Err(Error::Optics(
            "a misalignment study needs at least 2 repeats".into(),
        ));
    }
    let runs = par::try_map_range(offsets.len(), |i| {
        let shifted = setup.clone().with_offsets(offsets[i].clone())?;
        Ok::<_, Error>(simulate(&shifted, polarization, params, max_mode)?.distribution())
    })?;
    let n = runs.len() as f64;
    let first = runs[0].first_site();
    let len = runs[0].probabilities().len();
    let mut mean = vec![0.0; len];
    let mut sem = vec![0.0; len];
    for (i, m) in (first..).take(len).enumerate() {
        let vals: Vec<f64> = runs.iter().map(|r| r.get(m)).collect();
        let mu = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1.0);
        mean[i] = mu;
        sem[i] = (var / n).sqrt();
    }
    Ok(MisalignmentStudy {
        mean: ProbabilityDistribution::new(first, mean),
        sem,
        runs,
    })
}
