//! TOML run configuration. Every section except `[protocol]` is optional;
//! unknown keys are rejected.

use std::path::Path;

use num_complex::Complex64 as C64;
use qwalk_core::analysis::linear_input;
use qwalk_core::compiler::{FeasibilityParams, CONTINUITY_SAFETY};
use qwalk_core::optics::{CameraParams, OpticsParams, DEFAULT_OFFSET_HALF_WIDTH_MM};
use qwalk_core::protocols::{
    BlochGrid, Disorder, DisorderDistribution, Factor, Family, ProtocolSpec,
};
use serde::Deserialize;

use crate::angle::{parse_angle, Angle};
use crate::{CliError, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub feasibility: FeasibilityConfig,
    #[serde(default)]
    pub optics: OpticsConfig,
    #[serde(default)]
    pub camera: CameraConfig,
    #[serde(default)]
    pub misalignment: MisalignmentConfig,
    #[serde(default)]
    pub entropy: EntropyConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// `U1`, `U2` or `U3`.
    pub family: Option<String>,
    /// Factor symbols in application order, e.g. `["W", "T"]`.
    pub custom: Option<Vec<String>>,
    pub delta: Angle,
    pub tau: usize,
    #[serde(default = "one")]
    pub stages: usize,
    /// Explicit stage lengths; overrides `stages`.
    pub stage_lengths: Option<Vec<usize>>,
    pub disorder: Option<DisorderConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    /// Defaults to the run seed.
    pub seed: Option<u64>,
    /// Defaults to the protocol's `delta`.
    pub center: Option<Angle>,
    pub half_width: Angle,
    #[serde(default)]
    pub distribution: DisorderDistribution,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub bz_length_mm: f64,
    pub pitch_um: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            bz_length_mm: 5.0,
            pitch_um: 4.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeasibilityConfig {
    pub wavelength_nm: f64,
    pub min_fab_period_um: f64,
    pub per_plate_transmittance: f64,
    pub continuity_safety: f64,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        let d = FeasibilityParams::default();
        Self {
            wavelength_nm: d.wavelength_nm,
            min_fab_period_um: d.min_fab_period_um,
            per_plate_transmittance: d.per_plate_transmittance,
            continuity_safety: CONTINUITY_SAFETY,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticsConfig {
    pub window_periods: usize,
    pub pitch_um: f64,
    /// Defaults to the Brillouin-zone length.
    pub waist_mm: Option<f64>,
    /// `L`, `R`, `H`, `V`, `D`, `A` or `linear:<angle>`.
    pub input: String,
    /// Tune every plate to a full wave (calibration run).
    pub off: bool,
    /// Defaults to the light cone plus a margin.
    pub max_mode: Option<usize>,
    /// Required optics-vs-oracle similarity without misalignment.
    pub min_similarity: f64,
    /// Pattern files to load instead of compiling, one per stage.
    pub pattern_files: Vec<String>,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self {
            window_periods: 8,
            pitch_um: 2.0,
            waist_mm: None,
            input: "L".into(),
            off: false,
            max_mode: None,
            min_similarity: 0.999,
            pattern_files: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraConfig {
    pub spot_spacing: usize,
    pub spot_sigma: f64,
    pub margin: usize,
    pub height: usize,
    pub noise_floor: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        let d = CameraParams::default();
        Self {
            spot_spacing: d.spot_spacing,
            spot_sigma: d.spot_sigma,
            margin: d.margin,
            height: d.height,
            noise_floor: d.noise_floor,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MisalignmentConfig {
    /// Zero disables the study.
    pub repeats: usize,
    pub half_width_um: f64,
    /// Added to the retardation of every plate in the simulated stack.
    pub retardation_error: Angle,
}

impl Default for MisalignmentConfig {
    fn default() -> Self {
        Self {
            repeats: 0,
            half_width_um: DEFAULT_OFFSET_HALF_WIDTH_MM * 1e3,
            retardation_error: Angle(0.0),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyConfig {
    /// Step count of the input sweep; defaults to the protocol's `tau`.
    pub tau: Option<usize>,
    /// Linear inputs `phi = 2 pi k / n` for the sweep.
    pub phi_inputs: usize,
    /// Linear inputs averaged in the entropy-vs-steps curves.
    pub curve_inputs: usize,
    pub realizations: usize,
    pub curve_step: usize,
    pub threshold: f64,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self {
            tau: None,
            phi_inputs: 10,
            curve_inputs: 100,
            realizations: 10,
            curve_step: 1,
            threshold: 0.98,
        }
    }
}

fn one() -> usize {
    1
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        match (&self.protocol.family, &self.protocol.custom) {
            (Some(_), Some(_)) => {
                return bad("protocol: give either `family` or `custom`, not both".into())
            }
            (None, None) => return bad("protocol: missing `family`".into()),
            _ => {}
        }
        if self.protocol.stages == 0 {
            return bad("protocol.stages must be at least 1".into());
        }
        if self.grid.bz_length_mm <= 0.0 || self.grid.pitch_um <= 0.0 {
            return bad("grid lengths must be positive".into());
        }
        let f = &self.feasibility;
        if f.wavelength_nm <= 0.0 || f.min_fab_period_um <= 0.0 || f.continuity_safety <= 0.0 {
            return bad("feasibility parameters must be positive".into());
        }
        if !(0.0..=1.0).contains(&f.per_plate_transmittance) {
            return bad("feasibility.per_plate_transmittance must lie in [0, 1]".into());
        }
        if self.misalignment.repeats == 1 {
            return bad("misalignment.repeats must be 0 or at least 2".into());
        }
        if self.entropy.phi_inputs == 0
            || self.entropy.curve_inputs == 0
            || self.entropy.realizations == 0
        {
            return bad("entropy counts must be positive".into());
        }
        if self.entropy.curve_step == 0 {
            return bad("entropy.curve_step must be positive".into());
        }
        self.input_polarization()?;
        self.family()?;
        Ok(())
    }

    pub fn family(&self) -> Result<Family> {
        if let Some(name) = &self.protocol.family {
            return Ok(name.parse()?);
        }
        let factors = self
            .protocol
            .custom
            .as_ref()
            .expect("checked")
            .iter()
            .map(|s| s.parse::<Factor>())
            .collect::<qwalk_core::Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(CliError::Config("protocol.custom is empty".into()));
        }
        Ok(Family::Custom(factors))
    }

    pub fn disorder(&self, seed: u64) -> Option<Disorder> {
        self.protocol.disorder.as_ref().map(|d| Disorder {
            seed: d.seed.unwrap_or(seed),
            center: d.center.map_or(self.protocol.delta.0, |c| c.0),
            half_width: d.half_width.0,
            distribution: d.distribution,
        })
    }

    pub fn spec(&self, seed: u64) -> Result<ProtocolSpec> {
        let family = self.family()?;
        let spec = match self.disorder(seed) {
            Some(d) => ProtocolSpec::disordered(family, self.protocol.tau, d)?,
            None => ProtocolSpec::constant(family, self.protocol.delta.0, self.protocol.tau),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn grid(&self) -> Result<BlochGrid> {
        Ok(BlochGrid::new(
            self.grid.bz_length_mm,
            self.grid.pitch_um * 1e-3,
        )?)
    }

    pub fn feasibility_params(&self) -> FeasibilityParams {
        FeasibilityParams {
            wavelength_nm: self.feasibility.wavelength_nm,
            min_fab_period_um: self.feasibility.min_fab_period_um,
            per_plate_transmittance: self.feasibility.per_plate_transmittance,
            n_plates: 3,
            continuity_safety: self.feasibility.continuity_safety,
        }
    }

    pub fn optics_params(&self, grid: &BlochGrid) -> OpticsParams {
        OpticsParams {
            period_mm: grid.bz_length_mm,
            window_periods: self.optics.window_periods,
            pitch_um: self.optics.pitch_um,
            waist_mm: self.optics.waist_mm.unwrap_or(grid.bz_length_mm),
            wavelength_nm: self.feasibility.wavelength_nm,
        }
    }

    pub fn camera_params(&self, seed: u64) -> CameraParams {
        CameraParams {
            spot_spacing: self.camera.spot_spacing,
            spot_sigma: self.camera.spot_sigma,
            margin: self.camera.margin,
            height: self.camera.height,
            noise_floor: self.camera.noise_floor,
            seed,
        }
    }

    pub fn input_polarization(&self) -> Result<[C64; 2]> {
        parse_polarization(&self.optics.input)
    }

    /// Stage lengths from `--stages`, the config, or a single stage.
    pub fn stage_lengths(&self, override_stages: Option<usize>) -> Result<Vec<usize>> {
        let tau = self.protocol.tau;
        if let Some(k) = override_stages {
            return even_split(tau, k);
        }
        if let Some(lengths) = &self.protocol.stage_lengths {
            if lengths.iter().sum::<usize>() != tau || lengths.is_empty() {
                return Err(CliError::Config(format!(
                    "protocol.stage_lengths {lengths:?} do not add up to tau = {tau}"
                )));
            }
            return Ok(lengths.clone());
        }
        even_split(tau, self.protocol.stages)
    }
}

fn even_split(tau: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 || !tau.is_multiple_of(k) {
        return Err(CliError::Config(format!(
            "cannot split {tau} steps into {k} equal stages; list protocol.stage_lengths instead"
        )));
    }
    Ok(vec![tau / k; k])
}

pub fn parse_polarization(text: &str) -> Result<[C64; 2]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    let v = match text.trim() {
        "L" => [re(1.0), re(0.0)],
        "R" => [re(0.0), re(1.0)],
        "H" => [re(s), re(s)],
        "V" => [re(s), re(-s)],
        "D" => [re(s), C64::new(0.0, s)],
        "A" => [re(s), C64::new(0.0, -s)],
        other => match other.strip_prefix("linear:") {
            Some(phi) => linear_input(parse_angle(phi).map_err(CliError::Config)?),
            None => {
                return Err(CliError::Config(format!(
                    "optics.input `{other}` is not L, R, H, V, D, A or linear:<angle>"
                )))
            }
        },
    };
    Ok(v)
}
