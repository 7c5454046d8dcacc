//! Waveplate-angle compiler.
//!
//! The plate sequence `Q_{pi/2}(t3) Q_pi(t2) Q_{pi/2}(t1)` has Pauli components
//!
//! ```text
//! l0 = -cos(b) cos(g)      l1 =  i sin(a) sin(g)
//! l2 = -i cos(a) sin(g)    l3 = -i sin(b) cos(g)
//! ```
//!
//! with `a = t1 + t3`, `b = t1 - t3`, `g = t1 - 2 t2 + t3`. For a target with
//! unit determinant the four real numbers `x = (-c0, -i c1, i c2, i c3)` lie
//! on the unit 3-sphere and split into the two planar vectors
//! `cos(g) (cos b, sin b) = (x0, x3)` and `sin(g) (cos a, sin a) = (x2, x1)`.
//! Choosing the signs of `cos g` and `sin g`, and the sign of the target
//! itself (a global phase of -1), gives eight analytic candidates per sample.
//! Pairs of them coincide once the angles are reduced mod pi, which is how
//! the plates see them.
//!
//! [`select_continuous_branch`] then walks the grid and keeps the candidate
//! closest (mod pi, worst plate) to the previous choice.

use std::f64::consts::PI;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::protocols::{walk_operator_bloch, BlochGrid, ProtocolSpec};
use crate::su2::{pauli_decompose, waveplate, PauliComponents, Su2Matrix};

/// Largest accepted phase distance between plates and target.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Default safety factor on the fastest admissible modulation.
pub const CONTINUITY_SAFETY: f64 = 1.5;
/// Below this radius one angle combination is undetermined.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// The scan starts at the first sample where both radii exceed this.
const START_TOL: f64 = 1e-3;

pub const QUARTER_WAVE: f64 = PI / 2.0;
pub const HALF_WAVE: f64 = PI;
/// Retardations of the three plates, in the order light meets them.
pub const PLATE_RETARDATIONS: [f64; 3] = [QUARTER_WAVE, HALF_WAVE, QUARTER_WAVE];

/// Distance between two plate angles, which are only defined mod pi.
pub fn mod_pi_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(PI);
    d.min(PI - d)
}

/// Round to the 12 significant digits used by pattern files.
pub fn quantize_angle(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Optic-axis angles `(theta1, theta2, theta3)` of the three plates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleTriple(pub [f64; 3]);

impl AngleTriple {
    /// Jones matrix of the plate stack; the first plate acts first.
    pub fn jones(&self) -> Su2Matrix {
        let [t1, t2, t3] = self.0;
        waveplate(QUARTER_WAVE, t3) * waveplate(HALF_WAVE, t2) * waveplate(QUARTER_WAVE, t1)
    }

    /// Worst per-plate mod-pi distance.
    pub fn distance(&self, other: &AngleTriple) -> f64 {
        (0..3)
            .map(|i| mod_pi_distance(self.0[i], other.0[i]))
            .fold(0.0, f64::max)
    }

    /// Shift each angle by a multiple of pi to sit next to `reference`.
    pub fn aligned_to(&self, reference: &AngleTriple) -> AngleTriple {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(reference.0) {
            *o += PI * ((r - *o) / PI).round();
        }
        AngleTriple(out)
    }
}

/// Real sphere coordinates of a unit-determinant target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetCoords(pub [f64; 4]);

impl TargetCoords {
    pub fn from_components(c: &PauliComponents) -> Self {
        let x = [-c.c[0].re, c.c[1].im, -c.c[2].im, -c.c[3].im];
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            TargetCoords(x.map(|v| v / norm))
        } else {
            TargetCoords(x)
        }
    }

    /// `|cos g|`.
    pub fn cos_radius(&self) -> f64 {
        self.0[0].hypot(self.0[3])
    }

    /// `|sin g|`.
    pub fn sin_radius(&self) -> f64 {
        self.0[1].hypot(self.0[2])
    }

    pub fn is_degenerate(&self) -> bool {
        self.cos_radius() < DEGENERACY_TOL || self.sin_radius() < DEGENERACY_TOL
    }

    fn well_conditioned(&self) -> bool {
        self.cos_radius().min(self.sin_radius()) > START_TOL
    }
}

/// All eight analytic angle triples for one target.
pub fn solve_angles(c: &PauliComponents) -> [AngleTriple; 8] {
    solve_coords(&TargetCoords::from_components(c), None)
}

/// [`solve_angles`], taking any undetermined combination (`a` where
/// `sin g = 0`, `b` where `cos g = 0`) from `hint`.
pub fn solve_angles_with_hint(c: &PauliComponents, hint: Option<&AngleTriple>) -> [AngleTriple; 8] {
    solve_coords(&TargetCoords::from_components(c), hint)
}

fn solve_coords(x: &TargetCoords, hint: Option<&AngleTriple>) -> [AngleTriple; 8] {
    let cos_r = x.cos_radius();
    let sin_r = x.sin_radius();
    let (hint_a, hint_b) = match hint {
        Some(h) => (h.0[0] + h.0[2], h.0[0] - h.0[2]),
        None => (0.0, 0.0),
    };
    let mut out = [AngleTriple([0.0; 3]); 8];
    let mut k = 0;
    for target_sign in [1.0, -1.0] {
        let [y0, y1, y2, y3] = x.0.map(|v| v * target_sign);
        for cos_sign in [1.0, -1.0] {
            for sin_sign in [1.0, -1.0] {
                let g = (sin_sign * sin_r).atan2(cos_sign * cos_r);
                let b = if cos_r < DEGENERACY_TOL {
                    hint_b
                } else {
                    (cos_sign * y3).atan2(cos_sign * y0)
                };
                let a = if sin_r < DEGENERACY_TOL {
                    hint_a
                } else {
                    (sin_sign * y1).atan2(sin_sign * y2)
                };
                out[k] = AngleTriple([(a + b) / 2.0, (a - g) / 2.0, (a - b) / 2.0]);
                k += 1;
            }
        }
    }
    out
}

/// Candidates at one grid sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCandidates {
    pub coords: TargetCoords,
    pub triples: [AngleTriple; 8],
}

/// Candidates for every grid sample.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchCandidates {
    pub samples: Vec<SampleCandidates>,
}

impl BranchCandidates {
    /// Solve every target independently.
    pub fn from_targets(targets: &[Su2Matrix]) -> Self {
        let samples = par::map_slice(targets, |u| {
            let (_, v) = u.split_global_phase();
            let coords = TargetCoords::from_components(&pauli_decompose(&v));
            SampleCandidates {
                coords,
                triples: solve_coords(&coords, None),
            }
        });
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The same candidate index at every sample, with no tracking.
    pub fn single_branch(&self, index: usize) -> Vec<AngleTriple> {
        self.samples.iter().map(|s| s.triples[index]).collect()
    }
}

/// Result of the continuity scan.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSelection {
    /// One unwrapped triple per grid sample, in grid order.
    pub angles: Vec<AngleTriple>,
    pub max_jump: f64,
    pub seam_jump: f64,
    pub start_sample: usize,
    pub seed_candidate: usize,
    pub degenerate_samples: usize,
}

/// Choose one candidate per sample so that neighbouring samples differ by
/// at most `bound` (mod pi, worst plate), including across the zone edge.
///
/// The scan starts at the first well-conditioned sample and runs cyclically.
/// Seeds are tried in order of closeness to zero angles; the first one whose
/// scan and seam both respect `bound` wins. Where a combination of angles is
/// undetermined the previous sample's value is held.
pub fn select_continuous_branch(
    candidates: &BranchCandidates,
    bound: f64,
) -> Result<BranchSelection> {
    let n = candidates.len();
    if n == 0 {
        return Err(Error::InvalidGrid("no samples to select from".into()));
    }
    let start = candidates
        .samples
        .iter()
        .position(|s| s.coords.well_conditioned())
        .unwrap_or(0);
    let zero = AngleTriple([0.0; 3]);
    let mut seeds: Vec<usize> = (0..8).collect();
    let seed_triples = &candidates.samples[start].triples;
    seeds.sort_by(|&i, &j| {
        seed_triples[i]
            .distance(&zero)
            .partial_cmp(&seed_triples[j].distance(&zero))
            .expect("finite angles")
    });

    let mut worst_failure: Option<(usize, f64)> = None;
    for &seed in &seeds {
        match scan_from(candidates, start, seed, bound) {
            Ok(sel) => return Ok(sel),
            Err((sample, jump)) => {
                if worst_failure.is_none_or(|(_, j)| jump < j) {
                    worst_failure = Some((sample, jump));
                }
            }
        }
    }
    let (sample, jump) = worst_failure.expect("at least one seed was tried");
    Err(Error::BranchSelection {
        sample,
        jump,
        bound,
    })
}

fn scan_from(
    candidates: &BranchCandidates,
    start: usize,
    seed: usize,
    bound: f64,
) -> std::result::Result<BranchSelection, (usize, f64)> {
    let n = candidates.len();
    let mut angles = vec![AngleTriple([0.0; 3]); n];
    let first = candidates.samples[start].triples[seed];
    angles[start] = first;
    let mut prev = first;
    let mut max_jump = 0.0f64;
    let mut degenerate = 0;
    for step in 1..n {
        let k = (start + step) % n;
        let sample = &candidates.samples[k];
        let resolved;
        let triples = if sample.coords.is_degenerate() {
            degenerate += 1;
            resolved = solve_coords(&sample.coords, Some(&prev));
            &resolved
        } else {
            &sample.triples
        };
        let (best, jump) = closest(triples, &prev);
        if jump > bound {
            return Err((k, jump));
        }
        max_jump = max_jump.max(jump);
        prev = triples[best].aligned_to(&prev);
        angles[k] = prev;
    }
    let seam_jump = prev.distance(&first);
    if seam_jump > bound {
        return Err((start, seam_jump));
    }
    Ok(BranchSelection {
        angles,
        max_jump,
        seam_jump,
        start_sample: start,
        seed_candidate: seed,
        degenerate_samples: degenerate,
    })
}

/// Index and distance of the candidate closest to `prev`; ties go to the
/// lowest index.
fn closest(triples: &[AngleTriple; 8], prev: &AngleTriple) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, t) in triples.iter().enumerate() {
        let d = t.distance(prev);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Largest admissible jump between neighbouring samples:
/// `safety pi (R + 1) pitch / Lambda`, with `R` the walk's light-cone range.
pub fn continuity_bound(spec: &ProtocolSpec, grid: &BlochGrid, safety: f64) -> f64 {
    safety * PI * (spec.light_cone() as f64 + 1.0) * grid.pitch_mm / grid.bz_length_mm
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompilationReport {
    pub max_reconstruction_error: f64,
    pub worst_sample: usize,
    pub max_sample_jump: f64,
    pub seam_jump: f64,
    pub continuity_bound: f64,
    pub start_sample: usize,
    pub seed_candidate: usize,
    pub degenerate_samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternMetadata {
    pub protocol: String,
    pub tau: usize,
    pub report: Option<CompilationReport>,
}

/// Three sampled optic-axis profiles over one Brillouin zone.
///
/// Angles are stored unwrapped (continuous along the grid); they are only
/// reduced mod pi when turned into Jones matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct PlatePatternSet {
    pub grid: BlochGrid,
    pub theta: [Vec<f64>; 3],
    pub metadata: PatternMetadata,
}

impl PlatePatternSet {
    pub fn new(grid: BlochGrid, theta: [Vec<f64>; 3], metadata: PatternMetadata) -> Result<Self> {
        if theta.iter().any(|t| t.len() != grid.n_samples) {
            return Err(Error::InvalidGrid(format!(
                "pattern arrays must have {} samples",
                grid.n_samples
            )));
        }
        Ok(Self {
            grid,
            theta,
            metadata,
        })
    }

    /// Constant triple over the whole grid.
    pub fn uniform(grid: BlochGrid, triple: AngleTriple, protocol: &str) -> Self {
        let theta = triple.0.map(|t| vec![t; grid.n_samples]);
        Self {
            grid,
            theta,
            metadata: PatternMetadata {
                protocol: protocol.to_string(),
                tau: 0,
                report: None,
            },
        }
    }

    pub fn triple(&self, k: usize) -> AngleTriple {
        AngleTriple([self.theta[0][k], self.theta[1][k], self.theta[2][k]])
    }

    pub fn jones(&self, k: usize) -> Su2Matrix {
        self.triple(k).jones()
    }

    /// `(largest interior jump, jump across the zone edge)`, mod pi.
    pub fn sample_jumps(&self) -> (f64, f64) {
        let n = self.grid.n_samples;
        let interior = (1..n)
            .map(|k| self.triple(k).distance(&self.triple(k - 1)))
            .fold(0.0, f64::max);
        let seam = self.triple(0).distance(&self.triple(n - 1));
        (interior, seam)
    }
}

/// Largest phase distance between the plate stack and the walk operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructionCheck {
    pub max_distance: f64,
    pub worst_sample: usize,
}

pub fn verify_reconstruction(
    patterns: &PlatePatternSet,
    spec: &ProtocolSpec,
) -> ReconstructionCheck {
    let grid = &patterns.grid;
    let dists = par::map_range(grid.n_samples, |k| {
        let target = walk_operator_bloch(spec, grid.quasi_momentum(k));
        patterns.jones(k).phase_distance(&target)
    });
    let (worst_sample, max_distance) = dists.iter().copied().enumerate().fold(
        (0, 0.0),
        |best, (k, d)| if d > best.1 { (k, d) } else { best },
    );
    ReconstructionCheck {
        max_distance,
        worst_sample,
    }
}

/// Physical parameters for the fabrication and optics checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeasibilityParams {
    pub wavelength_nm: f64,
    pub min_fab_period_um: f64,
    pub per_plate_transmittance: f64,
    pub n_plates: u32,
    /// Multiplies the admissible per-sample jump.
    pub continuity_safety: f64,
}

impl Default for FeasibilityParams {
    fn default() -> Self {
        Self {
            wavelength_nm: 633.0,
            min_fab_period_um: 20.0,
            per_plate_transmittance: 0.85,
            n_plates: 3,
            continuity_safety: CONTINUITY_SAFETY,
        }
    }
}

/// Paraxial ratios above this are flagged.
pub const PARAXIAL_WARN: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub tau: usize,
    /// `Lambda / tau`; absent for an empty walk.
    pub min_modulation_period_um: Option<f64>,
    /// `tau lambda / Lambda`.
    pub paraxial_ratio: f64,
    pub per_plate_transmittance: f64,
    pub n_plates: u32,
    pub total_transmittance: f64,
    pub max_sample_jump: Option<f64>,
    pub continuity_bound: f64,
    pub resolution_pass: bool,
    pub paraxial_pass: bool,
    pub continuity_pass: Option<bool>,
}

impl FeasibilityReport {
    /// Resolution failures cannot be fabricated; everything else is a warning.
    pub fn hard_fail(&self) -> bool {
        !self.resolution_pass
    }
}

pub fn feasibility_check(
    spec: &ProtocolSpec,
    grid: &BlochGrid,
    params: &FeasibilityParams,
) -> FeasibilityReport {
    let bz_um = grid.bz_length_mm * 1e3;
    let min_period = (spec.tau > 0).then(|| bz_um / spec.tau as f64);
    let paraxial_ratio = spec.tau as f64 * params.wavelength_nm * 1e-6 / grid.bz_length_mm;
    FeasibilityReport {
        tau: spec.tau,
        min_modulation_period_um: min_period,
        paraxial_ratio,
        per_plate_transmittance: params.per_plate_transmittance,
        n_plates: params.n_plates,
        total_transmittance: params.per_plate_transmittance.powi(params.n_plates as i32),
        max_sample_jump: None,
        continuity_bound: continuity_bound(spec, grid, params.continuity_safety),
        resolution_pass: min_period.is_none_or(|p| p >= params.min_fab_period_um),
        paraxial_pass: paraxial_ratio <= PARAXIAL_WARN,
        continuity_pass: None,
    }
}

/// Bloch targets with unit determinant at every grid sample.
pub fn targets(spec: &ProtocolSpec, grid: &BlochGrid) -> Vec<Su2Matrix> {
    par::map_range(grid.n_samples, |k| {
        walk_operator_bloch(spec, grid.quasi_momentum(k))
            .split_global_phase()
            .1
    })
}

/// Full pipeline: Bloch targets, candidates, continuous branch, verification
/// and feasibility.
pub fn compile(
    spec: &ProtocolSpec,
    grid: &BlochGrid,
    params: &FeasibilityParams,
) -> Result<(PlatePatternSet, FeasibilityReport)> {
    spec.validate()?;
    let candidates = BranchCandidates::from_targets(&targets(spec, grid));
    let bound = continuity_bound(spec, grid, params.continuity_safety);
    let selection = select_continuous_branch(&candidates, bound)?;

    let mut theta: [Vec<f64>; 3] = Default::default();
    for (i, plate) in theta.iter_mut().enumerate() {
        *plate = selection
            .angles
            .iter()
            .map(|t| quantize_angle(t.0[i]))
            .collect();
    }
    let mut patterns = PlatePatternSet::new(
        *grid,
        theta,
        PatternMetadata {
            protocol: format!("{} sha={}", spec.label(), spec.fingerprint()),
            tau: spec.tau,
            report: None,
        },
    )?;

    let check = verify_reconstruction(&patterns, spec);
    if check.max_distance > RECONSTRUCTION_TOL {
        return Err(Error::Reconstruction {
            sample: check.worst_sample,
            error: check.max_distance,
            tolerance: RECONSTRUCTION_TOL,
        });
    }
    let (max_jump, seam) = patterns.sample_jumps();
    patterns.metadata.report = Some(CompilationReport {
        max_reconstruction_error: check.max_distance,
        worst_sample: check.worst_sample,
        max_sample_jump: max_jump,
        seam_jump: seam,
        continuity_bound: bound,
        start_sample: selection.start_sample,
        seed_candidate: selection.seed_candidate,
        degenerate_samples: selection.degenerate_samples,
    });

    let mut report = feasibility_check(spec, grid, params);
    report.max_sample_jump = Some(max_jump.max(seam));
    report.continuity_pass = Some(max_jump.max(seam) <= bound);
    Ok((patterns, report))
}

/// One independently compiled stage of a cascaded setup.
#[derive(Clone, Debug)]
pub struct Stage {
    pub spec: ProtocolSpec,
    pub patterns: PlatePatternSet,
    pub feasibility: FeasibilityReport,
}

/// Split the walk into `n_stages` equal contiguous parts and compile each.
pub fn split_stages(
    spec: &ProtocolSpec,
    grid: &BlochGrid,
    n_stages: usize,
    params: &FeasibilityParams,
) -> Result<Vec<Stage>> {
    if n_stages == 0 || !spec.tau.is_multiple_of(n_stages) {
        return Err(Error::StageSplit {
            tau: spec.tau,
            stages: n_stages,
        });
    }
    let len = spec.tau / n_stages;
    let lengths = vec![len; n_stages];
    split_stages_at(spec, grid, &lengths, params)
}

/// Compile consecutive stages of the given step counts.
pub fn split_stages_at(
    spec: &ProtocolSpec,
    grid: &BlochGrid,
    lengths: &[usize],
    params: &FeasibilityParams,
) -> Result<Vec<Stage>> {
    if lengths.is_empty() || lengths.iter().sum::<usize>() != spec.tau {
        return Err(Error::StageSplit {
            tau: spec.tau,
            stages: lengths.len(),
        });
    }
    let mut start = 0;
    let mut stages = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let sub = spec.slice(start..start + len);
        start += len;
        let (patterns, feasibility) = compile(&sub, grid, params)?;
        stages.push(Stage {
            spec: sub,
            patterns,
            feasibility,
        });
    }
    Ok(stages)
}

/// Write the text pattern format: four `# key=value` header lines, then one
/// `x_mm theta1 theta2 theta3` row per sample (tab separated, 12 significant
/// digits).
pub fn write_patterns<W: Write>(patterns: &PlatePatternSet, mut out: W) -> Result<()> {
    let g = &patterns.grid;
    writeln!(out, "# bz_length_mm={}", g.bz_length_mm)?;
    writeln!(out, "# pitch_um={}", g.pitch_mm * 1e3)?;
    writeln!(out, "# protocol={}", patterns.metadata.protocol)?;
    writeln!(out, "# tau={}", patterns.metadata.tau)?;
    for k in 0..g.n_samples {
        let [t1, t2, t3] = patterns.triple(k).0;
        writeln!(
            out,
            "{:.11e}\t{t1:.11e}\t{t2:.11e}\t{t3:.11e}",
            g.position_mm(k)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn export_patterns(patterns: &PlatePatternSet, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_patterns(patterns, BufWriter::new(file))
}

pub fn read_patterns<R: BufRead>(input: R) -> Result<PlatePatternSet> {
    let mut bz = None;
    let mut pitch_um = None;
    let mut protocol = None;
    let mut tau = None;
    let mut theta: [Vec<f64>; 3] = Default::default();
    let bad = |line: usize, message: String| Error::PatternFormat { line, message };

    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if let Some(header) = line.strip_prefix("# ") {
            let (key, value) = header
                .split_once('=')
                .ok_or_else(|| bad(line_no, "header without `=`".into()))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| bad(line_no, e.to_string()))
            };
            match key {
                "bz_length_mm" => bz = Some(num(value)?),
                "pitch_um" => pitch_um = Some(num(value)?),
                "protocol" => protocol = Some(value.to_string()),
                "tau" => {
                    tau = Some(
                        value
                            .trim()
                            .parse::<usize>()
                            .map_err(|e| bad(line_no, e.to_string()))?,
                    )
                }
                other => return Err(bad(line_no, format!("unknown header `{other}`"))),
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(bad(
                line_no,
                format!("expected 4 columns, found {}", fields.len()),
            ));
        }
        for (plate, field) in theta.iter_mut().zip(&fields[1..]) {
            plate.push(
                field
                    .trim()
                    .parse()
                    .map_err(|e| bad(line_no, format!("{e}")))?,
            );
        }
    }
    let missing = |k: &str| bad(0, format!("missing header `{k}`"));
    let bz = bz.ok_or_else(|| missing("bz_length_mm"))?;
    let pitch_um = pitch_um.ok_or_else(|| missing("pitch_um"))?;
    let grid = BlochGrid::new(bz, pitch_um * 1e-3)?;
    if theta[0].len() != grid.n_samples {
        return Err(bad(
            0,
            format!(
                "{} rows for a {}-sample grid",
                theta[0].len(),
                grid.n_samples
            ),
        ));
    }
    PlatePatternSet::new(
        grid,
        theta,
        PatternMetadata {
            protocol: protocol.ok_or_else(|| missing("protocol"))?,
            tau: tau.ok_or_else(|| missing("tau"))?,
            report: None,
        },
    )
}

pub fn import_patterns(path: &Path) -> Result<PlatePatternSet> {
    read_patterns(BufReader::new(std::fs::File::open(path)?))
}
