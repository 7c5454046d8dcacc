use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64 as C64;
use qwalk_core::analysis::{
    entropy_dynamics, linear_input, linear_inputs, reduced_density_matrix, similarity,
    von_neumann_entropy, CoinDensityMatrix, EntropyCurve, EntropyEnsemble,
};
use qwalk_core::compiler::{
    feasibility_check, import_patterns, split_stages_at, verify_reconstruction, CompilationReport,
    FeasibilityReport, PlatePatternSet, RECONSTRUCTION_TOL,
};
use qwalk_core::lattice::{distribution, evolve, ProbabilityDistribution, WalkerState};
use qwalk_core::optics::{
    box_capture_fraction, calibrate_origin, extract_distribution, misalignment_study,
    random_offsets, render_camera, simulate, CameraImage, CameraParams, OpticalSetup,
};
use qwalk_core::par;
use qwalk_core::protocols::{BlochGrid, ProtocolSpec};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{num, CameraSidecar, Csv, OutDir};
use crate::svg::{Chart, Series, Style};
use crate::{CliError, Command, Result, RunArgs};

/// Sites count as occupied above this probability.
pub const OCCUPATION_THRESHOLD: f64 = 1e-6;

pub fn run(cli: &crate::Cli) -> Result<String> {
    let args = cli.command.args();
    let cfg = RunConfig::load(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let mut out = OutDir::create(&args.out)?;
    let summary = match &cli.command {
        Command::Compile(a) => cmd_compile(&cfg, a, seed, &mut out)?,
        Command::Simulate(a) => cmd_simulate(&cfg, a, seed, &mut out)?,
        Command::Entropy(_) => cmd_entropy(&cfg, seed, &mut out)?,
    };
    Ok(format!(
        "{summary}\nwrote {} files to {}",
        out.written().len(),
        args.out.display()
    ))
}

#[derive(Debug, Serialize)]
struct StageOutput {
    first_step: usize,
    steps: usize,
    pattern_file: Option<String>,
    feasibility: FeasibilityReport,
    compilation: Option<CompilationReport>,
}

#[derive(Debug, Serialize)]
struct CompileOutput {
    protocol: String,
    fingerprint: String,
    tau: usize,
    hard_fail: bool,
    forced: bool,
    total_transmittance: f64,
    stages: Vec<StageOutput>,
}

struct Compiled {
    spec: ProtocolSpec,
    grid: BlochGrid,
    patterns: Vec<PlatePatternSet>,
}

fn pattern_name(i: usize, n: usize) -> String {
    if n == 1 {
        "patterns.tsv".into()
    } else {
        format!("patterns_stage{}.tsv", i + 1)
    }
}

fn stage_specs(spec: &ProtocolSpec, lengths: &[usize]) -> Vec<(usize, ProtocolSpec)> {
    let mut start = 0;
    lengths
        .iter()
        .map(|&len| {
            let s = (start, spec.slice(start..start + len));
            start += len;
            s
        })
        .collect()
}

fn compile_stages(
    cfg: &RunConfig,
    args: &RunArgs,
    seed: u64,
    out: &mut OutDir,
) -> Result<Compiled> {
    let spec = cfg.spec(seed)?;
    let grid = cfg.grid()?;
    let params = cfg.feasibility_params();
    let lengths = cfg.stage_lengths(args.stages)?;
    let subs = stage_specs(&spec, &lengths);
    let n = lengths.len();

    let mut output = CompileOutput {
        protocol: spec.label(),
        fingerprint: spec.fingerprint(),
        tau: spec.tau,
        hard_fail: false,
        forced: args.force,
        total_transmittance: params.per_plate_transmittance.powi(3 * n as i32),
        stages: subs
            .iter()
            .map(|(first, s)| StageOutput {
                first_step: *first,
                steps: s.tau,
                pattern_file: None,
                feasibility: feasibility_check(s, &grid, &params),
                compilation: None,
            })
            .collect(),
    };
    output.hard_fail = output.stages.iter().any(|s| s.feasibility.hard_fail());
    if output.hard_fail && !args.force {
        out.json("feasibility.json", &output)?;
        let worst = output
            .stages
            .iter()
            .filter_map(|s| s.feasibility.min_modulation_period_um)
            .fold(f64::INFINITY, f64::min);
        return Err(CliError::Feasibility(format!(
            "finest modulation period {worst:.2} um is below the fabrication limit {} um \
             (split into more stages or pass --force)",
            params.min_fab_period_um
        )));
    }
    if output.hard_fail {
        log::warn!("feasibility hard-fail overridden by --force");
    }

    let stages = split_stages_at(&spec, &grid, &lengths, &params)?;
    let mut patterns = Vec::with_capacity(n);
    for (i, (stage, slot)) in stages.into_iter().zip(output.stages.iter_mut()).enumerate() {
        let name = pattern_name(i, n);
        out.patterns(&name, &stage.patterns)?;
        let svg = pattern_chart(
            &stage.patterns,
            &format!(
                "Plate patterns, steps {}..{}",
                slot.first_step,
                slot.first_step + slot.steps
            ),
        );
        out.text(&name.replace(".tsv", ".svg"), &svg)?;
        slot.pattern_file = Some(name);
        slot.feasibility = stage.feasibility;
        slot.compilation = stage.patterns.metadata.report.clone();
        if slot.feasibility.continuity_pass == Some(false) {
            log::warn!("stage {} exceeds the continuity bound", i + 1);
        }
        if !slot.feasibility.paraxial_pass {
            log::warn!(
                "stage {}: paraxial ratio {:.3} above the warning level",
                i + 1,
                slot.feasibility.paraxial_ratio
            );
        }
        patterns.push(stage.patterns);
    }
    out.json("feasibility.json", &output)?;
    Ok(Compiled {
        spec,
        grid,
        patterns,
    })
}

fn pattern_chart(p: &PlatePatternSet, title: &str) -> String {
    let mut chart = Chart::new(title, "x (mm)", "optic axis angle (rad)");
    for (i, theta) in p.theta.iter().enumerate() {
        let pts = theta
            .iter()
            .enumerate()
            .map(|(k, &t)| (p.grid.position_mm(k), t))
            .collect();
        chart = chart.series(Series::new(&format!("theta{}", i + 1), pts, Style::Line));
    }
    chart.render()
}

fn cmd_compile(cfg: &RunConfig, args: &RunArgs, seed: u64, out: &mut OutDir) -> Result<String> {
    let c = compile_stages(cfg, args, seed, out)?;
    let worst = c
        .patterns
        .iter()
        .filter_map(|p| p.metadata.report.as_ref())
        .map(|r| r.max_reconstruction_error)
        .fold(0.0, f64::max);
    Ok(format!(
        "compiled {} into {} stage(s) on {} samples; worst reconstruction error {worst:.2e}",
        c.spec.label(),
        c.patterns.len(),
        c.grid.n_samples
    ))
}

fn load_patterns(
    cfg: &RunConfig,
    args: &RunArgs,
    seed: u64,
    config_dir: &Path,
) -> Result<Compiled> {
    let spec = cfg.spec(seed)?;
    let grid = cfg.grid()?;
    let lengths = cfg.stage_lengths(args.stages)?;
    if lengths.len() != cfg.optics.pattern_files.len() {
        return Err(CliError::Config(format!(
            "{} pattern files for {} stages",
            cfg.optics.pattern_files.len(),
            lengths.len()
        )));
    }
    let mut patterns = Vec::new();
    for ((_, sub), file) in stage_specs(&spec, &lengths)
        .iter()
        .zip(&cfg.optics.pattern_files)
    {
        let path = config_dir.join(file);
        let p = import_patterns(&path).map_err(|e| match e {
            qwalk_core::Error::Io(io) => CliError::io(&path, io),
            other => CliError::Config(format!("{}: {other}", path.display())),
        })?;
        let check = verify_reconstruction(&p, sub);
        if check.max_distance > RECONSTRUCTION_TOL {
            return Err(CliError::Verification(format!(
                "{} does not implement its stage: distance {:.3e} at sample {}",
                path.display(),
                check.max_distance,
                check.worst_sample
            )));
        }
        patterns.push(p);
    }
    Ok(Compiled {
        spec,
        grid,
        patterns,
    })
}

#[derive(Debug, Serialize)]
struct MisalignmentOutput {
    repeats: usize,
    half_width_um: f64,
    similarity_mean_vs_oracle: f64,
    max_sem: f64,
}

#[derive(Debug, Serialize)]
struct SimulateOutput {
    protocol: String,
    tau: usize,
    stages: usize,
    input: String,
    off_state: bool,
    max_mode: usize,
    similarity_optics_oracle: f64,
    similarity_camera_oracle: f64,
    min_similarity: f64,
    passed: bool,
    occupation_threshold: f64,
    occupied_sites: OccupiedSites,
    camera_box_capture_fraction: f64,
    retardation_error: f64,
    misalignment: Option<MisalignmentOutput>,
}

#[derive(Debug, Serialize)]
struct OccupiedSites {
    left: usize,
    right: usize,
    total: usize,
    /// Outermost-to-outermost occupied site distance plus one.
    span_left: usize,
    span_right: usize,
}

fn span(sites: &[i64]) -> usize {
    match (sites.first(), sites.last()) {
        (Some(a), Some(b)) => (b - a + 1) as usize,
        _ => 0,
    }
}

fn cmd_simulate(cfg: &RunConfig, args: &RunArgs, seed: u64, out: &mut OutDir) -> Result<String> {
    let c = if cfg.optics.pattern_files.is_empty() {
        compile_stages(cfg, args, seed, out)?
    } else {
        let dir = args.config.parent().unwrap_or(Path::new("."));
        load_patterns(cfg, args, seed, dir)?
    };
    let params = cfg.optics_params(&c.grid);
    let limit = params.max_resolvable_mode()?;
    let max_mode = cfg
        .optics
        .max_mode
        .unwrap_or((c.spec.light_cone() + 10).min(limit));
    let pol = cfg.input_polarization()?;
    let off = cfg.optics.off;
    let n_stages = c.patterns.len();

    let mut setup = if off {
        OpticalSetup::off(c.patterns.clone())
    } else {
        OpticalSetup::new(c.patterns.clone())
    };
    let eps = cfg.misalignment.retardation_error.0;
    for delta in &mut setup.retardations {
        *delta += eps;
    }
    let modes = simulate(&setup, pol, &params, max_mode)?;
    let optics = modes.distribution();
    let oracle = if off {
        ProbabilityDistribution::new(0, vec![1.0])
    } else {
        let s0 = WalkerState::localized_for(pol, &c.spec)?;
        distribution(&evolve(&s0, &c.spec)?)
    };
    let sim = similarity(&optics, &oracle);

    let cam = cfg.camera_params(seed);
    let off_modes = simulate(
        &OpticalSetup::off(c.patterns.clone()),
        pol,
        &params,
        max_mode,
    )?;
    let off_image = render_camera(&off_modes.distribution(), &cam)?;
    let origin = calibrate_origin(&off_image);
    let image = render_camera(&optics, &cam)?;
    let camera = extract_distribution(&image, origin, cam.spot_spacing, optics.sites())?;
    let cam_sim = similarity(&camera, &oracle);
    out.camera("camera", &image, &sidecar(&image, &optics, &cam))?;
    out.camera(
        "camera_off",
        &off_image,
        &sidecar(&off_image, &off_modes.distribution(), &cam),
    )?;

    let study = if cfg.misalignment.repeats >= 2 {
        let offsets = random_offsets(
            seed,
            cfg.misalignment.repeats,
            n_stages,
            cfg.misalignment.half_width_um * 1e-3,
        );
        Some(misalignment_study(
            &setup, pol, &params, &offsets, max_mode,
        )?)
    } else {
        None
    };

    let mut header = vec![
        "site",
        "p_oracle",
        "p_optics",
        "p_optics_L",
        "p_optics_R",
        "p_camera",
    ];
    if study.is_some() {
        header.extend(["p_misaligned_mean", "p_misaligned_sem"]);
    }
    let mut csv = Csv::new(&header);
    let mut occupied = OccupiedSites {
        left: 0,
        right: 0,
        total: 0,
        span_left: 0,
        span_right: 0,
    };
    let (mut sites_l, mut sites_r) = (Vec::new(), Vec::new());
    for (i, m) in modes.modes().enumerate() {
        let [l, r] = modes.amplitudes[i];
        let (pl, pr) = (l.norm_sqr(), r.norm_sqr());
        if pl > OCCUPATION_THRESHOLD {
            occupied.left += 1;
            sites_l.push(m);
        }
        if pr > OCCUPATION_THRESHOLD {
            occupied.right += 1;
            sites_r.push(m);
        }
        occupied.total += usize::from(pl + pr > OCCUPATION_THRESHOLD);
        let mut row = vec![
            m.to_string(),
            num(oracle.get(m)),
            num(optics.get(m)),
            num(pl),
            num(pr),
            num(camera.get(m)),
        ];
        if let Some(st) = &study {
            let idx = (m - st.mean.first_site()) as usize;
            row.push(num(st.mean.get(m)));
            row.push(num(st.sem.get(idx).copied().unwrap_or(0.0)));
        }
        csv.row(&row);
    }
    occupied.span_left = span(&sites_l);
    occupied.span_right = span(&sites_r);
    out.text("distribution.csv", &csv.finish())?;

    let shown = plotted_sites(&oracle, &optics);
    let pick = |d: &ProbabilityDistribution| {
        shown
            .clone()
            .map(|m| (m as f64, d.get(m)))
            .collect::<Vec<_>>()
    };
    let mut chart = Chart::new(
        &format!("{} final distribution", c.spec.label()),
        "site m",
        "P(m)",
    )
    .series(Series::new("lattice oracle", pick(&oracle), Style::Bars))
    .series(Series::new("optics", pick(&optics), Style::Markers));
    if let Some(st) = &study {
        let errs = shown
            .clone()
            .map(|m| {
                let idx = m - st.mean.first_site();
                if idx >= 0 {
                    st.sem.get(idx as usize).copied().unwrap_or(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        chart = chart.series(
            Series::new("misaligned mean", pick(&st.mean), Style::Markers).with_errors(errs),
        );
    }
    out.text("distribution.svg", &chart.render())?;

    let passed = off || sim >= cfg.optics.min_similarity;
    let report = SimulateOutput {
        protocol: c.spec.label(),
        tau: c.spec.tau,
        stages: n_stages,
        input: cfg.optics.input.clone(),
        off_state: off,
        max_mode,
        similarity_optics_oracle: sim,
        similarity_camera_oracle: cam_sim,
        min_similarity: cfg.optics.min_similarity,
        passed,
        occupation_threshold: OCCUPATION_THRESHOLD,
        occupied_sites: occupied,
        camera_box_capture_fraction: box_capture_fraction(cam.spot_sigma),
        retardation_error: eps,
        misalignment: study.as_ref().map(|st| MisalignmentOutput {
            repeats: cfg.misalignment.repeats,
            half_width_um: cfg.misalignment.half_width_um,
            similarity_mean_vs_oracle: similarity(&st.mean, &oracle),
            max_sem: st.sem.iter().copied().fold(0.0, f64::max),
        }),
    };
    out.json("simulate_report.json", &report)?;
    if !passed {
        return Err(CliError::Verification(format!(
            "optics-vs-oracle similarity {sim:.6} below {}",
            cfg.optics.min_similarity
        )));
    }
    Ok(format!(
        "simulated {}: similarity {sim:.6} (optics vs oracle), {cam_sim:.6} (camera vs oracle)",
        c.spec.label()
    ))
}

/// Union of the occupied parts of both distributions.
fn plotted_sites(
    a: &ProbabilityDistribution,
    b: &ProbabilityDistribution,
) -> std::ops::RangeInclusive<i64> {
    let occupied = |d: &ProbabilityDistribution| {
        let sites: Vec<i64> = d
            .iter()
            .filter(|&(_, p)| p > OCCUPATION_THRESHOLD)
            .map(|(m, _)| m)
            .collect();
        (
            sites.first().copied().unwrap_or(0),
            sites.last().copied().unwrap_or(0),
        )
    };
    let (a0, a1) = occupied(a);
    let (b0, b1) = occupied(b);
    a0.min(b0)..=a1.max(b1)
}

fn sidecar(
    image: &CameraImage,
    dist: &ProbabilityDistribution,
    cam: &CameraParams,
) -> CameraSidecar {
    CameraSidecar {
        width: image.width,
        height: image.height,
        origin_px: [image.origin.0, image.origin.1],
        spot_spacing_px: image.spot_spacing,
        spot_sigma_px: cam.spot_sigma,
        first_site: dist.first_site(),
        last_site: dist.last_site(),
        peak_intensity: image.pixels.iter().copied().fold(0.0, f64::max),
        noise_floor: cam.noise_floor,
        seed: cam.seed,
    }
}

#[derive(Debug, Serialize)]
struct RhoRecord {
    ensemble: &'static str,
    phi: f64,
    realization: usize,
    /// `[re, im]` of rho_LL, rho_LR, rho_RL, rho_RR.
    rho: [[f64; 2]; 4],
    eigenvalues: [f64; 2],
    entropy: f64,
}

#[derive(Debug, Serialize)]
struct EnsembleSummary {
    min_input_mean: f64,
    max_input_mean: f64,
    mean_at_tau: f64,
    sem_at_tau: f64,
    all_inputs_above_threshold: bool,
}

#[derive(Debug, Serialize)]
struct EntropyOutput {
    protocol: String,
    tau: usize,
    phi_inputs: usize,
    curve_inputs: usize,
    realizations: usize,
    disorder_seed: Option<u64>,
    threshold: f64,
    ordered: EnsembleSummary,
    disordered: Option<EnsembleSummary>,
    disordered_exceeds_ordered_at_tau: Option<bool>,
}

struct Sweep {
    mean: Vec<f64>,
    sem: Vec<f64>,
    records: Vec<RhoRecord>,
}

fn sweep(ens: &EntropyEnsemble, label: &'static str, phis: &[f64], tau: usize) -> Result<Sweep> {
    let n_real = ens.n_realizations;
    let rhos = par::try_map_range(phis.len() * n_real, |job| {
        let (i, r) = (job / n_real, job % n_real);
        let spec = ens.realization(r, tau)?;
        let s0 = WalkerState::localized_for(linear_input(phis[i]), &spec)?;
        Ok::<CoinDensityMatrix, qwalk_core::Error>(reduced_density_matrix(&evolve(&s0, &spec)?))
    })?;
    let mut mean = Vec::new();
    let mut sem = Vec::new();
    let mut records = Vec::new();
    for (i, &phi) in phis.iter().enumerate() {
        let s: Vec<f64> = rhos[i * n_real..(i + 1) * n_real]
            .iter()
            .map(von_neumann_entropy)
            .collect();
        let n = s.len() as f64;
        let mu = s.iter().sum::<f64>() / n;
        let var = if s.len() > 1 {
            s.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        mean.push(mu);
        sem.push((var / n).sqrt());
        for (r, rho) in rhos[i * n_real..(i + 1) * n_real].iter().enumerate() {
            let c = |z: C64| [z.re, z.im];
            records.push(RhoRecord {
                ensemble: label,
                phi,
                realization: r,
                rho: [
                    c(rho.rho[0][0]),
                    c(rho.rho[0][1]),
                    c(rho.rho[1][0]),
                    c(rho.rho[1][1]),
                ],
                eigenvalues: rho.eigenvalues(),
                entropy: s[r],
            });
        }
    }
    Ok(Sweep { mean, sem, records })
}

fn summarize(sweep: &Sweep, curve: &EntropyCurve, threshold: f64) -> EnsembleSummary {
    let last = curve.taus.len() - 1;
    EnsembleSummary {
        min_input_mean: sweep.mean.iter().copied().fold(f64::INFINITY, f64::min),
        max_input_mean: sweep.mean.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean_at_tau: curve.mean[last],
        sem_at_tau: curve.sem[last],
        all_inputs_above_threshold: sweep.mean.iter().all(|&s| s > threshold),
    }
}

fn cmd_entropy(cfg: &RunConfig, seed: u64, out: &mut OutDir) -> Result<String> {
    let e = &cfg.entropy;
    let family = cfg.family()?;
    let tau = e.tau.unwrap_or(cfg.protocol.tau);
    let ordered = EntropyEnsemble::ordered(family.clone(), cfg.protocol.delta.0);
    let disordered = cfg
        .disorder(seed)
        .map(|d| EntropyEnsemble::disordered(family.clone(), d, e.realizations));

    let phis: Vec<f64> = (0..e.phi_inputs)
        .map(|k| 2.0 * PI * k as f64 / e.phi_inputs as f64)
        .collect();
    let mut taus: Vec<usize> = (0..=tau).step_by(e.curve_step).collect();
    if taus.last() != Some(&tau) {
        taus.push(tau);
    }
    let curve_inputs = linear_inputs(e.curve_inputs);

    let ord_sweep = sweep(&ordered, "ordered", &phis, tau)?;
    let ord_curve = entropy_dynamics(&ordered, &curve_inputs, &taus)?;
    let dis = match &disordered {
        Some(ens) => Some((
            sweep(ens, "disordered", &phis, tau)?,
            entropy_dynamics(ens, &curve_inputs, &taus)?,
        )),
        None => None,
    };

    let mut header = vec!["phi", "s_ordered"];
    if dis.is_some() {
        header.extend(["s_disordered", "sem_disordered"]);
    }
    let mut csv = Csv::new(&header);
    for (i, &phi) in phis.iter().enumerate() {
        let mut row = vec![num(phi), num(ord_sweep.mean[i])];
        if let Some((s, _)) = &dis {
            row.push(num(s.mean[i]));
            row.push(num(s.sem[i]));
        }
        csv.row(&row);
    }
    out.text("entropy_phi.csv", &csv.finish())?;

    let mut header = vec!["tau", "mean_ordered", "sem_ordered"];
    if dis.is_some() {
        header.extend(["mean_disordered", "sem_disordered"]);
    }
    let mut csv = Csv::new(&header);
    for (i, &t) in taus.iter().enumerate() {
        let mut row = vec![t.to_string(), num(ord_curve.mean[i]), num(ord_curve.sem[i])];
        if let Some((_, c)) = &dis {
            row.push(num(c.mean[i]));
            row.push(num(c.sem[i]));
        }
        csv.row(&row);
    }
    out.text("entropy_tau.csv", &csv.finish())?;

    let mut records = ord_sweep.records.iter().collect::<Vec<_>>();
    if let Some((s, _)) = &dis {
        records.extend(s.records.iter());
    }
    out.json("density_matrices.json", &records)?;

    let label = format!("{family}(delta={:.6})", cfg.protocol.delta.0);
    let mut phi_chart = Chart::new(
        &format!("Entropy after {tau} steps, {label}"),
        "phi (rad)",
        "S",
    )
    .y_range(0.0, 1.05)
    .series(Series::new(
        "ordered",
        phis.iter()
            .copied()
            .zip(ord_sweep.mean.iter().copied())
            .collect(),
        Style::Line,
    ));
    let mut tau_chart = Chart::new(&format!("Entropy dynamics, {label}"), "steps", "mean S")
        .y_range(0.0, 1.05)
        .series(Series::new(
            "ordered",
            taus.iter()
                .map(|&t| t as f64)
                .zip(ord_curve.mean.iter().copied())
                .collect(),
            Style::Line,
        ));
    if let Some((s, c)) = &dis {
        phi_chart = phi_chart.series(
            Series::new(
                "disordered",
                phis.iter().copied().zip(s.mean.iter().copied()).collect(),
                Style::Markers,
            )
            .with_errors(s.sem.clone()),
        );
        tau_chart = tau_chart.series(Series::new(
            "disordered",
            taus.iter()
                .map(|&t| t as f64)
                .zip(c.mean.iter().copied())
                .collect(),
            Style::Line,
        ));
    }
    out.text("entropy_phi.svg", &phi_chart.render())?;
    out.text("entropy_tau.svg", &tau_chart.render())?;

    let ord_summary = summarize(&ord_sweep, &ord_curve, e.threshold);
    let dis_summary = dis.as_ref().map(|(s, c)| summarize(s, c, e.threshold));
    let report = EntropyOutput {
        protocol: label,
        tau,
        phi_inputs: e.phi_inputs,
        curve_inputs: e.curve_inputs,
        realizations: e.realizations,
        disorder_seed: disordered.as_ref().and_then(|d| d.disorder.map(|x| x.seed)),
        threshold: e.threshold,
        disordered_exceeds_ordered_at_tau: dis_summary
            .as_ref()
            .map(|d| d.mean_at_tau > ord_summary.mean_at_tau),
        ordered: ord_summary,
        disordered: dis_summary,
    };
    out.json("entropy_report.json", &report)?;

    Ok(match &report.disordered {
        Some(d) => format!(
            "entropy after {tau} steps: ordered mean {:.4}, disordered mean {:.4}, smallest disordered input mean {:.4}",
            report.ordered.mean_at_tau, d.mean_at_tau, d.min_input_mean
        ),
        None => format!("entropy after {tau} steps: ordered mean {:.4}", report.ordered.mean_at_tau),
    })
}
