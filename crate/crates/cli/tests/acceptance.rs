//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use qwalk_core::analysis::{
    entropy_dynamics, entropy_per_input, linear_input, linear_inputs, reduced_density_matrix,
    similarity, simulate_projections, stokes_from_projections, EntropyEnsemble,
};
use qwalk_core::compiler::{
    feasibility_check, split_stages, verify_reconstruction, FeasibilityParams, PlatePatternSet,
};
use qwalk_core::lattice::{
    bloch_evolve, distribution, evolve, evolve_observed, ProbabilityDistribution, WalkerState,
};
use qwalk_core::optics::{
    calibrate_origin, extract_distribution, render_camera, simulate, CameraParams, OpticalSetup,
    OpticsParams,
};
use qwalk_core::protocols::{
    sqrt_translation_bloch, translation_t_bloch, BlochGrid, Disorder, Family, ProtocolSpec,
};
use qwalk_core::su2::{pauli_decompose, Su2Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn left() -> [C64; 2] {
    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
}

fn cases() -> Vec<(Family, f64, usize)> {
    vec![
        (Family::U1, PI, 20),
        (Family::U2, 7.0 * PI / 4.0, 240),
        (Family::U2, 7.0 * PI / 4.0, 320),
        (Family::U3, PI, 160),
        (Family::U3, PI, 320),
    ]
}

/// Fewest equal stages whose every stage clears the fabrication limit.
fn stage_count(spec: &ProtocolSpec, grid: &BlochGrid, params: &FeasibilityParams) -> usize {
    (1..=spec.tau.max(1))
        .filter(|&k| spec.tau.is_multiple_of(k))
        .find(|&k| {
            let len = spec.tau / k;
            (0..k).all(|i| {
                !feasibility_check(&spec.slice(i * len..(i + 1) * len), grid, params).hard_fail()
            })
        })
        .unwrap_or(1)
}

struct Compiled {
    spec: ProtocolSpec,
    stages: Vec<(ProtocolSpec, PlatePatternSet)>,
}

fn compile_case(family: Family, delta: f64, tau: usize) -> Result<Compiled, String> {
    let spec = ProtocolSpec::constant(family, delta, tau);
    let grid = BlochGrid::standard();
    let params = FeasibilityParams::default();
    let k = stage_count(&spec, &grid, &params);
    let stages =
        split_stages(&spec, &grid, k, &params).map_err(|e| format!("{}: {e}", spec.label()))?;
    let len = tau / k;
    let stages = stages
        .into_iter()
        .enumerate()
        .map(|(i, s)| (spec.slice(i * len..(i + 1) * len), s.patterns))
        .collect();
    Ok(Compiled { spec, stages })
}

fn c1_oracle_equivalence(compiled: &[Compiled]) -> Outcome {
    let mut notes = Vec::new();
    let mut worst = 1.0f64;
    for c in compiled {
        let t0 = Instant::now();
        let grid = c.stages[0].1.grid;
        let params = OpticsParams::for_grid(&grid);
        let limit = params.max_resolvable_mode().map_err(|e| e.to_string())?;
        let max_mode = (c.spec.light_cone() + 10).min(limit);
        let setup = OpticalSetup::new(c.stages.iter().map(|s| s.1.clone()).collect());
        let optics = simulate(&setup, left(), &params, max_mode)
            .map_err(|e| e.to_string())?
            .distribution();
        let s0 = WalkerState::localized_for(left(), &c.spec).map_err(|e| e.to_string())?;
        let oracle = distribution(&evolve(&s0, &c.spec).map_err(|e| e.to_string())?);
        let s = similarity(&optics, &oracle);
        let dt = t0.elapsed();
        worst = worst.min(s);
        notes.push(format!(
            "{} tau={} stages={} s={s:.6} ({:.2}s)",
            c.spec.family,
            c.spec.tau,
            c.stages.len(),
            dt.as_secs_f64()
        ));
        if s < 0.999 || dt > Duration::from_secs(60) {
            return Err(notes.join("; "));
        }
    }
    Ok(format!("worst similarity {worst:.6}; {}", notes.join("; ")))
}

fn c2_reconstruction(compiled: &[Compiled]) -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_seam_ratio = 0.0f64;
    for c in compiled {
        for (sub, p) in &c.stages {
            if p.grid.n_samples != 1250 {
                return Err(format!("{} samples instead of 1250", p.grid.n_samples));
            }
            let check = verify_reconstruction(p, sub);
            worst = worst.max(check.max_distance);
            let report = p
                .metadata
                .report
                .as_ref()
                .ok_or("missing compilation report")?;
            let (interior, seam) = p.sample_jumps();
            let ratio = interior.max(seam) / report.continuity_bound;
            worst_seam_ratio = worst_seam_ratio.max(ratio);
            if check.max_distance > 1e-9 || ratio > 1.0 {
                return Err(format!(
                    "{} stage of {} steps: distance {:.2e}, jumps {interior:.3}/{seam:.3} vs bound {:.3}",
                    c.spec.label(),
                    sub.tau,
                    check.max_distance,
                    report.continuity_bound
                ));
            }
        }
    }
    Ok(format!(
        "max distance {worst:.2e}; largest jump (seam included) at {:.0}% of its bound",
        100.0 * worst_seam_ratio
    ))
}

fn random_su2(rng: &mut ChaCha8Rng) -> Su2Matrix {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            let [a, b, c, d] = q.map(|x| x / n);
            let phase = C64::from_polar(1.0, rng.random_range(-PI..PI));
            return Su2Matrix::new([
                [C64::new(a, b) * phase, C64::new(c, d) * phase],
                [C64::new(-c, d) * phase, C64::new(a, -b) * phase],
            ]);
        }
    }
}

fn c3_branch_completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let target = random_su2(&mut rng);
        let candidates = qwalk_core::compiler::solve_angles(&pauli_decompose(&target));
        if candidates.len() != 8 {
            return Err(format!("target {i}: {} candidates", candidates.len()));
        }
        for t in &candidates {
            let d = t.jones().phase_distance(&target);
            worst = worst.max(d);
            if d > 1e-9 {
                return Err(format!("target {i}: candidate {:?} off by {d:.2e}", t.0));
            }
        }
    }
    Ok(format!(
        "1000 targets x 8 candidates, worst distance {worst:.2e}"
    ))
}

fn c4_square_root() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let delta = rng.random_range(0.0..2.0 * PI);
        let q = rng.random_range(-PI..PI);
        let r = sqrt_translation_bloch(delta, q);
        let d = (r * r).max_abs_diff(&translation_t_bloch(delta, q));
        worst = worst.max(d);
    }
    if worst <= 1e-13 {
        Ok(format!("100 pairs, worst entry error {worst:.2e}"))
    } else {
        Err(format!("worst entry error {worst:.2e}"))
    }
}

fn c5_feasibility() -> Outcome {
    let grid = BlochGrid::standard();
    let params = FeasibilityParams::default();
    let r240 = feasibility_check(
        &ProtocolSpec::constant(Family::U2, 7.0 * PI / 4.0, 240),
        &grid,
        &params,
    );
    let period = r240
        .min_modulation_period_um
        .ok_or("no modulation period")?;
    let r800 = feasibility_check(
        &ProtocolSpec::constant(Family::U2, 7.0 * PI / 4.0, 800),
        &grid,
        &params,
    );
    let three = r240.total_transmittance;
    let many = FeasibilityParams {
        n_plates: 480,
        ..params
    };
    let r480 = feasibility_check(
        &ProtocolSpec::constant(Family::U2, 7.0 * PI / 4.0, 240),
        &grid,
        &many,
    );
    let exponent = r480.total_transmittance.log10();
    let msg = format!(
        "period {period:.2} um, paraxial {:.4}, T3 {three:.3}, T480 1e{exponent:.2}",
        r800.paraxial_ratio
    );
    let ok = (period - 5000.0 / 240.0).abs() < 1e-9
        && format!("{period:.2}") == "20.83"
        && (r800.paraxial_ratio - 0.1013).abs() < 5e-5
        && (three - 0.614).abs() < 5e-4
        && ((exponent - (-34.0)) / 34.0).abs() < 0.01;
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c6_entanglement() -> Outcome {
    let t0 = Instant::now();
    let disorder = Disorder::uniform(0, PI, PI / 5.0);
    let dis = EntropyEnsemble::disordered(Family::U3, disorder, 10);
    let ord = EntropyEnsemble::ordered(Family::U3, PI);
    let phis: Vec<[C64; 2]> = (0..10).map(|k| linear_input(k as f64 * PI / 5.0)).collect();
    let per_input = entropy_per_input(&dis, &phis, 160).map_err(|e| e.to_string())?;
    let min = per_input.iter().copied().fold(f64::INFINITY, f64::min);

    let taus: Vec<usize> = (0..=160).step_by(10).collect();
    let inputs = linear_inputs(100);
    let dcurve = entropy_dynamics(&dis, &inputs, &taus).map_err(|e| e.to_string())?;
    let ocurve = entropy_dynamics(&ord, &inputs, &taus).map_err(|e| e.to_string())?;
    let mut monotone = true;
    for i in 1..taus.len() {
        let slack = 2.0 * (dcurve.sem[i].powi(2) + dcurve.sem[i - 1].powi(2)).sqrt();
        if dcurve.mean[i] + slack < dcurve.mean[i - 1] {
            monotone = false;
            eprintln!(
                "  curve drops from {:.4} at tau={} to {:.4} at tau={}",
                dcurve.mean[i - 1],
                taus[i - 1],
                dcurve.mean[i],
                taus[i]
            );
        }
    }
    let last = taus.len() - 1;
    let exceeds = dcurve.mean[last] > ocurve.mean[last];
    let dt = t0.elapsed();
    let msg = format!(
        "min input mean S {min:.4}; curve at 160: disordered {:.4}+-{:.4}, ordered {:.4}; monotone {monotone}; {:.1}s",
        dcurve.mean[last],
        dcurve.sem[last],
        ocurve.mean[last],
        dt.as_secs_f64()
    );
    if min > 0.98 && monotone && exceeds && dt < Duration::from_secs(600) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Large-ensemble expectation for the worst input, printed for context only.
fn c6_note() -> String {
    let big =
        EntropyEnsemble::disordered(Family::U3, Disorder::uniform(1_000_000, PI, PI / 5.0), 1000);
    match entropy_per_input(&big, &[linear_input(0.0)], 160) {
        Ok(v) => format!("note: 1000-realization mean S at phi=0 is {:.4}; the 10-realization pass depends on the seed", v[0]),
        Err(e) => format!("note: large ensemble failed: {e}"),
    }
}

fn random_coin(rng: &mut ChaCha8Rng) -> [C64; 2] {
    let u = random_su2(rng);
    u.apply(left())
}

fn c7_tomography() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let families = [Family::U1, Family::U2, Family::U3];
    let mut worst = 0.0f64;
    for i in 0..100 {
        let family = families[i % 3].clone();
        let tau = rng.random_range(0..40);
        let schedule = (0..tau).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let spec = ProtocolSpec::from_schedule(family, schedule);
        let s0 =
            WalkerState::localized_for(random_coin(&mut rng), &spec).map_err(|e| e.to_string())?;
        let state = evolve(&s0, &spec).map_err(|e| e.to_string())?;
        let direct = reduced_density_matrix(&state);
        let (_, tomo) =
            stokes_from_projections(&simulate_projections(&state)).map_err(|e| e.to_string())?;
        let d = tomo.max_abs_diff(&direct);
        worst = worst.max(d);
        if d > 1e-9 {
            return Err(format!("state {i}: {d:.2e}"));
        }
    }
    Ok(format!("100 states, worst entry error {worst:.2e}"))
}

fn c8_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_norm = 0.0f64;
    let mut cone_ok = true;
    for family in [Family::U1, Family::U2, Family::U3] {
        let schedule = (0..320).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let spec = ProtocolSpec::from_schedule(family.clone(), schedule);
        let r = family.coupling_range() as i64;
        let s0 =
            WalkerState::localized_for(random_coin(&mut rng), &spec).map_err(|e| e.to_string())?;
        evolve_observed(&s0, &spec, |t, s| {
            worst_norm = worst_norm.max((s.norm_sqr() - 1.0).abs());
            let h = s.half_width() as i64;
            for m in -h..=h {
                if m.abs() > r * t as i64 {
                    let [a, b] = s.amplitude(m);
                    if a.norm_sqr() + b.norm_sqr() != 0.0 {
                        cone_ok = false;
                    }
                }
            }
        })
        .map_err(|e| e.to_string())?;
    }

    let mut worst_bloch = 0.0f64;
    let grid = BlochGrid::with_samples(5.0, 2048).map_err(|e| e.to_string())?;
    for family in [Family::U1, Family::U2, Family::U3] {
        let schedule = (0..320).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let spec = ProtocolSpec::from_schedule(family, schedule);
        let s0 =
            WalkerState::localized_for(random_coin(&mut rng), &spec).map_err(|e| e.to_string())?;
        let a = evolve(&s0, &spec).map_err(|e| e.to_string())?;
        let b = bloch_evolve(&s0, &spec, &grid).map_err(|e| e.to_string())?;
        let h = a.half_width() as i64;
        for m in -h..=h {
            let ([x, y], [u, v]) = (a.amplitude(m), b.amplitude(m));
            worst_bloch = worst_bloch.max((x - u).norm()).max((y - v).norm());
        }
    }

    let spec = ProtocolSpec::constant(Family::U2, 7.0 * PI / 4.0, 60);
    let s0 = WalkerState::localized_for(left(), &spec).map_err(|e| e.to_string())?;
    let dist = distribution(&evolve(&s0, &spec).map_err(|e| e.to_string())?);
    let cam = CameraParams::default();
    let mut delta = vec![0.0; dist.probabilities().len()];
    delta[(-dist.first_site()) as usize] = 1.0;
    let off = ProbabilityDistribution::new(dist.first_site(), delta);
    let origin = calibrate_origin(&render_camera(&off, &cam).map_err(|e| e.to_string())?);
    let image = render_camera(&dist, &cam).map_err(|e| e.to_string())?;
    let back = extract_distribution(&image, origin, cam.spot_spacing, dist.sites())
        .map_err(|e| e.to_string())?;
    let tv = back.total_variation(&dist);

    let msg = format!(
        "norm drift {worst_norm:.2e}, light cone {}, bloch vs position {worst_bloch:.2e}, camera TV {tv:.2e}",
        if cone_ok { "respected" } else { "violated" }
    );
    if worst_norm <= 1e-10 && cone_ok && worst_bloch <= 1e-9 && tv <= 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(format!("{name}.toml"))
}

fn run_cli(cmd: &str, config: &Path, out: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args([
            cmd,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "5",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{cmd} failed: {}",
            String::from_utf8_lossy(&o.stderr)
        ))
    }
}

fn c9_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let entropy_cfg = dir.path().join("entropy.toml");
    std::fs::write(
        &entropy_cfg,
        "[protocol]\nfamily = \"U3\"\ndelta = \"pi\"\ntau = 40\n\
         [protocol.disorder]\nhalf_width = \"pi/5\"\n\
         [entropy]\nphi_inputs = 5\ncurve_inputs = 10\nrealizations = 4\ncurve_step = 10\n",
    )
    .map_err(|e| e.to_string())?;
    let runs = [
        ("compile", preset("fig3b")),
        ("simulate", preset("fig2")),
        ("entropy", entropy_cfg),
    ];
    let mut compared = 0;
    for (cmd, cfg) in &runs {
        let a = dir.path().join(format!("{cmd}_a"));
        let b = dir.path().join(format!("{cmd}_b"));
        run_cli(cmd, cfg, &a)?;
        run_cli(cmd, cfg, &b)?;
        let mut names: Vec<_> = std::fs::read_dir(&a)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for n in names {
            let x = std::fs::read(a.join(&n)).map_err(|e| e.to_string())?;
            let y = std::fs::read(b.join(&n)).map_err(|e| format!("{n:?}: {e}"))?;
            if x != y {
                return Err(format!("{cmd}: {n:?} differs between runs"));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} output files byte-identical across two runs"
    ))
}

fn main() {
    let compiled: Result<Vec<Compiled>, String> = cases()
        .into_iter()
        .map(|(f, d, t)| compile_case(f, d, t))
        .collect();
    let with_compiled = |f: fn(&[Compiled]) -> Outcome| -> Outcome {
        match &compiled {
            Ok(c) => f(c),
            Err(e) => Err(format!("compilation failed: {e}")),
        }
    };

    let results: Vec<(&str, Outcome)> = vec![
        ("1 oracle equivalence", with_compiled(c1_oracle_equivalence)),
        ("2 reconstruction bound", with_compiled(c2_reconstruction)),
        ("3 branch completeness", c3_branch_completeness()),
        ("4 square-root identity", c4_square_root()),
        ("5 feasibility numbers", c5_feasibility()),
        ("6 entanglement reproduction", c6_entanglement()),
        ("7 tomography consistency", c7_tomography()),
        ("8 property suites", c8_properties()),
        ("9 determinism", c9_determinism()),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    println!("{}", c6_note());
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
