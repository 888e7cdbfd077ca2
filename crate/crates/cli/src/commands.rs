//! Implementations of the five subcommands. Each one is a pure function of
//! (flags, input files, seed) with byte-stable outputs under fixed names in
//! the output directory.

use crate::config::{
    DataSource, EnvelopeChoice, EtaSpec, ExperimentConfig, GeneratorSpec, GramChoice,
};
use relugd::certificates::{capital_lambda, theorem_thresholds, RateCertificate, ThresholdInputs};
use relugd::gram::{
    check_pairwise_independence, deterministic_gram_closed_form, deterministic_gram_monte_carlo,
    DeterministicGram,
};
use relugd::io::{
    self, CertificateFile, DatasetFile, NetworkFile, ProbeReportFile, TrialOutcome,
    VerificationFile,
};
use relugd::linalg::RealVector;
use relugd::network::Dataset;
use relugd::probes::{run_suite, suite_failed, ProbeScale};
use relugd::rng::{tags, Stream};
use relugd::train::{initialize, train, GdTrajectory, TrainConfig};
use relugd::{Error, Result};
use std::path::{Path, PathBuf};

pub const DATASET_FILE: &str = "dataset.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const FINAL_NET_FILE: &str = "net_final.json";
pub const CERTIFICATE_FILE: &str = "certificate.json";
pub const VERIFICATION_FILE: &str = "verification.json";
pub const PROBE_REPORT_FILE: &str = "probes.json";

/// Attempts per input to replace a pairwise-dependent draw before giving up.
const GEN_MAX_ATTEMPTS: usize = 100;

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Samples a dataset from the generator spec: directions uniform on the
/// sphere, radii uniform in `norm_range`, targets standard normal. Inputs
/// that collide with an earlier one (pairwise dependent) are redrawn up to
/// 100 times before the generator spec is declared unsatisfiable.
pub fn generate_dataset(spec: &GeneratorSpec) -> Result<Dataset<f64>> {
    spec.validate()?;
    let root = Stream::new(spec.seed);
    let mut radii = root.substream(tags::DATA_RADII);
    let mut dirs = root.substream(tags::DATA_INPUTS);
    let mut targets_stream = root.substream(tags::DATA_TARGETS);
    let [lo, hi] = spec.norm_range;

    let mut inputs: Vec<Vec<f64>> = (0..spec.m)
        .map(|_| dirs.on_sphere(spec.d, radii.uniform_in(lo, hi)))
        .collect();
    let targets: Vec<f64> = (0..spec.m).map(|_| targets_stream.standard_normal()).collect();

    for _ in 0..GEN_MAX_ATTEMPTS {
        let data = Dataset::new(
            inputs
                .iter()
                .map(|x| RealVector::new(x.clone()))
                .collect::<Result<Vec<_>>>()?,
            targets.clone(),
        )?;
        let report = check_pairwise_independence(&data);
        if report.valid {
            return Ok(data);
        }
        for &(_, j) in &report.dependent_pairs {
            inputs[j] = dirs.on_sphere(spec.d, radii.uniform_in(lo, hi));
        }
    }
    let data = Dataset::new(
        inputs
            .into_iter()
            .map(RealVector::new)
            .collect::<Result<Vec<_>>>()?,
        targets,
    )?;
    let report = check_pairwise_independence(&data);
    Err(Error::InvalidData {
        reason: format!(
            "could not sample pairwise linearly independent inputs for d = {}, m = {} \
             after {GEN_MAX_ATTEMPTS} attempts",
            spec.d, spec.m
        ),
        pairs: report.dependent_pairs,
    })
}

pub fn cmd_gen_data(spec: &GeneratorSpec, out_dir: &Path) -> Result<PathBuf> {
    let data = generate_dataset(spec)?;
    ensure_dir(out_dir)?;
    let path = out_dir.join(DATASET_FILE);
    io::write_json(&path, &DatasetFile::from_dataset(&data))?;
    Ok(path)
}

fn load_dataset(path: &Path) -> Result<Dataset<f64>> {
    let file: DatasetFile = io::read_json(path)?;
    file.into_dataset()
}

/// Dataset from the configured source; the bool records whether it was
/// generated (and so should be written next to the other outputs).
fn resolve_data(source: &DataSource) -> Result<(Dataset<f64>, bool)> {
    match source {
        DataSource::Path(p) => Ok((load_dataset(p)?, false)),
        DataSource::Generator(spec) => Ok((generate_dataset(spec)?, true)),
    }
}

fn require_independent(data: &Dataset<f64>) -> Result<()> {
    let report = check_pairwise_independence(data);
    if report.valid {
        Ok(())
    } else {
        Err(Error::InvalidData {
            reason: "inputs are not pairwise linearly independent".into(),
            pairs: report.dependent_pairs,
        })
    }
}

fn gram_for(
    data: &Dataset<f64>,
    choice: GramChoice,
    mc_samples: u64,
    seed: u64,
) -> Result<DeterministicGram> {
    match choice {
        GramChoice::Closed => deterministic_gram_closed_form(data),
        GramChoice::Mc => deterministic_gram_monte_carlo(data, mc_samples, seed),
    }
}

fn resolve_eta(cfg: &ExperimentConfig, data: &Dataset<f64>, dg: &DeterministicGram) -> Result<f64> {
    match cfg.eta {
        EtaSpec::Value(v) => Ok(v),
        EtaSpec::Named(_) => {
            let (c, big_c) = relugd::certificates::data_radii(data);
            let thresholds = theorem_thresholds(&ThresholdInputs {
                lambda: dg.lambda,
                mu: dg.mu,
                c,
                big_c,
                m: data.len(),
                eps: cfg.eps,
                sumsq_x: data.sumsq_inputs(),
                y_norm: data.target_norm(),
            })?;
            Ok(thresholds.eta_max_cor)
        }
    }
}

fn rate_constant(
    choice: EnvelopeChoice,
    data: &Dataset<f64>,
    dg: &DeterministicGram,
) -> Result<f64> {
    match choice {
        EnvelopeChoice::SumOverM => Ok((dg.lambda + dg.mu) / data.len() as f64),
        EnvelopeChoice::CapitalLambda => {
            let (c, big_c) = relugd::certificates::data_radii(data);
            capital_lambda(dg.lambda, dg.mu, c, big_c, data.len(), data.target_norm())
        }
    }
}

pub fn cmd_train(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    envelope_override: Option<EnvelopeChoice>,
) -> Result<()> {
    cfg.validate()?;
    let (data, generated) = resolve_data(&cfg.data)?;
    require_independent(&data)?;
    let dg = gram_for(&data, cfg.gram, cfg.mc_samples, cfg.seed)?;
    let eta = resolve_eta(cfg, &data, &dg)?;
    let envelope = envelope_override.unwrap_or(cfg.envelope);
    let rate = rate_constant(envelope, &data, &dg)?;

    let train_cfg = TrainConfig {
        eta,
        steps: cfg.steps,
        seed: cfg.seed,
        width: cfg.width,
        record_gram_every: cfg.record_gram_every,
    };
    let net0 = initialize(data.input_dim(), cfg.width, cfg.seed);
    let traj = train(net0, &data, &train_cfg)?;

    ensure_dir(out_dir)?;
    if generated {
        io::write_json(&out_dir.join(DATASET_FILE), &DatasetFile::from_dataset(&data))?;
    }
    std::fs::write(
        out_dir.join(TRAJECTORY_FILE),
        io::trajectory_csv(&traj, eta, rate)?,
    )?;
    io::write_json(
        &out_dir.join(FINAL_NET_FILE),
        &NetworkFile::from_net(&traj.final_net),
    )?;
    println!(
        "trained {} steps at eta {eta:e}; risk {} -> {}",
        cfg.steps,
        traj.records.first().map(|r| r.risk).unwrap_or(f64::NAN),
        traj.records.last().map(|r| r.risk).unwrap_or(f64::NAN),
    );
    Ok(())
}

pub fn cmd_certify(
    data_path: &Path,
    eps: f64,
    gram: GramChoice,
    mc_samples: u64,
    seed: u64,
    out_dir: &Path,
) -> Result<PathBuf> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
    }
    let data = load_dataset(data_path)?;
    require_independent(&data)?;
    let dg = gram_for(&data, gram, mc_samples, seed)?;
    let cert = RateCertificate::evaluate(&data, &dg, eps)?;
    ensure_dir(out_dir)?;
    let path = out_dir.join(CERTIFICATE_FILE);
    io::write_json(&path, &CertificateFile::new(cert, &dg))?;
    Ok(path)
}

/// Risk stays under factorⁿ·risk(0) at every recorded step. A decay factor
/// outside (0, 1] certifies nothing and counts as a violation.
fn envelope_held(traj: &GdTrajectory, factor: f64) -> bool {
    if !(factor > 0.0 && factor <= 1.0) {
        return false;
    }
    let risk0 = traj.records[0].risk;
    traj.records
        .iter()
        .all(|r| r.risk <= factor.powi(r.step as i32) * risk0)
}

fn monotone(traj: &GdTrajectory) -> bool {
    traj.records.windows(2).all(|w| w[1].risk <= w[0].risk)
}

pub fn cmd_verify_convergence(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    cfg.validate()?;
    let (data, _) = resolve_data(&cfg.data)?;
    require_independent(&data)?;
    let dg = gram_for(&data, cfg.gram, cfg.mc_samples, cfg.seed)?;
    let eta = resolve_eta(cfg, &data, &dg)?;
    let (c, big_c) = relugd::certificates::data_radii(&data);
    let cl = capital_lambda(dg.lambda, dg.mu, c, big_c, data.len(), data.target_norm())?;
    let rate_som = (dg.lambda + dg.mu) / data.len() as f64;

    let seed_root = Stream::new(cfg.seed);
    let mut per_trial = Vec::with_capacity(cfg.trials as usize);
    for t in 0..cfg.trials {
        let trial_seed = seed_root.substream(tags::trial(t)).next_u64();
        let train_cfg = TrainConfig {
            eta,
            steps: cfg.steps,
            seed: trial_seed,
            width: cfg.width,
            record_gram_every: 0,
        };
        let net0 = initialize(data.input_dim(), cfg.width, trial_seed);
        match train(net0, &data, &train_cfg) {
            Ok(traj) => per_trial.push(TrialOutcome {
                trial: t,
                seed: trial_seed,
                diverged: false,
                envelope_capital_lambda: envelope_held(&traj, 1.0 - eta * cl),
                envelope_sum_over_m: envelope_held(&traj, 1.0 - eta * rate_som),
                monotone: monotone(&traj),
                initial_risk: traj.records[0].risk,
                final_risk: traj.records.last().map(|r| r.risk),
            }),
            Err(Error::Divergence { risk, .. }) => per_trial.push(TrialOutcome {
                trial: t,
                seed: trial_seed,
                diverged: true,
                envelope_capital_lambda: false,
                envelope_sum_over_m: false,
                monotone: false,
                initial_risk: risk,
                final_risk: None,
            }),
            Err(e) => return Err(e),
        }
    }
    let frac = |f: &dyn Fn(&TrialOutcome) -> bool| {
        per_trial.iter().filter(|t| f(t)).count() as f64 / cfg.trials as f64
    };
    let report = VerificationFile {
        schema: io::VERIFICATION_SCHEMA.to_string(),
        trials: cfg.trials,
        eps: cfg.eps,
        eta,
        steps: cfg.steps,
        width: cfg.width,
        capital_lambda: cl,
        rate_sum_over_m: rate_som,
        target: 1.0 - cfg.eps,
        fraction_envelope_capital_lambda: frac(&|t| t.envelope_capital_lambda),
        fraction_envelope_sum_over_m: frac(&|t| t.envelope_sum_over_m),
        fraction_monotone: frac(&|t| t.monotone),
        per_trial,
    };
    ensure_dir(out_dir)?;
    let path = out_dir.join(VERIFICATION_FILE);
    io::write_json(&path, &report)?;
    println!(
        "verified {} trials: envelope fraction {} (target {})",
        cfg.trials, report.fraction_envelope_capital_lambda, report.target
    );
    Ok(path)
}

/// Runs the probe suite; returns true if any non-vacuous probe failed.
pub fn cmd_probe_lemmas(seed: u64, scale: ProbeScale, out_dir: &Path) -> Result<bool> {
    let results = run_suite(scale, seed)?;
    let failed = suite_failed(&results);
    ensure_dir(out_dir)?;
    let report = ProbeReportFile {
        schema: io::PROBE_REPORT_SCHEMA.to_string(),
        scale: match scale {
            ProbeScale::Quick => "quick".into(),
            ProbeScale::Full => "full".into(),
        },
        seed,
        probes: results,
    };
    io::write_json(&out_dir.join(PROBE_REPORT_FILE), &report)?;
    for p in &report.probes {
        println!(
            "{} {} (statistic {:e}, bound {:e}{})",
            if p.pass { "pass" } else { "FAIL" },
            p.name,
            p.statistic,
            p.bound,
            if p.vacuous { ", vacuous" } else { "" }
        );
    }
    Ok(failed)
}
