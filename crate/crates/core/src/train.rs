//! Seeded random initialization and the full-batch gradient descent process
//! with a frozen output layer.
//!
//! Initialization draws the hidden weights i.i.d. standard normal and the
//! output weights normal with variance 1/width; both bias vectors start at
//! exactly zero. A GD step updates hidden weights, hidden biases, and the
//! output bias by the exact risk-gradient formulas with the closed-half-line
//! kink convention; the output weights are never touched. Everything is a
//! pure function of (seed, config, data), so replays are bit-identical.

use crate::error::{Error, Result};
use crate::gram::stochastic_gram;
use crate::linalg::{lambda_min, slice_dot, slice_norm, RectMatrix};
use crate::network::{empirical_risk, realize, Dataset, ShallowReluNet};
use crate::rng::{tags, Stream};

/// Risk above `DIVERGENCE_FACTOR × risk(0)` (or non-finite) aborts training.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Learning rate η ≥ 0; zero is the degenerate no-op run.
    pub eta: f64,
    /// Number of GD steps; the trajectory has `steps + 1` entries.
    pub steps: usize,
    pub seed: u64,
    pub width: usize,
    /// Record Gram eigenvalues and per-neuron drifts every this many steps;
    /// 0 means never.
    pub record_gram_every: usize,
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::Domain(format!(
                "eta must be finite and nonnegative, got {}",
                self.eta
            )));
        }
        if self.width == 0 {
            return Err(Error::Domain("width must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything recorded at one step of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// f(n) ∈ ℝ^m, recomputed from the step-n parameters.
    pub predictions: Vec<f64>,
    /// Empirical risk (1/m)·‖f(n) − y‖².
    pub risk: f64,
    /// ‖f(n) − y‖².
    pub sq_err: f64,
    /// max_k ‖W_k(n) − W_k(0)‖.
    pub max_drift_w: f64,
    /// max_k |B_k(n) − B_k(0)|.
    pub max_drift_b: f64,
    /// Per-neuron drifts (‖W_k(n)−W_k(0)‖, |B_k(n)−B_k(0)|); kept only at
    /// Gram-recording steps to bound memory.
    pub neuron_drifts: Option<(Vec<f64>, Vec<f64>)>,
    pub lambda_min_g: Option<f64>,
    pub lambda_min_h: Option<f64>,
}

/// Trajectory of a full training run.
#[derive(Debug, Clone, PartialEq)]
pub struct GdTrajectory {
    pub records: Vec<StepRecord>,
    /// Full parameter snapshots at the recording steps, `(step, net)`.
    pub snapshots: Vec<(usize, ShallowReluNet<f64>)>,
    pub initial: ShallowReluNet<f64>,
    pub final_net: ShallowReluNet<f64>,
}

/// Per-step comparison of observed drifts against the drift bounds
/// (4·C·‖f(0)−y‖/(λ+μ))·√(2m·ln(2·width/ε)/width) for the weights and the
/// same expression without the C factor for the biases.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub weight_bound: f64,
    pub bias_bound: f64,
    pub steps: Vec<DriftCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftCheck {
    pub step: usize,
    pub observed_w: f64,
    pub observed_b: f64,
    pub weight_ok: bool,
    pub bias_ok: bool,
}

/// Random initialization: hidden weights standard normal, output weights
/// normal with variance 1/width (so √width·Wout_k is standard normal), and
/// both bias vectors exactly zero. Fully determined by the seed.
pub fn initialize(input_dim: usize, width: usize, seed: u64) -> ShallowReluNet<f64> {
    let root = Stream::new(seed);
    let mut w_stream = root.substream(tags::HIDDEN_WEIGHTS);
    let mut out_stream = root.substream(tags::OUTPUT_WEIGHTS);
    let weights = w_stream.normal_vec(width * input_dim);
    let scale = 1.0 / (width as f64).sqrt();
    let wout: Vec<f64> = (0..width)
        .map(|_| out_stream.standard_normal() * scale)
        .collect();
    ShallowReluNet::new(
        RectMatrix::new(width, input_dim, weights).expect("finite normal draws"),
        vec![0.0; width],
        wout,
        0.0,
    )
    .expect("initialization is well formed")
}

/// One full-batch GD step:
///
///   W_k ← W_k − (2η/m)·Σⱼ (fⱼ−yⱼ)·Wout_k·𝟙[⟨W_k,xⱼ⟩+B_k ≥ 0]·xⱼ,
///   B_k ← B_k − (2η/m)·Σⱼ (fⱼ−yⱼ)·Wout_k·𝟙[⟨W_k,xⱼ⟩+B_k ≥ 0],
///   bias_out ← bias_out − (2η/m)·Σⱼ (fⱼ−yⱼ),
///
/// with the output weights returned bit-unchanged.
pub fn gd_step(
    net: &ShallowReluNet<f64>,
    data: &Dataset<f64>,
    eta: f64,
) -> Result<ShallowReluNet<f64>> {
    if data.input_dim() != net.input_dim() {
        return Err(Error::Dimension(format!(
            "data dim {} vs net dim {}",
            data.input_dim(),
            net.input_dim()
        )));
    }
    let m = data.len();
    let d = net.input_dim();
    let width = net.width();
    let step_scale = 2.0 * eta / m as f64;

    let mut residuals = Vec::with_capacity(m);
    for j in 0..m {
        residuals.push(realize(net, data.input(j))? - data.target(j));
    }

    let mut new_w = net.hidden_weights().clone();
    let mut new_b = net.hidden_biases().to_vec();
    for k in 0..width {
        let wk = net.hidden_weight_row(k);
        let bk = net.hidden_biases()[k];
        let ok = net.output_weights()[k];
        let mut row_sum = vec![0.0; d];
        let mut bias_sum = 0.0;
        for j in 0..m {
            let pre = slice_dot(wk, data.input(j).entries()) + bk;
            if pre >= 0.0 {
                let coef = residuals[j] * ok;
                let xj = data.input(j).entries();
                for l in 0..d {
                    row_sum[l] += coef * xj[l];
                }
                bias_sum += coef;
            }
        }
        for l in 0..d {
            new_w.set(k, l, wk[l] - step_scale * row_sum[l]);
        }
        new_b[k] = bk - step_scale * bias_sum;
    }
    let mut res_sum = 0.0;
    for j in 0..m {
        res_sum += residuals[j];
    }
    let new_bias_out = net.output_bias() - step_scale * res_sum;

    ShallowReluNet::new(new_w, new_b, net.output_weights().to_vec(), new_bias_out)
}

fn neuron_drifts(net: &ShallowReluNet<f64>, init: &ShallowReluNet<f64>) -> (Vec<f64>, Vec<f64>) {
    let width = net.width();
    let d = net.input_dim();
    let mut w = Vec::with_capacity(width);
    let mut b = Vec::with_capacity(width);
    let mut diff = vec![0.0; d];
    for k in 0..width {
        let now = net.hidden_weight_row(k);
        let was = init.hidden_weight_row(k);
        for l in 0..d {
            diff[l] = now[l] - was[l];
        }
        w.push(slice_norm(&diff));
        b.push((net.hidden_biases()[k] - init.hidden_biases()[k]).abs());
    }
    (w, b)
}

/// Runs `config.steps` GD steps from `net0`, recording scalars at every step
/// and Gram eigenvalues, per-neuron drifts, and full snapshots at every
/// `record_gram_every`-th step. Aborts with a divergence error if the risk
/// becomes non-finite or exceeds `1e3` times the initial risk.
pub fn train(
    net0: ShallowReluNet<f64>,
    data: &Dataset<f64>,
    config: &TrainConfig,
) -> Result<GdTrajectory> {
    config.validate()?;
    let mut records = Vec::with_capacity(config.steps + 1);
    let mut snapshots = Vec::new();
    let initial = net0.clone();
    let mut net = net0;
    let mut risk0 = f64::INFINITY;

    for step in 0..=config.steps {
        let mut predictions = Vec::with_capacity(data.len());
        for j in 0..data.len() {
            predictions.push(realize(&net, data.input(j))?);
        }
        let mut sq_err = 0.0;
        for (j, &f) in predictions.iter().enumerate() {
            let r = f - data.target(j);
            sq_err += r * r;
        }
        let risk = empirical_risk(&net, data)?;
        if step == 0 {
            risk0 = risk;
        }
        if !risk.is_finite() || risk > DIVERGENCE_FACTOR * risk0 {
            return Err(Error::Divergence { step, risk });
        }

        let record_full =
            config.record_gram_every > 0 && step % config.record_gram_every == 0;
        let (w_drifts, b_drifts) = neuron_drifts(&net, &initial);
        let max_drift_w = w_drifts.iter().fold(0.0f64, |a, &x| a.max(x));
        let max_drift_b = b_drifts.iter().fold(0.0f64, |a, &x| a.max(x));
        let (lambda_min_g, lambda_min_h, kept_drifts) = if record_full {
            let pair = stochastic_gram(&net, data)?;
            snapshots.push((step, net.clone()));
            (
                Some(lambda_min(&pair.g)),
                Some(lambda_min(&pair.h)),
                Some((w_drifts, b_drifts)),
            )
        } else {
            (None, None, None)
        };
        records.push(StepRecord {
            step,
            predictions,
            risk,
            sq_err,
            max_drift_w,
            max_drift_b,
            neuron_drifts: kept_drifts,
            lambda_min_g,
            lambda_min_h,
        });

        if step < config.steps {
            net = gd_step(&net, data, config.eta)?;
        }
    }
    if snapshots.last().map(|(s, _)| *s) != Some(config.steps) {
        snapshots.push((config.steps, net.clone()));
    }
    Ok(GdTrajectory {
        records,
        snapshots,
        initial,
        final_net: net,
    })
}

/// Evaluates the per-step drift bounds. `eps` is the tail probability of the
/// output-weight cap event, `lambda + mu` must be positive, and `big_c` is
/// the largest input norm.
pub fn weight_drift_bound(
    traj: &GdTrajectory,
    eps: f64,
    lambda: f64,
    mu: f64,
    big_c: f64,
) -> Result<DriftReport> {
    if !(lambda + mu > 0.0) {
        return Err(Error::Domain(format!(
            "lambda + mu must be positive, got {}",
            lambda + mu
        )));
    }
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
    }
    let first = traj
        .records
        .first()
        .ok_or_else(|| Error::Contract("empty trajectory".into()))?;
    let m = first.predictions.len() as f64;
    let width = traj.initial.width() as f64;
    let err0 = first.sq_err.sqrt();
    let log_term = (2.0 * width / eps).ln();
    let tail = (2.0 * m * log_term / width).sqrt();
    let weight_bound = 4.0 * big_c * err0 / (lambda + mu) * tail;
    let bias_bound = 4.0 * err0 / (lambda + mu) * tail;
    let steps = traj
        .records
        .iter()
        .map(|r| DriftCheck {
            step: r.step,
            observed_w: r.max_drift_w,
            observed_b: r.max_drift_b,
            weight_ok: r.max_drift_w <= weight_bound,
            bias_ok: r.max_drift_b <= bias_bound,
        })
        .collect();
    Ok(DriftReport {
        weight_bound,
        bias_bound,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RealVector;

    fn small_data() -> Dataset<f64> {
        Dataset::new(
            vec![
                RealVector::new(vec![1.0, 0.0]).unwrap(),
                RealVector::new(vec![0.0, 1.0]).unwrap(),
                RealVector::new(vec![-0.6, 0.8]).unwrap(),
            ],
            vec![0.4, -0.2, 0.9],
        )
        .unwrap()
    }

    #[test]
    fn initialize_biases_are_exactly_zero() {
        let net = initialize(3, 16, 99);
        assert!(net.hidden_biases().iter().all(|&b| b == 0.0));
        assert_eq!(net.output_bias(), 0.0);
    }

    #[test]
    fn initialize_is_deterministic() {
        let a = initialize(2, 8, 7);
        let b = initialize(2, 8, 7);
        assert_eq!(a, b);
        let c = initialize(2, 8, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn initialize_moments_match_their_laws() {
        // Over many draws: Var[Wout_1] ≈ 1/width, E[W_11] ≈ 0.
        let width = 64;
        let trials = 10_000;
        let mut wout_sum = 0.0;
        let mut wout_sumsq = 0.0;
        let mut w11_sum = 0.0;
        for t in 0..trials {
            let net = initialize(2, width, 1000 + t as u64);
            let w = net.output_weights()[0];
            wout_sum += w;
            wout_sumsq += w * w;
            w11_sum += net.hidden_weight_row(0)[0];
        }
        let n = trials as f64;
        let var = wout_sumsq / n - (wout_sum / n).powi(2);
        // Var of a sample variance of normals: 2σ⁴/n ⇒ SE = √2·σ²/√n.
        let se_var = (2.0f64).sqrt() / width as f64 / n.sqrt();
        assert!(
            (var - 1.0 / width as f64).abs() <= 5.0 * se_var,
            "var {var}, target {}",
            1.0 / width as f64
        );
        let se_mean = 1.0 / n.sqrt();
        assert!((w11_sum / n).abs() <= 5.0 * se_mean);
    }

    #[test]
    fn gd_step_eta_zero_is_identity() {
        let data = small_data();
        let net = initialize(2, 8, 44);
        let stepped = gd_step(&net, &data, 0.0).unwrap();
        assert_eq!(stepped, net);
    }

    #[test]
    fn gd_step_keeps_output_weights_bit_equal() {
        let data = small_data();
        let mut net = initialize(2, 32, 5);
        let wout0: Vec<u64> = net.output_weights().iter().map(|w| w.to_bits()).collect();
        for _ in 0..25 {
            net = gd_step(&net, &data, 0.05).unwrap();
        }
        let wout: Vec<u64> = net.output_weights().iter().map(|w| w.to_bits()).collect();
        assert_eq!(wout0, wout);
    }

    #[test]
    fn gd_step_hand_instance() {
        // m = d = width = 1, active unit: every update evaluated by hand.
        let net = ShallowReluNet::new(
            RectMatrix::new(1, 1, vec![2.0]).unwrap(),
            vec![-1.0],
            vec![3.0],
            0.5,
        )
        .unwrap();
        let data = Dataset::new(vec![RealVector::new(vec![1.0]).unwrap()], vec![1.0]).unwrap();
        let eta = 0.1;
        let f = 3.5;
        let res = f - 1.0;
        let stepped = gd_step(&net, &data, eta).unwrap();
        let scale = 2.0 * eta / 1.0;
        assert_eq!(stepped.hidden_weight_row(0)[0], 2.0 - scale * res * 3.0 * 1.0);
        assert_eq!(stepped.hidden_biases()[0], -1.0 - scale * res * 3.0);
        assert_eq!(stepped.output_bias(), 0.5 - scale * res);
        assert_eq!(stepped.output_weights()[0], 3.0);
    }

    #[test]
    fn gd_step_agrees_with_risk_gradient_to_ulp_scale() {
        let data = small_data();
        let net = initialize(2, 16, 12);
        let eta = 0.07;
        let stepped = gd_step(&net, &data, eta).unwrap();
        let g = crate::network::risk_gradient(&net, &data).unwrap();
        let tol = |a: f64, b: f64| 4.0 * f64::EPSILON * (a.abs() + b.abs()).max(f64::MIN_POSITIVE);
        for k in 0..net.width() {
            for l in 0..net.input_dim() {
                let direct = stepped.hidden_weight_row(k)[l];
                let via_grad = net.hidden_weight_row(k)[l] - eta * g.d_weights.get(k, l);
                assert!(
                    (direct - via_grad).abs() <= tol(direct, via_grad),
                    "W[{k}][{l}]: {direct} vs {via_grad}"
                );
            }
            let direct = stepped.hidden_biases()[k];
            let via_grad = net.hidden_biases()[k] - eta * g.d_biases[k];
            assert!((direct - via_grad).abs() <= tol(direct, via_grad));
        }
        let direct = stepped.output_bias();
        let via_grad = net.output_bias() - eta * g.d_output_bias;
        assert!((direct - via_grad).abs() <= tol(direct, via_grad));
    }

    #[test]
    fn train_zero_steps_holds_initial_state_only() {
        let data = small_data();
        let cfg = TrainConfig {
            eta: 0.1,
            steps: 0,
            seed: 3,
            width: 8,
            record_gram_every: 0,
        };
        let traj = train(initialize(2, 8, 3), &data, &cfg).unwrap();
        assert_eq!(traj.records.len(), 1);
        assert_eq!(traj.initial, traj.final_net);
    }

    #[test]
    fn train_replay_is_bit_identical() {
        let data = small_data();
        let cfg = TrainConfig {
            eta: 0.05,
            steps: 30,
            seed: 17,
            width: 32,
            record_gram_every: 10,
        };
        let a = train(initialize(2, 32, 17), &data, &cfg).unwrap();
        let b = train(initialize(2, 32, 17), &data, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn train_records_recompute_from_snapshots() {
        let data = small_data();
        let cfg = TrainConfig {
            eta: 0.02,
            steps: 20,
            seed: 23,
            width: 16,
            record_gram_every: 5,
        };
        let traj = train(initialize(2, 16, 23), &data, &cfg).unwrap();
        for (step, net) in &traj.snapshots {
            let rec = &traj.records[*step];
            assert_eq!(rec.risk, empirical_risk(net, &data).unwrap());
            for j in 0..data.len() {
                assert_eq!(rec.predictions[j], realize(net, data.input(j)).unwrap());
            }
        }
    }

    #[test]
    fn train_diverges_with_huge_eta() {
        let data = small_data();
        let cfg = TrainConfig {
            eta: 1e6,
            steps: 50,
            seed: 2,
            width: 16,
            record_gram_every: 0,
        };
        match train(initialize(2, 16, 2), &data, &cfg) {
            Err(Error::Divergence { step, .. }) => assert!(step > 0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn monotone_risk_for_small_eta_on_most_seeds() {
        // width 2048, d = 2, m = 4: a small learning rate drives the risk
        // down monotonically on at least 18 of 20 seeds.
        let data = Dataset::new(
            vec![
                RealVector::new(vec![1.0, 0.0]).unwrap(),
                RealVector::new(vec![0.0, 1.0]).unwrap(),
                RealVector::new(vec![-0.6, 0.8]).unwrap(),
                RealVector::new(vec![0.8, 0.6]).unwrap(),
            ],
            vec![0.4, -0.2, 0.9, 0.1],
        )
        .unwrap();
        let mut monotone = 0;
        for seed in 0..20u64 {
            let cfg = TrainConfig {
                eta: 1e-4,
                steps: 100,
                seed,
                width: 2048,
                record_gram_every: 0,
            };
            let traj = train(initialize(2, 2048, seed), &data, &cfg).unwrap();
            if traj
                .records
                .windows(2)
                .all(|w| w[1].risk <= w[0].risk + 1e-15)
            {
                monotone += 1;
            }
        }
        assert!(monotone >= 18, "monotone on only {monotone}/20 seeds");
    }

    #[test]
    fn drift_bound_plug_in_value() {
        // (C=1, ‖f(0)−y‖=2, λ+μ=0.5, m=4, width=4096, ε=0.1)
        // → 16·(8·ln(81920)/4096)^{1/2}, re-derived step by step.
        let expect = 16.0 * (8.0 * (81920.0f64).ln() / 4096.0).sqrt();
        let prefactor = 4.0 * 1.0 * 2.0 / 0.5;
        let tail = (2.0 * 4.0 * (2.0 * 4096.0 / 0.1f64).ln() / 4096.0).sqrt();
        assert!((prefactor * tail - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn drift_report_step_zero_is_within_any_bound() {
        let data = small_data();
        let cfg = TrainConfig {
            eta: 1e-3,
            steps: 10,
            seed: 31,
            width: 64,
            record_gram_every: 0,
        };
        let traj = train(initialize(2, 64, 31), &data, &cfg).unwrap();
        let report = weight_drift_bound(&traj, 0.1, 0.2, 0.3, 1.0).unwrap();
        assert!(report.steps[0].observed_w == 0.0 && report.steps[0].weight_ok);
        assert!(report.steps[0].observed_b == 0.0 && report.steps[0].bias_ok);
    }

    #[test]
    fn drift_report_rejects_nonpositive_rate_sum() {
        let data = small_data();
        let cfg = TrainConfig {
            eta: 1e-3,
            steps: 1,
            seed: 1,
            width: 4,
            record_gram_every: 0,
        };
        let traj = train(initialize(2, 4, 1), &data, &cfg).unwrap();
        assert!(weight_drift_bound(&traj, 0.1, 0.0, 0.0, 1.0).is_err());
    }
}
