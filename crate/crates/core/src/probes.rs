//! Monte Carlo probes for the standalone probabilistic facts the
//! convergence analysis rests on: the rectified-Gaussian second moment, the
//! Gaussian tail and anti-concentration bounds, the sub-exponential moment
//! generating function and tail bounds for indicator-masked chi-square
//! variables, the expected squared error at initialization, and the
//! output-weight sup bound.
//!
//! Every probe is a pure function of (parameters, samples, seed) and reports
//! pass/fail against its bound with explicit statistical slack: 3 standard
//! errors for one-sided tail checks, 5 for mean-matching checks. Bounds that
//! exceed one certify nothing; such probes pass with a `vacuous` flag.

use crate::error::{Error, Result};
use crate::network::{realize, Dataset};
use crate::rng::Stream;
use crate::train::initialize;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tail probes tolerate this many standard errors above the bound.
pub const TAIL_SLACK_SE: f64 = 3.0;
/// Mean-matching probes tolerate this many standard errors of mismatch.
pub const MEAN_SLACK_SE: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub name: String,
    pub samples: u64,
    /// Measured statistic (a mean, a tail fraction, or a worst-grid value).
    pub statistic: f64,
    /// The bound or target it is compared against.
    pub bound: f64,
    /// Standard error of the statistic, when meaningful.
    pub se: Option<f64>,
    pub pass: bool,
    /// The bound exceeds one (or the floor is below zero): certifies nothing.
    pub vacuous: bool,
    pub seed: u64,
}

fn mean_and_se(sum: f64, sumsq: f64, n: f64) -> (f64, f64) {
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

fn fraction_and_se(hits: u64, n: u64) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// E[r(X − E[X])²] = σ²/2 for normal X with variance σ².
pub fn rectified_second_moment(sigma: f64, samples: u64, seed: u64) -> Result<ProbeResult> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    if samples < 10_000 {
        return Err(Error::Domain(format!(
            "need at least 1e4 samples, got {samples}"
        )));
    }
    let mut stream = Stream::new(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..samples {
        let x = sigma * stream.standard_normal();
        let r = x.max(0.0);
        let v = r * r;
        sum += v;
        sumsq += v * v;
    }
    let (mean, se) = mean_and_se(sum, sumsq, samples as f64);
    let target = sigma * sigma / 2.0;
    Ok(ProbeResult {
        name: format!("rectified_second_moment_sigma_{sigma}"),
        samples,
        statistic: mean,
        bound: target,
        se: Some(se),
        pass: (mean - target).abs() <= MEAN_SLACK_SE * se,
        vacuous: false,
        seed,
    })
}

/// P(|X| ≥ ε) ≤ 2·exp(−ε²/2) for standard normal X.
pub fn gaussian_tail(eps: f64, samples: u64, seed: u64) -> Result<ProbeResult> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let mut stream = Stream::new(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        if stream.standard_normal().abs() >= eps {
            hits += 1;
        }
    }
    let (p, se) = fraction_and_se(hits, samples);
    let bound = 2.0 * (-eps * eps / 2.0).exp();
    Ok(ProbeResult {
        name: format!("gaussian_tail_eps_{eps}"),
        samples,
        statistic: p,
        bound,
        se: Some(se),
        pass: p <= bound + TAIL_SLACK_SE * se,
        vacuous: bound >= 1.0,
        seed,
    })
}

/// P(|X| ≤ ε) ≤ 2ε/√(2π) for standard normal X.
pub fn anti_concentration(eps: f64, samples: u64, seed: u64) -> Result<ProbeResult> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let mut stream = Stream::new(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        if stream.standard_normal().abs() <= eps {
            hits += 1;
        }
    }
    let (p, se) = fraction_and_se(hits, samples);
    let bound = 2.0 * eps / (2.0 * PI).sqrt();
    Ok(ProbeResult {
        name: format!("anti_concentration_eps_{eps}"),
        samples,
        statistic: p,
        bound,
        se: Some(se),
        pass: p <= bound + TAIL_SLACK_SE * se,
        vacuous: bound >= 1.0,
        seed,
    })
}

/// Shared MGF grid check: the empirical mean of exp(λ(Y − E\[Y\])) must stay
/// below exp(λ²ν²/2) at every grid point, with 5-SE slack. The grid must
/// lie inside (−1/b, 1/b).
#[allow(clippy::too_many_arguments)]
fn mgf_grid_probe(
    name: String,
    mut sampler: impl FnMut(&mut Stream) -> f64,
    expectation: f64,
    nu: f64,
    b: f64,
    lambda_grid: &[f64],
    samples: u64,
    seed: u64,
) -> Result<ProbeResult> {
    for &l in lambda_grid {
        if l.abs() >= 1.0 / b {
            return Err(Error::Domain(format!(
                "lambda {l} outside (-{0}, {0})",
                1.0 / b
            )));
        }
    }
    if lambda_grid.is_empty() {
        return Err(Error::Domain("lambda grid must be nonempty".into()));
    }
    let mut stream = Stream::new(seed);
    let g = lambda_grid.len();
    let mut sums = vec![0.0; g];
    let mut sumsqs = vec![0.0; g];
    for _ in 0..samples {
        let y = sampler(&mut stream) - expectation;
        for (i, &l) in lambda_grid.iter().enumerate() {
            let e = (l * y).exp();
            sums[i] += e;
            sumsqs[i] += e * e;
        }
    }
    // Report the grid point closest to violating its bound.
    let mut worst: Option<(f64, f64, f64, f64)> = None;
    for i in 0..g {
        let (mean, se) = mean_and_se(sums[i], sumsqs[i], samples as f64);
        let bound = (lambda_grid[i] * lambda_grid[i] * nu * nu / 2.0).exp();
        let margin = mean - (bound + MEAN_SLACK_SE * se);
        if worst.is_none() || margin > worst.unwrap().0 {
            worst = Some((margin, mean, bound, se));
        }
    }
    let (margin, mean, bound, se) = worst.unwrap();
    Ok(ProbeResult {
        name,
        samples,
        statistic: mean,
        bound,
        se: Some(se),
        pass: margin <= 0.0,
        vacuous: false,
        seed,
    })
}

/// MGF bound for Y = X²·𝟙_A with X standard normal and an independent event
/// of probability p: Y is sub-exponential with (ν, b) = (2, 4), so
/// E[exp(λ(Y − p))] ≤ exp(2λ²) for |λ| < 1/4.
pub fn subexp_mgf(p: f64, lambda_grid: &[f64], samples: u64, seed: u64) -> Result<ProbeResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0,1], got {p}")));
    }
    mgf_grid_probe(
        format!("subexp_mgf_p_{p}"),
        move |s| {
            let x = s.standard_normal();
            if s.bernoulli(p) {
                x * x
            } else {
                0.0
            }
        },
        p,
        2.0,
        4.0,
        lambda_grid,
        samples,
        seed,
    )
}

/// MGF bound for the heterogeneous sum Y = Σ_k σ_k²·Z_k²·𝟙_{A_k}, which is
/// sub-exponential with ν = 2·(Σσ⁴)^½ and b = 4·max σ².
pub fn subexp_sum_mgf(
    sigmas: &[f64],
    ps: &[f64],
    lambda_grid: &[f64],
    samples: u64,
    seed: u64,
) -> Result<ProbeResult> {
    if sigmas.is_empty() || sigmas.len() != ps.len() {
        return Err(Error::Domain("sigmas and ps must have equal nonzero length".into()));
    }
    if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Domain("every p must lie in [0,1]".into()));
    }
    let nu = 2.0 * sigmas.iter().map(|s| s.powi(4)).sum::<f64>().sqrt();
    let b = 4.0 * sigmas.iter().fold(0.0f64, |a, &s| a.max(s * s));
    let expectation: f64 = sigmas.iter().zip(ps).map(|(s, p)| s * s * p).sum();
    let sigmas = sigmas.to_vec();
    let ps = ps.to_vec();
    mgf_grid_probe(
        format!("subexp_sum_mgf_n_{}", sigmas.len()),
        move |stream| {
            let mut y = 0.0;
            for (s, p) in sigmas.iter().zip(&ps) {
                let z = stream.standard_normal();
                if stream.bernoulli(*p) {
                    y += s * s * z * z;
                }
            }
            y
        },
        expectation,
        nu,
        b,
        lambda_grid,
        samples,
        seed,
    )
}

/// Tail bound for the (2,4)-sub-exponential Y = X²·𝟙_A:
/// P(|Y − E[Y]| ≥ ε) ≤ 2·exp(−½·min{ε²/ν², ε/b}) on a grid of ε.
pub fn subexp_tail(p: f64, eps_grid: &[f64], samples: u64, seed: u64) -> Result<ProbeResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0,1], got {p}")));
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|e| *e <= 0.0) {
        return Err(Error::Domain("eps grid must be nonempty and positive".into()));
    }
    let (nu, b) = (2.0f64, 4.0f64);
    let mut stream = Stream::new(seed);
    let g = eps_grid.len();
    let mut hits = vec![0u64; g];
    for _ in 0..samples {
        let x = stream.standard_normal();
        let y = if stream.bernoulli(p) { x * x } else { 0.0 };
        let dev = (y - p).abs();
        for (i, &e) in eps_grid.iter().enumerate() {
            if dev >= e {
                hits[i] += 1;
            }
        }
    }
    let mut worst: Option<(f64, f64, f64, f64)> = None;
    for i in 0..g {
        let (frac, se) = fraction_and_se(hits[i], samples);
        let e = eps_grid[i];
        let bound = 2.0 * (-0.5 * (e * e / (nu * nu)).min(e / b)).exp();
        let margin = frac - (bound + TAIL_SLACK_SE * se);
        if worst.is_none() || margin > worst.unwrap().0 {
            worst = Some((margin, frac, bound, se));
        }
    }
    let (margin, frac, bound, se) = worst.unwrap();
    Ok(ProbeResult {
        name: format!("subexp_tail_p_{p}"),
        samples,
        statistic: frac,
        bound,
        se: Some(se),
        pass: margin <= 0.0,
        vacuous: bound >= 1.0,
        seed,
    })
}

/// E[‖f(0) − y‖²] = ½·Σᵢ‖xᵢ‖² + ‖y‖² over fresh initializations.
pub fn init_risk_expectation(
    data: &Dataset<f64>,
    width: usize,
    trials: u64,
    seed: u64,
) -> Result<ProbeResult> {
    if trials < 100 {
        return Err(Error::Domain(format!("need at least 100 trials, got {trials}")));
    }
    let mut derive = Stream::new(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..trials {
        let net_seed = derive.next_u64();
        let net = initialize(data.input_dim(), width, net_seed);
        let mut sq = 0.0;
        for j in 0..data.len() {
            let r = realize(&net, data.input(j))? - data.target(j);
            sq += r * r;
        }
        sum += sq;
        sumsq += sq * sq;
    }
    let (mean, se) = mean_and_se(sum, sumsq, trials as f64);
    let y_norm = data.target_norm();
    let target = 0.5 * data.sumsq_inputs() + y_norm * y_norm;
    Ok(ProbeResult {
        name: "init_risk_mean".into(),
        samples: trials,
        statistic: mean,
        bound: target,
        se: Some(se),
        pass: (mean - target).abs() <= MEAN_SLACK_SE * se,
        vacuous: false,
        seed,
    })
}

/// Markov consequence of the expected initial error:
/// P(‖f(0)−y‖² ≤ (½Σ‖xᵢ‖²+‖y‖²)/ε) ≥ 1 − ε.
pub fn init_risk_markov(
    data: &Dataset<f64>,
    width: usize,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<ProbeResult> {
    if trials < 100 {
        return Err(Error::Domain(format!("need at least 100 trials, got {trials}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
    }
    let y_norm = data.target_norm();
    let cap = (0.5 * data.sumsq_inputs() + y_norm * y_norm) / eps;
    let mut derive = Stream::new(seed);
    let mut hits = 0u64;
    for _ in 0..trials {
        let net = initialize(data.input_dim(), width, derive.next_u64());
        let mut sq = 0.0;
        for j in 0..data.len() {
            let r = realize(&net, data.input(j))? - data.target(j);
            sq += r * r;
        }
        if sq <= cap {
            hits += 1;
        }
    }
    let (frac, se) = fraction_and_se(hits, trials);
    let floor = 1.0 - eps;
    Ok(ProbeResult {
        name: format!("init_risk_markov_eps_{eps}"),
        samples: trials,
        statistic: frac,
        bound: floor,
        se: Some(se),
        pass: frac >= floor - TAIL_SLACK_SE * se,
        vacuous: floor <= 0.0,
        seed,
    })
}

/// P(max_k |Wout_k| ≤ √(2·ln(2·width/ε)/width)) ≥ 1 − ε at initialization.
pub fn weight_bound_event(width: usize, eps: f64, trials: u64, seed: u64) -> Result<ProbeResult> {
    if width == 0 {
        return Err(Error::Domain("width must be at least 1".into()));
    }
    if trials < 100 {
        return Err(Error::Domain(format!("need at least 100 trials, got {trials}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
    }
    let threshold = (2.0 * (2.0 * width as f64 / eps).ln() / width as f64).sqrt();
    let scale = 1.0 / (width as f64).sqrt();
    let mut stream = Stream::new(seed);
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut all_below = true;
        for _ in 0..width {
            if (scale * stream.standard_normal()).abs() > threshold {
                all_below = false;
            }
        }
        if all_below {
            hits += 1;
        }
    }
    let (frac, se) = fraction_and_se(hits, trials);
    let floor = 1.0 - eps;
    Ok(ProbeResult {
        name: format!("weight_bound_width_{width}_eps_{eps}"),
        samples: trials,
        statistic: frac,
        bound: floor,
        se: Some(se),
        pass: frac >= floor - TAIL_SLACK_SE * se,
        vacuous: floor <= 0.0,
        seed,
    })
}

/// Sample budget of a suite run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeScale {
    /// 10⁵ samples per probe.
    Quick,
    /// 10⁷ samples per probe.
    Full,
}

impl ProbeScale {
    pub fn samples(self) -> u64 {
        match self {
            ProbeScale::Quick => 100_000,
            ProbeScale::Full => 10_000_000,
        }
    }

    fn trials(self) -> u64 {
        match self {
            ProbeScale::Quick => 1_000,
            ProbeScale::Full => 10_000,
        }
    }
}

/// Runs the whole probe suite. Each probe draws from its own derived seed,
/// so the probes never share randomness and reordering them cannot change
/// any individual outcome.
pub fn run_suite(scale: ProbeScale, seed: u64) -> Result<Vec<ProbeResult>> {
    let samples = scale.samples();
    let trials = scale.trials();
    let mut derive = Stream::new(seed);
    let mut next_seed = || derive.next_u64();

    let mgf_grid = [-0.2, -0.1, -0.05, 0.05, 0.1, 0.2];
    let tail_grid: Vec<f64> = (1..=20).map(|i| i as f64).collect();
    let probe_data = Dataset::new(
        vec![
            crate::linalg::RealVector::new(vec![1.0, 0.0]).unwrap(),
            crate::linalg::RealVector::new(vec![0.0, 1.0]).unwrap(),
            crate::linalg::RealVector::new(vec![-0.6, 0.8]).unwrap(),
        ],
        vec![0.5, -1.0, 0.25],
    )
    .expect("probe dataset is valid");

    Ok(vec![
        rectified_second_moment(1.0, samples, next_seed())?,
        rectified_second_moment(2.0, samples, next_seed())?,
        gaussian_tail(1.0, samples, next_seed())?,
        gaussian_tail(3.0, samples, next_seed())?,
        gaussian_tail(5.0, samples, next_seed())?,
        anti_concentration(0.1, samples, next_seed())?,
        anti_concentration(0.5, samples, next_seed())?,
        anti_concentration(2.0, samples, next_seed())?,
        subexp_mgf(0.0, &mgf_grid, samples, next_seed())?,
        subexp_mgf(0.5, &mgf_grid, samples, next_seed())?,
        subexp_mgf(1.0, &mgf_grid, samples, next_seed())?,
        subexp_sum_mgf(&[1.0, 0.7, 0.4], &[0.5, 0.3, 0.9], &mgf_grid, samples, next_seed())?,
        subexp_tail(1.0, &tail_grid, samples, next_seed())?,
        subexp_tail(0.5, &tail_grid, samples, next_seed())?,
        init_risk_expectation(&probe_data, 256, trials, next_seed())?,
        init_risk_markov(&probe_data, 256, 0.5, trials, next_seed())?,
        weight_bound_event(64, 0.5, trials, next_seed())?,
        weight_bound_event(64, 0.1, trials, next_seed())?,
    ])
}

/// A suite fails if any non-vacuous probe fails.
pub fn suite_failed(results: &[ProbeResult]) -> bool {
    results.iter().any(|r| !r.vacuous && !r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RealVector;

    #[test]
    fn rectified_moment_targets() {
        let r = rectified_second_moment(1.0, 1_000_000, 11).unwrap();
        assert_eq!(r.bound, 0.5);
        assert!(r.pass, "stat {} target 0.5 se {:?}", r.statistic, r.se);
        let r2 = rectified_second_moment(2.0, 100_000, 12).unwrap();
        assert_eq!(r2.bound, 2.0);
        assert!(r2.pass);
    }

    #[test]
    fn rectified_moment_rejects_bad_args() {
        assert!(rectified_second_moment(0.0, 100_000, 1).is_err());
        assert!(rectified_second_moment(1.0, 100, 1).is_err());
    }

    #[test]
    fn gaussian_tail_values() {
        let vac = gaussian_tail(1.0, 100_000, 3).unwrap();
        assert!(vac.vacuous && vac.bound > 1.0);
        let r = gaussian_tail(3.0, 1_000_000, 4).unwrap();
        assert!(!r.vacuous);
        assert!((r.bound - 2.0 * (-4.5f64).exp()).abs() < 1e-15);
        // The true tail is ≈ 0.0027, an order below the bound ≈ 0.0222.
        assert!(r.pass && r.statistic < r.bound);
        let far = gaussian_tail(5.0, 1_000_000, 5).unwrap();
        assert!(far.pass && far.statistic <= 2.0 * (-12.5f64).exp() + 1e-4);
    }

    #[test]
    fn anti_concentration_values() {
        let tight = anti_concentration(0.1, 1_000_000, 6).unwrap();
        assert!(tight.pass);
        assert!((tight.bound - 0.2 / (2.0 * PI).sqrt()).abs() < 1e-15);
        // Near zero the bound is almost attained.
        assert!(tight.statistic > 0.9 * tight.bound);
        let vac = anti_concentration(2.0, 100_000, 7).unwrap();
        assert!(vac.vacuous);
        let mid = anti_concentration(0.5, 1_000_000, 8).unwrap();
        assert!(mid.pass && mid.statistic <= mid.bound + 3.0 * mid.se.unwrap());
    }

    #[test]
    fn mgf_degenerate_cases() {
        // p = 0: Y ≡ 0 and the empirical MGF is exactly 1 ≤ exp(2λ²).
        let r = subexp_mgf(0.0, &[-0.2, 0.2], 10_000, 9).unwrap();
        assert!(r.pass);
        // λ = 0 would make the MGF exactly one; the grid rejects nothing
        // inside the domain, and everything outside errors.
        assert!(subexp_mgf(0.5, &[0.25], 10_000, 9).is_err());
        assert!(subexp_mgf(0.5, &[-0.3], 10_000, 9).is_err());
        assert!(subexp_mgf(1.5, &[0.1], 10_000, 9).is_err());
    }

    #[test]
    fn mgf_at_lambda_zero_is_exactly_the_bound() {
        // λ = 0: the empirical MGF is identically 1 and the bound is
        // exp(0) = 1, so the probe sits exactly on the boundary and holds.
        let r = subexp_mgf(1.0, &[0.0], 50_000, 19).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert_eq!(r.bound, 1.0);
        assert!(r.pass);
    }

    #[test]
    fn mgf_grid_passes_at_half_and_one() {
        for (p, seed) in [(0.5, 21u64), (1.0, 22u64)] {
            let r = subexp_mgf(p, &[-0.2, -0.1, 0.1, 0.2], 1_000_000, seed).unwrap();
            assert!(r.pass, "p={p}: stat {} bound {}", r.statistic, r.bound);
        }
    }

    #[test]
    fn sum_mgf_heterogeneous() {
        let r = subexp_sum_mgf(
            &[1.0, 0.7, 0.4],
            &[0.5, 0.3, 0.9],
            &[-0.2, -0.05, 0.05, 0.2],
            1_000_000,
            23,
        )
        .unwrap();
        assert!(r.pass, "stat {} bound {}", r.statistic, r.bound);
    }

    #[test]
    fn subexp_tail_grid_sweep() {
        let grid: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        for (p, seed) in [(1.0, 31u64), (0.5, 32u64)] {
            let r = subexp_tail(p, &grid, 1_000_000, seed).unwrap();
            assert!(r.pass, "p={p}");
        }
        // ε = 12 at (ν,b) = (2,4): min{36, 3}/2 ⇒ bound 2e^{-3/2}.
        let single = subexp_tail(1.0, &[12.0], 100_000, 33).unwrap();
        assert!((single.bound - 2.0 * (-1.5f64).exp()).abs() < 1e-15);
        assert!(single.statistic < single.bound);
    }

    #[test]
    fn init_risk_single_unit_input() {
        // y = 0, one unit input: the expectation identity gives 1/2 at any
        // width.
        let data = Dataset::new(vec![RealVector::new(vec![1.0]).unwrap()], vec![0.0]).unwrap();
        let r = init_risk_expectation(&data, 32, 2_000, 41).unwrap();
        assert_eq!(r.bound, 0.5);
        assert!(r.pass, "stat {} se {:?}", r.statistic, r.se);

        // Scaling the input by 2 quadruples the input part of the target.
        let scaled = Dataset::new(vec![RealVector::new(vec![2.0]).unwrap()], vec![0.0]).unwrap();
        let r2 = init_risk_expectation(&scaled, 32, 2_000, 42).unwrap();
        assert_eq!(r2.bound, 2.0);
        assert!(r2.pass);
    }

    #[test]
    fn weight_bound_event_holds_with_margin() {
        let r = weight_bound_event(64, 0.5, 4_000, 51).unwrap();
        assert!(r.pass, "frac {} floor {}", r.statistic, r.bound);
        assert!(r.statistic >= 0.5 - 3.0 * r.se.unwrap());
    }

    #[test]
    fn weight_bound_floor_empties_out_as_eps_approaches_one() {
        // Near ε = 1 the probability floor 1 − ε certifies almost nothing
        // and the probe passes trivially.
        let r = weight_bound_event(64, 0.999, 500, 52).unwrap();
        assert!(r.bound < 2e-3);
        assert!(r.pass);
    }

    #[test]
    fn weight_bound_width_one_matches_normal_cdf_oracle() {
        // width = 1: the event is |Z| <= (2 ln(2/ε))^{1/2} for a single
        // standard normal, with exact probability erf(threshold/√2).
        let eps = 0.3;
        let threshold = (2.0 * (2.0f64 / eps).ln()).sqrt();
        let exact = statrs::function::erf::erf(threshold / 2.0f64.sqrt());
        let trials = 200_000;
        let r = weight_bound_event(1, eps, trials, 53).unwrap();
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (r.statistic - exact).abs() <= 5.0 * se,
            "empirical {} vs erf oracle {exact}",
            r.statistic
        );
        // And the lemma's floor is respected with room to spare.
        assert!(exact >= 1.0 - eps);
    }

    #[test]
    fn suite_quick_all_nonvacuous_pass() {
        let results = run_suite(ProbeScale::Quick, 2025).unwrap();
        assert!(results.len() >= 15);
        for r in &results {
            assert!(
                r.vacuous || r.pass,
                "probe {} failed: stat {} bound {} se {:?}",
                r.name,
                r.statistic,
                r.bound,
                r.se
            );
        }
        assert!(!suite_failed(&results));
        // Distinct derived seeds per probe.
        let mut seeds: Vec<u64> = results.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), results.len());
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_suite(ProbeScale::Quick, 7).unwrap();
        let b = run_suite(ProbeScale::Quick, 7).unwrap();
        assert_eq!(a, b);
    }
}
