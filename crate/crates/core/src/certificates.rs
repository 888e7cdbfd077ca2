//! The quantitative convergence certificate: the computable rate constant Λ,
//! the step-size and width thresholds it must satisfy, the activation-drift
//! radius R, the six initialization events whose intersection carries the
//! convergence guarantee, and the geometric risk envelope (1 − η·rate)ⁿ.
//!
//! All formulas are evaluated in 64-bit floats exactly as written, including
//! the extreme constants (2³⁶, C²⁰, m⁸). For adversarial inputs a threshold
//! can round to zero or overflow; [`RateCertificate::degenerate_fields`]
//! flags such entries instead of silently clamping them.

use crate::error::{Error, Result};
use crate::gram::{stochastic_gram, DeterministicGram};
use crate::linalg::{slice_dot, slice_norm};
use crate::network::{realize, Dataset, ShallowReluNet};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest/largest input norm (c, C) of the dataset.
pub fn data_radii(data: &Dataset<f64>) -> (f64, f64) {
    let mut c = f64::INFINITY;
    let mut big_c = 0.0f64;
    for x in data.inputs() {
        let n = slice_norm(x.entries());
        c = c.min(n);
        big_c = big_c.max(n);
    }
    (c, big_c)
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn require_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Domain(format!("{name} must lie in (0,1), got {v}")));
    }
    Ok(())
}

/// The computable rate constant
///
/// Λ = min{ (λ+μ)/m,
///          min{λ, μ, λ⁻¹, μ⁻¹} / (2¹¹·max{1, C⁴}·m),
///          c^{5/2}·min{1, λ⁵, μ⁵} / (2³⁶·max{1, C²⁰, ‖y‖⁵}·m⁸) }.
///
/// Λ ∈ (0, 1) whenever λ, μ > 0, and Λ ≤ (λ+μ)/m by construction.
pub fn capital_lambda(
    lambda: f64,
    mu: f64,
    c: f64,
    big_c: f64,
    m: usize,
    y_norm: f64,
) -> Result<f64> {
    require_positive("lambda", lambda)?;
    require_positive("mu", mu)?;
    require_positive("c", c)?;
    require_positive("C", big_c)?;
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    if y_norm < 0.0 || !y_norm.is_finite() {
        return Err(Error::Domain(format!("|y| must be nonnegative, got {y_norm}")));
    }
    let mf = m as f64;
    let term1 = (lambda + mu) / mf;
    let term2 = lambda.min(mu).min(1.0 / lambda).min(1.0 / mu)
        / (2f64.powi(11) * big_c.powi(4).max(1.0) * mf);
    let term3 = c.powf(2.5) * lambda.powi(5).min(mu.powi(5)).min(1.0)
        / (2f64.powi(36) * big_c.powi(20).max(y_norm.powi(5)).max(1.0) * mf.powi(8));
    Ok(term1.min(term2).min(term3))
}

/// Inputs common to every threshold formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdInputs {
    pub lambda: f64,
    pub mu: f64,
    /// Smallest input norm.
    pub c: f64,
    /// Largest input norm.
    pub big_c: f64,
    pub m: usize,
    pub eps: f64,
    /// Σᵢ ‖xᵢ‖².
    pub sumsq_x: f64,
    /// ‖y‖.
    pub y_norm: f64,
}

/// Step-size and width thresholds, in both the sharp and the simplified form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// min{(λ+μ)/(8(6(1+C²)ε⁻¹+1)²m), m/(λ+μ)}.
    pub eta_max_thm: f64,
    /// 32·ln(12m²/ε)·max{4m²/λ², 4m²C⁴/μ², m/λ, mC²/μ}.
    pub dmin_thm: f64,
    /// Right-hand side of the width condition ln(12·width/ε)/width ≤ … .
    pub ln_condition_rhs: f64,
    /// Simplified bound 2⁻¹¹·min{1,C⁻⁴}·min{λ,μ,λ⁻¹,μ⁻¹}·ε²/m.
    pub eta_max_cor: f64,
    /// Simplified bound 2³⁶·max{1,C²⁰,‖y‖⁵}·c^{−5/2}·max{1,λ⁻⁵,μ⁻⁵}·ε⁻⁴·m⁸.
    pub dmin_cor: f64,
}

pub fn theorem_thresholds(inputs: &ThresholdInputs) -> Result<Thresholds> {
    let ThresholdInputs {
        lambda,
        mu,
        c,
        big_c,
        m,
        eps,
        sumsq_x,
        y_norm,
    } = *inputs;
    require_positive("lambda", lambda)?;
    require_positive("mu", mu)?;
    require_positive("c", c)?;
    require_positive("C", big_c)?;
    require_positive("sumsq_x", sumsq_x)?;
    require_unit_interval("eps", eps)?;
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    if y_norm < 0.0 || !y_norm.is_finite() {
        return Err(Error::Domain(format!("|y| must be nonnegative, got {y_norm}")));
    }
    let mf = m as f64;
    let one_plus_c2 = 1.0 + big_c * big_c;

    let eta_sharp = (lambda + mu) / (8.0 * (6.0 * one_plus_c2 / eps + 1.0).powi(2) * mf);
    let eta_max_thm = eta_sharp.min(mf / (lambda + mu));

    let dmin_thm = 32.0
        * (12.0 * mf * mf / eps).ln()
        * (4.0 * mf * mf / (lambda * lambda))
            .max(4.0 * mf * mf * big_c.powi(4) / (mu * mu))
            .max(mf / lambda)
            .max(mf * big_c * big_c / mu);

    let min_term = (lambda * lambda / (mf * mf))
        .min(mu * mu / (mf * mf * big_c.powi(4)))
        .min((lambda + mu).powi(2) / (one_plus_c2.powi(2) * (mf.sqrt() + mf).powi(2)));
    let ln_condition_rhs = PI * eps.powi(3) * c * c * (lambda + mu).powi(2) * min_term
        / (2f64.powi(17)
            * 27.0
            * big_c.powi(4).max(1.0)
            * mf.powi(3)
            * (0.5 * sumsq_x + y_norm * y_norm));

    let eta_max_cor = 2f64.powi(-11)
        * big_c.powi(-4).min(1.0)
        * lambda.min(mu).min(1.0 / lambda).min(1.0 / mu)
        * eps
        * eps
        / mf;

    let dmin_cor = 2f64.powi(36)
        * big_c.powi(20).max(y_norm.powi(5)).max(1.0)
        * c.powf(-2.5)
        * (1.0 / lambda.powi(5)).max(1.0 / mu.powi(5)).max(1.0)
        * eps.powi(-4)
        * mf.powi(8);

    Ok(Thresholds {
        eta_max_thm,
        dmin_thm,
        ln_condition_rhs,
        eta_max_cor,
        dmin_cor,
    })
}

/// Activation-drift radius with δ = ε/6:
///
/// R = min{ √(2π)·δ·c·min{λ, μC⁻²}/(16m²),
///          √(2π)·δ·c·(λ+μ)/(16(1+C²)(√m+m)m) }.
pub fn radius_r(eps: f64, c: f64, big_c: f64, lambda: f64, mu: f64, m: usize) -> Result<f64> {
    require_unit_interval("eps", eps)?;
    require_positive("c", c)?;
    require_positive("C", big_c)?;
    require_positive("lambda", lambda)?;
    require_positive("mu", mu)?;
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let mf = m as f64;
    let delta = eps / 6.0;
    let root2pi = (2.0 * PI).sqrt();
    let term1 = root2pi * delta * c * lambda.min(mu / (big_c * big_c)) / (16.0 * mf * mf);
    let term2 =
        root2pi * delta * c * (lambda + mu) / (16.0 * (1.0 + big_c * big_c) * (mf.sqrt() + mf) * mf);
    Ok(term1.min(term2))
}

/// One initialization event: a measured statistic against its threshold.
/// Boundary equality counts as held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventCheck {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub held: bool,
}

/// The six initialization events; the convergence guarantee is proved on
/// their intersection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub checks: Vec<EventCheck>,
}

impl EventReport {
    pub fn all_held(&self) -> bool {
        self.checks.iter().all(|c| c.held)
    }

    pub fn by_name(&self, name: &str) -> Option<&EventCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Evaluates the six events on a freshly initialized network (both bias
/// vectors must still be exactly zero):
///
/// 1. `init_sq_err`:        ‖f(0)−y‖²                        ≤ (½Σ‖xᵢ‖²+‖y‖²)/ε
/// 2. `out_weight_sup`:     max_k |Wout_k|                   ≤ √(2·ln(2·width/ε)/width)
/// 3. `gram_deviation`:     max_ij |G_ij(0)−Ḡ_ij|            ≤ min{λ, μC⁻²}/(4m)
/// 4. `kink_mass_paired`:   Σ_ij Σ_k Wout_k²(𝟙ᵢ+𝟙ⱼ)          ≤ min{λ, μC⁻²}/4
/// 5. `kink_mass_single`:   Σ_i Σ_k Wout_k²·𝟙ᵢ               ≤ 2mR/(√(2π)·ε·c)
/// 6. `out_weight_energy`:  Σ_k Wout_k²                      ≤ 1/ε
///
/// where 𝟙ᵢ = 𝟙[|⟨W_k(0),xᵢ⟩| ≤ R].
pub fn event_probe(
    net0: &ShallowReluNet<f64>,
    data: &Dataset<f64>,
    dg: &DeterministicGram,
    eps: f64,
    r: f64,
) -> Result<EventReport> {
    require_unit_interval("eps", eps)?;
    require_positive("R", r)?;
    if net0.hidden_biases().iter().any(|&b| b != 0.0) || net0.output_bias() != 0.0 {
        return Err(Error::Contract(
            "event probe requires a freshly initialized network with zero biases".into(),
        ));
    }
    let m = data.len();
    let width = net0.width();
    let (c, big_c) = data_radii(data);
    let lambda = dg.lambda;
    let mu = dg.mu;
    let min_lm = lambda.min(mu / (big_c * big_c));

    // Event 1: initial squared error.
    let mut sq_err = 0.0;
    for j in 0..m {
        let res = realize(net0, data.input(j))? - data.target(j);
        sq_err += res * res;
    }
    let y_norm = data.target_norm();
    let thr1 = (0.5 * data.sumsq_inputs() + y_norm * y_norm) / eps;

    // Event 2: output-weight sup bound.
    let max_wout = net0
        .output_weights()
        .iter()
        .fold(0.0f64, |a, &w| a.max(w.abs()));
    let thr2 = (2.0 * (2.0 * width as f64 / eps).ln() / width as f64).sqrt();

    // Event 3: entrywise Gram deviation at initialization.
    let pair = stochastic_gram(net0, data)?;
    let mut max_dev = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            max_dev = max_dev.max((pair.g.get(i, j) - dg.g_bar.get(i, j)).abs());
        }
    }
    let thr3 = min_lm / (4.0 * m as f64);

    // Events 4 and 5: output-weight mass on nearly-inactive directions.
    let wout = net0.output_weights();
    let mut near = vec![false; width * m];
    for (i, x) in data.inputs().iter().enumerate() {
        for k in 0..width {
            let ip = slice_dot(net0.hidden_weight_row(k), x.entries());
            near[k * m + i] = ip.abs() <= r;
        }
    }
    let mut paired = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..width {
                let w2 = wout[k] * wout[k];
                if near[k * m + i] {
                    paired += w2;
                }
                if near[k * m + j] {
                    paired += w2;
                }
            }
        }
    }
    let thr4 = min_lm / 4.0;
    let mut single = 0.0;
    for i in 0..m {
        for k in 0..width {
            if near[k * m + i] {
                single += wout[k] * wout[k];
            }
        }
    }
    let thr5 = 2.0 * m as f64 * r / ((2.0 * PI).sqrt() * eps * c);

    // Event 6: output-weight energy.
    let mut energy = 0.0;
    for k in 0..width {
        energy += wout[k] * wout[k];
    }
    let thr6 = 1.0 / eps;

    let mk = |name: &str, statistic: f64, threshold: f64| EventCheck {
        name: name.to_string(),
        statistic,
        threshold,
        held: statistic <= threshold,
    };
    Ok(EventReport {
        checks: vec![
            mk("init_sq_err", sq_err, thr1),
            mk("out_weight_sup", max_wout, thr2),
            mk("gram_deviation", max_dev, thr3),
            mk("kink_mass_paired", paired, thr4),
            mk("kink_mass_single", single, thr5),
            mk("out_weight_energy", energy, thr6),
        ],
    })
}

/// Geometric envelope (1 − η·rate)ⁿ·risk₀. The product η·rate must lie in
/// (0, 1) and risk₀ must be nonnegative.
pub fn rate_envelope(risk0: f64, eta: f64, rate_constant: f64, n: usize) -> Result<f64> {
    if risk0 < 0.0 || !risk0.is_finite() {
        return Err(Error::Domain(format!("risk0 must be nonnegative, got {risk0}")));
    }
    let q = eta * rate_constant;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!(
            "eta * rate must lie in (0,1), got {q}"
        )));
    }
    Ok((1.0 - q).powi(n as i32) * risk0)
}

/// Grid verification of ln(x) ≤ x^ε/ε.
#[derive(Debug, Clone, PartialEq)]
pub struct LogInequalityReport {
    pub checked: usize,
    pub violations: Vec<(f64, f64)>,
}

pub fn log_inequality_check(eps_grid: &[f64], x_grid: &[f64]) -> LogInequalityReport {
    let mut checked = 0;
    let mut violations = Vec::new();
    for &eps in eps_grid {
        if eps <= 0.0 {
            continue;
        }
        for &x in x_grid {
            if x <= 0.0 {
                continue;
            }
            checked += 1;
            if x.ln() > x.powf(eps) / eps {
                violations.push((eps, x));
            }
        }
    }
    LogInequalityReport { checked, violations }
}

/// The full certificate for one dataset at one failure probability ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCertificate {
    pub c: f64,
    pub big_c: f64,
    pub lambda: f64,
    pub mu: f64,
    pub m: usize,
    pub d: usize,
    pub y_norm: f64,
    pub eps: f64,
    pub capital_lambda: f64,
    pub eta_max_thm: f64,
    pub dmin_thm: f64,
    pub ln_condition_rhs: f64,
    pub eta_max_cor: f64,
    pub dmin_cor: f64,
    pub radius_r: f64,
}

impl RateCertificate {
    /// Evaluates every certificate quantity from the dataset and its
    /// deterministic Gram eigenvalues.
    pub fn evaluate(data: &Dataset<f64>, dg: &DeterministicGram, eps: f64) -> Result<Self> {
        let (c, big_c) = data_radii(data);
        let y_norm = data.target_norm();
        let capital = capital_lambda(dg.lambda, dg.mu, c, big_c, data.len(), y_norm)?;
        let thresholds = theorem_thresholds(&ThresholdInputs {
            lambda: dg.lambda,
            mu: dg.mu,
            c,
            big_c,
            m: data.len(),
            eps,
            sumsq_x: data.sumsq_inputs(),
            y_norm,
        })?;
        let radius = radius_r(eps, c, big_c, dg.lambda, dg.mu, data.len())?;
        Ok(Self {
            c,
            big_c,
            lambda: dg.lambda,
            mu: dg.mu,
            m: data.len(),
            d: data.input_dim(),
            y_norm,
            eps,
            capital_lambda: capital,
            eta_max_thm: thresholds.eta_max_thm,
            dmin_thm: thresholds.dmin_thm,
            ln_condition_rhs: thresholds.ln_condition_rhs,
            eta_max_cor: thresholds.eta_max_cor,
            dmin_cor: thresholds.dmin_cor,
            radius_r: radius,
        })
    }

    /// Names of certificate quantities that are zero or non-finite; extreme
    /// inputs can underflow or overflow the f64 evaluation of the formulas.
    pub fn degenerate_fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut check = |name: &'static str, v: f64| {
            if v == 0.0 || !v.is_finite() {
                out.push(name);
            }
        };
        check("capital_lambda", self.capital_lambda);
        check("eta_max_thm", self.eta_max_thm);
        check("dmin_thm", self.dmin_thm);
        check("ln_condition_rhs", self.ln_condition_rhs);
        check("eta_max_cor", self.eta_max_cor);
        check("dmin_cor", self.dmin_cor);
        check("radius_r", self.radius_r);
        out
    }
}
