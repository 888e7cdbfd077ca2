//! One-hidden-layer rectified network with hidden and output biases, its
//! empirical risk, the exact risk gradient of the rectified model, and the
//! softplus family φ_t(z) = ln(1 + t·e^{tz})/t that smooths the rectifier
//! and serves as an independent gradient oracle.
//!
//! The gradient convention at a kink is the closed half-line indicator
//! 𝟙_{[0,∞)}: a pre-activation of exactly zero counts as active. The
//! trainer in [`crate::train`] relies on this, so every routine that looks
//! at activation patterns goes through [`ShallowReluNet::pre_activations`].

use crate::error::{Error, Result};
use crate::linalg::{slice_dot, slice_norm, RealVector, RectMatrix};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Parameters ((W, B), (Wout, bias_out)) of a width-`width` rectified
/// network mapping ℝ^d → ℝ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShallowReluNet<R = f64> {
    input_dim: usize,
    width: usize,
    hidden_weights: RectMatrix<R>,
    hidden_biases: Vec<R>,
    output_weights: Vec<R>,
    output_bias: R,
}

impl<R: Real> ShallowReluNet<R> {
    pub fn new(
        hidden_weights: RectMatrix<R>,
        hidden_biases: Vec<R>,
        output_weights: Vec<R>,
        output_bias: R,
    ) -> Result<Self> {
        let width = hidden_weights.rows();
        let input_dim = hidden_weights.cols();
        if hidden_biases.len() != width || output_weights.len() != width {
            return Err(Error::Dimension(format!(
                "width {width} vs {} hidden biases, {} output weights",
                hidden_biases.len(),
                output_weights.len()
            )));
        }
        if hidden_biases.iter().any(|x| !x.is_finite())
            || output_weights.iter().any(|x| !x.is_finite())
            || !output_bias.is_finite()
        {
            return Err(Error::Domain("network parameter is not finite".into()));
        }
        Ok(Self {
            input_dim,
            width,
            hidden_weights,
            hidden_biases,
            output_weights,
            output_bias,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn hidden_weights(&self) -> &RectMatrix<R> {
        &self.hidden_weights
    }

    pub fn hidden_weight_row(&self, k: usize) -> &[R] {
        self.hidden_weights.row(k)
    }

    pub fn hidden_biases(&self) -> &[R] {
        &self.hidden_biases
    }

    pub fn output_weights(&self) -> &[R] {
        &self.output_weights
    }

    pub fn output_bias(&self) -> R {
        self.output_bias
    }

    /// Wx + B for one input, ascending neuron order.
    pub fn pre_activations(&self, x: &[R]) -> Result<Vec<R>> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "input length {} vs input_dim {}",
                x.len(),
                self.input_dim
            )));
        }
        Ok((0..self.width)
            .map(|k| slice_dot(self.hidden_weights.row(k), x) + self.hidden_biases[k])
            .collect())
    }

    /// Number of scalar parameters, `width·d + 2·width + 1`.
    pub fn parameter_count(&self) -> usize {
        self.width * self.input_dim + 2 * self.width + 1
    }

    /// Flattens to row-major W, then B, then Wout, then bias_out.
    pub fn flatten(&self) -> Vec<R> {
        let mut theta = Vec::with_capacity(self.parameter_count());
        theta.extend_from_slice(self.hidden_weights.entries());
        theta.extend_from_slice(&self.hidden_biases);
        theta.extend_from_slice(&self.output_weights);
        theta.push(self.output_bias);
        theta
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn from_flat(input_dim: usize, width: usize, theta: &[R]) -> Result<Self> {
        let expect = width * input_dim + 2 * width + 1;
        if theta.len() != expect {
            return Err(Error::Dimension(format!(
                "flat parameter length {} vs expected {expect}",
                theta.len()
            )));
        }
        let wd = width * input_dim;
        Self::new(
            RectMatrix::new(width, input_dim, theta[..wd].to_vec())?,
            theta[wd..wd + width].to_vec(),
            theta[wd + width..wd + 2 * width].to_vec(),
            theta[wd + 2 * width],
        )
    }
}

/// Training data: inputs x₁..x_m ∈ ℝ^d∖{0} and scalar targets.
///
/// Construction rejects zero inputs; pairwise linear independence is a
/// separate, report-style check in [`crate::gram::check_pairwise_independence`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<R = f64> {
    input_dim: usize,
    inputs: Vec<RealVector<R>>,
    targets: Vec<R>,
}

impl<R: Real> Dataset<R> {
    pub fn new(inputs: Vec<RealVector<R>>, targets: Vec<R>) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != targets.len() {
            return Err(Error::Dimension(format!(
                "{} inputs vs {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        let input_dim = inputs[0].len();
        if inputs.iter().any(|x| x.len() != input_dim) {
            return Err(Error::Dimension("inputs have mixed dimensions".into()));
        }
        if targets.iter().any(|y| !y.is_finite()) {
            return Err(Error::Domain("target is not finite".into()));
        }
        for (i, x) in inputs.iter().enumerate() {
            if x.entries().iter().all(|&e| e == R::zero()) {
                return Err(Error::InvalidData {
                    reason: format!("input {i} is the zero vector"),
                    pairs: vec![],
                });
            }
        }
        Ok(Self {
            input_dim,
            inputs,
            targets,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn input(&self, i: usize) -> &RealVector<R> {
        &self.inputs[i]
    }

    pub fn inputs(&self) -> &[RealVector<R>] {
        &self.inputs
    }

    pub fn target(&self, i: usize) -> R {
        self.targets[i]
    }

    pub fn targets(&self) -> &[R] {
        &self.targets
    }

    /// ‖y‖ over the target vector.
    pub fn target_norm(&self) -> R {
        slice_norm(&self.targets)
    }

    /// Σᵢ ‖xᵢ‖².
    pub fn sumsq_inputs(&self) -> R {
        let mut acc = R::zero();
        for x in &self.inputs {
            let n = slice_norm(x.entries());
            acc = acc + n * n;
        }
        acc
    }
}

/// Exact gradient of the empirical risk with respect to (W, B, bias_out).
/// There is no component for the output weights: they are never updated.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskGradient<R = f64> {
    pub d_weights: RectMatrix<R>,
    pub d_biases: Vec<R>,
    pub d_output_bias: R,
}

/// Componentwise max{·, 0}.
pub fn rectifier<R: Real>(v: &RealVector<R>) -> RealVector<R> {
    RealVector::new(v.entries().iter().map(|&x| relu(x)).collect())
        .expect("rectifier preserves finiteness")
}

#[inline]
pub fn relu<R: Real>(z: R) -> R {
    z.max(R::zero())
}

/// φ_t(z) = ln(1 + t·e^{tz})/t, evaluated without overflow for t·z up to
/// ±10⁶: for tz > 30 use the rearrangement z + ln(t)/t + ln1p(e^{-tz}/t)/t,
/// otherwise ln1p(t·e^{tz})/t.
pub fn softplus<R: Real>(z: R, t: R) -> Result<R> {
    if t <= R::zero() || !t.is_finite() {
        return Err(Error::Domain(format!("softplus scale t must be positive, got {t}")));
    }
    let tz = t * z;
    if tz > R::of(30.0) {
        Ok(z + t.ln() / t + ((-tz).exp() / t).ln_1p() / t)
    } else {
        Ok((t * tz.exp()).ln_1p() / t)
    }
}

/// φ_t′(z) = 1/(1 + e^{-tz}/t), the logistic σ(tz + ln t) evaluated on the
/// branch that keeps the exponent nonpositive.
pub fn softplus_deriv<R: Real>(z: R, t: R) -> Result<R> {
    if t <= R::zero() || !t.is_finite() {
        return Err(Error::Domain(format!("softplus scale t must be positive, got {t}")));
    }
    let u = t * z + t.ln();
    if u >= R::zero() {
        Ok(R::one() / (R::one() + (-u).exp()))
    } else {
        let e = u.exp();
        Ok(e / (R::one() + e))
    }
}

/// Network output ⟨Wout, r(Wx + B)⟩ + bias_out.
pub fn realize<R: Real>(net: &ShallowReluNet<R>, x: &RealVector<R>) -> Result<R> {
    let pre = net.pre_activations(x.entries())?;
    let mut acc = R::zero();
    for k in 0..net.width() {
        acc = acc + net.output_weights()[k] * relu(pre[k]);
    }
    Ok(acc + net.output_bias())
}

/// Output with the rectifier replaced by φ_t.
pub fn realize_smoothed<R: Real>(net: &ShallowReluNet<R>, x: &RealVector<R>, t: R) -> Result<R> {
    let pre = net.pre_activations(x.entries())?;
    let mut acc = R::zero();
    for k in 0..net.width() {
        acc = acc + net.output_weights()[k] * softplus(pre[k], t)?;
    }
    Ok(acc + net.output_bias())
}

/// Mean squared error (1/m)·Σᵢ (f(xᵢ) − yᵢ)².
pub fn empirical_risk<R: Real>(net: &ShallowReluNet<R>, data: &Dataset<R>) -> Result<R> {
    if data.input_dim() != net.input_dim() {
        return Err(Error::Dimension(format!(
            "data dim {} vs net dim {}",
            data.input_dim(),
            net.input_dim()
        )));
    }
    let mut acc = R::zero();
    for i in 0..data.len() {
        let r = realize(net, data.input(i))? - data.target(i);
        acc = acc + r * r;
    }
    Ok(acc / R::of_usize(data.len()))
}

/// Mean squared error of the φ_t-smoothed network; converges to
/// [`empirical_risk`] as t → ∞.
pub fn smoothed_risk<R: Real>(net: &ShallowReluNet<R>, data: &Dataset<R>, t: R) -> Result<R> {
    if data.input_dim() != net.input_dim() {
        return Err(Error::Dimension(format!(
            "data dim {} vs net dim {}",
            data.input_dim(),
            net.input_dim()
        )));
    }
    let mut acc = R::zero();
    for i in 0..data.len() {
        let r = realize_smoothed(net, data.input(i), t)? - data.target(i);
        acc = acc + r * r;
    }
    Ok(acc / R::of_usize(data.len()))
}

/// Exact risk gradient of the rectified model:
///
/// ∂ℰ/∂W_{k,ℓ} = (2/m)·Σⱼ (fⱼ−yⱼ)·Wout_k·𝟙_{[0,∞)}(⟨W_k,xⱼ⟩+B_k)·xⱼ\[ℓ\],
///
/// the bias rows drop the xⱼ\[ℓ\] factor, and the output-bias component is
/// (2/m)·Σⱼ (fⱼ−yⱼ). Zero pre-activations count as active.
pub fn risk_gradient<R: Real>(net: &ShallowReluNet<R>, data: &Dataset<R>) -> Result<RiskGradient<R>> {
    if data.input_dim() != net.input_dim() {
        return Err(Error::Dimension(format!(
            "data dim {} vs net dim {}",
            data.input_dim(),
            net.input_dim()
        )));
    }
    let m = data.len();
    let width = net.width();
    let d = net.input_dim();
    let two_over_m = R::of(2.0) / R::of_usize(m);

    let mut residuals = Vec::with_capacity(m);
    for j in 0..m {
        residuals.push(realize(net, data.input(j))? - data.target(j));
    }

    let mut d_weights = RectMatrix::zeros(width, d);
    let mut d_biases = vec![R::zero(); width];
    for k in 0..width {
        let wk = net.hidden_weight_row(k);
        let bk = net.hidden_biases()[k];
        let ok = net.output_weights()[k];
        let mut row = vec![R::zero(); d];
        let mut bias_acc = R::zero();
        for j in 0..m {
            let pre = slice_dot(wk, data.input(j).entries()) + bk;
            if pre >= R::zero() {
                let coef = residuals[j] * ok;
                let xj = data.input(j).entries();
                for l in 0..d {
                    row[l] = row[l] + coef * xj[l];
                }
                bias_acc = bias_acc + coef;
            }
        }
        for l in 0..d {
            d_weights.set(k, l, two_over_m * row[l]);
        }
        d_biases[k] = two_over_m * bias_acc;
    }

    let mut res_sum = R::zero();
    for j in 0..m {
        res_sum = res_sum + residuals[j];
    }
    Ok(RiskGradient {
        d_weights,
        d_biases,
        d_output_bias: two_over_m * res_sum,
    })
}
