//! Gram matrices of the activation pattern and their smallest eigenvalues.
//!
//! The stochastic pair at a parameter state Φ is
//!
//!   G_ij = Σ_k Wout_k² · 𝟙[⟨W_k,x_i⟩+B_k ≥ 0 ∧ ⟨W_k,x_j⟩+B_k ≥ 0],
//!   H_ij = ⟨x_i,x_j⟩ · G_ij,
//!
//! and the deterministic limits replace the indicator average by the
//! halfspace co-activation probability of a standard normal direction,
//! Ḡ_ij = P(⟨W,x_i⟩ ≥ 0, ⟨W,x_j⟩ ≥ 0) = (π − θ_ij)/(2π) with θ_ij the
//! angle between x_i and x_j. Both smallest eigenvalues λ = λ_min(Ḡ) and
//! μ = λ_min(H̄) are strictly positive exactly when the inputs are nonzero
//! and pairwise linearly independent, which `check_pairwise_independence`
//! validates up to floating-point tolerance.

use crate::error::{Error, Result};
use crate::linalg::{lambda_min, slice_dot, slice_norm, SymMatrix};
use crate::network::{Dataset, ShallowReluNet};
use crate::rng::{tags, Stream};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Normalized inner products at least this close to ±1 count as parallel.
pub const PARALLEL_TOL: f64 = 1e-12;

/// Minimum sample count accepted by the Monte Carlo estimator.
pub const MC_MIN_SAMPLES: u64 = 1_000;

/// Stochastic Gram pair at one training step.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPair {
    pub step: usize,
    pub g: SymMatrix<f64>,
    pub h: SymMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramMethod {
    ClosedForm,
    MonteCarlo,
}

/// Deterministic Gram matrices with their smallest eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicGram {
    pub g_bar: SymMatrix<f64>,
    pub h_bar: SymMatrix<f64>,
    /// λ_min(Ḡ).
    pub lambda: f64,
    /// λ_min(H̄).
    pub mu: f64,
    pub method: GramMethod,
    /// Entrywise binomial standard errors of Ḡ; Monte Carlo only.
    pub standard_errors: Option<SymMatrix<f64>>,
    /// (samples, seed) provenance; Monte Carlo only.
    pub mc_provenance: Option<(u64, u64)>,
}

/// Outcome of the nondegeneracy validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub valid: bool,
    /// Indices of zero (or numerically zero) inputs.
    pub zero_inputs: Vec<usize>,
    /// Pairs (i, j), i < j, that are scalar multiples of each other up to
    /// the `PARALLEL_TOL` tolerance on the normalized inner product.
    pub dependent_pairs: Vec<(usize, usize)>,
}

/// Checks every input is nonzero and no two inputs are parallel:
/// |⟨x_i,x_j⟩| < (1 − 1e−12)·‖x_i‖‖x_j‖ for all i ≠ j.
pub fn check_pairwise_independence(data: &Dataset<f64>) -> IndependenceReport {
    let m = data.len();
    let norms: Vec<f64> = (0..m).map(|i| slice_norm(data.input(i).entries())).collect();
    let mut zero_inputs = Vec::new();
    for (i, &n) in norms.iter().enumerate() {
        if n == 0.0 {
            zero_inputs.push(i);
        }
    }
    let mut dependent_pairs = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let ip = slice_dot(data.input(i).entries(), data.input(j).entries());
            if ip.abs() >= (1.0 - PARALLEL_TOL) * norms[i] * norms[j] {
                dependent_pairs.push((i, j));
            }
        }
    }
    IndependenceReport {
        valid: zero_inputs.is_empty() && dependent_pairs.is_empty(),
        zero_inputs,
        dependent_pairs,
    }
}

/// Stochastic Gram pair of a network state; indicators include exact zero.
pub fn stochastic_gram(net: &ShallowReluNet<f64>, data: &Dataset<f64>) -> Result<GramPair> {
    if data.input_dim() != net.input_dim() {
        return Err(Error::Dimension(format!(
            "data dim {} vs net dim {}",
            data.input_dim(),
            net.input_dim()
        )));
    }
    let m = data.len();
    let width = net.width();
    // Activation pattern per (neuron, sample).
    let mut active = vec![false; width * m];
    for (i, x) in data.inputs().iter().enumerate() {
        let pre = net.pre_activations(x.entries())?;
        for k in 0..width {
            active[k * m + i] = pre[k] >= 0.0;
        }
    }
    let wout = net.output_weights();
    let g = SymMatrix::from_fn(m, |i, j| {
        let mut acc = 0.0;
        for k in 0..width {
            if active[k * m + i] && active[k * m + j] {
                acc += wout[k] * wout[k];
            }
        }
        acc
    })?;
    let h = weight_by_input_products(&g, data)?;
    Ok(GramPair { step: 0, g, h })
}

/// H from G: H_ij = ⟨x_i,x_j⟩·G_ij.
fn weight_by_input_products(g: &SymMatrix<f64>, data: &Dataset<f64>) -> Result<SymMatrix<f64>> {
    SymMatrix::from_fn(g.order(), |i, j| {
        slice_dot(data.input(i).entries(), data.input(j).entries()) * g.get(i, j)
    })
}

/// Deterministic Gram matrices via the arc-cosine identity
/// Ḡ_ij = (π − arccos(⟨x_i,x_j⟩/(‖x_i‖‖x_j‖)))/(2π); cosines are clamped to
/// [−1, 1] before arccos, and the diagonal is 1/2 exactly.
pub fn deterministic_gram_closed_form(data: &Dataset<f64>) -> Result<DeterministicGram> {
    let m = data.len();
    let norms: Vec<f64> = (0..m).map(|i| slice_norm(data.input(i).entries())).collect();
    for (i, &n) in norms.iter().enumerate() {
        if n == 0.0 {
            return Err(Error::Domain(format!("input {i} is the zero vector")));
        }
    }
    let g_bar = SymMatrix::from_fn(m, |i, j| {
        if i == j {
            return 0.5;
        }
        let cos = slice_dot(data.input(i).entries(), data.input(j).entries())
            / (norms[i] * norms[j]);
        let theta = cos.clamp(-1.0, 1.0).acos();
        (PI - theta) / (2.0 * PI)
    })?;
    let h_bar = weight_by_input_products(&g_bar, data)?;
    let lambda = lambda_min(&g_bar);
    let mu = lambda_min(&h_bar);
    Ok(DeterministicGram {
        g_bar,
        h_bar,
        lambda,
        mu,
        method: GramMethod::ClosedForm,
        standard_errors: None,
        mc_provenance: None,
    })
}

/// Monte Carlo estimate of the deterministic Gram matrices: the fraction of
/// standard-normal directions w with ⟨w,x_i⟩ ≥ 0 and ⟨w,x_j⟩ ≥ 0, with
/// entrywise binomial standard errors √(p̂(1−p̂)/n).
pub fn deterministic_gram_monte_carlo(
    data: &Dataset<f64>,
    samples: u64,
    seed: u64,
) -> Result<DeterministicGram> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MC_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let m = data.len();
    let d = data.input_dim();
    let mut stream = Stream::new(seed).substream(tags::GRAM_MC);
    let mut counts = vec![0u64; m * m];
    let mut signs = vec![false; m];
    for _ in 0..samples {
        let w = stream.normal_vec(d);
        for (i, s) in signs.iter_mut().enumerate() {
            *s = slice_dot(&w, data.input(i).entries()) >= 0.0;
        }
        for i in 0..m {
            if !signs[i] {
                continue;
            }
            for j in i..m {
                if signs[j] {
                    counts[i * m + j] += 1;
                }
            }
        }
    }
    let n = samples as f64;
    let g_bar = SymMatrix::from_fn(m, |i, j| counts[i * m + j] as f64 / n)?;
    let se = SymMatrix::from_fn(m, |i, j| {
        let p = counts[i * m + j] as f64 / n;
        (p * (1.0 - p) / n).sqrt()
    })?;
    let h_bar = weight_by_input_products(&g_bar, data)?;
    let lambda = lambda_min(&g_bar);
    let mu = lambda_min(&h_bar);
    Ok(DeterministicGram {
        g_bar,
        h_bar,
        lambda,
        mu,
        method: GramMethod::MonteCarlo,
        standard_errors: Some(se),
        mc_provenance: Some((samples, seed)),
    })
}

/// (λ_min(Ḡ), λ_min(H̄)), recomputed from the stored matrices.
pub fn gram_eigenvalues(dg: &DeterministicGram) -> (f64, f64) {
    (lambda_min(&dg.g_bar), lambda_min(&dg.h_bar))
}
