//! Versioned on-disk schemas: dataset/network/Gram/certificate/probe-report
//! JSON and the trajectory CSV.
//!
//! Every JSON artifact carries a `"schema": "<kind>/<major>"` field and
//! readers reject unknown majors. Floats are written in shortest
//! round-trip decimal form (both serde_json and the `Display` impl used for
//! CSV guarantee bit-exact read-back for finite doubles), and key order is
//! fixed by the structs, so identical inputs produce identical bytes.

use crate::certificates::RateCertificate;
use crate::error::{Error, Result};
use crate::gram::{DeterministicGram, GramMethod};
use crate::linalg::{RealVector, RectMatrix, SymMatrix};
use crate::network::{Dataset, ShallowReluNet};
use crate::probes::ProbeResult;
use crate::train::GdTrajectory;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const DATASET_SCHEMA: &str = "dataset/1";
pub const NET_SCHEMA: &str = "net/1";
pub const GRAM_SCHEMA: &str = "gram/1";
pub const CERTIFICATE_SCHEMA: &str = "certificate/1";
pub const PROBE_REPORT_SCHEMA: &str = "probe-report/1";
pub const VERIFICATION_SCHEMA: &str = "verification/1";

/// Accepts `kind/major` for the expected kind and major version 1.
pub fn check_schema(found: &str, kind: &str) -> Result<()> {
    let ok = found
        .strip_prefix(kind)
        .and_then(|rest| rest.strip_prefix('/'))
        .and_then(|major| major.parse::<u32>().ok())
        .map(|major| major == 1)
        .unwrap_or(false);
    if ok {
        Ok(())
    } else {
        Err(Error::Schema {
            found: found.to_string(),
            expected: 1,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetFile {
    pub schema: String,
    pub d: usize,
    pub m: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl DatasetFile {
    pub fn from_dataset(data: &Dataset<f64>) -> Self {
        Self {
            schema: DATASET_SCHEMA.to_string(),
            d: data.input_dim(),
            m: data.len(),
            x: data.inputs().iter().map(|v| v.entries().to_vec()).collect(),
            y: data.targets().to_vec(),
        }
    }

    pub fn into_dataset(self) -> Result<Dataset<f64>> {
        check_schema(&self.schema, "dataset")?;
        if self.x.len() != self.m || self.y.len() != self.m {
            return Err(Error::Dimension(format!(
                "declared m = {} but {} inputs / {} targets",
                self.m,
                self.x.len(),
                self.y.len()
            )));
        }
        if self.x.iter().any(|row| row.len() != self.d) {
            return Err(Error::Dimension(format!("an input row is not length {}", self.d)));
        }
        let inputs = self
            .x
            .into_iter()
            .map(RealVector::new)
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(inputs, self.y)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    pub schema: String,
    pub d: usize,
    pub width: usize,
    /// Row-major hidden weights, length `width·d`.
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "Wout")]
    pub wout: Vec<f64>,
    pub bias_out: f64,
}

impl NetworkFile {
    pub fn from_net(net: &ShallowReluNet<f64>) -> Self {
        Self {
            schema: NET_SCHEMA.to_string(),
            d: net.input_dim(),
            width: net.width(),
            w: net.hidden_weights().entries().to_vec(),
            b: net.hidden_biases().to_vec(),
            wout: net.output_weights().to_vec(),
            bias_out: net.output_bias(),
        }
    }

    pub fn into_net(self) -> Result<ShallowReluNet<f64>> {
        check_schema(&self.schema, "net")?;
        ShallowReluNet::new(
            RectMatrix::new(self.width, self.d, self.w)?,
            self.b,
            self.wout,
            self.bias_out,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramFile {
    pub schema: String,
    pub method: GramMethod,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub m: usize,
    /// Row-major m×m entries of the deterministic Gram matrix.
    pub g: Vec<f64>,
    /// Row-major m×m entries of its input-product-weighted companion.
    pub h: Vec<f64>,
    pub lambda: f64,
    pub mu: f64,
    pub standard_errors: Option<Vec<f64>>,
}

impl GramFile {
    pub fn from_gram(dg: &DeterministicGram) -> Self {
        Self {
            schema: GRAM_SCHEMA.to_string(),
            method: dg.method,
            samples: dg.mc_provenance.map(|(s, _)| s),
            seed: dg.mc_provenance.map(|(_, s)| s),
            m: dg.g_bar.order(),
            g: dg.g_bar.rows().to_vec(),
            h: dg.h_bar.rows().to_vec(),
            lambda: dg.lambda,
            mu: dg.mu,
            standard_errors: dg.standard_errors.as_ref().map(|se| se.rows().to_vec()),
        }
    }

    pub fn into_gram(self) -> Result<DeterministicGram> {
        check_schema(&self.schema, "gram")?;
        let g_bar = SymMatrix::from_rows(self.m, self.g)?;
        let h_bar = SymMatrix::from_rows(self.m, self.h)?;
        let standard_errors = match self.standard_errors {
            Some(se) => Some(SymMatrix::from_rows(self.m, se)?),
            None => None,
        };
        Ok(DeterministicGram {
            g_bar,
            h_bar,
            lambda: self.lambda,
            mu: self.mu,
            method: self.method,
            standard_errors,
            mc_provenance: self.samples.zip(self.seed),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateProvenance {
    pub gram_method: GramMethod,
    pub mc_samples: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    #[serde(flatten)]
    pub certificate: RateCertificate,
    /// Certificate quantities that evaluated to zero or a non-finite value.
    pub degenerate_fields: Vec<String>,
    pub provenance: CertificateProvenance,
}

impl CertificateFile {
    pub fn new(certificate: RateCertificate, dg: &DeterministicGram) -> Self {
        let degenerate_fields = certificate
            .degenerate_fields()
            .into_iter()
            .map(str::to_string)
            .collect();
        Self {
            schema: CERTIFICATE_SCHEMA.to_string(),
            certificate,
            degenerate_fields,
            provenance: CertificateProvenance {
                gram_method: dg.method,
                mc_samples: dg.mc_provenance.map(|(s, _)| s),
                seed: dg.mc_provenance.map(|(_, s)| s),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReportFile {
    pub schema: String,
    pub scale: String,
    pub seed: u64,
    pub probes: Vec<ProbeResult>,
}

/// One seeded training run inside a convergence verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub seed: u64,
    pub diverged: bool,
    /// Envelope with rate constant Λ held at every recorded step.
    pub envelope_capital_lambda: bool,
    /// Envelope with rate constant (λ+μ)/m held at every recorded step.
    pub envelope_sum_over_m: bool,
    pub monotone: bool,
    pub initial_risk: f64,
    pub final_risk: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationFile {
    pub schema: String,
    pub trials: u64,
    pub eps: f64,
    pub eta: f64,
    pub steps: usize,
    pub width: usize,
    pub capital_lambda: f64,
    /// (λ+μ)/m.
    pub rate_sum_over_m: f64,
    /// 1 − ε, the certified probability floor.
    pub target: f64,
    pub fraction_envelope_capital_lambda: f64,
    pub fraction_envelope_sum_over_m: f64,
    pub fraction_monotone: f64,
    pub per_trial: Vec<TrialOutcome>,
}

/// Pretty JSON with a trailing newline; byte-stable for equal inputs.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Trajectory CSV with header
/// `n,risk,sq_err,envelope,max_drift_W,max_drift_B,lambda_min_G,lambda_min_H`;
/// the eigenvalue cells stay empty at steps where no Gram pair was recorded.
/// The envelope column is (1 − η·rate)ⁿ·risk(0); the decay factor must lie
/// in (0, 1], which admits the degenerate η·rate = 0.
pub fn trajectory_csv(traj: &GdTrajectory, eta: f64, rate_constant: f64) -> Result<String> {
    let factor = 1.0 - eta * rate_constant;
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(Error::Domain(format!(
            "envelope decay factor must lie in (0,1], got {factor}"
        )));
    }
    let risk0 = traj
        .records
        .first()
        .ok_or_else(|| Error::Contract("empty trajectory".into()))?
        .risk;
    let mut out = String::new();
    out.push_str("n,risk,sq_err,envelope,max_drift_W,max_drift_B,lambda_min_G,lambda_min_H\n");
    for r in &traj.records {
        let envelope = factor.powi(r.step as i32) * risk0;
        write!(
            out,
            "{},{},{},{},{},{}",
            r.step, r.risk, r.sq_err, envelope, r.max_drift_w, r.max_drift_b
        )
        .expect("string write");
        match (r.lambda_min_g, r.lambda_min_h) {
            (Some(g), Some(h)) => writeln!(out, ",{g},{h}").expect("string write"),
            _ => writeln!(out, ",,").expect("string write"),
        }
    }
    Ok(out)
}
