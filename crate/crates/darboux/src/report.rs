//! Residual reports: the output contract of the identity verification engine.

use serde::{Deserialize, Serialize};

/// Max/RMS residual of one identity on one family at one resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: String,
    pub family: String,
    /// Spatial samples and time step of the finite-difference grid.
    pub n: usize,
    pub dt: f64,
    pub max_residual: f64,
    pub rms_residual: f64,
    /// Largest magnitude among the individual right-hand-side terms; a
    /// residual is only evidence if the terms it cancels are not all zero.
    pub max_term: f64,
    /// Tolerance the pass flag was judged against.
    pub tolerance: f64,
    pub pass: bool,
    /// Truncation order of the stencils used.
    pub expected_order: f64,
    /// Rounding floor of the residual pipeline at this resolution: the
    /// eps-amplification of a second s-derivative of a time difference.
    /// Residuals below it are noise and cannot be expected to converge.
    #[serde(default)]
    pub noise_floor: f64,
    /// For identity variants known to deviate: the magnitude of the dropped
    /// term, i.e. the residual the variant is predicted to show.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ResidualReport {
    pub fn from_field(
        identity: &str,
        family: &str,
        n: usize,
        dt: f64,
        residual: &[f64],
        max_term: f64,
        tolerance: f64,
        expected_order: f64,
    ) -> Self {
        let max_residual = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let rms_residual =
            (residual.iter().map(|r| r * r).sum::<f64>() / residual.len() as f64).sqrt();
        Self {
            identity: identity.to_string(),
            family: family.to_string(),
            n,
            dt,
            max_residual,
            rms_residual,
            max_term,
            tolerance,
            pass: max_residual <= tolerance,
            expected_order,
            noise_floor: 0.0,
            predicted_deviation: None,
            note: None,
        }
    }

    pub fn with_noise_floor(mut self, floor: f64) -> Self {
        self.noise_floor = floor;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_predicted_deviation(mut self, deviation: f64) -> Self {
        self.predicted_deviation = Some(deviation);
        self
    }
}
