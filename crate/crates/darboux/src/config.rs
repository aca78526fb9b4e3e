//! Run configuration: a JSON document describing the surface, the curve, the
//! flow and the simulation settings. Unknown keys are rejected; defaults are
//! materialized on load so a canonical re-emit echoes the full effective
//! configuration.

use std::f64::consts::TAU;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::DiscreteCurve;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::flow::{ClosurePolicy, FlowSpec, SampleContext, SimulationConfig, TangentialMode};
use crate::surface::{MongePatch, ParametricSurface};

/// Variables available to flow speed expressions.
pub const FLOW_VARS: [&str; 5] = ["s", "t", "kg", "kn", "taug"];
/// Variables available to Monge height expressions.
pub const MONGE_VARS: [&str; 2] = ["u", "v"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceConfig,
    pub curve: CurveConfig,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub simulation: SimulationSettings,
    #[serde(default)]
    pub tolerances: ToleranceSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Plane,
    Sphere { radius: f64 },
    Torus { ring_radius: f64, tube_radius: f64 },
    Cylinder { radius: f64 },
    /// Height expression over the chart variables u, v.
    Monge { height: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_true")]
    pub closed: bool,
    /// Latent parameter range; defaults to 2 pi.
    #[serde(default = "default_u_max")]
    pub u_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierPath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(f64, f64)>>,
}

/// Truncated Fourier path in chart coordinates. Each chart axis moves as
/// ```text
///   constant + winding * P * (u / u_max) + slope * u
///   + sum_k cos_k * cos(2 pi (k+1) u / u_max)
///   + sum_k sin_k * sin(2 pi (k+1) u / u_max)
/// ```
/// where P is the axis period (winding is only legal on periodic axes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierPath {
    pub u: AxisPath,
    pub v: AxisPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AxisPath {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub winding: i64,
    #[serde(default)]
    pub slope: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cos: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// Side speed expression over s, t, kg, kn, taug.
    #[serde(default = "default_f2")]
    pub f2: String,
    #[serde(default)]
    pub f1_mode: F1Mode,
    /// Anchor value for the integrated mode.
    #[serde(default)]
    pub f1_at_zero: f64,
    /// Tangential speed expression for the prescribed mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<String>,
    #[serde(default)]
    pub closure_policy: PolicyConfig,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            f2: default_f2(),
            f1_mode: F1Mode::Integrated,
            f1_at_zero: 0.0,
            f1: None,
            closure_policy: PolicyConfig::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum F1Mode {
    #[default]
    Integrated,
    Prescribed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PolicyConfig {
    #[default]
    Strict,
    Balance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSettings {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_drift_tolerance")]
    pub drift_tolerance: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            steps: default_steps(),
            snapshot_stride: default_stride(),
            drift_tolerance: default_drift_tolerance(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSettings {
    #[serde(default = "default_epsilon_reg")]
    pub epsilon_reg: f64,
    #[serde(default = "default_tolerance_scale")]
    pub tolerance_scale: f64,
    #[serde(default = "default_classify_tol")]
    pub classify_tol: f64,
    #[serde(default = "default_tangency_tol")]
    pub tangency_tol: f64,
}

impl Default for ToleranceSettings {
    fn default() -> Self {
        Self {
            epsilon_reg: default_epsilon_reg(),
            tolerance_scale: default_tolerance_scale(),
            classify_tol: default_classify_tol(),
            tangency_tol: default_tangency_tol(),
        }
    }
}

fn default_n() -> usize {
    512
}
fn default_true() -> bool {
    true
}
fn default_u_max() -> f64 {
    TAU
}
fn default_f2() -> String {
    "0".to_string()
}
fn default_dt() -> f64 {
    1e-3
}
fn default_steps() -> usize {
    1000
}
fn default_stride() -> usize {
    100
}
fn default_drift_tolerance() -> f64 {
    1e-3
}
fn default_epsilon_reg() -> f64 {
    crate::surface::DEFAULT_EPSILON_REG
}
fn default_tolerance_scale() -> f64 {
    10.0
}
fn default_classify_tol() -> f64 {
    1e-6
}
fn default_tangency_tol() -> f64 {
    crate::curve::DEFAULT_TANGENCY_TOL
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), message: message.into() }
}

/// Load and validate a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Parse and validate a config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Canonical emission: field order fixed by the struct, defaults
    /// materialized, trailing newline.
    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        match &self.surface {
            SurfaceConfig::Sphere { radius } | SurfaceConfig::Cylinder { radius } => {
                if *radius <= 0.0 {
                    return Err(invalid("surface.radius", "radius must be positive"));
                }
            }
            SurfaceConfig::Torus { ring_radius, tube_radius } => {
                if *ring_radius <= 0.0 || *tube_radius <= 0.0 {
                    return Err(invalid("surface", "torus radii must be positive"));
                }
                if tube_radius >= ring_radius {
                    return Err(invalid("surface.tube_radius", "tube radius exceeds ring radius"));
                }
            }
            SurfaceConfig::Monge { height } => {
                Expr::parse(height, &MONGE_VARS)?;
            }
            SurfaceConfig::Plane => {}
        }

        if self.curve.n < crate::curve::MIN_SAMPLES {
            return Err(invalid(
                "curve.n",
                format!("need at least {} samples", crate::curve::MIN_SAMPLES),
            ));
        }
        if !(self.curve.u_max > 0.0) {
            return Err(invalid("curve.u_max", "parameter range must be positive"));
        }
        match (&self.curve.fourier, &self.curve.samples) {
            (None, None) => {
                return Err(invalid("curve", "one of 'fourier' or 'samples' is required"))
            }
            (Some(_), Some(_)) => {
                return Err(invalid("curve", "'fourier' and 'samples' are mutually exclusive"))
            }
            (None, Some(samples)) => {
                if samples.len() != self.curve.n {
                    return Err(invalid(
                        "curve.samples",
                        format!("expected {} samples, got {}", self.curve.n, samples.len()),
                    ));
                }
            }
            (Some(fourier), None) => {
                let surface = self.surface()?;
                let domain = surface.domain();
                if fourier.u.winding != 0 && !domain.u.periodic {
                    return Err(invalid("curve.fourier.u.winding", "axis is not periodic"));
                }
                if fourier.v.winding != 0 && !domain.v.periodic {
                    return Err(invalid("curve.fourier.v.winding", "axis is not periodic"));
                }
            }
        }

        if !(self.simulation.dt > 0.0) {
            return Err(invalid("simulation.dt", "time step must be positive"));
        }
        if self.simulation.steps == 0 {
            return Err(invalid("simulation.steps", "need at least one step"));
        }
        if self.simulation.snapshot_stride == 0 {
            return Err(invalid("simulation.snapshot_stride", "stride must be positive"));
        }
        if !(self.simulation.drift_tolerance > 0.0) {
            return Err(invalid("simulation.drift_tolerance", "tolerance must be positive"));
        }

        Expr::parse(&self.flow.f2, &FLOW_VARS)?;
        match (self.flow.f1_mode, &self.flow.f1) {
            (F1Mode::Prescribed, None) => {
                return Err(invalid("flow.f1", "prescribed mode needs an f1 expression"))
            }
            (F1Mode::Prescribed, Some(f1)) => {
                Expr::parse(f1, &FLOW_VARS)?;
            }
            (F1Mode::Integrated, Some(_)) => {
                return Err(invalid("flow.f1", "integrated mode does not take an f1 expression"))
            }
            (F1Mode::Integrated, None) => {}
        }
        Ok(())
    }

    pub fn surface(&self) -> Result<ParametricSurface> {
        let surface = match &self.surface {
            SurfaceConfig::Plane => ParametricSurface::plane(),
            SurfaceConfig::Sphere { radius } => ParametricSurface::sphere(*radius),
            SurfaceConfig::Torus { ring_radius, tube_radius } => {
                ParametricSurface::torus(*ring_radius, *tube_radius)
            }
            SurfaceConfig::Cylinder { radius } => ParametricSurface::cylinder(*radius),
            SurfaceConfig::Monge { height } => {
                let expr = Expr::parse(height, &MONGE_VARS)?;
                ParametricSurface::monge(MongePatch::numeric(move |u, v| expr.eval(&[u, v])))
            }
        };
        Ok(surface.with_epsilon_reg(self.tolerances.epsilon_reg))
    }

    pub fn curve(&self, surface: Arc<ParametricSurface>) -> Result<DiscreteCurve> {
        if let Some(samples) = &self.curve.samples {
            return DiscreteCurve::new(
                surface,
                samples.clone(),
                self.curve.closed,
                self.curve.u_max,
            );
        }
        let fourier = self.curve.fourier.as_ref().expect("validated");
        let domain = *surface.domain();
        let u_max = self.curve.u_max;
        let axis = |p: &AxisPath, period: f64| {
            let p = p.clone();
            move |u: f64| {
                let mut x = p.constant + p.winding as f64 * period * (u / u_max) + p.slope * u;
                for (k, a) in p.cos.iter().enumerate() {
                    x += a * (TAU * (k + 1) as f64 * u / u_max).cos();
                }
                for (k, b) in p.sin.iter().enumerate() {
                    x += b * (TAU * (k + 1) as f64 * u / u_max).sin();
                }
                x
            }
        };
        let fu = axis(&fourier.u, domain.u.hi - domain.u.lo);
        let fv = axis(&fourier.v, domain.v.hi - domain.v.lo);
        DiscreteCurve::from_chart_path(
            surface,
            move |u| (fu(u), fv(u)),
            u_max,
            self.curve.n,
            self.curve.closed,
        )
    }

    pub fn flow_spec(&self) -> Result<FlowSpec> {
        let f2_expr = Expr::parse(&self.flow.f2, &FLOW_VARS)?;
        let f2 = move |c: &SampleContext| {
            f2_expr.eval(&[c.s, c.t, c.geodesic_curvature, c.normal_curvature, c.geodesic_torsion])
        };
        let closure_policy = match self.flow.closure_policy {
            PolicyConfig::Strict => ClosurePolicy::Strict,
            PolicyConfig::Balance => ClosurePolicy::Balance,
        };
        let f1_mode = match self.flow.f1_mode {
            F1Mode::Integrated => TangentialMode::Integrated { f1_at_zero: self.flow.f1_at_zero },
            F1Mode::Prescribed => {
                let f1_expr = Expr::parse(self.flow.f1.as_ref().expect("validated"), &FLOW_VARS)?;
                TangentialMode::Prescribed(Arc::new(move |c: &SampleContext| {
                    f1_expr.eval(&[
                        c.s,
                        c.t,
                        c.geodesic_curvature,
                        c.normal_curvature,
                        c.geodesic_torsion,
                    ])
                }))
            }
        };
        Ok(FlowSpec { f2: Arc::new(f2), f1_mode, closure_policy })
    }

    pub fn simulation(&self) -> SimulationConfig {
        SimulationConfig {
            dt: self.simulation.dt,
            steps: self.simulation.steps,
            snapshot_stride: self.simulation.snapshot_stride,
            drift_tolerance: self.simulation.drift_tolerance,
        }
    }

    pub fn engine_options(&self) -> crate::curve::EngineOptions {
        crate::curve::EngineOptions {
            tangency_tol: self.tolerances.tangency_tol,
            ..Default::default()
        }
    }
}
