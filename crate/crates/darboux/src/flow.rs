//! Forward-in-time integration of inextensible tangential flows of a curve
//! on a fixed surface.
//!
//! The state is the chart-coordinate sample vector, so the curve lies on the
//! surface exactly at every stage. The velocity is f1 T + f2 g with f2
//! prescribed and f1 either integrated from the inextensibility criterion
//! d(f1)/du = (f2 k_g + f3 k_n) v (with f3 forced to zero: a normal velocity
//! component would leave the surface) or prescribed for diagnostics-only
//! runs. Time stepping is classical four-stage Runge-Kutta with frames,
//! scalars and f1 recomputed at every stage.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::curve::{CurveAnalysis, DiscreteCurve, EngineOptions, GeometricScalars};
use crate::error::{Error, Result};
use crate::stencil;
use crate::surface::ParametricSurface;
use crate::vec3::Vector3;

/// Everything a speed function may look at, per sample.
#[derive(Debug, Clone, Copy)]
pub struct SampleContext {
    /// Arclength from the first sample.
    pub s: f64,
    /// Simulation time.
    pub t: f64,
    pub position: Vector3,
    pub tangent: Vector3,
    pub side: Vector3,
    pub normal: Vector3,
    pub geodesic_curvature: f64,
    pub normal_curvature: f64,
    pub geodesic_torsion: f64,
}

pub type SpeedFn = Arc<dyn Fn(&SampleContext) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum TangentialMode {
    /// f1 from the inextensibility criterion, anchored at the first sample.
    Integrated { f1_at_zero: f64 },
    /// User-supplied f1; inextensibility is then only monitored.
    Prescribed(SpeedFn),
}

/// What to do when a closed curve makes a single-valued f1 impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosurePolicy {
    /// Error out when the loop integral of the source is not ~0.
    Strict,
    /// Shift f2 by the constant that zeroes the loop integral.
    Balance,
}

#[derive(Clone)]
pub struct FlowSpec {
    pub f2: SpeedFn,
    pub f1_mode: TangentialMode,
    pub closure_policy: ClosurePolicy,
}

impl fmt::Debug for FlowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowSpec")
            .field(
                "f1_mode",
                &match self.f1_mode {
                    TangentialMode::Integrated { f1_at_zero } => format!("integrated({f1_at_zero})"),
                    TangentialMode::Prescribed(_) => "prescribed".to_string(),
                },
            )
            .field("closure_policy", &self.closure_policy)
            .finish()
    }
}

impl FlowSpec {
    pub fn integrated(
        f2: impl Fn(&SampleContext) -> f64 + Send + Sync + 'static,
        f1_at_zero: f64,
        closure_policy: ClosurePolicy,
    ) -> Self {
        Self { f2: Arc::new(f2), f1_mode: TangentialMode::Integrated { f1_at_zero }, closure_policy }
    }

    pub fn prescribed(
        f1: impl Fn(&SampleContext) -> f64 + Send + Sync + 'static,
        f2: impl Fn(&SampleContext) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f2: Arc::new(f2),
            f1_mode: TangentialMode::Prescribed(Arc::new(f1)),
            closure_policy: ClosurePolicy::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimulationConfig {
    pub dt: f64,
    pub steps: usize,
    pub snapshot_stride: usize,
    /// Relative arclength drift that aborts the run.
    pub drift_tolerance: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self { dt: 1e-3, steps: 1000, snapshot_stride: 100, drift_tolerance: 1e-3 }
    }
}

/// Per-step conservation diagnostics, reported raw.
#[derive(Debug, Clone, Serialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub length: f64,
    /// |L(t) - L(0)| / L(0).
    pub drift: f64,
    /// Largest inextensibility residual at the integration nodes, measured
    /// in the quadrature-consistent form the f1 construction enforces.
    pub residual: f64,
    /// Smallest |x_u x x_v| along the curve.
    pub regularity_margin: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub rows: Vec<StepDiagnostics>,
}

/// Curve state captured along a run.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub curve: DiscreteCurve,
    pub analysis: CurveAnalysis,
}

/// Result of building the tangential speed: f1, the side speed actually used
/// (shifted under the balance policy), the shift itself and the loop defect
/// the construction had to absorb.
#[derive(Debug, Clone)]
pub struct TangentialSpeed {
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub balance_shift: f64,
    /// Loop integral of the f1 source that was spread uniformly over the
    /// curve to keep f1 single-valued. Zero for compatible flows; a nonzero
    /// value shows up as a flat inextensibility residual of defect / U.
    pub loop_defect: f64,
}

const CLOSURE_LIMIT_REL: f64 = 1e-8;
/// A loop defect is absorbable only while the flat residual it leaves in the
/// construction, defect / U, stays below this fraction of the flow's speed
/// scale; beyond that the flow is genuinely incompatible.
const CLOSURE_SOFT_REL: f64 = 1e-5;
const BALANCE_DENOM_MIN: f64 = 1e-10;

/// Integrate d(f1)/du = (f2 k_g + f3 k_n) v from the anchor value.
///
/// On closed curves the loop integral of the source must vanish for f1 to be
/// single-valued. Under `Strict`, a loop integral that is small against the
/// source's own mass (discretization drift of a compatible flow) is spread
/// uniformly over the curve -- a tangential reparameterization that cannot
/// change the shape or the length -- and recorded as `loop_defect`; anything
/// larger is an error. Under `Balance`, f2 is shifted by the constant that
/// zeroes the loop integral.
pub fn integrate_f1(
    scalars: &GeometricScalars,
    f2: &[f64],
    f3: &[f64],
    f1_at_zero: f64,
    closed: bool,
    h: f64,
    policy: ClosurePolicy,
) -> Result<TangentialSpeed> {
    let n = f2.len();
    let source = |f2: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                (f2[i] * scalars.geodesic_curvature[i] + f3[i] * scalars.normal_curvature[i])
                    * scalars.speed[i]
            })
            .collect()
    };
    let mut f2 = f2.to_vec();
    let mut g = source(&f2);
    let mut balance_shift = 0.0;
    let mut loop_defect = 0.0;
    if closed {
        let loop_integral = stencil::integrate(&g, true, h);
        let limit = CLOSURE_LIMIT_REL * scalars.total_length;
        if loop_integral.abs() > limit {
            match policy {
                ClosurePolicy::Strict => {
                    let speed_scale = (0..n)
                        .map(|i| (f2[i].abs() + f3[i].abs()) * scalars.speed[i])
                        .fold(1.0f64, f64::max);
                    let per_u = loop_integral / (h * n as f64);
                    if per_u.abs() > CLOSURE_SOFT_REL * speed_scale {
                        return Err(Error::ClosureIncompatible { loop_integral, limit });
                    }
                    loop_defect = loop_integral;
                    for x in g.iter_mut() {
                        *x -= per_u;
                    }
                }
                ClosurePolicy::Balance => {
                    let weights: Vec<f64> = (0..n)
                        .map(|i| scalars.geodesic_curvature[i] * scalars.speed[i])
                        .collect();
                    let denominator = stencil::integrate(&weights, true, h);
                    if denominator.abs() <= BALANCE_DENOM_MIN {
                        return Err(Error::BalanceImpossible { denominator });
                    }
                    balance_shift = loop_integral / denominator;
                    for x in f2.iter_mut() {
                        *x -= balance_shift;
                    }
                    g = source(&f2);
                }
            }
        }
    }
    let cumulative = stencil::cumulative_trapezoid(&g, h);
    let f1 = cumulative.into_iter().map(|c| f1_at_zero + c).collect();
    Ok(TangentialSpeed { f1, f2, balance_shift, loop_defect })
}

/// Largest residual of the integrated construction at the quadrature nodes:
/// forward difference of f1 against the trapezoid-averaged source. This is
/// the form the construction enforces, so it sits at rounding level and
/// guards the quadrature itself.
pub fn construction_residual(
    speed: &TangentialSpeed,
    scalars: &GeometricScalars,
    f3: &[f64],
    closed: bool,
    h: f64,
) -> f64 {
    let n = speed.f1.len();
    let g: Vec<f64> = (0..n)
        .map(|i| {
            (speed.f2[i] * scalars.geodesic_curvature[i] + f3[i] * scalars.normal_curvature[i])
                * scalars.speed[i]
        })
        .collect();
    let segments = if closed { n } else { n - 1 };
    let mut max = 0.0f64;
    for i in 0..segments {
        let j = (i + 1) % n;
        let df = if j == 0 {
            // wrap segment: single-valuedness means f1 returns to its anchor
            speed.f1[0] - speed.f1[n - 1]
        } else {
            speed.f1[j] - speed.f1[i]
        };
        max = max.max((df / h - 0.5 * (g[i] + g[j])).abs());
    }
    max
}

/// Solve [x_u x_v] (du, dv) = velocity through the first fundamental form.
/// The velocity must be tangent to the chart at (u, v).
pub fn tangential_pullback(
    surface: &ParametricSurface,
    u: f64,
    v: f64,
    velocity: Vector3,
) -> Result<(f64, f64)> {
    let speed = velocity.norm();
    if speed > 0.0 {
        let normal = surface.unit_normal(u, v)?;
        let off = velocity.dot(normal) / speed;
        if off.abs() > 1e-6 {
            return Err(Error::NonTangentialVelocity { dot: off });
        }
    }
    let jet = surface.jet(u, v)?;
    let (e, f, g) = surface.first_fundamental_form(u, v)?;
    let det = e * g - f * f;
    let (bu, bv) = (velocity.dot(jet.x_u), velocity.dot(jet.x_v));
    let du = (g * bu - f * bv) / det;
    let dv = (e * bv - f * bu) / det;
    let residual = (jet.x_u * du + jet.x_v * dv - velocity).norm();
    if residual > 1e-8 * speed.max(1e-300) && speed > 0.0 {
        return Err(Error::NonTangentialVelocity { dot: residual / speed });
    }
    Ok((du, dv))
}

/// Tangential speeds of the flow at the current state.
fn speeds_at(
    curve: &DiscreteCurve,
    analysis: &CurveAnalysis,
    spec: &FlowSpec,
    t: f64,
) -> Result<TangentialSpeed> {
    let n = curve.len();
    let sc = &analysis.scalars;
    let context = |i: usize| SampleContext {
        s: sc.arclength[i],
        t,
        position: curve
            .surface()
            .point(curve.params()[i].0, curve.params()[i].1)
            .expect("state params are always in-domain"),
        tangent: analysis.frames.tangent[i],
        side: analysis.frames.side[i],
        normal: analysis.frames.normal[i],
        geodesic_curvature: sc.geodesic_curvature[i],
        normal_curvature: sc.normal_curvature[i],
        geodesic_torsion: sc.geodesic_torsion[i],
    };
    let f2: Vec<f64> = (0..n).map(|i| (spec.f2)(&context(i))).collect();
    let f3 = vec![0.0; n]; // fixed-surface mode: normal velocity leaves M
    match &spec.f1_mode {
        TangentialMode::Integrated { f1_at_zero } => integrate_f1(
            sc,
            &f2,
            &f3,
            *f1_at_zero,
            curve.closed(),
            curve.step(),
            spec.closure_policy,
        ),
        TangentialMode::Prescribed(f1_fn) => {
            let f1 = (0..n).map(|i| f1_fn(&context(i))).collect();
            Ok(TangentialSpeed { f1, f2, balance_shift: 0.0, loop_defect: 0.0 })
        }
    }
}

/// Chart-coordinate velocity field of the flow at the given state.
fn chart_velocity(
    curve: &DiscreteCurve,
    spec: &FlowSpec,
    t: f64,
    opts: &EngineOptions,
) -> Result<Vec<(f64, f64)>> {
    let analysis = curve.analyze(opts)?;
    let speeds = speeds_at(curve, &analysis, spec, t)?;
    let mut out = Vec::with_capacity(curve.len());
    for i in 0..curve.len() {
        let velocity =
            analysis.frames.tangent[i] * speeds.f1[i] + analysis.frames.side[i] * speeds.f2[i];
        let (u, v) = curve.params()[i];
        out.push(tangential_pullback(curve.surface(), u, v, velocity)?);
    }
    Ok(out)
}

/// One classical Runge-Kutta step of size dt starting at time t.
pub fn step(
    curve: &DiscreteCurve,
    spec: &FlowSpec,
    t: f64,
    dt: f64,
    opts: &EngineOptions,
) -> Result<DiscreteCurve> {
    let advance = |base: &DiscreteCurve, k: &[(f64, f64)], factor: f64| -> Result<DiscreteCurve> {
        let params = base
            .params()
            .iter()
            .zip(k)
            .map(|(&(u, v), &(du, dv))| (u + factor * du, v + factor * dv))
            .collect();
        DiscreteCurve::new(base.surface().clone(), params, base.closed(), base.u_max())
    };
    let k1 = chart_velocity(curve, spec, t, opts)?;
    let s2 = advance(curve, &k1, 0.5 * dt)?;
    let k2 = chart_velocity(&s2, spec, t + 0.5 * dt, opts)?;
    let s3 = advance(curve, &k2, 0.5 * dt)?;
    let k3 = chart_velocity(&s3, spec, t + 0.5 * dt, opts)?;
    let s4 = advance(curve, &k3, dt)?;
    let k4 = chart_velocity(&s4, spec, t + dt, opts)?;
    let params = (0..curve.len())
        .map(|i| {
            let (u, v) = curve.params()[i];
            (
                u + dt / 6.0 * (k1[i].0 + 2.0 * k2[i].0 + 2.0 * k3[i].0 + k4[i].0),
                v + dt / 6.0 * (k1[i].1 + 2.0 * k2[i].1 + 2.0 * k3[i].1 + k4[i].1),
            )
        })
        .collect();
    DiscreteCurve::new(curve.surface().clone(), params, curve.closed(), curve.u_max())
}

/// Integrate the flow, collecting snapshots and per-step diagnostics. Aborts
/// with `DriftExceeded` when the relative arclength drift passes the
/// configured tolerance.
pub fn run(
    initial: &DiscreteCurve,
    spec: &FlowSpec,
    config: &SimulationConfig,
    opts: &EngineOptions,
) -> Result<(Vec<Snapshot>, Diagnostics)> {
    let mut curve = initial.clone();
    let mut snapshots = Vec::new();
    let mut diagnostics = Diagnostics::default();
    let mut length0 = None;
    for k in 0..=config.steps {
        let t = k as f64 * config.dt;
        let analysis = curve.analyze(opts)?;
        let length = analysis.scalars.total_length;
        let base = *length0.get_or_insert(length);
        let drift = (length - base).abs() / base;

        let speeds = speeds_at(&curve, &analysis, spec, t)?;
        let residual = construction_residual(
            &speeds,
            &analysis.scalars,
            &vec![0.0; curve.len()],
            curve.closed(),
            curve.step(),
        );
        let mut margin = f64::INFINITY;
        for &(u, v) in curve.params() {
            margin = margin.min(curve.surface().regularity_margin(u, v)?);
        }
        diagnostics.rows.push(StepDiagnostics {
            step: k,
            t,
            length,
            drift,
            residual,
            regularity_margin: margin,
        });
        if k % config.snapshot_stride == 0 || k == config.steps {
            snapshots.push(Snapshot { step: k, t, curve: curve.clone(), analysis });
        }
        if drift > config.drift_tolerance {
            return Err(Error::DriftExceeded { step: k, drift, tolerance: config.drift_tolerance });
        }
        if k < config.steps {
            curve = step(&curve, spec, t, config.dt, opts)?;
        }
    }
    Ok((snapshots, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, TAU};

    fn sphere_circle(theta0: f64, n: usize) -> DiscreteCurve {
        let surface = Arc::new(ParametricSurface::sphere(1.0));
        DiscreteCurve::from_chart_path(surface, move |u| (theta0, u), TAU, n, true).unwrap()
    }

    fn opts() -> EngineOptions {
        EngineOptions::default()
    }

    #[test]
    fn integrate_f1_on_straight_segment_is_constant() {
        let surface = Arc::new(ParametricSurface::plane());
        let line =
            DiscreteCurve::from_chart_path(surface, |u| (u, 0.0), 1.0, 64, false).unwrap();
        let a = line.analyze(&opts()).unwrap();
        let f2: Vec<f64> = (0..64).map(|i| (i as f64 * 0.3).sin()).collect();
        let f3 = vec![0.0; 64];
        let ts = integrate_f1(&a.scalars, &f2, &f3, 0.7, false, line.step(), ClosurePolicy::Strict)
            .unwrap();
        for x in &ts.f1 {
            assert!((x - 0.7).abs() <= 1e-12);
        }
    }

    #[test]
    fn closure_incompatible_for_constant_f2_on_latitude() {
        let curve = sphere_circle(FRAC_PI_3, 256);
        let a = curve.analyze(&opts()).unwrap();
        let f2 = vec![1.0; 256];
        let f3 = vec![0.0; 256];
        let err =
            integrate_f1(&a.scalars, &f2, &f3, 0.0, true, curve.step(), ClosurePolicy::Strict);
        match err {
            Err(Error::ClosureIncompatible { loop_integral, .. }) => {
                // integral of v k_g over the loop: cos(theta0) * 2 pi
                assert!((loop_integral - TAU * FRAC_PI_3.cos()).abs() <= 1e-3);
            }
            other => panic!("expected ClosureIncompatible, got {other:?}"),
        }
    }

    #[test]
    fn compatible_f2_integrates_to_known_f1() {
        let n = 512;
        let curve = sphere_circle(FRAC_PI_3, n);
        let a = curve.analyze(&opts()).unwrap();
        let h = curve.step();
        let f2: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let f3 = vec![0.0; n];
        let ts =
            integrate_f1(&a.scalars, &f2, &f3, 0.25, true, h, ClosurePolicy::Strict).unwrap();
        assert!(ts.balance_shift == 0.0);
        for i in 0..n {
            let u = i as f64 * h;
            let expected = 0.25 + FRAC_PI_3.cos() * (1.0 - u.cos());
            assert!((ts.f1[i] - expected).abs() <= 1e-4, "f1[{i}] = {} vs {expected}", ts.f1[i]);
        }
        let resid = construction_residual(&ts, &a.scalars, &f3, true, h);
        assert!(resid <= 1e-10, "construction residual {resid}");
    }

    #[test]
    fn small_loop_defect_is_absorbed_tangentially() {
        // a compatible profile plus a parts-per-million constant: the loop
        // integral is far above rounding yet tiny against the source mass,
        // so strict integration spreads it instead of erroring
        let n = 512;
        let curve = sphere_circle(FRAC_PI_3, n);
        let a = curve.analyze(&opts()).unwrap();
        let h = curve.step();
        let f2: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin() + 1e-6).collect();
        let f3 = vec![0.0; n];
        let ts = integrate_f1(&a.scalars, &f2, &f3, 0.0, true, h, ClosurePolicy::Strict).unwrap();
        let expected_defect = TAU * FRAC_PI_3.cos() * 1e-6;
        assert!((ts.loop_defect - expected_defect).abs() <= 1e-9, "{}", ts.loop_defect);
        // f1 stays single-valued: the wrap mismatch equals the interior one
        let resid = construction_residual(&ts, &a.scalars, &f3, true, h);
        assert!(resid <= 2.0 * expected_defect / TAU + 1e-12, "residual {resid}");
    }

    #[test]
    fn balance_policy_shifts_constant_f2_away() {
        let curve = sphere_circle(FRAC_PI_3, 256);
        let a = curve.analyze(&opts()).unwrap();
        let f2 = vec![1.0; 256];
        let f3 = vec![0.0; 256];
        let ts = integrate_f1(&a.scalars, &f2, &f3, 0.0, true, curve.step(), ClosurePolicy::Balance)
            .unwrap();
        assert!((ts.balance_shift - 1.0).abs() <= 1e-9);
        for x in &ts.f2 {
            assert!(x.abs() <= 1e-9);
        }
    }

    #[test]
    fn balance_impossible_on_geodesic() {
        let curve = sphere_circle(FRAC_PI_2, 256);
        let a = curve.analyze(&opts()).unwrap();
        // force an incompatible source through f3 on a curve with k_g = 0
        let f2 = vec![0.0; 256];
        let f3 = vec![1.0; 256];
        let err =
            integrate_f1(&a.scalars, &f2, &f3, 0.0, true, curve.step(), ClosurePolicy::Balance);
        assert!(matches!(err, Err(Error::BalanceImpossible { .. })));
    }

    #[test]
    fn pullback_plane_is_identity() {
        let plane = ParametricSurface::plane();
        let (du, dv) = tangential_pullback(&plane, 0.3, -1.2, Vector3::new(0.8, -0.4, 0.0)).unwrap();
        assert!((du - 0.8).abs() <= 1e-12 && (dv + 0.4).abs() <= 1e-12);
    }

    #[test]
    fn pullback_sphere_equator_vertical() {
        let sphere = ParametricSurface::sphere(1.0);
        // at the equator x_theta = (0,0,-1), so +z pulls back to d(theta) = -1
        let (du, dv) = tangential_pullback(&sphere, FRAC_PI_2, 0.0, Vector3::Z).unwrap();
        assert!((du + 1.0).abs() <= 1e-12, "{du}");
        assert!(dv.abs() <= 1e-12);
    }

    #[test]
    fn pullback_cylinder_helix_tangent() {
        let cyl = ParametricSurface::cylinder(1.0);
        let b = 0.5f64;
        let u = 1.1f64;
        let velocity = Vector3::new(-u.sin(), u.cos(), b);
        let (du, dv) = tangential_pullback(&cyl, u, 0.0, velocity).unwrap();
        assert!((du - 1.0).abs() <= 1e-12 && (dv - b).abs() <= 1e-12);
    }

    #[test]
    fn pullback_rejects_normal_velocity() {
        let sphere = ParametricSurface::sphere(1.0);
        let err = tangential_pullback(&sphere, FRAC_PI_2, 0.0, Vector3::X);
        assert!(matches!(err, Err(Error::NonTangentialVelocity { .. })));
    }

    #[test]
    fn zero_flow_leaves_state_unchanged() {
        let curve = sphere_circle(FRAC_PI_2, 64);
        let spec = FlowSpec::integrated(|_| 0.0, 0.0, ClosurePolicy::Strict);
        let next = step(&curve, &spec, 0.0, 1e-2, &opts()).unwrap();
        for (a, b) in curve.params().iter().zip(next.params()) {
            assert!((a.0 - b.0).abs() <= 1e-14 && (a.1 - b.1).abs() <= 1e-14);
        }
    }

    #[test]
    fn rigid_rotation_step_matches_exact_rotation() {
        // Killing field of rotation about x, prescribed; one RK4 step at dt
        // tracks the exact rotation to O(dt^5)
        let curve = sphere_circle(FRAC_PI_2, 128);
        let axis = Vector3::X;
        let spec = FlowSpec::prescribed(
            move |c: &SampleContext| axis.cross(c.position).dot(c.tangent),
            move |c: &SampleContext| axis.cross(c.position).dot(c.side),
        );
        let dt = 1e-2;
        let next = step(&curve, &spec, 0.0, dt, &opts()).unwrap();
        let sampled = next.sample().unwrap();
        let exact = curve.sample().unwrap();
        let mut max_err = 0.0f64;
        for i in 0..curve.len() {
            let rotated = crate::vec3::rotate_x(exact.points[i], dt);
            max_err = max_err.max(sampled.points[i].distance(rotated));
        }
        assert!(max_err <= 10.0 * dt.powi(5), "one-step error {max_err}");
    }

    #[test]
    fn balanced_flow_on_great_circle_conserves_length() {
        let curve = sphere_circle(FRAC_PI_2, 256);
        let length0 = curve.analyze(&opts()).unwrap().scalars.total_length;
        let spec = FlowSpec::integrated(
            move |c: &SampleContext| (TAU * c.s / TAU).sin(),
            0.0,
            ClosurePolicy::Strict,
        );
        let next = step(&curve, &spec, 0.0, 1e-3, &opts()).unwrap();
        let length1 = next.analyze(&opts()).unwrap().scalars.total_length;
        assert!(
            (length1 - length0).abs() <= 1e-10 * length0,
            "relative length change {}",
            (length1 - length0).abs() / length0
        );
    }

    #[test]
    fn run_collects_diagnostics_and_snapshots() {
        let curve = sphere_circle(FRAC_PI_2, 128);
        let spec = FlowSpec::integrated(
            |c: &SampleContext| c.s.sin(),
            0.0,
            ClosurePolicy::Strict,
        );
        let config = SimulationConfig { dt: 1e-3, steps: 50, snapshot_stride: 10, drift_tolerance: 1e-3 };
        let (snaps, diag) = run(&curve, &spec, &config, &opts()).unwrap();
        assert_eq!(snaps.len(), 6);
        assert_eq!(diag.rows.len(), 51);
        for row in &diag.rows {
            assert!(row.drift <= 1e-7, "drift {}", row.drift);
            assert!(row.residual <= 1e-6, "residual {}", row.residual);
            assert!(row.regularity_margin > 0.9);
        }
        // before any loop defect accumulates the residual is pure quadrature
        assert!(diag.rows[0].residual <= 1e-12);
    }

    #[test]
    fn non_inextensible_prescribed_flow_trips_drift_abort() {
        let curve = sphere_circle(FRAC_PI_3, 128);
        let spec = FlowSpec::prescribed(|_| 0.0, |_| 1.0);
        let config = SimulationConfig { dt: 1e-3, steps: 100, snapshot_stride: 50, drift_tolerance: 1e-3 };
        match run(&curve, &spec, &config, &opts()) {
            Err(Error::DriftExceeded { step, drift, .. }) => {
                assert!(step <= 100, "aborted at step {step}");
                assert!(drift > 1e-3);
            }
            other => panic!("expected DriftExceeded, got {other:?}"),
        }
    }

    #[test]
    fn rk4_order_on_rigid_rotation() {
        // global endpoint error over a fixed horizon scales like dt^4
        let axis = Vector3::X;
        let horizon = 0.4;
        let mut errs = Vec::new();
        for steps in [20usize, 40] {
            let curve = sphere_circle(FRAC_PI_2, 64);
            let spec = FlowSpec::prescribed(
                move |c: &SampleContext| axis.cross(c.position).dot(c.tangent),
                move |c: &SampleContext| axis.cross(c.position).dot(c.side),
            );
            let dt = horizon / steps as f64;
            let mut state = curve.clone();
            for k in 0..steps {
                state = step(&state, &spec, k as f64 * dt, dt, &opts()).unwrap();
            }
            let got = state.sample().unwrap();
            let exact = curve.sample().unwrap();
            let mut err = 0.0f64;
            for i in 0..curve.len() {
                err = err.max(got.points[i].distance(crate::vec3::rotate_x(exact.points[i], horizon)));
            }
            errs.push(err);
        }
        let ratio = errs[0] / errs[1];
        assert!(ratio > 11.0 && ratio < 21.0, "RK4 ratio {ratio}");
    }

    #[test]
    fn curvature_driven_side_speed_is_expressible() {
        // f2 = k_g: moves by the geodesic curvature; just has to run
        let curve = sphere_circle(FRAC_PI_3, 128);
        let spec = FlowSpec::integrated(
            |c: &SampleContext| c.geodesic_curvature,
            0.0,
            ClosurePolicy::Balance,
        );
        let config = SimulationConfig { dt: 1e-3, steps: 5, snapshot_stride: 5, drift_tolerance: 1e-2 };
        let (snaps, _) = run(&curve, &spec, &config, &opts()).unwrap();
        assert_eq!(snaps.len(), 2);
    }
}
