//! Discrete curves on a surface: arclength, the d/ds operator, Darboux and
//! Frenet frames, and the scalar invariants (geodesic curvature, normal
//! curvature, geodesic torsion, curvature, torsion, frame angle).
//!
//! Curves are stored in chart coordinates so they lie on the surface exactly;
//! ambient quantities are derived per sample. All parameter derivatives are
//! finite differences at the sampling resolution, so every scalar carries a
//! truncation error of the stencil order.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::stencil::{self, StencilOrder};
use crate::surface::ParametricSurface;
use crate::vec3::Vector3;

pub const DEFAULT_EPSILON_KAPPA: f64 = 1e-8;
/// Ceiling on |<T_raw, n>| before the sampling is declared inconsistent with
/// the chart. The raw tangent of a smooth on-surface curve picks up an
/// O(h^2 |d^3 alpha|) normal component, so the default leaves room for
/// moderately wiggly curves at production resolutions.
pub const DEFAULT_TANGENCY_TOL: f64 = 1e-3;
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    pub order: StencilOrder,
    pub tangency_tol: f64,
    pub epsilon_kappa: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            order: StencilOrder::Two,
            tangency_tol: DEFAULT_TANGENCY_TOL,
            epsilon_kappa: DEFAULT_EPSILON_KAPPA,
        }
    }
}

/// A curve given by ambient sample points plus the adapted unit normal at
/// each sample. This is the common substrate for curves bound to a surface
/// chart and for time slices of curve families that carry their own normals.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub points: Vec<Vector3>,
    pub normals: Vec<Vector3>,
    pub closed: bool,
    /// Latent parameter step between consecutive samples.
    pub step: f64,
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Orthonormal right-handed Darboux frame per sample: tangent T, sidewards
/// direction g = n x T, and the surface normal n.
#[derive(Debug, Clone)]
pub struct DarbouxFrameField {
    pub tangent: Vec<Vector3>,
    pub side: Vec<Vector3>,
    pub normal: Vec<Vector3>,
    /// Largest |<T_raw, n>| seen before tangentization.
    pub max_raw_normal_component: f64,
}

/// Frenet frame where the curvature is large enough to define it.
#[derive(Debug, Clone)]
pub struct FrenetFrameField {
    pub tangent: Vec<Vector3>,
    pub principal_normal: Vec<Vector3>,
    pub binormal: Vec<Vector3>,
    pub defined: Vec<bool>,
}

/// Per-sample scalar invariants of a sampled curve.
#[derive(Debug, Clone)]
pub struct GeometricScalars {
    pub speed: Vec<f64>,
    pub arclength: Vec<f64>,
    pub total_length: f64,
    pub geodesic_curvature: Vec<f64>,
    pub normal_curvature: Vec<f64>,
    pub geodesic_torsion: Vec<f64>,
    pub curvature: Vec<f64>,
    /// Torsion; NaN where the Frenet frame is undefined.
    pub torsion: Vec<f64>,
    /// Angle between the side direction and the principal normal, unwrapped
    /// continuously along the curve; NaN where undefined.
    pub frame_angle: Vec<f64>,
    pub frenet_defined: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveClass {
    pub geodesic: bool,
    pub asymptotic: bool,
    pub principal: bool,
}

/// Frames plus scalars, the full per-curve analysis bundle.
#[derive(Debug, Clone)]
pub struct CurveAnalysis {
    pub frames: DarbouxFrameField,
    pub frenet: FrenetFrameField,
    pub scalars: GeometricScalars,
}

/// Speed field |d alpha / du| per sample.
pub fn speed_field(curve: &SampledCurve, order: StencilOrder) -> Result<Vec<f64>> {
    let d = stencil::derive_vector(&curve.points, curve.closed, curve.step, order);
    let speed: Vec<f64> = d.iter().map(|v| v.norm()).collect();
    for (i, &v) in speed.iter().enumerate() {
        if v <= 1e-12 {
            return Err(Error::DegenerateCurve { index: i, speed: v });
        }
    }
    Ok(speed)
}

/// Cumulative arclength by trapezoid sum and the total length (the closing
/// segment is included for closed curves).
pub fn arclength_from_speed(speed: &[f64], closed: bool, h: f64) -> (Vec<f64>, f64) {
    let cumulative = stencil::cumulative_trapezoid(speed, h);
    let total = if closed {
        cumulative[speed.len() - 1] + 0.5 * h * (speed[speed.len() - 1] + speed[0])
    } else {
        cumulative[speed.len() - 1]
    };
    (cumulative, total)
}

/// The d/ds operator: (1/v) d/du at each sample.
pub fn d_ds(field: &[f64], speed: &[f64], closed: bool, h: f64, order: StencilOrder) -> Vec<f64> {
    stencil::derive_scalar(field, closed, h, order)
        .into_iter()
        .zip(speed)
        .map(|(d, &v)| d / v)
        .collect()
}

/// Vector-valued d/ds.
pub fn d_ds_vector(
    field: &[Vector3],
    speed: &[f64],
    closed: bool,
    h: f64,
    order: StencilOrder,
) -> Vec<Vector3> {
    stencil::derive_vector(field, closed, h, order)
        .into_iter()
        .zip(speed)
        .map(|(d, &v)| d / v)
        .collect()
}

/// Darboux frames from the sampled points and normals. The raw discrete
/// tangent is checked against the normal, then projected into the tangent
/// plane so the frame is orthonormal to machine precision.
pub fn darboux_frames(curve: &SampledCurve, opts: &EngineOptions) -> Result<DarbouxFrameField> {
    let d = stencil::derive_vector(&curve.points, curve.closed, curve.step, opts.order);
    let n = curve.len();
    let mut tangent = Vec::with_capacity(n);
    let mut side = Vec::with_capacity(n);
    let mut max_dot = 0.0f64;
    for i in 0..n {
        let speed = d[i].norm();
        if speed <= 1e-12 {
            return Err(Error::DegenerateCurve { index: i, speed });
        }
        let raw = d[i] / speed;
        let normal = curve.normals[i];
        let dot = raw.dot(normal);
        if dot.abs() > opts.tangency_tol {
            return Err(Error::NonTangentCurve { index: i, dot, tolerance: opts.tangency_tol });
        }
        max_dot = max_dot.max(dot.abs());
        let t = raw.reject_from_unit(normal).normalized();
        tangent.push(t);
        side.push(normal.cross(t));
    }
    Ok(DarbouxFrameField {
        tangent,
        side,
        normal: curve.normals.clone(),
        max_raw_normal_component: max_dot,
    })
}

/// All scalar invariants from a sampled curve and its Darboux frames.
pub fn scalars(
    curve: &SampledCurve,
    frames: &DarbouxFrameField,
    opts: &EngineOptions,
) -> Result<(GeometricScalars, FrenetFrameField)> {
    let n = curve.len();
    let speed = speed_field(curve, opts.order)?;
    let (arclength, total_length) = arclength_from_speed(&speed, curve.closed, curve.step);

    let dt_ds = d_ds_vector(&frames.tangent, &speed, curve.closed, curve.step, opts.order);
    let dg_ds = d_ds_vector(&frames.side, &speed, curve.closed, curve.step, opts.order);

    let mut geodesic_curvature = Vec::with_capacity(n);
    let mut normal_curvature = Vec::with_capacity(n);
    let mut geodesic_torsion = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let mut defined = Vec::with_capacity(n);
    for i in 0..n {
        let kg = dt_ds[i].dot(frames.side[i]);
        let kn = dt_ds[i].dot(frames.normal[i]);
        geodesic_curvature.push(kg);
        normal_curvature.push(kn);
        geodesic_torsion.push(dg_ds[i].dot(frames.normal[i]));
        let kappa = dt_ds[i].norm();
        curvature.push(kappa);
        defined.push(kappa > opts.epsilon_kappa);
    }

    // Frenet data is not propagated across samples where it is undefined:
    // any sample whose stencil would read an undefined neighbour is flagged.
    let reach = match opts.order {
        StencilOrder::Two => 2usize,
        StencilOrder::Four => 4usize,
    };
    let strict: Vec<bool> = (0..n)
        .map(|i| {
            (0..=reach).all(|r| {
                let lo = if curve.closed {
                    defined[(i + n - r % n) % n]
                } else {
                    i < r || defined[i - r]
                };
                let hi = if curve.closed {
                    defined[(i + r) % n]
                } else {
                    i + r >= n || defined[i + r]
                };
                lo && hi
            })
        })
        .collect();

    let principal_normal: Vec<Vector3> = (0..n)
        .map(|i| {
            if defined[i] {
                dt_ds[i] / curvature[i]
            } else {
                Vector3::ZERO
            }
        })
        .collect();
    let binormal: Vec<Vector3> = (0..n)
        .map(|i| frames.tangent[i].cross(principal_normal[i]))
        .collect();
    let dn_ds = d_ds_vector(&principal_normal, &speed, curve.closed, curve.step, opts.order);
    let torsion: Vec<f64> = (0..n)
        .map(|i| {
            if strict[i] {
                dn_ds[i].dot(binormal[i])
            } else {
                f64::NAN
            }
        })
        .collect();

    // frame angle from atan2(k_n, k_g), unwrapped along the curve
    let phi_raw: Vec<f64> = (0..n)
        .map(|i| normal_curvature[i].atan2(geodesic_curvature[i]))
        .collect();
    let unwrapped = stencil::unwrap_angles(&phi_raw, false);
    let frame_angle: Vec<f64> = (0..n)
        .map(|i| if strict[i] { unwrapped[i] } else { f64::NAN })
        .collect();

    let scalars = GeometricScalars {
        speed,
        arclength,
        total_length,
        geodesic_curvature,
        normal_curvature,
        geodesic_torsion,
        curvature,
        torsion,
        frame_angle,
        frenet_defined: strict.clone(),
    };
    let frenet = FrenetFrameField {
        tangent: frames.tangent.clone(),
        principal_normal,
        binormal,
        defined: strict,
    };
    Ok((scalars, frenet))
}

/// Secondary route for the geodesic curvature and torsion, from cross
/// products of raw curve derivatives rather than frame projections:
/// k_g = <alpha_s, alpha_ss x n>, tau_g = <alpha_s, n x n_s>.
pub fn scalars_via_cross_products(
    curve: &SampledCurve,
    opts: &EngineOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let speed = speed_field(curve, opts.order)?;
    let alpha_s = d_ds_vector(&curve.points, &speed, curve.closed, curve.step, opts.order);
    let alpha_ss = d_ds_vector(&alpha_s, &speed, curve.closed, curve.step, opts.order);
    let n_s = d_ds_vector(&curve.normals, &speed, curve.closed, curve.step, opts.order);
    let kg = (0..curve.len())
        .map(|i| alpha_s[i].dot(alpha_ss[i].cross(curve.normals[i])))
        .collect();
    let taug = (0..curve.len())
        .map(|i| alpha_s[i].dot(curve.normals[i].cross(n_s[i])))
        .collect();
    Ok((kg, taug))
}

/// Classification by the vanishing scalar: geodesic (k_g), asymptotic (k_n),
/// principal line (tau_g). The flags are independent.
pub fn classify(scalars: &GeometricScalars, tol: f64) -> CurveClass {
    let max_abs = |f: &[f64]| f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    CurveClass {
        geodesic: max_abs(&scalars.geodesic_curvature) <= tol,
        asymptotic: max_abs(&scalars.normal_curvature) <= tol,
        principal: max_abs(&scalars.geodesic_torsion) <= tol,
    }
}

/// Residuals of the frame-angle relations tying the Darboux scalars to the
/// Frenet ones. With phi = atan2(k_n, k_g) (outward normal, right-handed
/// frames) the consistent set is
///
///   k_g = kappa cos(phi),  k_n = kappa sin(phi),  tau_g = tau - d(phi)/ds.
///
/// The sign of the d(phi)/ds term is forced by the phi convention: measuring
/// phi from g to N instead flips it together with the sign of the k_n
/// relation, so only one of the two can carry a plus.
/// Maxima are over samples with defined Frenet data.
pub fn frenet_relation_residuals(
    sc: &GeometricScalars,
    closed: bool,
    h: f64,
    order: StencilOrder,
) -> (f64, f64, f64) {
    let n = sc.speed.len();
    let phi_raw: Vec<f64> = (0..n)
        .map(|i| sc.normal_curvature[i].atan2(sc.geodesic_curvature[i]))
        .collect();
    let dphi_du = stencil::derive_angle(&phi_raw, closed, h, order);
    let mut r = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        if !sc.frenet_defined[i] {
            continue;
        }
        let kappa = sc.curvature[i];
        let phi = sc.frame_angle[i];
        r.0 = r.0.max((sc.geodesic_curvature[i] - kappa * phi.cos()).abs());
        r.1 = r.1.max((sc.normal_curvature[i] - kappa * phi.sin()).abs());
        let dphi_ds = dphi_du[i] / sc.speed[i];
        r.2 = r.2.max((sc.geodesic_torsion[i] - (sc.torsion[i] - dphi_ds)).abs());
    }
    r
}

/// A uniformly sampled curve in the parameter domain of a surface.
#[derive(Debug, Clone)]
pub struct DiscreteCurve {
    surface: Arc<ParametricSurface>,
    params: Vec<(f64, f64)>,
    closed: bool,
    u_max: f64,
}

impl DiscreteCurve {
    pub fn new(
        surface: Arc<ParametricSurface>,
        params: Vec<(f64, f64)>,
        closed: bool,
        u_max: f64,
    ) -> Result<Self> {
        if params.len() < MIN_SAMPLES {
            return Err(Error::Validation {
                field: "curve.n".into(),
                message: format!("need at least {MIN_SAMPLES} samples, got {}", params.len()),
            });
        }
        if !(u_max > 0.0) {
            return Err(Error::Validation {
                field: "curve.u_max".into(),
                message: "parameter range must be positive".into(),
            });
        }
        let params = params
            .into_iter()
            .map(|(u, v)| surface.clamp_params(u, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { surface, params, closed, u_max })
    }

    /// Sample a chart path u -> (chart u, chart v) uniformly.
    pub fn from_chart_path(
        surface: Arc<ParametricSurface>,
        path: impl Fn(f64) -> (f64, f64),
        u_max: f64,
        n: usize,
        closed: bool,
    ) -> Result<Self> {
        let h = if closed { u_max / n as f64 } else { u_max / (n - 1) as f64 };
        let params = (0..n).map(|i| path(i as f64 * h)).collect();
        Self::new(surface, params, closed, u_max)
    }

    pub fn surface(&self) -> &Arc<ParametricSurface> {
        &self.surface
    }

    pub fn params(&self) -> &[(f64, f64)] {
        &self.params
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Latent parameter step between samples.
    pub fn step(&self) -> f64 {
        if self.closed {
            self.u_max / self.len() as f64
        } else {
            self.u_max / (self.len() - 1) as f64
        }
    }

    /// Ambient samples with surface normals.
    pub fn sample(&self) -> Result<SampledCurve> {
        let mut points = Vec::with_capacity(self.len());
        let mut normals = Vec::with_capacity(self.len());
        for &(u, v) in &self.params {
            points.push(self.surface.point(u, v)?);
            normals.push(self.surface.unit_normal(u, v)?);
        }
        Ok(SampledCurve { points, normals, closed: self.closed, step: self.step() })
    }

    /// Frames and all scalar invariants at the given stencil options.
    pub fn analyze(&self, opts: &EngineOptions) -> Result<CurveAnalysis> {
        let sampled = self.sample()?;
        let frames = darboux_frames(&sampled, opts)?;
        let (scalars, frenet) = scalars(&sampled, &frames, opts)?;
        Ok(CurveAnalysis { frames, frenet, scalars })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

    fn plane_circle(n: usize) -> DiscreteCurve {
        let surface = Arc::new(ParametricSurface::plane());
        DiscreteCurve::from_chart_path(surface, |u| (u.cos(), u.sin()), TAU, n, true).unwrap()
    }

    fn sphere_latitude(theta0: f64, n: usize) -> DiscreteCurve {
        let surface = Arc::new(ParametricSurface::sphere(1.0));
        DiscreteCurve::from_chart_path(surface, move |u| (theta0, u), TAU, n, true).unwrap()
    }

    fn cylinder_helix(r: f64, n: usize, u_max: f64) -> DiscreteCurve {
        let b = (1.0 - r * r).sqrt();
        let surface = Arc::new(ParametricSurface::cylinder(r));
        DiscreteCurve::from_chart_path(surface, move |u| (u, b * u), u_max, n, false).unwrap()
    }

    fn max_abs(f: &[f64]) -> f64 {
        f.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    #[test]
    fn circle_length_matches_discrete_prediction() {
        // order-2 central differences see speed sin(h)/h on a circle, exactly
        let curve = plane_circle(256);
        let opts = EngineOptions::default();
        let a = curve.analyze(&opts).unwrap();
        let h = curve.step();
        let predicted = TAU * (h.sin() / h);
        assert!((a.scalars.total_length - predicted).abs() <= 1e-12);
        assert!((a.scalars.total_length - TAU).abs() <= 1e-3);

        let fine = plane_circle(1024).analyze(&opts).unwrap();
        assert!((fine.scalars.total_length - TAU).abs() <= 1e-4);
    }

    #[test]
    fn straight_segment_is_exact() {
        let surface = Arc::new(ParametricSurface::plane());
        let curve =
            DiscreteCurve::from_chart_path(surface, |u| (u, 0.0), 1.0, 64, false).unwrap();
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        for &v in &a.scalars.speed {
            assert!((v - 1.0).abs() <= 1e-13);
        }
        assert!((a.scalars.total_length - 1.0).abs() <= 1e-12);
        // arclength strictly increasing
        for w in a.scalars.arclength.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn latitude_circle_length() {
        let curve = sphere_latitude(FRAC_PI_3, 512);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        let h = curve.step();
        let predicted = TAU * FRAC_PI_3.sin() * (h.sin() / h);
        assert!((a.scalars.total_length - predicted).abs() <= 1e-12);
        assert!((a.scalars.total_length - TAU * FRAC_PI_3.sin()).abs() <= 1e-3);
    }

    #[test]
    fn d_ds_basics() {
        let curve = plane_circle(512);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        let h = curve.step();
        let n = curve.len();

        let constant = vec![3.25; n];
        let d = d_ds(&constant, &a.scalars.speed, true, h, StencilOrder::Two);
        assert!(max_abs(&d) <= 1e-12);

        // d(arclength)/ds = 1; speed is constant on the circle so this is exact
        let ds = d_ds(&a.scalars.arclength, &a.scalars.speed, false, h, StencilOrder::Two);
        for &x in &ds[1..n - 1] {
            assert!((x - 1.0).abs() <= 1e-6, "{x}");
        }

        // sin(u) differentiates to cos(u) at order 2
        let mut errs = Vec::new();
        for m in [256usize, 512] {
            let c = plane_circle(m);
            let an = c.analyze(&EngineOptions::default()).unwrap();
            let hh = c.step();
            let field: Vec<f64> = (0..m).map(|i| (i as f64 * hh).sin()).collect();
            let d = d_ds(&field, &an.scalars.speed, true, hh, StencilOrder::Two);
            let err = (0..m)
                .map(|i| (d[i] - (i as f64 * hh).cos() / an.scalars.speed[i] * 1.0).abs())
                .fold(0.0f64, f64::max);
            // compare against cos/v since v = sin(h)/h here
            errs.push(err);
        }
        assert!(errs[0] / errs[1] > 3.0);
    }

    #[test]
    fn equator_frames() {
        let curve = sphere_latitude(FRAC_PI_2, 256);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        for i in 0..curve.len() {
            let u = i as f64 * curve.step();
            let t_exact = Vector3::new(-u.sin(), u.cos(), 0.0);
            let n_exact = Vector3::new(u.cos(), u.sin(), 0.0);
            assert!(a.frames.tangent[i].distance(t_exact) <= 1e-12);
            assert!(a.frames.normal[i].distance(n_exact) <= 1e-14);
            assert!(a.frames.side[i].distance(Vector3::Z) <= 1e-12);
        }
    }

    #[test]
    fn plane_circle_frames() {
        let curve = plane_circle(256);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        for i in 0..curve.len() {
            let u = i as f64 * curve.step();
            let g_exact = Vector3::new(-u.cos(), -u.sin(), 0.0);
            assert!(a.frames.side[i].distance(g_exact) <= 1e-12);
        }
    }

    #[test]
    fn straight_line_frame_constant() {
        let surface = Arc::new(ParametricSurface::plane());
        let curve =
            DiscreteCurve::from_chart_path(surface, |u| (u, 0.5 * u), 2.0, 64, false).unwrap();
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        for i in 1..curve.len() {
            assert!(a.frames.tangent[i].distance(a.frames.tangent[0]) <= 1e-12);
            assert!(a.frames.side[i].distance(a.frames.side[0]) <= 1e-12);
        }
    }

    #[test]
    fn frame_orthonormality() {
        let curve = cylinder_helix(0.6, 256, PI);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        for i in 0..curve.len() {
            let (t, g, n) = (a.frames.tangent[i], a.frames.side[i], a.frames.normal[i]);
            assert!(t.dot(g).abs() <= 1e-9);
            assert!(t.dot(n).abs() <= 1e-9);
            assert!(g.dot(n).abs() <= 1e-9);
            assert!(g.distance(n.cross(t)) <= 1e-9);
            assert!((t.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn latitude_circle_scalars() {
        let curve = sphere_latitude(FRAC_PI_3, 1024);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        let kg_exact = 1.0 / FRAC_PI_3.tan();
        for i in 0..curve.len() {
            assert!((a.scalars.geodesic_curvature[i] - kg_exact).abs() <= 1e-3);
            assert!((a.scalars.normal_curvature[i] + 1.0).abs() <= 1e-3);
            assert!(a.scalars.geodesic_torsion[i].abs() <= 1e-6);
        }
    }

    #[test]
    fn great_circle_scalars() {
        let curve = sphere_latitude(FRAC_PI_2, 1024);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        assert!(max_abs(&a.scalars.geodesic_curvature) <= 1e-6);
        for i in 0..curve.len() {
            assert!((a.scalars.normal_curvature[i] + 1.0).abs() <= 1e-3);
        }
        assert!(max_abs(&a.scalars.geodesic_torsion) <= 1e-6);
    }

    #[test]
    fn helix_scalars() {
        let (r, b) = (0.6, 0.8);
        let curve = cylinder_helix(r, 1024, FRAC_PI_2);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        assert!(max_abs(&a.scalars.geodesic_curvature) <= 1e-6, "kg = {}", max_abs(&a.scalars.geodesic_curvature));
        for i in 0..curve.len() {
            assert!((a.scalars.normal_curvature[i] + r).abs() <= 1e-3);
            assert!((a.scalars.geodesic_torsion[i] - b).abs() <= 1e-3);
            assert!((a.scalars.curvature[i] - r).abs() <= 1e-3);
            assert!(a.scalars.frenet_defined[i]);
            assert!((a.scalars.torsion[i] - b).abs() <= 1e-3);
        }
    }

    #[test]
    fn plane_circle_frenet() {
        let curve = plane_circle(1024);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        for i in 0..curve.len() {
            assert!((a.scalars.curvature[i] - 1.0).abs() <= 1e-4);
            assert!(a.scalars.torsion[i].abs() <= 1e-6);
            assert!(a.scalars.frame_angle[i].abs() <= 1e-9, "phi = {}", a.scalars.frame_angle[i]);
        }
    }

    #[test]
    fn straight_line_frenet_undefined() {
        let surface = Arc::new(ParametricSurface::plane());
        let curve =
            DiscreteCurve::from_chart_path(surface, |u| (u, 0.0), 1.0, 64, false).unwrap();
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        assert!(max_abs(&a.scalars.curvature) <= 1e-10);
        assert!(a.scalars.frenet_defined.iter().all(|d| !d));
        assert!(a.scalars.torsion.iter().all(|t| t.is_nan()));
        assert!(a.scalars.frame_angle.iter().all(|p| p.is_nan()));
    }

    #[test]
    fn kg_kn_kappa_relation() {
        let curve = cylinder_helix(0.6, 512, PI);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        for i in 0..curve.len() {
            let kg = a.scalars.geodesic_curvature[i];
            let kn = a.scalars.normal_curvature[i];
            let kappa = a.scalars.curvature[i];
            assert!((kg * kg + kn * kn - kappa * kappa).abs() <= 1e-6 * kappa.max(1.0));
        }
    }

    #[test]
    fn classification() {
        let tol = 1e-6;
        let great = sphere_latitude(FRAC_PI_2, 256).analyze(&EngineOptions::default()).unwrap();
        let c = classify(&great.scalars, tol);
        assert_eq!(c, CurveClass { geodesic: true, asymptotic: false, principal: true });

        let lat = sphere_latitude(FRAC_PI_3, 256).analyze(&EngineOptions::default()).unwrap();
        let c = classify(&lat.scalars, tol);
        assert_eq!(c, CurveClass { geodesic: false, asymptotic: false, principal: true });

        let surface = Arc::new(ParametricSurface::plane());
        let line = DiscreteCurve::from_chart_path(surface, |u| (u, 0.0), 1.0, 64, false)
            .unwrap()
            .analyze(&EngineOptions::default())
            .unwrap();
        let c = classify(&line.scalars, tol);
        assert_eq!(c, CurveClass { geodesic: true, asymptotic: true, principal: true });
    }

    #[test]
    fn cross_product_route_agrees() {
        let opts = EngineOptions::default();
        for curve in [
            sphere_latitude(FRAC_PI_3, 1024),
            sphere_latitude(FRAC_PI_2, 1024),
            cylinder_helix(0.6, 1024, FRAC_PI_2),
            plane_circle(1024),
        ] {
            let a = curve.analyze(&opts).unwrap();
            let sampled = curve.sample().unwrap();
            let (kg_alt, taug_alt) = scalars_via_cross_products(&sampled, &opts).unwrap();
            for i in 0..curve.len() {
                let scale = 1.0f64
                    .max(a.scalars.geodesic_curvature[i].abs())
                    .max(a.scalars.geodesic_torsion[i].abs());
                assert!(
                    (a.scalars.geodesic_curvature[i] - kg_alt[i]).abs() <= 1e-6 * scale,
                    "kg disagreement {} vs {} at {i}",
                    a.scalars.geodesic_curvature[i],
                    kg_alt[i]
                );
                assert!(
                    (a.scalars.geodesic_torsion[i] - taug_alt[i]).abs() <= 1e-6 * scale,
                    "taug disagreement {} vs {} at {i}",
                    a.scalars.geodesic_torsion[i],
                    taug_alt[i]
                );
            }
        }
    }

    #[test]
    fn non_tangent_sampling_rejected() {
        // sample a "curve" whose chart points hop around the sphere: the raw
        // discrete tangent is nowhere near the tangent plane
        let surface = Arc::new(ParametricSurface::sphere(1.0));
        let params: Vec<(f64, f64)> = (0..32)
            .map(|i| (1.0 + 0.8 * ((i * 7919) % 13) as f64 / 13.0, TAU * ((i * 104729) % 17) as f64 / 17.0))
            .collect();
        let curve = DiscreteCurve::new(surface, params, true, TAU).unwrap();
        let sampled = curve.sample().unwrap();
        let err = darboux_frames(&sampled, &EngineOptions::default());
        assert!(matches!(err, Err(Error::NonTangentCurve { .. })));
    }

    #[test]
    fn too_few_samples_rejected() {
        let surface = Arc::new(ParametricSurface::plane());
        let err = DiscreteCurve::from_chart_path(surface, |u| (u, 0.0), 1.0, 8, false);
        assert!(matches!(err, Err(Error::Validation { .. })));
    }

    #[test]
    fn latitude_kg_convergence_order_two() {
        // non-uniform parameterization of the same geometric circle, so the
        // scalar error is genuinely O(h^2) instead of cancelling by symmetry
        let surface = Arc::new(ParametricSurface::sphere(1.0));
        let kg_exact = 1.0 / FRAC_PI_3.tan();
        let mut errs = Vec::new();
        for n in [512usize, 1024] {
            let curve = DiscreteCurve::from_chart_path(
                surface.clone(),
                |u| (FRAC_PI_3, u + 0.3 * u.sin()),
                TAU,
                n,
                true,
            )
            .unwrap();
            let a = curve.analyze(&EngineOptions::default()).unwrap();
            let err = a
                .scalars
                .geodesic_curvature
                .iter()
                .map(|kg| (kg - kg_exact).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        let ratio = errs[0] / errs[1];
        assert!((ratio - 4.0).abs() <= 1.0, "ratio {ratio}");
    }
}
