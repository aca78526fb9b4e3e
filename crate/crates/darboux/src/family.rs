//! Two-parameter curve families with adapted frames, and finite-difference
//! residual verification of the evolution identities of the adapted frame:
//! the speed-compatibility law, the inextensibility criterion, the frame
//! time-derivative equations and the scalar evolution equations.
//!
//! A family carries its own normal map instead of always referencing a fixed
//! surface. The structure equations only use the adapted frame, so families
//! on moving surfaces (a helix on a cylinder of time-varying radius) are
//! first-class; they are exactly the cases that exercise the normal-velocity
//! terms of the evolution equations.
//!
//! Each scalar evolution identity is checked in two forms: the plain
//! variants carry the frame-spin coupling the frame algebra yields, the
//! `*_reduced` variants drop it. The spin scalar psi = <dg/dt, n> is
//! measured from the frames, never assumed, and the reduced variants are
//! reported against the coupling they omit.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::curve::{self, DarbouxFrameField, EngineOptions, GeometricScalars, SampledCurve};
use crate::error::{Error, Result};
use crate::report::ResidualReport;
use crate::stencil::{self, StencilOrder};
use crate::surface::ParametricSurface;
use crate::vec3::{rotate_x, rotate_z, Vector3};

type PositionMap = Arc<dyn Fn(f64, f64) -> Vector3 + Send + Sync>;

#[derive(Clone)]
pub enum FamilySource {
    /// Curve-in-chart on a fixed surface; the normal is induced by the chart.
    SurfaceBound(Arc<ParametricSurface>),
    /// Position and normal maps given in closed form.
    Analytic,
}

impl fmt::Debug for FamilySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySource::SurfaceBound(_) => write!(f, "SurfaceBound"),
            FamilySource::Analytic => write!(f, "Analytic"),
        }
    }
}

/// A two-parameter map (u, t) -> (point, unit normal) describing an evolving
/// curve together with its adapted surface normal.
///
/// Maps must stay evaluable a small time-step margin outside [0, t_max) so
/// central differences in t work at the domain edges.
#[derive(Clone)]
pub struct FramedFamily {
    pub name: String,
    position: PositionMap,
    normal: PositionMap,
    pub u_max: f64,
    pub closed: bool,
    pub t_max: f64,
    /// Claim that |d alpha/du| = 1 for all t. Checked by [`FramedFamily::validate`].
    pub arclength_uniform: bool,
    /// Analytic ground truth: does the family preserve arclength?
    pub inextensible: bool,
    pub source: FamilySource,
}

impl fmt::Debug for FramedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FramedFamily")
            .field("name", &self.name)
            .field("u_max", &self.u_max)
            .field("closed", &self.closed)
            .field("t_max", &self.t_max)
            .field("arclength_uniform", &self.arclength_uniform)
            .field("inextensible", &self.inextensible)
            .field("source", &self.source)
            .finish()
    }
}

/// Velocity of the family resolved in the Darboux frame, plus the frame spin.
#[derive(Debug, Clone)]
pub struct VelocityDecomposition {
    /// Tangential component <da/dt, T>.
    pub f1: Vec<f64>,
    /// Sidewards component <da/dt, g>.
    pub f2: Vec<f64>,
    /// Normal component <da/dt, n>.
    pub f3: Vec<f64>,
    /// Frame spin about the tangent: psi = <dg/dt, n>.
    pub psi: Vec<f64>,
    /// Largest |da/dt - (f1 T + f2 g + f3 n)| over the samples.
    pub max_reconstruction_error: f64,
}

/// One time slice of a family: sampled curve, frames and scalars.
#[derive(Debug, Clone)]
pub struct FamilySlice {
    pub curve: SampledCurve,
    pub frames: DarbouxFrameField,
    pub scalars: GeometricScalars,
}

/// Resolution and tolerance knobs for the residual engine.
#[derive(Debug, Clone, Copy)]
pub struct AnalyzerOptions {
    /// Stencil order for u-derivatives. The default is four: the identity
    /// residuals stack several composed derivatives, and order-two truncation
    /// on long wiggly curves would drown the identities being verified.
    pub order: StencilOrder,
    /// Central-difference step in t.
    pub dt: f64,
    /// Scale C of the default tolerance model C ((U/N)^2 + dt^2).
    pub tolerance_scale: f64,
    /// Threshold for the geodesic/asymptotic/principal flags.
    pub classify_tol: f64,
    /// Tangency tolerance forwarded to the frame builder.
    pub tangency_tol: f64,
}

impl Default for AnalyzerOptions {
    fn default() -> Self {
        Self {
            order: StencilOrder::Four,
            dt: 1e-4,
            tolerance_scale: 10.0,
            classify_tol: 1e-6,
            tangency_tol: curve::DEFAULT_TANGENCY_TOL,
        }
    }
}

impl AnalyzerOptions {
    fn engine(&self) -> EngineOptions {
        EngineOptions {
            order: self.order,
            tangency_tol: self.tangency_tol,
            ..EngineOptions::default()
        }
    }

    /// Order-two error-model tolerance for a residual at resolution (n, dt).
    pub fn tolerance(&self, u_max: f64, n: usize) -> f64 {
        let h = u_max / n as f64;
        self.tolerance_scale * (h * h + self.dt * self.dt)
    }
}

impl FramedFamily {
    pub fn analytic(
        name: impl Into<String>,
        position: impl Fn(f64, f64) -> Vector3 + Send + Sync + 'static,
        normal: impl Fn(f64, f64) -> Vector3 + Send + Sync + 'static,
        u_max: f64,
        closed: bool,
        t_max: f64,
        arclength_uniform: bool,
        inextensible: bool,
    ) -> Self {
        Self {
            name: name.into(),
            position: Arc::new(position),
            normal: Arc::new(normal),
            u_max,
            closed,
            t_max,
            arclength_uniform,
            inextensible,
            source: FamilySource::Analytic,
        }
    }

    /// Family given by a chart path on a fixed surface; normals are chart
    /// lookups. Panics inside the maps if the path leaves the chart domain.
    pub fn surface_bound(
        name: impl Into<String>,
        surface: Arc<ParametricSurface>,
        chart_path: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
        u_max: f64,
        closed: bool,
        t_max: f64,
        arclength_uniform: bool,
        inextensible: bool,
    ) -> Self {
        let path = Arc::new(chart_path);
        let s1 = surface.clone();
        let p1 = path.clone();
        let s2 = surface.clone();
        let position = move |u: f64, t: f64| {
            let (cu, cv) = p1(u, t);
            s1.point(cu, cv).expect("family chart path left the surface domain")
        };
        let normal = move |u: f64, t: f64| {
            let (cu, cv) = path(u, t);
            s2.unit_normal(cu, cv).expect("family chart path hit a degenerate chart point")
        };
        Self {
            name: name.into(),
            position: Arc::new(position),
            normal: Arc::new(normal),
            u_max,
            closed,
            t_max,
            arclength_uniform,
            inextensible,
            source: FamilySource::SurfaceBound(surface),
        }
    }

    pub fn position(&self, u: f64, t: f64) -> Vector3 {
        (self.position)(self.wrap_u(u), t)
    }

    pub fn normal(&self, u: f64, t: f64) -> Vector3 {
        (self.normal)(self.wrap_u(u), t)
    }

    fn wrap_u(&self, u: f64) -> f64 {
        if self.closed {
            u.rem_euclid(self.u_max)
        } else {
            u
        }
    }

    /// Check the adaptedness contract on a fine verification grid: unit
    /// normals, normals orthogonal to the curve tangent, and (if claimed)
    /// unit speed. Uses a small independent step, not the analysis grid, so
    /// the check reflects the maps themselves rather than grid truncation.
    pub fn validate(&self) -> Result<()> {
        let fine = 1e-5;
        let nu = 33;
        let nt = 9;
        for j in 0..nt {
            let t = self.t_max * j as f64 / nt as f64;
            for i in 0..nu {
                let u = if self.closed {
                    self.u_max * i as f64 / nu as f64
                } else {
                    fine + (self.u_max - 2.0 * fine) * i as f64 / (nu - 1) as f64
                };
                let n = self.normal(u, t);
                if (n.norm() - 1.0).abs() > 1e-10 {
                    return Err(Error::AdaptednessViolation { u, t, dot: n.norm() - 1.0 });
                }
                let du = (self.position(u + fine, t) - self.position(u - fine, t)) / (2.0 * fine);
                let rel = du.dot(n) / du.norm();
                if rel.abs() > 1e-8 {
                    return Err(Error::AdaptednessViolation { u, t, dot: rel });
                }
                if self.arclength_uniform && (du.norm() - 1.0).abs() > 1e-6 {
                    return Err(Error::RequiresUnitSpeed { family: self.name.clone() });
                }
            }
        }
        Ok(())
    }

    /// Ambient samples at time t with the family's own normals.
    pub fn sample_points(&self, t: f64, n: usize) -> SampledCurve {
        let h = if self.closed { self.u_max / n as f64 } else { self.u_max / (n - 1) as f64 };
        let points = (0..n).map(|i| self.position(i as f64 * h, t)).collect();
        let normals = (0..n).map(|i| self.normal(i as f64 * h, t)).collect();
        SampledCurve { points, normals, closed: self.closed, step: h }
    }

    /// Frames and scalars of the time slice at t. Frames are built from the
    /// family's normal map, not from any surface lookup.
    pub fn sample(&self, t: f64, n: usize, opts: &AnalyzerOptions) -> Result<FamilySlice> {
        let sampled = self.sample_points(t, n);
        let frames = curve::darboux_frames(&sampled, &opts.engine()).map_err(|e| match e {
            // a non-tangent discrete tangent on a family slice means the
            // normal map is not adapted to the position map
            Error::NonTangentCurve { index, dot, .. } => Error::AdaptednessViolation {
                u: index as f64 * sampled.step,
                t,
                dot,
            },
            other => other,
        })?;
        let (scalars, _) = curve::scalars(&sampled, &frames, &opts.engine())?;
        Ok(FamilySlice { curve: sampled, frames, scalars })
    }

    /// Velocity of the family at time t resolved in the Darboux frame, with
    /// the frame spin psi measured from the frames at t +/- dt.
    pub fn decompose_velocity(
        &self,
        t: f64,
        n: usize,
        opts: &AnalyzerOptions,
    ) -> Result<VelocityDecomposition> {
        let slice = self.sample(t, n, opts)?;
        self.decompose_velocity_at(&slice, t, n, opts)
    }

    fn decompose_velocity_at(
        &self,
        slice: &FamilySlice,
        t: f64,
        n: usize,
        opts: &AnalyzerOptions,
    ) -> Result<VelocityDecomposition> {
        let dt = opts.dt;
        let plus = self.sample(t + dt, n, opts)?;
        let minus = self.sample(t - dt, n, opts)?;
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        let mut f3 = Vec::with_capacity(n);
        let mut psi = Vec::with_capacity(n);
        let mut max_rec = 0.0f64;
        for i in 0..n {
            let velocity = (plus.curve.points[i] - minus.curve.points[i]) / (2.0 * dt);
            let (tv, gv, nv) =
                (slice.frames.tangent[i], slice.frames.side[i], slice.frames.normal[i]);
            let (a, b, c) = (velocity.dot(tv), velocity.dot(gv), velocity.dot(nv));
            f1.push(a);
            f2.push(b);
            f3.push(c);
            let rec = tv * a + gv * b + nv * c;
            max_rec = max_rec.max(rec.distance(velocity));
            let dg_dt = (plus.frames.side[i] - minus.frames.side[i]) / (2.0 * dt);
            psi.push(dg_dt.dot(nv));
        }
        Ok(VelocityDecomposition { f1, f2, f3, psi, max_reconstruction_error: max_rec })
    }

    /// Time derivative of the speed field and of the total arclength.
    /// Returns (dS/dt at the far end, dv/dt field).
    pub fn arclength_variation(
        &self,
        t: f64,
        n: usize,
        opts: &AnalyzerOptions,
    ) -> Result<(f64, Vec<f64>)> {
        let dt = opts.dt;
        let plus = curve::speed_field(&self.sample_points(t + dt, n), opts.order)?;
        let minus = curve::speed_field(&self.sample_points(t - dt, n), opts.order)?;
        let dv_dt: Vec<f64> =
            (0..n).map(|i| (plus[i] - minus[i]) / (2.0 * dt)).collect();
        let h = if self.closed { self.u_max / n as f64 } else { self.u_max / (n - 1) as f64 };
        let ds_dt = stencil::integrate(&dv_dt, self.closed, h);
        Ok((ds_dt, dv_dt))
    }
}

fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn max_abs_of(fields: &[&[f64]]) -> f64 {
    fields.iter().map(|f| max_abs(f)).fold(0.0, f64::max)
}

/// Everything the residual evaluations need at one (t, n) grid.
pub struct FamilyFrame<'a> {
    pub family: &'a FramedFamily,
    pub t: f64,
    pub n: usize,
    pub slice: FamilySlice,
    pub dec: VelocityDecomposition,
    pub h: f64,
    opts: AnalyzerOptions,
}

impl<'a> FamilyFrame<'a> {
    pub fn build(
        family: &'a FramedFamily,
        t: f64,
        n: usize,
        opts: &AnalyzerOptions,
    ) -> Result<Self> {
        let slice = family.sample(t, n, opts)?;
        let dec = family.decompose_velocity_at(&slice, t, n, opts)?;
        let h = if family.closed { family.u_max / n as f64 } else { family.u_max / (n - 1) as f64 };
        Ok(Self { family, t, n, slice, dec, h, opts: *opts })
    }

    fn d_du(&self, f: &[f64]) -> Vec<f64> {
        stencil::derive_scalar(f, self.family.closed, self.h, self.opts.order)
    }

    fn d_ds(&self, f: &[f64]) -> Vec<f64> {
        curve::d_ds(f, &self.slice.scalars.speed, self.family.closed, self.h, self.opts.order)
    }

    fn tolerance(&self) -> f64 {
        self.opts.tolerance(self.family.u_max, self.n)
    }

    /// Rounding floor of the residual pipeline at this resolution: machine
    /// epsilon amplified by the worst path, a second s-derivative of a
    /// central time difference (eps * scale / (dt * h^2)). The prefactor
    /// covers the stencil coefficient mass of two composed derivatives and
    /// the term count of the widest identity.
    fn noise_floor(&self) -> f64 {
        let scale = self
            .slice
            .curve
            .points
            .iter()
            .fold(1.0f64, |m, p| m.max(p.norm()));
        32.0 * f64::EPSILON * scale / (self.opts.dt * self.h * self.h)
    }

    fn report(&self, identity: &str, residual: &[f64], max_term: f64) -> ResidualReport {
        ResidualReport::from_field(
            identity,
            &self.family.name,
            self.n,
            self.opts.dt,
            residual,
            max_term,
            self.tolerance(),
            self.opts.order.as_f64(),
        )
        .with_noise_floor(self.noise_floor())
    }

    /// Residual of the speed-compatibility law
    /// dv/dt = d(f1)/du - f2 v k_g - f3 v k_n,
    /// which holds for every flow, inextensible or not. When the slice
    /// classifies as geodesic or asymptotic the corresponding reduced forms
    /// (term dropped) are evaluated as well.
    pub fn speed_compatibility(&self) -> Result<Vec<ResidualReport>> {
        let (_, dv_dt) = self.family.arclength_variation(self.t, self.n, &self.opts)?;
        let df1_du = self.d_du(&self.dec.f1);
        let sc = &self.slice.scalars;
        let term_g: Vec<f64> = (0..self.n)
            .map(|i| self.dec.f2[i] * sc.speed[i] * sc.geodesic_curvature[i])
            .collect();
        let term_n: Vec<f64> = (0..self.n)
            .map(|i| self.dec.f3[i] * sc.speed[i] * sc.normal_curvature[i])
            .collect();
        let residual: Vec<f64> = (0..self.n)
            .map(|i| dv_dt[i] - (df1_du[i] - term_g[i] - term_n[i]))
            .collect();
        let max_term = max_abs_of(&[&dv_dt, &df1_du, &term_g, &term_n]);
        let mut out = vec![self.report("speed_compatibility", &residual, max_term)];

        let class = curve::classify(sc, self.opts.classify_tol);
        if class.geodesic {
            let r: Vec<f64> =
                (0..self.n).map(|i| dv_dt[i] - (df1_du[i] - term_n[i])).collect();
            out.push(self.report("speed_compatibility_geodesic", &r, max_term));
        }
        if class.asymptotic {
            let r: Vec<f64> =
                (0..self.n).map(|i| dv_dt[i] - (df1_du[i] - term_g[i])).collect();
            out.push(self.report("speed_compatibility_asymptotic", &r, max_term));
        }
        Ok(out)
    }

    /// Residual of the inextensibility criterion d(f1)/ds = f2 k_g + f3 k_n.
    /// The measured arclength drift rate |dS/dt| is attached to the note so
    /// both directions of the equivalence can be judged together.
    pub fn inextensibility(&self) -> Result<Vec<ResidualReport>> {
        let sc = &self.slice.scalars;
        let df1_ds = self.d_ds(&self.dec.f1);
        let term_g: Vec<f64> =
            (0..self.n).map(|i| self.dec.f2[i] * sc.geodesic_curvature[i]).collect();
        let term_n: Vec<f64> =
            (0..self.n).map(|i| self.dec.f3[i] * sc.normal_curvature[i]).collect();
        let residual: Vec<f64> =
            (0..self.n).map(|i| df1_ds[i] - term_g[i] - term_n[i]).collect();
        let (ds_dt, _) = self.family.arclength_variation(self.t, self.n, &self.opts)?;
        let max_term = max_abs_of(&[&df1_ds, &term_g, &term_n]);
        let mut out = vec![self
            .report("inextensibility", &residual, max_term)
            .with_note(format!("dS_dt={ds_dt:.3e}"))];

        let class = curve::classify(sc, self.opts.classify_tol);
        if class.geodesic {
            let r: Vec<f64> = (0..self.n).map(|i| df1_ds[i] - term_n[i]).collect();
            out.push(self.report("inextensibility_geodesic", &r, max_term));
        }
        if class.asymptotic {
            let r: Vec<f64> = (0..self.n).map(|i| df1_ds[i] - term_g[i]).collect();
            out.push(self.report("inextensibility_asymptotic", &r, max_term));
        }
        Ok(out)
    }

    /// Residuals of the three frame evolution equations
    ///   dT/dt =  gamma g + beta n
    ///   dg/dt = -gamma T + psi n
    ///   dn/dt = -beta  T - psi g
    /// compared against central differences of the frames in t. `variant`
    /// selects which terms of gamma/beta are kept (classification-specialized
    /// forms of the same equations).
    pub fn frame_evolution_with(&self, variant: FrameVariant) -> Result<[ResidualReport; 3]> {
        let dt = self.opts.dt;
        let plus = self.family.sample(self.t + dt, self.n, &self.opts)?;
        let minus = self.family.sample(self.t - dt, self.n, &self.opts)?;
        let sc = &self.slice.scalars;
        let df2_ds = self.d_ds(&self.dec.f2);
        let df3_ds = self.d_ds(&self.dec.f3);

        let mut r_t = Vec::with_capacity(self.n);
        let mut r_g = Vec::with_capacity(self.n);
        let mut r_n = Vec::with_capacity(self.n);
        let mut max_term = 0.0f64;
        for i in 0..self.n {
            let (kg, kn, tg) = match variant {
                FrameVariant::General => {
                    (sc.geodesic_curvature[i], sc.normal_curvature[i], sc.geodesic_torsion[i])
                }
                // specializations zero the scalar their class kills
                FrameVariant::Geodesic => (0.0, sc.normal_curvature[i], sc.geodesic_torsion[i]),
                FrameVariant::Asymptotic => (sc.geodesic_curvature[i], 0.0, sc.geodesic_torsion[i]),
                FrameVariant::CurvatureLine => {
                    (sc.geodesic_curvature[i], sc.normal_curvature[i], 0.0)
                }
            };
            let gamma = self.dec.f1[i] * kg + df2_ds[i] - self.dec.f3[i] * tg;
            let beta = self.dec.f1[i] * kn + df3_ds[i] + self.dec.f2[i] * tg;
            let psi = self.dec.psi[i];
            max_term = max_term.max(gamma.abs()).max(beta.abs()).max(psi.abs());

            let dt_dt = (plus.frames.tangent[i] - minus.frames.tangent[i]) / (2.0 * dt);
            let dg_dt = (plus.frames.side[i] - minus.frames.side[i]) / (2.0 * dt);
            let dn_dt = (plus.frames.normal[i] - minus.frames.normal[i]) / (2.0 * dt);
            let (tv, gv, nv) =
                (self.slice.frames.tangent[i], self.slice.frames.side[i], self.slice.frames.normal[i]);
            r_t.push((dt_dt - (gv * gamma + nv * beta)).norm());
            r_g.push((dg_dt - (tv * -gamma + nv * psi)).norm());
            r_n.push((dn_dt - (tv * -beta + gv * -psi)).norm());
        }
        let tag = variant.tag();
        Ok([
            self.report(&format!("frame_evolution_tangent{tag}"), &r_t, max_term),
            self.report(&format!("frame_evolution_side{tag}"), &r_g, max_term),
            self.report(&format!("frame_evolution_normal{tag}"), &r_n, max_term),
        ])
    }

    /// Frame evolution in the general form, gated on the unit-speed claim.
    pub fn frame_evolution(&self) -> Result<[ResidualReport; 3]> {
        if !self.family.arclength_uniform {
            return Err(Error::RequiresUnitSpeed { family: self.family.name.clone() });
        }
        self.frame_evolution_with(FrameVariant::General)
    }

    /// Residuals of the scalar evolution equations and the spin couplings.
    /// Requires unit speed (the second s-derivatives assume ds = du).
    pub fn scalar_evolution(&self) -> Result<ScalarEvolutionReports> {
        if !self.family.arclength_uniform {
            return Err(Error::RequiresUnitSpeed { family: self.family.name.clone() });
        }
        let dt = self.opts.dt;
        let plus = self.family.sample(self.t + dt, self.n, &self.opts)?;
        let minus = self.family.sample(self.t - dt, self.n, &self.opts)?;
        let sc = &self.slice.scalars;
        let n = self.n;

        let ddt = |p: &[f64], m: &[f64]| -> Vec<f64> {
            (0..n).map(|i| (p[i] - m[i]) / (2.0 * dt)).collect()
        };
        let dkg_dt = ddt(&plus.scalars.geodesic_curvature, &minus.scalars.geodesic_curvature);
        let dkn_dt = ddt(&plus.scalars.normal_curvature, &minus.scalars.normal_curvature);
        let dtg_dt = ddt(&plus.scalars.geodesic_torsion, &minus.scalars.geodesic_torsion);

        let kg = &sc.geodesic_curvature;
        let kn = &sc.normal_curvature;
        let tg = &sc.geodesic_torsion;
        let (f1, f2, f3, psi) = (&self.dec.f1, &self.dec.f2, &self.dec.f3, &self.dec.psi);

        let df1 = self.d_ds(f1);
        let df2 = self.d_ds(f2);
        let df3 = self.d_ds(f3);
        let ddf2 = self.d_ds(&df2);
        let ddf3 = self.d_ds(&df3);
        let dkg = self.d_ds(kg);
        let dkn = self.d_ds(kn);
        let dtg = self.d_ds(tg);
        let dpsi = self.d_ds(psi);

        // gamma' and beta', expanded exactly as the product rule gives them
        let kg_rhs_reduced: Vec<f64> = (0..n)
            .map(|i| {
                df1[i] * kg[i] + f1[i] * dkg[i] + ddf2[i]
                    - df3[i] * tg[i]
                    - f3[i] * dtg[i]
                    - f1[i] * kn[i] * tg[i]
                    - df3[i] * tg[i]
                    - f2[i] * tg[i] * tg[i]
            })
            .collect();
        let kn_rhs_reduced: Vec<f64> = (0..n)
            .map(|i| {
                df1[i] * kn[i] + f1[i] * dkn[i] + ddf3[i]
                    + df2[i] * tg[i]
                    + f2[i] * dtg[i]
                    + f1[i] * kg[i] * tg[i]
                    + df2[i] * tg[i]
                    - f3[i] * tg[i] * tg[i]
            })
            .collect();
        let tg_rhs_reduced: Vec<f64> = (0..n)
            .map(|i| {
                -f1[i] * kg[i] * kn[i] - df2[i] * kn[i] + f3[i] * kn[i] * tg[i] + dpsi[i]
            })
            .collect();

        let beta: Vec<f64> =
            (0..n).map(|i| f1[i] * kn[i] + df3[i] + f2[i] * tg[i]).collect();

        let resid = |lhs: &[f64], rhs: &[f64], coupling: Option<&dyn Fn(usize) -> f64>| -> (Vec<f64>, f64) {
            let mut r = Vec::with_capacity(n);
            let mut mt = 0.0f64;
            for i in 0..n {
                let c = coupling.map_or(0.0, |f| f(i));
                r.push(lhs[i] - (rhs[i] + c));
                mt = mt.max(lhs[i].abs()).max(rhs[i].abs()).max(c.abs());
            }
            (r, mt)
        };

        let max_coupling = |f: &dyn Fn(usize) -> f64| -> f64 {
            (0..n).map(f).fold(0.0f64, |m, x| m.max(x.abs()))
        };

        let (r, mt) = resid(&dkg_dt, &kg_rhs_reduced, None);
        let kg_reduced = self
            .report("kg_evolution_reduced", &r, mt)
            .with_predicted_deviation(max_coupling(&|i| psi[i] * kn[i]));
        let (r, mt) = resid(&dkg_dt, &kg_rhs_reduced, Some(&|i| psi[i] * kn[i]));
        let kg_full = self.report("kg_evolution", &r, mt);

        let (r, mt) = resid(&dkn_dt, &kn_rhs_reduced, None);
        let kn_reduced = self
            .report("kn_evolution_reduced", &r, mt)
            .with_predicted_deviation(max_coupling(&|i| psi[i] * kg[i]));
        let (r, mt) = resid(&dkn_dt, &kn_rhs_reduced, Some(&|i| -psi[i] * kg[i]));
        let kn_full = self.report("kn_evolution", &r, mt);

        let (r, mt) = resid(&dtg_dt, &tg_rhs_reduced, None);
        let tg_reduced = self
            .report("taug_evolution_reduced", &r, mt)
            .with_predicted_deviation(max_coupling(&|i| kg[i] * beta[i]));
        let (r, mt) = resid(&dtg_dt, &tg_rhs_reduced, Some(&|i| kg[i] * beta[i]));
        let tg_full = self.report("taug_evolution", &r, mt);

        // spin couplings: algebraic constraints tying psi to the speeds.
        // Neither is an identity of the frame algebra; they are evaluated and
        // adjudicated, never assumed.
        let mut spin_normal = Vec::with_capacity(n);
        let mut spin_side_f3 = Vec::with_capacity(n);
        let mut spin_side_f2 = Vec::with_capacity(n);
        let mut mt_sn = 0.0f64;
        let mut mt_s3 = 0.0f64;
        let mut mt_s2 = 0.0f64;
        for i in 0..n {
            let lhs_n = psi[i] * kn[i];
            let rhs_n = (-f1[i] * kn[i] - df3[i] - f2[i] * tg[i]) * tg[i];
            spin_normal.push(lhs_n - rhs_n);
            mt_sn = mt_sn.max(lhs_n.abs()).max(rhs_n.abs());

            let lhs_g = psi[i] * kg[i];
            let rhs_3 = (-f1[i] * kg[i] - df3[i] + f3[i] * tg[i]) * tg[i];
            spin_side_f3.push(lhs_g - rhs_3);
            mt_s3 = mt_s3.max(lhs_g.abs()).max(rhs_3.abs());

            let rhs_2 = (-f1[i] * kg[i] - df2[i] + f3[i] * tg[i]) * tg[i];
            spin_side_f2.push(lhs_g - rhs_2);
            mt_s2 = mt_s2.max(lhs_g.abs()).max(rhs_2.abs());
        }

        Ok(ScalarEvolutionReports {
            kg_full,
            kg_reduced,
            kn_full,
            kn_reduced,
            taug_full: tg_full,
            taug_reduced: tg_reduced,
            spin_normal: self.report("spin_coupling_normal", &spin_normal, mt_sn),
            spin_side_f3: self.report("spin_coupling_side_f3", &spin_side_f3, mt_s3),
            spin_side_f2: self.report("spin_coupling_side_f2", &spin_side_f2, mt_s2),
        })
    }
}

/// Term selection for the frame evolution equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameVariant {
    General,
    Geodesic,
    Asymptotic,
    CurvatureLine,
}

impl FrameVariant {
    fn tag(self) -> &'static str {
        match self {
            FrameVariant::General => "",
            FrameVariant::Geodesic => "_geodesic",
            FrameVariant::Asymptotic => "_asymptotic",
            FrameVariant::CurvatureLine => "_curvature_line",
        }
    }
}

/// The scalar evolution reports: each equation in the spin-coupled form that
/// the frame algebra yields and in the reduced form with the coupling
/// dropped, plus the three candidate spin-coupling constraints.
#[derive(Debug, Clone)]
pub struct ScalarEvolutionReports {
    pub kg_full: ResidualReport,
    pub kg_reduced: ResidualReport,
    pub kn_full: ResidualReport,
    pub kn_reduced: ResidualReport,
    pub taug_full: ResidualReport,
    pub taug_reduced: ResidualReport,
    pub spin_normal: ResidualReport,
    pub spin_side_f3: ResidualReport,
    pub spin_side_f2: ResidualReport,
}

impl ScalarEvolutionReports {
    pub fn all(&self) -> Vec<&ResidualReport> {
        vec![
            &self.kg_full,
            &self.kg_reduced,
            &self.kn_full,
            &self.kn_reduced,
            &self.taug_full,
            &self.taug_reduced,
            &self.spin_normal,
            &self.spin_side_f3,
            &self.spin_side_f2,
        ]
    }
}

/// Monotone arclength reparameterization q(s) of a closed chart path, built
/// once by integrating dq/ds = 1/w(q) and interpolated with cubic Hermite
/// pieces (slopes are exact, so the unit-speed property survives to ~1e-12).
struct ArclengthParam {
    total: f64,
    nodes: Vec<f64>,
    slopes: Vec<f64>,
}

impl ArclengthParam {
    fn build(speed: impl Fn(f64) -> f64, q_max: f64, cells: usize) -> Self {
        // total length by composite Simpson over q
        let m = 1 << 16;
        let hq = q_max / m as f64;
        let mut total = speed(0.0) + speed(q_max);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            total += w * speed(i as f64 * hq);
        }
        total *= hq / 3.0;

        // integrate dq/ds = 1/w(q) on a uniform s grid
        let ds = total / cells as f64;
        let mut nodes = Vec::with_capacity(cells + 1);
        let mut slopes = Vec::with_capacity(cells + 1);
        let mut q = 0.0f64;
        nodes.push(q);
        slopes.push(1.0 / speed(q));
        for _ in 0..cells {
            let k1 = 1.0 / speed(q);
            let k2 = 1.0 / speed(q + 0.5 * ds * k1);
            let k3 = 1.0 / speed(q + 0.5 * ds * k2);
            let k4 = 1.0 / speed(q + ds * k3);
            q += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            nodes.push(q);
            slopes.push(1.0 / speed(q));
        }
        Self { total, nodes, slopes }
    }

    fn q_of_s(&self, s: f64) -> f64 {
        let cells = self.nodes.len() - 1;
        let wrapped = s.rem_euclid(self.total);
        let winding = (s - wrapped) / self.total;
        let ds = self.total / cells as f64;
        let cell = ((wrapped / ds) as usize).min(cells - 1);
        let x = (wrapped - cell as f64 * ds) / ds;
        let (q0, q1) = (self.nodes[cell], self.nodes[cell + 1]);
        let (m0, m1) = (self.slopes[cell] * ds, self.slopes[cell + 1] * ds);
        let x2 = x * x;
        let x3 = x2 * x;
        let value = (2.0 * x3 - 3.0 * x2 + 1.0) * q0
            + (x3 - 2.0 * x2 + x) * m0
            + (-2.0 * x3 + 3.0 * x2) * q1
            + (x3 - x2) * m1;
        value + winding * self.nodes[cells]
    }
}

/// Tilt angle of the rotating great circle family.
pub const ROTATING_CIRCLE_TILT: f64 = 0.6;
/// Radius schedule of the breathing-helix family: r(t) = 0.6 + 0.2 t.
pub const HELIX_R0: f64 = 0.6;
pub const HELIX_RDOT: f64 = 0.2;

/// The built-in verification corpus.
///
/// (a) rotating tilted great circle on the unit sphere (rigid, f3 = 0,
///     k_g = tau_g = 0, psi nonzero);
/// (b) translating circle under a plane (f3 = 1, constant scalars, psi = 0);
/// (c) unit-speed helix on a cylinder of growing radius r(t), r^2 + b^2 = 1
///     (open, f3 = r', k_n and tau_g genuinely time-varying, k_g = 0);
/// (d) shrinking latitude circle on the unit sphere (NOT inextensible; the
///     negative control);
/// (e) rotating arclength-parameterized (2,3) torus knot on torus(2,1)
///     (rigid, all of k_g, k_n, tau_g nonzero, f3 = 0).
pub fn builtin_families() -> Vec<FramedFamily> {
    let mut out = Vec::new();

    // (a)
    out.push(FramedFamily::analytic(
        "sphere_rotating_circle",
        |u, t| rotate_z(rotate_x(Vector3::new(u.cos(), u.sin(), 0.0), ROTATING_CIRCLE_TILT), t),
        |u, t| rotate_z(rotate_x(Vector3::new(u.cos(), u.sin(), 0.0), ROTATING_CIRCLE_TILT), t),
        TAU,
        true,
        1.0,
        true,
        true,
    ));

    // (b)
    out.push(FramedFamily::analytic(
        "plane_translating_circle",
        |u, t| Vector3::new(u.cos(), u.sin(), t),
        |_, _| Vector3::Z,
        TAU,
        true,
        1.0,
        true,
        true,
    ));

    // (c)
    let radius = |t: f64| HELIX_R0 + HELIX_RDOT * t;
    out.push(FramedFamily::analytic(
        "cylinder_breathing_helix",
        move |u, t| {
            let r = radius(t);
            let b = (1.0 - r * r).sqrt();
            Vector3::new(r * u.cos(), r * u.sin(), b * u)
        },
        |u, _| Vector3::new(u.cos(), u.sin(), 0.0),
        4.0 * std::f64::consts::PI,
        false,
        0.5,
        true,
        true,
    ));

    // (d)
    let theta = |t: f64| std::f64::consts::FRAC_PI_3 - t;
    out.push(FramedFamily::analytic(
        "sphere_shrinking_latitude",
        move |u, t| {
            let th = theta(t);
            Vector3::new(th.sin() * u.cos(), th.sin() * u.sin(), th.cos())
        },
        move |u, t| {
            let th = theta(t);
            Vector3::new(th.sin() * u.cos(), th.sin() * u.sin(), th.cos())
        },
        TAU,
        true,
        0.3,
        false,
        false,
    ));

    // (e)
    let torus = Arc::new(ParametricSurface::torus(2.0, 1.0));
    let speed = |q: f64| {
        let w = 2.0 + (3.0 * q).cos();
        (4.0 * w * w + 9.0).sqrt()
    };
    let param = Arc::new(ArclengthParam::build(speed, TAU, 1 << 15));
    let length = param.total;
    let t1 = torus.clone();
    let p1 = param.clone();
    let position = move |s: f64, t: f64| {
        let q = p1.q_of_s(s);
        rotate_z(t1.point(2.0 * q, 3.0 * q).expect("torus chart is total"), t)
    };
    let p2 = param;
    let normal = move |s: f64, t: f64| {
        let q = p2.q_of_s(s);
        rotate_z(torus.unit_normal(2.0 * q, 3.0 * q).expect("torus chart is regular"), t)
    };
    out.push(FramedFamily::analytic(
        "torus_rotating_knot",
        position,
        normal,
        length,
        true,
        1.0,
        true,
        true,
    ));

    out
}

pub fn builtin_family(name: &str) -> Option<FramedFamily> {
    builtin_families().into_iter().find(|f| f.name == name)
}
