//! Parametric surface charts with analytic derivatives and the quantities
//! every other module pulls from them: points, partials, unit normals and
//! the first fundamental form.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vec3::Vector3;

pub const DEFAULT_EPSILON_REG: f64 = 1e-8;
pub const DEFAULT_MONGE_STEP: f64 = 1e-5;

/// Height function of a Monge patch (u, v) -> (u, v, h(u,v)).
///
/// Partials may be supplied analytically; otherwise they are taken by central
/// differences with `fd_step`.
#[derive(Clone)]
pub struct MongePatch {
    pub height: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    /// (h_u, h_v) if available in closed form.
    pub gradient: Option<Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>>,
    /// (h_uu, h_uv, h_vv) if available in closed form.
    pub hessian: Option<Arc<dyn Fn(f64, f64) -> (f64, f64, f64) + Send + Sync>>,
    pub fd_step: f64,
}

impl fmt::Debug for MongePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MongePatch")
            .field("analytic_gradient", &self.gradient.is_some())
            .field("analytic_hessian", &self.hessian.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl MongePatch {
    pub fn numeric(height: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            height: Arc::new(height),
            gradient: None,
            hessian: None,
            fd_step: DEFAULT_MONGE_STEP,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }

    fn grad(&self, u: f64, v: f64) -> (f64, f64) {
        if let Some(g) = &self.gradient {
            return g(u, v);
        }
        let h = self.fd_step;
        let f = &self.height;
        (
            (f(u + h, v) - f(u - h, v)) / (2.0 * h),
            (f(u, v + h) - f(u, v - h)) / (2.0 * h),
        )
    }

    fn hess(&self, u: f64, v: f64) -> (f64, f64, f64) {
        if let Some(hs) = &self.hessian {
            return hs(u, v);
        }
        let h = self.fd_step;
        let f = &self.height;
        let huu = (f(u + h, v) - 2.0 * f(u, v) + f(u - h, v)) / (h * h);
        let hvv = (f(u, v + h) - 2.0 * f(u, v) + f(u, v - h)) / (h * h);
        let huv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h))
            / (4.0 * h * h);
        (huu, huv, hvv)
    }
}

/// The chart families the toolkit knows how to build.
#[derive(Debug, Clone)]
pub enum SurfaceKind {
    Plane,
    Sphere { radius: f64 },
    Torus { ring_radius: f64, tube_radius: f64 },
    Cylinder { radius: f64 },
    Monge(MongePatch),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisDomain {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl AxisDomain {
    fn wrap(&self, x: f64, axis: char) -> Result<f64> {
        if self.periodic {
            Ok(self.lo + (x - self.lo).rem_euclid(self.hi - self.lo))
        } else if x < self.lo || x > self.hi {
            Err(Error::OutOfDomain { axis, value: x, lo: self.lo, hi: self.hi })
        } else {
            Ok(x)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub u: AxisDomain,
    pub v: AxisDomain,
}

/// First and second chart partials at a point.
#[derive(Debug, Clone, Copy)]
pub struct ChartJet {
    pub point: Vector3,
    pub x_u: Vector3,
    pub x_v: Vector3,
    pub x_uu: Vector3,
    pub x_uv: Vector3,
    pub x_vv: Vector3,
}

/// An oriented surface chart over a parameter rectangle. Immutable and
/// freely shareable between threads; every operation is a pure function.
#[derive(Debug, Clone)]
pub struct ParametricSurface {
    kind: SurfaceKind,
    domain: Domain,
    epsilon_reg: f64,
}

const BIG: f64 = 1e6;
const TAU: f64 = std::f64::consts::TAU;

impl ParametricSurface {
    pub fn new(kind: SurfaceKind) -> Self {
        let domain = match &kind {
            SurfaceKind::Plane => Domain {
                u: AxisDomain { lo: -BIG, hi: BIG, periodic: false },
                v: AxisDomain { lo: -BIG, hi: BIG, periodic: false },
            },
            // Polar angle stays strictly inside (0, pi); the poles are not
            // chart points and regularity would fail there anyway.
            SurfaceKind::Sphere { .. } => Domain {
                u: AxisDomain { lo: 0.0, hi: std::f64::consts::PI, periodic: false },
                v: AxisDomain { lo: 0.0, hi: TAU, periodic: true },
            },
            SurfaceKind::Torus { .. } => Domain {
                u: AxisDomain { lo: 0.0, hi: TAU, periodic: true },
                v: AxisDomain { lo: 0.0, hi: TAU, periodic: true },
            },
            SurfaceKind::Cylinder { .. } => Domain {
                u: AxisDomain { lo: 0.0, hi: TAU, periodic: true },
                v: AxisDomain { lo: -BIG, hi: BIG, periodic: false },
            },
            SurfaceKind::Monge(_) => Domain {
                u: AxisDomain { lo: -BIG, hi: BIG, periodic: false },
                v: AxisDomain { lo: -BIG, hi: BIG, periodic: false },
            },
        };
        Self { kind, domain, epsilon_reg: DEFAULT_EPSILON_REG }
    }

    pub fn plane() -> Self {
        Self::new(SurfaceKind::Plane)
    }

    pub fn sphere(radius: f64) -> Self {
        Self::new(SurfaceKind::Sphere { radius })
    }

    pub fn torus(ring_radius: f64, tube_radius: f64) -> Self {
        Self::new(SurfaceKind::Torus { ring_radius, tube_radius })
    }

    pub fn cylinder(radius: f64) -> Self {
        Self::new(SurfaceKind::Cylinder { radius })
    }

    pub fn monge(patch: MongePatch) -> Self {
        Self::new(SurfaceKind::Monge(patch))
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_epsilon_reg(mut self, eps: f64) -> Self {
        self.epsilon_reg = eps;
        self
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn epsilon_reg(&self) -> f64 {
        self.epsilon_reg
    }

    /// Wrap periodic axes, reject out-of-range values on the others.
    pub fn clamp_params(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        Ok((self.domain.u.wrap(u, 'u')?, self.domain.v.wrap(v, 'v')?))
    }

    /// Chart point and all partials, computed in one pass.
    pub fn jet(&self, u: f64, v: f64) -> Result<ChartJet> {
        let (u, v) = self.clamp_params(u, v)?;
        Ok(match &self.kind {
            SurfaceKind::Plane => ChartJet {
                point: Vector3::new(u, v, 0.0),
                x_u: Vector3::X,
                x_v: Vector3::Y,
                x_uu: Vector3::ZERO,
                x_uv: Vector3::ZERO,
                x_vv: Vector3::ZERO,
            },
            SurfaceKind::Sphere { radius } => {
                let r = *radius;
                let (st, ct) = u.sin_cos();
                let (sp, cp) = v.sin_cos();
                ChartJet {
                    point: Vector3::new(r * st * cp, r * st * sp, r * ct),
                    x_u: Vector3::new(r * ct * cp, r * ct * sp, -r * st),
                    x_v: Vector3::new(-r * st * sp, r * st * cp, 0.0),
                    x_uu: Vector3::new(-r * st * cp, -r * st * sp, -r * ct),
                    x_uv: Vector3::new(-r * ct * sp, r * ct * cp, 0.0),
                    x_vv: Vector3::new(-r * st * cp, -r * st * sp, 0.0),
                }
            }
            SurfaceKind::Torus { ring_radius, tube_radius } => {
                let (big_r, r) = (*ring_radius, *tube_radius);
                let (su, cu) = u.sin_cos();
                let (sv, cv) = v.sin_cos();
                let w = big_r + r * cv;
                ChartJet {
                    point: Vector3::new(w * cu, w * su, r * sv),
                    x_u: Vector3::new(-w * su, w * cu, 0.0),
                    x_v: Vector3::new(-r * sv * cu, -r * sv * su, r * cv),
                    x_uu: Vector3::new(-w * cu, -w * su, 0.0),
                    x_uv: Vector3::new(r * sv * su, -r * sv * cu, 0.0),
                    x_vv: Vector3::new(-r * cv * cu, -r * cv * su, -r * sv),
                }
            }
            SurfaceKind::Cylinder { radius } => {
                let r = *radius;
                let (su, cu) = u.sin_cos();
                ChartJet {
                    point: Vector3::new(r * cu, r * su, v),
                    x_u: Vector3::new(-r * su, r * cu, 0.0),
                    x_v: Vector3::Z,
                    x_uu: Vector3::new(-r * cu, -r * su, 0.0),
                    x_uv: Vector3::ZERO,
                    x_vv: Vector3::ZERO,
                }
            }
            SurfaceKind::Monge(patch) => {
                let h = (patch.height)(u, v);
                let (hu, hv) = patch.grad(u, v);
                let (huu, huv, hvv) = patch.hess(u, v);
                ChartJet {
                    point: Vector3::new(u, v, h),
                    x_u: Vector3::new(1.0, 0.0, hu),
                    x_v: Vector3::new(0.0, 1.0, hv),
                    x_uu: Vector3::new(0.0, 0.0, huu),
                    x_uv: Vector3::new(0.0, 0.0, huv),
                    x_vv: Vector3::new(0.0, 0.0, hvv),
                }
            }
        })
    }

    pub fn point(&self, u: f64, v: f64) -> Result<Vector3> {
        Ok(self.jet(u, v)?.point)
    }

    /// Unit normal (x_u x x_v)/|x_u x x_v|. Built-in charts are arranged so
    /// this points outward.
    pub fn unit_normal(&self, u: f64, v: f64) -> Result<Vector3> {
        let jet = self.jet(u, v)?;
        let cross = jet.x_u.cross(jet.x_v);
        let norm = cross.norm();
        if norm <= self.epsilon_reg {
            return Err(Error::DegenerateChart { u, v, cross_norm: norm, epsilon: self.epsilon_reg });
        }
        Ok(cross / norm)
    }

    /// Regularity margin |x_u x x_v| at a point (no threshold applied).
    pub fn regularity_margin(&self, u: f64, v: f64) -> Result<f64> {
        let jet = self.jet(u, v)?;
        Ok(jet.x_u.cross(jet.x_v).norm())
    }

    /// First fundamental form coefficients (E, F, G).
    pub fn first_fundamental_form(&self, u: f64, v: f64) -> Result<(f64, f64, f64)> {
        let jet = self.jet(u, v)?;
        let (e, f, g) = (jet.x_u.dot(jet.x_u), jet.x_u.dot(jet.x_v), jet.x_v.dot(jet.x_v));
        if jet.x_u.cross(jet.x_v).norm() <= self.epsilon_reg {
            return Err(Error::DegenerateChart {
                u,
                v,
                cross_norm: jet.x_u.cross(jet.x_v).norm(),
                epsilon: self.epsilon_reg,
            });
        }
        Ok((e, f, g))
    }
}
