//! Finite-difference stencils and quadrature on uniformly sampled fields.
//!
//! Closed curves use periodic wrap-around. Open curves are extended by
//! polynomial ghost samples before the central stencil is applied: one-sided
//! formulas would make the truncation error jump at the stencil switchover,
//! which costs an order of accuracy every time a derived field is
//! differentiated again. Ghost extension keeps the error field smooth, so
//! composed derivatives (frames, then curvatures, then their derivatives)
//! stay at the nominal order all the way to the ends.

use std::ops::{Add, Mul};

use crate::vec3::Vector3;

/// Truncation order of the difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Two,
    Four,
}

impl StencilOrder {
    pub fn as_f64(self) -> f64 {
        match self {
            StencilOrder::Two => 2.0,
            StencilOrder::Four => 4.0,
        }
    }

    /// Ghost samples needed on each side of an open field.
    fn ghosts(self) -> usize {
        match self {
            StencilOrder::Two => 1,
            StencilOrder::Four => 2,
        }
    }

    /// Central weights per 1/h, paired with offsets -k..=k skipping 0.
    fn central(self) -> (&'static [f64], &'static [isize]) {
        match self {
            StencilOrder::Two => (&[-0.5, 0.5], &[-1, 1]),
            StencilOrder::Four => (
                &[1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0],
                &[-2, -1, 1, 2],
            ),
        }
    }
}

/// Minimum samples any differentiation needs (degree-5 extrapolation).
pub const MIN_STENCIL_SAMPLES: usize = 6;

trait Linear: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Linear for Vector3 {
    fn zero() -> Self {
        Vector3::ZERO
    }
}

// Degree-5 polynomial extrapolation one and two steps beyond f[0], using
// f[0..6] (alternating-binomial coefficients).
fn extrapolate_one<T: Linear>(f: &[T]) -> T {
    f[0] * 6.0 + f[1] * -15.0 + f[2] * 20.0 + f[3] * -15.0 + f[4] * 6.0 + f[5] * -1.0
}

fn extrapolate_two<T: Linear>(f: &[T]) -> T {
    f[0] * 21.0 + f[1] * -70.0 + f[2] * 105.0 + f[3] * -84.0 + f[4] * 35.0 + f[5] * -6.0
}

/// Value of the field at signed index `j`, ghost-extrapolated outside the
/// open range or wrapped on closed fields.
fn fetch<T: Linear>(f: &[T], j: isize, closed: bool) -> T {
    let n = f.len() as isize;
    if closed {
        return f[j.rem_euclid(n) as usize];
    }
    if (0..n).contains(&j) {
        return f[j as usize];
    }
    let head: Vec<T>;
    let window: &[T] = if j < 0 {
        &f[..6]
    } else {
        head = f[f.len() - 6..].iter().rev().copied().collect();
        &head
    };
    let dist = if j < 0 { -j } else { j - (n - 1) };
    match dist {
        1 => extrapolate_one(window),
        2 => extrapolate_two(window),
        _ => unreachable!("stencils never reach more than two ghosts"),
    }
}

fn derive_linear<T: Linear>(f: &[T], closed: bool, h: f64, order: StencilOrder) -> Vec<T> {
    let n = f.len();
    assert!(n >= MIN_STENCIL_SAMPLES, "need at least {MIN_STENCIL_SAMPLES} samples");
    let _ = order.ghosts();
    let (weights, offsets) = order.central();
    (0..n as isize)
        .map(|i| {
            let mut acc = T::zero();
            for (w, &o) in weights.iter().zip(offsets) {
                acc = acc + fetch(f, i + o, closed) * *w;
            }
            acc * (1.0 / h)
        })
        .collect()
}

/// d/du of a scalar field sampled at uniform steps `h`.
pub fn derive_scalar(f: &[f64], closed: bool, h: f64, order: StencilOrder) -> Vec<f64> {
    derive_linear(f, closed, h, order)
}

/// d/du of a vector field sampled at uniform steps `h`.
pub fn derive_vector(f: &[Vector3], closed: bool, h: f64, order: StencilOrder) -> Vec<Vector3> {
    derive_linear(f, closed, h, order)
}

/// Differentiation of an angle-like field. The field is first unwrapped to a
/// continuous branch; on closed curves the stencil sees the unwrapped field
/// extended by its net winding, so the seam differentiates cleanly.
pub fn derive_angle(f: &[f64], closed: bool, h: f64, order: StencilOrder) -> Vec<f64> {
    let unwrapped = unwrap_angles(f, closed);
    let n = f.len();
    if !closed {
        return derive_scalar(&unwrapped, false, h, order);
    }
    let period = unwrapped[n] - unwrapped[0];
    let (weights, offsets) = order.central();
    (0..n as isize)
        .map(|i| {
            let mut acc = 0.0;
            for (w, &o) in weights.iter().zip(offsets) {
                let j = i + o;
                let q = j.div_euclid(n as isize);
                let r = j.rem_euclid(n as isize) as usize;
                acc += w * (unwrapped[r] + period * q as f64);
            }
            acc / h
        })
        .collect()
}

/// Continuous unwrap of an angle field. For closed fields the returned vector
/// has length n+1; the last entry is the first angle plus the total winding.
pub fn unwrap_angles(f: &[f64], closed: bool) -> Vec<f64> {
    let n = f.len();
    let mut out = Vec::with_capacity(n + usize::from(closed));
    let mut prev = f[0];
    out.push(prev);
    for &a in &f[1..] {
        prev += wrap_to_pi(a - prev);
        out.push(prev);
    }
    if closed {
        out.push(prev + wrap_to_pi(f[0] - prev));
    }
    out
}

/// Reduce an angle difference to (-pi, pi].
pub fn wrap_to_pi(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Cumulative trapezoid integral of `f` with step `h`, starting at zero.
pub fn cumulative_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Total trapezoid integral over the sampled range. Closed fields include the
/// wrap-around segment, which makes this the plain rectangle sum.
pub fn integrate(f: &[f64], closed: bool, h: f64) -> f64 {
    if closed {
        h * f.iter().sum::<f64>()
    } else {
        let inner: f64 = f[1..f.len() - 1].iter().sum();
        h * (inner + 0.5 * (f[0] + f[f.len() - 1]))
    }
}
