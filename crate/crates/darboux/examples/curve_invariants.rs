//! Scalar invariants of classic test curves: adapted-frame curvatures,
//! torsions and the geodesic/asymptotic/principal classification.
//!
//! ```bash
//! cargo run -p darboux --example curve_invariants
//! ```

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};
use std::sync::Arc;

use darboux::curve::{classify, DiscreteCurve, EngineOptions};
use darboux::surface::ParametricSurface;

fn report(name: &str, curve: &DiscreteCurve) {
    let opts = EngineOptions::default();
    let a = curve.analyze(&opts).unwrap();
    let mid = curve.len() / 2;
    let class = classify(&a.scalars, 1e-6);
    println!(
        "{name:24} L={:8.5}  k_g={:+.4}  k_n={:+.4}  tau_g={:+.4}  kappa={:.4}  geodesic={} asymptotic={} principal={}",
        a.scalars.total_length,
        a.scalars.geodesic_curvature[mid],
        a.scalars.normal_curvature[mid],
        a.scalars.geodesic_torsion[mid],
        a.scalars.curvature[mid],
        class.geodesic,
        class.asymptotic,
        class.principal,
    );
}

fn main() {
    let sphere = Arc::new(ParametricSurface::sphere(1.0));
    let cylinder = Arc::new(ParametricSurface::cylinder(0.6));
    let torus = Arc::new(ParametricSurface::torus(2.0, 1.0));
    let plane = Arc::new(ParametricSurface::plane());

    let great = DiscreteCurve::from_chart_path(sphere.clone(), |u| (FRAC_PI_2, u), TAU, 1024, true)
        .unwrap();
    let latitude =
        DiscreteCurve::from_chart_path(sphere, |u| (FRAC_PI_3, u), TAU, 1024, true).unwrap();
    let helix =
        DiscreteCurve::from_chart_path(cylinder, |u| (u, 0.8 * u), 4.0 * PI, 1024, false).unwrap();
    let knot =
        DiscreteCurve::from_chart_path(torus, |q| (2.0 * q, 3.0 * q), TAU, 1024, true).unwrap();
    let line =
        DiscreteCurve::from_chart_path(plane, |u| (u, 0.5 * u), 2.0, 64, false).unwrap();

    println!("expected: great circle k_g=0, k_n=-1; latitude k_g=cot(pi/3)={:.4};", 1.0 / FRAC_PI_3.tan());
    println!("          helix k_n=-0.6, tau_g=+0.8; straight line everything 0\n");
    report("great circle", &great);
    report("latitude circle pi/3", &latitude);
    report("balanced helix (.6,.8)", &helix);
    report("(2,3) torus knot", &knot);
    report("straight line", &line);
}
