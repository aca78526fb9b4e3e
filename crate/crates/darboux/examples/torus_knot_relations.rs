//! Frame-angle relations on a (2,3) torus knot, with a convergence table.
//!
//! With phi = atan2(k_n, k_g) and outward normals the consistent relation
//! set is k_g = kappa cos(phi), k_n = kappa sin(phi), tau_g = tau - dphi/ds;
//! the residuals below shrink at order 2 as the sampling is refined.
//!
//! ```bash
//! cargo run -p darboux --example torus_knot_relations
//! ```

use std::f64::consts::TAU;
use std::sync::Arc;

use darboux::curve::{frenet_relation_residuals, DiscreteCurve, EngineOptions};
use darboux::surface::ParametricSurface;

fn main() {
    let torus = Arc::new(ParametricSurface::torus(2.0, 1.0));
    let opts = EngineOptions::default();
    println!("{:>6} {:>14} {:>14} {:>14}", "N", "kg-relation", "kn-relation", "taug-relation");
    let mut last: Option<(f64, f64, f64)> = None;
    for n in [512usize, 1024, 2048, 4096] {
        let knot = DiscreteCurve::from_chart_path(
            torus.clone(),
            |q| (2.0 * q, 3.0 * q),
            TAU,
            n,
            true,
        )
        .unwrap();
        let a = knot.analyze(&opts).unwrap();
        let (r1, r2, r3) = frenet_relation_residuals(&a.scalars, true, knot.step(), opts.order);
        print!("{n:>6} {r1:>14.3e} {r2:>14.3e} {r3:>14.3e}");
        if let Some((_, _, p3)) = last {
            print!("   (taug-relation ratio {:.2})", p3 / r3);
        }
        println!();
        last = Some((r1, r2, r3));
    }
}
