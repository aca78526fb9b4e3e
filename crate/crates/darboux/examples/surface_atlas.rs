//! Tour of the built-in surface charts: points, normals, first fundamental
//! form, domain handling.
//!
//! ```bash
//! cargo run -p darboux --example surface_atlas
//! ```

use darboux::surface::{MongePatch, ParametricSurface};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

fn show(name: &str, surface: &ParametricSurface, u: f64, v: f64) {
    let p = surface.point(u, v).unwrap();
    let n = surface.unit_normal(u, v).unwrap();
    let (e, f, g) = surface.first_fundamental_form(u, v).unwrap();
    println!(
        "{name:10} at ({u:6.3},{v:6.3}): point ({:+.3},{:+.3},{:+.3})  normal ({:+.3},{:+.3},{:+.3})  E,F,G = {e:.3},{f:.3},{g:.3}",
        p.x, p.y, p.z, n.x, n.y, n.z
    );
}

fn main() {
    let plane = ParametricSurface::plane();
    let sphere = ParametricSurface::sphere(1.0);
    let torus = ParametricSurface::torus(2.0, 1.0);
    let cylinder = ParametricSurface::cylinder(1.0);
    let bumps = ParametricSurface::monge(MongePatch::numeric(|u, v| {
        0.3 * u.sin() * (0.7 * v).cos()
    }));

    show("plane", &plane, 0.4, -1.2);
    show("sphere", &sphere, FRAC_PI_2, 0.0);
    show("sphere", &sphere, FRAC_PI_3, 2.0);
    show("torus", &torus, 0.0, 0.0);
    show("cylinder", &cylinder, 1.0, 0.5);
    show("monge", &bumps, 0.5, 0.5);

    // periodic axes wrap, non-periodic axes are enforced
    let wrapped = torus.point(7.0, -1.0).unwrap();
    println!("\ntorus wraps periodic parameters: (7,-1) -> ({:.3},{:.3},{:.3})", wrapped.x, wrapped.y, wrapped.z);
    match sphere.point(-0.1, 0.0) {
        Err(e) => println!("sphere rejects a polar overshoot: {e}"),
        Ok(_) => unreachable!(),
    }
    match sphere.unit_normal(1e-12, 0.0) {
        Err(e) => println!("pole is a degenerate chart point: {e}"),
        Ok(_) => unreachable!(),
    }
}
