//! Simulate a rigid-rotation flow and emit an SVG of the snapshots with a
//! length legend (all entries identical: rotations are isometries).
//!
//! ```bash
//! cargo run --release -p darboux --example render_flow
//! ```

use std::f64::consts::TAU;
use std::sync::Arc;

use darboux::curve::{DiscreteCurve, EngineOptions};
use darboux::flow::{run, FlowSpec, SampleContext, SimulationConfig};
use darboux::output::{render_curves, render_svg};
use darboux::surface::ParametricSurface;
use darboux::vec3::Vector3;

fn main() {
    let sphere = Arc::new(ParametricSurface::sphere(1.0));
    // a tilted circle, rotated about the x axis by the prescribed Killing field
    let circle =
        DiscreteCurve::from_chart_path(sphere, |u| (1.1, u), TAU, 256, true).unwrap();
    let axis = Vector3::X;
    let spec = FlowSpec::prescribed(
        move |c: &SampleContext| axis.cross(c.position).dot(c.tangent),
        move |c: &SampleContext| axis.cross(c.position).dot(c.side),
    );
    let config =
        SimulationConfig { dt: 5e-3, steps: 200, snapshot_stride: 20, drift_tolerance: 1e-4 };
    let (snapshots, _) = run(&circle, &spec, &config, &EngineOptions::default()).unwrap();
    let svg = render_svg(&render_curves(&snapshots).unwrap()).unwrap();
    let path = std::env::temp_dir().join("darboux_rotation.svg");
    std::fs::write(&path, svg).unwrap();
    println!("{} snapshots rendered to {}", snapshots.len(), path.display());
}
