//! File emission: per-sample scalar CSV, flow snapshot CSV, diagnostics
//! JSON lines, residual tables and SVG figures. All floats are printed with
//! 17 significant digits so identical inputs yield byte-identical files.

use std::fmt::Write as _;

use crate::curve::{CurveAnalysis, DiscreteCurve};
use crate::error::{Error, Result};
use crate::flow::{Diagnostics, Snapshot};
use crate::report::ResidualReport;
use crate::vec3::Vector3;

/// 17 significant digits, `nan` for undefined values.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub const SCALAR_CSV_HEADER: &str = "index,u,v,x,y,z,speed,S,k_g,k_n,tau_g,kappa,tau,phi";

fn scalar_row(out: &mut String, curve: &DiscreteCurve, a: &CurveAnalysis, i: usize, p: Vector3) {
    let sc = &a.scalars;
    let (u, v) = curve.params()[i];
    let _ = write!(
        out,
        "{i},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt_float(u),
        fmt_float(v),
        fmt_float(p.x),
        fmt_float(p.y),
        fmt_float(p.z),
        fmt_float(sc.speed[i]),
        fmt_float(sc.arclength[i]),
        fmt_float(sc.geodesic_curvature[i]),
        fmt_float(sc.normal_curvature[i]),
        fmt_float(sc.geodesic_torsion[i]),
        fmt_float(sc.curvature[i]),
        fmt_float(sc.torsion[i]),
        fmt_float(sc.frame_angle[i]),
    );
}

/// Per-sample scalar CSV for one curve.
pub fn scalars_csv(curve: &DiscreteCurve, analysis: &CurveAnalysis) -> Result<String> {
    let sampled = curve.sample()?;
    let mut out = String::new();
    out.push_str(SCALAR_CSV_HEADER);
    out.push('\n');
    for i in 0..curve.len() {
        scalar_row(&mut out, curve, analysis, i, sampled.points[i]);
        out.push('\n');
    }
    Ok(out)
}

/// Snapshot CSV: the scalar schema plus a trailing `t` column, one block of
/// rows per snapshot.
pub fn snapshots_csv(snapshots: &[Snapshot]) -> Result<String> {
    let mut out = String::new();
    out.push_str(SCALAR_CSV_HEADER);
    out.push_str(",t\n");
    for snap in snapshots {
        let sampled = snap.curve.sample()?;
        for i in 0..snap.curve.len() {
            scalar_row(&mut out, &snap.curve, &snap.analysis, i, sampled.points[i]);
            let _ = writeln!(out, ",{}", fmt_float(snap.t));
        }
    }
    Ok(out)
}

/// Diagnostics as JSON lines, one object per step.
pub fn diagnostics_jsonl(diagnostics: &Diagnostics) -> String {
    let mut out = String::new();
    for row in &diagnostics.rows {
        out.push_str(&serde_json::to_string(row).expect("diagnostics serialize"));
        out.push('\n');
    }
    out
}

/// Residual reports as a JSON array.
pub fn reports_json(reports: &[ResidualReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// Fixed-width text table of residual reports.
pub fn reports_table(reports: &[ResidualReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<26} {:<34} {:>6} {:>9} {:>12} {:>12} {:>12} {:>6}",
        "family", "identity", "N", "dt", "max", "rms", "tolerance", "pass"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<26} {:<34} {:>6} {:>9.1e} {:>12.3e} {:>12.3e} {:>12.3e} {:>6}",
            r.family,
            r.identity,
            r.n,
            r.dt,
            r.max_residual,
            r.rms_residual,
            r.tolerance,
            if r.pass { "yes" } else { "no" }
        );
    }
    out
}

/// One curve to draw: time label, ambient points, closedness.
#[derive(Debug, Clone)]
pub struct RenderCurve {
    pub t: f64,
    pub points: Vec<Vector3>,
    pub closed: bool,
}

impl RenderCurve {
    /// Polygon length of the drawn polyline (closing segment included for
    /// closed curves).
    pub fn polyline_length(&self) -> f64 {
        let mut length = 0.0;
        for w in self.points.windows(2) {
            length += w[0].distance(w[1]);
        }
        if self.closed {
            length += self.points[self.points.len() - 1].distance(self.points[0]);
        }
        length
    }
}

/// Snapshots of a flow run as renderable curves.
pub fn render_curves(snapshots: &[Snapshot]) -> Result<Vec<RenderCurve>> {
    snapshots
        .iter()
        .map(|snap| {
            let sampled = snap.curve.sample()?;
            Ok(RenderCurve { t: snap.t, points: sampled.points, closed: sampled.closed })
        })
        .collect()
}

/// Parse a snapshot CSV back into renderable curves (one per distinct time
/// block, in file order).
pub fn parse_snapshots_csv(text: &str, closed: bool) -> Result<Vec<RenderCurve>> {
    let bad = |message: &str| Error::Validation {
        field: "snapshots.csv".into(),
        message: message.into(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let expected = format!("{SCALAR_CSV_HEADER},t");
    if header != expected {
        return Err(bad("unexpected header"));
    }
    let mut curves: Vec<RenderCurve> = Vec::new();
    let mut current_key: Option<String> = None;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 15 {
            return Err(bad("wrong column count"));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| bad("bad float"));
        let p = Vector3::new(parse(cols[3])?, parse(cols[4])?, parse(cols[5])?);
        let t_key = cols[14].to_string();
        if current_key.as_deref() != Some(&t_key) {
            curves.push(RenderCurve { t: parse(cols[14])?, points: Vec::new(), closed });
            current_key = Some(t_key);
        }
        curves.last_mut().expect("just pushed").points.push(p);
    }
    if curves.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Ok(curves)
}

/// Orthographic SVG of curve snapshots, projected to the xy plane and
/// color-ramped by time, with a length legend.
pub fn render_svg(curves: &[RenderCurve]) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let (mut lo_x, mut hi_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for curve in curves {
        for p in &curve.points {
            lo_x = lo_x.min(p.x);
            hi_x = hi_x.max(p.x);
            lo_y = lo_y.min(p.y);
            hi_y = hi_y.max(p.y);
        }
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
    let margin = 0.08 * span;
    let scale = 640.0 / (span + 2.0 * margin);
    let project = |p: &Vector3| -> (f64, f64) {
        ((p.x - lo_x + margin) * scale, 640.0 - (p.y - lo_y + margin) * scale)
    };
    let color = |k: usize| -> String {
        let f = if curves.len() > 1 { k as f64 / (curves.len() - 1) as f64 } else { 0.0 };
        let r = (30.0 + 200.0 * f).round() as u8;
        let b = (230.0 - 200.0 * f).round() as u8;
        format!("rgb({r},60,{b})")
    };

    let legend_height = 18 * curves.len() + 10;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"{}\" viewBox=\"0 0 840 {}\">",
        660.max(legend_height),
        660.max(legend_height)
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (k, curve) in curves.iter().enumerate() {
        let mut points = String::new();
        for p in &curve.points {
            let (x, y) = project(p);
            let _ = write!(points, "{x:.3},{y:.3} ");
        }
        if curve.closed {
            let (x, y) = project(&curve.points[0]);
            let _ = write!(points, "{x:.3},{y:.3}");
        }
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>",
            color(k),
            points.trim_end()
        );
    }
    for (k, curve) in curves.iter().enumerate() {
        let y = 24 + 18 * k;
        let _ = writeln!(
            out,
            "<text x=\"660\" y=\"{y}\" font-family=\"monospace\" font-size=\"12\" fill=\"{}\">t={:.4} L={:.9}</text>",
            color(k),
            curve.t,
            curve.polyline_length()
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::EngineOptions;
    use crate::surface::ParametricSurface;
    use std::f64::consts::{FRAC_PI_2, TAU};
    use std::sync::Arc;

    fn great_circle(n: usize) -> DiscreteCurve {
        let surface = Arc::new(ParametricSurface::sphere(1.0));
        DiscreteCurve::from_chart_path(surface, |u| (FRAC_PI_2, u), TAU, n, true).unwrap()
    }

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(-0.25), "-2.5000000000000000e-1");
    }

    #[test]
    fn scalar_csv_shape() {
        let curve = great_circle(32);
        let a = curve.analyze(&EngineOptions::default()).unwrap();
        let csv = scalars_csv(&curve, &a).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 33);
        assert_eq!(lines[0], SCALAR_CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 14);
    }

    #[test]
    fn single_snapshot_svg_is_one_polyline() {
        let curve = great_circle(64);
        let analysis = curve.analyze(&EngineOptions::default()).unwrap();
        let snap = Snapshot { step: 0, t: 0.0, curve, analysis };
        let svg = render_svg(&render_curves(&[snap]).unwrap()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<text").count(), 1);
        assert!(svg.contains("t=0.0000"));
    }

    #[test]
    fn empty_trajectory_rejected() {
        assert!(matches!(render_svg(&[]), Err(Error::EmptyTrajectory)));
    }

    #[test]
    fn snapshot_csv_round_trips_into_render_curves() {
        let curve = great_circle(32);
        let analysis = curve.analyze(&EngineOptions::default()).unwrap();
        let snaps = vec![
            Snapshot { step: 0, t: 0.0, curve: curve.clone(), analysis: analysis.clone() },
            Snapshot { step: 10, t: 0.25, curve: curve.clone(), analysis },
        ];
        let csv = snapshots_csv(&snaps).unwrap();
        let curves = parse_snapshots_csv(&csv, true).unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].points.len(), 32);
        assert!((curves[1].t - 0.25).abs() <= 1e-15);
        let direct = render_curves(&snaps).unwrap();
        for (a, b) in curves[0].points.iter().zip(&direct[0].points) {
            assert!(a.distance(*b) <= 1e-15);
        }
    }
}
