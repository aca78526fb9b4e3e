//! Command dispatch: `analyze`, `verify`, `simulate`, `render`.
//!
//! Exit codes: 0 success, 2 config/usage validation, 3 numeric failure
//! (drift, closure, verification mismatch), 4 I/O.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::config::{load_config, RunConfig};
use crate::curve;
use crate::error::{Error, Result};
use crate::family::{builtin_families, AnalyzerOptions, FamilyFrame, FrameVariant, FramedFamily};
use crate::flow;
use crate::output;
use crate::report::ResidualReport;

const USAGE: &str = "usage: darboux <analyze|verify|simulate|render> [flags]

flags:
  --config PATH         run configuration (analyze, simulate, render)
  --out DIR             output directory (all commands)
  --n N                 override sample count
  --dt X                override time step
  --steps K             override step count (simulate)
  --tolerance-scale S   scale of the residual tolerance model (verify)

outputs:
  analyze   scalars.csv, analysis.json
  verify    residuals.json, residuals.txt
  simulate  snapshots.csv, diagnostics.jsonl, config_echo.json
  render    flow.svg (from snapshots.csv in --out)
";

#[derive(Debug, Default)]
struct CliArgs {
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    n: Option<usize>,
    dt: Option<f64>,
    steps: Option<usize>,
    tolerance_scale: Option<f64>,
}

pub fn run(args: &[String]) -> Result<()> {
    let Some(command) = args.first() else {
        print!("{USAGE}");
        return Err(Error::Usage("missing subcommand".into()));
    };
    if command == "--help" || command == "help" {
        print!("{USAGE}");
        return Ok(());
    }
    let cli = parse_flags(&args[1..])?;
    match command.as_str() {
        "analyze" => analyze(&cli),
        "verify" => verify(&cli),
        "simulate" => simulate(&cli),
        "render" => render(&cli),
        other => {
            print!("{USAGE}");
            Err(Error::Usage(format!("unknown subcommand '{other}'")))
        }
    }
}

fn parse_flags(args: &[String]) -> Result<CliArgs> {
    let mut cli = CliArgs::default();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| -> Result<String> {
            it.next().cloned().ok_or_else(|| Error::Usage(format!("{name} needs a value")))
        };
        match flag.as_str() {
            "--config" => cli.config = Some(PathBuf::from(value("--config")?)),
            "--out" => cli.out = Some(PathBuf::from(value("--out")?)),
            "--n" => {
                cli.n = Some(
                    value("--n")?
                        .parse()
                        .map_err(|_| Error::Usage("--n needs an integer".into()))?,
                )
            }
            "--dt" => {
                cli.dt = Some(
                    value("--dt")?
                        .parse()
                        .map_err(|_| Error::Usage("--dt needs a number".into()))?,
                )
            }
            "--steps" => {
                cli.steps = Some(
                    value("--steps")?
                        .parse()
                        .map_err(|_| Error::Usage("--steps needs an integer".into()))?,
                )
            }
            "--tolerance-scale" => {
                cli.tolerance_scale = Some(
                    value("--tolerance-scale")?
                        .parse()
                        .map_err(|_| Error::Usage("--tolerance-scale needs a number".into()))?,
                )
            }
            other => return Err(Error::Usage(format!("unknown flag '{other}'"))),
        }
    }
    Ok(cli)
}

fn require_config(cli: &CliArgs) -> Result<RunConfig> {
    let path =
        cli.config.as_ref().ok_or_else(|| Error::Usage("--config is required".into()))?;
    let mut config = load_config(path)?;
    if let Some(n) = cli.n {
        config.curve.n = n;
    }
    if let Some(dt) = cli.dt {
        config.simulation.dt = dt;
    }
    if let Some(steps) = cli.steps {
        config.simulation.steps = steps;
    }
    config.validate()?;
    Ok(config)
}

fn require_out(cli: &CliArgs) -> Result<&Path> {
    let out = cli.out.as_deref().ok_or_else(|| Error::Usage("--out is required".into()))?;
    std::fs::create_dir_all(out)?;
    Ok(out)
}

#[derive(Serialize)]
struct AnalysisSummary {
    n: usize,
    closed: bool,
    total_length: f64,
    geodesic: bool,
    asymptotic: bool,
    principal: bool,
    max_abs_k_g: f64,
    max_abs_k_n: f64,
    max_abs_tau_g: f64,
    max_raw_normal_component: f64,
}

fn analyze(cli: &CliArgs) -> Result<()> {
    let config = require_config(cli)?;
    let out = require_out(cli)?;
    let surface = Arc::new(config.surface()?);
    let curve = config.curve(surface)?;
    let analysis = curve.analyze(&config.engine_options())?;
    let class = curve::classify(&analysis.scalars, config.tolerances.classify_tol);

    let csv = output::scalars_csv(&curve, &analysis)?;
    std::fs::write(out.join("scalars.csv"), csv)?;

    let max_abs = |f: &[f64]| f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let summary = AnalysisSummary {
        n: curve.len(),
        closed: curve.closed(),
        total_length: analysis.scalars.total_length,
        geodesic: class.geodesic,
        asymptotic: class.asymptotic,
        principal: class.principal,
        max_abs_k_g: max_abs(&analysis.scalars.geodesic_curvature),
        max_abs_k_n: max_abs(&analysis.scalars.normal_curvature),
        max_abs_tau_g: max_abs(&analysis.scalars.geodesic_torsion),
        max_raw_normal_component: analysis.frames.max_raw_normal_component,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    std::fs::write(out.join("analysis.json"), &json)?;
    println!(
        "analyze: n={} L={:.6} geodesic={} asymptotic={} principal={}",
        summary.n, summary.total_length, class.geodesic, class.asymptotic, class.principal
    );
    Ok(())
}

/// What the verification matrix expects of one report.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Expectation {
    /// A true identity: the residual must be inside tolerance.
    Holds,
    /// The negative control: the residual must be large.
    FailsAsNegativeControl,
    /// A variant with a known dropped term: the residual must match the
    /// predicted deviation (which may itself be ~0 on this family).
    MatchesPrediction,
    /// Evaluated and reported; adjudicated, not asserted.
    Adjudicated,
}

struct Checked {
    report: ResidualReport,
    expectation: Expectation,
    ok: bool,
}

fn check(report: ResidualReport, expectation: Expectation) -> Checked {
    let ok = match expectation {
        Expectation::Holds => report.pass,
        Expectation::FailsAsNegativeControl => report.max_residual >= 0.1,
        Expectation::MatchesPrediction => {
            let predicted = report.predicted_deviation.unwrap_or(0.0);
            if predicted <= report.tolerance {
                report.pass
            } else {
                (report.max_residual - predicted).abs() <= report.tolerance.max(0.05 * predicted)
            }
        }
        Expectation::Adjudicated => true,
    };
    Checked { report, expectation, ok }
}

fn family_reports(family: &FramedFamily, n: usize, opts: &AnalyzerOptions) -> Result<Vec<Checked>> {
    let mut out = Vec::new();
    let frame = FamilyFrame::build(family, 0.0, n, opts)?;

    for r in frame.speed_compatibility()? {
        out.push(check(r, Expectation::Holds));
    }
    let inext = frame.inextensibility()?;
    let expectation = if family.inextensible {
        Expectation::Holds
    } else {
        Expectation::FailsAsNegativeControl
    };
    for (k, r) in inext.into_iter().enumerate() {
        let r = if k == 0 && !family.inextensible {
            r.with_note("negative control: expected to fail")
        } else {
            r
        };
        out.push(check(r, expectation));
    }

    let class = curve::classify(&frame.slice.scalars, opts.classify_tol);
    if family.arclength_uniform {
        for r in frame.frame_evolution()? {
            out.push(check(r, Expectation::Holds));
        }
        let se = frame.scalar_evolution()?;
        out.push(check(se.kg_full, Expectation::Holds));
        out.push(check(se.kg_reduced, Expectation::MatchesPrediction));
        out.push(check(se.kn_full, Expectation::Holds));
        out.push(check(se.kn_reduced, Expectation::MatchesPrediction));
        out.push(check(se.taug_full, Expectation::Holds));
        out.push(check(se.taug_reduced, Expectation::MatchesPrediction));
        out.push(check(se.spin_normal, Expectation::Adjudicated));
        out.push(check(se.spin_side_f3, Expectation::Adjudicated));
        out.push(check(se.spin_side_f2, Expectation::Adjudicated));
        if class.geodesic {
            for r in frame.frame_evolution_with(FrameVariant::Geodesic)? {
                out.push(check(r, Expectation::Holds));
            }
        }
        if class.asymptotic {
            for r in frame.frame_evolution_with(FrameVariant::Asymptotic)? {
                out.push(check(r, Expectation::Holds));
            }
        }
    }
    // The frame equations hold at any speed, so the curvature-line forms
    // run on the non-unit-speed control as well.
    if class.principal {
        for r in frame.frame_evolution_with(FrameVariant::CurvatureLine)? {
            out.push(check(r, Expectation::Holds));
        }
    }
    Ok(out)
}

fn verify(cli: &CliArgs) -> Result<()> {
    let out = require_out(cli)?;
    let n = cli.n.unwrap_or(512);
    let opts = AnalyzerOptions {
        dt: cli.dt.unwrap_or(1e-4),
        tolerance_scale: cli.tolerance_scale.unwrap_or(10.0),
        ..AnalyzerOptions::default()
    };
    let fine_opts = AnalyzerOptions { dt: opts.dt / 2.0, ..opts };

    let mut table = String::new();
    let mut all_reports = Vec::new();
    let mut failures = 0usize;
    let mut total = 0usize;
    let _ = writeln!(
        table,
        "{:<26} {:<34} {:>12} {:>12} {:>12} {:>8} {:>22}",
        "family", "identity", "max", "tolerance", "predicted", "ratio", "status"
    );
    for family in builtin_families() {
        family.validate()?;
        let coarse = family_reports(&family, n, &opts)?;
        let fine = family_reports(&family, 2 * n, &fine_opts)?;
        for (c, f) in coarse.into_iter().zip(fine) {
            total += 1;
            let ratio = if f.report.max_residual > 0.0 {
                c.report.max_residual / f.report.max_residual
            } else {
                f64::INFINITY
            };
            // refinement must chop true residuals unless they already sit at
            // the rounding floor of the refined pipeline
            let converged = match c.expectation {
                Expectation::Holds => {
                    f.report.max_residual
                        <= (c.report.max_residual / 3.0).max(f.report.noise_floor)
                }
                _ => true,
            };
            let ok = c.ok && f.ok && converged;
            if !ok {
                failures += 1;
            }
            let status = match (c.expectation, ok) {
                (Expectation::Adjudicated, _) => {
                    if c.report.pass {
                        "holds"
                    } else {
                        "deviates"
                    }
                }
                (Expectation::FailsAsNegativeControl, true) => "fails-as-expected",
                (Expectation::MatchesPrediction, true) => {
                    if c.report.pass {
                        "ok"
                    } else {
                        "deviates-as-predicted"
                    }
                }
                (_, true) => "ok",
                (_, false) => "MISMATCH",
            };
            let _ = writeln!(
                table,
                "{:<26} {:<34} {:>12.3e} {:>12.3e} {:>12} {:>8} {:>22}",
                c.report.family,
                c.report.identity,
                c.report.max_residual,
                c.report.tolerance,
                c.report
                    .predicted_deviation
                    .map_or_else(|| "-".to_string(), |d| format!("{d:.3e}")),
                if ratio.is_finite() { format!("{ratio:.1}") } else { "-".to_string() },
                status
            );
            all_reports.push(c.report);
            all_reports.push(f.report);
        }
    }

    // spin-coupling adjudication on the family with k_g = 0 and psi = 0
    let helix = crate::family::builtin_family("cylinder_breathing_helix").expect("catalog");
    let frame = FamilyFrame::build(&helix, 0.0, n, &opts)?;
    let se = frame.scalar_evolution()?;
    let verdict = |r: &ResidualReport| if r.pass { "holds" } else { "fails" };
    let _ = writeln!(
        table,
        "\nspin-coupling adjudication on {}:\n  normal coupling: {} (residual {:.3e})\n  side coupling, f3 variant: {} (residual {:.3e})\n  side coupling, f2 variant: {} (residual {:.3e})\n  {}",
        helix.name,
        verdict(&se.spin_normal),
        se.spin_normal.max_residual,
        verdict(&se.spin_side_f3),
        se.spin_side_f3.max_residual,
        verdict(&se.spin_side_f2),
        se.spin_side_f2.max_residual,
        if se.spin_side_f3.pass || se.spin_side_f2.pass {
            "a side-coupling variant holds"
        } else {
            "neither side-coupling variant holds; the spin-coupled evolution equations hold with psi measured from the frames"
        }
    );

    std::fs::write(out.join("residuals.json"), output::reports_json(&all_reports))?;
    std::fs::write(out.join("residuals.txt"), &table)?;
    print!("{table}");
    println!("checks: {} ok, {failures} off expectation", total - failures);
    if failures > 0 {
        return Err(Error::VerificationFailed { failures, total });
    }
    Ok(())
}

fn simulate(cli: &CliArgs) -> Result<()> {
    let config = require_config(cli)?;
    let out = require_out(cli)?;
    let surface = Arc::new(config.surface()?);
    let curve = config.curve(surface)?;
    let spec = config.flow_spec()?;
    let sim = config.simulation();
    let engine = config.engine_options();

    std::fs::write(out.join("config_echo.json"), config.canonical_json())?;
    let (snapshots, diagnostics) = flow::run(&curve, &spec, &sim, &engine)?;
    std::fs::write(out.join("snapshots.csv"), output::snapshots_csv(&snapshots)?)?;
    std::fs::write(out.join("diagnostics.jsonl"), output::diagnostics_jsonl(&diagnostics))?;
    let last = diagnostics.rows.last().expect("at least one step");
    println!(
        "simulate: {} steps, final length {:.9}, drift {:.3e}, residual {:.3e}",
        sim.steps, last.length, last.drift, last.residual
    );
    Ok(())
}

fn render(cli: &CliArgs) -> Result<()> {
    let config = require_config(cli)?;
    let out = require_out(cli)?;
    let text = std::fs::read_to_string(out.join("snapshots.csv"))?;
    let curves = output::parse_snapshots_csv(&text, config.curve.closed)?;
    let svg = output::render_svg(&curves)?;
    std::fs::write(out.join("flow.svg"), svg)?;
    println!("render: {} snapshots -> flow.svg", curves.len());
    Ok(())
}
