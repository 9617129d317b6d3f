use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;
use tangenta_core::diagram::{barrow_figure, leibniz_figure, render_svg};
use tangenta_core::quadrature::{
    certify_area, darboux_sums, ftc_check_with, quadratrix, tagged_sum, to_leibniz_frame, verify_leibniz_tangency,
    verify_prop11, verify_prop19, verify_subnormal_area, Frame, FtcOptions, Partition, TheoremReport,
};
use tangenta_core::tractional::{
    cam_from_slope_law, simulate_device, tractrix_cam, tractrix_closed_form, verify_device_quadrature_with, CamCurve,
    DeviceConfig, TractionalError,
};
use tangenta_core::PlaneCurve;

use crate::args::{Cli, Command, CurveSource, Device, FrameArg, Render, ReportOpts, Verify};
use crate::error::CliError;

pub const OUT_ENV: &str = "TANGENTA_OUT";

/// Where results go: stdout, or named files in a directory.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(flag: Option<PathBuf>) -> Self {
        let dir = flag.or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
        Sink { dir }
    }

    fn emit(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        match &self.dir {
            None => {
                let mut out = std::io::stdout().lock();
                match out.write_all(bytes).and_then(|_| out.flush()) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    r => r.map_err(|source| CliError::Output {
                        path: "<stdout>".into(),
                        source,
                    }),
                }
            }
            Some(dir) => {
                let path = dir.join(name);
                let err = |source| CliError::Output {
                    path: path.display().to_string(),
                    source,
                };
                fs::create_dir_all(dir).map_err(err)?;
                fs::write(&path, bytes).map_err(|source| CliError::Output {
                    path: path.display().to_string(),
                    source,
                })?;
                println!("{}", path.display());
                Ok(())
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_curve_parts(curve: Option<&str>, file: Option<&Path>, domain: Option<&[f64]>) -> Result<PlaneCurve, CliError> {
    match (curve, file) {
        (Some(text), None) => {
            let d = domain.ok_or_else(|| CliError::Usage("--curve needs --domain LO HI".into()))?;
            Ok(PlaneCurve::parse(text, d[0], d[1])?)
        }
        (None, Some(path)) => {
            let c: PlaneCurve = serde_json::from_str(&read(path)?)
                .map_err(|e| CliError::Usage(format!("invalid curve JSON in {}: {e}", path.display())))?;
            match domain {
                Some(d) => Ok(c.restrict(d[0], d[1])?),
                None => Ok(c),
            }
        }
        _ => Err(CliError::Usage("give exactly one of --curve or --curve-file".into())),
    }
}

fn load_curve(s: &CurveSource) -> Result<PlaneCurve, CliError> {
    load_curve_parts(s.curve.as_deref(), s.curve_file.as_deref(), s.domain.as_deref())
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

fn finish_report(sink: &Sink, name: &str, report: TheoremReport, opts: Option<&ReportOpts>) -> Result<u8, CliError> {
    let report = match opts.map(|o| o.frame) {
        Some(FrameArg::Leibniz) => to_leibniz_frame(&report),
        _ => report,
    };
    let mut text = report.to_json();
    text.push('\n');
    sink.emit(&format!("{name}.json"), text.as_bytes())?;
    Ok(if report.holds() { 0 } else { 1 })
}

fn json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s.into_bytes()
}

/// Run a parsed command; the returned code is 0 or 1 (verdict fails).
pub fn run(cli: Cli) -> Result<u8, CliError> {
    let sink = Sink::new(cli.out_dir);
    match cli.command {
        Command::Quadratrix(a) => {
            let y = load_curve(&a.source)?;
            let q = quadratrix(&y, a.r, a.nodes, a.tol)?;
            let frame = match a.frame {
                FrameArg::Barrow => Frame::Barrow,
                FrameArg::Leibniz => Frame::Leibniz,
            };
            sink.emit("quadratrix.csv", q.to_csv_in(frame).as_bytes())?;
            Ok(0)
        }
        Command::Verify(v) => verify(&sink, v),
        Command::Riemann(a) => {
            let y = load_curve(&a.source)?;
            let (lo, hi) = y.domain();
            let p = match a.nodes {
                Some(nodes) => Partition::from_nodes(nodes)?,
                None => Partition::uniform(lo, hi, a.cells)?,
            };
            let sums = darboux_sums(&y, &p)?;
            let mut out = json!({
                "cells": p.cells(),
                "interval": [p.interval().0, p.interval().1],
                "lower": sums.lower(),
                "upper": sums.upper(),
                "oscillation": sums.oscillation(),
            });
            if let Some(eps) = a.tag {
                let tagged = p.clone().with_uniform_tag(eps)?;
                out["tag"] = json!(eps);
                out["tagged_sum"] = json!(tagged_sum(&y, &tagged)?);
            }
            if let Some(tol) = a.certify {
                let (l, r) = p.interval();
                out["certified"] = serde_json::to_value(certify_area(&y, l, r, tol)?).expect("plain numbers");
            }
            sink.emit("riemann.json", &json_bytes(&out))?;
            Ok(0)
        }
        Command::Device(d) => device(&sink, d),
        Command::Render(r) => {
            let (args, name) = match &r {
                Render::Barrow(a) => (a, "barrow"),
                Render::Leibniz(a) => (a, "leibniz"),
            };
            let y = load_curve(&args.source)?;
            let scene = match r {
                Render::Barrow(_) => barrow_figure(&y, args.r, args.x0, args.delta)?,
                Render::Leibniz(_) => leibniz_figure(&y, args.r, args.x0, args.delta)?,
            };
            let scene = if args.rotated { scene.rotated() } else { scene };
            sink.emit(&format!("{name}.svg"), &render_svg(&scene, args.width))?;
            Ok(0)
        }
    }
}

fn verify(sink: &Sink, v: Verify) -> Result<u8, CliError> {
    match v {
        Verify::Prop11(a) => {
            let y = load_curve(&a.source)?;
            let (lo, hi) = y.domain();
            let x0 = a.x0.unwrap_or(0.5 * (lo + hi));
            let r = verify_prop11(&y, a.r, x0, &uniform(lo, hi, a.probes))?;
            finish_report(sink, "prop11", r, Some(&a.report))
        }
        Verify::Prop19(a) => {
            let y = load_curve(&a.source)?;
            let (lo, hi) = y.domain();
            let p = Partition::uniform(lo, hi, a.cells)?.with_uniform_tag(a.tag)?;
            let r = verify_prop19(&y, a.r, &p)?;
            finish_report(sink, "prop19", r, Some(&a.report))
        }
        Verify::Leibniz(a) => {
            let y = load_curve(&a.source)?;
            let r = verify_leibniz_tangency(&y, a.a, a.x0, a.delta)?;
            finish_report(sink, "leibniz", r, Some(&a.report))
        }
        Verify::Subnormal(a) => {
            let y = load_curve(&a.source)?;
            let (lo, hi) = y.domain();
            let r = verify_subnormal_area(&y, &Partition::uniform(lo, hi, a.cells)?)?;
            finish_report(sink, "subnormal", r, Some(&a.report))
        }
        Verify::Ftc(a) => {
            let y = load_curve(&a.source)?;
            let (lo, hi) = y.domain();
            // interior grid, clear of the edges by one spacing
            let n = a.probes;
            let grid: Vec<f64> = (0..n)
                .map(|i| lo + (hi - lo) * ((i + 1) as f64 / (n + 1) as f64))
                .collect();
            let r = ftc_check_with(&y, a.r, &grid, a.tol, FtcOptions { nodes: a.nodes })?;
            finish_report(sink, "ftc", r, Some(&a.report))
        }
    }
}

fn emit_trace(sink: &Sink, result: Result<tangenta_core::DeviceTrace, TractionalError>) -> Result<u8, CliError> {
    match result {
        Ok(trace) => {
            sink.emit("trace.csv", trace.to_csv().as_bytes())?;
            Ok(0)
        }
        Err(TractionalError::Truncated { trace, stopped_at, x }) => {
            sink.emit("trace.csv", trace.to_csv().as_bytes())?;
            Err(TractionalError::Truncated { trace, stopped_at, x }.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn device(sink: &Sink, d: Device) -> Result<u8, CliError> {
    match d {
        Device::Cam(a) => {
            let w = load_curve(&a.source)?;
            let cam = cam_from_slope_law(&w, a.span.u, a.span.from, a.span.to)?;
            let v = serde_json::to_value(&cam).expect("curves serialize");
            sink.emit("cam.json", &json_bytes(&v))?;
            Ok(0)
        }
        Device::Simulate(a) => {
            let cam: CamCurve = match (&a.cam_file, &a.curve, &a.curve_file) {
                (Some(path), None, None) => serde_json::from_str(&read(path)?)
                    .map_err(|e| CliError::Usage(format!("invalid cam JSON in {}: {e}", path.display())))?,
                (None, curve, file) if curve.is_some() || file.is_some() => {
                    let w = load_curve_parts(curve.as_deref(), file.as_deref(), a.domain.as_deref())?;
                    cam_from_slope_law(&w, a.span.u, a.span.from, a.span.to)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "give one of --cam-file, --curve or --curve-file".into(),
                    ))
                }
            };
            let cfg = DeviceConfig {
                step: a.step,
                sigma: a.sigma,
                z0: a.z0,
                ..DeviceConfig::new(a.span.u, a.span.from, a.span.to)
            };
            emit_trace(sink, simulate_device(&cam, &cfg))
        }
        Device::Tractrix(a) => {
            let u = a.u.unwrap_or(2.0 * a.a);
            let cam = tractrix_cam(a.a, u, a.from, a.to)?;
            let cfg = DeviceConfig {
                step: a.step,
                z0: tractrix_closed_form(a.a, a.from)?,
                ..DeviceConfig::new(u, a.from, a.to)
            };
            emit_trace(sink, simulate_device(&cam, &cfg))
        }
        Device::Roundtrip(a) => {
            let f = load_curve(&a.source)?;
            let r = verify_device_quadrature_with(&f, a.a, a.span.u, a.span.from, a.span.to, a.tol, a.step)?;
            finish_report(sink, "roundtrip", r, None)
        }
    }
}
