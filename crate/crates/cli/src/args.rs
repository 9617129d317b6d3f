use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Every numeric default in one place.
pub mod defaults {
    pub const TOL: f64 = 1e-6;
    pub const PROBES: usize = 50;
    pub const STEP: f64 = 1e-4;
    pub const SCALE: f64 = 1.0;
    pub const NODES: usize = 65;
    pub const CELLS: usize = 50;
    pub const DELTA: f64 = 0.25;
    pub const WIDTH: u32 = 640;
    pub const FTC_NODES: usize = 1024;
}

#[derive(Debug, Parser)]
#[command(
    name = "tangenta",
    version,
    about = "Tangents, areas and the curves that connect them"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// JSON object whose keys are flag names; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write outputs into this directory instead of stdout
    /// (falls back to $TANGENTA_OUT).
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified area curve z(x) as a CSV node table.
    Quadratrix(QuadratrixArgs),
    /// Check a theorem and emit a JSON report (exit 1 if it fails).
    #[command(subcommand)]
    Verify(Verify),
    /// Lower, upper, tagged and oscillation sums on a partition.
    Riemann(RiemannArgs),
    /// The string-and-cam integration device.
    #[command(subcommand)]
    Device(Device),
    /// SVG figures.
    #[command(subcommand)]
    Render(Render),
}

#[derive(Debug, Clone, Args)]
pub struct CurveSource {
    /// Curve expression in one variable.
    #[arg(
        long,
        required_unless_present = "curve_file",
        conflicts_with = "curve_file",
        requires = "domain",
        allow_hyphen_values = true
    )]
    pub curve: Option<String>,
    /// Curve as JSON ({"kind": "analytic" | "sampled", ...}).
    #[arg(long, value_name = "FILE")]
    pub curve_file: Option<PathBuf>,
    /// Domain of an inline expression.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum FrameArg {
    #[default]
    Barrow,
    Leibniz,
}

#[derive(Debug, Args)]
pub struct QuadratrixArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Scale length R.
    #[arg(long = "R", alias = "scale", default_value_t = defaults::SCALE)]
    pub r: f64,
    /// Node-table size.
    #[arg(long, default_value_t = defaults::NODES)]
    pub nodes: usize,
    /// Total certified width of the table.
    #[arg(long, default_value_t = defaults::TOL)]
    pub tol: f64,
    /// Naming convention for reported symbols.
    #[arg(long, value_enum, default_value_t = FrameArg::Barrow)]
    pub frame: FrameArg,
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// The tangent to the area curve stays on one side of it.
    Prop11(Prop11Args),
    /// Tagged sum versus area, bounded by the oscillation sum.
    Prop19(Prop19Args),
    /// Tangent increment versus curve increment.
    Leibniz(LeibnizArgs),
    /// Discrete subnormal sums versus half the squared ordinate.
    Subnormal(SubnormalArgs),
    /// R·z'(x) = y(x) at grid points.
    Ftc(FtcArgs),
}

#[derive(Debug, Args)]
pub struct ReportOpts {
    /// Naming convention for reported symbols.
    #[arg(long, value_enum, default_value_t = FrameArg::Barrow)]
    pub frame: FrameArg,
}

#[derive(Debug, Args)]
pub struct Prop11Args {
    #[command(flatten)]
    pub source: CurveSource,
    /// Scale length R.
    #[arg(long = "R", alias = "scale", default_value_t = defaults::SCALE)]
    pub r: f64,
    /// Point of tangency (default: domain midpoint).
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    /// Uniform probes across the domain.
    #[arg(long, default_value_t = defaults::PROBES)]
    pub probes: usize,
    #[command(flatten)]
    pub report: ReportOpts,
}

#[derive(Debug, Args)]
pub struct Prop19Args {
    #[command(flatten)]
    pub source: CurveSource,
    /// Scale length R.
    #[arg(long = "R", alias = "scale", default_value_t = defaults::SCALE)]
    pub r: f64,
    /// Uniform cells.
    #[arg(long, default_value_t = defaults::CELLS)]
    pub cells: usize,
    /// Tag position in each cell, 0 = left endpoint.
    #[arg(long, default_value_t = 0.0)]
    pub tag: f64,
    #[command(flatten)]
    pub report: ReportOpts,
}

#[derive(Debug, Args)]
pub struct LeibnizArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Scale length a.
    #[arg(long = "a", alias = "R", default_value_t = defaults::SCALE)]
    pub a: f64,
    /// Point of tangency.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    /// Step Δ from x0 to the second ordinate.
    #[arg(long, default_value_t = defaults::DELTA)]
    pub delta: f64,
    #[command(flatten)]
    pub report: ReportOpts,
}

#[derive(Debug, Args)]
pub struct SubnormalArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Uniform cells.
    #[arg(long, default_value_t = defaults::CELLS)]
    pub cells: usize,
    #[command(flatten)]
    pub report: ReportOpts,
}

#[derive(Debug, Args)]
pub struct FtcArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Scale length R.
    #[arg(long = "R", alias = "scale", default_value_t = defaults::SCALE)]
    pub r: f64,
    /// Certification tolerance.
    #[arg(long, default_value_t = defaults::TOL)]
    pub tol: f64,
    /// Interior grid points.
    #[arg(long, default_value_t = defaults::PROBES)]
    pub probes: usize,
    /// Node-table cells; central differences use the node spacing.
    #[arg(long, default_value_t = defaults::FTC_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub report: ReportOpts,
}

#[derive(Debug, Args)]
pub struct RiemannArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Uniform cells over the domain (ignored with --nodes).
    #[arg(long, default_value_t = defaults::CELLS)]
    pub cells: usize,
    /// Explicit partition nodes.
    #[arg(long, num_args = 2.., allow_negative_numbers = true)]
    pub nodes: Option<Vec<f64>>,
    /// Tag position in each cell for the tagged sum.
    #[arg(long)]
    pub tag: Option<f64>,
    /// Also certify the area to this tolerance.
    #[arg(long)]
    pub certify: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Device {
    /// Cam profile for a slope law, as curve JSON.
    Cam(CamArgs),
    /// Run the device on a slope law or a cam file; trace CSV.
    Simulate(SimulateArgs),
    /// Constant cam tracing a tractrix; trace CSV.
    Tractrix(TractrixArgs),
    /// Cam for f/a, run, and compare with the area curve; JSON report.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Args)]
pub struct Span {
    /// Total string length U.
    #[arg(long = "U", alias = "length")]
    pub u: f64,
    /// First abscissa of the run.
    #[arg(long)]
    pub from: f64,
    /// Last abscissa of the run.
    #[arg(long)]
    pub to: f64,
}

#[derive(Debug, Args)]
pub struct CamArgs {
    #[command(flatten)]
    pub source: CurveSource,
    #[command(flatten)]
    pub span: Span,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Slope law w(x).
    #[arg(long, conflicts_with = "cam_file", allow_hyphen_values = true, requires = "domain")]
    pub curve: Option<String>,
    /// Slope law as curve JSON.
    #[arg(long, value_name = "FILE", conflicts_with = "cam_file")]
    pub curve_file: Option<PathBuf>,
    /// Domain of an inline slope law.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    /// Cam curve JSON, as written by `device cam`.
    #[arg(long, value_name = "FILE")]
    pub cam_file: Option<PathBuf>,
    #[command(flatten)]
    pub span: Span,
    /// RK4 step in x.
    #[arg(long, default_value_t = defaults::STEP)]
    pub step: f64,
    /// Slope sign, +1 or -1.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Pen height at the first abscissa.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z0: f64,
}

#[derive(Debug, Args)]
pub struct TractrixArgs {
    /// String segment TC = U − ET.
    #[arg(long)]
    pub a: f64,
    /// Total string length (default 2a).
    #[arg(long = "U", alias = "length")]
    pub u: Option<f64>,
    /// First abscissa of the run.
    #[arg(long)]
    pub from: f64,
    /// Last abscissa of the run.
    #[arg(long)]
    pub to: f64,
    /// RK4 step in x.
    #[arg(long, default_value_t = defaults::STEP)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Scale length a.
    #[arg(long = "a", alias = "R", default_value_t = defaults::SCALE)]
    pub a: f64,
    #[command(flatten)]
    pub span: Span,
    /// Allowed gap between pen height and area curve.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// RK4 step in x.
    #[arg(long, default_value_t = defaults::STEP)]
    pub step: f64,
}

#[derive(Debug, Subcommand)]
pub enum Render {
    /// Area curve, tangent and characteristic triangle.
    Barrow(FigureArgs),
    /// Tangent point versus curve point on the same ordinate.
    Leibniz(FigureArgs),
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Scale length (R or a).
    #[arg(long = "R", alias = "a", default_value_t = defaults::SCALE)]
    pub r: f64,
    /// Point of tangency.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    /// Step Δ from x0 to the second ordinate.
    #[arg(long, default_value_t = defaults::DELTA)]
    pub delta: f64,
    /// Image width in pixels.
    #[arg(long, default_value_t = defaults::WIDTH)]
    pub width: u32,
    /// Draw rotated by 180°.
    #[arg(long)]
    pub rotated: bool,
}
