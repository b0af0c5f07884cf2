//! The `tm-spectra` command line.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::autocorr::{correlation_exponent, eta_table, lambda1, theta_growth};
use crate::bracket::Bracket;
use crate::combinatorics::{forbidden_automaton, markov_check, SingularityCoding};
use crate::dyadic::DyadicWord;
use crate::error::{Error, Result};
use crate::measure::{cylinder_measure, density_at, partial_product, DEFAULT_BUFFER};
use crate::param::CircleParameter;
use crate::pressure::{pressure_curve_with, PressureMode, DEFAULT_GRID_DEPTH};
use crate::sequence::tm_prefix;
use crate::spectra::{
    birkhoff_spectrum, default_t_grid, dimension_spectrum, fourier_dimension_with, linspace, lq_spectrum,
    q_r, quantization_dimension, spectral_dimension, LegendreCurve, Pipeline, SpectrumCurve,
    FOURIER_THETA_KMAX,
};
use crate::verify::run_checks;

use config::{parse_grid, parse_parameters, ConfigFile};
use output::{cell, Record, Report};

#[derive(Parser, Debug)]
#[command(
    name = "tm-spectra",
    version,
    about = "Spectral and fractal quantities of generalized Thue-Morse measures"
)]
pub struct Cli {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for the randomized checks of `verify`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Lq,
    Birkhoff,
    Dimension,
    Fourier,
    Quantization,
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PipelineArg {
    Measure,
    Pressure,
}

macro_rules! value_enum_from_str {
    ($($t:ty),*) => {$(
        impl std::str::FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                <$t as ValueEnum>::from_str(s, true)
            }
        }
    )*};
}
value_enum_from_str!(Format, Kind, PipelineArg);

#[derive(Subcommand, Debug)]
enum Command {
    /// Prefix of the sequence t_n = phase^{s_2(n)}.
    Sequence(SequenceArgs),
    /// Autocorrelation coefficients, or dyadic partial sums of their squares.
    Eta(EtaArgs),
    /// Dominant eigenvalue and correlation exponent.
    D2(D2Args),
    /// Riesz product coefficients, density, or cylinder masses.
    Riesz(RieszArgs),
    /// Partition pressure brackets.
    Pressure(PressureArgs),
    /// Admissible words avoiding the singularity coding.
    Words(WordsArgs),
    /// L^q, Birkhoff, dimension spectra and derived dimensions.
    Spectrum(SpectrumArgs),
    /// Cross-method consistency checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SequenceArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    length: Option<usize>,
}

#[derive(Args, Debug)]
struct EtaArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Largest index; with --theta, sums run to the largest power of two not above it.
    #[arg(long)]
    max: Option<usize>,
    #[arg(long)]
    theta: bool,
}

#[derive(Args, Debug)]
struct D2Args {
    /// A value, a list `x,y`, or a range `a:b:n`.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
}

#[derive(Args, Debug)]
struct RieszArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    order: Option<u32>,
    /// Density at these points (grid spec).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "cylinder")]
    at: Option<String>,
    /// Mass of this cylinder, a binary word.
    #[arg(long)]
    cylinder: Option<String>,
    #[arg(long)]
    buffer: Option<u32>,
}

#[derive(Args, Debug)]
struct PressureArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    restrict: Option<u32>,
    #[arg(long)]
    grid_depth: Option<u32>,
}

#[derive(Args, Debug)]
struct WordsArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    m: Option<u32>,
    /// Word length to count.
    #[arg(long)]
    count: Option<u32>,
    #[arg(long)]
    markov_check: bool,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Exponent grid for quantization (grid spec).
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long)]
    depth: Option<u32>,
    /// q grid for lq, quantization and spectral; t grid for birkhoff and dimension.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// alpha grid for birkhoff and dimension.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, value_enum)]
    pipeline: Option<PipelineArg>,
    /// Also write `c lambda1 d2` columns over c in [0, 1] to this file.
    #[arg(long)]
    emit_plotdata: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    quick: bool,
}

/// Failure of a run, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("{0}")]
    Io(String),
    #[error("{0} of {1} checks failed")]
    ChecksFailed(usize, usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(Error::PrecisionGuard(_)) => 2,
            CliError::Compute(Error::Invariant(_)) => 3,
            CliError::Compute(_) | CliError::Io(_) => 1,
            CliError::ChecksFailed(..) => 4,
        }
    }
}

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Globals {
    format: Option<Format>,
    seed: u64,
    output: Option<PathBuf>,
}

fn execute(cli: &Cli) -> std::result::Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let globals = Globals {
        format: cfg.pick(cli.format, "format")?,
        seed: cfg.pick(cli.seed, "seed")?.unwrap_or(0),
        output: cfg.pick(cli.output.clone(), "output")?,
    };
    let workers = cfg.pick(cli.workers, "workers")?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::InvalidArgument("--workers must be positive".into()).into());
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::ResourceLimit(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(&cli.command, &cfg, &globals))
}

fn dispatch(cmd: &Command, cfg: &ConfigFile, g: &Globals) -> std::result::Result<(), CliError> {
    let text = match cmd {
        Command::Verify(a) => return verify(a, cfg, g),
        Command::Sequence(a) => render(&sequence(a, cfg)?, g),
        Command::Eta(a) => render(&eta(a, cfg)?, g),
        Command::D2(a) => render(&d2(a, cfg)?, g),
        Command::Riesz(a) => render(&riesz(a, cfg)?, g),
        Command::Pressure(a) => render(&pressure(a, cfg)?, g),
        Command::Words(a) => render(&words(a, cfg)?, g),
        Command::Spectrum(a) => render(&spectrum(a, cfg)?, g),
    };
    emit(&text, g)
}

fn render(rep: &Report, g: &Globals) -> String {
    match g.format.unwrap_or(Format::Json) {
        Format::Csv => rep.to_csv(),
        Format::Json => rep.to_json(),
    }
}

fn emit(text: &str, g: &Globals) -> std::result::Result<(), CliError> {
    match &g.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn single_parameter(flag: &Option<String>, cfg: &ConfigFile) -> Result<CircleParameter> {
    let spec = cfg
        .pick(flag.clone(), "c")?
        .ok_or_else(|| Error::InvalidArgument("--c is required".into()))?;
    let mut ps = parse_parameters(&spec)?;
    if ps.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "expected a single value of c, got {spec:?}"
        )));
    }
    Ok(ps.remove(0))
}

fn grid_or(flag: &Option<String>, cfg: &ConfigFile, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
    match cfg.pick(flag.clone(), key)? {
        Some(spec) => parse_grid(&spec),
        None => Ok(default),
    }
}

fn sequence(a: &SequenceArgs, cfg: &ConfigFile) -> Result<Report> {
    let p = single_parameter(&a.c, cfg)?;
    let len = cfg.pick(a.length, "length")?.unwrap_or(32);
    let seq = tm_prefix(&p, len)?;
    let c = Some(p.to_string());
    let mut rep = Report::new("sequence", &["n", "re", "im"]);
    for (n, t) in seq.values().iter().enumerate() {
        rep.row(vec![n.to_string(), cell(t.re), cell(t.im)]);
        rep.push(Record::exact("t.re", c.clone(), t.re).param("n", n));
        rep.push(Record::exact("t.im", c.clone(), t.im).param("n", n));
    }
    Ok(rep)
}

fn eta(a: &EtaArgs, cfg: &ConfigFile) -> Result<Report> {
    let p = single_parameter(&a.c, cfg)?;
    let max = cfg.pick(a.max, "max")?.unwrap_or(32);
    let c = Some(p.to_string());
    if cfg.switch(a.theta, "theta")? {
        if max < 4 {
            return Err(Error::InvalidArgument("--theta needs --max >= 4".into()));
        }
        let kmax = max.ilog2();
        let growth = theta_growth(&p, kmax)?;
        let mut rep = Report::new("eta", &["k", "theta", "slope"]);
        let mut prev: Option<f64> = None;
        for &(k, theta) in &growth.points {
            let slope = prev.map(|t0| theta.log2() - t0.log2());
            rep.row(vec![
                k.to_string(),
                cell(theta),
                slope.map(cell).unwrap_or_default(),
            ]);
            let mut r = Record::exact("theta", c.clone(), theta).param("k", k);
            if let Some(s) = slope {
                r = r.meta("slope", output::number(s));
            }
            rep.push(r);
            prev = Some(theta);
        }
        rep.push(
            Record::exact("theta_slope", c, growth.slope)
                .param("kmax", kmax)
                .meta("window", format!("[{}, {kmax}]", kmax / 2))
                .meta("local_slope", output::number(growth.local_slope)),
        );
        return Ok(rep);
    }
    let table = eta_table(&p, max)?;
    let mut rep = Report::new("eta", &["n", "re", "im"]);
    for (n, e) in table.values().iter().enumerate() {
        rep.row(vec![n.to_string(), cell(e.re), cell(e.im)]);
        rep.push(Record::exact("eta.re", c.clone(), e.re).param("n", n));
        rep.push(Record::exact("eta.im", c.clone(), e.im).param("n", n));
    }
    Ok(rep)
}

fn d2(a: &D2Args, cfg: &ConfigFile) -> Result<Report> {
    let spec = cfg
        .pick(a.c.clone(), "c")?
        .ok_or_else(|| Error::InvalidArgument("--c is required".into()))?;
    let mut rep = Report::new("d2", &["c", "lambda1_lo", "lambda1_hi", "d2_lo", "d2_hi"]);
    for p in parse_parameters(&spec)? {
        let l = lambda1(&p)?;
        let d = correlation_exponent(&p)?;
        let c = p.to_string();
        rep.row(vec![
            c.clone(),
            cell(l.lo()),
            cell(l.hi()),
            cell(d.lo()),
            cell(d.hi()),
        ]);
        rep.push(Record::new("lambda1", Some(c.clone()), l));
        rep.push(Record::new("d2", Some(c), d));
    }
    Ok(rep)
}

fn riesz(a: &RieszArgs, cfg: &ConfigFile) -> Result<Report> {
    let p = single_parameter(&a.c, cfg)?;
    let order = cfg.pick(a.order, "order")?.unwrap_or(10);
    let buffer = cfg.pick(a.buffer, "buffer")?.unwrap_or(DEFAULT_BUFFER);
    let c = Some(p.to_string());
    let at = cfg.pick(a.at.clone(), "at")?;
    let cyl = cfg.pick(a.cylinder.clone(), "cylinder")?;
    if at.is_some() && cyl.is_some() {
        return Err(Error::InvalidArgument("--at and --cylinder are exclusive".into()));
    }
    if let Some(w) = cyl {
        let w: DyadicWord = w.parse()?;
        let m = cylinder_measure(&p, &w, buffer)?;
        let mut rep = Report::new("riesz", &["w", "lo", "hi"]);
        rep.row(vec![w.to_string(), cell(m.estimate.lo()), cell(m.estimate.hi())]);
        let window = m.gibbs_window();
        rep.push(
            Record::new("cylinder_measure", c, m.estimate)
                .param("w", w.to_string())
                .param("buffer", buffer)
                .meta("gibbs_lo", output::number(window.lo()))
                .meta("gibbs_hi", output::number(window.hi()))
                .meta("clamped", m.clamped),
        );
        return Ok(rep);
    }
    let pp = partial_product(&p, order)?;
    if let Some(spec) = at {
        let mut rep = Report::new("riesz", &["x", "density"]);
        for x in parse_grid(&spec)? {
            let d = density_at(&pp, x)?;
            rep.row(vec![cell(x), cell(d)]);
            rep.push(
                Record::exact("density", c.clone(), d)
                    .param("x", x)
                    .param("order", order),
            );
        }
        return Ok(rep);
    }
    let mut rep = Report::new("riesz", &["m", "re", "im"]);
    for (m, z) in pp.nonnegative_coefficients().iter().enumerate() {
        rep.row(vec![m.to_string(), cell(z.re), cell(z.im)]);
        rep.push(
            Record::exact("coefficient.re", c.clone(), z.re)
                .param("m", m)
                .param("order", order),
        );
        rep.push(
            Record::exact("coefficient.im", c.clone(), z.im)
                .param("m", m)
                .param("order", order),
        );
    }
    Ok(rep)
}

fn pressure(a: &PressureArgs, cfg: &ConfigFile) -> Result<Report> {
    let p = single_parameter(&a.c, cfg)?;
    let ts = grid_or(&a.t, cfg, "t", default_t_grid())?;
    let depth = cfg.pick(a.depth, "depth")?.unwrap_or(12);
    let restrict = cfg.pick(a.restrict, "restrict")?;
    let b = cfg
        .pick(a.grid_depth, "grid-depth")?
        .unwrap_or(DEFAULT_GRID_DEPTH);
    let curve = pressure_curve_with(&p, &ts, depth, b, restrict)?;
    let c = Some(p.to_string());
    let mut rep = Report::new("pressure", &["t", "lo", "hi", "depth", "mode"]);
    for (&t, v) in curve.arguments().iter().zip(curve.values()) {
        let mode = PressureMode::for_t(t);
        rep.row(vec![
            cell(t),
            cell(v.lo()),
            cell(v.hi()),
            depth.to_string(),
            mode.to_string(),
        ]);
        let mut r = Record::new("pressure", c.clone(), *v)
            .param("t", t)
            .param("depth", depth)
            .param("grid_depth", b)
            .meta("mode", mode.to_string())
            .meta("provenance", curve.provenance().to_string());
        if let Some(m) = restrict {
            r = r.param("restrict", m);
        }
        rep.push(r);
    }
    attach_diagnostics(&mut rep, curve.diagnostics());
    Ok(rep)
}

fn attach_diagnostics(rep: &mut Report, notes: &[String]) {
    if notes.is_empty() {
        return;
    }
    for r in &mut rep.records {
        r.meta.insert("diagnostics".into(), notes.to_vec().into());
    }
}

fn words(a: &WordsArgs, cfg: &ConfigFile) -> Result<Report> {
    let p = single_parameter(&a.c, cfg)?;
    let m = cfg.pick(a.m, "m")?.unwrap_or(4);
    let n = cfg.pick(a.count, "count")?.unwrap_or(10);
    let coding = SingularityCoding::new(&p, m as usize + 2)?;
    let aut = forbidden_automaton(&coding, m)?;
    let count = aut.count_words(n);
    let c = Some(p.to_string());
    let forbidden: Vec<String> = aut
        .forbidden()
        .iter()
        .map(|&w| DyadicWord::from_index(w, m + 1).to_string())
        .collect();
    let mut rep = Report::new(
        "words",
        &[
            "m",
            "n",
            "count",
            "states",
            "irreducible",
            "period",
            "aperiodic",
            "spectral_radius",
        ],
    );
    rep.push(
        Record::exact("admissible_words", c.clone(), count as f64)
            .param("m", m)
            .param("n", n)
            .meta("exact", count.to_string())
            .meta("forbidden", forbidden)
            .meta("states", aut.states().len()),
    );
    let mut row = vec![
        m.to_string(),
        n.to_string(),
        count.to_string(),
        aut.states().len().to_string(),
    ];
    if cfg.switch(a.markov_check, "markov-check")? {
        let report = markov_check(&aut);
        rep.push(
            Record::exact("spectral_radius", c, report.spectral_radius)
                .param("m", m)
                .meta("essential_states", report.essential_states)
                .meta("irreducible", report.irreducible)
                .meta("period", report.period)
                .meta("aperiodic", report.aperiodic),
        );
        row.extend([
            report.irreducible.to_string(),
            report.period.to_string(),
            report.aperiodic.to_string(),
            cell(report.spectral_radius),
        ]);
    } else {
        row.extend(std::iter::repeat_n(String::new(), 4));
    }
    rep.row(row);
    Ok(rep)
}

fn spectrum(a: &SpectrumArgs, cfg: &ConfigFile) -> Result<Report> {
    let p = single_parameter(&a.c, cfg)?;
    let kind = cfg.pick(a.kind, "kind")?.unwrap_or(Kind::Lq);
    let pipeline = match cfg.pick(a.pipeline, "pipeline")?.unwrap_or(PipelineArg::Measure) {
        PipelineArg::Measure => Pipeline::MeasurePartition,
        PipelineArg::Pressure => Pipeline::PressurePartition,
    };
    if let Some(path) = cfg.pick(a.emit_plotdata.clone(), "emit-plotdata")? {
        write_plotdata(&path)?;
    }
    let c = Some(p.to_string());
    let depth = cfg.pick(a.depth, "depth")?;
    match kind {
        Kind::Lq => {
            let n = depth.unwrap_or(10);
            let qs = grid_or(&a.grid, cfg, "grid", linspace(0.0, 4.0, 17))?;
            let curve = lq_spectrum(&p, &qs, n, pipeline)?;
            Ok(curve_report("beta", "q", &curve, c, n))
        }
        Kind::Birkhoff | Kind::Dimension => {
            let n = depth.unwrap_or(12);
            let ts = grid_or(&a.grid, cfg, "grid", default_t_grid())?;
            let alphas = cfg
                .pick(a.alpha.clone(), "alpha")?
                .map(|s| parse_grid(&s))
                .transpose()?;
            let (name, curve) = if kind == Kind::Birkhoff {
                ("birkhoff", birkhoff_spectrum(&p, alphas.as_deref(), &ts, n)?)
            } else {
                ("dimension", dimension_spectrum(&p, alphas.as_deref(), &ts, n)?)
            };
            Ok(legendre_report(name, &curve, c, n))
        }
        Kind::Fourier => {
            let n = depth.unwrap_or(crate::spectra::FOURIER_PRESSURE_DEPTH);
            let routes = fourier_dimension_with(&p, n, FOURIER_THETA_KMAX)?;
            let mut rep = Report::new("spectrum", &["route", "lo", "hi"]);
            for (route, v) in [
                ("eigen", routes.eigen_route),
                ("pressure", routes.pressure_route),
                ("theta", routes.theta_route),
            ] {
                rep.row(vec![route.into(), cell(v.lo()), cell(v.hi())]);
                rep.push(
                    Record::new("fourier_dimension", c.clone(), v)
                        .param("route", route)
                        .param("depth", n)
                        .param("kmax", FOURIER_THETA_KMAX),
                );
            }
            Ok(rep)
        }
        Kind::Quantization => {
            let n = depth.unwrap_or(10);
            let qs = grid_or(&a.grid, cfg, "grid", linspace(0.0, 1.0, 41))?;
            let rs = grid_or(&a.r, cfg, "r", vec![2.0])?;
            let curve = lq_spectrum(&p, &qs, n, pipeline)?;
            let mut rep = Report::new("spectrum", &["r", "q_r_lo", "q_r_hi", "d_lo", "d_hi"]);
            for r in rs {
                let d = quantization_dimension(&curve, r)?;
                let q = if p.is_zero() {
                    Bracket::point(0.0)
                } else {
                    q_r(&curve, r)?
                };
                rep.row(vec![
                    cell(r),
                    cell(q.lo()),
                    cell(q.hi()),
                    cell(d.lo()),
                    cell(d.hi()),
                ]);
                rep.push(Record::new("q_r", c.clone(), q).param("r", r).param("depth", n));
                rep.push(
                    Record::new("quantization_dimension", c.clone(), d)
                        .param("r", r)
                        .param("depth", n),
                );
            }
            Ok(rep)
        }
        Kind::Spectral => {
            let n = depth.unwrap_or(10);
            let qs = grid_or(&a.grid, cfg, "grid", linspace(0.0, 1.0, 41))?;
            let curve = lq_spectrum(&p, &qs, n, pipeline)?;
            let s = spectral_dimension(&curve)?;
            let mut rep = Report::new("spectrum", &["quantity", "lo", "hi"]);
            rep.row(vec!["spectral_dimension".into(), cell(s.lo()), cell(s.hi())]);
            rep.push(
                Record::new("spectral_dimension", c, s)
                    .param("depth", n)
                    .meta("provenance", curve.provenance().to_string()),
            );
            Ok(rep)
        }
    }
}

fn curve_report(
    quantity: &str,
    arg: &'static str,
    curve: &SpectrumCurve,
    c: Option<String>,
    n: u32,
) -> Report {
    let mut rep = Report::new("spectrum", &[arg, "lo", "hi"]);
    for (&x, v) in curve.arguments().iter().zip(curve.values()) {
        rep.row(vec![cell(x), cell(v.lo()), cell(v.hi())]);
        rep.push(
            Record::new(quantity, c.clone(), *v)
                .param(arg, x)
                .param("depth", n)
                .meta("provenance", curve.provenance().to_string()),
        );
    }
    attach_diagnostics(&mut rep, curve.diagnostics());
    rep
}

fn legendre_report(quantity: &str, curve: &LegendreCurve, c: Option<String>, n: u32) -> Report {
    let mut rep = Report::new("spectrum", &["alpha", "lo", "hi", "flagged"]);
    for ((&x, v), &flag) in curve.alphas.iter().zip(&curve.values).zip(&curve.flagged) {
        rep.row(vec![cell(x), cell(v.lo()), cell(v.hi()), flag.to_string()]);
        rep.push(
            Record::new(quantity, c.clone(), *v)
                .param("alpha", x)
                .param("depth", n)
                .meta("flagged", flag)
                .meta(
                    "domain",
                    vec![output::number(curve.domain.0), output::number(curve.domain.1)],
                ),
        );
    }
    attach_diagnostics(&mut rep, &curve.diagnostics);
    rep
}

/// Gnuplot-ready `c lambda1 d2` columns over 101 points of `[0, 1]`.
fn write_plotdata(path: &std::path::Path) -> Result<()> {
    let mut text = String::from("# c lambda1 d2\n");
    for i in 0..=100u64 {
        let p = CircleParameter::from_ratio(i as i64, 100)?;
        let l = lambda1(&p)?.mid();
        let d = correlation_exponent(&p)?.mid();
        let _ = writeln!(text, "{} {} {}", cell(p.value()), cell(l), cell(d));
    }
    std::fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn verify(a: &VerifyArgs, cfg: &ConfigFile, g: &Globals) -> std::result::Result<(), CliError> {
    let quick = cfg.switch(a.quick, "quick")?;
    let results = run_checks(quick, g.seed);
    let failed = results.iter().filter(|r| !r.passed).count();
    let text = match g.format {
        None => {
            let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
            let mut s = String::new();
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "{tag}  {:width$}  {}", r.name, r.detail);
            }
            let _ = writeln!(s, "{} of {} checks passed", results.len() - failed, results.len());
            s
        }
        Some(f) => {
            let mut rep = Report::new("verify", &["check", "passed", "detail"]);
            for r in &results {
                rep.row(vec![r.name.into(), r.passed.to_string(), r.detail.clone()]);
                let v = if r.passed { 1.0 } else { 0.0 };
                rep.push(
                    Record::exact("check", None, v)
                        .param("name", r.name)
                        .param("quick", quick)
                        .meta("passed", r.passed)
                        .meta("detail", r.detail.clone()),
                );
            }
            render(
                &rep,
                &Globals {
                    format: Some(f),
                    seed: g.seed,
                    output: None,
                },
            )
        }
    };
    emit(&text, g)?;
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed, results.len()));
    }
    Ok(())
}
