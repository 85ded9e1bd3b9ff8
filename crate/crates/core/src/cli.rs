//! The `alomax` command-line front end.
//!
//! SNR values are read in dB and converted once here; the library is linear
//! throughout. Tabular output is CSV with a header row and round-trip
//! formatted numbers (an empty field marks a value that is undefined at that
//! point); structured results are JSON.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::distribution::{sample_inverse, sample_physical, snr_cdf, snr_pdf, snr_quantile, Channel, SampleBatch};
use crate::error::{Error, Result};
use crate::fitting::{fit_mle, fit_rad, load_empirical, FitDomain, FitInit};
use crate::metrics::{
    ber_asymptotic, ber_exact, bler_asymptotic, bler_exact, capacity_asymptotic, capacity_exact, outage_asymptotic,
    outage_probability, Evaluated, MetricSpec, Modulation, ShortPacketConfig, Threshold,
};
use crate::montecarlo::{estimate_metric, McConfig};
use crate::validation;

/// A scalar or an inclusive `start:step:stop` range.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Fixed(f64),
    Range { start: f64, step: f64, stop: f64 },
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Sweep::Fixed(v) => vec![v],
            Sweep::Range { start, step, stop } => {
                let n = ((stop - start) / step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
                (0..n).map(|i| start + i as f64 * step).collect()
            }
        }
    }

    pub fn is_range(&self) -> bool {
        matches!(self, Sweep::Range { .. })
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| -> std::result::Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("'{t}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{t}' is not finite"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Sweep::Fixed(num(v)?)),
            [a, b, c] => {
                let (start, step, stop) = (num(a)?, num(b)?, num(c)?);
                if !(step > 0.0) {
                    return Err(format!("range step must be > 0, got {step}"));
                }
                if start > stop {
                    return Err(format!("range start {start} exceeds stop {stop}"));
                }
                if (stop - start) / step > 1e7 {
                    return Err("range has more than 10^7 points".into());
                }
                Ok(Sweep::Range { start, step, stop })
            }
            _ => Err(format!("expected a number or start:step:stop, got '{s}'")),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "alomax", version, about = "α-Lomax fading channel: distribution, metrics, simulation and fitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// PDF, CDF or quantile sweeps.
    Eval(EvalArgs),
    /// Closed-form metrics and their high-SNR asymptotes.
    Metrics(MetricsArgs),
    /// Monte-Carlo estimates with standard errors.
    Simulate(SimulateArgs),
    /// Raw SNR draws.
    Sample(SampleArgs),
    /// Fit α-Lomax parameters to a binned PDF or to raw samples.
    Fit(FitArgs),
    /// Run every closed-form-versus-oracle cross-check.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct ChannelArgs {
    /// Shape α (value or start:step:stop).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Sweep,
    /// Shape λ, must exceed 1/α (value or start:step:stop).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Sweep,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Mean SNR in dB.
    #[arg(long = "mean-snr-db", visible_alias = "snr-db", default_value = "0", allow_hyphen_values = true)]
    snr_db: Sweep,
    /// Linear SNR abscissa for --pdf/--cdf.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<Sweep>,
    /// Probabilities for --quantile.
    #[arg(long, allow_hyphen_values = true)]
    u: Option<Sweep>,
    #[arg(long)]
    pdf: bool,
    #[arg(long)]
    cdf: bool,
    #[arg(long)]
    quantile: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricName {
    Op,
    Ber,
    Capacity,
    Bler,
}

#[derive(Args, Debug)]
struct MetricArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Mean SNR in dB.
    #[arg(long = "snr-db", visible_alias = "mean-snr-db", default_value = "0:2:40", allow_hyphen_values = true)]
    snr_db: Sweep,
    /// Metrics to compute (comma separated; default all).
    #[arg(long, value_enum, value_delimiter = ',')]
    metric: Vec<MetricName>,
    /// Outage threshold γ₀ (linear).
    #[arg(long, conflicts_with = "rate")]
    gamma0: Option<f64>,
    /// Outage threshold as a rate R₀ [bit/s/Hz].
    #[arg(long)]
    rate: Option<f64>,
    /// bpsk, bfsk, msk or a numeric φ.
    #[arg(long, default_value = "bpsk")]
    modulation: String,
    /// Blocklength N.
    #[arg(long, default_value_t = 100)]
    n: u32,
    /// Information bits K.
    #[arg(long, default_value_t = 50)]
    k: u32,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Worker threads (does not change results).
    #[arg(long)]
    streams: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerName {
    Physical,
    Inverse,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long = "mean-snr-db", visible_alias = "snr-db", default_value_t = 0.0, allow_hyphen_values = true)]
    snr_db: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "inverse")]
    method: SamplerName,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitMethod {
    Rad,
    Mle,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// CSV input: a binned PDF for `rad`, one sample per row for `mle`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "rad")]
    method: FitMethod,
    /// Variable of a binned PDF: snr or envelope.
    #[arg(long, default_value = "snr")]
    domain: String,
    /// Starting α (requires --lambda0 and --scale0).
    #[arg(long, requires_all = ["lambda0", "scale0"])]
    alpha0: Option<f64>,
    #[arg(long, requires_all = ["alpha0", "scale0"])]
    lambda0: Option<f64>,
    /// Starting mean SNR (linear).
    #[arg(long, requires_all = ["alpha0", "lambda0"])]
    scale0: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Table,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Criterion ids to run (comma separated; default all).
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    #[command(flatten)]
    out: OutArg,
}

/// Runs the CLI and returns the process exit code: 0 on success, 2 for
/// invalid arguments or parameters, 1 for numeric failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    install_logger();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Eval(a) => eval(a).map(|_| 0),
        Command::Metrics(a) => metrics(a).map(|_| 0),
        Command::Simulate(a) => simulate(a).map(|_| 0),
        Command::Sample(a) => sample(a).map(|_| 0),
        Command::Fit(a) => fit(a).map(|_| 0),
        Command::Validate(a) => validate(a),
    }
}

fn emit(out: &OutArg, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One grid point of a sweep over (α, λ, SNR dB, extra).
#[derive(Debug, Clone, Copy)]
struct Point {
    alpha: f64,
    lambda: f64,
    snr_db: f64,
    extra: f64,
}

impl Point {
    fn channel(&self) -> Result<Channel> {
        Channel::from_parts(self.alpha, self.lambda, db_to_linear(self.snr_db))
    }
}

fn grid(alpha: &Sweep, lambda: &Sweep, snr_db: &Sweep, extra: Option<(&str, &Sweep)>) -> Result<Vec<Point>> {
    let mut named = vec![("--alpha", alpha), ("--lambda", lambda), ("--snr-db", snr_db)];
    if let Some(e) = extra {
        named.push(e);
    }
    let swept: Vec<&str> = named.iter().filter(|(_, s)| s.is_range()).map(|(n, _)| *n).collect();
    if swept.len() > 1 {
        return Err(Error::Argument(format!("at most one variable may be swept, got {}", swept.join(", "))));
    }
    let extra_vals = extra.map_or(vec![f64::NAN], |(_, s)| s.values());
    let mut out = Vec::new();
    for &a in &alpha.values() {
        for &l in &lambda.values() {
            for &g in &snr_db.values() {
                for &x in &extra_vals {
                    out.push(Point { alpha: a, lambda: l, snr_db: g, extra: x });
                }
            }
        }
    }
    // Reject bad parameters before sweeping so the error names the constraint.
    for p in &out {
        p.channel()?;
    }
    Ok(out)
}

fn csv_line(buf: &mut String, fields: &[f64]) {
    for (i, v) in fields.iter().enumerate() {
        if i > 0 {
            buf.push(',');
        }
        if !v.is_nan() {
            push_number(buf, *v);
        }
    }
    buf.push('\n');
}

/// Shortest round-trip decimal, in exponent form for very small or large magnitudes.
pub fn push_number(buf: &mut String, v: f64) {
    let m = v.abs();
    if m == 0.0 || (1e-4..1e16).contains(&m) || !m.is_finite() {
        let _ = write!(buf, "{v}");
    } else {
        let _ = write!(buf, "{v:e}");
    }
}

fn eval(a: EvalArgs) -> Result<()> {
    let (pdf, cdf) = if a.pdf || a.cdf || a.quantile { (a.pdf, a.cdf) } else { (true, true) };
    if (pdf || cdf) && a.gamma.is_none() {
        return Err(Error::Argument("--pdf/--cdf need --gamma".into()));
    }
    if a.quantile && a.u.is_none() {
        return Err(Error::Argument("--quantile needs --u".into()));
    }
    if a.quantile && (pdf || cdf) {
        return Err(Error::Argument("--quantile cannot be combined with --pdf/--cdf".into()));
    }
    let (label, axis) = if a.quantile { ("u", a.u.as_ref()) } else { ("gamma", a.gamma.as_ref()) };
    let axis = axis.ok_or_else(|| Error::Argument("missing abscissa".into()))?;
    let points = grid(&a.channel.alpha, &a.channel.lambda, &a.snr_db, Some((label, axis)))?;

    let mut header = vec!["alpha", "lambda", "mean_snr_db", label];
    if a.quantile {
        header.push("quantile");
    }
    if pdf {
        header.push("pdf");
    }
    if cdf {
        header.push("cdf");
    }
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|p| {
            let ch = p.channel()?;
            let mut row = vec![p.alpha, p.lambda, p.snr_db, p.extra];
            if a.quantile {
                row.push(snr_quantile(&ch, p.extra)?);
            }
            if pdf {
                row.push(snr_pdf(&ch, p.extra)?);
            }
            if cdf {
                row.push(snr_cdf(&ch, p.extra)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut buf = header.join(",") + "\n";
    for r in &rows {
        csv_line(&mut buf, r);
    }
    emit(&a.out, &buf)
}

struct MetricPlan {
    specs: Vec<MetricSpec>,
    gamma0: f64,
}

fn plan(m: &MetricArgs) -> Result<MetricPlan> {
    let names = if m.metric.is_empty() {
        vec![MetricName::Op, MetricName::Ber, MetricName::Capacity, MetricName::Bler]
    } else {
        let mut v = m.metric.clone();
        v.dedup();
        v
    };
    let threshold = match (m.gamma0, m.rate) {
        (_, Some(r)) => Threshold::Rate(r),
        (Some(g), None) => Threshold::Snr(g),
        (None, None) => Threshold::Snr(1.0),
    };
    let gamma0 = threshold.gamma0()?;
    let modulation = Modulation::from_str(&m.modulation)?;
    let mut specs = Vec::new();
    for n in names {
        specs.push(match n {
            MetricName::Op => MetricSpec::Outage { threshold },
            MetricName::Ber => MetricSpec::Ber { modulation },
            MetricName::Capacity => MetricSpec::Capacity,
            MetricName::Bler => MetricSpec::Bler { packet: ShortPacketConfig::new(m.n, m.k)? },
        });
    }
    Ok(MetricPlan { specs, gamma0 })
}

fn warn_fallback(name: &str, e: Evaluated, p: &Point) -> f64 {
    if e.is_fallback() {
        log::warn!("{name} at α={}, λ={}, {} dB fell back to quadrature", p.alpha, p.lambda, p.snr_db);
    }
    e.value
}

fn metric_values(spec: &MetricSpec, gamma0: f64, p: &Point) -> Result<[f64; 2]> {
    let ch = p.channel()?;
    Ok(match *spec {
        MetricSpec::Outage { threshold } => {
            [outage_probability(&ch, threshold)?, outage_asymptotic(&ch, gamma0)?.value_at(ch.mean_snr())]
        }
        MetricSpec::Ber { modulation } => {
            [warn_fallback("ber", ber_exact(&ch, modulation)?, p), ber_asymptotic(&ch, modulation)?.value_at(ch.mean_snr())]
        }
        MetricSpec::Capacity => [warn_fallback("capacity", capacity_exact(&ch)?, p), capacity_asymptotic(&ch)?],
        MetricSpec::Bler { packet } => {
            // The asymptote is only defined past its high-SNR guard; below it the field is left empty.
            let asymptote = match bler_asymptotic(&ch, &packet) {
                Ok(v) => v,
                Err(Error::Domain(_)) => f64::NAN,
                Err(e) => return Err(e),
            };
            [warn_fallback("bler", bler_exact(&ch, &packet)?, p), asymptote]
        }
    })
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let m = &a.metric;
    let plan = plan(m)?;
    let points = grid(&m.channel.alpha, &m.channel.lambda, &m.snr_db, None)?;
    let mut header = vec!["alpha".to_string(), "lambda".into(), "snr_db".into()];
    for s in &plan.specs {
        header.push(s.name().into());
        header.push(format!("{}_asymptote", s.name()));
    }
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|p| {
            let mut row = vec![p.alpha, p.lambda, p.snr_db];
            for s in &plan.specs {
                row.extend(metric_values(s, plan.gamma0, p)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut buf = header.join(",") + "\n";
    for r in &rows {
        csv_line(&mut buf, r);
    }
    emit(&a.out, &buf)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let m = &a.metric;
    let plan = plan(m)?;
    let streams = a.streams.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mc = McConfig::new(a.seed, a.samples, streams)?;
    let points = grid(&m.channel.alpha, &m.channel.lambda, &m.snr_db, None)?;
    let mut header = vec!["alpha".to_string(), "lambda".into(), "snr_db".into()];
    for s in &plan.specs {
        for col in ["mean", "std_error", "ci95_low", "ci95_high"] {
            header.push(format!("{}_{col}", s.name()));
        }
    }
    let mut buf = header.join(",") + "\n";
    for p in &points {
        let ch = p.channel()?;
        let mut row = vec![p.alpha, p.lambda, p.snr_db];
        for s in &plan.specs {
            let e = estimate_metric(s, &ch, &mc)?;
            row.extend([e.mean, e.std_error, e.ci95_low, e.ci95_high]);
        }
        csv_line(&mut buf, &row);
    }
    emit(&a.out, &buf)
}

fn sample(a: SampleArgs) -> Result<()> {
    let ch = Channel::from_parts(a.alpha, a.lambda, db_to_linear(a.snr_db))?;
    let batch = match a.method {
        SamplerName::Physical => sample_physical(&ch, a.samples, a.seed)?,
        SamplerName::Inverse => sample_inverse(&ch, a.samples, a.seed)?,
    };
    let mut buf = String::with_capacity(batch.values.len() * 20 + 4);
    buf.push_str("snr\n");
    for v in &batch.values {
        push_number(&mut buf, *v);
        buf.push('\n');
    }
    emit(&a.out, &buf)
}

/// Reads one positive sample per row from a CSV with a single header column.
fn read_samples(path: &std::path::Path) -> Result<SampleBatch> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse { line: e.position().map_or(0, |p| p.line() as usize), msg: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = rec.get(0).unwrap_or("");
        let v: f64 = field.parse().map_err(|_| Error::Parse { line, msg: format!("'{field}' is not a number") })?;
        values.push(v);
    }
    Ok(SampleBatch { values, seed: 0, method: crate::distribution::SamplingMethod::InverseCdf })
}

fn fit(a: FitArgs) -> Result<()> {
    let init = match (a.alpha0, a.lambda0, a.scale0) {
        (Some(alpha), Some(lambda), Some(scale)) => Some(FitInit { alpha, lambda, scale }),
        _ => None,
    };
    let result = match a.method {
        FitMethod::Rad => {
            let domain = FitDomain::from_str(&a.domain)?;
            fit_rad(&load_empirical(&a.input)?, domain, init)?
        }
        FitMethod::Mle => fit_mle(&read_samples(&a.input)?, init)?,
    };
    let json = serde_json::to_string_pretty(&result).map_err(|e| Error::Numeric(e.to_string()))?;
    emit(&a.out, &(json + "\n"))
}

fn validate(a: ValidateArgs) -> Result<i32> {
    let ids: Vec<u8> = if a.criteria.is_empty() {
        (1..=validation::CRITERION_COUNT as u8).collect()
    } else {
        a.criteria.clone()
    };
    let mut criteria = Vec::new();
    for id in ids {
        let r = validation::run_criterion(id)
            .ok_or_else(|| Error::Argument(format!("no criterion {id} (1..={})", validation::CRITERION_COUNT)))?;
        criteria.push(r);
    }
    let report = validation::ValidationReport { passed: criteria.iter().all(|c| c.passed), criteria };
    let text = match a.format {
        ReportFormat::Json => serde_json::to_string_pretty(&report).map_err(|e| Error::Numeric(e.to_string()))? + "\n",
        ReportFormat::Table => {
            let mut t = String::new();
            for c in &report.criteria {
                let _ = writeln!(t, "{:>2} {} {:<24} {:>8.2}s  {}", c.id, if c.passed { "PASS" } else { "FAIL" }, c.name, c.elapsed_s, c.detail);
            }
            t
        }
    };
    emit(&a.out, &text)?;
    Ok(if report.passed { 0 } else { 1 })
}

struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, m: &log::Metadata) -> bool {
        m.level() <= log::Level::Warn
    }

    fn log(&self, r: &log::Record) {
        if self.enabled(r.metadata()) {
            eprintln!("{}: {}", r.level().as_str().to_ascii_lowercase(), r.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn install_logger() {
    if log::set_logger(&LOGGER).is_ok() {
        log::set_max_level(log::LevelFilter::Warn);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        assert_eq!("2.5".parse::<Sweep>().unwrap(), Sweep::Fixed(2.5));
        let s: Sweep = "0:0.1:0.3".parse().unwrap();
        assert_eq!(s.values().len(), 4);
        assert_eq!(s.values()[3], 0.30000000000000004);
        assert_eq!("0:2:40".parse::<Sweep>().unwrap().values().len(), 21);
        assert!("0:0:1".parse::<Sweep>().is_err());
        assert!("3:1:1".parse::<Sweep>().is_err());
        assert!("1:2".parse::<Sweep>().is_err());
        assert!("x".parse::<Sweep>().is_err());
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.0, 10.0, 0.1735537190082645, 6.409422403404062e-8, 7.6e-24, 3.2e20, -2.5e-9] {
            let mut s = String::new();
            push_number(&mut s, v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        let mut s = String::new();
        push_number(&mut s, 1e-9);
        assert_eq!(s, "1e-9");
    }

    #[test]
    fn only_one_sweep() {
        let r = grid(&Sweep::Fixed(1.0), &"2:1:3".parse().unwrap(), &"0:5:10".parse().unwrap(), None);
        assert!(matches!(r, Err(Error::Argument(_))));
    }
}
