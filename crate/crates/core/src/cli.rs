//! The `ldp-eigen` command-line front end.
//!
//! Every subcommand writes one JSON document `{command, version, config, result}`
//! unless CSV is requested. Spectra and density grids are tables and default to
//! CSV. Floats are written with 17 significant digits so identical runs produce
//! identical bytes.
//!
//! Exit codes: 0 on success, 1 on numerical failure (or a failed `validate`
//! suite), 2 on flag errors.

use crate::ensemble::{eigenvalues, sample_matrix, wishart_eigs_from_block, EnsembleKind, EnsembleSpec};
use crate::entry_law::{check_sharp_subgaussian, EntryLaw, Field};
use crate::error::Error;
use crate::estimate::{replica_rng, run_replicas, with_threads};
use crate::free_energy::{f_wigner, f_wishart};
use crate::ledger::discrepancy_ledger;
use crate::rare_event::{
    critical_theta_wishart, estimate_tail, naive_tail_mc, rho_theta_wigner, spike_location_wishart, theta_x_wigner,
    theta_x_wishart, TailConfig, WeightScheme,
};
use crate::rate::{rate_block, rate_variational, rate_wigner, rate_wigner_quadrature, RateValue, VariationalTarget};
use crate::spectral_law::{block_edge, SpectralLaw};
use crate::spherical::{f_n_estimate, j_limit, j_n_exact, j_n_monte_carlo, j_velocity, JLimitInput};
use crate::validate::{run_suite, Suite};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "ldp-eigen", version, about = "Large deviations of extreme eigenvalues: transforms, rates, and tilted sampling")]
struct Cli {
    /// Worker threads for replica loops (results do not depend on it).
    #[arg(long, global = true, env = "LDP_EIGEN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Default)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit CSV (tables only).
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    /// Emit JSON (the default except for spectra and grids).
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Serialize, Args)]
struct Dimensions {
    /// Matrix side for Wigner kinds.
    #[arg(long)]
    n: Option<usize>,
    /// Row count L of G for block kinds.
    #[arg(long)]
    l: Option<usize>,
    /// Column count M ≥ L of G for block kinds.
    #[arg(long)]
    m: Option<usize>,
}

fn law_arg(s: &str) -> Result<String, String> {
    s.parse::<EntryLaw>()?;
    Ok(s.to_string())
}

fn spectral_arg(s: &str) -> Result<String, String> {
    parse_spectral(s)?;
    Ok(s.to_string())
}

/// `semicircle`, `mp:<alpha>`, or `block:<alpha>`.
fn parse_spectral(s: &str) -> Result<SpectralLaw, String> {
    let law = match s.split_once(':') {
        None if s == "semicircle" => SpectralLaw::Semicircle,
        Some(("mp", a)) => SpectralLaw::MarchenkoPastur { alpha: a.parse().map_err(|_| format!("bad α '{a}'"))? },
        Some(("block", a)) => SpectralLaw::BlockLaw { alpha: a.parse().map_err(|_| format!("bad α '{a}'"))? },
        _ => return Err(format!("unknown spectral law '{s}' (semicircle, mp:<α>, block:<α>)")),
    };
    law.validate().map_err(|e| e.to_string())?;
    Ok(law)
}

fn scheme_arg(s: &str) -> Result<WeightScheme, String> {
    match s {
        "marginal" => Ok(WeightScheme::Marginal),
        "per-direction" | "per_direction" => Ok(WeightScheme::PerDirection),
        _ => Err(format!("unknown weight scheme '{s}' (marginal, per-direction)")),
    }
}

fn scan_arg(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("scan must be start:stop:step".into());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.parse::<f64>().map_err(|_| format!("bad number '{p}'"))).collect::<Result<_, _>>()?;
    if !(v[2] > 0.0) || !(v[1] >= v[0]) {
        return Err("scan needs stop ≥ start and step > 0".into());
    }
    Ok((v[0], v[1], v[2]))
}

#[derive(Debug, Clone, Serialize, Subcommand)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Sample eigenvalues of an ensemble (CSV: one eigenvalue per line, one column per replica).
    SampleSpectrum {
        #[arg(long, visible_alias = "ensemble")]
        kind: EnsembleKind,
        #[command(flatten)]
        dims: Dimensions,
        #[arg(long, default_value = "rademacher", value_parser = law_arg)]
        law: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// For block kinds, report the Wishart eigenvalues (N/L)λ² instead.
        #[arg(long)]
        wishart: bool,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Certify L(t) ≤ t²·var/2 on a grid.
    CheckSubgaussian {
        #[arg(long, value_parser = law_arg)]
        law: String,
        /// Treat the law as complex (independent real and imaginary parts).
        #[arg(long)]
        complex: bool,
        #[arg(long, default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = 4001)]
        grid: usize,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Closed-form and variational rate functions of λ_max.
    Rate {
        #[arg(long, visible_alias = "kind", default_value = "wigner1")]
        ensemble: EnsembleKind,
        /// Location (block units for Wishart kinds).
        #[arg(long, required_unless_present = "scan")]
        x: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Evaluate on start:stop:step.
        #[arg(long, value_parser = scan_arg)]
        scan: Option<(f64, f64, f64)>,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Limiting annealed free energy, and its finite-N Monte Carlo estimate.
    FreeEnergy {
        #[arg(long, visible_alias = "ensemble")]
        kind: EnsembleKind,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        dims: Dimensions,
        #[arg(long, default_value = "rademacher", value_parser = law_arg)]
        law: String,
        /// Sphere samples for the finite-N estimate (0 skips it).
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Spherical-integral limit J(μ,θ,λ), optionally with J_N of a sampled Wigner matrix.
    SphericalJ {
        /// semicircle, mp:<α>, or block:<α>.
        #[arg(long, default_value = "semicircle", value_parser = spectral_arg)]
        limit_law: String,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        lam: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        beta: u8,
        /// Also sample a Wigner matrix of this size and evaluate J_N.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "rademacher", value_parser = law_arg)]
        law: String,
        /// Sphere samples for a Monte Carlo J_N next to the exact one (0 skips it).
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Spike location ρ_θ under a tilt, or the tilt θ_x reaching x.
    Spike {
        #[arg(long, visible_alias = "kind", default_value = "wigner1")]
        ensemble: EnsembleKind,
        #[arg(long, required_unless_present = "x")]
        theta: Option<f64>,
        /// Location (block units for Wishart kinds).
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Importance-sampled tail probability of λ_max.
    EstimateTail {
        #[arg(long, visible_alias = "ensemble")]
        kind: EnsembleKind,
        #[command(flatten)]
        dims: Dimensions,
        #[arg(long, default_value = "rademacher", value_parser = law_arg)]
        law: String,
        /// Target location (Wishart units for block kinds).
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// marginal or per-direction.
        #[arg(long, default_value = "marginal", value_parser = scheme_arg)]
        scheme: WeightScheme,
        #[arg(long, default_value_t = 0.1)]
        deloc_eps: f64,
        /// Override the analytic tilt θ_x.
        #[arg(long)]
        theta: Option<f64>,
        /// Also run plain Monte Carlo with this many draws.
        #[arg(long)]
        naive: Option<usize>,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Run a suite of numerical self-checks (bulk, wishart, transforms).
    Validate {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Formulas whose printed form disagrees with the implementation, with measured ratios.
    Ledger {
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
    /// Density and CDF of a limiting law on a grid (CSV: x,density,cdf).
    LawGrid {
        #[arg(long, value_parser = spectral_arg)]
        limit_law: String,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 401)]
        points: usize,
        #[command(flatten)]
        #[serde(skip)]
        output: Output,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SampleSpectrum { .. } => "sample-spectrum",
            Command::CheckSubgaussian { .. } => "check-subgaussian",
            Command::Rate { .. } => "rate",
            Command::FreeEnergy { .. } => "free-energy",
            Command::SphericalJ { .. } => "spherical-j",
            Command::Spike { .. } => "spike",
            Command::EstimateTail { .. } => "estimate-tail",
            Command::Validate { .. } => "validate",
            Command::Ledger { .. } => "ledger",
            Command::LawGrid { .. } => "law-grid",
        }
    }

    fn output(&self) -> &Output {
        match self {
            Command::SampleSpectrum { output, .. }
            | Command::CheckSubgaussian { output, .. }
            | Command::Rate { output, .. }
            | Command::FreeEnergy { output, .. }
            | Command::SphericalJ { output, .. }
            | Command::Spike { output, .. }
            | Command::EstimateTail { output, .. }
            | Command::Validate { output, .. }
            | Command::Ledger { output }
            | Command::LawGrid { output, .. } => output,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Flag(String),
    Numeric(Error),
    Io(std::io::Error),
    /// The command ran and wrote its output, but reported failure.
    Failed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn flag(msg: impl Into<String>) -> CliError {
    CliError::Flag(msg.into())
}

/// `{:.16e}`: 17 significant digits, independent of platform float printing.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a Command,
    result: T,
}

fn write_out(output: &Output, bytes: &[u8]) -> CliResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(cmd: &Command, result: T) -> CliResult<()> {
    let env = Envelope { command: cmd.name(), version: env!("CARGO_PKG_VERSION"), config: cmd, result };
    let bytes = to_json(&env).map_err(|e| CliError::Io(e.into()))?;
    write_out(cmd.output(), &bytes)
}

fn ensemble(kind: EnsembleKind, dims: &Dimensions, law: &str) -> CliResult<EnsembleSpec> {
    let law: EntryLaw = law.parse().map_err(flag)?;
    let spec = match (kind.is_block(), dims.n, dims.l, dims.m) {
        (false, Some(n), None, None) => EnsembleSpec::wigner(kind, n, law),
        (true, None, Some(l), Some(m)) => EnsembleSpec::block(kind, l, m, law),
        (false, ..) => return Err(flag("Wigner kinds take --n (and not --l/--m)")),
        (true, ..) => return Err(flag("block kinds take --l and --m (and not --n)")),
    };
    spec.map_err(|e| flag(e.to_string()))
}

fn need_alpha(alpha: Option<f64>) -> CliResult<f64> {
    match alpha {
        Some(a) if a >= 1.0 && a.is_finite() => Ok(a),
        Some(a) => Err(flag(format!("--alpha must be ≥ 1, got {a}"))),
        None => Err(flag("block kinds need --alpha")),
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = cli.threads;
    let command = cli.command;
    match with_threads(threads, || execute(&command)) {
        Ok(()) => 0,
        Err(CliError::Flag(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("\nFor more information, try '--help'.");
            2
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(CliError::Failed) => 1,
    }
}

fn execute(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::SampleSpectrum { kind, dims, law, seed, replicas, wishart, output } => {
            let spec = ensemble(*kind, dims, law)?;
            if *replicas == 0 {
                return Err(flag("--replicas must be ≥ 1"));
            }
            if *wishart && !kind.is_block() {
                return Err(flag("--wishart needs a block kind"));
            }
            let spectra = run_replicas(*replicas, *seed, |rng, _| -> crate::error::Result<Vec<f64>> {
                let s = eigenvalues(&sample_matrix(&spec, rng))?;
                match (spec.rect(), wishart) {
                    (Some((l, m)), true) => Ok(wishart_eigs_from_block(&s, l, m)?.eigenvalues),
                    _ => Ok(s.eigenvalues),
                }
            });
            let spectra: Vec<Vec<f64>> = spectra.into_iter().collect::<crate::error::Result<_>>()?;
            if output.json {
                emit_json(cmd, serde_json::json!({ "spectra": spectra }))
            } else {
                let mut text = String::new();
                for row in 0..spectra[0].len() {
                    let line: Vec<String> = spectra.iter().map(|s| num(s[row])).collect();
                    text.push_str(&line.join(","));
                    text.push('\n');
                }
                write_out(output, text.as_bytes())
            }
        }
        Command::CheckSubgaussian { law, complex, t_max, grid, output } => {
            let mut l: EntryLaw = law.parse().map_err(flag)?;
            if *complex {
                l = l.with_field(Field::Complex);
            }
            if !(*t_max > 0.0) || *grid < 2 {
                return Err(flag("need --t-max > 0 and --grid ≥ 2"));
            }
            let report = check_sharp_subgaussian(&l, *t_max, *grid)?;
            if output.csv {
                return Err(flag("check-subgaussian emits JSON only"));
            }
            emit_json(cmd, report)
        }
        Command::Rate { ensemble: kind, x, alpha, scan, output } => {
            let alpha = if kind.is_block() { Some(need_alpha(*alpha)?) } else { None };
            let xs: Vec<f64> = match (scan, x) {
                (Some((a, b, h)), _) => {
                    let n = ((b - a) / h + 1e-9).floor() as usize;
                    (0..=n).map(|k| a + h * k as f64).collect()
                }
                (None, Some(x)) => vec![*x],
                (None, None) => return Err(flag("rate needs --x or --scan")),
            };
            let rows: Vec<RateRow> = xs.iter().map(|&x| rate_row(*kind, x, alpha)).collect::<CliResult<_>>()?;
            if output.csv {
                let mut text = String::from("x,closed_form,variational,theta_star,discrepancy\n");
                for r in &rows {
                    let v = |v: RateValue| match v {
                        RateValue::Finite(f) => num(f),
                        RateValue::Infinite => "inf".to_string(),
                    };
                    text.push_str(&format!(
                        "{},{},{},{},{}\n",
                        num(r.x),
                        v(r.closed_form),
                        v(r.variational),
                        num(r.theta_star),
                        num(r.discrepancy)
                    ));
                }
                write_out(output, text.as_bytes())
            } else if scan.is_some() {
                emit_json(cmd, rows)
            } else {
                emit_json(cmd, &rows[0])
            }
        }
        Command::FreeEnergy { kind, theta, alpha, dims, law, samples, seed, output } => {
            if !(*theta >= 0.0) {
                return Err(flag("--theta must be ≥ 0"));
            }
            if output.csv {
                return Err(flag("free-energy emits JSON only"));
            }
            let has_dims = dims.n.is_some() || dims.l.is_some() || dims.m.is_some();
            let spec = if has_dims || *samples > 0 { Some(ensemble(*kind, dims, law)?) } else { None };
            let estimate = match (&spec, *samples) {
                (Some(s), k) if k > 0 => Some(f_n_estimate(s, *theta, k, *seed)?),
                _ => None,
            };
            if kind.is_block() {
                let alpha = match (alpha, spec.as_ref().and_then(|s| s.alpha())) {
                    (Some(a), _) => need_alpha(Some(*a))?,
                    (None, Some(a)) => a,
                    (None, None) => return Err(flag("block kinds need --alpha or --l/--m")),
                };
                let fe = f_wishart(*theta, kind.beta(), alpha)?;
                emit_json(cmd, serde_json::json!({
                    "theta": fe.theta, "i": fe.i, "alpha": fe.alpha, "value": fe.value,
                    "x_star": fe.x_star, "c_alpha": fe.c_alpha, "d_theta": fe.d_theta(), "estimate": estimate,
                }))
            } else {
                let value = f_wigner(*theta, kind.beta())?;
                emit_json(cmd, serde_json::json!({
                    "theta": theta, "beta": kind.beta(), "value": value, "estimate": estimate,
                }))
            }
        }
        Command::SphericalJ { limit_law, theta, lam, beta, n, law, samples, seed, output } => {
            if output.csv {
                return Err(flag("spherical-j emits JSON only"));
            }
            let spectral = parse_spectral(limit_law).map_err(flag)?;
            let input = JLimitInput { law: spectral, theta: *theta, lam: *lam, beta: *beta };
            let j = j_limit(&input)?;
            let (v, regime) = j_velocity(&input)?;
            let finite = match n {
                Some(n) => {
                    let kind = if *beta == 1 { EnsembleKind::Wigner1 } else { EnsembleKind::Wigner2 };
                    let spec = ensemble(kind, &Dimensions { n: Some(*n), l: None, m: None }, law)?;
                    let mut rng = replica_rng(*seed, 0);
                    let x = sample_matrix(&spec, &mut rng);
                    let s = eigenvalues(&x)?;
                    let exact = j_n_exact(&s.eigenvalues, *theta, *beta)?;
                    let mc = if *samples > 0 { Some(j_n_monte_carlo(&x, *theta, *samples, *seed)?) } else { None };
                    Some(serde_json::json!({
                        "n": n, "lambda_max": s.lambda_max(), "j_n_exact": exact, "j_n_monte_carlo": mc,
                    }))
                }
                None => None,
            };
            emit_json(cmd, serde_json::json!({
                "j": j, "velocity": v, "regime": regime, "finite_n": finite,
                "h_max": spectral.h_max(*lam)?,
            }))
        }
        Command::Spike { ensemble: kind, theta, x, alpha, output } => {
            if output.csv {
                return Err(flag("spike emits JSON only"));
            }
            let beta = kind.beta();
            let mut result = serde_json::Map::new();
            if kind.is_block() {
                let alpha = need_alpha(*alpha)?;
                result.insert("alpha".into(), alpha.into());
                result.insert("edge".into(), block_edge(alpha).into());
                result.insert("critical_theta".into(), critical_theta_wishart(beta, alpha)?.into());
                if let Some(t) = theta {
                    let s = spike_location_wishart(*t, beta, alpha)?;
                    result.insert("rho".into(), s.location.into());
                    result.insert("rho_wishart".into(), ((1.0 + alpha) * s.location * s.location).into());
                    result.insert("supercritical".into(), s.supercritical.into());
                }
                if let Some(x) = x {
                    result.insert("theta_x".into(), theta_x_wishart(*x, beta, alpha)?.into());
                }
            } else {
                result.insert("edge".into(), 2.0.into());
                result.insert("critical_theta".into(), (0.5 * beta as f64).into());
                if let Some(t) = theta {
                    let s = rho_theta_wigner(*t, beta)?;
                    result.insert("rho".into(), s.location.into());
                    result.insert("supercritical".into(), s.supercritical.into());
                }
                if let Some(x) = x {
                    result.insert("theta_x".into(), theta_x_wigner(*x, beta)?.into());
                }
            }
            emit_json(cmd, result)
        }
        Command::EstimateTail { kind, dims, law, x, delta, samples, seed, scheme, deloc_eps, theta, naive, output } => {
            if output.csv {
                return Err(flag("estimate-tail emits JSON only"));
            }
            let spec = ensemble(*kind, dims, law)?;
            if !(*delta > 0.0) || *samples < 2 {
                return Err(flag("need --delta > 0 and --samples ≥ 2"));
            }
            let edge = match spec.alpha() {
                Some(a) => crate::spectral_law::mp_edges(a).1,
                None => 2.0,
            };
            if !(*x > edge) {
                return Err(flag(format!("--x must lie above the bulk edge {edge}")));
            }
            let cfg = TailConfig {
                x: *x,
                delta: *delta,
                n_samples: *samples,
                seed: *seed,
                scheme: *scheme,
                deloc_eps: *deloc_eps,
                theta: *theta,
            };
            let tail = estimate_tail(&spec, &cfg)?;
            let naive = match naive {
                Some(k) => Some(naive_tail_mc(&spec, *x, *delta, *k, seed.wrapping_add(1))?),
                None => None,
            };
            emit_json(cmd, serde_json::json!({ "tail": tail, "naive": naive }))
        }
        Command::Validate { suite, seeds, seed, output } => {
            if output.csv {
                return Err(flag("validate emits JSON only"));
            }
            let report = run_suite(*suite, *seeds, *seed)?;
            let ok = report.passed;
            emit_json(cmd, report)?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Failed)
            }
        }
        Command::Ledger { output } => {
            if output.csv {
                return Err(flag("ledger emits JSON only"));
            }
            emit_json(cmd, discrepancy_ledger()?)
        }
        Command::LawGrid { limit_law, from, to, points, output } => {
            let law = parse_spectral(limit_law).map_err(flag)?;
            let (lo, hi) = law.support();
            let pad = 0.05 * (hi - lo);
            let a = from.unwrap_or(lo - pad);
            let b = to.unwrap_or(hi + pad);
            if *points < 2 || !(b > a) {
                return Err(flag("need --points ≥ 2 and --to > --from"));
            }
            let grid: Vec<(f64, f64, f64)> = (0..*points)
                .map(|k| {
                    let x = a + (b - a) * k as f64 / (*points - 1) as f64;
                    (x, law.density(x), law.cdf(x))
                })
                .collect();
            if output.json {
                let rows: Vec<_> = grid.iter().map(|&(x, d, c)| serde_json::json!({"x": x, "density": d, "cdf": c})).collect();
                emit_json(cmd, serde_json::json!({ "atom_at_zero": law.atom_at_zero(), "grid": rows }))
            } else {
                let mut text = String::from("x,density,cdf\n");
                for (x, d, c) in grid {
                    text.push_str(&format!("{},{},{}\n", num(x), num(d), num(c)));
                }
                write_out(output, text.as_bytes())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct RateRow {
    x: f64,
    closed_form: RateValue,
    variational: RateValue,
    theta_star: f64,
    /// `|closed_form − variational|` (0 when both are infinite).
    discrepancy: f64,
    /// Quadrature evaluation of the closed form (Wigner kinds).
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature: Option<RateValue>,
    /// `(1+α)x²`, the matching Wishart location (block kinds).
    #[serde(skip_serializing_if = "Option::is_none")]
    wishart_x: Option<f64>,
}

fn rate_row(kind: EnsembleKind, x: f64, alpha: Option<f64>) -> CliResult<RateRow> {
    if !x.is_finite() {
        return Err(flag("--x must be finite"));
    }
    let beta = kind.beta();
    let target = VariationalTarget::from_kind(kind, alpha)?;
    let (closed, edge, quadrature, wishart_x) = match alpha {
        Some(a) => (rate_block(x, beta, a)?, block_edge(a), None, Some((1.0 + a) * x * x)),
        None => (rate_wigner(x, beta)?, 2.0, Some(rate_wigner_quadrature(x, beta)?.value), None),
    };
    let (variational, theta_star) = if x >= edge {
        let r = rate_variational(x, target)?;
        (r.value, r.theta_star)
    } else {
        (RateValue::Infinite, 0.0)
    };
    let discrepancy = match (closed.value, variational) {
        (RateValue::Finite(a), RateValue::Finite(b)) => (a - b).abs(),
        (RateValue::Infinite, RateValue::Infinite) => 0.0,
        _ => f64::INFINITY,
    };
    Ok(RateRow { x, closed_form: closed.value, variational, theta_star, discrepancy, quadrature, wishart_x })
}
