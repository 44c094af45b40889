//! Command implementations behind the `ndt` binary: bound queries,
//! tradeoff curves, scheme simulation and gap sweeps.
//!
//! All machine-readable output keeps rationals as `num/den` strings;
//! decimals appear only in the human-readable echo of `bound`. Identical
//! invocations (including the seed) produce byte-identical output.

use crate::bounds::{achievable_dof, lower_bound, optimal_tradeoff_closed_detailed};
use crate::config::NetworkConfig;
use crate::gap::{best_implemented_envelope, gap_sweep};
use crate::ia::{CornerPoint, SchemeTrace, corner_trace, ia22_run, ia31_run, trial_seed};
use crate::oneshot::{build_schedule, oneshot_run};
use crate::rational::{Rational, fmt_frac, parse_rational, rat, to_f64, zero};
use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

/// Exit codes: 0 ok, 2 bad configuration, 3 I/O failure, 4 unsupported
/// scheme, 5 assertion failure.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Unsupported(String),
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Unsupported(_) => 4,
            CliError::Assertion(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::Unsupported(s) => write!(f, "unsupported scheme: {s}"),
            CliError::Assertion(s) => write!(f, "assertion failure: {s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "ndt",
    about = "Exact NDT bounds, schemes and verification for cache-aided broadcast-relay networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bound on the NDT at one (K, M, mu) point, with the
    /// maximizing cut.
    Bound {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        /// Library size; defaults to K + M.
        #[arg(long)]
        n: Option<usize>,
        /// Fractional cache size as an exact fraction `a/b`.
        #[arg(long)]
        mu: String,
    },
    /// CSV tradeoff curve over a uniform rational grid of cache sizes.
    Tradeoff {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: Option<usize>,
        /// Number of grid points (at least 2).
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Monte-Carlo verification of a delivery scheme at one point.
    Simulate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        mu: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Defaults to the NDT_SEED environment variable, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// CSV gap sweep over K in [1..k], M in [1..m], all grid cache sizes.
    Gap {
        /// Largest user count.
        #[arg(long)]
        k: usize,
        /// Largest relay count.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
}

/// Command output: stdout payload plus stderr notes.
#[derive(Debug, Default)]
pub struct CmdOutput {
    pub stdout: String,
    pub notes: Vec<String>,
}

/// Default seed: NDT_SEED environment variable, then 0.
pub fn default_seed() -> u64 {
    std::env::var("NDT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn make_config(
    k: usize,
    m: usize,
    n: Option<usize>,
    mu: Rational,
) -> Result<NetworkConfig, CliError> {
    NetworkConfig::with_library(k, m, n.unwrap_or(k + m), mu)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn parse_mu(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::Config(e.to_string()))
}

/// Run a parsed command, producing its output.
pub fn run(cmd: &Command) -> Result<CmdOutput, CliError> {
    match cmd {
        Command::Bound { k, m, n, mu } => cmd_bound(*k, *m, *n, mu),
        Command::Tradeoff {
            k,
            m,
            n,
            grid,
            format,
            ..
        } => {
            require_format(*format, OutputFormat::Csv)?;
            cmd_tradeoff(*k, *m, *n, *grid)
        }
        Command::Simulate {
            k,
            m,
            n,
            mu,
            trials,
            seed,
            format,
            ..
        } => cmd_simulate(
            *k,
            *m,
            *n,
            mu,
            *trials,
            seed.unwrap_or_else(default_seed),
            *format,
        ),
        Command::Gap { k, m, format, .. } => {
            require_format(*format, OutputFormat::Csv)?;
            cmd_gap(*k, *m)
        }
    }
}

fn require_format(got: OutputFormat, want: OutputFormat) -> Result<(), CliError> {
    if got != want {
        return Err(CliError::Config(format!(
            "this command only emits {want:?} output"
        )));
    }
    Ok(())
}

/// Write a command's stdout payload to the chosen sink.
pub fn write_output(out: &Option<PathBuf>, payload: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, payload).map_err(|e| CliError::Io(e.to_string())),
        None => std::io::stdout()
            .write_all(payload.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn cmd_bound(k: usize, m: usize, n: Option<usize>, mu: &str) -> Result<CmdOutput, CliError> {
    let mu = parse_mu(mu)?;
    let cfg = make_config(k, m, n, mu)?;
    let (value, witness) = lower_bound(&cfg);
    let witness = match witness {
        Some(w) => format!("witness \u{2113}={},s={}", w.ell, w.s),
        None => "witness none".to_string(),
    };
    let stdout = format!("{} ({}), {}\n", value, to_f64(&value), witness);
    Ok(CmdOutput {
        stdout,
        notes: Vec::new(),
    })
}

fn cmd_tradeoff(k: usize, m: usize, n: Option<usize>, grid: usize) -> Result<CmdOutput, CliError> {
    if grid < 2 {
        return Err(CliError::Config("grid needs at least 2 points".into()));
    }
    // validate once at mu = 0; every grid point shares K, M, N
    make_config(k, m, n, zero())?;
    let small = k + m <= 4;
    // the achievable envelope joins the one-shot grid points with the
    // alignment corner points where those schemes exist
    let envelope = best_implemented_envelope(k, m);
    let mut rows =
        String::from("mu_num,mu_den,lower_bound,oneshot_envelope,optimal_if_small,dof\n");
    let mut conditional_fired = false;
    for i in 0..grid {
        let mu = rat(i as i64, (grid - 1) as i64);
        let cfg = make_config(k, m, n, mu.clone())?;
        let (lower, _) = lower_bound(&cfg);
        let env = envelope.eval(&mu);
        let optimal = if small {
            let d = optimal_tradeoff_closed_detailed(&cfg)
                .map_err(|e| CliError::Config(e.to_string()))?;
            conditional_fired |= d.conditional_rule_fired;
            fmt_frac(&d.value)
        } else {
            String::new()
        };
        let dof = achievable_dof(&cfg, &env);
        rows.push_str(&format!(
            "{},{},{},{},{},{}\n",
            mu.numer(),
            mu.denom(),
            fmt_frac(&lower),
            fmt_frac(&env),
            optimal,
            fmt_frac(&dof)
        ));
    }
    let mut notes = Vec::new();
    if conditional_fired {
        notes.push(
            "note: closed-form tradeoff for K = 1 drops the two s = 2 cut terms (outside their valid domain)"
                .to_string(),
        );
    }
    Ok(CmdOutput {
        stdout: rows,
        notes,
    })
}

/// Scheme selected for a simulation request.
enum SimScheme {
    Ia31,
    Ia22,
    OneShot,
}

fn pick_scheme(cfg: &NetworkConfig) -> Result<SimScheme, CliError> {
    if (cfg.k, cfg.m) == (3, 1) && cfg.mu == rat(4, 5) {
        return Ok(SimScheme::Ia31);
    }
    if (cfg.k, cfg.m) == (2, 2) && cfg.mu == rat(4, 9) {
        return Ok(SimScheme::Ia22);
    }
    if cfg.cache_level().is_some() {
        return Ok(SimScheme::OneShot);
    }
    Err(CliError::Unsupported(format!(
        "no implemented scheme at (K, M, mu) = ({}, {}, {}); grid cache sizes are multiples of 1/M, special alignment points are (3, 1, 4/5) and (2, 2, 4/9)",
        cfg.k, cfg.m, cfg.mu
    )))
}

fn cmd_simulate(
    k: usize,
    m: usize,
    n: Option<usize>,
    mu: &str,
    trials: u64,
    seed: u64,
    format: OutputFormat,
) -> Result<CmdOutput, CliError> {
    let mu = parse_mu(mu)?;
    let cfg = make_config(k, m, n, mu)?;
    let scheme = pick_scheme(&cfg)?;
    let mut trial_rows = Vec::new();
    let mut pass_count = 0u64;
    let mut total_redraws = 0u64;
    let mut ndts: Vec<Rational> = Vec::new();

    let corner = match (cfg.k, cfg.m, &cfg.mu) {
        (1, 2, mu) if *mu == rat(1, 2) => Some(CornerPoint::K1M2),
        (2, 2, mu) if *mu == rat(1, 2) => Some(CornerPoint::K2M2),
        (1, 3, mu) if *mu == rat(1, 3) => Some(CornerPoint::K1M3),
        _ => None,
    };

    let plan = match scheme {
        SimScheme::OneShot => {
            Some(build_schedule(&cfg).map_err(|e| CliError::Config(e.to_string()))?)
        }
        _ => None,
    };

    let scheme_name = match scheme {
        SimScheme::Ia31 => "ia-3-1",
        SimScheme::Ia22 => "ia-2-2",
        SimScheme::OneShot => match corner {
            Some(CornerPoint::K1M2) => "oneshot-corner-1-2",
            Some(CornerPoint::K2M2) => "oneshot-corner-2-2",
            Some(CornerPoint::K1M3) => "oneshot-corner-1-3",
            None => "oneshot",
        },
    };

    for trial in 0..trials {
        let ts = trial_seed(seed, trial);
        let outcome: Result<(bool, u32, Rational), String> = match scheme {
            SimScheme::Ia31 => ia31_run(ts).map(as_trace_triple).map_err(|e| e.to_string()),
            SimScheme::Ia22 => ia22_run(ts).map(as_trace_triple).map_err(|e| e.to_string()),
            SimScheme::OneShot => match corner {
                Some(point) => corner_trace(point, ts)
                    .map(as_trace_triple)
                    .map_err(|e| e.to_string()),
                None => oneshot_run(&cfg, plan.as_ref().unwrap(), ts)
                    .map(|r| (r.pass, r.redraws, r.ndt))
                    .map_err(|e| e.to_string()),
            },
        };
        match outcome {
            Ok((pass, redraws, ndt)) => {
                if pass {
                    pass_count += 1;
                    ndts.push(ndt.clone());
                }
                total_redraws += redraws as u64;
                trial_rows.push(serde_json::json!({
                    "trial": trial,
                    "pass": pass,
                    "redraws": redraws,
                    "ndt": fmt_frac(&ndt),
                }));
            }
            Err(msg) => {
                trial_rows.push(serde_json::json!({
                    "trial": trial,
                    "pass": false,
                    "error": msg,
                }));
            }
        }
    }

    ndts.dedup();
    if ndts.len() > 1 {
        return Err(CliError::Assertion(format!(
            "measured NDT differs across passing trials: {:?}",
            ndts.iter().map(fmt_frac).collect::<Vec<_>>()
        )));
    }

    // csv: the aggregate pass-rate summary as a single row
    if format == OutputFormat::Csv {
        let mut out = String::from(
            "scheme,k,m,mu_num,mu_den,trials,seed,pass_count,fail_count,measured_ndt,total_redraws\n",
        );
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            scheme_name,
            cfg.k,
            cfg.m,
            cfg.mu.numer(),
            cfg.mu.denom(),
            trials,
            seed,
            pass_count,
            trials - pass_count,
            ndts.first().map(fmt_frac).unwrap_or_default(),
            total_redraws
        ));
        return Ok(CmdOutput {
            stdout: out,
            notes: Vec::new(),
        });
    }

    let report = serde_json::json!({
        "schema": "ndt-lab/1",
        "command": "simulate",
        "scheme": scheme_name,
        "k": cfg.k,
        "m": cfg.m,
        "n": cfg.n,
        "mu": fmt_frac(&cfg.mu),
        "trials": trials,
        "seed": seed,
        "pass_count": pass_count,
        "fail_count": trials - pass_count,
        "pass_rate": format!("{pass_count}/{trials}"),
        "measured_ndt": ndts.first().map(fmt_frac),
        "total_redraws": total_redraws,
        "trial_results": trial_rows,
    });
    Ok(CmdOutput {
        stdout: format!("{report}\n"),
        notes: Vec::new(),
    })
}

fn as_trace_triple(t: SchemeTrace) -> (bool, u32, Rational) {
    (t.pass, t.redraws, t.ndt)
}

fn cmd_gap(kmax: usize, mmax: usize) -> Result<CmdOutput, CliError> {
    if kmax < 1 || mmax < 1 {
        return Err(CliError::Config("sweep bounds must be at least 1".into()));
    }
    let mut out = String::from("K,M,mu_num,mu_den,achievable,lower,ratio,bound,source\n");
    let mut violation = None;
    for row in gap_sweep(kmax, mmax) {
        let r = &row.report;
        let (bound, source) = match &r.bound {
            Some((b, s)) => (fmt_frac(b), s.to_string()),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.k,
            r.m,
            r.mu.numer(),
            r.mu.denom(),
            fmt_frac(&r.achievable),
            fmt_frac(&r.lower),
            fmt_frac(&r.ratio),
            bound,
            source
        ));
        if row.violated && violation.is_none() {
            violation = Some(format!(
                "gap ratio {} exceeds its closed-form bound at (K, M, mu) = ({}, {}, {})",
                fmt_frac(&r.ratio),
                r.k,
                r.m,
                r.mu
            ));
        }
    }
    if let Some(v) = violation {
        return Err(CliError::Assertion(v));
    }
    Ok(CmdOutput {
        stdout: out,
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<CmdOutput, CliError> {
        let cli = Cli::try_parse_from(args).expect("parse");
        run(&cli.command)
    }

    #[test]
    fn bound_prints_fraction_decimal_and_witness() {
        let out = run_args(&["ndt", "bound", "--k", "3", "--m", "1", "--mu", "4/5"]).unwrap();
        assert_eq!(out.stdout, "8/5 (1.6), witness \u{2113}=1,s=1\n");
        let out = run_args(&["ndt", "bound", "--k", "2", "--m", "2", "--mu", "0"]).unwrap();
        assert!(out.stdout.starts_with("4 (4), "));
    }

    #[test]
    fn bound_rejects_bad_mu() {
        let err = run_args(&["ndt", "bound", "--k", "1", "--m", "1", "--mu", "3/2"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = run_args(&["ndt", "bound", "--k", "1", "--m", "1", "--mu", "0.5"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn exit_codes_cover_all_failure_kinds() {
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Io(String::new()).exit_code(), 3);
        assert_eq!(CliError::Unsupported(String::new()).exit_code(), 4);
        assert_eq!(CliError::Assertion(String::new()).exit_code(), 5);
    }

    #[test]
    fn tradeoff_rows_match_known_corners() {
        let out = run_args(&["ndt", "tradeoff", "--k", "2", "--m", "2", "--grid", "3"]).unwrap();
        let lines: Vec<&str> = out.stdout.lines().collect();
        assert_eq!(
            lines[0],
            "mu_num,mu_den,lower_bound,oneshot_envelope,optimal_if_small,dof"
        );
        // mu = 1/2 row: lower 5/4, envelope 5/4, optimal 5/4, dof 12/5
        assert_eq!(lines[2], "1,2,5/4,5/4,5/4,12/5");
    }

    #[test]
    fn tradeoff_hides_optimal_for_large_networks() {
        let out = run_args(&["ndt", "tradeoff", "--k", "5", "--m", "5", "--grid", "3"]).unwrap();
        for line in out.stdout.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols[4], "", "optimal column must be empty: {line}");
        }
    }

    #[test]
    fn simulate_rejects_uncovered_points() {
        let err = run_args(&[
            "ndt", "simulate", "--k", "3", "--m", "1", "--mu", "1/2", "--trials", "1",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn simulate_reports_exact_ndt() {
        let out = run_args(&[
            "ndt", "simulate", "--k", "3", "--m", "1", "--mu", "4/5", "--trials", "3", "--seed",
            "7",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["schema"], "ndt-lab/1");
        assert_eq!(v["measured_ndt"], "8/5");
        assert_eq!(v["pass_count"], 3);
    }

    #[test]
    fn identical_seeds_give_identical_reports() {
        let args = [
            "ndt", "simulate", "--k", "2", "--m", "2", "--mu", "4/9", "--trials", "5", "--seed",
            "11",
        ];
        let a = run_args(&args).unwrap();
        let b = run_args(&args).unwrap();
        assert_eq!(a.stdout, b.stdout);
    }

    #[test]
    fn simulate_csv_gives_aggregate_summary() {
        let out = run_args(&[
            "ndt", "simulate", "--k", "1", "--m", "2", "--mu", "1/2", "--trials", "4", "--seed",
            "2", "--format", "csv",
        ])
        .unwrap();
        let lines: Vec<&str> = out.stdout.lines().collect();
        assert_eq!(
            lines[0],
            "scheme,k,m,mu_num,mu_den,trials,seed,pass_count,fail_count,measured_ndt,total_redraws"
        );
        assert!(lines[1].starts_with("oneshot-corner-1-2,1,2,1,2,4,2,4,0,1/1,"));
    }

    #[test]
    fn gap_sweep_has_expected_rows() {
        let out = run_args(&["ndt", "gap", "--k", "2", "--m", "2"]).unwrap();
        let lines: Vec<&str> = out.stdout.lines().collect();
        assert_eq!(
            lines[0],
            "K,M,mu_num,mu_den,achievable,lower,ratio,bound,source"
        );
        // the (2, 2, 4/9) row carries ratio 7/6
        assert!(lines.iter().any(|l| l.starts_with("2,2,4,9,14/9,4/3,7/6,")));
        // every (1, 2) row is optimal
        for l in lines.iter().filter(|l| l.starts_with("1,2,")) {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols[6], "1/1", "(1,2) rows must have ratio 1: {l}");
        }
    }
}
