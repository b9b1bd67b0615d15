use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nmgn::experiments::{self as ex, Config};
use nmgn::gn_problem::Forcing;
use nmgn::nashmoser::{check_induction, IterationTrace};
use nmgn::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "nmgn", version, about = "Nash-Moser experiments for the Serre and Green-Naghdi equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parameter sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Schedule constants and feasibility.
    Schedule,
    /// Solve the configured instance with Nash-Moser, method of lines, or both.
    Solve,
    /// Nash-Moser trace and the per-iteration induction properties.
    Convergence,
    /// Error against the perturbation size of an approximate solution.
    Stability,
    /// Error against the shallowness parameter for O(mu^2) residuals.
    Scaling,
    /// Randomized invariant checks.
    Validate {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } => 2,
        Error::Divergence { .. } => 3,
        Error::Domain { .. } => 4,
        Error::Io(_) => 5,
        _ => 1,
    }
}

struct Out {
    dir: PathBuf,
}

impl Out {
    fn new(dir: &Path) -> nmgn::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Out { dir: dir.to_path_buf() })
    }

    fn write(&self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> nmgn::Result<()>) -> nmgn::Result<()> {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn json(&self, name: &str, value: &Value) -> nmgn::Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

fn header(cfg: &Config) -> Value {
    json!({ "config_sha256": cfg.hash(), "seed": cfg.seed })
}

fn with_header(cfg: &Config, body: Value) -> Value {
    let mut v = header(cfg);
    if let (Some(dst), Value::Object(src)) = (v.as_object_mut(), body) {
        dst.extend(src);
    }
    v
}

fn write_trace(out: &Out, cfg: &Config, trace: &IterationTrace) -> nmgn::Result<()> {
    let preamble = ex::csv_preamble(cfg, "theta dimensionless; norms and residual nondimensional");
    out.write("trace.csv", |w| trace.write_csv(w, &preamble))
}

fn schedule(cfg: &Config, out: &Out) -> nmgn::Result<()> {
    let report = ex::run_schedule(cfg)?;
    let value = with_header(cfg, serde_json::to_value(&report)?);
    println!("{}", serde_json::to_string_pretty(&value)?);
    out.json("schedule.json", &value)?;
    if !report.feasible {
        return Err(Error::Infeasible {
            p: report.big_p,
            p_min: report.p_min,
        });
    }
    Ok(())
}

fn solve(cfg: &Config, out: &Out) -> nmgn::Result<()> {
    let report = match ex::run_solve(cfg) {
        Err(Error::Divergence { trace, iteration, residual }) => {
            write_trace(out, cfg, &trace)?;
            return Err(Error::Divergence { trace, iteration, residual });
        }
        other => other?,
    };
    let mut body = json!({ "method": cfg.solver.method, "gap_x0": report.gap });
    if let Some(nm) = &report.nash_moser {
        write_trace(out, cfg, &nm.trace)?;
        out.write("nash_moser.csv", |w| ex::write_trajectory_csv(w, cfg, &nm.physical))?;
        body["nash_moser"] = json!({
            "iterations": nm.trace.len(),
            "final_residual": nm.trace.last().map(|r| r.residual_f),
            "properties_hold": nm.induction.all_hold(),
            "theta0": nm.schedule.theta0,
            "linear_solves": nm.linear_solves,
            "mass_drift": ex::mass_drift(&nm.physical),
        });
        eprintln!("nash-moser: {} iterations in {:.2} s", nm.trace.len(), nm.seconds);
    }
    if let Some(mol) = &report.mol {
        out.write("mol.csv", |w| ex::write_trajectory_csv(w, cfg, &mol.physical))?;
        body["mol"] = serde_json::to_value(&mol.stats)?;
    }
    let value = with_header(cfg, body);
    println!("{}", serde_json::to_string_pretty(&value)?);
    out.json("solve.json", &value)
}

fn convergence(cfg: &Config, out: &Out) -> nmgn::Result<()> {
    let params = cfg.params()?;
    let init = cfg.initial_state(&params)?;
    let run = match ex::run_nash_moser(cfg, &params, &init, Forcing::None) {
        Err(Error::Divergence { trace, iteration, residual }) => {
            write_trace(out, cfg, &trace)?;
            return Err(Error::Divergence { trace, iteration, residual });
        }
        other => other?,
    };
    write_trace(out, cfg, &run.trace)?;
    let report = check_induction(&run.trace, &run.schedule);
    let value = with_header(
        cfg,
        json!({
            "iterations": run.trace.len(),
            "final_residual": run.trace.last().map(|r| r.residual_f),
            "target_residual": cfg.solver.target_residual,
            "converged": run.trace.last().is_some_and(|r| r.residual_f <= cfg.solver.target_residual),
            "M": run.trace.big_m,
            "properties": report.per_k,
            "first_failure": { "i": report.first_failure[0], "ii": report.first_failure[1], "iii": report.first_failure[2] },
            "pass": report.all_hold(),
        }),
    );
    println!("{}", serde_json::to_string_pretty(&value)?);
    out.json("convergence.json", &value)
}

fn stability(cfg: &Config, out: &Out) -> nmgn::Result<()> {
    let report = ex::run_stability(cfg)?;
    out.write("stability.csv", |w| ex::write_stability_csv(w, cfg, &report))?;
    let value = with_header(cfg, serde_json::to_value(&report)?);
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn scaling(cfg: &Config, out: &Out) -> nmgn::Result<()> {
    let series = ex::run_scaling(cfg)?;
    out.write("scaling.csv", |w| ex::write_scaling_csv(w, cfg, &series))?;
    let value = with_header(cfg, json!({ "series": series }));
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn validate(cfg: &Config, out: &Out, trials: usize) -> nmgn::Result<bool> {
    let report = ex::run_validate(cfg, trials)?;
    for c in &report.checks {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        println!("{verdict} {:<24} {} trials, {} violations", c.name, c.trials, c.violations);
    }
    out.json("validate.json", &with_header(cfg, serde_json::to_value(&report)?))?;
    Ok(report.passed())
}

fn run(cli: &Cli) -> nmgn::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = Out::new(&cli.out)?;
    match cli.command {
        Command::Schedule => schedule(&cfg, &out)?,
        Command::Solve => solve(&cfg, &out)?,
        Command::Convergence => convergence(&cfg, &out)?,
        Command::Stability => stability(&cfg, &out)?,
        Command::Scaling => scaling(&cfg, &out)?,
        Command::Validate { trials } => return validate(&cfg, &out, trials),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        assert_eq!(exit_code(&Error::Infeasible { p: 30.0, p_min: 38.0 }), 2);
        assert_eq!(exit_code(&Error::domain("x", 0.1, 0.5)), 4);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 5);
        assert_eq!(exit_code(&Error::Config("x".into())), 1);
    }

    #[test]
    fn arguments_parse() {
        let cli = Cli::try_parse_from(["nmgn", "schedule", "--seed", "3", "--out", "/tmp/x"]).unwrap();
        assert_eq!(cli.seed, Some(3));
        assert!(matches!(cli.command, Command::Schedule));
    }
}
