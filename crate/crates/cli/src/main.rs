//! `nrlimit`: run the coupled solver, the limit solvers, the convergence
//! studies, the dyadic probes and the identity checks from JSON configs.

mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nrlimit_core::dm::{simulate_dm_with, step_count, DmState, SimOptions, StepConfig};
use nrlimit_core::fourier::write_snapshot;
use nrlimit_core::limit::{simulate_sp_with, LimitDiagnostics, LimitState};
use nrlimit_core::verify::config::ExperimentConfig;
use nrlimit_core::verify::presets::{parse_experiment, parse_probe, preset_source, PRESETS};
use nrlimit_core::verify::probe::{summarize, sweep_csv, ProbeSweep};
use nrlimit_core::verify::studies::{driven_pauli_run, nonrel_convergence_study, seminonrel_study, StudyOutput};
use nrlimit_core::verify::suites::{run_suite, SUITES};

use manifest::Run;

#[derive(Parser, Debug)]
#[command(name = "nrlimit", version, about = "Dirac-Maxwell nonrelativistic limit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped preset instead of a config file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Random seed; overrides the config seed where one is used.
    #[arg(long)]
    seed: Option<u64>,
    /// Dealias products with the 2/3 rule.
    #[arg(long)]
    dealias: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coupled Dirac-Maxwell runs, one per eps in the config.
    RunDm(Common),
    /// Schrodinger-Poisson run from the limit data of the config.
    RunSp(Common),
    /// Pauli runs in the potentials of the coupled run, one per eps.
    RunPauli(Common),
    /// Nonrelativistic convergence study (rate_report.json).
    Converge(Common),
    /// Semi-nonrelativistic (Pauli) convergence study.
    Seminonrel(Common),
    /// Dyadic bilinear probe sweep (sweep.csv).
    ProbeDyadic(Common),
    /// Run a named identity suite; exits nonzero on any failure.
    Check {
        /// One of: matrices, projections, algebra, symbols, null-1, null-2, squared, all.
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the shipped presets, or print one.
    Presets { name: Option<String> },
}

fn source(c: &Common) -> Result<(String, String)> {
    match (&c.config, &c.preset) {
        (Some(p), None) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok((text, p.display().to_string()))
        }
        (None, Some(name)) => Ok((preset_source(name)?.to_string(), format!("preset {name}"))),
        _ => bail!("give exactly one of --config or --preset"),
    }
}

fn experiment(c: &Common) -> Result<ExperimentConfig> {
    let (text, origin) = source(c)?;
    let mut cfg = parse_experiment(&text).map_err(|e| anyhow!("{origin}: {e}"))?;
    cfg.dealias |= c.dealias;
    Ok(cfg)
}

fn probe(c: &Common) -> Result<ProbeSweep> {
    let (text, origin) = source(c)?;
    let mut cfg = parse_probe(&text).map_err(|e| anyhow!("{origin}: {e}"))?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string(v)?)
}

fn snapshot<F: nrlimit_core::fourier::GridField + ?Sized>(
    run: &mut Run,
    name: &str,
    field: &F,
    complex: bool,
    t: f64,
) -> Result<()> {
    write_snapshot(&run.path(name), field, complex, t)?;
    run.record(name)
}

fn run_dm(c: &Common) -> Result<PathBuf> {
    let cfg = experiment(c)?;
    let mut run = Run::new(&c.out, "run-dm", &json(&cfg)?, c.seed, cfg.dealias)?;
    let l = cfg.lattice()?;
    let mut csv = format!("eps,{}\n", nrlimit_core::dm::DiagnosticsRow::CSV_HEADER);
    for (i, &eps) in cfg.eps.iter().enumerate() {
        let init = cfg.data.initial_state(&l, eps)?;
        let step = StepConfig::new(cfg.dt.at(eps)).with_dealias(cfg.dealias);
        let steps = step_count(cfg.t_final, step.dt)?;
        let opts = SimOptions {
            sample_every: cfg.sample_every,
            ..SimOptions::default()
        };
        let mut last: Option<DmState> = None;
        let traj = run.stage(&format!("simulate eps={eps}"), || {
            Ok(simulate_dm_with(&init, cfg.t_final, &step, &opts, |k, s| {
                if k == steps {
                    last = Some(s.clone());
                }
                Ok(())
            })?)
        })?;
        for r in &traj.diagnostics {
            let _ = writeln!(csv, "{eps:e},{}", r.csv_line());
        }
        let last = last.ok_or_else(|| anyhow!("run ended early"))?;
        snapshot(&mut run, &format!("psi_e{i}_t0.fld"), &init.psi, true, init.t)?;
        snapshot(&mut run, &format!("psi_e{i}_final.fld"), &last.psi, true, last.t)?;
        snapshot(&mut run, &format!("a_e{i}_final.fld"), &last.a, false, last.t)?;
        snapshot(&mut run, &format!("a0_e{i}_final.fld"), &last.a0(cfg.dealias), false, last.t)?;
    }
    run.write("diagnostics.csv", &csv)?;
    run.finish()
}

fn run_sp(c: &Common) -> Result<PathBuf> {
    let cfg = experiment(c)?;
    let mut run = Run::new(&c.out, "run-sp", &json(&cfg)?, c.seed, cfg.dealias)?;
    let l = cfg.lattice()?;
    let (vp, vm) = cfg.data.limit_data(&l)?;
    let init = LimitState::new(vp, vm)?;
    // the limit data do not depend on eps; step with the finest schedule
    let eps = *cfg.eps.last().expect("validated non-empty");
    let dt = cfg.dt.at(eps);
    let mut last = None;
    let steps = step_count(cfg.t_final, dt)?;
    let traj = run.stage("simulate", || {
        Ok(simulate_sp_with(&init, cfg.t_final, dt, cfg.sample_every, 1e6, false, |k, s| {
            if k == steps {
                last = Some(s.clone());
            }
            Ok(())
        })?)
    })?;
    let mut csv = format!("{}\n", LimitDiagnostics::CSV_HEADER);
    for r in &traj.diagnostics {
        let _ = writeln!(csv, "{}", r.csv_line());
    }
    run.write("diagnostics.csv", &csv)?;
    let last = last.ok_or_else(|| anyhow!("run ended early"))?;
    snapshot(&mut run, "v_plus_final.fld", &last.v_plus, true, last.t)?;
    snapshot(&mut run, "v_minus_final.fld", &last.v_minus, true, last.t)?;
    snapshot(&mut run, "u_final.fld", &last.potential(), false, last.t)?;
    run.finish()
}

fn run_pauli(c: &Common) -> Result<PathBuf> {
    let cfg = experiment(c)?;
    let mut run = Run::new(&c.out, "run-pauli", &json(&cfg)?, c.seed, cfg.dealias)?;
    let mut csv = String::from("eps,t,mass_chi,h1_chi\n");
    let mut dirac = format!("eps,{}\n", nrlimit_core::dm::DiagnosticsRow::CSV_HEADER);
    for (i, &eps) in cfg.eps.iter().enumerate() {
        let r = run.stage(&format!("simulate eps={eps}"), || Ok(driven_pauli_run(&cfg, eps)?))?;
        for d in &r.pauli {
            let _ = writeln!(csv, "{eps:e},{:e},{:e},{:e}", d.t, d.mass_plus, d.h1_plus);
        }
        for d in &r.dirac {
            let _ = writeln!(dirac, "{eps:e},{}", d.csv_line());
        }
        snapshot(&mut run, &format!("chi_e{i}_final.fld"), &r.final_state.chi, true, r.final_state.t)?;
    }
    run.write("diagnostics.csv", &csv)?;
    run.write("dirac_diagnostics.csv", &dirac)?;
    run.finish()
}

fn study(c: &Common, name: &str, f: fn(&ExperimentConfig) -> nrlimit_core::Result<StudyOutput>) -> Result<PathBuf> {
    let cfg = experiment(c)?;
    let mut run = Run::new(&c.out, name, &json(&cfg)?, c.seed, cfg.dealias)?;
    let out = run.stage("study", || Ok(f(&cfg)?))?;
    run.write("rate_report.json", &out.report.to_json())?;
    run.write("rate_report.csv", &out.report.to_csv())?;
    run.write("diagnostics.csv", &out.diagnostics_csv())?;
    for (k, fit) in &out.report.fits {
        let rate = fit.rate.value().map_or("undefined".to_string(), |v| format!("{v:.3}"));
        println!("{k}: rate {rate}, errors {:?}", out.report.errors[k]);
    }
    println!("report: {}", run.path("rate_report.json").display());
    run.finish()
}

fn probe_dyadic(c: &Common) -> Result<PathBuf> {
    let cfg = probe(c)?;
    let mut run = Run::new(&c.out, "probe-dyadic", &json(&cfg)?, Some(cfg.seed), false)?;
    let rows = run.stage("sweep", || Ok(cfg.run()?))?;
    run.write("sweep.csv", &sweep_csv(&rows))?;
    let s = summarize(cfg.case, &rows)?;
    run.write("probe_summary.json", &(serde_json::to_string_pretty(&s)? + "\n"))?;
    println!(
        "case {}: max ratio {:.3e}, max/median {:.2}, mu trend {}, {}",
        cfg.case.name(),
        s.max,
        s.spread,
        s.mu_trend.map_or("n/a".to_string(), |v| format!("{v:.3}")),
        if s.passes { "bounded" } else { "NOT bounded" }
    );
    println!("sweep: {}", run.path("sweep.csv").display());
    run.finish()
}

fn check(suite: &str, seed: u64) -> Result<bool> {
    if !SUITES.contains(&suite) {
        bail!("unknown suite `{suite}` (known: {})", SUITES.join(", "));
    }
    let results = run_suite(suite, seed)?;
    for r in &results {
        println!("{}", r.line());
    }
    Ok(results.iter().all(|r| r.passed))
}

fn init_threads(n: Option<usize>) -> Result<()> {
    let Some(n) = n else { return Ok(()) };
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    #[cfg(not(feature = "parallel"))]
    eprintln!("note: built without the `parallel` feature, ignoring --threads {n}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    init_threads(cli.threads)?;
    let done = |p: PathBuf| {
        println!("manifest: {}", p.display());
        true
    };
    Ok(match cli.command {
        Command::RunDm(c) => done(run_dm(&c)?),
        Command::RunSp(c) => done(run_sp(&c)?),
        Command::RunPauli(c) => done(run_pauli(&c)?),
        Command::Converge(c) => done(study(&c, "converge", nonrel_convergence_study)?),
        Command::Seminonrel(c) => done(study(&c, "seminonrel", seminonrel_study)?),
        Command::ProbeDyadic(c) => done(probe_dyadic(&c)?),
        Command::Check { suite, seed } => check(&suite, seed)?,
        Command::Presets { name: None } => {
            for (n, _) in PRESETS {
                println!("{n}");
            }
            true
        }
        Command::Presets { name: Some(n) } => {
            print!("{}", preset_source(&n)?);
            true
        }
    })
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
