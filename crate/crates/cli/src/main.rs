//! `toolkit`: ring-down fitting, paper reproduction report and stray-charge
//! budgets from the command line.
//!
//! Exit codes: 0 success, 1 acceptance failure, 2 input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use tco_toolkit::report::{self, BudgetTarget};
use tco_toolkit::ringdown::{self, AmplitudeMode, RingdownFit};
use tco_toolkit::scenario::{self, Scenario};
use tco_toolkit::{Backend, Dimension, MonteCarlo, UncertainQuantity};

const SEED_ENV: &str = "TOOLKIT_SEED";

#[derive(Parser)]
#[command(name = "toolkit", version, about = "Cavity ring-down, film loss and stray-charge budgets")]
struct Cli {
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit ring-down traces and report linewidth and finesse.
    FitRingdown {
        /// Free spectral range, Hz.
        #[arg(long, conflicts_with = "length_m", required_unless_present = "length_m")]
        fsr_hz: Option<f64>,
        /// Cavity length, m (FSR = c/2d).
        #[arg(long)]
        length_m: Option<f64>,
        /// One-sigma uncertainty of the FSR, Hz.
        #[arg(long, default_value_t = 0.0)]
        fsr_sigma_hz: f64,
        /// Fit one shared amplitude across all traces.
        #[arg(long)]
        joint_v0: bool,
        /// Write per-trace fits as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Two-column CSV traces (time s, voltage V).
        #[arg(required = true)]
        traces: Vec<PathBuf>,
    },
    /// Recompute every tabulated and quoted figure and compare.
    ReproducePaper {
        /// Write the report as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Monte-Carlo samples.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Evaluate one charge budget on a scenario file.
    Budget {
        #[arg(long)]
        scenario: PathBuf,
        /// cooling, coupling, lamb-dicke, gate, rydberg-coherence,
        /// rydberg-gate or charging.
        #[arg(long)]
        target: String,
        /// Sweep CSV path (default: <target>_sweep.csv).
        #[arg(long)]
        sweep_out: Option<PathBuf>,
    },
    /// Write seeded synthetic ring-down traces.
    SynthTraces {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 8)]
        count: u64,
        #[arg(long, default_value_t = 523e3)]
        linewidth_hz: f64,
        /// Noise sigma relative to the initial amplitude.
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        #[arg(long, default_value_t = 2e-6)]
        duration_s: f64,
        #[arg(long, default_value_t = 5e8)]
        sample_rate_hz: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Outcome {
    Success,
    AcceptanceFailure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let backend = if cli.sequential {
        Backend::Sequential
    } else {
        Backend::default()
    };
    match run(cli.command, backend) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::AcceptanceFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| anyhow!("{SEED_ENV}={s:?}: {e}")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(anyhow!("{SEED_ENV}: {e}")),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cmd: Command, backend: Backend) -> Result<Outcome> {
    match cmd {
        Command::FitRingdown {
            fsr_hz,
            length_m,
            fsr_sigma_hz,
            joint_v0,
            out,
            traces,
        } => fit_ringdown(fsr_hz, length_m, fsr_sigma_hz, joint_v0, out, &traces, backend),
        Command::ReproducePaper { out, samples } => reproduce(out, samples, backend),
        Command::Budget {
            scenario,
            target,
            sweep_out,
        } => budget(&scenario, &target, sweep_out, backend),
        Command::SynthTraces {
            out_dir,
            count,
            linewidth_hz,
            noise,
            duration_s,
            sample_rate_hz,
            seed,
        } => {
            std::fs::create_dir_all(&out_dir)?;
            let seed = env_seed()?.unwrap_or(seed);
            for i in 0..count {
                let t = ringdown::synthesize_trace(
                    1.0,
                    linewidth_hz,
                    duration_s,
                    sample_rate_hz,
                    noise,
                    seed.wrapping_add(i),
                )?;
                let path = out_dir.join(format!("trace_{i:02}.csv"));
                write(&path, &ringdown::write_trace_csv(&t))?;
                println!("{}", path.display());
            }
            Ok(Outcome::Success)
        }
    }
}

fn print_fit(name: &str, f: &RingdownFit) {
    println!(
        "{name}: linewidth {:.3} ± {:.3} kHz, v0 {:.5} ± {:.2e} V, {} iterations",
        f.linewidth.value() / 1e3,
        f.linewidth.sigma() / 1e3,
        f.v0.value(),
        f.v0.sigma(),
        f.iterations
    );
}

fn fit_ringdown(
    fsr_hz: Option<f64>,
    length_m: Option<f64>,
    fsr_sigma_hz: f64,
    joint_v0: bool,
    out: Option<PathBuf>,
    paths: &[PathBuf],
    backend: Backend,
) -> Result<Outcome> {
    let fsr = match (fsr_hz, length_m) {
        (Some(f), _) => f,
        (None, Some(l)) => ringdown::fsr_from_length(l)?,
        (None, None) => bail!("give --fsr-hz or --length-m"),
    };
    let fsr = UncertainQuantity::new(fsr, fsr_sigma_hz, Dimension::Frequency)?;

    let mut loaded = Vec::new();
    for p in paths {
        match ringdown::read_trace_csv(p) {
            Ok(t) => loaded.push((p.display().to_string(), t)),
            Err(e) => eprintln!("{}: {e}", p.display()),
        }
    }
    if loaded.is_empty() {
        bail!("no readable traces");
    }

    let mut csv = String::from("trace,linewidth_hz,sigma_hz,v0\n");
    let linewidth = if joint_v0 {
        let traces: Vec<_> = loaded.iter().map(|(_, t)| t.clone()).collect();
        let e = ringdown::fit_ensemble(&traces, AmplitudeMode::Joint, backend)?;
        let f = &e.fits[0];
        print_fit("joint", f);
        csv.push_str(&format!(
            "joint,{:e},{:e},{:e}\n",
            f.linewidth.value(),
            f.linewidth.sigma(),
            f.v0.value()
        ));
        e.linewidth
    } else {
        let results = backend.map(&loaded, |(_, t)| ringdown::fit_ringdown(t));
        let mut fits = Vec::new();
        for ((name, _), r) in loaded.iter().zip(results) {
            match r {
                Ok(f) => {
                    print_fit(name, &f);
                    csv.push_str(&format!(
                        "{name},{:e},{:e},{:e}\n",
                        f.linewidth.value(),
                        f.linewidth.sigma(),
                        f.v0.value()
                    ));
                    fits.push(f);
                }
                Err(e) => eprintln!("{name}: {e}"),
            }
        }
        if fits.is_empty() {
            bail!("no trace could be fitted");
        }
        let (lw, birge) = ringdown::pool_linewidths(&fits)?;
        println!("Birge ratio {birge:.3} over {} traces", fits.len());
        lw
    };
    let f = ringdown::finesse(&linewidth, &fsr)?;
    println!(
        "pooled linewidth {:.3} ± {:.3} kHz",
        linewidth.value() / 1e3,
        linewidth.sigma() / 1e3
    );
    println!("finesse {:.1} ± {:.1}", f.value(), f.sigma());
    if let Some(path) = out {
        write(&path, &csv)?;
    }
    Ok(Outcome::Success)
}

fn reproduce(out: Option<PathBuf>, samples: usize, backend: Backend) -> Result<Outcome> {
    if samples < MonteCarlo::MIN_SAMPLES {
        bail!("--samples must be at least {}", MonteCarlo::MIN_SAMPLES);
    }
    let seed = env_seed()?.unwrap_or(scenario::DEFAULT_SEED);
    let rep = report::reproduce_paper(seed, samples, backend)?;
    println!("seed {seed}, {samples} Monte-Carlo samples");
    print!("{}", report::rows_to_text(&rep.rows));
    if let Some(path) = out {
        write(&path, &report::rows_to_csv(&rep.rows))?;
    }
    let documented: Vec<_> = rep.documented().into_iter().collect();
    println!("documented mismatches: {}", documented.join(", "));
    if rep.passed() {
        println!("result: PASS");
        Ok(Outcome::Success)
    } else {
        for r in rep.undocumented() {
            println!("undocumented mismatch: {}", r.id);
        }
        println!("result: FAIL");
        Ok(Outcome::AcceptanceFailure)
    }
}

fn budget(path: &Path, target: &str, sweep_out: Option<PathBuf>, backend: Backend) -> Result<Outcome> {
    let target: BudgetTarget = target.parse()?;
    let mut sc: Scenario =
        scenario::read_scenario(path).with_context(|| format!("scenario {}", path.display()))?;
    if let Some(seed) = env_seed()? {
        sc = sc.with_seed(seed);
    }
    let rep = report::run_budget(&sc, target, backend)?;
    print!("{}", rep.to_text());
    let sweep_path = sweep_out.unwrap_or_else(|| PathBuf::from(format!("{target}_sweep.csv")));
    write(&sweep_path, &rep.sweep.to_csv())?;
    println!("sweep: {}", sweep_path.display());
    Ok(Outcome::Success)
}
