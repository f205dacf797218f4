use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aniso_core::cutoffs::SweepConfig;
use aniso_core::harness::{
    decay_fit, execute_run, last_octave, summarize, write_run_dir, BootstrapMode, CalibratedConstants, Config, Table, Verdict,
};
use aniso_core::identities::{calibrate, measure_lemma_check, verify_identities};

#[derive(Parser)]
#[command(name = "aniso", version, about = "Anisotropic wave-system laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve a system and write diagnostics, manifest, verdict and plots.
    Run {
        config: PathBuf,
        /// output directory (default runs/<config hash>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identity, commutation and calibrated-inequality checks; JSON reports on stdout.
    VerifyIdentities {
        config: PathBuf,
        /// constants file (default: the bundled one)
        #[arg(long)]
        constants: Option<PathBuf>,
        /// also write the verdict here
        #[arg(long)]
        verdict: Option<PathBuf>,
    },
    /// Measure-lemma sweep; CSV on stdout.
    MeasureSweep {
        config: PathBuf,
        #[arg(long)]
        constants: Option<PathBuf>,
        #[arg(long)]
        verdict: Option<PathBuf>,
    },
    /// Log-log slope of one CSV column against t.
    DecayFit {
        csv: PathBuf,
        #[arg(long)]
        col: String,
        /// "lo,hi" (default: the last octave)
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
    },
    /// A run with the bootstrap functional monitored.
    Bootstrap {
        config: PathBuf,
        #[arg(long)]
        mode: BootstrapMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize an existing run directory and regenerate its plots.
    Report { run_dir: PathBuf },
    /// Re-measure every calibrated constant and write a new constants file.
    Calibrate {
        config: PathBuf,
        /// previous constants, for the version number (default: the bundled ones)
        #[arg(long)]
        constants: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo > 0.0 && hi > lo) {
        return Err("need 0 < lo < hi".into());
    }
    Ok((lo, hi))
}

fn constants(path: Option<&Path>) -> aniso_core::Result<CalibratedConstants> {
    match path {
        Some(p) => CalibratedConstants::load(p),
        None => Ok(CalibratedConstants::bundled()),
    }
}

fn print_verdict(v: &Verdict) {
    for (id, c) in &v.0 {
        if let Some(p) = c.pass {
            eprintln!("{} {id} value={:?} bound={:?}", if p { "PASS" } else { "FAIL" }, c.value, c.bound);
        }
    }
}

fn finish(v: &Verdict, path: Option<&Path>) -> aniso_core::Result<ExitCode> {
    print_verdict(v);
    if let Some(p) = path {
        fs::write(p, v.to_json())?;
    }
    Ok(if v.any_failed() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn run(mut cfg: Config, out: Option<PathBuf>, mode: Option<BootstrapMode>) -> aniso_core::Result<ExitCode> {
    if mode.is_some() {
        cfg.checks.bootstrap = mode;
    }
    let dir = out.unwrap_or_else(|| PathBuf::from("runs").join(&cfg.hash()[..12]));
    let res = execute_run(&cfg)?;
    write_run_dir(&dir, &res)?;
    eprintln!("wrote {}", dir.display());
    if let Some(b) = &res.bootstrap {
        eprintln!("bootstrap sup {:.4e} bound {:.4e} margin {:.2}", b.sup, b.bound, b.margin);
        for d in &b.drifts {
            eprintln!(
                "drift component {} {:?} {:.4e}, {:?} {:.4e}",
                d.component + 1,
                d.early,
                d.early_drift,
                d.late,
                d.late_drift
            );
        }
    }
    finish(&res.verdict, None)
}

fn main_inner(cli: Cli) -> aniso_core::Result<ExitCode> {
    match cli.cmd {
        Cmd::Run { config, out } => run(Config::load(&config)?, out, None),
        Cmd::Bootstrap { config, mode, out } => run(Config::load(&config)?, out, Some(mode)),
        Cmd::VerifyIdentities { config, constants: c, verdict } => {
            let cfg = Config::load(&config)?;
            let out = verify_identities(&cfg, &constants(c.as_deref())?)?;
            println!("{}", serde_json::to_string_pretty(&out.reports)?);
            for c in &out.constants {
                eprintln!("{} measured {:.6e} stored {:.6e}{}", c.name, c.measured, c.stored, if c.pass { "" } else { "  REGRESSION" });
            }
            finish(&out.verdict, verdict.as_deref())
        }
        Cmd::MeasureSweep { config, constants: c, verdict } => {
            let cfg = Config::load(&config)?;
            let sweep = cfg.sweep.clone().unwrap_or_else(SweepConfig::lemma_default);
            let (report, check) = measure_lemma_check(&sweep, cfg.seed, &constants(c.as_deref())?)?;
            print!("{}", report.to_csv());
            eprintln!(
                "max ratio {:.6e}, Monte Carlo {} cells worst {:.3} of tolerance, closed form error {:.2e}",
                check.max_ratio, check.mc_cells, check.mc_worst, check.closed_form_error
            );
            let mut v = Verdict::default();
            v.set("measure_lemma", check.pass(), check.max_ratio, check.constant.stored * aniso_core::harness::constants::TOLERANCE);
            finish(&v, verdict.as_deref())
        }
        Cmd::DecayFit { csv, col, window } => {
            let series = Table::read(&csv)?.series(&col)?;
            let w = window.unwrap_or_else(|| last_octave(&series));
            println!("{}", serde_json::to_string_pretty(&decay_fit(&series, w)?)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Report { run_dir } => {
            let (text, v) = summarize(&run_dir)?;
            print!("{text}");
            Ok(if v.any_failed() { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Cmd::Calibrate { config, constants: c, out } => {
            let cfg = Config::load(&config)?;
            let prev = constants(c.as_deref())?;
            let next = calibrate(&cfg, &prev)?;
            next.save(&out)?;
            for (k, v) in &next.constants {
                eprintln!("{k} = {v:.6e}");
            }
            eprintln!("wrote {} (version {})", out.display(), next.version);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
