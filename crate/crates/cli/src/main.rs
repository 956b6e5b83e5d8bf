use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fractura::io::{self, RunConfig};
use fractura::scenario::{branching_preset, profile_1d, Scale};
use fractura::tintegrate::{alpha_params, oscillator};

#[derive(Parser)]
#[command(name = "fractura", version, about = "Adaptive phase-field simulation of dynamic brittle fracture")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write the run log, VTK snapshots and a summary.
    Run(RunArgs),
    /// Parse a configuration and print the resolved settings.
    ValidateConfig(RunArgs),
    /// Observed convergence orders of the time integrator and the 1D profile.
    Convergence,
    /// Compare the steady 1D phase-field profile with its closed form.
    #[command(name = "profile-1d")]
    Profile1d {
        /// Regularization length in m.
        #[arg(long, default_value_t = 0.01)]
        ell: f64,
        /// Cells per regularization length.
        #[arg(long, default_value_t = 10.0)]
        cells_per_ell: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file of `key = value` lines.
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// Any configuration key, as `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    tol_max: Option<f64>,
    #[arg(long)]
    rho_inf: Option<f64>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    baseline_iteration_count: bool,
    #[arg(long)]
    mesh_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> fractura::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &self.scenario {
            c.set("scenario", s)?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| fractura::Error::InvalidParameter(format!("--set expects key=value, got '{kv}'")))?;
            c.set(k, v)?;
        }
        if let Some(v) = self.tol_max {
            c.tol_max = Some(v);
        }
        if let Some(v) = self.rho_inf {
            c.driver.rho_inf = v;
        }
        if let Some(v) = self.chi {
            c.driver.chi = v;
        }
        if self.baseline_iteration_count {
            c.baseline_iteration_count = true;
        }
        if let Some(p) = &self.mesh_file {
            c.mesh_file = Some(p.clone());
        }
        if let Some(p) = &self.out {
            c.out = p.clone();
        }
        Ok(c)
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("FRACTURA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn convergence() -> fractura::Result<()> {
    let t = 2.0 * std::f64::consts::PI;
    let steps = [100usize, 200, 400, 800];
    println!("generalized-alpha on u'' = -u over one period");
    for rho in [0.0, 0.5, 1.0] {
        let a = alpha_params(rho)?;
        let mut errs = Vec::new();
        for &n in &steps {
            let (u, v) = oscillator(1.0, 1.0, 0.0, t / n as f64, n, &a)?;
            errs.push(((u - 1.0).powi(2) + v * v).sqrt());
        }
        let errs_s: Vec<String> = errs.iter().map(|e| format!("{e:.3e}")).collect();
        let orders: Vec<String> = errs.windows(2).map(|w| format!("{:.3}", (w[0] / w[1]).log2())).collect();
        println!("  rho_inf = {rho:.1}: errors {}, orders {}", errs_s.join(" "), orders.join(" "));
    }
    println!("steady 1D phase-field profile");
    let m = branching_preset(Scale::Desk).material;
    for cells in [2.5, 5.0, 10.0, 20.0] {
        let r = profile_1d(&m, m.ell / cells)?;
        println!("  h = ell/{cells}: max error {:.3e}, dissipation/Gc {:.5}", r.linf, r.dissipation_ratio);
    }
    Ok(())
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => args.config().and_then(|c| io::run(&c)).map(|a| {
            println!("{}", a.summary.to_json());
            a.summary.aborted.is_none()
        }),
        Command::ValidateConfig(args) => args.config().and_then(|c| {
            let (s, d) = c.validate()?;
            let v =
                serde_json::json!({ "scenario": s, "driver": d, "out": c.out, "cadence": c.cadence, "seed": c.seed });
            println!("{}", serde_json::to_string_pretty(&v).expect("config serializes"));
            Ok(true)
        }),
        Command::Convergence => convergence().map(|_| true),
        Command::Profile1d { ell, cells_per_ell } => {
            let mut m = branching_preset(Scale::Desk).material;
            m.ell = ell;
            profile_1d(&m, ell / cells_per_ell).map(|r| {
                println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
                r.linf <= 2e-2 && (r.dissipation_ratio - 1.0).abs() <= 0.02
            })
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
