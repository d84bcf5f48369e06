use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fhtunnel::evolution::Method;
use fhtunnel::scenarios::{self, Job, ValueRange, PRESETS};
use fhtunnel::verification::{run_suite, Suite};
use fhtunnel::Error;

#[derive(Parser)]
#[command(name = "fhtunnel", version, about = "Few-fermion tunneling through asymmetric barriers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Preset name or path to a TOML config file.
    config: String,
    /// Directory for CSV output.
    #[arg(long, default_value = ".")]
    output: PathBuf,
    /// Override the final time.
    #[arg(long)]
    t_max: Option<f64>,
    /// Override the propagator.
    #[arg(long)]
    method: Option<Method>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario and write its trajectory.
    Simulate(RunArgs),
    /// Run a parameter sweep.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Replace the swept values with START:STOP:STEP.
        #[arg(long)]
        range: Option<ValueRange>,
    },
    /// Run the symmetry and Falicov-Kimball checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List bundled presets.
    ListPresets,
}

fn thread_pool(threads: Option<usize>) -> Result<(), Error> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config { field: "threads".into(), message: "must be at least 1".into() });
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn simulate(args: RunArgs) -> Result<(), Error> {
    thread_pool(args.threads)?;
    let mut config = match scenarios::resolve(&args.config)? {
        Job::Scenario(c) => c,
        Job::Sweep(_) => {
            return Err(Error::Config {
                field: "sweep".into(),
                message: format!("`{}` is a sweep; use the `sweep` command", args.config),
            })
        }
    };
    if let Some(t) = args.t_max {
        config.t_max = t;
    }
    if let Some(m) = args.method {
        config.propagator.method = m;
    }
    let (result, path) = scenarios::run_scenario_to_dir(&config, &args.output)?;
    eprintln!("{}: {} samples -> {}", config.name, result.times().len(), path.display());
    Ok(())
}

fn sweep(args: RunArgs, range: Option<ValueRange>) -> Result<(), Error> {
    let mut sweep = match scenarios::resolve(&args.config)? {
        Job::Sweep(s) => s,
        Job::Scenario(_) => {
            return Err(Error::Config {
                field: "sweep".into(),
                message: format!("`{}` has no [sweep] table", args.config),
            })
        }
    };
    if let Some(t) = args.t_max {
        sweep.set_t_max(t);
    }
    if let Some(m) = args.method {
        sweep.base.propagator.method = m;
    }
    if let Some(r) = range {
        sweep.values = r.values()?;
    }
    let (result, path) = scenarios::run_sweep_to_dir(&sweep, &args.output, args.threads)?;
    eprintln!("{}: {} rows -> {}", sweep.base.name, result.rows.len(), path.display());
    Ok(())
}

fn verify(suite: Suite, seed: u64) -> Result<bool, Error> {
    let outcomes = run_suite(suite, seed)?;
    let mut ok = true;
    for o in &outcomes {
        ok &= o.passed();
        println!("{} {o}", if o.passed() { "PASS" } else { "FAIL" });
    }
    println!("{} of {} checks passed", outcomes.iter().filter(|o| o.passed()).count(), outcomes.len());
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => simulate(args).map(|_| true),
        Command::Sweep { run, range } => sweep(run, range).map(|_| true),
        Command::Verify { suite, seed } => verify(suite, seed),
        Command::ListPresets => {
            for (name, text) in PRESETS {
                let about = text.lines().next().unwrap_or("").trim_start_matches('#').trim();
                println!("{name:8} {about}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
