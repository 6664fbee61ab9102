use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hyper_toffoli::analysis::config::{parse_scenario, ScenarioConfig};
use hyper_toffoli::analysis::metrics::{conditional_fidelity, eta_d, eta_t};
use hyper_toffoli::analysis::rus::{repeat_until_success, GateChannel, RusEstimate};
use hyper_toffoli::analysis::sweep::{run_sweep, write_csv, write_csv_file, SweepRow, SweepSpec};
use hyper_toffoli::analysis::AnalysisError;
use hyper_toffoli::circuits::GateProgram;
use hyper_toffoli::Error;

const TABLE3: &str = include_str!("../scenarios/table3.cfg");
const BOOKKEEPING_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "hyper-toffoli", version, about = "Error-detected hyperparallel Toffoli gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one gate and print the outcome of every branch.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep the coupling strength and write a CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print efficiencies at g/kappa = 0.5, 1.5 and 2.4.
    Table3,
    /// Estimate the success probability when failed attempts are repeated.
    Rus {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        rounds: u32,
        #[arg(long)]
        trials: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Simulate { config } => simulate(&config),
        Command::Sweep { config, out } => sweep(&config, out.as_deref()),
        Command::Table3 => table3(),
        Command::Rus { config, rounds, trials } => rus(&config, rounds, trials),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn simulate(path: &Path) -> Result<(), Error> {
    let cfg = ScenarioConfig::load(path)?;
    let pair = cfg.pair()?;
    let input = cfg.input();
    let program = GateProgram::new(cfg.variant, pair);
    let outcomes = program.run(&input, &cfg.mode)?;

    println!("variant          {}", cfg.variant);
    println!("g/kappa          {}", cfg.g_over_kappa);
    println!("gamma/kappa      {}", cfg.gamma_over_kappa);
    println!("r1               {:.12}", pair.r1);
    println!("r0               {:.12}", pair.r0);
    println!("eta_T            {:.12}", eta_t(&pair));
    println!("eta_D            {:.12}", eta_d(&pair));
    println!("success prob.    {:.12}", outcomes[0].success_probability);
    println!("branches         {}", outcomes.len());

    for o in &outcomes {
        let total = o.success_probability + o.heralded_mass() + o.loss;
        if (total - 1.0).abs() > BOOKKEEPING_TOL {
            return Err(Error::Invariant(format!("probability bookkeeping sums to {total}")));
        }
        let spins: Vec<String> = o.spin_outcomes.iter().map(|(s, v)| format!("{s}={v}")).collect();
        let fixes: Vec<String> = o.corrections_applied.iter().map(|c| c.to_string()).collect();
        let fidelity = conditional_fidelity(o, &input)?;
        println!(
            "  [{}] p={:.6} fidelity={:.12} corrections: {}",
            spins.join(" "),
            o.branch_probability,
            fidelity,
            if fixes.is_empty() { "none".to_string() } else { fixes.join(", ") }
        );
    }
    println!("heralded mass    {:.12}", outcomes[0].heralded_mass());
    println!("silent loss      {:.12}", outcomes[0].loss);
    Ok(())
}

fn sweep_spec_of(cfg: &ScenarioConfig) -> SweepSpec {
    cfg.sweep_spec().unwrap_or_else(|| {
        let mut one = cfg.clone();
        one.sweep = Some(hyper_toffoli::analysis::config::SweepGrid::List(vec![cfg.g_over_kappa]));
        one.sweep_spec().expect("grid set")
    })
}

fn sweep(path: &Path, out: Option<&Path>) -> Result<(), Error> {
    let cfg = ScenarioConfig::load(path)?;
    let rows = run_sweep(&sweep_spec_of(&cfg))?;
    let target = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.as_ref().map(|o| path.parent().unwrap_or(Path::new(".")).join(o)));
    match target {
        Some(file) => {
            write_csv_file(&rows, &file)?;
            eprintln!("wrote {} rows to {}", rows.len(), file.display());
        }
        None => write_stdout(&rows)?,
    }
    Ok(())
}

fn write_stdout(rows: &[SweepRow]) -> Result<(), Error> {
    let stdout = std::io::stdout();
    let io = |source| AnalysisError::Io { path: PathBuf::from("<stdout>"), source };
    let mut lock = stdout.lock();
    write_csv(rows, &mut lock).map_err(io)?;
    lock.flush().map_err(io)?;
    Ok(())
}

fn table3() -> Result<(), Error> {
    let cfg = parse_scenario(TABLE3)?;
    let rows = run_sweep(&sweep_spec_of(&cfg))?;
    println!("{:>8} {:>10} {:>10} {:>16} {:>14}", "g/kappa", "eta_T", "eta_D", "trace", "fidelity");
    for r in &rows {
        println!(
            "{:>8} {:>9.2}% {:>9.2}% {:>16.12} {:>14.12}",
            r.g_over_kappa,
            100.0 * r.eta_t,
            100.0 * r.eta_d,
            r.trace,
            r.fidelity
        );
    }
    Ok(())
}

fn rus(path: &Path, rounds: u32, trials: u64) -> Result<(), Error> {
    let cfg = ScenarioConfig::load(path)?;
    let pair = cfg.pair()?;
    let program = GateProgram::new(cfg.variant, pair);
    let channel = GateChannel::simulate(&program, &cfg.input())?;
    let est = repeat_until_success(&channel, rounds, cfg.seed, trials)?;
    println!("variant          {}", cfg.variant);
    println!("single attempt   {:.12}", channel.p_success);
    println!("  heralded       {:.12}", channel.p_herald);
    println!("  lost           {:.12}", channel.p_loss);
    println!("rounds           {rounds}");
    println!("trials           {trials}");
    println!("estimate         {:.6} +/- {:.6}", est.estimate, est.std_error);
    println!("analytic         {:.6}", RusEstimate::analytic(channel.p_success, rounds));
    println!("heralded rounds  {}", est.heralded_rounds);
    println!("lost rounds      {}", est.lost_rounds);
    Ok(())
}
