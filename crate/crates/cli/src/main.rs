use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gasman::netsim::{run_scenario_with, scenarios, summarize_csv, write_outputs, RunOptions, ScenarioConfig, SimError};
use gasman::protocol::{initialize_network, NetworkParams};
use gasman::time::SimDuration;
use gasman::zkp::{run_protocol, CheatingProver, HonestProver, RandomChallenger, Transcript};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "gasman", version, about = "Ad-hoc network membership simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trace, metrics and attack report.
    Run {
        /// Scenario file, or one of the built-in names (table1, soak50, attacks_all).
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the number of proof rounds.
        #[arg(long)]
        rounds: Option<usize>,
        /// Override the threshold period, in seconds.
        #[arg(long)]
        period: Option<f64>,
        #[arg(long)]
        no_invariant_checks: bool,
    },
    /// Run honest and cheating proofs on a fresh network.
    ZkpDemo {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        degree: usize,
        #[arg(long, default_value_t = 20)]
        rounds: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Cheating sessions used to measure the acceptance rate.
        #[arg(long, default_value_t = 10_000)]
        sessions: usize,
    },
    /// Print the byte share of each traffic category in a metrics file.
    MetricsSummary { path: PathBuf },
}

const CONFIG_ERROR: u8 = 2;
const INVARIANT_ERROR: u8 = 3;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("gasman: {msg}");
    ExitCode::from(code)
}

fn load(spec: &str) -> Result<ScenarioConfig, String> {
    let path = Path::new(spec);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| format!("{spec}: {e}"))?;
        return ScenarioConfig::from_json(&text).map_err(|e| format!("{spec}: {e}"));
    }
    match scenarios::builtin(spec) {
        Some(cfg) => cfg.map_err(|e| e.to_string()),
        None => Err(format!("{spec}: no such file or built-in scenario")),
    }
}

fn run(
    scenario: &str,
    seed: u64,
    out: &Path,
    rounds: Option<usize>,
    period: Option<f64>,
    check: bool,
) -> ExitCode {
    let mut cfg = match load(scenario) {
        Ok(c) => c,
        Err(e) => return fail(CONFIG_ERROR, e),
    };
    if let Some(l) = rounds {
        cfg.params.rounds = l;
    }
    if let Some(t) = period {
        match SimDuration::from_secs_f64(t) {
            Some(d) => cfg.params.period = d,
            None => return fail(CONFIG_ERROR, format!("--period {t} is not a duration")),
        }
    }
    let opts = RunOptions {
        seed,
        check_invariants: check,
    };
    let result = match run_scenario_with(&cfg, opts) {
        Ok(r) => r,
        Err(e @ SimError::ConfigInvalid(_)) => return fail(CONFIG_ERROR, e),
        Err(e @ SimError::InvariantViolation { .. }) => return fail(INVARIANT_ERROR, e),
        Err(e) => return fail(1, e),
    };
    if let Err(e) = write_outputs(&result, out) {
        return fail(1, format!("{}: {e}", out.display()));
    }
    println!(
        "{}: {} events, {} trace rows, {} bytes{}",
        if cfg.name.is_empty() { scenario } else { &cfg.name },
        result.events,
        result.trace.rows.len(),
        result.metrics.total_bytes(),
        if result.terminated { ", network terminated" } else { "" },
    );
    print!("{}", result.attack_report());
    println!("wrote {}", out.display());
    ExitCode::SUCCESS
}

fn print_rounds(t: &Transcript) {
    for (i, r) in t.rounds.iter().enumerate() {
        println!(
            "  round {:>2}: b={} {}",
            i + 1,
            r.challenge.bit(),
            if r.verified { "ok" } else { "fail" }
        );
    }
}

fn zkp_demo(n: usize, degree: usize, rounds: usize, seed: u64, sessions: usize) -> ExitCode {
    let params = NetworkParams {
        rounds,
        degree,
        ..NetworkParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let setup = match initialize_network(n, &params, &mut rng) {
        Ok(s) => s,
        Err(e) => return fail(CONFIG_ERROR, e),
    };
    let g = setup.graph;
    println!("graph: {} vertices, {} edges", g.vertex_count(), g.edge_count());
    let mut ch = RandomChallenger::new(ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));

    let mut honest = HonestProver::new(g.clone(), setup.cycle).expect("dealer cycle is valid");
    let t = run_protocol(&mut honest, &g, rounds, &mut rng, &mut ch).expect("rounds validated");
    println!("honest prover:");
    print_rounds(&t);
    println!("  {} after {} rounds", verdict(&t), t.rounds.len());

    let mut cheat = CheatingProver::new(g.clone());
    let t = run_protocol(&mut cheat, &g, rounds, &mut rng, &mut ch).expect("rounds validated");
    println!("cheating prover:");
    print_rounds(&t);
    println!("  {} after {} rounds", verdict(&t), t.rounds.len());

    let accepted = (0..sessions)
        .filter(|_| {
            let mut p = CheatingProver::new(g.clone());
            run_protocol(&mut p, &g, rounds, &mut rng, &mut ch)
                .expect("rounds validated")
                .accepted()
        })
        .count();
    let rate = if sessions == 0 { 0.0 } else { accepted as f64 / sessions as f64 };
    println!(
        "cheater accepted in {accepted} of {sessions} sessions: rate {rate:.6} (2^-{rounds} = {:.6})",
        0.5f64.powi(rounds as i32)
    );
    ExitCode::SUCCESS
}

fn verdict(t: &Transcript) -> &'static str {
    if t.accepted() {
        "accept"
    } else {
        "reject"
    }
}

fn metrics_summary(path: &Path) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(CONFIG_ERROR, format!("{}: {e}", path.display())),
    };
    let s = match summarize_csv(&text) {
        Ok(s) => s,
        Err(e) => return fail(CONFIG_ERROR, format!("{}: {e}", path.display())),
    };
    for (name, bytes, share) in &s.rows {
        println!("{name:<14} {bytes:>12} {:>6.2}%", share * 100.0);
    }
    println!("{:<14} {:>12}", "total", s.total);
    let yes = |b: bool| if b { "yes" } else { "no" };
    println!("zkp below 10%: {}", yes(s.zkp_below_10));
    println!("proof_of_life within 80-95%: {}", yes(s.pol_in_band));
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            scenario,
            seed,
            out,
            rounds,
            period,
            no_invariant_checks,
        } => run(&scenario, seed, &out, rounds, period, !no_invariant_checks),
        Command::ZkpDemo {
            n,
            degree,
            rounds,
            seed,
            sessions,
        } => zkp_demo(n, degree, rounds, seed, sessions),
        Command::MetricsSummary { path } => metrics_summary(&path),
    }
}
