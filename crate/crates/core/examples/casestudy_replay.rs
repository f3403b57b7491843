//! Replays the default highway case study and prints per-phase medians of
//! actor importance and prediction error.
//!
//! cargo run --release --example casestudy_replay -- [seed] [out_dir]

use std::path::PathBuf;
use std::time::Instant;

use actor_risk::harness::{cmd_run, summarize, RunConfig};
use actor_risk::scenario::{generate_case_study, CaseStudyParams};

fn main() -> actor_risk::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let out: PathBuf = args
        .next()
        .unwrap_or_else(|| "target/casestudy".into())
        .into();

    let scenario = generate_case_study(&CaseStudyParams::default())?;
    let cfg = RunConfig {
        seed,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let run = cmd_run(&scenario, &cfg, &out)?;
    println!("{} records in {:.1?}", run.records.len(), start.elapsed());

    println!(
        "{:<12} {:>5} {:>10} {:>10}",
        "phase", "actor", "gamma_med", "error_med"
    );
    for s in summarize(&run.records) {
        println!(
            "{:<12} {:>5} {:>10.3} {:>10.3}",
            s.phase,
            s.actor_id,
            s.gamma.map_or(f64::NAN, |q| q.median),
            s.prediction_error.map_or(f64::NAN, |q| q.median),
        );
    }
    println!("artifacts in {}", out.display());
    Ok(())
}
