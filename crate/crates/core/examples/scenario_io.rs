//! Scenario documents: generate the highway case study, write it as TOML,
//! read it back and slice a ground-truth window.
//!
//! cargo run --example scenario_io -- [path]

use actor_risk::scenario::{generate_case_study, load_scenario, save_scenario, CaseStudyParams};

fn main() -> actor_risk::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "target/casestudy.toml".into());
    let scenario = generate_case_study(&CaseStudyParams::default())?;
    let text = save_scenario(&scenario)?;
    std::fs::write(&path, &text)?;
    println!("wrote {} ({} bytes)", path, text.len());

    let loaded = load_scenario(&std::fs::read_to_string(&path)?)?;
    assert_eq!(loaded, scenario);
    for p in &loaded.phases {
        println!(
            "  {:<12} ticks {:>4}..{:>4}",
            p.name.as_str(),
            p.start_tick,
            p.end_tick
        );
    }

    let t = loaded
        .phase_span(actor_risk::scenario::PhaseName::Brake)
        .map_or(0, |p| p.start_tick);
    let window = loaded.slice_world(t, 30)?;
    for tr in window.iter() {
        let (a, b) = (tr.first().unwrap(), tr.last().unwrap());
        println!(
            "  {:>4}: x {:8.1} -> {:8.1}, speed {:5.2} -> {:5.2}",
            tr.actor_id, a.x, b.x, a.speed, b.speed
        );
    }
    Ok(())
}
