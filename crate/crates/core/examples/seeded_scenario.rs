//! Runs one seeded scenario with all four observers, writes the per-step CSV
//! to a temporary file and prints the summary lines.

use lineobs::sim::io::{write_run_csv, write_summary_jsonl};
use lineobs::sim::{run_scenario, summarize, ObserverSpec, ScenarioConfig};

fn main() -> lineobs::Result<()> {
    let config = ScenarioConfig { seed: 42, duration: 5.0, noise_std: 0.02, ..ScenarioConfig::default() };
    let observers = [
        ObserverSpec::MloMp { alpha: 1000.0 },
        ObserverSpec::MloSphere { alpha: 1000.0 },
        ObserverSpec::MhoMp { window: 7, mu: 0.014 },
        ObserverSpec::MhoSphere { window: 7, mu: 0.014 },
    ];
    let record = run_scenario(&config, &observers)?;

    let path = std::env::temp_dir().join("lineobs_seed42.csv");
    write_run_csv(&record, std::fs::File::create(&path)?)?;
    println!("wrote {} ({} steps)", path.display(), record.steps.len());

    write_summary_jsonl(&summarize(&record), std::io::stdout().lock())
}
