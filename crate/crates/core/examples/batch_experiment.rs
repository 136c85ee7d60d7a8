//! Parses an experiment spec in memory, runs it in parallel and aggregates
//! the median depth error per observer.

use lineobs::cli::{plotdata, run_batch, ExperimentSpec, Metric};

const SPEC: &str = "\
name = demo
seed = 10
runs = 4
duration = 4
noise_std = 0, 0.04
mlo_mp = 1000
mho_mp = 7:0.014
";

fn main() -> lineobs::Result<()> {
    let spec = ExperimentSpec::parse(SPEC)?;
    let summaries = run_batch(&spec, 0, 2, None)?;
    println!("{} summary rows", summaries.len());
    for row in plotdata(&summaries, Metric::DepthError) {
        println!(
            "{:7} {:14} noise {:<5} median eps_l {:.4} ({} of {} finite)",
            row.observer, row.parameter, row.noise_std, row.median, row.finite, row.runs
        );
    }
    Ok(())
}
