//! Prints the admissible weight bound for a range of window lengths.

use lineobs::stability::{certificate, OperatingEnvelope};
use lineobs::DEFAULT_DT;

fn main() -> lineobs::Result<()> {
    println!("{:>3} {:>10} {:>10} {:>10}", "N", "c_F", "delta", "mu_max");
    for n in 2..=7 {
        let env = OperatingEnvelope::new(0.5, 0.5, 0.2, DEFAULT_DT, n)?;
        let c = certificate(&env)?;
        println!("{n:>3} {:>10.5} {:>10.5} {:>10.6}", c.c_big_f, c.delta, c.mu_max);
    }
    let c = certificate(&OperatingEnvelope::new(0.5, 0.5, 0.2, DEFAULT_DT, 7)?)?;
    println!("mu = 0.014 admitted for N = 7: {}", c.admits(0.014));
    Ok(())
}
