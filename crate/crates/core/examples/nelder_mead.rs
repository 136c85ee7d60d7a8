//! Derivative-free minimization of the Rosenbrock function.

use lineobs::simplex::{minimize, SimplexConfig};

fn main() -> lineobs::Result<()> {
    let rosenbrock = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let r = minimize(rosenbrock, &[-1.2, 1.0], &SimplexConfig::for_dim(2))?;
    println!("x = {:?}", r.x_min);
    println!("f = {:e}", r.f_min);
    println!("iterations = {} evaluations = {} converged = {}", r.iterations, r.evaluations, r.converged);
    Ok(())
}
