//! Moving horizon observer on noisy moment measurements.

use lineobs::dynamics::euler_step;
use lineobs::geometry::plucker_to_mp;
use lineobs::mho::{MpHorizonObserver, MpModel};
use lineobs::sim::{excitation_twist, NoiseModel};
use lineobs::simplex::SimplexConfig;
use lineobs::{MpLine, PluckerLine, Vec3, DEFAULT_DT};

fn main() -> lineobs::Result<()> {
    let line = PluckerLine::from_point_direction(&Vec3::new(0.4, 0.4, 1.6), &Vec3::new(-0.3, 1.0, 0.2).normalize())?;
    let mut truth = plucker_to_mp(&line);
    let initial = MpLine::new(truth.moment, truth.moment.cross(&Vec3::x()).normalize() * 0.1);

    let mut obs = MpHorizonObserver::new(MpModel, 7, 0.014, DEFAULT_DT, initial)?;
    let mut noise = NoiseModel::new(0.02, 1);
    let solver = SimplexConfig::for_dim(6);

    for k in 0..150 {
        let t = k as f64 * DEFAULT_DT;
        let u = excitation_twist(t, 0.3);
        let est = obs.update(noise.perturb_moment(&truth.moment), u, &solver)?;
        if k % 15 == 0 {
            let iters = est.solver.as_ref().map_or(0, |r| r.iterations);
            println!(
                "t = {t:4.1}  error = {:.4}  cost = {:.3e}  prediction cost = {:.3e}  iterations = {iters}",
                est.state_now.distance(&truth),
                est.cost,
                est.prediction_cost
            );
        }
        truth = euler_step(&truth, &u, DEFAULT_DT);
    }
    Ok(())
}
