//! Runs the model-based line observer in both representations against a
//! simulated line and prints the estimation error once per second.

use lineobs::geometry::{mp_to_sphere, plucker_to_mp};
use lineobs::dynamics::euler_step;
use lineobs::mlo::{MloMpState, MloSphereState};
use lineobs::sim::excitation_twist;
use lineobs::{PluckerLine, SphereLine, Vec3, DEFAULT_DT};

fn main() -> lineobs::Result<()> {
    let line = PluckerLine::from_point_direction(&Vec3::new(-0.2, 0.4, 1.8), &Vec3::new(1.0, 0.3, 0.4).normalize())?;
    let mut truth = plucker_to_mp(&line);
    let chi0 = truth.moment.cross(&Vec3::z()).normalize() * 0.1;

    let mut mp = MloMpState::new(truth.moment, chi0, 1000.0)?;
    let s = mp_to_sphere(&truth)?;
    let mut sphere = MloSphereState::new(SphereLine::new(s.theta, s.phi, 0.0, 0.0), 1000.0)?;

    println!("{:>5} {:>12} {:>12}", "t", "m-p error", "sphere error");
    for k in 0..=150 {
        let t = k as f64 * DEFAULT_DT;
        if k % 30 == 0 {
            let st = mp_to_sphere(&truth)?;
            println!("{t:5.1} {:12.3e} {:12.3e}", mp.estimate().distance(&truth), sphere.estimate().distance(&st));
        }
        let u = excitation_twist(t, 0.3);
        let y = truth.moment;
        let ys = mp_to_sphere(&truth)?;
        mp = mp.step(&y, &u, DEFAULT_DT);
        sphere = sphere.step((ys.theta, ys.phi), &u, DEFAULT_DT)?;
        truth = euler_step(&truth, &u, DEFAULT_DT);
    }
    Ok(())
}
