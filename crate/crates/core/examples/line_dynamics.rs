//! Integrates the line motion seen by a moving camera in both
//! representations and compares them after one second.

use lineobs::dynamics::{euler_step, euler_step_sphere, mp_dynamics};
use lineobs::geometry::{mp_to_sphere, plucker_to_mp, sphere_to_mp};
use lineobs::{CameraTwist, PluckerLine, Vec3, DEFAULT_DT};

fn main() -> lineobs::Result<()> {
    let line = PluckerLine::from_point_direction(&Vec3::new(0.5, 0.1, 1.5), &Vec3::new(0.2, 1.0, 0.1).normalize())?;
    let twist = CameraTwist::new(Vec3::new(0.1, 0.05, 0.2), Vec3::new(0.0, 0.1, -0.05));

    let mut mp = plucker_to_mp(&line);
    let mut sphere = mp_to_sphere(&mp)?;
    let rate = mp_dynamics(&mp, &twist);
    println!("initial dm = {:?}", rate.dm.as_slice());
    println!("initial dchi = {:?}", rate.dchi.as_slice());

    for _ in 0..30 {
        mp = euler_step(&mp, &twist, DEFAULT_DT);
        sphere = euler_step_sphere(&sphere, &twist, DEFAULT_DT)?;
    }
    println!("m-p after 1 s:    m = {:?}", mp.moment.as_slice());
    println!("sphere after 1 s: m = {:?}", sphere_to_mp(&sphere).moment.as_slice());
    println!("discrete mismatch {:.3e}", mp.distance(&sphere_to_mp(&sphere)));
    Ok(())
}
