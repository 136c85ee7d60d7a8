use crate::dynamics::CameraTwist;
use crate::geometry::Vec3;

use super::scenario::Trajectory;

const OMEGA_FREQ: [f64; 3] = [0.7, 1.1, 0.9];
const OMEGA_PHASE: [f64; 3] = [0.3, 2.2, 1.3];

/// Smooth camera motion with `‖ν‖ = cap` and `‖ω‖ ≤ cap / 2`.
///
/// `ν` tumbles over the sphere of directions (azimuth turning at 1.3 rad/s,
/// elevation swinging within ±1.2 rad), so its projection on any fixed
/// moment changes sign only briefly. With the default cap the camera stays
/// within 0.7 m of where it started.
pub fn excitation_twist(t: f64, cap: f64) -> CameraTwist {
    let az = 1.3 * t + 0.4;
    let el = 1.2 * (2.1 * t + 0.5).sin();
    let nu = Vec3::new(az.cos() * el.cos(), az.sin() * el.cos(), el.sin()) * cap;
    let wave = |i: usize| (OMEGA_FREQ[i] * t + OMEGA_PHASE[i]).sin();
    let omega = Vec3::new(wave(0), wave(1), wave(2)) * (0.5 * cap / 3f64.sqrt());
    CameraTwist::new(nu, omega)
}

/// Whether `t` falls in an odd second, where alternating patterns switch
/// to their non-observable motion.
pub fn in_null_interval(t: f64) -> bool {
    // Sample times are k·dt; the offset keeps t = 1.0 − ε rounding on the right side.
    ((t + 1e-9).floor() as i64).rem_euclid(2) == 1
}

/// Twist of an alternating pattern for the line with true moment `m`.
pub fn alternating_twist(t: f64, trajectory: Trajectory, m: &Vec3, cap: f64) -> CameraTwist {
    let base = excitation_twist(t, cap);
    if !in_null_interval(t) {
        return base;
    }
    let in_plane = || {
        let n = m.normalize();
        base.nu - n * n.dot(&base.nu)
    };
    match trajectory {
        Trajectory::Excitation => base,
        Trajectory::AlternatingNullNu => CameraTwist::zero(),
        Trajectory::AlternatingNullNuWithOmega => CameraTwist::new(Vec3::zeros(), base.omega),
        Trajectory::AlternatingInPlaneNu => CameraTwist::new(in_plane(), Vec3::zeros()),
        Trajectory::AlternatingInPlaneNuWithOmega => CameraTwist::new(in_plane(), base.omega),
    }
}

/// Twist applied at time `t` under any pattern.
pub fn scenario_twist(t: f64, trajectory: Trajectory, m: &Vec3, cap: f64) -> CameraTwist {
    alternating_twist(t, trajectory, m, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{euler_step, DEFAULT_DT};
    use crate::geometry::plucker_to_mp;
    use crate::sim::scenario::{sample_line, stream_rng, LINE_STREAM};

    #[test]
    fn excitation_respects_cap() {
        let mut pos = Vec3::zeros();
        for k in 0..10_000 {
            let u = excitation_twist(k as f64 * 0.01, 0.5);
            assert!(u.nu.norm() <= 0.5 + 1e-12 && u.omega.norm() <= 0.5 + 1e-12);
            pos += u.nu * 0.01;
            assert!(pos.norm() < 0.7, "{}", pos.norm());
        }
        assert_eq!(excitation_twist(0.0, 0.5), excitation_twist(0.0, 0.5));
    }

    #[test]
    fn excitation_keeps_lines_observable() {
        let mut rng = stream_rng(99, LINE_STREAM);
        let (mut small, mut total) = (0usize, 0usize);
        for _ in 0..100 {
            let mut x = plucker_to_mp(&sample_line(&mut rng, 5.0, 1.0).unwrap());
            for k in 0..300 {
                let u = excitation_twist(k as f64 * DEFAULT_DT, 0.5);
                small += (u.nu.dot(&x.moment).abs() < 1e-3) as usize;
                total += 1;
                x = euler_step(&x, &u, DEFAULT_DT);
            }
        }
        assert!((small as f64) < 0.05 * total as f64, "{small}/{total}");
    }

    #[test]
    fn null_intervals() {
        let m = Vec3::new(0.3, 0.4, -0.2).normalize();
        for k in 30..60 {
            let t = k as f64 * DEFAULT_DT;
            assert!(in_null_interval(t));
            assert_eq!(alternating_twist(t, Trajectory::AlternatingNullNu, &m, 0.5), CameraTwist::zero());
            let u = alternating_twist(t, Trajectory::AlternatingNullNuWithOmega, &m, 0.5);
            assert_eq!(u.nu, Vec3::zeros());
            assert_ne!(u.omega, Vec3::zeros());
            let u = alternating_twist(t, Trajectory::AlternatingInPlaneNu, &m, 0.5);
            assert!(u.nu.dot(&m).abs() < 1e-12 && u.omega == Vec3::zeros());
            let u = alternating_twist(t, Trajectory::AlternatingInPlaneNuWithOmega, &m, 0.5);
            assert!(u.nu.dot(&m).abs() < 1e-12 && u.omega != Vec3::zeros());
        }
        for k in (0..30).chain(60..90) {
            let t = k as f64 * DEFAULT_DT;
            assert_eq!(alternating_twist(t, Trajectory::AlternatingNullNu, &m, 0.5), excitation_twist(t, 0.5));
        }
    }

    #[test]
    fn plant_stays_valid_for_every_pattern() {
        for seed in 0..300 {
            let mut rng = stream_rng(seed, LINE_STREAM);
            let line = sample_line(&mut rng, 5.0, 1.0).unwrap();
            for traj in Trajectory::ALL {
                let mut x = plucker_to_mp(&line);
                for k in 0..300 {
                    let u = scenario_twist(k as f64 * DEFAULT_DT, traj, &x.moment, 0.5);
                    x = euler_step(&x, &u, DEFAULT_DT);
                    assert!(x.chi.norm() < 10.0, "seed {seed} {traj} k={k}");
                }
            }
        }
    }
}
