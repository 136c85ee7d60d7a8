//! Builds a line from a point and a direction and converts it between the
//! Plücker, moment/inverse-depth and spherical representations.

use lineobs::geometry::{mp_to_plucker, mp_to_sphere, plucker_to_mp, sphere_to_mp};
use lineobs::{PluckerLine, Vec3};

fn main() -> lineobs::Result<()> {
    let line = PluckerLine::from_point_direction(&Vec3::new(0.3, -0.2, 2.0), &Vec3::new(1.0, 1.0, 0.2).normalize())?;
    println!("plucker   d = {:?}", line.direction().as_slice());
    println!("          m = {:?}", line.moment().as_slice());
    println!("          l = {:.6}", line.depth());
    println!("closest point {:?}", line.closest_point().as_slice());

    let mp = plucker_to_mp(&line);
    println!("m-p       chi = {:?}", mp.chi.as_slice());

    let sphere = mp_to_sphere(&mp)?;
    println!(
        "sphere    theta = {:.6} phi = {:.6} eta = ({:.6}, {:.6})",
        sphere.theta, sphere.phi, sphere.eta1, sphere.eta2
    );

    let back = mp_to_plucker(&sphere_to_mp(&sphere))?;
    println!("round trip direction error {:.3e}", (back.direction() - line.direction()).norm());
    println!("round trip depth error     {:.3e}", (back.depth() - line.depth()).abs());
    Ok(())
}
