//! Line representations and the exact conversions between them.
//!
//! Three parameterizations of a 3D line expressed in the camera frame:
//!
//! * [`PluckerLine`]: binormalized Plücker coordinates, a unit direction `d`,
//!   a unit moment `m` (normal of the interpretation plane) and the depth `l`,
//!   the distance from the optical center to the line.
//! * [`MpLine`]: the Moment-Point state `(m, χ)` with `χ = (d × m) / l`, the
//!   view ray of the closest line point scaled by the inverse depth.
//! * [`SphereLine`]: the minimal state `(θ, φ, η₁, η₂)`, with the moment in
//!   spherical angles and `d / l` projected on the two remaining basis vectors.

use nalgebra::{Matrix3, SVector, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Below this norm `p × d` is treated as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Below this norm `χ` is treated as a line at infinity.
pub const INFINITY_TOL: f64 = 1e-12;
/// `|m_z|` above `1 - POLE_TOL` is a pole of the spherical chart.
pub const POLE_TOL: f64 = 1e-9;
/// Tolerance used when validating unit norms and orthogonality on construction.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Skew-symmetric matrix with `skew(a) * b == a.cross(b)`.
pub fn skew(v: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -std::f64::consts::PI && a <= std::f64::consts::PI {
        return a;
    }
    let two_pi = std::f64::consts::TAU;
    let mut w = a.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// A line in binormalized Plücker coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluckerLine {
    direction: Vec3,
    moment: Vec3,
    depth: f64,
}

impl PluckerLine {
    /// Builds a line, checking unit norms, orthogonality and positive depth.
    pub fn new(direction: Vec3, moment: Vec3, depth: f64) -> Result<Self> {
        if !(direction.iter().chain(moment.iter()).all(|c| c.is_finite()) && depth.is_finite()) {
            return Err(Error::InvalidLine("non-finite component".into()));
        }
        if (direction.norm() - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::InvalidLine(format!("|d| = {}", direction.norm())));
        }
        if (moment.norm() - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::InvalidLine(format!("|m| = {}", moment.norm())));
        }
        if moment.dot(&direction).abs() > VALIDATION_TOL {
            return Err(Error::InvalidLine(format!("m.d = {}", moment.dot(&direction))));
        }
        if depth <= 0.0 {
            return Err(Error::InvalidLine(format!("depth = {depth}")));
        }
        Ok(Self { direction, moment, depth })
    }

    /// The line through `point` with unit `direction`.
    pub fn from_point_direction(point: &Vec3, direction: &Vec3) -> Result<Self> {
        let (moment, depth) = moment_from_point_direction(point, direction)?;
        Self::new(*direction, moment, depth)
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn moment(&self) -> Vec3 {
        self.moment
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    /// Point of the line closest to the optical center, `l (d × m)`.
    pub fn closest_point(&self) -> Vec3 {
        self.direction.cross(&self.moment) * self.depth
    }
}

/// Moment-Point line state `(m, χ)`.
///
/// Fields are public because observers carry estimates that are only
/// approximately on the constraint manifold; use [`MpLine::is_valid`] or
/// [`mp_to_plucker`] when the invariants matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpLine {
    pub moment: Vec3,
    pub chi: Vec3,
}

impl MpLine {
    pub fn new(moment: Vec3, chi: Vec3) -> Self {
        Self { moment, chi }
    }

    /// Unit moment, `m ⊥ χ` and `χ ≠ 0`, all within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        (self.moment.norm() - 1.0).abs() <= tol
            && self.moment.dot(&self.chi).abs() <= tol
            && self.chi.norm() > INFINITY_TOL
    }

    /// Normalizes the moment and removes the component of `χ` along it.
    pub fn projected(&self) -> Self {
        let moment = self.moment.normalize();
        let chi = self.chi - moment * moment.dot(&self.chi);
        Self { moment, chi }
    }

    pub fn to_vector(&self) -> SVector<f64, 6> {
        SVector::<f64, 6>::new(
            self.moment.x,
            self.moment.y,
            self.moment.z,
            self.chi.x,
            self.chi.y,
            self.chi.z,
        )
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            moment: Vec3::new(v[0], v[1], v[2]),
            chi: Vec3::new(v[3], v[4], v[5]),
        }
    }

    /// Euclidean distance between the stacked 6-vectors.
    pub fn distance(&self, other: &MpLine) -> f64 {
        ((self.moment - other.moment).norm_squared() + (self.chi - other.chi).norm_squared()).sqrt()
    }
}

/// Sphere line state `(θ, φ, η₁, η₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereLine {
    pub theta: f64,
    pub phi: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl SphereLine {
    pub fn new(theta: f64, phi: f64, eta1: f64, eta2: f64) -> Self {
        Self { theta, phi, eta1, eta2 }
    }

    pub fn basis(&self) -> SphereBasis {
        SphereBasis::new(self.theta, self.phi)
    }

    /// Distance between two sphere states with the azimuth difference wrapped.
    pub fn distance(&self, other: &SphereLine) -> f64 {
        let dt = wrap_angle(self.theta - other.theta);
        (dt * dt
            + (self.phi - other.phi).powi(2)
            + (self.eta1 - other.eta1).powi(2)
            + (self.eta2 - other.eta2).powi(2))
        .sqrt()
    }
}

/// Orthonormal frame attached to the spherical angles of the moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereBasis {
    /// The moment, `m_S(θ, φ)`.
    pub m_s: Vec3,
    /// `∂m_S/∂φ` negated, `m_P(θ, φ)`.
    pub m_p: Vec3,
    /// `m_S × m_P`, which reduces to `(-sin θ, cos θ, 0)`.
    pub m_sp: Vec3,
}

impl SphereBasis {
    pub fn new(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let m_s = Vec3::new(ct * cp, st * cp, sp);
        let m_p = Vec3::new(ct * sp, st * sp, -cp);
        let m_sp = m_s.cross(&m_p);
        Self { m_s, m_p, m_sp }
    }
}

/// A point on a line together with the angle between its view ray and the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePoint {
    pub point: Vec3,
    pub gamma: f64,
}

impl LinePoint {
    pub fn new(point: Vec3, direction: &Vec3) -> Result<Self> {
        let pn = point.norm();
        if pn < DEGENERATE_TOL {
            return Err(Error::DegenerateLine(pn));
        }
        let cos_gamma = (point.dot(direction) / (pn * direction.norm())).clamp(-1.0, 1.0);
        Ok(Self { point, gamma: cos_gamma.acos() })
    }

    /// `‖p‖ sin γ`, the depth of any line through this point at angle γ.
    pub fn depth(&self) -> f64 {
        self.point.norm() * self.gamma.sin()
    }
}

/// Unit moment and depth of the line through `point` with unit `direction`.
pub fn moment_from_point_direction(point: &Vec3, direction: &Vec3) -> Result<(Vec3, f64)> {
    if (direction.norm() - 1.0).abs() > VALIDATION_TOL {
        return Err(Error::InvalidLine(format!("|d| = {}", direction.norm())));
    }
    let cross = point.cross(direction);
    let depth = cross.norm();
    if !(depth >= DEGENERATE_TOL) {
        return Err(Error::DegenerateLine(depth));
    }
    Ok((cross / depth, depth))
}

pub fn plucker_to_mp(line: &PluckerLine) -> MpLine {
    MpLine {
        moment: line.moment,
        chi: line.direction.cross(&line.moment) / line.depth,
    }
}

pub fn mp_to_plucker(state: &MpLine) -> Result<PluckerLine> {
    let chi_norm = state.chi.norm();
    if !(chi_norm >= INFINITY_TOL) {
        return Err(Error::LineAtInfinity(chi_norm));
    }
    // m × (d × m) / l = d / l for orthonormal d, m.
    let direction = state.moment.cross(&state.chi) / chi_norm;
    PluckerLine::new(direction, state.moment, 1.0 / chi_norm)
}

pub fn plucker_to_sphere(line: &PluckerLine) -> Result<SphereLine> {
    mp_to_sphere(&plucker_to_mp(line))
}

pub fn sphere_to_plucker(state: &SphereLine) -> Result<PluckerLine> {
    mp_to_plucker(&sphere_to_mp(state))
}

/// Direct Moment-Point to Sphere conversion; `d / l = m × χ`.
pub fn mp_to_sphere(state: &MpLine) -> Result<SphereLine> {
    let m = state.moment;
    if m.z.abs() > 1.0 - POLE_TOL {
        return Err(Error::SphericalSingularity(m.z));
    }
    let theta = m.y.atan2(m.x);
    let phi = m.z.clamp(-1.0, 1.0).asin();
    let basis = SphereBasis::new(theta, phi);
    let scaled_direction = m.cross(&state.chi);
    Ok(SphereLine {
        theta,
        phi,
        eta1: basis.m_p.dot(&scaled_direction),
        eta2: basis.m_sp.dot(&scaled_direction),
    })
}

/// Direct Sphere to Moment-Point conversion; `χ = (η₁ m_P + η₂ m_S × m_P) × m_S`.
pub fn sphere_to_mp(state: &SphereLine) -> MpLine {
    let b = state.basis();
    let scaled_direction = b.m_p * state.eta1 + b.m_sp * state.eta2;
    MpLine {
        moment: b.m_s,
        chi: scaled_direction.cross(&b.m_s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit(v: [f64; 3]) -> Option<Vec3> {
        let v = Vec3::from(v);
        (v.norm() > 1e-3).then(|| v.normalize())
    }

    prop_compose! {
        fn arb_line()(p in prop::array::uniform3(-5.0f64..5.0), d in prop::array::uniform3(-1.0f64..1.0))
            -> Option<PluckerLine> {
            let d = unit(d)?;
            let p = Vec3::from(p);
            if p.cross(&d).norm() < 1e-3 { return None; }
            PluckerLine::from_point_direction(&p, &d).ok()
        }
    }

    #[test]
    fn axis_aligned_moment() {
        let (m, l) = moment_from_point_direction(&Vec3::new(0.0, 0.0, 2.0), &Vec3::x()).unwrap();
        assert_relative_eq!(m, Vec3::new(0.0, 1.0, 0.0));
        assert_relative_eq!(l, 2.0);
    }

    #[test]
    fn line_through_origin_is_degenerate() {
        let r = moment_from_point_direction(&Vec3::new(0.0, 0.0, 1.0), &Vec3::z());
        assert!(matches!(r, Err(Error::DegenerateLine(_))));
    }

    #[test]
    fn generic_point_moment_invariants() {
        let p = Vec3::new(1.0, 1.0, 3.0);
        let d = Vec3::y();
        let (m, l) = moment_from_point_direction(&p, &d).unwrap();
        let expected = p.cross(&d);
        assert_relative_eq!(m, expected / expected.norm(), epsilon = 1e-15);
        assert!(m.dot(&d).abs() < 1e-12);
        assert!((m.norm() - 1.0).abs() < 1e-12);
        let lp = LinePoint::new(p, &d).unwrap();
        assert_relative_eq!(lp.depth(), l, epsilon = 1e-12);
    }

    #[test]
    fn plucker_mp_examples() {
        let line = PluckerLine::new(Vec3::x(), Vec3::y(), 2.0).unwrap();
        let mp = plucker_to_mp(&line);
        assert_relative_eq!(mp.chi, Vec3::new(0.0, 0.0, 0.5));
        let back = mp_to_plucker(&mp).unwrap();
        assert_relative_eq!(back.direction(), Vec3::x());
        assert_relative_eq!(back.depth(), 2.0);
        let zero = MpLine::new(Vec3::y(), Vec3::zeros());
        assert!(matches!(mp_to_plucker(&zero), Err(Error::LineAtInfinity(_))));
    }

    #[test]
    fn sphere_examples() {
        let line = PluckerLine::new(Vec3::y(), Vec3::x(), 3.0).unwrap();
        let s = plucker_to_sphere(&line).unwrap();
        assert_relative_eq!(s.theta, 0.0);
        assert_relative_eq!(s.phi, 0.0);

        let pole = PluckerLine::new(Vec3::x(), Vec3::z(), 1.0).unwrap();
        assert!(matches!(plucker_to_sphere(&pole), Err(Error::SphericalSingularity(_))));

        let s = SphereLine::new(0.0, 0.0, 0.0, 0.5);
        let line = sphere_to_plucker(&s).unwrap();
        assert_relative_eq!(line.moment(), Vec3::x(), epsilon = 1e-15);
        assert_relative_eq!(line.depth(), 2.0, epsilon = 1e-15);
        assert!(line.moment().dot(&line.direction()).abs() < 1e-15);

        let inf = SphereLine::new(0.3, 0.2, 0.0, 0.0);
        assert!(matches!(sphere_to_plucker(&inf), Err(Error::LineAtInfinity(_))));
    }

    #[test]
    fn sphere_basis_is_orthonormal() {
        let b = SphereBasis::new(0.7, -0.4);
        assert_relative_eq!(b.m_s.dot(&b.m_p), 0.0, epsilon = 1e-15);
        assert_relative_eq!(b.m_sp, Vec3::new(-(0.7f64).sin(), (0.7f64).cos(), 0.0), epsilon = 1e-15);
    }

    #[test]
    fn wrap_angle_range() {
        assert_relative_eq!(wrap_angle(3.0 * std::f64::consts::PI), std::f64::consts::PI);
        assert_relative_eq!(wrap_angle(-0.5), -0.5);
        assert_relative_eq!(wrap_angle(7.0), 7.0 - std::f64::consts::TAU);
    }

    proptest! {
        #[test]
        fn mp_round_trip(line in arb_line()) {
            let Some(line) = line else { return Ok(()) };
            let mp = plucker_to_mp(&line);
            prop_assert!((mp.chi.norm() * line.depth() - 1.0).abs() < 1e-12);
            let back = mp_to_plucker(&mp).unwrap();
            prop_assert!((back.direction() - line.direction()).amax() < 1e-12);
            prop_assert!((back.moment() - line.moment()).amax() < 1e-12);
            prop_assert!((back.depth() - line.depth()).abs() < 1e-12 * line.depth().max(1.0));
        }

        #[test]
        fn mp_to_plucker_satisfies_invariants(m in prop::array::uniform3(-1.0f64..1.0),
                                              c in prop::array::uniform3(-2.0f64..2.0)) {
            let Some(m) = unit(m) else { return Ok(()) };
            let c = Vec3::from(c);
            let chi = c - m * m.dot(&c);
            if chi.norm() < 1e-6 { return Ok(()); }
            let line = mp_to_plucker(&MpLine::new(m, chi)).unwrap();
            prop_assert!((line.direction().norm() - 1.0).abs() < 1e-12);
            prop_assert!(line.direction().dot(&line.moment()).abs() < 1e-12);
            prop_assert!(line.depth() > 0.0);
        }

        #[test]
        fn sphere_round_trip(line in arb_line()) {
            let Some(line) = line else { return Ok(()) };
            if line.moment().z.abs() > (std::f64::consts::FRAC_PI_2 - 0.01).sin() { return Ok(()); }
            let s = plucker_to_sphere(&line).unwrap();
            let back = sphere_to_plucker(&s).unwrap();
            prop_assert!((back.direction() - line.direction()).amax() < 1e-10);
            prop_assert!((back.moment() - line.moment()).amax() < 1e-10);
            prop_assert!((back.depth() - line.depth()).abs() < 1e-10 * line.depth().max(1.0));
            prop_assert!(back.moment().dot(&back.direction()).abs() < 1e-12);
        }

        #[test]
        fn moment_independent_of_point_choice(line in arb_line(), t in -10.0f64..10.0) {
            let Some(line) = line else { return Ok(()) };
            let p = line.closest_point() + line.direction() * 0.37;
            let (m1, l1) = moment_from_point_direction(&p, &line.direction()).unwrap();
            let (m2, l2) = moment_from_point_direction(&(p + line.direction() * t), &line.direction()).unwrap();
            prop_assert!((m1 - m2).amax() < 1e-10);
            prop_assert!((l1 - l2).abs() < 1e-10);
        }
    }
}
