//! Support functions of invariant divisors and their positivity.
//!
//! A divisor `B = Σ b_ρ P_ρ` corresponds to the function `h` with
//! `h(v_ρ) = -b_ρ`, linear on each cone, given on a maximal cone `σ` by some
//! `u_σ` with `<u_σ, v_ρ> = -b_ρ` for the rays of `σ`.

use num_traits::{Signed, Zero};

use crate::error::{invalid, precondition, Result};
use crate::linalg::{dot_mixed, primitive, rat_of, solve_integral, Int, Rat};
use crate::polyhedra::{orthogonal_complement, Cone, Polyhedron};
use crate::toric::{is_proper, orbit_closure, EquivariantSetup};

#[derive(Clone, Debug)]
pub struct SupportDivisor {
    /// Coefficients `b_ρ`.
    pub b: Vec<Int>,
    /// One linear functional per maximal cone (integral when Cartier).
    pub u: Vec<Vec<Rat>>,
    pub cartier: bool,
    /// A maximal cone admitting no integral `u_σ`.
    pub non_cartier_cone: Option<usize>,
}

impl SupportDivisor {
    /// `h(v_ρ)`.
    pub fn h_ray(&self, ray: usize) -> Rat {
        -rat_of(&self.b[ray])
    }

    /// `u_σ` as integers; panics when not Cartier.
    pub fn u_int(&self, cone: usize) -> Vec<Int> {
        assert!(self.cartier, "divisor is not Cartier");
        self.u[cone].iter().map(|x| x.to_integer()).collect()
    }
}

/// Solves `<u_σ, v_ρ> = -b_ρ` on every maximal cone.
pub fn support_function_from_divisor(s: &EquivariantSetup, b: &[Int]) -> Result<SupportDivisor> {
    let fan = s.fan();
    if b.len() != fan.num_rays() {
        return Err(invalid(format!("divisor has {} coefficients for {} rays", b.len(), fan.num_rays())));
    }
    let mut us = Vec::new();
    let mut cartier = true;
    let mut witness = None;
    for (ci, c) in fan.max_cones().iter().enumerate() {
        let m = fan.ray_matrix(c);
        let rhs: Vec<Int> = c.iter().map(|&i| -b[i].clone()).collect();
        let rhs_q: Vec<Rat> = rhs.iter().map(rat_of).collect();
        let Some(uq) = m.to_rat().solve(&rhs_q) else {
            return Err(invalid(format!("divisor is not linear on cone {ci}")));
        };
        match solve_integral(&m, &rhs) {
            Some(ui) => us.push(ui.iter().map(rat_of).collect()),
            None => {
                if cartier {
                    witness = Some(ci);
                }
                cartier = false;
                us.push(uq);
            }
        }
    }
    Ok(SupportDivisor { b: b.to_vec(), u: us, cartier, non_cartier_cone: witness })
}

/// Outcome of a positivity test with a violating (maximal cone, ray) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<(usize, usize)>,
}

fn check_hypotheses(s: &EquivariantSetup, d: &SupportDivisor) -> Result<()> {
    if !is_proper(s) {
        return Err(precondition("the morphism is not proper"));
    }
    if !d.cartier {
        return Err(precondition(format!(
            "divisor is not Cartier on cone {}",
            d.non_cartier_cone.unwrap_or_default()
        )));
    }
    Ok(())
}

/// `<u_σ, v_ρ> >= h(v_ρ)` for every maximal cone and ray.
pub fn nef_verdict(s: &EquivariantSetup, d: &SupportDivisor) -> Result<Verdict> {
    check_hypotheses(s, d)?;
    let fan = s.fan();
    for ci in 0..fan.max_cones().len() {
        for r in 0..fan.num_rays() {
            if dot_mixed(&d.u[ci], fan.ray(r)) < d.h_ray(r) {
                return Ok(Verdict { holds: false, witness: Some((ci, r)) });
            }
        }
    }
    Ok(Verdict { holds: true, witness: None })
}

/// Like [`nef_verdict`] with equality exactly for the rays of the cone.
pub fn ample_verdict(s: &EquivariantSetup, d: &SupportDivisor) -> Result<Verdict> {
    check_hypotheses(s, d)?;
    let fan = s.fan();
    for (ci, c) in fan.max_cones().iter().enumerate() {
        for r in 0..fan.num_rays() {
            let lhs = dot_mixed(&d.u[ci], fan.ray(r));
            let h = d.h_ray(r);
            let ok = if c.contains(&r) { lhs == h } else { lhs > h };
            if !ok {
                return Ok(Verdict { holds: false, witness: Some((ci, r)) });
            }
        }
    }
    Ok(Verdict { holds: true, witness: None })
}

pub fn is_nef(s: &EquivariantSetup, d: &SupportDivisor) -> Result<bool> {
    Ok(nef_verdict(s, d)?.holds)
}

pub fn is_ample(s: &EquivariantSetup, d: &SupportDivisor) -> Result<bool> {
    Ok(ample_verdict(s, d)?.holds)
}

/// `Δ_B = {u : <u, v_ρ> + b_ρ >= 0}`.
pub fn section_polyhedron(s: &EquivariantSetup, b: &[Int]) -> Polyhedron {
    let fan = s.fan();
    Polyhedron::new(
        fan.ambient(),
        (0..fan.num_rays()).map(|i| (fan.ray(i).to_vec(), b[i].clone())).collect(),
    )
}

/// `σ' ∩ image(π_*)`.
pub fn image_target_cone(s: &EquivariantSetup) -> Cone {
    let m = s.target_rank();
    let cols: Vec<Vec<Int>> = (0..s.source_rank()).map(|j| s.pi_star().col(j)).collect();
    let eqs = orthogonal_complement(m, &cols);
    s.target().intersect(&Cone::from_inequalities(m, &[], &eqs))
}

/// The two maximal cones adjacent along the wall `tau`, or an error when
/// `tau` is not a wall over the relative interior of the image cone.
pub fn wall_cones(s: &EquivariantSetup, tau: &[usize]) -> Result<(usize, usize)> {
    let fan = s.fan();
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    let containing = fan.max_cones_containing(&tau);
    if containing.len() != 2 {
        return Err(precondition(format!("cone {tau:?} is not a wall between two maximal cones")));
    }
    let top = fan.cone(&fan.max_cones()[containing[0]]).dim();
    if fan.cone(&tau).dim() + 1 != top {
        return Err(precondition(format!("cone {tau:?} is not of codimension one")));
    }
    let interior = image_target_cone(s);
    let image = s.apply(&fan.cone(&tau).interior_point());
    if !interior.in_relative_interior(&image) {
        return Err(precondition(format!("cone {tau:?} does not map into the interior of the base")));
    }
    Ok((containing[0], containing[1]))
}

/// `(D_h . C_τ) = (<u_{σ+}, v> - h(v)) / a_v` for `v ∈ σ-∖τ`, where
/// `[v]_τ = a_v v_{ρ-}` in `N/τ_R`.
pub fn invariant_curve_intersection_at(
    s: &EquivariantSetup,
    d: &SupportDivisor,
    tau: &[usize],
    v: &[Int],
) -> Result<Rat> {
    let (plus, minus) = wall_cones(s, tau)?;
    let fan = s.fan();
    let sigma_minus = fan.cone(&fan.max_cones()[minus]);
    if !sigma_minus.contains(v) {
        return Err(precondition("chosen vector is not in the second cone"));
    }
    let oc = orbit_closure(s, tau)?;
    let image = oc.project(v);
    if image.iter().all(Zero::is_zero) {
        return Err(precondition("chosen vector lies in the wall"));
    }
    let generator = primitive(&image);
    let idx = generator.iter().position(|x| !x.is_zero()).expect("nonzero");
    let a_v = Rat::new(image[idx].clone(), generator[idx].clone());
    debug_assert!(a_v.is_positive());
    let h_v = dot_mixed(&d.u[minus], v);
    let pairing = dot_mixed(&d.u[plus], v);
    Ok((pairing - h_v) / a_v)
}

pub fn invariant_curve_intersection(s: &EquivariantSetup, d: &SupportDivisor, tau: &[usize]) -> Result<Rat> {
    let (_, minus) = wall_cones(s, tau)?;
    let fan = s.fan();
    let ray = fan.max_cones()[minus]
        .iter()
        .copied()
        .find(|r| !tau.contains(r))
        .expect("a maximal cone has a ray outside its wall");
    invariant_curve_intersection_at(s, d, tau, fan.ray(ray))
}

/// Walls over the relative interior of the image cone.
pub fn walls(s: &EquivariantSetup) -> Vec<Vec<usize>> {
    let fan = s.fan();
    let top = match fan.max_cones().first() {
        Some(c) => fan.cone(c).dim(),
        None => return Vec::new(),
    };
    if top == 0 {
        return Vec::new();
    }
    fan.cones_of_dim(top - 1).into_iter().filter(|t| wall_cones(s, t).is_ok()).collect()
}

/// `χ^{u_σ}` is a global section of `O(D_h)` exactly when `u_σ ∈ Δ_B`.
pub fn vertices_are_sections(s: &EquivariantSetup, d: &SupportDivisor) -> bool {
    let p = section_polyhedron(s, &d.b);
    d.u.iter().all(|u| p.contains_rat(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, ivec, rat, IntMatrix};
    use crate::polyhedra::Fan;
    use crate::toric::{build_setup, over_point};

    fn p2() -> EquivariantSetup {
        over_point(Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]])).unwrap()
    }

    fn f1() -> EquivariantSetup {
        over_point(Fan::from_i64(
            2,
            &[&[1, 0], &[0, 1], &[-1, 1], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]],
        ))
        .unwrap()
    }

    #[test]
    fn p2_functionals() {
        let s = p2();
        let d = support_function_from_divisor(&s, &ivec(&[0, 0, 3])).unwrap();
        assert!(d.cartier);
        assert_eq!(d.u_int(0), ivec(&[0, 0]));
        assert_eq!(d.u_int(1), ivec(&[3, 0]));
    }

    #[test]
    fn non_cartier_detected() {
        let s = over_point(Fan::from_i64(2, &[&[1, 0], &[1, 2]], &[&[0, 1]])).unwrap();
        let d = support_function_from_divisor(&s, &ivec(&[0, 1])).unwrap();
        assert!(!d.cartier);
        assert_eq!(d.u[0], vec![rat(0), Rat::new(int(-1), int(2))]);
    }

    #[test]
    fn p2_positivity() {
        let s = p2();
        for deg in -2..4 {
            let d = support_function_from_divisor(&s, &ivec(&[0, 0, deg])).unwrap();
            assert_eq!(is_nef(&s, &d).unwrap(), deg >= 0);
            assert_eq!(is_ample(&s, &d).unwrap(), deg >= 1);
            for w in walls(&s) {
                assert_eq!(invariant_curve_intersection(&s, &d, &w).unwrap(), rat(deg));
            }
        }
    }

    #[test]
    fn f1_fiber_class() {
        let s = f1();
        // P_0 + P_2: the two rays pairing nontrivially with the first coordinate.
        let d = support_function_from_divisor(&s, &ivec(&[1, 0, 0, 0])).unwrap();
        assert!(is_nef(&s, &d).unwrap());
        assert!(!is_ample(&s, &d).unwrap());
        let mix = support_function_from_divisor(&s, &ivec(&[1, 0, 0, 1])).unwrap();
        assert!(is_ample(&s, &mix).unwrap());
    }

    #[test]
    fn non_proper_rejected() {
        let s = over_point(Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]])).unwrap();
        let d = support_function_from_divisor(&s, &ivec(&[0, 0])).unwrap();
        assert!(is_nef(&s, &d).is_err());
    }

    #[test]
    fn blowup_walls_and_sections() {
        let fan = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[0, -1], &[1, 1]], &[&[0, 3], &[1, 3], &[0, 2]]);
        let s = build_setup(fan, IntMatrix::from_i64_rows(&[&[1, 0]]), Cone::from_i64(1, &[&[1]])).unwrap();
        // the wall over the interior of the base is the ray (1,0); the other
        // walls lie over the origin
        let w = walls(&s);
        assert!(w.contains(&vec![0]) || w.contains(&vec![3]));
        let p = section_polyhedron(&s, &ivec(&[0, 1, 0, 0]));
        assert!(!p.is_bounded());
    }
}
