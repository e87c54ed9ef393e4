//! Equivariant morphisms from a toric variety to an affine toric variety,
//! orbit closures and class groups.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{invalid, precondition, Result};
use crate::linalg::{cokernel, dot, primitive, FinAbGroup, Int, IntMatrix};
use crate::polyhedra::{fan_validate, Cone, Fan};

/// A fan `Σ` in `N` with a lattice map `π_* : N -> N'` sending `|Σ|` into
/// the cone `σ'` of `N'`.
#[derive(Clone, Debug)]
pub struct EquivariantSetup {
    fan: Fan,
    pi_star: IntMatrix,
    target: Cone,
    horizontal: Vec<usize>,
    vertical: Vec<usize>,
}

impl EquivariantSetup {
    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    /// `π_*` as a `dim N' × dim N` matrix.
    pub fn pi_star(&self) -> &IntMatrix {
        &self.pi_star
    }

    pub fn target(&self) -> &Cone {
        &self.target
    }

    /// Rays mapped to zero; they index the divisor `D` and the set `Σ_π(1)`.
    pub fn horizontal_rays(&self) -> &[usize] {
        &self.horizontal
    }

    /// The remaining rays, indexing the divisor `E`.
    pub fn vertical_rays(&self) -> &[usize] {
        &self.vertical
    }

    pub fn is_horizontal(&self, ray: usize) -> bool {
        self.horizontal.binary_search(&ray).is_ok()
    }

    pub fn source_rank(&self) -> usize {
        self.fan.ambient()
    }

    pub fn target_rank(&self) -> usize {
        self.pi_star.rows()
    }

    /// Relative dimension: the rank of the kernel of `π_*`.
    pub fn relative_dim(&self) -> usize {
        self.source_rank() - self.pi_star.rank()
    }

    /// Cones of dimension `r` all of whose rays are horizontal.
    pub fn sigma_pi(&self, r: usize) -> Vec<Vec<usize>> {
        self.fan
            .all_cones()
            .into_iter()
            .filter(|c| c.len() == r && c.iter().all(|&i| self.is_horizontal(i)) && self.fan.cone(c).dim() == r)
            .collect()
    }

    /// `π_*^{-1}(σ')` as a cone of `N_R`.
    pub fn preimage_cone(&self) -> Cone {
        let d = self.source_rank();
        let pull = |a: &Vec<Int>| -> Vec<Int> {
            (0..d).map(|j| dot(a, &self.pi_star.col(j))).collect()
        };
        let ineqs: Vec<Vec<Int>> = self.target.facets().iter().map(pull).collect();
        let eqs: Vec<Vec<Int>> = self.target.equations().iter().map(pull).collect();
        Cone::from_inequalities(d, &ineqs, &eqs)
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        self.pi_star.mul_vec(v)
    }
}

/// Validates the data and classifies each ray as horizontal (`π_*(v) = 0`) or vertical.
pub fn build_setup(fan: Fan, pi_star: IntMatrix, sigma_prime: Cone) -> Result<EquivariantSetup> {
    let report = fan_validate(&fan);
    if !report.is_valid() {
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(invalid(format!("invalid fan: {}", msgs.join("; "))));
    }
    if pi_star.cols() != fan.ambient() {
        return Err(invalid(format!(
            "morphism matrix has {} columns but the fan lives in rank {}",
            pi_star.cols(),
            fan.ambient()
        )));
    }
    if sigma_prime.ambient() != pi_star.rows() {
        return Err(invalid(format!(
            "target cone lives in rank {} but the morphism has {} rows",
            sigma_prime.ambient(),
            pi_star.rows()
        )));
    }
    let mut horizontal = Vec::new();
    let mut vertical = Vec::new();
    for (i, v) in fan.rays().iter().enumerate() {
        let image = pi_star.mul_vec(v);
        if !sigma_prime.contains(&image) {
            return Err(invalid(format!("ray {i} maps outside the target cone")));
        }
        if image.iter().all(Zero::is_zero) {
            horizontal.push(i);
        } else {
            vertical.push(i);
        }
    }
    Ok(EquivariantSetup { fan, pi_star, target: sigma_prime, horizontal, vertical })
}

/// The structure morphism of a fan to a point.
pub fn over_point(fan: Fan) -> Result<EquivariantSetup> {
    let d = fan.ambient();
    build_setup(fan, IntMatrix::zeros(0, d), Cone::zero(0))
}

/// Whether `|Σ| = π_*^{-1}(σ')`, decided by wall counting.
pub fn is_proper(s: &EquivariantSetup) -> bool {
    let fan = s.fan();
    let p = s.preimage_cone();
    let dim = p.dim();
    if fan.max_cones().is_empty() {
        return false;
    }
    if fan.max_cones().iter().any(|c| fan.cone(c).dim() != dim) {
        return false;
    }
    if dim == 0 {
        return true;
    }
    let mut walls: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for c in fan.max_cones() {
        for f in fan.faces_of(c) {
            if fan.cone(&f).dim() + 1 == dim {
                *walls.entry(f).or_default() += 1;
            }
        }
    }
    walls.iter().all(|(w, &count)| {
        let wall = fan.cone(w);
        let on_boundary = p
            .facets()
            .iter()
            .any(|a| wall.generators().iter().all(|g| dot(a, g).is_zero()));
        count == if on_boundary { 1 } else { 2 }
    })
}

/// Whether the cokernel of `π_*` is finite.
pub fn is_log_smooth(s: &EquivariantSetup) -> bool {
    s.target_rank() == 0 || s.pi_star().rank() == s.target_rank()
}

/// The orbit closure of a cone `τ`: the quotient fan `Σ_τ` in `N/(N ∩ τ_R)`.
#[derive(Clone, Debug)]
pub struct OrbitClosure {
    pub tau: Vec<usize>,
    /// Surjection `N -> N_τ`.
    pub projection: IntMatrix,
    /// A splitting `N_τ -> N` of the projection.
    pub section: IntMatrix,
    pub fan: Fan,
    /// For each ray of `Σ_τ`, the smallest ray of `Σ` projecting onto it.
    pub ray_origin: Vec<usize>,
    /// For each maximal cone of `Σ_τ`, the maximal cone of `Σ` it comes from.
    pub cone_origin: Vec<usize>,
    /// The induced morphism when `τ ∈ Σ_π`.
    pub setup: Option<EquivariantSetup>,
}

impl OrbitClosure {
    pub fn codim(&self) -> usize {
        self.projection.cols() - self.projection.rows()
    }

    pub fn project(&self, v: &[Int]) -> Vec<Int> {
        self.projection.mul_vec(v)
    }
}

pub fn orbit_closure(s: &EquivariantSetup, tau: &[usize]) -> Result<OrbitClosure> {
    let fan = s.fan();
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    let containing = fan.max_cones_containing(&tau);
    if containing.is_empty() {
        return Err(precondition(format!("cone {tau:?} is not in the fan")));
    }
    let d = fan.ambient();
    let (projection, section) = if tau.is_empty() {
        (IntMatrix::identity(d), IntMatrix::identity(d))
    } else {
        let g = cokernel(&fan.ray_matrix(&tau).transpose());
        let r = d - g.free_rank;
        let u = &g.snf.u;
        let u_inv = u.inverse_unimodular().expect("unimodular");
        let q_rows: Vec<Vec<Int>> = (r..d).map(|i| u.row(i).to_vec()).collect();
        let l_rows: Vec<Vec<Int>> = (0..d).map(|i| (r..d).map(|j| u_inv.get(i, j).clone()).collect()).collect();
        (IntMatrix::from_rows(&q_rows, d), IntMatrix::from_rows(&l_rows, d - r))
    };
    let k = projection.rows();
    let mut rays: Vec<Vec<Int>> = Vec::new();
    let mut origin: Vec<usize> = Vec::new();
    let mut cones_with_origin: Vec<(Vec<usize>, usize)> = Vec::new();
    for &c in &containing {
        let sigma = &fan.max_cones()[c];
        let images: Vec<(usize, Vec<Int>)> = sigma
            .iter()
            .filter(|i| !tau.contains(i))
            .map(|&i| (i, primitive(&projection.mul_vec(fan.ray(i)))))
            .collect();
        let image_cone = Cone::new(k, images.iter().map(|(_, v)| v.clone()).collect());
        let extremal = image_cone.rays();
        let mut idx = Vec::new();
        for (i, v) in &images {
            if !extremal.contains(v) {
                continue;
            }
            let j = match rays.iter().position(|r| r == v) {
                Some(j) => {
                    if *i < origin[j] {
                        origin[j] = *i;
                    }
                    j
                }
                None => {
                    rays.push(v.clone());
                    origin.push(*i);
                    rays.len() - 1
                }
            };
            if !idx.contains(&j) {
                idx.push(j);
            }
        }
        cones_with_origin.push((idx, c));
    }
    // Order rays by their origin for determinism.
    let mut order: Vec<usize> = (0..rays.len()).collect();
    order.sort_by_key(|&j| origin[j]);
    let mut renumber = vec![0; rays.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let sorted_rays: Vec<Vec<Int>> = order.iter().map(|&j| rays[j].clone()).collect();
    let sorted_origin: Vec<usize> = order.iter().map(|&j| origin[j]).collect();
    let cones: Vec<Vec<usize>> = cones_with_origin
        .iter()
        .map(|(idx, _)| {
            let mut v: Vec<usize> = idx.iter().map(|&j| renumber[j]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let cone_origin: Vec<usize> = cones_with_origin.iter().map(|(_, c)| *c).collect();
    let quotient_fan = Fan::new(k, sorted_rays, cones)?;
    let setup = if tau.iter().all(|&i| s.is_horizontal(i)) {
        let pi_tau = s.pi_star().mul(&section);
        Some(build_setup(quotient_fan.clone(), pi_tau, s.target().clone())?)
    } else {
        None
    };
    Ok(OrbitClosure {
        tau,
        projection,
        section,
        fan: quotient_fan,
        ray_origin: sorted_origin,
        cone_origin,
        setup,
    })
}

/// `Cl(P)` and `Cl(P∖E)` with the degree maps on invariant divisors.
#[derive(Clone, Debug)]
pub struct ClassGroupData {
    /// Cokernel of `M -> Z^{Σ(1)}`.
    pub cl: FinAbGroup,
    /// Cokernel of `M -> Z^{Σ_π(1)}`.
    pub cl_open: FinAbGroup,
    num_rays: usize,
    horizontal: Vec<usize>,
}

impl ClassGroupData {
    /// `[Σ b_ρ P_ρ]` in `Cl(P)`.
    pub fn degree(&self, b: &[Int]) -> Vec<Int> {
        assert_eq!(b.len(), self.num_rays);
        self.cl.class_of(b)
    }

    pub fn ray_degree(&self, ray: usize) -> Vec<Int> {
        let mut e = vec![Int::zero(); self.num_rays];
        e[ray] = Int::from(1);
        self.degree(&e)
    }

    /// `[Σ b_ρ P_ρ]` restricted to `P∖E`.
    pub fn open_degree(&self, b: &[Int]) -> Vec<Int> {
        assert_eq!(b.len(), self.num_rays);
        let restricted: Vec<Int> = self.horizontal.iter().map(|&i| b[i].clone()).collect();
        self.cl_open.class_of(&restricted)
    }

    pub fn open_ray_degree(&self, ray: usize) -> Vec<Int> {
        let mut e = vec![Int::zero(); self.num_rays];
        e[ray] = Int::from(1);
        self.open_degree(&e)
    }

    /// Free part of the class in `Cl(P∖E)`; homomorphisms to `Z` factor through it.
    pub fn open_free_part(&self, b: &[Int]) -> Vec<Int> {
        let restricted: Vec<Int> = self.horizontal.iter().map(|&i| b[i].clone()).collect();
        self.cl_open.free_part(&restricted)
    }

    pub fn num_rays(&self) -> usize {
        self.num_rays
    }
}

pub fn class_groups(s: &EquivariantSetup) -> ClassGroupData {
    let fan = s.fan();
    let all: Vec<usize> = (0..fan.num_rays()).collect();
    let cl = cokernel(&fan.ray_matrix(&all));
    let cl_open = cokernel(&fan.ray_matrix(s.horizontal_rays()));
    ClassGroupData {
        cl,
        cl_open,
        num_rays: fan.num_rays(),
        horizontal: s.horizontal_rays().to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ivec;

    fn p2() -> EquivariantSetup {
        over_point(Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]])).unwrap()
    }

    fn blowup() -> EquivariantSetup {
        let fan = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[0, -1], &[1, 1]], &[&[0, 3], &[1, 3], &[0, 2]]);
        build_setup(fan, IntMatrix::from_i64_rows(&[&[1, 0]]), Cone::from_i64(1, &[&[1]])).unwrap()
    }

    #[test]
    fn p2_over_point() {
        let s = p2();
        assert_eq!(s.horizontal_rays(), &[0, 1, 2]);
        assert!(s.vertical_rays().is_empty());
        assert!(is_proper(&s));
        assert!(is_log_smooth(&s));
        assert_eq!(s.relative_dim(), 2);
    }

    #[test]
    fn affine_plane_not_proper() {
        let s = over_point(Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]])).unwrap();
        assert!(!is_proper(&s));
    }

    #[test]
    fn blowup_split() {
        let s = blowup();
        assert_eq!(s.horizontal_rays(), &[1, 2]);
        assert_eq!(s.vertical_rays(), &[0, 3]);
        assert!(is_proper(&s));
        assert!(is_log_smooth(&s));
    }

    #[test]
    fn zero_map_not_log_smooth() {
        let fan = Fan::from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]);
        let s = build_setup(fan, IntMatrix::zeros(1, 1), Cone::from_i64(1, &[&[1]])).unwrap();
        assert!(!is_log_smooth(&s));
    }

    #[test]
    fn containment_violation() {
        let fan = Fan::from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]);
        let err = build_setup(fan, IntMatrix::from_i64_rows(&[&[1]]), Cone::from_i64(1, &[&[1]])).unwrap_err();
        assert!(err.to_string().contains("ray 1"));
    }

    #[test]
    fn p2_orbit_closure_of_ray() {
        let oc = orbit_closure(&p2(), &[0]).unwrap();
        assert_eq!(oc.fan.ambient(), 1);
        assert_eq!(oc.fan.num_rays(), 2);
        assert_eq!(oc.fan.ray(0), &oc.fan.ray(1).iter().map(|x| -x).collect::<Vec<_>>()[..]);
        assert_eq!(oc.codim(), 1);
    }

    #[test]
    fn blowup_orbit_closure_over_base() {
        let oc = orbit_closure(&blowup(), &[1]).unwrap();
        assert_eq!(oc.fan.num_rays(), 1);
        let st = oc.setup.as_ref().unwrap();
        assert!(is_proper(st));
        assert!(st.horizontal_rays().is_empty());
    }

    #[test]
    fn class_group_examples() {
        let c = class_groups(&p2());
        assert_eq!(c.cl.free_rank, 1);
        let d0 = c.ray_degree(0);
        assert_eq!(c.ray_degree(1), d0);
        assert_eq!(c.ray_degree(2), d0);
        let s = blowup();
        let cs = class_groups(&s);
        assert_eq!(cs.cl_open.free_rank, 1);
        assert!(cs.cl_open.torsion.is_empty());
        assert_eq!(cs.cl.free_rank, 2);
        let principal = ivec(&[1, 0, 0, 1]);
        assert!(cs.cl.is_zero_element(&cs.degree(&principal)));
    }
}
