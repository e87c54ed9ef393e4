//! Rational polyhedral cones, fans and polyhedra with lattice-point machinery.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, precondition, Result};
use crate::linalg::{
    dot, dot_mixed, int, primitive, primitive_from_rat, rat_of, smith_normal_form, Int, IntMatrix,
    Rat,
};

/// Integer basis of the orthogonal complement of the span of `vs`.
pub fn orthogonal_complement(ambient: usize, vs: &[Vec<Int>]) -> Vec<Vec<Int>> {
    if vs.is_empty() {
        return (0..ambient)
            .map(|i| (0..ambient).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
    }
    let m = IntMatrix::from_rows(vs, ambient).to_rat();
    let (_, ker) = m.rank_and_kernel();
    ker.iter().map(|k| primitive_from_rat(k)).collect()
}

fn rank_of(ambient: usize, vs: &[Vec<Int>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    IntMatrix::from_rows(vs, ambient).rank()
}

/// Orthogonal projection of `a` onto the complement of span(`eqs`), made primitive.
fn project_out(a: &[Int], eqs: &[Vec<Int>]) -> Vec<Int> {
    if eqs.is_empty() {
        return primitive(a);
    }
    let d = a.len();
    let e = IntMatrix::from_rows(eqs, d).to_rat();
    let gram = e.mul(&e.transpose());
    let ar: Vec<Rat> = a.iter().map(rat_of).collect();
    let rhs = e.mul_vec(&ar);
    let c = gram.solve(&rhs).expect("gram matrix of a basis is invertible");
    let et = e.transpose();
    let corr = et.mul_vec(&c);
    let proj: Vec<Rat> = ar.iter().zip(&corr).map(|(x, y)| x - y).collect();
    primitive_from_rat(&proj)
}

/// Facets and equations of `cone(gens)` by Fourier-Motzkin elimination.
///
/// The cone is written as the projection of `{(x, l) : x = G^T l, l >= 0}`.
/// The equations are first used to solve for as many `l` as possible, then
/// the remaining multipliers are eliminated with the Chernikov bound on the
/// number of originating inequalities.
fn h_representation(ambient: usize, gens: &[Vec<Int>]) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let d = ambient;
    let equations = orthogonal_complement(d, gens);
    if gens.is_empty() {
        return (Vec::new(), equations);
    }
    let k = gens.len();
    let nv = d + k;

    let mut ineqs: Vec<(Vec<Rat>, BTreeSet<usize>)> = (0..k)
        .map(|j| {
            let mut row = vec![Rat::zero(); nv];
            row[d + j] = Rat::one();
            (row, BTreeSet::from([j]))
        })
        .collect();
    let mut eqs: Vec<Vec<Rat>> = (0..d)
        .map(|i| {
            let mut row = vec![Rat::zero(); nv];
            row[i] = Rat::one();
            for (j, g) in gens.iter().enumerate() {
                row[d + j] = -rat_of(&g[i]);
            }
            row
        })
        .collect();

    let mut eliminated = vec![false; k];
    for e in 0..eqs.len() {
        let row = eqs[e].clone();
        let Some(j) = (0..k).find(|&j| !row[d + j].is_zero()) else {
            continue;
        };
        let c = row[d + j].clone();
        let sub = |target: &mut Vec<Rat>| {
            let f = &target[d + j] / &c;
            if !f.is_zero() {
                for (t, r) in target.iter_mut().zip(&row) {
                    *t -= &f * r;
                }
            }
        };
        for other in eqs.iter_mut().skip(e + 1) {
            sub(other);
        }
        for (ineq, _) in ineqs.iter_mut() {
            sub(ineq);
        }
        eliminated[j] = true;
    }

    let mut step = 0usize;
    for j in (0..k).filter(|&j| !eliminated[j]) {
        step += 1;
        let col = d + j;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next: BTreeMap<Vec<Int>, (Vec<Rat>, BTreeSet<usize>)> = BTreeMap::new();
        let push = |row: Vec<Rat>, origin: BTreeSet<usize>, next: &mut BTreeMap<_, _>| {
            if row.iter().all(Zero::is_zero) {
                return;
            }
            let key = primitive_from_rat(&row);
            let keep = match next.get(&key) {
                Some((_, o)) => {
                    let o: &BTreeSet<usize> = o;
                    origin.len() < o.len()
                }
                None => true,
            };
            if keep {
                next.insert(key, (row, origin));
            }
        };
        for (row, origin) in ineqs {
            if row[col].is_positive() {
                pos.push((row, origin));
            } else if row[col].is_negative() {
                neg.push((row, origin));
            } else {
                push(row, origin, &mut next);
            }
        }
        for (pr, po) in &pos {
            for (nr, no) in &neg {
                let origin: BTreeSet<usize> = po.union(no).copied().collect();
                if origin.len() > step + 1 {
                    continue;
                }
                let a = pr[col].clone();
                let b = -nr[col].clone();
                let row: Vec<Rat> = pr.iter().zip(nr).map(|(x, y)| x * &b + y * &a).collect();
                push(row, origin, &mut next);
            }
        }
        ineqs = next.into_values().collect();
    }

    let dim = rank_of(d, gens);
    let mut facets = BTreeSet::new();
    for (row, _) in ineqs {
        debug_assert!(row[d..].iter().all(Zero::is_zero));
        let a = primitive_from_rat(&row[..d]);
        if gens.iter().all(|g| dot(&a, g).is_zero()) {
            continue;
        }
        let normal = project_out(&a, &equations);
        let tight: Vec<Vec<Int>> = gens.iter().filter(|g| dot(&normal, g).is_zero()).cloned().collect();
        if rank_of(d, &tight) + 1 == dim {
            facets.insert(normal);
        }
    }
    (facets.into_iter().collect(), equations)
}

/// A rational polyhedral cone `cone(generators)` with its inequality description
/// `{x : <a, x> >= 0 for facets a, <e, x> = 0 for equations e}`.
#[derive(Clone, Debug)]
pub struct Cone {
    ambient: usize,
    generators: Vec<Vec<Int>>,
    facets: Vec<Vec<Int>>,
    equations: Vec<Vec<Int>>,
    dim: usize,
}

impl Cone {
    /// Zero vectors are dropped, the rest made primitive and deduplicated.
    pub fn new(ambient: usize, generators: Vec<Vec<Int>>) -> Cone {
        let mut seen = BTreeSet::new();
        let mut gens = Vec::new();
        for g in generators {
            assert_eq!(g.len(), ambient, "generator has wrong length");
            if g.iter().all(Zero::is_zero) {
                continue;
            }
            let p = primitive(&g);
            if seen.insert(p.clone()) {
                gens.push(p);
            }
        }
        let (facets, equations) = h_representation(ambient, &gens);
        let dim = ambient - equations.len();
        Cone { ambient, generators: gens, facets, equations, dim }
    }

    pub fn from_i64(ambient: usize, generators: &[&[i64]]) -> Cone {
        Cone::new(ambient, generators.iter().map(|g| g.iter().map(|&x| int(x)).collect()).collect())
    }

    pub fn zero(ambient: usize) -> Cone {
        Cone::new(ambient, Vec::new())
    }

    /// The cone `{x : <a, x> >= 0, <e, x> = 0}`.
    pub fn from_inequalities(ambient: usize, inequalities: &[Vec<Int>], equations: &[Vec<Int>]) -> Cone {
        let mut dual_gens: Vec<Vec<Int>> = inequalities.to_vec();
        for e in equations {
            dual_gens.push(e.clone());
            dual_gens.push(e.iter().map(|x| -x).collect());
        }
        Cone::new(ambient, dual_gens).dual()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[Vec<Int>] {
        &self.generators
    }

    pub fn facets(&self) -> &[Vec<Int>] {
        &self.facets
    }

    pub fn equations(&self) -> &[Vec<Int>] {
        &self.equations
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis of the largest linear subspace inside the cone.
    pub fn lineality(&self) -> Vec<Vec<Int>> {
        let mut rows = self.facets.clone();
        rows.extend(self.equations.iter().cloned());
        orthogonal_complement(self.ambient, &rows)
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.lineality().is_empty()
    }

    /// Generators spanning extremal rays; meaningful for strongly convex cones.
    pub fn rays(&self) -> Vec<Vec<Int>> {
        self.generators.iter().filter(|g| self.is_extremal(g)).cloned().collect()
    }

    fn is_extremal(&self, g: &[Int]) -> bool {
        let mut rows = self.equations.clone();
        rows.extend(self.facets.iter().filter(|a| dot(a, g).is_zero()).cloned());
        rank_of(self.ambient, &rows) + 1 == self.ambient
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_strongly_convex() && self.generators.len() == self.dim && self.rays().len() == self.dim
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        self.facets.iter().all(|a| !dot(a, x).is_negative())
            && self.equations.iter().all(|e| dot(e, x).is_zero())
    }

    pub fn contains_rat(&self, x: &[Rat]) -> bool {
        self.facets.iter().all(|a| !dot_mixed(x, a).is_negative())
            && self.equations.iter().all(|e| dot_mixed(x, e).is_zero())
    }

    /// Whether `x` lies in the relative interior.
    pub fn in_relative_interior(&self, x: &[Int]) -> bool {
        self.facets.iter().all(|a| dot(a, x).is_positive())
            && self.equations.iter().all(|e| dot(e, x).is_zero())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }

    /// Equality as point sets.
    pub fn same_set(&self, other: &Cone) -> bool {
        self.ambient == other.ambient && self.contains_cone(other) && other.contains_cone(self)
    }

    /// Sum of the generators; lies in the relative interior.
    pub fn interior_point(&self) -> Vec<Int> {
        let mut s = vec![Int::zero(); self.ambient];
        for g in &self.generators {
            for (a, b) in s.iter_mut().zip(g) {
                *a += b;
            }
        }
        s
    }

    pub fn dual(&self) -> Cone {
        let mut gens = self.facets.clone();
        for e in &self.equations {
            gens.push(e.clone());
            gens.push(e.iter().map(|x| -x).collect());
        }
        Cone::new(self.ambient, gens)
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        let mut ineqs = self.facets.clone();
        ineqs.extend(other.facets.iter().cloned());
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        Cone::from_inequalities(self.ambient, &ineqs, &eqs)
    }

    /// Whether `face` is a face of this cone.
    pub fn has_face(&self, face: &Cone) -> bool {
        if !self.contains_cone(face) {
            return false;
        }
        // The smallest face containing `face` is cut out by the facets vanishing on it.
        let normals: Vec<&Vec<Int>> = self
            .facets
            .iter()
            .filter(|a| face.generators.iter().all(|g| dot(a, g).is_zero()))
            .collect();
        let mut rows = self.equations.clone();
        rows.extend(normals.into_iter().cloned());
        let smallest = Cone::from_inequalities(self.ambient, &self.facets, &rows);
        face.contains_cone(&smallest)
    }
}

/// The dual cone `{u : <u, v> >= 0 for all v in c}`.
pub fn dual_cone(c: &Cone) -> Cone {
    c.dual()
}

/// Index of the sublattice spanned by the generators of a simplicial cone in
/// the lattice points of its linear span.
pub fn multiplicity(c: &Cone) -> Result<Int> {
    if !c.is_simplicial() {
        return Err(precondition("multiplicity is defined for simplicial cones only"));
    }
    if c.generators().is_empty() {
        return Ok(Int::one());
    }
    let m = IntMatrix::from_rows(c.generators(), c.ambient());
    Ok(smith_normal_form(&m).invariant_factors().iter().product())
}

/// A fan given by primitive rays and maximal cones (ray index sets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    ambient: usize,
    rays: Vec<Vec<Int>>,
    cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanViolation {
    ZeroRay { ray: usize },
    NonPrimitiveRay { ray: usize },
    NotStronglyConvex { cone: usize },
    RedundantRay { cone: usize, ray: usize },
    IncompatibleCones { first: usize, second: usize },
    UnusedRay { ray: usize },
    NotMaximal { cone: usize },
}

impl std::fmt::Display for FanViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FanViolation::ZeroRay { ray } => write!(f, "ray {ray} is zero"),
            FanViolation::NonPrimitiveRay { ray } => write!(f, "ray {ray} is not primitive"),
            FanViolation::NotStronglyConvex { cone } => write!(f, "cone {cone} contains a line"),
            FanViolation::RedundantRay { cone, ray } => {
                write!(f, "ray {ray} does not span an edge of cone {cone}")
            }
            FanViolation::IncompatibleCones { first, second } => {
                write!(f, "cones {first} and {second} do not meet in a common face")
            }
            FanViolation::UnusedRay { ray } => write!(f, "ray {ray} belongs to no cone"),
            FanViolation::NotMaximal { cone } => write!(f, "cone {cone} is a face of another listed cone"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeReport {
    pub rays: Vec<usize>,
    pub dim: usize,
    pub simplicial: bool,
    pub nonsingular: bool,
    pub multiplicity: Option<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanReport {
    pub violations: Vec<FanViolation>,
    pub cones: Vec<ConeReport>,
    pub simplicial: bool,
    pub nonsingular: bool,
    /// Product of the multiplicities over all cones, when simplicial.
    pub multiplicity: Option<Int>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Fan {
    /// Checks only referential integrity; geometry is checked by [`fan_validate`].
    pub fn new(ambient: usize, rays: Vec<Vec<Int>>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != ambient {
                return Err(invalid(format!("ray {i} has {} coordinates, expected {ambient}", r.len())));
            }
        }
        let mut normalized = Vec::with_capacity(cones.len());
        for (c, cone) in cones.iter().enumerate() {
            let mut idx = cone.clone();
            for &i in &idx {
                if i >= rays.len() {
                    return Err(invalid(format!("cone {c} refers to ray {i}, but there are only {} rays", rays.len())));
                }
            }
            idx.sort_unstable();
            let before = idx.len();
            idx.dedup();
            if idx.len() != before {
                return Err(invalid(format!("cone {c} lists a ray twice")));
            }
            normalized.push(idx);
        }
        Ok(Fan { ambient, rays, cones: normalized })
    }

    pub fn from_i64(ambient: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        let rays = rays.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Fan::new(ambient, rays, cones.iter().map(|c| c.to_vec()).collect()).expect("well-formed fan data")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[Int] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// Maximal cones as sorted ray index lists.
    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone(&self, rays: &[usize]) -> Cone {
        Cone::new(self.ambient, rays.iter().map(|&i| self.rays[i].clone()).collect())
    }

    pub fn ray_matrix(&self, rays: &[usize]) -> IntMatrix {
        let rows: Vec<Vec<Int>> = rays.iter().map(|&i| self.rays[i].clone()).collect();
        IntMatrix::from_rows(&rows, self.ambient)
    }

    /// Ray sets of the faces of the cone spanned by `rays` (including the
    /// cone itself and the zero face).
    pub fn faces_of(&self, rays: &[usize]) -> BTreeSet<Vec<usize>> {
        let cone = self.cone(rays);
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        faces.insert(rays.to_vec());
        let facet_sets: Vec<Vec<usize>> = cone
            .facets()
            .iter()
            .map(|a| rays.iter().copied().filter(|&i| dot(a, &self.rays[i]).is_zero()).collect())
            .collect();
        let mut frontier: Vec<Vec<usize>> = vec![rays.to_vec()];
        while let Some(f) = frontier.pop() {
            for s in &facet_sets {
                let meet: Vec<usize> = f.iter().copied().filter(|i| s.contains(i)).collect();
                if faces.insert(meet.clone()) {
                    frontier.push(meet);
                }
            }
        }
        faces.insert(Vec::new());
        faces
    }

    /// All cones of the fan as ray sets, sorted by dimension then indices.
    pub fn all_cones(&self) -> Vec<Vec<usize>> {
        let mut all = BTreeSet::new();
        for c in &self.cones {
            all.extend(self.faces_of(c));
        }
        let mut v: Vec<Vec<usize>> = all.into_iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        v
    }

    pub fn cones_of_dim(&self, d: usize) -> Vec<Vec<usize>> {
        self.all_cones().into_iter().filter(|c| self.cone(c).dim() == d).collect()
    }

    pub fn contains_cone_set(&self, rays: &[usize]) -> bool {
        let mut r = rays.to_vec();
        r.sort_unstable();
        self.cones.iter().any(|c| r.iter().all(|i| c.contains(i)) && self.faces_of(c).contains(&r))
    }

    /// Indices of maximal cones having `face` among their faces.
    pub fn max_cones_containing(&self, face: &[usize]) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&c| face.iter().all(|i| self.cones[c].contains(i)) && self.faces_of(&self.cones[c]).contains(face))
            .collect()
    }

    /// Whether every cone is full dimensional in the ambient space.
    pub fn is_pure_full(&self) -> bool {
        self.cones.iter().all(|c| self.cone(c).dim() == self.ambient)
    }
}

/// Checks primitivity, strong convexity and pairwise compatibility; reports
/// simplicial/nonsingular flags and multiplicities.
pub fn fan_validate(f: &Fan) -> FanReport {
    let mut violations = Vec::new();
    for (i, r) in f.rays.iter().enumerate() {
        if r.iter().all(Zero::is_zero) {
            violations.push(FanViolation::ZeroRay { ray: i });
        } else if primitive(r) != *r {
            violations.push(FanViolation::NonPrimitiveRay { ray: i });
        }
    }
    let mut used = vec![false; f.rays.len()];
    let cones: Vec<Cone> = f.cones.iter().map(|c| f.cone(c)).collect();
    let mut reports = Vec::new();
    for (ci, c) in f.cones.iter().enumerate() {
        for &i in c {
            used[i] = true;
        }
        let cone = &cones[ci];
        let convex = cone.is_strongly_convex();
        if !convex {
            violations.push(FanViolation::NotStronglyConvex { cone: ci });
        } else {
            let extremal = cone.rays();
            for &i in c {
                if f.rays[i].iter().any(|x| !x.is_zero()) && !extremal.contains(&primitive(&f.rays[i])) {
                    violations.push(FanViolation::RedundantRay { cone: ci, ray: i });
                }
            }
        }
        let simplicial = convex && c.len() == cone.dim();
        let mult = if simplicial { multiplicity(cone).ok() } else { None };
        reports.push(ConeReport {
            rays: c.clone(),
            dim: cone.dim(),
            simplicial,
            nonsingular: mult.as_ref().is_some_and(|m| m.is_one()),
            multiplicity: mult,
        });
    }
    for (i, u) in used.iter().enumerate() {
        if !u {
            violations.push(FanViolation::UnusedRay { ray: i });
        }
    }
    for a in 0..cones.len() {
        for b in a + 1..cones.len() {
            let common: Vec<usize> = f.cones[a].iter().copied().filter(|i| f.cones[b].contains(i)).collect();
            let meet = cones[a].intersect(&cones[b]);
            let common_cone = f.cone(&common);
            if !meet.same_set(&common_cone) || !cones[a].has_face(&common_cone) || !cones[b].has_face(&common_cone) {
                violations.push(FanViolation::IncompatibleCones { first: a, second: b });
            } else if common.len() == f.cones[a].len() {
                violations.push(FanViolation::NotMaximal { cone: a });
            } else if common.len() == f.cones[b].len() {
                violations.push(FanViolation::NotMaximal { cone: b });
            }
        }
    }
    let simplicial = reports.iter().all(|r| r.simplicial);
    let nonsingular = reports.iter().all(|r| r.nonsingular);
    let multiplicity = if simplicial && violations.is_empty() {
        let mut total = Int::one();
        for c in f.all_cones() {
            total *= multiplicity(&f.cone(&c)).unwrap_or_else(|_| Int::one());
        }
        Some(total)
    } else {
        None
    };
    FanReport { violations, cones: reports, simplicial, nonsingular, multiplicity }
}

/// `{u : <u, v> + b >= 0}` for each stored pair `(v, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    ambient: usize,
    inequalities: Vec<(Vec<Int>, Int)>,
}

/// Vertex/ray decomposition: `conv(vertices) + cone(rays) + span(lineality)`.
#[derive(Clone, Debug)]
pub struct VRep {
    pub vertices: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Int>>,
    pub lineality: Vec<Vec<Int>>,
}

impl Polyhedron {
    pub fn new(ambient: usize, inequalities: Vec<(Vec<Int>, Int)>) -> Polyhedron {
        for (v, _) in &inequalities {
            assert_eq!(v.len(), ambient, "inequality has wrong length");
        }
        Polyhedron { ambient, inequalities }
    }

    pub fn from_i64(ambient: usize, ineqs: &[(&[i64], i64)]) -> Polyhedron {
        Polyhedron::new(
            ambient,
            ineqs.iter().map(|(v, b)| (v.iter().map(|&x| int(x)).collect(), int(*b))).collect(),
        )
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn inequalities(&self) -> &[(Vec<Int>, Int)] {
        &self.inequalities
    }

    pub fn contains(&self, u: &[Int]) -> bool {
        self.inequalities.iter().all(|(v, b)| !(dot(u, v) + b).is_negative())
    }

    pub fn contains_rat(&self, u: &[Rat]) -> bool {
        self.inequalities.iter().all(|(v, b)| !(dot_mixed(u, v) + rat_of(b)).is_negative())
    }

    /// `{(u, t) : <u, v> + b t >= 0, t >= 0}`.
    fn homogenization(&self) -> Cone {
        let mut rows: Vec<Vec<Int>> = self
            .inequalities
            .iter()
            .map(|(v, b)| {
                let mut r = v.clone();
                r.push(b.clone());
                r
            })
            .collect();
        let mut t = vec![Int::zero(); self.ambient + 1];
        t[self.ambient] = Int::one();
        rows.push(t);
        Cone::from_inequalities(self.ambient + 1, &rows, &[])
    }

    pub fn vrep(&self) -> VRep {
        let k = self.homogenization();
        let d = self.ambient;
        let lineality: Vec<Vec<Int>> = k.lineality().into_iter().map(|l| l[..d].to_vec()).collect();
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        let gens = if lineality.is_empty() { k.rays() } else { k.generators().to_vec() };
        for g in gens {
            let t = &g[d];
            if t.is_positive() {
                let tv = rat_of(t);
                vertices.push(g[..d].iter().map(|x| rat_of(x) / &tv).collect::<Vec<Rat>>());
            } else if t.is_zero() {
                let r = g[..d].to_vec();
                if !lineality.is_empty() && Cone::new(d, lineality.clone()).contains(&r) {
                    continue;
                }
                rays.push(r);
            }
        }
        vertices.sort();
        vertices.dedup();
        rays.sort();
        rays.dedup();
        VRep { vertices, rays, lineality }
    }

    pub fn is_empty(&self) -> bool {
        let k = self.homogenization();
        !k.generators().iter().any(|g| g[self.ambient].is_positive())
    }

    pub fn recession_cone(&self) -> Cone {
        let rows: Vec<Vec<Int>> = self.inequalities.iter().map(|(v, _)| v.clone()).collect();
        Cone::from_inequalities(self.ambient, &rows, &[])
    }

    pub fn is_bounded(&self) -> bool {
        self.is_empty() || self.recession_cone().dim() == 0
    }

    fn bounding_box(vertices: &[Vec<Rat>], d: usize) -> (Vec<Int>, Vec<Int>) {
        let mut lo = vec![Int::zero(); d];
        let mut hi = vec![Int::zero(); d];
        for i in 0..d {
            lo[i] = vertices.iter().map(|v| v[i].floor().to_integer()).min().expect("nonempty vertex set");
            hi[i] = vertices.iter().map(|v| v[i].ceil().to_integer()).max().expect("nonempty vertex set");
        }
        (lo, hi)
    }

    /// All lattice points, lexicographically ordered.
    pub fn lattice_points_bounded(&self) -> Result<Vec<Vec<Int>>> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        if !self.is_bounded() {
            return Err(precondition(
                "polyhedron is unbounded; use minimal_generators with a translation monoid",
            ));
        }
        let vrep = self.vrep();
        let (lo, hi) = Self::bounding_box(&vrep.vertices, self.ambient);
        Ok(box_points(&lo, &hi).into_iter().filter(|u| self.contains(u)).collect())
    }
}

/// Lattice points of the box `[lo, hi]` in lexicographic order.
pub fn box_points(lo: &[Int], hi: &[Int]) -> Vec<Vec<Int>> {
    let d = lo.len();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo.to_vec();
    loop {
        out.push(cur.clone());
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                cur[i + 1..d].clone_from_slice(&lo[i + 1..d]);
                break;
            }
        }
    }
}

pub fn lattice_points_bounded(p: &Polyhedron) -> Result<Vec<Vec<Int>>> {
    p.lattice_points_bounded()
}

/// Lattice points `u` of `p` such that `u - w` leaves `p` for every nonzero
/// lattice point `w` of `monoid`; they generate `p ∩ M` over the monoid.
pub fn minimal_generators(p: &Polyhedron, monoid: &Cone) -> Result<Vec<Vec<Int>>> {
    if monoid.ambient() != p.ambient() {
        return Err(precondition("monoid cone lives in a different lattice"));
    }
    if !monoid.is_strongly_convex() {
        return Err(precondition("translation monoid cone must be strongly convex"));
    }
    if p.is_empty() {
        return Ok(Vec::new());
    }
    let rec = p.recession_cone();
    if !monoid.contains_cone(&rec) {
        return Err(precondition("recession cone is not contained in the translation monoid"));
    }
    let vrep = p.vrep();
    let d = p.ambient();
    let (mut lo, mut hi) = Polyhedron::bounding_box(&vrep.vertices, d);
    // A minimal point is a vertex combination plus fractional multiples of
    // recession rays, so this box contains all of them.
    for r in &vrep.rays {
        for i in 0..d {
            if r[i].is_negative() {
                lo[i] += &r[i];
            } else {
                hi[i] += &r[i];
            }
        }
    }
    let candidates: Vec<Vec<Int>> = box_points(&lo, &hi).into_iter().filter(|u| p.contains(u)).collect();
    let mut out = Vec::new();
    for u in &candidates {
        let dominated = candidates.iter().any(|g| {
            if g == u {
                return false;
            }
            let w: Vec<Int> = u.iter().zip(g).map(|(a, b)| a - b).collect();
            monoid.contains(&w)
        });
        if !dominated {
            out.push(u.clone());
        }
    }
    Ok(out)
}

/// Common divisor of the entries, zero for the zero vector.
pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ivec;

    #[test]
    fn orthant_self_dual() {
        let c = Cone::from_i64(2, &[&[1, 0], &[0, 1]]);
        assert!(c.dual().same_set(&c));
        assert_eq!(c.facets(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
    }

    #[test]
    fn dual_of_non_unimodular_cone() {
        let c = Cone::from_i64(2, &[&[1, 0], &[1, 2]]);
        let d = c.dual();
        assert!(d.same_set(&Cone::from_i64(2, &[&[0, 1], &[2, -1]])));
        assert!(d.dual().same_set(&c));
    }

    #[test]
    fn dual_of_zero_cone_is_everything() {
        let d = Cone::zero(2).dual();
        assert_eq!(d.lineality().len(), 2);
        assert_eq!(d.dim(), 2);
    }

    #[test]
    fn lower_dimensional_cone_has_equations() {
        let c = Cone::from_i64(3, &[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.equations().len(), 1);
        let d = c.dual();
        assert_eq!(d.lineality().len(), 1);
        assert!(d.dual().same_set(&c));
    }

    #[test]
    fn redundant_generator_not_a_ray() {
        let c = Cone::from_i64(2, &[&[1, 0], &[1, 1], &[0, 1]]);
        assert_eq!(c.rays().len(), 2);
        assert!(!c.is_simplicial());
    }

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity(&Cone::from_i64(2, &[&[1, 0], &[0, 1]])).unwrap(), int(1));
        assert_eq!(multiplicity(&Cone::from_i64(2, &[&[1, 0], &[1, 2]])).unwrap(), int(2));
        assert_eq!(multiplicity(&Cone::from_i64(2, &[&[1, 2]])).unwrap(), int(1));
        assert!(multiplicity(&Cone::from_i64(2, &[&[1, 0], &[1, 1], &[0, 1]])).is_err());
    }

    #[test]
    fn p2_fan_valid() {
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]);
        let r = fan_validate(&f);
        assert!(r.is_valid(), "{:?}", r.violations);
        assert!(r.nonsingular);
        assert_eq!(f.all_cones().len(), 7);
    }

    #[test]
    fn overlapping_cones_rejected() {
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1]], &[&[0, 1], &[2, 3]]);
        let r = fan_validate(&f);
        assert!(r.violations.contains(&FanViolation::IncompatibleCones { first: 0, second: 1 }));
    }

    #[test]
    fn singular_cone_flagged() {
        let f = Fan::from_i64(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]);
        let r = fan_validate(&f);
        assert!(r.is_valid());
        assert!(r.simplicial);
        assert!(!r.nonsingular);
        assert_eq!(r.cones[0].multiplicity, Some(int(2)));
    }

    #[test]
    fn bad_cone_index() {
        assert!(Fan::new(2, vec![ivec(&[1, 0])], vec![vec![0, 3]]).is_err());
    }

    #[test]
    fn triangle_points() {
        let p = Polyhedron::from_i64(2, &[(&[1, 0], 0), (&[0, 1], 0), (&[-1, -1], 2)]);
        assert_eq!(p.lattice_points_bounded().unwrap().len(), 6);
    }

    #[test]
    fn empty_and_point() {
        let e = Polyhedron::from_i64(1, &[(&[1], -1), (&[-1], 0)]);
        assert!(e.is_empty());
        assert!(e.lattice_points_bounded().unwrap().is_empty());
        let pt = Polyhedron::from_i64(2, &[(&[1, 0], 0), (&[-1, 0], 0), (&[0, 1], 0), (&[0, -1], 0)]);
        assert_eq!(pt.lattice_points_bounded().unwrap(), vec![ivec(&[0, 0])]);
    }

    #[test]
    fn unbounded_rejected() {
        let p = Polyhedron::from_i64(1, &[(&[1], -3)]);
        assert!(p.lattice_points_bounded().is_err());
        let g = minimal_generators(&p, &Cone::from_i64(1, &[&[1]])).unwrap();
        assert_eq!(g, vec![ivec(&[3])]);
    }

    #[test]
    fn minimal_generators_bounded_case() {
        let p = Polyhedron::from_i64(2, &[(&[1, 0], 0), (&[0, 1], 0), (&[-1, -1], 2)]);
        let g = minimal_generators(&p, &Cone::zero(2)).unwrap();
        assert_eq!(g, p.lattice_points_bounded().unwrap());
    }

    #[test]
    fn monoid_must_contain_recession() {
        let p = Polyhedron::from_i64(1, &[(&[1], -3)]);
        assert!(minimal_generators(&p, &Cone::from_i64(1, &[&[-1]])).is_err());
    }
}
