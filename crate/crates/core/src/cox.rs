//! Cox coordinates, graded Jacobian rings and their graded pieces.
//!
//! Monomials of degree `[B]` correspond to weights `u` of the section
//! polyhedron of `B` through `e_ρ = <u, v_ρ> + b_ρ`. Derivatives are taken
//! only along the horizontal variables.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::error::{invalid, precondition, Error, Result};
use crate::exterior::{binomial, subsets};
use crate::linalg::{dot, rat_of, solve_integral, sparse_from_dense, Echelon, Int, Rat, SparseVec};
use crate::logforms::{LogModel, LogSheaf, RelativeWeightSpace};
use crate::polyhedra::{fan_validate, minimal_generators, Cone, Polyhedron};
use crate::positivity::{is_ample, section_polyhedron, support_function_from_divisor};
use crate::toric::{class_groups, is_log_smooth, is_proper, ClassGroupData, EquivariantSetup};

/// Exponents of a monomial in the Cox ring, one per ray.
pub type Exponents = Vec<u32>;

pub fn exponents_to_int(e: &[u32]) -> Vec<Int> {
    e.iter().map(|&x| Int::from(x)).collect()
}

/// `Cl(P)` degree `Σ e_ρ [P_ρ]`.
pub fn cox_degree(groups: &ClassGroupData, e: &[u32]) -> Vec<Int> {
    groups.degree(&exponents_to_int(e))
}

/// Exponents of the monomial for weight `u` with respect to `b`.
pub fn exponents_of_weight(s: &EquivariantSetup, b: &[Int], u: &[Int]) -> Result<Exponents> {
    let fan = s.fan();
    (0..fan.num_rays())
        .map(|r| {
            let e = dot(u, fan.ray(r)) + &b[r];
            u32::try_from(&e).map_err(|_| invalid(format!("weight {u:?} gives exponent {e} on ray {r}")))
        })
        .collect()
}

/// Monomials of degree `[b]`, ordered by weight. The section polyhedron must be bounded.
pub fn monomial_basis(s: &EquivariantSetup, b: &[Int]) -> Result<Vec<Exponents>> {
    monomial_weights(s, b)?.iter().map(|u| exponents_of_weight(s, b, u)).collect()
}

pub fn monomial_weights(s: &EquivariantSetup, b: &[Int]) -> Result<Vec<Vec<Int>>> {
    check_len(s, b)?;
    let poly = section_polyhedron(s, b);
    if !poly.is_bounded() {
        return Err(precondition("degree piece is infinite over the base; use family generators"));
    }
    poly.lattice_points_bounded()
}

/// Generators of the degree-`[b]` piece as a module over the base.
pub fn family_generators(s: &EquivariantSetup, b: &[Int]) -> Result<Vec<Exponents>> {
    family_weights(s, b)?.iter().map(|u| exponents_of_weight(s, b, u)).collect()
}

fn family_weights(s: &EquivariantSetup, b: &[Int]) -> Result<Vec<Vec<Int>>> {
    check_len(s, b)?;
    let poly = section_polyhedron(s, b);
    minimal_generators(&poly, &base_monoid(s))
}

/// `π^*(σ'^∨)` inside `M_R`.
fn base_monoid(s: &EquivariantSetup) -> Cone {
    let d = s.source_rank();
    let pi = s.pi_star();
    let gens = s
        .target()
        .dual()
        .generators()
        .iter()
        .map(|m| (0..d).map(|j| dot(m, &pi.col(j))).collect())
        .collect();
    Cone::new(d, gens)
}

fn check_len(s: &EquivariantSetup, b: &[Int]) -> Result<()> {
    if b.len() != s.fan().num_rays() {
        return Err(invalid(format!("divisor has {} coefficients for {} rays", b.len(), s.fan().num_rays())));
    }
    Ok(())
}

/// A representative divisor of a class in `Cl(P)`.
pub fn representative_divisor(groups: &ClassGroupData, beta: &[Int]) -> Result<Vec<Int>> {
    if beta.len() != groups.cl.element_len() {
        return Err(invalid("class has the wrong number of coordinates"));
    }
    Ok(groups.cl.lift(beta))
}

/// A polynomial in the Cox ring, homogeneous for the `Cl(P)` grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPolynomial {
    terms: BTreeMap<Exponents, Rat>,
    degree: Option<Vec<Int>>,
    nvars: usize,
}

impl GradedPolynomial {
    pub fn zero(nvars: usize) -> GradedPolynomial {
        GradedPolynomial { terms: BTreeMap::new(), degree: None, nvars }
    }

    /// Collects like terms, drops zeros and checks homogeneity.
    pub fn new(groups: &ClassGroupData, terms: Vec<(Rat, Exponents)>) -> Result<GradedPolynomial> {
        let nvars = groups.num_rays();
        let mut map: BTreeMap<Exponents, Rat> = BTreeMap::new();
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(invalid(format!("monomial has {} exponents for {nvars} rays", e.len())));
            }
            *map.entry(e).or_insert_with(Rat::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut degree: Option<Vec<Int>> = None;
        for e in map.keys() {
            let d = cox_degree(groups, e);
            match &degree {
                None => degree = Some(d),
                Some(d0) if *d0 != d => {
                    return Err(invalid(format!("polynomial is not homogeneous: monomial {e:?} has degree {d:?}, expected {d0:?}")))
                }
                _ => {}
            }
        }
        Ok(GradedPolynomial { terms: map, degree, nvars })
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rat> {
        &self.terms
    }

    pub fn degree(&self) -> Option<&[Int]> {
        self.degree.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Formal partial derivative in `z_ρ`.
    pub fn derivative(&self, groups: &ClassGroupData, ray: usize) -> GradedPolynomial {
        let terms: BTreeMap<Exponents, Rat> = self
            .terms
            .iter()
            .filter(|(e, _)| e[ray] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[ray] -= 1;
                (e2, c * Rat::from_integer(Int::from(e[ray])))
            })
            .collect();
        let degree = terms.keys().next().map(|e| cox_degree(groups, e));
        GradedPolynomial { terms, degree, nvars: self.nvars }
    }

    pub fn mul_monomial(&self, e: &[u32], groups: &ClassGroupData) -> GradedPolynomial {
        let terms: BTreeMap<Exponents, Rat> = self
            .terms
            .iter()
            .map(|(f, c)| (f.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
            .collect();
        let degree = terms.keys().next().map(|e| cox_degree(groups, e));
        GradedPolynomial { terms, degree, nvars: self.nvars }
    }

    pub fn scale(&self, k: &Rat) -> GradedPolynomial {
        let mut out = self.clone();
        if k.is_zero() {
            out.terms.clear();
            out.degree = None;
        } else {
            for c in out.terms.values_mut() {
                *c *= k;
            }
        }
        out
    }

    pub fn add(&self, other: &GradedPolynomial) -> GradedPolynomial {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(e.clone()).or_insert_with(Rat::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        let degree = if terms.is_empty() { None } else { self.degree.clone().or_else(|| other.degree.clone()) };
        GradedPolynomial { terms, degree, nvars: self.nvars }
    }
}

/// `S_P / (∂F/∂z_ρ : ρ ∈ Σ_π(1))`.
#[derive(Clone, Debug)]
pub struct GradedJacobianRing {
    setup: EquivariantSetup,
    groups: ClassGroupData,
    f: GradedPolynomial,
    /// Exponents of the first term of `F`: a representative of `[X]`.
    base: Vec<Int>,
    partials: Vec<(usize, GradedPolynomial)>,
}

impl GradedJacobianRing {
    pub fn new(setup: &EquivariantSetup, f: GradedPolynomial) -> Result<GradedJacobianRing> {
        let groups = class_groups(setup);
        if f.nvars() != setup.fan().num_rays() {
            return Err(invalid("polynomial and fan have different numbers of variables"));
        }
        let Some(first) = f.terms().keys().next() else {
            return Err(invalid("the zero polynomial defines no hypersurface"));
        };
        let base = exponents_to_int(first);
        let partials = setup.horizontal_rays().iter().map(|&r| (r, f.derivative(&groups, r))).collect();
        Ok(GradedJacobianRing { setup: setup.clone(), groups, f, base, partials })
    }

    pub fn setup(&self) -> &EquivariantSetup {
        &self.setup
    }

    pub fn groups(&self) -> &ClassGroupData {
        &self.groups
    }

    pub fn polynomial(&self) -> &GradedPolynomial {
        &self.f
    }

    pub fn partials(&self) -> &[(usize, GradedPolynomial)] {
        &self.partials
    }

    /// A divisor representing `[X]`.
    pub fn hypersurface_divisor(&self) -> &[Int] {
        &self.base
    }

    /// `[X]` in `Cl(P)`.
    pub fn hypersurface_class(&self) -> Vec<Int> {
        self.groups.degree(&self.base)
    }

    /// Representative of the degree multiplying `∂F/∂z_ρ` into degree `[b]`.
    fn multiplier_divisor(&self, b: &[Int], ray: usize) -> Vec<Int> {
        let mut out: Vec<Int> = b.iter().zip(&self.base).map(|(x, y)| x - y).collect();
        out[ray] += 1;
        out
    }

    /// Images of `S^{[b]-[X]+[P_ρ]} · ∂F/∂z_ρ` in the monomial basis of `S^{[b]}`.
    fn jacobian_images(&self, b: &[Int], index: &HashMap<Exponents, usize>) -> Result<Vec<SparseVec>> {
        let mut out = Vec::new();
        for (ray, df) in &self.partials {
            if df.is_zero() {
                continue;
            }
            let mb = self.multiplier_divisor(b, *ray);
            for m in monomial_basis(&self.setup, &mb)? {
                let prod = df.mul_monomial(&m, &self.groups);
                let mut v: Vec<(usize, Rat)> = prod
                    .terms()
                    .iter()
                    .map(|(e, c)| {
                        index
                            .get(e)
                            .map(|&i| (i, c.clone()))
                            .ok_or_else(|| invalid(format!("product monomial {e:?} is not of the target degree")))
                    })
                    .collect::<Result<_>>()?;
                v.sort_by_key(|x| x.0);
                out.push(v);
            }
        }
        Ok(out)
    }

    /// `dim R^{[b]}` (complete case).
    pub fn graded_dim_for_divisor(&self, b: &[Int]) -> Result<usize> {
        if self.setup.target_rank() != 0 {
            return Err(precondition("pieces are infinite-dimensional over a positive-dimensional base; use fiber_dim"));
        }
        check_len(&self.setup, b)?;
        let basis = monomial_basis(&self.setup, b)?;
        let index: HashMap<Exponents, usize> = basis.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut ech = Echelon::new(basis.len());
        for v in self.jacobian_images(b, &index)? {
            ech.insert_sparse(v);
        }
        Ok(basis.len() - ech.rank())
    }

    /// `dim R^β` for a class `β ∈ Cl(P)` (complete case).
    pub fn graded_dim(&self, beta: &[Int]) -> Result<usize> {
        let b = representative_divisor(&self.groups, beta)?;
        self.graded_dim_for_divisor(&b)
    }

    /// `Σ_ρ φ([P_ρ]) z_ρ ∂F/∂z_ρ - φ([X]) F`, with `φ` given on the free
    /// coordinates of `Cl(P∖E)`.
    pub fn euler_defect(&self, phi: &[Int]) -> Result<GradedPolynomial> {
        let free = self.groups.cl_open.free_rank;
        if phi.len() != free {
            return Err(invalid(format!("homomorphism needs {free} values, got {}", phi.len())));
        }
        let n = self.setup.fan().num_rays();
        let mut lhs = GradedPolynomial::zero(n);
        for (ray, df) in &self.partials {
            let mut e = vec![Int::zero(); n];
            e[*ray] = Int::one();
            let weight = dot(phi, &self.groups.open_free_part(&e));
            let mut z = vec![0u32; n];
            z[*ray] = 1;
            lhs = lhs.add(&df.mul_monomial(&z, &self.groups).scale(&rat_of(&weight)));
        }
        let fx = dot(phi, &self.groups.open_free_part(&self.base));
        Ok(lhs.add(&self.f.scale(&-rat_of(&fx))))
    }

    pub fn euler_identity_check(&self, phi: &[Int]) -> Result<bool> {
        Ok(self.euler_defect(phi)?.is_zero())
    }

    /// `dim R^{[b]} ⊗ κ(t0)` for a point of the base.
    pub fn fiber_dim_for_divisor(&self, b: &[Int], t0: &FiberPoint) -> Result<usize> {
        check_len(&self.setup, b)?;
        let s = &self.setup;
        if s.target_rank() == 0 {
            return self.graded_dim_for_divisor(b);
        }
        if s.target().dim() != s.target_rank() {
            return Err(precondition("the base cone must be full-dimensional"));
        }
        let eval = FiberEvaluator::new(s, t0)?;
        let gens = family_weights(s, b)?;
        let g = gens.len();
        let pi = s.pi_star();
        let pullback_t = pi.transpose();
        // π^* as a map M' -> M is the transpose of π_*.
        let dual = s.target().dual();
        let m = s.target_rank();
        let mut ech = Echelon::new(g);
        // Binomial relations between generators.
        for i in 0..g {
            for j in i + 1..g {
                let diff: Vec<Int> = gens[i].iter().zip(&gens[j]).map(|(x, y)| x - y).collect();
                let Some(c) = solve_integral(&pullback_t, &diff) else { continue };
                let ineqs: Vec<(Vec<Int>, Int)> = dual_inequalities(s)
                    .into_iter()
                    .flat_map(|r| {
                        let rc = dot(&r, &c);
                        [(r.clone(), Int::zero()), (r, -rc)]
                    })
                    .collect();
                let poly = Polyhedron::new(m, ineqs);
                for bb in minimal_generators(&poly, &dual)? {
                    let a: Vec<Int> = bb.iter().zip(&c).map(|(x, y)| x - y).collect();
                    let mut v = vec![Rat::zero(); g];
                    v[i] = eval.value(&a)?;
                    v[j] = -eval.value(&bb)?;
                    ech.insert_sparse(sparse_from_dense(&v));
                }
            }
        }
        // Images of the Jacobian generators.
        let base_weight_terms: Vec<(Vec<Int>, Exponents, Rat)> = {
            let poly_rows: Vec<Vec<Int>> = (0..s.fan().num_rays()).map(|r| s.fan().ray(r).to_vec()).collect();
            self.f
                .terms()
                .iter()
                .map(|(e, c)| {
                    let target: Vec<Int> = exponents_to_int(e).iter().zip(&self.base).map(|(x, y)| x - y).collect();
                    let rm = crate::linalg::IntMatrix::from_rows(&poly_rows, s.source_rank());
                    let w = solve_integral(&rm, &target).expect("homogeneous terms differ by a character");
                    (w, e.clone(), c.clone())
                })
                .collect()
        };
        for (ray, df) in &self.partials {
            if df.is_zero() {
                continue;
            }
            let mb = self.multiplier_divisor(b, *ray);
            for h in family_weights(s, &mb)? {
                let mut v = vec![Rat::zero(); g];
                for (a, e, c) in &base_weight_terms {
                    if e[*ray] == 0 {
                        continue;
                    }
                    let w: Vec<Int> = h.iter().zip(a).map(|(x, y)| x + y).collect();
                    let (gi, shift) = locate(&gens, &w, &pullback_t, &dual)
                        .ok_or_else(|| invalid(format!("weight {w:?} is not generated")))?;
                    v[gi] += c * Rat::from_integer(Int::from(e[*ray])) * eval.value(&shift)?;
                }
                ech.insert_sparse(sparse_from_dense(&v));
            }
        }
        Ok(g - ech.rank())
    }
}

fn dual_inequalities(s: &EquivariantSetup) -> Vec<Vec<Int>> {
    s.target().generators().to_vec()
}

/// Finds a generator `g` and `a ∈ σ'^∨` with `w = g + π^* a`.
fn locate(gens: &[Vec<Int>], w: &[Int], pullback_t: &crate::linalg::IntMatrix, dual: &Cone) -> Option<(usize, Vec<Int>)> {
    for (i, g) in gens.iter().enumerate() {
        let diff: Vec<Int> = w.iter().zip(g).map(|(x, y)| x - y).collect();
        if let Some(a) = solve_integral(pullback_t, &diff) {
            if dual.contains(&a) {
                return Some((i, a));
            }
        }
    }
    None
}

/// A point of the base given by values of characters `χ^{m'}`, `m' ∈ M' ∩ σ'^∨`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPoint {
    pub values: Vec<(Vec<Int>, Rat)>,
}

struct FiberEvaluator {
    values: Vec<(Vec<Int>, Rat)>,
    dual: Cone,
    grading: Vec<Int>,
    memo: std::cell::RefCell<HashMap<Vec<Int>, Rat>>,
}

impl FiberEvaluator {
    fn new(s: &EquivariantSetup, t0: &FiberPoint) -> Result<FiberEvaluator> {
        let dual = s.target().dual();
        let grading = s.target().interior_point();
        for (m, _) in &t0.values {
            if m.len() != s.target_rank() {
                return Err(invalid(format!("character {m:?} has the wrong length")));
            }
            if !dual.contains(m) || m.iter().all(Int::is_zero) {
                return Err(invalid(format!("character {m:?} is not a nonzero element of the base semigroup")));
            }
        }
        Ok(FiberEvaluator { values: t0.values.clone(), dual, grading, memo: Default::default() })
    }

    /// `t0(χ^{m})`; every factorization through the given characters must agree.
    fn value(&self, m: &[Int]) -> Result<Rat> {
        if m.iter().all(Int::is_zero) {
            return Ok(Rat::one());
        }
        if let Some(v) = self.memo.borrow().get(m) {
            return Ok(v.clone());
        }
        let mut found: Option<Rat> = None;
        for (c, val) in &self.values {
            let rest: Vec<Int> = m.iter().zip(c).map(|(x, y)| x - y).collect();
            if !self.dual.contains(&rest) || dot(&rest, &self.grading) >= dot(m, &self.grading) {
                continue;
            }
            let v = val * self.value(&rest)?;
            match &found {
                None => found = Some(v),
                Some(f) if *f != v => {
                    return Err(invalid(format!("fiber point is not multiplicative at character {m:?}")))
                }
                _ => {}
            }
        }
        let v = found.ok_or_else(|| invalid(format!("character {m:?} is not generated by the given values")))?;
        self.memo.borrow_mut().insert(m.to_vec(), v.clone());
        Ok(v)
    }
}

/// Outcome of the Hodge-number computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HodgeValue {
    Complete(usize),
    Fibers(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeResult {
    /// Representative of `[(n-p)X - D]`.
    pub divisor: Vec<Int>,
    pub class: Vec<Int>,
    pub value: HodgeValue,
}

/// Hypotheses of the isomorphism between log cohomology and the Jacobian ring.
pub fn main_hypotheses(jr: &GradedJacobianRing, p: usize) -> Vec<String> {
    let s = jr.setup();
    let mut out = Vec::new();
    if !fan_validate(s.fan()).nonsingular {
        out.push("the fan is not nonsingular".to_string());
    }
    if !is_proper(s) {
        out.push("the morphism is not proper".to_string());
    }
    if !is_log_smooth(s) {
        out.push("the morphism is not log smooth".to_string());
    }
    let ample = support_function_from_divisor(s, jr.hypersurface_divisor())
        .and_then(|d| is_ample(s, &d))
        .unwrap_or(false);
    if !ample {
        out.push("the hypersurface is not ample".to_string());
    }
    if jr.groups().cl_open.is_zero_element(&jr.groups().open_degree(jr.hypersurface_divisor())) {
        out.push("the class of the hypersurface in Cl(P∖E) is zero".to_string());
    }
    let n = s.relative_dim();
    if p + 1 > n {
        out.push(format!("form degree {p} is outside 0..={}", n.saturating_sub(1)));
    }
    out
}

/// `(n-p) B_X - D`.
pub fn main_degree_divisor(jr: &GradedJacobianRing, p: usize) -> Vec<Int> {
    let s = jr.setup();
    let k = Int::from(s.relative_dim() - p);
    let mut b: Vec<Int> = jr.hypersurface_divisor().iter().map(|x| x * &k).collect();
    for &r in s.horizontal_rays() {
        b[r] -= 1;
    }
    b
}

/// `dim R^{[(n-p)X - D]}`, or its fiber dimensions at the given points.
pub fn hodge_dim_main(jr: &GradedJacobianRing, p: usize, fibers: &[FiberPoint]) -> Result<HodgeResult> {
    let failed = main_hypotheses(jr, p);
    if !failed.is_empty() {
        return Err(Error::Hypotheses(failed));
    }
    let divisor = main_degree_divisor(jr, p);
    let class = jr.groups().degree(&divisor);
    let value = if jr.setup().target_rank() == 0 {
        HodgeValue::Complete(jr.graded_dim_for_divisor(&divisor)?)
    } else {
        if fibers.is_empty() {
            return Err(invalid("a family needs at least one fiber point"));
        }
        HodgeValue::Fibers(fibers.iter().map(|t| jr.fiber_dim_for_divisor(&divisor, t)).collect::<Result<_>>()?)
    };
    Ok(HodgeResult { divisor, class, value })
}

fn top_form_weights(sheaf: &LogSheaf) -> Result<Vec<Vec<Int>>> {
    let poly = section_polyhedron(sheaf.setup(), sheaf.twist());
    Ok(poly
        .lattice_points_bounded()?
        .into_iter()
        .filter(|u| !sheaf.global_sections(u).is_zero())
        .collect())
}

/// Contraction `ι_c (e_1 ∧ ... ∧ e_n)` in the basis of `Λ^{n-1}`.
fn contract_top(n: usize, c: &[Rat]) -> Vec<Rat> {
    // subsets(n, n-1) lists [n]∖{i} for i = n-1, ..., 0.
    subsets(n, n - 1)
        .iter()
        .map(|s| {
            let i = (0..n).find(|i| !s.contains(i)).expect("one index missing");
            if i % 2 == 0 {
                c[i].clone()
            } else {
                -c[i].clone()
            }
        })
        .collect()
}

/// `x ∧ y` for `x ∈ Λ^1`, `y ∈ Λ^{n-1}`, as a coefficient of `e_1 ∧ ... ∧ e_n`.
fn wedge_to_top(n: usize, x: &[Rat], y: &[Rat]) -> Rat {
    crate::exterior::wedge_product(n, 1, x, n - 1, y)[0].clone()
}

/// Independent evaluation of `H^{n-p-1}(ω^{p+1}(log X))` through top forms:
/// the cokernel in `H^0(ω^n((n-p)X))` of multiplication by `F` on
/// `H^0(ω^n((n-p-1)X))` together with `dF ∧ Ψ(·)` on
/// `⊕_ρ H^0(ω^n((n-p-1)X + P_ρ))`. Weights come from the log-form models,
/// `Ψ` is contraction with `v_ρ` and `dF` pairs weights with it by wedge.
pub fn log_cohomology_oracle(jr: &GradedJacobianRing, p: usize) -> Result<usize> {
    let s = jr.setup();
    if s.target_rank() != 0 {
        return Err(precondition("the oracle handles complete varieties only"));
    }
    let failed = main_hypotheses(jr, p);
    if !failed.is_empty() {
        return Err(Error::Hypotheses(failed));
    }
    let n = s.relative_dim();
    let base = jr.hypersurface_divisor();
    let scaled = |k: usize| -> Vec<Int> { base.iter().map(|x| x * Int::from(k)).collect() };
    let top = |twist: Vec<Int>| -> Result<(LogSheaf, Vec<Vec<Int>>)> {
        let sh = LogSheaf::new(s, n, LogModel::Tilde, twist)?;
        let w = top_form_weights(&sh)?;
        Ok((sh, w))
    };
    let k = n - p - 1;
    let (_, v1) = top(scaled(k + 1))?;
    if p + 1 == n {
        return Ok(v1.len());
    }
    let index: HashMap<Vec<Int>, usize> = v1.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
    let fan = s.fan();
    let rows: Vec<Vec<Int>> = (0..fan.num_rays()).map(|r| fan.ray(r).to_vec()).collect();
    let rm = crate::linalg::IntMatrix::from_rows(&rows, s.source_rank());
    let f_terms: Vec<(Vec<Int>, Rat)> = jr
        .polynomial()
        .terms()
        .iter()
        .map(|(e, c)| {
            let target: Vec<Int> = exponents_to_int(e).iter().zip(base).map(|(x, y)| x - y).collect();
            (solve_integral(&rm, &target).expect("homogeneous terms differ by a character"), c.clone())
        })
        .collect();
    let space = RelativeWeightSpace::new(s);
    let mut ech = Echelon::new(v1.len());
    let push = |u: &[Int], coeff: &dyn Fn(&[Int]) -> Rat, ech: &mut Echelon| -> Result<()> {
        let mut v: Vec<(usize, Rat)> = Vec::new();
        for (a, c) in &f_terms {
            let k = coeff(a);
            if k.is_zero() {
                continue;
            }
            let w: Vec<Int> = u.iter().zip(a).map(|(x, y)| x + y).collect();
            let i = *index.get(&w).ok_or_else(|| invalid(format!("weight {w:?} leaves the target")))?;
            v.push((i, c * k));
        }
        v.sort_by_key(|x| x.0);
        let mut merged: Vec<(usize, Rat)> = Vec::new();
        for (i, x) in v {
            match merged.last_mut() {
                Some((j, y)) if *j == i => *y += x,
                _ => merged.push((i, x)),
            }
        }
        merged.retain(|(_, x)| !x.is_zero());
        ech.insert_sparse(merged);
        Ok(())
    };
    let (_, v0) = top(scaled(k))?;
    for u in &v0 {
        push(u, &|_| Rat::one(), &mut ech)?;
    }
    for &rho in s.horizontal_rays() {
        let mut tw = scaled(k);
        tw[rho] += 1;
        let (_, vr) = top(tw)?;
        let psi = contract_top(n, space.ray_coords(rho));
        // Shifting weights by some m with <m, v_ρ> = -b_ρ gives a frame where
        // the representative has no ρ-component; there dF ∧ Ψ agrees with
        // the derivative on the nose.
        let shift = rat_of(&base[rho]);
        for u in &vr {
            let coeff = |a: &[Int]| -> Rat { wedge_to_top(n, &space.project(a), &psi) + &shift };
            push(u, &coeff, &mut ech)?;
        }
    }
    Ok(v1.len() - ech.rank())
}

/// Number of monomials of the degree `[b]` (complete case).
pub fn graded_piece_dim(s: &EquivariantSetup, b: &[Int]) -> Result<usize> {
    Ok(monomial_weights(s, b)?.len())
}

/// Binomial helper for Hilbert-function comparisons.
pub fn monomial_count(vars: usize, degree: usize) -> usize {
    if vars == 0 {
        return usize::from(degree == 0);
    }
    binomial(degree + vars - 1, vars - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ivec, IntMatrix};
    use crate::polyhedra::Fan;
    use crate::toric::{build_setup, over_point};

    fn projective(n: usize) -> EquivariantSetup {
        let mut rays: Vec<Vec<Int>> = (0..n).map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect()).collect();
        rays.push(vec![Int::from(-1); n]);
        let cones: Vec<Vec<usize>> = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
        over_point(Fan::new(n, rays, cones).unwrap()).unwrap()
    }

    fn fermat(s: &EquivariantSetup, d: u32) -> GradedPolynomial {
        let k = s.fan().num_rays();
        let terms = (0..k)
            .map(|i| {
                let mut e = vec![0u32; k];
                e[i] = d;
                (Rat::one(), e)
            })
            .collect();
        GradedPolynomial::new(&class_groups(s), terms).unwrap()
    }

    #[test]
    fn degrees_on_p2() {
        let s = projective(2);
        let g = class_groups(&s);
        assert_eq!(cox_degree(&g, &[1, 1, 1]), ivec(&[3]));
        assert_eq!(cox_degree(&g, &[0, 0, 0]), ivec(&[0]));
        assert_eq!(monomial_basis(&s, &ivec(&[0, 0, 2])).unwrap().len(), 6);
        assert_eq!(monomial_basis(&s, &ivec(&[0, 0, 0])).unwrap(), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn inhomogeneous_rejected() {
        let s = projective(2);
        let g = class_groups(&s);
        assert!(GradedPolynomial::new(&g, vec![(Rat::one(), vec![2, 0, 0]), (Rat::one(), vec![1, 0, 0])]).is_err());
    }

    #[test]
    fn fermat_cubic_surface() {
        let s = projective(3);
        let jr = GradedJacobianRing::new(&s, fermat(&s, 3)).unwrap();
        assert_eq!(jr.graded_dim(&ivec(&[2])).unwrap(), 6);
        assert_eq!(jr.graded_dim(&ivec(&[0])).unwrap(), 1);
        let h = hodge_dim_main(&jr, 1, &[]).unwrap();
        assert_eq!(h.value, HodgeValue::Complete(6));
        assert_eq!(log_cohomology_oracle(&jr, 1).unwrap(), 6);
    }

    #[test]
    fn elliptic_and_k3() {
        let p2 = projective(2);
        let jr = GradedJacobianRing::new(&p2, fermat(&p2, 3)).unwrap();
        assert_eq!(hodge_dim_main(&jr, 0, &[]).unwrap().value, HodgeValue::Complete(1));
        assert_eq!(log_cohomology_oracle(&jr, 0).unwrap(), 1);
        assert_eq!(log_cohomology_oracle(&jr, 1).unwrap(), hodge_count(&jr, 1));
        let p3 = projective(3);
        let jr = GradedJacobianRing::new(&p3, fermat(&p3, 4)).unwrap();
        assert_eq!(hodge_dim_main(&jr, 2, &[]).unwrap().value, HodgeValue::Complete(1));
        assert_eq!(log_cohomology_oracle(&jr, 2).unwrap(), 1);
        assert_eq!(log_cohomology_oracle(&jr, 1).unwrap(), hodge_count(&jr, 1));
        assert_eq!(log_cohomology_oracle(&jr, 0).unwrap(), hodge_count(&jr, 0));
    }

    fn hodge_count(jr: &GradedJacobianRing, p: usize) -> usize {
        match hodge_dim_main(jr, p, &[]).unwrap().value {
            HodgeValue::Complete(x) => x,
            HodgeValue::Fibers(_) => unreachable!(),
        }
    }

    #[test]
    fn euler_identity_on_p2() {
        let s = projective(2);
        let jr = GradedJacobianRing::new(&s, fermat(&s, 3)).unwrap();
        assert!(jr.euler_identity_check(&ivec(&[1])).unwrap());
        assert!(jr.euler_identity_check(&ivec(&[0])).unwrap());
    }

    #[test]
    fn hypotheses_reported() {
        let s = projective(2);
        let g = class_groups(&s);
        let f = GradedPolynomial::new(&g, vec![(Rat::one(), vec![0, 0, 0])]).unwrap();
        let jr = GradedJacobianRing::new(&s, f).unwrap();
        let Err(Error::Hypotheses(h)) = hodge_dim_main(&jr, 0, &[]) else { panic!() };
        assert!(h.iter().any(|m| m.contains("ample")));
    }

    fn blowup() -> EquivariantSetup {
        let fan = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[0, -1], &[1, 1]], &[&[0, 3], &[1, 3], &[0, 2]]);
        build_setup(fan, IntMatrix::from_i64_rows(&[&[1, 0]]), Cone::from_i64(1, &[&[1]])).unwrap()
    }

    #[test]
    fn blowup_fibers() {
        let s = blowup();
        let g = class_groups(&s);
        let t = |v: i64| FiberPoint { values: vec![(ivec(&[1]), Rat::from_integer(Int::from(v)))] };
        for d in 2..=4u32 {
            // z1^d + z2^d z0^a z3^b of a common degree
            let b = family_generators(&s, &[Int::zero(), Int::zero(), Int::from(d), Int::zero()]).unwrap();
            let terms: Vec<(Rat, Exponents)> = b.into_iter().map(|e| (Rat::one(), e)).collect();
            let f = GradedPolynomial::new(&g, terms).unwrap();
            let jr = GradedJacobianRing::new(&s, f).unwrap();
            let div = main_degree_divisor(&jr, 0);
            let one = jr.fiber_dim_for_divisor(&div, &t(1)).unwrap();
            let zero = jr.fiber_dim_for_divisor(&div, &t(0)).unwrap();
            assert!(zero >= one);
        }
    }
}
