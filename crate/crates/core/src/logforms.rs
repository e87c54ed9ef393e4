//! Monomial models of relative logarithmic differential forms.
//!
//! Sections of the sheaves considered here split into weight spaces: on the
//! chart of a cone `σ` the weight-`u` piece is a subspace of `Λ^p M_{π,k}`.
//! With a twist by `O(B)`, `B = Σ b_ρ P_ρ`, a weight `u` is admissible on
//! `σ` when `<u, v_ρ> + b_ρ >= 0` for the rays of `σ`, and the horizontal
//! rays of `σ` with `<u, v_ρ> + b_ρ = 0` cut out
//! `H_{σ,u} = {w : <w, v_ρ> = 0}` in `M_{π,k}`.
//!
//! * `Tilde`: `Λ^p H_{σ,u}`
//! * `LogD`: all of `Λ^p M_{π,k}`
//! * `Weight(r)`: `W_r`, spanned by `η ∧ w` with `η ∈ Λ^r M_{π,k}`,
//!   `w ∈ Λ^{p-r} H_{σ,u}`

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::exterior::{binomial, subsets, wedge_product, wedge_vectors};
use crate::linalg::{
    dot, integer_kernel, rat_of, solution_space, sparse_from_dense, Echelon, Int, Rat, RatMatrix,
    SparseVec, Subspace,
};
use crate::polyhedra::{box_points, fan_validate};
use crate::positivity::{is_ample, support_function_from_divisor};
use crate::toric::{class_groups, is_log_smooth, is_proper, EquivariantSetup};

/// `M_{π,k}`, identified with `Q^n` through a basis `k_1..k_n` of `ker π_*`:
/// `u ↦ (<u, k_i>)_i`. A horizontal ray `v_ρ = Σ c_i k_i` pairs with `w` as `w · c`.
#[derive(Clone, Debug)]
pub struct RelativeWeightSpace {
    pub n: usize,
    kernel: Vec<Vec<Int>>,
    ray_coords: Vec<Option<Vec<Rat>>>,
}

impl RelativeWeightSpace {
    pub fn new(s: &EquivariantSetup) -> RelativeWeightSpace {
        let d = s.source_rank();
        let kernel: Vec<Vec<Int>> = if s.target_rank() == 0 {
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
                .collect()
        } else {
            integer_kernel(s.pi_star())
        };
        let n = kernel.len();
        let mut kmat = RatMatrix::zeros(d, n);
        for (j, k) in kernel.iter().enumerate() {
            for (i, x) in k.iter().enumerate() {
                kmat.set(i, j, rat_of(x));
            }
        }
        let fan = s.fan();
        let ray_coords = (0..fan.num_rays())
            .map(|r| {
                if s.is_horizontal(r) {
                    let v: Vec<Rat> = fan.ray(r).iter().map(rat_of).collect();
                    Some(kmat.solve(&v).expect("horizontal ray lies in the kernel"))
                } else {
                    None
                }
            })
            .collect();
        RelativeWeightSpace { n, kernel, ray_coords }
    }

    /// Image of `u ∈ M` in `M_{π,k}`.
    pub fn project(&self, u: &[Int]) -> Vec<Rat> {
        self.kernel.iter().map(|k| rat_of(&dot(u, k))).collect()
    }

    /// Coordinates of a horizontal ray in `N_{π,k}`.
    pub fn ray_coords(&self, ray: usize) -> &[Rat] {
        self.ray_coords[ray].as_deref().expect("ray is horizontal")
    }

    pub fn pairing(&self, w: &[Rat], ray: usize) -> Rat {
        w.iter().zip(self.ray_coords(ray)).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogModel {
    Tilde,
    LogD,
    Weight(usize),
}

impl std::fmt::Display for LogModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogModel::Tilde => write!(f, "tilde"),
            LogModel::LogD => write!(f, "logd"),
            LogModel::Weight(r) => write!(f, "w:{r}"),
        }
    }
}

/// Bases of `Λ^k` of the span of `basis` (which must be independent).
pub fn wedge_power_basis(n: usize, basis: &[Vec<Rat>], k: usize) -> Vec<Vec<Rat>> {
    subsets(basis.len(), k)
        .into_iter()
        .map(|idx| {
            let vs: Vec<Vec<Rat>> = idx.iter().map(|&i| basis[i].clone()).collect();
            wedge_vectors(n, &vs)
        })
        .collect()
}

fn unit(len: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); len];
    v[i] = Rat::one();
    v
}

/// A twisted equivariant sheaf of relative log `p`-forms.
#[derive(Clone, Debug)]
pub struct LogSheaf {
    setup: EquivariantSetup,
    space: RelativeWeightSpace,
    p: usize,
    model: LogModel,
    twist: Vec<Int>,
}

impl LogSheaf {
    pub fn new(setup: &EquivariantSetup, p: usize, model: LogModel, twist: Vec<Int>) -> Result<LogSheaf> {
        if twist.len() != setup.fan().num_rays() {
            return Err(invalid(format!(
                "twist has {} coefficients for {} rays",
                twist.len(),
                setup.fan().num_rays()
            )));
        }
        Ok(LogSheaf { setup: setup.clone(), space: RelativeWeightSpace::new(setup), p, model, twist })
    }

    pub fn setup(&self) -> &EquivariantSetup {
        &self.setup
    }

    pub fn space(&self) -> &RelativeWeightSpace {
        &self.space
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn model(&self) -> LogModel {
        self.model
    }

    pub fn twist(&self) -> &[Int] {
        &self.twist
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    /// Dimension of `Λ^p M_{π,k}`.
    pub fn ambient_dim(&self) -> usize {
        binomial(self.n(), self.p)
    }

    fn slack(&self, u: &[Int], ray: usize) -> Int {
        dot(u, self.setup.fan().ray(ray)) + &self.twist[ray]
    }

    pub fn admissible(&self, cone: &[usize], u: &[Int]) -> bool {
        cone.iter().all(|&r| self.slack(u, r) >= Int::zero())
    }

    /// Horizontal rays of `cone` on which the twisted weight vanishes.
    pub fn zero_set(&self, cone: &[usize], u: &[Int]) -> Vec<usize> {
        cone.iter()
            .copied()
            .filter(|&r| self.setup.is_horizontal(r) && self.slack(u, r).is_zero())
            .collect()
    }

    /// `H_{σ,u}` inside `Q^n`.
    pub fn h_space(&self, cone: &[usize], u: &[Int]) -> Subspace {
        let eqs: Vec<Vec<Rat>> = self.zero_set(cone, u).iter().map(|&r| self.space.ray_coords(r).to_vec()).collect();
        solution_space(self.n(), &eqs)
    }

    /// The weight-`u` piece on the chart of `cone`, inside `Λ^p Q^n`.
    pub fn local_sections(&self, cone: &[usize], u: &[Int]) -> Subspace {
        self.local_sections_for(self.model, cone, u)
    }

    fn local_sections_for(&self, model: LogModel, cone: &[usize], u: &[Int]) -> Subspace {
        let n = self.n();
        let amb = binomial(n, self.p);
        if !self.admissible(cone, u) {
            return Subspace::zero(amb);
        }
        match model {
            LogModel::LogD => Subspace::full(amb),
            LogModel::Tilde if self.p == n => {
                if self.zero_set(cone, u).is_empty() {
                    Subspace::full(amb)
                } else {
                    Subspace::zero(amb)
                }
            }
            LogModel::Tilde => {
                let h = self.h_space(cone, u);
                Subspace::span(amb, wedge_power_basis(n, h.basis(), self.p))
            }
            LogModel::Weight(r) if r >= self.p => Subspace::full(amb),
            LogModel::Weight(r) => {
                let h = self.h_space(cone, u);
                let tail = wedge_power_basis(n, h.basis(), self.p - r);
                let mut gens = Vec::new();
                for i in 0..binomial(n, r) {
                    let e = unit(binomial(n, r), i);
                    for y in &tail {
                        gens.push(wedge_product(n, r, &e, self.p - r, y));
                    }
                }
                Subspace::span(amb, gens)
            }
        }
    }

    /// Global sections of weight `u`: pieces compatible on all maximal charts.
    pub fn global_sections(&self, u: &[Int]) -> Subspace {
        let amb = self.ambient_dim();
        let mut acc = Subspace::full(amb);
        for c in self.setup.fan().max_cones() {
            acc = acc.intersect(&self.local_sections(c, u));
            if acc.is_zero() {
                break;
            }
        }
        acc
    }
}

/// A box of weights `lo <= u <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightBox {
    pub lo: Vec<Int>,
    pub hi: Vec<Int>,
}

impl WeightBox {
    pub fn new(lo: Vec<Int>, hi: Vec<Int>) -> WeightBox {
        assert_eq!(lo.len(), hi.len());
        WeightBox { lo, hi }
    }

    pub fn cube(dim: usize, radius: i64) -> WeightBox {
        WeightBox::new(vec![Int::from(-radius); dim], vec![Int::from(radius); dim])
    }

    pub fn points(&self) -> Vec<Vec<Int>> {
        box_points(&self.lo, &self.hi)
    }

    pub fn on_boundary(&self, u: &[Int]) -> bool {
        u.iter().zip(&self.lo).zip(&self.hi).any(|((x, l), h)| x == l || x == h)
    }

    pub fn inflate(&self, margin: &Int) -> WeightBox {
        WeightBox::new(
            self.lo.iter().map(|x| x - margin).collect(),
            self.hi.iter().map(|x| x + margin).collect(),
        )
    }
}

/// Coordinatewise hull of the functionals `u_σ` of the twist.
pub fn vertex_hull(sheaf: &LogSheaf) -> WeightBox {
    let d = sheaf.setup().source_rank();
    let mut lo = vec![Int::zero(); d];
    let mut hi = vec![Int::zero(); d];
    if let Ok(sd) = support_function_from_divisor(sheaf.setup(), sheaf.twist()) {
        for (k, u) in sd.u.iter().enumerate() {
            for i in 0..d {
                let f = u[i].floor().to_integer();
                let c = u[i].ceil().to_integer();
                if k == 0 || f < lo[i] {
                    lo[i] = f;
                }
                if k == 0 || c > hi[i] {
                    hi[i] = c;
                }
            }
        }
    }
    WeightBox::new(lo, hi)
}

#[derive(Clone, Debug)]
pub struct CechResult {
    /// `h^q` summed over the region.
    pub h: Vec<usize>,
    /// Weights with some nonzero `h^q(u)`, in lexicographic order.
    pub per_weight: Vec<(Vec<Int>, Vec<usize>)>,
    pub region: WeightBox,
    /// Whether every boundary weight of the region has vanishing cohomology.
    pub boundary_clean: bool,
    /// Whether `Σ (-1)^q h^q(u) = Σ (-1)^q dim C^q(u)` at every weight.
    pub euler_consistent: bool,
}

impl CechResult {
    pub fn h_at(&self, q: usize) -> usize {
        self.h.get(q).copied().unwrap_or(0)
    }

    /// `h^0, ..., h^dim`; the Cech complex may be longer than the dimension.
    pub fn up_to(&self, dim: usize) -> Vec<usize> {
        (0..=dim).map(|q| self.h_at(q)).collect()
    }
}

/// Cohomology dimensions at weight `u` and the cochain dimensions.
pub fn cech_at_weight(sheaf: &LogSheaf, u: &[Int], order: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let fan = sheaf.setup().fan();
    let k = order.len();
    let amb = sheaf.ambient_dim();
    let charts: Vec<&Vec<usize>> = order.iter().map(|&i| &fan.max_cones()[i]).collect();
    let mut cache: HashMap<Vec<usize>, Subspace> = HashMap::new();
    let mut piece = |common: Vec<usize>| -> Subspace {
        cache.entry(common.clone()).or_insert_with(|| sheaf.local_sections(&common, u)).clone()
    };

    let mut all_common: Vec<usize> = charts.first().map(|c| c.to_vec()).unwrap_or_default();
    for c in &charts[1..] {
        all_common.retain(|r| c.contains(r));
    }
    let top = piece(all_common);
    if top.is_zero() {
        return (vec![0; k], vec![0; k]);
    }
    // Constant coefficient system on the nerve: only h^0 survives.
    let singles: Vec<Subspace> = charts.iter().map(|c| piece(c.to_vec())).collect();
    if singles.iter().all(|s| s.dim() == top.dim()) {
        let mut h = vec![0; k];
        h[0] = top.dim();
        let dims: Vec<usize> = (0..k).map(|q| binomial(k, q + 1) * top.dim()).collect();
        return (h, dims);
    }

    let levels: Vec<Vec<Vec<usize>>> = (1..=k).map(|s| subsets(k, s)).collect();
    let mut bases: Vec<Vec<Vec<Vec<Rat>>>> = Vec::with_capacity(k);
    for level in &levels {
        let mut lb = Vec::with_capacity(level.len());
        for s in level {
            let mut common: Vec<usize> = charts[s[0]].to_vec();
            for &j in &s[1..] {
                common.retain(|r| charts[j].contains(r));
            }
            lb.push(piece(common).basis().to_vec());
        }
        bases.push(lb);
    }
    let dims: Vec<usize> = bases.iter().map(|lb| lb.iter().map(Vec::len).sum()).collect();
    let mut ranks = vec![0usize; k];
    for q in 0..k.saturating_sub(1) {
        let next_index: HashMap<&Vec<usize>, usize> = levels[q + 1].iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut ech = Echelon::new(levels[q + 1].len() * amb);
        for (si, s) in levels[q].iter().enumerate() {
            for x in &bases[q][si] {
                let mut col: Vec<(usize, Rat)> = Vec::new();
                for t in (0..k).filter(|t| !s.contains(t)) {
                    let mut bigger = s.clone();
                    bigger.push(t);
                    bigger.sort_unstable();
                    let pos = bigger.iter().position(|&x| x == t).expect("inserted");
                    let block = next_index[&bigger];
                    let negate = pos % 2 == 1;
                    for (i, val) in x.iter().enumerate() {
                        if !val.is_zero() {
                            col.push((block * amb + i, if negate { -val.clone() } else { val.clone() }));
                        }
                    }
                }
                col.sort_by_key(|e| e.0);
                ech.insert_sparse(col);
            }
        }
        ranks[q] = ech.rank();
    }
    let h: Vec<usize> = (0..k)
        .map(|q| dims[q] - ranks[q] - if q > 0 { ranks[q - 1] } else { 0 })
        .collect();
    (h, dims)
}

fn alternating(v: &[usize]) -> i64 {
    v.iter()
        .enumerate()
        .map(|(q, &x)| if q % 2 == 0 { x as i64 } else { -(x as i64) })
        .sum()
}

/// Cech cohomology summed over a fixed region, with the given chart order.
pub fn cech_in_region(sheaf: &LogSheaf, region: &WeightBox, order: &[usize]) -> CechResult {
    let k = order.len();
    let mut h = vec![0usize; k.max(1)];
    let mut per_weight = Vec::new();
    let mut boundary_clean = true;
    let mut euler_consistent = true;
    for u in region.points() {
        let (hu, dims) = cech_at_weight(sheaf, &u, order);
        if alternating(&hu) != alternating(&dims) {
            euler_consistent = false;
        }
        if hu.iter().any(|&x| x > 0) {
            if region.on_boundary(&u) {
                boundary_clean = false;
            }
            for (acc, x) in h.iter_mut().zip(&hu) {
                *acc += x;
            }
            per_weight.push((u, hu));
        }
    }
    CechResult { h, per_weight, region: region.clone(), boundary_clean, euler_consistent }
}

pub fn default_order(sheaf: &LogSheaf) -> Vec<usize> {
    (0..sheaf.setup().fan().max_cones().len()).collect()
}

/// Cech cohomology over a box grown from the hull of the `u_σ` by `margin`
/// (default `n`), doubling the margin until the boundary is clean.
pub fn cech_cohomology(sheaf: &LogSheaf, margin: Option<usize>) -> Result<CechResult> {
    if !is_proper(sheaf.setup()) {
        return Err(Error::Hypotheses(vec!["the morphism is not proper".into()]));
    }
    let hull = vertex_hull(sheaf);
    let mut m = margin.unwrap_or_else(|| sheaf.n().max(1));
    let order = default_order(sheaf);
    for _ in 0..4 {
        let region = hull.inflate(&Int::from(m));
        let res = cech_in_region(sheaf, &region, &order);
        if res.boundary_clean {
            return Ok(res);
        }
        m *= 2;
    }
    Err(Error::UnstableBox(format!("nonzero cohomology on the boundary with margin {}", m / 2)))
}

/// Result of a degreewise check: pass/fail with witnesses.
#[derive(Clone, Debug, Default)]
pub struct SequenceReport {
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SequenceReport {
    fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }

    fn finish(mut self) -> SequenceReport {
        self.passed = self.failures.is_empty();
        self
    }
}

fn require(conditions: &[(bool, &str)]) -> Result<()> {
    let failed: Vec<String> = conditions.iter().filter(|(ok, _)| !ok).map(|(_, m)| m.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Hypotheses(failed))
    }
}

/// The linear algebra of the residue sequence on one chart at one weight.
///
/// The domain is `Λ^r Q^n ⊗ Λ^{p-r} H_{σ,u}` with basis `e_I ⊗ y_J`;
/// `a` is the wedge map into `Λ^p Q^n` and `b` stacks `Φ_τ` for the
/// qualifying cones `τ ⊂ σ` of `Σ_π(r)`.
#[derive(Clone, Debug)]
pub struct ResidueData {
    pub a: RatMatrix,
    pub b: RatMatrix,
    pub taus: Vec<Vec<usize>>,
    /// `dim Λ^{p-r} H_{σ,u}`; every `τ` block has this target dimension.
    pub target_dim: usize,
    /// Size of each `τ` block of rows of `b`.
    pub block: usize,
    /// `W_{r-1}` at this chart and weight.
    pub lower: Subspace,
    /// `W_r` at this chart and weight.
    pub upper: Subspace,
}

/// `φ_τ(e_I)`: determinant of the pairings of `e_{i_a}` with the rays of `τ`.
pub fn phi(space: &RelativeWeightSpace, tau: &[usize], subset: &[usize]) -> Rat {
    let r = tau.len();
    let rows: Vec<Vec<Rat>> = subset
        .iter()
        .map(|&i| tau.iter().map(|&t| space.ray_coords(t)[i].clone()).collect())
        .collect();
    RatMatrix::from_rows(&rows, r).determinant()
}

pub struct ResidueContext {
    sheaf_r: LogSheaf,
    r: usize,
    sigma_pi_r: Vec<Vec<usize>>,
}

impl ResidueContext {
    pub fn new(setup: &EquivariantSetup, twist: &[Int], p: usize, r: usize) -> Result<ResidueContext> {
        if r > p {
            return Err(invalid(format!("weight {r} exceeds form degree {p}")));
        }
        let sheaf_r = LogSheaf::new(setup, p, LogModel::Weight(r), twist.to_vec())?;
        Ok(ResidueContext { sheaf_r, r, sigma_pi_r: setup.sigma_pi(r) })
    }

    pub fn sheaf(&self) -> &LogSheaf {
        &self.sheaf_r
    }

    pub fn sigma_pi_r(&self) -> &[Vec<usize>] {
        &self.sigma_pi_r
    }

    /// Cones of `Σ_π(r)` inside `sigma` on whose rays the twisted weight vanishes.
    pub fn qualifying(&self, sigma: &[usize], u: &[Int]) -> Vec<Vec<usize>> {
        self.sigma_pi_r
            .iter()
            .filter(|t| t.iter().all(|x| sigma.contains(x)))
            .filter(|t| t.iter().all(|&x| self.sheaf_r.slack(u, x).is_zero()))
            .cloned()
            .collect()
    }

    pub fn data(&self, sigma: &[usize], u: &[Int]) -> ResidueData {
        let sh = &self.sheaf_r;
        let n = sh.n();
        let p = sh.p();
        let r = self.r;
        let amb = binomial(n, p);
        let h = sh.h_space(sigma, u);
        let tail = wedge_power_basis(n, h.basis(), p - r);
        let heads = subsets(n, r);
        let block = binomial(n, p - r);
        let taus = self.qualifying(sigma, u);
        let domain = heads.len() * tail.len();
        let mut a = RatMatrix::zeros(amb, domain);
        let mut b = RatMatrix::zeros(taus.len() * block, domain);
        let head_dim = heads.len();
        for (hi, head) in heads.iter().enumerate() {
            let e = unit(head_dim, hi);
            for (ti, y) in tail.iter().enumerate() {
                let col = hi * tail.len() + ti;
                let w = wedge_product(n, r, &e, p - r, y);
                for (i, x) in w.into_iter().enumerate() {
                    a.set(i, col, x);
                }
                for (k, tau) in taus.iter().enumerate() {
                    let f = phi(&sh.space, tau, head);
                    if f.is_zero() {
                        continue;
                    }
                    for (i, x) in y.iter().enumerate() {
                        b.set(k * block + i, col, &f * x);
                    }
                }
            }
        }
        let lower = if r == 0 {
            Subspace::zero(amb)
        } else {
            sh.local_sections_for(LogModel::Weight(r - 1), sigma, u)
        };
        let upper = sh.local_sections(sigma, u);
        ResidueData { a, b, taus, target_dim: tail.len(), block, lower, upper }
    }

    /// `Res_τ` of a section `omega` of `W_r` at weight `u`, computed on the chart `sigma ⊇ τ`.
    pub fn residue_of(&self, sigma: &[usize], u: &[Int], tau: &[usize], omega: &[Rat]) -> Option<Vec<Rat>> {
        let data = self.data(sigma, u);
        let k = data.taus.iter().position(|t| t == tau)?;
        let x = data.a.solve(omega)?;
        let full = data.b.mul_vec(&x);
        Some(full[k * data.block..(k + 1) * data.block].to_vec())
    }
}

fn columns(m: &RatMatrix, vs: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    vs.iter().map(|v| m.mul_vec(v)).collect()
}

/// The residue map `Φ_τ` on the chart `sigma ⊇ τ` at weight `u` as a matrix
/// from `Λ^r ⊗ Λ^{p-r} H_{σ,u}` to `Λ^{p-r} Q^n`.
pub fn residue_map(sheaf: &LogSheaf, tau: &[usize], sigma: &[usize], u: &[Int]) -> Result<RatMatrix> {
    let LogModel::Weight(r) = sheaf.model() else {
        return Err(invalid("residues are defined on the weight filtration model"));
    };
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    let ctx = ResidueContext::new(sheaf.setup(), sheaf.twist(), sheaf.p(), r)?;
    if !ctx.sigma_pi_r.contains(&tau) {
        return Err(invalid(format!("cone {tau:?} is not a {r}-dimensional cone over the base")));
    }
    if !tau.iter().all(|x| sigma.contains(x)) {
        return Err(invalid(format!("cone {tau:?} is not a face of {sigma:?}")));
    }
    let data = ctx.data(sigma, u);
    let block = data.block;
    let mut out = RatMatrix::zeros(block, data.a.cols());
    if let Some(k) = data.taus.iter().position(|t| *t == tau) {
        for i in 0..block {
            for j in 0..data.a.cols() {
                out.set(i, j, data.b.get(k * block + i, j).clone());
            }
        }
    }
    Ok(out)
}

fn residue_hypotheses(setup: &EquivariantSetup) -> Result<()> {
    let report = fan_validate(setup.fan());
    require(&[(report.simplicial, "the fan is not simplicial"), (is_log_smooth(setup), "the morphism is not log smooth")])
}

/// Exactness of `0 -> W_{r-1} -> W_r -> ⊕ ω̃^{p-r}_{P_τ} -> 0` at every
/// maximal chart and weight of the region (twisted by `twist`).
pub fn verify_residue_sequence(
    setup: &EquivariantSetup,
    twist: &[Int],
    p: usize,
    r: usize,
    region: &WeightBox,
) -> Result<SequenceReport> {
    residue_hypotheses(setup)?;
    let ctx = ResidueContext::new(setup, twist, p, r)?;
    let mut report = SequenceReport::default();
    for u in region.points() {
        for (ci, sigma) in setup.fan().max_cones().iter().enumerate() {
            if !ctx.sheaf_r.admissible(sigma, &u) {
                continue;
            }
            report.checked += 1;
            let data = ctx.data(sigma, &u);
            let (_, ker_a) = data.a.rank_and_kernel();
            if columns(&data.b, &ker_a).iter().any(|c| c.iter().any(|x| !x.is_zero())) {
                report.fail(format!("cone {ci}, weight {u:?}: wedge kernel not killed by the residue"));
            }
            let (_, ker_b) = data.b.rank_and_kernel();
            let image = Subspace::span(data.a.rows(), columns(&data.a, &ker_b));
            if image != data.lower {
                report.fail(format!(
                    "cone {ci}, weight {u:?}: kernel of the residue has dimension {} but the lower weight piece has {}",
                    image.dim(),
                    data.lower.dim()
                ));
            }
            let expected = data.taus.len() * data.target_dim;
            let rank = data.b.rank();
            if rank != expected {
                report.fail(format!("cone {ci}, weight {u:?}: residue rank {rank}, expected {expected}"));
            }
            let a_image = Subspace::span(data.a.rows(), (0..data.a.cols()).map(|j| (0..data.a.rows()).map(|i| data.a.get(i, j).clone()).collect()));
            if a_image != data.upper || !data.upper.contains_subspace(&data.lower) {
                report.fail(format!("cone {ci}, weight {u:?}: weight filtration pieces are inconsistent"));
            }
        }
    }
    Ok(report.finish())
}

/// Exactness of `0 -> ω̃^1 -> ⊕_{ρ ∈ Σ_π(1)} O(-P_ρ) -> O ⊗ Cl(P∖E) -> 0`
/// on every maximal chart and, for global sections, left exactness.
pub fn verify_euler_sequence(setup: &EquivariantSetup, region: &WeightBox) -> Result<SequenceReport> {
    let report = fan_validate(setup.fan());
    require(&[
        (report.simplicial, "the fan is not simplicial"),
        (is_proper(setup), "the morphism is not proper"),
        (is_log_smooth(setup), "the morphism is not log smooth"),
    ])?;
    let fan = setup.fan();
    let zero = vec![Int::zero(); fan.num_rays()];
    let sheaf = LogSheaf::new(setup, 1, LogModel::Tilde, zero)?;
    let space = sheaf.space();
    let hor = setup.horizontal_rays().to_vec();
    let groups = class_groups(setup);
    let cl_rank = groups.cl_open.free_rank;
    // γ: unit vector of ρ ↦ free part of [P_ρ] in Cl(P∖E).
    let gamma: Vec<Vec<Rat>> = hor
        .iter()
        .map(|&r| {
            let mut e = vec![Int::zero(); fan.num_rays()];
            e[r] = Int::one();
            groups.open_free_part(&e).iter().map(rat_of).collect()
        })
        .collect();
    let psi = |w: &[Rat]| -> Vec<Rat> { hor.iter().map(|&r| space.pairing(w, r)).collect() };
    let mut out = SequenceReport::default();

    let check = |allowed: &[bool], h: &Subspace, target_full: bool, label: String, out: &mut SequenceReport| {
        let m = allowed.iter().filter(|&&a| a).count();
        // Ψ* lands in the allowed coordinates and is injective.
        let images: Vec<Vec<Rat>> = h.basis().iter().map(|w| psi(w)).collect();
        for img in &images {
            if img.iter().zip(allowed).any(|(x, &a)| !a && !x.is_zero()) {
                out.fail(format!("{label}: image of a form leaves the allowed summands"));
            }
            let g = compose_gamma(&gamma, img, cl_rank);
            if g.iter().any(|x| !x.is_zero()) {
                out.fail(format!("{label}: composite of the two maps is nonzero"));
            }
        }
        let img_rank = if images.is_empty() { 0 } else { RatMatrix::from_rows(&images, hor.len()).rank() };
        if img_rank != h.dim() {
            out.fail(format!("{label}: the first map is not injective"));
        }
        let gamma_rows: Vec<Vec<Rat>> = (0..hor.len()).filter(|&i| allowed[i]).map(|i| gamma[i].clone()).collect();
        let gamma_rank = if gamma_rows.is_empty() || cl_rank == 0 {
            0
        } else {
            RatMatrix::from_rows(&gamma_rows, cl_rank).rank()
        };
        if img_rank + gamma_rank != m {
            out.fail(format!("{label}: not exact in the middle ({img_rank} + {gamma_rank} != {m})"));
        }
        if target_full && gamma_rank != cl_rank {
            out.fail(format!("{label}: class map is not surjective"));
        }
    };

    for u in region.points() {
        for (ci, sigma) in fan.max_cones().iter().enumerate() {
            let in_dual = sigma.iter().all(|&r| dot(&u, fan.ray(r)) >= Int::zero());
            if !in_dual {
                continue;
            }
            out.checked += 1;
            let h = sheaf.local_sections(sigma, &u);
            let allowed: Vec<bool> = hor
                .iter()
                .map(|&r| !sigma.contains(&r) || dot(&u, fan.ray(r)) >= Int::one())
                .collect();
            check(&allowed, &h, true, format!("cone {ci}, weight {u:?}"), &mut out);
        }
        // Global sections: left exactness.
        let global_ok = (0..fan.num_rays()).all(|r| dot(&u, fan.ray(r)) >= Int::zero());
        if !global_ok {
            continue;
        }
        out.checked += 1;
        let h = sheaf.global_sections(&u);
        let allowed: Vec<bool> = hor.iter().map(|&r| dot(&u, fan.ray(r)) >= Int::one()).collect();
        let kernel_dim = {
            let rows: Vec<Vec<Rat>> = (0..hor.len()).filter(|&i| allowed[i]).map(|i| gamma[i].clone()).collect();
            let m = rows.len();
            let rank = if rows.is_empty() || cl_rank == 0 { 0 } else { RatMatrix::from_rows(&rows, cl_rank).rank() };
            m - rank
        };
        if kernel_dim != h.dim() {
            out.fail(format!(
                "global sections at weight {u:?}: kernel of the class map has dimension {kernel_dim}, forms have {}",
                h.dim()
            ));
        }
    }
    Ok(out.finish())
}

fn compose_gamma(gamma: &[Vec<Rat>], coords: &[Rat], cl_rank: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); cl_rank];
    for (g, c) in gamma.iter().zip(coords) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(g) {
            *o += c * x;
        }
    }
    out
}

/// Surjectivity of the global residue map for an ample twist: the images of
/// `H^0(W_r ω^p(log D) ⊗ L)` span all `H^0(P_τ, ω̃^{p-r} ⊗ L)`.
///
/// Weights are the lattice points of the section polyhedron, intersected
/// with `region` when that polyhedron is unbounded.
pub fn verify_global_residue_surjectivity(
    setup: &EquivariantSetup,
    twist: &[Int],
    p: usize,
    r: usize,
    region: Option<&WeightBox>,
) -> Result<SequenceReport> {
    let proper = is_proper(setup);
    let report = fan_validate(setup.fan());
    let sd = support_function_from_divisor(setup, twist)?;
    let ample = proper && sd.cartier && is_ample(setup, &sd)?;
    require(&[
        (proper, "the morphism is not proper"),
        (report.simplicial, "the fan is not simplicial"),
        (is_log_smooth(setup), "the morphism is not log smooth"),
        (ample, "the twisting divisor is not ample"),
    ])?;
    let ctx = ResidueContext::new(setup, twist, p, r)?;
    let poly = crate::positivity::section_polyhedron(setup, twist);
    let weights: Vec<Vec<Int>> = if poly.is_bounded() {
        poly.lattice_points_bounded()?
    } else {
        let Some(b) = region else {
            return Err(invalid("the section polyhedron is unbounded; a weight region is required"));
        };
        b.points().into_iter().filter(|u| poly.contains(u)).collect()
    };
    let fan = setup.fan();
    let n = ctx.sheaf_r.n();
    let block = binomial(n, p - r);
    let mut out = SequenceReport::default();
    for u in weights {
        let taus: Vec<Vec<usize>> = ctx
            .sigma_pi_r
            .iter()
            .filter(|t| t.iter().all(|&x| ctx.sheaf_r.slack(&u, x).is_zero()))
            .cloned()
            .collect();
        if taus.is_empty() {
            continue;
        }
        out.checked += 1;
        let global = ctx.sheaf_r.global_sections(&u);
        let mut target_total = 0usize;
        let mut targets = Vec::new();
        for tau in &taus {
            let mut t = Subspace::full(block);
            for c in fan.max_cones().iter().filter(|c| tau.iter().all(|x| c.contains(x))) {
                let h = ctx.sheaf_r.h_space(c, &u);
                t = t.intersect(&Subspace::span(block, wedge_power_basis(n, h.basis(), p - r)));
            }
            target_total += t.dim();
            targets.push(t);
        }
        let mut images: Vec<SparseVec> = Vec::new();
        for omega in global.basis() {
            let mut full = Vec::with_capacity(taus.len() * block);
            for (k, tau) in taus.iter().enumerate() {
                let charts: Vec<&Vec<usize>> =
                    fan.max_cones().iter().filter(|c| tau.iter().all(|x| c.contains(x))).collect();
                let res = ctx.residue_of(charts[0], &u, tau, omega);
                let Some(res) = res else {
                    out.fail(format!("weight {u:?}: a global section is not in the chart model"));
                    continue;
                };
                for c in &charts[1..] {
                    if ctx.residue_of(c, &u, tau, omega).as_ref() != Some(&res) {
                        out.fail(format!("weight {u:?}: residue along {tau:?} depends on the chart"));
                    }
                }
                if !targets[k].contains(&res) {
                    out.fail(format!("weight {u:?}: residue along {tau:?} is not a global section"));
                }
                full.extend(res);
            }
            images.push(sparse_from_dense(&full));
        }
        let mut ech = Echelon::new(taus.len() * block);
        for v in images {
            ech.insert_sparse(v);
        }
        if ech.rank() != target_total {
            out.fail(format!("weight {u:?}: residue image has rank {} of {target_total}", ech.rank()));
        }
    }
    Ok(out.finish())
}
