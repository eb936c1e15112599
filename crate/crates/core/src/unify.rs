//! Projective unifiers, projective approximations, unifier bases and
//! admissibility of rules.
//!
//! A formula is projective exactly when its class of models has the extension
//! property: every model whose non-root worlds all satisfy it can be repaired
//! by changing the root valuation alone. The extension property is checked
//! exactly by profile saturation; when it holds, a unifier is assembled from
//! one sheet-repairing factor per achievable `[0]`-environment and iterated
//! until it verifiably unifies.

use fixedbitset::FixedBitSet;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::bisim::{realize_types, valuation_formula, world_types, CharFormulas};
use crate::decide::{consequence_formula, is_theorem, is_valid, minimize};
use crate::error::{Error, Result};
use crate::formula::{Formula, Kind, Modality, Substitution, VarContext};
use crate::gl::{eliminate_box0, valuation_step, gl_projective_unifier_report, maximal_box0, replace_box0, GlUnifier};
use crate::model::{generated_submodel, one_sum, ModelBuilder, StratifiedModel};
use crate::saturation::{saturate_formulas, FormulaProfiler, Saturation, SaturationBounds, Stop, TypeId, TypeProfiler, TypeSpace};

/// Limits shared by the unification procedures.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UnifyBounds {
    pub saturation: SaturationBounds,
    /// Iterations of the repair substitution.
    pub max_rounds: usize,
    /// Candidate type-sets examined by the approximation search.
    pub max_candidates: usize,
    /// Types kept when enumerating a universe.
    pub max_types: usize,
}

impl Default for UnifyBounds {
    fn default() -> Self {
        UnifyBounds {
            saturation: SaturationBounds::default(),
            max_rounds: 64,
            max_candidates: 10_000,
            max_types: 100_000,
        }
    }
}

impl UnifyBounds {
    pub fn from_env() -> Self {
        UnifyBounds { saturation: SaturationBounds::from_env(), ..UnifyBounds::default() }
    }
}

/// A model whose non-root worlds all satisfy the formula while no root
/// valuation does, presented as a 1-sum of models of the formula when the
/// root has R1-successors.
#[derive(Clone, Debug)]
pub struct Witness {
    pub model: StratifiedModel,
    /// Pairwise 1-congruent models of the formula whose 1-sum is `model`; empty
    /// when the root has no R1-successors.
    pub summands: Vec<StratifiedModel>,
}

/// The two iterations run side by side by [`projective_unifier`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnifierMethod {
    /// Powers of the product of sheet-repairing factors.
    ThetaBar,
    /// θ̄ interleaved with `p ↦ (G ∧ p) ∨ (¬G ∧ c)`, where `G = φ ∧ [0]φ ∧ [1]φ` and `c` is a constant valuation.
    Interleaved,
    /// The formula is variable-free or already fixes itself.
    Identity,
}

#[derive(Clone, Debug)]
pub struct ProjectivityReport {
    pub projective: bool,
    /// Verified: unifies the formula and fixes every variable modulo the formula.
    pub unifier: Option<Substitution>,
    pub rounds_used: usize,
    /// Which iteration produced the unifier.
    pub method: Option<UnifierMethod>,
    /// Number of sheet-repairing factors composed per round.
    pub factors: usize,
    pub witness: Option<Witness>,
}

/// `p ↦ (φ ∧ p) ∨ (¬φ ∧ σ(p))`.
pub fn guarded(phi: &Formula, sigma: &Substitution) -> Substitution {
    guarded_by(phi, sigma)
}

/// `p ↦ (g ∧ p) ∨ (¬g ∧ σ(p))`.
pub fn guarded_by(guard: &Formula, sigma: &Substitution) -> Substitution {
    let ctx = sigma.ctx();
    let images = (0..ctx.len())
        .map(|i| {
            Formula::or(
                Formula::and(guard.clone(), Formula::var(i)),
                Formula::and(Formula::not(guard.clone()), sigma.image(i).clone()),
            )
        })
        .collect();
    Substitution::new(ctx, images).expect("images stay in context")
}

/// `φ ∧ [1]φ`: a sheet world passes only if its whole R1-cone satisfies `φ`.
pub fn sheet_guard(phi: &Formula) -> Formula {
    Formula::and(phi.clone(), Formula::boxed(Modality::One, phi.clone()))
}

/// The repair substitution for a model whose R0-successors of the root all satisfy `phi`.
pub fn theta_w(phi: &Formula, w: &StratifiedModel, ctx: &VarContext, bounds: &UnifyBounds) -> Result<Substitution> {
    let truth = w.truth_set(phi);
    if let Some(x) = w.successors(Modality::Zero, w.root()).ones().find(|&x| !truth.contains(x)) {
        return Err(Error::HypothesisViolated(format!("world {} above the root sheet refutes the formula", w.id(x))));
    }
    let sheet = w.sheet(w.root_sheet());
    let sf = eliminate_box0(phi, w, &sheet)?;
    match gl_projective_unifier_report(&sf, ctx, &bounds.saturation, None)? {
        GlUnifier::Found { sigma, .. } => Ok(guarded_by(&sheet_guard(phi), &sigma)),
        GlUnifier::NotProjective => Err(Error::GlNotProjective(sf.body.to_string())),
        GlUnifier::Inconclusive => Err(Error::BoundExhausted(format!(
            "no GL unifier found for {} within the round limit",
            sf.body
        ))),
    }
}

/// One factor of the repair substitution.
#[derive(Clone, Debug)]
pub struct Factor {
    /// Truth values of the maximal `[0]`-subformulas on the sheet being repaired.
    pub assignment: Vec<(Formula, bool)>,
    pub theta: Substitution,
}

/// Product of the sheet-repairing factors, one per achievable `[0]`-environment.
#[derive(Clone, Debug)]
pub struct ThetaBar {
    pub subst: Substitution,
    pub factors: Vec<Factor>,
    /// Environments whose sheet formula had no unifier within the limits.
    pub skipped: usize,
}

/// Saturation of the models of `phi`, stopping at the first extension-property violation.
fn phi_saturation(phi: &Formula, bounds: &UnifyBounds) -> Result<(FormulaProfiler, Saturation<FixedBitSet>)> {
    let mut p = FormulaProfiler::new(&[phi], None, Some(0)).halting_on_dead_end();
    let sat = saturate_formulas(&mut p, &bounds.saturation)?;
    Ok((p, sat))
}

/// The `[0]`-environments that occur on root sheets of models whose worlds
/// above the root sheet satisfy `phi`, in canonical order.
fn environments(phi: &Formula, p: &FormulaProfiler, sat: &Saturation<FixedBitSet>) -> Vec<Vec<bool>> {
    let maximal = maximal_box0(phi);
    let bits: Vec<usize> = maximal
        .iter()
        .map(|g| match g.kind() {
            Kind::Box(Modality::Zero, body) => p.prog.body_bit_of(body).expect("compiled body"),
            _ => unreachable!("maximal_box0 returns [0]-boxes"),
        })
        .collect();
    let mut envs: Vec<Vec<bool>> = (0..sat.explored_uppers())
        .map(|u| bits.iter().map(|&b| sat.upper(u).contains(b)).collect())
        .collect();
    envs.sort();
    envs.dedup();
    envs
}

/// Builds the repair substitution. Requires the extension property; errors with the witness otherwise.
pub fn theta_bar(phi: &Formula, ctx: &VarContext, bounds: &UnifyBounds) -> Result<ThetaBar> {
    let (p, sat) = phi_saturation(phi, bounds)?;
    if sat.stop.is_some() {
        return Err(Error::HypothesisViolated("the formula lacks the extension property".into()));
    }
    theta_bar_from(phi, ctx, &p, &sat, bounds)
}

fn theta_bar_from(
    phi: &Formula,
    ctx: &VarContext,
    p: &FormulaProfiler,
    sat: &Saturation<FixedBitSet>,
    bounds: &UnifyBounds,
) -> Result<ThetaBar> {
    let maximal = maximal_box0(phi);
    let mut subst = Substitution::identity(ctx);
    let mut factors = Vec::new();
    let mut skipped = 0;
    let guard = sheet_guard(phi);
    for env in environments(phi, p, sat) {
        let sf = replace_box0(phi, |g| env[maximal.iter().position(|h| h == g).expect("maximal")]);
        match gl_projective_unifier_report(&sf, ctx, &bounds.saturation, None)? {
            GlUnifier::Found { sigma, .. } => {
                let theta = guarded_by(&guard, &sigma);
                subst = theta.compose(&subst);
                factors.push(Factor { assignment: sf.origin.expect("origin").1, theta });
            }
            _ => skipped += 1,
        }
    }
    Ok(ThetaBar { subst, factors, skipped })
}

/// A concrete extension-property violation for `phi`, if there is one.
pub fn extension_violation(phi: &Formula, bounds: &UnifyBounds) -> Result<Option<Witness>> {
    let (_, sat) = phi_saturation(phi, bounds)?;
    violation_from(&sat)
}

fn violation_from(sat: &Saturation<FixedBitSet>) -> Result<Option<Witness>> {
    let Some(Stop::DeadEnd { upper, sheet }) = sat.stop else {
        return Ok(None);
    };
    let model = sat.model_at(0, upper, sheet)?;
    let root = model.root();
    let summands: Vec<StratifiedModel> = model
        .successors(Modality::One, root)
        .ones()
        .filter(|&y| {
            // only R1-maximal-from-root worlds; deeper ones are inside these
            !model.successors(Modality::One, root).ones().any(|z| model.related(Modality::One, z, y))
        })
        .map(|y| generated_submodel(&model, model.id(y)).map(|pm| pm.model))
        .collect::<Result<_>>()?;
    let model = if summands.is_empty() { model } else { one_sum(&summands)? };
    Ok(Some(Witness { model, summands }))
}

/// Decides projectivity; on success the unifier is verified, on failure a witness is given.
pub fn projective_unifier(phi: &Formula, ctx: &VarContext, bounds: &UnifyBounds) -> Result<ProjectivityReport> {
    if phi.is_variable_free() {
        let v = is_theorem(phi, &bounds.saturation)?;
        return Ok(ProjectivityReport {
            projective: v.theorem,
            unifier: v.theorem.then(|| Substitution::identity(ctx)),
            rounds_used: 0,
            method: v.theorem.then_some(UnifierMethod::Identity),
            factors: 0,
            witness: v.countermodel.map(|cm| Witness { model: cm.model, summands: Vec::new() }),
        });
    }
    let (p, sat) = phi_saturation(phi, bounds)?;
    if let Some(w) = violation_from(&sat)? {
        return Ok(ProjectivityReport {
            projective: false,
            unifier: None,
            rounds_used: 0,
            method: None,
            factors: 0,
            witness: Some(w),
        });
    }
    let identity = Substitution::identity(ctx);
    if verify_unifier(phi, &identity, bounds)? {
        return Ok(ProjectivityReport {
            projective: true,
            unifier: Some(identity),
            rounds_used: 0,
            method: Some(UnifierMethod::Identity),
            factors: 0,
            witness: None,
        });
    }
    let tb = theta_bar_from(phi, ctx, &p, &sat, bounds)?;
    // Repairing a sheet can change the [0]-environment of the sheets below it,
    // so powers of θ̄ may never settle; a second sequence interleaves θ̄ with
    // valuation resets guarded by φ ∧ [0]φ ∧ [1]φ.
    let guard = Formula::conj([
        phi.clone(),
        Formula::boxed(Modality::Zero, phi.clone()),
        Formula::boxed(Modality::One, phi.clone()),
    ]);
    let steps: Vec<Substitution> = (0..ctx.valuation_count()).map(|v| valuation_step(&guard, ctx, v)).collect();
    let mut theta = identity.clone();
    let mut stepped = identity;
    for round in 1..=bounds.max_rounds {
        theta = tb.subst.compose(&theta);
        let mut found = is_valid(&theta.apply(phi), &bounds.saturation)?.then(|| (theta.clone(), UnifierMethod::ThetaBar));
        if found.is_none() {
            for step in &steps {
                stepped = step.compose(&tb.subst.compose(&stepped));
                if is_valid(&stepped.apply(phi), &bounds.saturation)? {
                    found = Some((stepped.clone(), UnifierMethod::Interleaved));
                    break;
                }
            }
        }
        if let Some((sigma, method)) = found {
            if verify_unifier(phi, &sigma, bounds)? {
                return Ok(ProjectivityReport {
                    projective: true,
                    unifier: Some(sigma),
                    rounds_used: round,
                    method: Some(method),
                    factors: tb.factors.len(),
                    witness: None,
                });
            }
            return Err(Error::BoundExhausted("unifier candidate failed verification".into()));
        }
    }
    Err(Error::BoundExhausted(format!(
        "extension property holds but {} rounds did not produce a unifier",
        bounds.max_rounds
    )))
}

/// `⊢ σ(φ)` and `φ ⊢ σ(p) ↔ p` for every variable.
pub fn verify_unifier(phi: &Formula, sigma: &Substitution, bounds: &UnifyBounds) -> Result<bool> {
    if !is_valid(&sigma.apply(phi), &bounds.saturation)? {
        return Ok(false);
    }
    for (i, img) in sigma.images().iter().enumerate() {
        let fixed = Formula::iff(img.clone(), Formula::var(i));
        if !is_valid(&consequence_formula(phi, &fixed), &bounds.saturation)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Per-world rank: distinct `(d+1)`-types among R0-successors whose generated
/// submodels satisfy `phi`.
#[derive(Clone, Debug, Serialize)]
pub struct RankInfo {
    pub per_world: Vec<(i64, usize)>,
    /// Least rank of a world whose generated submodel refutes `phi`.
    pub mu: Option<usize>,
    pub n: usize,
}

pub fn rank_info(phi: &Formula, m: &StratifiedModel) -> RankInfo {
    let n = phi.depth() as usize + 1;
    let mut space = TypeSpace::new();
    let types = world_types(&mut space, m, n);
    let truth = m.truth_set(phi);
    let good: Vec<bool> = (0..m.len()).map(|y| m.generated_worlds(y).is_subset(&truth)).collect();
    let mut per_world = Vec::with_capacity(m.len());
    let mut mu: Option<usize> = None;
    for x in 0..m.len() {
        let distinct: FxHashSet<TypeId> =
            m.successors(Modality::Zero, x).ones().filter(|&y| good[y]).map(|y| types[y]).collect();
        let rk = distinct.len();
        per_world.push((m.id(x), rk));
        if !good[x] {
            mu = Some(mu.map_or(rk, |v| v.min(rk)));
        }
    }
    RankInfo { per_world, mu, n }
}

/// Codes of all worlds of each type's representative, at level `n`.
fn point_codes(space: &mut TypeSpace, m: &StratifiedModel, n: usize) -> Vec<Vec<u8>> {
    let ids = world_types(space, m, n);
    ids.into_iter().map(|t| space.code(n, t)).collect()
}

/// The least class of the form "all worlds satisfy some depth-`n` formula"
/// containing the models of `ts`, as a subset of `universe`.
pub fn kn_closure(
    ts: &[crate::bisim::NType],
    n: usize,
    universe: &crate::bisim::TypeUniverse,
) -> Vec<crate::bisim::NType> {
    let mut space = TypeSpace::new();
    let mut allowed: FxHashSet<Vec<u8>> = FxHashSet::default();
    for t in ts {
        allowed.extend(point_codes(&mut space, &t.rep.model, n));
    }
    universe
        .types
        .iter()
        .filter(|t| point_codes(&mut space, &t.rep.model, n).iter().all(|c| allowed.contains(c)))
        .cloned()
        .collect()
}

#[derive(Clone, Debug)]
pub struct ApproxResult {
    /// Projective formulas entailing the input, pairwise non-entailing, with their unifiers.
    pub pi: Vec<Formula>,
    pub unifiers: Vec<Substitution>,
    /// Candidate type-sets examined.
    pub s_size: usize,
    pub bounds: UnifyBounds,
    pub exhaustive: bool,
}

struct TypeClasses<'a> {
    space: TypeSpace,
    n: usize,
    nvars: usize,
    bounds: &'a UnifyBounds,
}

impl TypeClasses<'_> {
    /// Types of `t` realizable using only types of `t`, and an extension-property violation if any.
    fn close(&mut self, t: &[TypeId]) -> (Vec<TypeId>, Option<StratifiedModel>, Option<String>) {
        let allowed: FxHashMap<TypeId, ()> = t.iter().map(|&x| (x, ())).collect();
        let sat = {
            let mut p = TypeProfiler::new(&mut self.space, self.n, self.nvars).restricted(&allowed);
            Saturation::run(&mut p, &self.bounds.saturation)
        };
        let mut closed: FxHashSet<TypeId> = FxHashSet::default();
        for (u, h) in sat.pairs().collect::<Vec<_>>() {
            for &v in sat.admitted(u, h) {
                closed.insert(self.space.intern(self.n, v, sat.upper(u), sat.sheet(u, h)));
            }
        }
        let mut closed: Vec<TypeId> = closed.into_iter().collect();
        closed.sort_unstable();
        let violation = sat.first_dead_end.and_then(|(u, h)| sat.model_at(0, u, h).ok());
        (closed, violation, sat.exhausted.clone())
    }

    /// Types of the non-root worlds of a shrunk violation.
    fn blame(&mut self, t: &[TypeId], m: &StratifiedModel) -> Vec<TypeId> {
        let allowed: FxHashSet<TypeId> = t.iter().copied().collect();
        let vals = 1u64 << self.nvars;
        let n = self.n;
        let space = std::cell::RefCell::new(&mut self.space);
        let is_violation = |m: &StratifiedModel| {
            let mut sp = space.borrow_mut();
            let ids = world_types(&mut sp, m, n);
            let rest_ok = (0..m.len()).filter(|&x| x != m.root()).all(|x| allowed.contains(&ids[x]));
            rest_ok
                && (0..vals).all(|v| {
                    let ids = world_types(&mut sp, &m.variant(v), n);
                    !allowed.contains(&ids[m.root()])
                })
        };
        let small = minimize(m, is_violation);
        let mut sp = space.borrow_mut();
        let ids = world_types(&mut sp, &small, n);
        let mut out: Vec<TypeId> = (0..small.len()).filter(|&x| x != small.root()).map(|x| ids[x]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Maximal projective formulas of depth at most `d(phi)` entailing `phi`.
pub fn projective_approximation(phi: &Formula, ctx: &VarContext, bounds: &UnifyBounds) -> Result<ApproxResult> {
    if phi.is_variable_free() {
        let thm = is_theorem(phi, &bounds.saturation)?.theorem;
        return Ok(ApproxResult {
            pi: if thm { vec![phi.clone()] } else { vec![] },
            unifiers: if thm { vec![Substitution::identity(ctx)] } else { vec![] },
            s_size: 1,
            bounds: *bounds,
            exhaustive: true,
        });
    }
    let n = phi.depth() as usize;
    let nvars = ctx.len();
    let mut exhaustive = true;
    let candidates: Vec<Formula>;
    let mut s_size = 0;
    if n == 0 {
        // depth-0 classes are sets of valuations; the largest one is the only maximal candidate
        let vals: Vec<u64> = (0..ctx.valuation_count())
            .filter(|&v| single_world(v).forces(0, phi))
            .collect();
        s_size = 1;
        candidates = if vals.is_empty() {
            vec![]
        } else {
            vec![Formula::disj(vals.iter().map(|&v| valuation_formula(v, nvars)))]
        };
    } else {
        let mut tc = TypeClasses { space: TypeSpace::new(), n, nvars, bounds };
        let (universe, truncated) =
            realize_types(&mut tc.space, n, nvars, &bounds.saturation, bounds.max_types);
        if truncated.is_some() {
            exhaustive = false;
        }
        let t_phi: Vec<TypeId> = {
            let mut v: Vec<TypeId> =
                universe.iter().map(|(t, _)| *t).filter(|&t| tc.space.eval(n, t, phi)).collect();
            v.sort_unstable();
            v
        };
        let mut leaves: Vec<Vec<TypeId>> = Vec::new();
        let mut seen: FxHashSet<Vec<TypeId>> = FxHashSet::default();
        let mut stack: Vec<Vec<TypeId>> = Vec::new();
        let (start, _, _) = tc.close(&t_phi);
        seen.insert(start.clone());
        stack.push(start);
        while let Some(t) = stack.pop() {
            if s_size >= bounds.max_candidates {
                exhaustive = false;
                break;
            }
            s_size += 1;
            let (closed, violation, cut) = tc.close(&t);
            if cut.is_some() {
                exhaustive = false;
                continue;
            }
            debug_assert_eq!(closed, t);
            match violation {
                None => {
                    if !closed.is_empty() {
                        leaves.push(closed);
                    }
                }
                Some(m) => {
                    for bad in tc.blame(&closed, &m) {
                        let rest: Vec<TypeId> = closed.iter().copied().filter(|&x| x != bad).collect();
                        let (child, _, _) = tc.close(&rest);
                        if seen.insert(child.clone()) {
                            stack.push(child);
                        }
                    }
                }
            }
        }
        let maximal: Vec<&Vec<TypeId>> = leaves
            .iter()
            .filter(|a| !leaves.iter().any(|b| b.len() > a.len() && a.iter().all(|x| b.binary_search(x).is_ok())))
            .collect();
        let mut cf = CharFormulas::new(&mut tc.space, nvars);
        let mut forms: Vec<(Vec<Vec<u8>>, Formula)> = maximal
            .iter()
            .map(|t| {
                let mut coded: Vec<(Vec<u8>, TypeId)> = t.iter().map(|&x| (cf.code(n, x), x)).collect();
                coded.sort();
                let f = Formula::disj(coded.iter().map(|&(_, x)| cf.get(n, x)));
                (coded.into_iter().map(|(c, _)| c).collect(), f)
            })
            .collect();
        forms.sort_by(|a, b| a.0.cmp(&b.0));
        candidates = forms.into_iter().map(|(_, f)| f).collect();
    }
    let mut pi = Vec::new();
    let mut unifiers = Vec::new();
    for psi in candidates {
        let report = projective_unifier(&psi, ctx, bounds)?;
        let entails = is_valid(&consequence_formula(&psi, phi), &bounds.saturation)?;
        match (report.unifier, entails) {
            (Some(u), true) => {
                pi.push(psi);
                unifiers.push(u);
            }
            _ => return Err(Error::BoundExhausted("candidate failed verification".into())),
        }
    }
    Ok(ApproxResult { pi, unifiers, s_size, bounds: *bounds, exhaustive })
}

fn single_world(v: u64) -> StratifiedModel {
    let mut b = ModelBuilder::new();
    let s = b.add_sheet();
    let r = b.add_world(s, v);
    b.build(r).expect("single world")
}

/// Unifiable iff the approximation is nonempty.
pub fn is_unifiable(phi: &Formula, ctx: &VarContext, bounds: &UnifyBounds) -> Result<bool> {
    if phi.is_variable_free() {
        return Ok(is_theorem(phi, &bounds.saturation)?.theorem);
    }
    let a = projective_approximation(phi, ctx, bounds)?;
    if !a.pi.is_empty() {
        return Ok(true);
    }
    if !a.exhaustive {
        return Err(Error::BoundExhausted("approximation search was cut short".into()));
    }
    Ok(false)
}

/// The unifiers of the approximation members.
pub fn basis_of_unifiers(phi: &Formula, ctx: &VarContext, bounds: &UnifyBounds) -> Result<(ApproxResult, Vec<Substitution>)> {
    let a = projective_approximation(phi, ctx, bounds)?;
    let basis = a.unifiers.clone();
    Ok((a, basis))
}

#[derive(Clone, Debug)]
pub struct RuleVerdict {
    pub admissible: bool,
    /// `premise → conclusion` is a theorem.
    pub derivable: bool,
    pub failing_psi: Option<Formula>,
    pub exhaustive: bool,
}

/// A rule `premise / conclusion` is admissible iff every member of the
/// premise's approximation entails the conclusion.
pub fn is_admissible(premise: &Formula, conclusion: &Formula, ctx: &VarContext, bounds: &UnifyBounds) -> Result<RuleVerdict> {
    let derivable = is_valid(&Formula::implies(premise.clone(), conclusion.clone()), &bounds.saturation)?;
    let a = projective_approximation(premise, ctx, bounds)?;
    let mut failing_psi = None;
    for psi in &a.pi {
        if !is_valid(&consequence_formula(psi, conclusion), &bounds.saturation)? {
            failing_psi = Some(psi.clone());
            break;
        }
    }
    if failing_psi.is_none() && !a.exhaustive {
        return Err(Error::BoundExhausted("approximation search was cut short".into()));
    }
    Ok(RuleVerdict { admissible: failing_psi.is_none(), derivable, failing_psi, exhaustive: a.exhaustive })
}
