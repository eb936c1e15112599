//! The single-sheet fragment: formulas over `[1]` only, decided over GL models
//! (finite irreflexive transitive trees), plus the projective unifiers used to
//! repair one sheet at a time.

use fixedbitset::FixedBitSet;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::decide::{minimize, SearchBound, Verdict};
use crate::error::{Error, Result};
use crate::formula::{Formula, Kind, Modality, Substitution, VarContext};
use crate::model::{canonical_relabel, PointedModel, Sheet, StratifiedModel};
use crate::saturation::{saturate_formulas, FormulaProfiler, SaturationBounds, Stop};

/// A formula without `[0]`, optionally remembering where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheetFormula {
    pub body: Formula,
    /// Source formula and the truth value chosen for each of its maximal `[0]`-subformulas.
    pub origin: Option<(Formula, Vec<(Formula, bool)>)>,
}

impl SheetFormula {
    pub fn new(body: Formula) -> Result<Self> {
        if !body.free_of(Modality::Zero) {
            return Err(Error::NotSheetFormula(body.to_string()));
        }
        Ok(SheetFormula { body, origin: None })
    }
}

/// The `[0]`-subformulas of `f` not nested inside another `[0]`, in first-occurrence order.
pub fn maximal_box0(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    let mut seen: FxHashSet<usize> = FxHashSet::default();
    let mut stack = vec![f.clone()];
    while let Some(g) = stack.pop() {
        if !seen.insert(g.ptr_id()) {
            continue;
        }
        if let Kind::Box(Modality::Zero, _) = g.kind() {
            if !out.contains(&g) {
                out.push(g);
            }
            continue;
        }
        stack.extend(g.children().into_iter().rev().cloned());
    }
    out
}

/// Replaces every maximal `[0]`-subformula by the constant `truth` assigns to it.
pub fn replace_box0(f: &Formula, truth: impl Fn(&Formula) -> bool) -> SheetFormula {
    let maximal = maximal_box0(f);
    let assignment: Vec<(Formula, bool)> = maximal.iter().map(|g| (g.clone(), truth(g))).collect();
    let mut memo: FxHashMap<usize, Formula> = FxHashMap::default();
    for node in f.dag_nodes() {
        let get = |g: &Formula, memo: &FxHashMap<usize, Formula>| memo[&g.ptr_id()].clone();
        let out = match node.kind() {
            Kind::Box(Modality::Zero, _) => {
                match assignment.iter().find(|(g, _)| g == &node) {
                    Some((_, true)) => Formula::top(),
                    Some((_, false)) => Formula::bot(),
                    // nested under a maximal one, so never reached in the result
                    None => node.clone(),
                }
            }
            Kind::Var(_) | Kind::Top | Kind::Bot => node.clone(),
            Kind::Not(a) => Formula::not(get(a, &memo)),
            Kind::And(a, b) => Formula::and(get(a, &memo), get(b, &memo)),
            Kind::Or(a, b) => Formula::or(get(a, &memo), get(b, &memo)),
            Kind::Implies(a, b) => Formula::implies(get(a, &memo), get(b, &memo)),
            Kind::Box(Modality::One, a) => Formula::boxed(Modality::One, get(a, &memo)),
        };
        memo.insert(node.ptr_id(), out);
    }
    let body = memo[&f.ptr_id()].clone();
    debug_assert!(body.free_of(Modality::Zero));
    SheetFormula { body, origin: Some((f.clone(), assignment)) }
}

/// Freezes the `[0]`-subformulas of `f` at their values on one sheet of `m`.
pub fn eliminate_box0(f: &Formula, m: &StratifiedModel, sheet: &Sheet) -> Result<SheetFormula> {
    let maximal = maximal_box0(f);
    let refs: Vec<&Formula> = maximal.iter().collect();
    let sets = m.truth_sets(&refs);
    let mut values = Vec::with_capacity(maximal.len());
    for (g, set) in maximal.iter().zip(&sets) {
        let first = sheet.worlds.first().map(|&x| set.contains(x)).unwrap_or(true);
        if sheet.worlds.iter().any(|&x| set.contains(x) != first) {
            return Err(Error::ConstancyViolated(g.to_string()));
        }
        values.push(first);
    }
    Ok(replace_box0(f, |g| {
        let i = maximal.iter().position(|h| h == g).expect("maximal subformula");
        values[i]
    }))
}

/// Validity over finite GL models.
pub fn gl_is_theorem(f: &SheetFormula, bounds: &SaturationBounds) -> Result<Verdict> {
    gl_check(&f.body, bounds)
}

fn gl_check(body: &Formula, bounds: &SaturationBounds) -> Result<Verdict> {
    if !body.free_of(Modality::Zero) {
        return Err(Error::NotSheetFormula(body.to_string()));
    }
    let mut p = FormulaProfiler::new(&[body], Some(0), None).gl_only();
    let sat = saturate_formulas(&mut p, bounds)?;
    let bound = SearchBound {
        method: "gl-profile-saturation",
        max_profiles: bounds.max_profiles,
        profiles_explored: sat.profile_count,
        upper_profiles: 1,
    };
    match sat.stop {
        Some(Stop::Halted { v, upper, sheet }) => {
            let m = sat.model_at(v, upper, sheet)?;
            let m = minimize(&m, |m| !m.forces(m.root(), body));
            Ok(Verdict {
                theorem: false,
                countermodel: Some(PointedModel::rooted(canonical_relabel(&m))),
                search_exhausted: false,
                bound,
            })
        }
        _ => Ok(Verdict { theorem: true, countermodel: None, search_exhausted: true, bound }),
    }
}

fn gl_valid(body: &Formula, bounds: &SaturationBounds) -> Result<bool> {
    if !body.free_of(Modality::Zero) {
        return Err(Error::NotSheetFormula(body.to_string()));
    }
    let mut p = FormulaProfiler::new(&[body], Some(0), None).gl_only();
    let sat = saturate_formulas(&mut p, bounds)?;
    Ok(!matches!(sat.stop, Some(Stop::Halted { .. })))
}

/// Global consequence over GL models: `(premise ∧ [1]premise) → conclusion` is valid.
pub fn gl_consequence(premise: &Formula, conclusion: &Formula, bounds: &SaturationBounds) -> Result<bool> {
    let guard = Formula::and(premise.clone(), Formula::boxed(Modality::One, premise.clone()));
    gl_valid(&Formula::implies(guard, conclusion.clone()), bounds)
}

/// `p ↦ (f ∧ p) ∨ (¬f ∧ c)` where `c` is `⊤` or `⊥` according to `v`.
pub fn valuation_step(f: &Formula, ctx: &VarContext, v: u64) -> Substitution {
    let images = (0..ctx.len())
        .map(|i| {
            let c = if (v >> i) & 1 == 1 { Formula::top() } else { Formula::bot() };
            Formula::or(
                Formula::and(f.clone(), Formula::var(i)),
                Formula::and(Formula::not(f.clone()), c),
            )
        })
        .collect();
    Substitution::new(ctx, images).expect("images stay in context")
}

/// Outcome of the unifier search beyond a plain yes/no.
#[derive(Clone, Debug)]
pub enum GlUnifier {
    Found { sigma: Substitution, steps: usize },
    /// The formula lacks the extension property, so no projective unifier exists.
    NotProjective,
    /// Rounds ran out on a formula with the extension property.
    Inconclusive,
}

/// Searches for a projective unifier by composing valuation steps in
/// canonical order, one round over all valuations at a time, for at most
/// `2^|ctx|` rounds; steps guarded by `f` are tried first, then steps guarded
/// by `f ∧ [1]f`. Every candidate is verified before it is returned.
pub fn gl_projective_unifier(
    f: &SheetFormula,
    ctx: &VarContext,
    bounds: &SaturationBounds,
) -> Result<Option<Substitution>> {
    match gl_projective_unifier_report(f, ctx, bounds, None)? {
        GlUnifier::Found { sigma, .. } => Ok(Some(sigma)),
        _ => Ok(None),
    }
}

/// As [`gl_projective_unifier`], distinguishing non-projectivity from running out of rounds.
pub fn gl_projective_unifier_report(
    f: &SheetFormula,
    ctx: &VarContext,
    bounds: &SaturationBounds,
    max_rounds: Option<usize>,
) -> Result<GlUnifier> {
    let body = &f.body;
    if !gl_extension_property(f, bounds)? {
        return Ok(GlUnifier::NotProjective);
    }
    let identity = Substitution::identity(ctx);
    if gl_verify(body, &identity, bounds)? {
        return Ok(GlUnifier::Found { sigma: identity, steps: 0 });
    }
    let rounds = max_rounds.unwrap_or(1usize << ctx.len().min(20));
    // The plain guard leaves some projective formulas unsolved; the reflexive
    // guard `f ∧ [1]f` never undoes a world whose whole cone already satisfies `f`.
    let reflexive = Formula::and(body.clone(), Formula::boxed(Modality::One, body.clone()));
    for guard in [body, &reflexive] {
        let mut sigma = Substitution::identity(ctx);
        let mut steps = 0;
        for _ in 0..rounds {
            for v in 0..ctx.valuation_count() {
                sigma = valuation_step(guard, ctx, v).compose(&sigma);
                steps += 1;
                if gl_verify(body, &sigma, bounds)? {
                    return Ok(GlUnifier::Found { sigma, steps });
                }
            }
        }
    }
    Ok(GlUnifier::Inconclusive)
}

fn gl_verify(body: &Formula, sigma: &Substitution, bounds: &SaturationBounds) -> Result<bool> {
    if !gl_valid(&sigma.apply(body), bounds)? {
        return Ok(false);
    }
    for (i, img) in sigma.images().iter().enumerate() {
        if !gl_consequence(body, &Formula::iff(img.clone(), Formula::var(i)), bounds)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every GL model whose non-root worlds satisfy `f` has a variant
/// satisfying `f` at the root.
pub fn gl_extension_property(f: &SheetFormula, bounds: &SaturationBounds) -> Result<bool> {
    Ok(gl_extension_violation(f, bounds)?.is_none())
}

/// A GL model all of whose non-root worlds force `f` while no root valuation does.
pub fn gl_extension_violation(f: &SheetFormula, bounds: &SaturationBounds) -> Result<Option<StratifiedModel>> {
    let body = &f.body;
    if !body.free_of(Modality::Zero) {
        return Err(Error::NotSheetFormula(body.to_string()));
    }
    let mut p = FormulaProfiler::new(&[body], None, Some(0)).gl_only().halting_on_dead_end();
    let sat = saturate_formulas(&mut p, bounds)?;
    match sat.stop {
        Some(Stop::DeadEnd { upper, sheet }) => Ok(Some(sat.model_at(0, upper, sheet)?)),
        _ => Ok(None),
    }
}

/// Worlds of a model lying in the given sheet, as a bitset.
pub fn sheet_mask(m: &StratifiedModel, sheet: &Sheet) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(m.len());
    for &x in &sheet.worlds {
        b.insert(x);
    }
    b
}
