//! Derivability, satisfiability and global consequence over finite stratified models.
//!
//! The search is exact: [`crate::saturation`] explores every combination of
//! box-body truth values that a world of some finite stratified model can
//! exhibit, so "theorem" verdicts are not relative to a model-size bound. The
//! only limit is the number of stored profiles; hitting it yields
//! [`Error::BoundExhausted`] rather than a verdict.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Formula, Modality};
use crate::model::{canonical_relabel, PointedModel, StratifiedModel};
use crate::saturation::{saturate_formulas, FormulaProfiler, SaturationBounds, Stop};

/// What the search explored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBound {
    pub method: &'static str,
    pub max_profiles: usize,
    pub profiles_explored: usize,
    pub upper_profiles: usize,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub theorem: bool,
    /// Present exactly when `theorem` is false; the point refutes the formula.
    pub countermodel: Option<PointedModel>,
    pub search_exhausted: bool,
    pub bound: SearchBound,
}

/// Decides whether `f` holds at every world of every finite stratified model.
pub fn is_theorem(f: &Formula, bounds: &SaturationBounds) -> Result<Verdict> {
    let mut p = FormulaProfiler::new(&[f], Some(0), None);
    let sat = saturate_formulas(&mut p, bounds)?;
    let bound = SearchBound {
        method: "profile-saturation",
        max_profiles: bounds.max_profiles,
        profiles_explored: sat.profile_count,
        upper_profiles: sat.upper_count(),
    };
    match sat.stop {
        Some(Stop::Halted { v, upper, sheet }) => {
            let m = sat.model_at(v, upper, sheet)?;
            let m = minimize(&m, |m| !m.forces(m.root(), f));
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

/// The verdict alone; no countermodel is built.
pub fn is_valid(f: &Formula, bounds: &SaturationBounds) -> Result<bool> {
    let mut p = FormulaProfiler::new(&[f], Some(0), None);
    let sat = saturate_formulas(&mut p, bounds)?;
    Ok(!matches!(sat.stop, Some(Stop::Halted { .. })))
}

/// Satisfiable iff the negation is not a theorem; the countermodel of the
/// negation is returned as the satisfying model.
pub fn is_satisfiable(f: &Formula, bounds: &SaturationBounds) -> Result<Verdict> {
    let v = is_theorem(&Formula::not(f.clone()), bounds)?;
    Ok(Verdict { theorem: !v.theorem, ..v })
}

/// Global consequence: every model where `premise` holds everywhere makes
/// `conclusion` hold everywhere.
pub fn consequence(premise: &Formula, conclusion: &Formula, bounds: &SaturationBounds) -> Result<Verdict> {
    is_theorem(&consequence_formula(premise, conclusion), bounds)
}

/// `(premise ∧ [0]premise ∧ [1]premise) → conclusion`.
pub fn consequence_formula(premise: &Formula, conclusion: &Formula) -> Formula {
    let guard = Formula::conj([
        premise.clone(),
        Formula::boxed(Modality::Zero, premise.clone()),
        Formula::boxed(Modality::One, premise.clone()),
    ]);
    Formula::implies(guard, conclusion.clone())
}

/// Convenience wrapper returning only the boolean verdict.
pub fn proves(f: &Formula, bounds: &SaturationBounds) -> Result<bool> {
    is_valid(f, bounds)
}

/// Greedily deletes non-root worlds while `keep` still holds of the model.
pub fn minimize(m: &StratifiedModel, keep: impl Fn(&StratifiedModel) -> bool) -> StratifiedModel {
    let mut cur = m.clone();
    loop {
        let mut changed = false;
        let mut x = cur.len();
        while x > 0 {
            x -= 1;
            if x == cur.root() || x >= cur.len() {
                continue;
            }
            let mut set = FixedBitSet::with_capacity(cur.len());
            set.insert_range(..);
            set.set(x, false);
            if let Ok(smaller) = cur.restrict(&set, cur.root()) {
                if keep(&smaller) {
                    cur = smaller;
                    changed = true;
                }
            }
        }
        if !changed {
            return cur;
        }
    }
}

impl Verdict {
    /// The countermodel or an error explaining why there is none.
    pub fn countermodel(&self) -> Result<&PointedModel> {
        self.countermodel
            .as_ref()
            .ok_or_else(|| Error::InvalidModel("verdict has no countermodel".into()))
    }
}
