//! Bounded bisimulation, characteristic formulas, and n-type universes.

use std::collections::HashMap;
use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::decide::minimize;
use crate::error::{Error, Result};
use crate::formula::{Formula, Modality, VarContext};
use crate::model::{canonical_relabel, model_to_json, ModelJson, PointedModel, StratifiedModel};
use crate::saturation::{Saturation, SaturationBounds, TypeId, TypeProfiler, TypeSpace};

/// Decides `a ~_n b` by the atom/forth/back recursion over both relations.
pub fn nbisimilar(a: &PointedModel, b: &PointedModel, n: usize) -> bool {
    let mut memo: FxHashMap<(usize, usize, usize), bool> = FxHashMap::default();
    bisim_rec(&a.model, a.point, &b.model, b.point, n, &mut memo)
}

fn bisim_rec(
    ma: &StratifiedModel,
    x: usize,
    mb: &StratifiedModel,
    y: usize,
    k: usize,
    memo: &mut FxHashMap<(usize, usize, usize), bool>,
) -> bool {
    if ma.valuation(x) != mb.valuation(y) {
        return false;
    }
    if k == 0 {
        return true;
    }
    if let Some(&r) = memo.get(&(x, y, k)) {
        return r;
    }
    let mut ok = true;
    'outer: for m in Modality::BOTH {
        let sa: Vec<usize> = ma.successors(m, x).ones().collect();
        let sb: Vec<usize> = mb.successors(m, y).ones().collect();
        for &x2 in &sa {
            if !sb.iter().any(|&y2| bisim_rec(ma, x2, mb, y2, k - 1, memo)) {
                ok = false;
                break 'outer;
            }
        }
        for &y2 in &sb {
            if !sa.iter().any(|&x2| bisim_rec(ma, x2, mb, y2, k - 1, memo)) {
                ok = false;
                break 'outer;
            }
        }
    }
    memo.insert((x, y, k), ok);
    ok
}

/// Unbounded bisimilarity on finite models: `~_k` with `k` the total world count.
pub fn bisimilar(a: &PointedModel, b: &PointedModel) -> bool {
    nbisimilar(a, b, a.model.len() + b.model.len())
}

/// Which side of a pair the unmatched successor lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Why two pointed models are not n-bisimilar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mismatch {
    /// The points disagree on some variable.
    Atoms { left: u64, right: u64 },
    /// A successor on `side` has no `(depth-1)`-bisimilar partner among the other point's successors.
    Successor { side: Side, modality: usize, world: i64, depth: usize },
}

/// The first failing clause of the `~_n` recursion, or `None` when `a ~_n b`.
pub fn mismatch(a: &PointedModel, b: &PointedModel, n: usize) -> Option<Mismatch> {
    let (ma, x, mb, y) = (&a.model, a.point, &b.model, b.point);
    if ma.valuation(x) != mb.valuation(y) {
        return Some(Mismatch::Atoms { left: ma.valuation(x), right: mb.valuation(y) });
    }
    if n == 0 {
        return None;
    }
    let mut memo = FxHashMap::default();
    let mut memo_rev = FxHashMap::default();
    for m in Modality::BOTH {
        let sa: Vec<usize> = ma.successors(m, x).ones().collect();
        let sb: Vec<usize> = mb.successors(m, y).ones().collect();
        if let Some(&x2) = sa.iter().find(|&&x2| !sb.iter().any(|&y2| bisim_rec(ma, x2, mb, y2, n - 1, &mut memo))) {
            return Some(Mismatch::Successor { side: Side::Left, modality: m.index(), world: ma.id(x2), depth: n - 1 });
        }
        if let Some(&y2) = sb.iter().find(|&&y2| !sa.iter().any(|&x2| bisim_rec(mb, y2, ma, x2, n - 1, &mut memo_rev))) {
            return Some(Mismatch::Successor { side: Side::Right, modality: m.index(), world: mb.id(y2), depth: n - 1 });
        }
    }
    None
}

/// Level-`n` type ids of every world of `m`.
pub fn world_types(space: &mut TypeSpace, m: &StratifiedModel, n: usize) -> Vec<TypeId> {
    let mut ids: Vec<TypeId> = (0..m.len()).map(|x| space.intern(0, m.valuation(x), &[], &[])).collect();
    for k in 1..=n {
        ids = (0..m.len())
            .map(|x| {
                let r0: Vec<TypeId> = m.successors(Modality::Zero, x).ones().map(|y| ids[y]).collect();
                let r1: Vec<TypeId> = m.successors(Modality::One, x).ones().map(|y| ids[y]).collect();
                space.intern(k, m.valuation(x), &r0, &r1)
            })
            .collect();
    }
    ids
}

/// Canonical encoding of the n-type of a pointed model.
pub fn type_code(w: &PointedModel, n: usize) -> Vec<u8> {
    let mut space = TypeSpace::new();
    let ids = world_types(&mut space, &w.model, n);
    space.code(n, ids[w.point])
}

/// An n-bisimulation class with a small representative.
#[derive(Clone)]
pub struct NType {
    pub n: usize,
    pub rep: PointedModel,
    pub code: Vec<u8>,
}

impl NType {
    pub fn code_hex(&self) -> String {
        hex::encode(&self.code)
    }
}

impl PartialEq for NType {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.code == other.code
    }
}

impl Eq for NType {}

impl std::hash::Hash for NType {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.code.hash(state);
    }
}

impl fmt::Debug for NType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NType(n={}, {} worlds, {})", self.n, self.rep.model.len(), self.code_hex())
    }
}

/// The n-type of `w`, represented by a greedily shrunk, canonically relabelled copy.
pub fn type_of(w: &PointedModel, n: usize) -> NType {
    let code = type_code(w, n);
    let sub = w
        .model
        .restrict(&w.model.generated_worlds(w.point), w.point)
        .expect("generated submodel is rooted");
    let small = minimize(&sub, |m| type_code(&PointedModel::rooted(m.clone()), n) == code);
    NType { n, rep: PointedModel::rooted(canonical_relabel(&small)), code }
}

/// Builds characteristic formulas of interned types, sharing subformulas.
pub struct CharFormulas<'a> {
    space: &'a mut TypeSpace,
    nvars: usize,
    memo: HashMap<(usize, TypeId), Formula>,
}

impl<'a> CharFormulas<'a> {
    pub fn new(space: &'a mut TypeSpace, nvars: usize) -> Self {
        CharFormulas { space, nvars, memo: HashMap::new() }
    }

    pub fn code(&mut self, k: usize, id: TypeId) -> Vec<u8> {
        self.space.code(k, id)
    }

    pub fn get(&mut self, k: usize, id: TypeId) -> Formula {
        if let Some(f) = self.memo.get(&(k, id)) {
            return f.clone();
        }
        let val = self.space.valuation(k, id);
        let mut parts = literals(val, self.nvars);
        if k > 0 {
            let mut boxes = Vec::new();
            for m in Modality::BOTH {
                let mut succ: Vec<(Vec<u8>, TypeId)> = self
                    .space
                    .successors(k, id, m)
                    .to_vec()
                    .into_iter()
                    .map(|c| (self.space.code(k - 1, c), c))
                    .collect();
                succ.sort();
                let fs: Vec<Formula> = succ.iter().map(|&(_, c)| self.get(k - 1, c)).collect();
                parts.extend(fs.iter().map(|g| Formula::diamond(m, g.clone())));
                boxes.push(Formula::boxed(m, Formula::disj(fs)));
            }
            parts.extend(boxes);
        }
        let f = Formula::conj(parts);
        self.memo.insert((k, id), f.clone());
        f
    }
}

fn literals(v: u64, nvars: usize) -> Vec<Formula> {
    (0..nvars)
        .map(|i| if (v >> i) & 1 == 1 { Formula::var(i) } else { Formula::not(Formula::var(i)) })
        .collect()
}

/// Conjunction of literals fixing every variable of the context to its value in `v`.
pub fn valuation_formula(v: u64, nvars: usize) -> Formula {
    Formula::conj(literals(v, nvars))
}

/// Characteristic formula of depth `n`: true exactly at points n-bisimilar to `w`.
pub fn char_formula(w: &PointedModel, n: usize, ctx: &VarContext) -> Formula {
    let mut space = TypeSpace::new();
    let ids = world_types(&mut space, &w.model, n);
    CharFormulas::new(&mut space, ctx.len()).get(n, ids[w.point])
}

/// Limits for [`enumerate_types`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GenerationBounds {
    pub saturation: SaturationBounds,
    /// Stop after this many types.
    pub max_types: usize,
}

impl Default for GenerationBounds {
    fn default() -> Self {
        GenerationBounds { saturation: SaturationBounds::default(), max_types: 100_000 }
    }
}

/// All n-types over a context, ordered by code.
#[derive(Clone, Debug)]
pub struct TypeUniverse {
    pub n: usize,
    pub ctx: VarContext,
    pub types: Vec<NType>,
    /// Which bound cut generation short, if any.
    pub truncated: Option<String>,
}

#[derive(Serialize)]
struct TypeJson {
    code: String,
    rep: ModelJson,
}

#[derive(Serialize)]
struct UniverseJson<'a> {
    n: usize,
    ctx: &'a [String],
    truncated: &'a Option<String>,
    count: usize,
    types: Vec<TypeJson>,
}

impl TypeUniverse {
    pub fn to_json(&self) -> serde_json::Value {
        let u = UniverseJson {
            n: self.n,
            ctx: self.ctx.names(),
            truncated: &self.truncated,
            count: self.types.len(),
            types: self
                .types
                .iter()
                .map(|t| TypeJson { code: t.code_hex(), rep: model_to_json(&t.rep.model, &self.ctx) })
                .collect(),
        };
        serde_json::to_value(u).expect("serializable")
    }
}

/// Realizable level-`n` types found by saturation, each with a model realizing it at its root.
pub(crate) fn realize_types(
    space: &mut TypeSpace,
    n: usize,
    nvars: usize,
    bounds: &SaturationBounds,
    max_types: usize,
) -> (Vec<(TypeId, StratifiedModel)>, Option<String>) {
    assert!(n >= 1);
    let (sat, seen) = {
        let mut p = TypeProfiler::new(space, n, nvars);
        let sat = Saturation::run(&mut p, bounds);
        (sat, p.seen)
    };
    let mut truncated = sat.exhausted.clone();
    let mut out: Vec<(TypeId, StratifiedModel)> = Vec::new();
    let mut found: FxHashMap<TypeId, ()> = FxHashMap::default();
    'pairs: for (u, h) in sat.pairs().collect::<Vec<_>>() {
        for &v in sat.admitted(u, h) {
            let t = space.intern(n, v, sat.upper(u), sat.sheet(u, h));
            if found.insert(t, ()).is_some() {
                continue;
            }
            if out.len() >= max_types {
                truncated = Some(format!("more than {max_types} types"));
                break 'pairs;
            }
            match sat.model_at(v, u, h) {
                Ok(m) => out.push((t, m)),
                Err(e) => {
                    truncated = Some(e.to_string());
                    break 'pairs;
                }
            }
        }
    }
    debug_assert!(truncated.is_some() || found.len() == seen.len());
    (out, truncated)
}

/// Enumerates the n-types over `ctx`, each with a small representative.
pub fn enumerate_types(ctx: &VarContext, n: usize, bounds: &GenerationBounds) -> Result<TypeUniverse> {
    let nvars = ctx.len();
    let mut found: Vec<StratifiedModel> = Vec::new();
    let mut truncated = None;
    if n == 0 {
        for v in 0..ctx.valuation_count() {
            found.push(single_world(v));
        }
    } else {
        let mut space = TypeSpace::new();
        let (ms, t) = realize_types(&mut space, n, nvars, &bounds.saturation, bounds.max_types);
        truncated = t;
        found = ms.into_iter().map(|(_, m)| m).collect();
    }
    if found.is_empty() {
        return Err(Error::BoundExhausted(truncated.unwrap_or_else(|| "no types generated".into())));
    }
    let mut types: Vec<NType> = found.iter().map(|m| type_of(&PointedModel::rooted(m.clone()), n)).collect();
    types.sort_by(|a, b| a.code.cmp(&b.code));
    types.dedup_by(|a, b| a.code == b.code);
    Ok(TypeUniverse { n, ctx: ctx.clone(), types, truncated })
}

fn single_world(v: u64) -> StratifiedModel {
    let mut b = crate::model::ModelBuilder::new();
    let s = b.add_sheet();
    let r = b.add_world(s, v);
    b.build(r).expect("single world")
}

/// Disjunction of the characteristic formulas of the given types.
pub fn class_to_formula(ts: &[NType], n: usize, ctx: &VarContext) -> Formula {
    Formula::disj(ts.iter().map(|t| char_formula(&t.rep, n, ctx)))
}
