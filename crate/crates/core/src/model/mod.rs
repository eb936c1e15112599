//! Finite rooted stratified Kripke models.
//!
//! A model is stored in sheet-normal form: its worlds are partitioned into
//! 1-sheets (classes of the equivalence generated by R1), the sheets are
//! strictly partially ordered, and `x R0 y` holds exactly when the sheet of `x`
//! lies below the sheet of `y`. Both relations are kept transitively closed.

mod canon;
mod enumerate;
mod frame;
mod json;

use fixedbitset::FixedBitSet;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, Kind, Modality, Substitution};

pub use canon::{canonical_relabel, isomorphic, one_congruent, one_sum};
pub use enumerate::{all_rooted_models, random_model, rooted_frames, RandomModelParams};
pub use frame::{stratify, validate_frame, Condition, FrameReport, Violation};
pub use json::{model_from_json, model_to_json, raw_from_json, ModelJson};

/// Valuation of a world: bit `i` is the truth value of context variable `i`.
pub type Valuation = u64;

/// A finite model given by explicit relations; the import format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawModel {
    pub worlds: Vec<i64>,
    pub r0: Vec<(i64, i64)>,
    pub r1: Vec<(i64, i64)>,
    /// Aligned with `worlds`.
    pub val: Vec<Valuation>,
    pub root: Option<i64>,
}

impl RawModel {
    pub(crate) fn index_map(&self) -> Result<FxHashMap<i64, usize>> {
        let mut map = FxHashMap::default();
        for (i, w) in self.worlds.iter().enumerate() {
            if map.insert(*w, i).is_some() {
                return Err(Error::InvalidModel(format!("world {w} listed twice")));
            }
        }
        if self.val.len() != self.worlds.len() {
            return Err(Error::InvalidModel("valuation must cover every world".into()));
        }
        for &(a, b) in self.r0.iter().chain(self.r1.iter()) {
            for w in [a, b] {
                if !map.contains_key(&w) {
                    return Err(Error::UnknownWorld(w));
                }
            }
        }
        if let Some(r) = self.root {
            if !map.contains_key(&r) {
                return Err(Error::UnknownWorld(r));
            }
        }
        Ok(map)
    }

    /// Copy with both relations transitively closed.
    pub fn closed(&self) -> Result<RawModel> {
        let idx = self.index_map()?;
        let n = self.worlds.len();
        let close = |edges: &[(i64, i64)]| {
            let mut succ = vec![FixedBitSet::with_capacity(n); n];
            for &(a, b) in edges {
                succ[idx[&a]].insert(idx[&b]);
            }
            transitive_closure(&mut succ);
            let mut out = Vec::new();
            for (i, s) in succ.iter().enumerate() {
                for j in s.ones() {
                    out.push((self.worlds[i], self.worlds[j]));
                }
            }
            out
        };
        Ok(RawModel {
            worlds: self.worlds.clone(),
            r0: close(&self.r0),
            r1: close(&self.r1),
            val: self.val.clone(),
            root: self.root,
        })
    }
}

/// Warshall closure of successor sets.
pub(crate) fn transitive_closure(succ: &mut [FixedBitSet]) {
    let n = succ.len();
    for k in 0..n {
        let row_k = succ[k].clone();
        for s in succ.iter_mut() {
            if s.contains(k) {
                s.union_with(&row_k);
            }
        }
    }
}

/// A 1-sheet: an R1-connected class of worlds with its inner R1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sheet {
    pub worlds: Vec<usize>,
    pub r1_inner: Vec<(usize, usize)>,
}

/// A rooted stratified model. Worlds are addressed by index `0..len()`; each
/// also carries an external integer id.
#[derive(Clone, Debug)]
pub struct StratifiedModel {
    ids: Vec<i64>,
    val: Vec<Valuation>,
    sheet_of: Vec<usize>,
    sheets: Vec<Vec<usize>>,
    // sheet_above[a] contains b iff a < b in the sheet order (closed)
    sheet_above: Vec<FixedBitSet>,
    r0: Vec<FixedBitSet>,
    r1: Vec<FixedBitSet>,
    root: usize,
}

/// A model together with a distinguished world.
#[derive(Clone, Debug)]
pub struct PointedModel {
    pub model: StratifiedModel,
    pub point: usize,
}

impl PointedModel {
    /// The model rooted at its own root.
    pub fn rooted(model: StratifiedModel) -> Self {
        let point = model.root();
        PointedModel { model, point }
    }
}

impl StratifiedModel {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn id(&self, x: usize) -> i64 {
        self.ids[x]
    }

    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn index_of(&self, id: i64) -> Result<usize> {
        self.ids.iter().position(|&w| w == id).ok_or(Error::UnknownWorld(id))
    }

    pub fn valuation(&self, x: usize) -> Valuation {
        self.val[x]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.val
    }

    pub fn sheet_of(&self, x: usize) -> usize {
        self.sheet_of[x]
    }

    pub fn sheet_count(&self) -> usize {
        self.sheets.len()
    }

    pub fn sheet_worlds(&self, s: usize) -> &[usize] {
        &self.sheets[s]
    }

    pub fn sheet(&self, s: usize) -> Sheet {
        let worlds = self.sheets[s].clone();
        let r1_inner = worlds
            .iter()
            .flat_map(|&x| self.r1[x].ones().map(move |y| (x, y)))
            .collect();
        Sheet { worlds, r1_inner }
    }

    /// `a < b` in the sheet order.
    pub fn sheet_below(&self, a: usize, b: usize) -> bool {
        self.sheet_above[a].contains(b)
    }

    /// Closed strict sheet order as pairs.
    pub fn sheet_order(&self) -> Vec<(usize, usize)> {
        (0..self.sheets.len())
            .flat_map(|a| self.sheet_above[a].ones().map(move |b| (a, b)))
            .collect()
    }

    pub fn successors(&self, m: Modality, x: usize) -> &FixedBitSet {
        match m {
            Modality::Zero => &self.r0[x],
            Modality::One => &self.r1[x],
        }
    }

    pub fn related(&self, m: Modality, x: usize, y: usize) -> bool {
        self.successors(m, x).contains(y)
    }

    pub fn root_sheet(&self) -> usize {
        self.sheet_of[self.root]
    }

    /// All worlds outside the root's sheet.
    pub fn residue_worlds(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.sheet_of[x] != self.root_sheet()).collect()
    }

    /// The model as explicit closed relations.
    pub fn to_raw(&self) -> RawModel {
        let pairs = |rel: &[FixedBitSet]| {
            let mut out = Vec::new();
            for (x, s) in rel.iter().enumerate() {
                for y in s.ones() {
                    out.push((self.ids[x], self.ids[y]));
                }
            }
            out
        };
        RawModel {
            worlds: self.ids.clone(),
            r0: pairs(&self.r0),
            r1: pairs(&self.r1),
            val: self.val.clone(),
            root: Some(self.ids[self.root]),
        }
    }

    /// Truth sets (as world bitsets) of each formula in `fs`.
    pub fn truth_sets(&self, fs: &[&Formula]) -> Vec<FixedBitSet> {
        let n = self.len();
        let mut memo: FxHashMap<usize, FixedBitSet> = FxHashMap::default();
        for f in fs {
            if memo.contains_key(&f.ptr_id()) {
                continue;
            }
            for node in f.dag_nodes() {
                if memo.contains_key(&node.ptr_id()) {
                    continue;
                }
                let set = match node.kind() {
                    Kind::Var(i) => {
                        let mut s = FixedBitSet::with_capacity(n);
                        for x in 0..n {
                            if (*i as usize) < 64 && (self.val[x] >> *i) & 1 == 1 {
                                s.insert(x);
                            }
                        }
                        s
                    }
                    Kind::Top => {
                        let mut s = FixedBitSet::with_capacity(n);
                        s.insert_range(..);
                        s
                    }
                    Kind::Bot => FixedBitSet::with_capacity(n),
                    Kind::Not(a) => {
                        let mut s = memo[&a.ptr_id()].clone();
                        s.toggle_range(..);
                        s
                    }
                    Kind::And(a, b) => {
                        let mut s = memo[&a.ptr_id()].clone();
                        s.intersect_with(&memo[&b.ptr_id()]);
                        s
                    }
                    Kind::Or(a, b) => {
                        let mut s = memo[&a.ptr_id()].clone();
                        s.union_with(&memo[&b.ptr_id()]);
                        s
                    }
                    Kind::Implies(a, b) => {
                        let mut s = memo[&a.ptr_id()].clone();
                        s.toggle_range(..);
                        s.union_with(&memo[&b.ptr_id()]);
                        s
                    }
                    Kind::Box(m, a) => {
                        let body = &memo[&a.ptr_id()];
                        let rel = match m {
                            Modality::Zero => &self.r0,
                            Modality::One => &self.r1,
                        };
                        let mut s = FixedBitSet::with_capacity(n);
                        for (x, succ) in rel.iter().enumerate() {
                            if succ.is_subset(body) {
                                s.insert(x);
                            }
                        }
                        s
                    }
                };
                memo.insert(node.ptr_id(), set);
            }
        }
        fs.iter().map(|f| memo[&f.ptr_id()].clone()).collect()
    }

    pub fn truth_set(&self, f: &Formula) -> FixedBitSet {
        self.truth_sets(&[f]).pop().expect("one formula")
    }

    /// Forcing at a world index.
    pub fn forces(&self, x: usize, f: &Formula) -> bool {
        self.truth_set(f).contains(x)
    }

    pub fn globally_true(&self, f: &Formula) -> bool {
        self.truth_set(f).is_full()
    }

    /// Worlds of the submodel generated by `x`.
    pub fn generated_worlds(&self, x: usize) -> FixedBitSet {
        let mut s = self.r0[x].clone();
        s.union_with(&self.r1[x]);
        s.insert(x);
        s
    }

    /// Submodel on `keep`, rooted at `root`; ids are preserved.
    pub fn restrict(&self, keep: &FixedBitSet, root: usize) -> Result<StratifiedModel> {
        let mut b = ModelBuilder::new();
        let mut sheet_map = FxHashMap::default();
        let mut world_map = FxHashMap::default();
        for x in keep.ones() {
            let s = self.sheet_of[x];
            let ns = *sheet_map.entry(s).or_insert_with(|| b.add_sheet());
            world_map.insert(x, b.add_world_with_id(ns, self.val[x], self.ids[x]));
        }
        for x in keep.ones() {
            for y in self.r1[x].ones() {
                if keep.contains(y) {
                    b.r1(world_map[&x], world_map[&y]);
                }
            }
        }
        for (&s, &ns) in &sheet_map {
            for t in self.sheet_above[s].ones() {
                if let Some(&nt) = sheet_map.get(&t) {
                    b.below(ns, nt);
                }
            }
        }
        let r = *world_map.get(&root).ok_or(Error::NoRoot)?;
        b.build(r)
    }

    /// Same frame with a different root valuation.
    pub fn variant(&self, root_val: Valuation) -> StratifiedModel {
        let mut m = self.clone();
        m.val[m.root] = root_val;
        m
    }

    /// Same frame with valuations replaced.
    pub fn with_valuations(&self, val: Vec<Valuation>) -> StratifiedModel {
        assert_eq!(val.len(), self.len());
        let mut m = self.clone();
        m.val = val;
        m
    }

    /// Rebuilds with ids `0..len()`.
    pub fn renumbered(&self) -> StratifiedModel {
        let mut m = self.clone();
        m.ids = (0..self.len() as i64).collect();
        m
    }

    /// Number of R0/R1 edges (closed).
    pub fn edge_counts(&self) -> (usize, usize) {
        let c = |rel: &[FixedBitSet]| rel.iter().map(|s| s.count_ones(..)).sum();
        (c(&self.r0), c(&self.r1))
    }
}

/// Forcing at a world given by its external id.
pub fn force(m: &StratifiedModel, id: i64, f: &Formula) -> Result<bool> {
    let x = m.index_of(id)?;
    Ok(m.forces(x, f))
}

pub fn globally_true(m: &StratifiedModel, f: &Formula) -> bool {
    m.globally_true(f)
}

/// The submodel generated by the world with external id `id`.
pub fn generated_submodel(m: &StratifiedModel, id: i64) -> Result<PointedModel> {
    let x = m.index_of(id)?;
    let sub = m.restrict(&m.generated_worlds(x), x)?;
    let point = sub.root();
    Ok(PointedModel { model: sub, point })
}

pub fn variant(m: &StratifiedModel, root_val: Valuation) -> StratifiedModel {
    m.variant(root_val)
}

/// Same frame; `p_i` holds at `x` iff `s(p_i)` held at `x`.
pub fn apply_subst_model(s: &Substitution, m: &StratifiedModel) -> StratifiedModel {
    let images: Vec<&Formula> = s.images().iter().collect();
    let sets = m.truth_sets(&images);
    let mut val = vec![0u64; m.len()];
    for (i, set) in sets.iter().enumerate() {
        for x in set.ones() {
            val[x] |= 1 << i;
        }
    }
    m.with_valuations(val)
}

/// Incremental construction of stratified models in sheet-normal form.
///
/// Declared sheets are split into their R1-connected components on `build`,
/// and both the R1 relation and the sheet order are closed.
#[derive(Clone, Debug, Default)]
pub struct ModelBuilder {
    ids: Vec<i64>,
    val: Vec<Valuation>,
    sheet: Vec<usize>,
    r1: Vec<(usize, usize)>,
    order: Vec<(usize, usize)>,
    nsheets: usize,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sheet(&mut self) -> usize {
        self.nsheets += 1;
        self.nsheets - 1
    }

    /// Adds a world whose id is its index.
    pub fn add_world(&mut self, sheet: usize, val: Valuation) -> usize {
        let id = self.ids.len() as i64;
        self.add_world_with_id(sheet, val, id)
    }

    pub fn add_world_with_id(&mut self, sheet: usize, val: Valuation, id: i64) -> usize {
        assert!(sheet < self.nsheets, "unknown sheet");
        self.ids.push(id);
        self.val.push(val);
        self.sheet.push(sheet);
        self.ids.len() - 1
    }

    pub fn r1(&mut self, a: usize, b: usize) {
        self.r1.push((a, b));
    }

    /// Sheet `s` lies below sheet `t`.
    pub fn below(&mut self, s: usize, t: usize) {
        self.order.push((s, t));
    }

    pub fn world_count(&self) -> usize {
        self.ids.len()
    }

    pub fn build(self, root: usize) -> Result<StratifiedModel> {
        let n = self.ids.len();
        if root >= n {
            return Err(Error::NoRoot);
        }
        let mut r1 = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in &self.r1 {
            if self.sheet[a] != self.sheet[b] {
                return Err(Error::InvalidModel("R1 edge between different sheets".into()));
            }
            r1[a].insert(b);
        }
        transitive_closure(&mut r1);
        if (0..n).any(|x| r1[x].contains(x)) {
            return Err(Error::InvalidModel("R1 has a cycle".into()));
        }
        // Split declared sheets into R1-connected components.
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            let mut y = x;
            while c[y] != r {
                let next = c[y];
                c[y] = r;
                y = next;
            }
            r
        }
        for &(a, b) in &self.r1 {
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            if ra != rb {
                comp[ra.max(rb)] = ra.min(rb);
            }
        }
        // Components numbered by smallest member.
        let mut sheet_id: FxHashMap<usize, usize> = FxHashMap::default();
        let mut sheets: Vec<Vec<usize>> = Vec::new();
        let mut sheet_of = vec![0; n];
        for x in 0..n {
            let r = find(&mut comp, x);
            let s = *sheet_id.entry(r).or_insert_with(|| {
                sheets.push(Vec::new());
                sheets.len() - 1
            });
            sheets[s].push(x);
            sheet_of[x] = s;
        }
        let ns = sheets.len();
        let mut declared_above = vec![FixedBitSet::with_capacity(self.nsheets); self.nsheets];
        for &(s, t) in &self.order {
            declared_above[s].insert(t);
        }
        transitive_closure(&mut declared_above);
        if (0..self.nsheets).any(|s| declared_above[s].contains(s)) {
            return Err(Error::InvalidModel("sheet order has a cycle".into()));
        }
        let declared_of: Vec<usize> = sheets.iter().map(|w| self.sheet[w[0]]).collect();
        let mut sheet_above = vec![FixedBitSet::with_capacity(ns); ns];
        for a in 0..ns {
            for b in 0..ns {
                if declared_above[declared_of[a]].contains(declared_of[b]) {
                    sheet_above[a].insert(b);
                }
            }
        }
        let mut r0 = vec![FixedBitSet::with_capacity(n); n];
        for x in 0..n {
            for t in sheet_above[sheet_of[x]].ones() {
                for &y in &sheets[t] {
                    r0[x].insert(y);
                }
            }
        }
        let m = StratifiedModel {
            ids: self.ids,
            val: self.val,
            sheet_of,
            sheets,
            sheet_above,
            r0,
            r1,
            root,
        };
        if !m.generated_worlds(root).is_full() {
            return Err(Error::NoRoot);
        }
        Ok(m)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::formula::{parse, VarContext};

    /// `x R0 y`, with the given valuations.
    pub fn chain0(vx: Valuation, vy: Valuation) -> StratifiedModel {
        let mut b = ModelBuilder::new();
        let (s, t) = (b.add_sheet(), b.add_sheet());
        let x = b.add_world(s, vx);
        b.add_world(t, vy);
        b.below(s, t);
        b.build(x).unwrap()
    }

    pub fn single(v: Valuation) -> StratifiedModel {
        let mut b = ModelBuilder::new();
        let s = b.add_sheet();
        let x = b.add_world(s, v);
        b.build(x).unwrap()
    }

    fn f1(s: &str) -> Formula {
        parse(s, &VarContext::standard(1)).unwrap()
    }

    #[test]
    fn forcing_examples() {
        let m = single(0);
        assert!(m.forces(0, &f1("[0]F & [1]F")));
        assert!(m.forces(0, &f1("T")));
        let c = chain0(1, 0);
        assert!(c.forces(0, &f1("[1]p1")));
        assert!(!c.forces(0, &f1("[0]p1")));
        assert!(!c.globally_true(&f1("p1")));
        assert!(single(1).globally_true(&f1("p1")));
        let ts = chain0(0, 1).truth_set(&f1("[0]p1 -> p1"));
        assert!(!ts.contains(0) && ts.contains(1));
        assert!(matches!(force(&c, 7, &f1("T")), Err(Error::UnknownWorld(7))));
    }

    #[test]
    fn generated_submodels() {
        let c = chain0(1, 0);
        let top = generated_submodel(&c, 1).unwrap();
        assert_eq!(top.model.len(), 1);
        let whole = generated_submodel(&c, 0).unwrap();
        assert_eq!(whole.model.len(), 2);
        // x R1 y in a lower sheet, a sheet above it
        let mut b = ModelBuilder::new();
        let (s, t) = (b.add_sheet(), b.add_sheet());
        let r = b.add_world(s, 0);
        let x = b.add_world(s, 0);
        let y = b.add_world(s, 1);
        let z = b.add_world(t, 0);
        b.r1(r, x);
        b.r1(x, y);
        b.below(s, t);
        let m = b.build(r).unwrap();
        let g = generated_submodel(&m, 1).unwrap();
        let ids: Vec<i64> = g.model.ids().to_vec();
        assert_eq!(ids, vec![1, 2, 3]);
        assert!(g.model.related(Modality::Zero, 0, 2));
        assert!(!m.related(Modality::One, y, x));
        let _ = z;
    }

    #[test]
    fn variants_touch_only_the_root() {
        let c = chain0(1, 0);
        assert_eq!(variant(&c, 1).valuations(), c.valuations());
        let v = variant(&c, 0);
        assert_eq!(v.valuation(0), 0);
        assert_eq!(v.valuation(1), c.valuation(1));
        assert_eq!(variant(&single(0), 1).valuation(0), 1);
    }

    #[test]
    fn substitution_action() {
        let ctx = VarContext::standard(1);
        let c = chain0(0, 0);
        let s = Substitution::from_pairs(&ctx, [(0, f1("[0]F"))]).unwrap();
        assert_eq!(apply_subst_model(&s, &c).valuations(), &[0, 1]);
        let t = Substitution::from_pairs(&ctx, [(0, Formula::top())]).unwrap();
        assert_eq!(apply_subst_model(&t, &c).valuations(), &[1, 1]);
        assert_eq!(apply_subst_model(&Substitution::identity(&ctx), &c).valuations(), c.valuations());
    }

    #[test]
    fn builder_splits_disconnected_sheets_and_requires_a_root() {
        let mut b = ModelBuilder::new();
        let s = b.add_sheet();
        b.add_world(s, 0);
        b.add_world(s, 0);
        assert!(matches!(b.build(0), Err(Error::NoRoot)));
    }
}
