use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{ModelBuilder, RawModel, StratifiedModel};
use crate::error::{Error, Result};

/// A frame condition checked by [`validate_frame`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    R0Irreflexive,
    R0Transitive,
    R1Irreflexive,
    R1Transitive,
    /// `x R1 y` implies `x` and `y` have the same R0-successors.
    Ignatiev,
    /// `x Rm y & y Rn z` implies `x Rm z` for `m <= n`.
    J2,
    /// `z R0 x & y R1 x` implies `z R0 y`.
    Stratified,
}

impl Condition {
    pub fn tag(self) -> &'static str {
        match self {
            Condition::R0Irreflexive => "r0-irreflexive",
            Condition::R0Transitive => "r0-transitive",
            Condition::R1Irreflexive => "r1-irreflexive",
            Condition::R1Transitive => "r1-transitive",
            Condition::Ignatiev => "ignatiev",
            Condition::J2 => "j2",
            Condition::Stratified => "stratified",
        }
    }
}

/// A violated condition with the world ids witnessing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameReport {
    pub ignatiev_ok: bool,
    pub j2_ok: bool,
    pub stratified_ok: bool,
    pub violations: Vec<Violation>,
}

impl FrameReport {
    pub fn all_ok(&self) -> bool {
        self.ignatiev_ok && self.j2_ok && self.stratified_ok
    }
}

struct Rel {
    succ: Vec<FixedBitSet>,
}

impl Rel {
    fn has(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }
}

/// Checks each frame condition independently on the relations as given.
pub fn validate_frame(m: &RawModel) -> Result<FrameReport> {
    let idx = m.index_map()?;
    let n = m.worlds.len();
    let mk = |edges: &[(i64, i64)]| {
        let mut succ = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in edges {
            succ[idx[&a]].insert(idx[&b]);
        }
        Rel { succ }
    };
    let rels = [mk(&m.r0), mk(&m.r1)];
    let ids = |xs: &[usize]| xs.iter().map(|&x| m.worlds[x]).collect::<Vec<_>>();
    let mut violations = Vec::new();

    let irreflexive = [Condition::R0Irreflexive, Condition::R1Irreflexive];
    let transitive = [Condition::R0Transitive, Condition::R1Transitive];
    for i in 0..2 {
        if let Some(x) = (0..n).find(|&x| rels[i].has(x, x)) {
            violations.push(Violation { condition: irreflexive[i], witness: ids(&[x]) });
        }
        if let Some(w) = find3(n, |x, y, z| rels[i].has(x, y) && rels[i].has(y, z) && !rels[i].has(x, z)) {
            violations.push(Violation { condition: transitive[i], witness: ids(&w) });
        }
    }
    let coherence = find3(n, |x, y, z| rels[1].has(x, y) && (rels[0].has(x, z) != rels[0].has(y, z)));
    if let Some(w) = coherence {
        violations.push(Violation { condition: Condition::Ignatiev, witness: ids(&w) });
    }
    let ignatiev_ok = violations.is_empty();

    let j2 = find3(n, |x, y, z| {
        [(0, 0), (0, 1), (1, 1)]
            .iter()
            .any(|&(a, b)| rels[a].has(x, y) && rels[b].has(y, z) && !rels[a].has(x, z))
    });
    if let Some(w) = &j2 {
        violations.push(Violation { condition: Condition::J2, witness: ids(w) });
    }
    // witness order (z, y, x) for z R0 x & y R1 x & not z R0 y
    let strat = find3(n, |z, y, x| rels[0].has(z, x) && rels[1].has(y, x) && !rels[0].has(z, y));
    if let Some(w) = &strat {
        violations.push(Violation { condition: Condition::Stratified, witness: ids(w) });
    }
    Ok(FrameReport {
        ignatiev_ok,
        j2_ok: j2.is_none(),
        stratified_ok: strat.is_none(),
        violations,
    })
}

fn find3(n: usize, pred: impl Fn(usize, usize, usize) -> bool) -> Option<Vec<usize>> {
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if pred(x, y, z) {
                    return Some(vec![x, y, z]);
                }
            }
        }
    }
    None
}

/// Converts a validated raw model into sheet-normal form.
pub fn stratify(m: &RawModel) -> Result<StratifiedModel> {
    let report = validate_frame(m)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::NotStratified(format!(
            "condition {} fails at {:?}",
            v.condition.tag(),
            v.witness
        )));
    }
    let idx = m.index_map()?;
    let n = m.worlds.len();
    if n == 0 {
        return Err(Error::NoRoot);
    }
    let mut r0 = vec![FixedBitSet::with_capacity(n); n];
    let mut r1 = vec![FixedBitSet::with_capacity(n); n];
    for &(a, b) in &m.r0 {
        r0[idx[&a]].insert(idx[&b]);
    }
    for &(a, b) in &m.r1 {
        r1[idx[&a]].insert(idx[&b]);
    }
    let generates = |x: usize| {
        let mut s = r0[x].clone();
        s.union_with(&r1[x]);
        s.insert(x);
        s.is_full()
    };
    let root = match m.root {
        Some(r) => {
            let x = idx[&r];
            if !generates(x) {
                return Err(Error::NoRoot);
            }
            x
        }
        None => (0..n).find(|&x| generates(x)).ok_or(Error::NoRoot)?,
    };

    // E1 classes.
    let mut class = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if class[s] != usize::MAX {
            continue;
        }
        let c = classes.len();
        let mut stack = vec![s];
        class[s] = c;
        let mut members = Vec::new();
        while let Some(x) = stack.pop() {
            members.push(x);
            for y in 0..n {
                if (r1[x].contains(y) || r1[y].contains(x)) && class[y] == usize::MAX {
                    class[y] = c;
                    stack.push(y);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    let k = classes.len();
    let mut order = vec![FixedBitSet::with_capacity(k); k];
    for x in 0..n {
        for y in r0[x].ones() {
            order[class[x]].insert(class[y]);
        }
    }
    // Every point of a higher sheet must be R0-reachable from every point of a lower one.
    for x in 0..n {
        for y in 0..n {
            let expected = order[class[x]].contains(class[y]);
            if expected != r0[x].contains(y) {
                return Err(Error::NotStratified(format!(
                    "R0 between worlds {} and {} disagrees with the sheet order",
                    m.worlds[x], m.worlds[y]
                )));
            }
        }
    }
    let mut b = ModelBuilder::new();
    let sheet_ids: Vec<usize> = (0..k).map(|_| b.add_sheet()).collect();
    for x in 0..n {
        b.add_world_with_id(sheet_ids[class[x]], m.val[x], m.worlds[x]);
    }
    for x in 0..n {
        for y in r1[x].ones() {
            b.r1(x, y);
        }
    }
    for a in 0..k {
        for c in order[a].ones() {
            b.below(a, c);
        }
    }
    b.build(root)
}
