//! Test-side generators and independent oracles.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use j2kit::bisim::{enumerate_types, type_code, GenerationBounds, TypeUniverse};
use j2kit::formula::Kind;
use j2kit::model::{all_rooted_models, one_congruent, one_sum, stratify, RandomModelParams};
use j2kit::{Formula, Modality, PointedModel, RawModel, StratifiedModel, Substitution, VarContext};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random formula over `p1..p{nvars}` with modal depth at most `depth`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, nvars: usize, depth: usize) -> Formula {
    grow(rng, nvars, depth, 6)
}

fn grow<R: Rng + ?Sized>(rng: &mut R, nvars: usize, depth: usize, budget: usize) -> Formula {
    if budget == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Formula::top(),
            1 => Formula::bot(),
            _ => Formula::var(rng.gen_range(0..nvars.max(1))),
        };
    }
    let modal = depth > 0 && rng.gen_bool(0.45);
    if modal {
        let m = if rng.gen_bool(0.5) { Modality::Zero } else { Modality::One };
        let a = grow(rng, nvars, depth - 1, budget - 1);
        return if rng.gen_bool(0.6) { Formula::boxed(m, a) } else { Formula::diamond(m, a) };
    }
    let a = grow(rng, nvars, depth, budget / 2);
    match rng.gen_range(0..4) {
        0 => Formula::not(a),
        1 => Formula::and(a, grow(rng, nvars, depth, budget / 2)),
        2 => Formula::or(a, grow(rng, nvars, depth, budget / 2)),
        _ => Formula::implies(a, grow(rng, nvars, depth, budget / 2)),
    }
}

pub fn random_subst<R: Rng + ?Sized>(rng: &mut R, nvars: usize, depth: usize) -> Substitution {
    let ctx = VarContext::standard(nvars);
    let images = (0..nvars).map(|_| random_formula(rng, nvars, depth)).collect();
    Substitution::new(&ctx, images).expect("images use the context")
}

pub fn random_model<R: Rng + ?Sized>(rng: &mut R, max_worlds: usize, nvars: usize) -> StratifiedModel {
    let p = RandomModelParams { max_worlds, max_sheets: max_worlds.min(4), nvars, edge_prob: rng.gen_range(0.2..0.8) };
    j2kit::model::random_model(rng, &p)
}

/// Adjacency-matrix view of a model, evaluated without the library's evaluator.
pub struct Plain {
    pub r: [Vec<Vec<bool>>; 2],
    pub val: Vec<u64>,
}

impl Plain {
    pub fn of(m: &StratifiedModel) -> Plain {
        Plain::of_raw(&m.to_raw())
    }

    pub fn of_raw(raw: &RawModel) -> Plain {
        let n = raw.worlds.len();
        let idx: HashMap<i64, usize> = raw.worlds.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let mat = |edges: &[(i64, i64)]| {
            let mut r = vec![vec![false; n]; n];
            for &(a, b) in edges {
                r[idx[&a]][idx[&b]] = true;
            }
            r
        };
        Plain { r: [mat(&raw.r0), mat(&raw.r1)], val: raw.val.clone() }
    }

    pub fn len(&self) -> usize {
        self.val.len()
    }

    pub fn eval(&self, x: usize, f: &Formula) -> bool {
        match f.kind() {
            Kind::Var(i) => self.val[x] >> i & 1 == 1,
            Kind::Top => true,
            Kind::Bot => false,
            Kind::Not(a) => !self.eval(x, a),
            Kind::And(a, b) => self.eval(x, a) && self.eval(x, b),
            Kind::Or(a, b) => self.eval(x, a) || self.eval(x, b),
            Kind::Implies(a, b) => !self.eval(x, a) || self.eval(x, b),
            Kind::Box(m, a) => (0..self.len()).all(|y| !self.r[m.index()][x][y] || self.eval(y, a)),
        }
    }

    pub fn global(&self, f: &Formula) -> bool {
        (0..self.len()).all(|x| self.eval(x, f))
    }
}

/// `a, x ~_n b, y` by the textbook recursion, without memoization.
pub fn nbisim_direct(a: &Plain, x: usize, b: &Plain, y: usize, n: usize) -> bool {
    if a.val[x] != b.val[y] {
        return false;
    }
    if n == 0 {
        return true;
    }
    (0..2).all(|m| {
        let forth = (0..a.len())
            .filter(|&x2| a.r[m][x][x2])
            .all(|x2| (0..b.len()).any(|y2| b.r[m][y][y2] && nbisim_direct(a, x2, b, y2, n - 1)));
        let back = (0..b.len())
            .filter(|&y2| b.r[m][y][y2])
            .all(|y2| (0..a.len()).any(|x2| a.r[m][x][x2] && nbisim_direct(a, x2, b, y2, n - 1)));
        forth && back
    })
}

/// Adds a copy of world `w` with the same valuation, successors and
/// predecessors; the result is bisimilar to the original at every old world.
pub fn twin(m: &StratifiedModel, w: usize) -> StratifiedModel {
    let mut raw = m.to_raw();
    let id = m.id(w);
    let fresh = raw.worlds.iter().max().copied().unwrap_or(0) + 1;
    raw.worlds.push(fresh);
    raw.val.push(m.valuation(w));
    for rel in [&mut raw.r0, &mut raw.r1] {
        let mut extra = Vec::new();
        for &(a, b) in rel.iter() {
            if a == id {
                extra.push((fresh, b));
            }
            if b == id {
                extra.push((a, fresh));
            }
        }
        rel.extend(extra);
    }
    stratify(&raw).expect("twinning preserves the frame conditions")
}

/// A model bisimilar to `m` at its root, grown by repeated twinning of non-root worlds.
pub fn bisimilar_copy<R: Rng + ?Sized>(rng: &mut R, m: &StratifiedModel) -> StratifiedModel {
    let mut out = m.clone();
    for _ in 0..rng.gen_range(1..=2) {
        let choices: Vec<usize> = (0..out.len()).filter(|&x| x != out.root()).collect();
        if choices.is_empty() {
            break;
        }
        out = twin(&out, choices[rng.gen_range(0..choices.len())]);
    }
    out
}

/// Depth-1 types over one variable, with lookup by code.
pub struct Universe {
    pub ctx: VarContext,
    pub types: TypeUniverse,
}

impl Universe {
    pub fn one_var() -> Universe {
        let ctx = VarContext::standard(1);
        let types = enumerate_types(&ctx, 1, &GenerationBounds::default()).expect("depth-1 types");
        assert!(types.truncated.is_none());
        Universe { ctx, types }
    }

    pub fn len(&self) -> usize {
        self.types.types.len()
    }

    pub fn index(&self, pm: &PointedModel) -> usize {
        let code = type_code(pm, 1);
        self.types.types.iter().position(|t| t.code == code).expect("type in universe")
    }

    /// Formula true exactly at the types whose bits are set in `class`.
    pub fn class_formula(&self, class: u64) -> Formula {
        let ts: Vec<_> =
            (0..self.len()).filter(|b| class >> b & 1 == 1).map(|b| self.types.types[b].clone()).collect();
        j2kit::bisim::class_to_formula(&ts, 1, &self.ctx)
    }

    /// Types of the non-root worlds of `m`, and types of the root over all its variants.
    pub fn signature(&self, m: &StratifiedModel) -> (u64, u64) {
        let mut nonroot = 0u64;
        for x in 0..m.len() {
            if x != m.root() {
                nonroot |= 1 << self.index(&PointedModel { model: m.clone(), point: x });
            }
        }
        let mut roots = 0u64;
        for v in 0..self.ctx.valuation_count() {
            roots |= 1 << self.index(&PointedModel::rooted(m.variant(v)));
        }
        (nonroot, roots)
    }
}

/// Brute-force extension-property oracle over 1-sums of small models.
///
/// Holds the signatures of every 1-sum of 1..=3 pairwise 1-congruent rooted
/// models with at most 3 worlds, plus every such model whose root sheet is
/// the root alone (the empty family). A class `S` of types has a violation iff
/// some signature has all non-root types in `S` and no root variant in `S`.
pub struct SumOracle {
    pub signatures: BTreeSet<(u64, u64)>,
    pub summands_considered: usize,
}

impl SumOracle {
    pub fn build(u: &Universe) -> SumOracle {
        let small = all_rooted_models(3, 1);
        let mut signatures = BTreeSet::new();
        let n = small.len();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    for family in [vec![i], vec![i, j], vec![i, j, k]] {
                        let ms: Vec<StratifiedModel> = family.iter().map(|&x| small[x].clone()).collect();
                        if ms.iter().any(|m| !one_congruent(&ms[0], m)) {
                            continue;
                        }
                        signatures.insert(u.signature(&one_sum(&ms).expect("congruent family")));
                    }
                }
            }
        }
        for m in &small {
            if m.successors(Modality::One, m.root()).count_ones(..) == 0 {
                signatures.insert(u.signature(m));
            }
        }
        SumOracle { signatures, summands_considered: n }
    }

    pub fn violated(&self, class: u64) -> bool {
        self.signatures.iter().any(|&(nonroot, roots)| nonroot & !class == 0 && roots & class == 0)
    }
}
