//! Exhaustive search over stratified models by saturation of world profiles.
//!
//! A world of a stratified model is described, for any fixed finite set of
//! questions, by its valuation, an *upper profile* summarizing every world in
//! the sheets above it, and a *successor profile* summarizing its
//! R1-successors. Profiles live in a join-semilattice: the profile of a union
//! of worlds is the join of their profiles. Because stratified models can be
//! placed side by side (disjoint sheets above, disjoint R1-subtrees inside a
//! sheet), the achievable profiles are exactly the join-closure of the profiles
//! of rooted pieces, which this module computes to a fixpoint:
//!
//! * for each achievable upper profile `U`, the achievable successor profiles
//!   `H` inside a sheet sitting below `U`;
//! * the achievable upper profiles, built from rooted pieces `(v, U, H)`.
//!
//! Every derived profile keeps a derivation, so any achievable world can be
//! turned back into a concrete model.

use std::hash::Hash;

use fixedbitset::FixedBitSet;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, Kind, Modality};
use crate::model::{ModelBuilder, StratifiedModel, Valuation};

/// Problem-specific profile semantics.
pub trait Profiler {
    type Abs: Clone + Eq + Hash;

    /// Profile of the empty set of worlds.
    fn empty(&self) -> Self::Abs;
    fn join(&self, a: &Self::Abs, b: &Self::Abs) -> Self::Abs;
    /// Part of a profile that worlds below need to see.
    fn project_upper(&self, a: &Self::Abs) -> Self::Abs {
        a.clone()
    }
    fn valuations(&self) -> Vec<Valuation>;
    /// Profile of a single world, or `None` if such worlds are excluded.
    fn world(&mut self, v: Valuation, upper: &Self::Abs, succ: &Self::Abs) -> Option<Self::Abs>;
    /// Checked after every call to `world`.
    fn halt(&self) -> bool {
        false
    }
    /// Stop at the first `(U, H)` admitting no world.
    fn halt_on_dead_end(&self) -> bool {
        false
    }
}

/// Resource limits for a saturation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SaturationBounds {
    /// Total number of profiles (upper plus successor) kept in memory.
    pub max_profiles: usize,
    /// Size cap for reconstructed models.
    pub max_witness_worlds: usize,
}

impl Default for SaturationBounds {
    fn default() -> Self {
        SaturationBounds { max_profiles: 2_000_000, max_witness_worlds: 100_000 }
    }
}

/// Rough memory cost of one stored profile, used to turn a memory budget into a profile cap.
const BYTES_PER_PROFILE: usize = 256;

impl SaturationBounds {
    /// Defaults, with the profile cap taken from `J2KIT_MAX_MEM` (megabytes) when set.
    pub fn from_env() -> Self {
        let mut b = SaturationBounds::default();
        if let Some(mb) = std::env::var("J2KIT_MAX_MEM").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
            b.max_profiles = (mb.saturating_mul(1 << 20) / BYTES_PER_PROFILE).max(1);
        }
        b
    }
}

#[derive(Clone, Copy, Debug)]
enum SheetNode {
    Empty,
    World { v: Valuation, succ: usize },
    Join(usize, usize),
}

#[derive(Clone, Copy, Debug)]
enum UpperNode {
    Empty,
    Rooted { v: Valuation, upper: usize, sheet: usize },
    Join(usize, usize),
}

struct ClosedSet<A, N> {
    items: Vec<A>,
    index: FxHashMap<A, usize>,
    nodes: Vec<N>,
}

impl<A: Clone + Eq + Hash, N> ClosedSet<A, N> {
    fn new(empty: A, node: N) -> Self {
        let mut index = FxHashMap::default();
        index.insert(empty.clone(), 0);
        ClosedSet { items: vec![empty], index, nodes: vec![node] }
    }

    /// Inserts `a` and everything needed to stay closed under `join`.
    fn insert(
        &mut self,
        a: A,
        node: N,
        join: impl Fn(&A, &A) -> A,
        mk_join: impl Fn(usize, usize) -> N,
        budget: &mut usize,
        limit: usize,
    ) -> Result<()> {
        if self.index.contains_key(&a) {
            return Ok(());
        }
        let mut work = vec![self.push(a, node, budget, limit)?];
        while let Some(i) = work.pop() {
            let mut j = 0;
            while j < self.items.len() {
                let c = join(&self.items[i], &self.items[j]);
                if !self.index.contains_key(&c) {
                    work.push(self.push(c, mk_join(i, j), budget, limit)?);
                }
                j += 1;
            }
        }
        Ok(())
    }

    fn push(&mut self, a: A, node: N, budget: &mut usize, limit: usize) -> Result<usize> {
        *budget += 1;
        if *budget > limit {
            return Err(Error::BoundExhausted(format!("more than {limit} profiles")));
        }
        let i = self.items.len();
        self.index.insert(a.clone(), i);
        self.items.push(a);
        self.nodes.push(node);
        Ok(i)
    }
}

/// Where a run stopped, if it did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    /// `Profiler::halt` fired at the world `(v, upper, sheet)`.
    Halted { v: Valuation, upper: usize, sheet: usize },
    /// No valuation is admitted at `(upper, sheet)`.
    DeadEnd { upper: usize, sheet: usize },
}

/// Result of a saturation run: all achievable profiles with derivations.
pub struct Saturation<A> {
    uppers: ClosedSet<A, UpperNode>,
    sheets: Vec<ClosedSet<A, SheetNode>>,
    /// Valuations admitted at each `(upper, sheet)` pair.
    admitted: Vec<Vec<Vec<Valuation>>>,
    pub stop: Option<Stop>,
    /// First `(upper, sheet)` pair admitting no world, even when not halting on it.
    pub first_dead_end: Option<(usize, usize)>,
    /// Set when the profile cap stopped the run early.
    pub exhausted: Option<String>,
    pub profile_count: usize,
    max_witness_worlds: usize,
}

impl<A: Clone + Eq + Hash> Saturation<A> {
    /// Runs to the fixpoint, a halt, or the profile cap; on the cap `exhausted`
    /// is set and everything derived so far stays usable.
    pub fn run<P: Profiler<Abs = A>>(p: &mut P, bounds: &SaturationBounds) -> Self {
        let vals = p.valuations();
        let empty = p.empty();
        let mut budget = 0usize;
        let mut s = Saturation {
            uppers: ClosedSet::new(empty.clone(), UpperNode::Empty),
            sheets: Vec::new(),
            admitted: Vec::new(),
            stop: None,
            first_dead_end: None,
            exhausted: None,
            profile_count: 0,
            max_witness_worlds: bounds.max_witness_worlds,
        };
        let limit = bounds.max_profiles;
        let mut u = 0;
        while u < s.uppers.items.len() {
            let upper = s.uppers.items[u].clone();
            let mut level: ClosedSet<A, SheetNode> = ClosedSet::new(empty.clone(), SheetNode::Empty);
            let mut admitted: Vec<Vec<Valuation>> = Vec::new();
            let mut rooted: Vec<(A, Valuation, usize)> = Vec::new();
            let mut i = 0;
            while i < level.items.len() {
                let succ = level.items[i].clone();
                let mut ok = Vec::new();
                for &v in &vals {
                    let r = p.world(v, &upper, &succ);
                    if p.halt() {
                        s.stop = Some(Stop::Halted { v, upper: u, sheet: i });
                        admitted.push(ok);
                        s.finish_level(level, admitted, budget);
                        return s;
                    }
                    if let Some(w) = r {
                        ok.push(v);
                        let part = p.join(&w, &succ);
                        rooted.push((p.project_upper(&p.join(&part, &upper)), v, i));
                        let ins = level.insert(
                            part,
                            SheetNode::World { v, succ: i },
                            |a, b| p.join(a, b),
                            SheetNode::Join,
                            &mut budget,
                            limit,
                        );
                        if let Err(e) = ins {
                            s.exhausted = Some(e.to_string());
                            admitted.push(ok);
                            s.finish_level(level, admitted, budget);
                            return s;
                        }
                    }
                }
                if ok.is_empty() && s.first_dead_end.is_none() {
                    s.first_dead_end = Some((u, i));
                    if p.halt_on_dead_end() {
                        s.stop = Some(Stop::DeadEnd { upper: u, sheet: i });
                        admitted.push(ok);
                        s.finish_level(level, admitted, budget);
                        return s;
                    }
                }
                admitted.push(ok);
                i += 1;
            }
            s.finish_level(level, admitted, budget);
            for (a, v, i) in rooted {
                let ins = s.uppers.insert(
                    a,
                    UpperNode::Rooted { v, upper: u, sheet: i },
                    |x, y| p.join(x, y),
                    UpperNode::Join,
                    &mut budget,
                    limit,
                );
                if let Err(e) = ins {
                    s.exhausted = Some(e.to_string());
                    s.profile_count = budget;
                    return s;
                }
            }
            s.profile_count = budget;
            u += 1;
        }
        s
    }

    /// Fails if the run hit its profile cap.
    pub fn require_complete(&self) -> Result<()> {
        match &self.exhausted {
            Some(msg) => Err(Error::BoundExhausted(msg.clone())),
            None => Ok(()),
        }
    }

    fn finish_level(&mut self, level: ClosedSet<A, SheetNode>, admitted: Vec<Vec<Valuation>>, budget: usize) {
        self.sheets.push(level);
        self.admitted.push(admitted);
        self.profile_count = budget;
    }

    /// Number of upper profiles whose sheet level was fully explored.
    pub fn explored_uppers(&self) -> usize {
        self.sheets.len()
    }

    pub fn upper_count(&self) -> usize {
        self.uppers.items.len()
    }

    pub fn upper(&self, u: usize) -> &A {
        &self.uppers.items[u]
    }

    pub fn sheet_count(&self, u: usize) -> usize {
        self.sheets[u].items.len()
    }

    pub fn sheet(&self, u: usize, h: usize) -> &A {
        &self.sheets[u].items[h]
    }

    /// Valuations admitted for a world with profiles `(upper u, successors h)`.
    pub fn admitted(&self, u: usize, h: usize) -> &[Valuation] {
        &self.admitted[u][h]
    }

    /// All explored `(u, h)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.sheets.len()).flat_map(move |u| (0..self.sheets[u].items.len()).map(move |h| (u, h)))
    }

    /// A model whose root has valuation `v`, successor profile `h` and upper profile `u`.
    pub fn model_at(&self, v: Valuation, u: usize, h: usize) -> Result<StratifiedModel> {
        let mut b = ModelBuilder::new();
        let above = self.build_upper(&mut b, self.uppers.nodes[u])?;
        let s = b.add_sheet();
        let root = b.add_world(s, v);
        let ws = self.build_sheet(&mut b, s, u, h)?;
        for w in ws {
            b.r1(root, w);
        }
        for t in above {
            b.below(s, t);
        }
        b.build(root)
    }

    fn check_size(&self, b: &ModelBuilder) -> Result<()> {
        if b.world_count() > self.max_witness_worlds {
            return Err(Error::BoundExhausted(format!(
                "witness exceeds {} worlds",
                self.max_witness_worlds
            )));
        }
        Ok(())
    }

    fn build_sheet(&self, b: &mut ModelBuilder, sheet: usize, u: usize, h: usize) -> Result<Vec<usize>> {
        self.check_size(b)?;
        match self.sheets[u].nodes[h] {
            SheetNode::Empty => Ok(Vec::new()),
            SheetNode::World { v, succ } => {
                let below = self.build_sheet(b, sheet, u, succ)?;
                let y = b.add_world(sheet, v);
                for &w in &below {
                    b.r1(y, w);
                }
                let mut out = vec![y];
                out.extend(below);
                Ok(out)
            }
            SheetNode::Join(x, y) => {
                let mut out = self.build_sheet(b, sheet, u, x)?;
                out.extend(self.build_sheet(b, sheet, u, y)?);
                Ok(out)
            }
        }
    }

    fn build_upper(&self, b: &mut ModelBuilder, node: UpperNode) -> Result<Vec<usize>> {
        self.check_size(b)?;
        match node {
            UpperNode::Empty => Ok(Vec::new()),
            UpperNode::Rooted { v, upper, sheet } => {
                let above = self.build_upper(b, self.uppers.nodes[upper])?;
                let s = b.add_sheet();
                let root = b.add_world(s, v);
                for w in self.build_sheet(b, s, upper, sheet)? {
                    b.r1(root, w);
                }
                for &t in &above {
                    b.below(s, t);
                }
                let mut out = vec![s];
                out.extend(above);
                Ok(out)
            }
            UpperNode::Join(x, y) => {
                let mut out = self.build_upper(b, self.uppers.nodes[x])?;
                out.extend(self.build_upper(b, self.uppers.nodes[y])?);
                Ok(out)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Formula profiles

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    Var(u32),
    Top,
    Bot,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Box(Modality, usize),
}

/// A set of formulas compiled into a hash-consed evaluation program.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    /// Body bit of each op that occurs under a box.
    body_bit: Vec<Option<usize>>,
    bodies: Vec<usize>,
    roots: Vec<usize>,
    index: FxHashMap<Op, usize>,
    var_mask: u64,
}

impl Program {
    pub fn compile(fs: &[&Formula]) -> Program {
        let mut prog = Program {
            ops: Vec::new(),
            body_bit: Vec::new(),
            bodies: Vec::new(),
            roots: Vec::new(),
            index: FxHashMap::default(),
            var_mask: 0,
        };
        let mut by_ptr: FxHashMap<usize, usize> = FxHashMap::default();
        for f in fs {
            for node in f.dag_nodes() {
                if by_ptr.contains_key(&node.ptr_id()) {
                    continue;
                }
                let c = |g: &Formula| by_ptr[&g.ptr_id()];
                let op = match node.kind() {
                    Kind::Var(i) => Op::Var(*i),
                    Kind::Top => Op::Top,
                    Kind::Bot => Op::Bot,
                    Kind::Not(a) => Op::Not(c(a)),
                    Kind::And(a, b) => Op::And(c(a), c(b)),
                    Kind::Or(a, b) => Op::Or(c(a), c(b)),
                    Kind::Implies(a, b) => Op::Implies(c(a), c(b)),
                    Kind::Box(m, a) => Op::Box(*m, c(a)),
                };
                let id = prog.intern(op);
                by_ptr.insert(node.ptr_id(), id);
            }
            prog.roots.push(by_ptr[&f.ptr_id()]);
        }
        prog
    }

    fn intern(&mut self, op: Op) -> usize {
        if let Some(&i) = self.index.get(&op) {
            return i;
        }
        let i = self.ops.len();
        self.ops.push(op);
        self.body_bit.push(None);
        self.index.insert(op, i);
        match op {
            Op::Var(v) => self.var_mask |= 1u64 << v,
            Op::Box(_, body) => {
                if self.body_bit[body].is_none() {
                    self.body_bit[body] = Some(self.bodies.len());
                    self.bodies.push(body);
                }
            }
            _ => {}
        }
        i
    }

    pub fn root(&self, i: usize) -> usize {
        self.roots[i]
    }

    pub fn body_count(&self) -> usize {
        self.bodies.len()
    }

    /// Bit of a box body, looked up structurally.
    pub fn body_bit_of(&self, f: &Formula) -> Option<usize> {
        let op = self.lookup(f)?;
        self.body_bit[op]
    }

    fn lookup(&self, f: &Formula) -> Option<usize> {
        let mut by_ptr: FxHashMap<usize, usize> = FxHashMap::default();
        for node in f.dag_nodes() {
            let c = |g: &Formula| by_ptr.get(&g.ptr_id()).copied();
            let op = match node.kind() {
                Kind::Var(i) => Op::Var(*i),
                Kind::Top => Op::Top,
                Kind::Bot => Op::Bot,
                Kind::Not(a) => Op::Not(c(a)?),
                Kind::And(a, b) => Op::And(c(a)?, c(b)?),
                Kind::Or(a, b) => Op::Or(c(a)?, c(b)?),
                Kind::Implies(a, b) => Op::Implies(c(a)?, c(b)?),
                Kind::Box(m, a) => Op::Box(*m, c(a)?),
            };
            by_ptr.insert(node.ptr_id(), *self.index.get(&op)?);
        }
        by_ptr.get(&f.ptr_id()).copied()
    }

    /// Variables occurring anywhere in the program.
    pub fn var_mask(&self) -> u64 {
        self.var_mask
    }

    /// Truth of every op at a world; box bodies read from the profiles.
    pub fn eval(&self, v: Valuation, upper: &FixedBitSet, succ: &FixedBitSet, out: &mut Vec<bool>) {
        out.clear();
        out.reserve(self.ops.len());
        for op in &self.ops {
            let b = match *op {
                Op::Var(i) => (v >> i) & 1 == 1,
                Op::Top => true,
                Op::Bot => false,
                Op::Not(a) => !out[a],
                Op::And(a, b) => out[a] && out[b],
                Op::Or(a, b) => out[a] || out[b],
                Op::Implies(a, b) => !out[a] || out[b],
                Op::Box(Modality::Zero, body) => upper.contains(self.body_bit[body].expect("body")),
                Op::Box(Modality::One, body) => succ.contains(self.body_bit[body].expect("body")),
            };
            out.push(b);
        }
    }

    fn body_profile(&self, truth: &[bool]) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.bodies.len());
        for (j, &op) in self.bodies.iter().enumerate() {
            if truth[op] {
                bits.insert(j);
            }
        }
        bits
    }

    /// Bits of bodies occurring under `[0]`.
    pub fn upper_mask(&self) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.bodies.len());
        for op in &self.ops {
            if let Op::Box(Modality::Zero, body) = op {
                m.insert(self.body_bit[*body].expect("body"));
            }
        }
        m
    }

    /// Whether the program mentions `[m]` at all.
    pub fn uses(&self, m: Modality) -> bool {
        self.ops.iter().any(|op| matches!(op, Op::Box(k, _) if *k == m))
    }
}

/// All submasks of `mask` in increasing order.
pub fn submasks(mask: u64) -> Vec<Valuation> {
    let mut out = Vec::new();
    let mut s = 0u64;
    loop {
        out.push(s);
        if s == mask {
            break;
        }
        s = ((s | !mask).wrapping_add(1)) & mask;
    }
    out
}

/// Profiles are the sets of box bodies true at every world of a set (join is intersection).
pub struct FormulaProfiler {
    pub prog: Program,
    upper_mask: FixedBitSet,
    /// Worlds where this root fails are excluded.
    require: Option<usize>,
    /// Halt at the first world where this root fails.
    goal: Option<usize>,
    halt_on_dead_end: bool,
    halted: bool,
    scratch: Vec<bool>,
    vals: Vec<Valuation>,
    /// Only the empty upper profile is explored (GL sheets).
    gl_only: bool,
}

impl FormulaProfiler {
    /// `formulas[goal]` is searched for refutation, `formulas[require]` restricts worlds.
    pub fn new(formulas: &[&Formula], goal: Option<usize>, require: Option<usize>) -> Self {
        let prog = Program::compile(formulas);
        let upper_mask = prog.upper_mask();
        let vals = submasks(prog.var_mask());
        FormulaProfiler {
            goal: goal.map(|g| prog.root(g)),
            require: require.map(|r| prog.root(r)),
            prog,
            upper_mask,
            halt_on_dead_end: false,
            halted: false,
            scratch: Vec::new(),
            vals,
            gl_only: false,
        }
    }

    pub fn halting_on_dead_end(mut self) -> Self {
        self.halt_on_dead_end = true;
        self
    }

    /// Restrict to a single sheet with nothing above (GL models).
    pub fn gl_only(mut self) -> Self {
        self.gl_only = true;
        self
    }

    /// Enumerate valuations over the given mask instead of the occurring variables.
    pub fn with_valuation_mask(mut self, mask: u64) -> Self {
        self.vals = submasks(mask | self.prog.var_mask());
        self
    }

    /// Truth of every op at the world `(v, upper, succ)`.
    pub fn truth(&mut self, v: Valuation, upper: &FixedBitSet, succ: &FixedBitSet) -> Vec<bool> {
        let mut out = Vec::new();
        self.prog.eval(v, upper, succ, &mut out);
        out
    }
}

impl Profiler for FormulaProfiler {
    type Abs = FixedBitSet;

    fn empty(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.prog.body_count());
        b.insert_range(..);
        b
    }

    fn join(&self, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
        let mut c = a.clone();
        c.intersect_with(b);
        c
    }

    fn project_upper(&self, a: &FixedBitSet) -> FixedBitSet {
        // Bits outside the upper mask are forced to one so they never split profiles.
        let mut c = a.clone();
        let mut outside = self.upper_mask.clone();
        outside.toggle_range(..);
        c.union_with(&outside);
        c
    }

    fn valuations(&self) -> Vec<Valuation> {
        self.vals.clone()
    }

    fn world(&mut self, v: Valuation, upper: &FixedBitSet, succ: &FixedBitSet) -> Option<FixedBitSet> {
        let mut scratch = std::mem::take(&mut self.scratch);
        self.prog.eval(v, upper, succ, &mut scratch);
        if let Some(g) = self.goal {
            if !scratch[g] {
                self.halted = true;
            }
        }
        let keep = self.require.is_none_or(|r| scratch[r]);
        let out = keep.then(|| self.prog.body_profile(&scratch));
        self.scratch = scratch;
        out
    }

    fn halt(&self) -> bool {
        self.halted
    }

    fn halt_on_dead_end(&self) -> bool {
        self.halt_on_dead_end
    }
}

/// Saturation for formula profiles; in GL mode only the empty upper profile is explored.
/// Errors on the profile cap unless a halt was reached first.
pub fn saturate_formulas(p: &mut FormulaProfiler, bounds: &SaturationBounds) -> Result<Saturation<FixedBitSet>> {
    let sat = if p.gl_only {
        let mut gl = GlOnly(p);
        Saturation::run(&mut gl, bounds)
    } else {
        Saturation::run(p, bounds)
    };
    if sat.stop.is_none() {
        sat.require_complete()?;
    }
    Ok(sat)
}

/// Wrapper that keeps the upper level at the empty profile.
struct GlOnly<'a>(&'a mut FormulaProfiler);

impl Profiler for GlOnly<'_> {
    type Abs = FixedBitSet;
    fn empty(&self) -> FixedBitSet {
        self.0.empty()
    }
    fn join(&self, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
        self.0.join(a, b)
    }
    fn project_upper(&self, _a: &FixedBitSet) -> FixedBitSet {
        self.0.empty()
    }
    fn valuations(&self) -> Vec<Valuation> {
        self.0.valuations()
    }
    fn world(&mut self, v: Valuation, upper: &FixedBitSet, succ: &FixedBitSet) -> Option<FixedBitSet> {
        self.0.world(v, upper, succ)
    }
    fn halt(&self) -> bool {
        self.0.halt()
    }
    fn halt_on_dead_end(&self) -> bool {
        self.0.halt_on_dead_end()
    }
}

// ---------------------------------------------------------------------------
// Type profiles

/// Identifier of an interned type at some level.
pub type TypeId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct TypeKey {
    val: Valuation,
    r0: Vec<TypeId>,
    r1: Vec<TypeId>,
}

#[derive(Default)]
struct Level {
    keys: Vec<TypeKey>,
    index: FxHashMap<TypeKey, TypeId>,
    trunc: Vec<TypeId>,
    codes: Vec<Option<Vec<u8>>>,
}

/// Interner for n-types: a level-0 type is a valuation; a level-k type is a
/// valuation together with the sets of level-(k-1) types of its R0- and
/// R1-successors.
#[derive(Default)]
pub struct TypeSpace {
    levels: Vec<Level>,
}

impl TypeSpace {
    pub fn new() -> Self {
        TypeSpace::default()
    }

    fn level(&mut self, k: usize) -> &mut Level {
        while self.levels.len() <= k {
            self.levels.push(Level::default());
        }
        &mut self.levels[k]
    }

    /// Interns a type; successor ids must be level `k - 1` ids (ignored at level 0).
    pub fn intern(&mut self, k: usize, val: Valuation, r0: &[TypeId], r1: &[TypeId]) -> TypeId {
        let (mut r0, mut r1) = if k == 0 { (vec![], vec![]) } else { (r0.to_vec(), r1.to_vec()) };
        r0.sort_unstable();
        r0.dedup();
        r1.sort_unstable();
        r1.dedup();
        let key = TypeKey { val, r0, r1 };
        if let Some(&id) = self.level(k).index.get(&key) {
            return id;
        }
        let trunc = if k == 0 {
            0
        } else {
            let t0: Vec<TypeId> = key.r0.iter().map(|&c| self.truncate(k - 1, c)).collect();
            let t1: Vec<TypeId> = key.r1.iter().map(|&c| self.truncate(k - 1, c)).collect();
            self.intern(k - 1, val, &t0, &t1)
        };
        let lvl = self.level(k);
        let id = lvl.keys.len() as TypeId;
        lvl.keys.push(key.clone());
        lvl.index.insert(key, id);
        lvl.trunc.push(trunc);
        lvl.codes.push(None);
        id
    }

    /// The level-(k-1) type of a level-k type.
    pub fn truncate(&self, k: usize, id: TypeId) -> TypeId {
        self.levels[k].trunc[id as usize]
    }

    /// Truncation of a level-`from` type down to level `to`.
    pub fn truncate_to(&self, from: usize, id: TypeId, to: usize) -> TypeId {
        let mut id = id;
        for k in (to + 1..=from).rev() {
            id = self.truncate(k, id);
        }
        id
    }

    pub fn count(&self, k: usize) -> usize {
        self.levels.get(k).map_or(0, |l| l.keys.len())
    }

    pub fn valuation(&self, k: usize, id: TypeId) -> Valuation {
        self.levels[k].keys[id as usize].val
    }

    pub fn successors(&self, k: usize, id: TypeId, m: Modality) -> &[TypeId] {
        let key = &self.levels[k].keys[id as usize];
        match m {
            Modality::Zero => &key.r0,
            Modality::One => &key.r1,
        }
    }

    /// Canonical byte encoding, independent of interning order.
    pub fn code(&mut self, k: usize, id: TypeId) -> Vec<u8> {
        if let Some(c) = &self.levels[k].codes[id as usize] {
            return c.clone();
        }
        let key = self.levels[k].keys[id as usize].clone();
        let mut out = Vec::new();
        out.extend_from_slice(&key.val.to_be_bytes());
        if k > 0 {
            for succ in [&key.r0, &key.r1] {
                let mut codes: Vec<Vec<u8>> = succ.iter().map(|&c| self.code(k - 1, c)).collect();
                codes.sort();
                out.extend_from_slice(&(codes.len() as u32).to_be_bytes());
                for c in codes {
                    out.extend_from_slice(&(c.len() as u32).to_be_bytes());
                    out.extend_from_slice(&c);
                }
            }
        }
        self.levels[k].codes[id as usize] = Some(out.clone());
        out
    }

    /// Truth of `f` (depth at most `k`) at a level-k type.
    pub fn eval(&self, k: usize, id: TypeId, f: &Formula) -> bool {
        assert!(f.depth() as usize <= k, "formula deeper than the type");
        let mut memo: FxHashMap<(usize, usize, TypeId), bool> = FxHashMap::default();
        self.eval_memo(k, id, f, &mut memo)
    }

    fn eval_memo(&self, k: usize, id: TypeId, f: &Formula, memo: &mut FxHashMap<(usize, usize, TypeId), bool>) -> bool {
        let key = (f.ptr_id(), k, id);
        if let Some(&b) = memo.get(&key) {
            return b;
        }
        let t = &self.levels[k].keys[id as usize];
        let r = match f.kind() {
            Kind::Var(i) => (t.val >> i) & 1 == 1,
            Kind::Top => true,
            Kind::Bot => false,
            Kind::Not(a) => !self.eval_memo(k, id, a, memo),
            Kind::And(a, b) => self.eval_memo(k, id, a, memo) && self.eval_memo(k, id, b, memo),
            Kind::Or(a, b) => self.eval_memo(k, id, a, memo) || self.eval_memo(k, id, b, memo),
            Kind::Implies(a, b) => !self.eval_memo(k, id, a, memo) || self.eval_memo(k, id, b, memo),
            Kind::Box(m, a) => {
                let succ = match m {
                    Modality::Zero => &t.r0,
                    Modality::One => &t.r1,
                };
                succ.iter().all(|&c| self.eval_memo(k - 1, c, a, memo))
            }
        };
        memo.insert(key, r);
        r
    }
}

/// Profiles are sets of level-(n-1) types; worlds are level-n types.
pub struct TypeProfiler<'a> {
    pub space: &'a mut TypeSpace,
    pub n: usize,
    vals: Vec<Valuation>,
    /// Admitted level-n types; all when `None`.
    allowed: Option<&'a FxHashMap<TypeId, ()>>,
    /// Every level-n type met, admitted or not, in discovery order.
    pub seen: Vec<TypeId>,
    seen_set: FxHashMap<TypeId, ()>,
    halt_on_dead_end: bool,
}

impl<'a> TypeProfiler<'a> {
    pub fn new(space: &'a mut TypeSpace, n: usize, nvars: usize) -> Self {
        assert!(n >= 1, "level-0 types need no saturation");
        TypeProfiler {
            space,
            n,
            vals: (0..(1u64 << nvars)).collect(),
            allowed: None,
            seen: Vec::new(),
            seen_set: FxHashMap::default(),
            halt_on_dead_end: false,
        }
    }

    pub fn restricted(mut self, allowed: &'a FxHashMap<TypeId, ()>) -> Self {
        self.allowed = Some(allowed);
        self
    }

    pub fn halting_on_dead_end(mut self) -> Self {
        self.halt_on_dead_end = true;
        self
    }
}

impl Profiler for TypeProfiler<'_> {
    type Abs = Vec<TypeId>;

    fn empty(&self) -> Vec<TypeId> {
        Vec::new()
    }

    fn join(&self, a: &Vec<TypeId>, b: &Vec<TypeId>) -> Vec<TypeId> {
        let mut c = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                c.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                c.push(b[j]);
                j += 1;
            } else {
                c.push(a[i]);
                i += 1;
                j += 1;
            }
        }
        c
    }

    fn valuations(&self) -> Vec<Valuation> {
        self.vals.clone()
    }

    fn world(&mut self, v: Valuation, upper: &Vec<TypeId>, succ: &Vec<TypeId>) -> Option<Vec<TypeId>> {
        let t = self.space.intern(self.n, v, upper, succ);
        if self.seen_set.insert(t, ()).is_none() {
            self.seen.push(t);
        }
        if let Some(allowed) = self.allowed {
            if !allowed.contains_key(&t) {
                return None;
            }
        }
        Some(vec![self.space.truncate(self.n, t)])
    }

    fn halt_on_dead_end(&self) -> bool {
        self.halt_on_dead_end
    }
}
