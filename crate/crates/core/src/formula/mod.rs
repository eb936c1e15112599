//! Bimodal formulas over a fixed, finite variable context.
//!
//! Formulas are immutable DAGs: subterms are reference counted and shared, so
//! substitution and composition never copy structure that they do not change.
//! Every node caches its modal depth, a structural hash and its tree size.

mod parse;
mod render;
mod subst;

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub use parse::{parse, parse_auto, scan_variables};
pub use render::{render, render_shared, render_with, RenderMode, SharedRendering, INLINE_LIMIT};
pub use subst::{apply_subst, compose, RenderedSubstitution, Substitution};

use crate::error::Error;

/// The two modalities `[0]` and `[1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    Zero,
    One,
}

impl Modality {
    pub fn index(self) -> usize {
        match self {
            Modality::Zero => 0,
            Modality::One => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Modality> {
        match i {
            0 => Some(Modality::Zero),
            1 => Some(Modality::One),
            _ => None,
        }
    }

    pub const BOTH: [Modality; 2] = [Modality::Zero, Modality::One];
}

/// An ordered list of distinct propositional variables `p<digits>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarContext {
    names: Vec<String>,
}

impl VarContext {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, Error> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for n in &names {
            if !is_ident(n) {
                return Err(Error::InvalidContext(format!("`{n}` is not a variable name")));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidContext(format!("duplicate variable `{n}`")));
            }
        }
        if names.len() > 64 {
            return Err(Error::InvalidContext("at most 64 variables are supported".into()));
        }
        Ok(VarContext { names })
    }

    /// `p1, …, pn`.
    pub fn standard(n: usize) -> Self {
        VarContext {
            names: (1..=n).map(|i| format!("p{i}")).collect(),
        }
    }

    /// Context from a set of names, ordered by their numeric suffix.
    pub fn canonical<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self, Error> {
        let mut v: Vec<String> = names.into_iter().map(|s| s.as_ref().to_string()).collect();
        v.sort_by(|a, b| ident_key(a).cmp(&ident_key(b)));
        v.dedup();
        VarContext::new(v)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Union of two contexts in canonical order.
    pub fn union(&self, other: &VarContext) -> Result<VarContext, Error> {
        VarContext::canonical(self.names.iter().chain(other.names.iter()))
    }

    /// Number of valuations of the context.
    pub fn valuation_count(&self) -> u64 {
        1u64 << self.names.len()
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    s.len() > 1 && s.starts_with('p') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

fn ident_key(s: &str) -> (usize, String) {
    let digits = s.trim_start_matches('p').trim_start_matches('0');
    (digits.len(), digits.to_string())
}

#[derive(Clone, Debug)]
pub enum Kind {
    Var(u32),
    Top,
    Bot,
    Not(Formula),
    And(Formula, Formula),
    Or(Formula, Formula),
    Implies(Formula, Formula),
    Box(Modality, Formula),
}

struct Node {
    kind: Kind,
    hash: u64,
    depth: u32,
    size: u64,
}

/// A bimodal formula.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

fn mix(h: u64, x: u64) -> u64 {
    // splitmix-style finalizer over a running state
    let mut z = h ^ x.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Formula {
    fn mk(kind: Kind) -> Formula {
        let (hash, depth, size) = match &kind {
            Kind::Var(i) => (mix(1, *i as u64), 0, 1),
            Kind::Top => (mix(2, 0), 0, 1),
            Kind::Bot => (mix(3, 0), 0, 1),
            Kind::Not(a) => (mix(4, a.hash()), a.depth(), a.size().saturating_add(1)),
            Kind::And(a, b) => (
                mix(mix(5, a.hash()), b.hash()),
                a.depth().max(b.depth()),
                a.size().saturating_add(b.size()).saturating_add(1),
            ),
            Kind::Or(a, b) => (
                mix(mix(6, a.hash()), b.hash()),
                a.depth().max(b.depth()),
                a.size().saturating_add(b.size()).saturating_add(1),
            ),
            Kind::Implies(a, b) => (
                mix(mix(7, a.hash()), b.hash()),
                a.depth().max(b.depth()),
                a.size().saturating_add(b.size()).saturating_add(1),
            ),
            Kind::Box(m, a) => (
                mix(mix(8, m.index() as u64), a.hash()),
                a.depth() + 1,
                a.size().saturating_add(1),
            ),
        };
        Formula(Arc::new(Node { kind, hash, depth, size }))
    }

    pub fn var(i: usize) -> Formula {
        Formula::mk(Kind::Var(i as u32))
    }

    pub fn top() -> Formula {
        Formula::mk(Kind::Top)
    }

    pub fn bot() -> Formula {
        Formula::mk(Kind::Bot)
    }

    pub fn not(a: Formula) -> Formula {
        Formula::mk(Kind::Not(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::mk(Kind::And(a, b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::mk(Kind::Or(a, b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::mk(Kind::Implies(a, b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn boxed(m: Modality, a: Formula) -> Formula {
        Formula::mk(Kind::Box(m, a))
    }

    /// `<m>a`, stored as `~[m]~a`.
    pub fn diamond(m: Modality, a: Formula) -> Formula {
        Formula::not(Formula::boxed(m, Formula::not(a)))
    }

    /// Left-nested conjunction; `T` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; `F` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bot)
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Modal depth.
    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    /// Size of the formula as a tree (saturating).
    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    fn hash(&self) -> u64 {
        self.0.hash
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self.kind() {
            Kind::Var(_) | Kind::Top | Kind::Bot => vec![],
            Kind::Not(a) | Kind::Box(_, a) => vec![a],
            Kind::And(a, b) | Kind::Or(a, b) | Kind::Implies(a, b) => vec![a, b],
        }
    }

    /// Distinct DAG nodes, children before parents.
    pub fn dag_nodes(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack: Vec<(Formula, bool)> = vec![(self.clone(), false)];
        while let Some((f, expanded)) = stack.pop() {
            if expanded {
                out.push(f);
                continue;
            }
            if !seen.insert(f.ptr_id()) {
                continue;
            }
            stack.push((f.clone(), true));
            for c in f.children().into_iter().rev() {
                if !seen.contains(&c.ptr_id()) {
                    stack.push((c.clone(), false));
                }
            }
        }
        out
    }

    /// Number of distinct DAG nodes.
    pub fn dag_size(&self) -> usize {
        self.dag_nodes().len()
    }

    /// Largest variable index occurring, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.dag_nodes()
            .iter()
            .filter_map(|f| match f.kind() {
                Kind::Var(i) => Some(*i as usize),
                _ => None,
            })
            .max()
    }

    pub fn is_variable_free(&self) -> bool {
        self.max_var().is_none()
    }

    /// True if no `[m]` occurs.
    pub fn free_of(&self, m: Modality) -> bool {
        !self
            .dag_nodes()
            .iter()
            .any(|f| matches!(f.kind(), Kind::Box(k, _) if *k == m))
    }

    /// Matches `~[m]~a` and returns `(m, a)`.
    pub fn as_diamond(&self) -> Option<(Modality, &Formula)> {
        if let Kind::Not(inner) = self.kind() {
            if let Kind::Box(m, body) = inner.kind() {
                if let Kind::Not(a) = body.kind() {
                    return Some((*m, a));
                }
            }
        }
        None
    }
}

pub fn depth(f: &Formula) -> u32 {
    f.depth()
}

fn shallow_eq(a: &Formula, b: &Formula, pending: &mut Vec<(Formula, Formula)>) -> bool {
    use Kind::*;
    match (a.kind(), b.kind()) {
        (Var(x), Var(y)) => x == y,
        (Top, Top) | (Bot, Bot) => true,
        (Not(x), Not(y)) => {
            pending.push((x.clone(), y.clone()));
            true
        }
        (Box(m, x), Box(n, y)) => {
            pending.push((x.clone(), y.clone()));
            m == n
        }
        (And(x1, x2), And(y1, y2)) | (Or(x1, x2), Or(y1, y2)) | (Implies(x1, x2), Implies(y1, y2)) => {
            pending.push((x1.clone(), y1.clone()));
            pending.push((x2.clone(), y2.clone()));
            true
        }
        _ => false,
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.hash() != other.hash() || self.depth() != other.depth() {
            return false;
        }
        // Memoized over node pairs so shared DAGs compare in linear time.
        let mut visited = HashSet::new();
        let mut pending = vec![(self.clone(), other.clone())];
        while let Some((a, b)) = pending.pop() {
            if a.ptr_eq(&b) || !visited.insert((a.ptr_id(), b.ptr_id())) {
                continue;
            }
            if a.hash() != b.hash() || !shallow_eq(&a, &b, &mut pending) {
                return false;
            }
        }
        true
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size() > 400 {
            write!(f, "<formula: {} dag nodes, depth {}>", self.dag_size(), self.depth())
        } else {
            f.write_str(&render(self))
        }
    }
}
