use std::collections::HashMap;
use std::fmt;

use super::{render_shared, render_with, Formula, Kind, RenderMode, VarContext};
use crate::error::Error;

/// A total map from the variables of a context to formulas over the same context.
#[derive(Clone, PartialEq, Eq)]
pub struct Substitution {
    ctx: VarContext,
    images: Vec<Formula>,
}

impl Substitution {
    pub fn identity(ctx: &VarContext) -> Self {
        Substitution {
            ctx: ctx.clone(),
            images: (0..ctx.len()).map(Formula::var).collect(),
        }
    }

    /// One image per context variable, in context order.
    pub fn new(ctx: &VarContext, images: Vec<Formula>) -> Result<Self, Error> {
        if images.len() != ctx.len() {
            return Err(Error::ContextMismatch(format!(
                "{} images for a context of {} variables",
                images.len(),
                ctx.len()
            )));
        }
        for img in &images {
            if let Some(i) = img.max_var() {
                if i >= ctx.len() {
                    return Err(Error::ContextMismatch(format!(
                        "image mentions variable index {i} outside the context"
                    )));
                }
            }
        }
        Ok(Substitution { ctx: ctx.clone(), images })
    }

    /// Identity except on the listed variables.
    pub fn from_pairs(ctx: &VarContext, pairs: impl IntoIterator<Item = (usize, Formula)>) -> Result<Self, Error> {
        let mut images: Vec<Formula> = (0..ctx.len()).map(Formula::var).collect();
        for (i, f) in pairs {
            if i >= ctx.len() {
                return Err(Error::ContextMismatch(format!("variable index {i} outside the context")));
            }
            images[i] = f;
        }
        Substitution::new(ctx, images)
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn image(&self, i: usize) -> &Formula {
        &self.images[i]
    }

    pub fn images(&self) -> &[Formula] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, f)| matches!(f.kind(), Kind::Var(j) if *j as usize == i))
    }

    /// Simultaneous replacement of every variable occurrence.
    pub fn apply(&self, f: &Formula) -> Formula {
        let mut memo = HashMap::new();
        self.apply_memo(f, &mut memo)
    }

    fn apply_memo(&self, f: &Formula, memo: &mut HashMap<usize, Formula>) -> Formula {
        if let Some(r) = memo.get(&f.ptr_id()) {
            return r.clone();
        }
        for node in f.dag_nodes() {
            if memo.contains_key(&node.ptr_id()) {
                continue;
            }
            let get = |g: &Formula, memo: &HashMap<usize, Formula>| memo[&g.ptr_id()].clone();
            let out = match node.kind() {
                Kind::Var(i) => self.images[*i as usize].clone(),
                Kind::Top | Kind::Bot => node.clone(),
                Kind::Not(a) => Formula::not(get(a, memo)),
                Kind::And(a, b) => Formula::and(get(a, memo), get(b, memo)),
                Kind::Or(a, b) => Formula::or(get(a, memo), get(b, memo)),
                Kind::Implies(a, b) => Formula::implies(get(a, memo), get(b, memo)),
                Kind::Box(m, a) => Formula::boxed(*m, get(a, memo)),
            };
            memo.insert(node.ptr_id(), out);
        }
        memo[&f.ptr_id()].clone()
    }

    /// `p ↦ self(other(p))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut memo = HashMap::new();
        let images = other.images.iter().map(|g| self.apply_memo(g, &mut memo)).collect();
        Substitution { ctx: self.ctx.clone(), images }
    }

    /// Images with shared subformulas named once; see [`render_shared`].
    pub fn render_shared(&self) -> RenderedSubstitution {
        let refs: Vec<&Formula> = self.images.iter().collect();
        let r = render_shared(&refs, Some(&self.ctx), RenderMode::Sugared);
        RenderedSubstitution {
            images: (0..self.images.len()).map(|i| self.ctx.name(i).to_string()).zip(r.roots).collect(),
            definitions: r.definitions,
        }
    }

    /// `{"images": {var: text}, "definitions": [{"name", "formula"}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let r = self.render_shared();
        let images: serde_json::Map<_, _> = r.images.into_iter().map(|(k, v)| (k, serde_json::Value::String(v))).collect();
        let defs: Vec<_> = r.definitions.into_iter().map(|(n, f)| serde_json::json!({ "name": n, "formula": f })).collect();
        serde_json::json!({ "images": images, "definitions": defs })
    }

    /// Images rendered inline with the context's variable names.
    /// The text is exponential in the image DAG size; prefer [`Self::render_shared`].
    pub fn to_strings(&self) -> Vec<(String, String)> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, f)| {
                (
                    self.ctx.name(i).to_string(),
                    render_with(f, Some(&self.ctx), RenderMode::Sugared),
                )
            })
            .collect()
    }

    /// Largest image depth.
    pub fn depth(&self) -> u32 {
        self.images.iter().map(Formula::depth).max().unwrap_or(0)
    }
}

/// Output of [`Substitution::render_shared`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderedSubstitution {
    /// `(variable, image text)`; texts may mention definition names.
    pub images: Vec<(String, String)>,
    /// `($k, text)` in dependency order.
    pub definitions: Vec<(String, String)>,
}

impl std::fmt::Display for RenderedSubstitution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, v) in self.definitions.iter().chain(&self.images) {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "  {k} := {v}")?;
        }
        Ok(())
    }
}

/// `compose(t, s)` is the substitution `p ↦ t(s(p))`.
pub fn compose(t: &Substitution, s: &Substitution) -> Substitution {
    t.compose(s)
}

/// `apply_subst(s, f)`.
pub fn apply_subst(s: &Substitution, f: &Formula) -> Formula {
    s.apply(f)
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, img) in self.images.iter().enumerate() {
            m.entry(&self.ctx.name(i), img);
        }
        m.finish()
    }
}
