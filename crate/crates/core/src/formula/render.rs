use std::collections::HashMap;

use serde::Serialize;

use super::{Formula, Kind, VarContext};

/// Output style for [`render_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RenderMode {
    /// Minimal parentheses, `~[i]~a` printed as `<i>a`.
    #[default]
    Sugared,
    /// Minimal parentheses, no diamond sugar.
    Plain,
    /// Every binary connective parenthesized, no diamond sugar.
    FullyParenthesized,
}

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Renders with variable names `p1, p2, …` by index.
pub fn render(f: &Formula) -> String {
    render_with(f, None, RenderMode::Sugared)
}

/// Renders with names taken from `ctx` when given.
pub fn render_with(f: &Formula, ctx: Option<&VarContext>, mode: RenderMode) -> String {
    let w = Writer { ctx, mode, names: HashMap::new() };
    let mut out = String::new();
    w.write(f, IMPLIES, &mut out);
    out
}

/// Tree size up to which [`render_shared`] prints everything inline.
pub const INLINE_LIMIT: u64 = 4096;
/// Shared subformulas of at most this tree size stay inline.
const NAME_MIN_SIZE: u64 = 12;

/// Formulas printed with repeated subformulas named `$1, $2, …` and defined once.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct SharedRendering {
    /// In dependency order: a definition mentions only earlier names.
    pub definitions: Vec<(String, String)>,
    /// One text per input formula.
    pub roots: Vec<String>,
}

impl SharedRendering {
    /// `$k` names substituted back; exponential in the worst case.
    pub fn is_inline(&self) -> bool {
        self.definitions.is_empty()
    }
}

/// Renders `fs` inline when their total tree size is at most [`INLINE_LIMIT`],
/// otherwise names every subformula that is shared and not tiny, so the output
/// is linear in the number of distinct subformulas.
pub fn render_shared(fs: &[&Formula], ctx: Option<&VarContext>, mode: RenderMode) -> SharedRendering {
    let total: u64 = fs.iter().fold(0u64, |a, f| a.saturating_add(f.size()));
    if total <= INLINE_LIMIT {
        return SharedRendering { definitions: vec![], roots: fs.iter().map(|f| render_with(f, ctx, mode)).collect() };
    }
    let mut order: Vec<Formula> = Vec::new();
    let mut refs: HashMap<Formula, usize> = HashMap::new();
    for f in fs {
        for node in f.dag_nodes() {
            if !refs.contains_key(&node) {
                refs.insert(node.clone(), 0);
                order.push(node);
            }
        }
    }
    for node in &order {
        for c in node.children() {
            *refs.get_mut(c).expect("children precede parents") += 1;
        }
    }
    for f in fs {
        *refs.get_mut(*f).expect("root collected") += 1;
    }
    let mut w = Writer { ctx, mode, names: HashMap::new() };
    let mut definitions = Vec::new();
    for node in &order {
        if refs[node] >= 2 && node.size() > NAME_MIN_SIZE {
            let mut text = String::new();
            w.write(node, IMPLIES, &mut text);
            let name = format!("${}", definitions.len() + 1);
            definitions.push((name.clone(), text));
            w.names.insert(node.clone(), name);
        }
    }
    let roots = fs
        .iter()
        .map(|f| {
            let mut out = String::new();
            w.write(f, IMPLIES, &mut out);
            out
        })
        .collect();
    SharedRendering { definitions, roots }
}

struct Writer<'a> {
    ctx: Option<&'a VarContext>,
    mode: RenderMode,
    names: HashMap<Formula, String>,
}

impl Writer<'_> {
    fn write(&self, f: &Formula, prec: u8, out: &mut String) {
        if let Some(name) = self.names.get(f) {
            out.push_str(name);
            return;
        }
        let (ctx, mode) = (self.ctx, self.mode);
        let full = mode == RenderMode::FullyParenthesized;
        match f.kind() {
            Kind::Var(i) => match ctx {
                Some(c) if (*i as usize) < c.len() => out.push_str(c.name(*i as usize)),
                _ => {
                    out.push('p');
                    out.push_str(&(i + 1).to_string());
                }
            },
            Kind::Top => out.push('T'),
            Kind::Bot => out.push('F'),
            Kind::Not(a) => {
                if mode == RenderMode::Sugared {
                    if let Some((m, body)) = f.as_diamond() {
                        out.push('<');
                        out.push_str(&m.index().to_string());
                        out.push('>');
                        self.write(body, UNARY, out);
                        return;
                    }
                }
                out.push('~');
                self.write(a, UNARY, out);
            }
            Kind::Box(m, a) => {
                out.push('[');
                out.push_str(&m.index().to_string());
                out.push(']');
                self.write(a, UNARY, out);
            }
            Kind::And(a, b) => self.binary(a, " & ", b, (AND, UNARY), full || prec > AND, out),
            Kind::Or(a, b) => self.binary(a, " | ", b, (OR, AND), full || prec > OR, out),
            Kind::Implies(a, b) => self.binary(a, " -> ", b, (OR, IMPLIES), full || prec > IMPLIES, out),
        }
    }

    fn binary(&self, a: &Formula, op: &str, b: &Formula, (left, right): (u8, u8), paren: bool, out: &mut String) {
        if paren {
            out.push('(');
        }
        self.write(a, left, out);
        out.push_str(op);
        self.write(b, right, out);
        if paren {
            out.push(')');
        }
    }
}
