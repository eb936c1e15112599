use super::{is_ident, Formula, Modality, VarContext};
use crate::error::Error;

/// Parses `text` against a fixed variable context.
pub fn parse(text: &str, ctx: &VarContext) -> Result<Formula, Error> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, ctx };
    let f = p.equivalence()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses `text` using the context of the variables it mentions, in canonical order.
pub fn parse_auto(text: &str) -> Result<(Formula, VarContext), Error> {
    let ctx = VarContext::canonical(scan_variables(text))?;
    let f = parse(text, &ctx)?;
    Ok((f, ctx))
}

/// Identifiers `p<digits>` occurring in `text`, in order of first occurrence.
pub fn scan_variables(text: &str) -> Vec<String> {
    let b = text.as_bytes();
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'p' {
            let mut j = i + 1;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            let name = &text[i..j];
            if is_ident(name) && !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a VarContext,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    /// `a <-> b` abbreviates `(a -> b) & (b -> a)`; binds loosest, groups to the right.
    fn equivalence(&mut self) -> Result<Formula, Error> {
        let lhs = self.implication()?;
        if self.eat("<->") {
            let rhs = self.equivalence()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> Result<Formula, Error> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, Error> {
        let mut acc = self.conjunction()?;
        while self.eat("|") {
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, Error> {
        let mut acc = self.unary()?;
        while self.eat("&") {
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn modality(&mut self, close: u8) -> Result<Modality, Error> {
        self.skip_ws();
        let m = match self.src.get(self.pos) {
            Some(b'0') => Modality::Zero,
            Some(b'1') => Modality::One,
            _ => return Err(self.error("expected modality index 0 or 1")),
        };
        self.pos += 1;
        self.skip_ws();
        if self.src.get(self.pos) != Some(&close) {
            return Err(self.error(&format!("expected `{}`", close as char)));
        }
        self.pos += 1;
        Ok(m)
    }

    fn unary(&mut self) -> Result<Formula, Error> {
        // Prefix chains are consumed iteratively so that long chains do not grow the stack.
        enum Prefix {
            Not,
            Box(Modality),
            Diamond(Modality),
        }
        let mut prefixes = Vec::new();
        loop {
            match self.peek() {
                Some(b'~') => {
                    self.pos += 1;
                    prefixes.push(Prefix::Not);
                }
                Some(b'[') => {
                    self.pos += 1;
                    prefixes.push(Prefix::Box(self.modality(b']')?));
                }
                Some(b'<') => {
                    self.pos += 1;
                    prefixes.push(Prefix::Diamond(self.modality(b'>')?));
                }
                _ => break,
            }
        }
        let mut f = self.atom()?;
        for p in prefixes.into_iter().rev() {
            f = match p {
                Prefix::Not => Formula::not(f),
                Prefix::Box(m) => Formula::boxed(m, f),
                Prefix::Diamond(m) => Formula::diamond(m, f),
            };
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Formula, Error> {
        match self.peek() {
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Some(b'F') => {
                self.pos += 1;
                Ok(Formula::bot())
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.equivalence()?;
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                Ok(f)
            }
            Some(b'p') => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos == start + 1 {
                    self.pos = start;
                    return Err(self.error("expected digits after `p`"));
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.ctx.index_of(name) {
                    Some(i) => Ok(Formula::var(i)),
                    None => Err(Error::UnknownVariable(name.to_string())),
                }
            }
            Some(_) => Err(self.error("expected a formula")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
