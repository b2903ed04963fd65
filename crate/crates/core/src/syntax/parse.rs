use super::formula::{is_gensym, Formula, Var};
use super::hybrid::{Cml, Hybrid};
use super::{Signature, KEYWORDS};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Colon,
    Comma,
    Dot,
    Equals,
    Arrow,
    Iff,
    And,
    Or,
    Not,
    At,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &text[i..];
        let (tok, len) = if c.is_ascii_alphabetic() || c == b'_' {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'\'')
                .count();
            (Tok::Ident(rest[..len].to_string()), len)
        } else if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("/\\") {
            (Tok::And, 2)
        } else if rest.starts_with("\\/") {
            (Tok::Or, 2)
        } else {
            let t = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b':' => Tok::Colon,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'=' => Tok::Equals,
                b'~' => Tok::Not,
                b'@' => Tok::At,
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(Error::Syntax { pos: start, msg: format!("unexpected character `{ch}`") });
                }
            };
            (t, 1)
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
    allow_gensym: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature, allow_gensym: bool) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, sig, allow_gensym })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn var(&mut self) -> Result<Var> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if KEYWORDS.contains(&name.as_str()) {
                    return self.err(format!("keyword `{name}` used as a variable"));
                }
                if is_gensym(&name) && !self.allow_gensym {
                    return Err(Error::Reserved(name));
                }
                self.bump();
                Ok(name)
            }
            _ => self.err("expected a variable"),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.imp()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let lhs = self.and()?;
        if self.eat(&Tok::Or) {
            let rhs = self.or()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        if self.eat(&Tok::And) {
            let rhs = self.and()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            let universal = self.is_keyword("forall");
            self.bump();
            let x = self.var()?;
            self.expect(Tok::Dot, "`.` after the bound variable")?;
            let body = self.formula()?;
            return Ok(if universal { Formula::forall(x, body) } else { Formula::exists(x, body) });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        if self.is_keyword("bot") {
            self.bump();
            return Ok(Formula::Bot);
        }
        if self.is_keyword("top") {
            self.bump();
            return Ok(Formula::top());
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        let Tok::Ident(name) = self.peek().clone() else {
            return self.err("expected a formula");
        };
        match self.peek2().clone() {
            Tok::LParen => {
                self.bump();
                self.bump();
                let arity = *self.sig.preds.get(&name).ok_or_else(|| Error::Undeclared(name.clone()))?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.var()?);
                    while self.eat(&Tok::Comma) {
                        args.push(self.var()?);
                    }
                }
                self.expect(Tok::RParen, "`)` closing the argument list")?;
                if args.len() != arity {
                    return Err(Error::Arity { name, expected: arity, found: args.len() });
                }
                Ok(Formula::Pred(name, args))
            }
            Tok::Equals => {
                let a = self.var()?;
                self.bump();
                let b = self.var()?;
                Ok(Formula::Eq(a, b))
            }
            Tok::Ident(op) => {
                let subject = self.var()?;
                self.bump();
                let arity = self.sig.op_arity(&op).ok_or_else(|| Error::Undeclared(op.clone()))?;
                let mut boxes = Vec::new();
                while self.eat(&Tok::LBrack) {
                    let y = self.var()?;
                    self.expect(Tok::Colon, "`:` after the comprehension variable")?;
                    let body = self.formula()?;
                    self.expect(Tok::RBrack, "`]` closing the box")?;
                    boxes.push((y, body));
                }
                if boxes.len() != arity {
                    return Err(Error::Arity { name: op, expected: arity, found: boxes.len() });
                }
                Ok(Formula::Modal { subject, op, boxes })
            }
            _ => {
                self.bump();
                self.err("expected `=`, `(` or an operator after the identifier")
            }
        }
    }

    fn hformula(&mut self) -> Result<Hybrid> {
        let lhs = self.himp()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.hformula()?;
            return Ok(h_and(Hybrid::imp(lhs.clone(), rhs.clone()), Hybrid::imp(rhs, lhs)));
        }
        Ok(lhs)
    }

    fn himp(&mut self) -> Result<Hybrid> {
        let lhs = self.hor()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.himp()?;
            return Ok(Hybrid::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn hor(&mut self) -> Result<Hybrid> {
        let lhs = self.hand()?;
        if self.eat(&Tok::Or) {
            let rhs = self.hor()?;
            return Ok(Hybrid::imp(Hybrid::not(lhs), rhs));
        }
        Ok(lhs)
    }

    fn hand(&mut self) -> Result<Hybrid> {
        let lhs = self.hunary()?;
        if self.eat(&Tok::And) {
            let rhs = self.hand()?;
            return Ok(h_and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn hunary(&mut self) -> Result<Hybrid> {
        if self.eat(&Tok::Not) {
            return Ok(Hybrid::not(self.hunary()?));
        }
        if self.eat(&Tok::At) {
            let x = self.var()?;
            return Ok(Hybrid::at(x, self.hunary()?));
        }
        if self.is_keyword("down") || self.is_keyword("forallw") {
            let down = self.is_keyword("down");
            self.bump();
            let x = self.var()?;
            self.expect(Tok::Dot, "`.` after the bound variable")?;
            let body = self.hformula()?;
            return Ok(if down { Hybrid::down(x, body) } else { Hybrid::forallw(x, body) });
        }
        if self.is_keyword("A") {
            self.bump();
            return Ok(Hybrid::global(self.hunary()?));
        }
        self.hatom()
    }

    fn hatom(&mut self) -> Result<Hybrid> {
        if self.is_keyword("bot") {
            self.bump();
            return Ok(Hybrid::Bot);
        }
        if self.is_keyword("top") {
            self.bump();
            return Ok(Hybrid::imp(Hybrid::Bot, Hybrid::Bot));
        }
        if self.eat(&Tok::LParen) {
            let f = self.hformula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        let Tok::Ident(name) = self.peek().clone() else {
            return self.err("expected a formula");
        };
        if let Some(arity) = self.sig.op_arity(&name) {
            self.bump();
            let args = match arity {
                0 => Vec::new(),
                1 => vec![self.hunary()?],
                n => {
                    self.expect(Tok::LParen, "`(` opening the operator arguments")?;
                    let mut args = vec![self.hformula()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.hformula()?);
                    }
                    self.expect(Tok::RParen, "`)` closing the operator arguments")?;
                    if args.len() != n {
                        return Err(Error::Arity { name, expected: n, found: args.len() });
                    }
                    args
                }
            };
            return Ok(Hybrid::Modal(name, args));
        }
        if let Some(&arity) = self.sig.preds.get(&name) {
            if arity != 1 {
                return Err(Error::Arity { name, expected: 1, found: arity });
            }
            self.bump();
            return Ok(Hybrid::Atom(name));
        }
        Ok(Hybrid::Nominal(self.var()?))
    }
}

fn h_and(a: Hybrid, b: Hybrid) -> Hybrid {
    Hybrid::not(Hybrid::imp(a, Hybrid::not(b)))
}

/// Parses user text; reserved gensym names are rejected.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    parse_with(text, sig, false)
}

/// Parses machine-produced text, which may contain gensyms.
pub fn parse_formula_internal(text: &str, sig: &Signature) -> Result<Formula> {
    parse_with(text, sig, true)
}

fn parse_with(text: &str, sig: &Signature, allow_gensym: bool) -> Result<Formula> {
    let mut p = Parser::new(text, sig, allow_gensym)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_hybrid(text: &str, sig: &Signature) -> Result<Hybrid> {
    hybrid_with(text, sig, false)
}

pub fn parse_hybrid_internal(text: &str, sig: &Signature) -> Result<Hybrid> {
    hybrid_with(text, sig, true)
}

fn hybrid_with(text: &str, sig: &Signature, allow_gensym: bool) -> Result<Hybrid> {
    let mut p = Parser::new(text, sig, allow_gensym)?;
    let f = p.hformula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_cml(text: &str, sig: &Signature) -> Result<Cml> {
    parse_hybrid(text, sig)?.to_cml()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Bound;

    fn sig() -> Signature {
        Signature::new()
            .with_op("dia", 1, vec![Bound::Fin(1)])
            .with_op("cond", 2, vec![Bound::Inf, Bound::Fin(1)])
            .with_op("p", 0, vec![])
            .with_pred("P", 1)
            .with_pred("R", 2)
    }

    #[test]
    fn modal_atom() {
        let f = parse_formula("x dia [z : z = y]", &sig()).unwrap();
        assert_eq!(f, Formula::modal("x", "dia", vec![("z".into(), Formula::eq("z", "y"))]));
    }

    #[test]
    fn quantifier_and_implication() {
        let f = parse_formula("forall x. (P(x) -> bot)", &sig()).unwrap();
        assert_eq!(f, Formula::forall("x", Formula::imp(Formula::pred("P", &["x"]), Formula::Bot)));
    }

    #[test]
    fn unclosed_box_is_a_syntax_error() {
        assert!(matches!(parse_formula("x dia [z : z = y", &sig()), Err(Error::Syntax { .. })));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_formula("Q(x)", &sig()), Err(Error::Undeclared(_))));
        assert!(matches!(parse_formula("R(x)", &sig()), Err(Error::Arity { .. })));
        assert!(matches!(parse_formula("x dia", &sig()), Err(Error::Arity { .. })));
        assert!(matches!(parse_formula("P(_g0)", &sig()), Err(Error::Reserved(_))));
        assert!(parse_formula_internal("P(_g0)", &sig()).is_ok());
        assert!(matches!(parse_formula("P(x) P(y)", &sig()), Err(Error::Syntax { .. })));
    }

    #[test]
    fn sugar_expands() {
        let s = sig();
        let p = Formula::pred("P", &["x"]);
        let q = Formula::pred("P", &["y"]);
        assert_eq!(parse_formula("~P(x)", &s).unwrap(), Formula::not(p.clone()));
        assert_eq!(parse_formula("P(x) /\\ P(y)", &s).unwrap(), Formula::and(p.clone(), q.clone()));
        assert_eq!(parse_formula("P(x) \\/ P(y)", &s).unwrap(), Formula::or(p.clone(), q.clone()));
        assert_eq!(parse_formula("P(x) <-> P(y)", &s).unwrap(), Formula::iff(p.clone(), q.clone()));
        assert_eq!(parse_formula("exists x. P(x)", &s).unwrap(), Formula::exists("x", p));
        assert_eq!(parse_formula("top", &s).unwrap(), Formula::top());
    }

    #[test]
    fn nullary_and_binary_modalities() {
        let s = sig();
        assert_eq!(parse_formula("x p", &s).unwrap(), Formula::modal("x", "p", vec![]));
        let f = parse_formula("x cond [y : P(y)] [z : z = u]", &s).unwrap();
        assert!(matches!(f, Formula::Modal { ref boxes, .. } if boxes.len() == 2));
    }

    #[test]
    fn hybrid_grammar() {
        let s = sig();
        let f = parse_hybrid("down z. dia z", &s).unwrap();
        assert_eq!(f, Hybrid::down("z", Hybrid::Modal("dia".into(), vec![Hybrid::Nominal("z".into())])));
        let g = parse_hybrid("@x A P", &s).unwrap();
        assert_eq!(g, Hybrid::at("x", Hybrid::global(Hybrid::Atom("P".into()))));
        let h = parse_hybrid("cond(P, dia P)", &s).unwrap();
        assert!(matches!(h, Hybrid::Modal(ref op, ref a) if op == "cond" && a.len() == 2));
        assert!(parse_cml("dia dia P", &s).is_ok());
        assert!(parse_cml("dia z", &s).is_err());
    }
}
