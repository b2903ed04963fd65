//! Text syntax for rank-1 formulas over a carrier `{0, .., n-1}`:
//! `op{0,2}{1}`, `bot`, `top`, `~F`, `F -> G` and parentheses.

use cpl_core::onestep::Rank1;
use cpl_core::structures::Mask;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    size: usize,
}

impl Parser<'_> {
    fn skip(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T, String> {
        Err(format!("rank-1 formula, offset {}: {msg}", self.pos))
    }

    fn ident(&mut self) -> Option<&str> {
        self.skip();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if len == 0 || rest.starts_with(|c: char| c.is_ascii_digit()) {
            return None;
        }
        self.pos += len;
        Some(&self.src[self.pos - len..self.pos])
    }

    fn set(&mut self) -> Result<Mask, String> {
        let mut m = 0;
        if self.eat("}") {
            return Ok(m);
        }
        loop {
            self.skip();
            let rest = &self.src[self.pos..];
            let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let i: usize = rest[..len].parse().or_else(|_| self.err("state index expected"))?;
            if i >= self.size {
                return self.err(&format!("state {i} outside a carrier of size {}", self.size));
            }
            self.pos += len;
            m |= 1 << i;
            if self.eat("}") {
                return Ok(m);
            }
            if !self.eat(",") {
                return self.err("expected `,` or `}`");
            }
        }
    }

    fn unary(&mut self) -> Result<Rank1, String> {
        if self.eat("~") {
            return Ok(Rank1::not(self.unary()?));
        }
        if self.eat("(") {
            let f = self.imp()?;
            return if self.eat(")") { Ok(f) } else { self.err("expected `)`") };
        }
        let Some(name) = self.ident().map(str::to_string) else {
            return self.err("expected a formula");
        };
        match name.as_str() {
            "bot" => return Ok(Rank1::Bot),
            "top" => return Ok(Rank1::not(Rank1::Bot)),
            _ => {}
        }
        let mut args = Vec::new();
        while self.eat("{") {
            args.push(self.set()?);
        }
        if args.is_empty() {
            return self.err(&format!("`{name}` needs at least one argument set"));
        }
        Ok(Rank1::modal(&name, &args))
    }

    fn imp(&mut self) -> Result<Rank1, String> {
        let a = self.unary()?;
        if self.eat("->") {
            Ok(Rank1::imp(a, self.imp()?))
        } else {
            Ok(a)
        }
    }
}

pub fn parse(src: &str, size: usize) -> Result<Rank1, String> {
    let mut p = Parser { src, pos: 0, size };
    let f = p.imp()?;
    p.skip();
    if p.pos < src.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_connectives_and_sets() {
        let f = parse("~dia{0,2} -> cond{}{1}", 3).unwrap();
        assert_eq!(f, Rank1::imp(Rank1::not(Rank1::modal("dia", &[0b101])), Rank1::modal("cond", &[0, 0b10])));
        assert_eq!(parse("(top)", 1).unwrap(), Rank1::not(Rank1::Bot));
    }

    #[test]
    fn rejects_out_of_range_states() {
        assert!(parse("dia{3}", 3).is_err());
        assert!(parse("dia", 3).is_err());
        assert!(parse("dia{0} dia{1}", 3).is_err());
    }
}
