use super::formula::Formula;
use super::hybrid::{Cml, Hybrid};

// A quantifier scope left open at the top level extends as far right as
// possible when re-parsed, so such renderings are parenthesized in
// non-final positions.
fn open_ended(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '.' if depth == 0 => return true,
            _ => {}
        }
    }
    false
}

fn guard(s: String) -> String {
    if open_ended(&s) {
        format!("({s})")
    } else {
        s
    }
}

/// Renders with sugar restored where the core shape allows it.
pub fn render_formula(f: &Formula) -> String {
    if f.is_top() {
        return "top".into();
    }
    if let Some((x, body)) = f.as_exists() {
        return format!("exists {x}. {}", render_formula(body));
    }
    if let Some((a, b)) = f.as_iff() {
        return format!("({} <-> {})", guard(render_formula(a)), render_formula(b));
    }
    if let Some((a, b)) = f.as_and() {
        return format!("({} /\\ {})", guard(render_formula(a)), render_formula(b));
    }
    if let Some(a) = f.as_not() {
        return format!("~{}", render_formula(a));
    }
    if let Some((a, b)) = f.as_or() {
        return format!("({} \\/ {})", guard(render_formula(a)), render_formula(b));
    }
    render_node(f, render_formula)
}

/// Renders the core syntax only: `bot`, `->`, `forall` and atoms.
pub fn render_core(f: &Formula) -> String {
    render_node(f, render_core)
}

fn render_node(f: &Formula, rec: fn(&Formula) -> String) -> String {
    match f {
        Formula::Eq(a, b) => format!("{a} = {b}"),
        Formula::Pred(p, args) => format!("{p}({})", args.join(", ")),
        Formula::Bot => "bot".into(),
        Formula::Imp(a, b) => format!("({} -> {})", guard(rec(a)), rec(b)),
        Formula::Forall(x, b) => format!("forall {x}. {}", rec(b)),
        Formula::Modal { subject, op, boxes } => {
            let mut s = format!("{subject} {op}");
            for (y, b) in boxes {
                s.push_str(&format!(" [{y} : {}]", rec(b)));
            }
            s
        }
    }
}

pub fn render_hybrid(f: &Hybrid) -> String {
    match f {
        Hybrid::Nominal(x) => x.clone(),
        Hybrid::Atom(p) => p.clone(),
        Hybrid::Bot => "bot".into(),
        Hybrid::Imp(a, b) if **b == Hybrid::Bot => format!("~{}", render_hybrid(a)),
        Hybrid::Imp(a, b) => format!("({} -> {})", guard(render_hybrid(a)), render_hybrid(b)),
        Hybrid::Modal(op, args) => match args.len() {
            0 => op.clone(),
            1 => format!("{op} {}", render_hybrid(&args[0])),
            _ => format!("{op}({})", args.iter().map(render_hybrid).collect::<Vec<_>>().join(", ")),
        },
        Hybrid::At(x, a) => format!("@{x} {}", render_hybrid(a)),
        Hybrid::Down(x, a) => format!("down {x}. {}", render_hybrid(a)),
        Hybrid::Global(a) => format!("A {}", render_hybrid(a)),
        Hybrid::ForallW(x, a) => format!("forallw {x}. {}", render_hybrid(a)),
    }
}

pub fn render_cml(f: &Cml) -> String {
    render_hybrid(&f.to_hybrid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_hybrid, Bound, Signature};

    fn sig() -> Signature {
        Signature::new().with_op("dia", 1, vec![Bound::Fin(1)]).with_pred("P", 1)
    }

    #[test]
    fn quantifier_in_antecedent_keeps_scope() {
        let f = Formula::imp(Formula::forall("x", Formula::pred("P", &["x"])), Formula::Bot);
        let core = render_core(&f);
        assert_eq!(core, "((forall x. P(x)) -> bot)");
        assert_eq!(parse_formula(&core, &sig()).unwrap(), f);
        assert_eq!(parse_formula(&render_formula(&f), &sig()).unwrap(), f);
    }

    #[test]
    fn sugared_rendering() {
        let p = Formula::pred("P", &["x"]);
        assert_eq!(render_formula(&Formula::not(p.clone())), "~P(x)");
        assert_eq!(render_formula(&Formula::exists("x", p.clone())), "exists x. P(x)");
        assert_eq!(render_formula(&Formula::top()), "top");
        let m = Formula::modal("x", "dia", vec![("z".into(), Formula::eq("z", "y"))]);
        assert_eq!(render_formula(&m), "x dia [z : z = y]");
    }

    #[test]
    fn hybrid_round_trip() {
        let s = sig();
        for text in ["down z. dia z", "@x ~P", "(A P -> @y dia (down z. z))", "forallw x. @x P"] {
            let f = parse_hybrid(text, &s).unwrap();
            assert_eq!(parse_hybrid(&render_hybrid(&f), &s).unwrap(), f, "{text}");
        }
    }
}
