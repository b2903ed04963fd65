//! Standard translations into CPL and the hybrid translation back.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::{fresh_var, Cml, Formula, Hybrid, Signature, Var};

/// Translation of a pure modal formula, reusing `x` for every comprehension.
pub fn st_cml(f: &Cml, x: &str, sig: &Signature) -> Result<Formula> {
    Ok(match f {
        Cml::Atom(p) => {
            if sig.preds.get(p).is_some_and(|&a| a != 1) {
                return Err(Error::Signature(format!("`{p}` is not unary")));
            }
            Formula::Pred(p.clone(), vec![x.to_string()])
        }
        Cml::Bot => Formula::Bot,
        Cml::Imp(a, b) => Formula::imp(st_cml(a, x, sig)?, st_cml(b, x, sig)?),
        Cml::Modal(op, args) => Formula::modal(
            x,
            op.clone(),
            args.iter().map(|a| Ok((x.to_string(), st_cml(a, x, sig)?))).collect::<Result<_>>()?,
        ),
    })
}

/// Whether every variable occurrence is `x`, with no equality and no quantifier.
pub fn is_single_variable_fragment(f: &Formula, x: &str) -> bool {
    match f {
        Formula::Eq(..) | Formula::Forall(..) => false,
        Formula::Pred(_, args) => args.iter().all(|a| a == x),
        Formula::Bot => true,
        Formula::Imp(a, b) => is_single_variable_fragment(a, x) && is_single_variable_fragment(b, x),
        Formula::Modal { subject, boxes, .. } => {
            subject == x && boxes.iter().all(|(y, b)| y == x && is_single_variable_fragment(b, x))
        }
    }
}

fn check_namespace(f: &Hybrid, x: &str) -> Result<BTreeSet<Var>> {
    let world = f.world_vars();
    if world.contains(x) {
        return Err(Error::Namespace(format!("translation variable `{x}` occurs as a world variable")));
    }
    Ok(world)
}

/// Hybrid standard translation with fresh comprehension variables in the
/// modal clause and the substitution clauses for `@` and `down`.
pub fn st_hybrid(f: &Hybrid, x: &str) -> Result<Formula> {
    let mut avoid = check_namespace(f, x)?;
    avoid.insert(x.to_string());
    Ok(st_h(f, x, &avoid))
}

fn st_h(f: &Hybrid, x: &str, avoid: &BTreeSet<Var>) -> Formula {
    match f {
        Hybrid::Nominal(z) => Formula::eq(x, z.clone()),
        Hybrid::Atom(p) => Formula::Pred(p.clone(), vec![x.to_string()]),
        Hybrid::Bot => Formula::Bot,
        Hybrid::Imp(a, b) => Formula::imp(st_h(a, x, avoid), st_h(b, x, avoid)),
        Hybrid::Modal(op, args) => {
            let mut used = avoid.clone();
            for a in args {
                st_h(a, x, avoid).collect_vars(&mut used);
            }
            let y = fresh_var(&used);
            let mut inner = avoid.clone();
            inner.insert(y.clone());
            Formula::modal(x, op.clone(), args.iter().map(|a| (y.clone(), st_h(a, &y, &inner))).collect())
        }
        Hybrid::At(z, a) => st_h(a, x, avoid).subst_avoiding(z, x),
        Hybrid::Down(z, a) => st_h(a, x, avoid).subst_avoiding(x, z),
        Hybrid::Global(a) => Formula::forall(x, st_h(a, x, avoid)),
        Hybrid::ForallW(z, a) => Formula::forall(z.clone(), st_h(a, x, avoid)),
    }
}

/// The capture-unsafe variant: one comprehension variable and raw
/// substitution. Kept as a regression fixture.
pub fn st_hybrid_naive(f: &Hybrid, x: &str) -> Formula {
    match f {
        Hybrid::Nominal(z) => Formula::eq(x, z.clone()),
        Hybrid::Atom(p) => Formula::Pred(p.clone(), vec![x.to_string()]),
        Hybrid::Bot => Formula::Bot,
        Hybrid::Imp(a, b) => Formula::imp(st_hybrid_naive(a, x), st_hybrid_naive(b, x)),
        Hybrid::Modal(op, args) => {
            Formula::modal(x, op.clone(), args.iter().map(|a| (x.to_string(), st_hybrid_naive(a, x))).collect())
        }
        Hybrid::At(z, a) => st_hybrid_naive(a, x).replace_free(z, x),
        Hybrid::Down(z, a) => st_hybrid_naive(a, x).replace_free(x, z),
        Hybrid::Global(a) => Formula::forall(x, st_hybrid_naive(a, x)),
        Hybrid::ForallW(z, a) => Formula::forall(z.clone(), st_hybrid_naive(a, x)),
    }
}

/// Translation with `@` and `down` expressed by guarded quantification;
/// `x` is reused as the comprehension variable throughout.
pub fn stwr_hybrid(f: &Hybrid, x: &str) -> Result<Formula> {
    check_namespace(f, x)?;
    Ok(stwr(f, x))
}

fn stwr(f: &Hybrid, x: &str) -> Formula {
    match f {
        Hybrid::Nominal(z) => Formula::eq(x, z.clone()),
        Hybrid::Atom(p) => Formula::Pred(p.clone(), vec![x.to_string()]),
        Hybrid::Bot => Formula::Bot,
        Hybrid::Imp(a, b) => Formula::imp(stwr(a, x), stwr(b, x)),
        Hybrid::Modal(op, args) => Formula::modal(x, op.clone(), args.iter().map(|a| (x.to_string(), stwr(a, x))).collect()),
        Hybrid::At(z, a) => Formula::forall(x, Formula::imp(Formula::eq(x, z.clone()), stwr(a, x))),
        Hybrid::Down(z, a) => Formula::forall(z.clone(), Formula::imp(Formula::eq(x, z.clone()), stwr(a, x))),
        Hybrid::Global(a) => Formula::forall(x, stwr(a, x)),
        Hybrid::ForallW(z, a) => Formula::forall(z.clone(), stwr(a, x)),
    }
}

/// Hybrid translation of quantifier-free CPL over unary predicates.
pub fn ht(f: &Formula) -> Result<Hybrid> {
    if f.has_quantifier() {
        return Err(Error::QuantifierPresent);
    }
    ht_with(f, &mut |_, _| unreachable!("quantifier-free input"))
}

fn ht_with(f: &Formula, quant: &mut dyn FnMut(&Var, Hybrid) -> Hybrid) -> Result<Hybrid> {
    Ok(match f {
        Formula::Pred(p, args) => match args.as_slice() {
            [x] => Hybrid::at(x.clone(), Hybrid::Atom(p.clone())),
            _ => return Err(Error::Signature(format!("`{p}` is not unary"))),
        },
        Formula::Eq(x, y) => Hybrid::at(x.clone(), Hybrid::Nominal(y.clone())),
        Formula::Bot => Hybrid::Bot,
        Formula::Imp(a, b) => Hybrid::imp(ht_with(a, quant)?, ht_with(b, quant)?),
        Formula::Modal { subject, op, boxes } => {
            let mut args = Vec::with_capacity(boxes.len());
            for (y, b) in boxes {
                args.push(Hybrid::down(y.clone(), ht_with(b, quant)?));
            }
            Hybrid::at(subject.clone(), Hybrid::Modal(op.clone(), args))
        }
        Formula::Forall(x, b) => {
            let body = ht_with(b, quant)?;
            quant(x, body)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HtTarget {
    ForallAt,
    GlobalDown,
}

/// Extension of the hybrid translation to formulas with quantifiers.
pub fn ht_full(f: &Formula, target: HtTarget) -> Result<Hybrid> {
    match target {
        HtTarget::ForallAt => ht_with(f, &mut |x, body| Hybrid::forallw(x.clone(), body)),
        HtTarget::GlobalDown => {
            let y = fresh_var(&f.vars());
            ht_with(f, &mut |x, body| {
                Hybrid::down(
                    y.clone(),
                    Hybrid::global(Hybrid::down(x.clone(), Hybrid::global(Hybrid::imp(Hybrid::Nominal(y.clone()), body)))),
                )
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_cml, parse_formula, parse_hybrid, render_formula, Bound};

    fn sig() -> Signature {
        Signature::new().with_op("dia", 1, vec![Bound::Fin(1)]).with_pred("P", 1).with_pred("p", 1)
    }

    #[test]
    fn standard_translation_examples() {
        let s = sig();
        let f = st_cml(&parse_cml("dia dia P", &s).unwrap(), "x", &s).unwrap();
        assert_eq!(render_formula(&f), "x dia [x : x dia [x : P(x)]]");
        assert!(is_single_variable_fragment(&f, "x"));
        assert_eq!(st_cml(&Cml::Bot, "x", &s).unwrap(), Formula::Bot);
        assert_eq!(st_cml(&Cml::Atom("P".into()), "x", &s).unwrap(), Formula::pred("P", &["x"]));
    }

    #[test]
    fn hybrid_translation_examples() {
        let s = sig();
        let f = st_hybrid(&parse_hybrid("down z. dia z", &s).unwrap(), "x").unwrap();
        assert_eq!(render_formula(&f), "x dia [_g0 : _g0 = x]");
        assert_eq!(st_hybrid(&Hybrid::Nominal("z".into()), "x").unwrap(), Formula::eq("x", "z"));
        let g = st_hybrid(&parse_hybrid("A p", &s).unwrap(), "x").unwrap();
        assert_eq!(g, Formula::forall("x", Formula::pred("p", &["x"])));
        assert!(matches!(st_hybrid(&Hybrid::Nominal("x".into()), "x"), Err(Error::Namespace(_))));
        let naive = st_hybrid_naive(&parse_hybrid("down z. dia z", &s).unwrap(), "x");
        assert_eq!(render_formula(&naive), "x dia [x : x = x]");
    }

    #[test]
    fn guarded_translation_examples() {
        let s = sig();
        let at = stwr_hybrid(&parse_hybrid("@z p", &s).unwrap(), "x").unwrap();
        assert_eq!(render_formula(&at), "forall x. (x = z -> p(x))");
        let down = stwr_hybrid(&parse_hybrid("down z. p", &s).unwrap(), "x").unwrap();
        assert_eq!(render_formula(&down), "forall z. (x = z -> p(x))");
        assert_eq!(stwr_hybrid(&Hybrid::Bot, "x").unwrap(), Formula::Bot);
    }

    #[test]
    fn reverse_translation_examples() {
        let s = sig();
        assert_eq!(ht(&Formula::eq("x", "y")).unwrap(), Hybrid::at("x", Hybrid::Nominal("y".into())));
        let m = ht(&parse_formula("x dia [y : P(y)]", &s).unwrap()).unwrap();
        let expect = Hybrid::at(
            "x",
            Hybrid::Modal("dia".into(), vec![Hybrid::down("y", Hybrid::at("y", Hybrid::Atom("P".into())))]),
        );
        assert_eq!(m, expect);
        assert_eq!(ht(&Formula::Bot).unwrap(), Hybrid::Bot);
        assert_eq!(ht(&Formula::forall("x", Formula::Bot)), Err(Error::QuantifierPresent));
    }

    #[test]
    fn quantified_reverse_translation() {
        let s = sig();
        let f = parse_formula("forall x. P(x)", &s).unwrap();
        assert_eq!(
            ht_full(&f, HtTarget::ForallAt).unwrap(),
            Hybrid::forallw("x", Hybrid::at("x", Hybrid::Atom("P".into())))
        );
        let g = ht_full(&Formula::forall("x", Formula::Bot), HtTarget::GlobalDown).unwrap();
        let expect = Hybrid::down(
            "_g0",
            Hybrid::global(Hybrid::down("x", Hybrid::global(Hybrid::imp(Hybrid::Nominal("_g0".into()), Hybrid::Bot)))),
        );
        assert_eq!(g, expect);
        let q = parse_formula("x = y -> P(x)", &s).unwrap();
        assert_eq!(ht_full(&q, HtTarget::ForallAt).unwrap(), ht(&q).unwrap());
    }
}
