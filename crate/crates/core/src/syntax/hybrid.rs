use std::collections::BTreeSet;

use super::formula::Var;
use crate::error::{Error, Result};

/// Pure coalgebraic modal formulas over unary predicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cml {
    Atom(String),
    Bot,
    Imp(Box<Cml>, Box<Cml>),
    Modal(String, Vec<Cml>),
}

impl Cml {
    pub fn imp(a: Cml, b: Cml) -> Cml {
        Cml::Imp(Box::new(a), Box::new(b))
    }

    pub fn not(a: Cml) -> Cml {
        Cml::imp(a, Cml::Bot)
    }

    pub fn depth(&self) -> usize {
        match self {
            Cml::Atom(_) | Cml::Bot => 0,
            Cml::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Cml::Modal(_, args) => 1 + args.iter().map(Cml::depth).max().unwrap_or(0),
        }
    }

    pub fn to_hybrid(&self) -> Hybrid {
        match self {
            Cml::Atom(p) => Hybrid::Atom(p.clone()),
            Cml::Bot => Hybrid::Bot,
            Cml::Imp(a, b) => Hybrid::imp(a.to_hybrid(), b.to_hybrid()),
            Cml::Modal(op, args) => Hybrid::Modal(op.clone(), args.iter().map(Cml::to_hybrid).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Hybrid {
    Nominal(Var),
    Atom(String),
    Bot,
    Imp(Box<Hybrid>, Box<Hybrid>),
    Modal(String, Vec<Hybrid>),
    At(Var, Box<Hybrid>),
    Down(Var, Box<Hybrid>),
    Global(Box<Hybrid>),
    ForallW(Var, Box<Hybrid>),
}

/// The three hybrid languages, plus their union.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HybridLang {
    DownAt,
    DownGlobal,
    ForallAt,
    Full,
}

impl std::str::FromStr for HybridLang {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "down-at" => Ok(HybridLang::DownAt),
            "down-global" => Ok(HybridLang::DownGlobal),
            "forall-at" => Ok(HybridLang::ForallAt),
            "full" => Ok(HybridLang::Full),
            other => Err(Error::Language(format!("unknown hybrid language `{other}`"))),
        }
    }
}

impl Hybrid {
    pub fn imp(a: Hybrid, b: Hybrid) -> Hybrid {
        Hybrid::Imp(Box::new(a), Box::new(b))
    }

    pub fn not(a: Hybrid) -> Hybrid {
        Hybrid::imp(a, Hybrid::Bot)
    }

    pub fn at(x: impl Into<Var>, a: Hybrid) -> Hybrid {
        Hybrid::At(x.into(), Box::new(a))
    }

    pub fn down(x: impl Into<Var>, a: Hybrid) -> Hybrid {
        Hybrid::Down(x.into(), Box::new(a))
    }

    pub fn global(a: Hybrid) -> Hybrid {
        Hybrid::Global(Box::new(a))
    }

    pub fn forallw(x: impl Into<Var>, a: Hybrid) -> Hybrid {
        Hybrid::ForallW(x.into(), Box::new(a))
    }

    pub fn depth(&self) -> usize {
        match self {
            Hybrid::Nominal(_) | Hybrid::Atom(_) | Hybrid::Bot => 0,
            Hybrid::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Hybrid::Modal(_, args) => 1 + args.iter().map(Hybrid::depth).max().unwrap_or(0),
            Hybrid::At(_, a) | Hybrid::Down(_, a) | Hybrid::Global(a) | Hybrid::ForallW(_, a) => 1 + a.depth(),
        }
    }

    /// World variables occurring anywhere, binders included.
    pub fn world_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_world_vars(&mut out);
        out
    }

    fn collect_world_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Hybrid::Nominal(x) => {
                out.insert(x.clone());
            }
            Hybrid::Atom(_) | Hybrid::Bot => {}
            Hybrid::Imp(a, b) => {
                a.collect_world_vars(out);
                b.collect_world_vars(out);
            }
            Hybrid::Modal(_, args) => args.iter().for_each(|a| a.collect_world_vars(out)),
            Hybrid::At(x, a) | Hybrid::Down(x, a) | Hybrid::ForallW(x, a) => {
                out.insert(x.clone());
                a.collect_world_vars(out);
            }
            Hybrid::Global(a) => a.collect_world_vars(out),
        }
    }

    /// Checks that only constructors admitted by `lang` occur.
    pub fn check_lang(&self, lang: HybridLang) -> Result<()> {
        let (at, down, global, forall) = match lang {
            HybridLang::DownAt => (true, true, false, false),
            HybridLang::DownGlobal => (false, true, true, false),
            HybridLang::ForallAt => (true, false, false, true),
            HybridLang::Full => (true, true, true, true),
        };
        let reject = |what: &str| Err(Error::Language(format!("{what} not admitted in {lang:?}")));
        match self {
            Hybrid::Nominal(_) | Hybrid::Atom(_) | Hybrid::Bot => Ok(()),
            Hybrid::Imp(a, b) => {
                a.check_lang(lang)?;
                b.check_lang(lang)
            }
            Hybrid::Modal(_, args) => args.iter().try_for_each(|a| a.check_lang(lang)),
            Hybrid::At(_, a) => {
                if !at {
                    return reject("@");
                }
                a.check_lang(lang)
            }
            Hybrid::Down(_, a) => {
                if !down {
                    return reject("down");
                }
                a.check_lang(lang)
            }
            Hybrid::Global(a) => {
                if !global {
                    return reject("A");
                }
                a.check_lang(lang)
            }
            Hybrid::ForallW(_, a) => {
                if !forall {
                    return reject("forallw");
                }
                a.check_lang(lang)
            }
        }
    }

    pub fn to_cml(&self) -> Result<Cml> {
        match self {
            Hybrid::Atom(p) => Ok(Cml::Atom(p.clone())),
            Hybrid::Bot => Ok(Cml::Bot),
            Hybrid::Imp(a, b) => Ok(Cml::imp(a.to_cml()?, b.to_cml()?)),
            Hybrid::Modal(op, args) => Ok(Cml::Modal(op.clone(), args.iter().map(Hybrid::to_cml).collect::<Result<_>>()?)),
            other => Err(Error::Language(format!("hybrid constructor in modal formula: {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn language_tags_restrict_constructors() {
        let f = Hybrid::down("z", Hybrid::at("z", Hybrid::Atom("p".into())));
        assert!(f.check_lang(HybridLang::DownAt).is_ok());
        assert!(f.check_lang(HybridLang::DownGlobal).is_err());
        assert!(f.check_lang(HybridLang::ForallAt).is_err());
        let g = Hybrid::global(Hybrid::Nominal("z".into()));
        assert!(g.check_lang(HybridLang::DownGlobal).is_ok());
        assert!(g.check_lang(HybridLang::DownAt).is_err());
        assert!(Hybrid::forallw("z", Hybrid::Bot).check_lang(HybridLang::ForallAt).is_ok());
    }

    #[test]
    fn world_vars_include_binders() {
        let f = Hybrid::down("z", Hybrid::at("y", Hybrid::Nominal("w".into())));
        let vs: Vec<_> = f.world_vars().into_iter().collect();
        assert_eq!(vs, vec!["w", "y", "z"]);
    }
}
