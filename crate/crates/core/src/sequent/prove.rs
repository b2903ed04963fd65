use super::{adjust_to, remove_n, Proof, Sequent};
use crate::syntax::Formula;

/// A cut-free proof of `s` when it is a classical tautology with atomic,
/// quantified and modal formulas read as propositional atoms.
pub fn prove_propositional(s: &Sequent) -> Option<Proof> {
    prove_with(s, &[], &mut |_| None)
}

/// Like `prove_propositional`, keeping `opaque` formulas intact and handing
/// irreducible non-axiom leaves to `leaf`.
pub(crate) fn prove_with(s: &Sequent, opaque: &[Formula], leaf: &mut dyn FnMut(&Sequent) -> Option<Proof>) -> Option<Proof> {
    let open = |f: &&Formula| matches!(f, Formula::Imp(..)) && !opaque.contains(f);
    if let Some(f) = s.lhs.iter().find(|f| s.rhs.contains(f)) {
        return adjust_to(Proof::ax(f.clone()), s).ok();
    }
    if s.lhs.contains(&Formula::Bot) {
        return adjust_to(Proof::lbot(), s).ok();
    }
    if let Some(Formula::Eq(x, _)) = s.rhs.iter().find(|f| matches!(f, Formula::Eq(a, b) if a == b)) {
        return adjust_to(Proof::req(x), s).ok();
    }
    if let Some(f) = s.rhs.iter().find(open) {
        let (a, b) = f.as_imp().expect("matched implication");
        let mut lhs = s.lhs.clone();
        lhs.push(a.clone());
        let mut rhs = remove_n(&s.rhs, f, 1).expect("present");
        rhs.push(b.clone());
        let p = prove_with(&Sequent::new(lhs, rhs), opaque, leaf)?;
        return Proof::rimp(p, a, b).ok();
    }
    if let Some(f) = s.lhs.iter().find(open) {
        let (a, b) = f.as_imp().expect("matched implication");
        let gamma = remove_n(&s.lhs, f, 1).expect("present");
        let mut rhs = s.rhs.clone();
        rhs.push(a.clone());
        let p0 = prove_with(&Sequent::new(gamma.clone(), rhs), opaque, leaf)?;
        let mut lhs = gamma;
        lhs.push(b.clone());
        let p1 = prove_with(&Sequent::new(lhs, s.rhs.clone()), opaque, leaf)?;
        return Proof::limp(p0, p1, a, b).ok();
    }
    leaf(s)
}
