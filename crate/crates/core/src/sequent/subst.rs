use std::collections::BTreeSet;

use super::{Label, Proof};
use crate::error::Result;
use crate::syntax::{fresh_var, Var};

pub(crate) fn fresh(avoid: &mut BTreeSet<Var>) -> Var {
    let v = fresh_var(avoid);
    avoid.insert(v.clone());
    v
}

/// The proof with free `x` replaced by `t` throughout, of the same height.
/// Eigenvariables, Paste witnesses and L= placeholders that clash with `t`
/// are renamed apart; a capture elsewhere is an error.
pub fn substitute_proof(p: &Proof, t: &str, x: &str) -> Result<Proof> {
    let mut avoid = p.all_vars();
    avoid.insert(t.to_string());
    avoid.insert(x.to_string());
    subst_in(p, t, x, &mut avoid)
}

pub(crate) fn subst_in(p: &Proof, t: &str, x: &str, avoid: &mut BTreeSet<Var>) -> Result<Proof> {
    if t == x || !p.conclusion.free_vars().contains(x) {
        return Ok(p.clone());
    }
    let mut rule = p.rule.clone();
    let mut premises = p.premises.clone();
    match rule.label {
        Label::RAll | Label::Modal => {
            if rule.eigen.as_deref() == Some(t) {
                let e = fresh(avoid);
                premises = premises.iter().map(|q| subst_in(q, &e, t, avoid)).collect::<Result<_>>()?;
                rule.eigen = Some(e);
            }
        }
        Label::Paste => {
            if let Some(i) = rule.subst.iter().position(|z| z == t) {
                let z = fresh(avoid);
                premises = premises.iter().map(|q| subst_in(q, &z, t, avoid)).collect::<Result<_>>()?;
                rule.subst[i] = z;
            }
        }
        Label::LEq1 | Label::LEq2 => {
            let eq = rule.eq.as_mut().expect("checked L= step");
            if eq.w == t || eq.w == x {
                let w = fresh(avoid);
                rule.pattern = Some(rule.pattern.as_ref().expect("checked L= step").substitute(&w, &eq.w)?);
                eq.w = w;
            }
        }
        _ => {}
    }
    let rn = |v: &mut Var| {
        if v == x {
            *v = t.to_string();
        }
    };
    rule.principal = rule.principal.iter().map(|f| f.substitute(t, x)).collect::<Result<_>>()?;
    if let Some(eq) = rule.eq.as_mut() {
        rn(&mut eq.x);
        rn(&mut eq.y);
    }
    if let Some(pat) = &rule.pattern {
        rule.pattern = Some(pat.substitute(t, x)?);
    }
    if rule.label == Label::LAll {
        rule.subst.iter_mut().for_each(rn);
    }
    let premises = premises.iter().map(|q| subst_in(q, t, x, avoid)).collect::<Result<_>>()?;
    Ok(Proof { conclusion: p.conclusion.substitute(t, x)?, rule, premises })
}
