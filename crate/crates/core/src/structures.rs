//! Set functors on finite carriers, their predicate liftings, and the
//! exhaustive checkers for naturality, boundedness and monotonicity.
//!
//! States of a carrier of size `n` are `0..n`; subsets are bitmasks.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::Bound;

pub type Mask = u64;

pub const MAX_CARRIER: usize = 64;
const NBHD_ENUM_CAP: usize = 4;
const SELECTION_ENUM_CAP: usize = 2;
const SELECTION_SLICE_CAP: usize = 4;
const ENUM_LIMIT: usize = 2_000_000;

pub fn full(n: usize) -> Mask {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn members(mask: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

pub fn mask_of(states: &[usize]) -> Mask {
    states.iter().fold(0, |m, &s| m | 1 << s)
}

/// All subsets of `0..n`, ascending by mask.
pub fn subsets(n: usize) -> impl Iterator<Item = Mask> {
    0..=full(n)
}

pub fn image(f: &[usize], a: Mask) -> Mask {
    members(a).fold(0, |m, c| m | 1 << f[c])
}

pub fn preimage(f: &[usize], b: Mask) -> Mask {
    f.iter().enumerate().filter(|(_, &d)| b >> d & 1 == 1).fold(0, |m, (c, _)| m | 1 << c)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StructureKind {
    Kripke { atoms: Vec<String> },
    Neighbourhood,
    Multiset { max: u32 },
    Dist { k: u32 },
    Selection,
    Product(Vec<StructureKind>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Kripke { succ: Mask, atoms: BTreeSet<String> },
    Nbhd(BTreeSet<Mask>),
    Multiset(Vec<u32>),
    Dist(Vec<u32>),
    /// Indexed by the argument subset's mask.
    Selection(Vec<Mask>),
    Product(Vec<Value>),
}

/// A predicate lifting, resolved from an operator name for a given kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lifting {
    Dia,
    Box,
    Atom(String),
    Graded(u32),
    Presburger { coeffs: Vec<u32>, k: u32 },
    Prob(u32),
    Cond,
    Component(usize, std::boxed::Box<Lifting>),
    Custom(CustomLifting),
}

/// A lifting given by an arbitrary membership function; compared by name.
#[derive(Clone, Debug)]
pub struct CustomLifting {
    pub name: String,
    pub arity: usize,
    pub holds: fn(usize, &Value, &[Mask]) -> bool,
}

impl PartialEq for CustomLifting {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity
    }
}

impl Eq for CustomLifting {}

impl Lifting {
    pub fn arity(&self) -> usize {
        match self {
            Lifting::Dia | Lifting::Box | Lifting::Graded(_) | Lifting::Prob(_) => 1,
            Lifting::Atom(_) => 0,
            Lifting::Presburger { coeffs, .. } => coeffs.len(),
            Lifting::Cond => 2,
            Lifting::Component(_, inner) => inner.arity(),
            Lifting::Custom(c) => c.arity,
        }
    }

    /// Boundedness signature entries known to be adequate.
    pub fn default_bounds(&self) -> Vec<Bound> {
        match self {
            Lifting::Dia => vec![Bound::Fin(1)],
            Lifting::Box => vec![Bound::Inf],
            Lifting::Atom(_) => vec![],
            Lifting::Graded(k) => vec![Bound::Fin(*k as usize + 1)],
            Lifting::Presburger { coeffs, k } => coeffs
                .iter()
                .map(|&a| if a == 0 { Bound::Fin(0) } else { Bound::Fin(((k + 1) / a + 1) as usize) })
                .collect(),
            Lifting::Prob(n) => vec![Bound::Fin(*n as usize + 1)],
            Lifting::Cond => vec![Bound::Inf, Bound::Fin(1)],
            Lifting::Component(_, inner) => inner.default_bounds(),
            Lifting::Custom(c) => vec![Bound::Inf; c.arity],
        }
    }
}

fn parse_suffix(s: &str, prefix: &str) -> Option<u32> {
    let rest = s.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

impl StructureKind {
    pub fn tag(&self) -> &'static str {
        match self {
            StructureKind::Kripke { .. } => "kripke",
            StructureKind::Neighbourhood => "neighbourhood",
            StructureKind::Multiset { .. } => "multiset",
            StructureKind::Dist { .. } => "dist",
            StructureKind::Selection => "selection",
            StructureKind::Product(_) => "product",
        }
    }

    pub fn kripke() -> Self {
        StructureKind::Kripke { atoms: vec![] }
    }

    /// Operator naming: `dia`, `box`, Kripke atom names, `g<k>`,
    /// `sum_<a1>_.._<an>_gt_<k>`, `p<n>`, `cond`, and `c<i>_<op>` for products.
    pub fn resolve(&self, op: &str) -> Result<Lifting> {
        let unknown = || Error::Signature(format!("operator `{op}` has no lifting over {}", self.tag()));
        match self {
            StructureKind::Kripke { atoms } => match op {
                "dia" => Ok(Lifting::Dia),
                "box" => Ok(Lifting::Box),
                a if atoms.iter().any(|x| x == a) => Ok(Lifting::Atom(a.to_string())),
                _ => Err(unknown()),
            },
            StructureKind::Neighbourhood => match op {
                "dia" => Ok(Lifting::Dia),
                "box" => Ok(Lifting::Box),
                _ => Err(unknown()),
            },
            StructureKind::Multiset { .. } => {
                if let Some(k) = parse_suffix(op, "g") {
                    return Ok(Lifting::Graded(k));
                }
                let body = op.strip_prefix("sum_").ok_or_else(unknown)?;
                let (coeffs, k) = body.split_once("_gt_").ok_or_else(unknown)?;
                let coeffs = coeffs
                    .split('_')
                    .map(|c| c.parse::<u32>().map_err(|_| unknown()))
                    .collect::<Result<Vec<_>>>()?;
                let k = k.parse::<u32>().map_err(|_| unknown())?;
                Ok(Lifting::Presburger { coeffs, k })
            }
            StructureKind::Dist { .. } => parse_suffix(op, "p").map(Lifting::Prob).ok_or_else(unknown),
            StructureKind::Selection => match op {
                "cond" => Ok(Lifting::Cond),
                _ => Err(unknown()),
            },
            StructureKind::Product(parts) => {
                let rest = op.strip_prefix('c').ok_or_else(unknown)?;
                let (idx, inner) = rest.split_once('_').ok_or_else(unknown)?;
                let i: usize = idx.parse().map_err(|_| unknown())?;
                let part = parts.get(i).ok_or_else(unknown)?;
                Ok(Lifting::Component(i, std::boxed::Box::new(part.resolve(inner)?)))
            }
        }
    }

    /// Checks that `v` is a well-formed element of T(n).
    pub fn check_value(&self, n: usize, v: &Value) -> Result<()> {
        let bad = |msg: String| Err(Error::Model(msg));
        let within = |m: Mask| n >= 64 || m >> n == 0;
        match (self, v) {
            (StructureKind::Kripke { atoms }, Value::Kripke { succ, atoms: a }) => {
                if !within(*succ) {
                    return bad("successor outside the carrier".into());
                }
                if let Some(x) = a.iter().find(|x| !atoms.contains(x)) {
                    return bad(format!("undeclared atom `{x}`"));
                }
                Ok(())
            }
            (StructureKind::Neighbourhood, Value::Nbhd(sets)) => {
                if sets.iter().all(|&m| within(m)) {
                    Ok(())
                } else {
                    bad("neighbourhood outside the carrier".into())
                }
            }
            (StructureKind::Multiset { max }, Value::Multiset(c)) => {
                if c.len() != n {
                    return bad(format!("multiset has {} entries for {n} states", c.len()));
                }
                if c.iter().any(|x| x > max) {
                    return bad(format!("multiplicity above the cap {max}"));
                }
                Ok(())
            }
            (StructureKind::Dist { k }, Value::Dist(c)) => {
                if c.len() != n {
                    return bad(format!("distribution has {} entries for {n} states", c.len()));
                }
                let total: u32 = c.iter().sum();
                if total != *k {
                    return bad(format!("numerators sum to {total}, expected {k}"));
                }
                Ok(())
            }
            (StructureKind::Selection, Value::Selection(t)) => {
                if n > 20 || t.len() != 1usize << n {
                    return bad("selection table is not total".into());
                }
                if t.iter().all(|&m| within(m)) {
                    Ok(())
                } else {
                    bad("selected set outside the carrier".into())
                }
            }
            (StructureKind::Product(parts), Value::Product(vs)) => {
                if parts.len() != vs.len() {
                    return bad("product arity mismatch".into());
                }
                parts.iter().zip(vs).try_for_each(|(p, v)| p.check_value(n, v))
            }
            _ => bad(format!("value does not belong to {}", self.tag())),
        }
    }

    /// Exhaustive enumeration of T(n), truncated by the kind's caps.
    pub fn enumerate(&self, n: usize) -> Result<Vec<Value>> {
        let cap = |what: &str| Err(Error::CapExceeded(what.to_string()));
        match self {
            StructureKind::Kripke { atoms } => {
                if n > 16 {
                    return cap("kripke enumeration needs |C| <= 16");
                }
                let mut out = Vec::new();
                for succ in subsets(n) {
                    for am in subsets(atoms.len()) {
                        let a = members(am).map(|i| atoms[i].clone()).collect();
                        out.push(Value::Kripke { succ, atoms: a });
                    }
                }
                Ok(out)
            }
            StructureKind::Neighbourhood => {
                if n > NBHD_ENUM_CAP {
                    return cap("neighbourhood enumeration needs |C| <= 4");
                }
                let nsub = 1usize << n;
                Ok((0..1u64 << nsub)
                    .map(|fam| Value::Nbhd((0..nsub as u64).filter(|s| fam >> s & 1 == 1).collect()))
                    .collect())
            }
            StructureKind::Multiset { max } => {
                if (*max as usize + 1).checked_pow(n as u32).is_none_or(|s| s > ENUM_LIMIT) {
                    return cap("multiset enumeration too large");
                }
                Ok(tuples(n, *max).into_iter().map(Value::Multiset).collect())
            }
            StructureKind::Dist { k } => {
                let out: Vec<Value> = compositions(*k, n).into_iter().map(Value::Dist).collect();
                if out.len() > ENUM_LIMIT {
                    return cap("distribution enumeration too large");
                }
                Ok(out)
            }
            StructureKind::Selection => {
                if n > SELECTION_ENUM_CAP {
                    return cap("selection enumeration needs |C| <= 2");
                }
                let nsub = 1usize << n;
                Ok(tuples(nsub, full(n) as u32)
                    .into_iter()
                    .map(|t| Value::Selection(t.into_iter().map(Mask::from).collect()))
                    .collect())
            }
            StructureKind::Product(parts) => {
                let mut acc: Vec<Vec<Value>> = vec![vec![]];
                for p in parts {
                    let vs = p.enumerate(n)?;
                    if acc.len().saturating_mul(vs.len()) > ENUM_LIMIT {
                        return cap("product enumeration too large");
                    }
                    acc = acc
                        .into_iter()
                        .flat_map(|pre| {
                            vs.iter().map(move |v| {
                                let mut next = pre.clone();
                                next.push(v.clone());
                                next
                            })
                        })
                        .collect();
                }
                Ok(acc.into_iter().map(Value::Product).collect())
            }
        }
    }

    /// Values sufficient for exhaustive checks of a single lifting: the full
    /// enumeration, except for selection where membership of `cond` depends
    /// on one table entry only and tables vary a single entry.
    pub fn representatives(&self, n: usize) -> Result<Vec<Value>> {
        match self {
            StructureKind::Selection if n > SELECTION_ENUM_CAP => {
                if n > SELECTION_SLICE_CAP {
                    return Err(Error::CapExceeded("selection slices need |C| <= 4".into()));
                }
                let nsub = 1usize << n;
                let mut out = BTreeSet::new();
                for a in 0..nsub {
                    for g in subsets(n) {
                        let mut t = vec![0; nsub];
                        t[a] = g;
                        out.insert(Value::Selection(t));
                    }
                }
                Ok(out.into_iter().collect())
            }
            _ => self.enumerate(n),
        }
    }

    /// T(f) for f: n -> m given as a table.
    pub fn map(&self, f: &[usize], m: usize, v: &Value) -> Value {
        match v {
            Value::Kripke { succ, atoms } => Value::Kripke { succ: image(f, *succ), atoms: atoms.clone() },
            Value::Nbhd(sets) => Value::Nbhd(subsets(m).filter(|&b| sets.contains(&preimage(f, b))).collect()),
            Value::Multiset(c) => Value::Multiset(push_forward(f, m, c)),
            Value::Dist(c) => Value::Dist(push_forward(f, m, c)),
            Value::Selection(t) => {
                Value::Selection(subsets(m).map(|b| image(f, t[preimage(f, b) as usize])).collect())
            }
            Value::Product(vs) => {
                let parts: Vec<&StructureKind> = match self {
                    StructureKind::Product(ps) => ps.iter().collect(),
                    _ => vec![self; vs.len()],
                };
                Value::Product(vs.iter().zip(parts).map(|(v, p)| p.map(f, m, v)).collect())
            }
        }
    }
}

fn push_forward(f: &[usize], m: usize, c: &[u32]) -> Vec<u32> {
    let mut out = vec![0; m];
    for (i, &x) in c.iter().enumerate() {
        out[f[i]] += x;
    }
    out
}

fn tuples(len: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|pre| {
                (0..=max).map(move |x| {
                    let mut next = pre.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    out
}

fn compositions(k: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in compositions(k - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn measure(c: &[u32], a: Mask) -> u64 {
    members(a).filter(|&i| i < c.len()).map(|i| c[i] as u64).sum()
}

/// Whether `v` lies in the lifting applied to `args`, over a carrier of size `n`.
pub fn member(lifting: &Lifting, n: usize, v: &Value, args: &[Mask]) -> bool {
    match (lifting, v) {
        (Lifting::Dia, Value::Kripke { succ, .. }) => succ & args[0] != 0,
        (Lifting::Box, Value::Kripke { succ, .. }) => succ & !args[0] == 0,
        (Lifting::Atom(p), Value::Kripke { atoms, .. }) => atoms.contains(p),
        (Lifting::Box, Value::Nbhd(sets)) => sets.contains(&args[0]),
        (Lifting::Dia, Value::Nbhd(sets)) => !sets.contains(&(full(n) & !args[0])),
        (Lifting::Graded(k), Value::Multiset(c)) => measure(c, args[0]) > *k as u64,
        (Lifting::Presburger { coeffs, k }, Value::Multiset(c)) => {
            coeffs.iter().zip(args).map(|(&a, &s)| a as u64 * measure(c, s)).sum::<u64>() > *k as u64
        }
        (Lifting::Prob(p), Value::Dist(c)) => measure(c, args[0]) > *p as u64,
        (Lifting::Cond, Value::Selection(t)) => t[args[0] as usize] & args[1] != 0,
        (Lifting::Component(i, inner), Value::Product(vs)) => member(inner, n, &vs[*i], args),
        (Lifting::Custom(c), v) => (c.holds)(n, v, args),
        _ => false,
    }
}

/// Membership with argument checks, for external callers.
pub fn lifting_member(kind: &StructureKind, op: &str, n: usize, v: &Value, args: &[Mask]) -> Result<bool> {
    let l = kind.resolve(op)?;
    if args.len() != l.arity() {
        return Err(Error::Arity { name: op.into(), expected: l.arity(), found: args.len() });
    }
    if args.iter().any(|&a| n < 64 && a >> n != 0) {
        return Err(Error::Model("argument outside the carrier".into()));
    }
    kind.check_value(n, v)?;
    Ok(member(&l, n, v, args))
}

/// All functions `0..n -> 0..m` as tables.
pub fn functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    tuples(n, m as u32 - 1)
        .into_iter()
        .map(|t| t.into_iter().map(|x| x as usize).collect())
        .collect()
}

fn arg_tuples(n: usize, arity: usize) -> Vec<Vec<Mask>> {
    tuples(arity, full(n) as u32).into_iter().map(|t| t.into_iter().map(Mask::from).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityWitness {
    pub f: Vec<usize>,
    pub target: usize,
    pub value: Value,
    pub args: Vec<Mask>,
}

/// The naturality square at one function and one argument tuple over the codomain.
pub fn check_naturality(
    kind: &StructureKind,
    lifting: &Lifting,
    f: &[usize],
    m: usize,
    args_d: &[Mask],
) -> Result<Option<NaturalityWitness>> {
    let n = f.len();
    let pulled: Vec<Mask> = args_d.iter().map(|&b| preimage(f, b)).collect();
    for t in kind.enumerate(n)? {
        let image = kind.map(f, m, &t);
        if member(lifting, m, &image, args_d) != member(lifting, n, &t, &pulled) {
            return Ok(Some(NaturalityWitness { f: f.to_vec(), target: m, value: t, args: args_d.to_vec() }));
        }
    }
    Ok(None)
}

/// Naturality for every function between carriers of size `1..=max_size` and
/// every argument tuple.
pub fn check_naturality_all(
    kind: &StructureKind,
    lifting: &Lifting,
    max_size: usize,
) -> Result<Option<NaturalityWitness>> {
    for n in 1..=max_size {
        let values = kind.enumerate(n)?;
        for m in 1..=max_size {
            let arg_sets = arg_tuples(m, lifting.arity());
            for f in functions(n, m) {
                let images: Vec<Value> = values.iter().map(|t| kind.map(&f, m, t)).collect();
                for args_d in &arg_sets {
                    let pulled: Vec<Mask> = args_d.iter().map(|&b| preimage(&f, b)).collect();
                    for (t, img) in values.iter().zip(&images) {
                        if member(lifting, m, img, args_d) != member(lifting, n, t, &pulled) {
                            return Ok(Some(NaturalityWitness {
                                f,
                                target: m,
                                value: t.clone(),
                                args: args_d.clone(),
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundWitness {
    pub value: Value,
    pub args: Vec<Mask>,
}

/// Eq.-(5)-style boundedness of argument `i` (0-based) with bound `k`, over a
/// carrier of size `n`.
pub fn check_bounded(
    kind: &StructureKind,
    lifting: &Lifting,
    i: usize,
    k: usize,
    n: usize,
) -> Result<Option<BoundWitness>> {
    if i >= lifting.arity() {
        return Err(Error::Arity { name: "argument index".into(), expected: lifting.arity(), found: i + 1 });
    }
    let values = kind.representatives(n)?;
    let args_all = arg_tuples(n, lifting.arity());
    for t in &values {
        for args in &args_all {
            let lhs = member(lifting, n, t, args);
            let a = args[i];
            let rhs = subsets(n).filter(|&b| b & !a == 0 && b.count_ones() as usize <= k).any(|b| {
                let mut sub = args.clone();
                sub[i] = b;
                member(lifting, n, t, &sub)
            });
            if lhs != rhs {
                return Ok(Some(BoundWitness { value: t.clone(), args: args.clone() }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneWitness {
    pub value: Value,
    pub args: Vec<Mask>,
    pub larger: Mask,
}

/// Monotonicity of argument `i`; on finite carriers this coincides with
/// omega-boundedness.
pub fn check_monotone(
    kind: &StructureKind,
    lifting: &Lifting,
    i: usize,
    n: usize,
) -> Result<Option<MonotoneWitness>> {
    if i >= lifting.arity() {
        return Err(Error::Arity { name: "argument index".into(), expected: lifting.arity(), found: i + 1 });
    }
    let values = kind.representatives(n)?;
    let args_all = arg_tuples(n, lifting.arity());
    for t in &values {
        for args in &args_all {
            if !member(lifting, n, t, args) {
                continue;
            }
            for larger in subsets(n).filter(|&b| b & args[i] == args[i] && b != args[i]) {
                let mut sup = args.clone();
                sup[i] = larger;
                if !member(lifting, n, t, &sup) {
                    return Ok(Some(MonotoneWitness { value: t.clone(), args: args.clone(), larger }));
                }
            }
        }
    }
    Ok(None)
}

pub use check_monotone as check_omega_bounded;

#[cfg(test)]
mod tests {
    use super::*;

    fn nbhd(sets: &[Mask]) -> Value {
        Value::Nbhd(sets.iter().copied().collect())
    }

    #[test]
    fn membership_examples() {
        let k = Value::Kripke { succ: 0b10, atoms: BTreeSet::new() };
        assert!(member(&Lifting::Dia, 2, &k, &[0b10]));
        assert!(!member(&Lifting::Dia, 2, &k, &[0b01]));
        assert!(member(&Lifting::Graded(1), 2, &Value::Multiset(vec![2, 0]), &[0b01]));
        assert!(member(&Lifting::Box, 2, &nbhd(&[0b01]), &[0b01]));
        assert!(!member(&Lifting::Box, 2, &nbhd(&[0b01]), &[0b10]));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(StructureKind::Neighbourhood.enumerate(2).unwrap().len(), 16);
        assert_eq!(StructureKind::Dist { k: 2 }.enumerate(2).unwrap().len(), 3);
        assert_eq!(StructureKind::Multiset { max: 1 }.enumerate(2).unwrap().len(), 4);
        assert_eq!(StructureKind::Selection.enumerate(2).unwrap().len(), 256);
        assert_eq!(StructureKind::Neighbourhood.enumerate(4).unwrap().len(), 65536);
        assert!(matches!(StructureKind::Neighbourhood.enumerate(5), Err(Error::CapExceeded(_))));
        assert!(matches!(StructureKind::Selection.enumerate(3), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        for kind in [StructureKind::Neighbourhood, StructureKind::Dist { k: 3 }, StructureKind::Selection] {
            let vs = kind.enumerate(2).unwrap();
            let set: BTreeSet<_> = vs.iter().collect();
            assert_eq!(set.len(), vs.len());
        }
    }

    #[test]
    fn functor_action_examples() {
        let collapse = [0, 0];
        let m = StructureKind::Multiset { max: 3 };
        assert_eq!(m.map(&collapse, 1, &Value::Multiset(vec![1, 1])), Value::Multiset(vec![2]));
        let k = StructureKind::kripke();
        let v = Value::Kripke { succ: 0b10, atoms: BTreeSet::new() };
        assert_eq!(k.map(&[0, 1], 2, &v), v);
        // g({a,b}) = {a}; every other entry empty
        let g = Value::Selection(vec![0, 0, 0, 0b01]);
        assert_eq!(StructureKind::Selection.map(&collapse, 1, &g), Value::Selection(vec![0, 0b1]));
    }

    #[test]
    fn naturality_of_shipped_liftings_small() {
        assert_eq!(check_naturality_all(&StructureKind::kripke(), &Lifting::Dia, 2).unwrap(), None);
        assert_eq!(check_naturality_all(&StructureKind::Neighbourhood, &Lifting::Box, 2).unwrap(), None);
    }

    fn singleton_box(_n: usize, v: &Value, args: &[Mask]) -> bool {
        matches!(v, Value::Nbhd(s) if s.contains(&args[0])) && args[0].count_ones() <= 1
    }

    #[test]
    fn broken_lifting_is_caught() {
        let broken = Lifting::Custom(CustomLifting { name: "broken".into(), arity: 1, holds: singleton_box });
        let w = check_naturality_all(&StructureKind::Neighbourhood, &broken, 2).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn boundedness_examples() {
        let k = StructureKind::kripke();
        for n in 1..=3 {
            assert_eq!(check_bounded(&k, &Lifting::Dia, 0, 1, n).unwrap(), None);
            assert!(check_bounded(&k, &Lifting::Dia, 0, 0, n).unwrap().is_some());
        }
        let ms = StructureKind::Multiset { max: 3 };
        assert_eq!(check_bounded(&ms, &Lifting::Graded(1), 0, 2, 3).unwrap(), None);
        let w = check_bounded(&ms, &Lifting::Graded(1), 0, 1, 3).unwrap().unwrap();
        let Value::Multiset(c) = &w.value else { panic!() };
        assert_eq!(measure(c, w.args[0]), 2);
        assert!(members(w.args[0]).all(|s| c[s] == 1));
        assert_eq!(w.args[0].count_ones(), 2);
        for n in 1..=3 {
            assert_eq!(check_bounded(&StructureKind::Selection, &Lifting::Cond, 1, 1, n).unwrap(), None);
        }
    }

    #[test]
    fn probability_bound_needs_one_more_witness() {
        let d = StructureKind::Dist { k: 2 };
        assert!(check_bounded(&d, &Lifting::Prob(1), 0, 1, 2).unwrap().is_some());
        assert_eq!(check_bounded(&d, &Lifting::Prob(1), 0, 2, 2).unwrap(), None);
    }

    #[test]
    fn presburger_bounds() {
        let ms = StructureKind::Multiset { max: 2 };
        let l = Lifting::Presburger { coeffs: vec![1, 2], k: 2 };
        for (i, b) in l.default_bounds().into_iter().enumerate() {
            let Bound::Fin(k) = b else { panic!() };
            assert_eq!(check_bounded(&ms, &l, i, k, 2).unwrap(), None);
        }
        // (k+1) div a without the extra witness is too small at k = 2, a = 2
        assert!(check_bounded(&ms, &l, 1, 1, 2).unwrap().is_some());
    }

    #[test]
    fn monotonicity() {
        assert_eq!(check_monotone(&StructureKind::kripke(), &Lifting::Dia, 0, 3).unwrap(), None);
        assert_eq!(check_monotone(&StructureKind::Dist { k: 3 }, &Lifting::Prob(1), 0, 3).unwrap(), None);
        let w = check_monotone(&StructureKind::Neighbourhood, &Lifting::Box, 0, 2).unwrap().unwrap();
        assert!(member(&Lifting::Box, 2, &w.value, &w.args));
        assert!(!member(&Lifting::Box, 2, &w.value, &[w.larger]));
        let sigma = nbhd(&[0b01]);
        assert!(member(&Lifting::Box, 2, &sigma, &[0b01]) && !member(&Lifting::Box, 2, &sigma, &[0b11]));
    }

    #[test]
    fn operator_names_resolve() {
        let ms = StructureKind::Multiset { max: 3 };
        assert_eq!(ms.resolve("g2").unwrap(), Lifting::Graded(2));
        assert_eq!(ms.resolve("sum_1_2_gt_3").unwrap(), Lifting::Presburger { coeffs: vec![1, 2], k: 3 });
        assert!(ms.resolve("g").is_err());
        let p = StructureKind::Product(vec![StructureKind::kripke(), StructureKind::Neighbourhood]);
        assert_eq!(p.resolve("c1_box").unwrap(), Lifting::Component(1, std::boxed::Box::new(Lifting::Box)));
        assert_eq!(StructureKind::Dist { k: 4 }.resolve("p3").unwrap(), Lifting::Prob(3));
    }
}
