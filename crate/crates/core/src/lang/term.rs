//! Terms, substitutions and one-sided unification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

/// A decimal literal.
///
/// Equality is bitwise so that terms can be hashed and compared
/// structurally. `-0.0` is folded into `0.0` on construction.
#[derive(Debug, Clone, Copy)]
pub struct Number(f64);

impl Number {
    pub fn new(value: f64) -> Self {
        if value == 0.0 {
            Number(0.0)
        } else {
            Number(value)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Number {}

impl Hash for Number {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if a != 0.0 && !(1e-4..1e15).contains(&a) {
            write!(f, "{:e}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// A term of the plan language.
///
/// Constants are compounds with no arguments; they print without
/// parentheses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Num(Number),
    Compound { functor: String, args: Vec<Term> },
}

impl Term {
    pub fn atom(name: impl Into<String>) -> Self {
        Term::Compound {
            functor: name.into(),
            args: Vec::new(),
        }
    }

    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Compound {
            functor: functor.into(),
            args,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn num(value: f64) -> Self {
        Term::Num(Number::new(value))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Num(_) => true,
            Term::Compound { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Compound { functor, .. } => Some(functor),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound { args, .. } => args,
            _ => &[],
        }
    }

    pub fn arity(&self) -> usize {
        self.args().len()
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Term::Num(n) => Some(n.value()),
            _ => None,
        }
    }

    /// Name of a zero-arity compound.
    pub fn as_constant(&self) -> Option<&str> {
        match self {
            Term::Compound { functor, args } if args.is_empty() => Some(functor),
            _ => None,
        }
    }

    /// Collects variable names in order of first occurrence.
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|x| x == v) {
                    out.push(v.clone());
                }
            }
            Term::Num(_) => {}
            Term::Compound { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Num(n) => n.fmt(f),
            Term::Compound { functor, args } => {
                f.write_str(functor)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        a.fmt(f)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Variable bindings. Every bound value is ground, which makes
/// application idempotent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    /// Binds `var` to a ground value. Returns false if the value is not
    /// ground or `var` is already bound to something else.
    pub fn bind(&mut self, var: impl Into<String>, value: Term) -> bool {
        if !value.is_ground() {
            return false;
        }
        let var = var.into();
        match self.bindings.get(&var) {
            Some(existing) => *existing == value,
            None => {
                self.bindings.insert(var, value);
                true
            }
        }
    }

    /// Merges `other` into `self`; fails on conflicting bindings.
    pub fn merge(&mut self, other: &Substitution) -> bool {
        other.iter().all(|(k, v)| self.bind(k.clone(), v.clone()))
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (k, v) in iter {
            assert!(s.bind(k, v), "substitution values must be ground and consistent");
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        f.write_str("}")
    }
}

/// Matches `pattern` against a ground term.
///
/// Since one side is ground the result is the most general unifier, if
/// any. Returns `None` on functor/arity mismatch or when a repeated
/// variable would need two different values.
pub fn unify(pattern: &Term, ground: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    unify_into(pattern, ground, &mut s).then_some(s)
}

/// Like [`unify`], extending an existing substitution. On failure `s`
/// may hold partial bindings; callers clone before trying.
pub fn unify_into(pattern: &Term, ground: &Term, s: &mut Substitution) -> bool {
    debug_assert!(ground.is_ground(), "unify: right-hand side must be ground");
    match (pattern, ground) {
        (Term::Var(v), g) => s.bind(v.clone(), g.clone()),
        (Term::Num(a), Term::Num(b)) => a == b,
        (
            Term::Compound { functor: f, args: a },
            Term::Compound {
                functor: g,
                args: b,
            },
        ) => f == g && a.len() == b.len() && a.iter().zip(b).all(|(x, y)| unify_into(x, y, s)),
        _ => false,
    }
}

pub fn apply_subst(t: &Term, s: &Substitution) -> Term {
    match t {
        Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Num(_) => t.clone(),
        Term::Compound { functor, args } => Term::Compound {
            functor: functor.clone(),
            args: args.iter().map(|a| apply_subst(a, s)).collect(),
        },
    }
}
