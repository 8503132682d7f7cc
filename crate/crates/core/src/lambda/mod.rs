//! Simply typed λ-terms over one base type, as attribute values.
//!
//! Terms are locally nameless: bound variables are de Bruijn indices and
//! free variables are names. Binder names are kept only as printing hints,
//! so structural equality is α-equivalence.

mod parse;
mod print;
mod reduce;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use parse::{parse_context, parse_term, parse_term_in, parse_type};
pub use print::print_term;
pub use reduce::{normalize, normalize_with_budget, substitute, substitute_unchecked, DEFAULT_STEP_BUDGET};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Base,
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Base => f.write_str("i"),
            Type::Arrow(a, b) => match **a {
                Type::Base => write!(f, "i->{b}"),
                Type::Arrow(..) => write!(f, "({a})->{b}"),
            },
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Eq)]
pub enum Term {
    Free(String),
    Bound(usize),
    App(Box<Term>, Box<Term>),
    /// Name hint, annotation, body.
    Lam(String, Type, Box<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Free(a), Term::Free(b)) => a == b,
            (Term::Bound(a), Term::Bound(b)) => a == b,
            (Term::App(f1, a1), Term::App(f2, a2)) => f1 == f2 && a1 == a2,
            (Term::Lam(_, t1, b1), Term::Lam(_, t2, b2)) => t1 == t2 && b1 == b2,
            _ => false,
        }
    }
}

// name hints are not part of a term's identity
impl std::hash::Hash for Term {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        std::mem::discriminant(self).hash(h);
        match self {
            Term::Free(a) => a.hash(h),
            Term::Bound(i) => i.hash(h),
            Term::App(f, a) => {
                f.hash(h);
                a.hash(h);
            }
            Term::Lam(_, t, b) => {
                t.hash(h);
                b.hash(h);
            }
        }
    }
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Free(name.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Abstracts the free variable `name`.
    pub fn lam(name: &str, ty: Type, body: Term) -> Term {
        Term::Lam(name.to_string(), ty, Box::new(body.close(name, 0)))
    }

    fn close(self, name: &str, depth: usize) -> Term {
        match self {
            Term::Free(n) if n == name => Term::Bound(depth),
            Term::App(f, a) => Term::app(f.close(name, depth), a.close(name, depth)),
            Term::Lam(h, t, b) => Term::Lam(h, t, Box::new(b.close(name, depth + 1))),
            t => t,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Free(n) => {
                out.insert(n.clone());
            }
            Term::Bound(_) => {}
            Term::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
            Term::Lam(_, _, b) => b.collect_free(out),
        }
    }

    /// No bound index escapes its binders.
    pub fn is_closed_locally(&self) -> bool {
        fn go(t: &Term, depth: usize) -> bool {
            match t {
                Term::Free(_) => true,
                Term::Bound(i) => *i < depth,
                Term::App(f, a) => go(f, depth) && go(a, depth),
                Term::Lam(_, _, b) => go(b, depth + 1),
            }
        }
        go(self, 0)
    }

    /// Contains no β-redex.
    pub fn is_normal(&self) -> bool {
        match self {
            Term::App(f, a) => !matches!(**f, Term::Lam(..)) && f.is_normal() && a.is_normal(),
            Term::Lam(_, _, b) => b.is_normal(),
            _ => true,
        }
    }

    pub fn as_free(&self) -> Option<&str> {
        match self {
            Term::Free(n) => Some(n),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Free(_) | Term::Bound(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Lam(_, _, b) => 1 + b.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print_term(self))
    }
}

/// Types of the free variables.
pub type TypeContext = BTreeMap<String, Type>;

/// A map from variables to terms.
pub type Substitution = BTreeMap<String, Term>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("dangling de Bruijn index {0}")]
    LooseIndex(usize),
    #[error("applying a term of non-arrow type {0}")]
    NotAFunction(Type),
    #[error("argument has type {found}, expected {expected}")]
    ArgumentMismatch { expected: Type, found: Type },
    #[error("substitution for {var} has type {found}, expected {expected}")]
    TypeMismatch { var: String, expected: Type, found: Type },
    #[error("normalization exceeded {0} steps")]
    StepLimit(usize),
}

pub fn typecheck(t: &Term, ctx: &TypeContext) -> Result<Type, LambdaError> {
    fn go(t: &Term, ctx: &TypeContext, binders: &mut Vec<Type>) -> Result<Type, LambdaError> {
        match t {
            Term::Free(n) => ctx.get(n).cloned().ok_or_else(|| LambdaError::Unbound(n.clone())),
            Term::Bound(i) => binders
                .len()
                .checked_sub(i + 1)
                .map(|j| binders[j].clone())
                .ok_or(LambdaError::LooseIndex(*i)),
            Term::App(f, a) => {
                let tf = go(f, ctx, binders)?;
                let ta = go(a, ctx, binders)?;
                match tf {
                    Type::Arrow(dom, cod) if *dom == ta => Ok(*cod),
                    Type::Arrow(dom, _) => Err(LambdaError::ArgumentMismatch {
                        expected: *dom,
                        found: ta,
                    }),
                    Type::Base => Err(LambdaError::NotAFunction(Type::Base)),
                }
            }
            Term::Lam(_, ty, b) => {
                binders.push(ty.clone());
                let tb = go(b, ctx, binders);
                binders.pop();
                Ok(Type::arrow(ty.clone(), tb?))
            }
        }
    }
    go(t, ctx, &mut Vec::new())
}

pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a == b
}
