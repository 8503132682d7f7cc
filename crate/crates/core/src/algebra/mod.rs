//! Many-sorted first-order terms as attribute values, with the cloud
//! administration signature built in.

mod config;
mod eval;
mod sexpr;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

pub use config::{CloudConfig, ConfigError, Machine, Vm};
pub use eval::{evaluate, first_order_match, guard_eval, match_into, Valuation};
pub use sexpr::parse_term;

pub type Sort = String;

pub const BOOL: &str = "B";
pub const NAT: &str = "N";
pub const VMTYPE: &str = "T";
pub const CONFIG: &str = "C";

/// Operations with a built-in interpretation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    And,
    Or,
    Not,
    Add,
    Sub,
    Leq,
    Lt,
    Eq,
    NewId,
    EnoughSpace,
    NewVm,
    ReplVm,
    NewMch,
    MergeMch,
    ReplicateAdm,
    ShareLoad,
    FreshMch,
    IsHost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    /// Free constructor: builds values, may occur in patterns.
    Constructor,
    Defined(Builtin),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub args: Vec<Sort>,
    pub result: Sort,
    pub kind: OpKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub sorts: BTreeSet<Sort>,
    pub ops: BTreeMap<String, OpDecl>,
    /// Sorts whose values may attribute graph elements.
    pub attribute_sorts: BTreeSet<Sort>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("unknown sort {0}")]
    UnknownSort(String),
    #[error("unknown operation or variable {0}")]
    UnknownOp(String),
    #[error("{op} expects {expected} arguments, got {found}")]
    Arity { op: String, expected: usize, found: usize },
    #[error("argument {index} of {op} has sort {found}, expected {expected}")]
    SortMismatch {
        op: String,
        index: usize,
        expected: Sort,
        found: Sort,
    },
    #[error("operation {op} is already declared")]
    Redeclared { op: String },
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("variable {var} bound to a value of sort {found}, expected {expected}")]
    ValuationSort { var: String, expected: Sort, found: Sort },
    #[error("defined operation {0} cannot occur in a pattern")]
    DefinedInPattern(String),
    #[error("guard has sort {0}, expected B")]
    GuardSort(Sort),
    #[error("sort {0} cannot attribute graph elements")]
    NotAttributeSort(Sort),
    #[error("{op}: {source}")]
    Interpretation {
        op: String,
        #[source]
        source: ConfigError,
    },
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("value contains the variable {0}")]
    NotGround(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgTerm {
    Var(String, Sort),
    Nat(BigUint),
    Bool(bool),
    Config(Box<CloudConfig>),
    App(String, Vec<AlgTerm>),
}

impl AlgTerm {
    pub fn nat(n: u64) -> AlgTerm {
        AlgTerm::Nat(BigUint::from(n))
    }

    pub fn constant(name: &str) -> AlgTerm {
        AlgTerm::App(name.to_string(), Vec::new())
    }

    pub fn app(op: &str, args: Vec<AlgTerm>) -> AlgTerm {
        AlgTerm::App(op.to_string(), args)
    }

    pub fn vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) {
        match self {
            AlgTerm::Var(v, s) => {
                out.insert(v.clone(), s.clone());
            }
            AlgTerm::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            AlgTerm::Var(v, _) => Some(v),
            _ => None,
        }
    }

    /// Built only from constructors and literals, with no variables.
    pub fn is_value(&self, sig: &Signature) -> bool {
        match self {
            AlgTerm::Var(..) => false,
            AlgTerm::App(op, args) => {
                matches!(sig.ops.get(op), Some(d) if d.kind == OpKind::Constructor)
                    && args.iter().all(|a| a.is_value(sig))
            }
            _ => true,
        }
    }

    /// Defined operations occurring in the term.
    pub fn defined_ops(&self, sig: &Signature) -> Vec<String> {
        let mut out = Vec::new();
        fn go(t: &AlgTerm, sig: &Signature, out: &mut Vec<String>) {
            if let AlgTerm::App(op, args) = t {
                if matches!(sig.ops.get(op), Some(d) if matches!(d.kind, OpKind::Defined(_))) {
                    out.push(op.clone());
                }
                args.iter().for_each(|a| go(a, sig, out));
            }
        }
        go(self, sig, &mut out);
        out
    }
}

impl fmt::Display for AlgTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgTerm::Var(v, _) => f.write_str(v),
            AlgTerm::Nat(n) => write!(f, "{n}"),
            AlgTerm::Bool(b) => write!(f, "{b}"),
            AlgTerm::Config(c) => write!(f, "{c}"),
            AlgTerm::App(op, args) if args.is_empty() => f.write_str(op),
            AlgTerm::App(op, args) => {
                write!(f, "({op}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn decl(args: &[&str], result: &str, kind: OpKind) -> OpDecl {
    OpDecl {
        args: args.iter().map(|s| s.to_string()).collect(),
        result: result.to_string(),
        kind,
    }
}

impl Signature {
    pub fn empty() -> Self {
        Self {
            sorts: BTreeSet::new(),
            ops: BTreeMap::new(),
            attribute_sorts: BTreeSet::new(),
        }
    }

    /// Booleans, naturals and the cloud administration operations, with
    /// record constructors for the entities of the cloud graph:
    /// `(mch id size free)`, `(vm id size type)`, `(user id)`, and edge
    /// labels `knows`, `stores`, `monitors`, `hosts`, `serves`,
    /// `(req type idVM)`.
    pub fn cloud() -> Self {
        use Builtin::*;
        use OpKind::{Constructor as K, Defined as D};
        let mut sig = Self::empty();
        for s in [BOOL, NAT, VMTYPE, CONFIG, "Mch", "VM", "Usr", "E"] {
            sig.sorts.insert(s.to_string());
            sig.attribute_sorts.insert(s.to_string());
        }
        let ops: Vec<(&str, OpDecl)> = vec![
            ("and", decl(&[BOOL, BOOL], BOOL, D(And))),
            ("or", decl(&[BOOL, BOOL], BOOL, D(Or))),
            ("not", decl(&[BOOL], BOOL, D(Not))),
            ("add", decl(&[NAT, NAT], NAT, D(Add))),
            ("sub", decl(&[NAT, NAT], NAT, D(Sub))),
            ("leq", decl(&[NAT, NAT], BOOL, D(Leq))),
            ("lt", decl(&[NAT, NAT], BOOL, D(Lt))),
            ("eq", decl(&[NAT, NAT], BOOL, D(Eq))),
            ("newId", decl(&[CONFIG, NAT], BOOL, D(NewId))),
            ("enoughSpace", decl(&[CONFIG, NAT], BOOL, D(EnoughSpace))),
            ("newVM", decl(&[CONFIG, NAT, NAT, NAT, VMTYPE], CONFIG, D(NewVm))),
            ("replVM", decl(&[CONFIG, NAT, NAT], CONFIG, D(ReplVm))),
            ("newMch", decl(&[CONFIG, NAT, NAT, NAT], CONFIG, D(NewMch))),
            ("mergeMch", decl(&[CONFIG, NAT, NAT], CONFIG, D(MergeMch))),
            ("replicateAdm?", decl(&[CONFIG], BOOL, D(ReplicateAdm))),
            ("shareLoad", decl(&[CONFIG], CONFIG, D(ShareLoad))),
            ("freshMch", decl(&[CONFIG], NAT, D(FreshMch))),
            ("isHost", decl(&[CONFIG, NAT, NAT], BOOL, D(IsHost))),
            ("T1", decl(&[], VMTYPE, K)),
            ("T2", decl(&[], VMTYPE, K)),
            ("T3", decl(&[], VMTYPE, K)),
            ("mch", decl(&[NAT, NAT, NAT], "Mch", K)),
            ("vm", decl(&[NAT, NAT, VMTYPE], "VM", K)),
            ("user", decl(&[NAT], "Usr", K)),
            ("knows", decl(&[], "E", K)),
            ("stores", decl(&[], "E", K)),
            ("monitors", decl(&[], "E", K)),
            ("hosts", decl(&[], "E", K)),
            ("serves", decl(&[], "E", K)),
            ("req", decl(&[VMTYPE, NAT], "E", K)),
        ];
        for (name, d) in ops {
            sig.ops.insert(name.to_string(), d);
        }
        sig
    }

    /// Declares a further free constructor, adding unseen sorts as
    /// attribute sorts.
    pub fn add_constructor(&mut self, name: &str, args: &[&str], result: &str) -> Result<(), AlgError> {
        if self.ops.contains_key(name) {
            return Err(AlgError::Redeclared { op: name.to_string() });
        }
        for s in args.iter().chain(std::iter::once(&result)) {
            if self.sorts.insert(s.to_string()) {
                self.attribute_sorts.insert(s.to_string());
            }
        }
        self.ops
            .insert(name.to_string(), decl(args, result, OpKind::Constructor));
        Ok(())
    }

    /// Checks that every operation profile uses declared sorts.
    pub fn validate(&self) -> Result<(), AlgError> {
        for d in self.ops.values() {
            for s in d.args.iter().chain(std::iter::once(&d.result)) {
                if !self.sorts.contains(s) {
                    return Err(AlgError::UnknownSort(s.clone()));
                }
            }
        }
        if let Some(s) = self.attribute_sorts.iter().find(|s| !self.sorts.contains(*s)) {
            return Err(AlgError::UnknownSort(s.clone()));
        }
        Ok(())
    }
}

pub fn sort_check(t: &AlgTerm, sig: &Signature) -> Result<Sort, AlgError> {
    match t {
        AlgTerm::Var(v, s) => {
            if sig.sorts.contains(s) {
                Ok(s.clone())
            } else {
                Err(AlgError::UnknownSort(format!("{s} (variable {v})")))
            }
        }
        AlgTerm::Nat(_) => Ok(NAT.to_string()),
        AlgTerm::Bool(_) => Ok(BOOL.to_string()),
        AlgTerm::Config(_) => Ok(CONFIG.to_string()),
        AlgTerm::App(op, args) => {
            let d = sig.ops.get(op).ok_or_else(|| AlgError::UnknownOp(op.clone()))?;
            if d.args.len() != args.len() {
                return Err(AlgError::Arity {
                    op: op.clone(),
                    expected: d.args.len(),
                    found: args.len(),
                });
            }
            for (i, (a, want)) in args.iter().zip(&d.args).enumerate() {
                let found = sort_check(a, sig)?;
                if found != *want {
                    return Err(AlgError::SortMismatch {
                        op: op.clone(),
                        index: i,
                        expected: want.clone(),
                        found,
                    });
                }
            }
            Ok(d.result.clone())
        }
    }
}
