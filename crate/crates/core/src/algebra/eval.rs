use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::{sort_check, AlgError, AlgTerm, Builtin, CloudConfig, ConfigError, OpKind, Signature, BOOL};

/// Values for sorted variables.
pub type Valuation = BTreeMap<String, AlgTerm>;

/// Evaluates innermost-first: constructors build values, defined operations
/// run their built-in interpretation.
pub fn evaluate(t: &AlgTerm, sig: &Signature, v: &Valuation) -> Result<AlgTerm, AlgError> {
    match t {
        AlgTerm::Var(name, _) => v.get(name).cloned().ok_or_else(|| AlgError::Unbound(name.clone())),
        AlgTerm::App(op, args) => {
            let d = sig.ops.get(op).ok_or_else(|| AlgError::UnknownOp(op.clone()))?;
            let vals = args
                .iter()
                .map(|a| evaluate(a, sig, v))
                .collect::<Result<Vec<_>, _>>()?;
            match d.kind {
                OpKind::Constructor => Ok(AlgTerm::App(op.clone(), vals)),
                OpKind::Defined(b) => interpret(op, b, &vals),
            }
        }
        lit => Ok(lit.clone()),
    }
}

fn bad(op: &str) -> AlgError {
    AlgError::Interpretation {
        op: op.to_string(),
        source: ConfigError::Malformed("ill-sorted arguments".into()),
    }
}

fn interpret(op: &str, b: Builtin, args: &[AlgTerm]) -> Result<AlgTerm, AlgError> {
    let nat = |i: usize| -> Result<&BigUint, AlgError> {
        match args.get(i) {
            Some(AlgTerm::Nat(n)) => Ok(n),
            _ => Err(bad(op)),
        }
    };
    let boolean = |i: usize| -> Result<bool, AlgError> {
        match args.get(i) {
            Some(AlgTerm::Bool(b)) => Ok(*b),
            _ => Err(bad(op)),
        }
    };
    let config = |i: usize| -> Result<&CloudConfig, AlgError> {
        match args.get(i) {
            Some(AlgTerm::Config(c)) => Ok(c),
            _ => Err(bad(op)),
        }
    };
    let constant = |i: usize| -> Result<&str, AlgError> {
        match args.get(i) {
            Some(AlgTerm::App(name, a)) if a.is_empty() => Ok(name),
            _ => Err(bad(op)),
        }
    };
    let lift = |r: Result<CloudConfig, ConfigError>| -> Result<AlgTerm, AlgError> {
        r.map(|c| AlgTerm::Config(Box::new(c)))
            .map_err(|source| AlgError::Interpretation {
                op: op.to_string(),
                source,
            })
    };
    use Builtin::*;
    Ok(match b {
        And => AlgTerm::Bool(boolean(0)? && boolean(1)?),
        Or => AlgTerm::Bool(boolean(0)? || boolean(1)?),
        Not => AlgTerm::Bool(!boolean(0)?),
        Add => AlgTerm::Nat(nat(0)? + nat(1)?),
        Sub => {
            let (a, b) = (nat(0)?, nat(1)?);
            AlgTerm::Nat(if a > b { a - b } else { BigUint::default() })
        }
        Leq => AlgTerm::Bool(nat(0)? <= nat(1)?),
        Lt => AlgTerm::Bool(nat(0)? < nat(1)?),
        Eq => AlgTerm::Bool(nat(0)? == nat(1)?),
        NewId => AlgTerm::Bool(config(0)?.new_id(nat(1)?)),
        EnoughSpace => AlgTerm::Bool(config(0)?.enough_space(nat(1)?)),
        NewVm => return lift(config(0)?.new_vm(nat(1)?, nat(2)?, nat(3)?, constant(4)?)),
        ReplVm => return lift(config(0)?.repl_vm(nat(1)?, nat(2)?)),
        NewMch => return lift(config(0)?.new_mch(nat(1)?, nat(2)?, nat(3)?)),
        MergeMch => return lift(config(0)?.merge_mch(nat(1)?, nat(2)?)),
        ReplicateAdm => AlgTerm::Bool(config(0)?.replicate_adm()),
        ShareLoad => AlgTerm::Config(Box::new(config(0)?.share_load())),
        FreshMch => AlgTerm::Nat(config(0)?.fresh_mch()),
        IsHost => AlgTerm::Bool(config(0)?.is_host(nat(1)?, nat(2)?)),
    })
}

/// The most general valuation making `pattern` equal to `value`.
pub fn first_order_match(pattern: &AlgTerm, value: &AlgTerm, sig: &Signature) -> Result<Option<Valuation>, AlgError> {
    let mut v = Valuation::new();
    Ok(match_into(pattern, value, sig, &mut v)?.then_some(v))
}

/// Extends `v` to match `pattern` against `value`, leaving it untouched on
/// failure. Variables already bound must agree.
pub fn match_into(pattern: &AlgTerm, value: &AlgTerm, sig: &Signature, v: &mut Valuation) -> Result<bool, AlgError> {
    if let Some(op) = pattern.defined_ops(sig).into_iter().next() {
        return Err(AlgError::DefinedInPattern(op));
    }
    let mut work = v.clone();
    if go(pattern, value, sig, &mut work)? {
        *v = work;
        Ok(true)
    } else {
        Ok(false)
    }
}

fn go(p: &AlgTerm, val: &AlgTerm, sig: &Signature, v: &mut Valuation) -> Result<bool, AlgError> {
    match p {
        AlgTerm::Var(name, sort) => {
            if let Some(bound) = v.get(name) {
                return Ok(bound == val);
            }
            if !val.is_ground() {
                return Err(AlgError::NotGround(val.vars().into_keys().next().unwrap_or_default()));
            }
            if sort_check(val, sig)? != *sort {
                return Ok(false);
            }
            v.insert(name.clone(), val.clone());
            Ok(true)
        }
        AlgTerm::App(op, args) => match val {
            AlgTerm::App(vop, vargs) if vop == op && vargs.len() == args.len() => {
                for (a, b) in args.iter().zip(vargs) {
                    if !go(a, b, sig, v)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        },
        lit => Ok(lit == val),
    }
}

/// Conjunction of boolean guards; an empty list holds.
pub fn guard_eval(guards: &[AlgTerm], sig: &Signature, v: &Valuation) -> Result<bool, AlgError> {
    for g in guards {
        let s = sort_check(g, sig)?;
        if s != BOOL {
            return Err(AlgError::GuardSort(s));
        }
        match evaluate(g, sig, v)? {
            AlgTerm::Bool(true) => {}
            AlgTerm::Bool(false) => return Ok(false),
            _ => return Err(bad("guard")),
        }
    }
    Ok(true)
}
