use super::{typecheck, LambdaError, Substitution, Term, TypeContext};

/// β-steps allowed by [`normalize`].
pub const DEFAULT_STEP_BUDGET: usize = 100_000;

/// Simultaneous substitution of free variables after checking that each
/// image has its variable's type: `σ(x): Γ'` must have type `Γ(x)`.
pub fn substitute(t: &Term, sigma: &Substitution, from: &TypeContext, to: &TypeContext) -> Result<Term, LambdaError> {
    for (var, image) in sigma {
        let expected = from.get(var).ok_or_else(|| LambdaError::Unbound(var.clone()))?;
        let found = typecheck(image, to)?;
        if found != *expected {
            return Err(LambdaError::TypeMismatch {
                var: var.clone(),
                expected: expected.clone(),
                found,
            });
        }
    }
    Ok(substitute_unchecked(t, sigma))
}

/// Substitution without type checks. Images must be locally closed; since
/// bound variables are indices, no capture can occur.
pub fn substitute_unchecked(t: &Term, sigma: &Substitution) -> Term {
    match t {
        Term::Free(n) => sigma.get(n).cloned().unwrap_or_else(|| t.clone()),
        Term::Bound(_) => t.clone(),
        Term::App(f, a) => Term::app(substitute_unchecked(f, sigma), substitute_unchecked(a, sigma)),
        Term::Lam(h, ty, b) => Term::Lam(h.clone(), ty.clone(), Box::new(substitute_unchecked(b, sigma))),
    }
}

fn shift(t: &Term, by: isize, cutoff: usize) -> Term {
    match t {
        Term::Bound(i) if *i >= cutoff => Term::Bound((*i as isize + by) as usize),
        Term::App(f, a) => Term::app(shift(f, by, cutoff), shift(a, by, cutoff)),
        Term::Lam(h, ty, b) => Term::Lam(h.clone(), ty.clone(), Box::new(shift(b, by, cutoff + 1))),
        _ => t.clone(),
    }
}

fn replace(t: &Term, j: usize, s: &Term) -> Term {
    match t {
        Term::Bound(i) if *i == j => shift(s, j as isize, 0),
        Term::App(f, a) => Term::app(replace(f, j, s), replace(a, j, s)),
        Term::Lam(h, ty, b) => Term::Lam(h.clone(), ty.clone(), Box::new(replace(b, j + 1, s))),
        _ => t.clone(),
    }
}

/// `(λ.body) arg` contracted.
fn beta(body: &Term, arg: &Term) -> Term {
    shift(&replace(body, 0, &shift(arg, 1, 0)), -1, 0)
}

/// β-normal form by normal-order reduction.
pub fn normalize(t: &Term) -> Result<Term, LambdaError> {
    normalize_with_budget(t, DEFAULT_STEP_BUDGET)
}

/// As [`normalize`], failing after `budget` contractions. Simply typed terms
/// terminate; the budget guards ill-typed input.
pub fn normalize_with_budget(t: &Term, budget: usize) -> Result<Term, LambdaError> {
    let mut left = budget;
    nf(t.clone(), &mut left, budget)
}

fn nf(t: Term, left: &mut usize, budget: usize) -> Result<Term, LambdaError> {
    let mut t = t;
    // contract head redexes iteratively so long reductions do not recurse
    loop {
        match t {
            Term::Lam(h, ty, b) => return Ok(Term::Lam(h, ty, Box::new(nf(*b, left, budget)?))),
            Term::App(..) => {
                let mut args = Vec::new();
                let mut head = t;
                while let Term::App(f, a) = head {
                    args.push(*a);
                    head = *f;
                }
                args.reverse();
                if let Term::Lam(_, _, body) = &head {
                    if *left == 0 {
                        return Err(LambdaError::StepLimit(budget));
                    }
                    *left -= 1;
                    let mut rest = args.into_iter();
                    let first = rest.next().expect("spine has an argument");
                    t = Term::apps(beta(body, &first), rest);
                    continue;
                }
                let mut acc = head;
                for a in args {
                    acc = Term::app(acc, nf(a, left, budget)?);
                }
                return Ok(acc);
            }
            t => return Ok(t),
        }
    }
}
