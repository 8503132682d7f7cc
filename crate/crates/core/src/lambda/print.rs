use std::collections::BTreeSet;

use super::Term;

/// Named rendering. Binder hints are primed until they clash neither with a
/// free variable of the term nor with an enclosing binder.
pub fn print_term(t: &Term) -> String {
    let free = t.free_vars();
    let mut out = String::new();
    let mut scope = Vec::new();
    write_term(t, &free, &mut scope, &mut out);
    out
}

fn fresh(hint: &str, free: &BTreeSet<String>, scope: &[String]) -> String {
    let mut name = if hint.is_empty() {
        "x".to_string()
    } else {
        hint.to_string()
    };
    while free.contains(&name) || scope.contains(&name) {
        name.push('\'');
    }
    name
}

fn write_term(t: &Term, free: &BTreeSet<String>, scope: &mut Vec<String>, out: &mut String) {
    match t {
        Term::Lam(hint, ty, body) => {
            let name = fresh(hint, free, scope);
            out.push('\\');
            out.push_str(&name);
            out.push(':');
            out.push_str(&ty.to_string());
            out.push_str(". ");
            scope.push(name);
            write_term(body, free, scope, out);
            scope.pop();
        }
        Term::App(..) => {
            let mut spine = Vec::new();
            let mut head = t;
            while let Term::App(f, a) = head {
                spine.push(&**a);
                head = f;
            }
            out.push('(');
            write_atom(head, free, scope, out);
            for a in spine.into_iter().rev() {
                out.push(' ');
                write_atom(a, free, scope, out);
            }
            out.push(')');
        }
        _ => write_atom(t, free, scope, out),
    }
}

fn write_atom(t: &Term, free: &BTreeSet<String>, scope: &mut Vec<String>, out: &mut String) {
    match t {
        Term::Free(n) => out.push_str(n),
        Term::Bound(i) => match scope.len().checked_sub(i + 1) {
            Some(j) => out.push_str(&scope[j]),
            None => out.push_str(&format!("#{i}")),
        },
        Term::App(..) => write_term(t, free, scope, out),
        Term::Lam(..) => {
            out.push('(');
            write_term(t, free, scope, out);
            out.push(')');
        }
    }
}
