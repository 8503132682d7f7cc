use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::{AlgError, AlgTerm, CloudConfig, Signature, Sort};

enum Tok {
    Open,
    Close,
    Atom(String),
    Json(String),
}

fn syntax(pos: usize, msg: impl Into<String>) -> AlgError {
    AlgError::Syntax { pos, msg: msg.into() }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, AlgError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b if b.is_ascii_whitespace() => i += 1,
            b'(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            b'{' => {
                let start = i;
                let mut depth = 0usize;
                let mut in_str = false;
                while i < bytes.len() {
                    let c = bytes[i];
                    if in_str {
                        if c == b'\\' {
                            i += 1;
                        } else if c == b'"' {
                            in_str = false;
                        }
                    } else if c == b'"' {
                        in_str = true;
                    } else if c == b'{' {
                        depth += 1;
                    } else if c == b'}' {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(syntax(start, "unterminated configuration"));
                }
                i += 1;
                out.push((start, Tok::Json(src[start..i].to_string())));
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !b"(){}".contains(&bytes[i]) {
                    i += 1;
                }
                out.push((start, Tok::Atom(src[start..i].to_string())));
            }
        }
    }
    Ok(out)
}

/// Parses an s-expression. Identifiers declared in `vars` are variables,
/// other identifiers must be operations of `sig`; `{...}` is an inline
/// configuration in JSON.
pub fn parse_term(src: &str, sig: &Signature, vars: &BTreeMap<String, Sort>) -> Result<AlgTerm, AlgError> {
    let toks = lex(src)?;
    let mut at = 0;
    let t = parse_at(&toks, &mut at, src.len(), sig, vars)?;
    if at != toks.len() {
        return Err(syntax(toks[at].0, "trailing input"));
    }
    Ok(t)
}

fn atom(pos: usize, s: &str, sig: &Signature, vars: &BTreeMap<String, Sort>) -> Result<AlgTerm, AlgError> {
    if s.bytes().all(|b| b.is_ascii_digit()) {
        return s
            .parse::<BigUint>()
            .map(AlgTerm::Nat)
            .map_err(|_| syntax(pos, "bad number"));
    }
    match s {
        "true" => return Ok(AlgTerm::Bool(true)),
        "false" => return Ok(AlgTerm::Bool(false)),
        _ => {}
    }
    if let Some(sort) = vars.get(s) {
        return Ok(AlgTerm::Var(s.to_string(), sort.clone()));
    }
    if sig.ops.contains_key(s) {
        return Ok(AlgTerm::App(s.to_string(), Vec::new()));
    }
    Err(AlgError::UnknownOp(s.to_string()))
}

fn parse_at(
    toks: &[(usize, Tok)],
    at: &mut usize,
    end: usize,
    sig: &Signature,
    vars: &BTreeMap<String, Sort>,
) -> Result<AlgTerm, AlgError> {
    let Some((pos, tok)) = toks.get(*at) else {
        return Err(syntax(end, "expected term"));
    };
    *at += 1;
    match tok {
        Tok::Atom(s) => atom(*pos, s, sig, vars),
        Tok::Json(text) => {
            let v: serde_json::Value = serde_json::from_str(text).map_err(|e| syntax(*pos, e.to_string()))?;
            CloudConfig::from_json(&v)
                .map(|c| AlgTerm::Config(Box::new(c)))
                .map_err(|e| syntax(*pos, e.to_string()))
        }
        Tok::Close => Err(syntax(*pos, "unexpected ')'")),
        Tok::Open => {
            let head = match toks.get(*at) {
                Some((_, Tok::Atom(s))) => s.clone(),
                Some((p, _)) => return Err(syntax(*p, "expected operation name")),
                None => return Err(syntax(end, "unterminated list")),
            };
            if !sig.ops.contains_key(&head) {
                return Err(AlgError::UnknownOp(head));
            }
            *at += 1;
            let mut args = Vec::new();
            loop {
                match toks.get(*at) {
                    Some((_, Tok::Close)) => {
                        *at += 1;
                        return Ok(AlgTerm::App(head, args));
                    }
                    Some(_) => args.push(parse_at(toks, at, end, sig, vars)?),
                    None => return Err(syntax(end, "unterminated list")),
                }
            }
        }
    }
}
