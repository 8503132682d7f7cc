use super::{LambdaError, Term, Type, TypeContext};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Lambda,
    Colon,
    Dot,
    LParen,
    RParen,
    Arrow,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, LambdaError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '\\' | 'λ' => {
                out.push((pos, Tok::Lambda));
                i += 1;
            }
            ':' => {
                out.push((pos, Tok::Colon));
                i += 1;
            }
            '.' => {
                out.push((pos, Tok::Dot));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            '-' if chars.get(i + 1).map(|c| c.1) == Some('>') => {
                out.push((pos, Tok::Arrow));
                i += 2;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '\'') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|c| c.1).collect();
                out.push((pos, Tok::Ident(s)));
            }
            other => {
                return Err(LambdaError::Syntax {
                    pos,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    binders: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, LambdaError> {
        Err(LambdaError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LambdaError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String, LambdaError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.fail("expected identifier"),
        }
    }

    fn ty(&mut self) -> Result<Type, LambdaError> {
        let left = match self.peek() {
            Some(Tok::Ident(s)) if s == "i" => {
                self.at += 1;
                Type::Base
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let t = self.ty()?;
                self.expect(Tok::RParen, "')'")?;
                t
            }
            _ => return self.fail("expected type"),
        };
        if self.peek() == Some(&Tok::Arrow) {
            self.at += 1;
            Ok(Type::arrow(left, self.ty()?))
        } else {
            Ok(left)
        }
    }

    fn term(&mut self) -> Result<Term, LambdaError> {
        if self.peek() == Some(&Tok::Lambda) {
            return self.lambda();
        }
        let mut acc = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let a = self.atom()?;
                    acc = Term::app(acc, a);
                }
                Some(Tok::Lambda) => {
                    let a = self.lambda()?;
                    return Ok(Term::app(acc, a));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn lambda(&mut self) -> Result<Term, LambdaError> {
        self.expect(Tok::Lambda, "'\\'")?;
        let name = self.ident()?;
        self.expect(Tok::Colon, "':'")?;
        let ty = self.ty()?;
        self.expect(Tok::Dot, "'.'")?;
        self.binders.push(name.clone());
        let body = self.term();
        self.binders.pop();
        Ok(Term::Lam(name, ty, Box::new(body?)))
    }

    fn atom(&mut self) -> Result<Term, LambdaError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                Ok(match self.binders.iter().rev().position(|b| *b == name) {
                    Some(i) => Term::Bound(i),
                    None => Term::Free(name),
                })
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => self.fail("expected term"),
        }
    }
}

fn parser(src: &str) -> Result<Parser, LambdaError> {
    Ok(Parser {
        toks: lex(src)?,
        at: 0,
        end: src.len(),
        binders: Vec::new(),
    })
}

/// Parses a term; free variables are left unchecked.
pub fn parse_term(src: &str) -> Result<Term, LambdaError> {
    let mut p = parser(src)?;
    let t = p.term()?;
    if p.at != p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(t)
}

/// Parses a term whose free variables must all be declared in `ctx`.
pub fn parse_term_in(src: &str, ctx: &TypeContext) -> Result<Term, LambdaError> {
    let t = parse_term(src)?;
    if let Some(v) = t.free_vars().into_iter().find(|v| !ctx.contains_key(v)) {
        return Err(LambdaError::Unbound(v));
    }
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<Type, LambdaError> {
    let mut p = parser(src)?;
    let t = p.ty()?;
    if p.at != p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(t)
}

pub fn parse_context<'a, I>(vars: I) -> Result<TypeContext, LambdaError>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    vars.into_iter()
        .map(|(v, t)| Ok((v.to_string(), parse_type(t)?)))
        .collect()
}
