use num_bigint::BigInt;

use super::context::Context;
use super::expr::{Expr, Q};
use super::SymError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SymError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'_' && bytes[i + 1].is_ascii_alphanumeric() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(SymError::Parse {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((start, tok));
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a Context,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

pub(crate) fn parse(ctx: &Context, text: &str) -> Result<Expr, SymError> {
    let toks = lex(text)?;
    let mut p = Parser {
        ctx,
        toks,
        pos: 0,
        end: text.len(),
    };
    if p.toks.is_empty() {
        return Err(SymError::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let e = p.additive()?;
    if p.pos < p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn error(&self, msg: &str) -> SymError {
        SymError::Parse {
            pos: self.offset(),
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SymError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn additive(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.multiplicative()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.multiplicative()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn multiplicative(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            let at = self.offset();
            self.pos += 1;
            let rhs = self.unary()?;
            if op == '*' {
                acc = acc * rhs;
            } else {
                if rhs.is_zero() {
                    return Err(SymError::Parse {
                        pos: at,
                        msg: SymError::DivisionByZero.to_string(),
                    });
                }
                acc = acc / rhs;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, SymError> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SymError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let exponent = self.unary()?;
            if base.is_zero() && exponent.as_num().is_some_and(|q| *q < Q::from_integer(0.into())) {
                return Err(self.error(&SymError::DivisionByZero.to_string()));
            }
            return Ok(base.pow_expr(&exponent));
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<Expr>, SymError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = vec![self.additive()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            out.push(self.additive()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }

    fn primary(&mut self) -> Result<Expr, SymError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::num(Q::from_integer(n)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.additive()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.identifier(&name, at)
            }
            Some(_) => Err(self.error("expected an operand")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn identifier(&mut self, name: &str, at: usize) -> Result<Expr, SymError> {
        let has_args = self.peek() == Some(&Tok::LParen);
        if self.ctx.has_symbol(name) && !has_args {
            return Ok(Expr::sym(name));
        }
        let resolved = match self.ctx.function(name) {
            Some(f) => Some((f.clone(), vec![0; f.arity()])),
            None => self.ctx.resolve_derived(name),
        };
        if let Some((f, derivs)) = resolved {
            let args = if has_args { self.args()? } else { f.default_args() };
            if args.len() != f.arity() {
                return Err(SymError::Arity {
                    name: name.to_string(),
                    expected: f.arity(),
                    got: args.len(),
                });
            }
            return Ok(Expr::apply(&f, derivs, args));
        }
        let builtin = match name {
            "exp" => Some(Expr::exp as fn(&Expr) -> Expr),
            "ln" => Some(Expr::ln as fn(&Expr) -> Expr),
            "lambertw" => Some(Expr::lambertw as fn(&Expr) -> Expr),
            _ => None,
        };
        if let Some(op) = builtin {
            if !has_args {
                return Err(SymError::Parse {
                    pos: at,
                    msg: format!("`{name}` must be applied to an argument"),
                });
            }
            let args = self.args()?;
            if args.len() != 1 {
                return Err(SymError::Arity {
                    name: name.to_string(),
                    expected: 1,
                    got: args.len(),
                });
            }
            if name == "ln" && args[0].is_zero() {
                return Err(SymError::Parse {
                    pos: at,
                    msg: "logarithm of zero".into(),
                });
            }
            return Ok(op(&args[0]));
        }
        if self.ctx.has_symbol(name) {
            return Err(SymError::Parse {
                pos: at,
                msg: format!("`{name}` is a symbol, not a function"),
            });
        }
        Err(SymError::Undeclared(name.to_string()))
    }
}
