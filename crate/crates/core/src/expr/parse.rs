use std::collections::BTreeSet;

use super::{Expr, ExprError, Var, PI_NAME, RESERVED};

/// Parses `text`, treating every identifier other than the variables,
/// functions and `pi` as a named constant.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    Parser::new(text, None).parse()
}

/// Parses `text`, rejecting identifiers that are neither reserved nor in
/// `declared`.
pub fn parse_with(text: &str, declared: &BTreeSet<String>) -> Result<Expr, ExprError> {
    Parser::new(text, Some(declared)).parse()
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Integer(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(n) => format!("number {n}"),
            Token::Integer(n) => format!("number {n}"),
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push((tok, start));
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let mut integral = true;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                integral = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lexeme = &text[start..i];
            let value: f64 = lexeme
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| ExprError::Syntax {
                    offset: start,
                    message: format!("malformed number `{lexeme}`"),
                })?;
            let tok = match lexeme.parse::<i64>() {
                Ok(n) if integral => Token::Integer(n),
                _ => Token::Number(value),
            };
            tokens.push((tok, start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push((Token::Ident(text[start..i].to_string()), start));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ExprError::Syntax {
                offset: start,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    tokens.push((Token::End, text.len()));
    Ok(tokens)
}

struct Parser<'a> {
    text: &'a str,
    declared: Option<&'a BTreeSet<String>>,
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, declared: Option<&'a BTreeSet<String>>) -> Self {
        Parser {
            text,
            declared,
            tokens: Vec::new(),
            pos: 0,
        }
    }

    fn parse(mut self) -> Result<Expr, ExprError> {
        self.tokens = tokenize(self.text)?;
        let expr = self.expr()?;
        match self.peek() {
            Token::End => Ok(expr),
            other => Err(self.unexpected(other.clone())),
        }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, tok: Token) -> ExprError {
        ExprError::Syntax {
            offset: self.offset(),
            message: format!("unexpected {}", tok.describe()),
        }
    }

    fn expect(&mut self, want: Token) -> Result<(), ExprError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ExprError::Syntax {
                offset: self.offset(),
                message: format!("expected {}, found {}", want.describe(), self.peek().describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = lhs + self.term()?;
                }
                Token::Minus => {
                    self.bump();
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    lhs = lhs * self.factor()?;
                }
                Token::Slash => {
                    self.bump();
                    lhs = lhs / self.factor()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Token::Minus {
            self.bump();
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if *self.peek() != Token::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Token::Minus {
            self.bump();
            true
        } else {
            false
        };
        let offset = self.offset();
        let exponent = match self.bump() {
            Token::Integer(n) => {
                if negative {
                    -n
                } else {
                    n
                }
            }
            other => {
                return Err(ExprError::Syntax {
                    offset,
                    message: format!("exponent must be an integer, found {}", other.describe()),
                })
            }
        };
        let exponent = i32::try_from(exponent).map_err(|_| ExprError::Syntax {
            offset,
            message: format!("exponent {exponent} out of range"),
        })?;
        if *self.peek() == Token::Caret {
            return Err(ExprError::Syntax {
                offset: self.offset(),
                message: "chained exponents need parentheses".into(),
            });
        }
        Ok(base.powi(exponent))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.bump() {
            Token::Number(value) => Ok(Expr::Num(value)),
            Token::Integer(n) => Ok(Expr::Num(n as f64)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Token::Ident(name) => self.identifier(name, offset),
            Token::End => Err(ExprError::Syntax {
                offset,
                message: "unexpected end of input".into(),
            }),
            other => Err(ExprError::Syntax {
                offset,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<Expr, ExprError> {
        let call = *self.peek() == Token::LParen;
        let function: Option<fn(Expr) -> Expr> = match name.as_str() {
            "sin" => Some(Expr::sin),
            "cos" => Some(Expr::cos),
            "exp" => Some(Expr::exp),
            _ => None,
        };
        if call {
            let Some(apply) = function else {
                if RESERVED.contains(&name.as_str()) {
                    return Err(ExprError::Syntax {
                        offset: self.offset(),
                        message: format!("`{name}` is not a function"),
                    });
                }
                return Err(ExprError::UnknownIdentifier { name, offset });
            };
            self.bump();
            let arg = self.expr()?;
            self.expect(Token::RParen)?;
            return Ok(apply(arg));
        }
        if function.is_some() {
            return Err(ExprError::Syntax {
                offset: self.offset(),
                message: format!("expected `(` after `{name}`"),
            });
        }
        if let Some(var) = Var::from_name(&name) {
            return Ok(Expr::Var(var));
        }
        if name == PI_NAME {
            return Ok(Expr::Const(name));
        }
        match self.declared {
            Some(declared) if !declared.contains(&name) => Err(ExprError::UnknownIdentifier { name, offset }),
            _ => Ok(Expr::Const(name)),
        }
    }
}
