//! Minimal arithmetic expressions for config files: +, -, *, /, unary minus,
//! sin, cos, exp, numeric literals, the constant pi and a caller-declared
//! variable set. Deliberately not a scripting language.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    /// Parse `text` over the given variable names.
    pub fn parse(text: &str, variables: &[&str]) -> Result<Self> {
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0, variables, text };
        let expr = parser.expression()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.error("trailing input after expression"));
        }
        Ok(expr)
    }

    /// Evaluate with values in the same order as the parse-time variables.
    pub fn eval(&self, values: &[f64]) -> f64 {
        match self {
            Expr::Number(x) => *x,
            Expr::Var(i) => values[*i],
            Expr::Neg(e) => -e.eval(values),
            Expr::Add(a, b) => a.eval(values) + b.eval(values),
            Expr::Sub(a, b) => a.eval(values) - b.eval(values),
            Expr::Mul(a, b) => a.eval(values) * b.eval(values),
            Expr::Div(a, b) => a.eval(values) / b.eval(values),
            Expr::Sin(e) => e.eval(values).sin(),
            Expr::Cos(e) => e.eval(values).cos(),
            Expr::Exp(e) => e.eval(values).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, '0'..='9' | '.' | 'e' | 'E')
                {
                    // allow exponent signs
                    if matches!(bytes[i] as char, 'e' | 'E')
                        && i + 1 < bytes.len()
                        && matches!(bytes[i + 1] as char, '+' | '-')
                    {
                        i += 1;
                    }
                    i += 1;
                }
                let s = &text[start..i];
                let value = s.parse::<f64>().map_err(|_| Error::Validation {
                    field: "expression".into(),
                    message: format!("bad number literal '{s}'"),
                })?;
                tokens.push(Token::Number(value));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                tokens.push(Token::Ident(text[start..i].to_string()));
            }
            other => {
                return Err(Error::Validation {
                    field: "expression".into(),
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    variables: &'a [&'a str],
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Validation {
            field: "expression".into(),
            message: format!("{message} in '{}'", self.text),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Plus => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Star => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Token::Slash => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.advance() {
            Some(Token::Minus) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some(Token::Number(x)) => Ok(Expr::Number(x)),
            Some(Token::LParen) => {
                let inner = self.expression()?;
                match self.advance() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(self.error("missing ')'")),
                }
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "sin" | "cos" | "exp" => {
                    if self.advance() != Some(Token::LParen) {
                        return Err(self.error("function call needs '('"));
                    }
                    let inner = self.expression()?;
                    if self.advance() != Some(Token::RParen) {
                        return Err(self.error("missing ')' after function argument"));
                    }
                    Ok(match name.as_str() {
                        "sin" => Expr::Sin(Box::new(inner)),
                        "cos" => Expr::Cos(Box::new(inner)),
                        _ => Expr::Exp(Box::new(inner)),
                    })
                }
                "pi" => Ok(Expr::Number(std::f64::consts::PI)),
                _ => match self.variables.iter().position(|v| *v == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(self.error(&format!(
                        "unknown identifier '{name}' (variables: {})",
                        self.variables.join(", ")
                    ))),
                },
            },
            _ => Err(self.error("expected a value")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const VARS: [&str; 5] = ["s", "t", "kg", "kn", "taug"];

    fn eval(text: &str, values: &[f64]) -> f64 {
        Expr::parse(text, &VARS).unwrap().eval(values)
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval("1 + 2 * 3", &[0.0; 5]), 7.0);
        assert_eq!(eval("(1 + 2) * 3", &[0.0; 5]), 9.0);
        assert_eq!(eval("2 - 3 - 1", &[0.0; 5]), -2.0);
        assert_eq!(eval("-s * 2", &[1.5, 0.0, 0.0, 0.0, 0.0]), -3.0);
        assert_eq!(eval("6 / 2 / 3", &[0.0; 5]), 1.0);
    }

    #[test]
    fn functions_and_constants() {
        assert!((eval("sin(pi / 2)", &[0.0; 5]) - 1.0).abs() <= 1e-15);
        assert!((eval("cos(0) + exp(0)", &[0.0; 5]) - 2.0).abs() <= 1e-15);
        assert!((eval("sin(2 * s * pi / 6.0)", &[1.5, 0.0, 0.0, 0.0, 0.0])
            - (std::f64::consts::PI / 2.0).sin())
        .abs()
            <= 1e-15);
    }

    #[test]
    fn variables_resolve_in_order() {
        let v = [0.1, 0.2, 0.3, 0.4, 0.5];
        assert!((eval("kg * kn + taug - t", &v) - (0.3 * 0.4 + 0.5 - 0.2)).abs() <= 1e-15);
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(eval("1e-3 + 2.5e2", &[0.0; 5]), 0.001 + 250.0);
    }

    #[test]
    fn rejects_unknown_identifier() {
        assert!(Expr::parse("q + 1", &VARS).is_err());
        assert!(Expr::parse("sin(x)", &["u", "v"]).is_err());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Expr::parse("1 +", &VARS).is_err());
        assert!(Expr::parse("(1 + 2", &VARS).is_err());
        assert!(Expr::parse("sin 3", &VARS).is_err());
        assert!(Expr::parse("1 2", &VARS).is_err());
        assert!(Expr::parse("a $ b", &VARS).is_err());
    }
}
