//! Univariate arithmetic expressions: tokenizer, recursive-descent parser and
//! evaluator.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | variable | func '(' sum ')' | '(' sum ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2` is
//! `-(x^2)` and `2^-1` is `0.5`. Exactly one variable name is accepted per
//! context (`x` for endpoint functions, `t` for weights). Functions are fixed to
//! `ln`, `exp`, `sqrt`, `abs`.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { position: usize, name: String },

    #[error("unexpected trailing input at position {position}")]
    TrailingInput { position: usize },

    #[error("expression nested too deeply at position {position}")]
    TooDeep { position: usize },

    #[error("domain error in `{subexpr}` at {var} = {value}: {reason}")]
    Domain {
        subexpr: String,
        var: &'static str,
        value: f64,
        reason: &'static str,
    },
}

impl ExprError {
    pub fn is_parse_error(&self) -> bool {
        !matches!(self, ExprError::Domain { .. })
    }

    /// Character offset for positioned parse errors.
    pub fn position(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { position, .. }
            | ExprError::UnknownIdentifier { position, .. }
            | ExprError::TrailingInput { position }
            | ExprError::TooDeep { position } => Some(*position),
            ExprError::Empty => Some(0),
            ExprError::Domain { .. } => None,
        }
    }
}

/// The free variable of an expression context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// Endpoint functions `lower(x)`, `upper(x)`.
    X,
    /// Weight functions `h(t)`.
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Variable,
    Operator,
    LParen,
    RParen,
    Identifier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Character offset of the first character.
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Ln,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 4] = [Func::Ln, Func::Exp, Func::Sqrt, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Abstract syntax tree of a univariate expression.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Constant(f64),
    Variable(Var),
    Neg(Box<ExprNode>),
    Binary(BinOp, Box<ExprNode>, Box<ExprNode>),
    Call(Func, Box<ExprNode>),
}

impl std::ops::Neg for ExprNode {
    type Output = ExprNode;

    fn neg(self) -> ExprNode {
        ExprNode::Neg(Box::new(self))
    }
}

impl ExprNode {
    pub fn binary(op: BinOp, lhs: ExprNode, rhs: ExprNode) -> Self {
        ExprNode::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, child: ExprNode) -> Self {
        ExprNode::Call(func, Box::new(child))
    }

    /// Evaluate with the free variable bound to `value`.
    ///
    /// Fails with [`ExprError::Domain`] naming the smallest offending
    /// subexpression when a logarithm or square root leaves its domain, a
    /// denominator is zero, or any intermediate result is not finite.
    pub fn eval<T: Scalar>(&self, value: T) -> Result<T, ExprError> {
        self.eval_in(value, self.var().unwrap_or(Var::X))
    }

    fn eval_in<T: Scalar>(&self, value: T, var: Var) -> Result<T, ExprError> {
        let domain = |node: &ExprNode, var: Var, reason: &'static str| ExprError::Domain {
            subexpr: node.to_string(),
            var: var.name(),
            value: value.as_f64(),
            reason,
        };
        let out = match self {
            ExprNode::Constant(c) => T::lit(*c),
            ExprNode::Variable(_) => value,
            ExprNode::Neg(child) => -child.eval_in(value, var)?,
            ExprNode::Binary(op, lhs, rhs) => {
                let l = lhs.eval_in(value, var)?;
                let r = rhs.eval_in(value, var)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == T::zero() {
                            return Err(domain(self, var, "division by zero"));
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        let p = l.powf(r);
                        if p.is_nan() {
                            return Err(domain(self, var, "power undefined"));
                        }
                        p
                    }
                }
            }
            ExprNode::Call(func, child) => {
                let c = child.eval_in(value, var)?;
                match func {
                    Func::Ln => {
                        if c <= T::zero() {
                            return Err(domain(self, var, "logarithm of a non-positive number"));
                        }
                        c.ln()
                    }
                    Func::Exp => c.exp(),
                    Func::Sqrt => {
                        if c < T::zero() {
                            return Err(domain(self, var, "square root of a negative number"));
                        }
                        c.sqrt()
                    }
                    Func::Abs => c.abs(),
                }
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(domain(self, var, "result is not finite"))
        }
    }

    /// The variable occurring in the tree, if any.
    pub fn var(&self) -> Option<Var> {
        match self {
            ExprNode::Constant(_) => None,
            ExprNode::Variable(v) => Some(*v),
            ExprNode::Neg(c) | ExprNode::Call(_, c) => c.var(),
            ExprNode::Binary(_, l, r) => l.var().or_else(|| r.var()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprNode::Constant(_) | ExprNode::Variable(_) => 1,
            ExprNode::Neg(c) | ExprNode::Call(_, c) => 1 + c.depth(),
            ExprNode::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

/// Fully parenthesized form; parsing it back yields an equivalent tree.
impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::Constant(c) => {
                if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            ExprNode::Variable(v) => f.write_str(v.name()),
            ExprNode::Neg(c) => write!(f, "(-{c})"),
            ExprNode::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            ExprNode::Call(func, c) => write!(f, "{}({c})", func.name()),
        }
    }
}

/// Split `text` into tokens. `var` decides which identifier is the variable.
pub fn tokenize(text: &str, var: Var) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let (kind, end) = if c.is_ascii_digit() || c == '.' {
            (TokenKind::Number, scan_number(&chars, i)?)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let kind = if word == var.name() {
                TokenKind::Variable
            } else {
                TokenKind::Identifier
            };
            (kind, j)
        } else {
            let kind = match c {
                '+' | '-' | '*' | '/' | '^' => TokenKind::Operator,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                _ => {
                    return Err(ExprError::Syntax {
                        position: i,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            (kind, i + 1)
        };
        tokens.push(Token {
            kind,
            lexeme: chars[start..end].iter().collect(),
            position: start,
        });
        i = end;
    }
    Ok(tokens)
}

fn scan_number(chars: &[char], start: usize) -> Result<usize, ExprError> {
    let digits = |mut j: usize| {
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    let mut j = digits(start);
    let int_len = j - start;
    let mut frac_len = 0;
    if j < chars.len() && chars[j] == '.' {
        let k = digits(j + 1);
        frac_len = k - (j + 1);
        j = k;
    }
    if int_len == 0 && frac_len == 0 {
        return Err(ExprError::Syntax {
            position: start,
            message: "malformed number".into(),
        });
    }
    if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
        let mut k = j + 1;
        if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
            k += 1;
        }
        let e = digits(k);
        if e == k {
            return Err(ExprError::Syntax {
                position: k,
                message: "exponent has no digits".into(),
            });
        }
        j = e;
    }
    let lexeme: String = chars[start..j].iter().collect();
    match lexeme.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(j),
        _ => Err(ExprError::Syntax {
            position: start,
            message: format!("number `{lexeme}` out of range"),
        }),
    }
}

/// Parse `text` as an expression in the variable `var`.
pub fn parse(text: &str, var: Var) -> Result<ExprNode, ExprError> {
    let tokens = tokenize(text, var)?;
    if tokens.is_empty() {
        return Err(ExprError::Empty);
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.chars().count(),
        depth: 0,
        var,
    };
    let node = parser.sum()?;
    if let Some(tok) = parser.peek() {
        return Err(ExprError::TrailingInput {
            position: tok.position,
        });
    }
    Ok(node)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    depth: usize,
    var: Var,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn peek_op(&self, ops: &[char]) -> Option<char> {
        let tok = self.peek()?;
        if tok.kind != TokenKind::Operator {
            return None;
        }
        let c = tok.lexeme.chars().next()?;
        ops.contains(&c).then_some(c)
    }

    fn enter(&mut self) -> Result<(), ExprError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ExprError::TooDeep {
                position: self.here(),
            });
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<ExprNode, ExprError> {
        let mut lhs = self.product()?;
        while let Some(op) = self.peek_op(&['+', '-']) {
            self.pos += 1;
            let rhs = self.product()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = ExprNode::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<ExprNode, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_op(&['*', '/']) {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = ExprNode::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprNode, ExprError> {
        self.enter()?;
        let node = if self.peek_op(&['-']).is_some() {
            self.pos += 1;
            -self.unary()?
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(node)
    }

    fn power(&mut self) -> Result<ExprNode, ExprError> {
        let base = self.primary()?;
        if self.peek_op(&['^']).is_some() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(ExprNode::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::RParen => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ExprError::Syntax {
                position: self.here(),
                message: "expected `)`".into(),
            }),
        }
    }

    fn primary(&mut self) -> Result<ExprNode, ExprError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(ExprError::Syntax {
                position: self.end,
                message: "expected an operand".into(),
            });
        };
        match tok.kind {
            TokenKind::Number => {
                self.pos += 1;
                // tokenize already checked the lexeme
                let v: f64 = tok.lexeme.parse().map_err(|_| ExprError::Syntax {
                    position: tok.position,
                    message: "malformed number".into(),
                })?;
                Ok(ExprNode::Constant(v))
            }
            TokenKind::Variable => {
                self.pos += 1;
                Ok(ExprNode::Variable(self.var))
            }
            TokenKind::Identifier => {
                let Some(func) = Func::lookup(&tok.lexeme) else {
                    return Err(ExprError::UnknownIdentifier {
                        position: tok.position,
                        name: tok.lexeme,
                    });
                };
                self.pos += 1;
                match self.peek() {
                    Some(t) if t.kind == TokenKind::LParen => self.pos += 1,
                    _ => {
                        return Err(ExprError::Syntax {
                            position: self.here(),
                            message: format!("expected `(` after `{}`", func.name()),
                        })
                    }
                }
                self.enter()?;
                let arg = self.sum()?;
                self.depth -= 1;
                self.expect_rparen()?;
                Ok(ExprNode::call(func, arg))
            }
            TokenKind::LParen => {
                self.pos += 1;
                self.enter()?;
                let inner = self.sum()?;
                self.depth -= 1;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Operator | TokenKind::RParen => Err(ExprError::Syntax {
                position: tok.position,
                message: format!("expected an operand, found `{}`", tok.lexeme),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px(s: &str) -> ExprNode {
        parse(s, Var::X).unwrap()
    }

    fn ev(s: &str, x: f64) -> f64 {
        px(s).eval(x).unwrap()
    }

    #[test]
    fn five_minus_x_shape() {
        assert_eq!(
            px("5 - x"),
            ExprNode::binary(
                BinOp::Sub,
                ExprNode::Constant(5.0),
                ExprNode::Variable(Var::X)
            )
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("x^2 + 1", 2.0), 5.0);
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(ev("10 - 3 - 2", 0.0), 5.0);
        assert_eq!(ev("2 * -3", 0.0), -6.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("--x", 4.0), 4.0);
        assert_eq!(ev("(1 + x) * 2", 1.0), 4.0);
    }

    #[test]
    fn numbers_and_functions() {
        assert_eq!(ev("1.5e1", 0.0), 15.0);
        assert_eq!(ev(".5", 0.0), 0.5);
        assert_eq!(ev("2E-1", 0.0), 0.2);
        assert_eq!(ev("sqrt(x)", 9.0), 3.0);
        assert_eq!(ev("abs(x)", -2.0), 2.0);
        assert_eq!(ev("exp(0)", 0.0), 1.0);
        assert_eq!(ev("1/x", 2.0), 0.5);
        assert_eq!(ev("ln(x)", 1.0), 0.0);
    }

    #[test]
    fn incomplete_production_positions() {
        assert_eq!(
            parse("2*", Var::X).unwrap_err().position(),
            Some(2),
            "error at end of input"
        );
        assert!(matches!(
            parse("5 -", Var::X),
            Err(ExprError::Syntax { position: 3, .. })
        ));
        assert!(matches!(
            parse("(x + 1", Var::X),
            Err(ExprError::Syntax { position: 6, .. })
        ));
        assert!(matches!(
            parse(")", Var::X),
            Err(ExprError::Syntax { position: 0, .. })
        ));
    }

    #[test]
    fn identifier_errors() {
        assert_eq!(
            parse("x + y", Var::X),
            Err(ExprError::UnknownIdentifier {
                position: 4,
                name: "y".into()
            })
        );
        // wrong variable for the context
        assert!(matches!(
            parse("x", Var::T),
            Err(ExprError::UnknownIdentifier { position: 0, .. })
        ));
        assert!(matches!(
            parse("sin(x)", Var::X),
            Err(ExprError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse("ln x", Var::X),
            Err(ExprError::Syntax { position: 3, .. })
        ));
    }

    #[test]
    fn trailing_and_lexical_errors() {
        assert_eq!(
            parse("2 3", Var::X),
            Err(ExprError::TrailingInput { position: 2 })
        );
        assert!(matches!(
            parse("2 # 3", Var::X),
            Err(ExprError::Syntax { position: 2, .. })
        ));
        assert!(matches!(parse("1e", Var::X), Err(ExprError::Syntax { .. })));
        assert!(matches!(
            parse("1e999", Var::X),
            Err(ExprError::Syntax { .. })
        ));
        assert!(matches!(
            parse("0x10", Var::X),
            Err(ExprError::TrailingInput { .. })
        ));
        assert_eq!(parse("   ", Var::X), Err(ExprError::Empty));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let deep = format!("{}x{}", "(".repeat(5000), ")".repeat(5000));
        assert!(matches!(
            parse(&deep, Var::X),
            Err(ExprError::TooDeep { .. })
        ));
        let negs = format!("{}x", "-".repeat(5000));
        assert!(matches!(
            parse(&negs, Var::X),
            Err(ExprError::TooDeep { .. })
        ));
        let ok = format!("{}x{}", "(".repeat(50), ")".repeat(50));
        assert_eq!(parse(&ok, Var::X).unwrap().eval(2.0).unwrap(), 2.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        match px("1 + 1/x").eval(0.0) {
            Err(ExprError::Domain {
                subexpr, reason, ..
            }) => {
                assert_eq!(subexpr, "(1.0 / x)");
                assert_eq!(reason, "division by zero");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(px("ln(x)").eval(-1.0).is_err());
        assert!(px("ln(x)").eval(0.0).is_err());
        assert!(px("sqrt(x)").eval(-1e-3).is_err());
        assert!(px("x^0.5").eval(-4.0).is_err());
        assert!(px("exp(x)").eval(1000.0).is_err());
    }

    #[test]
    fn tokens_carry_kinds_and_positions() {
        let toks = tokenize("ln(t) * 2.5 ^ t", Var::T).unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Identifier,
                TokenKind::LParen,
                TokenKind::Variable,
                TokenKind::RParen,
                TokenKind::Operator,
                TokenKind::Number,
                TokenKind::Operator,
                TokenKind::Variable,
            ]
        );
        let positions: Vec<_> = toks.iter().map(|t| t.position).collect();
        assert_eq!(positions, vec![0, 2, 3, 4, 6, 8, 12, 14]);
    }

    #[test]
    fn display_parses_back() {
        for s in [
            "5 - x",
            "-x^2",
            "ln(x) / (x + 1e-3)",
            "2^-x^2",
            "abs(-3.25 * x)",
        ] {
            let a = px(s);
            let b = px(&a.to_string());
            for x in [0.5, 1.0, 1.7] {
                assert_eq!(a.eval(x).unwrap(), b.eval(x).unwrap(), "{s}");
            }
        }
    }

    #[test]
    fn generic_eval_f32() {
        let e = px("x^2 + 1");
        assert_eq!(e.eval(2.0f32).unwrap(), 5.0f32);
    }
}
