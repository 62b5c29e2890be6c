//! Hand-written lexer and recursive-descent parser for the accepted TPTP
//! subset, plus the inverse pretty-printer (parse ∘ print is the identity
//! on source problems).

use crate::logic::Role;

use super::{AnnotatedFormula, Fof, RawTerm, TptpError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    Amp,
    Pipe,
    Arrow,    // =>
    RevArrow, // <=
    Iff,      // <=>
    Xor,      // <~>
    Eq,
    Neq,
    Lower(String),
    Upper(String),
    Quoted(String),
    Defined(String), // $true, $false, ...
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Colon => "':'".into(),
            Tok::Bang => "'!'".into(),
            Tok::Question => "'?'".into(),
            Tok::Tilde => "'~'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Arrow => "'=>'".into(),
            Tok::RevArrow => "'<='".into(),
            Tok::Iff => "'<=>'".into(),
            Tok::Xor => "'<~>'".into(),
            Tok::Eq => "'='".into(),
            Tok::Neq => "'!='".into(),
            Tok::Lower(w) => format!("'{w}'"),
            Tok::Upper(w) => format!("'{w}'"),
            Tok::Quoted(w) => format!("'{w}'"),
            Tok::Defined(w) => format!("'${w}'"),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    fn next_token(&mut self) -> Result<(Tok, u32, u32), (u32, u32, String)> {
        self.skip_trivia();
        let (line, column) = (self.line, self.column);
        let Some(c) = self.bump() else {
            return Ok((Tok::End, line, column));
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '?' => Tok::Question,
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '=' => {
                if self.chars.peek() == Some(&'>') {
                    self.bump();
                    Tok::Arrow
                } else {
                    Tok::Eq
                }
            }
            '!' => {
                if self.chars.peek() == Some(&'=') {
                    self.bump();
                    Tok::Neq
                } else {
                    Tok::Bang
                }
            }
            '<' => match self.bump() {
                Some('=') => {
                    if self.chars.peek() == Some(&'>') {
                        self.bump();
                        Tok::Iff
                    } else {
                        Tok::RevArrow
                    }
                }
                Some('~') => {
                    if self.bump() == Some('>') {
                        Tok::Xor
                    } else {
                        return Err((line, column, "malformed connective after '<~'".into()));
                    }
                }
                _ => return Err((line, column, "malformed connective after '<'".into())),
            },
            '\'' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('\'') => break,
                        Some(c) => s.push(c),
                        None => return Err((line, column, "unterminated quoted name".into())),
                    }
                }
                Tok::Quoted(s)
            }
            '$' => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Defined(s)
            }
            c if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                let mut s = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Lower(s)
            }
            c if c.is_ascii_uppercase() || c == '_' => {
                let mut s = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Upper(s)
            }
            other => return Err((line, column, format!("unexpected character '{other}'"))),
        };
        Ok((tok, line, column))
    }
}

#[derive(Debug)]
pub(crate) enum Unit {
    Formula(AnnotatedFormula),
    Include(String),
}

struct Parser {
    tokens: Vec<(Tok, u32, u32)>,
    pos: usize,
    file: String,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> (u32, u32) {
        let t = &self.tokens[self.pos];
        (t.1, t.2)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> TptpError {
        let (line, column) = self.here();
        TptpError::Syntax {
            file: self.file.clone(),
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), TptpError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn units(&mut self) -> Result<Vec<Unit>, TptpError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Tok::End => return Ok(out),
                Tok::Lower(w) if w == "fof" => {
                    self.bump();
                    out.push(Unit::Formula(self.annotated()?));
                }
                Tok::Lower(w) if w == "include" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let path = match self.bump() {
                        Tok::Quoted(p) => p,
                        other => {
                            return Err(self.error(format!(
                                "expected quoted include path, found {}",
                                other.describe()
                            )))
                        }
                    };
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Dot)?;
                    out.push(Unit::Include(path));
                }
                Tok::Lower(w) if w == "cnf" || w == "tff" || w == "thf" => {
                    return Err(self.error(format!(
                        "{w} inputs are not supported; only the fof subset is accepted"
                    )))
                }
                other => {
                    return Err(self.error(format!(
                        "expected fof(...) or include(...), found {}",
                        other.describe()
                    )))
                }
            }
        }
    }

    fn annotated(&mut self) -> Result<AnnotatedFormula, TptpError> {
        self.expect(Tok::LParen)?;
        let name = match self.bump() {
            Tok::Lower(n) => n,
            Tok::Quoted(n) => n,
            other => {
                return Err(self.error(format!("expected formula name, found {}", other.describe())))
            }
        };
        self.expect(Tok::Comma)?;
        let role = match self.bump() {
            Tok::Lower(r) => match r.as_str() {
                "axiom" => Role::Axiom,
                "definition" => Role::Definition,
                "theorem" => Role::Theorem,
                "conjecture" => Role::Conjecture,
                other => {
                    return Err(self.error(format!(
                        "role {other} not accepted (axiom, definition, theorem, conjecture)"
                    )))
                }
            },
            other => return Err(self.error(format!("expected role, found {}", other.describe()))),
        };
        self.expect(Tok::Comma)?;
        let formula = self.formula()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        Ok(AnnotatedFormula { name, role, formula })
    }

    /// formula := unitary (binary-tail)?  — '&'/'|' chains must be uniform,
    /// '=>' is non-associative, per TPTP.
    fn formula(&mut self) -> Result<Fof, TptpError> {
        let first = self.unitary()?;
        match self.peek() {
            Tok::Amp => {
                let mut parts = vec![first];
                while *self.peek() == Tok::Amp {
                    self.bump();
                    parts.push(self.unitary()?);
                }
                if matches!(self.peek(), Tok::Pipe | Tok::Arrow) && *self.peek() == Tok::Pipe {
                    return Err(self.error("mixing '&' and '|' needs parentheses"));
                }
                if *self.peek() == Tok::Arrow {
                    self.bump();
                    let rhs = self.unitary_no_tail()?;
                    return Ok(Fof::Implies(Box::new(Fof::And(parts)), Box::new(rhs)));
                }
                Ok(Fof::And(parts))
            }
            Tok::Pipe => {
                let mut parts = vec![first];
                while *self.peek() == Tok::Pipe {
                    self.bump();
                    parts.push(self.unitary()?);
                }
                if *self.peek() == Tok::Amp {
                    return Err(self.error("mixing '|' and '&' needs parentheses"));
                }
                if *self.peek() == Tok::Arrow {
                    self.bump();
                    let rhs = self.unitary_no_tail()?;
                    return Ok(Fof::Implies(Box::new(Fof::Or(parts)), Box::new(rhs)));
                }
                Ok(Fof::Or(parts))
            }
            Tok::Arrow => {
                self.bump();
                let rhs = self.unitary_no_tail()?;
                Ok(Fof::Implies(Box::new(first), Box::new(rhs)))
            }
            Tok::RevArrow | Tok::Iff | Tok::Xor => {
                Err(self.error("only '=>' implication is accepted (no '<=', '<=>', '<~>')"))
            }
            _ => Ok(first),
        }
    }

    /// The right-hand side of '=>' must itself be unitary or a uniform
    /// '&'/'|' chain; 'a => b => c' is rejected as TPTP itself does.
    fn unitary_no_tail(&mut self) -> Result<Fof, TptpError> {
        let first = self.unitary()?;
        match self.peek() {
            Tok::Amp => {
                let mut parts = vec![first];
                while *self.peek() == Tok::Amp {
                    self.bump();
                    parts.push(self.unitary()?);
                }
                Ok(Fof::And(parts))
            }
            Tok::Pipe => {
                let mut parts = vec![first];
                while *self.peek() == Tok::Pipe {
                    self.bump();
                    parts.push(self.unitary()?);
                }
                Ok(Fof::Or(parts))
            }
            Tok::Arrow => Err(self.error("'=>' is non-associative; parenthesize the nesting")),
            _ => Ok(first),
        }
    }

    fn unitary(&mut self) -> Result<Fof, TptpError> {
        match self.peek().clone() {
            Tok::Bang | Tok::Question => {
                let exists = matches!(self.bump(), Tok::Question);
                self.expect(Tok::LBracket)?;
                let mut vars = Vec::new();
                loop {
                    match self.bump() {
                        Tok::Upper(v) => vars.push(v),
                        other => {
                            return Err(self.error(format!(
                                "expected variable, found {}",
                                other.describe()
                            )))
                        }
                    }
                    match self.bump() {
                        Tok::Comma => continue,
                        Tok::RBracket => break,
                        other => {
                            return Err(self.error(format!(
                                "expected ',' or ']', found {}",
                                other.describe()
                            )))
                        }
                    }
                }
                self.expect(Tok::Colon)?;
                let body = self.unitary()?;
                Ok(if exists {
                    Fof::Exists(vars, Box::new(body))
                } else {
                    Fof::Forall(vars, Box::new(body))
                })
            }
            Tok::Tilde => {
                self.bump();
                Ok(Fof::Not(Box::new(self.unitary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Defined(w) => {
                self.bump();
                match w.as_str() {
                    "true" => Ok(Fof::True),
                    "false" => Ok(Fof::False),
                    other => Err(self.error(format!("unsupported defined symbol ${other}"))),
                }
            }
            Tok::Lower(w) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let mut args = Vec::new();
                    loop {
                        args.push(self.term()?);
                        match self.bump() {
                            Tok::Comma => continue,
                            Tok::RParen => break,
                            other => {
                                return Err(self.error(format!(
                                    "expected ',' or ')', found {}",
                                    other.describe()
                                )))
                            }
                        }
                    }
                    if matches!(self.peek(), Tok::Eq | Tok::Neq) {
                        return Err(self.error(format!(
                            "function symbols of arity > 0 are not supported ({w} used as a term)"
                        )));
                    }
                    Ok(Fof::Atom { predicate: w, args })
                } else if matches!(self.peek(), Tok::Eq | Tok::Neq) {
                    let neq = matches!(self.bump(), Tok::Neq);
                    let rhs = self.term()?;
                    let lhs = RawTerm::Constant(w);
                    Ok(if neq { Fof::Neq(lhs, rhs) } else { Fof::Eq(lhs, rhs) })
                } else {
                    Ok(Fof::Atom {
                        predicate: w,
                        args: vec![],
                    })
                }
            }
            Tok::Upper(v) => {
                self.bump();
                match self.bump() {
                    Tok::Eq => Ok(Fof::Eq(RawTerm::Variable(v), self.term()?)),
                    Tok::Neq => Ok(Fof::Neq(RawTerm::Variable(v), self.term()?)),
                    other => Err(self.error(format!(
                        "a bare variable is not a formula; expected '=' or '!=', found {}",
                        other.describe()
                    ))),
                }
            }
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn term(&mut self) -> Result<RawTerm, TptpError> {
        match self.bump() {
            Tok::Upper(v) => Ok(RawTerm::Variable(v)),
            Tok::Lower(c) => {
                if *self.peek() == Tok::LParen {
                    return Err(self.error(format!(
                        "function symbols of arity > 0 are not supported ({c} applied to arguments)"
                    )));
                }
                Ok(RawTerm::Constant(c))
            }
            other => Err(self.error(format!("expected a term, found {}", other.describe()))),
        }
    }
}

pub(crate) fn parse_problem_text(text: &str, file: &str) -> Result<Vec<Unit>, TptpError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        match lexer.next_token() {
            Ok((Tok::End, l, c)) => {
                tokens.push((Tok::End, l, c));
                break;
            }
            Ok(t) => tokens.push(t),
            Err((line, column, message)) => {
                return Err(TptpError::Syntax {
                    file: file.to_string(),
                    line,
                    column,
                    message,
                })
            }
        }
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        file: file.to_string(),
    };
    parser.units()
}

/// Prints a problem back in the accepted grammar. Parsing the output yields
/// a structurally identical problem.
pub fn print_problem(problem: &super::SourceProblem) -> String {
    let mut out = String::new();
    for f in &problem.formulas {
        out.push_str(&format!(
            "fof({}, {}, {}).\n",
            f.name,
            f.role.as_str(),
            print_fof(&f.formula)
        ));
    }
    out
}

fn print_term(t: &RawTerm) -> &str {
    match t {
        RawTerm::Variable(v) => v,
        RawTerm::Constant(c) => c,
    }
}

fn print_fof(f: &Fof) -> String {
    match f {
        Fof::True => "$true".into(),
        Fof::False => "$false".into(),
        Fof::Atom { predicate, args } => {
            if args.is_empty() {
                predicate.clone()
            } else {
                let args: Vec<&str> = args.iter().map(print_term).collect();
                format!("{predicate}({})", args.join(","))
            }
        }
        Fof::Eq(a, b) => format!("{} = {}", print_term(a), print_term(b)),
        Fof::Neq(a, b) => format!("{} != {}", print_term(a), print_term(b)),
        Fof::Not(g) => format!("~ {}", print_unitary(g)),
        Fof::And(parts) => {
            let ps: Vec<String> = parts.iter().map(print_unitary).collect();
            ps.join(" & ")
        }
        Fof::Or(parts) => {
            let ps: Vec<String> = parts.iter().map(print_unitary).collect();
            ps.join(" | ")
        }
        Fof::Implies(a, b) => format!("{} => {}", print_unitary(a), print_unitary(b)),
        Fof::Forall(vars, body) => {
            format!("![{}]: {}", vars.join(","), print_unitary(body))
        }
        Fof::Exists(vars, body) => {
            format!("?[{}]: {}", vars.join(","), print_unitary(body))
        }
    }
}

fn print_unitary(f: &Fof) -> String {
    match f {
        Fof::And(_) | Fof::Or(_) | Fof::Implies(..) => format!("({})", print_fof(f)),
        _ => print_fof(f),
    }
}
