//! OpenQASM 2.0 front end.
//!
//! Supported subset: the version header, `include` lines (skipped), a single
//! `qreg`, `creg` declarations (skipped), `barrier` (skipped) and gate
//! applications over the built-in alphabet plus registry gates. `measure`,
//! `reset`, `if` and custom `gate` bodies are rejected: the engines operate
//! on measurement-free unitary circuits. `swap` is lowered to three `cx`
//! gates on sight.

use std::f64::consts::PI;
use std::fmt;

use crate::circuit::{Circuit, Gate, GateKind, GateRegistry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownGate(String),
    OutOfRange { index: usize, size: usize },
    Measurement,
    Unsupported(String),
    DuplicateRegister,
    MissingRegister,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "{m}"),
            ParseErrorKind::UnknownGate(g) => write!(f, "unsupported gate '{g}'"),
            ParseErrorKind::OutOfRange { index, size } => {
                write!(f, "qubit index {index} out of range for register of size {size}")
            }
            ParseErrorKind::Measurement => {
                write!(f, "measurement statements are not supported")
            }
            ParseErrorKind::Unsupported(s) => write!(f, "unsupported statement '{s}'"),
            ParseErrorKind::DuplicateRegister => {
                write!(f, "only a single quantum register is supported")
            }
            ParseErrorKind::MissingRegister => {
                write!(f, "gate application before any qreg declaration")
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> char {
        let ch = self.chars[self.i];
        self.i += 1;
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        ch
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer { chars: text.chars().collect(), i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(ch) = lx.peek() {
        let (tl, tc) = (lx.line, lx.col);
        if ch.is_whitespace() {
            lx.bump();
            continue;
        }
        if ch == '/' {
            lx.bump();
            if lx.peek() == Some('/') {
                while let Some(c2) = lx.peek() {
                    lx.bump();
                    if c2 == '\n' {
                        break;
                    }
                }
                continue;
            }
            out.push(Token { tok: Tok::Sym('/'), line: tl, col: tc });
            continue;
        }
        if ch == '"' {
            lx.bump();
            let mut s = String::new();
            loop {
                match lx.peek() {
                    Some('"') => {
                        lx.bump();
                        break;
                    }
                    Some(_) => s.push(lx.bump()),
                    None => {
                        return Err(ParseError {
                            line: tl,
                            col: tc,
                            kind: ParseErrorKind::Syntax("unterminated string".into()),
                        })
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), line: tl, col: tc });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut s = String::new();
            while let Some(c2) = lx.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    s.push(lx.bump());
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(s), line: tl, col: tc });
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let mut s = String::new();
            while let Some(c2) = lx.peek() {
                if c2.is_ascii_digit() || c2 == '.' {
                    s.push(lx.bump());
                } else if c2 == 'e' || c2 == 'E' {
                    s.push(lx.bump());
                    if let Some(c3) = lx.peek() {
                        if c3 == '+' || c3 == '-' {
                            s.push(lx.bump());
                        }
                    }
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Number(s), line: tl, col: tc });
            continue;
        }
        // the tail set only appears in statements the parser rejects
        if "();[],+-*/{}<>=!".contains(ch) {
            lx.bump();
            out.push(Token { tok: Tok::Sym(ch), line: tl, col: tc });
            continue;
        }
        return Err(ParseError {
            line: tl,
            col: tc,
            kind: ParseErrorKind::Syntax(format!("unexpected character '{ch}'")),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    registry: &'a GateRegistry,
    reg_name: Option<String>,
    reg_size: usize,
    gates: Vec<Gate>,
}

impl<'a> Parser<'a> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        let (line, col) = self
            .toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        ParseError { line, col, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next_tok(&mut self) -> Result<Tok, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .map(|t| t.tok.clone())
            .ok_or_else(|| self.syntax("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_sym(&mut self, sym: char) -> Result<(), ParseError> {
        match self.next_tok()? {
            Tok::Sym(s) if s == sym => Ok(()),
            other => Err(ParseError {
                line: self.toks[self.pos - 1].line,
                col: self.toks[self.pos - 1].col,
                kind: ParseErrorKind::Syntax(format!("expected '{sym}', found {other:?}")),
            }),
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.next_tok()? {
            Tok::Ident(s) => Ok(s),
            other => Err(ParseError {
                line: self.toks[self.pos - 1].line,
                col: self.toks[self.pos - 1].col,
                kind: ParseErrorKind::Syntax(format!("expected identifier, found {other:?}")),
            }),
        }
    }

    fn expect_index(&mut self) -> Result<usize, ParseError> {
        match self.next_tok()? {
            Tok::Number(s) => s.parse::<usize>().map_err(|_| ParseError {
                line: self.toks[self.pos - 1].line,
                col: self.toks[self.pos - 1].col,
                kind: ParseErrorKind::Syntax(format!("expected integer, found '{s}'")),
            }),
            other => Err(ParseError {
                line: self.toks[self.pos - 1].line,
                col: self.toks[self.pos - 1].col,
                kind: ParseErrorKind::Syntax(format!("expected integer, found {other:?}")),
            }),
        }
    }

    fn skip_to_semicolon(&mut self) -> Result<(), ParseError> {
        loop {
            match self.next_tok()? {
                Tok::Sym(';') => return Ok(()),
                _ => continue,
            }
        }
    }

    fn run(&mut self) -> Result<(), ParseError> {
        while self.peek().is_some() {
            self.statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let tok = self.next_tok()?;
        let name = match tok {
            Tok::Ident(s) => s,
            other => return Err(self.syntax(format!("expected statement, found {other:?}"))),
        };
        match name.as_str() {
            "OPENQASM" => {
                match self.next_tok()? {
                    Tok::Number(v) if v == "2.0" => {}
                    Tok::Number(v) => {
                        return Err(self.syntax(format!("unsupported OPENQASM version {v}")))
                    }
                    other => {
                        return Err(self.syntax(format!("expected version number, found {other:?}")))
                    }
                }
                self.expect_sym(';')
            }
            "include" => {
                match self.next_tok()? {
                    Tok::Str(_) => {}
                    other => return Err(self.syntax(format!("expected file name, found {other:?}"))),
                }
                self.expect_sym(';')
            }
            "qreg" => {
                if self.reg_name.is_some() {
                    return Err(self.err(ParseErrorKind::DuplicateRegister));
                }
                let reg = self.expect_ident()?;
                self.expect_sym('[')?;
                let size = self.expect_index()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                if size == 0 {
                    return Err(self.syntax("qreg size must be >= 1"));
                }
                self.reg_name = Some(reg);
                self.reg_size = size;
                Ok(())
            }
            "creg" => {
                self.expect_ident()?;
                self.expect_sym('[')?;
                self.expect_index()?;
                self.expect_sym(']')?;
                self.expect_sym(';')
            }
            "barrier" => self.skip_to_semicolon(),
            "measure" => Err(self.err(ParseErrorKind::Measurement)),
            "reset" | "if" | "gate" | "opaque" => {
                Err(self.err(ParseErrorKind::Unsupported(name)))
            }
            _ => self.gate_application(name),
        }
    }

    fn gate_application(&mut self, name: String) -> Result<(), ParseError> {
        if self.reg_name.is_none() {
            return Err(self.err(ParseErrorKind::MissingRegister));
        }
        let mut params = Vec::new();
        if self.peek() == Some(&Tok::Sym('(')) {
            self.next_tok()?;
            loop {
                params.push(self.expr()?);
                match self.next_tok()? {
                    Tok::Sym(',') => continue,
                    Tok::Sym(')') => break,
                    other => {
                        return Err(self.syntax(format!("expected ',' or ')', found {other:?}")))
                    }
                }
            }
        }
        let kind = self.resolve_gate(&name, &params)?;
        let mut operands = Vec::new();
        loop {
            let reg = self.expect_ident()?;
            if Some(&reg) != self.reg_name.as_ref() {
                return Err(self.syntax(format!("unknown register '{reg}'")));
            }
            self.expect_sym('[')?;
            let idx = self.expect_index()?;
            self.expect_sym(']')?;
            if idx >= self.reg_size {
                return Err(self.err(ParseErrorKind::OutOfRange {
                    index: idx,
                    size: self.reg_size,
                }));
            }
            operands.push(idx);
            match self.next_tok()? {
                Tok::Sym(',') => continue,
                Tok::Sym(';') => break,
                other => return Err(self.syntax(format!("expected ',' or ';', found {other:?}"))),
            }
        }
        // swap is sugar for three cx gates
        if matches!(kind, GateKind::Swap) {
            if operands.len() != 2 || operands[0] == operands[1] {
                return Err(self.syntax("swap expects two distinct qubits"));
            }
            let (a, b) = (operands[0], operands[1]);
            self.gates.push(Gate::cx(a, b));
            self.gates.push(Gate::cx(b, a));
            self.gates.push(Gate::cx(a, b));
            return Ok(());
        }
        let gate = Gate::new(kind, operands).map_err(|e| self.syntax(e.to_string()))?;
        self.gates.push(gate);
        Ok(())
    }

    fn resolve_gate(&self, name: &str, params: &[f64]) -> Result<GateKind, ParseError> {
        let expect_params = |n: usize| -> Result<(), ParseError> {
            if params.len() != n {
                Err(self.syntax(format!(
                    "gate {name} expects {n} parameter(s), got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        let kind = match name {
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "rx" => {
                expect_params(1)?;
                GateKind::Rx(params[0])
            }
            "ry" => {
                expect_params(1)?;
                GateKind::Ry(params[0])
            }
            "rz" => {
                expect_params(1)?;
                GateKind::Rz(params[0])
            }
            "cx" => GateKind::Cx,
            "cz" => GateKind::Cz,
            "csx" => GateKind::Csx,
            "csxdg" => GateKind::Csxdg,
            "ccx" => GateKind::Ccx,
            "swap" => GateKind::Swap,
            "id" => GateKind::Id,
            other => match self.registry.lookup(other) {
                Some(kind) => kind,
                None => return Err(self.err(ParseErrorKind::UnknownGate(other.to_string()))),
            },
        };
        if kind.angle().is_none() {
            expect_params(0)?;
        }
        Ok(kind)
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.next_tok()?;
                    acc += self.term()?;
                }
                Some(Tok::Sym('-')) => {
                    self.next_tok()?;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*'|'/') factor)*
    fn term(&mut self) -> Result<f64, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('*')) => {
                    self.next_tok()?;
                    acc *= self.factor()?;
                }
                Some(Tok::Sym('/')) => {
                    self.next_tok()?;
                    let d = self.factor()?;
                    if d == 0.0 {
                        return Err(self.syntax("division by zero in angle expression"));
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<f64, ParseError> {
        match self.next_tok()? {
            Tok::Sym('-') => Ok(-self.factor()?),
            Tok::Sym('+') => self.factor(),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Number(s) => s
                .parse::<f64>()
                .map_err(|_| self.syntax(format!("bad number '{s}'"))),
            Tok::Ident(id) if id == "pi" => Ok(PI),
            other => Err(self.syntax(format!("unexpected token {other:?} in expression"))),
        }
    }
}

/// Parse OpenQASM 2.0 using only the built-in gate alphabet.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    parse_with(text, &GateRegistry::default())
}

/// Parse OpenQASM 2.0, additionally accepting gates from `registry`.
pub fn parse_with(text: &str, registry: &GateRegistry) -> Result<Circuit, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        registry,
        reg_name: None,
        reg_size: 0,
        gates: Vec::new(),
    };
    p.run()?;
    if p.reg_name.is_none() {
        return Err(ParseError {
            line: 1,
            col: 1,
            kind: ParseErrorKind::MissingRegister,
        });
    }
    let gates = std::mem::take(&mut p.gates);
    Circuit::new(p.reg_size, gates).map_err(|e| ParseError {
        line: 1,
        col: 1,
        kind: ParseErrorKind::Syntax(e.to_string()),
    })
}

/// Canonical printer: one statement per line, register named `q`, angles with
/// 17 significant digits so that parsing the output reproduces the circuit.
pub fn print(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str(&format!("qreg q[{}];\n", c.qubits()));
    for g in c.gates() {
        let args: Vec<String> = g.operands().iter().map(|q| format!("q[{q}]")).collect();
        match g.kind().angle() {
            Some(a) => out.push_str(&format!("{}({:.16e}) {};\n", g.kind().name(), a, args.join(","))),
            None => out.push_str(&format!("{} {};\n", g.kind().name(), args.join(","))),
        }
    }
    out
}

/// Parse a gate-set entry such as `h`, `CX` or `rz(pi/8)`. Used by the
/// synthesis front end to read `--gates` lists.
pub fn parse_gate_spec(spec: &str, registry: &GateRegistry) -> Result<GateKind, ParseError> {
    let spec = spec.trim();
    let (name, params) = match spec.split_once('(') {
        None => (spec.to_string(), Vec::new()),
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or(ParseError {
                line: 1,
                col: 1,
                kind: ParseErrorKind::Syntax(format!("missing ')' in '{spec}'")),
            })?;
            let toks = lex(inner)?;
            let mut p = Parser {
                toks,
                pos: 0,
                registry,
                reg_name: None,
                reg_size: 0,
                gates: Vec::new(),
            };
            let v = p.expr()?;
            if p.peek().is_some() {
                return Err(p.syntax("trailing tokens in angle expression"));
            }
            (name.to_string(), vec![v])
        }
    };
    let p = Parser {
        toks: Vec::new(),
        pos: 0,
        registry,
        reg_name: None,
        reg_size: 0,
        gates: Vec::new(),
    };
    p.resolve_gate(&name.to_ascii_lowercase(), &params)
}
