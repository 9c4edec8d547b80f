// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! OpenQASM 2.0 subset.
//!
//! Accepted: the `OPENQASM 2.0;` header, `include "qelib1.inc";`, `qreg`,
//! `creg`, the gates of [`GateKind`] (plus the built-ins `U` and `CX`),
//! `measure` and `barrier`, with register broadcasting. Registers are
//! flattened into one qubit and one classical index space in declaration
//! order.
//!
//! Angle expressions may reference free parameters. A bare identifier other
//! than `pi` names a parameter; `$name` names one whose spelling is not an
//! identifier (for example `$1`).

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{AngleExpr, Circuit, GateKind, GateOp, ParamName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QasmErrorKind {
    SyntaxError,
    UnknownGate,
    IndexOutOfRange,
    UnsupportedFeature,
}

impl QasmErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            QasmErrorKind::SyntaxError => "SyntaxError",
            QasmErrorKind::UnknownGate => "UnknownGate",
            QasmErrorKind::IndexOutOfRange => "IndexOutOfRange",
            QasmErrorKind::UnsupportedFeature => "UnsupportedFeature",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}: line {line}, column {column}: {message}", kind.code())]
pub struct QasmError {
    pub kind: QasmErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    ParamRef(String),
    Int(u64),
    Real(f64),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: &[&str] = &[
    "->", "==", ";", ",", "(", ")", "[", "]", "{", "}", "+", "-", "*", "/", "^",
];

fn lex(src: &str) -> Result<Vec<Token>, QasmError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| QasmError {
        kind: QasmErrorKind::SyntaxError,
        line,
        column,
        message,
    };

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c == '$' {
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if i == start + 1 {
                return Err(err(line, col, "expected a parameter name after `$`".into()));
            }
            Tok::ParamRef(chars[start + 1..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let mut is_real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                is_real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    is_real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            if is_real {
                match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => Tok::Real(v),
                    _ => return Err(err(line, col, format!("invalid real literal `{text}`"))),
                }
            } else {
                match text.parse::<u64>() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => return Err(err(line, col, format!("integer `{text}` too large"))),
                }
            }
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(err(line, col, "unterminated string".into()));
            }
            i += 1;
            Tok::Str(chars[start + 1..i - 1].iter().collect())
        } else {
            let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    i += s.chars().count();
                    Tok::Sym(s)
                }
                None => return Err(err(line, col, format!("unexpected character `{c}`"))),
            }
        };
        col += i - start;
        out.push(Token {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Register {
    name: String,
    offset: usize,
    size: usize,
}

/// Operand: a whole register or one element of it, flattened.
#[derive(Clone, Copy)]
enum Operand {
    Whole { offset: usize, size: usize },
    Single(usize),
}

impl Operand {
    fn width(self) -> Option<usize> {
        match self {
            Operand::Whole { size, .. } => Some(size),
            Operand::Single(_) => None,
        }
    }

    fn at(self, k: usize) -> usize {
        match self {
            Operand::Whole { offset, .. } => offset + k,
            Operand::Single(i) => i,
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    ops: Vec<GateOp>,
}

type PResult<T> = Result<T, QasmError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, kind: QasmErrorKind, message: impl Into<String>) -> QasmError {
        QasmError {
            kind,
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn syntax<T>(&self, t: &Token, message: impl Into<String>) -> PResult<T> {
        Err(self.error_at(t, QasmErrorKind::SyntaxError, message))
    }

    fn expect_sym(&mut self, sym: &'static str) -> PResult<Token> {
        let t = self.next();
        if t.tok == Tok::Sym(sym) {
            Ok(t)
        } else {
            self.syntax(&t, format!("expected `{sym}`, found {}", describe(&t.tok)))
        }
    }

    fn eat_sym(&mut self, sym: &'static str) -> bool {
        if self.peek().tok == Tok::Sym(sym) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            other => self.syntax(&t, format!("expected identifier, found {}", describe(other))),
        }
    }

    fn expect_int(&mut self) -> PResult<(usize, Token)> {
        let t = self.next();
        match t.tok {
            Tok::Int(v) => Ok((v as usize, t)),
            ref other => self.syntax(&t, format!("expected integer, found {}", describe(other))),
        }
    }

    fn header(&mut self) -> PResult<()> {
        let t = self.next();
        if t.tok != Tok::Ident("OPENQASM".into()) {
            return self.syntax(&t, "program must begin with `OPENQASM 2.0;`");
        }
        let v = self.next();
        match v.tok {
            Tok::Real(2.0) => {}
            _ => {
                return Err(self.error_at(
                    &v,
                    QasmErrorKind::UnsupportedFeature,
                    "only OpenQASM 2.0 is supported",
                ))
            }
        }
        self.expect_sym(";")?;
        Ok(())
    }

    fn n_qubits(&self) -> usize {
        self.qregs.iter().map(|r| r.size).sum()
    }

    fn n_clbits(&self) -> usize {
        self.cregs.iter().map(|r| r.size).sum()
    }

    fn declare(&mut self, classical: bool) -> PResult<()> {
        let (name, name_tok) = self.expect_ident()?;
        if self.qregs.iter().chain(&self.cregs).any(|r| r.name == name) {
            return self.syntax(&name_tok, format!("register `{name}` already declared"));
        }
        self.expect_sym("[")?;
        let (size, size_tok) = self.expect_int()?;
        if size == 0 {
            return self.syntax(&size_tok, "register size must be positive");
        }
        self.expect_sym("]")?;
        self.expect_sym(";")?;
        let offset = if classical { self.n_clbits() } else { self.n_qubits() };
        let reg = Register { name, offset, size };
        if classical {
            self.cregs.push(reg);
        } else {
            self.qregs.push(reg);
        }
        Ok(())
    }

    fn operand(&mut self, classical: bool) -> PResult<(Operand, Token)> {
        let (name, tok) = self.expect_ident()?;
        let regs = if classical { &self.cregs } else { &self.qregs };
        let Some(reg) = regs.iter().find(|r| r.name == name) else {
            let what = if classical { "classical" } else { "quantum" };
            return self.syntax(&tok, format!("unknown {what} register `{name}`"));
        };
        let (offset, size) = (reg.offset, reg.size);
        if self.eat_sym("[") {
            let (idx, idx_tok) = self.expect_int()?;
            if idx >= size {
                return Err(self.error_at(
                    &idx_tok,
                    QasmErrorKind::IndexOutOfRange,
                    format!("index {idx} out of range for `{name}[{size}]`"),
                ));
            }
            self.expect_sym("]")?;
            Ok((Operand::Single(offset + idx), tok))
        } else {
            Ok((Operand::Whole { offset, size }, tok))
        }
    }

    /// Common width of broadcast operands, or 1 if all are single elements.
    fn broadcast_width(&self, operands: &[(Operand, Token)]) -> PResult<usize> {
        let mut width = None;
        for (op, tok) in operands {
            if let Some(w) = op.width() {
                match width {
                    None => width = Some(w),
                    Some(prev) if prev != w => {
                        return self.syntax(tok, "broadcast registers differ in size")
                    }
                    _ => {}
                }
            }
        }
        Ok(width.unwrap_or(1))
    }

    fn expr(&mut self) -> PResult<AngleExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym("+") {
                lhs = AngleExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym("-") {
                lhs = AngleExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<AngleExpr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_sym("*") {
                lhs = AngleExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_sym("/") {
                lhs = AngleExpr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek().tok == Tok::Sym("^") {
                let t = self.peek().clone();
                return Err(self.error_at(
                    &t,
                    QasmErrorKind::UnsupportedFeature,
                    "exponentiation is not supported in angle expressions",
                ));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<AngleExpr> {
        if self.eat_sym("-") {
            // A negated literal becomes a negative literal.
            return match self.peek().tok {
                Tok::Real(v) => {
                    self.next();
                    Ok(AngleExpr::Num(-v))
                }
                Tok::Int(v) => {
                    self.next();
                    Ok(AngleExpr::Num(-(v as f64)))
                }
                _ => Ok(AngleExpr::Neg(Box::new(self.unary()?))),
            };
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<AngleExpr> {
        let t = self.next();
        match &t.tok {
            Tok::Real(v) => Ok(AngleExpr::Num(*v)),
            Tok::Int(v) => Ok(AngleExpr::Num(*v as f64)),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) if name == "pi" => Ok(AngleExpr::Pi),
            Tok::Ident(name) if ["sin", "cos", "tan", "exp", "ln", "sqrt"].contains(&name.as_str()) => {
                Err(self.error_at(
                    &t,
                    QasmErrorKind::UnsupportedFeature,
                    format!("function `{name}` is not supported in angle expressions"),
                ))
            }
            Tok::Ident(name) | Tok::ParamRef(name) => Ok(AngleExpr::Param(
                ParamName::new(name.clone()).expect("lexer yields valid names"),
            )),
            other => self.syntax(&t, format!("expected expression, found {}", describe(other))),
        }
    }

    fn gate_call(&mut self, kind: GateKind, name_tok: &Token) -> PResult<()> {
        let mut params = Vec::new();
        if self.eat_sym("(") && !self.eat_sym(")") {
            loop {
                params.push(self.expr()?);
                if self.eat_sym(")") {
                    break;
                }
                self.expect_sym(",")?;
            }
        }
        if params.len() != kind.param_arity() {
            return self.syntax(
                name_tok,
                format!(
                    "`{}` takes {} parameter(s), got {}",
                    kind.name(),
                    kind.param_arity(),
                    params.len()
                ),
            );
        }

        let mut operands = vec![self.operand(false)?];
        while self.eat_sym(",") {
            operands.push(self.operand(false)?);
        }
        self.expect_sym(";")?;

        if kind == GateKind::Barrier {
            let mut qubits = Vec::new();
            for (op, _) in &operands {
                let n = op.width().unwrap_or(1);
                for k in 0..n {
                    let q = op.at(k);
                    if !qubits.contains(&q) {
                        qubits.push(q);
                    }
                }
            }
            self.ops
                .push(GateOp::new(kind, qubits, Vec::new()).expect("barrier has operands"));
            return Ok(());
        }

        let arity = kind.qubit_arity().unwrap_or(1);
        if operands.len() != arity {
            return self.syntax(
                name_tok,
                format!("`{}` takes {arity} qubit argument(s), got {}", kind.name(), operands.len()),
            );
        }
        let width = self.broadcast_width(&operands)?;
        for k in 0..width {
            let qubits: Vec<usize> = operands.iter().map(|(op, _)| op.at(k)).collect();
            let op = GateOp::new(kind, qubits, params.clone())
                .map_err(|e| self.error_at(name_tok, QasmErrorKind::SyntaxError, e.to_string()))?;
            self.ops.push(op);
        }
        Ok(())
    }

    fn measure(&mut self) -> PResult<()> {
        let q = self.operand(false)?;
        self.expect_sym("->")?;
        let c = self.operand(true)?;
        self.expect_sym(";")?;
        match (q.0.width(), c.0.width()) {
            (None, None) | (Some(_), Some(_)) => {}
            _ => return self.syntax(&q.1, "measure operands must both be registers or both be bits"),
        }
        let width = self.broadcast_width(&[q.clone(), c.clone()])?;
        for k in 0..width {
            self.ops.push(GateOp::measure(q.0.at(k), c.0.at(k)));
        }
        Ok(())
    }

    fn statement(&mut self) -> PResult<bool> {
        let t = self.peek().clone();
        let name = match &t.tok {
            Tok::Eof => return Ok(false),
            Tok::Ident(name) => name.clone(),
            other => return self.syntax(&t, format!("expected statement, found {}", describe(other))),
        };
        self.next();
        let unsupported = |what: &str| {
            Err(self.error_at(
                &t,
                QasmErrorKind::UnsupportedFeature,
                format!("`{what}` is not supported"),
            ))
        };
        match name.as_str() {
            "include" => {
                let f = self.next();
                match &f.tok {
                    Tok::Str(s) if s == "qelib1.inc" => {}
                    Tok::Str(s) => {
                        return Err(self.error_at(
                            &f,
                            QasmErrorKind::UnsupportedFeature,
                            format!("only qelib1.inc can be included, not `{s}`"),
                        ))
                    }
                    other => return self.syntax(&f, format!("expected file name, found {}", describe(other))),
                }
                self.expect_sym(";")?;
            }
            "qreg" => self.declare(false)?,
            "creg" => self.declare(true)?,
            "measure" => self.measure()?,
            "gate" | "opaque" | "if" | "reset" => return unsupported(&name),
            "OPENQASM" => return self.syntax(&t, "duplicate OPENQASM header"),
            "U" => self.gate_call(GateKind::U3, &t)?,
            "CX" => self.gate_call(GateKind::Cx, &t)?,
            other => match GateKind::from_name(other) {
                Some(kind) if kind != GateKind::Measure => self.gate_call(kind, &t)?,
                _ => {
                    return Err(self.error_at(
                        &t,
                        QasmErrorKind::UnknownGate,
                        format!("unknown gate `{other}`"),
                    ))
                }
            },
        }
        Ok(true)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::ParamRef(s) => format!("`${s}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::Real(v) => format!("`{v}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses OpenQASM source into a [`Circuit`].
pub fn parse_qasm(source: &str) -> Result<Circuit, QasmError> {
    let mut p = Parser {
        toks: lex(source)?,
        pos: 0,
        qregs: Vec::new(),
        cregs: Vec::new(),
        ops: Vec::new(),
    };
    p.header()?;
    while p.statement()? {}
    let ops = std::mem::take(&mut p.ops);
    Ok(Circuit::from_ops(p.n_qubits(), p.n_clbits(), ops)
        .expect("parser checks operand ranges"))
}

/// Serializes a circuit with one `q` and one `c` register.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if circuit.n_qubits() > 0 {
        let _ = writeln!(s, "qreg q[{}];", circuit.n_qubits());
    }
    if circuit.n_clbits() > 0 {
        let _ = writeln!(s, "creg c[{}];", circuit.n_clbits());
    }
    for op in circuit.ops() {
        let _ = writeln!(s, "{op};");
    }
    s
}
