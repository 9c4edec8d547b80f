// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Line-oriented Pauli rotation programs.
//!
//! Each non-blank line holds one rotation term:
//!
//! ```text
//! IIXY 1. 1
//! ZZ  -0.5  theta
//! X    0.25
//! ```
//!
//! The operator string comes first (character `k` addresses qubit `k`), then a
//! real coefficient and an optional parameter name. `#` starts a comment that
//! runs to the end of the line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliTermError {
    #[error("operator string is empty")]
    EmptyOperators,
    #[error("coefficient must be finite, got {0}")]
    NonFiniteCoefficient(f64),
    #[error("invalid parameter name `{0}`")]
    InvalidParameterName(String),
}

/// One rotation term: operator string, coefficient and optional parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    operators: Vec<Pauli>,
    coefficient: f64,
    parameter: Option<String>,
}

impl PauliTerm {
    pub fn new(
        operators: Vec<Pauli>,
        coefficient: f64,
        parameter: Option<String>,
    ) -> Result<Self, PauliTermError> {
        if operators.is_empty() {
            return Err(PauliTermError::EmptyOperators);
        }
        if !coefficient.is_finite() {
            return Err(PauliTermError::NonFiniteCoefficient(coefficient));
        }
        if let Some(name) = &parameter {
            if !is_param_name(name) {
                return Err(PauliTermError::InvalidParameterName(name.clone()));
            }
        }
        Ok(PauliTerm {
            operators,
            coefficient,
            parameter,
        })
    }

    pub fn operators(&self) -> &[Pauli] {
        &self.operators
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn parameter(&self) -> Option<&str> {
        self.parameter.as_deref()
    }

    pub fn width(&self) -> usize {
        self.operators.len()
    }

    pub fn is_identity(&self) -> bool {
        self.operators.iter().all(|p| *p == Pauli::I)
    }

    /// Qubits carrying a non-identity operator, ascending.
    pub fn active_qubits(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.operators
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, p)| *p != Pauli::I)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.operators {
            write!(f, "{}", p.as_char())?;
        }
        // `{:?}` on f64 is the shortest representation that parses back
        // exactly, and it always stays inside the coefficient grammar.
        write!(f, " {:?}", self.coefficient)?;
        if let Some(name) = &self.parameter {
            write!(f, " {name}")?;
        }
        Ok(())
    }
}

/// A parsed program. `lines` keeps the 1-based source line of each term for
/// diagnostics and does not take part in equality.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PauliProgram {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    #[serde(skip)]
    lines: Vec<usize>,
}

impl PartialEq for PauliProgram {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.terms == other.terms
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("term width {found} does not match program width {expected}")]
pub struct WidthMismatch {
    pub expected: usize,
    pub found: usize,
}

impl PauliProgram {
    /// Builds a program from terms. The width is taken from the first term.
    pub fn from_terms(terms: Vec<PauliTerm>) -> Result<Self, WidthMismatch> {
        let n_qubits = terms.first().map_or(0, PauliTerm::width);
        if let Some(bad) = terms.iter().find(|t| t.width() != n_qubits) {
            return Err(WidthMismatch {
                expected: n_qubits,
                found: bad.width(),
            });
        }
        let lines = (1..=terms.len()).collect();
        Ok(PauliProgram {
            n_qubits,
            terms,
            lines,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Source line of term `index` (1-based). Programs built in memory
    /// number their terms consecutively.
    pub fn line_of(&self, index: usize) -> usize {
        self.lines.get(index).copied().unwrap_or(index + 1)
    }

    /// Distinct parameter names in order of first appearance.
    pub fn parameters(&self) -> Vec<String> {
        let mut seen = Vec::<String>::new();
        for name in self.terms.iter().filter_map(PauliTerm::parameter) {
            if !seen.iter().any(|s| s == name) {
                seen.push(name.to_owned());
            }
        }
        seen
    }

    /// Non-fatal findings about the program.
    pub fn validate(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        for (idx, term) in self.terms.iter().enumerate() {
            let line = self.line_of(idx);
            if term.is_identity() {
                out.push(Warning::IdentityTerm { line });
            }
            if term.coefficient() == 0.0 {
                out.push(Warning::ZeroCoefficient { line });
            }
        }
        out
    }

    /// Canonical text: one term per line, no comments.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&t.to_string());
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for PauliProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

impl FromStr for PauliProgram {
    type Err = PauliParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pauli_program(s)
    }
}

/// Distinct parameter names of `program` in order of first appearance.
pub fn parameters_of(program: &PauliProgram) -> Vec<String> {
    program.parameters()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Warning {
    /// All-identity operator string; lowers to a global phase only.
    IdentityTerm { line: usize },
    ZeroCoefficient { line: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::IdentityTerm { line } => {
                write!(f, "line {line}: identity term contributes only a global phase")
            }
            Warning::ZeroCoefficient { line } => write!(f, "line {line}: zero coefficient"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PauliErrorKind {
    InvalidOperatorChar,
    InconsistentWidth,
    MalformedCoefficient,
    InvalidParameterName,
    MissingCoefficient,
    TrailingInput,
}

impl PauliErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            PauliErrorKind::InvalidOperatorChar => "InvalidOperatorChar",
            PauliErrorKind::InconsistentWidth => "InconsistentWidth",
            PauliErrorKind::MalformedCoefficient => "MalformedCoefficient",
            PauliErrorKind::InvalidParameterName => "InvalidParameterName",
            PauliErrorKind::MissingCoefficient => "MissingCoefficient",
            PauliErrorKind::TrailingInput => "TrailingInput",
        }
    }
}

/// Positioned parse failure. `line` and `column` are 1-based; the column
/// counts characters of the original line.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}: line {line}, column {column}: {message}", kind.code())]
pub struct PauliParseError {
    pub kind: PauliErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn is_param_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `[+-]? (digits [. digits*] | . digits) ([eE] [+-]? digits)?`
fn is_coefficient_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = i - int_start;
    let mut frac_digits = 0;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        frac_digits = i - frac_start;
    }
    if int_digits == 0 && frac_digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

/// Whitespace-separated tokens of `line` with their 1-based char columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((b0, c0)) = start.take() {
                out.push((c0 + 1, &line[b0..byte]));
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b0, c0)) = start {
        out.push((c0 + 1, &line[b0..]));
    }
    out
}

/// Parses Pauli program text. Blank and comment-only lines are skipped; the
/// empty input is a valid zero-qubit program.
pub fn parse_pauli_program(text: &str) -> Result<PauliProgram, PauliParseError> {
    let mut terms = Vec::new();
    let mut lines = Vec::new();
    let mut width: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        let err = |kind, column, message: String| PauliParseError {
            kind,
            line: line_no,
            column,
            message,
        };

        let (ops_col, ops_tok) = toks[0];
        let mut operators = Vec::with_capacity(ops_tok.len());
        for (offset, ch) in ops_tok.chars().enumerate() {
            match Pauli::from_char(ch) {
                Some(p) => operators.push(p),
                None => {
                    return Err(err(
                        PauliErrorKind::InvalidOperatorChar,
                        ops_col + offset,
                        format!("`{ch}` is not one of I, X, Y, Z"),
                    ))
                }
            }
        }
        match width {
            None => width = Some(operators.len()),
            Some(w) if w != operators.len() => {
                return Err(err(
                    PauliErrorKind::InconsistentWidth,
                    ops_col,
                    format!(
                        "operator string has {} qubits, expected {w}",
                        operators.len()
                    ),
                ))
            }
            Some(_) => {}
        }

        let Some(&(coef_col, coef_tok)) = toks.get(1) else {
            return Err(err(
                PauliErrorKind::MissingCoefficient,
                ops_col + ops_tok.chars().count(),
                "expected a coefficient after the operator string".into(),
            ));
        };
        let coefficient = if is_coefficient_literal(coef_tok) {
            coef_tok.parse::<f64>().ok().filter(|v| v.is_finite())
        } else {
            None
        };
        let Some(coefficient) = coefficient else {
            return Err(err(
                PauliErrorKind::MalformedCoefficient,
                coef_col,
                format!("`{coef_tok}` is not a finite decimal literal"),
            ));
        };

        let parameter = match toks.get(2) {
            None => None,
            Some(&(col, name)) if !is_param_name(name) => {
                return Err(err(
                    PauliErrorKind::InvalidParameterName,
                    col,
                    format!("`{name}` is not a valid parameter name"),
                ))
            }
            Some(&(_, name)) => Some(name.to_owned()),
        };
        if let Some(&(col, extra)) = toks.get(3) {
            return Err(err(
                PauliErrorKind::TrailingInput,
                col,
                format!("unexpected `{extra}` after parameter name"),
            ));
        }

        terms.push(PauliTerm {
            operators,
            coefficient,
            parameter,
        });
        lines.push(line_no);
    }

    Ok(PauliProgram {
        n_qubits: width.unwrap_or(0),
        terms,
        lines,
    })
}

/// The ansatz used throughout the tests and the README.
pub const EXAMPLE_ANSATZ: &str = "\
IIXY 1. 1
IXIY 1. 2
IXYI 1. 3
XIIY 1. 4
XIYI 1. 5
XYII 1. 6
IIYX 1. 7
IYIX 1. 8
IYXI 1. 9
YIIX 1. 10
YIXI 1. 11
YXII 1. 12
";

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_term() {
        let p = parse_pauli_program("IIXY 1. 1\n").unwrap();
        assert_eq!(p.n_qubits(), 4);
        assert_eq!(p.terms().len(), 1);
        let t = &p.terms()[0];
        assert_eq!(t.operators(), &[Pauli::I, Pauli::I, Pauli::X, Pauli::Y]);
        assert_eq!(t.coefficient(), 1.0);
        assert_eq!(t.parameter(), Some("1"));
    }

    #[test]
    fn empty_input_is_empty_program() {
        let p = parse_pauli_program("").unwrap();
        assert_eq!(p.n_qubits(), 0);
        assert!(p.is_empty());
        let p = parse_pauli_program("\n  # nothing here\n\n").unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn invalid_operator_position() {
        let e = parse_pauli_program("XYQ 1. 1").unwrap_err();
        assert_eq!(e.kind, PauliErrorKind::InvalidOperatorChar);
        assert_eq!((e.line, e.column), (1, 3));

        let e = parse_pauli_program("XX 1.\n\n  XQ 2.").unwrap_err();
        assert_eq!(e.kind, PauliErrorKind::InvalidOperatorChar);
        assert_eq!((e.line, e.column), (3, 4));
    }

    #[test]
    fn lowercase_is_rejected() {
        let e = parse_pauli_program("xy 1.").unwrap_err();
        assert_eq!(e.kind, PauliErrorKind::InvalidOperatorChar);
        assert_eq!(e.column, 1);
    }

    #[test]
    fn inconsistent_width() {
        let e = parse_pauli_program("XX 1. a\nXXX 1. b\n").unwrap_err();
        assert_eq!(e.kind, PauliErrorKind::InconsistentWidth);
        assert_eq!((e.line, e.column), (2, 1));
    }

    #[test]
    fn malformed_coefficient() {
        for bad in ["XX abc", "XX 1.2.3", "XX inf", "XX NaN", "XX 1e", "XX .", "XX 1e999"] {
            let e = parse_pauli_program(bad).unwrap_err();
            assert_eq!(e.kind, PauliErrorKind::MalformedCoefficient, "{bad}");
            assert_eq!(e.column, 4, "{bad}");
        }
    }

    #[test]
    fn coefficient_grammar_accepts() {
        for (lit, v) in [
            ("1.", 1.0),
            ("-2", -2.0),
            ("+0.5", 0.5),
            (".25", 0.25),
            ("1e-3", 1e-3),
            ("-1.5E+2", -150.0),
        ] {
            let p = parse_pauli_program(&format!("Z {lit}")).unwrap();
            assert_eq!(p.terms()[0].coefficient(), v, "{lit}");
        }
    }

    #[test]
    fn missing_coefficient_and_trailing_tokens() {
        let e = parse_pauli_program("XY").unwrap_err();
        assert_eq!(e.kind, PauliErrorKind::MissingCoefficient);
        let e = parse_pauli_program("XY 1. a b").unwrap_err();
        assert_eq!(e.kind, PauliErrorKind::TrailingInput);
        assert_eq!(e.column, 9);
        let e = parse_pauli_program("XY 1. a-b").unwrap_err();
        assert_eq!(e.kind, PauliErrorKind::InvalidParameterName);
    }

    #[test]
    fn comments_and_whitespace() {
        let p = parse_pauli_program("  # header\n\tZZ  0.5   theta_a  # trailing\n").unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].parameter(), Some("theta_a"));
        assert_eq!(p.line_of(0), 2);
    }

    #[test]
    fn optional_parameter_column() {
        let p = parse_pauli_program("XZ 0.25\n").unwrap();
        assert_eq!(p.terms()[0].parameter(), None);
        assert!(p.parameters().is_empty());
    }

    #[test]
    fn example_ansatz() {
        let p = parse_pauli_program(EXAMPLE_ANSATZ).unwrap();
        assert_eq!(p.n_qubits(), 4);
        assert_eq!(p.terms().len(), 12);
        let expected: Vec<String> = (1..=12).map(|i| i.to_string()).collect();
        assert_eq!(parameters_of(&p), expected);
        assert!(p.validate().is_empty());
    }

    #[test]
    fn warnings() {
        let p = parse_pauli_program("IIII 1. 1").unwrap();
        assert_eq!(p.validate(), vec![Warning::IdentityTerm { line: 1 }]);
        let p = parse_pauli_program("XX 0. 1").unwrap();
        assert_eq!(p.validate(), vec![Warning::ZeroCoefficient { line: 1 }]);
        let p = parse_pauli_program("# c\nXX 1. a\nII -0.0").unwrap();
        assert_eq!(
            p.validate(),
            vec![
                Warning::IdentityTerm { line: 3 },
                Warning::ZeroCoefficient { line: 3 }
            ]
        );
    }

    #[test]
    fn parameter_first_appearance_order() {
        let p = parse_pauli_program("XX 1. b\nYY 1. a\nZZ 1. b\n").unwrap();
        assert_eq!(p.parameters(), vec!["b".to_string(), "a".to_string()]);
        assert!(PauliProgram::default().parameters().is_empty());
    }

    #[test]
    fn term_constructor_rejects_bad_input() {
        assert_eq!(
            PauliTerm::new(vec![], 1.0, None),
            Err(PauliTermError::EmptyOperators)
        );
        assert!(PauliTerm::new(vec![Pauli::X], f64::NAN, None).is_err());
        assert!(PauliTerm::new(vec![Pauli::X], 1.0, Some("a b".into())).is_err());
        let a = PauliTerm::new(vec![Pauli::X], 1.0, None).unwrap();
        let b = PauliTerm::new(vec![Pauli::X, Pauli::Y], 1.0, None).unwrap();
        assert!(PauliProgram::from_terms(vec![a, b]).is_err());
    }

    fn arb_program() -> impl Strategy<Value = PauliProgram> {
        (1usize..6).prop_flat_map(|width| {
            let pauli = prop_oneof![
                Just(Pauli::I),
                Just(Pauli::X),
                Just(Pauli::Y),
                Just(Pauli::Z)
            ];
            let term = (
                proptest::collection::vec(pauli, width),
                prop_oneof![-1e6f64..1e6, Just(0.0), -1e-9f64..1e-9],
                proptest::option::of("[A-Za-z0-9_]{1,6}"),
            )
                .prop_map(|(ops, c, p)| PauliTerm::new(ops, c, p).unwrap());
            proptest::collection::vec(term, 0..10)
                .prop_map(|terms| PauliProgram::from_terms(terms).unwrap())
        })
    }

    proptest! {
        #[test]
        fn canonical_round_trip(program in arb_program()) {
            let text = program.to_canonical();
            let reparsed = parse_pauli_program(&text).unwrap();
            prop_assert_eq!(&reparsed, &program);
            prop_assert_eq!(reparsed.to_canonical(), text);
        }

        #[test]
        fn parameters_are_distinct_in_first_occurrence_order(program in arb_program()) {
            let params = program.parameters();
            let mut dedup = params.clone();
            dedup.sort();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), params.len());
            let firsts: Vec<usize> = params
                .iter()
                .map(|p| program.terms().iter().position(|t| t.parameter() == Some(p)).unwrap())
                .collect();
            prop_assert!(firsts.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn parse_is_total(text in "[IXYZQ0-9 .#a_\n-]{0,40}") {
            // Either a program or one positioned error; never a panic.
            match parse_pauli_program(&text) {
                Ok(_) => {}
                Err(e) => prop_assert!(e.line >= 1 && e.column >= 1),
            }
        }
    }
}
