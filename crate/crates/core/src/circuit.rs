// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Hardware-independent gate-level circuits with symbolic angles.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The supported gate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    U1,
    U2,
    U3,
    Cx,
    Measure,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 17] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U1,
        GateKind::U2,
        GateKind::U3,
        GateKind::Cx,
        GateKind::Measure,
        GateKind::Barrier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::U1 => "u1",
            GateKind::U2 => "u2",
            GateKind::U3 => "u3",
            GateKind::Cx => "cx",
            GateKind::Measure => "measure",
            GateKind::Barrier => "barrier",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Number of qubit operands; `None` for the variadic barrier.
    pub fn qubit_arity(self) -> Option<usize> {
        match self {
            GateKind::Cx => Some(2),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    pub fn param_arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::U1 => 1,
            GateKind::U2 => 2,
            GateKind::U3 => 3,
            _ => 0,
        }
    }

    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::Measure | GateKind::Barrier)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Name of a symbolic parameter: one or more of `[A-Za-z0-9_]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ParamName(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid parameter name `{0}`")]
pub struct InvalidParamName(pub String);

impl ParamName {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidParamName> {
        let name = name.into();
        if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            Ok(ParamName(name))
        } else {
            Err(InvalidParamName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ParamName {
    type Error = InvalidParamName;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        ParamName::new(s)
    }
}

impl From<ParamName> for String {
    fn from(p: ParamName) -> String {
        p.0
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Gate angle expression.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleExpr {
    Num(f64),
    Pi,
    Param(ParamName),
    Neg(Box<AngleExpr>),
    Add(Box<AngleExpr>, Box<AngleExpr>),
    Sub(Box<AngleExpr>, Box<AngleExpr>),
    Mul(Box<AngleExpr>, Box<AngleExpr>),
    Div(Box<AngleExpr>, Box<AngleExpr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound parameter `{0}`")]
    Unbound(String),
    #[error("angle expression evaluates to a non-finite value")]
    NonFinite,
}

impl AngleExpr {
    pub fn param(name: &ParamName) -> AngleExpr {
        AngleExpr::Param(name.clone())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: AngleExpr, b: AngleExpr) -> AngleExpr {
        AngleExpr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: AngleExpr, b: AngleExpr) -> AngleExpr {
        AngleExpr::Mul(Box::new(a), Box::new(b))
    }

    /// Appends parameter names not yet in `out`, in left-to-right order.
    pub fn collect_params(&self, out: &mut Vec<ParamName>) {
        match self {
            AngleExpr::Param(p) => {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
            AngleExpr::Num(_) | AngleExpr::Pi => {}
            AngleExpr::Neg(a) => a.collect_params(out),
            AngleExpr::Add(a, b)
            | AngleExpr::Sub(a, b)
            | AngleExpr::Mul(a, b)
            | AngleExpr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        let mut v = Vec::new();
        self.collect_params(&mut v);
        v.is_empty()
    }

    /// Evaluates with no parameters in scope.
    pub fn eval(&self) -> Result<f64, EvalError> {
        self.eval_with(&|_| None)
    }

    pub fn eval_with(&self, lookup: &dyn Fn(&ParamName) -> Option<f64>) -> Result<f64, EvalError> {
        let v = match self {
            AngleExpr::Num(v) => *v,
            AngleExpr::Pi => std::f64::consts::PI,
            AngleExpr::Param(p) => lookup(p).ok_or_else(|| EvalError::Unbound(p.0.clone()))?,
            AngleExpr::Neg(a) => -a.eval_with(lookup)?,
            AngleExpr::Add(a, b) => a.eval_with(lookup)? + b.eval_with(lookup)?,
            AngleExpr::Sub(a, b) => a.eval_with(lookup)? - b.eval_with(lookup)?,
            AngleExpr::Mul(a, b) => a.eval_with(lookup)? * b.eval_with(lookup)?,
            AngleExpr::Div(a, b) => a.eval_with(lookup)? / b.eval_with(lookup)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Replaces bound parameters by literals; structure is otherwise kept.
    pub fn substitute(&self, values: &HashMap<&ParamName, f64>) -> AngleExpr {
        let sub = |e: &AngleExpr| Box::new(e.substitute(values));
        match self {
            AngleExpr::Param(p) => match values.get(p) {
                Some(v) => AngleExpr::Num(*v),
                None => self.clone(),
            },
            AngleExpr::Num(_) | AngleExpr::Pi => self.clone(),
            AngleExpr::Neg(a) => AngleExpr::Neg(sub(a)),
            AngleExpr::Add(a, b) => AngleExpr::Add(sub(a), sub(b)),
            AngleExpr::Sub(a, b) => AngleExpr::Sub(sub(a), sub(b)),
            AngleExpr::Mul(a, b) => AngleExpr::Mul(sub(a), sub(b)),
            AngleExpr::Div(a, b) => AngleExpr::Div(sub(a), sub(b)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            AngleExpr::Add(..) | AngleExpr::Sub(..) => 1,
            AngleExpr::Mul(..) | AngleExpr::Div(..) => 2,
            AngleExpr::Neg(_) => 3,
            AngleExpr::Num(v) if v.is_sign_negative() => 3,
            _ => 4,
        }
    }
}

/// Formats a finite real so that the QASM lexer reads back the same value.
pub(crate) fn fmt_real(v: f64) -> String {
    let s = format!("{v:?}");
    match s.find('e') {
        Some(pos) if !s[..pos].contains('.') => format!("{}.0{}", &s[..pos], &s[pos..]),
        _ => s,
    }
}

const RESERVED_IDENTS: &[&str] = &["pi", "sin", "cos", "tan", "exp", "ln", "sqrt"];

fn fmt_param(p: &ParamName) -> String {
    let s = p.as_str();
    let ident_like = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    if ident_like && !RESERVED_IDENTS.contains(&s) {
        s.to_owned()
    } else {
        format!("${s}")
    }
}

// Printing keeps the exact tree shape: the parser folds `-<literal>` into a
// negative literal, so a negated literal is printed as `-(x)`, and a right
// operand of equal precedence is parenthesized.
impl fmt::Display for AngleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &AngleExpr, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        let binary = |f: &mut fmt::Formatter<'_>, a: &AngleExpr, op: &str, b: &AngleExpr| {
            let p = self.precedence();
            child(f, a, a.precedence() < p)?;
            f.write_str(op)?;
            child(f, b, b.precedence() <= p)
        };
        match self {
            AngleExpr::Num(v) => f.write_str(&fmt_real(*v)),
            AngleExpr::Pi => f.write_str("pi"),
            AngleExpr::Param(p) => f.write_str(&fmt_param(p)),
            AngleExpr::Neg(a) => {
                f.write_str("-")?;
                let paren = matches!(**a, AngleExpr::Num(_)) || a.precedence() < 3;
                child(f, a, paren)
            }
            AngleExpr::Add(a, b) => binary(f, a, " + ", b),
            AngleExpr::Sub(a, b) => binary(f, a, " - ", b),
            AngleExpr::Mul(a, b) => binary(f, a, "*", b),
            AngleExpr::Div(a, b) => binary(f, a, "/", b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArityError {
    #[error("{kind} takes {expected} qubit operand(s), got {found}")]
    Qubits {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("{kind} takes {expected} angle(s), got {found}")]
    Params {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("{kind} operands must be distinct qubits")]
    RepeatedQubit { kind: GateKind },
    #[error("barrier needs at least one qubit")]
    EmptyBarrier,
    #[error("use GateOp::measure for measurements")]
    MeasureNeedsClbit,
}

/// One circuit instruction. Constructors validate arity, so a malformed
/// operation cannot exist.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    qubits: Vec<usize>,
    clbits: Vec<usize>,
    params: Vec<AngleExpr>,
}

impl GateOp {
    /// Unitary gate or barrier.
    pub fn new(
        kind: GateKind,
        qubits: Vec<usize>,
        params: Vec<AngleExpr>,
    ) -> Result<GateOp, ArityError> {
        if kind == GateKind::Measure {
            return Err(ArityError::MeasureNeedsClbit);
        }
        match kind.qubit_arity() {
            Some(n) if n != qubits.len() => {
                return Err(ArityError::Qubits {
                    kind,
                    expected: n,
                    found: qubits.len(),
                })
            }
            None if qubits.is_empty() => return Err(ArityError::EmptyBarrier),
            _ => {}
        }
        if kind.param_arity() != params.len() {
            return Err(ArityError::Params {
                kind,
                expected: kind.param_arity(),
                found: params.len(),
            });
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ArityError::RepeatedQubit { kind });
        }
        Ok(GateOp {
            kind,
            qubits,
            clbits: Vec::new(),
            params,
        })
    }

    /// Parameterless single- or two-qubit gate. Panics on arity mismatch,
    /// which is a programming error at the call site.
    pub fn fixed(kind: GateKind, qubits: &[usize]) -> GateOp {
        GateOp::new(kind, qubits.to_vec(), Vec::new()).expect("fixed gate arity")
    }

    pub fn rotation(kind: GateKind, qubit: usize, angle: AngleExpr) -> Result<GateOp, ArityError> {
        GateOp::new(kind, vec![qubit], vec![angle])
    }

    pub fn measure(qubit: usize, clbit: usize) -> GateOp {
        GateOp {
            kind: GateKind::Measure,
            qubits: vec![qubit],
            clbits: vec![clbit],
            params: Vec::new(),
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn clbits(&self) -> &[usize] {
        &self.clbits
    }

    pub fn params(&self) -> &[AngleExpr] {
        &self.params
    }

    pub(crate) fn with_params(&self, params: Vec<AngleExpr>) -> GateOp {
        debug_assert_eq!(params.len(), self.params.len());
        GateOp {
            params,
            ..self.clone()
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == GateKind::Measure {
            return write!(f, "measure q[{}] -> c[{}]", self.qubits[0], self.clbits[0]);
        }
        f.write_str(self.kind.name())?;
        if !self.params.is_empty() {
            f.write_str("(")?;
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        for (i, q) in self.qubits.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { "," })?;
            write!(f, "q[{q}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit index {index} out of range for {size} qubit(s)")]
    QubitOutOfRange { index: usize, size: usize },
    #[error("classical bit index {index} out of range for {size} bit(s)")]
    ClbitOutOfRange { index: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    n_clbits: usize,
    ops: Vec<GateOp>,
    free_params: Vec<ParamName>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_clbits: usize) -> Circuit {
        Circuit {
            n_qubits,
            n_clbits,
            ops: Vec::new(),
            free_params: Vec::new(),
        }
    }

    pub fn push(&mut self, op: GateOp) -> Result<(), CircuitError> {
        if let Some(&index) = op.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(CircuitError::QubitOutOfRange {
                index,
                size: self.n_qubits,
            });
        }
        if let Some(&index) = op.clbits.iter().find(|&&c| c >= self.n_clbits) {
            return Err(CircuitError::ClbitOutOfRange {
                index,
                size: self.n_clbits,
            });
        }
        for p in &op.params {
            p.collect_params(&mut self.free_params);
        }
        self.ops.push(op);
        Ok(())
    }

    /// Builds a circuit from already-validated operations.
    pub fn from_ops(
        n_qubits: usize,
        n_clbits: usize,
        ops: impl IntoIterator<Item = GateOp>,
    ) -> Result<Circuit, CircuitError> {
        let mut c = Circuit::new(n_qubits, n_clbits);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn free_params(&self) -> &[ParamName] {
        &self.free_params
    }

    pub fn free_param_names(&self) -> Vec<String> {
        self.free_params.iter().map(|p| p.0.clone()).collect()
    }

    pub fn is_bound(&self) -> bool {
        self.free_params.is_empty()
    }

    pub fn stats(&self) -> CircuitStats {
        circuit_stats(self)
    }
}

/// Parameter values, either by name or by position in `free_params` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bindings {
    Positional(Vec<f64>),
    Named(BTreeMap<String, f64>),
}

impl Default for Bindings {
    fn default() -> Self {
        Bindings::Named(BTreeMap::new())
    }
}

impl Bindings {
    pub fn is_empty(&self) -> bool {
        match self {
            Bindings::Positional(v) => v.is_empty(),
            Bindings::Named(m) => m.is_empty(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BindError {
    #[error("`{0}` is not a free parameter of the circuit")]
    UnknownParameter(String),
    #[error("expected {expected} positional value(s), got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("value for `{0}` is not finite")]
    NonFiniteValue(String),
}

impl BindError {
    pub fn code(&self) -> &'static str {
        match self {
            BindError::UnknownParameter(_) => "UnknownParameter",
            BindError::ArityMismatch { .. } => "ArityMismatch",
            BindError::NonFiniteValue(_) => "NonFiniteValue",
        }
    }
}

/// Substitutes values for free parameters. Named bindings may cover a subset
/// of the free parameters; positional bindings must cover all of them, in
/// first-appearance order.
pub fn bind_parameters(circuit: &Circuit, bindings: &Bindings) -> Result<Circuit, BindError> {
    let mut values: HashMap<&ParamName, f64> = HashMap::new();
    match bindings {
        Bindings::Named(map) => {
            for (name, v) in map {
                let p = circuit
                    .free_params
                    .iter()
                    .find(|p| p.as_str() == name)
                    .ok_or_else(|| BindError::UnknownParameter(name.clone()))?;
                values.insert(p, *v);
            }
        }
        Bindings::Positional(vals) => {
            if vals.len() != circuit.free_params.len() {
                return Err(BindError::ArityMismatch {
                    expected: circuit.free_params.len(),
                    found: vals.len(),
                });
            }
            values.extend(circuit.free_params.iter().zip(vals.iter().copied()));
        }
    }
    if let Some((p, _)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(BindError::NonFiniteValue(p.0.clone()));
    }
    if values.is_empty() {
        return Ok(circuit.clone());
    }
    let ops = circuit.ops.iter().map(|op| {
        if op.params.is_empty() {
            op.clone()
        } else {
            op.with_params(op.params.iter().map(|e| e.substitute(&values)).collect())
        }
    });
    Ok(Circuit::from_ops(circuit.n_qubits, circuit.n_clbits, ops)
        .expect("binding keeps operand indices"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub n_qubits: usize,
    pub n_clbits: usize,
    pub depth: usize,
    pub gate_counts: BTreeMap<String, usize>,
}

/// Depth is the longest chain of operations that pairwise share a qubit or
/// classical bit. Barriers synchronize their wires without adding a layer
/// and are not counted.
pub fn circuit_stats(circuit: &Circuit) -> CircuitStats {
    let mut qlevel = vec![0usize; circuit.n_qubits];
    let mut clevel = vec![0usize; circuit.n_clbits];
    let mut gate_counts = BTreeMap::new();
    for op in &circuit.ops {
        let prev = op
            .qubits
            .iter()
            .map(|&q| qlevel[q])
            .chain(op.clbits.iter().map(|&c| clevel[c]))
            .max()
            .unwrap_or(0);
        let level = if op.kind == GateKind::Barrier {
            prev
        } else {
            *gate_counts.entry(op.kind.name().to_owned()).or_insert(0) += 1;
            prev + 1
        };
        for &q in &op.qubits {
            qlevel[q] = level;
        }
        for &c in &op.clbits {
            clevel[c] = level;
        }
    }
    CircuitStats {
        n_qubits: circuit.n_qubits,
        n_clbits: circuit.n_clbits,
        depth: qlevel.iter().chain(clevel.iter()).copied().max().unwrap_or(0),
        gate_counts,
    }
}
