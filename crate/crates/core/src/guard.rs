//! Guard expressions attached to trigger arcs.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A scalar value carried by token attributes, parameters and literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Str(String),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Str(_) => "string",
        }
    }

    /// Parses a command-line style value: integer, `true`/`false`, or text.
    pub fn parse_loose(s: &str) -> Value {
        if let Ok(i) = s.parse::<i64>() {
            Value::Int(i)
        } else if s == "true" || s == "false" {
            Value::Bool(s == "true")
        } else {
            Value::Str(s.to_string())
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operand {
    Lit(Value),
    /// Attribute of the token being moved, looked up along its lineage.
    Attr(String),
    /// `Thimac.path.slot`; queues read as their length.
    Slot(String),
    /// `$name`, a document parameter.
    Param(String),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Lit(v) => write!(f, "{v}"),
            Operand::Attr(a) => f.write_str(a),
            Operand::Slot(s) => f.write_str(s),
            Operand::Param(p) => write!(f, "${p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Guard {
    Atom(Operand),
    Cmp(CmpOp, Operand, Operand),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GuardError {
    #[error("unknown {kind} `{name}`")]
    Unbound { kind: &'static str, name: String },
    #[error("cannot compare {0} with {1} using `{2}`")]
    TypeMismatch(&'static str, &'static str, &'static str),
    #[error("expected a boolean, found {0}")]
    NotBoolean(&'static str),
}

/// Where guard operands get their values during evaluation.
pub trait GuardEnv {
    fn attribute(&self, name: &str) -> Option<Value>;
    fn slot(&self, path: &str) -> Option<Value>;
    fn param(&self, name: &str) -> Option<Value>;
}

impl Guard {
    pub fn eval(&self, env: &dyn GuardEnv) -> Result<bool, GuardError> {
        match self {
            Guard::Atom(o) => match resolve(o, env)? {
                Value::Bool(b) => Ok(b),
                v => Err(GuardError::NotBoolean(v.type_name())),
            },
            Guard::Cmp(op, l, r) => {
                let (l, r) = (resolve(l, env)?, resolve(r, env)?);
                match (op, &l, &r) {
                    (CmpOp::Eq, _, _) if l.type_name() == r.type_name() => Ok(l == r),
                    (CmpOp::Ne, _, _) if l.type_name() == r.type_name() => Ok(l != r),
                    (CmpOp::Lt, Value::Int(a), Value::Int(b)) => Ok(a < b),
                    (CmpOp::Le, Value::Int(a), Value::Int(b)) => Ok(a <= b),
                    _ => Err(GuardError::TypeMismatch(l.type_name(), r.type_name(), op.symbol())),
                }
            }
            Guard::Not(g) => Ok(!g.eval(env)?),
            Guard::And(a, b) => Ok(a.eval(env)? && b.eval(env)?),
            Guard::Or(a, b) => Ok(a.eval(env)? || b.eval(env)?),
        }
    }

    /// All operands, left to right.
    pub fn operands(&self) -> Vec<&Operand> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Operand>) {
        match self {
            Guard::Atom(o) => out.push(o),
            Guard::Cmp(_, l, r) => {
                out.push(l);
                out.push(r);
            }
            Guard::Not(g) => g.collect(out),
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Guard::Or(..) => 1,
            Guard::And(..) => 2,
            Guard::Not(_) => 3,
            Guard::Atom(_) | Guard::Cmp(..) => 4,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn resolve(o: &Operand, env: &dyn GuardEnv) -> Result<Value, GuardError> {
    let unbound = |kind, name: &str| GuardError::Unbound {
        kind,
        name: name.to_string(),
    };
    match o {
        Operand::Lit(v) => Ok(v.clone()),
        Operand::Attr(a) => env.attribute(a).ok_or_else(|| unbound("attribute", a)),
        Operand::Slot(s) => env.slot(s).ok_or_else(|| unbound("slot", s)),
        Operand::Param(p) => env.param(p).ok_or_else(|| unbound("parameter", p)),
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Atom(o) => write!(f, "{o}"),
            Guard::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol()),
            Guard::Not(g) => {
                f.write_str("not ")?;
                g.write_operand(f, 3)
            }
            Guard::And(a, b) => {
                a.write_operand(f, 2)?;
                f.write_str(" and ")?;
                b.write_operand(f, 3)
            }
            Guard::Or(a, b) => {
                a.write_operand(f, 1)?;
                f.write_str(" or ")?;
                b.write_operand(f, 2)
            }
        }
    }
}
