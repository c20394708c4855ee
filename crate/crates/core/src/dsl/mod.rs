//! The `.tm` text format.
//!
//! ```text
//! document   := section+
//! section    := "params" "{" (NAME "=" literal)* "}"
//!             | "static" ["full" | "simplified"] "{" (thimac | flow | trigger)* "}"
//!             | "events" "{" event* "}"
//!             | "behavior" "{" component* "}"
//! thimac     := "thimac" NAME [":" label] ["#" INT] "{" member* "}"
//! member     := ACTION ["#" INT]
//!             | "counter" NAME ["=" INT] ["max" (INT | "$" NAME)]
//!             | "queue" NAME
//!             | "flag" NAME ["=" ("true" | "false")]
//!             | "attr" NAME ("," NAME)*
//!             | thimac
//! flow       := "flow" actionref "->" actionref ["as" label] ["#" INT]
//! trigger    := "trigger" actionref "-->" actionref ["#" INT] ["label" STRING] ["when" guard]
//! actionref  := NAME ("." NAME)* "." ACTION
//! event      := ("event" | "instance") NAME [STRING] "=" "{" [element ("," element)*] "}"
//!               ["relates" NAME ("->" | "<->") NAME] ["do" effect ("," effect)*]
//! element    := path | actionref "->" actionref | actionref "-->" actionref
//! effect     := ("inc" | "dec" | "push" | "pop" | "peek" | "set" | "clear") path
//! component  := "component" NAME "{" chain* "}"
//! chain      := NAME (("->" | "=>") NAME)*
//! guard      := disj;  disj := conj ("or" conj)*;  conj := neg ("and" neg)*
//! neg        := "not" neg | "(" guard ")" | operand [("=" | "!=" | "<" | "<=") operand]
//! operand    := INT | STRING | "true" | "false" | "$" NAME | NAME ("." NAME)*
//! label      := NAME | STRING
//! ACTION     := "create" | "process" | "release" | "transfer" | "receive"
//! ```
//!
//! `//` starts a line comment; `;` may separate statements. `->` is a flow
//! and `-->` a trigger; in behavior sections `->` is a sequence edge and `=>`
//! a repeat edge.

mod lexer;
mod parser;
mod serializer;

use std::fmt;

pub use parser::{parse, Parsed};
pub use serializer::serialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>, expected: Vec<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
            expected,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

/// All syntax errors found in one input, in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        f.write_str(&lines.join("\n"))
    }
}

impl std::error::Error for ParseErrors {}

/// Whether `s` can be written as a bare NAME.
pub fn is_plain_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(lexer::is_ident_start) && chars.all(lexer::is_ident_char) && !parser::RESERVED.contains(&s)
}
