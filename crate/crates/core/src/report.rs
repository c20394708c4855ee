//! Diagnostics shared by every validator.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub elements: Vec<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}]: {}", self.code, self.message)?;
        if !self.elements.is_empty() {
            write!(f, " ({})", self.elements.join(", "))?;
        }
        Ok(())
    }
}

/// Outcome of a validation pass. `ok` holds exactly when no diagnostic has
/// error severity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl Default for ValidationReport {
    fn default() -> Self {
        ValidationReport {
            ok: true,
            diagnostics: Vec::new(),
        }
    }
}

impl ValidationReport {
    pub fn error<I, S>(&mut self, code: &str, message: impl Into<String>, elements: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.push(Severity::Error, code, message.into(), elements);
    }

    pub fn warning<I, S>(&mut self, code: &str, message: impl Into<String>, elements: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.push(Severity::Warning, code, message.into(), elements);
    }

    fn push<I, S>(&mut self, severity: Severity, code: &str, message: String, elements: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        if severity == Severity::Error {
            self.ok = false;
        }
        self.diagnostics.push(Diagnostic {
            severity,
            code: code.to_string(),
            message,
            elements: elements.into_iter().map(|e| e.to_string()).collect(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.ok &= other.ok;
        self.diagnostics.extend(other.diagnostics);
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Warning)
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.diagnostics.iter().any(|d| d.code == code)
    }
}
