use thiserror::Error;

use crate::parse::{parse_expr, ParseError};
use crate::ratfunc::RatFunc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("chart must have at least one coordinate")]
    Empty,
    #[error("invalid coordinate name `{0}`")]
    InvalidName(String),
    #[error("duplicate coordinate name `{0}`")]
    Duplicate(String),
    #[error("coordinate index {index} out of range for a chart of dimension {dim}")]
    OutOfRange { index: usize, dim: usize },
}

/// Named coordinates x₁, …, xₙ on an open subset of ℝⁿ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ChartError> {
        if names.is_empty() {
            return Err(ChartError::Empty);
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) {
                return Err(ChartError::InvalidName(n.to_string()));
            }
            if out.iter().any(|m| m == n) {
                return Err(ChartError::Duplicate(n.to_string()));
            }
            out.push(n.to_string());
        }
        Ok(Chart { names: out })
    }

    /// Chart with coordinates `x1, …, xn`.
    pub fn standard(dim: usize) -> Self {
        Chart {
            names: (1..=dim).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coord(&self, index: usize) -> Result<RatFunc, ChartError> {
        self.check(index)?;
        Ok(RatFunc::var(index))
    }

    /// ∂f/∂x_index.
    pub fn partial(&self, f: &RatFunc, index: usize) -> Result<RatFunc, ChartError> {
        self.check(index)?;
        Ok(f.partial(index))
    }

    pub fn parse(&self, src: &str) -> Result<RatFunc, ParseError> {
        parse_expr(src, self)
    }

    pub fn render(&self, f: &RatFunc) -> String {
        f.render(&self.names)
    }

    fn check(&self, index: usize) -> Result<(), ChartError> {
        if index >= self.names.len() {
            Err(ChartError::OutOfRange {
                index,
                dim: self.names.len(),
            })
        } else {
            Ok(())
        }
    }
}
