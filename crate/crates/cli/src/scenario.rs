//! Scenario documents.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("definition {0:?} appears more than once")]
    Duplicate(String),
    #[error("{at}: unknown name {name:?}")]
    Unknown { at: String, name: String },
    #[error("{at}: {name:?} has kind {found}, expected {expected}")]
    KindMismatch {
        at: String,
        name: String,
        found: &'static str,
        expected: &'static str,
    },
    #[error("{at}: {message}")]
    Invalid { at: String, message: String },
}

/// An expression in the field grammar, written as a string or an integer literal.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Expr {
    Text(String),
    Int(i64),
}

impl Expr {
    pub fn source(&self) -> String {
        match self {
            Expr::Text(s) => s.clone(),
            Expr::Int(n) => n.to_string(),
        }
    }
}

pub type MatrixSpec = Vec<Vec<Expr>>;

/// Components keyed by space-separated index names, e.g. `"x y": "1/2"`.
pub type EntriesSpec = BTreeMap<String, Expr>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub chart: Vec<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub expected_status: Option<Expected>,
    #[serde(default)]
    pub definitions: Vec<Definition>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Definition {
    pub name: String,
    #[serde(flatten)]
    pub body: DefinitionBody,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DefinitionBody {
    Function { expr: Expr },
    VectorField { components: Vec<Expr> },
    Form { degree: usize, entries: EntriesSpec },
    Endomorphism { matrix: MatrixSpec },
    Metric { matrix: MatrixSpec },
    Bivector { matrix: MatrixSpec },
    Bundle(BundleSpec),
    Derivation(DerivationSpec),
    Lagrangian(LagrangianSpec),
    Algebroid(AlgebroidSpec),
    Proto(ProtoSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BundleSpec {
    StandardTm,
    TwistedTm {
        twist: String,
    },
    Sl2,
    QuadraticLie {
        pairing: MatrixSpec,
        labels: Vec<String>,
        #[serde(default)]
        brackets: BTreeMap<String, Vec<Expr>>,
    },
    Custom {
        pairing: MatrixSpec,
        anchor: MatrixSpec,
        labels: Vec<String>,
        #[serde(default)]
        brackets: BTreeMap<String, Vec<Expr>>,
    },
    Double {
        proto: String,
    },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftSpec {
    #[default]
    Generalized,
    Tangent,
    Cotangent,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DerivationSpec {
    Lift {
        r: String,
        #[serde(default)]
        lift: LiftSpec,
    },
    Metric {
        g: String,
        #[serde(default)]
        r: Option<String>,
    },
    Flat {
        bundle: String,
    },
    Bfield {
        of: String,
        b: String,
    },
    Sum {
        of: Vec<String>,
    },
    Dual {
        of: String,
        #[serde(default)]
        pairing: Option<MatrixSpec>,
    },
    Restrict {
        of: String,
        frame: MatrixSpec,
        labels: Vec<String>,
    },
    Custom {
        r: MatrixSpec,
        l: MatrixSpec,
        conn: Vec<MatrixSpec>,
        labels: Vec<String>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LagrangianSpec {
    Tangent,
    Cotangent,
    GraphBivector {
        of: String,
    },
    #[serde(rename = "graph_2form")]
    Graph2form {
        of: String,
    },
    Mixed {
        tangent: Vec<String>,
    },
    Custom {
        bundle: String,
        columns: MatrixSpec,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtoSide {
    A,
    AStar,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AlgebroidSpec {
    Tangent,
    Abelian {
        labels: Vec<String>,
    },
    Custom {
        anchor: MatrixSpec,
        labels: Vec<String>,
        #[serde(default)]
        brackets: BTreeMap<String, Vec<Expr>>,
    },
    FromProto {
        proto: String,
        side: ProtoSide,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProtoSpec {
    Extract {
        bundle: String,
        a: String,
        b: String,
    },
    Custom {
        a: String,
        a_star: String,
        #[serde(default)]
        phi: EntriesSpec,
        #[serde(default)]
        chi: EntriesSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
pub struct Check {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub spec: CheckSpec,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Nijenhuis,
    AlmostComplex,
    Dolbeault,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckSpec {
    CourantAxioms {
        bundle: String,
    },
    Cn {
        bundle: String,
        derivation: String,
    },
    HRCompatible {
        twist: String,
        r: String,
    },
    Nijenhuis {
        derivation: String,
        #[serde(default)]
        mode: ModeSpec,
    },
    LagrangianInvariance {
        bundle: String,
        derivation: String,
        lagrangian: String,
    },
    Dirac {
        bundle: String,
        lagrangian: String,
    },
    GaugeEquivalent {
        derivation: String,
        target: String,
        b: String,
    },
    Im {
        algebroid: String,
        derivation: String,
    },
    DualIm {
        algebroid: String,
        derivation: String,
        #[serde(default = "default_degrees")]
        degrees: Vec<usize>,
    },
    Jacobi {
        algebroid: String,
    },
    BivectorGraphPn {
        bivector: String,
        r: String,
    },
    InducedBivector {
        proto: String,
    },
    Manin {
        bundle: String,
        a: String,
        b: String,
        derivation: String,
    },
}

fn default_degrees() -> Vec<usize> {
    vec![0, 1, 2]
}

/// Check kinds with their argument names, for `--list-checks`.
pub const CHECK_KINDS: &[(&str, &str)] = &[
    ("courant_axioms", "bundle"),
    ("cn", "bundle, derivation"),
    ("h_r_compatible", "twist, r"),
    (
        "nijenhuis",
        "derivation, mode = nijenhuis | almost_complex | dolbeault",
    ),
    ("lagrangian_invariance", "bundle, derivation, lagrangian"),
    ("dirac", "bundle, lagrangian"),
    ("gauge_equivalent", "derivation, target, b"),
    ("im", "algebroid, derivation"),
    ("dual_im", "algebroid, derivation, degrees = [0, 1, 2]"),
    ("jacobi", "algebroid"),
    ("bivector_graph_pn", "bivector, r"),
    ("induced_bivector", "proto"),
    ("manin", "bundle, a, b, derivation"),
];

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::CourantAxioms { .. } => "courant_axioms",
            CheckSpec::Cn { .. } => "cn",
            CheckSpec::HRCompatible { .. } => "h_r_compatible",
            CheckSpec::Nijenhuis { .. } => "nijenhuis",
            CheckSpec::LagrangianInvariance { .. } => "lagrangian_invariance",
            CheckSpec::Dirac { .. } => "dirac",
            CheckSpec::GaugeEquivalent { .. } => "gauge_equivalent",
            CheckSpec::Im { .. } => "im",
            CheckSpec::DualIm { .. } => "dual_im",
            CheckSpec::Jacobi { .. } => "jacobi",
            CheckSpec::BivectorGraphPn { .. } => "bivector_graph_pn",
            CheckSpec::InducedBivector { .. } => "induced_bivector",
            CheckSpec::Manin { .. } => "manin",
        }
    }
}

impl Scenario {
    pub fn parse(path: &str, text: &str) -> Result<Scenario, ScenarioError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Syntax {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        if s.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::Version(s.schema_version));
        }
        let mut seen = std::collections::BTreeSet::new();
        for d in &s.definitions {
            if !seen.insert(d.name.as_str()) {
                return Err(ScenarioError::Duplicate(d.name.clone()));
            }
        }
        Ok(s)
    }
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(body: &str) -> Result<Scenario, ScenarioError> {
        Scenario::parse("test.json", body)
    }

    #[test]
    fn defaults_and_integer_expressions() {
        let s = parse(
            r#"{"schema_version": 1, "name": "s", "chart": ["x"],
                "definitions": [{"name": "r", "kind": "endomorphism", "matrix": [[2]]}],
                "checks": [{"kind": "nijenhuis", "derivation": "D"},
                           {"kind": "dual_im", "algebroid": "A", "derivation": "D", "seed": 3}]}"#,
        )
        .unwrap();
        assert!(matches!(
            s.checks[0].spec,
            CheckSpec::Nijenhuis {
                mode: ModeSpec::Nijenhuis,
                ..
            }
        ));
        match &s.checks[1].spec {
            CheckSpec::DualIm { degrees, .. } => assert_eq!(degrees, &[0, 1, 2]),
            other => panic!("{other:?}"),
        }
        assert_eq!(s.checks[1].seed, Some(3));
        match &s.definitions[0].body {
            DefinitionBody::Endomorphism { matrix } => assert_eq!(matrix[0][0].source(), "2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = parse(
            r#"{"schema_version": 1, "name": "s", "chart": ["x"],
                "definitions": [{"name": "a", "kind": "function", "expr": "x"},
                                {"name": "a", "kind": "function", "expr": "1"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::Duplicate(n) if n == "a"));
    }

    #[test]
    fn version_and_unknown_fields() {
        assert!(matches!(
            parse(r#"{"schema_version": 2, "name": "s", "chart": ["x"]}"#),
            Err(ScenarioError::Version(2))
        ));
        let err =
            parse(r#"{"schema_version": 1, "name": "s", "chart": ["x"], "extra": 1}"#).unwrap_err();
        match err {
            ScenarioError::Syntax { line, message, .. } => {
                assert_eq!(line, 1);
                assert!(message.starts_with("unknown field `extra`"));
                assert!(!message.contains(" at line "));
            }
            other => panic!("{other:?}"),
        }
    }
}
