//! Turns scenario definitions into engine objects.

use std::collections::{BTreeMap, HashMap};

use cnalg_core::alt::{Alternating, KForm};
use cnalg_core::bundle::{
    make_quadratic_lie, make_sl2, make_standard_tm, make_twisted_tm, CourantData,
};
use cnalg_core::cartan::{Bivector, EndoTM, SymBilinear, VectorField};
use cnalg_core::compat::{bfield_conjugate, LagrangianFrame};
use cnalg_core::deriv::{
    make_lift, make_metric_derivation, restrict_to_invariant, LiftKind, OneDerivation,
};
use cnalg_core::linalg::{zeros, Matrix, Vector};
use cnalg_core::split::{extract_proto, make_double, PreLieAlgebroidData, ProtoBialgebroidData};
use cnalg_field::{Chart, RatFunc};

use crate::scenario::*;

#[derive(Debug, Clone)]
pub enum Value {
    Function(RatFunc),
    VectorField(VectorField),
    Form(KForm),
    Endomorphism(EndoTM),
    Metric(SymBilinear),
    Bivector(Bivector),
    Bundle(CourantData),
    Derivation(OneDerivation),
    Lagrangian(LagrangianFrame),
    Algebroid(PreLieAlgebroidData),
    Proto(ProtoBialgebroidData),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Function(_) => "function",
            Value::VectorField(_) => "vector_field",
            Value::Form(_) => "form",
            Value::Endomorphism(_) => "endomorphism",
            Value::Metric(_) => "metric",
            Value::Bivector(_) => "bivector",
            Value::Bundle(_) => "bundle",
            Value::Derivation(_) => "derivation",
            Value::Lagrangian(_) => "lagrangian",
            Value::Algebroid(_) => "algebroid",
            Value::Proto(_) => "proto",
        }
    }
}

/// Definitions resolved in document order; a definition may only refer to earlier ones.
pub struct Env {
    pub chart: Chart,
    values: HashMap<String, Value>,
}

fn invalid(at: &str, message: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Invalid {
        at: at.to_string(),
        message: message.to_string(),
    }
}

macro_rules! getter {
    ($name:ident, $variant:ident, $ty:ty, $kind:literal) => {
        pub fn $name(&self, at: &str, name: &str) -> Result<&$ty, ScenarioError> {
            match self.lookup(at, name)? {
                Value::$variant(v) => Ok(v),
                other => Err(ScenarioError::KindMismatch {
                    at: at.to_string(),
                    name: name.to_string(),
                    found: other.kind(),
                    expected: $kind,
                }),
            }
        }
    };
}

impl Env {
    pub fn build(s: &Scenario) -> Result<Env, ScenarioError> {
        let chart = Chart::new(&s.chart).map_err(|e| invalid("chart", e))?;
        let mut env = Env {
            chart,
            values: HashMap::new(),
        };
        for d in &s.definitions {
            let at = format!("definitions.{}", d.name);
            let v = env.resolve(&at, &d.body)?;
            env.values.insert(d.name.clone(), v);
        }
        Ok(env)
    }

    fn lookup(&self, at: &str, name: &str) -> Result<&Value, ScenarioError> {
        self.values.get(name).ok_or_else(|| ScenarioError::Unknown {
            at: at.to_string(),
            name: name.to_string(),
        })
    }

    getter!(form, Form, KForm, "form");
    getter!(endo, Endomorphism, EndoTM, "endomorphism");
    getter!(metric, Metric, SymBilinear, "metric");
    getter!(bivector, Bivector, Bivector, "bivector");
    getter!(bundle, Bundle, CourantData, "bundle");
    getter!(derivation, Derivation, OneDerivation, "derivation");
    getter!(lagrangian, Lagrangian, LagrangianFrame, "lagrangian");
    getter!(algebroid, Algebroid, PreLieAlgebroidData, "algebroid");
    getter!(proto, Proto, ProtoBialgebroidData, "proto");

    fn expr(&self, at: &str, e: &Expr) -> Result<RatFunc, ScenarioError> {
        let src = e.source();
        self.chart
            .parse(&src)
            .map_err(|err| invalid(at, format!("cannot parse {src:?}: {err}")))
    }

    fn vector(&self, at: &str, v: &[Expr]) -> Result<Vector, ScenarioError> {
        v.iter().map(|e| self.expr(at, e)).collect()
    }

    fn matrix(
        &self,
        at: &str,
        rows: &MatrixSpec,
        shape: Option<(usize, usize)>,
    ) -> Result<Matrix, ScenarioError> {
        let m: Vec<Vector> = rows
            .iter()
            .map(|r| self.vector(at, r))
            .collect::<Result<_, _>>()?;
        let cols = m.first().map_or(0, Vec::len);
        if m.iter().any(|r| r.len() != cols) {
            return Err(invalid(at, "matrix rows have different lengths"));
        }
        if let Some((r, c)) = shape {
            if m.len() != r || cols != c {
                return Err(invalid(
                    at,
                    format!("expected a {r}x{c} matrix, got {}x{cols}", m.len()),
                ));
            }
        }
        Ok(Matrix::from_rows(m))
    }

    fn square(&self, at: &str, rows: &MatrixSpec) -> Result<Matrix, ScenarioError> {
        let n = self.chart.dim();
        self.matrix(at, rows, Some((n, n)))
    }

    /// An alternating tensor whose entries are keyed by space-separated labels.
    fn alternating(
        &self,
        at: &str,
        labels: &[String],
        degree: usize,
        entries: &EntriesSpec,
    ) -> Result<Alternating, ScenarioError> {
        let mut w = Alternating::zero(labels.len(), degree);
        for (key, value) in entries {
            let idx: Vec<usize> =
                key.split_whitespace()
                    .map(|name| {
                        labels.iter().position(|l| l == name).ok_or_else(|| {
                            invalid(at, format!("unknown index {name:?} in {key:?}"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
            if idx.len() != degree {
                return Err(invalid(at, format!("entry {key:?} needs {degree} indices")));
            }
            let c = self.expr(at, value)?;
            let current = if cnalg_core::alt::sort_sign(&idx).is_some() {
                w.get(&idx)
            } else {
                return Err(invalid(at, format!("repeated index in {key:?}")));
            };
            w.set(&idx, current.add(&c));
        }
        Ok(w)
    }

    /// Structure sections keyed by "a b" label pairs; `skew` fills in the mirrored pair.
    fn structure(
        &self,
        at: &str,
        labels: &[String],
        brackets: &BTreeMap<String, Vec<Expr>>,
        skew: bool,
    ) -> Result<Vec<Vec<Vector>>, ScenarioError> {
        let k = labels.len();
        let mut c = vec![vec![zeros(k); k]; k];
        let mut given = vec![vec![false; k]; k];
        for (key, value) in brackets {
            let idx: Vec<usize> =
                key.split_whitespace()
                    .map(|name| {
                        labels.iter().position(|l| l == name).ok_or_else(|| {
                            invalid(at, format!("unknown label {name:?} in {key:?}"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
            let [a, b] = idx[..] else {
                return Err(invalid(
                    at,
                    format!("bracket key {key:?} must name two labels"),
                ));
            };
            let v = self.vector(at, value)?;
            if v.len() != k {
                return Err(invalid(at, format!("bracket {key:?} needs {k} components")));
            }
            c[a][b] = v;
            given[a][b] = true;
        }
        if skew {
            for a in 0..k {
                for b in 0..k {
                    if given[a][b] && !given[b][a] {
                        c[b][a] = c[a][b].iter().map(RatFunc::neg).collect();
                    }
                }
            }
        }
        Ok(c)
    }

    fn check_labels(at: &str, labels: &[String]) -> Result<(), ScenarioError> {
        let mut seen = std::collections::BTreeSet::new();
        for l in labels {
            if l.split_whitespace().count() != 1 || !seen.insert(l) {
                return Err(invalid(
                    at,
                    format!("frame label {l:?} is empty, repeated or contains spaces"),
                ));
            }
        }
        Ok(())
    }

    fn resolve(&self, at: &str, body: &DefinitionBody) -> Result<Value, ScenarioError> {
        let n = self.chart.dim();
        Ok(match body {
            DefinitionBody::Function { expr } => Value::Function(self.expr(at, expr)?),
            DefinitionBody::VectorField { components } => {
                let v = self.vector(at, components)?;
                if v.len() != n {
                    return Err(invalid(at, format!("vector field needs {n} components")));
                }
                Value::VectorField(v)
            }
            DefinitionBody::Form { degree, entries } => {
                if *degree > n {
                    return Err(invalid(
                        at,
                        format!("degree {degree} exceeds dimension {n}"),
                    ));
                }
                Value::Form(self.alternating(at, self.chart.names(), *degree, entries)?)
            }
            DefinitionBody::Endomorphism { matrix } => {
                Value::Endomorphism(EndoTM(self.square(at, matrix)?))
            }
            DefinitionBody::Metric { matrix } => Value::Metric(
                SymBilinear::new(self.square(at, matrix)?, n).map_err(|e| invalid(at, e))?,
            ),
            DefinitionBody::Bivector { matrix } => Value::Bivector(
                Bivector::new(self.square(at, matrix)?, n).map_err(|e| invalid(at, e))?,
            ),
            DefinitionBody::Bundle(spec) => Value::Bundle(self.bundle_spec(at, spec)?),
            DefinitionBody::Derivation(spec) => Value::Derivation(self.derivation_spec(at, spec)?),
            DefinitionBody::Lagrangian(spec) => Value::Lagrangian(self.lagrangian_spec(at, spec)?),
            DefinitionBody::Algebroid(spec) => Value::Algebroid(self.algebroid_spec(at, spec)?),
            DefinitionBody::Proto(spec) => Value::Proto(self.proto_spec(at, spec)?),
        })
    }

    fn bundle_spec(&self, at: &str, spec: &BundleSpec) -> Result<CourantData, ScenarioError> {
        let n = self.chart.dim();
        match spec {
            BundleSpec::StandardTm => Ok(make_standard_tm(&self.chart)),
            BundleSpec::TwistedTm { twist } => {
                let h = self.form(at, twist)?;
                make_twisted_tm(&self.chart, h).map_err(|e| invalid(at, e))
            }
            BundleSpec::Sl2 => Ok(make_sl2(&self.chart)),
            BundleSpec::QuadraticLie {
                pairing,
                labels,
                brackets,
            } => {
                Self::check_labels(at, labels)?;
                let k = labels.len();
                let g = self.matrix(at, pairing, Some((k, k)))?;
                let c = self.structure(at, labels, brackets, true)?;
                make_quadratic_lie(&self.chart, g, c, labels.clone()).map_err(|e| invalid(at, e))
            }
            BundleSpec::Custom {
                pairing,
                anchor,
                labels,
                brackets,
            } => {
                Self::check_labels(at, labels)?;
                let k = labels.len();
                let g = self.matrix(at, pairing, Some((k, k)))?;
                let a = self.matrix(at, anchor, Some((n, k)))?;
                let c = self.structure(at, labels, brackets, false)?;
                CourantData::new(self.chart.clone(), g, a, c, labels.clone())
                    .map_err(|e| invalid(at, e))
            }
            BundleSpec::Double { proto } => {
                make_double(self.proto(at, proto)?).map_err(|e| invalid(at, e))
            }
        }
    }

    fn derivation_spec(
        &self,
        at: &str,
        spec: &DerivationSpec,
    ) -> Result<OneDerivation, ScenarioError> {
        let n = self.chart.dim();
        match spec {
            DerivationSpec::Lift { r, lift } => {
                let kind = match lift {
                    LiftSpec::Generalized => LiftKind::Generalized,
                    LiftSpec::Tangent => LiftKind::Tangent,
                    LiftSpec::Cotangent => LiftKind::Cotangent,
                };
                make_lift(&self.chart, self.endo(at, r)?, kind).map_err(|e| invalid(at, e))
            }
            DerivationSpec::Metric { g, r } => {
                let r = r.as_deref().map(|r| self.endo(at, r)).transpose()?;
                make_metric_derivation(&self.chart, r, self.metric(at, g)?)
                    .map_err(|e| invalid(at, e))
            }
            DerivationSpec::Flat { bundle } => {
                let e = self.bundle(at, bundle)?;
                Ok(OneDerivation::flat_connection(
                    &self.chart,
                    e.labels().to_vec(),
                ))
            }
            DerivationSpec::Bfield { of, b } => {
                bfield_conjugate(self.derivation(at, of)?, self.form(at, b)?)
                    .map_err(|e| invalid(at, e))
            }
            DerivationSpec::Sum { of } => {
                let (first, rest) = of
                    .split_first()
                    .ok_or_else(|| invalid(at, "sum of nothing"))?;
                let mut acc = self.derivation(at, first)?.clone();
                for name in rest {
                    acc = acc
                        .sum(self.derivation(at, name)?)
                        .map_err(|e| invalid(at, e))?;
                }
                Ok(acc)
            }
            DerivationSpec::Dual { of, pairing } => {
                let d = self.derivation(at, of)?;
                let k = d.rank();
                let g = match pairing {
                    Some(p) => self.matrix(at, p, Some((k, k)))?,
                    None => Matrix::identity(k),
                };
                d.dualize(&g).map_err(|e| invalid(at, e))
            }
            DerivationSpec::Restrict { of, frame, labels } => {
                Self::check_labels(at, labels)?;
                let d = self.derivation(at, of)?;
                let f = self.matrix(at, frame, Some((d.rank(), labels.len())))?;
                restrict_to_invariant(d, &f, labels.clone()).map_err(|e| invalid(at, e))
            }
            DerivationSpec::Custom { r, l, conn, labels } => {
                Self::check_labels(at, labels)?;
                let k = labels.len();
                if conn.len() != n {
                    return Err(invalid(
                        at,
                        format!("conn needs one matrix per coordinate ({n})"),
                    ));
                }
                let conn = conn
                    .iter()
                    .map(|m| self.matrix(at, m, Some((k, k))))
                    .collect::<Result<_, _>>()?;
                OneDerivation::new(
                    self.chart.clone(),
                    EndoTM(self.square(at, r)?),
                    self.matrix(at, l, Some((k, k)))?,
                    conn,
                    labels.clone(),
                )
                .map_err(|e| invalid(at, e))
            }
        }
    }

    fn lagrangian_spec(
        &self,
        at: &str,
        spec: &LagrangianSpec,
    ) -> Result<LagrangianFrame, ScenarioError> {
        let n = self.chart.dim();
        match spec {
            LagrangianSpec::Tangent => Ok(LagrangianFrame::tangent(n)),
            LagrangianSpec::Cotangent => Ok(LagrangianFrame::cotangent(n)),
            LagrangianSpec::GraphBivector { of } => {
                Ok(LagrangianFrame::graph_bivector(self.bivector(at, of)?))
            }
            LagrangianSpec::Graph2form { of } => {
                LagrangianFrame::graph_2form(self.form(at, of)?).map_err(|e| invalid(at, e))
            }
            LagrangianSpec::Mixed { tangent } => {
                let idx = tangent
                    .iter()
                    .map(|c| {
                        self.chart
                            .index_of(c)
                            .ok_or_else(|| invalid(at, format!("unknown coordinate {c:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(LagrangianFrame::mixed(n, &idx))
            }
            LagrangianSpec::Custom { bundle, columns } => {
                let e = self.bundle(at, bundle)?;
                // columns are listed as rows here, one section per row
                let m = self.matrix(at, columns, None)?;
                if m.cols() != e.rank() {
                    return Err(invalid(
                        at,
                        format!("each column needs {} components", e.rank()),
                    ));
                }
                LagrangianFrame::new(e.pairing(), m.transpose()).map_err(|e| invalid(at, e))
            }
        }
    }

    fn algebroid_spec(
        &self,
        at: &str,
        spec: &AlgebroidSpec,
    ) -> Result<PreLieAlgebroidData, ScenarioError> {
        let n = self.chart.dim();
        match spec {
            AlgebroidSpec::Tangent => Ok(PreLieAlgebroidData::tangent(&self.chart)),
            AlgebroidSpec::Abelian { labels } => {
                Self::check_labels(at, labels)?;
                Ok(PreLieAlgebroidData::abelian(&self.chart, labels.clone()))
            }
            AlgebroidSpec::Custom {
                anchor,
                labels,
                brackets,
            } => {
                Self::check_labels(at, labels)?;
                let a = self.matrix(at, anchor, Some((n, labels.len())))?;
                let c = self.structure(at, labels, brackets, true)?;
                PreLieAlgebroidData::new(self.chart.clone(), a, c, labels.clone())
                    .map_err(|e| invalid(at, e))
            }
            AlgebroidSpec::FromProto { proto, side } => {
                let p = self.proto(at, proto)?;
                Ok(match side {
                    ProtoSide::A => p.a.clone(),
                    ProtoSide::AStar => p.a_star.clone(),
                })
            }
        }
    }

    fn proto_spec(
        &self,
        at: &str,
        spec: &ProtoSpec,
    ) -> Result<ProtoBialgebroidData, ScenarioError> {
        match spec {
            ProtoSpec::Extract { bundle, a, b } => {
                let e = self.bundle(at, bundle)?;
                extract_proto(e, self.lagrangian(at, a)?, self.lagrangian(at, b)?)
                    .map_err(|e| invalid(at, e))
            }
            ProtoSpec::Custom {
                a,
                a_star,
                phi,
                chi,
            } => {
                let a = self.algebroid(at, a)?;
                let s = self.algebroid(at, a_star)?;
                let phi = self.alternating(at, s.labels(), 3, phi)?;
                let chi = self.alternating(at, a.labels(), 3, chi)?;
                ProtoBialgebroidData::new(a.clone(), s.clone(), phi, chi)
                    .map_err(|e| invalid(at, e))
            }
        }
    }

    /// Confirms that every name a check refers to exists with the right kind.
    pub fn validate(&self, index: usize, spec: &CheckSpec) -> Result<(), ScenarioError> {
        let at = format!("checks[{index}] ({})", spec.kind());
        let at = at.as_str();
        match spec {
            CheckSpec::CourantAxioms { bundle } => {
                self.bundle(at, bundle)?;
            }
            CheckSpec::Cn { bundle, derivation } => {
                self.bundle(at, bundle)?;
                self.derivation(at, derivation)?;
            }
            CheckSpec::HRCompatible { twist, r } => {
                self.form(at, twist)?;
                self.endo(at, r)?;
            }
            CheckSpec::Nijenhuis { derivation, .. } => {
                self.derivation(at, derivation)?;
            }
            CheckSpec::LagrangianInvariance {
                bundle,
                derivation,
                lagrangian,
            } => {
                self.bundle(at, bundle)?;
                self.derivation(at, derivation)?;
                self.lagrangian(at, lagrangian)?;
            }
            CheckSpec::Dirac { bundle, lagrangian } => {
                self.bundle(at, bundle)?;
                self.lagrangian(at, lagrangian)?;
            }
            CheckSpec::GaugeEquivalent {
                derivation,
                target,
                b,
            } => {
                self.derivation(at, derivation)?;
                self.derivation(at, target)?;
                self.form(at, b)?;
            }
            CheckSpec::Im {
                algebroid,
                derivation,
            }
            | CheckSpec::DualIm {
                algebroid,
                derivation,
                ..
            } => {
                self.algebroid(at, algebroid)?;
                self.derivation(at, derivation)?;
            }
            CheckSpec::Jacobi { algebroid } => {
                self.algebroid(at, algebroid)?;
            }
            CheckSpec::BivectorGraphPn { bivector, r } => {
                self.bivector(at, bivector)?;
                self.endo(at, r)?;
            }
            CheckSpec::InducedBivector { proto } => {
                self.proto(at, proto)?;
            }
            CheckSpec::Manin {
                bundle,
                a,
                b,
                derivation,
            } => {
                self.bundle(at, bundle)?;
                self.lagrangian(at, a)?;
                self.lagrangian(at, b)?;
                self.derivation(at, derivation)?;
            }
        }
        Ok(())
    }
}
