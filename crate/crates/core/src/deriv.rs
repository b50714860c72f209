//! 1-derivations (D, l, r) on trivialized bundles.

use cnalg_field::{Chart, RatFunc};
use serde::Serialize;
use thiserror::Error;

use crate::alt::{combinations, Alternating, MultiSection};
use crate::bundle::generalized_labels;
use crate::cartan::{
    apply_vf, coord_field, cotangent_labels, deformed_bracket, levi_civita, lie_bracket, nijenhuis_torsion,
    render_vector, tangent_labels, CartanError, EndoTM, SymBilinear, VectorField,
};
use crate::linalg::{is_zero_vec, unit, vadd, vscale, vsub, zeros, Matrix, Vector};
use crate::report::{CheckReport, Entry, Witness};
use crate::sample::{Sampler, SAMPLES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("pairing is degenerate")]
    DegeneratePairing,
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error("frame has rank {rank} but {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
    #[error("subbundle is not invariant: {expr} at {at}")]
    NotInvariant { expr: String, at: String },
}

/// A 1-derivation stored on a frame: `conn[i]` has column a equal to D_{∂i}(e_a).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneDerivation {
    chart: Chart,
    r: EndoTM,
    l: Matrix,
    conn: Vec<Matrix>,
    labels: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    Tangent,
    Cotangent,
    Generalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NijenhuisMode {
    Nijenhuis,
    AlmostComplex,
    Dolbeault,
}

impl OneDerivation {
    pub fn new(chart: Chart, r: EndoTM, l: Matrix, conn: Vec<Matrix>, labels: Vec<String>) -> Result<Self, DerivError> {
        let n = chart.dim();
        let k = l.rows();
        if r.dim() != n || !r.matrix().is_square() {
            return Err(DerivError::Shape(format!("base endomorphism must be {n}x{n}")));
        }
        if !l.is_square() {
            return Err(DerivError::Shape("fiber endomorphism must be square".into()));
        }
        if conn.len() != n || conn.iter().any(|c| c.rows() != k || c.cols() != k) {
            return Err(DerivError::Shape(format!("connection needs {n} matrices of size {k}x{k}")));
        }
        if labels.len() != k {
            return Err(DerivError::Shape(format!("expected {k} frame labels")));
        }
        Ok(OneDerivation { chart, r, l, conn, labels })
    }

    /// (0, id, 0) with zero connection coefficients: the trivial flat connection.
    pub fn flat_connection(chart: &Chart, labels: Vec<String>) -> Self {
        let k = labels.len();
        let n = chart.dim();
        OneDerivation {
            chart: chart.clone(),
            r: EndoTM::zero(n),
            l: Matrix::identity(k),
            conn: vec![Matrix::zeros(k, k); n],
            labels,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.l.rows()
    }

    pub fn base(&self) -> &EndoTM {
        &self.r
    }

    pub fn fiber(&self) -> &Matrix {
        &self.l
    }

    pub fn conn(&self, i: usize) -> &Matrix {
        &self.conn[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.rank());
        self.labels = labels;
        self
    }

    pub fn apply_l(&self, s: &[RatFunc]) -> Vector {
        self.l.apply(s)
    }

    /// D_X(Σ f_a e_a) = Σ_a f_a Σ_i X^i D_{∂i}e_a + X(f_a) l(e_a) − r(X)(f_a) e_a.
    pub fn apply(&self, x: &[RatFunc], s: &[RatFunc]) -> Vector {
        let k = self.rank();
        assert_eq!(x.len(), self.dim(), "vector field on the wrong chart");
        assert_eq!(s.len(), k, "section of the wrong rank");
        let mut out = zeros(k);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() || self.conn[i].is_zero() {
                continue;
            }
            out = vadd(&out, &vscale(xi, &self.conn[i].apply(s)));
        }
        let xs: Vector = s.iter().map(|f| apply_vf(x, f)).collect();
        if !is_zero_vec(&xs) {
            out = vadd(&out, &self.l.apply(&xs));
        }
        let rx = self.r.apply(x);
        let rxs: Vector = s.iter().map(|f| apply_vf(&rx, f)).collect();
        vsub(&out, &rxs)
    }

    pub fn sum(&self, other: &OneDerivation) -> Result<OneDerivation, DerivError> {
        if self.rank() != other.rank() || self.dim() != other.dim() {
            return Err(DerivError::Shape("summands live on different bundles".into()));
        }
        Ok(OneDerivation {
            chart: self.chart.clone(),
            r: EndoTM(self.r.matrix().add(other.r.matrix())),
            l: self.l.add(&other.l),
            conn: self.conn.iter().zip(&other.conn).map(|(a, b)| a.add(b)).collect(),
            labels: self.labels.clone(),
        })
    }

    /// Conjugation σ ↦ T σ by an invertible frame change: D'_X = T∘D_X∘T⁻¹, l' = T l T⁻¹.
    pub fn conjugate(&self, t: &Matrix) -> Result<OneDerivation, DerivError> {
        let tinv = t.inverse().ok_or_else(|| DerivError::Shape("conjugating matrix is singular".into()))?;
        let n = self.dim();
        let cols = tinv.columns();
        let conn = (0..n)
            .map(|i| {
                let x = coord_field(n, i);
                let images: Vec<Vector> = cols.iter().map(|c| t.apply(&self.apply(&x, c))).collect();
                Matrix::from_cols(self.rank(), &images)
            })
            .collect();
        Ok(OneDerivation {
            chart: self.chart.clone(),
            r: self.r.clone(),
            l: t.mul(&self.l).mul(&tinv),
            conn,
            labels: self.labels.clone(),
        })
    }

    /// The dual 1-derivation on E* ≅ E, identified through `pairing`:
    /// ⟨D*_X μ, σ⟩ = X⟨μ, lσ⟩ − r(X)⟨μ,σ⟩ − ⟨μ, D_Xσ⟩.
    pub fn dualize(&self, pairing: &Matrix) -> Result<OneDerivation, DerivError> {
        let k = self.rank();
        if pairing.rows() != k || pairing.cols() != k {
            return Err(DerivError::Shape(format!("pairing must be {k}x{k}")));
        }
        let g = pairing;
        let ginv = g.inverse().ok_or(DerivError::DegeneratePairing)?;
        let gl = g.mul(&self.l);
        let l_star = ginv.mul(&self.l.transpose()).mul(g);
        let n = self.dim();
        let conn = (0..n)
            .map(|i| {
                let ri = self.r.apply(&coord_field(n, i));
                let gc = g.mul(&self.conn[i]);
                let m = Matrix::from_fn(k, k, |a, b| {
                    gl.get(a, b).partial(i).sub(&apply_vf(&ri, g.get(a, b))).sub(gc.get(a, b))
                });
                ginv.mul(&m.transpose())
            })
            .collect();
        Ok(OneDerivation {
            chart: self.chart.clone(),
            r: self.r.clone(),
            l: l_star,
            conn,
            labels: self.labels.clone(),
        })
    }

    /// First component where `self` and `other` differ, rendered.
    pub fn difference(&self, other: &OneDerivation) -> Option<Witness> {
        let rd = self.r.matrix().sub(other.r.matrix());
        for i in 0..self.dim() {
            let col = rd.col(i);
            if !is_zero_vec(&col) {
                return Some(Witness {
                    expr: render_vector(&col, &tangent_labels(&self.chart), &self.chart),
                    at: format!("base endomorphism on {}", tangent_labels(&self.chart)[i]),
                });
            }
        }
        let ld = self.l.sub(&other.l);
        for a in 0..self.rank() {
            let col = ld.col(a);
            if !is_zero_vec(&col) {
                return Some(Witness {
                    expr: self.render_section(&col),
                    at: format!("fiber endomorphism on {}", self.labels[a]),
                });
            }
        }
        let tl = tangent_labels(&self.chart);
        for i in 0..self.dim() {
            let d = self.conn[i].sub(&other.conn[i]);
            for a in 0..self.rank() {
                let col = d.col(a);
                if !is_zero_vec(&col) {
                    return Some(Witness {
                        expr: self.render_section(&col),
                        at: format!("D_{{{}}}({})", tl[i], self.labels[a]),
                    });
                }
            }
        }
        None
    }

    pub fn render_section(&self, s: &[RatFunc]) -> String {
        render_vector(s, &self.labels, &self.chart)
    }

    pub fn render_vf(&self, x: &[RatFunc]) -> String {
        render_vector(x, &tangent_labels(&self.chart), &self.chart)
    }

    /// Coordinate fields followed by `SAMPLES` random vector fields.
    pub fn probe_fields(&self, sampler: &mut Sampler) -> Vec<(String, VectorField)> {
        probe_fields(&self.chart, sampler)
    }

    /// Frame sections followed by `SAMPLES` random sections.
    pub fn probe_sections(&self, sampler: &mut Sampler) -> Vec<(String, Vector)> {
        probe_sections(&self.chart, &self.labels, sampler)
    }

    fn section_witness(&self, s: &[RatFunc], at: impl FnOnce() -> String) -> Option<Witness> {
        if is_zero_vec(s) {
            None
        } else {
            Some(Witness {
                expr: self.render_section(s),
                at: at(),
            })
        }
    }
}

pub(crate) fn render_list(chart: &Chart, v: &[RatFunc]) -> String {
    v.iter().map(|f| chart.render(f)).collect::<Vec<_>>().join(", ")
}

pub fn probe_fields(chart: &Chart, sampler: &mut Sampler) -> Vec<(String, VectorField)> {
    let n = chart.dim();
    let labels = tangent_labels(chart);
    let mut out: Vec<(String, VectorField)> = (0..n).map(|i| (labels[i].clone(), coord_field(n, i))).collect();
    for s in 0..SAMPLES {
        let v = sampler.vector(n);
        out.push((format!("X{} = ({})", s + 1, render_list(chart, &v)), v));
    }
    out
}

pub fn probe_sections(chart: &Chart, labels: &[String], sampler: &mut Sampler) -> Vec<(String, Vector)> {
    let k = labels.len();
    let mut out: Vec<(String, Vector)> = (0..k).map(|a| (labels[a].clone(), unit(k, a))).collect();
    for s in 0..SAMPLES {
        let v = sampler.vector(k);
        out.push((format!("s{} = ({})", s + 1, render_list(chart, &v)), v));
    }
    out
}

/// Tangent, cotangent or generalized lift of r.
pub fn make_lift(chart: &Chart, r: &EndoTM, kind: LiftKind) -> Result<OneDerivation, DerivError> {
    let n = chart.dim();
    if r.dim() != n {
        return Err(DerivError::Shape(format!("base endomorphism must be {n}x{n}")));
    }
    let rm = r.matrix();
    match kind {
        // D^r_X(Y) = [Y, rX] − r[Y, X]; on frames component j of D_{∂i}∂_a is ∂_a r_ji
        LiftKind::Tangent => {
            let conn = (0..n).map(|i| Matrix::from_fn(n, n, |j, a| rm.get(j, i).partial(a))).collect();
            OneDerivation::new(chart.clone(), r.clone(), rm.clone(), conn, tangent_labels(chart))
        }
        // D^{r,*}_X(α) = 𝓛_X(r*α) − 𝓛_{rX}α; component b of D_{∂i}dx_a is ∂_i r_ab − ∂_b r_ai
        LiftKind::Cotangent => {
            let conn = (0..n)
                .map(|i| Matrix::from_fn(n, n, |b, a| rm.get(a, b).partial(i).sub(&rm.get(a, i).partial(b))))
                .collect();
            OneDerivation::new(chart.clone(), r.clone(), rm.transpose(), conn, cotangent_labels(chart))
        }
        LiftKind::Generalized => {
            let t = make_lift(chart, r, LiftKind::Tangent)?;
            let c = make_lift(chart, r, LiftKind::Cotangent)?;
            let z = Matrix::zeros(n, n);
            let conn = (0..n).map(|i| Matrix::block(&t.conn[i], &z, &z, &c.conn[i])).collect();
            OneDerivation::new(
                chart.clone(),
                r.clone(),
                Matrix::block(&t.l, &z, &z, &c.l),
                conn,
                generalized_labels(chart),
            )
        }
    }
}

/// 𝔻^g on TM ⊕ T*M (r = 0, l = (0, g♭), D_X(Y, β) = (0, g♭∇_X Y)), or 𝔻^r + 𝔻^g when r is given.
pub fn make_metric_derivation(chart: &Chart, r: Option<&EndoTM>, g: &SymBilinear) -> Result<OneDerivation, DerivError> {
    let n = chart.dim();
    if g.dim() != n {
        return Err(DerivError::Shape(format!("metric must be {n}x{n}")));
    }
    let gamma = levi_civita(g)?;
    let gm = g.matrix();
    let z = Matrix::zeros(n, n);
    let l = Matrix::block(&z, &z, gm, &z);
    let conn = (0..n)
        .map(|i| {
            // D_{∂i}(∂_a) = g♭(Σ_c Γ^c_{ia} ∂_c)
            let lower = Matrix::from_fn(n, n, |m, a| {
                let mut acc = RatFunc::zero();
                for c in 0..n {
                    let gc = gamma.get(c, i, a);
                    if !gc.is_zero() {
                        acc = acc.add(&gc.mul(gm.get(c, m)));
                    }
                }
                acc
            });
            Matrix::block(&z, &z, &lower, &z)
        })
        .collect();
    let dg = OneDerivation::new(chart.clone(), EndoTM::zero(n), l, conn, generalized_labels(chart))?;
    match r {
        None => Ok(dg),
        Some(r) => make_lift(chart, r, LiftKind::Generalized)?.sum(&dg),
    }
}

/// Self-duality 𝒟* = 𝒟 under the pairing.
pub fn self_duality_entry(d: &OneDerivation, pairing: &Matrix) -> Entry {
    match d.dualize(pairing) {
        Err(e) => Entry::from_bool("self_duality", false, e.to_string(), "pairing"),
        Ok(dual) => Entry::from_witness("self_duality", dual.difference(d)),
    }
}

pub fn check_nijenhuis(d: &OneDerivation, mode: NijenhuisMode, seed: u64) -> CheckReport {
    let name = match mode {
        NijenhuisMode::Nijenhuis => "nijenhuis",
        NijenhuisMode::AlmostComplex => "almost_complex",
        NijenhuisMode::Dolbeault => "dolbeault",
    };
    let mut report = CheckReport::new(name).with_seed(seed);
    let mut sampler = Sampler::new(seed, d.dim());
    let fields = d.probe_fields(&mut sampler);
    let sections = d.probe_sections(&mut sampler);
    if matches!(mode, NijenhuisMode::Nijenhuis | NijenhuisMode::Dolbeault) {
        nijenhuis_entries(d, &fields, &sections, &mut report);
    }
    if matches!(mode, NijenhuisMode::AlmostComplex | NijenhuisMode::Dolbeault) {
        almost_complex_entries(d, &fields, &sections, &mut report);
    }
    report
}

type Probes = [(String, Vector)];

fn nijenhuis_entries(d: &OneDerivation, fields: &Probes, sections: &Probes, report: &mut CheckReport) {
    let n = d.dim();
    // the torsion is a tensor, so coordinate pairs decide it
    let torsion = || {
        for i in 0..n {
            for j in (i + 1)..n {
                let (x, y) = (coord_field(n, i), coord_field(n, j));
                let t = nijenhuis_torsion(&d.r, &x, &y);
                if !is_zero_vec(&t) {
                    return Some(Witness {
                        expr: d.render_vf(&t),
                        at: format!("X={}, Y={}", d.render_vf(&x), d.render_vf(&y)),
                    });
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("N_r", torsion()));

    let commute = || {
        for (nx, x) in fields {
            for (ns, s) in sections {
                let v = vsub(&d.apply(x, &d.apply_l(s)), &d.apply_l(&d.apply(x, s)));
                if let Some(w) = d.section_witness(&v, || format!("X={nx}, σ={ns}")) {
                    return Some(w);
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("D_X∘l - l∘D_X", commute()));

    let curvature = || {
        for (a, (nx, x)) in fields.iter().enumerate() {
            for (ny, y) in fields.iter().skip(a + 1) {
                let xy = lie_bracket(x, y);
                let xy_r = deformed_bracket(&d.r, x, y);
                for (ns, s) in sections {
                    let lhs = d.apply_l(&d.apply(&xy, s));
                    let comm = vsub(&d.apply(x, &d.apply(y, s)), &d.apply(y, &d.apply(x, s)));
                    let v = vsub(&vsub(&lhs, &comm), &d.apply(&xy_r, s));
                    if let Some(w) = d.section_witness(&v, || format!("X={nx}, Y={ny}, σ={ns}")) {
                        return Some(w);
                    }
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("l∘D_[X,Y] - [D_X,D_Y] - D_[X,Y]_r", curvature()));
}

fn almost_complex_entries(d: &OneDerivation, fields: &Probes, sections: &Probes, report: &mut CheckReport) {
    let n = d.dim();
    let k = d.rank();
    let r2 = d.r.matrix().mul(d.r.matrix()).add(&Matrix::identity(n));
    let rw = (0..n).find(|&i| !is_zero_vec(&r2.col(i))).map(|i| Witness {
        expr: d.render_vf(&r2.col(i)),
        at: format!("(r^2 + id)({})", tangent_labels(&d.chart)[i]),
    });
    report.push(Entry::from_witness("r^2 = -id", rw));
    let l2 = d.l.mul(&d.l).add(&Matrix::identity(k));
    let lw = (0..k).find(|&a| !is_zero_vec(&l2.col(a))).map(|a| Witness {
        expr: d.render_section(&l2.col(a)),
        at: format!("(l^2 + id)({})", d.labels[a]),
    });
    report.push(Entry::from_witness("l^2 = -id", lw));
    let compat = || {
        for (nx, x) in fields {
            let rx = d.r.apply(x);
            for (ns, s) in sections {
                let v = vadd(&d.apply(&rx, s), &d.apply_l(&d.apply(x, s)));
                if let Some(w) = d.section_witness(&v, || format!("X={nx}, σ={ns}")) {
                    return Some(w);
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("D_rX + l∘D_X", compat()));
}

/// Result of extending D* to an m-form μ on the bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualApply {
    /// μ(lσ₁, σ₂, …) = μ(σ₁, lσ₂, …) on all frame tuples.
    pub in_gamma_l: bool,
    /// Frame indices (a, b, rest…) where the Γ_l identity fails.
    pub gamma_l_witness: Option<Vec<usize>>,
    /// μ_l(a; rest) = μ(l e_a, rest) on all ordered frame tuples (nonzero values only).
    pub mu_l: Vec<(Vec<usize>, RatFunc)>,
    pub mu_l_alternating: bool,
    /// D*_X(μ) on increasing frame tuples; a genuine form only when `in_gamma_l`.
    pub value: MultiSection,
    pub tensorial: bool,
}

fn ordered_tuples(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..k).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// μ_l(a; rest) on an ordered tuple (a, rest…).
pub fn mu_l_at(d: &OneDerivation, mu: &MultiSection, idx: &[usize]) -> RatFunc {
    let le = d.l.col(idx[0]);
    let mut args: Vec<Vector> = vec![le];
    args.extend(idx[1..].iter().map(|&b| unit(d.rank(), b)));
    mu.eval(&args)
}

/// Γ_l membership: μ_l alternating in its first two slots.
pub fn gamma_l_defect(d: &OneDerivation, mu: &MultiSection) -> Option<Vec<usize>> {
    let m = mu.degree();
    if m < 2 {
        return None;
    }
    for idx in ordered_tuples(d.rank(), m) {
        if idx[0] > idx[1] {
            continue;
        }
        let mut swapped = idx.clone();
        swapped.swap(0, 1);
        if !mu_l_at(d, mu, &idx).add(&mu_l_at(d, mu, &swapped)).is_zero() {
            return Some(idx);
        }
    }
    None
}

/// D*_X(μ)(σ₁,…,σ_m) = X(μ(lσ₁,σ₂,…)) − r(X)(μ(σ₁,…)) − Σ_k (−1)^{k−1} μ(D_Xσ_k, σ₁,…,σ̂_k,…);
/// for m = 0, D*_X(f) = −r(X)(f).
pub fn dual_eval(d: &OneDerivation, x: &[RatFunc], mu: &MultiSection, sections: &[Vector]) -> RatFunc {
    let m = mu.degree();
    assert_eq!(sections.len(), m, "wrong number of arguments");
    let rx = d.r.apply(x);
    if m == 0 {
        return apply_vf(&rx, &mu.get(&[])).neg();
    }
    let mut first = sections.to_vec();
    first[0] = d.apply_l(&sections[0]);
    let mut acc = apply_vf(x, &mu.eval(&first)).sub(&apply_vf(&rx, &mu.eval(sections)));
    for k in 0..m {
        let mut args = Vec::with_capacity(m);
        args.push(d.apply(x, &sections[k]));
        args.extend(sections.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, s)| s.clone()));
        let t = mu.eval(&args);
        acc = if k % 2 == 0 { acc.sub(&t) } else { acc.add(&t) };
    }
    acc
}

/// D*_X(μ) on increasing frame tuples.
pub fn dual_apply_frames(d: &OneDerivation, x: &[RatFunc], mu: &MultiSection) -> MultiSection {
    let k = d.rank();
    Alternating::from_fn(k, mu.degree(), |idx| {
        let sections: Vec<Vector> = idx.iter().map(|&a| unit(k, a)).collect();
        dual_eval(d, x, mu, &sections)
    })
}

pub fn extended_dual_apply(d: &OneDerivation, x: &[RatFunc], mu: &MultiSection) -> DualApply {
    let k = d.rank();
    let m = mu.degree();
    let witness = gamma_l_defect(d, mu);
    let in_gamma_l = witness.is_none();
    let mut mu_l = Vec::new();
    if m >= 1 {
        for idx in ordered_tuples(k, m) {
            let v = mu_l_at(d, mu, &idx);
            if !v.is_zero() {
                mu_l.push((idx, v));
            }
        }
    }
    DualApply {
        in_gamma_l,
        gamma_l_witness: witness,
        mu_l,
        mu_l_alternating: in_gamma_l,
        value: dual_apply_frames(d, x, mu),
        tensorial: in_gamma_l,
    }
}

/// μ_l as an m-form; only meaningful for μ ∈ Γ_l.
pub fn mu_l_form(d: &OneDerivation, mu: &MultiSection) -> MultiSection {
    let m = mu.degree();
    if m == 0 {
        return Alternating::zero(d.rank(), 0);
    }
    Alternating::from_fn(d.rank(), m, |idx| mu_l_at(d, mu, idx))
}

/// A ℚ(x)-basis of Γ_l(∧^m E*).
pub fn gamma_l_basis(d: &OneDerivation, m: usize) -> Vec<MultiSection> {
    let k = d.rank();
    let basis: Vec<Vec<usize>> = combinations(k, m);
    let monos: Vec<MultiSection> = basis
        .iter()
        .map(|idx| {
            let mut a = Alternating::zero(k, m);
            a.set(idx, RatFunc::one());
            a
        })
        .collect();
    if m < 2 {
        return monos;
    }
    // linear conditions μ_l(a;b,…) + μ_l(b;a,…) = 0 in the unknown coefficients
    let conditions: Vec<Vec<usize>> = ordered_tuples(k, m).into_iter().filter(|t| t[0] <= t[1]).collect();
    let system = Matrix::from_fn(conditions.len(), monos.len(), |row, col| {
        let idx = &conditions[row];
        let mut sw = idx.clone();
        sw.swap(0, 1);
        mu_l_at(d, &monos[col], idx).add(&mu_l_at(d, &monos[col], &sw))
    });
    system
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut acc = Alternating::zero(k, m);
            for (c, mono) in v.iter().zip(&monos) {
                if !c.is_zero() {
                    acc = acc.add(&mono.scale(c));
                }
            }
            acc
        })
        .collect()
}

/// Restriction of 𝒟 to the subbundle spanned by the columns of `frame`.
pub fn restrict_to_invariant(d: &OneDerivation, frame: &Matrix, labels: Vec<String>) -> Result<OneDerivation, DerivError> {
    let k = d.rank();
    let p = frame.cols();
    if frame.rows() != k {
        return Err(DerivError::Shape(format!("frame must have {k} rows")));
    }
    let rank = frame.rank();
    if rank < p {
        return Err(DerivError::RankDeficient { rank, cols: p });
    }
    let cols = frame.columns();
    let coords = |v: &Vector, at: &dyn Fn() -> String| -> Result<Vector, DerivError> {
        frame.solve(v).ok_or_else(|| DerivError::NotInvariant {
            expr: d.render_section(v),
            at: at(),
        })
    };
    let n = d.dim();
    let tl = tangent_labels(&d.chart);
    let mut conn = Vec::with_capacity(n);
    for i in 0..n {
        let x = coord_field(n, i);
        let mut cs = Vec::with_capacity(p);
        for (j, c) in cols.iter().enumerate() {
            let img = d.apply(&x, c);
            cs.push(coords(&img, &|| {
                format!("D_{{{}}}({})", tl[i], labels.get(j).cloned().unwrap_or_default())
            })?);
        }
        conn.push(Matrix::from_cols(p, &cs));
    }
    let mut lcols = Vec::with_capacity(p);
    for (j, c) in cols.iter().enumerate() {
        let img = d.apply_l(c);
        lcols.push(coords(&img, &|| format!("l({})", labels.get(j).cloned().unwrap_or_default()))?);
    }
    if labels.len() != p {
        return Err(DerivError::Shape(format!("expected {p} labels")));
    }
    OneDerivation::new(d.chart.clone(), d.r.clone(), Matrix::from_cols(p, &lcols), conn, labels)
}
