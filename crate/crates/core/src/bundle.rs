//! Trivialized pseudo-euclidean anchored bundles with a bracket on the frame.

use cnalg_field::{Chart, RatFunc};
use thiserror::Error;

use crate::alt::KForm;
use crate::cartan::{apply_vf, cotangent_labels, exterior_d, gradient, lie_bracket, render_vector, tangent_labels};
use crate::linalg::{is_zero_vec, unit, vadd, vdot, vscale, vsub, zeros, Matrix, Vector};
use crate::report::{CheckReport, Entry, Witness};
use crate::sample::{Sampler, SAMPLES};

/// Components in the fixed frame e₁…e_k.
pub type Section = Vector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("pairing must be a symmetric {0}x{0} matrix")]
    PairingShape(usize),
    #[error("pairing is not symmetric")]
    PairingNotSymmetric,
    #[error("pairing is degenerate")]
    DegeneratePairing,
    #[error("anchor must be a {rows}x{cols} matrix")]
    AnchorShape { rows: usize, cols: usize },
    #[error("structure functions must form a {0}x{0} array of rank-{0} sections")]
    StructureShape(usize),
    #[error("expected {expected} frame labels, got {got}")]
    Labels { expected: usize, got: usize },
    #[error("twisting form must have degree 3, got {0}")]
    TwistDegree(usize),
    #[error("twisting form is not closed: dH = {0}")]
    TwistNotClosed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CourantData {
    chart: Chart,
    pairing: Matrix,
    pairing_inv: Matrix,
    /// Column a is 𝔞(e_a).
    anchor: Matrix,
    /// `structure[a][b]` = ⟦e_a, e_b⟧.
    structure: Vec<Vec<Section>>,
    labels: Vec<String>,
}

impl CourantData {
    pub fn new(
        chart: Chart,
        pairing: Matrix,
        anchor: Matrix,
        structure: Vec<Vec<Section>>,
        labels: Vec<String>,
    ) -> Result<Self, BundleError> {
        let k = pairing.rows();
        let n = chart.dim();
        if !pairing.is_square() {
            return Err(BundleError::PairingShape(k));
        }
        if !pairing.is_symmetric() {
            return Err(BundleError::PairingNotSymmetric);
        }
        let pairing_inv = pairing.inverse().ok_or(BundleError::DegeneratePairing)?;
        if anchor.rows() != n || anchor.cols() != k {
            return Err(BundleError::AnchorShape { rows: n, cols: k });
        }
        if structure.len() != k || structure.iter().any(|r| r.len() != k || r.iter().any(|s| s.len() != k)) {
            return Err(BundleError::StructureShape(k));
        }
        if labels.len() != k {
            return Err(BundleError::Labels {
                expected: k,
                got: labels.len(),
            });
        }
        Ok(CourantData {
            chart,
            pairing,
            pairing_inv,
            anchor,
            structure,
            labels,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.pairing.rows()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn pairing(&self) -> &Matrix {
        &self.pairing
    }

    pub fn pairing_inverse(&self) -> &Matrix {
        &self.pairing_inv
    }

    pub fn anchor_matrix(&self) -> &Matrix {
        &self.anchor
    }

    pub fn structure(&self, a: usize, b: usize) -> &Section {
        &self.structure[a][b]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn frame(&self, a: usize) -> Section {
        unit(self.rank(), a)
    }

    pub fn pair(&self, s1: &[RatFunc], s2: &[RatFunc]) -> RatFunc {
        vdot(s1, &self.pairing.apply(s2))
    }

    pub fn anchor(&self, s: &[RatFunc]) -> Vector {
        self.anchor.apply(s)
    }

    /// 𝔞*(α) = G⁻¹𝔞ᵀα.
    pub fn anchor_dual(&self, alpha: &[RatFunc]) -> Section {
        self.pairing_inv.apply(&self.anchor.transpose().apply(alpha))
    }

    /// ⟦σ₁,σ₂⟧ for σ₁ = Σ f_a e_a, σ₂ = Σ g_b e_b:
    /// Σ f_a g_b ⟦e_a,e_b⟧ + Σ 𝔞(σ₁)(g_b) e_b − Σ 𝔞(σ₂)(f_a) e_a + Σ ⟨e_a,σ₂⟩ 𝔞*(df_a).
    pub fn bracket(&self, s1: &[RatFunc], s2: &[RatFunc]) -> Section {
        let k = self.rank();
        let n = self.dim();
        assert!(s1.len() == k && s2.len() == k, "section of the wrong rank");
        let mut out = zeros(k);
        for a in 0..k {
            if s1[a].is_zero() {
                continue;
            }
            for b in 0..k {
                if s2[b].is_zero() {
                    continue;
                }
                let c = &self.structure[a][b];
                if is_zero_vec(c) {
                    continue;
                }
                out = vadd(&out, &vscale(&s1[a].mul(&s2[b]), c));
            }
        }
        let x1 = self.anchor(s1);
        let x2 = self.anchor(s2);
        let d1: Vector = s2.iter().map(|g| apply_vf(&x1, g)).collect();
        let d2: Vector = s1.iter().map(|f| apply_vf(&x2, f)).collect();
        out = vsub(&vadd(&out, &d1), &d2);
        let gs2 = self.pairing.apply(s2);
        let mut df = zeros(n);
        for a in 0..k {
            if s1[a].is_constant() || gs2[a].is_zero() {
                continue;
            }
            df = vadd(&df, &vscale(&gs2[a], &gradient(n, &s1[a])));
        }
        if !is_zero_vec(&df) {
            out = vadd(&out, &self.anchor_dual(&df));
        }
        out
    }

    pub fn render_section(&self, s: &[RatFunc]) -> String {
        render_vector(s, &self.labels, &self.chart)
    }

    pub fn render_vf(&self, x: &[RatFunc]) -> String {
        render_vector(x, &tangent_labels(&self.chart), &self.chart)
    }

    /// Witness for a section that should vanish.
    pub fn section_witness(&self, s: &[RatFunc], at: impl FnOnce() -> String) -> Option<Witness> {
        if is_zero_vec(s) {
            None
        } else {
            Some(Witness {
                expr: self.render_section(s),
                at: at(),
            })
        }
    }

    pub fn scalar_witness(&self, f: &RatFunc, at: impl FnOnce() -> String) -> Option<Witness> {
        if f.is_zero() {
            None
        } else {
            Some(Witness {
                expr: self.chart.render(f),
                at: at(),
            })
        }
    }

    pub fn vf_witness(&self, x: &[RatFunc], at: impl FnOnce() -> String) -> Option<Witness> {
        if is_zero_vec(x) {
            None
        } else {
            Some(Witness {
                expr: self.render_vf(x),
                at: at(),
            })
        }
    }

    /// Frame sections followed by `SAMPLES` random polynomial sections.
    pub fn probe_sections(&self, sampler: &mut Sampler) -> Vec<(String, Section)> {
        let mut out: Vec<(String, Section)> =
            (0..self.rank()).map(|a| (self.labels[a].clone(), self.frame(a))).collect();
        for s in 0..SAMPLES {
            let v = sampler.vector(self.rank());
            out.push((format!("sample{} = ({})", s + 1, self.render_list(&v)), v));
        }
        out
    }

    fn render_list(&self, v: &[RatFunc]) -> String {
        v.iter().map(|f| self.chart.render(f)).collect::<Vec<_>>().join(", ")
    }
}

/// The split pairing [[0, I],[I, 0]] of rank 2n.
pub fn canonical_pairing(n: usize) -> Matrix {
    Matrix::block(
        &Matrix::zeros(n, n),
        &Matrix::identity(n),
        &Matrix::identity(n),
        &Matrix::zeros(n, n),
    )
}

pub fn generalized_labels(chart: &Chart) -> Vec<String> {
    let mut l = tangent_labels(chart);
    l.extend(cotangent_labels(chart));
    l
}

/// TM ⊕ T*M with the H-twisted bracket on the frame (∂₁…∂ₙ, dx₁…dxₙ):
/// the only nonzero frame brackets are ⟦∂_i,∂_j⟧ = Σ_m H_ijm dx_m.
pub fn make_twisted_tm(chart: &Chart, h: &KForm) -> Result<CourantData, BundleError> {
    let n = chart.dim();
    if h.degree() != 3 || h.rank() != n {
        return Err(BundleError::TwistDegree(h.degree()));
    }
    let dh = exterior_d(h);
    if !dh.is_zero() {
        return Err(BundleError::TwistNotClosed(dh.render(&cotangent_labels(chart), chart.names())));
    }
    let k = 2 * n;
    let mut structure = vec![vec![zeros(k); k]; k];
    for i in 0..n {
        for j in 0..n {
            for m in 0..n {
                if i != j && j != m && i != m {
                    structure[i][j][n + m] = h.get(&[i, j, m]);
                }
            }
        }
    }
    let anchor = Matrix::from_fn(n, k, |i, a| if a == i { RatFunc::one() } else { RatFunc::zero() });
    CourantData::new(chart.clone(), canonical_pairing(n), anchor, structure, generalized_labels(chart))
}

pub fn make_standard_tm(chart: &Chart) -> CourantData {
    let n = chart.dim();
    make_twisted_tm(chart, &KForm::zero(n, 3)).expect("zero twist is closed")
}

/// Quadratic Lie algebra over the chart: zero anchor, constant pairing and
/// structure constants `c[a][b]` = [e_a, e_b].
pub fn make_quadratic_lie(
    chart: &Chart,
    pairing: Matrix,
    structure: Vec<Vec<Section>>,
    labels: Vec<String>,
) -> Result<CourantData, BundleError> {
    let k = pairing.rows();
    CourantData::new(chart.clone(), pairing, Matrix::zeros(chart.dim(), k), structure, labels)
}

/// 𝔰𝔩₂ with basis (h, e, f), [h,e] = 2e, [h,f] = −2f, [e,f] = h and the
/// trace form ⟨h,h⟩ = 2, ⟨e,f⟩ = 1.
pub fn make_sl2(chart: &Chart) -> CourantData {
    let i = RatFunc::from_int;
    let mut c = vec![vec![zeros(3); 3]; 3];
    c[0][1][1] = i(2);
    c[1][0][1] = i(-2);
    c[0][2][2] = i(-2);
    c[2][0][2] = i(2);
    c[1][2][0] = i(1);
    c[2][1][0] = i(-1);
    let g = Matrix::from_rows(vec![
        vec![i(2), i(0), i(0)],
        vec![i(0), i(0), i(1)],
        vec![i(0), i(1), i(0)],
    ]);
    make_quadratic_lie(chart, g, c, vec!["h".into(), "e".into(), "f".into()]).expect("sl2 data is well formed")
}

pub fn check_courant_axioms(e: &CourantData, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("courant_axioms").with_seed(seed);
    let mut sampler = Sampler::new(seed, e.dim());
    let probes = e.probe_sections(&mut sampler);
    let fs: Vec<RatFunc> = (0..SAMPLES).map(|_| sampler.poly()).collect();

    // C1: ⟦σ1,⟦σ2,σ3⟧⟧ − ⟦⟦σ1,σ2⟧,σ3⟧ − ⟦σ2,⟦σ1,σ3⟧⟧
    let c1 = || {
        for (n1, s1) in &probes {
            for (n2, s2) in &probes {
                let b12 = e.bracket(s1, s2);
                for (n3, s3) in &probes {
                    let lhs = e.bracket(s1, &e.bracket(s2, s3));
                    let rhs = vadd(&e.bracket(&b12, s3), &e.bracket(s2, &e.bracket(s1, s3)));
                    if let Some(w) = e.section_witness(&vsub(&lhs, &rhs), || format!("σ1={n1}, σ2={n2}, σ3={n3}")) {
                        return Some(w);
                    }
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("C1", c1()));

    // C2: 𝔞⟦σ1,σ2⟧ − [𝔞σ1, 𝔞σ2]
    let c2 = || {
        for (n1, s1) in &probes {
            for (n2, s2) in &probes {
                let v = vsub(&e.anchor(&e.bracket(s1, s2)), &lie_bracket(&e.anchor(s1), &e.anchor(s2)));
                if let Some(w) = e.vf_witness(&v, || format!("σ1={n1}, σ2={n2}")) {
                    return Some(w);
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("C2", c2()));

    // C3: ⟦σ1,fσ2⟧ − f⟦σ1,σ2⟧ − 𝔞(σ1)(f)σ2
    let c3 = || {
        for (n1, s1) in &probes {
            for (n2, s2) in &probes {
                let b = e.bracket(s1, s2);
                for f in &fs {
                    let lhs = e.bracket(s1, &vscale(f, s2));
                    let rhs = vadd(&vscale(f, &b), &vscale(&apply_vf(&e.anchor(s1), f), s2));
                    let at = || format!("σ1={n1}, σ2={n2}, f={}", e.chart().render(f));
                    if let Some(w) = e.section_witness(&vsub(&lhs, &rhs), at) {
                        return Some(w);
                    }
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("C3", c3()));

    // C4: ⟦σ1,σ2⟧ + ⟦σ2,σ1⟧ − 𝔞*d⟨σ1,σ2⟩
    let c4 = || {
        for (n1, s1) in &probes {
            for (n2, s2) in &probes {
                let sym = vadd(&e.bracket(s1, s2), &e.bracket(s2, s1));
                let d = e.anchor_dual(&gradient(e.dim(), &e.pair(s1, s2)));
                if let Some(w) = e.section_witness(&vsub(&sym, &d), || format!("σ1={n1}, σ2={n2}")) {
                    return Some(w);
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("C4", c4()));

    // C5: 𝔞(σ1)⟨σ2,σ3⟩ − ⟨⟦σ1,σ2⟧,σ3⟩ − ⟨σ2,⟦σ1,σ3⟧⟩
    let c5 = || {
        for (n1, s1) in &probes {
            let x = e.anchor(s1);
            for (n2, s2) in &probes {
                let b12 = e.bracket(s1, s2);
                for (n3, s3) in &probes {
                    let v = apply_vf(&x, &e.pair(s2, s3))
                        .sub(&e.pair(&b12, s3))
                        .sub(&e.pair(s2, &e.bracket(s1, s3)));
                    if let Some(w) = e.scalar_witness(&v, || format!("σ1={n1}, σ2={n2}, σ3={n3}")) {
                        return Some(w);
                    }
                }
            }
        }
        None
    };
    report.push(Entry::from_witness("C5", c5()));
    report
}

/// 𝔞∘𝔞* as an n×n matrix.
pub fn anchor_anchor_dual(e: &CourantData) -> Matrix {
    e.anchor_matrix().mul(e.pairing_inverse()).mul(&e.anchor_matrix().transpose())
}
