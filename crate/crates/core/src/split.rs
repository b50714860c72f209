//! Lagrangian splittings, proto-bialgebroids and their doubles.

use cnalg_field::{BigInt, BigRational, Chart, RatFunc};
use thiserror::Error;

use crate::alt::{combinations, Alternating, MultiSection};
use crate::bundle::{canonical_pairing, BundleError, CourantData, Section};
use crate::cartan::{apply_vf, schouten_square, tangent_labels, Bivector, VectorField};
use crate::compat::{check_cn, check_im, LagrangianFrame};
use crate::deriv::{
    dual_apply_frames, gamma_l_defect, restrict_to_invariant, self_duality_entry, check_nijenhuis, DerivError,
    NijenhuisMode, OneDerivation,
};
use crate::linalg::{is_zero_vec, unit, vadd, vscale, vsub, zeros, Matrix, Vector};
use crate::report::{CheckReport, Entry, Status, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("bracket structure is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("frames are not transverse")]
    NotTransverse,
    #[error("frame {0} is not isotropic")]
    NotIsotropic(&'static str),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("splitting is not invariant: {0}")]
    NotInvariant(DerivError),
    #[error("derivation is not symmetric: {0} at {1}")]
    Asymmetric(String, String),
}

/// An anchored bundle with a skew bracket extended by [a, fb] = f[a,b] + ρ(a)(f) b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreLieAlgebroidData {
    chart: Chart,
    /// Column a is ρ(e_a).
    anchor: Matrix,
    /// `structure[a][b]` = [e_a, e_b].
    structure: Vec<Vec<Section>>,
    labels: Vec<String>,
}

impl PreLieAlgebroidData {
    pub fn new(chart: Chart, anchor: Matrix, structure: Vec<Vec<Section>>, labels: Vec<String>) -> Result<Self, SplitError> {
        let m = labels.len();
        if anchor.rows() != chart.dim() || anchor.cols() != m {
            return Err(SplitError::Shape(format!("anchor must be {}x{m}", chart.dim())));
        }
        if structure.len() != m || structure.iter().any(|r| r.len() != m || r.iter().any(|s| s.len() != m)) {
            return Err(SplitError::Shape(format!("structure must be {m}x{m}x{m}")));
        }
        for a in 0..m {
            for b in a..m {
                if !is_zero_vec(&vadd(&structure[a][b], &structure[b][a])) {
                    return Err(SplitError::NotAntisymmetric(a, b));
                }
            }
        }
        Ok(PreLieAlgebroidData {
            chart,
            anchor,
            structure,
            labels,
        })
    }

    /// TM with the coordinate frame.
    pub fn tangent(chart: &Chart) -> Self {
        let n = chart.dim();
        PreLieAlgebroidData {
            chart: chart.clone(),
            anchor: Matrix::identity(n),
            structure: vec![vec![zeros(n); n]; n],
            labels: tangent_labels(chart),
        }
    }

    /// Zero anchor and bracket.
    pub fn abelian(chart: &Chart, labels: Vec<String>) -> Self {
        let m = labels.len();
        PreLieAlgebroidData {
            chart: chart.clone(),
            anchor: Matrix::zeros(chart.dim(), m),
            structure: vec![vec![zeros(m); m]; m],
            labels,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
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

    pub fn anchor(&self, s: &[RatFunc]) -> VectorField {
        self.anchor.apply(s)
    }

    pub fn bracket(&self, s1: &[RatFunc], s2: &[RatFunc]) -> Section {
        let m = self.rank();
        let mut out = zeros(m);
        for a in 0..m {
            if s1[a].is_zero() {
                continue;
            }
            for b in 0..m {
                if s2[b].is_zero() || is_zero_vec(&self.structure[a][b]) {
                    continue;
                }
                out = vadd(&out, &vscale(&s1[a].mul(&s2[b]), &self.structure[a][b]));
            }
        }
        let x1 = self.anchor(s1);
        let x2 = self.anchor(s2);
        let d1: Vector = s2.iter().map(|g| apply_vf(&x1, g)).collect();
        let d2: Vector = s1.iter().map(|f| apply_vf(&x2, f)).collect();
        vsub(&vadd(&out, &d1), &d2)
    }

    pub fn render_section(&self, s: &[RatFunc]) -> String {
        crate::cartan::render_vector(s, &self.labels, &self.chart)
    }

    /// Jacobi identity on frame triples; decides whether this is a Lie algebroid.
    pub fn jacobi_entry(&self) -> Entry {
        let m = self.rank();
        for a in 0..m {
            for b in (a + 1)..m {
                for c in (b + 1)..m {
                    let (ea, eb, ec) = (unit(m, a), unit(m, b), unit(m, c));
                    let j = vadd(
                        &vadd(
                            &self.bracket(&ea, &self.bracket(&eb, &ec)),
                            &self.bracket(&eb, &self.bracket(&ec, &ea)),
                        ),
                        &self.bracket(&ec, &self.bracket(&ea, &eb)),
                    );
                    if !is_zero_vec(&j) {
                        return Entry::fail(
                            "jacobi",
                            Witness {
                                expr: self.render_section(&j),
                                at: format!("({}, {}, {})", self.labels[a], self.labels[b], self.labels[c]),
                            },
                        );
                    }
                }
            }
        }
        Entry::pass("jacobi")
    }
}

/// Koszul formula for d_A on frames:
/// d_Aμ(a₀,…,a_p) = Σ (−1)^i ρ(a_i) μ(…â_i…) + Σ_{i<j} (−1)^{i+j} μ([a_i,a_j], …â_i…â_j…).
pub fn prelie_differential(a: &PreLieAlgebroidData, mu: &MultiSection) -> MultiSection {
    let m = a.rank();
    let p = mu.degree();
    assert_eq!(mu.rank(), m, "form on a different bundle");
    Alternating::from_fn(m, p + 1, |idx| {
        let mut acc = RatFunc::zero();
        for i in 0..=p {
            let rho = a.anchor.col(idx[i]);
            let rest: Vec<usize> = idx.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            let t = apply_vf(&rho, &mu.get(&rest));
            acc = if i % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
        }
        for i in 0..=p {
            for j in (i + 1)..=p {
                let br = &a.structure[idx[i]][idx[j]];
                if is_zero_vec(br) {
                    continue;
                }
                let rest: Vec<Vector> = idx
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != i && q != j)
                    .map(|(_, &v)| unit(m, v))
                    .collect();
                let mut args = vec![br.clone()];
                args.extend(rest);
                let t = mu.eval(&args);
                acc = if (i + j) % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
        }
        acc
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtoBialgebroidData {
    pub a: PreLieAlgebroidData,
    /// Built on the dual frame of `a`.
    pub a_star: PreLieAlgebroidData,
    /// φ ∈ Γ(∧³A*).
    pub phi: MultiSection,
    /// χ ∈ Γ(∧³A).
    pub chi: MultiSection,
}

impl ProtoBialgebroidData {
    pub fn new(
        a: PreLieAlgebroidData,
        a_star: PreLieAlgebroidData,
        phi: MultiSection,
        chi: MultiSection,
    ) -> Result<Self, SplitError> {
        let m = a.rank();
        if a_star.rank() != m || a.dim() != a_star.dim() {
            return Err(SplitError::Shape("A and A* must have the same rank and chart".into()));
        }
        if phi.rank() != m || phi.degree() != 3 || chi.rank() != m || chi.degree() != 3 {
            return Err(SplitError::Shape(format!("φ and χ must be 3-forms of rank {m}")));
        }
        Ok(ProtoBialgebroidData { a, a_star, phi, chi })
    }

    /// Standard Manin triple (TM, T*M) with zero structure on T*M, twisted by `phi`.
    pub fn standard(chart: &Chart, phi: MultiSection) -> Result<Self, SplitError> {
        let n = chart.dim();
        Self::new(
            PreLieAlgebroidData::tangent(chart),
            PreLieAlgebroidData::abelian(chart, crate::cartan::cotangent_labels(chart)),
            phi,
            Alternating::zero(n, 3),
        )
    }
}

/// The double A ⊕ A* with pairing β(a) + α(b), anchor ρ + ρ_* and frame brackets
/// ⟦e_i,e_j⟧ = [e_i,e_j] + φ(e_i,e_j,·), ⟦e_i,ε^j⟧ = −i_{ε^j}d_{A*}e_i + 𝓛_{e_i}ε^j,
/// ⟦ε^i,e_j⟧ = 𝓛_{ε^i}e_j − i_{e_j}d_Aε^i, ⟦ε^i,ε^j⟧ = χ(ε^i,ε^j,·) + [ε^i,ε^j]_*.
pub fn make_double(proto: &ProtoBialgebroidData) -> Result<CourantData, SplitError> {
    let a = &proto.a;
    let s = &proto.a_star;
    let m = a.rank();
    let k = 2 * m;
    let mut structure = vec![vec![zeros(k); k]; k];
    for i in 0..m {
        for j in 0..m {
            let v = &mut structure[i][j];
            for l in 0..m {
                v[l] = a.structure[i][j][l].clone();
                if i != j && j != l && i != l {
                    v[m + l] = proto.phi.get(&[i, j, l]);
                }
            }
            let v = &mut structure[i][m + j];
            for b in 0..m {
                v[b] = s.structure[j][b][i].clone();
                v[m + b] = a.structure[i][b][j].neg();
            }
            let v = &mut structure[m + i][j];
            for b in 0..m {
                v[b] = s.structure[i][b][j].neg();
                v[m + b] = a.structure[j][b][i].clone();
            }
            let v = &mut structure[m + i][m + j];
            for l in 0..m {
                if i != j && j != l && i != l {
                    v[l] = proto.chi.get(&[i, j, l]);
                }
                v[m + l] = s.structure[i][j][l].clone();
            }
        }
    }
    let n = a.dim();
    let anchor = Matrix::from_fn(n, k, |r, c| {
        if c < m {
            a.anchor.get(r, c).clone()
        } else {
            s.anchor.get(r, c - m).clone()
        }
    });
    let mut labels = a.labels.clone();
    labels.extend(s.labels.iter().cloned());
    Ok(CourantData::new(a.chart.clone(), canonical_pairing(m), anchor, structure, labels)?)
}

/// Frame [A | B̃] of E with B̃ = B P⁻¹, P = AᵀGB, so that ⟨A_i, B̃_j⟩ = δ_ij.
pub fn split_frame(e: &CourantData, a: &LagrangianFrame, b: &LagrangianFrame) -> Result<Matrix, SplitError> {
    let g = e.pairing();
    let (am, bm) = (a.matrix(), b.matrix());
    if am.rows() != e.rank() || bm.rows() != e.rank() || am.cols() != bm.cols() || 2 * am.cols() != e.rank() {
        return Err(SplitError::Shape("frames must each span half of E".into()));
    }
    if !am.transpose().mul(g).mul(am).is_zero() {
        return Err(SplitError::NotIsotropic("A"));
    }
    if !bm.transpose().mul(g).mul(bm).is_zero() {
        return Err(SplitError::NotIsotropic("B"));
    }
    let p = am.transpose().mul(g).mul(bm);
    let pinv = p.inverse().ok_or(SplitError::NotTransverse)?;
    let bt = bm.mul(&pinv);
    let m = am.cols();
    let cols: Vec<Vector> = am.columns().into_iter().chain(bt.columns()).collect();
    let f = Matrix::from_cols(2 * m, &cols);
    Ok(f)
}

fn frame_labels(e: &CourantData, f: &Matrix, prefix: &str, range: std::ops::Range<usize>) -> Vec<String> {
    range
        .enumerate()
        .map(|(q, c)| {
            let col = f.col(c);
            let unit_at = (0..e.rank()).find(|&i| col == unit(e.rank(), i));
            match unit_at {
                Some(i) => e.labels()[i].clone(),
                None => format!("{prefix}{}", q + 1),
            }
        })
        .collect()
}

/// Projections of the Courant bracket onto A and A* ≅ B.
pub fn extract_proto(e: &CourantData, a: &LagrangianFrame, b: &LagrangianFrame) -> Result<ProtoBialgebroidData, SplitError> {
    let f = split_frame(e, a, b)?;
    let m = a.matrix().cols();
    let finv = f.inverse().ok_or(SplitError::NotTransverse)?;
    let cols = f.columns();
    let anchor = e.anchor_matrix().mul(&f);
    let br: Vec<Vec<Vector>> = (0..2 * m)
        .map(|i| (0..2 * m).map(|j| finv.apply(&e.bracket(&cols[i], &cols[j]))).collect())
        .collect();
    let n = e.dim();
    let a_labels = frame_labels(e, &f, "a", 0..m);
    let s_labels = frame_labels(e, &f, "b", m..2 * m);
    let a_alg = PreLieAlgebroidData::new(
        e.chart().clone(),
        anchor.submatrix(0..n, 0..m),
        (0..m).map(|i| (0..m).map(|j| br[i][j][..m].to_vec()).collect()).collect(),
        a_labels,
    )?;
    let s_alg = PreLieAlgebroidData::new(
        e.chart().clone(),
        anchor.submatrix(0..n, m..2 * m),
        (0..m).map(|i| (0..m).map(|j| br[m + i][m + j][m..].to_vec()).collect()).collect(),
        s_labels,
    )?;
    let phi = Alternating::from_fn(m, 3, |idx| br[idx[0]][idx[1]][m + idx[2]].clone());
    let chi = Alternating::from_fn(m, 3, |idx| br[m + idx[0]][m + idx[1]][idx[2]].clone());
    ProtoBialgebroidData::new(a_alg, s_alg, phi, chi)
}

/// Pushforward of a trivector on a bundle by a map to TM given by its matrix.
pub fn push_trivector(t: &MultiSection, map: &Matrix) -> Alternating {
    let n = map.rows();
    Alternating::from_fn(n, 3, |idx| {
        let mut acc = RatFunc::zero();
        for (abc, c) in t.iter() {
            // Σ over permutations of the stored increasing triple
            let rows: Vec<Vector> = (0..3).map(|q| abc.iter().map(|&a| map.get(idx[q], a).clone()).collect()).collect();
            let det = Matrix::from_rows(rows).det();
            if !det.is_zero() {
                acc = acc.add(&c.mul(&det));
            }
        }
        acc
    })
}

/// π♯ = ρ_*∘ρ* and the identity ½[π,π] − ρ(χ) − ρ_*(φ) = 0.
pub fn induced_bivector_identity(proto: &ProtoBialgebroidData) -> (Option<Bivector>, CheckReport) {
    let mut report = CheckReport::new("induced_bivector");
    let n = proto.a.dim();
    let rho = &proto.a.anchor;
    let rho_star = &proto.a_star.anchor;
    let sharp = rho_star.mul(&rho.transpose());
    let p = sharp.transpose();
    let chart = proto.a.chart();
    if !p.is_antisymmetric() {
        let sym = p.add(&p.transpose());
        let (i, j) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !sym.get(i, j).is_zero())
            .expect("nonzero symmetric part");
        report.push(Entry::fail(
            "antisymmetric",
            Witness {
                expr: chart.render(sym.get(i, j)),
                at: format!("π(dx{}, dx{}) + π(dx{}, dx{})", i + 1, j + 1, j + 1, i + 1),
            },
        ));
        report.push(Entry::skipped("schouten_identity"));
        return (None, report);
    }
    report.push(Entry::pass("antisymmetric"));
    let pi = Bivector::new(p, n).expect("antisymmetric square matrix");
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let lhs = Alternating::from_fn(n, 3, |idx| schouten_square(&pi).get(idx).scale(&half));
    let rhs = push_trivector(&proto.chi, rho).add(&push_trivector(&proto.phi, rho_star));
    let defect = lhs.sub(&rhs);
    let w = defect.iter().next().map(|(idx, c)| Witness {
        expr: chart.render(c),
        at: format!(
            "({})",
            idx.iter().map(|&i| tangent_labels(chart)[i].clone()).collect::<Vec<_>>().join(", ")
        ),
    });
    report.push(Entry::from_witness("schouten_identity", w));
    (Some(pi), report)
}

/// Agreement of Courant compatibility of 𝔻 with the split conditions on (A, A*).
pub fn check_manin(
    e: &CourantData,
    a: &LagrangianFrame,
    b: &LagrangianFrame,
    dd: &OneDerivation,
    seed: u64,
) -> Result<CheckReport, SplitError> {
    let sd = self_duality_entry(dd, e.pairing());
    if let Some(w) = sd.witness {
        return Err(SplitError::Asymmetric(w.expr, w.at));
    }
    let f = split_frame(e, a, b)?;
    let m = a.matrix().cols();
    let a_labels = frame_labels(e, &f, "a", 0..m);
    let s_labels = frame_labels(e, &f, "b", m..2 * m);
    restrict_to_invariant(dd, a.matrix(), a_labels.clone()).map_err(SplitError::NotInvariant)?;
    restrict_to_invariant(dd, &f.submatrix(0..e.rank(), m..2 * m), s_labels.clone()).map_err(SplitError::NotInvariant)?;
    let mut all_labels = a_labels.clone();
    all_labels.extend(s_labels.iter().cloned());
    let df = restrict_to_invariant(dd, &f, all_labels).map_err(SplitError::NotInvariant)?;
    let d = restrict_to_invariant(&df, &Matrix::from_cols(2 * m, &(0..m).map(|i| unit(2 * m, i)).collect::<Vec<_>>()), a_labels)
        .map_err(SplitError::NotInvariant)?;
    let d_star = d.dualize(&Matrix::identity(m)).expect("identity pairing").with_labels(s_labels.clone());
    let d_b = restrict_to_invariant(
        &df,
        &Matrix::from_cols(2 * m, &(m..2 * m).map(|i| unit(2 * m, i)).collect::<Vec<_>>()),
        s_labels,
    )
    .map_err(SplitError::NotInvariant)?;
    let proto = extract_proto(e, a, b)?;

    let mut report = CheckReport::new("manin").with_seed(seed);
    let left = check_cn(e, dd, seed);
    let im_a = check_im(&proto.a, &d, seed);
    let im_s = check_im(&proto.a_star, &d_star, seed);
    let n = e.dim();
    let phi_entries = dual_form_entries("phi", &d, &proto.phi, n);
    let chi_entries = dual_form_entries("chi", &d_star, &proto.chi, n);
    let right_ok = im_a.passed() && im_s.passed() && phi_entries.iter().chain(&chi_entries).all(|e| e.status != Status::Fail);

    report.absorb("left", &left, true);
    report.absorb("right.im_A", &im_a, true);
    report.absorb("right.im_A*", &im_s, true);
    for mut en in phi_entries.into_iter().chain(chi_entries) {
        en.id = format!("right.{}", en.id);
        report.push(en.informational());
    }
    report.push(Entry::from_bool(
        "restriction_to_A*_is_dual",
        d_b.difference(&d_star).is_none(),
        d_b.difference(&d_star).map(|w| w.expr).unwrap_or_default(),
        "A*",
    )
    .informational());
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    report.push(
        Entry::from_bool(
            "left = right",
            left.passed() == right_ok,
            format!("left {} but right {}", verdict(left.passed()), verdict(right_ok)),
            "verdicts",
        )
        .with_note(format!("left {}, right {}", verdict(left.passed()), verdict(right_ok))),
    );
    let nij_dd = check_nijenhuis(dd, NijenhuisMode::Nijenhuis, seed).passed();
    let nij_d = check_nijenhuis(&d, NijenhuisMode::Nijenhuis, seed).passed();
    report.push(
        Entry::from_bool(
            "nijenhuis(𝔻) = nijenhuis(𝒟)",
            nij_dd == nij_d,
            format!("𝔻 {} but 𝒟 {}", verdict(nij_dd), verdict(nij_d)),
            "verdicts",
        )
        .with_note(format!("nijenhuis {}", verdict(nij_dd))),
    );
    Ok(report)
}

/// μ ∈ Γ_l and D*_X μ = 0 for coordinate X (D* is tensorial in X).
fn dual_form_entries(name: &str, d: &OneDerivation, mu: &MultiSection, n: usize) -> Vec<Entry> {
    let mut out = Vec::new();
    let id_l = format!("{name} in Γ_l");
    match gamma_l_defect(d, mu) {
        Some(idx) => {
            let a = d.labels()[idx[0]].clone();
            let b = d.labels()[idx[1]].clone();
            let rest: Vec<String> = idx[2..].iter().map(|&i| d.labels()[i].clone()).collect();
            let lhs = crate::deriv::mu_l_at(d, mu, &idx);
            let mut sw = idx.clone();
            sw.swap(0, 1);
            let rhs = crate::deriv::mu_l_at(d, mu, &sw);
            out.push(Entry::fail(
                id_l,
                Witness {
                    expr: d.chart().render(&lhs.add(&rhs)),
                    at: format!("{name}(l{a}, {b}, {}) - {name}({a}, l{b}, …)", rest.join(", ")),
                },
            ));
            out.push(Entry::skipped(format!("D*{name} = 0")));
        }
        None => {
            out.push(Entry::pass(id_l));
            let tl = tangent_labels(d.chart());
            let w = (0..n).find_map(|i| {
                let v = dual_apply_frames(d, &unit(n, i), mu);
                let w = v.iter().next().map(|(idx, c)| Witness {
                    expr: d.chart().render(c),
                    at: format!(
                        "D*_{{{}}}{name}({})",
                        tl[i],
                        idx.iter().map(|&q| d.labels()[q].clone()).collect::<Vec<_>>().join(", ")
                    ),
                });
                w
            });
            out.push(Entry::from_witness(format!("D*{name} = 0"), w));
        }
    }
    out
}

/// Components of φ or χ on increasing triples, as used in scenario output.
pub fn trivector_components(t: &MultiSection) -> Vec<(Vec<usize>, RatFunc)> {
    combinations(t.rank(), 3).into_iter().map(|i| { let v = t.get(&i); (i, v) }).filter(|(_, v)| !v.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{make_standard_tm, make_twisted_tm};
    use crate::cartan::{exterior_d, form_from_entries, EndoTM};
    use crate::deriv::{make_lift, LiftKind};
    use crate::sample::DEFAULT_SEED;

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names).unwrap()
    }

    fn lift(c: &Chart, rows: &[&[&str]]) -> OneDerivation {
        let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| c.parse(s).unwrap()).collect()).collect());
        make_lift(c, &EndoTM(m), LiftKind::Generalized).unwrap()
    }

    fn volume(c: &Chart) -> MultiSection {
        form_from_entries(3, 3, &[(vec![0, 1, 2], c.parse("1").unwrap())])
    }

    #[test]
    fn standard_split_is_manin_triple() {
        let c = chart(&["x", "y"]);
        let e = make_standard_tm(&c);
        let p = extract_proto(&e, &LagrangianFrame::tangent(2), &LagrangianFrame::cotangent(2)).unwrap();
        assert_eq!(p, ProtoBialgebroidData::standard(&c, Alternating::zero(2, 3)).unwrap());
        assert_eq!(make_double(&p).unwrap(), e);
    }

    #[test]
    fn twisted_split_projects_h() {
        let c = chart(&["x", "y", "z"]);
        let h = volume(&c).scale(&c.parse("x").unwrap());
        let e = make_twisted_tm(&c, &h).unwrap();
        let p = extract_proto(&e, &LagrangianFrame::tangent(3), &LagrangianFrame::cotangent(3)).unwrap();
        assert_eq!(p.phi, h);
        assert!(p.chi.is_zero());
        assert_eq!(make_double(&p).unwrap(), e);
        let (pi, rep) = induced_bivector_identity(&p);
        assert!(rep.passed());
        assert!(pi.unwrap().matrix().is_zero());
    }

    #[test]
    fn koszul_differential_on_tangent() {
        let c = chart(&["x", "y"]);
        let a = PreLieAlgebroidData::tangent(&c);
        let w = Alternating::from_vector(&[RatFunc::zero(), c.parse("x").unwrap()]);
        let dw = prelie_differential(&a, &w);
        assert_eq!(dw, exterior_d(&w));
        assert_eq!(dw.get(&[0, 1]), RatFunc::one());
        let z = PreLieAlgebroidData::abelian(&c, vec!["e1".into(), "e2".into()]);
        assert!(prelie_differential(&z, &w).is_zero());
        let f = Alternating::scalar(2, c.parse("x*y").unwrap());
        assert_eq!(prelie_differential(&a, &f), Alternating::from_vector(&[c.parse("y").unwrap(), c.parse("x").unwrap()]));
        assert!(a.jacobi_entry().passed());
    }

    /// A = TM, A* = T*M with ρ_* = π♯ and the Koszul bracket [dx_i, dx_j]_π = d π_ij for constant π.
    #[test]
    fn constant_poisson_bialgebroid() {
        let c = chart(&["x", "y"]);
        let p = Matrix::from_rows(vec![vec![RatFunc::zero(), RatFunc::from_int(2)], vec![RatFunc::from_int(-2), RatFunc::zero()]]);
        let pi = Bivector::new(p.clone(), 2).unwrap();
        let a_star = PreLieAlgebroidData::new(
            c.clone(),
            pi.sharp_matrix(),
            vec![vec![zeros(2); 2]; 2],
            crate::cartan::cotangent_labels(&c),
        )
        .unwrap();
        let proto =
            ProtoBialgebroidData::new(PreLieAlgebroidData::tangent(&c), a_star, Alternating::zero(2, 3), Alternating::zero(2, 3)).unwrap();
        let (got, rep) = induced_bivector_identity(&proto);
        assert!(rep.passed(), "{}", rep.render_text());
        assert_eq!(got.unwrap(), pi);
    }

    #[test]
    fn manin_on_standard_lifts() {
        let c = chart(&["x", "y"]);
        let e = make_standard_tm(&c);
        for r in [&[&["0", "-1"][..], &["1", "0"]][..], &[&["y", "0"], &["0", "0"]]] {
            let rep = check_manin(&e, &LagrangianFrame::tangent(2), &LagrangianFrame::cotangent(2), &lift(&c, r), DEFAULT_SEED).unwrap();
            assert!(rep.passed(), "{}", rep.render_text());
            assert!(rep.entry("left.CN4").unwrap().passed());
        }
    }

    #[test]
    fn manin_twisted_agreement() {
        let c = chart(&["x", "y", "z"]);
        let e = make_twisted_tm(&c, &volume(&c)).unwrap();
        let (a, b) = (LagrangianFrame::tangent(3), LagrangianFrame::cotangent(3));
        let id = lift(&c, &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]]);
        let rep = check_manin(&e, &a, &b, &id, DEFAULT_SEED).unwrap();
        assert!(rep.passed(), "{}", rep.render_text());
        let diag = lift(&c, &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "0"]]);
        let rep = check_manin(&e, &a, &b, &diag, DEFAULT_SEED).unwrap();
        assert!(rep.passed(), "{}", rep.render_text());
        assert_eq!(rep.entry("left = right").unwrap().note.as_deref(), Some("left fail, right fail"));
        assert!(!rep.entry("right.phi in Γ_l").unwrap().passed());
    }

    #[test]
    fn manin_refuses_non_invariant_split() {
        let c = chart(&["x", "y"]);
        let e = make_standard_tm(&c);
        let g = crate::cartan::SymBilinear::new(Matrix::identity(2), 2).unwrap();
        let d = crate::deriv::make_metric_derivation(&c, None, &g).unwrap();
        let res = check_manin(&e, &LagrangianFrame::tangent(2), &LagrangianFrame::cotangent(2), &d, DEFAULT_SEED);
        assert!(matches!(res, Err(SplitError::NotInvariant(_))));
    }

    #[test]
    fn non_poisson_graph_split() {
        let c = chart(&["x", "y", "z"]);
        let e = make_standard_tm(&c);
        let p = Matrix::from_rows(
            ["0 1 0", "-1 0 y", "0 -y 0"]
                .iter()
                .map(|r| r.split(' ').map(|s| c.parse(s).unwrap()).collect())
                .collect(),
        );
        let pi = Bivector::new(p, 3).unwrap();
        assert!(!schouten_square(&pi).is_zero());
        let proto = extract_proto(&e, &LagrangianFrame::tangent(3), &LagrangianFrame::graph_bivector(&pi)).unwrap();
        assert!(proto.phi.is_zero());
        assert!(!proto.chi.is_zero());
        let (got, rep) = induced_bivector_identity(&proto);
        assert!(rep.passed(), "{}", rep.render_text());
        assert_eq!(got.unwrap(), pi);
    }
}
