//! Tensor calculus on a coordinate chart.
//!
//! Conventions used throughout the crate:
//! - an endomorphism `r` of TM is stored with `r[j][i]` = component j of r(∂_i);
//! - r*(α)_i = Σ_j α_j r_ji and g♭(X)_j = Σ_i X^i g_ij;
//! - a bivector is stored as P_ij = π(dx_i, dx_j) and π♯(α)^j = Σ_i α_i P_ij,
//!   so that π♯(α)(β) = π(α, β).

use cnalg_field::{Chart, RatFunc};
use thiserror::Error;

use crate::alt::{combinations, Alternating, KForm};
use crate::linalg::{is_zero_vec, vadd, vscale, vsub, zeros, Matrix, Vector};

/// Components X^i in the coordinate frame.
pub type VectorField = Vector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("interior product with a 0-form")]
    DegreeZero,
    #[error("degenerate metric: det(g) vanishes identically")]
    DegenerateMetric,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
}

fn check_square(m: &Matrix, n: usize) -> Result<(), CartanError> {
    if m.rows() != n || m.cols() != n {
        return Err(CartanError::Shape {
            expected: n,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

/// Coordinate vector field ∂_i.
pub fn coord_field(n: usize, i: usize) -> VectorField {
    crate::linalg::unit(n, i)
}

/// X(f) = Σ X^i ∂_i f.
pub fn apply_vf(x: &[RatFunc], f: &RatFunc) -> RatFunc {
    let mut acc = RatFunc::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let d = f.partial(i);
        if !d.is_zero() {
            acc = acc.add(&xi.mul(&d));
        }
    }
    acc
}

/// Components of df.
pub fn gradient(n: usize, f: &RatFunc) -> Vector {
    (0..n).map(|i| f.partial(i)).collect()
}

/// [X,Y]^i = Σ_j X^j ∂_j Y^i − Y^j ∂_j X^i.
pub fn lie_bracket(x: &[RatFunc], y: &[RatFunc]) -> VectorField {
    assert_eq!(x.len(), y.len(), "vector fields on different charts");
    (0..x.len())
        .map(|i| apply_vf(x, &y[i]).sub(&apply_vf(y, &x[i])))
        .collect()
}

pub fn exterior_d(w: &KForm) -> KForm {
    let n = w.rank();
    let k = w.degree();
    Alternating::from_fn(n, k + 1, |idx| {
        let mut acc = RatFunc::zero();
        for j in 0..=k {
            let mut rest = idx.to_vec();
            let i = rest.remove(j);
            let d = w.get(&rest).partial(i);
            if d.is_zero() {
                continue;
            }
            acc = if j % 2 == 0 { acc.add(&d) } else { acc.sub(&d) };
        }
        acc
    })
}

pub fn interior_product(x: &[RatFunc], w: &KForm) -> Result<KForm, CartanError> {
    if w.degree() == 0 {
        return Err(CartanError::DegreeZero);
    }
    Ok(w.contract(x))
}

/// 𝓛_X ω = i_X dω + d i_X ω.
pub fn lie_derivative(x: &[RatFunc], w: &KForm) -> KForm {
    let a = exterior_d(w).contract(x);
    if w.degree() == 0 {
        return a;
    }
    a.add(&exterior_d(&w.contract(x)))
}

/// 𝓛_X ω from components: X(ω_I) + Σ_p Σ_j ∂_{i_p}X^j ω_{I[p→j]}.
pub fn lie_derivative_components(x: &[RatFunc], w: &KForm) -> KForm {
    let n = w.rank();
    Alternating::from_fn(n, w.degree(), |idx| {
        let mut acc = apply_vf(x, &w.get(idx));
        for p in 0..idx.len() {
            for (j, xj) in x.iter().enumerate() {
                let d = xj.partial(idx[p]);
                if d.is_zero() {
                    continue;
                }
                let mut moved = idx.to_vec();
                moved[p] = j;
                let c = w.get(&moved);
                if !c.is_zero() {
                    acc = acc.add(&d.mul(&c));
                }
            }
        }
        acc
    })
}

/// A (1,1)-tensor r: TM → TM.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EndoTM(pub Matrix);

impl EndoTM {
    pub fn new(m: Matrix, n: usize) -> Result<Self, CartanError> {
        check_square(&m, n)?;
        Ok(EndoTM(m))
    }

    pub fn identity(n: usize) -> Self {
        EndoTM(Matrix::identity(n))
    }

    pub fn zero(n: usize) -> Self {
        EndoTM(Matrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn apply(&self, x: &[RatFunc]) -> VectorField {
        self.0.apply(x)
    }

    /// r*(α)_i = Σ_j α_j r_ji.
    pub fn apply_dual(&self, a: &[RatFunc]) -> Vector {
        self.0.transpose().apply(a)
    }

    pub fn compose(&self, other: &EndoTM) -> EndoTM {
        EndoTM(self.0.mul(&other.0))
    }
}

/// [X,Y]_T = [TX,Y] + [X,TY] − T[X,Y].
pub fn deformed_bracket(t: &EndoTM, x: &[RatFunc], y: &[RatFunc]) -> VectorField {
    let a = lie_bracket(&t.apply(x), y);
    let b = lie_bracket(x, &t.apply(y));
    let c = t.apply(&lie_bracket(x, y));
    vsub(&vadd(&a, &b), &c)
}

/// 𝒩_T(X,Y) = [TX,TY] − T[X,Y]_T.
pub fn nijenhuis_torsion(t: &EndoTM, x: &[RatFunc], y: &[RatFunc]) -> VectorField {
    let a = lie_bracket(&t.apply(x), &t.apply(y));
    vsub(&a, &t.apply(&deformed_bracket(t, x, y)))
}

/// (𝓛_Y r)(X) = [Y, rX] − r[Y,X].
pub fn lie_derivative_endo(y: &[RatFunc], r: &EndoTM, x: &[RatFunc]) -> VectorField {
    vsub(&lie_bracket(y, &r.apply(x)), &r.apply(&lie_bracket(y, x)))
}

/// A symmetric bilinear form g on TM.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymBilinear(Matrix);

impl SymBilinear {
    pub fn new(m: Matrix, n: usize) -> Result<Self, CartanError> {
        check_square(&m, n)?;
        if !m.is_symmetric() {
            return Err(CartanError::NotSymmetric);
        }
        Ok(SymBilinear(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn eval(&self, x: &[RatFunc], y: &[RatFunc]) -> RatFunc {
        crate::linalg::vdot(x, &self.0.apply(y))
    }

    /// g♭(X)_j = Σ_i X^i g_ij.
    pub fn flat(&self, x: &[RatFunc]) -> Vector {
        self.0.transpose().apply(x)
    }
}

/// An antisymmetric bivector π.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bivector(Matrix);

impl Bivector {
    pub fn new(m: Matrix, n: usize) -> Result<Self, CartanError> {
        check_square(&m, n)?;
        if !m.is_antisymmetric() {
            return Err(CartanError::NotAntisymmetric);
        }
        Ok(Bivector(m))
    }

    pub fn zero(n: usize) -> Self {
        Bivector(Matrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// Matrix of π♯ acting on covector components.
    pub fn sharp_matrix(&self) -> Matrix {
        self.0.transpose()
    }

    pub fn sharp(&self, a: &[RatFunc]) -> VectorField {
        self.sharp_matrix().apply(a)
    }

    pub fn eval(&self, a: &[RatFunc], b: &[RatFunc]) -> RatFunc {
        crate::linalg::vdot(a, &self.0.apply(b))
    }

    /// The bivector as an alternating 2-tensor on T*M.
    pub fn to_alternating(&self) -> Alternating {
        Alternating::from_fn(self.dim(), 2, |idx| self.0.get(idx[0], idx[1]).clone())
    }
}

/// [π,π]^{ijk} = 2 Σ_l (π^{il}∂_l π^{jk} + π^{jl}∂_l π^{ki} + π^{kl}∂_l π^{ij}),
/// i.e. twice the Jacobiator of {f,g} = π(df,dg) on coordinate functions.
pub fn schouten_square(pi: &Bivector) -> Alternating {
    let n = pi.dim();
    let p = |i: usize, j: usize| pi.0.get(i, j).clone();
    Alternating::from_fn(n, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let mut acc = RatFunc::zero();
        for l in 0..n {
            for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                let pal = p(a, l);
                if pal.is_zero() {
                    continue;
                }
                acc = acc.add(&pal.mul(&p(b, c).partial(l)));
            }
        }
        acc.scale(&cnalg_field::BigRational::from_integer(2.into()))
    })
}

/// Christoffel symbols Γ^k_{ij}, stored as `gamma[k][i][j]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Christoffel {
    gamma: Vec<Vec<Vec<RatFunc>>>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &RatFunc {
        &self.gamma[k][i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|k| (0..n).all(|i| (0..n).all(|j| self.gamma[k][i][j] == self.gamma[k][j][i])))
    }

    /// ∇_X Y.
    pub fn covariant(&self, x: &[RatFunc], y: &[RatFunc]) -> VectorField {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut acc = apply_vf(x, &y[k]);
                for i in 0..n {
                    if x[i].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let g = &self.gamma[k][i][j];
                        if g.is_zero() || y[j].is_zero() {
                            continue;
                        }
                        acc = acc.add(&x[i].mul(&y[j]).mul(g));
                    }
                }
                acc
            })
            .collect()
    }

    /// R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z.
    pub fn curvature(&self, x: &[RatFunc], y: &[RatFunc], z: &[RatFunc]) -> VectorField {
        let a = self.covariant(x, &self.covariant(y, z));
        let b = self.covariant(y, &self.covariant(x, z));
        let c = self.covariant(&lie_bracket(x, y), z);
        vsub(&vsub(&a, &b), &c)
    }
}

/// Γ^k_{ij} = ½ Σ_l g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}).
pub fn levi_civita(g: &SymBilinear) -> Result<Christoffel, CartanError> {
    let n = g.dim();
    let ginv = g.0.inverse().ok_or(CartanError::DegenerateMetric)?;
    let half = RatFunc::ratio(1, 2);
    // first kind: [ij,l] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let mut first = vec![vec![zeros(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let v = g.0.get(j, l).partial(i).add(&g.0.get(i, l).partial(j)).sub(&g.0.get(i, j).partial(l));
                first[i][j][l] = half.mul(&v);
            }
        }
    }
    let mut gamma = vec![vec![zeros(n); n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = RatFunc::zero();
                for (l, fl) in first[i][j].iter().enumerate() {
                    if fl.is_zero() {
                        continue;
                    }
                    acc = acc.add(&ginv.get(k, l).mul(fl));
                }
                gamma[k][i][j] = acc;
            }
        }
    }
    Ok(Christoffel { gamma })
}

/// ∂_k g_ij − Σ_l (Γ^l_{ki} g_lj + Γ^l_{kj} g_il), which vanishes for a metric connection.
pub fn metricity_defect(g: &SymBilinear, gamma: &Christoffel, k: usize, i: usize, j: usize) -> RatFunc {
    let n = g.dim();
    let m = &g.0;
    let mut acc = m.get(i, j).partial(k);
    for l in 0..n {
        acc = acc
            .sub(&gamma.get(l, k, i).mul(m.get(l, j)))
            .sub(&gamma.get(l, k, j).mul(m.get(i, l)));
    }
    acc
}

/// A k-form from its coefficients on increasing index tuples, e.g. for
/// `dx∧dy∧dz` use `&[(vec![0, 1, 2], 1)]`.
pub fn form_from_entries(n: usize, k: usize, entries: &[(Vec<usize>, RatFunc)]) -> KForm {
    let mut w = Alternating::zero(n, k);
    for (idx, c) in entries {
        let v = w.get(idx).add(c);
        w.set(idx, v);
    }
    w
}

/// Labels `d/dx, …` for vector fields and `dx, …` for covectors.
pub fn tangent_labels(chart: &Chart) -> Vec<String> {
    chart.names().iter().map(|n| format!("d/d{n}")).collect()
}

pub fn cotangent_labels(chart: &Chart) -> Vec<String> {
    chart.names().iter().map(|n| format!("d{n}")).collect()
}

/// Renders a vector in a frame with the given labels, e.g. `y*d/dx`.
pub fn render_vector(v: &[RatFunc], labels: &[String], chart: &Chart) -> String {
    crate::alt::render_terms(
        v.iter().zip(labels).map(|(c, l)| (c, l.clone())),
        chart.names(),
    )
}

/// Checks d∘d = 0 on every degree of `w`; exposed for property tests.
pub fn dd_vanishes(w: &KForm) -> bool {
    exterior_d(&exterior_d(w)).is_zero()
}

/// Cyclic sum R(X,Y)Z + R(Y,Z)X + R(Z,X)Y on coordinate frames; empty iff it vanishes.
pub fn bianchi_defects(gamma: &Christoffel) -> Vec<(usize, usize, usize)> {
    let n = gamma.dim();
    let e = |i| coord_field(n, i);
    let mut bad = Vec::new();
    for idx in combinations(n, 3).into_iter().chain((0..n).flat_map(|i| {
        (0..n).map(move |j| vec![i, i, j])
    })) {
        let (x, y, z) = (e(idx[0]), e(idx[1]), e(idx[2]));
        let s = vadd(
            &vadd(&gamma.curvature(&x, &y, &z), &gamma.curvature(&y, &z, &x)),
            &gamma.curvature(&z, &x, &y),
        );
        if !is_zero_vec(&s) {
            bad.push((idx[0], idx[1], idx[2]));
        }
    }
    bad
}

/// f·X.
pub fn scale_vf(f: &RatFunc, x: &[RatFunc]) -> VectorField {
    vscale(f, x)
}
