//! Alternating multilinear forms stored on strictly increasing index tuples.

use std::collections::BTreeMap;

use cnalg_field::RatFunc;

use crate::linalg::Vector;

/// An element of ∧ᵐV* for a free module V of the given rank.
///
/// Differential forms (V = TM), multivectors (V = T*M) and forms on a
/// vector bundle (V = E) all share this type. Only nonzero coefficients are
/// stored, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Alternating {
    rank: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, RatFunc>,
}

/// A differential form on the chart.
pub type KForm = Alternating;
/// A section of ∧ᵐE* in a fixed frame of E.
pub type MultiSection = Alternating;

/// Strictly increasing tuples of length `k` drawn from `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Sorts `idx`, returning the permutation sign, or `None` on a repeated index.
pub fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut negative = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, negative))
    }
}

impl Alternating {
    pub fn zero(rank: usize, degree: usize) -> Self {
        Alternating {
            rank,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn scalar(rank: usize, f: RatFunc) -> Self {
        let mut a = Self::zero(rank, 0);
        a.set(&[], f);
        a
    }

    /// A 1-form from its components.
    pub fn from_vector(v: &[RatFunc]) -> Self {
        let mut a = Self::zero(v.len(), 1);
        for (i, c) in v.iter().enumerate() {
            a.set(&[i], c.clone());
        }
        a
    }

    /// Builds from a function on increasing index tuples.
    pub fn from_fn(rank: usize, degree: usize, mut f: impl FnMut(&[usize]) -> RatFunc) -> Self {
        let mut a = Self::zero(rank, degree);
        for idx in combinations(rank, degree) {
            let v = f(&idx);
            a.set(&idx, v);
        }
        a
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero coefficients on increasing index tuples.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &RatFunc)> {
        self.coeffs.iter()
    }

    /// Coefficient at an arbitrary index tuple, antisymmetry applied.
    pub fn get(&self, idx: &[usize]) -> RatFunc {
        assert_eq!(idx.len(), self.degree, "index tuple has the wrong length");
        match sort_sign(idx) {
            None => RatFunc::zero(),
            Some((sorted, negative)) => match self.coeffs.get(&sorted) {
                None => RatFunc::zero(),
                Some(c) if negative => c.neg(),
                Some(c) => c.clone(),
            },
        }
    }

    /// Sets the coefficient at `idx` (any order; the sign is absorbed).
    pub fn set(&mut self, idx: &[usize], value: RatFunc) {
        assert_eq!(idx.len(), self.degree, "index tuple has the wrong length");
        assert!(idx.iter().all(|&i| i < self.rank), "index out of range");
        let (sorted, negative) = sort_sign(idx).expect("repeated index in alternating tensor");
        let value = if negative { value.neg() } else { value };
        if value.is_zero() {
            self.coeffs.remove(&sorted);
        } else {
            self.coeffs.insert(sorted, value);
        }
    }

    pub fn add(&self, other: &Alternating) -> Alternating {
        self.check_same(other);
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            let v = out.get(idx).add(c);
            out.set(idx, v);
        }
        out
    }

    pub fn sub(&self, other: &Alternating) -> Alternating {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Alternating {
        Alternating {
            rank: self.rank,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v.neg())).collect(),
        }
    }

    pub fn scale(&self, f: &RatFunc) -> Alternating {
        let mut out = Self::zero(self.rank, self.degree);
        for (idx, c) in &self.coeffs {
            out.set(idx, f.mul(c));
        }
        out
    }

    /// Value on `degree` vectors given by their components:
    /// Σ_I μ_I det[v_b^{I_c}].
    pub fn eval(&self, vectors: &[Vector]) -> RatFunc {
        assert_eq!(vectors.len(), self.degree, "wrong number of arguments");
        let mut total = RatFunc::zero();
        for (idx, c) in &self.coeffs {
            let m = crate::linalg::Matrix::from_fn(self.degree, self.degree, |b, k| {
                vectors[b][idx[k]].clone()
            });
            let d = m.det();
            if !d.is_zero() {
                total = total.add(&c.mul(&d));
            }
        }
        total
    }

    /// Contraction in the first slot: (i_v μ)(w…) = μ(v, w…).
    pub fn contract(&self, v: &[RatFunc]) -> Alternating {
        assert!(self.degree >= 1, "contraction of a degree-0 element");
        assert_eq!(v.len(), self.rank);
        Alternating::from_fn(self.rank, self.degree - 1, |rest| {
            let mut acc = RatFunc::zero();
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let mut idx = Vec::with_capacity(self.degree);
                idx.push(j);
                idx.extend_from_slice(rest);
                let c = self.get(&idx);
                if !c.is_zero() {
                    acc = acc.add(&vj.mul(&c));
                }
            }
            acc
        })
    }

    /// Entrywise ∂/∂x_i of the coefficients.
    pub fn partial(&self, i: usize) -> Alternating {
        let mut out = Self::zero(self.rank, self.degree);
        for (idx, c) in &self.coeffs {
            out.set(idx, c.partial(i));
        }
        out
    }

    /// Renders with a label per basis covector, e.g. `x*dx∧dy - dz`.
    pub fn render(&self, labels: &[String], names: &[String]) -> String {
        render_terms(
            self.coeffs.iter().map(|(idx, c)| {
                let basis = if idx.is_empty() {
                    String::new()
                } else {
                    idx.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join("∧")
                };
                (c, basis)
            }),
            names,
        )
    }

    fn check_same(&self, other: &Alternating) {
        assert!(
            self.rank == other.rank && self.degree == other.degree,
            "alternating tensors of different shape"
        );
    }
}

/// Joins `coefficient*basis` terms with signs pulled out.
pub fn render_terms<'a>(
    terms: impl Iterator<Item = (&'a RatFunc, String)>,
    names: &[String],
) -> String {
    let mut out = String::new();
    for (c, basis) in terms {
        if c.is_zero() {
            continue;
        }
        // pull a leading minus out of single-term numerators
        let negative = c.num().len() == 1 && c.num().leading_coeff() < num_traits::Zero::zero();
        let body = if negative { c.neg() } else { c.clone() }.render(names);
        let compound = c.num().len() > 1 || !c.den().is_one();
        let term = if basis.is_empty() {
            body
        } else if body == "1" {
            basis
        } else if compound {
            format!("({body})*{basis}")
        } else {
            format!("{body}*{basis}")
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetric_access() {
        let mut a = Alternating::zero(3, 2);
        a.set(&[1, 0], RatFunc::from_int(2));
        assert_eq!(a.get(&[0, 1]), RatFunc::from_int(-2));
        assert!(a.get(&[1, 1]).is_zero());
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn evaluation_is_determinant() {
        let mut a = Alternating::zero(2, 2);
        a.set(&[0, 1], RatFunc::one());
        let e0 = vec![RatFunc::one(), RatFunc::zero()];
        let e1 = vec![RatFunc::zero(), RatFunc::one()];
        assert!(a.eval(&[e0.clone(), e1.clone()]).is_one());
        assert_eq!(a.eval(&[e1, e0]), RatFunc::from_int(-1));
    }
}
