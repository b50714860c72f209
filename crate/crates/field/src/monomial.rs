use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// A power product x₀^e₀ x₁^e₁ ⋯ stored without trailing zero exponents.
///
/// Monomials are not tied to a fixed number of variables: `x1` in a
/// two-variable chart and in a three-variable chart is the same value.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(index: usize) -> Self {
        Self::var_pow(index, 1)
    }

    pub fn var_pow(index: usize, exp: u32) -> Self {
        if exp == 0 {
            return Self::one();
        }
        let mut v: SmallVec<[u32; 4]> = SmallVec::from_elem(0, index + 1);
        v[index] = exp;
        Monomial(v)
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut m = Monomial(SmallVec::from_slice(exps));
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    /// Exponent of variable `index`.
    pub fn exp(&self, index: usize) -> u32 {
        self.0.get(index).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// One past the largest variable index that occurs.
    pub fn var_bound(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut v = long.0.clone();
        for (i, e) in short.0.iter().enumerate() {
            v[i] += e;
        }
        Monomial(v)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut v = self.0.clone();
        for (i, e) in other.0.iter().enumerate() {
            if v[i] < *e {
                return None;
            }
            v[i] -= e;
        }
        let mut m = Monomial(v);
        m.trim();
        Some(m)
    }

    /// Removes variable `index`, returning its exponent and the rest.
    pub fn split_var(&self, index: usize) -> (u32, Monomial) {
        let e = self.exp(index);
        if e == 0 {
            return (0, self.clone());
        }
        let mut v = self.0.clone();
        v[index] = 0;
        let mut m = Monomial(v);
        m.trim();
        (e, m)
    }

    /// d/dx_index applied to the power product: (exponent, reduced monomial).
    pub fn derive(&self, index: usize) -> Option<(u32, Monomial)> {
        let e = self.exp(index);
        if e == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[index] -= 1;
        let mut m = Monomial(v);
        m.trim();
        Some((e, m))
    }

    /// Renders with the given variable names, `x^2*y` style; `1` for the unit.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{}", i + 1));
            if e == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        parts.join("*")
    }
}

/// Graded lexicographic: total degree first, then the exponent of x₀, x₁, ….
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let n = self.0.len().max(other.0.len());
        for i in 0..n {
            match self.exp(i).cmp(&other.exp(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let x = Monomial::var(0);
        let y = Monomial::var(1);
        let x2 = Monomial::var_pow(0, 2);
        let xy = x.mul(&y);
        assert!(x2 > xy);
        assert!(xy > y.mul(&y));
        assert!(x > y);
        assert!(y > Monomial::one());
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let m = Monomial::from_exponents(&[1, 0, 0]);
        assert_eq!(m, Monomial::var(0));
        assert_eq!(Monomial::var(2).div(&Monomial::var(2)), Some(Monomial::one()));
    }
}
