//! Multivariate polynomial gcd over ℚ.
//!
//! The heuristic evaluation gcd is tried first; every candidate it produces
//! is confirmed by exact division, so a wrong answer is never returned. When
//! it gives up, recursive primitive remainder sequences take over.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::monomial::Monomial;
use crate::poly::Poly;

fn vars_of(p: &Poly) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for (m, _) in p.terms() {
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                out.insert(i);
            }
        }
    }
    out
}

/// Monic gcd of two polynomials; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() || a.is_constant() || b.is_constant() {
        return gcd_inner(a, b).monic();
    }
    let (fa, fb) = (a.integer_primitive(), b.integer_primitive());
    match heu_gcd(&fa, &fb) {
        Some(g) => g.monic(),
        None => gcd_inner(a, b).monic(),
    }
}

const HEU_ATTEMPTS: usize = 6;

fn int_coeff(c: &BigRational) -> &BigInt {
    debug_assert!(c.is_integer());
    c.numer()
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms()
        .iter()
        .map(|(_, c)| int_coeff(c).abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

fn int_content(p: &Poly) -> BigInt {
    p.terms()
        .iter()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(int_coeff(c)))
}

/// Substitutes the integer `value` for variable `v`.
fn subst(p: &Poly, v: usize, value: &BigInt) -> Poly {
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let (e, rest) = m.split_var(v);
        let scale = num_traits::pow(value.clone(), e as usize);
        terms.push((rest, c * BigRational::from_integer(scale)));
    }
    Poly::from_terms(terms)
}

/// Representative of `c mod m` in (-m/2, m/2].
fn symmetric_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Rebuilds a polynomial in `v` from its image at `v = xi` by xi-adic expansion.
fn interpolate(h: &Poly, v: usize, xi: &BigInt) -> Poly {
    let mut rest = h.clone();
    let mut terms = Vec::new();
    let mut power = 0u32;
    let xi_q = BigRational::from_integer(xi.clone());
    while !rest.is_zero() {
        let digit: Vec<(Monomial, BigRational)> = rest
            .terms()
            .iter()
            .map(|(m, c)| {
                (
                    m.clone(),
                    BigRational::from_integer(symmetric_mod(int_coeff(c), xi)),
                )
            })
            .collect();
        let digit = Poly::from_terms(digit);
        let vm = Monomial::var_pow(v, power);
        for (m, c) in digit.terms() {
            terms.push((m.mul(&vm), c.clone()));
        }
        rest = rest.sub(&digit).scale(&xi_q.recip());
        power += 1;
    }
    Poly::from_terms(terms)
}

/// Heuristic gcd of two integer polynomials, integer content included.
fn heu_gcd(f: &Poly, g: &Poly) -> Option<Poly> {
    let cf = int_content(f);
    let cg = int_content(g);
    let content = Poly::constant(BigRational::from_integer(cf.gcd(&cg)));
    if f.is_constant() || g.is_constant() {
        return Some(content);
    }
    let f = f.scale(&BigRational::new(BigInt::one(), cf));
    let g = g.scale(&BigRational::new(BigInt::one(), cg));
    let mut vars = vars_of(&f);
    vars.extend(vars_of(&g));
    let v = *vars.iter().next_back().expect("non-constant");
    let bound = max_norm(&f).min(max_norm(&g));
    let mut xi: BigInt = bound * 2 + 29;
    for _ in 0..HEU_ATTEMPTS {
        let ff = subst(&f, v, &xi);
        let gg = subst(&g, v, &xi);
        if !ff.is_zero() && !gg.is_zero() {
            let h = heu_gcd(&ff, &gg)?;
            let cand = interpolate(&h, v, &xi).integer_primitive();
            if !cand.is_zero() && f.div_exact(&cand).is_some() && g.div_exact(&cand).is_some() {
                return Some(content.mul(&cand));
            }
        }
        xi = &xi * 73794 * xi.sqrt().sqrt() / 27011;
    }
    None
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() == 1 && b.len() == 1 {
        return monomial_gcd(&a.terms()[0].0, &b.terms()[0].0);
    }
    if b.div_exact(a).is_some() {
        return a.clone();
    }
    if a.div_exact(b).is_some() {
        return b.clone();
    }
    let va = vars_of(a);
    let vb = vars_of(b);
    if let Some(&v) = va.difference(&vb).next() {
        return gcd_inner(&content(a, v), b);
    }
    if let Some(&v) = vb.difference(&va).next() {
        return gcd_inner(a, &content(b, v));
    }
    // both depend on the same variables; pick the one of lowest degree as main
    let v = *va
        .iter()
        .min_by_key(|&&v| a.degree_in(v).min(b.degree_in(v)))
        .expect("non-constant polynomial has a variable");
    let ca = content(a, v);
    let cb = content(b, v);
    let c = gcd_inner(&ca, &cb);
    let mut f = a.div_exact(&ca).expect("content divides").integer_primitive();
    let mut g = b.div_exact(&cb).expect("content divides").integer_primitive();
    if f.degree_in(v) < g.degree_in(v) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = pseudo_rem(&f, &g, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            return c;
        }
        f = g;
        g = primitive_part(&r, v);
    }
    c.mul(&g)
}

fn monomial_gcd(a: &Monomial, b: &Monomial) -> Poly {
    let n = a.var_bound().min(b.var_bound());
    let exps: Vec<u32> = (0..n).map(|i| a.exp(i).min(b.exp(i))).collect();
    Poly::term(Monomial::from_exponents(&exps), num_traits::One::one())
}

/// Gcd of the coefficients of `p` viewed as a polynomial in variable `v`.
pub fn content(p: &Poly, v: usize) -> Poly {
    let mut acc = Poly::zero();
    for (_, c) in p.coeffs_in(v) {
        acc = gcd_inner(&acc, &c);
        if acc.is_constant() {
            return Poly::one();
        }
    }
    acc.integer_primitive()
}

fn primitive_part(p: &Poly, v: usize) -> Poly {
    let c = content(p, v);
    p.div_exact(&c)
        .expect("content divides")
        .integer_primitive()
}

/// Sparse pseudo-remainder of `f` by `g` in variable `v`.
fn pseudo_rem(f: &Poly, g: &Poly, v: usize) -> Poly {
    let dg = g.degree_in(v);
    let gc = g.coeffs_in(v);
    let lg = gc.get(&dg).cloned().expect("leading coefficient");
    let mut r = f.clone();
    while !r.is_zero() {
        let dr = r.degree_in(v);
        if dr < dg {
            break;
        }
        let lr = r.coeffs_in(v).remove(&dr).expect("leading coefficient");
        let shift = Poly::term(Monomial::var_pow(v, dr - dg), num_traits::One::one());
        r = lg.mul(&r).sub(&lr.mul(&shift).mul(g));
    }
    r
}
