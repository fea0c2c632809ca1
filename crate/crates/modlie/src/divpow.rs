//! Truncated divided-power algebras F[m:n].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Elt, FieldRef};

/// C(a, b) mod p by Lucas' theorem; zero when b > a.
pub fn binom_mod_p(a: u64, b: u64, p: u32) -> u32 {
    if b > a {
        return 0;
    }
    let p = p as u64;
    let (mut a, mut b) = (a, b);
    let mut r = 1u64;
    while a > 0 || b > 0 {
        let (ad, bd) = (a % p, b % p);
        if bd > ad {
            return 0;
        }
        r = r * small_binom(ad, bd, p) % p;
        a /= p;
        b /= p;
    }
    r as u32
}

fn small_binom(a: u64, b: u64, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for k in 0..b {
        num = num * ((a - k) % p) % p;
        den = den * ((k + 1) % p) % p;
    }
    let mut inv = 1u64;
    let mut base = den;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    num * inv % p
}

/// C(a, b) mod p for an arbitrary integer top `a`, via
/// C(a, b) = (-1)^b C(b - a - 1, b) when a < 0. Zero when b < 0.
pub fn binom_int_mod_p(a: i64, b: i64, p: u32) -> u32 {
    if b < 0 {
        return 0;
    }
    if a >= 0 {
        return binom_mod_p(a as u64, b as u64, p);
    }
    let v = binom_mod_p((b - a - 1) as u64, b as u64, p);
    if b % 2 == 1 {
        (p - v) % p
    } else {
        v
    }
}

/// Number of variables and their heights; exponent j ranges over 0..p^{n_j}.
#[derive(Debug, Clone)]
pub struct DPShape {
    field: FieldRef,
    heights: Vec<u32>,
    bounds: Vec<u32>,
}

pub type ShapeRef = Arc<DPShape>;

impl PartialEq for DPShape {
    fn eq(&self, o: &Self) -> bool {
        self.field.same_as(&o.field) && self.heights == o.heights
    }
}

impl DPShape {
    pub fn new(field: &FieldRef, heights: &[u32]) -> Result<ShapeRef> {
        if heights.is_empty() || heights.contains(&0) {
            return Err(Error::InvalidParameter("heights must be positive".into()));
        }
        let bounds = heights.iter().map(|&h| field.p().pow(h)).collect();
        Ok(Arc::new(DPShape { field: field.clone(), heights: heights.to_vec(), bounds }))
    }
    pub fn field(&self) -> &FieldRef {
        &self.field
    }
    pub fn p(&self) -> u32 {
        self.field.p()
    }
    pub fn m(&self) -> usize {
        self.heights.len()
    }
    pub fn heights(&self) -> &[u32] {
        &self.heights
    }
    /// Exclusive exponent bound p^{n_j} for each variable.
    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }
    pub fn contains(&self, exps: &[u32]) -> bool {
        exps.len() == self.m() && exps.iter().zip(&self.bounds).all(|(e, b)| e < b)
    }
    /// All monomials in lexicographic exponent order.
    pub fn monomials(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &b in &self.bounds {
            out = out
                .into_iter()
                .flat_map(|pre| {
                    (0..b).map(move |e| {
                        let mut v = pre.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// Display a monomial as `x^(i)y^(j)`; zero exponents are omitted and the
/// empty monomial prints as `1`.
pub fn monomial_label(exps: &[u32]) -> String {
    let names: Vec<String> = if exps.len() <= 2 {
        ["x", "y"].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=exps.len()).map(|k| format!("x{k}")).collect()
    };
    let s: String = exps
        .iter()
        .zip(&names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, v)| format!("{v}^({e})"))
        .collect();
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

/// A sparse element of F[m:n] with nonzero coefficients only.
#[derive(Clone, PartialEq)]
pub struct DPElement {
    shape: ShapeRef,
    terms: BTreeMap<Vec<u32>, Elt>,
}

impl fmt::Debug for DPElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DPElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = &self.shape.field;
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, &c)| {
                if c == 1 {
                    monomial_label(m)
                } else {
                    format!("{}*{}", field.format(c), monomial_label(m))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl DPElement {
    pub fn zero(shape: &ShapeRef) -> Self {
        DPElement { shape: shape.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(shape: &ShapeRef, exps: &[u32]) -> Result<Self> {
        Self::term(shape, exps, 1)
    }

    pub fn term(shape: &ShapeRef, exps: &[u32], c: Elt) -> Result<Self> {
        if !shape.contains(exps) {
            return Err(Error::InvalidParameter(format!("monomial {exps:?} outside shape")));
        }
        let mut e = Self::zero(shape);
        if c != 0 {
            e.terms.insert(exps.to_vec(), c);
        }
        Ok(e)
    }

    pub fn shape(&self) -> &ShapeRef {
        &self.shape
    }
    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Elt> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, exps: &[u32]) -> Elt {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Elt) {
        let f = &self.shape.field;
        let v = f.add(self.terms.get(&exps).copied().unwrap_or(0), c);
        if v == 0 {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, v);
        }
    }

    fn check(&self, o: &DPElement) -> Result<()> {
        if *self.shape == *o.shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch)
        }
    }

    pub fn add(&self, o: &DPElement) -> Result<DPElement> {
        self.check(o)?;
        let mut r = self.clone();
        for (m, &c) in &o.terms {
            r.add_term(m.clone(), c);
        }
        Ok(r)
    }

    pub fn sub(&self, o: &DPElement) -> Result<DPElement> {
        self.add(&o.scale(self.shape.field.neg(1)))
    }

    pub fn scale(&self, c: Elt) -> DPElement {
        let f = &self.shape.field;
        let mut r = DPElement::zero(&self.shape);
        for (m, &v) in &self.terms {
            let w = f.mul(c, v);
            if w != 0 {
                r.terms.insert(m.clone(), w);
            }
        }
        r
    }
}

/// Product in F[m:n]: x^(k) x^(l) = C(k+l, k) x^(k+l), zero past the bound.
pub fn dp_mul(u: &DPElement, v: &DPElement) -> Result<DPElement> {
    u.check(v)?;
    let shape = &u.shape;
    let f = &shape.field;
    let p = shape.p();
    let mut r = DPElement::zero(shape);
    for (a, &ca) in &u.terms {
        'pair: for (b, &cb) in &v.terms {
            let mut coeff = f.mul(ca, cb);
            let mut exps = Vec::with_capacity(a.len());
            for ((&ea, &eb), &bound) in a.iter().zip(b).zip(&shape.bounds) {
                let s = ea + eb;
                if s >= bound {
                    continue 'pair;
                }
                coeff = f.mul(coeff, binom_mod_p(s as u64, ea as u64, p));
                if coeff == 0 {
                    continue 'pair;
                }
                exps.push(s);
            }
            r.add_term(exps, coeff);
        }
    }
    Ok(r)
}

/// The special derivation d/dx_j: x_j^(k) -> x_j^(k-1), x_j^(0) -> 0.
pub fn partial(u: &DPElement, j: usize) -> Result<DPElement> {
    if j >= u.shape.m() {
        return Err(Error::InvalidParameter(format!("variable index {j} out of range")));
    }
    let mut r = DPElement::zero(&u.shape);
    for (m, &c) in &u.terms {
        if m[j] > 0 {
            let mut e = m.clone();
            e[j] -= 1;
            r.add_term(e, c);
        }
    }
    Ok(r)
}
