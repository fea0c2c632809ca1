//! Finite fields F_{p^n} and their elements.
//!
//! An element is stored as an integer code `c0 + c1 p + ... + c_{n-1} p^{n-1}`
//! where `c0 + c1 t + ...` is its residue modulo the defining polynomial.
//! Hot loops work on raw codes through the [`ExtField`] methods; [`Scalar`]
//! is the checked wrapper that carries its field.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw field element code.
pub type Elt = u32;

pub type FieldRef = Arc<ExtField>;

const ADD_TABLE_LIMIT: u32 = 512;
const MAX_ORDER: u64 = 1 << 22;

#[derive(Debug)]
pub struct ExtField {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: Elt,
    exp: Vec<Elt>,
    log: Vec<u32>,
    add_table: Option<Vec<Elt>>,
    neg_table: Vec<Elt>,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn cache() -> &'static Mutex<HashMap<(u32, u32), FieldRef>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), FieldRef>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The field F_{p^n} defined by the lexicographically smallest monic
/// irreducible polynomial of degree n (coefficients compared from the
/// constant term up).
pub fn make_field(p: u64, n: u32) -> Result<FieldRef> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("extension degree must be positive".into()));
    }
    let q = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
    if q > MAX_ORDER as u128 {
        return Err(Error::InvalidParameter(format!("field of order {p}^{n} is too large")));
    }
    let key = (p as u32, n);
    if let Some(f) = cache().lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let f = Arc::new(ExtField::build(p as u32, n));
    cache().lock().unwrap().entry(key).or_insert(f.clone());
    Ok(f)
}

// Polynomials over F_p, low-to-high coefficient vectors.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = top - dm;
        for (k, &mk) in m.iter().enumerate() {
            let s = (c as u64 * mk as u64 % p as u64) as u32;
            r[shift + k] = (r[shift + k] + p - s) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    r.into_iter().map(|v| v as u32).collect()
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits(code: u64, p: u32, n: u32) -> Vec<u32> {
    let mut c = code;
    (0..n)
        .map(|_| {
            let d = (c % p as u64) as u32;
            c /= p as u64;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0u32, |acc, &x| acc * p + x)
}

/// Irreducible iff no monic factor of degree 1..=deg/2.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut f = digits(code, p, d as u32);
            f.push(1);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(n);
    for idx in 0..count {
        // c0 is the most significant position in the lexicographic order.
        let mut d = digits(idx, p, n);
        d.reverse();
        d.push(1);
        if is_irreducible(&d, p) {
            return d;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

impl ExtField {
    fn build(p: u32, n: u32) -> Self {
        let q = p.pow(n);
        let modulus = smallest_irreducible(p, n);
        let mulmod = |a: u32, b: u32| -> u32 {
            let pa = digits(a as u64, p, n);
            let pb = digits(b as u64, p, n);
            let mut r = poly_rem(&poly_mul(&pa, &pb, p), &modulus, p);
            r.resize(n as usize, 0);
            undigits(&r, p)
        };
        let powmod = |a: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            let mut b = a;
            while e > 0 {
                if e & 1 == 1 {
                    r = mulmod(r, b);
                }
                b = mulmod(b, b);
                e >>= 1;
            }
            r
        };
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let primitive = (1..q)
            .find(|&g| factors.iter().all(|&r| powmod(g, order / r) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for k in 0..order as u32 {
            exp.push(cur);
            log[cur as usize] = k;
            cur = mulmod(cur, primitive);
        }
        let add_digits = |a: u32, b: u32| -> u32 {
            let da = digits(a as u64, p, n);
            let db = digits(b as u64, p, n);
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            undigits(&s, p)
        };
        let neg_table = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a as u64, p, n).iter().map(|x| (p - x) % p).collect();
                undigits(&d, p)
            })
            .collect();
        let add_table = if n > 1 && q <= ADD_TABLE_LIMIT {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b);
                }
            }
            Some(t)
        } else {
            None
        };
        ExtField { p, n, q, modulus, primitive, exp, log, add_table, neg_table }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    /// Field order p^n.
    pub fn order(&self) -> u32 {
        self.q
    }
    /// Defining polynomial, low-to-high, monic of degree n.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    /// Smallest generator of the multiplicative group.
    pub fn primitive(&self) -> Elt {
        self.primitive
    }
    pub fn same_as(&self, other: &ExtField) -> bool {
        self.p == other.p && self.n == other.n
    }

    /// Human-readable modulus such as `t^2 + 2t + 2`.
    pub fn modulus_string(&self) -> String {
        let mut parts = Vec::new();
        for (k, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && k > 0 { String::new() } else { c.to_string() };
            parts.push(match k {
                0 => coef,
                1 => format!("{coef}t"),
                _ => format!("{coef}t^{k}"),
            });
        }
        parts.join(" + ")
    }

    pub fn name(&self) -> String {
        if self.n == 1 {
            format!("F_{}", self.p)
        } else {
            format!("F_{}^{}", self.p, self.n)
        }
    }

    #[inline]
    pub fn zero(&self) -> Elt {
        0
    }
    #[inline]
    pub fn one(&self) -> Elt {
        1
    }

    /// Reduce an integer into the prime field.
    pub fn from_int(&self, v: i64) -> Elt {
        v.rem_euclid(self.p as i64) as Elt
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        if self.n == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if let Some(t) = &self.add_table {
            t[(a * self.q + b) as usize]
        } else {
            let mut r = 0u32;
            let mut place = 1u32;
            let (mut x, mut y) = (a, b);
            for _ in 0..self.n {
                r += ((x % self.p + y % self.p) % self.p) * place;
                x /= self.p;
                y /= self.p;
                place = place.wrapping_mul(self.p);
            }
            r
        }
    }

    #[inline]
    pub fn neg(&self, a: Elt) -> Elt {
        self.neg_table[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.n == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as Elt;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        let m = self.q - 1;
        self.exp[(if s >= m { s - m } else { s }) as usize]
    }

    pub fn inv(&self, a: Elt) -> Result<Elt> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let m = self.q - 1;
        Ok(self.exp[((m - self.log[a as usize]) % m) as usize])
    }

    pub fn div(&self, a: Elt, b: Elt) -> Result<Elt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with the convention 0^0 = 1.
    pub fn pow0(&self, a: Elt, e: u64) -> Elt {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let m = (self.q - 1) as u64;
        let k = (self.log[a as usize] as u64 * (e % m)) % m;
        self.exp[k as usize]
    }

    /// `a^e` for an integer exponent; negative exponents need `a != 0`.
    pub fn pow_signed(&self, a: Elt, e: i64) -> Result<Elt> {
        if e >= 0 {
            return Ok(self.pow0(a, e as u64));
        }
        let m = (self.q - 1) as i64;
        Ok(self.pow0(self.inv(a)?, (-e).rem_euclid(m) as u64 + m as u64))
    }

    /// x^(p^k).
    pub fn frobenius(&self, a: Elt, k: u32) -> Elt {
        let e = (self.p as u64).pow(k % self.n);
        self.pow0(a, e)
    }

    /// `g^k` for the primitive element g.
    pub fn exp_of(&self, k: u64) -> Elt {
        self.exp[(k % (self.q as u64 - 1)) as usize]
    }

    /// Discrete logarithm to base the primitive element.
    pub fn log_of(&self, a: Elt) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.log[a as usize])
    }

    /// Nonzero elements as successive powers of the primitive element.
    pub fn nonzero_by_powers(&self) -> &[Elt] {
        &self.exp
    }

    pub fn is_prime_field_element(&self, a: Elt) -> bool {
        a < self.p
    }

    pub fn coeffs(&self, a: Elt) -> Vec<u32> {
        digits(a as u64, self.p, self.n)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<Elt> {
        if c.len() != self.n as usize {
            return Err(Error::DimensionMismatch { expected: self.n as usize, got: c.len() });
        }
        if c.iter().any(|&x| x >= self.p) {
            return Err(Error::InvalidParameter("coefficient out of range".into()));
        }
        Ok(undigits(c, self.p))
    }

    pub fn format(&self, a: Elt) -> String {
        if self.n == 1 {
            a.to_string()
        } else {
            let c = self.coeffs(a);
            format!("[{}]", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        }
    }

    /// Sum of all field elements raised to the j-th power (0^0 = 1).
    pub fn power_sum(&self, j: u64) -> Elt {
        (0..self.q).fold(0, |acc, a| self.add(acc, self.pow0(a, j)))
    }
}

/// An element of a specific finite field.
#[derive(Clone)]
pub struct Scalar {
    field: FieldRef,
    v: Elt,
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.field.name(), self.field.format(self.v))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.v))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Self) -> bool {
        self.field.same_as(&o.field) && self.v == o.v
    }
}
impl Eq for Scalar {}

#[derive(Serialize, Deserialize)]
struct ScalarRepr(Vec<u32>);

impl Scalar {
    pub fn new(field: &FieldRef, v: Elt) -> Self {
        assert!(v < field.order(), "element code out of range");
        Scalar { field: field.clone(), v }
    }
    pub fn from_coeffs(field: &FieldRef, c: &[u32]) -> Result<Self> {
        Ok(Scalar { field: field.clone(), v: field.from_coeffs(c)? })
    }
    pub fn from_int(field: &FieldRef, v: i64) -> Self {
        Scalar { field: field.clone(), v: field.from_int(v) }
    }
    pub fn zero(field: &FieldRef) -> Self {
        Scalar::new(field, 0)
    }
    pub fn one(field: &FieldRef) -> Self {
        Scalar::new(field, 1)
    }
    pub fn field(&self) -> &FieldRef {
        &self.field
    }
    pub fn code(&self) -> Elt {
        self.v
    }
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.v)
    }
    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn check(&self, o: &Scalar) -> Result<()> {
        if self.field.same_as(&o.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.order() as u64, o.field.order() as u64))
        }
    }
    pub fn try_add(&self, o: &Scalar) -> Result<Scalar> {
        self.check(o)?;
        Ok(Scalar { field: self.field.clone(), v: self.field.add(self.v, o.v) })
    }
    pub fn try_sub(&self, o: &Scalar) -> Result<Scalar> {
        self.check(o)?;
        Ok(Scalar { field: self.field.clone(), v: self.field.sub(self.v, o.v) })
    }
    pub fn try_mul(&self, o: &Scalar) -> Result<Scalar> {
        self.check(o)?;
        Ok(Scalar { field: self.field.clone(), v: self.field.mul(self.v, o.v) })
    }
    pub fn try_div(&self, o: &Scalar) -> Result<Scalar> {
        self.check(o)?;
        Ok(Scalar { field: self.field.clone(), v: self.field.div(self.v, o.v)? })
    }
    pub fn neg(&self) -> Scalar {
        Scalar { field: self.field.clone(), v: self.field.neg(self.v) }
    }
    pub fn inv(&self) -> Result<Scalar> {
        Ok(Scalar { field: self.field.clone(), v: self.field.inv(self.v)? })
    }
    /// Ordinary power; 0^0 is rejected.
    pub fn pow(&self, e: u64) -> Result<Scalar> {
        if e == 0 && self.v == 0 {
            return Err(Error::ZeroToZero);
        }
        Ok(pow0(self, e))
    }
}

/// `x^e` with 0^0 = 1.
pub fn pow0(x: &Scalar, e: u64) -> Scalar {
    Scalar { field: x.field.clone(), v: x.field.pow0(x.v, e) }
}

/// `x^(p^k)`.
pub fn frobenius(x: &Scalar, k: u32) -> Scalar {
    Scalar { field: x.field.clone(), v: x.field.frobenius(x.v, k) }
}

macro_rules! scalar_op {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$f(o).expect("scalar operands from different fields")
            }
        }
        impl std::ops::$tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$f(&o).expect("scalar operands from different fields")
            }
        }
    };
}
scalar_op!(Add, add, try_add);
scalar_op!(Sub, sub, try_sub);
scalar_op!(Mul, mul, try_mul);

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr(self.coeffs()).serialize(s)
    }
}

/// A field embedding given by the images of all element codes.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub from: FieldRef,
    pub to: FieldRef,
    images: Vec<Elt>,
}

impl Embedding {
    pub fn identity(f: &FieldRef) -> Self {
        Embedding { from: f.clone(), to: f.clone(), images: (0..f.order()).collect() }
    }

    /// The embedding F_{p^m} -> F_{p^n} (m | n) sending the generator t of
    /// the source to the first root of the source modulus in the target.
    pub fn new(from: &FieldRef, to: &FieldRef) -> Result<Self> {
        let err = || Error::NoEmbedding(from.order() as u64, to.order() as u64);
        if from.p() != to.p() || !to.n().is_multiple_of(from.n()) {
            return Err(err());
        }
        if from.same_as(to) {
            return Ok(Embedding::identity(from));
        }
        if from.n() == 1 {
            return Ok(Embedding { from: from.clone(), to: to.clone(), images: (0..from.order()).collect() });
        }
        let m = from.modulus();
        let eval = |r: Elt| -> Elt {
            m.iter().rev().fold(0, |acc, &c| to.add(to.mul(acc, r), c))
        };
        let root = (0..to.order()).find(|&r| eval(r) == 0).ok_or_else(err)?;
        let images = (0..from.order())
            .map(|a| {
                from.coeffs(a).iter().rev().fold(0, |acc, &c| to.add(to.mul(acc, root), c))
            })
            .collect();
        Ok(Embedding { from: from.clone(), to: to.clone(), images })
    }

    #[inline]
    pub fn apply(&self, a: Elt) -> Elt {
        self.images[a as usize]
    }

    pub fn apply_scalar(&self, x: &Scalar) -> Result<Scalar> {
        if !x.field.same_as(&self.from) {
            return Err(Error::FieldMismatch(x.field.order() as u64, self.from.order() as u64));
        }
        Ok(Scalar::new(&self.to, self.apply(x.v)))
    }

    /// Preimage of a target element lying in the image, if any.
    pub fn preimage(&self, b: Elt) -> Option<Elt> {
        self.images.iter().position(|&x| x == b).map(|i| i as Elt)
    }
}

/// Coefficients b_0..b_{q-1} with a_alpha = sum_j alpha^j b_j, recovered as
/// b_0 = a_0 and b_j = -sum_alpha alpha^{q-1-j} a_alpha. `a` is indexed by
/// element code.
pub fn inversion_transform(f: &ExtField, a: &[Vec<Elt>]) -> Result<Vec<Vec<Elt>>> {
    let q = f.order() as usize;
    if a.len() != q {
        return Err(Error::DimensionMismatch { expected: q, got: a.len() });
    }
    let d = a[0].len();
    if let Some(bad) = a.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
    }
    let mut b = vec![a[0].clone()];
    for j in 1..q {
        let mut acc = vec![0; d];
        for (alpha, v) in a.iter().enumerate() {
            let c = f.pow0(alpha as Elt, (q - 1 - j) as u64);
            if c == 0 {
                continue;
            }
            for (s, &x) in acc.iter_mut().zip(v) {
                *s = f.add(*s, f.mul(c, x));
            }
        }
        b.push(acc.into_iter().map(|x| f.neg(x)).collect());
    }
    Ok(b)
}

/// a_alpha = sum_j alpha^j b_j, indexed by element code.
pub fn forward_transform(f: &ExtField, b: &[Vec<Elt>]) -> Result<Vec<Vec<Elt>>> {
    let q = f.order() as usize;
    if b.len() != q {
        return Err(Error::DimensionMismatch { expected: q, got: b.len() });
    }
    let d = b[0].len();
    if let Some(bad) = b.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
    }
    Ok((0..q as Elt)
        .map(|alpha| {
            let mut acc = vec![0; d];
            for (j, v) in b.iter().enumerate() {
                let c = f.pow0(alpha, j as u64);
                for (s, &x) in acc.iter_mut().zip(v) {
                    *s = f.add(*s, f.mul(c, x));
                }
            }
            acc
        })
        .collect())
}
