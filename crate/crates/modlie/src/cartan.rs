//! Algebras of Cartan type: Zassenhaus W(1:n), general W(m:n), and the
//! Hamiltonian algebras H(2:n;omega_0) and H(2:n;omega_2) realized on
//! divided-power monomials with the Poisson bracket.

use std::collections::HashMap;
use std::sync::Arc;

use crate::divpow::{binom_mod_p, dp_mul, monomial_label, partial, DPElement, DPShape};
use crate::error::{Error, Result};
use crate::lie::{AlgRef, LieAlgebra, LinearMap};
use crate::linalg::{Matrix, SparseRow};
use crate::scalar::{make_field, Elt, FieldRef};

/// The Poisson coefficient
/// N(i,j,k,l) = C(i+k-1, i) C(j+l-1, j-1) - C(i+k-1, i-1) C(j+l-1, j) mod p,
/// where a term vanishes when its derivative kills a factor
/// (k = 0 or j = 0 for the first, i = 0 or l = 0 for the second).
#[allow(non_snake_case)]
pub fn poisson_N(i: u32, j: u32, k: u32, l: u32, p: u32) -> u32 {
    let (i, j, k, l) = (i as u64, j as u64, k as u64, l as u64);
    let t1 = if j >= 1 && k >= 1 { binom_mod_p(i + k - 1, i, p) as u64 * binom_mod_p(j + l - 1, j - 1, p) as u64 % p as u64 } else { 0 };
    let t2 = if i >= 1 && l >= 1 { binom_mod_p(i + k - 1, i - 1, p) as u64 * binom_mod_p(j + l - 1, j, p) as u64 % p as u64 } else { 0 };
    ((t1 + p as u64 - t2) % p as u64) as u32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Omega0,
    Omega2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HamiltonianSpec {
    pub p: u32,
    pub n1: u32,
    pub n2: u32,
    pub variant: Variant,
    /// Adjoin x^(p^{n1}) and y^(p^{n2}).
    pub extended: bool,
}

/// A Hamiltonian algebra together with its monomial basis.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub spec: HamiltonianSpec,
    pub algebra: AlgRef,
    monomials: Vec<(u32, u32)>,
    index: HashMap<(u32, u32), usize>,
}

impl Hamiltonian {
    pub fn p1(&self) -> u32 {
        self.spec.p.pow(self.spec.n1)
    }
    pub fn p2(&self) -> u32 {
        self.spec.p.pow(self.spec.n2)
    }
    /// Exponents (i, j) of basis element `b`.
    pub fn monomial(&self, b: usize) -> (u32, u32) {
        self.monomials[b]
    }
    pub fn monomials(&self) -> &[(u32, u32)] {
        &self.monomials
    }
    /// Basis index of x^(i)y^(j), if it is a basis element.
    pub fn index(&self, i: u32, j: u32) -> Option<usize> {
        self.index.get(&(i, j)).copied()
    }
    pub fn field(&self) -> &FieldRef {
        self.algebra.field()
    }
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
    /// Unit vector of x^(i)y^(j).
    pub fn vec_of(&self, i: u32, j: u32) -> Vec<Elt> {
        let mut v = vec![0; self.dim()];
        v[self.index(i, j).unwrap_or_else(|| panic!("x^({i})y^({j}) is not a basis element"))] = 1;
        v
    }
    /// The basis index of e = x̄ȳ, when present.
    pub fn e_index(&self) -> Option<usize> {
        self.index(self.p1() - 1, self.p2() - 1)
    }
}

/// Basis monomials in (j, i) lexicographic order, i.e. y-degree major.
fn hamiltonian_monomials(spec: &HamiltonianSpec) -> Vec<(u32, u32)> {
    let p1 = spec.p.pow(spec.n1);
    let p2 = spec.p.pow(spec.n2);
    let mut out = Vec::new();
    for j in 0..p2 {
        for i in 0..p1 {
            if (i, j) == (0, 0) {
                continue;
            }
            if spec.variant == Variant::Omega0 && !spec.extended && (i, j) == (p1 - 1, p2 - 1) {
                continue;
            }
            out.push((i, j));
        }
    }
    if spec.extended {
        out.push((p1, 0));
        out.push((0, p2));
    }
    out
}

pub fn make_hamiltonian(spec: HamiltonianSpec) -> Result<Hamiltonian> {
    let HamiltonianSpec { p, n1, n2, variant, .. } = spec;
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter("heights must be positive".into()));
    }
    let field = make_field(p as u64, 1)?;
    let p1 = p.pow(n1);
    let p2 = p.pow(n2);
    let monomials = hamiltonian_monomials(&spec);
    let index: HashMap<(u32, u32), usize> = monomials.iter().enumerate().map(|(a, &m)| (m, a)).collect();
    let e = (p1 - 1, p2 - 1);
    let labels = monomials.iter().map(|&(i, j)| monomial_label(&[i, j])).collect();
    let bad_e = std::sync::atomic::AtomicBool::new(false);
    let alg = LieAlgebra::from_fn(&field, labels, |a, b| {
        let (i, j) = monomials[a];
        let (k, l) = monomials[b];
        if i + k == 0 || j + l == 0 {
            return Vec::new();
        }
        let (ti, tj) = (i + k - 1, j + l - 1);
        if ti >= p1 || tj >= p2 {
            return Vec::new();
        }
        let c = poisson_N(i, j, k, l, p);
        if c == 0 {
            return Vec::new();
        }
        if (ti, tj) == (0, 0) {
            // the constant is struck; in omega_2 the (1+e) factor leaves c e
            return match variant {
                Variant::Omega0 => Vec::new(),
                Variant::Omega2 => vec![(index[&e], c)],
            };
        }
        match index.get(&(ti, tj)) {
            Some(&t) => vec![(t, c)],
            None => {
                bad_e.store(true, std::sync::atomic::Ordering::Relaxed);
                Vec::new()
            }
        }
    });
    if bad_e.load(std::sync::atomic::Ordering::Relaxed) {
        return Err(Error::Check("a product leaves the omega_0 basis".into()));
    }
    let alg = alg.checked()?;
    Ok(Hamiltonian { spec, algebra: Arc::new(alg), monomials, index })
}

/// H(2:(n1,n2);omega_0): monomials other than 1 and x̄ȳ, dimension p^n - 2.
#[allow(non_snake_case)]
pub fn make_H_omega0(p: u32, n1: u32, n2: u32) -> Result<Hamiltonian> {
    make_hamiltonian(HamiltonianSpec { p, n1, n2, variant: Variant::Omega0, extended: false })
}

/// H(2:(n1,n2);omega_2): monomials other than 1, dimension p^n - 1.
#[allow(non_snake_case)]
pub fn make_H_omega2(p: u32, n1: u32, n2: u32) -> Result<Hamiltonian> {
    make_hamiltonian(HamiltonianSpec { p, n1, n2, variant: Variant::Omega2, extended: false })
}

/// The Poisson bracket computed inside the divided-power algebra:
/// f_y g_x - f_x g_y, multiplied by 1 + x̄ȳ for omega_2.
pub fn poisson_dp(f: &DPElement, g: &DPElement, variant: Variant) -> Result<DPElement> {
    let fy = partial(f, 1)?;
    let gx = partial(g, 0)?;
    let fx = partial(f, 0)?;
    let gy = partial(g, 1)?;
    let r = dp_mul(&fy, &gx)?.sub(&dp_mul(&fx, &gy)?)?;
    match variant {
        Variant::Omega0 => Ok(r),
        Variant::Omega2 => {
            let b = f.shape().bounds();
            let e = DPElement::monomial(f.shape(), &[b[0] - 1, b[1] - 1])?;
            r.add(&dp_mul(&e, &r)?)
        }
    }
}

/// The nonsingular derivation D = ȳ d/dx + (1+e) d/dy of H(2:n;omega_2).
#[allow(non_snake_case)]
pub fn make_D(h: &Hamiltonian) -> Result<LinearMap> {
    if h.spec.variant != Variant::Omega2 || h.spec.extended {
        return Err(Error::InvalidParameter("D is defined on H(2:n;omega_2)".into()));
    }
    let (p1, p2) = (h.p1(), h.p2());
    let n = h.dim();
    let mut m = Matrix::zeros(h.field(), n, n);
    for b in 0..n {
        let (i, j) = h.monomial(b);
        if j == 0 {
            m.set(h.index(i - 1, p2 - 1).unwrap(), b, 1);
        } else if (i, j - 1) == (0, 0) {
            m.set(h.index(p1 - 1, p2 - 1).unwrap(), b, 1);
        } else {
            m.set(h.index(i, j - 1).unwrap(), b, 1);
        }
    }
    LinearMap::new(h.algebra.clone(), h.algebra.clone(), m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZassenhausBasis {
    /// E_i = x^(i+1) d/dx, i = -1..r
    Proper,
    /// e_alpha, alpha in F_{p^n}
    Group,
}

/// W(1:n) in the proper basis (over F_p) or the group basis (over F_{p^n}).
/// Group basis elements are ordered by field element code.
#[allow(non_snake_case)]
pub fn make_W1n(p: u32, n: u32, kind: ZassenhausBasis) -> Result<LieAlgebra> {
    let q = (p as u64).checked_pow(n).filter(|&q| q <= 1 << 16).ok_or_else(|| Error::InvalidParameter("W(1:n) too large".into()))? as u32;
    match kind {
        ZassenhausBasis::Proper => {
            let f = make_field(p as u64, 1)?;
            let r = q as i64 - 2;
            let labels = (-1..=r).map(|i| format!("E_{{{i}}}")).collect();
            LieAlgebra::from_fn(&f, labels, |a, b| {
                let (i, j) = (a as i64 - 1, b as i64 - 1);
                if i + j > r {
                    return Vec::new();
                }
                let t = (i + j + 1) as u64;
                let c1 = if j >= 0 { binom_mod_p(t, j as u64, p) } else { 0 };
                let c2 = if i >= 0 { binom_mod_p(t, i as u64, p) } else { 0 };
                vec![((i + j + 1) as usize, f.sub(c1, c2))]
            })
            .checked()
        }
        ZassenhausBasis::Group => {
            let f = make_field(p as u64, n)?;
            let labels = (0..q).map(|a| format!("e_{{{}}}", f.format(a))).collect();
            LieAlgebra::from_fn(&f, labels, |a, b| {
                let (x, y) = (a as Elt, b as Elt);
                vec![(f.add(x, y) as usize, f.sub(y, x))]
            })
            .checked()
        }
    }
}

/// The change of basis from the group basis to the proper basis, as a map
/// W(1:n) group -> W(1:n) proper with matrix over F_{p^n}:
/// e_alpha = E_r + sum_{i=-1}^r alpha^{i+1} E_i (with 0^0 = 1).
pub fn zassenhaus_transition(p: u32, n: u32) -> Result<LinearMap> {
    let group = Arc::new(make_W1n(p, n, ZassenhausBasis::Group)?);
    let proper = Arc::new(make_W1n(p, n, ZassenhausBasis::Proper)?);
    let f = group.field().clone();
    let q = f.order() as usize;
    let r = q - 2;
    let mut m = Matrix::zeros(&f, q, q);
    for alpha in 0..q {
        // row index of E_i is i + 1
        for i in 0..=r + 1 {
            m.set(i, alpha, f.pow0(alpha as Elt, i as u64));
        }
        m.set(r + 1, alpha, f.add(m.get(r + 1, alpha), 1));
    }
    LinearMap::new(group, proper, m)
}

/// The inverse change of basis from the displayed formulas
/// E_{-1} = e_0 + sum_alpha e_alpha and E_i = -sum_alpha alpha^{r-i} e_alpha.
pub fn zassenhaus_transition_inverse(p: u32, n: u32) -> Result<LinearMap> {
    let group = Arc::new(make_W1n(p, n, ZassenhausBasis::Group)?);
    let proper = Arc::new(make_W1n(p, n, ZassenhausBasis::Proper)?);
    let f = group.field().clone();
    let q = f.order() as usize;
    let r = q - 2;
    let mut m = Matrix::zeros(&f, q, q);
    for alpha in 0..q {
        m.set(alpha, 0, 1);
    }
    m.set(0, 0, f.add(m.get(0, 0), 1));
    for i in 0..=r {
        for alpha in 0..q {
            m.set(alpha, i + 1, f.neg(f.pow0(alpha as Elt, (r - i) as u64)));
        }
    }
    LinearMap::new(proper, group, m)
}

/// The simple Zassenhaus algebra <E_i | i != r> of W(1:n), p = 2.
pub fn simple_zassenhaus(n: u32) -> Result<LieAlgebra> {
    let w = make_W1n(2, n, ZassenhausBasis::Proper)?;
    let d = w.dim();
    let basis: Vec<Vec<Elt>> = (0..d - 1).map(|i| crate::linalg::unit_vec(d, i)).collect();
    let labels = w.labels()[..d - 1].to_vec();
    w.on_basis(&basis, labels)
}

/// In characteristic two, the isomorphism from the simple Zassenhaus
/// algebra of dimension 2^{n+1} - 1 onto H(2:(1,n);omega_2), inverse to
/// x y^(j) -> E_{j-1}, y^(j) -> E_{j+2^n-2}.
pub fn char2_zassenhaus_iso(n: u32) -> Result<LinearMap> {
    let h = make_H_omega2(2, 1, n)?;
    let z = Arc::new(simple_zassenhaus(n + 1)?);
    let f = h.field().clone();
    let d = h.dim();
    let mut m = Matrix::zeros(&f, d, d);
    let two_n = 1u32 << n;
    for b in 0..d {
        let (i, j) = h.monomial(b);
        // column b of the H -> W map; index of E_k is k + 1
        let k = if i == 1 { j as i64 - 1 } else { j as i64 + two_n as i64 - 2 };
        m.set((k + 1) as usize, b, 1);
    }
    let forward = LinearMap::new(h.algebra.clone(), z, m)?;
    forward.inverse().ok_or_else(|| Error::Check("char 2 Zassenhaus map is singular".into()))
}

/// W(m:n): special derivations x^(a) d/dx_j of F[m:n], basis ordered by
/// variable j then monomial.
#[allow(non_snake_case)]
pub fn make_W(p: u32, heights: &[u32]) -> Result<LieAlgebra> {
    let f = make_field(p as u64, 1)?;
    let shape = DPShape::new(&f, heights)?;
    let monos = shape.monomials();
    let m = heights.len();
    let mut basis = Vec::new();
    for j in 0..m {
        for mono in &monos {
            basis.push((mono.clone(), j));
        }
    }
    let pos: HashMap<(Vec<u32>, usize), usize> = basis.iter().cloned().enumerate().map(|(a, k)| (k, a)).collect();
    let labels = basis
        .iter()
        .map(|(mono, j)| {
            let d = if m <= 2 { ["d/dx", "d/dy"][*j].to_string() } else { format!("d/dx{}", j + 1) };
            format!("{} {}", monomial_label(mono), d)
        })
        .collect();
    let elem = |mono: &Vec<u32>| DPElement::monomial(&shape, mono).unwrap();
    LieAlgebra::from_fn(&f, labels, |a, b| {
        // [f d_i, g d_j] = f d_i(g) d_j - g d_j(f) d_i
        let (fm, i) = &basis[a];
        let (gm, j) = &basis[b];
        let (fe, ge) = (elem(fm), elem(gm));
        let t1 = dp_mul(&fe, &partial(&ge, *i).unwrap()).unwrap();
        let t2 = dp_mul(&ge, &partial(&fe, *j).unwrap()).unwrap();
        let mut row: SparseRow = t1.terms().iter().map(|(mo, &c)| (pos[&(mo.clone(), *j)], c)).collect();
        row.extend(t2.terms().iter().map(|(mo, &c)| (pos[&(mo.clone(), *i)], f.neg(c))));
        row
    })
    .checked()
}
