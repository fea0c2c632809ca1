//! Block algebras, the Albert-Frank algebras AF(a,b,n,p) and the algebra A.

use std::sync::Arc;

use crate::divpow::binom_int_mod_p;
use crate::error::{Error, Result};
use crate::lie::{AlgRef, LieAlgebra, LinearMap};
use crate::linalg::{unit_vec, BasisSolver, Matrix, SparseRow, Subspace};
use crate::scalar::{make_field, Elt, FieldRef};

/// Block's data: G = F_p^k indexed by codes sum c_i p^i, a shift delta in G,
/// and F_p-linear maps g, h : G -> K given by the images of the standard
/// basis of G.
#[derive(Clone, Debug)]
pub struct BlockSpec {
    pub field: FieldRef,
    pub k: u32,
    pub delta: Vec<u32>,
    pub g: Vec<Elt>,
    pub h: Vec<Elt>,
}

impl BlockSpec {
    fn validate(&self) -> Result<()> {
        let k = self.k as usize;
        let p = self.field.p();
        if k == 0 || self.delta.len() != k || self.g.len() != k || self.h.len() != k {
            return Err(Error::InvalidParameter("Block spec: delta, g, h need k coordinates".into()));
        }
        if self.delta.iter().any(|&d| d >= p) {
            return Err(Error::InvalidParameter("Block spec: delta coordinates must lie in F_p".into()));
        }
        let q = self.field.order();
        if self.g.iter().chain(&self.h).any(|&c| c >= q) {
            return Err(Error::InvalidParameter("Block spec: g, h images outside the field".into()));
        }
        if (p as u64).checked_pow(self.k).is_none_or(|s| s > 1 << 14) {
            return Err(Error::InvalidParameter("Block spec: G too large".into()));
        }
        Ok(())
    }

    pub fn group_order(&self) -> usize {
        (self.field.p() as usize).pow(self.k)
    }

    pub fn coords(&self, mut code: usize) -> Vec<u32> {
        let p = self.field.p() as usize;
        (0..self.k)
            .map(|_| {
                let c = (code % p) as u32;
                code /= p;
                c
            })
            .collect()
    }

    pub fn code(&self, coords: &[u32]) -> usize {
        let p = self.field.p() as usize;
        coords.iter().rev().fold(0, |acc, &c| acc * p + c as usize)
    }

    fn linear(&self, images: &[Elt], coords: &[u32]) -> Elt {
        let f = &self.field;
        coords.iter().zip(images).fold(0, |acc, (&c, &m)| f.add(acc, f.mul(f.from_int(c as i64), m)))
    }

    /// f(alpha, beta) = g(alpha) h(beta) - g(beta) h(alpha).
    pub fn f(&self, alpha: &[u32], beta: &[u32]) -> Elt {
        let fl = &self.field;
        let (ga, ha) = (self.linear(&self.g, alpha), self.linear(&self.h, alpha));
        let (gb, hb) = (self.linear(&self.g, beta), self.linear(&self.h, beta));
        fl.sub(fl.mul(ga, hb), fl.mul(gb, ha))
    }

    fn shift(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = self.field.p();
        a.iter().zip(b).zip(&self.delta).map(|((&x, &y), &d)| (x + y + p - d) % p).collect()
    }
}

/// The full algebra on all u_alpha, alpha in G, before restriction.
pub fn block_full(spec: &BlockSpec) -> Result<LieAlgebra> {
    spec.validate()?;
    let n = spec.group_order();
    let labels = (0..n).map(|a| format!("u_{:?}", spec.coords(a))).collect();
    let l = LieAlgebra::from_fn(&spec.field, labels, |i, j| {
        let (a, b) = (spec.coords(i), spec.coords(j));
        vec![(spec.code(&spec.shift(&a, &b)), spec.f(&a, &b))]
    });
    if l.is_abelian() {
        return Err(Error::InvalidParameter("Block spec: the bracket vanishes identically".into()));
    }
    l.checked()
}

/// The simple Block algebra: <u_alpha | alpha != 0> when delta = 0, and
/// [L, L] / <u_0> otherwise. In characteristic two [L, L] is spanned by the
/// u_alpha with alpha != delta; for odd p it is not spanned by basis vectors.
pub fn make_block(spec: &BlockSpec) -> Result<LieAlgebra> {
    let full = block_full(spec)?;
    let n = full.dim();
    let u0 = unit_vec(n, 0);
    if !full.center().contains(&u0) {
        return Err(Error::Check("u_0 is not central".into()));
    }
    if spec.delta.iter().all(|&d| d == 0) {
        let basis: Vec<Vec<Elt>> = (1..n).map(|a| unit_vec(n, a)).collect();
        return full.on_basis(&basis, full.labels()[1..].to_vec())?.checked();
    }
    let derived = full.derived_subalgebra();
    if !derived.contains(&u0) {
        return Err(Error::Check("u_0 is not a commutator".into()));
    }
    let labels = derived.pivots().iter().map(|&k| full.labels()[k].clone()).collect();
    let sub = full.on_basis(derived.basis(), labels)?;
    let solver = BasisSolver::new(full.field(), n, derived.basis())?;
    let z = solver.coords(&u0).expect("u_0 lies in [L, L]");
    sub.quotient(&Subspace::span(full.field(), sub.dim(), &[z]))?.checked()
}

/// Parameters of AF(a,b,n,p).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AFSpec {
    pub a: u32,
    pub b: u32,
    pub n: u32,
    pub p: u32,
}

impl AFSpec {
    pub fn new(a: u32, b: u32, n: u32, p: u32) -> Result<Self> {
        if !(a < b && b < n) {
            return Err(Error::InvalidParameter(format!("AF needs 0 <= a < b < n, got a={a}, b={b}, n={n}")));
        }
        if (p as u64).checked_pow(n).is_none_or(|q| q > 1 << 12) {
            return Err(Error::InvalidParameter("AF: p^n too large".into()));
        }
        make_field(p as u64, n)?;
        Ok(AFSpec { a, b, n, p })
    }

    pub fn field(&self) -> Result<FieldRef> {
        make_field(self.p as u64, self.n)
    }

    pub fn dim(&self) -> usize {
        (self.p as usize).pow(self.n) - 1
    }

    /// p^a + p^b
    pub fn shift(&self) -> u64 {
        (self.p as u64).pow(self.a) + (self.p as u64).pow(self.b)
    }

    /// Exponents (n1, n2) = (n - b + a, b - a) of the isomorphic Hamiltonian algebra.
    pub fn heights(&self) -> (u32, u32) {
        (self.n - self.b + self.a, self.b - self.a)
    }

    /// Whether the codimension-two subalgebra sum c_xi xi^{p^a} = sum c_xi xi^{p^b} = 0
    /// is expected to be maximal.
    pub fn codim_two_maximal_expected(&self) -> bool {
        let (n1, n2) = self.heights();
        !(self.p == 2 && (n1 == 1 || n2 == 1))
    }
}

/// AF(a,b,n,p) over F_{p^n} on e_xi, xi in F*, ordered by powers of the
/// primitive element.
#[allow(non_snake_case)]
pub fn make_AF(a: u32, b: u32, n: u32, p: u32) -> Result<LieAlgebra> {
    af_e_algebra(&AFSpec::new(a, b, n, p)?)
}

fn af_e_algebra(s: &AFSpec) -> Result<LieAlgebra> {
    let f = s.field()?;
    let xs = f.nonzero_by_powers().to_vec();
    let labels = xs.iter().map(|&x| format!("e_{{{}}}", f.format(x))).collect();
    let l = LieAlgebra::from_fn(&f, labels, |i, j| {
        let (x, y) = (xs[i], xs[j]);
        let t = f.add(x, y);
        if t == 0 {
            return Vec::new();
        }
        let c = f.sub(
            f.mul(f.frobenius(x, s.a), f.frobenius(y, s.b)),
            f.mul(f.frobenius(x, s.b), f.frobenius(y, s.a)),
        );
        vec![(f.log_of(t).expect("nonzero") as usize, c)]
    });
    l.checked()
}

/// AF(a,b,n,p) in both bases with the certified change of basis.
#[derive(Clone, Debug)]
pub struct AFUBasis {
    pub spec: AFSpec,
    /// e-basis algebra over F_{p^n}
    pub e_algebra: AlgRef,
    /// u-basis algebra over F_p
    pub u_algebra: AlgRef,
    /// e-basis -> u-basis coordinates, matrix over F_{p^n}
    pub to_u: LinearMap,
    /// D u_i = u_{i+1}
    pub derivation: Matrix,
}

/// The u-basis u_i = sum_xi xi^{i - p^a - p^b} e_xi, i = 0..p^n-2.
pub fn af_u_basis(a: u32, b: u32, n: u32, p: u32) -> Result<AFUBasis> {
    let spec = AFSpec::new(a, b, n, p)?;
    let e = Arc::new(af_e_algebra(&spec)?);
    let f = e.field().clone();
    let d = spec.dim();
    let m = d as u64;
    let xs = f.nonzero_by_powers().to_vec();
    let shift = spec.shift() % m;
    let us: Vec<Vec<Elt>> = (0..d as u64)
        .map(|i| {
            let ex = (i + m - shift) % m;
            xs.iter().map(|&x| f.pow0(x, ex)).collect()
        })
        .collect();
    let labels: Vec<String> = (0..d).map(|i| format!("u_{{{i}}}")).collect();
    let over_fq = e.on_basis(&us, labels.clone())?;
    let fp = make_field(p as u64, 1)?;
    let mut entries = Vec::new();
    for (i, j, row) in over_fq.table_entries() {
        if row.iter().any(|&(_, c)| !f.is_prime_field_element(c)) {
            return Err(Error::Check(format!("u-basis constant [u_{i}, u_{j}] outside F_p")));
        }
        entries.push((i, j, row.clone()));
    }
    let u = Arc::new(LieAlgebra::from_table(&fp, labels, &entries)?.checked()?);
    let basis = Matrix::from_columns(&f, d, &us)?;
    let inv = basis.inverse().ok_or_else(|| Error::Check("u-vectors are dependent".into()))?;
    let to_u = LinearMap::new(e.clone(), u.clone(), inv)?;
    let mut dm = Matrix::zeros(&fp, d, d);
    for i in 0..d {
        dm.set((i + 1) % d, i, 1);
    }
    Ok(AFUBasis { spec, e_algebra: e, u_algebra: u, to_u, derivation: dm })
}

impl AFUBasis {
    fn idx(&self, i: u64) -> usize {
        (i % self.spec.dim() as u64) as usize
    }

    /// First index j at which [u_{p^a+p^b}, u_j] disagrees with the
    /// presentation relations.
    pub fn presentation_failure(&self) -> Option<usize> {
        let u = &self.u_algebra;
        let f = u.field();
        let d = self.spec.dim();
        let (pa, pb) = ((self.spec.p as u64).pow(self.spec.a), (self.spec.p as u64).pow(self.spec.b));
        let z = self.idx(pa + pb);
        (0..d).find(|&j| {
            let got = u.bracket_basis(z, j);
            let want: SparseRow = if j == self.idx(pa) {
                vec![(self.idx(2 * pa + pb), f.neg(1))]
            } else if j == self.idx(pb) {
                vec![(self.idx(pa + 2 * pb), 1)]
            } else {
                Vec::new()
            };
            got != want
        })
    }

    /// Coordinates of u_i in the e-basis.
    pub fn u_vector(&self, i: usize) -> Vec<Elt> {
        let f = self.e_algebra.field();
        let m = self.spec.dim() as u64;
        let ex = (i as u64 + m - self.spec.shift() % m) % m;
        f.nonzero_by_powers().iter().map(|&x| f.pow0(x, ex)).collect()
    }
}

/// Both displayed forms of c(i,j,k,l), where [u_{iq+j}, u_{kq+l}] =
/// c u_{(i+k)q+(j+l)} in AF(0,n2,n1+n2,p) and q = p^{n2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AfsConstant {
    /// The long form, with C(m, k) = 0 whenever m < 0 or k < 0.
    pub full: u32,
    /// (-1)^{i+j} times the short form.
    pub simplified: u32,
}

/// Evaluate both forms of c(i,j,k,l). The short form is not valid when
/// i = k = p^{n1} or j = l = p^{n2}, where the bracket vanishes; see
/// [`afs_simplified_valid`].
pub fn afs_structure_constant(i: u32, j: u32, k: u32, l: u32, n1: u32, n2: u32, p: u32) -> Result<AfsConstant> {
    let p1 = (p as i64).pow(n1);
    let p2 = (p as i64).pow(n2);
    let (i, j, k, l) = (i as i64, j as i64, k as i64, l as i64);
    let inr = |a: i64, b: i64| a > 0 && a <= p1 && b > 0 && b <= p2 && (a, b) != (p1, p2);
    if !inr(i, j) || !inr(k, l) {
        return Err(Error::InvalidParameter(format!("c({i},{j},{k},{l}) out of range")));
    }
    let c = |a: i64, b: i64| if a < 0 { 0 } else { binom_int_mod_p(a, b, p) as i64 };
    let pm = p as i64;
    let full = -c(2 * p1 - i - k - 1, p1 - i) * c(2 * p2 - j - l - 1, p2 - j - 1)
        + c(2 * p1 - i - k - 1, p1 - i - 1) * c(2 * p2 - j - l - 1, p2 - j);
    let short = c(k, p1 - i) * c(l - 1, p2 - j - 1) - c(k - 1, p1 - i - 1) * c(l, p2 - j);
    let signed = if (i + j) % 2 == 0 { short } else { -short };
    Ok(AfsConstant { full: full.rem_euclid(pm) as u32, simplified: signed.rem_euclid(pm) as u32 })
}

/// False exactly on the tuples where the short form of c(i,j,k,l) breaks down.
pub fn afs_simplified_valid(i: u32, j: u32, k: u32, l: u32, n1: u32, n2: u32, p: u32) -> bool {
    let (p1, p2) = (p.pow(n1), p.pow(n2));
    !((i == p1 && k == p1) || (j == p2 && l == p2))
}

/// u-index iq + j reduced mod p^n - 1.
pub fn afs_index(i: u32, j: u32, n1: u32, n2: u32, p: u32) -> usize {
    let q = (p as u64).pow(n2);
    let m = (p as u64).pow(n1 + n2) - 1;
    ((i as u64 * q + j as u64) % m) as usize
}

/// The algebra A over F_q, q = p^{n2}, on f_{u,alpha}, (u,alpha) in
/// F_p x F_q minus (0,0), ordered by u then alpha code.
#[allow(non_snake_case)]
pub fn make_A(p: u32, n2: u32) -> Result<BlockA> {
    let f = make_field(p as u64, n2)?;
    let q = f.order();
    if p as u64 * q as u64 > 1 << 12 {
        return Err(Error::InvalidParameter("A too large".into()));
    }
    let index: Vec<(u32, Elt)> = (0..p).flat_map(|u| (0..q).map(move |a| (u, a))).filter(|&s| s != (0, 0)).collect();
    let pos = |u: u32, a: Elt| (u * q + a) as usize - 1;
    let labels = index.iter().map(|&(u, a)| format!("f_{{{},{}}}", u, f.format(a))).collect();
    let l = LieAlgebra::from_fn(&f, labels, |i, j| {
        let ((u, a), (v, b)) = (index[i], index[j]);
        let (s, t) = ((u + v) % p, f.add(a, b));
        if (s, t) == (0, 0) {
            return Vec::new();
        }
        let c = f.sub(f.mul(f.from_int(v as i64), a), f.mul(f.from_int(u as i64), b));
        vec![(pos(s, t), c)]
    })
    .checked()?;
    Ok(BlockA { p, n2, algebra: Arc::new(l), index })
}

/// A with its index set.
#[derive(Clone, Debug)]
pub struct BlockA {
    pub p: u32,
    pub n2: u32,
    pub algebra: AlgRef,
    pub index: Vec<(u32, Elt)>,
}

impl BlockA {
    pub fn field(&self) -> &FieldRef {
        self.algebra.field()
    }
    pub fn q(&self) -> u32 {
        self.field().order()
    }
    pub fn pos(&self, u: u32, a: Elt) -> Option<usize> {
        let q = self.q();
        (u < self.p && a < q && (u, a) != (0, 0)).then(|| (u * q + a) as usize - 1)
    }
    /// f_{u,alpha} as a coordinate vector; zero for (0,0).
    pub fn f_vec(&self, u: u32, a: Elt) -> Vec<Elt> {
        let mut v = vec![0; self.algebra.dim()];
        if let Some(i) = self.pos(u % self.p, a) {
            v[i] = 1;
        }
        v
    }
    /// x = f_{1,0}
    pub fn x(&self) -> Vec<Elt> {
        self.f_vec(1, 0)
    }
    /// y = sum_alpha f_{1,alpha}
    pub fn y(&self) -> Vec<Elt> {
        let mut v = vec![0; self.algebra.dim()];
        for a in 0..self.q() {
            v[self.pos(1, a).unwrap()] = 1;
        }
        v
    }
    /// The Block data G = F_p x F_q = F_p^{1+n2}, coordinate 0 being u, with
    /// f((u,alpha),(v,beta)) = v alpha - u beta and delta = 0.
    pub fn block_spec(&self) -> BlockSpec {
        let f = self.field().clone();
        let k = 1 + self.n2;
        let mut g = vec![0; k as usize];
        let mut h = vec![0; k as usize];
        h[0] = 1;
        for t in 0..self.n2 as usize {
            g[t + 1] = (self.p as Elt).pow(t as u32);
        }
        BlockSpec { field: f, k, delta: vec![0; k as usize], g, h }
    }
}

/// The derivations (D_id)^{p^s}: e_xi -> xi^{p^s} e_xi, 0 <= s < n, of
/// AF(a,b,n,p) in the e-basis.
pub fn af_frobenius_derivations(l: &LieAlgebra) -> Result<Vec<Matrix>> {
    let f = l.field().clone();
    if l.dim() != f.order() as usize - 1 {
        return Err(Error::DimensionMismatch { expected: f.order() as usize - 1, got: l.dim() });
    }
    let xs = f.nonzero_by_powers();
    Ok((0..f.n())
        .map(|s| {
            let mut d = Matrix::zeros(&f, l.dim(), l.dim());
            for (k, &x) in xs.iter().enumerate() {
                d.set(k, k, f.frobenius(x, s));
            }
            d
        })
        .collect())
}
