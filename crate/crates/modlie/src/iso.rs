//! Explicit isomorphisms between Albert-Frank, Block and Hamiltonian
//! algebras, built as matrices and certified on every basis pair.

use std::sync::Arc;

use crate::block::{af_u_basis, make_A, make_AF, AFSpec, BlockA};
use crate::cartan::{make_H_omega2, Hamiltonian};
use crate::cohom::h2_dimension;
use crate::error::{Error, Result};
use crate::grading::{lemma_thin_grading, ThinLemma};
use crate::lie::{AlgRef, LieAlgebra, LinearMap};
use crate::linalg::{vec_scale, vec_sub, Matrix};
use crate::scalar::{make_field, Elt, Embedding, FieldRef};

/// What was checked when an isomorphism was certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub rank: usize,
    /// Basis pairs i < j on which the bracket was compared.
    pub pairs_checked: usize,
    /// Field of the matrix; both algebras are embedded into it.
    pub field: String,
    pub domain_field: String,
    pub codomain_field: String,
}

/// A linear map verified to be a Lie algebra isomorphism.
#[derive(Clone, Debug)]
pub struct CertifiedIso {
    pub map: LinearMap,
    pub certificate: Certificate,
}

impl CertifiedIso {
    /// Checks the map on all basis pairs and its rank. Fails with the first
    /// pair (lexicographic) whose bracket is not preserved.
    pub fn certify(map: LinearMap) -> Result<Self> {
        let check = map.verify()?;
        if !check.isomorphism {
            return Err(Error::NotIsomorphism { pair: check.failure, rank: check.rank });
        }
        let n = map.domain.dim();
        let certificate = Certificate {
            rank: check.rank,
            pairs_checked: n * n.saturating_sub(1) / 2,
            field: map.field().name(),
            domain_field: map.domain.field().name(),
            codomain_field: map.codomain.field().name(),
        };
        Ok(CertifiedIso { map, certificate })
    }

    pub fn domain(&self) -> &AlgRef {
        &self.map.domain
    }

    pub fn codomain(&self) -> &AlgRef {
        &self.map.codomain
    }

    pub fn inverse(&self) -> Result<CertifiedIso> {
        let inv = self.map.inverse().ok_or_else(|| Error::Check("certified map is singular".into()))?;
        CertifiedIso::certify(inv)
    }

    /// `g` after `self`, over the larger of the two matrix fields.
    pub fn then(&self, g: &CertifiedIso) -> Result<CertifiedIso> {
        let (a, b) = (self.map.field(), g.map.field());
        let k = if a.n() >= b.n() { a.clone() } else { b.clone() };
        CertifiedIso::certify(self.map.over(&k)?.then(&g.map.over(&k)?)?)
    }

    /// Simplicity, outer derivations and dim H^2 on both sides.
    pub fn transported_invariants(&self, seed: u64) -> Result<InvariantComparison> {
        let side = |l: &AlgRef| -> Result<(bool, usize, usize)> {
            Ok((l.is_simple(seed)?.simple, l.outer_dim(), h2_dimension(l, None)?.h2))
        };
        let (d, c) = (side(self.domain())?, side(self.codomain())?);
        Ok(InvariantComparison { simple: (d.0, c.0), outer_dim: (d.1, c.1), h2: (d.2, c.2) })
    }
}

/// Invariants of the domain and codomain of an isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariantComparison {
    pub simple: (bool, bool),
    pub outer_dim: (usize, usize),
    pub h2: (usize, usize),
}

impl InvariantComparison {
    pub fn agree(&self) -> bool {
        self.simple.0 == self.simple.1 && self.outer_dim.0 == self.outer_dim.1 && self.h2.0 == self.h2.1
    }
}

fn af_exponent(s: &AFSpec, i: u32, j: u32) -> u64 {
    let p = s.p as u64;
    (i as u64 * p.pow(s.b) + j as u64 * p.pow(s.a)) % s.dim() as u64
}

/// The map e_xi -> sum xi^{i p^b + j p^a} x^(i) y^(j) from AF(a,b,n,p) to
/// H(2:(n-b+a, b-a);omega_2), without certification.
pub fn sigma_map(a: u32, b: u32, n: u32, p: u32) -> Result<LinearMap> {
    let s = AFSpec::new(a, b, n, p)?;
    let (n1, n2) = s.heights();
    let af = Arc::new(make_AF(a, b, n, p)?);
    let h = make_H_omega2(p, n1, n2)?;
    let f = af.field().clone();
    let xs = f.nonzero_by_powers().to_vec();
    let mut m = Matrix::zeros(&f, h.dim(), af.dim());
    for (row, &(i, j)) in h.monomials().iter().enumerate() {
        let ex = af_exponent(&s, i, j);
        for (col, &x) in xs.iter().enumerate() {
            m.set(row, col, f.pow0(x, ex));
        }
    }
    LinearMap::new(af, h.algebra.clone(), m)
}

/// sigma for AF(a,b,n,p), certified.
pub fn sigma(a: u32, b: u32, n: u32, p: u32) -> Result<CertifiedIso> {
    CertifiedIso::certify(sigma_map(a, b, n, p)?)
}

/// The displayed inverse x^(i) y^(j) -> -sum_xi xi^{-i p^b - j p^a} e_xi.
pub fn sigma_inverse_displayed(a: u32, b: u32, n: u32, p: u32) -> Result<LinearMap> {
    let fwd = sigma_map(a, b, n, p)?;
    let s = AFSpec::new(a, b, n, p)?;
    let (n1, n2) = s.heights();
    let h = make_H_omega2(p, n1, n2)?;
    let f = fwd.field().clone();
    let xs = f.nonzero_by_powers().to_vec();
    let m64 = s.dim() as u64;
    let mut m = Matrix::zeros(&f, s.dim(), h.dim());
    for (col, &(i, j)) in h.monomials().iter().enumerate() {
        let ex = (m64 - af_exponent(&s, i, j)) % m64;
        for (row, &x) in xs.iter().enumerate() {
            m.set(row, col, f.neg(f.pow0(x, ex)));
        }
    }
    LinearMap::new(fwd.codomain.clone(), fwd.domain.clone(), m)
}

/// e_xi -> e_{xi^{p^a}} from AF(a,b,n,p) to AF(0,b-a,n,p).
pub fn frobenius_reduction(a: u32, b: u32, n: u32, p: u32) -> Result<CertifiedIso> {
    let src = Arc::new(make_AF(a, b, n, p)?);
    let dst = Arc::new(make_AF(0, b - a, n, p)?);
    let f = src.field().clone();
    let xs = f.nonzero_by_powers().to_vec();
    let mut m = Matrix::zeros(&f, dst.dim(), src.dim());
    for (col, &x) in xs.iter().enumerate() {
        m.set(f.log_of(f.frobenius(x, a))? as usize, col, 1);
    }
    CertifiedIso::certify(LinearMap::new(src, dst, m)?)
}

/// u_{iq+j} -> -x^(p^{n1}-i) y^(p^{n2}-j), q = p^{n2}, from the u-basis of
/// AF(0,n2,n1+n2,p) to H(2:(n1,n2);omega_2), both over F_p.
pub fn u_to_monomials(n1: u32, n2: u32, p: u32) -> Result<CertifiedIso> {
    let ub = af_u_basis(0, n2, n1 + n2, p)?;
    let h = make_H_omega2(p, n1, n2)?;
    let f = h.field().clone();
    let (p1, p2) = (h.p1(), h.p2());
    let m64 = ub.spec.dim() as u64;
    let mut m = Matrix::zeros(&f, h.dim(), ub.spec.dim());
    for i in 1..=p1 {
        for j in 1..=p2 {
            if (i, j) == (p1, p2) {
                continue;
            }
            let col = ((i as u64 * p2 as u64 + j as u64) % m64) as usize;
            let row = h.index(p1 - i, p2 - j).expect("in range");
            m.set(row, col, f.neg(1));
        }
    }
    CertifiedIso::certify(LinearMap::new(ub.u_algebra.clone(), h.algebra.clone(), m)?)
}

/// The field F_{q^2} (F_q when p = 2) over which tau is defined, and the
/// first element epsilon with epsilon^{q-1} = -1.
pub fn tau_epsilon(p: u32, n2: u32) -> Result<(FieldRef, Elt)> {
    let k = make_field(p as u64, if p == 2 { n2 } else { 2 * n2 })?;
    let q = (p as u64).pow(n2);
    let minus_one = k.neg(1);
    let eps = (1..k.order()).find(|&e| k.pow0(e, q - 1) == minus_one).ok_or_else(|| Error::Check("no epsilon".into()))?;
    Ok((k, eps))
}

/// Both displayed forms of tau, certified.
#[derive(Clone, Debug)]
pub struct Tau {
    pub block: BlockA,
    pub lemma: ThinLemma,
    pub epsilon: Elt,
    /// A -> H(2:(1,n2);omega_2) on the basis e_{k,alpha}, ē_{1,alpha}.
    pub e_form: CertifiedIso,
    /// A -> H(2:(1,n2);omega_2) on divided-power monomials.
    pub dp_form: CertifiedIso,
}

impl Tau {
    pub fn field(&self) -> &FieldRef {
        self.e_form.map.field()
    }

    /// Whether the two forms agree after the change of basis of the lemma.
    pub fn forms_agree(&self) -> Result<bool> {
        let to_new = self.lemma.to_new.over(self.field())?;
        Ok(to_new.matrix.mul(&self.dp_form.map.matrix)? == self.e_form.map.matrix)
    }
}

/// tau(f_{alpha,beta}) = -sum_k beta^{1-k} epsilon^k e_{k,alpha} + epsilon ē_{1,alpha}
/// for beta != 0 and tau(f_{alpha,0}) = epsilon ē_{1,alpha}.
fn tau_e_matrix(a: &BlockA, t: &ThinLemma, k: &FieldRef, eps: Elt) -> Result<Matrix> {
    let emb = Embedding::new(a.field(), k)?;
    let q = a.q();
    let mut m = Matrix::zeros(k, t.algebra.dim(), a.algebra.dim());
    for (col, &(u, beta)) in a.index.iter().enumerate() {
        if beta != 0 {
            let b = emb.apply(beta);
            for kk in 1..q as i64 {
                let c = k.neg(k.mul(k.pow_signed(b, 1 - kk)?, k.pow0(eps, kk as u64)));
                let row = t.e(kk, u);
                m.set(row, col, k.add(m.get(row, col), c));
            }
        }
        if let Some(row) = t.ebar(u) {
            m.set(row, col, k.add(m.get(row, col), eps));
        }
    }
    Ok(m)
}

/// The divided-power form of tau with a given epsilon.
fn tau_dp_matrix(a: &BlockA, h: &Hamiltonian, k: &FieldRef, eps: Elt) -> Result<Matrix> {
    let emb = Embedding::new(a.field(), k)?;
    let (p, q) = (a.p, a.q());
    let mut m = Matrix::zeros(k, h.dim(), a.algebra.dim());
    let ieps = k.inv(eps)?;
    for (col, &(u, beta)) in a.index.iter().enumerate() {
        let alpha = k.from_int(u as i64);
        let mut add = |i: u32, j: u32, c: Elt| {
            let row = h.index(i, j).expect("in range");
            m.set(row, col, k.add(m.get(row, col), c));
        };
        if u != 0 {
            for i in 1..p {
                let c = k.mul(eps, k.pow0(alpha, i as u64));
                add(i, 0, c);
                add(i, q - 1, k.neg(k.mul(c, k.from_int(i as i64))));
            }
        }
        if beta != 0 {
            let b = emb.apply(beta);
            for j in 1..q {
                let c = k.mul(k.pow0(ieps, j as u64 - 1), k.pow0(b, j as u64));
                add(p - 1, j, k.mul(c, k.from_int(j as i64)));
                for i in 0..p {
                    add(i, j, k.mul(c, k.pow0(alpha, i as u64)));
                }
            }
        }
    }
    Ok(m)
}

/// tau: A -> H(2:(1,n2);omega_2) over F_{q^2} (over F_q when p = 2).
pub fn tau(p: u32, n2: u32) -> Result<Tau> {
    let block = make_A(p, n2)?;
    let lemma = lemma_thin_grading(p, 1, n2)?;
    let (k, epsilon) = tau_epsilon(p, n2)?;
    let e = tau_e_matrix(&block, &lemma, &k, epsilon)?;
    let e_form = CertifiedIso::certify(LinearMap::new(block.algebra.clone(), lemma.algebra.clone(), e)?)?;
    let h = &lemma.hamiltonian;
    let dp = tau_dp_matrix(&block, h, &k, epsilon)?;
    let dp_form = CertifiedIso::certify(LinearMap::new(block.algebra.clone(), h.algebra.clone(), dp)?)?;
    Ok(Tau { block, lemma, epsilon, e_form, dp_form })
}

/// The divided-power formulas with epsilon = 1 over F_q, uncertified.
pub fn tau_untwisted(p: u32, n2: u32) -> Result<LinearMap> {
    let block = make_A(p, n2)?;
    let h = make_H_omega2(p, 1, n2)?;
    let k = block.field().clone();
    let m = tau_dp_matrix(&block, &h, &k, 1)?;
    LinearMap::new(block.algebra.clone(), h.algebra.clone(), m)
}

/// [u, z, z, ..., z] with `k` copies of z.
pub fn ad_power(l: &LieAlgebra, u: &[Elt], z: &[Elt], k: usize) -> Vec<Elt> {
    let mut acc = u.to_vec();
    for _ in 0..k {
        acc = l.bracket(&acc, z);
    }
    acc
}

/// First failing word identity for A = A(p, n2): [y, x^{j-1}] =
/// sum_alpha alpha^{j-1} f_{j,alpha} for 1 <= j <= p(q-1)+1,
/// v_{l-1} = [y, x^{l(q-1)-1}] = sum_{alpha != 0} alpha^{-1} f_{-l,alpha} and
/// [v_{l-1}, y] = (l-1) sum_gamma f_{1-l,gamma} for 1 <= l <= p,
/// [y, x^{p(q-1)}] = y - x and [y, x^{p(q-1)-1}, y] = -y.
pub fn a_word_identity_failure(a: &BlockA) -> Option<String> {
    let l = &a.algebra;
    let f = a.field();
    let (p, q) = (a.p, a.q());
    let (x, y) = (a.x(), a.y());
    let fsum = |u: i64, coef: &dyn Fn(Elt) -> Elt| -> Vec<Elt> {
        let u = u.rem_euclid(p as i64) as u32;
        let mut v = vec![0; l.dim()];
        for al in 0..q {
            if let Some(i) = a.pos(u, al) {
                v[i] = f.add(v[i], coef(al));
            }
        }
        v
    };
    let mut w = y.clone();
    let top = (p * (q - 1)) as usize;
    for j in 1..=top + 1 {
        let want = fsum(j as i64, &|al| f.pow0(al, j as u64 - 1));
        if w != want {
            return Some(format!("[y, x^{}]", j - 1));
        }
        w = l.bracket(&w, &x);
    }
    for lam in 1..=p as i64 {
        let v = ad_power(l, &y, &x, (lam * (q as i64 - 1) - 1) as usize);
        let want = fsum(-lam, &|al| if al == 0 { 0 } else { f.inv(al).expect("nonzero") });
        if v != want {
            return Some(format!("v_{}", lam - 1));
        }
        let lm1 = f.from_int(lam - 1);
        if l.bracket(&v, &y) != fsum(1 - lam, &|_| lm1) {
            return Some(format!("[v_{}, y]", lam - 1));
        }
    }
    if ad_power(l, &y, &x, top) != vec_sub(f, &y, &x) {
        return Some("[y, x^{p(q-1)}] = y - x".into());
    }
    if l.bracket(&ad_power(l, &y, &x, top - 1), &y) != vec_scale(f, f.neg(1), &y) {
        return Some("[y, x^{p(q-1)-1}, y] = -y".into());
    }
    None
}

/// First failing word identity in the lemma algebra L (n1 = 1) with
/// X = ē_{1,1}, Y = e_{1,1}: {Y, X^{j-1}} = (-1)^{floor((j-1)/(q-1))}
/// (e_{j,j} - delta ē_{j,j}) for 1 < j <= p(q-1)+1,
/// V_{l-1} = (-1)^{l-1} e_{0,-l}, {V_{l-1}, Y} = (-1)^l (l-1) e_{1,1-l},
/// {Y, X^{p(q-1)}} = -Y + X and {Y, X^{p(q-1)-1}, Y} = Y.
pub fn l_word_identity_failure(t: &ThinLemma) -> Result<Option<String>> {
    if t.hamiltonian.spec.n1 != 1 {
        return Err(Error::InvalidParameter("word identities need n1 = 1".into()));
    }
    let l = &t.algebra;
    let f = &t.field;
    let (p, q) = (t.p1() as i64, t.p2() as i64);
    let ebar1 = t.ebar(1).expect("p > 1");
    let xv = crate::linalg::unit_vec(l.dim(), ebar1);
    let yv = t.e_vec(1, 1);
    let sign = |k: i64| if k % 2 == 0 { 1 } else { f.neg(1) };
    let alpha = |k: i64| f.from_int(k);
    let top = (p * (q - 1)) as usize;
    let mut w = l.bracket(&yv, &xv);
    for j in 2..=top as i64 + 1 {
        let mut want = t.e_vec(j, alpha(j));
        if (j - 1) % (q - 1) == 0 {
            want = vec_sub(f, &want, &t.ebar_vec(alpha(j)));
        }
        if w != vec_scale(f, sign((j - 1) / (q - 1)), &want) {
            return Ok(Some(format!("{{Y, X^{}}}", j - 1)));
        }
        w = l.bracket(&w, &xv);
    }
    for lam in 1..=p {
        let v = ad_power(l, &yv, &xv, (lam * (q - 1) - 1) as usize);
        if v != vec_scale(f, sign(lam - 1), &t.e_vec(0, alpha(-lam))) {
            return Ok(Some(format!("V_{}", lam - 1)));
        }
        let want = vec_scale(f, f.mul(sign(lam), alpha(lam - 1)), &t.e_vec(1, alpha(1 - lam)));
        if l.bracket(&v, &yv) != want {
            return Ok(Some(format!("{{V_{}, Y}}", lam - 1)));
        }
    }
    if ad_power(l, &yv, &xv, top) != vec_sub(f, &xv, &yv) {
        return Ok(Some("{Y, X^{p(q-1)}} = -Y + X".into()));
    }
    if l.bracket(&ad_power(l, &yv, &xv, top - 1), &yv) != yv {
        return Ok(Some("{Y, X^{p(q-1)-1}, Y} = Y".into()));
    }
    Ok(None)
}

/// First j >= 2 (up to p(q-1)+1) where tau([y, x^{j-2}, z]) differs from
/// epsilon^j {Y, X^{j-2}, Z} for z = x or y, with tau in the e-form.
pub fn tau_word_failure(t: &Tau) -> Result<Option<usize>> {
    let k = t.field().clone();
    let a = &t.block;
    let emb = Embedding::new(a.field(), &k)?;
    let (dom, cod) = t.e_form.map.lifted()?;
    let lift = |v: Vec<Elt>| -> Vec<Elt> { v.iter().map(|&c| emb.apply(c)).collect() };
    let (x, y) = (lift(a.x()), lift(a.y()));
    let xx = crate::linalg::unit_vec(cod.dim(), t.lemma.ebar(1).expect("p > 1"));
    let yy = t.lemma.e_vec(1, 1);
    let top = (a.p * (a.q() - 1)) as usize;
    let (mut wa, mut wl) = (y.clone(), yy.clone());
    for j in 2..=top + 1 {
        let e = k.pow0(t.epsilon, j as u64);
        for (z, zz) in [(&x, &xx), (&y, &yy)] {
            let lhs = t.e_form.map.apply(&dom.bracket(&wa, z));
            if lhs != vec_scale(&k, e, &cod.bracket(&wl, zz)) {
                return Ok(Some(j));
            }
        }
        wa = dom.bracket(&wa, &x);
        wl = cod.bracket(&wl, &xx);
    }
    Ok(None)
}
