//! Associative forms, skew and alternating derivations, 2-cocycles with
//! trivial coefficients, H^2, and central extensions.

use std::sync::Arc;

use crate::block::BlockA;
use crate::cartan::{Hamiltonian, Variant};
use crate::error::{Error, Result};
use crate::lie::{canonical_row, pair_index, unpair, AlgRef, LieAlgebra, LinearMap};
use crate::linalg::{sparse_kernel, sparse_to_dense, Matrix, SparseRow, Subspace};
use crate::par;
use crate::scalar::{Elt, Embedding, FieldRef};

/// A bilinear form on an algebra, `matrix[i][j] = lambda(b_i, b_j)`.
#[derive(Clone, Debug)]
pub struct BilinearForm {
    pub algebra: AlgRef,
    pub matrix: Matrix,
}

impl BilinearForm {
    pub fn new(algebra: AlgRef, matrix: Matrix) -> Result<Self> {
        let n = algebra.dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.rows() });
        }
        Ok(BilinearForm { algebra, matrix })
    }

    pub fn field(&self) -> &FieldRef {
        self.algebra.field()
    }

    pub fn eval(&self, u: &[Elt], v: &[Elt]) -> Elt {
        let f = self.field();
        let mv = self.matrix.mul_vec(v);
        u.iter().zip(&mv).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.matrix == self.matrix.transpose()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.matrix.rank() == self.algebra.dim()
    }

    /// First basis triple with lambda([b_i,b_j],b_k) != lambda(b_i,[b_j,b_k]).
    pub fn associativity_failure(&self) -> Option<(usize, usize, usize)> {
        let l = &self.algebra;
        let n = l.dim();
        let f = self.field();
        let lam = |row: &SparseRow, k: usize, left: bool| -> Elt {
            row.iter().fold(0, |acc, &(m, c)| {
                let e = if left { self.matrix.get(m, k) } else { self.matrix.get(k, m) };
                f.add(acc, f.mul(c, e))
            })
        };
        par::find_first(n, |i| {
            for j in 0..n {
                let ij = l.bracket_basis(i, j);
                for k in 0..n {
                    let jk = l.bracket_basis(j, k);
                    if lam(&ij, k, true) != lam(&jk, i, false) {
                        return Some((j, k));
                    }
                }
            }
            None
        })
        .map(|(i, (j, k))| (i, j, k))
    }

    /// Symmetric, associative and nondegenerate, or an error naming the
    /// first failure.
    pub fn certify(&self) -> Result<()> {
        if !self.is_symmetric() {
            return Err(Error::Check("form is not symmetric".into()));
        }
        if let Some((i, j, k)) = self.associativity_failure() {
            return Err(Error::Check(format!("form is not associative at ({i},{j},{k})")));
        }
        if !self.is_nondegenerate() {
            return Err(Error::Check("form is degenerate".into()));
        }
        Ok(())
    }
}

/// The associative form of H(2:n;omega_0) or H(2:n;omega_2) on monomials:
/// lambda(x^(i)y^(j), x^(k)y^(l)) = (-1)^{i+j} when i+k = p^{n1}-1 and
/// j+l = p^{n2}-1, and lambda(e, e) = 1 for omega_2.
pub fn assoc_form(h: &Hamiltonian) -> Result<BilinearForm> {
    if h.spec.extended {
        return Err(Error::InvalidParameter("no associative form on the extended algebra".into()));
    }
    let f = h.field();
    let n = h.dim();
    let (p1, p2) = (h.p1(), h.p2());
    let mut m = Matrix::zeros(f, n, n);
    for a in 0..n {
        let (i, j) = h.monomial(a);
        if let Some(b) = h.index(p1 - 1 - i, p2 - 1 - j) {
            m.set(a, b, if (i + j) % 2 == 0 { 1 } else { f.neg(1) });
        }
    }
    if h.spec.variant == Variant::Omega2 {
        let e = h.e_index().expect("omega_2 contains e");
        m.set(e, e, 1);
    }
    let form = BilinearForm::new(h.algebra.clone(), m)?;
    form.certify()?;
    Ok(form)
}

/// An alternating bilinear map L x L -> F, `matrix[i][j] = phi(b_i, b_j)`.
#[derive(Clone, Debug)]
pub struct Cocycle {
    pub algebra: AlgRef,
    pub matrix: Matrix,
}

impl Cocycle {
    /// Certifies that `matrix` is alternating and satisfies the cocycle
    /// identity.
    pub fn new(algebra: AlgRef, matrix: Matrix) -> Result<Self> {
        let c = Cocycle::unchecked(algebra, matrix)?;
        if !c.is_alternating() {
            return Err(Error::Check("not alternating".into()));
        }
        if let Some((i, j, k)) = c.identity_failure() {
            return Err(Error::Check(format!("cocycle identity fails at ({i},{j},{k})")));
        }
        Ok(c)
    }

    /// No certification; for building test inputs.
    pub fn unchecked(algebra: AlgRef, matrix: Matrix) -> Result<Self> {
        let n = algebra.dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.rows() });
        }
        if !matrix.field().same_as(algebra.field()) {
            return Err(Error::FieldMismatch(algebra.field().order() as u64, matrix.field().order() as u64));
        }
        Ok(Cocycle { algebra, matrix })
    }

    pub fn from_fn<F: Fn(usize, usize) -> Elt>(algebra: AlgRef, phi: F) -> Result<Self> {
        let n = algebra.dim();
        let mut m = Matrix::zeros(algebra.field(), n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, phi(i, j));
            }
        }
        Cocycle::new(algebra, m)
    }

    pub fn zero(algebra: &AlgRef) -> Self {
        let n = algebra.dim();
        Cocycle { algebra: algebra.clone(), matrix: Matrix::zeros(algebra.field(), n, n) }
    }

    pub fn field(&self) -> &FieldRef {
        self.algebra.field()
    }

    pub fn get(&self, i: usize, j: usize) -> Elt {
        self.matrix.get(i, j)
    }

    pub fn eval(&self, u: &[Elt], v: &[Elt]) -> Elt {
        let f = self.field();
        let mv = self.matrix.mul_vec(v);
        u.iter().zip(&mv).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    /// Nonzero entries (i, j, phi(b_i, b_j)) with i < j.
    pub fn entries(&self) -> Vec<(usize, usize, Elt)> {
        let n = self.algebra.dim();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter_map(|(i, j)| {
            let c = self.matrix.get(i, j);
            (c != 0).then_some((i, j, c))
        }).collect()
    }

    pub fn is_alternating(&self) -> bool {
        let n = self.algebra.dim();
        let f = self.field();
        (0..n).all(|i| self.matrix.get(i, i) == 0 && (i + 1..n).all(|j| self.matrix.get(j, i) == f.neg(self.matrix.get(i, j))))
    }

    /// First triple i < j < k violating
    /// phi([b_i,b_j],b_k) + phi([b_j,b_k],b_i) + phi([b_k,b_i],b_j) = 0.
    pub fn identity_failure(&self) -> Option<(usize, usize, usize)> {
        let l = &self.algebra;
        let n = l.dim();
        let f = self.field();
        let ev = |row: &SparseRow, k: usize| row.iter().fold(0, |acc, &(m, c)| f.add(acc, f.mul(c, self.matrix.get(m, k))));
        par::find_first(n, |i| {
            for j in i + 1..n {
                let ij = l.bracket_basis(i, j);
                for k in j + 1..n {
                    let s = f.add(f.add(ev(&ij, k), ev(&l.bracket_basis(j, k), i)), ev(&l.bracket_basis(k, i), j));
                    if s != 0 {
                        return Some((j, k));
                    }
                }
            }
            None
        })
        .map(|(i, (j, k))| (i, j, k))
    }

    pub fn add(&self, o: &Cocycle) -> Cocycle {
        Cocycle { algebra: self.algebra.clone(), matrix: self.matrix.add(&o.matrix) }
    }

    pub fn sub(&self, o: &Cocycle) -> Cocycle {
        Cocycle { algebra: self.algebra.clone(), matrix: self.matrix.sub(&o.matrix) }
    }

    pub fn scale(&self, c: Elt) -> Cocycle {
        Cocycle { algebra: self.algebra.clone(), matrix: self.matrix.scale(c) }
    }

    /// Entries i < j flattened in pair order.
    pub fn flatten(&self) -> Vec<Elt> {
        let n = self.algebra.dim();
        (0..n * n.saturating_sub(1) / 2)
            .map(|idx| {
                let (i, j) = unpair(idx);
                self.matrix.get(i, j)
            })
            .collect()
    }

    fn from_flat(algebra: &AlgRef, v: &[Elt]) -> Cocycle {
        let n = algebra.dim();
        let f = algebra.field();
        let mut m = Matrix::zeros(f, n, n);
        for (idx, &c) in v.iter().enumerate() {
            if c != 0 {
                let (i, j) = unpair(idx);
                m.set(i, j, c);
                m.set(j, i, f.neg(c));
            }
        }
        Cocycle { algebra: algebra.clone(), matrix: m }
    }

    /// The same cocycle on `target`, an algebra with the same structure
    /// constants over a larger field.
    pub fn extend_scalars(&self, target: &AlgRef) -> Result<Cocycle> {
        let emb = Embedding::new(self.field(), target.field())?;
        let n = self.algebra.dim();
        if target.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: target.dim() });
        }
        let mut m = Matrix::zeros(target.field(), n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, emb.apply(self.matrix.get(i, j)));
            }
        }
        Ok(Cocycle { algebra: target.clone(), matrix: m })
    }

    /// The coboundary (u, v) -> g([u, v]) of a linear functional g.
    pub fn coboundary(algebra: &AlgRef, g: &[Elt]) -> Cocycle {
        let n = algebra.dim();
        let f = algebra.field();
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in i + 1..n {
                let c = algebra.bracket_basis(i, j).iter().fold(0, |acc, &(k, c)| f.add(acc, f.mul(c, g[k])));
                m.set(i, j, c);
                m.set(j, i, f.neg(c));
            }
        }
        Cocycle { algebra: algebra.clone(), matrix: m }
    }
}

/// B^2(L, F) as a subspace of flattened cochains.
pub fn coboundaries(l: &AlgRef) -> Subspace {
    let n = l.dim();
    let vs: Vec<Vec<Elt>> = (0..n).map(|k| Cocycle::coboundary(l, &crate::linalg::unit_vec(n, k)).flatten()).collect();
    Subspace::span(l.field(), n * n.saturating_sub(1) / 2, &vs)
}

/// Whether a - b is a coboundary.
pub fn same_class(a: &Cocycle, b: &Cocycle) -> Result<bool> {
    if a.algebra.dim() != b.algebra.dim() || !a.field().same_as(b.field()) {
        return Err(Error::FieldMismatch(a.field().order() as u64, b.field().order() as u64));
    }
    Ok(coboundaries(&a.algebra).contains(&a.sub(b).flatten()))
}

/// Cocycle-identity rows over the unknowns phi(b_i, b_j), i < j.
fn cocycle_rows(l: &LieAlgebra) -> Vec<SparseRow> {
    let n = l.dim();
    let f = l.field();
    let term = |row: &mut SparseRow, bracket: SparseRow, k: usize| {
        for (m, c) in bracket {
            match m.cmp(&k) {
                std::cmp::Ordering::Less => row.push((pair_index(m, k), c)),
                std::cmp::Ordering::Greater => row.push((pair_index(k, m), f.neg(c))),
                std::cmp::Ordering::Equal => {}
            }
        }
    };
    par::map_range(n, |i| {
        let mut out = Vec::new();
        for j in i + 1..n {
            let ij = l.bracket_basis(i, j);
            for k in j + 1..n {
                let mut row = Vec::new();
                term(&mut row, ij.clone(), k);
                term(&mut row, l.bracket_basis(j, k), i);
                term(&mut row, l.bracket_basis(k, i), j);
                let row = canonical_row(f, row);
                if !row.is_empty() {
                    out.push(row);
                }
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Z^2(L, F): a basis of cocycles.
pub fn cocycle_space(l: &AlgRef) -> Vec<Cocycle> {
    let n = l.dim();
    let nvars = n * n.saturating_sub(1) / 2;
    sparse_kernel(l.field(), nvars, &cocycle_rows(l))
        .iter()
        .map(|v| Cocycle::from_flat(l, &sparse_to_dense(nvars, v)))
        .collect()
}

fn form_rows(l: &LieAlgebra, form: &BilinearForm, alternating: bool) -> Vec<SparseRow> {
    let n = l.dim();
    let f = l.field();
    let lam = &form.matrix;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i..n {
            // lambda(D b_i, b_j) + lambda(D b_j, b_i), or lambda(D b_i, b_i)
            let mut row: SparseRow = Vec::new();
            for a in 0..n {
                row.push((a * n + i, lam.get(a, j)));
                if i != j || !alternating {
                    row.push((a * n + j, lam.get(a, i)));
                }
            }
            row.retain(|&(_, c)| c != 0);
            let row = canonical_row(f, row);
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    rows
}

fn derivations_with(l: &LieAlgebra, form: &BilinearForm, alternating: bool) -> Subspace {
    let n = l.dim();
    let mut rows = l.leibniz_rows();
    rows.extend(form_rows(l, form, alternating));
    let ker = sparse_kernel(l.field(), n * n, &rows);
    Subspace::span(l.field(), n * n, &ker.iter().map(|v| sparse_to_dense(n * n, v)).collect::<Vec<_>>())
}

/// Derivations with lambda(D u, v) = -lambda(D v, u), flattened row-major.
pub fn skew_derivations(l: &LieAlgebra, form: &BilinearForm) -> Subspace {
    derivations_with(l, form, false)
}

/// Derivations with lambda(D u, u) = 0 for all u, flattened row-major.
pub fn alternating_derivations(l: &LieAlgebra, form: &BilinearForm) -> Subspace {
    derivations_with(l, form, true)
}

/// phi(D)(u, v) = lambda(D u, v).
pub fn cocycle_from_derivation(d: &Matrix, form: &BilinearForm) -> Result<Cocycle> {
    let l = &form.algebra;
    if !l.is_derivation(d) {
        return Err(Error::InvalidParameter("not a derivation".into()));
    }
    let m = d.transpose().mul(&form.matrix)?;
    Cocycle::new(l.clone(), m).map_err(|e| match e {
        Error::Check(s) if s == "not alternating" => Error::InvalidParameter("derivation is not alternating with respect to the form".into()),
        e => e,
    })
}

/// The derivation D with lambda(D u, v) = phi(u, v).
pub fn derivation_from_cocycle(phi: &Cocycle, form: &BilinearForm) -> Result<Matrix> {
    let inv = form.matrix.inverse().ok_or_else(|| Error::Check("form is degenerate".into()))?;
    let d = inv.mul(&phi.matrix.transpose())?;
    if !form.algebra.is_derivation(&d) {
        return Err(Error::Check("cocycle does not give a derivation".into()));
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationRoute {
    pub der: usize,
    pub inner: usize,
    pub skew: usize,
    pub alternating: usize,
}

#[derive(Clone, Debug)]
pub struct H2Report {
    pub z2: usize,
    pub b2: usize,
    pub h2: usize,
    /// Representatives of a basis of H^2.
    pub basis: Vec<Cocycle>,
    pub derivation_route: Option<DerivationRoute>,
}

/// dim H^2(L, F) with trivial coefficients as dim Z^2 - dim B^2; with a
/// nondegenerate associative form, cross-checked against alternating
/// derivations modulo inner ones.
pub fn h2_dimension(l: &AlgRef, form: Option<&BilinearForm>) -> Result<H2Report> {
    let z = cocycle_space(l);
    let b = coboundaries(l);
    let mut span = b.clone();
    let basis: Vec<Cocycle> = z.into_iter().filter(|c| span.insert(&c.flatten())).collect();
    let (z2, b2) = (b.dim() + basis.len(), b.dim());
    let derivation_route = match form {
        None => None,
        Some(form) => {
            form.certify()?;
            let route = DerivationRoute {
                der: l.derivation_space().dim(),
                inner: l.inner_derivations().dim(),
                skew: skew_derivations(l, form).dim(),
                alternating: alternating_derivations(l, form).dim(),
            };
            if route.alternating != z2 || route.inner != b2 {
                return Err(Error::Check(format!(
                    "derivation route disagrees: alternating {} vs Z^2 {}, inner {} vs B^2 {}",
                    route.alternating, z2, route.inner, b2
                )));
            }
            Some(route)
        }
    };
    Ok(H2Report { z2, b2, h2: z2 - b2, basis, derivation_route })
}

/// phi_r = phi((ad x)^{p^r}) on H(2:n;omega_2) in closed form:
/// (-1)^{i+j} when (i+k, j+l) is congruent to (0, p^r) modulo the vector
/// (p^{n1}-1, p^{n2}-1).
pub fn phi_r(h: &Hamiltonian, r: u32) -> Result<Cocycle> {
    closed_form_cocycle(h, r, h.spec.n2, false)
}

/// psi_s = phi((ad y)^{p^s}): (-1)^{i+j+1} when (i+k, j+l) = (p^s, 0).
pub fn psi_s(h: &Hamiltonian, s: u32) -> Result<Cocycle> {
    closed_form_cocycle(h, s, h.spec.n1, true)
}

fn closed_form_cocycle(h: &Hamiltonian, r: u32, top: u32, swap: bool) -> Result<Cocycle> {
    if h.spec.variant != Variant::Omega2 || h.spec.extended {
        return Err(Error::InvalidParameter("closed-form cocycles are defined on H(2:n;omega_2)".into()));
    }
    let p = h.spec.p;
    if p == 2 {
        return Err(Error::InvalidParameter("not alternating in characteristic two".into()));
    }
    if r == 0 || r > top {
        return Err(Error::InvalidParameter(format!("index {r} out of range 1..={top}")));
    }
    let f = h.field().clone();
    let (m1, m2) = (h.p1() as i64 - 1, h.p2() as i64 - 1);
    let pr = (p as i64).pow(r);
    let (t1, t2) = if swap { (pr, 0) } else { (0, pr) };
    Cocycle::from_fn(h.algebra.clone(), |a, b| {
        let ((i, j), (k, l)) = (h.monomial(a), h.monomial(b));
        let (d1, d2) = ((i + k) as i64 - t1, (j + l) as i64 - t2);
        if d1 * m2 == d2 * m1 && d1 % m1 == 0 {
            if (i + j + u32::from(swap)) % 2 == 0 {
                1
            } else {
                f.neg(1)
            }
        } else {
            0
        }
    })
}

/// The cocycles phi_r (1 <= r <= n2) and psi of the Block algebra A:
/// phi_r(f_{u,a}, f_{v,b}) = a^{p^r} if a + b = 0 and u + v = 0, and
/// psi(f_{u,a}, f_{v,b}) = u if u + v = 0.
pub fn a_cocycles(a: &BlockA) -> Result<Vec<Cocycle>> {
    if a.p == 2 {
        return Err(Error::InvalidParameter("not alternating in characteristic two".into()));
    }
    let f = a.field().clone();
    let p = a.p;
    let mut out = Vec::new();
    for r in 1..=a.n2 {
        out.push(Cocycle::from_fn(a.algebra.clone(), |i, j| {
            let ((u, x), (v, y)) = (a.index[i], a.index[j]);
            if (u + v) % p == 0 && f.add(x, y) == 0 {
                f.frobenius(x, r)
            } else {
                0
            }
        })?);
    }
    out.push(Cocycle::from_fn(a.algebra.clone(), |i, j| {
        let ((u, _), (v, _)) = (a.index[i], a.index[j]);
        if (u + v) % p == 0 {
            f.from_int(u as i64)
        } else {
            0
        }
    })?);
    Ok(out)
}

/// The cocycles (e_xi, e_eta) -> delta(xi+eta, 0) xi^{p^s}, 0 <= s < n, on
/// AF(a,b,n,p) in the e-basis (basis element k is e_xi with xi the k-th
/// power of the primitive element).
pub fn af_cocycles(l: &AlgRef) -> Result<Vec<Cocycle>> {
    let f = l.field().clone();
    if f.p() == 2 {
        return Err(Error::InvalidParameter("not alternating in characteristic two".into()));
    }
    if l.dim() != f.order() as usize - 1 {
        return Err(Error::DimensionMismatch { expected: f.order() as usize - 1, got: l.dim() });
    }
    let xs = f.nonzero_by_powers().to_vec();
    (0..f.n())
        .map(|s| {
            Cocycle::from_fn(l.clone(), |i, j| {
                if f.add(xs[i], xs[j]) == 0 {
                    f.frobenius(xs[i], s)
                } else {
                    0
                }
            })
        })
        .collect()
}

/// L extended by F^t, [u + z, v + z'] = [u, v] + sum_i phi_i(u, v) z_i.
pub fn central_extension(l: &AlgRef, cocycles: &[Cocycle]) -> Result<LieAlgebra> {
    let n = l.dim();
    for c in cocycles {
        if c.algebra.dim() != n || !c.field().same_as(l.field()) {
            return Err(Error::DimensionMismatch { expected: n, got: c.algebra.dim() });
        }
    }
    let mut labels = l.labels().to_vec();
    labels.extend((1..=cocycles.len()).map(|t| format!("z_{t}")));
    let ext = LieAlgebra::from_fn(l.field(), labels, |i, j| {
        if i >= n || j >= n {
            return Vec::new();
        }
        let mut row = l.bracket_basis(i, j);
        for (t, c) in cocycles.iter().enumerate() {
            let v = c.get(i, j);
            if v != 0 {
                row.push((n + t, v));
            }
        }
        row
    });
    ext.checked()
}

/// (u, v) -> phi(f(u), f(v)) for a certified isomorphism f into the algebra
/// of phi. The result lives on the domain with coefficients in the field of
/// the matrix of f.
pub fn pullback_cocycle(phi: &Cocycle, f: &LinearMap) -> Result<Cocycle> {
    if f.codomain.dim() != phi.algebra.dim() {
        return Err(Error::DimensionMismatch { expected: f.codomain.dim(), got: phi.algebra.dim() });
    }
    if !f.verify_isomorphism()? {
        return Err(Error::Check("map is not an isomorphism".into()));
    }
    let (dom, cod) = f.lifted()?;
    let phi = phi.extend_scalars(&Arc::new(cod))?;
    let m = f.matrix.transpose().mul(&phi.matrix)?.mul(&f.matrix)?;
    Cocycle::new(Arc::new(dom), m)
}
