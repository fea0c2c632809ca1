//! Lie algebras given by structure constants, and linear maps between them.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{is_zero_vec, sparse_kernel, sparse_to_dense, unit_vec, BasisSolver, Matrix, SparseRow, Subspace};
use crate::par;
use crate::scalar::{Elt, Embedding, ExtField, FieldRef};

/// Seed for the word search in [`LieAlgebra::is_simple`].
pub const DEFAULT_SEED: u64 = 0x5eed_1e5e;

#[inline]
pub(crate) fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

pub(crate) fn canonical_row(f: &ExtField, mut row: SparseRow) -> SparseRow {
    row.sort_by_key(|&(k, _)| k);
    let mut out: SparseRow = Vec::with_capacity(row.len());
    for (k, c) in row {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc = f.add(*lc, c),
            _ => out.push((k, c)),
        }
    }
    out.retain(|&(_, c)| c != 0);
    out
}

/// A finite-dimensional algebra with an alternating bracket on a labelled
/// basis. Only the products [b_i, b_j] with i < j are stored.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    field: FieldRef,
    dim: usize,
    labels: Vec<String>,
    table: Vec<SparseRow>,
}

pub type AlgRef = Arc<LieAlgebra>;

/// Outcome of the simplicity test.
#[derive(Clone, Debug)]
pub struct Simplicity {
    pub simple: bool,
    /// A proper nonzero ideal when one exists and the algebra is not simple.
    pub witness: Option<Subspace>,
    pub reason: String,
}

impl LieAlgebra {
    /// Build from a bracket rule evaluated on all pairs i < j.
    pub fn from_fn<F>(field: &FieldRef, labels: Vec<String>, rule: F) -> Self
    where
        F: Fn(usize, usize) -> SparseRow + Sync + Send,
    {
        let dim = labels.len();
        let pairs = dim * dim.saturating_sub(1) / 2;
        let table = par::map_range(pairs, |idx| {
            let (i, j) = unpair(idx);
            canonical_row(field, rule(i, j))
        });
        LieAlgebra { field: field.clone(), dim, labels, table }
    }

    /// Build from explicit products. Entries with i > j are negated into
    /// i < j; conflicting or diagonal entries are rejected.
    pub fn from_table(field: &FieldRef, labels: Vec<String>, entries: &[(usize, usize, SparseRow)]) -> Result<Self> {
        let dim = labels.len();
        let mut table: Vec<Option<SparseRow>> = vec![None; dim * dim.saturating_sub(1) / 2];
        for (i, j, row) in entries {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim || row.iter().any(|&(k, c)| k >= dim || c >= field.order()) {
                return Err(Error::InvalidParameter(format!("table entry ({i},{j}) out of range")));
            }
            let row = canonical_row(field, row.clone());
            if i == j {
                if !row.is_empty() {
                    return Err(Error::Check(format!("[b{i},b{i}] must vanish")));
                }
                continue;
            }
            let (a, b, row) = if i < j { (i, j, row) } else { (j, i, neg_row(field, &row)) };
            let slot = &mut table[pair_index(a, b)];
            match slot {
                Some(old) if *old != row => {
                    return Err(Error::Check(format!("inconsistent products for ({a},{b})")));
                }
                _ => *slot = Some(row),
            }
        }
        Ok(LieAlgebra { field: field.clone(), dim, labels, table: table.into_iter().map(|r| r.unwrap_or_default()).collect() })
    }

    /// Fail unless the Jacobi identity holds.
    pub fn checked(self) -> Result<Self> {
        let bad = self.check_jacobi();
        if let Some(&(i, j, k)) = bad.first() {
            return Err(Error::Check(format!(
                "Jacobi fails on ({}, {}, {}) and {} other triples",
                self.labels[i],
                self.labels[j],
                self.labels[k],
                bad.len() - 1
            )));
        }
        Ok(self)
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Nonzero products [b_i, b_j], i < j, in pair order.
    pub fn table_entries(&self) -> impl Iterator<Item = (usize, usize, &SparseRow)> {
        self.table.iter().enumerate().filter(|(_, r)| !r.is_empty()).map(|(idx, r)| {
            let (i, j) = unpair(idx);
            (i, j, r)
        })
    }

    /// [b_i, b_j] as a sparse row.
    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseRow {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.table[pair_index(i, j)].clone(),
            std::cmp::Ordering::Equal => Vec::new(),
            std::cmp::Ordering::Greater => neg_row(&self.field, &self.table[pair_index(j, i)]),
        }
    }

    /// Coefficient of b_k in [b_i, b_j].
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Elt {
        let (a, b, neg) = match i.cmp(&j) {
            std::cmp::Ordering::Less => (i, j, false),
            std::cmp::Ordering::Equal => return 0,
            std::cmp::Ordering::Greater => (j, i, true),
        };
        let c = self.table[pair_index(a, b)].iter().find(|e| e.0 == k).map_or(0, |e| e.1);
        if neg {
            self.field.neg(c)
        } else {
            c
        }
    }

    #[inline]
    fn acc_basis(&self, acc: &mut [Elt], i: usize, j: usize, c: Elt) {
        if i == j || c == 0 {
            return;
        }
        let f = &*self.field;
        let (a, b, c) = if i < j { (i, j, c) } else { (j, i, f.neg(c)) };
        for &(k, s) in &self.table[pair_index(a, b)] {
            acc[k] = f.add(acc[k], f.mul(c, s));
        }
    }

    /// Bilinear extension of the table.
    pub fn bracket(&self, u: &[Elt], v: &[Elt]) -> Vec<Elt> {
        assert_eq!(u.len(), self.dim, "vector length");
        assert_eq!(v.len(), self.dim, "vector length");
        let f = &*self.field;
        let mut acc = vec![0; self.dim];
        for (i, &a) in u.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in v.iter().enumerate() {
                if b != 0 && i != j {
                    self.acc_basis(&mut acc, i, j, f.mul(a, b));
                }
            }
        }
        acc
    }

    /// Left-normed bracket [v_0, v_1, ..., v_k] = [[...[v_0, v_1], ...], v_k].
    pub fn bracket_word(&self, word: &[&[Elt]]) -> Vec<Elt> {
        let mut it = word.iter();
        let mut acc = it.next().map(|v| v.to_vec()).unwrap_or_else(|| vec![0; self.dim]);
        for v in it {
            acc = self.bracket(&acc, v);
        }
        acc
    }

    /// Matrix of ad(v): column j is [v, b_j].
    pub fn ad(&self, v: &[Elt]) -> Matrix {
        let mut m = Matrix::zeros(&self.field, self.dim, self.dim);
        for j in 0..self.dim {
            let mut col = vec![0; self.dim];
            for (i, &a) in v.iter().enumerate() {
                self.acc_basis(&mut col, i, j, a);
            }
            for (k, &c) in col.iter().enumerate() {
                m.set(k, j, c);
            }
        }
        m
    }

    pub fn ad_basis(&self, i: usize) -> Matrix {
        self.ad(&unit_vec(self.dim, i))
    }

    /// Violating triples i < j < k of the Jacobi identity, in lexicographic order.
    pub fn check_jacobi(&self) -> Vec<(usize, usize, usize)> {
        let n = self.dim;
        let f = &*self.field;
        let per_i = par::map_range(n, |i| {
            let mut bad = Vec::new();
            let mut acc = vec![0; n];
            for j in i + 1..n {
                for k in j + 1..n {
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (m, s) in self.bracket_basis(a, b) {
                            self.acc_basis(&mut acc, m, c, s);
                        }
                    }
                    if !is_zero_vec(&acc) {
                        bad.push((i, j, k));
                        acc.iter_mut().for_each(|x| *x = 0);
                    }
                }
            }
            let _ = f;
            bad
        });
        per_i.into_iter().flatten().collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|r| r.is_empty())
    }

    /// Span of all products.
    pub fn derived_subalgebra(&self) -> Subspace {
        let mut s = Subspace::zero(&self.field, self.dim);
        for r in &self.table {
            if !r.is_empty() && !s.is_full() {
                s.insert(&sparse_to_dense(self.dim, r));
            }
        }
        s
    }

    /// Common kernel of ad(b_i).
    pub fn center(&self) -> Subspace {
        let n = self.dim;
        let rows: Vec<SparseRow> = (0..n)
            .flat_map(|i| {
                let mut per_k: Vec<SparseRow> = vec![Vec::new(); n];
                for j in 0..n {
                    for (k, c) in self.bracket_basis(i, j) {
                        per_k[k].push((j, c));
                    }
                }
                per_k.into_iter().filter(|r| !r.is_empty())
            })
            .collect();
        let ker = sparse_kernel(&self.field, n, &rows);
        Subspace::span(&self.field, n, &ker.iter().map(|v| sparse_to_dense(n, v)).collect::<Vec<_>>())
    }

    /// Smallest ideal containing `s`.
    pub fn ideal_closure(&self, s: &Subspace) -> Subspace {
        self.spin(s.basis(), false)
    }

    /// Closure of the span of `seeds` under all ad(b_i), or under their
    /// transposes when `dual` is set.
    fn spin(&self, seeds: &[Vec<Elt>], dual: bool) -> Subspace {
        let n = self.dim;
        let mut s = Subspace::zero(&self.field, n);
        let mut queue: Vec<Vec<Elt>> = Vec::new();
        for v in seeds {
            if s.insert(v) {
                queue.push(v.clone());
            }
        }
        let f = &*self.field;
        while let Some(v) = queue.pop() {
            if s.is_full() {
                break;
            }
            for i in 0..n {
                let w = if dual {
                    // (ad b_i)^T v : entry j is sum_k v_k c_{ij}^k
                    (0..n)
                        .map(|j| {
                            self.bracket_basis(i, j).iter().fold(0, |acc, &(k, c)| f.add(acc, f.mul(v[k], c)))
                        })
                        .collect::<Vec<_>>()
                } else {
                    let mut acc = vec![0; n];
                    for (j, &a) in v.iter().enumerate() {
                        self.acc_basis(&mut acc, i, j, a);
                    }
                    acc
                };
                if s.insert(&w) {
                    queue.push(w);
                }
            }
        }
        s
    }

    /// Simplicity: perfect, and the adjoint module is irreducible.
    ///
    /// Irreducibility uses the null-space criterion: pick a singular element
    /// theta of the associative algebra generated by the ad(b_i). Every
    /// proper submodule either meets ker(theta) or has an annihilator that
    /// meets ker(theta^T), so spinning all projective points of both kernels
    /// decides the question. Candidates theta are drawn from short words in
    /// the ad-generators with a seeded generator, preferring nullity one.
    pub fn is_simple(&self, seed: u64) -> Result<Simplicity> {
        let n = self.dim;
        let f = &self.field;
        if n == 0 {
            return Err(Error::InvalidParameter("zero algebra".into()));
        }
        if self.is_abelian() {
            let witness = (n > 1).then(|| Subspace::span(f, n, &[unit_vec(n, 0)]));
            return Ok(Simplicity { simple: false, witness, reason: "abelian".into() });
        }
        let d = self.derived_subalgebra();
        if !d.is_full() {
            return Ok(Simplicity { simple: false, witness: Some(d), reason: "not perfect".into() });
        }
        let ads: Vec<Matrix> = (0..n).map(|i| self.ad_basis(i)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = f.order();
        let mut best: Option<(usize, Matrix)> = None;
        'search: for attempt in 0..64 {
            let rand_comb = |rng: &mut ChaCha8Rng| {
                let mut m = Matrix::zeros(f, n, n);
                for a in &ads {
                    let c: u32 = rng.gen_range(0..q);
                    if c != 0 {
                        m = m.add(&a.scale(c));
                    }
                }
                m
            };
            let x = rand_comb(&mut rng);
            let y = rand_comb(&mut rng);
            let mut theta = x.mul(&y).unwrap().add(&y);
            if attempt % 2 == 1 {
                theta = theta.mul(&x).unwrap().add(&x);
            }
            for mu in 0..q {
                let t = theta.sub(&Matrix::identity(f, n).scale(mu));
                let nullity = n - t.rank();
                if nullity == 0 {
                    continue;
                }
                if best.as_ref().is_none_or(|(k, _)| nullity < *k) {
                    best = Some((nullity, t));
                }
                if nullity == 1 {
                    break 'search;
                }
            }
        }
        let Some((k, theta)) = best else {
            return Err(Error::Check("no singular element found in the word search".into()));
        };
        let points = (q as u64).checked_pow(k as u32).map(|v| (v - 1) / (q as u64 - 1));
        if points.is_none_or(|p| p > 4096) {
            return Err(Error::Check(format!("smallest nullity found is {k}; exhaustive spin too large")));
        }
        for (dual, m) in [(false, theta.clone()), (true, theta.transpose())] {
            let ker = m.kernel();
            for v in projective_points(f, &ker) {
                let s = self.spin(&[v], dual);
                if !s.is_full() {
                    let witness = if dual { s.annihilator() } else { s };
                    return Ok(Simplicity { simple: false, witness: Some(witness), reason: "reducible adjoint module".into() });
                }
            }
        }
        Ok(Simplicity { simple: true, witness: None, reason: format!("irreducible (nullity {k} certificate)") })
    }

    /// Leibniz equations D[b_i,b_j] = [D b_i, b_j] + [b_i, D b_j] in the
    /// unknowns D[a][b] (coefficient of b_a in D b_b), variable a*dim + b.
    pub fn leibniz_rows(&self) -> Vec<SparseRow> {
        let n = self.dim;
        let f = &*self.field;
        // cols[j] lists (m, k, c) with c = coefficient of b_k in [b_m, b_j]
        let cols: Vec<Vec<(usize, usize, Elt)>> = (0..n)
            .map(|j| (0..n).flat_map(|m| self.bracket_basis(m, j).into_iter().map(move |(k, c)| (m, k, c))).collect())
            .collect();
        let per_i = par::map_range(n, |i| {
            let mut out = Vec::new();
            let mut per_k: Vec<SparseRow> = vec![Vec::new(); n];
            for j in i + 1..n {
                for &(m, c) in &self.table[pair_index(i, j)] {
                    for (k, row) in per_k.iter_mut().enumerate() {
                        row.push((k * n + m, c));
                    }
                }
                for &(m, k, c) in &cols[j] {
                    per_k[k].push((m * n + i, f.neg(c)));
                }
                // [b_i, b_m] = -[b_m, b_i]
                for &(m, k, c) in &cols[i] {
                    per_k[k].push((m * n + j, c));
                }
                for row in per_k.iter_mut() {
                    if !row.is_empty() {
                        let r = canonical_row(f, std::mem::take(row));
                        if !r.is_empty() {
                            out.push(r);
                        }
                    }
                }
            }
            out
        });
        per_i.into_iter().flatten().collect()
    }

    /// Der(L) as a subspace of flattened dim x dim matrices (row-major).
    pub fn derivation_space(&self) -> Subspace {
        let n = self.dim;
        let ker = sparse_kernel(&self.field, n * n, &self.leibniz_rows());
        Subspace::span(&self.field, n * n, &ker.iter().map(|v| sparse_to_dense(n * n, v)).collect::<Vec<_>>())
    }

    /// Span of the ad(b_i), flattened like [`Self::derivation_space`].
    pub fn inner_derivations(&self) -> Subspace {
        let n = self.dim;
        let v: Vec<Vec<Elt>> = (0..n).map(|i| self.ad_basis(i).data().to_vec()).collect();
        Subspace::span(&self.field, n * n, &v)
    }

    pub fn outer_dim(&self) -> usize {
        self.derivation_space().dim() - self.inner_derivations().dim()
    }

    /// First pair (i, j) with D[b_i,b_j] != [D b_i, b_j] + [b_i, D b_j].
    pub fn derivation_failure(&self, d: &Matrix) -> Option<(usize, usize)> {
        let n = self.dim;
        let f = &*self.field;
        let cols: Vec<Vec<Elt>> = (0..n).map(|j| d.column(j)).collect();
        par::find_first(n * n, |idx| {
            let (i, j) = (idx / n, idx % n);
            if i >= j {
                return None;
            }
            let lhs = d.mul_vec(&sparse_to_dense(n, &self.table[pair_index(i, j)]));
            let a = self.bracket(&cols[i], &unit_vec(n, j));
            let b = self.bracket(&unit_vec(n, i), &cols[j]);
            let rhs: Vec<Elt> = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect();
            (lhs != rhs).then_some((i, j))
        })
        .map(|(_, p)| p)
    }

    pub fn is_derivation(&self, d: &Matrix) -> bool {
        d.rows() == self.dim && d.cols() == self.dim && self.derivation_failure(d).is_none()
    }

    /// The same algebra with coefficients pushed through a field embedding.
    pub fn extend_scalars(&self, emb: &Embedding) -> Result<LieAlgebra> {
        if !emb.from.same_as(&self.field) {
            return Err(Error::FieldMismatch(self.field.order() as u64, emb.from.order() as u64));
        }
        let table = self.table.iter().map(|r| r.iter().map(|&(k, c)| (k, emb.apply(c))).collect()).collect();
        Ok(LieAlgebra { field: emb.to.clone(), dim: self.dim, labels: self.labels.clone(), table })
    }

    /// The subalgebra spanned by independent vectors closed under the
    /// bracket, presented on that basis.
    pub fn on_basis(&self, basis: &[Vec<Elt>], labels: Vec<String>) -> Result<LieAlgebra> {
        if basis.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: labels.len() });
        }
        let solver = BasisSolver::new(&self.field, self.dim, basis)?;
        let r = basis.len();
        let entries = par::map_range(r * r.saturating_sub(1) / 2, |idx| {
            let (i, j) = unpair(idx);
            let w = self.bracket(&basis[i], &basis[j]);
            solver.coords(&w).map(|c| {
                (i, j, c.into_iter().enumerate().filter(|(_, x)| *x != 0).collect::<SparseRow>())
            })
        });
        let mut table = Vec::with_capacity(entries.len());
        for (idx, e) in entries.into_iter().enumerate() {
            match e {
                Some((_, _, row)) => table.push(row),
                None => {
                    let (i, j) = unpair(idx);
                    return Err(Error::Check(format!("span not closed: [{},{}]", labels[i], labels[j])));
                }
            }
        }
        Ok(LieAlgebra { field: self.field.clone(), dim: r, labels, table })
    }

    /// L / I on the basis vectors outside the pivot columns of I.
    pub fn quotient(&self, ideal: &Subspace) -> Result<LieAlgebra> {
        let n = self.dim;
        let closure = self.ideal_closure(ideal);
        if closure.dim() != ideal.dim() {
            return Err(Error::Check("quotient by a subspace that is not an ideal".into()));
        }
        let mut is_piv = vec![false; n];
        for &p in ideal.pivots() {
            is_piv[p] = true;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| !is_piv[i]).collect();
        let mut pos = vec![usize::MAX; n];
        for (a, &i) in keep.iter().enumerate() {
            pos[i] = a;
        }
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(LieAlgebra::from_fn(&self.field, labels, |a, b| {
            let w = ideal.reduce(&sparse_to_dense(n, &self.bracket_basis(keep[a], keep[b])));
            w.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (pos[k], c)).collect()
        }))
    }
}

fn neg_row(f: &ExtField, r: &SparseRow) -> SparseRow {
    r.iter().map(|&(k, c)| (k, f.neg(c))).collect()
}

pub(crate) fn unpair(idx: usize) -> (usize, usize) {
    // j is the largest with j(j-1)/2 <= idx
    let mut j = (((8 * idx + 1) as f64).sqrt() as usize).div_ceil(2);
    while j * (j - 1) / 2 > idx {
        j -= 1;
    }
    while (j + 1) * j / 2 <= idx {
        j += 1;
    }
    (idx - j * (j - 1) / 2, j)
}

/// One representative of every one-dimensional subspace of span(basis):
/// vectors whose first nonzero coordinate is 1.
fn projective_points(f: &FieldRef, basis: &[Vec<Elt>]) -> Vec<Vec<Elt>> {
    let k = basis.len();
    let q = f.order() as u64;
    let mut out = Vec::new();
    for lead in 0..k {
        let rest = k - lead - 1;
        for code in 0..q.pow(rest as u32) {
            let mut v = basis[lead].clone();
            let mut c = code;
            for b in &basis[lead + 1..] {
                let a = (c % q) as Elt;
                c /= q;
                if a != 0 {
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = f.add(*x, f.mul(a, y));
                    }
                }
            }
            out.push(v);
        }
    }
    out
}

/// A linear map between algebras, with matrix entries in a field that
/// contains both coefficient fields.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub domain: AlgRef,
    pub codomain: AlgRef,
    pub matrix: Matrix,
}

/// Result of checking a map against the brackets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapCheck {
    /// First failing pair (i, j), i < j, in lexicographic order.
    pub failure: Option<(usize, usize)>,
    pub rank: usize,
    pub isomorphism: bool,
}

impl LinearMap {
    pub fn new(domain: AlgRef, codomain: AlgRef, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: codomain.dim() * domain.dim(), got: matrix.rows() * matrix.cols() });
        }
        Embedding::new(domain.field(), matrix.field())?;
        Embedding::new(codomain.field(), matrix.field())?;
        Ok(LinearMap { domain, codomain, matrix })
    }

    pub fn identity(l: &AlgRef) -> Self {
        LinearMap { domain: l.clone(), codomain: l.clone(), matrix: Matrix::identity(l.field(), l.dim()) }
    }

    pub fn field(&self) -> &FieldRef {
        self.matrix.field()
    }

    pub fn apply(&self, v: &[Elt]) -> Vec<Elt> {
        self.matrix.mul_vec(v)
    }

    /// The same map with its matrix over a larger field `k`.
    pub fn over(&self, k: &FieldRef) -> Result<LinearMap> {
        let matrix = self.matrix.embedded(&Embedding::new(self.field(), k)?)?;
        LinearMap::new(self.domain.clone(), self.codomain.clone(), matrix)
    }

    /// g after self.
    pub fn then(&self, g: &LinearMap) -> Result<LinearMap> {
        if !self.field().same_as(g.field()) {
            return Err(Error::FieldMismatch(self.field().order() as u64, g.field().order() as u64));
        }
        LinearMap::new(self.domain.clone(), g.codomain.clone(), g.matrix.mul(&self.matrix)?)
    }

    pub fn inverse(&self) -> Option<LinearMap> {
        let inv = self.matrix.inverse()?;
        Some(LinearMap { domain: self.codomain.clone(), codomain: self.domain.clone(), matrix: inv })
    }

    /// Domain and codomain with coefficients in the matrix field.
    pub fn lifted(&self) -> Result<(LieAlgebra, LieAlgebra)> {
        let k = self.field();
        let d = self.domain.extend_scalars(&Embedding::new(self.domain.field(), k)?)?;
        let c = self.codomain.extend_scalars(&Embedding::new(self.codomain.field(), k)?)?;
        Ok((d, c))
    }

    pub fn verify_homomorphism(&self) -> Result<Option<(usize, usize)>> {
        let (dom, cod) = self.lifted()?;
        let n = dom.dim();
        let images: Vec<Vec<Elt>> = (0..n).map(|j| self.matrix.column(j)).collect();
        Ok(par::find_first(n * n, |idx| {
            let (i, j) = (idx / n, idx % n);
            if i >= j {
                return None;
            }
            let lhs = self.matrix.mul_vec(&sparse_to_dense(n, &dom.table[pair_index(i, j)]));
            let rhs = cod.bracket(&images[i], &images[j]);
            (lhs != rhs).then_some((i, j))
        })
        .map(|(_, p)| p))
    }

    pub fn verify(&self) -> Result<MapCheck> {
        let failure = self.verify_homomorphism()?;
        let rank = self.matrix.rank();
        let isomorphism = failure.is_none() && rank == self.domain.dim() && rank == self.codomain.dim();
        Ok(MapCheck { failure, rank, isomorphism })
    }

    pub fn verify_isomorphism(&self) -> Result<bool> {
        Ok(self.verify()?.isomorphism)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::make_field;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("b{i}")).collect()
    }

    #[test]
    fn pair_roundtrip() {
        for j in 1..40 {
            for i in 0..j {
                assert_eq!(unpair(pair_index(i, j)), (i, j));
            }
        }
    }

    #[test]
    fn sl2_is_simple_over_f5() {
        let f = make_field(5, 1).unwrap();
        // e, h, f with [e,f]=h, [h,e]=2e, [h,f]=-2f
        let l = LieAlgebra::from_table(
            &f,
            vec!["e".into(), "h".into(), "f".into()],
            &[(0, 2, vec![(1, 1)]), (1, 0, vec![(0, 2)]), (1, 2, vec![(2, 3)])],
        )
        .unwrap()
        .checked()
        .unwrap();
        let s = l.is_simple(DEFAULT_SEED).unwrap();
        assert!(s.simple, "{}", s.reason);
        assert_eq!(l.outer_dim(), 0);
        assert_eq!(l.center().dim(), 0);
    }

    #[test]
    fn jacobi_violation_is_reported() {
        let f = make_field(3, 1).unwrap();
        let l = LieAlgebra::from_table(&f, labels(3), &[(0, 1, vec![(2, 1)]), (1, 2, vec![(0, 1)]), (0, 2, vec![(0, 1)])]).unwrap();
        assert_eq!(l.check_jacobi(), vec![(0, 1, 2)]);
        assert!(l.checked().is_err());
    }

    #[test]
    fn abelian_one_dim() {
        let f = make_field(2, 1).unwrap();
        let l = LieAlgebra::from_table(&f, labels(1), &[]).unwrap();
        assert_eq!(l.derivation_space().dim(), 1);
        assert_eq!(l.inner_derivations().dim(), 0);
    }

    #[test]
    fn zero_map_is_homomorphism_not_iso() {
        let f = make_field(5, 1).unwrap();
        let l = Arc::new(
            LieAlgebra::from_table(&f, vec!["e".into(), "h".into(), "f".into()], &[(0, 2, vec![(1, 1)]), (1, 0, vec![(0, 2)]), (1, 2, vec![(2, 3)])]).unwrap(),
        );
        let z = LinearMap::new(l.clone(), l.clone(), Matrix::zeros(&f, 3, 3)).unwrap();
        let c = z.verify().unwrap();
        assert_eq!(c.failure, None);
        assert!(!c.isomorphism);
        assert!(LinearMap::identity(&l).verify_isomorphism().unwrap());
    }
}
