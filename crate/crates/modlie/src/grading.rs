//! Gradings of Hamiltonian algebras by abelian groups: the A-grading of
//! H(2:n;omega_2), its cyclic specializations, and the
//! Z/(p^{n2}-1) x F_{p^{n1}} grading on the basis e_{k,alpha}, ē_{1,alpha}.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::cartan::{Hamiltonian, Variant};
use crate::divpow::binom_mod_p;
use crate::error::{Error, Result};
use crate::lie::{AlgRef, LinearMap};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::{make_field, Elt, Embedding, FieldRef};

pub type Degree = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// Z^2 / <rel>, with rel[0] > 0.
    Lattice { rel: [i64; 2] },
    /// Z/N_1 x ... x Z/N_t.
    Finite { factors: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingGroup {
    pub kind: GroupKind,
    /// Distinguished generator playing the role of 1 in a cyclic group.
    pub generator: Option<Degree>,
}

impl GradingGroup {
    pub fn cyclic(n: u64) -> Self {
        GradingGroup { kind: GroupKind::Finite { factors: vec![n] }, generator: Some(vec![1]) }
    }

    pub fn canon(&self, d: &[i64]) -> Degree {
        match &self.kind {
            GroupKind::Lattice { rel } => {
                let t = d[0].div_euclid(rel[0]);
                vec![d[0] - t * rel[0], d[1] - t * rel[1]]
            }
            GroupKind::Finite { factors } => d.iter().zip(factors).map(|(&x, &n)| x.rem_euclid(n as i64)).collect(),
        }
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Degree {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.canon(&s)
    }

    pub fn zero(&self) -> Degree {
        match &self.kind {
            GroupKind::Lattice { .. } => vec![0, 0],
            GroupKind::Finite { factors } => vec![0; factors.len()],
        }
    }

    pub fn order(&self) -> Option<u64> {
        match &self.kind {
            GroupKind::Lattice { .. } => None,
            GroupKind::Finite { factors } => Some(factors.iter().product()),
        }
    }

    /// k times the generator.
    pub fn multiple(&self, k: i64) -> Option<Degree> {
        let g = self.generator.as_ref()?;
        Some(self.canon(&g.iter().map(|&x| x * k).collect::<Vec<_>>()))
    }

    /// Position of each multiple of the generator, when the generator
    /// generates the whole (finite) group.
    pub fn cyclic_positions(&self) -> Option<HashMap<Degree, u64>> {
        let n = self.order()?;
        let mut map = HashMap::new();
        for k in 0..n {
            if map.insert(self.multiple(k as i64)?, k).is_some() {
                return None;
            }
        }
        Some(map)
    }
}

/// A grading of an algebra by its basis: basis element b has degree
/// `degree[b]`.
#[derive(Clone, Debug)]
pub struct Grading {
    pub algebra: AlgRef,
    pub group: GradingGroup,
    pub degree: Vec<Degree>,
}

impl Grading {
    pub fn new(algebra: AlgRef, group: GradingGroup, degree: Vec<Degree>) -> Result<Self> {
        if degree.len() != algebra.dim() {
            return Err(Error::DimensionMismatch { expected: algebra.dim(), got: degree.len() });
        }
        let degree = degree.iter().map(|d| group.canon(d)).collect();
        let g = Grading { algebra, group, degree };
        if let Some((i, j)) = g.check_graded() {
            return Err(Error::Check(format!(
                "not graded: [{}, {}]",
                g.algebra.labels()[i],
                g.algebra.labels()[j]
            )));
        }
        Ok(g)
    }

    /// First pair (i, j) whose bracket has a component outside degree
    /// deg(i) + deg(j).
    pub fn check_graded(&self) -> Option<(usize, usize)> {
        self.algebra.table_entries().find_map(|(i, j, row)| {
            let d = self.group.add(&self.degree[i], &self.degree[j]);
            row.iter().any(|&(k, _)| self.degree[k] != d).then_some((i, j))
        })
    }

    /// Basis indices of each nonzero component.
    pub fn components(&self) -> BTreeMap<Degree, Vec<usize>> {
        let mut m: BTreeMap<Degree, Vec<usize>> = BTreeMap::new();
        for (b, d) in self.degree.iter().enumerate() {
            m.entry(d.clone()).or_default().push(b);
        }
        m
    }

    pub fn component(&self, d: &[i64]) -> Vec<usize> {
        let d = self.group.canon(d);
        (0..self.degree.len()).filter(|&b| self.degree[b] == d).collect()
    }

    /// For a cyclic grading with a generator: components indexed by
    /// k = 0..N-1, L_k being the component of degree k times the generator.
    pub fn cyclic_components(&self) -> Result<Vec<Vec<usize>>> {
        let pos = self
            .group
            .cyclic_positions()
            .ok_or_else(|| Error::InvalidParameter("grading group is not cyclic on its generator".into()))?;
        let mut out = vec![Vec::new(); pos.len()];
        for (b, d) in self.degree.iter().enumerate() {
            out[pos[d] as usize].push(b);
        }
        Ok(out)
    }

    /// Cyclic degree of each basis element.
    pub fn cyclic_degrees(&self) -> Result<Vec<u64>> {
        let pos = self
            .group
            .cyclic_positions()
            .ok_or_else(|| Error::InvalidParameter("grading group is not cyclic on its generator".into()))?;
        Ok(self.degree.iter().map(|d| pos[d]).collect())
    }

    /// dim of the component of each cyclic degree.
    pub fn cyclic_dims(&self) -> Result<Vec<usize>> {
        Ok(self.cyclic_components()?.iter().map(|c| c.len()).collect())
    }
}

/// The A-grading of H(2:n;omega_2): deg x^(i)y^(j) = (i-1, j-1) in
/// Z^2 / <(p^{n1}-1, p^{n2}-1)>.
pub fn a_grading(h: &Hamiltonian) -> Result<Grading> {
    if h.spec.variant != Variant::Omega2 || h.spec.extended {
        return Err(Error::InvalidParameter("the A-grading is defined on H(2:n;omega_2)".into()));
    }
    let rel = [h.p1() as i64 - 1, h.p2() as i64 - 1];
    let group = GradingGroup { kind: GroupKind::Lattice { rel }, generator: None };
    let degree = h.monomials().iter().map(|&(i, j)| vec![i as i64 - 1, j as i64 - 1]).collect();
    Grading::new(h.algebra.clone(), group, degree)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Compose the A-grading with mu(i,j) = Ri + Sj mod N,
/// N = |R(p^{n1}-1) + S(p^{n2}-1)|.
pub fn specialize(g: &Grading, r: i64, s: i64) -> Result<Grading> {
    let GroupKind::Lattice { rel } = g.group.kind else {
        return Err(Error::InvalidParameter("specialize expects the A-grading".into()));
    };
    let n = (r * rel[0] + s * rel[1]).abs();
    if n == 0 {
        return Err(Error::DegenerateSpecialization);
    }
    if gcd(r, s) != 1 {
        return Err(Error::InvalidParameter(format!("R = {r} and S = {s} are not coprime")));
    }
    let degree = g.degree.iter().map(|d| vec![(r * d[0] + s * d[1]).rem_euclid(n)]).collect();
    Grading::new(g.algebra.clone(), GradingGroup::cyclic(n as u64), degree)
}

/// The grading L~_i = L_{ki} of a cyclic grading, for k invertible mod N.
pub fn deflate(g: &Grading, k: u64) -> Result<Grading> {
    let n = g.group.order().filter(|_| g.group.generator.is_some()).ok_or_else(|| Error::InvalidParameter("deflate expects a cyclic grading".into()))?;
    let inv = (1..n).find(|&x| (x as u128 * k as u128) % n as u128 == 1).ok_or_else(|| Error::InvalidParameter(format!("{k} is not invertible mod {n}")))?;
    let degrees = g.cyclic_degrees()?;
    let degree = degrees.iter().map(|&d| vec![((d as u128 * inv as u128) % n as u128) as i64]).collect();
    Grading::new(g.algebra.clone(), GradingGroup::cyclic(n), degree)
}

/// Whether D maps every component L_k onto L_{k+1}.
pub fn derivation_agrees(d: &Matrix, g: &Grading) -> Result<bool> {
    let comps = g.cyclic_components()?;
    let n = comps.len();
    let degrees = g.cyclic_degrees()?;
    for (k, comp) in comps.iter().enumerate() {
        let next = (k + 1) % n;
        let images: Vec<Vec<Elt>> = comp.iter().map(|&b| d.column(b)).collect();
        for v in &images {
            if v.iter().enumerate().any(|(t, &c)| c != 0 && degrees[t] as usize != next) {
                return Ok(false);
            }
        }
        if Subspace::span(d.field(), d.rows(), &images).dim() != comps[next].len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// H(2:n;omega_2) over F_{p^{n1}} on the basis e_{k,alpha}, ē_{1,alpha}
/// with its Z/(p^{n2}-1) x F_{p^{n1}} grading.
#[derive(Clone, Debug)]
pub struct ThinLemma {
    pub hamiltonian: Hamiltonian,
    pub field: FieldRef,
    /// H with scalars extended to F_{p^{n1}}, monomial basis.
    pub lifted: AlgRef,
    /// The algebra on the new basis.
    pub algebra: AlgRef,
    /// New basis vectors in monomial coordinates.
    pub basis: Vec<Vec<Elt>>,
    /// monomial basis -> new basis
    pub to_new: LinearMap,
    pub grading: Grading,
    index: HashMap<(i64, Elt, bool), usize>,
}

impl ThinLemma {
    pub fn p1(&self) -> u32 {
        self.hamiltonian.p1()
    }
    pub fn p2(&self) -> u32 {
        self.hamiltonian.p2()
    }
    fn m(&self) -> i64 {
        self.p2() as i64 - 1
    }

    /// Index of e_{k,alpha}, k read mod p^{n2}-1.
    pub fn e(&self, k: i64, alpha: Elt) -> usize {
        self.index[&(k.rem_euclid(self.m()), alpha, false)]
    }

    /// Index of ē_{1,alpha}, alpha != 0.
    pub fn ebar(&self, alpha: Elt) -> Option<usize> {
        self.index.get(&(1 % self.m(), alpha, true)).copied()
    }

    pub fn e_vec(&self, k: i64, alpha: Elt) -> Vec<Elt> {
        crate::linalg::unit_vec(self.algebra.dim(), self.e(k, alpha))
    }

    /// ē_{1,alpha} in new coordinates, zero for alpha = 0.
    pub fn ebar_vec(&self, alpha: Elt) -> Vec<Elt> {
        let mut v = vec![0; self.algebra.dim()];
        if let Some(i) = self.ebar(alpha) {
            v[i] = 1;
        }
        v
    }

    /// New-basis coordinates of x^(i)y^(j) from the inverse formulas of the
    /// lemma.
    pub fn inverse_formula(&self, i: u32, j: u32) -> Result<Vec<Elt>> {
        let (p1, p2) = (self.p1(), self.p2());
        if (i, j) == (0, 0) || i >= p1 || j >= p2 {
            return Err(Error::InvalidParameter(format!("x^({i})y^({j}) has no inverse formula")));
        }
        let f = &self.field;
        let mut v = vec![0; self.algebra.dim()];
        let mut add = |idx: usize, c: Elt| v[idx] = f.add(v[idx], c);
        for alpha in 0..f.order() {
            if j >= 1 && i >= 1 {
                let c = f.neg(f.pow0(alpha, (p1 - 1 - i) as u64));
                add(self.e(1 - j as i64, alpha), c);
            } else if i == 0 {
                add(self.e(1 - j as i64, alpha), f.from_int(j as i64));
            } else {
                let c = f.neg(f.pow0(alpha, (p1 - 1 - i) as u64));
                add(self.e(1, alpha), f.mul(c, f.from_int(i as i64)));
                if let Some(b) = self.ebar(alpha) {
                    add(b, c);
                }
            }
        }
        if i == 0 {
            add(self.e(1 - j as i64, 0), 1);
        }
        Ok(v)
    }

    /// First failing product rule, described.
    pub fn product_rule_failure(&self) -> Option<String> {
        let f = &self.field;
        let l = &self.algebra;
        let p2 = self.p2();
        let q = f.order();
        let p = f.p();
        let scaled = |c: Elt, v: Vec<Elt>| crate::linalg::vec_scale(f, c, &v);
        for alpha in 0..q {
            for beta in 0..q {
                let ab = f.add(alpha, beta);
                for j in 1..p2 {
                    for lj in 1..p2 {
                        let got = l.bracket(&self.e_vec(1 - j as i64, alpha), &self.e_vec(1 - lj as i64, beta));
                        let t = j + lj - 1;
                        let want = if t < p2 {
                            let c = f.sub(
                                f.mul(beta, binom_mod_p(t as u64, lj as u64, p)),
                                f.mul(alpha, binom_mod_p(t as u64, j as u64, p)),
                            );
                            scaled(c, self.e_vec(1 - t as i64, ab))
                        } else {
                            vec![0; l.dim()]
                        };
                        if got != want {
                            return Some(format!("mult1 at j={j}, l={lj}, alpha={alpha}, beta={beta}"));
                        }
                    }
                }
                if beta == 0 {
                    continue;
                }
                let eb = self.ebar_vec(beta);
                for j in 2..p2 {
                    let got = l.bracket(&self.e_vec(1 - j as i64, alpha), &eb);
                    if got != scaled(beta, self.e_vec(2 - j as i64, ab)) {
                        return Some(format!("mult2 at j={j}, alpha={alpha}, beta={beta}"));
                    }
                }
                let got = l.bracket(&self.e_vec(0, alpha), &eb);
                let want = crate::linalg::vec_add(f, &scaled(f.neg(beta), self.e_vec(1, ab)), &scaled(beta, self.ebar_vec(ab)));
                if got != want {
                    return Some(format!("mult3 at alpha={alpha}, beta={beta}"));
                }
                if alpha != 0 && !crate::linalg::is_zero_vec(&l.bracket(&self.ebar_vec(alpha), &eb)) {
                    return Some(format!("mult4 at alpha={alpha}, beta={beta}"));
                }
            }
        }
        None
    }
}

/// Build the basis of the lemma, certify it, and grade by
/// (k mod p^{n2}-1, alpha), alpha written by its F_p-coordinates.
pub fn lemma_thin_grading(p: u32, n1: u32, n2: u32) -> Result<ThinLemma> {
    let h = crate::cartan::make_H_omega2(p, n1, n2)?;
    let field = make_field(p as u64, n1)?;
    let emb = Embedding::new(h.field(), &field)?;
    let lifted = Arc::new(h.algebra.extend_scalars(&emb)?);
    let (p1, p2) = (h.p1(), h.p2());
    let m = p2 as i64 - 1;
    let dim = h.dim();
    let f = &field;
    let mut basis = Vec::with_capacity(dim);
    let mut labels = Vec::with_capacity(dim);
    let mut keys = Vec::with_capacity(dim);
    let mut degree = Vec::with_capacity(dim);
    let alpha_deg = |a: Elt| -> Vec<i64> { f.coeffs(a).iter().map(|&c| c as i64).collect() };
    for j in 1..p2 {
        let k = (1 - j as i64).rem_euclid(m);
        for alpha in 0..f.order() {
            let mut v = vec![0; dim];
            for i in 0..p1 {
                let b = h.index(i, j).unwrap();
                v[b] = f.add(v[b], f.pow0(alpha, i as u64));
            }
            let b = h.index(p1 - 1, j).unwrap();
            v[b] = f.add(v[b], f.from_int(j as i64));
            basis.push(v);
            labels.push(format!("e_{{{},{}}}", 1 - j as i64, f.format(alpha)));
            keys.push((k, alpha, false));
            let mut d = vec![k];
            d.extend(alpha_deg(alpha));
            degree.push(d);
        }
    }
    for alpha in 1..f.order() {
        let mut v = vec![0; dim];
        for i in 1..p1 {
            let c = f.pow0(alpha, i as u64);
            let b = h.index(i, 0).unwrap();
            v[b] = f.add(v[b], c);
            let b = h.index(i, p2 - 1).unwrap();
            v[b] = f.sub(v[b], f.mul(c, f.from_int(i as i64)));
        }
        basis.push(v);
        labels.push(format!("ebar_{{1,{}}}", f.format(alpha)));
        keys.push((1 % m, alpha, true));
        let mut d = vec![1 % m];
        d.extend(alpha_deg(alpha));
        degree.push(d);
    }
    let algebra = Arc::new(lifted.on_basis(&basis, labels)?);
    let bm = Matrix::from_columns(f, dim, &basis)?;
    let inv = bm.inverse().ok_or_else(|| Error::Check("the lemma basis is dependent".into()))?;
    let to_new = LinearMap::new(lifted.clone(), algebra.clone(), inv)?;
    let mut factors = vec![m as u64];
    factors.extend(std::iter::repeat_n(p as u64, n1 as usize));
    let mut gen = vec![1];
    gen.extend(alpha_deg(1));
    let group = GradingGroup { kind: GroupKind::Finite { factors }, generator: Some(gen) };
    let grading = Grading::new(algebra.clone(), group, degree)?;
    let index = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    Ok(ThinLemma { hamiltonian: h, field, lifted, algebra, basis, to_new, grading, index })
}
