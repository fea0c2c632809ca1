//! Positive parts of loop algebras of cyclically graded algebras, and the
//! maximal-class and thin conditions on them.

use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::lie::AlgRef;
use crate::linalg::{is_zero_vec, vec_add, vec_scale, vec_sub, Matrix, Subspace};
use crate::par;
use crate::scalar::{Elt, FieldRef};

/// A homogeneous element u ⊗ t^k of the loop algebra, plus c (D ⊗ t) when
/// k = 1 and a derivation is adjoined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homog {
    pub degree: usize,
    pub v: Vec<Elt>,
    pub d: Elt,
}

impl Homog {
    pub fn is_zero(&self) -> bool {
        self.d == 0 && is_zero_vec(&self.v)
    }
}

#[derive(Clone, Debug)]
pub struct LoopPrefix {
    pub base: AlgRef,
    pub depth: usize,
    /// Basis indices of L_{k mod N}, k = 0..N-1.
    components: Vec<Vec<usize>>,
    derivation: Option<Matrix>,
}

impl LoopPrefix {
    /// The prefix through degree `depth` of the loop algebra of a cyclic
    /// grading, optionally adjoining D ⊗ t for a degree-one derivation D.
    pub fn new(g: &Grading, depth: usize, adjoin: Option<Matrix>) -> Result<Self> {
        let components = g.cyclic_components()?;
        let base = g.algebra.clone();
        if let Some(d) = &adjoin {
            if d.rows() != base.dim() || d.cols() != base.dim() {
                return Err(Error::DimensionMismatch { expected: base.dim(), got: d.rows() });
            }
            if !base.is_derivation(d) {
                return Err(Error::InvalidParameter("adjoined map is not a derivation".into()));
            }
            let deg = g.cyclic_degrees()?;
            let n = components.len();
            for b in 0..base.dim() {
                let col = d.column(b);
                if col.iter().enumerate().any(|(t, &c)| c != 0 && deg[t] as usize != (deg[b] as usize + 1) % n) {
                    return Err(Error::InvalidParameter("adjoined derivation is not of degree one".into()));
                }
            }
        }
        if depth == 0 {
            return Err(Error::InvalidParameter("depth must be positive".into()));
        }
        Ok(LoopPrefix { base, depth, components, derivation: adjoin })
    }

    pub fn field(&self) -> &FieldRef {
        self.base.field()
    }

    pub fn period(&self) -> usize {
        self.components.len()
    }

    pub fn has_derivation(&self) -> bool {
        self.derivation.is_some()
    }

    /// Basis of the degree-k component.
    pub fn component(&self, k: usize) -> Vec<Homog> {
        let n = self.base.dim();
        let mut out: Vec<Homog> = self.components[k % self.period()]
            .iter()
            .map(|&b| Homog { degree: k, v: crate::linalg::unit_vec(n, b), d: 0 })
            .collect();
        if k == 1 && self.derivation.is_some() {
            out.push(Homog { degree: 1, v: vec![0; n], d: 1 });
        }
        out
    }

    pub fn dim(&self, k: usize) -> usize {
        self.components[k % self.period()].len() + usize::from(k == 1 && self.derivation.is_some())
    }

    /// An element u ⊗ t^k with u given in base coordinates.
    pub fn element(&self, k: usize, v: Vec<Elt>) -> Homog {
        Homog { degree: k, v, d: 0 }
    }

    /// D ⊗ t.
    pub fn derivation_element(&self) -> Option<Homog> {
        self.derivation.as_ref().map(|_| Homog { degree: 1, v: vec![0; self.base.dim()], d: 1 })
    }

    pub fn bracket(&self, a: &Homog, b: &Homog) -> Homog {
        let f = self.field();
        let mut v = self.base.bracket(&a.v, &b.v);
        if let Some(d) = &self.derivation {
            if a.d != 0 {
                v = vec_add(f, &v, &vec_scale(f, a.d, &d.mul_vec(&b.v)));
            }
            if b.d != 0 {
                v = vec_sub(f, &v, &vec_scale(f, b.d, &d.mul_vec(&a.v)));
            }
        }
        Homog { degree: a.degree + b.degree, v, d: 0 }
    }

    /// Left-normed bracket [w_0, w_1, ..., w_k].
    pub fn bracket_word(&self, word: &[&Homog]) -> Homog {
        let mut acc = word[0].clone();
        for w in &word[1..] {
            acc = self.bracket(&acc, w);
        }
        acc
    }

    /// Coordinates of a homogeneous element of degree > 1 in base space.
    fn span_of(&self, elts: &[Homog]) -> Subspace {
        let vs: Vec<Vec<Elt>> = elts.iter().map(|h| h.v.clone()).collect();
        Subspace::span(self.field(), self.base.dim(), &vs)
    }

    /// Whether span [u, L_1] is all of L_{k+1}, u of degree k > 0.
    fn covers(&self, u: &Homog, l1: &[Homog]) -> bool {
        let images: Vec<Homog> = l1.iter().map(|x| self.bracket(u, x)).collect();
        self.span_of(&images).dim() == self.dim(u.degree + 1)
    }

    /// First degree violating: dim L_1 = 2, dim L_k = 1 for k > 1, and
    /// L_{k+1} = [L_k, L_1], through the prefix depth.
    pub fn check_maximal_class(&self) -> Option<usize> {
        if self.dim(1) != 2 {
            return Some(1);
        }
        let l1 = self.component(1);
        for k in 2..=self.depth {
            if self.dim(k) != 1 {
                return Some(k);
            }
            let prev = self.component(k - 1);
            let images: Vec<Homog> = prev.iter().flat_map(|u| l1.iter().map(move |x| (u, x))).map(|(u, x)| self.bracket(u, x)).collect();
            if self.span_of(&images).dim() != 1 {
                return Some(k);
            }
        }
        None
    }

    /// Covering property: [u, L_1] = L_{k+1} for every nonzero homogeneous
    /// u of degree k < depth, checked on all projective points of each L_k.
    pub fn check_thin(&self) -> Option<(usize, Homog)> {
        if self.dim(1) != 2 {
            return Some((1, self.component(1).first().cloned().unwrap_or_else(|| self.element(1, vec![0; self.base.dim()]))));
        }
        let l1 = self.component(1);
        let found = par::find_first(self.depth.saturating_sub(1), |idx| {
            let k = idx + 1;
            let comp = self.component(k);
            if comp.len() > 2 {
                return Some(comp[0].clone());
            }
            projective_points(self, &comp).into_iter().find(|u| !self.covers(u, &l1))
        });
        found.map(|(idx, u)| (idx + 1, u))
    }

    /// Which one-dimensional subspace of L_1 = <X, Y> centralizes L_k, for
    /// 2 <= k <= depth.
    pub fn two_step_centralizers(&self, x: &Homog, y: &Homog) -> Result<Vec<(usize, Centralizer)>> {
        if let Some(k) = self.check_maximal_class() {
            return Err(Error::Check(format!("not of maximal class at degree {k}")));
        }
        let f = self.field();
        Ok(par::map_range(self.depth.saturating_sub(1), |idx| {
            let k = idx + 2;
            let v = &self.component(k)[0];
            let (bx, by) = (self.bracket(v, x), self.bracket(v, y));
            let c = match (bx.is_zero(), by.is_zero()) {
                (true, true) => Centralizer::All,
                (true, false) => Centralizer::X,
                (false, true) => Centralizer::Y,
                (false, false) => {
                    // [v, aX + Y] = 0 with a [v,X] = -[v,Y]
                    let t = bx.v.iter().position(|&c| c != 0).unwrap();
                    let a = f.div(f.neg(by.v[t]), bx.v[t]).expect("nonzero pivot");
                    if vec_add(f, &vec_scale(f, a, &bx.v), &by.v).iter().all(|&c| c == 0) {
                        Centralizer::Mixed(a)
                    } else {
                        Centralizer::None
                    }
                }
            };
            (k, c)
        }))
    }

    /// Diamonds (two-dimensional components) in degrees 2..=depth and the
    /// flagged fake diamonds, with their types [V,Y,X] = lambda [V,X,X],
    /// V spanning L_{k-1}.
    pub fn diamonds(&self, x: &Homog, y: &Homog, fake: &dyn Fn(usize) -> bool) -> DiamondReport {
        let f = self.field();
        let mut entries = Vec::new();
        let mut positions = Vec::new();
        for k in 2..=self.depth {
            let dim = self.dim(k);
            let flagged = dim == 1 && fake(k);
            if dim == 2 {
                positions.push(k);
            }
            if dim != 2 && !flagged {
                continue;
            }
            let lambda = if self.dim(k - 1) != 1 {
                Lambda::Undetermined
            } else {
                let v = &self.component(k - 1)[0];
                let yx = self.bracket_word(&[v, y, x]);
                let xx = self.bracket_word(&[v, x, x]);
                ratio(f, &yx.v, &xx.v)
            };
            entries.push(DiamondInfo { degree: k, fake: flagged, lambda });
        }
        DiamondReport { positions, entries }
    }

    /// Smallest degree greater than one carrying a diamond.
    pub fn second_diamond(&self) -> Option<usize> {
        (2..=self.depth).find(|&k| self.dim(k) == 2)
    }
}

fn ratio(f: &FieldRef, a: &[Elt], b: &[Elt]) -> Lambda {
    match b.iter().position(|&c| c != 0) {
        None => {
            if is_zero_vec(a) {
                Lambda::Undetermined
            } else {
                Lambda::Infinite
            }
        }
        Some(t) => {
            let l = f.div(a[t], b[t]).expect("nonzero pivot");
            if vec_sub(f, a, &vec_scale(f, l, b)).iter().all(|&c| c == 0) {
                Lambda::Finite(l)
            } else {
                Lambda::Undetermined
            }
        }
    }
}

fn projective_points(lp: &LoopPrefix, comp: &[Homog]) -> Vec<Homog> {
    let f = lp.field();
    let q = f.order();
    let mut out = Vec::new();
    for lead in 0..comp.len() {
        let rest = &comp[lead + 1..];
        let count = (q as u64).pow(rest.len() as u32);
        for code in 0..count {
            let mut u = comp[lead].clone();
            let mut c = code;
            for b in rest {
                let a = (c % q as u64) as Elt;
                c /= q as u64;
                u.v = vec_add(f, &u.v, &vec_scale(f, a, &b.v));
                u.d = f.add(u.d, f.mul(a, b.d));
            }
            out.push(u);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Centralizer {
    X,
    Y,
    /// aX + Y
    Mixed(Elt),
    /// All of L_1 centralizes L_k.
    All,
    /// Nothing nonzero does.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lambda {
    Finite(Elt),
    Infinite,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiamondInfo {
    pub degree: usize,
    pub fake: bool,
    pub lambda: Lambda,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiamondReport {
    /// Degrees 2..=depth whose component is two-dimensional.
    pub positions: Vec<usize>,
    /// Diamonds and flagged fake diamonds in degree order.
    pub entries: Vec<DiamondInfo>,
}
