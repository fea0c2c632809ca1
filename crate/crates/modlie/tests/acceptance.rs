use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use modlie::block::*;
use modlie::cartan::*;
use modlie::cohom::*;
use modlie::divpow::{dp_mul, DPElement, DPShape};
use modlie::grading::*;
use modlie::iso::*;
use modlie::lie::DEFAULT_SEED;
use modlie::linalg::{unit_vec, Matrix, Subspace};
use modlie::narrow::*;
use modlie::scalar::{forward_transform, inversion_transform};
use modlie::{make_field, Elt, LieAlgebra, Result};

const SETS: [(u32, u32, u32); 7] = [(2, 2, 2), (2, 1, 3), (3, 1, 1), (3, 1, 2), (3, 2, 2), (5, 1, 1), (7, 1, 1)];
const SIGMA_SETS: [(u32, u32, u32, u32); 6] = [(0, 1, 2, 2), (0, 1, 2, 3), (0, 1, 3, 2), (1, 2, 3, 2), (0, 1, 2, 5), (0, 2, 3, 3)];
const TAU_SETS: [(u32, u32); 4] = [(2, 2), (3, 1), (3, 2), (5, 1)];
const AF_SETS: [(u32, u32, u32); 5] = [(1, 2, 2), (1, 2, 3), (1, 3, 2), (2, 3, 2), (1, 2, 5)];
const PULLBACK_SETS: [(u32, u32); 3] = [(3, 1), (5, 1), (3, 2)];
const CLASS_SETS: [(u32, u32, u32); 3] = [(3, 1, 1), (2, 1, 2), (5, 1, 1)];
const THIN_SETS: [(u32, u32); 3] = [(3, 1), (3, 2), (5, 1)];
const AFS_SETS: [(u32, u32, u32); 3] = [(2, 1, 2), (3, 1, 1), (3, 1, 2)];

/// Sub-items that fail on purpose: the stated value disagrees with the
/// computation (see README).
const KNOWN_FAILURES: [&str; 5] = [
    "H2 omega0 (2,2,2) = 4",
    "centralizer rule (3,1,1)",
    "centralizer rule (2,1,2)",
    "centralizer rule (5,1,1)",
    "short form on all tuples",
];

struct Items(Vec<(String, bool, String)>);

impl Items {
    fn new() -> Self {
        Items(Vec::new())
    }
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push((name.into(), ok, String::new()));
    }
    fn check_with(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.0.push((name.into(), ok, detail.into()));
    }
}

fn tag3((p, n1, n2): (u32, u32, u32)) -> String {
    format!("({p},{n1},{n2})")
}

fn c1() -> Result<Items> {
    let mut it = Items::new();
    for s @ (p, n1, n2) in SETS {
        let pn = p.pow(n1 + n2) as usize;
        let h0 = make_H_omega0(p, n1, n2)?;
        let h2 = make_H_omega2(p, n1, n2)?;
        it.check(format!("dim omega0 {}", tag3(s)), h0.dim() == pn - 2);
        it.check(format!("dim omega2 {}", tag3(s)), h2.dim() == pn - 1);
        it.check(format!("jacobi omega0 {}", tag3(s)), h0.algebra.check_jacobi().is_empty());
        it.check(format!("jacobi omega2 {}", tag3(s)), h2.algebra.check_jacobi().is_empty());
    }
    Ok(it)
}

fn is_proper_ideal(l: &LieAlgebra, s: &Subspace) -> bool {
    s.dim() > 0 && s.dim() < l.dim() && l.ideal_closure(s) == *s
}

fn c2() -> Result<Items> {
    let mut it = Items::new();
    for s @ (p, n1, n2) in SETS {
        let h = make_H_omega2(p, n1, n2)?;
        it.check(format!("omega2 simple {}", tag3(s)), h.algebra.is_simple(DEFAULT_SEED)?.simple);
    }
    for n2 in [2u32, 3] {
        let h = make_H_omega0(2, 1, n2)?;
        let l = &h.algebra;
        let ys: Vec<Vec<Elt>> = (1..h.p2()).map(|j| h.vec_of(0, j)).collect();
        let ideal = Subspace::span(h.field(), l.dim(), &ys);
        it.check(format!("omega0 (2,1,{n2}) y-ideal"), is_proper_ideal(l, &ideal));
        let s = l.is_simple(DEFAULT_SEED)?;
        let witnessed = s.witness.as_ref().is_some_and(|w| is_proper_ideal(l, w));
        it.check(format!("omega0 (2,1,{n2}) not simple"), !s.simple && witnessed);
    }
    for n in [2u32, 3] {
        let w = make_W1n(2, n, ZassenhausBasis::Proper)?;
        let d = w.dim();
        let f = w.field().clone();
        let j = Subspace::span(&f, d, &(0..d - 1).map(|i| unit_vec(d, i)).collect::<Vec<_>>());
        it.check(format!("W(1:{n}) ideal <E_i | i != r>"), is_proper_ideal(&w, &j));
        it.check(format!("W(1:{n}) not simple"), !w.is_simple(DEFAULT_SEED)?.simple);
        // every nonzero vector generates J or everything
        let unique = (1u32..1 << d).all(|code| {
            let v: Vec<Elt> = (0..d).map(|b| (code >> b) & 1).collect();
            let c = w.ideal_closure(&Subspace::span(&f, d, &[v]));
            c == j || c.is_full()
        });
        it.check(format!("W(1:{n}) ideal unique"), unique);
    }
    Ok(it)
}

fn c3() -> Result<Items> {
    let mut it = Items::new();
    for (a, b, n, p) in SIGMA_SETS {
        let t = format!("({a},{b},{n},{p})");
        match sigma(a, b, n, p) {
            Ok(s) => {
                it.check(format!("sigma certified {t}"), s.certificate.rank == (p as usize).pow(n) - 1);
                let inv = sigma_inverse_displayed(a, b, n, p)?;
                it.check(format!("sigma inverse {t}"), Some(inv.matrix) == s.map.matrix.inverse());
            }
            Err(e) => it.check_with(format!("sigma certified {t}"), false, e.to_string()),
        }
    }
    Ok(it)
}

fn c4() -> Result<Items> {
    let mut it = Items::new();
    for (p, n2) in TAU_SETS {
        let t = format!("({p},{n2})");
        match tau(p, n2) {
            Ok(tau) => {
                it.check(format!("tau certified {t}"), tau.forms_agree()?);
                it.check(format!("tau words {t}"), tau_word_failure(&tau)?.is_none());
            }
            Err(e) => it.check_with(format!("tau certified {t}"), false, e.to_string()),
        }
        let a = a_word_identity_failure(&make_A(p, n2)?);
        it.check_with(format!("A words {t}"), a.is_none(), a.unwrap_or_default());
        let l = l_word_identity_failure(&lemma_thin_grading(p, 1, n2)?)?;
        it.check_with(format!("L words {t}"), l.is_none(), l.unwrap_or_default());
    }
    Ok(it)
}

fn c5() -> Result<Items> {
    let mut it = Items::new();
    for (b, n, p) in AF_SETS {
        let t = format!("(0,{b},{n},{p})");
        let l = make_AF(0, b, n, p)?;
        let outer = l.outer_dim();
        it.check_with(format!("outer_dim {t}"), outer == n as usize, format!("got {outer}"));
        let mut span = l.inner_derivations();
        let mut ok = true;
        for d in af_frobenius_derivations(&l)? {
            ok &= l.is_derivation(&d) && span.insert(d.data());
        }
        it.check(format!("Frobenius derivations span {t}"), ok && span == l.derivation_space());
    }
    Ok(it)
}

fn h2_of(h: &Hamiltonian) -> Result<H2Report> {
    let form = assoc_form(h)?;
    h2_dimension(&h.algebra, Some(&form))
}

fn h2_item(it: &mut Items, name: String, r: &H2Report, want: usize) {
    it.check_with(format!("{name} = {want}"), r.h2 == want, format!("got {}", r.h2));
    if let Some(route) = &r.derivation_route {
        let other = route.alternating - route.inner;
        it.check_with(format!("{name} routes agree"), other == r.h2, format!("{other} vs {}", r.h2));
    }
}

fn c6() -> Result<Items> {
    let mut it = Items::new();
    for s @ (p, n1, n2) in SETS {
        let r = h2_of(&make_H_omega2(p, n1, n2)?)?;
        let want = if p == 2 { 0 } else { (n1 + n2) as usize };
        h2_item(&mut it, format!("H2 omega2 {}", tag3(s)), &r, want);
    }
    for (p, want) in [(5u32, 3usize), (3, 7)] {
        let r = h2_of(&make_H_omega0(p, 1, 1)?)?;
        h2_item(&mut it, format!("H2 omega0 ({p},1,1)"), &r, want);
    }
    let r = h2_of(&make_H_omega0(2, 2, 2)?)?;
    h2_item(&mut it, "H2 omega0 (2,2,2)".into(), &r, 4);
    Ok(it)
}

fn c7() -> Result<Items> {
    let mut it = Items::new();
    for (p, n2) in PULLBACK_SETS {
        let t = tau(p, n2)?;
        let k = t.field().clone();
        let h = &t.lemma.hamiltonian;
        let back = t.dp_form.inverse()?;
        let pulled: Vec<Cocycle> = a_cocycles(&t.block)?.iter().map(|c| pullback_cocycle(c, &back.map)).collect::<Result<_>>()?;
        let target = pulled[0].algebra.clone();
        let form = assoc_form(h)?;
        let q = h.p2();
        for r in 1..=n2 {
            let pr = p.pow(r);
            let inner = cocycle_from_derivation(&h.algebra.ad(&h.vec_of(1, q - pr)), &form)?;
            let want = phi_r(h, r)?.extend_scalars(&target)?.add(&inner.extend_scalars(&target)?).scale(k.pow0(t.epsilon, pr as u64 - 2));
            it.check(format!("Phi_{r} ({p},{n2})"), same_class(&pulled[r as usize - 1], &want)?);
        }
        let e2 = k.inv(k.mul(t.epsilon, t.epsilon))?;
        let want = psi_s(h, 1)?.extend_scalars(&target)?.scale(k.neg(e2));
        it.check(format!("Psi ({p},{n2})"), same_class(pulled.last().unwrap(), &want)?);
    }
    Ok(it)
}

fn maximal_class_prefix(h: &Hamiltonian, periods: usize) -> Result<(LoopPrefix, Homog, Homog)> {
    let g = specialize(&a_grading(h)?, -(h.p2() as i64), -1)?;
    let n = g.cyclic_dims()?.len();
    let lp = LoopPrefix::new(&g, periods * n, Some(make_D(h)?.matrix))?;
    let x = lp.element(1, h.vec_of(1, 0));
    let y = Homog { d: 1, ..x.clone() };
    Ok((lp, x, y))
}

fn c8() -> Result<Items> {
    let mut it = Items::new();
    for s @ (p, n1, n2) in CLASS_SETS {
        let h = make_H_omega2(p, n1, n2)?;
        let (lp, x, y) = maximal_class_prefix(&h, 3)?;
        let bad = lp.check_maximal_class();
        it.check_with(format!("maximal class {} depth {}", tag3(s), lp.depth), bad.is_none(), format!("{bad:?}"));
        let q = h.p2() as usize;
        let seq = lp.two_step_centralizers(&x, &y)?;
        let first = seq.iter().find(|&&(k, c)| {
            let stated = if k % (q - 1) == 1 % (q - 1) { Centralizer::X } else { Centralizer::Y };
            c != stated
        });
        it.check_with(
            format!("centralizer rule {}", tag3(s)),
            first.is_none(),
            first.map(|(k, c)| format!("degree {k} is {c:?}")).unwrap_or_default(),
        );
    }
    Ok(it)
}

fn c9() -> Result<Items> {
    let mut it = Items::new();
    for (p, n2) in THIN_SETS {
        let t = format!("({p},{n2})");
        let h = make_H_omega2(p, 1, n2)?;
        let q = h.p2() as usize;
        let g = specialize(&a_grading(&h)?, 1 - q as i64, -1)?;
        let n = g.cyclic_dims()?.len();
        let lp = LoopPrefix::new(&g, 3 * n, None)?;
        it.check(format!("thin covering {t}"), lp.check_thin().is_none());
        let x = lp.element(1, h.vec_of(1, 0));
        let y = lp.element(1, h.vec_of(0, q as u32 - 1));
        let r = lp.diamonds(&x, &y, &|k| k % n == q % n);
        let want: Vec<usize> = (2..=lp.depth).filter(|&k| k % (q - 1) == 1 % (q - 1) && k % n != q % n).collect();
        it.check(format!("thin diamond positions {t}"), r.positions == want);
        let infinite = r.entries.iter().filter(|e| !e.fake).all(|e| e.lambda == Lambda::Infinite);
        it.check(format!("thin diamond types infinite {t}"), infinite);

        let lemma = lemma_thin_grading(p, 1, n2)?;
        let f = lemma.field.clone();
        let n = lemma.grading.cyclic_dims()?.len();
        let lp = LoopPrefix::new(&lemma.grading, 2 * n + 2, None)?;
        it.check(format!("lemma covering {t}"), lp.check_thin().is_none());
        let x = lp.element(1, lemma.ebar_vec(1));
        let y = lp.element(1, lemma.e_vec(1, 1));
        let r = lp.diamonds(&x, &y, &|k| k % n == q % n);
        let progression = (0..p as usize).all(|alpha| {
            let k = q + alpha * (q - 1);
            r.entries.iter().any(|e| e.degree == k && e.lambda == Lambda::Finite(f.from_int(alpha as i64)) && e.fake == (alpha == 0))
        });
        it.check(format!("lemma diamond types {t}"), progression);
        let fake_dim = lp.dim(q) == 1 && r.entries.iter().any(|e| e.degree == q && e.fake);
        it.check(format!("lemma fake diamond {t}"), fake_dim);
    }
    Ok(it)
}

fn c10() -> Result<Items> {
    let mut it = Items::new();
    let mut long_ok = true;
    let mut short_bad = Vec::new();
    let mut short_bad_off_boundary = 0;
    for (p, n1, n2) in AFS_SETS {
        let u = af_u_basis(0, n2, n1 + n2, p)?;
        let l = &u.u_algebra;
        let (p1, p2) = (p.pow(n1), p.pow(n2));
        let pairs: Vec<(u32, u32)> = (1..=p1).flat_map(|i| (1..=p2).map(move |j| (i, j))).filter(|&s| s != (p1, p2)).collect();
        for &(i, j) in &pairs {
            for &(k, m) in &pairs {
                let c = afs_structure_constant(i, j, k, m, n1, n2, p)?;
                let a = afs_index(i, j, n1, n2, p);
                let b = afs_index(k, m, n1, n2, p);
                let t = afs_index(i + k, j + m, n1, n2, p);
                let direct = l.bracket(&unit_vec(l.dim(), a), &unit_vec(l.dim(), b))[t];
                long_ok &= c.full == direct;
                if c.simplified != direct {
                    short_bad.push((p, n1, n2, i, j, k, m));
                    if !((i == k && i == p1) || (j == m && j == p2)) {
                        short_bad_off_boundary += 1;
                    }
                }
            }
        }
    }
    it.check("long form on all tuples", long_ok);
    let first = short_bad.first().map(|t| format!("{} tuples, first {t:?}", short_bad.len())).unwrap_or_default();
    it.check_with("short form on all tuples", short_bad.is_empty(), first);
    it.check("short form off i=k=p^n1, j=l=p^n2", short_bad_off_boundary == 0);
    Ok(it)
}

fn exact_period(d: &Matrix, m: u64) -> bool {
    let id = Matrix::identity(d.field(), d.rows());
    let primes: Vec<u64> = (2..=m).filter(|&l| m.is_multiple_of(l) && (2..l).all(|t| l % t != 0)).collect();
    d.pow(m) == id && primes.iter().all(|&l| d.pow(m / l) != id)
}

fn c11() -> Result<Items> {
    let mut it = Items::new();
    for s @ (p, n1, n2) in [(3u32, 1u32, 1u32), (2, 1, 2), (5, 1, 1), (3, 1, 2), (2, 2, 2), (7, 1, 1)] {
        let h = make_H_omega2(p, n1, n2)?;
        let d = make_D(&h)?.matrix;
        let t = tag3(s);
        it.check(format!("D derivation {t}"), h.algebra.is_derivation(&d));
        it.check(format!("D nonsingular {t}"), d.inverse().is_some());
        it.check(format!("D period {t}"), exact_period(&d, h.dim() as u64));
        let g = specialize(&a_grading(&h)?, -(h.p2() as i64), -1)?;
        it.check(format!("D agrees with grading {t}"), derivation_agrees(&d, &g)?);
        let dp = d.pow(p as u64);
        it.check(format!("D^p agrees with deflation {t}"), derivation_agrees(&dp, &deflate(&g, p as u64)?)?);
    }
    Ok(it)
}

fn fourier_round_trip(p: u64, n: u32) -> Result<bool> {
    let f = make_field(p, n)?;
    let q = f.order() as usize;
    for slot in 0..q {
        let a: Vec<Vec<Elt>> = (0..q).map(|i| vec![(i == slot) as Elt]).collect();
        if forward_transform(&f, &inversion_transform(&f, &a)?)? != a || inversion_transform(&f, &forward_transform(&f, &a)?)? != a {
            return Ok(false);
        }
    }
    Ok(true)
}

fn dp_laws(p: u64, heights: &[u32]) -> Result<bool> {
    let f = make_field(p, 1)?;
    let shape = DPShape::new(&f, heights)?;
    let monos: Vec<DPElement> = shape.monomials().iter().map(|e| DPElement::monomial(&shape, e)).collect::<Result<_>>()?;
    for a in &monos {
        for b in &monos {
            let ab = dp_mul(a, b)?;
            if ab != dp_mul(b, a)? {
                return Ok(false);
            }
            for c in &monos {
                if dp_mul(&ab, c)? != dp_mul(a, &dp_mul(b, c)?)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn cocycles_ok(cs: &[Cocycle]) -> bool {
    cs.iter().all(|c| c.is_alternating() && c.identity_failure().is_none())
}

fn c12() -> Result<Items> {
    let mut it = Items::new();
    for (p, n) in [(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)] {
        it.check(format!("Fourier round trip F_{}", p.pow(n)), fourier_round_trip(p, n)?);
    }
    for (p, hs) in [(2u64, vec![2u32, 2]), (2, vec![1, 3]), (3, vec![1, 1]), (3, vec![1, 2]), (5, vec![1, 1]), (2, vec![1, 1, 1])] {
        it.check(format!("dp_mul laws p={p} {hs:?}"), dp_laws(p, &hs)?);
    }
    let mut leibniz = true;
    let mut graded = true;
    let mut cocycles = true;
    for (p, n1, n2) in SETS {
        let h = make_H_omega2(p, n1, n2)?;
        leibniz &= h.algebra.is_derivation(&make_D(&h)?.matrix);
        let a = a_grading(&h)?;
        graded &= a.check_graded().is_none();
        let (p1, p2) = (h.p1() as i64, h.p2() as i64);
        for (r, s) in [(-p2, -1), (1 - p2, -1), (0, -1), (-1, -p1)] {
            let g = specialize(&a, r, s)?;
            graded &= g.check_graded().is_none();
        }
        graded &= lemma_thin_grading(p, n1, n2)?.grading.check_graded().is_none();
        if p > 2 {
            let cs: Vec<Cocycle> = (1..=n2).map(|r| phi_r(&h, r)).chain((1..=n1).map(|s| psi_s(&h, s))).collect::<Result<_>>()?;
            cocycles &= cocycles_ok(&cs);
        }
        cocycles &= cocycles_ok(&h2_of(&h)?.basis);
    }
    for (a, b, n, p) in SIGMA_SETS {
        let u = af_u_basis(a, b, n, p)?;
        leibniz &= u.u_algebra.is_derivation(&u.derivation);
    }
    for (b, n, p) in AF_SETS {
        let l = make_AF(0, b, n, p)?;
        leibniz &= af_frobenius_derivations(&l)?.iter().all(|d| l.is_derivation(d));
        if p > 2 {
            cocycles &= cocycles_ok(&af_cocycles(&Arc::new(l))?);
        }
    }
    for (p, n2) in PULLBACK_SETS {
        cocycles &= cocycles_ok(&a_cocycles(&make_A(p, n2)?)?);
    }
    it.check("Leibniz for emitted derivations", leibniz);
    it.check("gradedness for emitted gradings", graded);
    it.check("cocycle identity for emitted cocycles", cocycles);
    Ok(it)
}

type Criterion = (usize, &'static str, u64, fn() -> Result<Items>);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "dimensions and Jacobi", 60, c1),
        (2, "simplicity", 120, c2),
        (3, "isomorphism sigma", 120, c3),
        (4, "isomorphism tau", 180, c4),
        (5, "derivations of AF", 300, c5),
        (6, "second cohomology", 300, c6),
        (7, "pulled-back cocycles", 60, c7),
        (8, "maximal class and centralizers", 60, c8),
        (9, "thin gradings and diamonds", 120, c9),
        (10, "structure constants c(i,j,k,l)", 60, c10),
        (11, "derivation D", 30, c11),
        (12, "property suites", 300, c12),
    ];
    let mut unexpected = Vec::new();
    for (n, title, budget, run) in criteria {
        let start = Instant::now();
        let items = match run() {
            Ok(items) => items.0,
            Err(e) => vec![("run".to_string(), false, e.to_string())],
        };
        let elapsed = start.elapsed();
        let in_budget = elapsed <= Duration::from_secs(budget);
        let failed: Vec<&(String, bool, String)> = items.iter().filter(|i| !i.1).collect();
        let pass = failed.is_empty() && in_budget;
        let mut line = format!("criterion {n:>2} {} {title} ({} checks, {:.2?}, budget {budget} s)", if pass { "PASS" } else { "FAIL" }, items.len(), elapsed);
        for (name, _, detail) in &failed {
            line.push_str(&format!("; failed: {name}"));
            if !detail.is_empty() {
                line.push_str(&format!(" [{detail}]"));
            }
        }
        if !in_budget {
            line.push_str("; over budget");
            unexpected.push(format!("criterion {n} over budget"));
        }
        println!("{line}");
        for (name, ok, _) in &items {
            if *ok == KNOWN_FAILURES.contains(&name.as_str()) {
                unexpected.push(format!("criterion {n}: {name} {}", if *ok { "passed" } else { "failed" }));
            }
        }
        for known in KNOWN_FAILURES {
            if n == criterion_of(known) && !items.iter().any(|i| i.0 == known) {
                unexpected.push(format!("criterion {n}: {known} not evaluated"));
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in unexpected {
            eprintln!("unexpected: {u}");
        }
        ExitCode::FAILURE
    }
}

fn criterion_of(known: &str) -> usize {
    if known.starts_with("H2") {
        6
    } else if known.starts_with("centralizer") {
        8
    } else {
        10
    }
}
