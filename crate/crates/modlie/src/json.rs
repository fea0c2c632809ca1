//! The structure-constant interchange format
//! `{p, n, modulus, dim, labels, table: [[i, j, [[k, "c"], ...]], ...]}`.
//!
//! Scalars in the table are strings: the integer itself over F_p and the
//! coefficient list `[c0,...,c_{n-1}]` over F_{p^n}. The modulus is the
//! coefficient list of the defining polynomial, constant term first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::SparseRow;
use crate::scalar::{make_field, Elt, ExtField};

/// `(i, j, [(k, scalar), ...])` for the product [b_i, b_j].
pub type TableEntry = (usize, usize, Vec<(usize, String)>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interchange {
    pub p: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
    pub dim: usize,
    pub labels: Vec<String>,
    pub table: Vec<TableEntry>,
}

impl Interchange {
    pub fn from_algebra(l: &LieAlgebra) -> Self {
        let f = l.field();
        let table = l
            .table_entries()
            .map(|(i, j, row)| (i, j, row.iter().map(|&(k, c)| (k, f.format(c))).collect()))
            .collect();
        Interchange {
            p: f.p(),
            n: f.n(),
            modulus: f.modulus().to_vec(),
            dim: l.dim(),
            labels: l.labels().to_vec(),
            table,
        }
    }

    /// The algebra described, without a Jacobi check.
    pub fn to_algebra(&self) -> Result<LieAlgebra> {
        let f = make_field(self.p as u64, self.n)?;
        if f.modulus() != self.modulus.as_slice() {
            return Err(Error::Parse(format!(
                "modulus {:?} differs from the canonical modulus {:?} of {}",
                self.modulus,
                f.modulus(),
                f.name()
            )));
        }
        if self.labels.len() != self.dim {
            return Err(Error::Parse(format!("{} labels for dimension {}", self.labels.len(), self.dim)));
        }
        let mut entries = Vec::with_capacity(self.table.len());
        for (t, (i, j, row)) in self.table.iter().enumerate() {
            if *i >= self.dim || *j >= self.dim {
                return Err(Error::Parse(format!("table entry {t}: index out of range")));
            }
            let mut r: SparseRow = Vec::with_capacity(row.len());
            for (k, c) in row {
                if *k >= self.dim {
                    return Err(Error::Parse(format!("table entry {t}: index {k} out of range")));
                }
                let c = parse_scalar(&f, c).map_err(|e| Error::Parse(format!("table entry {t}: {e}")))?;
                r.push((*k, c));
            }
            entries.push((*i, *j, r));
        }
        LieAlgebra::from_table(&f, self.labels.clone(), &entries)
    }
}

/// Parse the table form of a scalar.
pub fn parse_scalar(f: &ExtField, s: &str) -> Result<Elt> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad scalar {s:?} for {}", f.name()));
    if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let c: Vec<u32> = inner.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        return f.from_coeffs(&c).map_err(|_| bad());
    }
    let v: i64 = s.parse().map_err(|_| bad())?;
    if f.n() > 1 && !(0..f.p() as i64).contains(&v) {
        return Err(bad());
    }
    Ok(f.from_int(v))
}

/// A field element as its coefficient list, for reports.
pub fn coeff_list(f: &ExtField, a: Elt) -> Vec<u32> {
    f.coeffs(a)
}

pub fn export_json(l: &LieAlgebra) -> String {
    serde_json::to_string_pretty(&Interchange::from_algebra(l)).expect("serializable")
}

pub fn import_json(s: &str) -> Result<LieAlgebra> {
    let x: Interchange =
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    x.to_algebra()
}
