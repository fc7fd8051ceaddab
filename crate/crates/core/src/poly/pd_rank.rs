//! Rank of the partial-derivative (coefficient) matrix of a multilinear
//! polynomial with respect to a split of its variables.

use super::SparsePolynomial;
use crate::error::{Error, Result};
use crate::field::FieldElement;

/// Maximum number of matrix entries materialized.
pub const PD_ENTRY_BUDGET: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdMatrix {
    pub y_block: Vec<String>,
    pub z_block: Vec<String>,
    /// Row `r` is the monomial whose bit `i` selects `y_block[i]`.
    pub rows: Vec<u64>,
    pub cols: Vec<u64>,
    pub entries: Vec<Vec<FieldElement>>,
    pub rank: usize,
}

/// Exact rank by Gaussian elimination.
pub fn rank(matrix: &[Vec<FieldElement>]) -> usize {
    let mut m: Vec<Vec<FieldElement>> = matrix.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..cols {
                let t = &f * &m[r][j];
                m[i][j] = &m[i][j] - &t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn pd_matrix_rank(p: &SparsePolynomial, y_block: &[&str], z_block: &[&str]) -> Result<PdMatrix> {
    if !p.is_multilinear() {
        return Err(Error::NotMultilinear);
    }
    if y_block.iter().any(|y| z_block.contains(y)) {
        return Err(Error::BlocksNotPartition);
    }
    let mut ybits = vec![None; p.vars().len()];
    let mut zbits = vec![None; p.vars().len()];
    for (i, v) in p.vars().iter().enumerate() {
        ybits[i] = y_block.iter().position(|y| y == v);
        zbits[i] = z_block.iter().position(|z| z == v);
        let occurs = p.terms().keys().any(|e| e[i] != 0);
        if occurs && ybits[i].is_none() && zbits[i].is_none() {
            return Err(Error::BlocksNotPartition);
        }
    }
    if y_block.len() >= 64 || z_block.len() >= 64 {
        return Err(Error::BudgetExceeded { estimated: u128::MAX, limit: PD_ENTRY_BUDGET });
    }
    let (nr, nc) = (1u128 << y_block.len(), 1u128 << z_block.len());
    if nr * nc > PD_ENTRY_BUDGET {
        return Err(Error::BudgetExceeded { estimated: nr * nc, limit: PD_ENTRY_BUDGET });
    }
    let field = p.field();
    let mut entries = vec![vec![field.zero(); nc as usize]; nr as usize];
    for (e, c) in p.terms() {
        let (mut r, mut col) = (0u64, 0u64);
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if let Some(b) = ybits[i] {
                r |= 1 << b;
            } else if let Some(b) = zbits[i] {
                col |= 1 << b;
            }
        }
        entries[r as usize][col as usize] = c.clone();
    }
    let rank = rank(&entries);
    Ok(PdMatrix {
        y_block: y_block.iter().map(|s| s.to_string()).collect(),
        z_block: z_block.iter().map(|s| s.to_string()).collect(),
        rows: (0..nr as u64).collect(),
        cols: (0..nc as u64).collect(),
        entries,
        rank,
    })
}
