//! Finite-dimensional vector spaces over F_2 and F_3.
//!
//! A space is its dimension; a linear map `F_q^n -> F_q^m` is an `m x n`
//! matrix with entries in `0..q`. Vectors are coordinate columns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinMap {
    pub q: u8,
    pub dom: usize,
    pub cod: usize,
    /// Row-major, `cod` rows of `dom` entries.
    pub rows: Vec<Vec<u8>>,
}

fn check_field(q: u8) -> Result<()> {
    if q == 2 || q == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("field of order {q}")))
    }
}

fn inv(q: u8, a: u8) -> u8 {
    // in F_2 and F_3 every nonzero element is its own inverse
    debug_assert!(!a.is_multiple_of(q));
    a
}

impl LinMap {
    pub fn new(q: u8, dom: usize, cod: usize, rows: Vec<Vec<u8>>) -> Result<Self> {
        check_field(q)?;
        if rows.len() != cod || rows.iter().any(|r| r.len() != dom || r.iter().any(|&a| a >= q)) {
            return Err(Error::InvalidMorphism(format!("not a {cod}x{dom} matrix over F_{q}")));
        }
        Ok(LinMap { q, dom, cod, rows })
    }

    pub fn identity(q: u8, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| u8::from(i == j)).collect())
            .collect();
        LinMap::new(q, n, n, rows).expect("identity")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(q: u8, cod: usize, cols: &[Vec<u8>]) -> Result<Self> {
        let rows = (0..cod).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        LinMap::new(q, cols.len(), cod, rows)
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        let q = u32::from(self.q);
        self.rows
            .iter()
            .map(|r| (r.iter().zip(v).map(|(&a, &b)| u32::from(a) * u32::from(b)).sum::<u32>() % q) as u8)
            .collect()
    }

    /// `self . f`.
    pub fn compose(&self, f: &LinMap) -> Result<LinMap> {
        if f.cod != self.dom || f.q != self.q {
            return Err(Error::NotComposable(format!("F_{}^{} then F_{}^{}", f.q, f.cod, self.q, self.dom)));
        }
        let cols: Vec<Vec<u8>> = (0..f.dom).map(|j| self.apply(&f.column(j))).collect();
        LinMap::from_columns(self.q, self.cod, &cols)
    }

    pub fn rank(&self) -> usize {
        let cols: Vec<Vec<u8>> = (0..self.dom).map(|j| self.column(j)).collect();
        independent_subset(self.q, &cols).len()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.dom
    }

    /// A basis of the image, chosen among the columns.
    pub fn image_basis(&self) -> Vec<Vec<u8>> {
        let cols: Vec<Vec<u8>> = (0..self.dom).map(|j| self.column(j)).collect();
        independent_subset(self.q, &cols).into_iter().map(|j| cols[j].clone()).collect()
    }
}

/// Indices of a maximal independent subset, chosen greedily left to right.
pub fn independent_subset(q: u8, vectors: &[Vec<u8>]) -> Vec<usize> {
    let mut echelon: Vec<(usize, Vec<u8>)> = Vec::new();
    let mut chosen = Vec::new();
    for (j, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (pivot, row) in &echelon {
            if w[*pivot] != 0 {
                let c = w[*pivot];
                for (a, &b) in w.iter_mut().zip(row) {
                    *a = ((u16::from(*a) + u16::from(q - c) * u16::from(b)) % u16::from(q)) as u8;
                }
            }
        }
        if let Some(p) = w.iter().position(|&a| a != 0) {
            let c = inv(q, w[p]);
            for a in w.iter_mut() {
                *a = ((u16::from(*a) * u16::from(c)) % u16::from(q)) as u8;
            }
            echelon.push((p, w));
            chosen.push(j);
        }
    }
    chosen
}

/// Extends an independent list to a basis of `F_q^n` with standard vectors.
pub fn extend_to_basis(q: u8, n: usize, independent: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut all = independent.to_vec();
    all.extend((0..n).map(|i| (0..n).map(|j| u8::from(i == j)).collect()));
    independent_subset(q, &all).into_iter().map(|j| all[j].clone()).collect()
}

/// Solves `a x = b` for square invertible `a` by Gauss-Jordan elimination.
pub fn solve(q: u8, a: &LinMap, b: &[u8]) -> Option<Vec<u8>> {
    let n = a.dom;
    let qq = u16::from(q);
    let mut m: Vec<Vec<u8>> = a
        .rows
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi);
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, p);
        let c = inv(q, m[col][col]);
        for a in m[col].iter_mut() {
            *a = ((u16::from(*a) * u16::from(c)) % qq) as u8;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (a, &b) in m[r].iter_mut().zip(&pivot_row) {
                    *a = ((u16::from(*a) + u16::from(q - f) * u16::from(b)) % qq) as u8;
                }
            }
        }
    }
    Some(m.iter().map(|r| r[n]).collect())
}

/// The projection of `F_q^n` onto the span of the first `k` basis vectors
/// along the span of the rest.
pub fn projection_along(q: u8, basis: &[Vec<u8>], k: usize) -> Result<LinMap> {
    let n = basis.len();
    let b = LinMap::from_columns(q, n, basis)?;
    let cols: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let e: Vec<u8> = (0..n).map(|j| u8::from(i == j)).collect();
            let coords = solve(q, &b, &e).ok_or_else(|| Error::Precondition("not a basis".into()))?;
            let mut v = vec![0u8; n];
            for (c, bv) in coords.iter().zip(basis).take(k) {
                for (a, &x) in v.iter_mut().zip(bv) {
                    *a = ((u16::from(*a) + u16::from(*c) * u16::from(x)) % u16::from(q)) as u8;
                }
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    LinMap::from_columns(q, n, &cols)
}
