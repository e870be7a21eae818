//! Set functors on finite sets, presented by finite data on small cardinals.
//!
//! A functor is known either as a black box (cardinality of `F(x)` and the
//! action of maps on element indices) or as a [`SuperFinPresentation`]: the
//! values `F(0), ..., F(n)` with the action of every map between them,
//! extended to all finite sets by the left Kan extension.
//!
//! Finite sets are cardinals `x = {0, ..., x-1}`; elements of `F(x)` are
//! indices `0..card(x)`.

mod black_box;
mod powfin;
mod presentation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use black_box::{ConstantF, FinitePowerset, HomF, IdentityF, KanFunctor, SetFunctor};
pub use powfin::{
    generate_fna, natural_endo_families, powfin_endo_probe, superfinitary_test, FnaValues, SuperfinReport,
    UncoveredElement,
};
pub use presentation::{Evaluation, SuperFinPresentation};

/// A map between cardinals, `map[i] < cod` for every `i < dom`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinFn {
    pub cod: usize,
    pub map: Vec<usize>,
}

impl FinFn {
    pub fn new(cod: usize, map: Vec<usize>) -> Result<Self> {
        if map.iter().any(|&y| y >= cod) {
            return Err(Error::InvalidMorphism(format!("{map:?} does not land in {cod}")));
        }
        Ok(FinFn { cod, map })
    }

    pub fn dom(&self) -> usize {
        self.map.len()
    }

    pub fn identity(n: usize) -> Self {
        FinFn {
            cod: n,
            map: (0..n).collect(),
        }
    }

    /// `self . g`.
    pub fn compose(&self, g: &FinFn) -> FinFn {
        debug_assert_eq!(g.cod, self.dom());
        FinFn {
            cod: self.cod,
            map: g.map.iter().map(|&i| self.map[i]).collect(),
        }
    }

    /// Index of this map among all maps `dom -> cod`, little-endian base `cod`.
    pub fn code(&self) -> usize {
        encode(&self.map, self.cod)
    }

    pub fn from_code(dom: usize, cod: usize, code: usize) -> FinFn {
        FinFn {
            cod,
            map: decode(code, dom, cod),
        }
    }

    /// Every map `dom -> cod`, in code order.
    pub fn all(dom: usize, cod: usize) -> Vec<FinFn> {
        (0..count_maps(dom, cod))
            .map(|c| FinFn::from_code(dom, cod, c))
            .collect()
    }
}

/// `cod^dom`, with `0^0 = 1`.
pub fn count_maps(dom: usize, cod: usize) -> usize {
    cod.pow(dom as u32)
}

pub(crate) fn encode(digits: &[usize], base: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * base + d)
}

pub(crate) fn decode(mut code: usize, len: usize, base: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = code % base.max(1);
            code /= base.max(1);
            d
        })
        .collect()
}
