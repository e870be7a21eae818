//! Finitely described infinite objects.
//!
//! A symbolic object has a canonical numbering of its elements in which every
//! window is a prefix, so windows are nested and the inclusion of one window
//! into a larger one is the identity on indices.
//!
//! * `Ray`: vertices `0, 1, 2, ...` with edges `i -> i+1`.
//! * `LoopRay`: vertex `0` carrying a loop, and a disjoint ray `1 -> 2 -> ...`.
//! * `CycleFamily`: the coproduct of one cycle `C_p` per prime `p`, summands in
//!   increasing order of `p`.
//!
//! For the graphs the window bound counts vertices; for the cycle family it
//! bounds the primes taken.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::hom::HomSearch;
use super::ops::{coproduct, restrict};
use super::{Category, Mor, Obj};
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolicObject {
    Ray,
    LoopRay,
    CycleFamily,
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn primes_upto(n: usize) -> Vec<usize> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

/// The first `k` primes.
pub fn first_primes(k: usize) -> Vec<usize> {
    (2..).filter(|&p| is_prime(p)).take(k).collect()
}

pub fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Homomorphisms from a finite object into a window of a symbolic object.
#[derive(Clone, Debug)]
pub struct WindowedHoms {
    pub window: usize,
    pub homs: Vec<Mor>,
    /// Whether `homs` is the complete hom-set into the infinite object.
    pub complete: bool,
}

impl SymbolicObject {
    pub fn category(&self) -> Category {
        match self {
            SymbolicObject::Ray | SymbolicObject::LoopRay => Category::Graph,
            SymbolicObject::CycleFamily => Category::Unary,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SymbolicObject::Ray => "Ray",
            SymbolicObject::LoopRay => "LoopRay",
            SymbolicObject::CycleFamily => "CycleFamily",
        }
    }

    /// The finite full substructure visible through a window.
    pub fn window(&self, bound: usize) -> Obj {
        match self {
            SymbolicObject::Ray => Obj::path(bound),
            SymbolicObject::LoopRay => {
                let mut edges: Vec<(usize, usize)> = (2..bound).map(|i| (i - 1, i)).collect();
                if bound > 0 {
                    edges.push((0, 0));
                }
                Obj::graph(bound, edges).unwrap()
            }
            SymbolicObject::CycleFamily => cycles_coproduct(&primes_upto(bound)),
        }
    }

    /// The `k`-th object of the canonical chain: `Path_k`, the loop vertex with
    /// a `(k-1)`-vertex path, or the first `k` prime cycles.
    pub fn prefix(&self, k: usize) -> Obj {
        match self {
            SymbolicObject::Ray | SymbolicObject::LoopRay => self.window(k),
            SymbolicObject::CycleFamily => cycles_coproduct(&first_primes(k)),
        }
    }

    /// The window bound whose window equals `prefix(k)`.
    pub fn window_of_prefix(&self, k: usize) -> usize {
        match self {
            SymbolicObject::Ray | SymbolicObject::LoopRay => k,
            SymbolicObject::CycleFamily => first_primes(k).last().copied().unwrap_or(1),
        }
    }

    /// Inclusion of `prefix(k)` into the window of the given bound.
    pub fn leg(&self, k: usize, window: usize) -> Result<Mor> {
        let p = self.prefix(k);
        let w = self.window(window);
        if p.size() > w.size() {
            return Err(Error::WindowExhausted {
                object: self.name().into(),
                bound: window,
            });
        }
        let maps = vec![(0..p.size()).collect()];
        Mor::new(p, w, maps)
    }

    /// The chain `prefix(1) -> ... -> prefix(k)` of inclusions.
    pub fn canonical_chain(&self, k: usize) -> Vec<Mor> {
        (1..k)
            .map(|i| {
                let (a, b) = (self.prefix(i), self.prefix(i + 1));
                let maps = vec![(0..a.size()).collect()];
                Mor::new(a, b, maps).expect("prefixes are nested")
            })
            .collect()
    }

    /// Morphisms `x -> self` that land inside the window.
    pub fn homs_from(&self, x: &Obj, window: usize) -> Result<WindowedHoms> {
        let w = Arc::new(self.window(window));
        let homs = HomSearch::from_arcs(Arc::new(x.clone()), w.clone())?.collect();
        let complete = match self {
            SymbolicObject::Ray | SymbolicObject::LoopRay => {
                // a hom touching the last vertex can be shifted further out; with
                // room to spare every hom into the ray part touches it once shifted
                window > x.size()
                    && homs
                        .iter()
                        .all(|h: &Mor| window == 0 || !h.maps()[0].contains(&(window - 1)))
            }
            SymbolicObject::CycleFamily => x
                .cycle_lengths()
                .iter()
                .all(|&l| prime_factors(l).iter().all(|&p| p <= window)),
        };
        Ok(WindowedHoms {
            window,
            homs,
            complete,
        })
    }

    /// The complete hom-set, or an exhaustion error if the window cannot hold it.
    pub fn hom_set(&self, x: &Obj, window: usize) -> Result<Vec<Mor>> {
        let wh = self.homs_from(x, window)?;
        if !wh.complete {
            return Err(Error::WindowExhausted {
                object: self.name().into(),
                bound: window,
            });
        }
        Ok(wh.homs)
    }

    /// Exact decision whether some morphism `x -> self` exists.
    pub fn has_hom_from(&self, x: &Obj) -> Result<bool> {
        x.check_same_category(&self.window(0))?;
        Ok(match self {
            SymbolicObject::LoopRay => true,
            SymbolicObject::CycleFamily => x.cycle_lengths().iter().all(|&l| l >= 2),
            SymbolicObject::Ray => has_grading(x),
        })
    }

    /// Finitely generated subobjects with at most `bound` elements inside the
    /// window, as inclusions into the window: the intervals of the ray, or
    /// the finite unions of prime summands. These are cofinal among all
    /// finitely generated subobjects.
    pub fn fg_subobjects(&self, bound: usize, window: usize) -> Vec<Mor> {
        let w = self.window(window);
        let mut out = vec![restrict(&w, &[Vec::new()], None).unwrap().1];
        match self {
            SymbolicObject::Ray | SymbolicObject::LoopRay => {
                let first = if *self == SymbolicObject::LoopRay { 1 } else { 0 };
                if *self == SymbolicObject::LoopRay && window > 0 {
                    out.push(restrict(&w, &[vec![0]], None).unwrap().1);
                }
                for len in 1..=bound {
                    for start in first..window {
                        if start + len > window {
                            break;
                        }
                        let members = vec![(start..start + len).collect()];
                        out.push(restrict(&w, &members, None).unwrap().1);
                    }
                }
            }
            SymbolicObject::CycleFamily => {
                let ps = primes_upto(window);
                let mut offsets = Vec::new();
                let mut acc = 0;
                for &p in &ps {
                    offsets.push(acc);
                    acc += p;
                }
                for mask in 1u64..(1u64 << ps.len().min(63)) {
                    let chosen: Vec<usize> = (0..ps.len()).filter(|&i| mask & (1 << i) != 0).collect();
                    let size: usize = chosen.iter().map(|&i| ps[i]).sum();
                    if size > bound {
                        continue;
                    }
                    let members = vec![chosen
                        .iter()
                        .flat_map(|&i| offsets[i]..offsets[i] + ps[i])
                        .collect()];
                    out.push(restrict(&w, &members, None).unwrap().1);
                }
                out.sort_by_key(|m| m.dom().size());
            }
        }
        out
    }
}

fn cycles_coproduct(lengths: &[usize]) -> Obj {
    let cycles: Vec<Obj> = lengths.iter().map(|&p| Obj::cycle(p)).collect();
    coproduct(&Category::Unary, &cycles).unwrap().0
}

/// Whether every weakly connected component admits heights with
/// `h(v) = h(u) + 1` along each edge, i.e. maps into the ray.
fn has_grading(x: &Obj) -> bool {
    let n = x.size();
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for &(u, v) in x.edges() {
        adj[u].push((v, 1));
        adj[v].push((u, -1));
    }
    let mut height: Vec<Option<i64>> = vec![None; n];
    for s in 0..n {
        if height[s].is_some() {
            continue;
        }
        height[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let hu = height[u].unwrap();
            for &(v, d) in &adj[u] {
                match height[v] {
                    None => {
                        height[v] = Some(hu + d);
                        queue.push_back(v);
                    }
                    Some(hv) if hv != hu + d => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// A uniformly described endomorphism of a symbolic object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndoRule {
    /// Ray vertices move `c` steps forward; the loop vertex stays put.
    Shift(usize),
    /// Everything goes to the loop vertex.
    ConstLoop,
    /// Every prime cycle rotates by `r` positions.
    Rotation(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolicEndo {
    pub object: SymbolicObject,
    pub rule: EndoRule,
}

impl SymbolicEndo {
    pub fn new(object: SymbolicObject, rule: EndoRule) -> Result<Self> {
        let ok = matches!(
            (object, rule),
            (SymbolicObject::Ray, EndoRule::Shift(_))
                | (SymbolicObject::LoopRay, EndoRule::Shift(_) | EndoRule::ConstLoop)
                | (SymbolicObject::CycleFamily, EndoRule::Rotation(_))
        );
        if !ok {
            return Err(Error::Unsupported(format!("{rule:?} on {}", object.name())));
        }
        Ok(SymbolicEndo { object, rule })
    }

    pub fn identity(object: SymbolicObject) -> Self {
        let rule = match object {
            SymbolicObject::CycleFamily => EndoRule::Rotation(0),
            _ => EndoRule::Shift(0),
        };
        SymbolicEndo { object, rule }
    }

    /// The window bound of the codomain needed for the restriction to `window`.
    pub fn target_window(&self, window: usize) -> usize {
        match self.rule {
            EndoRule::Shift(c) => window + c,
            _ => window,
        }
    }

    /// Restriction to `window(w) -> window(target_window(w))`.
    pub fn restrict(&self, window: usize) -> Mor {
        let dom = self.object.window(window);
        let cod = self.object.window(self.target_window(window));
        let map: Vec<usize> = match self.rule {
            EndoRule::Shift(c) => (0..window)
                .map(|v| {
                    if self.object == SymbolicObject::LoopRay && v == 0 {
                        0
                    } else {
                        v + c
                    }
                })
                .collect(),
            EndoRule::ConstLoop => vec![0; window],
            EndoRule::Rotation(r) => {
                let mut map = Vec::with_capacity(dom.size());
                let mut base = 0;
                for p in primes_upto(window) {
                    map.extend((0..p).map(|i| base + (i + r) % p));
                    base += p;
                }
                map
            }
        };
        Mor::new(dom, cod, vec![map]).expect("uniform endomorphism")
    }

    /// Size of the image of the restriction to a window.
    pub fn image_size(&self, window: usize) -> usize {
        let m = self.restrict(window);
        m.image_sets()[0].iter().filter(|&&b| b).count()
    }
}
