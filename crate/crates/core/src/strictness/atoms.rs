//! Atoms of presheaves on a finite groupoid.
//!
//! Every presheaf on a groupoid is the coproduct of its single-generator
//! subpresheaves, and each of these is a quotient of a representable.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cats::ops::{coproduct, generated, isomorphism, restrict};
use crate::cats::{Category, Groupoid, Mor, Obj};
use crate::error::{Error, Result};

/// The representable presheaf at `x`: sort `y` holds the arrows `x -> y`,
/// and `h` acts by postcomposition.
pub fn representable(g: &Arc<Groupoid>, x: usize) -> Obj {
    let hom: Vec<Vec<usize>> = (0..g.objects()).map(|y| g.hom(x, y)).collect();
    let index = |y: usize, a: usize| hom[y].iter().position(|&b| b == a).expect("arrow in hom-set");
    let ops = g
        .arrows()
        .iter()
        .enumerate()
        .map(|(h, &(s, t))| hom[s].iter().map(|&a| index(t, g.compose(h, a).expect("composable"))).collect())
        .collect();
    Obj::presheaf(g, hom.iter().map(Vec::len).collect(), ops).expect("representable presheaf")
}

/// Quotient of a presheaf by a per-sort labelling that is compatible with the action.
fn quotient_by_labels(x: &Obj, labels: &[Vec<usize>]) -> Option<Obj> {
    let counts: Vec<usize> = labels.iter().map(|l| l.iter().max().map_or(0, |m| m + 1)).collect();
    let sig = x.category().signature();
    let mut ops = Vec::with_capacity(sig.len());
    for (o, &(s, t)) in sig.iter().enumerate() {
        let mut table = vec![usize::MAX; counts[s]];
        for (e, &l) in labels[s].iter().enumerate() {
            let image = labels[t][x.op(o)[e]];
            if table[l] == usize::MAX {
                table[l] = image;
            } else if table[l] != image {
                return None;
            }
        }
        ops.push(table);
    }
    Obj::new(x.category().clone(), counts, ops, BTreeSet::new()).ok()
}

/// All labellings of `n` elements as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, acc: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if acc.len() == n {
            out.push(acc.clone());
            return;
        }
        for b in 0..=blocks {
            acc.push(b);
            go(n, acc, blocks.max(b + 1), out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

fn all_sort_partitions(carrier: &[usize]) -> Vec<Vec<Vec<usize>>> {
    carrier.iter().fold(vec![Vec::new()], |acc, &n| {
        let parts = set_partitions(n);
        acc.into_iter()
            .flat_map(|prefix| {
                parts.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    /// The object whose representable this atom is a quotient of.
    pub generator_sort: usize,
    pub object: Obj,
}

/// Every quotient of a representable presheaf, up to isomorphism.
pub fn atoms_of_presheaves(g: &Arc<Groupoid>) -> Vec<Atom> {
    let mut atoms: Vec<Atom> = Vec::new();
    for x in 0..g.objects() {
        let rep = representable(g, x);
        for labels in all_sort_partitions(rep.carrier()) {
            let Some(q) = quotient_by_labels(&rep, &labels) else { continue };
            if atoms.iter().all(|a| isomorphism(&a.object, &q).is_none()) {
                atoms.push(Atom {
                    generator_sort: x,
                    object: q,
                });
            }
        }
    }
    atoms
}

/// A presheaf has a single orbit iff it is nonempty and generated by each of its elements.
pub fn is_single_orbit(x: &Obj) -> bool {
    x.size() > 0 && x.elements().all(|e| generated(x, &[e]).0.size() == x.size())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decomposition {
    /// Generated subpresheaves `A^x`, one per class of elements generating the same one.
    pub summands: Vec<Obj>,
    pub inclusions: Vec<Mor>,
}

impl Decomposition {
    /// The comparison map from the coproduct of the summands.
    pub fn comparison(&self, x: &Obj) -> Result<(Obj, Mor)> {
        let (sum, injections) = coproduct(x.category(), &self.summands)?;
        let mut maps: Vec<Vec<usize>> = sum.carrier().iter().map(|&n| vec![0; n]).collect();
        for (inj, incl) in injections.iter().zip(&self.inclusions) {
            for (s, &n) in inj.dom().carrier().iter().enumerate() {
                for e in 0..n {
                    maps[s][inj.apply(s, e)] = incl.apply(s, e);
                }
            }
        }
        let m = Mor::new(sum.clone(), x.clone(), maps)?;
        Ok((sum, m))
    }
}

/// Splits a presheaf on a groupoid into its orbits.
pub fn decompose_into_atoms(x: &Obj) -> Result<Decomposition> {
    if !matches!(x.category(), Category::Presheaf(_) | Category::FinSet) {
        return Err(Error::Unsupported(format!("atom decomposition in {}", x.category())));
    }
    let mut seen: Vec<Vec<bool>> = x.carrier().iter().map(|&n| vec![false; n]).collect();
    let mut summands = Vec::new();
    let mut inclusions = Vec::new();
    for (s, e) in x.elements() {
        if seen[s][e] {
            continue;
        }
        let (sub, incl) = generated(x, &[(s, e)]);
        for (t, members) in incl.maps().iter().enumerate() {
            for &m in members {
                seen[t][m] = true;
            }
        }
        summands.push(sub);
        inclusions.push(incl);
    }
    Ok(Decomposition {
        summands,
        inclusions,
    })
}

/// A random presheaf of at most `max` elements: a random coproduct of atoms
/// with every sort shuffled.
pub fn random_presheaf(g: &Arc<Groupoid>, max: usize, rng: &mut impl Rng) -> Obj {
    let atoms = atoms_of_presheaves(g);
    let cat = Category::Presheaf(g.clone());
    let mut parts = Vec::new();
    let mut size = 0;
    loop {
        let fitting: Vec<&Atom> = atoms.iter().filter(|a| size + a.object.size() <= max).collect();
        if fitting.is_empty() || (size > 0 && rng.gen_bool(0.25)) {
            break;
        }
        let a = fitting[rng.gen_range(0..fitting.len())];
        size += a.object.size();
        parts.push(a.object.clone());
    }
    let (sum, _) = coproduct(&cat, &parts).expect("coproduct of presheaves");
    let perms: Vec<Vec<usize>> = sum
        .carrier()
        .iter()
        .map(|&n| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let ops = cat
        .signature()
        .iter()
        .enumerate()
        .map(|(o, &(s, t))| {
            let mut table = vec![0; sum.sort_size(s)];
            for e in 0..sum.sort_size(s) {
                table[perms[s][e]] = perms[t][sum.op(o)[e]];
            }
            table
        })
        .collect();
    Obj::presheaf(g, sum.carrier().to_vec(), ops).expect("relabelled presheaf")
}

/// The sub-presheaf on a union of summands, with its inclusion.
pub(crate) fn union_of_summands(x: &Obj, dec: &Decomposition, chosen: &[usize]) -> Result<(Obj, Mor)> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); x.carrier().len()];
    for &i in chosen {
        for (s, m) in dec.inclusions[i].maps().iter().enumerate() {
            members[s].extend(m);
        }
    }
    members.iter_mut().for_each(|m| m.sort_unstable());
    restrict(x, &members, None)
}
