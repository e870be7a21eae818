//! Small probe objects and cancellation tests against them.
//!
//! Universal properties are cross-checked against every morphism between
//! objects of total carrier size at most a small bound.

use std::collections::{BTreeSet, HashSet};

use super::hom::HomSearch;
use super::ops::{coequalizer, coproduct, kernel_pair};
use super::{Category, Mor, Obj};

/// Default probe size bound.
pub const PROBE_SIZE: usize = 3;

/// All objects with at most `max` elements in total, up to a presentation
/// (isomorphic copies may repeat).
pub fn small_objects(category: &Category, max: usize) -> Vec<Obj> {
    let mut out = Vec::new();
    match category {
        Category::FinSet => out.extend((0..=max).map(Obj::finset)),
        Category::Unary => {
            for n in 0..=max {
                for code in 0..n.pow(n as u32) {
                    let op = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
                    out.push(Obj::unary(op).unwrap());
                }
            }
        }
        Category::Graph => {
            for n in 0..=max {
                let pairs: Vec<(usize, usize)> =
                    (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
                for mask in 0u64..(1u64 << pairs.len()) {
                    let edges: BTreeSet<_> = pairs
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &e)| e)
                        .collect();
                    out.push(Obj::graph(n, edges).unwrap());
                }
            }
        }
        Category::Presheaf(g) => {
            let sorts = g.objects();
            let mut carriers = Vec::new();
            carriers_upto(sorts, max, &mut Vec::new(), &mut carriers);
            for carrier in carriers {
                let sig = category.signature();
                let mut ops: Vec<Vec<usize>> = Vec::with_capacity(sig.len());
                actions(category, &carrier, &sig, &mut ops, &mut out);
            }
        }
    }
    out
}

fn carriers_upto(sorts: usize, budget: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if acc.len() == sorts {
        out.push(acc.clone());
        return;
    }
    for k in 0..=budget {
        acc.push(k);
        carriers_upto(sorts, budget - k, acc, out);
        acc.pop();
    }
}

fn actions(
    category: &Category,
    carrier: &[usize],
    sig: &[(usize, usize)],
    ops: &mut Vec<Vec<usize>>,
    out: &mut Vec<Obj>,
) {
    if ops.len() == sig.len() {
        if let Ok(x) = Obj::new(category.clone(), carrier.to_vec(), ops.clone(), BTreeSet::new()) {
            out.push(x);
        }
        return;
    }
    let (s, t) = sig[ops.len()];
    let (n, m) = (carrier[s], carrier[t]);
    // groupoid arrows act bijectively, so only bijections between equal sorts
    if n != m {
        return;
    }
    for perm in permutations(n) {
        ops.push(perm);
        actions(category, carrier, sig, ops, out);
        ops.pop();
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Left cancellation against all probe morphisms into `dom(f)`, plus the
/// kernel pair of `f`, whose projections are the canonical test pair.
pub fn is_mono_by_probe(f: &Mor, probes: &[Obj]) -> bool {
    let (k, _, _) = kernel_pair(f);
    probes.iter().chain(std::iter::once(&k)).all(|a| {
        let homs = HomSearch::new(a, f.dom()).map(|h| h.collect()).unwrap_or_default();
        let mut seen = HashSet::new();
        homs.iter().all(|g| seen.insert(f.compose(g).unwrap().maps().to_vec()))
    })
}

/// Right cancellation against all probe morphisms out of `cod(f)`, plus the
/// cokernel pair of `f`.
pub fn is_epi_by_probe(f: &Mor, probes: &[Obj]) -> bool {
    let cat = f.cod().category();
    let (_, inj) = coproduct(cat, &[f.cod().clone(), f.cod().clone()]).expect("same category");
    let q = coequalizer(&inj[0].compose(f).unwrap(), &inj[1].compose(f).unwrap()).expect("parallel");
    probes.iter().chain(std::iter::once(q.cod())).all(|b| {
        let homs = HomSearch::new(f.cod(), b).map(|h| h.collect()).unwrap_or_default();
        let mut seen = HashSet::new();
        homs.iter().all(|g| seen.insert(g.compose(f).unwrap().maps().to_vec()))
    })
}

/// The diagonal of a commutative square `v . e = m . u`, if any:
/// `d` with `d . e = u` and `m . d = v`.
pub fn fill_in(e: &Mor, m: &Mor, u: &Mor, v: &Mor) -> Option<Mor> {
    let mut search = HomSearch::new(e.cod(), m.dom()).ok()?;
    for (s, a) in e.dom().elements() {
        search = search.fix(s, e.apply(s, a), u.apply(s, a));
    }
    let mut found = None;
    search.for_each(|maps| {
        let ok = v
            .maps()
            .iter()
            .enumerate()
            .all(|(s, vm)| vm.iter().enumerate().all(|(b, &y)| m.apply(s, maps[s][b]) == y));
        if ok {
            found = Some(maps);
            std::ops::ControlFlow::Break(())
        } else {
            std::ops::ControlFlow::Continue(())
        }
    });
    found.map(|maps| Mor::new(e.cod().clone(), m.dom().clone(), maps).expect("diagonal is a morphism"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cats::{factorize, hom::hom_set, is_epi, is_mono, Groupoid};

    #[test]
    fn probe_family_sizes() {
        assert_eq!(small_objects(&Category::FinSet, 3).len(), 4);
        assert_eq!(small_objects(&Category::Unary, 3).len(), 1 + 1 + 4 + 27);
        assert_eq!(small_objects(&Category::Graph, 2).len(), 1 + 2 + 16);
        // Z2-sets on at most 2 points: empty, one fixed point, two fixed, one swap
        let z2 = Category::presheaf(Groupoid::cyclic(2));
        assert_eq!(small_objects(&z2, 2).len(), 4);
    }

    #[test]
    fn permutations_are_all_distinct() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn reduction_hom_is_epi_not_mono_by_cancellation() {
        let f = Mor::new(Obj::cycle(4), Obj::cycle(2), vec![vec![0, 1, 0, 1]]).unwrap();
        let probes = small_objects(&Category::Unary, PROBE_SIZE);
        assert!(is_epi_by_probe(&f, &probes));
        assert!(!is_mono_by_probe(&f, &probes));
    }

    #[test]
    fn declared_characterizations_agree_with_probes() {
        for cat in [Category::FinSet, Category::Unary, Category::presheaf(Groupoid::cyclic(2))] {
            let objs = small_objects(&cat, 2);
            let probes = small_objects(&cat, PROBE_SIZE);
            for x in &objs {
                for y in &objs {
                    for f in hom_set(x, y).unwrap() {
                        assert_eq!(is_mono(&f), is_mono_by_probe(&f, &probes), "{f}");
                        assert_eq!(is_epi(&f), is_epi_by_probe(&f, &probes), "{f}");
                    }
                }
            }
        }
    }

    #[test]
    fn graph_epis_are_vertex_surjective() {
        let objs = small_objects(&Category::Graph, 2);
        for x in &objs {
            for y in &objs {
                for f in hom_set(x, y).unwrap() {
                    assert_eq!(is_epi(&f), is_epi_by_probe(&f, &objs), "{f}");
                    assert_eq!(is_mono(&f), is_mono_by_probe(&f, &objs), "{f}");
                }
            }
        }
    }

    #[test]
    fn diagonal_fill_in_for_factorizations() {
        // square: e = epi part of f, m = mono part of g, with f = g
        let x = Obj::unary(vec![1, 0, 3, 2]).unwrap();
        let y = Obj::unary(vec![1, 0, 2]).unwrap();
        for f in hom_set(&x, &y).unwrap() {
            let fz = factorize(&f);
            let d = fill_in(&fz.epi, &fz.mono, &fz.epi, &fz.mono).expect("fill-in");
            assert_eq!(d, Mor::identity(&fz.image));
        }
    }
}
