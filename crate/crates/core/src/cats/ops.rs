//! Factorizations and finite (co)limits on finite presentations.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::hom::HomSearch;
use super::{Category, Mor, Obj};
use crate::error::{Error, Result};
use crate::union_find::UnionFind;

/// Subobject enumeration is by subset masks; beyond this it is refused.
pub const SUBOBJECT_ELEMENT_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub image: Obj,
    pub epi: Mor,
    pub mono: Mor,
}

/// The substructure on the given members of each sort.
///
/// `members` must be closed under the operations. For graphs `edges` selects
/// the edges kept (in the numbering of `x`); `None` keeps every induced edge.
/// Returns the subobject and its inclusion, members keeping their order.
pub fn restrict(
    x: &Obj,
    members: &[Vec<usize>],
    edges: Option<&BTreeSet<(usize, usize)>>,
) -> Result<(Obj, Mor)> {
    let cat = x.category().clone();
    let mut index = Vec::with_capacity(members.len());
    for (s, m) in members.iter().enumerate() {
        let mut idx = vec![usize::MAX; x.sort_size(s)];
        for (i, &e) in m.iter().enumerate() {
            idx[e] = i;
        }
        index.push(idx);
    }
    let mut ops = Vec::new();
    for (o, &(s, t)) in cat.signature().iter().enumerate() {
        let mut table = Vec::with_capacity(members[s].len());
        for &e in &members[s] {
            let y = index[t][x.op(o)[e]];
            if y == usize::MAX {
                return Err(Error::Precondition(format!(
                    "member set of {x} is not closed under operation {o}"
                )));
            }
            table.push(y);
        }
        ops.push(table);
    }
    let kept: BTreeSet<(usize, usize)> = match edges {
        Some(es) => es.clone(),
        None => x
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| index[0][u] != usize::MAX && index[0][v] != usize::MAX)
            .collect(),
    };
    let mut sub_edges = BTreeSet::new();
    for (u, v) in kept {
        if !x.has_edge(u, v) || index[0][u] == usize::MAX || index[0][v] == usize::MAX {
            return Err(Error::Precondition("edge outside the member set".into()));
        }
        sub_edges.insert((index[0][u], index[0][v]));
    }
    let carrier = members.iter().map(Vec::len).collect();
    let sub = Obj::new(cat, carrier, ops, sub_edges)?;
    let incl = Mor::new_unchecked(Arc::new(sub.clone()), Arc::new(x.clone()), members.to_vec());
    Ok((sub, incl))
}

/// The substructure generated by the given elements (closure under the operations).
pub fn generated(x: &Obj, gens: &[(usize, usize)]) -> (Obj, Mor) {
    let sig = x.category().signature();
    let mut inside: Vec<Vec<bool>> = x.carrier().iter().map(|&n| vec![false; n]).collect();
    let mut stack: Vec<(usize, usize)> = gens.to_vec();
    while let Some((s, e)) = stack.pop() {
        if std::mem::replace(&mut inside[s][e], true) {
            continue;
        }
        for (o, &(src, t)) in sig.iter().enumerate() {
            if src == s {
                stack.push((t, x.op(o)[e]));
            }
        }
    }
    let members: Vec<Vec<usize>> = inside
        .iter()
        .map(|m| (0..m.len()).filter(|&i| m[i]).collect())
        .collect();
    restrict(x, &members, None).expect("generated set is closed")
}

/// (strong epi, mono) factorization through the image.
///
/// Image elements keep codomain order; for graphs the image carries exactly
/// the images of edges.
pub fn factorize(f: &Mor) -> Factorization {
    let cod = f.cod();
    let members: Vec<Vec<usize>> = f
        .image_sets()
        .iter()
        .map(|m| (0..m.len()).filter(|&i| m[i]).collect())
        .collect();
    let edges: BTreeSet<(usize, usize)> = f
        .dom()
        .edges()
        .iter()
        .map(|&(u, v)| (f.apply(0, u), f.apply(0, v)))
        .collect();
    let (image, mono) = restrict(cod, &members, Some(&edges)).expect("images are closed");
    let mut pos: Vec<Vec<usize>> = cod.carrier().iter().map(|&n| vec![usize::MAX; n]).collect();
    for (s, m) in members.iter().enumerate() {
        for (i, &e) in m.iter().enumerate() {
            pos[s][e] = i;
        }
    }
    let maps = f
        .maps()
        .iter()
        .enumerate()
        .map(|(s, m)| m.iter().map(|&y| pos[s][y]).collect())
        .collect();
    let epi = Mor::new_unchecked(f.dom_arc().clone(), mono.dom_arc().clone(), maps);
    Factorization { image, epi, mono }
}

/// The coproduct with its injections; summands are laid out in order per sort.
pub fn coproduct(category: &Category, objs: &[Obj]) -> Result<(Obj, Vec<Mor>)> {
    for x in objs {
        if x.category() != category {
            return Err(Error::CategoryMismatch {
                expected: category.to_string(),
                found: x.category().to_string(),
            });
        }
    }
    let sorts = category.sorts();
    let sig = category.signature();
    let mut carrier = vec![0; sorts];
    let mut ops = vec![Vec::new(); sig.len()];
    let mut edges = BTreeSet::new();
    let mut offsets = Vec::with_capacity(objs.len());
    for x in objs {
        offsets.push(carrier.clone());
        for (o, &(_, t)) in sig.iter().enumerate() {
            ops[o].extend(x.op(o).iter().map(|&y| y + carrier[t]));
        }
        edges.extend(x.edges().iter().map(|&(u, v)| (u + carrier[0], v + carrier[0])));
        for s in 0..sorts {
            carrier[s] += x.sort_size(s);
        }
    }
    let sum = Arc::new(Obj::new(category.clone(), carrier, ops, edges)?);
    let injections = objs
        .iter()
        .zip(&offsets)
        .map(|(x, off)| {
            let maps = (0..sorts)
                .map(|s| (0..x.sort_size(s)).map(|i| i + off[s]).collect())
                .collect();
            Mor::new_unchecked(Arc::new(x.clone()), sum.clone(), maps)
        })
        .collect();
    Ok(((*sum).clone(), injections))
}

/// The quotient of `cod(f)` by the congruence generated by `f(x) ~ g(x)`.
///
/// Graphs are quotiented on vertices; the quotient keeps the image edges.
pub fn coequalizer(f: &Mor, g: &Mor) -> Result<Mor> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(Error::Precondition("coequalizer of a non-parallel pair".into()));
    }
    let y = f.cod();
    let off = y.offsets();
    let mut uf = UnionFind::new(y.size());
    for (s, x) in f.dom().elements() {
        uf.union(off[s] + f.apply(s, x), off[s] + g.apply(s, x));
    }
    let sig = y.category().signature();
    // congruence closure: related elements must have related successors
    loop {
        let mut changed = false;
        for (o, &(s, t)) in sig.iter().enumerate() {
            let mut succ_of_root = vec![usize::MAX; y.size()];
            for a in 0..y.sort_size(s) {
                let r = uf.find(off[s] + a);
                let b = off[t] + y.op(o)[a];
                if succ_of_root[r] == usize::MAX {
                    succ_of_root[r] = b;
                } else if uf.union(succ_of_root[r], b) {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let (labels, _) = uf.labels();
    // renumber per sort
    let mut sort_label: Vec<Vec<usize>> = Vec::new();
    let mut carrier = Vec::new();
    for s in 0..y.carrier().len() {
        let mut seen = std::collections::BTreeMap::new();
        let mut map = Vec::with_capacity(y.sort_size(s));
        for a in 0..y.sort_size(s) {
            let next = seen.len();
            map.push(*seen.entry(labels[off[s] + a]).or_insert(next));
        }
        carrier.push(seen.len());
        sort_label.push(map);
    }
    let mut ops = Vec::new();
    for (o, &(s, t)) in sig.iter().enumerate() {
        let mut table = vec![0; carrier[s]];
        for a in 0..y.sort_size(s) {
            table[sort_label[s][a]] = sort_label[t][y.op(o)[a]];
        }
        ops.push(table);
    }
    let edges = y
        .edges()
        .iter()
        .map(|&(u, v)| (sort_label[0][u], sort_label[0][v]))
        .collect();
    let q = Obj::new(y.category().clone(), carrier, ops, edges)?;
    Ok(Mor::new_unchecked(f.cod_arc().clone(), Arc::new(q), sort_label))
}

/// The pullback of `f` along itself, pairs listed lexicographically.
pub fn kernel_pair(f: &Mor) -> (Obj, Mor, Mor) {
    let x = f.dom();
    let sorts = x.carrier().len();
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(sorts);
    let mut index: Vec<std::collections::HashMap<(usize, usize), usize>> = Vec::new();
    for s in 0..sorts {
        let n = x.sort_size(s);
        let ps: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| f.apply(s, a) == f.apply(s, b))
            .collect();
        index.push(ps.iter().enumerate().map(|(i, &p)| (p, i)).collect());
        pairs.push(ps);
    }
    let sig = x.category().signature();
    let ops = sig
        .iter()
        .enumerate()
        .map(|(o, &(s, t))| {
            pairs[s]
                .iter()
                .map(|&(a, b)| index[t][&(x.op(o)[a], x.op(o)[b])])
                .collect()
        })
        .collect();
    let mut edges = BTreeSet::new();
    if x.category().has_edges() {
        for &(u1, v1) in x.edges() {
            for &(u2, v2) in x.edges() {
                if let (Some(&p), Some(&q)) = (index[0].get(&(u1, u2)), index[0].get(&(v1, v2))) {
                    edges.insert((p, q));
                }
            }
        }
    }
    let carrier = pairs.iter().map(Vec::len).collect();
    let k = Arc::new(Obj::new(x.category().clone(), carrier, ops, edges).expect("pullback"));
    let proj = |first: bool| {
        let maps = pairs
            .iter()
            .map(|ps| ps.iter().map(|&(a, b)| if first { a } else { b }).collect())
            .collect();
        Mor::new_unchecked(k.clone(), f.dom_arc().clone(), maps)
    };
    let (p1, p2) = (proj(true), proj(false));
    ((*k).clone(), p1, p2)
}

/// Every subobject of a finite object, as inclusions, ordered by size then by
/// member mask. Graph subobjects are not required to be induced.
pub fn subobjects(x: &Obj) -> Result<Vec<Mor>> {
    let n = x.size();
    if n > SUBOBJECT_ELEMENT_LIMIT {
        return Err(Error::Precondition(format!(
            "{x} has {n} elements; subobject enumeration is limited to {SUBOBJECT_ELEMENT_LIMIT}"
        )));
    }
    let off = x.offsets();
    let sig = x.category().signature();
    let mut closed: Vec<u32> = (0u32..(1u32 << n))
        .filter(|&mask| {
            sig.iter().enumerate().all(|(o, &(s, t))| {
                (0..x.sort_size(s)).all(|a| {
                    mask & (1 << (off[s] + a)) == 0 || mask & (1 << (off[t] + x.op(o)[a])) != 0
                })
            })
        })
        .collect();
    closed.sort_by_key(|&m| (m.count_ones(), m));
    let mut out = Vec::new();
    for mask in closed {
        let members: Vec<Vec<usize>> = x
            .carrier()
            .iter()
            .enumerate()
            .map(|(s, &k)| (0..k).filter(|&a| mask & (1 << (off[s] + a)) != 0).collect())
            .collect();
        if x.category().has_edges() {
            let induced: Vec<(usize, usize)> = x
                .edges()
                .iter()
                .copied()
                .filter(|&(u, v)| mask & (1 << u) != 0 && mask & (1 << v) != 0)
                .collect();
            if induced.len() > SUBOBJECT_ELEMENT_LIMIT {
                return Err(Error::Precondition("too many edges for subgraph enumeration".into()));
            }
            for emask in 0u32..(1u32 << induced.len()) {
                let kept: BTreeSet<(usize, usize)> = induced
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| emask & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                out.push(restrict(x, &members, Some(&kept))?.1);
            }
        } else {
            out.push(restrict(x, &members, None)?.1);
        }
    }
    Ok(out)
}

/// An isomorphism `a -> b`, if one exists.
pub fn isomorphism(a: &Obj, b: &Obj) -> Option<Mor> {
    if a.category() != b.category() || a.carrier() != b.carrier() || a.edges().len() != b.edges().len() {
        return None;
    }
    // injective with equal finite sizes and edge counts is bijective on both
    HomSearch::new(a, b).ok()?.injective().first()
}

pub fn is_mono(f: &Mor) -> bool {
    f.is_injective()
}

/// Epimorphisms are the carrier-surjective maps; for graphs on vertices only.
pub fn is_epi(f: &Mor) -> bool {
    f.is_surjective()
}

/// Strong epimorphisms: carrier-surjective, and for graphs also surjective on edges.
pub fn is_strong_epi(f: &Mor) -> bool {
    f.is_surjective() && (!f.cod().category().has_edges() || f.is_edge_surjective())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cats::hom::hom_set;
    use crate::cats::Groupoid;

    #[test]
    fn factorize_identity_and_constant() {
        let x = Obj::finset(3);
        let fz = factorize(&Mor::identity(&x));
        assert_eq!(fz.image, x);
        assert_eq!(fz.epi, Mor::identity(&x));
        let c = Mor::new(x.clone(), x.clone(), vec![vec![1, 1, 1]]).unwrap();
        let fz = factorize(&c);
        assert_eq!(fz.image.size(), 1);
        assert_eq!(fz.mono.compose(&fz.epi).unwrap(), c);
    }

    #[test]
    fn graph_image_keeps_only_image_edges() {
        // a 2-path folded onto one edge of a 2-cycle
        let cod = Obj::graph(2, [(0, 1), (1, 0)]).unwrap();
        let f = Mor::new(Obj::path(3), cod, vec![vec![0, 1, 0]]).unwrap();
        let fz = factorize(&f);
        assert_eq!(fz.image.size(), 2);
        assert_eq!(fz.image.edges().len(), 2);
        let g = Mor::new(Obj::path(2), Obj::graph(2, [(0, 1), (1, 0)]).unwrap(), vec![vec![0, 1]]).unwrap();
        let fz = factorize(&g);
        assert_eq!(fz.image.edges().iter().copied().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(is_strong_epi(&fz.epi) && is_mono(&fz.mono));
        assert!(!is_strong_epi(&Mor::new(Obj::graph(2, []).unwrap(), Obj::path(2), vec![vec![0, 1]]).unwrap()));
    }

    #[test]
    fn coproduct_examples() {
        let (e, inj) = coproduct(&Category::Unary, &[]).unwrap();
        assert!(e.is_empty() && inj.is_empty());
        let (s, _) = coproduct(&Category::Unary, &[Obj::cycle(2), Obj::cycle(3)]).unwrap();
        assert_eq!(s.size(), 5);
        assert_eq!(s.cycle_lengths(), vec![2, 3]);
        let (g, _) = coproduct(&Category::Graph, &[Obj::path(2), Obj::path(2)]).unwrap();
        assert_eq!((g.size(), g.edges().len()), (4, 2));
    }

    #[test]
    fn coequalizer_examples() {
        let f = Mor::new(Obj::cycle(4), Obj::cycle(2), vec![vec![0, 1, 0, 1]]).unwrap();
        let q = coequalizer(&f, &f).unwrap();
        assert!(isomorphism(q.cod(), f.cod()).is_some());
        let a = Mor::new(Obj::finset(1), Obj::finset(2), vec![vec![0]]).unwrap();
        let b = Mor::new(Obj::finset(1), Obj::finset(2), vec![vec![1]]).unwrap();
        assert_eq!(coequalizer(&a, &b).unwrap().cod().size(), 1);
    }

    #[test]
    fn congruence_closure_propagates() {
        // generated congruence on C_4 from 0 ~ 2 is {0,2},{1,3}
        let c4 = Obj::cycle(4);
        let k = kernel_pair(&Mor::new(c4.clone(), Obj::cycle(2), vec![vec![0, 1, 0, 1]]).unwrap());
        let q = coequalizer(&k.1, &k.2).unwrap();
        assert_eq!(q.cod().cycle_lengths(), vec![2]);
    }

    #[test]
    fn kernel_pair_of_c4_to_c2() {
        let f = Mor::new(Obj::cycle(4), Obj::cycle(2), vec![vec![0, 1, 0, 1]]).unwrap();
        let (k, p1, p2) = kernel_pair(&f);
        assert_eq!(k.size(), 8);
        assert_eq!(f.compose(&p1).unwrap(), f.compose(&p2).unwrap());
    }

    #[test]
    fn subobject_examples() {
        assert_eq!(subobjects(&Obj::finset(2)).unwrap().len(), 4);
        let subs = subobjects(&Obj::cycle(4)).unwrap();
        assert_eq!(subs.iter().map(|m| m.dom().size()).collect::<Vec<_>>(), vec![0, 4]);
        // non-induced subgraphs of a single edge: {}, {0}, {1}, {0,1}, {0->1}
        assert_eq!(subobjects(&Obj::path(2)).unwrap().len(), 5);
    }

    #[test]
    fn isomorphism_search() {
        let a = Obj::unary(vec![1, 0, 2]).unwrap();
        let b = Obj::unary(vec![0, 2, 1]).unwrap();
        assert!(isomorphism(&a, &b).is_some());
        assert!(isomorphism(&a, &Obj::cycle(3)).is_none());
        let g = Arc::new(Groupoid::cyclic(2));
        let x = Obj::presheaf(&g, vec![2], vec![vec![0, 1], vec![1, 0]]).unwrap();
        let y = Obj::presheaf(&g, vec![2], vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(isomorphism(&x, &y).is_none());
    }

    #[test]
    fn epi_mono_on_reduction() {
        let f = Mor::new(Obj::cycle(4), Obj::cycle(2), vec![vec![0, 1, 0, 1]]).unwrap();
        assert!(is_epi(&f) && !is_mono(&f));
        assert!(hom_set(f.dom(), f.cod()).unwrap().contains(&f));
    }
}
