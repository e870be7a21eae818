use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// A permutation of `0..n` in one-line notation.
pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `a . b`, applying `b` first.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&i| a[i]).collect()
}

pub fn inverse(a: &[usize]) -> Perm {
    let mut inv = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn is_permutation(a: &[usize]) -> bool {
    let mut seen = vec![false; a.len()];
    a.iter().all(|&j| j < a.len() && !std::mem::replace(&mut seen[j], true))
}

/// The subgroup generated by `generators`, as a sorted element list.
pub fn closure(n: usize, generators: &[Perm]) -> Vec<Perm> {
    let mut seen: BTreeSet<Perm> = BTreeSet::new();
    let mut queue = VecDeque::from([identity(n)]);
    while let Some(p) = queue.pop_front() {
        if !seen.insert(p.clone()) {
            continue;
        }
        for g in generators {
            let q = compose(g, &p);
            if !seen.contains(&q) {
                queue.push_back(q);
            }
        }
    }
    seen.into_iter().collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn symmetric_group(n: usize) -> Vec<Perm> {
    let mut out = crate::cats::probe::permutations(n);
    out.sort();
    out
}

/// Largest degree accepted by [`subgroups_of_sn`].
pub const MAX_SUBGROUP_DEGREE: usize = 5;

/// Every subgroup of `Perm(n)` exactly once, each a sorted element list.
///
/// Subgroups are reached from the trivial one by adjoining one element at a
/// time; every subgroup is the end of such a chain.
pub fn subgroups_of_sn(n: usize) -> Result<Vec<Vec<Perm>>> {
    if n > MAX_SUBGROUP_DEGREE {
        return Err(Error::Precondition(format!(
            "subgroup enumeration of Perm({n}) exceeds degree {MAX_SUBGROUP_DEGREE}"
        )));
    }
    let all = symmetric_group(n);
    let index = |p: &Perm| all.binary_search(p).expect("permutation of n");
    let mask_of = |elems: &[Perm]| elems.iter().fold(0u128, |m, p| m | (1u128 << index(p)));
    let trivial = vec![identity(n)];
    let mut found: BTreeSet<u128> = BTreeSet::from([mask_of(&trivial)]);
    // (elements, generators)
    let mut out: Vec<(Vec<Perm>, Vec<Perm>)> = vec![(trivial, Vec::new())];
    let mut i = 0;
    while i < out.len() {
        let hmask = mask_of(&out[i].0);
        for (j, g) in all.iter().enumerate() {
            if hmask & (1u128 << j) != 0 {
                continue;
            }
            let mut gens = out[i].1.clone();
            gens.push(g.clone());
            let k = closure(n, &gens);
            if found.insert(mask_of(&k)) {
                out.push((k, gens));
            }
        }
        i += 1;
    }
    let mut out: Vec<Vec<Perm>> = out.into_iter().map(|(k, _)| k).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// A small generating set, chosen greedily.
pub fn generators_of(n: usize, group: &[Perm]) -> Vec<Perm> {
    let mut gens: Vec<Perm> = Vec::new();
    let mut span = vec![identity(n)];
    for g in group {
        if span.binary_search(g).is_err() {
            gens.push(g.clone());
            span = closure(n, &gens);
        }
    }
    gens
}
