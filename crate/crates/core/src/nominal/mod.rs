//! Orbit-finite nominal sets over finite pools of names.
//!
//! A single orbit is given by a support size `n` and a subgroup `S` of
//! `Perm(n)`: its elements are injective tuples `t: n -> names` up to
//! `t ~ t . σ` for `σ ∈ S`. Equivariance is decided on a pool of `2n + 2`
//! names, enough for every violation on elements of support at most `n` to
//! be witnessed by a transposition inside the pool.

mod counterexample;
mod perm;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use counterexample::{
    countable_strictness_witness, hom_exists_pn, hom_from_pn, nom_counterexample, nom_finitarity_report,
    equivariant_endos, support_rigidity_check, NomCounterexample, NomStrictnessWitness, RigidityReport, NOM_SEARCH_BOUND,
};
pub use perm::{
    closure, compose, generators_of, identity, inverse, is_permutation, subgroups_of_sn, symmetric_group, Perm,
    MAX_SUBGROUP_DEGREE,
};

/// Names needed to decide equivariance for supports of size at most `n`.
pub fn pool_size(n: usize) -> usize {
    2 * n + 2
}

/// One orbit: support size `n` and the subgroup generated by `generators`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OrbitDoc", into = "OrbitDoc")]
pub struct OrbitSpec {
    n: usize,
    generators: Vec<Perm>,
    group: Vec<Perm>,
}

#[derive(Serialize, Deserialize)]
struct OrbitDoc {
    n: usize,
    generators: Vec<Perm>,
}

impl TryFrom<OrbitDoc> for OrbitSpec {
    type Error = Error;
    fn try_from(d: OrbitDoc) -> Result<Self> {
        OrbitSpec::new(d.n, d.generators)
    }
}

impl From<OrbitSpec> for OrbitDoc {
    fn from(o: OrbitSpec) -> Self {
        OrbitDoc {
            n: o.n,
            generators: o.generators,
        }
    }
}

impl OrbitSpec {
    pub fn new(n: usize, generators: Vec<Perm>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != n || !is_permutation(g)) {
            return Err(Error::InvalidObject(format!("{g:?} is not a permutation of {n}")));
        }
        let group = closure(n, &generators);
        Ok(OrbitSpec { n, generators, group })
    }

    /// `V^{#n}`: injective `n`-tuples of names.
    pub fn tuples(n: usize) -> Self {
        OrbitSpec::new(n, Vec::new()).unwrap()
    }

    /// `P_n`: `n`-element sets of names.
    pub fn pn(n: usize) -> Self {
        let gens = if n >= 2 {
            let mut swap = identity(n);
            swap.swap(0, 1);
            let cycle: Perm = (0..n).map(|i| (i + 1) % n).collect();
            vec![swap, cycle]
        } else {
            Vec::new()
        };
        OrbitSpec::new(n, gens).unwrap()
    }

    pub fn from_subgroup(n: usize, group: &[Perm]) -> Self {
        OrbitSpec::new(n, generators_of(n, group)).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn group(&self) -> &[Perm] {
        &self.group
    }

    /// The least tuple of the class of `t`.
    pub fn canon(&self, t: &[usize]) -> Vec<usize> {
        self.group
            .iter()
            .map(|s| s.iter().map(|&i| t[i]).collect::<Vec<usize>>())
            .min()
            .unwrap_or_default()
    }
}

/// A finite coproduct of orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NominalSetSpec {
    pub orbits: Vec<OrbitSpec>,
}

/// An element: an orbit index and the canonical tuple of its class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NomElement {
    pub orbit: usize,
    pub tuple: Vec<usize>,
}

impl NomElement {
    /// The least support: the names in the tuple.
    pub fn support(&self) -> BTreeSet<usize> {
        self.tuple.iter().copied().collect()
    }
}

/// All injective `n`-tuples over `0..pool`.
pub fn injective_tuples(n: usize, pool: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, pool: usize, acc: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if acc.len() == n {
            out.push(acc.clone());
            return;
        }
        for a in 0..pool {
            if !used[a] {
                used[a] = true;
                acc.push(a);
                go(n, pool, acc, used, out);
                acc.pop();
                used[a] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, pool, &mut Vec::new(), &mut vec![false; pool], &mut out);
    out
}

/// A permutation of `0..pool` extending `i -> t[i]` on `0..t.len()`.
pub fn extend_to_pool(t: &[usize], pool: usize) -> Perm {
    let mut p = vec![usize::MAX; pool];
    let mut used = vec![false; pool];
    for (i, &a) in t.iter().enumerate() {
        p[i] = a;
        used[a] = true;
    }
    let mut free = (0..pool).filter(|&a| !used[a]);
    for slot in p.iter_mut().skip(t.len()) {
        *slot = free.next().expect("pool holds the tuple");
    }
    p
}

impl NominalSetSpec {
    pub fn new(orbits: Vec<OrbitSpec>) -> Self {
        NominalSetSpec { orbits }
    }

    /// The one-element nominal set.
    pub fn one() -> Self {
        NominalSetSpec::new(vec![OrbitSpec::tuples(0)])
    }

    /// `P_1 + ... + P_k`.
    pub fn pn_sum(k: usize) -> Self {
        NominalSetSpec::new((1..=k).map(OrbitSpec::pn).collect())
    }

    pub fn max_support(&self) -> usize {
        self.orbits.iter().map(OrbitSpec::n).max().unwrap_or(0)
    }

    pub fn element(&self, orbit: usize, tuple: &[usize]) -> Result<NomElement> {
        let o = self
            .orbits
            .get(orbit)
            .ok_or_else(|| Error::InvalidObject(format!("no orbit {orbit}")))?;
        let distinct: BTreeSet<_> = tuple.iter().collect();
        if tuple.len() != o.n || distinct.len() != tuple.len() {
            return Err(Error::InvalidObject(format!(
                "{tuple:?} is not an injective {}-tuple",
                o.n
            )));
        }
        Ok(NomElement {
            orbit,
            tuple: o.canon(tuple),
        })
    }

    /// `π · x` for a permutation `π` of the pool.
    pub fn act(&self, pi: &[usize], x: &NomElement) -> NomElement {
        let moved: Vec<usize> = x.tuple.iter().map(|&a| pi[a]).collect();
        NomElement {
            orbit: x.orbit,
            tuple: self.orbits[x.orbit].canon(&moved),
        }
    }

    /// `(a b) · x`.
    pub fn swap(&self, a: usize, b: usize, x: &NomElement) -> NomElement {
        let moved: Vec<usize> = x
            .tuple
            .iter()
            .map(|&c| if c == a { b } else if c == b { a } else { c })
            .collect();
        NomElement {
            orbit: x.orbit,
            tuple: self.orbits[x.orbit].canon(&moved),
        }
    }

    /// Every element whose support lies in `0..pool`.
    pub fn elements(&self, pool: usize) -> Vec<NomElement> {
        let mut out = BTreeSet::new();
        for (i, o) in self.orbits.iter().enumerate() {
            for t in injective_tuples(o.n, pool) {
                out.insert(NomElement {
                    orbit: i,
                    tuple: o.canon(&t),
                });
            }
        }
        out.into_iter().collect()
    }

    /// The base element `[0, 1, ..., n-1]` of an orbit.
    pub fn base(&self, orbit: usize) -> NomElement {
        NomElement {
            orbit,
            tuple: self.orbits[orbit].canon(&identity(self.orbits[orbit].n)),
        }
    }

    /// The support computed from the action alone: `a` is in it iff more than
    /// half of the other pool names `b` have `(a b) · x != x`.
    pub fn support_by_probing(&self, x: &NomElement, pool: usize) -> BTreeSet<usize> {
        (0..pool)
            .filter(|&a| {
                let moving = (0..pool).filter(|&b| b != a && self.swap(a, b, x) != *x).count();
                2 * moving > pool - 1
            })
            .collect()
    }
}

/// Whether `f` commutes with every transposition of the pool on all elements
/// of `dom` supported in it.
pub fn equivariant_map_check(
    f: &dyn Fn(&NomElement) -> NomElement,
    dom: &NominalSetSpec,
    cod: &NominalSetSpec,
    pool: usize,
) -> Result<bool> {
    let need = pool_size(dom.max_support().max(cod.max_support()));
    if pool < need {
        return Err(Error::PoolTooSmall { need, got: pool });
    }
    let elements = dom.elements(pool);
    Ok(elements.iter().all(|x| {
        let fx = f(x);
        (0..pool).all(|a| (a + 1..pool).all(|b| f(&dom.swap(a, b, x)) == cod.swap(a, b, &fx)))
    }))
}

/// The equivariant map out of a single orbit sending its base element to `y`:
/// `[t] -> π_t · y` with `π_t` extending `t`.
pub fn induced_map<'a>(
    dom: &'a NominalSetSpec,
    cod: &'a NominalSetSpec,
    images: &'a [NomElement],
) -> impl Fn(&NomElement) -> NomElement + 'a {
    move |x: &NomElement| {
        let y = &images[x.orbit];
        let pool = x
            .tuple
            .iter()
            .chain(&y.tuple)
            .copied()
            .max()
            .map_or(dom.orbits[x.orbit].n, |m| (m + 1).max(dom.orbits[x.orbit].n));
        cod.act(&extend_to_pool(&x.tuple, pool), y)
    }
}

/// Images `y` of the base element of `dom.orbits[orbit]` that induce an
/// equivariant map: `supp(y) ⊆ {0..n-1}` and `y` fixed by every generator of `S`.
pub fn equivariant_images(dom: &NominalSetSpec, orbit: usize, cod: &NominalSetSpec) -> Vec<NomElement> {
    let o = &dom.orbits[orbit];
    let n = o.n;
    cod.elements(n)
        .into_iter()
        .filter(|y| o.generators.iter().all(|g| cod.act(g, y) == *y))
        .collect()
}

/// An isomorphism between two single orbits, as the image of the base element.
pub fn orbit_isomorphism(a: &OrbitSpec, b: &OrbitSpec) -> Option<Vec<usize>> {
    if a.n != b.n || a.group.len() != b.group.len() {
        return None;
    }
    let n = a.n;
    let da = NominalSetSpec::new(vec![a.clone()]);
    let db = NominalSetSpec::new(vec![b.clone()]);
    equivariant_images(&da, 0, &db).into_iter().find_map(|y| {
        let images = [y.clone()];
        let f = induced_map(&da, &db, &images);
        // injective on the elements supported in the base names
        let els = da.elements(n);
        let imgs: BTreeSet<NomElement> = els.iter().map(&f).collect();
        (imgs.len() == els.len() && imgs.len() == db.elements(n).len()).then_some(y.tuple)
    })
}

/// One orbit per isomorphism class of single orbits with support size `n`.
pub fn single_orbit_enumerate(n: usize) -> Result<Vec<OrbitSpec>> {
    if n > 4 {
        return Err(Error::Precondition(format!("single-orbit enumeration at support size {n} exceeds 4")));
    }
    let mut reps: Vec<OrbitSpec> = Vec::new();
    for s in subgroups_of_sn(n)? {
        let o = OrbitSpec::from_subgroup(n, &s);
        if reps.iter().all(|r| orbit_isomorphism(r, &o).is_none()) {
            reps.push(o);
        }
    }
    Ok(reps)
}

/// An equivalence on the injective `n`-tuples over a pool, as class labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleEquivalence {
    pub n: usize,
    pub pool: usize,
    pub tuples: Vec<Vec<usize>>,
    pub labels: Vec<usize>,
}

impl TupleEquivalence {
    pub fn from_fn(n: usize, pool: usize, key: impl Fn(&[usize]) -> Vec<usize>) -> Self {
        let tuples = injective_tuples(n, pool);
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let labels = tuples
            .iter()
            .map(|t| {
                let next = ids.len();
                *ids.entry(key(t)).or_insert(next)
            })
            .collect();
        TupleEquivalence {
            n,
            pool,
            tuples,
            labels,
        }
    }

    fn label(&self, index: &HashMap<&[usize], usize>, t: &[usize]) -> usize {
        self.labels[index[t]]
    }
}

/// `t ~ u` iff `u = t . σ` for some `σ ∈ S`.
pub fn equivalence_from_subgroup(n: usize, group: &[Perm], pool: usize) -> TupleEquivalence {
    let o = OrbitSpec::from_subgroup(n, group);
    TupleEquivalence::from_fn(n, pool, |t| o.canon(t))
}

/// `S = {σ | t . σ ~ t}`, after checking that the equivalence is equivariant,
/// relates only tuples with the same image, and gives the same `S` at every `t`.
pub fn subgroup_from_quotient(eq: &TupleEquivalence) -> Result<Vec<Perm>> {
    let n = eq.n;
    if eq.pool < pool_size(n) {
        return Err(Error::PoolTooSmall {
            need: pool_size(n),
            got: eq.pool,
        });
    }
    let index: HashMap<&[usize], usize> = eq.tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let swap = |a: usize, b: usize, t: &[usize]| -> Vec<usize> {
        t.iter().map(|&c| if c == a { b } else if c == b { a } else { c }).collect()
    };
    let mut by_class: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &l) in eq.labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    for members in by_class.values() {
        let t = &eq.tuples[members[0]];
        let image: BTreeSet<_> = t.iter().collect();
        for &m in members {
            let u = &eq.tuples[m];
            if u.iter().collect::<BTreeSet<_>>() != image {
                return Err(Error::Precondition(format!("{t:?} ~ {u:?} changes the support")));
            }
            for a in 0..eq.pool {
                for b in a + 1..eq.pool {
                    if eq.label(&index, &swap(a, b, t)) != eq.label(&index, &swap(a, b, u)) {
                        return Err(Error::NotEquivariant(format!("({a} {b}) separates {t:?} and {u:?}")));
                    }
                }
            }
        }
    }
    let sym = symmetric_group(n);
    let stab_at = |t: &[usize]| -> Vec<Perm> {
        sym.iter()
            .filter(|s| {
                let ts: Vec<usize> = s.iter().map(|&i| t[i]).collect();
                eq.label(&index, &ts) == eq.label(&index, t)
            })
            .cloned()
            .collect()
    };
    let s = stab_at(&identity(n));
    if eq.tuples.iter().any(|t| stab_at(t) != s) {
        return Err(Error::NotEquivariant("stabilizers differ between tuples".into()));
    }
    if closure(n, &s) != s {
        return Err(Error::Precondition("stabilizer is not a subgroup".into()));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_orbit_counts() {
        let counts: Vec<usize> = (0..=4).map(|n| single_orbit_enumerate(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11]);
    }

    /// Conjugacy classes of subgroups, computed directly.
    fn conjugacy_classes(n: usize) -> usize {
        let sym = symmetric_group(n);
        let mut classes: Vec<Vec<Perm>> = Vec::new();
        for s in subgroups_of_sn(n).unwrap() {
            let conj = |g: &Perm| -> Vec<Perm> {
                let mut c: Vec<Perm> = s.iter().map(|h| compose(&compose(g, h), &inverse(g))).collect();
                c.sort();
                c
            };
            if !classes.iter().any(|c| sym.iter().any(|g| &conj(g) == c)) {
                classes.push(s.clone());
            }
        }
        classes.len()
    }

    #[test]
    fn isomorphism_classes_are_conjugacy_classes() {
        for n in 0..=4 {
            assert_eq!(single_orbit_enumerate(n).unwrap().len(), conjugacy_classes(n));
        }
    }

    #[test]
    fn correspondence_roundtrips() {
        for n in 0..=3 {
            let pool = pool_size(n);
            for s in subgroups_of_sn(n).unwrap() {
                let eq = equivalence_from_subgroup(n, &s, pool);
                assert_eq!(subgroup_from_quotient(&eq).unwrap(), s);
                let back = equivalence_from_subgroup(n, &subgroup_from_quotient(&eq).unwrap(), pool);
                assert_eq!(back, eq);
            }
        }
        let id = TupleEquivalence::from_fn(2, 6, |t| t.to_vec());
        assert_eq!(subgroup_from_quotient(&id).unwrap(), vec![identity(2)]);
        let same_image = TupleEquivalence::from_fn(2, 6, |t| {
            let mut v = t.to_vec();
            v.sort();
            v
        });
        assert_eq!(subgroup_from_quotient(&same_image).unwrap().len(), 2);
        // keyed on whether the first name is 0: not equivariant
        let bad = TupleEquivalence::from_fn(2, 6, |t| vec![usize::from(t[0] == 0)]);
        assert!(subgroup_from_quotient(&bad).is_err());
    }

    #[test]
    fn support_examples() {
        let p2 = NominalSetSpec::new(vec![OrbitSpec::pn(2)]);
        let x = p2.element(0, &[4, 1]).unwrap();
        assert_eq!(x.support(), BTreeSet::from([1, 4]));
        let v3 = NominalSetSpec::new(vec![OrbitSpec::tuples(3)]);
        let t = v3.element(0, &[2, 0, 5]).unwrap();
        assert_eq!(t.support(), BTreeSet::from([0, 2, 5]));
        assert_eq!(t.tuple, vec![2, 0, 5]);
    }

    #[test]
    fn supports_have_full_size() {
        for n in 0..=3 {
            let pool = pool_size(n);
            for o in single_orbit_enumerate(n).unwrap() {
                let x = NominalSetSpec::new(vec![o]);
                for e in x.elements(pool) {
                    assert_eq!(x.support_by_probing(&e, pool), e.support());
                    assert_eq!(e.support().len(), n);
                }
            }
        }
    }

    #[test]
    fn equivariance_examples() {
        let p1 = NominalSetSpec::new(vec![OrbitSpec::pn(1)]);
        let p2 = NominalSetSpec::new(vec![OrbitSpec::pn(2)]);
        let v2 = NominalSetSpec::new(vec![OrbitSpec::tuples(2)]);
        let pool = pool_size(2);
        assert!(equivariant_map_check(&|x| x.clone(), &p2, &p2, pool).unwrap());
        let first = |x: &NomElement| NomElement {
            orbit: 0,
            tuple: vec![x.tuple[0]],
        };
        assert!(!equivariant_map_check(&first, &p2, &p1, pool).unwrap());
        let image = |x: &NomElement| p2.element(0, &x.tuple).unwrap();
        assert!(equivariant_map_check(&image, &v2, &p2, pool).unwrap());
        assert!(matches!(
            equivariant_map_check(&image, &v2, &p2, 3),
            Err(Error::PoolTooSmall { need: 6, got: 3 })
        ));
    }

    #[test]
    fn fast_criterion_agrees_with_transposition_check() {
        let targets = [
            NominalSetSpec::pn_sum(2),
            NominalSetSpec::new(vec![OrbitSpec::tuples(2), OrbitSpec::tuples(0)]),
        ];
        for n in 0..=2 {
            for s in subgroups_of_sn(n).unwrap() {
                let dom = NominalSetSpec::new(vec![OrbitSpec::from_subgroup(n, &s)]);
                for cod in &targets {
                    let pool = pool_size(n.max(cod.max_support()));
                    let good = equivariant_images(&dom, 0, cod);
                    for y in cod.elements(n) {
                        let images = [y.clone()];
                        let f = induced_map(&dom, cod, &images);
                        let eq = equivariant_map_check(&f, &dom, cod, pool).unwrap();
                        assert_eq!(eq, good.contains(&y), "{s:?} -> {y:?}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn support_is_equivariant(seed in prop::collection::vec(0usize..8, 8), which in 0usize..4) {
            let spec = NominalSetSpec::new(vec![
                OrbitSpec::pn(2), OrbitSpec::tuples(3), OrbitSpec::pn(3), OrbitSpec::tuples(1),
            ]);
            let pool = 8;
            // a random permutation of the pool from the seed
            let mut pi: Vec<usize> = (0..pool).collect();
            for (i, &s) in seed.iter().enumerate() {
                pi.swap(i, s);
            }
            for x in spec.elements(pool).into_iter().filter(|x| x.orbit == which) {
                let moved = spec.act(&pi, &x);
                let image: BTreeSet<usize> = x.support().iter().map(|&a| pi[a]).collect();
                prop_assert_eq!(moved.support(), image);
            }
        }
    }
}
