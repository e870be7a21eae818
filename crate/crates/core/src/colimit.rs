//! Chains of monomorphisms, their cocones, and the hom-reflection test for
//! colimits.
//!
//! A cocone over a chain is a colimit when every probe morphism into the apex
//! factorizes through some leg, and any two factorizations are merged further
//! along the chain. Over a finite probe family a pass is only evidence; an
//! unfactorizable or unmerged morphism refutes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cats::ops::factorize;
use crate::cats::{HomSearch, Mor, Obj, SymbolicObject};
use crate::error::{Error, Result};
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Apex {
    Finite(Obj),
    Symbolic(SymbolicObject),
}

impl Apex {
    pub fn size_hint(&self) -> Option<usize> {
        match self {
            Apex::Finite(x) => Some(x.size()),
            Apex::Symbolic(_) => None,
        }
    }
}

/// `objects[0] -> objects[1] -> ...`, each link a monomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub objects: Vec<Obj>,
    pub links: Vec<Mor>,
}

impl Chain {
    pub fn new(links: Vec<Mor>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::Precondition("a chain needs at least one link; use Chain::single".into()));
        }
        for w in links.windows(2) {
            if w[0].cod() != w[1].dom() {
                return Err(Error::NotComposable("chain links do not compose".into()));
            }
        }
        if let Some(l) = links.iter().find(|l| !l.is_injective()) {
            return Err(Error::Precondition(format!("chain link {l} is not a monomorphism")));
        }
        let mut objects: Vec<Obj> = links.iter().map(|l| l.dom().clone()).collect();
        objects.push(links.last().unwrap().cod().clone());
        Ok(Chain { objects, links })
    }

    pub fn single(x: Obj) -> Self {
        Chain {
            objects: vec![x],
            links: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// The composite link `objects[i] -> objects[j]` for `i <= j`.
    pub fn composite(&self, i: usize, j: usize) -> Mor {
        let mut m = Mor::identity(&self.objects[i]);
        for l in &self.links[i..j] {
            m = l.compose(&m).expect("chain links compose");
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocone {
    pub chain: Chain,
    pub apex: Apex,
    /// For a symbolic apex the legs land in the window of this bound.
    pub window: Option<usize>,
    pub legs: Vec<Mor>,
}

impl Cocone {
    /// Whether every leg equals the next leg after the link between them.
    pub fn commutes(&self) -> bool {
        self.chain
            .links
            .iter()
            .enumerate()
            .all(|(i, l)| self.legs[i + 1].compose(l).is_ok_and(|c| c.same_action(&self.legs[i])))
    }
}

/// The colimit of a finite chain: the last object, with composite legs.
pub fn chain_colimit(chain: &Chain) -> Cocone {
    let last = chain.len() - 1;
    let legs = (0..chain.len()).map(|i| chain.composite(i, last)).collect();
    Cocone {
        chain: chain.clone(),
        apex: Apex::Finite(chain.objects[last].clone()),
        window: None,
        legs,
    }
}

/// The canonical chain of the first `k` prefixes with the symbolic object as
/// its formal colimit, legs being the prefix inclusions into the window.
pub fn symbolic_cocone(sym: SymbolicObject, k: usize, window: usize) -> Result<Cocone> {
    if k == 0 {
        return Err(Error::Precondition("empty chain".into()));
    }
    let chain = if k == 1 {
        Chain::single(sym.prefix(1))
    } else {
        Chain::new(sym.canonical_chain(k))?
    };
    let legs = (1..=k).map(|i| sym.leg(i, window)).collect::<Result<_>>()?;
    Ok(Cocone {
        chain,
        apex: Apex::Symbolic(sym),
        window: Some(window),
        legs,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ColimitFailure {
    /// No leg admits a factorization of `map: probe -> apex`.
    Unfactorizable { probe: usize, map: Vec<Vec<usize>> },
    /// Two factorizations through legs `legs` stay distinct along the chain.
    Unmerged {
        probe: usize,
        map: Vec<Vec<usize>>,
        legs: (usize, usize),
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColimitReport {
    pub verdict: Verdict,
    pub probes: usize,
    pub morphisms_checked: usize,
    pub failure: Option<ColimitFailure>,
}

/// Hom-reflection test of a cocone against finite probes.
///
/// For a symbolic apex the chain is first lengthened to the whole window so
/// that every morphism seen through the window can be tested.
pub fn reflect_colimit_test(cocone: &Cocone, probes: &[Obj]) -> Result<ColimitReport> {
    let (chain, legs, window) = match &cocone.apex {
        Apex::Finite(_) => (cocone.chain.clone(), cocone.legs.clone(), None),
        Apex::Symbolic(sym) => {
            let w = cocone.window.unwrap_or(crate::cats::DEFAULT_WINDOW);
            let mut k = cocone.chain.len();
            while sym.prefix(k + 1).size() <= sym.window(w).size() {
                k += 1;
            }
            let ext = symbolic_cocone(*sym, k, w)?;
            (ext.chain, ext.legs, Some((*sym, w)))
        }
    };
    let top = chain.len() - 1;
    let to_top: Vec<Mor> = (0..chain.len()).map(|i| chain.composite(i, top)).collect();
    let mut checked = 0;
    let mut complete = true;
    for (pi, a) in probes.iter().enumerate() {
        let homs = match (&cocone.apex, window) {
            (Apex::Finite(x), _) => HomSearch::new(a, x)?.collect(),
            (Apex::Symbolic(_), Some((sym, w))) => {
                let wh = sym.homs_from(a, w)?;
                complete &= wh.complete;
                wh.homs
            }
            _ => unreachable!(),
        };
        for f in homs {
            checked += 1;
            let mut factorizations: Vec<(usize, Mor)> = Vec::new();
            for (i, leg) in legs.iter().enumerate() {
                factorizations.extend(factorizations_through(&f, leg).into_iter().map(|g| (i, g)));
            }
            if factorizations.is_empty() {
                return Ok(ColimitReport {
                    verdict: Verdict::FailCertified,
                    probes: probes.len(),
                    morphisms_checked: checked,
                    failure: Some(ColimitFailure::Unfactorizable {
                        probe: pi,
                        map: f.maps().to_vec(),
                    }),
                });
            }
            // along a chain, merging anywhere implies merging at the top
            let (i0, g0) = &factorizations[0];
            let top0 = to_top[*i0].compose(g0)?;
            for (i, g) in &factorizations[1..] {
                if to_top[*i].compose(g)? != top0 {
                    return Ok(ColimitReport {
                        verdict: Verdict::FailCertified,
                        probes: probes.len(),
                        morphisms_checked: checked,
                        failure: Some(ColimitFailure::Unmerged {
                            probe: pi,
                            map: f.maps().to_vec(),
                            legs: (*i0, *i),
                        }),
                    });
                }
            }
        }
    }
    if !complete {
        let (sym, w) = window.unwrap();
        return Err(Error::WindowExhausted {
            object: sym.name().into(),
            bound: w,
        });
    }
    Ok(ColimitReport {
        verdict: Verdict::PassProbeLimited,
        probes: probes.len(),
        morphisms_checked: checked,
        failure: None,
    })
}

/// All `g` with `leg . g = f`.
fn factorizations_through(f: &Mor, leg: &Mor) -> Vec<Mor> {
    if leg.is_injective() {
        // the factorization is unique if it exists
        let mut pre: Vec<Vec<Option<usize>>> =
            leg.cod().carrier().iter().map(|&n| vec![None; n]).collect();
        for (s, m) in leg.maps().iter().enumerate() {
            for (x, &y) in m.iter().enumerate() {
                if y < pre[s].len() {
                    pre[s][y] = Some(x);
                }
            }
        }
        let maps: Option<Vec<Vec<usize>>> = f
            .maps()
            .iter()
            .enumerate()
            .map(|(s, m)| m.iter().map(|&y| pre[s].get(y).copied().flatten()).collect())
            .collect();
        return maps
            .and_then(|maps| Mor::new(f.dom().clone(), leg.dom().clone(), maps).ok())
            .into_iter()
            .collect();
    }
    HomSearch::new(f.dom(), leg.dom())
        .map(|h| h.collect())
        .unwrap_or_default()
        .into_iter()
        .filter(|g| leg.compose(g).is_ok_and(|c| c.same_action(f)))
        .collect()
}

/// Whether the subobjects jointly cover the target: every element, and for
/// graphs every edge, lies in some image.
pub fn union_test(subobjects: &[Mor], target: &Obj) -> Result<bool> {
    for m in subobjects {
        if m.cod() != target || !m.is_injective() {
            return Err(Error::Precondition(format!("{m} is not a subobject of {target}")));
        }
    }
    let covered = (0..target.carrier().len()).all(|s| {
        let mut hit = vec![false; target.sort_size(s)];
        for m in subobjects {
            for &y in &m.maps()[s] {
                hit[y] = true;
            }
        }
        hit.into_iter().all(|b| b)
    });
    Ok(covered && edge_union(subobjects).len() == target.edges().len())
}

fn edge_union(monos: &[Mor]) -> BTreeSet<(usize, usize)> {
    monos
        .iter()
        .flat_map(|m| m.dom().edges().iter().map(move |&(u, v)| (m.apply(0, u), m.apply(0, v))))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ImageUnion {
    /// `Im(f . c_i)` for every leg, as subobjects of `cod(f)`.
    pub images: Vec<Mor>,
    /// `Im(f)` as a subobject of `cod(f)`.
    pub image: Mor,
    /// Whether `Im(f)` is the union of the `Im(f . c_i)`.
    pub is_union: bool,
}

/// Images of the legs under `f`, compared with the image of `f`.
pub fn image_union(cocone: &Cocone, f: &Mor) -> Result<ImageUnion> {
    let Apex::Finite(apex) = &cocone.apex else {
        return Err(Error::Unsupported("image unions over a symbolic apex".into()));
    };
    if f.dom() != apex {
        return Err(Error::NotComposable("f does not start at the apex".into()));
    }
    let images: Vec<Mor> = cocone
        .legs
        .iter()
        .map(|c| Ok(factorize(&f.compose(c)?).mono))
        .collect::<Result<_>>()?;
    let image = factorize(f).mono;
    let sets = |ms: &[Mor]| -> Vec<BTreeSet<usize>> {
        (0..f.cod().carrier().len())
            .map(|s| ms.iter().flat_map(|m| m.maps()[s].iter().copied()).collect())
            .collect()
    };
    let is_union = sets(&images) == sets(std::slice::from_ref(&image))
        && edge_union(&images) == edge_union(std::slice::from_ref(&image));
    Ok(ImageUnion {
        images,
        image,
        is_union,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cats::ops::coproduct;
    use crate::cats::Category;
    use proptest::prelude::*;

    fn incl(a: &Obj, b: &Obj) -> Mor {
        let maps = a.carrier().iter().map(|&n| (0..n).collect()).collect();
        Mor::new(a.clone(), b.clone(), maps).unwrap()
    }

    fn prime_chain(k: usize) -> Chain {
        if k == 1 {
            return Chain::single(SymbolicObject::CycleFamily.prefix(1));
        }
        Chain::new(SymbolicObject::CycleFamily.canonical_chain(k)).unwrap()
    }

    #[test]
    fn single_object_chain_has_identity_cocone() {
        let c = chain_colimit(&Chain::single(Obj::cycle(3)));
        assert_eq!(c.legs, vec![Mor::identity(&Obj::cycle(3))]);
        assert!(c.commutes());
    }

    #[test]
    fn finite_chain_colimit_passes() {
        let cocone = chain_colimit(&prime_chain(3));
        assert_eq!(cocone.apex, Apex::Finite(SymbolicObject::CycleFamily.prefix(3)));
        assert!(cocone.commutes());
        let probes = vec![Obj::cycle(2), Obj::cycle(3), Obj::cycle(5), Obj::cycle(6)];
        let r = reflect_colimit_test(&cocone, &probes).unwrap();
        assert!(r.verdict.is_pass());
        assert!(r.morphisms_checked > 0);
    }

    #[test]
    fn extra_point_is_unfactorizable() {
        let chain = Chain::new(vec![incl(&Obj::finset(1), &Obj::finset(2))]).unwrap();
        let mut cocone = chain_colimit(&chain);
        let big = Obj::finset(3);
        cocone.legs = cocone.legs.iter().map(|l| incl(l.dom(), &big)).collect();
        cocone.apex = Apex::Finite(big);
        let r = reflect_colimit_test(&cocone, &[Obj::finset(1)]).unwrap();
        assert_eq!(r.verdict, Verdict::FailCertified);
        assert_eq!(
            r.failure,
            Some(ColimitFailure::Unfactorizable {
                probe: 0,
                map: vec![vec![2]]
            })
        );
    }

    #[test]
    fn unmerged_factorizations_are_reported() {
        // two points mapping to one: legs not jointly injective on the chain
        let chain = Chain::single(Obj::finset(2));
        let cocone = Cocone {
            chain,
            apex: Apex::Finite(Obj::finset(1)),
            window: None,
            legs: vec![Mor::to_terminal(&Obj::finset(2))],
        };
        let r = reflect_colimit_test(&cocone, &[Obj::finset(1)]).unwrap();
        assert!(matches!(r.failure, Some(ColimitFailure::Unmerged { .. })));
    }

    #[test]
    fn prime_cycle_chain_into_cycle_family_passes() {
        let cocone = symbolic_cocone(SymbolicObject::CycleFamily, 3, 32).unwrap();
        assert!(cocone.commutes());
        let probes = vec![Obj::cycle(2), Obj::cycle(3), Obj::cycle(5)];
        let r = reflect_colimit_test(&cocone, &probes).unwrap();
        assert_eq!(r.verdict, Verdict::PassProbeLimited);
        // a cycle of length 37 cannot be seen through a window of 32
        assert!(reflect_colimit_test(&cocone, &[Obj::cycle(37)]).is_err());
    }

    #[test]
    fn union_examples() {
        let x = Obj::finset(2);
        assert!(union_test(&[Mor::identity(&x)], &x).unwrap());
        let p0 = Mor::new(Obj::finset(1), x.clone(), vec![vec![0]]).unwrap();
        let p1 = Mor::new(Obj::finset(1), x.clone(), vec![vec![1]]).unwrap();
        let e = Mor::from_empty(&x);
        assert!(union_test(&[e.clone(), p0.clone(), p1.clone()], &x).unwrap());
        assert!(!union_test(std::slice::from_ref(&p0), &x).unwrap());
        // a subgraph missing an edge does not cover
        let p = Obj::path(2);
        let bare = Mor::new(Obj::graph(2, []).unwrap(), p.clone(), vec![vec![0, 1]]).unwrap();
        assert!(!union_test(&[bare], &p).unwrap());
    }

    #[test]
    fn image_union_of_identity_and_constant() {
        let cocone = chain_colimit(&prime_chain(3));
        let Apex::Finite(apex) = cocone.apex.clone() else { unreachable!() };
        let iu = image_union(&cocone, &Mor::identity(&apex)).unwrap();
        assert!(iu.is_union);
        for (img, leg) in iu.images.iter().zip(&cocone.legs) {
            assert_eq!(img.maps(), leg.maps());
        }
        let k = Mor::to_terminal(&apex);
        let iu = image_union(&cocone, &k).unwrap();
        assert!(iu.is_union && iu.images.iter().all(|m| m.dom().size() == 1));
    }

    fn finset_chain(sizes: &[usize]) -> Chain {
        let links = sizes
            .windows(2)
            .map(|w| incl(&Obj::finset(w[0]), &Obj::finset(w[1])))
            .collect();
        Chain::new(links).unwrap()
    }

    proptest! {
        #[test]
        fn image_union_holds_on_random_finset_chains(
            steps in prop::collection::vec(0usize..3, 3),
            target in 1usize..5,
            seed in prop::collection::vec(0usize..100, 16),
        ) {
            let mut sizes = vec![1];
            for s in steps { sizes.push(sizes.last().unwrap() + s); }
            let chain = finset_chain(&sizes);
            let cocone = chain_colimit(&chain);
            let n = *sizes.last().unwrap();
            let map = (0..n).map(|i| seed[i % seed.len()] % target).collect();
            let f = Mor::new(Obj::finset(n), Obj::finset(target), vec![map]).unwrap();
            prop_assert!(image_union(&cocone, &f).unwrap().is_union);
        }

        #[test]
        fn finite_chain_colimits_pass_every_probe(k in 1usize..4, probe in 1usize..4) {
            let cocone = chain_colimit(&prime_chain(k));
            let probes = vec![Obj::cycle(probe), Obj::cycle(probe * 2)];
            prop_assert!(reflect_colimit_test(&cocone, &probes).unwrap().verdict.is_pass());
        }

        #[test]
        fn union_test_is_monotone(masks in prop::collection::vec(0u8..16, 1..6)) {
            let x = Obj::finset(4);
            let subs: Vec<Mor> = masks.iter().map(|&m| {
                let members: Vec<usize> = (0..4).filter(|&i| m & (1 << i) != 0).collect();
                crate::cats::ops::restrict(&x, &[members], None).unwrap().1
            }).collect();
            for k in 1..subs.len() {
                if union_test(&subs[..k], &x).unwrap() {
                    prop_assert!(union_test(&subs[..k + 1], &x).unwrap());
                }
            }
        }
    }

    #[test]
    fn image_union_on_random_unary_chains() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            // a chain of coproducts of random cycles, mapped onto a random cycle
            let lens: Vec<usize> = (0..4).map(|_| [2, 4, 6][rng.gen_range(0..3)]).collect();
            let mut links = Vec::new();
            let mut objs = Vec::new();
            for k in 1..=lens.len() {
                let cycles: Vec<Obj> = lens[..k].iter().map(|&l| Obj::cycle(l)).collect();
                objs.push(coproduct(&Category::Unary, &cycles).unwrap().0);
            }
            for w in objs.windows(2) {
                links.push(incl(&w[0], &w[1]));
            }
            let cocone = chain_colimit(&Chain::new(links).unwrap());
            let Apex::Finite(apex) = &cocone.apex else { unreachable!() };
            let homs = HomSearch::new(apex, &Obj::cycle(2)).unwrap().collect();
            let f = &homs[rng.gen_range(0..homs.len())];
            assert!(image_union(&cocone, f).unwrap().is_union);
        }
    }
}
