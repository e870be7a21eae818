use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{
    equivariant_images, equivariant_map_check, induced_map, orbit_isomorphism, pool_size, NomElement,
    NominalSetSpec, OrbitSpec,
};
use crate::error::{Error, Result};
use crate::functor::FinitarityReport;
use crate::verdict::Verdict;

/// Largest `n` for which homs out of `P_n` are searched.
pub const NOM_SEARCH_BOUND: usize = 5;

/// An equivariant map `P_n -> X`, as the image of `{0, ..., n-1}`.
///
/// Such a map is determined by that image `y`, which needs
/// `supp(y) ⊆ {0, ..., n-1}` and invariance under `Perm(n)`. The candidate is
/// confirmed by the transposition check on a pool of `2n + 2` names.
pub fn hom_from_pn(n: usize, x: &NominalSetSpec) -> Result<Option<NomElement>> {
    if n > NOM_SEARCH_BOUND {
        return Err(Error::Precondition(format!("hom search from P_{n} exceeds {NOM_SEARCH_BOUND}")));
    }
    let dom = NominalSetSpec::new(vec![OrbitSpec::pn(n)]);
    let pool = pool_size(n.max(x.max_support()));
    for y in equivariant_images(&dom, 0, x) {
        let images = [y.clone()];
        let f = induced_map(&dom, x, &images);
        if equivariant_map_check(&f, &dom, x, pool)? {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

pub fn hom_exists_pn(n: usize, x: &NominalSetSpec) -> Result<bool> {
    Ok(hom_from_pn(n, x)?.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NomCounterexample {
    pub input: NominalSetSpec,
    /// `1 + X` when some `P_n` has no map into `X`, else `1`.
    pub value: NominalSetSpec,
    /// Every `n` in `1..=bound` with no equivariant map `P_n -> X`.
    pub failing: Vec<usize>,
    pub bound: usize,
    pub disclaimer: String,
}

/// The functor sending `X` to `1 + X` if `Nom(P_n, X)` is empty for some
/// `n >= 1`, and to `1` otherwise, with the search for `n` bounded.
pub fn nom_counterexample(x: &NominalSetSpec) -> Result<NomCounterexample> {
    let failing: Vec<usize> = (1..=NOM_SEARCH_BOUND)
        .map(|n| hom_exists_pn(n, x).map(|e| (!e).then_some(n)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let value = if failing.is_empty() {
        NominalSetSpec::one()
    } else {
        let mut orbits = vec![OrbitSpec::tuples(0)];
        orbits.extend(x.orbits.iter().cloned());
        NominalSetSpec::new(orbits)
    };
    Ok(NomCounterexample {
        input: x.clone(),
        value,
        disclaimer: if failing.is_empty() {
            format!("every P_n with n <= {NOM_SEARCH_BOUND} maps into the input; larger n were not searched")
        } else {
            String::new()
        },
        failing,
        bound: NOM_SEARCH_BOUND,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub k: usize,
    pub pool: usize,
    pub checked: usize,
    /// Elements `Y` with `supp(f(Y)) != Y`.
    pub violations: Vec<NomElement>,
    pub verdict: Verdict,
}

/// For an equivariant endomorphism `f` of `P_1 + ... + P_k`, checks
/// `supp(f(Y)) = Y` on every `Y` over the pool. A pass means `f` cannot
/// factor through an orbit-finite set, whose supports are bounded.
pub fn support_rigidity_check(
    f: &dyn Fn(&NomElement) -> NomElement,
    k: usize,
    pool: usize,
) -> Result<RigidityReport> {
    if k > NOM_SEARCH_BOUND {
        return Err(Error::Precondition(format!("rigidity check at k = {k} exceeds {NOM_SEARCH_BOUND}")));
    }
    if pool < pool_size(k) {
        return Err(Error::PoolTooSmall {
            need: pool_size(k),
            got: pool,
        });
    }
    let a = NominalSetSpec::pn_sum(k);
    if !equivariant_map_check(f, &a, &a, pool)? {
        return Err(Error::NotEquivariant("endomorphism candidate".into()));
    }
    let elements = a.elements(pool);
    let violations: Vec<NomElement> = elements
        .iter()
        .filter(|y| f(y).support() != y.support())
        .cloned()
        .collect();
    Ok(RigidityReport {
        k,
        pool,
        checked: elements.len(),
        verdict: if violations.is_empty() {
            Verdict::PassProbeLimited
        } else {
            Verdict::FailCertified
        },
        violations,
    })
}

/// Every equivariant endo of `P_1 + ... + P_k`, from all choices of base images.
pub fn equivariant_endos(k: usize) -> Vec<NomMap> {
    let a = NominalSetSpec::pn_sum(k);
    let choices: Vec<Vec<NomElement>> = (0..k).map(|i| equivariant_images(&a, i, &a)).collect();
    choices.iter().fold(vec![Vec::new()], |acc, c| {
        acc.into_iter()
            .flat_map(|p| {
                c.iter().map(move |y| {
                    let mut v = p.clone();
                    v.push(y.clone());
                    v
                })
            })
            .collect()
    })
    .into_iter()
    .map(|images| NomMap::new(a.clone(), a.clone(), images).expect("base images are equivariant"))
    .collect()
}

/// An equivariant map between orbit-finite sets, by the images of the base
/// elements of the domain orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NomMap {
    pub dom: NominalSetSpec,
    pub cod: NominalSetSpec,
    pub images: Vec<NomElement>,
}

impl NomMap {
    pub fn new(dom: NominalSetSpec, cod: NominalSetSpec, images: Vec<NomElement>) -> Result<Self> {
        if images.len() != dom.orbits.len() {
            return Err(Error::InvalidMorphism("one image per domain orbit".into()));
        }
        for (i, y) in images.iter().enumerate() {
            if !equivariant_images(&dom, i, &cod).contains(y) {
                return Err(Error::NotEquivariant(format!("image {y:?} of orbit {i}")));
            }
        }
        Ok(NomMap { dom, cod, images })
    }

    pub fn identity(x: &NominalSetSpec) -> Self {
        let images = (0..x.orbits.len()).map(|i| x.base(i)).collect();
        NomMap {
            dom: x.clone(),
            cod: x.clone(),
            images,
        }
    }

    pub fn apply(&self, x: &NomElement) -> NomElement {
        induced_map(&self.dom, &self.cod, &self.images)(x)
    }

    /// `self . g`.
    pub fn compose(&self, g: &NomMap) -> NomMap {
        let images = g.images.iter().map(|y| self.apply(y)).collect();
        NomMap {
            dom: g.dom.clone(),
            cod: self.cod.clone(),
            images,
        }
    }

    /// Codomain orbits that the map reaches.
    pub fn image_orbits(&self) -> BTreeSet<usize> {
        self.images.iter().map(|y| y.orbit).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NomStrictnessWitness {
    pub b: NomMap,
    pub b_prime: NomMap,
    pub f: NomMap,
}

impl NomStrictnessWitness {
    /// `b = b' . f . b` on the base elements, hence everywhere by equivariance.
    pub fn verify(&self) -> bool {
        self.b_prime.compose(&self.f.compose(&self.b)).images == self.b.images
    }
}

/// `A = Im(b) + C`; `C_1` keeps one orbit of `C` per isomorphism class,
/// `b' = id + m` and `f = id + e` where `e` folds `C` onto `C_1`.
pub fn countable_strictness_witness(b: &NomMap) -> Result<NomStrictnessWitness> {
    let a = &b.cod;
    let image = b.image_orbits();
    // (orbit of A, fold target in A, base image under the fold)
    let mut kept: Vec<usize> = image.iter().copied().collect();
    let mut fold: Vec<Option<(usize, Vec<usize>)>> = vec![None; a.orbits.len()];
    for i in 0..a.orbits.len() {
        if image.contains(&i) {
            continue;
        }
        let target = kept
            .iter()
            .filter(|&&j| !image.contains(&j))
            .find_map(|&j| orbit_isomorphism(&a.orbits[i], &a.orbits[j]).map(|t| (j, t)));
        match target {
            Some(t) => fold[i] = Some(t),
            None => kept.push(i),
        }
    }
    kept.sort_unstable();
    let b_space = NominalSetSpec::new(kept.iter().map(|&i| a.orbits[i].clone()).collect());
    let position = |i: usize| kept.iter().position(|&j| j == i).expect("kept orbit");
    let b_prime = NomMap::new(
        b_space.clone(),
        a.clone(),
        kept.iter().map(|&i| a.base(i)).collect(),
    )?;
    let f_images = (0..a.orbits.len())
        .map(|i| match &fold[i] {
            None => b_space.base(position(i)),
            Some((j, t)) => NomElement {
                orbit: position(*j),
                tuple: b_space.orbits[position(*j)].canon(t),
            },
        })
        .collect();
    let f = NomMap::new(a.clone(), b_space, f_images)?;
    Ok(NomStrictnessWitness {
        b: b.clone(),
        b_prime,
        f,
    })
}

/// The counterexample functor along `P_1 -> P_1 + P_2 -> ...` at prefix `k`:
/// each prefix is sent to `1 + prefix` (no map from `P_{k+1}`), while the
/// coproduct of all `P_n` receives every `P_n` and is sent to `1`. Sizes count orbits.
pub fn nom_finitarity_report(k: usize) -> Result<FinitarityReport> {
    // the obstruction at k + 1 is a missing map from P_{k+2}
    if k == 0 || k + 2 > NOM_SEARCH_BOUND {
        return Err(Error::Precondition(format!(
            "prefix {k} outside 1..={}",
            NOM_SEARCH_BOUND - 2
        )));
    }
    let at = |j: usize| nom_counterexample(&NominalSetSpec::pn_sum(j));
    let (now, next) = (at(k)?, at(k + 1)?);
    // each P_n includes into the coproduct as a summand, so F of it is 1
    let rhs = 1;
    let broken = |c: &NomCounterexample| c.value.orbits.len() != rhs;
    Ok(FinitarityReport {
        functor: "Nom counterexample".into(),
        chain: "P_1 + ... + P_k".into(),
        prefix_k: k,
        lhs_size: now.value.orbits.len(),
        rhs_size: Some(rhs),
        verdict: if broken(&now) && broken(&next) {
            Verdict::FailCertified
        } else {
            Verdict::PassProbeLimited
        },
        persists: broken(&next),
        comparison: Some(vec![vec![0; now.value.orbits.len()]]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nominal::{subgroups_of_sn, symmetric_group};

    #[test]
    fn homs_out_of_pn() {
        let v = NominalSetSpec::new(vec![OrbitSpec::tuples(1)]);
        assert!(hom_exists_pn(1, &v).unwrap());
        assert!(hom_exists_pn(2, &NominalSetSpec::one()).unwrap());
        let p1 = NominalSetSpec::pn_sum(1);
        assert!(!hom_exists_pn(2, &p1).unwrap());
        assert!(hom_exists_pn(3, &NominalSetSpec::pn_sum(3)).unwrap());
        assert!(!hom_exists_pn(4, &NominalSetSpec::pn_sum(3)).unwrap());
        assert!(hom_exists_pn(6, &p1).is_err());
    }

    /// Oracle: `P_n -> X` exists iff `X` has a one-element orbit or an orbit
    /// `(n, S)` with `S = Perm(n)`.
    #[test]
    fn hom_existence_matches_orbit_types() {
        for m in 0..=3 {
            for s in subgroups_of_sn(m).unwrap() {
                let x = NominalSetSpec::new(vec![OrbitSpec::from_subgroup(m, &s)]);
                for n in 1..=3 {
                    let expected = m == 0 || (m == n && s.len() == symmetric_group(n).len());
                    assert_eq!(hom_exists_pn(n, &x).unwrap(), expected, "m={m} n={n} |S|={}", s.len());
                }
            }
        }
    }

    #[test]
    fn counterexample_values() {
        let p1 = NominalSetSpec::pn_sum(1);
        let c = nom_counterexample(&p1).unwrap();
        assert_eq!(c.value.orbits.len(), 2);
        assert!(c.failing.contains(&2));
        let one = nom_counterexample(&NominalSetSpec::one()).unwrap();
        assert_eq!(one.value, NominalSetSpec::one());
        assert!(one.failing.is_empty());
        assert!(!one.disclaimer.is_empty());
        let three = nom_counterexample(&NominalSetSpec::pn_sum(3)).unwrap();
        assert_eq!(three.failing, vec![4, 5]);
        assert_eq!(three.value.orbits.len(), 4);
    }

    #[test]
    fn rigidity() {
        let id = |x: &NomElement| x.clone();
        assert_eq!(support_rigidity_check(&id, 3, 10).unwrap().verdict, Verdict::PassProbeLimited);
        for k in 1..=3 {
            let endos = equivariant_endos(k);
            assert!(!endos.is_empty());
            for e in endos {
                let f = |x: &NomElement| e.apply(x);
                let r = support_rigidity_check(&f, k, pool_size(k)).unwrap();
                assert!(r.violations.is_empty());
            }
        }
        let a = NominalSetSpec::pn_sum(2);
        let not_equivariant = |x: &NomElement| {
            if x.orbit == 1 {
                a.element(0, &[x.tuple[0]]).unwrap()
            } else {
                x.clone()
            }
        };
        assert!(matches!(
            support_rigidity_check(&id, 2, 5),
            Err(Error::PoolTooSmall { need: 6, got: 5 })
        ));
        assert!(matches!(
            support_rigidity_check(&not_equivariant, 2, 6),
            Err(Error::NotEquivariant(_))
        ));
    }

    #[test]
    fn strictness_witnesses() {
        let p1p1 = NominalSetSpec::new(vec![OrbitSpec::pn(1), OrbitSpec::pn(1)]);
        let id = NomMap::identity(&p1p1);
        let w = countable_strictness_witness(&id).unwrap();
        assert!(w.verify());
        assert_eq!(w.b_prime.dom, p1p1);

        let p1 = NominalSetSpec::pn_sum(1);
        let inl = NomMap::new(p1.clone(), p1p1.clone(), vec![p1p1.base(0)]).unwrap();
        let w = countable_strictness_witness(&inl).unwrap();
        assert!(w.verify());
        // C is the second P_1 alone, so it is its own representative
        assert_eq!(w.b_prime.dom.orbits.len(), 2);

        let a = NominalSetSpec::new(vec![OrbitSpec::pn(1), OrbitSpec::pn(2), OrbitSpec::pn(2)]);
        let b = NomMap::new(p1, a.clone(), vec![a.base(0)]).unwrap();
        let w = countable_strictness_witness(&b).unwrap();
        assert!(w.verify());
        assert_eq!(w.b_prime.dom.orbits.len(), 2);
        assert_eq!(w.f.images[2].orbit, 1);
    }

    #[test]
    fn finitarity_report() {
        for k in 1..=3 {
            let r = nom_finitarity_report(k).unwrap();
            assert_eq!(r.lhs_size, k + 1);
            assert_eq!(r.verdict, Verdict::FailCertified);
        }
        assert!(nom_finitarity_report(4).is_err());
    }
}
