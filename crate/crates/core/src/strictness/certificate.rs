use serde::{Deserialize, Serialize};

use crate::cats::hom::HomSearch;
use crate::cats::symbolic::first_primes;
use crate::cats::{Obj, SymbolicObject};
use crate::error::{Error, Result};

/// Number of prime cycles in the hom-table instance.
pub const PRIME_TABLE_SIZE: usize = 9;
/// Largest path checked against the ray.
pub const MAX_PATH: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathHoms {
    pub k: usize,
    /// Window of the ray searched; every hom from `Path_k` is a translate of one in it.
    pub window: usize,
    pub homs: usize,
    pub all_advance_by_one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "kebab-case")]
pub enum LemmaInstances {
    /// `table[i][j] = |hom(C_{p_i}, C_{p_j})|`.
    PrimeCycleHoms { primes: Vec<usize>, table: Vec<Vec<usize>> },
    PathHoms { paths: Vec<PathHoms> },
}

/// Finite instances of a structural lemma, and the inference drawn from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoFinitaryEndoCertificate {
    pub object: SymbolicObject,
    pub instances: LemmaInstances,
    /// Whether every checked instance has the shape the lemma asserts.
    pub holds: bool,
    /// The final step, which quantifies over the whole object and is not machine-checked.
    pub inference: String,
}

pub fn no_finitary_endo_certificate(object: SymbolicObject) -> Result<NoFinitaryEndoCertificate> {
    match object {
        SymbolicObject::CycleFamily => {
            let primes = first_primes(PRIME_TABLE_SIZE);
            let cycles: Vec<Obj> = primes.iter().map(|&p| Obj::cycle(p)).collect();
            let table: Vec<Vec<usize>> = cycles
                .iter()
                .map(|a| cycles.iter().map(|b| HomSearch::new(a, b).expect("same category").count()).collect())
                .collect();
            let holds = (0..primes.len())
                .all(|i| (0..primes.len()).all(|j| table[i][j] == if i == j { primes[i] } else { 0 }));
            Ok(NoFinitaryEndoCertificate {
                object,
                instances: LemmaInstances::PrimeCycleHoms { primes, table },
                holds,
                inference: "distinct prime cycles admit no homs, so every endomorphism maps each \
                            summand C_p into itself and its image contains a cycle of every prime length; \
                            no finite object can carry such an image"
                    .into(),
            })
        }
        SymbolicObject::Ray => {
            let paths: Vec<PathHoms> = (1..=MAX_PATH)
                .map(|k| {
                    let window = 2 * k;
                    let homs = HomSearch::new(&Obj::path(k), &object.window(window))
                        .expect("same category")
                        .collect();
                    let all_advance_by_one = homs
                        .iter()
                        .all(|h| (1..k).all(|i| h.apply(0, i) == h.apply(0, i - 1) + 1));
                    PathHoms {
                        k,
                        window,
                        homs: homs.len(),
                        all_advance_by_one,
                    }
                })
                .collect();
            let holds = paths.iter().all(|p| p.all_advance_by_one && p.homs == p.window - p.k + 1);
            Ok(NoFinitaryEndoCertificate {
                object,
                instances: LemmaInstances::PathHoms { paths },
                holds,
                inference: "homs from paths into the ray advance by exactly one, so a finite graph \
                            receiving the ray has a directed cycle while a finite graph mapping into \
                            the ray has none; no endomorphism factors through a finite graph"
                    .into(),
            })
        }
        SymbolicObject::LoopRay => Err(Error::FinitaryEndoExists(
            "the constant endomorphism onto the loop vertex factors through a single loop".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `|hom(C_p, C_q)|` by brute force over all maps of the generator.
    fn cycle_homs(p: usize, q: usize) -> usize {
        // a hom is determined by the image y of 0 and needs (y + p) mod q == y
        (0..q).filter(|&y| (y + p) % q == y).count()
    }

    #[test]
    fn prime_cycle_table() {
        let c = no_finitary_endo_certificate(SymbolicObject::CycleFamily).unwrap();
        assert!(c.holds);
        let LemmaInstances::PrimeCycleHoms { primes, table } = c.instances else { panic!() };
        assert_eq!(primes.len(), 9);
        assert_eq!(*primes.last().unwrap(), 23);
        for (i, &p) in primes.iter().enumerate() {
            for (j, &q) in primes.iter().enumerate() {
                assert_eq!(table[i][j], cycle_homs(p, q));
            }
        }
    }

    #[test]
    fn path_tables() {
        let c = no_finitary_endo_certificate(SymbolicObject::Ray).unwrap();
        assert!(c.holds);
        let LemmaInstances::PathHoms { paths } = c.instances else { panic!() };
        assert_eq!(paths.len(), 8);
        // oracle: a hom from Path_k is its start vertex
        for p in paths {
            assert_eq!(p.homs, p.window - p.k + 1);
        }
    }

    #[test]
    fn loop_ray_refuses() {
        assert!(matches!(
            no_finitary_endo_certificate(SymbolicObject::LoopRay),
            Err(Error::FinitaryEndoExists(_))
        ));
    }
}
