//! Finitary morphisms and strictness witnesses.
//!
//! A morphism is finitary when it factors through a finite object. A
//! strictness witness for `b: B -> A` is a pair `b': B' -> A`, `f: A -> B'`
//! with `B'` finite and `b = b' . f . b`; its composite `b' . f` is then a
//! finitary endomorphism fixing the image of `b`.

mod atoms;
mod certificate;

use serde::{Deserialize, Serialize};

use crate::cats::ops::{factorize, restrict};
use crate::cats::symbolic::DEFAULT_WINDOW;
use crate::cats::vect::{extend_to_basis, solve, LinMap};
use crate::cats::{Category, EndoRule, HomSearch, Mor, Obj, SymbolicEndo, SymbolicObject};
use crate::colimit::Apex;
use crate::error::{Error, Result};

pub use atoms::{
    atoms_of_presheaves, decompose_into_atoms, is_single_orbit, random_presheaf, representable, Atom,
    Decomposition,
};
pub use certificate::{
    no_finitary_endo_certificate, LemmaInstances, NoFinitaryEndoCertificate, PathHoms, MAX_PATH,
    PRIME_TABLE_SIZE,
};

/// `u = w . v` through the finite object `c`.
///
/// For a symbolic endomorphism `v` and `w` are restrictions to a window: `v`
/// has domain `window(W)` and `w` lands in `window(W)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FinitaryMorWitness {
    pub c: Obj,
    pub v: Mor,
    pub w: Mor,
    pub window: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrictnessWitness {
    pub b: Mor,
    pub b_prime: Mor,
    pub f: Mor,
}

impl StrictnessWitness {
    /// The finitary endomorphism `b' . f`.
    pub fn endo(&self) -> Mor {
        self.b_prime.compose(&self.f).expect("witness composes")
    }

    /// `b = b' . f . b` on carriers.
    pub fn verify(&self) -> bool {
        self.f
            .compose(&self.b)
            .and_then(|fb| self.b_prime.compose(&fb))
            .is_ok_and(|x| x.same_action(&self.b))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome<T> {
    Witness(T),
    Exhausted {
        bound: usize,
        /// Least image size seen; no witness exists below it.
        image_lower_bound: Option<usize>,
        certificate: Option<NoFinitaryEndoCertificate>,
    },
}

impl<T> Outcome<T> {
    pub fn witness(&self) -> Option<&T> {
        match self {
            Outcome::Witness(t) => Some(t),
            Outcome::Exhausted { .. } => None,
        }
    }

    fn exhausted(bound: usize) -> Self {
        Outcome::Exhausted {
            bound,
            image_lower_bound: None,
            certificate: None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Endomorphism {
    Finite(Mor),
    Symbolic(SymbolicEndo),
}

/// Factorization of `u` through an object of at most `bound` elements.
///
/// For finite objects the image is the smallest such object. A symbolic
/// endomorphism whose image on some window exceeds `bound` has none.
pub fn finitary_morphism_witness(u: &Endomorphism, bound: usize) -> Outcome<FinitaryMorWitness> {
    match u {
        Endomorphism::Finite(u) => {
            let fact = factorize(u);
            if fact.image.size() > bound {
                return Outcome::Exhausted {
                    bound,
                    image_lower_bound: Some(fact.image.size()),
                    certificate: None,
                };
            }
            Outcome::Witness(FinitaryMorWitness {
                c: fact.image,
                v: fact.epi,
                w: fact.mono,
                window: None,
            })
        }
        Endomorphism::Symbolic(e) => symbolic_finitary_witness(e, bound, DEFAULT_WINDOW),
    }
}

fn symbolic_finitary_witness(e: &SymbolicEndo, bound: usize, window: usize) -> Outcome<FinitaryMorWitness> {
    if e.rule == EndoRule::ConstLoop && bound >= 1 {
        let a = e.object.window(window);
        let c = Obj::graph(1, [(0, 0)]).expect("single loop");
        let v = Mor::new(a.clone(), c.clone(), vec![vec![0; window]]).expect("constant onto a loop");
        let w = Mor::new(c.clone(), a, vec![vec![0]]).expect("loop vertex");
        debug_assert!(w.compose(&v).unwrap().same_action(&e.restrict(window)));
        return Outcome::Witness(FinitaryMorWitness {
            c,
            v,
            w,
            window: Some(window),
        });
    }
    // the image of any factorization through C has at most |C| elements
    let image = e.image_size(window);
    let certificate = match e.object {
        SymbolicObject::LoopRay => None,
        other => no_finitary_endo_certificate(other).ok(),
    };
    Outcome::Exhausted {
        bound,
        image_lower_bound: Some(image),
        certificate,
    }
}

fn image_members(b: &Mor) -> Vec<Vec<usize>> {
    b.image_sets()
        .iter()
        .map(|s| (0..s.len()).filter(|&i| s[i]).collect())
        .collect()
}

/// A pair `b', f` with `b = b' . f . b` and `|dom b'| <= bound`.
///
/// Sets split through the image, presheaves on groupoids fold every orbit
/// outside the image onto an isomorphic orbit kept, and unary algebras and
/// graphs are searched over substructures containing the image.
pub fn strictness_witness(b: &Mor, bound: usize) -> Result<Outcome<StrictnessWitness>> {
    let a = b.cod();
    let found = match a.category() {
        Category::FinSet => finset_split(b),
        Category::Presheaf(_) => orbit_fold(b)?,
        Category::Unary | Category::Graph => return Ok(search_retract(b, bound)),
    };
    Ok(match found {
        Some(w) if w.b_prime.dom().size() <= bound => Outcome::Witness(w),
        _ => Outcome::exhausted(bound),
    })
}

fn finset_split(b: &Mor) -> Option<StrictnessWitness> {
    let a = b.cod();
    let mut members = image_members(b);
    if members[0].is_empty() {
        if a.size() == 0 {
            members[0] = Vec::new();
        } else {
            members[0] = vec![0];
        }
    }
    let (sub, incl) = restrict(a, &members, None).ok()?;
    let mut index = vec![0; a.size()];
    for (i, &x) in members[0].iter().enumerate() {
        index[x] = i;
    }
    let f = Mor::new(a.clone(), sub, vec![index]).ok()?;
    Some(StrictnessWitness {
        b: b.clone(),
        b_prime: incl,
        f,
    })
}

fn orbit_fold(b: &Mor) -> Result<Option<StrictnessWitness>> {
    let a = b.cod();
    let dec = decompose_into_atoms(a)?;
    let image = b.image_sets();
    let n = dec.summands.len();
    let meets = |i: usize| {
        dec.inclusions[i]
            .maps()
            .iter()
            .enumerate()
            .any(|(s, m)| m.iter().any(|&x| image[s][x]))
    };
    let mut kept: Vec<usize> = (0..n).filter(|&i| meets(i)).collect();
    // fold target for every summand outside `kept`: (kept summand, isomorphism)
    let mut fold: Vec<Option<(usize, Mor)>> = vec![None; n];
    for i in 0..n {
        if kept.contains(&i) {
            continue;
        }
        let target = kept
            .iter()
            .find_map(|&j| crate::cats::isomorphism(&dec.summands[i], &dec.summands[j]).map(|iso| (j, iso)));
        match target {
            Some(t) => fold[i] = Some(t),
            None => kept.push(i),
        }
    }
    kept.sort_unstable();
    let (sub, incl) = atoms::union_of_summands(a, &dec, &kept)?;
    let mut index: Vec<Vec<usize>> = a.carrier().iter().map(|&k| vec![usize::MAX; k]).collect();
    for (s, m) in incl.maps().iter().enumerate() {
        for (i, &x) in m.iter().enumerate() {
            index[s][x] = i;
        }
    }
    let mut maps = index.clone();
    for (i, entry) in fold.iter().enumerate() {
        if let Some((j, iso)) = entry {
            for (s, m) in dec.inclusions[i].maps().iter().enumerate() {
                for (e, &x) in m.iter().enumerate() {
                    maps[s][x] = index[s][dec.inclusions[*j].apply(s, iso.apply(s, e))];
                }
            }
        }
    }
    let f = Mor::new(a.clone(), sub, maps)?;
    Ok(Some(StrictnessWitness {
        b: b.clone(),
        b_prime: incl,
        f,
    }))
}

/// Substructures `S ⊇ im b` with `|S| <= bound` in order of size, and a
/// hom `A -> S` fixing `im b`. Any witness yields one, via the image of `b' . f`.
fn search_retract(b: &Mor, bound: usize) -> Outcome<StrictnessWitness> {
    let a = b.cod();
    let base = image_members(b)[0].clone();
    let rest: Vec<usize> = (0..a.size()).filter(|x| !base.contains(x)).collect();
    let is_closed = |set: &[bool]| a.category().signature().iter().enumerate().all(|(o, _)| {
        (0..a.size()).all(|x| !set[x] || set[a.op(o)[x]])
    });
    let mut best_lower = None;
    for extra in 0..=bound.saturating_sub(base.len()).min(rest.len()) {
        if base.len() + extra > bound {
            break;
        }
        let mut found = None;
        for_each_subset(&rest, extra, &mut |chosen| {
            let mut set = vec![false; a.size()];
            base.iter().chain(chosen).for_each(|&x| set[x] = true);
            if !is_closed(&set) {
                return false;
            }
            let members: Vec<usize> = (0..a.size()).filter(|&x| set[x]).collect();
            let (sub, incl) = restrict(a, std::slice::from_ref(&members), None).expect("closed set");
            let mut search = HomSearch::new(a, &sub).expect("same category");
            for &x in &base {
                search = search.fix(0, x, members.binary_search(&x).unwrap());
            }
            if let Some(f) = search.first() {
                found = Some(StrictnessWitness {
                    b: b.clone(),
                    b_prime: incl,
                    f,
                });
                return true;
            }
            false
        });
        if let Some(w) = found {
            return Outcome::Witness(w);
        }
        best_lower = Some(base.len() + extra + 1);
    }
    Outcome::Exhausted {
        bound,
        image_lower_bound: best_lower,
        certificate: None,
    }
}

/// Calls `visit` on every `k`-subset of `items` until it returns true.
fn for_each_subset(items: &[usize], k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(items: &[usize], k: usize, start: usize, acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if acc.len() == k {
            return visit(acc);
        }
        for i in start..items.len() {
            if items.len() - i < k - acc.len() {
                break;
            }
            acc.push(items[i]);
            if go(items, k, i + 1, acc, visit) {
                return true;
            }
            acc.pop();
        }
        false
    }
    go(items, k, 0, &mut Vec::with_capacity(k), visit)
}

/// A finitary endomorphism of `a`, factored through an object of at most
/// `bound` elements.
pub fn semistrictness_witness(a: &Apex, bound: usize) -> Result<Outcome<FinitaryMorWitness>> {
    match a {
        Apex::Finite(x) => {
            if x.size() <= bound {
                let id = Mor::identity(x);
                return Ok(Outcome::Witness(FinitaryMorWitness {
                    c: x.clone(),
                    v: id.clone(),
                    w: id,
                    window: None,
                }));
            }
            Ok(match strictness_witness(&Mor::from_empty(x), bound)? {
                Outcome::Witness(s) => Outcome::Witness(FinitaryMorWitness {
                    c: s.b_prime.dom().clone(),
                    v: s.f,
                    w: s.b_prime,
                    window: None,
                }),
                Outcome::Exhausted {
                    bound,
                    image_lower_bound,
                    ..
                } => Outcome::Exhausted {
                    bound,
                    image_lower_bound,
                    certificate: None,
                },
            })
        }
        Apex::Symbolic(SymbolicObject::LoopRay) => {
            let e = SymbolicEndo::new(SymbolicObject::LoopRay, EndoRule::ConstLoop)?;
            Ok(symbolic_finitary_witness(&e, bound, DEFAULT_WINDOW))
        }
        Apex::Symbolic(s) => Ok(Outcome::Exhausted {
            bound,
            image_lower_bound: None,
            certificate: Some(no_finitary_endo_certificate(*s)?),
        }),
    }
}

/// A finitary `u` with `u . m = m`, for a monomorphism `m` with finite domain.
pub fn fixed_subobject_witness(m: &Mor, bound: usize) -> Result<Outcome<StrictnessWitness>> {
    if !m.is_injective() {
        return Err(Error::Precondition(format!("{m} is not a monomorphism")));
    }
    strictness_witness(m, bound)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VecStrictnessWitness {
    pub b: LinMap,
    pub b_prime: LinMap,
    pub f: LinMap,
}

impl VecStrictnessWitness {
    pub fn endo(&self) -> LinMap {
        self.b_prime.compose(&self.f).expect("witness composes")
    }

    pub fn verify(&self) -> bool {
        self.f
            .compose(&self.b)
            .and_then(|fb| self.b_prime.compose(&fb))
            .is_ok_and(|x| x == self.b)
    }
}

/// `B' = im b`, `b'` its inclusion, and `f` the coordinates along a complement
/// obtained by extending a basis of `im b` with standard vectors.
pub fn vec_strictness_witness(b: &LinMap) -> Result<VecStrictnessWitness> {
    let (q, n) = (b.q, b.cod);
    let image = b.image_basis();
    let r = image.len();
    let basis = extend_to_basis(q, n, &image);
    let basis_matrix = LinMap::from_columns(q, n, &basis)?;
    let b_prime = LinMap::from_columns(q, n, &image)?;
    let coords: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let e: Vec<u8> = (0..n).map(|j| u8::from(i == j)).collect();
            solve(q, &basis_matrix, &e).map(|c| c[..r].to_vec())
        })
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Precondition("basis extension failed".into()))?;
    let f = LinMap::from_columns(q, r, &coords)?;
    Ok(VecStrictnessWitness {
        b: b.clone(),
        b_prime,
        f,
    })
}
