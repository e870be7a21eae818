//! Functors given by their action on objects and morphisms, the search for
//! boundedness witnesses, and non-finitarity certificates over canonical
//! chains.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cats::ops::{coproduct, subobjects};
use crate::cats::symbolic::primes_upto;
use crate::cats::{Category, HomSearch, Mor, Obj, SymbolicObject};
use crate::colimit::{reflect_colimit_test, symbolic_cocone, Apex};
use crate::error::{Error, Result};
use crate::verdict::Verdict;

pub trait Functor {
    fn name(&self) -> String;
    fn source(&self) -> Category;
    fn target(&self) -> Category;
    fn on_obj(&self, x: &Obj) -> Result<Obj>;
    fn on_mor(&self, f: &Mor) -> Result<Mor>;
    fn on_symbolic(&self, sym: SymbolicObject) -> Result<Apex>;

    /// `F(f)` for `f: X -> A`. For a symbolic `A`, `f` lands in the window of
    /// the given bound and the result lands in the finite `F(A)` or in the
    /// window of a symbolic `F(A)`.
    fn on_mor_into(&self, f: &Mor, target: &Apex, _window: usize) -> Result<Mor> {
        match target {
            Apex::Finite(_) => self.on_mor(f),
            Apex::Symbolic(sym) => Err(Error::Unsupported(format!(
                "{} on morphisms into {}",
                self.name(),
                sym.name()
            ))),
        }
    }
}

fn check_source(f: &dyn Functor, x: &Obj) -> Result<()> {
    if *x.category() != f.source() {
        return Err(Error::CategoryMismatch {
            expected: f.source().to_string(),
            found: x.category().to_string(),
        });
    }
    Ok(())
}

/// `1 + X` with the terminal summand first, and `id + f`.
fn plus_terminal(x: &Obj) -> (Obj, Mor) {
    let one = Obj::terminal(x.category());
    let (sum, inj) = coproduct(x.category(), &[one, x.clone()]).expect("same category");
    let second = inj.into_iter().nth(1).unwrap();
    (sum, second)
}

fn plus_terminal_map(f: &Mor, fx: &Obj, fy: &Obj) -> Mor {
    let maps = f
        .maps()
        .iter()
        .map(|m| std::iter::once(0).chain(m.iter().map(|&y| y + 1)).collect())
        .collect();
    Mor::new(fx.clone(), fy.clone(), maps).expect("id + f")
}

pub struct IdentityFunctor(pub Category);

impl Functor for IdentityFunctor {
    fn name(&self) -> String {
        format!("Id({})", self.0)
    }
    fn source(&self) -> Category {
        self.0.clone()
    }
    fn target(&self) -> Category {
        self.0.clone()
    }
    fn on_obj(&self, x: &Obj) -> Result<Obj> {
        check_source(self, x)?;
        Ok(x.clone())
    }
    fn on_mor(&self, f: &Mor) -> Result<Mor> {
        check_source(self, f.dom())?;
        Ok(f.clone())
    }
    fn on_symbolic(&self, sym: SymbolicObject) -> Result<Apex> {
        Ok(Apex::Symbolic(sym))
    }
    fn on_mor_into(&self, f: &Mor, _target: &Apex, _window: usize) -> Result<Mor> {
        Ok(f.clone())
    }
}

/// On unary algebras: `X` goes to `C_1 + X` when some prime cycle has no map
/// into `X`, and to `C_1` otherwise.
pub struct UnCounterexample;

impl UnCounterexample {
    /// Whether some prime `p` admits no morphism `C_p -> X`. Only primes up to
    /// `|X| + 1` need checking: beyond `|X|` a map exists iff `X` has a fixed point.
    pub fn misses_a_prime(x: &Obj) -> bool {
        primes_upto(x.size() + 2)
            .into_iter()
            .any(|p| !HomSearch::new(&Obj::cycle(p), x).expect("unary").exists())
    }
}

impl Functor for UnCounterexample {
    fn name(&self) -> String {
        "un-counterexample".into()
    }
    fn source(&self) -> Category {
        Category::Unary
    }
    fn target(&self) -> Category {
        Category::Unary
    }
    fn on_obj(&self, x: &Obj) -> Result<Obj> {
        check_source(self, x)?;
        Ok(if Self::misses_a_prime(x) {
            plus_terminal(x).0
        } else {
            Obj::cycle(1)
        })
    }
    fn on_mor(&self, f: &Mor) -> Result<Mor> {
        let fx = self.on_obj(f.dom())?;
        let fy = self.on_obj(f.cod())?;
        if fy.size() == 1 {
            return Ok(Mor::to_terminal(&fx));
        }
        Ok(plus_terminal_map(f, &fx, &fy))
    }
    fn on_symbolic(&self, sym: SymbolicObject) -> Result<Apex> {
        match sym {
            // every prime cycle is a summand
            SymbolicObject::CycleFamily => Ok(Apex::Finite(Obj::cycle(1))),
            _ => Err(Error::CategoryMismatch {
                expected: "Un".into(),
                found: sym.category().to_string(),
            }),
        }
    }
    fn on_mor_into(&self, f: &Mor, target: &Apex, _window: usize) -> Result<Mor> {
        match target {
            Apex::Finite(_) => self.on_mor(f),
            Apex::Symbolic(sym) => {
                self.on_symbolic(*sym)?;
                Ok(Mor::to_terminal(&self.on_obj(f.dom())?))
            }
        }
    }
}

/// On graphs: `X` goes to `1 + X` when `X` has no directed cycle (for finite
/// graphs, no infinite path), and to the terminal loop otherwise.
pub struct GraphCounterexample;

impl Functor for GraphCounterexample {
    fn name(&self) -> String {
        "graph-counterexample".into()
    }
    fn source(&self) -> Category {
        Category::Graph
    }
    fn target(&self) -> Category {
        Category::Graph
    }
    fn on_obj(&self, x: &Obj) -> Result<Obj> {
        check_source(self, x)?;
        Ok(if x.has_directed_cycle() {
            Obj::terminal(&Category::Graph)
        } else {
            plus_terminal(x).0
        })
    }
    fn on_mor(&self, f: &Mor) -> Result<Mor> {
        let fx = self.on_obj(f.dom())?;
        let fy = self.on_obj(f.cod())?;
        if f.cod().has_directed_cycle() {
            return Ok(Mor::to_terminal(&fx));
        }
        Ok(plus_terminal_map(f, &fx, &fy))
    }
    fn on_symbolic(&self, sym: SymbolicObject) -> Result<Apex> {
        match sym {
            // both contain an infinite path
            SymbolicObject::Ray | SymbolicObject::LoopRay => {
                Ok(Apex::Finite(Obj::terminal(&Category::Graph)))
            }
            SymbolicObject::CycleFamily => Err(Error::CategoryMismatch {
                expected: "Gra".into(),
                found: "Un".into(),
            }),
        }
    }
    fn on_mor_into(&self, f: &Mor, target: &Apex, _window: usize) -> Result<Mor> {
        match target {
            Apex::Finite(_) => self.on_mor(f),
            Apex::Symbolic(sym) => {
                self.on_symbolic(*sym)?;
                Ok(Mor::to_terminal(&self.on_obj(f.dom())?))
            }
        }
    }
}

/// `A(S, -)` into finite sets; elements of `A(S, X)` are numbered in
/// enumeration order.
pub struct HomFunctor {
    pub source_obj: Arc<Obj>,
}

impl HomFunctor {
    pub fn new(source_obj: Obj) -> Self {
        HomFunctor {
            source_obj: Arc::new(source_obj),
        }
    }

    fn homs(&self, x: &Obj) -> Result<Vec<Mor>> {
        Ok(HomSearch::new(&self.source_obj, x)?.collect())
    }

    fn postcompose(&self, dom_homs: &[Mor], f: &Mor, cod_homs: &[Mor]) -> Result<Mor> {
        let index: HashMap<&[Vec<usize>], usize> =
            cod_homs.iter().enumerate().map(|(i, h)| (h.maps(), i)).collect();
        let map = dom_homs
            .iter()
            .map(|g| {
                let fg = f.compose(g)?;
                index
                    .get(fg.maps())
                    .copied()
                    .ok_or_else(|| Error::InvalidMorphism("composite outside the hom-set".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Mor::new(Obj::finset(dom_homs.len()), Obj::finset(cod_homs.len()), vec![map])
    }
}

impl Functor for HomFunctor {
    fn name(&self) -> String {
        format!("hom({}, -)", self.source_obj)
    }
    fn source(&self) -> Category {
        self.source_obj.category().clone()
    }
    fn target(&self) -> Category {
        Category::FinSet
    }
    fn on_obj(&self, x: &Obj) -> Result<Obj> {
        Ok(Obj::finset(self.homs(x)?.len()))
    }
    fn on_mor(&self, f: &Mor) -> Result<Mor> {
        self.postcompose(&self.homs(f.dom())?, f, &self.homs(f.cod())?)
    }
    fn on_symbolic(&self, sym: SymbolicObject) -> Result<Apex> {
        let homs = sym.hom_set(&self.source_obj, crate::cats::DEFAULT_WINDOW)?;
        Ok(Apex::Finite(Obj::finset(homs.len())))
    }
    fn on_mor_into(&self, f: &Mor, target: &Apex, window: usize) -> Result<Mor> {
        match target {
            Apex::Finite(_) => self.on_mor(f),
            Apex::Symbolic(sym) => {
                let cod_homs = sym.hom_set(&self.source_obj, window)?;
                self.postcompose(&self.homs(f.dom())?, f, &cod_homs)
            }
        }
    }
}

/// Serializable names of the implemented functors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "functor")]
pub enum FunctorSpec {
    Identity { category: Category },
    UnCounterexample,
    GraphCounterexample,
    Hom { source: Obj },
}

impl FunctorSpec {
    pub fn build(&self) -> Box<dyn Functor> {
        match self {
            FunctorSpec::Identity { category } => Box::new(IdentityFunctor(category.clone())),
            FunctorSpec::UnCounterexample => Box::new(UnCounterexample),
            FunctorSpec::GraphCounterexample => Box::new(GraphCounterexample),
            FunctorSpec::Hom { source } => Box::new(HomFunctor::new(source.clone())),
        }
    }
}

/// `m0 = F(m) . mediating` with `m: M -> A` a finitely generated subobject.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundednessWitness {
    pub m0: Mor,
    pub m: Mor,
    pub mediating: Mor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum BoundednessOutcome {
    Witness(BoundednessWitness),
    Exhausted { bound: usize },
}

/// Searches the subobjects of `a` with at most `bound` elements, smallest
/// first, for one whose `F`-image the given subobject `m0` of `F(a)` factors
/// through.
pub fn finitely_bounded_witness(
    functor: &dyn Functor,
    a: &Apex,
    m0: &Mor,
    bound: usize,
    window: usize,
) -> Result<BoundednessOutcome> {
    if !m0.is_injective() {
        return Err(Error::Precondition("m0 is not a monomorphism".into()));
    }
    let candidates: Vec<Mor> = match a {
        Apex::Finite(x) => subobjects(x)?
            .into_iter()
            .filter(|m| m.dom().size() <= bound)
            .collect(),
        Apex::Symbolic(sym) => sym.fg_subobjects(bound, window),
    };
    for m in candidates {
        let fm = functor.on_mor_into(&m, a, window)?;
        if fm.cod() != m0.cod() {
            return Err(Error::Precondition(format!(
                "m0 lands in {} but F(A) is {}",
                m0.cod(),
                fm.cod()
            )));
        }
        let mut found = None;
        HomSearch::new(m0.dom(), fm.dom())?.for_each(|maps| {
            let hits = maps.iter().enumerate().all(|(s, ms)| {
                ms.iter().enumerate().all(|(x, &y)| fm.apply(s, y) == m0.apply(s, x))
            });
            if hits {
                found = Some(maps);
                std::ops::ControlFlow::Break(())
            } else {
                std::ops::ControlFlow::Continue(())
            }
        });
        if let Some(maps) = found {
            let mediating = Mor::new(m0.dom().clone(), fm.dom().clone(), maps)?;
            debug_assert!(fm.compose(&mediating).unwrap().same_action(m0));
            return Ok(BoundednessOutcome::Witness(BoundednessWitness {
                m0: m0.clone(),
                m,
                mediating,
            }));
        }
    }
    Ok(BoundednessOutcome::Exhausted { bound })
}

/// Checks a witness by recomputing `F(m) . mediating` and comparing with `m0`.
pub fn verify_boundedness(functor: &dyn Functor, a: &Apex, w: &BoundednessWitness, window: usize) -> Result<bool> {
    let fm = functor.on_mor_into(&w.m, a, window)?;
    Ok(w.m.is_injective() && fm.compose(&w.mediating)?.same_action(&w.m0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitarityReport {
    pub functor: String,
    pub chain: String,
    pub prefix_k: usize,
    /// Size of the colimit of `F` over the first `k` chain objects.
    pub lhs_size: usize,
    /// Size of `F` of the colimit, when finite.
    pub rhs_size: Option<usize>,
    pub verdict: Verdict,
    /// Whether the obstruction is still present at `k + 1`.
    pub persists: bool,
    /// The comparison map at `k`, when `F` of the colimit is finite.
    pub comparison: Option<Vec<Vec<usize>>>,
}

/// Compares `colim F(prefix_i)` with `F(colim)` along the canonical chain of a
/// symbolic object. The finite colimit of the first `k` objects is `F(prefix_k)`.
pub fn finitarity_certificate(
    functor: &dyn Functor,
    sym: SymbolicObject,
    k: usize,
    window: usize,
) -> Result<FinitarityReport> {
    let apex = functor.on_symbolic(sym)?;
    let target = Apex::Symbolic(sym);
    let lhs = functor.on_obj(&sym.prefix(k))?;
    match &apex {
        Apex::Finite(rhs) => {
            let comparison = |j: usize| -> Result<Mor> { functor.on_mor_into(&sym.leg(j, window)?, &target, window) };
            let c_k = comparison(k)?;
            let c_next = comparison(k + 1)?;
            let broken = |c: &Mor| c.dom().size() != c.cod().size() || !c.is_injective() || !c.is_surjective();
            let (now, later) = (broken(&c_k), broken(&c_next));
            Ok(FinitarityReport {
                functor: functor.name(),
                chain: sym.name().into(),
                prefix_k: k,
                lhs_size: lhs.size(),
                rhs_size: Some(rhs.size()),
                verdict: if now && later {
                    Verdict::FailCertified
                } else {
                    Verdict::PassProbeLimited
                },
                persists: later,
                comparison: Some(c_k.maps().to_vec()),
            })
        }
        Apex::Symbolic(fsym) => {
            // F preserves the colimit on the nose; test the image cocone
            let cocone = symbolic_cocone(*fsym, k, window)?;
            let probes: Vec<Obj> = (1..=k + 1).map(|i| fsym.prefix(i)).collect();
            let verdict = match reflect_colimit_test(&cocone, &probes) {
                Ok(r) => r.verdict,
                Err(Error::WindowExhausted { .. }) => Verdict::Exhausted,
                Err(e) => return Err(e),
            };
            Ok(FinitarityReport {
                functor: functor.name(),
                chain: sym.name().into(),
                prefix_k: k,
                lhs_size: lhs.size(),
                rhs_size: None,
                verdict,
                persists: false,
                comparison: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cats::hom::hom_set;
    use crate::cats::probe::small_objects;
    use crate::cats::ops::coproduct;

    fn c2_plus_c3() -> Obj {
        coproduct(&Category::Unary, &[Obj::cycle(2), Obj::cycle(3)]).unwrap().0
    }

    #[test]
    fn un_counterexample_on_objects() {
        let f = UnCounterexample;
        let fc2 = f.on_obj(&Obj::cycle(2)).unwrap();
        assert_eq!(fc2.size(), 3);
        assert_eq!(fc2.cycle_lengths(), vec![1, 2]);
        assert_eq!(f.on_obj(&Obj::cycle(1)).unwrap(), Obj::cycle(1));
        assert_eq!(f.on_symbolic(SymbolicObject::CycleFamily).unwrap(), Apex::Finite(Obj::cycle(1)));
        // a fixed point anywhere gives maps from every cycle
        let x = Obj::unary(vec![1, 0, 2]).unwrap();
        assert_eq!(f.on_obj(&x).unwrap().size(), 1);
    }

    #[test]
    fn misses_a_prime_matches_fixed_point_criterion() {
        for x in small_objects(&Category::Unary, 4) {
            let fixed = (0..x.size()).any(|i| x.op(0)[i] == i);
            assert_eq!(UnCounterexample::misses_a_prime(&x), !fixed, "{x}");
        }
    }

    #[test]
    fn graph_counterexample_on_objects() {
        let f = GraphCounterexample;
        let lp = Obj::terminal(&Category::Graph);
        assert_eq!(f.on_obj(&lp).unwrap(), lp);
        let fp = f.on_obj(&Obj::path(3)).unwrap();
        assert_eq!(fp.size(), 4);
        assert!(fp.has_edge(0, 0));
        assert_eq!(f.on_symbolic(SymbolicObject::Ray).unwrap(), Apex::Finite(lp));
    }

    fn functor_laws(f: &dyn Functor, objs: &[Obj]) {
        for x in objs {
            assert_eq!(f.on_mor(&Mor::identity(x)).unwrap(), Mor::identity(&f.on_obj(x).unwrap()));
            for y in objs {
                let fs = hom_set(x, y).unwrap();
                if fs.is_empty() {
                    continue;
                }
                for z in objs {
                    let gs = hom_set(y, z).unwrap();
                    for fm in fs.iter().take(4) {
                        for g in gs.iter().take(4) {
                            let lhs = f.on_mor(&g.compose(fm).unwrap()).unwrap();
                            let rhs = f.on_mor(g).unwrap().compose(&f.on_mor(fm).unwrap()).unwrap();
                            assert_eq!(lhs, rhs, "{} on {fm} then {g}", f.name());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn implemented_functors_preserve_identities_and_composition() {
        let un = small_objects(&Category::Unary, 2);
        functor_laws(&UnCounterexample, &un);
        functor_laws(&HomFunctor::new(Obj::cycle(2)), &un);
        functor_laws(&IdentityFunctor(Category::Unary), &un);
        let gr: Vec<Obj> = small_objects(&Category::Graph, 2);
        functor_laws(&GraphCounterexample, &gr);
    }

    #[test]
    fn identity_functor_witness_is_trivial() {
        let a = c2_plus_c3();
        for m0 in subobjects(&a).unwrap() {
            let out = finitely_bounded_witness(&IdentityFunctor(Category::Unary), &Apex::Finite(a.clone()), &m0, 5, 32).unwrap();
            let BoundednessOutcome::Witness(w) = out else { panic!("no witness") };
            assert_eq!(w.m.maps(), m0.maps());
            assert_eq!(w.mediating, Mor::identity(m0.dom()));
        }
    }

    #[test]
    fn un_counterexample_is_finitely_bounded_on_c2_plus_c3() {
        let a = Apex::Finite(c2_plus_c3());
        let fa = UnCounterexample.on_obj(&c2_plus_c3()).unwrap();
        assert_eq!(fa.size(), 6);
        let mut seen = 0;
        for m0 in subobjects(&fa).unwrap().into_iter().filter(|m| m.dom().size() <= 4) {
            let out = finitely_bounded_witness(&UnCounterexample, &a, &m0, 5, 32).unwrap();
            let BoundednessOutcome::Witness(w) = out else { panic!("no witness for {m0}") };
            assert!(verify_boundedness(&UnCounterexample, &a, &w, 32).unwrap());
            seen += 1;
        }
        // empty, C_1, C_2, C_3, C_1 + C_2, C_1 + C_3
        assert_eq!(seen, 6);
    }

    #[test]
    fn un_counterexample_is_finitely_bounded_on_cycle_family() {
        let a = Apex::Symbolic(SymbolicObject::CycleFamily);
        let c1 = Obj::cycle(1);
        for m0 in subobjects(&c1).unwrap() {
            let out = finitely_bounded_witness(&UnCounterexample, &a, &m0, 4, 32).unwrap();
            let BoundednessOutcome::Witness(w) = out else { panic!() };
            assert!(verify_boundedness(&UnCounterexample, &a, &w, 32).unwrap());
        }
    }

    #[test]
    fn hom_functor_witnesses_exist_on_finite_algebras() {
        let f = HomFunctor::new(Obj::cycle(4));
        let a = coproduct(&Category::Unary, &[Obj::cycle(2), Obj::cycle(4)]).unwrap().0;
        let fa = f.on_obj(&a).unwrap();
        assert_eq!(fa.size(), 2 + 4);
        for m0 in subobjects(&fa).unwrap() {
            let out = finitely_bounded_witness(&f, &Apex::Finite(a.clone()), &m0, 6, 32).unwrap();
            assert!(matches!(out, BoundednessOutcome::Witness(_)));
        }
    }

    #[test]
    fn un_counterexample_finitarity_fails_on_prime_chain() {
        let r = finitarity_certificate(&UnCounterexample, SymbolicObject::CycleFamily, 3, 32).unwrap();
        assert_eq!((r.lhs_size, r.rhs_size), (11, Some(1)));
        assert_eq!(r.verdict, Verdict::FailCertified);
        assert!(r.persists);
    }

    #[test]
    fn graph_counterexample_finitarity_fails_on_path_chain() {
        let r = finitarity_certificate(&GraphCounterexample, SymbolicObject::Ray, 3, 32).unwrap();
        assert_eq!((r.lhs_size, r.rhs_size), (4, Some(1)));
        assert_eq!(r.verdict, Verdict::FailCertified);
    }

    #[test]
    fn identity_finitarity_passes_on_prime_chain() {
        let r = finitarity_certificate(&IdentityFunctor(Category::Unary), SymbolicObject::CycleFamily, 3, 32).unwrap();
        assert_eq!(r.verdict, Verdict::PassProbeLimited);
    }

    #[test]
    fn hom_functor_of_finite_object_is_finitary_on_prime_chain() {
        // maps C_4 -> prime cycles all land in C_2, already in the first prefix
        let r = finitarity_certificate(&HomFunctor::new(Obj::cycle(4)), SymbolicObject::CycleFamily, 3, 32).unwrap();
        assert_eq!((r.lhs_size, r.rhs_size), (2, Some(2)));
        assert!(r.verdict.is_pass());
    }

    #[test]
    fn functor_spec_roundtrip() {
        let spec = FunctorSpec::Hom { source: Obj::cycle(4) };
        let json = serde_json::to_string(&spec).unwrap();
        let back: FunctorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().on_obj(&Obj::cycle(2)).unwrap().size(), 2);
    }
}
