use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::presentation::{Evaluation, SuperFinPresentation};
use super::{count_maps, decode, encode, FinFn};

/// A set functor known through its values on cardinals.
pub trait SetFunctor: Send + Sync {
    fn name(&self) -> String;
    /// `|F(x)|`.
    fn card(&self, x: usize) -> usize;
    /// `F(f)(e)` for `e` in `F(f.dom())`.
    fn apply(&self, f: &FinFn, e: usize) -> usize;
}

pub struct IdentityF;

impl SetFunctor for IdentityF {
    fn name(&self) -> String {
        "Id".into()
    }
    fn card(&self, x: usize) -> usize {
        x
    }
    fn apply(&self, f: &FinFn, e: usize) -> usize {
        f.map[e]
    }
}

pub struct ConstantF(pub usize);

impl SetFunctor for ConstantF {
    fn name(&self) -> String {
        format!("Const({})", self.0)
    }
    fn card(&self, _x: usize) -> usize {
        self.0
    }
    fn apply(&self, _f: &FinFn, e: usize) -> usize {
        e
    }
}

/// `Set(m, -)`; a map `m -> x` is stored as its code.
pub struct HomF(pub usize);

impl SetFunctor for HomF {
    fn name(&self) -> String {
        format!("Set({}, -)", self.0)
    }
    fn card(&self, x: usize) -> usize {
        count_maps(self.0, x)
    }
    fn apply(&self, f: &FinFn, e: usize) -> usize {
        let g = decode(e, self.0, f.dom());
        let fg: Vec<usize> = g.iter().map(|&i| f.map[i]).collect();
        encode(&fg, f.cod)
    }
}

/// Nonempty subsets, subset `S` stored as `mask(S) - 1`; maps act by direct image.
pub struct FinitePowerset;

impl SetFunctor for FinitePowerset {
    fn name(&self) -> String {
        "Pfin+".into()
    }
    fn card(&self, x: usize) -> usize {
        (1usize << x) - 1
    }
    fn apply(&self, f: &FinFn, e: usize) -> usize {
        let mask = e + 1;
        let image = (0..f.dom())
            .filter(|&i| mask & (1 << i) != 0)
            .fold(0usize, |acc, i| acc | (1 << f.map[i]));
        image - 1
    }
}

/// The functor presented by a super-finitary presentation, evaluated by Kan
/// extension with per-cardinal caching.
pub struct KanFunctor {
    pub presentation: Arc<SuperFinPresentation>,
    cache: Mutex<HashMap<usize, Arc<Evaluation>>>,
}

impl KanFunctor {
    pub fn new(p: SuperFinPresentation) -> Self {
        KanFunctor {
            presentation: Arc::new(p),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn evaluation(&self, x: usize) -> Arc<Evaluation> {
        let mut cache = self.cache.lock().expect("cache lock");
        cache
            .entry(x)
            .or_insert_with(|| Arc::new(self.presentation.evaluate(x)))
            .clone()
    }
}

impl SetFunctor for KanFunctor {
    fn name(&self) -> String {
        format!("Lan({})", self.presentation.n())
    }
    fn card(&self, x: usize) -> usize {
        self.evaluation(x).classes()
    }
    fn apply(&self, f: &FinFn, e: usize) -> usize {
        let src = self.evaluation(f.dom());
        let dst = self.evaluation(f.cod);
        src.push(&dst, f, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_laws(f: &dyn SetFunctor, max: usize) {
        for x in 0..=max {
            for e in 0..f.card(x) {
                assert_eq!(f.apply(&FinFn::identity(x), e), e);
            }
            for y in 0..=max {
                for g in FinFn::all(x, y) {
                    for z in 0..=max {
                        for h in FinFn::all(y, z) {
                            for e in 0..f.card(x) {
                                assert_eq!(f.apply(&h.compose(&g), e), f.apply(&h, f.apply(&g, e)));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn black_boxes_are_functors() {
        check_laws(&IdentityF, 3);
        check_laws(&ConstantF(2), 3);
        check_laws(&HomF(2), 3);
        check_laws(&FinitePowerset, 3);
    }

    #[test]
    fn powerset_cardinalities() {
        assert_eq!(FinitePowerset.card(0), 0);
        assert_eq!(FinitePowerset.card(3), 7);
        // the full subset of 2 under a constant map is a singleton
        let c = FinFn::new(3, vec![1, 1]).unwrap();
        assert_eq!(FinitePowerset.apply(&c, 2), 0b010 - 1);
    }
}
