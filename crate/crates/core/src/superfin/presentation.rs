use serde::{Deserialize, Serialize};

use super::black_box::SetFunctor;
use super::{count_maps, decode, encode, FinFn};
use crate::error::{Error, Result};
use crate::union_find::UnionFind;

/// Values `F(0..=n)` and the action of every map between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PresentationDoc", into = "PresentationDoc")]
pub struct SuperFinPresentation {
    n: usize,
    sizes: Vec<usize>,
    /// `tables[k][k2][code(g)][q] = F(g)(q)` for `g: k -> k2`.
    tables: Vec<Vec<Vec<Vec<usize>>>>,
}

#[derive(Serialize, Deserialize)]
struct PresentationDoc {
    n: usize,
    values: Vec<usize>,
    /// Every non-identity map with its table; identities are implicit.
    action: Vec<ActionEntry>,
}

#[derive(Serialize, Deserialize)]
struct ActionEntry {
    cod: usize,
    map: Vec<usize>,
    table: Vec<usize>,
}

impl TryFrom<PresentationDoc> for SuperFinPresentation {
    type Error = Error;

    fn try_from(doc: PresentationDoc) -> Result<Self> {
        let mut given = std::collections::HashMap::new();
        for e in doc.action {
            let g = FinFn::new(e.cod, e.map)?;
            given.insert(g, e.table);
        }
        SuperFinPresentation::from_fn(doc.n, doc.values, |g, q| {
            if *g == FinFn::identity(g.dom()) {
                return Ok(q);
            }
            let t = given
                .get(g)
                .ok_or_else(|| Error::Schema(format!("missing action of {g:?}")))?;
            t.get(q)
                .copied()
                .ok_or_else(|| Error::Schema(format!("short table for {g:?}")))
        })
    }
}

impl From<SuperFinPresentation> for PresentationDoc {
    fn from(p: SuperFinPresentation) -> Self {
        let mut action = Vec::new();
        for k in 0..=p.n {
            for k2 in 0..=p.n {
                for (code, table) in p.tables[k][k2].iter().enumerate() {
                    let g = FinFn::from_code(k, k2, code);
                    if g != FinFn::identity(k) {
                        action.push(ActionEntry {
                            cod: k2,
                            map: g.map,
                            table: table.clone(),
                        });
                    }
                }
            }
        }
        PresentationDoc {
            n: p.n,
            values: p.sizes,
            action,
        }
    }
}

impl SuperFinPresentation {
    /// Builds and validates a presentation from `F(g)(q)`.
    pub fn from_fn(
        n: usize,
        sizes: Vec<usize>,
        mut act: impl FnMut(&FinFn, usize) -> Result<usize>,
    ) -> Result<Self> {
        if sizes.len() != n + 1 {
            return Err(Error::InvalidObject(format!("expected {} values, got {}", n + 1, sizes.len())));
        }
        let mut tables = vec![vec![Vec::new(); n + 1]; n + 1];
        for k in 0..=n {
            for k2 in 0..=n {
                for g in FinFn::all(k, k2) {
                    let table = (0..sizes[k]).map(|q| act(&g, q)).collect::<Result<Vec<_>>>()?;
                    if table.iter().any(|&y| y >= sizes[k2]) {
                        return Err(Error::InvalidObject(format!("action of {g:?} leaves F({k2})")));
                    }
                    tables[k][k2].push(table);
                }
            }
        }
        let p = SuperFinPresentation { n, sizes, tables };
        p.check_laws()?;
        Ok(p)
    }

    /// Restriction of a black-box functor to cardinals `0..=n`.
    pub fn truncate(f: &dyn SetFunctor, n: usize) -> Self {
        let sizes = (0..=n).map(|k| f.card(k)).collect();
        SuperFinPresentation::from_fn(n, sizes, |g, q| Ok(f.apply(g, q))).expect("black boxes are functors")
    }

    /// The constant presentation with value `a` at level `n`.
    pub fn constant(a: usize, n: usize) -> Self {
        SuperFinPresentation::from_fn(n, vec![a; n + 1], |_, q| Ok(q)).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn act(&self, g: &FinFn, q: usize) -> usize {
        self.tables[g.dom()][g.cod][g.code()][q]
    }

    fn check_laws(&self) -> Result<()> {
        let n = self.n;
        for k in 0..=n {
            let id = FinFn::identity(k).code();
            if self.tables[k][k][id].iter().enumerate().any(|(q, &y)| q != y) {
                return Err(Error::InvalidObject(format!("F(id_{k}) is not the identity")));
            }
        }
        for k in 0..=n {
            for k2 in 0..=n {
                for g in FinFn::all(k, k2) {
                    let tg = &self.tables[k][k2][g.code()];
                    for k3 in 0..=n {
                        for h in FinFn::all(k2, k3) {
                            let th = &self.tables[k2][k3][h.code()];
                            let thg = &self.tables[k][k3][h.compose(&g).code()];
                            if (0..self.sizes[k]).any(|q| th[tg[q]] != thg[q]) {
                                return Err(Error::InvalidObject(format!(
                                    "F({:?} . {:?}) differs from the composite",
                                    h.map, g.map
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `F(x)` as classes of triples `(k <= n, q in F(k), f: k -> x)` under the
    /// equivalence generated by `(k, q, f . g) ~ (k2, F(g)(q), f)`.
    pub fn evaluate(&self, x: usize) -> Evaluation {
        let n = self.n;
        let mut offset = Vec::with_capacity(n + 2);
        let mut total = 0;
        for k in 0..=n {
            offset.push(total);
            total += self.sizes[k] * count_maps(k, x);
        }
        let id = |k: usize, q: usize, code: usize| offset[k] + q * count_maps(k, x) + code;
        let mut uf = UnionFind::new(total);
        for k in 0..=n {
            for k2 in 0..=n {
                let maps_k2 = count_maps(k2, x);
                for (gcode, table) in self.tables[k][k2].iter().enumerate() {
                    let g = decode(gcode, k, k2);
                    for fcode in 0..maps_k2 {
                        let f = decode(fcode, k2, x);
                        let fg: Vec<usize> = g.iter().map(|&i| f[i]).collect();
                        let fg_code = encode(&fg, x);
                        for (q, &gq) in table.iter().enumerate() {
                            uf.union(id(k, q, fg_code), id(k2, gq, fcode));
                        }
                    }
                }
            }
        }
        let (labels, classes) = uf.labels();
        let mut reps = vec![(0, 0, 0); classes];
        let mut seen = vec![false; classes];
        for k in 0..=n {
            for q in 0..self.sizes[k] {
                for code in 0..count_maps(k, x) {
                    let c = labels[id(k, q, code)];
                    if !seen[c] {
                        seen[c] = true;
                        reps[c] = (k, q, code);
                    }
                }
            }
        }
        Evaluation {
            x,
            sizes: self.sizes.clone(),
            offset,
            class_of: labels,
            reps,
        }
    }

    /// `(q, f) -> [n, q, f]` from `F(n) x Set(n, x)`, pairs in `q`-major order.
    pub fn canonical_epsilon(&self, x: usize) -> (Evaluation, Vec<usize>) {
        let ev = self.evaluate(x);
        let eps = (0..self.sizes[self.n])
            .flat_map(|q| (0..count_maps(self.n, x)).map(move |c| (q, c)))
            .map(|(q, c)| ev.class(self.n, q, c))
            .collect();
        (ev, eps)
    }

    /// Pointwise product, presented at level `n1 + n2`.
    pub fn product(&self, other: &SuperFinPresentation) -> Self {
        let m = self.n + other.n;
        let ev1: Vec<Evaluation> = (0..=m).map(|k| self.evaluate(k)).collect();
        let ev2: Vec<Evaluation> = (0..=m).map(|k| other.evaluate(k)).collect();
        let sizes = (0..=m).map(|k| ev1[k].classes() * ev2[k].classes()).collect();
        SuperFinPresentation::from_fn(m, sizes, |g, q| {
            let w = ev2[g.dom()].classes();
            let (a, b) = (q / w, q % w);
            let a2 = ev1[g.dom()].push(&ev1[g.cod], g, a);
            let b2 = ev2[g.dom()].push(&ev2[g.cod], g, b);
            Ok(a2 * ev2[g.cod].classes() + b2)
        })
        .expect("products of functors are functors")
    }

    /// Pointwise coproduct, presented at level `max(n1, n2)`; the first summand comes first.
    pub fn coproduct(&self, other: &SuperFinPresentation) -> Self {
        let m = self.n.max(other.n);
        let ev1: Vec<Evaluation> = (0..=m).map(|k| self.evaluate(k)).collect();
        let ev2: Vec<Evaluation> = (0..=m).map(|k| other.evaluate(k)).collect();
        let sizes = (0..=m).map(|k| ev1[k].classes() + ev2[k].classes()).collect();
        SuperFinPresentation::from_fn(m, sizes, |g, q| {
            let w = ev1[g.dom()].classes();
            Ok(if q < w {
                ev1[g.dom()].push(&ev1[g.cod], g, q)
            } else {
                ev1[g.cod].classes() + ev2[g.dom()].push(&ev2[g.cod], g, q - w)
            })
        })
        .expect("coproducts of functors are functors")
    }

    /// The subfunctor generated by `members[k] ⊆ F(k)`, which must be closed
    /// under the action. It is presented at level `max(n, 2)` by its values,
    /// each listed in the order of the classes of `F(k)`.
    pub fn subfunctor(&self, members: &[Vec<usize>]) -> Result<Self> {
        if members.len() != self.n + 1 {
            return Err(Error::Precondition(format!("expected {} member sets", self.n + 1)));
        }
        let mut inside: Vec<Vec<bool>> = self.sizes.iter().map(|&s| vec![false; s]).collect();
        for (k, ms) in members.iter().enumerate() {
            for &q in ms {
                if q >= self.sizes[k] {
                    return Err(Error::Precondition(format!("{q} is not in F({k})")));
                }
                inside[k][q] = true;
            }
        }
        for k in 0..=self.n {
            for k2 in 0..=self.n {
                for (code, table) in self.tables[k][k2].iter().enumerate() {
                    if let Some(q) = (0..self.sizes[k]).find(|&q| inside[k][q] && !inside[k2][table[q]]) {
                        let g = FinFn::from_code(k, k2, code);
                        return Err(Error::NotActionClosed(format!(
                            "F({:?}) sends member {q} of F({k}) outside the subset",
                            g.map
                        )));
                    }
                }
            }
        }
        let m = self.n.max(2);
        let evs: Vec<Evaluation> = (0..=m).map(|k| self.evaluate(k)).collect();
        // values: classes of F(k) generated from members
        let values: Vec<Vec<usize>> = evs
            .iter()
            .map(|ev| {
                let mut hit = vec![false; ev.classes()];
                for (j, ms) in members.iter().enumerate() {
                    for &q in ms {
                        for code in 0..count_maps(j, ev.x) {
                            hit[ev.class(j, q, code)] = true;
                        }
                    }
                }
                (0..hit.len()).filter(|&c| hit[c]).collect()
            })
            .collect();
        let sizes = values.iter().map(Vec::len).collect();
        SuperFinPresentation::from_fn(m, sizes, |g, q| {
            let c = evs[g.dom()].push(&evs[g.cod], g, values[g.dom()][q]);
            values[g.cod]
                .binary_search(&c)
                .map_err(|_| Error::NotActionClosed("generated subfunctor is not closed".into()))
        })
    }

    /// The quotient by the congruence generated by the given pairs at each level.
    pub fn quotient(&self, pairs: &[(usize, usize, usize)]) -> Result<Self> {
        let offsets: Vec<usize> = self
            .sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        let total: usize = self.sizes.iter().sum();
        let mut uf = UnionFind::new(total);
        for &(k, a, b) in pairs {
            if k > self.n || a >= self.sizes[k] || b >= self.sizes[k] {
                return Err(Error::Precondition(format!("({k}, {a}, {b}) out of range")));
            }
            uf.union(offsets[k] + a, offsets[k] + b);
        }
        loop {
            let mut changed = false;
            for k in 0..=self.n {
                for k2 in 0..=self.n {
                    for table in &self.tables[k][k2] {
                        let mut image_of_root = std::collections::HashMap::new();
                        for q in 0..self.sizes[k] {
                            let r = uf.find(offsets[k] + q);
                            let t = offsets[k2] + table[q];
                            match image_of_root.get(&r) {
                                None => {
                                    image_of_root.insert(r, t);
                                }
                                Some(&t0) => changed |= uf.union(t0, t),
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut label = vec![Vec::new(); self.n + 1];
        let mut sizes = Vec::new();
        for k in 0..=self.n {
            let mut ids = std::collections::BTreeMap::new();
            for q in 0..self.sizes[k] {
                let next = ids.len();
                label[k].push(*ids.entry(uf.find(offsets[k] + q)).or_insert(next));
            }
            sizes.push(ids.len());
        }
        let mut rep = vec![Vec::new(); self.n + 1];
        for k in 0..=self.n {
            rep[k] = vec![0; sizes[k]];
            for q in (0..self.sizes[k]).rev() {
                rep[k][label[k][q]] = q;
            }
        }
        SuperFinPresentation::from_fn(self.n, sizes, |g, c| {
            Ok(label[g.cod][self.act(g, rep[g.dom()][c])])
        })
    }
}

/// The Kan extension of a presentation evaluated at one finite set.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub x: usize,
    sizes: Vec<usize>,
    offset: Vec<usize>,
    class_of: Vec<usize>,
    /// Least triple `(k, q, code(f))` of each class.
    reps: Vec<(usize, usize, usize)>,
}

impl Evaluation {
    pub fn classes(&self) -> usize {
        self.reps.len()
    }

    /// Class of the triple `(k, q, f)` given by the code of `f: k -> x`.
    pub fn class(&self, k: usize, q: usize, fcode: usize) -> usize {
        self.class_of[self.offset[k] + q * count_maps(k, self.x) + fcode]
    }

    pub fn representative(&self, class: usize) -> (usize, usize, FinFn) {
        let (k, q, code) = self.reps[class];
        (k, q, FinFn::from_code(k, self.x, code))
    }

    /// The action of `h: x -> y` on a class: postcompose the map component.
    pub fn push(&self, target: &Evaluation, h: &FinFn, class: usize) -> usize {
        debug_assert_eq!((h.dom(), h.cod), (self.x, target.x));
        let (k, q, f) = self.representative(class);
        target.class(k, q, h.compose(&f).code())
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.sizes
    }
}

#[cfg(test)]
mod tests {
    use super::super::black_box::{ConstantF, FinitePowerset, HomF, IdentityF, KanFunctor};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn truncated_representable_evaluates_to_maps() {
        let p = SuperFinPresentation::truncate(&HomF(2), 2);
        for x in 0..=4 {
            assert_eq!(p.evaluate(x).classes(), x * x, "x = {x}");
        }
    }

    #[test]
    fn constant_and_identity() {
        let c = SuperFinPresentation::constant(3, 2);
        assert_eq!(c.evaluate(4).classes(), 3);
        let id = SuperFinPresentation::truncate(&IdentityF, 1);
        assert_eq!(id.evaluate(5).classes(), 5);
    }

    #[test]
    fn epsilon_is_surjective() {
        let id = SuperFinPresentation::truncate(&IdentityF, 1);
        let (ev, eps) = id.canonical_epsilon(2);
        assert_eq!(ev.classes(), 2);
        assert_eq!(eps.len(), 2);
        let rep = SuperFinPresentation::truncate(&HomF(2), 2);
        let (ev, eps) = rep.canonical_epsilon(2);
        let mut hit = vec![false; ev.classes()];
        eps.iter().for_each(|&c| hit[c] = true);
        assert_eq!(ev.classes(), 4);
        assert!(hit.into_iter().all(|b| b));
        // constant: projection onto the value set
        let c = SuperFinPresentation::constant(2, 1);
        let (_, eps) = c.canonical_epsilon(3);
        assert_eq!(eps, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn closure_operations() {
        let a = SuperFinPresentation::constant(2, 1);
        let b = SuperFinPresentation::constant(3, 1);
        let s = a.coproduct(&b);
        assert_eq!(s, SuperFinPresentation::constant(5, 1));
        let id = SuperFinPresentation::truncate(&IdentityF, 1);
        let sq = id.product(&id);
        assert_eq!(sq.n(), 2);
        assert_eq!(sq.evaluate(3).classes(), 9);
    }

    #[test]
    fn injective_maps_are_not_a_subfunctor_but_constant_maps_are() {
        let rep = SuperFinPresentation::truncate(&HomF(2), 2);
        // codes of maps 2 -> k: injective ones at k = 2 are (0,1) and (1,0)
        let injective = vec![vec![], vec![], vec![encode(&[0, 1], 2), encode(&[1, 0], 2)]];
        assert!(matches!(rep.subfunctor(&injective), Err(Error::NotActionClosed(_))));
        let constant = vec![
            vec![],
            vec![encode(&[0, 0], 1)],
            vec![encode(&[0, 0], 2), encode(&[1, 1], 2)],
        ];
        let sub = rep.subfunctor(&constant).unwrap();
        assert_eq!(sub.evaluate(3).classes(), 3);
    }

    #[test]
    fn serde_roundtrip() {
        let p = SuperFinPresentation::truncate(&FinitePowerset, 2);
        let json = serde_json::to_string(&p).unwrap();
        let back: SuperFinPresentation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["values"][2] = serde_json::json!(1);
        assert!(serde_json::from_value::<SuperFinPresentation>(v).is_err());
    }

    #[test]
    fn evaluation_restricts_to_the_given_values() {
        let p = SuperFinPresentation::truncate(&FinitePowerset, 2);
        for k in 0..=2 {
            assert_eq!(p.evaluate(k).classes(), p.sizes()[k]);
        }
        // beyond the level the truncation only sees subsets of size <= 2
        assert_eq!(p.evaluate(3).classes(), 6);
    }

    fn presentations() -> Vec<SuperFinPresentation> {
        vec![
            SuperFinPresentation::truncate(&HomF(2), 2),
            SuperFinPresentation::truncate(&FinitePowerset, 2),
            SuperFinPresentation::truncate(&IdentityF, 1),
            SuperFinPresentation::truncate(&ConstantF(2), 1),
        ]
    }

    #[test]
    fn evaluation_is_functorial() {
        for p in presentations() {
            let evs: Vec<Evaluation> = (0..=3).map(|x| p.evaluate(x)).collect();
            for x in 0..=3 {
                for c in 0..evs[x].classes() {
                    assert_eq!(evs[x].push(&evs[x], &FinFn::identity(x), c), c);
                }
                for y in 0..=3 {
                    for g in FinFn::all(x, y) {
                        for z in 0..=3 {
                            for h in FinFn::all(y, z) {
                                for c in 0..evs[x].classes() {
                                    let lhs = evs[x].push(&evs[z], &h.compose(&g), c);
                                    let rhs = evs[y].push(&evs[z], &h, evs[x].push(&evs[y], &g, c));
                                    assert_eq!(lhs, rhs);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn epsilon_is_natural() {
        for p in presentations() {
            for x in 1..=3 {
                let (ex, epsx) = p.canonical_epsilon(x);
                for y in 1..=3 {
                    let (ey, epsy) = p.canonical_epsilon(y);
                    for g in FinFn::all(x, y) {
                        let nx = count_maps(p.n(), x);
                        for (i, &c) in epsx.iter().enumerate() {
                            let (q, fcode) = (i / nx, i % nx);
                            let gf = g.compose(&FinFn::from_code(p.n(), x, fcode));
                            let j = q * count_maps(p.n(), y) + gf.code();
                            assert_eq!(ex.push(&ey, &g, c), epsy[j]);
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn quotients_stay_super_finitary(seed in prop::collection::vec((0usize..3, 0usize..16, 0usize..16), 0..4)) {
            let p = SuperFinPresentation::truncate(&HomF(2), 2);
            let pairs: Vec<(usize, usize, usize)> = seed
                .into_iter()
                .map(|(k, a, b)| (k, a % p.sizes()[k].max(1), b % p.sizes()[k].max(1)))
                .filter(|&(k, _, _)| p.sizes()[k] > 0)
                .collect();
            let q = p.quotient(&pairs).unwrap();
            let f = KanFunctor::new(q);
            let report = crate::superfin::superfinitary_test(&f, 2, &[1, 2, 3]);
            prop_assert!(report.verdict.is_pass());
        }
    }
}
