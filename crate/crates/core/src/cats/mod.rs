//! Computable categories with finite objects.
//!
//! Every object is a finite carrier presentation: one carrier per sort, a list
//! of unary operations between sorts and, for graphs, an edge relation on the
//! single sort. Morphisms are carrier maps per sort that preserve all of the
//! structure. Four categories are implemented:
//!
//! * `FinSet`: bare finite sets.
//! * `Unary`: algebras with one unary operation (`Un`).
//! * `Graph`: directed graphs with an edge relation (loops allowed).
//! * `Presheaf(G)`: presheaves on a finite groupoid, as sorted unary algebras.
//!
//! F_q vector spaces live in [`vect`] since their morphisms are matrices.

mod groupoid;
pub mod hom;
pub mod ops;
pub mod probe;
pub mod symbolic;
pub mod vect;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use groupoid::Groupoid;
pub use hom::HomSearch;
pub use ops::{
    coequalizer, coproduct, factorize, is_epi, is_mono, is_strong_epi, isomorphism,
    kernel_pair, subobjects, Factorization,
};
pub use symbolic::{EndoRule, SymbolicEndo, SymbolicObject, WindowedHoms, DEFAULT_WINDOW};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    #[serde(rename = "finset")]
    FinSet,
    Unary,
    Graph,
    Presheaf(Arc<Groupoid>),
}

impl Category {
    pub fn presheaf(g: Groupoid) -> Self {
        Category::Presheaf(Arc::new(g))
    }

    pub fn sorts(&self) -> usize {
        match self {
            Category::Presheaf(g) => g.objects(),
            _ => 1,
        }
    }

    /// Source and target sort of every structure operation.
    pub fn signature(&self) -> Vec<(usize, usize)> {
        match self {
            Category::FinSet | Category::Graph => Vec::new(),
            Category::Unary => vec![(0, 0)],
            Category::Presheaf(g) => g.arrows().to_vec(),
        }
    }

    pub fn has_edges(&self) -> bool {
        matches!(self, Category::Graph)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::FinSet => write!(f, "FinSet"),
            Category::Unary => write!(f, "Un"),
            Category::Graph => write!(f, "Gra"),
            Category::Presheaf(g) => write!(f, "Psh({})", g.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Obj {
    category: Category,
    carrier: Vec<usize>,
    ops: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct ObjDoc {
    category: Category,
    carrier: Vec<usize>,
    structure: StructureDoc,
}

#[derive(Serialize, Deserialize, Default)]
struct StructureDoc {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ops: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    edges: Vec<(usize, usize)>,
}

impl Serialize for Obj {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ObjDoc {
            category: self.category.clone(),
            carrier: self.carrier.clone(),
            structure: StructureDoc {
                ops: self.ops.clone(),
                edges: self.edges.iter().copied().collect(),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Obj {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ObjDoc::deserialize(d)?;
        Obj::new(
            doc.category,
            doc.carrier,
            doc.structure.ops,
            doc.structure.edges.into_iter().collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl Obj {
    pub fn new(
        category: Category,
        carrier: Vec<usize>,
        ops: Vec<Vec<usize>>,
        edges: BTreeSet<(usize, usize)>,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidObject(format!("{category}: {m}"));
        if carrier.len() != category.sorts() {
            return Err(bad(format!(
                "expected {} sorts, got {}",
                category.sorts(),
                carrier.len()
            )));
        }
        let sig = category.signature();
        if ops.len() != sig.len() {
            return Err(bad(format!("expected {} operations, got {}", sig.len(), ops.len())));
        }
        for (i, (&(s, t), table)) in sig.iter().zip(&ops).enumerate() {
            if table.len() != carrier[s] {
                return Err(bad(format!("operation {i} is not total on its carrier")));
            }
            if table.iter().any(|&y| y >= carrier[t]) {
                return Err(bad(format!("operation {i} leaves its target carrier")));
            }
        }
        if !category.has_edges() && !edges.is_empty() {
            return Err(bad("edges on a category without an edge relation".into()));
        }
        if edges.iter().any(|&(u, v)| u >= carrier[0] || v >= carrier[0]) {
            return Err(bad("edge endpoint out of range".into()));
        }
        if let Category::Presheaf(g) = &category {
            for o in 0..g.objects() {
                let id = g.identity(o);
                if (0..carrier[o]).any(|x| ops[id][x] != x) {
                    return Err(bad(format!("identity on sort {o} acts nontrivially")));
                }
            }
            for h in 0..g.arrow_count() {
                for k in 0..g.arrow_count() {
                    if let Some(hk) = g.compose(h, k) {
                        let src = g.arrows()[k].0;
                        if (0..carrier[src]).any(|x| ops[h][ops[k][x]] != ops[hk][x]) {
                            return Err(bad(format!("composition law fails for {h} . {k}")));
                        }
                    }
                }
            }
        }
        Ok(Obj {
            category,
            carrier,
            ops,
            edges,
        })
    }

    pub fn finset(n: usize) -> Self {
        Obj::new(Category::FinSet, vec![n], Vec::new(), BTreeSet::new()).unwrap()
    }

    pub fn empty(category: &Category) -> Self {
        let sig = category.signature();
        Obj::new(
            category.clone(),
            vec![0; category.sorts()],
            vec![Vec::new(); sig.len()],
            BTreeSet::new(),
        )
        .unwrap()
    }

    /// The terminal object: one element per sort, every operation trivial, a loop for graphs.
    pub fn terminal(category: &Category) -> Self {
        let sig = category.signature();
        let edges = if category.has_edges() {
            BTreeSet::from([(0, 0)])
        } else {
            BTreeSet::new()
        };
        Obj::new(
            category.clone(),
            vec![1; category.sorts()],
            vec![vec![0]; sig.len()],
            edges,
        )
        .unwrap()
    }

    pub fn unary(op: Vec<usize>) -> Result<Self> {
        let n = op.len();
        Obj::new(Category::Unary, vec![n], vec![op], BTreeSet::new())
    }

    /// `C_p`: `p` elements whose operation forms a single cycle.
    pub fn cycle(p: usize) -> Self {
        Obj::unary((0..p).map(|i| (i + 1) % p).collect()).unwrap()
    }

    pub fn graph(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Obj::new(
            Category::Graph,
            vec![vertices],
            Vec::new(),
            edges.into_iter().collect(),
        )
    }

    /// The path with `k` vertices `0 -> 1 -> ... -> k-1`.
    pub fn path(k: usize) -> Self {
        Obj::graph(k, (1..k).map(|i| (i - 1, i))).unwrap()
    }

    pub fn presheaf(g: &Arc<Groupoid>, carrier: Vec<usize>, ops: Vec<Vec<usize>>) -> Result<Self> {
        Obj::new(Category::Presheaf(g.clone()), carrier, ops, BTreeSet::new())
    }

    pub fn category(&self) -> &Category {
        &self.category
    }

    pub fn carrier(&self) -> &[usize] {
        &self.carrier
    }

    pub fn sort_size(&self, sort: usize) -> usize {
        self.carrier[sort]
    }

    /// Total number of elements over all sorts.
    pub fn size(&self) -> usize {
        self.carrier.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn ops(&self) -> &[Vec<usize>] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> &[usize] {
        &self.ops[i]
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    /// All elements as `(sort, index)` pairs in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.carrier
            .iter()
            .enumerate()
            .flat_map(|(s, &n)| (0..n).map(move |i| (s, i)))
    }

    /// Offset of each sort in the flattened element numbering.
    pub(crate) fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.carrier
            .iter()
            .map(|&n| {
                let o = acc;
                acc += n;
                o
            })
            .collect()
    }

    pub(crate) fn check_same_category(&self, other: &Obj) -> Result<()> {
        if self.category != other.category {
            return Err(Error::CategoryMismatch {
                expected: self.category.to_string(),
                found: other.category.to_string(),
            });
        }
        Ok(())
    }

    /// Cycle lengths of a unary algebra, one entry per connected component.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        assert_eq!(self.category, Category::Unary, "cycle_lengths on {}", self.category);
        let op = &self.ops[0];
        let n = self.carrier[0];
        let mut on_cycle = vec![false; n];
        for start in 0..n {
            // after n steps every element has entered its cycle
            let mut x = start;
            for _ in 0..n {
                x = op[x];
            }
            on_cycle[x] = true;
        }
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for x in 0..n {
            if on_cycle[x] && !seen[x] {
                let mut len = 0;
                let mut y = x;
                loop {
                    seen[y] = true;
                    len += 1;
                    y = op[y];
                    if y == x {
                        break;
                    }
                }
                lengths.push(len);
            }
        }
        lengths.sort_unstable();
        lengths
    }

    /// Whether a graph contains a directed cycle (a loop counts).
    pub fn has_directed_cycle(&self) -> bool {
        assert_eq!(self.category, Category::Graph);
        let n = self.carrier[0];
        let mut indeg = vec![0usize; n];
        for &(_, v) in &self.edges {
            indeg[v] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(u) = stack.pop() {
            removed += 1;
            for &(_, v) in self.edges.range((u, 0)..(u + 1, 0)) {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        removed < n
    }
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.category, self.carrier)?;
        if self.category.has_edges() {
            write!(f, " with {} edges", self.edges.len())?;
        }
        Ok(())
    }
}

/// A structure-preserving map, one carrier map per sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MorDoc", into = "MorDoc")]
pub struct Mor {
    dom: Arc<Obj>,
    cod: Arc<Obj>,
    maps: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct MorDoc {
    category: Category,
    dom: Obj,
    cod: Obj,
    maps: Vec<Vec<usize>>,
}

impl TryFrom<MorDoc> for Mor {
    type Error = Error;

    fn try_from(doc: MorDoc) -> Result<Self> {
        if doc.category != *doc.dom.category() {
            return Err(Error::CategoryMismatch {
                expected: doc.category.to_string(),
                found: doc.dom.category().to_string(),
            });
        }
        Mor::new(doc.dom, doc.cod, doc.maps)
    }
}

impl From<Mor> for MorDoc {
    fn from(m: Mor) -> Self {
        MorDoc {
            category: m.dom.category().clone(),
            dom: (*m.dom).clone(),
            cod: (*m.cod).clone(),
            maps: m.maps,
        }
    }
}

impl Mor {
    pub fn new(dom: impl Into<Arc<Obj>>, cod: impl Into<Arc<Obj>>, maps: Vec<Vec<usize>>) -> Result<Self> {
        let (dom, cod) = (dom.into(), cod.into());
        dom.check_same_category(&cod)?;
        let bad = |m: &str| Error::InvalidMorphism(format!("{dom} -> {cod}: {m}"));
        if maps.len() != dom.carrier.len() {
            return Err(bad("wrong number of sort maps"));
        }
        for (s, map) in maps.iter().enumerate() {
            if map.len() != dom.carrier[s] || map.iter().any(|&y| y >= cod.carrier[s]) {
                return Err(bad("sort map is not a total map into the codomain"));
            }
        }
        for ((&(s, t), dop), cop) in dom.category.signature().iter().zip(&dom.ops).zip(&cod.ops) {
            if (0..dom.carrier[s]).any(|x| maps[t][dop[x]] != cop[maps[s][x]]) {
                return Err(bad("does not preserve an operation"));
            }
        }
        if dom.edges.iter().any(|&(u, v)| !cod.has_edge(maps[0][u], maps[0][v])) {
            return Err(bad("does not preserve an edge"));
        }
        Ok(Mor { dom, cod, maps })
    }

    /// Builds a morphism the caller already knows to be structure preserving.
    pub(crate) fn new_unchecked(dom: Arc<Obj>, cod: Arc<Obj>, maps: Vec<Vec<usize>>) -> Self {
        debug_assert!(Mor::new(dom.clone(), cod.clone(), maps.clone()).is_ok());
        Mor { dom, cod, maps }
    }

    pub fn identity(x: &Obj) -> Self {
        let x = Arc::new(x.clone());
        let maps = x.carrier.iter().map(|&n| (0..n).collect()).collect();
        Mor {
            dom: x.clone(),
            cod: x,
            maps,
        }
    }

    /// The unique morphism into the terminal object.
    pub fn to_terminal(x: &Obj) -> Self {
        let t = Obj::terminal(x.category());
        let maps = x.carrier.iter().map(|&n| vec![0; n]).collect();
        Mor::new_unchecked(Arc::new(x.clone()), Arc::new(t), maps)
    }

    /// The unique morphism out of the empty object.
    pub fn from_empty(x: &Obj) -> Self {
        let e = Obj::empty(x.category());
        let maps = vec![Vec::new(); x.carrier.len()];
        Mor::new_unchecked(Arc::new(e), Arc::new(x.clone()), maps)
    }

    pub fn dom(&self) -> &Obj {
        &self.dom
    }

    pub fn cod(&self) -> &Obj {
        &self.cod
    }

    pub(crate) fn dom_arc(&self) -> &Arc<Obj> {
        &self.dom
    }

    pub(crate) fn cod_arc(&self) -> &Arc<Obj> {
        &self.cod
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn apply(&self, sort: usize, x: usize) -> usize {
        self.maps[sort][x]
    }

    /// `self . f`, i.e. first `f` then `self`.
    pub fn compose(&self, f: &Mor) -> Result<Mor> {
        if f.cod.carrier != self.dom.carrier || f.cod.category != self.dom.category {
            return Err(Error::NotComposable(format!("{} then {}", f.cod, self.dom)));
        }
        let maps = f
            .maps
            .iter()
            .enumerate()
            .map(|(s, m)| m.iter().map(|&x| self.maps[s][x]).collect())
            .collect();
        Ok(Mor::new_unchecked(f.dom.clone(), self.cod.clone(), maps))
    }

    /// Whether two morphisms act identically on elements, ignoring the
    /// codomain presentation. Used to compare maps into symbolic objects
    /// through windows of different sizes.
    pub fn same_action(&self, other: &Mor) -> bool {
        self.maps == other.maps
    }

    pub fn is_injective(&self) -> bool {
        self.maps.iter().enumerate().all(|(s, m)| {
            let mut seen = vec![false; self.cod.carrier[s]];
            m.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_surjective(&self) -> bool {
        self.maps.iter().enumerate().all(|(s, m)| {
            let mut seen = vec![false; self.cod.carrier[s]];
            m.iter().for_each(|&y| seen[y] = true);
            seen.into_iter().all(|b| b)
        })
    }

    /// Every codomain edge is the image of a domain edge.
    pub fn is_edge_surjective(&self) -> bool {
        let image: BTreeSet<(usize, usize)> = self
            .dom
            .edges
            .iter()
            .map(|&(u, v)| (self.maps[0][u], self.maps[0][v]))
            .collect();
        image.len() == self.cod.edges.len()
    }

    /// Images per sort, as membership vectors.
    pub fn image_sets(&self) -> Vec<Vec<bool>> {
        self.maps
            .iter()
            .enumerate()
            .map(|(s, m)| {
                let mut inside = vec![false; self.cod.carrier[s]];
                m.iter().for_each(|&y| inside[y] = true);
                inside
            })
            .collect()
    }
}

impl fmt::Display for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {:?}", self.dom, self.cod, self.maps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_is_a_single_cycle() {
        let c = Obj::cycle(5);
        assert_eq!(c.cycle_lengths(), vec![5]);
        assert_eq!(Obj::cycle(1).cycle_lengths(), vec![1]);
    }

    #[test]
    fn cycle_lengths_ignore_tails() {
        // 0 -> 1 -> 2 -> 1, 3 -> 3
        let x = Obj::unary(vec![1, 2, 1, 3]).unwrap();
        assert_eq!(x.cycle_lengths(), vec![1, 2]);
    }

    #[test]
    fn presheaf_composition_law_is_enforced() {
        let g = Arc::new(Groupoid::cyclic(2));
        // the swap of two points is a valid Z2 action
        assert!(Obj::presheaf(&g, vec![2], vec![vec![0, 1], vec![1, 0]]).is_ok());
        // a constant map is not: it does not square to the identity
        assert!(Obj::presheaf(&g, vec![2], vec![vec![0, 1], vec![0, 0]]).is_err());
        // neither is a nontrivial identity
        assert!(Obj::presheaf(&g, vec![2], vec![vec![1, 0], vec![1, 0]]).is_err());
    }

    #[test]
    fn morphism_must_preserve_structure() {
        let c4 = Obj::cycle(4);
        let c2 = Obj::cycle(2);
        assert!(Mor::new(c4.clone(), c2.clone(), vec![vec![0, 1, 0, 1]]).is_ok());
        assert!(Mor::new(c4, c2, vec![vec![0, 0, 1, 1]]).is_err());
        let p = Obj::path(2);
        assert!(Mor::new(p.clone(), Obj::graph(2, []).unwrap(), vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn composition_and_identity() {
        let c4 = Obj::cycle(4);
        let c2 = Obj::cycle(2);
        let f = Mor::new(c4.clone(), c2.clone(), vec![vec![0, 1, 0, 1]]).unwrap();
        let id2 = Mor::identity(&c2);
        assert_eq!(id2.compose(&f).unwrap(), f);
        assert_eq!(f.compose(&Mor::identity(&c4)).unwrap(), f);
        assert!(f.compose(&f).is_err());
    }

    #[test]
    fn directed_cycle_detection() {
        assert!(!Obj::path(4).has_directed_cycle());
        assert!(Obj::terminal(&Category::Graph).has_directed_cycle());
        assert!(Obj::graph(3, [(0, 1), (1, 2), (2, 0)]).unwrap().has_directed_cycle());
        // an undirected cycle is not a directed one
        assert!(!Obj::graph(3, [(0, 1), (1, 2), (0, 2)]).unwrap().has_directed_cycle());
    }

    #[test]
    fn json_schema_roundtrip() {
        let x = Obj::graph(3, [(0, 1), (1, 2)]).unwrap();
        let v = serde_json::to_value(&x).unwrap();
        assert_eq!(v["category"], "graph");
        assert_eq!(v["carrier"], serde_json::json!([3]));
        assert_eq!(v["structure"]["edges"], serde_json::json!([[0, 1], [1, 2]]));
        let back: Obj = serde_json::from_value(v).unwrap();
        assert_eq!(back, x);

        let f = Mor::new(Obj::cycle(4), Obj::cycle(2), vec![vec![0, 1, 0, 1]]).unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["category"], "unary");
        assert_eq!(v["maps"], serde_json::json!([[0, 1, 0, 1]]));
        let back: Mor = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn json_rejects_non_homomorphism() {
        let v = serde_json::json!({
            "category": "unary",
            "dom": {"category": "unary", "carrier": [2], "structure": {"ops": [[1, 0]]}},
            "cod": {"category": "unary", "carrier": [2], "structure": {"ops": [[0, 1]]}},
            "maps": [[0, 1]]
        });
        assert!(serde_json::from_value::<Mor>(v).is_err());
    }
}
