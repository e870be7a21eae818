//! Backtracking enumeration of structure-preserving maps.
//!
//! Elements are visited in a breadth-first order over the constraint graph
//! (operations and edges, both directions). Assigning an element forces the
//! image of everything reachable through operations, so an algebra map out of
//! a cycle is fixed by a single choice.

use std::ops::ControlFlow;
use std::sync::Arc;

use super::{Mor, Obj};
use crate::error::Result;

const UNSET: usize = usize::MAX;

pub struct HomSearch {
    dom: Arc<Obj>,
    cod: Arc<Obj>,
    injective: bool,
    fixed: Vec<(usize, usize, usize)>,
}

impl HomSearch {
    pub fn new(dom: &Obj, cod: &Obj) -> Result<Self> {
        dom.check_same_category(cod)?;
        Ok(HomSearch {
            dom: Arc::new(dom.clone()),
            cod: Arc::new(cod.clone()),
            injective: false,
            fixed: Vec::new(),
        })
    }

    pub(crate) fn from_arcs(dom: Arc<Obj>, cod: Arc<Obj>) -> Result<Self> {
        dom.check_same_category(&cod)?;
        Ok(HomSearch {
            dom,
            cod,
            injective: false,
            fixed: Vec::new(),
        })
    }

    /// Only enumerate maps that are injective on every sort.
    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    /// Require `h(sort, x) = y`.
    pub fn fix(mut self, sort: usize, x: usize, y: usize) -> Self {
        self.fixed.push((sort, x, y));
        self
    }

    /// Visits every morphism; the visitor may stop the search early.
    pub fn for_each(&self, mut visit: impl FnMut(Vec<Vec<usize>>) -> ControlFlow<()>) {
        let mut s = Searcher::new(&self.dom, &self.cod, self.injective);
        let mark = s.trail.len();
        for &(sort, x, y) in &self.fixed {
            let gx = s.dom_off[sort] + x;
            let gy = s.cod_off[sort] + y;
            if x >= self.dom.sort_size(sort) || y >= self.cod.sort_size(sort) || !s.assign(gx, gy) {
                s.undo(mark);
                return;
            }
        }
        let _ = s.search(0, &mut |assign: &[usize]| visit(s_split(&self.dom, &self.cod, assign)));
    }

    pub fn collect(&self) -> Vec<Mor> {
        let mut out = Vec::new();
        self.for_each(|maps| {
            out.push(Mor::new_unchecked(self.dom.clone(), self.cod.clone(), maps));
            ControlFlow::Continue(())
        });
        out
    }

    pub fn first(&self) -> Option<Mor> {
        let mut out = None;
        self.for_each(|maps| {
            out = Some(Mor::new_unchecked(self.dom.clone(), self.cod.clone(), maps));
            ControlFlow::Break(())
        });
        out
    }

    pub fn exists(&self) -> bool {
        self.first().is_some()
    }

    pub fn count(&self) -> usize {
        let mut n = 0;
        self.for_each(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }
}

/// All morphisms `dom -> cod`, duplicate-free, in search order.
pub fn hom_set(dom: &Obj, cod: &Obj) -> Result<Vec<Mor>> {
    Ok(HomSearch::new(dom, cod)?.collect())
}

fn s_split(dom: &Obj, cod: &Obj, assign: &[usize]) -> Vec<Vec<usize>> {
    let cod_off = cod.offsets();
    let mut at = 0;
    dom.carrier()
        .iter()
        .enumerate()
        .map(|(s, &n)| {
            let m = assign[at..at + n].iter().map(|&g| g - cod_off[s]).collect();
            at += n;
            m
        })
        .collect()
}

struct Searcher {
    dom_off: Vec<usize>,
    cod_off: Vec<usize>,
    /// Candidate range in the codomain numbering for each domain element.
    range: Vec<(usize, usize)>,
    /// `(op, target)` for each domain element.
    succ: Vec<Vec<(usize, usize)>>,
    /// `(op, source)` for each domain element.
    pred: Vec<Vec<(usize, usize)>>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    /// `cod_ops[op][g]` for codomain elements in the source sort of `op`.
    cod_ops: Vec<Vec<usize>>,
    cod_adj: Vec<bool>,
    cod_n: usize,
    injective: bool,
    assign: Vec<usize>,
    used: Vec<bool>,
    trail: Vec<usize>,
    order: Vec<usize>,
    stack: Vec<(usize, usize)>,
}

impl Searcher {
    fn new(dom: &Obj, cod: &Obj, injective: bool) -> Self {
        let dom_off = dom.offsets();
        let cod_off = cod.offsets();
        let n = dom.size();
        let cod_n = cod.size();
        let sig = dom.category().signature();

        let mut range = Vec::with_capacity(n);
        for (s, &k) in dom.carrier().iter().enumerate() {
            for _ in 0..k {
                range.push((cod_off[s], cod_off[s] + cod.sort_size(s)));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        let mut cod_ops = vec![vec![UNSET; cod_n]; sig.len()];
        for (o, &(s, t)) in sig.iter().enumerate() {
            for x in 0..dom.sort_size(s) {
                let gx = dom_off[s] + x;
                let gy = dom_off[t] + dom.op(o)[x];
                succ[gx].push((o, gy));
                pred[gy].push((o, gx));
            }
            for x in 0..cod.sort_size(s) {
                cod_ops[o][cod_off[s] + x] = cod_off[t] + cod.op(o)[x];
            }
        }
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for &(u, v) in dom.edges() {
            out_edges[u].push(v);
            in_edges[v].push(u);
        }
        let mut cod_adj = vec![false; if cod.category().has_edges() { cod_n * cod_n } else { 0 }];
        for &(u, v) in cod.edges() {
            cod_adj[u * cod_n + v] = true;
        }

        // breadth-first order over the undirected constraint graph
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                order.push(x);
                let nbrs = succ[x]
                    .iter()
                    .map(|&(_, y)| y)
                    .chain(pred[x].iter().map(|&(_, y)| y))
                    .chain(out_edges[x].iter().copied())
                    .chain(in_edges[x].iter().copied());
                for y in nbrs.collect::<Vec<_>>() {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }

        Searcher {
            dom_off,
            cod_off,
            range,
            succ,
            pred,
            out_edges,
            in_edges,
            cod_ops,
            cod_adj,
            cod_n,
            injective,
            assign: vec![UNSET; n],
            used: vec![false; cod_n],
            trail: Vec::new(),
            order,
            stack: Vec::new(),
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().unwrap();
            self.used[self.assign[x]] = false;
            self.assign[x] = UNSET;
        }
    }

    /// Assigns `x -> y` and everything it forces; on failure leaves partial
    /// assignments on the trail for the caller to undo.
    fn assign(&mut self, x: usize, y: usize) -> bool {
        self.stack.clear();
        self.stack.push((x, y));
        while let Some((a, b)) = self.stack.pop() {
            if self.assign[a] != UNSET {
                if self.assign[a] != b {
                    return false;
                }
                continue;
            }
            if self.injective && self.used[b] {
                return false;
            }
            self.assign[a] = b;
            self.used[b] = true;
            self.trail.push(a);
            for &(o, t) in &self.succ[a] {
                self.stack.push((t, self.cod_ops[o][b]));
            }
            for &(o, s) in &self.pred[a] {
                let hs = self.assign[s];
                if hs != UNSET && self.cod_ops[o][hs] != b {
                    return false;
                }
            }
            for &v in &self.out_edges[a] {
                let hv = self.assign[v];
                if hv != UNSET && !self.cod_adj[b * self.cod_n + hv] {
                    return false;
                }
            }
            for &u in &self.in_edges[a] {
                let hu = self.assign[u];
                if hu != UNSET && !self.cod_adj[hu * self.cod_n + b] {
                    return false;
                }
            }
        }
        true
    }

    fn search(
        &mut self,
        mut pos: usize,
        emit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        while pos < self.order.len() && self.assign[self.order[pos]] != UNSET {
            pos += 1;
        }
        if pos == self.order.len() {
            return emit(&self.assign);
        }
        let x = self.order[pos];
        let (lo, hi) = self.range[x];
        for y in lo..hi {
            let mark = self.trail.len();
            if self.assign(x, y) {
                self.search(pos + 1, emit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }
}
