use serde::{Deserialize, Serialize};

use super::black_box::{FinitePowerset, SetFunctor};
use super::FinFn;
use crate::verdict::Verdict;

/// An element of `F(x)` outside every `Ff[F(n)]`, `f: n -> x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncoveredElement {
    pub probe: usize,
    pub element: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperfinReport {
    pub functor: String,
    pub n: usize,
    pub probes: Vec<usize>,
    pub verdict: Verdict,
    pub witness: Option<UncoveredElement>,
}

/// Elements of `F(x)` reached from `from ⊆ F(n)` along all maps `n -> x`.
fn union_of_images(f: &dyn SetFunctor, n: usize, from: &[usize], x: usize) -> Vec<bool> {
    let mut hit = vec![false; f.card(x)];
    for g in FinFn::all(n, x) {
        for &e in from {
            hit[f.apply(&g, e)] = true;
        }
    }
    hit
}

/// Checks that `F(x)` is covered by the images of `F(n)` on every probe.
pub fn superfinitary_test(f: &dyn SetFunctor, n: usize, probes: &[usize]) -> SuperfinReport {
    let all: Vec<usize> = (0..f.card(n)).collect();
    let witness = probes.iter().find_map(|&x| {
        union_of_images(f, n, &all, x)
            .iter()
            .position(|&h| !h)
            .map(|element| UncoveredElement { probe: x, element })
    });
    SuperfinReport {
        functor: f.name(),
        n,
        probes: probes.to_vec(),
        verdict: if witness.is_some() {
            Verdict::FailCertified
        } else {
            Verdict::PassProbeLimited
        },
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnaValues {
    /// `(x, sorted elements of F_{n,A}(x))` per probe.
    pub values: Vec<(usize, Vec<usize>)>,
    /// Whether every map between probes sends values into values.
    pub closed: bool,
}

/// Values of the subfunctor of `F` generated by `a ⊆ F(n)` on the probes.
pub fn generate_fna(f: &dyn SetFunctor, n: usize, a: &[usize], probes: &[usize]) -> FnaValues {
    let values: Vec<(usize, Vec<usize>)> = probes
        .iter()
        .map(|&x| {
            let hit = union_of_images(f, n, a, x);
            (x, (0..hit.len()).filter(|&e| hit[e]).collect())
        })
        .collect();
    let closed = values.iter().all(|(x, vx)| {
        values.iter().all(|(y, vy)| {
            FinFn::all(*x, *y)
                .iter()
                .all(|g| vx.iter().all(|&e| vy.binary_search(&f.apply(g, e)).is_ok()))
        })
    });
    FnaValues { values, closed }
}

/// Every family `α_k: F(k) -> F(k)`, `k <= m`, natural for all maps between
/// cardinals `<= m`. Found by backtracking with a naturality check after each
/// assignment.
pub fn natural_endo_families(f: &dyn SetFunctor, m: usize) -> Vec<Vec<Vec<usize>>> {
    let cards: Vec<usize> = (0..=m).map(|k| f.card(k)).collect();
    // tables[k][k2][code][e] = F(g)(e)
    let tables: Vec<Vec<Vec<Vec<usize>>>> = (0..=m)
        .map(|k| {
            (0..=m)
                .map(|k2| {
                    FinFn::all(k, k2)
                        .iter()
                        .map(|g| (0..cards[k]).map(|e| f.apply(g, e)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let slots: Vec<(usize, usize)> = (0..=m).flat_map(|k| (0..cards[k]).map(move |e| (k, e))).collect();
    let mut alpha: Vec<Vec<Option<usize>>> = cards.iter().map(|&c| vec![None; c]).collect();
    let mut out = Vec::new();
    fn consistent(
        tables: &[Vec<Vec<Vec<usize>>>],
        alpha: &[Vec<Option<usize>>],
        k: usize,
        e: usize,
    ) -> bool {
        let a = alpha[k][e].expect("assigned");
        // maps out of k
        for (k2, by_code) in tables[k].iter().enumerate() {
            for t in by_code {
                if let Some(b) = alpha[k2][t[e]] {
                    if b != t[a] {
                        return false;
                    }
                }
            }
        }
        // maps into k
        for (k0, row) in tables.iter().enumerate() {
            for t in &row[k] {
                for (e0, &img) in t.iter().enumerate() {
                    if img == e {
                        if let Some(a0) = alpha[k0][e0] {
                            if t[a0] != a {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
    fn go(
        i: usize,
        slots: &[(usize, usize)],
        cards: &[usize],
        tables: &[Vec<Vec<Vec<usize>>>],
        alpha: &mut Vec<Vec<Option<usize>>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        let Some(&(k, e)) = slots.get(i) else {
            out.push(alpha.iter().map(|r| r.iter().map(|v| v.unwrap()).collect()).collect());
            return;
        };
        for a in 0..cards[k] {
            alpha[k][e] = Some(a);
            if consistent(tables, alpha, k, e) {
                go(i + 1, slots, cards, tables, alpha, out);
            }
        }
        alpha[k][e] = None;
    }
    go(0, &slots, &cards, &tables, &mut alpha, &mut out);
    out
}

/// Natural endomorphism families of the nonempty finite power-set functor up to level `m <= 4`.
pub fn powfin_endo_probe(m: usize) -> crate::Result<Vec<Vec<Vec<usize>>>> {
    if m > 4 {
        return Err(crate::Error::Precondition(format!("level bound {m} exceeds 4")));
    }
    Ok(natural_endo_families(&FinitePowerset, m))
}
