use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite groupoid given by its arrows and a partial composition table.
///
/// Presheaves over a groupoid are modelled as sorted unary algebras: every
/// arrow `g: a -> b` becomes an operation from sort `a` to sort `b`. Since a
/// groupoid is isomorphic to its opposite via inversion we act covariantly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupoidDoc", into = "GroupoidDoc")]
pub struct Groupoid {
    name: String,
    objects: usize,
    arrows: Vec<(usize, usize)>,
    /// `compose[h][g] = h . g` whenever `tgt(g) == src(h)`.
    compose: Vec<Vec<Option<usize>>>,
    identities: Vec<usize>,
    inverses: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupoidDoc {
    name: String,
    objects: usize,
    arrows: Vec<(usize, usize)>,
    compose: Vec<Vec<Option<usize>>>,
}

impl TryFrom<GroupoidDoc> for Groupoid {
    type Error = Error;

    fn try_from(doc: GroupoidDoc) -> Result<Self> {
        Groupoid::new(doc.name, doc.objects, doc.arrows, doc.compose)
    }
}

impl From<Groupoid> for GroupoidDoc {
    fn from(g: Groupoid) -> Self {
        GroupoidDoc {
            name: g.name,
            objects: g.objects,
            arrows: g.arrows,
            compose: g.compose,
        }
    }
}

impl Groupoid {
    pub fn new(
        name: impl Into<String>,
        objects: usize,
        arrows: Vec<(usize, usize)>,
        compose: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidObject(format!("groupoid: {m}"));
        let n = arrows.len();
        if compose.len() != n || compose.iter().any(|row| row.len() != n) {
            return Err(bad("composition table has the wrong shape".into()));
        }
        for &(s, t) in &arrows {
            if s >= objects || t >= objects {
                return Err(bad("arrow endpoint out of range".into()));
            }
        }
        for h in 0..n {
            for g in 0..n {
                let composable = arrows[g].1 == arrows[h].0;
                match compose[h][g] {
                    Some(_) if !composable => {
                        return Err(bad(format!("{h} . {g} defined but not composable")))
                    }
                    None if composable => {
                        return Err(bad(format!("{h} . {g} composable but undefined")))
                    }
                    Some(c) if c >= n || arrows[c] != (arrows[g].0, arrows[h].1) => {
                        return Err(bad(format!("{h} . {g} has wrong endpoints")))
                    }
                    _ => {}
                }
            }
        }
        for k in 0..n {
            for h in 0..n {
                for g in 0..n {
                    if let (Some(hg), Some(kh)) = (compose[h][g], compose[k][h]) {
                        if compose[k][hg] != compose[kh][g] {
                            return Err(bad("composition is not associative".into()));
                        }
                    }
                }
            }
        }
        let mut identities = Vec::with_capacity(objects);
        for o in 0..objects {
            let id = (0..n).find(|&e| {
                arrows[e] == (o, o)
                    && (0..n).all(|g| {
                        (arrows[g].1 != o || compose[e][g] == Some(g))
                            && (arrows[g].0 != o || compose[g][e] == Some(g))
                    })
            });
            identities.push(id.ok_or_else(|| bad(format!("object {o} has no identity")))?);
        }
        let mut inverses = Vec::with_capacity(n);
        for g in 0..n {
            let (s, t) = arrows[g];
            let inv = (0..n).find(|&h| {
                compose[h][g] == Some(identities[s]) && compose[g][h] == Some(identities[t])
            });
            inverses.push(inv.ok_or_else(|| bad(format!("arrow {g} is not invertible")))?);
        }
        Ok(Groupoid {
            name: name.into(),
            objects,
            arrows,
            compose,
            identities,
            inverses,
        })
    }

    /// One-object groupoid from a group multiplication table.
    pub fn from_group(name: impl Into<String>, table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        let arrows = vec![(0, 0); n];
        let compose = table
            .iter()
            .map(|row| row.iter().map(|&c| Some(c)).collect())
            .collect();
        Groupoid::new(name, 1, arrows, compose)
    }

    pub fn trivial() -> Self {
        Groupoid::from_group("trivial", &[vec![0]]).expect("trivial group")
    }

    /// The cyclic group of order `n`, element `k` acting as rotation by `k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let table: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Groupoid::from_group(format!("Z{n}"), &table).expect("cyclic group")
    }

    /// The symmetric group on three letters.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|h| {
                perms
                    .iter()
                    .map(|g| index([h[g[0]], h[g[1]], h[g[2]]]))
                    .collect()
            })
            .collect();
        Groupoid::from_group("S3", &table).expect("symmetric group")
    }

    /// The codiscrete groupoid on `k` objects: exactly one arrow between any two.
    pub fn codiscrete(k: usize) -> Self {
        let arrows: Vec<(usize, usize)> =
            (0..k).flat_map(|s| (0..k).map(move |t| (s, t))).collect();
        let idx = |s: usize, t: usize| s * k + t;
        let compose = arrows
            .iter()
            .map(|&(hs, ht)| {
                arrows
                    .iter()
                    .map(|&(gs, gt)| (gt == hs).then(|| idx(gs, ht)))
                    .collect()
            })
            .collect();
        Groupoid::new(format!("codiscrete{k}"), k, arrows, compose).expect("codiscrete groupoid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn compose(&self, h: usize, g: usize) -> Option<usize> {
        self.compose[h][g]
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identities[object]
    }

    pub fn inverse(&self, arrow: usize) -> usize {
        self.inverses[arrow]
    }

    /// Arrows `a -> b`.
    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&g| self.arrows[g] == (a, b))
            .collect()
    }

    /// Arrows with source `a`.
    pub fn arrows_from(&self, a: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&g| self.arrows[g].0 == a)
            .collect()
    }

    /// Automorphisms of `a`, the vertex group.
    pub fn vertex_group(&self, a: usize) -> Vec<usize> {
        self.hom(a, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_groupoids_validate() {
        assert_eq!(Groupoid::trivial().arrow_count(), 1);
        assert_eq!(Groupoid::cyclic(3).arrow_count(), 3);
        let s3 = Groupoid::symmetric3();
        assert_eq!(s3.arrow_count(), 6);
        assert_eq!(s3.identity(0), 0);
        let c = Groupoid::codiscrete(2);
        assert_eq!(c.objects(), 2);
        assert_eq!(c.hom(0, 1).len(), 1);
        assert_eq!(c.inverse(c.hom(0, 1)[0]), c.hom(1, 0)[0]);
    }

    #[test]
    fn s3_is_not_abelian() {
        let s3 = Groupoid::symmetric3();
        let commute = (0..6).all(|a| (0..6).all(|b| s3.compose(a, b) == s3.compose(b, a)));
        assert!(!commute);
    }

    #[test]
    fn rejects_non_associative_table() {
        // a "group" of order 3 with a broken table
        let table = vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 1, 0]];
        assert!(Groupoid::from_group("bad", &table).is_err());
    }

    #[test]
    fn serde_roundtrip_revalidates() {
        let g = Groupoid::symmetric3();
        let json = serde_json::to_string(&g).unwrap();
        let back: Groupoid = serde_json::from_str(&json).unwrap();
        assert_eq!(g, back);
    }
}
