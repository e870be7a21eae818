//! Finite metric spaces of diameter at most 1 and the Hausdorff functor.
//!
//! Distances are exact rationals. Completeness and compactness hold trivially
//! for finite spaces, so the Hausdorff space of `X` is the space of all its
//! nonempty subsets. Subsets are bitmasks; subset `S` is point `mask(S) - 1`
//! of the Hausdorff space.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest space whose subset space is built.
pub const MAX_HAUSDORFF_POINTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceDoc", into = "SpaceDoc")]
pub struct FinMetricSpace {
    points: usize,
    d: Vec<Vec<Rational64>>,
}

/// `d[i]` lists `d(i, j)` for `j < i`, each as `"p/q"`.
#[derive(Serialize, Deserialize)]
struct SpaceDoc {
    points: usize,
    d: Vec<Vec<String>>,
}

pub fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::Schema(format!("{s:?} is not a rational"));
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (i64, i64) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl TryFrom<SpaceDoc> for FinMetricSpace {
    type Error = Error;
    fn try_from(doc: SpaceDoc) -> Result<Self> {
        if doc.d.len() != doc.points || doc.d.iter().enumerate().any(|(i, r)| r.len() != i) {
            return Err(Error::Schema("distance rows must form a lower triangle".into()));
        }
        let lower = doc
            .d
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FinMetricSpace::from_fn(doc.points, |i, j| lower[i.max(j)][i.min(j)])
    }
}

impl From<FinMetricSpace> for SpaceDoc {
    fn from(x: FinMetricSpace) -> Self {
        SpaceDoc {
            points: x.points,
            d: (0..x.points)
                .map(|i| (0..i).map(|j| x.d[i][j].to_string()).collect())
                .collect(),
        }
    }
}

impl FinMetricSpace {
    /// Builds and validates a space from `d(i, j)` for `i > j`.
    pub fn from_fn(points: usize, d: impl Fn(usize, usize) -> Rational64) -> Result<Self> {
        let mut m = vec![vec![Rational64::zero(); points]; points];
        for i in 0..points {
            for j in 0..i {
                m[i][j] = d(i, j);
                m[j][i] = m[i][j];
            }
        }
        let x = FinMetricSpace { points, d: m };
        x.check_axioms()?;
        Ok(x)
    }

    pub fn discrete(points: usize, distance: Rational64) -> Result<Self> {
        FinMetricSpace::from_fn(points, |_, _| distance)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn d(&self, i: usize, j: usize) -> Rational64 {
        self.d[i][j]
    }

    /// Positivity, symmetry, the triangle inequality and diameter at most 1.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.points;
        let bad = |m: String| Error::InvalidObject(format!("metric: {m}"));
        for i in 0..n {
            if !self.d[i][i].is_zero() {
                return Err(bad(format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                let dij = self.d[i][j];
                if dij != self.d[j][i] {
                    return Err(bad(format!("d({i},{j}) is not symmetric")));
                }
                if i != j && dij <= Rational64::zero() {
                    return Err(bad(format!("d({i},{j}) is not positive")));
                }
                if dij > Rational64::one() {
                    return Err(bad(format!("d({i},{j}) exceeds 1")));
                }
                for k in 0..n {
                    if self.d[i][k] > dij + self.d[j][k] {
                        return Err(bad(format!("triangle inequality fails at {i},{j},{k}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// The subspace on the given points, in the given order.
    pub fn subspace(&self, members: &[usize]) -> Result<Self> {
        FinMetricSpace::from_fn(members.len(), |i, j| self.d[members[i]][members[j]])
    }
}

fn members(mask: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |&i| mask & (1 << i) != 0)
}

/// `d(x, M) = min_{y ∈ M} d(x, y)`.
pub fn point_set_dist(x: &FinMetricSpace, p: usize, m: usize) -> Result<Rational64> {
    members(m)
        .map(|y| x.d(p, y))
        .min()
        .ok_or_else(|| Error::Precondition("distance to the empty set".into()))
}

/// `max(sup_{x ∈ M} d(x, N), sup_{y ∈ N} d(y, M))`.
pub fn hausdorff_dist(x: &FinMetricSpace, m: usize, n: usize) -> Result<Rational64> {
    if m == 0 || n == 0 {
        return Err(Error::Precondition("Hausdorff distance to the empty set".into()));
    }
    let one_sided = |a: usize, b: usize| -> Result<Rational64> {
        members(a)
            .map(|p| point_set_dist(x, p, b))
            .try_fold(Rational64::zero(), |acc, d| d.map(|d| acc.max(d)))
    };
    Ok(one_sided(m, n)?.max(one_sided(n, m)?))
}

/// The space of nonempty subsets under the Hausdorff distance.
pub fn h_obj(x: &FinMetricSpace) -> Result<FinMetricSpace> {
    if x.points > MAX_HAUSDORFF_POINTS {
        return Err(Error::Precondition(format!(
            "subset space of {} points exceeds {MAX_HAUSDORFF_POINTS}",
            x.points
        )));
    }
    let n = (1usize << x.points) - 1;
    FinMetricSpace::from_fn(n, |i, j| hausdorff_dist(x, i + 1, j + 1).expect("nonempty subsets"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonexpandingMap {
    pub dom: FinMetricSpace,
    pub cod: FinMetricSpace,
    pub map: Vec<usize>,
}

impl NonexpandingMap {
    pub fn new(dom: FinMetricSpace, cod: FinMetricSpace, map: Vec<usize>) -> Result<Self> {
        if map.len() != dom.points || map.iter().any(|&y| y >= cod.points) {
            return Err(Error::InvalidMorphism("point map has the wrong shape".into()));
        }
        for i in 0..dom.points {
            for j in 0..i {
                if cod.d(map[i], map[j]) > dom.d(i, j) {
                    return Err(Error::InvalidMorphism(format!("expands the distance between {i} and {j}")));
                }
            }
        }
        Ok(NonexpandingMap { dom, cod, map })
    }

    pub fn identity(x: &FinMetricSpace) -> Self {
        NonexpandingMap {
            dom: x.clone(),
            cod: x.clone(),
            map: (0..x.points).collect(),
        }
    }

    /// `self . g`.
    pub fn compose(&self, g: &NonexpandingMap) -> Result<NonexpandingMap> {
        if g.cod != self.dom {
            return Err(Error::NotComposable("codomain and domain differ".into()));
        }
        Ok(NonexpandingMap {
            dom: g.dom.clone(),
            cod: self.cod.clone(),
            map: g.map.iter().map(|&i| self.map[i]).collect(),
        })
    }

    pub fn is_isometric(&self) -> bool {
        (0..self.dom.points).all(|i| (0..i).all(|j| self.cod.d(self.map[i], self.map[j]) == self.dom.d(i, j)))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.points];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    fn image_mask(&self, mask: usize) -> usize {
        members(mask).fold(0, |acc, i| acc | (1 << self.map[i]))
    }
}

/// Direct images: `M -> f[M]`; validated as nonexpanding for the Hausdorff distances.
pub fn h_mor(f: &NonexpandingMap) -> Result<NonexpandingMap> {
    let (hd, hc) = (h_obj(&f.dom)?, h_obj(&f.cod)?);
    let map = (1..=hd.points).map(|m| f.image_mask(m) - 1).collect();
    NonexpandingMap::new(hd, hc, map)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HausdorffBoundedness {
    /// The points of `M ⊆ X`, the union of the members of `M0`.
    pub support: Vec<usize>,
    /// For each element of `M0`, its preimage under `Hm` as a subset mask of `M`.
    pub preimages: Vec<usize>,
    pub verified: bool,
}

/// For `M0 ⊆ HX` (subset masks of `X`), the subspace `M` of all their points
/// and the subsets of `M` whose direct images are the elements of `M0`.
pub fn boundedness_witness(x: &FinMetricSpace, m0: &[usize]) -> Result<HausdorffBoundedness> {
    let full = (1usize << x.points) - 1;
    if m0.iter().any(|&s| s == 0 || s & !full != 0) {
        return Err(Error::Precondition("elements of the subset space are nonempty subsets".into()));
    }
    let union = m0.iter().fold(0, |a, &s| a | s);
    let support: Vec<usize> = members(union).collect();
    let m = x.subspace(&support)?;
    let incl = NonexpandingMap::new(m.clone(), x.clone(), support.clone())?;
    let preimages: Vec<usize> = m0
        .iter()
        .map(|&s| {
            support
                .iter()
                .enumerate()
                .filter(|&(_, &p)| s & (1 << p) != 0)
                .fold(0, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    let verified = preimages.iter().zip(m0).all(|(&t, &s)| incl.image_mask(t) == s);
    Ok(HausdorffBoundedness {
        support,
        preimages,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    /// Metric `d(i, j) = (20 + |w_i - w_j|) / 40` for weights in `0..20`: a line
    /// metric shifted by a constant, which keeps the triangle inequality.
    fn space(weights: &[i64]) -> FinMetricSpace {
        FinMetricSpace::from_fn(weights.len(), |i, j| r(20 + (weights[i] - weights[j]).abs(), 40)).unwrap()
    }

    /// `H(M, N)` straight from the definition, with sets as vectors.
    fn oracle(x: &FinMetricSpace, m: &[usize], n: &[usize]) -> Rational64 {
        let dist = |p: usize, s: &[usize]| s.iter().map(|&q| x.d(p, q)).min().unwrap();
        let a = m.iter().map(|&p| dist(p, n)).max().unwrap();
        let b = n.iter().map(|&p| dist(p, m)).max().unwrap();
        a.max(b)
    }

    #[test]
    fn point_set_examples() {
        let two = FinMetricSpace::discrete(2, r(1, 2)).unwrap();
        assert_eq!(point_set_dist(&two, 0, 0b01).unwrap(), r(0, 1));
        assert_eq!(point_set_dist(&two, 0, 0b10).unwrap(), r(1, 2));
        assert!(point_set_dist(&two, 0, 0).is_err());
        let three = FinMetricSpace::from_fn(3, |i, j| match (i, j) {
            (1, 0) => r(1, 5),
            (2, 0) => r(2, 5),
            _ => r(1, 2),
        })
        .unwrap();
        assert_eq!(point_set_dist(&three, 0, 0b110).unwrap(), r(1, 5));
    }

    #[test]
    fn hausdorff_examples() {
        let two = FinMetricSpace::discrete(2, r(1, 2)).unwrap();
        assert_eq!(hausdorff_dist(&two, 0b11, 0b11).unwrap(), r(0, 1));
        assert_eq!(hausdorff_dist(&two, 0b01, 0b10).unwrap(), r(1, 2));
        assert_eq!(hausdorff_dist(&two, 0b01, 0b11).unwrap(), r(1, 2));
        assert!(hausdorff_dist(&two, 0, 0b1).is_err());
    }

    #[test]
    fn subset_spaces_match_the_oracle() {
        for weights in [vec![0], vec![0, 3], vec![0, 1, 5]] {
            let x = space(&weights);
            let h = h_obj(&x).unwrap();
            assert_eq!(h.points(), (1 << weights.len()) - 1);
            for i in 0..h.points() {
                for j in 0..h.points() {
                    let (m, n): (Vec<usize>, Vec<usize>) = (members(i + 1).collect(), members(j + 1).collect());
                    assert_eq!(h.d(i, j), oracle(&x, &m, &n));
                }
            }
        }
    }

    #[test]
    fn h_mor_examples() {
        let x = space(&[0, 2, 3]);
        let id = NonexpandingMap::identity(&x);
        assert_eq!(h_mor(&id).unwrap(), NonexpandingMap::identity(&h_obj(&x).unwrap()));
        let pt = FinMetricSpace::discrete(1, r(1, 1)).unwrap();
        let c = NonexpandingMap::new(x.clone(), pt, vec![0; 3]).unwrap();
        assert!(h_mor(&c).unwrap().map.iter().all(|&m| m == 0));
        let sub = x.subspace(&[0, 2]).unwrap();
        let e = NonexpandingMap::new(sub, x, vec![0, 2]).unwrap();
        assert!(e.is_isometric());
        assert!(h_mor(&e).unwrap().is_injective());
    }

    #[test]
    fn boundedness_examples() {
        let x = space(&[0, 1, 2, 4, 7]);
        let w = boundedness_witness(&x, &[0b100]).unwrap();
        assert_eq!(w.support, vec![2]);
        let singletons: Vec<usize> = (0..5).map(|i| 1 << i).collect();
        let w = boundedness_witness(&x, &singletons).unwrap();
        assert_eq!(w.support, vec![0, 1, 2, 3, 4]);
        assert!(w.verified);
    }

    #[test]
    fn serde_roundtrip() {
        let x = space(&[0, 1, 3]);
        let json = serde_json::to_string(&x).unwrap();
        assert!(json.contains("\"21/40\""));
        let back: FinMetricSpace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let bad = r#"{"points":3,"d":[[],["1/10"],["1/10","1/2"]]}"#;
        assert!(serde_json::from_str::<FinMetricSpace>(bad).is_err());
    }

    fn arb_space() -> impl Strategy<Value = FinMetricSpace> {
        prop::collection::vec(0i64..20, 1..=5).prop_map(|w| space(&w))
    }

    /// A nonexpanding map from a line-shaped space: clamping weights is 1-Lipschitz.
    fn clamp_map(x: &[i64], lo: i64, hi: i64) -> (FinMetricSpace, FinMetricSpace, Vec<usize>) {
        let clamped: Vec<i64> = x.iter().map(|&w| w.clamp(lo, hi)).collect();
        let mut values: Vec<i64> = clamped.clone();
        values.sort_unstable();
        values.dedup();
        let map = clamped.iter().map(|v| values.binary_search(v).unwrap()).collect();
        (space(x), space(&values), map)
    }

    proptest! {
        #[test]
        fn subset_space_is_a_metric(x in arb_space()) {
            prop_assert!(h_obj(&x).unwrap().check_axioms().is_ok());
        }

        #[test]
        fn isometric_embeddings_stay_injective(w in prop::collection::vec(0i64..20, 2..=5), keep in 1usize..31) {
            let x = space(&w);
            let members: Vec<usize> = (0..w.len()).filter(|&i| keep & (1 << i) != 0).collect();
            prop_assume!(!members.is_empty());
            let sub = x.subspace(&members).unwrap();
            let e = NonexpandingMap::new(sub, x, members).unwrap();
            prop_assert!(e.is_isometric());
            prop_assert!(h_mor(&e).unwrap().is_injective());
        }

        #[test]
        fn boundedness_always_succeeds(x in arb_space(), m0 in prop::collection::vec(1usize..32, 1..4)) {
            let full = (1usize << x.points()) - 1;
            let m0: Vec<usize> = m0.into_iter().map(|s| s & full).filter(|&s| s != 0).collect();
            prop_assume!(!m0.is_empty());
            let w = boundedness_witness(&x, &m0).unwrap();
            prop_assert!(w.verified);
            prop_assert_eq!(w.support.iter().fold(0, |a, &p| a | (1 << p)), m0.iter().fold(0, |a, &s| a | s));
        }
    }

    #[test]
    fn functoriality() {
        // clamping twice: first into [2, 9], then into [4, 6]
        let w = vec![0, 3, 5, 8, 11];
        let (x, y, f) = clamp_map(&w, 2, 9);
        let f = NonexpandingMap::new(x.clone(), y.clone(), f).unwrap();
        let yw: Vec<i64> = {
            let mut v: Vec<i64> = w.iter().map(|&a| a.clamp(2, 9)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let (y2, z, g) = clamp_map(&yw, 4, 6);
        assert_eq!(y2, y);
        let g = NonexpandingMap::new(y, z, g).unwrap();
        let gf = g.compose(&f).unwrap();
        assert_eq!(h_mor(&gf).unwrap(), h_mor(&g).unwrap().compose(&h_mor(&f).unwrap()).unwrap());
        assert_eq!(h_mor(&NonexpandingMap::identity(&x)).unwrap(), NonexpandingMap::identity(&h_obj(&x).unwrap()));
    }
}
