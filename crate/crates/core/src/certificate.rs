//! Replayable records of witnesses and refutations.
//!
//! A certificate stores the request that produced it (inputs and bounds) next
//! to the verdict and witness. Replaying reissues the request under the
//! recorded bounds and compares the two documents field by field.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cats::{Mor, Obj, SymbolicObject};
use crate::colimit::{reflect_colimit_test, symbolic_cocone};
use crate::error::{Error, Result};
use crate::functor::{finitarity_certificate, FunctorSpec};
use crate::hausdorff::{boundedness_witness, h_obj, FinMetricSpace};
use crate::nominal::nom_finitarity_report;
use crate::strictness::{
    decompose_into_atoms, no_finitary_endo_certificate, strictness_witness, Outcome, MAX_PATH, PRIME_TABLE_SIZE,
};
use crate::superfin::{
    superfinitary_test, ConstantF, FinitePowerset, HomF, IdentityF, KanFunctor, SetFunctor, SuperFinPresentation,
};
use crate::verdict::Verdict;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowBound {
    pub window: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeBound {
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaBounds {
    pub prime_table: usize,
    pub max_path: usize,
}

/// Set functors nameable in a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "functor", rename_all = "kebab-case")]
pub enum SetFunctorSpec {
    Identity,
    Constant { size: usize },
    Hom { exponent: usize },
    FinitePowerset,
    Presented { presentation: SuperFinPresentation },
}

impl SetFunctorSpec {
    pub fn build(&self) -> Box<dyn SetFunctor> {
        match self {
            SetFunctorSpec::Identity => Box::new(IdentityF),
            SetFunctorSpec::Constant { size } => Box::new(ConstantF(*size)),
            SetFunctorSpec::Hom { exponent } => Box::new(HomF(*exponent)),
            SetFunctorSpec::FinitePowerset => Box::new(FinitePowerset),
            SetFunctorSpec::Presented { presentation } => Box::new(KanFunctor::new(presentation.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainInputs {
    pub object: SymbolicObject,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinitarityInputs {
    pub functor: FunctorSpec,
    pub object: SymbolicObject,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorInputs {
    pub b: Mor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolicInputs {
    pub object: SymbolicObject,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjInputs {
    pub object: Obj,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperfinInputs {
    pub functor: SetFunctorSpec,
    pub n: usize,
    pub probes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NominalInputs {
    /// Length of the `P_1 -> P_1 + P_2 -> ...` prefix.
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HausdorffInputs {
    pub space: FinMetricSpace,
    /// Elements of the subset space, as subset masks.
    pub m0: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoBounds {}

/// What a certificate asks to be computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Request {
    ColimitTest { inputs: ChainInputs, bounds: WindowBound },
    Finitarity { inputs: FinitarityInputs, bounds: WindowBound },
    StrictnessWitness { inputs: MorInputs, bounds: SizeBound },
    NoFinitaryEndo { inputs: SymbolicInputs, bounds: LemmaBounds },
    Atoms { inputs: ObjInputs, bounds: NoBounds },
    Superfin { inputs: SuperfinInputs, bounds: NoBounds },
    Nominal { inputs: NominalInputs, bounds: NoBounds },
    Hausdorff { inputs: HausdorffInputs, bounds: NoBounds },
}

impl Request {
    pub fn kind(&self) -> &'static str {
        match self {
            Request::ColimitTest { .. } => "colimit-test",
            Request::Finitarity { .. } => "finitarity",
            Request::StrictnessWitness { .. } => "strictness-witness",
            Request::NoFinitaryEndo { .. } => "no-finitary-endo",
            Request::Atoms { .. } => "atoms",
            Request::Superfin { .. } => "superfin",
            Request::Nominal { .. } => "nominal",
            Request::Hausdorff { .. } => "hausdorff",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    #[serde(flatten)]
    pub request: Request,
    pub verdict: Verdict,
    pub witness: Value,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable witness")
}

/// Computes the verdict and witness for a request.
pub fn issue(request: &Request) -> Result<Certificate> {
    let (verdict, witness) = match request {
        Request::ColimitTest { inputs, bounds } => {
            let cocone = symbolic_cocone(inputs.object, inputs.k, bounds.window)?;
            let probes: Vec<Obj> = (1..=inputs.k + 1).map(|i| inputs.object.prefix(i)).collect();
            let report = reflect_colimit_test(&cocone, &probes)?;
            (report.verdict, to_value(&report))
        }
        Request::Finitarity { inputs, bounds } => {
            let f = inputs.functor.build();
            let report = finitarity_certificate(f.as_ref(), inputs.object, inputs.k, bounds.window)?;
            (report.verdict, to_value(&report))
        }
        Request::StrictnessWitness { inputs, bounds } => match strictness_witness(&inputs.b, bounds.bound)? {
            Outcome::Witness(w) => {
                let v = if w.verify() {
                    Verdict::Pass
                } else {
                    Verdict::FailCertified
                };
                (v, to_value(&w))
            }
            e @ Outcome::Exhausted { .. } => (Verdict::Exhausted, to_value(&e)),
        },
        Request::NoFinitaryEndo { inputs, bounds } => {
            if (bounds.prime_table, bounds.max_path) != (PRIME_TABLE_SIZE, MAX_PATH) {
                return Err(Error::Schema(format!(
                    "lemma bounds are fixed at prime_table = {PRIME_TABLE_SIZE}, max_path = {MAX_PATH}"
                )));
            }
            let c = no_finitary_endo_certificate(inputs.object)?;
            let v = if c.holds {
                Verdict::Pass
            } else {
                Verdict::FailCertified
            };
            (v, to_value(&c))
        }
        Request::Atoms { inputs, .. } => {
            let d = decompose_into_atoms(&inputs.object)?;
            let (_, cmp) = d.comparison(&inputs.object)?;
            let v = if cmp.is_injective() && cmp.is_surjective() {
                Verdict::Pass
            } else {
                Verdict::FailCertified
            };
            (v, to_value(&d))
        }
        Request::Superfin { inputs, .. } => {
            let f = inputs.functor.build();
            let report = superfinitary_test(f.as_ref(), inputs.n, &inputs.probes);
            (report.verdict, to_value(&report))
        }
        Request::Nominal { inputs, .. } => {
            let report = nom_finitarity_report(inputs.k)?;
            (report.verdict, to_value(&report))
        }
        Request::Hausdorff { inputs, .. } => {
            let axioms = h_obj(&inputs.space).is_ok();
            let w = boundedness_witness(&inputs.space, &inputs.m0)?;
            let v = if axioms && w.verified {
                Verdict::Pass
            } else {
                Verdict::FailCertified
            };
            (v, to_value(&w))
        }
    };
    Ok(Certificate {
        schema_version: SCHEMA_VERSION,
        request: request.clone(),
        verdict,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub kind: String,
    pub recorded: Verdict,
    pub recomputed: Verdict,
    pub matches: bool,
    /// JSON pointers where the documents differ, with both values.
    pub diff: Vec<String>,
}

/// Parses a certificate document, reporting any structural problem as a schema violation.
pub fn parse(text: &str) -> Result<Certificate> {
    let c: Certificate = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if c.schema_version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "schema version {} is not {SCHEMA_VERSION}",
            c.schema_version
        )));
    }
    Ok(c)
}

/// Reissues the recorded request and compares the results.
pub fn replay(c: &Certificate) -> Result<ReplayOutcome> {
    let fresh = issue(&c.request)?;
    let mut diff = Vec::new();
    diff_values("", &to_value(c), &to_value(&fresh), &mut diff);
    Ok(ReplayOutcome {
        kind: c.request.kind().into(),
        recorded: c.verdict,
        recomputed: fresh.verdict,
        matches: diff.is_empty(),
        diff,
    })
}

pub fn replay_str(text: &str) -> Result<ReplayOutcome> {
    replay(&parse(text)?)
}

fn diff_values(path: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let keys: std::collections::BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            for k in keys {
                let p = format!("{path}/{k}");
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff_values(&p, u, v, out),
                    (u, v) => out.push(format!("{p}: {} != {}", show(u), show(v))),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                diff_values(&format!("{path}/{i}"), u, v, out);
            }
        }
        _ if a != b => out.push(format!("{}: {a} != {b}", if path.is_empty() { "/" } else { path })),
        _ => {}
    }
}

fn show(v: Option<&Value>) -> String {
    v.map_or_else(|| "(absent)".into(), Value::to_string)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cats::DEFAULT_WINDOW;

    fn fresh(r: Request) -> Certificate {
        issue(&r).unwrap()
    }

    fn roundtrip(c: &Certificate) -> ReplayOutcome {
        replay_str(&serde_json::to_string_pretty(c).unwrap()).unwrap()
    }

    fn every_kind() -> Vec<Request> {
        let b = Mor::new(Obj::finset(2), Obj::finset(3), vec![vec![0, 2]]).unwrap();
        let space = FinMetricSpace::discrete(3, num_rational::Rational64::new(1, 2)).unwrap();
        vec![
            Request::ColimitTest {
                inputs: ChainInputs {
                    object: SymbolicObject::CycleFamily,
                    k: 2,
                },
                bounds: WindowBound { window: DEFAULT_WINDOW },
            },
            Request::Finitarity {
                inputs: FinitarityInputs {
                    functor: FunctorSpec::UnCounterexample,
                    object: SymbolicObject::CycleFamily,
                    k: 3,
                },
                bounds: WindowBound { window: DEFAULT_WINDOW },
            },
            Request::StrictnessWitness {
                inputs: MorInputs { b },
                bounds: SizeBound { bound: 5 },
            },
            Request::NoFinitaryEndo {
                inputs: SymbolicInputs {
                    object: SymbolicObject::Ray,
                },
                bounds: LemmaBounds {
                    prime_table: PRIME_TABLE_SIZE,
                    max_path: MAX_PATH,
                },
            },
            Request::Atoms {
                inputs: ObjInputs { object: Obj::finset(3) },
                bounds: NoBounds {},
            },
            Request::Superfin {
                inputs: SuperfinInputs {
                    functor: SetFunctorSpec::FinitePowerset,
                    n: 2,
                    probes: vec![1, 2, 3],
                },
                bounds: NoBounds {},
            },
            Request::Nominal {
                inputs: NominalInputs { k: 1 },
                bounds: NoBounds {},
            },
            Request::Hausdorff {
                inputs: HausdorffInputs { space, m0: vec![1, 6] },
                bounds: NoBounds {},
            },
        ]
    }

    #[test]
    fn fresh_certificates_replay_exactly() {
        let kinds: Vec<&str> = every_kind().iter().map(|r| r.kind()).collect();
        assert_eq!(kinds.len(), 8);
        for r in every_kind() {
            let c = fresh(r);
            let out = roundtrip(&c);
            assert!(out.matches, "{}: {:?}", out.kind, out.diff);
            assert_eq!(out.recorded, out.recomputed);
        }
    }

    #[test]
    fn expected_verdicts() {
        let verdicts: Vec<Verdict> = every_kind().into_iter().map(|r| fresh(r).verdict).collect();
        use Verdict::*;
        assert_eq!(verdicts[1..], [FailCertified, Pass, Pass, Pass, FailCertified, FailCertified, Pass]);
    }

    #[test]
    fn tampered_witness_is_a_mismatch() {
        let c = fresh(every_kind().swap_remove(2));
        let mut doc = to_value(&c);
        let maps = doc.pointer_mut("/witness/f/maps/0/0").expect("witness morphism");
        *maps = Value::from(maps.as_u64().unwrap() + 1);
        let out = replay_str(&doc.to_string()).unwrap();
        assert!(!out.matches);
        assert!(out.diff.iter().any(|d| d.starts_with("/witness/f/maps/0/0")), "{:?}", out.diff);
    }

    #[test]
    fn raised_bound_replays_under_recorded_bound() {
        let mut r = every_kind().swap_remove(2);
        if let Request::StrictnessWitness { bounds, .. } = &mut r {
            bounds.bound = 50;
        }
        let c = fresh(r);
        assert!(roundtrip(&c).matches);
        assert!(to_value(&c).pointer("/bounds/bound") == Some(&Value::from(50)));
    }

    #[test]
    fn schema_violations() {
        assert!(matches!(replay_str("{}"), Err(Error::Schema(_))));
        assert!(matches!(replay_str("not json"), Err(Error::Schema(_))));
        let mut doc = to_value(&fresh(every_kind().swap_remove(4)));
        doc["schema_version"] = Value::from(99);
        assert!(matches!(replay_str(&doc.to_string()), Err(Error::Schema(_))));
        let mut doc = to_value(&fresh(every_kind().swap_remove(4)));
        doc["kind"] = Value::from("unknown-kind");
        assert!(matches!(replay_str(&doc.to_string()), Err(Error::Schema(_))));
    }
}
