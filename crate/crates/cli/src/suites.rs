//! Demo suites. Each check records the verdict it is expected to reach; the
//! counterexample suites expect certified failures.

use std::sync::Arc;

use finbound::cats::ops::{coproduct, subobjects};
use finbound::cats::{Category, Groupoid, Mor, Obj, SymbolicObject, DEFAULT_WINDOW};
use finbound::certificate::{
    issue, ChainInputs, Certificate, FinitarityInputs, HausdorffInputs, LemmaBounds, MorInputs, NoBounds,
    NominalInputs, ObjInputs, Request, SetFunctorSpec, SizeBound, SuperfinInputs, SymbolicInputs, WindowBound,
};
use finbound::colimit::Apex;
use finbound::functor::{finitely_bounded_witness, verify_boundedness, BoundednessOutcome, FunctorSpec};
use finbound::hausdorff::FinMetricSpace;
use finbound::nominal::{equivariant_endos, single_orbit_enumerate, support_rigidity_check, NomElement};
use finbound::strictness::{random_presheaf, MAX_PATH, PRIME_TABLE_SIZE};
use finbound::Verdict;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    UnCounterexample,
    GraphCounterexample,
    NomCounterexample,
    Strictness,
    Atoms,
    Superfin,
    NominalClassification,
    Hausdorff,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 8] = [
        Suite::UnCounterexample,
        Suite::GraphCounterexample,
        Suite::NomCounterexample,
        Suite::Strictness,
        Suite::Atoms,
        Suite::Superfin,
        Suite::NominalClassification,
        Suite::Hausdorff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::UnCounterexample => "un-counterexample",
            Suite::GraphCounterexample => "graph-counterexample",
            Suite::NomCounterexample => "nom-counterexample",
            Suite::Strictness => "strictness",
            Suite::Atoms => "atoms",
            Suite::Superfin => "superfin",
            Suite::NominalClassification => "nominal-classification",
            Suite::Hausdorff => "hausdorff",
            Suite::All => "all",
        }
    }

    /// The suites to run, sorted by name.
    pub fn expand(self) -> Vec<Suite> {
        let mut v = if self == Suite::All {
            Suite::CONCRETE.to_vec()
        } else {
            vec![self]
        };
        v.sort_by_key(|s| s.name());
        v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Verdict,
    pub verdict: Verdict,
    /// Whether the verdict is the expected one.
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

pub struct Params {
    pub seed: u64,
    pub bound: usize,
}

fn suite_rng(seed: u64, suite: Suite) -> ChaCha8Rng {
    // FNV-1a of the name keeps each suite's stream independent of the others
    let h = suite
        .name()
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn certified(name: impl Into<String>, expected: Verdict, request: Request) -> Check {
    match issue(&request) {
        Ok(c) => Check {
            name: name.into(),
            expected,
            verdict: c.verdict,
            ok: c.verdict == expected,
            certificate: Some(c),
            detail: Value::Null,
        },
        Err(e) => errored(name, expected, e.to_string()),
    }
}

fn computed(name: impl Into<String>, expected: Verdict, verdict: Verdict, detail: Value) -> Check {
    Check {
        name: name.into(),
        expected,
        verdict,
        ok: verdict == expected,
        certificate: None,
        detail,
    }
}

fn errored(name: impl Into<String>, expected: Verdict, error: String) -> Check {
    computed(name, expected, Verdict::Exhausted, json!({ "error": error }))
}

pub fn run(suite: Suite, p: &Params) -> SuiteReport {
    let mut rng = suite_rng(p.seed, suite);
    let checks = match suite {
        Suite::UnCounterexample => un_counterexample(p),
        Suite::GraphCounterexample => graph_counterexample(p),
        Suite::NomCounterexample => nom_counterexample(),
        Suite::Strictness => strictness(p, &mut rng),
        Suite::Atoms => atoms(&mut rng),
        Suite::Superfin => superfin(),
        Suite::NominalClassification => nominal_classification(),
        Suite::Hausdorff => hausdorff(&mut rng),
        Suite::All => unreachable!("expanded before running"),
    };
    SuiteReport {
        suite: suite.name().into(),
        checks,
    }
}

fn finitarity(functor: FunctorSpec, object: SymbolicObject, k: usize) -> Request {
    Request::Finitarity {
        inputs: FinitarityInputs { functor, object, k },
        bounds: WindowBound { window: DEFAULT_WINDOW },
    }
}

fn no_endo(object: SymbolicObject) -> Request {
    Request::NoFinitaryEndo {
        inputs: SymbolicInputs { object },
        bounds: LemmaBounds {
            prime_table: PRIME_TABLE_SIZE,
            max_path: MAX_PATH,
        },
    }
}

/// Boundedness witnesses for every subobject of `F(a)` with at most four elements.
fn boundedness(functor: FunctorSpec, a: Apex, bound: usize) -> Check {
    let f = functor.build();
    let name = format!("boundedness of {} on {}", f.name(), apex_name(&a));
    let fa = match &a {
        Apex::Finite(x) => f.on_obj(x),
        Apex::Symbolic(s) => f.on_symbolic(*s).and_then(|v| match v {
            Apex::Finite(x) => Ok(x),
            Apex::Symbolic(s) => Err(finbound::Error::Unsupported(format!("subobjects of {}", s.name()))),
        }),
    };
    let run = || -> finbound::Result<(usize, Option<String>)> {
        let mut found = 0;
        for m0 in subobjects(&fa?)?.into_iter().filter(|m| m.dom().size() <= 4) {
            match finitely_bounded_witness(f.as_ref(), &a, &m0, bound, DEFAULT_WINDOW)? {
                BoundednessOutcome::Witness(w) if verify_boundedness(f.as_ref(), &a, &w, DEFAULT_WINDOW)? => {
                    found += 1
                }
                _ => return Ok((found, Some(m0.to_string()))),
            }
        }
        Ok((found, None))
    };
    match run() {
        Ok((found, None)) => computed(name, Verdict::Pass, Verdict::Pass, json!({ "witnesses": found, "bound": bound })),
        Ok((found, Some(m0))) => computed(
            name,
            Verdict::Pass,
            Verdict::Exhausted,
            json!({ "witnesses": found, "bound": bound, "unwitnessed": m0 }),
        ),
        Err(e) => errored(name, Verdict::Pass, e.to_string()),
    }
}

fn apex_name(a: &Apex) -> String {
    match a {
        Apex::Finite(x) => x.to_string(),
        Apex::Symbolic(s) => s.name().into(),
    }
}

fn un_counterexample(p: &Params) -> Vec<Check> {
    let c2c3 = coproduct(&Category::Unary, &[Obj::cycle(2), Obj::cycle(3)]).expect("unary coproduct").0;
    vec![
        boundedness(FunctorSpec::UnCounterexample, Apex::Finite(c2c3), p.bound),
        boundedness(
            FunctorSpec::UnCounterexample,
            Apex::Symbolic(SymbolicObject::CycleFamily),
            p.bound,
        ),
        certified(
            "finitarity on the prime-cycle chain, k = 3",
            Verdict::FailCertified,
            finitarity(FunctorSpec::UnCounterexample, SymbolicObject::CycleFamily, 3),
        ),
        certified(
            "identity finitarity on the prime-cycle chain, k = 3",
            Verdict::PassProbeLimited,
            finitarity(
                FunctorSpec::Identity {
                    category: Category::Unary,
                },
                SymbolicObject::CycleFamily,
                3,
            ),
        ),
        certified(
            "colimit of the prime-cycle chain",
            Verdict::PassProbeLimited,
            Request::ColimitTest {
                inputs: ChainInputs {
                    object: SymbolicObject::CycleFamily,
                    k: 3,
                },
                bounds: WindowBound { window: DEFAULT_WINDOW },
            },
        ),
        certified(
            "no finitary endomorphism of the prime-cycle family",
            Verdict::Pass,
            no_endo(SymbolicObject::CycleFamily),
        ),
    ]
}

fn graph_counterexample(p: &Params) -> Vec<Check> {
    vec![
        boundedness(FunctorSpec::GraphCounterexample, Apex::Finite(Obj::path(3)), p.bound),
        certified(
            "finitarity on the path chain, k = 3",
            Verdict::FailCertified,
            finitarity(FunctorSpec::GraphCounterexample, SymbolicObject::Ray, 3),
        ),
        certified("no finitary endomorphism of the ray", Verdict::Pass, no_endo(SymbolicObject::Ray)),
    ]
}

fn nom_counterexample() -> Vec<Check> {
    let mut checks: Vec<Check> = (1..=3)
        .map(|k| {
            certified(
                format!("finitarity on the P-chain, k = {k}"),
                Verdict::FailCertified,
                Request::Nominal {
                    inputs: NominalInputs { k },
                    bounds: NoBounds {},
                },
            )
        })
        .collect();
    let name = "support rigidity of endomorphisms of P_1 + P_2 + P_3";
    let endos = equivariant_endos(3);
    let mut checked = 0;
    let mut verdict = Verdict::PassProbeLimited;
    for e in &endos {
        let f = |x: &NomElement| e.apply(x);
        match support_rigidity_check(&f, 3, 10) {
            Ok(r) => {
                checked += r.checked;
                if r.verdict != Verdict::PassProbeLimited {
                    verdict = r.verdict;
                }
            }
            Err(e) => {
                checks.push(errored(name, Verdict::PassProbeLimited, e.to_string()));
                return checks;
            }
        }
    }
    checks.push(computed(
        name,
        Verdict::PassProbeLimited,
        verdict,
        json!({ "endomorphisms": endos.len(), "elements": checked, "pool": 10 }),
    ));
    checks
}

fn random_unary(rng: &mut ChaCha8Rng, n: usize) -> Obj {
    Obj::unary((0..n).map(|_| rng.gen_range(0..n)).collect()).expect("total operation")
}

fn strictness(p: &Params, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut checks = Vec::new();
    for i in 0..4 {
        let (d, c) = (rng.gen_range(0..=4), rng.gen_range(1..=5));
        let map = (0..d).map(|_| rng.gen_range(0..c)).collect();
        let b = Mor::new(Obj::finset(d), Obj::finset(c), vec![map]).expect("set map");
        checks.push(certified(
            format!("FinSet morphism {i}"),
            Verdict::Pass,
            Request::StrictnessWitness {
                inputs: MorInputs { b },
                bounds: SizeBound { bound: p.bound },
            },
        ));
    }
    for i in 0..3 {
        let n = rng.gen_range(1..=6);
        let a = random_unary(rng, n);
        let subs = subobjects(&a).expect("small algebra");
        let b = subs[rng.gen_range(0..subs.len())].clone();
        checks.push(certified(
            format!("unary subalgebra inclusion {i}"),
            Verdict::Pass,
            Request::StrictnessWitness {
                inputs: MorInputs { b },
                bounds: SizeBound { bound: p.bound },
            },
        ));
    }
    let g = Arc::new(Groupoid::cyclic(2));
    for i in 0..3 {
        let a = random_presheaf(&g, 6, rng);
        let subs = subobjects(&a).expect("small presheaf");
        let b = subs[rng.gen_range(0..subs.len())].clone();
        checks.push(certified(
            format!("Z2-set inclusion {i}"),
            Verdict::Pass,
            Request::StrictnessWitness {
                inputs: MorInputs { b },
                bounds: SizeBound { bound: p.bound },
            },
        ));
    }
    checks
}

fn atoms(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let groups = [
        Groupoid::trivial(),
        Groupoid::cyclic(2),
        Groupoid::cyclic(3),
        Groupoid::symmetric3(),
    ];
    groups
        .into_iter()
        .flat_map(|g| {
            let g = Arc::new(g);
            (0..3)
                .map(|i| {
                    let object = random_presheaf(&g, 8, rng);
                    certified(
                        format!("{}-set {i}", g.name()),
                        Verdict::Pass,
                        Request::Atoms {
                            inputs: ObjInputs { object },
                            bounds: NoBounds {},
                        },
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn superfin() -> Vec<Check> {
    let mut checks: Vec<Check> = (1..=4)
        .map(|n| {
            certified(
                format!("finite power set at level {n}"),
                Verdict::FailCertified,
                Request::Superfin {
                    inputs: SuperfinInputs {
                        functor: SetFunctorSpec::FinitePowerset,
                        n,
                        probes: (1..=n + 1).collect(),
                    },
                    bounds: NoBounds {},
                },
            )
        })
        .collect();
    checks.push(certified(
        "Set(2, -) at level 2",
        Verdict::PassProbeLimited,
        Request::Superfin {
            inputs: SuperfinInputs {
                functor: SetFunctorSpec::Hom { exponent: 2 },
                n: 2,
                probes: vec![1, 2, 3, 4],
            },
            bounds: NoBounds {},
        },
    ));
    checks
}

fn nominal_classification() -> Vec<Check> {
    (0..=3)
        .map(|n| {
            let name = format!("single-orbit nominal sets with support size {n}");
            match single_orbit_enumerate(n) {
                Ok(reps) => {
                    let orbits: Vec<Value> = reps
                        .iter()
                        .map(|o| json!({ "group_order": o.group().len(), "generators": o.generators() }))
                        .collect();
                    computed(name, Verdict::Pass, Verdict::Pass, json!({ "count": reps.len(), "orbits": orbits }))
                }
                Err(e) => errored(name, Verdict::Pass, e.to_string()),
            }
        })
        .collect()
}

/// Shortest-path closure of random weights in `(0, 1]`.
fn random_space(rng: &mut ChaCha8Rng, n: usize) -> FinMetricSpace {
    let mut d = vec![vec![Rational64::from_integer(0); n]; n];
    for i in 0..n {
        for j in 0..i {
            d[i][j] = Rational64::new(rng.gen_range(1..=8), 8);
            d[j][i] = d[i][j];
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    FinMetricSpace::from_fn(n, |i, j| d[i][j]).expect("shortest paths form a metric")
}

fn hausdorff(rng: &mut ChaCha8Rng) -> Vec<Check> {
    (0..4)
        .map(|i| {
            let n = rng.gen_range(1..=4);
            let space = random_space(rng, n);
            let m0 = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..1usize << n)).collect();
            certified(
                format!("subset-space boundedness {i}"),
                Verdict::Pass,
                Request::Hausdorff {
                    inputs: HausdorffInputs { space, m0 },
                    bounds: NoBounds {},
                },
            )
        })
        .collect()
}
