//! Self-check suites run by `twodim verify`.
//!
//! Each suite goes through an [`Engine`], so tests can swap in a broken
//! transform or canonicalizer and watch the suite fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canon::{self, arity, materialize, normalize_label, ClassResult, FamilyLabel};
use crate::error::Result;
use crate::fields::{Field, FieldElement};
use crate::msc::{Gl2, Msc};
use crate::oracle::{self, Oracle};

pub const DEFAULT_SEED: u64 = 0x2d_a1_9e;

pub const SUITES: [&str; 5] = ["traces", "action", "idempotence", "invariance", "census"];

#[derive(Clone, Copy)]
pub struct Engine {
    pub transform: fn(&Msc, &Gl2) -> Result<Msc>,
    pub canonicalize: fn(&Msc) -> Result<ClassResult>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            transform: |a, g| a.transform(g),
            canonicalize: canon::canonicalize,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random cases per field in the randomized suites.
    pub samples: usize,
    pub oracle: Oracle,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            samples: 1000,
            oracle: Oracle::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
    /// The first few failure descriptions.
    pub examples: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> SuiteReport {
        SuiteReport {
            name: name.to_string(),
            passed: 0,
            failed: 0,
            examples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.examples.len() < 5 {
                self.examples.push(what());
            }
        }
    }

    fn error(&mut self, e: impl std::fmt::Display) {
        self.record(false, || e.to_string());
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

pub fn random_element(f: &Field, rng: &mut impl Rng) -> FieldElement {
    f.element(rng.gen_range(0..f.order()))
        .expect("index below order")
}

/// Uniform entries, with each entry zeroed at rate 1/3 so that the thin
/// subsets are hit often.
pub fn random_msc(f: &Field, rng: &mut impl Rng) -> Msc {
    let mut rows = [[FieldElement::ZERO; 4]; 2];
    for x in rows.iter_mut().flatten() {
        if rng.gen_range(0..3) != 0 {
            *x = random_element(f, rng);
        }
    }
    Msc::new(f, rows).expect("entries from the field")
}

pub fn random_gl2(f: &Field, rng: &mut impl Rng) -> Gl2 {
    loop {
        let m = [
            [random_element(f, rng), random_element(f, rng)],
            [random_element(f, rng), random_element(f, rng)],
        ];
        if let Ok(g) = Gl2::new(f, m) {
            return g;
        }
    }
}

fn row_times(f: &Field, v: [FieldElement; 2], m: &[[FieldElement; 2]; 2]) -> [FieldElement; 2] {
    [
        f.add(f.mul(v[0], m[0][0]), f.mul(v[1], m[1][0])),
        f.add(f.mul(v[0], m[0][1]), f.mul(v[1], m[1][1])),
    ]
}

fn fields(list: &[(u64, u32)]) -> Vec<Field> {
    list.iter()
        .map(|&(p, k)| Field::new(p, k).expect("suite fields are valid"))
        .collect()
}

/// One field per characteristic pipeline.
pub fn pipeline_fields() -> Vec<Field> {
    fields(&[(7, 1), (2, 3), (3, 2)])
}

/// `Tr₁(gA(g⁻¹)^⊗2) = Tr₁(A)g⁻¹`, and likewise for `Tr₂`.
pub fn trace_identities(engine: &Engine, cfg: &VerifyConfig, fields: &[Field]) -> SuiteReport {
    let mut rep = SuiteReport::new("traces");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for f in fields {
        for _ in 0..cfg.samples {
            let a = random_msc(f, &mut rng);
            let g = random_gl2(f, &mut rng);
            match (engine.transform)(&a, &g) {
                Err(e) => rep.error(e),
                Ok(b) => {
                    let (ta, tb) = (a.traces(), b.traces());
                    let h = g.inverse_matrix();
                    let ok = tb.tr1 == row_times(f, ta.tr1, h) && tb.tr2 == row_times(f, ta.tr2, h);
                    rep.record(ok, || format!("{a:?} under {g:?}"));
                }
            }
        }
    }
    rep
}

/// Identity acts trivially, `(gh)·A = g·(h·A)`, and the action agrees with
/// the entrywise oracle formula.
pub fn action_laws(engine: &Engine, cfg: &VerifyConfig, fields: &[Field]) -> SuiteReport {
    let mut rep = SuiteReport::new("action");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 1);
    for f in fields {
        for _ in 0..cfg.samples {
            let a = random_msc(f, &mut rng);
            let g = random_gl2(f, &mut rng);
            let h = random_gl2(f, &mut rng);
            let t = engine.transform;
            let check = || -> Result<(bool, bool, bool)> {
                let id = t(&a, &Gl2::identity(f))? == a;
                let gh = t(&a, &g.compose(&h)?)? == t(&t(&a, &h)?, &g)?;
                let oracle = t(&a, &g)? == oracle::transform_by_index(&a, &g);
                Ok((id, gh, oracle))
            };
            match check() {
                Err(e) => rep.error(e),
                Ok((id, gh, oracle)) => {
                    rep.record(id, || format!("identity moves {a:?}"));
                    rep.record(gh, || format!("composition fails for {a:?}"));
                    rep.record(oracle, || {
                        format!("entrywise formula disagrees on {a:?} under {g:?}")
                    });
                }
            }
        }
    }
    rep
}

/// `0, 1, 2` reduced into `f`, topped up with further elements when the
/// characteristic collapses them.
pub fn grid_values(f: &Field) -> Vec<FieldElement> {
    let mut out: Vec<FieldElement> = Vec::new();
    let extra = f.elements();
    for x in [0, 1, 2].map(|n| f.from_int(n)).into_iter().chain(extra) {
        if out.len() == 3 {
            break;
        }
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Every family member with parameters from `values`.
pub fn label_grid(f: &Field, values: &[FieldElement]) -> Vec<FamilyLabel> {
    let mut out = Vec::new();
    for family in 1..=12u8 {
        let n = arity(family).expect("families 1..=12");
        let mut idx = vec![0usize; n];
        loop {
            let params = idx.iter().map(|&i| values[i]).collect();
            out.push(FamilyLabel::new(f, family, params).expect("valid arity"));
            let mut pos = 0;
            while pos < n {
                idx[pos] += 1;
                if idx[pos] < values.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    out
}

/// `canonicalize(materialize(L)) = normalize(L)` over a three-value grid.
pub fn idempotence(engine: &Engine, fields: &[Field]) -> SuiteReport {
    let mut rep = SuiteReport::new("idempotence");
    for f in fields {
        for label in label_grid(f, &grid_values(f)) {
            let expected = normalize_label(&label);
            match materialize(&label).and_then(|a| (engine.canonicalize)(&a)) {
                Err(e) => rep.error(format!("{label}: {e}")),
                Ok(r) => rep.record(r.label == expected && r.field == *f, || {
                    format!("{label} came back as {}", r.label)
                }),
            }
        }
    }
    rep
}

/// `canonicalize(g·A)` and `canonicalize(A)` carry equivalent labels, and
/// each witness reproduces its canonical matrix.
pub fn invariance(engine: &Engine, cfg: &VerifyConfig, fields: &[Field]) -> SuiteReport {
    let mut rep = SuiteReport::new("invariance");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 2);
    for f in fields {
        for _ in 0..cfg.samples {
            let a = random_msc(f, &mut rng);
            let g = random_gl2(f, &mut rng);
            let check = || -> Result<Option<String>> {
                let b = (engine.transform)(&a, &g)?;
                let ra = (engine.canonicalize)(&a)?;
                let rb = (engine.canonicalize)(&b)?;
                for (m, r) in [(&a, &ra), (&b, &rb)] {
                    let lifted = m.embed(&r.field)?;
                    if oracle::transform_by_index(&lifted, &r.witness) != r.canonical {
                        return Ok(Some(format!("witness for {m:?} does not verify")));
                    }
                    if materialize(&r.label)? != r.canonical {
                        return Ok(Some(format!("{} is not the canonical of {m:?}", r.label)));
                    }
                }
                if !ra.label.equivalent(&rb.label)? {
                    return Ok(Some(format!(
                        "{a:?} gives {}, its image gives {}",
                        ra.label, rb.label
                    )));
                }
                Ok(None)
            };
            match check() {
                Err(e) => rep.error(e),
                Ok(problem) => rep.record(problem.is_none(), || problem.unwrap_or_default()),
            }
        }
    }
    rep
}

/// Exhaustive censuses: every matrix checked against its brute-force orbit.
pub fn census_agreement(engine: &Engine, cfg: &VerifyConfig, fields: &[Field]) -> SuiteReport {
    let mut rep = SuiteReport::new("census");
    for f in fields {
        let q = f.order() as u64;
        match cfg.oracle.census_with(f, engine.canonicalize) {
            Err(e) => rep.error(format!("{f:?}: {e}")),
            Ok(t) => {
                let covered: u64 = t.rows.iter().map(|r| r.size).sum();
                rep.record(t.total == q.pow(8) && covered == t.total, || {
                    format!("{f:?}: orbits cover {covered} of {} matrices", q.pow(8))
                });
                let bad = t.failures.len() as u64;
                rep.passed += t.total.saturating_sub(bad);
                rep.failed += bad;
                for x in t
                    .failures
                    .iter()
                    .take(5usize.saturating_sub(rep.examples.len()))
                {
                    rep.examples.push(format!("{:?}: {}", x.matrix, x.reason));
                }
            }
        }
    }
    rep
}

/// Runs one suite by name with its default fields.
pub fn run_suite(name: &str, engine: &Engine, cfg: &VerifyConfig) -> Option<SuiteReport> {
    let rep = match name {
        "traces" => trace_identities(engine, cfg, &pipeline_fields()),
        "action" => action_laws(engine, cfg, &pipeline_fields()),
        "idempotence" => idempotence(engine, &fields(&[(7, 1), (2, 2), (3, 1)])),
        "invariance" => invariance(engine, cfg, &pipeline_fields()),
        "census" => census_agreement(engine, cfg, &fields(&[(2, 1), (3, 1)])),
        _ => return None,
    };
    Some(rep)
}

pub fn run_all(engine: &Engine, cfg: &VerifyConfig) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .filter_map(|s| run_suite(s, engine, cfg))
        .collect()
}
