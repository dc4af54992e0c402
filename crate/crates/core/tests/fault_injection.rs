//! Seeded faults must make the self-check suites fail.

use twodim_core::canon::{materialize, FamilyLabel};
use twodim_core::verify::{run_all, run_suite, Engine, VerifyConfig};
use twodim_core::{canonicalize, ClassResult, Gl2, Msc, Result};

fn cfg() -> VerifyConfig {
    VerifyConfig {
        samples: 200,
        ..VerifyConfig::default()
    }
}

fn failing(engine: &Engine) -> Vec<String> {
    run_all(engine, &cfg())
        .into_iter()
        .filter(|r| !r.ok())
        .map(|r| r.name)
        .collect()
}

#[test]
fn correct_engine_passes_everything() {
    assert!(failing(&Engine::default()).is_empty());
}

#[test]
fn transposed_action_is_caught() {
    let engine = Engine {
        transform: |a: &Msc, g: &Gl2| {
            let m = g.matrix();
            a.transform(&Gl2::new(
                a.field(),
                [[m[0][0], m[1][0]], [m[0][1], m[1][1]]],
            )?)
        },
        ..Engine::default()
    };
    let bad = failing(&engine);
    assert!(
        bad.contains(&"traces".to_string()) && bad.contains(&"action".to_string()),
        "{bad:?}"
    );
}

#[test]
fn corrupted_entry_is_caught() {
    let engine = Engine {
        transform: |a: &Msc, g: &Gl2| {
            let b = a.transform(g)?;
            let f = b.field().clone();
            let mut rows = *b.rows();
            rows[1][3] = f.add(rows[1][3], f.mul(rows[0][0], rows[0][0]));
            Msc::new(&f, rows)
        },
        ..Engine::default()
    };
    assert!(!failing(&engine).is_empty());
}

fn relabel(r: ClassResult, from: u8, to: u8) -> Result<ClassResult> {
    if r.label.family() != from {
        return Ok(r);
    }
    let f = r.field.clone();
    let params = r
        .label
        .params()
        .iter()
        .copied()
        .chain(std::iter::repeat(f.zero()));
    let n = twodim_core::canon::arity(to).unwrap();
    let label = FamilyLabel::new(&f, to, params.take(n).collect())?;
    let canonical = materialize(&label)?;
    Ok(ClassResult {
        label,
        canonical,
        ..r
    })
}

#[test]
fn wrong_branch_family_is_caught() {
    // a pipeline branch that reports family 8 where it reached family 4
    let engine = Engine {
        canonicalize: |a: &Msc| relabel(canonicalize(a)?, 4, 8),
        ..Engine::default()
    };
    let bad = failing(&engine);
    assert!(bad.contains(&"idempotence".to_string()), "{bad:?}");
    assert!(bad.contains(&"census".to_string()), "{bad:?}");
}

#[test]
fn dropped_sign_normalization_is_caught() {
    let engine = Engine {
        canonicalize: |a: &Msc| {
            let r = canonicalize(a)?;
            if r.label.family() != 2 || r.witness.is_identity() {
                return Ok(r);
            }
            // undo the final flip but keep the normalized label
            let flip = twodim_core::canon::sign_flip(&r.field);
            Ok(ClassResult {
                witness: flip.compose(&r.witness)?,
                ..r
            })
        },
        ..Engine::default()
    };
    let r = run_suite("invariance", &engine, &cfg()).unwrap();
    assert!(!r.ok());
}

#[test]
fn erroring_branch_is_caught() {
    let engine = Engine {
        canonicalize: |a: &Msc| {
            if a.subset().index == 5 && !a.is_zero() {
                Err(twodim_core::Error::Internal("seeded".into()))
            } else {
                canonicalize(a)
            }
        },
        ..Engine::default()
    };
    let bad = failing(&engine);
    for s in ["idempotence", "invariance", "census"] {
        assert!(bad.contains(&s.to_string()), "{s} missing from {bad:?}");
    }
}
