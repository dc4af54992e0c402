use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twodim_core::canon::{canon_subset1, canon_subset4};
use twodim_core::oracle::{self, Oracle};
use twodim_core::serial::{census_to_csv, census_to_json};
use twodim_core::verify::{random_gl2, random_msc};
use twodim_core::{canonicalize, is_isomorphic, materialize, Field, Gl2, Msc};

fn gf(p: u64, k: u32) -> Field {
    Field::new(p, k).unwrap()
}

fn sample_subset(f: &Field, index: u8, n: usize, seed: u64) -> Vec<Msc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let a = random_msc(f, &mut rng);
        if a.subset().index == index {
            out.push(a);
        }
    }
    out
}

#[test]
fn subset1_canonical_is_in_the_brute_force_orbit() {
    let f = gf(7, 1);
    for a in sample_subset(&f, 1, 5, 1) {
        let r = canon_subset1(&a).unwrap();
        assert_eq!(r.label.family(), 1);
        assert_eq!(r.witness, Gl2::new(&f, a.p_matrix().0).unwrap());
        let members = Oracle::default().orbit_members(&a).unwrap();
        assert!(members.contains(&r.canonical));
    }
}

#[test]
fn subset4_canonical_is_in_the_brute_force_orbit() {
    let f = gf(7, 1);
    for a in sample_subset(&f, 4, 5, 2) {
        let r = canon_subset4(&a).unwrap();
        assert!((6..=9).contains(&r.label.family()));
        if r.field == f {
            assert!(Oracle::default()
                .orbit_members(&a)
                .unwrap()
                .contains(&r.canonical));
        } else {
            let w = oracle::brute_isomorphic(&a, &r.canonical, &r.field).unwrap();
            assert!(w.is_some());
        }
    }
}

#[test]
fn label_agreement_matches_brute_force_over_gf5() {
    // same label <=> some g over a small extension joins them
    let f = gf(5, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let big = gf(5, 2);
    for _ in 0..12 {
        let a = random_msc(&f, &mut rng);
        let b = if rand::Rng::gen_bool(&mut rng, 0.5) {
            a.transform(&random_gl2(&f, &mut rng)).unwrap()
        } else {
            random_msc(&f, &mut rng)
        };
        let same = canonicalize(&a)
            .unwrap()
            .label
            .equivalent(&canonicalize(&b).unwrap().label)
            .unwrap();
        let fast = is_isomorphic(&a, &b).unwrap();
        assert_eq!(fast.is_some(), same);
        if !same {
            assert!(oracle::brute_isomorphic(&a, &b, &big).unwrap().is_none());
        } else if fast.as_ref().unwrap().field() == &f {
            assert!(oracle::brute_isomorphic(&a, &b, &f).unwrap().is_some());
        }
    }
}

#[test]
fn brute_force_finds_the_first_witness() {
    let f = gf(3, 1);
    let a = materialize(&twodim_core::FamilyLabel::new(&f, 10, vec![]).unwrap()).unwrap();
    let first = oracle::brute_isomorphic(&a, &a, &f).unwrap().unwrap();
    let expected = oracle::gl2_enumerate(&f)
        .unwrap()
        .find(|g| a.transform(g).unwrap() == a)
        .unwrap();
    assert_eq!(first, expected);
}

#[test]
fn orbit_of_image_is_the_same_orbit() {
    let f = gf(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let o = Oracle::default();
    for _ in 0..10 {
        let a = random_msc(&f, &mut rng);
        let b = a.transform(&random_gl2(&f, &mut rng)).unwrap();
        assert_eq!(o.orbit_members(&a).unwrap(), o.orbit_members(&b).unwrap());
        let r = o.orbit(&a).unwrap();
        assert_eq!(48 % r.size, 0);
    }
}

#[test]
fn sampled_census_over_gf5() {
    let t = Oracle::default().sampled_census(&gf(5, 1), 30, 9).unwrap();
    assert!(!t.exhaustive);
    assert!(t.is_clean(), "{:?}", t.failures);
    assert_eq!(t.total, t.rows.iter().map(|r| r.size).sum::<u64>());
}

#[test]
fn raised_policy_allows_a_gf4_census() {
    let o = Oracle {
        max_q: 64,
        max_census_q: 4,
    };
    let t = o.census(&gf(2, 2)).unwrap();
    assert_eq!(t.total, 65_536);
    assert!(t.is_clean(), "{:?}", t.failures.first());
}

#[test]
fn census_serializes() {
    let t = oracle::census(&gf(2, 1)).unwrap();
    let j = census_to_json(&t);
    assert_eq!(j.rows.len(), t.rows.len());
    let text = serde_json::to_string(&j).unwrap();
    let back: twodim_core::serial::CensusJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back, j);
    let csv = census_to_csv(&t).unwrap();
    assert_eq!(csv.lines().count(), t.rows.len() + 1);
    assert!(csv.starts_with("representative,size,subset,class,family,params,label_field"));
}
