//! Brute-force ground truth over small fields.
//!
//! Nothing here calls [`Msc::transform`]: the action is recomputed entrywise
//! from `Bᵏᵢⱼ = Σ g_kl Aˡₘₙ h_mi h_nj` with `h = g⁻¹`, so the oracle and the
//! canonicalizer share only the field arithmetic.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canon::{canonicalize, materialize, ClassResult, FamilyLabel};
use crate::error::{Error, Result};
use crate::fields::{Field, FieldElement};
use crate::msc::{Gl2, Msc, SubsetInfo};

/// Largest `q` for which `GL(2, q)` is enumerated.
pub const ENUMERATION_BOUND: u64 = 64;
/// Largest `q` for which all `q⁸` matrices are swept.
pub const CENSUS_BOUND: u64 = 3;

pub type Canonicalizer = fn(&Msc) -> Result<ClassResult>;

/// Size of `GL(2, q)`.
pub fn gl2_order(q: u64) -> u64 {
    (q * q - 1) * (q * q - q)
}

/// Enumeration limits. `Oracle::default()` uses the desk-scale constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub max_q: u64,
    pub max_census_q: u64,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            max_q: ENUMERATION_BOUND,
            max_census_q: CENSUS_BOUND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub representative: Msc,
    pub size: u64,
    pub subset: SubsetInfo,
    pub label: FamilyLabel,
}

/// One matrix the canonicalizer disagreed with the oracle on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusFailure {
    pub matrix: Msc,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusTable {
    pub field: Field,
    pub rows: Vec<OrbitReport>,
    /// Matrices covered: `q⁸` for an exhaustive sweep, the summed orbit sizes otherwise.
    pub total: u64,
    pub exhaustive: bool,
    /// Pairs of row indices whose labels agree although the orbits differ over
    /// this field (they merge over an extension).
    pub shared_labels: Vec<(usize, usize)>,
    pub failures: Vec<CensusFailure>,
}

impl CensusTable {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Entry order `α₁..α₄, β₁..β₄`, `α₁` most significant.
fn key(a: &Msc, q: u64) -> u64 {
    a.rows()
        .iter()
        .flatten()
        .fold(0, |acc, x| acc * q + x.index() as u64)
}

fn from_key(field: &Field, mut k: u64) -> Msc {
    let q = field.order() as u64;
    let mut flat = [FieldElement::ZERO; 8];
    for slot in flat.iter_mut().rev() {
        *slot = field.element((k % q) as u32).expect("digit below q");
        k /= q;
    }
    let mut rows = [[FieldElement::ZERO; 4]; 2];
    for (i, x) in flat.into_iter().enumerate() {
        rows[i / 4][i % 4] = x;
    }
    Msc::new(field, rows).expect("elements of field")
}

/// Entry `Bᵏ` at column `2i + j` of `B = g·A·(h⊗h)`.
fn image_entry(
    f: &Field,
    rows: &[[FieldElement; 4]; 2],
    g: &[[FieldElement; 2]; 2],
    h: &[[FieldElement; 2]; 2],
    k: usize,
    col: usize,
) -> FieldElement {
    let (i, j) = (col / 2, col % 2);
    let mut s = f.zero();
    for (l, row) in rows.iter().enumerate() {
        if g[k][l].is_zero() {
            continue;
        }
        let mut inner = f.zero();
        for m in 0..2 {
            for n in 0..2 {
                let a = row[2 * m + n];
                if !a.is_zero() {
                    inner = f.add(inner, f.mul(a, f.mul(h[m][i], h[n][j])));
                }
            }
        }
        s = f.add(s, f.mul(g[k][l], inner));
    }
    s
}

/// `Bᵏᵢⱼ = Σ g_kl Aˡₘₙ h_mi h_nj`.
pub fn transform_by_index(a: &Msc, g: &Gl2) -> Msc {
    let f = a.field();
    let mut out = [[FieldElement::ZERO; 4]; 2];
    for (k, row) in out.iter_mut().enumerate() {
        for (col, x) in row.iter_mut().enumerate() {
            *x = image_entry(f, a.rows(), g.matrix(), g.inverse_matrix(), k, col);
        }
    }
    Msc::new(f, out).expect("same field")
}

impl Oracle {
    fn check_q(&self, field: &Field, bound: u64) -> Result<u64> {
        let q = field.order() as u64;
        if q > bound {
            return Err(Error::EnumerationBound { q, bound });
        }
        Ok(q)
    }

    /// Invertible matrices in lexicographic `(a, b, c, d)` element order.
    pub fn gl2_enumerate(&self, field: &Field) -> Result<impl Iterator<Item = Gl2>> {
        self.check_q(field, self.max_q)?;
        let f = field.clone();
        let elems: Vec<FieldElement> = f.elements().collect();
        let quads = product4(elems);
        Ok(quads.filter_map(move |[a, b, c, d]| Gl2::new(&f, [[a, b], [c, d]]).ok()))
    }

    /// Forward closure of `a` under the whole group.
    pub fn orbit_members(&self, a: &Msc) -> Result<Vec<Msc>> {
        let q = self.check_q(a.field(), self.max_q)?;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for g in self.gl2_enumerate(a.field())? {
            let b = transform_by_index(a, &g);
            if seen.insert(key(&b, q)) {
                out.push(b);
            }
        }
        out.sort_by_key(|b| key(b, q));
        Ok(out)
    }

    pub fn orbit(&self, a: &Msc) -> Result<OrbitReport> {
        let members = self.orbit_members(a)?;
        let representative = members[0].clone();
        let label = canonicalize(&representative)?.label;
        Ok(OrbitReport {
            subset: representative.subset(),
            size: members.len() as u64,
            representative,
            label,
        })
    }

    /// First group element (in enumeration order) taking `a` to `b`, both
    /// embedded into `field`.
    pub fn brute_isomorphic(&self, a: &Msc, b: &Msc, field: &Field) -> Result<Option<Gl2>> {
        self.check_q(field, self.max_q)?;
        let a = a.embed(field)?;
        let b = b.embed(field)?;
        let f = field;
        let target = b.rows();
        let elems: Vec<FieldElement> = f.elements().collect();
        for [x, y, z, w] in product4(elems) {
            let det = f.sub(f.mul(x, w), f.mul(y, z));
            let Some(d) = f.checked_inv(det) else {
                continue;
            };
            let g = [[x, y], [z, w]];
            let h = [
                [f.mul(w, d), f.neg(f.mul(y, d))],
                [f.neg(f.mul(z, d)), f.mul(x, d)],
            ];
            let hit = (0..8)
                .all(|e| image_entry(f, a.rows(), &g, &h, e / 4, e % 4) == target[e / 4][e % 4]);
            if hit {
                return Ok(Some(Gl2::new(f, g)?));
            }
        }
        Ok(None)
    }

    /// Visited-set sweep over all `q⁸` matrices.
    pub fn census(&self, field: &Field) -> Result<CensusTable> {
        self.census_with(field, canonicalize)
    }

    /// [`Oracle::census`] judging an arbitrary canonicalizer.
    pub fn census_with(&self, field: &Field, canon: Canonicalizer) -> Result<CensusTable> {
        let q = self.check_q(field, self.max_census_q.min(self.max_q))?;
        let total = q.pow(8);
        let group: Vec<Gl2> = self.gl2_enumerate(field)?.collect();
        let mut visited = vec![false; total as usize];
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for k in 0..total {
            if visited[k as usize] {
                continue;
            }
            let a = from_key(field, k);
            let mut members = Vec::new();
            for g in &group {
                let b = transform_by_index(&a, g);
                let kb = key(&b, q);
                if !visited[kb as usize] {
                    visited[kb as usize] = true;
                    members.push(b);
                }
            }
            // k is the least unvisited key, so `a` is the orbit minimum
            if let Some(row) = check_orbit(a, &members, canon, &mut failures) {
                rows.push(row);
            }
        }
        let shared_labels = shared_labels(&rows)?;
        Ok(CensusTable {
            field: field.clone(),
            rows,
            total,
            exhaustive: true,
            shared_labels,
            failures,
        })
    }

    /// Orbits of `samples` random matrices, each checked like a census row.
    pub fn sampled_census(&self, field: &Field, samples: usize, seed: u64) -> Result<CensusTable> {
        self.sampled_census_with(field, samples, seed, canonicalize)
    }

    pub fn sampled_census_with(
        &self,
        field: &Field,
        samples: usize,
        seed: u64,
        canon: Canonicalizer,
    ) -> Result<CensusTable> {
        let q = self.check_q(field, self.max_q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = HashSet::new();
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        let mut total = 0;
        for _ in 0..samples {
            let a = from_key(field, rng.gen_range(0..q.pow(8)));
            let members = self.orbit_members(&a)?;
            if !done.insert(key(&members[0], q)) {
                continue;
            }
            total += members.len() as u64;
            if let Some(row) = check_orbit(members[0].clone(), &members, canon, &mut failures) {
                rows.push(row);
            }
        }
        let shared_labels = shared_labels(&rows)?;
        Ok(CensusTable {
            field: field.clone(),
            rows,
            total,
            exhaustive: false,
            shared_labels,
            failures,
        })
    }
}

fn product4(elems: Vec<FieldElement>) -> impl Iterator<Item = [FieldElement; 4]> {
    let n = elems.len();
    (0..n.pow(4)).map(move |i| {
        [
            elems[i / (n * n * n)],
            elems[i / (n * n) % n],
            elems[i / n % n],
            elems[i % n],
        ]
    })
}

/// Canonicalizes every member and checks one shared label, witness validity
/// and orbit-stabilizer divisibility.
fn check_orbit(
    representative: Msc,
    members: &[Msc],
    canon: Canonicalizer,
    failures: &mut Vec<CensusFailure>,
) -> Option<OrbitReport> {
    let q = representative.field().order() as u64;
    let size = members.len() as u64;
    if !gl2_order(q).is_multiple_of(size) {
        failures.push(CensusFailure {
            matrix: representative.clone(),
            reason: format!("orbit size {size} does not divide the group order"),
        });
    }
    let base = match canon(&representative) {
        Ok(r) => r.label,
        Err(e) => {
            failures.push(CensusFailure {
                matrix: representative,
                reason: e.to_string(),
            });
            return None;
        }
    };
    let subset = representative.subset().index;
    for m in members {
        let reason = match canon(m) {
            Err(e) => Some(e.to_string()),
            Ok(r) => {
                let lifted = m.embed(&r.field).ok();
                if lifted.map(|x| transform_by_index(&x, &r.witness)).as_ref() != Some(&r.canonical)
                {
                    Some("witness does not reproduce the canonical matrix".into())
                } else if materialize(&r.label).ok().as_ref() != Some(&r.canonical) {
                    Some(format!("canonical matrix is not the member of {}", r.label))
                } else if !r.label.equivalent(&base).unwrap_or(false) {
                    Some(format!("label {} differs from orbit label {base}", r.label))
                } else if m.subset().index != subset && !(is_23(subset) && is_23(m.subset().index))
                {
                    Some("trace subset varies along the orbit".into())
                } else {
                    None
                }
            }
        };
        if let Some(reason) = reason {
            failures.push(CensusFailure {
                matrix: m.clone(),
                reason,
            });
        }
    }
    Some(OrbitReport {
        subset: representative.subset(),
        representative,
        size,
        label: base,
    })
}

fn is_23(i: u8) -> bool {
    i == 2 || i == 3
}

fn shared_labels(rows: &[OrbitReport]) -> Result<Vec<(usize, usize)>> {
    let mut by_family: HashMap<(u8, u8), Vec<usize>> = HashMap::new();
    for (i, r) in rows.iter().enumerate() {
        by_family
            .entry((r.label.class() as u8, r.label.family()))
            .or_default()
            .push(i);
    }
    let mut out = Vec::new();
    for idx in by_family.values() {
        for (n, &i) in idx.iter().enumerate() {
            for &j in &idx[n + 1..] {
                if rows[i].label.equivalent(&rows[j].label)? {
                    out.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn gl2_enumerate(field: &Field) -> Result<impl Iterator<Item = Gl2>> {
    Oracle::default().gl2_enumerate(field)
}

pub fn orbit(a: &Msc) -> Result<OrbitReport> {
    Oracle::default().orbit(a)
}

pub fn brute_isomorphic(a: &Msc, b: &Msc, field: &Field) -> Result<Option<Gl2>> {
    Oracle::default().brute_isomorphic(a, b, field)
}

pub fn census(field: &Field) -> Result<CensusTable> {
    Oracle::default().census(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    #[test]
    fn group_orders() {
        for (p, k, n) in [(2, 1, 6), (3, 1, 48), (7, 1, 2016), (2, 2, 180)] {
            assert_eq!(gl2_enumerate(&gf(p, k)).unwrap().count(), n);
        }
        assert!(matches!(
            gl2_enumerate(&gf(67, 1)),
            Err(Error::EnumerationBound { q: 67, bound: 64 })
        ));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let f = gf(3, 1);
        let first = gl2_enumerate(&f).unwrap().next().unwrap();
        assert_eq!(first, Gl2::from_ints(&f, [[0, 1], [1, 0]]).unwrap());
    }

    #[test]
    fn index_formula_matches_kron_route() {
        let f = gf(5, 1);
        let a = Msc::from_ints(&f, [[1, 2, 3, 4], [0, 4, 2, 1]]);
        for g in gl2_enumerate(&f).unwrap().step_by(7) {
            assert_eq!(transform_by_index(&a, &g), a.transform(&g).unwrap());
        }
    }

    #[test]
    fn small_orbits() {
        let f = gf(2, 1);
        assert_eq!(orbit(&Msc::zero(&f)).unwrap().size, 1);
        let a12 = materialize(&FamilyLabel::new(&f, 12, vec![]).unwrap()).unwrap();
        let r = orbit(&a12).unwrap();
        assert_eq!(6 % r.size, 0);
        assert_eq!(r.label.family(), 12);
    }

    #[test]
    fn brute_isomorphic_examples() {
        let f = gf(7, 1);
        let l = |fam, ps: &[i64]| {
            materialize(
                &FamilyLabel::new(&f, fam, ps.iter().map(|&n| f.from_int(n)).collect()).unwrap(),
            )
            .unwrap()
        };
        assert!(brute_isomorphic(&l(10, &[]), &l(11, &[]), &f)
            .unwrap()
            .is_none());
        let w = brute_isomorphic(&l(2, &[1, 2, 0]), &l(2, &[1, 5, 0]), &f)
            .unwrap()
            .unwrap();
        assert_eq!(l(2, &[1, 2, 0]).transform(&w).unwrap(), l(2, &[1, 5, 0]));
    }

    #[test]
    fn key_round_trip() {
        let f = gf(3, 1);
        let a = Msc::from_ints(&f, [[1, 2, 0, 1], [2, 2, 1, 0]]);
        assert_eq!(from_key(&f, key(&a, 3)), a);
    }

    #[test]
    fn gf2_census() {
        let t = census(&gf(2, 1)).unwrap();
        assert_eq!(t.total, 256);
        assert_eq!(t.rows.iter().map(|r| r.size).sum::<u64>(), 256);
        // besides zero, x·y = (xy)² on GF(4) is fixed by every semilinear map
        let fixed: Vec<&Msc> = t
            .rows
            .iter()
            .filter(|r| r.size == 1)
            .map(|r| &r.representative)
            .collect();
        let f = gf(2, 1);
        assert_eq!(
            fixed,
            [
                &Msc::zero(&f),
                &Msc::from_ints(&f, [[1, 1, 1, 0], [0, 1, 1, 1]])
            ]
        );
        assert!(t.is_clean(), "{:?}", t.failures);
    }

    #[test]
    fn census_respects_policy() {
        assert!(matches!(
            census(&gf(5, 1)),
            Err(Error::EnumerationBound { q: 5, bound: 3 })
        ));
    }
}
