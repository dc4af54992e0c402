//! Structure-constant matrices of 2-dimensional algebras and the `GL(2)` action on them.
//!
//! An [`Msc`] is the 2×4 matrix `A` with `e^i·e^j = A¹ᵢⱼ e¹ + A²ᵢⱼ e²`; its
//! columns are indexed by the ordered basis pairs (1,1), (1,2), (2,1), (2,2).
//! Row one holds `α₁..α₄`, row two `β₁..β₄` (0-based in code).
//!
//! A change of basis `g` acts by `A ↦ g·A·(g⁻¹ ⊗ g⁻¹)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{Field, FieldElement};

pub type Row = [FieldElement; 4];
pub type Mat2 = [[FieldElement; 2]; 2];

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Msc {
    field: Field,
    rows: [Row; 2],
}

/// An invertible 2×2 matrix together with its inverse.
///
/// The inverse entries are `(ξ₁, η₁; ξ₂, η₂)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gl2 {
    field: Field,
    m: Mat2,
    inv: Mat2,
}

/// The two partial-trace row vectors.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TracePair {
    pub tr1: [FieldElement; 2],
    pub tr2: [FieldElement; 2],
}

/// Which of the five trace-defined subsets a matrix falls in.
///
/// `lambda` satisfies `tr2 = λ·tr1` for indices 2 and 3 (zero for 3 and
/// meaningless otherwise, where it is also stored as zero).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SubsetInfo {
    pub index: u8,
    pub lambda: FieldElement,
}

fn check_same(a: &Field, b: &Field) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FieldMismatch(a.to_string(), b.to_string()))
    }
}

/// `h ⊗ h` for a 2×2 matrix `h`, rows and columns ordered (1,1),(1,2),(2,1),(2,2).
pub fn kron2(f: &Field, h: &Mat2) -> [[FieldElement; 4]; 4] {
    let mut out = [[FieldElement::ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + j][2 * k + l] = f.mul(h[i][k], h[j][l]);
                }
            }
        }
    }
    out
}

impl Msc {
    pub fn new(field: &Field, rows: [Row; 2]) -> Result<Msc> {
        for x in rows.iter().flatten() {
            field.element(x.index())?;
        }
        Ok(Msc {
            field: field.clone(),
            rows,
        })
    }

    /// Entries taken mod `p` in the prime subfield.
    pub fn from_ints(field: &Field, rows: [[i64; 4]; 2]) -> Msc {
        Msc {
            field: field.clone(),
            rows: rows.map(|r| r.map(|n| field.from_int(n))),
        }
    }

    pub fn zero(field: &Field) -> Msc {
        Msc {
            field: field.clone(),
            rows: [[field.zero(); 4]; 2],
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> &[Row; 2] {
        &self.rows
    }

    pub fn alpha(&self) -> Row {
        self.rows[0]
    }

    pub fn beta(&self) -> Row {
        self.rows[1]
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_zero())
    }

    /// The matrix of the opposite algebra: columns (1,2) and (2,1) exchanged.
    pub fn swap_middle_columns(&self) -> Msc {
        let mut rows = self.rows;
        for r in rows.iter_mut() {
            r.swap(1, 2);
        }
        Msc {
            field: self.field.clone(),
            rows,
        }
    }

    pub fn embed(&self, target: &Field) -> Result<Msc> {
        let e = self.field.embedding(target)?;
        Ok(Msc {
            field: target.clone(),
            rows: self.rows.map(|r| r.map(|x| e.apply(x))),
        })
    }

    /// `g·A·(g⁻¹)^⊗2`, by exact matrix products.
    pub fn transform(&self, g: &Gl2) -> Result<Msc> {
        check_same(&self.field, &g.field)?;
        let f = &self.field;
        let k = kron2(f, &g.inv);
        let mut ak = [[f.zero(); 4]; 2];
        for r in 0..2 {
            for j in 0..4 {
                ak[r][j] = (0..4).fold(f.zero(), |acc, c| {
                    f.add(acc, f.mul(self.rows[r][c], k[c][j]))
                });
            }
        }
        let mut out = [[f.zero(); 4]; 2];
        for i in 0..2 {
            for j in 0..4 {
                out[i][j] = f.add(f.mul(g.m[i][0], ak[0][j]), f.mul(g.m[i][1], ak[1][j]));
            }
        }
        Ok(Msc {
            field: f.clone(),
            rows: out,
        })
    }

    pub fn traces(&self) -> TracePair {
        let f = &self.field;
        let [a, b] = self.rows;
        TracePair {
            tr1: [f.add(a[0], b[2]), f.add(a[1], b[3])],
            tr2: [f.add(a[0], b[1]), f.add(a[2], b[3])],
        }
    }

    pub fn subset(&self) -> SubsetInfo {
        let f = &self.field;
        let TracePair { tr1, tr2 } = self.traces();
        let zero1 = tr1.iter().all(|x| x.is_zero());
        let zero2 = tr2.iter().all(|x| x.is_zero());
        let det = f.sub(f.mul(tr1[0], tr2[1]), f.mul(tr1[1], tr2[0]));
        let (index, lambda) = match (zero1, zero2) {
            (true, true) => (5, f.zero()),
            (true, false) => (4, f.zero()),
            (false, true) => (3, f.zero()),
            (false, false) if !det.is_zero() => (1, f.zero()),
            (false, false) => {
                let i = if tr1[0].is_zero() { 1 } else { 0 };
                (2, f.div(tr2[i], tr1[i]))
            }
        };
        SubsetInfo { index, lambda }
    }

    /// The matrix with rows `tr1`, `tr2`, and its determinant.
    pub fn p_matrix(&self) -> (Mat2, FieldElement) {
        let f = &self.field;
        let TracePair { tr1, tr2 } = self.traces();
        let det = f.sub(f.mul(tr1[0], tr2[1]), f.mul(tr1[1], tr2[0]));
        ([tr1, tr2], det)
    }

    /// Coordinates of `u·v`, i.e. `A (u ⊗ v)`.
    pub fn multiply(&self, u: [FieldElement; 2], v: [FieldElement; 2]) -> [FieldElement; 2] {
        let f = &self.field;
        let uv = [
            f.mul(u[0], v[0]),
            f.mul(u[0], v[1]),
            f.mul(u[1], v[0]),
            f.mul(u[1], v[1]),
        ];
        self.rows
            .map(|r| (0..4).fold(f.zero(), |acc, c| f.add(acc, f.mul(r[c], uv[c]))))
    }

    pub fn display(&self) -> String {
        let fmt_row = |r: &Row| {
            r.iter()
                .map(|&x| self.field.format_element(x))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!("[{}; {}]", fmt_row(&self.rows[0]), fmt_row(&self.rows[1]))
    }
}

impl fmt::Debug for Msc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Msc<{:?}>{}", self.field, self.display())
    }
}

/// Free-function form of [`Msc::transform`].
pub fn transform(a: &Msc, g: &Gl2) -> Result<Msc> {
    a.transform(g)
}

fn inverse2(f: &Field, m: &Mat2) -> Result<Mat2> {
    let det = f.sub(f.mul(m[0][0], m[1][1]), f.mul(m[0][1], m[1][0]));
    let d = f.checked_inv(det).ok_or(Error::Singular)?;
    Ok([
        [f.mul(m[1][1], d), f.neg(f.mul(m[0][1], d))],
        [f.neg(f.mul(m[1][0], d)), f.mul(m[0][0], d)],
    ])
}

fn mul2(f: &Field, a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[f.zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = f.add(f.mul(a[i][0], b[0][j]), f.mul(a[i][1], b[1][j]));
        }
    }
    out
}

impl Gl2 {
    pub fn new(field: &Field, m: Mat2) -> Result<Gl2> {
        let inv = inverse2(field, &m)?;
        Ok(Gl2 {
            field: field.clone(),
            m,
            inv,
        })
    }

    /// The element whose inverse is `(ξ₁, η₁; ξ₂, η₂)`.
    pub fn from_inverse(field: &Field, inv: Mat2) -> Result<Gl2> {
        let m = inverse2(field, &inv)?;
        Ok(Gl2 {
            field: field.clone(),
            m,
            inv,
        })
    }

    pub fn from_ints(field: &Field, m: [[i64; 2]; 2]) -> Result<Gl2> {
        Gl2::new(field, m.map(|r| r.map(|n| field.from_int(n))))
    }

    pub fn identity(field: &Field) -> Gl2 {
        let (o, i) = (field.zero(), field.one());
        Gl2 {
            field: field.clone(),
            m: [[i, o], [o, i]],
            inv: [[i, o], [o, i]],
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn inverse_matrix(&self) -> &Mat2 {
        &self.inv
    }

    pub fn det(&self) -> FieldElement {
        let f = &self.field;
        f.sub(
            f.mul(self.m[0][0], self.m[1][1]),
            f.mul(self.m[0][1], self.m[1][0]),
        )
    }

    pub fn inverse(&self) -> Gl2 {
        Gl2 {
            field: self.field.clone(),
            m: self.inv,
            inv: self.m,
        }
    }

    /// `self · other`; acting by the product is acting by `other` first.
    pub fn compose(&self, other: &Gl2) -> Result<Gl2> {
        check_same(&self.field, &other.field)?;
        let f = &self.field;
        Ok(Gl2 {
            field: f.clone(),
            m: mul2(f, &self.m, &other.m),
            inv: mul2(f, &other.inv, &self.inv),
        })
    }

    pub fn apply(&self, u: [FieldElement; 2]) -> [FieldElement; 2] {
        let f = &self.field;
        self.m.map(|r| f.add(f.mul(r[0], u[0]), f.mul(r[1], u[1])))
    }

    pub fn embed(&self, target: &Field) -> Result<Gl2> {
        let e = self.field.embedding(target)?;
        Ok(Gl2 {
            field: target.clone(),
            m: self.m.map(|r| r.map(|x| e.apply(x))),
            inv: self.inv.map(|r| r.map(|x| e.apply(x))),
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == Gl2::identity(&self.field)
    }
}

impl fmt::Debug for Gl2 {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = |x| self.field.format_element(x);
        write!(
            fm,
            "Gl2<{:?}>[{} {}; {} {}]",
            self.field,
            e(self.m[0][0]),
            e(self.m[0][1]),
            e(self.m[1][0]),
            e(self.m[1][1])
        )
    }
}
