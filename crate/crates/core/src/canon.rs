//! Canonical forms of 2-dimensional algebras.
//!
//! Every nonzero structure-constant matrix is reduced to exactly one member of
//! twelve parameterized families (one table per characteristic class: `p ≥ 5`,
//! `p = 2`, `p = 3`), together with a witness `g` such that
//! `transform(A, g)` is the family member.
//!
//! The reductions follow the trace-subset split: subset 1 is solved in one
//! step by the trace matrix `P(A)`; subsets 2 and 3 normalize `Tr₁` to `(1,0)`
//! and then walk a small case tree; subset 4 is subset 3 of the opposite
//! algebra; subset 5 first kills `α₄` with a root of a cubic and then walks its
//! own case tree. All intermediate matrices come from [`Msc::transform`]; the
//! case tree only decides which `g` to apply next.
//!
//! When a square root or cubic root is missing, the whole reduction restarts
//! over the smallest extension containing it, with the input re-embedded
//! directly from its own field.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{Field, FieldElement};
use crate::msc::{Gl2, Mat2, Msc};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum LabelClass {
    General,
    Char2,
    Char3,
    Trivial,
}

impl LabelClass {
    pub fn for_characteristic(p: u32) -> LabelClass {
        match p {
            2 => LabelClass::Char2,
            3 => LabelClass::Char3,
            _ => LabelClass::General,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LabelClass::General => "general",
            LabelClass::Char2 => "char2",
            LabelClass::Char3 => "char3",
            LabelClass::Trivial => "trivial",
        }
    }

    pub fn parse(s: &str) -> Result<LabelClass> {
        match s {
            "general" => Ok(LabelClass::General),
            "char2" => Ok(LabelClass::Char2),
            "char3" => Ok(LabelClass::Char3),
            "trivial" => Ok(LabelClass::Trivial),
            other => Err(Error::parse("label class", other)),
        }
    }

    fn admits(self, p: u32) -> bool {
        match self {
            LabelClass::Trivial => true,
            c => c == LabelClass::for_characteristic(p),
        }
    }
}

/// Number of parameters of a family (1..=12), the same in all three classes.
pub fn arity(family: u8) -> Option<usize> {
    match family {
        1 => Some(4),
        2 => Some(3),
        3 | 4 | 6 => Some(2),
        5 | 7 | 8 => Some(1),
        9..=12 => Some(0),
        _ => None,
    }
}

/// A canonical family with its parameters, as elements of `field`.
///
/// Family 0 is reserved for the trivial (zero) algebra.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FamilyLabel {
    class: LabelClass,
    family: u8,
    params: Vec<FieldElement>,
    field: Field,
}

impl FamilyLabel {
    /// A label of the class matching the characteristic of `field`.
    pub fn new(field: &Field, family: u8, params: Vec<FieldElement>) -> Result<FamilyLabel> {
        FamilyLabel::with_class(
            field,
            LabelClass::for_characteristic(field.characteristic()),
            family,
            params,
        )
    }

    pub fn with_class(
        field: &Field,
        class: LabelClass,
        family: u8,
        params: Vec<FieldElement>,
    ) -> Result<FamilyLabel> {
        if class == LabelClass::Trivial {
            if family != 0 || !params.is_empty() {
                return Err(Error::UnknownFamily(format!("trivial/{family}")));
            }
        } else {
            let expected =
                arity(family).ok_or_else(|| Error::UnknownFamily(format!("A{family}")))?;
            if params.len() != expected {
                return Err(Error::Arity {
                    family,
                    expected,
                    got: params.len(),
                });
            }
        }
        if !class.admits(field.characteristic()) {
            return Err(Error::CharacteristicMismatch {
                p: field.characteristic(),
                class: class.name().to_string(),
            });
        }
        for x in &params {
            field.element(x.index())?;
        }
        Ok(FamilyLabel {
            class,
            family,
            params,
            field: field.clone(),
        })
    }

    pub fn trivial(field: &Field) -> FamilyLabel {
        FamilyLabel {
            class: LabelClass::Trivial,
            family: 0,
            params: Vec::new(),
            field: field.clone(),
        }
    }

    pub fn class(&self) -> LabelClass {
        self.class
    }

    pub fn family(&self) -> u8 {
        self.family
    }

    pub fn params(&self) -> &[FieldElement] {
        &self.params
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_trivial(&self) -> bool {
        self.class == LabelClass::Trivial
    }

    pub fn embed(&self, target: &Field) -> Result<FamilyLabel> {
        let e = self.field.embedding(target)?;
        Ok(FamilyLabel {
            class: self.class,
            family: self.family,
            params: self.params.iter().map(|&x| e.apply(x)).collect(),
            field: target.clone(),
        })
    }

    /// Same family and, over a common field, the same normalized parameters.
    pub fn equivalent(&self, other: &FamilyLabel) -> Result<bool> {
        if self.class != other.class || self.family != other.family {
            return Ok(false);
        }
        let common = common_field(&self.field, &other.field)?;
        let a = normalize_label(&self.embed(&common)?);
        let b = normalize_label(&other.embed(&common)?);
        Ok(a.params == b.params)
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        write!(f, "{}/A{}", self.class.name(), self.family)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self
                .params
                .iter()
                .map(|&x| self.field.format_element(x))
                .collect();
            write!(f, "({})", ps.join("; "))?;
        }
        Ok(())
    }
}

/// Outcome of [`canonicalize`]: `transform(embed(A, field), witness) == canonical`
/// and `canonical == materialize(label)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassResult {
    pub label: FamilyLabel,
    pub witness: Gl2,
    pub field: Field,
    pub canonical: Msc,
}

/// Smallest field containing both (same characteristic).
pub fn common_field(a: &Field, b: &Field) -> Result<Field> {
    if a.characteristic() != b.characteristic() {
        return Err(Error::FieldMismatch(a.to_string(), b.to_string()));
    }
    let (x, y) = (a.degree(), b.degree());
    let g = gcd(x, y);
    Field::new(a.characteristic() as u64, x / g * y)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Position of the parameter that is only defined up to sign, if any.
fn sign_slot(class: LabelClass, family: u8) -> Option<usize> {
    match (class, family) {
        (LabelClass::General | LabelClass::Char3, 2 | 6) => Some(1),
        _ => None,
    }
}

/// Replaces `β₁` by `min(β₁, −β₁)` for the families identified up to its sign.
pub fn normalize_label(label: &FamilyLabel) -> FamilyLabel {
    let mut out = label.clone();
    if let Some(i) = sign_slot(label.class, label.family) {
        let f = &label.field;
        out.params[i] = label.params[i].min(f.neg(label.params[i]));
    }
    out
}

/// `diag(1, −1)`: maps the `β₁` member of families 2 and 6 to the `−β₁` one.
pub fn sign_flip(field: &Field) -> Gl2 {
    Gl2::from_ints(field, [[1, 0], [0, -1]]).expect("diag(1,-1) is invertible")
}

/// Witnesses taking `(1,0,0,0; 0,−1,−1,0)` to family 10, per class
/// (general, char 2, char 3). Integer entries, valid in every field of the class.
pub const BRIDGE_WITNESSES: [(LabelClass, [[i64; 2]; 2]); 3] = [
    (LabelClass::General, [[0, 1], [-1, 0]]),
    (LabelClass::Char2, [[0, 1], [-1, 0]]),
    (LabelClass::Char3, [[0, 1], [-1, 0]]),
];

/// The shape each bridge witness starts from.
pub fn bridge_source(field: &Field) -> Msc {
    Msc::from_ints(field, [[1, 0, 0, 0], [0, -1, -1, 0]])
}

pub fn bridge_witness(field: &Field) -> Gl2 {
    let class = LabelClass::for_characteristic(field.characteristic());
    let (_, m) = BRIDGE_WITNESSES
        .iter()
        .find(|(c, _)| *c == class)
        .expect("one bridge per class");
    Gl2::from_ints(field, *m).expect("bridge witnesses are unimodular")
}

/// The structure-constant matrix of a family member.
pub fn materialize(label: &FamilyLabel) -> Result<Msc> {
    let f = &label.field;
    let p = f.characteristic();
    if !label.class.admits(p) {
        return Err(Error::CharacteristicMismatch {
            p,
            class: label.class.name().to_string(),
        });
    }
    if label.is_trivial() {
        return Ok(Msc::zero(f));
    }
    let expected =
        arity(label.family).ok_or_else(|| Error::UnknownFamily(format!("A{}", label.family)))?;
    if label.params.len() != expected {
        return Err(Error::Arity {
            family: label.family,
            expected,
            got: label.params.len(),
        });
    }
    let c = |n: i64| f.from_int(n);
    let x = &label.params;
    let one_minus = |a: FieldElement| f.sub(f.one(), a);
    let neg = |a: FieldElement| f.neg(a);
    use LabelClass::*;
    let rows: [[FieldElement; 4]; 2] = match (label.class, label.family) {
        (_, 1) => {
            let [a1, a2, a4, b1] = [x[0], x[1], x[2], x[3]];
            [
                [a1, a2, f.add(a2, f.one()), a4],
                [b1, neg(a1), one_minus(a1), neg(a2)],
            ]
        }
        (_, 2) => [
            [x[0], c(0), c(0), c(1)],
            [x[1], x[2], one_minus(x[0]), c(0)],
        ],
        (Char2, 3) => [
            [x[0], c(1), c(1), c(0)],
            [c(0), x[1], one_minus(x[0]), c(1)],
        ],
        (_, 3) => [[c(0), c(1), c(1), c(0)], [x[0], x[1], c(1), c(-1)]],
        (_, 4) => [
            [x[0], c(0), c(0), c(0)],
            [c(0), x[1], one_minus(x[0]), c(0)],
        ],
        (General, 5) => [
            [x[0], c(0), c(0), c(0)],
            [
                c(1),
                f.sub(f.add(x[0], x[0]), f.one()),
                one_minus(x[0]),
                c(0),
            ],
        ],
        (Char2, 5) => [
            [x[0], c(0), c(0), c(0)],
            [c(1), c(1), one_minus(x[0]), c(0)],
        ],
        (Char3, 5) => [
            [x[0], c(0), c(0), c(0)],
            [c(1), f.sub(c(-1), x[0]), one_minus(x[0]), c(0)],
        ],
        (_, 6) => [
            [x[0], c(0), c(0), c(1)],
            [x[1], one_minus(x[0]), neg(x[0]), c(0)],
        ],
        (Char2, 7) => [
            [x[0], c(1), c(1), c(0)],
            [c(0), one_minus(x[0]), neg(x[0]), c(-1)],
        ],
        (_, 7) => [[c(0), c(1), c(1), c(0)], [x[0], c(1), c(0), c(-1)]],
        (_, 8) => [
            [x[0], c(0), c(0), c(0)],
            [c(0), one_minus(x[0]), neg(x[0]), c(0)],
        ],
        (General, 9) => {
            let third = f.inv(c(3));
            [
                [third, c(0), c(0), c(0)],
                [c(1), f.add(third, third), neg(third), c(0)],
            ]
        }
        (Char2, 9) => [[c(1), c(0), c(0), c(0)], [c(1), c(0), c(1), c(0)]],
        (Char3, 9) => [[c(0), c(1), c(1), c(0)], [c(1), c(0), c(0), c(-1)]],
        (_, 10) => [[c(0), c(1), c(1), c(0)], [c(0), c(0), c(0), c(-1)]],
        (Char2, 11) => [[c(1), c(1), c(1), c(0)], [c(0), c(-1), c(-1), c(-1)]],
        (Char3, 11) => [[c(1), c(0), c(0), c(0)], [c(1), c(-1), c(-1), c(0)]],
        (_, 11) => [[c(0), c(1), c(1), c(0)], [c(1), c(0), c(0), c(-1)]],
        (_, 12) => [[c(0), c(0), c(0), c(0)], [c(1), c(0), c(0), c(0)]],
        (_, fam) => return Err(Error::UnknownFamily(format!("A{fam}"))),
    };
    Msc::new(f, rows)
}

enum Halt {
    Extend(Field),
    Fail(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Fail(e)
    }
}

type Step<T> = std::result::Result<T, Halt>;

/// A matrix under reduction and the accumulated change of basis.
struct Reduction {
    cur: Msc,
    witness: Gl2,
}

impl Reduction {
    fn new(a: &Msc) -> Reduction {
        Reduction {
            cur: a.clone(),
            witness: Gl2::identity(a.field()),
        }
    }

    fn field(&self) -> Field {
        self.cur.field().clone()
    }

    fn apply(&mut self, g: &Gl2) -> Result<()> {
        self.cur = self.cur.transform(g)?;
        self.witness = g.compose(&self.witness)?;
        Ok(())
    }

    fn apply_inverse(&mut self, inv: Mat2) -> Result<()> {
        let g = Gl2::from_inverse(&self.field(), inv)?;
        self.apply(&g)
    }

    fn alpha(&self) -> [FieldElement; 4] {
        self.cur.alpha()
    }

    fn beta(&self) -> [FieldElement; 4] {
        self.cur.beta()
    }
}

fn sqrt_or_extend(f: &Field, x: FieldElement) -> Step<FieldElement> {
    match f.sqrt_min(x) {
        Some(r) => Ok(r),
        None => {
            let (ext, _) = f.splitting_extension([f.neg(x), f.zero(), f.one(), f.zero()])?;
            Err(Halt::Extend(ext))
        }
    }
}

fn least_root_or_extend(f: &Field, coeffs: [FieldElement; 4]) -> Step<FieldElement> {
    match f.roots_deg_le3(coeffs)?.first() {
        Some(&r) => Ok(r),
        None => {
            let (ext, _) = f.splitting_extension(coeffs)?;
            Err(Halt::Extend(ext))
        }
    }
}

/// Builds the label, folds in the sign normalization and checks the
/// reduction really landed on the family member.
fn finish(mut red: Reduction, family: u8, params: Vec<FieldElement>) -> Step<ClassResult> {
    let field = red.field();
    let mut label = FamilyLabel::new(&field, family, params)?;
    if let Some(i) = sign_slot(label.class, family) {
        let b = label.params[i];
        let nb = field.neg(b);
        if nb < b {
            red.apply(&sign_flip(&field))?;
            label.params[i] = nb;
        }
    }
    let canonical = materialize(&label)?;
    if canonical != red.cur {
        return Err(Halt::Fail(Error::Internal(format!(
            "reduction to {label} produced {:?}",
            red.cur
        ))));
    }
    Ok(ClassResult {
        label,
        witness: red.witness,
        field,
        canonical,
    })
}

/// Runs a reduction, restarting over larger fields until no root is missing.
fn drive(a: &Msc, routine: fn(&Msc) -> Step<ClassResult>) -> Result<ClassResult> {
    let base = a.field().clone();
    let mut field = base.clone();
    loop {
        let lifted = a.embed(&field)?;
        match routine(&lifted) {
            Ok(r) => return Ok(r),
            Err(Halt::Fail(e)) => return Err(e),
            Err(Halt::Extend(bigger)) => {
                if bigger.degree() <= field.degree() || !base.divides(&bigger) {
                    return Err(Error::Internal(format!(
                        "extension from {field} to {bigger} does not grow"
                    )));
                }
                field = bigger;
            }
        }
    }
}

/// The unique canonical family member isomorphic to `a`, with a witness.
pub fn canonicalize(a: &Msc) -> Result<ClassResult> {
    drive(a, dispatch)
}

fn dispatch(a: &Msc) -> Step<ClassResult> {
    if a.is_zero() {
        let f = a.field();
        return Ok(ClassResult {
            label: FamilyLabel::trivial(f),
            witness: Gl2::identity(f),
            field: f.clone(),
            canonical: a.clone(),
        });
    }
    match a.subset().index {
        1 => subset1(a),
        2 | 3 => subset23(a),
        4 => subset4(a),
        _ => subset5(a),
    }
}

pub fn canon_subset1(a: &Msc) -> Result<ClassResult> {
    drive(a, subset1)
}

pub fn canon_subset23(a: &Msc) -> Result<ClassResult> {
    drive(a, subset23)
}

pub fn canon_subset4(a: &Msc) -> Result<ClassResult> {
    drive(a, subset4)
}

pub fn canon_subset5(a: &Msc) -> Result<ClassResult> {
    drive(a, subset5)
}

fn precondition(ok: bool, what: &str) -> Step<()> {
    if ok {
        Ok(())
    } else {
        Err(Halt::Fail(Error::Precondition(what.to_string())))
    }
}

/// `g = P(A)`: afterwards both traces are unit vectors and the matrix is
/// family 1.
fn subset1(a: &Msc) -> Step<ClassResult> {
    let (p, det) = a.p_matrix();
    precondition(!det.is_zero(), "trace matrix must be nonsingular")?;
    let mut red = Reduction::new(a);
    red.apply(&Gl2::new(a.field(), p)?)?;
    let [a1, a2, _, a4] = red.alpha();
    let b1 = red.beta()[0];
    finish(red, 1, vec![a1, a2, a4, b1])
}

fn subset23(a: &Msc) -> Step<ClassResult> {
    precondition(
        matches!(a.subset().index, 2 | 3),
        "Tr1 must be nonzero with Tr2 proportional to it",
    )?;
    let f = a.field().clone();
    let (o, i) = (f.zero(), f.one());
    let mut red = Reduction::new(a);

    // Tr1(A) g⁻¹ = (1, 0) means Tr1 is the first row of g
    let t = a.traces().tr1;
    let second = if t[0].is_zero() { [i, o] } else { [o, i] };
    red.apply(&Gl2::new(&f, [t, second])?)?;

    let lambda = red.cur.traces().tr2[0];
    let [a1, a2, _, a4] = red.alpha();
    let b1 = red.beta()[0];
    // coefficient of ξ₂ in β₁′ once α₂ = α₄ = 0
    let c = f.sub(f.add(i, lambda), f.mul(f.from_int(3), a1));

    if !a4.is_zero() {
        let xi2 = f.neg(f.div(a2, a4));
        let r = sqrt_or_extend(&f, a4)?;
        red.apply_inverse([[i, o], [xi2, f.inv(r)]])?;
        let (al, be) = (red.alpha(), red.beta());
        return finish(red, 2, vec![al[0], be[0], be[1]]);
    }
    if !a2.is_zero() {
        if f.characteristic() == 2 {
            // α₁ is fixed; pick ξ₂ killing β₁′ = (β₁ + c ξ₂ + α₂ ξ₂²)/η₂
            let three = f.from_int(3);
            let xi2 = least_root_or_extend(&f, [b1, c, f.neg(f.mul(three, a2)), o])?;
            red.apply_inverse([[i, o], [xi2, f.inv(a2)]])?;
            let (al, be) = (red.alpha(), red.beta());
            return finish(red, 3, vec![al[0], be[1]]);
        }
        let xi2 = f.neg(f.div(a1, f.add(a2, a2)));
        red.apply_inverse([[i, o], [xi2, f.inv(a2)]])?;
        let be = red.beta();
        return finish(red, 3, vec![be[0], be[1]]);
    }
    if !c.is_zero() {
        red.apply_inverse([[i, o], [f.neg(f.div(b1, c)), i]])?;
        let (al, be) = (red.alpha(), red.beta());
        return finish(red, 4, vec![al[0], be[1]]);
    }
    if !b1.is_zero() {
        red.apply_inverse([[i, o], [o, b1]])?;
        let al = red.alpha();
        return finish(red, 5, vec![al[0]]);
    }
    let (al, be) = (red.alpha(), red.beta());
    finish(red, 4, vec![al[0], be[1]])
}

/// Subset 4 is subset 3 of the opposite algebra; families 2..5 there become 6..9.
fn subset4(a: &Msc) -> Step<ClassResult> {
    precondition(a.subset().index == 4, "Tr1 must vanish and Tr2 must not")?;
    let opposite = subset23(&a.swap_middle_columns())?;
    let f = opposite.field.clone();
    let ps = opposite.label.params();
    let (family, params) = match opposite.label.family() {
        2 => (6, vec![ps[0], ps[1]]),
        3 => (7, vec![ps[0]]),
        4 => (8, vec![ps[0]]),
        5 => (9, vec![]),
        other => {
            return Err(Halt::Fail(Error::Internal(format!(
                "opposite algebra landed in family {other}"
            ))))
        }
    };
    let label = FamilyLabel::new(&f, family, params)?;
    let canonical = materialize(&label)?;
    if canonical != opposite.canonical.swap_middle_columns() {
        return Err(Halt::Fail(Error::Internal(format!(
            "{label} does not match the swapped {}",
            opposite.label
        ))));
    }
    Ok(ClassResult {
        label,
        witness: opposite.witness,
        field: f,
        canonical,
    })
}

fn subset5(a: &Msc) -> Step<ClassResult> {
    precondition(
        a.subset().index == 5 && !a.is_zero(),
        "both traces must vanish on a nonzero matrix",
    )?;
    let f = a.field().clone();
    let (o, i) = (f.zero(), f.one());
    let three = f.from_int(3);
    let mut red = Reduction::new(a);

    let [a1, a2, _, a4] = red.alpha();
    let b1 = red.beta()[0];
    if !a4.is_zero() {
        // α₄′ vanishes when η₂/η₁ is a root of β₁ − 3α₁t − 3α₂t² − α₄t³
        let cubic = [
            b1,
            f.neg(f.mul(three, a1)),
            f.neg(f.mul(three, a2)),
            f.neg(a4),
        ];
        let t = least_root_or_extend(&f, cubic)?;
        red.apply_inverse([[o, i], [i, t]])?;
        if !red.alpha()[3].is_zero() {
            return Err(Halt::Fail(Error::Internal(
                "cubic root did not clear alpha4".into(),
            )));
        }
    }

    // from here on g⁻¹ = (ξ₁, 0; ξ₂, η₂) keeps α₄ = 0
    let [a1, a2, _, _] = red.alpha();
    let b1 = red.beta()[0];
    let p = f.characteristic();

    if !a2.is_zero() && p != 2 {
        red.apply_inverse([[i, o], [f.neg(f.div(a1, f.add(a2, a2))), f.inv(a2)]])?;
        let b = red.beta()[0];
        if b.is_zero() {
            return finish(red, 10, vec![]);
        }
        let r = sqrt_or_extend(&f, b)?;
        red.apply_inverse([[f.inv(r), o], [o, i]])?;
        return finish(red, if p == 3 { 9 } else { 11 }, vec![]);
    }
    if !a2.is_zero() {
        // characteristic 2: α₁ can only be rescaled
        if a1.is_zero() {
            let s = sqrt_or_extend(&f, f.div(b1, a2))?;
            red.apply_inverse([[i, o], [s, f.inv(a2)]])?;
            return finish(red, 10, vec![]);
        }
        let quad = [b1, f.neg(f.mul(three, a1)), f.neg(f.mul(three, a2)), o];
        let s = least_root_or_extend(&f, quad)?;
        let xi1 = f.inv(a1);
        red.apply_inverse([[xi1, o], [f.mul(xi1, s), f.inv(a2)]])?;
        return finish(red, 11, vec![]);
    }
    if a1.is_zero() {
        red.apply_inverse([[i, o], [o, b1]])?;
        return finish(red, 12, vec![]);
    }
    let xi1 = f.inv(a1);
    if p == 3 {
        if !b1.is_zero() {
            red.apply_inverse([[xi1, o], [o, f.mul(f.mul(xi1, xi1), b1)]])?;
            return finish(red, 11, vec![]);
        }
        red.apply_inverse([[xi1, o], [o, i]])?;
    } else {
        let s = f.div(b1, f.mul(three, a1));
        red.apply_inverse([[xi1, o], [f.mul(xi1, s), i]])?;
    }
    red.apply(&bridge_witness(&f))?;
    finish(red, 10, vec![])
}

/// A verified witness `w` with `transform(A, w) = B` over a common extension,
/// or `None` when the canonical labels differ.
pub fn is_isomorphic(a: &Msc, b: &Msc) -> Result<Option<Gl2>> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(
            a.field().to_string(),
            b.field().to_string(),
        ));
    }
    let ra = canonicalize(a)?;
    let rb = canonicalize(b)?;
    if !ra.label.equivalent(&rb.label)? {
        return Ok(None);
    }
    let common = common_field(&ra.field, &rb.field)?;
    let ca = ra.canonical.embed(&common)?;
    let cb = rb.canonical.embed(&common)?;
    let wa = ra.witness.embed(&common)?;
    let wb = rb.witness.embed(&common)?;
    let middle = if ca == cb {
        Gl2::identity(&common)
    } else {
        let flip = sign_flip(&common);
        if ca.transform(&flip)? != cb {
            return Err(Error::Internal(format!(
                "equivalent labels {} and {} with unrelated canonicals",
                ra.label, rb.label
            )));
        }
        flip
    };
    let w = wb.inverse().compose(&middle.compose(&wa)?)?;
    if a.embed(&common)?.transform(&w)? != b.embed(&common)? {
        return Err(Error::Internal("composed witness does not verify".into()));
    }
    Ok(Some(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    fn label(f: &Field, family: u8, params: &[i64]) -> FamilyLabel {
        FamilyLabel::new(f, family, params.iter().map(|&n| f.from_int(n)).collect()).unwrap()
    }

    fn check_result(a: &Msc, r: &ClassResult) {
        let lifted = a.embed(&r.field).unwrap();
        assert_eq!(lifted.transform(&r.witness).unwrap(), r.canonical);
        assert_eq!(materialize(&r.label).unwrap(), r.canonical);
    }

    #[test]
    fn materialize_examples() {
        let f = gf(7, 1);
        assert_eq!(
            materialize(&label(&f, 9, &[])).unwrap(),
            Msc::from_ints(&f, [[5, 0, 0, 0], [1, 3, 2, 0]])
        );
        assert_eq!(
            materialize(&label(&f, 12, &[])).unwrap(),
            Msc::from_ints(&f, [[0, 0, 0, 0], [1, 0, 0, 0]])
        );
        let g = gf(2, 1);
        assert_eq!(
            materialize(&label(&g, 11, &[])).unwrap(),
            Msc::from_ints(&g, [[1, 1, 1, 0], [0, 1, 1, 1]])
        );
    }

    #[test]
    fn label_validation() {
        let f = gf(7, 1);
        assert!(matches!(
            FamilyLabel::new(&f, 2, vec![f.one()]),
            Err(Error::Arity {
                family: 2,
                expected: 3,
                got: 1
            })
        ));
        assert!(matches!(
            FamilyLabel::new(&f, 13, vec![]),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            FamilyLabel::with_class(&f, LabelClass::Char2, 10, vec![]),
            Err(Error::CharacteristicMismatch { p: 7, .. })
        ));
        assert!(matches!(
            FamilyLabel::with_class(&gf(3, 1), LabelClass::General, 9, vec![]),
            Err(Error::CharacteristicMismatch { p: 3, .. })
        ));
    }

    #[test]
    fn zero_is_trivial() {
        let f = gf(5, 1);
        let r = canonicalize(&Msc::zero(&f)).unwrap();
        assert!(r.label.is_trivial());
        assert!(r.witness.is_identity());
    }

    #[test]
    fn a9_is_a_fixed_point() {
        let f = gf(7, 1);
        let a = materialize(&label(&f, 9, &[])).unwrap();
        let r = canonicalize(&a).unwrap();
        assert_eq!(r.label, label(&f, 9, &[]));
        assert!(r.witness.is_identity());
        let r4 = canon_subset4(&a).unwrap();
        assert_eq!(r4.label, r.label);
    }

    #[test]
    fn family1_reads_params_directly() {
        let f = gf(7, 1);
        let a = materialize(&label(&f, 1, &[3, 4, 5, 6])).unwrap();
        assert_eq!(a.p_matrix().0, [[f.one(), f.zero()], [f.zero(), f.one()]]);
        let r = canon_subset1(&a).unwrap();
        assert_eq!(r.label, label(&f, 1, &[3, 4, 5, 6]));
        assert!(r.witness.is_identity());
    }

    #[test]
    fn subset23_example_lands_in_family_2() {
        let f = gf(7, 1);
        let a = Msc::from_ints(&f, [[1, 0, 0, 1], [0, 0, 0, 0]]);
        let t = a.traces();
        assert_eq!((t.tr1, t.tr2), ([f.one(), f.zero()], [f.one(), f.zero()]));
        let r = canon_subset23(&a).unwrap();
        assert_eq!(r.label, label(&f, 2, &[1, 0, 0]));
        check_result(&a, &r);
    }

    #[test]
    fn subset23_boundary_needs_no_step() {
        // α₁ = 3, λ = 3α₁ − 1 = 1, β₁ = 0: family 4 with β₂ = 2α₁ − 1
        let f = gf(7, 1);
        let a = Msc::from_ints(&f, [[3, 0, 0, 0], [0, -2, -2, 0]]);
        assert_eq!(a.subset().lambda, f.from_int(1));
        let r = canon_subset23(&a).unwrap();
        assert_eq!(r.label, label(&f, 4, &[3, 5]));
        assert!(r.witness.is_identity());
    }

    #[test]
    fn subset6_sign_identification() {
        let f = gf(7, 1);
        let a = Msc::from_ints(&f, [[2, 0, 0, 1], [5, -1, -2, 0]]);
        let r = canon_subset4(&a).unwrap();
        assert_eq!(r.label, label(&f, 6, &[2, 2]));
        check_result(&a, &r);
    }

    #[test]
    fn subset5_examples() {
        let f = gf(7, 1);
        let a12 = Msc::from_ints(&f, [[0, 0, 0, 0], [1, 0, 0, 0]]);
        let r = canon_subset5(&a12).unwrap();
        assert_eq!(r.label.family(), 12);
        assert!(r.witness.is_identity());

        let s = bridge_source(&f);
        assert_eq!(canon_subset5(&s).unwrap().label.family(), 10);

        let a = Msc::from_ints(&f, [[0, 1, 1, 0], [1, 0, 0, -1]]);
        let r = canon_subset5(&a).unwrap();
        assert_eq!(r.label.family(), 11);
        check_result(&a, &r);
    }

    #[test]
    fn preconditions_are_enforced() {
        let f = gf(7, 1);
        let zero = Msc::zero(&f);
        assert!(matches!(canon_subset1(&zero), Err(Error::Precondition(_))));
        assert!(matches!(canon_subset23(&zero), Err(Error::Precondition(_))));
        assert!(matches!(canon_subset4(&zero), Err(Error::Precondition(_))));
        assert!(matches!(canon_subset5(&zero), Err(Error::Precondition(_))));
    }

    #[test]
    fn normalize_examples() {
        let f = gf(7, 1);
        assert_eq!(
            normalize_label(&label(&f, 2, &[1, 5, 0])),
            label(&f, 2, &[1, 2, 0])
        );
        assert_eq!(
            normalize_label(&label(&f, 2, &[1, 0, 3])),
            label(&f, 2, &[1, 0, 3])
        );
        let g = gf(2, 1);
        assert_eq!(
            normalize_label(&label(&g, 2, &[1, 1, 1])),
            label(&g, 2, &[1, 1, 1])
        );
    }

    #[test]
    fn isomorphism_examples() {
        let f = gf(7, 1);
        let a = materialize(&label(&f, 2, &[3, 2, 4])).unwrap();
        let b = Msc::from_ints(&f, [[3, 0, 0, 1], [5, 4, -2, 0]]);
        let w = is_isomorphic(&a, &b)
            .unwrap()
            .expect("sign-identified pair");
        assert_eq!(
            a.embed(w.field()).unwrap().transform(&w).unwrap(),
            b.embed(w.field()).unwrap()
        );

        let a10 = materialize(&label(&f, 10, &[])).unwrap();
        let a11 = materialize(&label(&f, 11, &[])).unwrap();
        assert_eq!(is_isomorphic(&a10, &a11).unwrap(), None);
    }

    #[test]
    fn bridge_witnesses_verify() {
        for (p, k) in [
            (5, 1),
            (7, 1),
            (11, 1),
            (2, 1),
            (2, 2),
            (3, 1),
            (3, 2),
            (13, 1),
        ] {
            let f = gf(p, k);
            let target = materialize(&FamilyLabel::new(&f, 10, vec![]).unwrap()).unwrap();
            assert_eq!(
                bridge_source(&f).transform(&bridge_witness(&f)).unwrap(),
                target,
                "GF({p}^{k})"
            );
        }
    }
}
