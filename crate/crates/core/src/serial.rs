//! JSON and CSV forms of matrices, labels, results and census tables.
//!
//! Elements of prime fields are JSON integers; elements of extension fields
//! are strings of comma-separated coefficients, low degree first (`"0,1"` is
//! the generator of GF(p²)). Fields are written `"p^k"`.

use serde::{Deserialize, Serialize};

use crate::canon::{ClassResult, FamilyLabel, LabelClass};
use crate::error::{Error, Result};
use crate::fields::{Field, FieldElement};
use crate::msc::{Gl2, Msc};
use crate::oracle::{CensusTable, OrbitReport};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum ElementJson {
    Int(i64),
    Coeffs(String),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct MscJson {
    pub field: String,
    pub entries: [[ElementJson; 4]; 2],
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct LabelJson {
    pub class: String,
    pub family: u8,
    pub params: Vec<ElementJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ClassResultJson {
    pub label: LabelJson,
    pub field: String,
    pub witness: [[ElementJson; 2]; 2],
    pub canonical: MscJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SubsetJson {
    pub index: u8,
    pub lambda: ElementJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct OrbitJson {
    pub representative: MscJson,
    pub size: u64,
    pub subset: SubsetJson,
    pub label: LabelJson,
    /// Field the label parameters live in.
    pub label_field: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct FailureJson {
    pub matrix: MscJson,
    pub reason: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CensusJson {
    pub field: String,
    pub total: u64,
    pub exhaustive: bool,
    pub orbits: usize,
    pub rows: Vec<OrbitJson>,
    pub shared_labels: Vec<(usize, usize)>,
    pub failures: Vec<FailureJson>,
}

pub fn element_to_json(f: &Field, x: FieldElement) -> ElementJson {
    if f.degree() == 1 {
        ElementJson::Int(x.index() as i64)
    } else {
        ElementJson::Coeffs(f.format_element(x))
    }
}

/// Integers must lie in `0..p`; strings are coefficient lists.
pub fn element_from_json(f: &Field, e: &ElementJson) -> Result<FieldElement> {
    match e {
        ElementJson::Int(n) => {
            let p = f.characteristic() as i64;
            if !(0..p).contains(n) {
                return Err(Error::parse("element", format!("{n} is outside 0..{p}")));
            }
            f.from_coeffs(&[*n as u32])
        }
        ElementJson::Coeffs(s) => f.parse_element(s),
    }
}

fn elements_from<const N: usize>(f: &Field, es: &[ElementJson; N]) -> Result<[FieldElement; N]> {
    let mut out = [FieldElement::ZERO; N];
    for (o, e) in out.iter_mut().zip(es) {
        *o = element_from_json(f, e)?;
    }
    Ok(out)
}

pub fn msc_to_json(a: &Msc) -> MscJson {
    let f = a.field();
    MscJson {
        field: f.to_string(),
        entries: a.rows().map(|r| r.map(|x| element_to_json(f, x))),
    }
}

pub fn msc_from_json(j: &MscJson) -> Result<Msc> {
    let f = Field::parse(&j.field)?;
    entries_to_msc(&f, &j.entries)
}

pub fn entries_to_msc(f: &Field, entries: &[[ElementJson; 4]; 2]) -> Result<Msc> {
    Msc::new(
        f,
        [
            elements_from(f, &entries[0])?,
            elements_from(f, &entries[1])?,
        ],
    )
}

/// Accepts either a full `{"field", "entries"}` object or a bare 2×4 array,
/// the latter read over `field`.
pub fn parse_msc(text: &str, field: Option<&Field>) -> Result<Msc> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::parse("matrix JSON", e.to_string()))?;
    if value.is_object() {
        let j: MscJson = serde_json::from_value(value)
            .map_err(|e| Error::parse("matrix JSON", e.to_string()))?;
        let a = msc_from_json(&j)?;
        if let Some(f) = field {
            if f != a.field() {
                return Err(Error::FieldMismatch(f.to_string(), a.field().to_string()));
            }
        }
        return Ok(a);
    }
    let f = field.ok_or_else(|| Error::parse("matrix JSON", "a bare entry array needs a field"))?;
    let entries: [[ElementJson; 4]; 2] = serde_json::from_value(value).map_err(|e| {
        Error::parse(
            "matrix JSON",
            format!("expected two rows of four entries: {e}"),
        )
    })?;
    entries_to_msc(f, &entries)
}

pub fn gl2_to_json(g: &Gl2) -> [[ElementJson; 2]; 2] {
    let f = g.field();
    g.matrix().map(|r| r.map(|x| element_to_json(f, x)))
}

pub fn gl2_from_json(f: &Field, m: &[[ElementJson; 2]; 2]) -> Result<Gl2> {
    Gl2::new(f, [elements_from(f, &m[0])?, elements_from(f, &m[1])?])
}

pub fn label_to_json(l: &FamilyLabel) -> LabelJson {
    LabelJson {
        class: l.class().name().to_string(),
        family: l.family(),
        params: l
            .params()
            .iter()
            .map(|&x| element_to_json(l.field(), x))
            .collect(),
    }
}

pub fn label_from_json(f: &Field, j: &LabelJson) -> Result<FamilyLabel> {
    let class = LabelClass::parse(&j.class)?;
    if class == LabelClass::Trivial {
        return FamilyLabel::with_class(f, class, j.family, Vec::new());
    }
    let params = j
        .params
        .iter()
        .map(|e| element_from_json(f, e))
        .collect::<Result<Vec<_>>>()?;
    FamilyLabel::with_class(f, class, j.family, params)
}

pub fn class_result_to_json(r: &ClassResult) -> ClassResultJson {
    ClassResultJson {
        label: label_to_json(&r.label),
        field: r.field.to_string(),
        witness: gl2_to_json(&r.witness),
        canonical: msc_to_json(&r.canonical),
    }
}

pub fn class_result_from_json(j: &ClassResultJson) -> Result<ClassResult> {
    let field = Field::parse(&j.field)?;
    Ok(ClassResult {
        label: label_from_json(&field, &j.label)?,
        witness: gl2_from_json(&field, &j.witness)?,
        canonical: msc_from_json(&j.canonical)?,
        field,
    })
}

pub fn orbit_to_json(r: &OrbitReport) -> OrbitJson {
    let f = r.representative.field();
    OrbitJson {
        representative: msc_to_json(&r.representative),
        size: r.size,
        subset: SubsetJson {
            index: r.subset.index,
            lambda: element_to_json(f, r.subset.lambda),
        },
        label: label_to_json(&r.label),
        label_field: r.label.field().to_string(),
    }
}

pub fn census_to_json(t: &CensusTable) -> CensusJson {
    CensusJson {
        field: t.field.to_string(),
        total: t.total,
        exhaustive: t.exhaustive,
        orbits: t.rows.len(),
        rows: t.rows.iter().map(orbit_to_json).collect(),
        shared_labels: t.shared_labels.clone(),
        failures: t
            .failures
            .iter()
            .map(|x| FailureJson {
                matrix: msc_to_json(&x.matrix),
                reason: x.reason.clone(),
            })
            .collect(),
    }
}

/// Compact single-line form, e.g. `0 1 1 0; 0 0 0 6`.
pub fn msc_inline(a: &Msc) -> String {
    let f = a.field();
    let row = |r: &[FieldElement; 4]| {
        r.iter()
            .map(|&x| f.format_element(x))
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!("{}; {}", row(&a.rows()[0]), row(&a.rows()[1]))
}

/// One CSV row per orbit: representative, size, subset, label class/family/params.
pub fn census_to_csv(t: &CensusTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record([
        "representative",
        "size",
        "subset",
        "class",
        "family",
        "params",
        "label_field",
    ])
    .map_err(io)?;
    for r in &t.rows {
        let lf = r.label.field();
        let params: Vec<String> = r
            .label
            .params()
            .iter()
            .map(|&x| lf.format_element(x))
            .collect();
        w.write_record([
            msc_inline(&r.representative),
            r.size.to_string(),
            r.subset.index.to_string(),
            r.label.class().name().to_string(),
            r.label.family().to_string(),
            params.join(" "),
            lf.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;

    #[test]
    fn prime_field_matrix_round_trip() {
        let f = Field::new(7, 1).unwrap();
        let a = parse_msc("[[5,0,0,0],[1,3,2,0]]", Some(&f)).unwrap();
        assert_eq!(a, Msc::from_ints(&f, [[5, 0, 0, 0], [1, 3, 2, 0]]));
        let text = serde_json::to_string(&msc_to_json(&a)).unwrap();
        assert_eq!(text, r#"{"field":"7^1","entries":[[5,0,0,0],[1,3,2,0]]}"#);
        assert_eq!(parse_msc(&text, None).unwrap(), a);
    }

    #[test]
    fn extension_elements_are_strings() {
        let f = Field::new(3, 2).unwrap();
        let a = parse_msc(r#"[["0,1",1,0,0],[0,0,"2,2",0]]"#, Some(&f)).unwrap();
        let j = msc_to_json(&a);
        assert_eq!(j.entries[0][0], ElementJson::Coeffs("0,1".into()));
        assert_eq!(j.entries[0][1], ElementJson::Coeffs("1,0".into()));
        assert_eq!(msc_from_json(&j).unwrap(), a);
    }

    #[test]
    fn malformed_input() {
        let f = Field::new(7, 1).unwrap();
        assert!(parse_msc("[[1,2,3],[0,0,0,0]]", Some(&f)).is_err());
        assert!(parse_msc("[[7,0,0,0],[0,0,0,0]]", Some(&f)).is_err());
        assert!(parse_msc("[[-1,0,0,0],[0,0,0,0]]", Some(&f)).is_err());
        assert!(parse_msc("[[1,0,0,0],[0,0,0,0]]", None).is_err());
        assert!(parse_msc("not json", Some(&f)).is_err());
    }

    #[test]
    fn class_result_round_trip() {
        let f = Field::new(5, 1).unwrap();
        let a = Msc::from_ints(&f, [[0, 1, 1, 0], [2, 0, 0, -1]]);
        let r = canonicalize(&a).unwrap();
        let text = serde_json::to_string(&class_result_to_json(&r)).unwrap();
        let back: ClassResultJson = serde_json::from_str(&text).unwrap();
        assert_eq!(class_result_from_json(&back).unwrap(), r);
    }
}
