pub mod canon;
pub mod error;
pub mod fields;
pub mod msc;
pub mod oracle;
pub mod serial;
pub mod verify;

pub use canon::{canonicalize, is_isomorphic, materialize, ClassResult, FamilyLabel, LabelClass};
pub use error::{Error, Result};
pub use fields::{Field, FieldElement};
pub use msc::{Gl2, Msc, SubsetInfo, TracePair};
