//! Serialization helpers shared by the JSON artifacts.

use serde::Serializer;

/// Writes finite numbers as numbers and ±∞ / NaN as the strings
/// `"inf"`, `"-inf"`, `"nan"` (JSON has no literal for them).
pub fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn serialize_extended_vec<S: Serializer>(
    v: &[f64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Extended(*x))?;
    }
    seq.end()
}

/// Wrapper that serializes through [`serialize_extended`].
#[derive(Debug, Clone, Copy)]
pub struct Extended(pub f64);

impl serde::Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_extended(&self.0, s)
    }
}
