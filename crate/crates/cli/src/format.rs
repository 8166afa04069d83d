//! Bit-stable serialization: every float is written with 17 significant
//! digits (`{:.16e}`), the shortest width guaranteed to round-trip any
//! f64 exactly, in JSON and CSV alike.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// JSON formatter identical to the compact default except that floats are
/// printed with 17 significant digits.
pub struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        // serde_json maps non-finite to null before reaching here; the
        // guard keeps this formatter safe standalone.
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.write_f64(writer, f64::from(value))
    }
}

/// One float cell for CSV output; non-finite values become empty cells.
pub fn fmt_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        String::new()
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value
        .serialize(&mut ser)
        .expect("plain data structs serialize to JSON");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for &v in &[
            0.1,
            -19.0,
            2.0 / 3.0,
            1.0e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            let cell = fmt_f64(v);
            assert_eq!(cell.parse::<f64>().unwrap(), v, "cell {cell}");
            let json = to_json_string(&v);
            assert_eq!(json.trim().parse::<f64>().unwrap(), v, "json {json}");
        }
    }

    #[test]
    fn non_finite_floats_become_null_or_empty() {
        assert_eq!(fmt_f64(f64::NAN), "");
        assert_eq!(to_json_string(&f64::NAN).trim(), "null");
        assert_eq!(to_json_string(&f64::INFINITY).trim(), "null");
    }

    #[test]
    fn nested_structures_keep_the_float_format() {
        #[derive(Serialize)]
        struct Row {
            name: &'static str,
            value: f64,
            count: u32,
        }
        let json = to_json_string(&Row {
            name: "a",
            value: 0.5,
            count: 3,
        });
        assert_eq!(
            json.trim(),
            r#"{"name":"a","value":5.0000000000000000e-1,"count":3}"#
        );
    }
}
