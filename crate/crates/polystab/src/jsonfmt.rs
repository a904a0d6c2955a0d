//! Canonical report formatting: JSON with struct-declaration key order and
//! every float printed with 17 significant digits, so identical runs produce
//! byte-identical output files.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

struct SciFloatFormatter;

impl Formatter for SciFloatFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        debug_assert!(value.is_finite(), "reports only carry finite floats");
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` with the canonical float format.
pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, SciFloatFormatter);
    value.serialize(&mut serializer)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// The matching float format for CSV cells.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[derive(Serialize)]
    struct Sample {
        b_second: f64,
        a_first: f64,
        count: usize,
    }

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        let s = to_string(&Sample {
            b_second: 1.0 / 3.0,
            a_first: 2.0,
            count: 7,
        })
        .unwrap();
        // Declaration order, not alphabetical; integers untouched.
        assert_eq!(
            s,
            "{\"b_second\":3.3333333333333331e-1,\"a_first\":2.0000000000000000e0,\"count\":7}"
        );
        // Round-trips exactly.
        let parsed: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["b_second"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn output_is_byte_stable() {
        let a = to_string(&vec![0.1, -2.5e-13, 4e22]).unwrap();
        let b = to_string(&vec![0.1, -2.5e-13, 4e22]).unwrap();
        assert_eq!(a, b);
    }
}
