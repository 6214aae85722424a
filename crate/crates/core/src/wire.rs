//! JSON rendering shared by every tool payload.
//!
//! Payloads are rendered on one line with `", "` and `": "` separators, the
//! layout tool responses have in recorded agent transcripts. Object keys keep
//! insertion order.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

#[derive(Default)]
struct SpacedFormatter {
    inner: CompactFormatter,
}

impl Formatter for SpacedFormatter {
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        self.inner.write_f64(w, value)
    }
}

/// Render any serializable value in the spaced single-line layout.
pub fn to_wire_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::with_capacity(256);
    let mut ser = Serializer::with_formatter(&mut buf, SpacedFormatter::default());
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits utf-8")
}

/// Round to a fixed number of decimal places.
pub fn round_decimals(x: f64, places: i32) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}

/// Round to a number of significant digits (used for E-values).
pub fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    // Going through the exponential formatter avoids the scale overflow a
    // power-of-ten multiply hits for values like 1e-300.
    format!("{:.*e}", digits.saturating_sub(1) as usize, x)
        .parse()
        .unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn spaced_layout() {
        let v = json!({"length": 117, "heuristics": {"a": false, "b": [1, 2]}, "x": 0.1171});
        assert_eq!(
            to_wire_string(&v),
            r#"{"length": 117, "heuristics": {"a": false, "b": [1, 2]}, "x": 0.1171}"#
        );
    }

    #[test]
    fn float_rendering_matches_transcript_style() {
        let v = json!([100.0, 1.299e-66, 8e-39, 0.045, 222.0]);
        assert_eq!(to_wire_string(&v), "[100.0, 1.299e-66, 8e-39, 0.045, 222.0]");
    }

    #[test]
    fn rounding() {
        assert_eq!(round_decimals(0.117527, 4), 0.1175);
        assert_eq!(round_decimals(133.349, 1), 133.3);
        assert_eq!(round_significant(1.29876e-66, 4), 1.299e-66);
        assert_eq!(round_significant(0.04512, 2), 0.045);
        assert_eq!(round_significant(8.04e-39, 2), 8e-39);
        assert_eq!(round_significant(0.0, 2), 0.0);
    }
}
