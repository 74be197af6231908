//! Minimal deterministic JSON writer.
//!
//! Every float is rendered with 17 significant digits (`{:.16e}`), enough to
//! reproduce any binary64 value exactly on re-parse, and field order is fixed
//! by construction, so identical data always serializes to identical bytes.

/// One JSON value. Arrays and objects preserve insertion order.
pub enum Json {
    Str(String),
    Num(f64),
    Int(i64),
    Bool(bool),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

/// Render a float with 17 significant digits; infinities become the strings
/// `"inf"` / `"-inf"` since JSON has no literal for them.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "\"inf\"".into()
    } else if x == f64::NEG_INFINITY {
        "\"-inf\"".into()
    } else {
        format!("{x:.16e}")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

impl Json {
    pub fn to_string_pretty(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        match self {
            Json::Str(s) => out.push_str(&format!("\"{}\"", escape(s))),
            Json::Num(x) => out.push_str(&fmt_f64(*x)),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad);
                    out.push_str("  ");
                    item.write(out, indent + 1);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (key, value)) in fields.iter().enumerate() {
                    out.push_str(&pad);
                    out.push_str(&format!("  \"{key}\": "));
                    value.write(out, indent + 1);
                    if i + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad);
                out.push('}');
            }
        }
    }
}

pub fn num_array(values: &[f64]) -> Json {
    Json::Arr(values.iter().map(|&v| Json::Num(v)).collect())
}

pub fn vec_array(vectors: &[Vec<f64>]) -> Json {
    Json::Arr(vectors.iter().map(|v| num_array(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for x in [
            0.0,
            -1.5,
            std::f64::consts::PI,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            1e300,
            -2.2250738585072014e-308,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn object_layout_is_stable() {
        let j = Json::Obj(vec![
            ("a", Json::Int(1)),
            ("b", Json::Arr(vec![Json::Bool(true), Json::Str("x\"y".into())])),
        ]);
        let s1 = j.to_string_pretty();
        let s2 = j.to_string_pretty();
        assert_eq!(s1, s2);
        assert!(s1.contains("\"a\": 1"));
        assert!(s1.contains("\\\""));
    }
}
