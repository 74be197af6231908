//! Problem-file format: a JSON document carrying the three symmetric matrices
//! row-major, plus optional provenance. The reader rejects anything that is
//! not exactly symmetric; the writer only ever mirrors validated triples.

use eigencurves::forms::{self, FormTriple};
use eigencurves::matrix::SymMatrix;

use crate::json_out::{num_array, Json};

pub const SCHEMA_VERSION: &str = "1";

pub struct ProblemFile {
    pub name: String,
    pub triple: FormTriple,
    /// Generator name and flat parameter list, when generated.
    pub provenance: Option<(String, Vec<(String, String)>)>,
}

pub fn write_problem(p: &ProblemFile) -> String {
    let n = p.triple.order();
    let mut fields = vec![
        ("schema_version", Json::Str(SCHEMA_VERSION.into())),
        ("name", Json::Str(p.name.clone())),
        ("order", Json::Int(n as i64)),
        ("a", num_array(p.triple.a().as_slice())),
        ("b", num_array(p.triple.b().as_slice())),
        ("m", num_array(p.triple.m().as_slice())),
    ];
    if let Some((generator, params)) = &p.provenance {
        let mut prov = vec![("generator", Json::Str(generator.clone()))];
        let entries: Vec<Json> = params
            .iter()
            .map(|(k, v)| {
                Json::Obj(vec![
                    ("key", Json::Str(k.clone())),
                    ("value", Json::Str(v.clone())),
                ])
            })
            .collect();
        prov.push(("params", Json::Arr(entries)));
        fields.push(("provenance", Json::Obj(prov)));
    }
    Json::Obj(fields).to_string_pretty()
}

pub fn read_problem(text: &str) -> Result<ProblemFile, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value.as_object().ok_or("top level must be an object")?;

    let version = obj
        .get("schema_version")
        .and_then(|v| v.as_str())
        .ok_or("missing schema_version")?;
    if version != SCHEMA_VERSION {
        return Err(format!("unsupported schema_version {version:?}"));
    }
    let name = obj
        .get("name")
        .and_then(|v| v.as_str())
        .unwrap_or("unnamed")
        .to_string();
    let order = obj
        .get("order")
        .and_then(|v| v.as_u64())
        .ok_or("missing or invalid order")? as usize;
    if order == 0 {
        return Err("order must be positive".into());
    }

    let matrix = |key: &str| -> Result<SymMatrix, String> {
        let arr = obj
            .get(key)
            .and_then(|v| v.as_array())
            .ok_or_else(|| format!("missing matrix {key:?}"))?;
        if arr.len() != order * order {
            return Err(format!(
                "matrix {key:?} has {} entries, expected {}",
                arr.len(),
                order * order
            ));
        }
        let data: Result<Vec<f64>, String> = arr
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| format!("non-numeric entry in {key:?}")))
            .collect();
        SymMatrix::from_flat(order, data?).map_err(|e| format!("matrix {key:?}: {e}"))
    };

    let a = matrix("a")?;
    let b = matrix("b")?;
    let m = matrix("m")?;
    let (triple, _) = forms::validate(a, b, m).map_err(|e| e.to_string())?;

    let provenance = obj.get("provenance").and_then(|p| {
        let gen = p.get("generator")?.as_str()?.to_string();
        let params = p
            .get("params")?
            .as_array()?
            .iter()
            .filter_map(|e| {
                Some((
                    e.get("key")?.as_str()?.to_string(),
                    e.get("value")?.as_str()?.to_string(),
                ))
            })
            .collect();
        Some((gen, params))
    });

    Ok(ProblemFile {
        name,
        triple,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use eigencurves::problems;

    #[test]
    fn round_trip_preserves_entries_bitwise() {
        let triple = problems::paper_matrix_example();
        let p = ProblemFile {
            name: "matrix-example".into(),
            triple,
            provenance: Some(("paper-matrix".into(), vec![])),
        };
        let text = write_problem(&p);
        let back = read_problem(&text).unwrap();
        assert_eq!(back.name, "matrix-example");
        assert_eq!(back.triple.a(), p.triple.a());
        assert_eq!(back.triple.b(), p.triple.b());
        assert_eq!(back.triple.m(), p.triple.m());
    }

    #[test]
    fn asymmetric_entry_is_rejected() {
        let triple = problems::paper_matrix_example();
        let p = ProblemFile {
            name: "tampered".into(),
            triple,
            provenance: None,
        };
        let text = write_problem(&p);
        // Corrupt one off-diagonal entry of "a".
        let tampered = text.replacen("-1.0000000000000000e0", "-1.0000000000000001e0", 1);
        assert!(read_problem(&tampered).is_err());
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let triple = problems::paper_matrix_example();
        let text = write_problem(&ProblemFile {
            name: "x".into(),
            triple,
            provenance: None,
        });
        let tampered = text.replace("\"schema_version\": \"1\"", "\"schema_version\": \"2\"");
        assert!(read_problem(&tampered).is_err());
    }
}
