//! Bulk curve data as CSV: header `lambda,n,mu`, one row per grid point and
//! curve index, sorted by (lambda, n), floats at 17 significant digits so a
//! read-back reproduces every value bit-exactly.

use eigencurves::curves::EigencurveTable;

pub fn write_trace(table: &EigencurveTable) -> String {
    let mut out = String::from("lambda,n,mu\n");
    for s in &table.slices {
        for (k, &mu) in s.mu.iter().enumerate() {
            out.push_str(&format!("{:.16e},{},{:.16e}\n", s.lambda, k + 1, mu));
        }
    }
    out
}

pub fn read_trace(text: &str) -> Result<Vec<(f64, usize, f64)>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some("lambda,n,mu") => {}
        other => return Err(format!("bad header: {other:?}")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |p: Option<&str>, what: &str| -> Result<f64, String> {
            p.ok_or_else(|| format!("row {}: missing {what}", i + 2))?
                .parse()
                .map_err(|e| format!("row {}: {what}: {e}", i + 2))
        };
        let lambda = parse(parts.next(), "lambda")?;
        let n: usize = parts
            .next()
            .ok_or_else(|| format!("row {}: missing n", i + 2))?
            .parse()
            .map_err(|e| format!("row {}: n: {e}", i + 2))?;
        let mu = parse(parts.next(), "mu")?;
        if parts.next().is_some() {
            return Err(format!("row {}: trailing fields", i + 2));
        }
        rows.push((lambda, n, mu));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use eigencurves::curves::{self, LambdaGrid};
    use eigencurves::problems;

    #[test]
    fn round_trip_is_bit_exact() {
        let t = problems::paper_matrix_example();
        let grid = LambdaGrid::uniform(-2.0, 2.0, 17).unwrap();
        let table = curves::trace(&t, &grid).unwrap();
        let text = write_trace(&table);
        let rows = read_trace(&text).unwrap();
        let mut it = rows.iter();
        for s in &table.slices {
            for (k, &mu) in s.mu.iter().enumerate() {
                let &(l, n, m) = it.next().unwrap();
                assert_eq!(l.to_bits(), s.lambda.to_bits());
                assert_eq!(n, k + 1);
                assert_eq!(m.to_bits(), mu.to_bits());
            }
        }
        assert!(it.next().is_none());
    }
}
