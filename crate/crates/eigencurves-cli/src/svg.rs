//! Static SVG 1.1 plot of an eigencurve table: one polyline per curve through
//! the refined grid points, axes with round-number tick labels, a fixed
//! 8-color palette cycled by curve index, and no scripts or timestamps so
//! identical tables render to identical bytes.

use eigencurves::curves::EigencurveTable;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Step of the form {1, 2, 5}·10^k giving roughly `target` ticks over `span`.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.abs().log10().floor());
    let norm = raw / mag;
    let factor = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

fn ticks(lo: f64, hi: f64, target: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, target);
    let first = (lo / step).ceil();
    let mut out = Vec::new();
    let mut k = first;
    while k * step <= hi + 1e-12 * step.abs() {
        // Snap values like -0.0 to 0.
        let v = k * step;
        out.push(if v == 0.0 { 0.0 } else { v });
        k += 1.0;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    // Round-number ticks render exactly under the default float formatter.
    format!("{v}")
}

pub fn render(table: &EigencurveTable) -> String {
    let n = table.order();
    let lam_lo_data = table.grid.lo;
    let lam_hi_data = table.grid.hi;
    let (mut mu_lo, mut mu_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &table.slices {
        for &mu in &s.mu {
            mu_lo = mu_lo.min(mu);
            mu_hi = mu_hi.max(mu);
        }
    }
    if !(mu_lo < mu_hi) {
        mu_hi = mu_lo + 1.0;
    }
    // 5% margin around the data box.
    let lam_pad = 0.05 * (lam_hi_data - lam_lo_data);
    let mu_pad = 0.05 * (mu_hi - mu_lo);
    let (x0, x1) = (lam_lo_data - lam_pad, lam_hi_data + lam_pad);
    let (y0, y1) = (mu_lo - mu_pad, mu_hi + mu_pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |lam: f64| MARGIN_LEFT + (lam - x0) / (x1 - x0) * plot_w;
    let py = |mu: f64| MARGIN_TOP + (y1 - mu) / (y1 - y0) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes.
    let ax_y = py(y0.max(y0));
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        px(x0), ax_y, px(x1), ax_y
    ));
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        px(x0), py(y0), px(x0), py(y1)
    ));
    for t in ticks(x0, x1, 10.0) {
        let x = px(t);
        out.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
            ax_y, ax_y + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            ax_y + 20.0,
            fmt_tick(t)
        ));
    }
    for t in ticks(y0, y1, 8.0) {
        let y = py(t);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
            px(x0) - 5.0,
            px(x0)
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            px(x0) - 8.0,
            y + 4.0,
            fmt_tick(t)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">lambda</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    ));
    out.push_str(&format!(
        "<text x=\"15\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 {:.2})\">mu</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    // Curves.
    for k in 0..n {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = table
            .slices
            .iter()
            .map(|s| format!("{:.2},{:.2}", px(s.lambda), py(s.mu[k])))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
    }
    out.push_str("</svg>\n");
    out
}
