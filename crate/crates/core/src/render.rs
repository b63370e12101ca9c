//! Static renderings of chart JSON.

use serde_json::Value;
use std::fmt::Write;

fn entries(chart: &Value) -> Vec<(i64, i64, i64, i64)> {
    chart["entries"]
        .as_array()
        .map(|a| a.iter().map(|e| (e["s"].as_i64().unwrap_or(0), e["t"].as_i64().unwrap_or(0), e["u"].as_i64().unwrap_or(0), e["dim"].as_i64().unwrap_or(0))).collect())
        .unwrap_or_default()
}

pub fn text(chart: &Value) -> String {
    let mut out = format!("# prime {} profile {} envelope {}\n", chart["prime"], chart["profile"].as_str().unwrap_or("?"), chart["envelope"]);
    for (s, t, u, d) in entries(chart) {
        let _ = writeln!(out, "s={s} t={t} u={u} t-s={} dim={d}", t - s);
    }
    out
}

/// Adams chart: x = t - s, y = s; each class is a dot labelled by its weight.
pub fn svg(chart: &Value) -> String {
    let es = entries(chart);
    let ts = &chart["window"]["ts"];
    let (x0, x1) = (ts[0].as_i64().unwrap_or(0), ts[1].as_i64().unwrap_or(0));
    let s1 = chart["window"]["s"][1].as_i64().unwrap_or(0);
    let cell = 60;
    let w = (x1 - x0 + 2) * cell;
    let h = (s1 + 2) * cell;
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"monospace\" font-size=\"10\">\n");
    for x in x0..=x1 {
        let px = (x - x0 + 1) * cell;
        let _ = writeln!(out, "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{x}</text>", h - 8);
    }
    for s in 0..=s1 {
        let _ = writeln!(out, "<text x=\"8\" y=\"{}\">{s}</text>", h - (s + 1) * cell);
    }
    let mut slot = std::collections::BTreeMap::new();
    for (s, t, u, d) in es {
        let x = t - s;
        for _ in 0..d {
            let k = slot.entry((s, x)).or_insert(0i64);
            let px = (x - x0 + 1) * cell + (*k % 4) * 12 - 18;
            let py = h - (s + 1) * cell - (*k / 4) * 14;
            let _ = writeln!(out, "<circle cx=\"{px}\" cy=\"{py}\" r=\"3\"/><text x=\"{}\" y=\"{}\">{u}</text>", px + 3, py - 4);
            *k += 1;
        }
    }
    out.push_str("</svg>\n");
    out
}
