use std::fmt::Write as _;

const PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, width: u32, height: u32, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="10" y="20" font-size="14" font-weight="bold">{}</text>"#, escape(title));
}

/// Pie chart with a legend giving counts and percentages.
pub fn pie_chart(title: &str, slices: &[(String, u64)]) -> String {
    let (cx, cy, r) = (150.0f64, 170.0f64, 120.0f64);
    let total: u64 = slices.iter().map(|s| s.1).sum();
    let mut out = String::new();
    header(&mut out, 480, 320, title);
    let mut angle = -std::f64::consts::FRAC_PI_2;
    for (i, (_, count)) in slices.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if *count == 0 {
            continue;
        }
        if *count == total {
            let _ = writeln!(out, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{color}" stroke="white"/>"#);
            break;
        }
        let sweep = std::f64::consts::TAU * *count as f64 / total as f64;
        let (x0, y0) = (cx + r * angle.cos(), cy + r * angle.sin());
        angle += sweep;
        let (x1, y1) = (cx + r * angle.cos(), cy + r * angle.sin());
        let large = u8::from(sweep > std::f64::consts::PI);
        let _ = writeln!(
            out,
            r#"<path d="M {cx:.2} {cy:.2} L {x0:.2} {y0:.2} A {r:.2} {r:.2} 0 {large} 1 {x1:.2} {y1:.2} Z" fill="{color}" stroke="white"/>"#
        );
    }
    for (i, (label, count)) in slices.iter().enumerate() {
        let y = 60 + 22 * i;
        let pct = super::percentage(*count, total);
        let _ = writeln!(out, r#"<rect x="300" y="{}" width="12" height="12" fill="{}"/>"#, y - 10, PALETTE[i % PALETTE.len()]);
        let _ = writeln!(out, r#"<text x="318" y="{y}">{} {count} ({pct:.2}%)</text>"#, escape(label));
    }
    out.push_str("</svg>\n");
    out
}

/// Horizontal bars, one per row, each split into segments proportional to
/// the row's share of every series (100% stacked).
pub fn stacked_bars(title: &str, series: &[&str], rows: &[(String, Vec<u64>)]) -> String {
    let (left, bar_w, bar_h, gap) = (220.0f64, 400.0f64, 16.0f64, 6.0f64);
    let height = 60 + rows.len() as u32 * 22 + 20;
    let mut out = String::new();
    header(&mut out, 660, height, title);
    for (j, name) in series.iter().enumerate() {
        let x = left + 110.0 * j as f64;
        let _ = writeln!(out, r#"<rect x="{x:.2}" y="30" width="12" height="12" fill="{}"/>"#, PALETTE[j % PALETTE.len()]);
        let _ = writeln!(out, r#"<text x="{:.2}" y="40">{}</text>"#, x + 16.0, escape(name));
    }
    for (i, (label, values)) in rows.iter().enumerate() {
        let y = 56.0 + (bar_h + gap) * i as f64;
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, left - 6.0, y + 12.0, escape(label));
        let total: u64 = values.iter().sum();
        let mut x = left;
        for (j, v) in values.iter().enumerate() {
            if total == 0 || *v == 0 {
                continue;
            }
            let w = bar_w * *v as f64 / total as f64;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{bar_h:.2}" fill="{}"/>"#,
                PALETTE[j % PALETTE.len()]
            );
            x += w;
        }
    }
    out.push_str("</svg>\n");
    out
}
