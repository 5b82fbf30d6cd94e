//! Plain-text rendering, 6 significant digits.

use nehari_core::certificates::{Certificate, SweepReport};

pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let text = format!("{v:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "ok"
    } else {
        "FAIL"
    }
}

fn line(out: &mut Vec<String>, name: &str, computed: f64, closed: f64, holds: bool) {
    out.push(format!("{name:<18} {:>12}   closed form {:>12}   {}", sig6(computed), sig6(closed), verdict(holds)));
}

pub fn certificate(cert: &Certificate) -> String {
    let mut out = vec![format!(
        "d = {}   profile {}   {}",
        cert.d,
        cert.tolerances.name,
        if cert.certified { "CERTIFIED" } else { "NOT CERTIFIED" }
    )];
    if let Some(r) = &cert.hankel_norm {
        line(&mut out, "hankel_norm", r.computed, r.closed_form, r.holds);
    }
    if let Some(r) = &cert.schur_bound {
        let exact = r.exact.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
        out.push(format!("{:<18} {:>12}   exact {exact}   {}", "schur_bound", sig6(r.computed), verdict(r.holds)));
    }
    if let Some(r) = &cert.functional_value {
        line(&mut out, "functional_value", r.computed, r.closed_form, r.holds);
    }
    if let Some(r) = &cert.l1_norm {
        line(&mut out, "l1_norm", r.computed, r.closed_form, r.holds);
        if let Some(q) = &r.tensor_quadrature {
            out.push(format!(
                "  tensor quadrature {:>12}   N = {}   {}",
                sig6(q.value),
                q.nodes_per_dim,
                verdict(q.holds)
            ));
        }
        if let Some(m) = &r.monte_carlo {
            out.push(format!(
                "  monte carlo       {:>12}   se {}   {}",
                sig6(m.value),
                sig6(m.standard_error),
                verdict(m.holds)
            ));
        }
    }
    if let Some(r) = &cert.l2_norm {
        line(&mut out, "l2_norm", r.computed, r.closed_form, r.holds);
    }
    if let Some(r) = &cert.wf_norm {
        out.push(format!(
            "{:<18} [{}, {}]   closed form {:>12}   {}",
            "wf_norm",
            sig6(r.lower),
            sig6(r.upper),
            sig6(r.closed_form),
            verdict(r.holds)
        ));
    }
    if let Some(r) = &cert.c_d_lower {
        line(&mut out, "C_d_lower", r.computed, r.closed_form, r.holds);
    }
    if let Some(r) = &cert.a_d_lower {
        out.push(format!(
            "{:<18} {:>12}   claimed {:>12}   (reported only)",
            "A_d ratio",
            sig6(r.computed_ratio),
            sig6(r.paper_claim)
        ));
        out.push(format!("  {}", r.discrepancy_note));
    }
    if let Some(failure) = &cert.failure {
        out.push(format!("aborted: {failure}"));
    }
    for check in cert.checks.iter().filter(|c| !c.holds) {
        out.push(format!("failed check: {}", check.name));
    }
    out.join("\n")
}

pub fn sweep(report: &SweepReport) -> String {
    let mut out = vec![format!("{:>4}  {:>12}  {:>12}  {}", "d", "C_d_lower", "closed form", "certified")];
    for row in &report.rows {
        let (computed, closed) = row.c_d_lower.map(|c| (sig6(c.computed), sig6(c.closed_form))).unwrap_or_default();
        out.push(format!("{:>4}  {computed:>12}  {closed:>12}  {}", row.d, row.certified));
    }
    let slope = report.fitted_slope.map(sig6).unwrap_or_else(|| "-".into());
    out.push(format!(
        "slope of ln C_d_lower: {slope} (expected {})   {}",
        sig6(report.expected_slope),
        verdict(report.slope_holds)
    ));
    out.push(format!("nondecreasing: {}", report.c_d_nondecreasing));
    out.join("\n")
}

pub fn norm(report: &serde_json::Value) -> String {
    let text = |key: &str| report.get(key).map(render).unwrap_or_default();
    match report.get("upper") {
        Some(_) => format!(
            "upper {}  lower {}  (method {}, grid {}, {} iterations)",
            text("upper"),
            text("lower"),
            text("method"),
            text("grid_size"),
            text("iterations")
        ),
        None => format!("{}  (method {})", text("value"), text("method")),
    }
}

fn render(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => sig6(n.as_f64().unwrap_or(f64::NAN)),
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Array(items) => items.iter().map(render).collect::<Vec<_>>().join("x"),
        other => other.to_string(),
    }
}
