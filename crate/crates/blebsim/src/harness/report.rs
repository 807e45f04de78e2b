//! Markdown report assembly from study summaries.

use super::runner::Summary;

/// Render a table of all checks across studies; the caller propagates a
/// nonzero exit when any row failed.
pub fn render_report(summaries: &[Summary]) -> String {
    let mut out = String::new();
    out.push_str("# Study report\n\n");
    out.push_str("| study | check | measured | threshold | pass |\n");
    out.push_str("|-------|-------|----------|-----------|------|\n");
    for s in summaries {
        for c in &s.checks {
            out.push_str(&format!(
                "| {} | {} | {:.6e} | {:.3e} | {} |\n",
                s.command,
                c.name,
                c.measured,
                c.threshold,
                if c.pass { "yes" } else { "NO" }
            ));
        }
    }
    let total: usize = summaries.iter().map(|s| s.checks.len()).sum();
    let passed: usize = summaries.iter().flat_map(|s| &s.checks).filter(|c| c.pass).count();
    out.push_str(&format!("\n{passed}/{total} checks passed.\n"));
    out
}
