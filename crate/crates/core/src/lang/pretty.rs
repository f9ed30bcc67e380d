use std::fmt::Write;

use super::ast::Plan;

/// Canonical program text. Re-parsing the output yields the same plans.
///
/// Each plan prints its head on one line and one deed per indented line;
/// plans are separated by a blank line.
pub fn pretty_print(plans: &[Plan]) -> String {
    let mut out = String::new();
    for (i, plan) in plans.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{} : {} <-", plan.trigger, plan.guard);
        for (j, deed) in plan.deeds.iter().enumerate() {
            let sep = if j + 1 == plan.deeds.len() { ';' } else { ',' };
            let _ = writeln!(out, "    {deed}{sep}");
        }
    }
    out
}
