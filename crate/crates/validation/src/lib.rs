//! Shared reporting for the acceptance suite.

use std::io::Write;

/// Prints one `PASS`/`FAIL` line for a criterion, bypassing test output capture.
pub fn report(criterion: &str, pass: bool, detail: &str) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("[acceptance] {verdict} {criterion}: {detail}\n");
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    pass
}
