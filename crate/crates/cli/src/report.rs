use poisore::verify::{CheckStatus, VerdictReport};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Serialize)]
struct JsonVerdict<'a> {
    name: &'a str,
    status: &'static str,
    witness: Option<&'a str>,
    elapsed_ms: u128,
}

/// Renders `reports` sorted by name. With `timing` off every elapsed time
/// prints as 0, which makes repeated runs byte-identical.
pub fn emit_report(reports: &[VerdictReport], format: Format, timing: bool) -> String {
    let mut sorted: Vec<&VerdictReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let ms = |r: &VerdictReport| if timing { r.elapsed.as_millis() } else { 0 };
    match format {
        Format::Text => sorted
            .iter()
            .map(|r| match &r.witness {
                Some(w) => format!("CHECK {} {} witness: {} ({} ms)\n", r.name, r.status, w, ms(r)),
                None => format!("CHECK {} {} ({} ms)\n", r.name, r.status, ms(r)),
            })
            .collect(),
        Format::Json => {
            let rows: Vec<JsonVerdict> = sorted
                .iter()
                .map(|r| JsonVerdict {
                    name: &r.name,
                    status: match r.status {
                        CheckStatus::Pass => "pass",
                        CheckStatus::Fail => "fail",
                    },
                    witness: r.witness.as_deref(),
                    elapsed_ms: ms(r),
                })
                .collect();
            let mut s = serde_json::to_string(&rows).expect("plain data serialises");
            s.push('\n');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn report(name: &str, status: CheckStatus, witness: Option<&str>) -> VerdictReport {
        VerdictReport {
            name: name.into(),
            status,
            witness: witness.map(Into::into),
            elapsed: Duration::from_millis(12),
        }
    }

    #[test]
    fn empty_text() {
        assert_eq!(emit_report(&[], Format::Text, true), "");
    }

    #[test]
    fn json_schema() {
        let out = emit_report(&[report("jacobi", CheckStatus::Pass, None)], Format::Json, true);
        assert_eq!(
            out,
            "[{\"name\":\"jacobi\",\"status\":\"pass\",\"witness\":null,\"elapsed_ms\":12}]\n"
        );
    }

    #[test]
    fn failing_text_and_order() {
        let out = emit_report(
            &[
                report("jacobi", CheckStatus::Fail, Some("(z1, z2, z3): z1 + z2 + z3")),
                report("assoc", CheckStatus::Pass, None),
            ],
            Format::Text,
            false,
        );
        assert_eq!(
            out,
            "CHECK assoc PASS (0 ms)\nCHECK jacobi FAIL witness: (z1, z2, z3): z1 + z2 + z3 (0 ms)\n"
        );
    }
}
