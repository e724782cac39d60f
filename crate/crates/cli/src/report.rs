//! Report plumbing.  Every JSON report is wrapped in the same envelope;
//! CSV output carries the same metadata as leading comment lines.

use std::io::Write;

use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// All stdout goes through here.  A closed pipe (e.g. `virial .. | head`)
/// ends the process quietly with the conventional SIGPIPE status instead of
/// a panic.
pub fn print_text(text: &str) {
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).is_err() || out.flush().is_err() {
        std::process::exit(141);
    }
}

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub data: T,
}

pub fn print_json<T: Serialize>(command: &str, config_sha256: String, seed: u64, data: T) {
    let env = Envelope {
        version: VERSION,
        command: command.to_string(),
        config_sha256,
        seed,
        data,
    };
    let text = serde_json::to_string_pretty(&env).expect("report serializes");
    print_text(&format!("{text}\n"));
}

pub fn csv_preamble(command: &str, config_sha256: &str, seed: u64) -> String {
    format!(
        "# version={VERSION} command={command} config_sha256={config_sha256} seed={seed}\n"
    )
}

#[derive(Serialize)]
pub struct ErrorDetail {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    pub message: String,
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

/// Machine-readable error on stdout; the caller picks the exit code.
pub fn print_error(kind: &'static str, key: Option<String>, message: String) {
    let body = ErrorBody {
        error: ErrorDetail { kind, key, message },
    };
    let text = serde_json::to_string_pretty(&body).expect("error serializes");
    print_text(&format!("{text}\n"));
}
