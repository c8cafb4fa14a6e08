//! Library side of the `matgeo` command line: matrix text IO, JSON report
//! types, the verification suites and the command implementations. The
//! binary in `main.rs` only parses arguments and maps failures to exit
//! codes.

pub mod commands;
pub mod matio;
pub mod report;
pub mod suites;

/// Process-level failure classes, in the exit-code contract of the tool:
/// 0 pass, 1 I/O, 2 usage, 3 out of chart domain, 4 verification failure.
#[derive(Debug)]
pub enum Failure {
    Io(String),
    Usage(String),
    OutOfDomain(String),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::OutOfDomain(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Usage(m) | Failure::OutOfDomain(m) | Failure::Verification(m) => m,
        }
    }
}
