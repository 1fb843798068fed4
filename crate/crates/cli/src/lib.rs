//! Scenario-driven front end for the `gchs` library: load a JSON scenario,
//! integrate its flow, evaluate brackets and run the invariant suites.

pub mod bracket;
pub mod check;
pub mod oracle;
pub mod run;
pub mod scenario;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const BLOW_UP: i32 = 2;
    pub const CHECK_FAILED: i32 = 3;
}

/// Maps an error chain to an exit code: blow-up (or step failure) during
/// integration is a runtime failure, anything else bad input.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let runtime = err.chain().any(|e| {
        matches!(
            e.downcast_ref::<gchs::Error>(),
            Some(gchs::Error::BlowUp { .. } | gchs::Error::StepUnderflow { .. } | gchs::Error::TooManySteps { .. })
        )
    });
    if runtime {
        exit::BLOW_UP
    } else {
        exit::INPUT
    }
}
