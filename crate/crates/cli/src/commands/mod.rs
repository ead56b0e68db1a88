mod converge;
mod energy;
mod functional;
mod interface;
mod time_sbp;
mod verify_ops;

use sbpsat::experiments::ProblemParameters;
use serde_json::Value;

use crate::error::CliResult;

pub use converge::converge;
pub use energy::energy;
pub use functional::functional;
pub use interface::interface;
pub use time_sbp::time_sbp;
pub use verify_ops::verify_ops;

/// JSON summary printed on stdout and the verdict that sets the exit status.
#[derive(Debug)]
pub struct CommandOutput {
    pub summary: Value,
    pub pass: bool,
}

/// Scientific notation with 17 significant digits and no negative zero.
pub(crate) fn sci(x: f64) -> String {
    format!("{:.16e}", if x == 0.0 { 0.0 } else { x })
}

/// Assembles once with the stability gate closed. Returns whether the
/// penalties are admissible; an inadmissible choice is only accepted when
/// `allow_unstable` is set.
pub(crate) fn check_admissible(
    params: &ProblemParameters,
    build: impl Fn(&ProblemParameters) -> sbpsat::Result<()>,
) -> CliResult<bool> {
    let strict = ProblemParameters {
        allow_unstable: false,
        ..*params
    };
    match build(&strict) {
        Ok(()) => Ok(true),
        Err(sbpsat::Error::InadmissiblePenalty { .. }) if params.allow_unstable => Ok(false),
        Err(e) => Err(e.into()),
    }
}
