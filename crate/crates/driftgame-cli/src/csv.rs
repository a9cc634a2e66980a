//! CSV row formatting. Floats print with 17 significant digits so every
//! value round-trips bit-exactly; rows are assembled into one buffer and
//! written in a single call, which keeps output bytes independent of
//! thread count.

use driftgame::engine::Variant;

pub const RUN_HEADER: &str =
    "variant,T,N,gamma,theta,seed,loss,minSlack,upperMain,lowerMain,retriesTotal";

pub const SWEEP_HEADER: &str =
    "variant,T,N,gamma,theta,seed,loss,minSlack,upperMain,lowerMain,retriesTotal,meanLoss,gap,slope";

pub fn float_field(x: f64) -> String {
    format!("{x:.16e}")
}

#[allow(clippy::too_many_arguments)]
pub fn run_row(
    variant: Variant,
    horizon: u32,
    n_chips: usize,
    gamma: f64,
    theta: f64,
    seed: u64,
    loss: f64,
    min_slack: f64,
    upper_main: f64,
    lower_main: f64,
    retries: u64,
) -> String {
    format!(
        "{variant},{horizon},{n_chips},{},{},{seed},{},{},{},{},{retries}",
        float_field(gamma),
        float_field(theta),
        float_field(loss),
        float_field(min_slack),
        float_field(upper_main),
        float_field(lower_main),
    )
}
