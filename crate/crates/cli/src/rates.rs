use serde::Serialize;
use serde_json::{json, Value};

use zeno_core::perturbation::{
    gamma1, gamma2, gamma2_with, p_ab, p_b, p_tpa, two_level_probs, CouplingParams, DetuningEnergy,
};
use zeno_core::Error;

/// θt beyond which the short-time expansions are not trusted.
pub const SHORT_TIME_LIMIT: f64 = 0.01;

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

fn complex(z: num_complex::Complex64) -> Complex {
    Complex { re: z.re, im: z.im }
}

fn or_null<T: Serialize>(r: zeno_core::Result<T>) -> Result<Value, Error> {
    match r {
        Ok(v) => Ok(serde_json::to_value(v)?),
        Err(Error::Singular(_)) => Ok(Value::Null),
        Err(e) => Err(e),
    }
}

/// Every closed-form quantity for one parameter set. Quantities singular at
/// `Δ = 0` are reported as `null` with `singular: true`.
pub fn report(p: &CouplingParams, omega: f64) -> Result<Value, Error> {
    p.validate()?;
    let singular = p.delta == 0.0;
    let two = two_level_probs(p)?;
    let theta_t = p.theta * p.t;
    Ok(json!({
        "inputs": p,
        "singular": singular,
        "gamma1": or_null(gamma1(p))?,
        "gamma2": or_null(gamma2(p))?,
        "gamma2_delta_omega": or_null(gamma2_with(p, DetuningEnergy::DeltaTimesOmega { omega }))?,
        "p_B": complex(p_b(p)),
        "p_AB": complex(p_ab(p)),
        "p_TPA": or_null(p_tpa(p).map(complex))?,
        "P_B": p_b(p).norm_sqr(),
        "P_AB": p_ab(p).norm_sqr(),
        "P_TPA": or_null(p_tpa(p).map(|z| z.norm_sqr()))?,
        "dP_B_dt": 2.0 * p.theta * p.theta * p.t,
        "P_lambda": two.P_lambda,
        "P_theta": two.P_theta,
        "ratio": two.ratio,
        "regime": {
            "lambda_over_theta": (p.theta != 0.0).then(|| p.lambda / p.theta),
            "theta_t": theta_t,
            "short_time": theta_t <= SHORT_TIME_LIMIT,
        },
    }))
}
