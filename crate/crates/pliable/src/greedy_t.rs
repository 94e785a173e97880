//! The weighted greedy encoder for t-requests.
//!
//! Clients start at weight 1 and halve it on every successful decode, so the
//! transmission process keeps chasing the clients that are furthest from
//! their quota. Rounds sort and group by effective weight: the dyadic
//! boundaries come from the heaviest message W, and messages whose effective
//! weight falls below W/2^⌈log₂ n⌉ land in an overflow group that is never
//! encoded. A client retires exactly when her decoded set reaches t messages.
//!
//! For t = 1 all weights stay 1 and the procedure is the plain greedy encoder
//! of [`crate::greedy`]; this module runs that exact configuration so the two
//! produce identical matrices and logs.

use crate::error::{Error, Result};
use crate::greedy::{run_engine, EncodeResult, EngineOptions, GroupingBase};
use crate::instance::Instance;

pub fn encode_t(inst: &Instance) -> Result<EncodeResult> {
    encode_t_with_options(inst, false)
}

pub fn encode_t_with_options(inst: &Instance, relaxed_unsat: bool) -> Result<EncodeResult> {
    if inst.t() == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let base = if inst.t() == 1 {
        GroupingBase::ActiveCount
    } else {
        GroupingBase::MaxMessageWeight
    };
    run_engine(
        inst,
        EngineOptions {
            t: inst.t(),
            base,
            relaxed_unsat,
        },
    )
}


#[cfg(test)]
mod log_json_tests {
    use super::*;
    use crate::greedy::round_log_json;
    use crate::instance::Instance;

    #[test]
    fn weighted_logs_carry_weight_trajectories() {
        let inst = Instance::new(2, 2, vec![vec![0, 1]]).unwrap();
        let res = encode_t(&inst).unwrap();
        let v = round_log_json(&res, "bingreedy-t");
        assert_eq!(v["weight_scale_log2"], 1);
        assert_eq!(v["rounds"][0]["weights"], serde_json::json!([2]));
        assert_eq!(v["rounds"][0]["total_weight"], 2);
        assert_eq!(v["rounds"][1]["weights"], serde_json::json!([1]));
        assert_eq!(v["rounds"][0]["base"], 2);
        assert_eq!(v["decoded"], serde_json::json!([[1, 2]]));
    }
}
