//! Per-hop fee and weight formulas.

use std::hash::Hasher;

use siphasher::sip::SipHasher24;

use super::{
    Bounds, CLightningParams, EclairParams, LndParams, Normalization, Orientation, SuggestedParams,
};
use crate::graph::{Channel, ChannelIndex, ChannelPolicy, Direction, Msat};
use crate::routing::FailureMemory;

/// `base_fee + amount * prop_fee / 1e6`, proportional part rounded half up.
pub fn channel_fee(policy: &ChannelPolicy, forwarded_amount: Msat) -> Msat {
    let prop = (forwarded_amount as u128 * policy.prop_fee as u128 + 500_000) / 1_000_000;
    policy
        .base_fee
        .saturating_add(prop.min(u64::MAX as u128) as u64)
}

/// lnd's success estimate for one channel direction.
///
/// Zero for an hour after a failure, then `apriori - apriori / 2^t` where
/// `t` is the number of hours past that first hour.
pub fn lnd_edge_probability(
    memory: &FailureMemory,
    channel: ChannelIndex,
    direction: Direction,
    now: u64,
    apriori: f64,
) -> f64 {
    match memory.last_failure(channel, direction) {
        None => apriori,
        Some(at) => {
            let hours = now.saturating_sub(at) as f64 / 3600.0;
            if hours < 1.0 {
                0.0
            } else {
                apriori - apriori / (hours - 1.0).exp2()
            }
        }
    }
}

/// `amount * delay * risk_factor + fee`, plus `100 / probability` when the
/// penalty is enabled. Infinite when the penalty applies to a zero
/// probability.
pub fn lnd_weight(
    policy: &ChannelPolicy,
    forwarded_amount: Msat,
    probability: f64,
    params: &LndParams,
) -> f64 {
    let fee = channel_fee(policy, forwarded_amount) as f64;
    let mut w = forwarded_amount as f64 * policy.delay as f64 * params.risk_factor + fee;
    if params.probability_penalty {
        if probability <= 0.0 {
            return f64::INFINITY;
        }
        w += 100.0 / probability;
    }
    w
}

/// Keyed 64-bit hash of a channel id. Numeric short channel ids hash their
/// integer value; other ids hash their bytes.
fn channel_hash(salt: u64, channel_id: &str) -> u64 {
    let mut h = SipHasher24::new_with_keys(salt, 0);
    match channel_id.parse::<u64>() {
        Ok(scid) => h.write(&scid.to_le_bytes()),
        Err(_) => h.write(channel_id.as_bytes()),
    }
    h.finish()
}

/// `1 + fuzz * (2 h / (2^64 - 1) - 1)` for `h` the salted channel hash.
pub fn clightning_scale(salt: u64, channel_id: &str, fuzz: f64) -> f64 {
    if fuzz == 0.0 {
        return 1.0;
    }
    let h = channel_hash(salt, channel_id);
    let unit = (2.0 * (h as f64 / u64::MAX as f64) - 1.0).clamp(-1.0, 1.0);
    1.0 + fuzz * unit
}

/// `(amount + scale * fee) * delay * risk_factor + 1`.
pub fn clightning_weight(
    policy: &ChannelPolicy,
    forwarded_amount: Msat,
    scale: f64,
    params: &CLightningParams,
) -> f64 {
    let fee = scale * channel_fee(policy, forwarded_amount) as f64;
    (forwarded_amount as f64 + fee) * policy.delay as f64 * params.risk_factor + 1.0
}

/// Linear clamp of `x` into `[0, 1]` over `bounds`, flipped when descending.
pub fn normalize(x: f64, bounds: Bounds, orientation: Orientation) -> f64 {
    let t = ((x - bounds.lower) / (bounds.upper - bounds.lower)).clamp(0.0, 1.0);
    match orientation {
        Orientation::Ascending => t,
        Orientation::Descending => 1.0 - t,
    }
}

pub(crate) struct Normalized {
    pub delay: f64,
    pub capacity: f64,
    pub age: f64,
}

pub(crate) fn normalized(
    channel: &Channel,
    delay: u32,
    current_height: u32,
    n: &Normalization,
) -> Normalized {
    let age = current_height.saturating_sub(channel.height) as f64;
    Normalized {
        delay: normalize(delay as f64, n.delay, n.delay_orientation),
        capacity: normalize(
            channel.capacity_sat() as f64,
            n.capacity,
            n.capacity_orientation,
        ),
        age: normalize(age, n.age, n.age_orientation),
    }
}

/// The multiplier Eclair applies to a hop's fee.
pub fn eclair_factor(
    channel: &Channel,
    direction: Direction,
    current_height: u32,
    params: &EclairParams,
) -> f64 {
    let delay = channel.policy(direction).delay;
    eclair_factor_with_delay(channel, delay, current_height, params)
}

pub(crate) fn eclair_factor_with_delay(
    channel: &Channel,
    delay: u32,
    current_height: u32,
    params: &EclairParams,
) -> f64 {
    let x = normalized(channel, delay, current_height, &params.normalization);
    x.delay * params.delay_ratio + x.capacity * params.capacity_ratio + x.age * params.age_ratio
}

/// `fee * (delay * delay_ratio + capacity * capacity_ratio + age * age_ratio)`
/// over normalized factors.
pub fn eclair_weight(
    channel: &Channel,
    direction: Direction,
    forwarded_amount: Msat,
    current_height: u32,
    params: &EclairParams,
) -> f64 {
    let fee = channel_fee(channel.policy(direction), forwarded_amount) as f64;
    fee * eclair_factor(channel, direction, current_height, params)
}

/// The additive terms of the suggested weight other than the fee ratio.
pub(crate) fn suggested_base(
    channel: &Channel,
    delay: u32,
    current_height: u32,
    params: &SuggestedParams,
) -> f64 {
    let x = normalized(channel, delay, current_height, &params.normalization);
    let age = current_height.saturating_sub(channel.height) as f64;
    x.delay * params.delay_ratio + x.age * params.age_ratio
        - x.capacity * params.capacity_ratio
        - channel.capacity_sat() as f64 * age * params.interest_ratio
}

/// `scale * (delay * delay_ratio + age * age_ratio - capacity * capacity_ratio
/// - capacity_sat * age_blocks * interest_ratio + fee / amount * fee_ratio)`.
///
/// The value may be negative; route search clamps each hop at zero.
pub fn suggested_weight(
    channel: &Channel,
    direction: Direction,
    forwarded_amount: Msat,
    current_height: u32,
    scale: f64,
    params: &SuggestedParams,
) -> f64 {
    let policy = channel.policy(direction);
    let fee = channel_fee(policy, forwarded_amount) as f64;
    let base = suggested_base(channel, policy.delay, current_height, params);
    scale * (base + fee / forwarded_amount as f64 * params.fee_ratio)
}
