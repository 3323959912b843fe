//! The attacker/defender routing game and its two-strategy clique instance.
//!
//! Payoff matrices are indexed `[defender][attacker]`, with index 0 for
//! "direct" and 1 for "indirect".

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::GameError;

/// A channel as the utilities see it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameChannel {
    pub id: String,
    pub capacity: f64,
    pub fee: f64,
}

fn intersects(a: &[GameChannel], b: &[GameChannel]) -> bool {
    let ids: HashSet<&str> = a.iter().map(|c| c.id.as_str()).collect();
    b.iter().any(|c| ids.contains(c.id.as_str()))
}

/// `H·δ − I·Σ capacity` over the attacker's channels, where δ is 1 when the
/// defender's path uses one of them.
pub fn attacker_utility(attacker: &[GameChannel], defender: &[GameChannel], h: f64, i: f64) -> f64 {
    let delta = if intersects(attacker, defender) {
        1.0
    } else {
        0.0
    };
    h * delta - i * attacker.iter().map(|c| c.capacity).sum::<f64>()
}

/// `−H·δ − Σ fee` over the defender's path.
pub fn defender_utility(attacker: &[GameChannel], defender: &[GameChannel], h: f64) -> f64 {
    let delta = if intersects(attacker, defender) {
        1.0
    } else {
        0.0
    };
    -h * delta - defender.iter().map(|c| c.fee).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Value at stake.
    pub h: f64,
    /// Liquidity cost per unit of capacity.
    pub i: f64,
    /// Node count of the clique.
    pub v: u32,
    /// Attacker channel budget.
    pub k: u32,
}

impl GameParams {
    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |m: String| Err(GameError::InvalidParams(m));
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad(format!("H must be positive, got {}", self.h));
        }
        if !(self.i.is_finite() && self.i >= 0.0) {
            return bad(format!("I must be nonnegative, got {}", self.i));
        }
        if self.v < 3 {
            return bad(format!("V must be at least 3, got {}", self.v));
        }
        if self.k < 1 || self.k > self.v - 2 {
            return bad(format!("k must lie in 1..={}, got {}", self.v - 2, self.k));
        }
        Ok(())
    }
}

pub type Matrix = [[f64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameMatrices {
    pub defender: Matrix,
    pub attacker: Matrix,
}

/// Mixed strategies as probabilities of playing "direct".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub defender_direct: f64,
    pub attacker_direct: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSolution {
    pub profile: StrategyProfile,
    pub attacker_value: f64,
}

/// Payoffs of the clique game. The defender pays a fee of 1 on the direct
/// channel and 2 on an indirect route; the attacker's channels cost `I`
/// each.
pub fn clique_game_matrices(params: &GameParams) -> Result<GameMatrices, GameError> {
    params.validate()?;
    let GameParams { h, i, v, k } = *params;
    let (k, v) = (k as f64, v as f64);
    let shared = h * (k - 1.0) / (v - 2.0);
    let spread = h * k / (v - 2.0);
    let cost = i * k;
    Ok(GameMatrices {
        defender: [[-h - 1.0, -1.0], [-shared - 2.0, -spread - 2.0]],
        attacker: [[h - cost, 0.0 - cost], [shared - cost, spread - cost]],
    })
}

/// The closed-form solution: the defender plays direct with probability
/// `1/(V−1)`, the attacker with `k/(V−1)`, and the attacker's value is
/// `k·(H/(V−1) − I)`.
pub fn clique_game_solve(params: &GameParams) -> Result<GameSolution, GameError> {
    params.validate()?;
    let GameParams { h, i, v, k } = *params;
    let n = v as f64 - 1.0;
    Ok(GameSolution {
        profile: StrategyProfile {
            defender_direct: 1.0 / n,
            attacker_direct: k as f64 / n,
        },
        attacker_value: k as f64 * (h / n - i),
    })
}

fn mix(p: f64) -> [f64; 2] {
    [p, 1.0 - p]
}

/// Expected payoff of `m` when the defender plays `d` and the attacker `a`.
pub fn expected(m: &Matrix, d: [f64; 2], a: [f64; 2]) -> f64 {
    (0..2)
        .map(|r| (0..2).map(|c| d[r] * a[c] * m[r][c]).sum::<f64>())
        .sum()
}

/// How much each player gains by switching to their best pure strategy:
/// `(defender, attacker)`, both nonnegative.
pub fn deviation_gains(m: &GameMatrices, profile: &StrategyProfile) -> (f64, f64) {
    let (d, a) = (mix(profile.defender_direct), mix(profile.attacker_direct));
    let ud = expected(&m.defender, d, a);
    let ua = expected(&m.attacker, d, a);
    let pure = |j: usize| {
        let mut e = [0.0; 2];
        e[j] = 1.0;
        e
    };
    let best_d = (0..2)
        .map(|r| expected(&m.defender, pure(r), a))
        .fold(f64::NEG_INFINITY, f64::max);
    let best_a = (0..2)
        .map(|c| expected(&m.attacker, d, pure(c)))
        .fold(f64::NEG_INFINITY, f64::max);
    ((best_d - ud).max(0.0), (best_a - ua).max(0.0))
}

/// Whether neither player gains more than `eps` by a pure deviation, and
/// a player mixing strictly is indifferent to within `eps` between the
/// pure strategies they mix.
pub fn verify_equilibrium(m: &GameMatrices, profile: &StrategyProfile, eps: f64) -> bool {
    let (p, q) = (profile.defender_direct, profile.attacker_direct);
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return false;
    }
    let (gd, ga) = deviation_gains(m, profile);
    if gd > eps || ga > eps {
        return false;
    }
    let (d, a) = (mix(p), mix(q));
    let rows = [
        expected(&m.defender, [1.0, 0.0], a),
        expected(&m.defender, [0.0, 1.0], a),
    ];
    let cols = [
        expected(&m.attacker, d, [1.0, 0.0]),
        expected(&m.attacker, d, [0.0, 1.0]),
    ];
    let interior = |x: f64| x > 0.0 && x < 1.0;
    !(interior(p) && (rows[0] - rows[1]).abs() > eps)
        && !(interior(q) && (cols[0] - cols[1]).abs() > eps)
}

/// Nash equilibria of a 2×2 bimatrix game: every pure equilibrium, then
/// the completely mixed one when it exists. A player indifferent across
/// every profile contributes only pure equilibria.
pub fn solve_bimatrix_2x2(m: &GameMatrices) -> Vec<StrategyProfile> {
    let (d, a) = (&m.defender, &m.attacker);
    let mut out = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            if d[r][c] >= d[1 - r][c] && a[r][c] >= a[r][1 - c] {
                out.push(StrategyProfile {
                    defender_direct: if r == 0 { 1.0 } else { 0.0 },
                    attacker_direct: if c == 0 { 1.0 } else { 0.0 },
                });
            }
        }
    }
    // The defender's mix leaves the attacker indifferent, and vice versa.
    let den_p = a[0][0] - a[1][0] - a[0][1] + a[1][1];
    let den_q = d[0][0] - d[0][1] - d[1][0] + d[1][1];
    if den_p != 0.0 && den_q != 0.0 {
        let p = (a[1][1] - a[1][0]) / den_p;
        let q = (d[1][1] - d[0][1]) / den_q;
        if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
            out.push(StrategyProfile {
                defender_direct: p,
                attacker_direct: q,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_solution_of_matching_pennies() {
        let m = GameMatrices {
            defender: [[1.0, -1.0], [-1.0, 1.0]],
            attacker: [[-1.0, 1.0], [1.0, -1.0]],
        };
        let eq = solve_bimatrix_2x2(&m);
        assert_eq!(eq.len(), 1);
        assert!((eq[0].defender_direct - 0.5).abs() < 1e-15);
        assert!((eq[0].attacker_direct - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coordination_game_has_three_equilibria() {
        let m = GameMatrices {
            defender: [[2.0, 0.0], [0.0, 1.0]],
            attacker: [[1.0, 0.0], [0.0, 2.0]],
        };
        let eq = solve_bimatrix_2x2(&m);
        assert_eq!(eq.len(), 3);
        assert!(eq.iter().all(|p| verify_equilibrium(&m, p, 1e-12)));
    }

    #[test]
    fn invalid_params() {
        for (h, i, v, k) in [
            (0.0, 0.0, 5, 1),
            (1.0, -1.0, 5, 1),
            (1.0, 0.0, 2, 1),
            (1.0, 0.0, 5, 0),
            (1.0, 0.0, 5, 4),
        ] {
            assert!(clique_game_solve(&GameParams { h, i, v, k }).is_err());
        }
    }
}
