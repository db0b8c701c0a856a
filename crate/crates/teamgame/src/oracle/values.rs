use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::game_core::{
    big_to_f64, compute_infosets, compute_pooled_infosets, GameTree, InfoSetPartition, PlayerId, Role,
};
use crate::solver::two_players;

use super::lp::{solve_matrix_game, MatrixGameSolution};
use super::plans::{enumerate_reduced_plans, merge_plans, pure_value, ratio, Plan};
use super::OracleError;

/// Normal-form payoff table: rows are plans of the maximizing playerset,
/// columns plans of the minimizing one, entries the exact chance-averaged
/// payoff summed over `value_players`.
#[derive(Clone, Debug)]
pub struct PlanMatrix {
    pub rows: Vec<Plan>,
    pub cols: Vec<Plan>,
    pub entries: Vec<Vec<BigRational>>,
}

impl PlanMatrix {
    pub fn build(
        game: &GameTree,
        partition: &InfoSetPartition,
        row_players: &[PlayerId],
        col_players: &[PlayerId],
        value_players: &[PlayerId],
        budget: u128,
    ) -> Result<Self, OracleError> {
        let rows = enumerate_reduced_plans(game, partition, row_players, budget)?;
        let cols = enumerate_reduced_plans(game, partition, col_players, budget)?;
        let cells = rows.len() as u128 * cols.len() as u128;
        if cells > budget {
            return Err(OracleError::Budget { projected: cells, budget });
        }
        let mut entries = Vec::with_capacity(rows.len());
        for r in &rows {
            let mut line = Vec::with_capacity(cols.len());
            for c in &cols {
                line.push(pure_value(game, partition, &merge_plans(&[r, c]), value_players)?);
            }
            entries.push(line);
        }
        Ok(PlanMatrix { rows, cols, entries })
    }
}

/// Exact optimality witnesses for a matrix-game solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Every column pays the row mixture at least the value.
    pub row_guarantee: bool,
    /// Every row earns at most the value against the column mixture.
    pub col_guarantee: bool,
    /// A column attaining the minimum against the row mixture.
    pub tight_column: usize,
    /// A row attaining the maximum against the column mixture.
    pub tight_row: usize,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.row_guarantee && self.col_guarantee
    }
}

fn certify(m: &[Vec<BigRational>], s: &MatrixGameSolution) -> Certificate {
    let col_pay: Vec<BigRational> = (0..m[0].len())
        .map(|j| m.iter().zip(&s.row_mixture).fold(BigRational::zero(), |acc, (r, x)| acc + x * &r[j]))
        .collect();
    let row_pay: Vec<BigRational> =
        m.iter().map(|r| r.iter().zip(&s.col_mixture).fold(BigRational::zero(), |acc, (v, y)| acc + v * y)).collect();
    let argmin = (0..col_pay.len()).min_by(|&a, &b| col_pay[a].cmp(&col_pay[b])).unwrap();
    let argmax = (0..row_pay.len()).max_by(|&a, &b| row_pay[a].cmp(&row_pay[b]).then(b.cmp(&a))).unwrap();
    Certificate {
        row_guarantee: col_pay.iter().all(|x| *x >= s.value),
        col_guarantee: row_pay.iter().all(|x| *x <= s.value),
        tight_column: argmin,
        tight_row: argmax,
    }
}

/// Value of a plan-matrix game with its optimal mixtures and witnesses.
#[derive(Clone, Debug)]
pub struct OracleValue {
    pub value: BigRational,
    pub matrix: PlanMatrix,
    pub solution: MatrixGameSolution,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub row: usize,
    pub weight: String,
    pub weight_f64: f64,
    /// (infoset id, action index) pairs of the plan.
    pub plan: Vec<(usize, usize)>,
}

/// JSON-friendly summary of an [`OracleValue`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub value: String,
    pub value_f64: f64,
    pub rows: usize,
    pub cols: usize,
    pub support: Vec<SupportEntry>,
    pub certificate: Certificate,
}

impl OracleValue {
    fn solve(matrix: PlanMatrix) -> Result<Self, OracleError> {
        let solution = solve_matrix_game(&matrix.entries)?;
        let certificate = certify(&matrix.entries, &solution);
        if !certificate.ok() {
            return Err(OracleError::Internal("LP solution failed certification".into()));
        }
        Ok(OracleValue { value: solution.value.clone(), matrix, solution, certificate })
    }

    pub fn value_f64(&self) -> f64 {
        big_to_f64(&self.value)
    }

    /// Row mixture restricted to its support.
    pub fn mixture(&self) -> Vec<(usize, BigRational)> {
        self.solution
            .row_mixture
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| (i, w.clone()))
            .collect()
    }

    pub fn report(&self) -> OracleReport {
        OracleReport {
            value: self.value.to_string(),
            value_f64: self.value_f64(),
            rows: self.matrix.rows.len(),
            cols: self.matrix.cols.len(),
            support: self
                .mixture()
                .into_iter()
                .map(|(row, w)| SupportEntry {
                    row,
                    weight: w.to_string(),
                    weight_f64: big_to_f64(&w),
                    plan: self.matrix.rows[row].iter().enumerate().filter_map(|(s, a)| a.map(|a| (s, a))).collect(),
                })
                .collect(),
            certificate: self.certificate.clone(),
        }
    }
}

fn sides(game: &GameTree) -> Result<(Vec<PlayerId>, Vec<PlayerId>), OracleError> {
    let team = game.team();
    let opp = game.players_with(Role::Opponent);
    if team.is_empty() || opp.is_empty() {
        return Err(OracleError::Argument("need a team and an opponent".into()));
    }
    Ok((team, opp))
}

/// TMECor value: the team's best correlated mixture over joint reduced
/// plans against a best-responding opponent, in summed team payoff.
pub fn tmecor_value(game: &GameTree, budget: u128) -> Result<OracleValue, OracleError> {
    let (team, opp) = sides(game)?;
    let partition = compute_infosets(game)?;
    OracleValue::solve(PlanMatrix::build(game, &partition, &team, &opp, &team, budget)?)
}

/// Value for the first strategic player (the coordinator in transformed
/// games) of a two-player zero-sum game under `partition`.
pub fn ne_value_2p0s(game: &GameTree, partition: &InfoSetPartition, budget: u128) -> Result<OracleValue, OracleError> {
    let [a, b] = two_players(game).map_err(|e| OracleError::Argument(e.to_string()))?;
    OracleValue::solve(PlanMatrix::build(game, partition, &[a], &[b], &[a], budget)?)
}

/// Team value when members pool every observation before acting.
pub fn full_info_value(game: &GameTree, budget: u128) -> Result<OracleValue, OracleError> {
    let (team, opp) = sides(game)?;
    let partition = compute_pooled_infosets(game, &team)?;
    OracleValue::solve(PlanMatrix::build(game, &partition, &team, &opp, &team, budget)?)
}

/// Independent-play (uncorrelated) team value of a two-member team,
/// bracketed by a grid over the first member's mixtures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependentValue {
    /// Best value found on the grid (attained by an actual profile).
    pub lower: f64,
    /// Lower bound plus the Lipschitz gap of the grid.
    pub upper: f64,
    pub grid: usize,
    /// First member's best grid mixture over its reduced plans.
    pub first_member_mixture: Vec<f64>,
}

/// For every grid mixture of the first member, the second member's best
/// mixture is an exact LP. The value is Lipschitz in the first member's
/// mixture with constant range/2 in L1, and every mixture is within L1
/// distance `k / grid` of the grid.
pub fn independent_value(game: &GameTree, grid: usize, budget: u128) -> Result<IndependentValue, OracleError> {
    let (team, opp) = sides(game)?;
    if team.len() != 2 || grid == 0 {
        return Err(OracleError::Argument("independent play needs a two-member team and a positive grid".into()));
    }
    let partition = compute_infosets(game)?;
    let a_plans = enumerate_reduced_plans(game, &partition, &team[..1], budget)?;
    let b_plans = enumerate_reduced_plans(game, &partition, &team[1..], budget)?;
    let o_plans = enumerate_reduced_plans(game, &partition, &opp, budget)?;
    let k = a_plans.len();
    let points = binomial(grid as u128 + k as u128 - 1, k as u128 - 1);
    let cells = (k * b_plans.len() * o_plans.len()) as u128;
    if points.saturating_mul(cells) > budget {
        return Err(OracleError::Budget { projected: points.saturating_mul(cells), budget });
    }
    let mut v = vec![vec![vec![BigRational::zero(); o_plans.len()]; b_plans.len()]; k];
    for (ia, a) in a_plans.iter().enumerate() {
        for (ib, b) in b_plans.iter().enumerate() {
            for (io, o) in o_plans.iter().enumerate() {
                v[ia][ib][io] = pure_value(game, &partition, &merge_plans(&[a, b, o]), &team)?;
            }
        }
    }
    let flat = v.iter().flatten().flatten();
    let max = flat.clone().max().cloned().unwrap();
    let min = flat.min().cloned().unwrap();
    let mut best: Option<(BigRational, Vec<usize>)> = None;
    let mut counts = vec![0usize; k];
    compositions(grid, 0, &mut counts, &mut |c| {
        let w: Vec<BigRational> = c.iter().map(|&x| ratio(x as i64, grid as i64)).collect();
        let m: Vec<Vec<BigRational>> = (0..b_plans.len())
            .map(|ib| {
                (0..o_plans.len())
                    .map(|io| (0..k).fold(BigRational::zero(), |acc, ia| acc + &w[ia] * &v[ia][ib][io]))
                    .collect()
            })
            .collect();
        let s = solve_matrix_game(&m)?;
        if best.as_ref().map_or(true, |(b, _)| s.value > *b) {
            best = Some((s.value, c.to_vec()));
        }
        Ok(())
    })?;
    let (lower, mix) = best.unwrap();
    let gap = (max - min) * ratio(k as i64, 2 * grid as i64);
    Ok(IndependentValue {
        lower: big_to_f64(&lower),
        upper: big_to_f64(&(lower + gap)),
        grid,
        first_member_mixture: mix.iter().map(|&x| x as f64 / grid as f64).collect(),
    })
}

/// Visits every way of writing `left` as an ordered sum of `counts.len()`
/// nonnegative parts.
fn compositions(
    left: usize,
    i: usize,
    counts: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    if i + 1 == counts.len() {
        counts[i] = left;
        return f(counts);
    }
    for x in 0..=left {
        counts[i] = x;
        compositions(left - x, i + 1, counts, f)?;
    }
    Ok(())
}

/// Value as a float, for callers that only need an approximation.
pub fn approx(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
