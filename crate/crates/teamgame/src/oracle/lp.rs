use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::OracleError;

/// Optimal strategies of a zero-sum matrix game (rows maximize).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGameSolution {
    pub value: BigRational,
    pub row_mixture: Vec<BigRational>,
    pub col_mixture: Vec<BigRational>,
    pub pivots: usize,
}

/// Solves `max_x min_j (x^T M)_j` exactly with a dense tableau simplex and
/// Bland's rule. The payoffs are shifted positive, then
/// `max 1^T z s.t. M z <= 1, z >= 0` is solved from the slack basis; the
/// row mixture comes from the slack reduced costs.
pub fn solve_matrix_game(m: &[Vec<BigRational>]) -> Result<MatrixGameSolution, OracleError> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(OracleError::Argument("matrix must be non-empty and rectangular".into()));
    }
    let min = m.iter().flatten().min().cloned().unwrap();
    let shift = BigRational::one() - min;
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    for (i, r) in m.iter().enumerate() {
        let mut row = vec![BigRational::zero(); width];
        for (j, x) in r.iter().enumerate() {
            row[j] = x + &shift;
        }
        row[cols + i] = BigRational::one();
        row[rhs] = BigRational::one();
        t.push(row);
    }
    let mut obj = vec![BigRational::zero(); width];
    for x in obj.iter_mut().take(cols) {
        *x = -BigRational::one();
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    let mut pivots = 0;
    loop {
        let Some(e) = (0..rhs).find(|&j| obj[j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..rows {
            if t[i][e].is_positive() {
                let q = &t[i][rhs] / &t[i][e];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => q < *best || (q == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, q));
                }
            }
        }
        let Some((l, _)) = leave else {
            return Err(OracleError::Internal("unbounded matrix-game LP".into()));
        };
        pivot(&mut t, &mut obj, l, e);
        basis[l] = e;
        pivots += 1;
    }
    let total = obj[rhs].clone();
    if !total.is_positive() {
        return Err(OracleError::Internal("degenerate matrix-game LP optimum".into()));
    }
    let mut col_mixture = vec![BigRational::zero(); cols];
    for (i, &b) in basis.iter().enumerate() {
        if b < cols {
            col_mixture[b] = &t[i][rhs] / &total;
        }
    }
    let row_mixture = (0..rows).map(|i| &obj[cols + i] / &total).collect();
    let value = total.recip() - shift;
    Ok(MatrixGameSolution { value, row_mixture, col_mixture, pivots })
}

fn pivot(t: &mut [Vec<BigRational>], obj: &mut [BigRational], l: usize, e: usize) {
    let p = t[l][e].clone();
    for x in t[l].iter_mut() {
        if !x.is_zero() {
            *x = &*x / &p;
        }
    }
    let prow = t[l].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
    for (i, row) in t.iter_mut().enumerate() {
        if i == l || row[e].is_zero() {
            continue;
        }
        let f = row[e].clone();
        for &j in &nz {
            row[j] = &row[j] - &f * &prow[j];
        }
    }
    if !obj[e].is_zero() {
        let f = obj[e].clone();
        for &j in &nz {
            obj[j] = &obj[j] - &f * &prow[j];
        }
    }
}
