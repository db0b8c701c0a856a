use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::TransformError;

fn check(omega: usize, team: usize, actions: usize) -> Result<(), TransformError> {
    if team < 1 || actions < 1 {
        return Err(TransformError::Argument("|T| and |A| must be at least 1".into()));
    }
    if team > omega {
        return Err(TransformError::Argument(format!("|T| = {team} exceeds |Ω| = {omega}")));
    }
    Ok(())
}

/// R = (|Ω|-1)! / (|Ω|-|T|)!, the number of teammate assignments.
fn assignments(omega: usize, team: usize) -> BigUint {
    ((omega - team + 1)..omega).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// MPTA episode size by direct summation: Σ_{n=1..|T|} R^n (|A|^{n-1} + |A|^n).
pub fn mpta_episode_size(omega: usize, team: usize, actions: usize) -> Result<BigUint, TransformError> {
    check(omega, team, actions)?;
    let r = assignments(omega, team);
    let a = BigUint::from(actions);
    let mut total = BigUint::zero();
    for n in 1..=team as u32 {
        total += r.pow(n) * (a.pow(n - 1) + a.pow(n));
    }
    Ok(total)
}

/// Geometric-series form (1+|A|) R ((|A|R)^|T| - 1) / (|A|R - 1), with the
/// |A|R = 1 case handled as |T| (1+|A|) R.
pub fn mpta_episode_size_closed(omega: usize, team: usize, actions: usize) -> Result<BigUint, TransformError> {
    check(omega, team, actions)?;
    let r = assignments(omega, team);
    let a = BigUint::from(actions);
    let q = &a * &r;
    let one = BigUint::one();
    if q == one {
        return Ok(BigUint::from(team) * (&one + &a) * r);
    }
    Ok((&one + &a) * &r * (q.pow(team as u32) - &one) / (q - one))
}

/// TPICA episode size by direct summation: 2 Σ_{n=1..|T|} (|A|^|Ω|)^n.
pub fn tpica_episode_size(omega: usize, team: usize, actions: usize) -> Result<BigUint, TransformError> {
    check(omega, team, actions)?;
    let p = BigUint::from(actions).pow(omega as u32);
    let mut total = BigUint::zero();
    for n in 1..=team as u32 {
        total += p.pow(n);
    }
    Ok(total * 2u32)
}

/// 2 |A|^|Ω| ((|A|^|Ω|)^|T| - 1) / (|A|^|Ω| - 1), or 2 |T| when |A| = 1.
pub fn tpica_episode_size_closed(omega: usize, team: usize, actions: usize) -> Result<BigUint, TransformError> {
    check(omega, team, actions)?;
    let p = BigUint::from(actions).pow(omega as u32);
    let one = BigUint::one();
    if p == one {
        return Ok(BigUint::from(2 * team));
    }
    Ok(BigUint::from(2u32) * &p * (p.pow(team as u32) - &one) / (p - one))
}
