//! Forcing with conditions `σ = τ b`: `τ` lists member indices and some
//! `x ≤ b` lies in every listed member.

use crate::error::{Error, Result};
use crate::families::{Family, SubfamilyIndex};

/// A user-supplied dense set: maps a condition to an extension, or declines.
pub type DenseOracle = Box<dyn Fn(&Family, &[u64]) -> Option<Vec<u64>>>;

fn body(sigma: &[u64]) -> &[u64] {
    &sigma[..sigma.len().saturating_sub(1)]
}

fn joint_below(fam: &Family, idx: &[u64], bound: u64) -> Option<u64> {
    let idx: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
    let Some((&first, rest)) = idx.split_first() else { return Some(0).filter(|&z| z <= bound) };
    fam.members()[first].range(..=bound).copied().find(|x| rest.iter().all(|&j| fam.members()[j].contains(x)))
}

pub fn is_condition(fam: &Family, sigma: &[u64]) -> bool {
    let Some(&b) = sigma.last() else { return false };
    let t = body(sigma);
    t.iter().all(|&i| (i as usize) < fam.len() && i < u64::MAX) && joint_below(fam, t, b).is_some()
}

/// `new` extends `old` when its index list extends the old one.
pub fn extends(new: &[u64], old: &[u64]) -> bool {
    !new.is_empty() && body(new).starts_with(body(old))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcingRun {
    pub conditions: Vec<Vec<u64>>,
    pub indices: SubfamilyIndex,
}

/// Alternates the listed dense sets with the built-in maximality steps.
pub fn forcing_generic(fam: &Family, dense: &[DenseOracle], steps: usize) -> Result<ForcingRun> {
    let start = (0..fam.len())
        .find(|&i| !fam.members()[i].is_empty())
        .ok_or_else(|| Error::BadInput("family is trivial".into()))?;
    let w0 = *fam.members()[start].first().expect("nonempty");
    let mut sigma = vec![start as u64, w0];
    let mut conditions = vec![sigma.clone()];
    for e in 0..steps {
        if let Some(oracle) = dense.get(e) {
            if let Some(next) = oracle(fam, &sigma) {
                if !is_condition(fam, &next) {
                    return Err(Error::BadDenseOracle { oracle: e, reason: format!("{next:?} is not a condition") });
                }
                if !extends(&next, &sigma) {
                    return Err(Error::BadDenseOracle { oracle: e, reason: format!("{next:?} does not extend {sigma:?}") });
                }
                sigma = next;
                conditions.push(sigma.clone());
            }
        }
        let t = body(&sigma);
        if e < fam.len() && !t.contains(&(e as u64)) {
            let mut idx = t.to_vec();
            idx.push(e as u64);
            if let Some(x) = joint_below(fam, &idx, fam.horizon()) {
                idx.push(x);
                sigma = idx;
                conditions.push(sigma.clone());
            }
        }
    }
    let mut indices = Vec::new();
    for &i in body(&sigma) {
        if !indices.contains(&(i as usize)) {
            indices.push(i as usize);
        }
    }
    Ok(ForcingRun { conditions, indices: SubfamilyIndex::new(indices) })
}
