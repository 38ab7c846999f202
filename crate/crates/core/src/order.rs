//! Essential suprema and infima, with monotone approximation for directed
//! families.
//!
//! Finite families are handled exactly (cellwise extrema plus symbolic tail
//! joins). Countable families arrive as deterministic, restartable
//! enumerators and get bracketed to a requested tolerance; every bracket
//! carries a certificate stating exactly what was verified.

use crate::error::{Error, Result};
use crate::report::Scope;
use crate::rv::{CompareMode, LatticeOp, RandomVariable};
use crate::scalar::Scalar;

/// Exact essential supremum of a nonempty finite family.
pub fn esssup<T: Scalar>(family: &[RandomVariable<T>]) -> Result<RandomVariable<T>> {
    fold_lattice(family, LatticeOp::Join)
}

/// Exact essential infimum of a nonempty finite family.
pub fn essinf<T: Scalar>(family: &[RandomVariable<T>]) -> Result<RandomVariable<T>> {
    fold_lattice(family, LatticeOp::Meet)
}

fn fold_lattice<T: Scalar>(
    family: &[RandomVariable<T>],
    op: LatticeOp,
) -> Result<RandomVariable<T>> {
    let (first, rest) = family.split_first().ok_or(Error::EmptyFamily)?;
    let mut acc = first.clone();
    for rv in rest {
        acc = acc.lattice(rv, op)?;
    }
    Ok(acc)
}

/// What a countable-family bracket certifies.
#[derive(Debug, Clone)]
pub struct SupBracket<T> {
    /// Last enumerated member (a true lower bound for the supremum).
    pub lower: RandomVariable<T>,
    /// Verified upper bound when one is available.
    pub upper: Option<RandomVariable<T>>,
    pub certificate: MonotoneCertificate,
}

#[derive(Debug, Clone)]
pub struct MonotoneCertificate {
    /// Members enumerated before the stopping rule fired.
    pub iterations: usize,
    /// Y_1 ≤ Y_2 ≤ … verified exactly on every consumed pair.
    pub monotone_verified: bool,
    /// The enumerator reproduced its first member when restarted.
    pub determinism_verified: bool,
    /// Exact when a dominating bound was supplied and verified; otherwise the
    /// bracket only speaks for the enumerated prefix.
    pub scope: Scope,
}

pub struct EnumerationLimits<T> {
    pub max_iterations: usize,
    /// Caller-supplied dominator of the whole family; verified against every
    /// enumerated member.
    pub bound_hint: Option<RandomVariable<T>>,
}

impl<T> Default for EnumerationLimits<T> {
    fn default() -> Self {
        EnumerationLimits { max_iterations: 1 << 16, bound_hint: None }
    }
}

/// Brackets the essential supremum of a nondecreasing enumerated family.
///
/// With a verified bound hint the bracket [Y_n, hint] closes to width ≤ tol
/// and the certificate is exact; without one, enumeration stops once the
/// increments fall below tol and the result is tagged prefix-only.
pub fn esssup_enumerated<T, F>(
    enumerate: F,
    tol: &T,
    limits: EnumerationLimits<T>,
) -> Result<SupBracket<T>>
where
    T: Scalar,
    F: Fn(usize) -> RandomVariable<T>,
{
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be > 0".into()));
    }
    let first = enumerate(1);
    let algebra = first.algebra().clone();
    let tol_rv = RandomVariable::constant(&algebra, tol.clone());
    if let Some(hint) = &limits.bound_hint {
        if !hint.compare_realized(&first, CompareMode::Geq)? {
            return Err(Error::OracleViolation(
                "bound hint does not dominate the first member".into(),
            ));
        }
    }

    let mut prev = first.clone();
    let mut iterations = 1usize;
    let mut closed = false;
    loop {
        // hint-based stop: hint - Y_n ≤ tol on every realized cell
        if let Some(hint) = &limits.bound_hint {
            let gap = hint.sub(&prev)?;
            if gap.compare_realized(&tol_rv, CompareMode::Geq).is_ok()
                && tol_rv.compare_realized(&gap, CompareMode::Geq)?
            {
                closed = true;
                break;
            }
        }
        if iterations >= limits.max_iterations {
            if limits.bound_hint.is_some() {
                return Err(Error::PrefixInsufficient(format!(
                    "bracket not closed after {iterations} members"
                )));
            }
            break;
        }
        let next = enumerate(iterations + 1);
        if !next.compare_realized(&prev, CompareMode::Geq)? {
            return Err(Error::OracleViolation(format!(
                "enumerator not nondecreasing at index {}",
                iterations + 1
            )));
        }
        if let Some(hint) = &limits.bound_hint {
            if !hint.compare_realized(&next, CompareMode::Geq)? {
                return Err(Error::OracleViolation(format!(
                    "bound hint violated by member {}",
                    iterations + 1
                )));
            }
        }
        // increment-based stop for hintless enumeration
        let increment_small = {
            let inc = next.sub(&prev)?;
            tol_rv.compare_realized(&inc, CompareMode::Geq)?
        };
        prev = next;
        iterations += 1;
        if limits.bound_hint.is_none() && increment_small && iterations >= 2 {
            break;
        }
    }

    let determinism_verified = enumerate(1).eq_realized(&first)?;
    if !determinism_verified {
        return Err(Error::OracleViolation("enumerator is not deterministic".into()));
    }

    let (upper, scope) = if closed {
        (limits.bound_hint.clone(), Scope::Exact)
    } else {
        let blocks = algebra
            .space()
            .as_dyadic()
            .map(|d| d.block_count())
            .unwrap_or(0);
        (None, Scope::PrefixOnly { blocks })
    };

    Ok(SupBracket {
        lower: prev,
        upper,
        certificate: MonotoneCertificate {
            iterations,
            monotone_verified: true,
            determinism_verified,
            scope,
        },
    })
}

/// Bracket for an enumerated essential infimum: the last member certifies
/// the upper end, a verified bound hint the lower one.
#[derive(Debug, Clone)]
pub struct InfBracket<T> {
    pub upper: RandomVariable<T>,
    pub lower: Option<RandomVariable<T>>,
    pub certificate: MonotoneCertificate,
}

/// Brackets the essential infimum of a nonincreasing enumerated family by
/// negating through `esssup_enumerated`.
pub fn essinf_enumerated<T, F>(
    enumerate: F,
    tol: &T,
    limits: EnumerationLimits<T>,
) -> Result<InfBracket<T>>
where
    T: Scalar,
    F: Fn(usize) -> RandomVariable<T>,
{
    let negated_limits = EnumerationLimits {
        max_iterations: limits.max_iterations,
        bound_hint: limits.bound_hint.map(|h| h.neg()),
    };
    let bracket = esssup_enumerated(|n| enumerate(n).neg(), tol, negated_limits)?;
    Ok(InfBracket {
        upper: bracket.lower.neg(),
        lower: bracket.upper.map(|u| u.neg()),
        certificate: bracket.certificate,
    })
}

/// Monotone approximation of the essential supremum of a finite directed
/// family: builds Y_1 ≤ Y_2 ≤ … inside the family using the caller's
/// dominator oracle, ending exactly at the supremum.
pub fn monotone_approximation<T, D>(
    family: &[RandomVariable<T>],
    dominate: D,
) -> Result<Vec<RandomVariable<T>>>
where
    T: Scalar,
    D: Fn(&RandomVariable<T>, &RandomVariable<T>) -> Result<RandomVariable<T>>,
{
    let (first, rest) = family.split_first().ok_or(Error::EmptyFamily)?;
    let mut chain = vec![first.clone()];
    let mut current = first.clone();
    for member in rest {
        let next = dominate(&current, member)?;
        let mut in_family = false;
        for candidate in family {
            if next.eq_realized(candidate)? {
                in_family = true;
                break;
            }
        }
        if !in_family {
            return Err(Error::OracleViolation(
                "dominator returned an element outside the family".into(),
            ));
        }
        if !next.compare_realized(&current, CompareMode::Geq)?
            || !next.compare_realized(member, CompareMode::Geq)?
        {
            return Err(Error::OracleViolation(
                "dominator result does not dominate both inputs".into(),
            ));
        }
        chain.push(next.clone());
        current = next;
    }
    // the final element dominates every member and lies in the family, so it
    // equals the essential supremum; keep the exact cross-check
    let sup = esssup(family)?;
    debug_assert!(current.eq_realized(&sup)?);
    let _ = sup;
    Ok(chain)
}

/// Monotone approximation for an enumerated directed family: the chain
/// Z_k = dominate(Z_{k-1}, Y_k) climbs through the family until it sits
/// within tol of the verified bound.
pub fn monotone_approximation_enumerated<T, F, D>(
    enumerate: F,
    dominate: D,
    tol: &T,
    bound: &RandomVariable<T>,
    max_iterations: usize,
) -> Result<Vec<RandomVariable<T>>>
where
    T: Scalar,
    F: Fn(usize) -> RandomVariable<T>,
    D: Fn(&RandomVariable<T>, &RandomVariable<T>) -> Result<RandomVariable<T>>,
{
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be > 0".into()));
    }
    let mut current = enumerate(1);
    let algebra = current.algebra().clone();
    let tol_rv = RandomVariable::constant(&algebra, tol.clone());
    let mut chain = vec![current.clone()];
    for k in 2..=max_iterations {
        if !bound.compare_realized(&current, CompareMode::Geq)? {
            return Err(Error::OracleViolation("bound violated by the chain".into()));
        }
        let gap = bound.sub(&current)?;
        if tol_rv.compare_realized(&gap, CompareMode::Geq)? {
            return Ok(chain);
        }
        let next = dominate(&current, &enumerate(k))?;
        if !next.compare_realized(&current, CompareMode::Geq)? {
            return Err(Error::OracleViolation(
                "dominator result does not dominate the chain".into(),
            ));
        }
        chain.push(next.clone());
        current = next;
    }
    Err(Error::PrefixInsufficient(format!(
        "chain not within tolerance after {max_iterations} members"
    )))
}
