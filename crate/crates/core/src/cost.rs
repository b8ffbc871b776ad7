//! Integer cost arithmetic with an absorbing "unreachable" value.

/// Deadheading, serving and route costs. Doubles as simulated time (unit speed).
pub type Cost = u64;

/// Vehicle loads and task demands.
pub type Demand = u64;

/// Marks a vertex pair with no open path. Absorbing under [`add`].
pub const UNREACHABLE: Cost = Cost::MAX;

/// Saturating addition where [`UNREACHABLE`] poisons the result.
#[inline]
pub fn add(a: Cost, b: Cost) -> Cost {
    if a == UNREACHABLE || b == UNREACHABLE {
        UNREACHABLE
    } else {
        a.saturating_add(b).min(UNREACHABLE - 1)
    }
}

#[inline]
pub fn is_reachable(c: Cost) -> bool {
    c != UNREACHABLE
}

/// Signed difference `after - before` between two finite costs.
#[inline]
pub(crate) fn delta(after: Cost, before: Cost) -> i64 {
    after as i64 - before as i64
}
