//! Euler-Satake characteristics of global quotients.
//!
//! Two deliberately independent routes are kept side by side:
//!
//! * [`chi_orb`] sums `(-1)^dim / |stab|` over simplex orbits of a regular
//!   presentation, and
//! * [`chi_orb_oracle`] divides the plain Euler characteristic of the total
//!   complex by the group order.
//!
//! They must agree on every valid input; tests compare them rather than one
//! being implemented in terms of the other.

use crate::error::Result;
use crate::presentation::{map_simplex, QuotientPresentation};
use crate::rational::{rat, rat_int, Rational};
use std::collections::BTreeSet;

/// Orbit-sum route: one term per simplex orbit, weighted by the reciprocal
/// of the vertexwise stabilizer order.
pub fn chi_orb(p: &QuotientPresentation) -> Result<Rational> {
    p.require_regular()?;
    let mut total = rat_int(0);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in &p.complex.simplices {
        let rep = p
            .action
            .elements
            .iter()
            .map(|g| map_simplex(s, &g.vertex_perm))
            .min()
            .expect("group has at least the identity");
        if !seen.insert(rep) {
            continue;
        }
        let stab = p.simplex_stabilizer_order(s) as i64;
        let sign = if (s.len() - 1) % 2 == 0 { 1 } else { -1 };
        total += rat(sign, stab);
    }
    Ok(total)
}

/// Covering-space route: chi of the total space divided by the group order.
pub fn chi_orb_oracle(p: &QuotientPresentation) -> Rational {
    rat(
        p.complex.euler_characteristic(),
        p.action.order() as i64,
    )
}

/// Relative characteristic chi_orb(Q, dQ) = chi_orb(Q) - chi_orb(dQ).
pub fn chi_orb_relative(p: &QuotientPresentation) -> Result<Rational> {
    let boundary = p.boundary()?;
    Ok(chi_orb(p)? - chi_orb(&boundary)?)
}

/// Euler characteristic of the underlying quotient space, counted from orbit
/// cells (an integer, unlike the Satake-weighted count).
pub fn chi_underlying(p: &QuotientPresentation) -> Result<i64> {
    Ok(p.quotient_complex()?.euler_characteristic())
}
