//! Instance parameters, cyclic difference arithmetic, and the star block type
//! shared by every construction stage.
//!
//! An instance is an odd star size `n >= 3` together with a vertex count `v`.
//! A decomposition of `K_v` into one 1-factor and `n`-star factors can only
//! exist when `v = n(n+1)k' + 2(n+1)` for some `k' >= 0`; every other quantity
//! used by the constructions is derived from `n` and `k'`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Congruence, Error, Result};

/// Vertex label. Labels are always `0..V` for the ambient vertex count `V`.
pub type Vertex = u32;

/// Every derived quantity for one admissible `(n, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    /// Star size (number of leaves), odd and at least 3.
    pub n: u32,
    /// `v = n(n+1)k' + 2(n+1)`.
    pub k_prime: u32,
    /// Number of vertices of the complete graph.
    pub v: u32,
    /// Number of points of the contracted graph, `v / (n+1)`.
    pub g: u32,
    /// `k' = 2k + 1` or `k' = 2k`.
    pub k: u32,
    /// `n = 2q + 1`.
    pub q: u32,
    /// Largest cyclic difference on `g` points.
    pub mu: u32,
    /// Representative of `mu + 1` modulo `n + 1`, taken in `1..=n+1`.
    pub w: u32,
    /// Order of the little star, `g mod (n+1)`.
    pub t: u32,
    /// Number of star factors, `(v-2)(n+1) / 2n`.
    pub s: u32,
}

impl Params {
    /// `n + 1`, the number of vertices in one star.
    pub fn block(&self) -> u32 {
        self.n + 1
    }

    pub fn k_prime_is_odd(&self) -> bool {
        self.k_prime % 2 == 1
    }

    /// Stars in one star factor on `v` vertices.
    pub fn stars_per_factor(&self) -> u32 {
        self.v / self.block()
    }

    /// Largest difference strictly below the 1-factor difference `v/2`.
    pub fn max_star_difference(&self) -> u32 {
        (self.v - 2) / 2
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} v={} k'={} g={} s={} t={}",
            self.n, self.v, self.k_prime, self.g, self.s, self.t
        )
    }
}

pub(crate) fn check_star_size(n: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "star size n = {n} must be at least 3"
        )));
    }
    if n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "star size n = {n} must be odd"
        )));
    }
    Ok(())
}

/// Which of the two necessary congruences `v` violates, if any.
pub fn failing_congruence(n: u32, v: u32) -> Option<Congruence> {
    let block_ok = v.is_multiple_of(n + 1);
    let two_ok = (i64::from(v) - 2).rem_euclid(i64::from(n)) == 0;
    match (block_ok, two_ok) {
        (true, true) => None,
        (false, true) => Some(Congruence::DivisibleByStarOrder),
        (true, false) => Some(Congruence::TwoModN),
        (false, false) => Some(Congruence::Both),
    }
}

/// Derive all instance parameters, or report why `v` is inadmissible.
pub fn derive_params(n: u32, v: u32) -> Result<Params> {
    check_star_size(n)?;
    if let Some(failing) = failing_congruence(n, v) {
        return Err(Error::Inadmissible { n, v, failing });
    }
    let block = u64::from(n) + 1;
    let modulus = u64::from(n) * block;
    let v64 = u64::from(v);
    // Both congruences hold, so v = 2(n+1) mod n(n+1) and v >= 2(n+1).
    debug_assert_eq!(v64 % modulus, 2 * block % modulus);
    let k_prime = u32::try_from((v64 - 2 * block) / modulus)
        .map_err(|_| Error::InvalidArgument(format!("v = {v} is too large")))?;
    let g = (v64 / block) as u32;
    let mu = if g % 2 == 1 { (g - 1) / 2 } else { g / 2 };
    let w = match (mu + 1) % (n + 1) {
        0 => n + 1,
        r => r,
    };
    let s = (v64 - 2) * block / (2 * u64::from(n));
    Ok(Params {
        n,
        k_prime,
        v,
        g,
        k: k_prime / 2,
        q: (n - 1) / 2,
        mu,
        w,
        t: g % (n + 1),
        s: u32::try_from(s).map_err(|_| Error::InvalidArgument(format!("v = {v} is too large")))?,
    })
}

/// All admissible instances with `v <= v_max`, in ascending order of `v`.
pub fn enumerate_admissible(n: u32, v_max: u32) -> Result<Vec<Params>> {
    check_star_size(n)?;
    let step = u64::from(n) * (u64::from(n) + 1);
    let mut v = 2 * (u64::from(n) + 1);
    let mut out = Vec::new();
    while v <= u64::from(v_max) {
        out.push(derive_params(n, v as u32)?);
        v += step;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
    Prime,
}

/// Cyclic length of an edge together with the side it is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Difference {
    pub value: u32,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledDifference {
    pub value: u32,
    pub purity: Purity,
    pub direction: Direction,
}

impl LabeledDifference {
    pub fn new(difference: Difference, purity: Purity) -> Self {
        Self {
            value: difference.value,
            purity,
            direction: difference.direction,
        }
    }
}

impl fmt::Display for LabeledDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bar = if self.direction == Direction::Backward {
            "~"
        } else {
            ""
        };
        let prime = if self.purity == Purity::Prime {
            "'"
        } else {
            ""
        };
        write!(f, "{bar}{}{prime}", self.value)
    }
}

/// Difference of the edge `{u, x}` on `m` cyclically labelled points.
///
/// Ties (`x - u = m/2`) count as forward.
pub fn edge_difference(u: Vertex, x: Vertex, m: u32) -> Result<Difference> {
    if u >= x || x >= m {
        return Err(Error::InvalidArgument(format!(
            "edge ({u}, {x}) needs u < x < {m}"
        )));
    }
    let gap = x - u;
    let wrap = m - gap;
    Ok(if gap <= wrap {
        Difference {
            value: gap,
            direction: Direction::Forward,
        }
    } else {
        Difference {
            value: wrap,
            direction: Direction::Backward,
        }
    })
}

/// One `K_{1,r}` block: a center joined to each of its leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Star {
    pub center: Vertex,
    pub leaves: Vec<Vertex>,
}

impl Star {
    pub fn new(center: Vertex, leaves: Vec<Vertex>) -> Self {
        Self { center, leaves }
    }

    /// Center first, then leaves in stored order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        std::iter::once(self.center).chain(self.leaves.iter().copied())
    }

    /// Edges as `(center, leaf)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.leaves.iter().map(move |&l| (self.center, l))
    }

    /// The same star with its leaves sorted ascending.
    pub fn sorted(&self) -> Star {
        let mut leaves = self.leaves.clone();
        leaves.sort_unstable();
        Star {
            center: self.center,
            leaves,
        }
    }

    /// Checks the block invariants against an ambient vertex count.
    pub fn is_well_formed(&self, vertex_count: u32) -> bool {
        if self.center >= vertex_count {
            return false;
        }
        let mut seen = self.leaves.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
            && seen.iter().all(|&l| l < vertex_count && l != self.center)
    }
}

impl fmt::Display for Star {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.center)?;
        for (i, l) in self.leaves.iter().enumerate() {
            write!(f, "{}{l}", if i == 0 { " " } else { ", " })?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n5_v162_parameters() {
        let p = derive_params(5, 162).unwrap();
        assert_eq!((p.g, p.k_prime, p.k, p.q, p.mu, p.s), (27, 5, 2, 2, 13, 96));
        assert_eq!((p.w, p.t), (2, 3));
    }

    #[test]
    fn base_instance_parameters() {
        let p = derive_params(3, 8).unwrap();
        assert_eq!((p.g, p.k_prime, p.s), (2, 0, 4));
    }

    #[test]
    fn rejects_with_failing_congruence() {
        // 100 mod 30 = 10: neither 6 | 100 nor 5 | 98.
        match derive_params(5, 100) {
            Err(Error::Inadmissible { failing, .. }) => assert_eq!(failing, Congruence::Both),
            other => panic!("unexpected {other:?}"),
        }
        match derive_params(5, 36) {
            Err(Error::Inadmissible { failing, .. }) => assert_eq!(failing, Congruence::TwoModN),
            other => panic!("unexpected {other:?}"),
        }
        match derive_params(3, 14) {
            Err(Error::Inadmissible { failing, .. }) => {
                assert_eq!(failing, Congruence::DivisibleByStarOrder)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_star_size() {
        assert!(matches!(
            derive_params(4, 10),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            derive_params(1, 4),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            enumerate_admissible(2, 50),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn enumeration_examples() {
        let vs = |n, m| -> Vec<u32> {
            enumerate_admissible(n, m)
                .unwrap()
                .iter()
                .map(|p| p.v)
                .collect()
        };
        assert_eq!(vs(3, 50), vec![8, 20, 32, 44]);
        assert_eq!(vs(5, 12), vec![12]);
        assert!(vs(7, 15).is_empty());
    }

    #[test]
    fn edge_difference_examples() {
        let d = edge_difference(0, 4, 7).unwrap();
        assert_eq!((d.value, d.direction), (3, Direction::Backward));
        let d = edge_difference(0, 1, 7).unwrap();
        assert_eq!((d.value, d.direction), (1, Direction::Forward));
        let d = edge_difference(2, 5, 8).unwrap();
        assert_eq!((d.value, d.direction), (3, Direction::Forward));
        let d = edge_difference(0, 4, 8).unwrap();
        assert_eq!((d.value, d.direction), (4, Direction::Forward));
        assert!(edge_difference(3, 3, 8).is_err());
        assert!(edge_difference(5, 2, 8).is_err());
        assert!(edge_difference(2, 8, 8).is_err());
    }

    #[test]
    fn k_prime_parity_shapes() {
        for n in [3, 5, 7, 9, 11] {
            for p in enumerate_admissible(n, 3000).unwrap() {
                if p.k_prime_is_odd() {
                    assert_eq!(p.g, 2 * n * p.k + n + 2);
                    assert_eq!(p.mu, (p.g - 1) / 2);
                } else {
                    assert_eq!(p.g, 2 * n * p.k + 2);
                    assert_eq!(p.mu, p.g / 2);
                }
            }
        }
    }
}
