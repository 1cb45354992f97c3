//! Exhaustive search for tiny instances, used as an independent check on the
//! constructor.
//!
//! Any perfect matching of `K_v` can be relabelled to `{2i, 2i+1}`, so the
//! 1-factor is fixed up front. Star classes are then built one at a time,
//! and each step picks out one particular remaining class (the one holding
//! the lowest uncovered edge, or the last class in which some vertex is a
//! center), so no class ordering is explored twice. Inside a class the lowest
//! unplaced vertex is either a center or a leaf of some unplaced center.
//!
//! With `R` classes left, a vertex of remaining degree `r` is the center of
//! exactly `(r - R) / (n - 1)` of them, so vertices with no center quota
//! left can only be leaves and vertices whose quota equals `R` can only be
//! centers.

use crate::arrays::Decomposition;
use crate::error::{Error, Result};
use crate::lift::StarFactor;
use crate::params::{check_star_size, Star, Vertex};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Largest vertex count the bitset search supports.
pub const MAX_ORACLE_VERTICES: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nonexistence {
    /// A necessary divisibility condition fails.
    Divisibility(String),
    /// The whole search tree was explored.
    Exhausted { nodes: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Witness {
        decomposition: Decomposition,
        nodes: u64,
    },
    Nonexistent(Nonexistence),
    Timeout {
        nodes: u64,
    },
}

struct Timeout;

/// State of the class being filled.
#[derive(Clone, Copy)]
struct Here {
    placed: u64,
    centers_here: u64,
    /// Vertices known to be centers of this class, so never leaves.
    reserved: u64,
    roles: Roles,
}

struct Search {
    v: u32,
    n: u32,
    s: u32,
    full: u64,
    adj: Vec<u64>,
    classes: Vec<Vec<Star>>,
    current: Vec<Star>,
    nodes: u64,
    budget: u64,
}

/// Vertex masks by remaining center quota, fixed for the current class.
#[derive(Clone, Copy)]
struct Roles {
    /// Quota below the number of classes left.
    leaf: u64,
    /// Quota at least one.
    center: u64,
    /// Quota exactly one.
    last: u64,
}

fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros();
            m &= m - 1;
            b
        })
    })
}

impl Search {
    fn tick(&mut self) -> Result<(), Timeout> {
        self.nodes += 1;
        if self.nodes > self.budget {
            Err(Timeout)
        } else {
            Ok(())
        }
    }

    fn start_class(&mut self) -> Result<bool, Timeout> {
        self.tick()?;
        let done = self.classes.len() as u32;
        if done == self.s {
            return Ok(self.adj.iter().all(|&a| a == 0));
        }
        let left = self.s - done;
        let (mut roles, mut centers) = (
            Roles {
                leaf: 0,
                center: 0,
                last: 0,
            },
            0,
        );
        for x in 0..self.v {
            let r = self.adj[x as usize].count_ones();
            if r < left || !(r - left).is_multiple_of(self.n - 1) {
                return Ok(false);
            }
            let quota = (r - left) / (self.n - 1);
            if quota > left {
                return Ok(false);
            }
            if quota < left {
                roles.leaf |= 1 << x;
            }
            if quota > 0 {
                roles.center |= 1 << x;
            }
            if quota == 1 {
                roles.last |= 1 << x;
            }
            centers += quota;
        }
        let per_class = self.v / (self.n + 1);
        if centers != left * per_class {
            return Ok(false);
        }
        // A vertex that is never a center again needs a center at the other
        // end of each of its edges, and a center serves n leaves per class.
        let never_center = self.full & !roles.center;
        for x in 0..self.v {
            let a = self.adj[x as usize];
            let dependants = (a & never_center).count_ones();
            if never_center >> x & 1 == 1 && dependants > 0 {
                return Ok(false);
            }
            let quota = (a.count_ones() - left) / (self.n - 1);
            if dependants > quota * self.n {
                return Ok(false);
            }
        }

        // Two vertices in their last center class cannot share it while the
        // edge between them is uncovered. Build the class of the vertex with
        // the fewest possible co-centers first.
        let mut anchor = None;
        for y in bits(roles.last) {
            let co = roles.center & !(1 << y) & !(self.adj[y as usize] & roles.last);
            let options = co.count_ones();
            if options + 1 < per_class {
                return Ok(false);
            }
            let here = Here {
                placed: 0,
                centers_here: 0,
                reserved: 0,
                roles,
            };
            if options + 1 == per_class && !self.centers_compatible(co | 1 << y, here) {
                return Ok(false);
            }
            if anchor.is_none_or(|(_, best)| options < best) {
                anchor = Some((y, options));
            }
        }
        let here = Here {
            placed: 0,
            centers_here: 0,
            reserved: 0,
            roles,
        };
        if let Some((y, options)) = anchor {
            let mut here = here;
            if options + 1 == per_class {
                here.reserved = roles.center & !(1 << y) & !(self.adj[y as usize] & roles.last);
            }
            return self.star_at(y, 0, here);
        }
        // Otherwise build the class holding the lowest remaining edge.
        let Some(u) = (0..self.v).find(|&x| self.adj[x as usize] != 0) else {
            return Ok(false);
        };
        let m = self.adj[u as usize].trailing_zeros();
        if roles.leaf >> m & 1 == 1 && self.star_at(u, 1 << m, here)? {
            return Ok(true);
        }
        Ok(roles.leaf >> u & 1 == 1 && self.star_at(m, 1 << u, here)?)
    }

    /// Leaves a center `y` is forced to take now, or `None` if `y` cannot be
    /// a center here. When this is the last class in which `y` is a center,
    /// every edge from `y` to a vertex that is also never a center again must
    /// be covered right now.
    fn forced_leaves(&self, y: u32, here: Here) -> Option<u64> {
        let roles = here.roles;
        if roles.center >> y & 1 == 0 {
            return None;
        }
        if roles.last >> y & 1 == 0 {
            return Some(0);
        }
        let a = self.adj[y as usize];
        let must = a & !roles.center;
        (a & here.centers_here & roles.last == 0 && must & here.placed == 0).then_some(must)
    }

    /// Whether all of `set` can be centers of the current class together.
    fn centers_compatible(&self, set: u64, here: Here) -> bool {
        let mut taken = set;
        for z in bits(set) {
            if here.roles.last >> z & 1 == 1 && self.adj[z as usize] & set & here.roles.last != 0 {
                return false;
            }
            let Some(must) = self.forced_leaves(z, here) else {
                return false;
            };
            if must & taken != 0 {
                return false;
            }
            taken |= must;
        }
        true
    }

    /// Cheap necessary conditions for completing the current class.
    fn class_feasible(&self, here: Here) -> bool {
        let open = self.full & !here.placed;
        if open == 0 {
            return true;
        }
        let needed = open.count_ones() / (self.n + 1);
        let mut possible = 0u64;
        for z in bits(open & here.roles.center) {
            if self.forced_leaves(z, here).is_some_and(|m| m & !open == 0) {
                possible |= 1 << z;
            }
        }
        if possible.count_ones() < needed || open & !here.roles.leaf & !possible != 0 {
            return false;
        }
        if bits(open & !possible).any(|z| self.adj[z as usize] & possible == 0) {
            return false;
        }
        possible.count_ones() > needed || self.centers_compatible(possible, here)
    }

    /// Try every star centered at `y` whose leaves include `fixed`.
    fn star_at(&mut self, y: u32, fixed: u64, here: Here) -> Result<bool, Timeout> {
        let Some(must) = self.forced_leaves(y, here) else {
            return Ok(false);
        };
        let fixed = fixed | must;
        let candidates =
            self.adj[y as usize] & !here.placed & !here.reserved & self.full & here.roles.leaf;
        if fixed & !candidates != 0 || fixed.count_ones() > self.n {
            return Ok(false);
        }
        let need = self.n - fixed.count_ones();
        if self.classes.is_empty() && here.placed == 0 {
            return self.first_star(y, fixed, candidates & !fixed, need, here);
        }
        self.choose(y, fixed, candidates & !fixed, need, here)
    }

    /// The very first star, up to relabelling. Before anything is placed the
    /// matching pairs that avoid the center and the fixed leaves are
    /// interchangeable, and so are the two ends of each such pair, so only
    /// leaf sets made of whole pairs followed by single even ends are tried.
    fn first_star(
        &mut self,
        y: u32,
        fixed: u64,
        pool: u64,
        need: u32,
        here: Here,
    ) -> Result<bool, Timeout> {
        let pair = |x: u32| 3u64 << (x & !1);
        let special = bits(fixed | 1 << y).fold(0, |m, x| m | pair(x));
        let loose = pool & special;
        let free_pairs: Vec<u32> = (0..self.v / 2)
            .filter(|&i| pair(2 * i) & special == 0)
            .map(|i| 2 * i)
            .collect();
        if free_pairs.iter().any(|&x| pool & pair(x) != pair(x)) {
            return self.choose(y, fixed, pool, need, here);
        }
        let mut subset = loose;
        loop {
            let rest = need.checked_sub(subset.count_ones());
            if let Some(rest) = rest {
                for whole in (0..=rest / 2).rev() {
                    let singles = rest - 2 * whole;
                    if (whole + singles) as usize > free_pairs.len() {
                        continue;
                    }
                    let mut leaves = fixed | subset;
                    for (i, &x) in free_pairs
                        .iter()
                        .enumerate()
                        .take((whole + singles) as usize)
                    {
                        leaves |= if (i as u32) < whole { pair(x) } else { 1 << x };
                    }
                    if self.place(y, leaves, here)? {
                        return Ok(true);
                    }
                }
            }
            if subset == 0 {
                return Ok(false);
            }
            subset = (subset - 1) & loose;
        }
    }

    fn fill(&mut self, here: Here) -> Result<bool, Timeout> {
        self.tick()?;
        if here.placed == self.full {
            self.classes.push(std::mem::take(&mut self.current));
            if self.start_class()? {
                return Ok(true);
            }
            self.current = self.classes.pop().unwrap_or_default();
            return Ok(false);
        }
        let x = (!here.placed & self.full).trailing_zeros();
        let free = !here.placed & self.full & !(1 << x);
        if self.star_at(x, 0, here)? {
            return Ok(true);
        }
        if here.roles.leaf >> x & 1 == 1 {
            for y in bits(self.adj[x as usize] & free & here.roles.center) {
                if self.star_at(y, 1 << x, here)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Pick `need` more leaves for `center` from `pool`, then place the star.
    fn choose(
        &mut self,
        center: u32,
        chosen: u64,
        pool: u64,
        need: u32,
        here: Here,
    ) -> Result<bool, Timeout> {
        if need == 0 {
            return self.place(center, chosen, here);
        }
        if pool.count_ones() < need {
            return Ok(false);
        }
        let low = pool.trailing_zeros();
        let rest = pool & !(1 << low);
        if self.choose(center, chosen | 1 << low, rest, need - 1, here)? {
            return Ok(true);
        }
        self.choose(center, chosen, rest, need, here)
    }

    fn place(&mut self, center: u32, leaves: u64, here: Here) -> Result<bool, Timeout> {
        self.adj[center as usize] &= !leaves;
        for l in bits(leaves) {
            self.adj[l as usize] &= !(1 << center);
        }
        self.current.push(Star::new(center, bits(leaves).collect()));
        let next = Here {
            placed: here.placed | leaves | 1 << center,
            centers_here: here.centers_here | 1 << center,
            ..here
        };
        let found = self.class_feasible(next) && self.fill(next)?;
        if !found {
            self.current.pop();
            self.adj[center as usize] |= leaves;
            for l in bits(leaves) {
                self.adj[l as usize] |= 1 << center;
            }
        }
        Ok(found)
    }
}

/// Search for a decomposition of `K_v` into one 1-factor and `n`-star
/// factors, giving up after `budget` search nodes.
pub fn brute_force_urd(n: u32, v: u32, budget: u64) -> Result<OracleOutcome> {
    check_star_size(n)?;
    let mut failures = Vec::new();
    if !v.is_multiple_of(2) {
        failures.push("v is odd");
    }
    if !v.is_multiple_of(n + 1) {
        failures.push("(n+1) does not divide v");
    }
    if v < 2 || !(v - 2).is_multiple_of(n) {
        failures.push("n does not divide v-2");
    }
    if !failures.is_empty() {
        return Ok(OracleOutcome::Nonexistent(Nonexistence::Divisibility(
            failures.join(", "),
        )));
    }
    if v > MAX_ORACLE_VERTICES {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search supports at most {MAX_ORACLE_VERTICES} vertices, got {v}"
        )));
    }
    let full = if v == 64 { u64::MAX } else { (1u64 << v) - 1 };
    let mut adj: Vec<u64> = (0..v).map(|x| full & !(1 << x)).collect();
    let one_factor: Vec<(Vertex, Vertex)> = (0..v / 2).map(|i| (2 * i, 2 * i + 1)).collect();
    for &(a, b) in &one_factor {
        adj[a as usize] &= !(1 << b);
        adj[b as usize] &= !(1 << a);
    }
    let mut search = Search {
        v,
        n,
        s: (v - 2) * (n + 1) / (2 * n),
        full,
        adj,
        classes: Vec::new(),
        current: Vec::new(),
        nodes: 0,
        budget,
    };
    Ok(match search.start_class() {
        Err(Timeout) => OracleOutcome::Timeout {
            nodes: search.nodes,
        },
        Ok(false) => OracleOutcome::Nonexistent(Nonexistence::Exhausted {
            nodes: search.nodes,
        }),
        Ok(true) => {
            let star_classes = search
                .classes
                .into_iter()
                .map(|stars| StarFactor { v, stars })
                .collect();
            let decomposition = Decomposition {
                v,
                n,
                one_factor,
                star_classes,
            };
            OracleOutcome::Witness {
                decomposition,
                nodes: search.nodes,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_urd;

    fn witness(n: u32, v: u32) -> Decomposition {
        match brute_force_urd(n, v, DEFAULT_BUDGET).unwrap() {
            OracleOutcome::Witness { decomposition, .. } => decomposition,
            other => panic!("({n}, {v}): {other:?}"),
        }
    }

    #[test]
    fn finds_smallest_instances() {
        let d = witness(3, 8);
        assert!(verify_urd(&d).ok);
        assert_eq!(d.star_classes.len(), 4);
        let d = witness(5, 12);
        assert!(verify_urd(&d).ok);
        assert_eq!(d.star_classes.len(), 6);
    }

    #[test]
    fn divisibility_precheck() {
        assert!(matches!(
            brute_force_urd(3, 6, DEFAULT_BUDGET).unwrap(),
            OracleOutcome::Nonexistent(Nonexistence::Divisibility(_))
        ));
    }

    #[test]
    fn tiny_budget_times_out() {
        assert!(matches!(
            brute_force_urd(3, 8, 3).unwrap(),
            OracleOutcome::Timeout { .. }
        ));
    }
}
