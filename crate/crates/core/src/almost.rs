//! Almost `n`-star factors on the `g` contracted points.
//!
//! An almost factor covers every point of `K_g` with vertex-disjoint `n`-stars
//! except for `t = g mod (n+1)` points, which carry a little star with `t - 1`
//! leaves (an isolated point when `t = 1`). Every difference in `D` is used by
//! exactly one pure edge, and a second time by at most one prime edge. The
//! pure edges later become the multiple-of-`(n+1)` differences of `K_v`, the
//! prime edges feed the balanced star arrays.
//!
//! Five constructions cover all `k' >= 1`, selected by the parity of `k'` and
//! by how `k` compares with `q`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{internal, Error, Result};
use crate::params::{edge_difference, Direction, LabeledDifference, Params, Purity, Star, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Construction {
    /// `k' = 1`: a single mixed star and an isolated point.
    OddBase,
    /// `k'` odd, `1 <= k <= q`: mixed star with backward and forward primes.
    OddFewPure,
    /// `k'` odd, `k >= q + 1`: extra pure stars and an all-forward mixed star.
    OddManyPure,
    /// `k' = 2`: one pure and one prime star.
    EvenBase,
    /// `k'` even, `k >= 2`.
    EvenGeneral,
}

impl Construction {
    pub fn for_params(p: &Params) -> Result<Self> {
        match (p.k_prime, p.k_prime_is_odd()) {
            (0, _) => Err(Error::InvalidArgument(
                "k' = 0 has no almost factor; the base case covers v = 2(n+1)".into(),
            )),
            (1, _) => Ok(Construction::OddBase),
            (_, true) if p.k <= p.q => Ok(Construction::OddFewPure),
            (_, true) => Ok(Construction::OddManyPure),
            (2, false) => Ok(Construction::EvenBase),
            (_, false) => Ok(Construction::EvenGeneral),
        }
    }

    /// Expected number of backward prime edges in the mixed star.
    fn backward_mixed_primes(self, p: &Params) -> Option<u32> {
        match self {
            Construction::OddBase => Some(p.q),
            Construction::OddFewPure => Some(p.w - 1),
            Construction::OddManyPure => Some(0),
            Construction::EvenBase | Construction::EvenGeneral => None,
        }
    }
}

/// Star with one difference annotation per leaf.
///
/// Leaves are ordered pure first (descending length) then prime (ascending
/// label); the prime leaf at position `j` is the `j`-th prime leaf consumed by
/// the lifting step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStar {
    pub star: Star,
    pub annotations: Vec<LabeledDifference>,
}

impl MixedStar {
    pub fn center(&self) -> Vertex {
        self.star.center
    }

    pub fn pure_leaves(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.star
            .leaves
            .iter()
            .zip(&self.annotations)
            .filter(|(_, a)| a.purity == Purity::Pure)
            .map(|(&l, _)| l)
    }

    pub fn prime_leaves(&self) -> impl Iterator<Item = (Vertex, LabeledDifference)> + '_ {
        self.star
            .leaves
            .iter()
            .zip(&self.annotations)
            .filter(|(_, a)| a.purity == Purity::Prime)
            .map(|(&l, &a)| (l, a))
    }
}

/// Bookkeeping of which differences each part of the construction consumed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DifferenceLedger {
    /// Every difference that must be covered by a pure edge.
    pub all: Vec<u32>,
    pub d0: Vec<u32>,
    pub d1: Vec<u32>,
    pub d2: Vec<u32>,
    pub mixed_pure: Vec<u32>,
    pub mixed_prime: Vec<u32>,
    /// Differences of the prime stars and the little star.
    pub prime_used: Vec<u32>,
    pub a1: Vec<u32>,
    pub a2: Vec<u32>,
    pub b1: Vec<u32>,
    pub b2: Vec<u32>,
    /// Center of the mixed star in the many-pure construction.
    pub rho1: Option<Vertex>,
    pub rho2: Option<Vertex>,
    /// Smallest difference of the extra pure star centered at `mu`.
    pub z: Option<u32>,
    /// Smallest difference in the mixed star.
    pub z1: Option<u32>,
    /// Largest difference left for the trailing pure stars.
    pub z2: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlmostStarFactor {
    pub g: u32,
    pub construction: Construction,
    pub pure_stars: Vec<Star>,
    pub prime_stars: Vec<Star>,
    pub mixed_star: Option<MixedStar>,
    pub little_star: Option<Star>,
    pub isolated_vertex: Option<Vertex>,
    pub ledger: DifferenceLedger,
}

/// Little star, isolated point and prime stars built greedily from leftovers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GreedyTail {
    pub little_star: Option<Star>,
    pub isolated_vertex: Option<Vertex>,
    pub prime_stars: Vec<Star>,
}

struct Points {
    used: Vec<bool>,
}

impl Points {
    fn new(g: u32) -> Self {
        Self {
            used: vec![false; g as usize],
        }
    }

    fn take(&mut self, x: Vertex) -> Result<()> {
        match self.used.get_mut(x as usize) {
            Some(slot) if !*slot => {
                *slot = true;
                Ok(())
            }
            Some(_) => Err(internal!("point {x} used twice")),
            None => Err(internal!("point {x} out of range")),
        }
    }

    fn take_star(&mut self, star: &Star) -> Result<()> {
        star.vertices().try_for_each(|x| self.take(x))
    }

    fn is_free(&self, x: Vertex) -> bool {
        self.used.get(x as usize).is_some_and(|u| !u)
    }

    fn free(&self) -> impl DoubleEndedIterator<Item = Vertex> + '_ {
        self.used
            .iter()
            .enumerate()
            .filter(|(_, u)| !**u)
            .map(|(i, _)| i as Vertex)
    }

    fn unused(&self) -> BTreeSet<Vertex> {
        self.free().collect()
    }
}

fn pure_differences(p: &Params) -> Vec<u32> {
    // For even g the difference g/2 lifts onto the 1-factor and is excluded.
    let top = if p.g.is_multiple_of(2) {
        p.mu - 1
    } else {
        p.mu
    };
    (1..=top).collect()
}

/// The consecutive pure stars `(i-1; j, j-1, ..., j-n+1)` with
/// `j = (mu - w) - n(i-1)`, occupying exactly the points `0..=mu-w`.
fn leading_pure_stars(p: &Params, count: u32) -> Vec<Star> {
    (1..=count)
        .map(|i| {
            let j = (p.mu - p.w) - p.n * (i - 1);
            Star::new(i - 1, (0..p.n).map(|m| j - m).collect())
        })
        .collect()
}

fn star_lengths(s: &Star) -> impl Iterator<Item = u32> + '_ {
    s.leaves.iter().map(move |&l| l.abs_diff(s.center))
}

/// Build the almost factor prescribed for `p`.
pub fn build_almost_factor(p: &Params) -> Result<AlmostStarFactor> {
    match Construction::for_params(p)? {
        Construction::OddBase => odd_base(p),
        Construction::OddFewPure => odd_few_pure(p),
        Construction::OddManyPure => odd_many_pure(p),
        Construction::EvenBase => even_base(p),
        Construction::EvenGeneral => even_general(p),
    }
}

fn mixed_star(
    p: &Params,
    center: Vertex,
    pure_lengths: &[u32],
    primes: &[(Vertex, Direction)],
) -> Result<MixedStar> {
    let mut pure = pure_lengths.to_vec();
    pure.sort_unstable_by(|a, b| b.cmp(a));
    let mut primes = primes.to_vec();
    primes.sort_unstable_by_key(|&(l, _)| l);

    let mut leaves = Vec::with_capacity(p.n as usize);
    let mut annotations = Vec::with_capacity(p.n as usize);
    for d in pure {
        let leaf = center + d;
        leaves.push(leaf);
        annotations.push(LabeledDifference {
            value: d,
            purity: Purity::Pure,
            direction: Direction::Forward,
        });
    }
    for (leaf, direction) in primes {
        let (lo, hi) = (center.min(leaf), center.max(leaf));
        let diff = edge_difference(lo, hi, p.g)?;
        if diff.direction != direction {
            return Err(internal!("mixed leaf {leaf} is not a {direction:?} edge"));
        }
        leaves.push(leaf);
        annotations.push(LabeledDifference::new(diff, Purity::Prime));
    }
    Ok(MixedStar {
        star: Star::new(center, leaves),
        annotations,
    })
}

fn assemble(
    p: &Params,
    construction: Construction,
    points: Points,
    pure_stars: Vec<Star>,
    mixed: Option<MixedStar>,
    mut ledger: DifferenceLedger,
) -> Result<AlmostStarFactor> {
    let tail = build_greedy_tail(&points.unused(), p)?;
    ledger.prime_used = tail
        .little_star
        .iter()
        .chain(&tail.prime_stars)
        .flat_map(star_lengths)
        .collect();
    ledger.prime_used.sort_unstable();
    Ok(AlmostStarFactor {
        g: p.g,
        construction,
        pure_stars,
        prime_stars: tail.prime_stars,
        mixed_star: mixed,
        little_star: tail.little_star,
        isolated_vertex: tail.isolated_vertex,
        ledger,
    })
}

fn odd_base(p: &Params) -> Result<AlmostStarFactor> {
    let q = p.q;
    let mut points = Points::new(p.g);
    let primes: Vec<_> = (q + 2..=2 * q + 1)
        .map(|l| (l, Direction::Backward))
        .collect();
    let pure: Vec<u32> = (1..=q + 1).collect();
    let m = mixed_star(p, 0, &pure, &primes)?;
    points.take_star(&m.star)?;
    let ledger = DifferenceLedger {
        all: pure_differences(p),
        mixed_pure: pure,
        mixed_prime: m.prime_leaves().map(|(_, a)| a.value).collect(),
        ..Default::default()
    };
    assemble(
        p,
        Construction::OddBase,
        points,
        Vec::new(),
        Some(m),
        ledger,
    )
}

fn odd_few_pure(p: &Params) -> Result<AlmostStarFactor> {
    let (n, q, k, w, mu, g) = (p.n, p.q, p.k, p.w, p.mu, p.g);
    if w != q + 2 - k {
        return Err(internal!(
            "w = {w} disagrees with q + 2 - k = {}",
            q + 2 - k
        ));
    }
    let mut points = Points::new(g);
    let p1 = leading_pure_stars(p, k);
    p1.iter().try_for_each(|s| points.take_star(s))?;

    let center = mu - w + 1;
    let a1: Vec<u32> = (0..w).map(|d| mu - d).collect();
    let a2: Vec<u32> = (1..k).map(|d| (n + 1) * d).collect();
    let b1: Vec<u32> = (0..w.saturating_sub(1)).map(|d| mu - d).collect();
    let b2: Vec<u32> = (0..(q + 1).saturating_sub(w)).map(|d| mu - w - d).collect();

    let pure: Vec<u32> = a1.iter().chain(&a2).copied().collect();
    let primes: Vec<(Vertex, Direction)> = b1
        .iter()
        .map(|&d| (center + g - d, Direction::Backward))
        .chain(b2.iter().map(|&d| (center + d, Direction::Forward)))
        .collect();
    let m = mixed_star(p, center, &pure, &primes)?;
    points.take_star(&m.star)?;

    let mut d1: Vec<u32> = p1.iter().flat_map(star_lengths).collect();
    d1.sort_unstable();
    let mut mixed_pure = pure.clone();
    mixed_pure.sort_unstable();
    let ledger = DifferenceLedger {
        all: pure_differences(p),
        d1,
        mixed_pure,
        mixed_prime: m.prime_leaves().map(|(_, a)| a.value).collect(),
        a1,
        a2,
        b1,
        b2,
        z1: pure.iter().min().copied(),
        ..Default::default()
    };
    assemble(p, Construction::OddFewPure, points, p1, Some(m), ledger)
}

/// Differences of `D` missing from the leading pure stars, largest first.
fn remaining_after_leading(p: &Params, d1: &[u32]) -> Vec<u32> {
    let used: BTreeSet<u32> = d1.iter().copied().collect();
    pure_differences(p)
        .into_iter()
        .rev()
        .filter(|d| !used.contains(d))
        .collect()
}

fn odd_many_pure(p: &Params) -> Result<AlmostStarFactor> {
    let (n, q, k, w, mu) = (p.n, p.q, p.k, p.w, p.mu);
    let leading = (mu + 1 - w) / (n + 1);
    let mut points = Points::new(p.g);
    let p1 = leading_pure_stars(p, leading);
    p1.iter().try_for_each(|s| points.take_star(s))?;
    let mut d1: Vec<u32> = p1.iter().flat_map(star_lengths).collect();
    d1.sort_unstable();

    let mut rest = remaining_after_leading(p, &d1).into_iter();
    let mut pure_stars = p1;
    let mut ledger = DifferenceLedger {
        all: pure_differences(p),
        d1,
        ..Default::default()
    };

    if k > leading {
        let d0: Vec<u32> = rest.by_ref().take(n as usize).collect();
        if d0.first() != Some(&mu) {
            return Err(internal!(
                "star centered at mu must contain the edge {{mu, 2mu}}"
            ));
        }
        let p0 = Star::new(mu, d0.iter().map(|d| mu + d).collect());
        points.take_star(&p0)?;
        ledger.z = d0.last().copied();
        ledger.d0 = d0;
        ledger.d0.sort_unstable();
        pure_stars.push(p0);
    }

    let (rho1, rho2) = {
        let mut free = points.free();
        (free.next(), free.next())
    };
    let rho1 = rho1.ok_or_else(|| internal!("no point left for the mixed star"))?;
    let expected_rho1 = match w {
        1 if k == q + 1 => mu,
        1 => mu + 1,
        _ => mu - w + 1,
    };
    if rho1 != expected_rho1 {
        return Err(internal!(
            "mixed center {rho1} differs from expected {expected_rho1}"
        ));
    }
    ledger.rho1 = Some(rho1);
    ledger.rho2 = rho2;

    let mixed_pure: Vec<u32> = rest.by_ref().take(q as usize + 1).collect();
    if mixed_pure.len() != q as usize + 1 {
        return Err(internal!("too few differences for the mixed star"));
    }
    for d in &mixed_pure {
        points.take(rho1 + d)?;
    }
    points.take(rho1)?;
    let prime_leaves: Vec<Vertex> = points.free().rev().take(q as usize).collect();
    let primes: Vec<(Vertex, Direction)> = prime_leaves
        .iter()
        .map(|&l| (l, Direction::Forward))
        .collect();
    for &l in &prime_leaves {
        points.take(l)?;
    }
    let m = mixed_star(p, rho1, &mixed_pure, &primes)?;
    ledger.z1 = mixed_pure.last().copied();
    ledger.mixed_pure = mixed_pure;
    ledger.mixed_pure.sort_unstable();
    ledger.mixed_prime = m.prime_leaves().map(|(_, a)| a.value).collect();

    let d2: Vec<u32> = rest.collect();
    if !d2.len().is_multiple_of(n as usize) {
        return Err(internal!(
            "{} leftover pure differences is not a multiple of n",
            d2.len()
        ));
    }
    ledger.z2 = d2.first().copied();
    for chunk in d2.chunks(n as usize) {
        let center = points
            .free()
            .next()
            .ok_or_else(|| internal!("no center left"))?;
        let star = Star::new(center, chunk.iter().map(|d| center + d).collect());
        if !star.leaves.iter().all(|&l| points.is_free(l)) {
            return Err(internal!("trailing pure star {star} hits a used point"));
        }
        points.take_star(&star)?;
        pure_stars.push(star);
    }
    ledger.d2 = d2;
    ledger.d2.sort_unstable();
    assemble(
        p,
        Construction::OddManyPure,
        points,
        pure_stars,
        Some(m),
        ledger,
    )
}

fn even_base(p: &Params) -> Result<AlmostStarFactor> {
    let mut points = Points::new(p.g);
    let p1 = Star::new(0, (1..=p.n).rev().collect());
    points.take_star(&p1)?;
    let ledger = DifferenceLedger {
        all: pure_differences(p),
        d1: (1..=p.n).collect(),
        ..Default::default()
    };
    assemble(p, Construction::EvenBase, points, vec![p1], None, ledger)
}

fn even_general(p: &Params) -> Result<AlmostStarFactor> {
    let (n, w, mu) = (p.n, p.w, p.mu);
    let leading = (mu + 1 - w) / (n + 1);
    let mut points = Points::new(p.g);
    let p1 = leading_pure_stars(p, leading);
    p1.iter().try_for_each(|s| points.take_star(s))?;
    let mut d1: Vec<u32> = p1.iter().flat_map(star_lengths).collect();
    d1.sort_unstable();

    let mut rest = remaining_after_leading(p, &d1).into_iter();
    let mut pure_stars = p1;
    let mut ledger = DifferenceLedger {
        all: pure_differences(p),
        d1,
        ..Default::default()
    };

    let d0: Vec<u32> = rest.by_ref().take(n as usize).collect();
    if d0.len() != n as usize {
        return Err(internal!("too few differences for the star centered at mu"));
    }
    let p0 = Star::new(mu, d0.iter().map(|d| mu + d).collect());
    points.take_star(&p0)?;
    ledger.z1 = d0.last().copied();
    ledger.d0 = d0;
    ledger.d0.sort_unstable();
    pure_stars.push(p0);

    let d2: Vec<u32> = rest.collect();
    if !d2.len().is_multiple_of(n as usize) {
        return Err(internal!(
            "{} leftover pure differences is not a multiple of n",
            d2.len()
        ));
    }
    ledger.z2 = d2.first().copied();
    for chunk in d2.chunks(n as usize) {
        let center = points
            .free()
            .find(|&x| x > mu)
            .ok_or_else(|| internal!("no center above mu left"))?;
        let star = Star::new(center, chunk.iter().map(|d| center + d).collect());
        if !star.leaves.iter().all(|&l| points.is_free(l)) {
            return Err(internal!("trailing pure star {star} hits a used point"));
        }
        points.take_star(&star)?;
        pure_stars.push(star);
    }
    ledger.d2 = d2;
    ledger.d2.sort_unstable();
    assemble(
        p,
        Construction::EvenGeneral,
        points,
        pure_stars,
        None,
        ledger,
    )
}

/// Cover the leftover points: the little star (smallest point as center,
/// largest `t - 1` points as leaves) first, then prime stars built the same
/// way with `n` leaves each.
pub fn build_greedy_tail(unused: &BTreeSet<Vertex>, p: &Params) -> Result<GreedyTail> {
    let block = p.block() as usize;
    if unused.len() % block != p.t as usize % block || unused.len() < p.t as usize {
        return Err(internal!(
            "{} leftover points, expected {} mod {}",
            unused.len(),
            p.t,
            block
        ));
    }
    let mut pool = unused.clone();
    let mut tail = GreedyTail::default();
    match p.t {
        0 => {}
        1 => tail.isolated_vertex = pool.pop_last(),
        t => {
            let center = pool.pop_first().ok_or_else(|| internal!("empty pool"))?;
            let leaves: Vec<Vertex> = (1..t).filter_map(|_| pool.pop_last()).collect();
            tail.little_star = Some(Star::new(center, leaves));
        }
    }
    while let Some(center) = pool.pop_first() {
        let leaves: Vec<Vertex> = (0..p.n).filter_map(|_| pool.pop_last()).collect();
        if leaves.len() != p.n as usize {
            return Err(internal!("prime star at {center} is short of leaves"));
        }
        tail.prime_stars.push(Star::new(center, leaves));
    }
    Ok(tail)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlmostViolation {
    LabelOutOfRange {
        vertex: Vertex,
    },
    VertexRepeated {
        vertex: Vertex,
    },
    VertexMissing {
        vertex: Vertex,
    },
    WrongLeafCount {
        center: Vertex,
        expected: u32,
        found: u32,
    },
    DifferenceMissing {
        value: u32,
    },
    PureMissing {
        value: u32,
    },
    MultiplicityExceeded {
        value: u32,
        count: u32,
    },
    PureRepeated {
        value: u32,
    },
    PrimeRepeated {
        value: u32,
    },
    OutsideDifferenceSet {
        value: u32,
    },
    BackwardPureEdge {
        center: Vertex,
        leaf: Vertex,
    },
    BackwardPrimeEdge {
        center: Vertex,
        leaf: Vertex,
    },
    MixedEdgeCounts {
        pure: u32,
        prime: u32,
    },
    MixedDirectionSplit {
        expected_backward: u32,
        found_backward: u32,
    },
    AnnotationMismatch {
        center: Vertex,
        leaf: Vertex,
    },
    MixedStarPresence {
        expected: bool,
    },
    LittleStarShape {
        t: u32,
    },
}

impl fmt::Display for AlmostViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AlmostViolation::*;
        match self {
            LabelOutOfRange { vertex } => write!(f, "label {vertex} out of range"),
            VertexRepeated { vertex } => write!(f, "point {vertex} used more than once"),
            VertexMissing { vertex } => write!(f, "point {vertex} not covered"),
            WrongLeafCount {
                center,
                expected,
                found,
            } => {
                write!(
                    f,
                    "star at {center} has {found} leaves, expected {expected}"
                )
            }
            DifferenceMissing { value } => write!(f, "difference {value} never appears"),
            PureMissing { value } => write!(f, "difference {value} has no pure edge"),
            MultiplicityExceeded { value, count } => {
                write!(
                    f,
                    "multiplicity > 2: difference {value} appears {count} times"
                )
            }
            PureRepeated { value } => write!(f, "difference {value} on two pure edges"),
            PrimeRepeated { value } => write!(f, "difference {value} on two prime edges"),
            OutsideDifferenceSet { value } => write!(f, "difference {value} is outside D"),
            BackwardPureEdge { center, leaf } => {
                write!(f, "pure edge {{{center}, {leaf}}} is backward")
            }
            BackwardPrimeEdge { center, leaf } => {
                write!(f, "prime star edge {{{center}, {leaf}}} is backward")
            }
            MixedEdgeCounts { pure, prime } => {
                write!(f, "mixed star has {pure} pure and {prime} prime edges")
            }
            MixedDirectionSplit {
                expected_backward,
                found_backward,
            } => write!(
                f,
                "mixed star has {found_backward} backward primes, expected {expected_backward}"
            ),
            AnnotationMismatch { center, leaf } => {
                write!(f, "annotation of mixed edge {{{center}, {leaf}}} is wrong")
            }
            MixedStarPresence { expected: true } => f.write_str("mixed star missing"),
            MixedStarPresence { expected: false } => f.write_str("unexpected mixed star"),
            LittleStarShape { t } => write!(f, "little star does not match t = {t}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlmostReport {
    pub violations: Vec<AlmostViolation>,
    pub mixed_stars: u32,
    pub little_stars: u32,
    pub isolated_vertices: u32,
    pub mixed_pure_edges: u32,
    pub mixed_forward_primes: u32,
    pub mixed_backward_primes: u32,
}

impl AlmostReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recheck an almost factor from its raw labels.
pub fn check_almost_factor(f: &AlmostStarFactor, p: &Params) -> AlmostReport {
    let g = p.g;
    let mut report = AlmostReport::default();
    let v = &mut report.violations;

    // Point partition.
    let mut hits = vec![0u32; g as usize];
    let components = f
        .pure_stars
        .iter()
        .chain(&f.prime_stars)
        .chain(f.mixed_star.as_ref().map(|m| &m.star))
        .chain(&f.little_star);
    for x in components.flat_map(Star::vertices).chain(f.isolated_vertex) {
        match hits.get_mut(x as usize) {
            Some(h) => *h += 1,
            None => v.push(AlmostViolation::LabelOutOfRange { vertex: x }),
        }
    }
    for (x, &h) in hits.iter().enumerate() {
        match h {
            0 => v.push(AlmostViolation::VertexMissing {
                vertex: x as Vertex,
            }),
            1 => {}
            _ => v.push(AlmostViolation::VertexRepeated {
                vertex: x as Vertex,
            }),
        }
    }

    for s in f.pure_stars.iter().chain(&f.prime_stars) {
        if s.leaves.len() != p.n as usize {
            v.push(AlmostViolation::WrongLeafCount {
                center: s.center,
                expected: p.n,
                found: s.leaves.len() as u32,
            });
        }
    }

    // Differences, recomputed per edge.
    let mut pure_count = vec![0u32; g as usize];
    let mut prime_count = vec![0u32; g as usize];
    let mut tally = |center: Vertex, leaf: Vertex, purity: Purity, v: &mut Vec<_>| {
        let (lo, hi) = (center.min(leaf), center.max(leaf));
        let Ok(d) = edge_difference(lo, hi, g) else {
            return None;
        };
        if d.direction == Direction::Backward && purity == Purity::Pure {
            v.push(AlmostViolation::BackwardPureEdge { center, leaf });
        }
        let direction = d.direction;
        match purity {
            Purity::Pure => pure_count[d.value as usize] += 1,
            Purity::Prime => prime_count[d.value as usize] += 1,
        }
        Some(LabeledDifference {
            value: d.value,
            purity,
            direction,
        })
    };

    for s in &f.pure_stars {
        for (c, l) in s.edges() {
            tally(c, l, Purity::Pure, v);
        }
    }
    for s in f.prime_stars.iter().chain(&f.little_star) {
        for (c, l) in s.edges() {
            if let Some(d) = tally(c, l, Purity::Prime, v) {
                if d.direction == Direction::Backward {
                    v.push(AlmostViolation::BackwardPrimeEdge { center: c, leaf: l });
                }
            }
        }
    }

    let construction = f.construction;
    let expects_mixed = p.k_prime_is_odd();
    match (&f.mixed_star, expects_mixed) {
        (Some(m), true) => {
            report.mixed_stars = 1;
            if m.annotations.len() != m.star.leaves.len() {
                v.push(AlmostViolation::MixedEdgeCounts { pure: 0, prime: 0 });
            }
            for (&leaf, ann) in m.star.leaves.iter().zip(&m.annotations) {
                let Some(d) = tally(m.center(), leaf, ann.purity, v) else {
                    continue;
                };
                if d != *ann {
                    v.push(AlmostViolation::AnnotationMismatch {
                        center: m.center(),
                        leaf,
                    });
                }
                match (d.purity, d.direction) {
                    (Purity::Pure, _) => report.mixed_pure_edges += 1,
                    (Purity::Prime, Direction::Forward) => report.mixed_forward_primes += 1,
                    (Purity::Prime, Direction::Backward) => report.mixed_backward_primes += 1,
                }
            }
            let prime = report.mixed_forward_primes + report.mixed_backward_primes;
            if report.mixed_pure_edges != p.q + 1 || prime != p.q {
                v.push(AlmostViolation::MixedEdgeCounts {
                    pure: report.mixed_pure_edges,
                    prime,
                });
            }
            if let Some(expected) = construction.backward_mixed_primes(p) {
                if expected != report.mixed_backward_primes {
                    v.push(AlmostViolation::MixedDirectionSplit {
                        expected_backward: expected,
                        found_backward: report.mixed_backward_primes,
                    });
                }
            }
        }
        (None, false) => {}
        (_, expected) => v.push(AlmostViolation::MixedStarPresence { expected }),
    }

    report.little_stars = u32::from(f.little_star.is_some());
    report.isolated_vertices = u32::from(f.isolated_vertex.is_some());
    let little_ok = match p.t {
        0 => f.little_star.is_none() && f.isolated_vertex.is_none(),
        1 => f.little_star.is_none() && f.isolated_vertex.is_some(),
        t => {
            f.isolated_vertex.is_none()
                && f.little_star
                    .as_ref()
                    .is_some_and(|l| l.leaves.len() == t as usize - 1)
        }
    };
    if !little_ok {
        v.push(AlmostViolation::LittleStarShape { t: p.t });
    }

    let top = if g.is_multiple_of(2) { p.mu - 1 } else { p.mu };
    for d in 1..g / 2 + 1 {
        let (pc, qc) = (pure_count[d as usize], prime_count[d as usize]);
        if d > top {
            if pc + qc > 0 {
                v.push(AlmostViolation::OutsideDifferenceSet { value: d });
            }
            continue;
        }
        if pc + qc == 0 {
            v.push(AlmostViolation::DifferenceMissing { value: d });
        }
        if pc + qc > 2 {
            v.push(AlmostViolation::MultiplicityExceeded {
                value: d,
                count: pc + qc,
            });
        }
        if pc > 1 {
            v.push(AlmostViolation::PureRepeated { value: d });
        }
        if pc == 0 && qc > 0 {
            v.push(AlmostViolation::PureMissing { value: d });
        }
        if qc > 1 {
            v.push(AlmostViolation::PrimeRepeated { value: d });
        }
    }
    report
}
