//! Lifting an almost factor on `g` points to a star factor on `v = g(n+1)`
//! vertices, and developing it cyclically into `g` Part I factors.
//!
//! Point `x` of the almost factor becomes the block `(n+1)x + 0..=n`. Pure
//! edges are copied into every residue, so they cover the differences that
//! are multiples of `n + 1`. Prime edges are shifted by a residue offset so
//! that the `j`-th prime leaf lands in residue class `i + j` (or `i - j` for a
//! backward edge), which places its `K_v` difference in column `j` of a
//! balanced star array.

use serde::{Deserialize, Serialize};

use crate::almost::{AlmostStarFactor, MixedStar};
use crate::error::{internal, Result};
use crate::params::{Direction, Params, Star, Vertex};

/// A spanning set of vertex-disjoint `n`-stars on `v` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarFactor {
    pub v: u32,
    pub stars: Vec<Star>,
}

impl StarFactor {
    /// Checks that every vertex appears once and every star has `n` leaves.
    pub fn check_partition(&self, n: u32) -> Result<()> {
        let mut seen = vec![false; self.v as usize];
        for s in &self.stars {
            if s.leaves.len() != n as usize {
                return Err(internal!("star {s} does not have {n} leaves"));
            }
            for x in s.vertices() {
                match seen.get_mut(x as usize) {
                    Some(slot) if !*slot => *slot = true,
                    Some(_) => return Err(internal!("vertex {x} appears twice in a factor")),
                    None => return Err(internal!("vertex {x} out of range")),
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(x) => Err(internal!("vertex {x} missing from a factor")),
            None => Ok(()),
        }
    }
}

/// The residue classes `V_i = { x : x = i mod (n+1) }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClasses {
    pub classes: Vec<Vec<Vertex>>,
}

impl ResidueClasses {
    pub fn new(p: &Params) -> Self {
        let b = p.block();
        let classes = (0..b)
            .map(|i| (i..p.v).step_by(b as usize).collect())
            .collect();
        Self { classes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Pure,
    Prime,
    Mixed,
    Little,
}

/// All lifted stars coming from one component of the almost factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedComponent {
    pub kind: ComponentKind,
    pub stars: Vec<Star>,
}

pub fn lift_pure_star(s: &Star, i: u32, p: &Params) -> Star {
    let b = p.block();
    Star::new(
        b * s.center + i,
        s.leaves.iter().map(|l| b * l + i).collect(),
    )
}

/// The `j`-th smallest leaf (1-based) gets residue `n + 1 - j + i`.
pub fn lift_prime_star(s: &Star, i: u32, p: &Params) -> Star {
    let b = p.block();
    let sorted = s.sorted();
    let leaves = sorted
        .leaves
        .iter()
        .zip(1..)
        .map(|(l, j)| b * l + (b - j + i) % b)
        .collect();
    Star::new(b * s.center + i, leaves)
}

pub fn lift_mixed_star(m: &MixedStar, i: u32, p: &Params) -> Star {
    let b = p.block();
    let mut leaves: Vec<Vertex> = m.pure_leaves().map(|l| b * l + i).collect();
    for ((l, ann), j) in m.prime_leaves().zip(1u32..) {
        let offset = match ann.direction {
            Direction::Forward => (i + j) % b,
            Direction::Backward => (i + b * j - j) % b,
        };
        leaves.push(b * l + offset);
    }
    Star::new(b * m.center() + i, leaves)
}

/// Lift the little star `(c; l_1 < ... < l_{t-1})` (no leaves for an isolated
/// point) into `t` stars covering `(n+1){c, l_1, ..., l_{t-1}} + 0..=n`.
pub fn lift_little_star(little: &Star, p: &Params) -> Result<Vec<Star>> {
    let (n, q, b) = (p.n, p.q, p.block());
    let t = little.leaves.len() as u32 + 1;
    let c = b * little.center;
    let ls: Vec<Vertex> = little.sorted().leaves.iter().map(|l| b * l).collect();
    let l = |j: u32| ls[j as usize - 1];

    let rotation = |i: u32| Star::new(c + i, (1..=n).map(|m| l(i + 1) + (i + m) % b).collect());

    let stars = if t == 1 {
        vec![Star::new(c, (1..=n).map(|r| c + r).collect())]
    } else if p.k_prime_is_odd() && t <= q + 2 {
        // The closing pair keeps residue q + 1 of the center block free for
        // the last star, whose leaves fill the block of l_{t-1}.
        let mut stars: Vec<Star> = (0..t - 2).map(rotation).collect();
        let mut leaves: Vec<Vertex> = (1..=t - 2).map(|j| l(j) + j - 1).collect();
        leaves.extend((t - 1..=q).map(|r| c + r));
        leaves.push(l(t - 1) + q + 1);
        leaves.extend((q + 2..=n).map(|r| c + r));
        stars.push(Star::new(c + t - 2, leaves));
        let last = (0..=n)
            .filter(|&r| r != q + 1)
            .map(|r| l(t - 1) + r)
            .collect();
        stars.push(Star::new(c + q + 1, last));
        stars
    } else {
        let mut stars: Vec<Star> = (0..t - 1).map(rotation).collect();
        let mut leaves: Vec<Vertex> = (1..t).map(|j| l(j) + j - 1).collect();
        leaves.extend((t..=n).map(|r| c + r));
        stars.push(Star::new(c + t - 1, leaves));
        stars
    };

    let mut expected: Vec<Vertex> = std::iter::once(c)
        .chain(ls.iter().copied())
        .flat_map(|x| x..x + b)
        .collect();
    let mut got: Vec<Vertex> = stars.iter().flat_map(Star::vertices).collect();
    expected.sort_unstable();
    got.sort_unstable();
    if stars.len() != t as usize
        || expected != got
        || stars.iter().any(|s| s.leaves.len() != n as usize)
    {
        return Err(internal!(
            "lifted little star at {} does not tile its blocks",
            little.center
        ));
    }
    Ok(stars)
}

/// Lift every component, keeping track of where each star came from.
pub fn lift_components(f: &AlmostStarFactor, p: &Params) -> Result<Vec<LiftedComponent>> {
    let residues = 0..p.block();
    let mut out = Vec::new();
    for s in &f.pure_stars {
        let stars = residues.clone().map(|i| lift_pure_star(s, i, p)).collect();
        out.push(LiftedComponent {
            kind: ComponentKind::Pure,
            stars,
        });
    }
    for s in &f.prime_stars {
        let stars = residues.clone().map(|i| lift_prime_star(s, i, p)).collect();
        out.push(LiftedComponent {
            kind: ComponentKind::Prime,
            stars,
        });
    }
    let little = match (&f.little_star, f.isolated_vertex) {
        (Some(l), _) => Some(l.clone()),
        (None, Some(x)) => Some(Star::new(x, Vec::new())),
        (None, None) => None,
    };
    if let Some(l) = little {
        out.push(LiftedComponent {
            kind: ComponentKind::Little,
            stars: lift_little_star(&l, p)?,
        });
    }
    if let Some(m) = &f.mixed_star {
        let stars = residues.map(|i| lift_mixed_star(m, i, p)).collect();
        out.push(LiftedComponent {
            kind: ComponentKind::Mixed,
            stars,
        });
    }
    Ok(out)
}

/// The base star factor `B` on `v` vertices.
pub fn build_base_factor(f: &AlmostStarFactor, p: &Params) -> Result<StarFactor> {
    let stars = lift_components(f, p)?
        .into_iter()
        .flat_map(|c| c.stars)
        .collect();
    let factor = StarFactor { v: p.v, stars };
    factor.check_partition(p.n)?;
    Ok(factor)
}

/// Translate every label by `(n+1)j` modulo `v`.
pub fn develop_factor(base: &StarFactor, j: u32, p: &Params) -> StarFactor {
    let shift = (u64::from(p.block()) * u64::from(j) % u64::from(base.v)) as u32;
    let mv = |x: Vertex| ((u64::from(x) + u64::from(shift)) % u64::from(base.v)) as Vertex;
    let stars = base
        .stars
        .iter()
        .map(|s| Star::new(mv(s.center), s.leaves.iter().map(|&l| mv(l)).collect()))
        .collect();
    StarFactor { v: base.v, stars }
}

/// The `g` Part I factors `B + (n+1)j`.
pub fn part1_factors(base: &StarFactor, p: &Params) -> Vec<StarFactor> {
    (0..p.g).map(|j| develop_factor(base, j, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::almost::build_almost_factor;
    use crate::params::{derive_params, enumerate_admissible, LabeledDifference, Purity};

    #[test]
    fn pure_star_examples() {
        let p3 = derive_params(3, 20).unwrap();
        let s = Star::new(0, vec![3, 2, 1]);
        assert_eq!(lift_pure_star(&s, 1, &p3), Star::new(1, vec![13, 9, 5]));
        assert_eq!(lift_pure_star(&s, 0, &p3), Star::new(0, vec![12, 8, 4]));
        let p5 = derive_params(5, 162).unwrap();
        let s = Star::new(0, vec![5, 4, 3, 2, 1]);
        assert_eq!(
            lift_pure_star(&s, 2, &p5),
            Star::new(2, vec![32, 26, 20, 14, 8])
        );
    }

    #[test]
    fn prime_star_examples() {
        let p = derive_params(3, 32).unwrap();
        let s = Star::new(4, vec![7, 5, 6]);
        assert_eq!(lift_prime_star(&s, 0, &p), Star::new(16, vec![23, 26, 29]));
        assert_eq!(lift_prime_star(&s, 1, &p), Star::new(17, vec![20, 27, 30]));
    }

    fn annotated(center: Vertex, pure: &[Vertex], primes: &[(Vertex, Direction)]) -> MixedStar {
        let mut leaves = pure.to_vec();
        let mut annotations: Vec<LabeledDifference> = pure
            .iter()
            .map(|&l| LabeledDifference {
                value: l - center,
                purity: Purity::Pure,
                direction: Direction::Forward,
            })
            .collect();
        for &(l, direction) in primes {
            leaves.push(l);
            annotations.push(LabeledDifference {
                value: l - center,
                purity: Purity::Prime,
                direction,
            });
        }
        MixedStar {
            star: Star::new(center, leaves),
            annotations,
        }
    }

    #[test]
    fn mixed_star_examples() {
        let p = derive_params(5, 162).unwrap();
        let m = annotated(
            0,
            &[1, 2, 3],
            &[(4, Direction::Backward), (5, Direction::Backward)],
        );
        assert_eq!(
            lift_mixed_star(&m, 0, &p),
            Star::new(0, vec![6, 12, 18, 29, 34])
        );
        assert_eq!(
            lift_mixed_star(&m, 1, &p),
            Star::new(1, vec![7, 13, 19, 24, 35])
        );
        let m = annotated(
            0,
            &[1, 2, 3],
            &[(4, Direction::Forward), (5, Direction::Forward)],
        );
        assert_eq!(
            lift_mixed_star(&m, 0, &p),
            Star::new(0, vec![6, 12, 18, 25, 32])
        );
    }

    #[test]
    fn isolated_point_fans_out() {
        let p = derive_params(5, 162).unwrap();
        let stars = lift_little_star(&Star::new(6, vec![]), &p).unwrap();
        assert_eq!(stars, vec![Star::new(36, vec![37, 38, 39, 40, 41])]);
    }

    #[test]
    fn little_star_n3_t3() {
        let p = derive_params(3, 44).unwrap();
        assert_eq!(p.t, 3);
        let stars = lift_little_star(&Star::new(2, vec![9, 5]), &p).unwrap();
        assert_eq!(
            stars,
            vec![
                Star::new(8, vec![21, 22, 23]),
                Star::new(9, vec![20, 38, 11]),
                Star::new(10, vec![36, 37, 39]),
            ]
        );
    }

    #[test]
    fn little_star_closing_formula() {
        let p = derive_params(5, 102).unwrap();
        assert_eq!((p.g, p.t, p.q), (17, 5, 2));
        let stars = lift_little_star(&Star::new(7, vec![8, 9, 10, 11]), &p).unwrap();
        assert_eq!(stars.len(), 5);
        assert_eq!(stars[0], Star::new(42, vec![49, 50, 51, 52, 53]));
        assert_eq!(stars[1], Star::new(43, vec![56, 57, 58, 59, 54]));
        assert_eq!(stars[4], Star::new(46, vec![48, 55, 62, 69, 47]));
    }

    #[test]
    fn base_factor_sizes() {
        for (n, v, stars) in [(3, 32, 8), (5, 162, 27), (3, 20, 5)] {
            let p = derive_params(n, v).unwrap();
            let b = build_base_factor(&build_almost_factor(&p).unwrap(), &p).unwrap();
            assert_eq!(b.stars.len(), stars);
        }
    }

    #[test]
    fn develop_examples() {
        let p = derive_params(3, 20).unwrap();
        let b = StarFactor {
            v: 20,
            stars: vec![Star::new(0, vec![12, 8, 4])],
        };
        assert_eq!(develop_factor(&b, 0, &p), b);
        assert_eq!(
            develop_factor(&b, 1, &p).stars[0],
            Star::new(4, vec![16, 12, 8])
        );
        assert_eq!(
            develop_factor(&b, 2, &p).stars[0],
            Star::new(8, vec![0, 16, 12])
        );
    }

    #[test]
    fn translates_cover_block_differences_once() {
        for n in [3, 5, 7] {
            for p in enumerate_admissible(n, 700).unwrap().into_iter().skip(1) {
                let b = build_base_factor(&build_almost_factor(&p).unwrap(), &p).unwrap();
                let mut seen = std::collections::HashSet::new();
                let mut block_edges = 0;
                for f in part1_factors(&b, &p) {
                    f.check_partition(n).unwrap();
                    for s in &f.stars {
                        for (a, x) in s.edges() {
                            let e = (a.min(x), a.max(x));
                            assert!(seen.insert(e), "{p}: edge {e:?} repeated");
                            if (x + p.v - a) % p.block() == 0 {
                                block_edges += 1;
                            }
                        }
                    }
                }
                // Multiples of n+1 below v/2, each with v edges.
                let multiples = (p.v - 2) / 2 / p.block();
                assert_eq!(block_edges, multiples * p.v, "{p}");
            }
        }
    }
}
