//! Balanced star arrays, Part II factors, and assembly of the full
//! decomposition.
//!
//! Every non-pure edge of the Part I factors is credited to one array `T_i`:
//! an edge whose shorter cyclic direction runs from `a` to `a + d` is filed
//! under `i = a mod (n+1)`, column `d mod (n+1)`. The differences left over in
//! each array form full rows, and a full row `(d_1, ..., d_n)` of `T_i`
//! yields the base star `(i; i+d_1, ..., i+d_n)`. Its translates by multiples
//! of `n + 1` are vertex-disjoint because the leaves sit in distinct residue
//! classes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::almost::{build_almost_factor, AlmostStarFactor};
use crate::error::{internal, Error, Result};
use crate::lift::{build_base_factor, lift_components, part1_factors, ComponentKind, StarFactor};
use crate::params::{derive_params, Params, Star, Vertex};

/// One row of an array; `row[j - 1]` holds the column `j` entry.
pub type Row = Vec<Option<u32>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedStarArray {
    pub residue: u32,
    pub columns: u32,
    pub rows: Vec<Row>,
    /// The first `t1_rows` rows record Part I differences.
    pub t1_rows: usize,
    pub full_diff_set: Vec<u32>,
}

impl BalancedStarArray {
    pub fn t1(&self) -> &[Row] {
        &self.rows[..self.t1_rows]
    }

    pub fn t2(&self) -> &[Row] {
        &self.rows[self.t1_rows..]
    }

    pub fn entries(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows.iter().flatten().flatten().copied()
    }
}

/// One 1-factor and `s` star factors on `v` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub v: u32,
    pub n: u32,
    pub one_factor: Vec<(Vertex, Vertex)>,
    pub star_classes: Vec<StarFactor>,
}

/// `D' = { d in 1..=(v-2)/2 : d != 0 mod (n+1) }`, shared by every residue.
pub fn build_difference_universe(p: &Params) -> Vec<u32> {
    (1..=p.max_star_difference())
        .filter(|d| d % p.block() != 0)
        .collect()
}

/// Table and difference an edge is credited to, or `None` for a pure edge.
fn credit(center: Vertex, leaf: Vertex, p: &Params) -> Result<Option<(u32, u32)>> {
    let (v, b) = (p.v, p.block());
    let fwd = (leaf + v - center) % v;
    if fwd.is_multiple_of(b) {
        return Ok(None);
    }
    match (2 * fwd).cmp(&v) {
        std::cmp::Ordering::Less => Ok(Some((center % b, fwd))),
        std::cmp::Ordering::Greater => Ok(Some((leaf % b, v - fwd))),
        std::cmp::Ordering::Equal => Err(internal!("edge ({center}, {leaf}) has difference v/2")),
    }
}

/// The `T^1` rows of every array, from the lifted non-pure components.
///
/// Rows come in component order (prime stars, little star, mixed star); each
/// component contributes at most one row per table.
pub fn record_part1_differences(
    p: &Params,
    almost: &AlmostStarFactor,
) -> Result<Vec<BalancedStarArray>> {
    let b = p.block();
    let universe = build_difference_universe(p);
    let mut tables: Vec<Vec<Row>> = vec![Vec::new(); b as usize];
    for component in lift_components(almost, p)? {
        if component.kind == ComponentKind::Pure {
            continue;
        }
        let mut rows: BTreeMap<u32, Row> = BTreeMap::new();
        for star in &component.stars {
            for (c, l) in star.edges() {
                let Some((table, d)) = credit(c, l, p)? else {
                    if component.kind == ComponentKind::Prime {
                        return Err(internal!("prime star {star} has a pure edge"));
                    }
                    continue;
                };
                let row = rows
                    .entry(table)
                    .or_insert_with(|| vec![None; p.n as usize]);
                let cell = &mut row[(d % b) as usize - 1];
                if let Some(old) = cell.replace(d) {
                    return Err(internal!(
                        "differences {old} and {d} collide in table {table}, column {}",
                        d % b
                    ));
                }
            }
        }
        for (table, row) in rows {
            tables[table as usize].push(row);
        }
    }
    Ok(tables
        .into_iter()
        .zip(0..)
        .map(|(rows, residue)| BalancedStarArray {
            residue,
            columns: p.n,
            t1_rows: rows.len(),
            rows,
            full_diff_set: universe.clone(),
        })
        .collect())
}

/// Fill each array with `T^2` rows built from its unused differences.
pub fn complete_arrays(
    partial: Vec<BalancedStarArray>,
    p: &Params,
) -> Result<Vec<BalancedStarArray>> {
    let b = p.block();
    partial
        .into_iter()
        .map(|mut a| {
            let residue = a.residue;
            let mut left: BTreeSet<u32> = a.full_diff_set.iter().copied().collect();
            for d in a.entries() {
                if !left.remove(&d) {
                    return Err(Error::Imbalance {
                        residue,
                        reason: format!("difference {d} recorded twice or outside D'"),
                    });
                }
            }
            let columns: Vec<Vec<u32>> = (1..b)
                .map(|j| left.iter().copied().filter(|d| d % b == j).collect())
                .collect();
            let height = columns[0].len();
            if let Some(j) = columns.iter().position(|c| c.len() != height) {
                return Err(Error::Imbalance {
                    residue,
                    reason: format!(
                        "column {} has {} free differences, column 1 has {height}",
                        j + 1,
                        columns[j].len()
                    ),
                });
            }
            a.rows.truncate(a.t1_rows);
            a.rows
                .extend((0..height).map(|r| columns.iter().map(|c| Some(c[r])).collect()));
            Ok(a)
        })
        .collect()
}

/// One star factor per `T^2` row: the base star and its `g` translates.
pub fn part2_factors(arrays: &[BalancedStarArray], p: &Params) -> Vec<StarFactor> {
    let (v, b) = (p.v, p.block());
    let mut out = Vec::new();
    for a in arrays {
        for row in a.t2() {
            let stars = (0..p.g)
                .map(|j| {
                    let c = a.residue + b * j;
                    let leaves = row.iter().flatten().map(|d| (c + d) % v).collect();
                    Star::new(c, leaves)
                })
                .collect();
            out.push(StarFactor { v, stars });
        }
    }
    out
}

fn one_factor(v: u32) -> Vec<(Vertex, Vertex)> {
    (0..v / 2).map(|i| (i, i + v / 2)).collect()
}

/// The decomposition for `v = 2(n+1)`.
pub fn base_case(p: &Params) -> Result<Decomposition> {
    if p.k_prime != 0 {
        return Err(Error::InvalidArgument(format!(
            "base case needs v = 2(n+1), got v = {}",
            p.v
        )));
    }
    let (n, v) = (p.n, p.v);
    let star = |c: u32| Star::new(c % v, (1..=n).map(|r| (c + r) % v).collect());
    let star_classes = (0..=n)
        .map(|i| StarFactor {
            v,
            stars: vec![star(i), star(i + n + 1)],
        })
        .collect();
    Ok(Decomposition {
        v,
        n,
        one_factor: one_factor(v),
        star_classes,
    })
}

/// Every intermediate object of the construction for one instance.
#[derive(Debug, Clone)]
pub struct Construction {
    pub params: Params,
    pub almost: AlmostStarFactor,
    pub base: StarFactor,
    pub arrays: Vec<BalancedStarArray>,
    pub decomposition: Decomposition,
}

/// Run the full construction for `k' >= 1`, keeping the intermediate stages.
pub fn construct_with_stages(p: &Params) -> Result<Construction> {
    let almost = build_almost_factor(p)?;
    let base = build_base_factor(&almost, p)?;
    let arrays = complete_arrays(record_part1_differences(p, &almost)?, p)?;
    let mut star_classes = part1_factors(&base, p);
    star_classes.extend(part2_factors(&arrays, p));
    if star_classes.len() != p.s as usize {
        return Err(internal!(
            "built {} star factors, expected {}",
            star_classes.len(),
            p.s
        ));
    }
    let decomposition = Decomposition {
        v: p.v,
        n: p.n,
        one_factor: one_factor(p.v),
        star_classes,
    };
    Ok(Construction {
        params: *p,
        almost,
        base,
        arrays,
        decomposition,
    })
}

pub fn construct_urd(n: u32, v: u32) -> Result<Decomposition> {
    let p = derive_params(n, v)?;
    if p.k_prime == 0 {
        return base_case(&p);
    }
    Ok(construct_with_stages(&p)?.decomposition)
}
