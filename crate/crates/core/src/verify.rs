//! Independent checks of a finished decomposition and of balanced star arrays.
//!
//! Nothing here reuses the constructor: edges are rebuilt from the raw vertex
//! pairs and every expected count is recomputed from `v` and `n`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arrays::{BalancedStarArray, Decomposition};
use crate::params::{Params, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    UncoveredEdge,
    DoublyCoveredEdge,
    NonSpanningClass,
    MalformedBlock,
    WrongClassCount,
    NotAMatching,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::UncoveredEdge => "uncovered-edge",
            ViolationKind::DoublyCoveredEdge => "doubly-covered-edge",
            ViolationKind::NonSpanningClass => "non-spanning-class",
            ViolationKind::MalformedBlock => "malformed-block",
            ViolationKind::WrongClassCount => "wrong-class-count",
            ViolationKind::NotAMatching => "not-a-matching",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "type")]
pub enum Witness {
    Edge {
        u: Vertex,
        x: Vertex,
        times: u32,
    },
    Vertex {
        class: Option<usize>,
        vertex: Vertex,
        times: u32,
    },
    Block {
        class: usize,
        block: usize,
        reason: String,
    },
    Class {
        class: usize,
        blocks: usize,
        expected: usize,
    },
    Count {
        found: usize,
        expected: Option<u64>,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Edge { u, x, times } => write!(f, "edge {{{u}, {x}}} covered {times} times"),
            Witness::Vertex {
                class: Some(c),
                vertex,
                times,
            } => {
                write!(f, "vertex {vertex} appears {times} times in class {c}")
            }
            Witness::Vertex {
                class: None,
                vertex,
                times,
            } => {
                write!(f, "vertex {vertex} appears {times} times in the 1-factor")
            }
            Witness::Block {
                class,
                block,
                reason,
            } => {
                write!(f, "class {class}, block {block}: {reason}")
            }
            Witness::Class {
                class,
                blocks,
                expected,
            } => {
                write!(f, "class {class} has {blocks} blocks, expected {expected}")
            }
            Witness::Count {
                found,
                expected: Some(e),
            } => {
                write!(f, "{found} star classes, expected {e}")
            }
            Witness::Count {
                found,
                expected: None,
            } => {
                write!(
                    f,
                    "{found} star classes, but no integral class count exists"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: Witness,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.witness)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub observed: u64,
    pub expected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub ok: bool,
    /// Keyed by cyclic difference `1..=v/2`.
    pub edge_census: BTreeMap<u32, CensusEntry>,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn total_edges(&self) -> u64 {
        self.edge_census.values().map(|c| c.observed).sum()
    }

    pub fn first(&self, kind: ViolationKind) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == kind)
    }
}

/// Upper-triangle edge counter for `K_v`.
struct EdgeCounts {
    v: u64,
    counts: Vec<u32>,
}

impl EdgeCounts {
    fn new(v: u32) -> Self {
        let v = u64::from(v);
        Self {
            v,
            counts: vec![0; (v * v.saturating_sub(1) / 2) as usize],
        }
    }

    fn index(&self, u: u64, x: u64) -> usize {
        // Rows of the strict upper triangle, row u holding x in u+1..v.
        (u * (2 * self.v - u - 1) / 2 + (x - u - 1)) as usize
    }

    fn add(&mut self, a: Vertex, b: Vertex) {
        let (u, x) = (u64::from(a.min(b)), u64::from(a.max(b)));
        let i = self.index(u, x);
        self.counts[i] = self.counts[i].saturating_add(1);
    }

    fn iter(&self) -> impl Iterator<Item = (Vertex, Vertex, u32)> + '_ {
        let v = self.v as Vertex;
        (0..v)
            .flat_map(move |u| (u + 1..v).map(move |x| (u, x)))
            .zip(&self.counts)
            .map(|((u, x), &c)| (u, x, c))
    }
}

fn expected_class_count(v: u32, n: u32) -> Option<u64> {
    let (v, n) = (u64::from(v), u64::from(n));
    let num = v.checked_sub(2)? * (n + 1);
    (n > 0 && num % (2 * n) == 0).then(|| num / (2 * n))
}

/// Check `d` against the definition of a uniformly resolvable decomposition
/// of `K_v` into one 1-factor and `n`-star factors.
pub fn verify_urd(d: &Decomposition) -> VerificationReport {
    let (v, n) = (d.v, d.n);
    let mut structural = Vec::new();
    let mut edges = EdgeCounts::new(v);
    let in_range = |x: Vertex| x < v;

    let mut hits = vec![0u32; v as usize];
    for &(a, b) in &d.one_factor {
        if a == b || !in_range(a) || !in_range(b) {
            let bad = if in_range(a) { b } else { a };
            structural.push(Violation {
                kind: ViolationKind::NotAMatching,
                witness: Witness::Vertex {
                    class: None,
                    vertex: bad,
                    times: 1,
                },
            });
            continue;
        }
        hits[a as usize] += 1;
        hits[b as usize] += 1;
        edges.add(a, b);
    }
    for (x, &h) in hits.iter().enumerate() {
        if h != 1 {
            structural.push(Violation {
                kind: ViolationKind::NotAMatching,
                witness: Witness::Vertex {
                    class: None,
                    vertex: x as Vertex,
                    times: h,
                },
            });
        }
    }

    let blocks_expected = if n + 1 > 0 && v % (n + 1) == 0 {
        Some((v / (n + 1)) as usize)
    } else {
        None
    };
    for (ci, class) in d.star_classes.iter().enumerate() {
        if blocks_expected != Some(class.stars.len()) {
            structural.push(Violation {
                kind: ViolationKind::NonSpanningClass,
                witness: Witness::Class {
                    class: ci,
                    blocks: class.stars.len(),
                    expected: blocks_expected.unwrap_or(0),
                },
            });
        }
        let mut hits = vec![0u32; v as usize];
        for (bi, star) in class.stars.iter().enumerate() {
            let reason = if star.leaves.len() != n as usize {
                Some(format!("{} leaves instead of {n}", star.leaves.len()))
            } else if let Some(x) = star.vertices().find(|&x| !in_range(x)) {
                Some(format!("vertex {x} out of range"))
            } else {
                let mut vs: Vec<Vertex> = star.vertices().collect();
                vs.sort_unstable();
                vs.windows(2)
                    .find(|w| w[0] == w[1])
                    .map(|w| format!("vertex {} repeated", w[0]))
            };
            if let Some(reason) = reason {
                structural.push(Violation {
                    kind: ViolationKind::MalformedBlock,
                    witness: Witness::Block {
                        class: ci,
                        block: bi,
                        reason,
                    },
                });
            }
            for x in star.vertices().filter(|&x| in_range(x)) {
                hits[x as usize] += 1;
            }
            for (c, l) in star.edges() {
                if c != l && in_range(c) && in_range(l) {
                    edges.add(c, l);
                }
            }
        }
        for (x, &h) in hits.iter().enumerate() {
            if h != 1 {
                structural.push(Violation {
                    kind: ViolationKind::NonSpanningClass,
                    witness: Witness::Vertex {
                        class: Some(ci),
                        vertex: x as Vertex,
                        times: h,
                    },
                });
            }
        }
    }

    let mut census: BTreeMap<u32, CensusEntry> = (1..=v / 2)
        .map(|dd| {
            let expected = if 2 * dd == v { v / 2 } else { v };
            (
                dd,
                CensusEntry {
                    observed: 0,
                    expected: u64::from(expected),
                },
            )
        })
        .collect();
    let (mut violations, mut uncovered) = (Vec::new(), Vec::new());
    for (u, x, c) in edges.iter() {
        let gap = x - u;
        let diff = gap.min(v - gap);
        if let Some(e) = census.get_mut(&diff) {
            e.observed += u64::from(c);
        }
        match c {
            0 => uncovered.push(Violation {
                kind: ViolationKind::UncoveredEdge,
                witness: Witness::Edge { u, x, times: 0 },
            }),
            1 => {}
            _ => violations.push(Violation {
                kind: ViolationKind::DoublyCoveredEdge,
                witness: Witness::Edge { u, x, times: c },
            }),
        }
    }
    violations.extend(uncovered);
    violations.extend(structural);

    let expected = expected_class_count(v, n);
    if expected != Some(d.star_classes.len() as u64) {
        violations.push(Violation {
            kind: ViolationKind::WrongClassCount,
            witness: Witness::Count {
                found: d.star_classes.len(),
                expected,
            },
        });
    }

    VerificationReport {
        ok: violations.is_empty(),
        edge_census: census,
        violations,
    }
}

/// Where a balanced star array goes wrong; rows and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrayWitness {
    WrongColumn { row: usize, col: usize, value: u32 },
    Duplicate { row: usize, col: usize, value: u32 },
    OutsideUniverse { row: usize, col: usize, value: u32 },
    Missing { value: u32 },
    RowLength { row: usize, len: usize },
    EmptyInFullRow { row: usize, col: usize },
    ExtraPartialRow { row: usize },
    PartialRowShape { row: usize, col: usize },
}

impl fmt::Display for ArrayWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrayWitness::WrongColumn { row, col, value } => {
                write!(f, "(row {row}, col {col}): {value} is not {col} mod n+1")
            }
            ArrayWitness::Duplicate { row, col, value } => {
                write!(f, "(row {row}, col {col}): {value} already appears")
            }
            ArrayWitness::OutsideUniverse { row, col, value } => {
                write!(
                    f,
                    "(row {row}, col {col}): {value} is not an admissible difference"
                )
            }
            ArrayWitness::Missing { value } => write!(f, "difference {value} never appears"),
            ArrayWitness::RowLength { row, len } => write!(f, "row {row} has {len} cells"),
            ArrayWitness::EmptyInFullRow { row, col } => {
                write!(f, "(row {row}, col {col}) is empty outside the partial row")
            }
            ArrayWitness::ExtraPartialRow { row } => write!(f, "row {row} is a second partial row"),
            ArrayWitness::PartialRowShape { row, col } => {
                write!(f, "(row {row}, col {col}) breaks the partial row layout")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayCheck {
    pub ok: bool,
    pub witness: Option<ArrayWitness>,
}

/// Check partition of `D'`, column congruences and the partial-row layout.
pub fn verify_balanced_array(a: &BalancedStarArray, p: &Params) -> ArrayCheck {
    let fail = |w| ArrayCheck {
        ok: false,
        witness: Some(w),
    };
    let (n, b) = (p.n as usize, p.n + 1);
    let half = (p.v.saturating_sub(2)) / 2;
    let mut seen = vec![false; half as usize + 1];
    let mut partial_seen = false;
    for (ri, row) in a.rows.iter().enumerate() {
        let r = ri + 1;
        if row.len() != n {
            return fail(ArrayWitness::RowLength {
                row: r,
                len: row.len(),
            });
        }
        let in_t1 = ri < a.t1_rows;
        if row.iter().any(Option::is_none) {
            if !in_t1 {
                let col = row.iter().position(Option::is_none).unwrap_or(0) + 1;
                return fail(ArrayWitness::EmptyInFullRow { row: r, col });
            }
            if partial_seen {
                return fail(ArrayWitness::ExtraPartialRow { row: r });
            }
            partial_seen = true;
            let q = (n - 1) / 2;
            if let Some(ci) = row
                .iter()
                .enumerate()
                .position(|(ci, c)| c.is_some() != (ci < q))
            {
                return fail(ArrayWitness::PartialRowShape {
                    row: r,
                    col: ci + 1,
                });
            }
        }
        for (ci, cell) in row.iter().enumerate() {
            let (col, Some(value)) = (ci + 1, *cell) else {
                continue;
            };
            if value == 0 || value > half || value % b == 0 {
                return fail(ArrayWitness::OutsideUniverse { row: r, col, value });
            }
            if (value % b) as usize != col {
                return fail(ArrayWitness::WrongColumn { row: r, col, value });
            }
            if std::mem::replace(&mut seen[value as usize], true) {
                return fail(ArrayWitness::Duplicate { row: r, col, value });
            }
        }
    }
    if let Some(value) = (1..=half).find(|&d| d % b != 0 && !seen[d as usize]) {
        return fail(ArrayWitness::Missing { value });
    }
    ArrayCheck {
        ok: true,
        witness: None,
    }
}
