//! Labeled Bratteli diagrams.
//!
//! Level `n` lists the summands `C(Z) ⊗ M_r` of the `n`-th building block,
//! where the base `Z` is a point or `[0,1]`. A bundle `(n, i → j)` carries one
//! eigenvalue function per copy of summand `i` inside summand `j` of level
//! `n+1`. Projections are full, so a summand's rank equals its size.
//!
//! Levels, summands, labels and slots are indexed from zero in the API and
//! printed from one in messages and DOT output.
//!
//! Slot layout: inside target summand `j`, the copies are placed as
//! `a ⊗ q_y`, ordered by source summand, then source slot, then label. The
//! slot of source slot `u` under label `y` of bundle `(n, i → j)` is
//! `offset(i) + u·s + y` with `s` the label count and `offset(i)` the sum of
//! `r_n^{i'}·s^{j i'}` over `i' < i`. This is the same layout the matrix-unit
//! homomorphisms of [`crate::cartan_hom`] use.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int_matrix::IntMatrix;
use crate::interval_maps::PLMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    Point,
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SummandShape {
    pub base: Base,
    pub size: u64,
}

impl SummandShape {
    pub fn point(size: u64) -> Self {
        SummandShape {
            base: Base::Point,
            size,
        }
    }

    pub fn interval(size: u64) -> Self {
        SummandShape {
            base: Base::Interval,
            size,
        }
    }

    /// Rank of the (full) projection cutting down the summand.
    pub fn rank(&self) -> u64 {
        self.size
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeBundle {
    pub level: usize,
    pub source: usize,
    pub target: usize,
    pub labels: Vec<PLMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    EmptyLevel {
        level: usize,
    },
    ZeroSize {
        level: usize,
        summand: usize,
    },
    DanglingBundle {
        level: usize,
        source: usize,
        target: usize,
    },
    DuplicateBundle {
        level: usize,
        source: usize,
        target: usize,
    },
    EmptyBundle {
        level: usize,
        source: usize,
        target: usize,
    },
    PointLabel {
        level: usize,
        source: usize,
        target: usize,
    },
    /// `r_{n+1}^j ≠ Σ_i r_n^i s_n^{ji}`; `level` is `n`.
    SizeMismatch {
        level: usize,
        target: usize,
        expected: u64,
        got: u64,
    },
    NoIncoming {
        level: usize,
        summand: usize,
    },
    NoOutgoing {
        level: usize,
        summand: usize,
    },
    BadRepeat(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyLevel { level } => write!(f, "level {} has no summands", level + 1),
            ZeroSize { level, summand } => {
                write!(f, "summand ({},{}) has size 0", level + 1, summand + 1)
            }
            DanglingBundle {
                level,
                source,
                target,
            } => write!(
                f,
                "bundle at level {} from {} to {} references a missing summand",
                level + 1,
                source + 1,
                target + 1
            ),
            DuplicateBundle {
                level,
                source,
                target,
            } => write!(
                f,
                "duplicate bundle at level {} from {} to {}",
                level + 1,
                source + 1,
                target + 1
            ),
            EmptyBundle {
                level,
                source,
                target,
            } => write!(
                f,
                "bundle at level {} from {} to {} has no labels",
                level + 1,
                source + 1,
                target + 1
            ),
            PointLabel {
                level,
                source,
                target,
            } => write!(
                f,
                "bundle at level {} from {} to {} touches a point base but carries a non-identity label",
                level + 1,
                source + 1,
                target + 1
            ),
            SizeMismatch {
                level,
                target,
                expected,
                got,
            } => write!(
                f,
                "size violation at level {}: expected {}, got {} (summand ({},{}))",
                level + 1,
                expected,
                got,
                level + 2,
                target + 1
            ),
            NoIncoming { level, summand } => {
                write!(f, "no incoming bundle at ({},{})", level + 1, summand + 1)
            }
            NoOutgoing { level, summand } => {
                write!(f, "no outgoing bundle at ({},{})", level + 1, summand + 1)
            }
            BadRepeat(why) => write!(f, "repetition rule not applicable: {why}"),
        }
    }
}

/// A finite labeled Bratteli diagram, optionally closed off by a repetition
/// rule: when `repeat` is set, the last layer of bundles repeats forever and
/// each new level's sizes are obtained from the previous ones through that
/// layer's multiplicity matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledBratteliDiagram {
    levels: Vec<Vec<SummandShape>>,
    bundles: Vec<EdgeBundle>,
    repeat: bool,
}

impl LabeledBratteliDiagram {
    /// Builds a diagram without validating it. Bundles are stored sorted by
    /// `(level, source, target)`.
    pub fn from_parts(
        levels: Vec<Vec<SummandShape>>,
        mut bundles: Vec<EdgeBundle>,
        repeat: bool,
    ) -> Self {
        bundles.sort_by_key(|b| (b.level, b.source, b.target));
        LabeledBratteliDiagram {
            levels,
            bundles,
            repeat,
        }
    }

    /// Builds and validates.
    pub fn new(
        levels: Vec<Vec<SummandShape>>,
        bundles: Vec<EdgeBundle>,
        repeat: bool,
    ) -> Result<Self> {
        let d = Self::from_parts(levels, bundles, repeat);
        let v = d.validate();
        if v.is_empty() {
            Ok(d)
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Single-summand tower over a point with the given sizes. Each size must
    /// divide the next.
    pub fn point_tower(sizes: &[u64], repeat: bool) -> Result<Self> {
        Self::single_summand_tower(Base::Point, sizes, repeat, |_, k| {
            Ok(vec![PLMap::identity(); k])
        })
    }

    pub(crate) fn single_summand_tower<F>(
        base: Base,
        sizes: &[u64],
        repeat: bool,
        mut labels: F,
    ) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<Vec<PLMap>>,
    {
        if sizes.is_empty() {
            return Err(Error::Argument("a tower needs at least one level".into()));
        }
        let mut bundles = Vec::new();
        for (n, w) in sizes.windows(2).enumerate() {
            if w[0] == 0 || w[1] % w[0] != 0 || w[1] == 0 {
                return Err(Error::Argument(format!(
                    "size {} does not divide size {} (levels {} and {})",
                    w[0],
                    w[1],
                    n + 1,
                    n + 2
                )));
            }
            bundles.push(EdgeBundle {
                level: n,
                source: 0,
                target: 0,
                labels: labels(n, (w[1] / w[0]) as usize)?,
            });
        }
        let levels = sizes
            .iter()
            .map(|&size| vec![SummandShape { base, size }])
            .collect();
        Self::new(levels, bundles, repeat)
    }

    pub fn levels(&self) -> &[Vec<SummandShape>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> Result<&[SummandShape]> {
        self.levels
            .get(n)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Range(format!("level {} does not exist", n + 1)))
    }

    pub fn bundles(&self) -> &[EdgeBundle] {
        &self.bundles
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn repeats(&self) -> bool {
        self.repeat
    }

    pub fn sizes(&self, n: usize) -> Result<Vec<u64>> {
        Ok(self.level(n)?.iter().map(|s| s.size).collect())
    }

    pub fn is_af(&self) -> bool {
        self.levels.iter().flatten().all(|s| s.base == Base::Point)
    }

    pub fn bundle(&self, level: usize, source: usize, target: usize) -> Option<&EdgeBundle> {
        self.bundles
            .binary_search_by_key(&(level, source, target), |b| (b.level, b.source, b.target))
            .ok()
            .map(|k| &self.bundles[k])
    }

    pub fn bundles_at(&self, level: usize) -> impl Iterator<Item = &EdgeBundle> {
        self.bundles.iter().filter(move |b| b.level == level)
    }

    pub fn label_count(&self, level: usize, source: usize, target: usize) -> usize {
        self.bundle(level, source, target)
            .map_or(0, |b| b.labels.len())
    }

    /// Every violated invariant; empty iff the diagram is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (n, lvl) in self.levels.iter().enumerate() {
            if lvl.is_empty() {
                out.push(Violation::EmptyLevel { level: n });
            }
            for (i, s) in lvl.iter().enumerate() {
                if s.size == 0 {
                    out.push(Violation::ZeroSize {
                        level: n,
                        summand: i,
                    });
                }
            }
        }
        let exists = |n: usize, i: usize| self.levels.get(n).is_some_and(|l| i < l.len());
        let mut seen = BTreeMap::new();
        for b in &self.bundles {
            let (level, source, target) = (b.level, b.source, b.target);
            if !exists(level, source) || !exists(level + 1, target) {
                out.push(Violation::DanglingBundle {
                    level,
                    source,
                    target,
                });
                continue;
            }
            if seen.insert((level, source, target), ()).is_some() {
                out.push(Violation::DuplicateBundle {
                    level,
                    source,
                    target,
                });
            }
            if b.labels.is_empty() {
                out.push(Violation::EmptyBundle {
                    level,
                    source,
                    target,
                });
            }
            let touches_point = self.levels[level][source].base == Base::Point
                || self.levels[level + 1][target].base == Base::Point;
            if touches_point && b.labels.iter().any(|l| *l != PLMap::identity()) {
                out.push(Violation::PointLabel {
                    level,
                    source,
                    target,
                });
            }
        }
        for n in 0..self.levels.len().saturating_sub(1) {
            for (j, tgt) in self.levels[n + 1].iter().enumerate() {
                let mut got: u64 = 0;
                let mut incoming = false;
                for (i, src) in self.levels[n].iter().enumerate() {
                    let s = self.label_count(n, i, j) as u64;
                    incoming |= s > 0;
                    got = got.saturating_add(src.size.saturating_mul(s));
                }
                if !incoming {
                    out.push(Violation::NoIncoming {
                        level: n + 1,
                        summand: j,
                    });
                }
                if got != tgt.size {
                    out.push(Violation::SizeMismatch {
                        level: n,
                        target: j,
                        expected: tgt.size,
                        got,
                    });
                }
            }
            for i in 0..self.levels[n].len() {
                let outgoing = (0..self.levels[n + 1].len()).any(|j| self.label_count(n, i, j) > 0);
                if !outgoing {
                    out.push(Violation::NoOutgoing {
                        level: n,
                        summand: i,
                    });
                }
            }
        }
        if self.repeat {
            if let Some(why) = self.repeat_obstruction() {
                out.push(Violation::BadRepeat(why));
            }
        }
        out
    }

    fn repeat_obstruction(&self) -> Option<String> {
        let d = self.levels.len();
        if d < 2 {
            return Some("at least two levels are needed".into());
        }
        let bases = |n: usize| self.levels[n].iter().map(|s| s.base).collect::<Vec<_>>();
        if bases(d - 2) != bases(d - 1) {
            return Some("the last two levels differ in summand count or bases".into());
        }
        None
    }

    /// Label-count matrix `S_n` (rows: summands of level `n+1`, columns:
    /// summands of level `n`).
    pub fn multiplicity_matrix(&self, n: usize) -> Result<IntMatrix> {
        if n + 1 >= self.levels.len() {
            return Err(Error::Range(format!(
                "level {} has no successor (diagram depth {})",
                n + 1,
                self.levels.len()
            )));
        }
        let mut m = IntMatrix::zeros(self.levels[n + 1].len(), self.levels[n].len());
        for b in self.bundles_at(n) {
            m.set(b.target, b.source, b.labels.len() as i64);
        }
        Ok(m)
    }

    /// Product `S_{to-1} ⋯ S_from`; the identity when `from == to`.
    pub fn multiplicity_between(&self, from: usize, to: usize) -> Result<IntMatrix> {
        if from > to {
            return Err(Error::Argument(format!(
                "level {} precedes level {}",
                to + 1,
                from + 1
            )));
        }
        let mut acc = IntMatrix::identity(self.level(from)?.len());
        for n in from..to {
            acc = self.multiplicity_matrix(n)?.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Start of the block of source summand `i` inside target summand `j`
    /// of level `n+1`.
    pub fn block_offset(&self, n: usize, source: usize, target: usize) -> u64 {
        (0..source)
            .map(|i| self.levels[n][i].size * self.label_count(n, i, target) as u64)
            .sum()
    }

    /// Slot of level `n+1` reached from slot `u` of summand `source` along
    /// label `y` of bundle `(n, source → target)`.
    pub fn arrival_slot(&self, n: usize, source: usize, target: usize, label: usize, u: u64) -> u64 {
        let s = self.label_count(n, source, target) as u64;
        self.block_offset(n, source, target) + u * s + label as u64
    }

    /// Inverse of [`Self::arrival_slot`]: decomposes slot `slot` of summand
    /// `target` at level `n+1` into `(source, label, source slot)`.
    pub fn decompose_slot(&self, n: usize, target: usize, slot: u64) -> Option<(usize, usize, u64)> {
        let mut offset = 0u64;
        for (i, src) in self.levels.get(n)?.iter().enumerate() {
            let s = self.label_count(n, i, target) as u64;
            let width = src.size * s;
            if slot < offset + width {
                let rem = slot - offset;
                return Some((i, (rem % s) as usize, rem / s));
            }
            offset += width;
        }
        None
    }

    /// Extends the diagram to `total` levels with the repetition rule.
    pub fn unrolled(&self, total: usize) -> Result<Self> {
        if total <= self.levels.len() {
            return Ok(self.clone());
        }
        if !self.repeat {
            return Err(Error::Range(format!(
                "diagram has {} levels and no repetition rule; {} requested",
                self.levels.len(),
                total
            )));
        }
        let d = self.levels.len();
        let s = self.multiplicity_matrix(d - 2)?;
        let template: Vec<EdgeBundle> = self.bundles_at(d - 2).cloned().collect();
        let mut out = self.clone();
        while out.levels.len() < total {
            let n = out.levels.len() - 1;
            let sizes: Vec<u64> = out.levels[n].iter().map(|x| x.size).collect();
            let next = s.mul_vec(&sizes)?;
            let shapes = next
                .into_iter()
                .zip(&out.levels[n])
                .map(|(size, prev)| SummandShape {
                    base: prev.base,
                    size: size as u64,
                })
                .collect();
            out.levels.push(shapes);
            out.bundles.extend(template.iter().map(|b| EdgeBundle {
                level: n,
                ..b.clone()
            }));
        }
        Ok(out)
    }

    /// Keeps only levels `stages`, composing labels along every chain of
    /// intermediate bundles.
    ///
    /// Composite labels of a bundle are ordered lexicographically by their
    /// chains, first step most significant. For single-summand diagrams this
    /// keeps the slot layout unchanged.
    pub fn telescope(&self, stages: &[usize]) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Argument("no stages given".into()));
        }
        if stages.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("stages must be strictly increasing".into()));
        }
        if let Some(&last) = stages.last() {
            self.level(last)?;
        }
        let levels = stages.iter().map(|&n| self.levels[n].clone()).collect();
        let mut bundles = Vec::new();
        for (k, w) in stages.windows(2).enumerate() {
            for i in 0..self.levels[w[0]].len() {
                for (j, labels) in self.composite_labels(w[0], i, w[1]) {
                    bundles.push(EdgeBundle {
                        level: k,
                        source: i,
                        target: j,
                        labels,
                    });
                }
            }
        }
        let repeat = self.repeat && self.telescope_keeps_repeat(stages);
        Ok(Self::from_parts(levels, bundles, repeat))
    }

    /// For each summand `j` of level `to`, the composites over all chains
    /// from summand `source` of level `from`.
    fn composite_labels(&self, from: usize, source: usize, to: usize) -> BTreeMap<usize, Vec<PLMap>> {
        let mut chains: Vec<(usize, PLMap)> = vec![(source, PLMap::identity())];
        for n in from..to {
            let mut next = Vec::new();
            for (k, acc) in &chains {
                for b in self.bundles_at(n).filter(|b| b.source == *k) {
                    for l in &b.labels {
                        next.push((b.target, acc.compose(l)));
                    }
                }
            }
            chains = next;
        }
        let mut out: BTreeMap<usize, Vec<PLMap>> = BTreeMap::new();
        for (j, l) in chains {
            out.entry(j).or_default().push(l);
        }
        out
    }

    fn layer_signature(&self, n: usize) -> Vec<(usize, usize, &[PLMap])> {
        self.bundles_at(n)
            .map(|b| (b.source, b.target, b.labels.as_slice()))
            .collect()
    }

    fn telescope_keeps_repeat(&self, stages: &[usize]) -> bool {
        let d = self.levels.len();
        if stages.len() < 2 || *stages.last().unwrap() != d - 1 {
            return false;
        }
        let stride = stages[1] - stages[0];
        if stages.windows(2).any(|w| w[1] - w[0] != stride) || stride > d - 1 {
            return false;
        }
        let last = self.layer_signature(d - 2);
        (d - 1 - stride..d - 1).all(|n| {
            self.layer_signature(n) == last && self.levels[n].len() == self.levels[d - 1].len()
        })
    }

    /// Deterministic Graphviz rendering. Edges are labeled
    /// `count×rank: label names`, with `pt` for labels touching a point base.
    pub fn export_dot(&self) -> Result<String> {
        let v = self.validate();
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=box];\n");
        for (n, lvl) in self.levels.iter().enumerate() {
            for (i, s) in lvl.iter().enumerate() {
                writeln!(
                    out,
                    "  \"{}_{}\" [label=\"({},{}) [r={}]\"];",
                    n + 1,
                    i + 1,
                    n + 1,
                    i + 1,
                    s.size
                )
                .unwrap();
            }
        }
        for b in &self.bundles {
            let src = self.levels[b.level][b.source];
            let tgt = self.levels[b.level + 1][b.target];
            let point = src.base == Base::Point || tgt.base == Base::Point;
            let names: Vec<String> = b
                .labels
                .iter()
                .map(|l| if point { "pt".into() } else { l.short_name() })
                .collect();
            writeln!(
                out,
                "  \"{}_{}\" -> \"{}_{}\" [label=\"{}×{}: {}\"];",
                b.level + 1,
                b.source + 1,
                b.level + 2,
                b.target + 1,
                b.labels.len(),
                src.rank(),
                names.join(",")
            )
            .unwrap();
        }
        out.push_str("}\n");
        Ok(out)
    }
}
