use serde::Serialize;

use crate::diagram::LabeledBratteliDiagram;
use crate::error::{Error, Result};
use crate::interval_maps::PLMap;
use crate::par::Exec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PathStep {
    pub target: usize,
    pub label: usize,
}

/// A path that threads one diagonal slot through the levels. `slots[n]` is
/// the `(summand, slot)` occupied at level `n`; `slots[0]` is the start.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SlotPath {
    pub steps: Vec<PathStep>,
    pub slots: Vec<(usize, u64)>,
}

impl SlotPath {
    pub fn start(&self) -> (usize, u64) {
        self.slots[0]
    }

    /// Decomposing every arrival slot recovers the step that produced it.
    pub fn is_consistent(&self, d: &LabeledBratteliDiagram) -> bool {
        self.slots.len() == self.steps.len() + 1
            && self.steps.iter().enumerate().all(|(n, st)| {
                let (j, u) = self.slots[n];
                let (t, v) = self.slots[n + 1];
                t == st.target
                    && d.bundle(n, j, t).is_some_and(|b| st.label < b.labels.len())
                    && d.decompose_slot(n, t, v) == Some((j, st.label, u))
            })
    }

    /// Eigenvalue functions along the path, one per step.
    pub fn labels(&self, d: &LabeledBratteliDiagram) -> Result<Vec<PLMap>> {
        self.steps
            .iter()
            .enumerate()
            .map(|(n, st)| {
                let j = self.slots[n].0;
                d.bundle(n, j, st.target)
                    .and_then(|b| b.labels.get(st.label))
                    .cloned()
                    .ok_or_else(|| Error::Range(format!("no label {} at level {}", st.label + 1, n + 1)))
            })
            .collect()
    }
}

fn with_levels(d: &LabeledBratteliDiagram, depth: usize) -> Result<LabeledBratteliDiagram> {
    if depth + 1 > d.depth() && !d.repeats() {
        return Err(Error::Range(format!(
            "depth {} needs {} levels, the diagram has {}",
            depth,
            depth + 1,
            d.depth()
        )));
    }
    d.unrolled(depth + 1)
}

/// All slot-consistent paths with `depth` steps, ordered by start slot and
/// then lexicographically by steps.
pub fn enumerate_paths(d: &LabeledBratteliDiagram, depth: usize) -> Result<Vec<SlotPath>> {
    let d = with_levels(d, depth)?;
    let mut out = Vec::new();
    let mut path = SlotPath {
        steps: Vec::new(),
        slots: Vec::new(),
    };
    for (j, s) in d.level(0)?.iter().enumerate() {
        for u in 0..s.size {
            path.slots.push((j, u));
            extend(&d, depth, &mut path, &mut out);
            path.slots.pop();
        }
    }
    Ok(out)
}

fn extend(d: &LabeledBratteliDiagram, depth: usize, path: &mut SlotPath, out: &mut Vec<SlotPath>) {
    let n = path.steps.len();
    if n == depth {
        out.push(path.clone());
        return;
    }
    let (j, u) = *path.slots.last().expect("started");
    for b in d.bundles_at(n).filter(|b| b.source == j) {
        for y in 0..b.labels.len() {
            path.steps.push(PathStep {
                target: b.target,
                label: y,
            });
            path.slots.push((b.target, d.arrival_slot(n, j, b.target, y, u)));
            extend(d, depth, path, out);
            path.steps.pop();
            path.slots.pop();
        }
    }
}

pub fn count_components(d: &LabeledBratteliDiagram, depth: usize) -> Result<u128> {
    count_components_with(d, depth, Exec::default())
}

/// Number of slot-consistent paths with `depth` steps, counted by dynamic
/// programming over summands without listing them.
pub fn count_components_with(d: &LabeledBratteliDiagram, depth: usize, exec: Exec) -> Result<u128> {
    let d = with_levels(d, depth)?;
    let overflow = || Error::Overflow("component count".into());
    // ways[j]: continuations from one slot of summand j at the current level
    let mut ways: Vec<u128> = vec![1; d.level(depth)?.len()];
    for n in (0..depth).rev() {
        let src = d.level(n)?.len();
        let next: Vec<Option<u128>> = exec.map_range(src, |j| {
            d.bundles_at(n).filter(|b| b.source == j).try_fold(0u128, |acc, b| {
                (b.labels.len() as u128)
                    .checked_mul(ways[b.target])
                    .and_then(|w| acc.checked_add(w))
            })
        });
        ways = next.into_iter().collect::<Option<_>>().ok_or_else(overflow)?;
    }
    d.level(0)?
        .iter()
        .zip(&ways)
        .try_fold(0u128, |acc, (s, w)| {
            (s.size as u128).checked_mul(*w).and_then(|x| acc.checked_add(x))
        })
        .ok_or_else(overflow)
}
