use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::diagram::{Base, LabeledBratteliDiagram};
use crate::error::{Error, Result};
use crate::interval_maps::PLMap;

/// Topological type of a component, as far as the sound rules decide it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "String")]
pub enum Verdict {
    Singleton,
    Arc,
    NotArc(String),
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Singleton => f.write_str("Singleton"),
            Verdict::Arc => f.write_str("Arc"),
            Verdict::NotArc(why) => write!(f, "NotArc({why})"),
            Verdict::Unknown => f.write_str("Unknown"),
        }
    }
}

impl From<Verdict> for String {
    fn from(v: Verdict) -> String {
        v.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathClassification {
    pub verdict: Verdict,
    pub evidence: String,
}

/// Labels of an infinite path: a finite prefix followed by a cycle that
/// repeats forever. Thread coordinates satisfy `x_n = λ_n(x_{n+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathLabels {
    pub base: Base,
    pub prefix: Vec<PLMap>,
    pub cycle: Vec<PLMap>,
}

/// Classifies the inverse limit along a path by its period map
/// `P = λ_1 ∘ … ∘ λ_L` of the cycle. Passing to the subsequence of levels
/// one period apart does not change the inverse limit, so:
///
/// * point bases, or `P` constant: a single thread;
/// * `P` a homeomorphism: an arc;
/// * `P` an iterate of the full tent map: the inverse limit is the
///   buckethandle continuum, which is indecomposable and hence not an arc;
/// * anything else is left undecided.
pub fn classify_path(labels: &PathLabels) -> Result<PathClassification> {
    if labels.cycle.is_empty() {
        return Err(Error::Precondition(
            "classification needs tail data: the label cycle is empty".into(),
        ));
    }
    let name = labels
        .cycle
        .iter()
        .map(PLMap::short_name)
        .collect::<Vec<_>>()
        .join(",");
    let done = |verdict, evidence: String| Ok(PathClassification { verdict, evidence });
    if labels.base == Base::Point {
        return done(Verdict::Singleton, "inverse limit of one-point spaces".into());
    }
    let period = labels
        .cycle
        .iter()
        .fold(PLMap::identity(), |acc, l| acc.compose(l));
    let profile = period.analyze();
    if profile.constant {
        return done(
            Verdict::Singleton,
            format!("period map of cycle [{name}] is constant; threads are forced"),
        );
    }
    if profile.homeomorphism {
        return done(
            Verdict::Arc,
            format!("period map of cycle [{name}] is a homeomorphism of [0,1]"),
        );
    }
    if let Some(k) = period.tent_iterate_order() {
        return done(
            Verdict::NotArc("indecomposable continuum".into()),
            format!(
                "period map of cycle [{name}] is the {k}-fold full tent map; its inverse limit is the buckethandle continuum (classical continuum theory)"
            ),
        );
    }
    done(
        Verdict::Unknown,
        format!("period map of cycle [{name}] matches no decidable rule"),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    /// Summand of the repeated level where the cycle starts.
    pub start: usize,
    /// `(target summand, label name)` per step.
    pub cycle: Vec<(usize, String)>,
    pub classification: PathClassification,
}

/// Classification of every eventually periodic path class of a repeating
/// diagram, with period at most `max_period`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub max_period: usize,
    pub entries: Vec<CensusEntry>,
}

impl Census {
    pub fn verdicts(&self) -> BTreeSet<Verdict> {
        self.entries
            .iter()
            .map(|e| e.classification.verdict.clone())
            .collect()
    }
}

/// Enumerates closed walks through the repeated layer, up to rotation and
/// without proper powers, over the distinct labels of each bundle.
pub fn path_census(d: &LabeledBratteliDiagram, max_period: usize) -> Result<Census> {
    if !d.repeats() || d.depth() < 2 {
        return Err(Error::Precondition(
            "a path census needs a repetition rule for tail data".into(),
        ));
    }
    if max_period == 0 {
        return Err(Error::Argument("period bound must be at least 1".into()));
    }
    let layer = d.depth() - 2;
    let summands = d.level(layer)?.len();
    // steps[i]: (target, label) choices from summand i, distinct labels only
    let steps: Vec<Vec<(usize, PLMap)>> = (0..summands)
        .map(|i| {
            let mut out: Vec<(usize, PLMap)> = Vec::new();
            for b in d.bundles_at(layer).filter(|b| b.source == i) {
                for l in &b.labels {
                    if !out.iter().any(|(t, m)| *t == b.target && m == l) {
                        out.push((b.target, l.clone()));
                    }
                }
            }
            out
        })
        .collect();
    let base_of = |i: usize| d.levels()[layer][i].base;
    let mut entries = Vec::new();
    for len in 1..=max_period {
        for start in 0..summands {
            let mut walk: Vec<(usize, usize)> = Vec::new();
            walks(&steps, start, start, len, &mut walk, &mut |w| {
                if !is_canonical(w) {
                    return;
                }
                let cycle: Vec<PLMap> = w
                    .iter()
                    .scan(start, |at, &(_, k)| {
                        let (t, l) = &steps[*at][k];
                        *at = *t;
                        Some(l.clone())
                    })
                    .collect();
                let base = if base_of(start) == Base::Point { Base::Point } else { Base::Interval };
                let classification = classify_path(&PathLabels {
                    base,
                    prefix: Vec::new(),
                    cycle: cycle.clone(),
                })
                .expect("nonempty cycle");
                entries.push(CensusEntry {
                    start,
                    cycle: w
                        .iter()
                        .zip(&cycle)
                        .map(|(&(t, _), l)| (t, if base == Base::Point { "pt".into() } else { l.short_name() }))
                        .collect(),
                    classification,
                });
            });
        }
    }
    Ok(Census {
        max_period,
        entries,
    })
}

fn walks<F: FnMut(&[(usize, usize)])>(
    steps: &[Vec<(usize, PLMap)>],
    start: usize,
    at: usize,
    left: usize,
    walk: &mut Vec<(usize, usize)>,
    emit: &mut F,
) {
    if left == 0 {
        if at == start {
            emit(walk);
        }
        return;
    }
    for (k, (t, _)) in steps[at].iter().enumerate() {
        walk.push((*t, k));
        walks(steps, start, *t, left - 1, walk, emit);
        walk.pop();
    }
}

/// Lexicographically least among its rotations and not a proper power.
/// Rotations starting at another summand are reached from that summand.
fn is_canonical(w: &[(usize, usize)]) -> bool {
    let n = w.len();
    (1..n).all(|r| {
        let rotated = w[r..].iter().chain(&w[..r]);
        rotated.cmp(w.iter()) == std::cmp::Ordering::Greater
    })
}
