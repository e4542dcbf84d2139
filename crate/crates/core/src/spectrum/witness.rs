//! A diagram over the same base spaces with a component that no path of
//! the input realizes: after telescoping for growth, three labels per layer
//! are replaced by `γ_n`, `g(t) = t/2` and `h(t) = (t+1)/2`.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::diagram::{Base, EdgeBundle, LabeledBratteliDiagram};
use crate::error::{Error, Result};
use crate::interval_maps::{Interval, PLMap};
use crate::rational::{format_fraction, q, Q};

use super::classify::{classify_path, path_census, Census, PathClassification, PathLabels, Verdict};

#[derive(Clone, Debug)]
pub struct WitnessOptions {
    /// Number of levels of the telescoped diagram.
    pub levels: usize,
    /// `γ_n` per layer; empty means the tent map everywhere, a single map is
    /// used for every layer.
    pub gammas: Vec<PLMap>,
    pub epsilon: Q,
    pub horizon: usize,
    /// Longest cycle in the census of the input.
    pub max_period: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            levels: 8,
            gammas: Vec::new(),
            epsilon: q(1, 16),
            horizon: 6,
            max_period: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicityReport {
    pub passed: bool,
    /// Zero-based levels that were checked.
    pub levels: Vec<usize>,
    pub epsilon: String,
    pub horizon: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    /// Zero-based levels of the (unrolled) input kept by telescoping.
    pub stages: Vec<usize>,
    pub sizes: Vec<u64>,
    /// Each layer's labels have images covering `[0,1]`.
    pub surjective_layers: bool,
    pub simplicity: SimplicityReport,
    pub witness_path: PathClassification,
    /// Verdicts of the input's path census, when the input repeats.
    pub input_census: Option<Census>,
    pub flagged: bool,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub telescoped: LabeledBratteliDiagram,
    pub diagram: LabeledBratteliDiagram,
    pub report: WitnessReport,
}

/// Greedy stages with `r_{s_t} / r_{s_{t-1}} > 2^t` for `t = 1..levels-1`.
fn growth_stages(d: &LabeledBratteliDiagram, levels: usize) -> Result<(Vec<usize>, LabeledBratteliDiagram)> {
    let mut full = d.clone();
    let mut stages = vec![0usize];
    let size = |full: &LabeledBratteliDiagram, n: usize| full.sizes(n).map(|s| s[0]);
    for t in 1..levels {
        let prev = *stages.last().unwrap();
        let need = 1u64.checked_shl(t as u32).filter(|&x| x > 0).ok_or_else(|| {
            Error::Precondition(format!("growth 2^{t} is out of range"))
        })?;
        let mut s = prev + 1;
        loop {
            if s >= full.depth() {
                full = full.unrolled(s + 1).map_err(|e| {
                    Error::Precondition(format!(
                        "growth conditions unattainable: level {} of the telescope needs ratio > {need} ({e})",
                        t + 1
                    ))
                })?;
            }
            if size(&full, s)? / size(&full, prev)? > need {
                break;
            }
            s += 1;
        }
        stages.push(s);
    }
    Ok((stages, full))
}

pub fn incompleteness_witness(d: &LabeledBratteliDiagram, opts: &WitnessOptions) -> Result<Witness> {
    if d.levels().iter().any(|l| l.len() != 1) {
        return Err(Error::Unsupported("the witness needs a single-summand diagram".into()));
    }
    if d.levels().iter().flatten().any(|s| s.base == Base::Point) {
        return Err(Error::Precondition("the witness needs interval bases".into()));
    }
    if opts.levels < 2 {
        return Err(Error::Argument("the witness needs at least two levels".into()));
    }
    let layers = opts.levels - 1;
    let gamma = |n: usize| -> Result<PLMap> {
        match opts.gammas.len() {
            0 => Ok(PLMap::tent()),
            1 => Ok(opts.gammas[0].clone()),
            k if k == layers => Ok(opts.gammas[n].clone()),
            k => Err(Error::Argument(format!("{k} γ maps given for {layers} layers"))),
        }
    };
    gamma(0)?;
    let (stages, full) = growth_stages(d, opts.levels)?;
    let telescoped = full.telescope(&stages)?;
    let mut bundles: Vec<EdgeBundle> = telescoped.bundles().to_vec();
    for b in &mut bundles {
        if b.labels.len() < 3 {
            return Err(Error::Precondition(format!(
                "layer {} has {} labels, three are needed",
                b.level + 1,
                b.labels.len()
            )));
        }
        b.labels[0] = gamma(b.level)?;
        b.labels[1] = PLMap::half_lower();
        b.labels[2] = PLMap::half_upper();
    }
    let diagram = LabeledBratteliDiagram::new(telescoped.levels().to_vec(), bundles, false)?;

    let surjective_layers = diagram.bundles().iter().all(|b| covers_unit(b.labels.iter().map(PLMap::image)));
    let simplicity = check_simplicity_sufficient(&diagram, &opts.epsilon, opts.horizon);
    let gammas: Vec<PLMap> = (0..layers).map(gamma).collect::<Result<_>>()?;
    let mut witness_path = classify_path(&PathLabels {
        base: Base::Interval,
        prefix: gammas.clone(),
        cycle: vec![gammas[layers - 1].clone()],
    })?;
    witness_path.evidence = format!("all-γ path, γ continued cofinally: {}", witness_path.evidence);
    let input_census = if d.repeats() {
        Some(path_census(d, opts.max_period)?)
    } else {
        None
    };
    let decided: Option<BTreeSet<Verdict>> = input_census
        .as_ref()
        .map(Census::verdicts)
        .filter(|v| v.iter().all(|x| matches!(x, Verdict::Singleton | Verdict::Arc)));
    let flagged = matches!(witness_path.verdict, Verdict::NotArc(_)) && decided.is_some();
    let summary = if flagged {
        "incompleteness witnessed: the all-γ component is not an arc, while every path class of the input is a singleton or an arc".to_string()
    } else if input_census.is_none() {
        "no incompleteness witnessed: the input has no repetition rule, so its path classes are not classified".to_string()
    } else {
        "no incompleteness witnessed".to_string()
    };
    let sizes = (0..diagram.depth()).map(|n| diagram.sizes(n).map(|s| s[0])).collect::<Result<_>>()?;
    Ok(Witness {
        telescoped,
        diagram,
        report: WitnessReport {
            stages,
            sizes,
            surjective_layers,
            simplicity,
            witness_path,
            input_census,
            flagged,
            summary,
        },
    })
}

/// The union of the intervals is `[0,1]`.
fn covers_unit(ivs: impl Iterator<Item = Interval>) -> bool {
    let mut ivs: Vec<Interval> = ivs.collect();
    ivs.sort();
    let mut reach = Q::zero();
    for iv in ivs {
        if iv.lo > reach {
            return false;
        }
        if iv.hi > reach {
            reach = iv.hi;
        }
    }
    reach.is_one()
}

/// A sufficient test for density of label orbits: at every checked level
/// `n` and for every cell `[cε, (c+1)ε]`, some chain of at most `horizon`
/// consecutive labels starting at level `n` maps the whole interval into
/// that cell. Levels `n ≤ horizon` with room for chains of length `horizon`
/// are checked; a repeating diagram is unrolled for that room when possible.
/// `false` means "not established".
pub fn check_simplicity_sufficient(d: &LabeledBratteliDiagram, epsilon: &Q, horizon: usize) -> SimplicityReport {
    let report = |passed, levels, note: String| SimplicityReport {
        passed,
        levels,
        epsilon: format_fraction(epsilon),
        horizon,
        note,
    };
    if *epsilon <= Q::zero() || horizon == 0 {
        return report(false, vec![], "ε must be positive and the horizon at least 1".into());
    }
    if d.levels().iter().flatten().any(|s| s.base == Base::Point) {
        return report(false, vec![], "the criterion needs interval bases".into());
    }
    let d = if d.repeats() {
        d.unrolled(2 * horizon + 1).unwrap_or_else(|_| d.clone())
    } else {
        d.clone()
    };
    if d.depth() < horizon + 1 {
        return report(false, vec![], format!("{} levels leave no room for chains of length {horizon}", d.depth()));
    }
    let last = horizon.min(d.depth() - 1 - horizon);
    let cells: Vec<Interval> = {
        let mut out = Vec::new();
        let mut lo = Q::zero();
        while lo < Q::one() {
            let hi = (&lo + epsilon).min(Q::one());
            out.push(Interval::new(lo.clone(), hi.clone()));
            lo = hi;
        }
        out
    };
    let levels: Vec<usize> = (0..=last).collect();
    for &n in &levels {
        for j in 0..d.levels()[n].len() {
            // hit[c]: some chain from (n, j) lands in cell c
            let mut hit = vec![false; cells.len()];
            for len in 1..=horizon {
                for iv in chain_images(&d, n, j, len) {
                    for (c, cell) in cells.iter().enumerate() {
                        if cell.contains(&iv) {
                            hit[c] = true;
                        }
                    }
                }
            }
            if let Some(c) = hit.iter().position(|h| !h) {
                return report(
                    false,
                    levels.clone(),
                    format!(
                        "no chain of length ≤ {horizon} from summand ({},{}) maps into {}",
                        n + 1,
                        j + 1,
                        cells[c]
                    ),
                );
            }
        }
    }
    report(true, levels, "every cell is hit from every checked summand".into())
}

/// Images of `[0,1]` under all chains of `len` labels starting at summand
/// `j` of level `n`, deduplicated.
fn chain_images(d: &LabeledBratteliDiagram, n: usize, j: usize, len: usize) -> BTreeSet<Interval> {
    // images[k]: intervals in summand k of the current level
    let top = n + len;
    let mut images: Vec<BTreeSet<Interval>> = vec![[Interval::unit()].into_iter().collect(); d.levels()[top].len()];
    for m in (n..top).rev() {
        let mut next: Vec<BTreeSet<Interval>> = vec![BTreeSet::new(); d.levels()[m].len()];
        for b in d.bundles_at(m) {
            if m == n && b.source != j {
                continue;
            }
            let mut distinct: Vec<&PLMap> = Vec::new();
            for l in &b.labels {
                if !distinct.contains(&l) {
                    distinct.push(l);
                }
            }
            for l in distinct {
                for iv in &images[b.target] {
                    next[b.source].insert(l.image_of(iv));
                }
            }
        }
        images = next;
    }
    std::mem::take(&mut images[j])
}
