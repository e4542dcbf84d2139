use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval_maps::PLMap;
use crate::par::Exec;
use crate::rational::{format_fraction, q, Q};

/// Exact points `(x_1, …, x_k)` of the inverse limit along a label sequence,
/// with `x_n = λ_n(x_{n+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadCloud {
    pub depth: usize,
    pub samples: Vec<Vec<Q>>,
}

impl ThreadCloud {
    /// Every sample satisfies every bonding equation exactly.
    pub fn bonding_holds(&self, labels: &[PLMap]) -> bool {
        labels.len() + 1 >= self.depth
            && self.samples.iter().all(|x| {
                x.len() == self.depth
                    && (0..self.depth.saturating_sub(1)).all(|n| labels[n].eval(&x[n + 1]).is_ok_and(|v| v == x[n]))
            })
    }

    /// Samples as fraction strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.samples
            .iter()
            .map(|x| x.iter().map(format_fraction).collect())
            .collect()
    }
}

impl Serialize for ThreadCloud {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ThreadCloud", 2)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("samples", &self.to_strings())?;
        st.end()
    }
}

pub fn approximate_component(labels: &[PLMap], depth: usize, sample_count: usize) -> Result<ThreadCloud> {
    approximate_component_with(labels, depth, sample_count, Exec::default())
}

/// Samples the last coordinate on the grid `i/(count-1)` (just `0` for a
/// single sample) and fills the others by applying the labels downward.
pub fn approximate_component_with(
    labels: &[PLMap],
    depth: usize,
    sample_count: usize,
    exec: Exec,
) -> Result<ThreadCloud> {
    if depth < 1 {
        return Err(Error::Argument("depth must be at least 1".into()));
    }
    if sample_count < 1 {
        return Err(Error::Argument("sample count must be at least 1".into()));
    }
    if labels.len() + 1 < depth {
        return Err(Error::Argument(format!(
            "depth {depth} needs {} labels, got {}",
            depth - 1,
            labels.len()
        )));
    }
    let samples = exec.map_range(sample_count, |i| {
        let top = if sample_count == 1 {
            q(0, 1)
        } else {
            q(i as i64, sample_count as i64 - 1)
        };
        let mut x = vec![top; depth];
        for n in (0..depth - 1).rev() {
            x[n] = labels[n].eval(&x[n + 1]).expect("labels map [0,1] into itself");
        }
        x
    });
    Ok(ThreadCloud { depth, samples })
}
