use crate::diagram::{Base, LabeledBratteliDiagram};
use crate::error::{Error, Result};
use crate::interval_maps::PLMap;
use crate::rational::Q;

/// Fills `k` slots by cycling through `set`.
fn cycled(set: &[PLMap], k: usize) -> Vec<PLMap> {
    set.iter().cycle().take(k).cloned().collect()
}

/// Single-summand interval tower whose labels are the identity and the
/// constant `x_n`, alternating. `constants` has one entry per layer, or a
/// single entry used for all layers. The last layer repeats.
pub fn build_goodearl(sizes: &[u64], constants: &[Q]) -> Result<LabeledBratteliDiagram> {
    let layers = sizes.len().saturating_sub(1);
    if !(constants.len() == layers || constants.len() == 1) {
        return Err(Error::Argument(format!(
            "{} constants given for {layers} layers",
            constants.len()
        )));
    }
    let consts = constants
        .iter()
        .map(|c| PLMap::constant(c.clone()))
        .collect::<Result<Vec<_>>>()?;
    LabeledBratteliDiagram::single_summand_tower(Base::Interval, sizes, true, |n, k| {
        let c = &consts[if consts.len() == 1 { 0 } else { n }];
        Ok(cycled(&[PLMap::identity(), c.clone()], k))
    })
}

/// Single-summand interval tower with labels the identity and a PL
/// homeomorphism `sigma`, alternating. The last layer repeats.
pub fn build_ah_model(sizes: &[u64], sigma: &PLMap) -> Result<LabeledBratteliDiagram> {
    if !sigma.analyze().homeomorphism {
        return Err(Error::Precondition(format!("{sigma} is not a homeomorphism of [0,1]")));
    }
    LabeledBratteliDiagram::single_summand_tower(Base::Interval, sizes, true, |_, k| {
        Ok(cycled(&[PLMap::identity(), sigma.clone()], k))
    })
}
