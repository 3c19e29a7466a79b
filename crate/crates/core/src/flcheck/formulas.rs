//! Global dimension formulas for the Hitchin base and Picard fibers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rootdata::RootDatum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalFormulas {
    /// `dim A = #Phi deg D / 2 + r (1 - g + deg D)`.
    pub dim_a: i64,
    /// `dim P_a = #Phi deg D / 2 + r (g - 1)`.
    pub dim_pa: i64,
    /// `#Phi deg D / 2`, the ceiling for `sum d_i / 2`.
    pub delta_sum_bound: i64,
}

pub fn global_formulas(rd: &RootDatum, genus: i64, deg_d: i64) -> Result<GlobalFormulas> {
    if genus < 0 {
        return Err(Error::InvalidInput("genus must be nonnegative".into()));
    }
    if deg_d <= 2 * genus - 2 {
        return Err(Error::HypothesisViolated(format!("deg D = {deg_d} <= 2g - 2 = {}", 2 * genus - 2)));
    }
    let phi = rd.roots.len() as i64;
    let r = rd.rank as i64;
    let half = phi * deg_d / 2;
    Ok(GlobalFormulas { dim_a: half + r * (1 - genus + deg_d), dim_pa: half + r * (genus - 1), delta_sum_bound: half })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{build_root_datum, GroupKind};

    #[test]
    fn examples() {
        let sl2 = build_root_datum(GroupKind::SL, 2, 3).unwrap();
        let g = global_formulas(&sl2, 0, 2).unwrap();
        assert_eq!((g.dim_a, g.dim_pa), (5, 1));
        let gl1 = build_root_datum(GroupKind::GL, 1, 3).unwrap();
        let g = global_formulas(&gl1, 1, 1).unwrap();
        assert_eq!((g.dim_a, g.dim_pa), (1, 0));
        assert!(matches!(global_formulas(&sl2, 2, 2), Err(Error::HypothesisViolated(_))));
    }
}
