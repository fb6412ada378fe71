//! A prepared system: spec + time map + auxiliary solution.

use crate::aux::{
    default_ic, solve_for_system, AuxInitialConditions, AuxSolution, DEFAULT_AUX_NODES,
};
use crate::error::Result;
use crate::profile::SystemSpec;
use crate::timemap::{build_time_map, TimeMap, DEFAULT_MAP_NODES};

/// Everything needed to evaluate states and operators in any frame.
#[derive(Debug, Clone)]
pub struct System {
    pub spec: SystemSpec,
    pub map: TimeMap,
    pub aux: AuxSolution,
}

impl System {
    /// Build the time map on `[t0, t_end]` and solve the auxiliary equation
    /// over the mapped TO interval with frequency-matched initial data.
    pub fn prepare(spec: SystemSpec, t_end: f64) -> Result<System> {
        Self::prepare_with(spec, t_end, None, DEFAULT_MAP_NODES, DEFAULT_AUX_NODES)
    }

    pub fn prepare_with(
        spec: SystemSpec,
        t_end: f64,
        ic: Option<AuxInitialConditions>,
        map_nodes: usize,
        aux_nodes: usize,
    ) -> Result<System> {
        let map = build_time_map(&spec, t_end, map_nodes)?;
        let ic = match ic {
            Some(ic) => ic,
            None => default_ic(spec.g2_at_t(spec.t0)?),
        };
        let aux = solve_for_system(&spec, &map, &ic, aux_nodes)?;
        Ok(System { spec, map, aux })
    }

    /// TO time of the origin (equals `t0` under the default gauge).
    pub fn t0_prime(&self) -> f64 {
        self.map.tprime_range().0
    }

    /// Matched angular frequency at the origin (1 when `g2(t0) <= 0`).
    pub fn omega0(&self) -> f64 {
        let g2 = self.spec.g2_at_t(self.spec.t0).unwrap_or(0.0);
        if g2 > 0.0 {
            (2.0 * g2).sqrt()
        } else {
            1.0
        }
    }

    /// `2 pi / omega0`; the time scale used for default stencil widths.
    pub fn natural_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega0()
    }
}
