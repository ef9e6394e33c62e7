//! Reuse of lognormal-sum fits across sweep points.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::Result;
use crate::plc::{fit_lognormal_sum, FitConfig, LognormalFading, LognormalSumFit, PlcTopology};

type Key = (u32, u64, u64, u64, u64, u64, u64, usize, u64);

fn key(topology: &PlcTopology, fading: &LognormalFading, cfg: &FitConfig) -> Key {
    (
        topology.num_wires,
        fading.mu_h.to_bits(),
        fading.sigma2_h.to_bits(),
        cfg.samples,
        cfg.seed,
        cfg.prob_lo.to_bits(),
        cfg.prob_hi.to_bits(),
        cfg.points,
        cfg.max_error.to_bits(),
    )
}

/// Fits keyed by everything they depend on. The relay count is not part of
/// the key: the fit describes one relay's wire sum.
#[derive(Debug, Default, Clone)]
pub struct FitCache {
    slots: Arc<Mutex<HashMap<Key, Arc<OnceLock<Result<LognormalSumFit>>>>>>,
}

impl FitCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_fit(
        &self,
        topology: &PlcTopology,
        fading: &LognormalFading,
        cfg: &FitConfig,
    ) -> Result<LognormalSumFit> {
        let slot = {
            let mut map = self.slots.lock().expect("fit cache poisoned");
            map.entry(key(topology, fading, cfg)).or_default().clone()
        };
        // concurrent requests for the same key wait on one fit
        slot.get_or_init(|| fit_lognormal_sum(topology, fading, cfg)).clone()
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("fit cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
