//! Per-vertex disagreement accounting.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Clustering, Instance};
use crate::norm::NormOrder;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisagreementReport {
    pub dis: Vec<f64>,
    /// Keyed by the norm label ("1", "2", "inf", or the requested p).
    pub norms: BTreeMap<String, f64>,
}

impl DisagreementReport {
    pub fn norm(&self, p: NormOrder) -> f64 {
        p.norm(&self.dis)
    }
}

/// Weighted disagreeing edges at each vertex: cut positive edges plus uncut
/// negative edges, each counted at both endpoints.
pub fn disagreement_vector(inst: &Instance, c: &Clustering) -> Result<Vec<f64>> {
    let n = inst.n();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    let mut dis = vec![0.0; n];
    for u in 0..n {
        for v in (u + 1)..n {
            if inst.is_positive(u, v) != c.same(u, v) {
                let w = inst.weight(u, v);
                dis[u] += w;
                dis[v] += w;
            }
        }
    }
    Ok(dis)
}

pub fn disagreements(inst: &Instance, c: &Clustering, p: NormOrder) -> Result<DisagreementReport> {
    let dis = disagreement_vector(inst, c)?;
    let mut norms = BTreeMap::new();
    for q in [NormOrder::ONE, NormOrder::TWO, NormOrder::Infinity, p] {
        norms.insert(q.label(), q.norm(&dis));
    }
    Ok(DisagreementReport { dis, norms })
}
