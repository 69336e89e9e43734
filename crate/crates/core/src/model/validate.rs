use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::MassActionModel;
use crate::linalg::{is_metzler, max_abs_diff, norm_inf};

const PROBES: usize = 64;
const PROBE_SEED: u64 = 0x5eed_0f9a;
const PQ_TOLERANCE: f64 = 1e-13;

/// Structural checks on a model. Report-only: nothing here fails hard.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `L`, `P(x)`, `Q(x)` Metzler for every `x >= 0`.
    pub metzler: bool,
    /// Indices of bilinear terms with a negative off-diagonal contribution.
    pub non_metzler_terms: Vec<usize>,
    pub linear_metzler: bool,
    pub constant_nonnegative: bool,
    pub domain_compact: bool,
    /// `P(y) z = Q(z) y` on random probes.
    pub pq_identity: bool,
    pub pq_max_residual: f64,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.metzler && self.constant_nonnegative && self.domain_compact && self.pq_identity
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.metzler {
            out.push("metzler");
        }
        if !self.constant_nonnegative {
            out.push("constant_nonnegative");
        }
        if !self.domain_compact {
            out.push("domain_compact");
        }
        if !self.pq_identity {
            out.push("pq_identity");
        }
        out
    }
}

impl MassActionModel {
    pub fn validate(&self) -> ValidationReport {
        // A term (i, j, k, c) lands in P at (i, k) and in Q at (i, j); with x >= 0
        // the sign of the entry is the sign of c.
        let non_metzler_terms: Vec<usize> = self
            .bilinear()
            .iter()
            .enumerate()
            .filter(|(_, t)| (t.i != t.k || t.i != t.j) && t.c < 0.0)
            .map(|(idx, _)| idx)
            .collect();
        let linear_metzler = is_metzler(self.linear());
        let metzler = linear_metzler && non_metzler_terms.is_empty();
        let constant_nonnegative = self.constant().iter().all(|b| *b >= 0.0);
        let domain_compact = self.domain().is_compact();

        let n = self.dim();
        let upper: Vec<f64> = self
            .domain()
            .box_upper()
            .iter()
            .map(|u| if u.is_finite() { *u } else { 1.0 })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let mut pq_max_residual: f64 = 0.0;
        let mut pq_identity = true;
        for _ in 0..PROBES {
            let y: Vec<f64> = (0..n).map(|i| rng.random::<f64>() * upper[i]).collect();
            let z: Vec<f64> = (0..n).map(|i| rng.random::<f64>() * upper[i]).collect();
            let pz = self
                .assemble_p(&y)
                .and_then(|p| p.mul_vec(&z))
                .expect("probe has model dimension");
            let qy = self
                .assemble_q(&z)
                .and_then(|q| q.mul_vec(&y))
                .expect("probe has model dimension");
            let coeff = self
                .bilinear()
                .iter()
                .map(|t| t.c.abs())
                .fold(0.0, f64::max);
            let scale = 1.0 + coeff * (1.0 + norm_inf(&y)) * (1.0 + norm_inf(&z));
            let r = max_abs_diff(&pz, &qy);
            pq_max_residual = pq_max_residual.max(r);
            if r > PQ_TOLERANCE * scale {
                pq_identity = false;
            }
        }

        ValidationReport {
            metzler,
            non_metzler_terms,
            linear_metzler,
            constant_nonnegative,
            domain_compact,
            pq_identity,
            pq_max_residual,
        }
    }
}
