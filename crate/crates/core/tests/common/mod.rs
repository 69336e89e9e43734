//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's sampler or bound computation.

#![allow(dead_code)]

use nsfd_core::linalg::{is_diagonally_dominant, DominanceMode};
use nsfd_core::{HostVectorParameters, MassActionModel, RealMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact logistic solution with `r = K = 1`.
pub fn logistic_exact(x0: f64, t: f64) -> f64 {
    x0 / (x0 + (1.0 - x0) * (-t).exp())
}

/// Host-vector right-hand side written out compartment by compartment.
pub fn host_vector_rhs(p: &HostVectorParameters, x: &[f64]) -> [f64; 5] {
    let (sv, iv, s, i, r) = (x[0], x[1], x[2], x[3], x[4]);
    [
        p.lambda_v - p.p * sv * i - p.mu_v * sv,
        p.p * sv * i - p.mu_v * iv,
        p.lambda - p.q * s * iv - p.mu * s + p.gamma * r,
        p.q * s * iv - (p.mu + p.alpha) * i,
        p.alpha * i - (p.mu + p.gamma) * r,
    ]
}

/// Uniform point of the simplex `{y >= 0, Σ y <= total}` in `dim` coordinates.
pub fn simplex_point<R: Rng>(rng: &mut R, dim: usize, total: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    (0..dim).map(|k| total * (cuts[k + 1] - cuts[k])).collect()
}

/// Random point of the model's domain, strictly inside with probability one.
///
/// Only the three built-in domain shapes are understood.
pub fn interior_point<R: Rng>(model: &MassActionModel, rng: &mut R) -> Vec<f64> {
    let cons = model.domain().constraints();
    match model.name() {
        "logistic" => vec![cons[0].bound * rng.random::<f64>()],
        "si" => simplex_point(rng, 2, cons[0].bound),
        "host-vector" => {
            let mut x = simplex_point(rng, 2, cons[0].bound);
            x.extend(simplex_point(rng, 3, cons[1].bound));
            x
        }
        other => panic!("no interior sampler for '{other}'"),
    }
}

/// Vertices of the host-vector domain: products of the two simplices' corners.
pub fn host_vector_vertices(p: &HostVectorParameters) -> Vec<Vec<f64>> {
    let vec_corners = [[0.0, 0.0], [p.m_v, 0.0], [0.0, p.m_v]];
    let host_corners = [
        [0.0, 0.0, 0.0],
        [p.m, 0.0, 0.0],
        [0.0, p.m, 0.0],
        [0.0, 0.0, p.m],
    ];
    let mut out = Vec::new();
    for a in vec_corners {
        for b in host_corners {
            let mut x = a.to_vec();
            x.extend_from_slice(&b);
            out.push(x);
        }
    }
    out
}

/// `I + sign·h·S(x)`.
pub fn solve_matrix(model: &MassActionModel, x: &[f64], h: f64, sign: f64) -> RealMatrix {
    let s = model.split_matrix(x).unwrap();
    RealMatrix::identity(model.dim())
        .add_scaled(sign * h, &s)
        .unwrap()
}

pub fn both_dominant(model: &MassActionModel, x: &[f64], h: f64) -> bool {
    [-1.0, 1.0].into_iter().all(|sign| {
        is_diagonally_dominant(
            &solve_matrix(model, x, h, sign),
            DominanceMode::Column,
            true,
        )
    })
}

/// Largest `h` for which both solve matrices are dominant at every probe,
/// by bisection on `[0, h_hi]`.
pub fn brute_force_bound(model: &MassActionModel, probes: &[Vec<f64>], h_hi: f64) -> f64 {
    let ok = |h: f64| probes.iter().all(|x| both_dominant(model, x, h));
    let (mut lo, mut hi) = (0.0, h_hi);
    assert!(!ok(hi), "upper bracket {h_hi} is still dominant");
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
