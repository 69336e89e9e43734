//! Shared fixtures for the criterion benches.

use nsfd_core::{make_host_vector, HostVectorParameters, MassActionModel, RealMatrix};

pub fn host_vector() -> MassActionModel {
    make_host_vector(&HostVectorParameters::default()).expect("default parameters are valid")
}

/// Interior point used as the bench state.
pub fn host_vector_state() -> Vec<f64> {
    vec![6.0, 2.0, 5.0, 1.5, 2.0]
}

/// Deterministic dense test matrix with a spread spectrum.
pub fn test_matrix(n: usize) -> RealMatrix {
    let mut a = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] =
                ((i * 7 + j * 13) % 11) as f64 / 11.0 - 0.5 + if i == j { i as f64 } else { 0.0 };
        }
    }
    a
}
