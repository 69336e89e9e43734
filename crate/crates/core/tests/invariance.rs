mod common;

use nsfd_core::invariance::sample_boundary_filtered;
use nsfd_core::linalg::dot;
use nsfd_core::{
    continuous_tangent, discrete_tangent, invariance_audit, make_host_vector, make_logistic,
    sample_boundary, step_backward, step_bound, AuditOptions, FacetFilter, FacetKind,
    HostVectorParameters, Scheme, TangentOptions,
};

#[test]
fn host_vector_samples_sit_on_their_facet() {
    let m = make_host_vector(&HostVectorParameters::default()).unwrap();
    let samples = sample_boundary(m.domain(), 100, 7).unwrap();
    assert_eq!(samples.len(), 100);
    let cons = m.domain().constraints();
    for s in &samples {
        let x = &s.point;
        match s.facet {
            FacetKind::Coordinate(i) => assert_eq!(x[i], 0.0),
            FacetKind::Constraint(c) => {
                assert!((dot(&cons[c].normal, x) - cons[c].bound).abs() <= 1e-14 * cons[c].bound)
            }
        }
        assert!(x.iter().all(|v| *v >= 0.0));
        for c in cons {
            assert!(dot(&c.normal, x) <= c.bound * (1.0 + 1e-14));
        }
    }
    assert_eq!(samples, sample_boundary(m.domain(), 100, 7).unwrap());
    assert_ne!(samples, sample_boundary(m.domain(), 100, 8).unwrap());
}

#[test]
fn continuous_violation_when_vector_bound_too_small() {
    // M_v below Λ_v/μ_v: the validated constructor refuses, so build the domain by hand
    let p = HostVectorParameters::default();
    let m = make_host_vector(&p).unwrap();
    let mut cons = m.domain().constraints().to_vec();
    cons[0].bound = 5.0;
    let domain = nsfd_core::Domain::new(vec![true; 5], cons).unwrap();
    let r = continuous_tangent(&m, &domain, &TangentOptions::continuous(500, 3)).unwrap();
    assert!(!r.violations.is_empty());
    let expected = p.lambda_v - p.mu_v * 5.0;
    for v in &r.violations {
        assert_eq!(v.facet, FacetKind::Constraint(0));
        assert!((v.value - expected).abs() < 1e-12);
        // witness lies outside the half-space
        assert!(dot(&v.normal, &v.witness) > v.bound);
    }
}

#[test]
fn discrete_tangent_equality_case_is_zero_on_plane() {
    let p = HostVectorParameters::default();
    assert_eq!(p.m_v, p.lambda_v / p.mu_v);
    let m = make_host_vector(&p).unwrap();
    let h = 0.5 * step_bound(&m).h_bar;
    let r = discrete_tangent(
        &m,
        m.domain(),
        h,
        &TangentOptions::discrete(300, 21).with_facets(FacetFilter::Constraints),
    )
    .unwrap();
    let worst = r.facet_worst(FacetKind::Constraint(0)).unwrap();
    assert!(worst.abs() < 1e-12, "{worst}");
}

#[test]
fn discrete_tangent_tends_to_continuous() {
    let p = HostVectorParameters {
        m_v: 15.0,
        m: 15.0,
        ..Default::default()
    };
    let m = make_host_vector(&p).unwrap();
    let h = 1e-4 * step_bound(&m).h_bar;
    let samples = sample_boundary_filtered(m.domain(), 300, 4, FacetFilter::All).unwrap();
    let facets = m.domain().facets();
    let mut checked = 0;
    for s in samples {
        let normal = &facets.iter().find(|f| f.kind == s.facet).unwrap().normal;
        let nf = dot(normal, &m.eval_f(&s.point).unwrap());
        if nf.abs() < 1e-3 {
            continue;
        }
        let back = step_backward(&m, &s.point, h).unwrap();
        let delta: Vec<f64> = back.iter().zip(&s.point).map(|(b, a)| b - a).collect();
        let ratio = dot(normal, &delta) / h;
        assert!((ratio + nf).abs() <= 0.05 * nf.abs(), "{ratio} vs {}", -nf);
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn fixed_point_on_boundary_has_zero_value() {
    let m = make_logistic(1.0, 1.0).unwrap();
    let r = discrete_tangent(&m, m.domain(), 1.0, &TangentOptions::discrete(50, 1)).unwrap();
    // both boundary points of [0, 1] are equilibria
    assert_eq!(r.worst_value, 0.0);
    assert!(r.violations.is_empty());
}

#[test]
fn audits_are_deterministic() {
    let m = make_host_vector(&HostVectorParameters::default()).unwrap();
    let h = 0.9 * step_bound(&m).h_bar;
    let opts = AuditOptions::new(20, 100, 99);
    let a = invariance_audit(&m, m.domain(), h, &opts).unwrap();
    let b = invariance_audit(&m, m.domain(), h, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.exits, 0);
}

#[test]
fn euler_comparison_counts_exits() {
    let m = make_host_vector(&HostVectorParameters::default()).unwrap();
    let h = 4.0 * step_bound(&m).h_bar;
    let opts = AuditOptions::new(50, 50, 1).with_scheme(Scheme::Euler);
    let r = invariance_audit(&m, m.domain(), h, &opts).unwrap();
    assert!(r.exits > 0);
    assert_eq!(r.exit_events.len(), r.exits);
    for e in &r.exit_events {
        assert!(e.margin < 0.0);
    }
    // the reversible scheme refuses the same step
    assert!(invariance_audit(&m, m.domain(), h, &AuditOptions::new(1, 1, 1)).is_err());
}
