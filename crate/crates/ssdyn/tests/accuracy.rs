use ssdyn::accuracy::{convergence_study, global_error, ladder, lte_probe, ExactProblem};
use ssdyn::problems::{sdof_case, Harmonic, SdofCase, SdofKind};
use ssdyn::{new_algorithm, table};

#[test]
fn global_error_hand_values() {
    assert_eq!(
        global_error(&[0.5, -1.0, 2.0], &[0.5, -1.0, 2.0]).unwrap(),
        0.0
    );
    assert!((global_error(&[2.0, -4.0, 6.0], &[1.0, -2.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
    assert!((global_error(&[3.0, 0.0], &[3.0, 4.0]).unwrap() - 0.8).abs() < 1e-15);
    assert!(global_error(&[0.0, 0.0], &[0.0, 0.0]).is_err());
    assert!(global_error(&[], &[]).is_err());
}

/// Second-order central differences of the closed form against the ODE.
#[test]
fn sdof_closed_forms_satisfy_their_equation() {
    let h = 1e-4;
    for kind in SdofKind::ALL {
        let c = sdof_case(kind);
        for i in 1..40 {
            let t = 0.13 * i as f64;
            let (u, v, a) = c.solution(t);
            let (um, _, _) = c.solution(t - h);
            let (up, _, _) = c.solution(t + h);
            let fd_v = (up - um) / (2.0 * h);
            let fd_a = (up - 2.0 * u + um) / (h * h);
            let scale = 1.0 + u.abs() + v.abs() + a.abs();
            assert!((fd_v - v).abs() < 1e-6 * scale, "{kind:?} t={t}: v");
            assert!((fd_a - a).abs() < 1e-5 * scale, "{kind:?} t={t}: a");
            let residual = a + 2.0 * c.xi * c.omega * v + c.omega * c.omega * u - c.forcing.eval(t);
            assert!(residual.abs() < 1e-10 * scale);
        }
        let (u0, v0, _) = c.solution(0.0);
        assert!((u0 - c.u0).abs() < 1e-14 && (v0 - c.v0).abs() < 1e-14);
    }
}

#[test]
fn sdof_cases_match_published_solutions() {
    let fu = sdof_case(SdofKind::FreeUndamped);
    let fd = sdof_case(SdofKind::FreeDamped);
    let ou = sdof_case(SdofKind::ForcedUndamped);
    let od = sdof_case(SdofKind::ForcedDamped);
    for t in [0.0, 0.7, 2.3, 5.1] {
        assert!((fu.solution(t).0 - (2.0 * t).cos()).abs() < 1e-14);
        let w = 4.0 * 6f64.sqrt() / 5.0;
        assert!(
            (fd.solution(t).0 - 2.5 * 6f64.sqrt() * (-0.4 * t).exp() * (w * t).sin()).abs() < 1e-12
        );
        assert!((ou.solution(t).0 + (2.0 * t).cos() / 3.0).abs() < 1e-14);
        let want = (-2.0 * t).exp() * (t.cos() + 2.0 * t.sin())
            - (8.0 * (2.0 * t).cos() - (2.0 * t).sin()) / 65.0;
        assert!((od.solution(t).0 - want).abs() < 1e-14);
    }
    assert_eq!((fd.xi, fd.omega, fd.u0, fd.v0), (0.2, 2.0, 0.0, 12.0));
    assert_eq!((od.u0, od.v0), (57.0 / 65.0, 2.0 / 65.0));
}

#[test]
fn alg1_undamped_convergence_orders() {
    let c = sdof_case(SdofKind::ForcedUndamped);
    let r = convergence_study(&new_algorithm(1), &c, &ladder(c.t_end(), 2..=7)).unwrap();
    assert!((2.8..=3.2).contains(&r.slope_u), "{}", r.slope_u);
    assert!((2.8..=3.2).contains(&r.slope_v), "{}", r.slope_v);
    let sa = r.slope_a.unwrap();
    assert!((1.8..=2.2).contains(&sa), "{sa}");
    assert!(r.errors_u.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn gsse_is_second_order() {
    let c = sdof_case(SdofKind::ForcedUndamped);
    let r = convergence_study(
        &table("GSSE", Some(1.0), None).unwrap(),
        &c,
        &ladder(c.t_end(), 2..=7),
    )
    .unwrap();
    for s in [r.slope_u, r.slope_v, r.slope_a.unwrap()] {
        assert!((s - 2.0).abs() <= 0.25, "{s}");
    }
}

#[test]
fn alg2_damped_convergence_and_halving_ratio() {
    let c = sdof_case(SdofKind::ForcedDamped);
    let dts = ladder(c.t_end(), 2..=7);
    let r = convergence_study(&new_algorithm(2), &c, &dts).unwrap();
    assert!((2.8..=3.2).contains(&r.slope_u), "{}", r.slope_u);
    assert!((2.8..=3.2).contains(&r.slope_v), "{}", r.slope_v);
    for w in r.errors_u[2..].windows(2) {
        let q = w[0] / w[1];
        assert!((6.0..=10.0).contains(&q), "halving ratio {q}");
    }
}

#[test]
fn edv1_has_no_acceleration_error() {
    let c = sdof_case(SdofKind::ForcedUndamped);
    let r = convergence_study(
        &table("EDV1", None, None).unwrap(),
        &c,
        &ladder(c.t_end(), 3..=6),
    )
    .unwrap();
    assert!(r.errors_a.is_none() && r.slope_a.is_none());
}

#[test]
fn unstable_steps_are_marked_diverged() {
    let c = SdofCase::new(0.0, 2.0, Harmonic::ZERO, 1.0, 0.0, 100.0);
    let r = convergence_study(&table("NE", None, None).unwrap(), &c, &[1.5, 0.01]).unwrap();
    assert_eq!(r.diverged, vec![true, false]);
}

#[test]
fn local_error_is_one_order_above_global() {
    let dts: Vec<f64> = (0..5).map(|k| 0.04 / 2f64.powi(k)).collect();
    let r = lte_probe(
        &new_algorithm(2),
        &sdof_case(SdofKind::ForcedDamped),
        0.5,
        &dts,
    )
    .unwrap();
    assert!((r.order_u.unwrap() - 4.0).abs() < 0.25, "{:?}", r.order_u);
    let r = lte_probe(
        &table("NE", None, None).unwrap(),
        &sdof_case(SdofKind::FreeUndamped),
        0.5,
        &dts,
    )
    .unwrap();
    assert!((r.order_u.unwrap() - 3.0).abs() < 0.25, "{:?}", r.order_u);
    let zero = SdofCase::new(0.1, 2.0, Harmonic::ZERO, 0.0, 0.0, 1.0);
    let r = lte_probe(&new_algorithm(2), &zero, 0.0, &dts).unwrap();
    assert!(r
        .err_u
        .iter()
        .chain(&r.err_v)
        .chain(&r.err_a)
        .all(|e| *e == 0.0));
    assert!(r.order_u.is_none());
}
