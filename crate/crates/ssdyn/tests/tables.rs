use approx::assert_abs_diff_eq;
use ssdyn::accuracy::lte_probe;
use ssdyn::problems::{sdof_case, SdofKind};
use ssdyn::tables::{all_default, gss_p_beta, parse_spec, Classification, REGISTRY};
use ssdyn::{new_algorithm, table, Error};

fn p3() -> f64 {
    (3.0 + 3f64.sqrt()) / 6.0
}

#[test]
fn ne_table_entries() {
    let t = table("NE", None, None).unwrap();
    assert_eq!(t.p, 1.0);
    assert_eq!(t.alpha, [0.5, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 1.0]);
    assert_eq!(t.classification(), Classification::VelocityImplicit);
}

#[test]
fn gsse_conservative_member_has_half_stage() {
    let t = table("GSSE", Some(1.0), Some(1.0)).unwrap();
    assert_abs_diff_eq!(t.p, 0.5, epsilon = 1e-15);
    // p = −(ρbρs − ρs − 2)/((ρs + 1)(ρb + 1)) at a few interior points
    for (rb, rs) in [(0.8, 0.0), (0.5, 0.3), (0.0, 0.0), (0.9, -0.5)] {
        let want = -(rb * rs - rs - 2.0) / ((rs + 1.0) * (rb + 1.0));
        assert_abs_diff_eq!(gss_p_beta(rb, rs).0, want, epsilon = 1e-15);
        assert_abs_diff_eq!(
            table("GSSE", Some(rb), Some(rs)).unwrap().p,
            want,
            epsilon = 1e-15
        );
    }
}

#[test]
fn tw_conservative_member() {
    let t = table("TW", Some(1.0), None).unwrap();
    assert_eq!(t.a(1), 1.0);
    assert_eq!(t.a(2), 0.0);
    assert!(t.is_fully_explicit());
}

#[test]
fn new_algorithms_closed_forms() {
    let p = p3();
    let a1 = new_algorithm(1);
    let a2 = new_algorithm(2);
    assert_abs_diff_eq!(a1.p, 0.788_675_134_594_812_9, epsilon = 1e-15);
    assert_eq!(a1.a(4), 0.0);
    assert_abs_diff_eq!(a1.a(3), p, epsilon = 1e-15);
    assert_abs_diff_eq!(a2.a(4), (3.0 + 3f64.sqrt()) / 12.0, epsilon = 1e-15);
    assert_abs_diff_eq!(a2.a(4), 0.394_337_567_297_406_4, epsilon = 1e-15);
    for t in [&a1, &a2] {
        assert_abs_diff_eq!(t.a(1), p * p / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.a(3) + t.a(4), p, epsilon = 1e-14);
        assert_abs_diff_eq!(t.a(5) + t.a(6), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(t.a(7) + t.a(8), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.a(9) + t.a(10), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.a(8), 1.0 / (2.0 * p), epsilon = 1e-14);
        assert_abs_diff_eq!(t.a(10), 1.0 / p, epsilon = 1e-14);
    }
    assert_eq!(a1.classification(), Classification::FullyExplicit);
    assert_eq!(a2.classification(), Classification::VelocityImplicit);
}

#[test]
fn classification_matches_velocity_column() {
    let implicit_velocity = ["NT", "NE", "GSSI", "NEW2"];
    for t in all_default() {
        let want = if implicit_velocity.contains(&t.name.as_str()) {
            Classification::VelocityImplicit
        } else {
            Classification::FullyExplicit
        };
        assert_eq!(t.classification(), want, "{}", t.name);
    }
}

#[test]
fn registry_and_aliases() {
    assert_eq!(all_default().len(), REGISTRY.len());
    for (alias, name) in [
        ("alg1", "NEW1"),
        ("Algorithm2", "NEW2"),
        ("cd", "NE"),
        ("ewbz-alpha", "EWBZ"),
    ] {
        assert_eq!(table(alias, None, None).unwrap().name, name);
    }
    assert_eq!(parse_spec("gsse:0.8").unwrap().rho_b, Some(0.8));
    assert!(matches!(
        table("nope", None, None),
        Err(Error::UnknownTable(_))
    ));
    assert!(matches!(
        table("E-GSSSS", None, None),
        Err(Error::Construction(..))
    ));
}

#[test]
fn parameter_ranges_are_enforced() {
    assert!(matches!(
        table("CL", Some(0.3), None),
        Err(Error::ParameterRange { .. })
    ));
    assert!(matches!(
        table("ICL", Some(0.3), None),
        Err(Error::ParameterRange { .. })
    ));
    assert!(table("CL", Some(0.5), None).is_ok());
    assert!(matches!(
        table("GSSE", Some(0.5), Some(0.8)),
        Err(Error::ParameterRange { .. })
    ));
    assert!(parse_spec("gsse:x").is_err());
}

#[test]
fn every_table_is_finite_and_exempts_only_first_order_families() {
    for t in all_default() {
        assert!(t.is_finite(), "{}", t.name);
        let first = ["TW", "TSSE", "EN-BETA", "EDV1"].contains(&t.name.as_str());
        assert_eq!(t.order_condition_defect().is_none(), first, "{}", t.name);
        if let Some(d) = t.order_condition_defect() {
            assert!(d < 1e-14, "{}: defect {d:e}", t.name);
        }
    }
}

/// Independent check of the order claims: one step from exact data must
/// lose at most O(Δt³) in displacement for every second-order table.
#[test]
fn second_order_tables_have_third_order_local_error() {
    let case = sdof_case(SdofKind::FreeUndamped);
    let dts: Vec<f64> = (0..5).map(|k| 0.02 / 2f64.powi(k)).collect();
    for t in all_default() {
        if t.claimed.undamped.disp < 2 {
            continue;
        }
        let r = lte_probe(&t, &case, 0.3, &dts).unwrap();
        let o = r.order_u.unwrap();
        assert!(o > 2.8, "{}: local displacement order {o:.2}", t.name);
    }
}
