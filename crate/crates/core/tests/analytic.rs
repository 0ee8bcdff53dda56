use towercf::analytic::{printed_decimals, verify_analytic, verify_expansion_inequalities, DEFAULT_TOLERANCE};

#[test]
fn every_printed_decimal_is_confirmed() {
    let d = printed_decimals(128, DEFAULT_TOLERANCE).unwrap();
    assert_eq!(d.len(), 17);
    for m in &d {
        assert!(m.matches, "{} printed {} enclosure {}", m.id, m.printed, m.value);
    }
}

#[test]
fn expansion_inequalities_are_proven() {
    let reports = verify_expansion_inequalities(6, 128, DEFAULT_TOLERANCE).unwrap();
    for r in &reports {
        assert!(r.proven(), "{}", r.to_json());
    }
}

#[test]
fn full_analytic_suite_passes() {
    let start = std::time::Instant::now();
    let records = verify_analytic(6, 256, DEFAULT_TOLERANCE).unwrap();
    for r in &records {
        assert!(r.passed(), "{}: {}", r.id, r.data);
    }
    assert!(start.elapsed().as_secs() < 120);
}
