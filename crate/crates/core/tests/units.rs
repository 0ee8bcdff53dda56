use towercf::embedding::PrecisionPolicy;
use towercf::units::{product_identities, verify_an_generation, verify_pell};

#[test]
fn pell_unit_through_level_eight() {
    let policy = PrecisionPolicy::default();
    for n in 1..=8 {
        let r = verify_pell(n, &policy).unwrap();
        assert!(r.passed(), "n = {n}: {}", r.data);
    }
}

#[test]
fn product_identities_through_level_eight() {
    for n in 1..=8 {
        let r = product_identities(n).unwrap();
        assert!(r.passed(), "n = {n}: {}", r.data);
    }
}

#[test]
fn relative_units_kernel_levels_two_to_five() {
    for n in 2..=5 {
        let r = verify_an_generation(n).unwrap();
        assert!(r.passed(), "n = {n}: {}", r.data);
        assert_eq!(r.data["kernel_rank"], 1u64 << (n - 1));
        assert_eq!(r.data["norm_matrix_rank"], (1u64 << (n - 1)) - 1);
    }
}
