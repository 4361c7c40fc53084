use rsym::selftest::run_all;

#[test]
fn every_fixed_case_matches() {
    let checks = run_all();
    let bad: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    assert!(bad.is_empty(), "{bad:#?}");
}
