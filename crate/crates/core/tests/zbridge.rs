use torlab_core::distops::TruncationWindow;
use torlab_core::fockhom::{unit_multis, HomModule};
use torlab_core::report::Entry;
use torlab_core::zbridge::{
    check_ck, compare_modules, from_zmodule, omega_entries, to_zmodule, verify_pairing, verify_verma, verify_zk_relations,
    CkSampling, HomZ, ScaledCenter,
};
use torlab_core::{Error, Q};

fn a1() -> HomModule {
    HomModule::new("A1".parse().unwrap(), 1)
}

fn small() -> TruncationWindow {
    TruncationWindow::new(2, 1, 1).unwrap()
}

fn failing(es: &[Entry]) -> Vec<String> {
    es.iter().filter(|e| !e.passed()).map(|e| format!("{} [{}]", e.relation_id, e.params)).collect()
}

#[test]
fn lattice_module_is_in_ck() {
    let hm = a1();
    let es = check_ck(&hm, &small(), &unit_multis(1), CkSampling::default()).unwrap();
    assert!(failing(&es).is_empty(), "{:?}", failing(&es));
    assert!(es.iter().any(|e| e.relation_id == "ck-factorization"));
}

#[test]
fn zero_level_is_rejected() {
    let hm = a1();
    let sc = ScaledCenter { base: &hm, c: Q::from(0) };
    assert!(matches!(check_ck(&sc, &small(), &unit_multis(1), CkSampling::default()), Err(Error::ZeroLevel)));
}

#[test]
fn constant_center_breaks_factorization_only() {
    let hm = a1();
    let sc = ScaledCenter { base: &hm, c: Q::from(2) };
    let es = check_ck(&sc, &small(), &unit_multis(1), CkSampling::default()).unwrap();
    let level = es.iter().find(|e| e.relation_id == "ck-level").unwrap();
    assert!(level.passed());
    assert!(es.iter().any(|e| e.relation_id == "ck-factorization" && !e.passed()));
}

#[test]
fn direct_and_vacuum_space_z_operators_agree() {
    let hm = a1();
    let win = small();
    let multi = unit_multis(1);
    let direct = verify_zk_relations(&HomZ::new(&hm), &win, &multi, None).unwrap();
    let zm = to_zmodule(&hm, &win).unwrap();
    let vacuum = verify_zk_relations(&zm, &win, &multi, None).unwrap();
    assert!(failing(&direct).is_empty(), "{:?}", failing(&direct));
    assert!(failing(&vacuum).is_empty(), "{:?}", failing(&vacuum));
    let ids = |es: &[Entry]| es.iter().map(|e| (e.relation_id.clone(), e.params.clone())).collect::<Vec<_>>();
    assert_eq!(ids(&direct), ids(&vacuum));
    assert!(omega_entries(&zm).iter().all(Entry::passed));
}

#[test]
fn round_trip_recovers_the_lattice_module() {
    let hm = a1();
    let win = small();
    let zm = to_zmodule(&hm, &win).unwrap();
    let rec = from_zmodule(&zm, hm.g.clone()).unwrap();
    assert!(verify_verma(&rec, &win).passed());
    assert!(verify_pairing(&hm, &rec, &win).passed());
    let cmp = compare_modules(&hm, &rec, &win, &unit_multis(1));
    assert!(failing(&cmp).is_empty(), "{:?}", failing(&cmp));
}
