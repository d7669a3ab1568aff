use pdsvrp_bench::pair;
use pdsvrp_core::Variant;

#[test]
fn pair_is_seeded_and_sized() {
    let (mt, mc) = pair(9, 5);
    assert_eq!((mt.variant(), mc.variant()), (Variant::MinTime, Variant::MinCost));
    assert_eq!((mt.customers(), mt.truck_count(), mt.drone_count()), (9, 2, 2));
    assert_eq!(pair(9, 5).0, mt);
}
