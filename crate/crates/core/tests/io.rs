use std::time::Duration;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdsvrp_core::engine::Status;
use pdsvrp_core::gen::{random_min_cost, random_min_time, GenParams};
use pdsvrp_core::io::*;
use pdsvrp_core::model::InstanceMeta;
use pdsvrp_core::ModelKind;

const EXAMPLE: &str = include_str!("../data/example8.pdsvrp");

fn mutate(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    for _ in 0..rng.gen_range(1..=3) {
        let k = rng.gen_range(0..lines.len());
        match rng.gen_range(0..8) {
            0 => {
                lines.remove(k);
            }
            1 => {
                let dup = lines[k].clone();
                lines.insert(k, dup);
            }
            2 => lines[k] = format!("{} 7", lines[k]),
            3 => lines[k] = lines[k].replacen(char::is_numeric, "-", 1),
            4 => {
                let mut toks: Vec<&str> = lines[k].split_whitespace().collect();
                toks.pop();
                lines[k] = toks.join(" ");
            }
            5 => lines[k] = lines[k].replacen(char::is_numeric, "99999999999999999999", 1),
            6 => {
                let j = rng.gen_range(0..lines.len());
                lines.swap(k, j);
            }
            _ => {
                let mut b = lines[k].clone().into_bytes();
                if !b.is_empty() {
                    let i = rng.gen_range(0..b.len());
                    b[i] = rng.gen_range(32..127);
                }
                lines[k] = String::from_utf8(b).unwrap();
            }
        }
        if lines.is_empty() {
            break;
        }
    }
    lines.join("\n")
}

#[test]
fn fuzzed_documents_never_panic() {
    let mc = serialize_native(&random_min_cost(&GenParams::new(4, 2, 1), 1));
    let sources = [EXAMPLE.to_string(), mc];
    let mut rejected = 0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let doc = mutate(&sources[seed as usize % 2], &mut rng);
        let n_lines = doc.lines().count();
        match parse_native(&doc) {
            Ok(inst) => assert_eq!(parse_native(&serialize_native(&inst)).unwrap(), inst),
            Err(e) => {
                rejected += 1;
                assert!(e.line >= 1 && e.line <= n_lines + 1, "{e}");
                assert!(!e.field.is_empty());
            }
        }
        let _ = parse_solution(&doc);
        let _ = parse_coordinates(&doc);
    }
    assert!(rejected > 900, "{rejected}");
}

#[test]
fn example_file_is_canonical() {
    assert_eq!(serialize_native(&parse_native(EXAMPLE).unwrap()), EXAMPLE);
}

#[test]
fn coordinate_files_convert_to_native() {
    let tsp = "NAME : square4_0_50\nTYPE : TSP\nDIMENSION : 5\nEDGE_WEIGHT_TYPE : ATT\nNODE_COORD_SECTION\n1 0 0\n2 10 0\n3 0 10\n4 -10 0\n5 0 -10\nEOF\n";
    let src = parse_coordinates(tsp).unwrap();
    let params = ConverterParams {
        eligible_fraction: eligible_fraction_from_name(&src.name).unwrap(),
        rounding: Rounding::for_edge_weight_type(src.edge_weight_type.as_deref().unwrap()).unwrap(),
        drone_speed: 2.0,
        trucks: 2,
        drones: 2,
        ..Default::default()
    };
    let inst = convert_source(&src, &params).unwrap();
    assert_eq!(inst.name(), "square4_0_50");
    assert_eq!(inst.eligible().len(), 2);
    assert_eq!(inst.truck_time(0, 1), 400);
    for &c in inst.eligible() {
        assert_eq!(inst.drone_time(c), Some(1000));
    }
    let text = serialize_native(&inst);
    assert_eq!(parse_native(&text).unwrap(), inst);
    assert_eq!(convert_source(&src, &params).unwrap(), inst);
}

fn name_strategy() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_.-]{0,12}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_inverts_serialize(seed in any::<u64>(), n in 1usize..=12, t in 1usize..=4, d in 0usize..=4, cost in any::<bool>(),
                               name in name_strategy(), scale in 1i64..=1000,
                               prov in proptest::collection::vec(("[a-z_]{1,8}", "[ -~]{0,20}"), 0..3)) {
        let p = GenParams::new(n, t, d);
        let inst = if cost { random_min_cost(&p, seed) } else { random_min_time(&p, seed) };
        let provenance = prov.into_iter().map(|(k, v): (String, String)| (k, v.trim().to_string())).collect();
        let inst = inst.with_meta(InstanceMeta { name, scale, provenance }).unwrap();
        let text = serialize_native(&inst);
        let back = parse_native(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_native(&back), text);
    }

    #[test]
    fn conversion_is_deterministic(seed in any::<u64>(), pts in proptest::collection::vec((-1000.0f64..1000.0, -1000.0f64..1000.0), 2..30),
                                   frac in 0.0f64..=1.0, speed in 0.1f64..4.0, rule in 0usize..4) {
        let rounding = [Rounding::Nearest, Rounding::Ceiling, Rounding::Att, Rounding::ExactScaled][rule];
        let params = ConverterParams { eligible_fraction: frac, drone_speed: speed, rounding, seed, ..Default::default() };
        let a = convert_coordinates(&pts, &params).unwrap();
        prop_assert_eq!(&a, &convert_coordinates(&pts, &params).unwrap());
        prop_assert_eq!(a.eligible().len(), ((frac * (pts.len() - 1) as f64) + 1e-9).floor() as usize);
        prop_assert_eq!(parse_native(&serialize_native(&a)).unwrap(), a);
    }

    #[test]
    fn results_table_round_trips(rows in proptest::collection::vec((name_strategy(), 1usize..5, 0usize..5, any::<bool>(), 0i64..10_000_000, 0i64..1_000_000, 0u8..4), 0..6)) {
        let models = [ModelKind::Mt3Idx, ModelKind::Mt2Idx];
        let rows: Vec<ResultRow> = rows.into_iter().map(|(instance, trucks, drones, has_ub, lb, gap, st)| {
            let status = [Status::Optimal, Status::Feasible, Status::Infeasible, Status::Unknown][st as usize];
            let entry = ResultEntry {
                model: ModelKind::Mt3Idx,
                status,
                lower_bound: (status != Status::Infeasible).then_some(lb),
                upper_bound: (has_ub && status != Status::Infeasible).then_some(lb + gap),
                time: Duration::from_millis(1500),
            };
            ResultRow { instance, trucks, drones, scale: 100, entries: vec![entry] }
        }).collect();
        let text = emit_results_table(&models, &rows);
        let back = parse_results_table(&text).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (r, b) in rows.iter().zip(&back) {
            prop_assert_eq!(&b.instance, &r.instance);
            prop_assert_eq!((b.trucks, b.drones), (r.trucks, r.drones));
            prop_assert_eq!(b.cells[0].lower_bound, r.entries[0].lower_bound);
            prop_assert_eq!(b.cells[0].upper_bound, r.entries[0].upper_bound);
            prop_assert_eq!(&b.cells[0].time, "1.50");
            prop_assert_eq!((b.cells[1].lower_bound, b.cells[1].upper_bound), (None, None));
        }
    }
}
