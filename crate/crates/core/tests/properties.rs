// SPDX-License-Identifier: Apache-2.0
use dgalab::algorithms::{dijkstra_reference, Algorithm};
use dgalab::graph::{parse_edge_list, partition_1d, write_edge_list, Edge, EdgeList};
use dgalab::metrics::{write_csv, CSV_COLUMNS};
use dgalab::runtime::{RuntimeConfig, EL_UNBOUNDED};
use dgalab::simnet::NetConfig;
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = EdgeList> {
    (2u32..=6).prop_flat_map(|scale| {
        let n = 1u64 << scale;
        prop::collection::vec((0..n, 0..n, 1u32..=50), 1..120).prop_map(move |raw| {
            let edges = raw.into_iter().filter(|(s, d, _)| s != d).map(|(s, d, w)| Edge::new(s, d, w)).collect();
            EdgeList::new(n, edges)
        })
    })
}

fn arb_runtime() -> impl Strategy<Value = RuntimeConfig> {
    (
        1usize..=40,
        1u64..=64,
        prop_oneof![Just(0u64), 1u64..=32, Just(EL_UNBOUNDED)],
        1u64..=30_000,
        prop_oneof![Just(0usize), 1usize..=64],
        any::<bool>(),
        1u32..=60,
        any::<bool>(),
    )
        .prop_map(|(cs, ee, el, flush, cache, prio, delta, zero_net)| RuntimeConfig {
            coalescing_size: cs,
            ee,
            el,
            flush_period: flush,
            cache_capacity: cache,
            priority_messages: prio,
            delta,
            net: if zero_net { NetConfig::zero() } else { NetConfig::default() },
            ..Default::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn every_algorithm_matches_oracle(
        g in arb_graph(),
        mut rt in arb_runtime(),
        p in 1usize..=5,
        src_pick in any::<u64>(),
    ) {
        let p = p.min(g.n as usize);
        rt.num_ranks = p;
        let source = src_pick % g.n;
        let graphs = partition_1d(&g, p).unwrap();
        for a in Algorithm::ALL {
            let (dist, stats) = a.run(&graphs, source, &rt).unwrap();
            let expected = match a {
                Algorithm::DcBfs => dijkstra_reference(&g.with_unit_weights(), source),
                _ => dijkstra_reference(&g, source),
            };
            prop_assert_eq!(&dist, &expected, "{}", a);
            prop_assert!(stats.check_conservation(rt.coalescing_size).is_ok());
        }
    }

    #[test]
    fn scheduling_changes_work_not_answers(g in arb_graph(), a in arb_runtime(), b in arb_runtime()) {
        let p = 3.min(g.n as usize);
        let graphs = partition_1d(&g, p).unwrap();
        let (da, _) = Algorithm::DcSssp.run(&graphs, 0, &RuntimeConfig { num_ranks: p, ..a }).unwrap();
        let (db, _) = Algorithm::DcSssp.run(&graphs, 0, &RuntimeConfig { num_ranks: p, ..b }).unwrap();
        prop_assert_eq!(da, db);
    }

    #[test]
    fn edge_list_text_round_trip(g in arb_graph()) {
        prop_assume!(!g.is_empty());
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = parse_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.edges, g.edges.clone());
        prop_assert!(back.n <= g.n);
    }
}

#[test]
fn csv_header_matches_schema() {
    let mut out = Vec::new();
    write_csv(&mut out, &[]).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().trim_end(), CSV_COLUMNS.join(","));
}
